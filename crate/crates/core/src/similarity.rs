//! Exact object-level similarity: Euclidean distance, Extended Jaccard,
//! the combined spatio-textual score and the dataset statistics that
//! normalize it.

use crate::error::{Error, Result};
use crate::object::{Point, StObject, TermVector};

/// Dataset-wide extremes used to normalize both similarity components.
///
/// Always computed from database objects only; the query never contributes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormStats {
    /// Smallest pairwise distance.
    pub phi_s: f64,
    /// Largest pairwise distance.
    pub psi_s: f64,
    /// Smallest pairwise Extended Jaccard.
    pub phi_t: f64,
    /// Largest pairwise Extended Jaccard.
    pub psi_t: f64,
}

impl NormStats {
    /// Statistics for a dataset with no pairs. Both components collapse to the
    /// constant 1.
    pub const fn degenerate() -> Self {
        NormStats {
            phi_s: 0.0,
            psi_s: 0.0,
            phi_t: 0.0,
            psi_t: 0.0,
        }
    }

    /// Normalized spatial proximity for a distance. May leave `[0, 1]` when the
    /// distance lies outside the dataset's range.
    pub fn spatial(&self, dist: f64) -> f64 {
        if self.psi_s == self.phi_s {
            1.0
        } else {
            1.0 - (dist - self.phi_s) / (self.psi_s - self.phi_s)
        }
    }

    /// Normalized textual similarity for an Extended Jaccard value.
    pub fn textual(&self, ej: f64) -> f64 {
        if self.psi_t == self.phi_t {
            1.0
        } else {
            (ej - self.phi_t) / (self.psi_t - self.phi_t)
        }
    }

    /// The weighted combination. Every similarity and every bound in the crate
    /// goes through here, so point-level values agree bit for bit.
    pub fn combine(&self, alpha: f64, dist: f64, ej: f64) -> f64 {
        alpha * self.spatial(dist) + (1.0 - alpha) * self.textual(ej)
    }
}

/// Query parameters: spatial weight `alpha` and neighbor rank `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub alpha: f64,
    pub k: usize,
}

impl SimParams {
    pub fn new(alpha: f64, k: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParams(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        Ok(SimParams { alpha, k })
    }
}

pub fn euclidean_dist(p: Point, q: Point) -> f64 {
    let dx = (p.x - q.x).abs();
    let dy = (p.y - q.y).abs();
    (dx * dx + dy * dy).sqrt()
}

/// `u·v / (|u|² + |v|² − u·v)`, with two empty vectors scoring 0.
pub fn extended_jaccard(u: &TermVector, v: &TermVector) -> f64 {
    if u.is_empty() && v.is_empty() {
        return 0.0;
    }
    let dot = u.dot(v);
    let denom = u.norm_squared() + v.norm_squared() - dot;
    (dot / denom).clamp(0.0, 1.0)
}

/// Exhaustive min/max of distance and Extended Jaccard over all unordered
/// object pairs.
pub fn compute_norm_stats(dataset: &[StObject]) -> Result<NormStats> {
    if dataset.len() < 2 {
        return Err(Error::DatasetTooSmall(dataset.len()));
    }
    let mut stats = NormStats {
        phi_s: f64::INFINITY,
        psi_s: f64::NEG_INFINITY,
        phi_t: f64::INFINITY,
        psi_t: f64::NEG_INFINITY,
    };
    for (i, a) in dataset.iter().enumerate() {
        for b in &dataset[i + 1..] {
            let d = euclidean_dist(a.loc, b.loc);
            let t = extended_jaccard(&a.vct, &b.vct);
            stats.phi_s = stats.phi_s.min(d);
            stats.psi_s = stats.psi_s.max(d);
            stats.phi_t = stats.phi_t.min(t);
            stats.psi_t = stats.psi_t.max(t);
        }
    }
    Ok(stats)
}

/// Spatio-textual similarity between two located term vectors.
///
/// Not clamped: a query closer than any database pair scores above 1.
pub fn sim_st(
    a: (Point, &TermVector),
    b: (Point, &TermVector),
    alpha: f64,
    stats: &NormStats,
) -> f64 {
    stats.combine(alpha, euclidean_dist(a.0, b.0), extended_jaccard(a.1, b.1))
}

/// `min(x, x') / max(x, x')` for positive inputs.
pub fn fdim_ratio(x: f64, x2: f64) -> Result<f64> {
    if !(x > 0.0 && x2 > 0.0) {
        return Err(Error::NonPositiveInput(x, x2));
    }
    Ok(x.min(x2) / x.max(x2))
}
