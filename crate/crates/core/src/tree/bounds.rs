//! Group-level similarity bounds.
//!
//! A group is anything with an MBR plus intersection and union vectors: an
//! index node, a single object (intersection = union = its vector) or the
//! query. All bounds share one code path, and for two single objects every
//! bound collapses to the exact similarity.

use crate::object::{Point, TermVector};
use crate::similarity::NormStats;
use crate::tree::mbr::{max_dist, min_dist, Mbr};

#[derive(Debug, Clone, Copy)]
pub struct Group<'a> {
    pub mbr: Mbr,
    pub int_vct: &'a TermVector,
    pub union_vct: &'a TermVector,
}

impl<'a> Group<'a> {
    pub fn point(loc: Point, vct: &'a TermVector) -> Self {
        Group {
            mbr: Mbr::point(loc),
            int_vct: vct,
            union_vct: vct,
        }
    }
}

/// Lower bound on Extended Jaccard between any member of `e` and any member
/// of `f`: smallest possible numerator over largest possible denominator.
pub fn min_t(e: &Group, f: &Group) -> f64 {
    if e.union_vct.is_empty() && f.union_vct.is_empty() {
        return 0.0;
    }
    let num = e.int_vct.dot(f.int_vct);
    let denom = e.union_vct.norm_squared() + f.union_vct.norm_squared() - num;
    if denom <= 0.0 {
        return 0.0;
    }
    (num / denom).clamp(0.0, 1.0)
}

/// Upper bound on Extended Jaccard: largest possible numerator over smallest
/// possible denominator.
///
/// A zero numerator means no member pair shares a term, so the bound is 0. A
/// nonpositive denominator (sparse intersections) yields the trivial bound 1.
pub fn max_t(e: &Group, f: &Group) -> f64 {
    let num = e.union_vct.dot(f.union_vct);
    if num == 0.0 {
        return 0.0;
    }
    let denom = e.int_vct.norm_squared() + f.int_vct.norm_squared() - num;
    if denom <= 0.0 {
        return 1.0;
    }
    (num / denom).clamp(0.0, 1.0)
}

/// Lower bound on spatio-textual similarity between members of two groups.
pub fn min_st(e: &Group, f: &Group, alpha: f64, stats: &NormStats) -> f64 {
    stats.combine(alpha, max_dist(&e.mbr, &f.mbr), min_t(e, f))
}

/// Upper bound on spatio-textual similarity between members of two groups.
pub fn max_st(e: &Group, f: &Group, alpha: f64, stats: &NormStats) -> f64 {
    stats.combine(alpha, min_dist(&e.mbr, &f.mbr), max_t(e, f))
}
