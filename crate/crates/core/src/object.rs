//! Database objects, queries, and the sparse term vectors they carry.

use std::collections::BTreeMap;

/// A location in the Euclidean plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// Sparse nonnegative term weights.
///
/// Terms are kept in lexicographic order so every dot product and norm is
/// summed in the same order no matter how the vector was built. Zero weights
/// are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TermVector {
    weights: BTreeMap<String, f64>,
}

impl TermVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the weight of `term`. A zero weight removes the term.
    ///
    /// Panics on negative or non-finite weights.
    pub fn set(&mut self, term: impl Into<String>, weight: f64) {
        assert!(
            weight.is_finite() && weight >= 0.0,
            "term weights must be finite and nonnegative, got {weight}"
        );
        let term = term.into();
        if weight == 0.0 {
            self.weights.remove(&term);
        } else {
            self.weights.insert(term, weight);
        }
    }

    pub fn get(&self, term: &str) -> f64 {
        self.weights.get(term).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Terms and weights in lexicographic term order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.weights.iter().map(|(t, &w)| (t.as_str(), w))
    }

    pub fn norm_squared(&self) -> f64 {
        self.weights.values().map(|w| w * w).sum()
    }

    /// Dot product, accumulated over the shared terms in lexicographic order.
    pub fn dot(&self, other: &TermVector) -> f64 {
        let mut a = self.weights.iter().peekable();
        let mut b = other.weights.iter().peekable();
        let mut acc = 0.0;
        while let (Some((ta, wa)), Some((tb, wb))) = (a.peek(), b.peek()) {
            match ta.cmp(tb) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc += *wa * *wb;
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    /// Coordinatewise minimum. Terms missing from either side count as 0 and
    /// therefore drop out.
    pub fn intersect(&self, other: &TermVector) -> TermVector {
        let weights = self
            .weights
            .iter()
            .filter_map(|(t, &w)| other.weights.get(t).map(|&v| (t.clone(), w.min(v))))
            .collect();
        TermVector { weights }
    }

    /// Coordinatewise maximum.
    pub fn union(&self, other: &TermVector) -> TermVector {
        let mut weights = self.weights.clone();
        for (t, &w) in &other.weights {
            weights
                .entry(t.clone())
                .and_modify(|v| *v = v.max(w))
                .or_insert(w);
        }
        TermVector { weights }
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for TermVector {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        let mut v = TermVector::new();
        for (t, w) in iter {
            v.set(t, w);
        }
        v
    }
}

/// A spatio-textual database object.
#[derive(Debug, Clone, PartialEq)]
pub struct StObject {
    pub id: String,
    pub loc: Point,
    pub vct: TermVector,
}

impl StObject {
    pub fn new(id: impl Into<String>, loc: Point, vct: TermVector) -> Self {
        StObject {
            id: id.into(),
            loc,
            vct,
        }
    }
}

/// The query: a location and a term vector, never part of the database.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryObject {
    pub loc: Point,
    pub vct: TermVector,
}

impl QueryObject {
    pub fn new(loc: Point, vct: TermVector) -> Self {
        QueryObject { loc, vct }
    }
}
