//! Per-entry NN-lists: bounds on the similarity between the points of an
//! entry and their k-th nearest neighbor.
//!
//! One keyed tuple store backs both the lower view (sorted by `min_sim`) and
//! the upper view (sorted by `max_sim`), so the two can never disagree on
//! membership. Tuples never overlap each other in the tree: adding an entry
//! evicts its proper ancestors, since keeping both would count the shared
//! points twice and can make the lower bound prune a true result.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::object::QueryObject;
use crate::tree::{Entry, IurTree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NnTuple {
    pub entry: Entry,
    /// Points of `entry` that count as neighbors of every point of the owner.
    pub m: usize,
    pub min_sim: f64,
    pub max_sim: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Hit,
    Drop,
    Undecided,
}

#[derive(Debug, Clone)]
pub struct NnLists {
    owner: Entry,
    tuples: BTreeMap<Entry, NnTuple>,
}

impl NnLists {
    pub fn new(owner: Entry) -> Self {
        NnLists {
            owner,
            tuples: BTreeMap::new(),
        }
    }

    /// Builds lists from raw tuples. No tree checks are made.
    pub fn from_tuples(owner: Entry, tuples: impl IntoIterator<Item = NnTuple>) -> Self {
        NnLists {
            owner,
            tuples: tuples.into_iter().map(|t| (t.entry, t)).collect(),
        }
    }

    pub fn owner(&self) -> Entry {
        self.owner
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn get(&self, entry: Entry) -> Option<&NnTuple> {
        self.tuples.get(&entry)
    }

    pub fn tuples(&self) -> impl Iterator<Item = &NnTuple> {
        self.tuples.values()
    }

    /// Σ m over all tuples.
    pub fn coverage(&self) -> usize {
        self.tuples.values().map(|t| t.m).sum()
    }

    /// Complete when every other point of the dataset is accounted for:
    /// Σ m = N − 1. Under the non-overlap invariant this is exactly "every
    /// point is inside some tuple, with the owner's own points counted as
    /// |E| − 1".
    pub fn is_complete(&self, n: usize) -> bool {
        self.coverage() + 1 == n
    }

    /// Tuples by `min_sim` descending, ties by entry.
    pub fn lower_view(&self) -> Vec<NnTuple> {
        let mut v: Vec<NnTuple> = self.tuples.values().copied().collect();
        v.sort_by(|a, b| b.min_sim.total_cmp(&a.min_sim).then(a.entry.cmp(&b.entry)));
        v
    }

    /// Tuples by `max_sim` descending, ties by entry.
    pub fn upper_view(&self) -> Vec<NnTuple> {
        let mut v: Vec<NnTuple> = self.tuples.values().copied().collect();
        v.sort_by(|a, b| b.max_sim.total_cmp(&a.max_sim).then(a.entry.cmp(&b.entry)));
        v
    }

    /// Adds the owner to its own lists with `m = |E| − 1`.
    pub fn add_self(&mut self, tree: &IurTree, alpha: f64) -> Result<()> {
        let e = self.owner;
        if !e.is_node() {
            return Err(Error::NotInternalNode(tree.label(e).to_string()));
        }
        self.evict_ancestors_of(tree, e);
        self.tuples.insert(
            e,
            NnTuple {
                entry: e,
                m: tree.count(e) - 1,
                min_sim: tree.min_st(e, e, alpha),
                max_sim: tree.max_st(e, e, alpha),
            },
        );
        Ok(())
    }

    /// Upserts `b` with freshly computed bounds against the owner, evicting any
    /// tuple that is a proper ancestor of `b`.
    pub fn update(&mut self, tree: &IurTree, b: Entry, alpha: f64) {
        let a = self.owner;
        debug_assert_ne!(a, b, "an entry is added to its own lists via add_self");
        self.evict_ancestors_of(tree, b);
        let m = tree.count(b) - usize::from(tree.overlaps(a, b));
        self.tuples.insert(
            b,
            NnTuple {
                entry: b,
                m,
                min_sim: tree.min_st(a, b, alpha),
                max_sim: tree.max_st(a, b, alpha),
            },
        );
    }

    /// Copies these lists for `child`. Bounds carry over verbatim (they hold
    /// for any subset of the parent's points); `m` is recomputed for the new
    /// owner.
    pub fn inherit(&self, tree: &IurTree, child: Entry) -> NnLists {
        let tuples = self
            .tuples
            .iter()
            .map(|(&e, t)| {
                let m = tree.count(e) - usize::from(tree.overlaps(child, e));
                (e, NnTuple { m, ..*t })
            })
            .collect();
        NnLists {
            owner: child,
            tuples,
        }
    }

    /// Drops the owner's own tuple and its parent's tuple.
    pub fn strip_self_and_parent(&mut self, tree: &IurTree) {
        self.tuples.remove(&self.owner);
        if let Some(p) = tree.parent(self.owner) {
            self.tuples.remove(&Entry::Node(p));
        }
    }

    /// Lower bound on the similarity to the k-th nearest neighbor, if the list
    /// covers at least `k` points.
    pub fn knn_lower(&self, k: usize) -> Option<f64> {
        cumulative(&self.lower_view(), k).map(|t| t.min_sim)
    }

    /// Upper bound on the similarity to the k-th nearest neighbor. Only
    /// available on a complete list. When fewer than `k` other points exist the
    /// k-th neighbor is absent and the bound is negative infinity.
    pub fn knn_upper(&self, k: usize, n: usize) -> Option<f64> {
        if !self.is_complete(n) {
            return None;
        }
        Some(cumulative(&self.upper_view(), k).map_or(f64::NEG_INFINITY, |t| t.max_sim))
    }

    /// The upper bound without the completeness gate. Unsound; used only by the
    /// legacy modes.
    pub fn knn_upper_ungated(&self, k: usize) -> Option<f64> {
        cumulative(&self.upper_view(), k).map(|t| t.max_sim)
    }

    /// True when no tuple lies inside another tuple's subtree.
    pub fn is_non_overlapping(&self, tree: &IurTree) -> bool {
        let entries: Vec<Entry> = self.tuples.keys().copied().collect();
        entries
            .iter()
            .enumerate()
            .all(|(i, &a)| entries[i + 1..].iter().all(|&b| !tree.overlaps(a, b)))
    }

    fn evict_ancestors_of(&mut self, tree: &IurTree, e: Entry) {
        for anc in tree.ancestors(e) {
            self.tuples.remove(&Entry::Node(anc));
        }
    }
}

fn cumulative(view: &[NnTuple], k: usize) -> Option<&NnTuple> {
    let mut acc = 0;
    view.iter().find(|t| {
        acc += t.m;
        acc >= k
    })
}

/// Pruning and acceptance rule. Ties go to the database points: equality
/// prunes and acceptance needs a strict margin.
pub fn decide(max_st_q: f64, min_st_q: f64, lower: Option<f64>, upper: Option<f64>) -> Decision {
    if lower.is_some_and(|l| max_st_q <= l) {
        Decision::Drop
    } else if upper.is_some_and(|u| min_st_q > u) {
        Decision::Hit
    } else {
        Decision::Undecided
    }
}

/// Hit/Drop test for the owner of `lists` against the query.
pub fn is_hit_or_drop(
    tree: &IurTree,
    q: &QueryObject,
    lists: &NnLists,
    k: usize,
    alpha: f64,
) -> Decision {
    let e = lists.owner();
    decide(
        tree.max_st_query(e, q, alpha),
        tree.min_st_query(e, q, alpha),
        lists.knn_lower(k),
        lists.knn_upper(k, tree.len()),
    )
}

/// Hit/Drop test that trusts whatever the upper list covers.
pub fn is_hit_or_drop_ungated(
    tree: &IurTree,
    q: &QueryObject,
    lists: &NnLists,
    k: usize,
    alpha: f64,
) -> Decision {
    let e = lists.owner();
    decide(
        tree.max_st_query(e, q, alpha),
        tree.min_st_query(e, q, alpha),
        lists.knn_lower(k),
        lists.knn_upper_ungated(k),
    )
}
