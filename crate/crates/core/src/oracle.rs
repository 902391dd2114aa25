//! Ground truth by exhaustive evaluation.

use crate::dataset::Fixture;
use crate::engine::{rstknn_query, Mode};
use crate::generate::{random_fixture, rng_for, InstanceConfig};
use crate::object::{QueryObject, StObject, TermVector};
use crate::similarity::{extended_jaccard, fdim_ratio, sim_st, NormStats, SimParams};
use crate::tree::{max_dist, min_dist, Entry, Group, IurTree};

/// Similarity from `o` to its k-th nearest neighbor among the other objects,
/// or negative infinity when fewer than `k` others exist.
pub fn kth_nn_sim(
    o: &StObject,
    dataset: &[StObject],
    k: usize,
    alpha: f64,
    stats: &NormStats,
) -> f64 {
    let mut sims: Vec<f64> = dataset
        .iter()
        .filter(|p| p.id != o.id)
        .map(|p| sim_st((o.loc, &o.vct), (p.loc, &p.vct), alpha, stats))
        .collect();
    if k == 0 || sims.len() < k {
        return f64::NEG_INFINITY;
    }
    sims.sort_by(|a, b| b.total_cmp(a));
    sims[k - 1]
}

/// Objects that rank the query strictly above their k-th nearest neighbor,
/// in id order.
pub fn rknn_bruteforce(
    dataset: &[StObject],
    q: &QueryObject,
    params: SimParams,
    stats: &NormStats,
) -> Vec<String> {
    let mut out: Vec<String> = dataset
        .iter()
        .filter(|o| {
            let to_q = sim_st((o.loc, &o.vct), (q.loc, &q.vct), params.alpha, stats);
            to_q > kth_nn_sim(o, dataset, params.k, params.alpha, stats)
        })
        .map(|o| o.id.clone())
        .collect();
    out.sort();
    out
}

/// Brute force over the objects stored in `tree`, using its statistics.
pub fn rknn_bruteforce_tree(tree: &IurTree, q: &QueryObject, params: SimParams) -> Vec<String> {
    rknn_bruteforce(tree.objects(), q, params, tree.stats())
}

/// Textual bound functions under test.
#[derive(Clone, Copy)]
pub struct TextBounds {
    pub min_t: fn(&Group, &Group) -> f64,
    pub max_t: fn(&Group, &Group) -> f64,
}

impl Default for TextBounds {
    fn default() -> Self {
        TextBounds {
            min_t: crate::tree::min_t,
            max_t: crate::tree::max_t,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SandwichReport {
    pub pairs_checked: usize,
    pub violations: Vec<String>,
}

impl SandwichReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks, for every pair of nodes (a node with itself included) and every
/// node against the query, that the textual and combined bounds enclose the
/// exact values over all contained object pairs.
pub fn check_bound_sandwich(tree: &IurTree, q: Option<&QueryObject>, alpha: f64) -> SandwichReport {
    check_bound_sandwich_with(tree, q, alpha, TextBounds::default())
}

pub fn check_bound_sandwich_with(
    tree: &IurTree,
    q: Option<&QueryObject>,
    alpha: f64,
    bounds: TextBounds,
) -> SandwichReport {
    let objs = tree.objects();
    let stats = tree.stats();
    let n = objs.len();
    let mut ej = vec![0.0; n * n];
    let mut sim = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            ej[i * n + j] = extended_jaccard(&objs[i].vct, &objs[j].vct);
            sim[i * n + j] = sim_st(
                (objs[i].loc, &objs[i].vct),
                (objs[j].loc, &objs[j].vct),
                alpha,
                stats,
            );
        }
    }
    let members: Vec<Vec<usize>> = tree
        .nodes()
        .iter()
        .map(|nd| {
            tree.subtree_objects(Entry::Node(nd.id))
                .iter()
                .map(|o| o.0)
                .collect()
        })
        .collect();

    let mut report = SandwichReport::default();
    let mut check = |label: String, t: (f64, f64, f64, f64), st: (f64, f64, f64, f64)| {
        report.pairs_checked += 1;
        let (min_t, lo_t, hi_t, max_t) = t;
        let (min_st, lo_st, hi_st, max_st) = st;
        if min_t > lo_t || max_t < hi_t {
            report.violations.push(format!(
                "{label}: text bounds [{min_t}, {max_t}] do not enclose [{lo_t}, {hi_t}]"
            ));
        }
        if min_st > lo_st || max_st < hi_st {
            report.violations.push(format!(
                "{label}: similarity bounds [{min_st}, {max_st}] do not enclose [{lo_st}, {hi_st}]"
            ));
        }
    };
    let combine_bounds = |a: &Group, b: &Group| {
        let lo_t = (bounds.min_t)(a, b);
        let hi_t = (bounds.max_t)(a, b);
        (
            lo_t,
            hi_t,
            stats.combine(alpha, max_dist(&a.mbr, &b.mbr), lo_t),
            stats.combine(alpha, min_dist(&a.mbr, &b.mbr), hi_t),
        )
    };

    for (ai, a) in tree.nodes().iter().enumerate() {
        let ga = tree.group(Entry::Node(a.id));
        for (bi, b) in tree.nodes().iter().enumerate() {
            let gb = tree.group(Entry::Node(b.id));
            let (mut lo_t, mut hi_t, mut lo_s, mut hi_s) = (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            );
            for &i in &members[ai] {
                for &j in &members[bi] {
                    lo_t = lo_t.min(ej[i * n + j]);
                    hi_t = hi_t.max(ej[i * n + j]);
                    lo_s = lo_s.min(sim[i * n + j]);
                    hi_s = hi_s.max(sim[i * n + j]);
                }
            }
            let (min_t, max_t, min_st, max_st) = combine_bounds(&ga, &gb);
            check(
                format!(
                    "{} x {}",
                    tree.label(Entry::Node(a.id)),
                    tree.label(Entry::Node(b.id))
                ),
                (min_t, lo_t, hi_t, max_t),
                (min_st, lo_s, hi_s, max_st),
            );
        }
        if let Some(q) = q {
            let gq = Group::point(q.loc, &q.vct);
            let (mut lo_t, mut hi_t, mut lo_s, mut hi_s) = (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            );
            for &i in &members[ai] {
                let o = &objs[i];
                let t = extended_jaccard(&o.vct, &q.vct);
                let s = sim_st((o.loc, &o.vct), (q.loc, &q.vct), alpha, stats);
                lo_t = lo_t.min(t);
                hi_t = hi_t.max(t);
                lo_s = lo_s.min(s);
                hi_s = hi_s.max(s);
            }
            let (min_t, max_t, min_st, max_st) = combine_bounds(&ga, &gq);
            check(
                format!("{} x Q", tree.label(Entry::Node(a.id))),
                (min_t, lo_t, hi_t, max_t),
                (min_st, lo_s, hi_s, max_st),
            );
        }
    }
    report
}

/// True when `fdim` dominance holds coordinatewise from `p` to `p1` over `p2`
/// and yet `EJ(p, p1) < EJ(p, p2)`, i.e. Extended Jaccard fails to preserve
/// the coordinatewise ordering.
pub fn refutes_similarity_preservation(p: &[f64], p1: &[f64], p2: &[f64]) -> bool {
    let dominated = p.iter().zip(p1).zip(p2).all(|((&x, &x1), &x2)| {
        match (fdim_ratio(x, x1), fdim_ratio(x, x2)) {
            (Ok(a), Ok(b)) => a >= b,
            _ => false,
        }
    });
    let vec = |ws: &[f64]| -> TermVector {
        ws.iter()
            .enumerate()
            .map(|(i, &w)| (format!("t{i}"), w))
            .collect()
    };
    dominated && extended_jaccard(&vec(p), &vec(p1)) < extended_jaccard(&vec(p), &vec(p2))
}

/// The standing counter-example: p = <100,30>, p' = <1,40>, p'' = <1,50>.
pub fn lemma1_refutation_check() -> bool {
    refutes_similarity_preservation(&[100.0, 30.0], &[1.0, 40.0], &[1.0, 50.0])
}

/// A fixture on which a mode disagreed with brute force.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub trial: u64,
    pub fixture: Fixture,
    pub engine: Vec<String>,
    pub oracle: Vec<String>,
}

/// Draws random instances from stream `trial` of `seed` and returns the first
/// one, by trial index, on which `mode` disagrees with the oracle.
pub fn counterexample_search(
    mode: Mode,
    seed: u64,
    trials: u64,
    cfg: &InstanceConfig,
) -> Option<Counterexample> {
    (0..trials).find_map(|trial| {
        let fixture = random_fixture(&mut rng_for(seed, trial), cfg);
        let tree = fixture.tree().ok()?;
        let engine = rstknn_query(&tree, &fixture.query, fixture.params, mode).result;
        let oracle = rknn_bruteforce_tree(&tree, &fixture.query, fixture.params);
        (engine != oracle).then_some(Counterexample {
            trial,
            fixture,
            engine,
            oracle,
        })
    })
}
