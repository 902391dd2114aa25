//! The corrected traversal.

use super::{decision_word, evaluate, Evaluation, Phase, State};
use crate::nn_list::{Decision, NnLists};
use crate::tree::Entry;

pub(super) fn run(s: &mut State<'_>, observer: &mut dyn FnMut(&Evaluation<'_>)) {
    let alpha = s.params.alpha;
    let root = Entry::Node(s.tree.root());
    s.lists.insert(root, NnLists::new(root));
    s.u.push_back(root);

    while let Some(e) = s.u.pop_front() {
        s.stats.dequeues += 1;
        let mut lists = s.lists.remove(&e).unwrap_or_else(|| NnLists::new(e));
        lists.strip_self_and_parent(s.tree);
        if e.is_node() {
            lists
                .add_self(s.tree, alpha)
                .expect("owner is an internal node");
        }
        // mutual effect with everything still queued
        for &other in &s.u {
            lists.update(s.tree, other, alpha);
            s.lists
                .get_mut(&other)
                .expect("queued entries own lists")
                .update(s.tree, e, alpha);
        }

        let decision = evaluate(
            s.tree,
            s.q,
            s.params,
            s.mode,
            true,
            &mut s.stats,
            observer,
            &lists,
            Phase::MainLoop,
        );
        let mut action = format!("Dequeue {}", s.label(e));
        match decision {
            Decision::Undecided if e.is_node() => {
                for child in s.children(e) {
                    s.lists.insert(child, lists.inherit(s.tree, child));
                    s.u.push_back(child);
                    action.push_str(&format!(", Enqueue {}", s.label(child)));
                }
            }
            Decision::Undecided => {
                s.col.push(e);
                s.lists.insert(e, lists);
            }
            d => {
                s.settle(e, d);
                action.push_str(&format!(", {}", decision_word(d)));
            }
        }
        s.record(action);
    }

    final_verification(s, observer);
}

/// Settles every remaining candidate against exact point-level bounds.
///
/// Pruned entries are first expanded into their objects. Each candidate then
/// updates its lists with every other object, which leaves only exact point
/// tuples behind, so the Hit/Drop test cannot come back undecided.
pub(super) fn final_verification(s: &mut State<'_>, observer: &mut dyn FnMut(&Evaluation<'_>)) {
    if s.col.is_empty() {
        return;
    }
    let alpha = s.params.alpha;
    let expanded: Vec<Entry> = s
        .pel
        .iter()
        .flat_map(|&e| s.tree.subtree_objects(e))
        .map(Entry::Object)
        .collect();
    s.pel = expanded;

    let candidates = s.col.clone();
    for o in candidates {
        let mut lists = s.lists.remove(&o).unwrap_or_else(|| NnLists::new(o));
        let others = s
            .rol
            .iter()
            .map(|&r| Entry::Object(r))
            .chain(s.pel.iter().copied())
            .chain(s.col.iter().copied().filter(|&c| c != o));
        for p in others {
            lists.update(s.tree, p, alpha);
        }
        let decision = evaluate(
            s.tree,
            s.q,
            s.params,
            s.mode,
            true,
            &mut s.stats,
            observer,
            &lists,
            Phase::FinalVerification,
        );
        s.col.retain(|&c| c != o);
        match decision {
            Decision::Undecided => unreachable!("point-level lists always decide"),
            d => s.settle(o, d),
        }
        s.record(format!(
            "Verify {}, {}",
            s.label(o),
            decision_word(decision)
        ));
    }
}
