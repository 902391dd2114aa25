//! Legacy traversals, faults included.
//!
//! Both use a priority queue on `max_st(·, Q)`, process the children of the
//! dequeued node one by one, update a child against COL, ROL and U with early
//! exits, and let the mutual effect evict queued entries. Neither gates
//! acceptance on list completeness. `Faulty2011` also never adds a node to its
//! own lists; `Faulty2014` does, after the first Hit/Drop test, and visits the
//! other entries by decreasing `max_st`.

use super::correct;
use super::{decision_word, evaluate, Evaluation, Mode, Phase, State};
use crate::nn_list::{Decision, NnLists};
use crate::tree::Entry;

pub(super) fn run(s: &mut State<'_>, observer: &mut dyn FnMut(&Evaluation<'_>)) {
    let alpha = s.params.alpha;
    let root = Entry::Node(s.tree.root());
    s.lists.insert(root, NnLists::new(root));
    s.u.push_back(root);

    while let Some(p) = pop_max(s) {
        s.stats.dequeues += 1;
        let mut action = format!("Dequeue {}", s.label(p));
        let parent_lists = s.lists.remove(&p).unwrap_or_else(|| NnLists::new(p));

        for e in s.children(p) {
            let mut lists = parent_lists.inherit(s.tree, e);
            let mut decision = eval(s, observer, &lists);
            if decision == Decision::Undecided {
                if s.mode == Mode::Faulty2014 && e.is_node() {
                    lists.add_self(s.tree, alpha).expect("internal node");
                }
                let mut others: Vec<Entry> = s
                    .col
                    .iter()
                    .copied()
                    .chain(s.rol.iter().map(|&o| Entry::Object(o)))
                    .chain(s.u.iter().copied())
                    .collect();
                if s.mode == Mode::Faulty2014 {
                    others.sort_by(|&a, &b| {
                        s.tree
                            .max_st(e, b, alpha)
                            .total_cmp(&s.tree.max_st(e, a, alpha))
                            .then(a.cmp(&b))
                    });
                }
                for other in others {
                    let waiting = s.u.contains(&other) || s.col.contains(&other);
                    let accepted = matches!(other, Entry::Object(o) if s.rol.contains(&o));
                    if !waiting && !accepted {
                        // evicted earlier in this loop
                        continue;
                    }
                    lists.update(s.tree, other, alpha);
                    decision = eval(s, observer, &lists);
                    if decision != Decision::Undecided {
                        break;
                    }
                    if waiting {
                        let other_lists =
                            s.lists.get_mut(&other).expect("waiting entries own lists");
                        other_lists.update(s.tree, e, alpha);
                        let snapshot = other_lists.clone();
                        let d = eval(s, observer, &snapshot);
                        if d != Decision::Undecided {
                            s.u.retain(|&x| x != other);
                            s.col.retain(|&x| x != other);
                            s.lists.remove(&other);
                            s.settle(other, d);
                            action.push_str(&format!(", {} {}", decision_word(d), s.label(other)));
                        }
                    }
                }
            }
            match decision {
                Decision::Undecided => {
                    if e.is_node() {
                        s.u.push_back(e);
                        action.push_str(&format!(", Enqueue {}", s.label(e)));
                    } else {
                        s.col.push(e);
                    }
                    s.lists.insert(e, lists);
                }
                d => {
                    s.settle(e, d);
                    action.push_str(&format!(", {} {}", decision_word(d), s.label(e)));
                }
            }
        }
        s.record(action);
    }

    final_verification(s, observer);
}

/// Refines the pruned entries top-down against the candidates: take the
/// shallowest entry in PEL, update every candidate with it, settle whatever
/// becomes decidable, then put the entry's children back into PEL.
///
/// When PEL runs dry with candidates left, those candidates are settled
/// against exact point-level lists so the procedure terminates.
fn final_verification(s: &mut State<'_>, observer: &mut dyn FnMut(&Evaluation<'_>)) {
    let alpha = s.params.alpha;
    let mut pending: Vec<Entry> = s.pel.clone();
    while !s.col.is_empty() {
        let Some(pos) = (0..pending.len()).min_by_key(|&i| (s.tree.depth(pending[i]), i)) else {
            break;
        };
        let e = pending.remove(pos);
        let mut action = format!("Expand {}", s.label(e));
        for o in s.col.clone() {
            let lists = s.lists.get_mut(&o).expect("candidates own lists");
            lists.update(s.tree, e, alpha);
            let snapshot = lists.clone();
            let d = decision_after(s, observer, &snapshot);
            if d != Decision::Undecided {
                s.col.retain(|&c| c != o);
                s.settle(o, d);
                if d == Decision::Drop {
                    pending.push(o);
                }
                action.push_str(&format!(", {} {}", decision_word(d), s.label(o)));
            }
        }
        pending.extend(s.tree.children(e));
        s.record(action);
    }
    if !s.col.is_empty() {
        correct::final_verification(s, observer);
    }
}

fn decision_after(
    s: &mut State<'_>,
    observer: &mut dyn FnMut(&Evaluation<'_>),
    lists: &NnLists,
) -> Decision {
    evaluate(
        s.tree,
        s.q,
        s.params,
        s.mode,
        false,
        &mut s.stats,
        observer,
        lists,
        Phase::FinalVerification,
    )
}

fn eval(s: &mut State<'_>, observer: &mut dyn FnMut(&Evaluation<'_>), lists: &NnLists) -> Decision {
    evaluate(
        s.tree,
        s.q,
        s.params,
        s.mode,
        false,
        &mut s.stats,
        observer,
        lists,
        Phase::MainLoop,
    )
}

/// Removes the queued entry with the largest `max_st` to the query; ties go to
/// the smaller entry.
fn pop_max(s: &mut State<'_>) -> Option<Entry> {
    let alpha = s.params.alpha;
    let best = (0..s.u.len()).max_by(|&i, &j| {
        let (a, b) = (s.u[i], s.u[j]);
        s.tree
            .max_st_query(a, s.q, alpha)
            .total_cmp(&s.tree.max_st_query(b, s.q, alpha))
            .then(b.cmp(&a))
    })?;
    s.u.remove(best)
}
