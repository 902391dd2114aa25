//! Branch-and-bound RSTkNN traversal.
//!
//! [`Mode::Correct`] walks the tree with a FIFO queue, keeps every dequeued
//! entry's NN-lists local (self tuple) and complete (mutual updates with the
//! whole queue), and settles leftover candidates against exact point-level
//! lists. The two legacy modes reproduce earlier published procedures,
//! including their faults, and exist for comparison against the oracle.

mod correct;
mod legacy;
mod trace;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

pub use trace::{format_table, to_json_lines, TraceEvent};

use crate::nn_list::{is_hit_or_drop, is_hit_or_drop_ungated, Decision, NnLists};
use crate::object::QueryObject;
use crate::similarity::SimParams;
use crate::tree::{Entry, IurTree, ObjectId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Correct,
    /// Priority-queue traversal without self tuples: violates locality.
    Faulty2011,
    /// Adds self tuples but accepts on incomplete upper lists.
    Faulty2014,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Correct, Mode::Faulty2011, Mode::Faulty2014];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Correct => "correct",
            Mode::Faulty2011 => "faulty2011",
            Mode::Faulty2014 => "faulty2014",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

/// Order in which an expanded node's children are enqueued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChildOrder {
    #[default]
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    MainLoop,
    FinalVerification,
}

/// Snapshot handed to an observer at every Hit/Drop test.
#[derive(Debug)]
pub struct Evaluation<'a> {
    pub phase: Phase,
    pub owner: Entry,
    pub lists: &'a NnLists,
    pub complete: bool,
    pub decision: Decision,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub dequeues: usize,
    pub evaluations: usize,
    /// Completeness checks made in correct mode, one per Hit/Drop test.
    pub completeness_checks: usize,
    /// Checks that found an incomplete list. Zero on every correct-mode run.
    pub completeness_failures: usize,
}

#[derive(Debug, Clone)]
pub struct QueryOutcome {
    /// Result object ids in lexicographic order.
    pub result: Vec<String>,
    pub trace: Vec<TraceEvent>,
    pub stats: RunStats,
}

/// Runs a reverse spatio-textual kNN query in the given mode.
pub fn rstknn_query(
    tree: &IurTree,
    q: &QueryObject,
    params: SimParams,
    mode: Mode,
) -> QueryOutcome {
    rstknn_query_with(tree, q, params, mode, ChildOrder::Forward, &mut |_| {})
}

/// The 2011 traversal, kept for comparison. Unsound.
pub fn faulty2011_query(tree: &IurTree, q: &QueryObject, params: SimParams) -> QueryOutcome {
    rstknn_query(tree, q, params, Mode::Faulty2011)
}

/// The 2014 traversal, kept for comparison. Unsound.
pub fn faulty2014_query(tree: &IurTree, q: &QueryObject, params: SimParams) -> QueryOutcome {
    rstknn_query(tree, q, params, Mode::Faulty2014)
}

/// Like [`rstknn_query`], with control over child order and a callback on
/// every Hit/Drop evaluation.
pub fn rstknn_query_with(
    tree: &IurTree,
    q: &QueryObject,
    params: SimParams,
    mode: Mode,
    order: ChildOrder,
    observer: &mut dyn FnMut(&Evaluation<'_>),
) -> QueryOutcome {
    let mut state = State::new(tree, q, params, mode, order);
    match mode {
        Mode::Correct => correct::run(&mut state, observer),
        Mode::Faulty2011 | Mode::Faulty2014 => legacy::run(&mut state, observer),
    }
    state.finish()
}

/// Every object under `entry`, in id order.
pub fn subtree_objects(entry: Entry, tree: &IurTree) -> Vec<ObjectId> {
    tree.subtree_objects(entry)
}

pub(crate) struct State<'a> {
    tree: &'a IurTree,
    q: &'a QueryObject,
    params: SimParams,
    mode: Mode,
    order: ChildOrder,
    u: VecDeque<Entry>,
    col: Vec<Entry>,
    rol: Vec<ObjectId>,
    pel: Vec<Entry>,
    lists: HashMap<Entry, NnLists>,
    trace: Vec<TraceEvent>,
    stats: RunStats,
}

impl<'a> State<'a> {
    fn new(
        tree: &'a IurTree,
        q: &'a QueryObject,
        params: SimParams,
        mode: Mode,
        order: ChildOrder,
    ) -> Self {
        State {
            tree,
            q,
            params,
            mode,
            order,
            u: VecDeque::new(),
            col: Vec::new(),
            rol: Vec::new(),
            pel: Vec::new(),
            lists: HashMap::new(),
            trace: Vec::new(),
            stats: RunStats::default(),
        }
    }

    fn children(&self, e: Entry) -> Vec<Entry> {
        let mut c = self.tree.children(e);
        if self.order == ChildOrder::Reverse {
            c.reverse();
        }
        c
    }

    fn label(&self, e: Entry) -> &str {
        self.tree.label(e)
    }

    fn record(&mut self, action: String) {
        let labels = |v: &mut dyn Iterator<Item = Entry>| -> Vec<String> {
            v.map(|e| self.tree.label(e).to_string()).collect()
        };
        let event = TraceEvent {
            step: self.trace.len() + 1,
            action,
            u: labels(&mut self.u.iter().copied()),
            col: labels(&mut self.col.iter().copied()),
            rol: labels(&mut self.rol.iter().map(|&o| Entry::Object(o))),
            pel: labels(&mut self.pel.iter().copied()),
        };
        self.trace.push(event);
    }

    /// Moves a decided entry to ROL (all of its objects) or PEL.
    fn settle(&mut self, e: Entry, decision: Decision) {
        match decision {
            Decision::Hit => {
                let objs = self.tree.subtree_objects(e);
                self.rol.extend(objs);
            }
            Decision::Drop => self.pel.push(e),
            Decision::Undecided => {}
        }
    }

    fn finish(self) -> QueryOutcome {
        let mut result: Vec<String> = self
            .rol
            .iter()
            .map(|&o| self.tree.object(o).id.clone())
            .collect();
        result.sort();
        QueryOutcome {
            result,
            trace: self.trace,
            stats: self.stats,
        }
    }
}

/// Runs the Hit/Drop test on `lists`, updating run statistics and notifying
/// the observer. `gated` selects whether acceptance requires a complete list.
#[allow(clippy::too_many_arguments)]
fn evaluate(
    tree: &IurTree,
    q: &QueryObject,
    params: SimParams,
    mode: Mode,
    gated: bool,
    stats: &mut RunStats,
    observer: &mut dyn FnMut(&Evaluation<'_>),
    lists: &NnLists,
    phase: Phase,
) -> Decision {
    let complete = lists.is_complete(tree.len());
    stats.evaluations += 1;
    if mode == Mode::Correct {
        stats.completeness_checks += 1;
        if !complete {
            stats.completeness_failures += 1;
        }
    }
    let decision = if gated {
        is_hit_or_drop(tree, q, lists, params.k, params.alpha)
    } else {
        is_hit_or_drop_ungated(tree, q, lists, params.k, params.alpha)
    };
    observer(&Evaluation {
        phase,
        owner: lists.owner(),
        lists,
        complete,
        decision,
    });
    decision
}

fn decision_word(d: Decision) -> &'static str {
    match d {
        Decision::Hit => "Accept",
        Decision::Drop => "Prune",
        Decision::Undecided => "Undecided",
    }
}
