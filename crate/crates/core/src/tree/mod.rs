//! IUR-tree: an R-tree whose nodes also carry intersection and union term
//! vectors and subtree object counts.

mod bounds;
mod build;
mod mbr;

use std::collections::HashMap;
use std::fmt;

pub use bounds::{max_st, max_t, min_st, min_t, Group};
pub use build::{build_tree, Layout};
pub use mbr::{max_dist, min_dist, Mbr};

use crate::object::{QueryObject, StObject, TermVector};
use crate::similarity::NormStats;

pub const DEFAULT_FANOUT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectId(pub usize);

/// Unit of traversal: an index node or a single object.
///
/// Ordered nodes-first, then by index; list views use this order to break
/// ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    Node(NodeId),
    Object(ObjectId),
}

impl Entry {
    pub fn is_node(self) -> bool {
        matches!(self, Entry::Node(_))
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Node(n) => write!(f, "node#{}", n.0),
            Entry::Object(o) => write!(f, "object#{}", o.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeChildren {
    Internal(Vec<NodeId>),
    Leaf(Vec<ObjectId>),
}

#[derive(Debug, Clone)]
pub struct IurNode {
    pub id: NodeId,
    pub mbr: Mbr,
    /// Per-term minimum over the subtree; only terms present in every object.
    pub int_vct: TermVector,
    /// Per-term maximum over the subtree.
    pub union_vct: TermVector,
    pub count: usize,
    pub parent: Option<NodeId>,
    pub depth: usize,
    pub children: NodeChildren,
}

/// Immutable index over a dataset, together with the dataset's
/// normalization statistics.
#[derive(Debug, Clone)]
pub struct IurTree {
    objects: Vec<StObject>,
    object_parent: Vec<NodeId>,
    nodes: Vec<IurNode>,
    labels: Vec<String>,
    stats: NormStats,
}

impl IurTree {
    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    /// Number of database objects.
    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn stats(&self) -> &NormStats {
        &self.stats
    }

    pub fn objects(&self) -> &[StObject] {
        &self.objects
    }

    pub fn object(&self, id: ObjectId) -> &StObject {
        &self.objects[id.0]
    }

    pub fn nodes(&self) -> &[IurNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &IurNode {
        &self.nodes[id.0]
    }

    pub fn object_ids(&self) -> impl Iterator<Item = ObjectId> {
        (0..self.objects.len()).map(ObjectId)
    }

    pub fn object_by_id(&self, id: &str) -> Option<ObjectId> {
        self.objects.iter().position(|o| o.id == id).map(ObjectId)
    }

    /// Display name: `Root`, `N1`, `N2`, … in breadth-first order for nodes,
    /// the object id for objects.
    pub fn label(&self, e: Entry) -> &str {
        match e {
            Entry::Node(n) => &self.labels[n.0],
            Entry::Object(o) => &self.objects[o.0].id,
        }
    }

    pub fn entry_by_label(&self, label: &str) -> Option<Entry> {
        if let Some(i) = self.labels.iter().position(|l| l == label) {
            return Some(Entry::Node(NodeId(i)));
        }
        self.object_by_id(label).map(Entry::Object)
    }

    /// Number of objects under the entry.
    pub fn count(&self, e: Entry) -> usize {
        match e {
            Entry::Node(n) => self.nodes[n.0].count,
            Entry::Object(_) => 1,
        }
    }

    pub fn parent(&self, e: Entry) -> Option<NodeId> {
        match e {
            Entry::Node(n) => self.nodes[n.0].parent,
            Entry::Object(o) => Some(self.object_parent[o.0]),
        }
    }

    pub fn depth(&self, e: Entry) -> usize {
        match e {
            Entry::Node(n) => self.nodes[n.0].depth,
            Entry::Object(o) => self.nodes[self.object_parent[o.0].0].depth + 1,
        }
    }

    /// Proper ancestors, nearest first.
    pub fn ancestors(&self, e: Entry) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(self.parent(e), move |n| self.nodes[n.0].parent)
    }

    pub fn is_proper_ancestor(&self, ancestor: Entry, e: Entry) -> bool {
        match ancestor {
            Entry::Object(_) => false,
            Entry::Node(a) => {
                self.depth(ancestor) < self.depth(e) && self.ancestors(e).any(|n| n == a)
            }
        }
    }

    /// True when one entry is an ancestor of, or equal to, the other.
    pub fn overlaps(&self, a: Entry, b: Entry) -> bool {
        a == b || self.is_proper_ancestor(a, b) || self.is_proper_ancestor(b, a)
    }

    pub fn children(&self, e: Entry) -> Vec<Entry> {
        match e {
            Entry::Object(_) => Vec::new(),
            Entry::Node(n) => match &self.nodes[n.0].children {
                NodeChildren::Internal(c) => c.iter().map(|&id| Entry::Node(id)).collect(),
                NodeChildren::Leaf(c) => c.iter().map(|&id| Entry::Object(id)).collect(),
            },
        }
    }

    /// All objects under the entry, ordered by object id.
    pub fn subtree_objects(&self, e: Entry) -> Vec<ObjectId> {
        let mut out = Vec::with_capacity(self.count(e));
        let mut stack = vec![e];
        while let Some(cur) = stack.pop() {
            match cur {
                Entry::Object(o) => out.push(o),
                Entry::Node(_) => stack.extend(self.children(cur)),
            }
        }
        out.sort_by(|a, b| self.objects[a.0].id.cmp(&self.objects[b.0].id));
        out
    }

    pub fn group(&self, e: Entry) -> Group<'_> {
        match e {
            Entry::Node(n) => {
                let node = &self.nodes[n.0];
                Group {
                    mbr: node.mbr,
                    int_vct: &node.int_vct,
                    union_vct: &node.union_vct,
                }
            }
            Entry::Object(o) => {
                let obj = &self.objects[o.0];
                Group::point(obj.loc, &obj.vct)
            }
        }
    }

    pub fn min_st(&self, a: Entry, b: Entry, alpha: f64) -> f64 {
        min_st(&self.group(a), &self.group(b), alpha, &self.stats)
    }

    pub fn max_st(&self, a: Entry, b: Entry, alpha: f64) -> f64 {
        max_st(&self.group(a), &self.group(b), alpha, &self.stats)
    }

    pub fn min_st_query(&self, e: Entry, q: &QueryObject, alpha: f64) -> f64 {
        min_st(
            &self.group(e),
            &Group::point(q.loc, &q.vct),
            alpha,
            &self.stats,
        )
    }

    pub fn max_st_query(&self, e: Entry, q: &QueryObject, alpha: f64) -> f64 {
        max_st(
            &self.group(e),
            &Group::point(q.loc, &q.vct),
            alpha,
            &self.stats,
        )
    }

    /// Exhaustively checks MBR tightness, vector min/max, counts and parent
    /// links at every node. Returns a description of the first violation.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = HashMap::new();
        for node in &self.nodes {
            let e = Entry::Node(node.id);
            let objs = self.subtree_objects(e);
            if objs.len() != node.count {
                return Err(format!(
                    "{}: count {} != {}",
                    self.label(e),
                    node.count,
                    objs.len()
                ));
            }
            let mut mbr = Mbr::point(self.objects[objs[0].0].loc);
            let mut int = self.objects[objs[0].0].vct.clone();
            let mut uni = int.clone();
            for o in &objs[1..] {
                let obj = &self.objects[o.0];
                mbr = mbr.union(&Mbr::point(obj.loc));
                int = int.intersect(&obj.vct);
                uni = uni.union(&obj.vct);
            }
            if mbr != node.mbr {
                return Err(format!("{}: mbr not tight", self.label(e)));
            }
            if int != node.int_vct || uni != node.union_vct {
                return Err(format!("{}: term vectors mismatch", self.label(e)));
            }
            for c in self.children(e) {
                if self.parent(c) != Some(node.id) {
                    return Err(format!("{}: broken parent link", self.label(c)));
                }
            }
            if let NodeChildren::Leaf(os) = &node.children {
                for o in os {
                    *seen.entry(*o).or_insert(0usize) += 1;
                }
            }
        }
        if seen.len() != self.objects.len() || seen.values().any(|&c| c != 1) {
            return Err("objects are not stored exactly once".into());
        }
        Ok(())
    }
}
