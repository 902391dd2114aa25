//! Tree construction: Sort-Tile-Recursive bulk loading, or an explicit
//! nesting for hand-laid fixtures.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{IurNode, IurTree, Mbr, NodeChildren, NodeId, ObjectId};
use crate::error::{Error, Result};
use crate::object::{Point, StObject, TermVector};
use crate::similarity::{compute_norm_stats, NormStats};

/// Explicit tree shape. `Leaf` lists indices into the object vector.
///
/// Serializes as nested arrays, so `[[0, 1], [[2, 3], [4, 5]]]` is a root
/// with a leaf and an internal node below it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Layout {
    Leaf(Vec<usize>),
    Node(Vec<Layout>),
}

enum Proto {
    Leaf(Vec<ObjectId>),
    Internal(Vec<Proto>),
}

/// Bulk loads `objects` with Sort-Tile-Recursive packing. Leaves hold at most
/// `fanout` objects and internal nodes at most `fanout` children.
pub fn build_tree(objects: Vec<StObject>, fanout: usize) -> Result<IurTree> {
    if fanout < 2 {
        return Err(Error::InvalidParams(format!(
            "fanout must be at least 2, got {fanout}"
        )));
    }
    check_objects(&objects)?;

    let items: Vec<(Point, Proto)> = objects
        .iter()
        .enumerate()
        .map(|(i, o)| (o.loc, Proto::Leaf(vec![ObjectId(i)])))
        .collect();
    let mut level: Vec<(Point, Proto)> = str_pack(items, fanout)
        .into_iter()
        .map(|group| {
            let ids: Vec<ObjectId> = group
                .into_iter()
                .map(|(_, p)| match p {
                    Proto::Leaf(mut v) => v.pop().expect("singleton"),
                    Proto::Internal(_) => unreachable!(),
                })
                .collect();
            let mbr = mbr_of(ids.iter().map(|o| objects[o.0].loc));
            (mbr.center(), Proto::Leaf(ids))
        })
        .collect();

    while level.len() > 1 {
        level = str_pack(level, fanout)
            .into_iter()
            .map(|group| {
                let children: Vec<Proto> = group.into_iter().map(|(_, p)| p).collect();
                let mbr = mbr_of(children.iter().flat_map(|c| proto_points(c, &objects)));
                (mbr.center(), Proto::Internal(children))
            })
            .collect();
    }
    let (_, root) = level.pop().expect("at least one object");
    Ok(assemble(objects, root))
}

impl IurTree {
    pub fn build(objects: Vec<StObject>, fanout: usize) -> Result<IurTree> {
        build_tree(objects, fanout)
    }

    /// Builds a tree with exactly the given nesting. Every object index must
    /// appear once, and every node must have at least one child.
    pub fn from_layout(objects: Vec<StObject>, layout: &Layout) -> Result<IurTree> {
        check_objects(&objects)?;
        let mut used = vec![false; objects.len()];
        let root = layout_proto(layout, &mut used)?;
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidLayout(format!(
                "object index {i} is not placed"
            )));
        }
        Ok(assemble(objects, root))
    }
}

fn layout_proto(layout: &Layout, used: &mut [bool]) -> Result<Proto> {
    match layout {
        Layout::Leaf(ids) if ids.is_empty() => Err(Error::InvalidLayout("empty leaf".into())),
        Layout::Node(children) if children.is_empty() => {
            Err(Error::InvalidLayout("empty node".into()))
        }
        Layout::Leaf(ids) => {
            let mut out = Vec::with_capacity(ids.len());
            for &i in ids {
                match used.get_mut(i) {
                    None => {
                        return Err(Error::InvalidLayout(format!(
                            "object index {i} out of range"
                        )))
                    }
                    Some(true) => {
                        return Err(Error::InvalidLayout(format!(
                            "object index {i} placed twice"
                        )))
                    }
                    Some(slot) => *slot = true,
                }
                out.push(ObjectId(i));
            }
            Ok(Proto::Leaf(out))
        }
        Layout::Node(children) => Ok(Proto::Internal(
            children
                .iter()
                .map(|c| layout_proto(c, used))
                .collect::<Result<_>>()?,
        )),
    }
}

fn check_objects(objects: &[StObject]) -> Result<()> {
    if objects.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut ids = HashSet::with_capacity(objects.len());
    for o in objects {
        if !ids.insert(o.id.as_str()) {
            return Err(Error::DuplicateId(o.id.clone()));
        }
    }
    Ok(())
}

/// One STR pass: sort by x, cut into vertical slices, sort each slice by y
/// and chunk it into groups of `fanout`.
fn str_pack<T>(mut items: Vec<(Point, T)>, fanout: usize) -> Vec<Vec<(Point, T)>> {
    let n = items.len();
    let pages = n.div_ceil(fanout);
    let slices = (pages as f64).sqrt().ceil() as usize;
    let slice_len = slices * fanout;

    items.sort_by(|a, b| a.0.x.total_cmp(&b.0.x).then(a.0.y.total_cmp(&b.0.y)));
    let mut groups = Vec::with_capacity(pages);
    let mut rest = items.into_iter();
    loop {
        let mut slice: Vec<(Point, T)> = rest.by_ref().take(slice_len).collect();
        if slice.is_empty() {
            break;
        }
        slice.sort_by(|a, b| a.0.y.total_cmp(&b.0.y).then(a.0.x.total_cmp(&b.0.x)));
        let mut it = slice.into_iter();
        loop {
            let group: Vec<(Point, T)> = it.by_ref().take(fanout).collect();
            if group.is_empty() {
                break;
            }
            groups.push(group);
        }
    }
    groups
}

fn proto_points<'a>(p: &'a Proto, objects: &'a [StObject]) -> Box<dyn Iterator<Item = Point> + 'a> {
    match p {
        Proto::Leaf(ids) => Box::new(ids.iter().map(move |o| objects[o.0].loc)),
        Proto::Internal(children) => {
            Box::new(children.iter().flat_map(move |c| proto_points(c, objects)))
        }
    }
}

fn mbr_of(mut points: impl Iterator<Item = Point>) -> Mbr {
    let first = points.next().expect("non-empty group");
    points.fold(Mbr::point(first), |m, p| m.union(&Mbr::point(p)))
}

/// Numbers nodes breadth-first (root = 0) and fills in MBRs, term vectors and
/// counts bottom-up.
fn assemble(objects: Vec<StObject>, root: Proto) -> IurTree {
    let mut nodes: Vec<IurNode> = Vec::new();
    let mut object_parent = vec![NodeId(0); objects.len()];
    let mut queue = VecDeque::from([(root, None::<NodeId>, 0usize)]);
    let mut next = 1usize;

    while let Some((proto, parent, depth)) = queue.pop_front() {
        let id = NodeId(nodes.len());
        let children = match proto {
            Proto::Leaf(ids) => {
                for o in &ids {
                    object_parent[o.0] = id;
                }
                NodeChildren::Leaf(ids)
            }
            Proto::Internal(cs) => {
                let ids: Vec<NodeId> = (next..next + cs.len()).map(NodeId).collect();
                next += cs.len();
                for c in cs {
                    queue.push_back((c, Some(id), depth + 1));
                }
                NodeChildren::Internal(ids)
            }
        };
        nodes.push(IurNode {
            id,
            mbr: Mbr::point(Point::new(0.0, 0.0)),
            int_vct: TermVector::new(),
            union_vct: TermVector::new(),
            count: 0,
            parent,
            depth,
            children,
        });
    }

    // Children always carry larger ids than their parent.
    for i in (0..nodes.len()).rev() {
        let (mbr, int_vct, union_vct, count) = match &nodes[i].children {
            NodeChildren::Leaf(ids) => {
                let first = &objects[ids[0].0];
                ids[1..].iter().fold(
                    (
                        Mbr::point(first.loc),
                        first.vct.clone(),
                        first.vct.clone(),
                        1,
                    ),
                    |(m, int, uni, c), o| {
                        let obj = &objects[o.0];
                        (
                            m.union(&Mbr::point(obj.loc)),
                            int.intersect(&obj.vct),
                            uni.union(&obj.vct),
                            c + 1,
                        )
                    },
                )
            }
            NodeChildren::Internal(ids) => {
                let first = &nodes[ids[0].0];
                ids[1..].iter().fold(
                    (
                        first.mbr,
                        first.int_vct.clone(),
                        first.union_vct.clone(),
                        first.count,
                    ),
                    |(m, int, uni, c), n| {
                        let child = &nodes[n.0];
                        (
                            m.union(&child.mbr),
                            int.intersect(&child.int_vct),
                            uni.union(&child.union_vct),
                            c + child.count,
                        )
                    },
                )
            }
        };
        let node = &mut nodes[i];
        node.mbr = mbr;
        node.int_vct = int_vct;
        node.union_vct = union_vct;
        node.count = count;
    }

    let labels = (0..nodes.len())
        .map(|i| {
            if i == 0 {
                "Root".to_string()
            } else {
                format!("N{i}")
            }
        })
        .collect();
    let stats = if objects.len() < 2 {
        NormStats::degenerate()
    } else {
        compute_norm_stats(&objects).expect("two or more objects")
    };
    IurTree {
        objects,
        object_parent,
        nodes,
        labels,
        stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Entry;

    fn obj(id: &str, x: f64, y: f64, terms: &[(&str, f64)]) -> StObject {
        StObject::new(
            id,
            Point::new(x, y),
            terms.iter().map(|&(t, w)| (t, w)).collect(),
        )
    }

    fn grid(n: usize) -> Vec<StObject> {
        (0..n)
            .map(|i| {
                obj(
                    &format!("o{i:02}"),
                    ((i * 37) % 128) as f64,
                    ((i * 91) % 128) as f64,
                    &[("a", (i % 5 + 1) as f64), (["b", "c", "d"][i % 3], 2.0)],
                )
            })
            .collect()
    }

    #[test]
    fn singleton_is_a_leaf_root() {
        let o = obj("x", 3.0, 4.0, &[("a", 2.0)]);
        let t = build_tree(vec![o.clone()], 4).unwrap();
        assert_eq!(t.nodes().len(), 1);
        let root = t.node(t.root());
        assert_eq!(root.children, NodeChildren::Leaf(vec![ObjectId(0)]));
        assert_eq!(root.mbr, Mbr::point(o.loc));
        assert_eq!(root.int_vct, o.vct);
        assert_eq!(root.union_vct, o.vct);
        assert_eq!(*t.stats(), NormStats::degenerate());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build_tree(vec![], 4), Err(Error::EmptyDataset)));
        let dup = vec![obj("a", 0.0, 0.0, &[]), obj("a", 1.0, 0.0, &[])];
        assert!(matches!(build_tree(dup, 4), Err(Error::DuplicateId(_))));
        assert!(build_tree(grid(3), 1).is_err());
    }

    #[test]
    fn str_respects_fanout_and_invariants() {
        for &(n, fanout) in &[(64usize, 4usize), (6, 2), (17, 3), (100, 2), (4, 4), (5, 4)] {
            let t = build_tree(grid(n), fanout).unwrap();
            t.validate().unwrap();
            for node in t.nodes() {
                let width = match &node.children {
                    NodeChildren::Leaf(c) => c.len(),
                    NodeChildren::Internal(c) => c.len(),
                };
                assert!(width >= 1 && width <= fanout, "n={n} fanout={fanout}");
            }
            assert_eq!(t.node(t.root()).count, n);
            assert_eq!(t.subtree_objects(Entry::Node(t.root())).len(), n);
        }
    }

    #[test]
    fn str_is_deterministic() {
        let a = build_tree(grid(40), 3).unwrap();
        let b = build_tree(grid(40), 3).unwrap();
        let shape = |t: &IurTree| -> Vec<NodeChildren> {
            t.nodes().iter().map(|n| n.children.clone()).collect()
        };
        assert_eq!(shape(&a), shape(&b));
    }

    #[test]
    fn explicit_layout_reproduces_nested_topology() {
        let objs: Vec<StObject> = (0..6)
            .map(|i| obj(&format!("P{i}"), i as f64, 0.0, &[]))
            .collect();
        let layout = Layout::Node(vec![
            Layout::Leaf(vec![0, 1]),
            Layout::Node(vec![Layout::Leaf(vec![2, 3]), Layout::Leaf(vec![4, 5])]),
        ]);
        let t = IurTree::from_layout(objs, &layout).unwrap();
        t.validate().unwrap();
        let labels: Vec<&str> = (0..t.nodes().len())
            .map(|i| t.label(Entry::Node(NodeId(i))))
            .collect();
        assert_eq!(labels, ["Root", "N1", "N2", "N3", "N4"]);
        let n2 = t.entry_by_label("N2").unwrap();
        let ids: Vec<&str> = t
            .subtree_objects(n2)
            .iter()
            .map(|&o| t.object(o).id.as_str())
            .collect();
        assert_eq!(ids, ["P2", "P3", "P4", "P5"]);
        let n1 = t.entry_by_label("N1").unwrap();
        assert_eq!(
            t.children(n1),
            vec![Entry::Object(ObjectId(0)), Entry::Object(ObjectId(1))]
        );
        let p4 = Entry::Object(ObjectId(4));
        assert!(t.is_proper_ancestor(n2, p4));
        assert!(!t.is_proper_ancestor(n1, p4));
        assert!(t.overlaps(p4, n2));
        assert!(!t.overlaps(n1, n2));
        assert_eq!(t.subtree_objects(p4), vec![ObjectId(4)]);
    }

    #[test]
    fn explicit_layout_validation() {
        let objs: Vec<StObject> = (0..3)
            .map(|i| obj(&format!("P{i}"), i as f64, 0.0, &[]))
            .collect();
        let missing = Layout::Leaf(vec![0, 1]);
        assert!(IurTree::from_layout(objs.clone(), &missing).is_err());
        let twice = Layout::Node(vec![Layout::Leaf(vec![0, 1]), Layout::Leaf(vec![1, 2])]);
        assert!(IurTree::from_layout(objs.clone(), &twice).is_err());
        let empty = Layout::Node(vec![Layout::Leaf(vec![0, 1, 2]), Layout::Node(vec![])]);
        assert!(IurTree::from_layout(objs, &empty).is_err());
    }
}
