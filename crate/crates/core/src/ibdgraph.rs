//! Node-unlabeled graphs whose edges move between nodes along the marker
//! axis.
//!
//! Edges are identified by label; nodes are not. Each node becomes an M-Set
//! keyed by the hashes of its edge labels, valid where the edge is attached,
//! and the graph is the [`summarize`](crate::mset::summarize) of its node
//! M-Sets. At every marker the summary hash depends only on the multiset of
//! per-node edge sets, so relabeling or reordering nodes leaves it unchanged.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::hashspace::{encode_parts, hash_object, HashValue};
use crate::intervals::{IntervalError, Marker, ValiditySet};
use crate::mset::{self, MSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphNode {
    pub label: String,
    /// Edge label to the markers at which that edge is attached here.
    pub edges: BTreeMap<String, ValiditySet>,
}

impl GraphNode {
    pub fn new(label: impl Into<String>) -> Self {
        GraphNode {
            label: label.into(),
            edges: BTreeMap::new(),
        }
    }

    /// Edge labels attached at `m`, sorted.
    pub fn edges_at(&self, m: Marker) -> Vec<&str> {
        self.edges
            .iter()
            .filter(|(_, v)| v.is_valid(m))
            .map(|(e, _)| e.as_str())
            .collect()
    }

    /// One M-Set keyed by edge-label hashes.
    pub fn to_mset(&self) -> MSet {
        let mut t = MSet::new();
        for (edge, vset) in &self.edges {
            t.insert(crate::intervals::MarkedKey::new(
                edge_hash(edge),
                vset.clone(),
            ));
        }
        t
    }
}

pub fn edge_hash(label: &str) -> HashValue {
    hash_object(label.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IbdGraph {
    pub id: String,
    pub nodes: Vec<GraphNode>,
}

impl IbdGraph {
    pub fn new(id: impl Into<String>) -> Self {
        IbdGraph {
            id: id.into(),
            nodes: Vec::new(),
        }
    }

    /// Appends a node and returns its index.
    pub fn add_node(&mut self, label: impl Into<String>) -> usize {
        self.nodes.push(GraphNode::new(label));
        self.nodes.len() - 1
    }

    /// Attaches `edge` to node `node` on `[lo, hi)`, unioning with any
    /// earlier attachment of the same edge to that node. Returns `true` when
    /// the new interval overlapped an existing attachment.
    pub fn attach(
        &mut self,
        node: usize,
        edge: &str,
        lo: impl Into<Marker>,
        hi: impl Into<Marker>,
    ) -> Result<bool, IntervalError> {
        let region = ValiditySet::interval(lo, hi)?;
        let slot = self.nodes[node].edges.entry(edge.to_string()).or_default();
        let overlapped = !slot.intersection(&region).is_empty();
        *slot = slot.union(&region);
        Ok(overlapped)
    }

    /// Every marker at which some attachment starts or stops.
    pub fn breakpoints(&self) -> Vec<Marker> {
        let mut out: Vec<Marker> = self
            .nodes
            .iter()
            .flat_map(|n| n.edges.values())
            .flat_map(|v| v.breakpoints())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The summary M-Set: the summarize of the per-node edge M-Sets.
    pub fn summarize(&self) -> GraphSummary {
        let nodes: Vec<MSet> = self.nodes.iter().map(GraphNode::to_mset).collect();
        GraphSummary {
            graph_id: self.id.clone(),
            summary: mset::summarize(&nodes),
        }
    }

    /// Byte encoding of the graph at `m` that ignores node labels and node
    /// order: each node's attached edge labels sorted, nodes with no edges
    /// dropped, and the resulting lists sorted. Two graphs are equal at `m`
    /// exactly when their encodings are byte-equal.
    ///
    /// The encoding does not go through any hashing, so it serves as an
    /// independent reference for summary equality.
    pub fn canonical_form(&self, m: impl Into<Marker>) -> Vec<u8> {
        let m = m.into();
        let mut nodes: Vec<Vec<u8>> = self
            .nodes
            .iter()
            .map(|n| {
                n.edges
                    .iter()
                    .filter(|(_, v)| v.intervals().iter().any(|&(lo, hi)| lo <= m && m < hi))
                    .map(|(e, _)| e.as_bytes())
                    .collect::<Vec<_>>()
            })
            .filter(|edges| !edges.is_empty())
            .map(|mut edges| {
                edges.sort_unstable();
                encode_parts(edges)
            })
            .collect();
        nodes.sort_unstable();
        encode_parts(nodes)
    }
}

/// A graph's summary M-Set: one hash valid per marker wherever the graph has
/// any edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSummary {
    pub graph_id: String,
    pub summary: MSet,
}

impl GraphSummary {
    pub fn hash_at(&self, m: impl Into<Marker>) -> HashValue {
        self.summary.hash_at_marker(m)
    }

    /// Number of maximal marker intervals of constant, non-null summary.
    pub fn configurations(&self) -> usize {
        self.summary.keys().map(|(_, v)| v.len()).sum()
    }
}

/// One representative of a distinct graph configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UniqueGraphRecord {
    pub hash: HashValue,
    /// Index of the first summary containing this configuration.
    pub graph_index: usize,
    /// Lowest marker at which that summary takes this hash.
    pub marker: Marker,
}

/// One record per distinct summary hash across the collection, each pointing
/// at its first occurrence. Summaries are scanned in order and, within one
/// summary, keys in order of `(lowest valid marker, hash)`.
pub fn unique_elements(summaries: &[GraphSummary]) -> Vec<UniqueGraphRecord> {
    let key_sets: Vec<MSet> = summaries.iter().map(|s| s.summary.key_set()).collect();
    let mut remaining = mset::set_union(&key_sets);
    drop(key_sets);
    let mut records = Vec::with_capacity(remaining.len());
    for (i, s) in summaries.iter().enumerate() {
        if remaining.is_empty() {
            break;
        }
        let found = mset::set_intersection([&s.summary, &remaining]);
        let mut firsts: Vec<(Marker, HashValue)> = found
            .keys()
            .map(|(h, v)| (v.min().expect("m-set keys are never empty"), h))
            .collect();
        firsts.sort_unstable();
        for (marker, hash) in firsts {
            records.push(UniqueGraphRecord {
                hash,
                graph_index: i,
                marker,
            });
            remaining
                .pop(hash)
                .expect("hash was found in the remaining table");
        }
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;

    const NI: i64 = i64::MIN;
    const PI: i64 = i64::MAX;

    type Attachment = (&'static str, i64, i64);

    /// Five nodes, edges A..E; D and E move at markers 100 and 200.
    fn moving_graph() -> IbdGraph {
        let mut g = IbdGraph::new("g");
        let layout: [(&str, &[Attachment]); 5] = [
            ("1", &[("A", NI, PI), ("E", 100, 200)]),
            (
                "2",
                &[("A", NI, PI), ("B", NI, PI), ("E", NI, 100), ("D", 200, PI)],
            ),
            ("3", &[("B", NI, PI), ("C", NI, PI), ("D", 100, 200)]),
            ("4", &[("C", NI, PI), ("D", NI, 100), ("E", 200, PI)]),
            ("5", &[("D", NI, PI), ("E", NI, PI)]),
        ];
        for (label, edges) in layout {
            let n = g.add_node(label);
            for &(e, lo, hi) in edges {
                g.attach(n, e, lo, hi).unwrap();
            }
        }
        g
    }

    #[test]
    fn same_skeleton_different_graph() {
        let g = moving_graph();
        let s = g.summarize();
        assert_ne!(s.hash_at(0), s.hash_at(300));
        assert_ne!(s.hash_at(0), s.hash_at(150));
        assert_ne!(g.canonical_form(0), g.canonical_form(300));
        assert_eq!(s.configurations(), 3);
    }

    #[test]
    fn canonical_form_lists_node_edge_sets() {
        let g = moving_graph();
        let mut expected: Vec<Vec<u8>> = [
            vec!["A"],
            vec!["A", "B", "E"],
            vec!["B", "C"],
            vec!["C", "D"],
            vec!["D", "E"],
        ]
        .into_iter()
        .map(encode_parts)
        .collect();
        expected.sort();
        assert_eq!(g.canonical_form(0), encode_parts(expected));
    }

    #[test]
    fn node_order_is_irrelevant() {
        let g = moving_graph();
        let mut r = g.clone();
        r.nodes.reverse();
        for n in &mut r.nodes {
            n.label = format!("x{}", n.label);
        }
        let (a, b) = (g.summarize(), r.summarize());
        for m in [NI, 0, 100, 150, 200, 250] {
            assert_eq!(a.hash_at(m), b.hash_at(m));
            assert_eq!(g.canonical_form(m), r.canonical_form(m));
        }
    }

    #[test]
    fn relabeling_an_edge_changes_hash_where_attached() {
        let g = moving_graph();
        let mut r = g.clone();
        for n in &mut r.nodes {
            if let Some(v) = n.edges.remove("E") {
                n.edges.insert("F".into(), v);
            }
        }
        let (a, b) = (g.summarize(), r.summarize());
        // E is attached somewhere at every marker
        for m in [NI, 0, 100, 150, 200, 250] {
            assert_ne!(a.hash_at(m), b.hash_at(m));
        }
    }

    #[test]
    fn overlapping_attachments_are_reported() {
        let mut g = IbdGraph::new("g");
        let n = g.add_node("n");
        assert!(!g.attach(n, "A", 0, 10).unwrap());
        assert!(g.attach(n, "A", 5, 15).unwrap());
        assert!(!g.attach(n, "A", 15, 20).unwrap());
        assert_eq!(g.nodes[0].edges["A"].to_string(), "[0,20)");
        assert!(g.attach(n, "A", 3, 3).is_err());
    }

    #[test]
    fn unique_elements_first_occurrence() {
        let g = moving_graph();
        let s = g.summarize();
        let recs = unique_elements(&[s.clone(), s.clone()]);
        assert_eq!(recs.len(), 3);
        assert!(recs.iter().all(|r| r.graph_index == 0));
        assert_eq!(
            recs.iter().map(|r| r.marker).collect::<Vec<_>>(),
            vec![Marker::NEG_INF, Marker(100), Marker(200)]
        );
        assert!(unique_elements(&[]).is_empty());
    }

    #[test]
    fn unique_elements_disjoint_collections() {
        let mut a = IbdGraph::new("a");
        let n = a.add_node("n");
        a.attach(n, "X", 0, 10).unwrap();
        a.attach(n, "Y", 5, 15).unwrap();
        let mut b = IbdGraph::new("b");
        let n = b.add_node("n");
        b.attach(n, "Z", 0, 10).unwrap();
        let (sa, sb) = (a.summarize(), b.summarize());
        let recs = unique_elements(&[sa.clone(), sb.clone()]);
        assert_eq!(recs.len(), sa.summary.len() + sb.summary.len());
        assert_eq!(recs.iter().filter(|r| r.graph_index == 1).count(), 1);
    }
}
