#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hashreduce::{HashValue, IbdGraph, MarkedKey, ValiditySet};

pub fn random_hash(rng: &mut ChaCha8Rng) -> HashValue {
    HashValue::new(rng.random())
}

/// Up to `max_intervals` disjoint intervals with endpoints in `[lo, hi]`.
pub fn random_vset(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_intervals: usize) -> ValiditySet {
    let n = rng.random_range(0..=max_intervals) * 2;
    let mut points: Vec<i64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    points.sort_unstable();
    points.dedup();
    ValiditySet::from_intervals(points.chunks_exact(2).map(|c| (c[0], c[1]))).unwrap()
}

/// Random keys with non-empty validity sets. A few hashes repeat so that
/// insertion has to union.
pub fn random_keys(
    rng: &mut ChaCha8Rng,
    max_keys: usize,
    max_intervals: usize,
    lo: i64,
    hi: i64,
) -> Vec<MarkedKey> {
    let n = rng.random_range(0..=max_keys);
    let mut hashes: Vec<HashValue> = Vec::new();
    let mut out = Vec::new();
    while out.len() < n {
        let h = if !hashes.is_empty() && rng.random_bool(0.1) {
            hashes[rng.random_range(0..hashes.len())]
        } else {
            random_hash(rng)
        };
        let v = random_vset(rng, lo, hi, max_intervals);
        if !v.is_empty() {
            hashes.push(h);
            out.push(MarkedKey::new(h, v));
        }
    }
    out
}

/// Key-wise union of a key list, the table an M-Set built from it must hold.
pub fn merged(keys: &[MarkedKey]) -> Vec<MarkedKey> {
    let mut t: BTreeMap<HashValue, ValiditySet> = BTreeMap::new();
    for k in keys {
        let slot = t.entry(k.hash).or_default();
        *slot = slot.union(&k.vset);
    }
    t.into_iter().map(|(h, v)| MarkedKey::new(h, v)).collect()
}

const EDGE_LABELS: [&str; 12] = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L"];

/// A graph with up to `max_nodes` nodes and up to `max_edges` distinct edges,
/// each edge attached to one or two nodes on a few intervals in `[0, span]`.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    id: &str,
    max_nodes: usize,
    max_edges: usize,
    span: i64,
) -> IbdGraph {
    let mut g = IbdGraph::new(id);
    let nodes = rng.random_range(1..=max_nodes);
    for i in 0..nodes {
        g.add_node(format!("n{i}"));
    }
    let edges = rng.random_range(1..=max_edges.min(EDGE_LABELS.len()));
    for &e in &EDGE_LABELS[..edges] {
        for _ in 0..rng.random_range(1..=2) {
            let n = rng.random_range(0..nodes);
            for (lo, hi) in random_vset(rng, 0, span, 3).intervals() {
                g.attach(n, e, *lo, *hi).unwrap();
            }
        }
    }
    g
}

/// The same graph with nodes shuffled and relabeled.
pub fn permuted(rng: &mut ChaCha8Rng, g: &IbdGraph) -> IbdGraph {
    let mut p = g.clone();
    p.nodes.shuffle(rng);
    for (i, n) in p.nodes.iter_mut().enumerate() {
        n.label = format!("p{i}");
    }
    p
}

/// A small edit that may or may not change the graph at a given marker:
/// one edge's attachment on part of the axis moves to another node.
pub fn perturbed(rng: &mut ChaCha8Rng, g: &IbdGraph, span: i64) -> IbdGraph {
    let mut p = g.clone();
    let from = rng.random_range(0..p.nodes.len());
    let to = rng.random_range(0..p.nodes.len());
    let Some(edge) = p.nodes[from].edges.keys().next().cloned() else {
        return p;
    };
    let a = rng.random_range(0..span);
    let b = rng.random_range(a + 1..=span);
    let region = ValiditySet::interval(a, b).unwrap();
    let moved = p.nodes[from].edges[&edge].intersection(&region);
    let rest = p.nodes[from].edges[&edge].difference(&region);
    if rest.is_empty() {
        p.nodes[from].edges.remove(&edge);
    } else {
        p.nodes[from].edges.insert(edge.clone(), rest);
    }
    if !moved.is_empty() {
        let slot = p.nodes[to].edges.entry(edge).or_default();
        *slot = slot.union(&moved);
    }
    p
}

/// Digest as a big-endian integer, reduced with big-integer arithmetic.
pub fn big_hash(bytes: &[u8]) -> num_bigint::BigUint {
    use md5::{Digest, Md5};
    num_bigint::BigUint::from_bytes_be(&Md5::digest(bytes))
        % num_bigint::BigUint::from(hashreduce::MODULUS)
}

pub fn big_rehash(h: u128) -> num_bigint::BigUint {
    let n = num_bigint::BigUint::from(hashreduce::MODULUS);
    (big_hash(&h.to_be_bytes()) + &n - big_hash(&[0u8; 16])) % n
}

/// `(input, expected)` columns of a vector file.
pub fn vector_rows(text: &str) -> Vec<(&str, &str)> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (a, b) = l.split_once('\t').expect("tab separated");
            (a.trim(), b.trim())
        })
        .collect()
}

pub const HASH_VECTORS: &str = include_str!("../../testdata/hash_vectors.tsv");
pub const REHASH_VECTORS: &str = include_str!("../../testdata/rehash_vectors.tsv");
