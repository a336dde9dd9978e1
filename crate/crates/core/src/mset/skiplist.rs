//! Augmented skip list over marker breakpoints.
//!
//! Leaves sit at every marker where some key's validity changes. A leaf holds
//! `r0[m]`: the reduction of `+h` for every key whose interval opens at `m`
//! and `-h` for every key whose interval closes there. A node at level
//! `b >= 1` holds the reduction of the level `b - 1` hashes from its own
//! marker up to (not including) the next level `b` node, which is the same
//! as the reduction of every leaf beneath it. The running reduction of the
//! leaves up to `m` is then the reduction of every key valid at `m`, and it
//! can be read off in `O(log n)` by summing node hashes while moving forward.
//!
//! Nodes are stored as towers in an arena: a node of height `k` takes part in
//! levels `0..k`, and "down" is the same tower one level lower. Index 0 is a
//! head tower of full height that sits before every marker and never carries a
//! leaf hash.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hashspace::HashValue;
use crate::intervals::Marker;

pub(crate) const MAX_LEVEL: usize = 32;
const HEAD: u32 = 0;
const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Link {
    next: u32,
    hash: HashValue,
}

#[derive(Clone, Debug)]
struct Node {
    marker: Marker,
    /// Number of key endpoints at this marker.
    refs: u32,
    levels: Vec<Link>,
}

/// A leaf as seen from outside: marker, leaf hash and endpoint count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Leaf {
    pub marker: Marker,
    pub hash: HashValue,
    pub refs: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct SkipList {
    nodes: Vec<Node>,
    free: Vec<u32>,
    /// Levels in use; at least 1.
    top: usize,
    leaves: usize,
    rng: ChaCha8Rng,
}

impl SkipList {
    pub fn new(seed: u64) -> Self {
        let head = Node {
            marker: Marker::NEG_INF,
            refs: 0,
            levels: vec![
                Link {
                    next: NIL,
                    hash: HashValue::NULL
                };
                MAX_LEVEL
            ],
        };
        SkipList {
            nodes: vec![head],
            free: Vec::new(),
            top: 1,
            leaves: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Builds the list in one pass from leaves sorted by strictly increasing
    /// marker.
    pub fn from_sorted_leaves(seed: u64, leaves: &[Leaf]) -> Self {
        let mut list = SkipList::new(seed);
        list.nodes.reserve(leaves.len());
        let heights: Vec<usize> = leaves.iter().map(|_| list.random_height()).collect();
        list.top = heights.iter().copied().max().unwrap_or(1);
        let mut last = [HEAD; MAX_LEVEL];
        for (leaf, &height) in leaves.iter().zip(&heights) {
            debug_assert!(leaf.refs > 0);
            let id = list.nodes.len() as u32;
            list.nodes.push(Node {
                marker: leaf.marker,
                refs: leaf.refs,
                levels: vec![
                    Link {
                        next: NIL,
                        hash: HashValue::NULL
                    };
                    height
                ],
            });
            for (b, slot) in last.iter_mut().enumerate().take(height) {
                debug_assert!(*slot == HEAD || list.nodes[*slot as usize].marker < leaf.marker);
                list.nodes[*slot as usize].levels[b].next = id;
                *slot = id;
            }
            list.nodes[id as usize].levels[0].hash = leaf.hash;
            for (b, &owner) in last.iter().enumerate().take(list.top).skip(1) {
                list.nodes[owner as usize].levels[b].hash += leaf.hash;
            }
        }
        list.leaves = leaves.len();
        list
    }

    fn random_height(&mut self) -> usize {
        let mut h = 1;
        while h < MAX_LEVEL && self.rng.random_ratio(1, 4) {
            h += 1;
        }
        h
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    pub fn levels(&self) -> usize {
        self.top
    }

    /// For every level in use, the last node whose marker is strictly below
    /// `x` (the head if there is none).
    fn predecessors(&self, x: Marker) -> [u32; MAX_LEVEL] {
        let mut update = [HEAD; MAX_LEVEL];
        let mut n = HEAD;
        for b in (0..self.top).rev() {
            loop {
                let next = self.nodes[n as usize].levels[b].next;
                if next != NIL && self.nodes[next as usize].marker < x {
                    n = next;
                } else {
                    break;
                }
            }
            update[b] = n;
        }
        update
    }

    /// Adds `delta` to the leaf at `x` and `ref_delta` to its endpoint count,
    /// creating the leaf if needed and deleting it once no endpoint refers
    /// to it.
    pub fn update(&mut self, x: Marker, delta: HashValue, ref_delta: i32) {
        let mut update = self.predecessors(x);
        let cand = self.nodes[update[0] as usize].levels[0].next;
        if cand != NIL && self.nodes[cand as usize].marker == x {
            let height = self.nodes[cand as usize].levels.len();
            for b in 0..height {
                self.nodes[cand as usize].levels[b].hash += delta;
            }
            for (b, &owner) in update.iter().enumerate().take(self.top).skip(height) {
                self.nodes[owner as usize].levels[b].hash += delta;
            }
            let refs = &mut self.nodes[cand as usize].refs;
            *refs = refs
                .checked_add_signed(ref_delta)
                .expect("endpoint count underflow");
            if *refs == 0 {
                self.unlink(cand, &update);
            }
            return;
        }

        assert!(ref_delta > 0, "removing a contribution from a missing leaf");
        let height = self.random_height();
        if height > self.top {
            // A fresh head level spans every existing leaf.
            let total = self.prefix_traced(Marker::POS_INF).0;
            update[self.top..height].fill(HEAD);
            for link in &mut self.nodes[HEAD as usize].levels[self.top..height] {
                link.hash = total;
            }
            self.top = height;
        }
        let id = self.alloc(Node {
            marker: x,
            refs: ref_delta as u32,
            levels: vec![
                Link {
                    next: NIL,
                    hash: HashValue::NULL
                };
                height
            ],
        });
        for (b, &pred) in update.iter().enumerate().take(height) {
            let next = self.nodes[pred as usize].levels[b].next;
            self.nodes[id as usize].levels[b].next = next;
            self.nodes[pred as usize].levels[b].next = id;
        }
        self.nodes[id as usize].levels[0].hash = delta;
        for (b, &pred) in update.iter().enumerate().take(height).skip(1) {
            // The new tower takes over the tail of the predecessor's span.
            let stop = self.nodes[id as usize].levels[b].next;
            let mut span = HashValue::NULL;
            let mut n = id;
            while n != stop {
                let link = self.nodes[n as usize].levels[b - 1];
                span += link.hash;
                n = link.next;
            }
            self.nodes[id as usize].levels[b].hash = span;
            self.nodes[pred as usize].levels[b].hash -= span - delta;
        }
        for (b, &owner) in update.iter().enumerate().take(self.top).skip(height) {
            self.nodes[owner as usize].levels[b].hash += delta;
        }
        self.leaves += 1;
    }

    fn alloc(&mut self, node: Node) -> u32 {
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = node;
            id
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    /// Removes a tower whose leaf hash has returned to null; each
    /// predecessor absorbs the span the tower covered.
    fn unlink(&mut self, id: u32, update: &[u32; MAX_LEVEL]) {
        debug_assert!(self.nodes[id as usize].levels[0].hash.is_null());
        let height = self.nodes[id as usize].levels.len();
        for (b, &pred) in update.iter().enumerate().take(height) {
            let link = self.nodes[id as usize].levels[b];
            let p = &mut self.nodes[pred as usize].levels[b];
            p.next = link.next;
            p.hash += link.hash;
        }
        self.nodes[id as usize].levels = Vec::new();
        self.free.push(id);
        self.leaves -= 1;
        while self.top > 1 && self.nodes[HEAD as usize].levels[self.top - 1].next == NIL {
            self.nodes[HEAD as usize].levels[self.top - 1].hash = HashValue::NULL;
            self.top -= 1;
        }
    }

    /// Running reduction of every leaf at or before `m`, with the number of
    /// forward-link inspections made on the way.
    pub fn prefix_traced(&self, m: Marker) -> (HashValue, usize) {
        let mut h = HashValue::NULL;
        let mut n = HEAD;
        let mut visits = 0;
        for b in (0..self.top).rev() {
            loop {
                visits += 1;
                let link = self.nodes[n as usize].levels[b];
                if link.next != NIL && self.nodes[link.next as usize].marker <= m {
                    h += link.hash;
                    n = link.next;
                } else {
                    break;
                }
            }
        }
        // Now on the destination leaf; fold in its own leaf hash.
        h += self.nodes[n as usize].levels[0].hash;
        (h, visits)
    }

    pub fn leaves(&self) -> LeafIter<'_> {
        LeafIter {
            list: self,
            at: self.nodes[HEAD as usize].levels[0].next,
        }
    }

    /// Nodes of one level, head first, as `(marker or None for head, hash)`.
    pub fn level_nodes(&self, b: usize) -> Vec<(Option<Marker>, HashValue)> {
        let mut out = Vec::new();
        let mut n = HEAD;
        while n != NIL {
            let node = &self.nodes[n as usize];
            out.push(((n != HEAD).then_some(node.marker), node.levels[b].hash));
            n = node.levels[b].next;
        }
        out
    }

    /// Checks the node property at every level and the ordering and tower
    /// shape of the links.
    pub fn check_nodes(&self) -> Result<(), String> {
        let mut prev: Option<Marker> = None;
        for leaf in self.leaves() {
            if prev.is_some_and(|p| p >= leaf.marker) {
                return Err(format!("leaf markers not increasing at {}", leaf.marker));
            }
            prev = Some(leaf.marker);
        }
        let head = &self.nodes[HEAD as usize];
        if head.levels[0].hash != HashValue::NULL {
            return Err("head carries a leaf hash".into());
        }
        for b in self.top..MAX_LEVEL {
            if head.levels[b].next != NIL || !head.levels[b].hash.is_null() {
                return Err(format!("head level {b} above top is not empty"));
            }
        }
        for b in 1..self.top {
            let mut n = HEAD;
            while n != NIL {
                let node = &self.nodes[n as usize];
                let stop = node.levels[b].next;
                let mut span = HashValue::NULL;
                let mut walk = n;
                while walk != stop {
                    if walk == NIL {
                        return Err(format!(
                            "level {b} successor of {} missing from level {}",
                            node.marker,
                            b - 1
                        ));
                    }
                    let w = &self.nodes[walk as usize];
                    if w.levels.len() < b {
                        return Err(format!("tower at {} too short", w.marker));
                    }
                    span += w.levels[b - 1].hash;
                    walk = w.levels[b - 1].next;
                }
                if span != node.levels[b].hash {
                    return Err(format!(
                        "level {b} node at {} holds {} but its span reduces to {}",
                        if n == HEAD {
                            "head".to_string()
                        } else {
                            node.marker.to_string()
                        },
                        node.levels[b].hash,
                        span
                    ));
                }
                n = stop;
            }
        }
        Ok(())
    }
}

pub(crate) struct LeafIter<'a> {
    list: &'a SkipList,
    at: u32,
}

impl Iterator for LeafIter<'_> {
    type Item = Leaf;

    fn next(&mut self) -> Option<Leaf> {
        if self.at == NIL {
            return None;
        }
        let node = &self.list.nodes[self.at as usize];
        self.at = node.levels[0].next;
        Some(Leaf {
            marker: node.marker,
            hash: node.levels[0].hash,
            refs: node.refs,
        })
    }
}
