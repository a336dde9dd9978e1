//! M-Sets: collections of marked keys that can be reduced, compared and
//! combined per marker.
//!
//! An [`MSet`] holds at most one key per hash value in a table, and mirrors
//! the validity sets of those keys in an augmented skip list (see
//! [`skiplist`]) so that the reduction of all keys valid at a marker is an
//! `O(log n)` lookup.
//!
//! # Debug dump
//!
//! [`MSet::debug_dump`] writes one line per leaf, `<marker>\t<r0 hex>`, in
//! marker order. It then writes one line per upper level `b = 1, 2, ..`:
//! `level <b>\t` followed by space separated `<marker>=<hash hex>` entries,
//! the head node first as `head=<hash hex>`. Markers use the `-inf`/`inf`
//! tokens of the validity set rendering.

mod skiplist;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::hashspace::{rehash, HashValue};
use crate::intervals::{IntervalError, MarkedKey, Marker, ValiditySet};

use skiplist::{Leaf, SkipList};

/// Seed used by [`MSet::new`] for skip-list level draws.
pub const DEFAULT_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MSetError {
    #[error("no key with hash {0}")]
    NotFound(HashValue),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// A violated structural property found by [`MSet::audit`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("m-set audit failed: {0}")]
pub struct AuditError(pub String);

#[derive(Clone, Debug)]
pub struct MSet {
    keys: BTreeMap<HashValue, ValiditySet>,
    list: SkipList,
    seed: u64,
}

impl Default for MSet {
    fn default() -> Self {
        MSet::new()
    }
}

/// Two M-Sets are equal when they hold the same keys; the skip-list shape is
/// not compared.
impl PartialEq for MSet {
    fn eq(&self, other: &Self) -> bool {
        self.keys == other.keys
    }
}

impl Eq for MSet {}

impl FromIterator<MarkedKey> for MSet {
    fn from_iter<I: IntoIterator<Item = MarkedKey>>(iter: I) -> Self {
        let mut table: BTreeMap<HashValue, ValiditySet> = BTreeMap::new();
        for key in iter {
            if key.vset.is_empty() {
                continue;
            }
            let slot = table.entry(key.hash).or_default();
            *slot = slot.union(&key.vset);
        }
        MSet::from_table(table, DEFAULT_SEED)
    }
}

/// Signed endpoint contributions of one validity set: `+1` where an interval
/// opens, `-1` where one closes.
fn endpoints(vset: &ValiditySet) -> impl Iterator<Item = (Marker, i8)> + '_ {
    vset.intervals()
        .iter()
        .flat_map(|&(lo, hi)| [(lo, 1i8), (hi, -1i8)])
}

fn signed(h: HashValue, sign: i8) -> HashValue {
    if sign > 0 {
        h
    } else {
        -h
    }
}

impl MSet {
    pub fn new() -> Self {
        MSet::with_seed(DEFAULT_SEED)
    }

    /// An empty M-Set whose skip-list levels are drawn from `seed`.
    pub fn with_seed(seed: u64) -> Self {
        MSet {
            keys: BTreeMap::new(),
            list: SkipList::new(seed),
            seed,
        }
    }

    /// Builds an M-Set from a table of non-empty validity sets in a single
    /// pass over the sorted endpoints.
    fn from_table(keys: BTreeMap<HashValue, ValiditySet>, seed: u64) -> Self {
        let mut events: Vec<(Marker, HashValue)> = Vec::new();
        for (&h, vset) in &keys {
            debug_assert!(!vset.is_empty());
            events.extend(endpoints(vset).map(|(m, s)| (m, signed(h, s))));
        }
        events.sort_unstable_by_key(|&(m, _)| m);
        let mut leaves: Vec<Leaf> = Vec::new();
        for (m, d) in events {
            match leaves.last_mut() {
                Some(leaf) if leaf.marker == m => {
                    leaf.hash += d;
                    leaf.refs += 1;
                }
                _ => leaves.push(Leaf {
                    marker: m,
                    hash: d,
                    refs: 1,
                }),
            }
        }
        MSet {
            keys,
            list: SkipList::from_sorted_leaves(seed, &leaves),
            seed,
        }
    }

    /// Builds an M-Set from pieces `(lo, hi, hash)` sorted by `lo` and
    /// pairwise disjoint. Null pieces are skipped and touching pieces with
    /// equal hash are coalesced.
    fn from_pieces<I>(pieces: I) -> Self
    where
        I: IntoIterator<Item = (Marker, Marker, HashValue)>,
    {
        let mut table: BTreeMap<HashValue, ValiditySet> = BTreeMap::new();
        for (lo, hi, h) in pieces {
            if !h.is_null() {
                table.entry(h).or_default().push_back(lo, hi);
            }
        }
        MSet::from_table(table, DEFAULT_SEED)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Number of distinct breakpoints (skip-list leaves).
    pub fn breakpoint_count(&self) -> usize {
        self.list.leaf_count()
    }

    /// All breakpoints in increasing order.
    pub fn breakpoints(&self) -> Vec<Marker> {
        self.list.leaves().map(|l| l.marker).collect()
    }

    /// Keys in increasing hash order.
    pub fn keys(&self) -> impl Iterator<Item = (HashValue, &ValiditySet)> + '_ {
        self.keys.iter().map(|(&h, v)| (h, v))
    }

    pub fn marked_keys(&self) -> impl Iterator<Item = MarkedKey> + '_ {
        self.keys.iter().map(|(&h, v)| MarkedKey::new(h, v.clone()))
    }

    /// Replaces the validity set of `h`, updating only the leaves whose
    /// endpoint contributions change.
    fn set_vset(&mut self, h: HashValue, new: ValiditySet) {
        let old = self.keys.remove(&h).unwrap_or_default();
        self.apply_change(h, &old, &new);
        if !new.is_empty() {
            self.keys.insert(h, new);
        }
    }

    fn apply_change(&mut self, h: HashValue, old: &ValiditySet, new: &ValiditySet) {
        let mut a = endpoints(old).peekable();
        let mut b = endpoints(new).peekable();
        loop {
            match (a.peek().copied(), b.peek().copied()) {
                (None, None) => break,
                (Some((ma, sa)), Some((mb, sb))) if ma == mb => {
                    if sa != sb {
                        self.list.update(ma, signed(h, sb) - signed(h, sa), 0);
                    }
                    a.next();
                    b.next();
                }
                (Some((ma, sa)), mb) if mb.is_none_or(|(mb, _)| ma < mb) => {
                    self.list.update(ma, -signed(h, sa), -1);
                    a.next();
                }
                (_, Some((mb, sb))) => {
                    self.list.update(mb, signed(h, sb), 1);
                    b.next();
                }
                (Some(_), None) => unreachable!(),
            }
        }
    }

    /// Inserts a key. An existing key with the same hash has its validity
    /// set unioned with the new one; a key with an empty set is ignored.
    pub fn insert(&mut self, key: MarkedKey) {
        if key.vset.is_empty() {
            return;
        }
        let merged = match self.keys.get(&key.hash) {
            Some(old) => old.union(&key.vset),
            None => key.vset,
        };
        self.set_vset(key.hash, merged);
    }

    /// Marks `[t1, t2)` valid for `h`, inserting `h` if needed.
    pub fn add_valid_region(
        &mut self,
        h: HashValue,
        t1: impl Into<Marker>,
        t2: impl Into<Marker>,
    ) -> Result<(), MSetError> {
        let region = ValiditySet::interval(t1, t2)?;
        self.insert(MarkedKey::new(h, region));
        Ok(())
    }

    pub fn pop(&mut self, h: HashValue) -> Result<MarkedKey, MSetError> {
        let vset = self.keys.get(&h).cloned().ok_or(MSetError::NotFound(h))?;
        self.set_vset(h, ValiditySet::empty());
        Ok(MarkedKey::new(h, vset))
    }

    pub fn get(&self, h: HashValue) -> Result<MarkedKey, MSetError> {
        self.keys
            .get(&h)
            .map(|v| MarkedKey::new(h, v.clone()))
            .ok_or(MSetError::NotFound(h))
    }

    pub fn vset(&self, h: HashValue) -> Option<&ValiditySet> {
        self.keys.get(&h)
    }

    pub fn exists(&self, h: HashValue) -> bool {
        self.keys.contains_key(&h)
    }

    pub fn exists_at(&self, h: HashValue, m: impl Into<Marker>) -> bool {
        self.keys.get(&h).is_some_and(|v| v.is_valid(m))
    }

    /// Reduction of every key valid at `m`.
    pub fn hash_at_marker(&self, m: impl Into<Marker>) -> HashValue {
        self.list.prefix_traced(m.into()).0
    }

    /// Like [`hash_at_marker`](Self::hash_at_marker), also returning how many
    /// skip-list links were inspected.
    pub fn hash_at_marker_traced(&self, m: impl Into<Marker>) -> (HashValue, usize) {
        self.list.prefix_traced(m.into())
    }

    /// The running reduction as a step function: each entry `(m, h)` means
    /// the reduction is `h` from `m` up to the next entry. Before the first
    /// entry it is null.
    pub fn step_function(&self) -> Vec<(Marker, HashValue)> {
        let mut running = HashValue::NULL;
        self.list
            .leaves()
            .map(|leaf| {
                running += leaf.hash;
                (leaf.marker, running)
            })
            .collect()
    }

    /// Maximal pieces `(lo, hi, h)` of constant non-null running reduction,
    /// split at every breakpoint.
    fn pieces(&self) -> Vec<(Marker, Marker, HashValue)> {
        let steps = self.step_function();
        steps
            .windows(2)
            .filter(|w| !w[0].1.is_null())
            .map(|w| (w[0].0, w[1].0, w[0].1))
            .collect()
    }

    /// An M-Set with exactly one key valid wherever this set's reduction is
    /// non-null, carrying that reduction. Keys have pairwise disjoint
    /// validity sets.
    pub fn reduce_mset(&self) -> MSet {
        MSet::from_pieces(self.pieces())
    }

    /// Markers at which the running reduction equals `h`. For the null hash
    /// this includes everything outside the coverage of the keys.
    pub fn equal_to_hash(&self, h: HashValue) -> ValiditySet {
        regions_where(&[self.step_function()], |v| v[0] == h)
    }

    pub fn snapshot(&self, m: impl Into<Marker>) -> MSet {
        let m = m.into();
        MSet::from_table(
            self.keys
                .iter()
                .filter(|(_, v)| v.is_valid(m))
                .map(|(&h, _)| (h, ValiditySet::unmarked()))
                .collect(),
            self.seed,
        )
    }

    /// Every key, made valid everywhere.
    pub fn key_set(&self) -> MSet {
        self.marker_union(&ValiditySet::unmarked())
    }

    pub fn marker_union(&self, region: &ValiditySet) -> MSet {
        MSet::from_table(
            self.keys
                .iter()
                .map(|(&h, v)| (h, v.union(region)))
                .collect(),
            self.seed,
        )
    }

    pub fn marker_intersection(&self, region: &ValiditySet) -> MSet {
        MSet::from_table(
            self.keys
                .iter()
                .map(|(&h, v)| (h, v.intersection(region)))
                .filter(|(_, v)| !v.is_empty())
                .collect(),
            self.seed,
        )
    }

    /// Union of the validity sets of every non-null key.
    pub fn union_of_vsets(&self) -> ValiditySet {
        self.keys
            .iter()
            .filter(|(h, _)| !h.is_null())
            .fold(ValiditySet::empty(), |acc, (_, v)| acc.union(v))
    }

    /// Intersection of the validity sets of every non-null key. With no such
    /// key the result is `[-inf, inf)`.
    pub fn intersection_of_vsets(&self) -> ValiditySet {
        self.keys
            .iter()
            .filter(|(h, _)| !h.is_null())
            .fold(ValiditySet::unmarked(), |acc, (_, v)| acc.intersection(v))
    }

    /// Verifies the leaf property, the node property and endpoint counts
    /// against a full recomputation from the key table.
    pub fn audit(&self) -> Result<(), AuditError> {
        let mut expected: BTreeMap<Marker, (HashValue, u32)> = BTreeMap::new();
        for (&h, vset) in &self.keys {
            if vset.is_empty() {
                return Err(AuditError(format!("key {h} has an empty validity set")));
            }
            for (m, s) in endpoints(vset) {
                let e = expected.entry(m).or_insert((HashValue::NULL, 0));
                e.0 += signed(h, s);
                e.1 += 1;
            }
        }
        let actual: Vec<Leaf> = self.list.leaves().collect();
        if actual.len() != expected.len() || actual.len() != self.list.leaf_count() {
            return Err(AuditError(format!(
                "{} leaves present, {} breakpoints expected",
                actual.len(),
                expected.len()
            )));
        }
        for (leaf, (&m, &(h, refs))) in actual.iter().zip(&expected) {
            if leaf.marker != m || leaf.hash != h || leaf.refs != refs {
                return Err(AuditError(format!(
                    "leaf at {} holds ({}, {} refs); expected ({}, {} refs) at {}",
                    leaf.marker, leaf.hash, leaf.refs, h, refs, m
                )));
            }
        }
        self.list.check_nodes().map_err(AuditError)
    }

    /// Text dump of the skip list; format described in the module docs.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for leaf in self.list.leaves() {
            let _ = writeln!(out, "{}\t{}", leaf.marker, leaf.hash);
        }
        for b in 1..self.list.levels() {
            let _ = write!(out, "level {b}\t");
            for (i, (m, h)) in self.list.level_nodes(b).into_iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                match m {
                    Some(m) => {
                        let _ = write!(out, "{m}={h}");
                    }
                    None => {
                        let _ = write!(out, "head={h}");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Sweeps several step functions in lockstep and collects the markers where
/// `pred` holds for the current values.
fn regions_where(
    steps: &[Vec<(Marker, HashValue)>],
    pred: impl Fn(&[HashValue]) -> bool,
) -> ValiditySet {
    let mut idx = vec![0usize; steps.len()];
    let mut values = vec![HashValue::NULL; steps.len()];
    let mut out = ValiditySet::empty();
    let mut cur = Marker::NEG_INF;
    loop {
        let next = steps
            .iter()
            .zip(&idx)
            .filter_map(|(s, &i)| s.get(i).map(|e| e.0))
            .min();
        let Some(x) = next else { break };
        if x > cur && pred(&values) {
            out.push_back(cur, x);
        }
        for ((s, i), v) in steps.iter().zip(idx.iter_mut()).zip(values.iter_mut()) {
            if let Some(&(m, h)) = s.get(*i) {
                if m == x {
                    *v = h;
                    *i += 1;
                }
            }
        }
        cur = x;
    }
    if cur < Marker::POS_INF && pred(&values) {
        out.push_back(cur, Marker::POS_INF);
    }
    out
}

/// One M-Set whose value at each marker is the reduction, over the inputs, of
/// the rehashed running reduction of each input. Inputs that are null at a
/// marker contribute nothing; identical inputs each contribute.
pub fn summarize<'a, I>(sets: I) -> MSet
where
    I: IntoIterator<Item = &'a MSet>,
{
    let mut events: Vec<(Marker, HashValue)> = Vec::new();
    for t in sets {
        for (lo, hi, h) in t.pieces() {
            let r = rehash(h);
            events.push((lo, r));
            events.push((hi, -r));
        }
    }
    events.sort_unstable_by_key(|&(m, _)| m);
    let mut pieces = Vec::new();
    let mut running = HashValue::NULL;
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        while i < events.len() && events[i].0 == x {
            running += events[i].1;
            i += 1;
        }
        if let Some(&(next, _)) = events.get(i) {
            pieces.push((x, next, running));
        }
    }
    MSet::from_pieces(pieces)
}

/// True when every set reduces to the same hash at `m`.
pub fn equal_at_marker<'a, I>(sets: I, m: impl Into<Marker>) -> bool
where
    I: IntoIterator<Item = &'a MSet>,
{
    let m = m.into();
    let mut it = sets.into_iter().map(|t| t.hash_at_marker(m));
    match it.next() {
        Some(first) => it.all(|h| h == first),
        None => true,
    }
}

/// Markers at which every set reduces to the same hash, found by comparing
/// each set against the first and intersecting.
pub fn equality_vset<'a, I>(sets: I) -> ValiditySet
where
    I: IntoIterator<Item = &'a MSet>,
{
    let mut it = sets.into_iter();
    let Some(first) = it.next() else {
        return ValiditySet::unmarked();
    };
    let base = first.step_function();
    let mut acc = ValiditySet::unmarked();
    for t in it {
        let eq = regions_where(&[base.clone(), t.step_function()], |v| v[0] == v[1]);
        acc = acc.intersection(&eq);
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// Key-wise union: each hash gets the union of its validity sets.
pub fn set_union<'a, I>(sets: I) -> MSet
where
    I: IntoIterator<Item = &'a MSet>,
{
    let mut table: BTreeMap<HashValue, ValiditySet> = BTreeMap::new();
    for t in sets {
        for (&h, v) in &t.keys {
            let slot = table.entry(h).or_default();
            *slot = slot.union(v);
        }
    }
    MSet::from_table(table, DEFAULT_SEED)
}

/// Keys present in every input, with the intersection of their sets. Keys
/// left with an empty set are dropped. No inputs yields an empty M-Set.
pub fn set_intersection<'a, I>(sets: I) -> MSet
where
    I: IntoIterator<Item = &'a MSet>,
{
    let mut it = sets.into_iter();
    let Some(first) = it.next() else {
        return MSet::new();
    };
    let mut table = first.keys.clone();
    for t in it {
        table = table
            .into_iter()
            .filter_map(|(h, v)| {
                let w = v.intersection(t.keys.get(&h)?);
                (!w.is_empty()).then_some((h, w))
            })
            .collect();
    }
    MSet::from_table(table, first.seed)
}

/// Keys of `a` with the validity of the same hash in `b` removed. Hashes
/// absent from `b` pass through unchanged; emptied keys are dropped.
pub fn set_difference(a: &MSet, b: &MSet) -> MSet {
    MSet::from_table(
        a.keys
            .iter()
            .filter_map(|(&h, v)| {
                let w = match b.keys.get(&h) {
                    Some(bv) => v.difference(bv),
                    None => v.clone(),
                };
                (!w.is_empty()).then_some((h, w))
            })
            .collect(),
        a.seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashspace::hash_object;

    fn vs(pairs: &[(i64, i64)]) -> ValiditySet {
        ValiditySet::from_intervals(pairs.iter().copied()).unwrap()
    }

    fn key(name: &str, pairs: &[(i64, i64)]) -> MarkedKey {
        MarkedKey::new(hash_object(name.as_bytes()), vs(pairs))
    }

    const NI: i64 = i64::MIN;
    const PI: i64 = i64::MAX;

    #[test]
    fn single_region() {
        let h = hash_object(b"h");
        let mut t = MSet::new();
        t.add_valid_region(h, 0, 10).unwrap();
        assert_eq!(t.hash_at_marker(5), h);
        assert_eq!(t.hash_at_marker(10), HashValue::NULL);
        assert_eq!(t.hash_at_marker(-1), HashValue::NULL);
        assert!(t.add_valid_region(h, 3, 3).is_err());
        t.audit().unwrap();
    }

    #[test]
    fn regions_accumulate() {
        let h = hash_object(b"h");
        let mut t = MSet::new();
        t.add_valid_region(h, 0, 5).unwrap();
        t.add_valid_region(h, 5, 9).unwrap();
        assert_eq!(t.hash_at_marker(7), h);
        assert_eq!(t.vset(h), Some(&vs(&[(0, 9)])));
        assert_eq!(t.breakpoints(), vec![Marker(0), Marker(9)]);
        t.audit().unwrap();
    }

    #[test]
    fn empty_keys_are_ignored() {
        let mut t = MSet::new();
        t.insert(MarkedKey::new(hash_object(b"z"), ValiditySet::empty()));
        assert!(t.is_empty());
        assert!(!t.exists(hash_object(b"z")));
    }

    #[test]
    fn pop_restores_empty() {
        let k = key("k", &[(0, 4), (8, 12)]);
        let mut t = MSet::new();
        t.insert(k.clone());
        assert_eq!(t.pop(k.hash), Ok(k.clone()));
        for m in -1..14 {
            assert_eq!(t.hash_at_marker(m), HashValue::NULL);
        }
        assert_eq!(t.breakpoint_count(), 0);
        assert_eq!(t.pop(k.hash), Err(MSetError::NotFound(k.hash)));
        assert_eq!(t.get(k.hash), Err(MSetError::NotFound(k.hash)));
    }

    #[test]
    fn exists_at_respects_open_bound() {
        let mut t = MSet::new();
        let k = key("k", &[(0, 10)]);
        t.insert(k.clone());
        assert!(t.exists_at(k.hash, 9));
        assert!(!t.exists_at(k.hash, 10));
        assert!(!t.exists_at(hash_object(b"other"), 5));
    }

    #[test]
    fn overlapping_keys() {
        let (a, b) = (key("h1", &[(0, 10)]), key("h2", &[(5, 15)]));
        let t: MSet = [a.clone(), b.clone()].into_iter().collect();
        assert_eq!(t.hash_at_marker(7), a.hash + b.hash);
        assert_eq!(t.hash_at_marker(12), b.hash);
        assert_eq!(t.hash_at_marker(20), HashValue::NULL);
        t.audit().unwrap();

        let r = t.reduce_mset();
        assert_eq!(r.len(), 3);
        assert_eq!(r.vset(a.hash), Some(&vs(&[(0, 5)])));
        assert_eq!(r.vset(a.hash + b.hash), Some(&vs(&[(5, 10)])));
        assert_eq!(r.vset(b.hash), Some(&vs(&[(10, 15)])));
        r.audit().unwrap();

        assert_eq!(t.intersection_of_vsets(), vs(&[(5, 10)]));
        assert_eq!(t.union_of_vsets(), vs(&[(0, 15)]));
    }

    #[test]
    fn reduce_single_key() {
        let k = key("h", &[(0, 5)]);
        let t: MSet = [k.clone()].into_iter().collect();
        let r = t.reduce_mset();
        assert_eq!(r.marked_keys().collect::<Vec<_>>(), vec![k]);
    }

    #[test]
    fn reduce_coalesces_equal_pieces() {
        // the reduction returns to a + c after b's gap closes
        let a = key("a", &[(0, 4), (6, 10)]);
        let b = key("b", &[(4, 6)]);
        let c = key("c", &[(0, 10)]);
        let t: MSet = [a.clone(), b.clone(), c.clone()].into_iter().collect();
        let r = t.reduce_mset();
        assert_eq!(r.vset(a.hash + c.hash), Some(&vs(&[(0, 4), (6, 10)])));
        assert_eq!(r.vset(b.hash + c.hash), Some(&vs(&[(4, 6)])));
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn summarize_basics() {
        let s = summarize([]);
        assert!(s.is_empty());
        assert_eq!(s.hash_at_marker(0), HashValue::NULL);

        let k = key("h", &[(0, 5)]);
        let t: MSet = [k.clone()].into_iter().collect();
        let s = summarize([&t]);
        assert_eq!(s.hash_at_marker(2), rehash(k.hash));
        assert_eq!(s.hash_at_marker(5), HashValue::NULL);
        assert_eq!(s.len(), 1);

        // multiplicity counts
        let s2 = summarize([&t, &t]);
        assert_eq!(s2.hash_at_marker(2), rehash(k.hash) + rehash(k.hash));
    }

    #[test]
    fn equality_regions() {
        let h = hash_object(b"h");
        let t1: MSet = [MarkedKey::new(h, vs(&[(0, 10)]))].into_iter().collect();
        let t2: MSet = [MarkedKey::new(h, vs(&[(5, 15)]))].into_iter().collect();
        assert_eq!(equality_vset([&t1, &t2]), vs(&[(NI, 0), (5, 10), (15, PI)]));
        assert!(equal_at_marker([&t1, &t1], 3));
        assert!(!equal_at_marker([&t1, &t2], 3));
        assert!(equality_vset([&t1, &t1]).is_unmarked());
        assert!(equality_vset([]).is_unmarked());

        let t: MSet = [MarkedKey::new(h, vs(&[(0, 5)]))].into_iter().collect();
        assert_eq!(t.equal_to_hash(HashValue::NULL), vs(&[(NI, 0), (5, PI)]));
        assert_eq!(t.equal_to_hash(h), vs(&[(0, 5)]));
    }

    #[test]
    fn set_operations() {
        let a = key("a", &[(0, 10)]);
        let b = key("b", &[(5, 15)]);
        let t1: MSet = [a.clone()].into_iter().collect();
        let t2: MSet = [b.clone()].into_iter().collect();
        let u = set_union([&t1, &t2]);
        assert_eq!(u.marked_keys().count(), 2);
        assert_eq!(u.get(a.hash), Ok(a.clone()));
        assert!(set_intersection([&t1, &t2]).is_empty());

        let t3: MSet = [MarkedKey::unmarked(a.hash)].into_iter().collect();
        assert!(!set_difference(&t1, &t3).exists(a.hash));
        assert_eq!(set_difference(&u, &t3).get(b.hash), Ok(b.clone()));
        let i = set_intersection([&u, &t3]);
        assert_eq!(i.marked_keys().collect::<Vec<_>>(), vec![a.clone()]);
        i.audit().unwrap();
    }

    #[test]
    fn marker_operations() {
        let a = key("a", &[(0, 10)]);
        let b = key("b", &[(20, 30)]);
        let t: MSet = [a.clone(), b.clone()].into_iter().collect();
        let ks = t.key_set();
        assert!(ks.keys().all(|(_, v)| v.is_unmarked()));
        assert_eq!(ks.len(), 2);
        let snap = t.snapshot(25);
        assert_eq!(snap.len(), 1);
        assert!(snap.exists(b.hash));
        let mi = t.marker_intersection(&vs(&[(5, 22)]));
        assert_eq!(mi.vset(a.hash), Some(&vs(&[(5, 10)])));
        assert_eq!(mi.vset(b.hash), Some(&vs(&[(20, 22)])));
        assert!(t.marker_intersection(&vs(&[(12, 18)])).is_empty());
        let mu = t.marker_union(&vs(&[(10, 20)]));
        assert_eq!(mu.vset(a.hash), Some(&vs(&[(0, 20)])));
        mu.audit().unwrap();
    }

    #[test]
    fn unbounded_keys() {
        let a = MarkedKey::unmarked(hash_object(b"a"));
        let b = key("b", &[(NI, 0)]);
        let mut t = MSet::new();
        t.insert(a.clone());
        t.insert(b.clone());
        assert_eq!(t.hash_at_marker(Marker::NEG_INF), a.hash + b.hash);
        assert_eq!(t.hash_at_marker(0), a.hash);
        assert_eq!(t.hash_at_marker(PI - 1), a.hash);
        assert_eq!(t.reduce_mset().len(), 2);
        t.audit().unwrap();
    }

    #[test]
    fn shrinking_a_key() {
        let h = hash_object(b"k");
        let mut t = MSet::new();
        t.add_valid_region(h, 5, 9).unwrap();
        // replace [5,9) by [0,5): the marker 5 flips from opening to closing
        t.set_vset(h, vs(&[(0, 5)]));
        t.audit().unwrap();
        assert_eq!(t.hash_at_marker(2), h);
        assert_eq!(t.hash_at_marker(6), HashValue::NULL);
    }

    #[test]
    fn dump_format() {
        let t: MSet = [key("a", &[(0, 10)])].into_iter().collect();
        let dump = t.debug_dump();
        let mut lines = dump.lines();
        let h = hash_object(b"a");
        assert_eq!(lines.next(), Some(format!("0\t{h}").as_str()));
        assert_eq!(lines.next(), Some(format!("10\t{}", -h).as_str()));
        for l in lines {
            assert!(l.starts_with("level "));
            assert!(l.contains("head="));
        }
    }
}
