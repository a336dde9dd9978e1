//! Brute-force reference implementations for differential testing.
//!
//! Everything here is deliberately naive: per-marker scans, boolean arrays
//! over a finite window, and sorted string encodings for graphs. Reduction
//! sums hash values as big integers and takes a single remainder at the end,
//! so it shares no arithmetic with [`crate::hashspace`].

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::hashspace::{HashValue, MODULUS};
use crate::ibdgraph::IbdGraph;
use crate::intervals::{MarkedKey, Marker};

/// Widest window the dense helpers accept.
pub const MAX_WINDOW: i64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("windows differ: [{0},{1}) vs [{2},{3})")]
    WindowMismatch(i64, i64, i64, i64),
    #[error("window [{0},{1}) is empty or wider than {MAX_WINDOW}")]
    BadWindow(i64, i64),
}

/// One value per integer marker in `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseWindow<T> {
    pub lo: i64,
    pub hi: i64,
    pub values: Vec<T>,
}

impl<T> DenseWindow<T> {
    pub fn from_fn(lo: i64, hi: i64, f: impl FnMut(i64) -> T) -> Result<Self, OracleError> {
        if lo >= hi || hi - lo > MAX_WINDOW {
            return Err(OracleError::BadWindow(lo, hi));
        }
        Ok(DenseWindow {
            lo,
            hi,
            values: (lo..hi).map(f).collect(),
        })
    }

    pub fn get(&self, m: i64) -> &T {
        &self.values[(m - self.lo) as usize]
    }

    pub fn markers(&self) -> std::ops::Range<i64> {
        self.lo..self.hi
    }
}

/// Membership of `m` in a list of `[lo, hi)` pairs, by linear scan.
pub fn naive_contains(intervals: &[(Marker, Marker)], m: Marker) -> bool {
    intervals.iter().any(|&(lo, hi)| lo <= m && m < hi)
}

/// Samples interval membership at every integer marker of the window.
pub fn naive_membership(
    intervals: &[(Marker, Marker)],
    lo: i64,
    hi: i64,
) -> Result<DenseWindow<bool>, OracleError> {
    DenseWindow::from_fn(lo, hi, |m| naive_contains(intervals, Marker(m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

pub fn naive_set_op(
    a: &DenseWindow<bool>,
    b: &DenseWindow<bool>,
    op: SetOp,
) -> Result<DenseWindow<bool>, OracleError> {
    if a.lo != b.lo || a.hi != b.hi {
        return Err(OracleError::WindowMismatch(a.lo, a.hi, b.lo, b.hi));
    }
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(&x, &y)| match op {
            SetOp::Union => x || y,
            SetOp::Intersection => x && y,
            SetOp::Difference => x && !y,
        })
        .collect();
    Ok(DenseWindow {
        lo: a.lo,
        hi: a.hi,
        values,
    })
}

/// Sum of arbitrary hash values taken as integers, reduced once.
pub fn naive_sum<I>(hashes: I) -> HashValue
where
    I: IntoIterator<Item = HashValue>,
{
    let total: BigUint = hashes.into_iter().map(|h| BigUint::from(h.value())).sum();
    let rem = total % BigUint::from(MODULUS);
    HashValue::new(u128::try_from(rem).expect("below modulus"))
}

/// Additive inverse computed as `(N - h) mod N` on big integers.
pub fn naive_negate(h: HashValue) -> HashValue {
    let n = BigUint::from(MODULUS);
    let r = (n.clone() - BigUint::from(h.value())) % n;
    HashValue::new(u128::try_from(r).expect("below modulus"))
}

/// Reduction of every key valid at `m`, by direct scan.
pub fn naive_reduce_at(keys: &[MarkedKey], m: Marker) -> HashValue {
    naive_sum(
        keys.iter()
            .filter(|k| naive_contains(k.vset.intervals(), m))
            .map(|k| k.hash),
    )
}

/// Reduction at every integer marker of the window.
pub fn naive_reduce_window(
    keys: &[MarkedKey],
    lo: i64,
    hi: i64,
) -> Result<DenseWindow<HashValue>, OracleError> {
    DenseWindow::from_fn(lo, hi, |m| naive_reduce_at(keys, Marker(m)))
}

/// Hashes valid at `m`, sorted.
pub fn naive_snapshot(keys: &[MarkedKey], m: Marker) -> Vec<HashValue> {
    let mut out: Vec<HashValue> = keys
        .iter()
        .filter(|k| naive_contains(k.vset.intervals(), m))
        .map(|k| k.hash)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Number of distinct non-empty graph configurations over every graph and
/// every constant piece starting inside `[lo, hi)`. A graph's pieces start at
/// `lo` and at each of its breakpoints.
pub fn naive_unique_graphs(graphs: &[IbdGraph], lo: Marker, hi: Marker) -> usize {
    let empty = IbdGraph::new("").canonical_form(lo);
    let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
    for g in graphs {
        let mut starts: Vec<Marker> = vec![lo];
        for n in &g.nodes {
            for v in n.edges.values() {
                for &(a, b) in v.intervals() {
                    starts.extend([a, b]);
                }
            }
        }
        for m in starts {
            if m >= lo && m < hi {
                let form = g.canonical_form(m);
                if form != empty {
                    seen.insert(form);
                }
            }
        }
    }
    seen.len()
}
