//! Marker validity sets.
//!
//! A [`ValiditySet`] is a sorted list of disjoint, non-touching half-open
//! intervals `[lo, hi)` on a signed 64-bit marker axis. `i64::MIN` and
//! `i64::MAX` stand for `-inf` and `+inf`. Touching intervals are merged, so
//! every point set has exactly one representation and structural equality is
//! set equality.
//!
//! A [`MarkedKey`] pairs a hash with a validity set; outside its set the key
//! evaluates to the null hash.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::hashspace::HashValue;

/// A position on the marker axis.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Marker(pub i64);

impl Marker {
    pub const NEG_INF: Marker = Marker(i64::MIN);
    pub const POS_INF: Marker = Marker(i64::MAX);

    pub const fn get(self) -> i64 {
        self.0
    }

    pub const fn is_finite(self) -> bool {
        self.0 != i64::MIN && self.0 != i64::MAX
    }
}

impl From<i64> for Marker {
    fn from(v: i64) -> Self {
        Marker(v)
    }
}

impl fmt::Debug for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Marker::NEG_INF => f.write_str("-inf"),
            Marker::POS_INF => f.write_str("inf"),
            Marker(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid marker `{0}`")]
pub struct ParseMarkerError(pub String);

impl FromStr for Marker {
    type Err = ParseMarkerError;

    /// Accepts integers and the tokens `-inf`, `inf`, `+inf`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "-inf" => Ok(Marker::NEG_INF),
            "inf" | "+inf" => Ok(Marker::POS_INF),
            _ => s
                .parse::<i64>()
                .map(Marker)
                .map_err(|_| ParseMarkerError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntervalError {
    #[error("empty interval [{lo},{hi}): lower bound must be below upper bound")]
    Empty { lo: Marker, hi: Marker },
    #[error("validity set is empty")]
    EmptySet,
}

/// Sorted, disjoint, merged half-open marker intervals.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ValiditySet {
    intervals: Vec<(Marker, Marker)>,
}

impl ValiditySet {
    /// Valid nowhere.
    pub fn empty() -> Self {
        ValiditySet::default()
    }

    /// Valid everywhere, `[-inf, inf)`.
    pub fn unmarked() -> Self {
        ValiditySet {
            intervals: vec![(Marker::NEG_INF, Marker::POS_INF)],
        }
    }

    pub fn interval(lo: impl Into<Marker>, hi: impl Into<Marker>) -> Result<Self, IntervalError> {
        let (lo, hi) = (lo.into(), hi.into());
        if lo >= hi {
            return Err(IntervalError::Empty { lo, hi });
        }
        Ok(ValiditySet {
            intervals: vec![(lo, hi)],
        })
    }

    /// Builds a set from arbitrary, possibly overlapping or unsorted pairs.
    /// Pairs with `lo >= hi` are rejected.
    pub fn from_intervals<I, M>(pairs: I) -> Result<Self, IntervalError>
    where
        I: IntoIterator<Item = (M, M)>,
        M: Into<Marker>,
    {
        let mut v: Vec<(Marker, Marker)> = Vec::new();
        for (lo, hi) in pairs {
            let (lo, hi) = (lo.into(), hi.into());
            if lo >= hi {
                return Err(IntervalError::Empty { lo, hi });
            }
            v.push((lo, hi));
        }
        v.sort_unstable();
        Ok(ValiditySet {
            intervals: coalesce_sorted(v),
        })
    }

    /// Appends `[lo, hi)` where `lo` is at or past the current last upper
    /// bound. Touching intervals merge. Used by left-to-right sweeps.
    pub(crate) fn push_back(&mut self, lo: Marker, hi: Marker) {
        debug_assert!(lo < hi);
        if let Some(last) = self.intervals.last_mut() {
            debug_assert!(last.1 <= lo);
            if last.1 == lo {
                last.1 = hi;
                return;
            }
        }
        self.intervals.push((lo, hi));
    }

    pub fn intervals(&self) -> &[(Marker, Marker)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_unmarked(&self) -> bool {
        self.intervals == [(Marker::NEG_INF, Marker::POS_INF)]
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_valid(&self, m: impl Into<Marker>) -> bool {
        let m = m.into();
        // First interval whose upper bound lies beyond m.
        let i = self.intervals.partition_point(|&(_, hi)| hi <= m);
        self.intervals.get(i).is_some_and(|&(lo, _)| lo <= m)
    }

    pub fn add_interval(
        &self,
        lo: impl Into<Marker>,
        hi: impl Into<Marker>,
    ) -> Result<Self, IntervalError> {
        Ok(self.union(&ValiditySet::interval(lo, hi)?))
    }

    pub fn clear_interval(
        &self,
        lo: impl Into<Marker>,
        hi: impl Into<Marker>,
    ) -> Result<Self, IntervalError> {
        Ok(self.difference(&ValiditySet::interval(lo, hi)?))
    }

    pub fn union(&self, other: impl AsRef<ValiditySet>) -> ValiditySet {
        combine(self, other.as_ref(), |a, b| a || b)
    }

    pub fn intersection(&self, other: impl AsRef<ValiditySet>) -> ValiditySet {
        combine(self, other.as_ref(), |a, b| a && b)
    }

    pub fn difference(&self, other: impl AsRef<ValiditySet>) -> ValiditySet {
        combine(self, other.as_ref(), |a, b| a && !b)
    }

    /// `[-inf, inf)` minus this set.
    pub fn complement(&self) -> ValiditySet {
        ValiditySet::unmarked().difference(self)
    }

    /// Lowest valid marker.
    pub fn min(&self) -> Result<Marker, IntervalError> {
        self.intervals
            .first()
            .map(|&(lo, _)| lo)
            .ok_or(IntervalError::EmptySet)
    }

    /// Upper bound of the last interval: the least marker at and beyond
    /// which nothing is valid.
    pub fn max(&self) -> Result<Marker, IntervalError> {
        self.intervals
            .last()
            .map(|&(_, hi)| hi)
            .ok_or(IntervalError::EmptySet)
    }

    /// All interval endpoints in increasing order. Endpoints are distinct
    /// because intervals never touch.
    pub fn breakpoints(&self) -> Vec<Marker> {
        self.intervals
            .iter()
            .flat_map(|&(lo, hi)| [lo, hi])
            .collect()
    }
}

impl AsRef<ValiditySet> for ValiditySet {
    fn as_ref(&self) -> &ValiditySet {
        self
    }
}

impl fmt::Debug for ValiditySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ValiditySet({self})")
    }
}

/// `[a1,b1) [a2,b2) ...`, or `(empty)`.
impl fmt::Display for ValiditySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("(empty)");
        }
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "[{lo},{hi})")?;
        }
        Ok(())
    }
}

fn coalesce_sorted(v: Vec<(Marker, Marker)>) -> Vec<(Marker, Marker)> {
    let mut out: Vec<(Marker, Marker)> = Vec::with_capacity(v.len());
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Pointwise boolean combination of two sets in a single merge pass.
fn combine(a: &ValiditySet, b: &ValiditySet, op: impl Fn(bool, bool) -> bool) -> ValiditySet {
    let ea = a.breakpoints();
    let eb = b.breakpoints();
    let (mut i, mut j) = (0, 0);
    // Even number of endpoints passed means "outside".
    let mut out = ValiditySet::empty();
    let mut open: Option<Marker> = None;
    while i < ea.len() || j < eb.len() {
        let x = match (ea.get(i), eb.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        if ea.get(i) == Some(&x) {
            i += 1;
        }
        if eb.get(j) == Some(&x) {
            j += 1;
        }
        let inside = op(i % 2 == 1, j % 2 == 1);
        match (open, inside) {
            (None, true) => open = Some(x),
            (Some(lo), false) => {
                out.push_back(lo, x);
                open = None;
            }
            _ => {}
        }
    }
    debug_assert!(open.is_none());
    out
}

/// A hash paired with the markers at which it is valid.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkedKey {
    pub hash: HashValue,
    pub vset: ValiditySet,
}

impl MarkedKey {
    pub fn new(hash: HashValue, vset: ValiditySet) -> Self {
        MarkedKey { hash, vset }
    }

    /// Valid everywhere.
    pub fn unmarked(hash: HashValue) -> Self {
        MarkedKey::new(hash, ValiditySet::unmarked())
    }

    /// `hash` if valid at `m`, otherwise the null hash.
    pub fn value_at(&self, m: impl Into<Marker>) -> HashValue {
        if self.vset.is_valid(m) {
            self.hash
        } else {
            HashValue::NULL
        }
    }

    pub fn is_valid(&self, m: impl Into<Marker>) -> bool {
        self.vset.is_valid(m)
    }

    pub fn add_interval(
        &self,
        lo: impl Into<Marker>,
        hi: impl Into<Marker>,
    ) -> Result<Self, IntervalError> {
        Ok(MarkedKey::new(self.hash, self.vset.add_interval(lo, hi)?))
    }

    pub fn clear_interval(
        &self,
        lo: impl Into<Marker>,
        hi: impl Into<Marker>,
    ) -> Result<Self, IntervalError> {
        Ok(MarkedKey::new(self.hash, self.vset.clear_interval(lo, hi)?))
    }

    /// Keeps this key's hash.
    pub fn union(&self, other: &MarkedKey) -> MarkedKey {
        MarkedKey::new(self.hash, self.vset.union(other))
    }

    pub fn intersection(&self, other: &MarkedKey) -> MarkedKey {
        MarkedKey::new(self.hash, self.vset.intersection(other))
    }

    pub fn difference(&self, other: &MarkedKey) -> MarkedKey {
        MarkedKey::new(self.hash, self.vset.difference(other))
    }

    pub fn min(&self) -> Result<Marker, IntervalError> {
        self.vset.min()
    }

    pub fn max(&self) -> Result<Marker, IntervalError> {
        self.vset.max()
    }
}

impl AsRef<ValiditySet> for MarkedKey {
    fn as_ref(&self) -> &ValiditySet {
        &self.vset
    }
}

impl fmt::Debug for MarkedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MarkedKey({} @ {})", self.hash, self.vset)
    }
}
