//! The hash domain `H_N = {0, .., N-1}` with `N = 2^128 - 159`, the largest
//! prime below `2^128`.
//!
//! Hashes combine through [`reduce`], which is addition modulo `N`. Because
//! `N` is prime, addition forms a group: reduction is order invariant,
//! flattens nested reductions, and every hash has an inverse ([`negate`]).
//! [`rehash`] scrambles a hash while keeping the null hash fixed, which
//! freezes the invariance of one level of reduction before it is fed into
//! another.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use md5::{Digest, Md5};
use serde::{Deserialize, Serialize};

/// The field modulus `2^128 - 159`.
pub const MODULUS: u128 = u128::MAX - 158;

/// An element of `H_N`. The value `0` is the null hash.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct HashValue(u128);

impl HashValue {
    /// The null hash, identity of [`reduce`] and fixed point of [`rehash`].
    pub const NULL: HashValue = HashValue(0);

    /// Builds a hash from an integer, reducing it into `H_N`.
    pub const fn new(value: u128) -> Self {
        if value >= MODULUS {
            HashValue(value - MODULUS)
        } else {
            HashValue(value)
        }
    }

    pub const fn value(self) -> u128 {
        self.0
    }

    pub const fn is_null(self) -> bool {
        self.0 == 0
    }

    /// 16-byte big-endian encoding, the serialization fed to [`rehash`].
    pub fn to_be_bytes(self) -> [u8; 16] {
        self.0.to_be_bytes()
    }

    /// 32 lowercase hex digits, big-endian.
    pub fn to_hex(self) -> String {
        format!("{:032x}", self.0)
    }

    /// Parses 1 to 32 hex digits. Values at or above `N` are rejected.
    pub fn from_hex(s: &str) -> Result<Self, ParseHashError> {
        if s.is_empty() || s.len() > 32 {
            return Err(ParseHashError::Length(s.len()));
        }
        let v = u128::from_str_radix(s, 16).map_err(|_| ParseHashError::Digit)?;
        if v >= MODULUS {
            return Err(ParseHashError::OutOfField);
        }
        Ok(HashValue(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseHashError {
    #[error("expected 1 to 32 hex digits, got {0} characters")]
    Length(usize),
    #[error("invalid hex digit")]
    Digit,
    #[error("value is not below the field modulus")]
    OutOfField,
}

impl FromStr for HashValue {
    type Err = ParseHashError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HashValue::from_hex(s)
    }
}

impl fmt::Debug for HashValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HashValue({:032x})", self.0)
    }
}

impl fmt::Display for HashValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

impl From<u64> for HashValue {
    fn from(v: u64) -> Self {
        HashValue(v as u128)
    }
}

#[inline]
const fn add_mod(a: u128, b: u128) -> u128 {
    // a, b < N so the true sum is below 2N; one conditional subtraction
    // suffices, and on overflow the wrapped subtraction yields sum - N.
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= MODULUS {
        s.wrapping_sub(MODULUS)
    } else {
        s
    }
}

impl Add for HashValue {
    type Output = HashValue;

    #[inline]
    fn add(self, rhs: HashValue) -> HashValue {
        HashValue(add_mod(self.0, rhs.0))
    }
}

impl AddAssign for HashValue {
    #[inline]
    fn add_assign(&mut self, rhs: HashValue) {
        *self = *self + rhs;
    }
}

impl Neg for HashValue {
    type Output = HashValue;

    #[inline]
    fn neg(self) -> HashValue {
        negate(self)
    }
}

impl Sub for HashValue {
    type Output = HashValue;

    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: HashValue) -> HashValue {
        self + negate(rhs)
    }
}

impl SubAssign for HashValue {
    #[inline]
    fn sub_assign(&mut self, rhs: HashValue) {
        *self = *self - rhs;
    }
}

impl Sum for HashValue {
    fn sum<I: Iterator<Item = HashValue>>(iter: I) -> HashValue {
        iter.fold(HashValue::NULL, Add::add)
    }
}

impl<'a> Sum<&'a HashValue> for HashValue {
    fn sum<I: Iterator<Item = &'a HashValue>>(iter: I) -> HashValue {
        iter.copied().sum()
    }
}

/// MD5 of `bytes`, read as a big-endian 128-bit integer and reduced mod `N`.
pub fn hash_object(bytes: &[u8]) -> HashValue {
    let digest = Md5::digest(bytes);
    let mut raw = [0u8; 16];
    raw.copy_from_slice(&digest);
    HashValue::new(u128::from_be_bytes(raw))
}

/// Hashes a composite object. Each component is prefixed with its length as
/// an 8-byte big-endian integer, so distinct component lists never collide
/// at the byte level.
pub fn hash_parts<I, B>(parts: I) -> HashValue
where
    I: IntoIterator<Item = B>,
    B: AsRef<[u8]>,
{
    hash_object(&encode_parts(parts))
}

/// The length-prefixed concatenation used by [`hash_parts`].
pub fn encode_parts<I, B>(parts: I) -> Vec<u8>
where
    I: IntoIterator<Item = B>,
    B: AsRef<[u8]>,
{
    let mut out = Vec::new();
    for part in parts {
        let part = part.as_ref();
        out.extend_from_slice(&(part.len() as u64).to_be_bytes());
        out.extend_from_slice(part);
    }
    out
}

/// Sum of all inputs modulo `N`. The empty reduction is the null hash.
pub fn reduce<I>(hashes: I) -> HashValue
where
    I: IntoIterator<Item = HashValue>,
{
    hashes.into_iter().sum()
}

/// Additive inverse: `0` maps to `0`, anything else to `N - h`.
#[inline]
pub const fn negate(h: HashValue) -> HashValue {
    if h.0 == 0 {
        h
    } else {
        HashValue(MODULUS - h.0)
    }
}

/// `hash(h) - hash(null)`, so the null hash stays null.
pub fn rehash(h: HashValue) -> HashValue {
    hash_object(&h.to_be_bytes()) - null_digest()
}

fn null_digest() -> HashValue {
    use std::sync::OnceLock;
    static NULL_DIGEST: OnceLock<HashValue> = OnceLock::new();
    *NULL_DIGEST.get_or_init(|| hash_object(&HashValue::NULL.to_be_bytes()))
}

/// `r * h mod N`, the reduction of `r` copies of `h`.
pub fn scalar_mul(r: u128, h: HashValue) -> HashValue {
    let mut acc = HashValue::NULL;
    let mut base = h;
    let mut r = r % MODULUS;
    while r != 0 {
        if r & 1 == 1 {
            acc += base;
        }
        base += base;
        r >>= 1;
    }
    acc
}
