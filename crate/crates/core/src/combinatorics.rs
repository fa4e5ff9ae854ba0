//! Binomial coefficients and multi-index enumeration.
//!
//! All monomial bases in the crate use graded-lex order: indices are sorted
//! by total degree and, within a degree, lexicographically ascending as
//! tuples. For `n = 2` and degree at most 2 that is
//! `(0,0), (0,1), (1,0), (0,2), (1,1), (2,0)`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// Binomial coefficient `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binom(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::from(0u32);
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient with a possibly negative top argument; zero whenever
/// `n < 0`. Used by Hilbert-function evaluations at negative degrees.
pub fn binom_i(n: i64, k: i64) -> BigUint {
    if n < 0 {
        BigUint::from(0u32)
    } else {
        binom(n as u64, k)
    }
}

/// Binomial as a `usize`; panics if it does not fit. Only meant for basis
/// sizes, which are always small enough to allocate.
pub fn basis_size(n: usize, degree: u32) -> usize {
    let b = binom(n as u64 + degree as u64, n as i64);
    usize::try_from(b).expect("basis size overflows usize")
}

/// Exponent vector `(α₁, …, αₙ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `e_i`, the unit index in coordinate `i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise partial order `α ≤ β`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    AtMost,
    Exactly,
}

/// Enumerates multi-indices of dimension `n` with `|α| ≤ d` or `|α| = d`
/// in graded-lex order.
pub fn enum_multi_indices(n: usize, d: u32, mode: DegreeMode) -> Vec<MultiIndex> {
    assert!(n >= 1, "dimension must be at least 1");
    let mut out = Vec::new();
    let lo = match mode {
        DegreeMode::AtMost => 0,
        DegreeMode::Exactly => d,
    };
    let mut buf = vec![0u32; n];
    for deg in lo..=d {
        fill_exact(&mut buf, 0, deg, &mut out);
    }
    out
}

fn fill_exact(buf: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for a in 0..=remaining {
        buf[pos] = a;
        fill_exact(buf, pos + 1, remaining - a, out);
    }
}

/// Graded-lex monomial basis of degree at most `degree` together with a
/// reverse lookup table.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    n: usize,
    degree: u32,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, degree: u32) -> Self {
        let indices = enum_multi_indices(n, degree, DegreeMode::AtMost);
        let position = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        MonomialBasis {
            n,
            degree,
            indices,
            position,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.position.get(alpha).copied()
    }
}
