//! Sparse univariate rings `R = ℝ[t^{d₁}, …, t^{d_r}]`: numerical semigroup
//! invariants, Descartes numbers and the resulting Carathéodory bounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;

/// Largest exponent set the Descartes-number search accepts.
pub const ENUMERATION_LIMIT: usize = 22;

/// Exponent semigroup of a sparse monomial ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemigroupRing {
    generators: Vec<u64>,
    conductor: u64,
    gaps: u64,
    /// Membership for exponents below the conductor.
    below_conductor: Vec<bool>,
}

impl SemigroupRing {
    /// Computes conductor and gap count by marking reachable exponents until
    /// `min(generators)` consecutive exponents are present.
    pub fn new(generators: &[u64]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidGenerators("empty generator list".into()));
        }
        if generators.contains(&0) {
            return Err(Error::InvalidGenerators("generators must be positive".into()));
        }
        let mut gens = generators.to_vec();
        gens.sort_unstable();
        gens.dedup();
        let g = gens.iter().fold(0u64, |acc, &x| acc.gcd(&x));
        if g != 1 {
            return Err(Error::GcdNotOne(g));
        }
        let smallest = gens[0];
        let mut member = vec![true];
        let mut run = 1u64;
        let mut e = 0u64;
        while run < smallest {
            e += 1;
            let reachable = gens
                .iter()
                .any(|&d| d <= e && member[(e - d) as usize]);
            member.push(reachable);
            run = if reachable { run + 1 } else { 0 };
        }
        let conductor = e + 1 - run;
        member.truncate(conductor as usize);
        let gaps = member.iter().filter(|m| !**m).count() as u64;
        Ok(SemigroupRing {
            generators: gens,
            conductor,
            gaps,
            below_conductor: member,
        })
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Smallest `c` such that every exponent `≥ c` lies in the semigroup.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Number of missing exponents.
    pub fn gaps(&self) -> u64 {
        self.gaps
    }

    pub fn contains(&self, e: u64) -> bool {
        e >= self.conductor || self.below_conductor[e as usize]
    }

    /// Semigroup elements `≤ k` in increasing order.
    pub fn exponents_upto(&self, k: u64) -> Vec<u64> {
        (0..=k).filter(|&e| self.contains(e)).collect()
    }

    /// Gap exponents in increasing order.
    pub fn gap_list(&self) -> Vec<u64> {
        (0..self.conductor).filter(|&e| !self.contains(e)).collect()
    }

    /// `dim R_{≤d}`.
    pub fn dim_upto(&self, d: u64) -> u64 {
        if d >= self.conductor {
            d + 1 - self.gaps
        } else {
            self.exponents_upto(d).len() as u64
        }
    }
}

pub fn semigroup_invariants(generators: &[u64]) -> Result<SemigroupRing> {
    SemigroupRing::new(generators)
}

/// Number of sign changes after erasing zeros.
pub fn sign_variations(signs: impl IntoIterator<Item = i8>) -> u32 {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// `Var(σ) + Var(σ with signs flipped at odd exponents)`.
pub fn descartes_count(pattern: &[(u64, i8)]) -> u32 {
    let plain = sign_variations(pattern.iter().map(|&(_, s)| s));
    let alternating = sign_variations(
        pattern
            .iter()
            .map(|&(e, s)| if e % 2 == 1 { -s } else { s }),
    );
    plain + alternating
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescartesResult {
    pub k: u64,
    pub value: u32,
    /// `(exponent, sign)` for every exponent `≤ k` of the ring.
    pub witness_signs: Vec<(u64, i8)>,
}

/// State after a prefix of the sign pattern: the last nonzero sign and the
/// parity of its exponent.
fn state_index(sign: i8, parity: u64) -> usize {
    (if sign > 0 { 2 } else { 0 }) + parity as usize
}

fn gain(prev_sign: i8, prev_parity: u64, sign: i8, exponent: u64) -> u32 {
    let flip = |s: i8, parity: u64| if parity == 1 { -s } else { s };
    u32::from(sign != prev_sign) + u32::from(flip(sign, exponent % 2) != flip(prev_sign, prev_parity))
}

/// `D_k`: the maximum of `Var(σ) + Var(σ alternated)` over sign patterns on
/// the exponents `≤ k` with `σ₀ ≠ 0`.
///
/// The maximum over all `3^{|E|}` patterns is found by dynamic programming
/// over the prefix state, which is exact because the count only depends on
/// the last nonzero sign and its exponent parity. The witness is the
/// lexicographically smallest maximizing pattern under `-1 < 0 < 1`.
pub fn descartes_number(ring: &SemigroupRing, k: u64) -> Result<DescartesResult> {
    let exps = ring.exponents_upto(k);
    if exps.len() > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            count: exps.len(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let len = exps.len();
    // best[i][state]: maximal further gain from positions i.. onward.
    let mut best = vec![[0u32; 4]; len + 1];
    for i in (1..len).rev() {
        let e = exps[i];
        for sign in [-1i8, 1] {
            for parity in 0..2u64 {
                let st = state_index(sign, parity);
                let mut m = best[i + 1][st];
                for t in [-1i8, 1] {
                    let v = gain(sign, parity, t, e) + best[i + 1][state_index(t, e % 2)];
                    m = m.max(v);
                }
                best[i][st] = m;
            }
        }
    }

    let first = if best[1][state_index(-1, 0)] >= best[1][state_index(1, 0)] {
        -1i8
    } else {
        1
    };
    let value = best[1][state_index(first, 0)];
    let mut witness = vec![(0u64, first)];
    let (mut sign, mut parity) = (first, 0u64);
    for i in 1..len {
        let e = exps[i];
        let target = best[i][state_index(sign, parity)];
        let choice = [-1i8, 0, 1]
            .into_iter()
            .find(|&t| {
                let v = if t == 0 {
                    best[i + 1][state_index(sign, parity)]
                } else {
                    gain(sign, parity, t, e) + best[i + 1][state_index(t, e % 2)]
                };
                v == target
            })
            .expect("some choice attains the optimum");
        witness.push((e, choice));
        if choice != 0 {
            sign = choice;
            parity = e % 2;
        }
    }
    Ok(DescartesResult {
        k,
        value,
        witness_signs: witness,
    })
}

/// `𝔠 − D_𝔠`, the defect of the ring at its conductor. Zero for the dense
/// ring, where `𝔠 = 0` and `D_0 = 0`.
pub fn conductor_defect(ring: &SemigroupRing) -> Result<i64> {
    let c = ring.conductor();
    let d = descartes_number(ring, c)?.value;
    Ok(c as i64 - d as i64)
}

fn require_regime(ring: &SemigroupRing, k: u64) -> Result<()> {
    if k < ring.conductor() {
        return Err(Error::OutOfRegime {
            k,
            conductor: ring.conductor(),
        });
    }
    Ok(())
}

/// Bracket for the maximal number of real zeros of a nonnegative element of
/// `R_{≤2k}`: `(k − (𝔠 − D_𝔠), k − ⌈(𝔠 − D_𝔠 − 1)/2⌉)`.
pub fn nonneg_zero_bounds(ring: &SemigroupRing, k: u64) -> Result<(u64, u64)> {
    require_regime(ring, k)?;
    let defect = conductor_defect(ring)?;
    let k = k as i64;
    let lower = k - defect;
    let upper = k - Integer::div_ceil(&(defect - 1), &2);
    Ok((lower as u64, upper as u64))
}

/// Carathéodory bounds for moment functionals on `R_{≤2k}`: some functional
/// needs at least `lower` atoms, every functional needs at most `upper`.
pub fn sparse_cara_bounds(ring: &SemigroupRing, k: u64) -> Result<(u64, u64)> {
    let (lower, zeros_upper) = nonneg_zero_bounds(ring, k)?;
    Ok((lower, zeros_upper + 1))
}

/// Rows `(p_i^e)_{e ∈ E, e ≤ degree}` of point evaluations on `R_{≤degree}`.
pub fn evaluation_matrix(ring: &SemigroupRing, degree: u64, points: &[BigRational]) -> RationalMatrix {
    let exps = ring.exponents_upto(degree);
    RationalMatrix::from_rows(
        points
            .iter()
            .map(|p| {
                exps.iter()
                    .map(|&e| if e == 0 { BigRational::one() } else { Pow::pow(p, e as u32) })
                    .collect()
            })
            .collect(),
    )
}

/// Convenience for integer points.
pub fn integer_points(xs: &[i64]) -> Vec<BigRational> {
    xs.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}
