//! Hilbert-function evaluators and the closed-form Carathéodory bounds built
//! on them.
//!
//! Everything here is a closed formula evaluated in exact arithmetic; no
//! ideal-theoretic computation takes place.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::combinatorics::{binom, binom_i};
use crate::error::{Error, Result};

/// Degree parity of the truncation: `2d` or `2d + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// 0 for even, 1 for odd.
    pub fn offset(self) -> u64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(Error::InvalidArgument(format!("unknown parity '{other}'"))),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// `ℝⁿ` (grid `{1,…,d}ⁿ`) or the cube `[0,1]ⁿ` (grid `{0,…,d}ⁿ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Rn,
    Cube,
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rn" => Ok(Domain::Rn),
            "cube" => Ok(Domain::Cube),
            other => Err(Error::InvalidArgument(format!("unknown domain '{other}'"))),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Rn => "rn",
            Domain::Cube => "cube",
        })
    }
}

/// A Hilbert function for a fixed geometric scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HilbertProfile {
    /// `HF(j) = C(n + j, n)`.
    ProjectiveSpace(u64),
    /// Quotient of `base` by a regular sequence of `count` forms of degree
    /// `degree`.
    RegularQuotient {
        base: Box<HilbertProfile>,
        count: u64,
        degree: u64,
    },
    /// A Hilbert polynomial given by its coefficients, constant term first.
    Polynomial(Vec<BigRational>),
    /// The unit sphere in `ℝⁿ`, i.e. the quadric `x₀² = x₁² + ⋯ + xₙ²`.
    Sphere(u64),
}

impl HilbertProfile {
    /// Integer-valued polynomial profile. Rejects coefficient lists that do
    /// not take integer values on the integers.
    pub fn polynomial(coefficients: Vec<BigRational>) -> Result<Self> {
        let p = HilbertProfile::Polynomial(coefficients);
        let HilbertProfile::Polynomial(ref c) = p else { unreachable!() };
        for j in 0..=c.len() as i64 {
            if !eval_rational(c, j).is_integer() {
                return Err(Error::InvalidArgument(format!(
                    "polynomial is not integer-valued at {j}"
                )));
            }
        }
        Ok(p)
    }

    /// Integer-coefficient polynomial, constant term first.
    pub fn polynomial_i64(coefficients: &[i64]) -> Self {
        HilbertProfile::Polynomial(
            coefficients
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn regular_quotient(base: HilbertProfile, count: u64, degree: u64) -> Self {
        HilbertProfile::RegularQuotient {
            base: Box::new(base),
            count,
            degree,
        }
    }

    /// Value at degree `j`; zero for `j < 0`.
    pub fn eval(&self, j: i64) -> BigInt {
        if j < 0 {
            return BigInt::zero();
        }
        match self {
            HilbertProfile::ProjectiveSpace(n) => binom(n + j as u64, *n as i64).into(),
            HilbertProfile::RegularQuotient {
                base,
                count,
                degree,
            } => hf_regular_quotient(base, *count, *degree, j),
            HilbertProfile::Polynomial(c) => eval_rational(c, j).to_integer(),
            HilbertProfile::Sphere(n) => sphere_hilbert(*n, j as u64),
        }
    }
}

fn eval_rational(c: &[BigRational], j: i64) -> BigRational {
    let x = BigRational::from_integer(j.into());
    c.iter()
        .rev()
        .fold(BigRational::zero(), |acc, a| acc * &x + a)
}

/// `Σ_{i=0}^{r} (−1)^i C(r, i) HF_base(j − i·d)`.
pub fn hf_regular_quotient(base: &HilbertProfile, r: u64, d: u64, j: i64) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..=r {
        let shifted = j - (i * d) as i64;
        if shifted < 0 {
            break;
        }
        let term = BigInt::from(binom(r, i as i64)) * base.eval(shifted);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `C(n + j − 1, j) + C(n + j − 2, j − 1)`.
pub fn sphere_hilbert(n: u64, j: u64) -> BigInt {
    let j = j as i64;
    let n = n as i64;
    BigInt::from(binom_i(n + j - 1, j)) + BigInt::from(binom_i(n + j - 2, j - 1))
}

/// Carathéodory number of the grid witness functional: the Hilbert function
/// of `ℙⁿ` modulo `n` forms of degree `d` (ℝⁿ) or `d + 1` (cube), at degree
/// `2d` or `2d + 1`.
pub fn grid_cara_closed_form(n: u64, d: u64, parity: Parity, domain: Domain) -> BigInt {
    let b = |top: u64, k: u64| BigInt::from(binom(top, k as i64));
    let nn = BigInt::from(n);
    let leading = match (domain, parity) {
        (Domain::Rn, Parity::Even) => b(n + 2 * d, n) - &nn * b(n + d, n) + b(n, 2),
        (Domain::Rn, Parity::Odd) => {
            b(n + 2 * d + 1, n) - &nn * b(n + d + 1, n) + BigInt::from(3) * b(n + 1, 3)
        }
        (Domain::Cube, Parity::Even) => b(n + 2 * d, n) - &nn * b(n + d - 1, n),
        (Domain::Cube, Parity::Odd) => b(n + 2 * d + 1, n) - &nn * b(n + d, n),
    };
    leading + grid_tail(n, d, parity, domain)
}

/// Terms of the alternating Hilbert-function sum not covered by the three
/// leading binomials. Zero except for odd degree on ℝⁿ with `d = 1`, where
/// `j − 3d = 0` and `−C(n, 3)` survives.
fn grid_tail(n: u64, d: u64, parity: Parity, domain: Domain) -> BigInt {
    let (form_degree, first) = match domain {
        Domain::Rn => (d, 3),
        Domain::Cube => (d + 1, 2),
    };
    let j = (2 * d + parity.offset()) as i64;
    let mut acc = BigInt::zero();
    for i in first..=n {
        let shifted = j - (i * form_degree) as i64;
        if shifted < 0 {
            break;
        }
        let term = BigInt::from(binom(n, i as i64)) * BigInt::from(binom(n + shifted as u64, n as i64));
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Closed form divided by the full basis dimension `C(n + 2d + k, n)`.
pub fn asymptotic_ratio(n: u64, d: u64, parity: Parity, domain: Domain) -> BigRational {
    let full = BigInt::from(binom(n + 2 * d + parity.offset(), n as i64));
    BigRational::new(grid_cara_closed_form(n, d, parity, domain), full)
}

/// `1 − k / 2^k`, the limit of the ratio as `d → ∞`.
pub fn ratio_limit(k: u64) -> BigRational {
    let pow = BigInt::one() << k as usize;
    BigRational::one() - BigRational::new(BigInt::from(k), pow)
}

/// Lower/upper pair with a note on where it is valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub lower: BigInt,
    pub upper: BigInt,
    /// True when the pair is self-consistent (`0 ≤ lower ≤ upper`). False
    /// values signal that `d` is below the regime where the bounds hold.
    pub consistent: bool,
    pub regime_note: String,
}

impl BoundReport {
    fn new(lower: BigInt, upper: BigInt, note: &str) -> Self {
        let consistent = !lower.is_negative() && !upper.is_negative() && lower <= upper;
        let regime_note = if consistent {
            note.to_string()
        } else {
            format!("{note}; regime violated: lower={lower}, upper={upper}")
        };
        BoundReport {
            lower,
            upper,
            consistent,
            regime_note,
        }
    }
}

/// Bounds for functionals on `ℝ[X]_{≤2d}` for an irreducible variety of
/// dimension `k` with Hilbert polynomial `profile`:
/// lower `P(2d) − k·P(d) + C(k, 2)`, upper `P(2d) − 1`.
pub fn variety_bounds(profile: &HilbertProfile, k: u64, d: u64) -> Result<BoundReport> {
    if k == 0 || d == 0 {
        return Err(Error::InvalidArgument("variety bounds need k >= 1 and d >= 1".into()));
    }
    let p2d = profile.eval(2 * d as i64);
    let pd = profile.eval(d as i64);
    let lower = &p2d - BigInt::from(k) * pd + BigInt::from(binom(k, 2));
    let upper = p2d - 1;
    Ok(BoundReport::new(
        lower,
        upper,
        "valid for sufficiently large d only; no effective threshold is known",
    ))
}

/// Bounds `(d·e, d·e + 1)` for a smooth compact curve of degree `e`.
pub fn curve_bounds(e: u64, d: u64) -> Result<BoundReport> {
    if e == 0 || d == 0 {
        return Err(Error::InvalidArgument("curve bounds need e >= 1 and d >= 1".into()));
    }
    let lower = BigInt::from(d) * BigInt::from(e);
    let upper = &lower + 1;
    Ok(BoundReport::new(
        lower,
        upper,
        "valid for sufficiently large d only; no effective threshold is known",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn regular_quotient_examples() {
        let line = HilbertProfile::ProjectiveSpace(1);
        assert_eq!(hf_regular_quotient(&line, 1, 2, 3), int(2));

        let plane = HilbertProfile::ProjectiveSpace(2);
        assert_eq!(hf_regular_quotient(&plane, 2, 3, 6), int(9));

        // Both sides of the HF(2d) identity for (n, d) = (3, 2).
        let p3 = HilbertProfile::ProjectiveSpace(3);
        let lhs = hf_regular_quotient(&p3, 3, 2, 4);
        let rhs = int(35) - int(3) * int(10) + int(3);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, int(8));
    }

    #[test]
    fn zero_count_is_identity_and_negative_degrees_vanish() {
        for base in [
            HilbertProfile::ProjectiveSpace(3),
            HilbertProfile::Sphere(4),
            HilbertProfile::polynomial_i64(&[1, 2, 3]),
        ] {
            for j in -3..12 {
                assert_eq!(hf_regular_quotient(&base, 0, 5, j), base.eval(j));
            }
            assert_eq!(base.eval(-1), int(0));
        }
        assert_eq!(HilbertProfile::ProjectiveSpace(4).eval(0), int(1));
        assert_eq!(HilbertProfile::Sphere(4).eval(0), int(1));
    }

    #[test]
    fn grid_closed_form_examples() {
        for d in 2..=4 {
            assert_eq!(grid_cara_closed_form(2, d, Parity::Even, Domain::Rn), int((d * d) as i64));
        }
        for d in 1..=10 {
            assert_eq!(grid_cara_closed_form(1, d, Parity::Even, Domain::Cube), int(d as i64 + 1));
            assert_eq!(grid_cara_closed_form(1, d, Parity::Odd, Domain::Cube), int(d as i64 + 1));
            assert_eq!(grid_cara_closed_form(1, d, Parity::Even, Domain::Rn), int(d as i64));
            assert_eq!(grid_cara_closed_form(1, d, Parity::Odd, Domain::Rn), int(d as i64));
            assert_eq!(
                grid_cara_closed_form(2, d, Parity::Even, Domain::Cube),
                int(((d + 1) * (d + 1)) as i64)
            );
        }
        assert_eq!(grid_cara_closed_form(5, 2, Parity::Even, Domain::Rn), int(31));
    }

    #[test]
    fn odd_degree_single_point_grid() {
        // {1}ⁿ is one point; the three-binomial expansion alone would give
        // 2 for n = 3 and 5 for n = 4.
        for n in 1..=8 {
            assert_eq!(grid_cara_closed_form(n, 1, Parity::Odd, Domain::Rn), int(1));
            assert_eq!(grid_cara_closed_form(n, 1, Parity::Even, Domain::Rn), int(1));
        }
        for n in 1..=6u64 {
            for d in 2..=6 {
                assert!(grid_tail(n, d, Parity::Odd, Domain::Rn).is_zero());
                assert!(grid_tail(n, d, Parity::Odd, Domain::Cube).is_zero());
                assert!(grid_tail(n, d, Parity::Even, Domain::Cube).is_zero());
            }
        }
    }

    #[test]
    fn closed_forms_match_regular_quotient() {
        for n in 1..=6u64 {
            let pn = HilbertProfile::ProjectiveSpace(n);
            for d in 1..=6u64 {
                for parity in [Parity::Even, Parity::Odd] {
                    let j = (2 * d + parity.offset()) as i64;
                    assert_eq!(
                        grid_cara_closed_form(n, d, parity, Domain::Rn),
                        hf_regular_quotient(&pn, n, d, j),
                        "rn n={n} d={d} {parity}"
                    );
                    assert_eq!(
                        grid_cara_closed_form(n, d, parity, Domain::Cube),
                        hf_regular_quotient(&pn, n, d + 1, j),
                        "cube n={n} d={d} {parity}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_below_grid_size() {
        for n in 1..=6u64 {
            for d in 1..=6u64 {
                let c = grid_cara_closed_form(n, d, Parity::Even, Domain::Rn);
                assert!(c <= BigInt::from(d).pow(n as u32), "n={n} d={d}");
            }
        }
        // Equality cases at small d and the first strict one.
        assert_eq!(grid_cara_closed_form(3, 2, Parity::Even, Domain::Rn), int(8));
        assert_eq!(grid_cara_closed_form(4, 2, Parity::Even, Domain::Rn), int(16));
        assert_eq!(grid_cara_closed_form(5, 2, Parity::Even, Domain::Rn), int(31));
    }

    #[test]
    fn sphere_examples() {
        for d in 0..=20u64 {
            assert_eq!(sphere_hilbert(3, d), BigInt::from((d + 1) * (d + 1)));
        }
        assert_eq!(sphere_hilbert(2, 3), int(7));
        for n in 2..8 {
            assert_eq!(sphere_hilbert(n, 0), int(1));
        }
    }

    #[test]
    fn sphere_bounds() {
        for d in 1..=10u64 {
            let r = variety_bounds(&HilbertProfile::Sphere(3), 2, d).unwrap();
            assert_eq!(r.lower, BigInt::from(2 * d * d));
            assert_eq!(r.upper, BigInt::from(4 * d * (d + 1)));
            assert!(r.consistent);
        }
    }

    #[test]
    fn plane_octic_regime_violation() {
        let p = HilbertProfile::polynomial_i64(&[-20, 8]);
        let r = variety_bounds(&p, 1, 1).unwrap();
        assert_eq!(r.upper, int(-5));
        assert_eq!(r.lower, int(8));
        assert!(!r.consistent);
        assert!(r.regime_note.contains("regime violated"));
    }

    #[test]
    fn projective_space_profile_matches_grid() {
        for n in 1..=5u64 {
            for d in 1..=5u64 {
                let r = variety_bounds(&HilbertProfile::ProjectiveSpace(n), n, d).unwrap();
                assert_eq!(r.lower, grid_cara_closed_form(n, d, Parity::Even, Domain::Rn));
            }
        }
    }

    #[test]
    fn curve_examples() {
        let r = curve_bounds(2, 3).unwrap();
        assert_eq!((r.lower, r.upper), (int(6), int(7)));
        let r = curve_bounds(8, 2).unwrap();
        assert_eq!((r.lower, r.upper), (int(16), int(17)));
        let r = curve_bounds(1, 1).unwrap();
        assert_eq!((r.lower, r.upper), (int(1), int(2)));
        // A degree-e curve profile e·t + a gives the same lower bound.
        let p = HilbertProfile::polynomial_i64(&[-20, 8]);
        for d in 3..10 {
            assert_eq!(variety_bounds(&p, 1, d).unwrap().lower, BigInt::from(8 * d));
        }
    }

    #[test]
    fn polynomial_profile_validation() {
        let half = BigRational::new(1.into(), 2.into());
        // t(t+1)/2 is integer-valued.
        assert!(HilbertProfile::polynomial(vec![BigRational::zero(), half.clone(), half.clone()]).is_ok());
        assert!(HilbertProfile::polynomial(vec![half]).is_err());
    }

    #[test]
    fn ratio_examples() {
        let r = asymptotic_ratio(3, 200, Parity::Even, Domain::Rn);
        let gap = (r - ratio_limit(3)).abs().to_f64().unwrap();
        assert!(gap < 0.01);

        // Large-n direction: C(104,4) − 100·C(102,2) + C(100,2) over C(104,4).
        let r = asymptotic_ratio(100, 2, Parity::Even, Domain::Rn);
        assert_eq!(r, BigRational::new(4_087_976.into(), 4_598_126.into()));
        let mut prev = r;
        for n in [200u64, 1000, 2000, 5000] {
            let r = asymptotic_ratio(n, 2, Parity::Even, Domain::Rn);
            assert!(r > prev && r < BigRational::one());
            prev = r;
        }
        assert!(prev > BigRational::new(99.into(), 100.into()));

        for d in 1..20u64 {
            let r = asymptotic_ratio(1, d, Parity::Even, Domain::Rn);
            assert_eq!(r, BigRational::new(BigInt::from(d), BigInt::from(2 * d + 1)));
        }
    }

    #[test]
    fn ratio_converges_to_limit() {
        for n in 1..=4u64 {
            let r = asymptotic_ratio(n, 2000, Parity::Even, Domain::Rn);
            let gap = (r - ratio_limit(n)).abs().to_f64().unwrap();
            assert!(gap < 1e-3, "n={n} gap={gap}");
        }
    }
}
