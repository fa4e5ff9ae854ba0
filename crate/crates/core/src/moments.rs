//! Truncated moment sequences, atomic measures, the Riesz functional, the
//! shift operator and Hankel matrices.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{MonomialBasis, MultiIndex};
use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;

/// Exact moments `s_α` for every `|α| ≤ degree`, stored densely in
/// graded-lex order.
#[derive(Debug, Clone)]
pub struct MomentSequence {
    basis: MonomialBasis,
    values: Vec<BigRational>,
}

impl PartialEq for MomentSequence {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n() && self.degree() == other.degree() && self.values == other.values
    }
}

impl Eq for MomentSequence {}

impl MomentSequence {
    /// Values must follow the graded-lex basis order.
    pub fn new(n: usize, degree: u32, values: Vec<BigRational>) -> Result<Self> {
        let basis = MonomialBasis::new(n, degree);
        if values.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} moments for n={n}, degree={degree}, got {}",
                basis.len(),
                values.len()
            )));
        }
        Ok(MomentSequence { basis, values })
    }

    pub fn zeros(n: usize, degree: u32) -> Self {
        let basis = MonomialBasis::new(n, degree);
        let values = vec![BigRational::zero(); basis.len()];
        MomentSequence { basis, values }
    }

    /// One-dimensional sequence `s₀, s₁, …`.
    pub fn univariate(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty moment sequence".into()));
        }
        let degree = values.len() as u32 - 1;
        Self::new(1, degree, values)
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree()
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<&BigRational> {
        self.basis.index_of(alpha).map(|i| &self.values[i])
    }

    /// `(α, s_α)` pairs in graded-lex order.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.basis.indices().iter().zip(&self.values)
    }

    /// The same moments cut down to a lower degree.
    pub fn truncate(&self, degree: u32) -> Result<MomentSequence> {
        if degree > self.degree() {
            return Err(Error::DegreeOverflow {
                poly: degree,
                degree: self.degree(),
            });
        }
        let basis = MonomialBasis::new(self.n(), degree);
        // Graded-lex order makes the lower-degree basis a prefix.
        let values = self.values[..basis.len()].to_vec();
        Ok(MomentSequence { basis, values })
    }
}

/// A polynomial as a sparse map from exponents to exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<MultiIndex, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(MultiIndex::zero(n), c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (MultiIndex, BigRational)>) -> Self {
        let mut p = Polynomial::zero();
        for (a, c) in terms {
            p.add_term(a, c);
        }
        p
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: BigRational) {
        let entry = self.terms.entry(alpha).or_insert_with(BigRational::zero);
        *entry += c;
        let zero_keys: Vec<MultiIndex> = self
            .terms
            .iter()
            .filter(|(_, v)| v.is_zero())
            .map(|(k, _)| k.clone())
            .collect();
        for k in zero_keys {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, BigRational> {
        &self.terms
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.add(b), x * y);
            }
        }
        out
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (a, x) in &other.terms {
            out.add_term(a.clone(), x.clone());
        }
        out
    }

    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        self.terms
            .iter()
            .map(|(a, c)| c * monomial(a, x))
            .fold(BigRational::zero(), |acc, v| acc + v)
    }
}

/// `x^α`.
pub fn monomial(alpha: &MultiIndex, x: &[BigRational]) -> BigRational {
    alpha
        .entries()
        .iter()
        .zip(x)
        .filter(|(e, _)| **e > 0)
        .fold(BigRational::one(), |acc, (&e, xi)| acc * num_traits::pow(xi.clone(), e as usize))
}

/// Values `x^α` over the graded-lex basis of degree `≤ degree`.
pub fn eval_vector(n: usize, degree: u32, x: &[BigRational]) -> Vec<BigRational> {
    assert_eq!(x.len(), n, "point dimension mismatch");
    eval_on_basis(&MonomialBasis::new(n, degree), x)
}

pub fn eval_on_basis(basis: &MonomialBasis, x: &[BigRational]) -> Vec<BigRational> {
    let degree = basis.degree() as usize;
    let powers: Vec<Vec<BigRational>> = x
        .iter()
        .map(|xi| {
            let mut p = Vec::with_capacity(degree + 1);
            p.push(BigRational::one());
            for k in 1..=degree {
                let next = &p[k - 1] * xi;
                p.push(next);
            }
            p
        })
        .collect();
    basis
        .indices()
        .iter()
        .map(|a| {
            a.entries()
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .fold(BigRational::one(), |acc, (i, &e)| acc * &powers[i][e as usize])
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub point: Vec<BigRational>,
    pub weight: BigRational,
}

/// `Σ cᵢ δ_{xᵢ}` with pairwise distinct points. Weights may have any sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicMeasure {
    n: usize,
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(n: usize, atoms: Vec<Atom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if a.point.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "atom {i} has {} coordinates, expected {n}",
                    a.point.len()
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (i, a) in atoms.iter().enumerate() {
            if !seen.insert(&a.point) {
                return Err(Error::InvalidArgument(format!("atom {i} repeats an earlier point")));
            }
        }
        Ok(AtomicMeasure { n, atoms })
    }

    pub fn empty(n: usize) -> Self {
        AtomicMeasure { n, atoms: Vec::new() }
    }

    /// Unit weights at the given points.
    pub fn unit_masses(n: usize, points: Vec<Vec<BigRational>>) -> Result<Self> {
        Self::new(
            n,
            points
                .into_iter()
                .map(|point| Atom {
                    point,
                    weight: BigRational::one(),
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// All weights strictly positive.
    pub fn is_positive(&self) -> bool {
        self.atoms.iter().all(|a| a.weight.is_positive())
    }

    pub fn points(&self) -> Vec<Vec<BigRational>> {
        self.atoms.iter().map(|a| a.point.clone()).collect()
    }

    /// `Σ cᵢ p(xᵢ)`.
    pub fn integrate(&self, p: &Polynomial) -> BigRational {
        self.atoms
            .iter()
            .map(|a| &a.weight * p.eval(&a.point))
            .fold(BigRational::zero(), |acc, v| acc + v)
    }

    /// Rows `s(xᵢ)` of point evaluations over the basis of degree `≤ degree`.
    pub fn evaluation_matrix(&self, degree: u32) -> RationalMatrix {
        let basis = MonomialBasis::new(self.n, degree);
        RationalMatrix::from_rows(
            self.atoms
                .iter()
                .map(|a| eval_on_basis(&basis, &a.point))
                .collect(),
        )
    }
}

/// `s_α = Σ cᵢ xᵢ^α` for `|α| ≤ degree`.
pub fn atomic_moments(m: &AtomicMeasure, degree: u32) -> MomentSequence {
    let basis = MonomialBasis::new(m.n(), degree);
    let mut values = vec![BigRational::zero(); basis.len()];
    for atom in m.atoms() {
        for (v, e) in values.iter_mut().zip(eval_on_basis(&basis, &atom.point)) {
            *v += &atom.weight * e;
        }
    }
    MomentSequence { basis, values }
}

/// `L_s(p) = Σ_α p_α s_α`.
pub fn riesz_apply(s: &MomentSequence, p: &Polynomial) -> Result<BigRational> {
    if p.degree() > s.degree() {
        return Err(Error::DegreeOverflow {
            poly: p.degree(),
            degree: s.degree(),
        });
    }
    let mut acc = BigRational::zero();
    for (alpha, c) in p.terms() {
        if alpha.dim() != s.n() {
            return Err(Error::DimensionMismatch(format!(
                "term {alpha} has dimension {}, sequence has {}",
                alpha.dim(),
                s.n()
            )));
        }
        acc += c * s.get(alpha).expect("degree checked");
    }
    Ok(acc)
}

/// `(M_β s)_α = s_{α+β}`, truncated at `degree − |β|`.
pub fn shift(s: &MomentSequence, beta: &MultiIndex) -> Result<MomentSequence> {
    if beta.dim() != s.n() {
        return Err(Error::DimensionMismatch(format!(
            "shift index {beta} has dimension {}, sequence has {}",
            beta.dim(),
            s.n()
        )));
    }
    if beta.degree() > s.degree() {
        return Err(Error::DegreeOverflow {
            poly: beta.degree(),
            degree: s.degree(),
        });
    }
    let basis = MonomialBasis::new(s.n(), s.degree() - beta.degree());
    let values = basis
        .indices()
        .iter()
        .map(|a| s.get(&a.add(beta)).expect("within degree").clone())
        .collect();
    Ok(MomentSequence { basis, values })
}

/// `(s_{α+β})` over the basis of degree `≤ sub_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HankelMatrix {
    pub sub_degree: u32,
    pub matrix: RationalMatrix,
}

impl HankelMatrix {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

pub fn hankel(s: &MomentSequence, sub_degree: u32) -> Result<HankelMatrix> {
    if 2 * sub_degree > s.degree() {
        return Err(Error::DegreeOverflow {
            poly: 2 * sub_degree,
            degree: s.degree(),
        });
    }
    let basis = MonomialBasis::new(s.n(), sub_degree);
    let idx = basis.indices();
    let mut m = RationalMatrix::zeros(idx.len(), idx.len());
    for (i, a) in idx.iter().enumerate() {
        for (j, b) in idx.iter().enumerate().skip(i) {
            let v = s.get(&a.add(b)).expect("within degree").clone();
            if i != j {
                m.set(j, i, v.clone());
            }
            m.set(i, j, v);
        }
    }
    Ok(HankelMatrix {
        sub_degree,
        matrix: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HankelRankReport {
    pub rank: usize,
    pub atoms: usize,
    /// The atoms' evaluation vectors are linearly independent.
    pub independent: bool,
}

/// Rank of the Hankel matrix of an atomic measure at `sub_degree`.
pub fn hankel_rank_analysis(m: &AtomicMeasure, sub_degree: u32) -> HankelRankReport {
    let s = atomic_moments(m, 2 * sub_degree);
    let rank = hankel(&s, sub_degree).expect("degree is exactly 2·sub_degree").rank();
    assert!(rank <= m.len(), "Hankel rank {rank} exceeds atom count {}", m.len());
    HankelRankReport {
        rank,
        atoms: m.len(),
        independent: rank == m.len(),
    }
}
