//! Grid witnesses on the boundary of the moment cone, their vanishing
//! certificates, interpolation points for signed measures and Carathéodory
//! reduction of positive atomic measures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{MonomialBasis, MultiIndex};
use crate::error::{Error, Result};
use crate::hilbert::{grid_cara_closed_form, Domain, Parity};
use crate::io::format_rational;
use crate::linalg::bareiss_rank;
use crate::moments::{atomic_moments, eval_on_basis, Atom, AtomicMeasure, MomentSequence, Polynomial};

pub const DEFAULT_GRID_CAP: u64 = 20_000;
pub const GRID_CAP_ENV: &str = "MOMENT_CARA_MAX_GRID";

/// The grid cap, honouring `MOMENT_CARA_MAX_GRID` when it parses.
pub fn grid_cap_from_env() -> u64 {
    std::env::var(GRID_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_GRID_CAP)
}

/// Number of grid points: `dⁿ` on ℝⁿ, `(d+1)ⁿ` on the cube. Saturates.
pub fn grid_size(n: u64, d: u64, domain: Domain) -> u128 {
    let side = match domain {
        Domain::Rn => d,
        Domain::Cube => d + 1,
    } as u128;
    let Ok(n) = u32::try_from(n) else {
        return u128::MAX;
    };
    side.checked_pow(n).unwrap_or(u128::MAX)
}

fn grid_points(n: usize, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    let mut pts = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(pts.len() * (hi - lo + 1) as usize);
        for p in &pts {
            for x in lo..=hi {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Integer rows `x^α` for integer points.
fn integer_evaluations(points: &[Vec<u64>], basis: &MonomialBasis) -> Vec<Vec<BigInt>> {
    let deg = basis.degree() as usize;
    points
        .iter()
        .map(|p| {
            let powers: Vec<Vec<BigInt>> = p
                .iter()
                .map(|&x| {
                    let mut v = vec![BigInt::one()];
                    for k in 1..=deg {
                        let next = &v[k - 1] * x;
                        v.push(next);
                    }
                    v
                })
                .collect();
            basis
                .indices()
                .iter()
                .map(|a| {
                    a.entries()
                        .iter()
                        .enumerate()
                        .fold(BigInt::one(), |acc, (i, &e)| acc * &powers[i][e as usize])
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct GridWitness {
    pub n: usize,
    pub d: u32,
    pub parity: Parity,
    pub domain: Domain,
    /// Unit masses on the grid.
    pub measure: AtomicMeasure,
    /// Moments of `measure` at degree `2d + parity`.
    pub sequence: MomentSequence,
    /// Exact rank of the grid evaluation matrix at degree `2d + parity`.
    pub certified_cara: usize,
    pub closed_form: BigInt,
}

impl GridWitness {
    pub fn degree(&self) -> u32 {
        2 * self.d + self.parity.offset() as u32
    }

    pub fn matches(&self) -> bool {
        BigInt::from(self.certified_cara) == self.closed_form
    }

    pub fn atoms(&self) -> usize {
        self.measure.len()
    }
}

pub fn build_grid_witness(
    n: usize,
    d: u32,
    parity: Parity,
    domain: Domain,
    cap: u64,
) -> Result<GridWitness> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("grid witness needs n ≥ 1 and d ≥ 1".into()));
    }
    let points = grid_size(n as u64, d as u64, domain);
    if points > cap as u128 {
        return Err(Error::GridCapExceeded { points, cap });
    }
    let (lo, hi) = match domain {
        Domain::Rn => (1, d as u64),
        Domain::Cube => (0, d as u64),
    };
    let grid = grid_points(n, lo, hi);
    let degree = 2 * d + parity.offset() as u32;
    let basis = MonomialBasis::new(n, degree);
    let rows = integer_evaluations(&grid, &basis);

    // Column sums of the evaluation matrix are the moments of the unit masses.
    let values: Vec<BigRational> = (0..basis.len())
        .map(|j| BigRational::from_integer(rows.iter().map(|r| &r[j]).sum()))
        .collect();
    let sequence = MomentSequence::new(n, degree, values)?;
    let certified_cara = bareiss_rank(rows, basis.len());

    let measure = AtomicMeasure::unit_masses(
        n,
        grid.into_iter()
            .map(|p| p.into_iter().map(|x| BigRational::from_integer(x.into())).collect())
            .collect(),
    )?;
    Ok(GridWitness {
        n,
        d,
        parity,
        domain,
        measure,
        sequence,
        certified_cara,
        closed_form: grid_cara_closed_form(n as u64, d as u64, parity, domain),
    })
}

/// Exact rank of the atom evaluation matrix. It equals the Carathéodory
/// number of the measure's moments when the support is the full zero set of
/// a nonnegative polynomial annihilated by the moments; otherwise it is only
/// a lower bound.
pub fn boundary_cara(measure: &AtomicMeasure, degree: u32) -> usize {
    if measure.is_empty() {
        return 0;
    }
    measure.evaluation_matrix(degree).rank()
}

/// Sum of squares of per-coordinate factors vanishing on the grid:
/// `∏_{j=1..d}(xᵢ − j)` on ℝⁿ, `xᵢ ∏_{j=1..d}(xᵢ − j)` on the cube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub n: usize,
    pub d: u32,
    pub domain: Domain,
    /// Coefficients of the univariate factor, constant term first. Every
    /// coordinate uses the same factor.
    pub factor: Vec<BigRational>,
}

impl Certificate {
    pub fn factor_degree(&self) -> u32 {
        self.factor.len() as u32 - 1
    }

    pub fn degree(&self) -> u32 {
        2 * self.factor_degree()
    }

    /// The factor in coordinate `i` as an `n`-variate polynomial.
    pub fn factor_in(&self, i: usize) -> Polynomial {
        Polynomial::from_terms(self.factor.iter().enumerate().map(|(e, c)| {
            let mut a = MultiIndex::zero(self.n);
            a.0[i] = e as u32;
            (a, c.clone())
        }))
    }

    pub fn composite(&self) -> Polynomial {
        (0..self.n).fold(Polynomial::zero(), |acc, i| {
            let f = self.factor_in(i);
            acc.add(&f.mul(&f))
        })
    }

    pub fn eval_factor(&self, t: &BigRational) -> BigRational {
        self.factor
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        x.iter()
            .map(|t| {
                let v = self.eval_factor(t);
                &v * &v
            })
            .fold(BigRational::zero(), |acc, v| acc + v)
    }

    /// Human-readable factor, e.g. `x^2 - 3x + 2`.
    pub fn factor_string(&self) -> String {
        let mut out = String::new();
        for (e, c) in self.factor.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let coef = format_rational(&mag);
            match e {
                0 => out.push_str(&coef),
                _ => {
                    if !mag.is_one() {
                        out.push_str(&coef);
                    }
                    out.push('x');
                    if e > 1 {
                        out.push_str(&format!("^{e}"));
                    }
                }
            }
        }
        out
    }
}

pub fn certificate(n: usize, d: u32, domain: Domain) -> Result<Certificate> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("certificate needs n ≥ 1 and d ≥ 1".into()));
    }
    let roots = match domain {
        Domain::Rn => 1..=d as i64,
        Domain::Cube => 0..=d as i64,
    };
    let mut factor = vec![BigRational::one()];
    for r in roots {
        // Multiply by (x − r).
        let r = BigRational::from_integer(r.into());
        let mut next = vec![BigRational::zero(); factor.len() + 1];
        for (e, c) in factor.iter().enumerate() {
            next[e + 1] += c;
            next[e] -= c * &r;
        }
        factor = next;
    }
    Ok(Certificate { n, d, domain, factor })
}

/// `L(p)` for the witness moments and its certificate. The cube certificate
/// has degree `2d+2`, above the witness degree, so the functional is
/// extended through the grid measure itself.
pub fn certificate_pairing(w: &GridWitness, cert: &Certificate) -> BigRational {
    let p = cert.composite();
    if p.degree() <= w.sequence.degree() {
        crate::moments::riesz_apply(&w.sequence, &p).expect("degree checked")
    } else {
        let s = atomic_moments(&w.measure, p.degree());
        crate::moments::riesz_apply(&s, &p).expect("degree matches")
    }
}

/// Incremental echelon basis over ℚ for rank-increase tests.
struct Echelon {
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the rows so far.
    fn insert(&mut self, mut v: Vec<BigRational>) -> bool {
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let f = v[*pivot].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x -= &f * r;
                    }
                }
            }
        }
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Greedily keeps candidates whose evaluations raise the rank until it
/// reaches the basis size `binom(n+degree, n)`.
pub fn interpolation_points(
    n: usize,
    degree: u32,
    candidates: impl IntoIterator<Item = Vec<BigRational>>,
) -> Result<Vec<Vec<BigRational>>> {
    let basis = MonomialBasis::new(n, degree);
    let mut ech = Echelon::new();
    let mut chosen = Vec::new();
    for p in candidates {
        if ech.rank() == basis.len() {
            break;
        }
        if p.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "candidate has {} coordinates, expected {n}",
                p.len()
            )));
        }
        if ech.insert(eval_on_basis(&basis, &p)) {
            chosen.push(p);
        }
    }
    if ech.rank() < basis.len() {
        return Err(Error::StreamExhausted {
            achieved: ech.rank(),
            required: basis.len(),
        });
    }
    Ok(chosen)
}

/// Nonnegative integer points ordered by coordinate sum, then graded-lex.
/// The simplex `{|α| ≤ degree}` is unisolvent, so this stream always
/// reaches full rank.
pub fn lattice_candidates(n: usize) -> impl Iterator<Item = Vec<BigRational>> {
    (0u32..).flat_map(move |k| {
        crate::combinatorics::enum_multi_indices(n, k, crate::combinatorics::DegreeMode::Exactly)
            .into_iter()
            .map(|a| {
                a.entries()
                    .iter()
                    .map(|&x| BigRational::from_integer(x.into()))
                    .collect()
            })
    })
}

/// Carathéodory reduction: while the atom evaluations at `degree` are
/// dependent, move weight along a dependence until some atoms vanish.
pub fn prune(measure: &AtomicMeasure, degree: u32) -> Result<AtomicMeasure> {
    for (i, a) in measure.atoms().iter().enumerate() {
        if !a.weight.is_positive() {
            return Err(Error::NonPositiveWeight(format_rational(&a.weight), i));
        }
    }
    let mut atoms: Vec<Atom> = measure.atoms().to_vec();
    loop {
        if atoms.is_empty() {
            break;
        }
        let current = AtomicMeasure::new(measure.n(), atoms.clone())?;
        let Some(mut v) = current.evaluation_matrix(degree).transpose().kernel_vector() else {
            break;
        };
        if !v.iter().any(Signed::is_positive) {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
        let t = atoms
            .iter()
            .zip(&v)
            .filter(|(_, vi)| vi.is_positive())
            .map(|(a, vi)| &a.weight / vi)
            .min()
            .expect("kernel vector has a positive entry");
        for (a, vi) in atoms.iter_mut().zip(&v) {
            a.weight -= &t * vi;
        }
        atoms.retain(|a| !a.weight.is_zero());
    }
    AtomicMeasure::new(measure.n(), atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RationalMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qi(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    fn pts(xs: &[&[i64]]) -> Vec<Vec<BigRational>> {
        xs.iter().map(|p| p.iter().map(|&x| qi(x)).collect()).collect()
    }

    #[test]
    fn witness_examples() {
        let w = build_grid_witness(2, 3, Parity::Even, Domain::Rn, DEFAULT_GRID_CAP).unwrap();
        assert_eq!((w.certified_cara, w.atoms()), (9, 9));
        assert!(w.matches());

        let w = build_grid_witness(2, 2, Parity::Even, Domain::Cube, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(w.certified_cara, 9);
        assert!(w.matches());

        let w = build_grid_witness(5, 2, Parity::Even, Domain::Rn, DEFAULT_GRID_CAP).unwrap();
        assert_eq!((w.certified_cara, w.atoms()), (31, 32));
        assert!(w.matches());
    }

    #[test]
    fn witness_sequence_is_grid_moments() {
        let w = build_grid_witness(2, 2, Parity::Odd, Domain::Cube, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(w.sequence, atomic_moments(&w.measure, 5));
    }

    #[test]
    fn witness_cap() {
        let e = build_grid_witness(6, 4, Parity::Even, Domain::Cube, 10_000).unwrap_err();
        assert_eq!(e, Error::GridCapExceeded { points: 15_625, cap: 10_000 });
        assert_eq!(grid_size(400, 1000, Domain::Rn), u128::MAX);
    }

    #[test]
    fn small_witnesses_match_closed_form() {
        for domain in [Domain::Rn, Domain::Cube] {
            for parity in [Parity::Even, Parity::Odd] {
                for n in 1..=3 {
                    for d in 1..=3 {
                        let w = build_grid_witness(n, d, parity, domain, DEFAULT_GRID_CAP).unwrap();
                        assert!(w.matches(), "{n} {d} {parity} {domain}");
                        let c = certificate(n, d, domain).unwrap();
                        assert!(certificate_pairing(&w, &c).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_cara_examples() {
        let m = AtomicMeasure::unit_masses(1, pts(&[&[1], &[2], &[3]])).unwrap();
        assert_eq!(boundary_cara(&m, 6), 3);
        assert_eq!(boundary_cara(&m, 2), 3);
        assert_eq!(boundary_cara(&m, 1), 2);
        let one = AtomicMeasure::unit_masses(2, pts(&[&[4, -1]])).unwrap();
        assert_eq!(boundary_cara(&one, 7), 1);
        assert_eq!(boundary_cara(&AtomicMeasure::empty(2), 3), 0);
    }

    #[test]
    fn certificate_examples() {
        let c = certificate(1, 2, Domain::Rn).unwrap();
        assert_eq!(c.factor, vec![qi(2), qi(-3), qi(1)]);
        assert_eq!(c.factor_string(), "x^2 - 3x + 2");

        let c = certificate(2, 2, Domain::Rn).unwrap();
        assert_eq!(c.degree(), 4);
        assert_eq!(c.eval(&[qi(0), qi(0)]), qi(8));
        assert_eq!(c.composite().eval(&[qi(0), qi(0)]), qi(8));
        for p in pts(&[&[1, 1], &[1, 2], &[2, 1], &[2, 2]]) {
            assert!(c.eval(&p).is_zero());
        }

        let c = certificate(1, 1, Domain::Cube).unwrap();
        assert_eq!(c.factor, vec![qi(0), qi(-1), qi(1)]);
        assert_eq!(c.factor_string(), "x^2 - x");
        assert_eq!(certificate(1, 3, Domain::Cube).unwrap().degree(), 8);
    }

    #[test]
    fn certificate_positive_off_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for domain in [Domain::Rn, Domain::Cube] {
            let c = certificate(3, 3, domain).unwrap();
            for _ in 0..20 {
                let x: Vec<BigRational> = (0..3)
                    .map(|_| BigRational::new(rng.gen_range(-40..40).into(), 7.into()))
                    .collect();
                let on_grid = x.iter().all(|t| {
                    t.is_integer() && c.eval_factor(t).is_zero()
                });
                assert_eq!(c.eval(&x).is_positive(), !on_grid);
                assert_eq!(c.eval(&x), c.composite().eval(&x));
            }
        }
    }

    #[test]
    fn interpolation_examples() {
        let stream = (0..).map(|x| vec![qi(x)]);
        assert_eq!(interpolation_points(1, 2, stream).unwrap(), pts(&[&[0], &[1], &[2]]));

        let stream = pts(&[&[0, 0], &[1, 0], &[2, 0], &[0, 1], &[1, 1]]);
        assert_eq!(
            interpolation_points(2, 1, stream).unwrap(),
            pts(&[&[0, 0], &[1, 0], &[0, 1]])
        );

        let e = interpolation_points(1, 2, pts(&[&[1], &[1], &[1]])).unwrap_err();
        assert_eq!(e, Error::StreamExhausted { achieved: 1, required: 3 });
    }

    #[test]
    fn interpolation_matrix_invertible() {
        for n in 1..=3 {
            for degree in 0..=3 {
                let p = interpolation_points(n, degree, lattice_candidates(n)).unwrap();
                let m = AtomicMeasure::unit_masses(n, p).unwrap().evaluation_matrix(degree);
                assert_eq!(m.rows(), m.cols());
                assert!(!m.determinant().is_zero());
            }
        }
    }

    #[test]
    fn prune_examples() {
        let m = AtomicMeasure::unit_masses(1, pts(&[&[0], &[1], &[2], &[3]])).unwrap();
        let p = prune(&m, 2).unwrap();
        assert!(p.len() <= 3);
        assert!(p.is_positive());
        assert_eq!(atomic_moments(&p, 2).values(), &[qi(4), qi(6), qi(14)]);

        let m = AtomicMeasure::unit_masses(2, pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
        assert_eq!(prune(&m, 1).unwrap(), m);

        let w = build_grid_witness(5, 2, Parity::Even, Domain::Rn, DEFAULT_GRID_CAP).unwrap();
        let p = prune(&w.measure, 4).unwrap();
        // The one dependence is the alternating ±1 vector, so half the
        // atoms reach zero in the same step.
        assert_eq!(p.len(), 16);
        assert!(p.atoms().iter().all(|a| a.weight == qi(2)));
        assert_eq!(atomic_moments(&p, 4), atomic_moments(&w.measure, 4));

        let bad = AtomicMeasure::new(1, vec![Atom { point: vec![qi(0)], weight: qi(0) }]).unwrap();
        assert_eq!(prune(&bad, 1), Err(Error::NonPositiveWeight("0".into(), 0)));
    }

    #[test]
    fn prune_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..15 {
            let n = rng.gen_range(1..=2);
            let degree = rng.gen_range(1..=3);
            let size = MonomialBasis::new(n, degree).len();
            let k = rng.gen_range(1..=2 * size);
            let mut points: Vec<Vec<BigRational>> = Vec::new();
            while points.len() < k {
                let p: Vec<BigRational> = (0..n)
                    .map(|_| BigRational::new(rng.gen_range(-6..=6).into(), rng.gen_range(1..=2).into()))
                    .collect();
                if !points.contains(&p) {
                    points.push(p);
                }
            }
            let m = AtomicMeasure::new(
                n,
                points
                    .into_iter()
                    .map(|point| Atom { point, weight: BigRational::new(rng.gen_range(1..=9).into(), rng.gen_range(1..=4).into()) })
                    .collect(),
            )
            .unwrap();
            let rank = RationalMatrix::rank(&m.evaluation_matrix(degree));
            let p = prune(&m, degree).unwrap();
            assert!(p.len() <= rank);
            assert!(p.is_positive());
            assert_eq!(atomic_moments(&p, degree), atomic_moments(&m, degree));
            assert_eq!(prune(&p, degree).unwrap(), p);
        }
    }
}
