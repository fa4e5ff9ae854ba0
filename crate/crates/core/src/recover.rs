//! Numerical recovery of a k-atomic measure on the line from its moments:
//! Hankel solve for the Prony polynomial, simultaneous root finding, then a
//! Vandermonde solve for the weights.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryConfig {
    /// Refuse Hankel blocks whose 1-norm condition estimate exceeds this.
    pub condition_threshold: f64,
    /// Relative accuracy demanded of each root.
    pub root_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            condition_threshold: 1e12,
            root_tolerance: 1e-10,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    /// Sorted by real part, then imaginary part.
    pub atoms: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    /// `max_j |Σ cᵢ zᵢʲ − s_j|` over every supplied moment.
    pub residual: f64,
    pub condition_estimate: f64,
}

impl RecoveryResult {
    /// `Σ cᵢ zᵢʲ`.
    pub fn moment(&self, j: usize) -> Complex64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(z, c)| c * z.powu(j as u32))
            .sum()
    }

    /// `V diag(c) Vᵀ` with `V` the `size × k` Vandermonde matrix of the atoms.
    pub fn reconstructed_hankel(&self, size: usize) -> Vec<Vec<Complex64>> {
        (0..size)
            .map(|i| (0..size).map(|j| self.moment(i + j)).collect())
            .collect()
    }
}

/// Gaussian elimination with partial pivoting; `None` when a pivot vanishes.
fn lu_solve<T>(mut a: Vec<Vec<T>>, mut b: Vec<T>, abs: impl Fn(&T) -> f64) -> Option<Vec<T>>
where
    T: Copy
        + std::ops::Sub<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Div<Output = T>,
{
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| abs(&a[i][col]).total_cmp(&abs(&a[j][col])))?;
        if abs(&a[piv][col]) == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] = a[r][c] - f * a[col][c];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    let mut x = b.clone();
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc = acc - a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}

fn norm1(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    (0..n)
        .map(|j| (0..n).map(|i| a[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖A‖₁ ‖A⁻¹‖₁` with the inverse formed column by column; infinite when
/// singular.
pub fn condition_estimate(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut inv = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        match lu_solve(a.to_vec(), e, |x: &f64| x.abs()) {
            Some(col) => {
                for i in 0..n {
                    inv[i][j] = col[i];
                }
            }
            None => return f64::INFINITY,
        }
    }
    let c = norm1(a) * norm1(&inv);
    if c.is_finite() {
        c
    } else {
        f64::INFINITY
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    // coeffs[0] is the leading coefficient.
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of a polynomial with leading coefficient first, by
/// Aberth–Ehrlich iteration.
pub fn polynomial_roots(coeffs: &[Complex64], tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
    let lead = coeffs[0];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidArgument("leading coefficient is zero".into()));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let k = monic.len() - 1;
    if k == 0 {
        return Ok(Vec::new());
    }
    // Cauchy bound for the starting circle.
    let radius = 1.0 + monic[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..k)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / k as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, theta)
        })
        .collect();
    for _ in 0..max_iter {
        let mut worst: f64 = 0.0;
        for i in 0..k {
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..k)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            worst = worst.max(step.norm() / z[i].norm().max(1.0));
        }
        if worst <= tol {
            return Ok(polish(&monic, z));
        }
    }
    Err(Error::NoConvergence(max_iter))
}

/// A few Newton steps per root to reach working precision.
fn polish(monic: &[Complex64], mut z: Vec<Complex64>) -> Vec<Complex64> {
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(monic, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *zi - p / dp;
            if (next - *zi).norm() >= zi.norm().max(1.0) * 1e-3 {
                break;
            }
            *zi = next;
        }
    }
    z
}

/// Recovers `k` atoms from real moments `s₀, s₁, …, s_{2d+1}` (any length
/// `≥ 2k`; `d` is the largest value with `2d+1` inside the data).
pub fn recover_atoms_1d(s: &[f64], k: usize, cfg: &RecoveryConfig) -> Result<RecoveryResult> {
    if s.len() < 2 {
        return Err(Error::InvalidArgument("need at least two moments".into()));
    }
    let d = (s.len() - 2) / 2;
    if k == 0 || k > d {
        return Err(Error::InvalidArgument(format!(
            "atom count k={k} must satisfy 1 ≤ k ≤ d={d}"
        )));
    }
    let h: Vec<Vec<f64>> = (0..k).map(|i| s[i..i + k].to_vec()).collect();
    let cond = condition_estimate(&h);
    if cond.is_nan() || cond > cfg.condition_threshold {
        return Err(Error::IllConditioned(cond));
    }
    let rhs: Vec<f64> = (0..k).map(|i| -s[i + k]).collect();
    let a = lu_solve(h, rhs, |x: &f64| x.abs()).ok_or(Error::SingularOrInconsistent)?;

    // z^k + a_{k−1} z^{k−1} + … + a₀, leading coefficient first.
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    coeffs.extend(a.iter().rev().map(|&x| Complex64::new(x, 0.0)));
    let mut atoms = polynomial_roots(&coeffs, cfg.root_tolerance, cfg.max_iterations)?;
    atoms.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    let vander: Vec<Vec<Complex64>> = (0..k)
        .map(|j| atoms.iter().map(|z| z.powu(j as u32)).collect())
        .collect();
    let rhs: Vec<Complex64> = s[..k].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let weights = lu_solve(vander, rhs, |x: &Complex64| x.norm()).ok_or(Error::SingularOrInconsistent)?;

    let mut result = RecoveryResult {
        atoms,
        weights,
        residual: 0.0,
        condition_estimate: cond,
    };
    result.residual = s
        .iter()
        .enumerate()
        .map(|(j, &sj)| (result.moment(j) - sj).norm())
        .fold(0.0, f64::max);
    Ok(result)
}
