//! Dense exact-rational linear algebra.
//!
//! Ranks and determinants go through fraction-free (Bareiss) elimination on
//! integer rows obtained by clearing each row's denominators. Kernels and
//! solves use Gauss-Jordan elimination over `BigRational`. Modular rank is
//! provided only as an independent cross-check.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals. `BigRational` keeps every entry
/// in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|q| q.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        RationalMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn scale_row(&mut self, i: usize, factor: &BigRational) {
        for j in 0..self.cols {
            let v = self.get(i, j) * factor;
            self.set(i, j, v);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Rows with denominators cleared: each row is multiplied by the lcm of
    /// its denominators. Rank and the vanishing of every minor are preserved.
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                row.iter()
                    .map(|q| q.numer() * (&lcm / q.denom()))
                    .collect()
            })
            .collect()
    }

    /// Exact rank.
    pub fn rank(&self) -> usize {
        bareiss_rank(self.integer_rows(), self.cols)
    }

    /// Exact determinant of a square matrix.
    pub fn determinant(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut scale = BigInt::one();
        let rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                scale *= &lcm;
                row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
            })
            .collect();
        BigRational::new(bareiss_determinant(rows), scale)
    }

    /// A nonzero kernel vector, or `None` when the columns are independent.
    ///
    /// The first free column of the reduced row echelon form is set to 1 and
    /// every other free column to 0.
    pub fn kernel_vector(&self) -> Option<Vec<BigRational>> {
        let (rref, pivots) = rref(self);
        let free = (0..self.cols).find(|j| !pivots.contains(j))?;
        let mut v = vec![BigRational::zero(); self.cols];
        v[free] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -rref.get(r, free).clone();
        }
        Some(v)
    }

    /// Exact solution of `self · x = b`. Overdetermined systems are accepted
    /// when consistent; any system without a unique solution is an error.
    pub fn solve(&self, b: &[BigRational]) -> Result<Vec<BigRational>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (rref, pivots) = rref(&aug);
        if pivots.contains(&self.cols) || pivots.len() < self.cols {
            return Err(Error::SingularOrInconsistent);
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = rref.get(r, self.cols).clone();
        }
        Ok(x)
    }

    /// Rank over `Z/pZ` of the denominator-cleared integer rows. Never
    /// exceeds the rational rank.
    pub fn rank_mod_prime(&self, p: u64) -> usize {
        let rows: Vec<Vec<u64>> = self
            .integer_rows()
            .iter()
            .map(|r| r.iter().map(|x| reduce_mod(x, p)).collect())
            .collect();
        rank_mod_p(rows, self.cols, p)
    }
}

pub fn rat_rank(m: &RationalMatrix) -> usize {
    m.rank()
}

pub fn rat_kernel_vector(m: &RationalMatrix) -> Option<Vec<BigRational>> {
    m.kernel_vector()
}

pub fn rat_solve(m: &RationalMatrix, b: &[BigRational]) -> Result<Vec<BigRational>> {
    m.solve(b)
}

/// Gauss-Jordan reduction over the rationals with pivots taken in column
/// order (first nonzero row at or below the current one).
fn rref(m: &RationalMatrix) -> (RationalMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = a.get(r, c).recip();
        a.scale_row(r, &inv);
        let pivot_row: Vec<BigRational> = a.row(r).to_vec();
        for i in 0..a.rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for j in c..a.cols {
                if pivot_row[j].is_zero() {
                    continue;
                }
                let v = a.get(i, j) - &f * &pivot_row[j];
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Index of the pivot for Bareiss full pivoting: the nonzero entry of least
/// magnitude in the trailing submatrix, ties broken by lowest row then column.
fn find_pivot(a: &[Vec<BigInt>], start: usize, cols: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(start) {
        for (j, x) in row.iter().enumerate().take(cols).skip(start) {
            if x.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if x.magnitude() < a[bi][bj].magnitude() {
                        best = Some((i, j));
                    }
                }
            }
            if x.magnitude().is_one() && best == Some((i, j)) {
                return best;
            }
        }
    }
    best
}

/// One Bareiss step: eliminate below the pivot at `(k, k)`.
fn bareiss_step(a: &mut [Vec<BigInt>], k: usize, cols: usize, prev: &BigInt) {
    let (top, bottom) = a.split_at_mut(k + 1);
    let pivot_row = &top[k];
    let p = &pivot_row[k];
    let prev_is_one = prev.is_one();
    for row in bottom.iter_mut() {
        let f = std::mem::take(&mut row[k]);
        if f.is_zero() {
            for x in row.iter_mut().take(cols).skip(k + 1) {
                if x.is_zero() {
                    continue;
                }
                *x *= p;
                if !prev_is_one {
                    *x /= prev;
                }
            }
            continue;
        }
        for j in k + 1..cols {
            let pj = &pivot_row[j];
            let x = &mut row[j];
            if x.is_zero() {
                if pj.is_zero() {
                    continue;
                }
                *x = -(&f * pj);
            } else {
                *x *= p;
                if !pj.is_zero() {
                    *x -= &f * pj;
                }
            }
            if !prev_is_one && !x.is_zero() {
                *x /= prev;
            }
        }
    }
}

/// Exact rank of an integer matrix by Bareiss elimination with full pivoting.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut k = 0;
    while k < rows && k < cols {
        let Some((pi, pj)) = find_pivot(&a, k, cols) else {
            break;
        };
        a.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
        }
        bareiss_step(&mut a, k, cols, &prev);
        prev = a[k][k].clone();
        k += 1;
    }
    k
}

/// Exact determinant of a square integer matrix via Bareiss elimination.
pub fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let Some((pi, pj)) = find_pivot(&a, k, n) else {
            return BigInt::zero();
        };
        if pi != k {
            a.swap(k, pi);
            negate = !negate;
        }
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            negate = !negate;
        }
        bareiss_step(&mut a, k, n, &prev);
        prev = a[k][k].clone();
    }
    if negate {
        -prev
    } else {
        prev
    }
}

fn reduce_mod(x: &BigInt, p: u64) -> u64 {
    let r = (x % BigInt::from(p)).to_i128().expect("residue fits");
    if r < 0 {
        (r + p as i128) as u64
    } else {
        r as u64
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Rank of a matrix over `Z/pZ` for prime `p`.
pub fn rank_mod_p(mut a: Vec<Vec<u64>>, cols: usize, p: u64) -> usize {
    let rows = a.len();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pi) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pi);
        let inv = pow_mod(a[r][c], p - 2, p);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in bottom.iter_mut() {
            if row[c] == 0 {
                continue;
            }
            let f = mul_mod(row[c], inv, p);
            for j in c..cols {
                if pivot_row[j] != 0 {
                    row[j] = (row[j] + p - mul_mod(f, pivot_row[j], p)) % p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly drawn 62-bit prime.
pub fn random_prime_62<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let candidate = rng.gen_range((1u64 << 61)..(1u64 << 62)) | 1;
        if is_prime_u64(candidate) {
            return candidate;
        }
    }
}

/// Exact rank together with a modular cross-check. On disagreement the
/// modular rank is recomputed with fresh primes; a disagreement that
/// survives several primes means the exact path is wrong and panics.
pub fn rank_cross_checked<R: Rng + ?Sized>(m: &RationalMatrix, rng: &mut R) -> usize {
    let exact = m.rank();
    for _ in 0..4 {
        if m.rank_mod_prime(random_prime_62(rng)) == exact {
            return exact;
        }
    }
    let recount = m.rank();
    panic!("exact rank {exact} (recount {recount}) disagrees with modular rank");
}

/// Sign of a rational as -1, 0, 1.
pub fn signum(q: &BigRational) -> i32 {
    match q.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// `|q|` as an `f64`, for diagnostics only.
pub fn abs_f64(q: &BigRational) -> f64 {
    q.abs().to_f64().unwrap_or(f64::INFINITY)
}
