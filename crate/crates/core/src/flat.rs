//! Flat-extension degree analysis driven by the grid witness lower bound.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::combinatorics::binom;
use crate::error::{Error, Result};
use crate::hilbert::{grid_cara_closed_form, Domain, Parity};
use crate::io::bigint_value;
use crate::moments::{hankel, MomentSequence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatReport {
    pub n: u64,
    pub d: u64,
    /// Carathéodory number of the even ℝⁿ grid witness.
    pub cara_lower: BigInt,
    /// Smallest `D ≥ d` with `binom(n+D, n) ≥ cara_lower`.
    pub required_d: u64,
    /// `required_d = 2d`.
    pub worst_case: bool,
}

fn basis_big(n: u64, degree: u64) -> BigInt {
    BigInt::from(binom(n + degree, n as i64))
}

pub fn required_extension_degree(n: u64, d: u64) -> Result<FlatReport> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("flat analysis needs n ≥ 1 and d ≥ 1".into()));
    }
    let c = grid_cara_closed_form(n, d, Parity::Even, Domain::Rn);
    // binom(n+D, n) grows with D, so the first passing D is found by bisection.
    let (mut lo, mut hi) = (d, 2 * d);
    assert!(
        basis_big(n, hi) >= c,
        "binom(n+2d, n) below the witness number for n={n}, d={d}"
    );
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if basis_big(n, mid) >= c {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(FlatReport {
        n,
        d,
        worst_case: lo == 2 * d,
        cara_lower: c,
        required_d: lo,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorstCaseTable {
    pub reports: Vec<FlatReport>,
    /// For each scanned `d`, the least scanned `n` that is worst case.
    pub minimal: Vec<(u64, Option<u64>)>,
}

pub fn worst_case_table(
    ns: impl IntoIterator<Item = u64> + Clone,
    ds: impl IntoIterator<Item = u64>,
) -> Result<WorstCaseTable> {
    let mut reports = Vec::new();
    let mut minimal = Vec::new();
    for d in ds {
        let mut first = None;
        for n in ns.clone() {
            let r = required_extension_degree(n, d)?;
            if r.worst_case && first.is_none() {
                first = Some(n);
            }
            reports.push(r);
        }
        minimal.push((d, first));
    }
    Ok(WorstCaseTable { reports, minimal })
}

impl WorstCaseTable {
    pub fn is_minimal(&self, r: &FlatReport) -> bool {
        self.minimal.iter().any(|&(d, n)| d == r.d && n == Some(r.n))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "d", "C", "required_D", "worst_case"])
            .expect("in-memory write");
        for r in &self.reports {
            w.write_record([
                r.n.to_string(),
                r.d.to_string(),
                r.cara_lower.to_string(),
                r.required_d.to_string(),
                r.worst_case.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("ascii")
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .reports
            .iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "d": r.d,
                    "C": bigint_value(&r.cara_lower),
                    "required_D": r.required_d,
                    "worst_case": r.worst_case,
                    "minimal": self.is_minimal(r),
                })
            })
            .collect();
        let minimal: Vec<Value> = self
            .minimal
            .iter()
            .map(|(d, n)| json!({"d": d, "n": n}))
            .collect();
        json!({"rows": rows, "minimal_worst_case": minimal})
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatCheck {
    pub rank_lower: usize,
    pub rank_upper: usize,
    pub flat: bool,
}

/// Ranks of `ℋ_D` and `ℋ_{D+1}`; the sequence needs degree `≥ 2D+2`.
pub fn flat_check(s: &MomentSequence, big_d: u32) -> Result<FlatCheck> {
    if s.degree() < 2 * big_d + 2 {
        return Err(Error::DegreeOverflow {
            poly: 2 * big_d + 2,
            degree: s.degree(),
        });
    }
    let rank_lower = hankel(s, big_d)?.rank();
    let rank_upper = hankel(s, big_d + 1)?.rank();
    Ok(FlatCheck {
        rank_lower,
        rank_upper,
        flat: rank_lower == rank_upper,
    })
}
