//! JSON encoding of moment sequences and atomic measures. Rationals travel
//! as strings `"p/q"` or bare integers `"p"`.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::combinatorics::{MonomialBasis, MultiIndex};
use crate::error::{Error, Result};
use crate::moments::{Atom, AtomicMeasure, MomentSequence};

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), Some(q.trim())),
        None => (s, None),
    };
    let p = BigInt::from_str(num).map_err(|_| bad())?;
    let q = match den {
        Some(q) => BigInt::from_str(q).map_err(|_| bad())?,
        None => BigInt::from(1),
    };
    if !q.is_positive() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// `"p/q"` in lowest terms, or `"p"` when the denominator is 1.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn rational_value(v: &Value, key: &str) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|_| {
            Error::Parse(format!("invalid rational {s:?} at {key}"))
        }),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        other => Err(Error::Parse(format!("invalid rational {other} at {key}"))),
    }
}

fn field<'a>(obj: &'a Value, key: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field {key:?} in {ctx}")))
}

fn as_usize(v: &Value, key: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("{key} must be a nonnegative integer")))
}

fn as_array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{key} must be an array")))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))
}

pub fn moments_from_json(v: &Value) -> Result<MomentSequence> {
    let n = as_usize(field(v, "n", "moment file")?, "n")?;
    let degree = as_usize(field(v, "degree", "moment file")?, "degree")? as u32;
    let entries = as_array(field(v, "moments", "moment file")?, "moments")?;
    let basis = MonomialBasis::new(n, degree);
    let mut slots: HashMap<usize, BigRational> = HashMap::new();
    for (i, e) in entries.iter().enumerate() {
        let ctx = format!("moments[{i}]");
        let alpha_v = as_array(field(e, "alpha", &ctx)?, &format!("{ctx}.alpha"))?;
        let alpha = alpha_v
            .iter()
            .map(|x| x.as_u64().and_then(|x| u32::try_from(x).ok()))
            .collect::<Option<Vec<u32>>>()
            .ok_or_else(|| Error::Parse(format!("{ctx}.alpha must hold nonnegative integers")))?;
        let alpha = MultiIndex(alpha);
        let slot = basis.index_of(&alpha).ok_or_else(|| {
            Error::Parse(format!(
                "moment {alpha} lies outside n={n}, degree={degree}"
            ))
        })?;
        let value = rational_value(field(e, "value", &ctx)?, &format!("moment {alpha}"))?;
        if slots.insert(slot, value).is_some() {
            return Err(Error::Parse(format!("duplicate moment {alpha}")));
        }
    }
    let mut values = Vec::with_capacity(basis.len());
    for (i, alpha) in basis.indices().iter().enumerate() {
        match slots.remove(&i) {
            Some(v) => values.push(v),
            None => return Err(Error::Parse(format!("missing moment {alpha}"))),
        }
    }
    MomentSequence::new(n, degree, values)
}

pub fn moments_to_json(s: &MomentSequence) -> Value {
    let moments: Vec<Value> = s
        .iter()
        .map(|(a, v)| json!({"alpha": a.entries(), "value": format_rational(v)}))
        .collect();
    json!({"n": s.n(), "degree": s.degree(), "moments": moments})
}

pub fn measure_from_json(v: &Value) -> Result<AtomicMeasure> {
    let n = as_usize(field(v, "n", "measure file")?, "n")?;
    let entries = as_array(field(v, "atoms", "measure file")?, "atoms")?;
    let mut atoms = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let ctx = format!("atoms[{i}]");
        let point = as_array(field(e, "point", &ctx)?, &format!("{ctx}.point"))?
            .iter()
            .enumerate()
            .map(|(j, x)| rational_value(x, &format!("{ctx}.point[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        let weight = rational_value(field(e, "weight", &ctx)?, &format!("{ctx}.weight"))?;
        atoms.push(Atom { point, weight });
    }
    AtomicMeasure::new(n, atoms)
}

pub fn measure_to_json(m: &AtomicMeasure) -> Value {
    let atoms: Vec<Value> = m
        .atoms()
        .iter()
        .map(|a| {
            json!({
                "point": a.point.iter().map(format_rational).collect::<Vec<_>>(),
                "weight": format_rational(&a.weight),
            })
        })
        .collect();
    json!({"n": m.n(), "atoms": atoms})
}

fn read_all(mut r: impl Read) -> Result<String> {
    let mut text = String::new();
    r.read_to_string(&mut text)
        .map_err(|e| Error::Io(e.to_string()))?;
    Ok(text)
}

pub fn read_moments(r: impl Read) -> Result<MomentSequence> {
    moments_from_json(&parse_json(&read_all(r)?)?)
}

pub fn read_measure(r: impl Read) -> Result<AtomicMeasure> {
    measure_from_json(&parse_json(&read_all(r)?)?)
}

fn write_value(mut w: impl Write, v: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_moments(w: impl Write, s: &MomentSequence) -> Result<()> {
    write_value(w, &moments_to_json(s))
}

pub fn write_measure(w: impl Write, m: &AtomicMeasure) -> Result<()> {
    write_value(w, &measure_to_json(m))
}

/// Big integers as JSON numbers when they fit in 64 bits, else as strings.
pub fn bigint_value(x: &BigInt) -> Value {
    if let Ok(v) = i64::try_from(x) {
        Value::from(v)
    } else if let Ok(v) = u64::try_from(x) {
        Value::from(v)
    } else {
        Value::String(x.to_string())
    }
}

/// Nearest `f64`; saturates to ±inf for huge magnitudes.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if x.is_zero() {
        return 0.0;
    }
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::atomic_moments;

    fn qi(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-7").unwrap(), qi(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&BigRational::new((-4).into(), 6.into())), "-2/3");
        assert_eq!(format_rational(&qi(5)), "5");
    }

    #[test]
    fn moments_round_trip() {
        let s = MomentSequence::univariate(vec![qi(4), qi(6), qi(14)]).unwrap();
        let mut buf = Vec::new();
        write_moments(&mut buf, &s).unwrap();
        assert_eq!(read_moments(buf.as_slice()).unwrap(), s);

        let m = AtomicMeasure::new(
            2,
            vec![
                Atom { point: vec![BigRational::new(1.into(), 3.into()), qi(2)], weight: qi(5) },
                Atom { point: vec![qi(-1), qi(0)], weight: BigRational::new(7.into(), 2.into()) },
            ],
        )
        .unwrap();
        let s = atomic_moments(&m, 3);
        let mut buf = Vec::new();
        write_moments(&mut buf, &s).unwrap();
        assert_eq!(read_moments(buf.as_slice()).unwrap(), s);

        let mut buf = Vec::new();
        write_measure(&mut buf, &m).unwrap();
        assert_eq!(read_measure(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn read_order_is_irrelevant() {
        let text = r#"{"n":1,"degree":2,"moments":[
            {"alpha":[2],"value":"14"},{"alpha":[0],"value":"4"},{"alpha":[1],"value":"6"}]}"#;
        let s = read_moments(text.as_bytes()).unwrap();
        assert_eq!(s.values(), &[qi(4), qi(6), qi(14)]);
    }

    #[test]
    fn moment_errors() {
        let missing = r#"{"n":2,"degree":1,"moments":[
            {"alpha":[1,0],"value":"1"},{"alpha":[0,1],"value":"1"}]}"#;
        let e = read_moments(missing.as_bytes()).unwrap_err().to_string();
        assert!(e.contains("missing moment [0,0]"), "{e}");

        let zero_den = r#"{"n":1,"degree":0,"moments":[{"alpha":[0],"value":"1/0"}]}"#;
        let e = read_moments(zero_den.as_bytes()).unwrap_err().to_string();
        assert!(e.contains("invalid rational") && e.contains("[0]"), "{e}");

        let dup = r#"{"n":1,"degree":0,"moments":[
            {"alpha":[0],"value":"1"},{"alpha":[0],"value":"2"}]}"#;
        let e = read_moments(dup.as_bytes()).unwrap_err().to_string();
        assert!(e.contains("duplicate moment [0]"), "{e}");

        assert!(read_moments("{not json".as_bytes()).is_err());
        let outside = r#"{"n":1,"degree":0,"moments":[{"alpha":[1],"value":"1"}]}"#;
        assert!(read_moments(outside.as_bytes()).is_err());
        let float = r#"{"n":1,"degree":0,"moments":[{"alpha":[0],"value":1.5}]}"#;
        assert!(read_moments(float.as_bytes()).is_err());
    }

    #[test]
    fn measure_errors() {
        let dup = r#"{"n":1,"atoms":[{"point":["1"],"weight":"1"},{"point":["2/2"],"weight":"1"}]}"#;
        assert!(read_measure(dup.as_bytes()).is_err());
        let dim = r#"{"n":2,"atoms":[{"point":["1"],"weight":"1"}]}"#;
        assert!(read_measure(dim.as_bytes()).is_err());
    }

    #[test]
    fn bigints() {
        assert_eq!(bigint_value(&BigInt::from(-3)), json!(-3));
        let big: BigInt = BigInt::from(u64::MAX) * 10;
        assert_eq!(bigint_value(&big), json!(big.to_string()));
    }
}
