//! JSON encodings: big integers and rationals travel as decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::coords::DynnikovVector;
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, Mat, RatMatrix};
use crate::matrix::{DynnikovMatrix, UnstableDirection};
use crate::scalar::{f64_to_rational, Scalar, ScalarKind};

pub fn parse_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else if let Some(x) = n.as_f64() {
                Ok(f64_to_rational(x))
            } else {
                Err(Error::Parse(format!("bad number {n}")))
            }
        }
        Value::String(s) => parse_rational_str(s),
        _ => Err(Error::Parse(format!("expected a number, got {v}"))),
    }
}

pub fn parse_rational_str(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(i));
    }
    // finite decimal like "-0.5" or "1.25e3"
    let x: f64 = s.parse().map_err(|_| bad())?;
    if !x.is_finite() {
        return Err(bad());
    }
    decimal_to_rational(s).ok_or_else(bad)
}

fn decimal_to_rational(s: &str) -> Option<BigRational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: BigInt = format!("{ip}{fp}").parse().ok()?;
    let e = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    Some(if e >= 0 {
        BigRational::from_integer(digits * ten.pow(e as u32))
    } else {
        BigRational::new(digits, ten.pow((-e) as u32))
    })
}

pub fn parse_integer(v: &Value) -> Result<BigInt> {
    let r = parse_rational(v)?;
    if !r.is_integer() {
        return Err(Error::Parse(format!("expected an integer, got {v}")));
    }
    Ok(r.to_integer())
}

fn rows_of(v: &Value) -> Result<&Vec<Value>> {
    let v = match v {
        Value::Object(o) => o.get("matrix").ok_or_else(|| Error::Parse("missing \"matrix\"".into()))?,
        _ => v,
    };
    v.as_array().ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))
}

fn parse_mat<T: Clone>(v: &Value, f: impl Fn(&Value) -> Result<T>) -> Result<Mat<T>> {
    let rows = rows_of(v)?
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(&f)
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Mat::from_rows(rows)
}

/// Matrix given as rows, or as an object with a `matrix` field.
pub fn parse_int_matrix(v: &Value) -> Result<IntMatrix> {
    parse_mat(v, parse_integer)
}

pub fn parse_rat_matrix(v: &Value) -> Result<RatMatrix> {
    parse_mat(v, parse_rational)
}

pub fn int_matrix_json(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| json!(x.to_string())).collect())).collect(),
    )
}

pub fn rat_matrix_json(m: &RatMatrix) -> Value {
    Value::Array(
        (0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| json!(x.to_string())).collect())).collect(),
    )
}

pub fn scalar_json<S: Scalar + ToString>(x: &S) -> Value {
    match S::KIND {
        ScalarKind::Float => json!(x.to_f64()),
        _ => json!(x.to_string()),
    }
}

pub fn vector_json<S: Scalar + ToString>(v: &DynnikovVector<S>) -> Value {
    json!({
        "n": v.strands(),
        "a": v.a().iter().map(scalar_json).collect::<Vec<_>>(),
        "b": v.b().iter().map(scalar_json).collect::<Vec<_>>(),
    })
}

/// `{"n", "a", "b"}` object or a flat array `[a..., b...]`.
pub fn parse_vector(v: &Value) -> Result<DynnikovVector<BigRational>> {
    let list = |x: &Value| -> Result<Vec<BigRational>> {
        x.as_array()
            .ok_or_else(|| Error::Parse("coordinates must be an array".into()))?
            .iter()
            .map(parse_rational)
            .collect()
    };
    match v {
        Value::Array(_) => DynnikovVector::from_flat(list(v)?),
        Value::Object(o) => {
            let a = list(o.get("a").ok_or_else(|| Error::Parse("missing \"a\"".into()))?)?;
            let b = list(o.get("b").ok_or_else(|| Error::Parse("missing \"b\"".into()))?)?;
            let v = DynnikovVector::new(a, b)?;
            if let Some(n) = o.get("n").and_then(Value::as_u64) {
                if n as usize != v.strands() {
                    return Err(Error::StrandMismatch(n as usize, v.strands()));
                }
            }
            Ok(v)
        }
        _ => Err(Error::Parse("expected a coordinate vector".into())),
    }
}

/// JSON, or a bracketed list of rationals such as `[1/2, -1, 0, 3]`.
pub fn parse_vector_text(s: &str) -> Result<DynnikovVector<BigRational>> {
    if let Ok(v) = serde_json::from_str::<Value>(s) {
        return parse_vector(&v);
    }
    let inner = s.trim().strip_prefix(['[', '(']).and_then(|t| t.strip_suffix([']', ')']));
    let inner = inner.ok_or_else(|| Error::Parse(format!("vector: cannot read {s:?}")))?;
    let items = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_rational_str)
        .collect::<Result<Vec<_>>>()?;
    DynnikovVector::from_flat(items)
}

pub fn dynnikov_matrix_json(m: &DynnikovMatrix) -> Value {
    json!({
        "matrix": int_matrix_json(&m.matrix),
        "region": m.region.iter().map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn direction_json(d: &UnstableDirection) -> Value {
    json!({
        "point": vector_json(&d.point_f64()),
        "dilatation_estimate": d.dilatation,
        "iterations": d.iterations,
        "precision_bits": d.precision,
        "residual": d.residual,
    })
}
