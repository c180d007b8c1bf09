//! JSON formats for matrices, vectors and rationals.
//!
//! A matrix is `{"n_qubits": n, "backend": "exact"|"float", "entries": rows}`
//! where every entry is `{"re": x, "im": y}`. Exact entries are rational
//! strings such as `"3/4"`; float entries are JSON numbers.

use num::BigRational;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::scalar::{parse_rational, rational_to_f64, Complex64, GaussianRational};
use crate::linalg::{Backend, ComplexMatrix, Ket};

/// Serializes a rational as its `"p/q"` string.
pub fn ser_rational<S: Serializer>(
    q: &BigRational,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_str(&q.to_string())
}

/// Parses a rational from a JSON string (`"p/q"`, integer or decimal) or a
/// JSON integer. Non-integer JSON numbers are rejected so that exact inputs
/// never pass through floating point.
pub fn rational_from_value(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(BigRational::from_integer(n.as_i64().unwrap().into())),
        other => Err(Error::Parse(format!("expected a rational string, got {other}"))),
    }
}

fn float_from_value(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}"))),
        Value::String(s) => parse_rational(s).map(|q| rational_to_f64(&q)),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

fn entry_json(z: &GaussianRational) -> Value {
    json!({"re": z.re.to_string(), "im": z.im.to_string()})
}

fn float_entry_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::Parse(format!("missing field {name:?}")))
}

fn exact_entry(v: &Value) -> Result<GaussianRational> {
    let im = match v.get("im") {
        Some(im) => rational_from_value(im)?,
        None => BigRational::from_integer(0.into()),
    };
    Ok(GaussianRational::new(rational_from_value(field(v, "re")?)?, im))
}

fn float_entry(v: &Value) -> Result<Complex64> {
    let im = match v.get("im") {
        Some(im) => float_from_value(im)?,
        None => 0.0,
    };
    Ok(Complex64::new(float_from_value(field(v, "re")?)?, im))
}

/// Dense JSON rendering in index order.
pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    let dim = m.dim();
    let rows: Vec<Value> = (0..dim)
        .map(|i| {
            Value::Array(
                (0..dim)
                    .map(|j| match m.exact_entry(i, j) {
                        Some(z) => entry_json(&z),
                        None => float_entry_json(m.entry(i, j)),
                    })
                    .collect(),
            )
        })
        .collect();
    json!({"n_qubits": m.n_qubits(), "backend": m.backend(), "entries": rows})
}

pub fn matrix_from_json(v: &Value) -> Result<ComplexMatrix> {
    let n_qubits = field(v, "n_qubits")?
        .as_u64()
        .ok_or_else(|| Error::Parse("n_qubits must be a nonnegative integer".into()))?
        as usize;
    if n_qubits > 14 {
        return Err(Error::InvalidParameter(format!("{n_qubits} qubits is beyond the supported size")));
    }
    let backend: Backend = serde_json::from_value(field(v, "backend")?.clone())?;
    let rows = field(v, "entries")?
        .as_array()
        .ok_or_else(|| Error::Parse("entries must be an array of rows".into()))?;
    let dim = 1usize << n_qubits;
    if rows.len() != dim {
        return Err(Error::BadShape { n_qubits, len: rows.len(), expected: dim });
    }
    let mut cells = Vec::with_capacity(dim * dim);
    for row in rows {
        let row = row.as_array().ok_or_else(|| Error::Parse("each row must be an array".into()))?;
        if row.len() != dim {
            return Err(Error::BadShape { n_qubits, len: row.len(), expected: dim });
        }
        cells.extend(row.iter());
    }
    match backend {
        Backend::Exact => ComplexMatrix::from_exact(
            n_qubits,
            cells.into_iter().map(exact_entry).collect::<Result<_>>()?,
        ),
        Backend::Float => ComplexMatrix::from_float(
            n_qubits,
            cells.into_iter().map(float_entry).collect::<Result<_>>()?,
        ),
    }
}

/// A vector is a JSON array of `2^n` entries `{"re", "im"}`; it is exact
/// when every component is given as a rational string or integer.
pub fn ket_from_json(v: &Value) -> Result<Ket> {
    let items = v.as_array().ok_or_else(|| Error::Parse("a vector must be an array".into()))?;
    let n_qubits = items.len().trailing_zeros() as usize;
    if items.is_empty() || 1usize << n_qubits != items.len() {
        return Err(Error::Parse(format!("vector length {} is not a power of two", items.len())));
    }
    match items.iter().map(exact_entry).collect::<Result<Vec<_>>>() {
        Ok(amps) => Ket::from_exact(n_qubits, amps),
        Err(_) => Ket::from_float(n_qubits, items.iter().map(float_entry).collect::<Result<_>>()?),
    }
}

/// Raw matrix document, for embedding in larger configuration files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixDoc(pub Value);

impl MatrixDoc {
    pub fn parse(&self) -> Result<ComplexMatrix> {
        matrix_from_json(&self.0)
    }
}
