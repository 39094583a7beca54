//! JSON files for matrices, tuples, channels, codes and witnesses.
//!
//! A matrix is a list of rows; an entry is `[re, im]` (a bare number is read
//! as a real entry). Floats are written with 17 significant digits so that
//! every value parses back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hybrid::{validate_channel, HybridCode, QuantumChannel, CHANNEL_TOL};
use crate::linalg::{c64, frobenius, ComplexMatrix, HermitianMatrix, PartialIsometry};
use crate::range::{verify_witness, HermitianTuple, Witness};

/// Frames read from files may carry rounding from hand-entered decimals.
pub const FILE_FRAME_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Complex([f64; 2]),
    Real(f64),
}

pub type MatrixJson = Vec<Vec<Entry>>;

/// `{"matrix": M}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub matrix: MatrixJson,
}

/// `{"n": n, "matrices": [M, …]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleFile {
    pub n: usize,
    pub matrices: Vec<MatrixJson>,
}

/// `{"n": n, "kraus": [M, …], "probabilities": [q, …]?}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub n: usize,
    pub kraus: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}

/// `{"k": k, "p": p, "sectors": [F, …]}` with each `F` an `n×k` frame.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub k: usize,
    pub p: usize,
    pub sectors: Vec<MatrixJson>,
}

/// Mirrors [`Witness`]; `d[j][r]` is entry `r` of `D_j`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub m: usize,
    pub v: MatrixJson,
    pub d: Vec<Vec<f64>>,
    pub residual: f64,
    pub tol: f64,
    pub accepted: bool,
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Entry::Complex([m[(i, j)].re, m[(i, j)].im])).collect())
        .collect()
}

/// Parses a rectangular matrix; `field` names it in error messages.
pub fn matrix_from_json(rows: &MatrixJson, field: &str) -> Result<ComplexMatrix> {
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.is_empty() || cols == 0 {
        return Err(Error::Schema(format!("`{field}` is an empty matrix")));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(Error::Schema(format!("`{field}` row {i} has {} entries, expected {cols}", r.len())));
    }
    let mut m = ComplexMatrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let (re, im) = match *e {
                Entry::Complex([re, im]) => (re, im),
                Entry::Real(re) => (re, 0.0),
            };
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Schema(format!("`{field}` entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = c64(re, im);
        }
    }
    Ok(m)
}

fn square(rows: &MatrixJson, field: &str, n: Option<usize>) -> Result<ComplexMatrix> {
    let m = matrix_from_json(rows, field)?;
    if m.nrows() != m.ncols() {
        return Err(Error::Schema(format!("`{field}` is {}x{}, expected a square matrix", m.nrows(), m.ncols())));
    }
    if let Some(n) = n {
        if m.nrows() != n {
            return Err(Error::Schema(format!("`{field}` has dimension {}, but `n` is {n}", m.nrows())));
        }
    }
    Ok(m)
}

fn hermitian(rows: &MatrixJson, field: &str, n: Option<usize>) -> Result<HermitianMatrix> {
    let m = square(rows, field, n)?;
    let skew = frobenius(&(&m - m.adjoint()));
    if skew > HERMITIAN_TOL * frobenius(&m).max(1.0) {
        return Err(Error::Schema(format!("`{field}` is not Hermitian (‖A − A*‖_F = {skew:.3e})")));
    }
    HermitianMatrix::new(m)
}

impl MatrixFile {
    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        hermitian(&self.matrix, "matrix", None)
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self { matrix: matrix_to_json(m) }
    }
}

impl TupleFile {
    pub fn to_tuple(&self) -> Result<HermitianTuple> {
        let ms = self
            .matrices
            .iter()
            .enumerate()
            .map(|(j, m)| hermitian(m, &format!("matrices[{j}]"), Some(self.n)))
            .collect::<Result<Vec<_>>>()?;
        HermitianTuple::with_dim(self.n, ms)
    }

    pub fn from_tuple(a: &HermitianTuple) -> Self {
        Self { n: a.dim(), matrices: a.matrices().iter().map(|h| matrix_to_json(h.as_matrix())).collect() }
    }
}

impl ChannelFile {
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        if self.kraus.is_empty() {
            return Err(Error::Schema("`kraus` is empty".into()));
        }
        let ks = self
            .kraus
            .iter()
            .enumerate()
            .map(|(i, m)| square(m, &format!("kraus[{i}]"), Some(self.n)))
            .collect::<Result<Vec<_>>>()?;
        let ch = validate_channel(ks, CHANNEL_TOL)?;
        match &self.probabilities {
            Some(p) if p.len() != self.kraus.len() => Err(Error::Schema(format!(
                "`probabilities` has {} entries for {} Kraus operators",
                p.len(),
                self.kraus.len()
            ))),
            Some(p) => ch.with_probabilities(p.clone()),
            None => Ok(ch),
        }
    }

    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self {
            n: ch.n(),
            kraus: ch.kraus().iter().map(matrix_to_json).collect(),
            probabilities: ch.probabilities().map(|p| p.to_vec()),
        }
    }
}

impl CodeFile {
    pub fn to_code(&self) -> Result<HybridCode> {
        if self.sectors.len() != self.p {
            return Err(Error::Schema(format!("`sectors` has {} frames but `p` is {}", self.sectors.len(), self.p)));
        }
        let mut frames = Vec::with_capacity(self.p);
        for (r, s) in self.sectors.iter().enumerate() {
            let field = format!("sectors[{r}]");
            let m = matrix_from_json(s, &field)?;
            if m.ncols() != self.k {
                return Err(Error::Schema(format!("`{field}` has {} columns but `k` is {}", m.ncols(), self.k)));
            }
            frames.push(
                PartialIsometry::with_tolerance(m, FILE_FRAME_TOL)
                    .map_err(|e| Error::Schema(format!("`{field}`: {e}")))?,
            );
        }
        HybridCode::new(frames)
    }

    pub fn from_code(code: &HybridCode) -> Self {
        Self { k: code.k, p: code.p, sectors: code.sectors.iter().map(|s| matrix_to_json(s.matrix())).collect() }
    }
}

impl WitnessFile {
    /// The frame, checked for shape and orthonormality.
    pub fn frame(&self) -> Result<PartialIsometry> {
        let m = matrix_from_json(&self.v, "v")?;
        if m.nrows() != self.n || m.ncols() != self.k * self.p {
            return Err(Error::Schema(format!(
                "`v` is {}x{}, expected n x kp = {}x{}",
                m.nrows(),
                m.ncols(),
                self.n,
                self.k * self.p
            )));
        }
        PartialIsometry::with_tolerance(m, FILE_FRAME_TOL).map_err(|e| Error::Schema(format!("`v`: {e}")))
    }

    /// Recomputes `D` and the residual against `a`; the stored values are
    /// not trusted.
    pub fn reverify(&self, a: &HermitianTuple, tol: f64) -> Result<Witness> {
        if a.dim() != self.n {
            return Err(Error::Schema(format!("witness `n` is {}, tuple dimension is {}", self.n, a.dim())));
        }
        verify_witness(a, &self.frame()?, self.k, self.p, tol)
    }

    pub fn from_witness(w: &Witness) -> Self {
        Self {
            n: w.v.ambient_dim(),
            k: w.k,
            p: w.p,
            m: w.m(),
            v: matrix_to_json(w.v.matrix()),
            d: w.d.clone(),
            residual: w.residual,
            tol: w.tol,
            accepted: w.accepted,
        }
    }
}

/// Pretty JSON: objects one key per line, arrays of numbers (and arrays of
/// those) on a single line, floats as `{:.16e}`.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0)?;
    out.push('\n');
    Ok(out)
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| match x {
            Value::Array(inner) => inner.iter().all(|y| !y.is_array() && !y.is_object()),
            Value::Object(_) => false,
            _ => true,
        }),
        _ => true,
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) -> Result<()> {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&serde_json::to_string(v)?),
        Value::Number(num) => {
            if let Some(f) = num.as_f64().filter(|_| num.is_f64()) {
                if !f.is_finite() {
                    return Err(Error::NonFinite);
                }
                write!(out, "{f:.16e}").expect("writing to a String");
            } else {
                out.push_str(&num.to_string());
            }
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if is_flat(v) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, x, depth)?;
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(out, x, depth + 1)?;
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (key, x)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(key)?);
                out.push_str(": ");
                write_value(out, x, depth + 1)?;
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
    Ok(())
}

pub fn from_json_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hybrid::{bitflip_sectors, bitflip_x2};
    use crate::linalg::pauli;

    #[test]
    fn floats_use_seventeen_digits() {
        let s = to_json_string(&serde_json::json!({"x": 0.1, "n": 3, "v": [[1.0, -2.5]]})).unwrap();
        assert!(s.contains("\"x\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": 3"));
        assert!(s.contains("[[1.0000000000000000e0, -2.5000000000000000e0]]"), "{s}");
    }

    #[test]
    fn channel_round_trip_is_bit_exact() {
        let ch = bitflip_x2(0.3).unwrap();
        let text = to_json_string(&ChannelFile::from_channel(&ch)).unwrap();
        let back = from_json_str::<ChannelFile>(&text).unwrap().to_channel().unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn code_round_trip() {
        let code = bitflip_sectors();
        let text = to_json_string(&CodeFile::from_code(&code)).unwrap();
        let back = from_json_str::<CodeFile>(&text).unwrap().to_code().unwrap();
        assert_eq!(back, code);
    }

    #[test]
    fn real_entries_are_accepted() {
        let f: MatrixFile = from_json_str(r#"{"matrix": [[1, 0], [0, [-1, 0]]]}"#).unwrap();
        let h = f.to_hermitian().unwrap();
        assert_eq!(h.as_matrix(), &pauli::z());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = r#"{"n": 2, "matrices": [[[1, 0], [0, 1]], [[1, 0, 0], [0, 1]]]}"#;
        let err = from_json_str::<TupleFile>(bad).unwrap().to_tuple().unwrap_err().to_string();
        assert!(err.contains("matrices[1]"), "{err}");

        let err = from_json_str::<ChannelFile>(r#"{"n": 2}"#).unwrap_err().to_string();
        assert!(err.contains("kraus"), "{err}");

        let skew = r#"{"matrix": [[0, 1], [0, 0]]}"#;
        let err = from_json_str::<MatrixFile>(skew).unwrap().to_hermitian().unwrap_err().to_string();
        assert!(err.contains("not Hermitian"), "{err}");
    }
}
