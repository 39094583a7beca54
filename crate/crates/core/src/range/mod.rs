//! Joint rank-(k:p) matricial ranges.
//!
//! A tuple `(D_1, …, D_m)` of real diagonal `p×p` matrices belongs to the range
//! of `A = (A_1, …, A_m)` when some `n×kp` partial isometry `V` gives
//! `V* A_j V = D_j ⊗ I_k` for every `j`. This module holds the tuple and
//! witness types, witness verification, and the solvers that produce
//! witnesses or emptiness certificates.

mod commuting;
mod constructive;
mod diagonal;
mod finder;
mod guarantee;
pub(crate) mod lp;
mod single;

pub use commuting::{
    commuting_find, commuting_find_capped, joint_spectrum, solve_commuting, JointCluster,
    JointSpectrum, COMMUTING_TOL,
};
pub use constructive::constructive_find;
pub use diagonal::{
    diagonal_find, diagonal_find_with_budget, diagonal_outer_empty, diagonal_outer_test,
    separation_instance, separation_window, DiagonalPointSet, OuterBound, DEFAULT_PARTITION_BUDGET,
    SUBSET_LIMIT,
};
pub use finder::find;
pub use guarantee::{guarantee_dim, guarantee_dim_with_source, GuaranteeSource};
pub use single::{single_membership, single_range, single_witness, RangeBox};

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    compress, frobenius, max_commutator, real_span_basis, ComplexMatrix, HermitianMatrix,
    PartialIsometry, SpanBasis,
};

/// Default acceptance threshold for witness residuals.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-8;

/// `m` Hermitian matrices of a common dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianTuple {
    dim: usize,
    matrices: Vec<HermitianMatrix>,
}

impl HermitianTuple {
    pub fn new(matrices: Vec<HermitianMatrix>) -> Result<Self> {
        let dim = matrices
            .first()
            .map(|m| m.dim())
            .ok_or_else(|| Error::InvalidParameter("tuple needs at least one matrix".into()))?;
        Self::with_dim(dim, matrices)
    }

    /// Allows the empty tuple (`m = 0`), which needs an explicit dimension.
    pub fn with_dim(dim: usize, matrices: Vec<HermitianMatrix>) -> Result<Self> {
        if let Some(bad) = matrices.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                what: "hermitian tuple",
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { dim, matrices })
    }

    pub fn single(a: HermitianMatrix) -> Self {
        Self { dim: a.dim(), matrices: vec![a] }
    }

    pub fn from_diagonals(points: &DiagonalPointSet) -> Self {
        let n = points.len();
        let matrices = (0..points.m())
            .map(|i| {
                let diag: Vec<f64> = points.points().iter().map(|p| p[i]).collect();
                HermitianMatrix::from_real_diagonal(&diag)
            })
            .collect();
        Self { dim: n, matrices }
    }

    pub fn m(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.matrices
    }

    pub fn get(&self, j: usize) -> &HermitianMatrix {
        &self.matrices[j]
    }

    pub fn scale(&self) -> f64 {
        self.matrices.iter().fold(0.0, |s, a| s.max(a.frobenius()))
    }

    pub fn commutator_defect(&self) -> f64 {
        max_commutator(&self.matrices)
    }

    /// Pairwise commutators vanish to `COMMUTING_TOL · scale²`.
    pub fn is_commuting(&self) -> bool {
        let s = self.scale();
        self.commutator_defect() <= COMMUTING_TOL * (s * s).max(f64::MIN_POSITIVE)
    }

    pub fn is_diagonal(&self) -> bool {
        self.matrices.iter().all(|a| a.is_diagonal())
    }

    /// Drops identity components and linear dependencies, keeping a subset
    /// whose members together with `I` are linearly independent.
    pub fn reduce(&self, tol: f64) -> Result<(HermitianTuple, SpanBasis)> {
        let span = real_span_basis(&self.matrices, tol)?;
        let reduced = HermitianTuple::with_dim(self.dim, span.basis.clone())?;
        Ok((reduced, span))
    }

    /// `Ã_j = Σ_l t[l][j] A_l + c_j I` for a real `m×m` matrix `t`.
    pub fn affine_transform(&self, t: &[Vec<f64>], c: &[f64]) -> Result<HermitianTuple> {
        let m = self.m();
        check_affine(t, c, m)?;
        let matrices = (0..m)
            .map(|j| {
                let terms: Vec<(f64, &HermitianMatrix)> =
                    (0..m).map(|l| (t[l][j], &self.matrices[l])).collect();
                HermitianMatrix::combination(&terms, c[j], self.dim)
            })
            .collect();
        HermitianTuple::with_dim(self.dim, matrices)
    }
}

fn check_affine(t: &[Vec<f64>], c: &[f64], m: usize) -> Result<()> {
    if t.len() != m || t.iter().any(|row| row.len() != m) || c.len() != m {
        return Err(Error::InvalidParameter(format!("affine map must be {m}x{m} with {m} shifts")));
    }
    Ok(())
}

/// A frame `V` together with the best diagonal tuple for it.
#[derive(Clone, Debug)]
pub struct Witness {
    pub v: PartialIsometry,
    /// `d[j][r]` is entry `r` of `D_j`.
    pub d: Vec<Vec<f64>>,
    pub k: usize,
    pub p: usize,
    /// `sqrt(Σ_j ‖V*A_jV − D_j⊗I_k‖_F²)`.
    pub residual: f64,
    pub tol: f64,
    pub accepted: bool,
}

impl Witness {
    pub fn m(&self) -> usize {
        self.d.len()
    }

    /// Columns of sector `r` (the `r`-th group of `k` columns).
    pub fn sector(&self, r: usize) -> PartialIsometry {
        self.v.columns(r * self.k, self.k)
    }

    /// Row `r` of the diagonal tuple, i.e. `(D_1[r], …, D_m[r])`.
    pub fn row(&self, r: usize) -> Vec<f64> {
        self.d.iter().map(|dj| dj[r]).collect()
    }

    /// Sorts sectors so the rows `(D_1[r], …, D_m[r])` are lexicographically
    /// non-increasing, permuting the column groups of `V` to match.
    pub fn canonicalize(mut self) -> Self {
        let mut order: Vec<usize> = (0..self.p).collect();
        let rows: Vec<Vec<f64>> = (0..self.p).map(|r| self.row(r)).collect();
        order.sort_by(|&a, &b| lex_desc(&rows[a], &rows[b]).then(a.cmp(&b)));
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return self;
        }
        let n = self.v.ambient_dim();
        let src = self.v.matrix();
        let mut m = ComplexMatrix::zeros(n, self.k * self.p);
        for (dst, &from) in order.iter().enumerate() {
            m.columns_mut(dst * self.k, self.k)
                .copy_from(&src.columns(from * self.k, self.k));
        }
        self.d = self
            .d
            .iter()
            .map(|dj| order.iter().map(|&r| dj[r]).collect())
            .collect();
        self.v = PartialIsometry::new(m).expect("column permutation keeps orthonormality");
        self
    }

    /// Applies `D̃_j = Σ_l t[l][j] D_l + c_j I` without touching `V`.
    pub fn transform_d(&self, t: &[Vec<f64>], c: &[f64]) -> Result<Vec<Vec<f64>>> {
        let m = self.m();
        check_affine(t, c, m)?;
        Ok((0..m)
            .map(|j| {
                (0..self.p)
                    .map(|r| (0..m).map(|l| t[l][j] * self.d[l][r]).sum::<f64>() + c[j])
                    .collect()
            })
            .collect())
    }
}

const ROW_TIE: f64 = 1e-9;

pub(crate) fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > ROW_TIE * (1.0 + x.abs().max(y.abs())) {
            return y.total_cmp(x);
        }
    }
    Ordering::Equal
}

/// Which exact argument, if any, backs a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateType {
    /// Eigenvalue interlacing for a single Hermitian matrix.
    ExactInterlacing,
    /// Joint spectrum of a commuting family.
    ExactCommuting,
    /// Convex-hull outer bound for diagonal tuples.
    OuterBound,
    /// Numerical search only; "not found" proves nothing.
    SearchOnly,
}

impl CertificateType {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateType::ExactInterlacing => "exact-interlacing",
            CertificateType::ExactCommuting => "exact-commuting",
            CertificateType::OuterBound => "outer-bound",
            CertificateType::SearchOnly => "search-only",
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, CertificateType::SearchOnly)
    }
}

impl fmt::Display for CertificateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Why a solver came back empty-handed.
#[derive(Clone, Debug)]
pub struct NotFound {
    /// `ExactInterlacing`, `ExactCommuting` or `OuterBound` mean the range is
    /// provably empty; `SearchOnly` means the search simply failed.
    pub certificate: CertificateType,
    /// Recursion depth at which the search gave up (0 for the top level).
    pub depth: usize,
    pub notes: Vec<String>,
}

impl NotFound {
    pub fn proven_empty(certificate: CertificateType, note: impl Into<String>) -> Self {
        Self { certificate, depth: 0, notes: vec![note.into()] }
    }

    pub fn search(depth: usize, note: impl Into<String>) -> Self {
        Self { certificate: CertificateType::SearchOnly, depth, notes: vec![note.into()] }
    }

    pub fn is_certified_empty(&self) -> bool {
        self.certificate.is_exact()
    }
}

/// Result of a solver: a witness (with the route that produced it) or a
/// labelled failure.
#[derive(Clone, Debug)]
pub enum Outcome {
    Found { witness: Witness, certificate: CertificateType },
    NotFound(NotFound),
}

impl Outcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Outcome::Found { witness, .. } => Some(witness),
            Outcome::NotFound(_) => None,
        }
    }

    pub fn into_witness(self) -> Option<Witness> {
        match self {
            Outcome::Found { witness, .. } => Some(witness),
            Outcome::NotFound(_) => None,
        }
    }

    pub fn certificate(&self) -> CertificateType {
        match self {
            Outcome::Found { certificate, .. } => *certificate,
            Outcome::NotFound(nf) => nf.certificate,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found { .. })
    }
}

pub(crate) fn check_frame_size(k: usize, p: usize, n: usize) -> Result<()> {
    if k == 0 || p == 0 {
        return Err(Error::InvalidParameter("k and p must be at least 1".into()));
    }
    if k * p > n {
        return Err(Error::FrameTooLarge { k, p, n });
    }
    Ok(())
}

/// Compressions `V*A_jV`, the block-mean diagonals `D_j` that minimize the
/// residual for this `V`, and that residual.
pub(crate) fn best_diagonals(
    a: &HermitianTuple,
    v: &PartialIsometry,
    k: usize,
    p: usize,
) -> Result<(Vec<Vec<f64>>, f64)> {
    let mut d = Vec::with_capacity(a.m());
    let mut total = 0.0;
    for aj in a.matrices() {
        let c = compress(aj.as_matrix(), v)?;
        let (dj, r2) = block_means(&c, k, p);
        total += r2;
        d.push(dj);
    }
    Ok((d, total.sqrt()))
}

/// Block means of the `k×k` diagonal blocks and the squared distance from
/// `c` to `diag(means) ⊗ I_k`.
pub(crate) fn block_means(c: &ComplexMatrix, k: usize, p: usize) -> (Vec<f64>, f64) {
    let means: Vec<f64> = (0..p)
        .map(|r| (0..k).map(|s| c[(r * k + s, r * k + s)].re).sum::<f64>() / k as f64)
        .collect();
    let mut r2 = 0.0;
    for i in 0..k * p {
        for j in 0..k * p {
            let target = if i == j { means[i / k] } else { 0.0 };
            r2 += (c[(i, j)] - Complex64::from(target)).norm_sqr();
        }
    }
    (means, r2)
}

/// Recomputes the best `D_j` and the exact residual for a candidate frame.
pub fn verify_witness(
    a: &HermitianTuple,
    v: &PartialIsometry,
    k: usize,
    p: usize,
    tol: f64,
) -> Result<Witness> {
    check_frame_size(k, p, a.dim())?;
    if v.ambient_dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            what: "witness frame rows",
            expected: a.dim(),
            found: v.ambient_dim(),
        });
    }
    if v.frame_dim() != k * p {
        return Err(Error::DimensionMismatch {
            what: "witness frame columns",
            expected: k * p,
            found: v.frame_dim(),
        });
    }
    let (d, residual) = best_diagonals(a, v, k, p)?;
    Ok(Witness { v: v.clone(), d, k, p, residual, tol, accepted: residual <= tol })
}

/// Frobenius distance between two compressions, used by tests and reports.
pub fn compression_error(a: &HermitianMatrix, v: &PartialIsometry, target: &ComplexMatrix) -> Result<f64> {
    Ok(frobenius(&(compress(a.as_matrix(), v)? - target)))
}
