use nalgebra::DVector;
use num_complex::Complex64;

use super::{frobenius, identity, is_finite, ComplexMatrix, ORTHONORMAL_TOL};
use crate::error::{Error, Result};

/// An `n×K` matrix with orthonormal columns (`V*V = I_K`).
#[derive(Clone, Debug, PartialEq)]
pub struct PartialIsometry(ComplexMatrix);

impl PartialIsometry {
    /// Checks `‖V*V − I‖_F ≤ 1e−12`.
    pub fn new(v: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(v, ORTHONORMAL_TOL)
    }

    pub fn with_tolerance(v: ComplexMatrix, tol: f64) -> Result<Self> {
        if !is_finite(&v) {
            return Err(Error::NonFinite);
        }
        if v.ncols() > v.nrows() {
            return Err(Error::NotOrthonormal { defect: f64::INFINITY });
        }
        let defect = orthonormality_defect(&v);
        if defect > tol {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self(v))
    }

    /// Nearest isometry `M (M*M)^{-1/2}` (polar factor), for inputs whose
    /// columns are already close to orthonormal or at least independent.
    pub fn polar(m: &ComplexMatrix) -> Result<Self> {
        if m.ncols() == 0 {
            return Ok(Self(m.clone()));
        }
        let svd = m.clone().svd(true, true);
        let (u, vt) = match (svd.u, svd.v_t) {
            (Some(u), Some(vt)) => (u, vt),
            _ => return Err(Error::EigenNoConvergence),
        };
        if svd.singular_values.iter().any(|s| *s <= f64::EPSILON) {
            return Err(Error::NotOrthonormal { defect: 1.0 });
        }
        Self::new(u * vt)
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn frame_dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Columns `start..start+len` as a smaller frame.
    pub fn columns(&self, start: usize, len: usize) -> PartialIsometry {
        PartialIsometry(self.0.columns(start, len).into_owned())
    }

    /// `[self | other]`; fails if the result is not orthonormal.
    pub fn concat(&self, other: &PartialIsometry) -> Result<PartialIsometry> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch {
                what: "frame concatenation",
                expected: self.ambient_dim(),
                found: other.ambient_dim(),
            });
        }
        let n = self.ambient_dim();
        let (a, b) = (self.frame_dim(), other.frame_dim());
        let mut m = ComplexMatrix::zeros(n, a + b);
        m.columns_mut(0, a).copy_from(&self.0);
        m.columns_mut(a, b).copy_from(&other.0);
        PartialIsometry::new(m)
    }

    /// Orthogonal projection `V V*`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.0 * self.0.adjoint()
    }
}

pub(crate) fn orthonormality_defect(v: &ComplexMatrix) -> f64 {
    let gram = v.adjoint() * v;
    frobenius(&(gram - identity(v.ncols())))
}

/// Orthonormal basis of the span of `columns`.
///
/// Modified Gram–Schmidt, pivoting on the largest remaining norm (ties go to
/// the lowest index). A candidate is dropped once its residual norm falls to
/// `tol` times the largest input norm, so the column count is the numerical
/// rank.
pub fn orthonormalize(columns: &[DVector<Complex64>], tol: f64) -> Result<PartialIsometry> {
    let first = columns.first().ok_or(Error::EmptyInput)?;
    let n = first.len();
    if let Some(bad) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::DimensionMismatch {
            what: "orthonormalize",
            expected: n,
            found: bad.len(),
        });
    }
    let mut work: Vec<DVector<Complex64>> = columns.to_vec();
    let scale = work.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut remaining: Vec<usize> = (0..work.len()).collect();
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    if scale == 0.0 || !scale.is_finite() {
        return Ok(PartialIsometry(ComplexMatrix::zeros(n, 0)));
    }
    let cutoff = tol * scale;
    while !remaining.is_empty() && basis.len() < n {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (pos, &idx) in remaining.iter().enumerate() {
            let nrm = work[idx].norm();
            if nrm > best_norm {
                best_norm = nrm;
                best = pos;
            }
        }
        if best_norm <= cutoff {
            break;
        }
        let idx = remaining.remove(best);
        let mut q = work[idx].clone();
        // second pass removes what the first one left behind
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.dotc(&q);
                q -= b * coeff;
            }
        }
        let nrm = q.norm();
        if nrm <= cutoff {
            continue;
        }
        q /= Complex64::from(nrm);
        for &other in &remaining {
            let coeff = q.dotc(&work[other]);
            let update = &q * coeff;
            work[other] -= update;
        }
        basis.push(q);
    }
    let mut m = ComplexMatrix::zeros(n, basis.len());
    for (j, b) in basis.iter().enumerate() {
        m.set_column(j, b);
    }
    PartialIsometry::new(m)
}

pub fn orthonormalize_matrix(m: &ComplexMatrix, tol: f64) -> Result<PartialIsometry> {
    let cols: Vec<DVector<Complex64>> = m.column_iter().map(|c| c.into_owned()).collect();
    orthonormalize(&cols, tol)
}

/// Orthonormal basis of the orthogonal complement of `frame`'s span.
pub fn complement(frame: &PartialIsometry) -> Result<PartialIsometry> {
    let n = frame.ambient_dim();
    let want = n - frame.frame_dim();
    if want == 0 {
        return Ok(PartialIsometry(ComplexMatrix::zeros(n, 0)));
    }
    let residual = identity(n) - frame.projector();
    let basis = orthonormalize_matrix(&residual, 1e-8)?;
    if basis.frame_dim() != want {
        return Err(Error::Construction(format!(
            "complement has {} columns, expected {want}",
            basis.frame_dim()
        )));
    }
    // one more sweep against the frame itself keeps the union orthonormal
    let m = basis.matrix() - frame.matrix() * (frame.matrix().adjoint() * basis.matrix());
    PartialIsometry::polar(&m)
}
