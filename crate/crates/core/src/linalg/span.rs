use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::HermitianMatrix;
use crate::error::{Error, Result};

/// Result of [`real_span_basis`].
#[derive(Clone, Debug)]
pub struct SpanBasis {
    /// Selected inputs; together with `I` they are linearly independent.
    pub basis: Vec<HermitianMatrix>,
    /// Positions of the selected inputs in the original list.
    pub selected: Vec<usize>,
    /// Row `i` writes input `i` as `coords[i][0]·I + Σ_q coords[i][q+1]·basis[q]`.
    pub coords: Vec<Vec<f64>>,
}

impl SpanBasis {
    pub fn m(&self) -> usize {
        self.basis.len()
    }
}

/// Maximal subset of `ops` that is real-linearly independent modulo the identity.
///
/// Inputs are scanned in order; each one's traceless part is kept when its
/// Gram–Schmidt residual exceeds `tol` times the largest eigenvalue of the
/// Gram matrix of all traceless parts (trace inner product `Re tr(AB*)`).
pub fn real_span_basis(ops: &[HermitianMatrix], tol: f64) -> Result<SpanBasis> {
    let Some(first) = ops.first() else {
        return Ok(SpanBasis { basis: vec![], selected: vec![], coords: vec![] });
    };
    let n = first.dim();
    if let Some(bad) = ops.iter().find(|o| o.dim() != n) {
        return Err(Error::DimensionMismatch {
            what: "real_span_basis",
            expected: n,
            found: bad.dim(),
        });
    }
    let id = HermitianMatrix::identity(n);
    let traceless: Vec<HermitianMatrix> = ops
        .iter()
        .map(|o| HermitianMatrix::combination(&[(1.0, o)], -o.trace() / n as f64, n))
        .collect();

    let count = traceless.len();
    let gram = DMatrix::from_fn(count, count, |i, j| traceless[i].inner(&traceless[j]));
    let largest = SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, v| m.max(*v));
    let cutoff = tol * largest;

    let mut ortho: Vec<HermitianMatrix> = Vec::new();
    let mut selected = Vec::new();
    if largest > 0.0 {
        for (i, t) in traceless.iter().enumerate() {
            let mut r = t.clone();
            for _ in 0..2 {
                for q in &ortho {
                    let c = r.inner(q);
                    r = HermitianMatrix::combination(&[(1.0, &r), (-c, q)], 0.0, n);
                }
            }
            let norm2 = r.inner(&r);
            if norm2 > cutoff {
                ortho.push(r.scale(1.0 / norm2.sqrt()));
                selected.push(i);
            }
        }
    }
    let basis: Vec<HermitianMatrix> = selected.iter().map(|&i| ops[i].clone()).collect();

    // coordinates against {I, basis} through the (full-rank) Gram system
    let mut full = vec![&id];
    full.extend(basis.iter());
    let dim = full.len();
    let g = DMatrix::from_fn(dim, dim, |i, j| full[i].inner(full[j]));
    let chol = g
        .cholesky()
        .ok_or_else(|| Error::Construction("span basis Gram matrix is singular".into()))?;
    let coords = ops
        .iter()
        .map(|o| {
            let rhs = DVector::from_fn(dim, |i, _| full[i].inner(o));
            chol.solve(&rhs).iter().copied().collect()
        })
        .collect();

    Ok(SpanBasis { basis, selected, coords })
}
