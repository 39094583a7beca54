use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{frame::orthonormalize, ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Eigenvalues sorted non-increasing, with a unitary of matching eigenvectors
/// (column `i` belongs to `values[i]`).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// 1-based access matching the usual `a_1 ≥ … ≥ a_n` labels.
    pub fn a(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    pub fn spread(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(hi), Some(lo)) => hi - lo,
            _ => 0.0,
        }
    }

    /// `Q Λ Q*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let scaled = ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.vectors[(i, j)] * self.values[j]
        });
        scaled * self.vectors.adjoint()
    }
}

// eigenvalues closer than this (relative) are treated as one cluster
const CLUSTER_TOL: f64 = 1e-12;

/// Hermitian eigendecomposition with a reproducible eigenbasis.
///
/// Values within a relative `1e−12` of each other are merged to their mean and
/// the corresponding eigenspace gets a canonical basis: pivoted Gram–Schmidt
/// over the columns of its projector. Every column is then rotated so that its
/// first nonzero component is real and positive.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<Spectrum> {
    let n = h.dim();
    if n == 0 {
        return Ok(Spectrum { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }
    let eig = SymmetricEigen::try_new(h.as_matrix().clone(), f64::EPSILON, 1000 * n.max(10))
        .ok_or(Error::EigenNoConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let mut values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] <= CLUSTER_TOL * scale {
            end += 1;
        }
        if end - start > 1 {
            let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
            values[start..end].iter_mut().for_each(|v| *v = mean);
            let block = vectors.columns(start, end - start).into_owned();
            let projector = &block * block.adjoint();
            let cols: Vec<DVector<Complex64>> =
                projector.column_iter().map(|c| c.into_owned()).collect();
            let basis = orthonormalize(&cols, 1e-6)?;
            if basis.frame_dim() == end - start {
                vectors.columns_mut(start, end - start).copy_from(basis.matrix());
            }
        }
        start = end;
    }

    for mut col in vectors.column_iter_mut() {
        let peak = col.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if let Some(lead) = col.iter().find(|z| z.norm() > 1e-10 * peak).copied() {
            let phase = lead.conj() / lead.norm();
            col.iter_mut().for_each(|z| *z *= phase);
        }
    }

    Ok(Spectrum { values, vectors })
}
