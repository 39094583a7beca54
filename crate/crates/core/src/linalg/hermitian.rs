use num_complex::Complex64;

use super::{c64, ensure_square, frobenius, is_finite, trace_inner, ComplexMatrix};
use crate::error::{Error, Result};

/// A square matrix equal to its own adjoint, entry for entry.
///
/// Construction symmetrizes the input as `(A + A*)/2`, so products such as
/// `E_i* E_j + E_j* E_i` that are Hermitian only up to rounding are accepted
/// and become exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let n = ensure_square(&m)?;
        if !is_finite(&m) {
            return Err(Error::NonFinite);
        }
        let mut h = m;
        for i in 0..n {
            h[(i, i)] = c64(h[(i, i)].re, 0.0);
            for j in i + 1..n {
                let avg = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
                h[(i, j)] = avg;
                h[(j, i)] = avg.conj();
            }
        }
        Ok(Self(h))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        Self(super::from_real_diagonal(values))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn frobenius(&self) -> f64 {
        frobenius(&self.0)
    }

    /// `Re tr(A B*)`, which is real already for Hermitian pairs.
    pub fn inner(&self, other: &Self) -> f64 {
        trace_inner(&self.0, &other.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// Real linear combination `Σ c_i H_i + shift·I`.
    pub fn combination(terms: &[(f64, &HermitianMatrix)], shift: f64, n: usize) -> Self {
        let mut acc = ComplexMatrix::identity(n, n) * Complex64::from(shift);
        for (c, h) in terms {
            acc += h.as_matrix() * Complex64::from(*c);
        }
        Self(acc)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.0[(i, j)] == Complex64::from(0.0)))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }
}

/// Splits `A` into `(H1, H2)` with `A = H1 + i·H2`.
pub fn hermitian_decompose(a: &ComplexMatrix) -> Result<(HermitianMatrix, HermitianMatrix)> {
    ensure_square(a)?;
    let adj = a.adjoint();
    let h1 = (a + &adj) * c64(0.5, 0.0);
    // (A − A*)/(2i) = −i(A − A*)/2
    let h2 = (a - &adj) * c64(0.0, -0.5);
    Ok((HermitianMatrix::new(h1)?, HermitianMatrix::new(h2)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real_diagonal, identity, pauli, zeros};

    #[test]
    fn constructor_symmetrizes() {
        let mut m = zeros(2, 2);
        m[(0, 1)] = c64(1.0, 1.0);
        m[(1, 0)] = c64(1.0, -1.0 + 1e-13);
        m[(0, 0)] = c64(2.0, 1e-14);
        let h = HermitianMatrix::new(m).unwrap();
        let a = h.as_matrix();
        assert_eq!(a[(0, 1)], a[(1, 0)].conj());
        assert_eq!(a[(0, 0)].im, 0.0);
    }

    #[test]
    fn rejects_non_square_and_nan() {
        assert!(matches!(HermitianMatrix::new(zeros(2, 3)), Err(Error::NotSquare { .. })));
        let mut m = zeros(2, 2);
        m[(0, 0)] = c64(f64::NAN, 0.0);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NonFinite)));
    }

    #[test]
    fn decompose_hermitian_input() {
        let (h1, h2) = hermitian_decompose(&identity(2)).unwrap();
        assert_eq!(h1.as_matrix(), &identity(2));
        assert_eq!(h2.as_matrix(), &zeros(2, 2));
    }

    #[test]
    fn decompose_raising_operator() {
        let mut a = zeros(2, 2);
        a[(0, 1)] = c64(1.0, 0.0);
        let (h1, h2) = hermitian_decompose(&a).unwrap();
        assert_eq!(h1.as_matrix(), &(pauli::x() * c64(0.5, 0.0)));
        assert_eq!(h2.as_matrix(), &(pauli::y() * c64(0.5, 0.0)));
    }

    #[test]
    fn decompose_skew_input() {
        let a = identity(3) * c64(0.0, 1.0);
        let (h1, h2) = hermitian_decompose(&a).unwrap();
        assert_eq!(h1.as_matrix(), &zeros(3, 3));
        assert_eq!(h2.as_matrix(), &identity(3));
    }

    #[test]
    fn decompose_rejects_rectangular() {
        assert!(hermitian_decompose(&zeros(2, 3)).is_err());
    }

    #[test]
    fn diagonal_detection() {
        assert!(HermitianMatrix::new(from_real_diagonal(&[1.0, 2.0])).unwrap().is_diagonal());
        assert!(!HermitianMatrix::new(pauli::x()).unwrap().is_diagonal());
    }
}
