//! Dense complex matrix primitives.
//!
//! Everything above this module works with [`ComplexMatrix`] (a plain
//! `nalgebra` matrix) plus three validated wrappers: [`HermitianMatrix`],
//! [`PartialIsometry`] and [`Spectrum`]. All functions are pure.

mod eig;
mod frame;
mod hermitian;
mod span;

pub use eig::{eig_hermitian, Spectrum};
pub use frame::{complement, orthonormalize, orthonormalize_matrix, PartialIsometry};
pub use hermitian::{hermitian_decompose, HermitianMatrix};
pub use span::{real_span_basis, SpanBasis};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Default relative tolerance for rank and orthonormality decisions.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Orthonormality tolerance enforced when a [`PartialIsometry`] is built.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

pub fn from_real_diagonal(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { c64(values[i], 0.0) } else { c64(0.0, 0.0) })
}

pub fn from_real(rows: usize, cols: usize, row_major: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |i, j| c64(row_major[i * cols + j], 0.0))
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Real trace inner product `Re tr(A B*)`.
pub fn trace_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

/// Standard Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors.into_iter().fold(identity(1), |acc, f| kron(&acc, f))
}

/// `V* A V` for a square `A` of matching dimension.
pub fn compress(a: &ComplexMatrix, v: &PartialIsometry) -> Result<ComplexMatrix> {
    let n = ensure_square(a)?;
    if n != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            what: "compress",
            expected: v.ambient_dim(),
            found: n,
        });
    }
    let m = v.matrix();
    Ok(m.adjoint() * a * m)
}

pub fn compress_hermitian(a: &HermitianMatrix, v: &PartialIsometry) -> Result<HermitianMatrix> {
    HermitianMatrix::new(compress(a.as_matrix(), v)?)
}

/// Largest `‖A_i A_j − A_j A_i‖_F` over all pairs.
pub fn max_commutator(ops: &[HermitianMatrix]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            let (a, b) = (a.as_matrix(), b.as_matrix());
            worst = worst.max(frobenius(&(a * b - b * a)));
        }
    }
    worst
}

/// Single-qubit Paulis and big-endian multi-qubit helpers.
pub mod pauli {
    use super::{c64, kron_all, ComplexMatrix};

    pub fn i2() -> ComplexMatrix {
        ComplexMatrix::identity(2, 2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)])
    }

    /// `P ⊗ P ⊗ … ⊗ P` on `qubits` qubits.
    pub fn tensor_power(p: &ComplexMatrix, qubits: usize) -> ComplexMatrix {
        kron_all(std::iter::repeat_n(p, qubits))
    }

    /// `p` acting on qubit `target` (0 = most significant) of `qubits`.
    pub fn on_qubit(p: &ComplexMatrix, target: usize, qubits: usize) -> ComplexMatrix {
        let id = i2();
        let factors: Vec<&ComplexMatrix> = (0..qubits).map(|q| if q == target { p } else { &id }).collect();
        kron_all(factors)
    }

    /// Basis index of the ket `|b_1 … b_q⟩`, big-endian.
    pub fn ket_index(bits: &str) -> usize {
        bits.chars().fold(0, |acc, b| 2 * acc + usize::from(b == '1'))
    }
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;

    #[test]
    fn kron_of_diagonals() {
        let d = from_real_diagonal(&[1.0, -1.0]);
        let got = kron(&d, &identity(2));
        assert_eq!(got, from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kron_with_one_by_one_identity() {
        let a = from_real(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(kron(&a, &identity(1)), a);
    }

    #[test]
    fn triple_x_is_antidiagonal() {
        let x3 = tensor_power(&x(), 3);
        for i in 0..8 {
            for j in 0..8 {
                let expected = if i + j == 7 { 1.0 } else { 0.0 };
                assert_eq!(x3[(i, j)], c64(expected, 0.0));
            }
        }
    }

    #[test]
    fn coordinate_compression() {
        let a = from_real_diagonal(&[5.0, 4.0, 3.0, 2.0, 1.0]);
        let mut v = zeros(5, 2);
        v[(1, 0)] = c64(1.0, 0.0);
        v[(3, 1)] = c64(1.0, 0.0);
        let v = PartialIsometry::new(v).unwrap();
        assert_eq!(compress(&a, &v).unwrap(), from_real_diagonal(&[4.0, 2.0]));
    }

    #[test]
    fn identity_frame_compression_is_noop() {
        let a = from_real(3, 3, &[1.0, 2.0, 0.0, 2.0, -1.0, 4.0, 0.0, 4.0, 3.0]);
        let v = PartialIsometry::new(identity(3)).unwrap();
        assert_eq!(compress(&a, &v).unwrap(), a);
    }

    #[test]
    fn compress_rejects_mismatch() {
        let v = PartialIsometry::new(identity(3)).unwrap();
        assert!(matches!(compress(&identity(4), &v), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(compress(&zeros(3, 2), &v), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn ket_indices_are_big_endian() {
        assert_eq!(ket_index("000"), 0);
        assert_eq!(ket_index("011"), 3);
        assert_eq!(ket_index("101"), 5);
        assert_eq!(ket_index("1100"), 12);
    }

    #[test]
    fn x_on_middle_qubit() {
        let x2 = on_qubit(&x(), 1, 3);
        assert_eq!(x2[(ket_index("010"), ket_index("000"))], c64(1.0, 0.0));
        assert_eq!(x2[(ket_index("000"), ket_index("000"))], c64(0.0, 0.0));
    }
}
