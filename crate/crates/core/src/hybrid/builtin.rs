//! Built-in channels and fixed frames for the bit-flip and Pauli
//! correlation examples. Qubit labels are big-endian: `|j_1…j_q⟩` is index
//! `Σ j_t 2^{q−t}`.

use super::{validate_channel, HybridCode, QuantumChannel, CHANNEL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{c64, identity, pauli, zeros, ComplexMatrix, PartialIsometry};

pub const BUILTIN_CHANNELS: [&str; 2] = ["bitflip_x2", "pauli_correlation"];

const PROB_TOL: f64 = 1e-12;

fn check_probabilities(probs: &[f64]) -> Result<()> {
    if probs.iter().any(|q| !q.is_finite() || *q < 0.0) {
        return Err(Error::InvalidParameter(format!("probabilities must be nonnegative, got {probs:?}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::Probabilities { sum });
    }
    Ok(())
}

/// `√q_i · K_i`, skipping zero probabilities.
fn weighted(ops: Vec<ComplexMatrix>, probs: &[f64]) -> Result<QuantumChannel> {
    check_probabilities(probs)?;
    let (kraus, kept): (Vec<ComplexMatrix>, Vec<f64>) = ops
        .into_iter()
        .zip(probs)
        .filter(|(_, q)| **q > 0.0)
        .map(|(k, q)| (k * c64(q.sqrt(), 0.0), *q))
        .unzip();
    validate_channel(kraus, CHANNEL_TOL)?.with_probabilities(kept)
}

/// `{√(1−p) I, √p X₂}` on three qubits, `X₂` flipping the middle qubit.
pub fn bitflip_x2(p: f64) -> Result<QuantumChannel> {
    weighted(vec![identity(8), pauli::on_qubit(&pauli::x(), 1, 3)], &[1.0 - p, p])
}

/// `{√p₀ I, √p₁ X⊗q, √p₂ Y⊗q, √p₃ Z⊗q}` on `q` qubits.
pub fn pauli_correlation(qubits: usize, probs: [f64; 4]) -> Result<QuantumChannel> {
    if qubits == 0 || qubits > 12 {
        return Err(Error::InvalidParameter(format!("qubit count must be in 1..=12, got {qubits}")));
    }
    let ops = vec![
        identity(1 << qubits),
        pauli::tensor_power(&pauli::x(), qubits),
        pauli::tensor_power(&pauli::y(), qubits),
        pauli::tensor_power(&pauli::z(), qubits),
    ];
    weighted(ops, &probs)
}

/// `bitflip_x2` takes one probability `p`; `pauli_correlation` takes four
/// and a qubit count.
pub fn builtin_channel(name: &str, qubits: Option<usize>, probs: &[f64]) -> Result<QuantumChannel> {
    match name {
        "bitflip_x2" => match probs {
            [p] => bitflip_x2(*p),
            _ => Err(Error::InvalidParameter(format!("bitflip_x2 takes one probability, got {}", probs.len()))),
        },
        "pauli_correlation" => {
            let q = qubits.ok_or_else(|| Error::InvalidParameter("pauli_correlation needs a qubit count".into()))?;
            let probs: [f64; 4] = probs.try_into().map_err(|_| {
                Error::InvalidParameter(format!("pauli_correlation takes four probabilities, got {}", probs.len()))
            })?;
            pauli_correlation(q, probs)
        }
        other => Err(Error::UnknownChannel(other.to_string())),
    }
}

fn basis_frame(n: usize, cols: &[usize]) -> ComplexMatrix {
    let mut v = zeros(n, cols.len());
    for (c, &i) in cols.iter().enumerate() {
        v[(i, c)] = c64(1.0, 0.0);
    }
    v
}

/// `|000⟩⟨00| + |011⟩⟨01| + |101⟩⟨10| + |110⟩⟨11|`.
pub fn xyz3_isometry() -> PartialIsometry {
    PartialIsometry::new(basis_frame(8, &[0b000, 0b011, 0b101, 0b110])).expect("coordinate frame")
}

/// Four-qubit unitary `½[u_1 … u_16]` that block-diagonalizes
/// `(X⊗4, Y⊗4, Z⊗4)`; columns `4r+1…4r+4` span sector `r`.
pub fn xyz2_unitary() -> ComplexMatrix {
    // (a, b, c, d, outer, inner): u = (|a⟩ + outer|b⟩) + inner(|c⟩ + outer|d⟩)
    const PAIRS: [(usize, usize, usize, usize); 4] = [
        (0b0000, 0b1111, 0b0011, 0b1100),
        (0b0101, 0b1010, 0b0110, 0b1001),
        (0b0001, 0b1110, 0b0010, 0b1101),
        (0b0100, 0b1011, 0b0111, 0b1000),
    ];
    let mut u = zeros(16, 16);
    let mut col = 0;
    for outer in [1.0, -1.0] {
        for &(a, b, c, d) in &PAIRS {
            for inner in [1.0, -1.0] {
                u[(a, col)] += c64(0.5, 0.0);
                u[(b, col)] += c64(0.5 * outer, 0.0);
                u[(c, col)] += c64(0.5 * inner, 0.0);
                u[(d, col)] += c64(0.5 * inner * outer, 0.0);
                col += 1;
            }
        }
    }
    u
}

/// Eigenspaces of `X₂` as a `(4:2)` code: sector 0 is `X₂ = +1`.
pub fn bitflip_sectors() -> HybridCode {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut sectors = Vec::new();
    for sign in [1.0, -1.0] {
        let mut v = zeros(8, 4);
        for (q, (a, c)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            v[(4 * a + c, q)] = c64(s, 0.0);
            v[(4 * a + 2 + c, q)] = c64(sign * s, 0.0);
        }
        sectors.push(PartialIsometry::new(v).expect("orthonormal"));
    }
    HybridCode::new(sectors).expect("orthogonal sectors")
}

/// `span{|000⟩, |001⟩}` and `span{|100⟩, |101⟩}` as a `(2:2)` code.
pub fn bitflip_printed_sectors() -> HybridCode {
    let c1 = PartialIsometry::new(basis_frame(8, &[0b000, 0b001])).expect("coordinate frame");
    let c2 = PartialIsometry::new(basis_frame(8, &[0b100, 0b101])).expect("coordinate frame");
    HybridCode::new(vec![c1, c2]).expect("orthogonal sectors")
}
