//! Quantum channels, hybrid codes and their correctability conditions.
//!
//! A hybrid `(k:p)` code for `Φ(ρ) = Σ E_iρE_i*` is a set of `p` mutually
//! orthogonal `k`-dimensional subspaces with projections `P_r` such that
//! `P_r E_i*E_j P_s = δ_rs λ_ij^(r) P_r` for all `i, j, r, s`. Such codes are
//! exactly the frames of `Λ_(k:p)` of the error operators.

mod builtin;

pub use builtin::{
    bitflip_printed_sectors, bitflip_sectors, bitflip_x2, builtin_channel, pauli_correlation, xyz2_unitary,
    xyz3_isometry, BUILTIN_CHANNELS,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, frobenius, hermitian_decompose, identity, real_span_basis, ComplexMatrix, HermitianMatrix,
    PartialIsometry,
};
use crate::range::{self, check_frame_size, CertificateType, HermitianTuple, NotFound, Outcome, Witness};
use crate::search::SearchOptions;

/// Default bound on `‖Σ E_i*E_i − I‖_F`.
pub const CHANNEL_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-10;
const SPAN_TOL: f64 = 1e-10;

/// Kraus operators of a trace-preserving map on `C^n`.
///
/// Probabilities are metadata only; correctability never depends on them.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    n: usize,
    kraus: Vec<ComplexMatrix>,
    probabilities: Option<Vec<f64>>,
    defect: f64,
}

impl QuantumChannel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn probabilities(&self) -> Option<&[f64]> {
        self.probabilities.as_deref()
    }

    /// `‖Σ E_i*E_i − I‖_F` measured at construction.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn with_probabilities(mut self, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != self.kraus.len() {
            return Err(Error::DimensionMismatch {
                what: "channel probabilities",
                expected: self.kraus.len(),
                found: probs.len(),
            });
        }
        self.probabilities = Some(probs);
        Ok(self)
    }
}

pub fn completeness_defect(kraus: &[ComplexMatrix]) -> Result<f64> {
    let first = kraus.first().ok_or(Error::EmptyInput)?;
    let n = crate::linalg::ensure_square(first)?;
    let mut sum = ComplexMatrix::zeros(n, n);
    for e in kraus {
        let d = crate::linalg::ensure_square(e)?;
        if d != n {
            return Err(Error::DimensionMismatch { what: "Kraus operator", expected: n, found: d });
        }
        if !crate::linalg::is_finite(e) {
            return Err(Error::NonFinite);
        }
        sum += e.adjoint() * e;
    }
    Ok(frobenius(&(sum - identity(n))))
}

/// Builds a channel if `‖Σ E_i*E_i − I‖_F ≤ tol`.
pub fn validate_channel(kraus: Vec<ComplexMatrix>, tol: f64) -> Result<QuantumChannel> {
    let defect = completeness_defect(&kraus)?;
    if defect > tol {
        return Err(Error::ChannelDefect { defect });
    }
    Ok(QuantumChannel { n: kraus[0].nrows(), kraus, probabilities: None, defect })
}

/// Dimension of `span{E_i}`, from the Gram matrix `tr(E_a* E_b)`.
pub fn choi_rank(channel: &QuantumChannel) -> usize {
    let ks = channel.kraus();
    let c = ks.len();
    let gram = ComplexMatrix::from_fn(c, c, |a, b| (ks[a].adjoint() * &ks[b]).trace());
    let Ok(gram) = HermitianMatrix::new(gram) else {
        return 0;
    };
    let Ok(s) = eig_hermitian(&gram) else {
        return 0;
    };
    let top = s.values.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    s.values.iter().filter(|&&v| v > RANK_TOL * top).count()
}

/// Error operators `E_j*E_l` split into Hermitian parts, reduced to a tuple
/// `(A_1, …, A_m)` with `{A_1, …, A_m, I}` independent.
///
/// Each `A_q` is rescaled so that its first entry of largest modulus (in
/// row-major order) becomes `±1`, with the sign of that entry's real part
/// (or of its imaginary part when the real part vanishes).
pub fn error_tuple(channel: &QuantumChannel) -> Result<HermitianTuple> {
    let ks = channel.kraus();
    let mut ops = Vec::new();
    for j in 0..ks.len() {
        for l in j..ks.len() {
            let prod = ks[j].adjoint() * &ks[l];
            let (sym, anti) = hermitian_decompose(&prod)?;
            ops.push(sym);
            if j != l {
                ops.push(anti);
            }
        }
    }
    let span = real_span_basis(&ops, SPAN_TOL)?;
    let basis = span.basis.iter().map(canonical_scale).collect();
    HermitianTuple::with_dim(channel.n(), basis)
}

fn canonical_scale(a: &HermitianMatrix) -> HermitianMatrix {
    let m = a.as_matrix();
    let top = m.iter().fold(0.0f64, |s, z| s.max(z.norm()));
    if top == 0.0 {
        return a.clone();
    }
    let n = m.nrows();
    let pivot = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)])
        .find(|z| z.norm() >= top * (1.0 - 1e-12))
        .expect("maximum is attained");
    let sign = if pivot.re.abs() > 1e-12 * top { pivot.re.signum() } else { pivot.im.signum() };
    a.scale(1.0 / (sign * pivot.norm()))
}

/// `p` mutually orthogonal `k`-dimensional subspaces, each an `n×k` frame.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridCode {
    pub k: usize,
    pub p: usize,
    pub sectors: Vec<PartialIsometry>,
}

const CODE_ORTHO_TOL: f64 = 1e-10;

impl HybridCode {
    pub fn new(sectors: Vec<PartialIsometry>) -> Result<Self> {
        let first = sectors
            .first()
            .ok_or_else(|| Error::InvalidParameter("a code needs at least one sector".into()))?;
        let (n, k) = (first.ambient_dim(), first.frame_dim());
        if k == 0 {
            return Err(Error::InvalidParameter("sectors must have at least one column".into()));
        }
        for s in &sectors {
            if s.ambient_dim() != n {
                return Err(Error::DimensionMismatch { what: "sector rows", expected: n, found: s.ambient_dim() });
            }
            if s.frame_dim() != k {
                return Err(Error::DimensionMismatch { what: "sector columns", expected: k, found: s.frame_dim() });
            }
        }
        let code = Self { k, p: sectors.len(), sectors };
        check_frame_size(k, code.p, n)?;
        PartialIsometry::with_tolerance(code.stacked(), CODE_ORTHO_TOL)?;
        Ok(code)
    }

    /// Sectors are the consecutive `k`-column groups of the witness frame.
    pub fn from_witness(w: &Witness) -> Self {
        Self { k: w.k, p: w.p, sectors: (0..w.p).map(|r| w.sector(r)).collect() }
    }

    pub fn n(&self) -> usize {
        self.sectors[0].ambient_dim()
    }

    fn stacked(&self) -> ComplexMatrix {
        let mut v = ComplexMatrix::zeros(self.n(), self.k * self.p);
        for (r, s) in self.sectors.iter().enumerate() {
            v.columns_mut(r * self.k, self.k).copy_from(s.matrix());
        }
        v
    }

    /// All sectors side by side.
    pub fn frame(&self) -> PartialIsometry {
        PartialIsometry::with_tolerance(self.stacked(), CODE_ORTHO_TOL).expect("checked at construction")
    }

    pub fn projection(&self, r: usize) -> ComplexMatrix {
        self.sectors[r].projector()
    }
}

/// The scalars `λ_ij^(r)` and how far the code is from satisfying the
/// correctability identities.
#[derive(Clone, Debug)]
pub struct CodeCertificate {
    /// `lambdas[r][i][j] = tr(P_r E_i*E_j P_r)/k`.
    pub lambdas: Vec<Vec<Vec<Complex64>>>,
    /// Largest `‖P_r E_i*E_j P_s − δ_rs λ_ij^(r) P_r‖_F`.
    pub max_violation: f64,
    /// Largest `‖P E_i*E_j P − Σ_r λ_ij^(r) P_r‖_F` with `P = Σ_r P_r`.
    pub block_sum_violation: f64,
    /// Largest negative eigenvalue of any `(λ_ij^(r))_ij`, as a positive number.
    pub psd_defect: f64,
    /// Largest `|Σ_i λ_ii^(r) − 1|`.
    pub trace_defect: f64,
    pub tol: f64,
    pub accepted: bool,
}

/// Checks the correctability identities for every pair of Kraus operators.
pub fn verify_code(channel: &QuantumChannel, code: &HybridCode, tol: f64) -> Result<CodeCertificate> {
    if code.n() != channel.n() {
        return Err(Error::DimensionMismatch { what: "code dimension", expected: channel.n(), found: code.n() });
    }
    let (k, p) = (code.k, code.p);
    let v = code.frame();
    let vm = v.matrix();
    let ks = channel.kraus();
    let c = ks.len();
    let ev: Vec<ComplexMatrix> = ks.iter().map(|e| e * vm).collect();

    let mut lambdas = vec![vec![vec![Complex64::new(0.0, 0.0); c]; c]; p];
    let mut max_violation = 0.0f64;
    let mut block_sum_violation = 0.0f64;
    for i in 0..c {
        for j in 0..c {
            let b = ev[i].adjoint() * &ev[j];
            let mut total = 0.0;
            for r in 0..p {
                let lam = (0..k).map(|t| b[(r * k + t, r * k + t)]).sum::<Complex64>() / k as f64;
                lambdas[r][i][j] = lam;
                for s in 0..p {
                    let mut blk = b.view((r * k, s * k), (k, k)).into_owned();
                    if r == s {
                        for t in 0..k {
                            blk[(t, t)] -= lam;
                        }
                    }
                    let f = frobenius(&blk);
                    max_violation = max_violation.max(f);
                    total += f * f;
                }
            }
            block_sum_violation = block_sum_violation.max(total.sqrt());
        }
    }

    let mut psd_defect = 0.0f64;
    let mut trace_defect = 0.0f64;
    for lam in &lambdas {
        let m = ComplexMatrix::from_fn(c, c, |i, j| lam[i][j]);
        let s = eig_hermitian(&HermitianMatrix::new(m)?)?;
        let low = s.values.last().copied().unwrap_or(0.0);
        psd_defect = psd_defect.max((-low).max(0.0));
        let tr: f64 = (0..c).map(|i| lam[i][i].re).sum();
        trace_defect = trace_defect.max((tr - 1.0).abs());
    }

    Ok(CodeCertificate {
        lambdas,
        max_violation,
        block_sum_violation,
        psd_defect,
        trace_defect,
        tol,
        accepted: max_violation <= tol,
    })
}

/// Result of [`find_code`].
#[derive(Clone, Debug)]
pub enum CodeOutcome {
    Found {
        code: HybridCode,
        certificate: CodeCertificate,
        witness: Witness,
        /// Which solver produced the witness.
        route: CertificateType,
    },
    NotFound(NotFound),
}

impl CodeOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, CodeOutcome::Found { .. })
    }

    pub fn certificate_type(&self) -> CertificateType {
        match self {
            CodeOutcome::Found { route, .. } => *route,
            CodeOutcome::NotFound(nf) => nf.certificate,
        }
    }
}

/// Searches `Λ_(k:p)` of the error tuple and turns a witness into a code,
/// which is then checked against the channel directly.
pub fn find_code(channel: &QuantumChannel, k: usize, p: usize, opts: &SearchOptions) -> Result<CodeOutcome> {
    check_frame_size(k, p, channel.n())?;
    let tuple = error_tuple(channel)?;
    match range::find(&tuple, k, p, opts)? {
        Outcome::Found { witness, certificate: route } => {
            let code = HybridCode::from_witness(&witness);
            let certificate = verify_code(channel, &code, opts.tol)?;
            if certificate.accepted {
                Ok(CodeOutcome::Found { code, certificate, witness, route })
            } else {
                Ok(CodeOutcome::NotFound(NotFound::search(
                    0,
                    format!(
                        "witness residual {:.3e} but code violation {:.3e}",
                        witness.residual, certificate.max_violation
                    ),
                )))
            }
        }
        Outcome::NotFound(nf) => Ok(CodeOutcome::NotFound(nf)),
    }
}

/// Sufficient dimension for a `(k:p)` code of any channel of Choi rank `c`:
/// `c²(c²(k−1) + k(p−1))`, or the tuple bound for `m = c²−1` when smaller.
pub fn guarantee(c: usize, k: usize, p: usize) -> usize {
    if c <= 1 {
        return k * p;
    }
    let c2 = c * c;
    let general = c2 * (c2 * (k - 1) + k * (p - 1));
    general.min(range::guarantee_dim(c2 - 1, k, p)).max(k * p)
}
