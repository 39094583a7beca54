use serde::{Deserialize, Serialize};

/// Which bound produced a [`guarantee_dim`] value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuaranteeSource {
    /// `(p+1)k − 1`, sharp for a single matrix.
    SingleMatrix,
    /// `3pk − 2` for two matrices.
    TwoMatrices,
    /// `(m+1)((m+1)(k−1) + k(p−1))`.
    General,
    /// The trivial requirement `n ≥ kp`, which dominates when `k = 1`.
    FrameSize,
}

/// Smallest `n` known to force `Λ_(k:p)(A) ≠ ∅` for every `m`-tuple in
/// dimension `n`. Never below `kp`. `m = 0` gives `kp`.
pub fn guarantee_dim(m: usize, k: usize, p: usize) -> usize {
    guarantee_dim_with_source(m, k, p).0
}

pub fn guarantee_dim_with_source(m: usize, k: usize, p: usize) -> (usize, GuaranteeSource) {
    let general = (m + 1) * ((m + 1) * k.saturating_sub(1) + k * p.saturating_sub(1));
    let (value, source) = match m {
        0 => (0, GuaranteeSource::FrameSize),
        1 => ((p + 1) * k - 1, GuaranteeSource::SingleMatrix),
        2 if 3 * p * k - 2 <= general => (3 * p * k - 2, GuaranteeSource::TwoMatrices),
        _ => (general, GuaranteeSource::General),
    };
    if value < k * p {
        (k * p, GuaranteeSource::FrameSize)
    } else {
        (value, source)
    }
}
