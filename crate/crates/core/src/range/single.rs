//! Exact description of `Λ_(k:p)(A)` for a single Hermitian `A`.
//!
//! With eigenvalues `a_1 ≥ … ≥ a_n`, an ordered tuple `t_[1] ≥ … ≥ t_[p]`
//! is attainable iff `a_{n+1-(p-i+1)k} ≤ t_[i] ≤ a_{ik}` for every `i`
//! (Fan–Pall interlacing applied to `diag(t) ⊗ I_k`). Witnesses are built by
//! a chain of one-dimensional Cauchy compressions.

use nalgebra::DMatrix;

use super::{check_frame_size, verify_witness, HermitianTuple, Witness};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianMatrix, PartialIsometry, Spectrum};

/// Per-position bounds on the decreasing rearrangement of a member tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeBox {
    pub k: usize,
    pub p: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl RangeBox {
    /// Empty iff some `lower_i > upper_i`; both sequences are non-increasing,
    /// so `t_[i] = upper_i` is a member otherwise.
    pub fn is_empty(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(lo, hi)| lo > hi)
    }

    pub fn contains(&self, t: &[f64], slack: f64) -> bool {
        if t.len() != self.p || self.is_empty() {
            return false;
        }
        let sorted = sorted_desc(t);
        sorted
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (lo, hi))| *x >= lo - slack && *x <= hi + slack)
    }

    /// The member `t_[i] = upper_i`, if the box is nonempty.
    pub fn top_member(&self) -> Option<Vec<f64>> {
        (!self.is_empty()).then(|| self.upper.clone())
    }
}

fn sorted_desc(t: &[f64]) -> Vec<f64> {
    let mut s = t.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn box_from_spectrum(s: &Spectrum, k: usize, p: usize) -> RangeBox {
    let n = s.dim();
    let lower = (1..=p).map(|i| s.a(n + 1 - (p - i + 1) * k)).collect();
    let upper = (1..=p).map(|i| s.a(i * k)).collect();
    RangeBox { k, p, lower, upper }
}

pub fn single_range(a: &HermitianMatrix, k: usize, p: usize) -> Result<RangeBox> {
    check_frame_size(k, p, a.dim())?;
    Ok(box_from_spectrum(&eig_hermitian(a)?, k, p))
}

fn membership_slack(s: &Spectrum) -> f64 {
    1e-10 * s.values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Sorts `t` descending and checks the interlacing box (with a relative
/// slack of `1e−10`). Malformed inputs are simply not members.
pub fn single_membership(a: &HermitianMatrix, k: usize, p: usize, t: &[f64]) -> bool {
    if check_frame_size(k, p, a.dim()).is_err() || t.len() != p {
        return false;
    }
    match eig_hermitian(a) {
        Ok(s) => box_from_spectrum(&s, k, p).contains(t, membership_slack(&s)),
        Err(_) => false,
    }
}

/// Frame `V` with `V*AV = diag(t) ⊗ I_k` for a member `t`.
pub fn single_witness(a: &HermitianMatrix, k: usize, p: usize, t: &[f64]) -> Result<Witness> {
    check_frame_size(k, p, a.dim())?;
    if t.len() != p {
        return Err(Error::InvalidParameter(format!("target has {} entries, expected p = {p}", t.len())));
    }
    let spectrum = eig_hermitian(a)?;
    let rbox = box_from_spectrum(&spectrum, k, p);
    if !rbox.contains(t, membership_slack(&spectrum)) {
        return Err(Error::NotMember { k, p });
    }

    // decreasing order of t, stable so equal entries keep their order
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&x, &y| t[y].total_cmp(&t[x]).then(x.cmp(&y)));
    let targets: Vec<f64> = order
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| {
            let v = t[r].clamp(rbox.lower[i], rbox.upper[i]);
            std::iter::repeat_n(v, k)
        })
        .collect();

    let frame = interlacing_frame(&spectrum, &targets)?;

    // sorted position i holds block order[i]
    let n = a.dim();
    let mut v = ComplexMatrix::zeros(n, k * p);
    for (pos, &r) in order.iter().enumerate() {
        v.columns_mut(r * k, k).copy_from(&frame.columns(pos * k, k));
    }
    let v = match PartialIsometry::new(v.clone()) {
        Ok(v) => v,
        Err(_) => PartialIsometry::polar(&v)?,
    };
    let w = verify_witness(&HermitianTuple::single(a.clone()), &v, k, p, 1e-8)?;
    if !w.accepted {
        return Err(Error::Construction(format!(
            "interlacing construction left residual {:.3e}",
            w.residual
        )));
    }
    Ok(w)
}

/// Orthonormal `n×K` frame `Y` with `Y*AY = diag(targets)`, where `targets`
/// is non-increasing and interlaces the spectrum.
///
/// Intermediate spectra `c^(s)_i = clamp(b_i, a_{i+s}, a_i)` (with
/// `b_i = −∞` past the end of `targets`) step from `a` down to `targets`, and
/// consecutive ones interlace in the Cauchy sense, so each step is a single
/// compression onto a hyperplane.
fn interlacing_frame(s: &Spectrum, targets: &[f64]) -> Result<ComplexMatrix> {
    let a = &s.values;
    let n = a.len();
    let deleted = n - targets.len();
    let mut current = a.clone();
    let mut frame = s.vectors.clone();
    for step in 1..=deleted {
        let next: Vec<f64> = (0..n - step)
            .map(|i| {
                let b = targets.get(i).copied().unwrap_or(f64::NEG_INFINITY);
                b.max(a[i + step]).min(a[i])
            })
            .collect();
        let w = cauchy_step(&current, &next)?;
        frame *= w.map(|x| num_complex::Complex64::new(x, 0.0));
        current = next;
    }
    Ok(frame)
}

/// Real `N×(N−1)` isometry `W` with `Wᵀ diag(a) W = diag(c)` for
/// `a_1 ≥ c_1 ≥ a_2 ≥ … ≥ c_{N−1} ≥ a_N`.
///
/// Coinciding values are matched to coordinate vectors first. What remains
/// interlaces strictly, and the hyperplane normal `u` follows from
/// `u_i² = Π_j (a_i − c_j) / Π_{l≠i} (a_i − a_l)`; eigenvectors of the
/// compression are `w_j ∝ (u_i / (a_i − c_j))_i`.
fn cauchy_step(a: &[f64], c: &[f64]) -> Result<DMatrix<f64>> {
    let n = a.len();
    debug_assert_eq!(c.len() + 1, n);
    let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;
    let mut w = DMatrix::zeros(n, n - 1);
    let mut live_a: Vec<usize> = (0..n).collect();
    let mut live_c: Vec<usize> = (0..n - 1).collect();

    'deflate: loop {
        for jj in 0..live_c.len() {
            for off in 0..2 {
                let ii = jj + off;
                if (c[live_c[jj]] - a[live_a[ii]]).abs() <= tol {
                    w[(live_a[ii], live_c[jj])] = 1.0;
                    live_a.remove(ii);
                    live_c.remove(jj);
                    continue 'deflate;
                }
            }
        }
        break;
    }

    let ra: Vec<f64> = live_a.iter().map(|&i| a[i]).collect();
    let rc: Vec<f64> = live_c.iter().map(|&j| c[j]).collect();
    if rc.is_empty() {
        return Ok(w);
    }
    for (j, &cj) in rc.iter().enumerate() {
        if !(ra[j] > cj && cj > ra[j + 1]) {
            return Err(Error::Construction(format!(
                "targets do not interlace at position {j}: {} / {cj} / {}",
                ra[j],
                ra[j + 1]
            )));
        }
    }
    let u: Vec<f64> = (0..ra.len())
        .map(|i| {
            let mut v = 1.0;
            for (l, &al) in ra.iter().enumerate() {
                if l < rc.len() {
                    v *= ra[i] - rc[l];
                }
                if l != i {
                    v /= ra[i] - al;
                }
            }
            v.max(0.0).sqrt()
        })
        .collect();
    for (j, &cj) in rc.iter().enumerate() {
        let col: Vec<f64> = ra.iter().zip(&u).map(|(&ai, &ui)| ui / (ai - cj)).collect();
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (i, x) in col.iter().enumerate() {
            w[(live_a[i], live_c[j])] = x / norm;
        }
    }
    Ok(w)
}
