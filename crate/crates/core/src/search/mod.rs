//! Numerical witness search over orthonormal frames.
//!
//! The objective is `f(V) = Σ_j ‖V*A_jV − D_j⊗I_k‖_F²` with `D_j` set to the
//! block means for the current `V`. Descent runs on the Stiefel manifold with
//! Barzilai–Borwein steps, Armijo backtracking and a polar retraction.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, PartialIsometry};
use crate::range::{best_diagonals, block_means, check_frame_size, verify_witness, HermitianTuple, Witness};

const BATCH: usize = 8;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 40;
const STALL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Residual at which a frame is accepted.
    pub tol: f64,
    /// First trial step before Barzilai–Borwein takes over.
    pub step: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 64, max_iters: 5000, tol: 1e-8, step: 0.1, seed: 0 }
    }
}

impl SearchOptions {
    /// Budget used for each rank-`k` subproblem of the constructive recursion.
    pub fn base_case() -> Self {
        Self { restarts: 200, max_iters: 2000, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameter("restarts and max_iters must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter(format!("step must be positive, got {}", self.step)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    /// Lowest-residual witness over all restarts that ran.
    pub best: Witness,
    pub accepted: bool,
    pub restarts_used: usize,
    pub iterations_total: usize,
    /// Final residual of each restart, by restart index.
    pub residual_trace: Vec<f64>,
    pub notes: Vec<String>,
}

/// Distance from `V*A_jV` to the nearest `D_j ⊗ I_k`, summed over `j`.
pub fn residual(a: &HermitianTuple, v: &PartialIsometry, k: usize, p: usize) -> Result<f64> {
    if v.frame_dim() != k * p {
        return Err(Error::DimensionMismatch { what: "frame columns", expected: k * p, found: v.frame_dim() });
    }
    Ok(best_diagonals(a, v, k, p)?.1)
}

/// One refinement run: the final witness, the residual after every accepted
/// step (starting with the initial frame) and the number of steps.
#[derive(Clone, Debug)]
pub struct RefineRun {
    pub witness: Witness,
    pub trace: Vec<f64>,
    pub iterations: usize,
}

struct Eval {
    f: f64,
    grad: ComplexMatrix,
}

fn evaluate(a: &HermitianTuple, v: &ComplexMatrix, k: usize, p: usize) -> Eval {
    let mut f = 0.0;
    let mut grad = ComplexMatrix::zeros(v.nrows(), v.ncols());
    let vh = v.adjoint();
    for aj in a.matrices() {
        let av = aj.as_matrix() * v;
        let mut c = &vh * &av;
        c = (&c + c.adjoint()).scale(0.5);
        let (means, r2) = block_means(&c, k, p);
        f += r2;
        for (i, mean) in means.iter().enumerate() {
            for s in 0..k {
                c[(i * k + s, i * k + s)] -= Complex64::from(mean);
            }
        }
        grad += av * c;
    }
    Eval { f, grad: grad.scale(4.0) }
}

fn re_inner(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Projects a Euclidean gradient onto the tangent space at `v`.
fn tangent(v: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
    let vg = v.adjoint() * g;
    let sym = (&vg + vg.adjoint()).scale(0.5);
    g - v * sym
}

/// Descends from `v0` and returns the best frame seen.
pub fn refine(a: &HermitianTuple, v0: &PartialIsometry, k: usize, p: usize, opts: &SearchOptions) -> Result<Witness> {
    Ok(refine_with_trace(a, v0, k, p, opts)?.witness)
}

pub fn refine_with_trace(
    a: &HermitianTuple,
    v0: &PartialIsometry,
    k: usize,
    p: usize,
    opts: &SearchOptions,
) -> Result<RefineRun> {
    opts.validate()?;
    // sizes are checked here so the loop can index freely
    verify_witness(a, v0, k, p, opts.tol)?;
    let tol2 = opts.tol * opts.tol;
    let mut v = v0.clone();
    let mut e = evaluate(a, v.matrix(), k, p);
    let mut trace = vec![e.f.sqrt()];
    let mut step = opts.step;
    let mut prev: Option<(ComplexMatrix, ComplexMatrix)> = None;
    let mut iterations = 0;

    while iterations < opts.max_iters && e.f > tol2 {
        let xi = tangent(v.matrix(), &e.grad);
        let xi2 = re_inner(&xi, &xi);
        if xi2 == 0.0 || !xi2.is_finite() {
            break;
        }
        if let Some((pv, pxi)) = &prev {
            let s = v.matrix() - pv;
            let y = &xi - pxi;
            let sy = re_inner(&s, &y);
            if sy > 0.0 {
                step = (re_inner(&s, &s) / sy).clamp(1e-12, 1e12);
            }
        }
        let mut t = step;
        let mut next = None;
        for _ in 0..MAX_BACKTRACK {
            let trial = v.matrix() - xi.scale(t);
            if let Ok(cand) = PartialIsometry::polar(&trial) {
                let ec = evaluate(a, cand.matrix(), k, p);
                if ec.f <= e.f - ARMIJO * t * xi2 {
                    next = Some((cand, ec));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((cand, ec)) = next else {
            break;
        };
        let gain = (e.f - ec.f) / e.f;
        prev = Some((v.matrix().clone(), xi));
        v = cand;
        e = ec;
        step = t;
        iterations += 1;
        trace.push(e.f.sqrt());
        if gain < STALL {
            break;
        }
    }

    let witness = verify_witness(a, &v, k, p, opts.tol)?;
    Ok(RefineRun { witness, trace, iterations })
}

/// Orthonormalized standard complex Gaussian `n×cols` draw.
pub fn random_frame<R: Rng + ?Sized>(n: usize, cols: usize, rng: &mut R) -> Result<PartialIsometry> {
    let g = ComplexMatrix::from_fn(n, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    PartialIsometry::polar(&g)
}

/// Generator for restart `index`: stream `index` of the seeded ChaCha8.
pub fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Refines from `opts.restarts` random frames. Restarts run in parallel
/// batches of eight; the search stops after the first batch that contains an
/// accepted frame. The result depends only on the inputs and the seed.
pub fn multistart(a: &HermitianTuple, k: usize, p: usize, opts: &SearchOptions) -> Result<SearchReport> {
    opts.validate()?;
    let n = a.dim();
    check_frame_size(k, p, n)?;

    let mut runs: Vec<RefineRun> = Vec::new();
    let mut start = 0;
    while start < opts.restarts {
        let end = (start + BATCH).min(opts.restarts);
        let batch: Vec<Result<RefineRun>> = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = restart_rng(opts.seed, i);
                let v0 = random_frame(n, k * p, &mut rng)?;
                refine_with_trace(a, &v0, k, p, opts)
            })
            .collect();
        for r in batch {
            runs.push(r?);
        }
        start = end;
        if runs.iter().any(|r| r.witness.accepted) {
            break;
        }
    }

    let mut best_idx = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.witness.residual < runs[best_idx].witness.residual {
            best_idx = i;
        }
    }
    let residual_trace: Vec<f64> = runs.iter().map(|r| r.witness.residual).collect();
    let iterations_total = runs.iter().map(|r| r.iterations).sum();
    let restarts_used = runs.len();
    let best = runs.swap_remove(best_idx).witness;
    let best = verify_witness(a, &best.v, k, p, opts.tol)?.canonicalize();

    let mut notes = Vec::new();
    if !a.is_commuting() {
        notes.push(format!(
            "tuple is not commuting (largest commutator norm {:.3e})",
            a.commutator_defect()
        ));
    }
    if !best.accepted {
        notes.push(format!(
            "no frame reached tol {:.1e} after {restarts_used} restarts; best residual {:.3e}",
            opts.tol, best.residual
        ));
    }
    Ok(SearchReport { accepted: best.accepted, best, restarts_used, iterations_total, residual_trace, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, pauli, HermitianMatrix};

    fn h(m: ComplexMatrix) -> HermitianMatrix {
        HermitianMatrix::new(m).unwrap()
    }

    fn xyz(qubits: usize) -> HermitianTuple {
        HermitianTuple::new(vec![
            h(pauli::tensor_power(&pauli::x(), qubits)),
            h(pauli::tensor_power(&pauli::y(), qubits)),
            h(pauli::tensor_power(&pauli::z(), qubits)),
        ])
        .unwrap()
    }

    #[test]
    fn residual_of_x_on_identity_frame() {
        let a = HermitianTuple::single(h(pauli::x()));
        let r = residual(&a, &PartialIsometry::new(identity(2)).unwrap(), 2, 1).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn refine_keeps_exact_witness() {
        let a = HermitianTuple::single(HermitianMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]));
        let v0 = PartialIsometry::new(identity(3).columns(0, 2).into_owned()).unwrap();
        let run = refine_with_trace(&a, &v0, 1, 2, &SearchOptions::default()).unwrap();
        assert_eq!(run.iterations, 0);
        assert_eq!(run.witness.v, v0);
    }

    #[test]
    fn refine_scalar_compression_lands_in_interval() {
        let a = HermitianTuple::single(HermitianMatrix::from_real_diagonal(&[5.0, 4.0, 3.0, 2.0, 1.0]));
        let mut rng = restart_rng(7, 0);
        let v0 = random_frame(5, 2, &mut rng).unwrap();
        let run = refine_with_trace(&a, &v0, 2, 1, &SearchOptions::default()).unwrap();
        assert!(run.witness.accepted, "residual {}", run.witness.residual);
        let t = run.witness.d[0][0];
        assert!((2.0 - 1e-8..=4.0 + 1e-8).contains(&t));
        assert!(run.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn refine_finds_rank_four_point_of_three_qubit_paulis() {
        let a = xyz(3);
        let mut rng = restart_rng(0, 0);
        let v0 = random_frame(8, 4, &mut rng).unwrap();
        let w = refine(&a, &v0, 4, 1, &SearchOptions::default()).unwrap();
        assert!(w.accepted, "residual {}", w.residual);
    }

    #[test]
    fn multistart_is_deterministic() {
        let a = HermitianTuple::single(h(pauli::on_qubit(&pauli::x(), 1, 3)));
        let opts = SearchOptions { restarts: 4, ..SearchOptions::default() };
        let r1 = multistart(&a, 4, 2, &opts).unwrap();
        let r2 = multistart(&a, 4, 2, &opts).unwrap();
        assert!(r1.accepted);
        assert_eq!(r1.best.v, r2.best.v);
        assert_eq!(r1.residual_trace, r2.residual_trace);
        assert!((r1.best.d[0][0] - 1.0).abs() < 1e-6 && (r1.best.d[0][1] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn rank_one_single_sector_always_accepted() {
        let a = xyz(2);
        let r = multistart(&a, 1, 1, &SearchOptions { restarts: 1, ..SearchOptions::default() }).unwrap();
        assert!(r.accepted);
        assert_eq!(r.restarts_used, 1);
    }

    #[test]
    fn multistart_rejects_oversized_frames() {
        let a = xyz(1);
        assert!(matches!(
            multistart(&a, 2, 2, &SearchOptions::default()),
            Err(Error::FrameTooLarge { .. })
        ));
    }

    #[test]
    fn options_are_validated() {
        let bad = SearchOptions { tol: 0.0, ..SearchOptions::default() };
        assert!(bad.validate().is_err());
        assert_eq!(SearchOptions::base_case().restarts, 200);
    }
}
