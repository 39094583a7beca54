//! Sector-by-sector construction.
//!
//! Find a rank-`k` frame `U_1` with `U_1*A_jU_1` scalar, let `W` be the
//! orthogonal complement of `span{U_1, A_1U_1, …, A_mU_1}`, solve the
//! `(k:p−1)` problem for `C_j = W*A_jW`, and stack. Every `A_jU_1` lies in
//! the discarded span, so the cross blocks vanish and the sectors decouple.

use nalgebra::DVector;
use num_complex::Complex64;

use super::commuting::solve_commuting;
use super::single::{single_range, single_witness};
use super::{
    check_frame_size, verify_witness, CertificateType, HermitianTuple, NotFound, Outcome, DEFAULT_VERIFY_TOL,
};
use crate::error::Result;
use crate::linalg::{complement, compress_hermitian, identity, orthonormalize, HermitianMatrix, PartialIsometry};
use crate::search::{multistart, SearchOptions};

const REDUCE_TOL: f64 = 1e-10;
const SPAN_TOL: f64 = 1e-10;

/// Exact solvers where they apply (no independent matrices, one matrix,
/// commuting families, unitary frames of non-commuting tuples), otherwise
/// the recursion with `opts` as the budget of each rank-`k` subproblem.
pub fn constructive_find(a: &HermitianTuple, k: usize, p: usize, opts: &SearchOptions) -> Result<Outcome> {
    check_frame_size(k, p, a.dim())?;
    opts.validate()?;
    if let Some(out) = exact_route(a, k, p, opts)? {
        return Ok(out);
    }
    let (reduced, _) = a.reduce(REDUCE_TOL)?;
    let base = SearchOptions { tol: opts.tol / (p as f64).sqrt(), ..opts.clone() };
    match recurse(&reduced, k, p, &base, 0)? {
        Ok(v) => {
            let w = verify_witness(a, &v, k, p, opts.tol)?.canonicalize();
            if w.accepted {
                Ok(Outcome::Found { witness: w, certificate: CertificateType::SearchOnly })
            } else {
                Ok(Outcome::NotFound(NotFound::search(
                    0,
                    format!("assembled frame has residual {:.3e}", w.residual),
                )))
            }
        }
        Err(nf) => Ok(Outcome::NotFound(nf)),
    }
}

pub(crate) fn exact_route(
    a: &HermitianTuple,
    k: usize,
    p: usize,
    opts: &SearchOptions,
) -> Result<Option<Outcome>> {
    let n = a.dim();
    let (reduced, _) = a.reduce(REDUCE_TOL)?;
    match reduced.m() {
        0 => {
            let v = PartialIsometry::new(identity(n).columns(0, k * p).into_owned())?;
            let w = verify_witness(a, &v, k, p, DEFAULT_VERIFY_TOL)?;
            Ok(Some(Outcome::Found { witness: w, certificate: CertificateType::ExactCommuting }))
        }
        1 => interlacing(a, reduced.get(0), k, p).map(Some),
        _ if a.is_commuting() => solve_commuting(a, k, p, opts).map(Some),
        _ if k * p == n => Ok(Some(Outcome::NotFound(NotFound::proven_empty(
            CertificateType::ExactCommuting,
            format!(
                "kp = n makes the frame unitary, which needs a commuting tuple (largest commutator norm {:.3e})",
                a.commutator_defect()
            ),
        )))),
        _ => Ok(None),
    }
}

/// Solves for the single matrix `b` that spans `a` together with `I`.
fn interlacing(a: &HermitianTuple, b: &HermitianMatrix, k: usize, p: usize) -> Result<Outcome> {
    let rbox = single_range(b, k, p)?;
    let Some(t) = rbox.top_member() else {
        return Ok(Outcome::NotFound(NotFound::proven_empty(
            CertificateType::ExactInterlacing,
            "interlacing bounds leave no room: some lower bound exceeds its upper bound",
        )));
    };
    let w = single_witness(b, k, p, &t)?;
    let w = verify_witness(a, &w.v, k, p, DEFAULT_VERIFY_TOL)?.canonicalize();
    Ok(Outcome::Found { witness: w, certificate: CertificateType::ExactInterlacing })
}

/// Rank-`k` frame with scalar compressions, or `None`.
fn base_case(a: &HermitianTuple, k: usize, opts: &SearchOptions) -> Result<Option<PartialIsometry>> {
    let out = match exact_route(a, k, 1, opts)? {
        Some(out) => out,
        None => {
            let report = multistart(a, k, 1, opts)?;
            if !report.accepted {
                return Ok(None);
            }
            return Ok(Some(report.best.v));
        }
    };
    Ok(out.into_witness().filter(|w| w.residual <= opts.tol).map(|w| w.v))
}

pub(crate) fn recurse(
    a: &HermitianTuple,
    k: usize,
    p: usize,
    opts: &SearchOptions,
    depth: usize,
) -> Result<std::result::Result<PartialIsometry, NotFound>> {
    let n = a.dim();
    if n < k * p {
        return Ok(Err(NotFound::search(depth, format!("{n} dimensions left for {p} sectors of rank {k}"))));
    }
    let Some(u1) = base_case(a, k, opts)? else {
        return Ok(Err(NotFound::search(depth, format!("no rank-{k} scalar compression found"))));
    };
    if p == 1 {
        return Ok(Ok(u1));
    }

    let mut cols: Vec<DVector<Complex64>> = u1.matrix().column_iter().map(|c| c.into_owned()).collect();
    for aj in a.matrices() {
        let au = aj.as_matrix() * u1.matrix();
        cols.extend(au.column_iter().map(|c| c.into_owned()));
    }
    let span = orthonormalize(&cols, SPAN_TOL)?;
    let w = complement(&span)?;
    if w.frame_dim() < k * (p - 1) {
        return Ok(Err(NotFound::search(
            depth + 1,
            format!("complement has dimension {} but {} sectors of rank {k} remain", w.frame_dim(), p - 1),
        )));
    }
    let c = a
        .matrices()
        .iter()
        .map(|aj| compress_hermitian(aj, &w))
        .collect::<Result<Vec<_>>>()?;
    let c = HermitianTuple::with_dim(w.frame_dim(), c)?;
    let v2 = match recurse(&c, k, p - 1, opts, depth + 1)? {
        Ok(v2) => v2,
        Err(nf) => return Ok(Err(nf)),
    };
    let lifted = PartialIsometry::polar(&(w.matrix() * v2.matrix()))?;
    Ok(Ok(PartialIsometry::polar(u1.concat(&lifted)?.matrix())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, ComplexMatrix};
    use crate::search::{random_frame, restart_rng};
    use rand::Rng;

    fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
        let mut rng = restart_rng(seed, 99);
        let g = random_frame(n, n, &mut rng).unwrap();
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = g.matrix() * crate::linalg::from_real_diagonal(&d) * g.matrix().adjoint();
        HermitianMatrix::new(m).unwrap()
    }

    #[test]
    fn recursion_meets_the_general_bound_for_one_matrix() {
        // m = 1, k = 2, p = 2: (m+1)((m+1)(k−1)+k(p−1)) = 8
        for seed in 0..5 {
            let a = HermitianTuple::single(random_hermitian(8, seed));
            let v = recurse(&a, 2, 2, &SearchOptions::base_case(), 0).unwrap().unwrap();
            let w = verify_witness(&a, &v, 2, 2, 1e-8).unwrap();
            assert!(w.accepted, "seed {seed}: residual {}", w.residual);
        }
    }

    #[test]
    fn recursion_for_two_noncommuting_matrices() {
        // m = 2, k = 2, p = 2: bound 3(3 + 2) = 15
        let a = HermitianTuple::new(vec![random_hermitian(15, 1), random_hermitian(15, 2)]).unwrap();
        assert!(!a.is_commuting());
        let out = constructive_find(&a, 2, 2, &SearchOptions::base_case()).unwrap();
        assert_eq!(out.certificate(), CertificateType::SearchOnly);
        assert!(out.witness().unwrap().accepted);
    }

    #[test]
    fn diagonal_tuples_use_exact_solvers() {
        let a = HermitianTuple::new(vec![
            HermitianMatrix::from_real_diagonal(&[1.0, 0.0, 1.0, 0.0, 2.0]),
            HermitianMatrix::from_real_diagonal(&[0.0, 0.0, 0.0, 1.0, 1.0]),
        ])
        .unwrap();
        let out = constructive_find(&a, 1, 3, &SearchOptions::default()).unwrap();
        assert_eq!(out.certificate(), CertificateType::ExactCommuting);
        assert!(out.witness().unwrap().accepted);
    }

    #[test]
    fn too_few_clusters_for_a_unitary_frame() {
        // n = kp = 4 with spectrum (2, 1, 1, 0): Λ_(2:2) is empty
        let a = HermitianTuple::single(HermitianMatrix::from_real_diagonal(&[2.0, 1.0, 1.0, 0.0]));
        let out = constructive_find(&a, 2, 2, &SearchOptions::default()).unwrap();
        match out {
            Outcome::NotFound(nf) => assert_eq!(nf.certificate, CertificateType::ExactInterlacing),
            Outcome::Found { .. } => panic!("found a witness for an empty range"),
        }
    }

    #[test]
    fn non_commuting_unitary_frames_are_impossible() {
        let x = crate::linalg::pauli::x();
        let mut y = ComplexMatrix::zeros(2, 2);
        y[(0, 1)] = c64(0.0, -1.0);
        y[(1, 0)] = c64(0.0, 1.0);
        let a = HermitianTuple::new(vec![HermitianMatrix::new(x).unwrap(), HermitianMatrix::new(y).unwrap()])
            .unwrap();
        let out = constructive_find(&a, 1, 2, &SearchOptions::default()).unwrap();
        assert!(matches!(out, Outcome::NotFound(ref nf) if nf.is_certified_empty()));
    }
}
