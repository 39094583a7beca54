//! Commuting families: simultaneous diagonalization and the exact solver
//! built on the joint spectrum.

use super::diagonal::{diagonal_find_with_budget, diagonal_outer_empty, DiagonalPointSet, OuterBound};
use super::{
    check_frame_size, lex_desc, verify_witness, CertificateType, HermitianTuple, NotFound, Outcome, Witness,
    DEFAULT_VERIFY_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{compress_hermitian, eig_hermitian, identity, ComplexMatrix, PartialIsometry};
use crate::search::{multistart, SearchOptions};

/// Relative tolerance (against `scale²`) for treating a tuple as commuting.
pub const COMMUTING_TOL: f64 = 1e-10;

const CLUSTER_REL: f64 = 1e-8;
const DEFAULT_CAP: usize = 10_000;
const COMMUTING_PARTITION_BUDGET: usize = 20_000;

/// A joint eigenspace and its eigenvalue vector `(λ_1, …, λ_m)`.
#[derive(Clone, Debug)]
pub struct JointCluster {
    pub values: Vec<f64>,
    pub basis: PartialIsometry,
}

impl JointCluster {
    pub fn multiplicity(&self) -> usize {
        self.basis.frame_dim()
    }
}

/// Joint eigenspaces sorted by eigenvalue vector, lexicographically descending.
#[derive(Clone, Debug)]
pub struct JointSpectrum {
    pub clusters: Vec<JointCluster>,
    /// Clustering tolerance that was used.
    pub tol: f64,
}

impl JointSpectrum {
    /// Unitary whose columns run through the clusters in order.
    pub fn eigenbasis(&self) -> ComplexMatrix {
        let n: usize = self.clusters.iter().map(|c| c.multiplicity()).sum();
        let mut q = ComplexMatrix::zeros(n, n);
        let mut col = 0;
        for c in &self.clusters {
            q.columns_mut(col, c.multiplicity()).copy_from(c.basis.matrix());
            col += c.multiplicity();
        }
        q
    }

    /// Joint eigenvalue vectors repeated by multiplicity, in eigenbasis order.
    pub fn points(&self) -> Result<DiagonalPointSet> {
        let pts = self
            .clusters
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.values.clone(), c.multiplicity()))
            .collect();
        DiagonalPointSet::new(pts)
    }
}

/// Splits `C^n` into joint eigenspaces by refining the eigenspaces of `A_1`
/// with `A_2`, then `A_3`, and so on.
pub fn joint_spectrum(a: &HermitianTuple) -> Result<JointSpectrum> {
    if !a.is_commuting() {
        return Err(Error::NotCommuting { defect: a.commutator_defect() });
    }
    let n = a.dim();
    let mut spread = 0.0f64;
    let mut spectra = Vec::with_capacity(a.m());
    for aj in a.matrices() {
        let s = eig_hermitian(aj)?;
        spread = spread.max(s.spread());
        spectra.push(s);
    }
    let tol = CLUSTER_REL * spread;

    let mut blocks = vec![PartialIsometry::new(identity(n))?];
    for aj in a.matrices() {
        let mut next = Vec::new();
        for q in &blocks {
            let s = eig_hermitian(&compress_hermitian(aj, q)?)?;
            let d = s.values.len();
            let mut start = 0;
            for i in 1..=d {
                if i == d || s.values[i - 1] - s.values[i] > tol {
                    let w = s.vectors.columns(start, i - start);
                    next.push(PartialIsometry::polar(&(q.matrix() * w))?);
                    start = i;
                }
            }
        }
        blocks = next;
    }

    let mut clusters: Vec<JointCluster> = blocks
        .into_iter()
        .map(|basis| {
            let d = basis.frame_dim() as f64;
            let values = a
                .matrices()
                .iter()
                .map(|aj| {
                    let c = compress_hermitian(aj, &basis).expect("block frame matches tuple dimension");
                    c.trace() / d
                })
                .collect();
            JointCluster { values, basis }
        })
        .collect();
    clusters.sort_by(|x, y| lex_desc(&x.values, &y.values));
    Ok(JointSpectrum { clusters, tol })
}

/// Witnesses whose sectors are joint eigenvectors, with the default cap.
pub fn commuting_find(a: &HermitianTuple, k: usize, p: usize) -> Result<Vec<Witness>> {
    commuting_find_capped(a, k, p, DEFAULT_CAP)
}

/// Every way of giving each of the `p` sectors a joint eigenspace, where a
/// cluster of multiplicity `μ` can host up to `⌊μ/k⌋` sectors. Selections
/// are listed in lexicographic order of cluster index, so each witness comes
/// out canonically ordered. At most `cap` witnesses are returned.
///
/// These are not all members of the range; an empty list alone is not a
/// proof of emptiness unless `kp = n` (see [`solve_commuting`]).
pub fn commuting_find_capped(a: &HermitianTuple, k: usize, p: usize, cap: usize) -> Result<Vec<Witness>> {
    check_frame_size(k, p, a.dim())?;
    let js = joint_spectrum(a)?;
    Ok(selections(&js, k, p, cap)
        .into_iter()
        .filter_map(|sel| witness_for(a, &js, k, &sel).ok())
        .filter(|w| w.accepted)
        .collect())
}

fn selections(js: &JointSpectrum, k: usize, p: usize, cap: usize) -> Vec<Vec<usize>> {
    fn rec(cap_of: &[usize], p: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for c in from..cap_of.len() {
            let used = cur.iter().filter(|&&x| x == c).count();
            if used < cap_of[c] {
                cur.push(c);
                rec(cap_of, p, c, cur, out, cap);
                cur.pop();
            }
        }
    }
    let cap_of: Vec<usize> = js.clusters.iter().map(|c| c.multiplicity() / k).collect();
    let mut out = Vec::new();
    rec(&cap_of, p, 0, &mut Vec::new(), &mut out, cap);
    out
}

fn witness_for(a: &HermitianTuple, js: &JointSpectrum, k: usize, sel: &[usize]) -> Result<Witness> {
    let n = a.dim();
    let mut v = ComplexMatrix::zeros(n, k * sel.len());
    for (r, &c) in sel.iter().enumerate() {
        let offset = sel[..r].iter().filter(|&&x| x == c).count() * k;
        v.columns_mut(r * k, k).copy_from(&js.clusters[c].basis.matrix().columns(offset, k));
    }
    verify_witness(a, &PartialIsometry::new(v)?, k, sel.len(), DEFAULT_VERIFY_TOL)
}

/// Exact-first solver for commuting tuples.
///
/// A commuting tuple is unitarily a diagonal one, so the diagonal tools apply
/// to its joint spectrum. In order: a joint-eigenspace witness; the `kp = n`
/// case, where no such witness means the range is empty; the hull bound on
/// `Λ_k`, which also rules out `Λ_(k:p)`; the Tverberg search; multistart.
pub fn solve_commuting(a: &HermitianTuple, k: usize, p: usize, opts: &SearchOptions) -> Result<Outcome> {
    check_frame_size(k, p, a.dim())?;
    let js = joint_spectrum(a)?;
    let exact = CertificateType::ExactCommuting;
    if let Some(sel) = selections(&js, k, p, 1).pop() {
        let w = witness_for(a, &js, k, &sel)?;
        if w.accepted {
            return Ok(Outcome::Found { witness: w, certificate: exact });
        }
    }
    let n = a.dim();
    if k * p == n {
        return Ok(Outcome::NotFound(NotFound::proven_empty(
            exact,
            "kp = n and the joint eigenspace multiplicities are not all multiples of k",
        )));
    }

    let points = js.points()?;
    let mut notes = Vec::new();
    let scale = points.points().iter().flatten().fold(1.0f64, |s, x| s.max(x.abs()));
    match diagonal_outer_empty(&points, k, 1e-10 * scale) {
        Ok(OuterBound::Empty) => {
            return Ok(Outcome::NotFound(NotFound::proven_empty(
                exact,
                format!("joint spectrum admits no point in every (n-k+1)-point hull, so the rank-{k} range is empty"),
            )));
        }
        Ok(OuterBound::Contains(_)) => {}
        Err(Error::TooManySubsets { count, .. }) => notes.push(format!("hull bound skipped: {count} subsets")),
        Err(e) => return Err(e),
    }

    match diagonal_find_with_budget(&points, k, p, COMMUTING_PARTITION_BUDGET) {
        Ok(Some(wd)) => {
            let v = PartialIsometry::polar(&(js.eigenbasis() * wd.v.matrix()))?;
            let w = verify_witness(a, &v, k, p, DEFAULT_VERIFY_TOL)?.canonicalize();
            if w.accepted {
                return Ok(Outcome::Found { witness: w, certificate: exact });
            }
            notes.push(format!("joint-spectrum partition gave residual {:.3e}", w.residual));
        }
        Ok(None) => notes.push("no partition of the joint spectrum works".into()),
        Err(Error::BudgetExceeded { budget }) => notes.push(format!("partition search stopped after {budget} LPs")),
        Err(e) => return Err(e),
    }

    let report = multistart(a, k, p, opts)?;
    if report.accepted {
        return Ok(Outcome::Found { witness: report.best, certificate: CertificateType::SearchOnly });
    }
    notes.extend(report.notes);
    Ok(Outcome::NotFound(NotFound { certificate: CertificateType::SearchOnly, depth: 0, notes }))
}
