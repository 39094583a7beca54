//! Tuples of diagonal matrices, viewed as `n` points `a_j ∈ R^m`.
//!
//! Two tools live here. The outer bound: every member of `Λ_k` lies in
//! `conv{a_j : j ∈ S}` for each `S` with `|S| = n−k+1`, so failing one hull
//! test proves non-membership. And the Tverberg-style search: `k` disjoint
//! index sets whose hulls share a point `x` give `k` orthonormal vectors with
//! disjoint supports that compress every `A_i` to `x_i`.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;

use super::lp::{feasible, hull_contains};
use super::{verify_witness, HermitianTuple, Witness, DEFAULT_VERIFY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, PartialIsometry};

/// Largest number of `(n−k+1)`-subsets the outer bound will enumerate.
pub const SUBSET_LIMIT: u128 = 1_000_000;

/// Default cap on LP solves in [`diagonal_find`].
pub const DEFAULT_PARTITION_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalPointSet {
    points: Vec<Vec<f64>>,
    m: usize,
}

impl DiagonalPointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let m = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| Error::InvalidParameter("point set needs at least one point".into()))?;
        if let Some(bad) = points.iter().find(|p| p.len() != m) {
            return Err(Error::DimensionMismatch { what: "diagonal point", expected: m, found: bad.len() });
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { points, m })
    }

    /// Reads the diagonals of a tuple; off-diagonal entries are ignored.
    pub fn from_tuple(a: &HermitianTuple) -> Result<Self> {
        let n = a.dim();
        let points = (0..n)
            .map(|j| a.matrices().iter().map(|h| h.as_matrix()[(j, j)].re).collect())
            .collect();
        if a.m() == 0 {
            return Ok(Self { points: vec![vec![]; n], m: 0 });
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn scale(&self) -> f64 {
        self.points.iter().flatten().fold(1.0f64, |s, x| s.max(x.abs()))
    }
}

fn binomial(n: usize, r: usize) -> u128 {
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Distinct-point supports of all `(n−k+1)`-subsets. A hull only depends on
/// which distinct points it contains, so repeated points collapse here.
fn subset_supports(points: &DiagonalPointSet, k: usize) -> Result<Vec<Vec<usize>>> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}")));
    }
    let size = n - k + 1;
    let count = binomial(n, size);
    if count > SUBSET_LIMIT {
        return Err(Error::TooManySubsets { count, limit: SUBSET_LIMIT });
    }
    let mut ids = Vec::with_capacity(n);
    let mut reps: Vec<usize> = Vec::new();
    for (j, p) in points.points().iter().enumerate() {
        match reps.iter().position(|&r| points.points()[r] == *p) {
            Some(id) => ids.push(id),
            None => {
                ids.push(reps.len());
                reps.push(j);
            }
        }
    }
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    let mut comb: Vec<usize> = (0..size).collect();
    loop {
        let mut support: Vec<usize> = comb.iter().map(|&j| ids[j]).collect();
        support.sort_unstable();
        support.dedup();
        if seen.insert(support.clone()) {
            out.push(support.iter().map(|&id| reps[id]).collect());
        }
        // next combination in lexicographic order
        let Some(i) = (0..size).rev().find(|&i| comb[i] != i + n - size) else {
            break;
        };
        comb[i] += 1;
        for t in i + 1..size {
            comb[t] = comb[t - 1] + 1;
        }
    }
    Ok(out)
}

fn hull_of<'a>(points: &'a DiagonalPointSet, support: &[usize]) -> Vec<&'a [f64]> {
    support.iter().map(|&j| points.points()[j].as_slice()).collect()
}

/// Outer-bound membership test: `false` proves `x ∉ Λ_k`.
pub fn diagonal_outer_test(points: &DiagonalPointSet, k: usize, x: &[f64], tol: f64) -> Result<bool> {
    if x.len() != points.m() {
        return Err(Error::DimensionMismatch { what: "outer test point", expected: points.m(), found: x.len() });
    }
    let supports = subset_supports(points, k)?;
    Ok(supports.iter().all(|s| hull_contains(&hull_of(points, s), x, tol)))
}

/// Verdict of the outer bound over all of `R^m`.
#[derive(Clone, Debug, PartialEq)]
pub enum OuterBound {
    /// The hull intersection is empty, hence `Λ_k = ∅`.
    Empty,
    /// A point in every hull (not necessarily in `Λ_k`).
    Contains(Vec<f64>),
}

/// Decides whether `∩_S conv{a_j : j ∈ S}` is empty by constraint
/// generation: solve for a common point of a growing family of hulls and add
/// any hull that rejects it.
pub fn diagonal_outer_empty(points: &DiagonalPointSet, k: usize, tol: f64) -> Result<OuterBound> {
    let supports = subset_supports(points, k)?;
    let m = points.m();
    let mut active: Vec<usize> = vec![0];
    loop {
        let cols = 2 * m + active.iter().map(|&s| supports[s].len()).sum::<usize>();
        let rows = active.len() * (m + 1);
        let mut a = DMatrix::zeros(rows, cols);
        let mut b = vec![0.0; rows];
        let mut col = 2 * m;
        for (blk, &s) in active.iter().enumerate() {
            let base = blk * (m + 1);
            for i in 0..m {
                a[(base + i, i)] = -1.0;
                a[(base + i, m + i)] = 1.0;
            }
            for &j in &supports[s] {
                for i in 0..m {
                    a[(base + i, col)] = points.points()[j][i];
                }
                a[(base + m, col)] = 1.0;
                col += 1;
            }
            b[base + m] = 1.0;
        }
        let Some(sol) = feasible(&a, &b, tol * active.len() as f64) else {
            return Ok(OuterBound::Empty);
        };
        let x: Vec<f64> = (0..m).map(|i| sol[i] - sol[m + i]).collect();
        let violated: Vec<usize> = (0..supports.len())
            .filter(|s| !active.contains(s))
            .filter(|&s| !hull_contains(&hull_of(points, &supports[s]), &x, tol))
            .take(4)
            .collect();
        if violated.is_empty() {
            return Ok(OuterBound::Contains(x));
        }
        active.extend(violated);
    }
}

/// One group of a Tverberg configuration: the parts with their hull weights.
#[derive(Clone, Debug)]
struct TverbergPart {
    parts: Vec<Vec<(usize, f64)>>,
}

struct Searcher<'a> {
    points: &'a DiagonalPointSet,
    k: usize,
    budget: usize,
    used: usize,
    memo: HashMap<Vec<usize>, Option<TverbergPart>>,
    tol: f64,
}

impl Searcher<'_> {
    fn charge(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        Ok(())
    }

    fn tverberg(&mut self, group: &[usize]) -> Result<Option<TverbergPart>> {
        if let Some(hit) = self.memo.get(group) {
            return Ok(hit.clone());
        }
        let found = self.tverberg_uncached(group)?;
        self.memo.insert(group.to_vec(), found.clone());
        Ok(found)
    }

    /// `(m+1)(k−1)+1` points always admit a Tverberg `k`-partition, so larger
    /// groups are cut to that size; smaller ones are searched exhaustively.
    fn tverberg_uncached(&mut self, group: &[usize]) -> Result<Option<TverbergPart>> {
        let k = self.k;
        let m = self.points.m();
        if group.len() < k {
            return Ok(None);
        }
        if k == 1 {
            let j = group[0];
            return Ok(Some(TverbergPart { parts: vec![vec![(j, 1.0)]] }));
        }
        let take = group.len().min((m + 1) * (k - 1) + 1);
        let g = &group[..take];
        let mut labels = vec![0usize; take];
        let mut result = None;
        self.partitions(g, &mut labels, 1, 1, &mut result)?;
        Ok(result)
    }

    fn partitions(
        &mut self,
        g: &[usize],
        labels: &mut Vec<usize>,
        pos: usize,
        used_blocks: usize,
        result: &mut Option<TverbergPart>,
    ) -> Result<()> {
        if result.is_some() {
            return Ok(());
        }
        let k = self.k;
        if pos == g.len() {
            if used_blocks == k {
                *result = self.solve_partition(g, labels)?;
            }
            return Ok(());
        }
        if used_blocks + (g.len() - pos) < k {
            return Ok(());
        }
        for b in 0..(used_blocks + 1).min(k) {
            labels[pos] = b;
            self.partitions(g, labels, pos + 1, used_blocks.max(b + 1), result)?;
            if result.is_some() {
                break;
            }
        }
        Ok(())
    }

    fn solve_partition(&mut self, g: &[usize], labels: &[usize]) -> Result<Option<TverbergPart>> {
        self.charge()?;
        let k = self.k;
        let m = self.points.m();
        let vars = g.len();
        let rows = k + m * (k - 1);
        let mut a = DMatrix::zeros(rows, vars);
        for (c, (&j, &blk)) in g.iter().zip(labels).enumerate() {
            a[(blk, c)] = 1.0;
            let pt = &self.points.points()[j];
            for i in 0..m {
                if blk == 0 {
                    for t in 1..k {
                        a[(k + (t - 1) * m + i, c)] += pt[i];
                    }
                } else {
                    a[(k + (blk - 1) * m + i, c)] -= pt[i];
                }
            }
        }
        let mut b = vec![0.0; rows];
        b[..k].fill(1.0);
        let Some(w) = feasible(&a, &b, self.tol) else {
            return Ok(None);
        };
        let mut parts = vec![Vec::new(); k];
        for (c, (&j, &blk)) in g.iter().zip(labels).enumerate() {
            if w[c] > 0.0 {
                parts[blk].push((j, w[c]));
            }
        }
        Ok(Some(TverbergPart { parts }))
    }
}

/// Searches for a witness with disjointly supported columns, using the
/// default LP budget.
pub fn diagonal_find(points: &DiagonalPointSet, k: usize, p: usize) -> Result<Option<Witness>> {
    diagonal_find_with_budget(points, k, p, DEFAULT_PARTITION_BUDGET)
}

/// `Ok(None)` means the search space was exhausted without success, which
/// is not a proof of emptiness. Running out of budget is an error.
///
/// For `p > 1` the index set is split into `p` groups, each solved as a
/// `p = 1` problem: consecutive blocks first, then arbitrary set partitions.
pub fn diagonal_find_with_budget(
    points: &DiagonalPointSet,
    k: usize,
    p: usize,
    budget: usize,
) -> Result<Option<Witness>> {
    if k == 0 || p == 0 {
        return Err(Error::InvalidParameter("k and p must be at least 1".into()));
    }
    let n = points.len();
    if n < k * p {
        return Ok(None);
    }
    let mut s = Searcher {
        points,
        k,
        budget,
        used: 0,
        memo: HashMap::new(),
        tol: 1e-10 * points.scale(),
    };

    for sizes in compositions(n, p, k, points.m()) {
        let mut start = 0;
        let mut groups = Vec::with_capacity(p);
        for &len in &sizes {
            let block: Vec<usize> = (start..start + len).collect();
            start += len;
            match s.tverberg(&block)? {
                Some(t) => groups.push(t),
                None => break,
            }
        }
        if groups.len() == p {
            return build_witness(points, k, p, &groups).map(Some);
        }
    }
    if p == 1 {
        return Ok(None);
    }

    let mut labels = vec![0usize; n];
    let mut found = None;
    grouped_partitions(&mut s, p, &mut labels, 1, 1, &mut found)?;
    match found {
        Some(groups) => build_witness(points, k, p, &groups).map(Some),
        None => Ok(None),
    }
}

/// Compositions of `n` into `p` parts of size ≥ `k`, with the one that gives
/// every leading block exactly `(m+1)k − m` entries tried first.
fn compositions(n: usize, p: usize, k: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if left >= k {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for first in k..=left.saturating_sub(k * (parts - 1)) {
            cur.push(first);
            rec(left - first, parts - 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, p, k, &mut Vec::new(), &mut out);
    let tverberg = (m + 1) * k - m;
    if let Some(pos) = out
        .iter()
        .position(|c| c[..p - 1].iter().all(|&s| s == tverberg))
    {
        let preferred = out.remove(pos);
        out.insert(0, preferred);
    }
    out
}

fn grouped_partitions(
    s: &mut Searcher<'_>,
    p: usize,
    labels: &mut Vec<usize>,
    pos: usize,
    used: usize,
    found: &mut Option<Vec<TverbergPart>>,
) -> Result<()> {
    let n = labels.len();
    if found.is_some() {
        return Ok(());
    }
    if pos == n {
        if used != p {
            return Ok(());
        }
        let mut groups = Vec::with_capacity(p);
        for g in 0..p {
            let members: Vec<usize> = (0..n).filter(|&j| labels[j] == g).collect();
            if members.len() < s.k {
                return Ok(());
            }
            match s.tverberg(&members)? {
                Some(t) => groups.push(t),
                None => return Ok(()),
            }
        }
        *found = Some(groups);
        return Ok(());
    }
    if used + (n - pos) < p {
        return Ok(());
    }
    for b in 0..(used + 1).min(p) {
        labels[pos] = b;
        grouped_partitions(s, p, labels, pos + 1, used.max(b + 1), found)?;
        if found.is_some() {
            break;
        }
    }
    Ok(())
}

fn build_witness(points: &DiagonalPointSet, k: usize, p: usize, groups: &[TverbergPart]) -> Result<Witness> {
    let n = points.len();
    let mut v = ComplexMatrix::zeros(n, k * p);
    for (r, g) in groups.iter().enumerate() {
        for (t, part) in g.parts.iter().enumerate() {
            let total: f64 = part.iter().map(|(_, w)| w).sum();
            for &(j, w) in part {
                v[(j, r * k + t)] = num_complex::Complex64::new((w / total).sqrt(), 0.0);
            }
        }
    }
    let v = PartialIsometry::new(v)?;
    let tuple = HermitianTuple::from_diagonals(points);
    Ok(verify_witness(&tuple, &v, k, p, DEFAULT_VERIFY_TOL)?.canonicalize())
}

/// The window `p((m+1)k − m) ≤ n < (m+1)kp − m` in which a diagonal tuple
/// can separate `Λ_(k:p)` from `Λ_kp`.
pub fn separation_window(m: usize, k: usize, p: usize) -> (usize, usize) {
    let lo = p * ((m + 1) * k - m);
    let hi = ((m + 1) * k * p).saturating_sub(m);
    (lo, hi)
}

/// Diagonal tuple with `Λ_kp = ∅` and `Λ_(k:p) ≠ ∅`.
///
/// With `r = ⌊n/(kp−1)⌋`, matrix `i ≤ min(r, m)` is the indicator of the
/// `i`-th run of `kp−1` consecutive coordinates; any further matrices are 0.
pub fn separation_instance(m: usize, k: usize, p: usize, n: usize) -> Result<DiagonalPointSet> {
    if m == 0 || k == 0 || p == 0 {
        return Err(Error::InvalidParameter("m, k and p must be at least 1".into()));
    }
    let (lo, hi) = separation_window(m, k, p);
    if n < lo || n >= hi {
        return Err(Error::OutsideWindow { n, lo, hi });
    }
    let run = k * p - 1;
    let r = n / run;
    let active = r.min(m);
    let points = (0..n)
        .map(|j| (0..m).map(|i| if i < active && j / run == i { 1.0 } else { 0.0 }).collect())
        .collect();
    DiagonalPointSet::new(points)
}
