//! Phase-one simplex for small dense feasibility problems `Ax = b, x ≥ 0`.

use nalgebra::DMatrix;

const PIVOT_EPS: f64 = 1e-12;

/// Returns a basic feasible `x` when `min Σ|Ax − b|` (over `x ≥ 0`) is at
/// most `tol`, otherwise `None`. Bland's rule keeps the pivoting finite.
pub(crate) fn feasible(a: &DMatrix<f64>, b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let rows = a.nrows();
    let vars = a.ncols();
    debug_assert_eq!(rows, b.len());
    if rows == 0 {
        return Some(vec![0.0; vars]);
    }
    // tableau columns: vars, artificials, rhs
    let width = vars + rows + 1;
    let mut t = DMatrix::<f64>::zeros(rows + 1, width);
    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..vars {
            t[(i, j)] = sign * a[(i, j)];
        }
        t[(i, vars + i)] = 1.0;
        t[(i, width - 1)] = sign * b[i];
    }
    // objective row holds reduced costs of min Σ artificials
    for j in 0..width {
        if j >= vars && j < vars + rows {
            continue;
        }
        t[(rows, j)] = -(0..rows).map(|i| t[(i, j)]).sum::<f64>();
    }
    let mut basis: Vec<usize> = (vars..vars + rows).collect();

    let max_pivots = 50 * (rows + vars) + 1000;
    for _ in 0..max_pivots {
        let Some(enter) = (0..vars + rows).find(|&j| t[(rows, j)] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..rows {
            let coef = t[(i, enter)];
            if coef > PIVOT_EPS {
                let ratio = t[(i, width - 1)] / coef;
                let better = ratio < best_ratio - PIVOT_EPS
                    || (ratio <= best_ratio + PIVOT_EPS
                        && leave.is_some_and(|l| basis[i] < basis[l]));
                if leave.is_none() || better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            // unbounded descent cannot happen for a sum of nonnegatives
            break;
        };
        pivot(&mut t, row, enter);
        basis[row] = enter;
    }

    let infeasibility = -t[(rows, width - 1)];
    if infeasibility > tol {
        return None;
    }
    let mut x = vec![0.0; vars];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < vars {
            x[bi] = t[(i, width - 1)].max(0.0);
        }
    }
    Some(x)
}

fn pivot(t: &mut DMatrix<f64>, row: usize, col: usize) {
    let p = t[(row, col)];
    let width = t.ncols();
    for j in 0..width {
        t[(row, j)] /= p;
    }
    for i in 0..t.nrows() {
        if i == row {
            continue;
        }
        let f = t[(i, col)];
        if f != 0.0 {
            for j in 0..width {
                let delta = f * t[(row, j)];
                t[(i, j)] -= delta;
            }
        }
    }
}

/// Is `x` within `tol` (ℓ1 sense) of the convex hull of `points`?
pub(crate) fn hull_contains(points: &[&[f64]], x: &[f64], tol: f64) -> bool {
    hull_weights(points, x, tol).is_some()
}

pub(crate) fn hull_weights(points: &[&[f64]], x: &[f64], tol: f64) -> Option<Vec<f64>> {
    let m = x.len();
    let q = points.len();
    if q == 0 {
        return None;
    }
    let mut a = DMatrix::zeros(m + 1, q);
    for (j, pt) in points.iter().enumerate() {
        for i in 0..m {
            a[(i, j)] = pt[i];
        }
        a[(m, j)] = 1.0;
    }
    let mut b = x.to_vec();
    b.push(1.0);
    feasible(&a, &b, tol)
}
