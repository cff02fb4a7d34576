//! Dense phase-1 simplex for linear feasibility `A x = b, x >= 0`.
//!
//! Problems here are tiny (tens of rows, at most a few thousand columns), so
//! a full tableau with Bland's rule is used: slow per pivot but immune to
//! cycling on the highly degenerate systems that symmetric polytopes produce.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Lu;

/// Find `x >= 0` with `sum_j x_j columns[j] = b`, or `None` if the residual of
/// the best phase-1 solution exceeds `tol`.
///
/// The returned point is polished by least-squares refinement on its basic
/// columns, so equality rows hold to roughly machine precision.
pub fn find_nonnegative_solution(columns: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let m = b.len();
    let n = columns.len();
    if n == 0 {
        return b.iter().all(|v| v.abs() <= tol).then(Vec::new);
    }
    debug_assert!(columns.iter().all(|c| c.len() == m));

    // tableau rows: [A | I_artificial | rhs], with rows flipped so rhs >= 0
    let width = n + m + 1;
    let signs: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut t = vec![0.0; m * width];
    let mut cost = vec![0.0; width];
    refactor(columns, b, &signs, &basis, &mut t, &mut cost);

    let pivot_eps = 1e-9;
    let max_iter = 50 * (n + m);
    let mut since_refactor = 0;
    for _ in 0..max_iter {
        if since_refactor >= REFACTOR_EVERY {
            if !refactor(columns, b, &signs, &basis, &mut t, &mut cost) {
                break;
            }
            since_refactor = 0;
        }
        // Bland: first improving column
        let Some(enter) = (0..n + m).find(|&j| cost[j] < -pivot_eps) else {
            if since_refactor > 0 {
                // confirm optimality on a fresh tableau
                if !refactor(columns, b, &signs, &basis, &mut t, &mut cost) {
                    break;
                }
                since_refactor = 0;
                continue;
            }
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[i * width + enter];
            if a > pivot_eps {
                let ratio = t[i * width + width - 1].max(0.0) / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leave else {
            // phase-1 objective is bounded below, so this only happens on
            // numerical noise in the cost row
            break;
        };
        pivot(&mut t, &mut cost, width, m, row, enter);
        basis[row] = enter;
        since_refactor += 1;
    }

    let infeasibility: f64 = -cost[width - 1];
    if infeasibility > tol {
        return None;
    }

    let mut x = vec![0.0; n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[i * width + width - 1].max(0.0);
        }
    }
    polish(columns, b, &mut x, tol);
    let residual = residual_max(columns, b, &x);
    (residual <= tol).then_some(x)
}

/// Pivots between rebuilding the tableau from the original data.
const REFACTOR_EVERY: usize = 25;

/// Rebuild tableau and phase-1 reduced costs as `B^-1 [A | I | b]` for the
/// current basis, discarding accumulated rounding. False if the basis matrix
/// is numerically singular, in which case the tableau is left as is.
fn refactor(
    columns: &[Vec<f64>],
    b: &[f64],
    signs: &[f64],
    basis: &[usize],
    t: &mut [f64],
    cost: &mut [f64],
) -> bool {
    let m = b.len();
    let n = columns.len();
    let width = n + m + 1;
    // signed column j of [A | I | b]
    let column = |j: usize, i: usize| -> f64 {
        if j < n {
            signs[i] * columns[j][i]
        } else if j < n + m {
            if j - n == i {
                1.0
            } else {
                0.0
            }
        } else {
            signs[i] * b[i]
        }
    };
    let mut bm = vec![0.0; m * m];
    for (k, &bj) in basis.iter().enumerate() {
        for i in 0..m {
            bm[i * m + k] = column(bj, i);
        }
    }
    let Some(lu) = Lu::new(m, bm, 1e-12) else {
        return false;
    };
    for j in 0..width {
        let col: Vec<f64> = (0..m).map(|i| column(j, i)).collect();
        let x = lu.solve(&col);
        for i in 0..m {
            t[i * width + j] = x[i];
        }
    }
    for j in 0..width {
        let own = if (n..n + m).contains(&j) { 1.0 } else { 0.0 };
        let mut c = own;
        for (i, &bj) in basis.iter().enumerate() {
            if bj >= n {
                c -= t[i * width + j];
            }
        }
        cost[j] = c;
    }
    true
}

fn pivot(t: &mut [f64], cost: &mut [f64], width: usize, m: usize, row: usize, col: usize) {
    let p = t[row * width + col];
    for j in 0..width {
        t[row * width + j] /= p;
    }
    for i in 0..m {
        if i != row {
            let f = t[i * width + col];
            if f != 0.0 {
                for j in 0..width {
                    t[i * width + j] -= f * t[row * width + j];
                }
            }
        }
    }
    let f = cost[col];
    if f != 0.0 {
        for j in 0..width {
            cost[j] -= f * t[row * width + j];
        }
    }
}

fn residual(columns: &[Vec<f64>], b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = b.to_vec();
    for (col, &xj) in columns.iter().zip(x) {
        if xj != 0.0 {
            for (ri, ci) in r.iter_mut().zip(col) {
                *ri -= xj * ci;
            }
        }
    }
    r
}

fn residual_max(columns: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    residual(columns, b, x)
        .iter()
        .fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Two rounds of least-squares refinement restricted to the support of `x`,
/// via the normal equations of the support columns.
fn polish(columns: &[Vec<f64>], b: &[f64], x: &mut [f64], tol: f64) {
    let support: Vec<usize> = (0..x.len()).filter(|&j| x[j] > 0.0).collect();
    let k = support.len();
    if k == 0 {
        return;
    }
    let mut gram = vec![0.0; k * k];
    for (a, &ja) in support.iter().enumerate() {
        for (c, &jc) in support.iter().enumerate() {
            gram[a * k + c] = crate::linalg::dot(&columns[ja], &columns[jc]);
        }
    }
    let Some(lu) = Lu::new(k, gram, 1e-13) else {
        return;
    };
    for _ in 0..2 {
        let r = residual(columns, b, x);
        let rhs: Vec<f64> = support
            .iter()
            .map(|&j| crate::linalg::dot(&columns[j], &r))
            .collect();
        let delta = lu.solve(&rhs);
        let mut trial = x.to_vec();
        for (&j, dj) in support.iter().zip(&delta) {
            trial[j] += dj;
        }
        if trial.iter().any(|&v| v < -tol) {
            return;
        }
        for v in trial.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        if residual_max(columns, b, &trial) <= residual_max(columns, b, x) {
            x.copy_from_slice(&trial);
        } else {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_feasible() {
        // x0 + x1 = 1, x0 - x1 = 0
        let cols = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let x = find_nonnegative_solution(&cols, &[1.0, 0.0], 1e-9).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn infeasible_detected() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(find_nonnegative_solution(&cols, &[1.0, -1.0], 1e-9).is_none());
    }

    #[test]
    fn redundant_rows_ok() {
        let cols = vec![vec![1.0, 2.0, 1.0], vec![0.0, 0.0, 1.0]];
        let x = find_nonnegative_solution(&cols, &[0.25, 0.5, 1.0], 1e-9).unwrap();
        assert!((x[0] - 0.25).abs() < 1e-14 && (x[1] - 0.75).abs() < 1e-14);
    }
}
