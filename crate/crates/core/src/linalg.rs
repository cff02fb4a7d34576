//! Small dense real linear algebra used by the geometry kernels.
//!
//! Dimensions here never exceed a few dozen, so plain row-major `Vec<f64>`
//! storage and partial-pivot elimination are all that is needed.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent on newer toolchains
use num_traits::Float;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    scaled(a, 1.0 / norm(a))
}

/// `a + s * b`
pub fn axpy(a: &mut [f64], s: f64, b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += s * y;
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// LU factorization with partial pivoting of a square matrix, kept around so
/// several right-hand sides can be solved against the same factors.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factor the row-major `n x n` matrix `a`. Returns `None` when a pivot
    /// falls below `pivot_tol` (numerically singular).
    pub fn new(n: usize, mut a: Vec<f64>, pivot_tol: f64) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= pivot_tol {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// Solve the square system `rows * x = b`.
pub fn solve(rows: &[Vec<f64>], b: &[f64], pivot_tol: f64) -> Option<Vec<f64>> {
    let n = rows.len();
    let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    Lu::new(n, flat, pivot_tol).map(|lu| lu.solve(b))
}

/// Orthonormal basis of the span of `vectors` by modified Gram-Schmidt with
/// one reorthogonalization pass. Vectors whose residual norm is below `tol`
/// (relative to their own norm) are treated as dependent.
pub fn orthonormal_basis(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let scale = norm(v);
        if scale == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&r, q);
                axpy(&mut r, -c, q);
            }
        }
        let rn = norm(&r);
        if rn > tol * scale.max(1.0) {
            basis.push(scaled(&r, 1.0 / rn));
        }
    }
    basis
}

pub fn rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    orthonormal_basis(vectors, tol).len()
}

/// Coordinates of `v` in the orthonormal `basis`.
pub fn project(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    basis.iter().map(|q| dot(q, v)).collect()
}

/// Inverse of [`project`]: `sum_i coords[i] * basis[i]`.
pub fn embed(basis: &[Vec<f64>], coords: &[f64], ambient: usize) -> Vec<f64> {
    let mut out = vec![0.0; ambient];
    for (q, c) in basis.iter().zip(coords) {
        axpy(&mut out, *c, q);
    }
    out
}

/// 3x3 real matrix, row-major.
pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, cij) in row.iter_mut().enumerate() {
            *cij = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn mat3_apply(a: &Mat3, v: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|k| a[i][k] * v[k]).sum();
    }
    out
}

pub fn mat3_transpose(a: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn mat3_det(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn mat3_distance(a: &Mat3, b: &Mat3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
        }
    }
    s.sqrt()
}

/// Rotation about the unit `axis` by the angle whose cosine and sine are
/// given (Rodrigues). Taking `cos`/`sin` directly lets callers pass exact
/// closed forms.
pub fn rotation_from_axis(axis: [f64; 3], cos: f64, sin: f64) -> Mat3 {
    let n = norm(&axis);
    let [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
    let t = 1.0 - cos;
    [
        [t * x * x + cos, t * x * y - sin * z, t * x * z + sin * y],
        [t * x * y + sin * z, t * y * y + cos, t * y * z - sin * x],
        [t * x * z - sin * y, t * y * z + sin * x, t * z * z + cos],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lu_solves_permuted_system() {
        let rows = vec![vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]];
        let x = solve(&rows, &[5.0, 3.0, 6.0], 1e-12).unwrap();
        for (r, b) in rows.iter().zip([5.0, 3.0, 6.0]) {
            assert_relative_eq!(dot(r, &x), b, epsilon = 1e-12);
        }
    }

    #[test]
    fn singular_system_rejected() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(&rows, &[1.0, 2.0], 1e-12).is_none());
    }

    #[test]
    fn basis_drops_dependent_vectors() {
        let vs = vec![
            vec![1.0, 1.0, 0.0],
            vec![2.0, 2.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ];
        let b = orthonormal_basis(&vs, 1e-9);
        assert_eq!(b.len(), 2);
        assert_relative_eq!(dot(&b[0], &b[1]), 0.0, epsilon = 1e-14);
        let c = project(&b, &[3.0, -1.0, 0.0]);
        let back = embed(&b, &c, 3);
        assert!(max_abs_diff(&back, &[3.0, -1.0, 0.0]) < 1e-12);
    }

    #[test]
    fn quarter_turn_about_z() {
        let r = rotation_from_axis([0.0, 0.0, 1.0], 0.0, 1.0);
        let v = mat3_apply(&r, &[1.0, 0.0, 0.0]);
        assert!(max_abs_diff(&v, &[0.0, 1.0, 0.0]) < 1e-15);
        assert_relative_eq!(mat3_det(&r), 1.0, epsilon = 1e-15);
    }
}
