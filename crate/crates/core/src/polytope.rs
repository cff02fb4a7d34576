//! Constraint polytopes over Bloch coordinates.
//!
//! A measurement set defines the polytope of all `y` whose outcome
//! probabilities `w[1 + (d-1) m.y]` stay in `[0,1]`. For projective outcomes
//! this is `-1/(d-1) <= m.y <= 1`; for a qubit the constraints of `m` and
//! `-m` coincide and the polytope is the polar dual of the measurement
//! polytope `conv{+-m_n}`. Its vertices are the candidate hidden-variable
//! states.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[allow(unused_imports)] // inherent on newer toolchains
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::bloch::{bloch_dim, gell_mann_basis, HermitianOperator, MeasurementSet};
use crate::linalg::{self, dot, norm, Lu};
use crate::{lp, Error, Result, Tolerance};

/// `lower <= normal . y <= upper`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub normal: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl Constraint {
    fn flipped(&self) -> Self {
        Self {
            normal: self.normal.iter().map(|c| -c).collect(),
            lower: -self.upper,
            upper: -self.lower,
        }
    }

    fn satisfied(&self, y: &[f64], eps: f64) -> bool {
        let v = dot(&self.normal, y);
        let slack = eps * norm(&self.normal).max(1.0);
        v >= self.lower - slack && v <= self.upper + slack
    }
}

/// Intersection of two-sided linear constraints.
///
/// When `basis` is present the constraints live in the span of those
/// orthonormal ambient vectors and `dim == basis.len()`; vertices are
/// reported back in ambient coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HRepPolytope {
    pub dim: usize,
    pub constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VRepPolytope {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
}

impl HRepPolytope {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Result<Self> {
        let h = Self {
            dim,
            constraints,
            basis: None,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.constraints.iter().enumerate() {
            if c.normal.len() != self.dim {
                return Err(Error::input(format!(
                    "constraint {i} has {} components, expected {}",
                    c.normal.len(),
                    self.dim
                )));
            }
            if norm(&c.normal) == 0.0 {
                return Err(Error::input(format!("constraint {i} has a zero normal")));
            }
            #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
            if !(c.lower < c.upper) {
                return Err(Error::input(format!("constraint {i} has lower >= upper")));
            }
        }
        if let Some(b) = &self.basis {
            if b.len() != self.dim {
                return Err(Error::input("span basis size does not match dim"));
            }
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        match &self.basis {
            Some(b) => b.first().map_or(self.dim, Vec::len),
            None => self.dim,
        }
    }

    /// Number of single-sided inequalities.
    pub fn inequality_count(&self) -> usize {
        2 * self.constraints.len()
    }

    /// Rewrite the constraints in an orthonormal basis of the span of their
    /// normals. The polytope is unbounded along the orthogonal complement, so
    /// this is what makes rank-deficient direction sets enumerable.
    pub fn reduce_to_span(&self, tol: Tolerance) -> Self {
        let normals: Vec<Vec<f64>> = self.constraints.iter().map(|c| c.normal.clone()).collect();
        let span = linalg::orthonormal_basis(&normals, tol.eps);
        if span.len() == self.dim {
            return self.clone();
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint {
                normal: linalg::project(&span, &c.normal),
                lower: c.lower,
                upper: c.upper,
            })
            .collect();
        // compose with any existing embedding
        let basis = match &self.basis {
            None => span.clone(),
            Some(outer) => span
                .iter()
                .map(|q| linalg::embed(outer, q, self.ambient_dim()))
                .collect(),
        };
        Self {
            dim: span.len(),
            constraints,
            basis: Some(basis),
        }
    }

    fn to_ambient(&self, y: Vec<f64>) -> Vec<f64> {
        match &self.basis {
            Some(b) => linalg::embed(b, &y, self.ambient_dim()),
            None => y,
        }
    }
}

fn canonical_sign(v: &[f64], eps: f64) -> bool {
    v.iter().find(|c| c.abs() > eps).is_none_or(|&c| c > 0.0)
}

/// Merge constraints with parallel normals into one (intersecting the bands).
fn merge_constraints(cs: Vec<Constraint>, tol: Tolerance) -> Vec<Constraint> {
    let mut out: Vec<Constraint> = Vec::new();
    for c in cs {
        let scale = norm(&c.normal);
        let c = Constraint {
            normal: c.normal.iter().map(|x| x / scale).collect(),
            lower: c.lower / scale,
            upper: c.upper / scale,
        };
        let c = if canonical_sign(&c.normal, tol.eps) { c } else { c.flipped() };
        match out
            .iter_mut()
            .find(|o| linalg::distance(&o.normal, &c.normal) <= tol.dedup)
        {
            Some(o) => {
                o.lower = o.lower.max(c.lower);
                o.upper = o.upper.min(c.upper);
            }
            None => out.push(c),
        }
    }
    out
}

/// Constraint polytope of a measurement set, `0 <= p_r^(n)(y) <= 1` for every
/// outcome. Duplicate and antipodal directions collapse into one two-sided
/// constraint; rank-deficient direction sets are reduced to their span.
pub fn build_hrep(meas: &MeasurementSet, tol: Tolerance) -> Result<HRepPolytope> {
    if meas.is_empty() {
        return Err(Error::input("measurement set is empty"));
    }
    let d = meas.d() as f64;
    let mut raw = Vec::with_capacity(meas.total_outcomes());
    for (n, frame) in meas.frames().iter().enumerate() {
        for (r, m) in frame.iter().enumerate() {
            let w = meas.weight(n, r);
            raw.push(Constraint {
                normal: m.coords().to_vec(),
                lower: -1.0 / (d - 1.0),
                upper: (1.0 / w - 1.0) / (d - 1.0),
            });
        }
    }
    let h = HRepPolytope {
        dim: bloch_dim(meas.d()),
        constraints: merge_constraints(raw, tol),
        basis: None,
    };
    h.validate()?;
    Ok(h.reduce_to_span(tol))
}

/// Constraints `Tr(y E) in [0,1]` on unit-trace `y`, for POVMs given as
/// operator groups that each sum to the identity.
///
/// With `E = a I + Bloch part`, `Tr(yE) = a + b.y` where `a = Tr(E)/d` and
/// `b_i = Tr(E l_i)(d-1)/d`. Elements proportional to the identity give a
/// trivially satisfied constraint and are dropped. The result is in ambient
/// Bloch coordinates, not reduced to the span.
pub fn povm_hrep(povms: &[Vec<HermitianOperator>], tol: Tolerance) -> Result<HRepPolytope> {
    let d = povms
        .first()
        .and_then(|p| p.first())
        .map(|e| e.d())
        .ok_or_else(|| Error::input("no POVM elements"))?;
    let basis = gell_mann_basis(d)?;
    let df = d as f64;
    let id = HermitianOperator::identity(d);
    let mut constraints = Vec::new();
    for (n, povm) in povms.iter().enumerate() {
        let mut sum = id.scale(0.0);
        for (r, e) in povm.iter().enumerate() {
            if e.d() != d {
                return Err(Error::input("POVM elements of differing dimension"));
            }
            if !e.is_positive_semidefinite(tol.eps) {
                return Err(Error::input(format!(
                    "element {r} of POVM {n} is not positive semidefinite"
                )));
            }
            sum = sum.add(e);
            let a = e.trace() / df;
            let b: Vec<f64> = basis
                .iter()
                .map(|l| e.trace_product(l) * (df - 1.0) / df)
                .collect();
            if norm(&b) <= tol.eps {
                log::debug!("dropping trivially satisfied constraint of POVM {n} element {r}");
                continue;
            }
            constraints.push(Constraint {
                normal: b,
                lower: -a,
                upper: 1.0 - a,
            });
        }
        if sum.max_abs_diff(&id) > tol.eps * 10.0 {
            return Err(Error::InvalidMeasurement(format!(
                "elements of POVM {n} do not sum to the identity"
            )));
        }
    }
    HRepPolytope::new(bloch_dim(d), constraints)
}

/// Exhaustive active-set vertex enumeration.
///
/// Every set of `dim` linearly independent constraints is factored once and
/// solved for all `2^dim` choices of active bound; feasible solutions are
/// collected, merged within `tol.dedup` and returned in lexicographic order.
pub fn enumerate_vertices(h: &HRepPolytope, tol: Tolerance) -> Result<VRepPolytope> {
    h.validate()?;
    let k = h.dim;
    let ambient = h.ambient_dim();
    if k == 0 {
        return Ok(VRepPolytope {
            dim: ambient,
            vertices: vec![h.to_ambient(Vec::new())],
        });
    }
    let normals: Vec<Vec<f64>> = h.constraints.iter().map(|c| c.normal.clone()).collect();
    let rank = linalg::rank(&normals, tol.eps);
    if rank < k {
        return Err(Error::Unbounded { rank, dim: k });
    }

    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut seen: BTreeMap<Vec<i64>, ()> = BTreeMap::new();
    let grid = tol.dedup;
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut emit = |y: Vec<f64>| {
        let key: Vec<i64> = y.iter().map(|c| (c / grid).round() as i64).collect();
        if seen.insert(key, ()).is_none() {
            found.push(y);
        }
    };
    active_sets(h, tol, 0, &mut chosen, &mut ortho, &mut |subset| {
        let flat: Vec<f64> = subset
            .iter()
            .flat_map(|&i| h.constraints[i].normal.iter().copied())
            .collect();
        let Some(lu) = Lu::new(k, flat, 1e-12) else {
            return;
        };
        let mut rhs = vec![0.0; k];
        for mask in 0u64..(1u64 << k) {
            for (bit, &i) in subset.iter().enumerate() {
                let c = &h.constraints[i];
                rhs[bit] = if mask >> bit & 1 == 1 { c.upper } else { c.lower };
            }
            let y = lu.solve(&rhs);
            if h.constraints.iter().all(|c| c.satisfied(&y, tol.eps)) {
                emit(y);
            }
        }
    });

    let mut vertices: Vec<Vec<f64>> = merge_close(found, tol.dedup)
        .into_iter()
        .map(|y| clean(h.to_ambient(y)))
        .collect();
    vertices.sort_by(|a, b| lex_cmp(a, b));
    Ok(VRepPolytope {
        dim: ambient,
        vertices,
    })
}

/// Depth-first walk over index subsets of size `h.dim` whose normals are
/// linearly independent, pruning as soon as a prefix becomes dependent.
fn active_sets(
    h: &HRepPolytope,
    tol: Tolerance,
    start: usize,
    chosen: &mut Vec<usize>,
    ortho: &mut Vec<Vec<f64>>,
    leaf: &mut dyn FnMut(&[usize]),
) {
    let k = h.dim;
    if chosen.len() == k {
        leaf(chosen);
        return;
    }
    let remaining = k - chosen.len();
    let m = h.constraints.len();
    for i in start..m {
        if m - i < remaining {
            break;
        }
        let v = &h.constraints[i].normal;
        let mut r = v.clone();
        for _ in 0..2 {
            for q in ortho.iter() {
                let c = dot(&r, q);
                linalg::axpy(&mut r, -c, q);
            }
        }
        let rn = norm(&r);
        if rn <= tol.eps * norm(v) {
            continue;
        }
        ortho.push(linalg::scaled(&r, 1.0 / rn));
        chosen.push(i);
        active_sets(h, tol, i + 1, chosen, ortho, leaf);
        chosen.pop();
        ortho.pop();
    }
}

fn merge_close(mut pts: Vec<Vec<f64>>, radius: f64) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    let mut start = 0;
    for p in pts {
        while start < out.len() && out[start][0] < p[0] - radius {
            start += 1;
        }
        if !out[start..].iter().any(|q| linalg::distance(q, &p) <= radius) {
            out.push(p);
        }
    }
    out
}

fn clean(mut v: Vec<f64>) -> Vec<f64> {
    for c in v.iter_mut() {
        if c.abs() < 1e-14 {
            *c = 0.0;
        }
    }
    v
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Number of facets of the convex hull of `points`.
///
/// Every `dim`-subset spanning a hyperplane is tested as a supporting
/// hyperplane; distinct supporting hyperplanes are counted. Points must be
/// full-dimensional.
pub fn count_facets(points: &[Vec<f64>], tol: Tolerance) -> Result<usize> {
    let dim = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Degenerate("no points".into()))?;
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::input("points of differing dimension"));
    }
    let diffs: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect())
        .collect();
    if linalg::rank(&diffs, tol.eps) < dim {
        return Err(Error::Degenerate(format!(
            "points do not span {dim} dimensions; reduce to their affine span first"
        )));
    }

    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut subset = Vec::with_capacity(dim);
    for_each_combination(points.len(), dim, &mut subset, 0, &mut |idx| {
        let Some(normal) = hyperplane_normal(points, idx, tol) else {
            return;
        };
        let offset = dot(&normal, &points[idx[0]]);
        let (mut above, mut below) = (false, false);
        for p in points {
            let s = dot(&normal, p) - offset;
            above |= s > tol.eps;
            below |= s < -tol.eps;
            if above && below {
                return;
            }
        }
        let (normal, offset) = if above {
            (normal.iter().map(|c| -c).collect(), -offset)
        } else {
            (normal, offset)
        };
        let dup = planes.iter().any(|(n, o)| {
            linalg::distance(n, &normal) <= tol.dedup && (o - offset).abs() <= tol.dedup
        });
        if !dup {
            planes.push((normal, offset));
        }
    });
    Ok(planes.len())
}

fn hyperplane_normal(points: &[Vec<f64>], idx: &[usize], tol: Tolerance) -> Option<Vec<f64>> {
    let dim = points[0].len();
    let base = &points[idx[0]];
    let diffs: Vec<Vec<f64>> = idx[1..]
        .iter()
        .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let span = linalg::orthonormal_basis(&diffs, tol.eps);
    if span.len() != dim - 1 {
        return None;
    }
    // complement: first coordinate axis with a nonzero residual
    (0..dim).find_map(|axis| {
        let mut e = vec![0.0; dim];
        e[axis] = 1.0;
        for q in &span {
            let c = dot(&e, q);
            linalg::axpy(&mut e, -c, q);
        }
        let n = norm(&e);
        (n > 1e-6).then(|| linalg::scaled(&e, 1.0 / n))
    })
}

pub(crate) fn for_each_combination(
    n: usize,
    k: usize,
    current: &mut Vec<usize>,
    start: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    if current.len() == k {
        f(current);
        return;
    }
    for i in start..n {
        if n - i < k - current.len() {
            break;
        }
        current.push(i);
        for_each_combination(n, k, current, i + 1, f);
        current.pop();
    }
}

/// Range `(N + 2, 4(N - 1))` of facet counts of a 3-polytope with `2N`
/// centrally symmetric vertices.
pub fn facet_bound(n: usize) -> Result<(usize, usize)> {
    if n < 3 {
        return Err(Error::input(format!("facet bound needs N >= 3, got {n}")));
    }
    Ok((n + 2, 4 * (n - 1)))
}

fn binomial(n: i64, k: i64) -> u128 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Upper-bound-theorem limit on the vertex count of a `D`-polytope cut out by
/// `q` inequalities: `C(q - floor((D+1)/2), q - D) + C(q - floor((D+2)/2), q - D)`,
/// with `q = 2dN`, or `q = 2N` for the reduced qubit polytope.
pub fn mcmullen_vertex_bound(d: usize, n: usize, qubit_reduced: bool) -> u128 {
    let q = if qubit_reduced && d == 2 { 2 * n } else { 2 * d * n };
    upper_bound_vertices(d * d - 1, q)
}

/// Maximum vertex count of a `dim`-polytope cut out by `q` halfspaces.
pub fn upper_bound_vertices(dim: usize, q: usize) -> u128 {
    let (big_d, q) = (dim as i64, q as i64);
    if big_d == 1 {
        return 2;
    }
    let delta = (big_d + 1) / 2;
    let delta_p = (big_d + 2) / 2;
    binomial(q - delta, q - big_d).saturating_add(binomial(q - delta_p, q - big_d))
}

/// All constraints hold within `tol.eps`. `y` may be given in the polytope's
/// own coordinates or, for span-reduced polytopes, in ambient coordinates.
pub fn contains_point(h: &HRepPolytope, y: &[f64], tol: Tolerance) -> Result<bool> {
    let local: Vec<f64> = if y.len() == h.dim {
        y.to_vec()
    } else if h.basis.is_some() && y.len() == h.ambient_dim() {
        linalg::project(h.basis.as_ref().unwrap(), y)
    } else {
        return Err(Error::input(format!(
            "point has {} components, polytope dimension is {}",
            y.len(),
            h.dim
        )));
    };
    Ok(h.constraints.iter().all(|c| c.satisfied(&local, tol.eps)))
}

/// Convex coefficients `alpha >= 0, sum alpha = 1, sum alpha_l g_l = point`,
/// or `None` when the point is outside the hull.
pub fn convex_membership(
    point: &[f64],
    generators: &[Vec<f64>],
    tol: Tolerance,
) -> Result<Option<Vec<f64>>> {
    if let Some(g) = generators.iter().find(|g| g.len() != point.len()) {
        return Err(Error::input(format!(
            "generator has {} components, point has {}",
            g.len(),
            point.len()
        )));
    }
    let columns: Vec<Vec<f64>> = generators
        .iter()
        .map(|g| {
            let mut c = g.clone();
            c.push(1.0);
            c
        })
        .collect();
    let mut b = point.to_vec();
    b.push(1.0);
    Ok(lp::find_nonnegative_solution(&columns, &b, tol.eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn cube_hrep() -> HRepPolytope {
        let cs = (0..3)
            .map(|i| {
                let mut n = vec![0.0; 3];
                n[i] = 1.0;
                Constraint {
                    normal: n,
                    lower: -1.0,
                    upper: 1.0,
                }
            })
            .collect();
        HRepPolytope::new(3, cs).unwrap()
    }

    #[test]
    fn octahedron_dual_is_cube() {
        let h = build_hrep(&presets::octahedron(), tol()).unwrap();
        assert_eq!(h.constraints.len(), 3);
        assert!(h.basis.is_none());
        for c in &h.constraints {
            assert_eq!((c.lower, c.upper), (-1.0, 1.0));
            assert_eq!(c.normal.iter().filter(|x| **x == 1.0).count(), 1);
        }
        let v = enumerate_vertices(&h, tol()).unwrap();
        assert_eq!(v.vertices.len(), 8);
        for y in &v.vertices {
            assert!(y.iter().all(|c| c.abs() == 1.0));
        }
    }

    #[test]
    fn cube_directions_dual_is_octahedron() {
        let h = build_hrep(&presets::cube(), tol()).unwrap();
        let v = enumerate_vertices(&h, tol()).unwrap();
        assert_eq!(v.vertices.len(), 6);
        let s3 = 3f64.sqrt();
        for y in &v.vertices {
            let nz: Vec<f64> = y.iter().copied().filter(|c| c.abs() > 1e-12).collect();
            assert_eq!(nz.len(), 1);
            assert_relative_eq!(nz[0].abs(), s3, epsilon = 1e-12);
        }
    }

    #[test]
    fn icosahedron_dual_is_dodecahedron() {
        let v = enumerate_vertices(&build_hrep(&presets::icosahedron(), tol()).unwrap(), tol())
            .unwrap();
        assert_eq!(v.vertices.len(), 20);
        let n0 = norm(&v.vertices[0]);
        assert!(v.vertices.iter().all(|y| (norm(y) - n0).abs() < 1e-10));
    }

    #[test]
    fn qutrit_bounds() {
        let h = build_hrep(&presets::qutrit_computational(), tol()).unwrap();
        assert_eq!(h.constraints.len(), 3);
        for c in &h.constraints {
            // the normal may have been flipped to its canonical sign
            let (lo, hi) = if c.upper > 0.75 { (c.lower, c.upper) } else { (-c.upper, -c.lower) };
            assert_relative_eq!(lo, -0.5, epsilon = 1e-12);
            assert_relative_eq!(hi, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn coplanar_directions_reduce_to_plane() {
        let meas = MeasurementSet::qubit_directions(
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            tol(),
        )
        .unwrap();
        let h = build_hrep(&meas, tol()).unwrap();
        assert_eq!(h.dim, 2);
        assert_eq!(h.constraints.len(), 2);
        assert_eq!(h.ambient_dim(), 3);
        let v = enumerate_vertices(&h, tol()).unwrap();
        assert_eq!(v.dim, 3);
        assert_eq!(v.vertices.len(), 4);
        for y in &v.vertices {
            assert_eq!(y[2], 0.0);
            assert_relative_eq!(y[0].abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_set_rejected() {
        assert!(MeasurementSet::qubit_directions(&[], tol()).is_err());
    }

    #[test]
    fn unbounded_detected() {
        let h = HRepPolytope::new(
            2,
            vec![Constraint {
                normal: vec![1.0, 0.0],
                lower: -1.0,
                upper: 1.0,
            }],
        )
        .unwrap();
        assert_eq!(
            enumerate_vertices(&h, tol()),
            Err(Error::Unbounded { rank: 1, dim: 2 })
        );
    }

    #[test]
    fn trine_povm_constraints() {
        let povm = presets::trine_elements();
        let h = povm_hrep(&[povm], tol()).unwrap();
        assert_eq!(h.constraints.len(), 3);
        for c in &h.constraints {
            // E = (1/3)(I + m.sigma): a = 1/3, b = m/3
            assert_relative_eq!(c.lower, -1.0 / 3.0, epsilon = 1e-12);
            assert_relative_eq!(c.upper, 2.0 / 3.0, epsilon = 1e-12);
            assert_relative_eq!(norm(&c.normal), 1.0 / 3.0, epsilon = 1e-12);
            assert!(c.normal[1].abs() < 1e-12);
        }
        // free along sigma_y
        assert!(matches!(enumerate_vertices(&h, tol()), Err(Error::Unbounded { .. })));
        let reduced = h.reduce_to_span(tol());
        assert_eq!(reduced.dim, 2);
        // the upper bounds are implied by the lower ones (probabilities sum to
        // one), so the section is the triangle m_k.y >= -1
        let v = enumerate_vertices(&reduced, tol()).unwrap();
        assert_eq!(v.vertices.len(), 3);
        for y in &v.vertices {
            assert_relative_eq!(norm(y), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn identity_element_dropped() {
        let half = HermitianOperator::identity(2).scale(0.5);
        let h = povm_hrep(&[vec![half.clone(), half]], tol()).unwrap();
        assert!(h.constraints.is_empty());
    }

    #[test]
    fn non_positive_element_rejected() {
        let z = presets::ket_projector(&[1.0, 0.0]);
        let o = presets::ket_projector(&[0.0, 1.0]);
        // sums to the identity, but e2 has eigenvalue -1/2
        let e1 = z.scale(1.5);
        let e2 = z.scale(-0.5).add(&o);
        assert!(matches!(povm_hrep(&[vec![e1, e2]], tol()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn projective_povm_matches_build_hrep() {
        let kets = [[1.0, 0.0], [0.0, 1.0]];
        let elems: Vec<HermitianOperator> = kets.iter().map(|k| presets::ket_projector(k)).collect();
        let h = povm_hrep(&[elems], tol()).unwrap();
        // Tr(y |0><0|) = (1 + z)/2: normal (0,0,1/2), band [-1/2, 1/2]
        let c = &h.constraints[0];
        assert_relative_eq!(c.normal[2], 0.5, epsilon = 1e-15);
        let merged = merge_constraints(h.constraints.clone(), tol());
        assert_eq!(merged.len(), 1);
        assert_relative_eq!(merged[0].lower, -1.0, epsilon = 1e-12);
        assert_relative_eq!(merged[0].upper, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn facet_counts() {
        let oct: Vec<Vec<f64>> = presets::octahedron()
            .frames()
            .iter()
            .flat_map(|f| f.iter().map(|m| m.coords().to_vec()))
            .collect();
        assert_eq!(count_facets(&oct, tol()).unwrap(), 8);
        let (lo, hi) = facet_bound(3).unwrap();
        assert!((lo..=hi).contains(&8));
        let cube: Vec<Vec<f64>> = presets::cube()
            .frames()
            .iter()
            .flat_map(|f| f.iter().map(|m| m.coords().to_vec()))
            .collect();
        assert_eq!(count_facets(&cube, tol()).unwrap(), 6);
        let tet = vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, -1.0],
            vec![-1.0, 1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
        ];
        assert_eq!(count_facets(&tet, tol()).unwrap(), 4);
        let flat = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0]];
        assert!(matches!(count_facets(&flat, tol()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn facet_bound_values() {
        assert_eq!(facet_bound(3).unwrap(), (5, 8));
        assert_eq!(facet_bound(4).unwrap(), (6, 12));
        assert_eq!(facet_bound(10).unwrap(), (12, 36));
        assert!(facet_bound(2).is_err());
    }

    #[test]
    fn mcmullen_values() {
        assert_eq!(mcmullen_vertex_bound(2, 4, true), 12);
        assert_eq!(mcmullen_vertex_bound(2, 3, true), 8);
        assert_eq!(mcmullen_vertex_bound(3, 2, false), 105);
        // polygons: q edges, q vertices
        assert_eq!(upper_bound_vertices(2, 6), 6);
        assert_eq!(upper_bound_vertices(1, 2), 2);
        // cross-check against enumeration: octahedron dual 8 <= 8, cube dual 6 <= 12
        let n8 = enumerate_vertices(&build_hrep(&presets::octahedron(), tol()).unwrap(), tol())
            .unwrap()
            .vertices
            .len() as u128;
        assert!(n8 <= mcmullen_vertex_bound(2, 3, true));
    }

    #[test]
    fn contains_examples() {
        let h = cube_hrep();
        assert!(contains_point(&h, &[0.0, 0.0, 0.0], tol()).unwrap());
        assert!(contains_point(&h, &[1.0, 1.0, 1.0], tol()).unwrap());
        assert!(!contains_point(&h, &[1.1, 0.0, 0.0], tol()).unwrap());
        assert!(contains_point(&h, &[1.0], tol()).is_err());
    }

    #[test]
    fn membership_examples() {
        let gens = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let a = convex_membership(&[1.0, 0.0], &gens, tol()).unwrap().unwrap();
        assert_relative_eq!(a[0], 1.0, epsilon = 1e-12);
        let a = convex_membership(&[0.0, 0.0], &gens, tol()).unwrap().unwrap();
        assert_relative_eq!(a.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(convex_membership(&[2.0, 0.0], &gens, tol()).unwrap().is_none());

        let cube = enumerate_vertices(&cube_hrep(), tol()).unwrap();
        let x = [0.3, 0.5, 0.66f64.sqrt()];
        let a = convex_membership(&x, &cube.vertices, tol()).unwrap().unwrap();
        let mut rec = vec![0.0; 3];
        for (w, v) in a.iter().zip(&cube.vertices) {
            assert!(*w >= 0.0);
            linalg::axpy(&mut rec, *w, v);
        }
        assert!(linalg::max_abs_diff(&rec, &x) < 1e-9);
    }
}
