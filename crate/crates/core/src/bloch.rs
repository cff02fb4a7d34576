//! Generalized Bloch representation of `d`-level systems.
//!
//! Coordinates are taken against a Gell-Mann basis normalized so that
//! `Tr(l_i l_j) = d/(d-1) delta_ij`. With that choice a density operator reads
//! `rho = (1/d)[I + (d-1) sum_i x_i l_i]` with `x_i = Tr(rho l_i)`, and pure
//! states have unit-norm Bloch vectors.
//!
//! Basis ordering, used everywhere in the crate: for each index pair `j < k`
//! in lexicographic order the symmetric then the antisymmetric generator,
//! followed by the `d - 1` diagonal generators. For `d = 2` this is exactly
//! `(sigma_x, sigma_y, sigma_z)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent on newer toolchains
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{dot, norm};
use crate::{Error, Result, Tolerance};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `D = d^2 - 1`.
pub fn bloch_dim(d: usize) -> usize {
    d * d - 1
}

/// Real coordinate vector of a unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    d: usize,
    coords: Vec<f64>,
}

impl BlochVector {
    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if coords.len() != bloch_dim(d) {
            return Err(Error::input(format!(
                "Bloch vector for d={d} needs {} coordinates, got {}",
                bloch_dim(d),
                coords.len()
            )));
        }
        Ok(Self { d, coords })
    }

    pub fn zero(d: usize) -> Result<Self> {
        Self::new(d, vec![0.0; bloch_dim(d.max(2))])
    }

    pub fn qubit(x: f64, y: f64, z: f64) -> Self {
        Self {
            d: 2,
            coords: vec![x, y, z],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        dot(&self.coords, &other.coords)
    }

    pub fn neg(&self) -> Self {
        Self {
            d: self.d,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

/// Dense `d x d` complex Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    d: usize,
    data: Vec<Complex64>,
}

impl HermitianOperator {
    /// Checks Hermiticity within `tol` and symmetrizes away the residual.
    pub fn new(d: usize, data: Vec<Complex64>, tol: f64) -> Result<Self> {
        if d < 1 || data.len() != d * d {
            return Err(Error::input(format!(
                "operator of dimension {d} needs {} entries, got {}",
                d * d,
                data.len()
            )));
        }
        for i in 0..d {
            for j in 0..d {
                if (data[i * d + j] - data[j * d + i].conj()).norm() > tol {
                    return Err(Error::input(format!(
                        "matrix is not Hermitian at ({i},{j})"
                    )));
                }
            }
        }
        let mut op = Self { d, data };
        op.symmetrize();
        Ok(op)
    }

    fn symmetrize(&mut self) {
        let d = self.d;
        for i in 0..d {
            for j in i..d {
                let avg = (self.data[i * d + j] + self.data[j * d + i].conj()) * 0.5;
                self.data[i * d + j] = avg;
                self.data[j * d + i] = avg.conj();
            }
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            data[i * d + i] = ONE;
        }
        Self { d, data }
    }

    /// `|psi><psi|` for a normalized ket.
    pub fn from_ket(psi: &[Complex64]) -> Self {
        let d = psi.len();
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] = psi[i] * psi[j].conj();
            }
        }
        Self { d, data }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.d + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self.data[i * self.d + i].re).sum()
    }

    /// `Tr(self * other)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        let d = self.d;
        let mut s = ZERO;
        for i in 0..d {
            for k in 0..d {
                s += self.data[i * d + k] * other.data[k * d + i];
            }
        }
        s.re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            d: self.d,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> Self {
        Self {
            d: self.d,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `<psi| self |psi>`.
    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let d = self.d;
        let mut s = ZERO;
        for i in 0..d {
            for j in 0..d {
                s += psi[i].conj() * self.data[i * d + j] * psi[j];
            }
        }
        s.re
    }

    /// Cholesky of `self + tol * I`; succeeds iff the smallest eigenvalue is
    /// above `-tol` (up to rounding).
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let d = self.d;
        let mut l = vec![ZERO; d * d];
        for j in 0..d {
            let mut diag = self.data[j * d + j].re + tol;
            for k in 0..j {
                diag -= l[j * d + k].norm_sqr();
            }
            if diag <= 0.0 {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * d + j] = Complex64::new(ljj, 0.0);
            for i in j + 1..d {
                let mut s = self.data[i * d + j];
                for k in 0..j {
                    s -= l[i * d + k] * l[j * d + k].conj();
                }
                l[i * d + j] = s / ljj;
            }
        }
        true
    }
}

/// The `d^2 - 1` generalized Gell-Mann operators, traceless and normalized to
/// `Tr(l_i l_j) = d/(d-1) delta_ij`.
pub fn gell_mann_basis(d: usize) -> Result<Vec<HermitianOperator>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    // standard family has Tr(l_i l_j) = 2 delta_ij
    let scale = (d as f64 / (2.0 * (d as f64 - 1.0))).sqrt();
    let mut basis = Vec::with_capacity(bloch_dim(d));
    let unit = |i: usize, j: usize, z: Complex64, data: &mut Vec<Complex64>| data[i * d + j] = z;
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = vec![ZERO; d * d];
            unit(j, k, Complex64::new(scale, 0.0), &mut sym);
            unit(k, j, Complex64::new(scale, 0.0), &mut sym);
            basis.push(HermitianOperator { d, data: sym });

            let mut anti = vec![ZERO; d * d];
            unit(j, k, Complex64::new(0.0, -scale), &mut anti);
            unit(k, j, Complex64::new(0.0, scale), &mut anti);
            basis.push(HermitianOperator { d, data: anti });
        }
    }
    for l in 1..d {
        let c = scale * (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
        let mut diag = vec![ZERO; d * d];
        for j in 0..l {
            diag[j * d + j] = Complex64::new(c, 0.0);
        }
        diag[l * d + l] = Complex64::new(-(l as f64) * c, 0.0);
        basis.push(HermitianOperator { d, data: diag });
    }
    Ok(basis)
}

/// `x_i = Tr(rho l_i)`. `rho` must have unit trace.
pub fn state_to_bloch(rho: &HermitianOperator, tol: Tolerance) -> Result<BlochVector> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > tol.eps {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let basis = gell_mann_basis(rho.d())?;
    let coords = basis.iter().map(|l| rho.trace_product(l)).collect();
    BlochVector::new(rho.d(), coords)
}

/// `(1/d)[I + (d-1) sum_i x_i l_i]`. Unit trace, but positive only when `x`
/// is the Bloch vector of an actual quantum state.
pub fn bloch_to_state(x: &BlochVector) -> Result<HermitianOperator> {
    let d = x.d();
    let basis = gell_mann_basis(d)?;
    let df = d as f64;
    let mut rho = HermitianOperator::identity(d).scale(1.0 / df);
    for (l, &c) in basis.iter().zip(x.coords()) {
        if c != 0.0 {
            rho = rho.add(&l.scale((df - 1.0) / df * c));
        }
    }
    Ok(rho)
}

fn born_raw(d: usize, m: &[f64], x: &[f64]) -> f64 {
    let df = d as f64;
    (1.0 + (df - 1.0) * dot(m, x)) / df
}

/// Probability `(1/d)[1 + (d-1) m.x]` of the rank-1 outcome with Bloch vector
/// `m` on the state with Bloch vector `x`.
pub fn born_probability(m: &BlochVector, x: &BlochVector) -> Result<f64> {
    if m.d() != x.d() {
        return Err(Error::input(format!(
            "dimension mismatch: outcome d={}, state d={}",
            m.d(),
            x.d()
        )));
    }
    Ok(born_raw(m.d(), m.coords(), x.coords()))
}

/// Haar-random pure state: normalized vector of complex Gaussians.
pub fn random_pure_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    let mut psi: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut psi {
        *z /= n;
    }
    psi
}

/// Bloch vector of a Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> BlochVector {
    let rho = HermitianOperator::from_ket(&random_pure_ket(d, rng));
    state_to_bloch(&rho, Tolerance::default()).expect("pure state has unit trace")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementKind {
    Projective,
    Povm,
}

/// `N` measurements on a `d`-level system. Each frame lists one Bloch vector
/// per outcome.
///
/// For POVMs every outcome also carries a weight `w = Tr(E)/d`, and `m` is the
/// Bloch vector of `E / Tr(E)`, so that `E = w [I + (d-1) m.l]` and the outcome
/// probability on `x` is `w [1 + (d-1) m.x]`. Projective outcomes have
/// `w = 1/d` implicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    d: usize,
    frames: Vec<Vec<BlochVector>>,
    kind: MeasurementKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<Vec<f64>>>,
}

impl MeasurementSet {
    /// Projective measurements given by rank-1 outcome Bloch vectors. Each
    /// frame must have `d` unit vectors summing to zero.
    pub fn projective(d: usize, frames: Vec<Vec<Vec<f64>>>, tol: Tolerance) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if frames.is_empty() {
            return Err(Error::input("measurement set is empty"));
        }
        let mut out = Vec::with_capacity(frames.len());
        for (n, frame) in frames.into_iter().enumerate() {
            if frame.len() != d {
                return Err(Error::InvalidMeasurement(format!(
                    "frame {n} has {} outcomes, expected {d}",
                    frame.len()
                )));
            }
            let mut sum = vec![0.0; bloch_dim(d)];
            let mut vs = Vec::with_capacity(d);
            for (r, coords) in frame.into_iter().enumerate() {
                let v = BlochVector::new(d, coords)?;
                if (v.norm() - 1.0).abs() > tol.eps.max(1e-12) * 10.0 {
                    return Err(Error::InvalidMeasurement(format!(
                        "outcome {r} of frame {n} has norm {}, expected 1",
                        v.norm()
                    )));
                }
                for (s, c) in sum.iter_mut().zip(v.coords()) {
                    *s += c;
                }
                vs.push(v);
            }
            if norm(&sum) > tol.eps * 10.0 * d as f64 {
                return Err(Error::InvalidMeasurement(format!(
                    "outcome vectors of frame {n} do not sum to zero"
                )));
            }
            out.push(vs);
        }
        Ok(Self {
            d,
            frames: out,
            kind: MeasurementKind::Projective,
            weights: None,
        })
    }

    /// Qubit measurements along the given directions; each direction `m`
    /// becomes the frame `(m, -m)`. Directions are normalized.
    pub fn qubit_directions(directions: &[Vec<f64>], tol: Tolerance) -> Result<Self> {
        let mut frames = Vec::with_capacity(directions.len());
        for (n, m) in directions.iter().enumerate() {
            if m.len() != 3 {
                return Err(Error::input(format!("direction {n} must have 3 components")));
            }
            let len = norm(m);
            if len <= tol.eps {
                return Err(Error::input(format!("direction {n} is zero")));
            }
            let u: Vec<f64> = m.iter().map(|c| c / len).collect();
            let v: Vec<f64> = u.iter().map(|c| -c).collect();
            frames.push(vec![u, v]);
        }
        Self::projective(2, frames, tol)
    }

    /// Projective measurements in the bases given by kets: one frame per
    /// basis, one outcome per ket.
    pub fn from_kets(frames: &[Vec<Vec<Complex64>>], tol: Tolerance) -> Result<Self> {
        let d = frames
            .first()
            .and_then(|f| f.first())
            .map(|k| k.len())
            .ok_or_else(|| Error::input("measurement set is empty"))?;
        let mut out = Vec::with_capacity(frames.len());
        for frame in frames {
            let mut vs = Vec::with_capacity(frame.len());
            for ket in frame {
                if ket.len() != d {
                    return Err(Error::input("kets of differing dimension"));
                }
                let n = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let ket: Vec<Complex64> = ket.iter().map(|z| z / n).collect();
                let rho = HermitianOperator::from_ket(&ket);
                vs.push(state_to_bloch(&rho, tol)?.coords);
            }
            out.push(vs);
        }
        Self::projective(d, out, tol)
    }

    /// General POVMs, given as groups of positive operators summing to the
    /// identity.
    pub fn from_povms(povms: &[Vec<HermitianOperator>], tol: Tolerance) -> Result<Self> {
        let d = povms
            .first()
            .and_then(|p| p.first())
            .map(|e| e.d())
            .ok_or_else(|| Error::input("measurement set is empty"))?;
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let id = HermitianOperator::identity(d);
        let mut frames = Vec::with_capacity(povms.len());
        let mut weights = Vec::with_capacity(povms.len());
        for (n, povm) in povms.iter().enumerate() {
            let mut sum = HermitianOperator::identity(d).scale(0.0);
            let mut vs = Vec::with_capacity(povm.len());
            let mut ws = Vec::with_capacity(povm.len());
            for (r, e) in povm.iter().enumerate() {
                if e.d() != d {
                    return Err(Error::input("POVM elements of differing dimension"));
                }
                if !e.is_positive_semidefinite(tol.eps) {
                    return Err(Error::input(format!(
                        "element {r} of POVM {n} is not positive semidefinite"
                    )));
                }
                let tr = e.trace();
                if tr <= tol.eps {
                    return Err(Error::input(format!("element {r} of POVM {n} is zero")));
                }
                let m = state_to_bloch(&e.scale(1.0 / tr), tol)?;
                vs.push(m);
                ws.push(tr / d as f64);
                sum = sum.add(e);
            }
            if sum.max_abs_diff(&id) > tol.eps * 10.0 {
                return Err(Error::InvalidMeasurement(format!(
                    "elements of POVM {n} do not sum to the identity"
                )));
            }
            frames.push(vs);
            weights.push(ws);
        }
        Ok(Self {
            d,
            frames,
            kind: MeasurementKind::Povm,
            weights: Some(weights),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of measurements `N`.
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn frames(&self) -> &[Vec<BlochVector>] {
        &self.frames
    }

    /// Outcome counts per measurement.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.frames.iter().map(Vec::len).collect()
    }

    /// Total number of outcomes (`dN` for projective sets).
    pub fn total_outcomes(&self) -> usize {
        self.frames.iter().map(Vec::len).sum()
    }

    /// `w = Tr(E)/d` of outcome `r` of measurement `n`.
    pub fn weight(&self, n: usize, r: usize) -> f64 {
        match &self.weights {
            Some(w) => w[n][r],
            None => 1.0 / self.d as f64,
        }
    }

    /// Probability of outcome `r` of measurement `n` for Bloch coordinates
    /// `y`; lies in `[0,1]` exactly when `y` is inside the constraint polytope.
    pub fn outcome_probability(&self, n: usize, r: usize, y: &[f64]) -> f64 {
        let m = self.frames[n][r].coords();
        self.weight(n, r) * (1.0 + (self.d as f64 - 1.0) * dot(m, y))
    }

    /// Reverse the outcome order of the listed measurements. For a qubit this
    /// replaces the representative `m` by `-m`.
    pub fn with_reversed_outcomes(&self, indices: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        for &n in indices {
            let frame = out
                .frames
                .get_mut(n)
                .ok_or_else(|| Error::input(format!("measurement index {n} out of range")))?;
            frame.reverse();
            if let Some(w) = out.weights.as_mut() {
                w[n].reverse();
            }
        }
        Ok(out)
    }

    /// Every outcome probability, stacked frame by frame.
    pub fn probabilities(&self, y: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_outcomes());
        for (n, frame) in self.frames.iter().enumerate() {
            for r in 0..frame.len() {
                out.push(self.outcome_probability(n, r, y));
            }
        }
        out
    }
}

/// Stacked outcome probabilities of one state over a measurement set.
///
/// Blocks have `d` entries for projective measurements; POVM blocks may be
/// longer, so the block sizes are carried explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparationVector {
    pub d: usize,
    pub n: usize,
    /// All outcome probabilities, block after block.
    pub probs: Vec<f64>,
    pub sizes: Vec<usize>,
    /// Qubit compressed form: probability of the first outcome per block.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<Vec<f64>>,
}

/// Every block of `probs` (split by `sizes`) lies in `[0,1]` and sums to one.
pub(crate) fn check_blocks(probs: &[f64], sizes: &[usize], tol: Tolerance) -> Result<()> {
    if sizes.iter().sum::<usize>() != probs.len() || sizes.contains(&0) {
        return Err(Error::input(format!(
            "block sizes {sizes:?} do not partition {} probabilities",
            probs.len()
        )));
    }
    let mut at = 0;
    for (b, &len) in sizes.iter().enumerate() {
        let block = &probs[at..at + len];
        at += len;
        if block.iter().any(|&p| !(-tol.eps..=1.0 + tol.eps).contains(&p)) {
            return Err(Error::input(format!("block {b} has an entry outside [0,1]")));
        }
        let s: f64 = block.iter().sum();
        if (s - 1.0).abs() > tol.eps * len as f64 {
            return Err(Error::input(format!("block {b} sums to {s}")));
        }
    }
    Ok(())
}

fn reduced_form(probs: &[f64], sizes: &[usize]) -> Option<Vec<f64>> {
    sizes
        .iter()
        .all(|&s| s == 2)
        .then(|| probs.iter().step_by(2).copied().collect())
}

impl PreparationVector {
    /// Blocks of `d` entries each.
    pub fn new(d: usize, probs: Vec<f64>, tol: Tolerance) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if probs.is_empty() || !probs.len().is_multiple_of(d) {
            return Err(Error::input(format!(
                "preparation vector length {} is not a positive multiple of d={d}",
                probs.len()
            )));
        }
        let sizes = vec![d; probs.len() / d];
        Self::with_sizes(d, probs, sizes, tol)
    }

    pub fn with_sizes(d: usize, probs: Vec<f64>, sizes: Vec<usize>, tol: Tolerance) -> Result<Self> {
        check_blocks(&probs, &sizes, tol)?;
        let reduced = if d == 2 { reduced_form(&probs, &sizes) } else { None };
        Ok(Self {
            d,
            n: sizes.len(),
            probs,
            sizes,
            reduced,
        })
    }

    /// Expand the qubit compressed form `(p_1..p_N)` to `(p_1, 1-p_1, ...)`.
    pub fn from_reduced(reduced: &[f64], tol: Tolerance) -> Result<Self> {
        let probs = reduced.iter().flat_map(|&p| [p, 1.0 - p]).collect();
        let mut pv = Self::new(2, probs, tol)?;
        pv.reduced = Some(reduced.to_vec());
        Ok(pv)
    }

    pub fn block(&self, n: usize) -> &[f64] {
        let start: usize = self.sizes[..n].iter().sum();
        &self.probs[start..start + self.sizes[n]]
    }
}

/// Born probabilities of `x` for every outcome of `meas`.
pub fn preparation_vector(meas: &MeasurementSet, x: &BlochVector) -> Result<PreparationVector> {
    if meas.d() != x.d() {
        return Err(Error::input(format!(
            "dimension mismatch: measurements d={}, state d={}",
            meas.d(),
            x.d()
        )));
    }
    let d = meas.d();
    let probs = meas.probabilities(x.coords());
    let sizes = meas.block_sizes();
    let reduced = if d == 2 { reduced_form(&probs, &sizes) } else { None };
    Ok(PreparationVector {
        d,
        n: meas.len(),
        probs,
        sizes,
        reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn pauli() -> [HermitianOperator; 3] {
        let c = Complex64::new;
        [
            HermitianOperator::new(2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)], 0.0)
                .unwrap(),
            HermitianOperator::new(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)], 0.0)
                .unwrap(),
            HermitianOperator::new(2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)], 0.0)
                .unwrap(),
        ]
    }

    #[test]
    fn qubit_basis_is_pauli() {
        let b = gell_mann_basis(2).unwrap();
        assert_eq!(b.len(), 3);
        for (l, s) in b.iter().zip(pauli()) {
            assert!(l.max_abs_diff(&s) < 1e-15);
        }
    }

    #[test]
    fn qutrit_normalization() {
        let b = gell_mann_basis(3).unwrap();
        assert_eq!(b.len(), 8);
        for i in 0..8 {
            for j in 0..8 {
                let t = b[i].trace_product(&b[j]);
                let want = if i == j { 1.5 } else { 0.0 };
                assert_relative_eq!(t, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ququart_traceless() {
        let b = gell_mann_basis(4).unwrap();
        assert_eq!(b.len(), 15);
        for l in &b {
            assert!(l.trace().abs() < 1e-12);
            let im: f64 = (0..4).map(|i| l.get(i, i).im.abs()).sum();
            assert!(im < 1e-12);
        }
    }

    #[test]
    fn gram_matrix_all_dims() {
        for d in 2..=5 {
            let b = gell_mann_basis(d).unwrap();
            let want = d as f64 / (d as f64 - 1.0);
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let t = b[i].trace_product(&b[j]);
                    let w = if i == j { want } else { 0.0 };
                    assert!((t - w).abs() < 1e-10, "d={d} ({i},{j}) {t}");
                }
            }
        }
    }

    #[test]
    fn dimension_one_rejected() {
        assert_eq!(gell_mann_basis(1), Err(Error::InvalidDimension(1)));
    }

    #[test]
    fn maximally_mixed_is_origin() {
        for d in 2..=4 {
            let rho = HermitianOperator::identity(d).scale(1.0 / d as f64);
            let x = state_to_bloch(&rho, tol()).unwrap();
            assert!(x.norm() < 1e-14);
            let back = bloch_to_state(&BlochVector::zero(d).unwrap()).unwrap();
            assert!(back.max_abs_diff(&rho) < 1e-15);
        }
    }

    #[test]
    fn ket_zero_is_plus_z() {
        let psi = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let x = state_to_bloch(&HermitianOperator::from_ket(&psi), tol()).unwrap();
        assert!(crate::linalg::max_abs_diff(x.coords(), &[0.0, 0.0, 1.0]) < 1e-15);
        let rho = bloch_to_state(&BlochVector::qubit(0.0, 0.0, 1.0)).unwrap();
        assert!(rho.max_abs_diff(&HermitianOperator::from_ket(&psi)) < 1e-15);
    }

    #[test]
    fn qutrit_basis_ket_has_unit_norm() {
        let z = Complex64::new(0.0, 0.0);
        let psi = [Complex64::new(1.0, 0.0), z, z];
        let x = state_to_bloch(&HermitianOperator::from_ket(&psi), tol()).unwrap();
        // direct evaluation against the diagonal generators: x = (0,...,0, sqrt(3)/2, 1/2)
        let mut want = vec![0.0; 8];
        want[6] = 3f64.sqrt() / 2.0;
        want[7] = 0.5;
        assert!(crate::linalg::max_abs_diff(x.coords(), &want) < 1e-12);
        assert_relative_eq!(x.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_unit_trace_rejected() {
        let rho = HermitianOperator::identity(2);
        assert!(matches!(state_to_bloch(&rho, tol()), Err(Error::InvalidState(_))));
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(matches!(BlochVector::new(3, vec![0.0; 3]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn antipode_of_qutrit_projector_is_unphysical() {
        let z = Complex64::new(0.0, 0.0);
        let psi = [Complex64::new(1.0, 0.0), z, z];
        let m = state_to_bloch(&HermitianOperator::from_ket(&psi), tol()).unwrap();
        let rho = bloch_to_state(&m.neg()).unwrap();
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        // (1/3)[1 + 2 * (-1)] = -1/3 on the projector's own ket
        assert_relative_eq!(rho.expectation(&psi), -1.0 / 3.0, epsilon = 1e-12);
        assert!(!rho.is_positive_semidefinite(1e-9));
        assert!(bloch_to_state(&m).unwrap().is_positive_semidefinite(1e-9));
    }

    #[test]
    fn born_examples() {
        let z = BlochVector::qubit(0.0, 0.0, 1.0);
        let x = BlochVector::qubit(1.0, 0.0, 0.0);
        assert_relative_eq!(born_probability(&z, &z).unwrap(), 1.0);
        assert_relative_eq!(born_probability(&x, &z).unwrap(), 0.5);
        for d in 2..=4 {
            let o = BlochVector::zero(d).unwrap();
            let mut m = vec![0.0; bloch_dim(d)];
            m[0] = 1.0;
            let m = BlochVector::new(d, m).unwrap();
            assert_relative_eq!(born_probability(&m, &o).unwrap(), 1.0 / d as f64);
        }
        assert!(born_probability(&z, &BlochVector::zero(3).unwrap()).is_err());
    }

    fn octahedron() -> MeasurementSet {
        MeasurementSet::qubit_directions(
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            tol(),
        )
        .unwrap()
    }

    #[test]
    fn octahedron_preparation_vectors() {
        let meas = octahedron();
        let p = preparation_vector(&meas, &BlochVector::qubit(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(p.reduced.as_deref(), Some(&[1.0, 0.5, 0.5][..]));
        let p = preparation_vector(&meas, &BlochVector::qubit(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(p.reduced.as_deref(), Some(&[0.5, 0.5, 0.0][..]));
        let p = preparation_vector(&meas, &BlochVector::zero(2).unwrap()).unwrap();
        assert!(p.probs.iter().all(|&q| q == 0.5));
    }

    #[test]
    fn frame_must_sum_to_zero() {
        let bad = MeasurementSet::projective(
            2,
            vec![vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]],
            tol(),
        );
        assert!(matches!(bad, Err(Error::InvalidMeasurement(_))));
    }

    #[test]
    fn round_trip_and_purity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=4 {
            for _ in 0..50 {
                let x = random_pure_state(d, &mut rng);
                assert!((x.norm() - 1.0).abs() < 1e-10);
                let back = state_to_bloch(&bloch_to_state(&x).unwrap(), tol()).unwrap();
                assert!(crate::linalg::max_abs_diff(back.coords(), x.coords()) < 1e-10);
            }
        }
    }

    #[test]
    fn frame_completeness_random_bases() {
        // computational basis rotated by a random unitary built from random kets
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=4 {
            let mut kets: Vec<Vec<Complex64>> = Vec::new();
            while kets.len() < d {
                let mut v = random_pure_ket(d, &mut rng);
                for q in &kets {
                    let c: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= c * qi;
                    }
                }
                let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                kets.push(v.into_iter().map(|z| z / n).collect());
            }
            let meas = MeasurementSet::from_kets(&[kets], tol()).unwrap();
            for _ in 0..20 {
                let x = random_pure_state(d, &mut rng);
                let p = preparation_vector(&meas, &x).unwrap();
                assert!((p.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn trine_povm_probabilities() {
        let c = |re: f64| Complex64::new(re, 0.0);
        let elems: Vec<HermitianOperator> = (0..3)
            .map(|k| {
                let t = 2.0 * core::f64::consts::PI * k as f64 / 3.0;
                let (s, co) = (t / 2.0).sin_cos();
                let psi = [c(co), c(s)];
                HermitianOperator::from_ket(&psi).scale(2.0 / 3.0)
            })
            .collect();
        let meas = MeasurementSet::from_povms(&[elems], tol()).unwrap();
        assert_eq!(meas.kind(), MeasurementKind::Povm);
        let p = preparation_vector(&meas, &BlochVector::qubit(0.0, 0.0, 1.0)).unwrap();
        assert_relative_eq!(p.probs[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(p.probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn povm_must_sum_to_identity() {
        let e = HermitianOperator::identity(2).scale(0.4);
        let r = MeasurementSet::from_povms(&[vec![e.clone(), e]], tol());
        assert!(matches!(r, Err(Error::InvalidMeasurement(_))));
    }
}
