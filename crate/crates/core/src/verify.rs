//! Exact and sampled checks that HV models reproduce quantum statistics,
//! Kochen-Specker searches on ray sets, and the large-`N` convergence study.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent on newer toolchains
use num_traits::Float;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bloch::{preparation_vector, BlochVector, MeasurementSet};
use crate::hv::{decompose_preparation, reconstruct, HVModel};
use crate::linalg::{dot, norm};
use crate::polytope;
use crate::{Error, Result, Tolerance};

/// Largest deviation between Born probabilities and the model's
/// reconstruction over all `states`.
pub fn verify_exact(model: &HVModel, states: &[BlochVector], tol: Tolerance) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in states {
        let p = preparation_vector(&model.measurements, x)?;
        let w = decompose_preparation(&p, model, tol)?;
        let r = reconstruct(&w, &model.states);
        worst = worst.max(crate::linalg::max_abs_diff(&r, &p.probs));
    }
    Ok(worst)
}

/// Outcome statistics of a sampled run. Indexed `[measurement][outcome]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub seed: u64,
    /// Convex weights over the model states used for the first stage.
    pub weights: Vec<f64>,
    pub counts: Vec<Vec<u64>>,
    pub frequencies: Vec<Vec<f64>>,
    pub born: Vec<Vec<f64>>,
    pub max_abs_deviation: f64,
    /// `(freq - p) / sqrt(p(1-p)/trials)`; zero where `p(1-p) = 0` and the
    /// frequency matches exactly, infinite if it does not.
    pub z_scores: Vec<Vec<f64>>,
    /// Some `|z| > Z_FLAG`.
    pub flagged: bool,
}

pub const Z_FLAG: f64 = 4.0;

/// Two-stage sampling: draw a state index with the decomposition weights,
/// then draw one outcome per measurement from that state's blocks.
pub fn sample_outcomes(
    model: &HVModel,
    x: &BlochVector,
    trials: u64,
    seed: u64,
    tol: Tolerance,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::input("need at least one trial"));
    }
    let p = preparation_vector(&model.measurements, x)?;
    let weights = decompose_preparation(&p, model, tol)?;
    let pick = WeightedIndex::new(weights.iter().map(|w| w.max(0.0)))
        .map_err(|e| Error::Degenerate(e.to_string()))?;
    let sizes = model.sizes();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: Vec<Vec<u64>> = sizes.iter().map(|&s| vec![0; s]).collect();
    for _ in 0..trials {
        let state = &model.states[pick.sample(&mut rng)];
        for (n, (&s, &o)) in sizes.iter().zip(&offsets).enumerate() {
            let block = &state[o..o + s];
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut r = s - 1;
            for (k, &q) in block.iter().enumerate() {
                acc += q;
                if u < acc {
                    r = k;
                    break;
                }
            }
            counts[n][r] += 1;
        }
    }

    let t = trials as f64;
    let mut frequencies = Vec::with_capacity(sizes.len());
    let mut born = Vec::with_capacity(sizes.len());
    let mut z_scores = Vec::with_capacity(sizes.len());
    let mut max_abs_deviation: f64 = 0.0;
    let mut flagged = false;
    for (n, &o) in offsets.iter().enumerate() {
        let bp = p.probs[o..o + sizes[n]].to_vec();
        let f: Vec<f64> = counts[n].iter().map(|&c| c as f64 / t).collect();
        let z: Vec<f64> = f
            .iter()
            .zip(&bp)
            .map(|(&fi, &pi)| {
                let var = pi * (1.0 - pi) / t;
                if var > 0.0 {
                    (fi - pi) / var.sqrt()
                } else if (fi - pi).abs() <= tol.eps {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        for (fi, pi) in f.iter().zip(&bp) {
            max_abs_deviation = max_abs_deviation.max((fi - pi).abs());
        }
        flagged |= z.iter().any(|zi| zi.abs() > Z_FLAG);
        frequencies.push(f);
        born.push(bp);
        z_scores.push(z);
    }
    Ok(SimulationReport {
        trials,
        seed,
        weights,
        counts,
        frequencies,
        born,
        max_abs_deviation,
        z_scores,
        flagged,
    })
}

/// Unit rays in `R^3` with orthogonal triads among them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaySet {
    pub vectors: Vec<Vec<f64>>,
    pub triads: Vec<[usize; 3]>,
}

fn orthogonal(a: &[f64], b: &[f64], tol: Tolerance) -> bool {
    dot(a, b).abs() <= tol.dedup
}

impl RaySet {
    /// Validates unit length and pairwise orthogonality of every triad.
    pub fn new(vectors: Vec<Vec<f64>>, triads: Vec<[usize; 3]>, tol: Tolerance) -> Result<Self> {
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != 3 {
                return Err(Error::input(format!("ray {i} is not in R^3")));
            }
            if (norm(v) - 1.0).abs() > tol.dedup {
                return Err(Error::input(format!("ray {i} is not a unit vector")));
            }
        }
        for t in &triads {
            if t.iter().any(|&i| i >= vectors.len()) {
                return Err(Error::input(format!("triad {t:?} indexes a missing ray")));
            }
            let [a, b, c] = t.map(|i| &vectors[i]);
            if !(orthogonal(a, b, tol) && orthogonal(a, c, tol) && orthogonal(b, c, tol)) {
                return Err(Error::input(format!("triad {t:?} is not orthogonal")));
            }
        }
        Ok(Self { vectors, triads })
    }

    /// Triads found by scanning all triples `i < j < k`.
    pub fn with_derived_triads(vectors: Vec<Vec<f64>>, tol: Tolerance) -> Result<Self> {
        let mut triads = Vec::new();
        let n = vectors.len();
        for i in 0..n {
            for j in i + 1..n {
                if !orthogonal(&vectors[i], &vectors[j], tol) {
                    continue;
                }
                for k in j + 1..n {
                    if orthogonal(&vectors[i], &vectors[k], tol)
                        && orthogonal(&vectors[j], &vectors[k], tol)
                    {
                        triads.push([i, j, k]);
                    }
                }
            }
        }
        Self::new(vectors, triads, tol)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn orthogonal_pairs(&self, tol: Tolerance) -> Vec<(usize, usize)> {
        let n = self.vectors.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if orthogonal(&self.vectors[i], &self.vectors[j], tol) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// One qutrit measurement per triad, outcomes in triad order.
    pub fn triad_measurements(&self, tol: Tolerance) -> Result<MeasurementSet> {
        if self.triads.is_empty() {
            return Err(Error::input("ray set has no triads"));
        }
        let frames: Vec<Vec<Vec<Complex64>>> = self
            .triads
            .iter()
            .map(|t| {
                t.iter()
                    .map(|&i| self.vectors[i].iter().map(|&c| Complex64::new(c, 0.0)).collect())
                    .collect()
            })
            .collect();
        MeasurementSet::from_kets(&frames, tol)
    }

    /// Number of triads each ray belongs to.
    pub fn multiplicity(&self) -> Vec<usize> {
        let mut m = vec![0; self.vectors.len()];
        for t in &self.triads {
            for &i in t {
                m[i] += 1;
            }
        }
        m
    }
}

/// Non-contextual `{0,1}` assignment to the rays with exactly one 1 per
/// triad and no two orthogonal rays both 1, or `None` after an exhaustive
/// search proves there is none.
pub fn ks_noncontextual_search(rays: &RaySet, tol: Tolerance) -> Option<Vec<u8>> {
    let n = rays.len();
    let mut neighbours = vec![Vec::new(); n];
    for (i, j) in rays.orthogonal_pairs(tol) {
        neighbours[i].push(j);
        neighbours[j].push(i);
    }
    let ctx = Ctx {
        triads: &rays.triads,
        neighbours: &neighbours,
    };
    let mut values: Vec<Option<u8>> = vec![None; n];
    if !ctx.solve(&mut values) {
        return None;
    }
    // rays in no triad are unconstrained beyond orthogonality; 0 is safe
    Some(values.into_iter().map(|v| v.unwrap_or(0)).collect())
}

struct Ctx<'a> {
    triads: &'a [[usize; 3]],
    neighbours: &'a [Vec<usize>],
}

impl Ctx<'_> {
    fn solve(&self, values: &mut Vec<Option<u8>>) -> bool {
        let saved = values.clone();
        if !self.propagate(values) {
            *values = saved;
            return false;
        }
        // branch on a ray of the triad with the fewest open members
        let open = self
            .triads
            .iter()
            .filter(|t| t.iter().all(|&i| values[i] != Some(1)))
            .min_by_key(|t| t.iter().filter(|&&i| values[i].is_none()).count());
        let Some(t) = open else {
            return true;
        };
        for &i in t {
            if values[i].is_none() {
                let before = values.clone();
                values[i] = Some(1);
                if self.solve(values) {
                    return true;
                }
                *values = before;
            }
        }
        *values = saved;
        false
    }

    /// Unit propagation to a fixed point; false on a contradiction.
    fn propagate(&self, values: &mut [Option<u8>]) -> bool {
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..values.len() {
                if values[i] == Some(1) {
                    for &j in &self.neighbours[i] {
                        match values[j] {
                            Some(1) => return false,
                            None => {
                                values[j] = Some(0);
                                changed = true;
                            }
                            _ => {}
                        }
                    }
                }
            }
            for t in self.triads {
                let ones = t.iter().filter(|&&i| values[i] == Some(1)).count();
                let zeros = t.iter().filter(|&&i| values[i] == Some(0)).count();
                if ones > 1 || zeros == 3 {
                    return false;
                }
                if ones == 0 && zeros == 2 {
                    let &last = t.iter().find(|&&i| values[i].is_none()).unwrap();
                    values[last] = Some(1);
                    changed = true;
                }
            }
        }
        true
    }
}

/// A ray that one deterministic state assigns different values in two of
/// its triads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextDependence {
    pub state: usize,
    pub ray: usize,
    /// `(triad index, value)` for every triad containing the ray.
    pub values: Vec<(usize, u8)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub shared_rays: Vec<usize>,
    pub deterministic_states: usize,
    pub instances: Vec<ContextDependence>,
}

/// Context-dependent value assignments among the deterministic states of a
/// model built on `rays.triad_measurements()`.
pub fn contextuality_witness(model: &HVModel, rays: &RaySet) -> Result<WitnessReport> {
    let mult = rays.multiplicity();
    let shared: Vec<usize> = (0..rays.len()).filter(|&i| mult[i] >= 2).collect();
    if shared.is_empty() {
        return Err(Error::WitnessNotApplicable(
            "no ray belongs to two triads".to_string(),
        ));
    }
    if model.d != 3 || model.n != rays.triads.len() || model.sizes().iter().any(|&s| s != 3) {
        return Err(Error::input(format!(
            "model has d={} and N={}, expected a qutrit model on {} triads",
            model.d,
            model.n,
            rays.triads.len()
        )));
    }
    let sizes = model.sizes();
    let det: Vec<(usize, crate::hv::DeterministicHVState)> = model
        .states
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            crate::hv::DeterministicHVState::from_indicator(s, &sizes, 1e-12).map(|d| (i, d))
        })
        .collect();
    let mut instances = Vec::new();
    for (idx, state) in &det {
        for &ray in &shared {
            let values: Vec<(usize, u8)> = rays
                .triads
                .iter()
                .enumerate()
                .filter_map(|(t, tri)| {
                    tri.iter()
                        .position(|&i| i == ray)
                        .map(|pos| (t, u8::from(state.outcomes[t] == pos)))
                })
                .collect();
            if values.iter().any(|v| v.1 != values[0].1) {
                instances.push(ContextDependence {
                    state: *idx,
                    ray,
                    values,
                });
            }
        }
    }
    Ok(WitnessReport {
        shared_rays: shared,
        deterministic_states: det.len(),
        instances,
    })
}

/// `count` Haar-random pure states of dimension `d` from a ChaCha8 stream.
pub fn seeded_pure_states(d: usize, count: usize, seed: u64) -> Vec<BlochVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| crate::bloch::random_pure_state(d, &mut rng))
        .collect()
}

/// `count` random qubit measurement sets of `n` directions each.
pub fn seeded_qubit_sets(n: usize, count: usize, seed: u64, tol: Tolerance) -> Result<Vec<MeasurementSet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(row_seed(seed, n));
    (0..count).map(|_| random_qubit_set(n, &mut rng, tol)).collect()
}

/// Uniform direction on the unit sphere from three Gaussian draws.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = norm(&v);
        if n > 1e-6 {
            return v.map(|c| c / n);
        }
    }
}

/// `n` random qubit measurement directions.
pub fn random_qubit_set<R: Rng + ?Sized>(n: usize, rng: &mut R, tol: Tolerance) -> Result<MeasurementSet> {
    let dirs: Vec<Vec<f64>> = (0..n).map(|_| random_direction(rng).to_vec()).collect();
    MeasurementSet::qubit_directions(&dirs, tol)
}

/// Per-`N` seed so that rows do not depend on which other `N` were asked for.
pub fn row_seed(seed: u64, n: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ n as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    /// Largest vertex norm of each sample's constraint polytope.
    pub norms: Vec<f64>,
    pub mean: f64,
    pub max: f64,
    pub min: f64,
}

/// Largest vertex norm of the constraint polytope of a qubit set. The
/// polytope contains the unit ball, so this is at least one.
pub fn max_vertex_norm(meas: &MeasurementSet, tol: Tolerance) -> Result<f64> {
    let h = polytope::build_hrep(meas, tol)?;
    let v = polytope::enumerate_vertices(&h, tol)?;
    Ok(v.vertices.iter().map(|y| norm(y)).fold(0.0, f64::max))
}

pub fn convergence_study(
    n_values: &[usize],
    samples: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<Vec<ConvergenceRow>> {
    if samples == 0 {
        return Err(Error::input("need at least one sample"));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        if n < 3 {
            return Err(Error::input(format!(
                "N = {n}: at least three directions are needed for a bounded polytope"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(row_seed(seed, n));
        let mut norms = Vec::with_capacity(samples);
        for _ in 0..samples {
            let meas = random_qubit_set(n, &mut rng, tol)?;
            norms.push(max_vertex_norm(&meas, tol)?);
        }
        let mean = norms.iter().sum::<f64>() / samples as f64;
        let max = norms.iter().copied().fold(f64::MIN, f64::max);
        let min = norms.iter().copied().fold(f64::MAX, f64::min);
        rows.push(ConvergenceRow {
            n,
            samples,
            norms,
            mean,
            max,
            min,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::random_pure_state;
    use crate::hv::{build_universal_model, HVModel, Provenance, Route};
    use crate::presets;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn eigenstates() -> Vec<BlochVector> {
        let mut v = Vec::new();
        for axis in 0..3 {
            for s in [1.0, -1.0] {
                let mut c = [0.0; 3];
                c[axis] = s;
                v.push(BlochVector::qubit(c[0], c[1], c[2]));
            }
        }
        v
    }

    fn spekkens() -> HVModel {
        build_universal_model(&presets::octahedron(), false, tol())
            .unwrap()
            .select_reduced(&[vec![1, 1, 1], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], tol())
            .unwrap()
    }

    #[test]
    fn spekkens_exact() {
        assert!(verify_exact(&spekkens(), &eigenstates(), tol()).unwrap() <= 1e-12);
    }

    #[test]
    fn octahedron_random_states() {
        let m = build_universal_model(&presets::octahedron(), false, tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<BlochVector> = (0..100).map(|_| random_pure_state(2, &mut rng)).collect();
        assert!(verify_exact(&m, &xs, tol()).unwrap() <= 1e-9);
    }

    #[test]
    fn sampling_reproducible() {
        let m = build_universal_model(&presets::octahedron(), false, tol()).unwrap();
        let x = BlochVector::qubit(1.0, 0.0, 0.0);
        let a = sample_outcomes(&m, &x, 20_000, 7, tol()).unwrap();
        let b = sample_outcomes(&m, &x, 20_000, 7, tol()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts[0], vec![20_000, 0]);
        assert!(!a.flagged);
        for c in &a.counts {
            assert_eq!(c.iter().sum::<u64>(), 20_000);
        }
        let z = sample_outcomes(&m, &BlochVector::qubit(0.0, 0.0, 1.0), 1000, 1, tol()).unwrap();
        assert_eq!(z.counts[2], vec![1000, 0]);
    }

    #[test]
    fn ks_small_sets() {
        let e = |i: usize| {
            let mut v = vec![0.0; 3];
            v[i] = 1.0;
            v
        };
        let one = RaySet::new(vec![e(0), e(1), e(2)], vec![[0, 1, 2]], tol()).unwrap();
        let a = ks_noncontextual_search(&one, tol()).unwrap();
        assert_eq!(a.iter().map(|&v| v as usize).sum::<usize>(), 1);

        let s = 0.5f64.sqrt();
        let rotated = vec![vec![s, s, 0.0], vec![s, -s, 0.0], e(2)];
        let mut vs = vec![e(0), e(1), e(2)];
        vs.extend(rotated);
        // the two triads share e_z as a vector but not as an index
        let two = RaySet::new(vs, vec![[0, 1, 2], [3, 4, 5]], tol()).unwrap();
        assert!(ks_noncontextual_search(&two, tol()).is_some());
    }

    #[test]
    fn peres_is_ks() {
        let rays = presets::peres33();
        assert_eq!(rays.len(), 33);
        assert!(!rays.triads.is_empty());
        assert!(ks_noncontextual_search(&rays, tol()).is_none());
    }

    #[test]
    fn witness_cases() {
        let e = |i: usize| {
            let mut v = vec![0.0; 3];
            v[i] = 1.0;
            v
        };
        let s = 0.5f64.sqrt();
        // shared ray e_z (index 2) in both triads
        let rays = RaySet::new(
            vec![e(0), e(1), e(2), vec![s, s, 0.0], vec![s, -s, 0.0]],
            vec![[0, 1, 2], [3, 4, 2]],
            tol(),
        )
        .unwrap();
        let meas = rays.triad_measurements(tol()).unwrap();
        let hand = crate::hv::DeterministicHVState::new(vec![2, 0]);
        let model = HVModel::from_deterministic(meas, &[hand], Provenance::new(Route::Subset), tol()).unwrap();
        let w = contextuality_witness(&model, &rays).unwrap();
        assert_eq!(w.shared_rays, vec![2]);
        assert_eq!(w.instances.len(), 1);
        assert_eq!(w.instances[0].values, vec![(0, 1), (1, 0)]);

        let disjoint = RaySet::new(
            vec![e(0), e(1), e(2), vec![s, s, 0.0], vec![s, -s, 0.0], e(2)],
            vec![[0, 1, 2], [3, 4, 5]],
            tol(),
        )
        .unwrap();
        let meas = disjoint.triad_measurements(tol()).unwrap();
        let m = HVModel::from_deterministic(
            meas,
            &[crate::hv::DeterministicHVState::new(vec![0, 0])],
            Provenance::new(Route::Subset),
            tol(),
        )
        .unwrap();
        assert!(matches!(
            contextuality_witness(&m, &disjoint),
            Err(Error::WitnessNotApplicable(_))
        ));
    }

    #[test]
    fn non_orthogonal_triad_rejected() {
        let v = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![s2(), s2(), 0.0]];
        assert!(RaySet::new(v, vec![[0, 1, 2]], tol()).is_err());
    }

    fn s2() -> f64 {
        0.5f64.sqrt()
    }

    #[test]
    fn convergence_basics() {
        let oct = presets::octahedron();
        assert!((max_vertex_norm(&oct, tol()).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        let rows = convergence_study(&[5, 20], 5, 1, tol()).unwrap();
        for r in &rows {
            assert!(r.min >= 1.0 - 1e-9);
        }
        assert!(rows[1].mean <= rows[0].mean);
    }
}
