//! Hidden-variable states and models.
//!
//! An HV state assigns an outcome distribution to every measurement of a set
//! and is stored as the stacked probability vector (same layout as a
//! [`PreparationVector`]). A deterministic state puts all weight on one
//! outcome per measurement.
//!
//! A model is a finite list of HV states; a preparation vector is simulated
//! by writing it as a convex combination of them. Universal models come from
//! the vertices of the constraint polytope of the measurement set.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::bloch::{check_blocks, BlochVector, MeasurementKind, MeasurementSet, PreparationVector};
use crate::polytope::{self, VRepPolytope};
use crate::{Error, Result, Tolerance};

/// One outcome index per measurement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DeterministicHVState {
    pub outcomes: Vec<usize>,
}

impl DeterministicHVState {
    pub fn new(outcomes: Vec<usize>) -> Self {
        Self { outcomes }
    }

    /// Qubit shorthand: bit `1` means the first listed outcome occurs.
    pub fn from_reduced_bits(bits: &[u8]) -> Self {
        Self {
            outcomes: bits.iter().map(|&b| if b == 1 { 0 } else { 1 }).collect(),
        }
    }

    pub fn reduced_bits(&self) -> Vec<u8> {
        self.outcomes.iter().map(|&r| u8::from(r == 0)).collect()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Stacked indicator vector over blocks of the given sizes.
    pub fn indicator(&self, sizes: &[usize]) -> Vec<f64> {
        let mut v = vec![0.0; sizes.iter().sum()];
        let mut at = 0;
        for (&r, &s) in self.outcomes.iter().zip(sizes) {
            v[at + r] = 1.0;
            at += s;
        }
        v
    }

    /// Inverse of [`indicator`](Self::indicator); `None` unless every block
    /// is an indicator within `eps`.
    pub fn from_indicator(probs: &[f64], sizes: &[usize], eps: f64) -> Option<Self> {
        let mut outcomes = Vec::with_capacity(sizes.len());
        let mut at = 0;
        for &s in sizes {
            let block = &probs[at..at + s];
            at += s;
            let hot = block.iter().position(|&p| (p - 1.0).abs() <= eps)?;
            if block
                .iter()
                .enumerate()
                .any(|(r, &p)| r != hot && p.abs() > eps)
            {
                return None;
            }
            outcomes.push(hot);
        }
        Some(Self { outcomes })
    }
}

/// Stacked per-measurement outcome distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HVState {
    pub sizes: Vec<usize>,
    pub probs: Vec<f64>,
}

impl HVState {
    pub fn new(probs: Vec<f64>, sizes: Vec<usize>, tol: Tolerance) -> Result<Self> {
        check_blocks(&probs, &sizes, tol)?;
        Ok(Self { sizes, probs })
    }

    pub fn is_deterministic(&self, eps: f64) -> bool {
        DeterministicHVState::from_indicator(&self.probs, &self.sizes, eps).is_some()
    }
}

/// HV state of the constraint-polytope point `y`: outcome `r` of measurement
/// `n` gets `w[1 + (d-1) m.y]`. Entries within `tol.eps` of 0 or 1 are
/// snapped so that saturated constraints give exact zeros and ones.
pub fn vertex_to_hv_state(y: &[f64], meas: &MeasurementSet, tol: Tolerance) -> Result<HVState> {
    let dim = crate::bloch::bloch_dim(meas.d());
    if y.len() != dim {
        return Err(Error::input(format!(
            "point has {} coordinates, expected {dim}",
            y.len()
        )));
    }
    let mut probs = meas.probabilities(y);
    for (i, p) in probs.iter_mut().enumerate() {
        if *p < -tol.eps || *p > 1.0 + tol.eps {
            return Err(Error::InvalidVertex(format!(
                "outcome probability {i} is {p}, outside [0,1]"
            )));
        }
        if p.abs() <= tol.eps {
            *p = 0.0;
        } else if (*p - 1.0).abs() <= tol.eps {
            *p = 1.0;
        }
    }
    HVState::new(probs, meas.block_sizes(), Tolerance::with_eps(tol.eps * 10.0))
}

/// Common-threshold coupling of the blocks.
///
/// Each block `n` splits `[0,1)` at its cumulative probabilities (outcomes in
/// listed order); a threshold `u` selects, in every block, the outcome whose
/// cumulative interval contains it. Cutting `[0,1)` at the union of all
/// cumulative sums gives segments on which the selection is constant; each
/// segment is one deterministic state weighted by its length. This uses at
/// most `sum_n (size_n - 1) + 1` states and, for qubits in the reduced form,
/// is exactly the sorted-probability staircase: weight `1 - p_max` on the
/// all-second-outcome state, `p_min` on the all-first-outcome state and the
/// successive gaps of the sorted probabilities in between.
fn coupling(probs: &[f64], sizes: &[usize]) -> Vec<(f64, DeterministicHVState)> {
    let mut cumulative: Vec<Vec<f64>> = Vec::with_capacity(sizes.len());
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    let mut at = 0;
    for &s in sizes {
        let mut acc = 0.0;
        let mut c = Vec::with_capacity(s);
        for (r, &p) in probs[at..at + s].iter().enumerate() {
            acc += p.max(0.0);
            let v = if r + 1 == s { 1.0 } else { acc.min(1.0) };
            c.push(v);
            if r + 1 < s {
                cuts.push(v);
            }
        }
        at += s;
        cumulative.push(c);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut out = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let weight = hi - lo;
        if weight <= 0.0 {
            continue;
        }
        let outcomes = cumulative
            .iter()
            .map(|c| c.iter().position(|&v| v > lo).unwrap_or(c.len() - 1))
            .collect();
        out.push((weight, DeterministicHVState { outcomes }));
    }
    out
}

/// Decompose a preparation vector into deterministic states with the
/// staircase construction. Weights are positive and sum to one.
pub fn staircase_decompose(
    p: &PreparationVector,
    tol: Tolerance,
) -> Result<Vec<(f64, DeterministicHVState)>> {
    check_blocks(&p.probs, &p.sizes, tol)?;
    Ok(coupling(&p.probs, &p.sizes))
}

/// Staircase decomposition of an HV state into deterministic ones.
pub fn expand_to_deterministic(state: &HVState, tol: Tolerance) -> Result<Vec<(f64, DeterministicHVState)>> {
    check_blocks(&state.probs, &state.sizes, tol)?;
    Ok(coupling(&state.probs, &state.sizes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Deterministic,
    Indeterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// One state per constraint-polytope vertex.
    DualVertices,
    /// Dual-vertex states expanded by the staircase and deduplicated.
    Staircase,
    /// Union of symmetry orbits of deterministic states.
    OrbitUnion,
    /// Hand-picked subset of another model.
    Subset,
}

/// Count checks recorded at construction time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// Number of measurements `N`.
    pub n: usize,
    /// Model size `L`.
    pub l: usize,
    pub dual_vertices: usize,
    /// Facets `F` of the measurement polytope (qubit projective sets).
    pub facets: Option<usize>,
    /// `(N+2, 4(N-1))`, only for full-dimensional sets of `2N` distinct points.
    pub facet_range: Option<(usize, usize)>,
    pub facet_range_holds: Option<bool>,
    /// `L <= F`, indeterministic qubit models.
    pub l_le_f: Option<bool>,
    /// `L <= (N-2) F`, deterministic qubit models.
    pub l_le_n2_f: Option<bool>,
    pub mcmullen_bound: u128,
    pub mcmullen_holds: bool,
    /// Largest number of deterministic states one vertex expanded into.
    pub max_expansion: Option<usize>,
    /// `max_expansion <= N - 2`, qubit only.
    pub expansion_le_n_minus_2: Option<bool>,
}

impl BoundsReport {
    /// Every check that applies holds.
    pub fn all_hold(&self) -> bool {
        [
            self.facet_range_holds,
            self.l_le_f,
            self.l_le_n2_f,
            Some(self.mcmullen_holds),
            self.expansion_le_n_minus_2,
        ]
        .iter()
        .all(|c| c.unwrap_or(true))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub route: Route,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbits: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected: Option<Vec<usize>>,
}

impl Provenance {
    pub fn new(route: Route) -> Self {
        Self {
            route,
            bounds: None,
            group: None,
            orbits: None,
            selected: None,
        }
    }
}

/// A finite set of HV states for a measurement set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HVModel {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub kind: ModelKind,
    /// Stacked probability vectors, canonically ordered.
    pub states: Vec<Vec<f64>>,
    pub provenance: Provenance,
    pub measurements: MeasurementSet,
}

/// Descending lexicographic order on probability vectors; for deterministic
/// states this is ascending order of outcome tuples.
fn canonical_cmp(a: &[f64], b: &[f64]) -> Ordering {
    polytope::lex_cmp(b, a)
}

impl HVModel {
    /// Model from explicit state vectors; the kind is deterministic iff every
    /// state is an indicator.
    pub fn from_states(
        meas: MeasurementSet,
        mut states: Vec<Vec<f64>>,
        provenance: Provenance,
        tol: Tolerance,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::input("a model needs at least one state"));
        }
        let sizes = meas.block_sizes();
        for s in &states {
            check_blocks(s, &sizes, tol)?;
        }
        states.sort_by(|a, b| canonical_cmp(a, b));
        states.dedup_by(|a, b| crate::linalg::max_abs_diff(a, b) <= tol.dedup);
        let det = states
            .iter()
            .all(|s| DeterministicHVState::from_indicator(s, &sizes, 1e-12).is_some());
        Ok(Self {
            d: meas.d(),
            n: meas.len(),
            kind: if det {
                ModelKind::Deterministic
            } else {
                ModelKind::Indeterministic
            },
            states,
            provenance,
            measurements: meas,
        })
    }

    pub fn from_deterministic(
        meas: MeasurementSet,
        states: &[DeterministicHVState],
        provenance: Provenance,
        tol: Tolerance,
    ) -> Result<Self> {
        let sizes = meas.block_sizes();
        let vecs = states.iter().map(|s| s.indicator(&sizes)).collect();
        Self::from_states(meas, vecs, provenance, tol)
    }

    /// Number of states `L`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.measurements.block_sizes()
    }

    pub fn state(&self, i: usize) -> HVState {
        HVState {
            sizes: self.sizes(),
            probs: self.states[i].clone(),
        }
    }

    /// Outcome tuples, when the model is deterministic.
    pub fn deterministic_states(&self) -> Option<Vec<DeterministicHVState>> {
        let sizes = self.sizes();
        self.states
            .iter()
            .map(|s| DeterministicHVState::from_indicator(s, &sizes, 1e-12))
            .collect()
    }

    /// Keep only the states with the given indices.
    pub fn select(&self, indices: &[usize], tol: Tolerance) -> Result<Self> {
        let mut states = Vec::with_capacity(indices.len());
        for &i in indices {
            states.push(
                self.states
                    .get(i)
                    .ok_or_else(|| Error::input(format!("state index {i} out of range")))?
                    .clone(),
            );
        }
        let mut prov = Provenance::new(Route::Subset);
        prov.selected = Some(indices.to_vec());
        Self::from_states(self.measurements.clone(), states, prov, tol)
    }

    /// Keep the deterministic qubit states with the given reduced bit strings.
    pub fn select_reduced(&self, keep: &[Vec<u8>], tol: Tolerance) -> Result<Self> {
        let det = self
            .deterministic_states()
            .ok_or_else(|| Error::input("model has indeterministic states"))?;
        let mut idx = Vec::with_capacity(keep.len());
        for bits in keep {
            let pos = det
                .iter()
                .position(|s| &s.reduced_bits() == bits)
                .ok_or_else(|| Error::input(format!("state {bits:?} is not in the model")))?;
            idx.push(pos);
        }
        self.select(&idx, tol)
    }
}

fn qubit_projective(meas: &MeasurementSet) -> bool {
    meas.d() == 2 && meas.kind() == MeasurementKind::Projective
}

/// Facet count of the measurement polytope `conv{+-m_n}` of a qubit set,
/// in the span of the directions when they are degenerate.
pub fn measurement_polytope_facets(meas: &MeasurementSet, tol: Tolerance) -> Result<usize> {
    let pts: Vec<Vec<f64>> = meas
        .frames()
        .iter()
        .flat_map(|f| f.iter().map(|m| m.coords().to_vec()))
        .collect();
    let span = crate::linalg::orthonormal_basis(&pts, tol.eps);
    let local: Vec<Vec<f64>> = pts.iter().map(|p| crate::linalg::project(&span, p)).collect();
    polytope::count_facets(&local, tol)
}

/// Preparation-universal model from the vertices of the constraint polytope,
/// optionally expanded into deterministic states.
pub fn build_universal_model(
    meas: &MeasurementSet,
    deterministic: bool,
    tol: Tolerance,
) -> Result<HVModel> {
    let h = polytope::build_hrep(meas, tol)?;
    let vertices = polytope::enumerate_vertices(&h, tol)?;
    let hv_states: Vec<HVState> = vertices
        .vertices
        .iter()
        .map(|y| vertex_to_hv_state(y, meas, tol))
        .collect::<Result<_>>()?;

    let (states, max_expansion, route) = if deterministic {
        let mut union: BTreeSet<DeterministicHVState> = BTreeSet::new();
        let mut max_exp = 0;
        for s in &hv_states {
            let parts = expand_to_deterministic(s, Tolerance::with_eps(tol.eps * 10.0))?;
            max_exp = max_exp.max(parts.len());
            union.extend(parts.into_iter().map(|(_, st)| st));
        }
        let sizes = meas.block_sizes();
        let vecs = union.iter().map(|s| s.indicator(&sizes)).collect();
        (vecs, Some(max_exp), Route::Staircase)
    } else {
        let vecs = hv_states.into_iter().map(|s| s.probs).collect();
        (vecs, None, Route::DualVertices)
    };

    let mut model = HVModel::from_states(meas.clone(), states, Provenance::new(route), tol)?;
    let bounds = audit_bounds(meas, vertices.vertices.len(), model.len(), deterministic, max_expansion, tol);
    if !bounds.all_hold() {
        log::warn!("count bounds violated: {bounds:?}");
    }
    model.provenance.bounds = Some(bounds);
    Ok(model)
}

fn audit_bounds(
    meas: &MeasurementSet,
    dual_vertices: usize,
    l: usize,
    deterministic: bool,
    max_expansion: Option<usize>,
    tol: Tolerance,
) -> BoundsReport {
    let n = meas.len();
    let qubit = qubit_projective(meas);
    let facets = if qubit {
        measurement_polytope_facets(meas, tol).ok()
    } else {
        None
    };
    // the facet range applies to 2N distinct points spanning three dimensions
    let full = qubit && n >= 3 && {
        let dirs: Vec<Vec<f64>> = meas.frames().iter().map(|f| f[0].coords().to_vec()).collect();
        crate::linalg::rank(&dirs, tol.eps) == 3
            && polytope::build_hrep(meas, tol).is_ok_and(|h| h.constraints.len() == n)
    };
    let facet_range = if full { polytope::facet_bound(n).ok() } else { None };
    let facet_range_holds = match (facet_range, facets) {
        (Some((lo, hi)), Some(f)) => Some(lo <= f && f <= hi),
        _ => None,
    };
    let l_le_f = match (qubit && !deterministic, facets) {
        (true, Some(f)) => Some(l <= f),
        _ => None,
    };
    let l_le_n2_f = match (qubit && deterministic && n >= 3, facets) {
        (true, Some(f)) => Some(l <= (n - 2) * f),
        _ => None,
    };
    let mcmullen_bound = match polytope::build_hrep(meas, tol) {
        // span-reduced: count in the polytope's own dimension
        Ok(h) if h.basis.is_some() => polytope::upper_bound_vertices(h.dim, 2 * h.constraints.len()),
        _ => polytope::mcmullen_vertex_bound(meas.d(), n, meas.d() == 2),
    };
    BoundsReport {
        n,
        l,
        dual_vertices,
        facets,
        facet_range,
        facet_range_holds,
        l_le_f,
        l_le_n2_f,
        mcmullen_bound,
        mcmullen_holds: dual_vertices as u128 <= mcmullen_bound,
        max_expansion,
        expansion_le_n_minus_2: match max_expansion {
            Some(e) if qubit && n >= 3 => Some(e <= n - 2),
            _ => None,
        },
    }
}

/// Convex weights over the model states reproducing `p`.
pub fn decompose_preparation(p: &PreparationVector, model: &HVModel, tol: Tolerance) -> Result<Vec<f64>> {
    if p.sizes != model.sizes() {
        return Err(Error::input(format!(
            "preparation vector blocks {:?} do not match the model's {:?}",
            p.sizes,
            model.sizes()
        )));
    }
    // last entry of each block is implied by normalization; dropping it keeps
    // the system full rank
    let keep = |v: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(v.len());
        let mut at = 0;
        for &s in &p.sizes {
            out.extend_from_slice(&v[at..at + s - 1]);
            at += s;
        }
        out
    };
    let states: Vec<Vec<f64>> = model.states.iter().map(|s| keep(s)).collect();
    polytope::convex_membership(&keep(&p.probs), &states, tol)?.ok_or(Error::NotRepresentable)
}

/// Convex weights over the polytope vertices reproducing the Bloch vector.
pub fn decompose_bloch(x: &BlochVector, vertices: &VRepPolytope, tol: Tolerance) -> Result<Vec<f64>> {
    polytope::convex_membership(x.coords(), &vertices.vertices, tol)?.ok_or(Error::NotRepresentable)
}

/// `sum_l w_l v_l`.
pub fn reconstruct(weights: &[f64], vectors: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; vectors.first().map_or(0, Vec::len)];
    for (w, v) in weights.iter().zip(vectors) {
        crate::linalg::axpy(&mut out, *w, v);
    }
    out
}
