//! Rotation groups acting on qubit measurement sets and on deterministic HV
//! states, orbit partitions and the search for small universal orbit unions.
//!
//! A rotation `g` that maps the direction set `{+-m_n}` onto itself acts as
//! `g m_n = s_n m_{pi(n)}`. Since `m_{pi(n)}.(g y) = s_n m_n.y`, the HV state
//! of the rotated vertex is the old one with measurement `n` moved to
//! position `pi(n)` and its two outcomes swapped when `s_n = -1`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent on newer toolchains
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::bloch::{MeasurementKind, MeasurementSet};
use crate::hv::{vertex_to_hv_state, DeterministicHVState};
use crate::linalg::{self, Mat3, IDENTITY3};
use crate::polytope;
use crate::presets::golden_ratio;
use crate::{Error, Result, Tolerance};

/// Largest `N` for which all `2^N` deterministic states are enumerated.
pub const MAX_ORBIT_N: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationGroup {
    pub name: String,
    pub elements: Vec<Mat3>,
}

impl RotationGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

fn contains(set: &[Mat3], g: &Mat3, tol: f64) -> bool {
    set.iter().any(|h| linalg::mat3_distance(h, g) < tol)
}

/// Closure of `generators` under multiplication.
pub fn closure(name: &str, generators: &[Mat3], tol: Tolerance) -> RotationGroup {
    let mut elements = vec![IDENTITY3];
    let mut frontier = vec![IDENTITY3];
    while let Some(a) = frontier.pop() {
        for g in generators {
            let p = linalg::mat3_mul(g, &a);
            if !contains(&elements, &p, tol.dedup) {
                elements.push(p);
                frontier.push(p);
            }
        }
    }
    RotationGroup {
        name: name.to_string(),
        elements,
    }
}

/// Standard generators of the named group: `octahedral` (24 rotations of the
/// cube), `icosahedral` (60 rotations of the icosahedron with vertices at
/// cyclic permutations of `(0, +-1, +-phi)`) or `trivial`.
pub fn generators(name: &str) -> Result<Vec<Mat3>> {
    let cyclic: Mat3 = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    match name {
        "octahedral" | "O" => {
            let quarter_z: Mat3 = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
            Ok(vec![quarter_z, cyclic])
        }
        "icosahedral" | "I" => {
            let phi = golden_ratio();
            let half_z: Mat3 = [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
            // 72 degrees about the vertex (0, 1, phi): cos 72 = (phi - 1)/2
            let c = (phi - 1.0) / 2.0;
            let s = (1.0 - c * c).sqrt();
            let fifth = linalg::rotation_from_axis([0.0, 1.0, phi], c, s);
            Ok(vec![cyclic, half_z, fifth])
        }
        "trivial" => Ok(vec![]),
        other => Err(Error::input(format!(
            "unknown group '{other}' (expected octahedral, icosahedral or trivial)"
        ))),
    }
}

pub fn generate_group(name: &str, tol: Tolerance) -> Result<RotationGroup> {
    let gens = generators(name)?;
    let canonical = match name {
        "O" => "octahedral",
        "I" => "icosahedral",
        n => n,
    };
    Ok(closure(canonical, &gens, tol))
}

/// `g m_n = signs[n] m_{perm[n]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            signs: vec![1; n],
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// The action of `self` after `other`.
    pub fn compose(&self, other: &SignedPermutation) -> SignedPermutation {
        let perm = other.perm.iter().map(|&k| self.perm[k]).collect();
        let signs = other
            .perm
            .iter()
            .zip(&other.signs)
            .map(|(&k, &s)| s * self.signs[k])
            .collect();
        SignedPermutation { perm, signs }
    }
}

fn require_qubit(meas: &MeasurementSet) -> Result<()> {
    if meas.d() != 2 || meas.kind() != MeasurementKind::Projective {
        return Err(Error::input(
            "orbit analysis needs projective qubit measurements",
        ));
    }
    Ok(())
}

fn representatives(meas: &MeasurementSet) -> Vec<Vec<f64>> {
    meas.frames().iter().map(|f| f[0].coords().to_vec()).collect()
}

pub fn induced_signed_permutation(
    g: &Mat3,
    meas: &MeasurementSet,
    tol: Tolerance,
) -> Result<SignedPermutation> {
    require_qubit(meas)?;
    let reps = representatives(meas);
    let n = reps.len();
    let mut perm = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    let mut hit = vec![false; n];
    for m in &reps {
        let gm = linalg::mat3_apply(g, m);
        let found = reps.iter().enumerate().find_map(|(k, r)| {
            if linalg::distance(&gm, r) < tol.dedup {
                Some((k, 1))
            } else if linalg::distance(&gm, &linalg::scaled(r, -1.0)) < tol.dedup {
                Some((k, -1))
            } else {
                None
            }
        });
        let Some((k, s)) = found else {
            return Err(Error::NotASymmetry);
        };
        if hit[k] {
            return Err(Error::NotASymmetry);
        }
        hit[k] = true;
        perm.push(k);
        signs.push(s);
    }
    Ok(SignedPermutation { perm, signs })
}

pub fn act_on_state(sp: &SignedPermutation, state: &DeterministicHVState) -> DeterministicHVState {
    let mut outcomes = vec![0; state.outcomes.len()];
    for (n, &r) in state.outcomes.iter().enumerate() {
        outcomes[sp.perm[n]] = if sp.signs[n] > 0 { r } else { 1 - r };
    }
    DeterministicHVState { outcomes }
}

/// Same action on a stacked qubit probability vector (blocks of two).
pub fn act_on_probs(sp: &SignedPermutation, probs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; probs.len()];
    for n in 0..sp.len() {
        let (a, b) = (probs[2 * n], probs[2 * n + 1]);
        let k = sp.perm[n];
        if sp.signs[n] > 0 {
            out[2 * k] = a;
            out[2 * k + 1] = b;
        } else {
            out[2 * k] = b;
            out[2 * k + 1] = a;
        }
    }
    out
}

/// Bits packed with measurement 0 as the most significant, so that index
/// order equals lexicographic order of outcome tuples.
fn pack(outcomes: &[usize]) -> usize {
    outcomes.iter().fold(0, |acc, &r| acc << 1 | r)
}

fn unpack(index: usize, n: usize) -> DeterministicHVState {
    DeterministicHVState {
        outcomes: (0..n).map(|i| index >> (n - 1 - i) & 1).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPartition {
    /// Sorted by size, then by representative; each orbit is sorted and its
    /// first element is the lexicographically smallest outcome tuple.
    pub orbits: Vec<Vec<DeterministicHVState>>,
    pub sizes: Vec<usize>,
}

impl OrbitPartition {
    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn union(&self, indices: &[usize]) -> Vec<DeterministicHVState> {
        indices
            .iter()
            .flat_map(|&i| self.orbits[i].iter().cloned())
            .collect()
    }
}

pub fn orbit_partition(
    group: &RotationGroup,
    meas: &MeasurementSet,
    tol: Tolerance,
) -> Result<OrbitPartition> {
    require_qubit(meas)?;
    let n = meas.len();
    if n > MAX_ORBIT_N {
        return Err(Error::input(format!(
            "{n} measurements give too many deterministic states to enumerate"
        )));
    }
    let actions: Vec<SignedPermutation> = group
        .elements
        .iter()
        .map(|g| induced_signed_permutation(g, meas, tol))
        .collect::<Result<_>>()?;
    let total = 1usize << n;
    let mut seen = vec![false; total];
    let mut orbits = Vec::new();
    for start in 0..total {
        if seen[start] {
            continue;
        }
        let s = unpack(start, n);
        let mut members: Vec<usize> = Vec::new();
        for a in &actions {
            let idx = pack(&act_on_state(a, &s).outcomes);
            if !seen[idx] {
                seen[idx] = true;
                members.push(idx);
            }
        }
        // the group always contains the identity, but be safe with a
        // generator-only element list
        if !members.contains(&start) {
            seen[start] = true;
            members.push(start);
        }
        members.sort_unstable();
        orbits.push(members);
    }
    orbits.sort_by(|a, b| a.len().cmp(&b.len()).then(a[0].cmp(&b[0])));
    let sizes = orbits.iter().map(Vec::len).collect();
    let orbits = orbits
        .into_iter()
        .map(|o| o.into_iter().map(|i| unpack(i, n)).collect())
        .collect();
    Ok(OrbitPartition { orbits, sizes })
}

/// Reduced HV states (first-outcome probabilities) of the constraint
/// polytope vertices. Every preparation vector lies in their hull, so a set
/// of states is universal iff it reproduces all of them.
pub fn dual_vertex_targets(meas: &MeasurementSet, tol: Tolerance) -> Result<Vec<Vec<f64>>> {
    require_qubit(meas)?;
    let h = polytope::build_hrep(meas, tol)?;
    let v = polytope::enumerate_vertices(&h, tol)?;
    v.vertices
        .iter()
        .map(|y| {
            let s = vertex_to_hv_state(y, meas, tol)?;
            Ok(s.probs.iter().step_by(2).copied().collect())
        })
        .collect()
}

fn reduced_column(s: &DeterministicHVState) -> Vec<f64> {
    s.outcomes.iter().map(|&r| if r == 0 { 1.0 } else { 0.0 }).collect()
}

fn covers(columns: &[Vec<f64>], targets: &[Vec<f64>], tol: Tolerance) -> Result<bool> {
    for t in targets {
        if polytope::convex_membership(t, columns, tol)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the convex hull of `states` contains every preparation vector.
pub fn is_universal(
    states: &[DeterministicHVState],
    meas: &MeasurementSet,
    tol: Tolerance,
) -> Result<bool> {
    let targets = dual_vertex_targets(meas, tol)?;
    let columns: Vec<Vec<f64>> = states.iter().map(reduced_column).collect();
    covers(&columns, &targets, tol)
}

/// Result of [`minimal_universal_union`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalUnion {
    /// Indices into the partition's orbit list.
    pub orbits: Vec<usize>,
    pub size: usize,
    /// Size of the smallest orbit.
    pub lower_bound: usize,
    /// Number of orbit unions tested.
    pub candidates: usize,
    /// False when the candidate budget ran out and the full set was returned.
    pub exhaustive: bool,
}

/// Smallest universal union of orbits, trying unions in order of increasing
/// total size (ties in lexicographic order of orbit indices). At most
/// `budget` unions are tested; past that the full state set is returned.
pub fn minimal_universal_union(
    partition: &OrbitPartition,
    meas: &MeasurementSet,
    budget: usize,
    tol: Tolerance,
) -> Result<MinimalUnion> {
    let targets = dual_vertex_targets(meas, tol)?;
    let columns: Vec<Vec<Vec<f64>>> = partition
        .orbits
        .iter()
        .map(|o| o.iter().map(reduced_column).collect())
        .collect();
    let sizes = &partition.sizes;
    let total = partition.total();
    let lower_bound = sizes.iter().copied().min().unwrap_or(0);

    // achievable totals via subset sums
    let mut reachable = vec![false; total + 1];
    reachable[0] = true;
    for &s in sizes {
        for t in (s..=total).rev() {
            if reachable[t - s] {
                reachable[t] = true;
            }
        }
    }

    let mut candidates = 0;
    for target_size in 1..=total {
        if !reachable[target_size] {
            continue;
        }
        let mut found = None;
        let mut chosen = Vec::new();
        let mut exhausted = false;
        search(
            sizes,
            0,
            target_size,
            &mut chosen,
            &mut |subset: &[usize]| -> Result<bool> {
                if candidates >= budget {
                    exhausted = true;
                    return Ok(true);
                }
                candidates += 1;
                let cols: Vec<Vec<f64>> = subset
                    .iter()
                    .flat_map(|&i| columns[i].iter().cloned())
                    .collect();
                if covers(&cols, &targets, tol)? {
                    found = Some(subset.to_vec());
                    return Ok(true);
                }
                Ok(false)
            },
        )?;
        if let Some(orbits) = found {
            return Ok(MinimalUnion {
                orbits,
                size: target_size,
                lower_bound,
                candidates,
                exhaustive: true,
            });
        }
        if exhausted {
            log::warn!("orbit union search stopped after {budget} candidates");
            return Ok(MinimalUnion {
                orbits: (0..sizes.len()).collect(),
                size: total,
                lower_bound,
                candidates,
                exhaustive: false,
            });
        }
    }
    Err(Error::Degenerate(
        "no union of orbits is universal".to_string(),
    ))
}

/// Visit subsets of orbit indices `>= from` whose sizes add up to `remaining`.
/// The visitor returns `true` to stop.
fn search(
    sizes: &[usize],
    from: usize,
    remaining: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> Result<bool>,
) -> Result<bool> {
    if remaining == 0 {
        return visit(chosen);
    }
    for i in from..sizes.len() {
        if sizes[i] <= remaining {
            chosen.push(i);
            let stop = search(sizes, i + 1, remaining - sizes[i], chosen, visit)?;
            chosen.pop();
            if stop {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Orbit analysis summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub group: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub orbit_sizes: Vec<usize>,
    /// Orbits that are universal on their own.
    pub universal_orbits: Vec<usize>,
    pub minimal_union_size: usize,
    pub minimal_union: Vec<usize>,
    pub lower_bound: usize,
    pub exhaustive: bool,
    /// Smallest outcome tuple of each orbit.
    pub representatives: Vec<Vec<usize>>,
}

pub fn orbit_report(
    group: &RotationGroup,
    meas: &MeasurementSet,
    budget: usize,
    tol: Tolerance,
) -> Result<OrbitReport> {
    let partition = orbit_partition(group, meas, tol)?;
    let targets = dual_vertex_targets(meas, tol)?;
    let mut universal_orbits = Vec::new();
    for (i, o) in partition.orbits.iter().enumerate() {
        let cols: Vec<Vec<f64>> = o.iter().map(reduced_column).collect();
        if covers(&cols, &targets, tol)? {
            universal_orbits.push(i);
        }
    }
    let min = minimal_universal_union(&partition, meas, budget, tol)?;
    Ok(OrbitReport {
        group: group.name.clone(),
        n: meas.len(),
        orbit_sizes: partition.sizes.clone(),
        universal_orbits,
        minimal_union_size: min.size,
        minimal_union: min.orbits,
        lower_bound: min.lower_bound,
        exhaustive: min.exhaustive,
        representatives: partition
            .orbits
            .iter()
            .map(|o| o[0].outcomes.clone())
            .collect(),
    })
}

/// Multiset of orbit sizes as `size -> count`.
pub fn size_histogram(sizes: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &s in sizes {
        *h.entry(s).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn check_group_axioms(g: &RotationGroup) {
        let t = 1e-9;
        assert!(contains(&g.elements, &IDENTITY3, t));
        for a in &g.elements {
            assert!((linalg::mat3_det(a) - 1.0).abs() < t);
            assert!(linalg::mat3_distance(&linalg::mat3_mul(a, &linalg::mat3_transpose(a)), &IDENTITY3) < t);
            assert!(contains(&g.elements, &linalg::mat3_transpose(a), t));
            for b in &g.elements {
                assert!(contains(&g.elements, &linalg::mat3_mul(a, b), 1e-7));
            }
        }
    }

    #[test]
    fn group_orders_and_axioms() {
        let o = generate_group("octahedral", tol()).unwrap();
        assert_eq!(o.order(), 24);
        check_group_axioms(&o);
        let i = generate_group("icosahedral", tol()).unwrap();
        assert_eq!(i.order(), 60);
        check_group_axioms(&i);
        assert_eq!(generate_group("trivial", tol()).unwrap().order(), 1);
        assert!(generate_group("tetra", tol()).is_err());
    }

    #[test]
    fn closure_is_idempotent() {
        let o = generate_group("octahedral", tol()).unwrap();
        assert_eq!(closure("again", &o.elements, tol()).order(), 24);
    }

    #[test]
    fn induced_permutations() {
        let oct = presets::octahedron();
        assert_eq!(
            induced_signed_permutation(&IDENTITY3, &oct, tol()).unwrap(),
            SignedPermutation::identity(3)
        );
        let quarter: Mat3 = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        let sp = induced_signed_permutation(&quarter, &oct, tol()).unwrap();
        assert_eq!(sp.perm, vec![1, 0, 2]);
        assert_eq!(sp.signs, vec![1, -1, 1]);
        let c = 0.5;
        let s = 3f64.sqrt() / 2.0;
        let third = linalg::rotation_from_axis([1.0, 1.0, 1.0], -c, s);
        let sp = induced_signed_permutation(&third, &oct, tol()).unwrap();
        assert_eq!(sp.perm, vec![1, 2, 0]);
        assert_eq!(sp.signs, vec![1, 1, 1]);
        let tilt = linalg::rotation_from_axis([0.0, 0.0, 1.0], 0.8, 0.6);
        assert_eq!(
            induced_signed_permutation(&tilt, &oct, tol()),
            Err(Error::NotASymmetry)
        );
    }

    #[test]
    fn state_actions() {
        let s = DeterministicHVState::new(vec![0, 1, 0]);
        assert_eq!(act_on_state(&SignedPermutation::identity(3), &s), s);
        let flip = SignedPermutation {
            perm: vec![0, 1, 2],
            signs: vec![-1; 3],
        };
        assert_eq!(act_on_state(&flip, &s).outcomes, vec![1, 0, 1]);
        let cyc = SignedPermutation {
            perm: vec![1, 2, 0],
            signs: vec![1; 3],
        };
        let s = DeterministicHVState::from_reduced_bits(&[1, 0, 0]);
        assert_eq!(act_on_state(&cyc, &s).reduced_bits(), vec![0, 1, 0]);
    }

    #[test]
    fn icosahedron_orbits() {
        let g = generate_group("icosahedral", tol()).unwrap();
        let ico = presets::icosahedron();
        let p = orbit_partition(&g, &ico, tol()).unwrap();
        assert_eq!(p.sizes, vec![12, 12, 20, 20]);
        let universal: Vec<bool> = p
            .orbits
            .iter()
            .map(|o| is_universal(o, &ico, tol()).unwrap())
            .collect();
        assert_eq!(universal.iter().filter(|&&u| u).count(), 1);
        assert!(!universal[0] && !universal[1]);
        let min = minimal_universal_union(&p, &ico, 1000, tol()).unwrap();
        assert_eq!(min.size, 20);
        assert_eq!(min.lower_bound, 12);
    }

    #[test]
    fn trivial_group_gives_singletons() {
        let g = generate_group("trivial", tol()).unwrap();
        let p = orbit_partition(&g, &presets::octahedron(), tol()).unwrap();
        assert_eq!(p.sizes, vec![1; 8]);
        let all: Vec<DeterministicHVState> = p.union(&(0..8).collect::<Vec<_>>());
        assert!(is_universal(&all, &presets::octahedron(), tol()).unwrap());
        let min = minimal_universal_union(&p, &presets::octahedron(), 1000, tol()).unwrap();
        assert_eq!(min.size, 8);
    }

    #[test]
    fn octahedral_group_on_octahedron() {
        let g = generate_group("octahedral", tol()).unwrap();
        let oct = presets::octahedron();
        let r = orbit_report(&g, &oct, 1000, tol()).unwrap();
        assert_eq!(r.orbit_sizes, vec![8]);
        assert_eq!(r.minimal_union_size, 8);
        let cube = presets::cube();
        let p = orbit_partition(&g, &cube, tol()).unwrap();
        assert_eq!(p.total(), 16);
        for s in &p.sizes {
            assert_eq!(24 % s, 0);
        }
    }

    #[test]
    fn icosahedral_group_rejects_octahedron() {
        let g = generate_group("icosahedral", tol()).unwrap();
        assert_eq!(
            orbit_partition(&g, &presets::octahedron(), tol()),
            Err(Error::NotASymmetry)
        );
    }

    #[test]
    fn equivariance_on_dual_vertices() {
        let g = generate_group("icosahedral", tol()).unwrap();
        let ico = presets::icosahedron();
        let h = polytope::build_hrep(&ico, tol()).unwrap();
        let v = polytope::enumerate_vertices(&h, tol()).unwrap();
        for rot in g.elements.iter().step_by(7) {
            let sp = induced_signed_permutation(rot, &ico, tol()).unwrap();
            for y in &v.vertices {
                let hy = vertex_to_hv_state(y, &ico, tol()).unwrap();
                let gy = linalg::mat3_apply(rot, y);
                let hgy = vertex_to_hv_state(&gy, &ico, tol()).unwrap();
                assert!(linalg::max_abs_diff(&hgy.probs, &act_on_probs(&sp, &hy.probs)) < 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn action_is_a_homomorphism(a in 0usize..60, b in 0usize..60, bits in 0usize..64) {
            let g = generate_group("icosahedral", tol()).unwrap();
            let ico = presets::icosahedron();
            let sa = induced_signed_permutation(&g.elements[a], &ico, tol()).unwrap();
            let sb = induced_signed_permutation(&g.elements[b], &ico, tol()).unwrap();
            let ab = linalg::mat3_mul(&g.elements[a], &g.elements[b]);
            let sab = induced_signed_permutation(&ab, &ico, tol()).unwrap();
            prop_assert_eq!(&sa.compose(&sb), &sab);
            let s = unpack(bits, 6);
            prop_assert_eq!(act_on_state(&sab, &s), act_on_state(&sa, &act_on_state(&sb, &s)));
        }
    }
}
