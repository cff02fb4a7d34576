//! Named measurement geometries.
//!
//! Coordinates come from closed forms (golden ratio `phi = (1 + sqrt 5)/2` for
//! the icosahedral solids) evaluated in double precision. Qubit presets list
//! one representative `m` per measurement axis, with the first nonzero
//! coordinate positive; the frame is `(m, -m)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent on newer toolchains
use num_traits::Float;

use crate::bloch::{HermitianOperator, MeasurementSet};
use crate::linalg::normalized;
use crate::verify::RaySet;
use crate::Tolerance;

pub const NAMES: [&str; 6] = [
    "octahedron",
    "cube",
    "icosahedron",
    "dodecahedron",
    "trine",
    "peres33",
];

pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn qubit(directions: Vec<[f64; 3]>) -> MeasurementSet {
    let dirs: Vec<Vec<f64>> = directions.iter().map(|v| normalized(v)).collect();
    MeasurementSet::qubit_directions(&dirs, Tolerance::default()).expect("preset is valid")
}

/// Three complementary axes; measurement polytope is the octahedron.
pub fn octahedron_directions() -> Vec<[f64; 3]> {
    vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

/// The four body diagonals `(1, +-1, +-1)/sqrt 3`.
pub fn cube_directions() -> Vec<[f64; 3]> {
    vec![
        [1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [1.0, -1.0, 1.0],
        [1.0, -1.0, -1.0],
    ]
}

/// Six vertex axes of the icosahedron with vertices at cyclic permutations
/// of `(0, +-1, +-phi)`.
pub fn icosahedron_directions() -> Vec<[f64; 3]> {
    let p = golden_ratio();
    vec![
        [0.0, 1.0, p],
        [0.0, 1.0, -p],
        [1.0, p, 0.0],
        [1.0, -p, 0.0],
        [p, 0.0, 1.0],
        [p, 0.0, -1.0],
    ]
}

/// Ten vertex axes of the dodecahedron dual to the icosahedron preset:
/// `(+-1, +-1, +-1)` and cyclic permutations of `(0, +-phi, +-1/phi)`.
pub fn dodecahedron_directions() -> Vec<[f64; 3]> {
    let p = golden_ratio();
    let q = 1.0 / p;
    vec![
        [1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [1.0, -1.0, 1.0],
        [1.0, -1.0, -1.0],
        [0.0, p, q],
        [0.0, p, -q],
        [q, 0.0, p],
        [q, 0.0, -p],
        [p, q, 0.0],
        [p, -q, 0.0],
    ]
}

pub fn octahedron() -> MeasurementSet {
    qubit(octahedron_directions())
}

pub fn cube() -> MeasurementSet {
    qubit(cube_directions())
}

pub fn icosahedron() -> MeasurementSet {
    qubit(icosahedron_directions())
}

pub fn dodecahedron() -> MeasurementSet {
    qubit(dodecahedron_directions())
}

/// Projector onto the normalized real ket.
pub fn ket_projector(ket: &[f64]) -> HermitianOperator {
    let n = ket.iter().map(|c| c * c).sum::<f64>().sqrt();
    let psi: Vec<Complex64> = ket.iter().map(|&c| Complex64::new(c / n, 0.0)).collect();
    HermitianOperator::from_ket(&psi)
}

/// Trine POVM: `(2/3)|psi_k><psi_k|` with Bloch vectors at 0, 120 and 240
/// degrees in the x-z plane.
pub fn trine_elements() -> Vec<HermitianOperator> {
    let s3 = 3f64.sqrt() / 2.0;
    // half-angles 0, 60 and 120 degrees
    [[1.0, 0.0], [0.5, s3], [-0.5, s3]]
        .iter()
        .map(|k| ket_projector(k).scale(2.0 / 3.0))
        .collect()
}

pub fn trine() -> MeasurementSet {
    MeasurementSet::from_povms(&[trine_elements()], Tolerance::default()).expect("preset is valid")
}

/// Computational-basis measurement on a qutrit.
pub fn qutrit_computational() -> MeasurementSet {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let frame = vec![vec![o, z, z], vec![z, o, z], vec![z, z, o]];
    MeasurementSet::from_kets(&[frame], Tolerance::default()).expect("preset is valid")
}

/// Peres' 33 rays in R^3, one per ray with the first nonzero component
/// positive: the permutations and sign changes of `(0,0,1)`, `(0,1,1)`,
/// `(0,1,sqrt 2)` and `(1,1,sqrt 2)`. Triads are derived by scanning for
/// mutually orthogonal triples.
pub fn peres33() -> RaySet {
    RaySet::with_derived_triads(peres33_vectors(), Tolerance::default())
        .expect("Peres rays are unit vectors")
}

pub fn peres33_vectors() -> Vec<Vec<f64>> {
    let r2 = 2f64.sqrt();
    let patterns: [[f64; 3]; 4] = [[0.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.0, 1.0, r2], [1.0, 1.0, r2]];
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut rays: Vec<Vec<f64>> = Vec::new();
    for pat in patterns {
        for perm in perms {
            for signs in 0..8u8 {
                let v: Vec<f64> = (0..3)
                    .map(|i| {
                        let s = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
                        s * pat[perm[i]]
                    })
                    .collect();
                let first = v.iter().copied().find(|c| *c != 0.0).unwrap();
                if first < 0.0 {
                    continue;
                }
                let u = normalized(&v);
                if !rays
                    .iter()
                    .any(|r| crate::linalg::distance(r, &u) < 1e-12)
                {
                    rays.push(u);
                }
            }
        }
    }
    rays
}
