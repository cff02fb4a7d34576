//! JSON input files: measurement specs, ray sets and model files.

use std::fs;
use std::path::Path;

use hvforge_core::bloch::{state_to_bloch, BlochVector, HermitianOperator, MeasurementSet};
use hvforge_core::hv::HVModel;
use hvforge_core::linalg::normalized;
use hvforge_core::verify::RaySet;
use hvforge_core::{presets, Tolerance};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Bundled copy of the Peres ray set with its derived triads.
pub const PERES33_JSON: &str = include_str!("../data/peres33.json");

/// Rows of `[re, im]` pairs.
pub type ComplexMatrix = Vec<Vec<[f64; 2]>>;

/// Exactly one of `preset`, `directions` (qubit), `frames` (outcome Bloch
/// vectors, general `d`) or `povm` (one list of elements per measurement).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm: Option<Vec<Vec<ComplexMatrix>>>,
}

/// What a spec resolves to.
#[derive(Debug, Clone)]
pub enum Resolved {
    Measurements(MeasurementSet),
    Rays(RaySet),
}

impl Resolved {
    /// Measurement set, using one qutrit measurement per triad for ray sets.
    pub fn into_measurements(self, tol: Tolerance) -> CliResult<MeasurementSet> {
        match self {
            Resolved::Measurements(m) => Ok(m),
            Resolved::Rays(r) => Ok(r.triad_measurements(tol)?),
        }
    }
}

pub fn preset(name: &str) -> CliResult<Resolved> {
    Ok(match name {
        "octahedron" => Resolved::Measurements(presets::octahedron()),
        "cube" => Resolved::Measurements(presets::cube()),
        "icosahedron" => Resolved::Measurements(presets::icosahedron()),
        "dodecahedron" => Resolved::Measurements(presets::dodecahedron()),
        "trine" => Resolved::Measurements(presets::trine()),
        "peres33" => Resolved::Rays(bundled_peres33()?),
        other => {
            return Err(CliError::parse(format!(
                "unknown preset '{other}' (known: {})",
                presets::NAMES.join(", ")
            )))
        }
    })
}

pub fn bundled_peres33() -> CliResult<RaySet> {
    let file: RaySetFile = serde_json::from_str(PERES33_JSON).map_err(|source| CliError::Json {
        path: "bundled peres33.json".into(),
        source,
    })?;
    file.resolve(Tolerance::default())
}

fn complex_matrix(m: &ComplexMatrix, tol: Tolerance) -> CliResult<HermitianOperator> {
    let d = m.len();
    if m.iter().any(|row| row.len() != d) {
        return Err(CliError::parse("POVM element is not a square matrix"));
    }
    let data = m
        .iter()
        .flat_map(|row| row.iter().map(|[re, im]| Complex64::new(*re, *im)))
        .collect();
    Ok(HermitianOperator::new(d, data, tol.eps.max(1e-12))?)
}

impl MeasurementSpecFile {
    pub fn resolve(&self, tol: Tolerance) -> CliResult<Resolved> {
        let given = [
            self.preset.is_some(),
            self.directions.is_some(),
            self.frames.is_some(),
            self.povm.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if given != 1 {
            return Err(CliError::parse(
                "spec needs exactly one of \"preset\", \"directions\", \"frames\" or \"povm\"",
            ));
        }
        if let Some(name) = &self.preset {
            return preset(name);
        }
        if let Some(dirs) = &self.directions {
            if let Some(d) = self.d {
                if d != 2 {
                    return Err(CliError::parse("\"directions\" describe qubit measurements; use d = 2"));
                }
            }
            return Ok(Resolved::Measurements(MeasurementSet::qubit_directions(dirs, tol)?));
        }
        if let Some(frames) = &self.frames {
            let d = self
                .d
                .ok_or_else(|| CliError::parse("\"frames\" needs the dimension \"d\""))?;
            return Ok(Resolved::Measurements(MeasurementSet::projective(
                d,
                frames.clone(),
                tol,
            )?));
        }
        let povms = self.povm.as_ref().expect("one field is set");
        let ops: Vec<Vec<HermitianOperator>> = povms
            .iter()
            .map(|elems| elems.iter().map(|m| complex_matrix(m, tol)).collect())
            .collect::<CliResult<_>>()?;
        if let (Some(d), Some(first)) = (self.d, ops.first().and_then(|p| p.first())) {
            if first.d() != d {
                return Err(CliError::parse(format!(
                    "\"d\" is {d} but POVM elements are {}x{}",
                    first.d(),
                    first.d()
                )));
            }
        }
        Ok(Resolved::Measurements(MeasurementSet::from_povms(&ops, tol)?))
    }
}

/// Rays need not be normalized; triads are derived when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySetFile {
    pub vectors: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triads: Option<Vec<[usize; 3]>>,
}

impl RaySetFile {
    pub fn resolve(&self, tol: Tolerance) -> CliResult<RaySet> {
        let mut vectors = Vec::with_capacity(self.vectors.len());
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != 3 || v.iter().all(|c| *c == 0.0) {
                return Err(CliError::parse(format!("ray {i} must be a nonzero 3-vector")));
            }
            vectors.push(normalized(v));
        }
        Ok(match &self.triads {
            Some(t) => RaySet::new(vectors, t.clone(), tol)?,
            None => RaySet::with_derived_triads(vectors, tol)?,
        })
    }
}

impl From<&RaySet> for RaySetFile {
    fn from(r: &RaySet) -> Self {
        Self {
            vectors: r.vectors.clone(),
            triads: Some(r.triads.clone()),
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_spec(path: &Path, tol: Tolerance) -> CliResult<Resolved> {
    let spec: MeasurementSpecFile = parse_json(path, &read(path)?)?;
    spec.resolve(tol)
}

pub fn load_rays(path: &Path, tol: Tolerance) -> CliResult<RaySet> {
    let f: RaySetFile = parse_json(path, &read(path)?)?;
    f.resolve(tol)
}

/// Reads a model file and re-validates its states against its measurements.
pub fn load_model(path: &Path, tol: Tolerance) -> CliResult<HVModel> {
    let m: HVModel = parse_json(path, &read(path)?)?;
    if m.d != m.measurements.d() || m.n != m.measurements.len() {
        return Err(CliError::parse(format!(
            "{}: header (d={}, N={}) disagrees with the measurement set",
            path.display(),
            m.d,
            m.n
        )));
    }
    let checked = HVModel::from_states(m.measurements.clone(), m.states.clone(), m.provenance.clone(), tol)?;
    if checked.kind != m.kind {
        return Err(CliError::parse(format!(
            "{}: kind is {:?} but the states are {:?}",
            path.display(),
            m.kind,
            checked.kind
        )));
    }
    Ok(checked)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("model types serialize");
    fs::write(path, text + "\n").map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn basis_ket(d: usize, k: usize) -> CliResult<BlochVector> {
    if k >= d {
        return Err(CliError::parse(format!("ket index {k} out of range for d = {d}")));
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); d];
    psi[k] = Complex64::new(1.0, 0.0);
    Ok(state_to_bloch(&HermitianOperator::from_ket(&psi), Tolerance::default())?)
}

/// A Bloch vector from `x,y,...` coordinates or a name: `+x`, `-x`, `+y`,
/// `-y`, `+z`, `-z` (qubit), `mixed`, or `ket:K` for a computational basis
/// state.
pub fn parse_state(text: &str, d: usize) -> CliResult<BlochVector> {
    let t = text.trim();
    let axis = |i: usize, s: f64| {
        let mut c = [0.0; 3];
        c[i] = s;
        BlochVector::qubit(c[0], c[1], c[2])
    };
    let named = match t {
        "+x" | "x" => Some((0, 1.0)),
        "-x" => Some((0, -1.0)),
        "+y" | "y" => Some((1, 1.0)),
        "-y" => Some((1, -1.0)),
        "+z" | "z" => Some((2, 1.0)),
        "-z" => Some((2, -1.0)),
        _ => None,
    };
    if let Some((i, s)) = named {
        if d != 2 {
            return Err(CliError::parse(format!("'{t}' names a qubit state; the model has d = {d}")));
        }
        return Ok(axis(i, s));
    }
    if t == "mixed" {
        return Ok(BlochVector::zero(d)?);
    }
    if let Some(k) = t.strip_prefix("ket:") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::parse(format!("bad ket index in '{t}'")))?;
        return basis_ket(d, k);
    }
    let coords: Vec<f64> = t
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::parse(format!("cannot parse state '{t}'")))?;
    Ok(BlochVector::new(d, coords)?)
}

/// Comma-separated list of bit strings such as `111,100`.
pub fn parse_bit_strings(text: &str) -> CliResult<Vec<Vec<u8>>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(CliError::parse(format!("'{s}' is not a bit string"))),
                })
                .collect()
        })
        .collect()
}
