//! Subcommands. Each returns a [`Report`] holding both renderings and the
//! exit code; `main` picks the rendering.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hvforge_core::bloch::{preparation_vector, BlochVector};
use hvforge_core::hv::{build_universal_model, decompose_preparation, reconstruct, BoundsReport, HVModel};
use hvforge_core::linalg::max_abs_diff;
use hvforge_core::symmetry::{generate_group, orbit_report};
use hvforge_core::verify::{
    contextuality_witness, convergence_study, ks_noncontextual_search, sample_outcomes,
    seeded_pure_states, verify_exact, RaySet,
};
use hvforge_core::Tolerance;
use serde_json::{json, Value};

use crate::error::{exit, CliError, CliResult};
use crate::formats::{self, Resolved};
use crate::table::{fmt_f, fmt_opt_bool, Table};

#[derive(Debug, Parser)]
#[command(
    name = "hvforge",
    version,
    about = "Hidden-variable models reproducing the statistics of finite sets of quantum measurements"
)]
pub struct Cli {
    /// Output rendering.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Feasibility tolerance.
    #[arg(long, env = "HVFORGE_TOL", default_value_t = Tolerance::DEFAULT_EPS, global = true)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a preparation-universal model from the constraint polytope.
    Build(BuildArgs),
    /// Orbit partition of the deterministic states under a rotation group.
    Orbits(OrbitsArgs),
    /// Convex weights of one state over a model.
    Decompose(DecomposeArgs),
    /// Exact reconstruction check of a model on a batch of states.
    Verify(VerifyArgs),
    /// Monte Carlo run of a model on one state.
    Simulate(SimulateArgs),
    /// Kochen-Specker search and contextuality witness on a ray set.
    Ks(KsArgs),
    /// Largest constraint-polytope vertex norm for random direction sets.
    Converge(ConvergeArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Named geometry: octahedron, cube, icosahedron, dodecahedron, trine, peres33.
    #[arg(long)]
    pub preset: Option<String>,
    /// Measurement spec file.
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
}

impl Source {
    fn resolve(&self, tol: Tolerance) -> CliResult<Resolved> {
        match (&self.preset, &self.spec) {
            (Some(p), _) => formats::preset(p),
            (_, Some(f)) => formats::load_spec(f, tol),
            _ => Err(CliError::parse("need --preset or --spec")),
        }
    }

    fn label(&self) -> String {
        match (&self.preset, &self.spec) {
            (Some(p), _) => p.clone(),
            (_, Some(f)) => f.display().to_string(),
            _ => String::new(),
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub source: Source,
    /// Expand every vertex state into deterministic states.
    #[arg(long)]
    pub deterministic: bool,
    /// Keep only these qubit states, as reduced bit strings (e.g. 111,100).
    #[arg(long, value_name = "BITS")]
    pub keep: Option<String>,
    /// Reverse the outcome order of these measurements first (m -> -m).
    #[arg(long, value_delimiter = ',', value_name = "N,...")]
    pub flip: Vec<usize>,
    /// Where to write the model JSON.
    #[arg(short, long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OrbitsArgs {
    #[command(flatten)]
    pub source: Source,
    /// octahedral, icosahedral or trivial.
    #[arg(long)]
    pub group: String,
    /// Largest number of orbit unions to test.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// Bloch coordinates `x,y,...`, or +x/-x/+y/-y/+z/-z, mixed, ket:K.
    #[arg(long, allow_hyphen_values = true)]
    pub state: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// Explicit states; may be repeated.
    #[arg(long, allow_hyphen_values = true)]
    pub state: Vec<String>,
    /// Include the six Pauli eigenstates (qubit models).
    #[arg(long)]
    pub eigenstates: bool,
    /// Number of random pure states.
    #[arg(long, default_value_t = 100)]
    pub random: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest acceptable deviation.
    #[arg(long, default_value_t = 1e-9)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model file; otherwise the indeterministic model of --preset/--spec.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["preset", "spec"])]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub state: String,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct KsArgs {
    #[arg(long, conflicts_with = "rays")]
    pub preset: Option<String>,
    /// Ray set file.
    #[arg(long, value_name = "FILE")]
    pub rays: Option<PathBuf>,
    /// Also build the triad-measurement model and look for context-dependent
    /// assignments in it.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long = "n", value_delimiter = ',', default_values_t = [5, 10, 20, 50])]
    pub n_values: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Rendered command output.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub table: String,
    pub code: i32,
}

impl Report {
    fn ok(json: Value, table: String) -> Self {
        Self {
            json,
            table,
            code: exit::OK,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("json values serialize") + "\n",
            Format::Table => self.table.clone(),
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::parse(format!("tolerance must be positive, got {}", cli.tol)));
    }
    let tol = Tolerance::with_eps(cli.tol);
    match &cli.command {
        Command::Build(a) => build(a, tol),
        Command::Orbits(a) => orbits(a, tol),
        Command::Decompose(a) => decompose(a, tol),
        Command::Verify(a) => verify(a, tol),
        Command::Simulate(a) => simulate(a, tol),
        Command::Ks(a) => ks(a, tol),
        Command::Converge(a) => converge(a, tol),
    }
}

fn state_label(model: &HVModel, i: usize) -> String {
    let s = &model.states[i];
    let sizes = model.sizes();
    if let Some(det) = hvforge_core::hv::DeterministicHVState::from_indicator(s, &sizes, 1e-12) {
        if sizes.iter().all(|&k| k == 2) {
            return det.reduced_bits().iter().map(|b| char::from(b'0' + b)).collect();
        }
        let parts: Vec<String> = det.outcomes.iter().map(usize::to_string).collect();
        return format!("({})", parts.join(","));
    }
    if sizes.iter().all(|&k| k == 2) {
        let parts: Vec<String> = s.iter().step_by(2).map(|&p| format!("{p:.4}")).collect();
        return format!("[{}]", parts.join(" "));
    }
    "-".into()
}

fn bounds_table(b: &BoundsReport) -> Table {
    let mut t = Table::new(["bound", "values", "holds"]);
    if let (Some((lo, hi)), Some(f)) = (b.facet_range, b.facets) {
        t.row([
            "N+2 <= F <= 4(N-1)".to_string(),
            format!("{lo} <= {f} <= {hi}"),
            fmt_opt_bool(b.facet_range_holds),
        ]);
    }
    if let (Some(h), Some(f)) = (b.l_le_f, b.facets) {
        t.row(["L <= F".to_string(), format!("{} <= {f}", b.l), fmt_opt_bool(Some(h))]);
    }
    if let (Some(h), Some(f)) = (b.l_le_n2_f, b.facets) {
        t.row([
            "L <= (N-2)F".to_string(),
            format!("{} <= {}", b.l, (b.n - 2) * f),
            fmt_opt_bool(Some(h)),
        ]);
    }
    t.row([
        "vertices <= McMullen".to_string(),
        format!("{} <= {}", b.dual_vertices, b.mcmullen_bound),
        fmt_opt_bool(Some(b.mcmullen_holds)),
    ]);
    if let (Some(e), Some(h)) = (b.max_expansion, b.expansion_le_n_minus_2) {
        t.row([
            "expansion <= N-2".to_string(),
            format!("{e} <= {}", b.n - 2),
            fmt_opt_bool(Some(h)),
        ]);
    }
    t
}

fn build(a: &BuildArgs, tol: Tolerance) -> CliResult<Report> {
    let mut meas = a.source.resolve(tol)?.into_measurements(tol)?;
    if !a.flip.is_empty() {
        meas = meas.with_reversed_outcomes(&a.flip)?;
    }
    let mut model = build_universal_model(&meas, a.deterministic, tol)?;
    let bounds = model.provenance.bounds.clone();
    if let Some(keep) = &a.keep {
        model = model.select_reduced(&formats::parse_bit_strings(keep)?, tol)?;
        model.provenance.bounds = bounds.clone();
    }
    if let Some(out) = &a.out {
        formats::write_json(out, &model)?;
    }

    let mut kv = Table::key_value();
    kv.row(["source".to_string(), a.source.label()])
        .row(["d".to_string(), model.d.to_string()])
        .row(["N".to_string(), model.n.to_string()])
        .row(["kind".to_string(), format!("{:?}", model.kind).to_lowercase()])
        .row(["L".to_string(), model.len().to_string()]);
    if let Some(b) = &bounds {
        kv.row(["dual vertices".to_string(), b.dual_vertices.to_string()]);
        if let Some(f) = b.facets {
            kv.row(["F".to_string(), f.to_string()]);
        }
    }
    if let Some(out) = &a.out {
        kv.row(["written".to_string(), out.display().to_string()]);
    }
    let mut states = Table::new(["index", "state"]);
    for i in 0..model.len().min(64) {
        states.row([i.to_string(), state_label(&model, i)]);
    }
    let mut text = kv.render();
    if let Some(b) = &bounds {
        text.push('\n');
        text.push_str(&bounds_table(b).render());
    }
    text.push('\n');
    text.push_str(&states.render());
    if model.len() > 64 {
        text.push_str(&format!("... {} more\n", model.len() - 64));
    }

    let json = json!({
        "source": a.source.label(),
        "d": model.d,
        "N": model.n,
        "kind": model.kind,
        "L": model.len(),
        "route": model.provenance.route,
        "bounds": bounds,
        "bounds_hold": bounds.as_ref().map(BoundsReport::all_hold),
        "out": a.out.as_ref().map(|p| p.display().to_string()),
    });
    Ok(Report::ok(json, text))
}

fn orbits(a: &OrbitsArgs, tol: Tolerance) -> CliResult<Report> {
    let meas = a.source.resolve(tol)?.into_measurements(tol)?;
    let group = generate_group(&a.group, tol)?;
    let r = orbit_report(&group, &meas, a.budget, tol)?;
    let mut t = Table::new(["orbit", "size", "representative", "universal"]);
    for (i, (s, rep)) in r.orbit_sizes.iter().zip(&r.representatives).enumerate() {
        let bits: String = rep.iter().map(|&o| if o == 0 { '1' } else { '0' }).collect();
        t.row([
            i.to_string(),
            s.to_string(),
            bits,
            if r.universal_orbits.contains(&i) { "yes" } else { "" }.to_string(),
        ]);
    }
    let mut kv = Table::key_value();
    kv.row(["group".to_string(), format!("{} ({} rotations)", r.group, group.order())])
        .row(["N".to_string(), r.n.to_string()])
        .row(["states".to_string(), r.orbit_sizes.iter().sum::<usize>().to_string()])
        .row(["orbits".to_string(), r.orbit_sizes.len().to_string()])
        .row(["minimal union size".to_string(), r.minimal_union_size.to_string()])
        .row([
            "minimal union orbits".to_string(),
            r.minimal_union.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        ])
        .row(["smallest orbit".to_string(), r.lower_bound.to_string()])
        .row(["exhaustive".to_string(), r.exhaustive.to_string()]);
    let text = format!("{}\n{}", kv.render(), t.render());
    let json = serde_json::to_value(&r).expect("report serializes");
    Ok(Report::ok(json, text))
}

fn decompose(a: &DecomposeArgs, tol: Tolerance) -> CliResult<Report> {
    let model = formats::load_model(&a.model, tol)?;
    let x = formats::parse_state(&a.state, model.d)?;
    let p = preparation_vector(&model.measurements, &x)?;
    let w = decompose_preparation(&p, &model, tol)?;
    let residual = max_abs_diff(&reconstruct(&w, &model.states), &p.probs);
    let mut t = Table::new(["index", "weight", "state"]);
    let mut support = Vec::new();
    for (i, &wi) in w.iter().enumerate() {
        if wi > tol.eps {
            t.row([i.to_string(), fmt_f(wi), state_label(&model, i)]);
            support.push(json!({"index": i, "weight": wi, "state": state_label(&model, i)}));
        }
    }
    let text = format!(
        "{}\nweights sum {}, reconstruction residual {}\n",
        t.render().trim_end(),
        fmt_f(w.iter().sum()),
        fmt_f(residual)
    );
    let json = json!({
        "state": x.coords(),
        "weights": w,
        "support": support,
        "residual": residual,
    });
    Ok(Report::ok(json, text))
}

fn eigenstates() -> Vec<BlochVector> {
    let mut v = Vec::new();
    for i in 0..3 {
        for s in [1.0, -1.0] {
            let mut c = [0.0; 3];
            c[i] = s;
            v.push(BlochVector::qubit(c[0], c[1], c[2]));
        }
    }
    v
}

fn verify(a: &VerifyArgs, tol: Tolerance) -> CliResult<Report> {
    let model = formats::load_model(&a.model, tol)?;
    let mut states = Vec::new();
    for s in &a.state {
        states.push(formats::parse_state(s, model.d)?);
    }
    if a.eigenstates {
        if model.d != 2 {
            return Err(CliError::parse("--eigenstates needs a qubit model"));
        }
        states.extend(eigenstates());
    }
    states.extend(seeded_pure_states(model.d, a.random, a.seed));
    let dev = verify_exact(&model, &states, tol)?;
    let pass = dev <= a.threshold;
    let mut kv = Table::key_value();
    kv.row(["states".to_string(), states.len().to_string()])
        .row(["max deviation".to_string(), fmt_f(dev)])
        .row(["threshold".to_string(), fmt_f(a.threshold)])
        .row(["pass".to_string(), pass.to_string()]);
    let json = json!({
        "states": states.len(),
        "max_abs_deviation": dev,
        "threshold": a.threshold,
        "pass": pass,
    });
    Ok(Report {
        json,
        table: kv.render(),
        code: if pass { exit::OK } else { exit::STATISTICAL_FLAG },
    })
}

fn simulate(a: &SimulateArgs, tol: Tolerance) -> CliResult<Report> {
    let model = match (&a.model, &a.preset, &a.spec) {
        (Some(f), _, _) => formats::load_model(f, tol)?,
        (None, Some(p), _) => build_universal_model(&formats::preset(p)?.into_measurements(tol)?, false, tol)?,
        (None, None, Some(f)) => {
            build_universal_model(&formats::load_spec(f, tol)?.into_measurements(tol)?, false, tol)?
        }
        _ => return Err(CliError::parse("need --model, --preset or --spec")),
    };
    let x = formats::parse_state(&a.state, model.d)?;
    let r = sample_outcomes(&model, &x, a.trials, a.seed, tol)?;
    let mut t = Table::new(["measurement", "outcome", "count", "frequency", "born", "z"]);
    for n in 0..r.counts.len() {
        for k in 0..r.counts[n].len() {
            t.row([
                n.to_string(),
                k.to_string(),
                r.counts[n][k].to_string(),
                fmt_f(r.frequencies[n][k]),
                fmt_f(r.born[n][k]),
                format!("{:.3}", r.z_scores[n][k]),
            ]);
        }
    }
    let text = format!(
        "{}\ntrials {}, seed {}, max |freq - p| {}, flagged {}\n",
        t.render().trim_end(),
        r.trials,
        r.seed,
        fmt_f(r.max_abs_deviation),
        r.flagged
    );
    let code = if r.flagged { exit::STATISTICAL_FLAG } else { exit::OK };
    let json = serde_json::to_value(&r).map_err(|e| CliError::parse(e.to_string()))?;
    Ok(Report { json, table: text, code })
}

fn ks(a: &KsArgs, tol: Tolerance) -> CliResult<Report> {
    let rays: RaySet = match (&a.preset, &a.rays) {
        (Some(p), _) => match formats::preset(p)? {
            Resolved::Rays(r) => r,
            Resolved::Measurements(_) => {
                return Err(CliError::parse(format!("preset '{p}' is not a ray set")))
            }
        },
        (None, Some(f)) => formats::load_rays(f, tol)?,
        _ => return Err(CliError::parse("need --preset or --rays")),
    };
    let assignment = ks_noncontextual_search(&rays, tol);
    let mut kv = Table::key_value();
    kv.row(["rays".to_string(), rays.len().to_string()])
        .row(["triads".to_string(), rays.triads.len().to_string()])
        .row(["orthogonal pairs".to_string(), rays.orthogonal_pairs(tol).len().to_string()])
        .row([
            "result".to_string(),
            match &assignment {
                None => "no non-contextual assignment".to_string(),
                Some(_) => "non-contextual assignment found".to_string(),
            },
        ]);
    let mut json = json!({
        "rays": rays.len(),
        "triads": rays.triads.len(),
        "noncontextual_assignment": assignment,
    });
    if a.witness {
        let meas = rays.triad_measurements(tol)?;
        let model = build_universal_model(&meas, true, tol)?;
        let w = contextuality_witness(&model, &rays)?;
        kv.row(["model L".to_string(), model.len().to_string()])
            .row(["shared rays".to_string(), w.shared_rays.len().to_string()])
            .row(["context-dependent instances".to_string(), w.instances.len().to_string()]);
        if let Some(first) = w.instances.first() {
            let vals: Vec<String> = first
                .values
                .iter()
                .map(|(t, v)| format!("triad {t}: {v}"))
                .collect();
            kv.row([
                "example".to_string(),
                format!("state {} ray {}: {}", first.state, first.ray, vals.join(", ")),
            ]);
        }
        json["witness"] = json!({
            "model_states": model.len(),
            "shared_rays": w.shared_rays,
            "instances": w.instances.len(),
            "examples": w.instances.iter().take(10).collect::<Vec<_>>(),
        });
    }
    Ok(Report::ok(json, kv.render()))
}

fn converge(a: &ConvergeArgs, tol: Tolerance) -> CliResult<Report> {
    let rows = convergence_study(&a.n_values, a.samples, a.seed, tol)?;
    let mut t = Table::new(["N", "samples", "mean", "min", "max"]);
    for r in &rows {
        t.row([
            r.n.to_string(),
            r.samples.to_string(),
            fmt_f(r.mean),
            fmt_f(r.min),
            fmt_f(r.max),
        ]);
    }
    let decreasing = rows.windows(2).all(|w| w[1].mean <= w[0].mean);
    let above_one = rows.iter().all(|r| r.min >= 1.0 - 1e-9);
    let text = format!(
        "{}\nmean weakly decreasing: {decreasing}; all norms >= 1: {above_one}\n",
        t.render().trim_end()
    );
    let json = json!({
        "seed": a.seed,
        "rows": rows,
        "weakly_decreasing": decreasing,
        "all_at_least_one": above_one,
    });
    Ok(Report::ok(json, text))
}
