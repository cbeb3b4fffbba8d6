//! The `crn` command line.
//!
//! Exit codes: 0 success or a positive verdict, 1 a negative verdict,
//! 2 usage errors, 3 failed preconditions, 4 an exhausted search.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use crn_core::dynamics::{
    dynamically_equivalent, homogeneous_degree, mass_action_field, projectivize_field, relative_network, wr_realize,
    DynamicsError, Homogeneity, WrBudget,
};
use crn_core::families::{Family, FamilySpec};
use crn_core::linalg::q;
use crn_core::network::print_network;
use crn_core::simulate::{
    integrate, integrate_with_profile, permanence_probe, simplex_initial_points, IntegrateOptions, Outcome,
    PermanenceVerdict, ProbeOptions, RateChoice, SimulateError, Trajectory, VariableRateProfile, Waveform,
};
use crn_core::MassActionSystem;
use serde::Serialize;

use crate::export::{trajectories_csv, trajectories_json};
use crate::io::{read_system, reorder_species, write_atomic, NetworkJson};
use crate::report::{analyze, EquivalenceJson, FieldJson, PermanenceJson, RealizationCertificate, RunJson, SimulationReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;
pub const EXIT_EXHAUSTED: u8 = 4;

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_USAGE, error: e.into() }
}

fn precondition(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_PRECONDITION, error: e.into() }
}

type Outcome2 = Result<u8, Failure>;

#[derive(Debug, Parser)]
#[command(name = "crn", version, about = "Reaction network analysis, projectivization and simulation")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a named family network.
    Generate(GenerateArgs),
    /// Structural and geometric report for a network file.
    Analyze(AnalyzeArgs),
    /// Write the relative-population network.
    Project(ProjectArgs),
    /// Print the mass-action vector field, optionally projectivized.
    Field(FieldArgs),
    /// Test two systems for dynamic equivalence (exit 1 when they differ).
    Equiv(EquivArgs),
    /// Search for a weakly reversible single-linkage-class realization.
    WrRealize(WrRealizeArgs),
    /// Integrate trajectories and optionally probe permanence.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// hypercycle, rep-recomb or recomb.
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    /// Emit the relative-population network instead.
    #[arg(long)]
    pub relative: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// Random directions added to the sampled sweeps.
    #[arg(long, default_value_t = 64)]
    pub directions: usize,
    #[arg(long, env = "CRN_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    pub file: PathBuf,
    /// Print f - x sum(f) instead of f.
    #[arg(long)]
    pub projectivize: bool,
    /// With --projectivize, the homogeneous form f sum(x) - x sum(f).
    #[arg(long, requires = "projectivize")]
    pub homogenized: bool,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    pub first: PathBuf,
    pub second: PathBuf,
}

#[derive(Debug, Args)]
pub struct WrRealizeArgs {
    pub file: PathBuf,
    /// Maximum number of splits; defaults to twice the reaction count.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub node_limit: usize,
    /// Where to write the JSON certificate.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WaveformArg {
    Piecewise,
    Sinusoidal,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub file: PathBuf,
    /// Initial state, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "simplex_random")]
    pub x0: Option<Vec<f64>>,
    /// Start from N points of the open simplex (near-vertex grid, then random).
    #[arg(long, value_name = "N")]
    pub simplex_random: Option<usize>,
    #[arg(long, env = "CRN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Replace every rate by a seeded profile with eps <= k(t) <= 1/eps.
    #[arg(long, value_name = "EPS")]
    pub variable_k: Option<f64>,
    #[arg(long, value_enum, default_value_t = WaveformArg::Piecewise)]
    pub waveform: WaveformArg,
    /// Resampling interval of the piecewise-constant profile.
    #[arg(long, default_value_t = 0.1)]
    pub interval: f64,
    /// Period of the sinusoidal profile.
    #[arg(long, default_value_t = 1.0)]
    pub period: f64,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub atol: f64,
    /// Trajectory file: CSV, or JSON when the name ends in `.json`.
    #[arg(long, conflicts_with = "probe_permanence")]
    pub out: Option<PathBuf>,
    /// Run the empirical permanence probe (exit 1 if persistence fails).
    #[arg(long, conflicts_with = "x0")]
    pub probe_permanence: bool,
    #[arg(long, default_value_t = 0.25)]
    pub window: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub delta_floor: f64,
}

/// Output sink: a file written atomically, or stdout.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, bytes).map_err(precondition),
        None => std::io::stdout().write_all(bytes).context("stdout").map_err(precondition),
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| precondition(anyhow!(e)))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn load(path: &Path) -> Result<MassActionSystem, Failure> {
    read_system(path).map_err(usage)
}

/// Text with rates only when some rate differs from 1.
fn render(sys: &MassActionSystem) -> Result<String, Failure> {
    let rates = sys.constant_rates().map_err(precondition)?;
    if rates.iter().all(|k| *k == q(1)) {
        Ok(print_network(sys.network(), None))
    } else {
        sys.to_text().map_err(precondition)
    }
}

fn system_bytes(sys: &MassActionSystem, json: bool) -> Result<Vec<u8>, Failure> {
    if json {
        json_bytes(&NetworkJson::from_system(sys).map_err(precondition)?)
    } else {
        Ok(render(sys)?.into_bytes())
    }
}

pub fn run(cli: Cli) -> Outcome2 {
    let json = cli.json;
    match cli.command {
        Command::Generate(a) => generate(a, json),
        Command::Analyze(a) => analyze_cmd(a, json),
        Command::Project(a) => project(a, json),
        Command::Field(a) => field(a, json),
        Command::Equiv(a) => equiv(a, json),
        Command::WrRealize(a) => wr(a, json),
        Command::Simulate(a) => simulate(a, json),
    }
}

fn generate(a: GenerateArgs, json: bool) -> Outcome2 {
    let mut spec = FamilySpec::new(a.family, a.n);
    if a.relative {
        spec = spec.relative();
    }
    let sys = spec.system().map_err(usage)?;
    emit(a.out.as_deref(), &system_bytes(&sys, json)?)?;
    Ok(EXIT_OK)
}

fn analyze_cmd(a: AnalyzeArgs, json: bool) -> Outcome2 {
    let sys = load(&a.file)?;
    let report = analyze(sys.network(), a.directions, a.seed);
    let bytes = if json { json_bytes(&report)? } else { report.to_text().into_bytes() };
    emit(None, &bytes)?;
    Ok(EXIT_OK)
}

fn project(a: ProjectArgs, json: bool) -> Outcome2 {
    let sys = load(&a.file)?;
    let rel = relative_network(&sys).map_err(precondition)?;
    emit(a.out.as_deref(), &system_bytes(&rel, json)?)?;
    Ok(EXIT_OK)
}

fn field(a: FieldArgs, json: bool) -> Outcome2 {
    let sys = load(&a.file)?;
    let mut f = mass_action_field(&sys).map_err(precondition)?;
    if a.projectivize {
        let d = match homogeneous_degree(&f) {
            Homogeneity::Degree(d) => d,
            Homogeneity::Zero => 1,
            Homogeneity::Inhomogeneous => return Err(precondition(DynamicsError::Inhomogeneous)),
        };
        f = projectivize_field(&f, d, a.homogenized).map_err(precondition)?;
    }
    let bytes = if json {
        json_bytes(&FieldJson::new(sys.network().species_names(), &f))?
    } else {
        f.to_text().into_bytes()
    };
    emit(None, &bytes)?;
    Ok(EXIT_OK)
}

fn equiv(a: EquivArgs, json: bool) -> Outcome2 {
    let first = load(&a.first)?;
    let second = load(&a.second)?;
    let second = reorder_species(&second, &first.network().species_names()).map_err(precondition)?;
    let report = dynamically_equivalent(&first, &second).map_err(precondition)?;
    let bytes = if json {
        json_bytes(&EquivalenceJson::from(&report))?
    } else {
        let mut text = format!("dynamically equivalent: {}\n", if report.equivalent { "yes" } else { "no" });
        let names = first.network().species_names();
        for v in &report.failing {
            let c = first.network().format_complex(&v.source);
            let r: Vec<String> = v.residual.iter().map(crn_core::network::text::format_rational).collect();
            text += &format!("  at {c}: residual [{}] over ({})\n", r.join(", "), names.join(", "));
        }
        text.into_bytes()
    };
    emit(None, &bytes)?;
    Ok(if report.equivalent { EXIT_OK } else { EXIT_NEGATIVE })
}

fn wr(a: WrRealizeArgs, json: bool) -> Outcome2 {
    let sys = load(&a.file)?;
    let budget = WrBudget { max_splits: a.budget, node_limit: a.node_limit };
    let Some(real) = wr_realize(&sys, budget).map_err(precondition)? else {
        let msg = "no realization found within the budget (this does not prove that none exists)\n";
        if json {
            emit(None, &json_bytes(&serde_json::json!({ "found": false }))?)?;
        } else {
            emit(None, msg.as_bytes())?;
        }
        return Ok(EXIT_EXHAUSTED);
    };
    let cert = RealizationCertificate::new(&sys, &real).map_err(precondition)?;
    if let Some(out) = &a.out {
        emit(Some(out), &json_bytes(&cert)?)?;
    }
    let bytes = if json {
        json_bytes(&cert)?
    } else {
        let mut text = format!(
            "found after {} splits ({} search states); weakly reversible: {}, linkage classes: {}, equivalent: {}\n",
            real.splits.len(),
            real.nodes_explored,
            cert.weakly_reversible,
            cert.linkage_classes,
            cert.equivalent
        );
        text += &render(&real.system)?;
        text.into_bytes()
    };
    emit(None, &bytes)?;
    Ok(EXIT_OK)
}

fn simulate_error(e: SimulateError) -> Failure {
    match e {
        SimulateError::DimensionMismatch { .. } | SimulateError::NonPositiveInitial { .. } | SimulateError::BadOption(_) => {
            usage(e)
        }
        other => precondition(other),
    }
}

fn outcome_text(o: Outcome) -> String {
    match o {
        Outcome::Completed => "completed".into(),
        Outcome::BlowUp { t } => format!("blow-up detected at t = {t:.6}"),
        Outcome::BoundaryApproach { species, t } => format!("x{} below the boundary threshold since t = {t:.6}", species + 1),
    }
}

fn simulate(a: SimulateArgs, json: bool) -> Outcome2 {
    let sys = load(&a.file)?;
    let n = sys.species_count();
    let waveform = match a.waveform {
        WaveformArg::Piecewise => Waveform::PiecewiseConstant { interval: a.interval },
        WaveformArg::Sinusoidal => Waveform::Sinusoidal { period: a.period },
    };
    let profile = a
        .variable_k
        .map(|eps| VariableRateProfile::new(eps, waveform, a.seed))
        .transpose()
        .map_err(usage)?;
    let base = IntegrateOptions { rtol: a.rtol, atol: a.atol, waveform, ..Default::default() };
    let mut report = SimulationReport {
        species: sys.network().species_names(),
        seed: a.seed,
        variable_k: a.variable_k,
        runs: Vec::new(),
        permanence: None,
    };

    if a.probe_permanence {
        let probe = ProbeOptions {
            t_max: a.t_max.unwrap_or(50.0),
            window_fraction: a.window,
            delta_floor: a.delta_floor,
            seed: a.seed,
            integrate: IntegrateOptions { max_step: Some(0.1), ..base },
            ..Default::default()
        };
        let choice = profile.map_or(RateChoice::Constant, RateChoice::Variable);
        let r = permanence_probe(&sys, a.simplex_random.unwrap_or(100), &[choice], &probe).map_err(simulate_error)?;
        let negative = r.verdict != PermanenceVerdict::ConsistentWithPermanence;
        let pj = PermanenceJson::new(&r, a.delta_floor);
        let bytes = if json {
            report.permanence = Some(pj);
            json_bytes(&report)?
        } else {
            let verdict = match r.verdict {
                PermanenceVerdict::ConsistentWithPermanence => "consistent with permanence".to_string(),
                PermanenceVerdict::PersistenceFailureObserved { run, species } => {
                    format!("persistence failure observed (run {run}, x{})", species + 1)
                }
            };
            format!(
                "permanence probe over {} runs: {verdict}\ndelta_hat = {:e} (floor {:e})\nnote: {}\n",
                r.runs.len(),
                r.delta_hat,
                a.delta_floor,
                r.caveat
            )
            .into_bytes()
        };
        emit(None, &bytes)?;
        return Ok(if negative { EXIT_NEGATIVE } else { EXIT_OK });
    }

    let inits = match (&a.x0, a.simplex_random) {
        (Some(x0), _) => {
            if x0.len() != n {
                return Err(usage(anyhow!("--x0 has {} entries but the network has {n} species", x0.len())));
            }
            vec![x0.clone()]
        }
        (None, Some(count)) => simplex_initial_points(n, count, 1e-4, a.seed),
        (None, None) => return Err(usage(anyhow!("give --x0 or --simplex-random N"))),
    };
    let opts = IntegrateOptions { t_max: a.t_max.unwrap_or(10.0), ..base };
    let mut runs: Vec<Trajectory> = Vec::with_capacity(inits.len());
    for x0 in &inits {
        let traj = match profile {
            Some(p) => integrate_with_profile(&sys, x0, p, &opts),
            None => integrate(&sys, x0, &opts),
        }
        .map_err(simulate_error)?;
        runs.push(traj);
    }
    if let Some(out) = &a.out {
        let bytes = if out.extension().is_some_and(|e| e == "json") {
            trajectories_json(sys.network().species_names(), &runs)
        } else {
            trajectories_csv(&runs)
        }
        .map_err(precondition)?;
        emit(Some(out), &bytes)?;
    }
    report.runs = runs.iter().map(RunJson::new).collect();
    let bytes = if json {
        json_bytes(&report)?
    } else {
        let mut text = String::new();
        for (i, r) in report.runs.iter().enumerate() {
            let o = runs[i].outcome;
            text += &format!(
                "run {i}: {}; stopped at t = {} after {} steps; x = {:?}\n",
                outcome_text(o),
                r.final_time,
                r.steps,
                r.final_state
            );
        }
        text.into_bytes()
    };
    emit(None, &bytes)?;
    Ok(EXIT_OK)
}
