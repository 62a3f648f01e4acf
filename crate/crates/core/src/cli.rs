//! The `wolbachia` command-line tool.
//!
//! Exit codes:
//!
//! | code | meaning                                                    |
//! |------|------------------------------------------------------------|
//! | 0    | success                                                    |
//! | 2    | usage error, invalid config, unknown scenario, bad K-S input |
//! | 3    | I/O failure                                                |
//! | 4    | non-finite state during integration                        |
//! | 5    | a scenario check failed                                    |

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::analysis::{ks_test, AnalysisError, OccupationHistogram};
use crate::experiments::{
    ensemble_summary, find_scenario, run_scenario_with_artifacts, EnsembleSummary, ExperimentError,
    Quantity, Verdict,
};
use crate::model::{
    classify, equilibria, GammaLaw, ModelError, ModelParams, RegimeTag, Species, State,
};
use crate::sde::{simulate_boundary, simulate_path, SdeError, SimConfig, Trajectory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NON_FINITE: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;

pub const SEED_ENV: &str = "WOLBACHIA_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    NonFinite(SdeError),
    #[error("failed checks: {}", .0.join(", "))]
    ChecksFailed(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::NonFinite(_) => EXIT_NON_FINITE,
            CliError::ChecksFailed(_) => EXIT_CHECK_FAILED,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<SdeError> for CliError {
    fn from(e: SdeError) -> Self {
        match e {
            SdeError::NonFinite { .. } => CliError::NonFinite(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Sde(e) => e.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub dt: f64,
    pub horizon: f64,
    #[serde(rename = "I0")]
    pub i0: f64,
    #[serde(rename = "U0")]
    pub u0: f64,
    pub seed: u64,
    pub truncation_base: f64,
    pub clip_negative: bool,
    pub record_stride: usize,
}

impl Default for SimSection {
    fn default() -> Self {
        let c = SimConfig::default();
        SimSection {
            dt: c.dt,
            horizon: c.horizon,
            i0: c.initial.infected,
            u0: c.initial.uninfected,
            seed: c.seed,
            truncation_base: c.truncation_base,
            clip_negative: c.clip_negative,
            record_stride: c.record_stride,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub burn_in: f64,
    pub bins: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            burn_in: crate::analysis::DEFAULT_AVERAGE_BURN_IN,
            bins: crate::experiments::DEFAULT_BINS,
        }
    }
}

/// Contents of a TOML run file with sections `[params]`, `[sim]` and
/// `[analysis]`. Missing keys take their defaults; unknown keys are errors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    pub sim: SimSection,
    pub analysis: AnalysisSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => RunConfig::parse(&fs::read_to_string(p).map_err(|e| CliError::io(p, e))?),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate()?;
        self.sim_config().validate()?;
        if !(0.0..1.0).contains(&self.analysis.burn_in) {
            return Err(CliError::Usage(format!(
                "invalid config burn_in: must lie in [0, 1), got {}",
                self.analysis.burn_in
            )));
        }
        if self.analysis.bins == 0 {
            return Err(CliError::Usage("invalid config bins: must be >= 1".into()));
        }
        Ok(())
    }

    pub fn sim_config(&self) -> SimConfig {
        let s = &self.sim;
        SimConfig {
            dt: s.dt,
            horizon: s.horizon,
            initial: State::new(s.i0, s.u0),
            seed: s.seed,
            truncation_base: s.truncation_base,
            clip_negative: s.clip_negative,
            record_stride: s.record_stride,
            ..SimConfig::default()
        }
    }
}

/// Decimal rendering with 17 significant digits, which round-trips every
/// binary64 value. Positional notation for exponents in `[-5, 17)`,
/// scientific otherwise.
pub fn format_f64(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp >= 0 {
        let split = exp as usize + 1;
        let (int, frac) = digits.split_at(split);
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}

/// Short human-readable number for text reports.
fn short(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn short_law(law: &GammaLaw) -> String {
    format!("Ga({}, {})", short(law.shape()), short(law.rate()))
}

/// `t,I,U` rows, `\n`-terminated, no trailing blank line.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.len() * 64);
    out.push_str("t,I,U\n");
    for k in 0..traj.len() {
        let s = traj.state(k);
        let _ = writeln!(
            out,
            "{},{},{}",
            format_f64(traj.times()[k]),
            format_f64(s.infected),
            format_f64(s.uninfected)
        );
    }
    out
}

/// `(t, I, U)` columns of a trajectory CSV.
pub type Columns = (Vec<f64>, Vec<f64>, Vec<f64>);

/// Parses a `t,I,U` CSV back into columns.
pub fn parse_trajectory_csv(text: &str) -> Result<Columns, String> {
    let mut lines = text.lines();
    if lines.next() != Some("t,I,U") {
        return Err("missing header t,I,U".into());
    }
    let (mut t, mut i, mut u) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", n + 1));
        if fields.len() != 3 {
            return Err(format!("row {}: expected 3 fields", n + 1));
        }
        t.push(parse(fields[0])?);
        i.push(parse(fields[1])?);
        u.push(parse(fields[2])?);
    }
    Ok((t, i, u))
}

/// Nonzero cells as `I_lo,I_hi,U_lo,U_hi,weight`.
pub fn histogram_csv(h: &OccupationHistogram) -> String {
    let mut out = String::from("I_lo,I_hi,U_lo,U_hi,weight\n");
    for (a, b, c, d, w) in h.cells() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_f64(a),
            format_f64(b),
            format_f64(c),
            format_f64(d),
            format_f64(w)
        );
    }
    out
}

pub fn ensemble_csv(s: &EnsembleSummary) -> String {
    let mut out = String::from("t,I_mean,I_q10,I_q50,I_q90,U_mean,U_q10,U_q50,U_q90,min_mean\n");
    for k in 0..s.times.len() {
        let row = [
            s.times[k],
            s.infected.mean[k],
            s.infected.q10[k],
            s.infected.q50[k],
            s.infected.q90[k],
            s.uninfected.mean[k],
            s.uninfected.q10[k],
            s.uninfected.q50[k],
            s.uninfected.q90[k],
            s.mean_min[k],
        ];
        let cells: Vec<String> = row.iter().map(|&x| format_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Sidecar path: `out.csv` → `out.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

#[derive(Debug, Parser)]
#[command(
    name = "wolbachia",
    version,
    about = "Stochastic Wolbachia invasion model: classification, simulation and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct ConfigArg {
    /// TOML run file with [params], [sim] and [analysis] sections.
    #[arg(long, short)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Growth rates, regime, stationary laws and extinction exponent.
    Classify {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        json: bool,
    },
    /// Simulate one full path and write it as CSV.
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, short)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long, env = SEED_ENV)]
        seed: Option<u64>,
    },
    /// Simulate a one-species boundary process and write it as CSV.
    Boundary {
        #[command(flatten)]
        config: ConfigArg,
        /// I or U.
        #[arg(long)]
        species: Species,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, env = SEED_ENV)]
        seed: Option<u64>,
    },
    /// Run a built-in scenario and report its verdict.
    Scenario {
        name: String,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Directory for verdict.json, trajectory.csv and histogram.csv.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Cross-path mean and quantiles of a scenario's ensemble as CSV.
    Ensemble {
        name: String,
        #[arg(long, default_value_t = 20)]
        paths: usize,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output file; stdout if omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// One-sample K-S test of a sample file against a Gamma law.
    Ks {
        /// One positive value per line.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        shape: f64,
        #[arg(long)]
        rate: f64,
    },
    /// Equilibria of the noiseless model.
    Equilibria {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        json: bool,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn print(out: &mut impl Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn run(command: Command, out: &mut impl Write) -> Result<(), CliError> {
    match command {
        Command::Classify { config, json } => {
            let cfg = RunConfig::load(config.config.as_deref())?;
            print(out, &classify_report(&cfg.params, json)?)
        }
        Command::Simulate {
            config,
            out: path,
            seed,
        } => {
            let mut cfg = RunConfig::load(config.config.as_deref())?;
            cfg.sim.seed = seed.unwrap_or(cfg.sim.seed);
            let traj = simulate_path(&cfg.sim_config(), &cfg.params)?;
            write_path_files(&path, &traj, &cfg, "full")?;
            print(
                out,
                &format!("wrote {} rows to {}\n", traj.len(), path.display()),
            )
        }
        Command::Boundary {
            config,
            species,
            out: path,
            seed,
        } => {
            let mut cfg = RunConfig::load(config.config.as_deref())?;
            cfg.sim.seed = seed.unwrap_or(cfg.sim.seed);
            let traj = simulate_boundary(&cfg.sim_config(), &cfg.params, species)?;
            let kind = match species {
                Species::Infected => "boundary_I",
                Species::Uninfected => "boundary_U",
            };
            write_path_files(&path, &traj, &cfg, kind)?;
            print(
                out,
                &format!("wrote {} rows to {}\n", traj.len(), path.display()),
            )
        }
        Command::Scenario {
            name,
            seed,
            jobs,
            out: dir,
            json,
        } => {
            let scenario = find_scenario(&name)
                .ok_or_else(|| CliError::Usage(format!("unknown scenario {name:?}")))?;
            let (verdict, artifacts) = run_scenario_with_artifacts(&scenario, seed, jobs.max(1))?;
            let verdict_json = to_json(&verdict);
            if let Some(dir) = dir {
                fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
                write_file(&dir.join("verdict.json"), &verdict_json)?;
                write_file(
                    &dir.join("trajectory.csv"),
                    &trajectory_csv(&artifacts.trajectory),
                )?;
                write_file(
                    &dir.join("histogram.csv"),
                    &histogram_csv(&artifacts.histogram),
                )?;
            }
            if json {
                print(out, &verdict_json)?;
            } else {
                print(out, &verdict_report(&verdict))?;
            }
            if verdict.pass {
                Ok(())
            } else {
                Err(CliError::ChecksFailed(
                    verdict.failed_checks().map(|c| c.name.clone()).collect(),
                ))
            }
        }
        Command::Ensemble {
            name,
            paths,
            seed,
            jobs,
            out: path,
        } => {
            let scenario = find_scenario(&name)
                .ok_or_else(|| CliError::Usage(format!("unknown scenario {name:?}")))?;
            let summary = ensemble_summary(&scenario, paths, seed, jobs.max(1))?;
            let csv = ensemble_csv(&summary);
            match path {
                Some(p) => write_file(&p, &csv),
                None => print(out, &csv),
            }
        }
        Command::Ks {
            samples,
            shape,
            rate,
        } => {
            let law = GammaLaw::new(shape, rate)?;
            let text = fs::read_to_string(&samples).map_err(|e| CliError::io(&samples, e))?;
            let values = parse_samples(&text)?;
            let result = ks_test(&values, &law)?;
            print(out, &to_json(&result))
        }
        Command::Equilibria { config, json } => {
            let cfg = RunConfig::load(config.config.as_deref())?;
            print(out, &equilibria_report(&cfg.params, json)?)
        }
    }
}

fn parse_samples(text: &str) -> Result<Vec<f64>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("sample line {}: {e}", n + 1)))
        })
        .collect()
}

fn write_path_files(
    path: &Path,
    traj: &Trajectory,
    cfg: &RunConfig,
    kind: &str,
) -> Result<(), CliError> {
    write_file(path, &trajectory_csv(traj))?;
    let meta = json!({
        "kind": kind,
        "seed": cfg.sim.seed,
        "path_index": traj.lineage.path_index,
        "steps": traj.steps,
        "rows": traj.len(),
        "config": cfg,
    });
    write_file(&sidecar_path(path), &to_json(&meta))
}

pub fn classify_report(params: &ModelParams, json: bool) -> Result<String, CliError> {
    let regime = classify(params)?;
    let note = (regime.tag == RegimeTag::BoundaryMixture).then_some("mixture weights undetermined");
    if json {
        let report = json!({
            "params": params,
            "tag": regime.tag.code(),
            "description": regime.tag.description(),
            "regime": regime,
            "note": note,
        });
        return Ok(to_json(&report));
    }
    let d = &regime.derived;
    let mut s = String::new();
    let _ = writeln!(s, "lambda_I = {}", short(d.lambda_i));
    let _ = writeln!(s, "lambda_U = {}", short(d.lambda_u));
    for species in Species::BOTH {
        if let (Some(q), Some(b)) = (d.shape(species), d.rate(species)) {
            let _ = writeln!(
                s,
                "q_{species} = {}, beta_{species} = {}",
                short(q),
                short(b)
            );
        }
    }
    let _ = writeln!(
        s,
        "regime {}: {}",
        regime.tag.code(),
        regime.tag.description()
    );
    for (species, law) in [
        (Species::Infected, regime.infected_law),
        (Species::Uninfected, regime.uninfected_law),
    ] {
        if let Some(law) = law {
            let _ = writeln!(s, "{species} stationary law {}", short_law(&law));
        }
    }
    if let Some(e) = regime.extinction_exponent {
        let _ = writeln!(s, "{} extinction exponent {}", e.species, short(e.rate));
    }
    if let Some(note) = note {
        let _ = writeln!(s, "note: {note}");
    }
    Ok(s)
}

pub fn equilibria_report(params: &ModelParams, json: bool) -> Result<String, CliError> {
    let eq = equilibria(params)?;
    if json {
        return Ok(to_json(&eq));
    }
    let mut s = String::new();
    for (name, p) in eq.points() {
        let _ = writeln!(
            s,
            "{name} = ({}, {})",
            short(p.infected),
            short(p.uninfected)
        );
    }
    Ok(s)
}

fn quantity_text(q: &Quantity) -> String {
    match q {
        Quantity::Number(x) => short(*x),
        Quantity::Text(t) => t.clone(),
        Quantity::Law(l) => short_law(l),
        Quantity::Point(p) => format!("({}, {})", short(p.infected), short(p.uninfected)),
        Quantity::Weights(w) => format!(
            "origin {}, U only {}, I only {}, interior {}",
            short(w.origin),
            short(w.uninfected_only),
            short(w.infected_only),
            short(w.interior)
        ),
    }
}

pub fn verdict_report(v: &Verdict) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} (seed {}): {}",
        v.scenario,
        v.master_seed,
        if v.pass { "PASS" } else { "FAIL" }
    );
    for c in &v.checks {
        let status = match c.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        let _ = write!(s, "  [{status}] {}", c.name);
        if let Some(m) = &c.measured {
            let _ = write!(s, ": measured {}", quantity_text(m));
        }
        if let Some(p) = &c.predicted {
            let _ = write!(s, ", predicted {}", quantity_text(p));
        }
        if let Some(t) = c.tolerance {
            let _ = write!(s, ", tolerance {}", short(t));
        }
        if let Some(n) = &c.note {
            let _ = write!(s, " ({n})");
        }
        s.push('\n');
    }
    s
}
