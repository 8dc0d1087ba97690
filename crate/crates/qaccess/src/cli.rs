//! Command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use qaccess_core::cones::{classify_subspace_with, split_condition_with, CaseLabel, SearchConfig};
use qaccess_core::coherence::{is_physical, DEFAULT_PHYSICAL_TOL};
use qaccess_core::dynamics::evolve_schedule;
use qaccess_core::generator::dissipation_from_kossakowski;
use qaccess_core::liealg::{compare_accessibility, controlled_generators, lie_closure, LieError, DEFAULT_LIE_TOL};
use qaccess_core::stochastic::{build_spin_generator_with, coefficients, cp_admissible, mc_validate, StochasticError};
use qaccess_core::{CoherenceVector, ShiftConvention, SymMat3};

use crate::csvio::{fmt17, write_trajectory};
use crate::error::CliError;
use crate::formats::*;
use crate::reproduce::{run_reproduction, ReproOptions};

#[derive(Debug, Parser)]
#[command(name = "qaccess", version, about = "Positivity, complete positivity and accessibility of qubit Markovian dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Input JSON file (stdin when absent).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tolerance override, repeatable. Keys: feasibility, boundary, rank, lie, physical.
    #[arg(long = "tol", value_name = "KEY=VAL", global = true)]
    pub tol: Vec<String>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// JSON run configuration; its entries override the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Cone analysis of a parameter subspace.
    Classify,
    /// Lie closure of a generator, or positivity against complete positivity.
    Lie,
    /// Piecewise-constant control evolution.
    Evolve,
    /// Markovian coefficients and generator of the stochastic-field model.
    SpinField,
    /// Monte Carlo check of the Markovian limit.
    Montecarlo,
    /// Reproduction suite.
    Reproduce {
        /// Drop the factor 2 of the Hamiltonian matrix; the suite must then fail.
        #[arg(long)]
        perturb_convention: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Lie => "lie",
            Command::Evolve => "evolve",
            Command::SpinField => "spin-field",
            Command::Montecarlo => "montecarlo",
            Command::Reproduce { .. } => "reproduce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub feasibility: f64,
    pub boundary: f64,
    pub rank: f64,
    pub lie: f64,
    pub physical: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let s = SearchConfig::default();
        Tolerances { feasibility: s.tol, boundary: s.boundary_band, rank: s.rank_rel, lie: DEFAULT_LIE_TOL, physical: DEFAULT_PHYSICAL_TOL }
    }
}

impl Tolerances {
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(CliError::input(format!("tolerance `{key}` must be a non-negative number")));
        }
        let slot = match key {
            "feasibility" => &mut self.feasibility,
            "boundary" => &mut self.boundary,
            "rank" => &mut self.rank,
            "lie" => &mut self.lie,
            "physical" => &mut self.physical,
            _ => return Err(CliError::input(format!("unknown tolerance key `{key}`"))),
        };
        *slot = value;
        Ok(())
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub format: Option<Format>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<String>,
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    format: Option<Format>,
}

pub const DEFAULT_SEED: u64 = 0;

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let mut tolerances = Tolerances::default();
        for item in &cli.tol {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::input(format!("--tol expects KEY=VAL, got `{item}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::input(format!("--tol {k}: `{v}` is not a number")))?;
            tolerances.set(k.trim(), v)?;
        }
        let mut cfg = RunConfig {
            command: cli.command,
            input_path: cli.input.clone(),
            output_path: cli.output.clone(),
            seed: cli.seed.unwrap_or(DEFAULT_SEED),
            tolerances,
            format: cli.format,
        };
        if let Some(path) = &cli.config {
            let file: ConfigFile = parse(&read_file(path)?)?;
            if let Some(c) = &file.command {
                if c != cli.command.name() {
                    return Err(CliError::input(format!(
                        "invalid field `command`: config names `{c}` but `{}` was invoked",
                        cli.command.name()
                    )));
                }
            }
            if file.input.is_some() {
                cfg.input_path = file.input;
            }
            if file.output.is_some() {
                cfg.output_path = file.output;
            }
            if let Some(s) = file.seed {
                cfg.seed = s;
            }
            for (k, v) in &file.tolerances {
                cfg.tolerances.set(k, *v)?;
            }
            if file.format.is_some() {
                cfg.format = file.format;
            }
        }
        Ok(cfg)
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            tol: self.tolerances.feasibility,
            boundary_band: self.tolerances.boundary,
            rank_rel: self.tolerances.rank,
            seed: self.seed,
            ..SearchConfig::default()
        }
    }

    fn read_input(&self) -> Result<String, CliError> {
        match &self.input_path {
            Some(p) => read_file(p),
            None => {
                let mut s = String::new();
                std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
                    .map_err(|e| CliError::input(format!("cannot read stdin: {e}")))?;
                Ok(s)
            }
        }
    }

    fn write_output(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.output_path {
            Some(p) => fs::write(p, bytes).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(bytes)
                .map_err(|e| CliError::input(format!("cannot write stdout: {e}"))),
        }
    }

    fn json_only(&self) -> Result<(), CliError> {
        match self.format {
            Some(Format::Csv) => Err(CliError::input(format!("`{}` has no CSV output", self.command.name()))),
            _ => Ok(()),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn vector(v: [f64; 3], field: &str) -> Result<CoherenceVector, CliError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(CoherenceVector::from_array(v))
    } else {
        Err(CliError::input(format!("invalid field `{field}`: values must be finite")))
    }
}

fn classify(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.json_only()?;
    let space = parse::<SubspaceInput>(&cfg.read_input()?)?.subspace()?;
    let search = cfg.search();
    let analysis = classify_subspace_with(&space, &search).map_err(|e| CliError::domain(e.to_string()))?;
    let split = split_condition_with(&space, &search);
    cfg.write_output(to_json(&ClassifyOut::new(&analysis, &split)).as_bytes())?;
    if analysis.ambiguous {
        return Err(CliError::domain("classification is ambiguous: an extent lies inside the boundary band"));
    }
    if analysis.case_label == CaseLabel::One {
        return Err(CliError::domain("no nonzero member of the subspace is positive"));
    }
    Ok(())
}

fn lie(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.json_only()?;
    match parse_lie_input(&cfg.read_input()?)? {
        LieInput::Generator(g) => {
            let d = dissipation_from_kossakowski(&g.kossakowski()?);
            let closure = lie_closure(&controlled_generators(&g.hamiltonian()?, &d), cfg.tolerances.lie);
            cfg.write_output(to_json(&ClosureOut::from(&closure)).as_bytes())
        }
        LieInput::Compare(c) => {
            let space = SubspaceInput { basis: c.basis.clone() }.subspace()?;
            let h = GeneratorInput { c: [0.0; 6], h: c.h }.hamiltonian()?;
            let report = compare_accessibility(&space, &h, &c.theta_p, &c.theta_cp, cfg.tolerances.feasibility, cfg.tolerances.lie)
                .map_err(|e| match e {
                    LieError::InfeasibleParameters(..) => CliError::domain(e.to_string()),
                    LieError::Subspace(_) => CliError::input(format!("invalid coordinates: {e}")),
                })?;
            cfg.write_output(to_json(&CompareOut::from(&report)).as_bytes())
        }
    }
}

fn evolve(cfg: &RunConfig) -> Result<(), CliError> {
    let input: EvolveInput = parse(&cfg.read_input()?)?;
    let gen = GeneratorInput { c: input.c, h: input.h };
    let d = dissipation_from_kossakowski(&gen.kossakowski()?);
    let h = gen.hamiltonian()?;
    let v0 = vector(input.v0, "v0")?;
    if !(input.dt.is_finite() && input.dt > 0.0) {
        return Err(CliError::input("invalid field `dt`: must be positive"));
    }
    if !is_physical(&v0, cfg.tolerances.physical) {
        return Err(CliError::domain(format!("initial state lies outside the Bloch ball (|v|^2 = {})", v0.purity())));
    }
    let traj = evolve_schedule(&h, &d, &input.schedule()?, &v0, input.dt).map_err(|e| CliError::domain(e.to_string()))?;
    if let Some(t) = traj.violation {
        eprintln!("warning: state leaves the Bloch ball at t = {t} (max |v| = {})", traj.max_norm);
    }
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_trajectory(&mut buf, &traj)?;
            cfg.write_output(&buf)
        }
        Format::Json => cfg.write_output(to_json(&TrajectoryOut::from(&traj)).as_bytes()),
    }
}

fn spin_field(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.json_only()?;
    let input: SpinFieldInput = parse(&cfg.read_input()?)?;
    if !(input.b3.is_finite() && input.u.is_finite()) {
        return Err(CliError::input("invalid field `b3`/`u`: values must be finite"));
    }
    let model = input.model_input().model()?;
    let convention: ShiftConvention = input.convention.into();
    let coeffs = coefficients(&model, input.b3);
    let (h, d) = build_spin_generator_with(&coeffs, input.u, convention);
    let dm = d.matrix();
    let closure = lie_closure(&[dm, h + dm], cfg.tolerances.lie);
    let admissible = cp_admissible(&coeffs, cfg.tolerances.feasibility);
    let out = SpinFieldOut::new(model.family(), &coeffs, input.u, convention, admissible, &h, &SymMat3::from_matrix(&dm), &closure);
    cfg.write_output(to_json(&out).as_bytes())
}

fn montecarlo(cfg: &RunConfig) -> Result<(), CliError> {
    let input: MonteCarloInput = parse(&cfg.read_input()?)?;
    let model = input.model.model()?;
    let v0 = vector(input.v0, "v0")?;
    let convention: ShiftConvention = input.convention.into();
    let report = mc_validate(&model, input.b3, input.u, &v0, input.dt, input.t_final, input.n_samples, cfg.seed, convention)
        .map_err(|e| match e {
            StochasticError::InvalidCovariance | StochasticError::Unphysical(_) => CliError::domain(e.to_string()),
            _ => CliError::input(e.to_string()),
        })?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => cfg.write_output(to_json(&MonteCarloOut::new(&report, cfg.seed, convention)).as_bytes()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::input(format!("cannot write CSV: {e}"));
            w.write_record(["t", "mean1", "mean2", "mean3", "ref1", "ref2", "ref3", "se1", "se2", "se3"]).map_err(io)?;
            for c in &report.checkpoints {
                let row = [c.t].into_iter().chain(c.mean).chain(c.reference).chain(c.standard_error);
                w.write_record(row.map(fmt17)).map_err(io)?;
            }
            let buf = w.into_inner().map_err(|e| CliError::input(format!("cannot write CSV: {e}")))?;
            cfg.write_output(&buf)
        }
    }
}

fn reproduce(cfg: &RunConfig, perturb_convention: bool) -> Result<(), CliError> {
    cfg.json_only()?;
    let opts = ReproOptions { perturb_convention, search: cfg.search(), lie_tol: cfg.tolerances.lie };
    let report = run_reproduction(&opts);
    cfg.write_output(to_json(&report).as_bytes())?;
    if report.all_pass {
        Ok(())
    } else {
        let names: Vec<String> = report
            .mismatches()
            .map(|c| format!("{} (expected {}, computed {})", c.name, c.expected, c.computed))
            .collect();
        Err(CliError::mismatch(format!("reproduction mismatch: {}", names.join("; "))))
    }
}

pub fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.command {
        Command::Classify => classify(cfg),
        Command::Lie => lie(cfg),
        Command::Evolve => evolve(cfg),
        Command::SpinField => spin_field(cfg),
        Command::Montecarlo => montecarlo(cfg),
        Command::Reproduce { perturb_convention } => reproduce(cfg, perturb_convention),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_cli(&cli).and_then(|cfg| execute(&cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

