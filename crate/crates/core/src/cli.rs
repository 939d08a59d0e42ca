//! The `projektor` command line.
//!
//! Exit codes: 0 success, 2 input error, 3 domain mismatch between registry
//! and data, 4 internal invariant violation. `PROJEKTOR_LOG` is one of
//! `quiet`, `info` (default) or `trace`; only `trace` keeps search traces in
//! reports.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::data::Domain;
use crate::dataset::{
    read_json, read_jsonl, write_atomic, write_jsonl, DatasetError, GenerateRequest, SceneRecord, SceneReport,
};
use crate::glyph::{build_glyph_library, render_overlay, GlyphError, NoiseParams};
use crate::inference::{BeamConfig, InferenceError, OracleCheck, Strategy};
use crate::metrics::{evaluate_metrics, match_scene, GroundTruth, Metrics};
use crate::temporal::build_activity_library;
use crate::workspace::{interpret_scene, ModelRegistry, RegistryError, SceneConfig, SceneInterpretation, WorkspaceError};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

/// Environment variable selecting log verbosity and trace retention.
pub const LOG_ENV: &str = "PROJEKTOR_LOG";

#[derive(Debug, Parser)]
#[command(name = "projektor", version, about = "Hierarchical model projection over segment and event data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Glyph,
    Temporal,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Domain {
        match d {
            DomainArg::Glyph => Domain::Glyph,
            DomainArg::Temporal => Domain::Temporal,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[default]
    Projection,
    Bottomup,
}

impl From<ModeArg> for Strategy {
    fn from(m: ModeArg) -> Strategy {
        match m {
            ModeArg::Projection => Strategy::Projection,
            ModeArg::Bottomup => Strategy::BottomUp,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a JSON-lines dataset with ground truth.
    Generate {
        #[arg(long, value_enum)]
        domain: DomainArg,
        /// Scene layout, letter family, stream spec or stream family (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Glyph noise parameters or stream noise rates (JSON).
        #[arg(long)]
        noise: Option<PathBuf>,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interpret every scene of a dataset.
    Interpret {
        #[arg(long)]
        dataset: PathBuf,
        /// Directory of model files; the built-in library of the data's
        /// domain when absent.
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Scene configuration (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interpret a dataset and score it against its ground truth.
    Bench {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare search against exhaustive enumeration on small random instances.
    OracleCheck {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Search with a one-wide beam and no refinement; expected to fail.
        #[arg(long)]
        corrupt_beam: bool,
    },
    /// Draw each interpreted glyph scene as SVG.
    Render {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a built-in model library as one JSON file per model.
    Library {
        #[arg(long, value_enum)]
        domain: DomainArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<RegistryError> for CliError {
    fn from(e: RegistryError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<GlyphError> for CliError {
    fn from(e: GlyphError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<WorkspaceError> for CliError {
    fn from(e: WorkspaceError) -> Self {
        match e {
            WorkspaceError::DomainMismatch { .. } | WorkspaceError::Inference(InferenceError::DomainMismatch { .. }) => {
                CliError::Mismatch(e.to_string())
            }
            WorkspaceError::Config(_) | WorkspaceError::UnknownModel(_) => CliError::Input(e.to_string()),
            WorkspaceError::Inference(InferenceError::Config(_)) => CliError::Input(e.to_string()),
            WorkspaceError::Inference(_) => CliError::Invariant(e.to_string()),
        }
    }
}

/// What `PROJEKTOR_LOG` asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verbosity {
    Quiet,
    Info,
    Trace,
}

impl Verbosity {
    pub fn from_env() -> Result<Verbosity, CliError> {
        match std::env::var(LOG_ENV).as_deref() {
            Err(_) | Ok("") | Ok("info") => Ok(Verbosity::Info),
            Ok("quiet") => Ok(Verbosity::Quiet),
            Ok("trace") => Ok(Verbosity::Trace),
            Ok(other) => Err(CliError::Input(format!("{LOG_ENV} must be quiet, info or trace, got `{other}`"))),
        }
    }

    fn level(self) -> log::LevelFilter {
        match self {
            Verbosity::Quiet => log::LevelFilter::Off,
            Verbosity::Info => log::LevelFilter::Info,
            Verbosity::Trace => log::LevelFilter::Trace,
        }
    }
}

/// Parse `args`, run, and return the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    let verbosity = match Verbosity::from_env() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let _ = env_logger::Builder::new().filter_level(verbosity.level()).format_timestamp(None).try_init();
    match run(cli, verbosity) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, verbosity: Verbosity) -> Result<(), CliError> {
    let keep_trace = verbosity == Verbosity::Trace;
    match cli.command {
        Command::Generate { domain, spec, noise, count, seed, out } => {
            cmd_generate(domain.into(), &spec, noise.as_deref(), count, seed, &out)
        }
        Command::Interpret { dataset, registry, config, mode, out } => {
            let scenes: Vec<SceneRecord> = read_jsonl(&dataset)?;
            let cfg = load_config(config.as_deref(), None)?;
            let reports = interpret_all(&scenes, registry.as_deref(), &cfg, mode.into(), keep_trace)?;
            write_jsonl(&out, &reports)?;
            log::info!("{} scenes interpreted into {}", reports.len(), out.display());
            Ok(())
        }
        Command::Bench { dataset, registry, config, mode, seed, out } => {
            let scenes: Vec<SceneRecord> = read_jsonl(&dataset)?;
            let cfg = load_config(config.as_deref(), Some(seed))?;
            let report = cmd_bench(&scenes, registry.as_deref(), &cfg, mode, keep_trace)?;
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            write_atomic(&out, text.as_bytes())?;
            log::info!(
                "{:?}: exact match {:.3}, precision {:.3}, recall {:.3}",
                mode,
                report.metrics.exact_match,
                report.metrics.precision,
                report.metrics.recall
            );
            Ok(())
        }
        Command::OracleCheck { instances, seed, corrupt_beam } => cmd_oracle_check(instances, seed, corrupt_beam),
        Command::Render { dataset, report, out } => cmd_render(&dataset, &report, &out),
        Command::Library { domain, out } => {
            let reg = builtin_library(domain.into());
            reg.save_dir(&out)?;
            log::info!("{} models written to {}", reg.len(), out.display());
            Ok(())
        }
    }
}

pub fn builtin_library(domain: Domain) -> ModelRegistry {
    match domain {
        Domain::Glyph => build_glyph_library(),
        Domain::Temporal => build_activity_library(),
    }
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<SceneConfig, CliError> {
    let mut cfg: SceneConfig = match path {
        Some(p) => read_json(p)?,
        None => SceneConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.beam.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_generate(
    domain: Domain,
    spec: &Path,
    noise: Option<&Path>,
    count: usize,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let request = match domain {
        Domain::Glyph => GenerateRequest::Glyph {
            source: read_json(spec)?,
            noise: match noise {
                Some(p) => read_json(p)?,
                None => NoiseParams::default(),
            },
        },
        Domain::Temporal => GenerateRequest::Temporal {
            source: read_json(spec)?,
            noise: noise.map(read_json).transpose()?,
        },
    };
    let records = request.generate(count, seed)?;
    write_jsonl(out, &records)?;
    log::info!("{count} {domain} scenes written to {}", out.display());
    Ok(())
}

fn registry_for(scenes: &[SceneRecord], path: Option<&Path>) -> Result<Option<ModelRegistry>, CliError> {
    let reg = match (path, scenes.first()) {
        (Some(p), _) => ModelRegistry::load_dir(p)?,
        (None, Some(first)) => builtin_library(first.data.domain()),
        (None, None) => return Ok(None),
    };
    if let Some(bad) = scenes.iter().find(|s| s.data.domain() != reg.domain()) {
        return Err(CliError::Mismatch(format!(
            "registry is {} but scene {} is {}",
            reg.domain(),
            bad.index,
            bad.data.domain()
        )));
    }
    Ok(Some(reg))
}

/// Selected scores clear the threshold and refinement never lost ground.
fn check_invariants(index: usize, scene: &SceneInterpretation, cfg: &SceneConfig) -> Result<(), CliError> {
    for p in &scene.selected {
        if !p.forced && p.score() < cfg.arbitration.accept_threshold {
            return Err(CliError::Invariant(format!("scene {index}: selected {} below threshold", p.model)));
        }
        if !p.result.is_monotone() {
            return Err(CliError::Invariant(format!("scene {index}: refinement of {} lost score", p.model)));
        }
    }
    Ok(())
}

/// Reports in scene order.
pub fn interpret_all(
    scenes: &[SceneRecord],
    registry: Option<&Path>,
    cfg: &SceneConfig,
    strategy: Strategy,
    keep_trace: bool,
) -> Result<Vec<SceneReport>, CliError> {
    let Some(reg) = registry_for(scenes, registry)? else {
        return Ok(Vec::new());
    };
    scenes
        .par_iter()
        .map(|s| {
            let mut scene = interpret_scene(&reg, &s.data, cfg, strategy)?;
            check_invariants(s.index, &scene, cfg)?;
            if !keep_trace {
                for p in &mut scene.selected {
                    p.result.trace.clear();
                }
            }
            Ok(SceneReport { index: s.index, interpretation: scene })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SceneOutcome {
    pub index: usize,
    pub truth: Vec<String>,
    pub selected: Vec<String>,
    pub scores: Vec<f64>,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub mode: Strategy,
    pub seed: u64,
    pub metrics: Metrics,
    pub scenes: Vec<SceneOutcome>,
}

pub fn cmd_bench(
    scenes: &[SceneRecord],
    registry: Option<&Path>,
    cfg: &SceneConfig,
    mode: ModeArg,
    keep_trace: bool,
) -> Result<BenchReport, CliError> {
    let truths: Vec<GroundTruth> = scenes
        .iter()
        .map(|s| s.truth.clone().ok_or_else(|| CliError::Input(format!("scene {} has no ground truth", s.index))))
        .collect::<Result<_, _>>()?;
    let reports = interpret_all(scenes, registry, cfg, mode.into(), keep_trace)?;
    let results: Vec<SceneInterpretation> = reports.into_iter().map(|r| r.interpretation).collect();
    let metrics = evaluate_metrics(&truths, &results).map_err(|e| CliError::Invariant(e.to_string()))?;
    let outcomes = scenes
        .iter()
        .zip(&truths)
        .zip(&results)
        .map(|((s, t), r)| {
            let matches = match_scene(t, r);
            SceneOutcome {
                index: s.index,
                truth: t.labels().iter().map(|l| l.to_string()).collect(),
                selected: r.labels().iter().map(|l| l.to_string()).collect(),
                scores: r.selected.iter().map(|p| p.score()).collect(),
                exact: matches.iter().all(Option::is_some) && matches.len() == r.selected.len(),
            }
        })
        .collect();
    Ok(BenchReport { mode: mode.into(), seed: cfg.beam.seed, metrics, scenes: outcomes })
}

pub fn oracle_config(corrupt_beam: bool) -> BeamConfig {
    if corrupt_beam {
        BeamConfig { beam_width: 1, max_rounds: 0, ..BeamConfig::exhaustive() }
    } else {
        BeamConfig::exhaustive()
    }
}

pub fn cmd_oracle_check(instances: usize, seed: u64, corrupt_beam: bool) -> Result<(), CliError> {
    let cfg = oracle_config(corrupt_beam);
    let checks: Vec<OracleCheck> = (0..instances)
        .into_par_iter()
        .map(|i| OracleCheck::run(i, seed, &cfg))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    let failed: Vec<&OracleCheck> = checks.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        println!(
            "mismatch: instance {} ({} leaves, {} data): search {:.12} oracle {:.12}",
            c.instance, c.leaves, c.data, c.search_score, c.oracle_score
        );
    }
    println!("{} checked, {} mismatches", checks.len(), failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("{} of {} instances disagree with the oracle", failed.len(), checks.len())))
    }
}

pub fn cmd_render(dataset: &Path, report: &Path, out: &Path) -> Result<(), CliError> {
    let scenes: Vec<SceneRecord> = read_jsonl(dataset)?;
    let reports: Vec<SceneReport> = read_jsonl(report)?;
    fs::create_dir_all(out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    for r in &reports {
        let scene = scenes
            .iter()
            .find(|s| s.index == r.index)
            .ok_or_else(|| CliError::Input(format!("report scene {} is not in the dataset", r.index)))?;
        let svg = render_overlay(&scene.data, &r.interpretation)?;
        write_atomic(&out.join(format!("scene-{:04}.svg", r.index)), svg.as_bytes())?;
    }
    log::info!("{} overlays written to {}", reports.len(), out.display());
    Ok(())
}
