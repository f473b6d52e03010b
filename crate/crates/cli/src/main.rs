//! `traitfuse` command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use traitfuse::backends::{GroundTruthRule, Strictness, Task};
use traitfuse::evaluation::DEFAULT_GRID_STEP;
use traitfuse::{FusionParams, Mode};

mod commands;
mod error;
mod output;

use error::CliError;

#[derive(Parser)]
#[command(
    name = "traitfuse",
    version,
    about = "Emotion-trait score fusion and accuracy/coverage evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide every image of a manifest and stream JSON-lines decision records.
    Classify(ClassifyArgs),
    /// Decide every image and write accuracy/coverage reports (CSV + JSON).
    Evaluate(EvaluateArgs),
    /// Compare vanilla and trait-adjusted result tables.
    Compare(CompareArgs),
    /// Fit weighted-average ensemble weights for VAD regressors on validation data.
    FitEnsemble(FitEnsembleArgs),
    /// Generate a deterministic synthetic corpus (sidecars + manifest).
    Synth(SynthArgs),
}

/// Overrides of the manifest's fusion parameters.
#[derive(Args, Debug, Clone, Default)]
pub struct ParamOverrides {
    /// Probability shift per unit of trait distance from the neutral zone [default: 0.11]
    #[arg(long, value_name = "F")]
    pub adjust_factor: Option<f64>,
    /// Lower bound of the neutral zone, inclusive [default: 4.5]
    #[arg(long, value_name = "X")]
    pub neutral_low: Option<f64>,
    /// Upper bound of the neutral zone, inclusive [default: 5.5]
    #[arg(long, value_name = "X")]
    pub neutral_high: Option<f64>,
    /// Person detections must score strictly above this [default: 0.5]
    #[arg(long, value_name = "P")]
    pub detection_threshold: Option<f64>,
    /// Decisions whose larger probability reaches this are covered [default: 0.75]
    #[arg(long, value_name = "P")]
    pub coverage_threshold: Option<f64>,
}

impl ParamOverrides {
    /// Applies the overrides on top of `base` and validates the result.
    pub fn apply(&self, base: FusionParams) -> Result<FusionParams, CliError> {
        let p = FusionParams {
            adjust_factor: self.adjust_factor.unwrap_or(base.adjust_factor),
            neutral_low: self.neutral_low.unwrap_or(base.neutral_low),
            neutral_high: self.neutral_high.unwrap_or(base.neutral_high),
            detection_threshold: self.detection_threshold.unwrap_or(base.detection_threshold),
            coverage_threshold: self.coverage_threshold.unwrap_or(base.coverage_threshold),
        };
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(p)
    }

    /// Rejects overrides that are invalid whatever the manifest says.
    pub fn precheck(&self) -> Result<(), CliError> {
        let bad = |name: &str, v: f64| CliError::Usage(format!("--{name} {v} is out of range"));
        if let Some(v) = self.adjust_factor.filter(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(bad("adjust-factor", v));
        }
        for (name, v) in [("neutral-low", self.neutral_low), ("neutral-high", self.neutral_high)] {
            if let Some(v) = v.filter(|v| !(1.0..=10.0).contains(v)) {
                return Err(bad(name, v));
            }
        }
        for (name, v) in [
            ("detection-threshold", self.detection_threshold),
            ("coverage-threshold", self.coverage_threshold),
        ] {
            if let Some(v) = v.filter(|v| !(0.0..=1.0).contains(v)) {
                return Err(bad(name, v));
            }
        }
        if let (Some(lo), Some(hi)) = (self.neutral_low, self.neutral_high) {
            if lo >= hi {
                return Err(CliError::Usage(format!("neutral zone [{lo}, {hi}] is empty")));
            }
        }
        Ok(())
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Vanilla,
    #[value(name = "get_aid")]
    GetAid,
    Both,
}

impl ModeArg {
    pub fn modes(self) -> &'static [Mode] {
        match self {
            ModeArg::Vanilla => &[Mode::Vanilla],
            ModeArg::GetAid => &[Mode::GetAid],
            ModeArg::Both => &[Mode::Vanilla, Mode::GetAid],
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Dataset manifest (JSON)
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
    /// Worker threads for per-image inference
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: u16,
    /// Reject unknown fields in manifest and sidecars instead of warning
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub params: ParamOverrides,
}

/// Everything a manifest-driven run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub manifest_path: PathBuf,
    pub output_path: Option<PathBuf>,
    pub overrides: ParamOverrides,
    pub mode: ModeArg,
    pub worker_count: usize,
    pub strict_parsing: bool,
}

impl RunConfig {
    fn new(run: RunArgs, output_path: Option<PathBuf>) -> Result<Self, CliError> {
        run.params.precheck()?;
        Ok(Self {
            manifest_path: run.manifest,
            output_path,
            overrides: run.params,
            mode: run.mode,
            worker_count: run.workers as usize,
            strict_parsing: run.strict,
        })
    }

    pub fn strictness(&self) -> Strictness {
        if self.strict_parsing {
            Strictness::Strict
        } else {
            Strictness::Lenient
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    run: RunArgs,
    /// JSON-lines output file [default: $TRAITFUSE_OUTPUT_DIR/decisions.jsonl, else stdout]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Directory receiving report.csv and report.json [default: $TRAITFUSE_OUTPUT_DIR, else JSON on stdout]
    #[arg(long)]
    output: Option<PathBuf>,
    /// Config name used in the report rows [default: the manifest name]
    #[arg(long)]
    config_name: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    /// Vanilla result table (CSV: config,mode,accuracy,coverage)
    #[arg(long)]
    vanilla: PathBuf,
    /// Trait-adjusted result table (same format)
    #[arg(long = "get-aid")]
    get_aid: PathBuf,
    /// Directory receiving report.csv and report.json [default: $TRAITFUSE_OUTPUT_DIR, else JSON on stdout]
    #[arg(long)]
    output: Option<PathBuf>,
    /// Assert a figure of the comparison; TARGET is vanilla, get_aid, abs_delta or rel_delta
    #[arg(
        long,
        num_args = 4,
        value_names = ["METRIC", "TARGET", "VALUE", "TOL"],
        action = clap::ArgAction::Append,
        allow_negative_numbers = true
    )]
    expect: Vec<String>,
}

#[derive(Args)]
struct FitEnsembleArgs {
    /// Validation data: {"models": [[{valence, arousal, dominance}, ...], ...], "truth": [...]}
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    grid_step: f64,
    /// Output file [default: $TRAITFUSE_OUTPUT_DIR/weights.json, else stdout]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum RuleArg {
    Unlabelled,
    RawArgmax,
    Adjusted,
    Mood,
    AlwaysViolation,
    AlwaysNoViolation,
}

impl From<RuleArg> for GroundTruthRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Unlabelled => GroundTruthRule::Unlabelled,
            RuleArg::RawArgmax => GroundTruthRule::RawArgmax,
            RuleArg::Adjusted => GroundTruthRule::Adjusted,
            RuleArg::Mood => GroundTruthRule::Mood,
            RuleArg::AlwaysViolation => GroundTruthRule::AlwaysViolation,
            RuleArg::AlwaysNoViolation => GroundTruthRule::AlwaysNoViolation,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum TaskArg {
    #[value(name = "child_labour")]
    ChildLabour,
    #[value(name = "displaced_populations")]
    DisplacedPopulations,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::ChildLabour => Task::ChildLabour,
            TaskArg::DisplacedPopulations => Task::DisplacedPopulations,
        }
    }
}

fn parse_range<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected MIN:MAX, got {s:?}"))?;
    let lo = lo.trim().parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
    Ok((lo, hi))
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    count: usize,
    /// Output directory [default: $TRAITFUSE_OUTPUT_DIR]
    #[arg(long)]
    output: Option<PathBuf>,
    /// Persons passing the detection filter per image
    #[arg(long, value_name = "MIN:MAX", default_value = "0:4", value_parser = parse_range::<usize>)]
    persons: (usize, usize),
    /// Persons at or below the detection threshold per image
    #[arg(long, value_name = "MIN:MAX", default_value = "0:2", value_parser = parse_range::<usize>)]
    faint_persons: (usize, usize),
    /// Non-person detections per image
    #[arg(long, value_name = "MIN:MAX", default_value = "0:3", value_parser = parse_range::<usize>)]
    distractors: (usize, usize),
    /// Bounds of every sampled VAD value
    #[arg(long, value_name = "LO:HI", default_value = "1:10", value_parser = parse_range::<f64>)]
    vad_bounds: (f64, f64),
    /// Bounds of the raw violation probability
    #[arg(long, value_name = "LO:HI", default_value = "0:1", value_parser = parse_range::<f64>)]
    violation_score: (f64, f64),
    #[arg(long, value_enum, default_value = "mood")]
    ground_truth: RuleArg,
    #[arg(long, value_enum, default_value = "child_labour")]
    task: TaskArg,
    /// Manifest name [default: synth-<seed>]
    #[arg(long)]
    name: Option<String>,
    #[command(flatten)]
    params: ParamOverrides,
}

fn env_output_dir() -> Option<PathBuf> {
    std::env::var_os(output::OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let env_dir = env_output_dir();
    match cli.command {
        Command::Classify(a) => {
            let out = output::resolve_file(a.output.as_deref(), env_dir.as_deref(), "decisions.jsonl");
            commands::classify::run(&RunConfig::new(a.run, out)?)
        }
        Command::Evaluate(a) => {
            let out = a.output.or(env_dir);
            commands::evaluate::run(&RunConfig::new(a.run, out)?, a.config_name)
        }
        Command::Compare(a) => {
            let out = a.output.or(env_dir);
            commands::compare::run(&a.vanilla, &a.get_aid, out.as_deref(), &a.expect)
        }
        Command::FitEnsemble(a) => {
            let out = output::resolve_file(a.output.as_deref(), env_dir.as_deref(), "weights.json");
            commands::fit_ensemble::run(&a.input, a.grid_step, out.as_deref())
        }
        Command::Synth(a) => {
            let out = a
                .output
                .or(env_dir)
                .ok_or_else(|| CliError::Usage(format!("synth needs --output or ${}", output::OUTPUT_DIR_ENV)))?;
            let params = a.params.apply(FusionParams::default())?;
            let spec = traitfuse::backends::GenerationSpec {
                person_count: a.persons,
                faint_person_count: a.faint_persons,
                distractor_count: a.distractors,
                vad_bounds: a.vad_bounds,
                violation_score: a.violation_score,
                ground_truth: a.ground_truth.into(),
                params,
                ..Default::default()
            };
            let name = a.name.unwrap_or_else(|| format!("synth-{}", a.seed));
            commands::synth::run(a.seed, a.count, &spec, a.task.into(), &name, &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("traitfuse: {e}");
            e.exit_code()
        }
    }
}
