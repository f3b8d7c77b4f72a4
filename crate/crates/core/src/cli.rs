//! Command-line front end: `eval`, `rank` and `probe`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::confusion::{ConfusionMatrix, WeightMatrix};
use crate::discrepancy::{find_discrepancy, GeneratorConfig};
use crate::error::Error;
use crate::format::{parse_label_pairs, parse_matrix, parse_priors, parse_weights, InputError};
use crate::gti;
use crate::measure::{Measure, MeasureContext};
use crate::overall::UndefinedPolicy;
use crate::ranking::{concordance, identical_groups, rank, RankingKey, DEFAULT_TIE_TOLERANCE};
use crate::render::{render_probe, render_rank, render_report, OutputFormat, ProbeDocument, RankDocument};
use crate::report::{evaluate_all, EvalConfig, MeasureReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "classeval", version, about = "Confusion-matrix accuracy measures and classifier ranking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every measure on one classifier.
    Eval(InputArgs),
    /// Rank several classifiers evaluated on the same test set.
    Rank(InputArgs),
    /// Search for matrix pairs two measures order oppositely.
    Probe(ProbeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChanceArg {
    Cohen,
    Scott,
    Maxwell,
}

impl ChanceArg {
    fn measure(self) -> Measure {
        match self {
            ChanceArg::Cohen => Measure::KappaCohen,
            ChanceArg::Scott => Measure::PiScott,
            ChanceArg::Maxwell => Measure::ReMaxwell,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Table,
    Machine,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => OutputFormat::Table,
            FormatArg::Machine => OutputFormat::Machine,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Matrix files (rows = estimated classes).
    #[arg(long, num_args = 1..)]
    pub matrix: Vec<PathBuf>,
    /// Label-pair files with `true,estimated` rows.
    #[arg(long, num_args = 1..)]
    pub labels: Vec<PathBuf>,
    /// Comma-separated measure ids; all measures when omitted.
    #[arg(long, value_delimiter = ',')]
    pub measures: Vec<String>,
    /// Report only this agreement coefficient.
    #[arg(long, value_enum)]
    pub chance: Option<ChanceArg>,
    /// External class priors for Scott's pi (`label proportion` lines).
    #[arg(long)]
    pub priors: Option<PathBuf>,
    /// Cell weights, in the matrix file format.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Restrict class-specific measures to one class label.
    #[arg(long = "class")]
    pub class: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TIE_TOLERANCE)]
    pub tie_tol: f64,
    #[arg(long, default_value_t = gti::DEFAULT_TOLERANCE)]
    pub gti_tol: f64,
    #[arg(long, default_value_t = gti::DEFAULT_MAX_ITERATIONS)]
    pub gti_max_iter: usize,
    /// Report GTI values from fits that hit the iteration cap.
    #[arg(long)]
    pub gti_accept_unconverged: bool,
    /// Average CSI over the classes with a defined ICSI instead of failing.
    #[arg(long)]
    pub csi_exclude_undefined: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Machine)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// The two measure ids to compare, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub measures: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    /// Number of classes of generated matrices.
    #[arg(long, default_value_t = 2)]
    pub classes: usize,
    /// Total mass of generated matrices.
    #[arg(long, default_value_t = 100)]
    pub mass: u64,
    /// Class label (`c0`, `c1`, ...) for class-specific measures.
    #[arg(long = "class")]
    pub class: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TIE_TOLERANCE)]
    pub tie_tol: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Machine)]
    pub format: FormatArg,
}

/// A failure with its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn from_input(path: &Path, err: InputError) -> Self {
        let code = match &err {
            InputError::Data(e) if is_degenerate(e) => EXIT_DEGENERATE,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: format!("{}: {err}", path.display()),
        }
    }

    fn data(err: Error) -> Self {
        let code = if is_degenerate(&err) {
            EXIT_DEGENERATE
        } else {
            EXIT_INPUT
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

fn is_degenerate(e: &Error) -> bool {
    matches!(e, Error::ZeroMass | Error::TooFewClasses(_) | Error::EmptyDataset)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

struct Input {
    id: String,
    matrix: ConfusionMatrix,
}

fn classifier_ids(paths: &[PathBuf]) -> Vec<String> {
    let stems: Vec<String> = paths
        .iter()
        .map(|p| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string())
        })
        .collect();
    stems
        .iter()
        .zip(paths)
        .map(|(s, p)| {
            if stems.iter().filter(|t| *t == s).count() > 1 {
                p.display().to_string()
            } else {
                s.clone()
            }
        })
        .collect()
}

fn load_inputs(args: &InputArgs) -> Result<Vec<Input>, CliError> {
    let (paths, label_mode) = match (args.matrix.is_empty(), args.labels.is_empty()) {
        (false, true) => (&args.matrix, false),
        (true, false) => (&args.labels, true),
        (true, true) => return Err(CliError::config("no input: pass --matrix or --labels")),
        (false, false) => return Err(CliError::config("--matrix and --labels are mutually exclusive")),
    };
    let ids = classifier_ids(paths);
    paths
        .par_iter()
        .zip(ids)
        .map(|(path, id)| {
            let text = read(path)?;
            let matrix = if label_mode {
                parse_label_pairs(&text)
                    .and_then(|d| Ok(ConfusionMatrix::from_labels(&d)?))
                    .map_err(|e| CliError::from_input(path, e))?
            } else {
                parse_matrix(&text).map_err(|e| CliError::from_input(path, e))?
            };
            Ok(Input { id, matrix })
        })
        .collect()
}

fn eval_config(args: &InputArgs, labels: &[String]) -> Result<EvalConfig, CliError> {
    let mut measures = if args.measures.is_empty() {
        Measure::all()
    } else {
        args.measures
            .iter()
            .map(|s| s.parse::<Measure>().map_err(|e| CliError::config(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?
    };
    if let Some(chance) = args.chance {
        let keep = chance.measure();
        if !args.measures.is_empty()
            && measures
                .iter()
                .any(|m| m.chance_model(None).is_some() && *m != keep)
        {
            return Err(CliError::config(format!(
                "--chance {} contradicts the agreement measures in --measures",
                keep.chance_model(None).unwrap().name()
            )));
        }
        measures.retain(|m| m.chance_model(None).is_none() || *m == keep);
    }
    let scott_priors = match &args.priors {
        None => None,
        Some(path) => {
            if matches!(args.chance, Some(ChanceArg::Cohen | ChanceArg::Maxwell)) {
                return Err(CliError::config("--priors is only valid with the scott chance model"));
            }
            let priors = parse_priors(&read(path)?, labels).map_err(|e| CliError::from_input(path, e))?;
            crate::overall::ChanceModel::ScottPriors(Some(priors.clone()))
                .validate(labels.len())
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            Some(priors)
        }
    };
    let weights: Option<WeightMatrix> = match &args.weights {
        None => None,
        Some(path) => Some(parse_weights(&read(path)?, labels).map_err(|e| CliError::from_input(path, e))?),
    };
    let target_class = match &args.class {
        None => None,
        Some(label) => Some(
            labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| CliError::config(format!("--class `{label}` is not one of the data labels")))?,
        ),
    };
    if args.tie_tol.is_nan() || args.tie_tol < 0.0 {
        return Err(CliError::config("--tie-tol must be non-negative"));
    }
    if args.gti_tol.is_nan() || args.gti_tol <= 0.0 || args.gti_max_iter == 0 {
        return Err(CliError::config("--gti-tol must be positive and --gti-max-iter at least 1"));
    }
    Ok(EvalConfig {
        measures,
        context: MeasureContext {
            scott_priors,
            csi_policy: if args.csi_exclude_undefined {
                UndefinedPolicy::Exclude
            } else {
                UndefinedPolicy::Fail
            },
            gti_tolerance: args.gti_tol,
            gti_max_iterations: args.gti_max_iter,
            gti_accept_unconverged: args.gti_accept_unconverged,
        },
        weights,
        target_class,
    })
}

pub fn cmd_eval(args: &InputArgs) -> Result<String, CliError> {
    let inputs = load_inputs(args)?;
    if inputs.len() != 1 {
        return Err(CliError::config(format!(
            "eval takes exactly one input, got {}; use rank for several",
            inputs.len()
        )));
    }
    let input = &inputs[0];
    let config = eval_config(args, input.matrix.labels())?;
    let report = evaluate_all(&input.id, &input.matrix, &config).map_err(CliError::data)?;
    Ok(render_report(&report, args.format.into()))
}

pub fn cmd_rank(args: &InputArgs) -> Result<String, CliError> {
    let mut inputs = load_inputs(args)?;
    if inputs.len() < 2 {
        return Err(CliError::config("rank needs at least two inputs"));
    }
    let labels = inputs[0].matrix.labels().to_vec();
    let n = inputs[0].matrix.total();
    for input in inputs.iter_mut().skip(1) {
        let mut theirs = input.matrix.labels().to_vec();
        let mut ours = labels.clone();
        theirs.sort();
        ours.sort();
        if theirs != ours {
            return Err(CliError::input(format!(
                "{} uses labels [{}] but {} uses [{}]; classifiers must share one test set",
                input.id,
                input.matrix.labels().join(" "),
                "the first input",
                labels.join(" ")
            )));
        }
        let total = input.matrix.total();
        if (total - n).abs() > crate::confusion::MASS_TOLERANCE * n {
            return Err(CliError::input(format!(
                "{} has total mass {total} but the first input has {n}; classifiers must share one test set",
                input.id
            )));
        }
        input.matrix = input.matrix.reordered(&labels).map_err(CliError::data)?;
    }
    let config = eval_config(args, &labels)?;
    let reports: Vec<MeasureReport> = inputs
        .par_iter()
        .map(|i| evaluate_all(&i.id, &i.matrix, &config))
        .collect::<Result<_, _>>()
        .map_err(CliError::data)?;

    let classes: Vec<usize> = match config.target_class {
        Some(i) => vec![i],
        None => (0..labels.len()).collect(),
    };
    let mut keys = Vec::new();
    for m in reports[0].entries.iter().map(|e| e.measure) {
        if m.is_class_specific() {
            keys.extend(classes.iter().map(|&c| RankingKey::class(m, c)));
        } else {
            keys.push(RankingKey::overall(m));
        }
    }
    let rankings = keys
        .iter()
        .map(|&k| rank(&reports, k, args.tie_tol))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::data)?;
    let (complete, excluded): (Vec<_>, Vec<_>) = rankings.iter().partition(|r| r.unrankable.is_empty());
    let complete_keys: Vec<RankingKey> = complete.iter().map(|r| r.key).collect();
    let concordance = if complete_keys.is_empty() {
        None
    } else {
        concordance(&reports, &complete_keys, args.tie_tol).ok()
    };
    let doc = RankDocument {
        classifiers: reports.iter().map(|r| r.classifier.clone()).collect(),
        labels,
        tolerance: args.tie_tol,
        identical: identical_groups(&rankings),
        excluded: excluded.iter().map(|r| r.key).collect(),
        rankings,
        concordance,
    };
    Ok(render_rank(&doc, args.format.into()))
}

pub fn cmd_probe(args: &ProbeArgs) -> Result<String, CliError> {
    let seed = args
        .seed
        .ok_or_else(|| CliError::config("probe is randomized: --seed is required"))?;
    if args.measures.len() != 2 {
        return Err(CliError::config(format!(
            "probe compares exactly two measures, got {}",
            args.measures.len()
        )));
    }
    let parse = |s: &String| s.parse::<Measure>().map_err(|e| CliError::config(e.to_string()));
    let a = parse(&args.measures[0])?;
    let b = parse(&args.measures[1])?;
    if a.uses_gti() || b.uses_gti() {
        return Err(CliError::config("probe does not support GTI measures"));
    }
    if args.classes < 2 || args.mass == 0 {
        return Err(CliError::config("--classes must be at least 2 and --mass positive"));
    }
    let class_index = match &args.class {
        None => 0,
        Some(label) => label
            .strip_prefix('c')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&i| i < args.classes)
            .ok_or_else(|| CliError::config(format!("--class `{label}` must be one of c0..c{}", args.classes - 1)))?,
    };
    if args.tie_tol.is_nan() || args.tie_tol < 0.0 {
        return Err(CliError::config("--tie-tol must be non-negative"));
    }
    let generator = GeneratorConfig {
        k: args.classes,
        n: args.mass,
        class_index,
    };
    let witness = find_discrepancy(a, b, &generator, &MeasureContext::default(), args.budget, seed, args.tie_tol);
    let doc = ProbeDocument {
        a,
        b,
        generator,
        class_label: format!("c{class_index}"),
        budget: args.budget,
        seed,
        tolerance: args.tie_tol,
        witness,
    };
    Ok(render_probe(&doc, args.format.into()))
}

/// Runs a parsed command and returns the document to print.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Probe(args) => cmd_probe(args),
    }
}
