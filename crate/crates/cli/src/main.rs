//! `nnoracle`: train neural test oracles for the credit-approval program,
//! evaluate them against its mutants, regenerate the experiment sweeps and
//! check streams of recorded executions.

mod svg;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nnoracle::harness::{
    self, evaluate_oracle, sample_exposing_set, sample_distinct, train_model_with_progress, EvaluationSets,
    Preset, SampleCounts, SweepRow,
};
use nnoracle::fnn::DEFAULT_HIDDEN;
use nnoracle::record::ExecutionRecord;
use nnoracle::subject::{self, MUTANTS};
use nnoracle::{
    EvaluationReport, ExperimentConfig, InputMode, LearningMode, ModelFile, MutantId, Reason, Variant,
    Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::svg::{BarGroup, Panel, Series};

const EXIT_REJECTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DIVERGED: u8 = 3;
const EXIT_MODEL: u8 = 4;
const EXIT_PARSE: u8 = 5;

#[derive(Parser)]
#[command(name = "nnoracle", version, about = "Neural networks as learned test oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a network on sampled executions and write a model file.
    Train(TrainArgs),
    /// Measure true/false positive rates of a model against the mutants.
    Eval(EvalArgs),
    /// Train and evaluate a grid of configurations; writes CSV and SVG.
    Sweep(SweepArgs),
    /// Judge a stream of execution records (JSON Lines) with a model.
    Check(CheckArgs),
    /// List the mutants of the subject program.
    Mutants,
    /// Emit execution records of the reference program or a mutant.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Direct,
    Uni,
    Unimin,
    Lower,
    Center,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Direct => Variant::Direct,
            VariantArg::Uni => Variant::Uni,
            VariantArg::Unimin => Variant::Unimin,
            VariantArg::Lower => Variant::Lower,
            VariantArg::Center => Variant::Center,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Incremental,
    Batch,
}

impl From<ModeArg> for LearningMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Incremental => LearningMode::Incremental,
            ModeArg::Batch => LearningMode::Batch,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InputArg {
    Normalized,
    Identity,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Fig2,
    Fig3,
    Fig4,
}

/// Training hyperparameters; unset values fall back to the variant's
/// defaults.
#[derive(Args, Clone)]
struct TrainingFlags {
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Clamp for the logistic derivative during training; 0 disables.
    #[arg(long)]
    derivative_clip: Option<f64>,
    /// Reshuffle the training samples every incremental epoch.
    #[arg(long)]
    shuffle: bool,
    /// Weight-initialization seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed for sampling inputs; defaults to --seed.
    #[arg(long)]
    data_seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_HIDDEN)]
    hidden: usize,
    #[arg(long, default_value_t = 500)]
    train_size: usize,
    #[arg(long, value_enum, default_value = "normalized")]
    input_mode: InputArg,
}

impl TrainingFlags {
    fn apply(&self, c: &mut ExperimentConfig) {
        if let Some(e) = self.epochs {
            c.train.epochs = e;
        }
        if let Some(lr) = self.lr {
            c.train.learning_rate = lr;
        }
        if let Some(m) = self.mode {
            c.train.mode = m.into();
        }
        if let Some(clip) = self.derivative_clip {
            c.train.derivative_clip = clip;
        }
        c.train.shuffle = self.shuffle;
        c.train.seed = self.seed;
        c.data_seed = self.data_seed.unwrap_or(self.seed);
        c.hidden = self.hidden;
        c.counts.train = self.train_size;
        c.input_mode = match self.input_mode {
            InputArg::Normalized => InputMode::Normalized,
            InputArg::Identity => InputMode::Identity,
        };
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_enum, default_value = "uni")]
    variant: VariantArg,
    /// Number of output intervals (ignored by `direct`).
    #[arg(long, default_value_t = 30)]
    n: usize,
    /// Aggressiveness stored as the model's default.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=5))]
    aggressiveness: u8,
    #[command(flatten)]
    training: TrainingFlags,
    /// Print the training error every this many epochs.
    #[arg(long, default_value_t = 100)]
    log_every: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Defaults to the aggressiveness stored in the model.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=5))]
    aggressiveness: Option<u8>,
    /// Seed for the evaluation inputs; defaults to the model's data seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 500)]
    correct: usize,
    #[arg(long, default_value_t = 500)]
    per_mutant: usize,
    /// Measure false positives on the model's own training inputs.
    #[arg(long)]
    fp_on_training_set: bool,
    /// Also write the report as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, conflicts_with_all = ["variants", "ns", "aggressiveness"])]
    preset: Option<PresetArg>,
    #[arg(long, value_enum, value_delimiter = ',')]
    variants: Vec<VariantArg>,
    #[arg(long, value_delimiter = ',', default_value = "30")]
    ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0", value_parser = clap::value_parser!(u8).range(0..=5))]
    aggressiveness: Vec<u8>,
    /// Weight-initialization seed for every point.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed for sampling inputs; defaults to --seed.
    #[arg(long)]
    data_seed: Option<u64>,
    /// Override the epoch count of every point.
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    /// Record stream; standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=5))]
    aggressiveness: Option<u8>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit error-exposing executions of this mutant instead.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=21))]
    mutant: Option<u8>,
}

/// An error carrying the process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

impl From<io::Error> for Failure {
    fn from(error: io::Error) -> Self {
        Failure { code: 1, error: error.into() }
    }
}

impl From<nnoracle::Error> for Failure {
    fn from(error: nnoracle::Error) -> Self {
        let code = match error {
            nnoracle::Error::Diverged { .. } => EXIT_DIVERGED,
            nnoracle::Error::Config(_) => EXIT_USAGE,
            nnoracle::Error::Model(_) => EXIT_MODEL,
            _ => 1,
        };
        Failure::new(code, error)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::Check(a) => check(a),
        Command::Mutants => mutants(),
        Command::Sample(a) => sample(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) if is_broken_pipe(&f.error) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>()
            .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn load_model(path: &Path) -> Result<ModelFile, Failure> {
    ModelFile::load(path)
        .with_context(|| format!("cannot load model {}", path.display()))
        .map_err(|e| Failure::new(EXIT_MODEL, e))
}

fn train(a: TrainArgs) -> Result<u8, Failure> {
    let mut config = ExperimentConfig::new(a.variant.into(), a.n, a.aggressiveness);
    a.training.apply(&mut config);
    config.validate()?;
    if a.log_every == 0 {
        return Err(Failure::new(EXIT_USAGE, anyhow::anyhow!("--log-every must be at least 1")));
    }
    let stdout = io::stdout();
    let mut log = stdout.lock();
    writeln!(
        log,
        "training {}_{} ({:?}, {} epochs, lr {}, seed {}, data seed {})",
        config.variant,
        config.n,
        config.train.mode,
        config.train.epochs,
        config.train.learning_rate,
        config.train.seed,
        config.data_seed
    )?;
    let epochs = config.train.epochs;
    let model = train_model_with_progress(&config, |epoch, mse| {
        if epoch % a.log_every == 0 || epoch == epochs {
            let _ = writeln!(log, "epoch {epoch:>6}  mse {mse:.6e}");
        }
    })?;
    writeln!(log, "final mse {:.6e}", model.mse)?;
    ModelFile::from_trained(&model, &config)
        .save(&a.out)
        .with_context(|| format!("cannot write {}", a.out.display()))
        .map_err(|e| Failure::new(EXIT_MODEL, e))?;
    writeln!(log, "wrote {}", a.out.display())?;
    Ok(0)
}

fn eval(a: EvalArgs) -> Result<u8, Failure> {
    let file = load_model(&a.model)?;
    let oracle = file.oracle().map_err(|e| Failure::new(EXIT_MODEL, e))?;
    let aggressiveness = a.aggressiveness.unwrap_or(file.comparator.aggressiveness);
    let counts = SampleCounts {
        train: file.training_samples,
        eval_correct: a.correct,
        eval_per_mutant: a.per_mutant,
    };
    let mut config = file.experiment(aggressiveness, counts);
    config.fp_on_training_set = a.fp_on_training_set;
    config.validate()?;
    let seed = a.seed.unwrap_or(file.data_seed);
    let sets = EvaluationSets::generate(&counts, seed)?;
    let training_inputs = if a.fp_on_training_set {
        Some(harness::sample_training_set(&oracle.abstraction, oracle.input_mode, file.training_samples, file.data_seed)?.records)
    } else {
        None
    };
    let oracle = oracle.with_aggressiveness(aggressiveness)?;
    let mut report = evaluate_oracle(&oracle, &sets, training_inputs.as_deref(), seed)?;
    report.mse_final = file.mse_final;
    report.config = Some(config.clone());

    print_report(&config, &report)?;
    if let Some(path) = &a.csv {
        let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        harness::write_report_csv(std::slice::from_ref(&report), BufWriter::new(f))?;
    }
    Ok(0)
}

fn print_report(config: &ExperimentConfig, r: &EvaluationReport) -> io::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{}_{} aggressiveness {}  (data seed {}, weight seed {})",
        config.variant,
        config.n,
        config.aggressiveness,
        config.data_seed,
        config.weight_seed()
    )?;
    if let Some(mse) = r.mse_final {
        writeln!(out, "training mse   {mse:.6e}")?;
    }
    writeln!(out, "true positives {:6.2}%", r.tp_rate)?;
    writeln!(out, "false positives{:6.2}% ± {:.2}", r.fp_rate, r.fp_sigma)?;
    writeln!(out)?;
    writeln!(out, "mutant   tp%      fp%    fp σ")?;
    for m in &r.per_mutant {
        writeln!(out, "{:<6} {:6.2}  {:6.2}  {:6.2}", m.id.to_string(), m.tp_rate, m.fp_rate, m.fp_sigma)?;
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<u8, Failure> {
    let data_seed = a.data_seed.unwrap_or(a.seed);
    let (name, mut grid) = match a.preset {
        Some(p) => {
            let (name, preset) = match p {
                PresetArg::Fig2 => ("fig2", Preset::Fig2),
                PresetArg::Fig3 => ("fig3", Preset::Fig3),
                PresetArg::Fig4 => ("fig4", Preset::Fig4),
            };
            (name, preset.grid(data_seed, a.seed))
        }
        None => {
            if a.variants.is_empty() {
                return Err(Failure::new(
                    EXIT_USAGE,
                    anyhow::anyhow!("give either --preset or --variants"),
                ));
            }
            let mut grid = Vec::new();
            for &v in &a.variants {
                let ns: &[usize] = if matches!(v, VariantArg::Direct) { &[2] } else { &a.ns };
                for &n in ns {
                    for &agg in &a.aggressiveness {
                        grid.push(ExperimentConfig::new(v.into(), n, agg).with_seeds(data_seed, a.seed));
                    }
                }
            }
            ("sweep", grid)
        }
    };
    if let Some(e) = a.epochs {
        grid.iter_mut().for_each(|c| c.train.epochs = e);
    }
    for c in &grid {
        c.validate()?;
    }

    fs::create_dir_all(&a.out_dir).with_context(|| format!("cannot create {}", a.out_dir.display()))?;
    let rows = harness::sweep(&grid);
    let csv_path = a.out_dir.join(format!("{name}.csv"));
    harness::write_csv(&rows, BufWriter::new(File::create(&csv_path)?))?;
    println!("wrote {}", csv_path.display());
    let fig4 = matches!(a.preset, Some(PresetArg::Fig4));
    if fig4 {
        let path = a.out_dir.join(format!("{name}_per_mutant.csv"));
        harness::write_per_mutant_csv(&rows, BufWriter::new(File::create(&path)?))?;
        println!("wrote {}", path.display());
    }
    let chart = if fig4 {
        per_mutant_chart(&rows)
    } else {
        rate_chart(name, &rows)
    };
    let svg_path = a.out_dir.join(format!("{name}.svg"));
    fs::write(&svg_path, chart)?;
    println!("wrote {}", svg_path.display());

    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    for r in rows.iter().filter_map(|r| r.result.as_ref().err().map(|e| (r, e))) {
        eprintln!("{}_{} A={}: {}", r.0.config.variant, r.0.config.n, r.0.config.aggressiveness, r.1);
    }
    if failed > 0 {
        eprintln!("{failed} of {} points failed", rows.len());
    }
    Ok(0)
}

fn series_label(c: &ExperimentConfig) -> String {
    let batched = if c.train.mode == LearningMode::Batch { "batched " } else { "" };
    if c.variant == Variant::Direct {
        format!("{batched}direct")
    } else {
        format!("{batched}{}_{}", c.variant, c.n)
    }
}

/// TP and FP panels. The x axis is aggressiveness when the grid varies it,
/// otherwise the interval count.
fn rate_chart(name: &str, rows: &[SweepRow]) -> String {
    let by_aggressiveness = {
        let mut a: Vec<u8> = rows.iter().map(|r| r.config.aggressiveness).collect();
        a.sort_unstable();
        a.dedup();
        a.len() > 1
    };
    let mut tp: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    let mut fp: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        let Ok(report) = &r.result else { continue };
        let c = &r.config;
        let (key, x) = if by_aggressiveness {
            (series_label(c), f64::from(c.aggressiveness))
        } else {
            let batched = if c.train.mode == LearningMode::Batch { "batched " } else { "" };
            (format!("{batched}{}", c.variant), c.n as f64)
        };
        tp.entry(key.clone()).or_default().push((x, report.tp_rate));
        fp.entry(key).or_default().push((x, report.fp_rate));
    }
    let series = |m: BTreeMap<String, Vec<(f64, f64)>>| {
        m.into_iter()
            .map(|(name, points)| Series { name, points })
            .collect::<Vec<_>>()
    };
    let x_label = if by_aggressiveness { "aggressiveness" } else { "N" };
    svg::render(
        name,
        &[
            Panel::Lines {
                title: "true positive rate".into(),
                x_label: x_label.into(),
                series: series(tp),
            },
            Panel::Lines {
                title: "false positive rate".into(),
                x_label: x_label.into(),
                series: series(fp),
            },
        ],
    )
}

fn per_mutant_chart(rows: &[SweepRow]) -> String {
    let categories: Vec<String> = MutantId::all().map(|id| id.to_string()).collect();
    let mut tp = Vec::new();
    let mut fp = Vec::new();
    for r in rows {
        let Ok(report) = &r.result else { continue };
        let name = format!("{} A={}", series_label(&r.config), r.config.aggressiveness);
        tp.push(BarGroup {
            name: name.clone(),
            values: report.per_mutant.iter().map(|m| m.tp_rate).collect(),
            errors: None,
        });
        fp.push(BarGroup {
            name,
            values: report.per_mutant.iter().map(|m| m.fp_rate).collect(),
            errors: Some(report.per_mutant.iter().map(|m| m.fp_sigma).collect()),
        });
    }
    svg::render(
        "fig4",
        &[
            Panel::Bars {
                title: "true positive rate per mutant".into(),
                categories: categories.clone(),
                groups: tp,
            },
            Panel::Bars {
                title: "false positive rate per mutant (±σ over 5 bags)".into(),
                categories,
                groups: fp,
            },
        ],
    )
}

fn reason_name(r: Reason) -> &'static str {
    match r {
        Reason::ObviousMatch => "obvious_match",
        Reason::ObviousMismatch => "obvious_mismatch",
        Reason::NonClearCut => "non_clear_cut",
    }
}

fn check(a: CheckArgs) -> Result<u8, Failure> {
    let file = load_model(&a.model)?;
    let mut oracle = file.oracle().map_err(|e| Failure::new(EXIT_MODEL, e))?;
    if let Some(agg) = a.aggressiveness {
        oracle = oracle.with_aggressiveness(agg)?;
    }
    let reader: Box<dyn BufRead> = match &a.input {
        Some(path) => Box::new(BufReader::new(
            File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let mut out = BufWriter::new(io::stdout().lock());
    let (mut accepted, mut rejected, mut errors) = (0usize, 0usize, 0usize);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = i + 1;
        let judged = ExecutionRecord::parse_line(&line)
            .and_then(|r| oracle.assess(&r.input, r.amount));
        let entry = match judged {
            Ok(a) => {
                match a.judgment.verdict {
                    Verdict::Accept => accepted += 1,
                    Verdict::Reject => rejected += 1,
                }
                json!({
                    "line": n,
                    "verdict": if a.judgment.verdict == Verdict::Accept { "accept" } else { "reject" },
                    "reason": reason_name(a.judgment.reason),
                    "observed_winner": a.observed_winner,
                    "predicted_winner": a.predicted_winner,
                    "confidence": a.confidence,
                })
            }
            Err(e) => {
                errors += 1;
                json!({ "line": n, "error": e.to_string() })
            }
        };
        writeln!(out, "{entry}")?;
    }
    writeln!(
        out,
        "{}",
        json!({ "summary": { "records": accepted + rejected, "accepted": accepted, "rejected": rejected, "errors": errors } })
    )?;
    out.flush()?;
    Ok(if errors > 0 {
        EXIT_PARSE
    } else if rejected > 0 {
        EXIT_REJECTED
    } else {
        0
    })
}

fn mutants() -> Result<u8, Failure> {
    let mut out = io::stdout().lock();
    writeln!(out, "{:<4} {:>4}  {:<24} mutated", "id", "line", "original")?;
    for m in &MUTANTS {
        writeln!(out, "{:<4} {:>4}  {:<24} {}", format!("M{}", m.id), m.line, m.original, m.mutated)?;
    }
    Ok(0)
}

fn sample(a: SampleArgs) -> Result<u8, Failure> {
    let (inputs, id) = match a.mutant {
        Some(m) => {
            let id = MutantId::new(i64::from(m))?;
            (sample_exposing_set(id, a.count, a.seed)?, Some(id))
        }
        None => (sample_distinct(&mut ChaCha8Rng::seed_from_u64(a.seed), a.count)?, None),
    };
    let mut out = BufWriter::new(io::stdout().lock());
    for x in inputs {
        let decision = match id {
            Some(id) => subject::mutant(id, &x)?,
            None => subject::approve(&x)?,
        };
        let record = ExecutionRecord {
            input: x,
            amount: decision.amount,
        };
        writeln!(out, "{}", record.to_line())?;
    }
    out.flush()?;
    Ok(0)
}
