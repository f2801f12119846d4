//! Experiment driver: sampling, training, evaluation and sweeps.
//!
//! Rates follow the operational reading used in the experiment reports:
//! the *true positive rate* is the percentage of error-exposing mutant
//! executions the oracle rejects, the *false positive rate* the percentage
//! of correct executions it rejects. (This is the reverse polarity of
//! [`crate::oracle::classify`], which treats "correct" as positive.)
//!
//! All randomness derives from `data_seed` and `weight_seed`. Each purpose
//! draws from its own ChaCha stream of the data seed, so changing for
//! instance the number of mutant samples does not perturb the training set.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encode::{encode_output, normalize_input, AbstractionKind, AbstractionSpec, InputMode, INPUT_DIM};
use crate::error::{Error, Result};
use crate::fnn::{LearningMode, Network, Sample, TrainConfig, DEFAULT_HIDDEN};
use crate::oracle::{ComparatorSpec, Judgment, NeuralOracle, Oracle, Reason, Verdict};
use crate::subject::{self, enumerate_domain, CustomerRecord, MutantId, DOMAIN_SIZE};

/// Draws allowed before rejection sampling falls back to enumerating the
/// whole domain.
pub const REJECTION_BUDGET: usize = 10_000_000;

pub const BAG_COUNT: usize = 5;

const STREAM_TRAIN: u64 = 0;
const STREAM_CORRECT: u64 = 1;
const STREAM_EXPOSING: u64 = 100;
const STREAM_MUTANT_CORRECT: u64 = 200;
const STREAM_BAGS: u64 = 300;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The five network/comparator configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// One output predicting the normalized amount; Euclidean comparator.
    Direct,
    /// Uniform intervals, thresholds 0.2/0.8.
    Uni,
    /// Uniform intervals, thresholds 0.1/0.9.
    Unimin,
    /// Intervals over the logarithmic stretch, thresholds 0.2/0.8.
    Lower,
    /// Intervals over the logistic stretch, thresholds 0.2/0.8.
    Center,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Direct,
        Variant::Uni,
        Variant::Unimin,
        Variant::Lower,
        Variant::Center,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Direct => "direct",
            Variant::Uni => "uni",
            Variant::Unimin => "unimin",
            Variant::Lower => "lower",
            Variant::Center => "center",
        }
    }

    pub fn abstraction(self, n: usize) -> Result<AbstractionSpec> {
        let kind = match self {
            Variant::Direct => AbstractionKind::Direct,
            Variant::Uni | Variant::Unimin => AbstractionKind::Uniform,
            Variant::Lower => AbstractionKind::LowStretch,
            Variant::Center => AbstractionKind::CenterStretch,
        };
        AbstractionSpec::new(kind, n)
    }

    pub fn comparator(self, aggressiveness: u8) -> Result<ComparatorSpec> {
        match self {
            Variant::Direct => ComparatorSpec::euclidean(aggressiveness),
            Variant::Unimin => ComparatorSpec::categorical(aggressiveness, 0.1, 0.9),
            _ => ComparatorSpec::categorical(aggressiveness, 0.2, 0.8),
        }
    }

    /// Default training: 10000 epochs at rate 0.1 for `direct`, 1500 at 0.5
    /// otherwise, incremental in both cases.
    pub fn default_train(self) -> TrainConfig {
        match self {
            Variant::Direct => TrainConfig {
                epochs: 10_000,
                learning_rate: 0.1,
                ..TrainConfig::default()
            },
            _ => TrainConfig::default(),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::config(format!("unknown variant `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleCounts {
    pub train: usize,
    pub eval_correct: usize,
    pub eval_per_mutant: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts {
            train: 500,
            eval_correct: 500,
            eval_per_mutant: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub n: usize,
    pub aggressiveness: u8,
    /// `train.seed` is the weight-initialization seed.
    pub train: TrainConfig,
    pub data_seed: u64,
    pub counts: SampleCounts,
    pub hidden: usize,
    pub input_mode: InputMode,
    /// Measure false positives on the training inputs instead of a fresh
    /// sample.
    pub fp_on_training_set: bool,
}

impl ExperimentConfig {
    pub fn new(variant: Variant, n: usize, aggressiveness: u8) -> Self {
        ExperimentConfig {
            variant,
            n,
            aggressiveness,
            train: variant.default_train(),
            data_seed: 0,
            counts: SampleCounts::default(),
            hidden: DEFAULT_HIDDEN,
            input_mode: InputMode::Normalized,
            fp_on_training_set: false,
        }
    }

    pub fn with_seeds(mut self, data_seed: u64, weight_seed: u64) -> Self {
        self.data_seed = data_seed;
        self.train.seed = weight_seed;
        self
    }

    pub fn weight_seed(&self) -> u64 {
        self.train.seed
    }

    pub fn abstraction(&self) -> Result<AbstractionSpec> {
        self.variant.abstraction(self.n)
    }

    pub fn comparator(&self) -> Result<ComparatorSpec> {
        self.variant.comparator(self.aggressiveness)
    }

    pub fn layer_sizes(&self) -> Result<Vec<usize>> {
        Ok(vec![INPUT_DIM, self.hidden, self.abstraction()?.output_dim()])
    }

    pub fn validate(&self) -> Result<()> {
        self.abstraction()?;
        self.comparator()?;
        self.train.validate()?;
        if self.hidden == 0 {
            return Err(Error::config("hidden layer must have at least one neuron"));
        }
        let c = self.counts;
        for (name, v) in [
            ("train", c.train),
            ("eval_correct", c.eval_correct),
            ("eval_per_mutant", c.eval_per_mutant),
        ] {
            if v == 0 || v > DOMAIN_SIZE {
                return Err(Error::config(format!("sample count {name}={v} out of range")));
            }
        }
        if !c.eval_correct.is_multiple_of(BAG_COUNT) {
            return Err(Error::config(format!(
                "eval_correct={} must split into {BAG_COUNT} equal bags",
                c.eval_correct
            )));
        }
        if self.fp_on_training_set && !c.train.is_multiple_of(BAG_COUNT) {
            return Err(Error::config(format!(
                "train={} must split into {BAG_COUNT} equal bags",
                c.train
            )));
        }
        Ok(())
    }

    /// Everything that affects the trained network; configurations sharing
    /// a key can share one training run.
    fn training_key(&self) -> String {
        let mut key = self.clone();
        key.aggressiveness = 0;
        key.counts.eval_correct = 0;
        key.counts.eval_per_mutant = 0;
        key.fp_on_training_set = false;
        format!("{key:?}")
    }
}

/// `count` distinct records, uniformly without replacement, in draw order.
pub fn sample_distinct(rng: &mut impl Rng, count: usize) -> Result<Vec<CustomerRecord>> {
    if count > DOMAIN_SIZE {
        return Err(Error::domain(format!(
            "cannot draw {count} distinct records from {DOMAIN_SIZE}"
        )));
    }
    index::sample(rng, DOMAIN_SIZE, count)
        .into_iter()
        .map(CustomerRecord::from_index)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub records: Vec<CustomerRecord>,
    pub samples: Vec<Sample>,
}

pub fn make_sample(
    spec: &AbstractionSpec,
    input_mode: InputMode,
    x: &CustomerRecord,
    amount: u32,
) -> Result<Sample> {
    Ok(Sample {
        input: normalize_input(x, input_mode).to_vec(),
        target: encode_output(spec, f64::from(amount))?.values,
    })
}

/// `count` distinct random inputs labelled with the encoded output of the
/// reference program.
pub fn sample_training_set(
    spec: &AbstractionSpec,
    input_mode: InputMode,
    count: usize,
    seed: u64,
) -> Result<TrainingSet> {
    let records = sample_distinct(&mut rng_for(seed, STREAM_TRAIN), count)?;
    let samples = records
        .iter()
        .map(|x| make_sample(spec, input_mode, x, subject::approve(x)?.amount))
        .collect::<Result<_>>()?;
    Ok(TrainingSet { records, samples })
}

/// `count` distinct error-exposing inputs of mutant `id`, by uniform
/// rejection sampling.
pub fn sample_exposing_set(id: MutantId, count: usize, seed: u64) -> Result<Vec<CustomerRecord>> {
    sample_exposing_with_budget(id, count, &mut rng_for(seed, STREAM_EXPOSING + u64::from(id.get())), REJECTION_BUDGET)
}

fn sample_exposing_with_budget(
    id: MutantId,
    count: usize,
    rng: &mut ChaCha8Rng,
    budget: usize,
) -> Result<Vec<CustomerRecord>> {
    let mut taken = vec![false; DOMAIN_SIZE];
    let mut out = Vec::with_capacity(count);
    for _ in 0..budget {
        if out.len() == count {
            return Ok(out);
        }
        let i = rng.gen_range(0..DOMAIN_SIZE);
        if taken[i] {
            continue;
        }
        let x = CustomerRecord::from_index(i)?;
        if subject::is_exposing(id, &x)? {
            taken[i] = true;
            out.push(x);
        }
    }
    if out.len() == count {
        return Ok(out);
    }
    let pool: Vec<CustomerRecord> = enumerate_domain()
        .filter(|x| subject::is_exposing(id, x).unwrap_or(false))
        .collect();
    if pool.len() < count {
        return Err(Error::InsufficientExposing {
            mutant: id.get(),
            available: pool.len(),
            requested: count,
        });
    }
    Ok(pool.choose_multiple(rng, count).copied().collect())
}

/// Inputs on which a trained oracle is judged.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSets {
    /// Correct executions for the aggregate false positive rate.
    pub correct: Vec<CustomerRecord>,
    /// Error-exposing inputs per mutant, in mutant order.
    pub exposing: Vec<(MutantId, Vec<CustomerRecord>)>,
    /// A separate correct sample per mutant experiment, for the per-mutant
    /// false positive rate and its spread.
    pub mutant_correct: Vec<(MutantId, Vec<CustomerRecord>)>,
}

impl EvaluationSets {
    pub fn generate(counts: &SampleCounts, seed: u64) -> Result<Self> {
        let correct = sample_distinct(&mut rng_for(seed, STREAM_CORRECT), counts.eval_correct)?;
        let exposing = MutantId::all()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|id| Ok((id, sample_exposing_set(id, counts.eval_per_mutant, seed)?)))
            .collect::<Result<Vec<_>>>()?;
        let mutant_correct = MutantId::all()
            .map(|id| {
                let mut rng = rng_for(seed, STREAM_MUTANT_CORRECT + u64::from(id.get()));
                Ok((id, sample_distinct(&mut rng, counts.eval_correct)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EvaluationSets {
            correct,
            exposing,
            mutant_correct,
        })
    }
}

/// Percentage of rejections.
pub fn rejection_rate(verdicts: &[Verdict]) -> f64 {
    if verdicts.is_empty() {
        return 0.0;
    }
    100.0 * verdicts.iter().filter(|v| v.is_reject()).count() as f64 / verdicts.len() as f64
}

/// Splits 500 verdicts at random into 5 bags of 100 and returns the
/// population standard deviation of the bags' rejection rates, in percent.
pub fn bagged_stddev(verdicts: &[Verdict], seed: u64) -> Result<f64> {
    if verdicts.len() != 500 {
        return Err(Error::domain(format!(
            "bagged deviation needs exactly 500 judgments, got {}",
            verdicts.len()
        )));
    }
    bagged_stddev_with(verdicts, BAG_COUNT, seed)
}

pub fn bagged_stddev_with(verdicts: &[Verdict], bags: usize, seed: u64) -> Result<f64> {
    if bags == 0 || verdicts.is_empty() || !verdicts.len().is_multiple_of(bags) {
        return Err(Error::domain(format!(
            "{} judgments do not split into {bags} equal bags",
            verdicts.len()
        )));
    }
    let mut shuffled = verdicts.to_vec();
    shuffled.shuffle(&mut rng_for(seed, STREAM_BAGS));
    let rates: Vec<f64> = shuffled
        .chunks_exact(verdicts.len() / bags)
        .map(rejection_rate)
        .collect();
    let mean = rates.iter().sum::<f64>() / bags as f64;
    let var = rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / bags as f64;
    Ok(var.sqrt())
}

/// `rate ± sigma` clamped to `[0, 100]`.
pub fn error_bar(rate: f64, sigma: f64) -> (f64, f64) {
    ((rate - sigma).clamp(0.0, 100.0), (rate + sigma).clamp(0.0, 100.0))
}

/// Rejects exactly the executions whose amount differs from the reference
/// program. Scores TP = 100 and FP = 0 by construction.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReferenceOracle;

impl Oracle for ReferenceOracle {
    fn judge(&self, x: &CustomerRecord, observed_amount: u32) -> Result<Judgment> {
        let correct = subject::approve(x)?.amount == observed_amount;
        Ok(Judgment {
            verdict: Verdict::from_accept(correct),
            reason: if correct {
                Reason::ObviousMatch
            } else {
                Reason::ObviousMismatch
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantRates {
    pub id: MutantId,
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub fp_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub tp_rate: f64,
    pub fp_rate: f64,
    /// Bagged standard deviation of `fp_rate`.
    pub fp_sigma: f64,
    pub per_mutant: Vec<MutantRates>,
    pub mse_final: Option<f64>,
    pub config: Option<ExperimentConfig>,
}

impl EvaluationReport {
    pub fn per_mutant_tp(&self) -> impl Iterator<Item = (MutantId, f64)> + '_ {
        self.per_mutant.iter().map(|m| (m.id, m.tp_rate))
    }

    pub fn per_mutant_fp_sigma(&self) -> impl Iterator<Item = (MutantId, f64)> + '_ {
        self.per_mutant.iter().map(|m| (m.id, m.fp_sigma))
    }

    pub fn mean_per_mutant_fp(&self) -> f64 {
        self.per_mutant.iter().map(|m| m.fp_rate).sum::<f64>() / self.per_mutant.len().max(1) as f64
    }
}

fn verdicts_on(
    oracle: &impl Oracle,
    records: &[CustomerRecord],
    program: impl Fn(&CustomerRecord) -> Result<u32>,
) -> Result<Vec<Verdict>> {
    records
        .iter()
        .map(|x| Ok(oracle.judge(x, program(x)?)?.verdict))
        .collect()
}

/// Judges every evaluation execution with `oracle`. `correct_override`
/// replaces the aggregate false-positive inputs when given.
pub fn evaluate_oracle(
    oracle: &impl Oracle,
    sets: &EvaluationSets,
    correct_override: Option<&[CustomerRecord]>,
    seed: u64,
) -> Result<EvaluationReport> {
    let approve_amount = |x: &CustomerRecord| Ok(subject::approve(x)?.amount);
    let correct = correct_override.unwrap_or(&sets.correct);
    let fp_verdicts = verdicts_on(oracle, correct, approve_amount)?;

    let mut pooled_rejects = 0usize;
    let mut pooled_total = 0usize;
    let mut per_mutant = Vec::with_capacity(sets.exposing.len());
    for ((id, exposing), (cid, mutant_correct)) in sets.exposing.iter().zip(&sets.mutant_correct) {
        debug_assert_eq!(id, cid);
        let tp = verdicts_on(oracle, exposing, |x| Ok(subject::mutant(*id, x)?.amount))?;
        pooled_rejects += tp.iter().filter(|v| v.is_reject()).count();
        pooled_total += tp.len();
        let fp = verdicts_on(oracle, mutant_correct, approve_amount)?;
        per_mutant.push(MutantRates {
            id: *id,
            tp_rate: rejection_rate(&tp),
            fp_rate: rejection_rate(&fp),
            fp_sigma: bagged_stddev_with(&fp, BAG_COUNT, seed ^ u64::from(id.get()))?,
        });
    }

    Ok(EvaluationReport {
        tp_rate: if pooled_total == 0 {
            0.0
        } else {
            100.0 * pooled_rejects as f64 / pooled_total as f64
        },
        fp_rate: rejection_rate(&fp_verdicts),
        fp_sigma: bagged_stddev_with(&fp_verdicts, BAG_COUNT, seed)?,
        per_mutant,
        mse_final: None,
        config: None,
    })
}

/// A trained oracle together with its training record.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub oracle: NeuralOracle,
    pub mse: f64,
    pub training_set: TrainingSet,
}

pub fn train_model(config: &ExperimentConfig) -> Result<TrainedModel> {
    train_model_with_progress(config, |_, _| {})
}

pub fn train_model_with_progress(
    config: &ExperimentConfig,
    progress: impl FnMut(usize, f64),
) -> Result<TrainedModel> {
    config.validate()?;
    let abstraction = config.abstraction()?;
    let training_set =
        sample_training_set(&abstraction, config.input_mode, config.counts.train, config.data_seed)?;
    let init = Network::init(&config.layer_sizes()?, config.train.seed, config.train.init_range)?;
    let network = init.train_with_progress(&training_set.samples, &config.train, progress)?;
    let mse = network.mse(&training_set.samples)?;
    let oracle = NeuralOracle::new(network, abstraction, config.comparator()?, config.input_mode)?;
    Ok(TrainedModel {
        oracle,
        mse,
        training_set,
    })
}

/// Evaluates an already trained model under `config`'s aggressiveness.
pub fn evaluate_model(
    model: &TrainedModel,
    config: &ExperimentConfig,
    sets: &EvaluationSets,
) -> Result<EvaluationReport> {
    let oracle = model.oracle.with_aggressiveness(config.aggressiveness)?;
    let override_set = config
        .fp_on_training_set
        .then_some(model.training_set.records.as_slice());
    let mut report = evaluate_oracle(&oracle, sets, override_set, config.data_seed)?;
    report.mse_final = Some(model.mse);
    report.config = Some(config.clone());
    Ok(report)
}

/// Trains per `config` and evaluates on freshly drawn inputs.
pub fn evaluate(config: &ExperimentConfig) -> Result<EvaluationReport> {
    let model = train_model(config)?;
    let sets = EvaluationSets::generate(&config.counts, config.data_seed)?;
    evaluate_model(&model, config, &sets)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub config: ExperimentConfig,
    pub result: std::result::Result<EvaluationReport, String>,
}

/// Evaluates every grid point. Points that differ only in aggressiveness
/// (or evaluation counts) share one training run. Training runs execute in
/// parallel; rows come back in grid order.
pub fn sweep(grid: &[ExperimentConfig]) -> Vec<SweepRow> {
    let mut keys: Vec<String> = Vec::new();
    let mut representative: HashMap<String, &ExperimentConfig> = HashMap::new();
    for c in grid {
        let key = c.training_key();
        if let std::collections::hash_map::Entry::Vacant(e) = representative.entry(key.clone()) {
            keys.push(key);
            e.insert(c);
        }
    }
    let trained: HashMap<&String, std::result::Result<TrainedModel, String>> = keys
        .par_iter()
        .map(|k| (k, train_model(representative[k]).map_err(|e| e.to_string())))
        .collect();

    let mut set_cache: HashMap<(SampleCounts, u64), std::result::Result<EvaluationSets, String>> =
        HashMap::new();
    for c in grid {
        set_cache
            .entry((c.counts, c.data_seed))
            .or_insert_with(|| EvaluationSets::generate(&c.counts, c.data_seed).map_err(|e| e.to_string()));
    }

    grid.par_iter()
        .map(|c| {
            let result = (|| {
                let model = trained[&c.training_key()].as_ref().map_err(Clone::clone)?;
                let sets = set_cache[&(c.counts, c.data_seed)].as_ref().map_err(Clone::clone)?;
                evaluate_model(model, c, sets).map_err(|e| e.to_string())
            })();
            SweepRow {
                config: c.clone(),
                result,
            }
        })
        .collect()
}

pub const CSV_HEADER: [&str; 12] = [
    "variant",
    "n",
    "aggressiveness",
    "mode",
    "lr",
    "epochs",
    "data_seed",
    "weight_seed",
    "mse_final",
    "tp_rate",
    "fp_rate",
    "fp_sigma",
];

pub fn csv_header() -> Vec<String> {
    CSV_HEADER
        .iter()
        .map(|s| s.to_string())
        .chain(MutantId::all().map(|id| format!("m{}_tp", id.get())))
        .chain(std::iter::once("error".to_string()))
        .collect()
}

fn mode_name(mode: LearningMode) -> &'static str {
    match mode {
        LearningMode::Incremental => "incremental",
        LearningMode::Batch => "batch",
    }
}

fn csv_row(config: &ExperimentConfig, result: std::result::Result<&EvaluationReport, &str>) -> Vec<String> {
    let mut row = vec![
        config.variant.to_string(),
        config.n.to_string(),
        config.aggressiveness.to_string(),
        mode_name(config.train.mode).to_string(),
        config.train.learning_rate.to_string(),
        config.train.epochs.to_string(),
        config.data_seed.to_string(),
        config.weight_seed().to_string(),
    ];
    match result {
        Ok(r) => {
            row.push(r.mse_final.map(|m| format!("{m:.6e}")).unwrap_or_default());
            row.extend([r.tp_rate, r.fp_rate, r.fp_sigma].map(|v| format!("{v:.2}")));
            row.extend(r.per_mutant.iter().map(|m| format!("{:.2}", m.tp_rate)));
            row.push(String::new());
        }
        Err(e) => {
            row.extend(std::iter::repeat_n(String::new(), 4 + MutantId::COUNT));
            row.push(e.to_string());
        }
    }
    row
}

/// Writes one row per evaluation. Rates carry two decimals; a failed
/// point leaves the numeric columns empty and fills `error`.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header())?;
    for r in rows {
        w.write_record(csv_row(&r.config, r.result.as_ref().map_err(String::as_str)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report_csv<W: Write>(reports: &[EvaluationReport], out: W) -> Result<()> {
    let rows: Vec<SweepRow> = reports
        .iter()
        .map(|r| SweepRow {
            config: r.config.clone().unwrap_or_else(|| ExperimentConfig::new(Variant::Uni, 30, 0)),
            result: Ok(r.clone()),
        })
        .collect();
    write_csv(&rows, out)
}

/// Per-mutant rates, one row per (configuration, mutant).
pub fn write_per_mutant_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variant", "n", "aggressiveness", "mutant", "tp_rate", "fp_rate", "fp_sigma"])?;
    for r in rows {
        let Ok(report) = &r.result else { continue };
        for m in &report.per_mutant {
            w.write_record([
                r.config.variant.to_string(),
                r.config.n.to_string(),
                r.config.aggressiveness.to_string(),
                m.id.to_string(),
                format!("{:.2}", m.tp_rate),
                format!("{:.2}", m.fp_rate),
                format!("{:.2}", m.fp_sigma),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Canned grids for the standard comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Variants against aggressiveness 0..=5.
    Fig2,
    /// uni, lower and center against N = 10..=60 at aggressiveness 0.
    Fig3,
    /// uni_30 and lower_30 at aggressiveness 0, per mutant.
    Fig4,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            _ => Err(Error::config(format!("unknown preset `{s}`"))),
        }
    }
}

impl Preset {
    pub fn grid(self, data_seed: u64, weight_seed: u64) -> Vec<ExperimentConfig> {
        let point = |v: Variant, n: usize, a: u8| ExperimentConfig::new(v, n, a).with_seeds(data_seed, weight_seed);
        match self {
            Preset::Fig2 => {
                let mut grid = Vec::new();
                for a in 0..=5 {
                    grid.push(point(Variant::Direct, 2, a));
                    grid.push(point(Variant::Uni, 30, a));
                    grid.push(point(Variant::Unimin, 10, a));
                    let mut batched = point(Variant::Unimin, 10, a);
                    batched.train.mode = LearningMode::Batch;
                    grid.push(batched);
                }
                grid
            }
            Preset::Fig3 => [Variant::Uni, Variant::Lower, Variant::Center]
                .into_iter()
                .flat_map(|v| (1..=6).map(move |k| (v, 10 * k)))
                .map(|(v, n)| point(v, n, 0))
                .collect(),
            Preset::Fig4 => vec![point(Variant::Uni, 30, 0), point(Variant::Lower, 30, 0)],
        }
    }
}
