use nnoracle::harness::{
    evaluate_oracle, sweep, train_model, write_csv, EvaluationSets, SampleCounts,
};
use nnoracle::oracle::Oracle;
use nnoracle::{
    AbstractionKind, AbstractionSpec, ComparatorSpec, CustomerRecord, ExperimentConfig, InputMode, Judgment,
    ModelFile, Network, NeuralOracle, Reason, Variant, Verdict,
};

fn counts() -> SampleCounts {
    SampleCounts {
        train: 100,
        eval_correct: 100,
        eval_per_mutant: 60,
    }
}

/// Rejects amounts on a fixed lattice; arbitrary but deterministic.
struct Lattice;

impl Oracle for Lattice {
    fn judge(&self, _x: &CustomerRecord, observed_amount: u32) -> nnoracle::Result<Judgment> {
        Ok(Judgment {
            verdict: Verdict::from_accept(!observed_amount.is_multiple_of(300)),
            reason: Reason::NonClearCut,
        })
    }
}

#[test]
fn pooled_true_positive_rate_is_the_mean_per_mutant_rate() {
    let sets = EvaluationSets::generate(&counts(), 11).unwrap();
    let r = evaluate_oracle(&Lattice, &sets, None, 11).unwrap();
    assert_eq!(r.per_mutant.len(), 21);
    let mean = r.per_mutant.iter().map(|m| m.tp_rate).sum::<f64>() / 21.0;
    assert!((mean - r.tp_rate).abs() < 1e-9, "{mean} vs {}", r.tp_rate);
    assert!(r.tp_rate > 0.0 && r.tp_rate < 100.0);
    for rate in r.per_mutant.iter().flat_map(|m| [m.tp_rate, m.fp_rate]).chain([r.fp_rate]) {
        assert!((0.0..=100.0).contains(&rate));
    }
}

fn undecided_oracle(aggressiveness: u8) -> NeuralOracle {
    // All-zero weights put every output at 0.5: never clear-cut under 0.2/0.8.
    let mut net = Network::init(&[8, 24, 30], 0, 0.5).unwrap();
    net.weights_mut().iter_mut().for_each(|w| w.fill(0.0));
    NeuralOracle::new(
        net,
        AbstractionSpec::new(AbstractionKind::Uniform, 30).unwrap(),
        ComparatorSpec::categorical(aggressiveness, 0.2, 0.8).unwrap(),
        InputMode::Normalized,
    )
    .unwrap()
}

#[test]
fn aggressiveness_bounds_rejections_on_unclear_cases() {
    let sets = EvaluationSets::generate(&counts(), 2).unwrap();
    let inputs: Vec<(CustomerRecord, u32)> = sets
        .exposing
        .iter()
        .flat_map(|(id, xs)| xs.iter().map(move |x| (*x, nnoracle::subject::mutant(*id, x).unwrap().amount)))
        .chain(sets.correct.iter().map(|x| (*x, nnoracle::subject::approve(x).unwrap().amount)))
        .collect();
    let rejections = |a: u8| {
        let oracle = undecided_oracle(a);
        inputs
            .iter()
            .filter(|(x, y)| {
                let j = oracle.judge(x, *y).unwrap();
                assert_eq!(j.reason, Reason::NonClearCut);
                j.verdict.is_reject()
            })
            .count()
    };
    let all: Vec<usize> = (0..=5).map(rejections).collect();
    assert_eq!(all[0], 0);
    assert_eq!(all[5], inputs.len());
    assert!(all.iter().all(|&r| r >= all[0] && r <= all[5]));

    let r5 = evaluate_oracle(&undecided_oracle(5), &sets, None, 2).unwrap();
    assert_eq!((r5.tp_rate, r5.fp_rate), (100.0, 100.0));
}

fn quick(variant: Variant, n: usize, a: u8) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(variant, n, a).with_seeds(3, 4);
    c.counts = counts();
    c.train.epochs = 20;
    c
}

#[test]
fn sweep_csv_is_byte_identical_on_repeat() {
    let grid = vec![
        quick(Variant::Uni, 10, 0),
        quick(Variant::Uni, 10, 3),
        quick(Variant::Direct, 2, 1),
        quick(Variant::Lower, 20, 0),
    ];
    let csv = || {
        let mut buf = Vec::new();
        write_csv(&sweep(&grid), &mut buf).unwrap();
        buf
    };
    let first = csv();
    assert_eq!(first, csv());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().nth(2).unwrap().starts_with("uni,10,3,incremental,0.5,20,3,4,"));
}

#[test]
fn fp_can_be_measured_on_training_inputs() {
    let mut c = quick(Variant::Uni, 10, 0);
    c.fp_on_training_set = true;
    let model = train_model(&c).unwrap();
    let sets = EvaluationSets::generate(&c.counts, c.data_seed).unwrap();
    let on_train = nnoracle::harness::evaluate_model(&model, &c, &sets).unwrap();
    let direct = evaluate_oracle(&model.oracle, &sets, Some(&model.training_set.records), c.data_seed).unwrap();
    assert_eq!(on_train.fp_rate, direct.fp_rate);
}

#[test]
fn saved_model_predicts_bit_identically() {
    let c = quick(Variant::Center, 20, 2);
    let model = train_model(&c).unwrap();
    let file = ModelFile::from_trained(&model, &c);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("center.json");
    file.save(&path).unwrap();
    let loaded = ModelFile::load(&path).unwrap();
    assert_eq!(loaded.to_text().unwrap(), std::fs::read_to_string(&path).unwrap());
    let oracle = loaded.oracle().unwrap();
    for x in nnoracle::subject::enumerate_domain().step_by(331) {
        let a = model.oracle.predict(&x).unwrap();
        let b = oracle.predict(&x).unwrap();
        assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
}
