use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nnoracle::encode::normalize_input;
use nnoracle::harness::{evaluate_oracle, sample_training_set, train_model, EvaluationSets, SampleCounts};
use nnoracle::{AbstractionKind, AbstractionSpec, ExperimentConfig, InputMode, Network, TrainConfig, Variant};

fn forward(c: &mut Criterion) {
    let net = Network::init(&[8, 24, 30], 1, 0.5).unwrap();
    let x = normalize_input(&nnoracle::CustomerRecord::from_index(12_345).unwrap(), InputMode::Normalized);
    c.bench_function("forward_8_24_30", |b| b.iter(|| net.forward(black_box(&x)).unwrap()));
}

fn train_epoch(c: &mut Criterion) {
    let spec = AbstractionSpec::new(AbstractionKind::Uniform, 30).unwrap();
    let set = sample_training_set(&spec, InputMode::Normalized, 500, 1).unwrap();
    let net = Network::init(&[8, 24, 30], 1, 0.5).unwrap();
    let cfg = TrainConfig {
        epochs: 1,
        ..TrainConfig::default()
    };
    c.bench_function("incremental_epoch_500", |b| {
        b.iter(|| net.train(black_box(&set.samples), &cfg).unwrap())
    });
}

fn evaluate(c: &mut Criterion) {
    let mut config = ExperimentConfig::new(Variant::Uni, 30, 0).with_seeds(1, 1);
    config.train.epochs = 50;
    let model = train_model(&config).unwrap();
    let sets = EvaluationSets::generate(&SampleCounts::default(), 1).unwrap();
    c.bench_function("evaluate_uni30", |b| {
        b.iter(|| evaluate_oracle(&model.oracle, black_box(&sets), None, 1).unwrap())
    });
}

criterion_group!(benches, forward, train_epoch, evaluate);
criterion_main!(benches);
