//! Neural networks as learned test oracles.
//!
//! A small feed-forward network is trained on sample executions of a
//! credit-approval program. Coupled with a comparator it judges whether
//! an observed output looks correct. The crate also carries the subject
//! program, its 21 mutants and the experiment harness used to measure the
//! resulting true/false positive rates.
//!
//! Module map:
//!
//! * [`subject`]: the reference program, its input domain and mutants.
//! * [`encode`]: input scaling and output abstractions (one-hot intervals,
//!   optionally under a logarithmic or logistic stretch).
//! * [`fnn`]: logistic feed-forward networks with incremental and batch
//!   back-propagation.
//! * [`oracle`]: Euclidean and categorical comparators.
//! * [`harness`]: sampling, training, evaluation and parameter sweeps.
//! * [`model`]: the versioned on-disk model format.
//! * [`record`]: the line-delimited execution record stream.

pub mod encode;
pub mod error;
pub mod fnn;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod record;
pub mod subject;

pub use encode::{AbstractionKind, AbstractionSpec, EncodedOutput, InputMode};
pub use error::{Error, Result};
pub use fnn::{LearningMode, Network, Sample, TrainConfig};
pub use harness::{EvaluationReport, ExperimentConfig, Variant};
pub use model::ModelFile;
pub use oracle::{
    Classification, ComparatorKind, ComparatorSpec, Judgment, NeuralOracle, Oracle, Reason, Verdict,
};
pub use subject::{CustomerRecord, Decision, MutantId};
