//! Comparators: turning a network prediction and an observed output into
//! an accept/reject judgment.
//!
//! The categorical comparator looks at the winning interval of the
//! observed output (`k`) and of the network output (`j`), and at the
//! network's activation on its own winner (`c`). Two cases are clear-cut:
//!
//! * `k = j` and `|1 − c| < th_low`: accept (obvious match),
//! * `k ≠ j` and `c > th_high`: reject (obvious mismatch).
//!
//! Everything else is decided by the aggressiveness level `A`:
//!
//! | A | accept when                       |
//! |---|-----------------------------------|
//! | 0 | always                            |
//! | 1 | not (`k = j` and `|1 − c| > th_high`) |
//! | 2 | `k = j`                           |
//! | 3 | `k ≠ j` or `|1 − c| > th_high`    |
//! | 4 | `|agree − c| < th_low`            |
//! | 5 | never                             |
//!
//! where `agree` is 1.0 when `k = j` and 0.0 otherwise. Inequalities are
//! strict, so a confidence sitting exactly on a threshold is non-clear-cut.

use serde::{Deserialize, Serialize};

use crate::encode::{encode_output, normalize_input, winner, AbstractionKind, AbstractionSpec, InputMode};
use crate::error::{Error, Result};
use crate::fnn::Network;
use crate::subject::CustomerRecord;

pub const MAX_AGGRESSIVENESS: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparatorKind {
    Euclidean,
    Categorical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparatorSpec {
    pub kind: ComparatorKind,
    pub aggressiveness: u8,
    pub eps_max: f64,
    pub th_low: f64,
    pub th_high: f64,
}

impl ComparatorSpec {
    pub const EPS_MAX: f64 = 0.09;
    pub const EPS_STEP: f64 = 0.01;

    pub fn euclidean(aggressiveness: u8) -> Result<Self> {
        let spec = ComparatorSpec {
            kind: ComparatorKind::Euclidean,
            aggressiveness,
            eps_max: Self::EPS_MAX,
            th_low: 0.2,
            th_high: 0.8,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn categorical(aggressiveness: u8, th_low: f64, th_high: f64) -> Result<Self> {
        let spec = ComparatorSpec {
            kind: ComparatorKind::Categorical,
            aggressiveness,
            eps_max: Self::EPS_MAX,
            th_low,
            th_high,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.aggressiveness > MAX_AGGRESSIVENESS {
            return Err(Error::config(format!(
                "aggressiveness {} outside 0..={MAX_AGGRESSIVENESS}",
                self.aggressiveness
            )));
        }
        if !(0.0 < self.th_low && self.th_low < self.th_high && self.th_high < 1.0) {
            return Err(Error::config(format!(
                "thresholds must satisfy 0 < {} < {} < 1",
                self.th_low, self.th_high
            )));
        }
        if !(self.eps_max > 0.0 && self.eps_max.is_finite()) {
            return Err(Error::config("eps_max must be positive"));
        }
        Ok(())
    }

    pub fn with_aggressiveness(self, aggressiveness: u8) -> Result<Self> {
        let spec = ComparatorSpec {
            aggressiveness,
            ..self
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Acceptance radius of the Euclidean comparator.
    pub fn epsilon(&self) -> f64 {
        self.eps_max - Self::EPS_STEP * f64::from(self.aggressiveness)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn from_accept(accept: bool) -> Self {
        if accept {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    pub fn is_reject(self) -> bool {
        self == Verdict::Reject
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    ObviousMatch,
    ObviousMismatch,
    NonClearCut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Judgment {
    pub verdict: Verdict,
    pub reason: Reason,
}

impl Judgment {
    fn new(verdict: Verdict, reason: Reason) -> Self {
        Judgment { verdict, reason }
    }
}

/// Accept iff `|observed − predicted| < eps_max − 0.01·A`. Both values are
/// normalized amounts.
pub fn judge_euclidean(spec: &ComparatorSpec, predicted: f64, observed: f64) -> Result<Judgment> {
    if spec.kind != ComparatorKind::Euclidean {
        return Err(Error::config("judge_euclidean needs a Euclidean comparator"));
    }
    spec.validate()?;
    Ok(if (observed - predicted).abs() < spec.epsilon() {
        Judgment::new(Verdict::Accept, Reason::ObviousMatch)
    } else {
        Judgment::new(Verdict::Reject, Reason::ObviousMismatch)
    })
}

pub fn judge_categorical(spec: &ComparatorSpec, z_obs: &[f64], z_net: &[f64]) -> Result<Judgment> {
    if spec.kind != ComparatorKind::Categorical {
        return Err(Error::config("judge_categorical needs a categorical comparator"));
    }
    spec.validate()?;
    if z_obs.len() != z_net.len() {
        return Err(Error::domain(format!(
            "observed output has {} components, network output {}",
            z_obs.len(),
            z_net.len()
        )));
    }
    let k = winner(z_obs)?;
    let j = winner(z_net)?;
    Ok(categorical_case(spec, k == j, z_net[j]))
}

/// The case table on its own: `agree` is whether the winners coincide and
/// `c` the network's activation on its winner.
pub fn categorical_case(spec: &ComparatorSpec, agree: bool, c: f64) -> Judgment {
    let agree_v = if agree { 1.0 } else { 0.0 };
    let support = (agree_v - c).abs();
    let doubt = (1.0 - c).abs();
    let (lo, hi) = (spec.th_low, spec.th_high);

    if agree && support < lo {
        return Judgment::new(Verdict::Accept, Reason::ObviousMatch);
    }
    if !agree && support > hi {
        return Judgment::new(Verdict::Reject, Reason::ObviousMismatch);
    }
    let accept = match spec.aggressiveness {
        0 => true,
        1 => !(agree && doubt > hi),
        2 => agree,
        3 => !agree || doubt > hi,
        4 => support < lo,
        _ => false,
    };
    Judgment::new(Verdict::from_accept(accept), Reason::NonClearCut)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    TruePositive,
    TrueNegative,
    FalsePositive,
    FalseNegative,
}

/// Agreement taxonomy with "correct" as the positive class: an accepted
/// correct execution is a true positive, a rejected incorrect one a true
/// negative. Note the experiment reports use the opposite reading (see
/// [`crate::harness`]).
pub fn classify(verdict: Verdict, ground_truth_correct: bool) -> Classification {
    match (verdict, ground_truth_correct) {
        (Verdict::Accept, true) => Classification::TruePositive,
        (Verdict::Reject, false) => Classification::TrueNegative,
        (Verdict::Reject, true) => Classification::FalsePositive,
        (Verdict::Accept, false) => Classification::FalseNegative,
    }
}

/// Anything that can judge an execution of the subject program.
pub trait Oracle {
    fn judge(&self, x: &CustomerRecord, observed_amount: u32) -> Result<Judgment>;
}

/// Details of one neural judgment, for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assessment {
    pub judgment: Judgment,
    /// Winning interval of the observed output (categorical only).
    pub observed_winner: Option<usize>,
    /// Winning interval of the network output (categorical only).
    pub predicted_winner: Option<usize>,
    /// Network activation on its winner, or its scalar prediction.
    pub confidence: f64,
}

/// A trained network coupled to a comparator.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuralOracle {
    pub network: Network,
    pub abstraction: AbstractionSpec,
    pub comparator: ComparatorSpec,
    pub input_mode: InputMode,
}

impl NeuralOracle {
    pub fn new(
        network: Network,
        abstraction: AbstractionSpec,
        comparator: ComparatorSpec,
        input_mode: InputMode,
    ) -> Result<Self> {
        abstraction.validate()?;
        comparator.validate()?;
        if network.output_dim() != abstraction.output_dim() {
            return Err(Error::config(format!(
                "network has {} outputs, abstraction needs {}",
                network.output_dim(),
                abstraction.output_dim()
            )));
        }
        if network.input_dim() != crate::encode::INPUT_DIM {
            return Err(Error::config(format!(
                "network has {} inputs, expected {}",
                network.input_dim(),
                crate::encode::INPUT_DIM
            )));
        }
        let direct = abstraction.kind == AbstractionKind::Direct;
        if direct != (comparator.kind == ComparatorKind::Euclidean) {
            return Err(Error::config(
                "direct encoding pairs with the Euclidean comparator, abstractions with the categorical one",
            ));
        }
        Ok(NeuralOracle {
            network,
            abstraction,
            comparator,
            input_mode,
        })
    }

    pub fn with_aggressiveness(&self, aggressiveness: u8) -> Result<Self> {
        Ok(NeuralOracle {
            comparator: self.comparator.with_aggressiveness(aggressiveness)?,
            ..self.clone()
        })
    }

    pub fn predict(&self, x: &CustomerRecord) -> Result<Vec<f64>> {
        x.validate()?;
        self.network.forward(&normalize_input(x, self.input_mode))
    }

    pub fn assess(&self, x: &CustomerRecord, observed_amount: u32) -> Result<Assessment> {
        let z_net = self.predict(x)?;
        let z_obs = encode_output(&self.abstraction, f64::from(observed_amount))?;
        match self.comparator.kind {
            ComparatorKind::Euclidean => Ok(Assessment {
                judgment: judge_euclidean(&self.comparator, z_net[0], z_obs.values[0])?,
                observed_winner: None,
                predicted_winner: None,
                confidence: z_net[0],
            }),
            ComparatorKind::Categorical => {
                let j = winner(&z_net)?;
                Ok(Assessment {
                    judgment: judge_categorical(&self.comparator, &z_obs.values, &z_net)?,
                    observed_winner: Some(winner(&z_obs.values)?),
                    predicted_winner: Some(j),
                    confidence: z_net[j],
                })
            }
        }
    }
}

impl Oracle for NeuralOracle {
    fn judge(&self, x: &CustomerRecord, observed_amount: u32) -> Result<Judgment> {
        self.assess(x, observed_amount).map(|a| a.judgment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(a: u8) -> ComparatorSpec {
        ComparatorSpec::categorical(a, 0.2, 0.8).unwrap()
    }

    #[test]
    fn euclidean_examples() {
        let e0 = ComparatorSpec::euclidean(0).unwrap();
        assert_eq!(judge_euclidean(&e0, 0.5, 0.5).unwrap().verdict, Verdict::Accept);
        assert_eq!(judge_euclidean(&e0, 0.0, 0.09).unwrap().verdict, Verdict::Reject);
        assert_eq!(judge_euclidean(&e0, 0.0, 0.089).unwrap().verdict, Verdict::Accept);
        let e5 = ComparatorSpec::euclidean(5).unwrap();
        assert_eq!(judge_euclidean(&e5, 0.0, 0.05).unwrap().verdict, Verdict::Reject);
        assert_eq!(judge_euclidean(&e5, 0.0, 0.039).unwrap().verdict, Verdict::Accept);
        assert!(judge_euclidean(&uni(0), 0.0, 0.0).is_err());
        assert!(ComparatorSpec::euclidean(6).is_err());
    }

    #[test]
    fn euclidean_region_shrinks_with_aggressiveness() {
        for d in 0..100 {
            let diff = f64::from(d) * 0.001;
            let mut prev = true;
            for a in 0..=5 {
                let spec = ComparatorSpec::euclidean(a).unwrap();
                let acc = judge_euclidean(&spec, 0.2, 0.2 + diff).unwrap().verdict == Verdict::Accept;
                assert!(prev || !acc, "diff {diff} accepted at A={a} but not before");
                prev = acc;
            }
        }
    }

    #[test]
    fn categorical_examples() {
        let same = [0.02, 0.95, 0.01];
        let obs = [0.0, 1.0, 0.0];
        let other = [0.0, 0.0, 1.0];
        assert_eq!(
            judge_categorical(&uni(3), &obs, &same).unwrap(),
            Judgment::new(Verdict::Accept, Reason::ObviousMatch)
        );
        assert_eq!(
            judge_categorical(&uni(3), &other, &same).unwrap(),
            Judgment::new(Verdict::Reject, Reason::ObviousMismatch)
        );
        let unsure = [0.1, 0.5, 0.2];
        assert_eq!(judge_categorical(&uni(0), &obs, &unsure).unwrap().verdict, Verdict::Accept);
        assert_eq!(judge_categorical(&uni(5), &obs, &unsure).unwrap().verdict, Verdict::Reject);
        let weak = [0.05, 0.1, 0.02];
        assert_eq!(
            judge_categorical(&uni(1), &obs, &weak).unwrap(),
            Judgment::new(Verdict::Reject, Reason::NonClearCut)
        );
    }

    #[test]
    fn categorical_errors() {
        assert!(judge_categorical(&uni(0), &[1.0, 0.0], &[0.5]).is_err());
        assert!(judge_categorical(&uni(0), &[], &[]).is_err());
        let e = ComparatorSpec::euclidean(0).unwrap();
        assert!(judge_categorical(&e, &[1.0], &[1.0]).is_err());
        assert!(ComparatorSpec::categorical(0, 0.8, 0.2).is_err());
        assert!(ComparatorSpec::categorical(0, 0.0, 0.9).is_err());
    }

    #[test]
    fn threshold_boundary_is_non_clear_cut() {
        // c = 0.8 gives |1 − c| = 0.2, not strictly below th_low. Pick
        // exactly representable thresholds to avoid rounding.
        let spec = ComparatorSpec::categorical(5, 0.25, 0.75).unwrap();
        assert_eq!(categorical_case(&spec, true, 0.75).reason, Reason::NonClearCut);
        assert_eq!(categorical_case(&spec, false, 0.75).reason, Reason::NonClearCut);
    }

    #[test]
    fn classification_table() {
        assert_eq!(classify(Verdict::Accept, true), Classification::TruePositive);
        assert_eq!(classify(Verdict::Reject, true), Classification::FalsePositive);
        assert_eq!(classify(Verdict::Reject, false), Classification::TrueNegative);
        assert_eq!(classify(Verdict::Accept, false), Classification::FalseNegative);
    }

    #[test]
    fn oracle_pairing_checked() {
        let net = Network::init(&[8, 4, 10], 0, 0.5).unwrap();
        let uniform = AbstractionSpec::new(AbstractionKind::Uniform, 10).unwrap();
        let e = ComparatorSpec::euclidean(0).unwrap();
        assert!(NeuralOracle::new(net.clone(), uniform, e, InputMode::Normalized).is_err());
        assert!(NeuralOracle::new(net.clone(), uniform, uni(0), InputMode::Normalized).is_ok());
        let u20 = AbstractionSpec::new(AbstractionKind::Uniform, 20).unwrap();
        assert!(NeuralOracle::new(net, u20, uni(0), InputMode::Normalized).is_err());
    }
}
