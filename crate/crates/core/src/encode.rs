//! Input scaling and output abstractions.
//!
//! Outputs are either encoded directly as `y / y_max`, or abstracted to a
//! one-hot vector naming one of `n` equal intervals. The interval
//! partition can be laid over a stretched copy of the range: a logarithmic
//! stretch refines the low end, a logistic stretch refines the centre.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subject::{CustomerRecord, FIELD_MAX, MAX_AMOUNT};

pub const INPUT_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    /// Each field divided by its maximum, landing in `[0, 1]`.
    #[default]
    Normalized,
    /// Raw field values.
    Identity,
}

pub fn normalize_input(x: &CustomerRecord, mode: InputMode) -> [f64; INPUT_DIM] {
    let fields = x.fields();
    std::array::from_fn(|i| match mode {
        InputMode::Normalized => f64::from(fields[i]) / f64::from(FIELD_MAX[i]),
        InputMode::Identity => f64::from(fields[i]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbstractionKind {
    Direct,
    Uniform,
    LowStretch,
    CenterStretch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbstractionSpec {
    pub kind: AbstractionKind,
    /// Interval count; ignored by `Direct`.
    pub n: usize,
    pub y_max: f64,
    pub k_low: f64,
    pub a_low: f64,
    pub m_ctr: f64,
    pub a_ctr: f64,
}

impl AbstractionSpec {
    pub const MAX_INTERVALS: usize = 1024;

    pub fn new(kind: AbstractionKind, n: usize) -> Result<Self> {
        let spec = AbstractionSpec {
            kind,
            n,
            y_max: f64::from(MAX_AMOUNT),
            k_low: 8000.0,
            a_low: 100.0,
            m_ctr: f64::from(MAX_AMOUNT),
            a_ctr: 0.0006,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn direct() -> Self {
        Self::new(AbstractionKind::Direct, 2).expect("default constants are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind != AbstractionKind::Direct && !(2..=Self::MAX_INTERVALS).contains(&self.n) {
            return Err(Error::config(format!(
                "interval count {} outside 2..={}",
                self.n,
                Self::MAX_INTERVALS
            )));
        }
        let constants = [self.y_max, self.k_low, self.a_low, self.m_ctr, self.a_ctr];
        if constants.iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(Error::config("abstraction constants must be positive"));
        }
        Ok(())
    }

    pub fn output_dim(&self) -> usize {
        match self.kind {
            AbstractionKind::Direct => 1,
            _ => self.n,
        }
    }

    /// The monotone map applied before slicing into intervals.
    fn stretch(&self, y: f64) -> f64 {
        match self.kind {
            AbstractionKind::Direct | AbstractionKind::Uniform => y,
            AbstractionKind::LowStretch => self.k_low * (1.0 + y / self.a_low).ln(),
            AbstractionKind::CenterStretch => {
                self.m_ctr / (1.0 + (-self.a_ctr * (y - 0.5 * self.m_ctr)).exp())
            }
        }
    }

    /// Interval holding `y`; `None` for the direct encoding.
    pub fn interval(&self, y: f64) -> Result<Option<usize>> {
        self.check_range(y)?;
        if self.kind == AbstractionKind::Direct {
            return Ok(None);
        }
        let lo = self.stretch(0.0);
        let hi = self.stretch(self.y_max);
        let t = (self.stretch(y) - lo) / (hi - lo);
        let idx = (t * self.n as f64).floor().max(0.0) as usize;
        Ok(Some(idx.min(self.n - 1)))
    }

    fn check_range(&self, y: f64) -> Result<()> {
        if !(0.0..=self.y_max).contains(&y) {
            return Err(Error::domain(format!(
                "output {y} outside [0, {}]",
                self.y_max
            )));
        }
        Ok(())
    }
}

/// `8000 · ln(1 + y/100)`.
pub fn stretch_low(y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return Err(Error::domain(format!("stretch_low of negative value {y}")));
    }
    let spec = AbstractionSpec::new(AbstractionKind::LowStretch, 2)?;
    Ok(spec.stretch(y))
}

/// `18000 / (1 + e^(−0.0006 · (y − 9000)))`.
pub fn stretch_center(y: f64) -> f64 {
    AbstractionSpec::new(AbstractionKind::CenterStretch, 2)
        .expect("default constants are valid")
        .stretch(y)
}

/// An encoded program output, each component in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedOutput {
    pub values: Vec<f64>,
}

impl EncodedOutput {
    pub fn one_hot(n: usize, k: usize) -> Self {
        let mut values = vec![0.0; n];
        values[k] = 1.0;
        EncodedOutput { values }
    }
}

pub fn encode_output(spec: &AbstractionSpec, y: f64) -> Result<EncodedOutput> {
    match spec.interval(y)? {
        None => Ok(EncodedOutput {
            values: vec![y / spec.y_max],
        }),
        Some(k) => Ok(EncodedOutput::one_hot(spec.n, k)),
    }
}

/// Index of the largest component, lowest index on ties. NaN components
/// never win.
pub fn winner(v: &[f64]) -> Result<usize> {
    if v.is_empty() {
        return Err(Error::domain("winner of an empty vector"));
    }
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] || v[best].is_nan() {
            best = i;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn uniform(n: usize) -> AbstractionSpec {
        AbstractionSpec::new(AbstractionKind::Uniform, n).unwrap()
    }

    #[test]
    fn input_scaling() {
        let zero = CustomerRecord::from_fields([0; 8]).unwrap();
        assert_eq!(normalize_input(&zero, InputMode::Normalized), [0.0; 8]);
        let x = CustomerRecord::from_fields([0, 0, 3, 0, 99, 0, 0, 0]).unwrap();
        let n = normalize_input(&x, InputMode::Normalized);
        assert_eq!(n[2], 0.5);
        assert_eq!(n[4], 1.0);
        assert_eq!(normalize_input(&x, InputMode::Identity)[4], 99.0);
    }

    #[test]
    fn low_stretch_values() {
        assert_eq!(stretch_low(0.0).unwrap(), 0.0);
        assert_relative_eq!(stretch_low(18000.0).unwrap(), 8000.0 * 181f64.ln());
        assert_relative_eq!(stretch_low(18000.0).unwrap(), 41587.976, epsilon = 0.001);
        assert!(stretch_low(100.0).unwrap() < stretch_low(200.0).unwrap());
        assert!(stretch_low(-1.0).is_err());
    }

    #[test]
    fn center_stretch_values() {
        assert_relative_eq!(stretch_center(9000.0), 9000.0);
        assert_relative_eq!(stretch_center(0.0), 18000.0 / (1.0 + 5.4f64.exp()), epsilon = 1e-9);
        assert_relative_eq!(stretch_center(0.0), 80.9, epsilon = 0.05);
        assert_relative_eq!(stretch_center(18000.0), 17919.1, epsilon = 0.05);
    }

    #[test]
    fn encode_examples() {
        let u10 = uniform(10);
        assert_eq!(encode_output(&u10, 0.0).unwrap(), EncodedOutput::one_hot(10, 0));
        assert_eq!(encode_output(&u10, 17999.0).unwrap(), EncodedOutput::one_hot(10, 9));
        assert_eq!(encode_output(&u10, 18000.0).unwrap(), EncodedOutput::one_hot(10, 9));
        assert_eq!(encode_output(&u10, 1800.0).unwrap(), EncodedOutput::one_hot(10, 1));
        let direct = AbstractionSpec::direct();
        assert_eq!(encode_output(&direct, 18000.0).unwrap().values, vec![1.0]);
        assert_eq!(direct.output_dim(), 1);
        let low = AbstractionSpec::new(AbstractionKind::LowStretch, 10).unwrap();
        assert_eq!(encode_output(&low, 18000.0).unwrap(), EncodedOutput::one_hot(10, 9));
        assert_eq!(encode_output(&low, 0.0).unwrap(), EncodedOutput::one_hot(10, 0));
    }

    #[test]
    fn encode_rejects_out_of_range() {
        assert!(encode_output(&uniform(10), -1.0).is_err());
        assert!(encode_output(&uniform(10), 18000.5).is_err());
        assert!(encode_output(&AbstractionSpec::direct(), f64::NAN).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(AbstractionSpec::new(AbstractionKind::Uniform, 1).is_err());
        assert!(AbstractionSpec::new(AbstractionKind::Uniform, 1025).is_err());
        assert!(AbstractionSpec::new(AbstractionKind::Direct, 0).is_ok());
        let mut s = uniform(10);
        s.a_ctr = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn winner_examples() {
        assert_eq!(winner(&[0.1, 0.9, 0.3]).unwrap(), 1);
        assert_eq!(winner(&EncodedOutput::one_hot(7, 4).values).unwrap(), 4);
        assert_eq!(winner(&[0.5, 0.5]).unwrap(), 0);
        assert!(winner(&[]).is_err());
    }

    #[test]
    fn every_interval_is_reachable() {
        for kind in [
            AbstractionKind::Uniform,
            AbstractionKind::LowStretch,
            AbstractionKind::CenterStretch,
        ] {
            for n in [2, 10, 30, 60] {
                let spec = AbstractionSpec::new(kind, n).unwrap();
                let mut seen = vec![false; n];
                let mut last = 0;
                for y in 0..=MAX_AMOUNT {
                    let k = spec.interval(f64::from(y)).unwrap().unwrap();
                    assert!(k >= last, "{kind:?} n={n} not monotone at {y}");
                    last = k;
                    seen[k] = true;
                }
                assert!(seen.iter().all(|&s| s), "{kind:?} n={n}");
            }
        }
    }

    #[test]
    fn uniform_step_moves_one_interval() {
        for n in [10, 20, 30, 40, 50, 60] {
            let spec = uniform(n);
            let width = 18000 / n as u32;
            for y in (0..MAX_AMOUNT - width).step_by(37) {
                let a = spec.interval(f64::from(y)).unwrap().unwrap();
                let b = spec.interval(f64::from(y + width)).unwrap().unwrap();
                assert!(b == a + 1 || b == n - 1, "n={n} y={y}");
            }
        }
    }

    proptest! {
        #[test]
        fn stretches_strictly_increase(a in 0.0f64..18000.0, b in 0.0f64..18000.0) {
            prop_assume!(a != b);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-6);
            prop_assert!(stretch_low(lo).unwrap() < stretch_low(hi).unwrap());
            prop_assert!(stretch_center(lo) < stretch_center(hi));
        }

        #[test]
        fn winner_is_a_maximum(v in proptest::collection::vec(0.0f64..1.0, 1..40)) {
            let w = winner(&v).unwrap();
            prop_assert!(v.iter().all(|&x| x <= v[w]));
            prop_assert!(v[..w].iter().all(|&x| x < v[w]));
        }
    }
}
