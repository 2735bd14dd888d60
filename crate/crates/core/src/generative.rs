//! Sample sets and generative approaches.
//!
//! A [`GenerativeApproach`] maps a [`SampleSet`] to a fitted
//! [`GenerativeModel`] that can be sampled. Approaches are deterministic:
//! fitting the same set twice yields identical parameters.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declared support of a sample set or model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    /// `[0, 1]`
    UnitInterval,
    /// `[0, ∞)`
    NonnegReals,
    /// `{0, 1}`
    Binary,
}

impl Support {
    pub fn contains(self, value: f64) -> bool {
        match self {
            Support::UnitInterval => (0.0..=1.0).contains(&value),
            Support::NonnegReals => value >= 0.0 && value.is_finite(),
            Support::Binary => value == 0.0 || value == 1.0,
        }
    }

    /// True when every value of the support lies in `[0, 1]`.
    pub fn is_bounded_unit(self) -> bool {
        matches!(self, Support::UnitInterval | Support::Binary)
    }

    pub fn name(self) -> &'static str {
        match self {
            Support::UnitInterval => "unit_interval",
            Support::NonnegReals => "nonneg_reals",
            Support::Binary => "binary",
        }
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered observations with a declared support.
///
/// Values keep insertion order: the initial observations come first and
/// generated values are appended behind them. The running sum is maintained
/// on every push so that the mean is O(1).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    support: Support,
    sum: f64,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, support: Support) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !support.contains(**v)) {
            return Err(outside(bad, support));
        }
        let sum = values.iter().sum();
        Ok(SampleSet {
            values,
            support,
            sum,
        })
    }

    /// `ones` ones followed by `total - ones` zeros, with binary support.
    pub fn binary_counts(total: usize, ones: usize) -> Result<Self> {
        if ones > total {
            return Err(Error::InvalidCounts(format!(
                "{ones} successes out of {total} observations"
            )));
        }
        let mut values = vec![1.0; ones];
        values.resize(total, 0.0);
        SampleSet::new(values, Support::Binary)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Running sum of the values, maintained incrementally.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn mean(&self) -> Result<f64> {
        if self.values.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        Ok(self.sum / self.values.len() as f64)
    }

    pub fn push(&mut self, value: f64) -> Result<()> {
        if !self.support.contains(value) {
            return Err(outside(value, self.support));
        }
        self.values.push(value);
        self.sum += value;
        Ok(())
    }
}

fn outside(value: f64, support: Support) -> Error {
    match support {
        Support::Binary => Error::NonBinaryValue(value),
        _ => Error::OutsideSupport {
            value,
            support: support.name(),
        },
    }
}

/// A fitted, samplable distribution.
pub trait GenerativeModel {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
    /// Exact analytic mean of the fitted distribution.
    fn mean(&self) -> f64;
    fn support(&self) -> Support;
}

/// A deterministic rule mapping a sample set to a fitted model.
pub trait GenerativeApproach {
    type Model: GenerativeModel;

    fn name(&self) -> &str;
    fn fit(&self, samples: &SampleSet) -> Result<Self::Model>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliModel {
    p: f64,
}

impl BernoulliModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParameterOutOfRange(format!(
                "Bernoulli probability {p}"
            )));
        }
        Ok(BernoulliModel { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl GenerativeModel for BernoulliModel {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // u in [0, 1): p = 1 always succeeds, p = 0 never does.
        let u: f64 = rng.random();
        if u < self.p {
            1.0
        } else {
            0.0
        }
    }

    fn mean(&self) -> f64 {
        self.p
    }

    fn support(&self) -> Support {
        Support::Binary
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialModel {
    rate: f64,
    // Kept alongside the rate so `mean()` does not round-trip through 1/rate.
    mean: f64,
}

impl ExponentialModel {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "exponential rate {rate}"
            )));
        }
        Ok(ExponentialModel {
            rate,
            mean: 1.0 / rate,
        })
    }

    pub fn with_mean(mean: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite() && (1.0 / mean).is_finite()) {
            return Err(Error::ParameterOutOfRange(format!(
                "exponential mean {mean}"
            )));
        }
        Ok(ExponentialModel {
            rate: 1.0 / mean,
            mean,
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl GenerativeModel for ExponentialModel {
    /// Inverse transform `-ln(u) / rate` with `u` uniform on `(0, 1]`.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = 1.0 - rng.random::<f64>();
        // ln(u) <= 0 on (0, 1]; abs() also keeps u == 1 from yielding -0.0.
        u.ln().abs() / self.rate
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn support(&self) -> Support {
        Support::NonnegReals
    }
}

/// `Bern(a / M)` where `a` counts the ones among all `M` current values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bernoulli;

/// `Exponential(1 / mean)` fitted by moment matching.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Exponential;

pub fn fit_bernoulli(samples: &SampleSet) -> Result<BernoulliModel> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    // Binary-support sets are validated on every push.
    if samples.support() != Support::Binary {
        if let Some(&bad) = samples.values().iter().find(|v| **v != 0.0 && **v != 1.0) {
            return Err(Error::NonBinaryValue(bad));
        }
    }
    // The sum of 0/1 values is an exact integer count.
    let successes = samples.sum();
    BernoulliModel::new(successes / samples.len() as f64)
}

pub fn fit_exponential(samples: &SampleSet) -> Result<ExponentialModel> {
    let mean = samples.mean()?;
    if mean < 0.0 || !mean.is_finite() {
        return Err(Error::OutsideSupport {
            value: mean,
            support: Support::NonnegReals.name(),
        });
    }
    if mean == 0.0 {
        return Err(Error::ZeroMean);
    }
    ExponentialModel::with_mean(mean)
}

impl GenerativeApproach for Bernoulli {
    type Model = BernoulliModel;

    fn name(&self) -> &str {
        "bernoulli"
    }

    fn fit(&self, samples: &SampleSet) -> Result<BernoulliModel> {
        fit_bernoulli(samples)
    }
}

impl GenerativeApproach for Exponential {
    type Model = ExponentialModel;

    fn name(&self) -> &str {
        "exponential"
    }

    fn fit(&self, samples: &SampleSet) -> Result<ExponentialModel> {
        fit_exponential(samples)
    }
}

/// Built-in approach selected at runtime (CLI, bindings).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinApproach {
    Bernoulli,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinModel {
    Bernoulli(BernoulliModel),
    Exponential(ExponentialModel),
}

impl BuiltinApproach {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "bernoulli" => Some(BuiltinApproach::Bernoulli),
            "exponential" => Some(BuiltinApproach::Exponential),
            _ => None,
        }
    }
}

impl GenerativeModel for BuiltinModel {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            BuiltinModel::Bernoulli(m) => m.sample(rng),
            BuiltinModel::Exponential(m) => m.sample(rng),
        }
    }

    fn mean(&self) -> f64 {
        match self {
            BuiltinModel::Bernoulli(m) => m.mean(),
            BuiltinModel::Exponential(m) => m.mean(),
        }
    }

    fn support(&self) -> Support {
        match self {
            BuiltinModel::Bernoulli(m) => m.support(),
            BuiltinModel::Exponential(m) => m.support(),
        }
    }
}

impl GenerativeApproach for BuiltinApproach {
    type Model = BuiltinModel;

    fn name(&self) -> &str {
        match self {
            BuiltinApproach::Bernoulli => "bernoulli",
            BuiltinApproach::Exponential => "exponential",
        }
    }

    fn fit(&self, samples: &SampleSet) -> Result<BuiltinModel> {
        match self {
            BuiltinApproach::Bernoulli => fit_bernoulli(samples).map(BuiltinModel::Bernoulli),
            BuiltinApproach::Exponential => {
                fit_exponential(samples).map(BuiltinModel::Exponential)
            }
        }
    }
}

/// Free-function form of [`GenerativeModel::sample`].
pub fn sample_model<M: GenerativeModel, R: Rng + ?Sized>(model: &M, rng: &mut R) -> f64 {
    model.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::stream_rng;

    #[test]
    fn bernoulli_fit_counts_successes() {
        let s = SampleSet::binary_counts(9, 4).unwrap();
        let m = fit_bernoulli(&s).unwrap();
        assert_eq!(m.p(), 4.0 / 9.0);
        assert_eq!(m.mean(), s.mean().unwrap());

        let ones = SampleSet::binary_counts(17, 17).unwrap();
        assert_eq!(fit_bernoulli(&ones).unwrap().p(), 1.0);

        let pair = SampleSet::new(vec![0.0, 1.0], Support::Binary).unwrap();
        let m = fit_bernoulli(&pair).unwrap();
        assert_eq!(m.mean(), 0.5);
        assert_eq!(m.mean(), pair.mean().unwrap());
    }

    #[test]
    fn bernoulli_fit_errors() {
        let empty = SampleSet::new(vec![], Support::Binary).unwrap();
        assert_eq!(fit_bernoulli(&empty), Err(Error::EmptySampleSet));

        let frac = SampleSet::new(vec![0.0, 0.5], Support::UnitInterval).unwrap();
        assert_eq!(fit_bernoulli(&frac), Err(Error::NonBinaryValue(0.5)));

        assert_eq!(
            SampleSet::new(vec![1.0, 2.0], Support::Binary),
            Err(Error::NonBinaryValue(2.0))
        );
    }

    #[test]
    fn exponential_fit() {
        let s = SampleSet::new(vec![2.0; 50], Support::NonnegReals).unwrap();
        let m = fit_exponential(&s).unwrap();
        assert_eq!(m.rate(), 0.5);
        assert_eq!(m.mean(), 2.0);

        let one = SampleSet::new(vec![1.0], Support::NonnegReals).unwrap();
        assert_eq!(fit_exponential(&one).unwrap().rate(), 1.0);

        let zeros = SampleSet::new(vec![0.0; 4], Support::NonnegReals).unwrap();
        assert_eq!(fit_exponential(&zeros), Err(Error::ZeroMean));

        let empty = SampleSet::new(vec![], Support::NonnegReals).unwrap();
        assert_eq!(fit_exponential(&empty), Err(Error::EmptySampleSet));
    }

    #[test]
    fn degenerate_bernoulli_draws() {
        let mut rng = stream_rng(3, 0);
        let always = BernoulliModel::new(1.0).unwrap();
        let never = BernoulliModel::new(0.0).unwrap();
        for _ in 0..10_000 {
            assert_eq!(sample_model(&always, &mut rng), 1.0);
            assert_eq!(sample_model(&never, &mut rng), 0.0);
        }
    }

    #[test]
    fn exponential_draw_mean_within_band() {
        // Standard error of the mean of 1e5 Exp(0.5) draws is 2 / sqrt(1e5);
        // five of them give the band [1.968, 2.032] inside [1.96, 2.04].
        let model = ExponentialModel::new(0.5).unwrap();
        let mut rng = stream_rng(11, 0);
        let n = 100_000;
        let mut total = 0.0;
        for _ in 0..n {
            let y = model.sample(&mut rng);
            assert!(y >= 0.0 && y.is_finite() && y.is_sign_positive());
            total += y;
        }
        let avg = total / n as f64;
        let band = 5.0 * 2.0 / (n as f64).sqrt();
        assert!((avg - 2.0).abs() < band, "avg {avg}");
        assert!((1.96..=2.04).contains(&avg));
    }

    #[test]
    fn bernoulli_draw_mean_within_band() {
        let model = BernoulliModel::new(4.0 / 9.0).unwrap();
        let mut rng = stream_rng(12, 0);
        let n = 100_000;
        let total: f64 = (0..n).map(|_| model.sample(&mut rng)).sum();
        let p = model.mean();
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((total / n as f64 - p).abs() < 5.0 * se);
    }

    #[test]
    fn push_keeps_order_and_sum() {
        let mut s = SampleSet::new(vec![0.25, 0.5], Support::UnitInterval).unwrap();
        s.push(1.0).unwrap();
        assert_eq!(s.values(), &[0.25, 0.5, 1.0]);
        assert_eq!(s.sum(), 1.75);
        assert!(s.push(1.5).is_err());
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn builtin_dispatch_matches_concrete_fits() {
        let s = SampleSet::binary_counts(10, 3).unwrap();
        let m = BuiltinApproach::Bernoulli.fit(&s).unwrap();
        assert_eq!(m, BuiltinModel::Bernoulli(fit_bernoulli(&s).unwrap()));
        assert_eq!(BuiltinApproach::parse("exponential"), Some(BuiltinApproach::Exponential));
        assert_eq!(BuiltinApproach::parse("gaussian"), None);
    }
}
