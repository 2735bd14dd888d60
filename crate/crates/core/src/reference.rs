//! Closed-form reference CDFs and concentration bounds.
//!
//! The Bernoulli generative approach reproduces the Bayesian posterior
//! predictive, so its limiting posterior is `Beta(a, M - a)`. For exponential
//! data the comparison line is `Gamma(shape = M, rate = M·μ̂)`, which the
//! IGMC output is not expected to match.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ecdf::Cdf;
use crate::error::{Error, Result};
use crate::generative::Support;
use crate::special::{beta_inc, gamma_inc_lower};

fn positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::ParameterOutOfRange(format!("{name} = {value}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaRef {
    alpha: f64,
    beta: f64,
}

impl BetaRef {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Ok(BetaRef {
            alpha: positive("alpha", alpha)?,
            beta: positive("beta", beta)?,
        })
    }

    /// `Beta(a, M - a)`, the posterior of a Bernoulli mean after `a`
    /// successes in `M` trials under the Haldane prior.
    pub fn bernoulli_posterior(m: usize, a: usize) -> Result<Self> {
        if a == 0 || a >= m {
            return Err(Error::ParameterOutOfRange(format!(
                "Beta({a}, {}) is undefined",
                m as i64 - a as i64
            )));
        }
        BetaRef::new(a as f64, (m - a) as f64)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }
}

pub fn beta_cdf(r: &BetaRef, t: f64) -> f64 {
    // Parameters are validated at construction, so only convergence can fail.
    beta_inc(r.alpha, r.beta, t).expect("incomplete beta converges for validated shapes")
}

impl Cdf for BetaRef {
    fn eval(&self, t: f64) -> f64 {
        beta_cdf(self, t)
    }

    /// `∫_0^x I_t(α, β) dt = x·I_x(α, β) − α/(α+β)·I_x(α+1, β)`.
    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        let prim = |x: f64| -> Option<f64> {
            let x = x.clamp(0.0, 1.0);
            let upper = beta_inc(self.alpha + 1.0, self.beta, x).ok()?;
            Some(x * beta_cdf(self, x) - self.mean() * upper)
        };
        let tail = |x: f64| (x - 1.0).max(0.0);
        Some(prim(b)? - prim(a)? + tail(b) - tail(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRef {
    shape: f64,
    rate: f64,
}

impl GammaRef {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        Ok(GammaRef {
            shape: positive("shape", shape)?,
            rate: positive("rate", rate)?,
        })
    }

    /// `Gamma(shape = M, rate = M·μ̂)`: the posterior of an exponential rate
    /// after `M` observations with mean `μ̂` under the scale-invariant prior.
    pub fn exponential_rate_posterior(m: usize, sample_mean: f64) -> Result<Self> {
        GammaRef::new(m as f64, m as f64 * sample_mean)
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }
}

pub fn gamma_cdf(r: &GammaRef, t: f64) -> f64 {
    gamma_inc_lower(r.shape, r.rate * t).expect("incomplete gamma converges for validated shape")
}

impl Cdf for GammaRef {
    fn eval(&self, t: f64) -> f64 {
        gamma_cdf(self, t)
    }

    /// `∫_0^x P(k, λt) dt = x·P(k, λx) − (k/λ)·P(k+1, λx)`.
    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        let prim = |x: f64| -> Option<f64> {
            let x = x.max(0.0);
            let upper = gamma_inc_lower(self.shape + 1.0, self.rate * x).ok()?;
            Some(x * gamma_cdf(self, x) - self.mean() * upper)
        };
        Some(prim(b)? - prim(a)?)
    }
}

/// Uniform CDF on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformRef {
    lo: f64,
    hi: f64,
}

impl UniformRef {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::ParameterOutOfRange(format!("uniform on [{lo}, {hi}]")));
        }
        Ok(UniformRef { lo, hi })
    }

    pub fn unit() -> Self {
        UniformRef { lo: 0.0, hi: 1.0 }
    }
}

impl Cdf for UniformRef {
    fn eval(&self, t: f64) -> f64 {
        ((t - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        let prim = |x: f64| {
            let inside = x.clamp(self.lo, self.hi);
            (inside - self.lo).powi(2) / (2.0 * (self.hi - self.lo)) + (x - self.hi).max(0.0)
        };
        Some(prim(b) - prim(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialRef {
    rate: f64,
}

impl ExponentialRef {
    pub fn new(rate: f64) -> Result<Self> {
        Ok(ExponentialRef {
            rate: positive("rate", rate)?,
        })
    }
}

impl Cdf for ExponentialRef {
    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -(-self.rate * t).exp_m1()
        }
    }

    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        let prim = |x: f64| {
            let x = x.max(0.0);
            x - (1.0 - (-self.rate * x).exp()) / self.rate
        };
        Some(prim(b) - prim(a))
    }
}

/// Step CDF of a Bernoulli(p) variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliStepRef {
    p: f64,
}

impl BernoulliStepRef {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParameterOutOfRange(format!("Bernoulli p = {p}")));
        }
        Ok(BernoulliStepRef { p })
    }
}

impl Cdf for BernoulliStepRef {
    fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else if t < 1.0 {
            1.0 - self.p
        } else {
            1.0
        }
    }

    fn eval_left(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t <= 1.0 {
            1.0 - self.p
        } else {
            1.0
        }
    }

    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        let prim = |x: f64| (1.0 - self.p) * x.clamp(0.0, 1.0) + (x - 1.0).max(0.0);
        Some(prim(b) - prim(a))
    }
}

/// Lomax (Pareto type II) CDF `1 − (1 + t/scale)^(−shape)`.
///
/// With `shape = M` and `scale = M·μ̂` this is the posterior predictive of
/// the next exponential observation under the rate posterior above. The
/// parameter choice is ours; it serves only as a documentation-level curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LomaxRef {
    shape: f64,
    scale: f64,
}

impl LomaxRef {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        Ok(LomaxRef {
            shape: positive("shape", shape)?,
            scale: positive("scale", scale)?,
        })
    }

    pub fn exponential_predictive(m: usize, sample_mean: f64) -> Result<Self> {
        LomaxRef::new(m as f64, m as f64 * sample_mean)
    }
}

impl Cdf for LomaxRef {
    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -(-self.shape * (t / self.scale).ln_1p()).exp_m1()
        }
    }
}

/// Smallest `t` (to bisection precision) with `cdf.eval(t) >= p`, searching
/// upward from `lo`.
pub fn quantile<C: Cdf + ?Sized>(cdf: &C, p: f64, lo: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) || p == 0.0 {
        return Err(Error::ParameterOutOfRange(format!("quantile level {p}")));
    }
    let mut hi = lo.abs().max(1.0);
    let mut expansions = 0;
    while cdf.eval(lo + hi) < p {
        hi *= 2.0;
        expansions += 1;
        if expansions > 1100 {
            return Err(Error::ParameterOutOfRange(format!(
                "quantile {p} not bracketed"
            )));
        }
    }
    let (mut a, mut b) = (lo, lo + hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if cdf.eval(mid) < p {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Hoeffding,
    AzumaTail,
    DkwTail,
    Theorem1L1,
}

/// A bound evaluation together with its inputs and additive terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub inputs: BTreeMap<String, f64>,
    /// Additive components of `value`; empty for single-term bounds.
    pub terms: BTreeMap<String, f64>,
    pub value: f64,
}

fn inputs(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// `Pr(|μ̂ − μ| ≥ t) ≤ 2·exp(−2·m·t²)`, capped at 1.
pub fn hoeffding_bound(m: usize, t: f64) -> f64 {
    (2.0 * (-2.0 * m as f64 * t * t).exp()).min(1.0)
}

/// Limiting Azuma–Hoeffding tail `2·exp(−(h+m)·a²/2)` for the running mean
/// of a chain after `h` appends to `m` observations, capped at 1.
pub fn azuma_tail(m: usize, h: usize, a: f64) -> f64 {
    (2.0 * (-((h + m) as f64) / 2.0 * a * a).exp()).min(1.0)
}

/// DKW tail `2·exp(−2·n·a²)`, capped at 1.
pub fn dkw_tail(n: usize, a: f64) -> f64 {
    (2.0 * (-2.0 * n as f64 * a * a).exp()).min(1.0)
}

/// Expected-L1 bound `√(2π/(m+h)) + √(π/(2n))` between the Monte Carlo
/// posterior CDF and its infinite-depth limit, for unit-interval data.
///
/// The first term integrates the Azuma tail over `a ∈ [0, ∞)`, the second
/// integrates the DKW tail.
pub fn theorem1_l1_bound(m: usize, h: usize, n: usize) -> BoundReport {
    use std::f64::consts::PI;
    let depth_term = (2.0 * PI / (m + h) as f64).sqrt();
    let sample_term = (PI / (2.0 * n as f64)).sqrt();
    BoundReport {
        kind: BoundKind::Theorem1L1,
        inputs: inputs(&[("m", m as f64), ("h", h as f64), ("n", n as f64)]),
        terms: inputs(&[("azuma", depth_term), ("dkw", sample_term)]),
        value: depth_term + sample_term,
    }
}

/// [`theorem1_l1_bound`] for data with the given support; refuses supports
/// that are not contained in `[0, 1]`, where the bound does not apply.
pub fn theorem1_l1_bound_for(support: Support, m: usize, h: usize, n: usize) -> Result<BoundReport> {
    if !support.is_bounded_unit() {
        return Err(Error::ParameterOutOfRange(format!(
            "the L1 convergence bound needs data in [0, 1], got {support} support"
        )));
    }
    Ok(theorem1_l1_bound(m, h, n))
}

impl BoundReport {
    pub fn hoeffding(m: usize, t: f64) -> Self {
        BoundReport {
            kind: BoundKind::Hoeffding,
            inputs: inputs(&[("m", m as f64), ("t", t)]),
            terms: BTreeMap::new(),
            value: hoeffding_bound(m, t),
        }
    }

    pub fn azuma_tail(m: usize, h: usize, a: f64) -> Self {
        BoundReport {
            kind: BoundKind::AzumaTail,
            inputs: inputs(&[("m", m as f64), ("h", h as f64), ("a", a)]),
            terms: BTreeMap::new(),
            value: azuma_tail(m, h, a),
        }
    }

    pub fn dkw_tail(n: usize, a: f64) -> Self {
        BoundReport {
            kind: BoundKind::DkwTail,
            inputs: inputs(&[("n", n as f64), ("a", a)]),
            terms: BTreeMap::new(),
            value: dkw_tail(n, a),
        }
    }
}
