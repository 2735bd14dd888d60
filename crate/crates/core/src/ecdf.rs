//! Step CDFs and distances between distribution functions.
//!
//! Distances between two step functions are computed exactly by merging
//! breakpoints. Distances between a step function and a continuous reference
//! are computed piece by piece: on each constant piece `c` of the step
//! function, `|c - g(t)|` changes sign at most once because `g` is monotone,
//! so the piece is split at the crossing and each side is integrated either
//! in closed form ([`Cdf::integral`]) or by adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Default absolute tolerance for [`l1_distance_step_ref`].
pub const DEFAULT_L1_TOL: f64 = 1e-6;

const SIMPSON_MAX_DEPTH: u32 = 48;
const BISECTION_STEPS: usize = 200;

/// A cumulative distribution function.
pub trait Cdf {
    /// `F(t) = Pr(X ≤ t)`.
    fn eval(&self, t: f64) -> f64;

    /// Left limit `F(t⁻) = Pr(X < t)`. Equal to `eval` for continuous CDFs.
    fn eval_left(&self, t: f64) -> f64 {
        self.eval(t)
    }

    /// `∫_a^b F(t) dt` when a closed form is available.
    fn integral(&self, _a: f64, _b: f64) -> Option<f64> {
        None
    }
}

impl<C: Cdf + ?Sized> Cdf for &C {
    fn eval(&self, t: f64) -> f64 {
        (**self).eval(t)
    }
    fn eval_left(&self, t: f64) -> f64 {
        (**self).eval_left(t)
    }
    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        (**self).integral(a, b)
    }
}

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::EmptyDomain { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Right-continuous step CDF.
///
/// `eval(t)` is the cumulative value at the largest breakpoint `≤ t`, or 0
/// before the first breakpoint. The last cumulative value is exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    breakpoints: Vec<f64>,
    cumulative: Vec<f64>,
}

impl EmpiricalCdf {
    /// ECDF of `samples`: `F̂(t) = #{i : x_i ≤ t} / n`.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        if let Some(bad) = samples.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidCdf(format!("non-finite sample {bad}")));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut breakpoints = Vec::new();
        let mut cumulative = Vec::new();
        for (i, &x) in sorted.iter().enumerate() {
            if i + 1 < n && sorted[i + 1] == x {
                continue;
            }
            breakpoints.push(x);
            cumulative.push((i + 1) as f64 / n as f64);
        }
        Ok(EmpiricalCdf {
            breakpoints,
            cumulative,
        })
    }

    /// Builds a step CDF from explicit breakpoints and cumulative values.
    pub fn from_steps(breakpoints: Vec<f64>, cumulative: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidCdf("no breakpoints".into()));
        }
        if breakpoints.len() != cumulative.len() {
            return Err(Error::InvalidCdf(format!(
                "{} breakpoints but {} cumulative values",
                breakpoints.len(),
                cumulative.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidCdf("non-finite breakpoint".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCdf(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if cumulative.iter().any(|c| !(0.0..=1.0).contains(c))
            || cumulative.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::InvalidCdf(
                "cumulative values must be nondecreasing in [0, 1]".into(),
            ));
        }
        if *cumulative.last().unwrap() != 1.0 {
            return Err(Error::InvalidCdf("last cumulative value must be 1".into()));
        }
        Ok(EmpiricalCdf {
            breakpoints,
            cumulative,
        })
    }

    pub fn point_mass(at: f64) -> Result<Self> {
        EmpiricalCdf::from_steps(vec![at], vec![1.0])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn max(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Value on the piece starting at breakpoint `i`.
    fn value_after(&self, i: usize) -> f64 {
        self.cumulative[i]
    }

    fn value_before(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.cumulative[i - 1]
        }
    }

    /// Breakpoints strictly inside `(lo, hi)`.
    fn interior(&self, lo: f64, hi: f64) -> &[f64] {
        let start = self.breakpoints.partition_point(|b| *b <= lo);
        let end = self.breakpoints.partition_point(|b| *b < hi);
        &self.breakpoints[start..end.max(start)]
    }
}

impl Cdf for EmpiricalCdf {
    fn eval(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|b| *b <= t);
        self.value_before(idx)
    }

    fn eval_left(&self, t: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|b| *b < t);
        self.value_before(idx)
    }

    fn integral(&self, a: f64, b: f64) -> Option<f64> {
        let mut total = 0.0;
        let mut left = a;
        for &bp in self.interior(a, b) {
            total += self.eval(left) * (bp - left);
            left = bp;
        }
        total += self.eval(left) * (b - left);
        Some(total)
    }
}

/// Exact `∫_domain |f(t) - g(t)| dt` for two step CDFs.
pub fn l1_distance_step_step(f: &EmpiricalCdf, g: &EmpiricalCdf, domain: Interval) -> f64 {
    let (lo, hi) = (domain.lo(), domain.hi());
    let fi = f.interior(lo, hi);
    let gi = g.interior(lo, hi);

    let mut total = 0.0;
    let mut left = lo;
    let (mut i, mut j) = (0, 0);
    loop {
        let next = match (fi.get(i), gi.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => hi,
        };
        total += (f.eval(left) - g.eval(left)).abs() * (next - left);
        if next >= hi {
            break;
        }
        if fi.get(i) == Some(&next) {
            i += 1;
        }
        if gi.get(j) == Some(&next) {
            j += 1;
        }
        left = next;
    }
    total
}

/// `∫_domain |f(t) - g(t)| dt` for a step CDF `f` and a monotone CDF `g`,
/// to absolute accuracy `tol`.
pub fn l1_distance_step_ref<G: Cdf + ?Sized>(
    f: &EmpiricalCdf,
    g: &G,
    domain: Interval,
    tol: f64,
) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidConfig(format!("tolerance must be > 0, got {tol}")));
    }
    let (lo, hi) = (domain.lo(), domain.hi());
    let mut total = 0.0;
    let mut left = lo;
    let mut pieces: Vec<f64> = f.interior(lo, hi).to_vec();
    pieces.push(hi);
    for right in pieces {
        let level = f.eval(left);
        let piece_tol = tol * (right - left) / domain.width();
        total += piece_distance(level, g, left, right, piece_tol)
            .ok_or(Error::QuadratureFailure { tol })?;
        left = right;
    }
    Ok(total)
}

/// `∫_a^b |c - g(t)| dt` with `g` nondecreasing.
fn piece_distance<G: Cdf + ?Sized>(c: f64, g: &G, a: f64, b: f64, tol: f64) -> Option<f64> {
    if b <= a {
        return Some(0.0);
    }
    let crossing = if g.eval(a) >= c {
        a
    } else if g.eval_left(b) <= c {
        b
    } else {
        // g(lo) < c < g(hi⁻)
        let (mut lo, mut hi) = (a, b);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g.eval(mid) < c {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let below = signed_area(c, g, a, crossing, tol / 2.0, 1.0)?;
    let above = signed_area(c, g, crossing, b, tol / 2.0, -1.0)?;
    Some(below + above)
}

/// `∫_a^b sign·(c - g(t)) dt`, where the integrand is known to be ≥ 0.
fn signed_area<G: Cdf + ?Sized>(c: f64, g: &G, a: f64, b: f64, tol: f64, sign: f64) -> Option<f64> {
    if b <= a {
        return Some(0.0);
    }
    if let Some(area) = g.integral(a, b) {
        return Some((sign * (c * (b - a) - area)).max(0.0));
    }
    let integrand = |t: f64| (sign * (c - g.eval(t))).max(0.0);
    adaptive_simpson(&integrand, a, b, tol)
}

/// Adaptive Simpson quadrature; `None` when the depth cap is hit before
/// the local error estimate meets `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Option<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) <= f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    Some(
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?,
    )
}

/// `sup_t |f(t) - g(t)|`.
///
/// On each piece `[b_i, b_{i+1})` of `f` the monotone `g` is extremal at the
/// piece ends, so checking `g(b_i)` and `g(b_{i+1}⁻)` against the piece value
/// is exact.
pub fn ks_distance<G: Cdf + ?Sized>(f: &EmpiricalCdf, g: &G) -> f64 {
    let bps = f.breakpoints();
    let mut sup = g.eval_left(bps[0]).abs();
    for (i, &b) in bps.iter().enumerate() {
        let level = f.value_after(i);
        sup = sup.max((level - g.eval(b)).abs());
        if let Some(&next) = bps.get(i + 1) {
            sup = sup.max((level - g.eval_left(next)).abs());
        }
    }
    debug_assert_eq!(f.value_after(bps.len() - 1), 1.0);
    sup
}

/// Half-width `ε = sqrt(ln(2/α) / (2n))` of the DKW confidence band, so
/// that `Pr(sup|F̂ − F| > ε) ≤ α` for an ECDF of `n` samples.
pub fn dkw_band(n: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("DKW band needs n >= 1".into()));
    }
    Ok(((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt())
}
