// Brute-force reference computations shared by the integration and
// acceptance tests. Nothing here calls into the library's numerics.

#![allow(dead_code)]

use rand::Rng;

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let x = a + h * i as f64;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    (f(a) + f(b) + 4.0 * odd + 2.0 * even) * h / 3.0
}

pub const QUAD_POINTS: usize = 1_000_000;

/// Beta(alpha, beta) CDF by quadrature of the unnormalized density.
///
/// Substituting t = s^2 on [0, 1/2] and 1 - t = r^2 on [1/2, 1] removes the
/// endpoint singularities for shapes below 1. The normalizer is the
/// quadrature total, so no gamma function is involved.
pub fn beta_cdf_oracle(alpha: f64, beta: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let left = |s: f64| {
        if s == 0.0 {
            return if alpha == 0.5 { 2.0 } else { 0.0 };
        }
        2.0 * s.powf(2.0 * alpha - 1.0) * (1.0 - s * s).powf(beta - 1.0)
    };
    let right = |r: f64| {
        if r == 0.0 {
            return if beta == 0.5 { 2.0 } else { 0.0 };
        }
        2.0 * r.powf(2.0 * beta - 1.0) * (1.0 - r * r).powf(alpha - 1.0)
    };
    let half = 0.5f64.sqrt();
    let left_total = simpson(left, 0.0, half, QUAD_POINTS);
    let right_total = simpson(right, 0.0, half, QUAD_POINTS);
    let total = left_total + right_total;
    if x <= 0.5 {
        simpson(left, 0.0, x.sqrt(), QUAD_POINTS) / total
    } else {
        1.0 - simpson(right, 0.0, (1.0 - x).sqrt(), QUAD_POINTS) / total
    }
}

/// Gamma(shape, rate) CDF by quadrature of `u^(k-1) e^(-u)` after t = s^2,
/// normalized by the quadrature total over a range holding all the mass.
pub fn gamma_cdf_oracle(shape: f64, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let f = |s: f64| {
        if s == 0.0 {
            return if shape == 0.5 { 2.0 } else { 0.0 };
        }
        2.0 * s.powf(2.0 * shape - 1.0) * (-s * s).exp()
    };
    let upper = shape + 60.0 + 30.0 * shape.sqrt();
    let total = simpson(f, 0.0, upper.sqrt(), QUAD_POINTS);
    let u = rate * x;
    if u >= upper {
        return 1.0;
    }
    simpson(f, 0.0, u.sqrt(), QUAD_POINTS) / total
}

pub const LATTICE: usize = 1_000_000;

/// A random step CDF on [0, 1] whose jumps sit on the 1e-6 lattice.
pub fn random_lattice_steps<R: Rng>(rng: &mut R, max_steps: usize) -> (Vec<f64>, Vec<f64>) {
    let k = rng.random_range(1..=max_steps);
    let mut idx: Vec<usize> = (0..k).map(|_| rng.random_range(1..LATTICE)).collect();
    idx.sort_unstable();
    idx.dedup();
    let mut weights: Vec<f64> = (0..idx.len()).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for w in weights.iter_mut() {
        acc += *w / total;
        *w = acc;
    }
    *weights.last_mut().unwrap() = 1.0;
    let breaks = idx.iter().map(|&j| j as f64 / LATTICE as f64).collect();
    (breaks, weights)
}

/// Right-continuous step value by linear scan.
pub fn step_value(breaks: &[f64], cum: &[f64], t: f64) -> f64 {
    let mut v = 0.0;
    for (b, c) in breaks.iter().zip(cum) {
        if *b <= t {
            v = *c;
        } else {
            break;
        }
    }
    v
}

/// Midpoint rule on the 1e6-cell grid over [0, 1]. Exact (up to summation
/// round-off) for step functions whose jumps lie on the lattice.
pub fn grid_l1(f: (&[f64], &[f64]), g: (&[f64], &[f64])) -> f64 {
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fv, mut gv) = (0.0, 0.0);
    let h = 1.0 / LATTICE as f64;
    let mut sum = 0.0;
    for cell in 0..LATTICE {
        let t = (cell as f64 + 0.5) * h;
        while i < f.0.len() && f.0[i] <= t {
            fv = f.1[i];
            i += 1;
        }
        while j < g.0.len() && g.0[j] <= t {
            gv = g.1[j];
            j += 1;
        }
        sum += (fv - gv).abs();
    }
    sum * h
}

/// Distribution of the number of ones drawn after `h` Polya-urn steps that
/// start from `a` ones among `m` values. Exact dynamic programme.
pub fn polya_pmf(m: usize, a: usize, h: usize) -> Vec<f64> {
    let mut pmf = vec![0.0; h + 1];
    pmf[0] = 1.0;
    for step in 0..h {
        let mut next = vec![0.0; h + 1];
        let size = (m + step) as f64;
        for (k, p) in pmf.iter().enumerate().take(step + 1) {
            if *p == 0.0 {
                continue;
            }
            let q = (a + k) as f64 / size;
            next[k + 1] += p * q;
            next[k] += p * (1.0 - q);
        }
        pmf = next;
    }
    pmf
}

/// Largest gap between the ECDF of `xs` and a discrete CDF given as sorted
/// atoms and their cumulative probabilities.
pub fn ks_to_atoms(xs: &[f64], atoms: &[f64], cum: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    let mut idx = 0;
    for (atom, c) in atoms.iter().zip(cum) {
        // Both CDFs are constant between atoms when all samples are atoms.
        while idx < sorted.len() && sorted[idx] <= *atom + 1e-12 {
            idx += 1;
        }
        worst = worst.max((idx as f64 / n - c).abs());
    }
    worst
}

/// Central finite differences of `loss` at `theta`.
pub fn numeric_gradient<F: Fn(&[f64]) -> f64>(loss: F, theta: &[f64], step: f64) -> Vec<f64> {
    let mut work = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            let orig = work[i];
            work[i] = orig + step;
            let up = loss(&work);
            work[i] = orig - step;
            let down = loss(&work);
            work[i] = orig;
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// Relative error with a floor so near-zero components compare absolutely.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
}
