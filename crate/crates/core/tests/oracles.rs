#[path = "support/oracles.rs"]
mod oracles;

use igmc::ecdf::{dkw_band, ks_distance, l1_distance_step_ref, l1_distance_step_step, DEFAULT_L1_TOL};
use igmc::reference::{azuma_tail, beta_cdf, gamma_cdf, quantile, theorem1_l1_bound, BetaRef, GammaRef, UniformRef};
use igmc::seeding::stream_rng;
use igmc::{Cdf, EmpiricalCdf, Interval};
use oracles::*;
use rand::Rng;
use rand_distr::{Beta, Distribution};

#[test]
fn beta_4_5_at_its_mean_matches_quadrature() {
    let r = BetaRef::new(4.0, 5.0).unwrap();
    let t = 4.0 / 9.0;
    let expected = beta_cdf_oracle(4.0, 5.0, t);
    assert!((beta_cdf(&r, t) - expected).abs() < 1e-10, "{} vs {expected}", beta_cdf(&r, t));
}

#[test]
fn beta_and_gamma_match_quadrature_off_grid() {
    for (a, b, t) in [(0.5, 0.5, 0.1), (2.5, 7.0, 0.3), (50.0, 4.0, 0.9), (0.5, 9.0, 0.02)] {
        let got = beta_cdf(&BetaRef::new(a, b).unwrap(), t);
        assert!((got - beta_cdf_oracle(a, b, t)).abs() < 1e-8, "Beta({a},{b}) at {t}");
    }
    for (k, rate, t) in [(0.5, 1.0, 0.3), (3.0, 2.0, 1.7), (50.0, 100.0, 0.55)] {
        let got = gamma_cdf(&GammaRef::new(k, rate).unwrap(), t);
        assert!((got - gamma_cdf_oracle(k, rate, t)).abs() < 1e-8, "Gamma({k},{rate}) at {t}");
    }
}

#[test]
fn beta_symmetry() {
    for (a, b) in [(0.5, 4.0), (4.0, 5.0), (9.0, 50.0)] {
        let f = BetaRef::new(a, b).unwrap();
        let g = BetaRef::new(b, a).unwrap();
        for t in [0.01, 0.2, 0.5, 0.77, 0.999] {
            assert!((f.eval(t) - (1.0 - g.eval(1.0 - t))).abs() < 1e-10);
        }
    }
}

#[test]
fn exact_step_l1_matches_lattice_grid() {
    let mut rng = stream_rng(2024, 0);
    for _ in 0..10 {
        let f = random_lattice_steps(&mut rng, 60);
        let g = random_lattice_steps(&mut rng, 60);
        let exact = l1_distance_step_step(
            &EmpiricalCdf::from_steps(f.0.clone(), f.1.clone()).unwrap(),
            &EmpiricalCdf::from_steps(g.0.clone(), g.1.clone()).unwrap(),
            Interval::unit(),
        );
        let grid = grid_l1((&f.0, &f.1), (&g.0, &g.1));
        assert!((exact - grid).abs() < 1e-9, "{exact} vs {grid}");
    }
}

// Jumps at the (i - 1/2)/n quantiles keep |f - g| <= 1/(2n) everywhere.
fn quantile_staircase<C: Cdf>(g: &C, n: usize) -> EmpiricalCdf {
    let breaks = (1..=n).map(|i| quantile(g, (i as f64 - 0.5) / n as f64, 0.0).unwrap()).collect();
    let cum = (1..=n).map(|i| i as f64 / n as f64).collect();
    EmpiricalCdf::from_steps(breaks, cum).unwrap()
}

#[test]
fn quantile_staircase_is_within_half_a_step() {
    let beta = BetaRef::new(4.0, 5.0).unwrap();
    let uniform = UniformRef::unit();
    for n in [5, 40, 300] {
        let refs: [&dyn Cdf; 2] = [&uniform, &beta];
        for g in refs {
            let f = quantile_staircase(&g, n);
            let l1 = l1_distance_step_ref(&f, &g, Interval::unit(), DEFAULT_L1_TOL).unwrap();
            assert!(l1 <= 1.0 / (2.0 * n as f64) + DEFAULT_L1_TOL, "n={n}: {l1}");
            // Brute-force midpoint grid of |f - g|.
            let cells = 200_000;
            let grid: f64 = (0..cells)
                .map(|i| {
                    let t = (i as f64 + 0.5) / cells as f64;
                    (f.eval(t) - g.eval(t)).abs()
                })
                .sum::<f64>()
                / cells as f64;
            assert!((l1 - grid).abs() < 1e-4, "n={n}: {l1} vs grid {grid}");
        }
    }
}

#[test]
fn midpoint_staircase_ks_is_half_a_step() {
    let uniform = UniformRef::unit();
    for n in [1, 7, 100] {
        let mids: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let f = EmpiricalCdf::from_samples(&mids).unwrap();
        let ks = ks_distance(&f, &uniform);
        // Enumerate every breakpoint gap by hand.
        let mut worst: f64 = 0.0;
        for (i, m) in mids.iter().enumerate() {
            worst = worst.max((i as f64 / n as f64 - m).abs());
            worst = worst.max(((i + 1) as f64 / n as f64 - m).abs());
        }
        assert!((ks - worst).abs() < 1e-15);
        assert!((ks - 0.5 / n as f64).abs() < 1e-12);
    }
}

#[test]
fn ecdf_of_beta_draws_is_close() {
    let beta = Beta::new(4.0, 5.0).unwrap();
    let target = BetaRef::new(4.0, 5.0).unwrap();
    let mut failures = 0;
    for seed in 0..20 {
        let mut rng = stream_rng(77, seed);
        let xs: Vec<f64> = (0..1000).map(|_| beta.sample(&mut rng)).collect();
        let f = EmpiricalCdf::from_samples(&xs).unwrap();
        let l1 = l1_distance_step_ref(&f, &target, Interval::unit(), DEFAULT_L1_TOL).unwrap();
        if l1 >= 0.05 {
            failures += 1;
        }
    }
    // Each trial fails with probability below 0.05.
    assert!(failures <= 3, "{failures} of 20");
}

#[test]
fn dkw_band_holds_for_uniform_samples() {
    let band = dkw_band(200, 0.05).unwrap();
    let uniform = UniformRef::unit();
    let mut rng = stream_rng(5, 5);
    let trials = 400;
    let violations = (0..trials)
        .filter(|_| {
            let xs: Vec<f64> = (0..200).map(|_| rng.random::<f64>()).collect();
            ks_distance(&EmpiricalCdf::from_samples(&xs).unwrap(), &uniform) > band
        })
        .count();
    assert!((violations as f64) / (trials as f64) <= 0.07, "{violations}");
}

#[test]
fn azuma_term_is_the_tail_integral() {
    for (m, h) in [(9usize, 10usize), (9, 1000), (50, 100)] {
        let closed = theorem1_l1_bound(m, h, 1).terms["azuma"];
        let whole = simpson(|a| 2.0 * (-((m + h) as f64) * a * a / 2.0).exp(), 0.0, 60.0, 1_000_000);
        assert!((closed - whole).abs() < 1e-6);
        let capped = simpson(|a| azuma_tail(m, h, a), 0.0, 1.0, 1_000_000);
        assert!(closed >= capped);
    }
}
