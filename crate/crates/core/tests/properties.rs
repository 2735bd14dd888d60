use igmc::deep::{predict_proba, softmax, summarize_uncertainty, ClassPosterior, ClassifierParams};
use igmc::ecdf::{ks_distance, l1_distance_step_ref, l1_distance_step_step, DEFAULT_L1_TOL};
use igmc::engine::{posterior_cdf, run_chain_traced, run_igmc};
use igmc::generative::{fit_bernoulli, fit_exponential, sample_model, Bernoulli, Exponential};
use igmc::reference::{theorem1_l1_bound, BetaRef};
use igmc::seeding::stream_rng;
use igmc::{Cdf, EmpiricalCdf, GenerativeModel, IgmcConfig, Interval, SampleSet, Support};
use proptest::prelude::*;

fn step_cdf() -> impl Strategy<Value = EmpiricalCdf> {
    prop::collection::vec(-0.5f64..1.5, 1..40).prop_map(|xs| EmpiricalCdf::from_samples(&xs).unwrap())
}

fn binary_set() -> impl Strategy<Value = SampleSet> {
    (1usize..200).prop_flat_map(|m| (Just(m), 0..=m)).prop_map(|(m, a)| SampleSet::binary_counts(m, a).unwrap())
}

fn positive_set() -> impl Strategy<Value = SampleSet> {
    prop::collection::vec(1e-6f64..1e3, 1..100).prop_map(|v| SampleSet::new(v, Support::NonnegReals).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn l1_is_a_metric(f in step_cdf(), g in step_cdf(), h in step_cdf()) {
        let d = Interval::new(-1.0, 2.0).unwrap();
        let fg = l1_distance_step_step(&f, &g, d);
        let gf = l1_distance_step_step(&g, &f, d);
        prop_assert!(fg >= 0.0);
        prop_assert_eq!(fg, gf);
        prop_assert_eq!(l1_distance_step_step(&f, &f, d), 0.0);
        let fh = l1_distance_step_step(&f, &h, d);
        let hg = l1_distance_step_step(&h, &g, d);
        prop_assert!(fg <= fh + hg + 1e-12);
    }

    #[test]
    fn l1_zero_only_for_equal_steps(xs in prop::collection::vec(0.0f64..1.0, 1..30), shift in 1e-3f64..0.5) {
        let f = EmpiricalCdf::from_samples(&xs).unwrap();
        let moved: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let g = EmpiricalCdf::from_samples(&moved).unwrap();
        let d = Interval::new(0.0, 2.0).unwrap();
        // Shifting every atom right by `shift` costs exactly `shift` of area.
        let l1 = l1_distance_step_step(&f, &g, d);
        prop_assert!(l1 > 0.0);
        prop_assert!((l1 - shift).abs() < 1e-12);
    }

    #[test]
    fn triangle_inequality_through_a_reference(f in step_cdf(), g in step_cdf(), a in 0.5f64..9.0, b in 0.5f64..9.0) {
        let beta = BetaRef::new(a, b).unwrap();
        let d = Interval::unit();
        let f_ref = l1_distance_step_ref(&f, &beta, d, DEFAULT_L1_TOL).unwrap();
        let g_ref = l1_distance_step_ref(&g, &beta, d, DEFAULT_L1_TOL).unwrap();
        let fg = l1_distance_step_step(&f, &g, d);
        prop_assert!(f_ref <= fg + g_ref + 2.0 * DEFAULT_L1_TOL);
    }

    #[test]
    fn ecdf_is_monotone_and_right_continuous(xs in prop::collection::vec(-10.0f64..10.0, 1..60), probes in prop::collection::vec(-12.0f64..12.0, 2..20)) {
        let f = EmpiricalCdf::from_samples(&xs).unwrap();
        let mut probes = probes;
        probes.sort_by(f64::total_cmp);
        for w in probes.windows(2) {
            prop_assert!(f.eval(w[0]) <= f.eval(w[1]));
        }
        prop_assert_eq!(f.eval(f.min() - 1e-9), 0.0);
        prop_assert_eq!(f.eval(f.max()), 1.0);
        for (b, c) in f.breakpoints().iter().zip(f.cumulative()) {
            prop_assert_eq!(f.eval(*b), *c);
            prop_assert!(f.eval_left(*b) < *c);
        }
        prop_assert_eq!(*f.cumulative().last().unwrap(), 1.0);
    }

    #[test]
    fn ks_bounds_l1_on_unit_domain(f in step_cdf(), a in 0.5f64..9.0, b in 0.5f64..9.0) {
        let beta = BetaRef::new(a, b).unwrap();
        let ks = ks_distance(&f, &beta);
        let l1 = l1_distance_step_ref(&f, &beta, Interval::unit(), DEFAULT_L1_TOL).unwrap();
        prop_assert!((0.0..=1.0).contains(&ks));
        prop_assert!(l1 <= ks + 2.0 * DEFAULT_L1_TOL);
    }

    #[test]
    fn bernoulli_fit_preserves_mean(s in binary_set()) {
        let model = fit_bernoulli(&s).unwrap();
        prop_assert_eq!(model.mean(), s.mean().unwrap());
        prop_assert_eq!(fit_bernoulli(&s).unwrap(), model);
    }

    #[test]
    fn exponential_fit_preserves_mean(s in positive_set()) {
        let model = fit_exponential(&s).unwrap();
        prop_assert_eq!(model.mean(), s.mean().unwrap());
        prop_assert_eq!(fit_exponential(&s).unwrap(), model);
    }

    #[test]
    fn draws_stay_in_support(s in binary_set(), e in positive_set(), seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let bern = fit_bernoulli(&s).unwrap();
        let expo = fit_exponential(&e).unwrap();
        for _ in 0..50 {
            let b = sample_model(&bern, &mut rng);
            prop_assert!(b == 0.0 || b == 1.0);
            let x = sample_model(&expo, &mut rng);
            prop_assert!(x >= 0.0 && x.is_finite());
        }
    }

    #[test]
    fn bernoulli_increments_are_bounded(m in 1usize..30, frac in 0.0f64..=1.0, depth in 1usize..200, seed in any::<u64>()) {
        let a = (frac * m as f64).round() as usize;
        let s = SampleSet::binary_counts(m, a).unwrap();
        let mut trace = Vec::new();
        let mu = run_chain_traced(&s, &Bernoulli, depth, &mut stream_rng(seed, 1), &mut trace).unwrap();
        prop_assert_eq!(trace.len(), depth + 1);
        prop_assert_eq!(*trace.last().unwrap(), mu);
        for (k, w) in trace.windows(2).enumerate() {
            let k = k + 1;
            prop_assert!((w[1] - w[0]).abs() <= 2.0 / (k + m) as f64);
        }
    }

    #[test]
    fn exponential_chain_means_are_positive(mean in 0.01f64..100.0, depth in 1usize..100, seed in any::<u64>()) {
        let s = SampleSet::new(vec![mean; 5], Support::NonnegReals).unwrap();
        let cfg = IgmcConfig::new(4, depth, seed).unwrap();
        let out = run_igmc(&s, &Exponential, &cfg).unwrap();
        prop_assert!(out.mus().iter().all(|m| *m > 0.0 && m.is_finite()));
    }

    #[test]
    fn posterior_cdf_is_a_cdf(m in 2usize..20, depth in 1usize..50, n in 1usize..50, seed in any::<u64>()) {
        let s = SampleSet::binary_counts(m, m / 2).unwrap();
        let out = run_igmc(&s, &Bernoulli, &IgmcConfig::new(n, depth, seed).unwrap()).unwrap();
        prop_assert!(out.mus().iter().all(|x| (0.0..=1.0).contains(x)));
        let f = posterior_cdf(&out).unwrap();
        let lo = out.mus().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = out.mus().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(f.eval(lo - 1e-12), 0.0);
        prop_assert_eq!(f.eval(hi), 1.0);
        prop_assert!(f.len() <= n);
    }

    #[test]
    fn theorem_bound_components_add_up(m in 1usize..1000, h in 1usize..10_000, n in 1usize..10_000) {
        let r = theorem1_l1_bound(m, h, n);
        prop_assert!(r.value >= 0.0);
        let sum = r.terms["azuma"] + r.terms["dkw"];
        prop_assert!((r.value - sum).abs() <= 1e-15 * sum.max(1.0));
    }

    #[test]
    fn softmax_normalizes_and_ignores_shifts(logits in prop::collection::vec(-15.0f64..15.0, 2..8), shift in -100.0f64..100.0) {
        let mut p = logits.clone();
        softmax(&mut p);
        let mut q: Vec<f64> = logits.iter().map(|l| l + shift).collect();
        softmax(&mut q);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.iter().all(|x| *x > 0.0 && *x < 1.0));
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn predictions_are_distributions(seed in any::<u64>(), x0 in -5.0f64..5.0, x1 in -5.0f64..5.0, k in 2usize..6) {
        let params = ClassifierParams::init(2, 8, k, seed);
        let p = predict_proba(&params, &[x0, x1]).unwrap();
        prop_assert_eq!(p.len(), k);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn class_posterior_rows_are_stochastic(rows in prop::collection::vec(prop::collection::vec(0u32..20, 3), 2..12)) {
        // Force every row to total the same depth by topping up the last class.
        let depth = rows.iter().map(|r| r[0] + r[1]).max().unwrap() + 1;
        let counts: Vec<Vec<u32>> = rows.iter().map(|r| vec![r[0], r[1], depth - r[0] - r[1]]).collect();
        let p = ClassPosterior::from_counts(counts, depth as usize).unwrap();
        for n in 0..p.chains() {
            // Exactness lives in the integer counts; the float sum may round.
            prop_assert_eq!(p.counts()[n].iter().sum::<u32>() as usize, p.depth());
            let row = p.row(n);
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for v in row {
                let scaled = v * depth as f64;
                prop_assert!((scaled - scaled.round()).abs() < 1e-9);
            }
        }
        let report = summarize_uncertainty(&p).unwrap();
        prop_assert!(report.uncertainty.iter().all(|u| (0.0..=1.0).contains(u)));
    }
}
