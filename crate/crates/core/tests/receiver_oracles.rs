//! Receivers against numerical-optimisation and Monte Carlo oracles.

use aign_core::channel::ChannelParams;
use aign_core::ig::IgParams;
use aign_core::receiver::{
    detect, estimate_noise_params, llr, log_likelihood, ml_estimate, sep_analytic, sep_exact, sep_upper_bound,
    simulate_sep, Constellation, Detector,
};
use aign_core::rng;
use aign_core::stats::Moments;
use rand::Rng;

fn noise(v: f64, sigma2: f64) -> IgParams {
    ChannelParams::new(1.0, v, sigma2).unwrap().to_ig()
}

/// argmaxₜ Λ(t; y) by bisection on the score
/// ∂Λ/∂n = −3/(2n) − λ/(2μ²) + λ/(2n²), n = y − t, which is positive at
/// n → 0⁺ and negative from n = μ on.
fn argmax_by_score(y: f64, p: &IgParams) -> f64 {
    let (mu, lambda) = (p.mu(), p.lambda());
    let score = |n: f64| -1.5 / n - lambda / (2.0 * mu * mu) + lambda / (2.0 * n * n);
    let (mut lo, mut hi) = (0.0f64, mu);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    y - 0.5 * (lo + hi)
}

/// Golden-section search on Λ itself, as a cruder second oracle.
fn argmax_by_golden_section(y: f64, p: &IgParams) -> f64 {
    let f = |t: f64| log_likelihood(t, y, p);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (y - p.mu(), y);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    for _ in 0..200 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    0.5 * (a + b)
}

#[test]
fn ml_estimate_is_the_likelihood_maximiser() {
    let mut r = rng::seeded(11);
    for _ in 0..1000 {
        let p = IgParams::new(
            10f64.powf(r.random_range(-1.0..1.0)),
            10f64.powf(r.random_range(-1.0..1.0)),
        )
        .unwrap();
        let y = r.random_range(0.1..20.0);
        let est = ml_estimate(y, &p);
        let oracle = argmax_by_score(y, &p);
        assert!((est - oracle).abs() < 1e-8, "y={y} {p:?}: {est} vs {oracle}");
        let coarse = argmax_by_golden_section(y, &p);
        assert!((est - coarse).abs() < 1e-5 * (1.0 + p.mu()), "{est} vs {coarse}");
        assert!(est < y);
    }
    let p = IgParams::new(1.0, 1.0).unwrap();
    assert!((ml_estimate(2.0, &p) - 1.697_224).abs() < 1e-6);
}

#[test]
fn estimator_bias_and_spread_shrink_with_velocity() {
    let x = 1.0;
    let mut last = (f64::INFINITY, f64::INFINITY);
    for (i, v) in [1.0, 2.0, 4.0, 8.0].into_iter().enumerate() {
        let p = noise(v, 1.0);
        let estimates: Vec<f64> = p
            .sample(100_000, 90 + i as u64)
            .iter()
            .map(|n| ml_estimate(x + n, &p))
            .collect();
        let m = Moments::of(&estimates);
        let (bias, sd) = ((m.mean - x).abs(), m.variance.sqrt());
        assert!(bias < last.0 && sd < last.1, "v={v}: bias={bias} sd={sd}");
        last = (bias, sd);
    }
}

#[test]
fn binary_detection_agrees_with_exhaustive_scoring() {
    let mut r = rng::seeded(12);
    for _ in 0..2000 {
        let p = IgParams::new(r.random_range(0.1..3.0), r.random_range(0.1..3.0)).unwrap();
        let t1 = r.random_range(0.0..2.0);
        let t2 = t1 + r.random_range(0.05..2.0);
        let p1 = r.random_range(0.05..0.95);
        let c = Constellation::new(vec![t1, t2], vec![p1, 1.0 - p1]).unwrap();
        let m = r.random_range(1..6);
        let ys: Vec<f64> = (0..m).map(|_| t1 + r.random_range(0.01..6.0)).collect();
        let s1: f64 = ys.iter().map(|&y| log_likelihood(t1, y, &p)).sum::<f64>() + p1.ln();
        let s2: f64 = ys.iter().map(|&y| log_likelihood(t2, y, &p)).sum::<f64>() + (1.0 - p1).ln();
        let report = detect(&ys, &c, &p).unwrap();
        assert_eq!(report.decided, usize::from(s2 > s1));
        let total_llr: f64 = ys.iter().map(|&y| llr(y, t1, t2, &p)).sum();
        assert_eq!(report.decided, usize::from(total_llr > (p1 / (1.0 - p1)).ln()));
    }
}

#[test]
fn more_molecules_lower_the_error_rate() {
    let p = noise(5.0, 1.0);
    let c = Constellation::equiprobable(vec![1.0, 2.0]).unwrap();
    // the single-molecule SEP here is ~1e-5, so a million trials are needed to see it
    let single = simulate_sep(&c, &p, 1, Detector::Ml, 1_000_000, 3).unwrap();
    let many = simulate_sep(&c, &p, 10, Detector::Ml, 1_000_000, 4).unwrap();
    assert!(single.successes > 0);
    assert!(many.rate() < single.rate(), "{} vs {}", many.rate(), single.rate());
    assert!((single.rate() - sep_analytic(&c, &p).unwrap()).abs() < 4.0 * single.stderr());
}

#[test]
fn averaging_filter_is_no_better_than_joint_detection() {
    let p = noise(1.0, 1.0);
    let c = Constellation::equiprobable(vec![1.0, 2.0]).unwrap();
    let ml = simulate_sep(&c, &p, 4, Detector::Ml, 100_000, 8).unwrap();
    let lin = simulate_sep(&c, &p, 4, Detector::LinearFilter, 100_000, 8).unwrap();
    let se = (ml.stderr().powi(2) + lin.stderr().powi(2)).sqrt();
    assert!(
        lin.rate() + 4.0 * se >= ml.rate(),
        "ml={} linear={}",
        ml.rate(),
        lin.rate()
    );
    assert!(lin.rate() > ml.rate());
    let one_ml = simulate_sep(&c, &p, 1, Detector::Ml, 20_000, 9).unwrap();
    let one_lin = simulate_sep(&c, &p, 1, Detector::LinearFilter, 20_000, 9).unwrap();
    assert_eq!(one_ml, one_lin);
}

#[test]
fn training_estimates_are_consistent() {
    let p = IgParams::shifted(1.0, 1.0, 3.0).unwrap();
    let est = estimate_noise_params(3.0, &p.sample(100_000, 33)).unwrap();
    assert!((est.mu() - 1.0).abs() < 0.02);
    assert!((est.lambda() - 1.0).abs() < 0.05);
    assert_eq!(est.shift(), 0.0);
}

#[test]
fn simulated_sep_respects_bound_across_grid() {
    let mut seed = 500;
    for v in [1.0, 2.0, 4.0] {
        for sigma2 in [0.5, 1.0, 2.0] {
            for gap in [0.5, 1.0, 2.0] {
                let p = noise(v, sigma2);
                let c = Constellation::equiprobable(vec![0.0, gap]).unwrap();
                let sim = simulate_sep(&c, &p, 1, Detector::Ml, 20_000, seed).unwrap();
                let bound = sep_upper_bound(&c, &p).unwrap();
                assert!(sim.rate() <= bound + 4.0 * sim.stderr(), "v={v} s2={sigma2} gap={gap}");
                let analytic = sep_analytic(&c, &p).unwrap();
                assert!(analytic <= bound);
                seed += 1;
            }
        }
    }
}

#[test]
fn analytic_sep_agrees_with_simulation() {
    for (i, v) in [1.0, 2.0, 4.0].into_iter().enumerate() {
        let c = Constellation::equiprobable(vec![0.0, 1.0]).unwrap();
        let r = sep_exact(&c, &noise(v, 1.0), 100_000, 70 + i as u64).unwrap();
        assert!(
            (r.analytic - r.simulated.rate()).abs() <= 4.0 * r.simulated.stderr().max(1e-6),
            "v={v}"
        );
    }
}

#[test]
fn bound_gap_closes_with_velocity() {
    let c = Constellation::equiprobable(vec![0.0, 1.0]).unwrap();
    let gaps: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&v| {
            let p = noise(v, 1.0);
            (sep_analytic(&c, &p).unwrap() - sep_upper_bound(&c, &p).unwrap()).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[3] < 1e-12);
}

#[test]
fn larger_alphabets_err_more() {
    let p = noise(2.0, 1.0);
    let rates: Vec<f64> = [2, 4, 8]
        .iter()
        .map(|&t| {
            let c = Constellation::uniform_alphabet(t).unwrap();
            simulate_sep(&c, &p, 1, Detector::Ml, 50_000, 40 + t as u64)
                .unwrap()
                .rate()
        })
        .collect();
    assert!(rates.windows(2).all(|w| w[1] > w[0]), "{rates:?}");
}
