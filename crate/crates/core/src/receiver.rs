//! Receivers for release-time modulation: ML estimation of the release time,
//! MAP detection over a constellation (single and multi-molecule), symbol
//! error probability (exact, bounded, simulated, high-velocity asymptote) and
//! training-based estimation of the noise law.
//!
//! Symbols are identified by their 0-based index into the constellation.
//! The location of the noise law, if any, is a known common delay added to
//! every hypothesis.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use rand::Rng;

use crate::error::{non_negative, positive, Error, Result};
use crate::ig::IgParams;
use crate::rng;
use crate::special::LN_SQRT_2PI;
use crate::stats::ProportionEstimate;

/// Tolerance on Σ pᵢ = 1.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-12;
const MAX_DOUBLINGS: usize = 2048;

/// Release times t₁ < … < t_T with prior probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    times: Vec<f64>,
    priors: Vec<f64>,
}

impl Constellation {
    pub fn new(times: Vec<f64>, priors: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "times",
                reason: "at least two symbols are required",
            });
        }
        if priors.len() != times.len() {
            return Err(Error::InvalidParameter {
                name: "priors",
                reason: "must have one entry per symbol",
            });
        }
        for &t in &times {
            non_negative("times", t)?;
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "times",
                reason: "must be strictly increasing",
            });
        }
        for &p in &priors {
            non_negative("priors", p)?;
        }
        if (priors.iter().sum::<f64>() - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "priors",
                reason: "must sum to 1",
            });
        }
        Ok(Constellation { times, priors })
    }

    pub fn equiprobable(times: Vec<f64>) -> Result<Self> {
        let n = times.len().max(1);
        Self::new(times, alloc::vec![1.0 / n as f64; n])
    }

    /// tᵢ = 1 + (i−1)/(T−1), i = 1…T, equal priors.
    pub fn uniform_alphabet(symbols: usize) -> Result<Self> {
        if symbols < 2 {
            return Err(Error::InvalidParameter {
                name: "symbols",
                reason: "at least two symbols are required",
            });
        }
        let step = 1.0 / (symbols - 1) as f64;
        Self::equiprobable((0..symbols).map(|i| 1.0 + i as f64 * step).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn priors_non_increasing(&self) -> bool {
        self.priors.windows(2).all(|w| w[0] >= w[1])
    }

    /// Symbol index drawn according to the priors.
    pub fn draw_symbol<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in self.priors.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.priors.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    fn binary(&self) -> Result<(f64, f64, f64, f64)> {
        if self.len() != 2 {
            return Err(Error::Precondition("a binary constellation is required"));
        }
        Ok((self.times[0], self.times[1], self.priors[0], self.priors[1]))
    }
}

/// Outcome of one detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionReport {
    /// 0-based index of the decided symbol.
    pub decided: usize,
    /// Σⱼ [Λ(t₂; yⱼ) − Λ(t₁; yⱼ)] for a binary constellation.
    pub llr: Option<f64>,
    /// Decision threshold y_th for a binary constellation and a single
    /// (possibly averaged) observation, when it is unique.
    pub threshold: Option<f64>,
}

/// ML estimate of the release time from one arrival: y minus the mode of
/// the noise, y − t₀ − (μ²/λ)(√(9/4 + λ²/μ²) − 3/2).
pub fn ml_estimate(y: f64, p: &IgParams) -> f64 {
    let (mu, lambda) = (p.mu(), p.lambda());
    let r = lambda / mu;
    y - p.shift() + (mu * mu / lambda) * (1.5 - (2.25 + r * r).sqrt())
}

/// Λ(t) = −(3/2) ln(y−t) − λ(y−t−μ)²/(2μ²(y−t)) for y > t, else −∞
/// (the log-likelihood of release time t without the ½ ln(λ/2π) constant).
pub fn log_likelihood(t: f64, y: f64, p: &IgParams) -> f64 {
    let n = y - t - p.shift();
    if n > 0.0 && n.is_finite() {
        p.log_kernel(n)
    } else {
        f64::NEG_INFINITY
    }
}

/// L(y) = Λ(t₂) − Λ(t₁)
///      = (3/2) ln((y−t₁)/(y−t₂)) − (λ/2μ²)(μ²(1/(y−t₂) − 1/(y−t₁)) + t₁ − t₂),
/// −∞ for y ≤ t₂. Requires t₁ < t₂.
pub fn llr(y: f64, t1: f64, t2: f64, p: &IgParams) -> f64 {
    let a = y - t2 - p.shift();
    let b = y - t1 - p.shift();
    if !(a > 0.0) {
        return f64::NEG_INFINITY;
    }
    let (mu, lambda) = (p.mu(), p.lambda());
    1.5 * (b / a).ln() - (lambda / (2.0 * mu * mu)) * (mu * mu * (1.0 / a - 1.0 / b) + t1 - t2)
}

/// lim_{y→∞} L(y) = (λ/2μ²)(t₂ − t₁).
pub fn llr_limit(t1: f64, t2: f64, p: &IgParams) -> f64 {
    p.lambda() / (2.0 * p.mu() * p.mu()) * (t2 - t1)
}

/// The maximiser of L on (t₂, ∞). dL/dy has the sign of λ(a+b) − 3ab with
/// a = y − t₂, b = a + (t₂ − t₁).
fn llr_peak(t1: f64, t2: f64, p: &IgParams) -> f64 {
    let c = t2 - t1;
    let lambda = p.lambda();
    let lin = 3.0 * c - 2.0 * lambda;
    let disc = (lin * lin + 12.0 * lambda * c).sqrt();
    // positive root of 3a² + (3c − 2λ)a − λc = 0, in the cancellation-free form
    let a = if lin <= 0.0 {
        (disc - lin) / 6.0
    } else {
        2.0 * lambda * c / (lin + disc)
    };
    t2 + p.shift() + a
}

fn bisect<F: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, above: F) -> f64 {
    // invariant: !above(lo), above(hi)
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_order(t1: f64, t2: f64) -> Result<()> {
    if t1.is_finite() && t2.is_finite() && t1 < t2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "t1, t2",
            reason: "require finite t1 < t2",
        })
    }
}

fn log_prior_ratio(p1: f64, p2: f64) -> Result<f64> {
    let tau = (positive("p1", p1)? / positive("p2", p2)?).ln();
    Ok(tau)
}

/// The unique y_th > t₂ with L(y_th) = ln(p₁/p₂); the MAP rule decides t₂
/// exactly when y > y_th.
///
/// L rises from −∞ at t₂ to a single peak and then falls towards
/// L∞ = (λ/2μ²)(t₂ − t₁), so the root is unique iff ln(p₁/p₂) < L∞;
/// otherwise [`Error::AmbiguousThreshold`].
pub fn decision_threshold(t1: f64, t2: f64, priors: (f64, f64), p: &IgParams) -> Result<f64> {
    check_order(t1, t2)?;
    let tau = log_prior_ratio(priors.0, priors.1)?;
    let limit = llr_limit(t1, t2, p);
    if !(tau < limit) {
        return Err(Error::AmbiguousThreshold {
            log_prior_ratio: tau,
            llr_limit: limit,
        });
    }
    let start = t2 + p.shift();
    let lo = start + 1e-12 * start.abs().max(1.0);
    if llr(lo, t1, t2, p) >= tau {
        return Err(Error::RootNotBracketed);
    }
    let mut offset = p.mu();
    let mut hi = start + offset;
    let mut doublings = 0;
    while llr(hi, t1, t2, p) <= tau {
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::RootNotBracketed);
        }
        offset *= 2.0;
        hi = start + offset;
    }
    Ok(bisect(lo, hi, |y| llr(y, t1, t2, p) > tau))
}

/// The set {y : L(y) > ln(p₁/p₂)} on which t₂ is decided, as an interval
/// (lo, hi) with hi possibly +∞; `None` when it is empty.
fn decide_second_region(t1: f64, t2: f64, priors: (f64, f64), p: &IgParams) -> Result<Option<(f64, f64)>> {
    check_order(t1, t2)?;
    if priors.1 == 0.0 {
        return Ok(None);
    }
    if priors.0 == 0.0 {
        return Ok(Some((t2 + p.shift(), f64::INFINITY)));
    }
    match decision_threshold(t1, t2, priors, p) {
        Ok(y) => Ok(Some((y, f64::INFINITY))),
        Err(Error::AmbiguousThreshold {
            log_prior_ratio: tau, ..
        }) => {
            let peak = llr_peak(t1, t2, p);
            if llr(peak, t1, t2, p) <= tau {
                return Ok(None);
            }
            let start = t2 + p.shift();
            let rise = bisect(start, peak, |y| llr(y, t1, t2, p) > tau);
            // beyond the peak L decreases towards L∞ ≤ τ
            let mut offset = (peak - start).max(p.mu());
            let mut hi = peak + offset;
            for _ in 0..MAX_DOUBLINGS {
                if llr(hi, t1, t2, p) <= tau || !hi.is_finite() {
                    break;
                }
                offset *= 2.0;
                hi = peak + offset;
            }
            let fall = if hi.is_finite() && llr(hi, t1, t2, p) <= tau {
                bisect(peak, hi, |y| llr(y, t1, t2, p) <= tau)
            } else {
                f64::INFINITY
            };
            Ok(Some((rise, fall)))
        }
        Err(e) => Err(e),
    }
}

/// Detection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    /// Joint MAP over all M arrivals.
    Ml,
    /// MAP on the average of the arrivals under IG(μ, Mλ) noise.
    LinearFilter,
}

impl Detector {
    /// Decided symbol index; the allocation-free path used by simulations.
    pub fn decide(&self, arrivals: &[f64], c: &Constellation, p: &IgParams) -> Result<usize> {
        if arrivals.is_empty() {
            return Err(Error::Precondition("at least one arrival is required"));
        }
        match self {
            Detector::Ml => map_argmax(c, |t| arrivals.iter().map(|&y| log_likelihood(t, y, p)).sum()),
            Detector::LinearFilter => {
                let z = arrivals.iter().sum::<f64>() / arrivals.len() as f64;
                let q = averaged_noise(p, arrivals.len())?;
                map_argmax(c, |t| log_likelihood(t, z, &q))
            }
        }
    }

    pub fn detect(&self, arrivals: &[f64], c: &Constellation, p: &IgParams) -> Result<DetectionReport> {
        match self {
            Detector::Ml => detect(arrivals, c, p),
            Detector::LinearFilter => linear_filter_detect(arrivals, c, p),
        }
    }
}

fn averaged_noise(p: &IgParams, molecules: usize) -> Result<IgParams> {
    IgParams::shifted(p.mu(), molecules as f64 * p.lambda(), p.shift())
}

fn map_argmax<F: Fn(f64) -> f64>(c: &Constellation, score: F) -> Result<usize> {
    let mut best = None;
    let mut best_score = f64::NEG_INFINITY;
    for (i, (&t, &prior)) in c.times.iter().zip(&c.priors).enumerate() {
        if prior == 0.0 {
            continue;
        }
        let s = score(t) + prior.ln();
        // strict comparison: ties go to the smaller index
        if s > best_score {
            best = Some(i);
            best_score = s;
        }
    }
    best.ok_or(Error::InconsistentObservation)
}

fn report(decided: usize, arrivals: &[f64], c: &Constellation, p: &IgParams, single: Option<f64>) -> DetectionReport {
    let (llr_value, threshold) = match c.binary() {
        Ok((t1, t2, p1, p2)) => {
            let l = arrivals.iter().map(|&y| llr(y, t1, t2, p)).sum();
            let th = single.and_then(|_| decision_threshold(t1, t2, (p1, p2), p).ok());
            (Some(l), th)
        }
        Err(_) => (None, None),
    };
    DetectionReport {
        decided,
        llr: llr_value,
        threshold,
    }
}

/// MAP detection: argmaxᵢ Σⱼ Λ(tᵢ; yⱼ) + ln pᵢ, ties to the smaller index.
/// Hypotheses later than some arrival score −∞.
pub fn detect(arrivals: &[f64], c: &Constellation, p: &IgParams) -> Result<DetectionReport> {
    let decided = Detector::Ml.decide(arrivals, c, p)?;
    let single = (arrivals.len() == 1).then(|| arrivals[0]);
    Ok(report(decided, arrivals, c, p, single))
}

/// Averages the M arrivals, Z = Ȳ, and runs single-observation MAP
/// detection under IG(μ, Mλ).
pub fn linear_filter_detect(arrivals: &[f64], c: &Constellation, p: &IgParams) -> Result<DetectionReport> {
    let decided = Detector::LinearFilter.decide(arrivals, c, p)?;
    let z = arrivals.iter().sum::<f64>() / arrivals.len() as f64;
    let q = averaged_noise(p, arrivals.len())?;
    Ok(report(decided, &[z], c, &q, Some(z)))
}

/// Exact SEP of single-molecule MAP detection for a binary constellation:
/// p₁·P(Y ∈ R₂ | t₁) + p₂·P(Y ∉ R₂ | t₂), R₂ the decide-t₂ region; with a
/// unique threshold this is p₁(1 − F_N(y_th − t₁)) + p₂ F_N(y_th − t₂).
pub fn sep_analytic(c: &Constellation, p: &IgParams) -> Result<f64> {
    let (t1, t2, p1, p2) = c.binary()?;
    let noise = p.unshifted();
    let mass = |lo: f64, hi: f64, t: f64| -> f64 {
        let from = lo - p.shift() - t;
        let to = hi - p.shift() - t;
        if noise.cdf(from) > 0.5 {
            noise.sf(from) - noise.sf(to)
        } else {
            noise.cdf(to) - noise.cdf(from)
        }
        .max(0.0)
    };
    Ok(match decide_second_region(t1, t2, (p1, p2), p)? {
        None => p2,
        Some((lo, hi)) => p1 * mass(lo, hi, t1) + p2 * (1.0 - mass(lo, hi, t2)),
    })
}

/// Σ_{i<T} pᵢ (1 − F_N(t_{i+1} − tᵢ)); requires non-increasing priors.
pub fn sep_upper_bound(c: &Constellation, p: &IgParams) -> Result<f64> {
    if !c.priors_non_increasing() {
        return Err(Error::Precondition("the SEP bound requires non-increasing priors"));
    }
    let noise = p.unshifted();
    Ok(c.times
        .windows(2)
        .zip(&c.priors)
        .map(|(w, &prior)| prior * noise.sf(w[1] - w[0]))
        .sum())
}

/// Errors among trials `trials` (global indices, each with its own stream of
/// `seed`): symbol drawn from the priors, `molecules` arrivals, detection.
/// Splitting the index range across workers gives identical totals.
pub fn count_errors(
    c: &Constellation,
    p: &IgParams,
    molecules: usize,
    detector: Detector,
    seed: u64,
    trials: Range<u64>,
) -> Result<u64> {
    if molecules == 0 {
        return Err(Error::InvalidParameter {
            name: "molecules",
            reason: "must be >= 1",
        });
    }
    let noise = p.unshifted();
    let mut arrivals = alloc::vec![0.0; molecules];
    let mut errors = 0;
    for trial in trials {
        let mut rng = rng::for_trial(seed, trial);
        let sent = c.draw_symbol(&mut rng);
        let t = c.times[sent] + p.shift();
        for y in arrivals.iter_mut() {
            *y = t + noise.sample_with(&mut rng);
        }
        if detector.decide(&arrivals, c, p)? != sent {
            errors += 1;
        }
    }
    Ok(errors)
}

/// Monte Carlo SEP over `trials` independent channel uses.
pub fn simulate_sep(
    c: &Constellation,
    p: &IgParams,
    molecules: usize,
    detector: Detector,
    trials: u64,
    seed: u64,
) -> Result<ProportionEstimate> {
    Ok(ProportionEstimate {
        successes: count_errors(c, p, molecules, detector, seed, 0..trials)?,
        trials,
    })
}

/// Analytic and simulated SEP of a binary constellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SepComparison {
    pub analytic: f64,
    pub simulated: ProportionEstimate,
}

pub fn sep_exact(c: &Constellation, p: &IgParams, trials: u64, seed: u64) -> Result<SepComparison> {
    Ok(SepComparison {
        analytic: sep_analytic(c, p)?,
        simulated: simulate_sep(c, p, 1, Detector::Ml, trials, seed)?,
    })
}

/// Coefficients of the high-velocity form ln Pₑ ≤ −C₁ s + C₂ + C₃ ln s,
/// s = M c v²/σ².
pub const ASYMPTOTIC_C1: f64 = 1.0;
pub const ASYMPTOTIC_C2: f64 = -LN_SQRT_2PI;
pub const ASYMPTOTIC_C3: f64 = -0.5;

/// ln[(2π)^{−1/2} e^{−s} / √s] with s = M c v²/σ², where c is the symbol
/// gap t₂ − t₁. The leading-order form does not involve the distance `d`,
/// which is only validated.
pub fn asymptotic_logpe_bound(v: f64, sigma2: f64, d: f64, c: f64, molecules: usize) -> Result<f64> {
    positive("d", d)?;
    let s =
        molecules_positive(molecules)? * positive("c", c)? * positive("v", v)?.powi(2) / positive("sigma2", sigma2)?;
    Ok(-ASYMPTOTIC_C1 * s + ASYMPTOTIC_C2 + ASYMPTOTIC_C3 * s.ln())
}

fn molecules_positive(molecules: usize) -> Result<f64> {
    if molecules == 0 {
        Err(Error::InvalidParameter {
            name: "molecules",
            reason: "must be >= 1",
        })
    } else {
        Ok(molecules as f64)
    }
}

/// Leading high-velocity behaviour of ln(1 − F_N(c)) for N ~ IG(d/v, M d²/σ²):
/// ln φ(a) + ln(1/a − 1/b), a, b = √(λ/c)(c/μ ∓ 1). Only meaningful once
/// c > μ (a > 0); provided to compare against [`asymptotic_logpe_bound`].
pub fn mills_log_sep_asymptotic(v: f64, sigma2: f64, d: f64, c: f64, molecules: usize) -> Result<f64> {
    let mu = positive("d", d)? / positive("v", v)?;
    let lambda = molecules_positive(molecules)? * d * d / positive("sigma2", sigma2)?;
    let r = (lambda / positive("c", c)?).sqrt();
    let a = r * (c / mu - 1.0);
    let b = r * (c / mu + 1.0);
    if !(a > 0.0) {
        return Err(Error::Domain("the asymptotic form needs c > d/v"));
    }
    Ok(-0.5 * a * a - 0.5 * (2.0 * PI).ln() + (1.0 / a - 1.0 / b).ln())
}

/// Exact-tail reference for the same quantity, ln(1 − F_N(c)).
pub fn log_tail_probability(v: f64, sigma2: f64, d: f64, c: f64, molecules: usize) -> Result<f64> {
    let mu = positive("d", d)? / positive("v", v)?;
    let lambda = molecules_positive(molecules)? * d * d / positive("sigma2", sigma2)?;
    let noise = IgParams::new(mu, lambda)?;
    Ok(noise.log_sf(positive("c", c)?))
}

/// ML estimates of (μ, λ) from k ≥ 2 training arrivals released at `t0`:
/// μ̂ = Ȳ − t₀, 1/λ̂ = (1/k) Σⱼ (1/(Yⱼ − t₀) − 1/μ̂).
/// The returned law is unshifted, ready for the detectors.
pub fn estimate_noise_params(t0: f64, arrivals: &[f64]) -> Result<IgParams> {
    if arrivals.len() < 2 {
        return Err(Error::DegenerateSample("at least two training arrivals are required"));
    }
    let t0 = non_negative("t0", t0)?;
    if arrivals.iter().any(|&y| !(y > t0) || !y.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "arrivals",
            reason: "must be finite and later than t0",
        });
    }
    if arrivals.iter().all(|&y| y == arrivals[0]) {
        return Err(Error::DegenerateSample("all arrivals are equal; lambda is undefined"));
    }
    let k = arrivals.len() as f64;
    let mu_hat = arrivals.iter().map(|&y| y - t0).sum::<f64>() / k;
    let inv_lambda = arrivals.iter().map(|&y| 1.0 / (y - t0) - 1.0 / mu_hat).sum::<f64>() / k;
    if !(inv_lambda > 0.0) || !inv_lambda.is_finite() {
        return Err(Error::DegenerateSample("sample spread too small to estimate lambda"));
    }
    IgParams::new(mu_hat, 1.0 / inv_lambda)
}
