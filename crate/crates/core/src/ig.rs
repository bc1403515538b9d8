//! Inverse Gaussian noise law and its generalised (GIG) parent family.
//!
//! `IgParams` describes N ~ IG(μ, λ), optionally translated by a location
//! `shift` t₀, with density
//!
//! ```text
//! f(n) = sqrt(λ / (2π n'³)) · exp(−λ (n' − μ)² / (2 μ² n')),   n' = n − t₀ > 0
//! ```
//!
//! and zero elsewhere.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bessel;
use crate::error::{non_negative, positive, Error, Result};
use crate::rng;
use crate::special::{exp_e1, mills_ratio, norm_cdf, norm_logcdf, norm_pdf, norm_sf};

/// Parameters of a (shifted) inverse Gaussian law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IgParams {
    mu: f64,
    lambda: f64,
    shift: f64,
}

impl IgParams {
    /// IG(μ, λ) with no location shift.
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        Ok(IgParams {
            mu: positive("mu", mu)?,
            lambda: positive("lambda", lambda)?,
            shift: 0.0,
        })
    }

    /// IG(μ, λ) translated to start at `shift`.
    pub fn shifted(mu: f64, lambda: f64, shift: f64) -> Result<Self> {
        Self::new(mu, lambda)?.with_shift(shift)
    }

    pub fn with_shift(self, shift: f64) -> Result<Self> {
        Ok(IgParams {
            shift: non_negative("shift", shift)?,
            ..self
        })
    }

    /// The same law with the location shift removed.
    pub fn unshifted(self) -> Self {
        IgParams { shift: 0.0, ..self }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// E[N] = t₀ + μ.
    pub fn mean(&self) -> f64 {
        self.shift + self.mu
    }

    /// Var[N] = μ³/λ.
    pub fn variance(&self) -> f64 {
        self.mu * self.mu * self.mu / self.lambda
    }

    /// λ/μ, the argument of every Bessel function in the entropy.
    pub fn shape_ratio(&self) -> f64 {
        self.lambda / self.mu
    }

    /// The exponent part of the log-density without the ½·ln(λ/2π) constant:
    /// −(3/2) ln n − λ (n − μ)² / (2 μ² n), for n > 0 measured from the shift.
    pub(crate) fn log_kernel(&self, n: f64) -> f64 {
        let dev = n - self.mu;
        -1.5 * n.ln() - self.lambda * dev * dev / (2.0 * self.mu * self.mu * n)
    }

    pub(crate) fn log_norm_const(&self) -> f64 {
        0.5 * (self.lambda / (2.0 * PI)).ln()
    }

    /// Density at `n`; exactly 0 for n ≤ shift.
    pub fn pdf(&self, n: f64) -> f64 {
        let x = n - self.shift;
        if !(x > 0.0) {
            return 0.0;
        }
        if x.is_infinite() {
            return 0.0;
        }
        if x < 1e-100 {
            return self.logpdf(n).exp();
        }
        let dev = x - self.mu;
        (self.lambda / (2.0 * PI * x * x * x)).sqrt() * (-self.lambda * dev * dev / (2.0 * self.mu * self.mu * x)).exp()
    }

    /// Log-density; `f64::NEG_INFINITY` for n ≤ shift.
    pub fn logpdf(&self, n: f64) -> f64 {
        let x = n - self.shift;
        if !(x > 0.0) {
            return f64::NEG_INFINITY;
        }
        self.log_norm_const() + self.log_kernel(x)
    }

    fn cdf_args(&self, x: f64) -> (f64, f64) {
        let r = (self.lambda / x).sqrt();
        (r * (x / self.mu - 1.0), r * (x / self.mu + 1.0))
    }

    /// Distribution function.
    ///
    /// The e^{2λ/μ}·Φ(−b) term is evaluated as exp(2λ/μ + ln Φ(−b)), so large
    /// λ/μ does not overflow.
    pub fn cdf(&self, n: f64) -> f64 {
        let x = n - self.shift;
        if !(x > 0.0) {
            return 0.0;
        }
        if x.is_infinite() {
            return 1.0;
        }
        let (a, b) = self.cdf_args(x);
        let second = (2.0 * self.lambda / self.mu + norm_logcdf(-b)).exp();
        (norm_cdf(a) + second).clamp(0.0, 1.0)
    }

    /// Survival function 1 − F(n), accurate deep into the upper tail.
    pub fn sf(&self, n: f64) -> f64 {
        let x = n - self.shift;
        if !(x > 0.0) {
            return 1.0;
        }
        if x.is_infinite() {
            return 0.0;
        }
        let (a, b) = self.cdf_args(x);
        if a > 5.0 {
            // Φ(−a) − e^{2λ/μ}Φ(−b) = φ(a)·(R(a) − R(b)), since e^{2λ/μ}φ(b) = φ(a)
            return (norm_pdf(a) * (mills_ratio(a) - mills_ratio(b))).max(0.0);
        }
        let second = (2.0 * self.lambda / self.mu + norm_logcdf(-b)).exp();
        (norm_sf(a) - second).clamp(0.0, 1.0)
    }

    /// ln(1 − F(n)), finite where `sf` underflows.
    pub fn log_sf(&self, n: f64) -> f64 {
        let x = n - self.shift;
        if !(x > 0.0) {
            return 0.0;
        }
        let (a, b) = self.cdf_args(x);
        if a > 5.0 {
            let diff = mills_ratio(a) - mills_ratio(b);
            return -0.5 * a * a - crate::special::LN_SQRT_2PI + diff.ln();
        }
        self.sf(n).ln()
    }

    /// Smallest point (found by doubling then bisection) beyond which the
    /// remaining upper-tail mass is below `tail_mass`.
    pub fn tail_cutoff(&self, tail_mass: f64) -> f64 {
        let mut hi = self.mu.max(self.variance().sqrt());
        while self.log_sf(self.shift + hi) > tail_mass.ln() {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.log_sf(self.shift + mid) > tail_mass.ln() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.shift + hi
    }

    /// One draw by the Michael–Schucany–Haas transform.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        let y = z * z;
        let mu = self.mu;
        let my = mu * y;
        // roots of the quadratic; the larger root has no cancellation, the
        // smaller follows from their product μ².
        let large = mu
            + mu * my / (2.0 * self.lambda)
            + (mu / (2.0 * self.lambda)) * (4.0 * mu * self.lambda * y + my * my).sqrt();
        let small = mu * mu / large;
        let u: f64 = rng.random();
        let x = if u <= mu / (mu + small) { small } else { large };
        self.shift + x
    }

    /// `count` i.i.d. draws, deterministic in `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng::seeded(seed);
        (0..count).map(|_| self.sample_with(&mut rng)).collect()
    }

    /// Differential entropy in nats, evaluated from K_{−1/2}, K_{1/2},
    /// K_{−3/2} and ∂K_γ/∂γ at γ = −1/2 (the shift does not enter).
    pub fn entropy(&self) -> Result<f64> {
        let z = self.shape_ratio();
        let k_m12 = bessel::k_scaled(-0.5, z)?;
        let k_p12 = bessel::k_scaled(0.5, z)?;
        let k_m32 = bessel::k_scaled(-1.5, z)?;
        let dk = bessel::k_dorder_scaled(-0.5, z)?;
        let h = (2.0 * self.mu).ln() + k_m12.ln() - z + 1.5 * dk / k_m12 + 0.5 * z * (k_p12 + k_m32) / k_m12;
        if h.is_finite() {
            Ok(h)
        } else {
            Err(Error::Domain("IG entropy diverges (lambda/mu too close to 0)"))
        }
    }

    /// Differential entropy from the half-order closed form
    /// ½·ln(2πe μ³/λ) − (3/2)·e^{2λ/μ}·E₁(2λ/μ).
    pub fn entropy_closed_form(&self) -> f64 {
        let z = self.shape_ratio();
        0.5 * (2.0 * PI * core::f64::consts::E * self.variance()).ln() - 1.5 * exp_e1(2.0 * z)
    }
}

/// Parameters of GIG(γ, μ, λ):
/// f(x) = x^{γ−1}·exp(−(λ/x + λx/μ²)/2) / (2 μ^γ K_γ(λ/μ)), x > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigParams {
    gamma: f64,
    mu: f64,
    lambda: f64,
}

impl GigParams {
    /// λ = 0 is rejected: the normaliser K_γ(0) diverges.
    pub fn new(gamma: f64, mu: f64, lambda: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: "must be finite",
            });
        }
        Ok(GigParams {
            gamma,
            mu: positive("mu", mu)?,
            lambda: positive("lambda", lambda)?,
        })
    }

    /// The GIG member equal to IG(μ, λ), at γ = −1/2.
    pub fn from_ig(p: &IgParams) -> Self {
        GigParams {
            gamma: -0.5,
            mu: p.mu,
            lambda: p.lambda,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn log_normaliser(&self) -> Result<f64> {
        let z = self.lambda / self.mu;
        Ok(core::f64::consts::LN_2 + self.gamma * self.mu.ln() + bessel::k_scaled(self.gamma, z)?.ln() - z)
    }

    pub fn logpdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || x.is_infinite() {
            return Ok(f64::NEG_INFINITY);
        }
        let kernel = (self.gamma - 1.0) * x.ln() - 0.5 * (self.lambda / x + self.lambda * x / (self.mu * self.mu));
        Ok(kernel - self.log_normaliser()?)
    }

    /// Density; 0 for x ≤ 0.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.logpdf(x)?.exp())
    }

    /// Differential entropy in nats.
    pub fn entropy(&self) -> Result<f64> {
        let z = self.lambda / self.mu;
        let g = self.gamma;
        let kg = bessel::k_scaled(g, z)?;
        let kp = bessel::k_scaled(g + 1.0, z)?;
        let km = bessel::k_scaled(g - 1.0, z)?;
        let dk = bessel::k_dorder_scaled(g, z)?;
        let h = (2.0 * self.mu).ln() + kg.ln() - z - (g - 1.0) * dk / kg + 0.5 * z * (kp + km) / kg;
        if h.is_finite() {
            Ok(h)
        } else {
            Err(Error::Domain("GIG entropy diverges"))
        }
    }
}

/// Relative tolerance on the common κ = λᵢ/(cᵢ μᵢ²) of [`combine_additive`].
pub const KAPPA_TOLERANCE: f64 = 1e-9;

/// Law of Σ cᵢ Nᵢ for Nᵢ ~ IG(μᵢ, λᵢ) sharing κ = λᵢ/(cᵢ μᵢ²):
/// IG(Σ cᵢ μᵢ, κ (Σ cᵢ μᵢ)²), shifted by Σ cᵢ t₀ᵢ.
pub fn combine_additive(parts: &[(f64, IgParams)]) -> Result<IgParams> {
    let (c0, p0) = parts
        .first()
        .ok_or(Error::Precondition("at least one component is required"))?;
    let kappa = p0.lambda / (positive("c", *c0)? * p0.mu * p0.mu);
    let mut mean = 0.0;
    let mut shift = 0.0;
    for (c, p) in parts {
        let c = positive("c", *c)?;
        let k = p.lambda / (c * p.mu * p.mu);
        if (k - kappa).abs() > KAPPA_TOLERANCE * kappa {
            return Err(Error::Precondition(
                "lambda_i / (c_i mu_i^2) must be equal across components",
            ));
        }
        mean += c * p.mu;
        shift += c * p.shift;
    }
    IgParams::shifted(mean, kappa * mean * mean, shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ig(mu: f64, lambda: f64) -> IgParams {
        IgParams::new(mu, lambda).unwrap()
    }

    #[test]
    fn constructor_invariants() {
        assert!(IgParams::new(0.0, 1.0).is_err());
        assert!(IgParams::new(1.0, -1.0).is_err());
        assert!(IgParams::new(f64::NAN, 1.0).is_err());
        assert!(IgParams::shifted(1.0, 1.0, -0.1).is_err());
        assert!(GigParams::new(0.3, 1.0, 0.0).is_err());
        assert!(GigParams::new(f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn pdf_support_and_reference_value() {
        let p = ig(1.0, 1.0);
        assert_eq!(p.pdf(-1.0), 0.0);
        assert_eq!(p.pdf(0.0), 0.0);
        let expected = (1.0 / (2.0 * PI)).sqrt();
        assert!((p.pdf(1.0) - expected).abs() < 1e-15);
        assert!((p.logpdf(1.0) - expected.ln()).abs() < 1e-14);
        assert_eq!(p.logpdf(0.0), f64::NEG_INFINITY);
        let s = IgParams::shifted(1.0, 1.0, 2.0).unwrap();
        assert_eq!(s.pdf(2.0), 0.0);
        assert_eq!(s.logpdf(1.5), f64::NEG_INFINITY);
        assert!((s.pdf(3.0) - expected).abs() < 1e-15);
        assert!(p.pdf(1e-200).is_finite());
        assert_eq!(p.pdf(f64::INFINITY), 0.0);
    }

    #[test]
    fn cdf_reference_and_limits() {
        let p = ig(1.0, 1.0);
        assert!((p.cdf(1.0) - 0.668_102_001_223_170_6).abs() < 1e-12);
        assert_eq!(p.cdf(0.0), 0.0);
        assert_eq!(p.cdf(f64::INFINITY), 1.0);
        assert!((p.cdf(1e4) - 1.0).abs() < 1e-15);
        assert!((p.sf(1.0) + p.cdf(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_survives_huge_shape_ratio() {
        let p = ig(1.0, 1e6);
        for &n in &[0.99, 0.999, 1.0, 1.001, 1.01] {
            let f = p.cdf(n);
            assert!(f.is_finite() && (0.0..=1.0).contains(&f), "n={n} f={f}");
        }
        // mean = median to leading order when λ/μ is huge
        assert!((p.cdf(1.0) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn log_sf_deep_tail() {
        // μ = 0.1, λ = 1: sf(1) ≈ 2.0e-20; compare with the direct branch
        // where it is still representable.
        let p = ig(0.1, 1.0);
        let l = p.log_sf(1.0);
        assert!(l < -40.0 && l > -50.0);
        assert!((l.exp() - p.sf(1.0)).abs() < 1e-12 * p.sf(1.0));
        let q = ig(1.0, 1.0);
        assert!((q.log_sf(2.0) - q.sf(2.0).ln()).abs() < 1e-13);
    }

    #[test]
    fn entropy_reference_values() {
        assert!((ig(1.0, 1.0).entropy().unwrap() - 0.876_945).abs() < 1e-4);
        assert!((ig(2.0, 4.0).entropy().unwrap() - 1.455_985).abs() < 1e-4);
        for &(mu, lambda) in &[(1.0, 1.0), (0.1, 10.0), (10.0, 0.1), (0.5, 3.0)] {
            let p = ig(mu, lambda);
            let gauss = 0.5 * (2.0 * PI * core::f64::consts::E * p.variance()).ln();
            assert!(p.entropy().unwrap() < gauss);
            assert!((p.entropy().unwrap() - p.entropy_closed_form()).abs() < 1e-12);
        }
        assert!(ig(1.0, 1e8).entropy().unwrap().is_finite());
    }

    #[test]
    fn gig_reduces_to_ig() {
        let p = ig(1.3, 0.7);
        let g = GigParams::from_ig(&p);
        for i in 1..200 {
            let x = i as f64 * 0.05;
            let a = g.pdf(x).unwrap();
            let b = p.pdf(x);
            assert!(((a - b) / b).abs() < 1e-12, "x={x}");
        }
        assert_eq!(g.pdf(0.0).unwrap(), 0.0);
        assert_eq!(g.pdf(-3.0).unwrap(), 0.0);
        assert!((g.entropy().unwrap() - p.entropy().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn additive_combination() {
        let p = ig(1.5, 2.0);
        assert_eq!(combine_additive(&[(1.0, p)]).unwrap(), p);
        let m = 5;
        let parts: Vec<_> = (0..m).map(|_| (1.0 / m as f64, p)).collect();
        let z = combine_additive(&parts).unwrap();
        assert!((z.mu() - 1.5).abs() < 1e-14);
        assert!((z.lambda() - 10.0).abs() < 1e-12);
        let two = combine_additive(&[(1.0, ig(1.0, 1.0)), (1.0, ig(1.0, 1.0))]).unwrap();
        assert!((two.mu() - 2.0).abs() < 1e-15 && (two.lambda() - 4.0).abs() < 1e-14);
        assert!(combine_additive(&[(1.0, ig(1.0, 1.0)), (1.0, ig(1.0, 2.0))]).is_err());
        assert!(combine_additive(&[]).is_err());
        assert!(combine_additive(&[(0.0, p)]).is_err());
    }

    #[test]
    fn tail_cutoff_bounds_remaining_mass() {
        for &(mu, lambda) in &[(1.0, 1.0), (0.1, 10.0), (10.0, 0.1)] {
            let p = ig(mu, lambda);
            let q = p.tail_cutoff(1e-12);
            assert!(p.sf(q) <= 1e-12 * (1.0 + 1e-9));
            assert!(p.sf(0.99 * q) > 1e-12 * 0.5);
        }
    }

    #[test]
    fn sampler_is_deterministic_and_positive() {
        let p = IgParams::shifted(0.5, 0.2, 1.0).unwrap();
        let a = p.sample(100, 11);
        assert_eq!(a, p.sample(100, 11));
        assert_ne!(a, p.sample(100, 12));
        assert!(a.iter().all(|&x| x > 1.0));
    }
}
