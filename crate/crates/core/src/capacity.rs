//! Output entropy, mutual information `I(X;Y) = h(Y) − h(N)` for four input
//! laws under a mean constraint E[X] = m, and the capacity bounds
//!
//! ```text
//! h(IG(m+μ, (λ/μ²)(m+μ)²)) − h(N)  ≤  C  ≤  ln((m+μ)e) − h(N)
//! ```
//!
//! All quantities are in nats. The noise law is taken unshifted.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{positive, Error, Result};
use crate::ig::{combine_additive, IgParams};
use crate::quad;

/// Tail mass neglected by the output-entropy integrals.
pub const TAIL_MASS: f64 = 1e-14;
const ABS_TOL: f64 = 1e-12;
const REL_TOL: f64 = 1e-10;
/// Margin demanded of 1/μ² − 2/(mλ) for the exponential-input law.
pub const REGIME_MARGIN: f64 = 1e-12;

/// The four input distributions compared against the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputKind {
    /// The (hypothetical) input whose output is exponential with mean m + μ;
    /// attains the upper bound.
    ExponentialOutput,
    /// X ~ IG(m, (λ/μ²) m²), so Y is IG and the lower bound is attained.
    IgInput,
    /// X ~ Uniform[0, 2m].
    UniformInput,
    /// X ~ Exponential with mean m; needs m λ > 2 μ² (v² > 2σ²/m).
    ExponentialInput,
}

/// An input law with mean `mean`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputLaw {
    kind: InputKind,
    mean: f64,
}

impl InputLaw {
    pub fn new(kind: InputKind, mean: f64) -> Result<Self> {
        Ok(InputLaw {
            kind,
            mean: positive("m", mean)?,
        })
    }

    pub fn kind(&self) -> InputKind {
        self.kind
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Whether the law is defined for noise `p`.
    pub fn is_valid_for(&self, p: &IgParams) -> bool {
        self.kind != InputKind::ExponentialInput || exponential_input_mu(self.mean, p).is_ok()
    }
}

/// μ' with 1/μ'² = 1/μ² − 2/(mλ), the mean of the tilted IG law in the
/// exponential-input output density.
fn exponential_input_mu(m: f64, p: &IgParams) -> Result<f64> {
    let inv2 = 1.0 / (p.mu() * p.mu()) - 2.0 / (m * p.lambda());
    if inv2 > REGIME_MARGIN {
        Ok(1.0 / inv2.sqrt())
    } else {
        Err(Error::InvalidRegime)
    }
}

fn ig_input_output_law(m: f64, p: &IgParams) -> Result<IgParams> {
    let kappa = p.lambda() / (p.mu() * p.mu());
    let input = IgParams::new(m, kappa * m * m)?;
    combine_additive(&[(1.0, input), (1.0, p.unshifted())])
}

/// ln((m+μ)e) − h(N).
pub fn capacity_upper_bound(m: f64, p: &IgParams) -> Result<f64> {
    let m = positive("m", m)?;
    Ok(((m + p.mu()) * core::f64::consts::E).ln() - p.entropy()?)
}

/// h(IG(m+μ, (λ/μ²)(m+μ)²)) − h(N).
pub fn capacity_lower_bound(m: f64, p: &IgParams) -> Result<f64> {
    let m = positive("m", m)?;
    Ok(ig_input_output_law(m, p)?.entropy()? - p.entropy()?)
}

/// Density of Y = X + N at `y`.
pub fn output_pdf(y: f64, law: &InputLaw, p: &IgParams) -> Result<f64> {
    Ok(OutputDensity::new(law, p)?.pdf(y))
}

/// Output density with the law-dependent constants precomputed.
#[derive(Debug, Clone, Copy)]
enum OutputDensity {
    Exponential { mean: f64 },
    Ig(IgParams),
    Uniform { width: f64, noise: IgParams },
    Tilted { m: f64, log_scale: f64, tilted: IgParams },
}

impl OutputDensity {
    fn new(law: &InputLaw, p: &IgParams) -> Result<Self> {
        let m = law.mean;
        let noise = p.unshifted();
        Ok(match law.kind {
            InputKind::ExponentialOutput => OutputDensity::Exponential { mean: m + noise.mu() },
            InputKind::IgInput => OutputDensity::Ig(ig_input_output_law(m, &noise)?),
            InputKind::UniformInput => OutputDensity::Uniform { width: 2.0 * m, noise },
            InputKind::ExponentialInput => {
                let mu_t = exponential_input_mu(m, &noise)?;
                OutputDensity::Tilted {
                    m,
                    log_scale: noise.lambda() / noise.mu() - noise.lambda() / mu_t - m.ln(),
                    tilted: IgParams::new(mu_t, noise.lambda())?,
                }
            }
        })
    }

    fn pdf(&self, y: f64) -> f64 {
        if !(y > 0.0) {
            return 0.0;
        }
        match *self {
            OutputDensity::Exponential { mean } => (-y / mean).exp() / mean,
            OutputDensity::Ig(law) => law.pdf(y),
            OutputDensity::Uniform { width, noise } => {
                // F(y) − F(y − 2m), switched to survival functions in the
                // upper tail to avoid cancellation
                let lo = y - width;
                let mass = if noise.cdf(lo) > 0.5 {
                    noise.sf(lo) - noise.sf(y)
                } else {
                    noise.cdf(y) - noise.cdf(lo)
                };
                mass.max(0.0) / width
            }
            OutputDensity::Tilted { m, log_scale, tilted } => {
                let f = tilted.cdf(y);
                if f > 0.0 {
                    (log_scale - y / m + f.ln()).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Point beyond which the output carries less than ~`TAIL_MASS`.
    fn upper_limit(&self, law: &InputLaw, noise: &IgParams) -> f64 {
        let m = law.mean;
        let tail_ln = -TAIL_MASS.ln();
        match *self {
            OutputDensity::Exponential { mean } => mean * tail_ln,
            OutputDensity::Ig(out) => out.tail_cutoff(TAIL_MASS),
            OutputDensity::Uniform { width, noise } => width + noise.tail_cutoff(TAIL_MASS),
            // P(X + N > a + b) ≤ P(X > a) + P(N > b)
            OutputDensity::Tilted { .. } => m * tail_ln + noise.tail_cutoff(TAIL_MASS),
        }
    }

    fn breakpoints(&self, law: &InputLaw, noise: &IgParams) -> Vec<f64> {
        let upper = self.upper_limit(law, noise);
        let sd = noise.variance().sqrt();
        let mut pts: Vec<f64> = (0..=16).map(|i| upper * i as f64 / 16.0).collect();
        // resolve the noise peak and, for uniform input, its copy at 2m
        let mode_offsets = [noise.mu(), 2.0 * law.mean + noise.mu()];
        for centre in mode_offsets {
            for k in -4..=4 {
                pts.push(centre + k as f64 * sd);
            }
        }
        pts.push(2.0 * law.mean);
        pts.retain(|&x| (0.0..=upper).contains(&x));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// h(Y) by adaptive quadrature of −f ln f, with f ln f → 0 where f = 0.
pub fn output_entropy_quadrature(law: &InputLaw, p: &IgParams) -> Result<f64> {
    let noise = p.unshifted();
    let density = OutputDensity::new(law, &noise)?;
    let pts = density.breakpoints(law, &noise);
    let integral = quad::integrate_with_breaks(
        |y| {
            let f = density.pdf(y);
            if f > 0.0 {
                -f * f.ln()
            } else {
                0.0
            }
        },
        &pts,
        ABS_TOL,
        REL_TOL,
    )?;
    Ok(integral.value)
}

/// ∫ f_Y by the same quadrature scheme, for normalisation checks.
pub fn output_mass(law: &InputLaw, p: &IgParams) -> Result<f64> {
    let noise = p.unshifted();
    let density = OutputDensity::new(law, &noise)?;
    let pts = density.breakpoints(law, &noise);
    Ok(quad::integrate_with_breaks(|y| density.pdf(y), &pts, ABS_TOL, REL_TOL)?.value)
}

/// h(Y): closed form for the exponential-output and IG-input laws,
/// quadrature otherwise.
pub fn output_entropy(law: &InputLaw, p: &IgParams) -> Result<f64> {
    let noise = p.unshifted();
    match law.kind {
        InputKind::ExponentialOutput => Ok(((law.mean + noise.mu()) * core::f64::consts::E).ln()),
        InputKind::IgInput => ig_input_output_law(law.mean, &noise)?.entropy(),
        _ => output_entropy_quadrature(law, &noise),
    }
}

/// I(X;Y) = h(Y) − h(N).
pub fn mutual_information(law: &InputLaw, p: &IgParams) -> Result<f64> {
    Ok(output_entropy(law, p)? - p.entropy()?)
}

/// One draw of Y. For the exponential-output law Y is drawn directly from
/// the exponential with mean m + μ (no input law produces it exactly).
pub fn sample_output<R: Rng + ?Sized>(law: &InputLaw, p: &IgParams, rng: &mut R) -> Result<f64> {
    let noise = p.unshifted();
    let m = law.mean;
    Ok(match law.kind {
        InputKind::ExponentialOutput => (m + noise.mu()) * rng.sample::<f64, _>(Exp1),
        InputKind::IgInput => ig_input_output_law(m, &noise)?.sample_with(rng),
        InputKind::UniformInput => 2.0 * m * rng.random::<f64>() + noise.sample_with(rng),
        InputKind::ExponentialInput => {
            exponential_input_mu(m, &noise)?;
            m * rng.sample::<f64, _>(Exp1) + noise.sample_with(rng)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ig(mu: f64, lambda: f64) -> IgParams {
        IgParams::new(mu, lambda).unwrap()
    }

    const ALL: [InputKind; 4] = [
        InputKind::ExponentialOutput,
        InputKind::IgInput,
        InputKind::UniformInput,
        InputKind::ExponentialInput,
    ];

    #[test]
    fn bound_reference_values() {
        let p = ig(1.0, 1.0);
        assert!((capacity_upper_bound(1.0, &p).unwrap() - 0.816_202).abs() < 2e-6);
        assert!((capacity_lower_bound(1.0, &p).unwrap() - 0.579_048).abs() < 2e-6);
        assert!(capacity_lower_bound(1e-9, &p).unwrap().abs() < 1e-6);
        assert!(capacity_upper_bound(0.0, &p).is_err());
    }

    #[test]
    fn output_densities_normalise() {
        for &(mu, lambda) in &[(1.0, 1.0), (0.1, 1.0), (0.5, 20.0), (0.25, 1.0)] {
            let p = ig(mu, lambda);
            for kind in ALL {
                let law = InputLaw::new(kind, 1.0).unwrap();
                if !law.is_valid_for(&p) {
                    continue;
                }
                let mass = output_mass(&law, &p).unwrap();
                assert!(
                    (mass - 1.0).abs() < 1e-6,
                    "{kind:?} mu={mu} lambda={lambda} mass={mass}"
                );
            }
        }
    }

    #[test]
    fn quadrature_matches_closed_entropies() {
        for &(mu, lambda) in &[(1.0, 1.0), (0.1, 1.0), (0.5, 20.0)] {
            let p = ig(mu, lambda);
            for kind in [InputKind::ExponentialOutput, InputKind::IgInput] {
                let law = InputLaw::new(kind, 1.0).unwrap();
                let q = output_entropy_quadrature(&law, &p).unwrap();
                let c = output_entropy(&law, &p).unwrap();
                assert!((q - c).abs() < 1e-6, "{kind:?} {q} {c}");
            }
        }
        let p = ig(1.0, 1.0);
        let up = InputLaw::new(InputKind::ExponentialOutput, 1.0).unwrap();
        assert_eq!(
            mutual_information(&up, &p).unwrap(),
            capacity_upper_bound(1.0, &p).unwrap()
        );
        let lo = InputLaw::new(InputKind::IgInput, 1.0).unwrap();
        assert_eq!(
            mutual_information(&lo, &p).unwrap(),
            capacity_lower_bound(1.0, &p).unwrap()
        );
    }

    #[test]
    fn exponential_input_regime() {
        // d = σ² = m = 1: valid iff v² > 2
        let law = InputLaw::new(InputKind::ExponentialInput, 1.0).unwrap();
        let slow = ig(1.0 / 1.4, 1.0);
        assert!(!law.is_valid_for(&slow));
        assert_eq!(output_pdf(1.0, &law, &slow), Err(Error::InvalidRegime));
        assert_eq!(mutual_information(&law, &slow), Err(Error::InvalidRegime));
        assert!(law.is_valid_for(&ig(1.0 / 1.5, 1.0)));
    }

    #[test]
    fn exponential_input_density_matches_convolution() {
        let p = ig(0.5, 1.0);
        let law = InputLaw::new(InputKind::ExponentialInput, 1.0).unwrap();
        for &y in &[0.1, 0.5, 1.0, 3.0, 10.0] {
            let conv = quad::integrate(|n| (-(y - n)).exp() * p.pdf(n), 0.0, y, 1e-14, 1e-12)
                .unwrap()
                .value;
            let f = output_pdf(y, &law, &p).unwrap();
            assert!(((f - conv) / conv).abs() < 1e-9, "y={y}");
        }
    }

    #[test]
    fn uniform_mi_grows_with_velocity_and_respects_upper_bound() {
        let law = InputLaw::new(InputKind::UniformInput, 1.0).unwrap();
        let mut last = f64::NEG_INFINITY;
        for v in [1.0, 2.0, 4.0, 8.0] {
            let p = ig(1.0 / v, 1.0);
            let mi = mutual_information(&law, &p).unwrap();
            assert!(mi > last);
            assert!(mi <= capacity_upper_bound(1.0, &p).unwrap() + 1e-4);
            if v >= 2.0 {
                assert!(capacity_lower_bound(1.0, &p).unwrap() <= mi);
            }
            last = mi;
        }
    }

    #[test]
    fn uniform_input_loses_to_ig_input_at_low_velocity() {
        // reference h(Y) − h(N) by independent quadrature: 0.50650 at v = 1
        let p = ig(1.0, 1.0);
        let law = InputLaw::new(InputKind::UniformInput, 1.0).unwrap();
        let mi = mutual_information(&law, &p).unwrap();
        assert!((mi - 0.506_50).abs() < 1e-4, "{mi}");
        assert!(mi < capacity_lower_bound(1.0, &p).unwrap());
    }
}
