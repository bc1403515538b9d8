//! The physical channel: parameter mapping from drift/diffusion to the IG
//! noise law, the additive timing channel `Y = X + N`, and a discretised
//! Wiener first-passage simulator that serves as ground truth for the IG
//! model.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{non_negative, positive, Error, Result};
use crate::ig::IgParams;
use crate::rng;

/// Transmitter–receiver geometry and transport.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    distance: f64,
    velocity: f64,
    sigma2: f64,
}

impl ChannelParams {
    /// `distance` d, drift `velocity` v > 0 and Wiener variance coefficient
    /// σ² (σ² = D/2 for diffusion coefficient D).
    pub fn new(distance: f64, velocity: f64, sigma2: f64) -> Result<Self> {
        Ok(ChannelParams {
            distance: positive("distance", distance)?,
            velocity: positive("velocity", velocity)?,
            sigma2: positive("sigma2", sigma2)?,
        })
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Noise law of the first arrival: IG(d/v, d²/σ²).
    pub fn to_ig(&self) -> IgParams {
        IgParams::new(
            self.distance / self.velocity,
            self.distance * self.distance / self.sigma2,
        )
        .expect("validated channel parameters give a valid IG law")
    }
}

/// Arrival times of the M molecules of one channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    arrivals: Vec<f64>,
}

impl Observation {
    pub fn new(arrivals: Vec<f64>) -> Result<Self> {
        if arrivals.is_empty() {
            return Err(Error::InvalidParameter {
                name: "arrivals",
                reason: "must be non-empty",
            });
        }
        for &y in &arrivals {
            positive("arrivals", y)?;
        }
        Ok(Observation { arrivals })
    }

    /// A single-molecule observation.
    pub fn single(y: f64) -> Result<Self> {
        Self::new(alloc::vec![y])
    }

    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mean(&self) -> f64 {
        self.arrivals.iter().sum::<f64>() / self.arrivals.len() as f64
    }

    pub fn earliest(&self) -> f64 {
        self.arrivals.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Release `molecules` molecules at time `x`: arrivals x + Nⱼ, Nⱼ i.i.d.
pub fn transmit(x: f64, molecules: usize, params: &ChannelParams, seed: u64) -> Result<Observation> {
    transmit_with(x, molecules, &params.to_ig(), &mut rng::seeded(seed))
}

/// As [`transmit`], drawing from `rng` under the noise law `noise`.
pub fn transmit_with<R: Rng + ?Sized>(x: f64, molecules: usize, noise: &IgParams, rng: &mut R) -> Result<Observation> {
    non_negative("x", x)?;
    if molecules == 0 {
        return Err(Error::InvalidParameter {
            name: "molecules",
            reason: "must be >= 1",
        });
    }
    let noise = noise.unshifted();
    let arrivals = (0..molecules).map(|_| x + noise.sample_with(rng)).collect();
    Ok(Observation { arrivals })
}

/// Default cap on simulated steps per path.
pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000_000;

/// Bridge-crossing exponents beyond this have probability below e⁻⁴⁰ and are
/// not drawn.
const BRIDGE_SKIP_EXPONENT: f64 = 40.0;

/// Euler simulation of W(t) = v t + σ B(t) from 0 until it first reaches d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstPassageSim {
    params: ChannelParams,
    dt: f64,
    bridge: bool,
    step_budget: u64,
}

impl FirstPassageSim {
    /// Requires dt ≤ μ/100 so the discretisation is fine relative to the
    /// mean arrival time.
    pub fn new(params: ChannelParams, dt: f64) -> Result<Self> {
        let sim = Self::unchecked(params, dt)?;
        if dt > params.to_ig().mu() / 100.0 {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "must be <= mu / 100",
            });
        }
        Ok(sim)
    }

    /// Any dt > 0; for demonstrating discretisation bias.
    pub fn unchecked(params: ChannelParams, dt: f64) -> Result<Self> {
        Ok(FirstPassageSim {
            params,
            dt: positive("dt", dt)?,
            bridge: true,
            step_budget: DEFAULT_STEP_BUDGET,
        })
    }

    /// Detect only crossings visible at grid points; the arrival time is then
    /// biased upward by O(√dt).
    pub fn without_bridge_correction(self) -> Self {
        FirstPassageSim { bridge: false, ..self }
    }

    pub fn with_step_budget(self, steps: u64) -> Self {
        FirstPassageSim {
            step_budget: steps,
            ..self
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One absorption time.
    ///
    /// After a step from w₀ to w₁ < d the path is declared absorbed with the
    /// Brownian-bridge crossing probability exp(−2(d−w₀)(d−w₁)/(σ² dt)), at
    /// the step midpoint. A step ending at or beyond d is absorbed at the
    /// linearly interpolated crossing time.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let ChannelParams {
            distance: d,
            velocity: v,
            sigma2,
        } = self.params;
        let dt = self.dt;
        let drift = v * dt;
        let spread = (sigma2 * dt).sqrt();
        let bridge_scale = 2.0 / (sigma2 * dt);
        let mut w = 0.0;
        for step in 0..self.step_budget {
            let t = step as f64 * dt;
            let z: f64 = rng.sample(StandardNormal);
            let next = w + drift + spread * z;
            if next >= d {
                return Ok(t + dt * (d - w) / (next - w));
            }
            if self.bridge {
                let exponent = bridge_scale * (d - w) * (d - next);
                if exponent < BRIDGE_SKIP_EXPONENT && rng.random::<f64>() < (-exponent).exp() {
                    return Ok(t + 0.5 * dt);
                }
            }
            w = next;
        }
        Err(Error::StepBudgetExceeded {
            steps: self.step_budget,
        })
    }

    pub fn run_seeded(&self, seed: u64) -> Result<f64> {
        self.run(&mut rng::seeded(seed))
    }
}

/// One first-passage time with the default step budget and bridge correction.
pub fn wiener_first_passage(params: &ChannelParams, dt: f64, seed: u64) -> Result<f64> {
    FirstPassageSim::new(*params, dt)?.run_seeded(seed)
}

/// Free (unabsorbed) position W(`horizon`) by Euler steps of size `dt`.
pub fn wiener_position<R: Rng + ?Sized>(params: &ChannelParams, horizon: f64, dt: f64, rng: &mut R) -> Result<f64> {
    let dt = positive("dt", dt)?;
    let horizon = non_negative("horizon", horizon)?;
    let steps = (horizon / dt).round() as u64;
    let h = horizon / steps.max(1) as f64;
    let drift = params.velocity * h;
    let spread = (params.sigma2 * h).sqrt();
    let mut w = 0.0;
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        w += drift + spread * z;
    }
    Ok(w)
}
