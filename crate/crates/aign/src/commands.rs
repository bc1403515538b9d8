//! The five experiments. Each returns typed results; `*_table` renders them.

use std::f64::consts::LN_2;
use std::ops::Range;

use aign_core::capacity::{capacity_lower_bound, capacity_upper_bound, mutual_information, InputKind, InputLaw};
use aign_core::channel::FirstPassageSim;
use aign_core::ig::IgParams;
use aign_core::receiver::{
    count_errors, estimate_noise_params, sep_analytic, sep_upper_bound, Constellation, Detector,
};
use aign_core::rng;
use aign_core::stats::{ks_critical_value, ks_statistic, linear_fit, Moments, ProportionEstimate};
use aign_core::Error;
use rand::RngCore;
use rayon::prelude::*;

use crate::config::{DiversityConfig, EstimateConfig, MiConfig, SepConfig, Training, ValidateConfig};
use crate::error::{CliError, Context, Result};
use crate::table::{format_number, Cell, Table};

/// Trials per parallel work item.
const CHUNK: u64 = 8192;

/// Seed of sweep point `index`, drawn from a stream no trial uses.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    rng::for_trial(seed, u64::MAX - index as u64).next_u64()
}

/// Monte Carlo SEP with the trial range split across threads. Per-trial
/// streams make the count independent of the split.
pub fn parallel_sep(
    c: &Constellation,
    p: &IgParams,
    molecules: usize,
    detector: Detector,
    trials: u64,
    seed: u64,
) -> aign_core::Result<ProportionEstimate> {
    let chunks: Vec<Range<u64>> = (0..trials)
        .step_by(CHUNK as usize)
        .map(|s| s..(s + CHUNK).min(trials))
        .collect();
    let errors = chunks
        .into_par_iter()
        .map(|r| count_errors(c, p, molecules, detector, seed, r))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(ProportionEstimate {
        successes: errors,
        trials,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiRow {
    pub x: f64,
    pub upper: f64,
    pub lower: f64,
    pub mi_uniform: f64,
    /// `None` where exponential input is undefined (v² ≤ 2σ²/m).
    pub mi_exponential: Option<f64>,
}

pub fn mi_sweep(cfg: &MiConfig) -> Result<Vec<MiRow>> {
    let uniform = InputLaw::new(InputKind::UniformInput, cfg.mean).context(|| "input law".into())?;
    let expo = InputLaw::new(InputKind::ExponentialInput, cfg.mean).context(|| "input law".into())?;
    cfg.values
        .par_iter()
        .map(|&x| {
            let p = cfg.channel_at(x)?.to_ig();
            let at = || format!("{} = {x}", cfg.sweep.name());
            Ok(MiRow {
                x,
                upper: capacity_upper_bound(cfg.mean, &p).context(at)?,
                lower: capacity_lower_bound(cfg.mean, &p).context(at)?,
                mi_uniform: mutual_information(&uniform, &p).context(at)?,
                mi_exponential: if expo.is_valid_for(&p) {
                    Some(mutual_information(&expo, &p).context(at)?)
                } else {
                    None
                },
            })
        })
        .collect()
}

pub fn mi_table(cfg: &MiConfig, rows: &[MiRow]) -> Table {
    let scale = if cfg.bits { 1.0 / LN_2 } else { 1.0 };
    let mut t = Table::new(vec![
        "sweep_var",
        "upper_bound",
        "lower_bound",
        "mi_uniform",
        "mi_exponential",
    ]);
    for r in rows {
        t.push(vec![
            Cell::Num(r.x),
            Cell::Num(r.upper * scale),
            Cell::Num(r.lower * scale),
            Cell::Num(r.mi_uniform * scale),
            Cell::opt(r.mi_exponential.map(|m| m * scale)),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SepRow {
    pub symbols: usize,
    pub v: f64,
    pub simulated: ProportionEstimate,
    pub bound: f64,
    /// Exact SEP; binary constellations only.
    pub analytic: Option<f64>,
}

pub fn sep_sweep(cfg: &SepConfig) -> Result<Vec<SepRow>> {
    let points: Vec<(&Constellation, f64)> = cfg
        .constellations
        .iter()
        .flat_map(|c| cfg.velocities.iter().map(move |&v| (c, v)))
        .collect();
    points
        .par_iter()
        .enumerate()
        .map(|(i, &(c, v))| {
            let at = || format!("T = {}, v = {v}", c.len());
            let p = aign_core::ChannelParams::new(cfg.distance, v, cfg.sigma2)
                .context(at)?
                .to_ig();
            Ok(SepRow {
                symbols: c.len(),
                v,
                simulated: parallel_sep(c, &p, 1, Detector::Ml, cfg.trials, point_seed(cfg.seed, i)).context(at)?,
                bound: sep_upper_bound(c, &p).context(at)?,
                analytic: if c.len() == 2 {
                    Some(sep_analytic(c, &p).context(at)?)
                } else {
                    None
                },
            })
        })
        .collect()
}

pub fn sep_table(rows: &[SepRow]) -> Table {
    let mut t = Table::new(vec![
        "symbols",
        "v",
        "sep_simulated",
        "sep_stderr",
        "sep_bound",
        "sep_analytic",
    ]);
    for r in rows {
        t.push(vec![
            Cell::Int(r.symbols as u64),
            Cell::Num(r.v),
            Cell::Num(r.simulated.rate()),
            Cell::Num(r.simulated.stderr()),
            Cell::Num(r.bound),
            Cell::opt(r.analytic),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityRow {
    pub v: f64,
    pub molecules: usize,
    pub ml: ProportionEstimate,
    pub linear: ProportionEstimate,
}

/// Window of SEP values used for the log-slope fit.
pub const SLOPE_WINDOW: (f64, f64) = (1e-5, 1e-1);

/// Fitted d ln Pₑ / d(c v²/σ²) for one detector and molecule count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversitySlope {
    pub molecules: usize,
    pub detector: Detector,
    pub slope: Option<f64>,
    pub points: usize,
}

/// Both detectors at each (v, M) see the same trials (same seed), so at
/// M = 1, where they coincide, their counts are identical.
pub fn diversity(cfg: &DiversityConfig) -> Result<Vec<DiversityRow>> {
    let points: Vec<(f64, usize)> = cfg
        .velocities
        .iter()
        .flat_map(|&v| cfg.molecules.iter().map(move |&m| (v, m)))
        .collect();
    points
        .par_iter()
        .enumerate()
        .map(|(i, &(v, m))| {
            let at = || format!("v = {v}, M = {m}");
            let p = aign_core::ChannelParams::new(cfg.distance, v, cfg.sigma2)
                .context(at)?
                .to_ig();
            let seed = point_seed(cfg.seed, i);
            let (ml, linear) = rayon::join(
                || parallel_sep(&cfg.constellation, &p, m, Detector::Ml, cfg.trials, seed),
                || parallel_sep(&cfg.constellation, &p, m, Detector::LinearFilter, cfg.trials, seed),
            );
            Ok(DiversityRow {
                v,
                molecules: m,
                ml: ml.context(at)?,
                linear: linear.context(at)?,
            })
        })
        .collect()
}

pub fn diversity_slopes(cfg: &DiversityConfig, rows: &[DiversityRow]) -> Vec<DiversitySlope> {
    let mut out = Vec::new();
    for &m in &cfg.molecules {
        for detector in [Detector::LinearFilter, Detector::Ml] {
            let (x, y): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.molecules == m)
                .map(|r| (r.v, if detector == Detector::Ml { r.ml } else { r.linear }.rate()))
                .filter(|&(_, pe)| pe >= SLOPE_WINDOW.0 && pe <= SLOPE_WINDOW.1)
                .map(|(v, pe)| (cfg.gap() * v * v / cfg.sigma2, pe.ln()))
                .unzip();
            out.push(DiversitySlope {
                molecules: m,
                detector,
                slope: linear_fit(&x, &y).map(|(slope, _)| slope),
                points: x.len(),
            });
        }
    }
    out
}

fn detector_name(d: Detector) -> &'static str {
    match d {
        Detector::Ml => "ml",
        Detector::LinearFilter => "linear",
    }
}

pub fn diversity_table(cfg: &DiversityConfig, rows: &[DiversityRow]) -> Table {
    let mut t = Table::new(vec![
        "v",
        "M",
        "sep_ml",
        "sep_ml_stderr",
        "sep_linear",
        "sep_linear_stderr",
    ]);
    for r in rows {
        t.push(vec![
            Cell::Num(r.v),
            Cell::Int(r.molecules as u64),
            Cell::Num(r.ml.rate()),
            Cell::Num(r.ml.stderr()),
            Cell::Num(r.linear.rate()),
            Cell::Num(r.linear.stderr()),
        ]);
    }
    let slopes = diversity_slopes(cfg, rows);
    t.footer.push(format!(
        "slope fit: ln(sep) vs c*v^2/sigma2 over points with sep in [{}, {}]",
        format_number(SLOPE_WINDOW.0),
        format_number(SLOPE_WINDOW.1)
    ));
    for s in &slopes {
        let value = s.slope.map_or_else(|| "n/a".to_owned(), format_number);
        t.footer.push(format!(
            "slope_{} M={}: {value} ({} points)",
            detector_name(s.detector),
            s.molecules,
            s.points
        ));
    }
    let reference = slopes
        .iter()
        .find(|s| s.detector == Detector::LinearFilter)
        .and_then(|s| s.slope);
    if let Some(base) = reference {
        let m0 = cfg.molecules[0];
        for s in slopes.iter().filter(|s| s.detector == Detector::LinearFilter).skip(1) {
            if let Some(slope) = s.slope {
                t.footer.push(format!(
                    "slope_ratio_linear M={}/M={m0}: {}",
                    s.molecules,
                    format_number(slope / base)
                ));
            }
        }
    }
    t
}

/// First-passage simulation compared with the inverse Gaussian law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub trials: u64,
    pub ks: f64,
    pub ks_critical: f64,
    pub moments: Moments,
    pub expected_mean: f64,
    pub expected_variance: f64,
}

impl ValidationReport {
    /// Moment checks allow this many standard errors.
    pub const MOMENT_SIGMAS: f64 = 5.0;

    pub fn ks_pass(&self) -> bool {
        self.ks < self.ks_critical
    }

    pub fn mean_pass(&self) -> bool {
        (self.moments.mean - self.expected_mean).abs() <= Self::MOMENT_SIGMAS * self.moments.mean_stderr()
    }

    pub fn variance_pass(&self) -> bool {
        (self.moments.variance - self.expected_variance).abs() <= Self::MOMENT_SIGMAS * self.moments.variance_stderr()
    }

    pub fn pass(&self) -> bool {
        self.ks_pass() && self.mean_pass() && self.variance_pass()
    }
}

pub fn validate(cfg: &ValidateConfig) -> Result<ValidationReport> {
    let sim = if cfg.bridge {
        FirstPassageSim::new(cfg.channel, cfg.dt)
    } else {
        FirstPassageSim::unchecked(cfg.channel, cfg.dt).map(FirstPassageSim::without_bridge_correction)
    }
    .context(|| "first-passage simulator".into())?;
    let times: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| sim.run(&mut rng::for_trial(cfg.seed, k)))
        .collect::<aign_core::Result<_>>()
        .context(|| "first-passage simulation".into())?;
    let ig = cfg.channel.to_ig();
    Ok(ValidationReport {
        trials: cfg.trials,
        ks: ks_statistic(&times, |x| ig.cdf(x)),
        ks_critical: ks_critical_value(times.len()),
        moments: Moments::of(&times),
        expected_mean: ig.mean(),
        expected_variance: ig.variance(),
    })
}

fn verdict(pass: bool) -> Cell {
    Cell::Text(if pass { "PASS" } else { "FAIL" }.into())
}

pub fn validation_table(r: &ValidationReport) -> Table {
    let mut t = Table::new(vec!["quantity", "empirical", "analytic", "tolerance", "verdict"]);
    let s = ValidationReport::MOMENT_SIGMAS;
    t.push(vec![
        Cell::Text("ks_statistic".into()),
        Cell::Num(r.ks),
        Cell::Num(0.0),
        Cell::Num(r.ks_critical),
        verdict(r.ks_pass()),
    ]);
    t.push(vec![
        Cell::Text("mean".into()),
        Cell::Num(r.moments.mean),
        Cell::Num(r.expected_mean),
        Cell::Num(s * r.moments.mean_stderr()),
        verdict(r.mean_pass()),
    ]);
    t.push(vec![
        Cell::Text("variance".into()),
        Cell::Num(r.moments.variance),
        Cell::Num(r.expected_variance),
        Cell::Num(s * r.moments.variance_stderr()),
        verdict(r.variance_pass()),
    ]);
    t.footer
        .push("ks tolerance is the alpha = 0.01 critical value; moment tolerances are 5 standard errors".into());
    t.footer
        .push(format!("verdict: {}", if r.pass() { "PASS" } else { "FAIL" }));
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub k: usize,
    pub estimate: IgParams,
    /// Generating law, when the arrivals were simulated.
    pub truth: Option<IgParams>,
}

impl EstimateReport {
    pub fn relative_errors(&self) -> Option<(f64, f64)> {
        self.truth.map(|t| {
            (
                (self.estimate.mu() - t.mu()).abs() / t.mu(),
                (self.estimate.lambda() - t.lambda()).abs() / t.lambda(),
            )
        })
    }
}

pub fn estimate(cfg: &EstimateConfig) -> Result<EstimateReport> {
    let (arrivals, truth) = match &cfg.training {
        Training::Given(a) => (a.clone(), None),
        Training::Simulated { k, seed } => {
            let noise = cfg.channel.to_ig();
            let arrivals = noise.sample(*k, *seed).into_iter().map(|n| cfg.t0 + n).collect();
            (arrivals, Some(noise))
        }
    };
    let estimate = estimate_noise_params(cfg.t0, &arrivals).map_err(|e| match e {
        Error::DegenerateSample(_) => CliError::Numerical {
            context: "training estimate (arrivals must not all coincide; release more molecules or check t0)".into(),
            source: e,
        },
        e => CliError::from_core("training estimate", e),
    })?;
    Ok(EstimateReport {
        k: arrivals.len(),
        estimate,
        truth,
    })
}

pub fn estimate_table(r: &EstimateReport) -> Table {
    let mut t = Table::new(vec!["parameter", "estimate", "true", "relative_error"]);
    let errors = r.relative_errors();
    t.push(vec![
        Cell::Text("mu".into()),
        Cell::Num(r.estimate.mu()),
        Cell::opt(r.truth.map(|p| p.mu())),
        Cell::opt(errors.map(|e| e.0)),
    ]);
    t.push(vec![
        Cell::Text("lambda".into()),
        Cell::Num(r.estimate.lambda()),
        Cell::opt(r.truth.map(|p| p.lambda())),
        Cell::opt(errors.map(|e| e.1)),
    ]);
    t.footer.push(format!("training molecules: {}", r.k));
    t
}
