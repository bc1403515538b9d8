//! Layered experiment configuration: preset, then config file, then flags.

use std::path::Path;

use aign_core::channel::ChannelParams;
use aign_core::receiver::Constellation;
use clap::ValueEnum;
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Quantity varied by `mi-sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    Velocity,
    Sigma2,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Velocity => "velocity",
            SweepVar::Sigma2 => "sigma2",
        }
    }
}

/// Named parameter sets reproducing the published figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// MI vs velocity, sigma2 = 1.
    Fig2,
    /// MI vs sigma2 at v = 1.
    Fig3,
    /// MI vs sigma2 at v = 10.
    Fig4,
    /// Single-molecule T-ary SEP vs velocity.
    Fig6,
    /// Multi-molecule ML vs averaging filter.
    Fig7,
}

macro_rules! settings {
    ($($field:ident: $ty:ty),* $(,)?) => {
        /// One configuration layer; `None` leaves the lower layer's value.
        #[derive(Debug, Default, Clone, PartialEq, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct Settings {
            $(pub $field: Option<$ty>,)*
        }

        impl Settings {
            fn layer(self, top: &Settings) -> Settings {
                Settings { $($field: top.$field.clone().or(self.$field),)* }
            }
        }
    };
}

settings! {
    seed: u64,
    trials: u64,
    bits: bool,
    distance: f64,
    velocity: f64,
    sigma2: f64,
    mean: f64,
    sweep: SweepVar,
    from: f64,
    to: f64,
    step: f64,
    values: Vec<f64>,
    symbols: Vec<usize>,
    times: Vec<f64>,
    priors: Vec<f64>,
    molecules: Vec<usize>,
    dt: f64,
    bridge: bool,
    k: usize,
    t0: f64,
    arrivals: Vec<f64>,
}

impl Settings {
    /// Parses a TOML config file; errors carry the line and offending key.
    pub fn load(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Settings::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> std::result::Result<Settings, toml::de::Error> {
        toml::from_str(text)
    }

    /// `top` overrides `self`. A grid, alphabet or prior given explicitly in
    /// `top` also discards the competing description from lower layers.
    pub fn overridden_by(self, top: &Settings) -> Settings {
        let mut merged = self.layer(top);
        if top.values.is_none() && (top.from.is_some() || top.to.is_some() || top.step.is_some()) {
            merged.values = None;
        }
        if top.times.is_some() {
            merged.symbols = None;
            merged.priors = top.priors.clone();
        } else if top.symbols.is_some() {
            merged.times = None;
            merged.priors = None;
        }
        merged
    }
}

fn base() -> Settings {
    Settings {
        seed: Some(1),
        distance: Some(1.0),
        velocity: Some(1.0),
        sigma2: Some(1.0),
        mean: Some(1.0),
        ..Settings::default()
    }
}

fn grid_settings(from: f64, to: f64, step: f64) -> Settings {
    Settings {
        from: Some(from),
        to: Some(to),
        step: Some(step),
        ..Settings::default()
    }
}

impl Preset {
    pub fn command(self) -> &'static str {
        match self {
            Preset::Fig2 | Preset::Fig3 | Preset::Fig4 => "mi-sweep",
            Preset::Fig6 => "sep-sweep",
            Preset::Fig7 => "diversity",
        }
    }

    pub fn settings(self) -> Settings {
        let (grid, extra) = match self {
            Preset::Fig2 => (
                grid_settings(1.0, 10.0, 0.25),
                Settings {
                    sweep: Some(SweepVar::Velocity),
                    ..Settings::default()
                },
            ),
            Preset::Fig3 => (
                grid_settings(0.25, 10.0, 0.25),
                Settings {
                    sweep: Some(SweepVar::Sigma2),
                    ..Settings::default()
                },
            ),
            Preset::Fig4 => (
                grid_settings(1.0, 20.0, 1.0),
                Settings {
                    sweep: Some(SweepVar::Sigma2),
                    velocity: Some(10.0),
                    ..Settings::default()
                },
            ),
            Preset::Fig6 => (
                grid_settings(1.0, 8.0, 0.5),
                Settings {
                    symbols: Some(vec![2, 4, 8]),
                    trials: Some(100_000),
                    ..Settings::default()
                },
            ),
            Preset::Fig7 => (
                grid_settings(1.0, 6.0, 0.25),
                Settings {
                    times: Some(vec![1.0, 2.0]),
                    molecules: Some(vec![1, 2, 4]),
                    trials: Some(100_000),
                    ..Settings::default()
                },
            ),
        };
        base().overridden_by(&grid).overridden_by(&extra)
    }
}

/// Defaults of a command: its preset (explicit or the command's own), with a
/// check that the preset belongs to the command.
pub fn command_defaults(command: &str, preset: Option<Preset>) -> Result<Settings> {
    if let Some(p) = preset {
        if p.command() != command {
            return Err(CliError::Config(format!(
                "preset `{}` belongs to `{}`, not `{command}`",
                p.to_possible_value()
                    .map_or_else(String::new, |v| v.get_name().to_owned()),
                p.command()
            )));
        }
        return Ok(p.settings());
    }
    Ok(match command {
        "mi-sweep" => Preset::Fig2.settings(),
        "sep-sweep" => Preset::Fig6.settings(),
        "diversity" => Preset::Fig7.settings(),
        "validate" => base().overridden_by(&Settings {
            trials: Some(10_000),
            dt: Some(1e-3),
            bridge: Some(true),
            ..Settings::default()
        }),
        "estimate" => base().overridden_by(&Settings {
            k: Some(100_000),
            t0: Some(0.0),
            ..Settings::default()
        }),
        other => return Err(CliError::Config(format!("unknown command `{other}`"))),
    })
}

fn require<T: Clone>(value: &Option<T>, key: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| CliError::Config(format!("missing `{key}`")))
}

fn positive(value: &Option<f64>, key: &str) -> Result<f64> {
    let x = require(value, key)?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Config(format!("`{key}` must be finite and > 0, got {x}")))
    }
}

fn channel(distance: f64, velocity: f64, sigma2: f64) -> Result<ChannelParams> {
    ChannelParams::new(distance, velocity, sigma2).map_err(|e| CliError::Config(e.to_string()))
}

fn trials(s: &Settings) -> Result<u64> {
    match require(&s.trials, "trials")? {
        0 => Err(CliError::Config("`trials` must be >= 1".into())),
        n => Ok(n),
    }
}

/// Sweep points: explicit `values`, else `from, from + step, …, ≤ to`.
fn grid(s: &Settings) -> Result<Vec<f64>> {
    if let Some(values) = &s.values {
        if values.is_empty() || values.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config(
                "`values` must be a non-empty list of finite numbers".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("`values` must be strictly increasing".into()));
        }
        return Ok(values.clone());
    }
    let (from, to, step) = (
        require(&s.from, "from")?,
        require(&s.to, "to")?,
        require(&s.step, "step")?,
    );
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || step <= 0.0 || to < from {
        return Err(CliError::Config(format!(
            "sweep range from={from} to={to} step={step} is empty or not increasing"
        )));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

fn list<T: std::fmt::Display>(xs: &[T]) -> String {
    let items: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("[{}]", items.join(", "))
}

/// Header lines recording a resolved configuration.
pub type Description = Vec<(&'static str, String)>;

#[derive(Debug, Clone, PartialEq)]
pub struct MiConfig {
    pub sweep: SweepVar,
    pub values: Vec<f64>,
    pub distance: f64,
    /// Fixed velocity when sweeping sigma2.
    pub velocity: f64,
    /// Fixed sigma2 when sweeping velocity.
    pub sigma2: f64,
    /// Mean constraint m on the release time.
    pub mean: f64,
    pub bits: bool,
}

impl MiConfig {
    pub fn resolve(s: &Settings) -> Result<Self> {
        let cfg = MiConfig {
            sweep: require(&s.sweep, "sweep")?,
            values: grid(s)?,
            distance: positive(&s.distance, "distance")?,
            velocity: positive(&s.velocity, "velocity")?,
            sigma2: positive(&s.sigma2, "sigma2")?,
            mean: positive(&s.mean, "mean")?,
            bits: s.bits.unwrap_or(false),
        };
        for &x in &cfg.values {
            cfg.channel_at(x)?;
        }
        Ok(cfg)
    }

    pub fn channel_at(&self, x: f64) -> Result<ChannelParams> {
        match self.sweep {
            SweepVar::Velocity => channel(self.distance, x, self.sigma2),
            SweepVar::Sigma2 => channel(self.distance, self.velocity, x),
        }
    }

    pub fn describe(&self) -> Description {
        let mut d = vec![("sweep", self.sweep.name().to_owned()), ("values", list(&self.values))];
        d.push(("distance", self.distance.to_string()));
        match self.sweep {
            SweepVar::Velocity => d.push(("sigma2", self.sigma2.to_string())),
            SweepVar::Sigma2 => d.push(("velocity", self.velocity.to_string())),
        }
        d.push(("mean", self.mean.to_string()));
        d.push(("units", if self.bits { "bits" } else { "nats" }.to_owned()));
        d
    }
}

fn constellation(times: Vec<f64>, priors: Option<Vec<f64>>) -> Result<Constellation> {
    match priors {
        Some(p) => Constellation::new(times, p),
        None => Constellation::equiprobable(times),
    }
    .map_err(|e| CliError::Config(format!("constellation: {e}")))
}

fn describe_constellation(c: &Constellation) -> String {
    format!("times {} priors {}", list(c.times()), list(c.priors()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SepConfig {
    pub constellations: Vec<Constellation>,
    pub velocities: Vec<f64>,
    pub distance: f64,
    pub sigma2: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SepConfig {
    pub fn resolve(s: &Settings) -> Result<Self> {
        let constellations = match (&s.times, &s.symbols) {
            (Some(times), _) => vec![constellation(times.clone(), s.priors.clone())?],
            (None, Some(symbols)) if !symbols.is_empty() => {
                if s.priors.is_some() {
                    return Err(CliError::Config("`priors` needs an explicit `times` list".into()));
                }
                symbols
                    .iter()
                    .map(|&t| {
                        Constellation::uniform_alphabet(t).map_err(|e| CliError::Config(format!("symbols = {t}: {e}")))
                    })
                    .collect::<Result<_>>()?
            }
            _ => return Err(CliError::Config("one of `symbols` or `times` is required".into())),
        };
        let cfg = SepConfig {
            constellations,
            velocities: grid(s)?,
            distance: positive(&s.distance, "distance")?,
            sigma2: positive(&s.sigma2, "sigma2")?,
            trials: trials(s)?,
            seed: require(&s.seed, "seed")?,
        };
        for &v in &cfg.velocities {
            channel(cfg.distance, v, cfg.sigma2)?;
        }
        Ok(cfg)
    }

    pub fn describe(&self) -> Description {
        let mut d: Description = self
            .constellations
            .iter()
            .map(|c| ("constellation", describe_constellation(c)))
            .collect();
        d.extend([
            ("velocities", list(&self.velocities)),
            ("distance", self.distance.to_string()),
            ("sigma2", self.sigma2.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
        ]);
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityConfig {
    pub constellation: Constellation,
    pub molecules: Vec<usize>,
    pub velocities: Vec<f64>,
    pub distance: f64,
    pub sigma2: f64,
    pub trials: u64,
    pub seed: u64,
}

impl DiversityConfig {
    pub fn resolve(s: &Settings) -> Result<Self> {
        let constellation = constellation(require(&s.times, "times")?, s.priors.clone())?;
        if constellation.len() != 2 {
            return Err(CliError::Config(
                "diversity needs a binary constellation (two `times`)".into(),
            ));
        }
        let molecules = require(&s.molecules, "molecules")?;
        if molecules.is_empty() || molecules.contains(&0) {
            return Err(CliError::Config(
                "`molecules` must be a non-empty list of counts >= 1".into(),
            ));
        }
        let cfg = DiversityConfig {
            constellation,
            molecules,
            velocities: grid(s)?,
            distance: positive(&s.distance, "distance")?,
            sigma2: positive(&s.sigma2, "sigma2")?,
            trials: trials(s)?,
            seed: require(&s.seed, "seed")?,
        };
        for &v in &cfg.velocities {
            channel(cfg.distance, v, cfg.sigma2)?;
        }
        Ok(cfg)
    }

    /// Symbol gap c = t₂ − t₁.
    pub fn gap(&self) -> f64 {
        self.constellation.times()[1] - self.constellation.times()[0]
    }

    pub fn describe(&self) -> Description {
        vec![
            ("constellation", describe_constellation(&self.constellation)),
            ("molecules", list(&self.molecules)),
            ("velocities", list(&self.velocities)),
            ("distance", self.distance.to_string()),
            ("sigma2", self.sigma2.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateConfig {
    pub channel: ChannelParams,
    pub trials: u64,
    pub dt: f64,
    /// Brownian-bridge crossing correction; disabling it also lifts the
    /// dt ≤ μ/100 step-size check, to expose the discretisation bias.
    pub bridge: bool,
    pub seed: u64,
}

impl ValidateConfig {
    pub fn resolve(s: &Settings) -> Result<Self> {
        Ok(ValidateConfig {
            channel: channel(
                positive(&s.distance, "distance")?,
                positive(&s.velocity, "velocity")?,
                positive(&s.sigma2, "sigma2")?,
            )?,
            trials: trials(s)?,
            dt: positive(&s.dt, "dt")?,
            bridge: require(&s.bridge, "bridge")?,
            seed: require(&s.seed, "seed")?,
        })
    }

    pub fn describe(&self) -> Description {
        vec![
            ("distance", self.channel.distance().to_string()),
            ("velocity", self.channel.velocity().to_string()),
            ("sigma2", self.channel.sigma2().to_string()),
            ("trials", self.trials.to_string()),
            ("dt", self.dt.to_string()),
            ("bridge", self.bridge.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }
}

/// Where the training arrivals come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Training {
    /// k molecules simulated through the configured channel.
    Simulated { k: usize, seed: u64 },
    /// Arrival times measured elsewhere.
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    pub channel: ChannelParams,
    pub t0: f64,
    pub training: Training,
}

impl EstimateConfig {
    pub fn resolve(s: &Settings) -> Result<Self> {
        let t0 = require(&s.t0, "t0")?;
        if !(t0.is_finite() && t0 >= 0.0) {
            return Err(CliError::Config(format!("`t0` must be finite and >= 0, got {t0}")));
        }
        let training = match &s.arrivals {
            Some(a) if a.len() < 2 => {
                return Err(CliError::Config(format!(
                    "{} arrival(s) given; at least 2 are required",
                    a.len()
                )))
            }
            Some(a) => Training::Given(a.clone()),
            None => {
                let k = require(&s.k, "k")?;
                if k < 2 {
                    return Err(CliError::Config(format!(
                        "k = {k}; at least 2 training molecules are required"
                    )));
                }
                Training::Simulated {
                    k,
                    seed: require(&s.seed, "seed")?,
                }
            }
        };
        Ok(EstimateConfig {
            channel: channel(
                positive(&s.distance, "distance")?,
                positive(&s.velocity, "velocity")?,
                positive(&s.sigma2, "sigma2")?,
            )?,
            t0,
            training,
        })
    }

    pub fn describe(&self) -> Description {
        let mut d = vec![("t0", self.t0.to_string())];
        match &self.training {
            Training::Simulated { k, seed } => d.extend([
                ("distance", self.channel.distance().to_string()),
                ("velocity", self.channel.velocity().to_string()),
                ("sigma2", self.channel.sigma2().to_string()),
                ("k", k.to_string()),
                ("seed", seed.to_string()),
            ]),
            Training::Given(a) => d.push(("arrivals", list(a))),
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_preset() {
        let file = Settings::parse("velocity = 3.0\nsigma2 = 2.0\n").unwrap();
        let flags = Settings {
            sigma2: Some(5.0),
            ..Settings::default()
        };
        let s = command_defaults("validate", None)
            .unwrap()
            .overridden_by(&file)
            .overridden_by(&flags);
        let cfg = ValidateConfig::resolve(&s).unwrap();
        assert_eq!(
            (cfg.channel.velocity(), cfg.channel.sigma2(), cfg.trials),
            (3.0, 5.0, 10_000)
        );
    }

    #[test]
    fn grid_is_inclusive_and_rejects_empty_ranges() {
        let s = grid_settings(1.0, 10.0, 0.25);
        let g = grid(&s).unwrap();
        assert_eq!(g.len(), 37);
        assert_eq!(*g.last().unwrap(), 10.0);
        assert!(grid(&grid_settings(2.0, 1.0, 0.5)).is_err());
        assert!(grid(&grid_settings(1.0, 2.0, 0.0)).is_err());
        let explicit = Settings {
            values: Some(vec![1.0, 1.0]),
            ..Settings::default()
        };
        assert!(grid(&explicit).is_err());
    }

    #[test]
    fn flag_range_replaces_file_values() {
        let file = Settings::parse("values = [1.0, 2.0]").unwrap();
        let merged = Preset::Fig2.settings().overridden_by(&file);
        assert_eq!(grid(&merged).unwrap(), vec![1.0, 2.0]);
        let merged = merged.overridden_by(&grid_settings(3.0, 4.0, 1.0));
        assert_eq!(grid(&merged).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn file_errors_name_line_and_key() {
        let err = Settings::parse("seed = 1\nvelocty = 2.0\n").unwrap_err().to_string();
        assert!(err.contains("velocty") && err.contains("line 2"), "{err}");
        let err = Settings::parse("trials = \"many\"").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn presets_belong_to_commands() {
        assert!(command_defaults("sep-sweep", Some(Preset::Fig2)).is_err());
        let fig4 = MiConfig::resolve(&command_defaults("mi-sweep", Some(Preset::Fig4)).unwrap()).unwrap();
        assert_eq!(
            (fig4.sweep, fig4.velocity, fig4.values.len()),
            (SweepVar::Sigma2, 10.0, 20)
        );
        let fig6 = SepConfig::resolve(&command_defaults("sep-sweep", None).unwrap()).unwrap();
        assert_eq!(
            fig6.constellations.iter().map(Constellation::len).collect::<Vec<_>>(),
            vec![2, 4, 8]
        );
        let fig7 = DiversityConfig::resolve(&command_defaults("diversity", None).unwrap()).unwrap();
        assert_eq!((fig7.gap(), fig7.molecules.clone()), (1.0, vec![1, 2, 4]));
    }

    #[test]
    fn estimate_needs_two_molecules() {
        let mut s = command_defaults("estimate", None).unwrap();
        s.k = Some(1);
        assert!(matches!(EstimateConfig::resolve(&s), Err(CliError::Config(_))));
        s.arrivals = Some(vec![2.0, 3.0, 4.0]);
        assert_eq!(
            EstimateConfig::resolve(&s).unwrap().training,
            Training::Given(vec![2.0, 3.0, 4.0])
        );
    }

    #[test]
    fn priors_follow_their_times() {
        let file = Settings::parse("times = [0.0, 1.0]\npriors = [0.7, 0.3]").unwrap();
        let flags = Settings {
            times: Some(vec![0.0, 2.0]),
            ..Settings::default()
        };
        let s = Preset::Fig6.settings().overridden_by(&file).overridden_by(&flags);
        let cfg = SepConfig::resolve(&s).unwrap();
        assert_eq!(cfg.constellations[0].priors(), &[0.5, 0.5]);
    }
}
