//! Run configuration: a TOML document, overridden key by key by command-line
//! flags, resolved into core objects before any computation starts.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use qic_core::qic::DEFAULT_DEGENERACY_EPS;
use qic_core::{
    preset, AxisSpec, Channel, ChannelScenario, Dimension, Generator, GridSpec, KernelOptions, LogBase, RadialSmearing,
    SmearingKind,
};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: Option<u8>,
    pub preset: Option<String>,
    pub sender: Option<DetectorConfig>,
    #[serde(default)]
    pub receivers: Vec<DetectorConfig>,
    #[serde(default)]
    pub generators: Vec<DetectorConfig>,
    pub log_base: Option<String>,
    pub rel_tol: Option<f64>,
    pub degeneracy_eps: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub times: Option<Vec<f64>>,
    pub grid: Option<String>,
    #[serde(default)]
    pub only: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SmearingConfig {
    Gaussian { sigma: f64 },
    HardShell {
        #[serde(default)]
        r_inner: f64,
        r_outer: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub smearing: SmearingConfig,
    pub center: Vec<f64>,
    pub time: f64,
    #[serde(default = "unit")]
    pub coupling: f64,
    pub gap: Option<f64>,
    #[serde(default)]
    pub channel: Channel,
}

fn unit() -> f64 {
    1.0
}

impl DetectorConfig {
    fn build(&self, d: Dimension) -> Result<Generator> {
        let kind = match self.smearing {
            SmearingConfig::Gaussian { sigma } => SmearingKind::Gaussian { sigma },
            SmearingConfig::HardShell { r_inner, r_outer } => SmearingKind::HardShell { r_inner, r_outer },
        };
        if self.center.len() != d.get() {
            bail!("detector center {:?} does not have {} coordinates", self.center, d.get());
        }
        let s = RadialSmearing::new(kind, self.center.clone(), self.channel)?;
        let g = Generator::new(s, self.time, self.coupling)?;
        Ok(match self.gap {
            Some(w) => g.with_gap(w),
            None => g,
        })
    }
}

pub fn load(path: Option<&Path>) -> Result<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}

/// Flag values; `None` leaves the config key in force.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dimension: Option<u8>,
    pub preset: Option<String>,
    pub times: Option<Vec<f64>>,
    pub grid: Option<String>,
    pub log_base: Option<String>,
    pub rel_tol: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub only: Option<Vec<String>>,
}

impl RunConfig {
    pub fn apply(mut self, o: Overrides) -> Self {
        if o.preset.is_some() {
            // a preset on the command line replaces inline detectors
            self.sender = None;
            self.receivers.clear();
            self.generators.clear();
            self.preset = o.preset;
        }
        self.dimension = o.dimension.or(self.dimension);
        self.times = o.times.or(self.times);
        self.grid = o.grid.or(self.grid);
        self.log_base = o.log_base.or(self.log_base);
        self.rel_tol = o.rel_tol.or(self.rel_tol);
        self.threads = o.threads.or(self.threads);
        self.out = o.out.or(self.out);
        if let Some(only) = o.only {
            self.only = only;
        }
        self
    }

    pub fn dimension(&self) -> Result<Dimension> {
        let d = self.dimension.ok_or_else(|| anyhow!("no dimension given (use --dim 2 or --dim 3)"))?;
        Ok(Dimension::try_from(d)?)
    }

    pub fn kernel_options(&self) -> Result<KernelOptions> {
        let mut opts = KernelOptions::default();
        if let Some(tol) = self.rel_tol {
            if !(tol > 0.0 && tol < 1.0) {
                bail!("quadrature tolerance must lie in (0, 1), got {tol}");
            }
            // the quadrature cannot certify below its rounding floor
            opts.rel_tol = tol.max(2e-14);
        }
        Ok(opts)
    }

    pub fn log_base(&self) -> Result<LogBase> {
        Ok(match &self.log_base {
            Some(s) => LogBase::parse(s)?,
            None => LogBase::Two,
        })
    }

    pub fn degeneracy_eps(&self) -> Result<f64> {
        let eps = self.degeneracy_eps.unwrap_or(DEFAULT_DEGENERACY_EPS);
        if !(0.0..1.0).contains(&eps) {
            bail!("degeneracy_eps must lie in [0, 1), got {eps}");
        }
        Ok(eps)
    }

    fn inline_detectors(&self) -> bool {
        self.sender.is_some() || !self.receivers.is_empty() || !self.generators.is_empty()
    }

    fn check_source(&self) -> Result<()> {
        if self.preset.is_some() && self.inline_detectors() {
            bail!("config names both a preset and inline detectors");
        }
        if self.preset.is_none() && !self.inline_detectors() {
            bail!("no scenario given (use --preset or define detectors in the config)");
        }
        Ok(())
    }

    pub fn channel(&self) -> Result<ChannelScenario> {
        self.check_source()?;
        let d = self.dimension()?;
        if let Some(name) = &self.preset {
            return preset(name, d)?
                .channel
                .ok_or_else(|| anyhow!("preset '{name}' does not define a sender and receivers"));
        }
        let sender = self.sender.as_ref().ok_or_else(|| anyhow!("config has no [sender]"))?.build(d)?;
        if self.receivers.is_empty() {
            bail!("config has no [[receivers]]");
        }
        let receivers = self.receivers.iter().map(|r| r.build(d)).collect::<Result<Vec<_>>>()?;
        Ok(ChannelScenario::new(sender, receivers)?)
    }

    /// Generators for mode construction, default snapshot times and grid.
    pub fn field_setup(&self) -> Result<(Vec<Generator>, Vec<f64>, GridSpec)> {
        self.check_source()?;
        let d = self.dimension()?;
        let (gens, times, grid) = if let Some(name) = &self.preset {
            let p = preset(name, d)?;
            (p.generators, p.default_times, Some(p.default_grid))
        } else {
            let mut gens = Vec::new();
            if let Some(s) = &self.sender {
                gens.push(s.build(d)?);
            }
            for g in self.receivers.iter().chain(&self.generators) {
                gens.push(g.build(d)?);
            }
            (gens, Vec::new(), None)
        };
        let times = match &self.times {
            Some(t) => t.clone(),
            None => times,
        };
        if times.is_empty() {
            bail!("no snapshot time given (use --t)");
        }
        let grid = match &self.grid {
            Some(spec) => parse_grid(spec)?,
            None => grid.ok_or_else(|| anyhow!("no grid given (use --grid)"))?,
        };
        if grid.axes.len() != d.get() {
            bail!("grid has {} axes, the field lives in {} dimensions", grid.axes.len(), d.get());
        }
        grid.points()?;
        Ok((gens, times, grid))
    }
}

/// Parses `min:max:step` or a fixed value per axis, comma separated.
pub fn parse_grid(spec: &str) -> Result<GridSpec> {
    let number = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().with_context(|| format!("bad number '{s}' in grid '{spec}'"))?;
        if !v.is_finite() {
            bail!("grid value '{s}' is not finite");
        }
        Ok(v)
    };
    let axes = spec
        .split(',')
        .map(|axis| {
            let parts: Vec<&str> = axis.split(':').collect();
            match parts.as_slice() {
                [v] => Ok(AxisSpec::Fixed(number(v)?)),
                [a, b, s] => Ok(AxisSpec::Range { min: number(a)?, max: number(b)?, step: number(s)? }),
                _ => bail!("grid axis '{axis}' must be 'min:max:step' or a single value"),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = GridSpec { axes };
    grid.points()?;
    Ok(grid)
}

pub fn parse_times(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            let t: f64 = s.trim().parse().with_context(|| format!("bad time '{s}'"))?;
            if !t.is_finite() {
                bail!("time '{s}' is not finite");
            }
            Ok(t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        let g = parse_grid("-1:1:0.5, 0").unwrap();
        assert_eq!(g.axes.len(), 2);
        assert_eq!(g.points().unwrap().len(), 5);
        assert!(parse_grid("1:0:0.1,0").is_err());
        assert!(parse_grid("0:1:0,0").is_err());
        assert!(parse_grid("0:1,0").is_err());
        assert!(parse_grid("a,0").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("dimension = 3\nfoo = 1\n").is_err());
        let bad = "dimension = 3\n[sender]\nsmearing = { kind = \"gaussian\", sigma = 0.2, extra = 1 }\ncenter = [0.0, 0.0, 0.0]\ntime = 0.0\n";
        assert!(toml::from_str::<RunConfig>(bad).is_err());
    }

    #[test]
    fn flags_override_config() {
        let c: RunConfig = toml::from_str("dimension = 2\npreset = \"single\"\nlog_base = \"e\"\n").unwrap();
        let c = c.apply(Overrides { dimension: Some(3), ..Default::default() });
        assert_eq!(c.dimension().unwrap(), Dimension::Three);
        assert_eq!(c.log_base().unwrap(), LogBase::E);
    }

    #[test]
    fn inline_channel() {
        let text = r#"
dimension = 3
[sender]
smearing = { kind = "hard_shell", r_outer = 1.0 }
center = [0.0, 0.0, 0.0]
time = 0.0
[[receivers]]
smearing = { kind = "hard_shell", r_inner = 1.1, r_outer = 2.9 }
center = [0.0, 0.0, 0.0]
time = 2.0
coupling = 0.2
"#;
        let c: RunConfig = toml::from_str(text).unwrap();
        let sc = c.channel().unwrap();
        assert_eq!(sc.receivers(), 1);
        assert!(c.clone().apply(Overrides { preset: Some("table1".into()), ..Default::default() }).channel().is_ok());
    }
}
