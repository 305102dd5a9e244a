//! Flat `key = value` run-config files. Keys are the long CLI flag names
//! without the leading dashes; unknown or repeated keys are rejected.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::C64;
use crate::hamiltonian::Tier;
use crate::initial::Family;
use crate::sweep::{DMode, Grid, SweepConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidConfig(format!(
                "unknown format '{s}' (expected csv or json)"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Partially specified sweep settings; unset fields fall back to
/// [`SweepConfig::default`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub tier: Option<Tier>,
    pub family: Option<Family>,
    pub mu_over_a: Option<f64>,
    pub eta_l: Option<f64>,
    pub eta_c: Option<f64>,
    pub beta_re: Option<f64>,
    pub beta_im: Option<f64>,
    pub theta_deg: Option<f64>,
    pub theta_grid: Option<Grid>,
    pub t_grid: Option<Grid>,
    pub cutoff_m: Option<usize>,
    pub cutoff_n: Option<usize>,
    pub d_mode: Option<DMode>,
    pub truncation_tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

pub const KEYS: [&str; 16] = [
    "tier",
    "family",
    "mu-over-a",
    "eta-l",
    "eta-c",
    "beta-re",
    "beta-im",
    "theta-deg",
    "theta-grid",
    "t-grid",
    "cutoff-m",
    "cutoff-n",
    "d-mode",
    "truncation-tol",
    "out",
    "format",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("invalid value '{value}' for key '{key}'")))
}

impl RunConfig {
    /// Parses a run-config file body. `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(Error::InvalidConfig(format!(
                    "line {}: duplicate key '{key}'",
                    lineno + 1
                )));
            }
            cfg.set(key, value)
                .map_err(|e| Error::InvalidConfig(format!("line {}: {e}", lineno + 1)))?;
            seen.push(key);
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "tier" => self.tier = Some(value.parse()?),
            "family" => self.family = Some(value.parse()?),
            "mu-over-a" => self.mu_over_a = Some(parse(key, value)?),
            "eta-l" => self.eta_l = Some(parse(key, value)?),
            "eta-c" => self.eta_c = Some(parse(key, value)?),
            "beta-re" => self.beta_re = Some(parse(key, value)?),
            "beta-im" => self.beta_im = Some(parse(key, value)?),
            "theta-deg" => self.theta_deg = Some(parse(key, value)?),
            "theta-grid" => self.theta_grid = Some(value.parse()?),
            "t-grid" => self.t_grid = Some(value.parse()?),
            "cutoff-m" => self.cutoff_m = Some(parse(key, value)?),
            "cutoff-n" => self.cutoff_n = Some(parse(key, value)?),
            "d-mode" => self.d_mode = Some(value.parse()?),
            "truncation-tol" => self.truncation_tol = Some(parse(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown key '{key}' (allowed: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Fields set in `other` take precedence.
    pub fn overlay(self, other: RunConfig) -> RunConfig {
        RunConfig {
            tier: other.tier.or(self.tier),
            family: other.family.or(self.family),
            mu_over_a: other.mu_over_a.or(self.mu_over_a),
            eta_l: other.eta_l.or(self.eta_l),
            eta_c: other.eta_c.or(self.eta_c),
            beta_re: other.beta_re.or(self.beta_re),
            beta_im: other.beta_im.or(self.beta_im),
            theta_deg: other.theta_deg.or(self.theta_deg),
            theta_grid: other.theta_grid.or(self.theta_grid),
            t_grid: other.t_grid.or(self.t_grid),
            cutoff_m: other.cutoff_m.or(self.cutoff_m),
            cutoff_n: other.cutoff_n.or(self.cutoff_n),
            d_mode: other.d_mode.or(self.d_mode),
            truncation_tol: other.truncation_tol.or(self.truncation_tol),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
        }
    }

    pub fn to_sweep_config(&self) -> Result<SweepConfig> {
        if self.theta_deg.is_some() && self.theta_grid.is_some() {
            return Err(Error::InvalidConfig(
                "theta-deg and theta-grid are mutually exclusive".into(),
            ));
        }
        let d = SweepConfig::default();
        let cfg = SweepConfig {
            tier: self.tier.unwrap_or(d.tier),
            family: self.family.unwrap_or(d.family),
            beta: C64::new(
                self.beta_re.unwrap_or(d.beta.re),
                self.beta_im.unwrap_or(d.beta.im),
            ),
            mu_over_a: self.mu_over_a.unwrap_or(d.mu_over_a),
            eta_l: self.eta_l.unwrap_or(d.eta_l),
            eta_c: self.eta_c.unwrap_or(d.eta_c),
            theta_grid: self
                .theta_deg
                .map(Grid::point)
                .or(self.theta_grid)
                .unwrap_or(d.theta_grid),
            t_grid: self.t_grid.unwrap_or(d.t_grid),
            cutoff_m: self.cutoff_m.unwrap_or(d.cutoff_m),
            cutoff_n: self.cutoff_n.unwrap_or(d.cutoff_n),
            d_mode: self.d_mode.unwrap_or(d.d_mode),
            truncation_tol: self.truncation_tol.unwrap_or(d.truncation_tol),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_key() {
        let text = "\
# figure 2, family ii
tier = ld
family = ii
mu-over-a = 4
eta-l = 0.05
eta-c = 0.2
beta-re = 1
beta-im = 0.5
theta-grid = 0:180:5
t-grid = 0:180:19
cutoff-m = 6
cutoff-n = 7
d-mode = fixed:3
truncation-tol = 1e-6
out = sweep.json
format = json
";
        let rc = RunConfig::parse(text).unwrap();
        let cfg = rc.to_sweep_config().unwrap();
        assert_eq!(cfg.tier, Tier::Ld);
        assert_eq!(cfg.family, Family::Ii);
        assert_eq!(cfg.beta, C64::new(1.0, 0.5));
        assert_eq!(cfg.theta_grid, Grid::new(0.0, 180.0, 5).unwrap());
        assert_eq!(cfg.t_grid.count, 19);
        assert_eq!((cfg.cutoff_m, cfg.cutoff_n), (6, 7));
        assert_eq!(cfg.d_mode, DMode::Fixed(3));
        assert_eq!(cfg.truncation_tol, 1e-6);
        assert_eq!(rc.format, Some(OutputFormat::Json));
        assert_eq!(rc.out, Some(PathBuf::from("sweep.json")));
    }

    #[test]
    fn defaults_when_empty() {
        let cfg = RunConfig::parse("").unwrap().to_sweep_config().unwrap();
        assert_eq!(cfg, SweepConfig::default());
    }

    #[test]
    fn unknown_and_duplicate_keys_are_errors() {
        let err = RunConfig::parse("tier = block\nteir = ld\n").unwrap_err();
        assert!(err.to_string().contains("unknown key 'teir'"), "{err}");
        assert!(RunConfig::parse("tier = block\ntier = ld\n").is_err());
        assert!(RunConfig::parse("tier block\n").is_err());
        assert!(RunConfig::parse("cutoff-m = six\n").is_err());
    }

    #[test]
    fn overlay_prefers_later_values() {
        let file = RunConfig::parse("tier = ld\ncutoff-m = 6\n").unwrap();
        let flags = RunConfig {
            tier: Some(Tier::Full),
            ..RunConfig::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.tier, Some(Tier::Full));
        assert_eq!(merged.cutoff_m, Some(6));
    }

    #[test]
    fn theta_point_and_grid_conflict() {
        let rc = RunConfig::parse("theta-deg = 90\ntheta-grid = 0:180:3\n").unwrap();
        assert!(rc.to_sweep_config().is_err());
        let rc = RunConfig::parse("theta-deg = 90\n").unwrap();
        assert_eq!(rc.to_sweep_config().unwrap().theta_grid, Grid::point(90.0));
    }
}
