//! Run configuration files.
//!
//! The format is flat TOML: one `key = value` per line, with numbers,
//! strings and arrays of numbers only (no tables). Keys:
//!
//! | key            | type           | default  |
//! |----------------|----------------|----------|
//! | `experiment`   | string         | required (`exp1`..`exp4`, `equilibrium`) |
//! | `N`            | integer        | required |
//! | `epsilon`      | float          | required |
//! | `dt`           | float          | required |
//! | `t_final`      | float          | required |
//! | `alpha`        | float          | 0.6      |
//! | `gamma`        | float          | 1.4      |
//! | `mu`, `lambda`, `kappa` | float | 0.001    |
//! | `k`            | integer        | 6        |
//! | `output_dir`   | string         | `output` |
//! | `dump_every`   | integer        | 0 (initial and final dumps only) |
//! | `diag_every`   | integer        | 10       |
//! | `workers`      | integer        | 1        |
//! | `N_list`, `epsilon_list` | arrays | sweep only |
//! | `N_ref`, `epsilon_ref`   | scalars | sweep only |

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{GasModel, TransportCoeffs};
use crate::scenarios::{RunSettings, ScenarioKind};

/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "NSF_PEN_OUTPUT_DIR";

fn default_alpha() -> f64 {
    0.6
}
fn default_gamma() -> f64 {
    1.4
}
fn default_transport() -> f64 {
    0.001
}
fn default_k() -> u32 {
    6
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}
fn default_diag_every() -> usize {
    10
}
fn default_workers() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub epsilon: f64,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_transport")]
    pub mu: f64,
    #[serde(default = "default_transport")]
    pub lambda: f64,
    #[serde(default = "default_transport")]
    pub kappa: f64,
    #[serde(default = "default_k")]
    pub k: u32,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub dump_every: usize,
    #[serde(default = "default_diag_every")]
    pub diag_every: usize,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(rename = "N_list", default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_list: Option<Vec<f64>>,
    #[serde(rename = "N_ref", default, skip_serializing_if = "Option::is_none")]
    pub n_ref: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_ref: Option<f64>,
}

/// Sweep lists, present only in sweep configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub n_list: Vec<usize>,
    pub epsilon_list: Vec<f64>,
    pub n_ref: usize,
    pub epsilon_ref: f64,
}

impl RunConfig {
    /// Minimal configuration with every optional key at its default.
    pub fn new(experiment: &str, n: usize, epsilon: f64, dt: f64, t_final: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            n,
            epsilon,
            dt,
            t_final,
            alpha: default_alpha(),
            gamma: default_gamma(),
            mu: default_transport(),
            lambda: default_transport(),
            kappa: default_transport(),
            k: default_k(),
            output_dir: default_output_dir(),
            dump_every: 0,
            diag_every: default_diag_every(),
            workers: default_workers(),
            n_list: None,
            epsilon_list: None,
            n_ref: None,
            epsilon_ref: None,
        }
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let key = unknown_field(&msg)
                .or_else(|| missing_field(&msg))
                .unwrap_or_else(|| "<file>".to_string());
            Error::config(key, msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<file>", e.to_string()))
    }

    pub fn kind(&self) -> Result<ScenarioKind> {
        self.experiment
            .parse()
            .map_err(|_| Error::config("experiment", format!("unknown experiment `{}`", self.experiment)))
    }

    pub fn validate(&self) -> Result<()> {
        self.kind()?;
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive and finite, got {v}")))
            }
        };
        if self.n < 2 {
            return Err(Error::config("N", "must be at least 2"));
        }
        positive("epsilon", self.epsilon)?;
        positive("dt", self.dt)?;
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::config("t_final", "must be nonnegative and finite"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha", "must lie in (0, 1)"));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(Error::config("gamma", "must exceed 1"));
        }
        positive("mu", self.mu)?;
        positive("lambda", self.lambda)?;
        positive("kappa", self.kappa)?;
        if self.k < 1 {
            return Err(Error::config("k", "must be at least 1"));
        }
        if self.diag_every < 1 {
            return Err(Error::config("diag_every", "must be at least 1"));
        }
        if self.workers < 1 {
            return Err(Error::config("workers", "must be at least 1"));
        }
        if let Some(list) = &self.n_list {
            if list.is_empty() || list.iter().any(|&n| n < 2) {
                return Err(Error::config("N_list", "entries must be at least 2"));
            }
        }
        if let Some(list) = &self.epsilon_list {
            if list.is_empty() {
                return Err(Error::config("epsilon_list", "must not be empty"));
            }
            for &e in list {
                positive("epsilon_list", e)?;
            }
        }
        if let Some(e) = self.epsilon_ref {
            positive("epsilon_ref", e)?;
        }
        if let (Some(list), Some(n_ref)) = (&self.n_list, self.n_ref) {
            if let Some(n) = list.iter().find(|&&n| n_ref % n != 0) {
                return Err(Error::config("N_ref", format!("{n_ref} is not a multiple of {n}")));
            }
        }
        Ok(())
    }

    /// Sweep lists, or an error naming the first missing key.
    pub fn sweep(&self) -> Result<SweepSpec> {
        Ok(SweepSpec {
            n_list: self.n_list.clone().ok_or_else(|| Error::config("N_list", "required for sweep"))?,
            epsilon_list: self
                .epsilon_list
                .clone()
                .ok_or_else(|| Error::config("epsilon_list", "required for sweep"))?,
            n_ref: self.n_ref.ok_or_else(|| Error::config("N_ref", "required for sweep"))?,
            epsilon_ref: self
                .epsilon_ref
                .ok_or_else(|| Error::config("epsilon_ref", "required for sweep"))?,
        })
    }

    pub fn settings(&self, epsilon: f64) -> Result<RunSettings<f64>> {
        Ok(RunSettings {
            epsilon,
            k: self.k,
            dt: self.dt,
            t_final: Some(self.t_final),
            alpha: self.alpha,
            gas: GasModel::new(self.gamma)?,
            transport: TransportCoeffs::new(self.mu, self.lambda, self.kappa)?,
            diag_every: self.diag_every,
            workers: self.workers,
        })
    }

    /// `output_dir`, unless overridden by the environment.
    pub fn resolved_output_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| self.output_dir.clone())
    }
}

fn unknown_field(msg: &str) -> Option<String> {
    msg.strip_prefix("unknown field `")
        .and_then(|rest| rest.split('`').next())
        .map(str::to_string)
}

fn missing_field(msg: &str) -> Option<String> {
    msg.strip_prefix("missing field `")
        .and_then(|rest| rest.split('`').next())
        .map(str::to_string)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
    RunConfig::parse_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = "experiment = \"exp1\"\nN = 32\nepsilon = 1e-2\ndt = 1e-5\nt_final = 0.01\n";

    #[test]
    fn defaults_applied() {
        let c = RunConfig::parse_str(MINIMAL).unwrap();
        assert_eq!(c.alpha, 0.6);
        assert_eq!(c.gamma, 1.4);
        assert_eq!(c.k, 6);
        assert_eq!((c.mu, c.lambda, c.kappa), (0.001, 0.001, 0.001));
        assert_eq!(c, RunConfig::new("exp1", 32, 1e-2, 1e-5, 0.01));
    }

    #[test]
    fn zero_epsilon_rejected() {
        let err = RunConfig::parse_str(&MINIMAL.replace("1e-2", "0.0")).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "epsilon"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = RunConfig::parse_str(&format!("{MINIMAL}beta = 2.0\n")).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "beta"), "{err}");
    }

    #[test]
    fn missing_key_named() {
        let err = RunConfig::parse_str("experiment = \"exp1\"\nN = 32\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "epsilon"), "{err}");
    }

    #[test]
    fn type_errors_and_bad_experiment() {
        assert!(RunConfig::parse_str(&MINIMAL.replace("N = 32", "N = \"many\"")).is_err());
        let err = RunConfig::parse_str(&MINIMAL.replace("exp1", "exp9")).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "experiment"));
    }

    #[test]
    fn sweep_divisibility_checked() {
        let text = format!("{MINIMAL}N_list = [16, 24]\nepsilon_list = [0.1]\nN_ref = 64\nepsilon_ref = 1e-3\n");
        let err = RunConfig::parse_str(&text).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "N_ref"));
        let ok = text.replace("24", "32");
        let sweep = RunConfig::parse_str(&ok).unwrap().sweep().unwrap();
        assert_eq!(sweep.n_list, vec![16, 32]);
    }

    proptest! {
        #[test]
        fn round_trip(n in 2usize..512, eps in 1e-6f64..1.0, dt in 1e-8f64..1e-3, t in 0.0f64..1.0,
                      alpha in 0.01f64..0.99, k in 1u32..10, sweep in proptest::bool::ANY) {
            let mut c = RunConfig::new("exp3", n, eps, dt, t);
            c.alpha = alpha;
            c.k = k;
            if sweep {
                c.n_list = Some(vec![n]);
                c.epsilon_list = Some(vec![eps, eps / 10.0]);
                c.n_ref = Some(n * 4);
                c.epsilon_ref = Some(eps / 100.0);
            }
            let text = c.to_toml_string().unwrap();
            prop_assert_eq!(RunConfig::parse_str(&text).unwrap(), c);
        }
    }
}
