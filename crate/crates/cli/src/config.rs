//! Run configuration, read from TOML (or JSON when the file ends in `.json`).
//!
//! ```toml
//! J = 500
//! k = 3.0
//! steps = 300
//! output_path = "out/chaotic.csv"
//!
//! [initial]
//! kind = "gcs"
//! theta = 1.8849555921538759
//! phi = -0.3141592653589793
//! ```

use std::path::{Path, PathBuf};

use qkt_core::{GcsParams, Spin};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "J", alias = "j")]
    pub j: f64,
    pub k: f64,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    /// Kick-strength shift of the perturbed map; adds a fidelity column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    pub output_path: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    Gcs { theta: f64, phi: f64 },
    Basis { m: f64 },
    Haar { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub count: usize,
    pub placement: Placement,
    #[serde(default)]
    pub seed: u64,
}

/// How ensemble centers are spread over the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Golden-angle lattice; ignores the seed.
    FibonacciSphere,
    /// Uniform on the sphere from a seeded generator.
    SeededUniform,
}

impl RunConfig {
    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation("config", format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg = if is_json {
            Self::from_json(&text)?
        } else {
            Self::from_toml(&text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::validation("config", e.message().to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::validation("config", e.to_string()))
    }

    pub fn spin(&self) -> Result<Spin> {
        Spin::new(self.j).map_err(|_| {
            CliError::validation("J", format!("{} is not a positive multiple of 1/2", self.j))
        })
    }

    pub fn validate(&self) -> Result<()> {
        let spin = self.spin()?;
        if !self.k.is_finite() {
            return Err(CliError::validation("k", "must be finite"));
        }
        if self.steps < 1 {
            return Err(CliError::validation("steps", "must be at least 1"));
        }
        if let Some(d) = self.delta {
            if !d.is_finite() {
                return Err(CliError::validation("delta", "must be finite"));
            }
        }
        if self.output_path.as_os_str().is_empty() {
            return Err(CliError::validation("output_path", "must not be empty"));
        }
        match (&self.ensemble, &self.initial) {
            (Some(e), _) => {
                if e.count < 1 {
                    return Err(CliError::validation("ensemble.count", "must be at least 1"));
                }
            }
            (None, None) => {
                return Err(CliError::validation("initial", "set an initial state or an ensemble"));
            }
            (None, Some(init)) => init.validate(spin)?,
        }
        Ok(())
    }

    /// Applies a `--seed` override to whichever part of the config is seeded.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let Some(e) = self.ensemble.as_mut() {
            e.seed = seed;
        }
        if let Some(InitialState::Haar { seed: s }) = self.initial.as_mut() {
            *s = seed;
        }
        self
    }

    /// Seed that affects the output, if any.
    pub fn effective_seed(&self) -> Option<u64> {
        match (&self.ensemble, &self.initial) {
            (Some(e), _) if e.placement == Placement::SeededUniform => Some(e.seed),
            (None, Some(InitialState::Haar { seed })) => Some(*seed),
            _ => None,
        }
    }

    /// Single-line JSON echo for output metadata.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

impl InitialState {
    fn validate(&self, spin: Spin) -> Result<()> {
        match *self {
            InitialState::Gcs { theta, phi } => {
                GcsParams::new(theta, phi).map_err(|e| match CliError::from(e) {
                    CliError::Validation { field, reason } => {
                        CliError::validation(format!("initial.{field}"), reason)
                    }
                    other => other,
                })?;
            }
            InitialState::Basis { m } => {
                if spin.index_of(m).is_none() {
                    return Err(CliError::validation(
                        "initial.m",
                        format!("{m} is not an allowed projection for J={spin}"),
                    ));
                }
            }
            InitialState::Haar { .. } => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
        J = 500
        k = 3.0
        steps = 300
        output_path = "out.csv"

        [initial]
        kind = "gcs"
        theta = 1.5
        phi = 0.0
    "#;

    fn err_field(r: Result<RunConfig>) -> String {
        match r.and_then(|c| c.validate().map(|_| c)) {
            Err(CliError::Validation { field, .. }) => field,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn parses_toml() {
        let cfg = RunConfig::from_toml(GOOD).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.j, 500.0);
        assert_eq!(cfg.initial, Some(InitialState::Gcs { theta: 1.5, phi: 0.0 }));
        assert!(cfg.delta.is_none());
    }

    #[test]
    fn lowercase_j_and_json_round_trip() {
        let cfg = RunConfig::from_toml(&GOOD.replace("J = 500", "j = 2.5")).unwrap();
        assert_eq!(cfg.j, 2.5);
        let back = RunConfig::from_json(&cfg.echo()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation_names_the_field() {
        assert_eq!(err_field(RunConfig::from_toml(&GOOD.replace("steps = 300", "steps = 0"))), "steps");
        assert_eq!(err_field(RunConfig::from_toml(&GOOD.replace("J = 500", "J = 0.3"))), "J");
        assert_eq!(err_field(RunConfig::from_toml(&GOOD.replace("theta = 1.5", "theta = 4.0"))), "initial.theta");
        let basis = GOOD.replace("kind = \"gcs\"\n        theta = 1.5\n        phi = 0.0", "kind = \"basis\"\n m = 0.5");
        assert_eq!(err_field(RunConfig::from_toml(&basis)), "initial.m");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r = RunConfig::from_toml(&format!("{GOOD}\nbogus = 1\n"));
        assert!(r.is_err());
        let r = RunConfig::from_toml(&GOOD.replace("phi = 0.0", "phi = 0.0\nextra = 2"));
        assert!(r.is_err());
    }

    #[test]
    fn ensemble_replaces_initial() {
        let text = r#"
            J = 10
            k = 12
            steps = 5
            output_path = "e.csv"
            [ensemble]
            count = 4
            placement = "seeded-uniform"
            seed = 3
        "#;
        let cfg = RunConfig::from_toml(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.effective_seed(), Some(3));
        assert_eq!(cfg.with_seed(9).effective_seed(), Some(9));
        let missing = text.replace("[ensemble]", "[ignored]");
        assert!(RunConfig::from_toml(&missing).is_err());
    }
}
