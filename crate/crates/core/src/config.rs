//! Experiment configuration: a flat TOML file with at most one level of
//! sections. Unknown keys are rejected; every run echoes the fully resolved
//! config next to its results so outputs are self-describing.

use crate::error::{Error, Result};
use crate::ledger::{ConstantsLedger, Provenance};
use crate::potential::Potential;
use crate::quad::QuadraturePlan;
use crate::radial::RadialMeasure;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Fixed(f64),
    Named(String),
}

impl Default for LambdaSpec {
    fn default() -> Self {
        LambdaSpec::Fixed(1.0)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSection {
    pub rel_tol: f64,
    pub abs_tol_log: f64,
    pub max_subdivisions: u32,
}

impl Default for QuadSection {
    fn default() -> Self {
        let p = QuadraturePlan::default();
        QuadSection {
            rel_tol: p.rel_tol,
            abs_tol_log: p.abs_tol_log,
            max_subdivisions: p.max_subdivisions,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Potential kind; only "power" is configurable (custom potentials are
    /// API-level objects).
    #[serde(default = "default_potential")]
    pub potential: String,
    pub alpha: f64,
    #[serde(default)]
    pub lambda: LambdaSpec,
    pub n_list: Vec<u32>,
    /// "lo:hi:steps", log-spaced inclusive grid.
    #[serde(default = "default_a_grid")]
    pub a_grid: String,
    /// Subset of {"theorem", "bobkov", "big", "small", "tensor"}.
    #[serde(default = "default_routes")]
    pub routes: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quad: QuadSection,
    /// Overrides applied to the default constants ledger, as `assumed`.
    #[serde(default)]
    pub ledger: BTreeMap<String, f64>,
}

fn default_potential() -> String {
    "power".into()
}

fn default_a_grid() -> String {
    "1e-4:0.5:12".into()
}

fn default_routes() -> Vec<String> {
    vec!["theorem".into(), "bobkov".into()]
}

pub const KNOWN_ROUTES: [&str; 5] = ["theorem", "bobkov", "big", "small", "tensor"];

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    fn validate(&self) -> Result<()> {
        if self.potential != "power" {
            return Err(Error::Config(format!(
                "unsupported potential kind '{}'; only 'power' is configurable",
                self.potential
            )));
        }
        if !(self.alpha >= 1.0) {
            return Err(Error::Config(format!("alpha must be >= 1, got {}", self.alpha)));
        }
        if self.n_list.is_empty() {
            return Err(Error::Config("n_list must not be empty".into()));
        }
        if self.n_list.iter().any(|&n| n == 0) {
            return Err(Error::Config("n_list entries must be >= 1".into()));
        }
        match &self.lambda {
            LambdaSpec::Fixed(l) if *l > 0.0 => {}
            LambdaSpec::Named(s) if s == "isotropic" => {}
            LambdaSpec::Fixed(l) => {
                return Err(Error::Config(format!("lambda must be positive, got {l}")));
            }
            LambdaSpec::Named(s) => {
                return Err(Error::Config(format!(
                    "lambda must be a positive number or \"isotropic\", got \"{s}\""
                )));
            }
        }
        for r in &self.routes {
            if !KNOWN_ROUTES.contains(&r.as_str()) {
                return Err(Error::Config(format!(
                    "unknown route '{r}'; expected one of {KNOWN_ROUTES:?}"
                )));
            }
        }
        self.parse_a_grid()?;
        Ok(())
    }

    pub fn parse_a_grid(&self) -> Result<Vec<f64>> {
        let parts: Vec<&str> = self.a_grid.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "a_grid must be \"lo:hi:steps\", got \"{}\"",
                self.a_grid
            )));
        }
        let lo: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Config(format!("a_grid lo not a number: {}", parts[0])))?;
        let hi: f64 = parts[1]
            .parse()
            .map_err(|_| Error::Config(format!("a_grid hi not a number: {}", parts[1])))?;
        let steps: usize = parts[2]
            .parse()
            .map_err(|_| Error::Config(format!("a_grid steps not an integer: {}", parts[2])))?;
        if !(lo > 0.0 && hi > lo && hi < 1.0 && steps >= 2) {
            return Err(Error::Config(format!(
                "a_grid needs 0 < lo < hi < 1 and steps >= 2, got {}",
                self.a_grid
            )));
        }
        let ratio = hi / lo;
        Ok((0..steps)
            .map(|i| lo * ratio.powf(i as f64 / (steps - 1) as f64))
            .collect())
    }

    pub fn plan(&self) -> QuadraturePlan {
        QuadraturePlan {
            rel_tol: self.quad.rel_tol,
            abs_tol_log: self.quad.abs_tol_log,
            max_subdivisions: self.quad.max_subdivisions,
        }
    }

    pub fn resolved_ledger(&self) -> ConstantsLedger {
        let mut l = ConstantsLedger::default();
        for (name, &value) in &self.ledger {
            l.set(name, value, Provenance::Assumed);
        }
        l
    }

    /// Potential for dimension `n`, resolving `lambda = "isotropic"` through
    /// the second-moment equation. Returns the potential and the resolved
    /// lambda.
    pub fn potential_for(&self, n: u32) -> Result<(Potential, f64)> {
        let base = Potential::power(self.alpha);
        match &self.lambda {
            LambdaSpec::Fixed(l) => Ok((base.with_lambda(*l), *l)),
            LambdaSpec::Named(_) => {
                let l = RadialMeasure::isotropic_lambda(n, &base, self.plan())?;
                Ok((base.with_lambda(l), l))
            }
        }
    }

    /// Fully resolved echo: defaults filled in, serialized back to TOML.
    pub fn resolved_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "alpha = 2.0\nn_list = [2, 10]\n";

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.potential, "power");
        assert_eq!(cfg.routes, vec!["theorem".to_string(), "bobkov".to_string()]);
        let grid = cfg.parse_a_grid().unwrap();
        assert_eq!(grid.len(), 12);
        assert!((grid[0] - 1e-4).abs() < 1e-18);
        assert!((grid[11] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ExperimentConfig::from_toml("alpha = 2.0\nn_list = [2]\nbogus = 1\n");
        assert!(matches!(err, Err(Error::Config(_))));
        let err = ExperimentConfig::from_toml("alpha = 2.0\nn_list = [2]\n[quad]\nnope = 1\n");
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn empty_n_list_rejected() {
        let err = ExperimentConfig::from_toml("alpha = 2.0\nn_list = []\n");
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn lambda_isotropic_resolves_per_n() {
        let cfg =
            ExperimentConfig::from_toml("alpha = 2.0\nn_list = [5]\nlambda = \"isotropic\"\n")
                .unwrap();
        let (_, l) = cfg.potential_for(5).unwrap();
        assert!((l - 0.5f64.sqrt()).abs() < 1e-8);
        let bad = ExperimentConfig::from_toml("alpha = 2.0\nn_list = [5]\nlambda = \"iso\"\n");
        assert!(matches!(bad, Err(Error::Config(_))));
    }

    #[test]
    fn resolved_round_trip() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let echoed = ExperimentConfig::from_toml(&cfg.resolved_toml()).unwrap();
        assert_eq!(cfg.resolved_toml(), echoed.resolved_toml());
        assert_eq!(echoed.a_grid, cfg.a_grid);
        assert_eq!(echoed.seed, cfg.seed);
    }

    #[test]
    fn ledger_overrides_apply() {
        let cfg = ExperimentConfig::from_toml(
            "alpha = 2.0\nn_list = [2]\n[ledger]\nkappa = 0.75\n",
        )
        .unwrap();
        let l = cfg.resolved_ledger();
        assert!((l.value("kappa").unwrap() - 0.75).abs() < 1e-15);
        // derived entries track the override
        assert!((l.value("kappa2").unwrap() - 0.5625 / (2.0 * 2.0f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn bad_a_grid_rejected() {
        for grid in ["0:0.5:12", "1e-4:0.5", "0.5:1e-4:12", "1e-4:0.5:1"] {
            let text = format!("alpha = 2.0\nn_list = [2]\na_grid = \"{grid}\"\n");
            assert!(
                matches!(ExperimentConfig::from_toml(&text), Err(Error::Config(_))),
                "{grid}"
            );
        }
    }
}
