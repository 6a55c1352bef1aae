//! Resolved run configuration: defaults, then the TOML file, then flags.

use std::path::Path;

use monodromy_core::{Error, IntegratorConfig, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Move budget of the good-triangulation search; `20·n²` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub integrator: IntegratorConfig,
    pub search: SearchConfig,
}

/// Values given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub rel_tol: Option<f64>,
    pub seed_decay: Option<f64>,
    pub budget: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Invalid(format!("malformed config: {e}")))
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Invalid(format!("cannot read config {}: {e}", p.display())))?;
                Self::from_toml(&text)
            }
        }
    }

    pub fn apply(mut self, o: &Overrides) -> Result<Self> {
        if let Some(v) = o.rel_tol {
            self.integrator.rel_tol = v;
        }
        if let Some(v) = o.seed_decay {
            self.integrator.wkb_decay_target = v;
        }
        if let Some(v) = o.budget {
            self.search.budget = Some(v);
        }
        self.integrator.validate()?;
        if self.search.budget == Some(0) {
            return Err(Error::Invalid("budget must be positive".into()));
        }
        Ok(self)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_the_file() {
        let file = RunConfig::from_toml("[integrator]\nrel_tol = 1e-8\n[search]\nbudget = 7\n").unwrap();
        assert_eq!(file.integrator.rel_tol, 1e-8);
        let o = Overrides { rel_tol: Some(1e-11), seed_decay: None, budget: None };
        let c = file.apply(&o).unwrap();
        assert_eq!(c.integrator.rel_tol, 1e-11);
        assert_eq!(c.search.budget, Some(7));
    }

    #[test]
    fn emitted_config_reads_back() {
        let c = RunConfig { search: SearchConfig { budget: Some(3) }, ..Default::default() };
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        assert_eq!(RunConfig::from_toml(&RunConfig::default().to_toml()).unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_toml("[integrator]\nreltol = 1e-8\n").is_err());
        let o = Overrides { rel_tol: Some(2.0), ..Default::default() };
        assert!(RunConfig::default().apply(&o).is_err());
    }
}
