//! Run configuration, read from a sectioned TOML file.
//!
//! ```toml
//! [space]
//! m = 2
//! k = 1
//!
//! [grids]
//! r_min = 0.001
//! r_max = 20.0
//! r_steps = 200
//!
//! [tolerances]
//! quad = 1e-10
//!
//! [run]
//! threads = 4
//! ```
//!
//! Missing keys take their defaults; unknown keys are rejected.

use std::path::{Path, PathBuf};

use drkernel::SpaceParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable holding the default thread budget.
pub const THREADS_ENV: &str = "DRKERNEL_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceSection {
    pub m: usize,
    pub k: usize,
    /// Named instance such as `heisenberg:1`; takes precedence over `m`, `k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl Default for SpaceSection {
    fn default() -> Self {
        SpaceSection { m: 2, k: 1, name: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    pub r_min: f64,
    pub r_max: f64,
    pub r_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_list: Option<PathBuf>,
    pub t_max: f64,
    pub t_steps: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub s_steps: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            r_min: 1e-3,
            r_max: 20.0,
            r_steps: 200,
            tau_list: None,
            t_max: 4.0,
            t_steps: 40,
            s_min: 0.05,
            s_max: 10.0,
            s_steps: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative accuracy of the odd-k kernel integral.
    pub quad: f64,
    /// Relative tolerance of the radial ODE.
    pub ode: f64,
    /// Largest accepted spread of the c-function fit.
    pub fit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { quad: 1e-10, ode: 1e-12, fit: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Estimates {
    /// Constant of the region `r > 1 + c t`.
    pub c: f64,
    pub per_decade: usize,
}

impl Default for Estimates {
    fn default() -> Self {
        Estimates { c: 4.0, per_decade: 8 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Run {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub sequential: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceSection,
    pub grids: Grids,
    pub tolerances: Tolerances,
    pub estimates: Estimates,
    pub output: Output,
    pub run: Run,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn space(&self) -> Result<SpaceParams, CliError> {
        let parsed = match &self.space.name {
            Some(name) => name.parse(),
            None => SpaceParams::new(self.space.m, self.space.k),
        };
        parsed.map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Thread budget: the config value, else the environment default.
    pub fn threads(&self) -> Option<usize> {
        self.run
            .threads
            .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        self.space()?;
        let t = &self.tolerances;
        for (name, v) in [("quad", t.quad), ("ode", t.ode), ("fit", t.fit)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        let g = &self.grids;
        if !(g.r_min > 0.0 && g.r_max > g.r_min) || g.r_steps == 0 {
            return bad(format!("empty r grid [{}, {}] / {}", g.r_min, g.r_max, g.r_steps));
        }
        if !(g.t_max > 0.0) || g.t_steps == 0 {
            return bad(format!("empty t grid [0, {}] / {}", g.t_max, g.t_steps));
        }
        if !(g.s_min > 0.0 && g.s_max > g.s_min) || g.s_steps == 0 {
            return bad(format!("empty s grid [{}, {}] / {}", g.s_min, g.s_max, g.s_steps));
        }
        if !(self.estimates.c > 0.0) || self.estimates.per_decade < 2 {
            return bad("estimates need c > 0 and per_decade >= 2".into());
        }
        if self.run.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }
}
