//! Experiment configuration and its validation.

use serde::{Deserialize, Serialize};

use crate::emit::Format;
use crate::error::{config, Result};
use crate::registry::{find, Example};

/// User-facing configuration. Missing fields take the example's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub example: String,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default, rename = "M")]
    pub m: Option<usize>,
    #[serde(default, rename = "M2")]
    pub m2: Option<usize>,
    #[serde(default, rename = "N")]
    pub n: Option<usize>,
    #[serde(default)]
    pub scheme: Option<String>,
    #[serde(default, rename = "T")]
    pub t_final: Option<f64>,
    /// Overrides N with `ceil(T / (cfl·Δx/‖b‖∞))`.
    #[serde(default)]
    pub cfl: Option<f64>,
    /// Overrides N with `ceil(T / dt)`.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub parallel: Option<bool>,
}

impl ExperimentConfig {
    pub fn new(example: &str) -> Self {
        Self {
            example: example.to_string(),
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::HarnessError::Config(e.to_string()))
    }

    /// Fields set in `other` replace those of `self`.
    pub fn overlay(mut self, other: &ExperimentConfig) -> Self {
        if !other.example.is_empty() {
            self.example = other.example.clone();
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(k, m, m2, n, scheme, t_final, cfl, dt, format, parallel);
        self
    }

    /// Checks the configuration against the registry and fills defaults.
    pub fn resolve(&self) -> Result<Setup> {
        let Some(example) = find(&self.example) else {
            return config(format!("unknown example `{}` (try `sldg list`)", self.example));
        };
        let k = self.k.unwrap_or(example.default_k);
        if k > 7 {
            return config(format!("degree k = {k} exceeds 7"));
        }
        let m = self.m.unwrap_or(example.default_m);
        if m == 0 {
            return config("M must be positive");
        }
        let m2 = if example.dim == 2 {
            let m2 = self.m2.unwrap_or(m);
            if m2 == 0 {
                return config("M2 must be positive");
            }
            Some(m2)
        } else {
            if self.m2.is_some() {
                return config(format!("example `{}` is one-dimensional; M2 not allowed", example.id));
            }
            None
        };
        let scheme = self.scheme.clone().unwrap_or_else(|| example.default_scheme.to_string());
        if !example.schemes.contains(&scheme.as_str()) {
            return config(format!(
                "scheme `{scheme}` not valid for `{}`; expected one of {}",
                example.id,
                example.schemes.join(", ")
            ));
        }
        let t_final = self.t_final.unwrap_or(example.t_final);
        if !(t_final.is_finite() && t_final > 0.0) {
            return config("T must be positive");
        }
        if self.cfl.is_some() && self.dt.is_some() {
            return config("give at most one of cfl and dt");
        }
        let n = if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return config("dt must be positive");
            }
            steps_for(t_final, dt)
        } else if let Some(cfl) = self.cfl {
            if !(cfl.is_finite() && cfl > 0.0) {
                return config("cfl must be positive");
            }
            let dx = example.length / m as f64;
            steps_for(t_final, cfl * dx / example.speed.unwrap_or(1.0))
        } else {
            self.n.unwrap_or(m)
        };
        if n == 0 {
            return config("N must be positive");
        }
        if example.even_n && n % 2 == 1 {
            return config(format!("example `{}` needs an even N", example.id));
        }
        Ok(Setup {
            example,
            k,
            m,
            m2,
            n,
            scheme,
            t_final,
            parallel: self.parallel.unwrap_or(false),
        })
    }
}

fn steps_for(t: f64, dt: f64) -> usize {
    (t / dt - 1e-9).ceil().max(1.0) as usize
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Setup {
    pub example: &'static Example,
    pub k: usize,
    pub m: usize,
    pub m2: Option<usize>,
    pub n: usize,
    pub scheme: String,
    pub t_final: f64,
    pub parallel: bool,
}

impl Setup {
    pub fn dt(&self) -> f64 {
        self.t_final / self.n as f64
    }

    /// `‖b‖∞·Δt/Δx` for examples with a transport speed.
    pub fn cfl(&self) -> Option<f64> {
        let dx = self.example.length / self.m as f64;
        self.example.speed.map(|s| s * self.dt() / dx)
    }

    /// The same experiment with M, M2 and N multiplied by `2^level`.
    pub fn refined(&self, level: u32) -> Setup {
        let f = 1usize << level;
        Setup {
            m: self.m * f,
            m2: self.m2.map(|v| v * f),
            n: self.n * f,
            scheme: self.scheme.clone(),
            ..*self
        }
    }
}
