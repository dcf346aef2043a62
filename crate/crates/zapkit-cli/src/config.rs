//! Flat run configuration shared by every subcommand. Frequencies are
//! given in Hz and converted to angular units at parse time; times are in
//! seconds.

use serde::{Deserialize, Serialize};

use zapkit::{angular_from_hz, Error, Metric, Result};

fn default_delta_hz() -> f64 {
    3.032e6
}
fn default_rabi_hz() -> f64 {
    // π pulse of 13 μs.
    1.0 / (2.0 * 13.0e-6)
}
fn default_grid_half() -> f64 {
    0.2
}
fn default_grid_points() -> usize {
    81
}
fn default_realizations() -> usize {
    50
}
fn default_trials() -> usize {
    200
}
fn default_seed() -> u64 {
    7
}
fn default_theta() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    0.5
}
fn default_gate() -> String {
    "walsh1".into()
}
fn default_branch() -> String {
    "condition-1".into()
}
fn default_gatesets() -> Vec<String> {
    vec!["unprotected".into(), "composite".into()]
}
fn default_sweep_min() -> f64 {
    1.0e-3
}
fn default_sweep_max() -> f64 {
    1.0e-1
}
fn default_ppd() -> usize {
    8
}
fn default_protocol() -> String {
    "clifford".into()
}
fn default_sigma_alpha_project() -> f64 {
    1.0e-3
}

/// Persisted, fully serializable run configuration; identical configs (and
/// seeds) reproduce outputs byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Informational; the subcommand decides what runs.
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default = "default_gate")]
    pub gate: String,
    #[serde(default = "default_branch")]
    pub branch: String,
    /// Conditional shift Δ/2π (Hz).
    #[serde(default = "default_delta_hz")]
    pub delta_hz: f64,
    /// Drive Rabi frequency Ω/2π (Hz) for single-qubit gates and the
    /// weak/strong baselines.
    #[serde(default = "default_rabi_hz")]
    pub rabi_hz: f64,
    /// Walsh-3 conditional rotation angle, in units of π.
    #[serde(default = "default_theta")]
    pub theta_over_pi: f64,
    /// Seven-pulse rotation angle, in units of π.
    #[serde(default = "default_alpha")]
    pub alpha_over_pi: f64,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default = "default_grid_half")]
    pub grid_half_width: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Coherence preset name; explicit t2star_s/t2_s override it.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub t2star_s: Option<f64>,
    #[serde(default)]
    pub t2_s: Option<f64>,
    #[serde(default)]
    pub t1_s: Option<f64>,
    #[serde(default)]
    pub sigma_alpha: f64,
    /// Relative amplitude noise used by `project` (published totals
    /// include it at the 0.1% level).
    #[serde(default = "default_sigma_alpha_project")]
    pub project_sigma_alpha: f64,
    #[serde(default = "default_sweep_min")]
    pub t2star_min_s: f64,
    #[serde(default = "default_sweep_max")]
    pub t2star_max_s: f64,
    #[serde(default = "default_ppd")]
    pub points_per_decade: usize,
    #[serde(default = "default_gatesets")]
    pub gatesets: Vec<String>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub lengths: Option<Vec<usize>>,
    #[serde(default)]
    pub depolarizing_p: Option<f64>,
    /// rb protocol: "clifford" | "repeat" | "reference".
    #[serde(default = "default_protocol")]
    pub protocol: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

impl RunConfig {
    pub fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {path}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{path}: {e}")))
    }

    pub fn delta(&self) -> f64 {
        angular_from_hz(self.delta_hz)
    }

    pub fn rabi(&self) -> f64 {
        angular_from_hz(self.rabi_hz)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_hz > 0.0 && self.rabi_hz > 0.0) {
            return Err(Error::InvalidConfig("delta_hz and rabi_hz must be positive".into()));
        }
        if self.grid_points < 2 || self.grid_half_width <= 0.0 {
            return Err(Error::InvalidConfig("grid needs >= 2 points and positive width".into()));
        }
        if self.realizations < 2 {
            return Err(Error::InvalidConfig("realizations must be >= 2".into()));
        }
        if let Some(l) = &self.lengths {
            if l.is_empty() || l.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig("lengths must be strictly increasing".into()));
            }
        }
        Ok(())
    }

    /// Coherence pair for the chosen spin ("electron" for two-qubit gates,
    /// "nuclear" for single-qubit sweeps), with explicit values overriding
    /// the preset.
    pub fn coherence(&self, spin: &str) -> Result<(Option<f64>, Option<f64>, Option<f64>)> {
        let mut t2star = self.t2star_s;
        let mut t2 = self.t2_s;
        let mut t1 = self.t1_s;
        if let Some(name) = &self.preset {
            let p = zapkit::noise::preset(name)?;
            let c = if spin == "nuclear" { p.nuclear } else { p.electron };
            t2star = t2star.or(c.t2_star);
            t2 = t2.or(c.t2);
            t1 = t1.or(c.t1);
        }
        Ok((t2star, t2, t1))
    }
}
