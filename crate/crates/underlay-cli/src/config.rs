//! Experiment configuration: a TOML file with nested blocks, validated into
//! the core domain types. Channel statistics are quoted in dB (keys carry a
//! `_db` suffix) and converted to linear exactly once, here.

use serde::Deserialize;
use underlay_core::model::db_to_linear;
use underlay_core::{ChannelMeans, EeConfig, ModelError, PuConfig, SignalParams, SuConfig};

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Optional scenario name; must match the subcommand when present.
    pub scenario: Option<String>,
    pub channels: ChannelsBlock,
    pub primary: PrimaryBlock,
    pub secondary: SecondaryBlock,
    pub energy: EnergyBlock,
    pub signal: SignalBlock,
    pub sweep: Option<SweepBlock>,
    pub montecarlo: McBlock,
    pub numerics: NumericsBlock,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelsBlock {
    pub gamma_p_db: [f64; 2],
    pub gamma_s_db: f64,
    pub i_p_db: [f64; 2],
    pub i_s_db: [f64; 2],
    pub upsilon_p_db: [f64; 2],
}

impl Default for ChannelsBlock {
    fn default() -> Self {
        Self {
            gamma_p_db: [25.0, 25.0],
            gamma_s_db: 20.0,
            i_p_db: [3.0, 3.0],
            i_s_db: [13.0, 13.0],
            upsilon_p_db: [5.0, 5.0],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrimaryBlock {
    pub power_w: [f64; 2],
    pub target_rate: [f64; 2],
    pub outage_threshold: [f64; 2],
}

impl Default for PrimaryBlock {
    fn default() -> Self {
        Self {
            power_w: [1.0, 1.0],
            target_rate: [0.5, 0.5],
            outage_threshold: [0.01, 0.01],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SecondaryBlock {
    pub power_budget_w: f64,
    pub target_rate: f64,
}

impl Default for SecondaryBlock {
    fn default() -> Self {
        Self {
            power_budget_w: 1.0,
            target_rate: 0.5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyBlock {
    pub kappa_pa: f64,
    pub circuit_power_w: f64,
}

impl Default for EnergyBlock {
    fn default() -> Self {
        Self {
            kappa_pa: 5.0,
            circuit_power_w: 1.0,
        }
    }
}

/// Fixed signal parameters for scenarios that evaluate a given operating
/// point rather than a design (the bound check). Power defaults to the
/// secondary budget.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SignalBlock {
    pub p_s_w: Option<f64>,
    pub c_x: f64,
}

impl Default for SignalBlock {
    fn default() -> Self {
        Self {
            p_s_w: None,
            c_x: 0.5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    /// Dotted path of the swept field, e.g. `channels.gamma_p_db`.
    /// Pair fields sweep both entries together.
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: SweepScale,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum SweepScale {
    #[default]
    Db,
    Linear,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McBlock {
    pub enabled: bool,
    pub samples: u64,
    pub seed: u64,
    /// Interference realizations per observed direct-link draw in the
    /// gated-design scenarios.
    pub inner: u64,
}

impl Default for McBlock {
    fn default() -> Self {
        Self {
            enabled: true,
            samples: 1_000_000,
            seed: 12345,
            inner: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsBlock {
    pub quadrature_rel_tol: f64,
}

impl Default for NumericsBlock {
    fn default() -> Self {
        Self {
            quadrature_rel_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    /// Output CSV path; stdout when absent.
    pub path: Option<String>,
}

/// One validation finding: a config field path and what is wrong with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Field paths the sweep may address.
pub const SWEEPABLE: &[&str] = &[
    "channels.gamma_p_db",
    "channels.gamma_s_db",
    "channels.i_p_db",
    "channels.i_s_db",
    "channels.upsilon_p_db",
    "primary.power_w",
    "primary.target_rate",
    "primary.outage_threshold",
    "secondary.power_budget_w",
    "secondary.target_rate",
    "energy.kappa_pa",
    "energy.circuit_power_w",
    "signal.p_s_w",
    "signal.c_x",
];

/// Sets the addressed field to `value`; pair fields get both entries.
pub fn apply_sweep_value(cfg: &mut ExperimentConfig, variable: &str, value: f64) {
    match variable {
        "channels.gamma_p_db" => cfg.channels.gamma_p_db = [value; 2],
        "channels.gamma_s_db" => cfg.channels.gamma_s_db = value,
        "channels.i_p_db" => cfg.channels.i_p_db = [value; 2],
        "channels.i_s_db" => cfg.channels.i_s_db = [value; 2],
        "channels.upsilon_p_db" => cfg.channels.upsilon_p_db = [value; 2],
        "primary.power_w" => cfg.primary.power_w = [value; 2],
        "primary.target_rate" => cfg.primary.target_rate = [value; 2],
        "primary.outage_threshold" => cfg.primary.outage_threshold = [value; 2],
        "secondary.power_budget_w" => cfg.secondary.power_budget_w = value,
        "secondary.target_rate" => cfg.secondary.target_rate = value,
        "energy.kappa_pa" => cfg.energy.kappa_pa = value,
        "energy.circuit_power_w" => cfg.energy.circuit_power_w = value,
        "signal.p_s_w" => cfg.signal.p_s_w = Some(value),
        "signal.c_x" => cfg.signal.c_x = value,
        _ => unreachable!("unvalidated sweep variable {variable}"),
    }
}

/// The resolved domain objects one sweep point operates on.
pub struct System {
    pub means: ChannelMeans,
    pub pu: PuConfig,
    pub su: SuConfig,
    pub ee: EeConfig,
    pub signal: SignalParams,
    pub rel_tol: f64,
}

fn model_diag(prefix: &str, e: ModelError) -> Diagnostic {
    Diagnostic {
        path: format!("{prefix}.{}", e.field),
        message: e.message,
    }
}

/// Builds the domain objects, converting dB to linear. Errors surface as
/// diagnostics on the offending block.
pub fn build_system(cfg: &ExperimentConfig) -> Result<System, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let means = ChannelMeans::new(
        cfg.channels.gamma_p_db.map(db_to_linear),
        db_to_linear(cfg.channels.gamma_s_db),
        cfg.channels.i_p_db.map(db_to_linear),
        cfg.channels.i_s_db.map(db_to_linear),
        cfg.channels.upsilon_p_db.map(db_to_linear),
    )
    .map_err(|e| diags.push(model_diag("channels", e)))
    .ok();
    let pu = PuConfig::new(
        cfg.primary.power_w,
        cfg.primary.target_rate,
        cfg.primary.outage_threshold,
    )
    .map_err(|e| diags.push(model_diag("primary", e)))
    .ok();
    let su = SuConfig::new(cfg.secondary.power_budget_w, cfg.secondary.target_rate)
        .map_err(|e| diags.push(model_diag("secondary", e)))
        .ok();
    let ee = EeConfig::new(cfg.energy.kappa_pa, cfg.energy.circuit_power_w)
        .map_err(|e| diags.push(model_diag("energy", e)))
        .ok();
    let signal = SignalParams::new(
        cfg.signal.p_s_w.unwrap_or(cfg.secondary.power_budget_w),
        cfg.signal.c_x,
    )
    .map_err(|e| diags.push(model_diag("signal", e)))
    .ok();
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(System {
        means: means.unwrap(),
        pu: pu.unwrap(),
        su: su.unwrap(),
        ee: ee.unwrap(),
        signal: signal.unwrap(),
        rel_tol: cfg.numerics.quadrature_rel_tol,
    })
}

/// Full configuration validation. Empty result means a run would accept it.
pub fn validate(cfg: &ExperimentConfig, known_scenarios: &[&str]) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    if let Some(name) = &cfg.scenario {
        if !known_scenarios.contains(&name.as_str()) {
            diags.push(Diagnostic {
                path: "scenario".into(),
                message: format!("unknown scenario '{name}'"),
            });
        }
    }

    if let Err(mut d) = build_system(cfg) {
        diags.append(&mut d);
    }

    if let Some(sweep) = &cfg.sweep {
        if !SWEEPABLE.contains(&sweep.variable.as_str()) {
            diags.push(Diagnostic {
                path: "sweep.variable".into(),
                message: format!("'{}' is not a sweepable field", sweep.variable),
            });
        } else {
            let wants_db = sweep.variable.ends_with("_db");
            let is_db = sweep.scale == SweepScale::Db;
            if wants_db != is_db {
                diags.push(Diagnostic {
                    path: "sweep.scale".into(),
                    message: format!(
                        "scale must be '{}' for '{}'",
                        if wants_db { "db" } else { "linear" },
                        sweep.variable
                    ),
                });
            }
            // the endpoint values must produce valid configurations
            for (tag, value) in [("start", sweep.start), ("stop", sweep.stop)] {
                let mut probe = cfg.clone();
                apply_sweep_value(&mut probe, &sweep.variable, value);
                if let Err(d) = build_system(&probe) {
                    for inner in d {
                        diags.push(Diagnostic {
                            path: format!("sweep.{tag}"),
                            message: format!("value {value} invalid: {inner}"),
                        });
                    }
                }
            }
        }
        if sweep.points < 2 {
            diags.push(Diagnostic {
                path: "sweep.points".into(),
                message: "need at least 2 points".into(),
            });
        }
        if !sweep.start.is_finite() || !sweep.stop.is_finite() {
            diags.push(Diagnostic {
                path: "sweep".into(),
                message: "start/stop must be finite".into(),
            });
        }
    }

    if cfg.montecarlo.enabled && cfg.montecarlo.samples == 0 {
        diags.push(Diagnostic {
            path: "montecarlo.samples".into(),
            message: "must be at least 1".into(),
        });
    }
    if cfg.montecarlo.inner == 0 {
        diags.push(Diagnostic {
            path: "montecarlo.inner".into(),
            message: "must be at least 1".into(),
        });
    }

    let tol = cfg.numerics.quadrature_rel_tol;
    if !(tol > 1e-10 && tol < 1e-3) {
        diags.push(Diagnostic {
            path: "numerics.quadrature_rel_tol".into(),
            message: format!("{tol:e} outside the supported range (1e-10, 1e-3)"),
        });
    }

    diags
}

pub fn load(path: &str) -> Result<ExperimentConfig, Diagnostic> {
    let text = std::fs::read_to_string(path).map_err(|e| Diagnostic {
        path: path.to_string(),
        message: format!("cannot read config: {e}"),
    })?;
    toml::from_str(&text).map_err(|e| Diagnostic {
        path: path.to_string(),
        message: format!("malformed config: {e}"),
    })
}
