//! The eight experiment scenarios, each a sweep producing one CSV table.
//! Sweep points are independent and run in parallel under the `parallel`
//! feature; rows always come back in sweep order and Monte Carlo streams are
//! indexed by the point, so output is identical regardless of thread count.

use crate::config::{apply_sweep_value, build_system, ExperimentConfig, SweepBlock, SweepScale};
use underlay_core::design_acsi::{algorithm_i, algorithm_ii};
use underlay_core::design_idlcsi::{
    avg_ee_acsi, avg_ee_dl, design_idl, power_saving_probability, pu_outage_dl, SignalingMode,
};
use underlay_core::montecarlo::{
    empirical_dl_metrics, empirical_pu_outage, empirical_su_outage, SeedSpec,
};
use underlay_core::outage::{pu_outage_exact_numeric, pu_outage_upper_bound};
use underlay_core::{NumericsError, PuNode};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Primary outage: exact quadrature vs the design bound at fixed signal
    /// parameters, swept over the primary direct-link quality.
    BoundCheck,
    /// Proper vs improper average-CSI designs over the secondary link
    /// quality.
    AcsiSweep,
    /// The same comparison over the secondary target rate.
    RateSweep,
    /// The same comparison over the residual self-interference level.
    RsiSweep,
    /// Average-CSI design outage vs the time average of the direct-link
    /// gated design.
    IdlCompare,
    /// Power-saving probability of the gated design.
    PowerSaving,
    /// Average energy efficiency of the two designs over the target rate.
    EnergyEfficiency,
    /// Primary-side protection obtained from the gated design.
    PuProtection,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::BoundCheck,
        Scenario::AcsiSweep,
        Scenario::RateSweep,
        Scenario::RsiSweep,
        Scenario::IdlCompare,
        Scenario::PowerSaving,
        Scenario::EnergyEfficiency,
        Scenario::PuProtection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::BoundCheck => "bound-check",
            Scenario::AcsiSweep => "acsi-sweep",
            Scenario::RateSweep => "rate-sweep",
            Scenario::RsiSweep => "rsi-sweep",
            Scenario::IdlCompare => "idl-compare",
            Scenario::PowerSaving => "power-saving",
            Scenario::EnergyEfficiency => "energy-efficiency",
            Scenario::PuProtection => "pu-protection",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|s| s.name()).collect()
    }

    /// The sweep used when the config does not specify one.
    pub fn default_sweep(self) -> SweepBlock {
        let db = |variable: &str, start: f64, stop: f64, points: usize| SweepBlock {
            variable: variable.to_string(),
            start,
            stop,
            points,
            scale: SweepScale::Db,
        };
        let linear = |variable: &str, start: f64, stop: f64, points: usize| SweepBlock {
            variable: variable.to_string(),
            start,
            stop,
            points,
            scale: SweepScale::Linear,
        };
        match self {
            Scenario::BoundCheck => db("channels.gamma_p_db", 15.0, 35.0, 11),
            Scenario::AcsiSweep => db("channels.gamma_s_db", 5.0, 30.0, 26),
            Scenario::RateSweep => linear("secondary.target_rate", 0.1, 2.0, 20),
            Scenario::RsiSweep => db("channels.upsilon_p_db", 0.0, 12.0, 25),
            Scenario::IdlCompare => db("channels.gamma_s_db", 5.0, 30.0, 26),
            Scenario::PowerSaving => db("channels.gamma_s_db", 0.0, 30.0, 31),
            Scenario::EnergyEfficiency => linear("secondary.target_rate", 0.1, 3.0, 30),
            Scenario::PuProtection => db("channels.gamma_s_db", 5.0, 30.0, 26),
        }
    }
}

/// A finished sweep: one header and one row of values per sweep point.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// CSV rendering at full double precision (17 significant digits), so
    /// reruns are byte-comparable.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub enum RunError {
    /// A numerical routine failed (quadrature non-convergence or a
    /// non-finite result).
    Numerics(String),
}

impl From<NumericsError> for RunError {
    fn from(e: NumericsError) -> Self {
        RunError::Numerics(e.to_string())
    }
}

fn check_finite(row: &[f64]) -> Result<(), RunError> {
    if row.iter().any(|v| !v.is_finite()) {
        return Err(RunError::Numerics("non-finite value in output row".into()));
    }
    Ok(())
}

/// Runs one scenario over its sweep. Monte Carlo columns appear only when
/// sampling is enabled; the stream id of every estimate is derived from the
/// sweep point index.
pub fn run_scenario(scenario: Scenario, cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let sweep = cfg
        .sweep
        .clone()
        .unwrap_or_else(|| scenario.default_sweep());
    let mc = cfg.montecarlo.enabled;
    let leaf = sweep.variable.rsplit('.').next().unwrap().to_string();

    let header = build_header(scenario, &leaf, mc);
    let values: Vec<f64> = (0..sweep.points)
        .map(|i| sweep.start + (sweep.stop - sweep.start) * i as f64 / (sweep.points - 1) as f64)
        .collect();

    let point = |(idx, value): (usize, &f64)| -> Result<Vec<f64>, RunError> {
        let mut point_cfg = cfg.clone();
        apply_sweep_value(&mut point_cfg, &sweep.variable, *value);
        let sys = build_system(&point_cfg).map_err(|d| {
            RunError::Numerics(format!("sweep value {value} produced an invalid system: {d:?}"))
        })?;
        let mut row = vec![*value];
        compute_row(scenario, &sys, &point_cfg, idx as u64, mc, &mut row)?;
        check_finite(&row)?;
        Ok(row)
    };

    #[cfg(feature = "parallel")]
    let rows: Result<Vec<Vec<f64>>, RunError> =
        values.par_iter().enumerate().map(point).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<Vec<f64>>, RunError> = values.iter().enumerate().map(point).collect();

    Ok(Table {
        header,
        rows: rows?,
    })
}

fn build_header(scenario: Scenario, leaf: &str, mc: bool) -> Vec<String> {
    let mut h: Vec<String> = vec![leaf.to_string()];
    let mut push = |names: &[&str]| h.extend(names.iter().map(|s| s.to_string()));
    match scenario {
        Scenario::BoundCheck => {
            push(&["exact", "upper_bound"]);
            if mc {
                push(&["mc_estimate", "mc_stderr"]);
            }
        }
        Scenario::AcsiSweep | Scenario::RateSweep | Scenario::RsiSweep => {
            push(&[
                "proper_p_s",
                "proper_outage",
                "improper_p_s",
                "improper_c_x",
                "improper_outage",
            ]);
            if mc {
                push(&[
                    "proper_mc",
                    "proper_mc_stderr",
                    "improper_mc",
                    "improper_mc_stderr",
                ]);
            }
        }
        Scenario::IdlCompare => {
            push(&["proper_acsi_outage", "improper_acsi_outage"]);
            if mc {
                push(&[
                    "proper_idl_outage_mc",
                    "proper_idl_stderr",
                    "improper_idl_outage_mc",
                    "improper_idl_stderr",
                ]);
            }
        }
        Scenario::PowerSaving => {
            push(&["p_saving"]);
            if mc {
                push(&["p_saving_mc", "p_saving_stderr"]);
            }
        }
        Scenario::EnergyEfficiency => {
            push(&["ee_acsi", "ee_idl"]);
            if mc {
                push(&["ee_idl_mc", "ee_idl_stderr"]);
            }
        }
        Scenario::PuProtection => {
            push(&["pu1_acsi", "pu1_idl", "pu2_acsi", "pu2_idl"]);
            if mc {
                push(&["pu1_idl_mc", "pu1_idl_stderr", "pu2_idl_mc", "pu2_idl_stderr"]);
            }
        }
    }
    h
}

fn compute_row(
    scenario: Scenario,
    sys: &crate::config::System,
    cfg: &ExperimentConfig,
    point: u64,
    mc: bool,
    row: &mut Vec<f64>,
) -> Result<(), RunError> {
    let seed = cfg.montecarlo.seed;
    let n = cfg.montecarlo.samples;
    let inner = cfg.montecarlo.inner;
    // two independent streams per sweep point
    let stream_a = SeedSpec::new(seed, 2 * point);
    let stream_b = SeedSpec::new(seed, 2 * point + 1);

    match scenario {
        Scenario::BoundCheck => {
            let exact =
                pu_outage_exact_numeric(sys.signal, &sys.means, &sys.pu, PuNode::N1, sys.rel_tol)?;
            let bound = pu_outage_upper_bound(sys.signal, &sys.means, &sys.pu, PuNode::N1);
            row.extend([exact, bound]);
            if mc {
                let est =
                    empirical_pu_outage(sys.signal, &sys.means, &sys.pu, PuNode::N1, n, stream_a);
                row.extend([est.estimate, est.std_err]);
            }
        }
        Scenario::AcsiSweep | Scenario::RateSweep | Scenario::RsiSweep => {
            let proper = algorithm_i(&sys.pu, &sys.su, &sys.means);
            let improper = algorithm_ii(&sys.pu, &sys.su, &sys.means);
            row.extend([
                proper.params.power,
                proper.su_outage,
                improper.params.power,
                improper.params.circularity,
                improper.su_outage,
            ]);
            if mc {
                let p = empirical_su_outage(proper.params, &sys.means, &sys.pu, &sys.su, n, stream_a);
                let i =
                    empirical_su_outage(improper.params, &sys.means, &sys.pu, &sys.su, n, stream_b);
                row.extend([p.estimate, p.std_err, i.estimate, i.std_err]);
            }
        }
        Scenario::IdlCompare => {
            let proper = algorithm_i(&sys.pu, &sys.su, &sys.means);
            let improper = algorithm_ii(&sys.pu, &sys.su, &sys.means);
            row.extend([proper.su_outage, improper.su_outage]);
            if mc {
                let pm = empirical_dl_metrics(
                    |g| design_idl(g, &sys.pu, &sys.su, &sys.means, SignalingMode::Proper),
                    &sys.means,
                    &sys.pu,
                    &sys.su,
                    &sys.ee,
                    n,
                    inner,
                    stream_a,
                );
                let im = empirical_dl_metrics(
                    |g| design_idl(g, &sys.pu, &sys.su, &sys.means, SignalingMode::Improper),
                    &sys.means,
                    &sys.pu,
                    &sys.su,
                    &sys.ee,
                    n,
                    inner,
                    stream_b,
                );
                row.extend([
                    pm.su_outage.estimate,
                    pm.su_outage.std_err,
                    im.su_outage.estimate,
                    im.su_outage.std_err,
                ]);
            }
        }
        Scenario::PowerSaving => {
            let improper = algorithm_ii(&sys.pu, &sys.su, &sys.means);
            let saving = power_saving_probability(improper.params, &sys.means, &sys.su);
            row.push(saving);
            if mc {
                let m = empirical_dl_metrics(
                    |g| design_idl(g, &sys.pu, &sys.su, &sys.means, SignalingMode::Improper),
                    &sys.means,
                    &sys.pu,
                    &sys.su,
                    &sys.ee,
                    n,
                    inner,
                    stream_a,
                );
                row.extend([m.power_saving.estimate, m.power_saving.std_err]);
            }
        }
        Scenario::EnergyEfficiency => {
            let improper = algorithm_ii(&sys.pu, &sys.su, &sys.means);
            let acsi = avg_ee_acsi(improper.params, &sys.means, &sys.pu, &sys.su, &sys.ee);
            let dl = avg_ee_dl(improper.params, &sys.means, &sys.pu, &sys.su, &sys.ee);
            row.extend([acsi, dl]);
            if mc {
                let m = empirical_dl_metrics(
                    |g| design_idl(g, &sys.pu, &sys.su, &sys.means, SignalingMode::Improper),
                    &sys.means,
                    &sys.pu,
                    &sys.su,
                    &sys.ee,
                    n,
                    inner,
                    stream_a,
                );
                row.extend([m.energy_efficiency.estimate, m.energy_efficiency.std_err]);
            }
        }
        Scenario::PuProtection => {
            let improper = algorithm_ii(&sys.pu, &sys.su, &sys.means);
            for node in PuNode::BOTH {
                let acsi = pu_outage_exact_numeric(
                    improper.params,
                    &sys.means,
                    &sys.pu,
                    node,
                    sys.rel_tol,
                )?;
                let gated = pu_outage_dl(
                    improper.params,
                    &sys.means,
                    &sys.pu,
                    &sys.su,
                    node,
                    sys.rel_tol,
                )?;
                row.extend([acsi, gated]);
            }
            if mc {
                let m = empirical_dl_metrics(
                    |g| design_idl(g, &sys.pu, &sys.su, &sys.means, SignalingMode::Improper),
                    &sys.means,
                    &sys.pu,
                    &sys.su,
                    &sys.ee,
                    n,
                    inner,
                    stream_a,
                );
                row.extend([
                    m.pu_outage[0].estimate,
                    m.pu_outage[0].std_err,
                    m.pu_outage[1].estimate,
                    m.pu_outage[1].std_err,
                ]);
            }
        }
    }
    Ok(())
}
