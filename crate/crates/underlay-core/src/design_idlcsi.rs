//! Design and analysis with perfect knowledge of the secondary's own
//! direct-link CNR (all other links known only on average).
//!
//! Knowing the direct link lets the secondary skip transmissions that would
//! surely be in outage. The aggregate interference from the primary pair is
//! hypoexponential (Erlang when the scaled means coincide), which gives the
//! conditional outage in closed form; the designed signal parameters turn
//! out not to depend on the observed direct-link value, which only gates
//! transmission.

use crate::design_acsi::{algorithm_i, interval_candidates, DesignConstants};
use crate::model::{rate_threshold, ChannelMeans, EeConfig, PuConfig, PuNode, SignalParams, SuConfig};
use crate::outage::{psi_s, pu_outage_exact_numeric, su_outage_acsi, NumericsError};

/// Relative spread below which the two scaled interference means are treated
/// as equal and the Erlang branch is used, avoiding cancellation in the
/// hypoexponential difference form.
const ERLANG_SWITCH_REL_TOL: f64 = 1e-9;

/// Scaled means `p_i * i_p_bar_i` of the two exponential terms whose sum is
/// the aggregate primary-to-secondary interference.
#[derive(Debug, Clone, Copy)]
pub struct InterferenceSumStats {
    pub scaled: [f64; 2],
}

impl InterferenceSumStats {
    pub fn new(pu: &PuConfig, means: &ChannelMeans) -> Self {
        Self {
            scaled: [
                pu.power[0] * means.i_p[0],
                pu.power[1] * means.i_p[1],
            ],
        }
    }

    /// The two rates are indistinguishable and the sum is Erlang.
    pub fn is_erlang(&self) -> bool {
        let [a, b] = self.scaled;
        (a - b).abs() < ERLANG_SWITCH_REL_TOL * a.max(b)
    }

    /// Survival function of the interference sum for a non-negative bound.
    pub fn tail(&self, z: f64) -> f64 {
        let [a, b] = self.scaled;
        if self.is_erlang() {
            (1.0 + z / a) * (-z / a).exp()
        } else {
            (a * (-z / a).exp() - b * (-z / b).exp()) / (a - b)
        }
    }
}

/// Signaling family to design for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalingMode {
    Proper,
    Improper,
}

/// Transmit-or-idle decision for one observed direct-link CNR.
#[derive(Debug, Clone, Copy)]
pub struct DlDecision {
    pub transmit: bool,
    pub params: SignalParams,
    /// Outage probability over the interference fading, given transmission;
    /// 1 when idle (an idle slot delivers nothing).
    pub outage_given_transmit: f64,
}

impl DlDecision {
    fn silent() -> Self {
        Self {
            transmit: false,
            params: SignalParams::silent(),
            outage_given_transmit: 1.0,
        }
    }
}

/// Margin of the observed direct-link CNR over the outage threshold:
/// `zeta = gamma_s * (1 - c^2) / psi_s - 1`. Non-positive values mean
/// transmission would surely be in outage.
pub fn zeta(gamma_s: f64, sig: SignalParams, su: &SuConfig) -> f64 {
    let gamma_s_thr = rate_threshold(su.target_rate);
    if gamma_s_thr == 0.0 {
        return if gamma_s > 0.0 { f64::INFINITY } else { -1.0 };
    }
    let u = sig.one_minus_c2();
    gamma_s * sig.power * ((1.0 + gamma_s_thr * u).sqrt() + 1.0) / gamma_s_thr - 1.0
}

/// Whether the observed direct link supports transmission at all
/// (strictly above the threshold `psi_s / (1 - c^2)`). Equivalent to
/// `zeta(..) > 0`. The threshold extends continuously to maximal
/// impropriety, where it becomes `gamma_s_thr / (2 p_s)`.
pub fn transmission_condition(gamma_s: f64, sig: SignalParams, su: &SuConfig) -> bool {
    let gamma_s_thr = rate_threshold(su.target_rate);
    if gamma_s_thr == 0.0 {
        return gamma_s > 0.0;
    }
    let u = sig.one_minus_c2();
    let threshold = if u > 0.0 {
        psi_s(sig, gamma_s_thr) / u
    } else {
        gamma_s_thr / (2.0 * sig.power)
    };
    gamma_s > threshold
}

/// Density of the aggregate primary interference sum at `z`.
pub fn interference_sum_pdf(z: f64, stats: &InterferenceSumStats) -> f64 {
    if z < 0.0 {
        return 0.0;
    }
    let [a, b] = stats.scaled;
    if stats.is_erlang() {
        z * (-z / a).exp() / (a * a)
    } else {
        ((-z / a).exp() - (-z / b).exp()) / (a - b)
    }
}

/// Secondary outage probability for one observed direct-link CNR: certain
/// outage below the transmission threshold, otherwise the interference-sum
/// tail beyond the margin `zeta`.
pub fn su_outage_dl(
    gamma_s: f64,
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
) -> f64 {
    if rate_threshold(su.target_rate) == 0.0 {
        return 0.0;
    }
    if sig.power == 0.0 || !transmission_condition(gamma_s, sig, su) {
        return 1.0;
    }
    let stats = InterferenceSumStats::new(pu, means);
    stats.tail(zeta(gamma_s, sig, su))
}

/// The figure of merit the direct-link design maximizes:
/// `delta = (1 - c^2) / psi_s`, evaluated in a form that extends
/// continuously to maximal impropriety. The conditional outage is
/// monotonically decreasing in it.
fn delta_merit(params: SignalParams, gamma_s_thr: f64) -> f64 {
    if gamma_s_thr == 0.0 {
        return f64::INFINITY;
    }
    let u = params.one_minus_c2();
    params.power * ((1.0 + gamma_s_thr * u).sqrt() + 1.0) / gamma_s_thr
}

/// Signal design under direct-link CSI.
///
/// Proper mode transmits with the proper-design power whenever the observed
/// direct link clears the threshold. Improper mode ranks the same interval
/// endpoint candidates as the average-CSI improper design, but by the merit
/// `delta` (the ranking, and hence the chosen parameters, do not depend on
/// the observed value); the candidate maximizing `delta` also minimizes the
/// gating threshold, so no other candidate could have transmitted when it
/// cannot.
pub fn design_idl(
    gamma_s: f64,
    pu: &PuConfig,
    su: &SuConfig,
    means: &ChannelMeans,
    mode: SignalingMode,
) -> DlDecision {
    let params = match mode {
        SignalingMode::Proper => {
            let outcome = algorithm_i(pu, su, means);
            if !outcome.feasible {
                return DlDecision::silent();
            }
            outcome.params
        }
        SignalingMode::Improper => {
            let k = DesignConstants::new(pu, means);
            if !k.transmission_allowed() {
                return DlDecision::silent();
            }
            let gamma_s_thr = rate_threshold(su.target_rate);
            let mut best: Option<(f64, SignalParams)> = None;
            for cand in interval_candidates(&k, su) {
                let merit = delta_merit(cand.params, gamma_s_thr);
                let better = match &best {
                    None => true,
                    Some((m, p)) => {
                        merit > *m
                            || (merit == *m && cand.params.power > p.power)
                    }
                };
                if better {
                    best = Some((merit, cand.params));
                }
            }
            best.expect("candidate set is never empty").1
        }
    };
    if !transmission_condition(gamma_s, params, su) {
        return DlDecision::silent();
    }
    DlDecision {
        transmit: true,
        params,
        outage_given_transmit: su_outage_dl(gamma_s, params, means, pu, su),
    }
}

/// Probability that the direct link falls below the transmission threshold,
/// i.e. the fraction of time the secondary saves its transmit energy.
pub fn power_saving_probability(sig: SignalParams, means: &ChannelMeans, su: &SuConfig) -> f64 {
    let gamma_s_thr = rate_threshold(su.target_rate);
    if gamma_s_thr == 0.0 {
        return 0.0;
    }
    let t = gamma_s_thr
        / (sig.power * means.gamma_s * ((1.0 + gamma_s_thr * sig.one_minus_c2()).sqrt() + 1.0));
    -(-t).exp_m1()
}

/// Average energy efficiency of the always-transmitting (average-CSI)
/// design: delivered rate over amplifier-plus-circuit power.
pub fn avg_ee_acsi(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
    ee: &EeConfig,
) -> f64 {
    su.target_rate * (1.0 - su_outage_acsi(sig, means, pu, su))
        / (ee.kappa_pa * sig.power + ee.circuit_power)
}

/// Average energy efficiency under direct-link gating (idle slots consume
/// nothing). Exceeds the average-CSI value by exactly
/// `1 / (1 - power_saving_probability)`.
pub fn avg_ee_dl(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
    ee: &EeConfig,
) -> f64 {
    let gamma_s_thr = rate_threshold(su.target_rate);
    let t = if gamma_s_thr == 0.0 {
        0.0
    } else {
        gamma_s_thr
            / (sig.power * means.gamma_s * ((1.0 + gamma_s_thr * sig.one_minus_c2()).sqrt() + 1.0))
    };
    let d1 = pu.power[0] * means.i_p[0] * t + 1.0;
    let d2 = pu.power[1] * means.i_p[1] * t + 1.0;
    su.target_rate / ((ee.kappa_pa * sig.power + ee.circuit_power) * d1 * d2)
}

/// Primary outage probability when the secondary gates on its direct link:
/// the saving-probability mixture of the interference-free and the
/// interfered outage, each evaluated by exact quadrature. Never exceeds the
/// always-transmitting outage.
pub fn pu_outage_dl(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
    node: PuNode,
    rel_tol: f64,
) -> Result<f64, NumericsError> {
    let saving = power_saving_probability(sig, means, su);
    let silent = pu_outage_exact_numeric(SignalParams::silent(), means, pu, node, rel_tol)?;
    let active = pu_outage_exact_numeric(sig, means, pu, node, rel_tol)?;
    Ok(saving * silent + (1.0 - saving) * active)
}
