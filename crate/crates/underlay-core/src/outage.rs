//! Closed-form and semi-analytic outage probabilities.
//!
//! The secondary outage under average CSI has a closed form for any
//! circularity; the primary outage has a closed form only for proper
//! secondary signaling, an exact double-integral representation otherwise,
//! and a Jensen upper bound that the design algorithms use as their
//! constraint surface.

use crate::model::{rate_threshold, ChannelMeans, PuConfig, PuNode, SignalParams, SuConfig};
use crate::quad::{self, QuadFailure};
use thiserror::Error;

/// Failure of a numerical routine (the analytic paths never fail).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericsError {
    #[error(
        "quadrature did not reach rel_tol {requested:e} within {evals} evaluations \
         (achieved {achieved:e})"
    )]
    QuadratureNoConvergence {
        requested: f64,
        achieved: f64,
        evals: usize,
    },
    #[error("integrand produced a non-finite value")]
    NonFiniteIntegrand,
    #[error("rel_tol {given:e} outside the supported range (1e-10, 1e-3)")]
    InvalidTolerance { given: f64 },
}

impl NumericsError {
    fn from_failure(f: QuadFailure, requested: f64) -> Self {
        match f {
            QuadFailure::NoConvergence {
                achieved_rel_err,
                evals,
            } => NumericsError::QuadratureNoConvergence {
                requested,
                achieved: achieved_rel_err,
                evals,
            },
            QuadFailure::NonFinite => NumericsError::NonFiniteIntegrand,
        }
    }
}

/// Scaled secondary outage threshold
/// `psi_s = (sqrt(1 + gamma_s_thr*(1-c^2)) - 1) / p_s`.
///
/// Evaluated in the cancellation-free form
/// `gamma_s_thr*(1-c^2) / (p_s * (sqrt(1 + gamma_s_thr*(1-c^2)) + 1))`,
/// which stays accurate as the circularity approaches 1.
pub fn psi_s(sig: SignalParams, gamma_s_thr: f64) -> f64 {
    let u = sig.one_minus_c2();
    gamma_s_thr * u / (sig.power * ((1.0 + gamma_s_thr * u).sqrt() + 1.0))
}

/// Scaled primary outage threshold
/// `psi_p = (sqrt(1 + gamma_p_thr*(1-x^2)) - 1) / p_i`
/// at an effective-impropriety argument `x`.
pub fn psi_p(x: f64, gamma_p_thr: f64, p_i: f64) -> f64 {
    let u = (1.0 - x) * (1.0 + x);
    gamma_p_thr * u / (p_i * ((1.0 + gamma_p_thr * u).sqrt() + 1.0))
}

/// `psi_s / (gamma_s_bar * (1 - c^2))`, the exponent of the secondary
/// outage closed form. The `1 - c^2` factor cancels analytically, so this
/// extends continuously to maximally improper signaling, where it becomes
/// `gamma_s_thr / (2 p_s gamma_s_bar)`.
fn su_outage_exponent(power: f64, one_minus_c2: f64, gamma_s_thr: f64, gamma_s_bar: f64) -> f64 {
    gamma_s_thr / (power * gamma_s_bar * ((1.0 + gamma_s_thr * one_minus_c2).sqrt() + 1.0))
}

fn su_outage_from_exponent(t: f64, means: &ChannelMeans, pu: &PuConfig) -> f64 {
    let d1 = pu.power[0] * means.i_p[0] * t + 1.0;
    let d2 = pu.power[1] * means.i_p[1] * t + 1.0;
    1.0 - (-t).exp() / (d1 * d2)
}

/// Secondary outage probability under average CSI.
///
/// Degenerate zero power yields certain outage for a positive target rate
/// and zero outage for a zero target rate. The maximally improper endpoint
/// is handled by [`su_outage_acsi_max_improper`]; this function delegates
/// to it at `circularity == 1`.
pub fn su_outage_acsi(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
) -> f64 {
    let gamma_s_thr = rate_threshold(su.target_rate);
    if gamma_s_thr == 0.0 {
        return 0.0;
    }
    if sig.power == 0.0 {
        return 1.0;
    }
    if sig.circularity >= 1.0 {
        return su_outage_acsi_max_improper(sig.power, means, pu, su);
    }
    let t = su_outage_exponent(sig.power, sig.one_minus_c2(), gamma_s_thr, means.gamma_s);
    su_outage_from_exponent(t, means, pu)
}

/// Secondary outage probability for a maximally improper signal, i.e. the
/// analytic limit of [`su_outage_acsi`] as the circularity tends to 1.
pub fn su_outage_acsi_max_improper(
    p_s: f64,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
) -> f64 {
    let gamma_s_thr = rate_threshold(su.target_rate);
    if gamma_s_thr == 0.0 {
        return 0.0;
    }
    if p_s == 0.0 {
        return 1.0;
    }
    let t = su_outage_exponent(p_s, 0.0, gamma_s_thr, means.gamma_s);
    su_outage_from_exponent(t, means, pu)
}

/// Exact primary outage probability for a proper secondary signal.
pub fn pu_outage_proper_exact(
    p_s: f64,
    means: &ChannelMeans,
    pu: &PuConfig,
    node: PuNode,
) -> f64 {
    let i = node.index();
    let j = node.other().index();
    // single-dimension threshold 2^R - 1, scaled by the received mean CNR
    let x = (pu.target_rate[i].exp2() - 1.0) / (pu.power[i] * means.gamma_p[i]);
    let d_su = p_s * means.i_s[j] * x + 1.0;
    let d_rsi = pu.power[j] * means.upsilon_p[j] * x + 1.0;
    1.0 - (-x).exp() / (d_su * d_rsi)
}

/// Exact primary outage probability for an improper secondary signal,
/// evaluated by nested adaptive quadrature over the secondary-interference
/// and residual-self-interference fading axes.
///
/// `rel_tol` must lie in `(1e-10, 1e-3)`; the reported error of the inner
/// and outer rules together stays below it. Non-convergence within the
/// evaluation cap is a hard error, never a silent result.
pub fn pu_outage_exact_numeric(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    node: PuNode,
    rel_tol: f64,
) -> Result<f64, NumericsError> {
    if !(rel_tol > 1e-10 && rel_tol < 1e-3) {
        return Err(NumericsError::InvalidTolerance { given: rel_tol });
    }
    let i = node.index();
    let j = node.other().index();
    let gamma_p_thr = rate_threshold(pu.target_rate[i]);
    // impropriety of a zero-power signal is meaningless; treat as proper
    let c_x = if sig.power == 0.0 { 0.0 } else { sig.circularity };
    let p_i = pu.power[i];
    let p_j = pu.power[j];
    let gbar = means.gamma_p[i];
    let is_mean = means.i_s[j];
    let up_mean = means.upsilon_p[j];

    let inner_tol = 0.1 * rel_tol;
    let outer_tol = 0.9 * rel_tol;
    let inner_failure = std::cell::Cell::new(None);
    let survival = quad::integrate_semi_infinite(
        |x: f64| {
            let inner = quad::integrate_semi_infinite(
                |y: f64| {
                    let interf = p_j * y + sig.power * x + 1.0;
                    let arg = sig.power * x * c_x / interf;
                    let exponent =
                        x / is_mean + y / up_mean + interf * psi_p(arg, gamma_p_thr, p_i) / gbar;
                    (-exponent).exp() / (is_mean * up_mean)
                },
                up_mean,
                inner_tol,
                quad::MAX_EVALS_PER_AXIS,
            );
            match inner {
                Ok(r) => r.value,
                Err(f) => {
                    // poison the outer rule; the stored cause wins below
                    inner_failure.set(Some(f));
                    f64::NAN
                }
            }
        },
        is_mean,
        outer_tol,
        quad::MAX_EVALS_PER_AXIS,
    )
    .map_err(|outer| {
        NumericsError::from_failure(inner_failure.take().unwrap_or(outer), rel_tol)
    })?;
    debug_assert!(
        survival.evals <= quad::MAX_EVALS_PER_AXIS
            && survival.abs_err <= outer_tol * survival.value.abs().max(f64::MIN_POSITIVE)
    );
    Ok(1.0 - survival.value)
}

/// Jensen upper bound on the primary outage probability, the constraint
/// surface of the improper signal design. Coincides with the exact value
/// when the secondary is silent and the bound argument degenerates.
pub fn pu_outage_upper_bound(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    node: PuNode,
) -> f64 {
    let i = node.index();
    let j = node.other().index();
    let gamma_p_thr = rate_threshold(pu.target_rate[i]);
    let c_x = if sig.power == 0.0 { 0.0 } else { sig.circularity };
    let interf = pu.power[j] * means.upsilon_p[j] + sig.power * means.i_s[j] + 1.0;
    let arg = sig.power * means.i_s[j] * c_x / interf;
    1.0 - (-interf * psi_p(arg, gamma_p_thr, pu.power[i]) / means.gamma_p[i]).exp()
}
