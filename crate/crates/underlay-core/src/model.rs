//! Domain types and instantaneous achievable-rate formulas.
//!
//! Conventions used throughout the crate:
//!
//! * All channel-to-noise ratios (CNRs) are **linear** and dimensionless.
//!   Configuration surfaces accept dB and convert once at parse time.
//! * The primary pair is indexed by [`PuNode`]; the link of node `i` is the
//!   transmission from node `i`, received at the opposite node `j`. Every
//!   formula that mixes the two sides goes through [`PuNode::other`] so the
//!   `(i, j)` pairing lives in exactly one place.
//! * Powers are in Watts, rates in b/s/Hz.

use thiserror::Error;

/// Validation failure for a domain type.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{field}: {message}")]
pub struct ModelError {
    pub field: &'static str,
    pub message: String,
}

fn ensure(cond: bool, field: &'static str, message: &str) -> Result<(), ModelError> {
    if cond {
        Ok(())
    } else {
        Err(ModelError {
            field,
            message: message.to_string(),
        })
    }
}

fn ensure_all_positive(values: &[f64], field: &'static str) -> Result<(), ModelError> {
    ensure(
        values.iter().all(|v| v.is_finite() && *v > 0.0),
        field,
        "must be strictly positive and finite",
    )
}

/// Converts a decibel quantity to linear scale.
pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Converts a linear quantity to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// One node of the full-duplex primary pair (1-based in documentation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PuNode {
    N1,
    N2,
}

impl PuNode {
    pub const BOTH: [PuNode; 2] = [PuNode::N1, PuNode::N2];

    /// Zero-based index into pair arrays.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            PuNode::N1 => 0,
            PuNode::N2 => 1,
        }
    }

    /// The opposite node, i.e. the receiver of this node's transmission.
    #[inline]
    pub fn other(self) -> PuNode {
        match self {
            PuNode::N1 => PuNode::N2,
            PuNode::N2 => PuNode::N1,
        }
    }
}

/// Mean linear CNRs of all Rayleigh-faded links in the network.
///
/// Pair fields are indexed by the primary node the symbol is attached to:
/// `gamma_p[i]` is the mean CNR of the link transmitted by node `i`,
/// `i_s[i]` the mean secondary-to-node-`i` interference CNR and
/// `upsilon_p[i]` the mean residual self-interference CNR at node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMeans {
    pub gamma_p: [f64; 2],
    pub gamma_s: f64,
    pub i_p: [f64; 2],
    pub i_s: [f64; 2],
    pub upsilon_p: [f64; 2],
}

impl ChannelMeans {
    pub fn new(
        gamma_p: [f64; 2],
        gamma_s: f64,
        i_p: [f64; 2],
        i_s: [f64; 2],
        upsilon_p: [f64; 2],
    ) -> Result<Self, ModelError> {
        ensure_all_positive(&gamma_p, "gamma_p")?;
        ensure_all_positive(&[gamma_s], "gamma_s")?;
        ensure_all_positive(&i_p, "i_p")?;
        ensure_all_positive(&i_s, "i_s")?;
        ensure_all_positive(&upsilon_p, "upsilon_p")?;
        Ok(Self {
            gamma_p,
            gamma_s,
            i_p,
            i_s,
            upsilon_p,
        })
    }
}

/// One instantaneous realization of the nine link CNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub gamma_p: [f64; 2],
    pub gamma_s: f64,
    pub i_p: [f64; 2],
    pub i_s: [f64; 2],
    pub upsilon_p: [f64; 2],
}

/// Primary-pair transmit powers, target rates and outage thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct PuConfig {
    /// Transmit power of each node (W).
    pub power: [f64; 2],
    /// Fixed target rate of each link (b/s/Hz).
    pub target_rate: [f64; 2],
    /// Maximum tolerated outage probability of each link, in (0, 1).
    pub outage_threshold: [f64; 2],
}

impl PuConfig {
    pub fn new(
        power: [f64; 2],
        target_rate: [f64; 2],
        outage_threshold: [f64; 2],
    ) -> Result<Self, ModelError> {
        ensure_all_positive(&power, "power")?;
        ensure_all_positive(&target_rate, "target_rate")?;
        ensure(
            outage_threshold.iter().all(|o| *o > 0.0 && *o < 1.0),
            "outage_threshold",
            "must lie in (0, 1)",
        )?;
        Ok(Self {
            power,
            target_rate,
            outage_threshold,
        })
    }
}

/// Secondary-user power budget and target rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuConfig {
    /// Power budget (W).
    pub power_budget: f64,
    /// Target rate (b/s/Hz); zero means the user is content with any rate.
    pub target_rate: f64,
}

impl SuConfig {
    pub fn new(power_budget: f64, target_rate: f64) -> Result<Self, ModelError> {
        ensure(
            power_budget.is_finite() && power_budget > 0.0,
            "power_budget",
            "must be strictly positive and finite",
        )?;
        ensure(
            target_rate.is_finite() && target_rate >= 0.0,
            "target_rate",
            "must be non-negative and finite",
        )?;
        Ok(Self {
            power_budget,
            target_rate,
        })
    }
}

/// The secondary design pair: transmit power and circularity coefficient.
///
/// The circularity coefficient quantifies the impropriety of the transmit
/// signal: 0 is a proper (circularly symmetric) Gaussian, 1 is maximally
/// improper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalParams {
    pub power: f64,
    pub circularity: f64,
}

impl SignalParams {
    pub fn new(power: f64, circularity: f64) -> Result<Self, ModelError> {
        ensure(
            power.is_finite() && power >= 0.0,
            "power",
            "must be non-negative and finite",
        )?;
        ensure(
            (0.0..=1.0).contains(&circularity),
            "circularity",
            "must lie in [0, 1]",
        )?;
        Ok(Self { power, circularity })
    }

    /// A silent secondary: zero power, proper signaling.
    pub fn silent() -> Self {
        Self {
            power: 0.0,
            circularity: 0.0,
        }
    }

    /// `1 - circularity^2`, computed as `(1-c)(1+c)` so it stays accurate
    /// for circularity close to 1.
    #[inline]
    pub fn one_minus_c2(self) -> f64 {
        (1.0 - self.circularity) * (1.0 + self.circularity)
    }
}

/// SNR-style rate thresholds `2^(2R) - 1` for both users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateThresholds {
    /// Secondary threshold.
    pub su: f64,
    /// Primary thresholds per link.
    pub pu: [f64; 2],
}

impl RateThresholds {
    pub fn from_configs(pu: &PuConfig, su: &SuConfig) -> Self {
        Self {
            su: rate_threshold(su.target_rate),
            pu: [
                rate_threshold(pu.target_rate[0]),
                rate_threshold(pu.target_rate[1]),
            ],
        }
    }
}

/// `2^(2R) - 1`, the SINR a proper link needs over two real dimensions.
#[inline]
pub fn rate_threshold(rate: f64) -> f64 {
    (2f64 * rate).exp2() - 1.0
}

/// Power-amplifier and circuit parameters for energy-efficiency metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EeConfig {
    /// Reciprocal power-amplifier efficiency (>= 1 in practice).
    pub kappa_pa: f64,
    /// Circuit power consumption (W).
    pub circuit_power: f64,
}

impl EeConfig {
    pub fn new(kappa_pa: f64, circuit_power: f64) -> Result<Self, ModelError> {
        ensure(
            kappa_pa.is_finite() && kappa_pa > 0.0,
            "kappa_pa",
            "must be strictly positive and finite",
        )?;
        ensure(
            circuit_power.is_finite() && circuit_power >= 0.0,
            "circuit_power",
            "must be non-negative and finite",
        )?;
        Ok(Self {
            kappa_pa,
            circuit_power,
        })
    }
}

/// Instantaneous achievable rate of primary link `node` (b/s/Hz).
///
/// Node `i` transmits to node `j`, which suffers its own residual
/// self-interference and the secondary interference. Impropriety of the
/// secondary signal shrinks the effective interference, so the rate is
/// non-decreasing in the circularity coefficient.
pub fn pu_rate(draw: &ChannelDraw, pu: &PuConfig, sig: SignalParams, node: PuNode) -> f64 {
    let i = node.index();
    let j = node.other().index();
    let denom = pu.power[j] * draw.upsilon_p[j] + sig.power * draw.i_s[j] + 1.0;
    let cross = sig.power * draw.i_s[j] * sig.circularity;
    if cross == 0.0 {
        // proper reduction: plain log2(1 + SINR)
        return (1.0 + pu.power[i] * draw.gamma_p[i] / denom).log2();
    }
    let num = pu.power[i] * draw.gamma_p[i] + denom;
    0.5 * ((num * num - cross * cross) / (denom * denom - cross * cross)).log2()
}

/// Instantaneous achievable rate of the secondary link (b/s/Hz).
///
/// Non-increasing in the circularity coefficient; zero at zero power.
pub fn su_rate(draw: &ChannelDraw, pu: &PuConfig, sig: SignalParams) -> f64 {
    let interf = pu.power[0] * draw.i_p[0] + pu.power[1] * draw.i_p[1] + 1.0;
    let snr = sig.power * draw.gamma_s / interf;
    if sig.circularity == 0.0 {
        return (1.0 + snr).log2();
    }
    0.5 * (snr * snr * sig.one_minus_c2() + 2.0 * snr + 1.0).log2()
}

/// Circularity coefficients `(c_y, c_i)` of the received and the
/// interference-plus-noise signals at the receiver of primary link `node`.
///
/// Both lie in `[0, c_x]` with `c_y <= c_i`.
pub fn circularity_coefficients(
    draw: &ChannelDraw,
    pu: &PuConfig,
    sig: SignalParams,
    node: PuNode,
) -> (f64, f64) {
    let i = node.index();
    let j = node.other().index();
    let cross = sig.power * draw.i_s[j] * sig.circularity;
    if cross == 0.0 {
        return (0.0, 0.0);
    }
    let interf = pu.power[j] * draw.upsilon_p[j] + sig.power * draw.i_s[j] + 1.0;
    let received = pu.power[i] * draw.gamma_p[i] + interf;
    (cross / received, cross / interf)
}
