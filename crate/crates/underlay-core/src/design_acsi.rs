//! Secondary signal design from average channel statistics.
//!
//! The proper design reduces to a power cap per primary link plus the budget.
//! The improper design works on the Jensen bound: for every circularity the
//! bound constraint is a quadratic in the secondary power whose positive root
//! is a per-link power cap, strictly increasing in the circularity. The
//! pointwise minimum of the two caps and the budget is piecewise-smooth with
//! at most three breakpoints, and on each piece the optimum sits at an
//! interval endpoint, so the search space collapses to a handful of
//! candidates.

use crate::model::{rate_threshold, ChannelMeans, PuConfig, PuNode, SignalParams, SuConfig};
use crate::outage::{su_outage_acsi, su_outage_acsi_max_improper};
use std::cmp::Ordering;

/// Absolute tolerance for deduplicating breakpoints on the circularity axis.
const BREAKPOINT_DEDUP_TOL: f64 = 1e-10;

/// Per-link constants of the bound-constraint quadratic.
///
/// For link `i` (received at node `j`): `gamma_thr` is the SINR threshold,
/// `mu` the outage margin `p_i * gamma_p_bar_i * ln(1/(1-O_i))`, `beta_other`
/// the RSI floor `p_j * upsilon_p_bar_j + 1`, and
/// `lambda = beta_other * gamma_thr - mu`,
/// `upsilon_big = mu^2 + 2*beta_other*mu - gamma_thr*beta_other^2`.
/// The secondary may transmit under this link's constraint iff
/// `upsilon_big > 0`.
#[derive(Debug, Clone, Copy)]
pub struct NodeConstants {
    pub gamma_thr: f64,
    pub mu: f64,
    pub beta_other: f64,
    pub lambda: f64,
    pub upsilon_big: f64,
    /// Mean secondary interference CNR at this link's receiver.
    pub i_s_other: f64,
}

impl NodeConstants {
    /// `gamma_thr * (1 - c^2) * upsilon_big`, the discriminant contribution.
    pub fn phi(&self, c_x: f64) -> f64 {
        self.gamma_thr * (1.0 - c_x) * (1.0 + c_x) * self.upsilon_big
    }

    /// `phi / lambda^2`, the normalized discriminant contribution.
    pub fn omega(&self, c_x: f64) -> f64 {
        self.phi(c_x) / (self.lambda * self.lambda)
    }

    /// Power cap in the maximally improper limit.
    fn cap_at_one(&self) -> f64 {
        if self.upsilon_big <= 0.0 {
            0.0
        } else if self.lambda > 0.0 {
            self.upsilon_big / (2.0 * self.lambda * self.i_s_other)
        } else {
            f64::INFINITY
        }
    }
}

/// Constants of both links plus the channel context the design needs.
#[derive(Debug, Clone)]
pub struct DesignConstants {
    nodes: [NodeConstants; 2],
}

impl DesignConstants {
    pub fn new(pu: &PuConfig, means: &ChannelMeans) -> Self {
        let node = |n: PuNode| {
            let i = n.index();
            let j = n.other().index();
            let gamma_thr = rate_threshold(pu.target_rate[i]);
            let mu = -pu.power[i] * means.gamma_p[i] * (-pu.outage_threshold[i]).ln_1p();
            let beta_other = pu.power[j] * means.upsilon_p[j] + 1.0;
            NodeConstants {
                gamma_thr,
                mu,
                beta_other,
                lambda: beta_other * gamma_thr - mu,
                upsilon_big: mu * mu + 2.0 * beta_other * mu - gamma_thr * beta_other * beta_other,
                i_s_other: means.i_s[j],
            }
        };
        Self {
            nodes: [node(PuNode::N1), node(PuNode::N2)],
        }
    }

    pub fn node(&self, n: PuNode) -> &NodeConstants {
        &self.nodes[n.index()]
    }

    /// Both links admit a positive power cap.
    pub fn transmission_allowed(&self) -> bool {
        self.nodes.iter().all(|n| n.upsilon_big > 0.0)
    }
}

/// Which constraint pins the designed power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveConstraint {
    /// The secondary power budget.
    Budget,
    /// The outage cap of the given primary link.
    Cap(PuNode),
    /// No transmission is admissible.
    Silent,
}

/// Result of a signal design.
#[derive(Debug, Clone, Copy)]
pub struct DesignOutcome {
    pub params: SignalParams,
    pub su_outage: f64,
    pub feasible: bool,
    pub active: ActiveConstraint,
}

/// Interval structure of the improper feasible region: circularity points
/// `0 = c_0 < c_1 < ... < c_{k+1} = 1` and, for each interval, the
/// constraint active on it.
#[derive(Debug, Clone)]
pub struct Breakpoints {
    pub points: Vec<f64>,
    pub active: Vec<ActiveConstraint>,
}

impl Breakpoints {
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, ActiveConstraint)> + '_ {
        self.points
            .windows(2)
            .zip(self.active.iter())
            .map(|(w, &a)| (w[0], w[1], a))
    }
}

/// Endpoint candidate produced for one interval of [`Breakpoints`].
#[derive(Debug, Clone, Copy)]
pub struct IntervalCandidate {
    pub params: SignalParams,
    pub active: ActiveConstraint,
    pub interval: (f64, f64),
}

/// Maximum allowable margin interference-to-noise ratio at the receiver of
/// the given primary link (clamped at zero).
pub fn max_inr(pu: &PuConfig, means: &ChannelMeans, node: PuNode) -> f64 {
    let i = node.index();
    let mu = -pu.power[i] * means.gamma_p[i] * (-pu.outage_threshold[i]).ln_1p();
    (mu / (pu.target_rate[i].exp2() - 1.0) - 1.0).max(0.0)
}

/// Largest secondary power meeting the outage threshold of the given link
/// under proper signaling; zero means the secondary must stay silent for
/// this link's constraint.
pub fn proper_power_cap(pu: &PuConfig, means: &ChannelMeans, node: PuNode) -> f64 {
    let i = node.index();
    let j = node.other().index();
    let x = (pu.target_rate[i].exp2() - 1.0) / (pu.power[i] * means.gamma_p[i]);
    let floor = (1.0 - pu.outage_threshold[i]) * (pu.power[j] * means.upsilon_p[j] * x + 1.0);
    (((-x).exp() / floor - 1.0) / (means.i_s[j] * x)).max(0.0)
}

/// Spectrum sharing condition for the given link: the allowable margin INR
/// must exceed what the residual self-interference alone consumes.
/// Equivalent to `proper_power_cap(..) > 0`.
pub fn proper_spectrum_sharing_condition(
    pu: &PuConfig,
    means: &ChannelMeans,
    node: PuNode,
) -> bool {
    let i = node.index();
    let j = node.other().index();
    let x = (pu.target_rate[i].exp2() - 1.0) / (pu.power[i] * means.gamma_p[i]);
    max_inr(pu, means, node) > (pu.power[j] * means.upsilon_p[j] * x).ln_1p() / x
}

fn silent_outcome(means: &ChannelMeans, pu: &PuConfig, su: &SuConfig) -> DesignOutcome {
    let params = SignalParams::silent();
    DesignOutcome {
        params,
        su_outage: su_outage_acsi(params, means, pu, su),
        feasible: false,
        active: ActiveConstraint::Silent,
    }
}

/// Proper design: transmit at the smallest of the two link caps and the
/// budget, or stay silent when either sharing condition fails.
pub fn algorithm_i(pu: &PuConfig, su: &SuConfig, means: &ChannelMeans) -> DesignOutcome {
    if PuNode::BOTH
        .iter()
        .any(|&n| !proper_spectrum_sharing_condition(pu, means, n))
    {
        return silent_outcome(means, pu, su);
    }
    let mut power = su.power_budget;
    let mut active = ActiveConstraint::Budget;
    for node in PuNode::BOTH {
        let cap = proper_power_cap(pu, means, node);
        if cap < power {
            power = cap;
            active = ActiveConstraint::Cap(node);
        }
    }
    let params = SignalParams {
        power,
        circularity: 0.0,
    };
    DesignOutcome {
        params,
        su_outage: su_outage_acsi(params, means, pu, su),
        feasible: true,
        active,
    }
}

/// Power cap of one link under the Jensen bound at circularity `c_x`:
/// the positive root of the bound-constraint quadratic, clamped at zero
/// when no positive root exists. Strictly increasing in `c_x`.
///
/// At `c_x = 1` this returns the analytic limit
/// `upsilon_big / (2 lambda i_s)` for positive `lambda` and infinity
/// otherwise; the removable `1/(1-c^2)` singularity is never evaluated.
pub fn improper_power_cap(c_x: f64, node: &NodeConstants) -> f64 {
    if node.upsilon_big <= 0.0 {
        return 0.0;
    }
    if c_x >= 1.0 {
        return node.cap_at_one();
    }
    let u = (1.0 - c_x) * (1.0 + c_x);
    let disc = (node.lambda * node.lambda + node.gamma_thr * u * node.upsilon_big).sqrt();
    if node.lambda >= 0.0 {
        // conjugate form; no cancellation as u -> 0
        node.upsilon_big / (node.i_s_other * (disc + node.lambda))
    } else {
        (disc - node.lambda) / (node.gamma_thr * node.i_s_other * u)
    }
}

/// Circularity at which the link's power cap reaches the budget, if the cap
/// starts below it and ends above it.
pub fn budget_intersection(node: &NodeConstants, su: &SuConfig) -> Option<f64> {
    if node.upsilon_big <= 0.0 {
        return None;
    }
    let budget = su.power_budget;
    if !(improper_power_cap(0.0, node) < budget && node.cap_at_one() > budget) {
        return None;
    }
    let scaled = budget * node.i_s_other;
    let arg =
        1.0 + (2.0 * scaled * node.lambda - node.upsilon_big) / (node.gamma_thr * scaled * scaled);
    debug_assert!(arg > 0.0 && arg < 1.0, "intersection argument {arg}");
    Some(arg.clamp(0.0, 1.0).sqrt())
}

/// Growth class of a cap as the circularity approaches 1, for ordering two
/// caps near the endpoint: a negative-lambda cap diverges like `1/(1-c^2)`,
/// a zero-lambda cap like its square root, a positive-lambda cap stays
/// finite.
fn near_one_key(node: &NodeConstants) -> (u8, f64) {
    match node.lambda.partial_cmp(&0.0).unwrap() {
        Ordering::Less => (2, -2.0 * node.lambda / (node.gamma_thr * node.i_s_other)),
        Ordering::Equal => (
            1,
            (node.upsilon_big / node.gamma_thr).sqrt() / node.i_s_other,
        ),
        Ordering::Greater => (0, node.cap_at_one()),
    }
}

fn cmp_near_one(a: &NodeConstants, b: &NodeConstants) -> Ordering {
    let (ca, va) = near_one_key(a);
    let (cb, vb) = near_one_key(b);
    ca.cmp(&cb).then(va.total_cmp(&vb))
}

/// Circularity at which the two link caps cross, if they do.
///
/// The crossing solves a quartic in `1 - c^2` whose valid root has the
/// closed form below; the result is verified against both caps and refined
/// by bisection in the degenerate case where the closed form loses accuracy.
pub fn cap_cross_intersection(k: &DesignConstants) -> Option<f64> {
    let n1 = k.node(PuNode::N1);
    let n2 = k.node(PuNode::N2);
    if n1.upsilon_big <= 0.0 || n2.upsilon_big <= 0.0 {
        return None;
    }
    let d0 = improper_power_cap(0.0, n1) - improper_power_cap(0.0, n2);
    let order_one = cmp_near_one(n1, n2);
    // identical caps, or caps ordered the same way at both ends: no crossing
    let crossing = (d0 < 0.0 && order_one == Ordering::Greater)
        || (d0 > 0.0 && order_one == Ordering::Less);
    if !crossing {
        return None;
    }

    let a1 = n1.gamma_thr * n1.i_s_other;
    let a2 = n2.gamma_thr * n2.i_s_other;
    let big_a1 = n1.gamma_thr * n1.upsilon_big;
    let big_a2 = n2.gamma_thr * n2.upsilon_big;
    let den = a2 * a2 * big_a1 - a1 * a1 * big_a2;
    let u_star = 4.0 * a1 * a2 * (a2 * n1.lambda - a1 * n2.lambda)
        * (a1 * big_a2 * n1.lambda - a2 * big_a1 * n2.lambda)
        / (den * den);

    let accept = |c: f64| {
        let c1 = improper_power_cap(c, n1);
        let c2 = improper_power_cap(c, n2);
        (c1 - c2).abs() <= 1e-9 * c1.abs().max(c2.abs()).max(1.0)
    };
    if u_star > 0.0 && u_star < 1.0 {
        let r = (1.0 - u_star).sqrt();
        if accept(r) {
            return Some(r);
        }
    }
    // closed form degenerated; the sign change guarantees a bracketed root
    let diff = |c: f64| improper_power_cap(c, n1) - improper_power_cap(c, n2);
    let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-12);
    if diff(lo).signum() == diff(hi).signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if diff(lo).signum() == diff(mid).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Interval decomposition of the improper feasible region.
///
/// Requires both links to admit transmission (`upsilon_big > 0`). Points
/// closer than the dedup tolerance collapse; each interval is tagged with
/// the constraint that is smallest at its midpoint (budget wins ties).
pub fn breakpoints(k: &DesignConstants, su: &SuConfig) -> Breakpoints {
    debug_assert!(k.transmission_allowed());
    let mut inner: Vec<f64> = PuNode::BOTH
        .iter()
        .filter_map(|&n| budget_intersection(k.node(n), su))
        .chain(cap_cross_intersection(k))
        .filter(|c| *c > BREAKPOINT_DEDUP_TOL && *c < 1.0 - BREAKPOINT_DEDUP_TOL)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup_by(|a, b| (*a - *b).abs() <= BREAKPOINT_DEDUP_TOL);

    let mut points = Vec::with_capacity(inner.len() + 2);
    points.push(0.0);
    points.extend(inner);
    points.push(1.0);

    let active = points
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let mut best = (su.power_budget, ActiveConstraint::Budget);
            for node in PuNode::BOTH {
                let cap = improper_power_cap(mid, k.node(node));
                if cap < best.0 {
                    best = (cap, ActiveConstraint::Cap(node));
                }
            }
            best.1
        })
        .collect();
    Breakpoints { points, active }
}

/// Whether raising the circularity helps the secondary while the given
/// link's cap is the binding constraint: always for non-positive `lambda`,
/// otherwise iff the secondary target rate stays below
/// `log2(mu * sqrt(1 + gamma_thr) / lambda)`. Equality counts as
/// beneficial; ties produce equal outage at both interval endpoints.
pub fn improper_benefit_condition(k: &DesignConstants, su: &SuConfig, active_node: PuNode) -> bool {
    let n = k.node(active_node);
    if n.lambda <= 0.0 {
        return true;
    }
    su.target_rate <= (n.mu * (1.0 + n.gamma_thr).sqrt() / n.lambda).log2()
}

/// Per-interval endpoint candidates of the improper design: budget-active
/// intervals take their left endpoint, cap-active intervals take the right
/// endpoint exactly when the benefit condition holds for the active link.
pub fn interval_candidates(k: &DesignConstants, su: &SuConfig) -> Vec<IntervalCandidate> {
    let bps = breakpoints(k, su);
    bps.intervals()
        .map(|(left, right, active)| {
            let (power, circularity) = match active {
                ActiveConstraint::Budget => (su.power_budget, left),
                ActiveConstraint::Cap(node) => {
                    let c = if improper_benefit_condition(k, su, node) {
                        right
                    } else {
                        left
                    };
                    // endpoint rounding can push the cap a hair past the
                    // budget it equals there
                    (improper_power_cap(c, k.node(node)).min(su.power_budget), c)
                }
                ActiveConstraint::Silent => unreachable!("intervals are never tagged silent"),
            };
            IntervalCandidate {
                params: SignalParams {
                    power,
                    circularity,
                },
                active,
                interval: (left, right),
            }
        })
        .collect()
}

fn su_outage_at(params: SignalParams, means: &ChannelMeans, pu: &PuConfig, su: &SuConfig) -> f64 {
    if params.circularity >= 1.0 {
        su_outage_acsi_max_improper(params.power, means, pu, su)
    } else {
        su_outage_acsi(params, means, pu, su)
    }
}

/// Improper design: enumerate the interval endpoint candidates and return
/// the one with the smallest secondary outage (first wins ties). Silent and
/// infeasible when either link forbids transmission under the bound.
pub fn algorithm_ii(pu: &PuConfig, su: &SuConfig, means: &ChannelMeans) -> DesignOutcome {
    let k = DesignConstants::new(pu, means);
    if !k.transmission_allowed() {
        return silent_outcome(means, pu, su);
    }
    let mut best: Option<DesignOutcome> = None;
    for cand in interval_candidates(&k, su) {
        let outage = su_outage_at(cand.params, means, pu, su);
        if best.as_ref().is_none_or(|b| outage < b.su_outage) {
            best = Some(DesignOutcome {
                params: cand.params,
                su_outage: outage,
                feasible: true,
                active: cand.active,
            });
        }
    }
    best.expect("breakpoints always produce at least one interval")
}

/// Secondary outage along the cap of the active link, as a function of the
/// circularity alone. Algebraic restatement of [`su_outage_acsi`] evaluated
/// at `(cap(c_x), c_x)`.
pub fn su_outage_on_cap(
    c_x: f64,
    active_node: PuNode,
    k: &DesignConstants,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
) -> f64 {
    let gamma_s_thr = rate_threshold(su.target_rate);
    if gamma_s_thr == 0.0 {
        return 0.0;
    }
    let cap = improper_power_cap(c_x, k.node(active_node));
    let u = (1.0 - c_x) * (1.0 + c_x);
    // product of the received-shape factor and the scaled gain; stays finite
    // at the maximally improper endpoint
    let yg = cap * means.gamma_s * ((1.0 + gamma_s_thr * u).sqrt() + 1.0) / gamma_s_thr;
    let d1 = pu.power[0] * means.i_p[0] + yg;
    let d2 = pu.power[1] * means.i_p[1] + yg;
    1.0 - yg * yg * (-1.0 / yg).exp() / (d1 * d2)
}
