//! Shared fixtures and independent oracles for the integration tests.
//!
//! Everything here deliberately avoids the implementation paths it is used
//! to check: quadrature oracles use composite Simpson instead of the
//! adaptive Gauss-Kronrod rule, feasibility is probed by bisecting the raw
//! bound constraint instead of the closed-form power caps, and the grid
//! search enumerates the feasible region exhaustively.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use underlay_core::outage::{pu_outage_upper_bound, su_outage_acsi, su_outage_acsi_max_improper};
use underlay_core::{ChannelMeans, PuConfig, PuNode, SignalParams, SuConfig};

pub fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// The standard evaluation setup used across the test suite: symmetric
/// primary pair at 25 dB direct / 5 dB RSI / 3 dB interference toward the
/// secondary, 13 dB secondary interference, 20 dB secondary direct link,
/// unit powers, half-rate targets, 1% primary outage budget.
pub fn baseline() -> (ChannelMeans, PuConfig, SuConfig) {
    let means = ChannelMeans::new(
        [db(25.0), db(25.0)],
        db(20.0),
        [db(3.0), db(3.0)],
        [db(13.0), db(13.0)],
        [db(5.0), db(5.0)],
    )
    .unwrap();
    let pu = PuConfig::new([1.0, 1.0], [0.5, 0.5], [0.01, 0.01]).unwrap();
    let su = SuConfig::new(1.0, 0.5).unwrap();
    (means, pu, su)
}

pub fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random but physically sensible system configuration.
pub fn random_system(rng: &mut ChaCha8Rng) -> (ChannelMeans, PuConfig, SuConfig) {
    let means = ChannelMeans::new(
        [
            db(rng.gen_range(18.0..32.0)),
            db(rng.gen_range(18.0..32.0)),
        ],
        db(rng.gen_range(10.0..25.0)),
        [db(rng.gen_range(0.0..6.0)), db(rng.gen_range(0.0..6.0))],
        [db(rng.gen_range(2.0..15.0)), db(rng.gen_range(2.0..15.0))],
        [db(rng.gen_range(0.0..8.0)), db(rng.gen_range(0.0..8.0))],
    )
    .unwrap();
    let pu = PuConfig::new(
        [rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)],
        [rng.gen_range(0.25..0.9), rng.gen_range(0.25..0.9)],
        [rng.gen_range(0.005..0.05), rng.gen_range(0.005..0.05)],
    )
    .unwrap();
    let su = SuConfig::new(rng.gen_range(0.5..3.0), rng.gen_range(0.2..1.2)).unwrap();
    (means, pu, su)
}

/// Random configuration under which both primary links admit secondary
/// transmission (positive power caps).
pub fn random_feasible_system(rng: &mut ChaCha8Rng) -> (ChannelMeans, PuConfig, SuConfig) {
    loop {
        let (means, pu, su) = random_system(rng);
        let k = underlay_core::design_acsi::DesignConstants::new(&pu, &means);
        if k.transmission_allowed() {
            return (means, pu, su);
        }
    }
}

/// Composite Simpson rule on `[0, 1]` with `2n` panels.
pub fn simpson_unit(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let m = 2 * n;
    let h = 1.0 / m as f64;
    let mut acc = f(0.0) + f(1.0);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * h);
    }
    acc * h / 3.0
}

/// Independent semi-infinite quadrature: Simpson under `x = s*t/(1-t)`.
pub fn simpson_semi_infinite(f: impl Fn(f64) -> f64, scale: f64, n: usize) -> f64 {
    simpson_unit(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let x = scale * t / (1.0 - t);
            let jac = scale / ((1.0 - t) * (1.0 - t));
            let v = f(x) * jac;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        n,
    )
}

/// Kolmogorov-Smirnov statistic of `samples` against the CDF `cdf`.
/// Sorts the slice in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Both bound constraints hold at the given signal parameters.
pub fn bound_feasible(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
) -> bool {
    PuNode::BOTH.iter().all(|&n| {
        pu_outage_upper_bound(sig, means, pu, n) <= pu.outage_threshold[n.index()]
    })
}

/// Largest power in `(0, budget]` satisfying both bound constraints at the
/// given circularity, found by bisecting the raw constraint. `None` when
/// even a vanishing power violates it.
pub fn max_feasible_power(
    c_x: f64,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
) -> Option<f64> {
    let feasible = |p: f64| bound_feasible(SignalParams { power: p, circularity: c_x }, means, pu);
    if feasible(su.power_budget) {
        return Some(su.power_budget);
    }
    if !feasible(su.power_budget * 1e-12) {
        return None;
    }
    let (mut lo, mut hi) = (su.power_budget * 1e-12, su.power_budget);
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

pub fn su_outage_any_c(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
) -> f64 {
    if sig.circularity >= 1.0 {
        su_outage_acsi_max_improper(sig.power, means, pu, su)
    } else {
        su_outage_acsi(sig, means, pu, su)
    }
}

pub struct GridSearch {
    /// Smallest outage over the searched set.
    pub best_outage: f64,
    pub best_params: SignalParams,
    /// Smallest outage over the proper column (c = 0).
    pub proper_column_min: f64,
    /// Circularity of the argmin restricted to the uniform columns.
    pub uniform_argmin_c: f64,
    /// Spacing of the uniform circularity grid.
    pub c_spacing: f64,
}

/// Exhaustive search of the bound-feasible region on a `points x points`
/// grid: uniform circularity columns (optionally augmented with extra
/// columns), each column spanning `points` power levels up to the largest
/// feasible power, which is included exactly.
pub fn grid_search_su_outage(
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
    points: usize,
    extra_columns: &[f64],
) -> GridSearch {
    let mut columns: Vec<(f64, bool)> = (0..points)
        .map(|k| (k as f64 / (points - 1) as f64, true))
        .collect();
    columns.extend(extra_columns.iter().map(|&c| (c, false)));
    columns.sort_by(|a, b| a.0.total_cmp(&b.0));
    columns.dedup_by(|a, b| a.0 == b.0);

    let mut best = (f64::INFINITY, SignalParams::silent());
    let mut proper_min = f64::INFINITY;
    let mut uniform_best = (f64::INFINITY, 0.0);
    for &(c, uniform) in &columns {
        let Some(top) = max_feasible_power(c, means, pu, su) else {
            continue;
        };
        for row in 1..=points {
            let p = top * row as f64 / points as f64;
            let sig = SignalParams { power: p, circularity: c };
            let outage = su_outage_any_c(sig, means, pu, su);
            if outage < best.0 {
                best = (outage, sig);
            }
            if c == 0.0 {
                proper_min = proper_min.min(outage);
            }
            if uniform && outage < uniform_best.0 {
                uniform_best = (outage, c);
            }
        }
    }
    GridSearch {
        best_outage: best.0,
        best_params: best.1,
        proper_column_min: proper_min,
        uniform_argmin_c: uniform_best.1,
        c_spacing: 1.0 / (points - 1) as f64,
    }
}
