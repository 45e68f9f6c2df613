//! Deterministic, seedable Monte Carlo oracle for every probability and
//! expectation the analytic modules compute.
//!
//! Sampling is counter-based: draw `index` of stream `(seed, stream)` is
//! generated by positioning a ChaCha cipher at a fixed word offset, so any
//! draw is addressable in O(1) and estimates are bit-identical no matter how
//! the index range is partitioned across threads. Aggregation sums fixed-size
//! chunk partials in chunk order, which keeps floating-point reductions
//! deterministic under the `parallel` feature as well.

use crate::design_idlcsi::DlDecision;
use crate::model::{pu_rate, su_rate, ChannelDraw, ChannelMeans, EeConfig, PuConfig, PuNode, SignalParams, SuConfig};
use rand::distributions::OpenClosed01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Draws per work chunk; also the partitioning unit of the parallel path.
const DRAWS_PER_CHUNK: u64 = 1 << 14;

/// Randomness consumed per channel draw: nine exponentials, two 32-bit
/// words each.
const WORDS_PER_DRAW: u128 = 18;

/// Identifies a reproducible sample stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }
}

/// An empirical probability or mean with its sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub n: u64,
    pub std_err: f64,
}

impl McEstimate {
    /// Estimate of a probability from a success count.
    pub fn from_successes(successes: u64, n: u64) -> Self {
        assert!(n >= 1, "estimate needs at least one sample");
        let p = successes as f64 / n as f64;
        Self {
            estimate: p,
            n,
            std_err: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }

    /// Estimate of a mean from first and second moments.
    pub fn from_moments(sum: f64, sum_sq: f64, n: u64) -> Self {
        if n == 0 {
            return Self {
                estimate: 0.0,
                n: 0,
                std_err: 0.0,
            };
        }
        let mean = sum / n as f64;
        let var = if n > 1 {
            ((sum_sq - sum * sum / n as f64) / (n - 1) as f64).max(0.0)
        } else {
            0.0
        };
        Self {
            estimate: mean,
            n,
            std_err: (var / n as f64).sqrt(),
        }
    }
}

/// Sequential generator positioned at an absolute draw index of a stream.
struct DrawSampler {
    rng: ChaCha8Rng,
}

impl DrawSampler {
    fn positioned(seed: SeedSpec, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.seed);
        rng.set_stream(seed.stream);
        rng.set_word_pos(index as u128 * WORDS_PER_DRAW);
        Self { rng }
    }

    #[inline]
    fn exponential(&mut self, mean: f64) -> f64 {
        // inverse CDF on (0, 1]; zero is excluded so the variate is finite
        let u: f64 = self.rng.sample(OpenClosed01);
        -mean * u.ln()
    }

    fn next_draw(&mut self, means: &ChannelMeans) -> ChannelDraw {
        ChannelDraw {
            gamma_p: [
                self.exponential(means.gamma_p[0]),
                self.exponential(means.gamma_p[1]),
            ],
            gamma_s: self.exponential(means.gamma_s),
            i_p: [
                self.exponential(means.i_p[0]),
                self.exponential(means.i_p[1]),
            ],
            i_s: [
                self.exponential(means.i_s[0]),
                self.exponential(means.i_s[1]),
            ],
            upsilon_p: [
                self.exponential(means.upsilon_p[0]),
                self.exponential(means.upsilon_p[1]),
            ],
        }
    }
}

/// The draw at absolute `index` of the given stream. Deterministic, and
/// identical to what the bulk estimators consume at the same index.
pub fn sample_channel_draw(means: &ChannelMeans, seed: SeedSpec, index: u64) -> ChannelDraw {
    DrawSampler::positioned(seed, index).next_draw(means)
}

/// Maps chunk `(start, len)` ranges of `0..n` through `f` and returns the
/// results in chunk order.
fn map_chunks<T: Send>(
    n: u64,
    per_chunk: u64,
    sequential: bool,
    f: impl Fn(u64, u64) -> T + Sync,
) -> Vec<T> {
    let n_chunks = n.div_ceil(per_chunk);
    let run = |c: u64| {
        let start = c * per_chunk;
        f(start, per_chunk.min(n - start))
    };
    #[cfg(feature = "parallel")]
    if !sequential {
        return (0..n_chunks).into_par_iter().map(run).collect();
    }
    let _ = sequential;
    (0..n_chunks).map(run).collect()
}

fn count_outages(
    means: &ChannelMeans,
    n: u64,
    seed: SeedSpec,
    sequential: bool,
    in_outage: impl Fn(&ChannelDraw) -> bool + Sync,
) -> u64 {
    map_chunks(n, DRAWS_PER_CHUNK, sequential, |start, len| {
        let mut sampler = DrawSampler::positioned(seed, start);
        let mut count = 0u64;
        for _ in 0..len {
            if in_outage(&sampler.next_draw(means)) {
                count += 1;
            }
        }
        count
    })
    .into_iter()
    .sum()
}

fn su_outage_impl(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
    n: u64,
    seed: SeedSpec,
    sequential: bool,
) -> McEstimate {
    let count = count_outages(means, n, seed, sequential, |draw| {
        su_rate(draw, pu, sig) < su.target_rate
    });
    McEstimate::from_successes(count, n)
}

fn pu_outage_impl(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    node: PuNode,
    n: u64,
    seed: SeedSpec,
    sequential: bool,
) -> McEstimate {
    let target = pu.target_rate[node.index()];
    let count = count_outages(means, n, seed, sequential, |draw| {
        pu_rate(draw, pu, sig, node) < target
    });
    McEstimate::from_successes(count, n)
}

/// Empirical secondary outage probability over `n` independent draws.
pub fn empirical_su_outage(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
    n: u64,
    seed: SeedSpec,
) -> McEstimate {
    su_outage_impl(sig, means, pu, su, n, seed, false)
}

/// Empirical outage probability of the given primary link.
pub fn empirical_pu_outage(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    node: PuNode,
    n: u64,
    seed: SeedSpec,
) -> McEstimate {
    pu_outage_impl(sig, means, pu, node, n, seed, false)
}

/// Forced-sequential variant of [`empirical_su_outage`]; same result
/// bit-for-bit. Exists for the parallel-vs-sequential benchmarks and the
/// determinism tests.
#[doc(hidden)]
pub fn empirical_su_outage_seq(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
    n: u64,
    seed: SeedSpec,
) -> McEstimate {
    su_outage_impl(sig, means, pu, su, n, seed, true)
}

/// Forced-sequential variant of [`empirical_pu_outage`].
#[doc(hidden)]
pub fn empirical_pu_outage_seq(
    sig: SignalParams,
    means: &ChannelMeans,
    pu: &PuConfig,
    node: PuNode,
    n: u64,
    seed: SeedSpec,
) -> McEstimate {
    pu_outage_impl(sig, means, pu, node, n, seed, true)
}

/// Joint estimates of the direct-link-gated system: time-averaged secondary
/// outage, power-saving probability, average energy efficiency conditioned
/// on transmission, and the primary outage pair.
#[derive(Debug, Clone, Copy)]
pub struct DlMetrics {
    pub su_outage: McEstimate,
    pub power_saving: McEstimate,
    pub energy_efficiency: McEstimate,
    pub pu_outage: [McEstimate; 2],
}

#[derive(Default, Clone, Copy)]
struct DlPartial {
    su_outage_count: u64,
    saving_count: u64,
    transmit_count: u64,
    ee_sum: f64,
    ee_sum_sq: f64,
    pu_outage_count: [u64; 2],
}

/// Runs the gated system over `n_outer` observed direct-link draws with
/// `inner` interference realizations each, applying `decide` to every
/// observation.
///
/// Outer group `g` consumes draws `g*inner..(g+1)*inner` of the stream; the
/// observed direct-link CNR is the one of the group's first draw. The
/// standard errors of the probability estimates assume independent samples,
/// which holds exactly for `inner == 1`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_dl_metrics(
    decide: impl Fn(f64) -> DlDecision + Sync,
    means: &ChannelMeans,
    pu: &PuConfig,
    su: &SuConfig,
    ee: &EeConfig,
    n_outer: u64,
    inner: u64,
    seed: SeedSpec,
) -> DlMetrics {
    assert!(inner >= 1, "need at least one interference draw per group");
    let groups_per_chunk = (DRAWS_PER_CHUNK / inner).max(1);
    let partials = map_chunks(n_outer, groups_per_chunk, false, |start, len| {
        let mut sampler = DrawSampler::positioned(seed, start * inner);
        let mut part = DlPartial::default();
        for _ in 0..len {
            let mut draws_left = inner;
            let first = sampler.next_draw(means);
            draws_left -= 1;
            let gamma_s = first.gamma_s;
            let decision = decide(gamma_s);
            let sig = if decision.transmit {
                decision.params
            } else {
                SignalParams::silent()
            };

            if !decision.transmit {
                part.saving_count += 1;
            }
            let mut successes = 0u64;
            let mut handle = |draw: &ChannelDraw| {
                let mut d = *draw;
                d.gamma_s = gamma_s;
                let ok = decision.transmit && su_rate(&d, pu, sig) >= su.target_rate;
                if ok {
                    successes += 1;
                } else {
                    part.su_outage_count += 1;
                }
                for node in PuNode::BOTH {
                    if pu_rate(&d, pu, sig, node) < pu.target_rate[node.index()] {
                        part.pu_outage_count[node.index()] += 1;
                    }
                }
            };
            handle(&first);
            for _ in 0..draws_left {
                let d = sampler.next_draw(means);
                handle(&d);
            }
            if decision.transmit {
                part.transmit_count += 1;
                let rate_delivered = su.target_rate * successes as f64 / inner as f64;
                let eta = rate_delivered / (ee.kappa_pa * sig.power + ee.circuit_power);
                part.ee_sum += eta;
                part.ee_sum_sq += eta * eta;
            }
        }
        part
    });

    // fixed-order combine keeps the float sums deterministic
    let mut total = DlPartial::default();
    for p in partials {
        total.su_outage_count += p.su_outage_count;
        total.saving_count += p.saving_count;
        total.transmit_count += p.transmit_count;
        total.ee_sum += p.ee_sum;
        total.ee_sum_sq += p.ee_sum_sq;
        total.pu_outage_count[0] += p.pu_outage_count[0];
        total.pu_outage_count[1] += p.pu_outage_count[1];
    }
    let n_draws = n_outer * inner;
    DlMetrics {
        su_outage: McEstimate::from_successes(total.su_outage_count, n_draws),
        power_saving: McEstimate::from_successes(total.saving_count, n_outer),
        energy_efficiency: McEstimate::from_moments(
            total.ee_sum,
            total.ee_sum_sq,
            total.transmit_count,
        ),
        pu_outage: [
            McEstimate::from_successes(total.pu_outage_count[0], n_draws),
            McEstimate::from_successes(total.pu_outage_count[1], n_draws),
        ],
    }
}
