//! Direct-link CSI properties: distribution of the interference sum, gating
//! behavior, equivalence of the merit ranking with direct outage evaluation,
//! monotonicity along the cap, and the power-saving / energy-efficiency /
//! primary-protection relations, each against an independent oracle.

mod common;

use common::*;
use rand::Rng;
use underlay_core::design_acsi::{
    algorithm_ii, improper_power_cap, interval_candidates, DesignConstants,
};
use underlay_core::design_idlcsi::*;
use underlay_core::montecarlo::{empirical_dl_metrics, sample_channel_draw, SeedSpec};
use underlay_core::outage::pu_outage_exact_numeric;
use underlay_core::{model, EeConfig, PuNode, SignalParams, SuConfig};

#[test]
fn interference_pdf_integrates_to_one() {
    let (means, pu, _) = baseline();
    let distinct = InterferenceSumStats::new(&pu, &means);
    let mass = simpson_semi_infinite(
        |z| interference_sum_pdf(z, &distinct),
        distinct.scaled[0] + distinct.scaled[1],
        40_000,
    );
    assert!((mass - 1.0).abs() < 1e-8, "hypoexponential mass {mass}");

    let equal = InterferenceSumStats { scaled: [2.5, 2.5] };
    let mass_e = simpson_semi_infinite(|z| interference_sum_pdf(z, &equal), 5.0, 40_000);
    assert!((mass_e - 1.0).abs() < 1e-8, "erlang mass {mass_e}");
}

#[test]
fn near_equal_means_switch_to_erlang_without_blowup() {
    let a = 2.0;
    for eps in [0.0, 1e-13, 1e-10] {
        let stats = InterferenceSumStats {
            scaled: [a, a * (1.0 + eps)],
        };
        for &z in &[0.1, 1.0, 5.0] {
            let v = interference_sum_pdf(z, &stats);
            let erlang = z * (-z / a).exp() / (a * a);
            assert!(
                (v - erlang).abs() < 1e-6 * erlang.max(1e-30),
                "eps={eps} z={z}: {v} vs {erlang}"
            );
        }
    }
}

#[test]
fn sampled_interference_sum_matches_numeric_cdf() {
    let (means, pu, _) = baseline();
    // make the two scaled means distinct
    let mut pu = pu;
    pu.power = [1.0, 1.7];
    let stats = InterferenceSumStats::new(&pu, &means);
    assert!(!stats.is_erlang());

    // CDF via cumulative numeric integration of the density on a fine grid
    let z_max = 60.0 * stats.scaled[0].max(stats.scaled[1]);
    let cells = 1 << 16;
    let h = z_max / cells as f64;
    let mut cum = Vec::with_capacity(cells + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    let mut prev = interference_sum_pdf(0.0, &stats);
    for k in 1..=cells {
        let z = k as f64 * h;
        let cur = interference_sum_pdf(z, &stats);
        acc += 0.5 * (prev + cur) * h;
        cum.push(acc);
        prev = cur;
    }
    let cdf = |z: f64| {
        if z <= 0.0 {
            0.0
        } else if z >= z_max {
            1.0
        } else {
            let t = z / h;
            let i = t as usize;
            let frac = t - i as f64;
            cum[i] * (1.0 - frac) + cum[i + 1] * frac
        }
    };

    let n = 1_000_000u64;
    let seed = SeedSpec::new(50, 0);
    let mut sums: Vec<f64> = (0..n)
        .map(|idx| {
            let d = sample_channel_draw(&means, seed, idx);
            pu.power[0] * d.i_p[0] + pu.power[1] * d.i_p[1]
        })
        .collect();
    let d = ks_statistic(&mut sums, cdf);
    assert!(d < 0.002, "KS statistic {d}");
}

#[test]
fn gated_outage_is_one_when_condition_fails() {
    let (means, pu, su) = baseline();
    let sig = SignalParams::new(0.4, 0.6).unwrap();
    let gamma_thr = model::rate_threshold(su.target_rate);
    let threshold = underlay_core::outage::psi_s(sig, gamma_thr) / sig.one_minus_c2();
    let gamma_s = threshold * 0.999;
    assert!(!transmission_condition(gamma_s, sig, &su));
    assert_eq!(su_outage_dl(gamma_s, sig, &means, &pu, &su), 1.0);

    // empirically: every interference realization is in outage
    let seed = SeedSpec::new(51, 0);
    for idx in 0..10_000u64 {
        let mut d = sample_channel_draw(&means, seed, idx);
        d.gamma_s = gamma_s;
        assert!(model::su_rate(&d, &pu, sig) < su.target_rate);
    }
}

#[test]
fn conditional_outage_matches_interference_sampling() {
    let (means, pu, su) = baseline();
    let sig = SignalParams::new(0.5, 0.5).unwrap();
    // above the gating threshold but weak enough that interference still
    // produces a sampling-resolvable outage
    let gamma_s = 10.0;
    assert!(transmission_condition(gamma_s, sig, &su));
    let analytic = su_outage_dl(gamma_s, sig, &means, &pu, &su);
    assert!(analytic > 1e-3, "operating point too reliable to sample");
    let n = 1_000_000u64;
    let seed = SeedSpec::new(52, 0);
    let mut outages = 0u64;
    for idx in 0..n {
        let mut d = sample_channel_draw(&means, seed, idx);
        d.gamma_s = gamma_s;
        if model::su_rate(&d, &pu, sig) < su.target_rate {
            outages += 1;
        }
    }
    let est = outages as f64 / n as f64;
    let sigma = (est * (1.0 - est) / n as f64).sqrt();
    assert!(
        (analytic - est).abs() <= 3.0 * sigma,
        "analytic {analytic} vs sampled {est} +- {sigma}"
    );
}

#[test]
fn merit_ranking_agrees_with_direct_outage_ranking() {
    let mut rng = test_rng(0xD3);
    for trial in 0..50 {
        let (means, pu, su) = random_feasible_system(&mut rng);
        let k = DesignConstants::new(&pu, &means);
        let cands = interval_candidates(&k, &su);
        // an observed direct link far above every candidate's threshold
        let gamma_s = 1e7;
        let decision = design_idl(gamma_s, &pu, &su, &means, SignalingMode::Improper);
        assert!(decision.transmit, "trial {trial}: gate failed at huge CNR");
        let chosen = su_outage_dl(gamma_s, decision.params, &means, &pu, &su);
        let best = cands
            .iter()
            .map(|c| su_outage_dl(gamma_s, c.params, &means, &pu, &su))
            .fold(f64::INFINITY, f64::min);
        assert!(
            (chosen - best).abs() <= 1e-12,
            "trial {trial}: merit pick {chosen} vs best direct {best}"
        );
    }
}

#[test]
fn conditional_outage_is_monotone_in_merit() {
    // the conditional outage, at any fixed observed CNR, never increases
    // as the merit grows across the candidate set
    let mut rng = test_rng(0xD4);
    for _ in 0..20 {
        let (means, pu, su) = random_feasible_system(&mut rng);
        let k = DesignConstants::new(&pu, &means);
        let gamma_thr = model::rate_threshold(su.target_rate);
        let mut ranked: Vec<(f64, SignalParams)> = interval_candidates(&k, &su)
            .iter()
            .map(|c| {
                let u = c.params.one_minus_c2();
                let merit =
                    c.params.power * ((1.0 + gamma_thr * u).sqrt() + 1.0) / gamma_thr;
                (merit, c.params)
            })
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        let gamma_s = 1e7;
        let mut prev = f64::INFINITY;
        for (_, params) in ranked {
            let outage = su_outage_dl(gamma_s, params, &means, &pu, &su);
            assert!(outage <= prev + 1e-12, "outage rose with the merit");
            prev = outage;
        }
    }
}

#[test]
fn cap_conditional_outage_follows_benefit_predicate() {
    // discrete derivative of the conditional outage along the cap matches
    // the same predicate as the average-CSI design, and the sensitivity
    // factor of the proof stays non-negative
    let mut rng = test_rng(0xD5);
    for _ in 0..20 {
        let (means, pu, su) = random_feasible_system(&mut rng);
        let k = DesignConstants::new(&pu, &means);
        let stats = InterferenceSumStats::new(&pu, &means);
        for node in PuNode::BOTH {
            let n = k.node(node);
            let predicate = underlay_core::design_acsi::improper_benefit_condition(&k, &su, node);
            // an observed CNR above the gating threshold across the grid
            let gamma_thr = model::rate_threshold(su.target_rate);
            let worst_threshold = (0..200)
                .map(|s| {
                    let c = s as f64 * 0.995 / 199.0;
                    let sig = SignalParams {
                        power: improper_power_cap(c, n),
                        circularity: c,
                    };
                    underlay_core::outage::psi_s(sig, gamma_thr) / sig.one_minus_c2()
                })
                .fold(0.0f64, f64::max);
            let gamma_s = worst_threshold * 10.0;
            let mut prev = f64::INFINITY;
            for step in 0..200 {
                let c = step as f64 * 0.995 / 199.0;
                let sig = SignalParams {
                    power: improper_power_cap(c, n),
                    circularity: c,
                };
                let outage = su_outage_dl(gamma_s, sig, &means, &pu, &su);
                if step > 0 {
                    if predicate {
                        assert!(outage <= prev + 1e-12, "rose under predicate at c={c}");
                    } else {
                        assert!(outage >= prev - 1e-12, "fell without predicate at c={c}");
                    }
                }
                prev = outage;

                // sensitivity factor of the monotonicity proof
                let z = zeta(gamma_s, sig, &su);
                let [a, b] = stats.scaled;
                let m = if stats.is_erlang() {
                    z / (a * a) * (-z / a).exp()
                } else {
                    ((-z / a).exp() - (-z / b).exp()) / (a - b)
                };
                assert!(m >= 0.0, "sensitivity factor negative at c={c}");
            }
        }
    }
}

#[test]
fn time_average_of_gated_design_matches_average_design() {
    let (means, pu, su) = baseline();
    let ee = EeConfig::new(5.0, 1.0).unwrap();
    let acsi = algorithm_ii(&pu, &su, &means);
    let metrics = empirical_dl_metrics(
        |gamma_s| design_idl(gamma_s, &pu, &su, &means, SignalingMode::Improper),
        &means,
        &pu,
        &su,
        &ee,
        200_000,
        1,
        SeedSpec::new(53, 0),
    );
    assert!(
        (metrics.su_outage.estimate - acsi.su_outage).abs() <= 3.0 * metrics.su_outage.std_err,
        "time-averaged {} vs average-design {}",
        metrics.su_outage.estimate,
        acsi.su_outage
    );
}

#[test]
fn power_saving_matches_idle_fraction() {
    let (means, pu, su) = baseline();
    let ee = EeConfig::new(5.0, 1.0).unwrap();
    let decision = design_idl(1e9, &pu, &su, &means, SignalingMode::Improper);
    assert!(decision.transmit);
    let analytic = power_saving_probability(decision.params, &means, &su);
    let metrics = empirical_dl_metrics(
        |gamma_s| design_idl(gamma_s, &pu, &su, &means, SignalingMode::Improper),
        &means,
        &pu,
        &su,
        &ee,
        200_000,
        1,
        SeedSpec::new(54, 0),
    );
    assert!(
        (analytic - metrics.power_saving.estimate).abs() <= 3.0 * metrics.power_saving.std_err,
        "analytic saving {analytic} vs {}",
        metrics.power_saving.estimate
    );
}

#[test]
fn zero_rate_never_saves_power() {
    let (means, pu, _) = baseline();
    let su = SuConfig::new(1.0, 0.0).unwrap();
    let ee = EeConfig::new(5.0, 1.0).unwrap();
    let metrics = empirical_dl_metrics(
        |gamma_s| design_idl(gamma_s, &pu, &su, &means, SignalingMode::Improper),
        &means,
        &pu,
        &su,
        &ee,
        20_000,
        1,
        SeedSpec::new(55, 0),
    );
    assert_eq!(metrics.power_saving.estimate, 0.0);
}

#[test]
fn ee_identity_holds_across_random_configs() {
    let mut rng = test_rng(0xEE);
    for _ in 0..20 {
        let (means, pu, su) = random_feasible_system(&mut rng);
        let ee = EeConfig::new(rng.gen_range(2.0..8.0), rng.gen_range(0.1..2.0)).unwrap();
        let sig = SignalParams {
            power: rng.gen_range(0.05..su.power_budget),
            circularity: rng.gen_range(0.0..1.0),
        };
        let ratio = avg_ee_dl(sig, &means, &pu, &su, &ee) / avg_ee_acsi(sig, &means, &pu, &su, &ee);
        let saving = power_saving_probability(sig, &means, &su);
        assert!(
            (ratio - 1.0 / (1.0 - saving)).abs() < 1e-12,
            "gain identity residual {}",
            (ratio - 1.0 / (1.0 - saving)).abs()
        );
    }
}

#[test]
fn ee_estimates_match_energy_accounting() {
    let (means, pu, su) = baseline();
    let ee = EeConfig::new(5.0, 1.0).unwrap();
    let design = |gamma_s: f64| design_idl(gamma_s, &pu, &su, &means, SignalingMode::Improper);
    let decision = design(1e9);
    assert!(decision.transmit);
    let metrics = empirical_dl_metrics(
        design,
        &means,
        &pu,
        &su,
        &ee,
        200_000,
        1,
        SeedSpec::new(56, 0),
    );
    let analytic_dl = avg_ee_dl(decision.params, &means, &pu, &su, &ee);
    assert!(
        (analytic_dl - metrics.energy_efficiency.estimate)
            <= 3.0 * metrics.energy_efficiency.std_err,
        "analytic EE {analytic_dl} vs {} +- {}",
        metrics.energy_efficiency.estimate,
        metrics.energy_efficiency.std_err
    );

    // empirical gain vs the saving identity, each side estimated
    let su_est = underlay_core::montecarlo::empirical_su_outage(
        decision.params,
        &means,
        &pu,
        &su,
        200_000,
        SeedSpec::new(56, 1),
    );
    let ee_acsi_emp = su.target_rate * (1.0 - su_est.estimate)
        / (ee.kappa_pa * decision.params.power + ee.circuit_power);
    let gain_emp = metrics.energy_efficiency.estimate / ee_acsi_emp;
    let gain_identity = 1.0 / (1.0 - metrics.power_saving.estimate);
    let rel_sigma = 3.0
        * (metrics.energy_efficiency.std_err / metrics.energy_efficiency.estimate
            + su_est.std_err / (1.0 - su_est.estimate)
            + metrics.power_saving.std_err / (1.0 - metrics.power_saving.estimate));
    assert!(
        (gain_emp / gain_identity - 1.0).abs() <= rel_sigma,
        "gain {gain_emp} vs identity {gain_identity} (tol {rel_sigma})"
    );
}

#[test]
fn gated_primary_outage_never_exceeds_always_on() {
    let (mut means, pu, su) = baseline();
    let mut gaps = Vec::new();
    for gamma_s_db in [10.0, 15.0, 20.0, 25.0] {
        means.gamma_s = db(gamma_s_db);
        let decision = design_idl(1e9, &pu, &su, &means, SignalingMode::Improper);
        assert!(decision.transmit);
        let sig = decision.params;
        let always = pu_outage_exact_numeric(sig, &means, &pu, PuNode::N1, 1e-7).unwrap();
        let gated = pu_outage_dl(sig, &means, &pu, &su, PuNode::N1, 1e-7).unwrap();
        assert!(gated <= always + 1e-9, "gated {gated} above always-on {always}");
        gaps.push(always - gated);
    }
    // stronger direct links save less power, so the protection shrinks
    for pair in gaps.windows(2) {
        assert!(
            pair[1] <= pair[0] + 1e-12,
            "primary protection did not shrink with the direct link: {gaps:?}"
        );
    }
}

#[test]
fn gated_primary_outage_matches_sampling() {
    let (means, pu, su) = baseline();
    let ee = EeConfig::new(5.0, 1.0).unwrap();
    let design = |gamma_s: f64| design_idl(gamma_s, &pu, &su, &means, SignalingMode::Improper);
    let decision = design(1e9);
    let metrics = empirical_dl_metrics(
        design,
        &means,
        &pu,
        &su,
        &ee,
        200_000,
        1,
        SeedSpec::new(57, 0),
    );
    for node in PuNode::BOTH {
        let analytic = pu_outage_dl(decision.params, &means, &pu, &su, node, 1e-7).unwrap();
        let est = &metrics.pu_outage[node.index()];
        assert!(
            (analytic - est.estimate).abs() <= 3.0 * est.std_err,
            "{node:?}: analytic {analytic} vs {} +- {}",
            est.estimate,
            est.std_err
        );
    }
}

#[test]
fn proper_gated_design_reuses_proper_power() {
    let (means, pu, su) = baseline();
    let proper = underlay_core::design_acsi::algorithm_i(&pu, &su, &means);
    let decision = design_idl(1e9, &pu, &su, &means, SignalingMode::Proper);
    assert!(decision.transmit);
    assert_eq!(decision.params, proper.params);
    // the quoted conditional outage is the transmit-branch value
    let expected = su_outage_dl(1e9, decision.params, &means, &pu, &su);
    assert_eq!(decision.outage_given_transmit, expected);
}

#[test]
fn proper_branches_of_conditional_outage() {
    // the proper and maximally improper conditional outages follow from the
    // general margin; spot-check both reductions
    let (means, pu, su) = baseline();
    let stats = InterferenceSumStats::new(&pu, &means);
    let gamma_s = means.gamma_s;

    let proper = SignalParams::new(0.8, 0.0).unwrap();
    let zeta_proper = proper.power * gamma_s / (su.target_rate.exp2() - 1.0) - 1.0;
    assert!((zeta(gamma_s, proper, &su) - zeta_proper).abs() < 1e-9);
    assert!(
        (su_outage_dl(gamma_s, proper, &means, &pu, &su) - stats.tail(zeta_proper)).abs() < 1e-12
    );

    let improper = SignalParams::new(0.8, 1.0).unwrap();
    let gamma_thr = model::rate_threshold(su.target_rate);
    let zeta_improper = 2.0 * improper.power * gamma_s / gamma_thr - 1.0;
    assert!((zeta(gamma_s, improper, &su) - zeta_improper).abs() < 1e-9);
    assert!(
        (su_outage_dl(gamma_s, improper, &means, &pu, &su) - stats.tail(zeta_improper)).abs()
            < 1e-12
    );
}
