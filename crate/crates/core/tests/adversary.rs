mod common;

use std::collections::BTreeSet;

use common::{brute_neighborhood, brute_structural_set};
use upir_core::adversary::{
    attack_campaign, attack_until_identified, attack_until_identified_with, intersection_attack,
    intersection_attack_observed_by, LiveAttackOptions, Observer,
};
use upir_core::anonymity::Mode;
use upir_core::constructions::{fano_plane, pappus, pentagon};
use upir_core::par::Strategy;
use upir_core::sim::{init_community, run, Community, Protocol, QueryId, QueryModel};
use upir_core::Error;

#[test]
fn fano_upir1_full_neighborhood_identifies_owner() {
    let f = fano_plane();
    let trace = run(init_community(&f, QueryModel::heavy_repeater(5, 0.3), 2).unwrap(), Protocol::Upir1, 400).unwrap();
    let report = intersection_attack(&f, &trace, Community::repeated_query_id(5), Mode::Open).unwrap();
    assert_eq!(report.observed_proxies, brute_neighborhood(&f, 5, Mode::Open));
    assert_eq!(report.candidate_set, BTreeSet::from([5]));
    assert_eq!(report.confusion_achieved, 1);
    assert_eq!(report.true_owner, Some(5));
    assert_eq!(report.owner_in_candidates, Some(true));
}

#[test]
fn pappus_upir1_stops_at_the_group() {
    let td = pappus().unwrap();
    let c = td.config();
    let trace = run(init_community(c, QueryModel::heavy_repeater(4, 0.0), 6).unwrap(), Protocol::Upir1, 400).unwrap();
    let report = intersection_attack(c, &trace, Community::repeated_query_id(4), Mode::Open).unwrap();
    assert_eq!(report.observed_proxies.len(), 6);
    assert_eq!(report.candidate_set, BTreeSet::from([3, 4, 5]));
    assert_eq!(report.candidate_set, report.structural_bound);
}

#[test]
fn fano_upir2_never_narrows() {
    let f = fano_plane();
    let protocol = Protocol::upir2_calibrated(&f);
    let trace = run(init_community(&f, QueryModel::heavy_repeater(0, 0.0), 3).unwrap(), protocol, 300).unwrap();
    let report = intersection_attack(&f, &trace, Community::repeated_query_id(0), Mode::Closed).unwrap();
    assert_eq!(report.confusion_achieved, 7);
}

#[test]
fn unknown_query_rejected() {
    let f = fano_plane();
    let trace = run(init_community(&f, QueryModel::heavy_repeater(0, 0.0), 3).unwrap(), Protocol::Upir1, 30).unwrap();
    assert!(matches!(
        intersection_attack(&f, &trace, QueryId(999), Mode::Open),
        Err(Error::UnknownQuery(999))
    ));
}

#[test]
fn colluders_see_only_their_own_forwards() {
    let f = fano_plane();
    let trace = run(init_community(&f, QueryModel::heavy_repeater(0, 0.0), 9).unwrap(), Protocol::Upir1, 400).unwrap();
    let colluders = BTreeSet::from([1, 2]);
    let report = intersection_attack_observed_by(
        &f,
        &trace,
        Community::repeated_query_id(0),
        Mode::Open,
        &Observer::Colluding(colluders.clone()),
    )
    .unwrap();
    assert_eq!(report.observed_proxies, colluders);
    // N(1) ∩ N(2) in the Fano plane: everything except 1 and 2
    let expected: BTreeSet<usize> = (0..7).filter(|p| !colluders.contains(p)).collect();
    assert_eq!(report.candidate_set, expected);
    assert_eq!(report.owner_in_candidates, Some(true));
}

#[test]
fn live_attack_examples() {
    let f = fano_plane();
    let run_fano = attack_until_identified(&f, Protocol::Upir1, 2, 500, 17).unwrap();
    assert_eq!(run_fano.terminal_confusion(), 1);
    assert!(run_fano.steps_used <= 500);

    let td = pappus().unwrap();
    let run_td = attack_until_identified(td.config(), Protocol::Upir1, 0, 500, 17).unwrap();
    assert_eq!(run_td.terminal_confusion(), 3);

    let pent = pentagon();
    let x = 1.0 / 3.0;
    let run_pent = attack_until_identified(&pent, Protocol::Upir2 { self_submission: x }, 1, 500, 17).unwrap();
    assert_eq!(run_pent.terminal_confusion(), 1);
    assert_eq!(run_pent.report.candidate_set, BTreeSet::from([1]));
}

#[test]
fn trajectory_is_anti_monotone_and_sound() {
    let td = pappus().unwrap();
    let c = td.config();
    for seed in 0..20 {
        let live = attack_until_identified_with(
            c,
            Protocol::Upir1,
            7,
            400,
            seed,
            &LiveAttackOptions { background: 0.5, ..Default::default() },
        )
        .unwrap();
        let counts: Vec<usize> = live.trajectory.iter().map(|p| p.candidate_count).collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "seed {seed}: {counts:?}");
        assert!(live.report.candidate_set.contains(&7));
        assert!(live.report.candidate_set.is_superset(&brute_structural_set(c, 7, Mode::Open)));
        if live.full_neighborhood_observed {
            assert_eq!(live.report.candidate_set, brute_structural_set(c, 7, Mode::Open));
        }
    }
}

#[test]
fn patience_bounds_the_run() {
    let f = fano_plane();
    let live = attack_until_identified_with(
        &f,
        Protocol::upir2_calibrated(&f),
        0,
        10_000,
        1,
        &LiveAttackOptions { patience: Some(25), ..Default::default() },
    )
    .unwrap();
    // the candidate set never shrinks under UPIR 2 on a linear space
    assert_eq!(live.steps_used, 25);
}

#[test]
fn campaign_strategies_agree() {
    let td = pappus().unwrap();
    let seeds: Vec<u64> = (0..16).collect();
    let opts = LiveAttackOptions::default();
    let seq = attack_campaign(td.config(), Protocol::Upir1, 0, 300, &seeds, &opts, Strategy::Sequential).unwrap();
    let par = attack_campaign(td.config(), Protocol::Upir1, 0, 300, &seeds, &opts, Strategy::Parallel).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq.iter().map(|l| l.seed).collect::<Vec<_>>(), seeds);
}
