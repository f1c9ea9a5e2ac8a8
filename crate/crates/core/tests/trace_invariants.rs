mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::invariants::check_trace;
use common::reference::{random_scenario, random_scenario_on, topologies};
use vndn::apps::BeaconConfig;
use vndn::experiment::{build_simulation, report, ScenarioConfig, StrategyLevel};
use vndn::forwarder::Strategy;

fn smoke(strategy: StrategyLevel, beacons: bool) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::from_json(&format!(
        r#"{{"map": {{"type": "grid", "rows": 3, "cols": 3, "block_m": 100}},
            "duration_s": 60, "density": 1500, "n_rsus": 1, "cache_size": 100,
            "strategy": "{strategy}", "incidents": [{{"t_start_s": 10, "t_end_s": 50}}], "seed": 5}}"#
    ))
    .unwrap();
    if beacons {
        cfg.beacon = Some(BeaconConfig::default());
        cfg.emergency_ratio = 0.2;
    }
    cfg
}

#[test]
fn small_scenarios_keep_the_trace_rules() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut cases: Vec<_> = (0..150).map(|_| random_scenario(&mut rng)).collect();
    for (_, _, layout) in topologies() {
        for strategy in [Strategy::Multicast, Strategy::MulticastVanet] {
            cases.push(random_scenario_on(&mut rng, &layout, strategy));
        }
    }
    let mut with_data = 0;
    for (k, sc) in cases.iter().enumerate() {
        let mut sim = sc.build_sim();
        sim.run().unwrap();
        let trace = sim.take_trace();
        check_trace(&trace, sc.strategy == Strategy::MulticastVanet).map_err(|e| format!("case {k}: {e}")).unwrap();
        with_data += usize::from(trace.iter().any(|l| l.contains(" out data ")));

        // every tracked interest ends exactly once when the run outlives it
        let t = sim.tally_total();
        let expressed: u64 = sc.nodes.iter().map(|n| n.schedule.len() as u64).sum();
        assert_eq!(t.expressed, expressed, "case {k}");
        if sc.duration_ms == 3000 {
            assert_eq!(t.resolved(), t.expressed, "case {k}: {t:?}");
        } else {
            assert!(t.resolved() <= t.expressed, "case {k}");
        }

        let nodes = sc.nodes.len() as u64;
        assert!(sim.frames_delivered() <= sim.frames_sent() * (nodes - 1));
    }
    assert!(with_data > 20, "only {with_data} cases moved any Data");
}

#[test]
fn full_runs_keep_the_trace_rules() {
    for strategy in [StrategyLevel::Multicast, StrategyLevel::MulticastVanet] {
        for beacons in [false, true] {
            let cfg = smoke(strategy, beacons);
            let mut sim = build_simulation(&cfg, true).unwrap();
            sim.run().unwrap();
            let r = report(&cfg, &sim);
            let trace = sim.take_trace();
            check_trace(&trace, strategy == StrategyLevel::MulticastVanet)
                .map_err(|e| format!("{strategy} beacons={beacons}: {e}"))
                .unwrap();
            assert!(r.total_packets > 100);
            let sent = trace.iter().filter(|l| l.ends_with(" sent") && l.contains(" wireless out ")).count();
            assert_eq!(sent as u64, r.frames_sent);
            assert!(r.app_data + r.app_nacks + r.app_timeouts <= r.app_interests);
            if strategy == StrategyLevel::MulticastVanet {
                assert_eq!(r.nacks_sent, 0);
            }
            if beacons {
                assert!(trace.iter().any(|l| l.contains(" /localhop/")));
            }
        }
    }
}

#[test]
fn beacon_only_runs_move_no_data() {
    let mut cfg = smoke(StrategyLevel::None, true);
    cfg.strategy = StrategyLevel::None;
    let mut sim = build_simulation(&cfg, true).unwrap();
    sim.run().unwrap();
    let r = report(&cfg, &sim);
    let trace = sim.take_trace();
    check_trace(&trace, false).unwrap();
    assert!(r.interests_sent > 100);
    assert_eq!(r.data_sent, 0);
    assert_eq!(r.nacks_sent, 0);
    assert!(!trace.iter().any(|l| l.contains(" data ")));
}

#[test]
fn checker_rejects_broken_traces() {
    let relay = vec![
        "1.000 0 app in interest /localhop/b/1 7 forwarded".to_string(),
        "1.000 0 wireless out interest /localhop/b/1 7 sent".to_string(),
        "1.200 1 wireless in interest /localhop/b/1 7 forwarded".to_string(),
        "1.200 1 wireless out interest /localhop/b/1 7 sent".to_string(),
    ];
    assert!(check_trace(&relay[..2], true).is_ok());
    assert!(check_trace(&relay, true).unwrap_err().contains("localhop"));

    let stray = vec!["2.000 3 wireless out data /service/a/1 - sent".to_string()];
    assert!(check_trace(&stray, false).unwrap_err().contains("without"));
    let licensed = vec![
        "1.000 3 wireless in interest /service/a 4 cs_hit".to_string(),
        "2.000 3 wireless out data /service/a/1 - sent".to_string(),
    ];
    assert!(check_trace(&licensed, false).is_ok());

    let nack = vec!["2.000 3 wireless out nack /service/a/1 4 sent".to_string()];
    assert!(check_trace(&nack, false).is_ok());
    assert!(check_trace(&nack, true).is_err());
}
