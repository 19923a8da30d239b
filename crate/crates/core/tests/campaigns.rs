// SPDX-License-Identifier: Apache-2.0

use pesim_core::behavior::PeVector;
use pesim_core::designs::DesignId;
use pesim_core::sim::Logic;
use pesim_core::verify::{
    failure_matrix, render, CampaignConfig, FailureKind, LaEvent, PairMode, Scenario, Verifier,
};

fn verifier(d: DesignId) -> Verifier {
    Verifier::new(d, CampaignConfig::default()).unwrap()
}

fn v(s: &str) -> PeVector {
    s.parse().unwrap()
}

#[test]
fn archetypes_pass_static_exhaustive_check() {
    for d in [DesignId::RaceProne8, DesignId::ChargeShareProne8] {
        let r = verifier(d).exhaustive_equivalence().unwrap();
        assert_eq!((r.counts.total, r.counts.passed), (512, 512), "{d}");
    }
}

#[test]
fn zero_offset_race_matches_exhaustive() {
    for d in [DesignId::Robust8, DesignId::RaceProne8, DesignId::ChargeShareProne8] {
        let ver = verifier(d);
        let (ex, ex_obs) = ver.exhaustive_equivalence_with_samples().unwrap();
        let (race, race_obs) = ver.race_sweep_with_samples(&[0]).unwrap();
        assert_eq!(ex.counts.failed, 0, "{d}");
        assert_eq!(race.counts.failed, 0, "{d}");
        // Race cases: final LA 0 for ip 0..255, then final LA 1.
        for x in 0..256 {
            for (k, la) in [false, true].into_iter().enumerate() {
                assert_eq!(
                    race_obs[k * 256 + x],
                    ex_obs[2 * x + la as usize],
                    "{d} ip={x} la={la}"
                );
            }
        }
    }
}

#[test]
fn late_la_drop_leaves_stale_output_in_race_prone_design() {
    let ver = verifier(DesignId::RaceProne8);
    let sc = Scenario {
        design: DesignId::RaceProne8,
        label: "late drop".into(),
        ip_sequence: vec![PeVector::zeros(8), v("01000000")],
        la_levels: vec![false, true],
        la_schedule: vec![LaEvent {
            cycle: 1,
            offset: 3,
            value: false,
        }],
        tail: 0,
    };
    let s = ver.replay(&sc).unwrap();
    assert_eq!(s[1][1], Logic::One);
    assert_eq!(ver.golden(&sc, 1), PeVector::zeros(8));

    let robust = verifier(DesignId::Robust8);
    let sc = Scenario {
        design: DesignId::Robust8,
        la_levels: vec![false, false],
        la_schedule: vec![LaEvent {
            cycle: 1,
            offset: 3,
            value: true,
        }],
        ..sc
    };
    assert_eq!(render(&robust.replay(&sc).unwrap()[1]), "00000000");
}

#[test]
fn race_prone_stays_quiet_when_disabled() {
    let ver = verifier(DesignId::RaceProne8);
    for x in [0u64, 1, 0x80, 0xff, 0x5a] {
        let sc = Scenario {
            design: DesignId::RaceProne8,
            label: "off".into(),
            ip_sequence: vec![PeVector::from_u64(x, 8); 2],
            la_levels: vec![false; 2],
            la_schedule: Vec::new(),
            tail: 0,
        };
        assert_eq!(render(&ver.replay(&sc).unwrap()[1]), "00000000");
    }
}

#[test]
fn charge_sharing_pair_flips_output() {
    let ver = verifier(DesignId::ChargeShareProne8);
    let sc = Scenario {
        design: DesignId::ChargeShareProne8,
        label: "pair".into(),
        ip_sequence: vec![v("00001000"), PeVector::zeros(8)],
        la_levels: vec![false; 2],
        la_schedule: Vec::new(),
        tail: 0,
    };
    let s = ver.replay(&sc).unwrap();
    assert_eq!(render(&s[0]), "00001000");
    assert_eq!(s[1][4], Logic::One, "got {}", render(&s[1]));
}

#[test]
fn failures_replay_in_isolation() {
    for (d, report) in [
        (
            DesignId::ChargeShareProne8,
            verifier(DesignId::ChargeShareProne8)
                .charge_share_scan(PairMode::Random(3000))
                .unwrap(),
        ),
        (
            DesignId::RaceProne8,
            verifier(DesignId::RaceProne8).race_sweep(&[2, 9]).unwrap(),
        ),
    ] {
        assert!(!report.failures.is_empty(), "{d}");
        let ver = verifier(d);
        for f in report.failures.iter().take(50) {
            let s = ver.replay(&f.scenario).unwrap();
            assert_eq!(render(&s[f.cycle]), f.observed, "{}", f.scenario.label);
            assert_eq!(ver.golden(&f.scenario, f.cycle), f.expected);
            let has_x = f.observed.contains('x');
            assert_eq!(f.kind == FailureKind::X, has_x);
        }
    }
}

#[test]
fn race_breakdown_covers_every_group() {
    let r = verifier(DesignId::RaceProne8).race_sweep(&[1, 5]).unwrap();
    assert_eq!(r.breakdown.len(), 4);
    assert!(r.breakdown.iter().all(|row| row.total == 256));
    let total_failed: usize = r.breakdown.iter().map(|row| row.failed).sum();
    assert_eq!(total_failed, r.counts.failed);
    // Rising LA enables the stage late; the outputs still evaluate in time.
    assert!(r
        .breakdown
        .iter()
        .filter(|row| row.label.ends_with("0->1"))
        .all(|row| row.failed == 0));
}

#[test]
fn cascade8_behaves_like_robust8() {
    let a = verifier(DesignId::Cascaded(8)).exhaustive_equivalence_with_samples().unwrap();
    let b = verifier(DesignId::Robust8).exhaustive_equivalence_with_samples().unwrap();
    assert_eq!(a.1, b.1);
}

#[test]
fn cascade32_walking_one_at_netlist_level() {
    let ver = verifier(DesignId::Cascaded(32));
    for i in 0..32 {
        let sc = Scenario {
            design: DesignId::Cascaded(32),
            label: format!("one {i}"),
            ip_sequence: vec![PeVector::zeros(32), PeVector::one_hot(i, 32)],
            la_levels: vec![false; 2],
            la_schedule: Vec::new(),
            tail: 0,
        };
        let s = ver.replay(&sc).unwrap();
        assert_eq!(render(&s[1]), PeVector::one_hot(i, 32).to_string());
    }
}

#[test]
fn jobs_do_not_change_reports() {
    let run = |jobs| {
        let cfg = CampaignConfig {
            jobs,
            ..Default::default()
        };
        Verifier::new(DesignId::ChargeShareProne8, cfg)
            .unwrap()
            .charge_share_scan(PairMode::Random(500))
            .unwrap()
            .to_json()
    };
    assert_eq!(run(Some(1)), run(Some(3)));
    assert_eq!(run(Some(1)), run(None));
}

#[test]
fn matrix_marks_failing_campaigns() {
    let reports = vec![
        verifier(DesignId::Robust8).charge_share_scan(PairMode::Random(200)).unwrap(),
        verifier(DesignId::ChargeShareProne8).charge_share_scan(PairMode::Random(2000)).unwrap(),
        verifier(DesignId::RaceProne8).race_sweep(&[3]).unwrap(),
    ];
    let m = failure_matrix(&reports);
    let lines: Vec<&str> = m.lines().collect();
    assert!(lines[0].contains("charge_share_scan") && lines[0].contains("race_sweep"));
    assert!(lines[1].starts_with("robust8") && lines[1].contains("no") && lines[1].contains('-'));
    assert!(lines[2].starts_with("cshare8") && lines[2].contains("yes"));
    assert!(lines[3].starts_with("raceprone8") && lines[3].trim_end().ends_with("yes"));
}
