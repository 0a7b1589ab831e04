use unisum::experiment::{self, AttackKind, FieldKind, ProtocolKind, RunConfig};

fn config(p: ProtocolKind, m: u32, g: &str, field: FieldKind) -> RunConfig {
    let mut c = RunConfig::new(p, m, g, field);
    c.trials = 10;
    c.seed = 3;
    c
}

fn complete(p: ProtocolKind) -> bool {
    !matches!(p, ProtocolKind::DirectGemini | ProtocolKind::DirectKappa)
}

#[test]
fn complete_protocols_accept_and_match_costs() {
    for field in [FieldKind::F17, FieldKind::F64] {
        for p in ProtocolKind::ALL.into_iter().filter(|&p| complete(p)) {
            for g in ["identity", "square", "product2", "cube"] {
                let r = experiment::run(&config(p, 4, g, field)).unwrap();
                assert_eq!(r.honest.accepted, 10, "{p} {g} {}", field.name());
                assert!(r.honest.metrics_match, "{p} {g}: {:?} vs {:?}", r.honest.metrics, r.honest.expected);
                assert!(r.passed);
            }
        }
    }
}

#[test]
fn coefficient_reading_direct_pipelines_reject_honest_runs() {
    for p in [ProtocolKind::DirectGemini, ProtocolKind::DirectKappa] {
        let r = experiment::run(&config(p, 4, "square", FieldKind::F64)).unwrap();
        assert_eq!(r.honest.accepted, 0, "{p}");
        assert!(r.honest.metrics_match);
        let one = experiment::run(&config(p, 1, "square", FieldKind::F64));
        if p == ProtocolKind::DirectGemini {
            assert_eq!(one.unwrap().honest.accepted, 10);
        }
    }
}

#[test]
fn attacks_are_rejected_over_the_large_field() {
    for p in ProtocolKind::ALL {
        for attack in AttackKind::ALL {
            let mut c = config(p, 5, "product2", FieldKind::F64);
            c.trials = 50;
            c.attack = Some(attack);
            let a = experiment::run(&c).unwrap().attack.unwrap();
            assert_eq!(a.accepted, 0, "{p} {}", attack.name());
            assert!(a.within_envelope);
        }
    }
}

#[test]
fn composed_sumcheck_example_counts() {
    let r = experiment::run(&RunConfig::new(ProtocolKind::LfknAdaptor, 3, "square", FieldKind::F64)).unwrap();
    let m = r.honest.metrics;
    assert_eq!((m.rounds, m.oracles, m.field_elements), (4, 6, 3 * 3 + 1));
    assert_eq!(r.honest.accepted, 1);
}

#[test]
fn direct_gemini_example_counts() {
    let r = experiment::run(&RunConfig::new(ProtocolKind::DirectGemini, 4, "square", FieldKind::F64)).unwrap();
    let m = r.honest.metrics;
    assert_eq!((m.rounds, m.oracles, m.field_elements), (5, 3, 3 * 4 + 1));
}

#[test]
fn reports_are_reproducible() {
    let mut c = config(ProtocolKind::DgmGemini, 4, "product2", FieldKind::F17);
    c.attack = Some(AttackKind::TamperSum);
    c.trials = 200;
    let a = serde_json::to_string(&experiment::run(&c).unwrap()).unwrap();
    let b = serde_json::to_string(&experiment::run(&c).unwrap()).unwrap();
    assert_eq!(a, b);
    c.seed += 1;
    let other = serde_json::to_string(&experiment::run(&c).unwrap()).unwrap();
    assert_ne!(a, other);
}

#[test]
fn small_field_cheating_succeeds_sometimes() {
    let mut c = config(ProtocolKind::LfknAdaptor, 3, "square", FieldKind::F17);
    c.trials = 2000;
    c.attack = Some(AttackKind::TamperSum);
    let a = experiment::run(&c).unwrap().attack.unwrap();
    assert!(a.accepted > 0);
    assert!(a.within_envelope);
}

#[test]
fn invalid_configurations_are_errors() {
    assert!(experiment::run(&RunConfig::new(ProtocolKind::Aurora, 5, "square", FieldKind::F17)).is_err());
    assert!(experiment::run(&RunConfig::new(ProtocolKind::Aurora, 3, "no-such", FieldKind::F64)).is_err());
    let mut c = RunConfig::new(ProtocolKind::DirectKappa, 4, "square", FieldKind::F64);
    c.schedule = Some("1,x".into());
    assert!(experiment::run(&c).is_err());
}
