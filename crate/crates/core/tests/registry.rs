//! Registry-level behaviour seen from outside the crate.

use saranfk::registry::{builtin_registry, lookup, sample_parameters, verify_identity, CostClass, EvalSettings};
use saranfk::Error;

#[test]
fn every_identity_passes_a_short_run() {
    let s = EvalSettings::default();
    for case in builtin_registry() {
        let r = verify_identity(case, 42, 3, None, &s).unwrap();
        assert!(r.pass(), "{}: {:.2e} {:?}", case.id, r.max_rel_residual, r.failures.first());
        assert_eq!(r.samples, 3);
    }
}

#[test]
fn same_seed_same_report() {
    let s = EvalSettings::default();
    for id in ["erdelyi-3", "qfk-lr", "fk-discrete"] {
        let case = lookup(id).unwrap();
        let mut a = verify_identity(case, 9, 4, None, &s).unwrap();
        let mut b = verify_identity(case, 9, 4, None, &s).unwrap();
        a.wall_time = Default::default();
        b.wall_time = Default::default();
        assert_eq!(a, b, "{id}");
    }
}

#[test]
fn tolerance_override_is_honoured() {
    let case = lookup("euler-1").unwrap();
    let r = verify_identity(case, 1, 5, Some(0.0), &EvalSettings::default()).unwrap();
    assert_eq!(r.tol, 0.0);
    assert!(!r.pass());
    assert!(r.failures.iter().all(|f| f.residual > 0.0));
}

#[test]
fn anchors_and_classes() {
    let reg = builtin_registry();
    assert_eq!(reg.len(), 26);
    let fk = lookup("fk-erdelyi").unwrap();
    assert!(fk.anchor.contains("Theorem 1.1"));
    assert_eq!(fk.cost_class, CostClass::TripleIntegral);
    assert!(reg.iter().filter(|c| c.q_dependent).all(|c| c.cost_class != CostClass::TripleIntegral));
    assert!(reg.iter().all(|c| c.tol > 0.0 && !c.anchor.is_empty()));
}

#[test]
fn unknown_identity_and_sample_cap() {
    assert!(matches!(lookup("bogus-id"), Err(Error::UnknownIdentity(_))));
    let case = lookup("bateman").unwrap();
    assert!(sample_parameters(case, 0, 10_001).is_err());
    assert!(sample_parameters(case, 0, 0).unwrap().is_empty());
}

#[test]
fn q_cases_follow_the_base() {
    let case = lookup("gasper-q-erdelyi-1").unwrap();
    for q in [0.3, 0.7] {
        let r = verify_identity(case, 5, 4, None, &EvalSettings::default().with_q(q)).unwrap();
        assert!(r.pass(), "q = {q}: {:.2e}", r.max_rel_residual);
    }
}
