use pqn_core::expr::ScalarExpr;
use pqn_core::forms::{Form, VectorField};
use pqn_core::models;
use pqn_core::pqn::{
    hierarchy, involutivity_table, verify_recursion_identity, verify_section4_identities, verify_theorem1,
    verify_theorem3, PqNStructure,
};

fn d(s: &PqNStructure, text: &str) -> Form {
    Form::function(s.chart.parse(text).unwrap()).d()
}

fn all_zero(t: &[Vec<ScalarExpr>]) -> bool {
    t.iter().flatten().all(ScalarExpr::is_zero)
}

#[test]
fn das_okubo_table_is_zero() {
    let s = models::das_okubo_toda(2).unwrap();
    let t = involutivity_table(&s, 4).unwrap();
    assert_eq!(t.len(), 4);
    assert!(all_zero(&t));
}

#[test]
fn n_minus_energy_is_closed_toda() {
    let s = models::derived_structures(3).unwrap().n_minus;
    let hi = hierarchy(&s, 3).unwrap();
    let expected = s.chart.parse("1/2*(p1^2 + p2^2 + p3^2) + exp(q1 - q2) + exp(q2 - q3) - exp(q3 - q1)").unwrap();
    assert_eq!(*hi.h(2), expected);
    assert_eq!(*hi.y(2), s.pi.sharp(hi.phi(0)).unwrap());
    assert!(hi.recursion_holds());
}

#[test]
fn deformed_tables_are_zero_n3() {
    let dd = models::derived_structures(3).unwrap();
    for s in [&dd.n_minus, &dd.n_2] {
        assert!(all_zero(&involutivity_table(s, 6).unwrap()));
    }
}

#[test]
fn two_form_involutivity_examples() {
    let s = models::derived_structures(2).unwrap().n_minus;
    let w = models::standard_two_forms(2).unwrap();
    assert!(verify_theorem1(&s, &w.omega1, 4).unwrap().all_pass());
    let bad = d(&s, "q1").wedge(&d(&s, "q2")).unwrap();
    let r = verify_theorem1(&s, &bad, 4).unwrap();
    assert!(!r.checks[0].pass && r.checks[0].witness.is_some());
    let pn = models::das_okubo_toda(2).unwrap();
    assert!(verify_theorem1(&pn, &Form::zero(4, 2), 4).unwrap().all_pass());
}

#[test]
fn factorized_involutivity_examples() {
    for n in 2..=3 {
        let dd = models::derived_structures(n).unwrap();
        let s = &dd.n_minus;
        let r = verify_theorem3(s, &d(s, "2*exp(-q1)"), &d(s, &format!("exp(q{n})")), 2 * n).unwrap();
        assert!(r.all_pass(), "{r:?}");
        let s = &dd.n_2;
        let r = verify_theorem3(s, &d(s, &format!("2*exp(q{n})")), &d(s, "exp(-q1)"), 2 * n).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }
    let pn = models::das_okubo_toda(2).unwrap();
    let z = Form::zero(4, 1);
    assert!(verify_theorem3(&pn, &z, &z, 4).unwrap().all_pass());
}

#[test]
fn factorization_identities() {
    let dd = models::derived_structures(2).unwrap();
    let s = &dd.n_minus;
    let r = verify_section4_identities(s, &d(s, "2*(p1 + p2)"), &d(s, "exp(-q1)"), &d(s, "exp(q2)"), 4).unwrap();
    assert!(r.all_pass(), "{r:?}");
    let s = &dd.n_2;
    let h1 = "2*(p1 + p2 + exp(-q1) + exp(q2))";
    let r = verify_section4_identities(s, &d(s, h1), &d(s, "exp(q2)"), &d(s, "exp(-q1)"), 4).unwrap();
    assert!(r.all_pass(), "{r:?}");
    let pn = models::das_okubo_toda(2).unwrap();
    let z = Form::zero(4, 1);
    assert!(verify_section4_identities(&pn, &z, &z, &z, 4).unwrap().all_pass());
    assert!(verify_section4_identities(s, &z, &z, &z, 4).is_err());
}

#[test]
fn recursion_identity() {
    let dd = models::derived_structures(2).unwrap();
    for s in [&dd.n_minus, &dd.n_2, &models::das_okubo_toda(2).unwrap()] {
        let r = verify_recursion_identity(s, 4).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }
    assert!(verify_recursion_identity(&dd.n_minus, 1).is_err());
}

#[test]
fn y_vanishes_for_pn() {
    let s = models::derived_structures(2).unwrap().n_ts;
    let hi = hierarchy(&s, 4).unwrap();
    assert!(hi.y.iter().all(VectorField::is_zero));
    assert!(hi.phi_k.iter().all(Form::is_zero));
}
