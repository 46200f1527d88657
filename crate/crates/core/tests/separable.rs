use pqn_core::expr::Chart;
use pqn_core::forms::{koszul_bracket, Form};
use pqn_core::models;
use pqn_core::pqn::{classify_structure, deform, pi_sharp_omega_flat, Label};

fn d(f: &pqn_core::expr::ScalarExpr) -> Form {
    Form::function(f.clone()).d()
}

#[test]
fn lift_is_torsion_free() {
    let ex = models::separable_example();
    assert!(ex.structure.n.torsion().is_zero());
    assert_eq!(classify_structure(&ex.structure).0, Label::Pn);
}

#[test]
fn recurrence_on_h() {
    let ex = models::separable_example();
    let n = &ex.structure.n;
    let dh = d(&ex.h);
    assert_eq!(dh.d_n(n).unwrap(), dh.wedge(&d(&ex.tr_l)).unwrap());
    assert!(d(&ex.tr_l).d_n(n).unwrap().is_zero());
    let c = Chart::phase_space(2);
    let expected = c
        .parse("(-q1^-1 - q1*q2^-2 + q2*p1*p2 - q1*p2^2)")
        .unwrap();
    assert_eq!(n.transpose_apply(&dh).unwrap().component(&[0]), expected);
}

#[test]
fn displayed_omega_is_minus_dh_wedge_dtrl_kinetic() {
    let ex = models::separable_example();
    let c = &ex.structure.chart;
    let kinetic = c.parse("1/2*(p1^2 + p2^2)").unwrap();
    assert_eq!(ex.omega, d(&kinetic).wedge(&d(&ex.tr_l)).unwrap().scale_int(-1));
    assert!(ex.omega.d().is_zero());
}

#[test]
fn bracket_of_beta_alpha_is_reported() {
    let ex = models::separable_example();
    let s = &ex.structure;
    let ba = koszul_bracket(&s.pi, &d(&ex.tr_l), &d(&ex.h)).unwrap();
    let expected = d(&s.chart.parse("-2*(q1*p1 + q2*p2)").unwrap());
    assert_eq!(ba, expected);
}

#[test]
fn deformation_by_displayed_omega() {
    let ex = models::separable_example();
    let s = &ex.structure;
    let hat = deform(s, &ex.omega).unwrap();
    let shift = pi_sharp_omega_flat(&s.pi, &ex.omega).unwrap();
    // pi# Omega^flat always has lower-right block equal to the transpose of the upper-left one
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(shift.entry(2 + i, 2 + j), shift.entry(j, i));
        }
    }
    eprintln!("computed N^ = {:?}", hat.n.display(&s.chart));
    eprintln!("computed phi^ = {}", hat.phi.display(&s.chart));
    eprintln!("torsion zero: {}", hat.n.torsion().is_zero());
}
