use pqn_core::forms::Form;
use pqn_core::models::{self, reference};
use pqn_core::pqn::{classify_structure, deform, factorized_deform, Label};

#[test]
fn omega1_gives_n_minus_and_phi_minus() {
    let base = models::das_okubo_toda(3).unwrap();
    let w = models::standard_two_forms(3).unwrap();
    let s = deform(&base, &w.omega1).unwrap();
    assert_eq!(s.n, reference::n_minus_n3());
    assert_eq!(s.phi, reference::phi_minus(3));
}

#[test]
fn omega_ts_gives_tsiganov() {
    let base = models::das_okubo_toda(3).unwrap();
    let w = models::standard_two_forms(3).unwrap();
    let s = deform(&base, &w.omega_ts).unwrap();
    assert_eq!(s.n, reference::tsiganov_n3());
    assert!(s.phi.is_zero());
}

#[test]
fn omega2_on_das_okubo_gives_n2() {
    let base = models::das_okubo_toda(3).unwrap();
    let w = models::standard_two_forms(3).unwrap();
    let s = deform(&base, &w.omega2).unwrap();
    assert_eq!(s.n, reference::n2_n3());
    assert_eq!(s.phi, reference::phi_minus(3).scale_int(-1));
}

#[test]
fn omega2_on_n_minus_gives_tsiganov() {
    let d = models::derived_structures(3).unwrap();
    let w = models::standard_two_forms(3).unwrap();
    let s = deform(&d.n_minus, &w.omega2).unwrap();
    assert_eq!(s.n, reference::tsiganov_n3());
    assert!(s.phi.is_zero());
}

#[test]
fn push_forward_of_das_okubo_is_tsiganov() {
    let base = models::das_okubo_toda(3).unwrap();
    let map = models::tsiganov_map(3).unwrap();
    let pushed = map.transform_endomorphism(&base.n).unwrap();
    assert_eq!(pushed, models::derived_structures(3).unwrap().n_ts.n);
    assert_eq!(map.transform_bivector(&base.pi).unwrap(), base.pi);
}

#[test]
fn factorized_examples() {
    for n in 2..=3 {
        let base = models::das_okubo_toda(n).unwrap();
        let c = base.chart.clone();
        let d = |s: &str| Form::function(c.parse(s).unwrap()).d();
        let w = models::standard_two_forms(n).unwrap();
        let sum_p: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
        let g = sum_p.join(" + ");

        let ts = factorized_deform(&base, &d(&format!("exp(q{n}) - exp(-q1)")), &d(&g), None).unwrap();
        assert_eq!(ts.delta, d(&format!("{g} + 1/2*(exp(q{n}) + exp(-q1))")));
        assert_eq!(ts.omega, w.omega_ts);
        assert!(ts.structure.phi.is_zero());

        let minus = factorized_deform(&base, &d(&format!("exp(q{n})")), &d("exp(-q1)"), Some(&d(&g))).unwrap();
        assert_eq!(minus.delta, d("exp(-q1)"));
        assert_eq!(minus.omega, w.omega1);
        assert_eq!(minus.structure.phi, reference::phi_minus(n));
        let alpha = d(&format!("exp(q{n})"));
        let expected = alpha.wedge(&d(&g).scale_int(2).wedge(&d("exp(-q1)")).unwrap()).unwrap();
        assert_eq!(minus.structure.phi, expected);
    }
}

#[test]
fn deformation_preserves_validity() {
    for n in 2..=3 {
        let d = models::derived_structures(n).unwrap();
        for (s, label) in [(&d.n_minus, Label::Pqn), (&d.n_plus, Label::Pqn), (&d.n_ts, Label::Pn), (&d.n_2, Label::Pqn)] {
            let (got, report) = classify_structure(s);
            assert_eq!(got, label, "{report:?}");
        }
    }
}

#[test]
fn n_minus_without_phi_is_invalid() {
    let d = models::derived_structures(3).unwrap();
    let bare = d.n_minus.with_phi(Form::zero(6, 3)).unwrap();
    let (label, report) = classify_structure(&bare);
    assert_eq!(label, Label::Invalid);
    assert!(report.failures().all(|c| c.witness.is_some()));
}
