//! Partial data for the `D_n` Toda deformation by `Omega = d(e^{-2 q_1}) ^ dp_1`.
//!
//! Only `N* dq_1`, `N* dp_1`, the deformed 3-form and `H^_1` are known; the full tensor
//! must come from a model file. [`validate_dn_model`] checks such a file against them.

use super::{canonical_bivector, standard_two_forms, ModelDescriptor, ModelError};
use crate::expr::{Chart, ScalarExpr};
use crate::forms::Form;
use crate::pqn::{deform, CheckReport};

#[derive(Debug, Clone)]
pub struct DnReference {
    pub n: usize,
    pub omega: Form,
    pub n_star_dq1: Form,
    pub n_star_dp1: Form,
    pub phi_hat: Form,
    pub h1_hat: ScalarExpr,
}

fn p(c: &Chart, s: &str) -> ScalarExpr {
    c.parse(s).expect("reference expression")
}

/// `H = 1/2 sum p_i^2 + sum_{i<n} e^{q_i - q_{i+1}} + e^{q_{n-1} + q_n}`.
pub fn dn_hamiltonian(n: usize) -> Result<ScalarExpr, ModelError> {
    if n < 3 {
        return Err(ModelError::TooFewParticles(n));
    }
    let c = Chart::phase_space(n);
    let mut terms: Vec<String> = (1..=n).map(|i| format!("1/2*p{i}^2")).collect();
    terms.extend((1..n).map(|i| format!("exp(q{i} - q{})", i + 1)));
    terms.push(format!("exp(q{} + q{n})", n - 1));
    Ok(p(&c, &terms.join(" + ")))
}

pub fn dn_reference(n: usize) -> Result<DnReference, ModelError> {
    let h = dn_hamiltonian(n)?;
    let c = Chart::phase_space(n);
    let m = 2 * n;
    let q = |i: usize| Form::dx(m, i - 1);
    let pp = |i: usize| Form::dx(m, n + i - 1);
    let w3 = |a: &Form, b: &Form, d: &Form| a.wedge(b).and_then(|x| x.wedge(d)).expect("dims");

    let mut dq1 = q(1).mul_fn(&p(&c, "-(p1^2 + 2*exp(q1 - q2))"));
    dq1 = &dq1 + &q(2).mul_fn(&p(&c, "exp(q1 - q2) - 2*exp(q2 - q3)"));
    for i in 3..n {
        dq1 = &dq1 + &q(i).mul_fn(&p(&c, &format!("2*(exp(q{} - q{i}) - exp(q{i} - q{}))", i - 1, i + 1)));
    }
    dq1 = &dq1 + &q(n - 1).mul_fn(&p(&c, &format!("-2*exp(q{} + q{n})", n - 1)));
    dq1 = &dq1 + &q(n).mul_fn(&p(&c, &format!("2*(exp(q{0} - q{n}) - exp(q{0} + q{n}))", n - 1)));
    for i in 1..=n {
        dq1 = &dq1 + &pp(i).mul_fn(&p(&c, &format!("-2*p{i}")));
    }

    let dp1 = &(&q(2).mul_fn(&p(&c, "exp(q1 - q2)*(p1 + p2)")) + &pp(1).mul_fn(&p(&c, "-(p1^2 + 2*exp(q1 - q2))")))
        + &pp(2).mul_fn(&p(&c, "-exp(q1 - q2)"));

    let mut inner = Form::zero(m, 3);
    for i in 2..n {
        let coeff = p(&c, &format!("exp(q{} - q{i}) - exp(q{i} - q{})", i - 1, i + 1));
        inner = &inner + &w3(&q(1), &q(i), &pp(1)).mul_fn(&coeff);
    }
    inner = &inner + &w3(&q(1), &q(n - 1), &pp(1)).mul_fn(&p(&c, &format!("-exp(q{} + q{n})", n - 1)));
    let last = p(&c, &format!("exp(q{0} - q{n}) - exp(q{0} + q{n})", n - 1));
    inner = &inner + &w3(&q(1), &q(n), &pp(1)).mul_fn(&last);
    for i in 2..=n {
        inner = &inner + &w3(&q(1), &pp(1), &pp(i)).mul_fn(&c.coord(n + i - 1));
    }
    let phi_hat = inner.mul_fn(&p(&c, "-8*exp(-2*q1)"));

    let h1_hat = &h.scale_int(-2) - &p(&c, "2*exp(-2*q1)");
    Ok(DnReference {
        n,
        omega: standard_two_forms(n)?.omega_bc,
        n_star_dq1: dq1,
        n_star_dp1: dp1,
        phi_hat,
        h1_hat,
    })
}

/// Checks a user-supplied `D_n` PN model against the known partial data.
pub fn validate_dn_model(model: &ModelDescriptor) -> Result<CheckReport, ModelError> {
    let n = model.n.ok_or_else(|| ModelError::Schema("D_n model needs a q1..qn, p1..pn chart".into()))?;
    let r = dn_reference(n)?;
    let s = &model.structure;
    let c = &s.chart;
    let m = 2 * n;
    let mut report = CheckReport::new(format!("dn-{}", model.name));
    let wit = |f: Form| (!f.is_zero()).then(|| f.display(c));
    report.record("canonical poisson", (s.pi != canonical_bivector(n)).then(|| "pi is not canonical".to_string()));
    report.record("N* dq1", wit(&s.n.transpose_apply(&Form::dx(m, 0))? - &r.n_star_dq1));
    report.record("N* dp1", wit(&s.n.transpose_apply(&Form::dx(m, n))? - &r.n_star_dp1));
    let d = deform(s, &r.omega)?;
    let h1 = d.n.trace().scale(&crate::expr::Coeff::new(1.into(), 2.into()));
    let dh = &h1 - &r.h1_hat;
    report.record("H^_1", (!dh.is_zero()).then(|| dh.to_string_in(c)));
    report.record("phi^", wit(&d.phi - &r.phi_hat));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_hat_is_minus_two_dh1_wedge_omega() {
        for n in 3..=5 {
            let r = dn_reference(n).unwrap();
            let rhs = Form::function(r.h1_hat.clone()).d().wedge(&r.omega).unwrap().scale_int(-2);
            assert_eq!(r.phi_hat, rhs, "n = {n}");
        }
    }

    #[test]
    fn phi_hat_matches_d_n_omega_expansion() {
        for n in 3..=5 {
            let r = dn_reference(n).unwrap();
            let c = Chart::phase_space(n);
            let e = p(&c, "exp(-2*q1)");
            let (dq1, dp1) = (Form::dx(2 * n, 0), Form::dx(2 * n, n));
            let t1 = dq1.wedge(&r.n_star_dq1).unwrap().mul_fn(&e).scale_int(-4);
            let t2 = r.n_star_dq1.d().mul_fn(&e).scale_int(2);
            let t3 = dq1.wedge(&r.n_star_dp1.d()).unwrap().mul_fn(&e).scale_int(2);
            let expansion = &(&t1 + &t2).wedge(&dp1).unwrap() - &t3;
            assert_eq!(expansion, r.phi_hat, "n = {n}");
        }
    }

    #[test]
    fn rejects_small_n() {
        assert!(dn_reference(2).is_err());
    }
}
