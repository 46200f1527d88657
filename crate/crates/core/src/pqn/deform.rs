use num_bigint::BigInt;

use super::checks::form_witness;
use super::{PqNStructure, PqnError};
use crate::expr::Coeff;
use crate::forms::{koszul_bracket, Bivector, Endomorphism, Form, VectorField};

fn half() -> Coeff {
    Coeff::new(BigInt::from(1), BigInt::from(2))
}

/// The (1,1) tensor `pi# Omega^flat`, column `b` being `pi#(i_{d/dx_b} Omega)`.
pub fn pi_sharp_omega_flat(pi: &Bivector, omega: &Form) -> Result<Endomorphism, PqnError> {
    let m = pi.dim();
    if omega.dim() != m {
        return Err(PqnError::Invalid(format!("2-form on dimension {} vs {}", omega.dim(), m)));
    }
    let mut out = Endomorphism::zero(m);
    for b in 0..m {
        let col = pi.sharp_raw(&omega.flat(&VectorField::coordinate(m, b))?);
        for (a, e) in col.components().iter().enumerate() {
            out.set(a, b, e.clone());
        }
    }
    Ok(out)
}

fn require_closed(s: &PqNStructure, omega: &Form) -> Result<(), PqnError> {
    if omega.degree() != 2 {
        return Err(PqnError::Invalid(format!("expected a 2-form, got degree {}", omega.degree())));
    }
    if let Some(w) = form_witness(&s.chart, &omega.d()) {
        return Err(PqnError::NotClosed { witness: w });
    }
    Ok(())
}

/// `N^ = N + pi# Omega^flat`, `phi^ = phi + d_N Omega + 1/2 [Omega, Omega]`.
pub fn deform(s: &PqNStructure, omega: &Form) -> Result<PqNStructure, PqnError> {
    require_closed(s, omega)?;
    let n_hat = &s.n + &pi_sharp_omega_flat(&s.pi, omega)?;
    let bracket = koszul_bracket(&s.pi, omega, omega)?;
    let phi_hat = &(&s.phi + &omega.d_n(&s.n)?) + &bracket.scale(&half());
    PqNStructure::new(s.chart.clone(), s.pi.clone(), n_hat, phi_hat)
}

#[derive(Debug, Clone)]
pub struct FactorizedDeformation {
    pub delta: Form,
    pub omega: Form,
    pub epsilon: Form,
    pub structure: PqNStructure,
}

/// Deformation by `Omega = alpha ^ delta` with `delta = beta + 1/2 [beta, alpha]`, under
/// `d_N alpha = alpha ^ gamma`, `d_N beta = beta ^ gamma` (`gamma = beta` when omitted).
pub fn factorized_deform(
    s: &PqNStructure,
    alpha: &Form,
    beta: &Form,
    gamma: Option<&Form>,
) -> Result<FactorizedDeformation, PqnError> {
    let chart = &s.chart;
    for (name, f) in [("alpha", alpha), ("beta", beta)] {
        if f.degree() != 1 && !f.is_zero() {
            return Err(PqnError::Invalid(format!("{name} must be a 1-form")));
        }
    }
    let prop1 = gamma.is_none();
    let gamma = gamma.unwrap_or(beta);
    let hyp = |name: &str, resid: Form| match form_witness(chart, &resid) {
        Some(w) => Err(PqnError::Hypothesis { name: name.into(), witness: w }),
        None => Ok(()),
    };
    hyp("d alpha = 0", alpha.d())?;
    hyp("d beta = 0", beta.d())?;
    hyp("d_N alpha = alpha ^ gamma", &alpha.d_n(&s.n)? - &alpha.wedge(gamma)?)?;
    hyp("d_N beta = beta ^ gamma", &beta.d_n(&s.n)? - &beta.wedge(gamma)?)?;

    let pi = &s.pi;
    let ba = koszul_bracket(pi, beta, alpha)?;
    let delta = beta + &ba.scale(&half());
    let omega = alpha.wedge(&delta)?;
    let da = koszul_bracket(pi, &delta, alpha)?;
    let ag = koszul_bracket(pi, alpha, gamma)?;
    let c32 = Coeff::new(BigInt::from(3), BigInt::from(2));
    let epsilon = &(&(&gamma.wedge(beta)?.scale_int(2) + &gamma.wedge(&ba)?.scale(&c32))
        + &beta.wedge(&ag)?.scale(&half()))
        + &da.wedge(&delta)?;

    let lhs = &omega.d_n(&s.n)? + &koszul_bracket(pi, &omega, &omega)?.scale(&half());
    let resid = &lhs - &alpha.wedge(&epsilon)?;
    if let Some(w) = form_witness(chart, &resid) {
        return Err(PqnError::Identity { name: "d_N Omega + 1/2 [Omega,Omega] = alpha ^ epsilon".into(), witness: w });
    }

    let structure = deform(s, &omega)?;
    if prop1 {
        let aba = koszul_bracket(pi, &ba, alpha)?;
        let expected = &s.phi + &alpha.wedge(&aba)?.wedge(&delta)?.scale(&half());
        if let Some(w) = form_witness(chart, &(&structure.phi - &expected)) {
            return Err(PqnError::Identity { name: "phi^ = phi + 1/2 alpha ^ [[beta,alpha],alpha] ^ delta".into(), witness: w });
        }
    }
    Ok(FactorizedDeformation { delta, omega, epsilon, structure })
}
