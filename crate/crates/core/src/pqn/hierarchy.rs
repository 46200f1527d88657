use num_bigint::BigInt;

use super::{PqNStructure, PqnError};
use crate::expr::{Coeff, ScalarExpr};
use crate::forms::{Endomorphism, Form, VectorField};

/// `H_k = Tr(N^k)/(2k)`, `X_k = pi# dH_k`, `Y_k = N^{k-1} X_1 - X_k` and the 1-forms
/// `<phi_k, X> = 1/2 Tr(N^k i_X T_N)`. Index 0 of `h`, `x`, `y` holds `k = 1`.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub kmax: usize,
    pub h: Vec<ScalarExpr>,
    pub x: Vec<VectorField>,
    pub y: Vec<VectorField>,
    /// `phi_k` for `k = 0..kmax-1`.
    pub phi_k: Vec<Form>,
    /// `N^k` for `k = 0..=kmax`.
    pub powers: Vec<Endomorphism>,
    /// `N* dH_k - dH_{k+1} - phi_{k-1}` for `k = 1..kmax-1`.
    pub recursion_residuals: Vec<Form>,
}

impl Hierarchy {
    pub fn h(&self, k: usize) -> &ScalarExpr {
        &self.h[k - 1]
    }

    pub fn x(&self, k: usize) -> &VectorField {
        &self.x[k - 1]
    }

    pub fn y(&self, k: usize) -> &VectorField {
        &self.y[k - 1]
    }

    pub fn phi(&self, k: usize) -> &Form {
        &self.phi_k[k]
    }

    pub fn recursion_holds(&self) -> bool {
        self.recursion_residuals.iter().all(Form::is_zero)
    }
}

pub fn hierarchy(s: &PqNStructure, kmax: usize) -> Result<Hierarchy, PqnError> {
    if kmax == 0 {
        return Err(PqnError::Invalid("kmax must be at least 1".into()));
    }
    let m = s.dim();
    let mut powers = vec![Endomorphism::identity(m)];
    for k in 1..=kmax {
        let next = powers[k - 1].compose_raw(&s.n);
        powers.push(next);
    }
    let h: Vec<ScalarExpr> = (1..=kmax)
        .map(|k| powers[k].trace().scale(&Coeff::new(BigInt::from(1), BigInt::from(2 * k))))
        .collect();
    let dh: Vec<Form> = h.iter().map(|e| Form::function(e.clone()).d()).collect();
    let x: Vec<VectorField> = dh.iter().map(|a| s.pi.sharp_raw(a)).collect();
    let y: Vec<VectorField> = (1..=kmax).map(|k| &powers[k - 1].apply_raw(&x[0]) - &x[k - 1]).collect();

    let torsion = s.n.torsion();
    let contractions: Vec<Endomorphism> = (0..m).map(|a| torsion.contract_first(a)).collect();
    let half = Coeff::new(BigInt::from(1), BigInt::from(2));
    let phi_k: Vec<Form> = (0..kmax)
        .map(|k| {
            if torsion.is_zero() {
                return Form::zero(m, 1);
            }
            let comps = contractions
                .iter()
                .map(|t| powers[k].compose_raw(t).trace().scale(&half))
                .collect();
            Form::one_form(comps)
        })
        .collect();

    let recursion_residuals = (1..kmax)
        .map(|k| {
            let lhs = s.n.transpose_apply(&dh[k - 1]).expect("1-form");
            &(&lhs - &dh[k]) - &phi_k[k - 1]
        })
        .collect();

    Ok(Hierarchy { kmax, h, x, y, phi_k, powers, recursion_residuals })
}
