use num_bigint::BigInt;

use super::checks::form_witness;
use super::{hierarchy, CheckReport, PqNStructure, PqnError};
use crate::expr::{Coeff, ScalarExpr};
use crate::forms::{Form, VectorField};

fn expr_witness(s: &PqNStructure, label: String, e: &ScalarExpr) -> Option<String> {
    if e.is_zero() {
        None
    } else {
        Some(format!("{label}: {}", e.to_string_in(&s.chart)))
    }
}

fn field_witness(s: &PqNStructure, label: String, v: &VectorField) -> Option<String> {
    if v.is_zero() {
        None
    } else {
        Some(format!("{label}: {}", v.display(&s.chart)))
    }
}

fn require_kmax(kmax: usize, min: usize) -> Result<(), PqnError> {
    if kmax < min {
        return Err(PqnError::Invalid(format!("kmax must be at least {min}")));
    }
    Ok(())
}

/// `H_k = Tr(N^k)/(2k)` for `k = 1..=kmax`, without the rest of the hierarchy.
fn hamiltonians(s: &PqNStructure, kmax: usize) -> Vec<ScalarExpr> {
    let mut power = s.n.clone();
    let mut out = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        if k > 1 {
            power = power.compose_raw(&s.n);
        }
        out.push(power.trace().scale(&Coeff::new(BigInt::from(1), BigInt::from(2 * k))));
    }
    out
}

/// Entry `(l-1, m-1)` is `{H_l, H_m}`.
pub fn involutivity_table(s: &PqNStructure, kmax: usize) -> Result<Vec<Vec<ScalarExpr>>, PqnError> {
    require_kmax(kmax, 1)?;
    let m = s.dim();
    let h = hamiltonians(s, kmax);
    let mut table = vec![vec![ScalarExpr::zero(m); kmax]; kmax];
    for l in 0..kmax {
        for k in (l + 1)..kmax {
            let b = s.pi.poisson(&h[l], &h[k]);
            table[k][l] = -&b;
            table[l][k] = b;
        }
    }
    Ok(table)
}

fn table_witness(s: &PqNStructure, table: &[Vec<ScalarExpr>]) -> Option<String> {
    for (l, row) in table.iter().enumerate() {
        for (k, e) in row.iter().enumerate() {
            if let Some(w) = expr_witness(s, format!("{{H_{}, H_{}}}", l + 1, k + 1), e) {
                return Some(w);
            }
        }
    }
    None
}

/// `phi = -2 dH_1 ^ Omega` and `Omega(X_j, Y_k) = 0` for `j, k <= kmax`.
pub fn verify_theorem1(s: &PqNStructure, omega: &Form, kmax: usize) -> Result<CheckReport, PqnError> {
    require_kmax(kmax, 1)?;
    let hi = hierarchy(s, kmax)?;
    let mut report = CheckReport::new("two-form-involutivity");
    let dh1 = Form::function(hi.h(1).clone()).d();
    let resid = &s.phi + &dh1.wedge(omega)?.scale_int(2);
    report.record("phi = -2 dH_1 ^ Omega", form_witness(&s.chart, &resid));
    let mut w = None;
    'outer: for j in 1..=kmax {
        for k in 1..=kmax {
            let v = omega.eval(&[hi.x(j).clone(), hi.y(k).clone()])?;
            if let Some(found) = expr_witness(s, format!("Omega(X_{j}, Y_{k})"), &v) {
                w = Some(found);
                break 'outer;
            }
        }
    }
    report.record("Omega(X_j, Y_k) = 0", w);
    Ok(report)
}

/// Hypothesis `phi = dH_1 ^ beta ^ gamma`, then the zero involutivity table.
pub fn verify_theorem3(
    s: &PqNStructure,
    beta: &Form,
    gamma: &Form,
    kmax: usize,
) -> Result<CheckReport, PqnError> {
    require_kmax(kmax, 1)?;
    let mut report = CheckReport::new("factorized-involutivity");
    let h = hamiltonians(s, 1);
    let dh1 = Form::function(h[0].clone()).d();
    let resid = &s.phi - &dh1.wedge(beta)?.wedge(gamma)?;
    report.record("phi = dH_1 ^ beta ^ gamma", form_witness(&s.chart, &resid));
    let table = involutivity_table(s, kmax)?;
    report.record("{H_l, H_m} = 0", table_witness(s, &table));
    Ok(report)
}

/// Identities that follow from a factorization `phi = alpha ^ beta ^ gamma`, each computed
/// along two independent paths.
pub fn verify_section4_identities(
    s: &PqNStructure,
    alpha: &Form,
    beta: &Form,
    gamma: &Form,
    kmax: usize,
) -> Result<CheckReport, PqnError> {
    require_kmax(kmax, 1)?;
    let m = s.dim();
    let product = alpha.wedge(beta)?.wedge(gamma)?;
    if let Some(w) = form_witness(&s.chart, &(&s.phi - &product)) {
        return Err(PqnError::Factorization { witness: w });
    }
    let hi = hierarchy(s, kmax)?;
    let cyc = [(alpha, beta, gamma), (beta, gamma, alpha), (gamma, alpha, beta)];
    let sharp: Vec<VectorField> = cyc.iter().map(|(a, _, _)| s.pi.sharp_raw(a)).collect();
    let mut report = CheckReport::new("factorization");

    let torsion = s.n.torsion();
    let mut w = None;
    'torsion: for i in 0..m {
        for j in (i + 1)..m {
            let mut rhs = VectorField::zero(m);
            for ((_, b, g), pa) in cyc.iter().zip(&sharp) {
                let bg = &(&b.component(&[i]) * &g.component(&[j])) - &(&b.component(&[j]) * &g.component(&[i]));
                if !bg.is_zero() {
                    rhs = &rhs + &pa.mul_fn(&bg);
                }
            }
            let r = &torsion.get(i, j) - &rhs;
            let label = format!("T(d/d{}, d/d{})", s.chart.name(i), s.chart.name(j));
            if let Some(found) = field_witness(s, label, &r) {
                w = Some(found);
                break 'torsion;
            }
        }
    }
    report.record("torsion factorization", w);

    let mut w = None;
    for l in 0..kmax {
        let mut closed = Form::zero(m, 1);
        for (a, b, g) in cyc {
            let pg = s.pi.sharp_raw(g);
            let c = b.pair(&hi.powers[l].apply_raw(&pg));
            if !c.is_zero() {
                closed = &closed + &a.mul_fn(&c);
            }
        }
        if let Some(found) = form_witness(&s.chart, &(&hi.phi_k[l] - &closed)) {
            w = Some(format!("phi_{l}: {found}"));
            break;
        }
    }
    report.record("phi_l = sum_cyc <beta, N^l pi# gamma> alpha", w);

    let mut w = None;
    for k in 1..=kmax {
        let mut sum = Form::zero(m, 1);
        for l in 0..k.saturating_sub(1) {
            let t = hi.powers[k - l - 2].transpose_apply(&hi.phi_k[l])?;
            sum = &sum + &t;
        }
        let r = hi.y(k) - &s.pi.sharp_raw(&sum);
        if let Some(found) = field_witness(s, format!("Y_{k}"), &r) {
            w = Some(found);
            break;
        }
    }
    report.record("Y_k = pi# sum (N*)^(k-l-2) phi_l", w);

    let mut w = None;
    'abg: for k in 1..=kmax {
        for (name, f) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            let v = f.pair(hi.y(k));
            if let Some(found) = expr_witness(s, format!("<{name}, Y_{k}>"), &v) {
                w = Some(found);
                break 'abg;
            }
        }
    }
    report.record("<alpha|beta|gamma, Y_k> = 0", w);

    let mut w = None;
    'phil: for l in 0..kmax {
        for k in 1..=kmax {
            let nx1 = hi.powers[k - 1].apply_raw(hi.x(1));
            let r = &hi.phi_k[l].pair(hi.x(k)) - &hi.phi_k[l].pair(&nx1);
            if let Some(found) = expr_witness(s, format!("<phi_{l}, X_{k} - N^{} X_1>", k - 1), &r) {
                w = Some(found);
                break 'phil;
            }
        }
    }
    report.record("<phi_l, X_k> = <phi_l, N^(k-1) X_1>", w);
    Ok(report)
}

/// `{H_l,H_m} - {H_{l-1},H_{m+1}} + <phi_{m-1},X_{l-1}> + <phi_{l-2},X_m> = 0`
/// for `l >= 2`, `m >= 1`, `l + m <= kmax + 1`.
pub fn verify_recursion_identity(s: &PqNStructure, kmax: usize) -> Result<CheckReport, PqnError> {
    require_kmax(kmax, 2)?;
    let hi = hierarchy(s, kmax)?;
    let mut report = CheckReport::new("recursion");
    let mut w = None;
    'outer: for l in 2..=kmax {
        for m in 1..=(kmax + 1 - l) {
            let lhs = &s.pi.poisson(hi.h(l), hi.h(m)) - &s.pi.poisson(hi.h(l - 1), hi.h(m + 1));
            let r = &(&lhs + &hi.phi(m - 1).pair(hi.x(l - 1))) + &hi.phi(l - 2).pair(hi.x(m));
            if let Some(found) = expr_witness(s, format!("(l,m) = ({l},{m})"), &r) {
                w = Some(found);
                break 'outer;
            }
        }
    }
    report.record("recursion identity", w);
    report.record("N* dH_k = dH_(k+1) + phi_(k-1)", {
        let bad = hi.recursion_residuals.iter().enumerate().find(|(_, r)| !r.is_zero());
        bad.map(|(i, r)| format!("k = {}: {}", i + 1, r.display(&s.chart)))
    });
    Ok(report)
}
