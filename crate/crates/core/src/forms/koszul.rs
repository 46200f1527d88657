//! Koszul bracket of forms induced by a Poisson bivector.
//!
//! On 1-forms: `[a, b] = L_{pi# a} b - L_{pi# b} a - d<b, pi# a>`; on a 1-form and a
//! function: `[a, f] = <df, pi# a>`; two functions bracket to zero. Higher degrees
//! are reduced on the right slot through the derivation rule
//! `[e, e' ^ e''] = [e, e'] ^ e'' + (-1)^{(q-1) q'} e' ^ [e, e'']`, and the left slot
//! is moved to the right with `[e, e'] = -(-1)^{(q-1)(q'-1)} [e', e]`.

use std::collections::HashMap;

use super::{check_dims, parity, Bivector, Form, FormError};

/// `[a, b]_pi`, a form of degree `deg a + deg b - 1` (degree 0 zero form for two functions).
pub fn koszul_bracket(pi: &Bivector, a: &Form, b: &Form) -> Result<Form, FormError> {
    check_dims(pi.dim(), a.dim())?;
    check_dims(pi.dim(), b.dim())?;
    Ok(bracket(pi, a, b))
}

pub(crate) fn bracket(pi: &Bivector, a: &Form, b: &Form) -> Form {
    let (q, r) = (a.degree(), b.degree());
    let dim = a.dim();
    let out_degree = (q + r).saturating_sub(1);
    if a.is_zero() || b.is_zero() || q + r == 0 {
        return Form::zero(dim, out_degree);
    }
    match (q, r) {
        (1, 0) => pair_with_function(pi, a, b),
        (0, 1) => -pair_with_function(pi, b, a),
        (1, 1) => one_forms(pi, a, b),
        (_, r) if r >= 2 => reduce_right(pi, a, b),
        (q, r) => {
            // q >= 2, r <= 1
            let s = -parity((q as i64 - 1) * (r as i64 - 1));
            let flipped = bracket(pi, b, a);
            if s < 0 {
                -flipped
            } else {
                flipped
            }
        }
    }
}

fn pair_with_function(pi: &Bivector, a: &Form, f: &Form) -> Form {
    let x = pi.sharp_raw(a);
    Form::function(x.apply(&f.as_function()))
}

fn one_forms(pi: &Bivector, a: &Form, b: &Form) -> Form {
    let xa = pi.sharp_raw(a);
    let xb = pi.sharp_raw(b);
    let pairing = Form::function(b.pair(&xa));
    &(&b.lie_raw(&xa) - &a.lie_raw(&xb)) - &pairing.d()
}

fn reduce_right(pi: &Bivector, a: &Form, b: &Form) -> Form {
    let q = a.degree() as i64;
    let dim = a.dim();
    let sign = parity(q - 1);
    let mut out = Form::zero(dim, a.degree() + b.degree() - 1);
    // [a, dx_K] for the tails K, shared between components of b
    let mut tails: HashMap<Vec<usize>, Form> = HashMap::new();
    for (idx, g) in b.components() {
        let head = Form::dx(dim, idx[0]).mul_fn(g);
        let tail_idx = idx[1..].to_vec();
        let tail = Form::from_components(dim, tail_idx.len(), [(tail_idx.clone(), crate::expr::ScalarExpr::one(dim))])
            .expect("valid tail");
        let first = bracket(pi, a, &head).wedge_raw(&tail);
        let br_tail = tails.entry(tail_idx).or_insert_with(|| bracket(pi, a, &tail)).clone();
        let second = head.wedge_raw(&br_tail);
        out = &out + &first;
        out = if sign < 0 { &out - &second } else { &out + &second };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Chart, ScalarExpr};

    fn canonical(n: usize) -> Bivector {
        let mut pi = Bivector::zero(2 * n);
        for i in 0..n {
            pi.set(n + i, i, ScalarExpr::one(2 * n));
        }
        pi
    }

    fn d(c: &Chart, s: &str) -> Form {
        Form::function(c.parse(s).unwrap()).d()
    }

    #[test]
    fn differentials_bracket_to_differential_of_poisson_bracket() {
        let c = Chart::phase_space(3);
        let pi = canonical(3);
        let f = c.parse("exp(q3) - exp(-q1)").unwrap();
        let g = c.parse("p1 + p2 + p3").unwrap();
        let lhs = koszul_bracket(&pi, &d(&c, "exp(q3) - exp(-q1)"), &d(&c, "p1 + p2 + p3")).unwrap();
        assert_eq!(lhs, Form::function(pi.poisson(&f, &g)).d());
        assert_eq!(lhs, -&d(&c, "exp(q3) + exp(-q1)"));
    }

    #[test]
    fn functions_bracket_to_zero() {
        let c = Chart::phase_space(1);
        let f = Form::function(c.parse("q1").unwrap());
        let g = Form::function(c.parse("p1").unwrap());
        let b = koszul_bracket(&canonical(1), &f, &g).unwrap();
        assert!(b.is_zero());
        assert_eq!(b.degree(), 0);
    }

    #[test]
    fn one_form_and_function() {
        let c = Chart::phase_space(1);
        let pi = canonical(1);
        let a = Form::dx(2, 1);
        let f = Form::function(c.parse("q1^2").unwrap());
        // pi# dp1 = d/dq1
        assert_eq!(koszul_bracket(&pi, &a, &f).unwrap().as_function(), c.parse("2*q1").unwrap());
        assert_eq!(koszul_bracket(&pi, &f, &a).unwrap().as_function(), c.parse("-2*q1").unwrap());
    }

    #[test]
    fn chart_mismatch_is_an_error() {
        assert!(koszul_bracket(&canonical(1), &Form::dx(2, 0), &Form::dx(4, 0)).is_err());
    }
}
