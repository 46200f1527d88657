use super::{CheckReport, Label, PqNStructure};
use crate::expr::{Chart, ScalarExpr};
use crate::forms::{koszul_bracket, Bivector, Endomorphism, Form, VectorField};

fn witness_expr(chart: &Chart, idx: &[usize], e: &ScalarExpr) -> String {
    let names: Vec<&str> = idx.iter().map(|&i| chart.name(i)).collect();
    format!("({}): {}", names.join(","), e.to_string_in(chart))
}

/// Jacobi identity on all coordinate triples `i < j < k`.
pub fn check_poisson(chart: &Chart, pi: &Bivector) -> CheckReport {
    let mut report = CheckReport::new("poisson");
    report.record("jacobi", jacobi_witness(chart, pi));
    report
}

fn jacobi_witness(chart: &Chart, pi: &Bivector) -> Option<String> {
    let m = pi.dim();
    // {{x_i,x_j},x_k} = sum_l d_l(pi^{ij}) pi^{lk}
    let outer = |i: usize, j: usize, k: usize| {
        let pij = pi.get(i, j);
        let mut acc = ScalarExpr::zero(m);
        if pij.is_zero() {
            return acc;
        }
        for l in 0..m {
            let plk = pi.get(l, k);
            if !plk.is_zero() {
                acc += &pij.diff(l) * &plk;
            }
        }
        acc
    };
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let s = &(&outer(i, j, k) + &outer(j, k, i)) + &outer(k, i, j);
                if !s.is_zero() {
                    return Some(witness_expr(chart, &[i, j, k], &s));
                }
            }
        }
    }
    None
}

/// Both conditions of compatibility: `N pi# = pi# N*` and the vanishing concomitant
/// on coordinate 1-forms and coordinate fields.
pub fn check_compatibility(chart: &Chart, pi: &Bivector, n: &Endomorphism) -> CheckReport {
    let mut report = CheckReport::new("compatibility");
    report.record("n_pi_skew", skew_witness(chart, pi, n));
    report.record("concomitant", concomitant_witness(chart, pi, n));
    report
}

fn skew_witness(chart: &Chart, pi: &Bivector, n: &Endomorphism) -> Option<String> {
    let m = pi.dim();
    let p = pi.matrix();
    for a in 0..m {
        for k in 0..m {
            // (N pi# dx_k)^a versus (pi# N* dx_k)^a
            let mut lhs = ScalarExpr::zero(m);
            let mut rhs = ScalarExpr::zero(m);
            for j in 0..m {
                if !n.entry(a, j).is_zero() && !p[k][j].is_zero() {
                    lhs += n.entry(a, j) * &p[k][j];
                }
                if !n.entry(k, j).is_zero() && !p[j][a].is_zero() {
                    rhs += n.entry(k, j) * &p[j][a];
                }
            }
            let r = &lhs - &rhs;
            if !r.is_zero() {
                return Some(witness_expr(chart, &[a, k], &r));
            }
        }
    }
    None
}

/// `L_{pi# a}(N) X - pi# L_X(N* a) + pi# L_{N X} a` for a 1-form `a` and field `X`.
pub fn compatibility_concomitant(
    pi: &Bivector,
    n: &Endomorphism,
    a: &Form,
    x: &VectorField,
) -> VectorField {
    let pa = pi.sharp_raw(a);
    let t1 = n.lie_raw(&pa).apply_raw(x);
    let t2 = pi.sharp_raw(&n.transpose_apply(a).expect("1-form").lie_raw(x));
    let t3 = pi.sharp_raw(&a.lie_raw(&n.apply_raw(x)));
    &(&t1 - &t2) + &t3
}

fn concomitant_witness(chart: &Chart, pi: &Bivector, n: &Endomorphism) -> Option<String> {
    let m = pi.dim();
    for a in 0..m {
        let dxa = Form::dx(m, a);
        let pa = pi.sharp_raw(&dxa);
        let lie_n = n.lie_raw(&pa);
        let na = n.transpose_apply(&dxa).expect("1-form");
        for b in 0..m {
            let x = VectorField::coordinate(m, b);
            let t1 = lie_n.apply_raw(&x);
            let t2 = pi.sharp_raw(&na.lie_raw(&x));
            let t3 = pi.sharp_raw(&dxa.lie_raw(&n.column(b)));
            let c = &(&t1 - &t2) + &t3;
            if let Some(k) = (0..m).find(|&k| !c.component(k).is_zero()) {
                let names = format!("d{}, d/d{}", chart.name(a), chart.name(b));
                return Some(format!("({names}) component {}: {}", chart.name(k), c.component(k).to_string_in(chart)));
            }
        }
    }
    None
}

/// `d_N` acting as a derivation of the Koszul bracket on the given pairs of forms.
pub fn check_derivation_property(
    chart: &Chart,
    pi: &Bivector,
    n: &Endomorphism,
    pairs: &[(Form, Form)],
) -> CheckReport {
    let mut report = CheckReport::new("d_n_derivation");
    let mut witness = None;
    for (k, (a, b)) in pairs.iter().enumerate() {
        let lhs = match koszul_bracket(pi, a, b) {
            Ok(f) => f.d_n_raw(n),
            Err(e) => {
                witness = Some(format!("pair {k}: {e}"));
                break;
            }
        };
        let sign = if a.degree() % 2 == 1 { 1 } else { -1 };
        let r1 = koszul_bracket(pi, &a.d_n_raw(n), b).expect("dims checked");
        let r2 = koszul_bracket(pi, a, &b.d_n_raw(n)).expect("dims checked");
        let resid = &(&lhs - &r1) - &r2.scale_int(sign);
        if !resid.is_zero() {
            witness = Some(format!("pair {k}: {}", resid.display(chart)));
            break;
        }
    }
    report.record("derivation", witness);
    report
}

pub(crate) fn form_witness(chart: &Chart, f: &Form) -> Option<String> {
    if f.is_zero() {
        None
    } else {
        Some(f.display(chart))
    }
}

pub(crate) fn torsion_matching_witness(s: &PqNStructure) -> Option<String> {
    let m = s.dim();
    let t = s.n.torsion();
    for i in 0..m {
        for j in (i + 1)..m {
            let xi = VectorField::coordinate(m, i);
            let xj = VectorField::coordinate(m, j);
            let rhs = match s.phi.interior_bivector(&xi, &xj) {
                Ok(f) => s.pi.sharp_raw(&f),
                Err(_) => VectorField::zero(m),
            };
            let r = &t.get(i, j) - &rhs;
            if let Some(k) = (0..m).find(|&k| !r.component(k).is_zero()) {
                return Some(format!(
                    "(d/d{}, d/d{}) component {}: {}",
                    s.chart.name(i),
                    s.chart.name(j),
                    s.chart.name(k),
                    r.component(k).to_string_in(&s.chart)
                ));
            }
        }
    }
    None
}

/// Runs every structural check and labels the result.
pub fn classify_structure(s: &PqNStructure) -> (Label, CheckReport) {
    let mut report = CheckReport::new("classify");
    report.extend_prefixed("", check_poisson(&s.chart, &s.pi));
    report.extend_prefixed("", check_compatibility(&s.chart, &s.pi, &s.n));
    report.record("phi_closed", form_witness(&s.chart, &s.phi.d()));
    report.record("i_n_phi_closed", form_witness(&s.chart, &s.phi.i_n_raw(&s.n).d()));
    report.record("torsion_matches_phi", torsion_matching_witness(s));
    let label = if !report.all_pass() {
        Label::Invalid
    } else if s.phi.is_zero() {
        Label::Pn
    } else {
        Label::Pqn
    };
    (label, report)
}
