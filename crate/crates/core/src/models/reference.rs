//! Displayed three-particle matrices and the separable four-dimensional example,
//! kept verbatim as independent reference data.

use crate::expr::Chart;
use crate::forms::{Endomorphism, Form};

fn matrix(chart: &Chart, rows: &[[&str; 6]]) -> Endomorphism {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|s| chart.parse(s).expect("reference entry")).collect())
        .collect();
    Endomorphism::from_rows(rows).expect("square")
}

fn matrix4(chart: &Chart, rows: &[[&str; 4]]) -> Endomorphism {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|s| chart.parse(s).expect("reference entry")).collect())
        .collect();
    Endomorphism::from_rows(rows).expect("square")
}

/// Das-Okubo tensor for three particles.
pub fn das_okubo_n3() -> Endomorphism {
    matrix(
        &Chart::phase_space(3),
        &[
            ["p1", "0", "0", "0", "1", "1"],
            ["0", "p2", "0", "-1", "0", "1"],
            ["0", "0", "p3", "-1", "-1", "0"],
            ["0", "-exp(q1-q2)", "0", "p1", "0", "0"],
            ["exp(q1-q2)", "0", "-exp(q2-q3)", "0", "p2", "0"],
            ["0", "exp(q2-q3)", "0", "0", "0", "p3"],
        ],
    )
}

/// Tsiganov tensor for three particles.
pub fn tsiganov_n3() -> Endomorphism {
    matrix(
        &Chart::phase_space(3),
        &[
            ["p1+exp(-q1)", "0", "exp(q3)", "0", "1", "1"],
            ["exp(-q1)", "p2", "exp(q3)", "-1", "0", "1"],
            ["exp(-q1)", "0", "p3+exp(q3)", "-1", "-1", "0"],
            ["0", "-exp(q1-q2)", "exp(q3-q1)", "p1+exp(-q1)", "exp(-q1)", "exp(-q1)"],
            ["exp(q1-q2)", "0", "-exp(q2-q3)", "0", "p2", "0"],
            ["-exp(q3-q1)", "exp(q2-q3)", "0", "exp(q3)", "exp(q3)", "p3+exp(q3)"],
        ],
    )
}

/// `N_-` for three particles.
pub fn n_minus_n3() -> Endomorphism {
    matrix(
        &Chart::phase_space(3),
        &[
            ["p1", "0", "0", "0", "1", "1"],
            ["0", "p2", "0", "-1", "0", "1"],
            ["0", "0", "p3", "-1", "-1", "0"],
            ["0", "-exp(q1-q2)", "exp(q3-q1)", "p1", "0", "0"],
            ["exp(q1-q2)", "0", "-exp(q2-q3)", "0", "p2", "0"],
            ["-exp(q3-q1)", "exp(q2-q3)", "0", "0", "0", "p3"],
        ],
    )
}

/// `N_2` for three particles.
pub fn n2_n3() -> Endomorphism {
    matrix(
        &Chart::phase_space(3),
        &[
            ["p1+exp(-q1)", "0", "exp(q3)", "0", "1", "1"],
            ["exp(-q1)", "p2", "exp(q3)", "-1", "0", "1"],
            ["exp(-q1)", "0", "p3+exp(q3)", "-1", "-1", "0"],
            ["0", "-exp(q1-q2)", "0", "p1+exp(-q1)", "exp(-q1)", "exp(-q1)"],
            ["exp(q1-q2)", "0", "-exp(q2-q3)", "0", "p2", "0"],
            ["0", "exp(q2-q3)", "0", "exp(q3)", "exp(q3)", "p3+exp(q3)"],
        ],
    )
}

/// `phi_- = 2 e^{q_n - q_1} dI ^ dq_n ^ dq_1` with `I = sum p_i`.
pub fn phi_minus(n: usize) -> Form {
    let c = Chart::phase_space(n);
    let m = 2 * n;
    let coeff = c.parse(&format!("2*exp(q{n}-q1)")).expect("valid");
    let di = Form::function(c.parse(&sum_p(n)).expect("valid")).d();
    di.wedge(&Form::dx(m, n - 1))
        .and_then(|f| f.wedge(&Form::dx(m, 0)))
        .expect("same dimension")
        .mul_fn(&coeff)
}

pub(crate) fn sum_p(n: usize) -> String {
    (1..=n).map(|i| format!("p{i}")).collect::<Vec<_>>().join(" + ")
}

/// Cotangent lift of `L = [[q1^2, q1 q2], [q1 q2, q2^2]]` on `(q1, q2, p1, p2)`.
pub fn separable_n() -> Endomorphism {
    matrix4(
        &Chart::phase_space(2),
        &[
            ["q1^2", "q1*q2", "0", "0"],
            ["q1*q2", "q2^2", "0", "0"],
            ["0", "q1*p2-q2*p1", "q1^2", "q1*q2"],
            ["q2*p1-q1*p2", "0", "q1*q2", "q2^2"],
        ],
    )
}

/// The deformed separable tensor exactly as displayed.
pub fn separable_n_hat_displayed() -> Endomorphism {
    matrix4(
        &Chart::phase_space(2),
        &[
            ["q1^2+2*p1*q1", "q1*q2+2*p1*q2", "0", "0"],
            ["q1*q2+2*p2*q1", "q2^2+2*p2*q2", "0", "0"],
            ["0", "q1*p2-q2*p1", "q1^2+2*p1*q1", "q1*q2+2*p1*q2"],
            ["q2*p1-q1*p2", "0", "q1*q2+2*p2*q1", "q2^2+2*p2*q2"],
        ],
    )
}

/// `-2 (p1 q1 dp1^dq1 + p2 q1 dp2^dq1 + p1 q2 dp1^dq2 + p2 q2 dp2^dq2)`.
pub fn separable_omega_displayed() -> Form {
    let c = Chart::phase_space(2);
    let (q1, q2, p1, p2) = (0, 1, 2, 3);
    let terms = [("p1*q1", p1, q1), ("p2*q1", p2, q1), ("p1*q2", p1, q2), ("p2*q2", p2, q2)];
    let mut out = Form::zero(4, 2);
    for (coeff, a, b) in terms {
        let t = Form::dx(4, a).wedge(&Form::dx(4, b)).expect("dim").mul_fn(&c.parse(coeff).expect("valid"));
        out = &out + &t;
    }
    out.scale_int(-2)
}
