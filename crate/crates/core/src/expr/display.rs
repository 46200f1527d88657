use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{Chart, Monomial, ScalarExpr, Weight};

/// Prints an expression in the input grammar, so that parsing the output gives
/// back the same canonical expression.
pub struct ExprDisplay<'a> {
    expr: &'a ScalarExpr,
    chart: &'a Chart,
}

impl<'a> ExprDisplay<'a> {
    pub(super) fn new(expr: &'a ScalarExpr, chart: &'a Chart) -> Self {
        ExprDisplay { expr, chart }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self.expr, self.chart.names()))
    }
}

fn weight_str(w: &Weight) -> String {
    if w.is_integer() {
        w.numer().to_string()
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

fn linform(weights: &[Weight], names: &[String]) -> String {
    let mut out = String::new();
    for (w, name) in weights.iter().zip(names) {
        if w.is_zero() {
            continue;
        }
        if out.is_empty() {
            if w.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if w.is_negative() { " - " } else { " + " });
        }
        let a = w.abs();
        if !a.is_one() {
            out.push_str(&weight_str(&a));
            out.push('*');
        }
        out.push_str(name);
    }
    out
}

fn factors(m: &Monomial, names: &[String]) -> Vec<String> {
    let mut out: Vec<String> = m
        .powers()
        .iter()
        .zip(names)
        .filter(|(p, _)| **p != 0)
        .map(|(&p, name)| if p == 1 { name.clone() } else { format!("{name}^{p}") })
        .collect();
    if m.weights().iter().any(|w| !w.is_zero()) {
        out.push(format!("exp({})", linform(m.weights(), names)));
    }
    out
}

pub(super) fn render(e: &ScalarExpr, names: &[String]) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in e.terms().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = super::abs_coeff(c);
        let fs = factors(m, names);
        if fs.is_empty() {
            out.push_str(&mag.to_string());
        } else {
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            out.push_str(&fs.join("*"));
        }
    }
    out
}
