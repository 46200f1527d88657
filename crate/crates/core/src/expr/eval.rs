use num_traits::ToPrimitive;

use super::{ExprError, ScalarExpr};

/// Floating-point form of an expression for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    nvars: usize,
    terms: Vec<CompiledTerm>,
}

#[derive(Debug, Clone)]
struct CompiledTerm {
    coeff: f64,
    powers: Vec<(usize, i32)>,
    weights: Vec<(usize, f64)>,
}

impl CompiledExpr {
    pub fn new(e: &ScalarExpr) -> Self {
        let terms = e
            .terms()
            .map(|(m, c)| CompiledTerm {
                coeff: c.to_f64().unwrap_or(f64::NAN),
                powers: m
                    .powers()
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p != 0)
                    .map(|(i, &p)| (i, p))
                    .collect(),
                weights: m
                    .weights()
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| *w.numer() != 0)
                    .map(|(i, w)| (i, *w.numer() as f64 / *w.denom() as f64))
                    .collect(),
            })
            .collect();
        CompiledExpr { nvars: e.nvars(), terms }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, ExprError> {
        if x.len() != self.nvars {
            return Err(ExprError::DimensionMismatch { left: self.nvars, right: x.len() });
        }
        let mut sum = 0.0;
        for t in &self.terms {
            let mut v = t.coeff;
            for &(i, p) in &t.powers {
                if p < 0 && x[i] == 0.0 {
                    return Err(ExprError::Pole { coord: i });
                }
                v *= x[i].powi(p);
            }
            if !t.weights.is_empty() {
                let arg: f64 = t.weights.iter().map(|&(i, w)| w * x[i]).sum();
                v *= arg.exp();
            }
            sum += v;
        }
        Ok(sum)
    }
}
