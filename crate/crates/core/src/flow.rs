//! Fixed-step RK4 integration of Hamiltonian vector fields and conservation reports.

use std::fmt::Write;

use thiserror::Error;

use crate::expr::{CompiledExpr, ExprError, ScalarExpr};
use crate::forms::{Bivector, VectorField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid integration parameters: {0}")]
    Invalid(String),
    #[error("pole hit at step {step}; trajectory truncated")]
    Pole { step: usize, partial: Trajectory },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dt: f64,
    pub method: String,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// CSV with header `t,x1,...,xm` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let m = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=m {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t:.16e}");
            for v in x {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

/// `X_H = pi# dH`.
pub fn hamiltonian_vf(pi: &Bivector, h: &ScalarExpr) -> VectorField {
    pi.hamiltonian(h)
}

/// `q_i = (i-1)/n`, `p_i = (-1)^i / 2`.
pub fn default_initial_state(n: usize) -> Vec<f64> {
    let q = (1..=n).map(|i| (i - 1) as f64 / n as f64);
    let p = (1..=n).map(|i| if i % 2 == 0 { 0.5 } else { -0.5 });
    q.chain(p).collect()
}

fn eval_field(field: &[CompiledExpr], x: &[f64]) -> Result<Vec<f64>, ExprError> {
    field.iter().map(|c| c.eval(x)).collect()
}

fn axpy(x: &[f64], a: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(xi, ki)| xi + a * ki).collect()
}

/// Classical fixed-step fourth-order Runge-Kutta.
pub fn integrate_rk4(x: &VectorField, x0: &[f64], dt: f64, steps: usize) -> Result<Trajectory, FlowError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FlowError::Invalid(format!("dt must be positive, got {dt}")));
    }
    if steps == 0 {
        return Err(FlowError::Invalid("steps must be at least 1".into()));
    }
    if x0.len() != x.dim() {
        return Err(ExprError::DimensionMismatch { left: x.dim(), right: x0.len() }.into());
    }
    let field: Vec<CompiledExpr> = x.components().iter().map(CompiledExpr::new).collect();
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        dt,
        method: "rk4".into(),
    };
    traj.times.push(0.0);
    traj.states.push(x0.to_vec());
    for step in 1..=steps {
        let y = traj.last().to_vec();
        let stage = || -> Result<Vec<f64>, ExprError> {
            let k1 = eval_field(&field, &y)?;
            let k2 = eval_field(&field, &axpy(&y, dt / 2.0, &k1))?;
            let k3 = eval_field(&field, &axpy(&y, dt / 2.0, &k2))?;
            let k4 = eval_field(&field, &axpy(&y, dt, &k3))?;
            Ok((0..y.len()).map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
        };
        match stage() {
            Ok(next) if next.iter().all(|v| v.is_finite()) => {
                traj.times.push(step as f64 * dt);
                traj.states.push(next);
            }
            Ok(_) | Err(ExprError::Pole { .. }) => return Err(FlowError::Pole { step, partial: traj }),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(traj)
}

/// `max_t |f(x_t) - f(x_0)| / max(1, |f(x_0)|)` for each function.
pub fn conservation_report(traj: &Trajectory, funcs: &[ScalarExpr]) -> Result<Vec<f64>, FlowError> {
    funcs
        .iter()
        .map(|f| {
            let c = CompiledExpr::new(f);
            let Some(x0) = traj.states.first() else { return Ok(0.0) };
            let f0 = c.eval(x0)?;
            let mut drift: f64 = 0.0;
            for x in &traj.states {
                drift = drift.max((c.eval(x)? - f0).abs());
            }
            Ok(drift / f0.abs().max(1.0))
        })
        .collect()
}

/// Reads an initial state: the last non-empty line of numbers, comma separated.
/// A leading header line is skipped.
pub fn parse_initial_state(text: &str) -> Result<Vec<f64>, FlowError> {
    let line = text
        .lines()
        .map(str::trim)
        .rfind(|l| !l.is_empty())
        .ok_or_else(|| FlowError::Invalid("initial state file is empty".into()))?;
    line.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| FlowError::Invalid(format!("not a number: `{}`", t.trim()))))
        .collect()
}
