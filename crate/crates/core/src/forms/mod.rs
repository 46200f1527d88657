//! Coordinate tensor calculus on a single chart.
//!
//! Forms are stored by strictly increasing index tuples with the determinant
//! convention `(dx_i ^ dx_j)(X, Y) = X^i Y^j - X^j Y^i`. Endomorphisms act on
//! vector fields as `(N X)^i = sum_j N^i_j X^j`, so matrix rows are outputs.
//!
//! The Poisson sign convention is `{f, g} = pi(df, dg) = <dg, pi# df>` with
//! `pi^{ij} = {x_i, x_j}`, hence `(pi# a)^j = sum_i a_i pi^{ij}`.

mod fields;
mod form;
mod koszul;
mod transform;

use thiserror::Error;

use crate::expr::ExprError;

pub use fields::{Bivector, Endomorphism, TorsionTensor, VectorField};
pub use form::Form;
pub use koszul::koszul_bracket;
pub use transform::CoordinateMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("chart mismatch: dimension {left} vs {right}")]
    ChartMismatch { left: usize, right: usize },
    #[error("expected a form of degree {expected}, found degree {found}")]
    Degree { expected: String, found: usize },
    #[error("invalid tensor data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<(), FormError> {
    if left != right {
        return Err(FormError::ChartMismatch { left, right });
    }
    Ok(())
}

/// Sorts an index list, returning the permutation sign, or `None` on a repeated index.
pub(crate) fn sort_with_sign(mut idx: Vec<usize>) -> Option<(Vec<usize>, i64)> {
    let mut sign = 1;
    // insertion sort; tuples are short
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return None;
        }
    }
    for w in idx.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((idx, sign))
}

/// `(-1)^n` for possibly negative `n`.
pub(crate) fn parity(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}
