//! Verification layer for PN and PqN structures: Poisson and compatibility checks,
//! the `H_k` hierarchy with its obstruction 1-forms, deformations by closed 2-forms,
//! and the involutivity identities for factorized 3-forms.

mod checks;
mod deform;
mod hierarchy;
mod report;
mod structure;
mod involution;

use thiserror::Error;

use crate::forms::FormError;

pub use checks::{
    check_compatibility, check_derivation_property, check_poisson, classify_structure,
    compatibility_concomitant,
};
pub use deform::{deform, factorized_deform, pi_sharp_omega_flat, FactorizedDeformation};
pub use hierarchy::{hierarchy, Hierarchy};
pub use report::{Check, CheckReport};
pub use structure::{Label, PqNStructure};
pub use involution::{
    involutivity_table, verify_recursion_identity, verify_section4_identities, verify_theorem1,
    verify_theorem3,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PqnError {
    #[error("2-form is not closed: d(Omega) = {witness}")]
    NotClosed { witness: String },
    #[error("hypothesis `{name}` fails: residual {witness}")]
    Hypothesis { name: String, witness: String },
    #[error("identity `{name}` fails: residual {witness}")]
    Identity { name: String, witness: String },
    #[error("factorization mismatch: phi - alpha^beta^gamma = {witness}")]
    Factorization { witness: String },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Form(#[from] FormError),
}
