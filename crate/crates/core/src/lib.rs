//! Exact symbolic engine for Poisson-Nijenhuis (PN) and Poisson quasi-Nijenhuis
//! (PqN) structures on coordinate charts.
//!
//! Layers, bottom-up:
//! - [`expr`]: exact scalar fields (rational sums of Laurent monomials times
//!   exponentials of linear forms) with a text grammar and decidable zero test;
//! - [`forms`]: forms, vector fields, bivectors, (1,1) tensors and the operators
//!   built from them (wedge, d, interior products, Lie derivatives, `i_N`, `d_N`,
//!   Nijenhuis torsion, Koszul bracket, push-forward along coordinate changes);
//! - [`pqn`]: structure checks, the `H_k` hierarchy, deformations by closed
//!   2-forms and the involutivity identities;
//! - [`models`]: built-in Toda-type structures and the JSON model file format;
//! - [`flow`]: RK4 integration of Hamiltonian fields with conservation reports.

pub mod expr;
pub mod forms;
pub mod flow;
pub mod models;
pub mod pqn;
