//! Built-in Toda-type structures, their standard deforming 2-forms, and the JSON
//! model file format.

mod dn;
mod file;
pub mod reference;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{Chart, ExprError, ScalarExpr};
use crate::forms::{Bivector, CoordinateMap, Endomorphism, Form, FormError};
use crate::pqn::{deform, PqNStructure, PqnError};

pub use dn::{dn_hamiltonian, dn_reference, validate_dn_model, DnReference};
pub use file::{load_model, model_from_json, model_to_json, save_model, write_atomic};
use reference::sum_p;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("particle number must be at least 2, got {0}")]
    TooFewParticles(usize),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error in {location}: {source}")]
    Parse {
        location: String,
        #[source]
        source: ExprError,
    },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Pqn(#[from] PqnError),
}

/// A structure with the named scalars and 2-forms that go with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDescriptor {
    pub name: String,
    /// Particle number, when the chart is `q1..qn, p1..pn`.
    pub n: Option<usize>,
    pub structure: PqNStructure,
    pub scalars: BTreeMap<String, ScalarExpr>,
    pub two_forms: BTreeMap<String, Form>,
}

impl ModelDescriptor {
    pub fn new(
        name: impl Into<String>,
        structure: PqNStructure,
        scalars: BTreeMap<String, ScalarExpr>,
        two_forms: BTreeMap<String, Form>,
    ) -> Self {
        let n = particle_number(&structure.chart);
        ModelDescriptor { name: name.into(), n, structure, scalars, two_forms }
    }

    pub fn chart(&self) -> &Chart {
        &self.structure.chart
    }

    pub fn scalar(&self, name: &str) -> Option<&ScalarExpr> {
        self.scalars.get(name)
    }

    /// `d` of a named scalar.
    pub fn exact_form(&self, name: &str) -> Option<Form> {
        self.scalars.get(name).map(|e| Form::function(e.clone()).d())
    }
}

fn particle_number(chart: &Chart) -> Option<usize> {
    let m = chart.dim();
    if !m.is_multiple_of(2) {
        return None;
    }
    let n = m / 2;
    (chart == &Chart::phase_space(n)).then_some(n)
}

fn require_n(n: usize) -> Result<(), ModelError> {
    if n < 2 {
        return Err(ModelError::TooFewParticles(n));
    }
    Ok(())
}

fn parse(chart: &Chart, s: &str) -> ScalarExpr {
    chart.parse(s).expect("built-in expression")
}

/// Chart `q1..qn, p1..pn` with `{p_i, q_j} = delta_ij`.
pub fn canonical_phase_space(n: usize) -> Result<(Chart, Bivector), ModelError> {
    require_n(n)?;
    Ok((Chart::phase_space(n), canonical_bivector(n)))
}

pub(crate) fn canonical_bivector(n: usize) -> Bivector {
    let mut pi = Bivector::zero(2 * n);
    for i in 0..n {
        pi.set(n + i, i, ScalarExpr::one(2 * n));
    }
    pi
}

/// Das-Okubo PN structure of the open Toda lattice.
pub fn das_okubo_toda(n: usize) -> Result<PqNStructure, ModelError> {
    let (chart, pi) = canonical_phase_space(n)?;
    let m = 2 * n;
    let mut nt = Endomorphism::zero(m);
    for i in 0..n {
        let p = chart.coord(n + i);
        nt.set(i, i, p.clone());
        nt.set(n + i, n + i, p);
        for j in (i + 1)..n {
            nt.set(i, n + j, ScalarExpr::one(m));
            nt.set(j, n + i, ScalarExpr::integer(m, -1));
        }
    }
    for i in 0..n - 1 {
        let e = parse(&chart, &format!("exp(q{}-q{})", i + 1, i + 2));
        nt.set(n + i + 1, i, e.clone());
        nt.set(n + i, i + 1, -e);
    }
    Ok(PqNStructure::pn(chart, pi, nt)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardTwoForms {
    pub omega1: Form,
    pub omega2: Form,
    pub omega_ts: Form,
    pub omega_bc: Form,
}

impl StandardTwoForms {
    pub fn named(&self) -> BTreeMap<String, Form> {
        [
            ("omega1", &self.omega1),
            ("omega2", &self.omega2),
            ("omega-ts", &self.omega_ts),
            ("omega-bc", &self.omega_bc),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
    }
}

fn exact(chart: &Chart, s: &str) -> Form {
    Form::function(parse(chart, s)).d()
}

pub fn standard_two_forms(n: usize) -> Result<StandardTwoForms, ModelError> {
    require_n(n)?;
    let c = Chart::phase_space(n);
    let ef = exact(&c, &format!("exp(q{n})"));
    let eg = exact(&c, "exp(-q1)");
    let omega1 = ef.wedge(&eg)?;
    let sum_dp = exact(&c, &sum_p(n));
    let omega2 = (&ef - &eg).wedge(&sum_dp)?;
    let omega_ts = &omega1 + &omega2;
    let omega_bc = exact(&c, "exp(-2*q1)").wedge(&exact(&c, "p1"))?;
    let forms = StandardTwoForms { omega1, omega2, omega_ts, omega_bc };
    for f in forms.named().values() {
        debug_assert!(f.d().is_zero());
    }
    Ok(forms)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedStructures {
    pub n_minus: PqNStructure,
    pub n_plus: PqNStructure,
    pub n_ts: PqNStructure,
    pub n_2: PqNStructure,
}

pub fn derived_structures(n: usize) -> Result<DerivedStructures, ModelError> {
    let base = das_okubo_toda(n)?;
    let w = standard_two_forms(n)?;
    Ok(DerivedStructures {
        n_minus: deform(&base, &w.omega1)?,
        n_plus: deform(&base, &w.omega1.scale_int(-1))?,
        n_ts: deform(&base, &w.omega_ts)?,
        n_2: deform(&base, &w.omega2)?,
    })
}

/// The canonical transformation `P_1 = p_1 - e^{-q_1}`, `P_n = p_n - e^{q_n}`, all other
/// coordinates fixed, from Das-Okubo coordinates to Tsiganov coordinates.
pub fn tsiganov_map(n: usize) -> Result<CoordinateMap, ModelError> {
    require_n(n)?;
    let c = Chart::phase_space(n);
    let mut fwd: Vec<String> = c.names().to_vec();
    let mut inv = fwd.clone();
    fwd[n] = "p1 - exp(-q1)".into();
    inv[n] = "p1 + exp(-q1)".into();
    fwd[2 * n - 1] = format!("p{n} - exp(q{n})");
    inv[2 * n - 1] = format!("p{n} + exp(q{n})");
    let fwd: Vec<&str> = fwd.iter().map(String::as_str).collect();
    let inv: Vec<&str> = inv.iter().map(String::as_str).collect();
    Ok(CoordinateMap::parse(c.clone(), c, &fwd, &inv)?)
}

/// Separable PN structure on `R^4` with its deforming data.
#[derive(Debug, Clone)]
pub struct SeparableExample {
    pub structure: PqNStructure,
    pub h: ScalarExpr,
    pub tr_l: ScalarExpr,
    /// The 2-form as displayed.
    pub omega: Form,
    /// The deformed tensor as displayed.
    pub n_hat_displayed: Endomorphism,
}

pub fn separable_example() -> SeparableExample {
    let chart = Chart::phase_space(2);
    let h = parse(&chart, "1/2*(p1^2 + p2^2) + 1/2*(q1^-2 + q2^-2)");
    let tr_l = parse(&chart, "q1^2 + q2^2");
    let structure = PqNStructure::pn(chart, canonical_bivector(2), reference::separable_n()).expect("dims");
    SeparableExample {
        structure,
        h,
        tr_l,
        omega: reference::separable_omega_displayed(),
        n_hat_displayed: reference::separable_n_hat_displayed(),
    }
}

pub const BUILTIN_MODELS: [&str; 6] = ["das-okubo", "n-minus", "n-plus", "n-ts", "n-2", "separable"];

/// Built-in model by name. Toda models carry `factor_beta`, `factor_gamma` potentials with
/// `phi = dH_1 ^ d(factor_beta) ^ d(factor_gamma)`.
pub fn builtin(name: &str, n: usize) -> Result<ModelDescriptor, ModelError> {
    if name == "separable" {
        let ex = separable_example();
        let scalars = [("h", ex.h), ("trL", ex.tr_l), ("factor_beta", ScalarExpr::zero(4)), ("factor_gamma", ScalarExpr::zero(4))]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let two_forms = [("omega".to_string(), ex.omega)].into_iter().collect();
        return Ok(ModelDescriptor::new(name, ex.structure, scalars, two_forms));
    }
    if !BUILTIN_MODELS.contains(&name) {
        return Err(ModelError::UnknownModel(name.to_string()));
    }
    require_n(n)?;
    let c = Chart::phase_space(n);
    let forms = standard_two_forms(n)?;
    let mut scalars: BTreeMap<String, ScalarExpr> = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        scalars.insert(k.to_string(), parse(&c, &v));
    };
    put("I", sum_p(n));
    let (structure, beta, gamma) = match name {
        "das-okubo" => {
            put("f", format!("exp(q{n}) - exp(-q1)"));
            put("g", sum_p(n));
            put("h", format!("{} + 1/2*(exp(q{n}) + exp(-q1))", sum_p(n)));
            (das_okubo_toda(n)?, "0".to_string(), "0".to_string())
        }
        "n-minus" => {
            put("f", format!("exp(q{n})"));
            put("g", "exp(-q1)".into());
            (derived_structures(n)?.n_minus, "2*exp(-q1)".into(), format!("exp(q{n})"))
        }
        "n-plus" => {
            put("f", format!("-exp(q{n})"));
            put("g", "exp(-q1)".into());
            (derived_structures(n)?.n_plus, "-2*exp(-q1)".into(), format!("exp(q{n})"))
        }
        "n-ts" => (derived_structures(n)?.n_ts, "0".into(), "0".into()),
        "n-2" => (derived_structures(n)?.n_2, format!("2*exp(q{n})"), "exp(-q1)".into()),
        _ => unreachable!(),
    };
    put("factor_beta", beta);
    put("factor_gamma", gamma);
    Ok(ModelDescriptor::new(name, structure, scalars, forms.named()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pqn::{classify_structure, Label};

    #[test]
    fn canonical_bracket() {
        let (c, pi) = canonical_phase_space(2).unwrap();
        assert_eq!(c.dim(), 4);
        assert_eq!(pi.poisson(&c.coord(2), &c.coord(0)), ScalarExpr::one(4));
        assert!(pi.poisson(&c.coord(0), &c.coord(1)).is_zero());
        assert!(canonical_phase_space(1).is_err());
    }

    #[test]
    fn das_okubo_matches_display() {
        let s = das_okubo_toda(3).unwrap();
        assert_eq!(s.n, reference::das_okubo_n3());
        assert_eq!(s.n.entry(3, 1).to_string_in(&s.chart), "-exp(q1 - q2)");
        assert!(das_okubo_toda(1).is_err());
    }

    #[test]
    fn two_forms_are_closed_and_add_up() {
        for n in 2..=4 {
            let w = standard_two_forms(n).unwrap();
            for f in w.named().values() {
                assert!(f.d().is_zero());
            }
            assert!((&(&w.omega_ts - &w.omega1) - &w.omega2).is_zero());
        }
        let w = standard_two_forms(2).unwrap();
        let c = Chart::phase_space(2);
        let expected = Form::dx(4, 0).wedge(&Form::dx(4, 2)).unwrap().mul_fn(&c.parse("-2*exp(-2*q1)").unwrap());
        assert_eq!(w.omega_bc, expected);
    }

    #[test]
    fn builtins_have_documented_labels() {
        for (name, label) in
            [("das-okubo", Label::Pn), ("n-minus", Label::Pqn), ("n-ts", Label::Pn), ("n-2", Label::Pqn), ("separable", Label::Pn)]
        {
            let d = builtin(name, 2).unwrap();
            let (got, report) = classify_structure(&d.structure);
            assert_eq!(got, label, "{name}: {report:?}");
        }
        assert!(builtin("nope", 2).is_err());
    }
}
