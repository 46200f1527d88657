use std::fmt;

use serde::{Deserialize, Serialize};

use super::PqnError;
use crate::expr::Chart;
use crate::forms::{check_dims, Bivector, Endomorphism, Form};

/// Chart, Poisson bivector, (1,1) tensor and closed 3-form. Validity is established
/// by [`super::classify_structure`], not by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PqNStructure {
    pub chart: Chart,
    pub pi: Bivector,
    pub n: Endomorphism,
    pub phi: Form,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "PN")]
    Pn,
    #[serde(rename = "PqN")]
    Pqn,
    #[serde(rename = "invalid")]
    Invalid,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Pn => "PN",
            Label::Pqn => "PqN",
            Label::Invalid => "invalid",
        })
    }
}

impl PqNStructure {
    pub fn new(chart: Chart, pi: Bivector, n: Endomorphism, phi: Form) -> Result<Self, PqnError> {
        let m = chart.dim();
        check_dims(m, pi.dim())?;
        check_dims(m, n.dim())?;
        check_dims(m, phi.dim())?;
        if phi.degree() != 3 {
            return Err(PqnError::Invalid(format!("phi must be a 3-form, got degree {}", phi.degree())));
        }
        Ok(PqNStructure { chart, pi, n, phi })
    }

    /// PN pair: `phi = 0`.
    pub fn pn(chart: Chart, pi: Bivector, n: Endomorphism) -> Result<Self, PqnError> {
        let m = chart.dim();
        Self::new(chart, pi, n, Form::zero(m, 3))
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn with_phi(&self, phi: Form) -> Result<Self, PqnError> {
        Self::new(self.chart.clone(), self.pi.clone(), self.n.clone(), phi)
    }
}
