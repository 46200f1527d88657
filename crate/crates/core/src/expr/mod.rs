//! Exact scalar fields on a coordinate chart.
//!
//! A [`ScalarExpr`] is a finite sum of terms `c * x^a * exp(w . x)` where `c` is an
//! arbitrary-precision rational, `a` an integer exponent vector and `w` a rational
//! weight vector. Distinct `(w, a)` keys index linearly independent functions, so an
//! expression is zero exactly when its canonical map of terms is empty.

mod display;
mod eval;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use display::ExprDisplay;
pub use eval::CompiledExpr;
pub use parse::parse_expr;

/// Exact coefficient type.
pub type Coeff = BigRational;
/// Rational weight of a coordinate inside an exponential.
pub type Weight = Rational64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown coordinate `{name}` at byte {pos}")]
    UnknownCoordinate { name: String, pos: usize },
    #[error("non-integer exponent at byte {pos}")]
    NonIntegerExponent { pos: usize },
    #[error("argument of exp at byte {pos} is not a rational-linear form in the coordinates")]
    NonLinearExp { pos: usize },
    #[error("result leaves the expression class: {0}")]
    OutOfClass(String),
    #[error("pole: coordinate {coord} vanishes while carrying a negative exponent")]
    Pole { coord: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
}

/// Ordered list of coordinate names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    coords: Vec<String>,
}

impl Chart {
    pub fn new<I, S>(names: I) -> Result<Self, ExprError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let coords: Vec<String> = names.into_iter().map(Into::into).collect();
        if coords.is_empty() {
            return Err(ExprError::InvalidChart("a chart needs at least one coordinate".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            let mut chars = c.chars();
            let ok = matches!(chars.next(), Some(ch) if ch.is_ascii_alphabetic())
                && chars.all(|ch| ch.is_ascii_alphanumeric() || ch == '_');
            if !ok || c == "exp" {
                return Err(ExprError::InvalidChart(format!("bad coordinate name `{c}`")));
            }
            if coords[..i].contains(c) {
                return Err(ExprError::InvalidChart(format!("duplicate coordinate `{c}`")));
            }
        }
        Ok(Chart { coords })
    }

    /// Phase space chart `q1..qn, p1..pn`.
    pub fn phase_space(n: usize) -> Self {
        let coords = (1..=n)
            .map(|i| format!("q{i}"))
            .chain((1..=n).map(|i| format!("p{i}")))
            .collect();
        Chart { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.coords[i]
    }

    pub fn names(&self) -> &[String] {
        &self.coords
    }

    pub fn parse(&self, text: &str) -> Result<ScalarExpr, ExprError> {
        parse_expr(text, self)
    }

    /// The coordinate function `x_i`.
    pub fn coord(&self, i: usize) -> ScalarExpr {
        ScalarExpr::coordinate(self.dim(), i)
    }
}

/// Key of a term: the exponential weights first, then the Laurent powers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    weights: Box<[Weight]>,
    powers: Box<[i32]>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            weights: vec![Weight::zero(); nvars].into_boxed_slice(),
            powers: vec![0; nvars].into_boxed_slice(),
        }
    }

    pub fn new(powers: Vec<i32>, weights: Vec<Weight>) -> Self {
        assert_eq!(powers.len(), weights.len());
        Monomial { weights: weights.into_boxed_slice(), powers: powers.into_boxed_slice() }
    }

    pub fn powers(&self) -> &[i32] {
        &self.powers
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn is_one(&self) -> bool {
        self.powers.iter().all(|&p| p == 0) && self.weights.iter().all(Zero::is_zero)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            weights: self.weights.iter().zip(other.weights.iter()).map(|(a, b)| a + b).collect(),
            powers: self.powers.iter().zip(other.powers.iter()).map(|(a, b)| a + b).collect(),
        }
    }

    fn pow(&self, k: i32) -> Monomial {
        let kw = Weight::from_integer(k as i64);
        Monomial {
            weights: self.weights.iter().map(|w| w * kw).collect(),
            powers: self.powers.iter().map(|p| p * k).collect(),
        }
    }
}

/// Canonical sum of terms; the zero expression is the empty sum.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    nvars: usize,
    terms: BTreeMap<Monomial, Coeff>,
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", display::render(self, &names))
    }
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> Coeff {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl ScalarExpr {
    pub fn zero(nvars: usize) -> Self {
        ScalarExpr { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Coeff::one())
    }

    pub fn constant(nvars: usize, c: Coeff) -> Self {
        Self::term(nvars, c, Monomial::one(nvars))
    }

    pub fn integer(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Coeff::from_integer(BigInt::from(c)))
    }

    pub fn term(nvars: usize, c: Coeff, m: Monomial) -> Self {
        assert_eq!(m.powers.len(), nvars, "monomial length differs from chart dimension");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        ScalarExpr { nvars, terms }
    }

    pub fn coordinate(nvars: usize, i: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.powers[i] = 1;
        Self::term(nvars, Coeff::one(), m)
    }

    /// `exp(sum_i w_i x_i)`.
    pub fn exp_linear(weights: Vec<Weight>) -> Self {
        let nvars = weights.len();
        Self::term(nvars, Coeff::one(), Monomial { weights: weights.into_boxed_slice(), powers: vec![0; nvars].into_boxed_slice() })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// Constant value, if the expression is a constant.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn display<'a>(&'a self, chart: &'a Chart) -> ExprDisplay<'a> {
        ExprDisplay::new(self, chart)
    }

    pub fn to_string_in(&self, chart: &Chart) -> String {
        self.display(chart).to_string()
    }

    fn check_dim(&self, other: &ScalarExpr) {
        assert_eq!(self.nvars, other.nvars, "scalar expressions from different charts");
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &ScalarExpr) -> Result<ScalarExpr, ExprError> {
        self.same_dim(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &ScalarExpr) -> Result<ScalarExpr, ExprError> {
        self.same_dim(other)?;
        Ok(self * other)
    }

    fn same_dim(&self, other: &ScalarExpr) -> Result<(), ExprError> {
        if self.nvars != other.nvars {
            return Err(ExprError::DimensionMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn scale(&self, c: &Coeff) -> ScalarExpr {
        if c.is_zero() {
            return ScalarExpr::zero(self.nvars);
        }
        ScalarExpr {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> ScalarExpr {
        self.scale(&Coeff::from_integer(BigInt::from(c)))
    }

    /// Integer power. Negative exponents are only in the class for single terms.
    pub fn pow(&self, k: i32) -> Result<ScalarExpr, ExprError> {
        if k >= 0 {
            let mut acc = ScalarExpr::one(self.nvars);
            let mut base = self.clone();
            let mut e = k as u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = &acc * &base;
                }
                e >>= 1;
                if e > 0 {
                    base = &base * &base;
                }
            }
            return Ok(acc);
        }
        match self.terms.len() {
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                let inv = c.recip();
                let mut cc = Coeff::one();
                for _ in 0..(-k) {
                    cc *= &inv;
                }
                Ok(ScalarExpr::term(self.nvars, cc, m.pow(k)))
            }
            0 => Err(ExprError::OutOfClass("negative power of zero".into())),
            _ => Err(ExprError::OutOfClass(format!(
                "negative power {k} of a sum of {} terms",
                self.terms.len()
            ))),
        }
    }

    /// Exact partial derivative with respect to coordinate `i`.
    pub fn diff(&self, i: usize) -> ScalarExpr {
        assert!(i < self.nvars, "coordinate index out of range");
        let mut out = ScalarExpr::zero(self.nvars);
        for (m, c) in &self.terms {
            let p = m.powers[i];
            if p != 0 {
                let mut m2 = m.clone();
                m2.powers[i] = p - 1;
                out.add_term(m2, c * Coeff::from_integer(BigInt::from(p)));
            }
            let w = m.weights[i];
            if !w.is_zero() {
                let wc = BigRational::new(BigInt::from(*w.numer()), BigInt::from(*w.denom()));
                out.add_term(m.clone(), c * wc);
            }
        }
        out
    }

    /// Derivative with respect to a named coordinate of `chart`.
    pub fn diff_named(&self, chart: &Chart, name: &str) -> Result<ScalarExpr, ExprError> {
        let i = chart
            .index_of(name)
            .ok_or_else(|| ExprError::UnknownCoordinate { name: name.to_string(), pos: 0 })?;
        Ok(self.diff(i))
    }

    /// Compose with `x_i -> images[i]`. Images live in a chart of dimension `target_dim`.
    pub fn substitute(&self, images: &[ScalarExpr]) -> Result<ScalarExpr, ExprError> {
        if images.len() != self.nvars {
            return Err(ExprError::DimensionMismatch { left: self.nvars, right: images.len() });
        }
        let target = images.first().map(|e| e.nvars).unwrap_or(0);
        if let Some(bad) = images.iter().find(|e| e.nvars != target) {
            return Err(ExprError::DimensionMismatch { left: target, right: bad.nvars });
        }
        // exponential weights need each image to be a linear form (or unused)
        let linear: Vec<Option<Vec<Weight>>> = images.iter().map(linear_form_of).collect();
        let mut out = ScalarExpr::zero(target);
        let mut pow_cache: BTreeMap<(usize, i32), ScalarExpr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut acc = ScalarExpr::constant(target, c.clone());
            let mut w_total = vec![Weight::zero(); target];
            for i in 0..self.nvars {
                let w = m.weights[i];
                if !w.is_zero() {
                    let lin = linear[i].as_ref().ok_or_else(|| {
                        ExprError::OutOfClass(format!(
                            "coordinate {} appears in an exponential but its image is not a linear form",
                            i + 1
                        ))
                    })?;
                    for (t, l) in w_total.iter_mut().zip(lin) {
                        *t += w * l;
                    }
                }
                let p = m.powers[i];
                if p != 0 {
                    let factor = match pow_cache.get(&(i, p)) {
                        Some(f) => f.clone(),
                        None => {
                            let f = images[i].pow(p)?;
                            pow_cache.insert((i, p), f.clone());
                            f
                        }
                    };
                    acc = &acc * &factor;
                }
            }
            if w_total.iter().any(|w| !w.is_zero()) {
                acc = &acc * &ScalarExpr::exp_linear(w_total);
            }
            out += &acc;
        }
        Ok(out)
    }

    /// Substitute named coordinates, leaving the rest fixed.
    pub fn substitute_named(
        &self,
        chart: &Chart,
        map: &BTreeMap<String, ScalarExpr>,
    ) -> Result<ScalarExpr, ExprError> {
        let mut images: Vec<ScalarExpr> = (0..chart.dim()).map(|i| chart.coord(i)).collect();
        for (name, img) in map {
            let i = chart
                .index_of(name)
                .ok_or_else(|| ExprError::UnknownCoordinate { name: name.clone(), pos: 0 })?;
            images[i] = img.clone();
        }
        self.substitute(&images)
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        CompiledExpr::new(self).eval(point)
    }
}

/// Weights `w` with `e == sum_i w_i x_i`, if `e` is such a form.
fn linear_form_of(e: &ScalarExpr) -> Option<Vec<Weight>> {
    let mut w = vec![Weight::zero(); e.nvars];
    for (m, c) in &e.terms {
        if m.weights.iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut idx = None;
        for (i, &p) in m.powers.iter().enumerate() {
            match p {
                0 => {}
                1 if idx.is_none() => idx = Some(i),
                _ => return None,
            }
        }
        let i = idx?;
        let n = c.numer().try_into().ok()?;
        let d = c.denom().try_into().ok()?;
        w[i] = Weight::new(n, d);
    }
    Some(w)
}

pub(crate) fn linear_weights(e: &ScalarExpr) -> Option<Vec<Weight>> {
    linear_form_of(e)
}

impl<'a> Add<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        self.check_dim(rhs);
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        self.check_dim(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        self.check_dim(rhs);
        let mut out = ScalarExpr::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(mut self) -> ScalarExpr {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<ScalarExpr> for &'a ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&ScalarExpr> for ScalarExpr {
    fn add_assign(&mut self, rhs: &ScalarExpr) {
        self.check_dim(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign<ScalarExpr> for ScalarExpr {
    fn add_assign(&mut self, rhs: ScalarExpr) {
        self.check_dim(&rhs);
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&ScalarExpr> for ScalarExpr {
    fn sub_assign(&mut self, rhs: &ScalarExpr) {
        self.check_dim(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

/// Absolute value helper used by the printer.
pub(crate) fn abs_coeff(c: &Coeff) -> Coeff {
    c.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(n: usize) -> Chart {
        Chart::phase_space(n)
    }

    #[test]
    fn chart_rejects_duplicates_and_empty() {
        assert!(Chart::new(["q1", "q1"]).is_err());
        assert!(Chart::new(Vec::<String>::new()).is_err());
        assert!(Chart::new(["1q"]).is_err());
        assert_eq!(Chart::phase_space(2).names(), &["q1", "q2", "p1", "p2"]);
    }

    #[test]
    fn exponentials_cancel() {
        let c = ps(2);
        let e = c.parse("exp(q1)*exp(-q1)").unwrap();
        assert_eq!(e, ScalarExpr::one(4));
    }

    #[test]
    fn binomial_square() {
        let c = ps(2);
        let e = c.parse("(p1 + p2)^2").unwrap();
        assert_eq!(e, c.parse("p1^2 + 2*p1*p2 + p2^2").unwrap());
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn negative_power_of_sum_is_out_of_class() {
        let c = ps(1);
        let e = c.parse("p1 + q1^-2").unwrap();
        assert!(matches!(e.pow(-1), Err(ExprError::OutOfClass(_))));
        assert!(matches!(c.parse("(p1 + q1^-2)^-1"), Err(ExprError::OutOfClass(_))));
    }

    #[test]
    fn negative_power_of_single_term() {
        let c = ps(1);
        let e = c.parse("2*q1*exp(q1)").unwrap();
        assert_eq!(e.pow(-2).unwrap(), c.parse("1/4*q1^-2*exp(-2*q1)").unwrap());
    }

    #[test]
    fn derivative_rules() {
        let c = ps(3);
        let q1 = c.index_of("q1").unwrap();
        let e = c.parse("exp(q3 - q1)").unwrap();
        assert_eq!(e.diff(q1), c.parse("-exp(q3 - q1)").unwrap());
        assert_eq!(c.parse("q1^-2").unwrap().diff(q1), c.parse("-2*q1^-3").unwrap());
        let p1 = c.index_of("p1").unwrap();
        assert_eq!(c.parse("1/2*p1^2").unwrap().diff(p1), c.parse("p1").unwrap());
    }

    #[test]
    fn zero_test() {
        let c = ps(2);
        let a = c.parse("exp(q1)*exp(q2) - exp(q1 + q2)").unwrap();
        assert!(a.is_zero());
        assert!(!c.parse("p1 - p2").unwrap().is_zero());
        assert!(c.parse("q1*q1 - q1^2").unwrap().is_zero());
    }

    #[test]
    fn substitution_expands() {
        let c = ps(1);
        let mut map = BTreeMap::new();
        map.insert("p1".to_string(), c.parse("p1 - exp(-q1)").unwrap());
        let out = c.parse("p1^2").unwrap().substitute_named(&c, &map).unwrap();
        assert_eq!(out, c.parse("p1^2 - 2*p1*exp(-q1) + exp(-2*q1)").unwrap());
        let ident = c.parse("q1^-3*exp(q1)*p1").unwrap();
        assert_eq!(ident.substitute_named(&c, &BTreeMap::new()).unwrap(), ident);
    }

    #[test]
    fn substitution_into_exponential_needs_linear_image() {
        let c = ps(1);
        let mut map = BTreeMap::new();
        map.insert("q1".to_string(), c.parse("q1^2").unwrap());
        let err = c.parse("exp(q1)").unwrap().substitute_named(&c, &map);
        assert!(matches!(err, Err(ExprError::OutOfClass(_))));
        map.insert("q1".to_string(), c.parse("2*q1 - p1").unwrap());
        let ok = c.parse("exp(q1)").unwrap().substitute_named(&c, &map).unwrap();
        assert_eq!(ok, c.parse("exp(2*q1 - p1)").unwrap());
    }

    #[test]
    fn negative_power_substitution_needs_single_term() {
        let c = ps(1);
        let mut map = BTreeMap::new();
        map.insert("q1".to_string(), c.parse("q1 + p1").unwrap());
        assert!(c.parse("q1^-1").unwrap().substitute_named(&c, &map).is_err());
    }

    #[test]
    fn as_constant_detects_constants() {
        let c = ps(1);
        assert_eq!(c.parse("3/2").unwrap().as_constant(), Some(rat(3, 2)));
        assert_eq!(c.parse("q1").unwrap().as_constant(), None);
        assert_eq!(ScalarExpr::zero(2).as_constant(), Some(Coeff::zero()));
    }
}
