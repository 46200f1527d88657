use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Neg, Sub};

use num_traits::Signed;

use super::{check_dims, sort_with_sign, Endomorphism, FormError, VectorField};
use crate::expr::{Chart, Coeff, ScalarExpr};

/// Differential form of fixed degree with components keyed by increasing index tuples.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    dim: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, ScalarExpr>,
}

impl std::fmt::Debug for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Form")
            .field("degree", &self.degree)
            .field("comps", &self.comps)
            .finish()
    }
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Form { dim, degree, comps: BTreeMap::new() }
    }

    pub fn function(f: ScalarExpr) -> Self {
        let mut out = Form::zero(f.nvars(), 0);
        if !f.is_zero() {
            out.comps.insert(Vec::new(), f);
        }
        out
    }

    /// Coordinate 1-form `dx_i`.
    pub fn dx(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut out = Form::zero(dim, 1);
        out.comps.insert(vec![i], ScalarExpr::one(dim));
        out
    }

    /// Builds a form from (possibly unsorted) index tuples; repeated indices give zero.
    pub fn from_components<I>(dim: usize, degree: usize, comps: I) -> Result<Self, FormError>
    where
        I: IntoIterator<Item = (Vec<usize>, ScalarExpr)>,
    {
        let mut out = Form::zero(dim, degree);
        for (idx, e) in comps {
            if idx.len() != degree {
                return Err(FormError::Invalid(format!(
                    "index tuple {idx:?} does not match degree {degree}"
                )));
            }
            if idx.iter().any(|&i| i >= dim) {
                return Err(FormError::Invalid(format!("index out of range in {idx:?}")));
            }
            check_dims(dim, e.nvars())?;
            if let Some((sorted, sign)) = sort_with_sign(idx) {
                out.add_comp(sorted, if sign < 0 { -e } else { e });
            }
        }
        Ok(out)
    }

    /// One-form with the given components `a_i dx_i`.
    pub fn one_form(comps: Vec<ScalarExpr>) -> Self {
        let dim = comps.len();
        let mut out = Form::zero(dim, 1);
        for (i, c) in comps.into_iter().enumerate() {
            out.add_comp(vec![i], c);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &ScalarExpr)> {
        self.comps.iter()
    }

    /// Component at a strictly increasing index tuple.
    pub fn component(&self, idx: &[usize]) -> ScalarExpr {
        self.comps.get(idx).cloned().unwrap_or_else(|| ScalarExpr::zero(self.dim))
    }

    /// The function of a degree-0 form.
    pub fn as_function(&self) -> ScalarExpr {
        assert_eq!(self.degree, 0, "as_function on a form of positive degree");
        self.component(&[])
    }

    /// Coefficients `a_i` of a 1-form.
    pub fn one_form_coeffs(&self) -> Vec<ScalarExpr> {
        assert_eq!(self.degree, 1);
        (0..self.dim).map(|i| self.component(&[i])).collect()
    }

    pub(crate) fn add_comp(&mut self, idx: Vec<usize>, e: ScalarExpr) {
        if e.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.comps.entry(idx) {
            Entry::Vacant(v) => {
                v.insert(e);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += e;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Coeff) -> Form {
        let mut out = Form::zero(self.dim, self.degree);
        for (k, v) in &self.comps {
            out.add_comp(k.clone(), v.scale(c));
        }
        out
    }

    pub fn scale_int(&self, c: i64) -> Form {
        self.scale(&Coeff::from_integer(c.into()))
    }

    /// Multiplication by a function.
    pub fn mul_fn(&self, f: &ScalarExpr) -> Form {
        let mut out = Form::zero(self.dim, self.degree);
        for (k, v) in &self.comps {
            out.add_comp(k.clone(), v * f);
        }
        out
    }

    pub fn wedge(&self, other: &Form) -> Result<Form, FormError> {
        check_dims(self.dim, other.dim)?;
        Ok(self.wedge_raw(other))
    }

    pub(crate) fn wedge_raw(&self, other: &Form) -> Form {
        let mut out = Form::zero(self.dim, self.degree + other.degree);
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                if let Some((sorted, sign)) = sort_with_sign(idx) {
                    let p = a * b;
                    out.add_comp(sorted, if sign < 0 { -p } else { p });
                }
            }
        }
        out
    }

    /// Cartan exterior derivative.
    pub fn d(&self) -> Form {
        let mut out = Form::zero(self.dim, self.degree + 1);
        for (idx, f) in &self.comps {
            for j in 0..self.dim {
                if idx.contains(&j) {
                    continue;
                }
                let df = f.diff(j);
                if df.is_zero() {
                    continue;
                }
                let pos = idx.iter().take_while(|&&i| i < j).count();
                let mut new_idx = idx.clone();
                new_idx.insert(pos, j);
                out.add_comp(new_idx, if pos % 2 == 1 { -df } else { df });
            }
        }
        out
    }

    /// Interior product `i_X`, defined on forms of degree at least one.
    pub fn interior(&self, x: &VectorField) -> Result<Form, FormError> {
        check_dims(self.dim, x.dim())?;
        if self.degree == 0 {
            return Err(FormError::Degree { expected: ">= 1".into(), found: 0 });
        }
        Ok(self.interior_raw(x))
    }

    pub(crate) fn interior_raw(&self, x: &VectorField) -> Form {
        if self.degree == 0 {
            return Form::zero(self.dim, 0);
        }
        let mut out = Form::zero(self.dim, self.degree - 1);
        for (idx, f) in &self.comps {
            for (s, &i) in idx.iter().enumerate() {
                let xi = x.component(i);
                if xi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(s);
                let p = f * xi;
                out.add_comp(rest, if s % 2 == 1 { -p } else { p });
            }
        }
        out
    }

    /// `alpha(X_1, ..., X_q)`.
    pub fn eval(&self, xs: &[VectorField]) -> Result<ScalarExpr, FormError> {
        if xs.len() != self.degree {
            return Err(FormError::Degree { expected: xs.len().to_string(), found: self.degree });
        }
        let mut cur = self.clone();
        for x in xs {
            cur = cur.interior(x)?;
        }
        Ok(cur.as_function())
    }

    /// Pairing `<alpha, X>` of a 1-form with a vector field.
    pub fn pair(&self, x: &VectorField) -> ScalarExpr {
        assert_eq!(self.degree, 1, "pairing needs a 1-form");
        let mut acc = ScalarExpr::zero(self.dim);
        for (idx, f) in &self.comps {
            let xi = x.component(idx[0]);
            if !xi.is_zero() {
                acc += f * &xi;
            }
        }
        acc
    }

    /// `i_N` of a form: sum over slots of `alpha(.., N X_s, ..)`; zero on functions.
    pub fn i_n(&self, n: &Endomorphism) -> Result<Form, FormError> {
        check_dims(self.dim, n.dim())?;
        Ok(self.i_n_raw(n))
    }

    pub(crate) fn i_n_raw(&self, n: &Endomorphism) -> Form {
        let mut out = Form::zero(self.dim, self.degree);
        for (idx, f) in &self.comps {
            for s in 0..idx.len() {
                for j in 0..self.dim {
                    let nij = n.entry(idx[s], j);
                    if nij.is_zero() {
                        continue;
                    }
                    let mut new_idx = idx.clone();
                    new_idx[s] = j;
                    if let Some((sorted, sign)) = sort_with_sign(new_idx) {
                        let p = f * nij;
                        out.add_comp(sorted, if sign < 0 { -p } else { p });
                    }
                }
            }
        }
        out
    }

    /// `d_N = i_N d - d i_N`.
    pub fn d_n(&self, n: &Endomorphism) -> Result<Form, FormError> {
        check_dims(self.dim, n.dim())?;
        Ok(self.d_n_raw(n))
    }

    pub(crate) fn d_n_raw(&self, n: &Endomorphism) -> Form {
        let a = self.d().i_n_raw(n);
        if self.degree == 0 {
            return a;
        }
        &a - &self.i_n_raw(n).d()
    }

    /// Lie derivative by Cartan's formula.
    pub fn lie(&self, x: &VectorField) -> Result<Form, FormError> {
        check_dims(self.dim, x.dim())?;
        Ok(self.lie_raw(x))
    }

    pub(crate) fn lie_raw(&self, x: &VectorField) -> Form {
        let a = self.d().interior_raw(x);
        if self.degree == 0 {
            return a;
        }
        &a + &self.interior_raw(x).d()
    }

    /// `Omega^flat(X) = i_X Omega` for a 2-form.
    pub fn flat(&self, x: &VectorField) -> Result<Form, FormError> {
        if self.degree != 2 {
            return Err(FormError::Degree { expected: "2".into(), found: self.degree });
        }
        self.interior(x)
    }

    /// `i_{X ^ Y} phi = i_Y i_X phi` for a 3-form.
    pub fn interior_bivector(&self, x: &VectorField, y: &VectorField) -> Result<Form, FormError> {
        if self.degree != 3 {
            return Err(FormError::Degree { expected: "3".into(), found: self.degree });
        }
        self.interior(x)?.interior(y)
    }

    /// Renders as `coeff*dx_i^dx_j + ...` with `^` as wedge.
    pub fn display(&self, chart: &Chart) -> String {
        if self.comps.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (idx, f)) in self.comps.iter().enumerate() {
            if k > 0 {
                out.push_str(" + ");
            }
            let basis: Vec<String> = idx.iter().map(|&i| format!("d{}", chart.name(i))).collect();
            let single_positive = f.len() == 1 && f.terms().all(|(_, c)| c.is_positive());
            let fs = f.to_string_in(chart);
            if basis.is_empty() {
                out.push_str(&fs);
            } else if fs == "1" {
                out.push_str(&basis.join("^"));
            } else if single_positive {
                let _ = write!(out, "{}*{}", fs, basis.join("^"));
            } else {
                let _ = write!(out, "({})*{}", fs, basis.join("^"));
            }
        }
        out
    }

    /// Total number of scalar terms, a rough size measure.
    pub fn size(&self) -> usize {
        self.comps.values().map(ScalarExpr::len).sum()
    }
}

fn combine(a: &Form, b: &Form, sign: i64) -> Form {
    assert_eq!(a.dim, b.dim, "forms on different charts");
    if b.comps.is_empty() {
        return a.clone();
    }
    if a.comps.is_empty() {
        return if sign < 0 { -b } else { b.clone() };
    }
    assert_eq!(a.degree, b.degree, "adding forms of different degree");
    let mut out = a.clone();
    for (k, v) in &b.comps {
        out.add_comp(k.clone(), if sign < 0 { -v } else { v.clone() });
    }
    out
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        combine(self, rhs, 1)
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        combine(self, rhs, -1)
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        combine(&self, &rhs, 1)
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        combine(&self, &rhs, -1)
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Chart;

    fn setup(n: usize) -> Chart {
        Chart::phase_space(n)
    }

    fn f(c: &Chart, s: &str) -> ScalarExpr {
        c.parse(s).unwrap()
    }

    fn dfun(c: &Chart, s: &str) -> Form {
        Form::function(f(c, s)).d()
    }

    #[test]
    fn wedge_of_equal_coordinate_forms_vanishes() {
        let dq1 = Form::dx(6, 0);
        assert!(dq1.wedge(&dq1).unwrap().is_zero());
    }

    #[test]
    fn wedge_of_exponential_differentials() {
        let c = setup(3);
        let w = dfun(&c, "exp(q3)").wedge(&dfun(&c, "exp(-q1)")).unwrap();
        let expected = Form::from_components(6, 2, [(vec![0, 2], f(&c, "exp(q3 - q1)"))]).unwrap();
        assert_eq!(w, expected);
    }

    #[test]
    fn wedge_rejects_chart_mismatch() {
        assert!(matches!(
            Form::dx(4, 0).wedge(&Form::dx(6, 1)),
            Err(FormError::ChartMismatch { .. })
        ));
    }

    #[test]
    fn graded_commutativity() {
        let c = setup(2);
        let a = dfun(&c, "p1*exp(q1)");
        let b = dfun(&c, "q2^2 + p2");
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ab, -ba);
    }

    #[test]
    fn exterior_derivative_examples() {
        let c = setup(3);
        let d = dfun(&c, "exp(-q1)");
        assert_eq!(d, Form::dx(6, 0).mul_fn(&f(&c, "-exp(-q1)")));
        let omega1 = Form::from_components(6, 2, [(vec![0, 2], f(&c, "exp(q3 - q1)"))]).unwrap();
        assert!(omega1.d().is_zero());
        assert!(dfun(&c, "p1*q1").d().is_zero());
    }

    #[test]
    fn interior_examples() {
        let c = setup(3);
        let dq1_dq3 = Form::dx(6, 0).wedge(&Form::dx(6, 2)).unwrap();
        let e1 = VectorField::coordinate(6, 0);
        assert_eq!(dq1_dq3.interior(&e1).unwrap(), Form::dx(6, 2));
        let omega1 = dq1_dq3.mul_fn(&f(&c, "exp(q3 - q1)"));
        assert_eq!(omega1.interior(&e1).unwrap(), Form::dx(6, 2).mul_fn(&f(&c, "exp(q3 - q1)")));
        assert!(matches!(
            Form::function(f(&c, "q1")).interior(&e1),
            Err(FormError::Degree { .. })
        ));
        assert_eq!(omega1.flat(&e1).unwrap(), omega1.interior(&e1).unwrap());
    }

    #[test]
    fn interior_bivector_examples() {
        let c = setup(3);
        let x = VectorField::coordinate(6, 0);
        let phi = Form::dx(6, 0).wedge(&Form::dx(6, 1)).unwrap().wedge(&Form::dx(6, 2)).unwrap();
        assert!(phi.interior_bivector(&x, &x).unwrap().is_zero());
        let y = VectorField::coordinate(6, 1);
        assert_eq!(phi.interior_bivector(&x, &y).unwrap(), Form::dx(6, 2));
        let di = dfun(&c, "p1 + p2 + p3");
        let phi2 = di
            .wedge(&dfun(&c, "exp(-q1)"))
            .unwrap()
            .wedge(&dfun(&c, "exp(q3) - exp(-q1)"))
            .unwrap();
        let dp1 = VectorField::coordinate(6, 3);
        let dp2 = VectorField::coordinate(6, 4);
        assert!(phi2.interior_bivector(&dp1, &dp2).unwrap().is_zero());
        assert!(Form::dx(6, 0).interior_bivector(&x, &y).is_err());
    }

    #[test]
    fn i_n_on_diagonal_endomorphism() {
        let c = setup(1);
        let lam = Endomorphism::from_rows(vec![
            vec![f(&c, "3"), f(&c, "0")],
            vec![f(&c, "0"), f(&c, "p1")],
        ])
        .unwrap();
        assert_eq!(Form::dx(2, 0).i_n(&lam).unwrap(), Form::dx(2, 0).scale_int(3));
        assert!(Form::function(f(&c, "q1")).i_n(&lam).unwrap().is_zero());
        assert_eq!(
            Form::dx(2, 0).wedge(&Form::dx(2, 1)).unwrap().i_n(&lam).unwrap(),
            Form::dx(2, 0).wedge(&Form::dx(2, 1)).unwrap().mul_fn(&f(&c, "3 + p1"))
        );
    }

    #[test]
    fn form_eval_determinant_convention() {
        let c = setup(1);
        let w = Form::dx(2, 0).wedge(&Form::dx(2, 1)).unwrap();
        let x = VectorField::new(vec![f(&c, "q1"), f(&c, "2")]);
        let y = VectorField::new(vec![f(&c, "1"), f(&c, "p1")]);
        assert_eq!(w.eval(&[x, y]).unwrap(), f(&c, "q1*p1 - 2"));
    }

    #[test]
    fn lie_derivative_of_function() {
        let c = setup(2);
        let g = Form::function(f(&c, "exp(q1 - q2)"));
        let x = VectorField::coordinate(4, 0);
        assert_eq!(g.lie(&x).unwrap().as_function(), f(&c, "exp(q1 - q2)"));
        let constant = Form::dx(4, 0).wedge(&Form::dx(4, 3)).unwrap().scale_int(5);
        let cx = VectorField::new(vec![f(&c, "1"), f(&c, "2"), f(&c, "0"), f(&c, "-7")]);
        assert!(constant.lie(&cx).unwrap().is_zero());
    }

    #[test]
    fn display_form() {
        let c = setup(1);
        let w = Form::dx(2, 0).wedge(&Form::dx(2, 1)).unwrap().mul_fn(&f(&c, "2*exp(q1)"));
        assert_eq!(w.display(&c), "2*exp(q1)*dq1^dp1");
        assert_eq!(Form::zero(2, 1).display(&c), "0");
    }
}
