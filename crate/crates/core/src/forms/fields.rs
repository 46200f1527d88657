use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use super::{check_dims, FormError, Form};
use crate::expr::{Chart, Coeff, ScalarExpr};

/// Vector field `sum_i X^i d/dx_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    comps: Vec<ScalarExpr>,
}

impl VectorField {
    pub fn new(comps: Vec<ScalarExpr>) -> Self {
        assert!(!comps.is_empty());
        let d = comps[0].nvars();
        assert!(comps.iter().all(|c| c.nvars() == d), "components from different charts");
        assert_eq!(d, comps.len(), "component count must equal chart dimension");
        VectorField { comps }
    }

    pub fn zero(dim: usize) -> Self {
        VectorField { comps: vec![ScalarExpr::zero(dim); dim] }
    }

    /// Coordinate field `d/dx_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.comps[i] = ScalarExpr::one(dim);
        v
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, i: usize) -> ScalarExpr {
        self.comps[i].clone()
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(ScalarExpr::is_zero)
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &ScalarExpr) -> ScalarExpr {
        let mut acc = ScalarExpr::zero(self.dim());
        for (i, xi) in self.comps.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let d = f.diff(i);
            if !d.is_zero() {
                acc += xi * &d;
            }
        }
        acc
    }

    /// Commutator `[X, Y]`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField, FormError> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.bracket_raw(other))
    }

    pub(crate) fn bracket_raw(&self, other: &VectorField) -> VectorField {
        let comps = (0..self.dim())
            .map(|i| &self.apply(&other.comps[i]) - &other.apply(&self.comps[i]))
            .collect();
        VectorField { comps }
    }

    /// Lie derivative of a vector field, i.e. the commutator.
    pub fn lie(&self, other: &VectorField) -> Result<VectorField, FormError> {
        self.bracket(other)
    }

    pub fn scale(&self, c: &Coeff) -> VectorField {
        VectorField { comps: self.comps.iter().map(|e| e.scale(c)).collect() }
    }

    pub fn mul_fn(&self, f: &ScalarExpr) -> VectorField {
        VectorField { comps: self.comps.iter().map(|e| e * f).collect() }
    }

    pub fn display(&self, chart: &Chart) -> String {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| format!("({})*d/d{}", e.to_string_in(chart), chart.name(i)))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        assert_eq!(self.dim(), rhs.dim());
        VectorField { comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        assert_eq!(self.dim(), rhs.dim());
        VectorField { comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        VectorField { comps: self.comps.iter().map(|a| -a).collect() }
    }
}

/// Bivector field with components `pi^{ij} = pi(dx_i, dx_j)` stored for `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bivector {
    dim: usize,
    comps: BTreeMap<(usize, usize), ScalarExpr>,
}

impl Bivector {
    pub fn zero(dim: usize) -> Self {
        Bivector { dim, comps: BTreeMap::new() }
    }

    /// Builds from a full antisymmetric matrix.
    pub fn from_matrix(rows: Vec<Vec<ScalarExpr>>) -> Result<Self, FormError> {
        let dim = rows.len();
        let mut out = Bivector::zero(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(FormError::Invalid("Poisson matrix is not square".into()));
            }
            for (j, e) in row.iter().enumerate() {
                check_dims(dim, e.nvars())?;
                if !(e + &rows[j][i]).is_zero() {
                    return Err(FormError::Invalid(format!(
                        "Poisson matrix is not antisymmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                if i < j {
                    out.set(i, j, e.clone());
                }
            }
        }
        Ok(out)
    }

    /// Sets `pi^{ij}` (and implicitly `pi^{ji} = -pi^{ij}`).
    pub fn set(&mut self, i: usize, j: usize, e: ScalarExpr) {
        assert!(i != j);
        let (key, val) = if i < j { ((i, j), e) } else { ((j, i), -e) };
        if val.is_zero() {
            self.comps.remove(&key);
        } else {
            self.comps.insert(key, val);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> ScalarExpr {
        if i == j {
            return ScalarExpr::zero(self.dim);
        }
        if i < j {
            self.comps.get(&(i, j)).cloned().unwrap_or_else(|| ScalarExpr::zero(self.dim))
        } else {
            -self.get(j, i)
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &ScalarExpr)> {
        self.comps.iter()
    }

    pub fn matrix(&self) -> Vec<Vec<ScalarExpr>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect()).collect()
    }

    /// `(pi# a)^j = sum_i a_i pi^{ij}`, so that `<b, pi# a> = pi(a, b)`.
    pub fn sharp(&self, a: &Form) -> Result<VectorField, FormError> {
        check_dims(self.dim, a.dim())?;
        if a.degree() != 1 {
            return Err(FormError::Degree { expected: "1".into(), found: a.degree() });
        }
        Ok(self.sharp_raw(a))
    }

    pub(crate) fn sharp_raw(&self, a: &Form) -> VectorField {
        let mut comps = vec![ScalarExpr::zero(self.dim); self.dim];
        for (idx, ai) in a.components() {
            let i = idx[0];
            for (&(r, s), p) in &self.comps {
                if r == i {
                    comps[s] += ai * p;
                } else if s == i {
                    comps[r] -= &(ai * p);
                }
            }
        }
        VectorField { comps }
    }

    /// `{f, g} = pi(df, dg)`.
    pub fn poisson(&self, f: &ScalarExpr, g: &ScalarExpr) -> ScalarExpr {
        let mut acc = ScalarExpr::zero(self.dim);
        for (&(i, j), p) in &self.comps {
            let a = &f.diff(i) * &g.diff(j);
            let b = &f.diff(j) * &g.diff(i);
            let d = &a - &b;
            if !d.is_zero() {
                acc += p * &d;
            }
        }
        acc
    }

    /// Hamiltonian vector field `pi# dH`.
    pub fn hamiltonian(&self, h: &ScalarExpr) -> VectorField {
        self.sharp_raw(&Form::function(h.clone()).d())
    }
}

/// (1,1) tensor field with `(N X)^i = sum_j N^i_j X^j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    rows: Vec<Vec<ScalarExpr>>,
}

impl Endomorphism {
    pub fn from_rows(rows: Vec<Vec<ScalarExpr>>) -> Result<Self, FormError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(FormError::Invalid("empty endomorphism".into()));
        }
        for row in &rows {
            if row.len() != dim {
                return Err(FormError::Invalid("endomorphism matrix is not square".into()));
            }
            for e in row {
                check_dims(dim, e.nvars())?;
            }
        }
        Ok(Endomorphism { rows })
    }

    pub fn zero(dim: usize) -> Self {
        Endomorphism { rows: vec![vec![ScalarExpr::zero(dim); dim]; dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut n = Self::zero(dim);
        for i in 0..dim {
            n.rows[i][i] = ScalarExpr::one(dim);
        }
        n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: ScalarExpr) {
        self.rows[i][j] = e;
    }

    pub fn rows(&self) -> &[Vec<ScalarExpr>] {
        &self.rows
    }

    pub fn apply(&self, x: &VectorField) -> Result<VectorField, FormError> {
        check_dims(self.dim(), x.dim())?;
        Ok(self.apply_raw(x))
    }

    pub(crate) fn apply_raw(&self, x: &VectorField) -> VectorField {
        let comps = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = ScalarExpr::zero(self.dim());
                for (nij, xj) in row.iter().zip(x.components()) {
                    if !nij.is_zero() && !xj.is_zero() {
                        acc += nij * xj;
                    }
                }
                acc
            })
            .collect();
        VectorField::new(comps)
    }

    /// Transpose action on 1-forms: `<N* a, X> = <a, N X>`.
    pub fn transpose_apply(&self, a: &Form) -> Result<Form, FormError> {
        check_dims(self.dim(), a.dim())?;
        if a.degree() != 1 {
            return Err(FormError::Degree { expected: "1".into(), found: a.degree() });
        }
        Ok(a.i_n_raw(self))
    }

    /// Column `N d/dx_j`.
    pub fn column(&self, j: usize) -> VectorField {
        VectorField::new(self.rows.iter().map(|r| r[j].clone()).collect())
    }

    /// Matrix product `self . other`, i.e. `self` after `other`.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism, FormError> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.compose_raw(other))
    }

    pub(crate) fn compose_raw(&self, other: &Endomorphism) -> Endomorphism {
        let m = self.dim();
        let mut out = Endomorphism::zero(m);
        for i in 0..m {
            for k in 0..m {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..m {
                    let b = &other.rows[k][j];
                    if !b.is_zero() {
                        out.rows[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn power(&self, k: usize) -> Endomorphism {
        let mut acc = Endomorphism::identity(self.dim());
        for _ in 0..k {
            acc = acc.compose_raw(self);
        }
        acc
    }

    pub fn trace(&self) -> ScalarExpr {
        let mut acc = ScalarExpr::zero(self.dim());
        for i in 0..self.dim() {
            acc += &self.rows[i][i];
        }
        acc
    }

    pub fn transpose(&self) -> Endomorphism {
        let m = self.dim();
        Endomorphism {
            rows: (0..m).map(|i| (0..m).map(|j| self.rows[j][i].clone()).collect()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(ScalarExpr::is_zero)
    }

    /// Entries that differ from `other`, as `(row, col, self - other)`.
    pub fn diff_entries(&self, other: &Endomorphism) -> Vec<(usize, usize, ScalarExpr)> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let d = &self.rows[i][j] - &other.rows[i][j];
                if !d.is_zero() {
                    out.push((i, j, d));
                }
            }
        }
        out
    }

    /// `(L_X N)(Y) = [X, N Y] - N [X, Y]`.
    pub fn lie(&self, x: &VectorField) -> Result<Endomorphism, FormError> {
        check_dims(self.dim(), x.dim())?;
        Ok(self.lie_raw(x))
    }

    pub(crate) fn lie_raw(&self, x: &VectorField) -> Endomorphism {
        let m = self.dim();
        let dx: Vec<Vec<ScalarExpr>> =
            (0..m).map(|i| (0..m).map(|k| x.components()[i].diff(k)).collect()).collect();
        let mut out = Endomorphism::zero(m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = x.apply(&self.rows[i][j]);
                for k in 0..m {
                    if !self.rows[k][j].is_zero() && !dx[i][k].is_zero() {
                        acc -= &(&self.rows[k][j] * &dx[i][k]);
                    }
                    if !self.rows[i][k].is_zero() && !dx[k][j].is_zero() {
                        acc += &self.rows[i][k] * &dx[k][j];
                    }
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }

    /// Nijenhuis torsion evaluated on the coordinate frame.
    pub fn torsion(&self) -> TorsionTensor {
        let m = self.dim();
        let cols: Vec<VectorField> = (0..m).map(|j| self.column(j)).collect();
        let mut out = TorsionTensor::zero(m);
        for i in 0..m {
            for j in (i + 1)..m {
                let ei = VectorField::coordinate(m, i);
                let ej = VectorField::coordinate(m, j);
                let inner = &cols[i].bracket_raw(&ej) + &ei.bracket_raw(&cols[j]);
                let t = &cols[i].bracket_raw(&cols[j]) - &self.apply_raw(&inner);
                out.set(i, j, t);
            }
        }
        out
    }

    /// Nijenhuis torsion `T(X, Y)` for arbitrary fields, straight from the definition.
    pub fn torsion_on(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let nx = self.apply_raw(x);
        let ny = self.apply_raw(y);
        let inner = &(&nx.bracket_raw(y) + &x.bracket_raw(&ny)) - &self.apply_raw(&x.bracket_raw(y));
        &nx.bracket_raw(&ny) - &self.apply_raw(&inner)
    }

    pub fn display(&self, chart: &Chart) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(|e| e.to_string_in(chart)).collect()).collect()
    }
}

impl Add for &Endomorphism {
    type Output = Endomorphism;
    fn add(self, rhs: &Endomorphism) -> Endomorphism {
        assert_eq!(self.dim(), rhs.dim());
        Endomorphism {
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }
}

impl Sub for &Endomorphism {
    type Output = Endomorphism;
    fn sub(self, rhs: &Endomorphism) -> Endomorphism {
        assert_eq!(self.dim(), rhs.dim());
        Endomorphism {
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }
}

/// Vector-valued 2-form `T^k_{ij}`, stored for `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionTensor {
    dim: usize,
    comps: BTreeMap<(usize, usize), VectorField>,
}

impl TorsionTensor {
    pub fn zero(dim: usize) -> Self {
        TorsionTensor { dim, comps: BTreeMap::new() }
    }

    pub fn set(&mut self, i: usize, j: usize, v: VectorField) {
        assert!(i < j);
        if v.is_zero() {
            self.comps.remove(&(i, j));
        } else {
            self.comps.insert((i, j), v);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `T(d/dx_i, d/dx_j)`.
    pub fn get(&self, i: usize, j: usize) -> VectorField {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => VectorField::zero(self.dim),
            std::cmp::Ordering::Less => {
                self.comps.get(&(i, j)).cloned().unwrap_or_else(|| VectorField::zero(self.dim))
            }
            std::cmp::Ordering::Greater => -&self.get(j, i),
        }
    }

    /// Scalar component `T^k_{ij}`.
    pub fn component(&self, k: usize, i: usize, j: usize) -> ScalarExpr {
        self.get(i, j).component(k)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&(usize, usize), &VectorField)> {
        self.comps.iter()
    }

    /// Endomorphism `Y -> T(X, Y)` for `X = d/dx_a`.
    pub fn contract_first(&self, a: usize) -> Endomorphism {
        let m = self.dim;
        let mut e = Endomorphism::zero(m);
        for b in 0..m {
            let t = self.get(a, b);
            for c in 0..m {
                e.set(c, b, t.component(c));
            }
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &Chart, s: &str) -> ScalarExpr {
        c.parse(s).unwrap()
    }

    fn canonical(n: usize) -> Bivector {
        let mut pi = Bivector::zero(2 * n);
        for i in 0..n {
            pi.set(n + i, i, ScalarExpr::one(2 * n));
        }
        pi
    }

    #[test]
    fn sharp_of_coordinate_forms() {
        let pi = canonical(2);
        assert_eq!(pi.sharp(&Form::dx(4, 2)).unwrap(), VectorField::coordinate(4, 0));
        assert_eq!(pi.sharp(&Form::dx(4, 0)).unwrap(), -&VectorField::coordinate(4, 2));
        let c = Chart::phase_space(2);
        let h1 = Form::function(p(&c, "p1 + p2")).d();
        let x1 = &VectorField::coordinate(4, 0) + &VectorField::coordinate(4, 1);
        assert_eq!(pi.sharp(&h1).unwrap(), x1);
        assert!(pi.sharp(&Form::dx(4, 0).wedge(&Form::dx(4, 1)).unwrap()).is_err());
    }

    #[test]
    fn sharp_is_skew() {
        let c = Chart::phase_space(2);
        let pi = canonical(2);
        let a = Form::function(p(&c, "p1*exp(q2)")).d();
        let b = Form::function(p(&c, "q1^2*p2")).d();
        assert_eq!(b.pair(&pi.sharp(&a).unwrap()), -a.pair(&pi.sharp(&b).unwrap()));
    }

    #[test]
    fn canonical_bracket_values() {
        let c = Chart::phase_space(3);
        let pi = canonical(3);
        assert_eq!(pi.poisson(&p(&c, "p1"), &p(&c, "q1")), ScalarExpr::one(6));
        let g = p(&c, "p1 + p2 + p3");
        let f = p(&c, "exp(q3) - exp(-q1)");
        assert_eq!(pi.poisson(&g, &f), p(&c, "exp(q3) + exp(-q1)"));
    }

    #[test]
    fn vector_field_commutator() {
        let c = Chart::new(["x", "y"]).unwrap();
        let x = VectorField::new(vec![p(&c, "1"), p(&c, "y")]);
        let y = VectorField::new(vec![p(&c, "y"), p(&c, "0")]);
        assert_eq!(x.bracket(&y).unwrap(), VectorField::new(vec![p(&c, "y"), p(&c, "0")]));
    }

    #[test]
    fn identity_powers_and_trace() {
        let id = Endomorphism::identity(4);
        assert_eq!(id.power(3), id);
        assert_eq!(id.trace(), ScalarExpr::integer(4, 4));
        assert!(id.torsion().is_zero());
    }

    #[test]
    fn transpose_pairing() {
        let c = Chart::phase_space(1);
        let n = Endomorphism::from_rows(vec![
            vec![p(&c, "q1"), p(&c, "exp(p1)")],
            vec![p(&c, "2"), p(&c, "p1^3")],
        ])
        .unwrap();
        let a = Form::function(p(&c, "q1*p1")).d();
        let x = VectorField::new(vec![p(&c, "p1"), p(&c, "q1^-1")]);
        assert_eq!(
            n.transpose_apply(&a).unwrap().pair(&x),
            a.pair(&n.apply(&x).unwrap())
        );
    }

    #[test]
    fn torsion_matches_definition_on_shifted_frames() {
        let c = Chart::phase_space(1);
        let n = Endomorphism::from_rows(vec![
            vec![p(&c, "q1*p1"), p(&c, "exp(q1)")],
            vec![p(&c, "p1"), p(&c, "q1^2")],
        ])
        .unwrap();
        let t = n.torsion();
        let f = p(&c, "exp(p1) + q1");
        let g = p(&c, "p1^2");
        let x = VectorField::new(vec![f.clone(), p(&c, "0")]);
        let y = VectorField::new(vec![p(&c, "0"), g.clone()]);
        // function-linearity: T(f d1, g d2) = f g T(d1, d2)
        assert_eq!(n.torsion_on(&x, &y), t.get(0, 1).mul_fn(&(&f * &g)));
    }

    #[test]
    fn endomorphism_lie_derivative_definition() {
        let c = Chart::phase_space(1);
        let n = Endomorphism::from_rows(vec![
            vec![p(&c, "q1"), p(&c, "exp(q1)")],
            vec![p(&c, "p1"), p(&c, "q1*p1")],
        ])
        .unwrap();
        let x = VectorField::new(vec![p(&c, "p1^2"), p(&c, "exp(-q1)")]);
        let y = VectorField::new(vec![p(&c, "q1"), p(&c, "p1 + 1")]);
        let lhs = n.lie(&x).unwrap().apply(&y).unwrap();
        let rhs = &x.bracket(&n.apply(&y).unwrap()).unwrap() - &n.apply(&x.bracket(&y).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
