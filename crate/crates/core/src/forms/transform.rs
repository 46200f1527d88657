use super::{check_dims, Bivector, Endomorphism, FormError};
use crate::expr::{Chart, ScalarExpr};

/// Diffeomorphism between two charts, with both directions given explicitly.
///
/// `forward[a]` is target coordinate `a` as a function of the source coordinates;
/// `inverse[i]` is source coordinate `i` as a function of the target coordinates.
#[derive(Debug, Clone)]
pub struct CoordinateMap {
    source: Chart,
    target: Chart,
    forward: Vec<ScalarExpr>,
    inverse: Vec<ScalarExpr>,
}

impl CoordinateMap {
    pub fn new(
        source: Chart,
        target: Chart,
        forward: Vec<ScalarExpr>,
        inverse: Vec<ScalarExpr>,
    ) -> Result<Self, FormError> {
        check_dims(source.dim(), target.dim())?;
        check_dims(target.dim(), forward.len())?;
        check_dims(source.dim(), inverse.len())?;
        for e in &forward {
            check_dims(source.dim(), e.nvars())?;
        }
        for e in &inverse {
            check_dims(target.dim(), e.nvars())?;
        }
        let map = CoordinateMap { source, target, forward, inverse };
        for (a, fa) in map.forward.iter().enumerate() {
            if fa.substitute(&map.inverse)? != map.target.coord(a) {
                return Err(FormError::Invalid(format!(
                    "forward map composed with inverse is not the identity on `{}`",
                    map.target.name(a)
                )));
            }
        }
        for (i, gi) in map.inverse.iter().enumerate() {
            if gi.substitute(&map.forward)? != map.source.coord(i) {
                return Err(FormError::Invalid(format!(
                    "inverse map composed with forward is not the identity on `{}`",
                    map.source.name(i)
                )));
            }
        }
        Ok(map)
    }

    /// Builds a map from expression strings.
    pub fn parse(
        source: Chart,
        target: Chart,
        forward: &[&str],
        inverse: &[&str],
    ) -> Result<Self, FormError> {
        let fwd = forward.iter().map(|s| source.parse(s)).collect::<Result<Vec<_>, _>>()?;
        let inv = inverse.iter().map(|s| target.parse(s)).collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, fwd, inv)
    }

    pub fn identity(chart: &Chart) -> Self {
        let coords: Vec<ScalarExpr> = (0..chart.dim()).map(|i| chart.coord(i)).collect();
        CoordinateMap { source: chart.clone(), target: chart.clone(), forward: coords.clone(), inverse: coords }
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    /// A source function expressed in target coordinates.
    pub fn push_function(&self, f: &ScalarExpr) -> Result<ScalarExpr, FormError> {
        Ok(f.substitute(&self.inverse)?)
    }

    /// Jacobian `d forward^a / d x^i`, expressed in target coordinates.
    fn jacobian_at_target(&self) -> Result<Vec<Vec<ScalarExpr>>, FormError> {
        let m = self.source.dim();
        let mut out = Vec::with_capacity(m);
        for a in 0..m {
            let row = (0..m)
                .map(|i| self.forward[a].diff(i).substitute(&self.inverse))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(row);
        }
        Ok(out)
    }

    /// Push-forward of a (1,1) tensor: `N' = J N J^{-1}`, all in target coordinates.
    pub fn transform_endomorphism(&self, n: &Endomorphism) -> Result<Endomorphism, FormError> {
        let m = self.source.dim();
        check_dims(m, n.dim())?;
        let jac = self.jacobian_at_target()?;
        // inverse Jacobian straight from the inverse map
        let inv_jac: Vec<Vec<ScalarExpr>> =
            (0..m).map(|j| (0..m).map(|b| self.inverse[j].diff(b)).collect()).collect();
        let n_t: Vec<Vec<ScalarExpr>> = (0..m)
            .map(|i| (0..m).map(|j| self.push_function(n.entry(i, j))).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let j_mat = Endomorphism::from_rows(jac)?;
        let k_mat = Endomorphism::from_rows(inv_jac)?;
        let nt = Endomorphism::from_rows(n_t)?;
        Ok(j_mat.compose_raw(&nt).compose_raw(&k_mat))
    }

    /// Push-forward of a bivector: `pi'^{ab} = J^a_i pi^{ij} J^b_j`.
    pub fn transform_bivector(&self, pi: &Bivector) -> Result<Bivector, FormError> {
        let m = self.source.dim();
        check_dims(m, pi.dim())?;
        let jac = self.jacobian_at_target()?;
        let pm: Vec<Vec<ScalarExpr>> = pi
            .matrix()
            .iter()
            .map(|row| row.iter().map(|e| self.push_function(e)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Bivector::zero(m);
        for a in 0..m {
            for b in (a + 1)..m {
                let mut acc = ScalarExpr::zero(m);
                for i in 0..m {
                    if jac[a][i].is_zero() {
                        continue;
                    }
                    for j in 0..m {
                        if pm[i][j].is_zero() || jac[b][j].is_zero() {
                            continue;
                        }
                        acc += &(&jac[a][i] * &pm[i][j]) * &jac[b][j];
                    }
                }
                out.set(a, b, acc);
            }
        }
        Ok(out)
    }
}
