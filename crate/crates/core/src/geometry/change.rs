use crate::error::{Error, Result};
use crate::grassmann::{same_chart, Chart, GradedPoly, Substitution};

use super::field::{OneForm, VectorField};

/// Invertible polynomial change of coordinates `x^{a'} = x^{a'}(x)`.
///
/// `forward[a']` expresses a target coordinate on the source chart and `inverse[a]` a source
/// coordinate on the target chart. Both compositions are checked to be the identity.
#[derive(Debug, Clone)]
pub struct CoordinateChange {
    source: Chart,
    target: Chart,
    forward: Vec<GradedPoly>,
    inverse: Vec<GradedPoly>,
    to_source: Substitution,
    to_target: Substitution,
}

impl CoordinateChange {
    pub fn new(source: &Chart, target: &Chart, forward: Vec<GradedPoly>, inverse: Vec<GradedPoly>) -> Result<Self> {
        if source.even_dim() != target.even_dim() || source.odd_dim() != target.odd_dim() {
            return Err(Error::InvalidChange(format!(
                "dimensions {}|{} and {}|{} differ",
                source.even_dim(),
                source.odd_dim(),
                target.even_dim(),
                target.odd_dim()
            )));
        }
        // forward images live on the source chart and replace target coordinates
        let to_source = Substitution::from_images(target, source, forward.clone())?;
        let to_target = Substitution::from_images(source, target, inverse.clone())?;
        for (b, img) in forward.iter().enumerate() {
            if img.substitute(&to_target)? != GradedPoly::coord(target, b) {
                return Err(Error::InvalidChange(format!(
                    "inverse does not undo the image of `{}`",
                    target.name(b)
                )));
            }
        }
        for (a, img) in inverse.iter().enumerate() {
            if img.substitute(&to_source)? != GradedPoly::coord(source, a) {
                return Err(Error::InvalidChange(format!(
                    "forward map does not undo the inverse image of `{}`",
                    source.name(a)
                )));
            }
        }
        Ok(CoordinateChange { source: source.clone(), target: target.clone(), forward, inverse, to_source, to_target })
    }

    pub fn identity(chart: &Chart) -> Self {
        let ids: Vec<GradedPoly> = (0..chart.len()).map(|a| GradedPoly::coord(chart, a)).collect();
        Self::new(chart, chart, ids.clone(), ids).expect("identity change")
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn forward(&self) -> &[GradedPoly] {
        &self.forward
    }

    pub fn inverse_images(&self) -> &[GradedPoly] {
        &self.inverse
    }

    /// Re-express a source function in target coordinates.
    pub fn to_target(&self, f: &GradedPoly) -> Result<GradedPoly> {
        f.substitute(&self.to_target)
    }

    /// Re-express a target function in source coordinates.
    pub fn to_source(&self, f: &GradedPoly) -> Result<GradedPoly> {
        f.substitute(&self.to_source)
    }

    /// `J[a][a'] = ∂x^{a'}/∂x^a` on the source chart.
    pub fn jacobian(&self) -> Vec<Vec<GradedPoly>> {
        (0..self.source.len()).map(|a| self.forward.iter().map(|x| x.partial(a)).collect()).collect()
    }

    /// `K[a'][a] = ∂x^a/∂x^{a'}` on the target chart.
    pub fn inverse_jacobian(&self) -> Vec<Vec<GradedPoly>> {
        (0..self.target.len()).map(|b| self.inverse.iter().map(|x| x.partial(b)).collect()).collect()
    }

    /// `H[c'][b'][d] = ∂²x^d/∂x^{c'}∂x^{b'}` on the target chart.
    pub fn inverse_hessian(&self) -> Vec<Vec<Vec<GradedPoly>>> {
        let n = self.target.len();
        (0..n)
            .map(|c| (0..n).map(|b| self.inverse.iter().map(|x| x.partial(b).partial(c)).collect()).collect())
            .collect()
    }

    pub fn inverse(&self) -> CoordinateChange {
        CoordinateChange {
            source: self.target.clone(),
            target: self.source.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            to_source: self.to_target.clone(),
            to_target: self.to_source.clone(),
        }
    }

    /// The change `self` followed by `next`.
    pub fn then(&self, next: &CoordinateChange) -> Result<CoordinateChange> {
        if !same_chart(&self.target, &next.source) {
            return Err(Error::ChartMismatch);
        }
        let forward = next.forward.iter().map(|f| self.to_source(f)).collect::<Result<Vec<_>>>()?;
        let inverse = self.inverse.iter().map(|f| next.to_target(f)).collect::<Result<Vec<_>>>()?;
        CoordinateChange::new(&self.source, &next.target, forward, inverse)
    }

    fn check_source(&self, chart: &Chart) -> Result<()> {
        if same_chart(chart, &self.source) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    /// `X^{a'} = X^a ∂x^{a'}/∂x^a`, re-expressed in target coordinates.
    pub fn transform_vector(&self, x: &VectorField) -> Result<VectorField> {
        self.check_source(x.chart())?;
        let jac = self.jacobian();
        let comps = (0..self.target.len())
            .map(|b| {
                let mut acc = GradedPoly::zero(&self.source);
                for (a, xa) in x.comps().iter().enumerate() {
                    if !xa.is_zero() {
                        acc += &(xa * &jac[a][b]);
                    }
                }
                self.to_target(&acc)
            })
            .collect::<Result<Vec<_>>>()?;
        let out = VectorField::new(&self.target, comps)?;
        match x.parity() {
            Some(p) => out.declare(p),
            None => Ok(out),
        }
    }

    /// `α_{a'} = (∂x^a/∂x^{a'}) α_a` on the target chart.
    pub fn transform_oneform(&self, alpha: &OneForm) -> Result<OneForm> {
        self.check_source(alpha.chart())?;
        let k = self.inverse_jacobian();
        let pushed = alpha.comps().iter().map(|c| self.to_target(c)).collect::<Result<Vec<_>>>()?;
        let comps = (0..self.target.len())
            .map(|b| {
                let mut acc = GradedPoly::zero(&self.target);
                for (a, v) in pushed.iter().enumerate() {
                    if !v.is_zero() {
                        acc += &(&k[b][a] * v);
                    }
                }
                acc
            })
            .collect();
        let out = OneForm::new(&self.target, comps)?;
        match alpha.parity() {
            Some(p) => out.declare(p),
            None => Ok(out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::grassmann::ChartSignature;

    fn shear() -> CoordinateChange {
        let s = ChartSignature::new(["t"], ["th1", "th2"]).unwrap();
        let t = ChartSignature::new(["u"], ["e1", "e2"]).unwrap();
        let fwd = ["t + th1*th2", "th1", "th2"].iter().map(|e| parse_expr(&s, e).unwrap()).collect();
        let inv = ["u - e1*e2", "e1", "e2"].iter().map(|e| parse_expr(&t, e).unwrap()).collect();
        CoordinateChange::new(&s, &t, fwd, inv).unwrap()
    }

    #[test]
    fn rejects_non_inverse() {
        let s = ChartSignature::new(["t"], ["th"]).unwrap();
        let fwd = vec![parse_expr(&s, "2*t").unwrap(), parse_expr(&s, "th").unwrap()];
        let inv = vec![parse_expr(&s, "t").unwrap(), parse_expr(&s, "th").unwrap()];
        assert!(matches!(CoordinateChange::new(&s, &s, fwd, inv), Err(Error::InvalidChange(_))));
        let bad = vec![parse_expr(&s, "th").unwrap(), parse_expr(&s, "th").unwrap()];
        assert!(matches!(CoordinateChange::new(&s, &s, bad.clone(), bad), Err(Error::ParityViolation(_))));
    }

    #[test]
    fn shear_moves_d_t_to_d_u() {
        let c = shear();
        let dt = VectorField::basis(c.source(), 0);
        assert_eq!(c.transform_vector(&dt).unwrap(), VectorField::basis(c.target(), 0));
        let x = VectorField::new(
            c.source(),
            ["t*th1", "t", "1"].iter().map(|e| parse_expr(c.source(), e).unwrap()).collect(),
        )
        .unwrap();
        let back = c.inverse().transform_vector(&c.transform_vector(&x).unwrap()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn identity_is_neutral() {
        let s = ChartSignature::new(["t"], ["th"]).unwrap();
        let id = CoordinateChange::identity(&s);
        let x = VectorField::new(&s, vec![parse_expr(&s, "t^2").unwrap(), parse_expr(&s, "t*th").unwrap()]).unwrap();
        assert_eq!(id.transform_vector(&x).unwrap(), x);
    }
}
