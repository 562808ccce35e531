use crate::error::{Error, Result};
use crate::geometry::VectorField;
use crate::grassmann::{same_chart, GradedPoly, Parity};

use super::OddQuasiConnection;

/// Tensoriality defects of torsion and curvature in the second slot.
#[derive(Debug, Clone)]
pub struct Anomalies {
    /// `T(X,fY) - (-1)^{(X̃+1)f̃} f T(X,Y)`.
    pub torsion: VectorField,
    /// `R(X,fY)Z - (-1)^{f̃X̃} f R(X,Y)Z`.
    pub curvature: VectorField,
    /// `ρ(X)f · (Y - ρρY)`.
    pub torsion_expected: VectorField,
    /// `(-1)^{f̃} ρ(X)f · ∇_{Y-ρρY} Z`.
    pub curvature_expected: VectorField,
}

impl Anomalies {
    pub fn vanish(&self) -> bool {
        self.torsion.is_zero() && self.curvature.is_zero()
    }

    pub fn match_expected(&self) -> bool {
        self.torsion == self.torsion_expected && self.curvature == self.curvature_expected
    }
}

/// Both sides of the algebraic Bianchi identity.
#[derive(Debug, Clone)]
pub struct BianchiSides {
    pub lhs: VectorField,
    pub rhs: VectorField,
}

impl BianchiSides {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn pairs(x: &VectorField, y: &VectorField) -> Vec<(VectorField, VectorField, Parity, Parity)> {
    let mut out = Vec::new();
    for xs in x.split() {
        for ys in y.split() {
            let (px, py) = (xs.parity().unwrap(), ys.parity().unwrap());
            out.push((xs.clone(), ys, px, py));
        }
    }
    out
}

impl OddQuasiConnection {
    /// `ρ[ρ(X), ρ(Y)]`.
    pub fn rho_bracket(&self, x: &VectorField, y: &VectorField) -> Result<VectorField> {
        self.rho().apply(&self.rho().apply(x)?.bracket(&self.rho().apply(y)?)?)
    }

    /// `T(X,Y) = ∇_X Y + (-1)^{X̃Ỹ} ∇_Y X + (-1)^{X̃} ρ[ρX, ρY]`, extended bilinearly.
    pub fn torsion(&self, x: &VectorField, y: &VectorField) -> Result<VectorField> {
        if !same_chart(x.chart(), self.chart()) || !same_chart(y.chart(), self.chart()) {
            return Err(Error::ChartMismatch);
        }
        let mut out = VectorField::zero(self.chart());
        for (xs, ys, px, py) in pairs(x, y) {
            let t = &(&self.nabla(&xs, &ys)? + &self.nabla(&ys, &xs)?.signed(px * py))
                + &self.rho_bracket(&xs, &ys)?.signed(px);
            out = &out + &t;
        }
        if let (Some(px), Some(py)) = (x.parity(), y.parity()) {
            out = VectorField::from_parts(self.chart(), out.into_comps(), Some(px + py + Parity::Odd));
        }
        Ok(out)
    }

    /// `R(X,Y)Z = ∇_X∇_Y Z - (-1)^{(X̃+1)(Ỹ+1)} ∇_Y∇_X Z - ∇_{ρ[ρX,ρY]} Z`.
    pub fn curvature(&self, x: &VectorField, y: &VectorField, z: &VectorField) -> Result<VectorField> {
        if !same_chart(z.chart(), self.chart()) {
            return Err(Error::ChartMismatch);
        }
        let mut out = VectorField::zero(self.chart());
        for (xs, ys, px, py) in pairs(x, y) {
            let first = self.nabla(&xs, &self.nabla(&ys, z)?)?;
            let second = self.nabla(&ys, &self.nabla(&xs, z)?)?.signed((px + Parity::Odd) * (py + Parity::Odd));
            let third = self.nabla(&self.rho_bracket(&xs, &ys)?, z)?;
            out = &out + &(&(&first - &second) - &third);
        }
        if let (Some(px), Some(py), Some(pz)) = (x.parity(), y.parity(), z.parity()) {
            out = VectorField::from_parts(self.chart(), out.into_comps(), Some(px + py + pz));
        }
        Ok(out)
    }

    /// Failure of torsion and curvature to be `C^∞`-linear in `Y`, with the predicted values.
    pub fn tensoriality_anomalies(
        &self,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
        f: &GradedPoly,
    ) -> Result<Anomalies> {
        let px = x.homogeneous_parity()?;
        y.homogeneous_parity()?;
        z.homogeneous_parity()?;
        let pf = f.parity().unwrap_or_default();
        if !f.is_homogeneous(pf) {
            return Err(Error::NotHomogeneous(format!("function `{f}`")));
        }
        let fy = y.scale_left(f);
        let torsion = &self.torsion(x, &fy)? - &self.torsion(x, y)?.scale_left(f).signed((px + Parity::Odd) * pf);
        let curvature =
            &self.curvature(x, &fy, z)? - &self.curvature(x, y, z)?.scale_left(f).signed(pf * px);
        let rxf = self.rho().apply(x)?.apply(f);
        let defect = y - &self.rho().apply(&self.rho().apply(y)?)?;
        let torsion_expected = defect.scale_left(&rxf);
        let curvature_expected = self.nabla(&defect, z)?.scale_left(&rxf).signed(pf);
        Ok(Anomalies { torsion, curvature, torsion_expected, curvature_expected })
    }

    /// Left and right sides of the algebraic Bianchi identity for homogeneous `X, Y, Z`.
    pub fn bianchi(&self, x: &VectorField, y: &VectorField, z: &VectorField) -> Result<BianchiSides> {
        self.require_involution()?;
        let px = x.homogeneous_parity()?;
        let py = y.homogeneous_parity()?;
        let pz = z.homogeneous_parity()?;
        let one = Parity::Odd;
        let s1 = px * (pz + one);
        let s2 = py * (px + one);
        let s3 = pz * (py + one);
        let lhs = &(&self.curvature(x, y, z)?.signed(s1) + &self.curvature(y, z, x)?.signed(s2))
            + &self.curvature(z, x, y)?.signed(s3);
        let nabla_t = &(&self.nabla(x, &self.torsion(y, z)?)?.signed(s1)
            + &self.nabla(y, &self.torsion(z, x)?)?.signed(s2))
            + &self.nabla(z, &self.torsion(x, y)?)?.signed(s3);
        let t_rho = &(&self.torsion(x, &self.rho_bracket(y, z)?)?.signed(s1 + py)
            + &self.torsion(y, &self.rho_bracket(z, x)?)?.signed(s2 + pz))
            + &self.torsion(z, &self.rho_bracket(x, y)?)?.signed(s3 + px);
        Ok(BianchiSides { lhs, rhs: &nabla_t - &t_rho })
    }

    /// `Div X = Σ_a (-1)^{ã(X̃+1)} (∇_{∂_a} X)^a`, extended linearly.
    pub fn odd_divergence(&self, x: &VectorField) -> Result<GradedPoly> {
        if !same_chart(x.chart(), self.chart()) {
            return Err(Error::ChartMismatch);
        }
        let mut out = GradedPoly::zero(self.chart());
        for xs in x.split() {
            let px = xs.parity().unwrap();
            for a in 0..self.chart().len() {
                let e = VectorField::basis(self.chart(), a);
                let v = self.nabla(&e, &xs)?;
                out += &v.comp(a).signed(self.chart().parity(a) * (px + Parity::Odd));
            }
        }
        Ok(out)
    }
}
