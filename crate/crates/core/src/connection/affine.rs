use crate::error::{Error, Result};
use crate::geometry::VectorField;
use crate::grassmann::{same_chart, Chart, GradedPoly, Parity};

use super::{alpha, check_gamma, gamma_index, OddInvolution, OddQuasiConnection, Violation};

/// Even affine connection `∇̄_X Y = X^a (∂_a Y^c + (-1)^{ã(Ỹ+b̃)} Y^b Γ̄_{ba}^c) ∂_c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineConnection {
    chart: Chart,
    gamma: Vec<GradedPoly>,
}

impl AffineConnection {
    /// Entry `(b, a, c)` must have parity `ã + b̃ + c̃`.
    pub fn new(chart: &Chart, gamma: Vec<GradedPoly>) -> Result<Self> {
        check_gamma(chart, &gamma, Parity::Even, "affine gamma")?;
        Ok(AffineConnection { chart: chart.clone(), gamma })
    }

    pub fn flat(chart: &Chart) -> Self {
        let n = chart.len();
        AffineConnection { chart: chart.clone(), gamma: vec![GradedPoly::zero(chart); n * n * n] }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// `Γ̄_{ba}^c`.
    pub fn gamma(&self, b: usize, a: usize, c: usize) -> &GradedPoly {
        &self.gamma[gamma_index(self.chart.len(), b, a, c)]
    }

    pub fn gammas(&self) -> &[GradedPoly] {
        &self.gamma
    }

    pub fn nabla(&self, x: &VectorField, y: &VectorField) -> Result<VectorField> {
        if !same_chart(x.chart(), &self.chart) || !same_chart(y.chart(), &self.chart) {
            return Err(Error::ChartMismatch);
        }
        let n = self.chart.len();
        let ya: Vec<GradedPoly> = y.comps().iter().map(alpha).collect();
        let mut out = vec![GradedPoly::zero(&self.chart); n];
        for a in 0..n {
            let xa = x.comp(a);
            if xa.is_zero() {
                continue;
            }
            let ys = if self.chart.parity(a).is_odd() { &ya[..] } else { y.comps() };
            for (c, slot) in out.iter_mut().enumerate() {
                let mut inner = y.comp(c).partial(a);
                for b in 0..n {
                    let g = self.gamma(b, a, c);
                    if !g.is_zero() && !ys[b].is_zero() {
                        inner += &(&ys[b] * g);
                    }
                }
                if !inner.is_zero() {
                    *slot += &(xa * &inner);
                }
            }
        }
        let declared = match (x.parity(), y.parity()) {
            (Some(p), Some(q)) => Some(p + q),
            _ => None,
        };
        Ok(VectorField::from_parts(&self.chart, out, declared))
    }

    /// Residuals of the even connection axioms on one sample.
    pub fn axioms_check(&self, x: &VectorField, y: &VectorField, f: &GradedPoly) -> Result<Vec<Violation>> {
        let px = x.homogeneous_parity()?;
        let py = y.homogeneous_parity()?;
        let pf = f.parity().unwrap_or_default();
        if !f.is_homogeneous(pf) {
            return Err(Error::NotHomogeneous(format!("function `{f}`")));
        }
        let mut out = Vec::new();
        let nxy = self.nabla(x, y)?;
        let inferred = VectorField::new(&self.chart, nxy.comps().to_vec())?.parity();
        if !nxy.is_zero() && inferred != Some(px + py) {
            out.push(Violation { law: "parity of affine nabla", residual: nxy.to_string() });
        }
        let r = &self.nabla(&x.scale_left(f), y)? - &nxy.scale_left(f);
        if !r.is_zero() {
            out.push(Violation { law: "affine function linearity", residual: r.to_string() });
        }
        let rhs = &y.scale_left(&x.apply(f)) + &nxy.scale_left(f).signed(px * pf);
        let r = &self.nabla(x, &y.scale_left(f))? - &rhs;
        if !r.is_zero() {
            out.push(Violation { law: "affine Leibniz rule", residual: r.to_string() });
        }
        Ok(out)
    }

    /// The odd connection `∇_X Y = ∇̄_{ρ(X)} Y`: `Γ_{ba}^c = ρ_a^d Γ̄_{bd}^c`.
    pub fn induce(&self, rho: &OddInvolution) -> Result<OddQuasiConnection> {
        if !same_chart(rho.chart(), &self.chart) {
            return Err(Error::ChartMismatch);
        }
        let n = self.chart.len();
        OddQuasiConnection::from_fn(rho.endomorphism().clone(), |b, a, c| {
            let mut acc = GradedPoly::zero(&self.chart);
            for d in 0..n {
                let r = rho.entry(a, d);
                let g = self.gamma(b, d, c);
                if !r.is_zero() && !g.is_zero() {
                    acc += &(r * g);
                }
            }
            acc
        })
    }

    /// The affine connection `∇̄_X Y = ∇_{ρ(X)} Y` of an odd connection:
    /// `Γ̄_{bd}^c = Σ_a (-1)^{d̃+ã+1} ρ_d^a Γ_{ba}^c`.
    pub fn extract(conn: &OddQuasiConnection) -> Result<AffineConnection> {
        conn.require_involution()?;
        let chart = conn.chart().clone();
        let n = chart.len();
        let mut gamma = Vec::with_capacity(n * n * n);
        for b in 0..n {
            for d in 0..n {
                for c in 0..n {
                    let mut acc = GradedPoly::zero(&chart);
                    for a in 0..n {
                        let r = conn.rho().entry(d, a);
                        let g = conn.gamma(b, a, c);
                        if !r.is_zero() && !g.is_zero() {
                            acc += &(&alpha(r) * g);
                        }
                    }
                    gamma.push(acc);
                }
            }
        }
        AffineConnection::new(&chart, gamma)
    }
}

/// Odd `(1,2)` tensor `B(X, Y)`, stored with the layout of Christoffel symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BanalTensor {
    inner: OddQuasiConnection,
}

impl BanalTensor {
    /// Entry `(b, a, c)` must have parity `ã + b̃ + c̃ + 1`.
    pub fn new(chart: &Chart, comps: Vec<GradedPoly>) -> Result<Self> {
        Ok(BanalTensor { inner: OddQuasiConnection::new(super::OddEndomorphism::zero(chart), comps)? })
    }

    /// `B = ∇ - ∇'` for two quasi-connections sharing `ρ`.
    pub fn difference(c1: &OddQuasiConnection, c2: &OddQuasiConnection) -> Result<Self> {
        if !same_chart(c1.chart(), c2.chart()) {
            return Err(Error::ChartMismatch);
        }
        if c1.rho() != c2.rho() {
            return Err(Error::DifferentRho);
        }
        let comps = c1.gammas().iter().zip(c2.gammas()).map(|(a, b)| a - b).collect();
        Self::new(c1.chart(), comps)
    }

    pub fn chart(&self) -> &Chart {
        self.inner.chart()
    }

    pub fn comp(&self, b: usize, a: usize, c: usize) -> &GradedPoly {
        self.inner.gamma(b, a, c)
    }

    pub fn comps(&self) -> &[GradedPoly] {
        self.inner.gammas()
    }

    pub fn is_zero(&self) -> bool {
        self.comps().iter().all(GradedPoly::is_zero)
    }

    pub fn apply(&self, x: &VectorField, y: &VectorField) -> Result<VectorField> {
        self.inner.nabla(x, y)
    }

    /// Residuals of `B(fX,Y) = (-1)^{f̃} f B(X,Y)` and `B(X,fY) = (-1)^{(X̃+1)f̃} f B(X,Y)`.
    pub fn bilinearity_check(&self, x: &VectorField, y: &VectorField, f: &GradedPoly) -> Result<Vec<Violation>> {
        let px = x.homogeneous_parity()?;
        let pf = f.parity().unwrap_or_default();
        let bxy = self.apply(x, y)?;
        let mut out = Vec::new();
        let r = &self.apply(&x.scale_left(f), y)? - &bxy.scale_left(f).signed(pf);
        if !r.is_zero() {
            out.push(Violation { law: "banal linearity in the first slot", residual: r.to_string() });
        }
        let r = &self.apply(x, &y.scale_left(f))? - &bxy.scale_left(f).signed((px + Parity::Odd) * pf);
        if !r.is_zero() {
            out.push(Violation { law: "banal linearity in the second slot", residual: r.to_string() });
        }
        Ok(out)
    }
}
