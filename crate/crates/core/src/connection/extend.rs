use crate::error::{Error, Result};
use crate::geometry::{index_tuples, MixedTensor, OneForm, VectorField};
use crate::grassmann::{same_chart, Chart, GradedPoly, Parity};

use super::{OddQuasiConnection, Violation};

/// Rank-2 covariant tensor `G(Y, Z) = (-1)^{ã(Z̃+b̃)} Y^a Z^b G_{ab}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank2Covariant {
    tensor: MixedTensor,
    parity: Parity,
}

impl Rank2Covariant {
    /// `comps[a][b] = G_{ab}`, each of parity `G̃ + ã + b̃`.
    pub fn new(chart: &Chart, comps: Vec<Vec<GradedPoly>>, parity: Parity) -> Result<Self> {
        let n = chart.len();
        if comps.len() != n || comps.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("metric must be {n}x{n}")));
        }
        let flat = comps.into_iter().flatten().collect();
        let tensor = MixedTensor::with_parity(chart, 2, 0, flat, parity)?;
        Ok(Rank2Covariant { tensor, parity })
    }

    pub fn zero(chart: &Chart, parity: Parity) -> Self {
        Rank2Covariant { tensor: MixedTensor::zero(chart, 2, 0), parity }
    }

    pub fn chart(&self) -> &Chart {
        self.tensor.chart()
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn comp(&self, a: usize, b: usize) -> &GradedPoly {
        self.tensor.get(&[a, b])
    }

    pub fn tensor(&self) -> &MixedTensor {
        &self.tensor
    }

    pub fn eval(&self, y: &VectorField, z: &VectorField) -> Result<GradedPoly> {
        self.tensor.evaluate(&[y.clone(), z.clone()], &[])
    }
}

impl OddQuasiConnection {
    /// `∇_X f = ρ(X) f`.
    pub fn nabla_function(&self, x: &VectorField, f: &GradedPoly) -> Result<GradedPoly> {
        if !same_chart(f.chart(), self.chart()) {
            return Err(Error::ChartMismatch);
        }
        Ok(self.rho().apply(x)?.apply(f))
    }

    /// `(∇_X α)_a = (-1)^{X̃(ã+1)+ã+b̃} (X^b ρ_b^c ∂_c α_a - X^b Γ_{ab}^c α_c)`.
    pub fn nabla_oneform(&self, x: &VectorField, form: &OneForm) -> Result<OneForm> {
        if !same_chart(x.chart(), self.chart()) || !same_chart(form.chart(), self.chart()) {
            return Err(Error::ChartMismatch);
        }
        let chart = self.chart();
        let n = chart.len();
        let mut comps = vec![GradedPoly::zero(chart); n];
        for xs in x.split() {
            let px = xs.parity().unwrap();
            for b in 0..n {
                let xb = xs.comp(b);
                if xb.is_zero() {
                    continue;
                }
                for (a, slot) in comps.iter_mut().enumerate() {
                    let mut inner = GradedPoly::zero(chart);
                    for c in 0..n {
                        let r = self.rho().entry(b, c);
                        if !r.is_zero() {
                            let d = form.comp(a).partial(c);
                            if !d.is_zero() {
                                inner += &(r * &d);
                            }
                        }
                        let g = self.gamma(a, b, c);
                        if !g.is_zero() && !form.comp(c).is_zero() {
                            inner -= &(g * form.comp(c));
                        }
                    }
                    if inner.is_zero() {
                        continue;
                    }
                    let sign = px * (chart.parity(a) + Parity::Odd) + chart.parity(a) + chart.parity(b);
                    *slot += &(xb * &inner).signed(sign);
                }
            }
        }
        let out = OneForm::new(chart, comps)?;
        match (x.parity(), form.parity()) {
            (Some(p), Some(q)) => out.declare(p + q + Parity::Odd),
            _ => Ok(out),
        }
    }

    /// `∇_X T` from the graded Leibniz expansion, evaluated on coordinate basis arguments.
    pub fn nabla_tensor(&self, x: &VectorField, t: &MixedTensor) -> Result<MixedTensor> {
        if !same_chart(x.chart(), self.chart()) || !same_chart(t.chart(), self.chart()) {
            return Err(Error::ChartMismatch);
        }
        let chart = self.chart();
        let n = chart.len();
        let (p, q) = t.valence();
        let mut acc: Vec<GradedPoly> = vec![GradedPoly::zero(chart); n.pow((p + q) as u32)];
        for xs in x.split() {
            let px = xs.parity().unwrap();
            let twist = px + Parity::Odd;
            let rx = self.rho().apply(&xs)?;
            let dy: Vec<VectorField> =
                (0..n).map(|l| self.nabla(&xs, &VectorField::basis(chart, l))).collect::<Result<_>>()?;
            let dform: Vec<OneForm> =
                (0..n).map(|u| self.nabla_oneform(&xs, &OneForm::basis(chart, u))).collect::<Result<_>>()?;
            for th in t.split() {
                let pt = th.parity().unwrap();
                for (k, idx) in index_tuples(n, p + q).enumerate() {
                    let (l, u) = idx.split_at(p);
                    let ys: Vec<VectorField> = l.iter().map(|&i| VectorField::basis(chart, i)).collect();
                    let forms: Vec<OneForm> = u.iter().map(|&j| OneForm::basis(chart, j)).collect();
                    let lower = |from: usize| l[from..].iter().fold(Parity::Even, |s, &i| s + chart.parity(i));
                    let mut v = rx.apply(th.get(&idx)).signed(twist * lower(0));
                    for i in 0..p {
                        let mut args = ys.clone();
                        args[i] = dy[l[i]].clone();
                        v -= &th.evaluate(&args, &forms)?.signed(twist * lower(i));
                    }
                    let mut before = pt;
                    for j in 0..q {
                        let mut args = forms.clone();
                        args[j] = dform[u[j]].clone();
                        v -= &th.evaluate(&ys, &args)?.signed(twist * before);
                        before = before + chart.parity(u[j]);
                    }
                    acc[k] += &v;
                }
            }
        }
        let total = MixedTensor::new(chart, p, q, acc)?;
        match (x.parity(), t.parity()) {
            (Some(a), Some(b)) => total.declare(a + b + Parity::Odd),
            _ => Ok(total),
        }
    }

    /// Residual of `ρ(X)G(Y,Z) = G(∇_X Y, Z) + (-1)^{(X̃+1)Ỹ} G(Y, ∇_X Z)`.
    pub fn metric_residual(
        &self,
        g: &Rank2Covariant,
        x: &VectorField,
        y: &VectorField,
        z: &VectorField,
    ) -> Result<GradedPoly> {
        let px = x.homogeneous_parity()?;
        let py = y.homogeneous_parity()?;
        z.homogeneous_parity()?;
        let lhs = self.nabla_function(x, &g.eval(y, z)?)?;
        let rhs = &g.eval(&self.nabla(x, y)?, z)? + &g.eval(y, &self.nabla(x, z)?)?.signed((px + Parity::Odd) * py);
        Ok(&lhs - &rhs)
    }

    /// Nonzero compatibility residuals over the given `(X, Y, Z)` samples.
    pub fn metric_compatibility_check(
        &self,
        g: &Rank2Covariant,
        samples: &[(VectorField, VectorField, VectorField)],
    ) -> Result<Vec<Violation>> {
        let mut out = Vec::new();
        for (x, y, z) in samples {
            let r = self.metric_residual(g, x, y, z)?;
            if !r.is_zero() {
                out.push(Violation { law: "metric compatibility", residual: r.to_string() });
            }
        }
        Ok(out)
    }
}
