//! Odd quasi-connections, their curvature machinery, and extensions to tensors.

mod affine;
mod derived;
mod extend;
mod transform;

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::VectorField;
use crate::grassmann::{q, same_chart, Chart, Coeff, GradedPoly, Parity};

pub use affine::{AffineConnection, BanalTensor};
pub use derived::{Anomalies, BianchiSides};
pub use extend::Rank2Covariant;

/// One law checked on one sample, with the nonzero residual it left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub law: &'static str,
    pub residual: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: residual {}", self.law, self.residual)
    }
}

pub(crate) fn alpha(f: &GradedPoly) -> GradedPoly {
    f.grade_involution()
}

fn square_matrix(chart: &Chart, m: &[Vec<GradedPoly>], what: &str) -> Result<()> {
    let n = chart.len();
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("{what} must be {n}x{n}")));
    }
    if m.iter().flatten().any(|e| !same_chart(e.chart(), chart)) {
        return Err(Error::ChartMismatch);
    }
    Ok(())
}

/// Odd `C^∞`-linear endomorphism `ρ(∂_a) = ρ_a^b ∂_b` of vector fields.
#[derive(Clone, PartialEq, Eq)]
pub struct OddEndomorphism {
    chart: Chart,
    rho: Vec<Vec<GradedPoly>>,
}

impl OddEndomorphism {
    /// Entries `rho[a][b] = ρ_a^b`, each of parity `ã + b̃ + 1`.
    pub fn new(chart: &Chart, rho: Vec<Vec<GradedPoly>>) -> Result<Self> {
        square_matrix(chart, &rho, "rho")?;
        for (a, row) in rho.iter().enumerate() {
            for (b, e) in row.iter().enumerate() {
                let want = chart.parity(a) + chart.parity(b) + Parity::Odd;
                if !e.is_homogeneous(want) {
                    return Err(Error::ParityViolation(format!(
                        "rho {} {} = `{e}` must be {want}",
                        chart.name(a),
                        chart.name(b)
                    )));
                }
            }
        }
        Ok(OddEndomorphism { chart: chart.clone(), rho })
    }

    pub fn zero(chart: &Chart) -> Self {
        let n = chart.len();
        OddEndomorphism { chart: chart.clone(), rho: vec![vec![GradedPoly::zero(chart); n]; n] }
    }

    /// Coordinate swap `∂_{x^i} ↔ ∂_{ξ^i}` on an `n|n` chart.
    pub fn swap(chart: &Chart) -> Result<Self> {
        if !chart.is_square() {
            return Err(Error::NonSquare { even: chart.even_dim(), odd: chart.odd_dim() });
        }
        let n = chart.even_dim();
        let mut rho = vec![vec![GradedPoly::zero(chart); 2 * n]; 2 * n];
        for i in 0..n {
            rho[i][n + i] = GradedPoly::one(chart);
            rho[n + i][i] = GradedPoly::one(chart);
        }
        Ok(OddEndomorphism { chart: chart.clone(), rho })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn entry(&self, a: usize, b: usize) -> &GradedPoly {
        &self.rho[a][b]
    }

    pub fn entries(&self) -> &[Vec<GradedPoly>] {
        &self.rho
    }

    pub fn is_zero(&self) -> bool {
        self.rho.iter().flatten().all(GradedPoly::is_zero)
    }

    /// `ρ(X) = Σ_a (-1)^{X̃+ã} X^a ρ_a^b ∂_b`, linear in `X`.
    pub fn apply(&self, x: &VectorField) -> Result<VectorField> {
        if !same_chart(x.chart(), &self.chart) {
            return Err(Error::ChartMismatch);
        }
        let n = self.chart.len();
        let mut comps = vec![GradedPoly::zero(&self.chart); n];
        for (a, xa) in x.comps().iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            let ax = alpha(xa);
            for (b, r) in self.rho[a].iter().enumerate() {
                if !r.is_zero() {
                    comps[b] += &(&ax * r);
                }
            }
        }
        Ok(VectorField::from_parts(&self.chart, comps, x.parity().map(Parity::flip)))
    }

    /// Whether `ρ(ρ(∂_a)) = ∂_a` for every coordinate.
    pub fn is_involution(&self) -> bool {
        (0..self.chart.len()).all(|a| {
            let e = VectorField::basis(&self.chart, a);
            self.apply(&self.apply(&e).unwrap()).unwrap() == e
        })
    }

    /// `ρ₁ρ₂ + ρ₂ρ₁ = 2·𝟙` on every basis field.
    pub fn clifford_dirac(&self, other: &OddEndomorphism) -> Result<bool> {
        if !same_chart(&self.chart, &other.chart) {
            return Err(Error::ChartMismatch);
        }
        for a in 0..self.chart.len() {
            let e = VectorField::basis(&self.chart, a);
            let lhs = &self.apply(&other.apply(&e)?)? + &other.apply(&self.apply(&e)?)?;
            if lhs != e.scale(&q(2)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        OddEndomorphism {
            chart: self.chart.clone(),
            rho: self.rho.iter().map(|r| r.iter().map(|e| e.scale(c)).collect()).collect(),
        }
    }

    /// `f·ρ` for an even function `f`.
    pub fn scale_even(&self, f: &GradedPoly) -> Result<Self> {
        if !f.is_homogeneous(Parity::Even) {
            return Err(Error::ParityViolation(format!("module coefficient `{f}` must be even")));
        }
        Ok(OddEndomorphism {
            chart: self.chart.clone(),
            rho: self.rho.iter().map(|r| r.iter().map(|e| f * e).collect()).collect(),
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if !same_chart(&self.chart, &other.chart) {
            return Err(Error::ChartMismatch);
        }
        Ok(OddEndomorphism {
            chart: self.chart.clone(),
            rho: self.rho.iter().zip(&other.rho).map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect()).collect(),
        })
    }
}

impl fmt::Debug for OddEndomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("OddEndomorphism[")?;
        let mut first = true;
        for (a, row) in self.rho.iter().enumerate() {
            for (b, e) in row.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write!(f, "{} {}: {e}", self.chart.name(a), self.chart.name(b))?;
            }
        }
        f.write_str("]")
    }
}

/// An odd endomorphism checked to square to the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddInvolution(OddEndomorphism);

impl OddInvolution {
    pub fn new(rho: OddEndomorphism) -> Result<Self> {
        if rho.is_involution() {
            Ok(OddInvolution(rho))
        } else {
            Err(Error::NotInvolution)
        }
    }

    pub fn swap(chart: &Chart) -> Result<Self> {
        Ok(OddInvolution(OddEndomorphism::swap(chart)?))
    }

    pub fn endomorphism(&self) -> &OddEndomorphism {
        &self.0
    }

    pub fn into_inner(self) -> OddEndomorphism {
        self.0
    }
}

impl std::ops::Deref for OddInvolution {
    type Target = OddEndomorphism;

    fn deref(&self) -> &OddEndomorphism {
        &self.0
    }
}

/// Dense Christoffel-type array `g[b][a][c]` over a chart.
pub(crate) fn gamma_index(n: usize, b: usize, a: usize, c: usize) -> usize {
    (b * n + a) * n + c
}

pub fn check_gamma(chart: &Chart, gamma: &[GradedPoly], shift: Parity, what: &str) -> Result<()> {
    let n = chart.len();
    if gamma.len() != n * n * n {
        return Err(Error::Shape(format!("{what} needs {} entries, got {}", n * n * n, gamma.len())));
    }
    for b in 0..n {
        for a in 0..n {
            for c in 0..n {
                let e = &gamma[gamma_index(n, b, a, c)];
                if !same_chart(e.chart(), chart) {
                    return Err(Error::ChartMismatch);
                }
                let want = chart.parity(a) + chart.parity(b) + chart.parity(c) + shift;
                if !e.is_homogeneous(want) {
                    return Err(Error::ParityViolation(format!(
                        "{what} {} {} {} = `{e}` must be {want}",
                        chart.name(b),
                        chart.name(a),
                        chart.name(c)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Odd quasi-connection `(∇, ρ)` in local form
/// `∇_X Y = (-1)^{X̃+ã} X^a (ρ_a^b ∂_b Y^c + (-1)^{(ã+1)(Ỹ+b̃)} Y^b Γ_{ba}^c) ∂_c`.
#[derive(Clone, PartialEq, Eq)]
pub struct OddQuasiConnection {
    chart: Chart,
    rho: OddEndomorphism,
    gamma: Vec<GradedPoly>,
}

impl OddQuasiConnection {
    /// `gamma` is indexed by [`OddQuasiConnection::gamma_index`]; entry `(b, a, c)` must have
    /// parity `ã + b̃ + c̃ + 1`.
    pub fn new(rho: OddEndomorphism, gamma: Vec<GradedPoly>) -> Result<Self> {
        let chart = rho.chart().clone();
        check_gamma(&chart, &gamma, Parity::Odd, "gamma")?;
        Ok(OddQuasiConnection { chart, rho, gamma })
    }

    /// Connection with all Christoffel symbols zero.
    pub fn flat(rho: OddEndomorphism) -> Self {
        let n = rho.chart().len();
        let chart = rho.chart().clone();
        OddQuasiConnection { gamma: vec![GradedPoly::zero(&chart); n * n * n], chart, rho }
    }

    pub fn from_fn(rho: OddEndomorphism, mut f: impl FnMut(usize, usize, usize) -> GradedPoly) -> Result<Self> {
        let n = rho.chart().len();
        let mut gamma = Vec::with_capacity(n * n * n);
        for b in 0..n {
            for a in 0..n {
                for c in 0..n {
                    gamma.push(f(b, a, c));
                }
            }
        }
        Self::new(rho, gamma)
    }

    pub fn gamma_index(&self, b: usize, a: usize, c: usize) -> usize {
        gamma_index(self.chart.len(), b, a, c)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn rho(&self) -> &OddEndomorphism {
        &self.rho
    }

    /// `Γ_{ba}^c`.
    pub fn gamma(&self, b: usize, a: usize, c: usize) -> &GradedPoly {
        &self.gamma[self.gamma_index(b, a, c)]
    }

    pub fn gammas(&self) -> &[GradedPoly] {
        &self.gamma
    }

    pub fn is_odd_connection(&self) -> bool {
        self.rho.is_involution()
    }

    pub(crate) fn require_involution(&self) -> Result<()> {
        if self.is_odd_connection() {
            Ok(())
        } else {
            Err(Error::NotInvolution)
        }
    }

    fn check_chart(&self, x: &VectorField) -> Result<()> {
        if same_chart(x.chart(), &self.chart) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    /// `∇_X Y`, linear in both arguments.
    pub fn nabla(&self, x: &VectorField, y: &VectorField) -> Result<VectorField> {
        self.check_chart(x)?;
        self.check_chart(y)?;
        let n = self.chart.len();
        let zero = GradedPoly::zero(&self.chart);
        let mut dy: Vec<Option<Vec<GradedPoly>>> = vec![None; n];
        let ya: Vec<GradedPoly> = y.comps().iter().map(alpha).collect();
        let mut out = vec![zero.clone(); n];
        for a in 0..n {
            let xa = x.comp(a);
            if xa.is_zero() {
                continue;
            }
            let ax = alpha(xa);
            let ys = if self.chart.parity(a).is_odd() { y.comps() } else { &ya[..] };
            for (c, slot) in out.iter_mut().enumerate() {
                let mut inner = zero.clone();
                for b in 0..n {
                    let r = self.rho.entry(a, b);
                    if !r.is_zero() {
                        let d = dy[b].get_or_insert_with(|| y.comps().iter().map(|yc| yc.partial(b)).collect());
                        if !d[c].is_zero() {
                            inner += &(r * &d[c]);
                        }
                    }
                    let g = self.gamma(b, a, c);
                    if !g.is_zero() && !ys[b].is_zero() {
                        inner += &(&ys[b] * g);
                    }
                }
                if !inner.is_zero() {
                    *slot += &(&ax * &inner);
                }
            }
        }
        let declared = match (x.parity(), y.parity()) {
            (Some(p), Some(q)) => Some(p + q + Parity::Odd),
            _ => None,
        };
        Ok(VectorField::from_parts(&self.chart, out, declared))
    }

    /// Residuals of the three defining axioms on one sample `(X, Y, f)`.
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
        if !nxy.is_zero() && inferred != Some(px + py + Parity::Odd) {
            out.push(Violation { law: "parity of nabla", residual: nxy.to_string() });
        }
        let lhs = self.nabla(&x.scale_left(f), y)?;
        let rhs = nxy.scale_left(f).signed(pf);
        let r = &lhs - &rhs;
        if !r.is_zero() {
            out.push(Violation { law: "function linearity in the direction", residual: r.to_string() });
        }
        let lhs = self.nabla(x, &y.scale_left(f))?;
        let rxf = self.rho.apply(x)?.apply(f);
        let rhs = &y.scale_left(&rxf) + &nxy.scale_left(f).signed((px + Parity::Odd) * pf);
        let r = &lhs - &rhs;
        if !r.is_zero() {
            out.push(Violation { law: "Leibniz rule in the argument", residual: r.to_string() });
        }
        Ok(out)
    }

    /// `t·C₁ + (1-t)·C₂`.
    pub fn affine_combination(&self, other: &OddQuasiConnection, t: &Coeff) -> Result<OddQuasiConnection> {
        if !same_chart(&self.chart, &other.chart) {
            return Err(Error::ChartMismatch);
        }
        let s = q(1) - t;
        let rho = self.rho.scale(t).checked_add(&other.rho.scale(&s))?;
        let gamma = self.gamma.iter().zip(&other.gamma).map(|(a, b)| &a.scale(t) + &b.scale(&s)).collect();
        Ok(OddQuasiConnection { chart: self.chart.clone(), rho, gamma })
    }

    /// `f·C₁ + C₂` for an even function `f`.
    pub fn module_combination(&self, f: &GradedPoly, other: &OddQuasiConnection) -> Result<OddQuasiConnection> {
        if !same_chart(&self.chart, &other.chart) || !same_chart(f.chart(), &self.chart) {
            return Err(Error::ChartMismatch);
        }
        let rho = self.rho.scale_even(f)?.checked_add(&other.rho)?;
        let gamma = self.gamma.iter().zip(&other.gamma).map(|(a, b)| &(f * a) + b).collect();
        Ok(OddQuasiConnection { chart: self.chart.clone(), rho, gamma })
    }

    /// Same data with Christoffel symbols shifted by a parity-legal array.
    pub fn shifted(&self, shift: &[GradedPoly]) -> Result<OddQuasiConnection> {
        check_gamma(&self.chart, shift, Parity::Odd, "gamma shift")?;
        let gamma = self.gamma.iter().zip(shift).map(|(a, b)| a + b).collect();
        Ok(OddQuasiConnection { chart: self.chart.clone(), rho: self.rho.clone(), gamma })
    }
}

impl fmt::Debug for OddQuasiConnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OddQuasiConnection {{ rho: {:?}, gamma: [", self.rho)?;
        let n = self.chart.len();
        let mut first = true;
        for b in 0..n {
            for a in 0..n {
                for c in 0..n {
                    let e = self.gamma(b, a, c);
                    if e.is_zero() {
                        continue;
                    }
                    if !first {
                        f.write_str(", ")?;
                    }
                    first = false;
                    write!(f, "{} {} {}: {e}", self.chart.name(b), self.chart.name(a), self.chart.name(c))?;
                }
            }
        }
        f.write_str("] }")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::grassmann::ChartSignature;

    fn r11() -> Chart {
        ChartSignature::new(["t"], ["theta"]).unwrap()
    }

    fn vf(c: &Chart, s: &[&str]) -> VectorField {
        VectorField::new(c, s.iter().map(|e| parse_expr(c, e).unwrap()).collect()).unwrap()
    }

    fn susy_rho(c: &Chart) -> OddEndomorphism {
        let e = |s: &str| parse_expr(c, s).unwrap();
        OddEndomorphism::new(c, vec![vec![e("-theta"), e("1")], vec![e("1"), e("-theta")]]).unwrap()
    }

    #[test]
    fn canonical_nabla_examples() {
        let c = r11();
        let conn = OddQuasiConnection::flat(OddEndomorphism::swap(&c).unwrap());
        let dt = VectorField::basis(&c, 0);
        assert!(conn.nabla(&dt, &vf(&c, &["t", "0"])).unwrap().is_zero());
        assert!(conn.nabla(&dt, &vf(&c, &["2", "-1"])).unwrap().is_zero());
        // ∇_{∂_t}(f ∂_t) = ∂_θ f ∂_t
        let y = vf(&c, &["t*theta + theta", "0"]);
        assert_eq!(conn.nabla(&dt, &y).unwrap(), vf(&c, &["t + 1", "0"]));
    }

    #[test]
    fn susy_nabla_p_of_t_d() {
        let c = r11();
        let conn = OddQuasiConnection::flat(susy_rho(&c));
        // Weitzenböck Christoffels of the frame vanish except through ρ; compute from ∇_P(tD) = D(t) D.
        let p = VectorField::basis(&c, 0);
        let td = vf(&c, &["-t*theta", "t"]);
        let got = conn.nabla(&p, &td).unwrap();
        // with Γ = 0 this is the ρ-directional derivative: ρ(P)(tD components)
        let rp = conn.rho().apply(&p).unwrap();
        let want = VectorField::new(&c, td.comps().iter().map(|f| rp.apply(f)).collect()).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn involution_examples() {
        let c = ChartSignature::new(["x1", "x2"], ["xi1", "xi2"]).unwrap();
        let swap = OddEndomorphism::swap(&c).unwrap();
        assert!(swap.is_involution());
        assert!(!swap.scale(&q(2)).is_involution());
        assert!(!OddEndomorphism::zero(&c).is_involution());
        assert!(susy_rho(&r11()).is_involution());
        assert!(OddInvolution::new(swap.scale(&q(2))).is_err());
    }

    #[test]
    fn clifford_dirac_examples() {
        let c = ChartSignature::new(["x1", "x2"], ["xi1", "xi2"]).unwrap();
        let r1 = OddEndomorphism::swap(&c).unwrap();
        assert!(r1.clifford_dirac(&r1).unwrap());
        assert!(!r1.clifford_dirac(&r1.scale(&q(-1))).unwrap());
        let mut rows = r1.entries().to_vec();
        rows[1][3] = -&rows[1][3];
        rows[3][1] = -&rows[3][1];
        let r2 = OddEndomorphism::new(&c, rows).unwrap();
        assert!(r2.is_involution());
        assert!(!r1.clifford_dirac(&r2).unwrap());
    }

    #[test]
    fn parity_illegal_data_is_rejected() {
        let c = r11();
        let mut gamma = vec![GradedPoly::zero(&c); 8];
        // (b, a, c) = (theta, t, t): parity 1 + 0 + 0 + 1 = 0, so `t` is legal and `theta` is not
        gamma[gamma_index(2, 1, 0, 0)] = parse_expr(&c, "t").unwrap();
        assert!(OddQuasiConnection::new(OddEndomorphism::swap(&c).unwrap(), gamma.clone()).is_ok());
        gamma[gamma_index(2, 1, 0, 0)] = parse_expr(&c, "theta").unwrap();
        assert!(matches!(
            OddQuasiConnection::new(OddEndomorphism::swap(&c).unwrap(), gamma),
            Err(Error::ParityViolation(_))
        ));
        let bad = vec![vec![parse_expr(&c, "t").unwrap(), GradedPoly::zero(&c)], vec![GradedPoly::zero(&c); 2]];
        assert!(OddEndomorphism::new(&c, bad).is_err());
    }

    #[test]
    fn combinations() {
        let c = r11();
        let c1 = OddQuasiConnection::flat(OddEndomorphism::swap(&c).unwrap());
        let c2 = OddQuasiConnection::flat(susy_rho(&c));
        assert_eq!(c1.affine_combination(&c2, &q(1)).unwrap(), c1);
        assert_eq!(c1.affine_combination(&c2, &q(0)).unwrap(), c2);
        assert!(c1.module_combination(&parse_expr(&c, "theta").unwrap(), &c2).is_err());
        let m = c1.module_combination(&parse_expr(&c, "t").unwrap(), &c2).unwrap();
        let x = vf(&c, &["t", "0"]);
        let y = vf(&c, &["theta", "t^2"]);
        let f = parse_expr(&c, "t*theta").unwrap();
        assert!(m.axioms_check(&x, &y, &f).unwrap().is_empty());
    }
}
