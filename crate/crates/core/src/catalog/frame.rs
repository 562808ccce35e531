use crate::connection::{OddEndomorphism, OddInvolution, OddQuasiConnection, Rank2Covariant};
use crate::error::{Error, Result};
use crate::geometry::{matrix, OneForm, PolyMatrix, VectorField};
use crate::grassmann::{same_chart, Chart, Coeff, GradedPoly, Parity};

use super::gamma::Matrix;

/// Global frame `Z_α = F_α^a ∂_a` with its dual coframe `ω^α = dx^a M_a^α`.
///
/// Frame fields are ordered like the coordinates: even fields first, then odd ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parallelisation {
    chart: Chart,
    frame: Vec<VectorField>,
    coframe: Vec<OneForm>,
    f: PolyMatrix,
    m: PolyMatrix,
}

impl Parallelisation {
    pub fn new(chart: &Chart, frame: Vec<VectorField>) -> Result<Self> {
        if frame.len() != chart.len() {
            return Err(Error::Shape(format!("frame has {} fields, chart has {} coordinates", frame.len(), chart.len())));
        }
        for (al, z) in frame.iter().enumerate() {
            if !same_chart(z.chart(), chart) {
                return Err(Error::ChartMismatch);
            }
            let want = chart.parity(al);
            if z.is_zero() || !z.split().iter().all(|p| p.parity() == Some(want)) {
                return Err(Error::ParityViolation(format!("frame field {al} must be a nonzero {want} field")));
            }
        }
        let frame: Vec<VectorField> =
            frame.into_iter().enumerate().map(|(al, z)| z.declare(chart.parity(al))).collect::<Result<_>>()?;
        let f: PolyMatrix = frame.iter().map(|z| z.comps().to_vec()).collect();
        let m = matrix::inverse(chart, &f)?;
        let n = chart.len();
        let coframe = (0..n)
            .map(|al| OneForm::with_parity(chart, (0..n).map(|a| m[a][al].clone()).collect(), chart.parity(al)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Parallelisation { chart: chart.clone(), frame, coframe, f, m })
    }

    /// `Z_a = ∂_a`.
    pub fn coordinate(chart: &Chart) -> Self {
        Self::new(chart, (0..chart.len()).map(|a| VectorField::basis(chart, a)).collect()).expect("coordinate frame")
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn frame(&self) -> &[VectorField] {
        &self.frame
    }

    pub fn coframe(&self) -> &[OneForm] {
        &self.coframe
    }

    /// `F[α][a]`, the coordinate components of `Z_α`.
    pub fn frame_matrix(&self) -> &PolyMatrix {
        &self.f
    }

    /// `M[a][α]`, so that `∂_a = M[a][α] Z_α`.
    pub fn coframe_matrix(&self) -> &PolyMatrix {
        &self.m
    }

    /// Frame components `Y^α = Y^a M[a][α]`.
    pub fn components(&self, y: &VectorField) -> Result<Vec<GradedPoly>> {
        if !same_chart(y.chart(), &self.chart) {
            return Err(Error::ChartMismatch);
        }
        let n = self.chart.len();
        Ok((0..n)
            .map(|al| {
                let mut acc = GradedPoly::zero(&self.chart);
                for (a, ya) in y.comps().iter().enumerate() {
                    if !ya.is_zero() && !self.m[a][al].is_zero() {
                        acc += &(ya * &self.m[a][al]);
                    }
                }
                acc
            })
            .collect())
    }

    /// `Σ_α Y^α Z_α`.
    pub fn combine(&self, comps: &[GradedPoly]) -> Result<VectorField> {
        if comps.len() != self.chart.len() {
            return Err(Error::Shape(format!("expected {} frame components", self.chart.len())));
        }
        let mut out = VectorField::zero(&self.chart);
        for (c, z) in comps.iter().zip(&self.frame) {
            if !c.is_zero() {
                out = &out + &z.scale_left(c);
            }
        }
        Ok(out)
    }

    /// `E_α^a = (-1)^{ãα̃} F[α][a]`.
    pub fn vierbein(&self, al: usize, a: usize) -> GradedPoly {
        self.f[al][a].signed(self.chart.parity(a) * self.chart.parity(al))
    }

    /// `E_a^α = (-1)^{ãα̃} M[a][α]`.
    pub fn covierbein(&self, a: usize, al: usize) -> GradedPoly {
        self.m[a][al].signed(self.chart.parity(a) * self.chart.parity(al))
    }

    /// `⟨Z_β, ω^α⟩ = δ_β^α`.
    pub fn duality_holds(&self) -> bool {
        self.frame.iter().enumerate().all(|(b, z)| {
            self.coframe.iter().enumerate().all(|(al, w)| {
                let v = z.pairing(w).unwrap();
                if al == b {
                    v.as_constant() == Some(crate::grassmann::q(1))
                } else {
                    v.is_zero()
                }
            })
        })
    }

    /// `Σ_a E_a^α E_β^a = δ^α_β` and `Σ_α E_α^a E_b^α = δ^a_b`, read literally.
    pub fn vierbein_orthonormality_literal(&self) -> bool {
        let n = self.chart.len();
        let delta = |i: usize, j: usize, v: &GradedPoly| {
            if i == j {
                v.as_constant() == Some(crate::grassmann::q(1))
            } else {
                v.is_zero()
            }
        };
        let first = (0..n).all(|al| {
            (0..n).all(|be| {
                let mut acc = GradedPoly::zero(&self.chart);
                for a in 0..n {
                    acc += &(&self.covierbein(a, al) * &self.vierbein(be, a));
                }
                delta(al, be, &acc)
            })
        });
        let second = (0..n).all(|a| {
            (0..n).all(|b| {
                let mut acc = GradedPoly::zero(&self.chart);
                for al in 0..n {
                    acc += &(&self.vierbein(al, a) * &self.covierbein(b, al));
                }
                delta(a, b, &acc)
            })
        });
        first && second
    }

    /// The frame `Z'_α = A[α][β] Z_β` for a constant matrix preserving parity blocks.
    pub fn transformed(&self, a: &Matrix) -> Result<Self> {
        let n = self.chart.len();
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("frame change must be {n}x{n}")));
        }
        for (i, row) in a.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if self.chart.parity(i) != self.chart.parity(j) && *v != crate::grassmann::q(0) {
                    return Err(Error::ParityViolation(format!("frame change entry ({i}, {j}) mixes parities")));
                }
            }
        }
        let inv = super::gamma::mat_inverse(a).ok_or_else(|| Error::NotInvertible("constant frame change".into()))?;
        let lift = |m: &Matrix| -> PolyMatrix {
            m.iter().map(|r| r.iter().map(|v| GradedPoly::constant(&self.chart, v.clone())).collect()).collect()
        };
        // (A F)^{-1} = F^{-1} A^{-1}
        let f = matrix::mul(&self.chart, &lift(a), &self.f);
        let m = matrix::mul(&self.chart, &self.m, &lift(&inv));
        Self::from_matrices(&self.chart, f, m)
    }

    /// Frame and coframe from a matrix and a claimed two-sided inverse.
    pub fn from_matrices(chart: &Chart, f: PolyMatrix, m: PolyMatrix) -> Result<Self> {
        if !matrix::is_identity(&matrix::mul(chart, &f, &m)) || !matrix::is_identity(&matrix::mul(chart, &m, &f)) {
            return Err(Error::NotInvertible("frame and coframe matrices are not inverse".into()));
        }
        let n = chart.len();
        let frame = f
            .iter()
            .enumerate()
            .map(|(al, row)| VectorField::with_parity(chart, row.clone(), chart.parity(al)))
            .collect::<Result<Vec<_>>>()?;
        let coframe = (0..n)
            .map(|al| OneForm::with_parity(chart, (0..n).map(|a| m[a][al].clone()).collect(), chart.parity(al)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Parallelisation { chart: chart.clone(), frame, coframe, f, m })
    }

    /// `ρ(Z_i) = Z_{n+i}`, `ρ(Z_{n+i}) = Z_i`, in coordinate components.
    pub fn involution(&self) -> Result<OddInvolution> {
        if !self.chart.is_square() {
            return Err(Error::NonSquare { even: self.chart.even_dim(), odd: self.chart.odd_dim() });
        }
        let n = self.chart.len();
        let h = self.chart.even_dim();
        let sigma = |al: usize| if al < h { al + h } else { al - h };
        let rho = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut acc = GradedPoly::zero(&self.chart);
                        for al in 0..n {
                            let f = &self.f[sigma(al)][b];
                            if !self.m[a][al].is_zero() && !f.is_zero() {
                                acc += &(&self.m[a][al].grade_involution() * f);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        OddInvolution::new(OddEndomorphism::new(&self.chart, rho)?)
    }

    /// `Div X = Σ_α (-1)^{α̃(X̃+1)} Z_{σ(α)}(X^α)` with frame components `X^α`.
    pub fn frame_divergence(&self, x: &VectorField) -> Result<GradedPoly> {
        if !self.chart.is_square() {
            return Err(Error::NonSquare { even: self.chart.even_dim(), odd: self.chart.odd_dim() });
        }
        let h = self.chart.even_dim();
        let mut out = GradedPoly::zero(&self.chart);
        for xs in x.split() {
            let px = xs.parity().unwrap();
            let comps = self.components(&xs)?;
            for i in 0..h {
                out += &self.frame[i + h].apply(&comps[i]);
                out -= &self.frame[i].apply(&comps[i + h]).signed(px);
            }
        }
        Ok(out)
    }
}

fn require_square(par: &Parallelisation, rho: &OddInvolution) -> Result<()> {
    let chart = par.chart();
    if !chart.is_square() {
        return Err(Error::NonSquare { even: chart.even_dim(), odd: chart.odd_dim() });
    }
    if !same_chart(rho.chart(), chart) {
        return Err(Error::ChartMismatch);
    }
    Ok(())
}

/// The connection with `∇_X(Y^α Z_α) = ρ(X)(Y^α) Z_α`:
/// `Γ_{ba}^c = ρ_a^d (∂_d M[b][α]) F[α][c]`.
pub fn weitzenbock(par: &Parallelisation, rho: &OddInvolution) -> Result<OddQuasiConnection> {
    require_square(par, rho)?;
    let chart = par.chart();
    let n = chart.len();
    let m = par.coframe_matrix();
    let f = par.frame_matrix();
    // dm[d][b][α] = ∂_d M[b][α]
    let dm: Vec<PolyMatrix> = (0..n).map(|d| m.iter().map(|row| row.iter().map(|e| e.partial(d)).collect()).collect()).collect();
    OddQuasiConnection::from_fn(rho.endomorphism().clone(), |b, a, c| {
        let mut acc = GradedPoly::zero(chart);
        for d in 0..n {
            let r = rho.entry(a, d);
            if r.is_zero() {
                continue;
            }
            for al in 0..n {
                if !dm[d][b][al].is_zero() && !f[al][c].is_zero() {
                    acc += &(&(r * &dm[d][b][al]) * &f[al][c]);
                }
            }
        }
        acc
    })
}

/// Sign convention for the Christoffel symbols of a Weitzenböck connection written with vierbeins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VierbeinSigns {
    /// `(-1)^{b̃(c̃+1) + d̃(c̃+α̃)}`.
    Literal,
    /// `(-1)^{α̃ + b̃c̃ + d̃(c̃+α̃)}`.
    Corrected,
}

/// `Γ_{ba}^c = ± ρ_a^d E_α^c ∂_d E_b^α`, flat layout as in [`OddQuasiConnection::gammas`].
pub fn vierbein_christoffel(par: &Parallelisation, rho: &OddInvolution, signs: VierbeinSigns) -> Result<Vec<GradedPoly>> {
    require_square(par, rho)?;
    let chart = par.chart();
    let n = chart.len();
    let p = |i: usize| chart.parity(i);
    let de: Vec<PolyMatrix> =
        (0..n).map(|d| (0..n).map(|b| (0..n).map(|al| par.covierbein(b, al).partial(d)).collect()).collect()).collect();
    let mut out = Vec::with_capacity(n * n * n);
    for b in 0..n {
        for a in 0..n {
            for c in 0..n {
                let mut acc = GradedPoly::zero(chart);
                for d in 0..n {
                    let r = rho.entry(a, d);
                    if r.is_zero() {
                        continue;
                    }
                    for al in 0..n {
                        let e = par.vierbein(al, c);
                        if e.is_zero() || de[d][b][al].is_zero() {
                            continue;
                        }
                        let sign = match signs {
                            VierbeinSigns::Literal => p(b) * (p(c) + Parity::Odd) + p(d) * (p(c) + p(al)),
                            VierbeinSigns::Corrected => p(al) + p(b) * p(c) + p(d) * (p(c) + p(al)),
                        };
                        acc += &(&(r * &e) * &de[d][b][al]).signed(sign);
                    }
                }
                out.push(acc);
            }
        }
    }
    Ok(out)
}

/// `g(Z_i, Z_{n+j}) = g(Z_{n+j}, Z_i) = δ_ij`, zero on same-parity pairs, in coordinate components
/// `G_{ab} = (-1)^{α̃(b̃+β̃)} M[a][α] M[b][β] g_{αβ}`.
pub fn induced_odd_metric(par: &Parallelisation) -> Result<Rank2Covariant> {
    let chart = par.chart();
    if !chart.is_square() {
        return Err(Error::NonSquare { even: chart.even_dim(), odd: chart.odd_dim() });
    }
    let n = chart.len();
    let h = chart.even_dim();
    let m = par.coframe_matrix();
    let comps = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut acc = GradedPoly::zero(chart);
                    for al in 0..n {
                        let be = if al < h { al + h } else { al - h };
                        if m[a][al].is_zero() || m[b][be].is_zero() {
                            continue;
                        }
                        let sign = chart.parity(al) * (chart.parity(b) + chart.parity(be));
                        acc += &(&m[a][al] * &m[b][be]).signed(sign);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Rank2Covariant::new(chart, comps, Parity::Odd)
}

/// Invertible constant block-diagonal matrices are the only frame changes considered; this
/// builds `diag(e, o)` from the two blocks.
pub fn block_diagonal(even: &Matrix, odd: &Matrix) -> Matrix {
    let (p, q) = (even.len(), odd.len());
    let zero = || Coeff::from_integer(0.into());
    (0..p + q)
        .map(|i| {
            (0..p + q)
                .map(|j| {
                    if i < p && j < p {
                        even[i][j].clone()
                    } else if i >= p && j >= p {
                        odd[i - p][j - p].clone()
                    } else {
                        zero()
                    }
                })
                .collect()
        })
        .collect()
}
