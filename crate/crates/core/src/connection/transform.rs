use crate::error::{Error, Result};
use crate::geometry::{CoordinateChange, VectorField};
use crate::grassmann::{same_chart, GradedPoly, Parity};

use super::{OddEndomorphism, OddQuasiConnection};

impl OddQuasiConnection {
    /// Components of the same quasi-connection in the target chart of `change`.
    pub fn transform(&self, change: &CoordinateChange) -> Result<OddQuasiConnection> {
        if !same_chart(change.source(), self.chart()) {
            return Err(Error::ChartMismatch);
        }
        let src = change.source();
        let tgt = change.target();
        let n = src.len();
        let k = change.inverse_jacobian();
        let h = change.inverse_hessian();
        let l = change
            .jacobian()
            .iter()
            .map(|row| row.iter().map(|e| change.to_target(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let rho = self
            .rho()
            .entries()
            .iter()
            .map(|row| row.iter().map(|e| change.to_target(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let gamma = self.gammas().iter().map(|e| change.to_target(e)).collect::<Result<Vec<_>>>()?;
        let zero = GradedPoly::zero(tgt);
        let sa = |a: usize| src.parity(a);
        let ta = |a: usize| tgt.parity(a);

        // kr[a'][c] = Σ_a (-1)^ã K[a'][a] ρ_a^c
        let mut kr = vec![vec![zero.clone(); n]; n];
        for (ap, row) in kr.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                for a in 0..n {
                    if !k[ap][a].is_zero() && !rho[a][c].is_zero() {
                        *slot += &(&k[ap][a] * &rho[a][c]).signed(sa(a));
                    }
                }
            }
        }
        // m[a'][b'] = (-1)^{ã'} ρ_{a'}^{b'}
        let mut m = vec![vec![zero.clone(); n]; n];
        for ap in 0..n {
            for bp in 0..n {
                for c in 0..n {
                    if !kr[ap][c].is_zero() && !l[c][bp].is_zero() {
                        m[ap][bp] += &(&kr[ap][c] * &l[c][bp]);
                    }
                }
            }
        }
        let rho_t: Vec<Vec<GradedPoly>> =
            m.iter().enumerate().map(|(ap, row)| row.iter().map(|e| e.signed(ta(ap))).collect()).collect();

        // lhl[c][b'][d'] = Σ_{c',d} L[c][c'] H[c'][b'][d] L[d][d']
        let mut lhl = vec![vec![vec![zero.clone(); n]; n]; n];
        for (c, plane) in lhl.iter_mut().enumerate() {
            for (bp, row) in plane.iter_mut().enumerate() {
                for cp in 0..n {
                    if l[c][cp].is_zero() {
                        continue;
                    }
                    for d in 0..n {
                        let hh = &h[cp][bp][d];
                        if hh.is_zero() {
                            continue;
                        }
                        let lh = &l[c][cp] * hh;
                        for (dp, slot) in row.iter_mut().enumerate() {
                            if !l[d][dp].is_zero() {
                                *slot += &(&lh * &l[d][dp]);
                            }
                        }
                    }
                }
            }
        }

        let mut out = Vec::with_capacity(n * n * n);
        for bp in 0..n {
            for ap in 0..n {
                for dp in 0..n {
                    let mut acc = zero.clone();
                    for a in 0..n {
                        let kaa = &k[ap][a];
                        if kaa.is_zero() {
                            continue;
                        }
                        for b in 0..n {
                            let kbb = &k[bp][b];
                            if kbb.is_zero() {
                                continue;
                            }
                            let sign = (sa(a) + Parity::Odd) * (sa(b) + ta(bp)) + sa(a);
                            let kk = (kaa * kbb).signed(sign);
                            for c in 0..n {
                                let g = &gamma[self.gamma_index(b, a, c)];
                                if !g.is_zero() && !l[c][dp].is_zero() {
                                    acc += &(&(&kk * g) * &l[c][dp]);
                                }
                            }
                        }
                    }
                    for c in 0..n {
                        if !kr[ap][c].is_zero() && !lhl[c][bp][dp].is_zero() {
                            acc += &(&kr[ap][c] * &lhl[c][bp][dp]);
                        }
                    }
                    out.push(acc.signed(ta(ap)));
                }
            }
        }
        OddQuasiConnection::new(OddEndomorphism::new(tgt, rho_t)?, out)
    }

    /// `Div X` computed in the source chart and pushed forward, next to `Div X'` computed
    /// from the transformed connection.
    pub fn divergence_in_both_charts(
        &self,
        change: &CoordinateChange,
        x: &VectorField,
    ) -> Result<(GradedPoly, GradedPoly)> {
        let here = change.to_target(&self.odd_divergence(x)?)?;
        let there = self.transform(change)?.odd_divergence(&change.transform_vector(x)?)?;
        Ok((here, there))
    }

    pub fn divergence_invariance_check(&self, change: &CoordinateChange, x: &VectorField) -> Result<bool> {
        let (a, b) = self.divergence_in_both_charts(change, x)?;
        Ok(a == b)
    }
}
