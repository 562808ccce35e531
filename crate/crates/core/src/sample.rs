//! Seeded random sampling of parity-legal data.
//!
//! Polynomials have one to three terms, even degree at most two and nonzero integer coefficients
//! in `[-3, 3]`; odd support is unrestricted.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{block_diagonal, Matrix, Parallelisation};
use crate::connection::{check_gamma, AffineConnection, OddEndomorphism, OddInvolution, OddQuasiConnection};
use crate::geometry::{MixedTensor, OneForm, VectorField};
use crate::grassmann::{q, Chart, Coeff, GradedPoly, Monomial, Parity};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn small_int(&mut self) -> i64 {
        *[-3, -2, -1, 1, 2, 3].choose(&mut self.rng).unwrap()
    }

    pub fn rng_bool(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn coeff(&mut self) -> Coeff {
        q(self.small_int())
    }

    pub fn parity(&mut self) -> Parity {
        Parity::from_bit(self.rng.gen_range(0..2))
    }

    /// Random monomial of the given parity, or `None` if the chart has no odd coordinates.
    pub fn monomial(&mut self, chart: &Chart, parity: Parity) -> Option<Monomial> {
        let o = chart.odd_dim();
        let masks: Vec<u64> = (0..1u64 << o).filter(|m| Parity::from_bit(m.count_ones()) == parity).collect();
        let odd = *masks.choose(&mut self.rng)?;
        let mut exps = vec![0u16; chart.even_dim()];
        if !exps.is_empty() {
            for _ in 0..self.rng.gen_range(0..=2) {
                let i = self.rng.gen_range(0..exps.len());
                exps[i] += 1;
            }
        }
        Some(Monomial::new(&exps, odd))
    }

    pub fn poly(&mut self, chart: &Chart, parity: Parity) -> GradedPoly {
        let mut out = GradedPoly::zero(chart);
        for _ in 0..self.rng.gen_range(1..=3) {
            match self.monomial(chart, parity) {
                Some(m) => {
                    let c = self.coeff();
                    out += &GradedPoly::monomial(chart, m, c);
                }
                None => break,
            }
        }
        out
    }

    /// Homogeneous function of random parity together with that parity.
    pub fn function(&mut self, chart: &Chart) -> (GradedPoly, Parity) {
        let p = if chart.odd_dim() == 0 { Parity::Even } else { self.parity() };
        (self.poly(chart, p), p)
    }

    fn maybe_zero(&mut self, chart: &Chart, parity: Parity) -> GradedPoly {
        if self.rng.gen_range(0..3) == 0 {
            GradedPoly::zero(chart)
        } else {
            self.poly(chart, parity)
        }
    }

    /// Nonzero homogeneous vector field of the given parity.
    pub fn vector(&mut self, chart: &Chart, parity: Parity) -> VectorField {
        loop {
            let comps = (0..chart.len()).map(|a| self.maybe_zero(chart, parity + chart.parity(a))).collect();
            let v = VectorField::with_parity(chart, comps, parity).expect("parity-legal sample");
            if !v.is_zero() {
                return v;
            }
        }
    }

    pub fn any_vector(&mut self, chart: &Chart) -> VectorField {
        let p = self.parity();
        self.vector(chart, p)
    }

    /// Sum of an even and an odd sample.
    pub fn mixed_vector(&mut self, chart: &Chart) -> VectorField {
        &self.vector(chart, Parity::Even) + &self.vector(chart, Parity::Odd)
    }

    pub fn oneform(&mut self, chart: &Chart, parity: Parity) -> OneForm {
        loop {
            let comps = (0..chart.len()).map(|a| self.maybe_zero(chart, parity + chart.parity(a))).collect();
            let v = OneForm::with_parity(chart, comps, parity).expect("parity-legal sample");
            if !v.is_zero() {
                return v;
            }
        }
    }

    pub fn tensor(&mut self, chart: &Chart, p: usize, q: usize, parity: Parity) -> MixedTensor {
        let comps = crate::geometry::index_tuples(chart.len(), p + q)
            .map(|idx| {
                let want = idx.iter().fold(parity, |s, &i| s + chart.parity(i));
                self.maybe_zero(chart, want)
            })
            .collect();
        MixedTensor::with_parity(chart, p, q, comps, parity).expect("parity-legal sample")
    }

    /// Parity-legal odd endomorphism, not necessarily involutive.
    pub fn endomorphism(&mut self, chart: &Chart) -> OddEndomorphism {
        let n = chart.len();
        let rho = (0..n)
            .map(|a| (0..n).map(|b| self.maybe_zero(chart, chart.parity(a) + chart.parity(b) + Parity::Odd)).collect())
            .collect();
        OddEndomorphism::new(chart, rho).expect("parity-legal sample")
    }

    /// Nonzero odd endomorphism that does not square to the identity.
    pub fn non_involution(&mut self, chart: &Chart) -> OddEndomorphism {
        loop {
            let r = if chart.is_square() && self.rng.gen_range(0..4) == 0 {
                OddEndomorphism::swap(chart).unwrap().scale(&q(2))
            } else {
                self.endomorphism(chart)
            };
            if !r.is_zero() && !r.is_involution() {
                return r;
            }
        }
    }

    pub fn gamma(&mut self, chart: &Chart, shift: Parity) -> Vec<GradedPoly> {
        let n = chart.len();
        let mut out = Vec::with_capacity(n * n * n);
        for b in 0..n {
            for a in 0..n {
                for c in 0..n {
                    let p = chart.parity(a) + chart.parity(b) + chart.parity(c) + shift;
                    out.push(self.maybe_zero(chart, p));
                }
            }
        }
        debug_assert!(check_gamma(chart, &out, shift, "gamma").is_ok());
        out
    }

    fn unipotent(&mut self, chart: &Chart, lower: bool) -> Vec<Vec<GradedPoly>> {
        let n = chart.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            GradedPoly::one(chart)
                        } else if (i > j) == lower && self.rng.gen_range(0..2) == 0 {
                            self.poly(chart, chart.parity(i) + chart.parity(j))
                        } else {
                            GradedPoly::zero(chart)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Frame with matrix `L·D·U`: unipotent triangular factors and a constant diagonal.
    pub fn frame(&mut self, chart: &Chart) -> Parallelisation {
        let n = chart.len();
        let l = self.unipotent(chart, true);
        let u = self.unipotent(chart, false);
        let d: Vec<Vec<GradedPoly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { GradedPoly::constant(chart, self.coeff()) } else { GradedPoly::zero(chart) })
                    .collect()
            })
            .collect();
        let f = crate::geometry::matrix::mul(chart, &crate::geometry::matrix::mul(chart, &l, &d), &u);
        let frame = f.into_iter().map(|row| VectorField::new(chart, row).unwrap()).collect();
        Parallelisation::new(chart, frame).expect("LDU frames are invertible")
    }

    /// The coordinate swap or the frame involution of a random frame.
    pub fn involution(&mut self, chart: &Chart) -> OddInvolution {
        if self.rng.gen_range(0..4) == 0 {
            OddInvolution::swap(chart).expect("square chart")
        } else {
            self.frame(chart).involution().expect("square chart")
        }
    }

    /// Random involution with random Christoffel symbols.
    pub fn odd_connection(&mut self, chart: &Chart) -> OddQuasiConnection {
        let rho = self.involution(chart).into_inner();
        let gamma = self.gamma(chart, Parity::Odd);
        OddQuasiConnection::new(rho, gamma).expect("parity-legal sample")
    }

    /// Nonzero non-involutive `ρ` with random Christoffel symbols.
    pub fn quasi_connection(&mut self, chart: &Chart) -> OddQuasiConnection {
        let rho = self.non_involution(chart);
        let gamma = self.gamma(chart, Parity::Odd);
        OddQuasiConnection::new(rho, gamma).expect("parity-legal sample")
    }

    pub fn affine(&mut self, chart: &Chart) -> AffineConnection {
        let gamma = self.gamma(chart, Parity::Even);
        AffineConnection::new(chart, gamma).expect("parity-legal sample")
    }

    fn constant_ldu(&mut self, n: usize) -> Matrix {
        let mut l = vec![vec![q(0); n]; n];
        let mut u = vec![vec![q(0); n]; n];
        for i in 0..n {
            l[i][i] = q(1);
            u[i][i] = self.coeff();
            for j in 0..i {
                l[i][j] = q(self.rng.gen_range(-2..=2));
                u[j][i] = q(self.rng.gen_range(-2..=2));
            }
        }
        crate::catalog::mat_mul(&l, &u)
    }

    /// Invertible constant matrix preserving the even and odd blocks of a frame.
    pub fn constant_frame_change(&mut self, chart: &Chart) -> Matrix {
        let e = self.constant_ldu(chart.even_dim());
        let o = self.constant_ldu(chart.odd_dim());
        block_diagonal(&e, &o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::ChartSignature;

    #[test]
    fn same_seed_same_samples() {
        let c = ChartSignature::new(["x", "y"], ["xi", "eta"]).unwrap();
        let mut a = Sampler::new(11);
        let mut b = Sampler::new(11);
        for _ in 0..10 {
            assert_eq!(a.odd_connection(&c), b.odd_connection(&c));
            assert_eq!(a.mixed_vector(&c), b.mixed_vector(&c));
        }
    }

    #[test]
    fn samples_are_parity_legal() {
        let c = ChartSignature::new(["x", "y"], ["xi", "eta"]).unwrap();
        let mut s = Sampler::new(3);
        for _ in 0..20 {
            let v = s.vector(&c, Parity::Odd);
            assert!(v.split().iter().all(|p| p.parity() == Some(Parity::Odd)));
            assert!(s.involution(&c).is_involution());
            assert!(!s.non_involution(&c).is_involution());
            let f = s.frame(&c);
            assert!(f.duality_holds());
        }
    }
}
