use crate::error::{Error, Result};
use crate::grassmann::{q, Coeff};

/// Dense rational matrix.
pub type Matrix = Vec<Vec<Coeff>>;

fn from_ints(rows: &[&[i64]]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect())
        .collect()
}

pub fn mat_add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca) = (a.len(), a.first().map_or(0, Vec::len));
    let (rb, cb) = (b.len(), b.first().map_or(0, Vec::len));
    (0..ra * rb).map(|i| (0..ca * cb).map(|j| &a[i / rb][j / cb] * &b[i % rb][j % cb]).collect()).collect()
}

/// Inverse by Gauss-Jordan elimination with nonzero pivots.
pub fn mat_inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = scalar(n, q(1));
    for k in 0..n {
        let r = (k..n).find(|&r| m[r][k] != q(0))?;
        m.swap(k, r);
        inv.swap(k, r);
        let p = m[k][k].recip();
        m[k] = m[k].iter().map(|v| v * &p).collect();
        inv[k] = inv[k].iter().map(|v| v * &p).collect();
        for r in 0..n {
            if r != k && m[r][k] != q(0) {
                let f = m[r][k].clone();
                for j in 0..n {
                    let (mv, iv) = (&f * &m[k][j], &f * &inv[k][j]);
                    m[r][j] -= mv;
                    inv[r][j] -= iv;
                }
            }
        }
    }
    Some(inv)
}

fn scalar(n: usize, c: Coeff) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { c.clone() } else { q(0) }).collect()).collect()
}

/// Real representation of the Clifford algebra with `η = diag(-1, 1, 1, 1)` and its
/// charge conjugation matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaData {
    pub eta: [i64; 4],
    pub gamma: [Matrix; 4],
    pub c: Matrix,
}

impl GammaData {
    /// `(Cγ^μ)`.
    pub fn c_gamma(&self, mu: usize) -> Matrix {
        mat_mul(&self.c, &self.gamma[mu])
    }

    /// `γ^μγ^ν + γ^νγ^μ = 2η^{μν}` for all pairs.
    pub fn clifford_holds(&self) -> bool {
        (0..4).all(|mu| {
            (0..4).all(|nu| {
                let ac = mat_add(&mat_mul(&self.gamma[mu], &self.gamma[nu]), &mat_mul(&self.gamma[nu], &self.gamma[mu]));
                let want = if mu == nu { scalar(4, q(2 * self.eta[mu])) } else { scalar(4, q(0)) };
                ac == want
            })
        })
    }

    pub fn c_gamma_symmetric(&self) -> bool {
        (0..4).all(|mu| {
            let m = self.c_gamma(mu);
            m == transpose(&m)
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !self.clifford_holds() {
            return Err(Error::Validation("gamma matrices violate the Clifford relations".into()));
        }
        if !self.c_gamma_symmetric() {
            return Err(Error::Validation("some C gamma^mu is not symmetric".into()));
        }
        Ok(())
    }
}

/// Tensor products of the real 2x2 matrices `ε`, `σ₁`, `σ₃` and `𝟙`.
pub fn build_gamma() -> GammaData {
    let one = from_ints(&[&[1, 0], &[0, 1]]);
    let s1 = from_ints(&[&[0, 1], &[1, 0]]);
    let s3 = from_ints(&[&[1, 0], &[0, -1]]);
    let eps = from_ints(&[&[0, 1], &[-1, 0]]);
    let data = GammaData {
        eta: [-1, 1, 1, 1],
        gamma: [kron(&eps, &one), kron(&s3, &one), kron(&s1, &s1), kron(&s1, &s3)],
        c: kron(&eps, &one),
    };
    data.validate().expect("gamma construction");
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_examples() {
        let g = build_gamma();
        let id = scalar(4, q(1));
        let g00 = mat_add(&mat_mul(&g.gamma[0], &g.gamma[0]), &mat_mul(&g.gamma[0], &g.gamma[0]));
        assert_eq!(g00, scalar(4, q(-2)));
        let g12 = mat_add(&mat_mul(&g.gamma[1], &g.gamma[2]), &mat_mul(&g.gamma[2], &g.gamma[1]));
        assert_eq!(g12, scalar(4, q(0)));
        assert!(g.c_gamma_symmetric());
        assert_ne!(g.c_gamma(1), id);
    }

    #[test]
    fn broken_representation_is_caught() {
        let mut g = build_gamma();
        g.gamma[2] = transpose(&g.gamma[0]);
        assert!(g.validate().is_err());
    }
}
