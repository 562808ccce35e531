//! Dense square matrices of graded polynomials.

use crate::error::{Error, Result};
use crate::grassmann::{Chart, GradedPoly};

pub type PolyMatrix = Vec<Vec<GradedPoly>>;

pub fn identity(chart: &Chart, n: usize) -> PolyMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { GradedPoly::one(chart) } else { GradedPoly::zero(chart) }).collect())
        .collect()
}

/// `(AB)[i][j] = Σ_k A[i][k] B[k][j]`, products taken in that order.
pub fn mul(chart: &Chart, a: &[Vec<GradedPoly>], b: &[Vec<GradedPoly>]) -> PolyMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = GradedPoly::zero(chart);
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            acc += &(x * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn is_identity(m: &[Vec<GradedPoly>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, e)| if i == j { e.as_constant() == Some(crate::grassmann::q(1)) } else { e.is_zero() })
    })
}

/// Two-sided inverse by Gauss-Jordan elimination with left row operations.
///
/// A pivot must be a nonzero constant plus a nilpotent part. The result is checked on both sides.
pub fn inverse(chart: &Chart, m: &[Vec<GradedPoly>]) -> Result<PolyMatrix> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("matrix with {n} rows is not square")));
    }
    let mut a: PolyMatrix = m.to_vec();
    let mut inv = identity(chart, n);
    for k in 0..n {
        let (row, pinv) = (k..n)
            .find_map(|r| a[r][k].try_inverse().map(|p| (r, p)))
            .ok_or_else(|| Error::NotInvertible(format!("no invertible pivot in column {k}")))?;
        a.swap(k, row);
        inv.swap(k, row);
        a[k] = a[k].iter().map(|e| &pinv * e).collect();
        inv[k] = inv[k].iter().map(|e| &pinv * e).collect();
        for r in 0..n {
            if r == k || a[r][k].is_zero() {
                continue;
            }
            let f = a[r][k].clone();
            for j in 0..n {
                if !a[k][j].is_zero() {
                    let t = &f * &a[k][j];
                    a[r][j] -= &t;
                }
                if !inv[k][j].is_zero() {
                    let t = &f * &inv[k][j];
                    inv[r][j] -= &t;
                }
            }
        }
    }
    if !is_identity(&mul(chart, m, &inv)) || !is_identity(&mul(chart, &inv, m)) {
        return Err(Error::NotInvertible("elimination did not produce a two-sided inverse".into()));
    }
    Ok(inv)
}
