//! `(p, q)` tensors `T = δx^{a_1}⋯δx^{a_p} T_{a_p⋯a_1}^{b_q⋯b_1} ∂_{b_1}⋯∂_{b_q}`.
//!
//! Components are stored with indices in written order: the lower indices `l_1..l_p`
//! (so `l_i = a_{p+1-i}`) followed by the upper indices `u_1..u_q` (so `u_j = b_{q+1-j}`).
//! The `i`-th vector argument contracts with `l_i` and the `j`-th one-form with `u_j`.

use std::fmt;

use crate::error::{Error, Result};
use crate::grassmann::{same_chart, Chart, GradedPoly, Parity};

use super::change::CoordinateChange;
use super::field::{OneForm, VectorField};

#[derive(Clone)]
pub struct MixedTensor {
    chart: Chart,
    p: usize,
    q: usize,
    comps: Vec<GradedPoly>,
    declared: Option<Parity>,
}

/// Iterator over all index tuples of a given length.
pub fn index_tuples(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total).map(move |mut k| {
        let mut idx = vec![0; len];
        for slot in idx.iter_mut().rev() {
            *slot = k % n;
            k /= n;
        }
        idx
    })
}

fn parity_sum(chart: &Chart, idx: &[usize]) -> Parity {
    idx.iter().fold(Parity::Even, |acc, &i| acc + chart.parity(i))
}

impl MixedTensor {
    pub fn new(chart: &Chart, p: usize, q: usize, comps: Vec<GradedPoly>) -> Result<Self> {
        let want = chart.len().pow((p + q) as u32);
        if comps.len() != want {
            return Err(Error::Shape(format!("{} components for a ({p},{q}) tensor, expected {want}", comps.len())));
        }
        if comps.iter().any(|c| !same_chart(c.chart(), chart)) {
            return Err(Error::ChartMismatch);
        }
        Ok(MixedTensor { chart: chart.clone(), p, q, comps, declared: None })
    }

    pub fn with_parity(chart: &Chart, p: usize, q: usize, comps: Vec<GradedPoly>, parity: Parity) -> Result<Self> {
        let mut t = Self::new(chart, p, q, comps)?;
        t.check_parity(parity)?;
        t.declared = Some(parity);
        Ok(t)
    }

    pub fn zero(chart: &Chart, p: usize, q: usize) -> Self {
        let n = chart.len().pow((p + q) as u32);
        MixedTensor { chart: chart.clone(), p, q, comps: vec![GradedPoly::zero(chart); n], declared: None }
    }

    /// Build from a function of the written-order index tuple.
    pub fn from_fn(chart: &Chart, p: usize, q: usize, mut f: impl FnMut(&[usize]) -> GradedPoly) -> Self {
        let comps = index_tuples(chart.len(), p + q).map(|idx| f(&idx)).collect();
        MixedTensor { chart: chart.clone(), p, q, comps, declared: None }
    }

    /// The identity `(1,1)` tensor `δ_a^b`.
    pub fn identity(chart: &Chart) -> Self {
        let mut t = Self::from_fn(chart, 1, 1, |i| {
            if i[0] == i[1] {
                GradedPoly::one(chart)
            } else {
                GradedPoly::zero(chart)
            }
        });
        t.declared = Some(Parity::Even);
        t
    }

    fn check_parity(&self, parity: Parity) -> Result<()> {
        for (idx, c) in index_tuples(self.chart.len(), self.p + self.q).zip(&self.comps) {
            let want = parity + parity_sum(&self.chart, &idx);
            if !c.is_homogeneous(want) {
                return Err(Error::ParityViolation(format!("tensor component {idx:?} = `{c}` should be {want}")));
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn comps(&self) -> &[GradedPoly] {
        &self.comps
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.p + self.q, "index tuple length");
        idx.iter().fold(0, |acc, &i| acc * self.chart.len() + i)
    }

    /// Component at a written-order index tuple.
    pub fn get(&self, idx: &[usize]) -> &GradedPoly {
        &self.comps[self.offset(idx)]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(GradedPoly::is_zero)
    }

    pub fn parity(&self) -> Option<Parity> {
        if let Some(p) = self.declared {
            return Some(p);
        }
        let mut found = None;
        for (idx, c) in index_tuples(self.chart.len(), self.p + self.q).zip(&self.comps) {
            if c.is_zero() {
                continue;
            }
            let p = c.parity()? + parity_sum(&self.chart, &idx);
            match found {
                None => found = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(found.unwrap_or_default())
    }

    pub fn homogeneous_parity(&self) -> Result<Parity> {
        self.parity().ok_or_else(|| Error::NotHomogeneous("tensor".into()))
    }

    pub fn declare(mut self, parity: Parity) -> Result<Self> {
        self.check_parity(parity)?;
        self.declared = Some(parity);
        Ok(self)
    }

    /// Nonzero homogeneous parts.
    pub fn split(&self) -> Vec<MixedTensor> {
        if self.is_zero() {
            return vec![self.clone()];
        }
        [Parity::Even, Parity::Odd]
            .into_iter()
            .map(|par| {
                let comps = index_tuples(self.chart.len(), self.p + self.q)
                    .zip(&self.comps)
                    .map(|(idx, c)| c.part(par + parity_sum(&self.chart, &idx)))
                    .collect();
                MixedTensor { chart: self.chart.clone(), p: self.p, q: self.q, comps, declared: Some(par) }
            })
            .filter(|t| !t.is_zero())
            .collect()
    }

    /// `T(Y_1..Y_p; α^1..α^q)`, extended multilinearly to non-homogeneous arguments.
    pub fn evaluate(&self, ys: &[VectorField], alphas: &[OneForm]) -> Result<GradedPoly> {
        if ys.len() != self.p || alphas.len() != self.q {
            return Err(Error::Shape(format!(
                "({},{}) tensor applied to {} vector fields and {} one-forms",
                self.p,
                self.q,
                ys.len(),
                alphas.len()
            )));
        }
        if ys.iter().any(|y| !same_chart(y.chart(), &self.chart))
            || alphas.iter().any(|a| !same_chart(a.chart(), &self.chart))
        {
            return Err(Error::ChartMismatch);
        }
        let ys_split: Vec<Vec<VectorField>> = ys.iter().map(VectorField::split).collect();
        let as_split: Vec<Vec<OneForm>> = alphas.iter().map(OneForm::split).collect();
        let mut out = GradedPoly::zero(&self.chart);
        let mut choice_y = vec![0usize; self.p];
        let mut choice_a = vec![0usize; self.q];
        loop {
            let y: Vec<&VectorField> = choice_y.iter().enumerate().map(|(i, &k)| &ys_split[i][k]).collect();
            let a: Vec<&OneForm> = choice_a.iter().enumerate().map(|(j, &k)| &as_split[j][k]).collect();
            out += &self.evaluate_homogeneous(&y, &a);
            if !advance(&mut choice_y, &ys_split.iter().map(Vec::len).collect::<Vec<_>>())
                && !advance(&mut choice_a, &as_split.iter().map(Vec::len).collect::<Vec<_>>())
            {
                break;
            }
        }
        Ok(out)
    }

    fn evaluate_homogeneous(&self, ys: &[&VectorField], alphas: &[&OneForm]) -> GradedPoly {
        let py: Vec<Parity> = ys.iter().map(|y| y.parity().unwrap()).collect();
        let pa: Vec<Parity> = alphas.iter().map(|a| a.parity().unwrap()).collect();
        let mut out = GradedPoly::zero(&self.chart);
        for (idx, t) in index_tuples(self.chart.len(), self.p + self.q).zip(&self.comps) {
            if t.is_zero() {
                continue;
            }
            let (l, u) = idx.split_at(self.p);
            let mut acc = GradedPoly::one(&self.chart);
            let mut sign = Parity::Even;
            let mut lower_sum = Parity::Even;
            for i in 0..self.p {
                let yi = ys[i].comp(l[i]);
                if yi.is_zero() {
                    acc = GradedPoly::zero(&self.chart);
                    break;
                }
                acc = &acc * yi;
                sign = sign + (py[i] + self.chart.parity(l[i])) * lower_sum;
                lower_sum = lower_sum + self.chart.parity(l[i]);
            }
            if acc.is_zero() {
                continue;
            }
            acc = &acc * t;
            for j in 0..self.q {
                let aj = alphas[j].comp(u[j]);
                if aj.is_zero() {
                    acc = GradedPoly::zero(&self.chart);
                    break;
                }
                acc = &acc * aj;
                let later = parity_sum(&self.chart, &u[j + 1..]);
                sign = sign + (pa[j] + self.chart.parity(u[j])) * later;
            }
            if !acc.is_zero() {
                out += &acc.signed(sign);
            }
        }
        out
    }

    /// Component transformation with the Koszul sign `χ`.
    pub fn transform(&self, change: &CoordinateChange) -> Result<MixedTensor> {
        if !same_chart(change.source(), &self.chart) {
            return Err(Error::ChartMismatch);
        }
        let tgt = change.target();
        let n = self.chart.len();
        let k = change.inverse_jacobian();
        let l: Vec<Vec<GradedPoly>> = change
            .jacobian()
            .iter()
            .map(|row| row.iter().map(|e| change.to_target(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let pushed: Vec<GradedPoly> = self.comps.iter().map(|c| change.to_target(c)).collect::<Result<_>>()?;
        let (p, q) = (self.p, self.q);
        let par = |i: usize| self.chart.parity(i);
        let mut comps = Vec::with_capacity(pushed.len());
        for primed in index_tuples(n, p + q) {
            let mut acc = GradedPoly::zero(tgt);
            for (idx, t) in index_tuples(n, p + q).zip(&pushed) {
                if t.is_zero() {
                    continue;
                }
                // labels: a_i = l_{p+1-i}, b_j = u_{q+1-j}
                let a = |i: usize| idx[p - i];
                let ap = |i: usize| primed[p - i];
                let b = |j: usize| idx[p + q - j];
                let bp = |j: usize| primed[p + q - j];
                let mut chi = Parity::Even;
                for i in 1..=p {
                    for j in i + 1..=p {
                        chi = chi + (par(a(i)) + par(ap(i))) * par(ap(j));
                    }
                }
                for j in 2..=q {
                    for i in 1..j {
                        chi = chi + (par(b(j)) + par(bp(j))) * par(bp(i));
                    }
                }
                let mut term = GradedPoly::one(tgt);
                for i in 1..=p {
                    term = &term * &k[ap(i)][a(i)];
                    if term.is_zero() {
                        break;
                    }
                }
                if term.is_zero() {
                    continue;
                }
                term = &term * t;
                for j in 1..=q {
                    term = &term * &l[b(j)][bp(j)];
                    if term.is_zero() {
                        break;
                    }
                }
                if !term.is_zero() {
                    acc += &term.signed(chi);
                }
            }
            comps.push(acc);
        }
        Ok(MixedTensor { chart: tgt.clone(), p, q, comps, declared: self.declared })
    }

    pub fn scale_left(&self, f: &GradedPoly) -> MixedTensor {
        MixedTensor {
            chart: self.chart.clone(),
            p: self.p,
            q: self.q,
            comps: self.comps.iter().map(|c| f * c).collect(),
            declared: match (self.declared, f.parity()) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        }
    }
}

/// Odometer increment; false once every position has wrapped.
fn advance(choice: &mut [usize], lens: &[usize]) -> bool {
    for (c, &len) in choice.iter_mut().zip(lens).rev() {
        *c += 1;
        if *c < len {
            return true;
        }
        *c = 0;
    }
    false
}

impl PartialEq for MixedTensor {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.p == other.p && self.q == other.q && self.comps == other.comps
    }
}

impl Eq for MixedTensor {}

impl fmt::Debug for MixedTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedTensor({},{})[", self.p, self.q)?;
        let mut first = true;
        for (idx, c) in index_tuples(self.chart.len(), self.p + self.q).zip(&self.comps) {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            let names: Vec<&str> = idx.iter().map(|&i| self.chart.name(i)).collect();
            write!(f, "{}: {c}", names.join(" "))?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::grassmann::ChartSignature;

    #[test]
    fn scalar_transform_is_substitution() {
        let s = ChartSignature::new(["t"], ["th"]).unwrap();
        let u = ChartSignature::new(["u"], ["e"]).unwrap();
        let fwd = vec![parse_expr(&s, "2*t + 1").unwrap(), parse_expr(&s, "3*th").unwrap()];
        let inv = vec![parse_expr(&u, "1/2*u - 1/2").unwrap(), parse_expr(&u, "1/3*e").unwrap()];
        let c = CoordinateChange::new(&s, &u, fwd, inv).unwrap();
        let f = parse_expr(&s, "t*th").unwrap();
        let t = MixedTensor::new(&s, 0, 0, vec![f.clone()]).unwrap();
        assert_eq!(t.transform(&c).unwrap().comps()[0], c.to_target(&f).unwrap());
    }

    #[test]
    fn basis_evaluation_gives_components() {
        let s = ChartSignature::new(["t"], ["th"]).unwrap();
        let g = MixedTensor::from_fn(&s, 2, 0, |i| GradedPoly::int(&s, (1 + i[0] * 2 + i[1]) as i64));
        for a in 0..2 {
            for b in 0..2 {
                let v = g.evaluate(&[VectorField::basis(&s, a), VectorField::basis(&s, b)], &[]).unwrap();
                assert_eq!(&v, g.get(&[a, b]));
            }
        }
    }

    #[test]
    fn identity_pairs() {
        let s = ChartSignature::new(["t"], ["th"]).unwrap();
        let id = MixedTensor::identity(&s);
        let y = VectorField::new(&s, vec![parse_expr(&s, "th").unwrap(), parse_expr(&s, "t").unwrap()]).unwrap();
        let a = OneForm::new(&s, vec![parse_expr(&s, "t^2").unwrap(), parse_expr(&s, "th").unwrap()]).unwrap();
        assert_eq!(id.evaluate(&[y.clone()], &[a.clone()]).unwrap(), y.pairing(&a).unwrap());
    }
}
