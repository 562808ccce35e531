use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::grassmann::{same_chart, Chart, GradedPoly, Parity};

/// Parity `p` such that every nonzero component at slot `a` has parity `p + ã`.
pub(crate) fn infer_parity(chart: &Chart, comps: &[GradedPoly]) -> Option<Option<Parity>> {
    let mut found: Option<Parity> = None;
    for (a, c) in comps.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let p = c.parity()? + chart.parity(a);
        match found {
            None => found = Some(p),
            Some(q) if q != p => return None,
            _ => {}
        }
    }
    Some(found)
}

fn check_len(chart: &Chart, comps: &[GradedPoly]) -> Result<()> {
    if comps.len() != chart.len() {
        return Err(Error::Shape(format!("{} components on a chart of dimension {}", comps.len(), chart.len())));
    }
    if comps.iter().any(|c| !same_chart(c.chart(), chart)) {
        return Err(Error::ChartMismatch);
    }
    Ok(())
}

fn check_declared(chart: &Chart, comps: &[GradedPoly], p: Parity, what: &str) -> Result<()> {
    for (a, c) in comps.iter().enumerate() {
        let want = p + chart.parity(a);
        if !c.is_homogeneous(want) {
            return Err(Error::ParityViolation(format!(
                "{what} component `{c}` at `{}` should be {want}",
                chart.name(a)
            )));
        }
    }
    Ok(())
}

fn part(chart: &Chart, comps: &[GradedPoly], p: Parity) -> Vec<GradedPoly> {
    comps.iter().enumerate().map(|(a, c)| c.part(p + chart.parity(a))).collect()
}

macro_rules! component_type {
    ($name:ident, $what:literal) => {
        #[derive(Clone)]
        pub struct $name {
            chart: Chart,
            comps: Vec<GradedPoly>,
            declared: Option<Parity>,
        }

        impl $name {
            pub fn new(chart: &Chart, comps: Vec<GradedPoly>) -> Result<Self> {
                check_len(chart, &comps)?;
                Ok($name { chart: chart.clone(), comps, declared: None })
            }

            /// Components checked against a declared parity.
            pub fn with_parity(chart: &Chart, comps: Vec<GradedPoly>, p: Parity) -> Result<Self> {
                check_len(chart, &comps)?;
                check_declared(chart, &comps, p, $what)?;
                Ok($name { chart: chart.clone(), comps, declared: Some(p) })
            }

            #[allow(dead_code)]
            pub(crate) fn from_parts(chart: &Chart, comps: Vec<GradedPoly>, declared: Option<Parity>) -> Self {
                debug_assert_eq!(comps.len(), chart.len());
                $name { chart: chart.clone(), comps, declared }
            }

            pub fn zero(chart: &Chart) -> Self {
                $name { chart: chart.clone(), comps: vec![GradedPoly::zero(chart); chart.len()], declared: None }
            }

            /// The coordinate basis element at index `a`.
            pub fn basis(chart: &Chart, a: usize) -> Self {
                let mut comps = vec![GradedPoly::zero(chart); chart.len()];
                comps[a] = GradedPoly::one(chart);
                $name { chart: chart.clone(), comps, declared: Some(chart.parity(a)) }
            }

            pub fn chart(&self) -> &Chart {
                &self.chart
            }

            pub fn comps(&self) -> &[GradedPoly] {
                &self.comps
            }

            pub fn comp(&self, a: usize) -> &GradedPoly {
                &self.comps[a]
            }

            pub fn into_comps(self) -> Vec<GradedPoly> {
                self.comps
            }

            pub fn is_zero(&self) -> bool {
                self.comps.iter().all(GradedPoly::is_zero)
            }

            /// Parity of a homogeneous value; zero counts as even unless declared otherwise.
            pub fn parity(&self) -> Option<Parity> {
                if let Some(p) = self.declared {
                    return Some(p);
                }
                infer_parity(&self.chart, &self.comps).map(|p| p.unwrap_or_default())
            }

            pub fn homogeneous_parity(&self) -> Result<Parity> {
                self.parity().ok_or_else(|| Error::NotHomogeneous(format!("{} `{}`", $what, self)))
            }

            pub fn is_homogeneous(&self) -> bool {
                self.parity().is_some()
            }

            /// The homogeneous part of parity `p`.
            pub fn part(&self, p: Parity) -> Self {
                $name { chart: self.chart.clone(), comps: part(&self.chart, &self.comps, p), declared: Some(p) }
            }

            /// Nonzero homogeneous parts; a zero value yields itself.
            pub fn split(&self) -> Vec<Self> {
                if self.is_zero() {
                    return vec![self.clone()];
                }
                [Parity::Even, Parity::Odd].into_iter().map(|p| self.part(p)).filter(|v| !v.is_zero()).collect()
            }

            /// Same components, re-declared with parity `p`.
            pub fn declare(mut self, p: Parity) -> Result<Self> {
                check_declared(&self.chart, &self.comps, p, $what)?;
                self.declared = Some(p);
                Ok(self)
            }

            /// Left multiplication `f · self`.
            pub fn scale_left(&self, f: &GradedPoly) -> Self {
                let declared = match (self.declared, f.parity()) {
                    (Some(p), Some(q)) => Some(p + q),
                    _ => None,
                };
                $name { chart: self.chart.clone(), comps: self.comps.iter().map(|c| f * c).collect(), declared }
            }

            pub fn scale(&self, c: &crate::grassmann::Coeff) -> Self {
                $name {
                    chart: self.chart.clone(),
                    comps: self.comps.iter().map(|v| v.scale(c)).collect(),
                    declared: self.declared,
                }
            }

            /// `(-1)^p · self`.
            pub fn signed(&self, p: Parity) -> Self {
                if p.is_odd() {
                    -self
                } else {
                    self.clone()
                }
            }

            pub fn map_comps(&self, chart: &Chart, f: impl Fn(&GradedPoly) -> Result<GradedPoly>) -> Result<Self> {
                let comps = self.comps.iter().map(f).collect::<Result<Vec<_>>>()?;
                check_len(chart, &comps)?;
                Ok($name { chart: chart.clone(), comps, declared: self.declared })
            }

            pub fn checked_add(&self, other: &Self) -> Result<Self> {
                if !same_chart(&self.chart, &other.chart) {
                    return Err(Error::ChartMismatch);
                }
                Ok(self + other)
            }
        }

        impl PartialEq for $name {
            fn eq(&self, other: &Self) -> bool {
                same_chart(&self.chart, &other.chart) && self.comps == other.comps
            }
        }

        impl Eq for $name {}

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self)
            }
        }

        impl<'a> Add<&'a $name> for &$name {
            type Output = $name;

            fn add(self, rhs: &'a $name) -> $name {
                assert!(same_chart(&self.chart, &rhs.chart), "chart mismatch");
                let declared = match (self.declared, rhs.declared) {
                    (Some(p), Some(q)) if p == q => Some(p),
                    _ => None,
                };
                $name {
                    chart: self.chart.clone(),
                    comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect(),
                    declared,
                }
            }
        }

        impl<'a> Sub<&'a $name> for &$name {
            type Output = $name;

            fn sub(self, rhs: &'a $name) -> $name {
                self + &(-rhs)
            }
        }

        impl Neg for &$name {
            type Output = $name;

            fn neg(self) -> $name {
                $name { chart: self.chart.clone(), comps: self.comps.iter().map(|c| -c).collect(), declared: self.declared }
            }
        }
    };
}

component_type!(VectorField, "vector field");
component_type!(OneForm, "one-form");

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, &self.chart, &self.comps, |name| format!("d_{name}"), false)
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, &self.chart, &self.comps, |name| format!("dx_{name}"), true)
    }
}

fn write_sum(
    f: &mut fmt::Formatter<'_>,
    chart: &Chart,
    comps: &[GradedPoly],
    basis: impl Fn(&str) -> String,
    basis_first: bool,
) -> fmt::Result {
    let mut first = true;
    for (a, c) in comps.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !first {
            f.write_str(" + ")?;
        }
        first = false;
        let b = basis(chart.name(a));
        if basis_first {
            write!(f, "{b}·({c})")?;
        } else {
            write!(f, "({c})·{b}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl VectorField {
    /// `X(f) = Σ_a X^a ∂_a f`.
    pub fn apply(&self, f: &GradedPoly) -> GradedPoly {
        assert!(same_chart(&self.chart, f.chart()), "chart mismatch");
        let mut out = GradedPoly::zero(&self.chart);
        for (a, x) in self.comps.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let d = f.partial(a);
            if !d.is_zero() {
                out += &(x * &d);
            }
        }
        out
    }

    pub fn try_apply(&self, f: &GradedPoly) -> Result<GradedPoly> {
        if !same_chart(&self.chart, f.chart()) {
            return Err(Error::ChartMismatch);
        }
        Ok(self.apply(f))
    }

    /// Graded commutator `[X, Y]`, extended bilinearly to non-homogeneous arguments.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        if !same_chart(&self.chart, &other.chart) {
            return Err(Error::ChartMismatch);
        }
        let mut out = VectorField::zero(&self.chart);
        for x in self.split() {
            for y in other.split() {
                out = &out + &bracket_homogeneous(&x, &y);
            }
        }
        if let (Some(p), Some(q)) = (self.parity(), other.parity()) {
            out.declared = Some(p + q);
        }
        Ok(out)
    }

    /// `⟨X, α⟩ = Σ_a X^a α_a`.
    pub fn pairing(&self, alpha: &OneForm) -> Result<GradedPoly> {
        if !same_chart(&self.chart, &alpha.chart) {
            return Err(Error::ChartMismatch);
        }
        let mut out = GradedPoly::zero(&self.chart);
        for (x, a) in self.comps.iter().zip(&alpha.comps) {
            out += &(x * a);
        }
        Ok(out)
    }
}

fn bracket_homogeneous(x: &VectorField, y: &VectorField) -> VectorField {
    let px = x.parity().unwrap();
    let py = y.parity().unwrap();
    let comps = (0..x.chart.len())
        .map(|c| {
            let xy = x.apply(&y.comps[c]);
            let yx = y.apply(&x.comps[c]);
            &xy - &yx.signed(px * py)
        })
        .collect();
    VectorField { chart: x.chart.clone(), comps, declared: Some(px + py) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::grassmann::{q, ChartSignature};

    fn r11() -> Chart {
        ChartSignature::new(["t"], ["theta"]).unwrap()
    }

    fn field(c: &Chart, srcs: &[&str]) -> VectorField {
        VectorField::new(c, srcs.iter().map(|s| parse_expr(c, s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let c = r11();
        let p = VectorField::basis(&c, 0);
        let d = field(&c, &["-theta", "1"]);
        assert_eq!(p.apply(&parse_expr(&c, "t*theta").unwrap()), parse_expr(&c, "theta").unwrap());
        assert_eq!(d.apply(&parse_expr(&c, "t").unwrap()), parse_expr(&c, "-theta").unwrap());
        assert!(d.apply(&GradedPoly::one(&c)).is_zero());
    }

    #[test]
    fn bracket_examples() {
        let c = r11();
        let p = VectorField::basis(&c, 0);
        let d = field(&c, &["-theta", "1"]);
        assert_eq!(d.parity(), Some(Parity::Odd));
        assert_eq!(d.bracket(&d).unwrap(), p.scale(&q(-2)));
        assert!(p.bracket(&d).unwrap().is_zero());
        let x = field(&c, &["t", "0"]);
        assert!(x.bracket(&x).unwrap().is_zero());
    }

    #[test]
    fn pairing_examples() {
        let c = r11();
        let dt = OneForm::basis(&c, 0);
        assert_eq!(VectorField::basis(&c, 0).pairing(&dt).unwrap(), GradedPoly::one(&c));
        assert!(VectorField::basis(&c, 1).pairing(&dt).unwrap().is_zero());
        let x = field(&c, &["theta", "0"]);
        let alpha = OneForm::new(&c, vec![parse_expr(&c, "t").unwrap(), GradedPoly::zero(&c)]).unwrap();
        assert_eq!(x.pairing(&alpha).unwrap(), parse_expr(&c, "theta*t").unwrap());
    }

    #[test]
    fn parity_bookkeeping() {
        let c = r11();
        let mixed = field(&c, &["t", "t"]);
        assert_eq!(mixed.parity(), None);
        assert!(mixed.homogeneous_parity().is_err());
        let parts = mixed.split();
        assert_eq!(parts.len(), 2);
        assert_eq!(&parts[0] + &parts[1], VectorField::new(&c, mixed.comps().to_vec()).unwrap());
        assert!(VectorField::with_parity(&c, mixed.comps().to_vec(), Parity::Even).is_err());
        assert!(VectorField::new(&c, vec![GradedPoly::one(&c)]).is_err());
    }
}
