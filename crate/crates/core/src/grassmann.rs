//! Graded polynomial superfunctions `Q[x¹..xⁿ] ⊗ Λ(ξ¹..ξᵐ)` with exact rational coefficients.
//!
//! A [`GradedPoly`] is a finite sum of monomials `c · x^k · ξ_{i1} ⋯ ξ_{ir}` with the odd
//! generators kept in strictly increasing index order. Reordering into that canonical form
//! folds the Koszul sign into the coefficient, so two polynomials are equal exactly when
//! their term maps are equal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exact coefficient type.
pub type Coeff = BigRational;

/// Integer-valued coefficient.
pub fn q(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational coefficient `num/den`.
pub fn qq(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Element of Z₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u32) -> Self {
        if bit % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> u32 {
        self as u32
    }

    /// `(-1)^self` as a coefficient.
    pub fn sign(self) -> Coeff {
        if self.is_odd() {
            q(-1)
        } else {
            q(1)
        }
    }

    pub fn flip(self) -> Self {
        self + Parity::Odd
    }
}

impl Add for Parity {
    type Output = Parity;

    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() + rhs.bit())
    }
}

impl Mul for Parity {
    type Output = Parity;

    fn mul(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() * rhs.bit())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Ordered coordinate names of a superdomain `R^{n|m}`.
///
/// Coordinates are indexed even names first, then odd names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChartSignature {
    even: Vec<String>,
    odd: Vec<String>,
}

/// Shared handle to a chart signature.
pub type Chart = Arc<ChartSignature>;

/// Largest supported number of odd coordinates (they are stored as a bit set).
pub const MAX_ODD: usize = 64;

impl ChartSignature {
    pub fn new<I, J, S, T>(even: I, odd: J) -> Result<Chart>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let even: Vec<String> = even.into_iter().map(Into::into).collect();
        let odd: Vec<String> = odd.into_iter().map(Into::into).collect();
        if odd.len() > MAX_ODD {
            return Err(Error::InvalidChart(format!(
                "at most {MAX_ODD} odd coordinates are supported"
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in even.iter().chain(&odd) {
            if !is_identifier(name) {
                return Err(Error::InvalidChart(format!("`{name}` is not a valid coordinate name")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{name}`")));
            }
        }
        Ok(Arc::new(ChartSignature { even, odd }))
    }

    pub fn even_dim(&self) -> usize {
        self.even.len()
    }

    pub fn odd_dim(&self) -> usize {
        self.odd.len()
    }

    /// Total number of coordinates `n + m`.
    pub fn len(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the chart has dimension `n|n`.
    pub fn is_square(&self) -> bool {
        self.even.len() == self.odd.len()
    }

    pub fn parity(&self, a: usize) -> Parity {
        if a < self.even.len() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn name(&self, a: usize) -> &str {
        if a < self.even.len() {
            &self.even[a]
        } else {
            &self.odd[a - self.even.len()]
        }
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.even
            .iter()
            .position(|n| n == name)
            .or_else(|| self.odd.iter().position(|n| n == name).map(|i| i + self.even.len()))
    }

    pub fn even_names(&self) -> &[String] {
        &self.even
    }

    pub fn odd_names(&self) -> &[String] {
        &self.odd
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.even.iter().chain(&self.odd).map(String::as_str)
    }

    pub fn check_index(&self, a: usize) -> Result<()> {
        if a < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownCoordinate(format!("#{a}")))
        }
    }
}

impl fmt::Display for ChartSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R^{{{}|{}}}({} | {})", self.even.len(), self.odd.len(), self.even.join(", "), self.odd.join(", "))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn same_chart(a: &Chart, b: &Chart) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Monomial `x^k · ξ_S` with `S` stored as a bit set in increasing index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: SmallVec<[u16; 8]>,
    odd: u64,
}

impl Monomial {
    pub fn one(even_dim: usize) -> Self {
        Monomial { exps: SmallVec::from_elem(0, even_dim), odd: 0 }
    }

    pub fn new(exps: &[u16], odd: u64) -> Self {
        Monomial { exps: SmallVec::from_slice(exps), odd }
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    /// Odd generators present, as a bit set over odd-coordinate positions.
    pub fn odd_set(&self) -> u64 {
        self.odd
    }

    pub fn odd_degree(&self) -> u32 {
        self.odd.count_ones()
    }

    pub fn even_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn parity(&self) -> Parity {
        Parity::from_bit(self.odd.count_ones())
    }

    pub fn is_constant(&self) -> bool {
        self.odd == 0 && self.exps.iter().all(|&e| e == 0)
    }

    /// Product with the Koszul sign from merging the odd parts, or `None` when an odd
    /// generator repeats.
    fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        if self.odd & other.odd != 0 {
            return None;
        }
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        Some((Monomial { exps, odd: self.odd | other.odd }, merge_sign(self.odd, other.odd)))
    }
}

/// Parity of the number of inversions in `ξ_S ξ_T` (both increasing).
fn merge_sign(s: u64, t: u64) -> bool {
    let mut count = 0u32;
    let mut rest = t;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j >= 63 { 0 } else { !0u64 << (j + 1) };
        count += (s & above).count_ones();
    }
    count % 2 == 1
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let deg = |m: &Monomial| m.even_degree() + m.odd_degree();
        deg(self)
            .cmp(&deg(other))
            .then_with(|| other.exps.cmp(&self.exps))
            .then_with(|| self.odd.reverse_bits().cmp(&other.odd.reverse_bits()).reverse())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial superfunction on a chart.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedPoly {
    chart: Chart,
    terms: BTreeMap<Monomial, Coeff>,
}

impl GradedPoly {
    pub fn zero(chart: &Chart) -> Self {
        GradedPoly { chart: chart.clone(), terms: BTreeMap::new() }
    }

    pub fn one(chart: &Chart) -> Self {
        Self::constant(chart, q(1))
    }

    pub fn constant(chart: &Chart, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(chart.even_dim()), c);
        }
        GradedPoly { chart: chart.clone(), terms }
    }

    pub fn int(chart: &Chart, n: i64) -> Self {
        Self::constant(chart, q(n))
    }

    /// The coordinate function `x^a`.
    pub fn coord(chart: &Chart, a: usize) -> Self {
        assert!(a < chart.len(), "coordinate index {a} out of range");
        let n = chart.even_dim();
        let mut m = Monomial::one(n);
        if a < n {
            m.exps[a] = 1;
        } else {
            m.odd = 1 << (a - n);
        }
        let mut terms = BTreeMap::new();
        terms.insert(m, q(1));
        GradedPoly { chart: chart.clone(), terms }
    }

    pub fn coord_named(chart: &Chart, name: &str) -> Result<Self> {
        let a = chart.index(name).ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        Ok(Self::coord(chart, a))
    }

    pub fn monomial(chart: &Chart, m: Monomial, c: Coeff) -> Self {
        assert_eq!(m.exps.len(), chart.even_dim(), "monomial does not fit chart");
        assert!(chart.odd_dim() == 64 || m.odd >> chart.odd_dim() == 0, "monomial does not fit chart");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        GradedPoly { chart: chart.clone(), terms }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// Constant term, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(q(0)),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_constant().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Parity of a nonzero homogeneous polynomial; `None` for zero or mixed parity.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(Monomial::parity);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// Whether every term has parity `p` (the zero polynomial is homogeneous of both parities).
    pub fn is_homogeneous(&self, p: Parity) -> bool {
        self.terms.keys().all(|m| m.parity() == p)
    }

    pub fn part(&self, p: Parity) -> GradedPoly {
        GradedPoly {
            chart: self.chart.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.parity() == p).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn even_part(&self) -> GradedPoly {
        self.part(Parity::Even)
    }

    pub fn odd_part(&self) -> GradedPoly {
        self.part(Parity::Odd)
    }

    /// The parity automorphism `f ↦ (-1)^{f̃} f`, extended linearly.
    pub fn grade_involution(&self) -> GradedPoly {
        GradedPoly {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), if m.parity().is_odd() { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// `(-1)^{p} · self`.
    pub fn signed(&self, p: Parity) -> GradedPoly {
        if p.is_odd() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, c: &Coeff) -> GradedPoly {
        if c.is_zero() {
            return GradedPoly::zero(&self.chart);
        }
        GradedPoly { chart: self.chart.clone(), terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn checked_add(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.ensure_chart(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.ensure_chart(other)?;
        Ok(self * other)
    }

    fn ensure_chart(&self, other: &GradedPoly) -> Result<()> {
        if same_chart(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn mul_impl(&self, other: &GradedPoly) -> GradedPoly {
        assert!(same_chart(&self.chart, &other.chart), "chart mismatch in product");
        let mut out = GradedPoly::zero(&self.chart);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = ma.mul(mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// Left partial derivative `∂/∂x^a`.
    ///
    /// Panics if `a` is out of range; see [`GradedPoly::try_partial`].
    pub fn partial(&self, a: usize) -> GradedPoly {
        assert!(a < self.chart.len(), "coordinate index {a} out of range");
        let n = self.chart.even_dim();
        let mut out = GradedPoly::zero(&self.chart);
        for (m, c) in &self.terms {
            if a < n {
                let k = m.exps[a];
                if k == 0 {
                    continue;
                }
                let mut dm = m.clone();
                dm.exps[a] = k - 1;
                out.add_term(dm, c * q(k as i64));
            } else {
                let bit = 1u64 << (a - n);
                if m.odd & bit == 0 {
                    continue;
                }
                let below = (m.odd & (bit - 1)).count_ones();
                let mut dm = m.clone();
                dm.odd &= !bit;
                out.add_term(dm, if below % 2 == 1 { -c } else { c.clone() });
            }
        }
        out
    }

    pub fn try_partial(&self, a: usize) -> Result<GradedPoly> {
        self.chart.check_index(a)?;
        Ok(self.partial(a))
    }

    pub fn partial_by_name(&self, name: &str) -> Result<GradedPoly> {
        let a = self.chart.index(name).ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        Ok(self.partial(a))
    }

    /// Ring homomorphism sending each coordinate to its image.
    pub fn substitute(&self, subst: &Substitution) -> Result<GradedPoly> {
        if !same_chart(&self.chart, &subst.source) {
            return Err(Error::ChartMismatch);
        }
        let n = self.chart.even_dim();
        let mut powers: Vec<Vec<GradedPoly>> = vec![Vec::new(); n];
        let mut out = GradedPoly::zero(&subst.target);
        for (m, c) in &self.terms {
            let mut acc = GradedPoly::constant(&subst.target, c.clone());
            for (i, &k) in m.exps.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let img = subst.image(i, &self.chart)?;
                let cache = &mut powers[i];
                if cache.is_empty() {
                    cache.push(GradedPoly::one(&subst.target));
                }
                while cache.len() <= k as usize {
                    let next = cache.last().unwrap() * img;
                    cache.push(next);
                }
                acc = &acc * &cache[k as usize];
            }
            let mut bits = m.odd;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                acc = &acc * subst.image(n + j, &self.chart)?;
            }
            out += &acc;
        }
        Ok(out)
    }

    /// Evaluate all even coordinates at rational values, leaving a pure Grassmann element.
    pub fn eval_even(&self, point: &BTreeMap<usize, Coeff>) -> Result<GradedPoly> {
        let n = self.chart.even_dim();
        let mut vals = Vec::with_capacity(n);
        for i in 0..n {
            match point.get(&i) {
                Some(v) => vals.push(v.clone()),
                None => return Err(Error::MissingAssignment(self.chart.name(i).to_string())),
            }
        }
        let mut out = GradedPoly::zero(&self.chart);
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &k) in m.exps.iter().enumerate() {
                if k > 0 {
                    v *= num_traits::pow::pow(vals[i].clone(), k as usize);
                }
            }
            out.add_term(Monomial { exps: SmallVec::from_elem(0, n), odd: m.odd }, v);
        }
        Ok(out)
    }

    /// Maximum total degree in the even coordinates.
    pub fn even_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::even_degree).max().unwrap_or(0)
    }

    /// Multiplicative inverse when the polynomial is a nonzero constant plus a nilpotent part.
    pub fn try_inverse(&self) -> Option<GradedPoly> {
        let one = Monomial::one(self.chart.even_dim());
        let c = self.terms.get(&one)?.clone();
        let mut rest = self.clone();
        rest.terms.remove(&one);
        if rest.terms.keys().any(|m| m.odd_degree() == 0) {
            return None;
        }
        let inv_c = c.recip();
        // (c + N)^{-1} = c^{-1} Σ_k (-N/c)^k, and N^{m+1} = 0 for m odd generators
        let step = rest.scale(&-&inv_c);
        let mut power = GradedPoly::constant(&self.chart, inv_c);
        let mut out = power.clone();
        loop {
            power = &power * &step;
            if power.is_zero() {
                return Some(out);
            }
            out += &power;
        }
    }
}

impl fmt::Debug for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedPoly({self})")
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let n = self.chart.even_dim();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_constant() {
                factors.push(abs.to_string());
            }
            for (j, &k) in m.exps.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(self.chart.name(j).to_string()),
                    _ => factors.push(format!("{}^{}", self.chart.name(j), k)),
                }
            }
            let mut bits = m.odd;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                factors.push(self.chart.name(n + j).to_string());
            }
            f.write_str(&factors.join(" * "))?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a GradedPoly> for &GradedPoly {
    type Output = GradedPoly;

    fn add(self, rhs: &'a GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a GradedPoly> for &GradedPoly {
    type Output = GradedPoly;

    fn sub(self, rhs: &'a GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a GradedPoly> for &GradedPoly {
    type Output = GradedPoly;

    fn mul(self, rhs: &'a GradedPoly) -> GradedPoly {
        self.mul_impl(rhs)
    }
}

impl Add for GradedPoly {
    type Output = GradedPoly;

    fn add(mut self, rhs: GradedPoly) -> GradedPoly {
        self += &rhs;
        self
    }
}

impl Sub for GradedPoly {
    type Output = GradedPoly;

    fn sub(mut self, rhs: GradedPoly) -> GradedPoly {
        self -= &rhs;
        self
    }
}

impl Mul for GradedPoly {
    type Output = GradedPoly;

    fn mul(self, rhs: GradedPoly) -> GradedPoly {
        self.mul_impl(&rhs)
    }
}

impl<'a> AddAssign<&'a GradedPoly> for GradedPoly {
    fn add_assign(&mut self, rhs: &'a GradedPoly) {
        assert!(same_chart(&self.chart, &rhs.chart), "chart mismatch in sum");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> SubAssign<&'a GradedPoly> for GradedPoly {
    fn sub_assign(&mut self, rhs: &'a GradedPoly) {
        assert!(same_chart(&self.chart, &rhs.chart), "chart mismatch in difference");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;

    fn neg(self) -> GradedPoly {
        GradedPoly { chart: self.chart.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for GradedPoly {
    type Output = GradedPoly;

    fn neg(self) -> GradedPoly {
        -&self
    }
}

/// Coordinate images for [`GradedPoly::substitute`].
#[derive(Debug, Clone)]
pub struct Substitution {
    source: Chart,
    target: Chart,
    images: Vec<Option<GradedPoly>>,
}

impl Substitution {
    /// Each image must live on `target` and have the parity of the coordinate it replaces.
    pub fn new(source: &Chart, target: &Chart, images: Vec<Option<GradedPoly>>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Shape(format!("{} images for {} coordinates", images.len(), source.len())));
        }
        for (a, img) in images.iter().enumerate() {
            if let Some(img) = img {
                if !same_chart(img.chart(), target) {
                    return Err(Error::ChartMismatch);
                }
                let p = source.parity(a);
                if !img.is_homogeneous(p) {
                    return Err(Error::ParityViolation(format!(
                        "image `{img}` of {} coordinate `{}` is not {p}",
                        p,
                        source.name(a)
                    )));
                }
            }
        }
        Ok(Substitution { source: source.clone(), target: target.clone(), images })
    }

    pub fn from_images(source: &Chart, target: &Chart, images: Vec<GradedPoly>) -> Result<Self> {
        Self::new(source, target, images.into_iter().map(Some).collect())
    }

    pub fn identity(chart: &Chart) -> Self {
        Substitution {
            source: chart.clone(),
            target: chart.clone(),
            images: (0..chart.len()).map(|a| Some(GradedPoly::coord(chart, a))).collect(),
        }
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    fn image(&self, a: usize, chart: &Chart) -> Result<&GradedPoly> {
        self.images[a].as_ref().ok_or_else(|| Error::MissingImage(chart.name(a).to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r12() -> Chart {
        ChartSignature::new(["t"], ["th1", "th2"]).unwrap()
    }

    #[test]
    fn nilpotent_odd_square() {
        let c = r12();
        let th1 = GradedPoly::coord(&c, 1);
        assert!((&th1 * &th1).is_zero());
    }

    #[test]
    fn transposition_sign() {
        let c = r12();
        let th1 = GradedPoly::coord(&c, 1);
        let th2 = GradedPoly::coord(&c, 2);
        assert_eq!(&th2 * &th1, -(&th1 * &th2));
    }

    #[test]
    fn product_with_unit_plus_nilpotent() {
        // (1 + t·θ¹)·θ² = θ² + t·θ¹θ²
        let c = r12();
        let t = GradedPoly::coord(&c, 0);
        let th1 = GradedPoly::coord(&c, 1);
        let th2 = GradedPoly::coord(&c, 2);
        let lhs = &(&GradedPoly::one(&c) + &(&t * &th1)) * &th2;
        let expected = &th2 + &(&t * &(&th1 * &th2));
        assert_eq!(lhs, expected);
        assert_eq!(lhs.to_string(), "th2 + t * th1 * th2");
    }

    #[test]
    fn left_derivatives() {
        let c = r12();
        let t = GradedPoly::coord(&c, 0);
        let th1 = GradedPoly::coord(&c, 1);
        let th2 = GradedPoly::coord(&c, 2);
        let p = &th1 * &th2;
        assert_eq!(p.partial(1), th2);
        assert_eq!(p.partial(2), -&th1);
        let f = &(&t * &t) * &th1;
        assert_eq!(f.partial(0), (&t * &th1).scale(&q(2)));
        assert!(matches!(f.try_partial(7), Err(Error::UnknownCoordinate(_))));
        assert!(matches!(f.partial_by_name("x"), Err(Error::UnknownCoordinate(_))));
    }

    #[test]
    fn substitution_examples() {
        let c = r12();
        let t = GradedPoly::coord(&c, 0);
        let th1 = GradedPoly::coord(&c, 1);
        let th2 = GradedPoly::coord(&c, 2);
        // t θ¹ under t → t + θ¹θ² stays t θ¹
        let s = Substitution::from_images(&c, &c, vec![&t + &(&th1 * &th2), th1.clone(), th2.clone()]).unwrap();
        let f = &t * &th1;
        assert_eq!(f.substitute(&s).unwrap(), f);
        // swap θ¹ ↔ θ²
        let swap = Substitution::from_images(&c, &c, vec![t.clone(), th2.clone(), th1.clone()]).unwrap();
        assert_eq!((&th1 * &th2).substitute(&swap).unwrap(), -(&th1 * &th2));
        assert_eq!(f.substitute(&Substitution::identity(&c)).unwrap(), f);
    }

    #[test]
    fn substitution_errors() {
        let c = r12();
        let t = GradedPoly::coord(&c, 0);
        let th1 = GradedPoly::coord(&c, 1);
        let bad = Substitution::from_images(&c, &c, vec![th1.clone(), th1.clone(), th1.clone()]);
        assert!(matches!(bad, Err(Error::ParityViolation(_))));
        let partial = Substitution::new(&c, &c, vec![Some(t.clone()), None, None]).unwrap();
        assert_eq!(t.substitute(&partial).unwrap(), t);
        assert!(matches!((&t * &th1).substitute(&partial), Err(Error::MissingImage(_))));
    }

    #[test]
    fn evaluation_at_even_point() {
        let c = r12();
        let t = GradedPoly::coord(&c, 0);
        let th1 = GradedPoly::coord(&c, 1);
        let th2 = GradedPoly::coord(&c, 2);
        let f = &(&t * &t) + &(&t * &(&th1 * &th2));
        let pt: BTreeMap<usize, Coeff> = [(0, q(3))].into();
        let expected = &GradedPoly::int(&c, 9) + &(&th1 * &th2).scale(&q(3));
        assert_eq!(f.eval_even(&pt).unwrap(), expected);
        let g = &(&t + &GradedPoly::one(&c)) * &th1;
        assert!(g.eval_even(&[(0, q(-1))].into()).unwrap().is_zero());
        assert!(GradedPoly::zero(&c).eval_even(&pt).unwrap().is_zero());
        assert!(matches!(f.eval_even(&BTreeMap::new()), Err(Error::MissingAssignment(_))));
    }

    #[test]
    fn degenerate_charts() {
        let even_only = ChartSignature::new(["x", "y"], Vec::<String>::new()).unwrap();
        let x = GradedPoly::coord(&even_only, 0);
        let y = GradedPoly::coord(&even_only, 1);
        assert_eq!(&x * &y, &y * &x);
        let odd_only = ChartSignature::new(Vec::<String>::new(), ["a", "b"]).unwrap();
        let a = GradedPoly::coord(&odd_only, 0);
        let b = GradedPoly::coord(&odd_only, 1);
        assert_eq!(&a * &b, -(&b * &a));
        assert_eq!((&a * &b).partial(0), b);
    }

    #[test]
    fn chart_validation() {
        assert!(ChartSignature::new(["t"], ["t"]).is_err());
        assert!(ChartSignature::new(["1x"], Vec::<String>::new()).is_err());
        let c = r12();
        assert_eq!(c.index("th2"), Some(2));
        assert_eq!(c.parity(0), Parity::Even);
        assert_eq!(c.parity(2), Parity::Odd);
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let a = r12();
        let b = ChartSignature::new(["s"], ["e"]).unwrap();
        let f = GradedPoly::coord(&a, 0);
        let g = GradedPoly::coord(&b, 0);
        assert_eq!(f.checked_mul(&g), Err(Error::ChartMismatch));
        assert_eq!(f.checked_add(&g), Err(Error::ChartMismatch));
    }
}
