//! Exterior algebra with [`FourierScalar`] coefficients.
//!
//! Covectors are indexed by the global coordinate order `y… < q… < p…`; a basis
//! monomial is a bitmask and its covectors are wedged in increasing order.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

use crate::ring::{join_signed, scalar_monomials, CoordinateRoster, FourierScalar, PiPolynomial, RingError, Shape};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("degree mismatch: expected {expected}, found {found}")]
    Degree { expected: usize, found: usize },
    #[error("form power needs even degree, found {0}")]
    OddDegree(usize),
    #[error("lee form is not closed")]
    NotClosed,
    #[error("form has covectors outside the leaf directions")]
    NotLeafwise,
    #[error("operation needs a model with fiber coordinates")]
    MissingFiber,
}

/// Sign of moving the covector `c` to the front of the increasing monomial `mask`.
pub(crate) fn front_sign(mask: u32, c: usize) -> i64 {
    if (mask & ((1u32 << c) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of `dx^A ∧ dx^B` relative to the sorted monomial, or 0 if they overlap.
pub(crate) fn wedge_sign(a: u32, b: u32) -> i64 {
    if a & b != 0 {
        return 0;
    }
    let mut inv = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inv += (a >> (j + 1)).count_ones();
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub(crate) fn bits(mask: u32) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(j)
        }
    })
}

pub(crate) fn range_mask(r: std::ops::Range<usize>) -> u32 {
    r.fold(0, |m, j| m | (1u32 << j))
}

/// Homogeneous differential form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DifferentialForm {
    shape: Shape,
    degree: usize,
    terms: BTreeMap<u32, FourierScalar>,
}

impl DifferentialForm {
    pub fn zero(shape: Shape, degree: usize) -> Self {
        DifferentialForm { shape, degree, terms: BTreeMap::new() }
    }

    pub fn scalar(f: FourierScalar) -> Self {
        let mut out = Self::zero(f.shape(), 0);
        out.add_term(0, &f);
        out
    }

    /// The coordinate covector `dx^c`.
    pub fn covector(shape: Shape, c: usize) -> Self {
        Self::monomial(1u32 << c, FourierScalar::one(shape))
    }

    /// `f · dx^{mask}` with covectors in increasing order.
    pub fn monomial(mask: u32, f: FourierScalar) -> Self {
        let mut out = Self::zero(f.shape(), mask.count_ones() as usize);
        out.add_term(mask, &f);
        out
    }

    /// `f · dx^{c₁} ∧ … ∧ dx^{c_r}` for an arbitrary index sequence.
    pub fn from_indices(f: FourierScalar, idx: &[usize]) -> Self {
        let mut acc = Self::scalar(f);
        for &c in idx {
            acc = acc.wedge(&Self::covector(acc.shape, c));
        }
        acc
    }

    pub fn from_terms(shape: Shape, degree: usize, terms: impl IntoIterator<Item = (u32, FourierScalar)>) -> Self {
        let mut out = Self::zero(shape, degree);
        for (m, f) in terms {
            out.add_term(m, &f);
        }
        out
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<u32, FourierScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mask: u32) -> FourierScalar {
        self.terms.get(&mask).cloned().unwrap_or_else(|| FourierScalar::zero(self.shape))
    }

    /// Coefficient of `dx^{c₁}∧…∧dx^{c_r}` in the given order.
    pub fn component(&self, idx: &[usize]) -> FourierScalar {
        let mut mask = 0u32;
        let mut sign = 1i64;
        for &c in idx {
            let s = wedge_sign(mask, 1u32 << c);
            if s == 0 {
                return FourierScalar::zero(self.shape);
            }
            sign *= s;
            mask |= 1u32 << c;
        }
        self.coefficient(mask).scale_int(sign)
    }

    pub fn add_term(&mut self, mask: u32, f: &FourierScalar) {
        assert_eq!(mask.count_ones() as usize, self.degree, "term degree does not match form degree");
        assert_eq!(f.shape(), self.shape, "form shape mismatch");
        assert!(mask >> self.shape.total() == 0, "covector index out of range");
        if f.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(|| FourierScalar::zero(self.shape));
        *entry += f;
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    fn check(&self, o: &Self) -> Result<(), FormError> {
        if self.shape != o.shape {
            return Err(RingError::ShapeMismatch { left: self.shape, right: o.shape }.into());
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, FormError> {
        self.check(o)?;
        if self.degree != o.degree && !self.is_zero() && !o.is_zero() {
            return Err(FormError::Degree { expected: self.degree, found: o.degree });
        }
        Ok(self + o)
    }

    pub fn scale(&self, c: &PiPolynomial) -> Self {
        Self::from_terms(self.shape, self.degree, self.terms.iter().map(|(m, f)| (*m, f.scale(c))))
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&PiPolynomial::int(n))
    }

    /// Pointwise product with a function.
    pub fn mul_scalar(&self, f: &FourierScalar) -> Self {
        Self::from_terms(self.shape, self.degree, self.terms.iter().map(|(m, g)| (*m, g * f)))
    }

    pub fn try_wedge(&self, o: &Self) -> Result<Self, FormError> {
        self.check(o)?;
        Ok(self.wedge(o))
    }

    pub fn wedge(&self, o: &Self) -> Self {
        assert_eq!(self.shape, o.shape, "form shape mismatch");
        let mut out = Self::zero(self.shape, self.degree + o.degree);
        for (a, f) in &self.terms {
            for (b, g) in &o.terms {
                let s = wedge_sign(*a, *b);
                if s != 0 {
                    out.add_term(a | b, &(f * g).scale_int(s));
                }
            }
        }
        out
    }

    /// `d` restricted to the coordinates in `coords`.
    fn d_over(&self, coords: impl Iterator<Item = usize> + Clone) -> Self {
        let mut out = Self::zero(self.shape, self.degree + 1);
        for (m, f) in &self.terms {
            for c in coords.clone() {
                if m & (1 << c) != 0 {
                    continue;
                }
                let df = f.partial(c);
                if !df.is_zero() {
                    out.add_term(m | (1 << c), &df.scale_int(front_sign(*m, c)));
                }
            }
        }
        out
    }

    pub fn exterior_derivative(&self) -> Self {
        self.d_over(0..self.shape.total())
    }

    /// `d^b a = da + b ∧ a` after checking `db = 0`.
    pub fn twisted_derivative(&self, b: &Self) -> Result<Self, FormError> {
        self.check(b)?;
        if b.degree != 1 {
            return Err(FormError::Degree { expected: 1, found: b.degree });
        }
        if !b.exterior_derivative().is_zero() {
            return Err(FormError::NotClosed);
        }
        Ok(&self.exterior_derivative() + &b.wedge(self))
    }

    /// `d^b` without the closedness check.
    pub(crate) fn twisted_unchecked(&self, b: &Self) -> Self {
        &self.exterior_derivative() + &b.wedge(self)
    }

    /// Contraction with the coordinate vector `∂_c`.
    pub fn contract_coord(&self, c: usize) -> Self {
        if self.degree == 0 {
            return Self::zero(self.shape, 0);
        }
        let mut out = Self::zero(self.shape, self.degree - 1);
        for (m, f) in &self.terms {
            if m & (1 << c) != 0 {
                out.add_term(m & !(1 << c), &f.scale_int(front_sign(*m, c)));
            }
        }
        out
    }

    pub fn interior_product(&self, xi: &VectorField) -> Result<Self, FormError> {
        if xi.shape != self.shape {
            return Err(RingError::ShapeMismatch { left: xi.shape, right: self.shape }.into());
        }
        Ok(self.contract(xi))
    }

    pub(crate) fn contract(&self, xi: &VectorField) -> Self {
        let mut out = Self::zero(self.shape, self.degree.saturating_sub(1));
        for (c, v) in &xi.comps {
            out = &out + &self.contract_coord(*c).mul_scalar(v);
        }
        out
    }

    /// Cartan formula `L_ξ = ι_ξ d + d ι_ξ`.
    pub fn lie_derivative(&self, xi: &VectorField) -> Self {
        let a = self.exterior_derivative().contract(xi);
        if self.degree == 0 {
            return a;
        }
        &a + &self.contract(xi).exterior_derivative()
    }

    /// Terms whose covectors all lie in `mask`.
    pub fn restrict_to(&self, mask: u32) -> Self {
        Self::from_terms(
            self.shape,
            self.degree,
            self.terms.iter().filter(|(m, _)| *m & !mask == 0).map(|(m, f)| (*m, f.clone())),
        )
    }

    /// Discards every term with a `dy` or `dp` covector.
    pub fn leafwise_restrict(&self) -> Self {
        self.restrict_to(range_mask(self.shape.leaf_range()))
    }

    pub fn is_leafwise(&self) -> bool {
        let lm = range_mask(self.shape.leaf_range());
        self.terms.keys().all(|m| m & !lm == 0)
    }

    /// Differentiates only along the leaves: `d_F a`.
    pub fn leafwise_derivative(&self) -> Self {
        self.d_over(self.shape.leaf_range())
    }

    /// `d_F^{b̄} a = d_F a + b̄ ∧ a` after checking `d_F b̄ = 0`.
    pub fn leafwise_twisted_derivative(&self, bbar: &Self) -> Result<Self, FormError> {
        self.check(bbar)?;
        if bbar.degree != 1 {
            return Err(FormError::Degree { expected: 1, found: bbar.degree });
        }
        if !bbar.is_leafwise() {
            return Err(FormError::NotLeafwise);
        }
        if !bbar.leafwise_derivative().is_zero() {
            return Err(FormError::NotClosed);
        }
        Ok(self.leafwise_twisted_unchecked(bbar))
    }

    pub(crate) fn leafwise_twisted_unchecked(&self, bbar: &Self) -> Self {
        &self.leafwise_derivative() + &bbar.wedge(self)
    }

    pub fn form_power(&self, m: u32) -> Result<Self, FormError> {
        if self.degree % 2 == 1 {
            return Err(FormError::OddDegree(self.degree));
        }
        let mut acc = Self::scalar(FourierScalar::one(self.shape));
        for _ in 0..m {
            acc = acc.wedge(self);
        }
        Ok(acc)
    }

    /// Substitutes `p_α ↦ s_α`, `dp_α ↦ ds_α`; the result lives on the base shape.
    pub fn pullback_by_section(&self, s: &[FourierScalar]) -> Result<Self, FormError> {
        if self.shape.fiber == 0 {
            return Err(FormError::MissingFiber);
        }
        let base = self.shape.base();
        let t = self.shape.torus();
        let ds: Vec<Self> = s.iter().map(|v| Self::scalar(v.clone()).exterior_derivative()).collect();
        let mut out = Self::zero(base, self.degree);
        for (m, f) in &self.terms {
            let coeff = f.substitute_fiber(s)?;
            let tm = m & range_mask(0..t);
            let mut piece = Self::monomial(tm, coeff);
            for j in bits(m >> t) {
                piece = piece.wedge(&ds[j]);
            }
            out = &out + &piece;
        }
        Ok(out)
    }

    /// Pullback along the projection to the base: same coefficients, viewed on `shape`.
    pub fn embed(&self, shape: Shape) -> Self {
        Self::from_terms(shape, self.degree, self.terms.iter().map(|(m, f)| (*m, f.embed(shape))))
    }

    /// Restriction to the zero section of a thickened model.
    pub fn zero_section(&self) -> Self {
        let base = self.shape.base();
        let fm = range_mask(self.shape.fiber_range());
        let mut out = Self::zero(base, self.degree);
        for (m, f) in &self.terms {
            if m & fm == 0 {
                out.add_term(*m, &f.at_zero_fiber().fiber_coefficient(&vec![0; self.shape.fiber]));
            }
        }
        out
    }

    /// Applies a map to every coefficient.
    pub fn map_coeffs(&self, mut g: impl FnMut(&FourierScalar) -> FourierScalar) -> Self {
        let shape = self.terms.values().next().map(|f| g(f).shape()).unwrap_or(self.shape);
        let mut out = Self::zero(shape, self.degree);
        for (m, f) in &self.terms {
            out.add_term(*m, &g(f));
        }
        out
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(FourierScalar::is_real)
    }

    pub fn to_text(&self, roster: &CoordinateRoster) -> String {
        self.render(roster, false)
    }

    pub fn to_pretty(&self, roster: &CoordinateRoster) -> String {
        self.render(roster, true)
    }

    fn render(&self, roster: &CoordinateRoster, pretty: bool) -> String {
        let sep = if pretty { "·" } else { "*" };
        let wedge = if pretty { "∧" } else { "^" };
        let mut parts = Vec::new();
        for (m, f) in &self.terms {
            let cov: Vec<String> = bits(*m).map(|c| format!("d{}", roster.name(c))).collect();
            let cov = cov.join(wedge);
            for (neg, body) in scalar_monomials(f, roster, pretty) {
                let s = if cov.is_empty() {
                    body
                } else if body == "1" {
                    cov.clone()
                } else {
                    format!("{}{}{}", body, sep, cov)
                };
                parts.push((neg, s));
            }
        }
        join_signed(&parts, pretty)
    }
}

impl Add for &DifferentialForm {
    type Output = DifferentialForm;
    fn add(self, o: &DifferentialForm) -> DifferentialForm {
        assert_eq!(self.shape, o.shape, "form shape mismatch");
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        assert_eq!(self.degree, o.degree, "form degree mismatch");
        let mut out = self.clone();
        for (m, f) in &o.terms {
            out.add_term(*m, f);
        }
        out
    }
}

impl Sub for &DifferentialForm {
    type Output = DifferentialForm;
    fn sub(self, o: &DifferentialForm) -> DifferentialForm {
        self + &(-o)
    }
}

impl Neg for &DifferentialForm {
    type Output = DifferentialForm;
    fn neg(self) -> DifferentialForm {
        self.scale_int(-1)
    }
}

impl Add for DifferentialForm {
    type Output = DifferentialForm;
    fn add(self, o: DifferentialForm) -> DifferentialForm {
        &self + &o
    }
}

impl Sub for DifferentialForm {
    type Output = DifferentialForm;
    fn sub(self, o: DifferentialForm) -> DifferentialForm {
        &self - &o
    }
}

impl Neg for DifferentialForm {
    type Output = DifferentialForm;
    fn neg(self) -> DifferentialForm {
        -&self
    }
}

/// Vector field `Σ ξ^c ∂_c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorField {
    shape: Shape,
    comps: BTreeMap<usize, FourierScalar>,
}

impl VectorField {
    pub fn zero(shape: Shape) -> Self {
        VectorField { shape, comps: BTreeMap::new() }
    }

    pub fn coord(shape: Shape, c: usize) -> Self {
        let mut v = Self::zero(shape);
        v.set(c, FourierScalar::one(shape));
        v
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn set(&mut self, c: usize, f: FourierScalar) {
        assert!(c < self.shape.total(), "coordinate index out of range");
        assert_eq!(f.shape(), self.shape, "vector field shape mismatch");
        if f.is_zero() {
            self.comps.remove(&c);
        } else {
            self.comps.insert(c, f);
        }
    }

    pub fn add_component(&mut self, c: usize, f: &FourierScalar) {
        let cur = self.component(c);
        self.set(c, &cur + f);
    }

    pub fn component(&self, c: usize) -> FourierScalar {
        self.comps.get(&c).cloned().unwrap_or_else(|| FourierScalar::zero(self.shape))
    }

    pub fn components(&self) -> &BTreeMap<usize, FourierScalar> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Directional derivative `ξ(f)`.
    pub fn apply(&self, f: &FourierScalar) -> FourierScalar {
        let mut out = FourierScalar::zero(self.shape);
        for (c, v) in &self.comps {
            out += &(v * &f.partial(*c));
        }
        out
    }

    pub fn bracket(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.shape);
        for c in 0..self.shape.total() {
            let v = &self.apply(&o.component(c)) - &o.apply(&self.component(c));
            out.set(c, v);
        }
        out
    }

    pub fn scale(&self, f: &FourierScalar) -> Self {
        let mut out = Self::zero(self.shape);
        for (c, v) in &self.comps {
            out.set(*c, v * f);
        }
        out
    }

    pub fn to_text(&self, roster: &CoordinateRoster) -> String {
        let mut parts = Vec::new();
        for (c, f) in &self.comps {
            let basis = format!("d/d{}", roster.name(*c));
            for (neg, body) in scalar_monomials(f, roster, false) {
                let s = if body == "1" { basis.clone() } else { format!("{}*{}", body, basis) };
                parts.push((neg, s));
            }
        }
        join_signed(&parts, false)
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, o: &VectorField) -> VectorField {
        let mut out = self.clone();
        for (c, f) in &o.comps {
            out.add_component(*c, f);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Gq;

    fn sh() -> Shape {
        Shape::new(2, 2, 2)
    }

    #[test]
    fn repeated_covector_vanishes() {
        let w = DifferentialForm::from_indices(FourierScalar::one(sh()), &[0, 1]);
        assert!(w.wedge(&DifferentialForm::covector(sh(), 0)).is_zero());
        assert!(w.form_power(2).unwrap().is_zero());
    }

    #[test]
    fn anticommuting_covectors() {
        let a = DifferentialForm::covector(sh(), 2);
        let b = DifferentialForm::covector(sh(), 3);
        assert_eq!(a.wedge(&b), -&b.wedge(&a));
    }

    #[test]
    fn derivative_examples() {
        let s = FourierScalar::sin_coord(sh(), 0);
        let f = DifferentialForm::monomial(1 << 2, s);
        let expect = DifferentialForm::from_indices(
            FourierScalar::cos_coord(sh(), 0).scale(&PiPolynomial::monomial(1, Gq::int(2))),
            &[0, 2],
        );
        assert_eq!(f.exterior_derivative(), expect);
        let g = DifferentialForm::monomial(1 << 2, FourierScalar::fiber_var(sh(), 4));
        assert_eq!(g.exterior_derivative(), DifferentialForm::from_indices(FourierScalar::one(sh()), &[4, 2]));
    }

    #[test]
    fn contraction_example() {
        let w = DifferentialForm::from_indices(FourierScalar::one(sh()), &[0, 1]);
        assert_eq!(w.contract_coord(0), DifferentialForm::covector(sh(), 1));
    }

    #[test]
    fn top_power_of_thickened_form() {
        let one = FourierScalar::one(sh());
        let w = &(&DifferentialForm::from_indices(one.clone(), &[0, 1]) + &DifferentialForm::from_indices(one.clone(), &[2, 4]))
            + &DifferentialForm::from_indices(one.clone(), &[3, 5]);
        let w3 = w.form_power(3).unwrap();
        assert_eq!(w3, DifferentialForm::from_indices(one.scale_int(6), &[0, 1, 2, 4, 3, 5]));
        assert!(!w3.is_zero());
    }
}
