use crate::arith::{BaseField, Coeff, MPoly, RatExpr};

/// An element of some tower: `num/den` in normal form relative to that tower.
///
/// Elements are plain data; arithmetic goes through the owning [`super::Tower`].
/// Because variables are positional, an element of a prefix tower is also an
/// element of every extension of it.
#[derive(Clone, Debug)]
pub struct Element {
    pub(crate) num: MPoly,
    pub(crate) den: MPoly,
}

impl Element {
    pub fn zero(field: BaseField) -> Self {
        Element { num: MPoly::zero(field), den: MPoly::one(field) }
    }

    pub fn one(field: BaseField) -> Self {
        Element { num: MPoly::one(field), den: MPoly::one(field) }
    }

    /// Wraps a polynomial without reducing it; callers guarantee it is reduced.
    pub(crate) fn from_poly(num: MPoly) -> Self {
        let den = MPoly::one(num.field());
        Element { num, den }
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn field(&self) -> BaseField {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Value when the element lies in the prime field (or the rationals).
    pub fn constant_value(&self) -> Option<Coeff> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(&n * &d.inv()?)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.num.max_var().max(self.den.max_var())
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.num.degree_in(v) > 0 || self.den.degree_in(v) > 0
    }

    pub fn vars(&self) -> std::collections::BTreeSet<usize> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn neg(&self) -> Element {
        Element { num: -&self.num, den: self.den.clone() }
    }

    pub fn as_ratexpr(&self) -> RatExpr {
        RatExpr { num: self.num.clone(), den: self.den.clone() }
    }

    /// Moves the element to another variable numbering. The caller must
    /// re-normalize in the target tower if relations differ.
    pub fn rename(&self, map: &dyn Fn(usize) -> usize) -> Element {
        Element { num: self.num.rename(map), den: self.den.rename(map) }
    }
}

impl PartialEq for Element {
    fn eq(&self, o: &Element) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        &self.num * &o.den == &o.num * &self.den
    }
}

/// Univariate polynomial with element coefficients, lowest degree first,
/// without trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly(Vec<Element>);

impl UPoly {
    pub fn new(mut coeffs: Vec<Element>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Element] {
        &self.0
    }
}
