use super::{OpError, Operator, Violation};
use crate::tower::{Element, MinPoly, Tower, UPoly};

/// A derivation `δ: domain → codomain`, where `domain` is a prefix of
/// `codomain`, given by the images of the domain's variables.
#[derive(Clone, Debug)]
pub struct Derivation {
    domain: Tower,
    codomain: Tower,
    images: Vec<Element>,
}

impl Derivation {
    /// A derivation of `t` into itself, validated.
    pub fn define(t: &Tower, images: Vec<Element>) -> Result<Derivation, OpError> {
        Self::define_into(t, t, images)
    }

    pub fn define_into(domain: &Tower, codomain: &Tower, images: Vec<Element>) -> Result<Derivation, OpError> {
        let d = Self::unchecked(domain, codomain, images)?;
        if let Some(v) = d.violations()?.into_iter().next() {
            return Err(OpError::InvalidDerivation {
                generator: v.generator,
                residual: codomain.display(&v.residual),
            });
        }
        Ok(d)
    }

    /// Builds the operator without running the generator conditions.
    pub fn unchecked(domain: &Tower, codomain: &Tower, images: Vec<Element>) -> Result<Derivation, OpError> {
        if !domain.is_prefix_of(codomain) {
            return Err(OpError::Shape("the domain must be a prefix of the codomain".into()));
        }
        if images.len() != domain.nvars() {
            return Err(OpError::Shape(format!(
                "{} images given for {} variables",
                images.len(),
                domain.nvars()
            )));
        }
        let images = images
            .into_iter()
            .map(|e| codomain.check(&e).map(|_| codomain.normal_form(&e)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Derivation { domain: domain.clone(), codomain: codomain.clone(), images })
    }

    /// The zero derivation on `t`.
    pub fn trivial(t: &Tower) -> Derivation {
        Derivation { domain: t.clone(), codomain: t.clone(), images: vec![t.zero(); t.nvars()] }
    }

    pub fn domain(&self) -> &Tower {
        &self.domain
    }

    pub fn codomain(&self) -> &Tower {
        &self.codomain
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn image(&self, v: usize) -> &Element {
        &self.images[v]
    }

    /// Every algebraic generator whose extension condition fails.
    pub fn violations(&self) -> Result<Vec<Violation>, OpError> {
        let mut out = Vec::new();
        for v in 0..self.domain.nvars() {
            if let Some(bad) = self.check_var(v)? {
                out.push(bad);
            }
        }
        Ok(out)
    }

    /// `f^δ(a) + f'(a)·δ(a)` for the generator at `v`, if it does not vanish.
    fn check_var(&self, v: usize) -> Result<Option<Violation>, OpError> {
        let Some(f) = self.domain.minpoly(v) else { return Ok(None) };
        let t = &self.codomain;
        let a = t.var(v);
        let fd = self.apply_coeffs(f)?;
        let lhs = t.upoly_eval(&fd, &a);
        let fp = t.upoly_eval(&t.upoly_derivative(&f.as_upoly()), &a);
        let residual = t.add(&lhs, &t.mul(&fp, &self.images[v]));
        if residual.is_zero() {
            return Ok(None);
        }
        let (image, expected, note) = if f.degree() == 1 {
            (Some(self.images[v].clone()), Some(lhs.neg()), Some("presented as an element".to_string()))
        } else if f.is_separable() {
            (None, None, Some("separable: the image is forced".to_string()))
        } else {
            (None, None, Some("inseparable: f^δ(a) must vanish".to_string()))
        };
        Ok(Some(Violation {
            generator: self.domain.name(v).to_string(),
            var: v,
            operator: Operator::Delta,
            residual,
            image,
            expected,
            note,
        }))
    }

    /// `δ(e)` by the chain rule over numerator and denominator.
    pub fn apply(&self, e: &Element) -> Result<Element, OpError> {
        let t = &self.codomain;
        if e.max_var().is_some_and(|v| v >= self.domain.nvars()) {
            return Err(OpError::OutsideDomain(t.display(e)));
        }
        let dn = self.apply_poly(e.num());
        if e.den().is_one() {
            return Ok(dn);
        }
        let dd = self.apply_poly(e.den());
        let n = t.from_poly(e.num().clone());
        let d = t.from_poly(e.den().clone());
        let top = t.sub(&t.mul(&dn, &d), &t.mul(&n, &dd));
        Ok(t.div(&top, &t.mul(&d, &d))?)
    }

    fn apply_poly(&self, p: &crate::arith::MPoly) -> Element {
        let t = &self.codomain;
        let mut acc = t.zero();
        for v in p.vars() {
            if self.images[v].is_zero() {
                continue;
            }
            let dp = p.partial(v);
            if dp.is_zero() {
                continue;
            }
            acc = t.add(&acc, &t.mul(&t.from_poly(dp), &self.images[v]));
        }
        acc
    }

    /// `f^δ`: the derivation applied to each coefficient.
    pub fn apply_coeffs(&self, f: &MinPoly) -> Result<UPoly, OpError> {
        Ok(UPoly::new(f.coeffs().iter().map(|c| self.apply(c)).collect::<Result<_, _>>()?))
    }

    /// The value `−f^δ(a)/f'(a)` that a separable root `a` of `f` must take.
    pub fn forced_value(&self, f: &MinPoly, a: &Element) -> Result<Element, OpError> {
        let t = &self.codomain;
        let fd = self.apply_coeffs(f)?;
        let num = t.upoly_eval(&fd, a);
        let den = t.upoly_eval(&t.upoly_derivative(&f.as_upoly()), a);
        if den.is_zero() {
            return Err(OpError::NotSeparable(t.display(a)));
        }
        Ok(t.div(&num, &den)?.neg())
    }

    /// The unique extension to `ext`, which adds one separable algebraic
    /// generator to this derivation's tower.
    pub fn extend_forced(&self, ext: &Tower) -> Result<Derivation, OpError> {
        if self.domain != self.codomain || ext.nvars() != self.domain.nvars() + 1 || !self.domain.is_prefix_of(ext) {
            return Err(OpError::Shape("expected a one-generator extension of the derivation's field".into()));
        }
        let v = self.domain.nvars();
        let f = match ext.minpoly(v) {
            Some(f) if f.is_separable() => f.clone(),
            _ => return Err(OpError::NotSeparable(ext.name(v).to_string())),
        };
        let lifted = Derivation { domain: self.domain.clone(), codomain: ext.clone(), images: self.images.clone() };
        let image = lifted.forced_value(&f, &ext.var(v))?;
        let mut images = self.images.clone();
        images.push(image);
        Ok(Derivation { domain: ext.clone(), codomain: ext.clone(), images })
    }

    /// Same images, read in a larger codomain.
    pub fn widen(&self, codomain: &Tower) -> Result<Derivation, OpError> {
        if !self.codomain.is_prefix_of(codomain) {
            return Err(OpError::Shape("the new codomain must extend the old one".into()));
        }
        Ok(Derivation { domain: self.domain.clone(), codomain: codomain.clone(), images: self.images.clone() })
    }

    /// Adds the image of the next domain variable; `domain` must extend the
    /// current domain by exactly one variable and be a prefix of `codomain`.
    pub fn push(&self, domain: &Tower, codomain: &Tower, image: Element) -> Result<Derivation, OpError> {
        if domain.nvars() != self.domain.nvars() + 1 || !self.domain.is_prefix_of(domain) {
            return Err(OpError::Shape("push expects a one-variable domain extension".into()));
        }
        let mut images = self.images.clone();
        images.push(image);
        Self::unchecked(domain, codomain, images)
    }
}
