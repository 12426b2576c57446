use super::{eval_element, OpError, Operator, Violation};
use crate::tower::{Element, MinPoly, Tower, UPoly};

/// A field homomorphism `σ: domain → target` fixing the prime field, given by
/// the images of the domain's variables.
#[derive(Clone, Debug)]
pub struct Endomorphism {
    domain: Tower,
    target: Tower,
    images: Vec<Element>,
}

impl Endomorphism {
    pub fn define(t: &Tower, images: Vec<Element>) -> Result<Endomorphism, OpError> {
        Self::define_into(t, t, images)
    }

    pub fn define_into(domain: &Tower, target: &Tower, images: Vec<Element>) -> Result<Endomorphism, OpError> {
        let s = Self::unchecked(domain, target, images)?;
        if let Some(v) = s.violations()?.into_iter().next() {
            let reason = match (&v.image, &v.expected, &v.note) {
                (Some(i), Some(e), _) => format!("image {} but the relation demands {}", target.display(i), target.display(e)),
                (_, _, Some(n)) if v.residual.is_zero() => n.clone(),
                _ => format!("the transported minimal polynomial leaves {}", target.display(&v.residual)),
            };
            return Err(OpError::InvalidEndomorphism { generator: v.generator, reason });
        }
        Ok(s)
    }

    pub fn unchecked(domain: &Tower, target: &Tower, images: Vec<Element>) -> Result<Endomorphism, OpError> {
        if domain.field() != target.field() {
            return Err(OpError::Shape("domain and target have different base fields".into()));
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
            .map(|e| target.check(&e).map(|_| target.normal_form(&e)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Endomorphism { domain: domain.clone(), target: target.clone(), images })
    }

    pub fn identity(t: &Tower) -> Endomorphism {
        Endomorphism { domain: t.clone(), target: t.clone(), images: (0..t.nvars()).map(|v| t.var(v)).collect() }
    }

    pub fn domain(&self) -> &Tower {
        &self.domain
    }

    pub fn target(&self) -> &Tower {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn image(&self, v: usize) -> &Element {
        &self.images[v]
    }

    pub fn violations(&self) -> Result<Vec<Violation>, OpError> {
        let mut out = Vec::new();
        for v in 0..self.domain.nvars() {
            if let Some(bad) = self.check_var(v)? {
                out.push(bad);
            }
        }
        Ok(out)
    }

    fn check_var(&self, v: usize) -> Result<Option<Violation>, OpError> {
        let t = &self.target;
        let img = &self.images[v];
        let bad = |residual: Element, image, expected, note: Option<String>| Violation {
            generator: self.domain.name(v).to_string(),
            var: v,
            operator: Operator::Sigma,
            residual,
            image,
            expected,
            note,
        };
        let Some(f) = self.domain.minpoly(v) else {
            // A transcendental sent into the prime field would kill `v − c`.
            if img.constant_value().is_some() {
                return Ok(Some(bad(
                    t.zero(),
                    Some(img.clone()),
                    None,
                    Some(format!("transcendental sent to the constant {}", t.display(img))),
                )));
            }
            return Ok(None);
        };
        let fs = self.apply_coeffs(f)?;
        let residual = t.upoly_eval(&fs, img);
        if residual.is_zero() {
            return Ok(None);
        }
        if f.degree() == 1 {
            let expected = fs.coeffs()[0].neg();
            return Ok(Some(bad(residual, Some(img.clone()), Some(expected), None)));
        }
        Ok(Some(bad(residual, None, None, None)))
    }

    /// `σ(e)`: substitute the images and normalize.
    pub fn apply(&self, e: &Element) -> Result<Element, OpError> {
        if e.max_var().is_some_and(|v| v >= self.domain.nvars()) {
            return Err(OpError::OutsideDomain(self.domain.display(e)));
        }
        let images = &self.images;
        eval_element(&self.target, e, &mut |v| Ok(images[v].clone()))
    }

    /// `f^σ`.
    pub fn apply_coeffs(&self, f: &MinPoly) -> Result<UPoly, OpError> {
        Ok(UPoly::new(f.coeffs().iter().map(|c| self.apply(c)).collect::<Result<_, _>>()?))
    }

    /// Same images, read in a larger target.
    pub fn widen(&self, target: &Tower) -> Result<Endomorphism, OpError> {
        if !self.target.is_prefix_of(target) {
            return Err(OpError::Shape("the new target must extend the old one".into()));
        }
        Ok(Endomorphism { domain: self.domain.clone(), target: target.clone(), images: self.images.clone() })
    }

    /// Adds the image of the next domain variable.
    pub fn push(&self, domain: &Tower, target: &Tower, image: Element) -> Result<Endomorphism, OpError> {
        if domain.nvars() != self.domain.nvars() + 1 || !self.domain.is_prefix_of(domain) {
            return Err(OpError::Shape("push expects a one-variable domain extension".into()));
        }
        let mut images = self.images.clone();
        images.push(image);
        Self::unchecked(domain, target, images)
    }
}
