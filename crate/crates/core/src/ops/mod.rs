//! Derivations and difference endomorphisms on presented towers.
//!
//! A derivation is stored by its images on the variables of its domain, which
//! is always a prefix of its codomain. Validity is the triangular form of the
//! extension criterion: for each algebraic generator `a` with minimal
//! polynomial `f` over the earlier variables, `f^δ(a) + f'(a)·δ(a) = 0`.

mod derivation;
mod endomorphism;

use std::collections::HashMap;

use crate::arith::MPoly;
use crate::tower::{Element, Tower, TowerError};

pub use derivation::Derivation;
pub use endomorphism::Endomorphism;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpError {
    #[error("invalid derivation at `{generator}`: the extension condition leaves {residual}")]
    InvalidDerivation { generator: String, residual: String },
    #[error("invalid endomorphism at `{generator}`: {reason}")]
    InvalidEndomorphism { generator: String, reason: String },
    #[error("`{0}` is not a separable algebraic generator")]
    NotSeparable(String),
    #[error("{0} is a constant without a presented p-th root")]
    PRootMissing(String),
    #[error("operator shape mismatch: {0}")]
    Shape(String),
    #[error("{0} lies outside the operator's domain")]
    OutsideDomain(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Which operator a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Delta,
    Sigma,
}

impl std::fmt::Display for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Operator::Delta => "delta",
            Operator::Sigma => "sigma",
        })
    }
}

/// A failed generator condition. `residual` is the value that should vanish;
/// for degree-one relations (`a = E`) the given image and the value the
/// relation demands are recorded as well.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub generator: String,
    pub var: usize,
    pub operator: Operator,
    pub residual: Element,
    pub image: Option<Element>,
    pub expected: Option<Element>,
    pub note: Option<String>,
}

impl Violation {
    pub fn describe(&self, t: &Tower) -> String {
        let mut s = format!("{} fails at {}: residual {}", self.operator, self.generator, t.display(&self.residual));
        if let (Some(i), Some(e)) = (&self.image, &self.expected) {
            s.push_str(&format!(" (image {} but relation demands {})", t.display(i), t.display(e)));
        }
        if let Some(n) = &self.note {
            s.push_str(&format!(" ({n})"));
        }
        s
    }
}

/// `δ(σ(v)) ≠ σ(δ(v))` on a variable.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutationViolation {
    pub symbol: String,
    pub var: usize,
    pub delta_sigma: Element,
    pub sigma_delta: Element,
}

/// Generator-level commutation of `d` and `s`. Variables where either
/// composite is undefined are skipped and returned separately.
#[derive(Debug, Clone, Default)]
pub struct CommutationReport {
    pub violations: Vec<CommutationViolation>,
    pub checked: Vec<String>,
    pub skipped: Vec<String>,
}

impl CommutationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn commutation_check(d: &Derivation, s: &Endomorphism) -> Result<CommutationReport, OpError> {
    let mut rep = CommutationReport::default();
    let names = s.domain().names();
    for v in 0..s.domain().nvars().min(d.domain().nvars()) {
        let sv = s.image(v);
        let dv = d.image(v);
        let defined = sv.max_var().map_or(true, |w| w < d.domain().nvars())
            && dv.max_var().map_or(true, |w| w < s.domain().nvars());
        if !defined {
            rep.skipped.push(names[v].clone());
            continue;
        }
        let ds = d.apply(sv)?;
        let sd = s.apply(dv)?;
        rep.checked.push(names[v].clone());
        if ds != sd {
            rep.violations.push(CommutationViolation {
                symbol: names[v].clone(),
                var: v,
                delta_sigma: ds,
                sigma_delta: sd,
            });
        }
    }
    Ok(rep)
}

/// The p-th root function on constants: 0 off the constants, the presented
/// root on them.
pub fn r_map(d: &Derivation, e: &Element) -> Result<Element, OpError> {
    let t = d.codomain();
    if t.characteristic() == 0 {
        return Err(TowerError::UnsupportedTower("the r-function needs characteristic p".into()).into());
    }
    if !d.apply(e)?.is_zero() {
        return Ok(t.zero());
    }
    t.is_pth_power(e)?.ok_or_else(|| OpError::PRootMissing(t.display(e)))
}

/// Evaluates `p` in `target` with variable `v` sent to `image(v)`.
pub fn eval_poly(
    target: &Tower,
    p: &MPoly,
    image: &mut dyn FnMut(usize) -> Result<Element, OpError>,
) -> Result<Element, OpError> {
    let mut cache: HashMap<(usize, u32), Element> = HashMap::new();
    let mut base: HashMap<usize, Element> = HashMap::new();
    let mut acc = target.zero();
    for (m, c) in p.terms() {
        let mut term = target.constant(c.clone());
        for (v, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !cache.contains_key(&(v, e)) {
                if !base.contains_key(&v) {
                    base.insert(v, image(v)?);
                }
                let pw = target.pow(&base[&v], e as u64);
                cache.insert((v, e), pw);
            }
            term = target.mul(&term, &cache[&(v, e)]);
        }
        acc = target.add(&acc, &term);
    }
    Ok(acc)
}

/// `num/den` evaluated through `image`.
pub fn eval_element(
    target: &Tower,
    e: &Element,
    image: &mut dyn FnMut(usize) -> Result<Element, OpError>,
) -> Result<Element, OpError> {
    let n = eval_poly(target, e.num(), image)?;
    if e.den().is_one() {
        return Ok(n);
    }
    let d = eval_poly(target, e.den(), image)?;
    Ok(target.div(&n, &d)?)
}

#[cfg(test)]
mod tests;
