//! Presented towers of field extensions and their element arithmetic.
//!
//! Variables are positional: the base indeterminates come first, then the
//! generators in adjunction order. An [`Element`] is a quotient whose
//! numerator is reduced modulo every algebraic relation and whose denominator
//! involves transcendental variables only, so zero testing is a syntactic
//! check on the numerator.

mod element;
mod pth;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::arith::{ArithError, BaseField, Coeff, MPoly};

pub use element::{Element, UPoly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TowerError {
    #[error("duplicate symbol `{0}`")]
    DuplicateName(String),
    #[error("malformed minimal polynomial for `{name}`: {reason}")]
    MalformedMinPoly { name: String, reason: String },
    #[error("division by zero")]
    ZeroElement,
    #[error("minimal polynomial of `{generator}` is reducible: it has the factor {factor_text}")]
    ReducibleMinPoly {
        generator: String,
        factor: UPoly,
        factor_text: String,
    },
    #[error("unsupported tower: {0}")]
    UnsupportedTower(String),
    #[error("element uses variables outside this tower")]
    ForeignElement,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Monic minimal polynomial; `coeffs[k]` multiplies `x^k` and the last entry is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MinPoly {
    coeffs: Vec<Element>,
}

impl MinPoly {
    /// From the coefficients below the leading one.
    pub fn monic(lower: Vec<Element>, field: BaseField) -> Self {
        let mut coeffs = lower;
        coeffs.push(Element::one(field));
        MinPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Element] {
        &self.coeffs
    }

    /// Formal derivative is nonzero.
    pub fn is_separable(&self) -> bool {
        let p = self.coeffs[0].field().characteristic();
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .any(|(k, c)| !c.is_zero() && (p == 0 || k as u64 % p != 0))
    }

    pub fn as_upoly(&self) -> UPoly {
        UPoly::new(self.coeffs.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GenKind {
    Transcendental,
    Algebraic(MinPoly),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub name: String,
    pub kind: GenKind,
}

impl GenSpec {
    pub fn transcendental(name: impl Into<String>) -> Self {
        GenSpec { name: name.into(), kind: GenKind::Transcendental }
    }

    pub fn algebraic(name: impl Into<String>, minpoly: MinPoly) -> Self {
        GenSpec { name: name.into(), kind: GenKind::Algebraic(minpoly) }
    }
}

/// Cached integral form `F = L·f` of a generator's minimal polynomial, with
/// `L` a common denominator in the transcendental variables.
#[derive(Clone, Debug)]
struct Relation {
    degree: u32,
    lead: MPoly,
    integral: MPoly,
    separable: bool,
}

#[derive(Debug)]
struct TowerData {
    field: BaseField,
    names: Vec<String>,
    n_base: usize,
    gens: Vec<GenSpec>,
    rels: Vec<Option<Relation>>,
    index: HashMap<String, usize>,
}

/// A presented tower `k(t_1..t_k)(g_1..g_m)` over a prime field or the rationals.
#[derive(Clone)]
pub struct Tower(Arc<TowerData>);

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tower({}; {:?})", self.0.field, self.0.names)
    }
}

impl PartialEq for Tower {
    fn eq(&self, o: &Tower) -> bool {
        Arc::ptr_eq(&self.0, &o.0)
            || (self.0.field == o.0.field
                && self.0.n_base == o.0.n_base
                && self.0.names == o.0.names
                && self.0.gens == o.0.gens)
    }
}

impl Tower {
    pub fn new(field: BaseField, base: &[&str]) -> Result<Tower, TowerError> {
        Self::with_base(field, base.iter().map(|s| s.to_string()).collect())
    }

    pub fn with_base(field: BaseField, base: Vec<String>) -> Result<Tower, TowerError> {
        let mut index = HashMap::new();
        for (i, n) in base.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(TowerError::DuplicateName(n.clone()));
            }
        }
        Ok(Tower(Arc::new(TowerData {
            field,
            n_base: base.len(),
            rels: vec![None; base.len()],
            names: base,
            gens: Vec::new(),
            index,
        })))
    }

    pub fn field(&self) -> BaseField {
        self.0.field
    }

    pub fn characteristic(&self) -> u64 {
        self.0.field.characteristic()
    }

    pub fn nvars(&self) -> usize {
        self.0.names.len()
    }

    pub fn n_base(&self) -> usize {
        self.0.n_base
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.0.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    pub fn gens(&self) -> &[GenSpec] {
        &self.0.gens
    }

    /// Generator spec of a variable, `None` for base indeterminates.
    pub fn gen_of_var(&self, v: usize) -> Option<&GenSpec> {
        v.checked_sub(self.0.n_base).and_then(|g| self.0.gens.get(g))
    }

    pub fn minpoly(&self, v: usize) -> Option<&MinPoly> {
        match &self.gen_of_var(v)?.kind {
            GenKind::Algebraic(m) => Some(m),
            GenKind::Transcendental => None,
        }
    }

    pub fn is_algebraic_var(&self, v: usize) -> bool {
        self.0.rels.get(v).is_some_and(|r| r.is_some())
    }

    pub fn is_separable_var(&self, v: usize) -> bool {
        self.0.rels.get(v).and_then(|r| r.as_ref()).is_some_and(|r| r.separable)
    }

    fn relation(&self, v: usize) -> Option<&Relation> {
        self.0.rels.get(v).and_then(|r| r.as_ref())
    }

    /// The tower on the first `nvars` variables.
    pub fn prefix(&self, nvars: usize) -> Tower {
        assert!(nvars >= self.0.n_base && nvars <= self.nvars(), "prefix must keep the base");
        if nvars == self.nvars() {
            return self.clone();
        }
        let d = &self.0;
        let names: Vec<String> = d.names[..nvars].to_vec();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Tower(Arc::new(TowerData {
            field: d.field,
            n_base: d.n_base,
            gens: d.gens[..nvars - d.n_base].to_vec(),
            rels: d.rels[..nvars].to_vec(),
            names,
            index,
        }))
    }

    pub fn is_prefix_of(&self, o: &Tower) -> bool {
        self.nvars() <= o.nvars() && o.n_base() == self.n_base() && o.prefix(self.nvars()) == *self
    }

    /// Appends a generator.
    pub fn extend(&self, g: GenSpec) -> Result<Tower, TowerError> {
        if self.0.index.contains_key(&g.name) {
            return Err(TowerError::DuplicateName(g.name));
        }
        let v = self.nvars();
        let malformed = |reason: &str| TowerError::MalformedMinPoly { name: g.name.clone(), reason: reason.into() };
        let (kind, rel) = match g.kind {
            GenKind::Transcendental => (GenKind::Transcendental, None),
            GenKind::Algebraic(m) => {
                if m.coeffs.len() < 2 {
                    return Err(malformed("degree must be at least 1"));
                }
                if !m.coeffs.last().unwrap().is_one() {
                    return Err(malformed("not monic"));
                }
                let mut coeffs = Vec::with_capacity(m.coeffs.len());
                for c in &m.coeffs {
                    if c.field() != self.field() {
                        return Err(malformed("coefficient over a different base field"));
                    }
                    if c.max_var().is_some_and(|w| w >= v) {
                        return Err(malformed("coefficient refers to a later symbol"));
                    }
                    coeffs.push(self.normal_form(c));
                }
                let m = MinPoly { coeffs };
                let rel = self.integral_relation(v, &m);
                (GenKind::Algebraic(m), Some(rel))
            }
        };
        let d = &self.0;
        let mut names = d.names.clone();
        names.push(g.name.clone());
        let mut index = d.index.clone();
        index.insert(g.name.clone(), v);
        let mut gens = d.gens.clone();
        gens.push(GenSpec { name: g.name, kind });
        let mut rels = d.rels.clone();
        rels.push(rel);
        Ok(Tower(Arc::new(TowerData { field: d.field, names, n_base: d.n_base, gens, rels, index })))
    }

    fn integral_relation(&self, v: usize, m: &MinPoly) -> Relation {
        let mut lead = MPoly::one(self.field());
        for c in &m.coeffs {
            if lead.div_exact(&c.den).is_none() {
                lead = &lead * &c.den;
            }
        }
        let mut integral = MPoly::zero(self.field());
        for (k, c) in m.coeffs.iter().enumerate() {
            let scaled = &c.num * &lead.div_exact(&c.den).expect("common denominator");
            integral = &integral + &scaled.mul_monomial(&crate::arith::Monomial::var_pow(v, k as u32));
        }
        Relation { degree: m.degree() as u32, lead, integral, separable: m.is_separable() }
    }

    // ---- element construction ----

    pub fn zero(&self) -> Element {
        Element::zero(self.field())
    }

    pub fn one(&self) -> Element {
        Element::one(self.field())
    }

    pub fn from_int(&self, n: i64) -> Element {
        Element::from_poly(MPoly::from_int(self.field(), n))
    }

    pub fn constant(&self, c: Coeff) -> Element {
        Element::from_poly(MPoly::constant(c))
    }

    /// The normal form of variable `v` (for a degree-1 generator, its value).
    pub fn var(&self, v: usize) -> Element {
        self.from_poly(MPoly::var(self.field(), v))
    }

    pub fn var_named(&self, name: &str) -> Result<Element, TowerError> {
        let v = self.index_of(name).ok_or_else(|| TowerError::UnknownSymbol(name.into()))?;
        Ok(self.var(v))
    }

    pub fn from_poly(&self, p: MPoly) -> Element {
        self.make(p, MPoly::one(self.field()))
    }

    /// Normalizes `num/den`; `den` must involve transcendental variables only.
    pub fn from_parts(&self, num: MPoly, den: MPoly) -> Result<Element, TowerError> {
        if den.is_zero() {
            return Err(TowerError::ZeroElement);
        }
        if den.vars().iter().any(|&v| self.is_algebraic_var(v)) {
            let n = self.from_poly(num);
            let d = self.from_poly(den);
            return self.div(&n, &d);
        }
        Ok(self.make(num, den))
    }

    pub fn contains(&self, e: &Element) -> bool {
        e.max_var().map_or(true, |v| v < self.nvars()) && e.field() == self.field()
    }

    pub fn check(&self, e: &Element) -> Result<(), TowerError> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(TowerError::ForeignElement)
        }
    }

    // ---- normal forms ----

    /// Triangular reduction from the top algebraic variable downwards.
    /// Returns the reduced polynomial and the transcendental multiplier `m`
    /// with `m·p ≡ reduced`.
    pub fn reduce(&self, p: &MPoly) -> (MPoly, MPoly) {
        self.reduce_except(p, None)
    }

    /// [`Tower::reduce`] leaving the relation of `skip` unused.
    fn reduce_except(&self, p: &MPoly, skip: Option<usize>) -> (MPoly, MPoly) {
        let mut p = p.clone();
        let mut mult = MPoly::one(self.field());
        let top = match p.max_var() {
            Some(v) => v.min(self.nvars().saturating_sub(1)),
            None => return (p, mult),
        };
        for v in (0..=top).rev().filter(|&v| Some(v) != skip) {
            let Some(rel) = self.relation(v) else { continue };
            let monic = rel.lead.is_one();
            loop {
                let e = p.degree_in(v);
                if e < rel.degree || p.is_zero() {
                    break;
                }
                let t = p.coeff_of_power(v, e).mul_monomial(&crate::arith::Monomial::var_pow(v, e - rel.degree));
                if monic {
                    p = &p - &(&t * &rel.integral);
                } else {
                    p = &(&p * &rel.lead) - &(&t * &rel.integral);
                    mult = &mult * &rel.lead;
                }
            }
        }
        (p, mult)
    }

    fn make(&self, num: MPoly, den: MPoly) -> Element {
        let (num, mult) = self.reduce(&num);
        let den = if mult.is_one() { den } else { &den * &mult };
        tidy(num, den)
    }

    /// Re-normalizes an element.
    pub fn normal_form(&self, e: &Element) -> Element {
        self.make(e.num.clone(), e.den.clone())
    }

    // ---- arithmetic ----

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        if a.den == b.den {
            return tidy(&a.num + &b.num, a.den.clone());
        }
        tidy(&(&a.num * &b.den) + &(&b.num * &a.den), &a.den * &b.den)
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &b.neg())
    }

    pub fn neg(&self, a: &Element) -> Element {
        a.neg()
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        self.make(&a.num * &b.num, &a.den * &b.den)
    }

    pub fn pow(&self, a: &Element, mut e: u64) -> Element {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a Element>) -> Element {
        items.into_iter().fold(self.zero(), |acc, e| self.add(&acc, e))
    }

    /// Multiplicative inverse by extended Euclid against the top algebraic
    /// generator occurring, recursing down the tower.
    pub fn inv(&self, a: &Element) -> Result<Element, TowerError> {
        if a.is_zero() {
            return Err(TowerError::ZeroElement);
        }
        let inv_num = self.inv_poly(&a.num)?;
        Ok(self.mul(&inv_num, &Element::from_poly(a.den.clone())))
    }

    pub fn div(&self, a: &Element, b: &Element) -> Result<Element, TowerError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Inverts a reduced numerator through the subresultant remainder
    /// sequence of the minimal polynomial and `n` in the top algebraic
    /// variable `v`. The sequence runs in the polynomial ring, where its
    /// exact divisions are valid, and keeps `r = s·n + u·f` throughout.
    fn inv_poly(&self, n: &MPoly) -> Result<Element, TowerError> {
        let top = n.vars().into_iter().rev().find(|&v| self.is_algebraic_var(v));
        let Some(v) = top else {
            return Ok(self.make(MPoly::one(self.field()), n.clone()));
        };
        let field = self.field();
        let rel = self.relation(v).expect("algebraic variable");
        let (mut r0, mut s0) = (rel.integral.clone(), MPoly::zero(field));
        let (mut r1, mut s1) = (n.clone(), MPoly::one(field));
        let mut psi = MPoly::from_int(field, -1);
        let mut d_prev = None;
        while !r1.is_zero() && r1.degree_in(v) > 0 {
            let d = r0.degree_in(v) - r1.degree_in(v);
            let beta = match d_prev {
                None => MPoly::from_int(field, if d % 2 == 0 { -1 } else { 1 }),
                Some(dp) => {
                    let g = -&r0.coeff_of_power(v, r0.degree_in(v));
                    psi = g.pow(dp).div_exact(&psi.pow(dp - 1)).expect("subresultant division");
                    &g * &psi.pow(d)
                }
            };
            d_prev = Some(d);
            let (q, r, m) = prem(&r0, &r1, v);
            let s = &(&m * &s0) - &(&q * &s1);
            let r = r.div_exact(&beta).expect("subresultant division");
            let s = s.div_exact(&beta).expect("cofactor division");
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        let (c, mc) = self.reduce(&r1);
        if c.is_zero() {
            return Err(self.reducible_witness(n, v));
        }
        let c = self.inv_poly(&c)?;
        Ok(self.mul(&self.from_poly(&s1 * &mc), &c))
    }
    /// The factor of `v`'s minimal polynomial shared with `n`, found by
    /// Euclid over the field below `v`.
    fn reducible_witness(&self, n: &MPoly, v: usize) -> TowerError {
        let a = UPoly::new(n.coeffs_in(v).into_iter().map(|c| self.from_poly(c)).collect());
        let f = self.minpoly(v).expect("algebraic variable").as_upoly();
        let (mut r0, mut r1) = (f, a);
        while !r1.is_zero() {
            match self.upoly_divrem(&r0, &r1) {
                Ok((_, r)) => r0 = std::mem::replace(&mut r1, r),
                Err(e) => return e,
            }
        }
        match self.upoly_monic(&r0) {
            Ok(factor) => TowerError::ReducibleMinPoly {
                generator: self.name(v).to_string(),
                factor_text: self.display_upoly(&factor, v),
                factor,
            },
            Err(e) => e,
        }
    }

    // ---- univariate polynomials with element coefficients ----

    pub fn upoly_add(&self, a: &UPoly, b: &UPoly) -> UPoly {
        let n = a.len().max(b.len());
        let zero = self.zero();
        UPoly::new(
            (0..n)
                .map(|k| self.add(a.coeffs().get(k).unwrap_or(&zero), b.coeffs().get(k).unwrap_or(&zero)))
                .collect(),
        )
    }

    pub fn upoly_sub(&self, a: &UPoly, b: &UPoly) -> UPoly {
        self.upoly_add(a, &UPoly::new(b.coeffs().iter().map(|c| c.neg()).collect()))
    }

    pub fn upoly_mul(&self, a: &UPoly, b: &UPoly) -> UPoly {
        if a.is_zero() || b.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.coeffs().iter().enumerate() {
            for (j, y) in b.coeffs().iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        UPoly::new(out)
    }

    pub fn upoly_divrem(&self, a: &UPoly, b: &UPoly) -> Result<(UPoly, UPoly), TowerError> {
        if b.is_zero() {
            return Err(TowerError::ZeroElement);
        }
        let db = b.degree();
        let inv = self.inv(b.coeffs().last().unwrap())?;
        let mut r = a.coeffs().to_vec();
        if r.len() <= db {
            return Ok((UPoly::zero(), a.clone()));
        }
        let mut q = vec![self.zero(); r.len() - db];
        for k in (db..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let c = self.mul(&r[k], &inv);
            for (j, bj) in b.coeffs().iter().enumerate() {
                r[k - db + j] = self.sub(&r[k - db + j], &self.mul(&c, bj));
            }
            q[k - db] = c;
        }
        r.truncate(db);
        Ok((UPoly::new(q), UPoly::new(r)))
    }

    pub fn upoly_monic(&self, a: &UPoly) -> Result<UPoly, TowerError> {
        let Some(lc) = a.coeffs().last() else { return Ok(a.clone()) };
        let inv = self.inv(lc)?;
        Ok(UPoly::new(a.coeffs().iter().map(|c| self.mul(c, &inv)).collect()))
    }

    /// `Σ c_k x^k` at `x = e`.
    pub fn upoly_eval(&self, a: &UPoly, e: &Element) -> Element {
        a.coeffs().iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, e), c))
    }

    /// Formal derivative.
    pub fn upoly_derivative(&self, a: &UPoly) -> UPoly {
        UPoly::new(
            a.coeffs()
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| self.mul(c, &self.from_int(k as i64)))
                .collect(),
        )
    }

    // ---- display ----

    pub fn display(&self, e: &Element) -> String {
        e.as_ratexpr().display(self.names())
    }

    /// Prints a univariate polynomial using the name of variable `v`.
    pub fn display_upoly(&self, a: &UPoly, v: usize) -> String {
        let x = Element::from_poly(MPoly::var(self.field(), v));
        // Evaluate without reduction so the variable stays visible.
        let mut acc = self.zero();
        for (k, c) in a.coeffs().iter().enumerate() {
            let mut term = c.clone();
            for _ in 0..k {
                term = Element { num: &term.num * &x.num, den: term.den.clone() };
            }
            acc = tidy(&(&acc.num * &term.den) + &(&term.num * &acc.den), &acc.den * &term.den);
        }
        acc.as_ratexpr().display(self.names())
    }

    pub fn display_minpoly(&self, v: usize) -> Option<String> {
        self.minpoly(v).map(|m| self.display_upoly(&m.as_upoly(), v))
    }
}

/// Cheap canonicalization of `num/den` with `num` already reduced.
/// Pseudo-division `m·a = q·b + r` in `v` with `m = lc(b)^(δ+1)`, as the
/// subresultant recurrences require.
fn prem(a: &MPoly, b: &MPoly, v: usize) -> (MPoly, MPoly, MPoly) {
    let db = b.degree_in(v);
    let lc = b.coeff_of_power(v, db);
    let (mut q, mut r) = (MPoly::zero(a.field()), a.clone());
    for k in (0..=a.degree_in(v) - db).rev() {
        let t = r.coeff_of_power(v, db + k).mul_monomial(&crate::arith::Monomial::var_pow(v, k));
        q = &(&q * &lc) + &t;
        r = &(&r * &lc) - &(&t * b);
    }
    (q, r, lc.pow(a.degree_in(v) - db + 1))
}

fn tidy(mut num: MPoly, mut den: MPoly) -> Element {
    let field = num.field();
    if num.is_zero() {
        return Element::zero(field);
    }
    if let Some(c) = den.constant_value() {
        let inv = c.inv().expect("nonzero denominator");
        return Element { num: num.scale(&inv), den: MPoly::one(field) };
    }
    let g = num.monomial_content().gcd(&den.monomial_content());
    if !g.is_one() {
        num = num.div_monomial(&g).unwrap();
        den = den.div_monomial(&g).unwrap();
    }
    if let Some(q) = num.div_exact(&den) {
        return Element { num: q, den: MPoly::one(field) };
    }
    let g = num.gcd(&den);
    if !g.is_constant() {
        num = num.div_exact(&g).expect("gcd divides numerator");
        den = den.div_exact(&g).expect("gcd divides denominator");
    }
    let inv = den.leading_coeff().inv().expect("nonzero");
    if den.is_constant() {
        return Element { num: num.scale(&inv), den: MPoly::one(field) };
    }
    Element { num: num.scale(&inv), den: den.scale(&inv) }
}

#[cfg(test)]
mod tests;
