use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use smallvec::SmallVec;

use super::{ArithError, BaseField, Coeff, RatExpr};

/// Exponent vector over positional variables, trailing zeros trimmed so that a
/// polynomial written over a prefix of the variables stays valid over any
/// extension of it.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[u32; 6]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: usize) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: usize, e: u32) -> Self {
        let mut m = Monomial::one();
        m.set(v, e);
        m
    }

    pub fn from_exps(exps: &[u32]) -> Self {
        let mut m = Monomial(exps.iter().copied().collect());
        m.trim();
        m
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    fn set(&mut self, v: usize, e: u32) {
        if self.0.len() <= v {
            if e == 0 {
                return;
            }
            self.0.resize(v + 1, 0);
        }
        self.0[v] = e;
        self.trim();
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, v: usize) -> u32 {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn with_exp(&self, v: usize, e: u32) -> Self {
        let mut m = self.clone();
        m.set(v, e);
        m
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        let mut out = long.0.clone();
        for (i, e) in short.0.iter().enumerate() {
            out[i] += e;
        }
        Monomial(out)
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.len() <= o.0.len() && self.0.iter().zip(o.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        if !o.divides(self) {
            return None;
        }
        let mut out = self.0.clone();
        for (i, e) in o.0.iter().enumerate() {
            out[i] -= e;
        }
        let mut m = Monomial(out);
        m.trim();
        Some(m)
    }

    /// Componentwise minimum.
    pub fn gcd(&self, o: &Monomial) -> Monomial {
        let mut m = Monomial(self.0.iter().zip(o.0.iter()).map(|(a, b)| *a.min(b)).collect());
        m.trim();
        m
    }

    pub fn rename(&self, map: &dyn Fn(usize) -> usize) -> Monomial {
        let mut out = Monomial::one();
        for (v, &e) in self.0.iter().enumerate() {
            if e > 0 {
                let w = map(v);
                let old = out.exp(w);
                out.set(w, old + e);
            }
        }
        out
    }
}

impl Ord for Monomial {
    /// Graded lexicographic, variable 0 most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                match self.exp(i).cmp(&other.exp(i)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over a base field, terms sorted by
/// descending graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    field: BaseField,
    terms: Vec<(Monomial, Coeff)>,
}

impl MPoly {
    pub fn zero(field: BaseField) -> Self {
        MPoly { field, terms: Vec::new() }
    }

    pub fn one(field: BaseField) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: Coeff) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn from_int(field: BaseField, n: i64) -> Self {
        Self::constant(field.from_i64(n))
    }

    pub fn var(field: BaseField, v: usize) -> Self {
        Self::term(Monomial::var(v), field.one())
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let field = c.field();
        if c.is_zero() {
            return MPoly::zero(field);
        }
        MPoly { field, terms: vec![(m, c)] }
    }

    pub fn from_terms(field: BaseField, terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Self {
        let mut acc: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (m, c) in terms {
            accumulate(&mut acc, m, c);
        }
        Self::from_map(field, acc)
    }

    fn from_map(field: BaseField, acc: BTreeMap<Monomial, Coeff>) -> Self {
        let terms = acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        MPoly { field, terms }
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The value when the polynomial is a constant (zero included).
    pub fn constant_value(&self) -> Option<Coeff> {
        match self.terms.as_slice() {
            [] => Some(self.field.zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn leading(&self) -> Option<&(Monomial, Coeff)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> Coeff {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(|| self.field.zero())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().filter_map(|(m, _)| m.max_var()).max()
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (m, _) in &self.terms {
            for (v, e) in m.exps().iter().enumerate() {
                if *e > 0 {
                    out.insert(v);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.field);
        }
        MPoly {
            field: self.field,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MPoly {
        MPoly {
            field: self.field,
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative; exponents divisible by the characteristic vanish.
    pub fn partial(&self, v: usize) -> MPoly {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exp(v);
            if e == 0 {
                return None;
            }
            let k = c * &self.field.from_i64(e as i64);
            (!k.is_zero()).then(|| (m.with_exp(v, e - 1), k))
        });
        MPoly::from_terms(self.field, terms)
    }

    /// Coefficients as a polynomial in `v`: entry `k` multiplies `v^k`.
    pub fn coeffs_in(&self, v: usize) -> Vec<MPoly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Coeff)>> = vec![Vec::new(); d + 1];
        if self.is_zero() {
            return vec![MPoly::zero(self.field)];
        }
        for (m, c) in &self.terms {
            buckets[m.exp(v) as usize].push((m.with_exp(v, 0), c.clone()));
        }
        // Removing one variable keeps the relative grlex order only up to ties,
        // so rebuild each bucket.
        buckets.into_iter().map(|b| MPoly::from_terms(self.field, b)).collect()
    }

    pub fn coeff_of_power(&self, v: usize, k: u32) -> MPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(v) == k)
            .map(|(m, c)| (m.with_exp(v, 0), c.clone()));
        MPoly::from_terms(self.field, terms)
    }

    pub fn from_coeffs_in(field: BaseField, v: usize, coeffs: &[MPoly]) -> MPoly {
        let mut acc = MPoly::zero(field);
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &c.mul_monomial(&Monomial::var_pow(v, k as u32));
            }
        }
        acc
    }

    /// Renames variables through `map`; images may collide (their exponents add).
    pub fn rename(&self, map: &dyn Fn(usize) -> usize) -> MPoly {
        MPoly::from_terms(self.field, self.terms.iter().map(|(m, c)| (m.rename(map), c.clone())))
    }

    /// Divides out the leading coefficient.
    pub fn monic(&self) -> MPoly {
        match self.terms.first() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |g, (m, _)| g.gcd(m))
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<MPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, c) in &self.terms {
            terms.push((t.div(m)?, c.clone()));
        }
        Some(MPoly::from_terms(self.field, terms))
    }

    /// Exact quotient when `d` divides `self`, otherwise `None`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (dm, dc) = d.terms.first()?;
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.inv()?));
        }
        let dinv = dc.inv()?;
        let mut rem = self.clone();
        let mut quot: Vec<(Monomial, Coeff)> = Vec::new();
        while let Some((rm, rc)) = rem.terms.first() {
            let m = rm.div(dm)?;
            let c = rc * &dinv;
            let t = MPoly::term(m.clone(), c.clone());
            rem = &rem - &(&t * d);
            quot.push((m, c));
        }
        Some(MPoly::from_terms(self.field, quot))
    }

    /// Pseudo-division in `v`: returns `(q, r, m)` with `m·self = q·b + r`,
    /// `deg_v r < deg_v b`, and `m` a power of the leading coefficient of `b`.
    pub fn pseudo_divrem(&self, b: &MPoly, v: usize) -> Result<(MPoly, MPoly, MPoly), ArithError> {
        if b.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let d = b.degree_in(v);
        let lc = b.coeff_of_power(v, d);
        let mut q = MPoly::zero(self.field);
        let mut r = self.clone();
        let mut mult = MPoly::one(self.field);
        while !r.is_zero() && r.degree_in(v) >= d {
            let e = r.degree_in(v);
            let t = r.coeff_of_power(v, e).mul_monomial(&Monomial::var_pow(v, e - d));
            q = &(&q * &lc) + &t;
            r = &(&r * &lc) - &(&t * b);
            mult = &mult * &lc;
        }
        Ok((q, r, mult))
    }

    /// Division in the top variable `v`, coefficients taken in the fraction
    /// field of the remaining variables.
    pub fn divrem(&self, b: &MPoly, v: usize) -> Result<(RatExpr, RatExpr), ArithError> {
        let (q, r, m) = self.pseudo_divrem(b, v)?;
        Ok((RatExpr::new(q, m.clone())?, RatExpr::new(r, m)?))
    }

    /// Remainder of univariate division with constant leading coefficient in `b`.
    fn rem_univariate(&self, b: &MPoly, v: usize) -> MPoly {
        let d = b.degree_in(v);
        let inv = b.coeff_of_power(v, d).constant_value().and_then(|c| c.inv()).expect("univariate divisor");
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= d {
            let e = r.degree_in(v);
            let c = r.coeff_of_power(v, e).constant_value().expect("univariate dividend");
            let t = MPoly::term(Monomial::var_pow(v, e - d), &c * &inv);
            r = &r - &(&t * b);
        }
        r
    }

    /// Monic gcd of two polynomials in the single variable `v`.
    pub fn gcd_univariate(&self, b: &MPoly, v: usize) -> MPoly {
        let (mut a, mut b) = (self.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem_univariate(&b, v);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic gcd over all variables: primitive remainder sequences in the
    /// largest variable, with contents taken recursively in the others.
    pub fn gcd(&self, b: &MPoly) -> MPoly {
        if self.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return self.monic();
        }
        if self.is_constant() || b.is_constant() {
            return MPoly::one(self.field);
        }
        let (ma, mb) = (self.monomial_content(), b.monomial_content());
        if !ma.is_one() || !mb.is_one() {
            let a1 = self.div_monomial(&ma).expect("content divides");
            let b1 = b.div_monomial(&mb).expect("content divides");
            return a1.gcd(&b1).mul_monomial(&ma.gcd(&mb));
        }
        if let Some(q) = self.div_exact(b) {
            if !q.is_zero() {
                return b.monic();
            }
        }
        if let Some(q) = b.div_exact(self) {
            if !q.is_zero() {
                return self.monic();
            }
        }
        let common: Vec<usize> = self.vars().intersection(&b.vars()).copied().collect();
        let open: BTreeSet<usize> = common.into_iter().filter(|&v| !self.coprime_in(b, v)).collect();
        if open.is_empty() {
            return MPoly::one(self.field);
        }
        // The gcd lies in F[open], so it divides every coefficient over the
        // remaining variables.
        if !self.vars().union(&b.vars()).all(|v| open.contains(v)) {
            let mut parts = self.parts_over(&open);
            parts.extend(b.parts_over(&open));
            parts.sort_by_key(MPoly::len);
            let mut g = MPoly::zero(self.field);
            for c in parts {
                g = g.gcd(&c);
                if g.is_constant() {
                    break;
                }
            }
            return g;
        }
        let v = open.into_iter().min_by_key(|&v| self.degree_in(v).max(b.degree_in(v))).expect("nonempty");
        let (ca, cb) = (self.content_in(v), b.content_in(v));
        let c = ca.gcd(&cb);
        let mut p = self.div_exact(&ca).expect("content divides").monic();
        let mut q = b.div_exact(&cb).expect("content divides").monic();
        if p.degree_in(v) < q.degree_in(v) {
            std::mem::swap(&mut p, &mut q);
        }
        loop {
            if p.coprime_in(&q, v) {
                q = MPoly::one(self.field);
                break;
            }
            let (_, r, _) = p.pseudo_divrem(&q, v).expect("nonzero divisor");
            if r.is_zero() {
                break;
            }
            if r.degree_in(v) == 0 {
                q = MPoly::one(self.field);
                break;
            }
            p = q;
            let cr = r.content_in(v);
            q = r.div_exact(&cr).expect("content divides").monic();
        }
        (&c * &q).monic()
    }

    /// A cheap certificate that the gcd does not involve `v`: modulo a
    /// prime, with the other variables fixed at a point where neither leading
    /// coefficient in `v` vanishes, the univariate gcd is constant.
    fn coprime_in(&self, b: &MPoly, v: usize) -> bool {
        let m = match self.field {
            BaseField::Prime(p) => p,
            BaseField::Rationals => CHECK_PRIME,
        };
        let (da, db) = (self.degree_in(v) as usize, b.degree_in(v) as usize);
        for attempt in 0..3u64 {
            let point = |w: usize| (2 + 3 * w as u64 + 7 * attempt) % m;
            let (Some(sa), Some(sb)) = (self.specialize_mod(v, m, &point), b.specialize_mod(v, m, &point)) else {
                continue;
            };
            if sa[da] != 0 && sb[db] != 0 {
                return gcd_mod(sa, sb, m) == 0;
            }
        }
        false
    }

    /// Dense coefficients in `v` modulo `m` with every other variable replaced
    /// by `point(w)`; `None` when a denominator vanishes modulo `m`.
    fn specialize_mod(&self, v: usize, m: u64, point: &dyn Fn(usize) -> u64) -> Option<Vec<u64>> {
        let mut out = vec![0u64; self.degree_in(v) as usize + 1];
        for (mono, c) in &self.terms {
            let mut k = residue(c, m)?;
            for (w, &e) in mono.exps().iter().enumerate() {
                if w != v && e > 0 {
                    k = mul_mod(k, pow_mod(point(w), e as u64, m), m);
                }
            }
            let slot = &mut out[mono.exp(v) as usize];
            *slot = (*slot + k) % m;
        }
        Some(out)
    }

    /// The coefficients of `self` viewed as a polynomial in the variables
    /// outside `keep`, over `F[keep]`.
    fn parts_over(&self, keep: &BTreeSet<usize>) -> Vec<MPoly> {
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, Coeff)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (mut inner, mut outer) = (Monomial::one(), Monomial::one());
            for (w, &e) in m.exps().iter().enumerate() {
                if keep.contains(&w) {
                    inner.set(w, e);
                } else {
                    outer.set(w, e);
                }
            }
            groups.entry(outer).or_default().push((inner, c.clone()));
        }
        groups.into_values().map(|ts| MPoly::from_terms(self.field, ts)).collect()
    }

    /// The gcd of the coefficients in `v`.
    fn content_in(&self, v: usize) -> MPoly {
        let mut g = MPoly::zero(self.field);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = g.gcd(&c);
            if g.is_constant() {
                break;
            }
        }
        g
    }

    /// `true` when every variable occurring is `v`.
    pub fn is_univariate_in(&self, v: usize) -> bool {
        self.vars().iter().all(|&w| w == v)
    }

    /// Applies `m` to the coefficients of `self` viewed as a polynomial in the
    /// `main` variables over the remaining ones.
    pub fn map_coefficients<E>(
        &self,
        main: &[usize],
        mut m: impl FnMut(&MPoly) -> Result<MPoly, E>,
    ) -> Result<MPoly, E> {
        let mut groups: HashMap<Monomial, Vec<(Monomial, Coeff)>> = HashMap::new();
        for (mono, c) in &self.terms {
            let mut main_part = Monomial::one();
            let mut rest = mono.clone();
            for &v in main {
                main_part.set(v, mono.exp(v));
                rest.set(v, 0);
            }
            groups.entry(main_part).or_default().push((rest, c.clone()));
        }
        let mut keys: Vec<_> = groups.keys().cloned().collect();
        keys.sort();
        let mut acc = MPoly::zero(self.field);
        for k in keys {
            let coeff = MPoly::from_terms(self.field, groups.remove(&k).unwrap());
            acc = &acc + &m(&coeff)?.mul_monomial(&k);
        }
        Ok(acc)
    }

    /// Canonical text form using `names` for the variables.
    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = display_monomial(m, names);
            match (abs.is_one(), mono.is_empty()) {
                (_, true) => write!(out, "{abs}").unwrap(),
                (true, false) => out.push_str(&mono),
                (false, false) => write!(out, "{abs}*{mono}").unwrap(),
            }
        }
        out
    }
}

fn display_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (v, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = names.get(v).cloned().unwrap_or_else(|| format!("v{v}"));
        if e == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{e}"));
        }
    }
    parts.join("*")
}

fn accumulate(acc: &mut BTreeMap<Monomial, Coeff>, m: Monomial, c: Coeff) {
    match acc.get_mut(&m) {
        Some(old) => *old = &*old + &c,
        None => {
            acc.insert(m, c);
        }
    }
}

fn merge(a: &MPoly, b: &MPoly, negate_b: bool) -> MPoly {
    let mut terms = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    let nb = |c: &Coeff| if negate_b { -c } else { c.clone() };
    while i < a.terms.len() && j < b.terms.len() {
        match a.terms[i].0.cmp(&b.terms[j].0) {
            Ordering::Greater => {
                terms.push(a.terms[i].clone());
                i += 1;
            }
            Ordering::Less => {
                terms.push((b.terms[j].0.clone(), nb(&b.terms[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b { &a.terms[i].1 - &b.terms[j].1 } else { &a.terms[i].1 + &b.terms[j].1 };
                if !c.is_zero() {
                    terms.push((a.terms[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    terms.extend(a.terms[i..].iter().cloned());
    terms.extend(b.terms[j..].iter().map(|(m, c)| (m.clone(), nb(c))));
    MPoly { field: a.field, terms }
}

impl std::ops::Add<&MPoly> for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        merge(self, rhs, false)
    }
}

impl std::ops::Sub<&MPoly> for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        merge(self, rhs, true)
    }
}

impl std::ops::Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            field: self.field,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl std::ops::Mul<&MPoly> for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        if self.is_zero() || rhs.is_zero() {
            return MPoly::zero(self.field);
        }
        if let Some(c) = rhs.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return rhs.scale(&c);
        }
        let mut acc = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                accumulate(&mut acc, ma.mul(mb), ca * cb);
            }
        }
        MPoly::from_map(self.field, acc)
    }
}

/// Modulus for the coprimality certificate over the rationals.
const CHECK_PRIME: u64 = 2_147_483_647;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn residue(c: &Coeff, m: u64) -> Option<u64> {
    match c {
        Coeff::Mod { value, .. } => Some(*value % m),
        Coeff::Rat(r) => {
            let big = BigInt::from(m);
            let reduce = |x: &BigInt| (((x % &big) + &big) % &big).to_u64().expect("reduced residue");
            let (n, d) = (reduce(r.numer()), reduce(r.denom()));
            (d != 0).then(|| mul_mod(n, pow_mod(d, m - 2, m), m))
        }
    }
}

fn trim_dense(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

/// Degree of the gcd of two dense polynomials over `F_m`, `m` prime.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, m: u64) -> usize {
    trim_dense(&mut a);
    trim_dense(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let inv = pow_mod(*b.last().unwrap(), m - 2, m);
        while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
            let q = mul_mod(*a.last().unwrap(), inv, m);
            let shift = a.len() - b.len();
            for (k, &bk) in b.iter().enumerate() {
                a[shift + k] = (a[shift + k] + m - mul_mod(q, bk, m)) % m;
            }
            a.pop();
            if a.is_empty() {
                a.push(0);
            }
            trim_dense(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names() -> Vec<String> {
        ["t", "x", "y"].iter().map(|s| s.to_string()).collect()
    }

    fn f(p: u64) -> BaseField {
        BaseField::prime(p).unwrap()
    }

    fn x(field: BaseField) -> MPoly {
        MPoly::var(field, 1)
    }

    fn t(field: BaseField) -> MPoly {
        MPoly::var(field, 0)
    }

    #[test]
    fn char_two_square() {
        let k = f(2);
        let one = MPoly::one(k);
        let p = &(&x(k) + &one) * &(&x(k) - &one);
        assert_eq!(p.display(&names()), "x^2 + 1");
        assert_eq!(p, (&x(k) + &one).pow(2));
    }

    #[test]
    fn long_division_in_top_variable() {
        let k = f(3);
        let a = x(k).pow(3);
        let b = &x(k).pow(2) - &t(k);
        let (q, r) = a.divrem(&b, 1).unwrap();
        assert_eq!(q, RatExpr::from_poly(x(k)));
        assert_eq!(r, RatExpr::from_poly(&t(k) * &x(k)));
    }

    #[test]
    fn additive_inverse_is_empty() {
        let q = BaseField::Rationals;
        let p = &x(q) + &MPoly::var(q, 2);
        assert!((&p + &(-&p)).terms().is_empty());
    }

    #[test]
    fn partials() {
        let p2 = &x(f(2)).pow(2) - &t(f(2));
        assert!(p2.partial(1).is_zero());
        let p3 = &x(f(3)).pow(2) - &t(f(3));
        assert_eq!(p3.partial(1).display(&names()), "2*x");
        let q = BaseField::Rationals;
        let p = &(&x(q).pow(3) * &MPoly::var(q, 2)) + &x(q);
        assert_eq!(p.partial(1).display(&names()), "3*x^2*y + 1");
    }

    #[test]
    fn coefficient_map_applies_d_dt() {
        let k = f(3);
        let p = &x(k).pow(2) - &t(k);
        let d = p.map_coefficients::<()>(&[1], |c| Ok(c.partial(0))).unwrap();
        assert_eq!(d, MPoly::from_int(k, -1));
        let same = p.map_coefficients::<()>(&[1], |c| Ok(c.clone())).unwrap();
        assert_eq!(same, p);
        let q = BaseField::Rationals;
        let tx = &t(q) * &x(q);
        // delta(t) = t acts as t * d/dt
        let d = tx.map_coefficients::<()>(&[1], |c| Ok(&c.partial(0) * &t(q))).unwrap();
        assert_eq!(d, tx);
    }

    #[test]
    fn exact_division_and_gcd() {
        let q = BaseField::Rationals;
        let a = &x(q) - &MPoly::one(q);
        let b = &x(q) + &MPoly::one(q);
        let ab = &a * &b;
        assert_eq!(ab.div_exact(&a).unwrap(), b);
        assert!(ab.div_exact(&(&x(q) + &t(q))).is_none());
        assert_eq!(ab.gcd_univariate(&a.pow(2), 1), a);
    }

    #[test]
    fn grlex_printing_order() {
        let q = BaseField::Rationals;
        let p = &(&t(q) + &x(q).pow(2)) + &(&t(q) * &x(q));
        assert_eq!(p.display(&names()), "t*x + x^2 + t");
    }

    fn arb_poly(p: u64) -> impl Strategy<Value = MPoly> {
        let field = if p == 0 { BaseField::Rationals } else { f(p) };
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -4i64..5), 0..5).prop_map(move |ts| {
            MPoly::from_terms(
                field,
                ts.into_iter().map(|((a, b, c), k)| (Monomial::from_exps(&[a, b, c]), field.from_i64(k))),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(0), b in arb_poly(0), c in arb_poly(0)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a);
        }

        #[test]
        fn ring_axioms_mod_p(a in arb_poly(5), b in arb_poly(5), c in arb_poly(5)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        }

        #[test]
        fn leibniz(a in arb_poly(0), b in arb_poly(3), v in 0usize..3) {
            prop_assert_eq!((&a * &a).partial(v), &(&a.partial(v) * &a) + &(&a * &a.partial(v)));
            prop_assert_eq!((&b * &b).partial(v), &(&b.partial(v) * &b) + &(&b * &b.partial(v)));
        }

        #[test]
        fn pth_power_has_zero_partial(a in arb_poly(3), v in 0usize..3) {
            prop_assert!(a.pow(3).partial(v).is_zero());
        }

        #[test]
        fn homomorphic_coefficient_map_is_multiplicative(a in arb_poly(0), b in arb_poly(0)) {
            // t -> t + 1 on the coefficients, x and y untouched
            let q = BaseField::Rationals;
            let shift = |c: &MPoly| -> Result<MPoly, ()> {
                let mut acc = MPoly::zero(q);
                for (m, k) in c.terms() {
                    let rest = MPoly::term(m.with_exp(0, 0), k.clone());
                    acc = &acc + &(&rest * &(&t(q) + &MPoly::one(q)).pow(m.exp(0)));
                }
                Ok(acc)
            };
            let lhs = (&a * &b).map_coefficients(&[1, 2], shift).unwrap();
            let rhs = &a.map_coefficients(&[1, 2], shift).unwrap() * &b.map_coefficients(&[1, 2], shift).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pseudo_division_identity(a in arb_poly(0), b in arb_poly(0)) {
            prop_assume!(!b.is_zero());
            let (q, r, m) = a.pseudo_divrem(&b, 1).unwrap();
            prop_assert_eq!(&m * &a, &(&q * &b) + &r);
            prop_assert!(r.is_zero() || r.degree_in(1) < b.degree_in(1) || b.degree_in(1) == 0 && r.is_zero());
        }

        #[test]
        fn gcd_keeps_common_factor(a in arb_poly(0), b in arb_poly(0), c in arb_poly(0), d in arb_poly(7)) {
            prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
            let (ac, bc) = (&a * &c, &b * &c);
            let g = ac.gcd(&bc);
            prop_assert!(g.div_exact(&c).is_some());
            prop_assert!(ac.div_exact(&g).is_some() && bc.div_exact(&g).is_some());
            if !d.is_zero() {
                let dd = &d * &d.partial(0);
                let g = dd.gcd(&d);
                prop_assert!(g.div_exact(&d).is_some() || dd.is_zero());
            }
        }
    }

    #[test]
    fn gcd_of_coprime_factors_is_one() {
        let q = BaseField::Rationals;
        let a = &(&x(q) * &t(q)) + &MPoly::one(q);
        let b = &x(q) + &t(q).pow(2);
        assert!((&a * &a).gcd(&b).is_one());
        assert_eq!((&a * &b).gcd(&(&a * &x(q))), a.monic());
    }
}

