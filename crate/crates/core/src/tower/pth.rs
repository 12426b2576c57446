//! p-th roots in towers built from transcendentals and `x^p − c` adjunctions.
//!
//! Write `s = t^p` for the transcendental variables. The monomials `t^α a^β`
//! with `α_i, β_j < p` form a basis of the tower over `F_p(s)`, and the roots
//! `a_j` satisfy `a_j^p = c_j`. An element `z` is a p-th power iff
//! `z = Σ_f λ_f c^f` for some `λ ∈ F_p(s)`, and then `z^{1/p} = Σ_f λ_f(t) a^f`.
//! The coordinates are found by fraction-free elimination over `F_p[s]`.

use std::collections::HashMap;

use super::{Element, Tower, TowerError};
use crate::arith::{Coeff, MPoly, Monomial};

impl Tower {
    /// The p-th root of `e` when it lies in this tower, `None` otherwise.
    pub fn is_pth_power(&self, e: &Element) -> Result<Option<Element>, TowerError> {
        let p = self.characteristic();
        if p == 0 {
            return Err(TowerError::UnsupportedTower("characteristic 0 has no Frobenius".into()));
        }
        self.check(e)?;
        let mut roots = Vec::new();
        for v in 0..self.nvars() {
            let Some(m) = self.minpoly(v) else { continue };
            if m.degree() == 1 {
                continue;
            }
            let pure = m.degree() as u64 == p && m.coeffs()[1..m.degree()].iter().all(|c| c.is_zero());
            if !pure {
                return Err(TowerError::UnsupportedTower(format!(
                    "generator `{}` is not a p-th root adjunction",
                    self.name(v)
                )));
            }
            roots.push((v, m.coeffs()[0].neg()));
        }
        if e.is_zero() {
            return Ok(Some(self.zero()));
        }
        // z = num·den^(p−1) / den^p with den transcendental.
        let w = &e.num * &e.den.pow(p as u32 - 1);
        let base = e.den.clone();
        if roots.is_empty() {
            return Ok(frobenius_root(&w, p).map(|r| self.make(r, base)));
        }
        let exps = exponent_grid(roots.len(), p);
        let mut columns = Vec::with_capacity(exps.len());
        let mut col_dens = Vec::with_capacity(exps.len());
        for f in &exps {
            let mut cf = self.one();
            for (k, &fk) in f.iter().enumerate() {
                cf = self.mul(&cf, &self.pow(&roots[k].1, fk as u64));
            }
            columns.push(coordinates(&(&cf.num * &cf.den.pow(p as u32 - 1)), p));
            col_dens.push(cf.den.clone());
        }
        let target = coordinates(&w, p);
        let mut keys: Vec<Monomial> = target.keys().cloned().collect();
        for c in &columns {
            keys.extend(c.keys().cloned());
        }
        keys.sort();
        keys.dedup();
        let zero = MPoly::zero(self.field());
        let n = columns.len();
        let matrix: Vec<Vec<MPoly>> = keys
            .iter()
            .map(|k| {
                let mut row: Vec<MPoly> = columns.iter().map(|c| c.get(k).cloned().unwrap_or(zero.clone())).collect();
                row.push(target.get(k).cloned().unwrap_or(zero.clone()));
                row
            })
            .collect();
        let Some((ys, det)) = solve_fraction_free(matrix, n)? else {
            return Ok(None);
        };
        // λ_f = y_f·den_f / (det·base), read back in the t variables.
        let mut root = self.zero();
        for (k, f) in exps.iter().enumerate() {
            if ys[k].is_zero() {
                continue;
            }
            let lambda = self.make(&ys[k] * &col_dens[k], &det * &base);
            let mut mono = self.one();
            for (j, &fj) in f.iter().enumerate() {
                mono = self.mul(&mono, &self.pow(&self.var(roots[j].0), fj as u64));
            }
            root = self.add(&root, &self.mul(&lambda, &mono));
        }
        debug_assert!(self.pow(&root, p) == *e, "p-th root check");
        Ok(Some(root))
    }
}

/// Root of a polynomial in transcendental variables over `F_p`: all exponents
/// must be divisible by `p` (coefficients are fixed by Frobenius).
fn frobenius_root(w: &MPoly, p: u64) -> Option<MPoly> {
    let mut terms = Vec::with_capacity(w.len());
    for (m, c) in w.terms() {
        if m.exps().iter().any(|&e| e as u64 % p != 0) {
            return None;
        }
        let exps: Vec<u32> = m.exps().iter().map(|&e| e / p as u32).collect();
        terms.push((Monomial::from_exps(&exps), c.clone()));
    }
    Some(MPoly::from_terms(w.field(), terms))
}

/// All exponent vectors in `{0..p−1}^k`, lexicographic.
fn exponent_grid(k: usize, p: u64) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..p as u32).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    out
}

/// Splits `w` by exponent residues mod p; each coordinate is a polynomial in
/// `s = t^p`, stored over the same variable positions.
fn coordinates(w: &MPoly, p: u64) -> HashMap<Monomial, MPoly> {
    let mut parts: HashMap<Monomial, Vec<(Monomial, Coeff)>> = HashMap::new();
    for (m, c) in w.terms() {
        let rem: Vec<u32> = m.exps().iter().map(|&e| e % p as u32).collect();
        let quo: Vec<u32> = m.exps().iter().map(|&e| e / p as u32).collect();
        parts
            .entry(Monomial::from_exps(&rem))
            .or_default()
            .push((Monomial::from_exps(&quo), c.clone()));
    }
    parts.into_iter().map(|(k, ts)| (k, MPoly::from_terms(w.field(), ts))).collect()
}

/// Bareiss elimination on an augmented system with `n` unknowns. Returns
/// `None` when inconsistent, otherwise `(y, d)` with solution `y_k / d`.
fn solve_fraction_free(mut a: Vec<Vec<MPoly>>, n: usize) -> Result<Option<(Vec<MPoly>, MPoly)>, TowerError> {
    let rows = a.len();
    let field = a.first().map(|r| r[0].field()).expect("nonempty system");
    let mut prev = MPoly::one(field);
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..=n {
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, pr);
        for i in r + 1..rows {
            for j in c + 1..=n {
                let v = &(&a[r][c] * &a[i][j]) - &(&a[i][c] * &a[r][j]);
                a[i][j] = v.div_exact(&prev).expect("Bareiss exact division");
            }
            a[i][c] = MPoly::zero(field);
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if pivots.contains(&n) {
        return Ok(None);
    }
    if pivots.len() < n {
        return Err(TowerError::UnsupportedTower(
            "the p-th root generators are not independent (reducible presentation)".into(),
        ));
    }
    let det = a[n - 1][n - 1].clone();
    let mut y = vec![MPoly::zero(field); n];
    for k in (0..n).rev() {
        let mut acc = &det * &a[k][n];
        for j in k + 1..n {
            acc = &acc - &(&a[k][j] * &y[j]);
        }
        y[k] = acc.div_exact(&a[k][k]).expect("Cramer numerator");
    }
    Ok(Some((y, det)))
}
