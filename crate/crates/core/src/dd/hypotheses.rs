//! The realization hypotheses, checked against a dd-kernel's presentation.
//!
//! Algebraic facts are certified by a closure over the presented relations:
//! a slot joins a known set when some relation involves it and otherwise
//! only known slots, with a nonzero coefficient on a positive power of it
//! (algebraic) or a nonzero partial derivative at the point (separable).
//! Transcendence degrees are read off the transcendental slots of a block
//! that is closed under relation dependencies. Every verdict carries a
//! human-readable witness.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{dd_classify, DDError, DDKernel};
use crate::arith::MPoly;
use crate::kernel::SlotKind;

/// `(ξ, u, i)` with `i` one-based.
pub type Coords = (usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisData {
    pub m: usize,
    /// `(ξ, i)` pairs.
    pub i_set: BTreeSet<(usize, usize)>,
    /// `x_1, …, x_m`, each an a-side slot `(ξ, u, i)` with `(ξ, i) ∉ I`.
    pub enumeration: Vec<Coords>,
    pub t: usize,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisVerdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Default)]
pub struct HypothesisReport {
    pub verdicts: Vec<HypothesisVerdict>,
}

impl HypothesisReport {
    pub fn ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn first_failure(&self) -> Option<&HypothesisVerdict> {
        self.verdicts.iter().find(|v| !v.pass)
    }

    fn push(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(HypothesisVerdict { name: name.into(), pass, detail: detail.into() });
    }
}

struct Relation {
    slots: BTreeSet<usize>,
    poly: MPoly,
}

struct Closure<'a> {
    k: &'a DDKernel,
    rels: Vec<Relation>,
}

impl<'a> Closure<'a> {
    fn new(k: &'a DDKernel) -> Closure<'a> {
        let p = k.presentation();
        let t = p.tower();
        let nb = p.base().nvars();
        let field = t.field();
        let mut rels = Vec::new();
        for z in 0..p.len() {
            let x = MPoly::var(field, p.var(z));
            let poly = match p.kind(z) {
                SlotKind::Transcendental => continue,
                SlotKind::Element(e) => &(e.den() * &x) - e.num(),
                SlotKind::Algebraic(f) => {
                    let cs = f.coeffs();
                    let mut acc = MPoly::zero(field);
                    for (j, c) in cs.iter().enumerate() {
                        let mut term = c.num() * &x.pow(j as u32);
                        for (l, o) in cs.iter().enumerate() {
                            if l != j {
                                term = &term * o.den();
                            }
                        }
                        acc = &acc + &term;
                    }
                    acc
                }
            };
            let slots = poly.vars().into_iter().filter(|&v| v >= nb).map(|v| v - nb).collect();
            rels.push(Relation { slots, poly });
        }
        Closure { k, rels }
    }

    fn frobenius_only(&self, poly: &MPoly, v: usize) -> bool {
        let p = self.k.tower().characteristic() as u32;
        p != 0 && poly.terms().iter().all(|(m, _)| m.exp(v) % p == 0)
    }

    /// Everything certified algebraic (or separably algebraic) over the
    /// field generated by `start` and the p-th powers of `frob`.
    fn close(&self, start: &BTreeSet<usize>, frob: &BTreeSet<usize>, separable: bool) -> BTreeSet<usize> {
        let p = self.k.presentation();
        let t = p.tower();
        let mut known = start.clone();
        loop {
            let mut changed = false;
            for rel in &self.rels {
                let unknown: Vec<usize> = rel
                    .slots
                    .iter()
                    .copied()
                    .filter(|&z| !known.contains(&z) && !(frob.contains(&z) && self.frobenius_only(&rel.poly, p.var(z))))
                    .collect();
                let [w] = unknown[..] else { continue };
                if frob.contains(&w) {
                    continue;
                }
                let v = p.var(w);
                let ok = if separable {
                    !t.from_poly(rel.poly.partial(v)).is_zero()
                } else {
                    rel.poly.coeffs_in(v).into_iter().skip(1).any(|c| !t.from_poly(c).is_zero())
                };
                if ok {
                    known.insert(w);
                    changed = true;
                }
            }
            if !changed {
                return known;
            }
        }
    }

    /// A slot of `block` whose relation reaches outside `block`.
    fn leak(&self, block: &BTreeSet<usize>) -> Option<(usize, usize)> {
        let p = self.k.presentation();
        let nb = p.base().nvars();
        for &z in block {
            let refs: BTreeSet<usize> = match p.kind(z) {
                SlotKind::Transcendental => continue,
                SlotKind::Element(e) => e.vars(),
                SlotKind::Algebraic(f) => f.coeffs().iter().flat_map(|c| c.vars()).collect(),
            };
            if let Some(w) = refs.into_iter().filter(|&v| v >= nb).map(|v| v - nb).find(|w| !block.contains(w)) {
                return Some((z, w));
            }
        }
        None
    }

    fn trans_count(&self, block: &BTreeSet<usize>) -> usize {
        let p = self.k.presentation();
        block.iter().filter(|&&z| matches!(p.kind(z), SlotKind::Transcendental)).count()
    }
}

fn name_list(k: &DDKernel, set: &BTreeSet<usize>) -> String {
    let names: Vec<&str> = set.iter().map(|&z| k.presentation().name(z)).collect();
    if names.is_empty() {
        "∅".into()
    } else {
        names.join(", ")
    }
}

/// Checks every hypothesis of the realization theorem for `k` and `h`.
pub fn dd_hypothesis_check(k: &DDKernel, h: &HypothesisData) -> Result<HypothesisReport, DDError> {
    let (n, r, s, m) = (k.n(), k.r(), k.s(), h.m);
    let p = k.presentation();
    let mut rep = HypothesisReport::default();

    let s_min = (m + 1) * n;
    rep.push("level bound", s >= s_min, format!("s = {s}, (M+1)n = {s_min}"));
    let r_min = (m + 1) * (n * s + 1);
    rep.push("row bound", r >= r_min, format!("r = {r}, (M+1)(ns+1) = {r_min}"));

    let leaders = dd_classify(k);
    let far = |set: BTreeSet<Coords>| -> Vec<Coords> { set.into_iter().filter(|c| c.0 > m).collect() };
    let mut plain = far(leaders.minimal_separable());
    plain.extend(far(leaders.inseparable()));
    let fmt = |v: &[Coords]| -> String {
        v.iter().map(|&(xi, u, i)| super::dd_slot_name(i, xi, u)).collect::<Vec<_>>().join(", ")
    };
    rep.push(
        "leaders in L_(M,s)",
        plain.is_empty(),
        if plain.is_empty() { format!("all minimal separable and inseparable leaders have ξ ≤ {m}") } else { format!("outside: {}", fmt(&plain)) },
    );
    let mut aside = far(leaders.a_minimal_separable());
    aside.extend(far(leaders.a_inseparable()));
    rep.push(
        "a-leaders in L_(M,s)",
        aside.is_empty(),
        if aside.is_empty() { format!("all a-leaders have ξ ≤ {m}") } else { format!("outside: {}", fmt(&aside)) },
    );

    let bad_i: Vec<_> = h.i_set.iter().filter(|&&(xi, i)| xi > m || i == 0 || i > n).collect();
    rep.push("index set", bad_i.is_empty(), format!("I = {:?}", h.i_set));
    if !bad_i.is_empty() || s < 1 || r < m {
        return Ok(rep);
    }

    let cl = Closure::new(k);
    let idx = |xi: usize, u: usize, i: usize| k.index(xi, u, i);
    let comp: Vec<(usize, usize)> =
        (0..=m).flat_map(|xi| (1..=n).map(move |i| (xi, i))).filter(|c| !h.i_set.contains(c)).collect();

    let b: BTreeSet<usize> = h.i_set.iter().flat_map(|&(xi, i)| (0..=s).map(move |u| (xi, u, i))).map(|(x, u, i)| idx(x, u, i)).collect();
    let not_trans: BTreeSet<usize> = b.iter().copied().filter(|&z| !matches!(p.kind(z), SlotKind::Transcendental)).collect();
    rep.push(
        "B algebraically independent",
        not_trans.is_empty(),
        if not_trans.is_empty() {
            format!("B = {{{}}} are transcendental slots", name_list(k, &b))
        } else {
            format!("not presented as transcendental: {}", name_list(k, &not_trans))
        },
    );

    let level0: BTreeSet<usize> = comp.iter().map(|&(xi, i)| idx(xi, 0, i)).collect();
    let start: BTreeSet<usize> = b.union(&level0).copied().collect();
    let alg = cl.close(&start, &BTreeSet::new(), false);
    let missing: BTreeSet<usize> = comp.iter().map(|&(xi, i)| idx(xi, 1, i)).filter(|z| !alg.contains(z)).collect();
    rep.push(
        "level 1 algebraic over level 0",
        missing.is_empty(),
        if missing.is_empty() { "certified by the presented relations".to_string() } else { format!("not certified: {}", name_list(k, &missing)) },
    );

    let block0 = start.clone();
    let d0 = match cl.leak(&block0) {
        Some((z, w)) => {
            rep.push("transcendence degree d", false, format!("{} depends on {} outside the block", p.name(z), p.name(w)));
            None
        }
        None => {
            let d0 = cl.trans_count(&block0).saturating_sub(b.len());
            rep.push("transcendence degree d", d0 == h.d, format!("counted {d0}, declared {}", h.d));
            Some(d0)
        }
    };

    let xs: BTreeSet<Coords> = comp.iter().flat_map(|&(xi, i)| (0..s).map(move |u| (xi, u, i))).collect();
    let given: BTreeSet<Coords> = h.enumeration.iter().copied().collect();
    let perm = given == xs && h.enumeration.len() == xs.len();
    let shape = h.t <= h.d && h.d <= h.enumeration.len();
    rep.push(
        "enumeration",
        perm && shape,
        if !perm {
            format!("expected a permutation of the {} slots (ξ,i) ∉ I, u < s", xs.len())
        } else if !shape {
            format!("need t ≤ d ≤ m, got t = {}, d = {}, m = {}", h.t, h.d, h.enumeration.len())
        } else {
            format!("m = {}", xs.len())
        },
    );
    if !(perm && shape) || d0.is_none() {
        return Ok(rep);
    }

    let x: Vec<usize> = h.enumeration.iter().map(|&(xi, u, i)| idx(xi, u, i)).collect();
    let y: Vec<usize> = h.enumeration.iter().map(|&(xi, u, i)| idx(xi, u + 1, i)).collect();
    let basis: BTreeSet<usize> = x[..h.t].iter().chain(&y[h.t..h.d]).copied().collect();
    let all: BTreeSet<usize> = b.iter().chain(&x).chain(&y).copied().collect();
    match cl.leak(&all) {
        Some((z, w)) => rep.push(
            "separating transcendence basis",
            false,
            format!("{} depends on {} outside K(B)(x, y)", p.name(z), p.name(w)),
        ),
        None => {
            let trdeg = cl.trans_count(&all).saturating_sub(b.len());
            let gen: BTreeSet<usize> = b.union(&basis).copied().collect();
            let sep = cl.close(&gen, &BTreeSet::new(), true);
            let left: BTreeSet<usize> = all.iter().copied().filter(|z| !sep.contains(z)).collect();
            let pass = basis.len() == h.d && trdeg == h.d && left.is_empty();
            let detail = if basis.len() != h.d {
                format!("basis {{{}}} has repeated entries", name_list(k, &basis))
            } else if trdeg != h.d {
                format!("K(B)(x, y) has transcendence degree {trdeg}, not d = {}", h.d)
            } else if !left.is_empty() {
                format!("not separably generated by {{{}}}: {}", name_list(k, &basis), name_list(k, &left))
            } else {
                format!("{{{}}}", name_list(k, &basis))
            };
            rep.push("separating transcendence basis", pass, detail);
        }
    }

    let frob: BTreeSet<usize> = x[..h.t].iter().copied().collect();
    let start: BTreeSet<usize> = b.iter().chain(&y[h.t..h.d]).copied().collect();
    let sep = cl.close(&start, &frob, true);
    let left: BTreeSet<usize> = x[h.t..h.d].iter().copied().filter(|z| !sep.contains(z)).collect();
    rep.push(
        "separable over the Frobenius field",
        left.is_empty(),
        if left.is_empty() {
            "x_(t+1..d) separably algebraic over K(B)(x_1^p, …, x_t^p, y_(t+1..d))".to_string()
        } else {
            format!("not certified: {}", name_list(k, &left))
        },
    );
    Ok(rep)
}
