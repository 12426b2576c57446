//! δ-prolongation of dd-kernels through linearization, and realization
//! along σ by new levels.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{dd_check, dd_classify, dd_coords, dd_hypothesis_check, dd_index, dd_slot_name, dd_verify, map_kind, reorder, DDError, DDKernel, HypothesisData};
use crate::kernel::{prolong_rows, LeaderTag, Presentation, SlotKind};
use crate::ops::Derivation;
use crate::tower::{Element, Tower, TowerError};

/// The linear form of a dd-kernel with `s > 1`: width `ns`, one level. Level 0
/// holds the original slots with `u < s` in column `u·n + i`; level 1 holds
/// copies of `(ξ, u+1, i)` for `u < s−1` and the original top level.
#[derive(Clone, Debug)]
pub struct Linearized {
    pub kernel: DDKernel,
    pub n: usize,
    pub s: usize,
    /// Linear slot index of each original slot.
    pub relabel: Vec<usize>,
}

pub fn linearize(k: &DDKernel) -> Result<Linearized, DDError> {
    let (n, s) = (k.n(), k.s());
    let nl = n * s;
    let rows = k.r() + 1;
    let mut order = Vec::new();
    let mut names = Vec::new();
    let mut relabel = vec![0; k.presentation().len()];
    for xi in 0..rows {
        for u2 in 0..2 {
            for c in 0..nl {
                let (u, i) = (c / n, c % n + 1);
                let pos = order.len();
                let src = match u2 {
                    0 => Some(k.index(xi, u, i)),
                    _ if u == s - 1 => Some(k.index(xi, s, i)),
                    _ => None,
                };
                if let Some(src) = src {
                    relabel[src] = pos;
                }
                order.push(src.unwrap_or(usize::MAX));
                names.push(dd_slot_name(c + 1, xi, u2));
            }
        }
    }
    let mut copy = |pos: usize, pres: &Presentation| -> Option<SlotKind> {
        // Level-1 copy of column c reads level-0 column c + n in the same row.
        Some(SlotKind::Element(pres.value(pos - nl + n)))
    };
    let (pres, _) = reorder(k.presentation(), 2 * nl, &order, &names, &mut copy)?;
    let kernel = dd_verify(k.base_delta(), k.base_sigma(), nl, 1, pres)?;
    Ok(Linearized { kernel, n, s, relabel })
}

/// Drops the level-1 copies and restores the `(ξ, u, i)` layout.
pub fn delinearize(lin: &DDKernel, n: usize, s: usize) -> Result<DDKernel, DDError> {
    let mut order = Vec::new();
    let mut names = Vec::new();
    for xi in 0..=lin.r() {
        for u in 0..=s {
            for i in 1..=n {
                let src = if u < s { lin.index(xi, 0, u * n + i) } else { lin.index(xi, 1, (s - 1) * n + i) };
                order.push(src);
                names.push(dd_slot_name(i, xi, u));
            }
        }
    }
    let (pres, _) = reorder(lin.presentation(), n * (s + 1), &order, &names, &mut |_, _| None)?;
    dd_verify(lin.base_delta(), lin.base_sigma(), n, s, pres)
}

/// Which rule produced each new slot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RealizeLog {
    pub entries: Vec<(String, String)>,
}

impl RealizeLog {
    fn note(&mut self, name: String, case: impl Into<String>) {
        self.entries.push((name, case.into()));
    }
}

fn check_locality(k: &DDKernel, m: usize) -> Result<(), DDError> {
    let need = (k.n() * k.s() + 1) * (m + 1);
    if k.r() < need {
        return Err(DDError::HypothesisViolation(format!("r = {} is below (ns+1)(M+1) = {need}", k.r())));
    }
    let rep = dd_classify(k);
    let far = rep
        .minimal_separable()
        .into_iter()
        .chain(rep.inseparable())
        .chain(rep.a_minimal_separable())
        .chain(rep.a_inseparable())
        .find(|c| c.0 > m);
    if let Some((xi, u, i)) = far {
        return Err(DDError::HypothesisViolation(format!("leader {} lies outside L_({m},{})", dd_slot_name(i, xi, u), k.s())));
    }
    Ok(())
}

/// Adds `steps` rows, linearizing first when `s > 1`. New slots follow the
/// differential rule: generic below a non-leader, forced below a separable
/// leader.
pub fn dd_prolong_delta(k: &DDKernel, steps: usize, m: usize) -> Result<(DDKernel, RealizeLog), DDError> {
    check_locality(k, m)?;
    let (n, s) = (k.n(), k.s());
    let lin = if s > 1 { Some(linearize(k)?) } else { None };
    let work = lin.as_ref().map_or(k, |l| &l.kernel);
    let nl = work.n();
    let (pres, _) = prolong_rows(work.delta_shift(), work.presentation(), steps, &mut |c, xi| {
        let c = c - 1;
        dd_slot_name(c % nl + 1, xi, c / nl)
    })?;
    let out = dd_verify(k.base_delta(), k.base_sigma(), nl, 1, pres)?;
    let out = if s > 1 { delinearize(&out, n, s)? } else { out };
    let mut log = RealizeLog::default();
    let p = out.presentation();
    for j in k.presentation().len()..p.len() {
        let case = match p.kind(j) {
            SlotKind::Transcendental => "generic below a non-leader",
            _ => "forced below a separable leader",
        };
        log.note(p.name(j).to_string(), case);
    }
    Ok((out, log))
}

/// A value supplied for a slot whose predecessor is an inseparable leader.
#[derive(Clone)]
pub enum Choice {
    /// A new transcendental.
    Generic,
    Value(Arc<dyn Fn(&Tower) -> Result<Element, TowerError> + Send + Sync>),
}

impl fmt::Debug for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Choice::Generic => f.write_str("Generic"),
            Choice::Value(_) => f.write_str("Value(..)"),
        }
    }
}

/// `x^p − c` with `c` a p-th power becomes the element `c^{1/p}`.
fn split_root(kind: SlotKind, t: &Tower) -> SlotKind {
    let p = t.characteristic() as usize;
    if let SlotKind::Algebraic(f) = &kind {
        let cs = f.coeffs();
        if p != 0 && f.degree() == p && cs[1..p].iter().all(|c| c.is_zero()) {
            if let Ok(Some(root)) = t.is_pth_power(&cs[0].neg()) {
                return SlotKind::Element(root);
            }
        }
    }
    kind
}

/// Whether `v` satisfies the transported relation `kind`.
fn satisfies(kind: &SlotKind, v: &Element, t: &Tower) -> bool {
    match kind {
        SlotKind::Transcendental => v.constant_value().is_none(),
        SlotKind::Element(e) => t.normal_form(e) == t.normal_form(v),
        SlotKind::Algebraic(f) => t.upoly_eval(&f.as_upoly(), v).is_zero(),
    }
}

/// Realizes `k` up to `L_(R,S)`: δ-prolongation to `R` rows, then levels
/// `s+1..=S` in lexicographic order. A slot below a non-leader is the
/// σ-transport of its left neighbour, a slot below a separable leader takes
/// the forced value, and a slot below an inseparable leader takes the
/// supplied choice or, by default, the σ-transport.
pub fn dd_realize(
    k: &DDKernel,
    h: &HypothesisData,
    big_r: usize,
    big_s: usize,
    choices: &BTreeMap<String, Choice>,
) -> Result<(DDKernel, RealizeLog), DDError> {
    let rep = dd_hypothesis_check(k, h)?;
    if let Some(v) = rep.first_failure() {
        return Err(DDError::HypothesisViolation(format!("{}: {}", v.name, v.detail)));
    }
    if big_r < k.r() || big_s < k.s() {
        return Err(DDError::Shape(format!("cannot realize ({big_r},{big_s}) from ({},{})", k.r(), k.s())));
    }
    let (k1, mut log) = if big_r > k.r() { dd_prolong_delta(k, big_r - k.r(), h.m)? } else { (k.clone(), RealizeLog::default()) };
    if big_s == k.s() {
        return Ok((k1, log));
    }
    let (n, s) = (k.n(), k.s());
    let old = k1.presentation();
    let base = old.base().clone();
    let nb = base.nvars();
    let cols = n * (big_s + 1);
    let sigma = k.base_sigma();
    let mut pres = Presentation::new(&base, cols);
    let mut work = Derivation::unchecked(&base, &base, k.base_delta().images().to_vec())?;
    for xi in 0..=big_r {
        for u in 0..=big_s {
            for i in 1..=n {
                let name = dd_slot_name(i, xi, u);
                let t = pres.tower().clone();
                let len = pres.len();
                let kind = if u <= s {
                    let mut map = |v: usize| -> Option<Element> {
                        if v < nb {
                            return Some(t.var(v));
                        }
                        let (x2, u2, i2) = dd_coords(n, s, v - nb);
                        Some(t.var(nb + dd_index(n, big_s, x2, u2, i2)))
                    };
                    map_kind(old.kind(dd_index(n, s, xi, u, i)), &t, &mut map)?
                        .ok_or_else(|| DDError::Shape(format!("{name} refers past itself")))?
                } else {
                    let mut sig = |v: usize| -> Option<Element> {
                        if v < nb {
                            return Some(sigma.image(v).clone());
                        }
                        let (x2, u2, i2) = dd_coords(n, big_s, v - nb);
                        let j = dd_index(n, big_s, x2, u2 + 1, i2);
                        (u2 < big_s && j < len).then(|| t.var(nb + j))
                    };
                    let left = dd_index(n, big_s, xi, u - 1, i);
                    let transported = map_kind(pres.kind(left), &t, &mut sig)?
                        .ok_or_else(|| DDError::Shape(format!("the transport of {} leaves the tower", pres.name(left))))?;
                    let transported = split_root(transported, &t);
                    let prev_tag = (xi > 0).then(|| pres.tag(dd_index(n, big_s, xi - 1, u, i)));
                    match prev_tag {
                        None => {
                            log.note(name.clone(), "top row: σ-transport");
                            transported
                        }
                        Some(LeaderTag::NonLeader) => {
                            log.note(name.clone(), "below a non-leader: σ-transport");
                            transported
                        }
                        Some(LeaderTag::Separable) => {
                            let prev = dd_index(n, big_s, xi - 1, u, i);
                            let f = t.minpoly(pres.var(prev)).expect("separable slots carry a relation").clone();
                            log.note(name.clone(), "below a separable leader: forced");
                            SlotKind::Element(work.forced_value(&f, &pres.value(prev))?)
                        }
                        Some(LeaderTag::Inseparable) => match choices.get(&name) {
                            None => {
                                log.note(name.clone(), "below an inseparable leader: σ-transport (default)");
                                transported
                            }
                            Some(Choice::Generic) => {
                                if transported != SlotKind::Transcendental {
                                    return Err(DDError::ChoiceRequired {
                                        slot: name,
                                        reason: "a generic value needs a transcendental left neighbour".into(),
                                    });
                                }
                                log.note(name.clone(), "below an inseparable leader: chosen generic");
                                SlotKind::Transcendental
                            }
                            Some(Choice::Value(f)) => {
                                let v = f(&t)?;
                                if !satisfies(&transported, &v, &t) {
                                    return Err(DDError::ChoiceRequired {
                                        slot: name,
                                        reason: format!("{} does not satisfy the σ-transported relation", t.display(&v)),
                                    });
                                }
                                log.note(name.clone(), "below an inseparable leader: chosen value");
                                SlotKind::Element(v)
                            }
                        },
                    }
                };
                pres = pres.push(&name, kind)?;
                let k2 = pres.len() - 1;
                if k2 >= cols {
                    work = work.push(&pres.tower_upto(k2 - cols + 1), pres.tower(), pres.value(k2))?;
                } else {
                    work = work.widen(pres.tower())?;
                }
            }
        }
    }
    let rep = dd_check(k.base_delta(), sigma, n, big_s, &pres)?;
    if !rep.ok() {
        return Err(DDError::Invalid(rep.describe(pres.tower())));
    }
    Ok((dd_verify(k.base_delta(), sigma, n, big_s, pres)?, log))
}
