//! Differential-difference kernels on `Γ(r, s)`.
//!
//! The ambient presentation stores slot `(ξ, u, i)` at index
//! `ξ·n(s+1) + u·n + (i−1)`, so rows are `ξ` and the `n(s+1)` columns are
//! the pairs `(u, i)`. The δ-shift moves down one row; the σ-shift moves one
//! level right and is defined on the a-side `L^a = L_{(r,s−1)}`, which gets
//! its own tower because it is not a prefix of the ambient one.

mod difference;
mod hypotheses;
mod prolong;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::kernel::{linear_minimal, row_shift, KernelError, LeaderTag, Presentation, SlotKind};
use crate::ops::{commutation_check, eval_element, CommutationReport, CommutationViolation, Derivation, Endomorphism, OpError, Violation};
use crate::tower::{Element, MinPoly, Tower, TowerError};

pub use difference::{difference_leader_classify, DifferencePresentation, DifferenceReport};
pub use hypotheses::{dd_hypothesis_check, HypothesisData, HypothesisReport, HypothesisVerdict};
pub use prolong::{dd_prolong_delta, dd_realize, delinearize, linearize, Choice, Linearized, RealizeLog};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DDError {
    #[error("not a dd-kernel: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("slot {slot} needs an explicit choice: {reason}")]
    ChoiceRequired { slot: String, reason: String },
    #[error("malformed dd-kernel: {0}")]
    Shape(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Canonical name `a[i][ξ][u]`.
pub fn dd_slot_name(i: usize, xi: usize, u: usize) -> String {
    format!("a[{i}][{xi}][{u}]")
}

/// Position of `(ξ, u, i)` in the ambient layout, `i` one-based.
pub fn dd_index(n: usize, s: usize, xi: usize, u: usize, i: usize) -> usize {
    xi * n * (s + 1) + u * n + (i - 1)
}

/// `(ξ, u, i)` of an ambient slot index.
pub fn dd_coords(n: usize, s: usize, k: usize) -> (usize, usize, usize) {
    let w = n * (s + 1);
    (k / w, (k % w) / n, k % n + 1)
}

/// A kernel slot's kind with every variable sent through `map` and
/// renormalized in `target`; `None` if some variable has no image.
pub(crate) fn map_kind(
    kind: &SlotKind,
    target: &Tower,
    map: &mut dyn FnMut(usize) -> Option<Element>,
) -> Result<Option<SlotKind>, DDError> {
    let mut missing = false;
    let mut img = |e: &Element| -> Result<Element, OpError> {
        eval_element(target, e, &mut |v| {
            map(v).ok_or_else(|| {
                missing = true;
                OpError::OutsideDomain(format!("variable {v}"))
            })
        })
    };
    let out = match kind {
        SlotKind::Transcendental => SlotKind::Transcendental,
        SlotKind::Element(e) => match img(e) {
            Ok(v) => SlotKind::Element(v),
            Err(_) if missing => return Ok(None),
            Err(e) => return Err(e.into()),
        },
        SlotKind::Algebraic(f) => {
            let mut lower = Vec::with_capacity(f.degree());
            for c in &f.coeffs()[..f.degree()] {
                match img(c) {
                    Ok(v) => lower.push(v),
                    Err(_) if missing => return Ok(None),
                    Err(e) => return Err(e.into()),
                }
            }
            SlotKind::Algebraic(MinPoly::monic(lower, target.field()))
        }
    };
    Ok(Some(out))
}

/// Rebuilds slots in a new order. `order` lists old slot indices; each
/// old slot's variables must be mapped to slots placed earlier.
pub(crate) fn reorder(
    old: &Presentation,
    cols: usize,
    order: &[usize],
    names: &[String],
    extra: &mut dyn FnMut(usize, &Presentation) -> Option<SlotKind>,
) -> Result<(Presentation, Vec<Option<usize>>), DDError> {
    let base = old.base();
    let nb = base.nvars();
    let mut pres = Presentation::new(base, cols);
    let mut where_: Vec<Option<usize>> = vec![None; old.len()];
    for (pos, &src) in order.iter().enumerate() {
        let kind = if src == usize::MAX {
            extra(pos, &pres).ok_or_else(|| DDError::Shape(format!("no slot for position {pos}")))?
        } else {
            let t = pres.tower().clone();
            let w = where_.clone();
            let mut map = |v: usize| -> Option<Element> {
                if v < nb {
                    Some(t.var(v))
                } else {
                    w[v - nb].map(|k| t.var(nb + k))
                }
            };
            map_kind(old.kind(src), &t, &mut map)?
                .ok_or_else(|| DDError::Shape(format!("slot {} depends on a later slot", old.name(src))))?
        };
        pres = pres.push(&names[pos], kind)?;
        if src != usize::MAX {
            where_[src] = Some(pos);
        }
    }
    Ok((pres, where_))
}

/// The a-side `L^a`: ambient slots with `u ≤ s−1`, presented over the base
/// in their own lexicographic order.
#[derive(Clone, Debug)]
pub struct ASide {
    pub pres: Presentation,
    /// Ambient slot index of each a-side slot.
    pub to_ambient: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct DDVerifyReport {
    pub base_commutation: CommutationReport,
    pub delta: Vec<Violation>,
    pub sigma: Vec<Violation>,
    /// a-side slots whose relation reaches into the top level.
    pub unsplit: Vec<String>,
}

impl DDVerifyReport {
    pub fn ok(&self) -> bool {
        self.base_commutation.ok() && self.delta.is_empty() && self.sigma.is_empty() && self.unsplit.is_empty()
    }

    pub fn describe(&self, t: &Tower) -> Vec<String> {
        let mut out: Vec<String> = self.base_commutation.violations.iter().map(|v| describe_commutation(v, t)).collect();
        out.extend(self.delta.iter().map(|v| v.describe(t)));
        out.extend(self.sigma.iter().map(|v| v.describe(t)));
        out.extend(self.unsplit.iter().map(|n| format!("a-side slot {n} is not presented over the a-side")));
        out
    }
}

pub fn describe_commutation(v: &CommutationViolation, t: &Tower) -> String {
    format!(
        "commutation fails at {}: delta(sigma) = {}, sigma(delta) = {}",
        v.symbol,
        t.display(&v.delta_sigma),
        t.display(&v.sigma_delta)
    )
}

/// A verified dd-kernel of width `n` and lengths `(r, s)`.
#[derive(Clone, Debug)]
pub struct DDKernel {
    delta: Derivation,
    sigma: Endomorphism,
    n: usize,
    s: usize,
    pres: Presentation,
    a_side: ASide,
    delta_shift: Derivation,
    sigma_shift: Endomorphism,
}

fn build_a_side(pres: &Presentation, n: usize, s: usize) -> Result<(ASide, Vec<String>), DDError> {
    let nb = pres.base().nvars();
    let mut a = Presentation::new(pres.base(), n * s);
    let mut to_ambient = Vec::new();
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut unsplit = Vec::new();
    for k in 0..pres.len() {
        let (_, u, _) = dd_coords(n, s, k);
        if u == s {
            continue;
        }
        let t = a.tower().clone();
        let mut map = |v: usize| -> Option<Element> {
            if v < nb {
                Some(t.var(v))
            } else {
                local.get(&(v - nb)).map(|&j| t.var(nb + j))
            }
        };
        let kind = match map_kind(pres.kind(k), &t, &mut map)? {
            Some(kind) => kind,
            None => {
                // Keep the layout; the σ-check reports the slot.
                unsplit.push(pres.name(k).to_string());
                SlotKind::Transcendental
            }
        };
        local.insert(k, a.len());
        to_ambient.push(k);
        a = a.push(pres.name(k), kind)?;
    }
    Ok((ASide { pres: a, to_ambient }, unsplit))
}

fn sigma_shift(sigma: &Endomorphism, pres: &Presentation, a: &ASide, n: usize) -> Result<Endomorphism, DDError> {
    let mut images = sigma.images().to_vec();
    images.extend(a.to_ambient.iter().map(|&k| pres.value(k + n)));
    Ok(Endomorphism::unchecked(a.pres.tower(), pres.tower(), images)?)
}

/// Checks the base commutation, the δ-shift, the split of the a-side and
/// the σ-shift, collecting every violation.
pub fn dd_check(
    delta: &Derivation,
    sigma: &Endomorphism,
    n: usize,
    s: usize,
    pres: &Presentation,
) -> Result<DDVerifyReport, DDError> {
    shape_check(delta, sigma, n, s, pres)?;
    let mut rep = DDVerifyReport { base_commutation: commutation_check(delta, sigma)?, ..Default::default() };
    if pres.rows() > 1 {
        rep.delta = row_shift(delta, pres)?.violations()?;
    }
    let (a, unsplit) = build_a_side(pres, n, s)?;
    rep.sigma = sigma_shift(sigma, pres, &a, n)?
        .violations()?
        .into_iter()
        .filter(|v| !unsplit.contains(&v.generator))
        .collect();
    rep.unsplit = unsplit;
    Ok(rep)
}

fn shape_check(delta: &Derivation, sigma: &Endomorphism, n: usize, s: usize, pres: &Presentation) -> Result<(), DDError> {
    if n == 0 || s == 0 {
        return Err(DDError::Shape("n and s must be at least 1".into()));
    }
    if pres.cols() != n * (s + 1) || pres.is_empty() || pres.len() % pres.cols() != 0 {
        return Err(DDError::Shape(format!("expected complete rows of {} slots", n * (s + 1))));
    }
    let b = pres.base();
    if delta.domain() != b || delta.codomain() != b || sigma.domain() != b || sigma.target() != b {
        return Err(DDError::Shape("base operators must act on the base tower".into()));
    }
    Ok(())
}

/// Builds and validates a dd-kernel.
pub fn dd_verify(
    delta: &Derivation,
    sigma: &Endomorphism,
    n: usize,
    s: usize,
    pres: Presentation,
) -> Result<DDKernel, DDError> {
    let rep = dd_check(delta, sigma, n, s, &pres)?;
    if !rep.ok() {
        return Err(DDError::Invalid(rep.describe(pres.tower())));
    }
    let (a_side, _) = build_a_side(&pres, n, s)?;
    let sigma_shift = sigma_shift(sigma, &pres, &a_side, n)?;
    let delta_shift = if pres.rows() > 1 {
        row_shift(delta, &pres)?
    } else {
        Derivation::unchecked(&pres.tower_upto(0), pres.tower(), delta.images().to_vec())?
    };
    Ok(DDKernel { delta: delta.clone(), sigma: sigma.clone(), n, s, pres, a_side, delta_shift, sigma_shift })
}

impl DDKernel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.pres.rows() - 1
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn base_delta(&self) -> &Derivation {
        &self.delta
    }

    pub fn base_sigma(&self) -> &Endomorphism {
        &self.sigma
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn tower(&self) -> &Tower {
        self.pres.tower()
    }

    pub fn a_side(&self) -> &ASide {
        &self.a_side
    }

    pub fn delta_shift(&self) -> &Derivation {
        &self.delta_shift
    }

    pub fn sigma_shift(&self) -> &Endomorphism {
        &self.sigma_shift
    }

    pub fn index(&self, xi: usize, u: usize, i: usize) -> usize {
        dd_index(self.n, self.s, xi, u, i)
    }

    pub fn coords(&self, k: usize) -> (usize, usize, usize) {
        dd_coords(self.n, self.s, k)
    }

    pub fn value(&self, xi: usize, u: usize, i: usize) -> Element {
        self.pres.value(self.index(xi, u, i))
    }

    /// Rewrites an ambient element over the a-side tower when it only uses
    /// a-side variables.
    pub fn to_a_side(&self, e: &Element) -> Option<Element> {
        let nb = self.pres.base().nvars();
        let inv: HashMap<usize, usize> = self.a_side.to_ambient.iter().enumerate().map(|(j, &k)| (k, j)).collect();
        let at = self.a_side.pres.tower();
        let mut map = |v: usize| -> Result<Element, OpError> {
            if v < nb {
                return Ok(at.var(v));
            }
            inv.get(&(v - nb)).map(|&j| at.var(nb + j)).ok_or(OpError::OutsideDomain(String::new()))
        };
        eval_element(at, e, &mut map).ok()
    }

    /// Generator-level commutation `δσ = σδ` on the base variables and on
    /// every slot where both composites are defined.
    pub fn commutation(&self) -> Result<CommutationReport, DDError> {
        let mut rep = commutation_check(&self.delta, &self.sigma)?;
        let nb = self.pres.base().nvars();
        for (j, &k) in self.a_side.to_ambient.iter().enumerate() {
            let (xi, u, i) = self.coords(k);
            let name = self.pres.name(k).to_string();
            if xi + 1 > self.r() {
                rep.skipped.push(name);
                continue;
            }
            let sv = self.sigma_shift.image(nb + j).clone();
            let ds = if sv.max_var().map_or(true, |v| v < self.delta_shift.domain().nvars()) {
                self.delta_shift.apply(&sv)?
            } else {
                rep.skipped.push(name);
                continue;
            };
            let dv = self.value(xi + 1, u, i);
            let Some(dva) = self.to_a_side(&dv) else {
                rep.skipped.push(name);
                continue;
            };
            let sd = self.sigma_shift.apply(&dva)?;
            rep.checked.push(name.clone());
            if ds != sd {
                rep.violations.push(CommutationViolation { symbol: name, var: nb + k, delta_sigma: ds, sigma_delta: sd });
            }
        }
        Ok(rep)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DDLeaderEntry {
    pub name: String,
    pub xi: usize,
    pub u: usize,
    pub i: usize,
    pub tag: LeaderTag,
    pub minimal: bool,
}

/// Plain leaders (product-order minimality), a-leaders and b-leaders
/// (linear minimality within each `(u, i)` column of the sub-kernel).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DDLeaderReport {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub plain: Vec<DDLeaderEntry>,
    pub a_side: Vec<DDLeaderEntry>,
    pub b_side: Vec<DDLeaderEntry>,
}

pub type SlotSet = BTreeSet<(usize, usize, usize)>;

fn collect(entries: &[DDLeaderEntry], f: impl Fn(&DDLeaderEntry) -> bool) -> SlotSet {
    entries.iter().filter(|e| f(e)).map(|e| (e.xi, e.u, e.i)).collect()
}

impl DDLeaderReport {
    pub fn minimal_separable(&self) -> SlotSet {
        collect(&self.plain, |e| e.minimal)
    }

    pub fn inseparable(&self) -> SlotSet {
        collect(&self.plain, |e| e.tag == LeaderTag::Inseparable)
    }

    pub fn a_minimal_separable(&self) -> SlotSet {
        collect(&self.a_side, |e| e.minimal)
    }

    pub fn a_inseparable(&self) -> SlotSet {
        collect(&self.a_side, |e| e.tag == LeaderTag::Inseparable)
    }

    pub fn b_minimal_separable(&self) -> SlotSet {
        collect(&self.b_side, |e| e.minimal)
    }

    pub fn b_inseparable(&self) -> SlotSet {
        collect(&self.b_side, |e| e.tag == LeaderTag::Inseparable)
    }
}

/// Minimality in the product order on `(ξ, u)` within each variable `i`:
/// `cells` lists `(ξ, u, i, tag)`.
pub fn product_minimal(cells: &[(usize, usize, usize, LeaderTag)]) -> Vec<bool> {
    cells
        .iter()
        .map(|&(xi, u, i, tag)| {
            tag == LeaderTag::Separable
                && !cells.iter().any(|&(x2, u2, i2, t2)| {
                    i2 == i && t2 == LeaderTag::Separable && (x2, u2) != (xi, u) && x2 <= xi && u2 <= u
                })
        })
        .collect()
}

fn side_entries(cells: Vec<(usize, usize, usize, LeaderTag, String)>, n: usize) -> Vec<DDLeaderEntry> {
    let lin: Vec<_> = cells.iter().map(|c| (c.0, c.1 * n + c.2, c.3)).collect();
    let minimal = linear_minimal(&lin);
    cells
        .into_iter()
        .zip(minimal)
        .map(|((xi, u, i, tag, name), minimal)| DDLeaderEntry { name, xi, u, i, tag, minimal })
        .collect()
}

pub fn dd_classify(k: &DDKernel) -> DDLeaderReport {
    let (n, s) = (k.n, k.s);
    let p = &k.pres;
    let cells: Vec<_> = (0..p.len())
        .map(|j| {
            let (xi, u, i) = k.coords(j);
            (xi, u, i, p.tag(j))
        })
        .collect();
    let minimal = product_minimal(&cells);
    let plain = cells
        .iter()
        .zip(minimal)
        .enumerate()
        .map(|(j, (&(xi, u, i, tag), minimal))| DDLeaderEntry { name: p.name(j).to_string(), xi, u, i, tag, minimal })
        .collect();
    let a_cells = k
        .a_side
        .to_ambient
        .iter()
        .enumerate()
        .map(|(j, &amb)| {
            let (xi, u, i) = k.coords(amb);
            (xi, u, i, k.a_side.pres.tag(j), p.name(amb).to_string())
        })
        .collect();
    // σ carries the a-presentation onto the b-presentation tag for tag.
    let b_cells = k
        .a_side
        .to_ambient
        .iter()
        .enumerate()
        .map(|(j, &amb)| {
            let (xi, u, i) = k.coords(amb);
            (xi, u + 1, i, k.a_side.pres.tag(j), p.name(amb + n).to_string())
        })
        .collect();
    DDLeaderReport {
        n,
        r: k.r(),
        s,
        plain,
        a_side: side_entries(a_cells, n),
        b_side: side_entries(b_cells, n)
            .into_iter()
            .map(|mut e| {
                e.minimal = e.minimal && e.tag == LeaderTag::Separable;
                e
            })
            .collect(),
    }
}

/// The σ-transport of a slot kind: `trans ↦ trans`, `f ↦ f^σ`, `E ↦ σ(E)`.
pub fn transport(
    kind: &SlotKind,
    target: &Tower,
    sigma: &mut dyn FnMut(usize) -> Option<Element>,
) -> Result<Option<SlotKind>, DDError> {
    map_kind(kind, target, sigma)
}
