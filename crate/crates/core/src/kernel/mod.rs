//! Differential kernels: presentations on `Γ(r)` whose index shift
//! `a[i][ξ] ↦ a[i][ξ+1]` extends the base derivation, their leaders, and
//! prolongation by the two-case rule (fresh transcendental after a
//! non-leader, forced value after a separable leader).

pub mod gamma;
mod presentation;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::ops::{Derivation, OpError, Violation};
use crate::tower::{Tower, TowerError};

pub use presentation::{LeaderTag, Presentation, SlotKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("not a kernel: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("inseparable leader {name} at row {xi} is not below the top row {r}")]
    InseparableLeaderTooHigh { name: String, xi: usize, i: usize, r: usize },
    #[error("malformed kernel: {0}")]
    Shape(String),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Canonical slot name `a[i][ξ]`.
pub fn slot_name(i: usize, xi: usize) -> String {
    format!("a[{i}][{xi}]")
}

/// A verified differential kernel of width `n` and length `r`.
#[derive(Clone, Debug)]
pub struct DiffKernel {
    delta: Derivation,
    n: usize,
    pres: Presentation,
    shift: Derivation,
}

/// The derivation `L_{r−1} → L_r` extending `delta` by the row shift of a
/// presentation with `cols` columns.
pub fn row_shift(delta: &Derivation, pres: &Presentation) -> Result<Derivation, KernelError> {
    let cols = pres.cols();
    if pres.len() % cols != 0 || pres.is_empty() {
        return Err(KernelError::Shape(format!("{} slots do not fill rows of {cols}", pres.len())));
    }
    if delta.domain() != pres.base() || delta.codomain() != pres.base() {
        return Err(KernelError::Shape("the base derivation must act on the base tower".into()));
    }
    let mut images = delta.images().to_vec();
    images.extend((0..pres.len() - cols).map(|k| pres.value(k + cols)));
    Ok(Derivation::unchecked(&pres.tower_upto(pres.len() - cols), pres.tower(), images)?)
}

/// All violated generator conditions of the row shift.
pub fn kernel_violations(delta: &Derivation, pres: &Presentation) -> Result<Vec<Violation>, KernelError> {
    Ok(row_shift(delta, pres)?.violations()?)
}

/// Builds the row shift and validates it.
pub fn kernel_verify(delta: &Derivation, n: usize, pres: Presentation) -> Result<DiffKernel, KernelError> {
    if pres.cols() != n {
        return Err(KernelError::Shape(format!("presentation has {} columns, expected {n}", pres.cols())));
    }
    let shift = row_shift(delta, &pres)?;
    let bad = shift.violations()?;
    if !bad.is_empty() {
        return Err(KernelError::Invalid(bad.iter().map(|v| v.describe(pres.tower())).collect()));
    }
    Ok(DiffKernel { delta: delta.clone(), n, pres, shift })
}

impl DiffKernel {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Length `r`: rows are indexed `0..=r`.
    pub fn r(&self) -> usize {
        self.pres.rows() - 1
    }

    pub fn base_delta(&self) -> &Derivation {
        &self.delta
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn tower(&self) -> &Tower {
        self.pres.tower()
    }

    /// The shift derivation `L_{r−1} → L_r`.
    pub fn shift(&self) -> &Derivation {
        &self.shift
    }

    /// Slot index of `a[i][ξ]`, `i` one-based.
    pub fn slot(&self, xi: usize, i: usize) -> usize {
        self.pres.slot(xi, i - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeaderEntry {
    pub name: String,
    pub xi: usize,
    pub i: usize,
    pub tag: LeaderTag,
    pub minimal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeaderReport {
    pub n: usize,
    pub r: usize,
    pub entries: Vec<LeaderEntry>,
}

impl LeaderReport {
    pub fn minimal_separable(&self) -> BTreeSet<(usize, usize)> {
        self.entries.iter().filter(|e| e.minimal).map(|e| (e.xi, e.i)).collect()
    }

    pub fn inseparable(&self) -> BTreeSet<(usize, usize)> {
        self.entries.iter().filter(|e| e.tag == LeaderTag::Inseparable).map(|e| (e.xi, e.i)).collect()
    }

    pub fn get(&self, xi: usize, i: usize) -> Option<&LeaderEntry> {
        self.entries.iter().find(|e| e.xi == xi && e.i == i)
    }
}

/// Minimality in the linear order on rows: a separable slot is minimal when
/// no separable slot sits above it in the same column. `cells` lists
/// `(row, column, tag)`.
pub fn linear_minimal(cells: &[(usize, usize, LeaderTag)]) -> Vec<bool> {
    cells
        .iter()
        .map(|&(row, col, tag)| {
            tag == LeaderTag::Separable
                && !cells.iter().any(|&(r2, c2, t2)| c2 == col && r2 < row && t2 == LeaderTag::Separable)
        })
        .collect()
}

pub fn classify_leaders(k: &DiffKernel) -> LeaderReport {
    let p = &k.pres;
    let cells: Vec<_> = (0..p.len()).map(|s| (s / k.n, s % k.n, p.tag(s))).collect();
    let minimal = linear_minimal(&cells);
    let entries = cells
        .iter()
        .zip(minimal)
        .enumerate()
        .map(|(s, (&(xi, col, tag), minimal))| LeaderEntry { name: p.name(s).to_string(), xi, i: col + 1, tag, minimal })
        .collect();
    LeaderReport { n: k.n, r: k.r(), entries }
}

/// Extends `k` by `steps` rows. A non-leader above gets a fresh
/// transcendental; a separable leader above forces the element
/// `−f^δ(a)/f'(a)` of the field generated so far.
pub fn kernel_prolong(k: &DiffKernel, steps: usize) -> Result<DiffKernel, KernelError> {
    let r = k.r();
    for s in 0..k.pres.len() {
        if k.pres.tag(s) == LeaderTag::Inseparable && s / k.n >= r {
            return Err(KernelError::InseparableLeaderTooHigh {
                name: k.pres.name(s).to_string(),
                xi: s / k.n,
                i: s % k.n + 1,
                r,
            });
        }
    }
    let (pres, _) = prolong_rows(&k.shift, &k.pres, steps, &mut |i, xi| slot_name(i, xi))?;
    kernel_verify(&k.delta, k.n, pres)
}

/// The prolongation loop on any row layout; `name(col + 1, row)` names new
/// slots. Returns the extended presentation and its row-shift derivation.
pub fn prolong_rows(
    shift: &Derivation,
    pres: &Presentation,
    steps: usize,
    name: &mut dyn FnMut(usize, usize) -> String,
) -> Result<(Presentation, Derivation), KernelError> {
    let cols = pres.cols();
    let mut pres = pres.clone();
    let mut work = shift.clone();
    for _ in 0..steps {
        let top = pres.rows() - 1;
        for col in 0..cols {
            let src = pres.slot(top, col);
            let kind = match pres.tag(src) {
                LeaderTag::NonLeader => SlotKind::Transcendental,
                LeaderTag::Separable => {
                    let f = pres.tower().minpoly(pres.var(src)).expect("separable slots carry a relation").clone();
                    SlotKind::Element(work.forced_value(&f, &pres.value(src))?)
                }
                LeaderTag::Inseparable => {
                    return Err(KernelError::InseparableLeaderTooHigh {
                        name: pres.name(src).to_string(),
                        xi: top,
                        i: col + 1,
                        r: top,
                    })
                }
            };
            pres = pres.push(&name(col + 1, top + 1), kind)?;
            work = work.push(&pres.tower_upto(src + 1), pres.tower(), pres.value(pres.len() - 1))?;
        }
    }
    Ok((pres, work))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnProbe {
    pub i: usize,
    /// Row of the first separable leader in this column.
    pub first_separable: Option<usize>,
    /// Every slot below it is a separable leader, and every prolonged one
    /// is an element of the field generated before it.
    pub stable: bool,
    pub elements_above: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub depth: usize,
    pub columns: Vec<ColumnProbe>,
    /// Inseparable leaders in `L_ξ` for `ξ = 0..=depth`.
    pub inseparable_by_row: Vec<usize>,
    pub minimal_separable: usize,
}

/// Prolongs to length `depth` and reports what the columns look like.
pub fn finiteness_probe(k: &DiffKernel, depth: usize) -> Result<(DiffKernel, ProbeReport), KernelError> {
    let full = if depth > k.r() { kernel_prolong(k, depth - k.r())? } else { k.clone() };
    let rep = classify_leaders(&full);
    let p = full.presentation();
    let mut columns = Vec::new();
    for col in 0..k.n {
        let first = (0..=full.r()).find(|&xi| p.tag(p.slot(xi, col)) == LeaderTag::Separable);
        let (stable, elements_above) = match first {
            None => (true, 0),
            Some(f) => {
                let above: Vec<usize> = (f + 1..=full.r()).map(|xi| p.slot(xi, col)).collect();
                let sep = above.iter().all(|&s| p.tag(s) == LeaderTag::Separable);
                let prolonged = above.iter().filter(|&&s| s / k.n > k.r());
                let elems = prolonged.clone().all(|&s| matches!(p.kind(s), SlotKind::Element(_)));
                let count = above.iter().filter(|&&s| matches!(p.kind(s), SlotKind::Element(_))).count();
                (sep && elems, count)
            }
        };
        columns.push(ColumnProbe { i: col + 1, first_separable: first, stable, elements_above });
    }
    let inseparable_by_row = (0..=full.r())
        .map(|xi| rep.entries.iter().filter(|e| e.xi <= xi && e.tag == LeaderTag::Inseparable).count())
        .collect();
    let report = ProbeReport {
        depth: full.r(),
        columns,
        inseparable_by_row,
        minimal_separable: rep.minimal_separable().len(),
    };
    Ok((full, report))
}

#[cfg(test)]
mod tests;
