//! Leaders of difference kernels: presentations on `Γ(r)` whose row shift
//! extends a base endomorphism, and the `L_n` bound on minimal separable
//! leaders that holds when `L/K` is separable.

use serde::Serialize;

use super::DDError;
use crate::kernel::{linear_minimal, LeaderEntry, LeaderTag, Presentation, SlotKind};
use crate::ops::Endomorphism;

/// A candidate difference kernel: slot `(ξ, i)` should be `σ^ξ(a_i)`.
#[derive(Clone, Debug)]
pub struct DifferencePresentation {
    pub sigma: Endomorphism,
    pub n: usize,
    pub pres: Presentation,
    /// What the document claims about `L/K`, if anything.
    pub asserted_separable: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferenceReport {
    pub n: usize,
    pub r: usize,
    pub entries: Vec<LeaderEntry>,
    /// Failures of the row shift as an endomorphism.
    pub sigma_violations: Vec<String>,
    /// Every depth-1 slot is a leader, i.e. `σ(a)` is algebraic over `K(a)`.
    pub algebraic_step: bool,
    /// A slot `x^p − c` with `c ∈ K` not a p-th power in `K`.
    pub inseparability_witness: Option<String>,
    pub max_minimal_depth: Option<usize>,
    /// Every minimal separable leader has depth at most `n`.
    pub bound_ok: bool,
    pub bound_tight: bool,
    pub transcendental: usize,
    pub asserted_separable: Option<bool>,
}

impl DifferenceReport {
    /// A separability claim together with a violated bound.
    pub fn contradiction(&self) -> bool {
        self.asserted_separable == Some(true) && !self.bound_ok
    }
}

pub fn difference_leader_classify(d: &DifferencePresentation) -> Result<DifferenceReport, DDError> {
    let p = &d.pres;
    let n = d.n;
    if p.cols() != n || p.is_empty() || p.len() % n != 0 {
        return Err(DDError::Shape(format!("expected complete rows of {n} slots")));
    }
    if d.sigma.domain() != p.base() || d.sigma.target() != p.base() {
        return Err(DDError::Shape("the endomorphism must act on the base tower".into()));
    }
    let rows = p.rows();
    let sigma_violations = if rows > 1 {
        let mut images = d.sigma.images().to_vec();
        images.extend((0..p.len() - n).map(|k| p.value(k + n)));
        let shift = Endomorphism::unchecked(&p.tower_upto(p.len() - n), p.tower(), images)?;
        shift.violations()?.iter().map(|v| v.describe(p.tower())).collect()
    } else {
        Vec::new()
    };
    let cells: Vec<_> = (0..p.len()).map(|k| (k / n, k % n, p.tag(k))).collect();
    let minimal = linear_minimal(&cells);
    let entries: Vec<LeaderEntry> = cells
        .iter()
        .zip(&minimal)
        .enumerate()
        .map(|(k, (&(xi, c, tag), &minimal))| LeaderEntry { name: p.name(k).to_string(), xi, i: c + 1, tag, minimal })
        .collect();
    let algebraic_step = rows > 1 && (n..2 * n).all(|k| p.tag(k) != LeaderTag::NonLeader);
    let base = p.base();
    let char_p = base.characteristic() as usize;
    let mut witness = None;
    if char_p != 0 {
        for k in 0..p.len() {
            let SlotKind::Algebraic(f) = p.kind(k) else { continue };
            let cs = f.coeffs();
            let pure = f.degree() == char_p && cs[1..char_p].iter().all(|c| c.is_zero());
            let c = cs[0].neg();
            if !pure || c.max_var().map_or(false, |v| v >= base.nvars()) {
                continue;
            }
            if let Ok(None) = base.is_pth_power(&c) {
                witness = Some(format!("{} is a p-th root of {} ∉ K^p", p.name(k), base.display(&c)));
                break;
            }
        }
    }
    let max_minimal_depth = entries.iter().filter(|e| e.minimal).map(|e| e.xi).max();
    let bound_ok = max_minimal_depth.map_or(true, |m| m <= n);
    Ok(DifferenceReport {
        n,
        r: rows - 1,
        sigma_violations,
        algebraic_step,
        inseparability_witness: witness,
        max_minimal_depth,
        bound_ok,
        bound_tight: max_minimal_depth == Some(n),
        transcendental: entries.iter().filter(|e| e.tag == LeaderTag::NonLeader).count(),
        asserted_separable: d.asserted_separable,
        entries,
    })
}
