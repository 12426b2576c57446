//! Two extension constructions for fields carrying commuting `δ` and `σ`:
//! adjoining a σ-preimage of an element together with its δ-derivatives,
//! and adjoining p-th roots of constants with a truncated tower of
//! derivatives.

use std::fmt;
use std::sync::Arc;

use crate::ops::{commutation_check, CommutationReport, Derivation, Endomorphism, OpError};
use crate::tower::{Element, GenSpec, MinPoly, Tower, TowerError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstructionError {
    #[error("plan step {n} is inconsistent: {reason}")]
    PlanInconsistent { n: usize, reason: String },
    #[error("plan constant {i} is not a constant: its derivative is {derivative}")]
    NotAConstant { i: usize, derivative: String },
    #[error("σ of plan constant {i} has no p-th root in the extension: {value}")]
    PRootMissing { i: usize, value: String },
    #[error("the input operators do not commute at {0}")]
    NotCommuting(String),
    #[error("malformed plan: {0}")]
    Shape(String),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Builds the minimal polynomial of a new generator over the tower
/// generated so far.
pub type MinPolyFn = Arc<dyn Fn(&Tower) -> Result<MinPoly, TowerError> + Send + Sync>;

#[derive(Clone)]
pub enum PreimageStep {
    Transcendental,
    /// The minimal polynomial of `c_n` over `F(c_0, …, c_{n−1})`.
    Algebraic(MinPolyFn),
}

impl fmt::Debug for PreimageStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PreimageStep::Transcendental => f.write_str("Transcendental"),
            PreimageStep::Algebraic(_) => f.write_str("Algebraic(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PreimagePlan {
    pub b: Element,
    /// The new generators are `c_0, …, c_depth`.
    pub depth: usize,
    pub steps: Vec<PreimageStep>,
    /// An element `a` of the field with `σ(a) = b`, if one is known.
    pub witness: Option<Element>,
}

/// The extended field with its operators. `delta` is defined on everything
/// except the last new generator.
#[derive(Clone, Debug)]
pub struct Extension {
    pub tower: Tower,
    pub delta: Derivation,
    pub sigma: Endomorphism,
    pub generators: Vec<String>,
    pub commutation: CommutationReport,
    /// No generator was needed.
    pub degenerate: bool,
}

fn require_commuting(delta: &Derivation, sigma: &Endomorphism) -> Result<(), ConstructionError> {
    if delta.domain() != delta.codomain() || sigma.domain() != sigma.target() || delta.domain() != sigma.domain() {
        return Err(ConstructionError::Shape("δ and σ must both act on one field".into()));
    }
    let rep = commutation_check(delta, sigma)?;
    match rep.violations.first() {
        Some(v) => Err(ConstructionError::NotCommuting(v.symbol.clone())),
        None => Ok(()),
    }
}

/// Adjoins `c_0, …, c_N` with `σ(c_n) = δ^n(b)` and `δ(c_n) = c_{n+1}`.
pub fn adjoin_sigma_preimage(
    delta: &Derivation,
    sigma: &Endomorphism,
    plan: &PreimagePlan,
) -> Result<Extension, ConstructionError> {
    require_commuting(delta, sigma)?;
    let f = delta.domain();
    f.check(&plan.b)?;
    if let Some(a) = &plan.witness {
        let sa = sigma.apply(a)?;
        if sa != f.normal_form(&plan.b) {
            return Err(ConstructionError::PlanInconsistent {
                n: 0,
                reason: format!("σ({}) = {}, not {}", f.display(a), f.display(&sa), f.display(&plan.b)),
            });
        }
        return Ok(Extension {
            tower: f.clone(),
            delta: delta.clone(),
            sigma: sigma.clone(),
            generators: Vec::new(),
            commutation: commutation_check(delta, sigma)?,
            degenerate: true,
        });
    }
    if plan.steps.len() != plan.depth + 1 {
        return Err(ConstructionError::Shape(format!("{} steps for depth {}", plan.steps.len(), plan.depth)));
    }
    let nf = f.nvars();
    let mut ext = f.clone();
    let mut names = Vec::new();
    for (n, step) in plan.steps.iter().enumerate() {
        let name = format!("c[{n}]");
        let spec = match step {
            PreimageStep::Transcendental => GenSpec::transcendental(&name),
            PreimageStep::Algebraic(g) => GenSpec::algebraic(&name, g(&ext)?),
        };
        ext = ext.extend(spec).map_err(|e| ConstructionError::PlanInconsistent { n, reason: e.to_string() })?;
        names.push(name);
    }
    let mut derivs = vec![f.normal_form(&plan.b)];
    for _ in 0..plan.depth {
        let next = delta.apply(derivs.last().unwrap())?;
        derivs.push(next);
    }
    let mut s_images = sigma.images().to_vec();
    s_images.extend(derivs);
    let sigma2 = Endomorphism::unchecked(&ext, &ext, s_images)?;
    if let Some(v) = sigma2.violations()?.into_iter().next() {
        let n = v.var.checked_sub(nf).unwrap_or(0);
        return Err(ConstructionError::PlanInconsistent { n, reason: v.describe(&ext) });
    }
    let mut d_images = delta.images().to_vec();
    d_images.extend((1..=plan.depth).map(|n| ext.var(nf + n)));
    let delta2 = Derivation::unchecked(&ext.prefix(nf + plan.depth), &ext, d_images)?;
    if let Some(v) = delta2.violations()?.into_iter().next() {
        let n = v.var.checked_sub(nf).unwrap_or(0);
        return Err(ConstructionError::PlanInconsistent { n, reason: v.describe(&ext) });
    }
    let commutation = commutation_check(&delta2, &sigma2)?;
    if let Some(v) = commutation.violations.first() {
        return Err(ConstructionError::PlanInconsistent {
            n: v.var.saturating_sub(nf),
            reason: format!("δσ and σδ differ at {}", v.symbol),
        });
    }
    Ok(Extension { tower: ext, delta: delta2, sigma: sigma2, generators: names, commutation, degenerate: false })
}

/// Adjoins `x_{i,0} = c_i^{1/p}` and transcendentals `x_{i,j}`, `1 ≤ j ≤ J`,
/// with `δ(x_{i,j}) = x_{i,j+1}` and `σ(x_{i,j}) = δ^j(σ(c_i)^{1/p})`.
pub fn diffperfect_truncated(
    delta: &Derivation,
    sigma: &Endomorphism,
    constants: &[Element],
    depth: usize,
) -> Result<Extension, ConstructionError> {
    require_commuting(delta, sigma)?;
    let l = delta.domain();
    let p = l.characteristic();
    if p == 0 {
        return Err(TowerError::UnsupportedTower("p-th roots need characteristic p".into()).into());
    }
    let k = constants.len();
    for (i, c) in constants.iter().enumerate() {
        let dc = delta.apply(c)?;
        if !dc.is_zero() {
            return Err(ConstructionError::NotAConstant { i: i + 1, derivative: l.display(&dc) });
        }
    }
    let nl = l.nvars();
    let mut ext = l.clone();
    let mut names = Vec::new();
    for j in 0..=depth {
        for (i, c) in constants.iter().enumerate() {
            let name = format!("x[{}][{j}]", i + 1);
            let spec = if j == 0 {
                let mut lower = vec![ext.zero(); p as usize];
                lower[0] = c.neg();
                GenSpec::algebraic(&name, MinPoly::monic(lower, ext.field()))
            } else {
                GenSpec::transcendental(&name)
            };
            ext = ext.extend(spec)?;
            names.push(name);
        }
    }
    let var = |i: usize, j: usize| nl + j * k + i;
    let mut d_images = delta.images().to_vec();
    d_images.extend((0..depth * k).map(|q| ext.var(nl + k + q)));
    let delta2 = Derivation::unchecked(&ext.prefix(nl + depth * k), &ext, d_images)?;
    if let Some(v) = delta2.violations()?.into_iter().next() {
        return Err(ConstructionError::PlanInconsistent { n: v.var.saturating_sub(nl), reason: v.describe(&ext) });
    }
    let mut roots = Vec::with_capacity(k);
    for (i, c) in constants.iter().enumerate() {
        let sc = sigma.apply(c)?;
        match ext.is_pth_power(&sc)? {
            Some(y) => roots.push(y),
            None => return Err(ConstructionError::PRootMissing { i: i + 1, value: l.display(&sc) }),
        }
    }
    let mut s_images: Vec<Element> = sigma.images().to_vec();
    s_images.resize(ext.nvars(), ext.zero());
    for (i, y) in roots.iter().enumerate() {
        let mut cur = y.clone();
        for j in 0..=depth {
            s_images[var(i, j)] = cur.clone();
            if j < depth {
                cur = delta2.apply(&cur)?;
            }
        }
    }
    let sigma2 = Endomorphism::unchecked(&ext, &ext, s_images)?;
    if let Some(v) = sigma2.violations()?.into_iter().next() {
        return Err(ConstructionError::PlanInconsistent { n: v.var.saturating_sub(nl), reason: v.describe(&ext) });
    }
    let commutation = commutation_check(&delta2, &sigma2)?;
    if let Some(v) = commutation.violations.first() {
        return Err(ConstructionError::PlanInconsistent {
            n: v.var.saturating_sub(nl),
            reason: format!("δσ and σδ differ at {}", v.symbol),
        });
    }
    Ok(Extension { tower: ext, delta: delta2, sigma: sigma2, generators: names, commutation, degenerate: false })
}
