//! Turns a parsed document into towers, operators, kernels and plans.
//! Operators are built unchecked so commands can report their violations.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;

use super::ast::*;
use super::{parse_document, parse_expr, DslError};
use crate::arith::BaseField;
use crate::constructions::{PreimagePlan, PreimageStep};
use crate::dd::{dd_coords, dd_slot_name, dd_verify, Choice, DDError, DDKernel, DifferencePresentation, HypothesisData};
use crate::kernel::{kernel_verify, slot_name, DiffKernel, KernelError, Presentation, SlotKind};
use crate::ops::{Derivation, Endomorphism, OpError};
use crate::tower::{Element, GenSpec, MinPoly, Tower, TowerError, UPoly};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Parse(#[from] DslError),
    #[error("no {kind} named `{name}`")]
    Missing { kind: &'static str, name: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    DD(#[from] DDError),
}

/// A document with its tower and operators built.
#[derive(Clone, Debug)]
pub struct Model {
    pub doc: Document,
    pub tower: Tower,
    pub derivations: BTreeMap<String, Derivation>,
    pub endomorphisms: BTreeMap<String, Endomorphism>,
}

/// The pieces of a dd-kernel block before verification.
#[derive(Clone, Debug)]
pub struct DDParts {
    pub delta: Derivation,
    pub sigma: Endomorphism,
    pub n: usize,
    pub s: usize,
    pub pres: Presentation,
}

pub fn eval(t: &Tower, e: &Expr) -> Result<Element, BuildError> {
    Ok(match e {
        Expr::Int(n) => t.constant(t.field().from_bigint(&BigInt::from(n.clone()))),
        Expr::Sym(s) => t.var_named(s)?,
        Expr::Neg(a) => t.neg(&eval(t, a)?),
        Expr::Pow(a, k) => t.pow(&eval(t, a)?, *k as u64),
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval(t, a)?, eval(t, b)?);
            match op {
                BinOp::Add => t.add(&a, &b),
                BinOp::Sub => t.sub(&a, &b),
                BinOp::Mul => t.mul(&a, &b),
                BinOp::Div => t.div(&a, &b)?,
            }
        }
    })
}

/// `e` as a polynomial in the symbol `x` over `t`.
fn eval_upoly(t: &Tower, e: &Expr, x: &str) -> Result<UPoly, BuildError> {
    let c = |v: Element| UPoly::new(vec![v]);
    Ok(match e {
        Expr::Sym(s) if s == x => UPoly::new(vec![t.zero(), t.one()]),
        Expr::Int(_) | Expr::Sym(_) => c(eval(t, e)?),
        Expr::Neg(a) => t.upoly_sub(&UPoly::zero(), &eval_upoly(t, a, x)?),
        Expr::Pow(a, k) => {
            let a = eval_upoly(t, a, x)?;
            (0..*k).fold(c(t.one()), |acc, _| t.upoly_mul(&acc, &a))
        }
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_upoly(t, a, x)?, eval_upoly(t, b, x)?);
            match op {
                BinOp::Add => t.upoly_add(&a, &b),
                BinOp::Sub => t.upoly_sub(&a, &b),
                BinOp::Mul => t.upoly_mul(&a, &b),
                BinOp::Div => {
                    if b.degree() != 0 || b.is_zero() {
                        return Err(BuildError::Invalid(format!("cannot divide by a polynomial in `{x}`")));
                    }
                    t.upoly_mul(&a, &c(t.inv(&b.coeffs()[0])?))
                }
            }
        }
    })
}

/// The monic minimal polynomial described by `e` in the new symbol `x`.
pub fn minpoly(t: &Tower, e: &Expr, x: &str) -> Result<MinPoly, BuildError> {
    let u = t.upoly_monic(&eval_upoly(t, e, x)?)?;
    if u.degree() == 0 {
        return Err(BuildError::Invalid(format!("the relation for `{x}` has degree 0 in `{x}`")));
    }
    let lower = u.coeffs()[..u.degree()].to_vec();
    Ok(MinPoly::monic(lower, t.field()))
}

fn minpoly_fn(e: &Expr, x: String) -> Arc<dyn Fn(&Tower) -> Result<MinPoly, TowerError> + Send + Sync> {
    let e = e.clone();
    Arc::new(move |t: &Tower| {
        minpoly(t, &e, &x).map_err(|err| match err {
            BuildError::Tower(t) => t,
            other => TowerError::UnsupportedTower(other.to_string()),
        })
    })
}

fn slot_kind(t: &Tower, s: &Slot) -> Result<SlotKind, BuildError> {
    Ok(match &s.decl {
        SlotDecl::Trans => SlotKind::Transcendental,
        SlotDecl::Alg(e) => SlotKind::Algebraic(minpoly(t, e, &s.name)?),
        SlotDecl::Eq(e) => SlotKind::Element(eval(t, e)?),
    })
}

fn presentation(
    base: &Tower,
    cols: usize,
    slots: &[Slot],
    expected: &dyn Fn(usize) -> String,
) -> Result<Presentation, BuildError> {
    if cols == 0 {
        return Err(BuildError::Invalid("a kernel needs at least one column".into()));
    }
    let mut p = Presentation::new(base, cols);
    for (k, s) in slots.iter().enumerate() {
        let want = expected(k);
        if s.name != want {
            return Err(BuildError::Invalid(format!("slot {k} should be `{want}`, found `{}`", s.name)));
        }
        let kind = slot_kind(p.tower(), s)?;
        p = p.push(&s.name, kind)?;
    }
    Ok(p)
}

fn count_check(found: usize, want: usize, what: &str) -> Result<(), BuildError> {
    if found != want {
        return Err(BuildError::Invalid(format!("{what} declares {found} slots, expected {want}")));
    }
    Ok(())
}

impl Model {
    pub fn parse(src: &str) -> Result<Model, BuildError> {
        Model::build(parse_document(src)?)
    }

    pub fn build(doc: Document) -> Result<Model, BuildError> {
        let mut tower: Option<Tower> = None;
        for item in &doc.items {
            match item {
                Item::Field { field, vars } => {
                    let f = match field {
                        FieldSpec::Prime(p) => BaseField::prime(*p).map_err(TowerError::from)?,
                        FieldSpec::Rationals => BaseField::Rationals,
                    };
                    tower = Some(Tower::with_base(f, vars.clone())?);
                }
                Item::Gen { name, decl } => {
                    let t = tower.as_ref().ok_or_else(|| BuildError::Invalid("no field declared".into()))?;
                    let spec = match decl {
                        GenDecl::Trans => GenSpec::transcendental(name),
                        GenDecl::Alg(e) => GenSpec::algebraic(name, minpoly(t, e, name)?),
                    };
                    tower = Some(t.extend(spec)?);
                }
                _ => {}
            }
        }
        let tower = tower.ok_or_else(|| BuildError::Invalid("no field declared".into()))?;
        let mut derivations = BTreeMap::new();
        let mut endomorphisms = BTreeMap::new();
        for item in &doc.items {
            match item {
                Item::Derivation { name, images } => {
                    let mut im = vec![tower.zero(); tower.nvars()];
                    for (s, e) in images {
                        im[tower.index_of(s).ok_or_else(|| TowerError::UnknownSymbol(s.clone()))?] = eval(&tower, e)?;
                    }
                    derivations.insert(name.clone(), Derivation::unchecked(&tower, &tower, im)?);
                }
                Item::Endomorphism { name, images } => {
                    let mut im: Vec<Element> = (0..tower.nvars()).map(|v| tower.var(v)).collect();
                    for (s, e) in images {
                        im[tower.index_of(s).ok_or_else(|| TowerError::UnknownSymbol(s.clone()))?] = eval(&tower, e)?;
                    }
                    endomorphisms.insert(name.clone(), Endomorphism::unchecked(&tower, &tower, im)?);
                }
                _ => {}
            }
        }
        Ok(Model { doc, tower, derivations, endomorphisms })
    }

    pub fn derivation(&self, name: &str) -> Result<&Derivation, BuildError> {
        self.derivations.get(name).ok_or_else(|| BuildError::Missing { kind: "derivation", name: name.into() })
    }

    pub fn endomorphism(&self, name: &str) -> Result<&Endomorphism, BuildError> {
        self.endomorphisms.get(name).ok_or_else(|| BuildError::Missing { kind: "endomorphism", name: name.into() })
    }

    fn find<T>(&self, kind: &'static str, name: Option<&str>, pick: impl Fn(&Item) -> Option<&T>, key: impl Fn(&T) -> &str) -> Result<&T, BuildError> {
        let mut all = self.doc.items.iter().filter_map(pick);
        match name {
            Some(n) => all.find(|b| key(b) == n).ok_or_else(|| BuildError::Missing { kind, name: n.into() }),
            None => all.next().ok_or_else(|| BuildError::Missing { kind, name: "(any)".into() }),
        }
    }

    /// The named block, or the first of its kind when `name` is `None`.
    pub fn kernel_block(&self, name: Option<&str>) -> Result<&KernelBlock, BuildError> {
        self.find("kernel", name, |i| if let Item::Kernel(b) = i { Some(b) } else { None }, |b| &b.name)
    }

    pub fn ddkernel_block(&self, name: Option<&str>) -> Result<&DDKernelBlock, BuildError> {
        self.find("ddkernel", name, |i| if let Item::DDKernel(b) = i { Some(b) } else { None }, |b| &b.name)
    }

    pub fn difference_block(&self, name: Option<&str>) -> Result<&DifferenceBlock, BuildError> {
        self.find("difference", name, |i| if let Item::Difference(b) = i { Some(b) } else { None }, |b| &b.name)
    }

    pub fn hypotheses_block(&self, name: Option<&str>) -> Result<&HypothesesBlock, BuildError> {
        self.find("hypotheses", name, |i| if let Item::Hypotheses(b) = i { Some(b) } else { None }, |b| &b.name)
    }

    pub fn preimage_block(&self, name: Option<&str>) -> Result<&PreimageBlock, BuildError> {
        self.find("preimage", name, |i| if let Item::Preimage(b) = i { Some(b) } else { None }, |b| &b.name)
    }

    pub fn perfect_block(&self, name: Option<&str>) -> Result<&PerfectBlock, BuildError> {
        self.find("perfect", name, |i| if let Item::Perfect(b) = i { Some(b) } else { None }, |b| &b.name)
    }

    /// The unverified presentation of a kernel block with its derivation.
    pub fn kernel_parts(&self, b: &KernelBlock) -> Result<(Derivation, Presentation), BuildError> {
        count_check(b.slots.len(), b.n * (b.r + 1), &b.name)?;
        let n = b.n;
        let pres = presentation(&self.tower, n, &b.slots, &|k| slot_name(k % n.max(1) + 1, k / n.max(1)))?;
        Ok((self.derivation(&b.delta)?.clone(), pres))
    }

    pub fn kernel(&self, name: Option<&str>) -> Result<DiffKernel, BuildError> {
        let b = self.kernel_block(name)?;
        let (d, pres) = self.kernel_parts(b)?;
        Ok(kernel_verify(&d, b.n, pres)?)
    }

    pub fn ddkernel_parts(&self, b: &DDKernelBlock) -> Result<DDParts, BuildError> {
        count_check(b.slots.len(), b.n * (b.s + 1) * (b.r + 1), &b.name)?;
        if b.n == 0 || b.s == 0 {
            return Err(BuildError::Invalid("n and s must be at least 1".into()));
        }
        let (n, s) = (b.n, b.s);
        let pres = presentation(&self.tower, n * (s + 1), &b.slots, &|k| {
            let (xi, u, i) = dd_coords(n, s, k);
            dd_slot_name(i, xi, u)
        })?;
        Ok(DDParts {
            delta: self.derivation(&b.delta)?.clone(),
            sigma: self.endomorphism(&b.sigma)?.clone(),
            n,
            s,
            pres,
        })
    }

    pub fn ddkernel(&self, name: Option<&str>) -> Result<DDKernel, BuildError> {
        let p = self.ddkernel_parts(self.ddkernel_block(name)?)?;
        Ok(dd_verify(&p.delta, &p.sigma, p.n, p.s, p.pres)?)
    }

    pub fn difference(&self, name: Option<&str>) -> Result<DifferencePresentation, BuildError> {
        let b = self.difference_block(name)?;
        count_check(b.slots.len(), b.n * (b.r + 1), &b.name)?;
        let n = b.n.max(1);
        let pres = presentation(&self.tower, n, &b.slots, &|k| slot_name(k % n + 1, k / n))?;
        Ok(DifferencePresentation {
            sigma: self.endomorphism(&b.sigma)?.clone(),
            n: b.n,
            pres,
            asserted_separable: b.separable,
        })
    }

    /// Hypothesis data with enumeration names resolved against `k`.
    pub fn hypotheses(&self, b: &HypothesesBlock, k: &DDKernel) -> Result<HypothesisData, BuildError> {
        let names = k.presentation().names();
        let enumeration = b
            .enumeration
            .iter()
            .map(|s| match names.iter().position(|x| x == s) {
                Some(j) => Ok(k.coords(j)),
                None => Err(BuildError::Invalid(format!("`{s}` is not a slot of `{}`", b.kernel))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HypothesisData { m: b.m, i_set: b.i_set.iter().copied().collect(), enumeration, t: b.t, d: b.d })
    }

    /// Every choice declared for the named dd-kernel; later blocks win.
    pub fn choices(&self, kernel: &str) -> BTreeMap<String, Choice> {
        let mut out = BTreeMap::new();
        for item in &self.doc.items {
            let Item::Choices(c) = item else { continue };
            if c.kernel != kernel {
                continue;
            }
            for (slot, d) in &c.entries {
                let choice = match d {
                    ChoiceDecl::Generic => Choice::Generic,
                    ChoiceDecl::Value(e) => {
                        let e = e.clone();
                        Choice::Value(Arc::new(move |t: &Tower| {
                            eval(t, &e).map_err(|err| match err {
                                BuildError::Tower(t) => t,
                                other => TowerError::UnsupportedTower(other.to_string()),
                            })
                        }))
                    }
                };
                out.insert(slot.clone(), choice);
            }
        }
        out
    }

    pub fn preimage(&self, b: &PreimageBlock) -> Result<(Derivation, Endomorphism, PreimagePlan), BuildError> {
        let steps = b
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| match s {
                GenDecl::Trans => PreimageStep::Transcendental,
                GenDecl::Alg(e) => PreimageStep::Algebraic(minpoly_fn(e, format!("c[{k}]"))),
            })
            .collect();
        let plan = PreimagePlan {
            b: eval(&self.tower, &b.b)?,
            depth: b.depth,
            steps,
            witness: b.witness.as_ref().map(|w| eval(&self.tower, w)).transpose()?,
        };
        Ok((self.derivation(&b.delta)?.clone(), self.endomorphism(&b.sigma)?.clone(), plan))
    }

    pub fn perfect(&self, b: &PerfectBlock) -> Result<(Derivation, Endomorphism, Vec<Element>), BuildError> {
        let cs = b.constants.iter().map(|c| eval(&self.tower, c)).collect::<Result<Vec<_>, _>>()?;
        Ok((self.derivation(&b.delta)?.clone(), self.endomorphism(&b.sigma)?.clone(), cs))
    }
}

fn element_expr(t: &Tower, e: &Element) -> Expr {
    parse_expr(&t.display(e)).expect("displayed elements parse")
}

fn emit_slots(p: &Presentation) -> Vec<Slot> {
    let t = p.tower();
    (0..p.len())
        .map(|j| {
            let decl = match p.kind(j) {
                SlotKind::Transcendental => SlotDecl::Trans,
                SlotKind::Element(e) => SlotDecl::Eq(element_expr(t, e)),
                SlotKind::Algebraic(f) => {
                    SlotDecl::Alg(parse_expr(&t.display_upoly(&f.as_upoly(), p.var(j))).expect("displayed polynomials parse"))
                }
            };
            Slot { name: p.name(j).to_string(), decl }
        })
        .collect()
}

/// A differential kernel written back as a block over the named derivation.
pub fn emit_kernel(k: &DiffKernel, name: &str, delta: &str) -> KernelBlock {
    KernelBlock { name: name.into(), n: k.n(), r: k.r(), delta: delta.into(), slots: emit_slots(k.presentation()) }
}

/// A dd-kernel written back as a block over the named operators.
pub fn emit_ddkernel(k: &DDKernel, name: &str, delta: &str, sigma: &str) -> DDKernelBlock {
    let slots = emit_slots(k.presentation());
    DDKernelBlock { name: name.into(), n: k.n(), r: k.r(), s: k.s(), delta: delta.into(), sigma: sigma.into(), slots }
}
