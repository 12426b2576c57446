//! Seeded random instances shared by the unit, integration and acceptance
//! tests. The seed comes from `KOLCHIN_SEED` when set.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{BaseField, MPoly, Monomial};
use crate::kernel::{kernel_verify, slot_name, DiffKernel, LeaderTag, Presentation, SlotKind};
use crate::dd::{dd_classify, dd_hypothesis_check, dd_slot_name, dd_verify, DDKernel, HypothesisData};
use crate::dsl::ast::*;
use crate::ops::{Derivation, Endomorphism};
use crate::tower::{Element, MinPoly, Tower};

pub const DEFAULT_SEED: u64 = 0x6b6f_6c63_6869_6e;

pub fn seed() -> u64 {
    std::env::var("KOLCHIN_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// A generator seeded from `KOLCHIN_SEED`, offset by `stream` so that
/// independent suites do not share draws.
pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A sparse polynomial in the listed variables.
pub fn poly(r: &mut impl Rng, field: BaseField, vars: &[usize], terms: usize, max_deg: u32) -> MPoly {
    let mut out = MPoly::zero(field);
    for _ in 0..terms {
        let mut m = Monomial::one();
        for &v in vars {
            let e = r.gen_range(0..=max_deg);
            if e > 0 {
                m = m.mul(&Monomial::var_pow(v, e));
            }
        }
        let c = r.gen_range(-3i64..=3);
        out = &out + &MPoly::term(m, field.from_i64(c));
    }
    out
}

/// A random element of `t`: numerator over all variables, denominator over
/// the transcendental ones.
pub fn element(r: &mut impl Rng, t: &Tower, terms: usize) -> Element {
    let all: Vec<usize> = (0..t.nvars()).collect();
    let trans: Vec<usize> = all.iter().copied().filter(|&v| !t.is_algebraic_var(v)).collect();
    let num = poly(r, t.field(), &all, terms, 2);
    let den = if r.gen_bool(0.5) || trans.is_empty() {
        MPoly::one(t.field())
    } else {
        let d = poly(r, t.field(), &trans, 2, 1);
        if d.is_zero() {
            MPoly::one(t.field())
        } else {
            d
        }
    };
    t.from_parts(num, den).expect("nonzero denominator")
}

/// A nonzero random element.
pub fn nonzero_element(r: &mut impl Rng, t: &Tower, terms: usize) -> Element {
    loop {
        let e = element(r, t, terms);
        if !e.is_zero() {
            return e;
        }
    }
}

/// One of `F_2`, `F_3` or the rationals.
pub fn small_field(r: &mut impl Rng) -> BaseField {
    match r.gen_range(0..3) {
        0 => BaseField::prime(2).unwrap(),
        1 => BaseField::prime(3).unwrap(),
        _ => BaseField::Rationals,
    }
}

/// `x^d − c` over `t`.
pub fn binomial(t: &Tower, d: usize, c: &Element) -> MinPoly {
    let mut lower = vec![t.zero(); d];
    lower[0] = c.neg();
    MinPoly::monic(lower, t.field())
}

/// A random valid differential kernel over `k(t)` with width at most 2 and
/// length at most 2. Row 0 mixes transcendental, element, separable and (in
/// characteristic p with `δt = 0`) inseparable slots; later rows follow the
/// extension rule with random free choices.
pub fn random_kernel(r: &mut impl Rng) -> DiffKernel {
    let field = small_field(r);
    let base = Tower::new(field, &["t"]).unwrap();
    let dt = if r.gen_bool(0.5) { base.one() } else { base.zero() };
    let delta = Derivation::define(&base, vec![dt.clone()]).unwrap();
    let n = r.gen_range(1..=2);
    let len = r.gen_range(1..=2);
    let p = field.characteristic();
    let mut pres = Presentation::new(&base, n);
    // Each radicand is used once so that the presented polynomials stay irreducible.
    let mut used = Vec::new();
    for col in 0..n {
        let t = pres.tower().clone();
        let trans: Vec<usize> =
            (0..pres.len()).filter(|&k| pres.tag(k) == LeaderTag::NonLeader && !used.contains(&k)).collect();
        let choice = r.gen_range(0..10);
        let kind = if choice < 5 {
            SlotKind::Transcendental
        } else if choice < 7 {
            SlotKind::Element(element(r, &t, 2))
        } else if p != 0 && dt.is_zero() && !used.contains(&usize::MAX) {
            used.push(usize::MAX);
            SlotKind::Algebraic(binomial(&t, p as usize, &t.var(0)))
        } else if p != 2 && !trans.is_empty() {
            let k = trans[r.gen_range(0..trans.len())];
            used.push(k);
            SlotKind::Algebraic(binomial(&t, 2, &t.var(pres.var(k))))
        } else {
            SlotKind::Transcendental
        };
        pres = pres.push(&slot_name(col + 1, 0), kind).unwrap();
    }
    let mut work = Derivation::unchecked(&base, pres.tower(), delta.images().to_vec()).unwrap();
    for xi in 1..=len {
        for col in 0..n {
            let src = pres.slot(xi - 1, col);
            let kind = match pres.tag(src) {
                LeaderTag::Separable => {
                    let f = pres.tower().minpoly(pres.var(src)).unwrap().clone();
                    SlotKind::Element(work.forced_value(&f, &pres.value(src)).unwrap())
                }
                _ if r.gen_bool(0.7) => SlotKind::Transcendental,
                _ => SlotKind::Element(element(r, pres.tower(), 2)),
            };
            pres = pres.push(&slot_name(col + 1, xi), kind).unwrap();
            let image = pres.value(pres.len() - 1);
            work = work.push(&pres.tower_upto(src + 1), pres.tower(), image).unwrap();
        }
    }
    kernel_verify(&delta, n, pres).expect("generated kernels are valid")
}

/// A random valid dd-kernel over `k(t)` with `s = 1`, width at most 2 and
/// leaders in rows 0 and 1, together with the smallest `M` covering them.
/// Rows are long enough for δ-prolongation.
pub fn random_dd(r: &mut impl Rng) -> (DDKernel, usize) {
    loop {
        if let Some(found) = try_random_dd(r) {
            return found;
        }
    }
}

fn transport_root(kind: SlotKind, t: &Tower) -> SlotKind {
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

/// Candidates whose slot values outgrow this are discarded.
const MAX_DD_TERMS: usize = 40;

fn try_random_dd(r: &mut impl Rng) -> Option<(DDKernel, usize)> {
    let field = small_field(r);
    let p = field.characteristic();
    let base = Tower::new(field, &["t"]).unwrap();
    let t = base.var(0);
    let dt = if r.gen_bool(0.5) { base.one() } else { base.zero() };
    let st = match r.gen_range(0..3) {
        0 => t.clone(),
        1 => base.add(&t, &base.one()),
        _ if p != 0 && dt.is_zero() => base.pow(&t, p),
        _ => t.clone(),
    };
    let delta = Derivation::define(&base, vec![dt.clone()]).ok()?;
    let sigma = Endomorphism::define(&base, vec![st]).ok()?;
    let n = r.gen_range(1..=2);
    let rows = (n + 1) * 2 + 1;
    let cols = 2 * n;
    let nb = base.nvars();
    let mut pres = Presentation::new(&base, cols);
    let mut work = Derivation::unchecked(&base, &base, delta.images().to_vec()).ok()?;
    let mut used_insep = false;
    for xi in 0..rows {
        for u in 0..2 {
            for i in 1..=n {
                let tw = pres.tower().clone();
                let len = pres.len();
                let here = xi * cols + u * n + (i - 1);
                let transport = |pres: &Presentation| -> Option<SlotKind> {
                    let mut sig = |v: usize| -> Option<Element> {
                        if v < nb {
                            return Some(sigma.image(v).clone());
                        }
                        let k = v - nb;
                        let (x2, u2, c2) = (k / cols, (k % cols) / n, k % n);
                        let j = x2 * cols + n + c2;
                        (u2 == 0 && j < len).then(|| tw.var(nb + j))
                    };
                    let kind = crate::dd::transport(pres.kind(here - n), &tw, &mut sig).ok()??;
                    Some(transport_root(kind, &tw))
                };
                let kind = if xi == 0 && u == 0 {
                    match r.gen_range(0..10) {
                        0..=4 => SlotKind::Transcendental,
                        5..=7 => SlotKind::Element(nonzero_element(r, &tw, 2)),
                        _ if p != 0 && dt.is_zero() && !used_insep => {
                            used_insep = true;
                            SlotKind::Algebraic(binomial(&tw, p as usize, &t))
                        }
                        _ => SlotKind::Transcendental,
                    }
                } else if xi == 0 {
                    let left = pres.value(here - n);
                    match pres.kind(here - n) {
                        SlotKind::Transcendental => match r.gen_range(0..4) {
                            0 | 1 => SlotKind::Transcendental,
                            2 => SlotKind::Element(left),
                            _ => SlotKind::Element(tw.add(&left, &tw.one())),
                        },
                        _ => transport(&pres)?,
                    }
                } else {
                    let prev = here - cols;
                    match pres.tag(prev) {
                        LeaderTag::Separable => {
                            let f = tw.minpoly(pres.var(prev)).unwrap().clone();
                            SlotKind::Element(work.forced_value(&f, &pres.value(prev)).ok()?)
                        }
                        _ if u == 1 => transport(&pres)?,
                        _ if xi == 1 && r.gen_bool(0.3) => SlotKind::Element(element(r, &tw, 2)),
                        _ => SlotKind::Transcendental,
                    }
                };
                pres = pres.push(&dd_slot_name(i, xi, u), kind).ok()?;
                let k = pres.len() - 1;
                let v = pres.value(k);
                if v.num().len() + v.den().len() > MAX_DD_TERMS {
                    return None;
                }
                work = if k >= cols {
                    work.push(&pres.tower_upto(k - cols + 1), pres.tower(), pres.value(k)).ok()?
                } else {
                    work.widen(pres.tower()).ok()?
                };
            }
        }
    }
    let k = dd_verify(&delta, &sigma, n, 1, pres).ok()?;
    let rep = dd_classify(&k);
    let m = rep
        .minimal_separable()
        .into_iter()
        .chain(rep.inseparable())
        .chain(rep.a_minimal_separable())
        .chain(rep.a_inseparable())
        .map(|c| c.0)
        .max()
        .unwrap_or(0);
    (m <= 1 && k.r() >= (n + 1) * (m + 1)).then_some((k, m))
}

/// The first hypothesis data (by brute force over `I`, enumerations, `t`
/// and `d`) that passes every check, for small kernels.
pub fn find_hypotheses(k: &DDKernel, m: usize) -> Option<HypothesisData> {
    let n = k.n();
    let cells: Vec<(usize, usize)> = (0..=m).flat_map(|xi| (1..=n).map(move |i| (xi, i))).collect();
    for mask in 0..1usize << cells.len() {
        let i_set: BTreeSet<(usize, usize)> =
            cells.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &c)| c).collect();
        let xs: Vec<(usize, usize, usize)> = cells
            .iter()
            .filter(|c| !i_set.contains(c))
            .flat_map(|&(xi, i)| (0..k.s()).map(move |u| (xi, u, i)))
            .collect();
        if xs.len() > 4 {
            continue;
        }
        for perm in permutations(&xs) {
            for d in 0..=perm.len() {
                for t in 0..=d {
                    let h = HypothesisData { m, i_set: i_set.clone(), enumeration: perm.clone(), t, d };
                    if dd_hypothesis_check(k, &h).map(|r| r.ok()).unwrap_or(false) {
                        return Some(h);
                    }
                }
            }
        }
    }
    None
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for j in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(j);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

fn random_expr(r: &mut impl Rng, pool: &[String], depth: usize) -> Expr {
    if depth == 0 || r.gen_bool(0.35) {
        return if pool.is_empty() || r.gen_bool(0.3) {
            Expr::int(r.gen_range(0..12))
        } else {
            Expr::sym(pool[r.gen_range(0..pool.len())].clone())
        };
    }
    match r.gen_range(0..6) {
        0 => Expr::Neg(Box::new(random_expr(r, pool, depth - 1))),
        1 => Expr::Pow(Box::new(random_expr(r, pool, depth - 1)), r.gen_range(1..4)),
        k => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][k - 2];
            Expr::bin(op, random_expr(r, pool, depth - 1), random_expr(r, pool, depth - 1))
        }
    }
}

fn random_slots(r: &mut impl Rng, pool: &[String], names: Vec<String>) -> Vec<Slot> {
    let mut known = pool.to_vec();
    let mut out = Vec::new();
    for name in names {
        let decl = match r.gen_range(0..3) {
            0 => SlotDecl::Trans,
            1 => {
                let mut own = known.clone();
                own.push(name.clone());
                SlotDecl::Alg(random_expr(r, &own, 3))
            }
            _ => SlotDecl::Eq(random_expr(r, &known, 3)),
        };
        known.push(name.clone());
        out.push(Slot { name, decl });
    }
    out
}

/// A syntactically valid document exercising every block kind. It resolves
/// but need not build: relations may be reducible or non-monic.
pub fn random_document(r: &mut impl Rng) -> Document {
    let field = match r.gen_range(0..4) {
        0 => FieldSpec::Rationals,
        k => FieldSpec::Prime([2, 3, 5][k - 1]),
    };
    let vars: Vec<String> = ["t", "u"][..r.gen_range(0..=2)].iter().map(|s| s.to_string()).collect();
    let mut pool = vars.clone();
    let mut items = vec![Item::Field { field, vars }];
    for g in 0..r.gen_range(0..3) {
        let name = format!("g{g}");
        let decl = if r.gen_bool(0.5) {
            GenDecl::Trans
        } else {
            let mut own = pool.clone();
            own.push(name.clone());
            GenDecl::Alg(random_expr(r, &own, 3))
        };
        pool.push(name.clone());
        items.push(Item::Gen { name, decl });
    }
    let images = |r: &mut _, pool: &[String]| -> Vec<(String, Expr)> {
        let mut out = Vec::new();
        for s in pool {
            if Rng::gen_bool(r, 0.7) {
                out.push((s.clone(), random_expr(r, pool, 3)));
            }
        }
        out
    };
    items.push(Item::Derivation { name: "d".into(), images: images(r, &pool) });
    items.push(Item::Endomorphism { name: "s".into(), images: images(r, &pool) });
    let (n, kr) = (r.gen_range(1..3), r.gen_range(0..3));
    let names = (0..n * (kr + 1)).map(|k| slot_name(k % n + 1, k / n)).collect();
    items.push(Item::Kernel(KernelBlock { name: "K".into(), n, r: kr, delta: "d".into(), slots: random_slots(r, &pool, names) }));
    let (n, dr, s) = (r.gen_range(1..3), r.gen_range(0..2), r.gen_range(1..3));
    let names: Vec<String> = (0..n * (s + 1) * (dr + 1))
        .map(|k| {
            let (xi, u, i) = crate::dd::dd_coords(n, s, k);
            dd_slot_name(i, xi, u)
        })
        .collect();
    let en = names.iter().filter(|_| r.gen_bool(0.4)).cloned().collect();
    let chosen = names[r.gen_range(0..names.len())].clone();
    items.push(Item::DDKernel(DDKernelBlock {
        name: "D".into(),
        n,
        r: dr,
        s,
        delta: "d".into(),
        sigma: "s".into(),
        slots: random_slots(r, &pool, names),
    }));
    let sep = [None, Some(true), Some(false)][r.gen_range(0..3)];
    let names = (0..n * 2).map(|k| slot_name(k % n + 1, k / n)).collect();
    items.push(Item::Difference(DifferenceBlock {
        name: "E".into(),
        n,
        r: 1,
        sigma: "s".into(),
        separable: sep,
        slots: random_slots(r, &pool, names),
    }));
    items.push(Item::Hypotheses(HypothesesBlock {
        name: "H".into(),
        kernel: "D".into(),
        m: r.gen_range(0..3),
        i_set: (0..r.gen_range(0..3)).map(|_| (r.gen_range(0..2), r.gen_range(1..3))).collect(),
        enumeration: en,
        t: r.gen_range(0..3),
        d: r.gen_range(0..3),
    }));
    let mut slot_pool = pool.clone();
    slot_pool.push(chosen.clone());
    let choice = if r.gen_bool(0.5) { ChoiceDecl::Generic } else { ChoiceDecl::Value(random_expr(r, &slot_pool, 2)) };
    items.push(Item::Choices(ChoicesBlock { kernel: "D".into(), entries: vec![(chosen, choice)] }));
    let depth = r.gen_range(0..3);
    let steps = (0..r.gen_range(0..=depth + 1))
        .map(|k| {
            if r.gen_bool(0.5) {
                GenDecl::Trans
            } else {
                let mut own = pool.clone();
                own.extend((0..=k).map(|j| format!("c[{j}]")));
                GenDecl::Alg(random_expr(r, &own, 2))
            }
        })
        .collect();
    let witness = if r.gen_bool(0.5) { Some(random_expr(r, &pool, 2)) } else { None };
    items.push(Item::Preimage(PreimageBlock {
        name: "P".into(),
        delta: "d".into(),
        sigma: "s".into(),
        b: random_expr(r, &pool, 3),
        depth,
        steps,
        witness,
    }));
    items.push(Item::Perfect(PerfectBlock {
        name: "Q".into(),
        delta: "d".into(),
        sigma: "s".into(),
        constants: (0..r.gen_range(0..3)).map(|_| random_expr(r, &pool, 2)).collect(),
        depth: r.gen_range(0..3),
    }));
    Document { items }
}
