use proptest::prelude::*;

use super::*;
use crate::arith::{BaseField, MPoly, Monomial};

fn f2() -> BaseField {
    BaseField::prime(2).unwrap()
}

/// `x^d − c` over `t`.
fn binomial(t: &Tower, d: usize, c: Element) -> MinPoly {
    let mut lower = vec![t.zero(); d];
    lower[0] = c.neg();
    MinPoly::monic(lower, t.field())
}

fn sqrt_t1() -> Tower {
    let t = Tower::new(f2(), &["t1"]).unwrap();
    let c = t.var(0);
    t.extend(GenSpec::algebraic("a", binomial(&t, 2, c))).unwrap()
}

fn rationals_adjoin(c: i64) -> Tower {
    let t = Tower::new(BaseField::Rationals, &[]).unwrap();
    let c = t.from_int(c);
    t.extend(GenSpec::algebraic("a", binomial(&t, 2, c))).unwrap()
}

#[test]
fn separability_tags() {
    let t = sqrt_t1();
    assert!(!t.is_separable_var(1));
    let q = rationals_adjoin(2);
    assert!(q.is_separable_var(0));
    let t3 = Tower::new(BaseField::prime(3).unwrap(), &["t"]).unwrap();
    let x = t3.extend(GenSpec::transcendental("x")).unwrap();
    assert_eq!(x.names(), &["t".to_string(), "x".to_string()]);
}

#[test]
fn reductions() {
    let t = sqrt_t1();
    let a = t.var(1);
    assert_eq!(t.mul(&a, &a), t.var(0));
    let q = rationals_adjoin(2);
    let a = q.var(0);
    assert_eq!(q.display(&q.pow(&a, 3)), "2*a");
    let base = t.var(0);
    assert_eq!(t.normal_form(&base), base);
}

#[test]
fn inversion() {
    let t = sqrt_t1();
    let a = t.var(1);
    let inv = t.inv(&a).unwrap();
    assert_eq!(inv, t.div(&a, &t.var(0)).unwrap());
    assert_eq!(t.display(&inv), "(a)/(t1)");
    assert_eq!(t.inv(&t.one()).unwrap(), t.one());
    assert!(matches!(t.inv(&t.zero()), Err(TowerError::ZeroElement)));
}

#[test]
fn reducible_minpoly_is_detected() {
    let q = rationals_adjoin(1);
    let a = q.var(0);
    let err = q.inv(&q.sub(&a, &q.one())).unwrap_err();
    match err {
        TowerError::ReducibleMinPoly { generator, factor, factor_text } => {
            assert_eq!(generator, "a");
            assert_eq!(factor_text, "a - 1");
            let (_, r) = q.upoly_divrem(&q.minpoly(0).unwrap().as_upoly(), &factor).unwrap();
            assert!(r.is_zero());
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn malformed_minpolys_rejected() {
    let t = Tower::new(BaseField::Rationals, &["t"]).unwrap();
    let two = MinPoly { coeffs: vec![t.zero(), t.from_int(2)] };
    assert!(matches!(
        t.extend(GenSpec::algebraic("a", two)),
        Err(TowerError::MalformedMinPoly { .. })
    ));
    let later = MinPoly::monic(vec![Element::from_poly(MPoly::var(t.field(), 3))], t.field());
    assert!(t.extend(GenSpec::algebraic("a", later)).is_err());
    assert!(matches!(t.extend(GenSpec::transcendental("t")), Err(TowerError::DuplicateName(_))));
}

#[test]
fn pth_powers_in_rational_function_fields() {
    let t = Tower::new(f2(), &["t"]).unwrap();
    let x = t.var(0);
    assert_eq!(t.is_pth_power(&t.mul(&x, &x)).unwrap(), Some(x.clone()));
    assert_eq!(t.is_pth_power(&x).unwrap(), None);
    let t = Tower::new(f2(), &["t1", "t2", "t3"]).unwrap();
    let (t1, t2, t3) = (t.var(0), t.var(1), t.var(2));
    let z = t.div(&t.mul(&t.pow(&t1, 2), &t.pow(&t2, 4)), &t.pow(&t3, 2)).unwrap();
    let r = t.div(&t.mul(&t1, &t.pow(&t2, 2)), &t3).unwrap();
    assert_eq!(t.is_pth_power(&z).unwrap(), Some(r));
}

#[test]
fn pth_powers_with_root_generators() {
    let t = Tower::new(f2(), &["t1", "t2"]).unwrap();
    let t = t.extend(GenSpec::algebraic("x1", binomial(&t, 2, t.var(0)))).unwrap();
    let t = t.extend(GenSpec::algebraic("x2", binomial(&t, 2, t.var(1)))).unwrap();
    assert_eq!(t.is_pth_power(&t.var(1)).unwrap(), Some(t.var(3)));
    let z = t.add(&t.var(0), &t.mul(&t.var(1), &t.pow(&t.var(0), 2)));
    let r = t.is_pth_power(&z).unwrap().unwrap();
    assert_eq!(t.pow(&r, 2), z);
    // x1 itself is not a square here
    assert_eq!(t.is_pth_power(&t.var(2)).unwrap(), None);
    let q = rationals_adjoin(2);
    assert!(matches!(q.is_pth_power(&q.var(0)), Err(TowerError::UnsupportedTower(_))));
}

#[test]
fn unsupported_minpoly_shape() {
    let f3 = BaseField::prime(3).unwrap();
    let t = Tower::new(f3, &["t"]).unwrap();
    let t = t.extend(GenSpec::algebraic("a", binomial(&t, 2, t.var(0)))).unwrap();
    assert!(matches!(t.is_pth_power(&t.var(0)), Err(TowerError::UnsupportedTower(_))));
}

#[test]
fn prefix_structure() {
    let t = sqrt_t1();
    let base = t.prefix(1);
    assert!(base.is_prefix_of(&t));
    assert!(!t.is_prefix_of(&base));
    assert_eq!(base.nvars(), 1);
}

// ---- randomized field axioms ----

/// `Q(t)(a)(b)` with `a^2 = t`, `b^3 = a + 1` and `F_3(t)(a)(u)` with
/// `a^2 = t + 1`, `u` transcendental: both fields.
fn test_towers() -> Vec<Tower> {
    let q = Tower::new(BaseField::Rationals, &["t"]).unwrap();
    let q = q.extend(GenSpec::algebraic("a", binomial(&q, 2, q.var(0)))).unwrap();
    let c = q.add(&q.var(1), &q.one());
    let q = q.extend(GenSpec::algebraic("b", binomial(&q, 3, c))).unwrap();
    let f = Tower::new(BaseField::prime(3).unwrap(), &["t"]).unwrap();
    let c = f.add(&f.var(0), &f.one());
    let f = f.extend(GenSpec::algebraic("a", binomial(&f, 2, c))).unwrap();
    let f = f.extend(GenSpec::transcendental("u")).unwrap();
    vec![q, f]
}

fn element_from(t: &Tower, spec: &[(u32, u32, u32, i64)], den: &[(u32, i64)]) -> Element {
    let field = t.field();
    let num = MPoly::from_terms(
        field,
        spec.iter().map(|&(e0, e1, e2, c)| (Monomial::from_exps(&[e0, e1, e2]), field.from_i64(c))),
    );
    let mut d = MPoly::from_terms(field, den.iter().map(|&(e, c)| (Monomial::var_pow(0, e), field.from_i64(c))));
    if d.is_zero() {
        d = MPoly::one(field);
    }
    t.from_parts(num, d).unwrap()
}

fn arb_parts() -> impl Strategy<Value = (Vec<(u32, u32, u32, i64)>, Vec<(u32, i64)>)> {
    (
        prop::collection::vec((0u32..3, 0u32..3, 0u32..3, -3i64..4), 0..4),
        prop::collection::vec((0u32..2, 1i64..3), 0..2),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(which in 0usize..2, a in arb_parts(), b in arb_parts(), c in arb_parts()) {
        let t = &test_towers()[which];
        let (a, b, c) = (element_from(t, &a.0, &a.1), element_from(t, &b.0, &b.1), element_from(t, &c.0, &c.1));
        prop_assert_eq!(t.mul(&t.mul(&a, &b), &c), t.mul(&a, &t.mul(&b, &c)));
        prop_assert_eq!(t.mul(&a, &t.add(&b, &c)), t.add(&t.mul(&a, &b), &t.mul(&a, &c)));
        prop_assert_eq!(t.mul(&a, &b), t.mul(&b, &a));
        prop_assert_eq!(t.normal_form(&t.normal_form(&a)), t.normal_form(&a));
        if !a.is_zero() {
            let inv = t.inv(&a).unwrap();
            prop_assert!(t.mul(&a, &inv).is_one());
            prop_assert!(t.mul(&inv, &a).is_one());
        }
    }

    #[test]
    fn frobenius_roots(parts in arb_parts()) {
        let t = sqrt_t1();
        let t = t.extend(GenSpec::transcendental("u")).unwrap();
        let e = element_from(&t, &parts.0, &parts.1);
        let z = t.pow(&e, 2);
        prop_assert_eq!(t.is_pth_power(&z).unwrap(), Some(t.normal_form(&e)));
    }
}
