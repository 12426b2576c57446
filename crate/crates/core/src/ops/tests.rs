use proptest::prelude::*;

use super::*;
use crate::arith::BaseField;
use crate::testkit;
use crate::tower::{GenSpec, MinPoly};

fn f(p: u64) -> BaseField {
    BaseField::prime(p).unwrap()
}

fn binomial(t: &Tower, d: usize, c: Element) -> MinPoly {
    let mut lower = vec![t.zero(); d];
    lower[0] = c.neg();
    MinPoly::monic(lower, t.field())
}

/// `F_3(t)(x, y)` with `δt = 1`, `δx = t`, `δy = t + 1`.
fn mainex() -> (Tower, Derivation, Endomorphism) {
    let t = Tower::new(f(3), &["t"]).unwrap();
    let t = t.extend(GenSpec::transcendental("x")).unwrap();
    let t = t.extend(GenSpec::transcendental("y")).unwrap();
    let tt = t.var(0);
    let d = Derivation::define(&t, vec![t.one(), tt.clone(), t.add(&tt, &t.one())]).unwrap();
    let s = Endomorphism::define(&t, vec![t.add(&tt, &t.one()), t.var(2), t.var(1)]).unwrap();
    (t, d, s)
}

#[test]
fn mainex_commutation_fails_at_y() {
    let (t, d, s) = mainex();
    let rep = commutation_check(&d, &s).unwrap();
    assert_eq!(rep.violations.len(), 1);
    let v = &rep.violations[0];
    assert_eq!(v.symbol, "y");
    assert_eq!(t.display(&v.delta_sigma), "t");
    assert_eq!(t.display(&v.sigma_delta), "t + 2");
    assert_eq!(rep.checked.len(), 3);
}

#[test]
fn mainex_applications() {
    let (t, d, _) = mainex();
    let (tt, x, y) = (t.var(0), t.var(1), t.var(2));
    let expected = t.add(&t.mul(&tt, &y), &t.mul(&t.add(&tt, &t.one()), &x));
    assert_eq!(d.apply(&t.mul(&x, &y)).unwrap(), expected);
    assert!(d.apply(&t.from_int(2)).unwrap().is_zero());
    assert!(d.apply(&t.pow(&y, 3)).unwrap().is_zero());
}

#[test]
fn inseparable_generator_conditions() {
    let t = Tower::new(f(2), &["t"]).unwrap();
    let t = t.extend(GenSpec::algebraic("a", binomial(&t, 2, t.var(0)))).unwrap();
    match Derivation::define(&t, vec![t.one(), t.var(0)]) {
        Err(OpError::InvalidDerivation { generator, residual }) => {
            assert_eq!(generator, "a");
            assert_eq!(residual, "1");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(Derivation::define(&t, vec![t.zero(), t.one()]).is_ok());
}

#[test]
fn forced_extension() {
    let q = Tower::new(BaseField::Rationals, &["t"]).unwrap();
    let d = Derivation::define(&q, vec![q.one()]).unwrap();
    let ext = q.extend(GenSpec::algebraic("a", binomial(&q, 2, q.var(0)))).unwrap();
    let de = d.extend_forced(&ext).unwrap();
    let a = ext.var(1);
    assert_eq!(*de.image(1), ext.inv(&ext.mul(&ext.from_int(2), &a)).unwrap());
    assert!(de.violations().unwrap().is_empty());
    // perturbing the forced image breaks validation
    let mut imgs = de.images().to_vec();
    imgs[1] = ext.add(&imgs[1], &ext.one());
    assert!(Derivation::define(&ext, imgs).is_err());
    // constant coefficients with δ trivial on the base force 0
    let z = Derivation::trivial(&q);
    let ext2 = q.extend(GenSpec::algebraic("b", binomial(&q, 2, q.from_int(2)))).unwrap();
    assert!(z.extend_forced(&ext2).unwrap().image(1).is_zero());
    let f2 = Tower::new(f(2), &["t"]).unwrap();
    let ins = f2.extend(GenSpec::algebraic("a", binomial(&f2, 2, f2.var(0)))).unwrap();
    assert!(matches!(Derivation::trivial(&f2).extend_forced(&ins), Err(OpError::NotSeparable(_))));
}

#[test]
fn r_map_cases() {
    let t = Tower::new(f(2), &["t"]).unwrap();
    let d1 = Derivation::define(&t, vec![t.one()]).unwrap();
    assert!(r_map(&d1, &t.var(0)).unwrap().is_zero());
    let d0 = Derivation::trivial(&t);
    assert_eq!(r_map(&d0, &t.pow(&t.var(0), 2)).unwrap(), t.var(0));
    assert!(matches!(r_map(&d0, &t.var(0)), Err(OpError::PRootMissing(_))));
}

#[test]
fn endomorphism_validity() {
    let t = Tower::new(f(3), &["t"]).unwrap();
    assert!(Endomorphism::define(&t, vec![t.add(&t.var(0), &t.one())]).is_ok());
    let t2 = Tower::new(f(2), &["t1", "t2"]).unwrap();
    assert!(Endomorphism::define(&t2, vec![t2.var(1), t2.pow(&t2.var(0), 2)]).is_ok());
    let a = Tower::new(f(2), &["t1"]).unwrap();
    let a = a.extend(GenSpec::algebraic("a", binomial(&a, 2, a.var(0)))).unwrap();
    match Endomorphism::define(&a, vec![a.var(0), a.var(0)]) {
        Err(OpError::InvalidEndomorphism { generator, .. }) => assert_eq!(generator, "a"),
        other => panic!("unexpected {other:?}"),
    }
    assert!(Endomorphism::define(&t, vec![t.from_int(1)]).is_err());
}

#[test]
fn trivial_derivation_commutes_with_anything() {
    let t = Tower::new(f(3), &["t"]).unwrap();
    let s = Endomorphism::define(&t, vec![t.pow(&t.var(0), 2)]).unwrap();
    assert!(commutation_check(&Derivation::trivial(&t), &s).unwrap().ok());
    let d = Derivation::define(&t, vec![t.one()]).unwrap();
    let shift = Endomorphism::define(&t, vec![t.add(&t.var(0), &t.one())]).unwrap();
    assert!(commutation_check(&d, &shift).unwrap().ok());
}

#[test]
fn degree_one_generator_reports_demanded_value() {
    let t = Tower::new(BaseField::Rationals, &["x"]).unwrap();
    let c = t.pow(&t.var(0), 2);
    let t = t.extend(GenSpec::algebraic("y", MinPoly::monic(vec![c.neg()], t.field()))).unwrap();
    let d = Derivation::unchecked(&t, &t, vec![t.one(), t.zero()]).unwrap();
    let v = d.violations().unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(t.display(v[0].expected.as_ref().unwrap()), "2*x");
}

/// `Q(t)(a)(u)` with `a^2 = t` and `F_3(t)(u)(b)` with `b^2 = u + t`.
fn separable_towers() -> Vec<(Tower, Derivation, Endomorphism)> {
    let q = Tower::new(BaseField::Rationals, &["t"]).unwrap();
    let dq = Derivation::define(&q, vec![q.one()]).unwrap();
    let q1 = q.extend(GenSpec::algebraic("a", binomial(&q, 2, q.var(0)))).unwrap();
    let dq = dq.extend_forced(&q1).unwrap();
    let q2 = q1.extend(GenSpec::transcendental("u")).unwrap();
    let dq = Derivation::define(&q2, vec![dq.image(0).clone(), dq.image(1).clone(), q2.var(1)]).unwrap();
    let sq = Endomorphism::define(&q2, vec![q2.var(0), q2.var(1), q2.pow(&q2.var(2), 2)]).unwrap();

    let f3 = Tower::new(f(3), &["t"]).unwrap();
    let f3 = f3.extend(GenSpec::transcendental("u")).unwrap();
    let c = f3.add(&f3.var(1), &f3.var(0));
    let f3b = f3.extend(GenSpec::algebraic("b", binomial(&f3, 2, c))).unwrap();
    let d3 = Derivation::define(&f3, vec![f3.one(), f3.var(0)]).unwrap().extend_forced(&f3b).unwrap();
    let s3 = Endomorphism::define(&f3b, vec![f3b.var(0), f3b.var(1), f3b.var(2)]).unwrap();
    vec![(q2, dq, sq), (f3b, d3, s3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derivation_is_leibniz_and_additive(which in 0usize..2, seed in any::<u64>()) {
        let (t, d, _) = &separable_towers()[which];
        let mut r = testkit::rng_from(seed);
        let a = testkit::element(&mut r, t, 3);
        let b = testkit::element(&mut r, t, 3);
        let lhs = d.apply(&t.mul(&a, &b)).unwrap();
        let rhs = t.add(&t.mul(&d.apply(&a).unwrap(), &b), &t.mul(&a, &d.apply(&b).unwrap()));
        prop_assert_eq!(lhs, rhs);
        let sum = d.apply(&t.add(&a, &b)).unwrap();
        prop_assert_eq!(sum, t.add(&d.apply(&a).unwrap(), &d.apply(&b).unwrap()));
    }

    #[test]
    fn endomorphism_is_a_homomorphism(which in 0usize..2, seed in any::<u64>()) {
        let (t, _, s) = &separable_towers()[which];
        let mut r = testkit::rng_from(seed);
        let a = testkit::element(&mut r, t, 3);
        let b = testkit::element(&mut r, t, 3);
        prop_assert_eq!(s.apply(&t.mul(&a, &b)).unwrap(), t.mul(&s.apply(&a).unwrap(), &s.apply(&b).unwrap()));
        prop_assert_eq!(s.apply(&t.add(&a, &b)).unwrap(), t.add(&s.apply(&a).unwrap(), &s.apply(&b).unwrap()));
        prop_assert!(s.apply(&t.from_int(5)).unwrap() == t.from_int(5));
    }

    #[test]
    fn generator_commutation_lifts_to_elements(seed in any::<u64>()) {
        // δ = d/dt on F_3(t)(u) with δu = 0 commutes with σ: t ↦ t + 1, u ↦ u^2.
        let t = Tower::new(f(3), &["t"]).unwrap().extend(GenSpec::transcendental("u")).unwrap();
        let d = Derivation::define(&t, vec![t.one(), t.zero()]).unwrap();
        let s = Endomorphism::define(&t, vec![t.add(&t.var(0), &t.one()), t.pow(&t.var(1), 2)]).unwrap();
        prop_assert!(commutation_check(&d, &s).unwrap().ok());
        let mut r = testkit::rng_from(seed);
        let e = testkit::element(&mut r, &t, 3);
        prop_assert_eq!(d.apply(&s.apply(&e).unwrap()).unwrap(), s.apply(&d.apply(&e).unwrap()).unwrap());
    }
}
