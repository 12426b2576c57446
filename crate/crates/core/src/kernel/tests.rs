use proptest::prelude::*;

use super::gamma::{gamma, lex};
use super::*;
use crate::arith::BaseField;
use crate::testkit;

fn riccati() -> DiffKernel {
    let q = Tower::new(BaseField::Rationals, &[]).unwrap();
    let delta = Derivation::trivial(&q);
    let p = Presentation::new(&q, 1).push("a[1][0]", SlotKind::Transcendental).unwrap();
    let a0 = p.value(0);
    let p = p.push("a[1][1]", SlotKind::Element(p.tower().mul(&a0, &a0))).unwrap();
    kernel_verify(&delta, 1, p).unwrap()
}

fn f2_sqrt_t(dt: i64, second: SlotKind) -> Result<DiffKernel, KernelError> {
    let t = Tower::new(BaseField::prime(2).unwrap(), &["t"]).unwrap();
    let delta = Derivation::define(&t, vec![t.from_int(dt)]).unwrap();
    let p = Presentation::new(&t, 1);
    let p = p.push("a[1][0]", SlotKind::Algebraic(testkit::binomial(&t, 2, &t.var(0)))).unwrap();
    let p = p.push("a[1][1]", second)?;
    kernel_verify(&delta, 1, p)
}

#[test]
fn verification_examples() {
    let q = Tower::new(BaseField::Rationals, &[]).unwrap();
    let p = Presentation::new(&q, 1).push("a[1][0]", SlotKind::Transcendental).unwrap();
    let p = p.push("a[1][1]", SlotKind::Transcendental).unwrap();
    assert!(kernel_verify(&Derivation::trivial(&q), 1, p).is_ok());
    assert_eq!(riccati().r(), 1);
    match f2_sqrt_t(1, SlotKind::Transcendental) {
        Err(KernelError::Invalid(v)) => assert!(v[0].contains("a[1][0]"), "{v:?}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn classification_examples() {
    let rep = classify_leaders(&riccati());
    assert_eq!(rep.get(0, 1).unwrap().tag, LeaderTag::NonLeader);
    let a1 = rep.get(1, 1).unwrap();
    assert!(a1.tag == LeaderTag::Separable && a1.minimal);
    let k = f2_sqrt_t(0, SlotKind::Transcendental).unwrap();
    let rep = classify_leaders(&k);
    assert_eq!(rep.get(0, 1).unwrap().tag, LeaderTag::Inseparable);
    assert_eq!(rep.get(1, 1).unwrap().tag, LeaderTag::NonLeader);
}

#[test]
fn riccati_prolongation() {
    let k = kernel_prolong(&riccati(), 2).unwrap();
    let t = k.tower();
    let p = k.presentation();
    let a0 = p.value(0);
    assert_eq!(p.value(2), t.mul(&t.from_int(2), &t.pow(&a0, 3)));
    assert_eq!(p.value(3), t.mul(&t.from_int(6), &t.pow(&a0, 4)));
    assert_eq!(p.describe(2), "= 2*a[1][0]^3");
    let before = classify_leaders(&riccati());
    let after = classify_leaders(&k);
    assert_eq!(before.minimal_separable(), after.minimal_separable());
}

#[test]
fn transcendental_prolongation_adds_generics() {
    let q = Tower::new(BaseField::Rationals, &[]).unwrap();
    let mut p = Presentation::new(&q, 2);
    for name in ["a[1][0]", "a[2][0]", "a[1][1]", "a[2][1]"] {
        p = p.push(name, SlotKind::Transcendental).unwrap();
    }
    let k = kernel_verify(&Derivation::trivial(&q), 2, p).unwrap();
    let k3 = kernel_prolong(&k, 3).unwrap();
    assert_eq!(k3.r(), 4);
    assert!(k3.presentation().kinds().iter().all(|s| *s == SlotKind::Transcendental));
    assert!(classify_leaders(&k3).minimal_separable().is_empty());
}

#[test]
fn inseparable_leader_gate() {
    let t = Tower::new(BaseField::prime(2).unwrap(), &["t"]).unwrap();
    let p = Presentation::new(&t, 1).push("a[1][0]", SlotKind::Algebraic(testkit::binomial(&t, 2, &t.var(0)))).unwrap();
    let k = kernel_verify(&Derivation::trivial(&t), 1, p);
    // a single row has no shift conditions
    let k = k.unwrap();
    assert!(matches!(kernel_prolong(&k, 1), Err(KernelError::InseparableLeaderTooHigh { xi: 0, .. })));
    let ok = f2_sqrt_t(0, SlotKind::Transcendental).unwrap();
    let k2 = kernel_prolong(&ok, 2).unwrap();
    assert_eq!(classify_leaders(&k2).inseparable(), [(0, 1)].into_iter().collect());
}

#[test]
fn probe_reports() {
    let (_, rep) = finiteness_probe(&riccati(), 5).unwrap();
    assert_eq!(rep.depth, 5);
    assert_eq!(rep.columns[0].first_separable, Some(1));
    assert!(rep.columns[0].stable);
    assert_eq!(rep.minimal_separable, 1);
    let k = f2_sqrt_t(0, SlotKind::Transcendental).unwrap();
    let (_, rep) = finiteness_probe(&k, 3).unwrap();
    assert_eq!(rep.inseparable_by_row, vec![1, 1, 1, 1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gamma_matches_sorted_pairs(r in 0usize..6, n in 1usize..4) {
        let mut all: Vec<(usize, usize)> = (1..=n).flat_map(|i| (0..=r).map(move |xi| (xi, i))).collect();
        all.sort_by(|a, b| lex(&[a.0, a.1], &[b.0, b.1]));
        prop_assert_eq!(gamma(r, n), all);
    }

    #[test]
    fn prolongation_verifies_and_keeps_leaders(seed in any::<u64>(), steps in 1usize..3) {
        let k = testkit::random_kernel(&mut testkit::rng_from(seed));
        let before = classify_leaders(&k);
        let out = kernel_prolong(&k, steps).unwrap();
        prop_assert!(kernel_violations(out.base_delta(), out.presentation()).unwrap().is_empty());
        let after = classify_leaders(&out);
        prop_assert_eq!(before.minimal_separable(), after.minimal_separable());
        prop_assert_eq!(before.inseparable(), after.inseparable());
    }
}
