//! Documents in, verified objects out: the DSL feeding towers, operators and
//! kernels through the public API only.

use kolchin::dsl::ast::Item;
use kolchin::dsl::build::emit_kernel;
use kolchin::dsl::{parse_expr, print_document, Model};
use kolchin::kernel::{classify_leaders, kernel_prolong, kernel_violations};
use kolchin::ops::commutation_check;
use kolchin::tower::TowerError;

const RICCATI: &str = "field Q;
derivation d { }
kernel K (n = 1, r = 1) over d {
  a[1][0] trans;
  a[1][1] = a[1][0]^2;
}
";

#[test]
fn prolonged_kernel_survives_a_print_parse_cycle() {
    let m = Model::parse(RICCATI).unwrap();
    let k = m.kernel(None).unwrap();
    let big = kernel_prolong(&k, 3).unwrap();
    assert_eq!(big.r(), 4);
    assert!(kernel_violations(big.base_delta(), big.presentation()).unwrap().is_empty());

    let mut doc = m.doc.clone();
    doc.items.retain(|i| !matches!(i, Item::Kernel(_)));
    doc.items.push(Item::Kernel(emit_kernel(&big, "K", "d")));
    let text = print_document(&doc);
    assert!(text.contains("a[1][4] = 24*a[1][0]^5;"), "{text}");

    let back = Model::parse(&text).unwrap().kernel(None).unwrap();
    assert_eq!(back.presentation().kinds(), big.presentation().kinds());
    assert_eq!(classify_leaders(&back), classify_leaders(&big));
}

#[test]
fn noncommuting_operators_report_the_generator() {
    let m = Model::parse(
        "field F3(t);
gen x trans;
gen y trans;
derivation d { t -> 1; x -> t; y -> t + 1; }
endomorphism s { t -> t + 1; x -> y; y -> x; }
",
    )
    .unwrap();
    let rep = commutation_check(m.derivation("d").unwrap(), m.endomorphism("s").unwrap()).unwrap();
    let bad: Vec<&str> = rep.violations.iter().map(|v| v.symbol.as_str()).collect();
    assert_eq!(bad, ["y"]);
    let y = &rep.violations[0];
    assert_eq!(m.tower.display(&y.delta_sigma), "t");
    assert_eq!(m.tower.display(&y.sigma_delta), "t + 2");
}

#[test]
fn algebraic_generators_invert_and_report_reducibility() {
    let m = Model::parse("field Q(t);\ngen x alg x^3 - t;\n").unwrap();
    let t = &m.tower;
    let a = kolchin::dsl::build::eval(t, &parse_expr("x^2 + t*x + 1").unwrap()).unwrap();
    let ia = t.inv(&a).unwrap();
    assert!(t.mul(&a, &ia).is_one());

    let m = Model::parse("field Q(t);\ngen x alg x^2 - t^2;\n").unwrap();
    let t = &m.tower;
    let a = kolchin::dsl::build::eval(t, &parse_expr("x - t").unwrap()).unwrap();
    match t.inv(&a) {
        Err(TowerError::ReducibleMinPoly { generator, factor_text, .. }) => {
            assert_eq!(generator, "x");
            assert_eq!(factor_text, "-t + x");
        }
        other => panic!("expected a reducibility witness, got {other:?}"),
    }
}
