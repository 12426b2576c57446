//! The bundled documents and the outcome each command is expected to have
//! on them. `examples` replays the table; the order is fixed so its output
//! is identical across runs.

use kolchin::dsl::{parse_document, print_document};

use crate::commands::run_args;
use crate::report::RunReport;

pub const DOCUMENTS: &[(&str, &str)] = &[
    ("mainex.dd", include_str!("../suite/mainex.dd")),
    ("mainex_kernel.dd", include_str!("../suite/mainex_kernel.dd")),
    ("diffex1_p2_m2.dd", include_str!("../suite/diffex1_p2_m2.dd")),
    ("diffex1_p2_m3.dd", include_str!("../suite/diffex1_p2_m3.dd")),
    ("diffex1_p3_m2.dd", include_str!("../suite/diffex1_p3_m2.dd")),
    ("diffex2_p2_n2.dd", include_str!("../suite/diffex2_p2_n2.dd")),
    ("diffex2_p2_n3.dd", include_str!("../suite/diffex2_p2_n3.dd")),
    ("riccati.dk", include_str!("../suite/riccati.dk")),
    ("riccati.dd", include_str!("../suite/riccati.dd")),
    ("rootchain.dd", include_str!("../suite/rootchain.dd")),
    ("preimage.dd", include_str!("../suite/preimage.dd")),
    ("perfect.dd", include_str!("../suite/perfect.dd")),
];

pub fn document(name: &str) -> Option<&'static str> {
    DOCUMENTS.iter().find(|(n, _)| *n == name).map(|(_, d)| *d)
}

/// A command over a bundled document, its exit code and lines its text
/// report must contain.
pub struct Expectation {
    pub args: &'static [&'static str],
    pub exit: i32,
    pub contains: &'static [&'static str],
}

const fn ex(args: &'static [&'static str], exit: i32, contains: &'static [&'static str]) -> Expectation {
    Expectation { args, exit, contains }
}

pub const EXPECTATIONS: &[Expectation] = &[
    ex(&["commute-check", "suite:mainex.dd"], 1, &["witness y: delta(sigma) vs sigma(delta) gives t vs t + 2"]),
    ex(&["verify-dd", "suite:mainex_kernel.dd"], 1, &["witness a[2][1][0]: sigma relation gives t vs t + 2"]),
    ex(
        &["classify-diff", "suite:diffex1_p2_m2.dd"],
        1,
        &["inseparable leader depths: 0, 1", "minimal separable leader depths: 2", "L/K is inseparable"],
    ),
    ex(
        &["classify-diff", "suite:diffex1_p2_m3.dd"],
        1,
        &["inseparable leader depths: 0, 1, 2", "minimal separable leader depths: 3", "L/K is inseparable"],
    ),
    ex(
        &["classify-diff", "suite:diffex1_p3_m2.dd"],
        1,
        &["inseparable leader depths: 0, 1", "minimal separable leader depths: 2", "L/K is inseparable"],
    ),
    ex(&["classify-diff", "suite:diffex2_p2_n2.dd"], 0, &["max minimal separable depth: 2", "met with equality"]),
    ex(&["classify-diff", "suite:diffex2_p2_n3.dd"], 0, &["max minimal separable depth: 3", "met with equality"]),
    ex(&["verify-kernel", "suite:riccati.dk"], 0, &[]),
    ex(
        &["prolong", "--steps", "3", "suite:riccati.dk"],
        0,
        &["a[1][2] = 2*a[1][0]^3", "a[1][3] = 6*a[1][0]^4", "a[1][4] = 24*a[1][0]^5"],
    ),
    ex(&["classify", "--depth", "5", "suite:riccati.dk"], 0, &["column 1: first separable leader at row 1"]),
    ex(&["verify-dd", "suite:riccati.dd"], 0, &[]),
    ex(&["classify", "suite:riccati.dd"], 0, &["a[1][0][1]: separable, minimal"]),
    ex(&["check-hypotheses", "suite:riccati.dd"], 0, &["PASS  transcendence degree d"]),
    ex(&["linearize", "suite:riccati.dd"], 0, &["relabeling round trip"]),
    ex(&["dd-prolong", "--steps", "2", "--M", "1", "suite:riccati.dd"], 0, &["PASS  leader sets invariant"]),
    ex(&["realize", "--to", "8,3", "suite:riccati.dd"], 0, &["a[1][8][3] = 40320*a[1][0][0]^9"]),
    ex(&["check-hypotheses", "suite:rootchain.dd"], 0, &[]),
    ex(&["realize", "--to", "6,3", "suite:rootchain.dd"], 0, &["a[1][1][3] = 0"]),
    ex(&["adjoin-preimage", "suite:preimage.dd"], 0, &["sigma(c[0]) = t"]),
    ex(&["perfect-extend", "suite:perfect.dd"], 0, &["PASS  r-map at t", "PASS  r-map at u"]),
    ex(&["r-map", "--elem", "t^3*u^6", "suite:perfect.dd"], 0, &["r(t^3*u^6) = t*u^2"]),
    ex(&["r-map", "--elem", "t", "suite:perfect.dd"], 1, &[]),
];

pub fn run_examples(rep: &mut RunReport) {
    for (name, text) in DOCUMENTS {
        let ok = parse_document(text).map(|d| {
            let printed = print_document(&d);
            parse_document(&printed).ok() == Some(d)
        });
        let detail = match &ok {
            Ok(true) => String::new(),
            Ok(false) => "printed form parses to a different document".into(),
            Err(e) => e.to_string(),
        };
        rep.verdict(format!("{name} round-trips"), ok == Ok(true), detail);
    }
    for e in EXPECTATIONS {
        let mut argv = vec!["kolchin"];
        argv.extend_from_slice(e.args);
        let (out, code) = run_args(argv);
        let missing: Vec<&str> = e.contains.iter().copied().filter(|c| !out.contains(c)).collect();
        let pass = code == e.exit && missing.is_empty();
        let detail = if pass {
            format!("exit {code} as expected")
        } else if code != e.exit {
            format!("exit {code}, expected {}", e.exit)
        } else {
            format!("missing {}", missing.join(" | "))
        };
        rep.verdict(e.args.join(" "), pass, detail);
    }
}
