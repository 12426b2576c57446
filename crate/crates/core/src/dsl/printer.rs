//! Canonical printing. `parse(print(doc)) == doc` for every parsed document.

use std::fmt::Write;

use super::ast::*;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Int(_) | Expr::Sym(_) => 5,
        Expr::Pow(..) => 4,
        Expr::Neg(_) => 3,
        Expr::Bin(op, ..) => op.precedence(),
    }
}

fn wrapped(e: &Expr, parens: bool) -> String {
    if parens {
        format!("({})", print_expr(e))
    } else {
        print_expr(e)
    }
}

pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::Int(n) => n.to_string(),
        Expr::Sym(s) => s.clone(),
        Expr::Pow(b, k) => format!("{}^{k}", wrapped(b, prec(b) < 5)),
        Expr::Neg(a) => format!("-{}", wrapped(a, prec(a) < 3)),
        Expr::Bin(op, l, r) => {
            let p = op.precedence();
            let (l, r) = (wrapped(l, prec(l) < p), wrapped(r, prec(r) <= p));
            match op {
                BinOp::Add | BinOp::Sub => format!("{l} {} {r}", op.symbol()),
                BinOp::Mul | BinOp::Div => format!("{l}{}{r}", op.symbol()),
            }
        }
    }
}

fn print_gen(d: &GenDecl) -> String {
    match d {
        GenDecl::Trans => "trans".into(),
        GenDecl::Alg(e) => format!("alg {}", print_expr(e)),
    }
}

fn print_slots(out: &mut String, slots: &[Slot]) {
    out.push_str(" {\n");
    for s in slots {
        let body = match &s.decl {
            SlotDecl::Trans => " trans".to_string(),
            SlotDecl::Alg(e) => format!(" alg {}", print_expr(e)),
            SlotDecl::Eq(e) => format!(" = {}", print_expr(e)),
        };
        let _ = writeln!(out, "  {}{body};", s.name);
    }
    out.push_str("}\n");
}

pub fn print_item(item: &Item) -> String {
    let mut out = String::new();
    match item {
        Item::Field { field, vars } => {
            let f = match field {
                FieldSpec::Prime(p) => format!("F{p}"),
                FieldSpec::Rationals => "Q".into(),
            };
            if vars.is_empty() {
                let _ = writeln!(out, "field {f};");
            } else {
                let _ = writeln!(out, "field {f}({});", vars.join(", "));
            }
        }
        Item::Gen { name, decl } => {
            let _ = writeln!(out, "gen {name} {};", print_gen(decl));
        }
        Item::Derivation { name, images } | Item::Endomorphism { name, images } => {
            let kw = if matches!(item, Item::Derivation { .. }) { "derivation" } else { "endomorphism" };
            let _ = writeln!(out, "{kw} {name} {{");
            for (s, e) in images {
                let _ = writeln!(out, "  {s} -> {};", print_expr(e));
            }
            out.push_str("}\n");
        }
        Item::Kernel(k) => {
            let _ = write!(out, "kernel {} (n = {}, r = {}) over {}", k.name, k.n, k.r, k.delta);
            print_slots(&mut out, &k.slots);
        }
        Item::DDKernel(k) => {
            let _ = write!(
                out,
                "ddkernel {} (n = {}, r = {}, s = {}) over {}, {}",
                k.name, k.n, k.r, k.s, k.delta, k.sigma
            );
            print_slots(&mut out, &k.slots);
        }
        Item::Difference(k) => {
            let _ = write!(out, "difference {} (n = {}, r = {}) over {}", k.name, k.n, k.r, k.sigma);
            match k.separable {
                Some(true) => out.push_str(" separable"),
                Some(false) => out.push_str(" inseparable"),
                None => {}
            }
            print_slots(&mut out, &k.slots);
        }
        Item::Hypotheses(h) => {
            let _ = writeln!(out, "hypotheses {} for {} {{", h.name, h.kernel);
            let _ = writeln!(out, "  M = {};", h.m);
            let set: Vec<String> = h.i_set.iter().map(|(x, i)| format!("({x}, {i})")).collect();
            let _ = writeln!(out, "  I = {{{}}};", set.join(", "));
            let _ = writeln!(out, "  enum = [{}];", h.enumeration.join(", "));
            let _ = writeln!(out, "  t = {};", h.t);
            let _ = writeln!(out, "  d = {};", h.d);
            out.push_str("}\n");
        }
        Item::Choices(c) => {
            let _ = writeln!(out, "choices for {} {{", c.kernel);
            for (slot, d) in &c.entries {
                let v = match d {
                    ChoiceDecl::Generic => "generic".to_string(),
                    ChoiceDecl::Value(e) => print_expr(e),
                };
                let _ = writeln!(out, "  {slot} = {v};");
            }
            out.push_str("}\n");
        }
        Item::Preimage(p) => {
            let _ = writeln!(out, "preimage {} over {}, {} {{", p.name, p.delta, p.sigma);
            let _ = writeln!(out, "  b = {};", print_expr(&p.b));
            let _ = writeln!(out, "  depth = {};", p.depth);
            for (k, s) in p.steps.iter().enumerate() {
                let _ = writeln!(out, "  step {k} {};", print_gen(s));
            }
            if let Some(w) = &p.witness {
                let _ = writeln!(out, "  witness = {};", print_expr(w));
            }
            out.push_str("}\n");
        }
        Item::Perfect(p) => {
            let _ = writeln!(out, "perfect {} over {}, {} {{", p.name, p.delta, p.sigma);
            let cs: Vec<String> = p.constants.iter().map(print_expr).collect();
            let _ = writeln!(out, "  constants = [{}];", cs.join(", "));
            let _ = writeln!(out, "  depth = {};", p.depth);
            out.push_str("}\n");
        }
    }
    out
}

fn is_header(item: &Item) -> bool {
    matches!(item, Item::Field { .. } | Item::Gen { .. })
}

/// Header lines stay together; every block is set off by a blank line.
pub fn print_document(doc: &Document) -> String {
    let mut out = String::new();
    for (k, item) in doc.items.iter().enumerate() {
        if k > 0 && !(is_header(item) && is_header(&doc.items[k - 1])) {
            out.push('\n');
        }
        out.push_str(&print_item(item));
    }
    out
}
