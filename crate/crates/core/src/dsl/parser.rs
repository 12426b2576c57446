//! Recursive-descent parser with a Pratt loop for expressions. Symbols are
//! resolved while parsing, so an accepted document never mentions an
//! undeclared name.

use std::collections::HashSet;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::DslError;
use crate::arith::BaseField;

const NEG_BP: u8 = 3;
const POW_BP: u8 = 4;

pub fn parse_document(src: &str) -> Result<Document, DslError> {
    let mut p = Parser::new(src)?;
    let mut doc = Document::default();
    while p.peek() != &Tok::Eof {
        let item = p.item()?;
        doc.items.push(item);
    }
    Ok(doc)
}

/// Parses a lone expression, accepting any symbol.
pub fn parse_expr(src: &str) -> Result<Expr, DslError> {
    let mut p = Parser::new(src)?;
    let e = p.expr(&|_| true)?;
    p.expect_eof()?;
    Ok(e)
}

#[derive(Default)]
struct Scope {
    globals: HashSet<String>,
    derivations: HashSet<String>,
    endomorphisms: HashSet<String>,
    ddkernels: HashSet<String>,
    blocks: HashSet<String>,
    field_seen: bool,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Scope,
    /// Unresolved symbols of the expression being parsed, reported once it
    /// is syntactically complete.
    unresolved: Vec<(String, usize, usize)>,
}

fn is_slot_name(s: &str) -> bool {
    s.contains('[')
}

impl Parser {
    fn new(src: &str) -> Result<Parser, DslError> {
        Ok(Parser { toks: lex(src)?, pos: 0, scope: Scope::default(), unresolved: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DslError> {
        let (l, c) = self.here();
        Err(DslError::new(l, c, msg))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), DslError> {
        if self.is_punct(p) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{p}`, found {}", describe(self.peek())))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), DslError> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{w}`, found {}", describe(self.peek())))
        }
    }

    fn expect_eof(&self) -> Result<(), DslError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            self.err(format!("unexpected {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            t => {
                self.pos -= 1;
                self.err(format!("expected a name, found {}", describe(&t)))
            }
        }
    }

    fn int(&mut self) -> Result<usize, DslError> {
        match self.peek().clone() {
            Tok::Int(n) => match usize::try_from(&n) {
                Ok(v) => {
                    self.bump();
                    Ok(v)
                }
                Err(_) => self.err("integer too large"),
            },
            t => self.err(format!("expected an integer, found {}", describe(&t))),
        }
    }

    /// A name with optional `[k]` indices: `t`, `a[1][0]`.
    fn symbol(&mut self) -> Result<String, DslError> {
        let mut s = self.ident()?;
        while self.is_punct("[") {
            self.bump();
            let k = self.int()?;
            self.expect_punct("]")?;
            s.push_str(&format!("[{k}]"));
        }
        Ok(s)
    }

    fn fresh_block(&mut self, name: &str) -> Result<(), DslError> {
        if !self.scope.blocks.insert(name.to_string()) {
            return self.err(format!("`{name}` is already declared"));
        }
        Ok(())
    }

    fn item(&mut self) -> Result<Item, DslError> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            t => return self.err(format!("expected a declaration, found {}", describe(t))),
        };
        self.bump();
        match kw.as_str() {
            "field" => self.field(),
            "gen" => self.gen(),
            "derivation" | "endomorphism" => self.operator(kw == "derivation"),
            "kernel" => self.kernel(),
            "ddkernel" => self.ddkernel(),
            "difference" => self.difference(),
            "hypotheses" => self.hypotheses(),
            "choices" => self.choices(),
            "preimage" => self.preimage(),
            "perfect" => self.perfect(),
            _ => {
                self.pos -= 1;
                self.err(format!("unknown declaration `{kw}`"))
            }
        }
    }

    fn field(&mut self) -> Result<Item, DslError> {
        if self.scope.field_seen {
            return self.err("the field is already declared");
        }
        let name = self.ident()?;
        let field = if name == "Q" {
            FieldSpec::Rationals
        } else if let Some(p) = name.strip_prefix('F').and_then(|d| d.parse::<u64>().ok()) {
            if BaseField::prime(p).is_err() {
                self.pos -= 1;
                return self.err(format!("{p} is not a prime"));
            }
            FieldSpec::Prime(p)
        } else {
            self.pos -= 1;
            return self.err(format!("expected `Q` or `F<p>`, found `{name}`"));
        };
        let mut vars = Vec::new();
        if self.is_punct("(") {
            self.bump();
            loop {
                let v = self.ident()?;
                self.declare_global(&v)?;
                vars.push(v);
                if self.is_punct(",") {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        self.expect_punct(";")?;
        self.scope.field_seen = true;
        Ok(Item::Field { field, vars })
    }

    fn declare_global(&mut self, name: &str) -> Result<(), DslError> {
        if !self.scope.globals.insert(name.to_string()) {
            return self.err(format!("`{name}` is already declared"));
        }
        Ok(())
    }

    fn need_field(&self) -> Result<(), DslError> {
        if self.scope.field_seen {
            Ok(())
        } else {
            self.err("declare the field first")
        }
    }

    fn gen(&mut self) -> Result<Item, DslError> {
        self.need_field()?;
        let name = self.symbol()?;
        let decl = if self.is_word("trans") {
            self.bump();
            GenDecl::Trans
        } else {
            self.expect_word("alg")?;
            let g = self.scope.globals.clone();
            let own = name.clone();
            GenDecl::Alg(self.expr(&|s| g.contains(s) || s == own)?)
        };
        self.expect_punct(";")?;
        self.declare_global(&name)?;
        Ok(Item::Gen { name, decl })
    }

    fn operator(&mut self, derivation: bool) -> Result<Item, DslError> {
        self.need_field()?;
        let name = self.ident()?;
        self.fresh_block(&name)?;
        self.expect_punct("{")?;
        let g = self.scope.globals.clone();
        let mut images = Vec::new();
        while !self.is_punct("}") {
            let sym = self.symbol()?;
            if !g.contains(&sym) {
                self.pos -= 1;
                return self.err(format!("unknown symbol `{sym}`"));
            }
            if images.iter().any(|(s, _)| s == &sym) {
                return self.err(format!("`{sym}` has two images"));
            }
            self.expect_punct("->")?;
            let e = self.expr(&|s| g.contains(s))?;
            self.expect_punct(";")?;
            images.push((sym, e));
        }
        self.bump();
        if derivation {
            self.scope.derivations.insert(name.clone());
            Ok(Item::Derivation { name, images })
        } else {
            self.scope.endomorphisms.insert(name.clone());
            Ok(Item::Endomorphism { name, images })
        }
    }

    /// `( key = INT, … )` with exactly the listed keys, in any order.
    fn params(&mut self, keys: &[&str]) -> Result<Vec<usize>, DslError> {
        self.expect_punct("(")?;
        let mut vals = vec![None; keys.len()];
        loop {
            let k = self.ident()?;
            let Some(j) = keys.iter().position(|q| *q == k) else {
                self.pos -= 1;
                return self.err(format!("unknown parameter `{k}`"));
            };
            self.expect_punct("=")?;
            vals[j] = Some(self.int()?);
            if self.is_punct(",") {
                self.bump();
            } else {
                break;
            }
        }
        self.expect_punct(")")?;
        match keys.iter().zip(&vals).find(|(_, v)| v.is_none()) {
            Some((k, _)) => self.err(format!("missing parameter `{k}`")),
            None => Ok(vals.into_iter().map(|v| v.unwrap()).collect()),
        }
    }

    fn derivation_ref(&mut self) -> Result<String, DslError> {
        let d = self.ident()?;
        if !self.scope.derivations.contains(&d) {
            self.pos -= 1;
            return self.err(format!("unknown derivation `{d}`"));
        }
        Ok(d)
    }

    fn endomorphism_ref(&mut self) -> Result<String, DslError> {
        let s = self.ident()?;
        if !self.scope.endomorphisms.contains(&s) {
            self.pos -= 1;
            return self.err(format!("unknown endomorphism `{s}`"));
        }
        Ok(s)
    }

    fn slots(&mut self) -> Result<Vec<Slot>, DslError> {
        self.expect_punct("{")?;
        let mut known = self.scope.globals.clone();
        let mut slots = Vec::new();
        while !self.is_punct("}") {
            let name = self.symbol()?;
            if known.contains(&name) {
                self.pos -= 1;
                return self.err(format!("`{name}` is already declared"));
            }
            let decl = if self.is_word("trans") {
                self.bump();
                SlotDecl::Trans
            } else if self.is_word("alg") {
                self.bump();
                let own = name.clone();
                let k = known.clone();
                SlotDecl::Alg(self.expr(&|s| k.contains(s) || s == own)?)
            } else {
                self.expect_punct("=")?;
                let k = known.clone();
                SlotDecl::Eq(self.expr(&|s| k.contains(s))?)
            };
            self.expect_punct(";")?;
            known.insert(name.clone());
            slots.push(Slot { name, decl });
        }
        self.bump();
        Ok(slots)
    }

    fn kernel(&mut self) -> Result<Item, DslError> {
        let name = self.ident()?;
        self.fresh_block(&name)?;
        let v = self.params(&["n", "r"])?;
        self.expect_word("over")?;
        let delta = self.derivation_ref()?;
        let slots = self.slots()?;
        Ok(Item::Kernel(KernelBlock { name, n: v[0], r: v[1], delta, slots }))
    }

    fn ddkernel(&mut self) -> Result<Item, DslError> {
        let name = self.ident()?;
        self.fresh_block(&name)?;
        let v = self.params(&["n", "r", "s"])?;
        self.expect_word("over")?;
        let delta = self.derivation_ref()?;
        self.expect_punct(",")?;
        let sigma = self.endomorphism_ref()?;
        let slots = self.slots()?;
        self.scope.ddkernels.insert(name.clone());
        Ok(Item::DDKernel(DDKernelBlock { name, n: v[0], r: v[1], s: v[2], delta, sigma, slots }))
    }

    fn difference(&mut self) -> Result<Item, DslError> {
        let name = self.ident()?;
        self.fresh_block(&name)?;
        let v = self.params(&["n", "r"])?;
        self.expect_word("over")?;
        let sigma = self.endomorphism_ref()?;
        let separable = if self.is_word("separable") {
            self.bump();
            Some(true)
        } else if self.is_word("inseparable") {
            self.bump();
            Some(false)
        } else {
            None
        };
        let slots = self.slots()?;
        Ok(Item::Difference(DifferenceBlock { name, n: v[0], r: v[1], sigma, separable, slots }))
    }

    fn ddkernel_ref(&mut self) -> Result<String, DslError> {
        let k = self.ident()?;
        if !self.scope.ddkernels.contains(&k) {
            self.pos -= 1;
            return self.err(format!("unknown ddkernel `{k}`"));
        }
        Ok(k)
    }

    fn hypotheses(&mut self) -> Result<Item, DslError> {
        let name = self.ident()?;
        self.fresh_block(&name)?;
        self.expect_word("for")?;
        let kernel = self.ddkernel_ref()?;
        self.expect_punct("{")?;
        let (mut m, mut i_set, mut en, mut t, mut d) = (None, None, None, None, None);
        while !self.is_punct("}") {
            let key = self.ident()?;
            self.expect_punct("=")?;
            match key.as_str() {
                "M" => m = Some(self.int()?),
                "t" => t = Some(self.int()?),
                "d" => d = Some(self.int()?),
                "I" => {
                    self.expect_punct("{")?;
                    let mut set = Vec::new();
                    while !self.is_punct("}") {
                        self.expect_punct("(")?;
                        let xi = self.int()?;
                        self.expect_punct(",")?;
                        let i = self.int()?;
                        self.expect_punct(")")?;
                        set.push((xi, i));
                        if !self.is_punct("}") {
                            self.expect_punct(",")?;
                        }
                    }
                    self.bump();
                    i_set = Some(set);
                }
                "enum" => {
                    self.expect_punct("[")?;
                    let mut list = Vec::new();
                    while !self.is_punct("]") {
                        list.push(self.symbol()?);
                        if !self.is_punct("]") {
                            self.expect_punct(",")?;
                        }
                    }
                    self.bump();
                    en = Some(list);
                }
                _ => {
                    self.pos -= 2;
                    return self.err(format!("unknown hypothesis `{key}`"));
                }
            }
            self.expect_punct(";")?;
        }
        self.bump();
        let missing = [("M", m.is_none()), ("I", i_set.is_none()), ("enum", en.is_none()), ("t", t.is_none()), ("d", d.is_none())];
        if let Some((k, _)) = missing.iter().find(|(_, miss)| *miss) {
            return self.err(format!("hypotheses `{name}` lacks `{k}`"));
        }
        Ok(Item::Hypotheses(HypothesesBlock {
            name,
            kernel,
            m: m.unwrap(),
            i_set: i_set.unwrap(),
            enumeration: en.unwrap(),
            t: t.unwrap(),
            d: d.unwrap(),
        }))
    }

    fn choices(&mut self) -> Result<Item, DslError> {
        self.expect_word("for")?;
        let kernel = self.ddkernel_ref()?;
        self.expect_punct("{")?;
        let g = self.scope.globals.clone();
        let mut entries = Vec::new();
        while !self.is_punct("}") {
            let slot = self.symbol()?;
            self.expect_punct("=")?;
            let decl = if self.is_word("generic") {
                self.bump();
                ChoiceDecl::Generic
            } else {
                ChoiceDecl::Value(self.expr(&|s| g.contains(s) || is_slot_name(s))?)
            };
            self.expect_punct(";")?;
            entries.push((slot, decl));
        }
        self.bump();
        Ok(Item::Choices(ChoicesBlock { kernel, entries }))
    }

    fn over_pair(&mut self) -> Result<(String, String), DslError> {
        self.expect_word("over")?;
        let d = self.derivation_ref()?;
        self.expect_punct(",")?;
        let s = self.endomorphism_ref()?;
        Ok((d, s))
    }

    fn preimage(&mut self) -> Result<Item, DslError> {
        let name = self.ident()?;
        self.fresh_block(&name)?;
        let (delta, sigma) = self.over_pair()?;
        self.expect_punct("{")?;
        let g = self.scope.globals.clone();
        let (mut b, mut depth, mut witness) = (None, None, None);
        let mut steps = Vec::new();
        while !self.is_punct("}") {
            let key = self.ident()?;
            match key.as_str() {
                "b" => {
                    self.expect_punct("=")?;
                    b = Some(self.expr(&|s| g.contains(s))?);
                }
                "witness" => {
                    self.expect_punct("=")?;
                    witness = Some(self.expr(&|s| g.contains(s))?);
                }
                "depth" => {
                    self.expect_punct("=")?;
                    depth = Some(self.int()?);
                }
                "step" => {
                    let k = self.int()?;
                    if k != steps.len() {
                        return self.err(format!("expected step {}", steps.len()));
                    }
                    let decl = if self.is_word("trans") {
                        self.bump();
                        GenDecl::Trans
                    } else {
                        self.expect_word("alg")?;
                        GenDecl::Alg(self.expr(&|s| {
                            g.contains(s) || (0..=k).any(|j| s == format!("c[{j}]"))
                        })?)
                    };
                    steps.push(decl);
                }
                _ => {
                    self.pos -= 1;
                    return self.err(format!("unknown preimage field `{key}`"));
                }
            }
            self.expect_punct(";")?;
        }
        self.bump();
        let (Some(b), Some(depth)) = (b, depth) else {
            return self.err(format!("preimage `{name}` needs `b` and `depth`"));
        };
        Ok(Item::Preimage(PreimageBlock { name, delta, sigma, b, depth, steps, witness }))
    }

    fn perfect(&mut self) -> Result<Item, DslError> {
        let name = self.ident()?;
        self.fresh_block(&name)?;
        let (delta, sigma) = self.over_pair()?;
        self.expect_punct("{")?;
        let g = self.scope.globals.clone();
        let (mut constants, mut depth) = (None, None);
        while !self.is_punct("}") {
            let key = self.ident()?;
            self.expect_punct("=")?;
            match key.as_str() {
                "constants" => {
                    self.expect_punct("[")?;
                    let mut list = Vec::new();
                    while !self.is_punct("]") {
                        list.push(self.expr(&|s| g.contains(s))?);
                        if !self.is_punct("]") {
                            self.expect_punct(",")?;
                        }
                    }
                    self.bump();
                    constants = Some(list);
                }
                "depth" => depth = Some(self.int()?),
                _ => {
                    self.pos -= 2;
                    return self.err(format!("unknown perfect field `{key}`"));
                }
            }
            self.expect_punct(";")?;
        }
        self.bump();
        let (Some(constants), Some(depth)) = (constants, depth) else {
            return self.err(format!("perfect `{name}` needs `constants` and `depth`"));
        };
        Ok(Item::Perfect(PerfectBlock { name, delta, sigma, constants, depth }))
    }

    fn expr(&mut self, known: &dyn Fn(&str) -> bool) -> Result<Expr, DslError> {
        self.unresolved.clear();
        let e = self.expr_bp(0, known)?;
        match self.unresolved.first() {
            Some((s, l, c)) => Err(DslError::new(*l, *c, format!("unknown symbol `{s}`"))),
            None => Ok(e),
        }
    }

    fn expr_bp(&mut self, min_bp: u8, known: &dyn Fn(&str) -> bool) -> Result<Expr, DslError> {
        let mut lhs = match self.peek().clone() {
            Tok::Punct("-") => {
                self.bump();
                Expr::Neg(Box::new(self.expr_bp(NEG_BP, known)?))
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr_bp(0, known)?;
                self.expect_punct(")")?;
                e
            }
            Tok::Int(n) => {
                self.bump();
                Expr::Int(n)
            }
            Tok::Ident(_) => {
                let (l, c) = self.here();
                let s = self.symbol()?;
                if !known(&s) {
                    self.unresolved.push((s.clone(), l, c));
                }
                Expr::Sym(s)
            }
            t => return self.err(format!("expected an expression, found {}", describe(&t))),
        };
        loop {
            let op = match self.peek() {
                Tok::Punct("^") => {
                    if POW_BP < min_bp {
                        break;
                    }
                    self.bump();
                    let k = self.int()?;
                    let Ok(k) = u32::try_from(k) else { return self.err("exponent too large") };
                    lhs = Expr::Pow(Box::new(lhs), k);
                    continue;
                }
                Tok::Punct("+") => BinOp::Add,
                Tok::Punct("-") => BinOp::Sub,
                Tok::Punct("*") => BinOp::Mul,
                Tok::Punct("/") => BinOp::Div,
                _ => break,
            };
            if op.precedence() < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr_bp(op.precedence() + 1, known)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of input".into(),
    }
}
