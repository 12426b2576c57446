use num_bigint::BigUint;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Integers are non-negative; negation is explicit. Exponents are literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigUint),
    Sym(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn int(n: u64) -> Expr {
        Expr::Int(BigUint::from(n))
    }

    pub fn sym(s: impl Into<String>) -> Expr {
        Expr::Sym(s.into())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    /// Every symbol the expression mentions.
    pub fn symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Sym(s) => out.push(s.clone()),
            Expr::Neg(a) | Expr::Pow(a, _) => a.symbols(out),
            Expr::Bin(_, a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    Prime(u64),
    Rationals,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenDecl {
    Trans,
    /// A monic polynomial in the generator's own name.
    Alg(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlotDecl {
    Trans,
    Alg(Expr),
    Eq(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub decl: SlotDecl,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBlock {
    pub name: String,
    pub n: usize,
    pub r: usize,
    pub delta: String,
    pub slots: Vec<Slot>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DDKernelBlock {
    pub name: String,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub delta: String,
    pub sigma: String,
    pub slots: Vec<Slot>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceBlock {
    pub name: String,
    pub n: usize,
    pub r: usize,
    pub sigma: String,
    pub separable: Option<bool>,
    pub slots: Vec<Slot>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesesBlock {
    pub name: String,
    pub kernel: String,
    pub m: usize,
    /// `(ξ, i)` pairs.
    pub i_set: Vec<(usize, usize)>,
    pub enumeration: Vec<String>,
    pub t: usize,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChoiceDecl {
    Generic,
    Value(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoicesBlock {
    pub kernel: String,
    pub entries: Vec<(String, ChoiceDecl)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreimageBlock {
    pub name: String,
    pub delta: String,
    pub sigma: String,
    pub b: Expr,
    pub depth: usize,
    /// Step `n` declares `c[n]`.
    pub steps: Vec<GenDecl>,
    pub witness: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectBlock {
    pub name: String,
    pub delta: String,
    pub sigma: String,
    pub constants: Vec<Expr>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Field { field: FieldSpec, vars: Vec<String> },
    Gen { name: String, decl: GenDecl },
    Derivation { name: String, images: Vec<(String, Expr)> },
    Endomorphism { name: String, images: Vec<(String, Expr)> },
    Kernel(KernelBlock),
    DDKernel(DDKernelBlock),
    Difference(DifferenceBlock),
    Hypotheses(HypothesesBlock),
    Choices(ChoicesBlock),
    Preimage(PreimageBlock),
    Perfect(PerfectBlock),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub items: Vec<Item>,
}
