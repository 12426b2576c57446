use serde::Serialize;

use crate::tower::{Element, GenSpec, MinPoly, Tower, TowerError};

/// How one slot of a kernel is presented over everything before it.
#[derive(Clone, Debug, PartialEq)]
pub enum SlotKind {
    Transcendental,
    Algebraic(MinPoly),
    /// An element of the field generated so far (no new generator).
    Element(Element),
}

/// Leader classification read off a slot's presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeaderTag {
    NonLeader,
    Separable,
    Inseparable,
}

impl SlotKind {
    pub fn tag(&self) -> LeaderTag {
        match self {
            SlotKind::Transcendental => LeaderTag::NonLeader,
            SlotKind::Element(_) => LeaderTag::Separable,
            SlotKind::Algebraic(f) if f.is_separable() => LeaderTag::Separable,
            SlotKind::Algebraic(_) => LeaderTag::Inseparable,
        }
    }
}

/// Kernel slots laid out row by row in `cols` columns on top of a base tower.
/// Slot `k` sits in row `k / cols`, column `k % cols`, and is tower variable
/// `base.nvars() + k`. Element slots become degree-one generators, so every
/// slot owns a variable.
#[derive(Clone, Debug)]
pub struct Presentation {
    base: Tower,
    cols: usize,
    names: Vec<String>,
    kinds: Vec<SlotKind>,
    tower: Tower,
}

impl Presentation {
    pub fn new(base: &Tower, cols: usize) -> Presentation {
        assert!(cols > 0, "a presentation needs at least one column");
        Presentation { base: base.clone(), cols, names: Vec::new(), kinds: Vec::new(), tower: base.clone() }
    }

    /// Appends the next slot.
    pub fn push(&self, name: &str, kind: SlotKind) -> Result<Presentation, TowerError> {
        let t = &self.tower;
        let (kind, spec) = match kind {
            SlotKind::Transcendental => (SlotKind::Transcendental, GenSpec::transcendental(name)),
            SlotKind::Algebraic(f) => (SlotKind::Algebraic(f.clone()), GenSpec::algebraic(name, f)),
            SlotKind::Element(e) => {
                t.check(&e)?;
                let e = t.normal_form(&e);
                let f = MinPoly::monic(vec![e.neg()], t.field());
                (SlotKind::Element(e), GenSpec::algebraic(name, f))
            }
        };
        let tower = t.extend(spec)?;
        // Keep the normalized coefficients the tower stored.
        let kind = match kind {
            SlotKind::Algebraic(_) => SlotKind::Algebraic(tower.minpoly(tower.nvars() - 1).unwrap().clone()),
            k => k,
        };
        let mut out = self.clone();
        out.names.push(name.to_string());
        out.kinds.push(kind);
        out.tower = tower;
        Ok(out)
    }

    pub fn base(&self) -> &Tower {
        &self.base
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    /// Number of complete rows.
    pub fn rows(&self) -> usize {
        self.len() / self.cols
    }

    pub fn kinds(&self) -> &[SlotKind] {
        &self.kinds
    }

    pub fn kind(&self, k: usize) -> &SlotKind {
        &self.kinds[k]
    }

    pub fn name(&self, k: usize) -> &str {
        &self.names[k]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn tag(&self, k: usize) -> LeaderTag {
        self.kinds[k].tag()
    }

    pub fn slot(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn var(&self, k: usize) -> usize {
        self.base.nvars() + k
    }

    pub fn slot_of_var(&self, v: usize) -> Option<usize> {
        v.checked_sub(self.base.nvars()).filter(|&k| k < self.len())
    }

    /// The value of slot `k` as an element (its normal form in the tower).
    pub fn value(&self, k: usize) -> Element {
        self.tower.var(self.var(k))
    }

    /// The first `len` slots.
    pub fn prefix(&self, len: usize) -> Presentation {
        Presentation {
            base: self.base.clone(),
            cols: self.cols,
            names: self.names[..len].to_vec(),
            kinds: self.kinds[..len].to_vec(),
            tower: self.tower.prefix(self.base.nvars() + len),
        }
    }

    /// The tower generated by the base and the first `len` slots.
    pub fn tower_upto(&self, len: usize) -> Tower {
        self.tower.prefix(self.base.nvars() + len)
    }

    /// `trans`, `alg <minpoly>` or `= <value>`, using the slot's own name for
    /// the minimal polynomial's variable.
    pub fn describe(&self, k: usize) -> String {
        match &self.kinds[k] {
            SlotKind::Transcendental => "trans".into(),
            SlotKind::Algebraic(_) => format!("alg {}", self.tower.display_minpoly(self.var(k)).unwrap_or_default()),
            SlotKind::Element(e) => format!("= {}", self.tower.display(e)),
        }
    }
}
