use super::{ArithError, MPoly};

/// A quotient of polynomials. Not kept reduced; equality is by
/// cross-multiplication.
#[derive(Clone, Debug)]
pub struct RatExpr {
    pub num: MPoly,
    pub den: MPoly,
}

impl RatExpr {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(RatExpr { num, den })
    }

    pub fn from_poly(num: MPoly) -> Self {
        let den = MPoly::one(num.field());
        RatExpr { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatExpr) -> RatExpr {
        if self.den == o.den {
            return RatExpr { num: &self.num + &o.num, den: self.den.clone() };
        }
        RatExpr {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
    }

    pub fn neg(&self) -> RatExpr {
        RatExpr { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatExpr) -> RatExpr {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatExpr) -> RatExpr {
        RatExpr { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn div(&self, o: &RatExpr) -> Result<RatExpr, ArithError> {
        RatExpr::new(&self.num * &o.den, &self.den * &o.num)
    }

    /// Cheap cancellation for display: constant denominators, common
    /// monomials, exact division, and a univariate gcd when both sides live in
    /// one variable.
    pub fn simplified(&self) -> RatExpr {
        let (mut num, mut den) = (self.num.clone(), self.den.clone());
        if num.is_zero() {
            return RatExpr::from_poly(num);
        }
        let g = num.monomial_content().gcd(&den.monomial_content());
        if !g.is_one() {
            num = num.div_monomial(&g).unwrap();
            den = den.div_monomial(&g).unwrap();
        }
        if let Some(q) = num.div_exact(&den) {
            return RatExpr::from_poly(q);
        }
        let g = num.gcd(&den);
        if !g.is_constant() {
            num = num.div_exact(&g).unwrap();
            den = den.div_exact(&g).unwrap();
        }
        let lc = den.leading_coeff().inv().unwrap();
        RatExpr { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn display(&self, names: &[String]) -> String {
        let s = self.simplified();
        if s.den.is_one() {
            s.num.display(names)
        } else {
            format!("({})/({})", s.num.display(names), s.den.display(names))
        }
    }
}

impl PartialEq for RatExpr {
    fn eq(&self, o: &RatExpr) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }
}

impl Eq for RatExpr {}
