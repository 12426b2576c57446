use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ArithError;

/// Prime field or the rationals. Everything built on top carries one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseField {
    Prime(u64),
    Rationals,
}

impl BaseField {
    /// Largest modulus accepted; keeps products of residues inside `u64`.
    pub const MAX_PRIME: u64 = 1 << 31;

    pub fn prime(p: u64) -> Result<Self, ArithError> {
        if p < 2 || p > Self::MAX_PRIME || !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        Ok(BaseField::Prime(p))
    }

    /// 0 for the rationals.
    pub fn characteristic(self) -> u64 {
        match self {
            BaseField::Prime(p) => p,
            BaseField::Rationals => 0,
        }
    }

    pub fn zero(self) -> Coeff {
        self.from_i64(0)
    }

    pub fn one(self) -> Coeff {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Coeff {
        match self {
            BaseField::Prime(p) => Coeff::Mod {
                value: n.rem_euclid(p as i64) as u64,
                modulus: p,
            },
            BaseField::Rationals => Coeff::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn from_bigint(self, n: &BigInt) -> Coeff {
        match self {
            BaseField::Prime(p) => {
                let r = ((n % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
                Coeff::Mod {
                    value: r.to_u64().expect("residue fits"),
                    modulus: p,
                }
            }
            BaseField::Rationals => Coeff::Rat(BigRational::from_integer(n.clone())),
        }
    }

    /// `n / d` as a field element.
    pub fn ratio(self, n: i64, d: i64) -> Result<Coeff, ArithError> {
        let den = self.from_i64(d).inv().ok_or(ArithError::DivisionByZero)?;
        Ok(&self.from_i64(n) * &den)
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Prime(p) => write!(f, "F{p}"),
            BaseField::Rationals => write!(f, "Q"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A coefficient: a residue mod p or an exact fraction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coeff {
    Mod { value: u64, modulus: u64 },
    Rat(BigRational),
}

impl Coeff {
    pub fn field(&self) -> BaseField {
        match self {
            Coeff::Mod { modulus, .. } => BaseField::Prime(*modulus),
            Coeff::Rat(_) => BaseField::Rationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Mod { value, .. } => *value == 0,
            Coeff::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Mod { value, .. } => *value == 1,
            Coeff::Rat(r) => r.is_one(),
        }
    }

    pub fn inv(&self) -> Option<Coeff> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Coeff::Mod { value, modulus } => Coeff::Mod {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
            Coeff::Rat(r) => Coeff::Rat(r.recip()),
        })
    }

    pub fn pow(&self, mut e: u64) -> Coeff {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// True for a negative rational; residues are never negative. Used by printers.
    pub fn is_negative(&self) -> bool {
        matches!(self, Coeff::Rat(r) if r.is_negative())
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

impl<'a> std::ops::Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Mod { value: a, modulus }, Coeff::Mod { value: b, .. }) => Coeff::Mod {
                value: (a + b) % modulus,
                modulus: *modulus,
            },
            (Coeff::Rat(a), Coeff::Rat(b)) => Coeff::Rat(a + b),
            _ => panic!("coefficients from different base fields"),
        }
    }
}

impl<'a> std::ops::Sub<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Mod { value: a, modulus }, Coeff::Mod { value: b, .. }) => Coeff::Mod {
                value: (a + modulus - b) % modulus,
                modulus: *modulus,
            },
            (Coeff::Rat(a), Coeff::Rat(b)) => Coeff::Rat(a - b),
            _ => panic!("coefficients from different base fields"),
        }
    }
}

impl<'a> std::ops::Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Mod { value: a, modulus }, Coeff::Mod { value: b, .. }) => Coeff::Mod {
                value: a * b % modulus,
                modulus: *modulus,
            },
            (Coeff::Rat(a), Coeff::Rat(b)) => Coeff::Rat(a * b),
            _ => panic!("coefficients from different base fields"),
        }
    }
}

impl std::ops::Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Mod { value, modulus } => Coeff::Mod {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
            Coeff::Rat(r) => Coeff::Rat(-r),
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Mod { value, .. } => write!(f, "{value}"),
            Coeff::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_moduli() {
        assert!(BaseField::prime(4).is_err());
        assert!(BaseField::prime(1).is_err());
        assert!(BaseField::prime(7).is_ok());
    }

    #[test]
    fn residues_are_reduced() {
        let f = BaseField::prime(3).unwrap();
        assert_eq!(f.from_i64(-1), f.from_i64(2));
        assert_eq!(f.from_i64(2).inv().unwrap(), f.from_i64(2));
        assert!(f.from_i64(3).is_zero());
    }

    #[test]
    fn rational_ratio_is_lowest_terms() {
        let q = BaseField::Rationals;
        assert_eq!(q.ratio(2, 4).unwrap().to_string(), "1/2");
        assert!(q.ratio(1, 0).is_err());
    }
}
