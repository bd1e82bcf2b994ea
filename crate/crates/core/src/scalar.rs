//! Gaussian rationals: the exact ground field.
//!
//! Every scalar in this crate is a `Gq`, a complex number `re + im*i` with
//! arbitrary-precision rational parts. `num_rational::BigRational` keeps each
//! part in lowest terms with positive denominator, so equality is literal
//! structural equality and no rounding can occur anywhere.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gq { re, im }
    }

    pub fn zero() -> Self {
        Gq {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Gq {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Gq {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Gq {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// `p/q`, exact. Panics on `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Gq {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    /// `(p + q*i)/r`, handy for table constants.
    pub fn from_parts(p: i64, q: i64, r: i64) -> Self {
        assert!(r != 0, "zero denominator");
        Gq {
            re: BigRational::new(BigInt::from(p), BigInt::from(r)),
            im: BigRational::new(BigInt::from(q), BigInt::from(r)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gq {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `re^2 + im^2`, a nonnegative rational, zero iff the number is zero.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DegenerateScalar);
        }
        let n = self.norm_sq();
        Ok(Gq {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn div(&self, other: &Gq) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Gq::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Uniform small integer, for seeding exact constructions.
    pub fn random_int<R: Rng>(rng: &mut R, bound: i64) -> Self {
        Gq::from_int(rng.gen_range(-bound..=bound))
    }

    /// Uniform small nonzero integer.
    pub fn random_nonzero<R: Rng>(rng: &mut R, bound: i64) -> Self {
        loop {
            let v = rng.gen_range(-bound..=bound);
            if v != 0 {
                return Gq::from_int(v);
            }
        }
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", fmt_rat(&self.im));
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*i", fmt_rat(&self.re), fmt_rat(&(-self.im.clone())))
        } else {
            write!(f, "{}+{}*i", fmt_rat(&self.re), fmt_rat(&self.im))
        }
    }
}

impl fmt::Debug for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        Some(BigRational::new(p, q))
    } else {
        Some(BigRational::from_integer(BigInt::from_str(s).ok()?))
    }
}

impl FromStr for Gq {
    type Err = Error;

    /// Parses `"p/q"`, `"p/q+r/s*i"`, `"p/q-r/s*i"`, `"r/s*i"`, `"i"`, `"-i"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace(' ', "");
        let bad = || Error::Construction(format!("unparseable scalar: {s:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        // Split at a '+' or '-' that is not the leading sign.
        let bytes = s.as_bytes();
        let mut split = None;
        for (idx, &b) in bytes.iter().enumerate().skip(1) {
            if b == b'+' || b == b'-' {
                split = Some(idx);
            }
        }
        let (re_str, im_str) = match split {
            Some(idx) if s.ends_with('i') => (&s[..idx], &s[idx..]),
            _ => {
                if s.ends_with('i') {
                    ("", s.as_str())
                } else {
                    (s.as_str(), "")
                }
            }
        };
        let re = if re_str.is_empty() {
            BigRational::zero()
        } else {
            parse_rat(re_str).ok_or_else(bad)?
        };
        let im = if im_str.is_empty() {
            BigRational::zero()
        } else {
            let t = im_str.strip_suffix('i').ok_or_else(bad)?;
            let t = t.strip_suffix('*').unwrap_or(t);
            match t {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                _ => parse_rat(t).ok_or_else(bad)?,
            }
        };
        Ok(Gq { re, im })
    }
}

impl Serialize for Gq {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Gq {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        Gq::from_str(&s).map_err(|e| de::Error::custom(e.to_string()))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a, 'b> $trait<&'b Gq> for &'a Gq {
            type Output = Gq;
            fn $method(self, rhs: &'b Gq) -> Gq {
                binop_impl_inner!(self, rhs, $op)
            }
        }
        impl $trait<Gq> for Gq {
            type Output = Gq;
            fn $method(self, rhs: Gq) -> Gq {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Gq> for Gq {
            type Output = Gq;
            fn $method(self, rhs: &'a Gq) -> Gq {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Gq> for &'a Gq {
            type Output = Gq;
            fn $method(self, rhs: Gq) -> Gq {
                self.$method(&rhs)
            }
        }
    };
}

macro_rules! binop_impl_inner {
    ($a:expr, $b:expr, add) => {
        Gq {
            re: &$a.re + &$b.re,
            im: &$a.im + &$b.im,
        }
    };
    ($a:expr, $b:expr, sub) => {
        Gq {
            re: &$a.re - &$b.re,
            im: &$a.im - &$b.im,
        }
    };
    ($a:expr, $b:expr, mul) => {
        Gq {
            re: &$a.re * &$b.re - &$a.im * &$b.im,
            im: &$a.re * &$b.im + &$a.im * &$b.re,
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl Neg for Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl<'a> Neg for &'a Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl AddAssign<&Gq> for Gq {
    fn add_assign(&mut self, rhs: &Gq) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Gq> for Gq {
    fn sub_assign(&mut self, rhs: &Gq) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Gq> for Gq {
    fn mul_assign(&mut self, rhs: &Gq) {
        *self = &*self * rhs;
    }
}

/// The four arithmetic operations behind one entry point, with exact results.
pub fn qi_arith(a: &Gq, b: &Gq, op: ArithOp) -> Result<Gq> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.div(b)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}


#[cfg(test)]
mod arith_entry_tests {
    use super::*;

    #[test]
    fn qi_arith_dispatch() {
        let a = Gq::from_parts(1, 1, 1); // 1 + i
        let b = a.conj();
        assert_eq!(qi_arith(&a, &b, ArithOp::Mul).unwrap(), Gq::from_int(2));
        assert_eq!(
            qi_arith(&Gq::from_ratio(3, 2), &Gq::from_ratio(-3, 2), ArithOp::Add).unwrap(),
            Gq::zero()
        );
        let c = Gq::from_parts(2, 3, 1);
        assert!(qi_arith(&c, &c, ArithOp::Div).unwrap().is_one());
        assert_eq!(
            qi_arith(&a, &Gq::zero(), ArithOp::Div).unwrap_err(),
            Error::DegenerateScalar
        );
        assert_eq!(qi_arith(&a, &b, ArithOp::Sub).unwrap(), Gq::i() + Gq::i());
    }
}
