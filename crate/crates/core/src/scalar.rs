//! Scalar kinds shared by the coordinate and update code.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarKind {
    Integer,
    Rational,
    BigFloat,
    Float,
}

/// Operations needed to evaluate the max-plus update formulas.
pub trait Scalar: Clone + fmt::Debug + Send + Sync + 'static {
    const KIND: ScalarKind;

    fn zero_s() -> Self;
    fn from_i64(x: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn mul_int(&self, k: &BigInt) -> Self;
    /// Multiply by `2^e`; integers round toward negative infinity.
    fn mul_pow2(&self, e: i64) -> Self;
    fn cmp_s(&self, other: &Self) -> Ordering;
    fn to_f64(&self) -> f64;

    /// Mantissa bits of inexact kinds, 0 for exact ones.
    fn precision_bits(&self) -> u32 {
        0
    }
    fn neg(&self) -> Self {
        Self::zero_s().sub(self)
    }
    fn is_zero_s(&self) -> bool {
        self.cmp_s(&Self::zero_s()) == Ordering::Equal
    }
    fn abs_s(&self) -> Self {
        if self.cmp_s(&Self::zero_s()) == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }
    fn max_s(&self, other: &Self) -> Self {
        if other.cmp_s(self) == Ordering::Greater {
            other.clone()
        } else {
            self.clone()
        }
    }
    fn eq_s(&self, other: &Self) -> bool {
        self.cmp_s(other) == Ordering::Equal
    }
}

/// Scalars with division.
pub trait FieldScalar: Scalar {
    fn div(&self, other: &Self) -> Self;
}

impl Scalar for BigInt {
    const KIND: ScalarKind = ScalarKind::Integer;
    fn zero_s() -> Self {
        Zero::zero()
    }
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        self * k
    }
    fn mul_pow2(&self, e: i64) -> Self {
        if e >= 0 {
            self << (e as usize)
        } else {
            self >> ((-e) as usize)
        }
    }
    fn cmp_s(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
    fn to_f64(&self) -> f64 {
        bigint_to_f64(self)
    }
}

impl Scalar for BigRational {
    const KIND: ScalarKind = ScalarKind::Rational;
    fn zero_s() -> Self {
        Zero::zero()
    }
    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        self * BigRational::from_integer(k.clone())
    }
    fn mul_pow2(&self, e: i64) -> Self {
        let p = BigInt::one() << (e.unsigned_abs() as usize);
        if e >= 0 {
            self * BigRational::from_integer(p)
        } else {
            self / BigRational::from_integer(p)
        }
    }
    fn cmp_s(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
    fn to_f64(&self) -> f64 {
        ratio_to_f64(self.numer(), self.denom())
    }
}

impl FieldScalar for BigRational {
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;
    fn zero_s() -> Self {
        0.0
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        self * bigint_to_f64(k)
    }
    fn mul_pow2(&self, e: i64) -> Self {
        self * 2f64.powi(e as i32)
    }
    fn cmp_s(&self, o: &Self) -> Ordering {
        self.partial_cmp(o).unwrap_or(Ordering::Equal)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn precision_bits(&self) -> u32 {
        53
    }
}

impl FieldScalar for f64 {
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

/// Binary floating point number `mant · 2^exp` rounded to `prec` mantissa bits.
///
/// Results of binary operations carry the larger of the two precisions; an
/// exact zero has precision 0 so it never lowers anything.
#[derive(Clone, Debug)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn from_bigint(m: BigInt, prec: u32) -> Self {
        Self::from_parts(m, 0, prec)
    }

    pub fn from_parts(mant: BigInt, exp: i64, prec: u32) -> Self {
        let mut x = BigFloat { mant, exp, prec };
        x.round();
        x
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite(), "non-finite float");
        if x == 0.0 {
            return BigFloat { mant: BigInt::zero(), exp: 0, prec };
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        Self::from_parts(BigInt::from(m) * sign, e, prec.max(53))
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        if r.is_zero() {
            return BigFloat { mant: BigInt::zero(), exp: 0, prec };
        }
        let shift = prec as i64 + r.denom().bits() as i64 - r.numer().bits() as i64 + 2;
        let num = if shift >= 0 {
            r.numer() << (shift as usize)
        } else {
            r.numer() >> ((-shift) as usize)
        };
        Self::from_parts(num / r.denom(), -shift, prec)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(&self, prec: u32) -> Self {
        Self::from_parts(self.mant.clone(), self.exp, prec)
    }

    pub fn mantissa(&self) -> (&BigInt, i64) {
        (&self.mant, self.exp)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as usize))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as usize))
        }
    }

    fn round(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let bits = self.mant.bits();
        let p = self.prec.max(1) as u64;
        if bits > p {
            let shift = (bits - p) as usize;
            let half = BigInt::one() << (shift - 1);
            self.mant = (&self.mant + half) >> shift;
            self.exp += shift as i64;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz as usize;
            self.exp += tz as i64;
        }
    }

    // exponent of the leading bit plus one
    fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    fn add_signed(&self, o: &BigFloat, negate: bool) -> BigFloat {
        let prec = self.prec.max(o.prec);
        let om = if negate { -&o.mant } else { o.mant.clone() };
        if o.mant.is_zero() {
            return Self::from_parts(self.mant.clone(), self.exp, prec);
        }
        if self.mant.is_zero() {
            return Self::from_parts(om, o.exp, prec);
        }
        let gap = prec as i64 + 4;
        if self.top() - o.top() > gap {
            return Self::from_parts(self.mant.clone(), self.exp, prec);
        }
        if o.top() - self.top() > gap {
            return Self::from_parts(om, o.exp, prec);
        }
        let e = self.exp.min(o.exp);
        let m = (&self.mant << ((self.exp - e) as usize)) + (om << ((o.exp - e) as usize));
        Self::from_parts(m, e, prec)
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_s(other) == Ordering::Equal
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl Scalar for BigFloat {
    const KIND: ScalarKind = ScalarKind::BigFloat;
    fn zero_s() -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0, prec: 0 }
    }
    fn from_i64(x: i64) -> Self {
        Self::from_parts(BigInt::from(x), 0, if x == 0 { 0 } else { 64 })
    }
    fn add(&self, o: &Self) -> Self {
        self.add_signed(o, false)
    }
    fn sub(&self, o: &Self) -> Self {
        self.add_signed(o, true)
    }
    fn mul(&self, o: &Self) -> Self {
        Self::from_parts(&self.mant * &o.mant, self.exp + o.exp, self.prec.max(o.prec))
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        Self::from_parts(&self.mant * k, self.exp, self.prec)
    }
    fn mul_pow2(&self, e: i64) -> Self {
        if self.mant.is_zero() {
            return self.clone();
        }
        BigFloat { mant: self.mant.clone(), exp: self.exp + e, prec: self.prec }
    }
    fn cmp_s(&self, o: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), o.mant.sign());
        let rank = |s: Sign| match s {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        };
        if sa != sb {
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let mag = if self.top() != o.top() {
            self.top().cmp(&o.top())
        } else {
            let e = self.exp.min(o.exp);
            let a = self.mant.abs() << ((self.exp - e) as usize);
            let b = o.mant.abs() << ((o.exp - e) as usize);
            a.cmp(&b)
        };
        if sa == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }
    fn precision_bits(&self) -> u32 {
        self.prec
    }
    fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let (m, e) = if bits > 60 {
            (&self.mant >> ((bits - 60) as usize), self.exp + bits - 60)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = ToPrimitive::to_f64(&m).unwrap_or(0.0);
        ldexp(mf, e)
    }
}

impl FieldScalar for BigFloat {
    fn div(&self, o: &Self) -> Self {
        assert!(!o.mant.is_zero(), "division by zero");
        let prec = self.prec.max(o.prec);
        let shift = prec as i64 + o.mant.bits() as i64 + 2;
        let num = &self.mant << (shift as usize);
        Self::from_parts(num / &o.mant, self.exp - o.exp - shift, prec)
    }
}

fn ldexp(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

pub fn bigint_to_f64(x: &BigInt) -> f64 {
    let bits = x.bits() as i64;
    if bits <= 60 {
        return ToPrimitive::to_f64(x).unwrap_or(0.0);
    }
    let m = x >> ((bits - 60) as usize);
    ldexp(ToPrimitive::to_f64(&m).unwrap_or(0.0), bits - 60)
}

/// `num / den` as a double without overflowing on huge operands.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << (shift as usize)).div_floor(den)
    } else {
        num.div_floor(&(den << ((-shift) as usize)))
    };
    ldexp(bigint_to_f64(&q), -shift)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Exact rational value of a finite double.
pub fn f64_to_rational(x: f64) -> BigRational {
    BigFloat::from_f64(x, 64).to_rational()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigfloat_roundtrip_and_order() {
        let x = BigFloat::from_f64(-1.618, 128);
        assert_eq!(x.to_f64(), -1.618);
        let y = BigFloat::from_i64(3);
        assert_eq!(x.add(&y).to_f64(), -1.618 + 3.0);
        assert_eq!(x.cmp_s(&y), Ordering::Less);
        assert_eq!(y.neg().cmp_s(&x), Ordering::Less);
        let third = BigFloat::from_i64(1).div(&BigFloat::from_parts(int(3), 0, 200));
        let err = third.to_rational() - rat(1, 3);
        assert!(err.abs() < BigRational::new(int(1), BigInt::one() << 199usize));
    }

    #[test]
    fn bigfloat_tiny_addend_absorbed() {
        let big = BigFloat::from_parts(int(1), 400, 64);
        let tiny = BigFloat::from_parts(int(1), -400, 64);
        assert!(big.add(&tiny).eq_s(&big));
        assert_eq!(tiny.cmp_s(&BigFloat::zero_s()), Ordering::Greater);
    }

    #[test]
    fn ratio_to_f64_large() {
        let a = BigInt::from(10).pow(40u32);
        let b = BigInt::from(3) * BigInt::from(10).pow(38u32);
        assert!((ratio_to_f64(&a, &b) - 100.0 / 3.0).abs() < 1e-12);
        assert_eq!(Scalar::to_f64(&rat(-7, 2)), -3.5);
    }
}
