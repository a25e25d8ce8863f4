//! Dense integer polynomials, coefficients lowest degree first.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn x_minus_one() -> Self {
        Self::from_i64(&[-1, 1])
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        IntPoly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::default();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPoly::new(c)
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        (0..e).fold(IntPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        self.add(&o.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Quotient and remainder by a monic divisor.
    pub fn div_rem_monic(&self, d: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(d.is_monic(), "divisor must be monic");
        let dd = d.degree();
        if self.coeffs.len() <= dd {
            return (IntPoly::default(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &c * dc;
            }
            q[k] = c;
        }
        r.truncate(dd);
        (IntPoly::new(q), IntPoly::new(r))
    }

    /// `self / d` when `d` (monic) divides exactly.
    pub fn exact_div(&self, d: &IntPoly) -> Option<IntPoly> {
        let (q, r) = self.div_rem_monic(d);
        r.is_zero().then_some(q)
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + crate::scalar::bigint_to_f64(c))
    }

    /// Sign of `p(m / 2^k)`.
    pub fn sign_at_dyadic(&self, m: &BigInt, k: usize) -> Ordering {
        let d = self.degree();
        let mut acc = BigInt::zero();
        let mut mp = BigInt::one();
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += (c * &mp) << (k * (d - i));
            mp *= m;
        }
        acc.cmp(&BigInt::zero())
    }

    /// Largest power of `x` dividing the polynomial.
    pub fn zero_root_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn shift_down(&self, k: usize) -> IntPoly {
        IntPoly::new(self.coeffs[k.min(self.coeffs.len())..].to_vec())
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> IntPoly {
        let g = self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return self.clone();
        }
        let g = if self.lead().is_negative() { -g } else { g };
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Product of the distinct irreducible factors, as a primitive polynomial.
    pub fn square_free(&self) -> IntPoly {
        if self.degree() < 1 {
            return self.clone();
        }
        let g = rat_gcd(&to_rat(self), &to_rat(&self.derivative()));
        if g.len() <= 1 {
            return self.primitive();
        }
        let (q, _) = rat_div_rem(&to_rat(self), &g);
        from_rat(&q)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let coef = if a.is_one() && i > 0 { String::new() } else { a.to_string() };
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{i}")?,
            }
        }
        Ok(())
    }
}

fn to_rat(p: &IntPoly) -> Vec<BigRational> {
    p.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn from_rat(p: &[BigRational]) -> IntPoly {
    let den = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    IntPoly::new(p.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect())
        .primitive()
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rat_div_rem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] / &b[db];
        for (j, bc) in b.iter().enumerate() {
            r[k + j] -= &c * bc;
        }
        q[k] = c;
    }
    r.truncate(db);
    trim(&mut r);
    (q, r)
}

fn rat_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = rat_div_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(l) = x.last().cloned() {
        for c in x.iter_mut() {
            *c = &*c / &l;
        }
    }
    x
}

/// Euler's totient.
pub fn totient(d: u64) -> u64 {
    let (mut n, mut res, mut p) = (d, d, 2u64);
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            res -= res / p;
        }
        p += 1;
    }
    if n > 1 {
        res -= res / n;
    }
    res
}

/// Cyclotomic polynomials by recursive division of `x^d − 1`.
#[derive(Default)]
pub struct Cyclotomics {
    cache: HashMap<u64, IntPoly>,
}

impl Cyclotomics {
    pub fn get(&mut self, d: u64) -> IntPoly {
        if let Some(p) = self.cache.get(&d) {
            return p.clone();
        }
        let mut p = IntPoly::monomial(d as usize).sub(&IntPoly::one());
        for k in 1..d {
            if d.is_multiple_of(k) {
                let phi_k = self.get(k);
                p = p.exact_div(&phi_k).expect("cyclotomic factor divides");
            }
        }
        self.cache.insert(d, p.clone());
        p
    }
}

pub fn cyclotomic(d: u64) -> IntPoly {
    Cyclotomics::default().get(d)
}
