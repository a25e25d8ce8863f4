//! Points of the Dynnikov coordinate space.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{FieldScalar, Scalar};

/// Coordinates `(a₁..a_{n−2}, b₁..b_{n−2})` on `n` strands.
#[derive(Clone, Debug, PartialEq)]
pub struct DynnikovVector<S> {
    strands: usize,
    a: Vec<S>,
    b: Vec<S>,
}

impl<S: Scalar> DynnikovVector<S> {
    pub fn new(a: Vec<S>, b: Vec<S>) -> Result<Self> {
        let v = Self::new_unchecked(a, b)?;
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(v)
    }

    /// Like [`new`](Self::new) but allows the zero vector.
    pub fn new_unchecked(a: Vec<S>, b: Vec<S>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::Dimension(format!("a has {} entries, b has {}", a.len(), b.len())));
        }
        Ok(DynnikovVector { strands: a.len() + 2, a, b })
    }

    /// Split a flat `(a, b)` list.
    pub fn from_flat(x: Vec<S>) -> Result<Self> {
        if x.len() < 2 || x.len() % 2 == 1 {
            return Err(Error::Dimension(format!("{} coordinates is not 2n-4 for n >= 3", x.len())));
        }
        let mut a = x;
        let b = a.split_off(a.len() / 2);
        Self::new(a, b)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn a(&self) -> &[S] {
        &self.a
    }

    pub fn b(&self) -> &[S] {
        &self.b
    }

    pub fn dim(&self) -> usize {
        2 * self.a.len()
    }

    /// Flat index `k`: `a_{k+1}` for `k < n−2`, else `b_{k−n+3}`.
    pub fn get(&self, k: usize) -> &S {
        let m = self.a.len();
        if k < m {
            &self.a[k]
        } else {
            &self.b[k - m]
        }
    }

    pub fn set(&mut self, k: usize, v: S) {
        let m = self.a.len();
        if k < m {
            self.a[k] = v;
        } else {
            self.b[k - m] = v;
        }
    }

    pub fn to_flat(&self) -> Vec<S> {
        self.a.iter().chain(&self.b).cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(&self.b).all(|x| x.is_zero_s())
    }

    pub fn sup_norm(&self) -> S {
        self.a.iter().chain(&self.b).fold(S::zero_s(), |m, x| m.max_s(&x.abs_s()))
    }

    pub fn map<T: Scalar, F: Fn(&S) -> T>(&self, f: F) -> DynnikovVector<T> {
        DynnikovVector {
            strands: self.strands,
            a: self.a.iter().map(&f).collect(),
            b: self.b.iter().map(&f).collect(),
        }
    }

    pub fn to_f64(&self) -> DynnikovVector<f64> {
        self.map(|x| x.to_f64())
    }

    /// Exact equality of all coordinates.
    pub fn same(&self, other: &Self) -> bool {
        self.strands == other.strands
            && self.to_flat().iter().zip(other.to_flat().iter()).all(|(x, y)| x.eq_s(y))
    }

    pub fn mul_pow2(&self, e: i64) -> Self {
        self.map(|x| x.mul_pow2(e))
    }
}

impl<S: FieldScalar> DynnikovVector<S> {
    pub fn scale(&self, lambda: &S) -> Result<Self> {
        if lambda.cmp_s(&S::zero_s()) != Ordering::Greater {
            return Err(Error::NonPositiveScale);
        }
        Ok(self.map(|x| x.mul(lambda)))
    }

    /// Divide by the sup norm.
    pub fn normalize(&self) -> Result<Self> {
        let s = self.sup_norm();
        if s.is_zero_s() {
            return Err(Error::ZeroVector);
        }
        Ok(self.map(|x| x.div(&s)))
    }
}

impl DynnikovVector<BigRational> {
    pub fn from_i64(a: &[i64], b: &[i64]) -> Result<Self> {
        let f = |x: &i64| BigRational::from_integer(BigInt::from(*x));
        Self::new(a.iter().map(f).collect(), b.iter().map(f).collect())
    }
}

impl DynnikovVector<BigInt> {
    pub fn from_i64(a: &[i64], b: &[i64]) -> Result<Self> {
        Self::new(a.iter().map(|&x| x.into()).collect(), b.iter().map(|&x| x.into()).collect())
    }
}

/// Measures of the arcs `α₁..α_{2n−4}` and `β₁..β_{n−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleCoords<S> {
    pub alpha: Vec<S>,
    pub beta: Vec<S>,
}

impl<S: FieldScalar> TriangleCoords<S> {
    pub fn new(alpha: Vec<S>, beta: Vec<S>) -> Result<Self> {
        if alpha.iter().chain(&beta).any(|x| x.cmp_s(&S::zero_s()) == Ordering::Less) {
            return Err(Error::Dimension("arc measures must be nonnegative".into()));
        }
        Ok(TriangleCoords { alpha, beta })
    }
}

/// `a_i = (α_{2i} − α_{2i−1})/2`, `b_i = (β_i − β_{i+1})/2`.
pub fn from_triangle<S: FieldScalar>(t: &TriangleCoords<S>) -> Result<DynnikovVector<S>> {
    let m = t.beta.len().checked_sub(1).filter(|&m| m >= 1);
    let Some(m) = m.filter(|&m| t.alpha.len() == 2 * m) else {
        return Err(Error::Dimension(format!(
            "{} alpha and {} beta measures do not fit any n >= 3",
            t.alpha.len(),
            t.beta.len()
        )));
    };
    let two = S::from_i64(2);
    let a = (0..m).map(|i| t.alpha[2 * i + 1].sub(&t.alpha[2 * i]).div(&two)).collect();
    let b = (0..m).map(|i| t.beta[i].sub(&t.beta[i + 1]).div(&two)).collect();
    DynnikovVector::new(a, b)
}

/// Sup distance between sup-normalized representatives, minimized over sign.
pub fn projective_distance<S: FieldScalar>(
    v1: &DynnikovVector<S>,
    v2: &DynnikovVector<S>,
) -> Result<S> {
    let plus = ray_distance(v1, v2)?;
    let minus = ray_distance(v1, &v2.map(|x| x.neg()))?;
    Ok(if minus.cmp_s(&plus) == Ordering::Less { minus } else { plus })
}

/// Sup distance between sup-normalized representatives, without the sign quotient.
pub fn ray_distance<S: FieldScalar>(v1: &DynnikovVector<S>, v2: &DynnikovVector<S>) -> Result<S> {
    if v1.strands != v2.strands {
        return Err(Error::StrandMismatch(v1.strands, v2.strands));
    }
    let (x, y) = (v1.normalize()?, v2.normalize()?);
    Ok(x.to_flat().iter().zip(y.to_flat()).fold(S::zero_s(), |m, (p, q)| m.max_s(&p.sub(&q).abs_s())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(xs: &[i64]) -> Vec<BigRational> {
        xs.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn triangle_coordinates() {
        let t = TriangleCoords::new(q(&[4, 2, 1, 3, 2, 0]), q(&[6, 4, 2, 2])).unwrap();
        let v = from_triangle(&t).unwrap();
        assert_eq!(v.to_flat(), q(&[-1, 1, -1, 1, 1, 0]));
    }

    #[test]
    fn symmetric_arcs_are_degenerate() {
        let t = TriangleCoords::new(q(&[3, 3, 3, 3]), q(&[3, 3, 3])).unwrap();
        assert!(matches!(from_triangle(&t), Err(Error::ZeroVector)));
        let bad = TriangleCoords::new(q(&[1, 2, 3]), q(&[1, 2, 3])).unwrap();
        assert!(matches!(from_triangle(&bad), Err(Error::Dimension(_))));
    }

    #[test]
    fn scaling() {
        let v = DynnikovVector::<BigRational>::from_i64(&[-1, 1], &[2, 0]).unwrap();
        assert_eq!(v.scale(&rat(3, 1)).unwrap().to_flat(), q(&[-3, 3, 6, 0]));
        assert_eq!(v.scale(&rat(1, 1)).unwrap(), v);
        assert!(v.scale(&rat(0, 1)).is_err());
        assert_eq!(v.normalize().unwrap().sup_norm(), rat(1, 1));
    }

    #[test]
    fn distances() {
        let v = DynnikovVector::<BigRational>::from_i64(&[3], &[-2]).unwrap();
        let w = v.scale(&rat(2, 1)).unwrap();
        assert_eq!(projective_distance(&v, &w).unwrap(), rat(0, 1));
        assert_eq!(projective_distance(&v, &v.map(|x| -x)).unwrap(), rat(0, 1));
        assert_eq!(ray_distance(&v, &v.map(|x| -x)).unwrap(), rat(2, 1));
        let e1 = DynnikovVector::<BigRational>::from_i64(&[1], &[0]).unwrap();
        let e2 = DynnikovVector::<BigRational>::from_i64(&[0], &[1]).unwrap();
        assert_eq!(projective_distance(&e1, &e2).unwrap(), rat(1, 1));
    }
}
