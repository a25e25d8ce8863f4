//! Exact characteristic polynomials, dilatations and spectral comparison.

mod poly;

pub use poly::{cyclotomic, totient, Cyclotomics, IntPoly};

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::matrix::{dynnikov_matrices, SearchOptions};
use crate::scalar::ratio_to_f64;

/// `det(xI − M)` by Berkowitz's division-free algorithm.
pub fn char_poly(m: &IntMatrix) -> Result<IntPoly> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    // q holds coefficients from the leading one down
    let mut q = vec![BigInt::one()];
    for r in 0..n {
        let a = m.get(r, r).clone();
        let row: Vec<BigInt> = (0..r).map(|j| m.get(r, j).clone()).collect();
        let mut s: Vec<BigInt> = (0..r).map(|i| m.get(i, r).clone()).collect();
        let mut c = vec![BigInt::one(), -a];
        for _ in 0..r {
            let rs: BigInt = row.iter().zip(&s).map(|(x, y)| x * y).sum();
            c.push(-rs);
            s = (0..r).map(|i| (0..r).map(|j| m.get(i, j) * &s[j]).sum()).collect();
        }
        let mut next = vec![BigInt::zero(); r + 2];
        for (k, slot) in next.iter_mut().enumerate() {
            for j in 0..=k.min(r) {
                *slot += &c[k - j] * &q[j];
            }
        }
        q = next;
    }
    q.reverse();
    Ok(IntPoly::new(q))
}

/// The dominant real root of a characteristic polynomial, isolated exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Dilatation {
    pub lower: BigRational,
    pub upper: BigRational,
    pub value: f64,
    /// The square-free polynomial the root was isolated on.
    pub poly: IntPoly,
}

impl Dilatation {
    pub fn ln(&self) -> f64 {
        self.value.ln()
    }

    /// Decimal expansion of the bracket midpoint to `sig` significant digits.
    pub fn digits(&self, sig: usize) -> String {
        let mid = (&self.lower + &self.upper) / BigRational::from_integer(BigInt::from(2));
        rational_to_decimal(&mid, sig)
    }

    /// Rounded to 12 significant digits.
    pub fn display(&self) -> String {
        self.digits(12)
    }
}

/// `r` rounded to `sig` significant digits, positional notation.
pub fn rational_to_decimal(r: &BigRational, sig: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let r = r.abs();
    let ten = BigInt::from(10);
    let mut e: i64 = r.to_integer().to_string().len() as i64 - 1;
    if r < BigRational::one() {
        e = -1;
        let mut t = r.clone() * BigRational::from_integer(ten.clone());
        while t < BigRational::one() {
            t *= BigRational::from_integer(ten.clone());
            e -= 1;
        }
    }
    let shift = sig as i64 - 1 - e;
    let scaled = if shift >= 0 {
        r * BigRational::from_integer(ten.pow(shift as u32))
    } else {
        r / BigRational::from_integer(ten.pow((-shift) as u32))
    };
    let digits = scaled.round().to_integer().to_string();
    let shift = shift + digits.len() as i64 - sig as i64;
    let digits = &digits[..sig.min(digits.len())];
    let s = if shift <= 0 {
        format!("{}{}", digits, "0".repeat((-shift) as usize))
    } else if (shift as usize) < digits.len() {
        let (i, f) = digits.split_at(digits.len() - shift as usize);
        format!("{i}.{f}")
    } else {
        format!("0.{}{}", "0".repeat(shift as usize - digits.len()), digits)
    };
    if neg {
        format!("-{s}")
    } else {
        s
    }
}

/// Roots of a polynomial from the companion matrix, in double precision.
pub fn approximate_roots(p: &IntPoly) -> Vec<(f64, f64)> {
    let d = p.degree();
    if d == 0 {
        return Vec::new();
    }
    let lead = p.lead();
    let c: Vec<f64> = p.coeffs().iter().map(|x| ratio_to_f64(x, &lead)).collect();
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        comp[(i, d - 1)] = -c[i];
    }
    comp.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
}

/// Dominant real root of `p`, refined by exact bisection to relative `2^-110`.
pub fn dominant_root(p: &IntPoly) -> Result<Dilatation> {
    let sqf = p.square_free();
    if sqf.degree() == 0 {
        return Err(Error::NoDominantRealRoot("constant polynomial".into()));
    }
    let roots = approximate_roots(&sqf);
    let (k, &(re, im)) = roots
        .iter()
        .enumerate()
        .max_by(|a, b| (a.1 .0.hypot(a.1 .1)).total_cmp(&b.1 .0.hypot(b.1 .1)))
        .expect("nonempty");
    let rho = re.hypot(im);
    if re <= 0.0 || im.abs() > 1e-9 * rho.max(1.0) {
        return Err(Error::NoDominantRealRoot(format!("largest root {re}{im:+}i is not positive real")));
    }
    let others = roots.iter().enumerate().filter(|(j, _)| *j != k);
    let second = others.clone().map(|(_, z)| z.0.hypot(z.1)).fold(0.0, f64::max);
    if second >= rho * (1.0 - 1e-12) {
        return Err(Error::NoDominantRealRoot(format!(
            "roots of modulus {rho} and {second} are not separated"
        )));
    }
    let gap = others.map(|(_, z)| (z.0 - re).hypot(z.1)).fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi, mut kbits) = isolate(&sqf, re, gap)?;
    // bisect until the bracket is narrower than 2^-112 relative
    while lo != hi && (lo.bits() as i64 - (&hi - &lo).bits() as i64) < 112 {
        lo <<= 1usize;
        hi <<= 1usize;
        kbits += 1;
        let mid = (&lo + &hi) >> 1usize;
        let s_mid = sqf.sign_at_dyadic(&mid, kbits);
        if s_mid == Ordering::Equal {
            lo = mid.clone();
            hi = mid;
        } else if s_mid == sqf.sign_at_dyadic(&lo, kbits) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let den = BigInt::one() << kbits;
    let lower = BigRational::new(lo.clone(), den.clone());
    let upper = BigRational::new(hi.clone(), den.clone());
    let value = ratio_to_f64(&(&lo + &hi), &(den << 1usize));
    Ok(Dilatation { lower, upper, value, poly: sqf })
}

// Dyadic bracket [lo, hi] / 2^k around the approximate root with a sign change.
fn isolate(p: &IntPoly, x: f64, gap: f64) -> Result<(BigInt, BigInt, usize)> {
    let k = (60 - x.abs().log2().ceil() as i64).max(0) as usize;
    let scale = 2f64.powi(k as i32);
    let mut h = (x.abs() * 1e-10).max(1e-300).min(gap / 4.0);
    for _ in 0..60 {
        let lo = BigInt::from(((x - h) * scale).floor() as i128);
        let hi = BigInt::from(((x + h) * scale).ceil() as i128);
        let (sl, sh) = (p.sign_at_dyadic(&lo, k), p.sign_at_dyadic(&hi, k));
        if sl == Ordering::Equal {
            return Ok((lo.clone(), lo, k));
        }
        if sh == Ordering::Equal {
            return Ok((hi.clone(), hi, k));
        }
        if sl != sh {
            return Ok((lo, hi, k));
        }
        h *= 2.0;
        if h > gap / 2.0 {
            break;
        }
    }
    Err(Error::NoDominantRealRoot(format!("could not bracket the root near {x}")))
}

/// Spectral radius of `M` when it is a dominant positive real eigenvalue.
pub fn dilatation(m: &IntMatrix) -> Result<Dilatation> {
    dominant_root(&char_poly(m)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMode {
    Exact,
    RootsOfUnityAndZeros,
    EigenvaluesOne,
}

impl std::str::FromStr for SpectrumMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SpectrumMode::Exact),
            "roots_of_unity_and_zeros" | "roots-of-unity-and-zeros" => {
                Ok(SpectrumMode::RootsOfUnityAndZeros)
            }
            "eigenvalues_one" | "eigenvalues-one" => Ok(SpectrumMode::EigenvaluesOne),
            _ => Err(Error::Parse(format!("unknown spectrum mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "factor")]
pub enum StrippedFactor {
    /// `x^k`
    Zero { multiplicity: u32 },
    /// `Φ_d^multiplicity`
    Cyclotomic { d: u64, multiplicity: u32 },
    /// `(x − 1)^multiplicity`
    One { multiplicity: u32 },
}

impl StrippedFactor {
    fn key(&self) -> (u8, u64) {
        match *self {
            StrippedFactor::Zero { .. } => (0, 0),
            StrippedFactor::Cyclotomic { d, .. } => (1, d),
            StrippedFactor::One { .. } => (2, 1),
        }
    }

    pub fn multiplicity(&self) -> u32 {
        match *self {
            StrippedFactor::Zero { multiplicity }
            | StrippedFactor::Cyclotomic { multiplicity, .. }
            | StrippedFactor::One { multiplicity } => multiplicity,
        }
    }

    fn with_multiplicity(&self, m: u32) -> Self {
        match *self {
            StrippedFactor::Zero { .. } => StrippedFactor::Zero { multiplicity: m },
            StrippedFactor::Cyclotomic { d, .. } => StrippedFactor::Cyclotomic { d, multiplicity: m },
            StrippedFactor::One { .. } => StrippedFactor::One { multiplicity: m },
        }
    }
}

/// Divide out the factors ignored by `mode`.
pub fn strip_trivial_factors(p: &IntPoly, mode: SpectrumMode) -> (IntPoly, Vec<StrippedFactor>) {
    let mut factors = Vec::new();
    match mode {
        SpectrumMode::Exact => (p.clone(), factors),
        SpectrumMode::EigenvaluesOne => {
            let (q, j) = divide_out(p, &IntPoly::x_minus_one());
            if j > 0 {
                factors.push(StrippedFactor::One { multiplicity: j });
            }
            (q, factors)
        }
        SpectrumMode::RootsOfUnityAndZeros => {
            let k = p.zero_root_multiplicity();
            let mut q = p.shift_down(k);
            if k > 0 {
                factors.push(StrippedFactor::Zero { multiplicity: k as u32 });
            }
            let deg0 = q.degree() as u64;
            let mut cyc = Cyclotomics::default();
            for d in 1..=(2 * deg0 * deg0).max(2) {
                if q.degree() == 0 {
                    break;
                }
                if totient(d) > q.degree() as u64 {
                    continue;
                }
                let (r, j) = divide_out(&q, &cyc.get(d));
                if j > 0 {
                    factors.push(StrippedFactor::Cyclotomic { d, multiplicity: j });
                    q = r;
                }
            }
            (q, factors)
        }
    }
}

fn divide_out(p: &IntPoly, d: &IntPoly) -> (IntPoly, u32) {
    let mut q = p.clone();
    let mut j = 0;
    while q.degree() >= d.degree() && !q.is_zero() {
        match q.exact_div(d) {
            Some(r) => {
                q = r;
                j += 1;
            }
            None => break,
        }
    }
    (q, j)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub mode: SpectrumMode,
    #[serde(with = "poly_serde")]
    pub left_poly: IntPoly,
    #[serde(with = "poly_serde")]
    pub right_poly: IntPoly,
    #[serde(with = "poly_serde")]
    pub left_stripped: IntPoly,
    #[serde(with = "poly_serde")]
    pub right_stripped: IntPoly,
    pub left_factors: Vec<StrippedFactor>,
    pub right_factors: Vec<StrippedFactor>,
    pub isospectral: bool,
}

impl SpectrumReport {
    /// Factors stripped from the left side beyond those stripped from the right.
    pub fn left_excess(&self) -> Vec<StrippedFactor> {
        excess(&self.left_factors, &self.right_factors)
    }

    pub fn right_excess(&self) -> Vec<StrippedFactor> {
        excess(&self.right_factors, &self.left_factors)
    }
}

fn excess(a: &[StrippedFactor], b: &[StrippedFactor]) -> Vec<StrippedFactor> {
    a.iter()
        .filter_map(|f| {
            let other = b.iter().find(|g| g.key() == f.key()).map_or(0, |g| g.multiplicity());
            (f.multiplicity() > other).then(|| f.with_multiplicity(f.multiplicity() - other))
        })
        .collect()
}

pub mod poly_serde {
    use super::IntPoly;
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &IntPoly, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(p.coeffs().iter().map(|c| c.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IntPoly, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let c: Result<Vec<BigInt>, _> = v.iter().map(|s| s.parse::<BigInt>()).collect();
        Ok(IntPoly::new(c.map_err(D::Error::custom)?))
    }
}

/// Compare the characteristic polynomials of `m1` and `m2` after stripping
/// the factors `mode` ignores.
pub fn isospectral_up_to(m1: &IntMatrix, m2: &IntMatrix, mode: SpectrumMode) -> Result<SpectrumReport> {
    let (p1, p2) = (char_poly(m1)?, char_poly(m2)?);
    Ok(compare_polys(p1, p2, mode))
}

pub fn compare_polys(p1: IntPoly, p2: IntPoly, mode: SpectrumMode) -> SpectrumReport {
    let (s1, f1) = strip_trivial_factors(&p1, mode);
    let (s2, f2) = strip_trivial_factors(&p2, mode);
    SpectrumReport {
        mode,
        isospectral: s1 == s2,
        left_poly: p1,
        right_poly: p2,
        left_stripped: s1,
        right_stripped: s2,
        left_factors: f1,
        right_factors: f2,
    }
}

/// Block matrix `[[A, B], [B, A]]`.
pub fn double_cover_lift(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Dimension("lift needs square blocks of equal size".into()));
    }
    let k = a.rows();
    let mut m = IntMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, a.get(i, j).clone());
            m.set(i + k, j + k, a.get(i, j).clone());
            m.set(i, j + k, b.get(i, j).clone());
            m.set(i + k, j, b.get(i, j).clone());
        }
    }
    Ok(m)
}

/// Compare the first Dynnikov matrix of `w^m` with `T^m` up to eigenvalues 1.
pub fn compare_power(
    w: &BraidWord,
    m: usize,
    t: &IntMatrix,
    opts: &SearchOptions,
) -> Result<SpectrumReport> {
    if m == 0 {
        return Err(Error::Parse("power must be positive".into()));
    }
    let mats = dynnikov_matrices(&w.power(m), opts)?;
    let tm = t.pow(m as u32)?;
    isospectral_up_to(&mats[0].matrix, &tm, SpectrumMode::EigenvaluesOne)
}

/// Largest modulus among the roots of `p`, in double precision.
pub fn spectral_radius_estimate(p: &IntPoly) -> f64 {
    approximate_roots(p).iter().map(|z| z.0.hypot(z.1)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn berkowitz_small() {
        let m = IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        assert_eq!(char_poly(&m).unwrap(), IntPoly::from_i64(&[1, -3, 1]));
        assert_eq!(char_poly(&IntMatrix::identity(3)).unwrap(), IntPoly::x_minus_one().pow(3));
        assert!(char_poly(&IntMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn golden_dilatation() {
        let d = dilatation(&IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]])).unwrap();
        let exact = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((d.value - exact).abs() < 1e-15);
        assert_eq!(d.display(), "2.61803398875");
        assert!(d.digits(31).starts_with("2.61803398874989484820458683436"));
        let width = &d.upper - &d.lower;
        assert!(width < BigRational::new(1.into(), BigInt::from(10).pow(30)));
    }

    #[test]
    fn no_dominant_root() {
        let rot = IntMatrix::from_i64_rows(&[&[0, -1], &[1, 0]]);
        assert!(matches!(dilatation(&rot), Err(Error::NoDominantRealRoot(_))));
        let swap = IntMatrix::from_i64_rows(&[&[0, 2], &[2, 0]]);
        assert!(matches!(dilatation(&swap), Err(Error::NoDominantRealRoot(_))));
    }

    #[test]
    fn strip_modes() {
        let q = IntPoly::from_i64(&[1, -3, 1]);
        let p = IntPoly::monomial(2).mul(&IntPoly::x_minus_one()).mul(&q);
        let (s, f) = strip_trivial_factors(&p, SpectrumMode::RootsOfUnityAndZeros);
        assert_eq!(s, q);
        assert_eq!(f.len(), 2);
        let g = IntPoly::from_i64(&[1, -34, 1]);
        let (s, f) = strip_trivial_factors(&IntPoly::x_minus_one().pow(2).mul(&g), SpectrumMode::EigenvaluesOne);
        assert_eq!(s, g);
        assert_eq!(f, vec![StrippedFactor::One { multiplicity: 2 }]);
        assert_eq!(strip_trivial_factors(&p, SpectrumMode::Exact).0, p);
    }

    #[test]
    fn decimal_rendering() {
        let r = BigRational::new(BigInt::from(86_123_456_789_012_345i64), BigInt::from(100));
        assert_eq!(rational_to_decimal(&r, 5), "861230000000000");
        assert_eq!(rational_to_decimal(&BigRational::new(1.into(), 800.into()), 3), "0.00125");
        assert_eq!(rational_to_decimal(&BigRational::new((-7).into(), 2.into()), 3), "-3.50");
    }
}
