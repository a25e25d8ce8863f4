//! Smooth train paths and their measures by interval propagation.

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::Value;

use super::measure::{Measure, MeasureChart};
use super::track::{End, Endpoint, Side, TrainTrack};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Branches with orientations; `+1` runs from the `from` end to the `to` end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainPath {
    pub steps: Vec<(String, i8)>,
}

impl TrainPath {
    pub fn new(steps: Vec<(String, i8)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::NonSmoothPath("empty path".into()));
        }
        if steps.iter().any(|(_, o)| *o != 1 && *o != -1) {
            return Err(Error::NonSmoothPath("orientations are ±1".into()));
        }
        Ok(TrainPath { steps })
    }

    /// `["m2", "b", "-m6"]`; a leading `-` reverses the branch.
    pub fn parse(items: &[&str]) -> Result<Self> {
        Self::new(
            items
                .iter()
                .map(|s| match s.strip_prefix('-') {
                    Some(b) => (b.to_string(), -1),
                    None => (s.to_string(), 1),
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::Parse("a path is an array of branch ids".into()))?
            .iter()
            .map(|x| x.as_str().ok_or_else(|| Error::Parse("branch ids are strings".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::parse(&items)
    }

    pub fn render(&self) -> Vec<String> {
        self.steps.iter().map(|(b, o)| if *o > 0 { b.clone() } else { format!("-{b}") }).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Whether `self` occurs as a contiguous run of `other`, in either direction.
    pub fn is_subpath_of(&self, other: &TrainPath) -> bool {
        let rev: Vec<(String, i8)> = self.steps.iter().rev().map(|(b, o)| (b.clone(), -o)).collect();
        let k = self.steps.len();
        k <= other.steps.len()
            && other.steps.windows(k).any(|w| w == self.steps.as_slice() || w == rev.as_slice())
    }
}

fn exit_end(o: i8) -> End {
    if o > 0 {
        End::To
    } else {
        End::From
    }
}

fn entry_end(o: i8) -> End {
    exit_end(o).other()
}

/// Consecutive branches must meet at one switch from opposite sides.
pub fn check_smooth(t: &TrainTrack, p: &TrainPath) -> Result<()> {
    for (b, _) in &p.steps {
        t.branch(b)?;
    }
    for w in p.steps.windows(2) {
        let x = t.endpoint(&w[0].0, exit_end(w[0].1))?;
        let y = t.endpoint(&w[1].0, entry_end(w[1].1))?;
        if x.switch != y.switch || x.side == y.side {
            return Err(Error::NonSmoothPath(format!("{} does not continue smoothly into {}", w[0].0, w[1].0)));
        }
    }
    Ok(())
}

/// Operations needed to evaluate measures of paths and arcs.
pub trait WeightAlgebra {
    type V: Clone;
    fn weight(&self, branch: &str) -> Result<Self::V>;
    fn zero(&self) -> Self::V;
    fn add(&self, x: &Self::V, y: &Self::V) -> Self::V;
    fn sub(&self, x: &Self::V, y: &Self::V) -> Self::V;
    fn scale(&self, x: &Self::V, k: i64) -> Self::V;
    fn max(&self, x: &Self::V, y: &Self::V) -> Result<Self::V>;
    fn min(&self, x: &Self::V, y: &Self::V) -> Result<Self::V>;
}

/// Evaluation at a concrete measure.
pub struct ScalarWeights<'a, S> {
    pub mu: &'a Measure<S>,
}

impl<S: Scalar> WeightAlgebra for ScalarWeights<'_, S> {
    type V = S;
    fn weight(&self, branch: &str) -> Result<S> {
        self.mu.get(branch).cloned()
    }
    fn zero(&self) -> S {
        S::zero_s()
    }
    fn add(&self, x: &S, y: &S) -> S {
        x.add(y)
    }
    fn sub(&self, x: &S, y: &S) -> S {
        x.sub(y)
    }
    fn scale(&self, x: &S, k: i64) -> S {
        x.mul(&S::from_i64(k))
    }
    fn max(&self, x: &S, y: &S) -> Result<S> {
        Ok(x.max_s(y))
    }
    fn min(&self, x: &S, y: &S) -> Result<S> {
        Ok(if y.cmp_s(x).is_lt() { y.clone() } else { x.clone() })
    }
}

/// Value at a base measure together with its linear germ in chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub value: BigRational,
    pub row: Vec<BigRational>,
}

/// Evaluation of the linear piece containing a base measure; a tie between
/// different linear forms at the base point is an error.
pub struct AffineWeights<'a> {
    chart: &'a MeasureChart,
    base: Measure<BigRational>,
}

impl<'a> AffineWeights<'a> {
    pub fn new(chart: &'a MeasureChart, coords: &[BigRational]) -> Result<Self> {
        Ok(AffineWeights { chart, base: chart.measure(coords)? })
    }

    pub fn base(&self) -> &Measure<BigRational> {
        &self.base
    }

    fn pick(&self, x: &Affine, y: &Affine, want_max: bool) -> Result<Affine> {
        match x.value.cmp(&y.value) {
            std::cmp::Ordering::Equal if x.row != y.row => Err(Error::TieAtBasepoint(
                "two different linear pieces agree at the base measure".into(),
            )),
            std::cmp::Ordering::Less => Ok(if want_max { y.clone() } else { x.clone() }),
            _ => Ok(if want_max { x.clone() } else { y.clone() }),
        }
    }
}

impl WeightAlgebra for AffineWeights<'_> {
    type V = Affine;
    fn weight(&self, branch: &str) -> Result<Affine> {
        Ok(Affine { value: self.base.get(branch)?.clone(), row: self.chart.row(branch)?.to_vec() })
    }
    fn zero(&self) -> Affine {
        Affine { value: BigRational::zero(), row: vec![BigRational::zero(); self.chart.dim()] }
    }
    fn add(&self, x: &Affine, y: &Affine) -> Affine {
        Affine { value: &x.value + &y.value, row: x.row.iter().zip(&y.row).map(|(a, b)| a + b).collect() }
    }
    fn sub(&self, x: &Affine, y: &Affine) -> Affine {
        Affine { value: &x.value - &y.value, row: x.row.iter().zip(&y.row).map(|(a, b)| a - b).collect() }
    }
    fn scale(&self, x: &Affine, k: i64) -> Affine {
        let k = BigRational::from_integer(k.into());
        Affine { value: &x.value * &k, row: x.row.iter().map(|a| a * &k).collect() }
    }
    fn max(&self, x: &Affine, y: &Affine) -> Result<Affine> {
        self.pick(x, y, true)
    }
    fn min(&self, x: &Affine, y: &Affine) -> Result<Affine> {
        self.pick(x, y, false)
    }
}

// Sum of the weights stacked before this end on its side of the switch.
fn offset<A: WeightAlgebra>(t: &TrainTrack, ep: &Endpoint, alg: &A) -> Result<A::V> {
    let s = &t.switches()[ep.switch];
    s.side(ep.side)[..ep.position].iter().try_fold(alg.zero(), |acc, h| Ok(alg.add(&acc, &alg.weight(&h.branch)?)))
}

// A branch end carries the cross-section of its band onto the switch stack
// directly when it leaves side B or arrives at side A, reversed otherwise.
fn is_direct(end: End, side: Side) -> bool {
    matches!((end, side), (End::From, Side::B) | (End::To, Side::A))
}

fn transfer<A: WeightAlgebra>(
    alg: &A,
    direct: bool,
    to_stack: bool,
    off: &A::V,
    mu: &A::V,
    lo: &A::V,
    hi: &A::V,
) -> (A::V, A::V) {
    if direct {
        if to_stack {
            (alg.add(off, lo), alg.add(off, hi))
        } else {
            (alg.sub(lo, off), alg.sub(hi, off))
        }
    } else {
        let top = alg.add(off, mu);
        (alg.sub(&top, hi), alg.sub(&top, lo))
    }
}

/// Measure of the band of leaves following the whole path.
pub fn path_measure_with<A: WeightAlgebra>(t: &TrainTrack, p: &TrainPath, alg: &A) -> Result<A::V> {
    check_smooth(t, p)?;
    let mut lo = alg.zero();
    let mut hi = alg.weight(&p.steps[0].0)?;
    for w in p.steps.windows(2) {
        let (e, o) = (&w[0].0, w[0].1);
        let x = t.endpoint(e, exit_end(o))?;
        let (off, mu) = (offset(t, x, alg)?, alg.weight(e)?);
        (lo, hi) = transfer(alg, is_direct(exit_end(o), x.side), true, &off, &mu, &lo, &hi);
        let (f, of) = (&w[1].0, w[1].1);
        let y = t.endpoint(f, entry_end(of))?;
        let (off, mu) = (offset(t, y, alg)?, alg.weight(f)?);
        (lo, hi) = transfer(alg, is_direct(entry_end(of), y.side), false, &off, &mu, &lo, &hi);
        lo = alg.max(&lo, &alg.zero())?;
        hi = alg.min(&hi, &mu)?;
    }
    let len = alg.sub(&hi, &lo);
    alg.max(&len, &alg.zero())
}

pub fn path_measure<S: Scalar>(t: &TrainTrack, p: &TrainPath, mu: &Measure<S>) -> Result<S> {
    path_measure_with(t, p, &ScalarWeights { mu })
}
