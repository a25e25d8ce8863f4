//! Transverse measures and charts on the measure space.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use super::track::{Side, TrainTrack};
use crate::error::{Error, Result};
use crate::json::{parse_rational, scalar_json};
use crate::linalg::RatMatrix;
use crate::scalar::Scalar;

/// Branch weights by branch id.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure<S> {
    weights: BTreeMap<String, S>,
}

impl<S: Scalar> Measure<S> {
    pub fn new(weights: BTreeMap<String, S>) -> Self {
        Measure { weights }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, S)>) -> Self {
        Measure { weights: pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
    }

    pub fn get(&self, branch: &str) -> Result<&S> {
        self.weights.get(branch).ok_or_else(|| Error::MissingWeight(branch.to_string()))
    }

    pub fn insert(&mut self, branch: &str, w: S) {
        self.weights.insert(branch.to_string(), w);
    }

    pub fn weights(&self) -> &BTreeMap<String, S> {
        &self.weights
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Measure<T> {
        Measure { weights: self.weights.iter().map(|(k, v)| (k.clone(), f(v))).collect() }
    }

    /// Every weight of `t` present and nonnegative.
    pub fn check_nonnegative(&self, t: &TrainTrack) -> Result<()> {
        for b in t.branches() {
            if self.get(&b.id)?.cmp_s(&S::zero_s()).is_lt() {
                return Err(Error::InvalidTrack(format!("negative weight on branch {:?}", b.id)));
            }
        }
        Ok(())
    }
}

impl<S: Scalar + ToString> Measure<S> {
    pub fn to_json(&self) -> Value {
        Value::Object(self.weights.iter().map(|(k, v)| (k.clone(), scalar_json(v))).collect::<Map<_, _>>())
    }
}

impl Measure<BigRational> {
    /// `{"branch": weight, ...}` with numbers or `"p/q"` strings.
    pub fn from_json(v: &Value) -> Result<Self> {
        let o = v.as_object().ok_or_else(|| Error::Parse("measure must be an object".into()))?;
        let weights = o
            .iter()
            .map(|(k, x)| Ok((k.clone(), parse_rational(x)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Measure { weights })
    }
}

/// Whether the weights entering each side of every switch balance.
pub fn check_switch_conditions<S: Scalar>(t: &TrainTrack, mu: &Measure<S>) -> Result<bool> {
    for s in t.switches() {
        let total = |side: Side| -> Result<S> {
            s.side(side).iter().try_fold(S::zero_s(), |acc, h| Ok(acc.add(mu.get(&h.branch)?)))
        };
        if !total(Side::A)?.eq_s(&total(Side::B)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rows are switches, columns branches in track order; the measure space is
/// the nonnegative part of its kernel.
pub fn switch_matrix(t: &TrainTrack) -> RatMatrix {
    let mut m = RatMatrix::zeros(t.switches().len(), t.branches().len());
    for (i, s) in t.switches().iter().enumerate() {
        for (side, sign) in [(Side::A, 1i64), (Side::B, -1)] {
            for h in s.side(side) {
                let j = t.branch_position(&h.branch).expect("validated track");
                let v = m.get(i, j) + BigRational::from_integer(sign.into());
                m.set(i, j, v);
            }
        }
    }
    m
}

/// Basis of the kernel of a rational matrix.
pub fn nullspace(m: &RatMatrix) -> Vec<Vec<BigRational>> {
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); m.cols()];
            v[f] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, f).clone();
            }
            v
        })
        .collect()
}

/// Linear coordinates on the measure space: every branch weight as a
/// combination of the weights of the chosen coordinate branches.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureChart {
    coords: Vec<String>,
    /// Branch id → row of coefficients over `coords`.
    rows: BTreeMap<String, Vec<BigRational>>,
}

impl MeasureChart {
    pub fn new(t: &TrainTrack, coords: &[String]) -> Result<Self> {
        let basis = nullspace(&switch_matrix(t));
        let r = basis.len();
        if coords.len() != r {
            return Err(Error::Dimension(format!(
                "{} coordinate branches for a measure space of dimension {r}",
                coords.len()
            )));
        }
        let idx: Vec<usize> = coords
            .iter()
            .map(|c| t.branch_position(c).ok_or_else(|| Error::InvalidTrack(format!("unknown branch {c:?}"))))
            .collect::<Result<_>>()?;
        // N: branches × r, N_c: rows of N at the coordinates
        let n_c = RatMatrix::from_rows(idx.iter().map(|&i| basis.iter().map(|v| v[i].clone()).collect()).collect())
            .unwrap_or_else(|_| RatMatrix::zeros(0, 0));
        let inv = if r == 0 {
            RatMatrix::zeros(0, 0)
        } else {
            n_c.inverse().map_err(|_| {
                Error::Dimension(format!("branches {coords:?} are not coordinates on the measure space"))
            })?
        };
        let mut rows = BTreeMap::new();
        for (i, b) in t.branches().iter().enumerate() {
            let nrow: Vec<BigRational> = basis.iter().map(|v| v[i].clone()).collect();
            rows.insert(b.id.clone(), inv.left_mul_vec(&nrow));
        }
        Ok(MeasureChart { coords: coords.to_vec(), rows })
    }

    /// Chart on the track's declared coordinate branches.
    pub fn default_for(t: &TrainTrack) -> Result<Self> {
        Self::new(t, t.coordinates())
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn row(&self, branch: &str) -> Result<&[BigRational]> {
        self.rows.get(branch).map(Vec::as_slice).ok_or_else(|| Error::MissingWeight(branch.to_string()))
    }

    /// The measure with the given coordinate values.
    pub fn measure(&self, values: &[BigRational]) -> Result<Measure<BigRational>> {
        if values.len() != self.dim() {
            return Err(Error::Dimension(format!("expected {} coordinates", self.dim())));
        }
        Ok(Measure::new(
            self.rows
                .iter()
                .map(|(k, r)| (k.clone(), r.iter().zip(values).map(|(c, x)| c * x).sum()))
                .collect(),
        ))
    }

    /// Complete a measure from its coordinate weights.
    pub fn complete(&self, known: &Measure<BigRational>) -> Result<Measure<BigRational>> {
        let values = self.coords.iter().map(|c| known.get(c).cloned()).collect::<Result<Vec<_>>>()?;
        self.measure(&values)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "coordinates": self.coords,
            "rows": self.rows.iter().map(|(k, r)| (k.clone(), json!(r.iter().map(|x| x.to_string()).collect::<Vec<_>>()))).collect::<Map<_, _>>(),
        })
    }
}
