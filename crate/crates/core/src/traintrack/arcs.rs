//! Measures of the triangle-coordinate arcs carried by a measured track.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use super::measure::{Measure, MeasureChart};
use super::paths::{check_smooth, path_measure_with, AffineWeights, ScalarWeights, TrainPath, WeightAlgebra};
use super::track::TrainTrack;
use crate::coords::{from_triangle, DynnikovVector, TriangleCoords};
use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::scalar::FieldScalar;

/// `α_k` (1 ≤ k ≤ 2n−4) or `β_k` (1 ≤ k ≤ n−1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcId {
    Alpha(usize),
    Beta(usize),
}

impl ArcId {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad arc name {s:?}"));
        let (kind, k) = s.split_once('_').ok_or_else(bad)?;
        let k: usize = k.parse().map_err(|_| bad())?;
        match kind {
            "alpha" if k >= 1 => Ok(ArcId::Alpha(k)),
            "beta" if k >= 1 => Ok(ArcId::Beta(k)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArcId::Alpha(k) => write!(f, "alpha_{k}"),
            ArcId::Beta(k) => write!(f, "beta_{k}"),
        }
    }
}

/// How an arc's measure is read off the track.
#[derive(Clone, Debug, PartialEq)]
pub enum ArcSpec {
    /// `Σ n_e µ(e) − 2 Σ µ(p)` over the listed branches and paths.
    Counted { counts: BTreeMap<String, i64>, paths: Vec<TrainPath> },
    /// The other arc of the same pair: `α_{2i−1} + α_{2i} = max(β_i, β_{i+1})`.
    Complement,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ArcAnnotations {
    pub arcs: BTreeMap<ArcId, ArcSpec>,
}

impl ArcAnnotations {
    pub fn from_json(v: &Value) -> Result<Self> {
        let o = v.as_object().ok_or_else(|| Error::Parse("annotations must be an object".into()))?;
        let mut arcs = BTreeMap::new();
        for (name, spec) in o {
            let id = ArcId::parse(name)?;
            let spec = if spec.get("complement").and_then(Value::as_bool) == Some(true) {
                ArcSpec::Complement
            } else {
                let counts = spec
                    .get("counts")
                    .and_then(Value::as_object)
                    .ok_or_else(|| Error::Parse(format!("{name}: missing \"counts\"")))?
                    .iter()
                    .map(|(b, n)| {
                        n.as_i64()
                            .map(|n| (b.clone(), n))
                            .ok_or_else(|| Error::Parse(format!("{name}: counts are integers")))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?;
                let paths = match spec.get("paths") {
                    None => Vec::new(),
                    Some(p) => p
                        .as_array()
                        .ok_or_else(|| Error::Parse(format!("{name}: paths must be an array")))?
                        .iter()
                        .map(TrainPath::from_json)
                        .collect::<Result<_>>()?,
                };
                ArcSpec::Counted { counts, paths }
            };
            arcs.insert(id, spec);
        }
        Ok(ArcAnnotations { arcs })
    }

    pub fn to_json(&self) -> Value {
        let mut o = Map::new();
        for (id, spec) in &self.arcs {
            let v = match spec {
                ArcSpec::Complement => json!({"complement": true}),
                ArcSpec::Counted { counts, paths } => json!({
                    "counts": counts,
                    "paths": paths.iter().map(TrainPath::render).collect::<Vec<_>>(),
                }),
            };
            o.insert(id.to_string(), v);
        }
        Value::Object(o)
    }

    pub fn get(&self, id: ArcId) -> Result<&ArcSpec> {
        self.arcs.get(&id).ok_or_else(|| Error::MissingAnnotation(id.to_string()))
    }

    /// Every arc of an `n`-strand disk annotated; paths smooth, none repeating
    /// an oriented branch, none contained in another.
    pub fn validate(&self, t: &TrainTrack) -> Result<()> {
        let n = t.strands();
        for id in all_arcs(n) {
            match (id, self.get(id)?) {
                (ArcId::Beta(_), ArcSpec::Complement) => {
                    return Err(Error::InvalidTrack(format!("{id} cannot be a complement")))
                }
                (ArcId::Alpha(k), ArcSpec::Complement) => {
                    if matches!(self.get(ArcId::Alpha(partner(k)))?, ArcSpec::Complement) {
                        return Err(Error::InvalidTrack(format!("{id} and its partner are both complements")));
                    }
                }
                (_, ArcSpec::Counted { counts, paths }) => {
                    for b in counts.keys() {
                        t.branch(b)?;
                    }
                    for (i, p) in paths.iter().enumerate() {
                        check_smooth(t, p)?;
                        let mut seen = std::collections::BTreeSet::new();
                        if !p.steps.iter().all(|s| seen.insert(s.clone())) {
                            return Err(Error::InvalidTrack(format!("{id}: a path repeats an oriented branch")));
                        }
                        for (j, q) in paths.iter().enumerate() {
                            if i != j && p.is_subpath_of(q) {
                                return Err(Error::InvalidTrack(format!("{id}: one path contains another")));
                            }
                        }
                    }
                }
            }
        }
        for id in self.arcs.keys() {
            let ok = match *id {
                ArcId::Alpha(k) => k <= 2 * n - 4,
                ArcId::Beta(k) => k < n,
            };
            if !ok {
                return Err(Error::InvalidTrack(format!("{id} does not exist for {n} strands")));
            }
        }
        Ok(())
    }
}

fn partner(k: usize) -> usize {
    if k % 2 == 1 {
        k + 1
    } else {
        k - 1
    }
}

/// `α_1..α_{2n−4}` then `β_1..β_{n−1}`.
pub fn all_arcs(n: usize) -> Vec<ArcId> {
    (1..=2 * n - 4).map(ArcId::Alpha).chain((1..n).map(ArcId::Beta)).collect()
}

pub fn arc_measure_with<A: WeightAlgebra>(t: &TrainTrack, ann: &ArcAnnotations, id: ArcId, alg: &A) -> Result<A::V> {
    match ann.get(id)? {
        ArcSpec::Counted { counts, paths } => {
            let mut s = alg.zero();
            for (b, &k) in counts {
                s = alg.add(&s, &alg.scale(&alg.weight(b)?, k));
            }
            for p in paths {
                s = alg.sub(&s, &alg.scale(&path_measure_with(t, p, alg)?, 2));
            }
            Ok(s)
        }
        ArcSpec::Complement => {
            let ArcId::Alpha(k) = id else {
                return Err(Error::InvalidTrack(format!("{id} cannot be a complement")));
            };
            let other = ArcId::Alpha(partner(k));
            if matches!(ann.get(other)?, ArcSpec::Complement) {
                return Err(Error::InvalidTrack(format!("{id} and its partner are both complements")));
            }
            let i = k.div_ceil(2);
            let top = alg.max(
                &arc_measure_with(t, ann, ArcId::Beta(i), alg)?,
                &arc_measure_with(t, ann, ArcId::Beta(i + 1), alg)?,
            )?;
            Ok(alg.sub(&top, &arc_measure_with(t, ann, other, alg)?))
        }
    }
}

pub fn arc_measure<S: FieldScalar>(t: &TrainTrack, ann: &ArcAnnotations, id: ArcId, mu: &Measure<S>) -> Result<S> {
    arc_measure_with(t, ann, id, &ScalarWeights { mu })
}

/// Dynnikov coordinates of the curve system carried with measure `mu`.
pub fn change_of_coords<S: FieldScalar>(t: &TrainTrack, ann: &ArcAnnotations, mu: &Measure<S>) -> Result<DynnikovVector<S>> {
    let n = t.strands();
    let alg = ScalarWeights { mu };
    let alpha = (1..=2 * n - 4).map(|k| arc_measure_with(t, ann, ArcId::Alpha(k), &alg)).collect::<Result<Vec<_>>>()?;
    let beta = (1..n).map(|k| arc_measure_with(t, ann, ArcId::Beta(k), &alg)).collect::<Result<Vec<_>>>()?;
    from_triangle(&TriangleCoords::new(alpha, beta)?)
}

/// Linear map from chart coordinates to Dynnikov coordinates on the piece
/// containing the base measure with chart values `coords`.
pub fn linearize_change_of_coords(
    t: &TrainTrack,
    ann: &ArcAnnotations,
    chart: &MeasureChart,
    coords: &[BigRational],
) -> Result<RatMatrix> {
    let n = t.strands();
    let m = n - 2;
    let alg = AffineWeights::new(chart, coords)?;
    let row = |id| arc_measure_with(t, ann, id, &alg).map(|a| a.row);
    let alpha = (1..=2 * m).map(|k| row(ArcId::Alpha(k))).collect::<Result<Vec<_>>>()?;
    let beta = (1..n).map(|k| row(ArcId::Beta(k))).collect::<Result<Vec<_>>>()?;
    let half = BigRational::new(1.into(), 2.into());
    let diff = |x: &[BigRational], y: &[BigRational]| -> Vec<BigRational> {
        x.iter().zip(y).map(|(p, q)| (p - q) * &half).collect()
    };
    let mut rows = Vec::with_capacity(2 * m);
    for i in 0..m {
        rows.push(diff(&alpha[2 * i + 1], &alpha[2 * i]));
    }
    for i in 0..m {
        rows.push(diff(&beta[i], &beta[i + 1]));
    }
    RatMatrix::from_rows(rows)
}
