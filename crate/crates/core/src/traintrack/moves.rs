//! Pinching moves on polygons of a train track.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use super::measure::Measure;
use super::track::{Branch, BranchKind, End, HalfBranch, Polygon, Side, Switch, TrainTrack};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// New branch weights as integer combinations of old ones.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MeasureMap {
    pub rows: BTreeMap<String, Vec<(String, i64)>>,
}

impl MeasureMap {
    pub fn identity(t: &TrainTrack) -> Self {
        MeasureMap { rows: t.branches().iter().map(|b| (b.id.clone(), vec![(b.id.clone(), 1)])).collect() }
    }

    pub fn set(&mut self, new: &str, combo: Vec<(String, i64)>) {
        self.rows.insert(new.to_string(), combo);
    }

    pub fn apply<S: Scalar>(&self, mu: &Measure<S>) -> Result<Measure<S>> {
        let mut out = BTreeMap::new();
        for (b, combo) in &self.rows {
            let mut s = S::zero_s();
            for (old, k) in combo {
                s = s.add(&mu.get(old)?.mul(&S::from_i64(*k)));
            }
            out.insert(b.clone(), s);
        }
        Ok(Measure::new(out))
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.rows
                .iter()
                .map(|(b, c)| (b.clone(), json!(c.iter().map(|(o, k)| json!({"branch": o, "coefficient": k})).collect::<Vec<_>>())))
                .collect(),
        )
    }
}

/// A track produced by a move with the induced map on measures.
#[derive(Clone, Debug)]
pub struct MovedTrack {
    pub track: TrainTrack,
    pub psi: MeasureMap,
}

/// Vertex `v_j` of a polygon: the cusp between the end of edge `e_{j−1}` and
/// the start of edge `e_j`, which sit next to each other on one switch side.
#[derive(Clone, Debug)]
pub(crate) struct Corner {
    pub switch: usize,
    pub side: Side,
    pub prev: HalfBranch,
    pub next: HalfBranch,
    /// `prev` comes first in the side list.
    pub prev_first: bool,
}

/// Which end of each edge starts it, walking the polygon in edge order.
pub(crate) fn polygon_corners(t: &TrainTrack, p: &Polygon) -> Result<(Vec<Corner>, Vec<End>)> {
    let e = &p.edges;
    let k = e.len();
    if k == 0 {
        return Err(Error::InvalidMove("polygon has no edge list".into()));
    }
    for b in e {
        t.branch(b)?;
    }
    // two half-branches form a cusp when adjacent on one side of a switch
    let cusp = |prev: &HalfBranch, next: &HalfBranch| -> Result<bool> {
        let (x, y) = (t.endpoint(&prev.branch, prev.end)?, t.endpoint(&next.branch, next.end)?);
        Ok(x.switch == y.switch && x.side == y.side && x.position.abs_diff(y.position) == 1)
    };
    // depth-first over the start end of each edge; loops allow both
    fn walk(
        e: &[String],
        starts: &mut Vec<End>,
        cusp: &dyn Fn(&HalfBranch, &HalfBranch) -> Result<bool>,
    ) -> Result<bool> {
        let k = e.len();
        let j = starts.len();
        if j == k {
            let last = HalfBranch::new(&e[k - 1], starts[k - 1].other());
            return cusp(&last, &HalfBranch::new(&e[0], starts[0]));
        }
        for s in [End::From, End::To] {
            if k == 1 && s == End::To {
                break;
            }
            if j > 0 && !cusp(&HalfBranch::new(&e[j - 1], starts[j - 1].other()), &HalfBranch::new(&e[j], s))? {
                continue;
            }
            starts.push(s);
            if walk(e, starts, cusp)? {
                return Ok(true);
            }
            starts.pop();
        }
        Ok(false)
    }
    let mut starts = Vec::with_capacity(k);
    if !walk(e, &mut starts, &cusp)? {
        return Err(Error::InvalidMove(format!("edges {e:?} do not bound a polygon through cusps")));
    }
    let mut corners = Vec::with_capacity(k);
    for j in 0..k {
        let pj = (j + k - 1) % k;
        let prev = HalfBranch::new(&e[pj], starts[pj].other());
        let next = HalfBranch::new(&e[j], starts[j]);
        let (x, y) = (t.endpoint(&prev.branch, prev.end)?, t.endpoint(&next.branch, next.end)?);
        corners.push(Corner { switch: x.switch, side: x.side, prev_first: x.position < y.position, prev, next });
    }
    Ok((corners, starts))
}

fn find_polygon(t: &TrainTrack, edge: &str, punctured: bool) -> Result<usize> {
    t.branch(edge)?;
    t.polygons()
        .iter()
        .position(|p| p.punctured == punctured && p.edges.iter().any(|e| e == edge))
        .ok_or_else(|| {
            Error::InvalidMove(format!(
                "no {} polygon with listed edges contains {edge:?}",
                if punctured { "punctured" } else { "unpunctured" }
            ))
        })
}

fn replace_ref(switches: &mut [Switch], at: usize, old: &HalfBranch, new: HalfBranch) {
    for side in [Side::A, Side::B] {
        if let Some(slot) = switches[at].side_mut(side).iter_mut().find(|h| *h == old) {
            *slot = new;
            return;
        }
    }
}

struct Names<'a> {
    t: &'a TrainTrack,
    taken: BTreeSet<String>,
}

impl Names<'_> {
    fn fresh(&mut self, base: &str) -> String {
        let s = self.t.fresh_id(base, &self.taken);
        self.taken.insert(s.clone());
        s
    }
}

fn infinitesimal(id: &str) -> Branch {
    Branch { id: id.to_string(), kind: BranchKind::Infinitesimal }
}

/// Pinch the punctured polygon containing `edge` across that edge: a new
/// punctured monogon splits off, leaving an unpunctured polygon with one more
/// vertex. The new branches `ε`, `e′`, `e″` get weights `2w`, `w`, `w`.
pub fn pinch_punctured(t: &TrainTrack, edge: &str) -> Result<MovedTrack> {
    let pi = find_polygon(t, edge, true)?;
    let poly = &t.polygons()[pi];
    if poly.vertices < 2 {
        return Err(Error::InvalidMove("cannot pinch a punctured monogon".into()));
    }
    let (corners, _) = polygon_corners(t, poly)?;
    let k = poly.vertices;
    let i = poly.edges.iter().position(|e| e == edge).expect("found above");
    let far = corners[(i + 1) % k].clone();
    let mut names = Names { t, taken: BTreeSet::new() };
    let e1 = names.fresh(&format!("{edge}'"));
    let e2 = names.fresh(&format!("{edge}''"));
    let eps = names.fresh(&format!("eps_{edge}"));
    let xs = names.fresh(&format!("X_{edge}"));
    let ys = names.fresh(&format!("Y_{edge}"));
    let (n, mut switches, mut branches, mut polygons) = t.clone().into_parts();
    replace_ref(&mut switches, far.switch, &far.prev, HalfBranch::new(&e2, End::To));
    switches.push(Switch {
        id: ys,
        side_a: vec![far.prev.clone(), HalfBranch::new(&e2, End::From)],
        side_b: vec![HalfBranch::new(&eps, End::From)],
    });
    switches.push(Switch {
        id: xs,
        side_a: vec![HalfBranch::new(&eps, End::To)],
        side_b: vec![HalfBranch::new(&e1, End::From), HalfBranch::new(&e1, End::To)],
    });
    branches.extend([infinitesimal(&eps), infinitesimal(&e1), infinitesimal(&e2)]);
    let mut edges = poly.edges.clone();
    edges.insert(i + 1, e2.clone());
    polygons[pi] = Polygon { punctured: false, vertices: k + 1, edges };
    polygons.push(Polygon { punctured: true, vertices: 1, edges: vec![e1.clone()] });
    let mut track = TrainTrack::new(n, switches, branches, polygons)?;
    track.set_coordinates(t.coordinates().to_vec())?;
    let mut psi = MeasureMap::identity(t);
    psi.set(&eps, vec![(edge.to_string(), 2)]);
    psi.set(&e1, vec![(edge.to_string(), 1)]);
    psi.set(&e2, vec![(edge.to_string(), 1)]);
    Ok(MovedTrack { track, psi })
}

/// Pinch an unpunctured polygon with at least 4 vertices across `edge`,
/// splitting off a trigon on `e_{i−1}, e_i, e_{i+1}`. The new branch `ε`
/// carries `w_{i−1} + w_{i+1}` and the primed copies their old weights.
pub fn pinch_unpunctured(t: &TrainTrack, edge: &str) -> Result<MovedTrack> {
    let pi = find_polygon(t, edge, false)?;
    let poly = &t.polygons()[pi];
    let k = poly.vertices;
    if k < 4 {
        return Err(Error::InvalidMove(format!("cannot pinch a {k}-gon")));
    }
    let (corners, _) = polygon_corners(t, poly)?;
    let i = poly.edges.iter().position(|e| e == edge).expect("found above");
    let prev = poly.edges[(i + k - 1) % k].clone();
    let next = poly.edges[(i + 1) % k].clone();
    // start of e_{i−1} at v_{i−1}, end of e_{i+1} at v_{i+2}
    let c_prev = corners[(i + k - 1) % k].clone();
    let c_next = corners[(i + 2) % k].clone();
    let mut names = Names { t, taken: BTreeSet::new() };
    let p1 = names.fresh(&format!("{prev}'"));
    let n1 = names.fresh(&format!("{next}'"));
    let eps = names.fresh(&format!("eps_{edge}"));
    let xs = names.fresh(&format!("X_{edge}"));
    let ys = names.fresh(&format!("Y_{edge}"));
    let (n, mut switches, mut branches, mut polygons) = t.clone().into_parts();
    replace_ref(&mut switches, c_prev.switch, &c_prev.next, HalfBranch::new(&p1, End::To));
    replace_ref(&mut switches, c_next.switch, &c_next.prev, HalfBranch::new(&n1, End::To));
    switches.push(Switch {
        id: xs,
        side_a: vec![c_prev.next.clone(), c_next.prev.clone()],
        side_b: vec![HalfBranch::new(&eps, End::From)],
    });
    switches.push(Switch {
        id: ys,
        side_a: vec![HalfBranch::new(&eps, End::To)],
        side_b: vec![HalfBranch::new(&p1, End::From), HalfBranch::new(&n1, End::From)],
    });
    branches.extend([infinitesimal(&eps), infinitesimal(&p1), infinitesimal(&n1)]);
    let mut rest = vec![n1.clone()];
    rest.extend((2..k - 1).map(|d| poly.edges[(i + d) % k].clone()));
    rest.push(p1.clone());
    polygons[pi] = Polygon { punctured: false, vertices: 3, edges: vec![prev.clone(), edge.to_string(), next.clone()] };
    polygons.push(Polygon { punctured: false, vertices: k - 1, edges: rest });
    let mut track = TrainTrack::new(n, switches, branches, polygons)?;
    track.set_coordinates(t.coordinates().to_vec())?;
    let mut psi = MeasureMap::identity(t);
    psi.set(&eps, vec![(prev.clone(), 1), (next.clone(), 1)]);
    psi.set(&p1, vec![(prev, 1)]);
    psi.set(&n1, vec![(next, 1)]);
    Ok(MovedTrack { track, psi })
}
