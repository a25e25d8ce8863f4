//! Diagonal extensions: maximal systems of zero-weight diagonals.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::One;

use super::moves::{polygon_corners, MeasureMap, MovedTrack};
use super::track::{Branch, BranchKind, End, HalfBranch, Polygon, TrainTrack};
use crate::error::{Error, Result};

pub fn catalan(k: usize) -> BigInt {
    // C_k = binom(2k, k) / (k + 1)
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(2 * (2 * i + 1)) / BigInt::from(i + 2);
    }
    c
}

/// `Π_unpunctured C_{k−2} · Π_punctured p·C_{p−1}`.
pub fn diagonal_extensions_count(t: &TrainTrack) -> BigInt {
    t.polygons()
        .iter()
        .map(|p| {
            if p.punctured {
                BigInt::from(p.vertices) * catalan(p.vertices - 1)
            } else {
                catalan(p.vertices - 2)
            }
        })
        .product()
}

/// All triangulations of a convex `m`-gon on corners `0..m`, as triangle lists.
pub fn triangulations(m: usize) -> Vec<Vec<[usize; 3]>> {
    fn go(c: &[usize]) -> Vec<Vec<[usize; 3]>> {
        if c.len() < 3 {
            return vec![Vec::new()];
        }
        let (first, last) = (c[0], c[c.len() - 1]);
        let mut out = Vec::new();
        for k in 1..c.len() - 1 {
            let left = go(&c[..=k]);
            let right = go(&c[k..]);
            for l in &left {
                for r in &right {
                    let mut tri = vec![[first, c[k], last]];
                    tri.extend(l.iter().copied());
                    tri.extend(r.iter().copied());
                    out.push(tri);
                }
            }
        }
        out
    }
    go(&(0..m).collect::<Vec<_>>())
}

/// Diagonals of a triangulation: triangle sides joining non-adjacent corners.
pub fn triangulation_diagonals(m: usize, tris: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut d = BTreeSet::new();
    for t in tris {
        for (x, y) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            let (x, y) = (x.min(y), x.max(y));
            if y - x != 1 && !(x == 0 && y == m - 1) {
                d.insert((x, y));
            }
        }
    }
    d.into_iter().collect()
}

/// Local choice for one polygon: the triangulated corner polygon, and for a
/// punctured polygon the vertex the encircling loop is attached to.
#[derive(Clone, Debug)]
struct LocalChoice {
    loop_at: Option<usize>,
    triangles: Vec<[usize; 3]>,
}

fn local_choices(p: &Polygon) -> Vec<LocalChoice> {
    let k = p.vertices;
    if p.punctured {
        if k == 1 {
            return vec![LocalChoice { loop_at: None, triangles: Vec::new() }];
        }
        (0..k)
            .flat_map(|i| triangulations(k + 1).into_iter().map(move |tr| LocalChoice { loop_at: Some(i), triangles: tr }))
            .collect()
    } else {
        triangulations(k).into_iter().map(|tr| LocalChoice { loop_at: None, triangles: tr }).collect()
    }
}

#[derive(Clone, Debug)]
pub struct DiagonalExtension {
    pub track: TrainTrack,
    pub psi: MeasureMap,
    pub added: Vec<String>,
}

impl From<DiagonalExtension> for MovedTrack {
    fn from(d: DiagonalExtension) -> Self {
        MovedTrack { track: d.track, psi: d.psi }
    }
}

/// Every diagonal extension, new branches weighted 0; at most `limit`.
pub fn enumerate_diagonal_extensions(t: &TrainTrack, limit: usize) -> Result<Vec<DiagonalExtension>> {
    let total = diagonal_extensions_count(t);
    if total > BigInt::from(limit) {
        return Err(Error::InvalidMove(format!("{total} diagonal extensions exceed the limit {limit}")));
    }
    let polys = t.polygons();
    for p in polys {
        if p.edges.is_empty() && !(p.vertices == 3 && !p.punctured) && !(p.vertices == 1 && p.punctured) {
            return Err(Error::InvalidMove("extending a polygon needs its edge list".into()));
        }
    }
    let choices: Vec<Vec<LocalChoice>> = polys.iter().map(local_choices).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; polys.len()];
    loop {
        let pick: Vec<&LocalChoice> = idx.iter().zip(&choices).map(|(&i, c)| &c[i]).collect();
        out.push(build(t, &pick)?);
        // odometer
        let mut j = 0;
        while j < idx.len() {
            idx[j] += 1;
            if idx[j] < choices[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == idx.len() {
            break;
        }
    }
    Ok(out)
}

fn build(t: &TrainTrack, pick: &[&LocalChoice]) -> Result<DiagonalExtension> {
    let (n, mut switches, mut branches, polys) = t.clone().into_parts();
    let mut new_polys = Vec::new();
    let mut taken = BTreeSet::new();
    let mut added = Vec::new();
    // insertions per cusp, keyed by (switch, side, prev half-branch)
    let mut inserts: Vec<(super::moves::Corner, Vec<HalfBranch>)> = Vec::new();
    for (pi, (poly, choice)) in polys.iter().zip(pick).enumerate() {
        if choice.triangles.is_empty() && choice.loop_at.is_none() {
            new_polys.push(poly.clone());
            continue;
        }
        let (corners, _) = polygon_corners(t, poly)?;
        let k = poly.vertices;
        let m = if choice.loop_at.is_some() { k + 1 } else { k };
        let start = choice.loop_at.unwrap_or(0);
        // corner c of the m-gon sits at polygon vertex (start + c) mod k
        let vert = |c: usize| (start + c) % k;
        let side_id = |c: usize| -> String { poly.edges[(start + c) % k].clone() };
        let mut fresh = |base: String| {
            let s = t.fresh_id(&base, &taken);
            taken.insert(s.clone());
            added.push(s.clone());
            s
        };
        let loop_id = choice.loop_at.map(|i| fresh(format!("l{pi}_{i}")));
        let diags = triangulation_diagonals(m, &choice.triangles);
        let mut edge_of: BTreeMap<(usize, usize), String> = BTreeMap::new();
        for c in 0..m {
            let id = if c == m - 1 {
                match &loop_id {
                    Some(l) => l.clone(),
                    None => side_id(c),
                }
            } else {
                side_id(c)
            };
            let key = if c == m - 1 { (0, m - 1) } else { (c, c + 1) };
            edge_of.insert(key, id);
        }
        // items inserted at each corner, listed from the prev edge to the next edge
        let mut at: Vec<Vec<HalfBranch>> = vec![Vec::new(); m];
        for &(x, y) in &diags {
            let id = fresh(format!("d{pi}_{}_{}", vert(x), vert(y)));
            branches.push(Branch { id: id.clone(), kind: BranchKind::Infinitesimal });
            edge_of.insert((x, y), id.clone());
            at[x].push(HalfBranch::new(&id, End::From));
            at[y].push(HalfBranch::new(&id, End::To));
        }
        for (c, list) in at.iter_mut().enumerate() {
            // nearer the prev edge means further ahead around the polygon
            list.sort_by_key(|h| {
                let b = &h.branch;
                let other = diags
                    .iter()
                    .find(|&&(x, y)| edge_of[&(x, y)] == *b)
                    .map(|&(x, y)| if x == c { y } else { x })
                    .expect("diagonal");
                std::cmp::Reverse((other + m - c) % m)
            });
        }
        let mut per_vertex: Vec<Vec<HalfBranch>> = vec![Vec::new(); k];
        for c in 0..m {
            per_vertex[vert(c)].extend(at[c].iter().cloned());
        }
        if let Some(l) = &loop_id {
            branches.push(Branch { id: l.clone(), kind: BranchKind::Infinitesimal });
            // at the loop vertex: corner m−1 items, loop, corner 0 items
            let mut seq = at[m - 1].clone();
            seq.push(HalfBranch::new(l, End::From));
            seq.push(HalfBranch::new(l, End::To));
            seq.extend(at[0].iter().cloned());
            per_vertex[start] = seq;
            new_polys.push(Polygon { punctured: true, vertices: 1, edges: vec![l.clone()] });
        }
        for (v, seq) in per_vertex.into_iter().enumerate() {
            if !seq.is_empty() {
                inserts.push((corners[v].clone(), seq));
            }
        }
        for tri in &choice.triangles {
            let e = |x: usize, y: usize| edge_of[&(x.min(y), x.max(y))].clone();
            new_polys.push(Polygon {
                punctured: false,
                vertices: 3,
                edges: vec![e(tri[0], tri[1]), e(tri[1], tri[2]), e(tri[2], tri[0])],
            });
        }
    }
    for (corner, seq) in inserts {
        let list = switches[corner.switch].side_mut(corner.side);
        let pos = list.iter().position(|h| *h == corner.prev).expect("corner edge present");
        let mut seq = seq;
        if corner.prev_first {
            for (j, h) in seq.into_iter().enumerate() {
                list.insert(pos + 1 + j, h);
            }
        } else {
            seq.reverse();
            for (j, h) in seq.into_iter().enumerate() {
                list.insert(pos + j, h);
            }
        }
    }
    let mut track = TrainTrack::new(n, switches, branches, new_polys)?;
    track.set_coordinates(t.coordinates().to_vec())?;
    let mut psi = MeasureMap::identity(t);
    for a in &added {
        psi.set(a, Vec::new());
    }
    Ok(DiagonalExtension { track, psi, added })
}
