//! Combinatorial train tracks.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchKind {
    Main,
    Infinitesimal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    From,
    To,
}

impl End {
    pub fn other(self) -> End {
        match self {
            End::From => End::To,
            End::To => End::From,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// One end of a branch, written `"<branch>.from"` or `"<branch>.to"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfBranch {
    pub branch: String,
    pub end: End,
}

impl HalfBranch {
    pub fn new(branch: &str, end: End) -> Self {
        HalfBranch { branch: branch.to_string(), end }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (b, e) = s
            .rsplit_once('.')
            .ok_or_else(|| Error::InvalidTrack(format!("half-branch {s:?} needs a .from or .to suffix")))?;
        let end = match e {
            "from" => End::From,
            "to" => End::To,
            _ => return Err(Error::InvalidTrack(format!("bad half-branch end in {s:?}"))),
        };
        Ok(HalfBranch::new(b, end))
    }

    pub fn render(&self) -> String {
        format!("{}.{}", self.branch, if self.end == End::From { "from" } else { "to" })
    }
}

/// Half-branch ends on each side of the switch's tangent, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Switch {
    pub id: String,
    pub side_a: Vec<HalfBranch>,
    pub side_b: Vec<HalfBranch>,
}

impl Switch {
    pub fn side(&self, s: Side) -> &[HalfBranch] {
        match s {
            Side::A => &self.side_a,
            Side::B => &self.side_b,
        }
    }

    pub fn side_mut(&mut self, s: Side) -> &mut Vec<HalfBranch> {
        match s {
            Side::A => &mut self.side_a,
            Side::B => &mut self.side_b,
        }
    }

    pub fn cusps(&self) -> usize {
        self.side_a.len() + self.side_b.len() - 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub id: String,
    pub kind: BranchKind,
}

/// Where a branch end sits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub switch: usize,
    pub side: Side,
    pub position: usize,
}

/// A complementary region. `edges` lists its boundary branches in cyclic
/// order when moves on it are needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    pub punctured: bool,
    pub vertices: usize,
    pub edges: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainTrack {
    strands: usize,
    switches: Vec<Switch>,
    branches: Vec<Branch>,
    polygons: Vec<Polygon>,
    coordinates: Vec<String>,
    branch_index: BTreeMap<String, usize>,
    switch_index: BTreeMap<String, usize>,
    ends: BTreeMap<(String, End), Endpoint>,
}

impl TrainTrack {
    /// Build a track and check its local structure: every branch end appears
    /// exactly once, both sides of each switch are occupied, and every
    /// polygon is a punctured p-gon (p ≥ 1) or an unpunctured k-gon (k ≥ 3).
    pub fn new(
        strands: usize,
        switches: Vec<Switch>,
        branches: Vec<Branch>,
        polygons: Vec<Polygon>,
    ) -> Result<Self> {
        if strands < 3 {
            return Err(Error::InvalidTrack(format!("needs at least 3 strands, got {strands}")));
        }
        let mut branch_index = BTreeMap::new();
        for (i, b) in branches.iter().enumerate() {
            if branch_index.insert(b.id.clone(), i).is_some() {
                return Err(Error::InvalidTrack(format!("duplicate branch id {:?}", b.id)));
            }
        }
        let mut switch_index = BTreeMap::new();
        let mut ends = BTreeMap::new();
        for (si, s) in switches.iter().enumerate() {
            if switch_index.insert(s.id.clone(), si).is_some() {
                return Err(Error::InvalidTrack(format!("duplicate switch id {:?}", s.id)));
            }
            if s.side_a.is_empty() || s.side_b.is_empty() {
                return Err(Error::InvalidTrack(format!("switch {:?} has an empty side", s.id)));
            }
            for side in [Side::A, Side::B] {
                for (pos, h) in s.side(side).iter().enumerate() {
                    if !branch_index.contains_key(&h.branch) {
                        return Err(Error::InvalidTrack(format!(
                            "switch {:?} refers to unknown branch {:?}",
                            s.id, h.branch
                        )));
                    }
                    let ep = Endpoint { switch: si, side, position: pos };
                    if ends.insert((h.branch.clone(), h.end), ep).is_some() {
                        return Err(Error::InvalidTrack(format!(
                            "end {} appears more than once",
                            h.render()
                        )));
                    }
                }
            }
        }
        for b in &branches {
            for e in [End::From, End::To] {
                if !ends.contains_key(&(b.id.clone(), e)) {
                    return Err(Error::InvalidTrack(format!(
                        "dangling end {}",
                        HalfBranch::new(&b.id, e).render()
                    )));
                }
            }
        }
        for (k, p) in polygons.iter().enumerate() {
            if p.punctured && p.vertices < 1 {
                return Err(Error::InvalidTrack(format!("polygon {k}: punctured 0-gon")));
            }
            if !p.punctured && p.vertices < 3 {
                return Err(Error::InvalidTrack(format!(
                    "polygon {k}: unpunctured {}-gon is not allowed",
                    p.vertices
                )));
            }
            if !p.edges.is_empty() {
                if p.edges.len() != p.vertices {
                    return Err(Error::InvalidTrack(format!(
                        "polygon {k}: {} edges for {} vertices",
                        p.edges.len(),
                        p.vertices
                    )));
                }
                for e in &p.edges {
                    if !branch_index.contains_key(e) {
                        return Err(Error::InvalidTrack(format!("polygon {k}: unknown edge {e:?}")));
                    }
                }
            }
        }
        let coordinates =
            branches.iter().filter(|b| b.kind == BranchKind::Main).map(|b| b.id.clone()).collect();
        Ok(TrainTrack {
            strands,
            switches,
            branches,
            polygons,
            coordinates,
            branch_index,
            switch_index,
            ends,
        })
    }

    /// Global consistency: `n + 1` punctured regions (the boundary counts),
    /// `Σ_unpunctured (k − 2) + Σ_punctured p = 2n − 2`, and one polygon vertex
    /// per cusp.
    pub fn validate_global(&self) -> Result<()> {
        let n = self.strands;
        let punctured = self.polygons.iter().filter(|p| p.punctured).count();
        if punctured != n + 1 {
            return Err(Error::InvalidTrack(format!(
                "{punctured} punctured regions, expected {}",
                n + 1
            )));
        }
        let euler: usize = self
            .polygons
            .iter()
            .map(|p| if p.punctured { p.vertices } else { p.vertices - 2 })
            .sum();
        if euler != 2 * n - 2 {
            return Err(Error::InvalidTrack(format!(
                "polygon vertex count {euler} does not fit a disk with {n} punctures"
            )));
        }
        let cusps: usize = self.switches.iter().map(Switch::cusps).sum();
        let corners: usize = self.polygons.iter().map(|p| p.vertices).sum();
        if cusps != corners {
            return Err(Error::InvalidTrack(format!("{cusps} cusps but {corners} polygon vertices")));
        }
        Ok(())
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn rank(&self) -> i64 {
        self.branches.len() as i64 - self.switches.len() as i64
    }

    pub fn is_complete(&self) -> bool {
        self.rank() == 2 * self.strands as i64 - 4
    }

    pub fn branch(&self, id: &str) -> Result<&Branch> {
        self.branch_index
            .get(id)
            .map(|&i| &self.branches[i])
            .ok_or_else(|| Error::InvalidTrack(format!("unknown branch {id:?}")))
    }

    pub fn has_branch(&self, id: &str) -> bool {
        self.branch_index.contains_key(id)
    }

    pub fn has_switch(&self, id: &str) -> bool {
        self.switch_index.contains_key(id)
    }

    pub fn branch_position(&self, id: &str) -> Option<usize> {
        self.branch_index.get(id).copied()
    }

    pub fn endpoint(&self, id: &str, end: End) -> Result<&Endpoint> {
        self.ends
            .get(&(id.to_string(), end))
            .ok_or_else(|| Error::InvalidTrack(format!("unknown branch {id:?}")))
    }

    /// Branch weights used as coordinates on the measure space.
    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn set_coordinates(&mut self, coords: Vec<String>) -> Result<()> {
        for c in &coords {
            self.branch(c)?;
        }
        self.coordinates = coords;
        Ok(())
    }

    pub fn into_parts(self) -> (usize, Vec<Switch>, Vec<Branch>, Vec<Polygon>) {
        (self.strands, self.switches, self.branches, self.polygons)
    }

    /// Parse a track document; `annotations` and `coordinates` are optional.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidTrack(m.to_string());
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing integer \"n\""))? as usize;
        let refs = |x: Option<&Value>, what: &str| -> Result<Vec<HalfBranch>> {
            x.and_then(Value::as_array)
                .ok_or_else(|| bad(&format!("switch needs an array {what:?}")))?
                .iter()
                .map(|r| r.as_str().ok_or_else(|| bad("half-branch refs are strings")).and_then(HalfBranch::parse))
                .collect()
        };
        let switches = v
            .get("switches")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"switches\" array"))?
            .iter()
            .map(|s| {
                Ok(Switch {
                    id: s.get("id").and_then(Value::as_str).ok_or_else(|| bad("switch without id"))?.to_string(),
                    side_a: refs(s.get("sideA"), "sideA")?,
                    side_b: refs(s.get("sideB"), "sideB")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let branch_docs =
            v.get("branches").and_then(Value::as_array).ok_or_else(|| bad("missing \"branches\" array"))?;
        let mut branches = Vec::new();
        for b in branch_docs {
            let id = b.get("id").and_then(Value::as_str).ok_or_else(|| bad("branch without id"))?;
            let kind = match b.get("kind").and_then(Value::as_str) {
                Some("main") => BranchKind::Main,
                Some("infinitesimal") => BranchKind::Infinitesimal,
                other => return Err(bad(&format!("branch {id:?} has bad kind {other:?}"))),
            };
            branches.push(Branch { id: id.to_string(), kind });
        }
        let polygons = v
            .get("polygons")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"polygons\" array"))?
            .iter()
            .map(|p| {
                let punctured = p.get("punctured").and_then(Value::as_bool).ok_or_else(|| bad("polygon needs \"punctured\""))?;
                let vertices = p.get("vertices").and_then(Value::as_u64).ok_or_else(|| bad("polygon needs \"vertices\""))? as usize;
                let edges = match p.get("edges") {
                    None => Vec::new(),
                    Some(e) => e
                        .as_array()
                        .ok_or_else(|| bad("polygon edges must be an array"))?
                        .iter()
                        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("edge ids are strings")))
                        .collect::<Result<_>>()?,
                };
                Ok(Polygon { punctured, vertices, edges })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = TrainTrack::new(n, switches, branches, polygons)?;
        // optional explicit endpoints must agree with the switch lists
        for b in branch_docs {
            let id = b["id"].as_str().unwrap_or_default();
            for (key, end) in [("from", End::From), ("to", End::To)] {
                let Some(ep) = b.get(key) else { continue };
                let at = t.endpoint(id, end)?.clone();
                let sw = ep.get("switch").and_then(Value::as_str);
                if sw.is_some_and(|s| t.switches[at.switch].id != s) {
                    return Err(bad(&format!("branch {id:?} {key} end is not at switch {sw:?}")));
                }
                let side = ep.get("side").and_then(Value::as_str);
                let expect = if at.side == Side::A { "A" } else { "B" };
                if side.is_some_and(|s| s != expect) {
                    return Err(bad(&format!("branch {id:?} {key} end is on side {expect}")));
                }
                let pos = ep.get("position").and_then(Value::as_u64);
                if pos.is_some_and(|p| p as usize != at.position) {
                    return Err(bad(&format!("branch {id:?} {key} end is at position {}", at.position)));
                }
            }
        }
        if let Some(c) = v.get("coordinates") {
            let coords = c
                .as_array()
                .ok_or_else(|| bad("coordinates must be an array"))?
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("coordinate ids are strings")))
                .collect::<Result<Vec<_>>>()?;
            t.set_coordinates(coords)?;
        }
        Ok(t)
    }

    pub fn to_json(&self) -> Value {
        let side = |s: Side| if s == Side::A { "A" } else { "B" };
        let ep = |id: &str, e: End| {
            let p = &self.ends[&(id.to_string(), e)];
            json!({"switch": self.switches[p.switch].id, "side": side(p.side), "position": p.position})
        };
        json!({
            "n": self.strands,
            "switches": self.switches.iter().map(|s| json!({
                "id": s.id,
                "sideA": s.side_a.iter().map(HalfBranch::render).collect::<Vec<_>>(),
                "sideB": s.side_b.iter().map(HalfBranch::render).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "branches": self.branches.iter().map(|b| json!({
                "id": b.id,
                "kind": if b.kind == BranchKind::Main { "main" } else { "infinitesimal" },
                "from": ep(&b.id, End::From),
                "to": ep(&b.id, End::To),
            })).collect::<Vec<_>>(),
            "polygons": self.polygons.iter().map(|p| {
                let mut o = json!({"punctured": p.punctured, "vertices": p.vertices});
                if !p.edges.is_empty() {
                    o["edges"] = json!(p.edges);
                }
                o
            }).collect::<Vec<_>>(),
            "coordinates": self.coordinates,
        })
    }

    /// Fresh identifier based on `base` that no branch or switch uses.
    pub fn fresh_id(&self, base: &str, taken: &BTreeSet<String>) -> String {
        let used = |s: &str| self.has_branch(s) || self.has_switch(s) || taken.contains(s);
        if !used(base) {
            return base.to_string();
        }
        (2..).map(|k| format!("{base}#{k}")).find(|s| !used(s)).expect("unbounded")
    }
}

/// Parse a track document and run both local and global validation.
pub fn load_track(v: &Value) -> Result<TrainTrack> {
    let t = TrainTrack::from_json(v)?;
    t.validate_global()?;
    Ok(t)
}
