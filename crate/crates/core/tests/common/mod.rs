#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use dynnikov::scalar::rat;
use dynnikov::traintrack::*;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

pub fn fixture(name: &str) -> Value {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap()
}

/// Full measure on the four-puncture track from its main weights.
pub fn four_puncture_measure(a: &BigRational, b: &BigRational, c: &BigRational, d: &BigRational) -> Measure<BigRational> {
    let h = rat(1, 2);
    Measure::from_pairs([
        ("a", a.clone()),
        ("b", b.clone()),
        ("c", c.clone()),
        ("d", d.clone()),
        ("m1", a * &h),
        ("m2", b * &h),
        ("m3", (c + d) * &h),
        ("m4", d * &h),
        ("m5", (a + b - c) * &h),
        ("m6", (b + c - a) * &h),
        ("m7", (a + c - b) * &h),
    ])
}

pub fn random_four_puncture(rng: &mut ChaCha8Rng) -> [BigRational; 4] {
    loop {
        let v: Vec<BigRational> = (0..4).map(|_| rat(rng.gen_range(1..=400), rng.gen_range(1..=12))).collect();
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        if a + b > *c && b + c > *a && a + c > *b {
            return [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()];
        }
    }
}

/// Disjoint union of "ring" gadgets: each central polygon has vertex switches
/// `V_j`, edges `e_j` from `V_j` to `V_{j+1}`, and a stem `h_j` from `V_j` to a
/// punctured monogon loop `l_j`. The outer region is left out, so only local
/// validation applies.
pub fn gadget(polys: &[(bool, usize)]) -> TrainTrack {
    let mut switches = Vec::new();
    let mut branches = Vec::new();
    let mut polygons = Vec::new();
    let mut punctures = 0;
    let hb = |b: &str, e: End| HalfBranch::new(b, e);
    for (g, &(punct, k)) in polys.iter().enumerate() {
        let e = |j: usize| format!("e{g}_{}", j % k);
        for j in 0..k {
            let (h, w, l) = (format!("h{g}_{j}"), format!("W{g}_{j}"), format!("l{g}_{j}"));
            switches.push(Switch {
                id: format!("V{g}_{j}"),
                side_a: vec![hb(&h, End::From)],
                side_b: vec![hb(&e(j + k - 1), End::To), hb(&e(j), End::From)],
            });
            switches.push(Switch { id: w, side_a: vec![hb(&h, End::To)], side_b: vec![hb(&l, End::From), hb(&l, End::To)] });
            branches.push(Branch { id: e(j), kind: BranchKind::Infinitesimal });
            branches.push(Branch { id: h, kind: BranchKind::Main });
            branches.push(Branch { id: l.clone(), kind: BranchKind::Infinitesimal });
            polygons.push(Polygon { punctured: true, vertices: 1, edges: vec![l] });
            punctures += 1;
        }
        polygons.push(Polygon { punctured: punct, vertices: k, edges: (0..k).map(e).collect() });
        punctures += usize::from(punct);
    }
    TrainTrack::new(punctures.max(3), switches, branches, polygons).unwrap()
}

pub fn gadget_measure(t: &TrainTrack, rng: &mut ChaCha8Rng) -> Measure<BigRational> {
    let mut mu = Measure::new(BTreeMap::new());
    for b in t.branches() {
        if b.id.starts_with('e') {
            mu.insert(&b.id, rat(rng.gen_range(1..100), rng.gen_range(1..7)));
        }
    }
    for s in t.switches() {
        if s.id.starts_with('V') {
            let total = s.side_b.iter().map(|h| mu.get(&h.branch).unwrap().clone()).sum::<BigRational>();
            let h = &s.side_a[0].branch;
            mu.insert(h, total.clone());
            mu.insert(&h.replacen('h', "l", 1), total * rat(1, 2));
        }
    }
    mu
}

// Maximal sets of pairwise non-crossing diagonals of a convex m-gon.
pub fn brute_force_triangulations(m: usize) -> usize {
    if m < 4 {
        return 1;
    }
    let diags: Vec<(usize, usize)> =
        (0..m).flat_map(|i| (i + 2..m).map(move |j| (i, j))).filter(|&(i, j)| !(i == 0 && j == m - 1)).collect();
    let cross = |a: (usize, usize), b: (usize, usize)| {
        let inside = |x: usize| a.0 < x && x < a.1;
        let shared = a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1;
        !shared && (inside(b.0) != inside(b.1))
    };
    let mut count = 0;
    for mask in 0u32..(1 << diags.len()) {
        let set: Vec<(usize, usize)> = (0..diags.len()).filter(|i| mask >> i & 1 == 1).map(|i| diags[i]).collect();
        if set.iter().enumerate().any(|(i, &a)| set[i + 1..].iter().any(|&b| cross(a, b))) {
            continue;
        }
        let maximal = diags.iter().all(|&d| set.contains(&d) || set.iter().any(|&s| cross(s, d)));
        if maximal {
            count += 1;
        }
    }
    count
}

pub fn oracle_count(polys: &[(bool, usize)]) -> usize {
    polys
        .iter()
        .map(|&(punct, k)| if punct { if k == 1 { 1 } else { k * brute_force_triangulations(k + 1) } } else { brute_force_triangulations(k) })
        .product()
}

