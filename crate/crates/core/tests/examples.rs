use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use dynnikov::json::{parse_int_matrix, parse_rat_matrix};
use dynnikov::matrix::analyze;
use dynnikov::scalar::{int, rat};
use dynnikov::spectral::dominant_root;
use dynnikov::*;
use num_bigint::BigInt;
use serde_json::Value;

fn fixture(name: &str) -> Value {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap()
}

fn imat(name: &str) -> IntMatrix {
    parse_int_matrix(&fixture(name)).unwrap()
}

fn matrices(word: &str, n: usize) -> Vec<IntMatrix> {
    let w = BraidWord::parse(word, n).unwrap();
    dynnikov_matrices(&w, &SearchOptions::default()).unwrap().into_iter().map(|m| m.matrix).collect()
}

#[test]
fn mixed_word_action() {
    let w = BraidWord::parse("-3 2 -1", 4).unwrap();
    let v = DynnikovVector::<BigInt>::from_i64(&[-1, -1], &[0, -1]).unwrap();
    let out = apply_braid(&v, &w).unwrap();
    assert_eq!(out, DynnikovVector::<BigInt>::from_i64(&[2, -3], &[-1, 0]).unwrap());
}

#[test]
fn golden_braid_single_matrix() {
    let ms = matrices("1 -2", 3);
    assert_eq!(ms, vec![IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]])]);
    let d = dilatation(&ms[0]).unwrap();
    assert!((d.value - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
}

#[test]
fn circle_decomposition() {
    let w = BraidWord::parse("1 -2", 3).unwrap();
    let arcs = enumerate_regions_n3(&w).unwrap();
    let got: BTreeSet<IntMatrix> = arcs.iter().map(|a| a.matrix.clone()).collect();
    let want: BTreeSet<IntMatrix> = [
        [[1, -1], [1, 0]],
        [[1, -1], [-1, 2]],
        [[0, 1], [-1, 2]],
        [[2, -1], [1, 0]],
        [[0, 1], [-1, 1]],
        [[2, 1], [1, 1]],
    ]
    .iter()
    .map(|m| IntMatrix::from_i64_rows(&[&m[0], &m[1]]))
    .collect();
    assert_eq!(got, want);
    assert_eq!(arcs.len(), 6);
    // the arcs tile the circle
    let total: f64 = arcs.iter().map(|a| a.end - a.start).sum();
    assert!((total - 8.0).abs() < 1e-9);
    for k in 0..arcs.len() {
        let next = &arcs[(k + 1) % arcs.len()];
        let gap = (next.start - arcs[k].end).rem_euclid(8.0);
        assert!(gap < 1e-9 || (8.0 - gap) < 1e-9);
    }
}

#[test]
fn identity_circle_is_one_arc() {
    let arcs = enumerate_regions_n3(&BraidWord::identity(3).unwrap()).unwrap();
    assert_eq!(arcs.len(), 1);
    assert!(arcs[0].matrix.is_identity());
}

#[test]
fn five_strand_two_matrices() {
    let w = BraidWord::parse("1 2 3 -4", 5).unwrap();
    let an = analyze(&w, &SearchOptions::default()).unwrap();
    let got: BTreeSet<IntMatrix> = an.matrices.iter().map(|m| m.matrix.clone()).collect();
    let want: BTreeSet<IntMatrix> = [imat("five_strand_D1.json"), imat("five_strand_D2.json")].into();
    assert_eq!(got, want);
    let r: Vec<f64> = an.matrices.iter().map(|m| dilatation(&m.matrix).unwrap().value).collect();
    assert!((r[0] - r[1]).abs() < 1e-12 * r[0]);
    let p = an.direction.point_f64();
    assert!(p.to_flat().iter().all(|&x| x <= 0.0));
    assert!((p.a()[1] - (p.a()[0] + p.b()[0])).abs() < 1e-9);
}

#[test]
fn b4_example() {
    let ms = matrices("1 -2 3 3 3 2 1 -2", 4);
    assert_eq!(ms, vec![imat("b4_D.json")]);
    let t = imat("b4_T.json");
    assert_eq!(char_poly(&ms[0]).unwrap(), char_poly(&t).unwrap());
    assert_eq!(char_poly(&t).unwrap(), IntPoly::from_i64(&[1, -4, -2, -4, 1]));
    let d = dilatation(&ms[0]).unwrap();
    assert!((d.value - 4.61158).abs() < 5e-6);
}

#[test]
fn gamma_example() {
    let ms = matrices("1 1 2 2 1 2 3 3 2 1 1 1 1 2 1 1 3 3 2 1", 4);
    let d = imat("gamma_D.json");
    assert_eq!(ms, vec![d.clone()]);
    let t = imat("gamma_T.json");
    let rep = isospectral_up_to(&d, &t, SpectrumMode::EigenvaluesOne).unwrap();
    assert!(rep.isospectral);
    assert_eq!(rep.left_excess(), vec![StrippedFactor::One { multiplicity: 1 }]);
    assert!(rep.right_excess().is_empty());
    assert!(!isospectral_up_to(&d, &t, SpectrumMode::Exact).unwrap().isospectral);
}

#[test]
fn long_braid() {
    let mut pw = vec![(1, -1), (2, -3), (3, -5), (1, 4), (2, -2), (3, -1), (1, 1), (2, 1), (3, -2)];
    for _ in 0..19 {
        pw.extend([(2, 1), (3, -2)]);
    }
    pw.extend([(1, -8), (3, -1), (1, -2), (2, 2), (3, -1), (1, -1), (2, 1), (3, 1), (1, 1), (2, -1), (3, -1)]);
    let w = BraidWord::from_powers(4, &pw).unwrap();
    let start = Instant::now();
    let ms = dynnikov_matrices(&w, &SearchOptions::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].matrix, imat("long_braid_D.json"));
    let d = dilatation(&ms[0].matrix).unwrap();
    assert!((d.ln() - 34.38).abs() < 0.01, "ln λ = {}", d.ln());
    assert!(elapsed < 10.0, "took {elapsed}s");
}

#[test]
fn dominant_root_brackets() {
    let d = dominant_root(&IntPoly::from_i64(&[1, -4, -2, -4, 1])).unwrap();
    assert!(d.lower <= d.upper);
    assert!((d.value - 4.611581789).abs() < 1e-9);
    let _ = (int(1), rat(1, 2), parse_rat_matrix(&fixture("gamma_L1.json")).unwrap());
}
