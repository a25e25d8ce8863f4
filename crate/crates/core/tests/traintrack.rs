mod common;

use std::collections::BTreeSet;

use common::*;

use dynnikov::json::{parse_int_matrix, parse_integer, parse_rat_matrix};
use dynnikov::scalar::rat;
use dynnikov::traintrack::*;
use dynnikov::{DynnikovVector, Error, IntMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64) -> BigRational {
    rat(n, 1)
}

fn min(x: &BigRational, y: &BigRational) -> BigRational {
    x.min(y).clone()
}

fn max(x: &BigRational, y: &BigRational) -> BigRational {
    x.max(y).clone()
}

#[test]
fn loading_and_rank() {
    let (t, ann) = load_annotated(&fixture("four_puncture_track.json")).unwrap();
    assert_eq!(t.rank(), 4);
    assert!(t.is_complete());
    assert!(ann.is_some());
    check_polygon_edges(&t).unwrap();
    let g = load_track(&fixture("gamma_track.json")).unwrap();
    assert_eq!(g.rank(), 3);
    assert!(!g.is_complete());
    let back = TrainTrack::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);
}

#[test]
fn malformed_tracks_rejected() {
    let mut doc = fixture("four_puncture_track.json");
    doc["switches"][0]["sideB"] = serde_json::json!(["m1.from", "m1.from"]);
    assert!(matches!(load_track(&doc), Err(Error::InvalidTrack(_))));
    let mut doc = fixture("four_puncture_track.json");
    doc["switches"][0]["sideB"] = serde_json::json!(["m1.from"]);
    assert!(matches!(load_track(&doc), Err(Error::InvalidTrack(_))));
    let mut doc = fixture("four_puncture_track.json");
    doc["polygons"][4] = serde_json::json!({"punctured": false, "vertices": 2});
    assert!(matches!(load_track(&doc), Err(Error::InvalidTrack(_))));
    let mut doc = fixture("four_puncture_track.json");
    doc["polygons"].as_array_mut().unwrap().pop();
    assert!(matches!(load_track(&doc), Err(Error::InvalidTrack(_))));
    let mut doc = fixture("four_puncture_track.json");
    doc["branches"][0]["from"] = serde_json::json!({"switch": "T1"});
    assert!(matches!(load_track(&doc), Err(Error::InvalidTrack(_))));
}

#[test]
fn four_puncture_switch_conditions() {
    let t = load_track(&fixture("four_puncture_track.json")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    for _ in 0..50 {
        let [a, b, c, d] = random_four_puncture(&mut rng);
        let mu = four_puncture_measure(&a, &b, &c, &d);
        assert!(check_switch_conditions(&t, &mu).unwrap());
        let mut bad = mu.clone();
        bad.insert("m5", mu.get("m5").unwrap() + q(1));
        assert!(!check_switch_conditions(&t, &bad).unwrap());
    }
    let zero = four_puncture_measure(&q(0), &q(0), &q(0), &q(0));
    assert!(check_switch_conditions(&t, &zero).unwrap());
    let partial = Measure::from_pairs([("a", q(1))]);
    assert!(matches!(check_switch_conditions(&t, &partial), Err(Error::MissingWeight(_))));
}

#[test]
fn four_puncture_chart_completes_measures() {
    let t = load_track(&fixture("four_puncture_track.json")).unwrap();
    let chart = MeasureChart::default_for(&t).unwrap();
    let mu = chart.measure(&[q(6), q(4), q(5), q(2)]).unwrap();
    assert_eq!(mu, four_puncture_measure(&q(6), &q(4), &q(5), &q(2)));
}

#[test]
fn four_puncture_path_measures() {
    let t = load_track(&fixture("four_puncture_track.json")).unwrap();
    let p1 = TrainPath::parse(&["m2", "b", "m6"]).unwrap();
    let p2 = TrainPath::parse(&["d", "m3"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let [a, b, c, d] = random_four_puncture(&mut rng);
        let mu = four_puncture_measure(&a, &b, &c, &d);
        let (m2, m3, m6) = (mu.get("m2").unwrap(), mu.get("m3").unwrap(), mu.get("m6").unwrap());
        assert_eq!(path_measure(&t, &p1, &mu).unwrap(), min(m2, m6));
        assert_eq!(path_measure(&t, &p2, &mu).unwrap(), min(&d, m3));
        // a single branch carries its own weight
        assert_eq!(path_measure(&t, &TrainPath::parse(&["m7"]).unwrap(), &mu).unwrap(), *mu.get("m7").unwrap());
    }
    let bad = TrainPath::parse(&["a", "b"]).unwrap();
    assert!(matches!(path_measure(&t, &bad, &four_puncture_measure(&q(2), &q(2), &q(2), &q(2))), Err(Error::NonSmoothPath(_))));
}

#[test]
fn four_puncture_change_of_coords_closed_form() {
    let (t, ann) = load_annotated(&fixture("four_puncture_track.json")).unwrap();
    let ann = ann.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2028);
    let h = rat(1, 2);
    for _ in 0..100 {
        let [a, b, c, d] = random_four_puncture(&mut rng);
        let mu = four_puncture_measure(&a, &b, &c, &d);
        assert_eq!(arc_measure(&t, &ann, ArcId::Beta(1), &mu).unwrap(), a);
        assert_eq!(arc_measure(&t, &ann, ArcId::Alpha(2), &mu).unwrap(), max(&a, &c) - &b * &h);
        let got = change_of_coords(&t, &ann, &mu).unwrap();
        let want = DynnikovVector::new(
            vec![(max(&a, &c) - &b) * &h, -min(&c, &d) * &h],
            vec![(&a - &c) * &h, (&c - &d) * &h],
        )
        .unwrap();
        assert_eq!(got, want);
    }
    let zero = four_puncture_measure(&q(0), &q(0), &q(0), &q(0));
    assert!(arc_measure(&t, &ann, ArcId::Alpha(2), &zero).unwrap().is_zero());
}

#[test]
fn four_puncture_linearization_matches_closed_form() {
    let (t, ann) = load_annotated(&fixture("four_puncture_track.json")).unwrap();
    let ann = ann.unwrap();
    let chart = MeasureChart::default_for(&t).unwrap();
    // a > c > d
    let l = linearize_change_of_coords(&t, &ann, &chart, &[q(7), q(6), q(5), q(2)]).unwrap();
    let want = parse_rat_matrix(&serde_json::json!([
        ["1/2", "-1/2", 0, 0],
        [0, 0, 0, "-1/2"],
        ["1/2", 0, "-1/2", 0],
        [0, 0, "1/2", "-1/2"]
    ]))
    .unwrap();
    assert_eq!(l, want);
    // c > a, d > c
    let l = linearize_change_of_coords(&t, &ann, &chart, &[q(5), q(6), q(7), q(9)]).unwrap();
    assert_eq!(l.row(0), [q(0), rat(-1, 2), rat(1, 2), q(0)].as_slice());
    assert_eq!(l.row(1), [q(0), q(0), rat(-1, 2), q(0)].as_slice());
    // a = c is a wall
    assert!(matches!(
        linearize_change_of_coords(&t, &ann, &chart, &[q(5), q(6), q(5), q(2)]),
        Err(Error::TieAtBasepoint(_))
    ));
}

fn gamma_pinched() -> (TrainTrack, ArcAnnotations) {
    let (t, ann) = load_annotated(&fixture("gamma_track_pinched.json")).unwrap();
    (t, ann.unwrap())
}

#[test]
fn gamma_pinch_gives_complete_track() {
    let tau = load_track(&fixture("gamma_track.json")).unwrap();
    let moved = pinch_punctured(&tau, "u").unwrap();
    let (mut tp, _) = gamma_pinched();
    tp.set_coordinates(tau.coordinates().to_vec()).unwrap();
    assert_eq!(moved.track, tp);
    assert!(moved.track.is_complete());
    moved.track.validate_global().unwrap();
    check_polygon_edges(&moved.track).unwrap();
    assert_eq!(diagonal_extensions_count(&tau), BigInt::from(2));
    assert_eq!(enumerate_diagonal_extensions(&tau, 100).unwrap().len(), 2);
}

#[test]
fn gamma_linearizations_are_the_printed_matrices() {
    let (t, ann) = gamma_pinched();
    let chart = MeasureChart::default_for(&t).unwrap();
    let l1 = parse_rat_matrix(&fixture("gamma_L1.json")).unwrap();
    let l2 = parse_rat_matrix(&fixture("gamma_L2.json")).unwrap();
    // coordinates (a, b, c, v)
    let above = linearize_change_of_coords(&t, &ann, &chart, &[q(1), q(5), q(3), q(1)]).unwrap();
    let below = linearize_change_of_coords(&t, &ann, &chart, &[q(1), q(3), q(5), q(1)]).unwrap();
    assert_eq!(above, l2);
    assert_eq!(below, l1);
    assert!(matches!(
        linearize_change_of_coords(&t, &ann, &chart, &[q(1), q(4), q(4), q(1)]),
        Err(Error::TieAtBasepoint(_))
    ));
    // exact agreement with change_of_coords on each side
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = 0;
    while seen < 50 {
        let a = rat(rng.gen_range(1..30), rng.gen_range(1..5));
        let b = rat(rng.gen_range(60..200), rng.gen_range(1..3));
        let c = rat(rng.gen_range(60..200), rng.gen_range(1..3));
        let v = rat(rng.gen_range(1..50), 4);
        if b == c {
            continue;
        }
        let mu = chart.measure(&[a.clone(), b.clone(), c.clone(), v.clone()]).unwrap();
        if mu.weights().values().any(|x| !x.is_positive()) {
            continue;
        }
        seen += 1;
        let got = change_of_coords(&t, &ann, &mu).unwrap().to_flat();
        let l = if b > c { &l2 } else { &l1 };
        assert_eq!(got, l.mul_vec(&[a, b, c, v]));
    }
}

#[test]
fn gamma_conjugacy_and_completion() {
    let d = parse_int_matrix(&fixture("gamma_D.json")).unwrap();
    let tp = TransitionMatrix::from_json(&fixture("gamma_Tp.json")).unwrap();
    for name in ["gamma_L1.json", "gamma_L2.json"] {
        let l = parse_rat_matrix(&fixture(name)).unwrap();
        assert!(verify_conjugacy(&d, &l, &tp.matrix).unwrap(), "{name}");
        let partial: Vec<Vec<Option<BigInt>>> = fixture("gamma_Tp_partial.json")["matrix"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r.as_array().unwrap().iter().map(|x| if x.is_null() { None } else { Some(parse_integer(x).unwrap()) }).collect())
            .collect();
        assert_eq!(solve_completion(&d, &l, &partial).unwrap(), tp.matrix);
    }
    let i = IntMatrix::identity(4);
    assert!(verify_conjugacy(&i, &i.to_rational(), &i).unwrap());
    let l = parse_rat_matrix(&fixture("gamma_L1.json")).unwrap();
    assert!(!verify_conjugacy(&d, &l, &IntMatrix::identity(4)).unwrap());
    assert!(matches!(verify_conjugacy(&d, &IntMatrix::zeros(4, 4).to_rational(), &i), Err(Error::Singular)));
    assert!(verify_conjugacy(&d, &l, &IntMatrix::identity(3)).is_err());
}

#[test]
fn perron_frobenius_vectors() {
    let t = TransitionMatrix::from_json(&fixture("b4_T.json")).unwrap();
    let pf = transition_pf(&t, 1e-14).unwrap();
    assert!((pf.dilatation.value - 4.611581789).abs() < 1e-8);
    for (x, y) in pf.vector.iter().zip([0.50135, 0.59215, 0.41871, 0.47190]) {
        assert!((x - y).abs() < 5e-5);
    }
    let g = TransitionMatrix::from_json(&fixture("gamma_Tp.json")).unwrap();
    let pf = transition_pf(&g, 1e-14).unwrap();
    assert!((pf.dilatation.value - (17.0 + 12.0 * 2f64.sqrt())).abs() < 1e-9);
    let s = 1.0 + 2f64.sqrt();
    assert!((pf.vector[1] / pf.vector[0] - s).abs() < 1e-9 && (pf.vector[2] / pf.vector[0] - s).abs() < 1e-9);
    let id = TransitionMatrix::new(IntMatrix::identity(3), None, None).unwrap();
    assert!(matches!(transition_pf(&id, 1e-14), Err(Error::NotIrreducible(_))));
    assert!(TransitionMatrix::new(IntMatrix::from_i64_rows(&[&[1, 1], &[0, 2]]), Some(1), None).is_err());
}

#[test]
fn pinches_preserve_measures_and_raise_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for k in 2..=6 {
        for punct in [false, true] {
            if !punct && k < 4 {
                continue;
            }
            let t = gadget(&[(punct, k)]);
            check_polygon_edges(&t).unwrap();
            for i in 0..k {
                let edge = format!("e0_{i}");
                let moved = if punct { pinch_punctured(&t, &edge) } else { pinch_unpunctured(&t, &edge) }.unwrap();
                assert_eq!(moved.track.rank(), t.rank() + 1);
                check_polygon_edges(&moved.track).unwrap();
                let sizes: BTreeSet<(bool, usize)> =
                    moved.track.polygons().iter().map(|p| (p.punctured, p.vertices)).collect();
                if punct {
                    assert!(sizes.contains(&(false, k + 1)));
                } else {
                    assert!(sizes.contains(&(false, 3)) && sizes.contains(&(false, k - 1)));
                }
                for _ in 0..10 {
                    let mu = gadget_measure(&t, &mut rng);
                    assert!(check_switch_conditions(&t, &mu).unwrap());
                    let nu = moved.psi.apply(&mu).unwrap();
                    assert!(check_switch_conditions(&moved.track, &nu).unwrap());
                    assert!(nu.weights().values().all(|x| x.is_positive()));
                }
            }
        }
    }
    let t = gadget(&[(false, 3)]);
    assert!(matches!(pinch_unpunctured(&t, "e0_0"), Err(Error::InvalidMove(_))));
    assert!(matches!(pinch_punctured(&t, "e0_0"), Err(Error::InvalidMove(_))));
    let t = gadget(&[(true, 1)]);
    assert!(matches!(pinch_punctured(&t, "e0_0"), Err(Error::InvalidMove(_))));
}

#[test]
fn five_gon_pinch_sequence() {
    let t = gadget(&[(false, 5)]);
    let moved = pinch_unpunctured(&t, "e0_1").unwrap();
    let big: Vec<&Polygon> = moved.track.polygons().iter().filter(|p| !p.punctured).collect();
    let mut sizes: Vec<usize> = big.iter().map(|p| p.vertices).collect();
    sizes.sort();
    assert_eq!(sizes, vec![3, 4]);
    assert!(big.iter().any(|p| p.edges == ["e0_0", "e0_1", "e0_2"]));
}

#[test]
fn extension_counts_match_catalan_product() {
    let kinds: Vec<(bool, usize)> =
        (3..=6).map(|k| (false, k)).chain((1..=6).map(|p| (true, p))).collect();
    let mut multisets: Vec<Vec<(bool, usize)>> = kinds.iter().map(|&k| vec![k]).collect();
    for i in 0..kinds.len() {
        for j in i..kinds.len() {
            multisets.push(vec![kinds[i], kinds[j]]);
        }
    }
    for ms in multisets {
        let t = gadget(&ms);
        let want = oracle_count(&ms);
        if want > 2000 {
            continue;
        }
        assert_eq!(diagonal_extensions_count(&t), BigInt::from(want), "{ms:?}");
        let exts = enumerate_diagonal_extensions(&t, 10_000).unwrap();
        assert_eq!(exts.len(), want, "{ms:?}");
        let distinct: BTreeSet<String> = exts.iter().map(|e| e.track.to_json().to_string()).collect();
        assert_eq!(distinct.len(), want);
        for e in exts.iter().take(20) {
            check_polygon_edges(&e.track).unwrap();
            assert!(e.track.polygons().iter().all(|p| (p.punctured && p.vertices == 1) || (!p.punctured && p.vertices == 3)));
            let extra: usize = ms.iter().map(|&(p, k)| if p { if k == 1 { 0 } else { k - 1 } } else { k - 3 }).sum();
            assert_eq!(e.track.rank(), t.rank() + extra as i64);
        }
    }
    assert_eq!(catalan(3), BigInt::from(5));
    assert_eq!(triangulations(5).len(), 5);
}

#[test]
fn extension_measure_maps_add_zero_weights() {
    let t = gadget(&[(true, 3), (false, 5)]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mu = gadget_measure(&t, &mut rng);
    for e in enumerate_diagonal_extensions(&t, 1000).unwrap() {
        let nu = e.psi.apply(&mu).unwrap();
        assert!(check_switch_conditions(&e.track, &nu).unwrap());
        for a in &e.added {
            assert!(nu.get(a).unwrap().is_zero());
        }
    }
}

#[test]
fn annotations_validated() {
    let mut doc = fixture("four_puncture_track.json");
    doc["annotations"]["alpha_2"]["paths"] = serde_json::json!([["m2", "b", "m6"], ["b", "m6"]]);
    assert!(load_annotated(&doc).is_err());
    let mut doc = fixture("four_puncture_track.json");
    doc["annotations"].as_object_mut().unwrap().remove("beta_2");
    assert!(matches!(load_annotated(&doc), Err(Error::MissingAnnotation(_))));
    let mut doc = fixture("four_puncture_track.json");
    doc["annotations"]["beta_1"] = serde_json::json!({"complement": true});
    assert!(load_annotated(&doc).is_err());
    let mut doc = fixture("four_puncture_track.json");
    doc["annotations"]["alpha_1"]["paths"] = serde_json::json!([["a", "b"]]);
    assert!(matches!(load_annotated(&doc), Err(Error::NonSmoothPath(_))));
}
