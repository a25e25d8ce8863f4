//! Unstable directions and Dynnikov matrices of pseudo-Anosov braids.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::braid::BraidWord;
use crate::coords::{ray_distance, DynnikovVector};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::scalar::{f64_to_rational, BigFloat, FieldScalar, Scalar};
use crate::spectral::{dilatation, Dilatation};
use crate::update::{
    apply_braid, traced_apply_with, BranchSignature, RegionConstraint, TieRule,
};

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOptions {
    /// Mantissa bits of successive passes; 53 runs in machine doubles.
    pub ladder: Vec<u32>,
    /// Largest acceptable distance between successive iterates.
    pub target_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Probe radius relative to the sup norm of the fixed direction.
    pub radius: f64,
    /// Random probe directions per coordinate.
    pub random_probes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            ladder: vec![53, 128, 256, 512],
            target_tol: 1e-12,
            max_iters: 5000,
            seed: 0x5eed,
            radius: 1e-6,
            random_probes: 8,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        if self.ladder.is_empty() || self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("precision ladder must be strictly increasing".into()));
        }
        if self.ladder[0] == 0 || self.max_iters == 0 {
            return Err(Error::Parse("precision and iteration limits must be positive".into()));
        }
        if !(self.target_tol > 0.0 && self.radius > 0.0) {
            return Err(Error::Parse("tolerance and radius must be positive".into()));
        }
        Ok(())
    }

    fn rung_tol(bits: u32) -> f64 {
        10f64.powf(-(bits as f64) / 8.0)
    }

    // Comparisons within ~1000 times the iterate's error count as ties.
    fn tie_bits(bits: u32, residual: f64) -> u32 {
        let floor = (-(bits as f64) + 4.0).exp2();
        let tol = 1000.0 * residual.max(floor);
        (-tol.log2()).floor().max(8.0) as u32
    }
}

/// Attracting projective fixed point of a braid's action.
#[derive(Clone, Debug)]
pub struct UnstableDirection {
    /// Sup norm exactly 1; the sign is kept since the action is only
    /// positively homogeneous.
    pub point: DynnikovVector<BigRational>,
    pub dilatation: f64,
    pub iterations: usize,
    pub precision: u32,
    /// Distance between the last two iterates.
    pub residual: f64,
}

impl UnstableDirection {
    pub fn point_f64(&self) -> DynnikovVector<f64> {
        self.point.to_f64()
    }
}

fn seed_vector(n: usize, seed: u64) -> DynnikovVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n - 2;
    let a = (0..m).map(|_| rng.gen_range(-100i64..=100) as f64).collect();
    let b = (0..m).map(|_| (-1000 + rng.gen_range(-100i64..=100)) as f64).collect();
    DynnikovVector::new(a, b).expect("nonzero seed")
}

struct Pass<S> {
    last: DynnikovVector<S>,
    iterations: usize,
    converged: bool,
    lambda: f64,
    dist: f64,
}

fn iterate<S: FieldScalar>(w: &BraidWord, v0: DynnikovVector<S>, tol: f64, max_iters: usize) -> Pass<S> {
    let mut v = v0.normalize().unwrap_or(v0);
    let mut pass = Pass { last: v.clone(), iterations: 0, converged: false, lambda: 0.0, dist: f64::INFINITY };
    for it in 1..=max_iters {
        let Ok(u) = apply_braid(&v, w) else { break };
        let Ok(un) = u.normalize() else { break };
        let d = ray_distance(&un, &v).map(|x| x.to_f64()).unwrap_or(f64::INFINITY);
        pass.lambda = u.sup_norm().to_f64() / v.sup_norm().to_f64();
        pass.iterations = it;
        pass.dist = d;
        v = un;
        if d < tol {
            pass.converged = true;
            break;
        }
    }
    pass.last = v;
    pass
}

fn signature_stable<S: Scalar>(w: &BraidWord, v: &DynnikovVector<S>, tie_bits: u32) -> bool {
    let rule = TieRule::RelativeBits(tie_bits);
    let (Ok(t0), Ok(next)) = (traced_apply_with(v, w, rule), apply_braid(v, w)) else {
        return false;
    };
    match traced_apply_with(&next, w, rule) {
        Ok(t1) => t0.signature.agrees_off_ties(&t1.signature),
        Err(_) => false,
    }
}

fn normalized_rational(v: &DynnikovVector<BigRational>) -> DynnikovVector<BigRational> {
    v.normalize().expect("nonzero iterate")
}

/// Iterate `w` projectively from a seeded start until successive iterates
/// agree, climbing the precision ladder as needed.
pub fn find_unstable_direction(w: &BraidWord, opts: &SearchOptions) -> Result<UnstableDirection> {
    find_unstable_direction_from(w, opts, 0)
}

fn find_unstable_direction_from(
    w: &BraidWord,
    opts: &SearchOptions,
    min_bits: u32,
) -> Result<UnstableDirection> {
    opts.validate()?;
    let mut current: DynnikovVector<BigRational> =
        seed_vector(w.strands(), opts.seed).map(|x| f64_to_rational(*x));
    let mut total = 0;
    let mut last_report = String::from("no precision tried");
    for &bits in &opts.ladder {
        let tol = SearchOptions::rung_tol(bits);
        let accept_here = bits >= min_bits && tol <= opts.target_tol;
        let (last, pass_iters, converged, lambda, dist, stable) = if bits <= 53 {
            let p = iterate(w, current.to_f64(), tol, opts.max_iters);
            let stable = accept_here && p.converged && signature_stable(w, &p.last, SearchOptions::tie_bits(53, p.dist));
            (p.last.map(|x| f64_to_rational(*x)), p.iterations, p.converged, p.lambda, p.dist, stable)
        } else {
            let start = current.map(|x| BigFloat::from_rational(x, bits));
            let p = iterate(w, start, tol, opts.max_iters);
            let stable = accept_here && p.converged && signature_stable(w, &p.last, SearchOptions::tie_bits(bits, p.dist));
            (p.last.map(|x| x.to_rational()), p.iterations, p.converged, p.lambda, p.dist, stable)
        };
        total += pass_iters;
        current = normalized_rational(&last);
        last_report = format!("{bits}-bit pass: distance {dist:e} after {pass_iters} iterations");
        if converged && accept_here && stable {
            if lambda.is_nan() || lambda <= 1.0 + 1e-9 {
                return Err(Error::NonConvergence(format!(
                    "iterates settle with growth factor {lambda}, no expanding direction"
                )));
            }
            return Ok(UnstableDirection {
                point: current,
                dilatation: lambda,
                iterations: total,
                precision: bits,
                residual: dist,
            });
        }
    }
    Err(Error::NonConvergence(last_report))
}

/// Unstable direction of the inverse braid.
pub fn stable_direction(w: &BraidWord, opts: &SearchOptions) -> Result<UnstableDirection> {
    find_unstable_direction(&w.inverse(), opts)
}

/// Integer matrix of one linear piece together with its closed region.
#[derive(Clone, Debug, PartialEq)]
pub struct DynnikovMatrix {
    pub matrix: IntMatrix,
    /// Rows `c` meaning `c·x ≥ 0`.
    pub region: Vec<Vec<BigInt>>,
    pub signature: BranchSignature,
}

#[derive(Clone, Debug)]
pub struct MatrixAnalysis {
    pub direction: UnstableDirection,
    pub matrices: Vec<DynnikovMatrix>,
    pub dilatation: Dilatation,
    pub probe_radius: f64,
}

fn dot(row: &[BigInt], p: &[BigRational]) -> BigRational {
    row.iter().zip(p).fold(BigRational::zero(), |s, (c, x)| s + x * BigRational::from_integer(c.clone()))
}

fn l1(row: &[BigInt]) -> f64 {
    row.iter().map(|c| crate::scalar::bigint_to_f64(&c.abs())).sum()
}

fn region_rows(cons: &[RegionConstraint]) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = cons.iter().map(|c| c.row.clone()).collect();
    rows.sort();
    rows.dedup();
    rows
}

/// Dynnikov matrices of `w` at its unstable direction.
pub fn dynnikov_matrices(w: &BraidWord, opts: &SearchOptions) -> Result<Vec<DynnikovMatrix>> {
    Ok(analyze(w, opts)?.matrices)
}

/// Fixed direction, verified Dynnikov matrices and their common dilatation.
pub fn analyze(w: &BraidWord, opts: &SearchOptions) -> Result<MatrixAnalysis> {
    let mut min_bits = 0;
    loop {
        let dir = find_unstable_direction_from(w, opts, min_bits)?;
        match probe_regions(w, &dir, opts)? {
            Some((matrices, probe_radius)) => {
                let dilatation = verify(&dir, &matrices)?;
                return Ok(MatrixAnalysis { direction: dir, matrices, dilatation, probe_radius });
            }
            None => match opts.ladder.iter().find(|&&b| b > dir.precision) {
                Some(&b) => min_bits = b,
                None => {
                    return Err(Error::VerificationFailed(
                        "linearity region around the fixed direction is thinner than the working precision resolves".into(),
                    ))
                }
            },
        }
    }
}

// None when the probe radius cannot clear the approximation error of the point.
fn probe_regions(
    w: &BraidWord,
    dir: &UnstableDirection,
    opts: &SearchOptions,
) -> Result<Option<(Vec<DynnikovMatrix>, f64)>> {
    let p = dir.point.to_flat();
    let n = p.len();
    let at = traced_apply_with(&dir.point, w, TieRule::RelativeBits(SearchOptions::tie_bits(dir.precision, dir.residual)))?;
    let margin = at
        .constraints
        .iter()
        .filter(|c| !c.tied)
        .map(|c| dot(&c.row, &p).to_f64() / l1(&c.row))
        .fold(f64::INFINITY, f64::min);
    let delta = opts.radius.min(margin / 4.0);
    let noise = 100.0 * SearchOptions::rung_tol(dir.precision);
    if delta.is_nan() || delta <= noise {
        return Ok(None);
    }
    let delta_q = f64_to_rational(delta);
    let mut dirs: Vec<Vec<BigRational>> = Vec::new();
    for k in 0..n {
        for s in [1i64, -1] {
            let mut d = vec![BigRational::zero(); n];
            d[k] = BigRational::from_integer(s.into());
            dirs.push(d);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let scale = 1i64 << 20;
    for _ in 0..opts.random_probes * n {
        let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(-scale..=scale)).collect();
        let top = raw.iter().map(|x| x.abs()).max().unwrap_or(0).max(1);
        dirs.push(raw.iter().map(|&x| BigRational::new(x.into(), top.into())).collect());
    }
    let mut found: BTreeMap<IntMatrix, DynnikovMatrix> = BTreeMap::new();
    for d in dirs {
        let q: Vec<BigRational> = p.iter().zip(&d).map(|(x, y)| x + y * &delta_q).collect();
        let qv = DynnikovVector::from_flat(q)?;
        let t = traced_apply_with(&qv, w, TieRule::Exact)?;
        if t.signature.has_tie() {
            continue;
        }
        found.entry(t.matrix.clone()).or_insert_with(|| DynnikovMatrix {
            matrix: t.matrix,
            region: region_rows(&t.constraints),
            signature: t.signature,
        });
    }
    if found.is_empty() {
        return Err(Error::VerificationFailed("every probe landed on a region wall".into()));
    }
    Ok(Some((found.into_values().collect(), delta)))
}

fn verify(dir: &UnstableDirection, mats: &[DynnikovMatrix]) -> Result<Dilatation> {
    let p = dir.point.to_flat();
    let lambda = dir.dilatation;
    let mut radii: Vec<Dilatation> = Vec::new();
    for m in mats {
        let mp = m.matrix.to_rational().mul_vec(&p);
        let norm = (0..m.matrix.rows())
            .map(|i| m.matrix.row(i).iter().map(|c| crate::scalar::bigint_to_f64(&c.abs())).sum::<f64>())
            .fold(0.0, f64::max);
        let err = mp
            .iter()
            .zip(&p)
            .map(|(x, y)| (x.to_f64() - lambda * y.to_f64()).abs())
            .fold(0.0, f64::max);
        if err > 1e-9 * lambda.max(norm) {
            return Err(Error::VerificationFailed(format!(
                "M·p differs from λp by {err:e} for matrix\n{}",
                m.matrix
            )));
        }
        for row in &m.region {
            let v = dot(row, &p).to_f64();
            if v < -1e-9 * l1(row) {
                return Err(Error::VerificationFailed(format!(
                    "fixed direction violates a region inequality by {v:e}"
                )));
            }
        }
        let d = dilatation(&m.matrix).map_err(|e| Error::VerificationFailed(e.to_string()))?;
        if ((d.value - lambda) / d.value).abs() > 1e-9 {
            return Err(Error::VerificationFailed(format!(
                "spectral radius {} disagrees with the growth factor {lambda}",
                d.value
            )));
        }
        radii.push(d);
    }
    let first = radii[0].clone();
    for r in &radii[1..] {
        if ((r.value - first.value) / first.value).abs() > 1e-12 {
            return Err(Error::VerificationFailed("matrices have different spectral radii".into()));
        }
    }
    Ok(first)
}

/// A maximal arc of the circle of directions on which `w` acts by one matrix.
///
/// Directions are parametrized by `t ∈ [0, 8)` along the boundary of the unit
/// sup-norm square, counterclockwise from the corner `(a, b) = (1, −1)`;
/// `end` may exceed 8 for the arc crossing the start.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionArc {
    pub start: f64,
    pub end: f64,
    pub matrix: IntMatrix,
}

impl RegionArc {
    pub fn contains(&self, t: f64) -> bool {
        (self.start <= t && t < self.end) || (self.start <= t + 8.0 && t + 8.0 < self.end)
    }
}

/// Point on the unit sup-norm square for parameter `t ∈ [0, 8)`.
pub fn square_point(t: &BigRational) -> DynnikovVector<BigRational> {
    let two = BigRational::from_integer(2.into());
    let one = BigRational::from_integer(1.into());
    let side = (t / &two).floor().to_integer();
    let side: i64 = i64::try_from(side).unwrap_or(0).rem_euclid(4);
    let s = t - &two * BigRational::from_integer(side.into()) - &one;
    let (a, b) = match side {
        0 => (one, s),
        1 => (-s, one),
        2 => (-one, -s),
        _ => (s, -one),
    };
    DynnikovVector::new(vec![a], vec![b]).expect("boundary point is nonzero")
}

/// Inverse of [`square_point`] for any nonzero direction.
pub fn square_parameter(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    let (a, b) = (a / s, b / s);
    let t = if a >= 1.0 && b < 1.0 {
        b + 1.0
    } else if b >= 1.0 && a > -1.0 {
        3.0 - a
    } else if a <= -1.0 && b > -1.0 {
        5.0 - b
    } else {
        7.0 + a
    };
    t.rem_euclid(8.0)
}

fn matrix_at(w: &BraidWord, t: &BigRational, nudge: &BigRational) -> Result<IntMatrix> {
    let mut t = t.clone();
    for _ in 0..8 {
        let tr = traced_apply_with(&square_point(&t), w, TieRule::Exact)?;
        if !tr.signature.has_tie() {
            return Ok(tr.matrix);
        }
        t += nudge;
    }
    let tr = traced_apply_with(&square_point(&t), w, TieRule::Exact)?;
    Ok(tr.matrix)
}

/// Decompose the circle of directions for a 3-strand braid into maximal arcs
/// with constant matrix.
pub fn enumerate_regions_n3(w: &BraidWord) -> Result<Vec<RegionArc>> {
    if w.strands() != 3 {
        return Err(Error::Dimension("region sweep needs 3 strands".into()));
    }
    let grid = 4096i64;
    let nudge = BigRational::new(1.into(), BigInt::from(1) << 70usize);
    let ts: Vec<BigRational> = (0..grid).map(|j| BigRational::new((8 * j).into(), grid.into())).collect();
    let mats: Vec<IntMatrix> = ts.iter().map(|t| matrix_at(w, t, &nudge)).collect::<Result<_>>()?;
    // pieces: (start parameter, matrix from there on)
    let mut pieces: Vec<(BigRational, IntMatrix)> = vec![(ts[0].clone(), mats[0].clone())];
    for j in 0..grid as usize {
        let k = (j + 1) % grid as usize;
        let t1 = if k == 0 { BigRational::from_integer(8.into()) } else { ts[k].clone() };
        if mats[j] != mats[k] {
            refine(w, &ts[j], &mats[j], &t1, &mats[k], &nudge, &mut pieces)?;
        }
    }
    let mut merged: Vec<(BigRational, IntMatrix)> = Vec::new();
    for (t, m) in pieces {
        if merged.last().is_none_or(|(_, lm)| *lm != m) {
            merged.push((t, m));
        }
    }
    let eight = 8.0;
    if merged.len() > 1 && merged[0].1 == merged.last().unwrap().1 {
        let (t, m) = merged.pop().unwrap();
        merged[0] = (t - BigRational::from_integer(8.into()), m);
    }
    let k = merged.len();
    let mut arcs = Vec::with_capacity(k);
    for i in 0..k {
        let start = merged[i].0.to_f64();
        let end = if i + 1 < k { merged[i + 1].0.to_f64() } else { merged[0].0.to_f64() + eight };
        let (start, end) = if start < 0.0 { (start + eight, end + eight) } else { (start, end) };
        arcs.push(RegionArc { start, end, matrix: merged[i].1.clone() });
    }
    arcs.sort_by(|x, y| x.start.total_cmp(&y.start));
    Ok(arcs)
}

fn refine(
    w: &BraidWord,
    t0: &BigRational,
    m0: &IntMatrix,
    t1: &BigRational,
    m1: &IntMatrix,
    nudge: &BigRational,
    out: &mut Vec<(BigRational, IntMatrix)>,
) -> Result<()> {
    let width = t1 - t0;
    let mid = (t0 + t1) / BigRational::from_integer(2.into());
    if width.to_f64() < 1e-15 {
        out.push((mid, m1.clone()));
        return Ok(());
    }
    let mm = matrix_at(w, &mid, nudge)?;
    if mm != *m0 {
        refine(w, t0, m0, &mid, &mm, nudge, out)?;
    }
    if mm != *m1 {
        refine(w, &mid, &mm, t1, m1, nudge, out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_parametrization_roundtrip() {
        for j in 0..64 {
            let t = BigRational::new((j * 8).into(), 64.into());
            let p = square_point(&t).to_f64();
            let back = square_parameter(p.a()[0], p.b()[0]);
            assert!((back - t.to_f64()).abs() < 1e-12, "t={} back={back}", t.to_f64());
        }
    }

    #[test]
    fn golden_braid_fixed_point() {
        let w = BraidWord::parse("1 -2", 3).unwrap();
        let d = find_unstable_direction(&w, &SearchOptions::default()).unwrap();
        let p = d.point_f64();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((p.a()[0] + 1.0).abs() < 1e-12 && (p.b()[0] + 1.0 / phi).abs() < 1e-12);
        assert!((d.dilatation - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn identity_has_no_unstable_direction() {
        let w = BraidWord::identity(4).unwrap();
        assert!(matches!(find_unstable_direction(&w, &SearchOptions::default()), Err(Error::NonConvergence(_))));
    }
}
