//! Update rules for the action of `σ_i^{±1}` on Dynnikov coordinates.
//!
//! The formulas are written once against [`MaxPlus`]; evaluating them with
//! plain scalars gives the action, evaluating them with affine rows gives the
//! local integer matrix and the inequalities of the linearity region.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::braid::{BraidWord, Letter};
use crate::coords::DynnikovVector;
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::scalar::{Scalar, ScalarKind};

/// Max-plus expression evaluator.
pub trait MaxPlus {
    type V: Clone;
    fn var(&self, k: usize) -> Self::V;
    fn zero(&self) -> Self::V;
    fn add(&self, x: &Self::V, y: &Self::V) -> Self::V;
    fn sub(&self, x: &Self::V, y: &Self::V) -> Self::V;
    fn max(&mut self, args: &[Self::V]) -> Self::V;
}

/// New values of the coordinates changed by `l`, as flat indices.
/// `m = n − 2`; `a_j` sits at `j − 1` and `b_j` at `m + j − 1`.
pub fn letter_outputs<E: MaxPlus>(e: &mut E, m: usize, l: Letter) -> Vec<(usize, E::V)> {
    let i = l.index;
    let z = e.zero();
    if i == 1 {
        let (a, b) = (e.var(0), e.var(m));
        if l.sign > 0 {
            let mx = e.max(&[a.clone(), z.clone(), b.clone()]);
            let a1 = e.sub(&e.add(&a, &b), &mx);
            let mb = e.max(&[z, b]);
            let b1 = e.sub(&mb, &a);
            vec![(0, a1), (m, b1)]
        } else {
            let mb = e.max(&[z.clone(), b.clone()]);
            let s = e.add(&a, &mb);
            let ms = e.max(&[z, s.clone()]);
            let a1 = e.sub(&ms, &b);
            vec![(0, a1), (m, s)]
        }
    } else if i == m + 1 {
        let (p, q) = (e.var(m - 1), e.var(2 * m - 1));
        if l.sign > 0 {
            let mq = e.max(&[z, q.clone()]);
            let s = e.add(&p, &mq);
            let a1 = e.max(&[s.clone(), q.clone()]);
            let b1 = e.sub(&q, &s);
            vec![(m - 1, a1), (2 * m - 1, b1)]
        } else {
            let pq = e.add(&p, &q);
            let mx = e.max(&[pq.clone(), z.clone(), q.clone()]);
            let a1 = e.sub(&p, &mx);
            let mq = e.max(&[z, q]);
            let b1 = e.sub(&pq, &mq);
            vec![(m - 1, a1), (2 * m - 1, b1)]
        }
    } else {
        let (ia, ib) = (i - 2, m + i - 2);
        let (p, q, r, t) = (e.var(ia), e.var(ib), e.var(ia + 1), e.var(ib + 1));
        let mq = e.max(&[z.clone(), q.clone()]);
        let mt = e.max(&[z, t.clone()]);
        if l.sign > 0 {
            let pmq = e.add(&p, &mq);
            let rq = e.add(&r, &q);
            let x = e.max(&[e.add(&pmq, &mt), rq.clone()]);
            let a0 = e.max(&[pmq, rq.clone()]);
            let b0 = e.sub(&e.add(&rq, &t), &x);
            let m1 = e.max(&[e.add(&p, &mt), r.clone()]);
            let a1 = e.sub(&e.add(&e.add(&p, &r), &t), &m1);
            let b1 = e.sub(&x, &r);
            vec![(ia, a0), (ib, b0), (ia + 1, a1), (ib + 1, b1)]
        } else {
            let pq = e.add(&p, &q);
            let rmq = e.add(&r, &mq);
            let y = e.max(&[pq.clone(), e.add(&rmq, &mt)]);
            let m0 = e.max(&[pq.clone(), rmq]);
            let a0 = e.sub(&e.add(&p, &r), &m0);
            let b0 = e.sub(&e.add(&pq, &t), &y);
            let m1 = e.max(&[p.clone(), e.add(&r, &mt)]);
            let a1 = e.sub(&m1, &t);
            let b1 = e.sub(&y, &p);
            vec![(ia, a0), (ib, b0), (ia + 1, a1), (ib + 1, b1)]
        }
    }
}

struct Plain<'a, S> {
    x: &'a [S],
}

impl<S: Scalar> MaxPlus for Plain<'_, S> {
    type V = S;
    fn var(&self, k: usize) -> S {
        self.x[k].clone()
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
    fn max(&mut self, args: &[S]) -> S {
        let mut best = args[0].clone();
        for a in &args[1..] {
            if a.cmp_s(&best) == Ordering::Greater {
                best = a.clone();
            }
        }
        best
    }
}

/// The attained argument of one max node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeChoice {
    pub winner: u8,
    pub tie: bool,
}

/// Per letter, the choices made at each max node in evaluation order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchSignature(pub Vec<Vec<NodeChoice>>);

impl BranchSignature {
    pub fn has_tie(&self) -> bool {
        self.0.iter().flatten().any(|c| c.tie)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when the two signatures agree at every node neither flags as tied.
    pub fn agrees_off_ties(&self, other: &BranchSignature) -> bool {
        self.0.len() == other.0.len()
            && self.0.iter().zip(&other.0).all(|(x, y)| {
                x.len() == y.len()
                    && x.iter().zip(y).all(|(c, d)| c.tie || d.tie || c.winner == d.winner)
            })
    }
}

/// Linear piece of one letter's action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryUpdateMatrix {
    pub letter: Letter,
    pub choices: Vec<NodeChoice>,
    pub matrix: IntMatrix,
}

/// `row · x ≥ 0`, from a max node's winner minus one of its other arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionConstraint {
    pub row: Vec<BigInt>,
    pub tied: bool,
}

#[derive(Clone, Debug)]
pub struct TracedAction<S> {
    pub value: DynnikovVector<S>,
    pub signature: BranchSignature,
    pub matrix: IntMatrix,
    pub constraints: Vec<RegionConstraint>,
    pub elementary: Vec<ElementaryUpdateMatrix>,
}

/// When two max arguments count as tied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieRule {
    Exact,
    /// Within `2^(−bits)` times the sup norm of the letter's input.
    RelativeBits(u32),
}

impl TieRule {
    pub fn default_for<S: Scalar>(v: &DynnikovVector<S>) -> TieRule {
        match S::KIND {
            ScalarKind::Integer | ScalarKind::Rational => TieRule::Exact,
            ScalarKind::Float => TieRule::RelativeBits(26),
            ScalarKind::BigFloat => TieRule::RelativeBits(
                v.to_flat().iter().map(|x| x.precision_bits()).max().unwrap_or(53) / 2,
            ),
        }
    }
}

struct Traced<'a, S> {
    x: &'a [S],
    dim: usize,
    tol: Option<S>,
    nodes: Vec<(NodeChoice, Vec<Vec<i64>>)>,
}

impl<S: Scalar> MaxPlus for Traced<'_, S> {
    type V = (S, Vec<i64>);
    fn var(&self, k: usize) -> Self::V {
        let mut row = vec![0; self.dim];
        row[k] = 1;
        (self.x[k].clone(), row)
    }
    fn zero(&self) -> Self::V {
        (S::zero_s(), vec![0; self.dim])
    }
    fn add(&self, x: &Self::V, y: &Self::V) -> Self::V {
        (x.0.add(&y.0), x.1.iter().zip(&y.1).map(|(p, q)| p + q).collect())
    }
    fn sub(&self, x: &Self::V, y: &Self::V) -> Self::V {
        (x.0.sub(&y.0), x.1.iter().zip(&y.1).map(|(p, q)| p - q).collect())
    }
    fn max(&mut self, args: &[Self::V]) -> Self::V {
        let mut w = 0;
        for (k, a) in args.iter().enumerate().skip(1) {
            if a.0.cmp_s(&args[w].0) == Ordering::Greater {
                w = k;
            }
        }
        let mut tie = false;
        let mut cons = Vec::new();
        for (k, a) in args.iter().enumerate() {
            if k == w {
                continue;
            }
            let gap = args[w].0.sub(&a.0);
            tie |= match &self.tol {
                None => gap.is_zero_s(),
                Some(t) => gap.cmp_s(t) != Ordering::Greater,
            };
            cons.push(args[w].1.iter().zip(&a.1).map(|(p, q)| p - q).collect());
        }
        self.nodes.push((NodeChoice { winner: w as u8, tie }, cons));
        args[w].clone()
    }
}

fn check_letter(n: usize, index: usize) -> Result<()> {
    if index == 0 || index >= n {
        return Err(Error::IndexOutOfRange { index, strands: n });
    }
    Ok(())
}

/// Apply `σ_i^sign` to `v`.
pub fn apply_generator<S: Scalar>(
    v: &DynnikovVector<S>,
    i: usize,
    sign: i8,
) -> Result<DynnikovVector<S>> {
    check_letter(v.strands(), i)?;
    let mut x = v.to_flat();
    step_plain(&mut x, v.strands() - 2, Letter::new(i, sign));
    DynnikovVector::new_unchecked(x[..v.strands() - 2].to_vec(), x[v.strands() - 2..].to_vec())
}

fn step_plain<S: Scalar>(x: &mut [S], m: usize, l: Letter) {
    let out = letter_outputs(&mut Plain { x }, m, l);
    for (k, val) in out {
        x[k] = val;
    }
}

/// Apply the letters of `w` in order.
pub fn apply_braid<S: Scalar>(v: &DynnikovVector<S>, w: &BraidWord) -> Result<DynnikovVector<S>> {
    if v.strands() != w.strands() {
        return Err(Error::StrandMismatch(v.strands(), w.strands()));
    }
    let m = v.strands() - 2;
    let mut x = v.to_flat();
    for &l in w.letters() {
        step_plain(&mut x, m, l);
    }
    let b = x.split_off(m);
    DynnikovVector::new_unchecked(x, b)
}

/// [`traced_apply_with`] using exact ties for exact scalars and the working
/// precision otherwise.
pub fn traced_apply<S: Scalar>(v: &DynnikovVector<S>, w: &BraidWord) -> Result<TracedAction<S>> {
    traced_apply_with(v, w, TieRule::default_for(v))
}

/// Apply `w` and record the max choices, the integer matrix of the local
/// linear piece, and the region inequalities pulled back to the input.
pub fn traced_apply_with<S: Scalar>(
    v: &DynnikovVector<S>,
    w: &BraidWord,
    tie: TieRule,
) -> Result<TracedAction<S>> {
    if v.strands() != w.strands() {
        return Err(Error::StrandMismatch(v.strands(), w.strands()));
    }
    let m = v.strands() - 2;
    let dim = 2 * m;
    let mut x = v.to_flat();
    let mut acc = IntMatrix::identity(dim);
    let mut signature = Vec::with_capacity(w.len());
    let mut constraints = Vec::new();
    let mut elementary = Vec::with_capacity(w.len());
    for &l in w.letters() {
        let tol = match tie {
            TieRule::Exact => None,
            TieRule::RelativeBits(bits) => {
                let sup = x.iter().fold(S::zero_s(), |s, y| s.max_s(&y.abs_s()));
                Some(sup.mul_pow2(-(bits as i64)))
            }
        };
        let mut ev = Traced { x: &x, dim, tol, nodes: Vec::new() };
        let out = letter_outputs(&mut ev, m, l);
        let nodes = std::mem::take(&mut ev.nodes);
        for (choice, rows) in &nodes {
            for r in rows {
                let row = acc.left_mul_vec(&r.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>());
                constraints.push(RegionConstraint { row, tied: choice.tie });
            }
        }
        let mut e = IntMatrix::identity(dim);
        let mut new_rows = Vec::new();
        for (k, (val, row)) in out {
            let brow: Vec<BigInt> = row.iter().map(|&c| BigInt::from(c)).collect();
            for (j, c) in brow.iter().enumerate() {
                e.set(k, j, c.clone());
            }
            new_rows.push((k, acc.left_mul_vec(&brow)));
            x[k] = val;
        }
        let mut rows = acc.to_rows();
        for (k, r) in new_rows {
            rows[k] = r;
        }
        acc = IntMatrix::from_rows(rows)?;
        let choices: Vec<NodeChoice> = nodes.iter().map(|(c, _)| *c).collect();
        signature.push(choices.clone());
        elementary.push(ElementaryUpdateMatrix { letter: l, choices, matrix: e });
    }
    constraints.retain(|c| c.row.iter().any(|x| !x.is_zero()));
    let b = x.split_off(m);
    Ok(TracedAction {
        value: DynnikovVector::new_unchecked(x, b)?,
        signature: BranchSignature(signature),
        matrix: acc,
        constraints,
        elementary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    fn qv(a: &[i64], b: &[i64]) -> DynnikovVector<BigRational> {
        DynnikovVector::<BigRational>::from_i64(a, b).unwrap()
    }

    #[test]
    fn mixed_word_in_integers() {
        let v = DynnikovVector::<BigInt>::from_i64(&[-1, -1], &[0, -1]).unwrap();
        let w = BraidWord::parse("-3 2 -1", 4).unwrap();
        let out = apply_braid(&v, &w).unwrap();
        assert_eq!(out.to_flat(), [2, -3, -1, 0].map(BigInt::from).to_vec());
    }

    #[test]
    fn hand_case_sigma_one() {
        let out = apply_generator(&qv(&[-2], &[-1]), 1, 1).unwrap();
        assert_eq!(out.to_flat(), vec![rat(-3, 1), rat(2, 1)]);
        assert!(apply_generator(&qv(&[-2], &[-1]), 3, 1).is_err());
    }

    #[test]
    fn inverse_pairs_all_classes() {
        let v = qv(&[3, -2, 5], &[-1, 4, -7]);
        for i in 1..=4 {
            for s in [1i8, -1] {
                let there = apply_generator(&v, i, s).unwrap();
                assert_eq!(apply_generator(&there, i, -s).unwrap(), v, "i={i} s={s}");
            }
        }
    }

    #[test]
    fn traced_example_sigma1_sigma2_inverse() {
        let v = DynnikovVector::new(vec![-1.618f64], vec![-1.0]).unwrap();
        let w = BraidWord::parse("1 -2", 3).unwrap();
        let t = traced_apply(&v, &w).unwrap();
        assert_eq!(t.matrix, IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]));
        assert!(!t.signature.has_tie());
        let id = traced_apply(&v, &BraidWord::identity(3).unwrap()).unwrap();
        assert!(id.matrix.is_identity() && id.signature.is_empty());
    }

    #[test]
    fn traced_value_matches_matrix() {
        let v = qv(&[7, -3, 2], &[-5, 11, -1]);
        let w = BraidWord::parse("1 2 -3 4 -2 -1 3 3", 5).unwrap();
        let t = traced_apply(&v, &w).unwrap();
        assert_eq!(t.value, apply_braid(&v, &w).unwrap());
        let mv = t.matrix.to_rational().mul_vec(&v.to_flat());
        assert_eq!(mv, t.value.to_flat());
        for e in &t.elementary {
            assert_eq!(e.matrix.det().unwrap().magnitude(), &1u32.into());
        }
    }
}
