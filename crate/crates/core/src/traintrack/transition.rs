//! Transition matrices of train track maps.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::{int_matrix_json, parse_int_matrix};
use crate::linalg::IntMatrix;
use crate::scalar::bigint_to_f64;
use crate::spectral::{dilatation, Dilatation};

/// Nonnegative integer matrix, optionally split as `[[T, 0], [*, P]]` with
/// the main block `T` of size `main` and a permutation block `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub matrix: IntMatrix,
    pub main: Option<usize>,
    /// `permutation[i] = j` when row `i` of `P` has its 1 in column `j`.
    pub permutation: Option<Vec<usize>>,
}

impl TransitionMatrix {
    pub fn new(matrix: IntMatrix, main: Option<usize>, permutation: Option<Vec<usize>>) -> Result<Self> {
        let t = TransitionMatrix { matrix, main, permutation };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        if m.entries().iter().any(|x| x.is_negative()) {
            return Err(Error::Dimension("transition matrices are nonnegative".into()));
        }
        let n = m.rows();
        let Some(k) = self.main else {
            if self.permutation.is_some() {
                return Err(Error::Dimension("a permutation block needs a main block size".into()));
            }
            return Ok(());
        };
        if k == 0 || k > n {
            return Err(Error::Dimension(format!("main block size {k} for a {n}x{n} matrix")));
        }
        for i in 0..k {
            for j in k..n {
                if !m.get(i, j).is_zero() {
                    return Err(Error::Dimension(format!("entry ({i},{j}) above the permutation block is nonzero")));
                }
            }
        }
        let p = m.block(k..n, k..n);
        let perm: Vec<usize> = match &self.permutation {
            Some(perm) => perm.clone(),
            None => (0..n - k)
                .map(|i| p.row(i).iter().position(|x| *x == BigInt::from(1)).unwrap_or(usize::MAX))
                .collect(),
        };
        let mut seen = vec![false; n - k];
        for (i, &j) in perm.iter().enumerate() {
            if perm.len() != n - k || j >= n - k || seen[j] {
                return Err(Error::Dimension("lower right block is not a permutation".into()));
            }
            seen[j] = true;
            for c in 0..n - k {
                let want = BigInt::from(i64::from(c == j));
                if *p.get(i, c) != want {
                    return Err(Error::Dimension("lower right block is not a permutation".into()));
                }
            }
        }
        Ok(())
    }

    pub fn main_block(&self) -> IntMatrix {
        match self.main {
            Some(k) => self.matrix.block(0..k, 0..k),
            None => self.matrix.clone(),
        }
    }

    /// A bare matrix, or `{"matrix", "main"?, "permutation"?}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let matrix = parse_int_matrix(v)?;
        let main = v.get("m").or_else(|| v.get("main")).and_then(Value::as_u64).map(|x| x as usize);
        let permutation = match v.get("permutation") {
            Some(p) => Some(
                p.as_array()
                    .ok_or_else(|| Error::Parse("permutation must be an array".into()))?
                    .iter()
                    .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| Error::Parse("bad permutation entry".into())))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        Self::new(matrix, main, permutation)
    }

    pub fn to_json(&self) -> Value {
        let mut o = json!({"matrix": int_matrix_json(&self.matrix)});
        if let Some(k) = self.main {
            o["m"] = json!(k);
        }
        if let Some(p) = &self.permutation {
            o["permutation"] = json!(p);
        }
        o
    }
}

/// Perron-Frobenius data of the main block.
#[derive(Clone, Debug)]
pub struct PerronFrobenius {
    pub dilatation: Dilatation,
    /// Positive eigenvector of unit Euclidean norm.
    pub vector: Vec<f64>,
}

fn strongly_connected(m: &IntMatrix) -> bool {
    let n = m.rows();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let e = if forward { m.get(i, j) } else { m.get(j, i) };
                if !seen[j] && !e.is_zero() {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    n > 0 && reach(true) && reach(false)
}

/// Dilatation and Perron-Frobenius eigenvector of the main block.
pub fn transition_pf(t: &TransitionMatrix, tol: f64) -> Result<PerronFrobenius> {
    let m = t.main_block();
    let n = m.rows();
    if !strongly_connected(&m) {
        return Err(Error::NotIrreducible("the transition graph is not strongly connected".into()));
    }
    let lambda = dilatation(&m).map_err(|e| Error::NotIrreducible(e.to_string()))?;
    if lambda.value <= 1.0 {
        return Err(Error::NotIrreducible(format!("spectral radius {} is not above 1", lambda.value)));
    }
    let a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).iter().map(bigint_to_f64).collect()).collect();
    // power iteration on M + I, which is primitive when M is irreducible
    let mut v = vec![1.0 / n as f64; n];
    let mut converged = false;
    for _ in 0..200_000 {
        let mut u: Vec<f64> = (0..n).map(|i| v[i] + a[i].iter().zip(&v).map(|(x, y)| x * y).sum::<f64>()).collect();
        let s: f64 = u.iter().sum();
        u.iter_mut().for_each(|x| *x /= s);
        let d = u.iter().zip(&v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        v = u;
        if d < tol {
            converged = true;
            break;
        }
    }
    if !converged || v.iter().any(|&x| x <= 0.0) {
        return Err(Error::NotIrreducible("no positive eigenvector found".into()));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(PerronFrobenius { dilatation: lambda, vector: v })
}
