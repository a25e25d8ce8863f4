//! Conjugacy between Dynnikov matrices and transition matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, RatMatrix};

/// Exact check of `D·L = L·T` for an invertible `L`.
pub fn verify_conjugacy(d: &IntMatrix, l: &RatMatrix, t: &IntMatrix) -> Result<bool> {
    if !d.is_square() || !l.is_square() || !t.is_square() || d.rows() != l.rows() || t.rows() != l.cols() {
        return Err(Error::Dimension(format!(
            "D {}x{}, L {}x{}, T {}x{}",
            d.rows(),
            d.cols(),
            l.rows(),
            l.cols(),
            t.rows(),
            t.cols()
        )));
    }
    if l.det()?.is_zero() {
        return Err(Error::Singular);
    }
    Ok(d.to_rational().checked_mul(l)? == l.checked_mul(&t.to_rational())?)
}

/// Fill the unknown entries of `T` so that `D·L = L·T`; the solution must be
/// unique and integral.
pub fn solve_completion(d: &IntMatrix, l: &RatMatrix, partial: &[Vec<Option<BigInt>>]) -> Result<IntMatrix> {
    let k = l.cols();
    if partial.len() != k || partial.iter().any(|r| r.len() != k) || d.rows() != l.rows() || !d.is_square() {
        return Err(Error::Dimension("partial matrix does not fit D and L".into()));
    }
    let unknowns: Vec<(usize, usize)> =
        (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|&(i, j)| partial[i][j].is_none()).collect();
    let dl = d.to_rational().checked_mul(l)?;
    let u = unknowns.len();
    let rows = l.rows();
    // equation (r, j): Σ_i L[r][i]·T[i][j] = (DL)[r][j]
    let mut sys = RatMatrix::zeros(rows * k, u + 1);
    for r in 0..rows {
        for j in 0..k {
            let eq = r * k + j;
            let mut rhs = dl.get(r, j).clone();
            for i in 0..k {
                match &partial[i][j] {
                    Some(v) => rhs -= l.get(r, i) * BigRational::from_integer(v.clone()),
                    None => {
                        let col = unknowns.iter().position(|&x| x == (i, j)).expect("listed");
                        sys.set(eq, col, l.get(r, i).clone());
                    }
                }
            }
            sys.set(eq, u, rhs);
        }
    }
    let (red, pivots) = sys.rref();
    if pivots.contains(&u) {
        return Err(Error::VerificationFailed("no completion satisfies the conjugacy".into()));
    }
    if pivots.len() < u {
        return Err(Error::VerificationFailed("the completion is not unique".into()));
    }
    let mut t = IntMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            if let Some(v) = &partial[i][j] {
                t.set(i, j, v.clone());
            }
        }
    }
    for (row, &col) in pivots.iter().enumerate() {
        let v = red.get(row, u);
        if !v.is_integer() {
            return Err(Error::VerificationFailed(format!("entry {v} of the completion is not an integer")));
        }
        let (i, j) = unknowns[col];
        t.set(i, j, v.to_integer());
    }
    Ok(t)
}
