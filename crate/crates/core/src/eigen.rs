//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson-style shifts).

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 60;

/// Eigenpairs of a real symmetric tridiagonal matrix.
#[derive(Clone, Debug)]
pub struct TridiagonalEigen<T: Real> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Row `k` is the unit eigenvector belonging to `values[k]`.
    pub vectors: Array2<T>,
}

/// Diagonalizes the symmetric tridiagonal matrix with main diagonal `diag`
/// and off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`).
pub fn symmetric_tridiagonal_eigen<T: Real>(diag: &[T], off: &[T]) -> Result<TridiagonalEigen<T>> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagonalEigen {
            values: vec![],
            vectors: Array2::zeros((0, 0)),
        });
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(T::zero());
    // rows of `w` are the eigenvectors being accumulated
    let mut w = Array2::<T>::eye(n);
    let two = T::lit(2.0);
    let eps = T::epsilon();

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence(MAX_SWEEPS));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                rotate_rows(&mut w, i, c, s);
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, col)| w[[order[r], col]]);
    Ok(TridiagonalEigen { values, vectors })
}

/// Givens update of rows `i` and `i + 1`.
fn rotate_rows<T: Real>(w: &mut Array2<T>, i: usize, c: T, s: T) {
    let n = w.ncols();
    let (mut lo, mut hi) = w.multi_slice_mut((ndarray::s![i, ..], ndarray::s![i + 1, ..]));
    for k in 0..n {
        let f = hi[k];
        let z = lo[k];
        hi[k] = s * z + c * f;
        lo[k] = c * z - s * f;
    }
}
