#![allow(dead_code)]

use ndarray::{Array1, Array2};
use qkt_core::Complex;

pub type C = Complex<f64>;

/// Cyclic Jacobi eigensolver for a real symmetric matrix. Returns ascending
/// eigenvalues and eigenvectors as columns. Test oracle only.
pub fn jacobi_symmetric(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]] * a[[i, j]])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * a[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[[i, i]].partial_cmp(&a[[j, j]]).unwrap());
    let vals = idx.iter().map(|&i| a[[i, i]]).collect();
    let vecs = Array2::from_shape_fn((n, n), |(r, c)| v[[r, idx[c]]]);
    (vals, vecs)
}

/// Eigen-decomposition of a complex Hermitian matrix through its real
/// 2N x 2N embedding. Every eigenvalue appears twice.
pub fn hermitian_eigenvalues(h: &Array2<C>) -> Vec<f64> {
    let n = h.nrows();
    let big = Array2::from_shape_fn((2 * n, 2 * n), |(r, c)| {
        let (i, j) = (r % n, c % n);
        let z = h[[i, j]];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    jacobi_symmetric(&big).0
}

/// Top eigenvector (largest eigenvalue) of a Hermitian matrix.
pub fn top_eigenvector(h: &Array2<C>) -> Array1<C> {
    let n = h.nrows();
    let big = Array2::from_shape_fn((2 * n, 2 * n), |(r, c)| {
        let (i, j) = (r % n, c % n);
        let z = h[[i, j]];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let (_, vecs) = jacobi_symmetric(&big);
    let col = vecs.column(2 * n - 1);
    let v = Array1::from_shape_fn(n, |i| C::new(col[i], col[i + n]));
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.mapv(|c| c / norm)
}

pub fn max_abs(a: &Array2<C>) -> f64 {
    a.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Product of two matrices known to vanish outside `|i - j| <= band`.
pub fn banded_product(a: &Array2<C>, b: &Array2<C>, band: usize) -> Array2<C> {
    let n = a.nrows();
    let mut out = Array2::from_elem((n, n), C::new(0.0, 0.0));
    for i in 0..n {
        let lo = i.saturating_sub(2 * band);
        let hi = (i + 2 * band + 1).min(n);
        for j in lo..hi {
            let klo = i.saturating_sub(band).max(j.saturating_sub(band));
            let khi = (i + band + 1).min(j + band + 1).min(n);
            let mut acc = C::new(0.0, 0.0);
            for k in klo..khi {
                acc += a[[i, k]] * b[[k, j]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

pub fn outside_band(a: &Array2<C>, band: usize) -> f64 {
    let mut worst = 0.0f64;
    for ((i, j), v) in a.indexed_iter() {
        if i.abs_diff(j) > band {
            worst = worst.max(v.norm());
        }
    }
    worst
}

/// `<psi|A|psi>` with a dense matrix, computed directly.
pub fn dense_expectation(a: &Array2<C>, psi: &Array1<C>) -> C {
    let av = a.dot(psi);
    psi.iter().zip(av.iter()).map(|(x, y)| x.conj() * y).sum()
}
