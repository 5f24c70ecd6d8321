//! Small dense complex-matrix helpers used throughout the crate.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::CMatrix;

/// Complex identity matrix of dimension `n`.
pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = Complex::new(T::one(), T::zero());
    }
    m
}

/// Conjugate transpose.
pub fn dagger<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    m.t().mapv(|z| z.conj())
}

/// Kronecker product, row-major convention: `out[i1*nb + i2, j1*mb + j2] = a[i1,j1] * b[i2,j2]`.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i1 in 0..ra {
        for j1 in 0..ca {
            let aij = a[[i1, j1]];
            if aij == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            for i2 in 0..rb {
                for j2 in 0..cb {
                    out[[i1 * rb + i2, j1 * cb + j2]] = aij * b[[i2, j2]];
                }
            }
        }
    }
    out
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().map(|z| z.norm()).fold(T::zero(), T::max)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    assert_eq!(a.dim(), b.dim(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (*x - *y).norm())
        .fold(T::zero(), T::max)
}

/// Largest deviation from Hermiticity, `max_ij |m[i,j] - conj(m[j,i])|`.
pub fn hermiticity_error<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            let d = (m[[i, j]] - m[[j, i]].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Frobenius norm.
pub fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Trace.
pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    m.diag().iter().copied().sum()
}

/// Require a finite square matrix; returns its dimension.
pub fn check_square<T: Real>(m: &CMatrix<T>, what: &str) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::InvalidArgument(format!(
            "{what} must be square, got {r}x{c}"
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "{what} contains non-finite entries"
        )));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    #[test]
    fn kron_matches_hand_expansion() {
        let a = ndarray::array![[c(1.0, 0.0), c(2.0, 0.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        let b = ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[[0, 1]], c(1.0, 0.0));
        assert_eq!(k[[0, 3]], c(2.0, 0.0));
        assert_eq!(k[[2, 1]], c(0.0, 1.0));
        assert_eq!(k[[3, 0]], c(0.0, 1.0));
        assert_eq!(k[[2, 3]], c(0.0, 0.0));
    }

    #[test]
    fn dagger_conjugates_and_transposes() {
        let a = ndarray::array![[c(1.0, 2.0), c(3.0, -4.0)], [c(0.0, 1.0), c(5.0, 0.0)]];
        let d = dagger(&a);
        assert_eq!(d[[0, 1]], c(0.0, -1.0));
        assert_eq!(d[[1, 0]], c(3.0, 4.0));
    }

    #[test]
    fn check_square_rejects_rectangular_and_nan() {
        let m: CMatrix<f64> = Array2::zeros((2, 3));
        assert!(check_square(&m, "m").is_err());
        let mut m: CMatrix<f64> = Array2::zeros((2, 2));
        m[[0, 0]] = c(f64::NAN, 0.0);
        assert!(check_square(&m, "m").is_err());
    }
}
