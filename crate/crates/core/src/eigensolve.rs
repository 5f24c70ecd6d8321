//! Dense complex non-Hermitian eigensolver.
//!
//! Pipeline: diagonal balancing, Householder reduction to upper Hessenberg
//! form, explicit single-shift QR iteration with Wilkinson shifts to a Schur
//! factorization, and eigenvector recovery by back-substitution on the
//! triangular factor. Sized for the dense Liouvillians in this crate
//! (dimension up to a few hundred).

use ndarray::{s, Array1};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;
use crate::{CMatrix, CVector};

/// Full spectrum of a complex square matrix, optionally with eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenResult<T: Real> {
    /// Eigenvalues sorted by (Re descending, Im ascending).
    pub values: Vec<Complex<T>>,
    /// Unit-norm right eigenvectors, aligned with `values`.
    pub vectors: Option<Vec<CVector<T>>>,
    /// Per-pair residuals `||M v - lambda v||_2`, aligned with `values`.
    pub residuals: Option<Vec<T>>,
    /// Frobenius norm of the input, the scale for residual checks.
    pub matrix_norm: T,
}

impl<T: Real> EigenResult<T> {
    /// Largest eigenpair residual, if vectors were computed.
    pub fn max_residual(&self) -> Option<T> {
        self.residuals
            .as_ref()
            .map(|r| r.iter().copied().fold(T::zero(), T::max))
    }

    /// Indices whose residual exceeds `1e-8 * ||M||`, the signature of a
    /// defective (exceptional-point) cluster. Such entries are reported, not
    /// treated as errors.
    pub fn suspect_indices(&self) -> Vec<usize> {
        let tol = T::of(1e-8) * self.matrix_norm.max(T::one());
        match &self.residuals {
            Some(res) => res
                .iter()
                .enumerate()
                .filter(|(_, r)| **r > tol)
                .map(|(i, _)| i)
                .collect(),
            None => Vec::new(),
        }
    }
}

/// Compute the full spectrum of `matrix`; eigenvectors on request.
pub fn eig<T: Real>(matrix: &CMatrix<T>, want_vectors: bool) -> Result<EigenResult<T>> {
    let n = linalg::check_square(matrix, "eig input")?;
    let matrix_norm = linalg::frobenius(matrix);
    if n == 0 {
        return Ok(EigenResult {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
            residuals: want_vectors.then(Vec::new),
            matrix_norm,
        });
    }

    let mut h = matrix.clone();
    let scale = balance(&mut h);
    let mut q = want_vectors.then(|| linalg::identity::<T>(n));
    hessenberg(&mut h, q.as_mut());
    qr_to_schur(&mut h, q.as_mut())?;

    let mut values: Vec<Complex<T>> = (0..n).map(|i| h[[i, i]]).collect();
    let (mut vectors, mut residuals) = (None, None);
    if want_vectors {
        let z = q.expect("accumulated Schur vectors");
        let mut vecs = triangular_eigenvectors(&h, &z);
        let mut res = Vec::with_capacity(n);
        for (k, v) in vecs.iter_mut().enumerate() {
            for (i, x) in v.iter_mut().enumerate() {
                *x *= Complex::new(scale[i], T::zero());
            }
            normalize(v);
            res.push(eigenpair_residual(matrix, v, values[k]));
        }
        vectors = Some(vecs);
        residuals = Some(res);
    }

    // reproducible order: Re descending, then Im ascending
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .re
            .partial_cmp(&values[a].re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                values[a]
                    .im
                    .partial_cmp(&values[b].im)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    values = order.iter().map(|&i| values[i]).collect();
    if let Some(v) = vectors {
        vectors = Some(order.iter().map(|&i| v[i].clone()).collect());
    }
    if let Some(r) = residuals {
        residuals = Some(order.iter().map(|&i| r[i]).collect());
    }

    Ok(EigenResult {
        values,
        vectors,
        residuals,
        matrix_norm,
    })
}

/// Eigenvalues only.
pub fn eigenvalues<T: Real>(matrix: &CMatrix<T>) -> Result<Vec<Complex<T>>> {
    Ok(eig(matrix, false)?.values)
}

/// Parlett-Reinsch balancing by exact powers of two. Returns the similarity
/// scale: `balanced = D^-1 M D` with `D = diag(scale)`.
fn balance<T: Real>(a: &mut CMatrix<T>) -> Vec<T> {
    let n = a.nrows();
    let mut scale = vec![T::one(); n];
    let radix = T::of(2.0);
    let gamma = T::of(0.95);
    for _pass in 0..100 {
        let mut converged = true;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[[j, i]].norm();
                    r += a[[i, j]].norm();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let total = c + r;
            let mut f = T::one();
            while c < r / radix {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if c + r < gamma * total && f != T::one() {
                converged = false;
                scale[i] *= f;
                let inv = T::one() / f;
                for j in 0..n {
                    a[[i, j]] = a[[i, j]].scale(inv);
                }
                for j in 0..n {
                    a[[j, i]] = a[[j, i]].scale(f);
                }
            }
        }
        if converged {
            break;
        }
    }
    scale
}

/// Householder reduction to upper Hessenberg form, accumulating the unitary
/// similarity into `q` when provided.
fn hessenberg<T: Real>(h: &mut CMatrix<T>, mut q: Option<&mut CMatrix<T>>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let m = n - k - 1;
        let mut v: Vec<Complex<T>> = (0..m).map(|i| h[[k + 1 + i, k]]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let alpha = v[0];
        let phase = if alpha.norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            alpha.unscale(alpha.norm())
        };
        let beta = -phase.scale(xnorm);
        v[0] = alpha - beta;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<T>();
        if vnorm2 == T::zero() {
            continue;
        }
        let tau = T::of(2.0) / vnorm2;

        // left: rows k+1..n over columns k..n
        for col in k..n {
            let mut w = Complex::new(T::zero(), T::zero());
            for i in 0..m {
                w += v[i].conj() * h[[k + 1 + i, col]];
            }
            let w = w.scale(tau);
            for i in 0..m {
                h[[k + 1 + i, col]] -= v[i] * w;
            }
        }
        // right: columns k+1..n over all rows
        for row in 0..n {
            let mut w = Complex::new(T::zero(), T::zero());
            for i in 0..m {
                w += h[[row, k + 1 + i]] * v[i];
            }
            let w = w.scale(tau);
            for i in 0..m {
                h[[row, k + 1 + i]] -= w * v[i].conj();
            }
        }
        if let Some(q) = q.as_deref_mut() {
            for row in 0..n {
                let mut w = Complex::new(T::zero(), T::zero());
                for i in 0..m {
                    w += q[[row, k + 1 + i]] * v[i];
                }
                let w = w.scale(tau);
                for i in 0..m {
                    q[[row, k + 1 + i]] -= w * v[i].conj();
                }
            }
        }
        h[[k + 1, k]] = beta;
        for i in k + 2..n {
            h[[i, k]] = Complex::new(T::zero(), T::zero());
        }
    }
}

/// Complex Givens rotation: returns (c, s, r) with c real such that
/// `[c, s; -conj(s), c] * [f; g] = [r; 0]` and `c^2 + |s|^2 = 1`.
fn givens<T: Real>(f: Complex<T>, g: Complex<T>) -> (T, Complex<T>, Complex<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    if g == zero {
        return (T::one(), zero, f);
    }
    if f == zero {
        let gn = g.norm();
        return (T::zero(), g.conj().unscale(gn), Complex::new(gn, T::zero()));
    }
    let fn_ = f.norm();
    let d = (fn_ * fn_ + g.norm_sqr()).sqrt();
    let c = fn_ / d;
    let fsign = f.unscale(fn_);
    let s = fsign * g.conj().unscale(d);
    let r = fsign.scale(d);
    (c, s, r)
}

/// Eigenvalues of a complex 2x2, with the root closer to `d` first.
fn eig2x2<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let half = T::of(0.5);
    let mean = (a + d).scale(half);
    let delta = (a - d).scale(half);
    let disc = (delta * delta + b * c).sqrt();
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        (l1, l2)
    } else {
        (l2, l1)
    }
}

/// Explicit single-shift QR iteration on an upper Hessenberg matrix,
/// reducing it in place to its Schur (upper triangular) form. Applied
/// rotations accumulate into `z` when provided.
fn qr_to_schur<T: Real>(h: &mut CMatrix<T>, mut z: Option<&mut CMatrix<T>>) -> Result<()> {
    let n = h.nrows();
    if n <= 1 {
        return Ok(());
    }
    let zero = Complex::new(T::zero(), T::zero());
    let defl = T::of(1e-14).max(T::epsilon() * T::of(4.0));
    let hnorm: T = {
        let mut s = T::zero();
        for v in h.iter() {
            s += v.norm();
        }
        s
    };

    let cap = 40 * n;
    let mut total_iters = 0usize;
    let mut iters_this_eig = 0usize;
    let mut hi = n - 1;

    loop {
        // deflate converged trailing 1x1 blocks and locate the active block
        let mut lo = hi;
        while lo > 0 {
            let s = h[[lo - 1, lo - 1]].norm() + h[[lo, lo]].norm();
            let s = if s == T::zero() { hnorm } else { s };
            if h[[lo, lo - 1]].norm() <= defl * s {
                h[[lo, lo - 1]] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            if hi == 0 {
                break;
            }
            hi -= 1;
            iters_this_eig = 0;
            continue;
        }

        total_iters += 1;
        iters_this_eig += 1;
        if total_iters > cap {
            return Err(Error::NumericalFailure(format!(
                "QR iteration did not converge for eigenvalue index {hi} within {cap} sweeps"
            )));
        }

        let mu = if iters_this_eig.is_multiple_of(10) {
            // exceptional shift to break rare shift cycles
            h[[hi, hi]] + Complex::new(T::of(0.75) * h[[hi, hi - 1]].norm(), T::zero())
        } else {
            let (w, _) = eig2x2(
                h[[hi - 1, hi - 1]],
                h[[hi - 1, hi]],
                h[[hi, hi - 1]],
                h[[hi, hi]],
            );
            w
        };

        for i in lo..=hi {
            h[[i, i]] -= mu;
        }

        // factor the shifted block: left rotations rows (k, k+1)
        let mut rots: Vec<(T, Complex<T>)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s, r) = givens(h[[k, k]], h[[k + 1, k]]);
            h[[k, k]] = r;
            h[[k + 1, k]] = zero;
            let (row_k, row_k1) = h.multi_slice_mut((s![k, k + 1..n], s![k + 1, k + 1..n]));
            let (row_k, row_k1) = (
                row_k.into_slice().expect("contiguous row"),
                row_k1.into_slice().expect("contiguous row"),
            );
            for (a, b) in row_k.iter_mut().zip(row_k1.iter_mut()) {
                let x = *a;
                let y = *b;
                *a = x.scale(c) + s * y;
                *b = y.scale(c) - s.conj() * x;
            }
            rots.push((c, s));
        }

        // form RQ: right rotations on columns (k, k+1)
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            for i in 0..=k + 1 {
                let x = h[[i, k]];
                let y = h[[i, k + 1]];
                h[[i, k]] = x.scale(c) + y * s.conj();
                h[[i, k + 1]] = y.scale(c) - x * s;
            }
            if let Some(z) = z.as_deref_mut() {
                for i in 0..n {
                    let x = z[[i, k]];
                    let y = z[[i, k + 1]];
                    z[[i, k]] = x.scale(c) + y * s.conj();
                    z[[i, k + 1]] = y.scale(c) - x * s;
                }
            }
        }

        for i in lo..=hi {
            h[[i, i]] += mu;
        }
    }
    Ok(())
}

/// Right eigenvectors of the original matrix from its Schur factorization
/// `M = Z T Z^H`: back-substitution on T, then rotation by Z. Small or
/// vanishing pivots (repeated eigenvalues, defective clusters) are guarded
/// rather than rejected.
fn triangular_eigenvectors<T: Real>(t: &CMatrix<T>, z: &CMatrix<T>) -> Vec<CVector<T>> {
    let n = t.nrows();
    let tnorm = linalg::max_abs(t).max(T::min_positive_value());
    let smallnum = T::epsilon() * tnorm;
    let growth_cap = T::max_value().sqrt() * T::of(1e-3);

    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[[k, k]];
        let mut y = vec![Complex::new(T::zero(), T::zero()); k + 1];
        y[k] = Complex::new(T::one(), T::zero());
        for i in (0..k).rev() {
            let mut sum = Complex::new(T::zero(), T::zero());
            for (j, yj) in y.iter().enumerate().take(k + 1).skip(i + 1) {
                sum += t[[i, j]] * *yj;
            }
            let mut denom = t[[i, i]] - lambda;
            if denom.norm() < smallnum {
                denom = Complex::new(smallnum, T::zero());
            }
            let yi = -sum / denom;
            if yi.norm() > growth_cap {
                let shrink = T::one() / yi.norm();
                for yj in y.iter_mut() {
                    *yj = yj.scale(shrink);
                }
                y[i] = -sum / denom * Complex::new(shrink, T::zero());
            } else {
                y[i] = yi;
            }
        }
        // x = Z y, using only the first k+1 columns of Z
        let mut x: CVector<T> = Array1::zeros(n);
        for (j, yj) in y.iter().enumerate() {
            if yj.norm() == T::zero() {
                continue;
            }
            for i in 0..n {
                x[i] += z[[i, j]] * *yj;
            }
        }
        out.push(x);
    }
    out
}

/// Normalize to unit 2-norm with the largest component rotated real-positive.
fn normalize<T: Real>(v: &mut CVector<T>) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if norm == T::zero() {
        return;
    }
    let (mut best, mut best_idx) = (T::zero(), 0usize);
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best {
            best = z.norm();
            best_idx = i;
        }
    }
    let pivot = v[best_idx];
    let phase = if pivot.norm() == T::zero() {
        Complex::new(T::one(), T::zero())
    } else {
        pivot.unscale(pivot.norm())
    };
    let factor = phase.conj().unscale(norm);
    for z in v.iter_mut() {
        *z *= factor;
    }
}

fn eigenpair_residual<T: Real>(m: &CMatrix<T>, v: &CVector<T>, lambda: Complex<T>) -> T {
    let mv = m.dot(v);
    mv.iter()
        .zip(v.iter())
        .map(|(a, b)| (*a - lambda * *b).norm_sqr())
        .sum::<T>()
        .sqrt()
}
