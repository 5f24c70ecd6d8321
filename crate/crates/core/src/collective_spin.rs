//! Normalized collective spin operators for N spin-1/2 particles in the
//! maximally polarized (j = N/2) sector.
//!
//! Operators carry the magnetization normalization `J_a = (2/N) sum_i s_a^i`,
//! so eigenvalues of each projection lie in [-1, 1] and the commutation
//! relations read `[J_a, J_b] = (2i/N) eps_abc J_c`.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;
use crate::CMatrix;

/// Which projection is diagonal in the stored matrix representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisAxis {
    /// `jz` diagonal; ladder operators are `J_+- = J_x +- i J_y`.
    Z,
    /// `jx` diagonal; ladder operators are `J_+-^(x) = J_y +- i J_z`.
    X,
}

/// The dense (N+1)-dimensional matrices of the collective spin algebra.
///
/// Basis states are ordered by descending magnetic quantum number, so the
/// lowering ladder has its nonzeros on the subdiagonal. In the `X` basis the
/// set is obtained by the cyclic relabeling `J_z -> J_x`, `J_y -> J_z`,
/// `J_x -> J_y`, which keeps every matrix real except `jz`.
#[derive(Debug, Clone)]
pub struct SpinOperatorSet<T: Real> {
    pub n_spins: usize,
    pub basis_axis: BasisAxis,
    pub jx: CMatrix<T>,
    pub jy: CMatrix<T>,
    pub jz: CMatrix<T>,
    /// Raising operator for `basis_axis`.
    pub j_plus: CMatrix<T>,
    /// Lowering operator for `basis_axis`.
    pub j_minus: CMatrix<T>,
    pub j_squared: CMatrix<T>,
}

impl<T: Real> SpinOperatorSet<T> {
    /// Matrix dimension, N + 1.
    pub fn dim(&self) -> usize {
        self.n_spins + 1
    }

    /// Magnetization scale 2/N separating adjacent eigenvalues.
    pub fn quantum(&self) -> T {
        T::of(2.0) / T::of(self.n_spins as f64)
    }

    /// Descending physical magnetic quantum numbers N/2, N/2 - 1, ..., -N/2.
    pub fn magnetic_numbers(&self) -> Vec<f64> {
        let j = self.n_spins as f64 / 2.0;
        (0..=self.n_spins).map(|i| j - i as f64).collect()
    }
}

/// Build the collective spin operators for `n_spins` particles.
pub fn build_spin_ops<T: Real>(
    n_spins: usize,
    basis_axis: BasisAxis,
) -> Result<SpinOperatorSet<T>> {
    if n_spins == 0 {
        return Err(Error::InvalidArgument(
            "n_spins must be at least 1 (empty spin system)".into(),
        ));
    }
    let dim = n_spins + 1;
    let j = T::of(n_spins as f64 / 2.0);
    let scale = T::of(2.0) / T::of(n_spins as f64);
    let zero = T::zero();

    // Diagonal of the polarized projection and the raising ladder, both in
    // physical units before the 2/N normalization.
    let mut diag: CMatrix<T> = Array2::zeros((dim, dim));
    let mut plus: CMatrix<T> = Array2::zeros((dim, dim));
    for i in 0..dim {
        let m = j - T::of(i as f64);
        diag[[i, i]] = Complex::new(scale * m, zero);
        if i > 0 {
            // raising from |m> (column i) to |m + 1> (row i - 1)
            let amp = (j * (j + T::one()) - m * (m + T::one())).sqrt();
            plus[[i - 1, i]] = Complex::new(scale * amp, zero);
        }
    }
    let minus = plus.t().to_owned();

    let half = Complex::new(T::of(0.5), zero);
    let half_over_i = Complex::new(zero, -T::of(0.5));
    let mid = (&plus + &minus).mapv(|z| z * half);
    let rot = (&plus - &minus).mapv(|z| z * half_over_i);

    let (jx, jy, jz) = match basis_axis {
        BasisAxis::Z => (mid, rot, diag),
        BasisAxis::X => (diag, mid, rot),
    };

    let j2_val = Complex::new(scale * scale * j * (j + T::one()), zero);
    let j_squared = linalg::identity::<T>(dim).mapv(|z| z * j2_val);

    Ok(SpinOperatorSet {
        n_spins,
        basis_axis,
        jx,
        jy,
        jz,
        j_plus: plus,
        j_minus: minus,
        j_squared,
    })
}

/// Commutator `ab - ba`.
pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let na = linalg::check_square(a, "commutator lhs")?;
    let nb = linalg::check_square(b, "commutator rhs")?;
    if na != nb {
        return Err(Error::InvalidArgument(format!(
            "commutator dimension mismatch: {na} vs {nb}"
        )));
    }
    Ok(a.dot(b) - b.dot(a))
}

/// Largest entrywise deviation of the x-basis ladder product identities
/// `J_-+ J_+- = J^2 - J_x^2 -+ (2/N) J_x`.
pub fn ladder_product_identity_check<T: Real>(ops: &SpinOperatorSet<T>) -> Result<T> {
    if ops.basis_axis != BasisAxis::X {
        return Err(Error::InvalidArgument(
            "ladder product identity is stated in the x basis".into(),
        ));
    }
    let q = Complex::new(ops.quantum(), T::zero());
    let jx2 = ops.jx.dot(&ops.jx);
    let base = &ops.j_squared - &jx2;
    let minus_plus = ops.j_minus.dot(&ops.j_plus);
    let plus_minus = ops.j_plus.dot(&ops.j_minus);
    let d_up = linalg::max_abs_diff(&minus_plus, &(&base - &ops.jx.mapv(|z| z * q)));
    let d_dn = linalg::max_abs_diff(&plus_minus, &(&base + &ops.jx.mapv(|z| z * q)));
    Ok(d_up.max(d_dn))
}
