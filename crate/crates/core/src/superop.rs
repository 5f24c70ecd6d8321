//! Vectorization of operators and master equations: the coherent and
//! dissipative superoperators, the superspin operators, and the coupled
//! |s, s_x>> basis.
//!
//! Convention: an operator |m><n| maps to the superket |m,n>> = |m> (x) |n>*
//! stored row-major, so `vec(A rho B) = (A (x) B^T) vec(rho)` holds verbatim
//! and the superoperator forms below are literal matrix expressions.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::collective_spin::{BasisAxis, SpinOperatorSet};
use crate::error::{Error, Result};
use crate::linalg::{self, dagger, identity, kron};
use crate::models::ModelSpec;
use crate::scalar::Real;
use crate::{CMatrix, CVector};

/// A vectorized operator on the (N+1)-dimensional spin space.
#[derive(Debug, Clone)]
pub struct SuperVector<T: Real> {
    /// Row-major components: entry `m * (N+1) + n` houses |m,n>>.
    pub data: CVector<T>,
    pub n_spins: usize,
}

/// Map a density operator (or any square operator) to its superket.
pub fn vectorize<T: Real>(rho: &CMatrix<T>) -> Result<SuperVector<T>> {
    let dim = linalg::check_square(rho, "vectorize input")?;
    if dim == 0 {
        return Err(Error::InvalidArgument("vectorize: empty matrix".into()));
    }
    let data = Array1::from_iter(rho.iter().copied());
    Ok(SuperVector {
        data,
        n_spins: dim - 1,
    })
}

/// Inverse of [`vectorize`].
pub fn devectorize<T: Real>(v: &SuperVector<T>) -> Result<CMatrix<T>> {
    let dim = v.n_spins + 1;
    if v.data.len() != dim * dim {
        return Err(Error::InvalidArgument(format!(
            "devectorize: expected {} components, got {}",
            dim * dim,
            v.data.len()
        )));
    }
    Ok(Array2::from_shape_vec((dim, dim), v.data.to_vec()).expect("square reshape"))
}

/// Superket of the identity operator; the left null vector of every
/// trace-preserving Liouvillian.
pub fn identity_superket<T: Real>(dim: usize) -> CVector<T> {
    let mut v = Array1::zeros(dim * dim);
    for i in 0..dim {
        v[i * dim + i] = Complex::new(T::one(), T::zero());
    }
    v
}

/// Coherent superoperator `-i (H (x) I - I (x) H^T)` for Hermitian `H`.
pub fn build_l0<T: Real>(h: &CMatrix<T>) -> Result<CMatrix<T>> {
    let dim = linalg::check_square(h, "hamiltonian")?;
    let scale = linalg::max_abs(h).max(T::one());
    let tol = (T::of(1e-10)).max(T::epsilon() * T::of(100.0)) * scale;
    let herm = linalg::hermiticity_error(h);
    if herm > tol {
        return Err(Error::InvalidArgument(format!(
            "hamiltonian is not Hermitian: deviation {herm:e} exceeds {tol:e}"
        )));
    }
    let id = identity::<T>(dim);
    let ht = h.t().to_owned();
    let minus_i = Complex::new(T::zero(), -T::one());
    Ok((kron(h, &id) - kron(&id, &ht)).mapv(|z| z * minus_i))
}

/// Dissipative superoperator
/// `sum_i gamma_i (A_i (x) A_i* - 1/2 (A_i^H A_i (x) I + I (x) (A_i^H A_i)^T))`.
pub fn build_ld<T: Real>(jumps: &[CMatrix<T>], rates: &[T]) -> Result<CMatrix<T>> {
    if jumps.len() != rates.len() {
        return Err(Error::InvalidArgument(format!(
            "{} jump operators but {} rates",
            jumps.len(),
            rates.len()
        )));
    }
    if jumps.is_empty() {
        // the empty sum; without an operator there is no dimension to size it
        return Ok(Array2::zeros((0, 0)));
    }
    let dim = linalg::check_square(&jumps[0], "jump operator")?;
    let id = identity::<T>(dim);
    let mut ld: CMatrix<T> = Array2::zeros((dim * dim, dim * dim));
    for (a, &rate) in jumps.iter().zip(rates.iter()) {
        let da = linalg::check_square(a, "jump operator")?;
        if da != dim {
            return Err(Error::InvalidArgument(format!(
                "jump operator dimension {da} does not match {dim}"
            )));
        }
        if rate < T::zero() {
            return Err(Error::InvalidArgument(format!(
                "negative dissipation rate {rate}"
            )));
        }
        let a_conj = a.mapv(|z| z.conj());
        let ada = dagger(a).dot(a);
        let ada_t = ada.t().to_owned();
        let half = Complex::new(T::of(0.5), T::zero());
        let term = kron(a, &a_conj) - (kron(&ada, &id) + kron(&id, &ada_t)).mapv(|z| z * half);
        ld = ld + term.mapv(|z| z.scale(rate));
    }
    Ok(ld)
}

/// A vectorized Liouvillian with its coherent/dissipative split retained.
#[derive(Debug, Clone)]
pub struct Liouvillian<T: Real> {
    pub l0: CMatrix<T>,
    pub ld: CMatrix<T>,
    pub total: CMatrix<T>,
    pub model: ModelSpec<T>,
}

impl<T: Real> Liouvillian<T> {
    /// Superoperator dimension, (N+1)^2.
    pub fn dim(&self) -> usize {
        self.total.nrows()
    }
}

/// The superspin operators `S_a = J_a (x) I - I (x) J_a^T` and `S^2`.
#[derive(Debug, Clone)]
pub struct SuperspinSet<T: Real> {
    pub sx: CMatrix<T>,
    pub sy: CMatrix<T>,
    pub sz: CMatrix<T>,
    pub s_squared: CMatrix<T>,
    pub n_spins: usize,
    /// Axis whose superspin projection is diagonal in this representation.
    pub basis_axis: BasisAxis,
}

impl<T: Real> SuperspinSet<T> {
    /// Magnetization scale 2/N.
    pub fn quantum(&self) -> T {
        T::of(2.0) / T::of(self.n_spins as f64)
    }

    /// The diagonal superspin projection for `basis_axis`.
    pub fn axis_projection(&self) -> &CMatrix<T> {
        match self.basis_axis {
            BasisAxis::Z => &self.sz,
            BasisAxis::X => &self.sx,
        }
    }
}

/// Build the superspin operators from a spin operator set.
///
/// `S^2` is assembled from the definition `S_x^2 + S_y^2 + S_z^2` and
/// cross-checked against the ladder-product closed form
/// `J^2 (x) I + I (x) J^2 - 2 J_d (x) J_d - (J_+ (x) J_+ + J_- (x) J_-)`
/// built from the diagonal projection and ladders of the same axis;
/// disagreement is a numerical failure.
pub fn build_superspin<T: Real>(ops: &SpinOperatorSet<T>) -> Result<SuperspinSet<T>> {
    let dim = ops.dim();
    let id = identity::<T>(dim);
    let make_s = |j: &CMatrix<T>| kron(j, &id) - kron(&id, &j.t().to_owned());
    let sx = make_s(&ops.jx);
    let sy = make_s(&ops.jy);
    let sz = make_s(&ops.jz);
    let s_squared = sx.dot(&sx) + sy.dot(&sy) + sz.dot(&sz);

    let diag_proj = match ops.basis_axis {
        BasisAxis::Z => &ops.jz,
        BasisAxis::X => &ops.jx,
    };
    let two = Complex::new(T::of(2.0), T::zero());
    let closed = kron(&ops.j_squared, &id) + kron(&id, &ops.j_squared)
        - kron(diag_proj, diag_proj).mapv(|z| z * two)
        - kron(&ops.j_plus, &ops.j_plus)
        - kron(&ops.j_minus, &ops.j_minus);

    let scale = linalg::max_abs(&s_squared).max(T::one());
    let tol = (T::of(1e-11)).max(T::epsilon() * T::of(100.0)) * scale;
    let dev = linalg::max_abs_diff(&s_squared, &closed);
    if dev > tol {
        return Err(Error::NumericalFailure(format!(
            "S^2 self-check failed: definition and ladder form differ by {dev:e}"
        )));
    }

    Ok(SuperspinSet {
        sx,
        sy,
        sz,
        s_squared,
        n_spins: ops.n_spins,
        basis_axis: ops.basis_axis,
    })
}

/// Orthonormal simultaneous eigenbasis of (S_axis, S^2) with labels
/// (s, s_axis), ordered by s then s_axis.
#[derive(Debug, Clone)]
pub struct CoupledBasis<T: Real> {
    /// Basis vectors as matrix columns, aligned with `labels`.
    pub vectors: CMatrix<T>,
    /// Quantum numbers (s, s_axis) per column.
    pub labels: Vec<(i32, i32)>,
    pub n_spins: usize,
}

impl<T: Real> CoupledBasis<T> {
    /// Column index of the vector labeled `(s, s_axis)`.
    pub fn position(&self, s: i32, s_axis: i32) -> Option<usize> {
        self.labels.iter().position(|&l| l == (s, s_axis))
    }
}

/// Diagonalize `S^2` inside each eigenspace of the diagonal superspin
/// projection, producing the coupled basis.
pub fn build_coupled_basis<T: Real>(ss: &SuperspinSet<T>) -> Result<CoupledBasis<T>> {
    let n = ss.n_spins;
    let dim = (n + 1) * (n + 1);
    let q = ss.quantum();
    let proj = ss.axis_projection();

    // the axis projection is diagonal by construction
    let mut groups: Vec<(i32, Vec<usize>)> = Vec::new();
    for k in 0..dim {
        let val = proj[[k, k]].re / q;
        let sx = val.round();
        if (val - sx).abs() > T::of(1e-9) {
            return Err(Error::NumericalFailure(format!(
                "projection eigenvalue {val} is not an integer multiple of 2/N"
            )));
        }
        let sx = sx.as_f64() as i32;
        match groups.iter_mut().find(|(g, _)| *g == sx) {
            Some((_, idxs)) => idxs.push(k),
            None => groups.push((sx, vec![k])),
        }
    }
    groups.sort_by_key(|(g, _)| *g);

    let mut columns: Vec<(i32, i32, CVector<T>)> = Vec::with_capacity(dim);
    for (s_axis, idxs) in &groups {
        let g = idxs.len();
        let mut block: CMatrix<T> = Array2::zeros((g, g));
        for (bi, &i) in idxs.iter().enumerate() {
            for (bj, &j) in idxs.iter().enumerate() {
                block[[bi, bj]] = ss.s_squared[[i, j]];
            }
        }
        let eigen = crate::eigensolve::eig(&block, true)?;
        let vectors = eigen.vectors.as_ref().expect("vectors requested");
        for (which, &lambda) in eigen.values.iter().enumerate() {
            // (2/N)^2 s(s+1) -> s
            let u = lambda.re / (q * q);
            let s_real =
                (-T::one() + (T::one() + T::of(4.0) * u).max(T::zero()).sqrt()) / T::of(2.0);
            let s = s_real.round();
            if (s_real - s).abs() > T::of(0.3) {
                return Err(Error::NumericalFailure(format!(
                    "S^2 eigenvalue {} does not round to s(s+1) quantum numbers",
                    lambda.re
                )));
            }
            let s = s.as_f64() as i32;
            let mut full: CVector<T> = Array1::zeros(dim);
            for (bi, &i) in idxs.iter().enumerate() {
                full[i] = vectors[which][bi];
            }
            fix_phase(&mut full);
            columns.push((s, *s_axis, full));
        }
    }

    columns.sort_by_key(|&(s, sx, _)| (s, sx));
    let labels: Vec<(i32, i32)> = columns.iter().map(|&(s, sx, _)| (s, sx)).collect();

    // every (s, s_axis) with |s_axis| <= s <= N must appear exactly once
    let mut expected: Vec<(i32, i32)> = Vec::new();
    for s in 0..=n as i32 {
        for sx in -s..=s {
            expected.push((s, sx));
        }
    }
    if labels != expected {
        return Err(Error::NumericalFailure(
            "coupled-basis labels do not enumerate {(s, s_x) : |s_x| <= s <= N}".into(),
        ));
    }

    let mut vectors: CMatrix<T> = Array2::zeros((dim, dim));
    for (col, (_, _, v)) in columns.iter().enumerate() {
        for row in 0..dim {
            vectors[[row, col]] = v[row];
        }
    }

    // residual validation against both operators
    let tol = T::of(1e-8);
    let mut worst = T::zero();
    for (col, &(s, s_axis)) in labels.iter().enumerate() {
        let v: CVector<T> = vectors.column(col).to_owned();
        let s_t = T::of(s as f64);
        let lam_s2 = q * q * s_t * (s_t + T::one());
        let lam_p = q * T::of(s_axis as f64);
        let r1 = residual(&ss.s_squared, &v, Complex::new(lam_s2, T::zero()));
        let r2 = residual(proj, &v, Complex::new(lam_p, T::zero()));
        worst = worst.max(r1).max(r2);
    }
    if worst > tol {
        return Err(Error::NumericalFailure(format!(
            "coupled-basis residual {worst:e} exceeds {tol:e}"
        )));
    }

    Ok(CoupledBasis {
        vectors,
        labels,
        n_spins: n,
    })
}

fn residual<T: Real>(m: &CMatrix<T>, v: &CVector<T>, lambda: Complex<T>) -> T {
    let mv = m.dot(v);
    mv.iter()
        .zip(v.iter())
        .map(|(a, b)| (*a - lambda * *b).norm_sqr())
        .sum::<T>()
        .sqrt()
}

/// Rotate so the first component above half the maximum modulus is real
/// positive; pins the otherwise arbitrary superket phase.
fn fix_phase<T: Real>(v: &mut CVector<T>) {
    let maxmod = v.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    if maxmod == T::zero() {
        return;
    }
    let half = maxmod * T::of(0.5);
    let pivot = v
        .iter()
        .find(|z| z.norm() > half)
        .copied()
        .expect("nonzero pivot");
    let phase = pivot.unscale(pivot.norm());
    let rot = phase.conj();
    for z in v.iter_mut() {
        *z *= rot;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collective_spin::build_spin_ops;
    use crate::linalg::max_abs_diff;
    use ndarray::array;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn random_matrix(n: usize, seed: u64) -> CMatrix<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |_| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn vectorize_identity() {
        let id = identity::<f64>(2);
        let v = vectorize(&id).unwrap();
        assert_eq!(v.n_spins, 1);
        assert_eq!(
            v.data.to_vec(),
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        );
    }

    #[test]
    fn vectorize_single_entry() {
        // |0><1| at N = 1, top state first
        let rho = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        let v = vectorize(&rho).unwrap();
        assert_eq!(
            v.data.to_vec(),
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
    }

    #[test]
    fn vectorize_round_trip_exact() {
        let rho = random_matrix(4, 5);
        let back = devectorize(&vectorize(&rho).unwrap()).unwrap();
        assert_eq!(rho, back);
    }

    #[test]
    fn vectorize_rejects_non_square() {
        let m: CMatrix<f64> = Array2::zeros((2, 3));
        assert!(vectorize(&m).is_err());
    }

    #[test]
    fn kron_convention_sandwich_product() {
        // vec(A rho B) = (A (x) B^T) vec(rho), sandwiches at N = 3
        let ops = build_spin_ops::<f64>(3, BasisAxis::Z).unwrap();
        for seed in 0..10 {
            let rho = random_matrix(4, 100 + seed);
            for (a, b) in [
                (&ops.jx, &ops.jx),
                (&ops.jz, &ops.j_plus),
                (&random_matrix(4, 200 + seed), &random_matrix(4, 300 + seed)),
            ] {
                let lhs = vectorize(&a.dot(&rho).dot(b)).unwrap();
                let big = kron(a, &b.t().to_owned());
                let rhs = big.dot(&vectorize(&rho).unwrap().data);
                let dev = lhs
                    .data
                    .iter()
                    .zip(rhs.iter())
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                assert!(dev < 1e-13, "seed {seed}: deviation {dev}");
            }
        }
    }

    #[test]
    fn l0_zero_hamiltonian() {
        let h: CMatrix<f64> = Array2::zeros((3, 3));
        let l0 = build_l0(&h).unwrap();
        assert_eq!(linalg::max_abs(&l0), 0.0);
    }

    #[test]
    fn l0_rejects_non_hermitian() {
        let h = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        assert!(build_l0(&h).is_err());
    }

    #[test]
    fn l0_x_axis_diagonal_entries() {
        // H = -N Omega J_x in the x basis: diagonal entries 2i Omega s_x
        let n = 3;
        let ops = build_spin_ops::<f64>(n, BasisAxis::X).unwrap();
        let h = ops.jx.mapv(|z| z * c(-(n as f64), 0.0));
        let l0 = build_l0(&h).unwrap();
        let dim = n + 1;
        for a in 0..dim {
            for b in 0..dim {
                let k = a * dim + b;
                let sx = (ops.jx[[a, a]].re - ops.jx[[b, b]].re) * n as f64 / 2.0;
                let expected = c(0.0, 2.0 * sx.round());
                assert!((l0[[k, k]] - expected).norm() < 1e-12);
                for k2 in 0..dim * dim {
                    if k2 != k {
                        assert_eq!(l0[[k, k2]], c(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn l0_z_axis_diagonal_entries() {
        // H = -N Omega J_z, N = 2: diagonal entries 2i (m - m')
        let n = 2;
        let ops = build_spin_ops::<f64>(n, BasisAxis::Z).unwrap();
        let h = ops.jz.mapv(|z| z * c(-(n as f64), 0.0));
        let l0 = build_l0(&h).unwrap();
        let ms = ops.magnetic_numbers();
        let dim = n + 1;
        for a in 0..dim {
            for b in 0..dim {
                let k = a * dim + b;
                let expected = c(0.0, 2.0 * (ms[a] - ms[b]));
                assert!((l0[[k, k]] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ld_rejects_negative_rate_and_mismatch() {
        let ops = build_spin_ops::<f64>(2, BasisAxis::Z).unwrap();
        assert!(build_ld(std::slice::from_ref(&ops.jz), &[-0.1]).is_err());
        assert!(build_ld(std::slice::from_ref(&ops.jz), &[0.1, 0.2]).is_err());
    }

    #[test]
    fn ld_of_no_jumps_is_the_empty_zero_matrix() {
        let ld = build_ld::<f64>(&[], &[]).unwrap();
        assert_eq!(ld.dim(), (0, 0));
    }

    #[test]
    fn l0_spectrum_purely_imaginary_for_generic_hamiltonian() {
        let h = {
            let raw = random_matrix(5, 77);
            (&raw + &dagger(&raw)).mapv(|z| z * c(0.5, 0.0))
        };
        let l0 = build_l0(&h).unwrap();
        for v in crate::eigensolve::eigenvalues(&l0).unwrap() {
            assert!(v.re.abs() < 1e-10, "Re {}", v.re);
        }
    }

    #[test]
    fn ld_trace_annihilation_hermitian_jump() {
        let n = 4;
        let ops = build_spin_ops::<f64>(n, BasisAxis::X).unwrap();
        let ld = build_ld(std::slice::from_ref(&ops.jx), &[n as f64 * 0.3]).unwrap();
        let left = identity_superket::<f64>(n + 1);
        let prod = left.mapv(|z| z.conj()).dot(&ld);
        let worst = prod.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-12);
    }

    #[test]
    fn superspin_commutes_with_s2() {
        for n in [1, 2, 5] {
            let ops = build_spin_ops::<f64>(n, BasisAxis::X).unwrap();
            let ss = build_superspin(&ops).unwrap();
            let comm = ss.s_squared.dot(&ss.sx) - ss.sx.dot(&ss.s_squared);
            assert!(linalg::max_abs(&comm) < 1e-11, "N = {n}");
        }
    }

    #[test]
    fn s2_does_not_commute_with_one_sided_jx() {
        // [S^2, J_x (x) I] = (2/N)(J_+ (x) J_+ - J_- (x) J_-) in the x basis
        let n = 4;
        let ops = build_spin_ops::<f64>(n, BasisAxis::X).unwrap();
        let ss = build_superspin(&ops).unwrap();
        let id = identity::<f64>(n + 1);
        let one_sided = kron(&ops.jx, &id);
        let comm = ss.s_squared.dot(&one_sided) - one_sided.dot(&ss.s_squared);
        let q = c(2.0 / n as f64, 0.0);
        let expected =
            (kron(&ops.j_plus, &ops.j_plus) - kron(&ops.j_minus, &ops.j_minus)).mapv(|z| z * q);
        assert!(max_abs_diff(&comm, &expected) < 1e-11);
        assert!(linalg::max_abs(&comm) > 1e-3);
    }

    #[test]
    fn s2_eigenvalue_multiplicities() {
        // N = 1: eigenvalues {0, 8, 8, 8}
        let ops = build_spin_ops::<f64>(1, BasisAxis::X).unwrap();
        let ss = build_superspin(&ops).unwrap();
        let mut vals: Vec<f64> = crate::eigensolve::eigenvalues(&ss.s_squared)
            .unwrap()
            .iter()
            .map(|z| z.re)
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [0.0, 8.0, 8.0, 8.0];
        for (v, e) in vals.iter().zip(expected.iter()) {
            assert!((v - e).abs() < 1e-10);
        }

        // N = 2: multiplicities {s=0: 1, s=1: 3, s=2: 5}
        let ops = build_spin_ops::<f64>(2, BasisAxis::X).unwrap();
        let ss = build_superspin(&ops).unwrap();
        let vals = crate::eigensolve::eigenvalues(&ss.s_squared).unwrap();
        let q2 = 1.0; // (2/N)^2 at N = 2
        for (s, mult) in [(0.0, 1), (1.0, 3), (2.0, 5)] {
            let target = q2 * s * (s + 1.0);
            let count = vals
                .iter()
                .filter(|z| (z.re - target).abs() < 1e-6 * target.max(1.0))
                .count();
            assert_eq!(count, mult, "s = {s}");
        }
    }

    #[test]
    fn coupled_basis_n1_labels_and_singlet() {
        let ops = build_spin_ops::<f64>(1, BasisAxis::X).unwrap();
        let ss = build_superspin(&ops).unwrap();
        let basis = build_coupled_basis(&ss).unwrap();
        assert_eq!(basis.labels, vec![(0, 0), (1, -1), (1, 0), (1, 1)]);
        // singlet = identity superket / sqrt(2)
        let col = basis.position(0, 0).unwrap();
        let v = basis.vectors.column(col);
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let expected = [inv_sqrt2, 0.0, 0.0, inv_sqrt2];
        for (i, &e) in expected.iter().enumerate() {
            assert!((v[i] - c(e, 0.0)).norm() < 1e-12, "component {i}");
        }
    }

    #[test]
    fn coupled_basis_n4_projector_oracle() {
        // independent check: spectral projectors Pi_s built as polynomial
        // products of (S^2 - lam_s') / (lam_s - lam_s') fix each vector
        let n = 4;
        let ops = build_spin_ops::<f64>(n, BasisAxis::X).unwrap();
        let ss = build_superspin(&ops).unwrap();
        let basis = build_coupled_basis(&ss).unwrap();
        assert_eq!(basis.labels.len(), 25);

        let q2 = (2.0 / n as f64) * (2.0 / n as f64);
        let lam = |s: i32| q2 * (s as f64) * (s as f64 + 1.0);
        for s in 0..=n as i32 {
            let mut proj = identity::<f64>((n + 1) * (n + 1));
            for sp in 0..=n as i32 {
                if sp == s {
                    continue;
                }
                let shift = ss.s_squared.clone()
                    - identity::<f64>((n + 1) * (n + 1)).mapv(|z| z * c(lam(sp), 0.0));
                proj = proj
                    .dot(&shift)
                    .mapv(|z| z * c(1.0 / (lam(s) - lam(sp)), 0.0));
            }
            for (col, &(s_lab, _)) in basis.labels.iter().enumerate() {
                let v = basis.vectors.column(col).to_owned();
                let pv = proj.dot(&v);
                let expected = if s_lab == s {
                    v.clone()
                } else {
                    Array1::zeros(v.len())
                };
                let dev = pv
                    .iter()
                    .zip(expected.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(dev < 1e-9, "s = {s}, label ({s_lab}), dev {dev}");
            }
        }

        // simultaneous-eigenvector residuals against both operators
        let q = 2.0 / n as f64;
        for (col, &(s, s_x)) in basis.labels.iter().enumerate() {
            let v = basis.vectors.column(col).to_owned();
            let lam_s2 = c(q * q * s as f64 * (s as f64 + 1.0), 0.0);
            let lam_sx = c(q * s_x as f64, 0.0);
            let r1 = (ss.s_squared.dot(&v) - v.mapv(|z| z * lam_s2))
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt();
            let r2 = (ss.sx.dot(&v) - v.mapv(|z| z * lam_sx))
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r1.max(r2) < 1e-9, "({s}, {s_x}): residual {}", r1.max(r2));
        }
    }

    #[test]
    fn coupled_basis_orthonormal() {
        let ops = build_spin_ops::<f64>(3, BasisAxis::X).unwrap();
        let ss = build_superspin(&ops).unwrap();
        let basis = build_coupled_basis(&ss).unwrap();
        let g = dagger(&basis.vectors).dot(&basis.vectors);
        let id = identity::<f64>(16);
        assert!(max_abs_diff(&g, &id) < 1e-10);
    }

    #[test]
    fn z_axis_superspin_coupled_basis() {
        let ops = build_spin_ops::<f64>(3, BasisAxis::Z).unwrap();
        let ss = build_superspin(&ops).unwrap();
        let basis = build_coupled_basis(&ss).unwrap();
        assert_eq!(basis.labels.len(), 16);
    }
}
