//! First-order degenerate perturbation theory on `L = L0 + L_D`, organized
//! by the superspin quantum numbers, plus the closed-form spectra of the
//! four catalogued models.
//!
//! The coherent superoperator is diagonal in the working basis with
//! eigenvalues `2i Omega s_x`, so degenerate subspaces are labeled by the
//! integer `s_x`. Projecting `L_D` onto each subspace and diagonalizing the
//! block yields the first-order shifts; in the coupled superspin basis those
//! blocks are diagonal for the models solvable in terms of `S^2` alone.

use num_complex::Complex;

use crate::collective_spin::build_spin_ops;
use crate::eigensolve;
use crate::error::{Error, Result};
use crate::models::{ModelId, ModelSpec};
use crate::scalar::Real;
use crate::superop::{build_superspin, Liouvillian, SuperspinSet};
use crate::CMatrix;

/// Quantum numbers attached to a perturbative eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralLabel {
    /// Coupled superspin labels (s, s_x); s_x is the projection along the
    /// model's Hamiltonian axis.
    SuperSpin { s: i32, s_x: i32 },
    /// Uncoupled magnetization labels (m, m'), half-integers at odd N.
    Magnetization { m: f64, mp: f64 },
    /// The block eigenvector did not resolve to integer quantum numbers.
    Unlabeled,
}

/// One eigenvalue of the first-order theory: `lambda0 + shift1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeEigenvalue<T: Real> {
    /// Unperturbed coherent eigenvalue `2i Omega s_x`, purely imaginary.
    pub lambda0: Complex<T>,
    /// First-order correction from the projected dissipator.
    pub shift1: Complex<T>,
    pub label: SpectralLabel,
    pub model_id: ModelId,
}

impl<T: Real> PerturbativeEigenvalue<T> {
    /// The first-order eigenvalue `lambda0 + shift1`.
    pub fn value(&self) -> Complex<T> {
        self.lambda0 + self.shift1
    }
}

fn sort_spectrum<T: Real>(
    mut evs: Vec<PerturbativeEigenvalue<T>>,
) -> Vec<PerturbativeEigenvalue<T>> {
    evs.sort_by(|a, b| {
        let (va, vb) = (a.value(), b.value());
        vb.re
            .partial_cmp(&va.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                va.im
                    .partial_cmp(&vb.im)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    evs
}

/// First-order spectrum of an assembled Liouvillian by numerical subspace
/// projection: group the (diagonal) `L0` eigenvalues by `s_x`, project
/// `L_D` onto each degenerate subspace, and diagonalize the blocks.
///
/// Labels come from `<S^2>` in each block eigenvector, rounded to the
/// nearest `s(s+1)` (flagged [`SpectralLabel::Unlabeled`] when farther than
/// 0.3 quantum-number units); model A instead reads its upper-triangular
/// blocks off the Schur diagonal, labeling each shift by the dominant
/// (m, m') component of its eigenvector.
pub fn first_order_spectrum_generic<T: Real>(
    liouvillian: &Liouvillian<T>,
    omega: T,
) -> Result<Vec<PerturbativeEigenvalue<T>>> {
    if !(omega > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "omega must be positive, got {omega}"
        )));
    }
    let model = liouvillian.model;
    let n = model.n_spins;
    let dim = liouvillian.dim();

    // the working basis must diagonalize L0
    let mut offdiag = T::zero();
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                offdiag = offdiag.max(liouvillian.l0[[i, j]].norm());
            }
        }
    }
    let scale = crate::linalg::max_abs(&liouvillian.l0).max(T::one());
    if offdiag > T::of(1e-12) * scale {
        return Err(Error::InvalidArgument(
            "L0 is not diagonal in the working basis".into(),
        ));
    }

    // group superkets by the integer s_x = Im(lambda0) / (2 omega)
    let two_omega = T::of(2.0) * omega;
    let mut groups: Vec<(i32, Vec<usize>)> = Vec::new();
    for k in 0..dim {
        let lam0 = liouvillian.l0[[k, k]];
        let ratio = lam0.im / two_omega;
        let rounded = ratio.round();
        if (ratio - rounded).abs() > T::of(1e-9) || lam0.re.abs() > T::of(1e-9) * scale {
            return Err(Error::NumericalFailure(format!(
                "L0 eigenvalue {lam0} is not an integer multiple of 2i*omega"
            )));
        }
        let s_x = rounded.as_f64() as i32;
        match groups.iter_mut().find(|(g, _)| *g == s_x) {
            Some((_, idxs)) => idxs.push(k),
            None => groups.push((s_x, vec![k])),
        }
    }
    groups.sort_by_key(|(g, _)| *g);

    // superspin operators for labeling (not needed for model A)
    let superspin = if model.model_id == ModelId::A {
        None
    } else {
        let ops = build_spin_ops::<T>(n, model.hamiltonian_axis)?;
        Some(build_superspin(&ops)?)
    };

    let q = T::of(2.0) / T::of(n as f64);
    let magnetics: Vec<f64> = (0..=n).map(|i| n as f64 / 2.0 - i as f64).collect();

    let mut out = Vec::with_capacity(dim);
    for (s_x, idxs) in &groups {
        let g = idxs.len();
        let mut block: CMatrix<T> = ndarray::Array2::zeros((g, g));
        for (bi, &i) in idxs.iter().enumerate() {
            for (bj, &j) in idxs.iter().enumerate() {
                block[[bi, bj]] = liouvillian.ld[[i, j]];
            }
        }
        let eigen = eigensolve::eig(&block, true)?;
        let vectors = eigen.vectors.as_ref().expect("vectors requested");
        let lambda0 = Complex::new(T::zero(), two_omega * T::of(*s_x as f64));

        for (which, &shift) in eigen.values.iter().enumerate() {
            let v = &vectors[which];
            let label = match model.model_id {
                ModelId::A => {
                    // dominant component names the (m, m') pair
                    let mut best = T::zero();
                    let mut best_b = 0usize;
                    for (b, z) in v.iter().enumerate() {
                        if z.norm() > best {
                            best = z.norm();
                            best_b = b;
                        }
                    }
                    let full = idxs[best_b];
                    SpectralLabel::Magnetization {
                        m: magnetics[full / (n + 1)],
                        mp: magnetics[full % (n + 1)],
                    }
                }
                _ => {
                    let ss = superspin.as_ref().expect("superspin built");
                    let expect_s2 = block_expectation(&ss.s_squared, idxs, v);
                    let u = expect_s2 / (q * q);
                    let s_real = (-T::one() + (T::one() + T::of(4.0) * u).max(T::zero()).sqrt())
                        / T::of(2.0);
                    let s = s_real.round();
                    if (s_real - s).abs() > T::of(0.3) {
                        SpectralLabel::Unlabeled
                    } else {
                        SpectralLabel::SuperSpin {
                            s: s.as_f64() as i32,
                            s_x: *s_x,
                        }
                    }
                }
            };
            out.push(PerturbativeEigenvalue {
                lambda0,
                shift1: shift,
                label,
                model_id: model.model_id,
            });
        }
    }
    Ok(sort_spectrum(out))
}

/// `<v| M_sub |v>` with `M_sub` the principal submatrix of `m` on `idxs`.
fn block_expectation<T: Real>(m: &CMatrix<T>, idxs: &[usize], v: &crate::CVector<T>) -> T {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (bi, &i) in idxs.iter().enumerate() {
        for (bj, &j) in idxs.iter().enumerate() {
            acc += v[bi].conj() * m[[i, j]] * v[bj];
        }
    }
    acc.re
}

/// `lambda_{s,s_x} = 2i Omega s_x - (Gamma/N)(s_x^2 + s(s+1))` over all
/// `0 <= s <= N`, `|s_x| <= s`.
pub fn btc_spectrum_closed_form<T: Real>(
    n: usize,
    omega: T,
    gamma: T,
) -> Result<Vec<PerturbativeEigenvalue<T>>> {
    check_closed_form_args(n, gamma)?;
    let mut out = Vec::with_capacity((n + 1) * (n + 1));
    for s in 0..=n as i32 {
        for s_x in -s..=s {
            let (sf, sxf) = (T::of(s as f64), T::of(s_x as f64));
            let shift = -(gamma / T::of(n as f64)) * (sxf * sxf + sf * (sf + T::one()));
            out.push(PerturbativeEigenvalue {
                lambda0: Complex::new(T::zero(), T::of(2.0) * omega * sxf),
                shift1: Complex::new(shift, T::zero()),
                label: SpectralLabel::SuperSpin { s, s_x },
                model_id: ModelId::Btc,
            });
        }
    }
    Ok(sort_spectrum(out))
}

/// `lambda_{m,m'} = 2i Omega (m - m') - (2 Gamma/N)(N(N/2+1) - m(m+1) - m'(m'+1))`
/// over all magnetization pairs.
pub fn model_a_spectrum_closed_form<T: Real>(
    n: usize,
    omega: T,
    gamma: T,
) -> Result<Vec<PerturbativeEigenvalue<T>>> {
    check_closed_form_args(n, gamma)?;
    let nf = n as f64;
    let magnetics: Vec<f64> = (0..=n).map(|i| nf / 2.0 - i as f64).collect();
    let pump_scale = nf * (nf / 2.0 + 1.0);
    let mut out = Vec::with_capacity((n + 1) * (n + 1));
    for &m in &magnetics {
        for &mp in &magnetics {
            let shift = -(T::of(2.0) * gamma / T::of(nf))
                * T::of(pump_scale - m * (m + 1.0) - mp * (mp + 1.0));
            out.push(PerturbativeEigenvalue {
                lambda0: Complex::new(T::zero(), T::of(2.0) * omega * T::of(m - mp)),
                shift1: Complex::new(shift, T::zero()),
                label: SpectralLabel::Magnetization { m, mp },
                model_id: ModelId::A,
            });
        }
    }
    Ok(sort_spectrum(out))
}

/// `lambda_{s,s_x} = 2i Omega s_x + (Gamma/N)(s_x^2 - s(s+1))`.
pub fn model_b_spectrum_closed_form<T: Real>(
    n: usize,
    omega: T,
    gamma: T,
) -> Result<Vec<PerturbativeEigenvalue<T>>> {
    check_closed_form_args(n, gamma)?;
    let mut out = Vec::with_capacity((n + 1) * (n + 1));
    for s in 0..=n as i32 {
        for s_x in -s..=s {
            let (sf, sxf) = (T::of(s as f64), T::of(s_x as f64));
            let shift = (gamma / T::of(n as f64)) * (sxf * sxf - sf * (sf + T::one()));
            out.push(PerturbativeEigenvalue {
                lambda0: Complex::new(T::zero(), T::of(2.0) * omega * sxf),
                shift1: Complex::new(shift, T::zero()),
                label: SpectralLabel::SuperSpin { s, s_x },
                model_id: ModelId::B,
            });
        }
    }
    Ok(sort_spectrum(out))
}

/// `lambda_{s_x} = 2i Omega s_x - (2 Gamma/N) s_x^2`, enumerated over the
/// full (s, s_x) label set so each `s_x` appears with its degeneracy
/// `N + 1 - |s_x|` and the multiset matches the exact spectrum.
pub fn model_c_spectrum_closed_form<T: Real>(
    n: usize,
    omega: T,
    gamma: T,
) -> Result<Vec<PerturbativeEigenvalue<T>>> {
    check_closed_form_args(n, gamma)?;
    let mut out = Vec::with_capacity((n + 1) * (n + 1));
    for s in 0..=n as i32 {
        for s_x in -s..=s {
            let sxf = T::of(s_x as f64);
            let shift = -(T::of(2.0) * gamma / T::of(n as f64)) * sxf * sxf;
            out.push(PerturbativeEigenvalue {
                lambda0: Complex::new(T::zero(), T::of(2.0) * omega * sxf),
                shift1: Complex::new(shift, T::zero()),
                label: SpectralLabel::SuperSpin { s, s_x },
                model_id: ModelId::C,
            });
        }
    }
    Ok(sort_spectrum(out))
}

/// Closed-form spectrum of any catalogued model.
pub fn closed_form_spectrum<T: Real>(
    spec: &ModelSpec<T>,
) -> Result<Vec<PerturbativeEigenvalue<T>>> {
    match spec.model_id {
        ModelId::Btc => btc_spectrum_closed_form(spec.n_spins, spec.omega, spec.gamma),
        ModelId::A => model_a_spectrum_closed_form(spec.n_spins, spec.omega, spec.gamma),
        ModelId::B => model_b_spectrum_closed_form(spec.n_spins, spec.omega, spec.gamma),
        ModelId::C => model_c_spectrum_closed_form(spec.n_spins, spec.omega, spec.gamma),
    }
}

fn check_closed_form_args<T: Real>(n: usize, gamma: T) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n_spins must be at least 1".into()));
    }
    if !(gamma >= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "gamma must be nonnegative, got {gamma}"
        )));
    }
    Ok(())
}

/// Effective dissipator of the collective-decay model inside the degenerate
/// subspaces: `-(N Gamma / 4)(S_x^2 + S^2)`. Acting on the coupled vector
/// |s, s_x>> it reproduces the first-order shift `-(Gamma/N)(s_x^2 + s(s+1))`.
pub fn effective_ld_btc<T: Real>(ss: &SuperspinSet<T>, gamma: T) -> CMatrix<T> {
    let proj = ss.axis_projection();
    let coeff = Complex::new(-T::of(ss.n_spins as f64) * gamma / T::of(4.0), T::zero());
    (proj.dot(proj) + &ss.s_squared).mapv(|z| z * coeff)
}
