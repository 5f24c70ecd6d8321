//! Time evolution of the collective magnetizations: closed-form damped
//! oscillations for the two dephasing models, and direct fixed-step RK4
//! integration of the master equation in operator form for any model.
//!
//! Integration always works in the `J_z` eigenbasis at (N+1) x (N+1) matrix
//! size; every operator involved is banded there, so one right-hand side
//! costs O(N^2) instead of the O(N^4) a vectorized form would need.

use ndarray::Array2;
use num_complex::Complex;

use crate::collective_spin::{build_spin_ops, BasisAxis, SpinOperatorSet};
use crate::error::{Error, Result};
use crate::linalg;
use crate::models::ModelSpec;
use crate::scalar::Real;
use crate::CMatrix;

/// How a time series was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Closed-form damped-oscillation solution.
    Analytic,
    /// Fixed-step RK4 integration of the master equation.
    Integrated,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::Integrated => "integrated",
        }
    }
}

/// Sampled magnetization expectation values on a time grid.
#[derive(Debug, Clone)]
pub struct TimeSeries<T: Real> {
    pub times: Vec<T>,
    pub jx: Vec<T>,
    pub jy: Vec<T>,
    pub jz: Vec<T>,
    pub provenance: Provenance,
}

impl<T: Real> TimeSeries<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Initial density matrices exposed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// Projector onto the m_z = N/2 state; <J_z> = 1.
    PolarizedZ,
    /// Spin coherent state along +x; <J_x> = 1.
    PolarizedX,
    /// Spin coherent state tilted midway between +z and +x in the x-z
    /// plane; <J_x> = <J_z> = 1/sqrt(2).
    CoherentMix,
}

impl InitialState {
    fn polar_angle(self) -> f64 {
        match self {
            InitialState::PolarizedZ => 0.0,
            InitialState::PolarizedX => std::f64::consts::FRAC_PI_2,
            InitialState::CoherentMix => std::f64::consts::FRAC_PI_4,
        }
    }
}

/// Pure spin-coherent density matrix in the z eigenbasis.
pub fn prepare_state<T: Real>(kind: InitialState, n_spins: usize) -> Result<CMatrix<T>> {
    if n_spins == 0 {
        return Err(Error::InvalidArgument("n_spins must be at least 1".into()));
    }
    let dim = n_spins + 1;
    let theta = kind.polar_angle();
    // amplitude_k = sqrt(C(N,k)) cos(theta/2)^(N-k) sin(theta/2)^k
    let (cos_h, sin_h) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut amps = vec![T::zero(); dim];
    let mut amp = cos_h.powi(n_spins as i32);
    for (k, slot) in amps.iter_mut().enumerate() {
        *slot = T::of(amp);
        if k < n_spins {
            let step = ((n_spins - k) as f64 / (k + 1) as f64).sqrt();
            amp *= step * sin_h / cos_h.max(f64::MIN_POSITIVE);
        }
    }
    let mut rho: CMatrix<T> = Array2::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            rho[[i, j]] = Complex::new(amps[i] * amps[j], T::zero());
        }
    }
    Ok(rho)
}

/// Eigenvalues of the damped-precession generator `M = [[-2k, w], [-w, 0]]`:
/// `lambda_+- = -kappa +- i omega sqrt(1 - (kappa/omega)^2)`, two real rates
/// in the overdamped case.
pub fn ehrenfest_eigenstructure<T: Real>(omega: T, kappa: T) -> (Complex<T>, Complex<T>) {
    let disc = Complex::new(kappa * kappa - omega * omega, T::zero()).sqrt();
    let base = Complex::new(-kappa, T::zero());
    (base + disc, base - disc)
}

/// Closed-form `<J_a(t)>` for the dephasing models (`b` and `c`).
///
/// Model `b` (jump `J_z`): damped oscillation at `f = w sqrt(1-(k/w)^2)`
/// with envelope `exp(-k t)`, valid in the underdamped regime `k < w`;
/// `<J_x>` decays as `exp(-2 k t)` on its own. Model `c` (jump `J_x`):
/// oscillation at the bare `w` with envelope `exp(-2 k t)` and constant
/// `<J_x>`. Here `k = Gamma/N` and `w = 2 Omega`. Constants follow from the
/// initial expectations through each model's two-component linear system.
pub fn analytic_jz<T: Real>(
    model_id: crate::models::ModelId,
    n_spins: usize,
    omega: T,
    gamma: T,
    init: InitialState,
    times: &[T],
) -> Result<TimeSeries<T>> {
    use crate::models::ModelId;
    if n_spins == 0 {
        return Err(Error::InvalidArgument("n_spins must be at least 1".into()));
    }
    if !(gamma >= T::zero()) {
        return Err(Error::InvalidArgument("gamma must be nonnegative".into()));
    }
    let kappa = gamma / T::of(n_spins as f64);
    let w = T::of(2.0) * omega;
    let rho0 = prepare_state::<T>(init, n_spins)?;
    let ops = build_spin_ops::<T>(n_spins, BasisAxis::Z)?;
    let jx0 = expectation(&ops.jx, &rho0);
    let jy0 = expectation(&ops.jy, &rho0);
    let jz0 = expectation(&ops.jz, &rho0);

    let mut out = TimeSeries {
        times: times.to_vec(),
        jx: Vec::with_capacity(times.len()),
        jy: Vec::with_capacity(times.len()),
        jz: Vec::with_capacity(times.len()),
        provenance: Provenance::Analytic,
    };

    match model_id {
        ModelId::B => {
            if kappa >= w {
                return Err(Error::OutOfRegime(format!(
                    "model b closed form is underdamped only: kappa = {kappa} >= omega = {w} \
                     (the damped-oscillation solution turns into pure exponential decay at \
                     kappa = omega)"
                )));
            }
            let ratio = kappa / w;
            let f = w * (T::one() - ratio * ratio).sqrt();
            let c1 = jz0;
            let c2 = (kappa * c1 - w * jy0) / f;
            for &t in times {
                let env = (-kappa * t).exp();
                let (s, co) = (f * t).sin_cos();
                let jz = (c1 * co + c2 * s) * env;
                let djz = ((c2 * f - kappa * c1) * co - (c1 * f + kappa * c2) * s) * env;
                out.jz.push(jz);
                out.jy.push(-djz / w);
                out.jx.push(jx0 * (-T::of(2.0) * kappa * t).exp());
            }
        }
        ModelId::C => {
            let c1 = jz0;
            let c2 = -jy0;
            for &t in times {
                let env = (-T::of(2.0) * kappa * t).exp();
                let (s, co) = (w * t).sin_cos();
                out.jz.push((c1 * co + c2 * s) * env);
                out.jy.push((c1 * s - c2 * co) * env);
                out.jx.push(jx0);
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "no closed-form magnetization series for model {}; only models b and c \
                 have linear magnetization dynamics",
                other.name()
            )));
        }
    }
    Ok(out)
}

/// `Re Tr(op rho)`.
fn expectation<T: Real>(op: &CMatrix<T>, rho: &CMatrix<T>) -> T {
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..op.nrows() {
        for k in 0..op.ncols() {
            acc += op[[i, k]] * rho[[k, i]];
        }
    }
    acc.re
}

/// Banded matrix stored by diagonals; all spin operators in the z basis
/// have bandwidth at most 2.
struct Banded<T: Real> {
    dim: usize,
    /// (offset d, values v) with v[i] = m[r0 + i, r0 + i + d], r0 = max(0, -d).
    bands: Vec<(isize, Vec<Complex<T>>)>,
}

impl<T: Real> Banded<T> {
    fn from_dense(m: &CMatrix<T>) -> Self {
        let dim = m.nrows();
        let mut bands = Vec::new();
        for d in -(dim as isize - 1)..=(dim as isize - 1) {
            let r0 = if d < 0 { (-d) as usize } else { 0 };
            let len = dim - d.unsigned_abs();
            let vals: Vec<Complex<T>> = (0..len)
                .map(|i| m[[r0 + i, (r0 + i).wrapping_add_signed(d)]])
                .collect();
            if vals.iter().any(|z| z.norm_sqr() > T::zero()) {
                bands.push((d, vals));
            }
        }
        Banded { dim, bands }
    }

    fn dagger(&self) -> Self {
        let bands = self
            .bands
            .iter()
            .map(|(d, v)| (-d, v.iter().map(|z| z.conj()).collect()))
            .collect();
        Banded {
            dim: self.dim,
            bands,
        }
    }

    /// out += B x
    fn acc_mul_left(&self, out: &mut [Complex<T>], x: &[Complex<T>]) {
        let n = self.dim;
        for (d, v) in &self.bands {
            let r0 = if *d < 0 { (-d) as usize } else { 0 };
            for (i, w) in v.iter().enumerate() {
                let row = r0 + i;
                let src = row.wrapping_add_signed(*d);
                let (o, s) = (&mut out[row * n..(row + 1) * n], &x[src * n..(src + 1) * n]);
                for (oo, xx) in o.iter_mut().zip(s.iter()) {
                    *oo += *w * *xx;
                }
            }
        }
    }

    /// out += x B
    fn acc_mul_right(&self, out: &mut [Complex<T>], x: &[Complex<T>]) {
        let n = self.dim;
        for (d, v) in &self.bands {
            let r0 = if *d < 0 { (-d) as usize } else { 0 };
            for row in 0..n {
                let xrow = &x[row * n..(row + 1) * n];
                let orow = &mut out[row * n..(row + 1) * n];
                for (i, w) in v.iter().enumerate() {
                    let k = r0 + i;
                    let col = k.wrapping_add_signed(*d);
                    orow[col] += xrow[k] * *w;
                }
            }
        }
    }

    /// Re Tr(B x)
    fn trace_with(&self, x: &[Complex<T>]) -> T {
        let n = self.dim;
        let mut acc = Complex::new(T::zero(), T::zero());
        for (d, v) in &self.bands {
            let r0 = if *d < 0 { (-d) as usize } else { 0 };
            for (i, w) in v.iter().enumerate() {
                let row = r0 + i;
                let col = row.wrapping_add_signed(*d);
                acc += *w * x[col * n + row];
            }
        }
        acc.re
    }
}

/// Master-equation right-hand side in drift/jump form:
/// `K rho + rho K^H + A rho A^H` with `K = -iH - (1/2) A^H A` and the
/// physical rate folded into `A`. This bilinear form is trace-free and
/// contracting on the whole matrix space, so roundoff in the anti-Hermitian
/// component cannot be amplified over long integrations.
struct LindbladRhs<T: Real> {
    drift: Banded<T>,
    drift_dag: Banded<T>,
    jump: Banded<T>,
    jump_dag: Banded<T>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> LindbladRhs<T> {
    fn new(spec: &ModelSpec<T>, ops: &SpinOperatorSet<T>) -> Self {
        let h = spec.hamiltonian(ops);
        let a = spec.jump_operator(ops);
        let rate = spec.rate();
        let sqrt_rate = rate.sqrt();
        let a_scaled = a.mapv(|z| z.scale(sqrt_rate));
        let ada = linalg::dagger(&a_scaled).dot(&a_scaled);
        let minus_i = Complex::new(T::zero(), -T::one());
        let half = Complex::new(T::of(0.5), T::zero());
        let drift_dense = h.mapv(|z| z * minus_i) - ada.mapv(|z| z * half);

        let dim = h.nrows();
        let jump = Banded::from_dense(&a_scaled);
        let drift = Banded::from_dense(&drift_dense);
        LindbladRhs {
            drift_dag: drift.dagger(),
            drift,
            jump_dag: jump.dagger(),
            jump,
            scratch: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    fn eval(&mut self, rho: &[Complex<T>], out: &mut [Complex<T>]) {
        let zero = Complex::new(T::zero(), T::zero());
        out.fill(zero);
        // K rho + rho K^H
        self.drift.acc_mul_left(out, rho);
        self.drift_dag.acc_mul_right(out, rho);
        // + A rho A^H
        self.scratch.fill(zero);
        self.jump.acc_mul_left(&mut self.scratch, rho);
        let tmp = std::mem::take(&mut self.scratch);
        self.jump_dag.acc_mul_right(out, &tmp);
        self.scratch = tmp;
    }
}

/// Integrate `d rho/dt = -i[H, rho] + N Gamma (A rho A^H - 1/2 {A^H A, rho})`
/// with classical RK4 at fixed step `dt`, sampling `<J_a>` at every step.
///
/// `rho0` is given in the z eigenbasis (as produced by [`prepare_state`])
/// and must be Hermitian, unit-trace, and positive semidefinite. The step
/// must satisfy `dt * N * (|Omega| + Gamma) < 1.25`, a stability bound for
/// the RK4 domain given this family's spectral radius `~2N(|Omega|+Gamma)`.
pub fn integrate_master_equation<T: Real>(
    spec: &ModelSpec<T>,
    rho0: &CMatrix<T>,
    t_max: T,
    dt: T,
) -> Result<TimeSeries<T>> {
    let dim = linalg::check_square(rho0, "rho0")?;
    if dim != spec.n_spins + 1 {
        return Err(Error::InvalidArgument(format!(
            "rho0 dimension {dim} does not match N + 1 = {}",
            spec.n_spins + 1
        )));
    }
    if !(t_max > T::zero()) || !(dt > T::zero()) {
        return Err(Error::InvalidArgument(
            "t_max and dt must be positive".into(),
        ));
    }
    let state_tol = T::of(1e-10).max(T::epsilon() * T::of(100.0));
    if linalg::hermiticity_error(rho0) > state_tol {
        return Err(Error::InvalidArgument("rho0 is not Hermitian".into()));
    }
    let tr = linalg::trace(rho0);
    if (tr - Complex::new(T::one(), T::zero())).norm() > state_tol {
        return Err(Error::InvalidArgument(format!("rho0 trace {tr} is not 1")));
    }
    let eigs = crate::eigensolve::eigenvalues(rho0)?;
    if eigs.iter().any(|z| z.re < -state_tol) {
        return Err(Error::InvalidArgument(
            "rho0 is not positive semidefinite".into(),
        ));
    }
    let stiffness = dt * T::of(spec.n_spins as f64) * (spec.omega.abs() + spec.gamma);
    if stiffness >= T::of(1.25) {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} too large: dt * N * (|Omega| + Gamma) = {stiffness} >= 1.25 exceeds \
             the RK4 stability region for this model family"
        )));
    }

    let ops = build_spin_ops::<T>(spec.n_spins, BasisAxis::Z)?;
    let mut rhs = LindbladRhs::new(spec, &ops);
    let jx_b = Banded::from_dense(&ops.jx);
    let jy_b = Banded::from_dense(&ops.jy);
    let jz_b = Banded::from_dense(&ops.jz);

    let steps = (t_max / dt).round().as_f64() as usize;
    let steps = steps.max(1);
    let nn = dim * dim;
    let mut rho: Vec<Complex<T>> = rho0.iter().copied().collect();
    let mut k1 = vec![Complex::new(T::zero(), T::zero()); nn];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut stage = k1.clone();

    let mut out = TimeSeries {
        times: Vec::with_capacity(steps + 1),
        jx: Vec::with_capacity(steps + 1),
        jy: Vec::with_capacity(steps + 1),
        jz: Vec::with_capacity(steps + 1),
        provenance: Provenance::Integrated,
    };
    let trace_tol = T::of(1e-6);

    let sample = |series: &mut TimeSeries<T>, t: T, rho: &[Complex<T>]| {
        series.times.push(t);
        series.jx.push(jx_b.trace_with(rho));
        series.jy.push(jy_b.trace_with(rho));
        series.jz.push(jz_b.trace_with(rho));
    };
    sample(&mut out, T::zero(), &rho);

    let half = T::of(0.5);
    let sixth = T::of(1.0 / 6.0);
    for step in 1..=steps {
        rhs.eval(&rho, &mut k1);
        axpy(&mut stage, &rho, &k1, dt * half);
        rhs.eval(&stage, &mut k2);
        axpy(&mut stage, &rho, &k2, dt * half);
        rhs.eval(&stage, &mut k3);
        axpy(&mut stage, &rho, &k3, dt);
        rhs.eval(&stage, &mut k4);
        let w = dt * sixth;
        for i in 0..nn {
            rho[i] += (k1[i] + (k2[i] + k3[i]).scale(T::of(2.0)) + k4[i]).scale(w);
        }

        let mut tr = T::zero();
        for i in 0..dim {
            tr += rho[i * dim + i].re;
        }
        if (tr - T::one()).abs() > trace_tol {
            return Err(Error::NumericalFailure(format!(
                "trace drifted to {tr} at step {step}; reduce dt"
            )));
        }
        sample(&mut out, dt * T::of(step as f64), &rho);
    }
    Ok(out)
}

/// stage = base + k * factor
fn axpy<T: Real>(stage: &mut [Complex<T>], base: &[Complex<T>], k: &[Complex<T>], factor: T) {
    for ((s, b), kk) in stage.iter_mut().zip(base.iter()).zip(k.iter()) {
        *s = *b + kk.scale(factor);
    }
}
