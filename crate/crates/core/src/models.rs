//! The four dissipative collective-spin models and their assembly into
//! vectorized Liouvillians.
//!
//! Every model drives with `H = -N Omega J_axis` and dissipates through a
//! single collective jump operator at rate `N Gamma`:
//!
//! | model | axis | jump  | character                                  |
//! |-------|------|-------|--------------------------------------------|
//! | btc   | x    | J_-   | collective decay; gap closes as N grows    |
//! | a     | z    | J_+   | collective pumping; constant gap 2 Gamma   |
//! | b     | x    | J_z   | dephasing transverse to the drive          |
//! | c     | x    | J_x   | pure dephasing along the drive             |
//!
//! The working matrix basis is always the Hamiltonian-axis eigenbasis, so
//! the coherent superoperator comes out diagonal.

use num_complex::Complex;

use crate::collective_spin::{build_spin_ops, BasisAxis, SpinOperatorSet};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::superop::{build_l0, build_ld, Liouvillian};
use crate::CMatrix;

/// Which of the four catalogued models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    Btc,
    A,
    B,
    C,
}

impl ModelId {
    /// CLI spelling.
    pub fn name(self) -> &'static str {
        match self {
            ModelId::Btc => "btc",
            ModelId::A => "a",
            ModelId::B => "b",
            ModelId::C => "c",
        }
    }

    /// Hamiltonian axis fixed by the model.
    pub fn hamiltonian_axis(self) -> BasisAxis {
        match self {
            ModelId::A => BasisAxis::Z,
            _ => BasisAxis::X,
        }
    }

    /// Jump operator fixed by the model.
    pub fn jump_kind(self) -> JumpKind {
        match self {
            ModelId::Btc => JumpKind::JMinus,
            ModelId::A => JumpKind::JPlus,
            ModelId::B => JumpKind::Jz,
            ModelId::C => JumpKind::Jx,
        }
    }
}

impl std::str::FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "btc" => Ok(ModelId::Btc),
            "a" => Ok(ModelId::A),
            "b" => Ok(ModelId::B),
            "c" => Ok(ModelId::C),
            other => Err(Error::InvalidArgument(format!(
                "unknown model '{other}' (expected btc|a|b|c)"
            ))),
        }
    }
}

/// The collective jump operator of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpKind {
    JMinus,
    JPlus,
    Jz,
    Jx,
}

/// A fully specified model instance: which model, how many spins, drive
/// strength Omega, and dissipation strength Gamma. The physical rate of the
/// jump channel is always `N Gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec<T: Real> {
    pub model_id: ModelId,
    pub n_spins: usize,
    pub omega: T,
    pub gamma: T,
    pub hamiltonian_axis: BasisAxis,
    pub jump_kind: JumpKind,
}

impl<T: Real> ModelSpec<T> {
    /// Validate parameters and fix the axis/jump pairing from the model id.
    pub fn new(model_id: ModelId, n_spins: usize, omega: T, gamma: T) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::InvalidArgument("n_spins must be at least 1".into()));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidArgument("omega must be finite".into()));
        }
        if !(gamma >= T::zero()) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma must be finite and nonnegative, got {gamma}"
            )));
        }
        Ok(ModelSpec {
            model_id,
            n_spins,
            omega,
            gamma,
            hamiltonian_axis: model_id.hamiltonian_axis(),
            jump_kind: model_id.jump_kind(),
        })
    }

    /// Same model at a different dissipation strength.
    pub fn with_gamma(mut self, gamma: T) -> Result<Self> {
        if !(gamma >= T::zero()) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma must be finite and nonnegative, got {gamma}"
            )));
        }
        self.gamma = gamma;
        Ok(self)
    }

    /// `H = -N Omega J_axis` in the provided representation.
    pub fn hamiltonian(&self, ops: &SpinOperatorSet<T>) -> CMatrix<T> {
        let axis_op = match self.hamiltonian_axis {
            BasisAxis::X => &ops.jx,
            BasisAxis::Z => &ops.jz,
        };
        let coeff = Complex::new(-T::of(self.n_spins as f64) * self.omega, T::zero());
        axis_op.mapv(|z| z * coeff)
    }

    /// The model's jump operator in the provided representation.
    pub fn jump_operator(&self, ops: &SpinOperatorSet<T>) -> CMatrix<T> {
        let i = Complex::new(T::zero(), T::one());
        match self.jump_kind {
            JumpKind::JMinus => &ops.jx - &ops.jy.mapv(|z| z * i),
            JumpKind::JPlus => &ops.jx + &ops.jy.mapv(|z| z * i),
            JumpKind::Jz => ops.jz.clone(),
            JumpKind::Jx => ops.jx.clone(),
        }
    }

    /// Physical rate `N Gamma` of the jump channel.
    pub fn rate(&self) -> T {
        T::of(self.n_spins as f64) * self.gamma
    }
}

/// Assemble the vectorized Liouvillian of a model in its working basis.
pub fn assemble<T: Real>(spec: &ModelSpec<T>) -> Result<Liouvillian<T>> {
    let ops = build_spin_ops::<T>(spec.n_spins, spec.hamiltonian_axis)?;
    let h = spec.hamiltonian(&ops);
    let jump = spec.jump_operator(&ops);
    let l0 = build_l0(&h)?;
    let ld = build_ld(&[jump], &[spec.rate()])?;
    let total = &l0 + &ld;
    Ok(Liouvillian {
        l0,
        ld,
        total,
        model: *spec,
    })
}
