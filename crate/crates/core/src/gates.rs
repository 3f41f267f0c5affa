//! Geometric single- and two-qubit gates.
//!
//! The single-qubit gate `U(γ, ξ, η)` is diagonal in the eigenbasis
//! `|ψ₊⟩ = cos(ξ/2)|0⟩ + e^{iη} sin(ξ/2)|1⟩`,
//! `|ψ₋⟩ = −sin(ξ/2)|0⟩ + e^{iη} cos(ξ/2)|1⟩` with eigenvalues `e^{±iγ}`;
//! equivalently `U = exp(iγ n·σ)` with `n = (sin ξ cos η, sin ξ sin η, cos ξ)`.
//!
//! The controlled gate couples two qubits through `(J/2) σy ⊗ σy`. With the
//! control held in a σy eigenstate the target sees a cone shifted by ∓J/2
//! along y, and the gate is block diagonal in the control's σy eigenbasis.
//! Both blocks share one total phase `γ` (the Berry phases of the two shifted
//! loops coincide) but have different mixing angles `ξ±`. Any correction from
//! the eigenstate angle varying along the non-conical shifted loop is not
//! modelled.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use crate::fieldpath::cone_berry_phase;
use crate::fmath;
use crate::qmath::{C64, Ket, StateVec2, Unitary, Unitary2, Unitary4};
use crate::quadrature::{self, DEFAULT_STEPS};
use crate::{Error, Result};

/// Arguments `(γ, ξ, η)` of the single-qubit geometric gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    pub gamma: f64,
    pub xi: f64,
    pub eta: f64,
}

impl GateParams {
    pub fn new(gamma: f64, xi: f64, eta: f64) -> Result<Self> {
        Error::check_finite(gamma, "gate phase must be finite")?;
        Error::check_finite(xi, "mixing angle must be finite")?;
        Error::check_finite(eta, "gate azimuth must be finite")?;
        if !(0.0..=PI).contains(&xi) {
            return Err(Error::Domain("mixing angle must lie in [0, π]"));
        }
        Ok(Self { gamma, xi, eta })
    }

    /// NOT-type gate: ξ = π/2, η = 0, per-loop Berry phase π/4.
    pub fn not_type() -> Self {
        Self {
            gamma: FRAC_PI_2,
            xi: FRAC_PI_2,
            eta: 0.0,
        }
    }

    /// Hadamard-type gate: ξ = π/4, η = 0, per-loop Berry phase π/4.
    pub fn hadamard_type() -> Self {
        Self {
            gamma: FRAC_PI_2,
            xi: core::f64::consts::FRAC_PI_4,
            eta: 0.0,
        }
    }

    /// Parameters produced by the two-loop protocol on a cone with drive `ν`
    /// and detuning `Δω`: `γ = 2γ_g⁰`, `ξ = atan2(ν, Δω)`.
    pub fn two_loop(rabi: f64, detuning: f64, eta: f64) -> Result<Self> {
        let gamma = 2.0 * cone_berry_phase(rabi, detuning)?;
        Self::new(gamma, fmath::atan2(rabi, detuning), eta)
    }
}

pub(crate) fn gate_matrix(gamma: f64, xi: f64, eta: f64) -> Unitary2 {
    let (sg, cg) = fmath::sin_cos(gamma);
    let (sh, ch) = fmath::sin_cos(xi / 2.0);
    let (c2, s2) = (ch * ch, sh * sh);
    let plus = C64::new(cg, sg);
    let minus = C64::new(cg, -sg);
    let off = fmath::sin(xi) * sg;
    Unitary::from_raw([
        [plus * c2 + minus * s2, C64::new(0.0, off) * C64::from_polar(1.0, -eta)],
        [C64::new(0.0, off) * C64::from_polar(1.0, eta), plus * s2 + minus * c2],
    ])
}

/// The single-qubit geometric gate `U(γ, ξ, η)`.
pub fn single_qubit_gate(p: &GateParams) -> Unitary2 {
    gate_matrix(p.gamma, p.xi, p.eta)
}

/// `[|ψ₊⟩, |ψ₋⟩]` for mixing angle `ξ` and azimuth `η`.
pub fn eigenstates(xi: f64, eta: f64) -> [StateVec2; 2] {
    let (s, c) = fmath::sin_cos(xi / 2.0);
    let e = C64::from_polar(1.0, eta);
    [
        Ket::from_raw([C64::new(c, 0.0), e * s]),
        Ket::from_raw([C64::new(-s, 0.0), e * c]),
    ]
}

/// The purely geometric gate left after the two-loop protocol on a cone.
pub fn two_loop_gate(rabi: f64, detuning: f64, eta: f64) -> Result<Unitary2> {
    Ok(single_qubit_gate(&GateParams::two_loop(rabi, detuning, eta)?))
}

/// Prepares `(|0⟩ + i|1⟩)/√2` from `|0⟩` with ξ = π/2, η = 0 and a per-loop
/// Berry phase of π/8.
pub fn state_prep_minus() -> StateVec2 {
    let p = GateParams {
        gamma: PI / 4.0,
        xi: FRAC_PI_2,
        eta: 0.0,
    };
    single_qubit_gate(&p).apply(&Ket::basis(0))
}

/// `(|0⟩ + i|1⟩)/√2`, the target of [`state_prep_minus`].
pub fn minus_state() -> StateVec2 {
    Ket::from_raw([C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2)])
}

/// Drive, detuning and σy⊗σy coupling of a coupled pair, all in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitParams {
    pub rabi: f64,
    pub detuning: f64,
    pub coupling: f64,
}

impl TwoQubitParams {
    pub fn new(rabi: f64, detuning: f64, coupling: f64) -> Result<Self> {
        Error::check_finite(rabi, "Rabi frequency must be finite")?;
        Error::check_finite(detuning, "detuning must be finite")?;
        Error::check_finite(coupling, "coupling must be finite")?;
        if rabi < 0.0 {
            return Err(Error::Domain("Rabi frequency must be non-negative"));
        }
        if coupling < 0.0 {
            return Err(Error::Domain("coupling must be non-negative"));
        }
        Ok(Self {
            rabi,
            detuning,
            coupling,
        })
    }

    /// Mixing angle `atan((ν ∓ J/2)/Δω)` of the target loop for a control
    /// branch.
    pub fn mixing_angle(&self, branch: ControlBranch) -> f64 {
        fmath::atan((self.rabi + branch.y_offset(self.coupling)) / self.detuning)
    }
}

/// Control-qubit σy eigenstate selecting one block of the controlled gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlBranch {
    /// Control in `|+⟩ = (|0⟩ + i|1⟩)/√2`; target field shifted by −J/2.
    Plus,
    /// Control in `|−⟩ = (|0⟩ − i|1⟩)/√2`; target field shifted by +J/2.
    Minus,
}

impl ControlBranch {
    pub const BOTH: [ControlBranch; 2] = [ControlBranch::Plus, ControlBranch::Minus];

    /// Shift of the target field's y component.
    pub fn y_offset(self, coupling: f64) -> f64 {
        match self {
            ControlBranch::Plus => -coupling / 2.0,
            ControlBranch::Minus => coupling / 2.0,
        }
    }

    /// The control state in the computational basis.
    pub fn control_state(self) -> StateVec2 {
        let s = match self {
            ControlBranch::Plus => 1.0,
            ControlBranch::Minus => -1.0,
        };
        Ket::from_raw([
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(0.0, s * FRAC_1_SQRT_2),
        ])
    }
}

/// Precomputed nodes for the target-loop Berry phase integral over
/// `φ ∈ [π/2, 5π/2]`. Reusable across parameter draws.
#[derive(Debug, Clone)]
pub struct TargetPhaseQuadrature {
    sin_phi: Vec<f64>,
    weights: Vec<f64>,
}

impl TargetPhaseQuadrature {
    pub fn new(n_steps: usize) -> Result<Self> {
        quadrature::check_steps(n_steps)?;
        let h = 2.0 * PI / n_steps as f64;
        let sin_phi = (0..=n_steps)
            .map(|k| fmath::sin(FRAC_PI_2 + k as f64 * h))
            .collect();
        let weights = (0..=n_steps)
            .map(|k| {
                let w = if k == 0 || k == n_steps {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * h / 3.0
            })
            .collect();
        Ok(Self { sin_phi, weights })
    }

    pub fn steps(&self) -> usize {
        self.sin_phi.len() - 1
    }

    /// `γ_g^± = ½∫ (ν² ∓ ½a sin φ) / (√(b ∓ a sin φ)(√(b ∓ a sin φ) + Δω)) dφ`
    /// with `a = νJ`, `b = ν² + Δω² + J²/4`.
    pub fn phase(&self, p: &TwoQubitParams, branch: ControlBranch) -> Result<f64> {
        let nu = p.rabi;
        let dw = p.detuning;
        let a = nu * p.coupling;
        let b = nu * nu + dw * dw + p.coupling * p.coupling / 4.0;
        if b - a <= 0.0 {
            return Err(Error::Singularity("target field vanishes on the loop"));
        }
        let s = match branch {
            ControlBranch::Plus => -1.0,
            ControlBranch::Minus => 1.0,
        };
        let mut acc = 0.0;
        for (sin_phi, w) in self.sin_phi.iter().zip(&self.weights) {
            let r = fmath::sqrt(b + s * a * sin_phi);
            let pole = r + dw;
            if pole < crate::fieldpath::SOUTH_POLE_EPS * r {
                return Err(Error::Singularity(
                    "target field passes through the south pole of the solid-angle gauge",
                ));
            }
            acc += w * (nu * nu + s * 0.5 * a * sin_phi) / (r * pole);
        }
        Ok(0.5 * acc)
    }
}

/// Berry phase of the target loop for one control branch, using the
/// default step count.
pub fn two_qubit_phase(p: &TwoQubitParams, branch: ControlBranch) -> Result<f64> {
    two_qubit_phase_with_steps(p, branch, DEFAULT_STEPS)
}

pub fn two_qubit_phase_with_steps(
    p: &TwoQubitParams,
    branch: ControlBranch,
    n_steps: usize,
) -> Result<f64> {
    TargetPhaseQuadrature::new(n_steps)?.phase(p, branch)
}

/// The controlled geometric gate and its construction data.
///
/// `unitary()` is expressed in the ordered basis
/// `{|+⟩_C|0⟩_T, |+⟩_C|1⟩_T, |−⟩_C|0⟩_T, |−⟩_C|1⟩_T}` where `|±⟩` are the σy
/// eigenstates of the control. [`ControlledGate::to_computational_basis`]
/// converts to `{|00⟩, |01⟩, |10⟩, |11⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlledGate {
    unitary: Unitary4,
    gamma: f64,
    xi_plus: f64,
    xi_minus: f64,
}

/// Target-loop azimuth shared by both blocks.
pub const CONTROLLED_ETA: f64 = FRAC_PI_2;

impl ControlledGate {
    pub(crate) fn from_phase(p: &TwoQubitParams, gamma: f64) -> Self {
        let xi_plus = p.mixing_angle(ControlBranch::Plus);
        let xi_minus = p.mixing_angle(ControlBranch::Minus);
        let unitary = Unitary4::block_diag(
            &gate_matrix(gamma, xi_plus, CONTROLLED_ETA),
            &gate_matrix(gamma, xi_minus, CONTROLLED_ETA),
        );
        Self {
            unitary,
            gamma,
            xi_plus,
            xi_minus,
        }
    }

    /// The gate in the control σy eigenbasis.
    pub fn unitary(&self) -> &Unitary4 {
        &self.unitary
    }

    /// Two-loop total phase `γ = 2γ_g^±`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn xi_plus(&self) -> f64 {
        self.xi_plus
    }

    pub fn xi_minus(&self) -> f64 {
        self.xi_minus
    }

    /// The target gate applied when the control is in `branch`.
    pub fn block(&self, branch: ControlBranch) -> Unitary2 {
        let k = match branch {
            ControlBranch::Plus => 0,
            ControlBranch::Minus => 1,
        };
        Unitary::from_raw(self.unitary.block(k, k))
    }

    pub fn to_computational_basis(&self) -> Unitary4 {
        let w = control_basis_change();
        w * self.unitary * w.adjoint()
    }
}

/// `V ⊗ I` with `V = [|+⟩ |−⟩]`: maps control-σy-basis coordinates to
/// computational coordinates.
pub fn control_basis_change() -> Unitary4 {
    let [p, m] = ControlBranch::BOTH.map(|b| b.control_state());
    let v = Unitary::from_raw([
        [p.amplitudes()[0], m.amplitudes()[0]],
        [p.amplitudes()[1], m.amplitudes()[1]],
    ]);
    crate::qmath::tensor(&v, &Unitary2::identity())
}

/// Builds the controlled gate with `γ = 2γ_g⁺` at η = π/2.
///
/// Requires `Δω > 0`; the arctangent form of `ξ±` assumes it.
pub fn controlled_gate(p: &TwoQubitParams) -> Result<ControlledGate> {
    controlled_gate_with(p, &TargetPhaseQuadrature::new(DEFAULT_STEPS)?)
}

pub fn controlled_gate_with(
    p: &TwoQubitParams,
    quad: &TargetPhaseQuadrature,
) -> Result<ControlledGate> {
    if !(p.detuning > 0.0) {
        return Err(Error::Domain("controlled gate requires a positive detuning"));
    }
    let gamma = 2.0 * quad.phase(p, ControlBranch::Plus)?;
    Ok(ControlledGate::from_phase(p, gamma))
}
