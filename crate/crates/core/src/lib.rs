//! Adiabatic Abelian geometric gates for driven two-level systems.
//!
//! A qubit in the rotating frame behaves like a spin-½ in a fictitious field
//! `B = (ν cos φ, ν sin φ, Δω)`. Dragging `B` slowly around a cone gives each
//! eigenstate a Berry phase equal to half the subtended solid angle; running
//! the loop a second time with the field inverted cancels the dynamic phase
//! and leaves a purely geometric gate.
//!
//! The crate is `no_std` (it needs `alloc`) and has no IO. It covers:
//!
//! - [`qmath`]: fixed-size complex kets, density matrices and unitaries.
//! - [`fieldpath`]: field loops, the two-loop protocol and solid-angle quadrature.
//! - [`gates`]: the single-qubit geometric gate and the σy⊗σy controlled gate.
//! - [`noise`]: quasi-static Gaussian parameter noise and noisy gate draws.
//! - [`fidelity`]: Monte Carlo average fidelity and the sweep tables.
//! - [`oracle`]: a time-domain Schrödinger integrator that checks the adiabatic claims.
//! - [`tomography`]: finite-shot state tomography and Berry-phase readout.
//! - [`physparams`]: Josephson-junction formulas and named working points.
#![no_std]

extern crate alloc;

mod error;
mod fmath;
pub mod fidelity;
pub mod fieldpath;
pub mod gates;
pub mod noise;
pub mod oracle;
pub mod physparams;
pub mod qmath;
pub mod quadrature;
pub mod tomography;

pub use error::{Error, Result};
pub use qmath::{Density2, Ket, StateVec2, StateVec4, Unitary, Unitary2, Unitary4, C64};
