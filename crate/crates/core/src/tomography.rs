//! Berry-phase readout by single-qubit state tomography.
//!
//! States are written in the `[|ψ₊⟩, |ψ₋⟩]` eigenbasis of the gate loop,
//! which plays the role of the computational basis; "excited" means `|ψ₋⟩`.
//!
//! Readout convention. The z axis is read directly. The x axis is read after
//! a −π/2 rotation about y and the y axis after a −π/2 rotation about x,
//! where a rotation by α about n is `exp(−iα n·σ/2)`. With Bloch vector `r`
//! the excited populations are then
//! `p_x = (1 − r_x)/2`, `p_y = (1 + r_y)/2`, `p_z = (1 − r_z)/2`.
//! Reconstruction is linear inversion, `ρ̂ = (I + r̂·σ)/2`; estimates with
//! `|r̂| > 1` keep their negative eigenvalue.

use core::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::fmath::{self, wrap_angle};
use crate::noise::stream_rng;
use crate::qmath::{state_to_density, Density2, Ket, StateVec2, Unitary2, C64};
use crate::{Error, Result};

/// Default shots per measurement axis.
pub const DEFAULT_SHOTS: u64 = 10_000;
/// Coherence `|ρ₀₁|` below which the relative phase is unobservable.
pub const COHERENCE_THRESHOLD: f64 = 1e-6;

/// `[e^{2iγ}cos(θ/2), e^{−2iγ}sin(θ/2)]ᵀ`: the initial state
/// `[cos(θ/2), sin(θ/2)]ᵀ` after two gate operations of Berry phase `γ`.
pub fn ideal_final_state(theta: f64, gamma: f64) -> Result<StateVec2> {
    Error::check_finite(theta, "preparation angle must be finite")?;
    Error::check_finite(gamma, "Berry phase must be finite")?;
    let (s, c) = fmath::sin_cos(theta / 2.0);
    Ok(Ket::from_raw([
        C64::from_polar(c, 2.0 * gamma),
        C64::from_polar(s, -2.0 * gamma),
    ]))
}

/// The prepared state `[cos(θ/2), sin(θ/2)]ᵀ`.
pub fn initial_state(theta: f64) -> Result<StateVec2> {
    ideal_final_state(theta, 0.0)
}

/// Excited-state probabilities `[p_x, p_y, p_z]`.
pub fn measurement_probs(rho: &Density2) -> [f64; 3] {
    let [x, y, z] = rho.bloch();
    [
        ((1.0 - x) / 2.0).clamp(0.0, 1.0),
        ((1.0 + y) / 2.0).clamp(0.0, 1.0),
        ((1.0 - z) / 2.0).clamp(0.0, 1.0),
    ]
}

/// Pre-rotations applied before the x, y and z readouts.
pub fn readout_rotations() -> [Unitary2; 3] {
    [
        Unitary2::rotation([0.0, 1.0, 0.0], -FRAC_PI_2),
        Unitary2::rotation([1.0, 0.0, 0.0], -FRAC_PI_2),
        Unitary2::identity(),
    ]
}

/// Linear inversion of `[p_x, p_y, p_z]`.
pub fn reconstruct(probs: [f64; 3]) -> Density2 {
    let [px, py, pz] = probs;
    Density2::from_bloch([1.0 - 2.0 * px, 2.0 * py - 1.0, 1.0 - 2.0 * pz])
}

/// Samples `shots` single-shot outcomes per axis and inverts the observed
/// frequencies. `shots = 0` selects the analytic (infinite-shot) limit.
pub fn sample_and_reconstruct<R: Rng + ?Sized>(
    rho: &Density2,
    shots: u64,
    rng: &mut R,
) -> Result<Density2> {
    let p = measurement_probs(rho);
    if shots == 0 {
        return Ok(reconstruct(p));
    }
    let mut freq = [0.0; 3];
    for (f, &pk) in freq.iter_mut().zip(&p) {
        let b = Binomial::new(shots, pk)
            .map_err(|_| Error::Domain("measurement probability outside [0, 1]"))?;
        *f = b.sample(rng) as f64 / shots as f64;
    }
    Ok(reconstruct(freq))
}

/// `arg ρ_f[0,1] − arg ρ_i[0,1]`, wrapped to (−π, π].
pub fn extract_berry_phase(initial: &Density2, fin: &Density2) -> Result<f64> {
    let a = initial.entries()[0][1];
    let b = fin.entries()[0][1];
    for c in [a, b] {
        if c.norm() < COHERENCE_THRESHOLD {
            return Err(Error::Unobservable(c.norm()));
        }
    }
    Ok(wrap_angle(b.arg() - a.arg()))
}

/// One simulated tomography experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographyRun {
    pub theta: f64,
    pub gamma: f64,
    pub shots: u64,
    pub rho_initial: Density2,
    pub rho_final: Density2,
    pub extracted_phase: f64,
}

impl TomographyRun {
    /// Smallest eigenvalue over both reconstructions.
    pub fn min_eigenvalue(&self) -> f64 {
        self.rho_initial.eigenvalues()[0].min(self.rho_final.eigenvalues()[0])
    }
}

/// Reconstructs the prepared and final states and extracts their relative
/// phase.
pub fn run_tomography<R: Rng + ?Sized>(
    theta: f64,
    gamma: f64,
    shots: u64,
    rng: &mut R,
) -> Result<TomographyRun> {
    let rho_i = state_to_density(&initial_state(theta)?);
    let rho_f = state_to_density(&ideal_final_state(theta, gamma)?);
    let rho_initial = sample_and_reconstruct(&rho_i, shots, rng)?;
    let rho_final = sample_and_reconstruct(&rho_f, shots, rng)?;
    let extracted_phase = extract_berry_phase(&rho_initial, &rho_final)?;
    Ok(TomographyRun {
        theta,
        gamma,
        shots,
        rho_initial,
        rho_final,
        extracted_phase,
    })
}

/// Summary of repeated tomography trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSummary {
    pub trials: usize,
    /// Fraction of trials with `|extracted − 4γ| < tolerance` (mod 2π).
    pub coverage: f64,
    pub mean_phase: f64,
    pub std_phase: f64,
    pub min_eigenvalue: f64,
}

/// Runs `trials` independent experiments, trial `k` on stream `k`.
pub fn repeat_tomography(
    theta: f64,
    gamma: f64,
    shots: u64,
    trials: usize,
    tolerance: f64,
    seed: u64,
) -> Result<TrialSummary> {
    if trials == 0 {
        return Err(Error::Domain("trial count must be at least 1"));
    }
    let target = wrap_angle(4.0 * gamma);
    let (mut hits, mut sum, mut sum2) = (0usize, 0.0, 0.0);
    let mut min_eig = f64::INFINITY;
    for k in 0..trials {
        let mut rng = stream_rng(seed, k as u64);
        let run = run_tomography(theta, gamma, shots, &mut rng)?;
        let dev = wrap_angle(run.extracted_phase - target);
        if dev.abs() < tolerance {
            hits += 1;
        }
        sum += dev;
        sum2 += dev * dev;
        min_eig = min_eig.min(run.min_eigenvalue());
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sum2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(TrialSummary {
        trials,
        coverage: hits as f64 / n,
        mean_phase: wrap_angle(target + mean),
        std_phase: fmath::sqrt(var),
        min_eigenvalue: min_eig,
    })
}
