//! Quasi-static Gaussian parameter noise.
//!
//! Each gate execution draws one perturbed `(ν̃, Δω̃)` and holds it for both
//! loops. The noisy gate is then the ideal gate family evaluated at the
//! perturbed parameters, so it stays exactly unitary. The azimuth `η` is not
//! perturbed.
//!
//! Random streams are ChaCha8 keyed by a 64-bit seed, with independent
//! streams selected by a stream index (see [`stream_rng`]).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::fieldpath::cone_berry_phase;
use crate::fmath;
use crate::gates::{
    gate_matrix, ControlledGate, TargetPhaseQuadrature, TwoQubitParams, ControlBranch,
};
use crate::qmath::Unitary2;
use crate::{Error, Result};

/// Name of the generator behind [`stream_rng`], recorded in output files.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9), seed_from_u64 + set_stream";

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

const MAX_REDRAWS: u32 = 64;
const DEGENERATE_FIELD: f64 = 1e-12;

/// Deterministic generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// How a noise width relates to the nominal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseScale {
    /// Standard deviation is `σ·|nominal|`.
    Relative,
    /// Standard deviation is `σ` in the parameter's own units (rad/ns).
    Absolute,
}

/// Widths of the detuning and drive fluctuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// σ₀, fluctuation of Δω.
    pub sigma_detuning: f64,
    /// σ₁, fluctuation of ν.
    pub sigma_rabi: f64,
    pub scale: NoiseScale,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma_detuning: f64, sigma_rabi: f64, seed: u64) -> Result<Self> {
        Self::with_scale(sigma_detuning, sigma_rabi, NoiseScale::Relative, seed)
    }

    pub fn with_scale(
        sigma_detuning: f64,
        sigma_rabi: f64,
        scale: NoiseScale,
        seed: u64,
    ) -> Result<Self> {
        for s in [sigma_detuning, sigma_rabi] {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::Domain("noise width must be finite and non-negative"));
            }
        }
        Ok(Self {
            sigma_detuning,
            sigma_rabi,
            scale,
            seed,
        })
    }

    /// No fluctuations at all.
    pub fn noiseless(seed: u64) -> Self {
        Self {
            sigma_detuning: 0.0,
            sigma_rabi: 0.0,
            scale: NoiseScale::Relative,
            seed,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma_detuning == 0.0 && self.sigma_rabi == 0.0
    }

    fn perturb<R: Rng + ?Sized>(&self, nominal: f64, sigma: f64, rng: &mut R) -> f64 {
        match self.scale {
            NoiseScale::Relative => gaussian_perturb(nominal, sigma, rng),
            NoiseScale::Absolute => gaussian_shift(nominal, sigma, rng),
        }
    }
}

/// `nominal + x` with `x ~ N(0, (σ_rel·nominal)²)`.
///
/// Always consumes one normal variate, so streams stay aligned across noise
/// configurations; with `σ_rel = 0` the nominal value is returned unchanged.
pub fn gaussian_perturb<R: Rng + ?Sized>(nominal: f64, sigma_rel: f64, rng: &mut R) -> f64 {
    gaussian_shift(nominal, sigma_rel * nominal.abs(), rng)
}

/// `nominal + x` with `x ~ N(0, σ²)`.
pub fn gaussian_shift<R: Rng + ?Sized>(nominal: f64, sigma: f64, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    if sigma == 0.0 {
        nominal
    } else {
        nominal + sigma * z
    }
}

/// One realisation of the perturbed cone parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisySample {
    pub rabi: f64,
    pub detuning: f64,
    /// Two-loop Berry phase at the perturbed parameters.
    pub gamma: f64,
    /// Mixing angle at the perturbed parameters.
    pub xi: f64,
}

/// Draws `(ν̃, Δω̃)` (detuning first, then drive) and derives `(γ̃, ξ̃)`.
/// Draws with a vanishing field are redrawn.
pub fn draw_single<R: Rng + ?Sized>(
    rabi: f64,
    detuning: f64,
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<NoisySample> {
    for _ in 0..MAX_REDRAWS {
        let dw = spec.perturb(detuning, spec.sigma_detuning, rng);
        let nu = spec.perturb(rabi, spec.sigma_rabi, rng);
        if fmath::hypot(nu, dw) <= DEGENERATE_FIELD {
            continue;
        }
        return Ok(NoisySample {
            rabi: nu,
            detuning: dw,
            gamma: 2.0 * cone_berry_phase(nu, dw)?,
            xi: fmath::atan2(nu, dw),
        });
    }
    Err(Error::DegenerateDraw(MAX_REDRAWS))
}

/// A noisy realisation of the two-loop single-qubit gate.
pub fn noisy_single_gate<R: Rng + ?Sized>(
    rabi: f64,
    detuning: f64,
    eta: f64,
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<Unitary2> {
    let s = draw_single(rabi, detuning, spec, rng)?;
    Ok(gate_matrix(s.gamma, s.xi, eta))
}

/// A noisy realisation of the controlled gate under detuning noise only.
///
/// The shared phase is recomputed from the target-loop integral at the drawn
/// `Δω̃`, and so are `ξ̃±`. Draws with `Δω̃ ≤ 0` are redrawn.
pub fn noisy_controlled_gate<R: Rng + ?Sized>(
    p: &TwoQubitParams,
    spec: &NoiseSpec,
    quad: &TargetPhaseQuadrature,
    rng: &mut R,
) -> Result<ControlledGate> {
    if spec.sigma_rabi != 0.0 {
        return Err(Error::Domain(
            "controlled-gate noise model perturbs the detuning only (σ₁ must be 0)",
        ));
    }
    for _ in 0..MAX_REDRAWS {
        let dw = spec.perturb(p.detuning, spec.sigma_detuning, rng);
        if !(dw > 0.0) {
            continue;
        }
        let drawn = TwoQubitParams { detuning: dw, ..*p };
        let gamma = 2.0 * quad.phase(&drawn, ControlBranch::Plus)?;
        return Ok(ControlledGate::from_phase(&drawn, gamma));
    }
    Err(Error::DegenerateDraw(MAX_REDRAWS))
}

/// Johnson–Nyquist current noise `√(4 k_B T B / R)` in amperes (rms).
pub fn thermal_noise_current(temperature: f64, resistance: f64, bandwidth: f64) -> Result<f64> {
    for v in [temperature, resistance, bandwidth] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(
                "temperature, resistance and bandwidth must be positive",
            ));
        }
    }
    Ok(fmath::sqrt(4.0 * BOLTZMANN * temperature * bandwidth / resistance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{controlled_gate_with, two_loop_gate};
    use crate::quadrature::DEFAULT_STEPS;
    use core::f64::consts::PI;

    const W: f64 = 2.0 * PI * 0.3;

    #[test]
    fn zero_width_returns_nominal() {
        let mut rng = stream_rng(1, 0);
        for v in [0.0, 1.5, -3.0, 1e9] {
            assert_eq!(gaussian_perturb(v, 0.0, &mut rng), v);
        }
    }

    #[test]
    fn sample_moments() {
        let mut rng = stream_rng(42, 0);
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = gaussian_perturb(1.0, 0.1, &mut rng);
            s += x;
            s2 += x * x;
        }
        let mean = s / n as f64;
        let var = (s2 - n as f64 * mean * mean) / (n - 1) as f64;
        assert!((mean - 1.0).abs() < 3e-4, "mean {mean}");
        assert!((libm::sqrt(var) - 0.1).abs() < 1e-3, "std {}", libm::sqrt(var));
    }

    #[test]
    fn noiseless_gate_is_ideal() {
        let mut rng = stream_rng(3, 0);
        let spec = NoiseSpec::noiseless(3);
        let u = noisy_single_gate(W, W, 0.0, &spec, &mut rng).unwrap();
        let ideal = two_loop_gate(W, W, 0.0).unwrap();
        assert_eq!(u, ideal);
    }

    #[test]
    fn noisy_gates_stay_unitary() {
        let mut rng = stream_rng(4, 0);
        let spec = NoiseSpec::new(0.3, 0.3, 4).unwrap();
        for _ in 0..10_000 {
            let u = noisy_single_gate(W, 0.7 * W, 0.3, &spec, &mut rng).unwrap();
            assert!(u.unitarity_defect() < 1e-10);
            assert!((u.det() - crate::C64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn detuning_noise_centres_mixing_angle() {
        let mut rng = stream_rng(5, 0);
        let spec = NoiseSpec::new(0.1, 0.0, 5).unwrap();
        let n = 20_000;
        let mut xs: alloc::vec::Vec<f64> = (0..n)
            .map(|_| draw_single(W, W, &spec, &mut rng).unwrap().xi)
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let se = libm::sqrt(var / n as f64);
        // ξ̃ is a monotone function of the draw, so its median sits exactly at ξ.
        xs.sort_by(f64::total_cmp);
        let median = xs[n / 2];
        assert!((median - PI / 4.0).abs() < 3.0 * 1.2533 * se, "median {median}");
        // The mean carries the second-order bias σ²/4 of atan(1/(1+ε)) at ξ = π/4.
        assert!((mean - PI / 4.0 - 0.0025).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn degenerate_draws_error_out() {
        let mut rng = stream_rng(6, 0);
        let spec = NoiseSpec::noiseless(6);
        assert!(matches!(
            draw_single(0.0, 0.0, &spec, &mut rng),
            Err(Error::DegenerateDraw(_))
        ));
    }

    #[test]
    fn controlled_noise_model() {
        let quad = TargetPhaseQuadrature::new(DEFAULT_STEPS).unwrap();
        let p = TwoQubitParams::new(W, W, 2.0 * PI * 0.15).unwrap();
        let ideal = controlled_gate_with(&p, &quad).unwrap();
        let mut rng = stream_rng(7, 0);

        let quiet = NoiseSpec::noiseless(7);
        assert_eq!(noisy_controlled_gate(&p, &quiet, &quad, &mut rng).unwrap(), ideal);

        let spec = NoiseSpec::new(0.1, 0.0, 7).unwrap();
        for _ in 0..10_000 {
            let g = noisy_controlled_gate(&p, &spec, &quad, &mut rng).unwrap();
            let u = g.unitary();
            assert!(u.unitarity_defect() < 1e-10);
            for i in 0..4 {
                for j in 0..4 {
                    if i / 2 != j / 2 {
                        assert_eq!(u.get(i, j), crate::C64::new(0.0, 0.0));
                    }
                }
            }
        }

        let bad = NoiseSpec::new(0.1, 0.1, 7).unwrap();
        assert!(noisy_controlled_gate(&p, &bad, &quad, &mut rng).is_err());
    }

    #[test]
    fn small_noise_converges_to_ideal() {
        let sigma = 1e-3;
        let spec = NoiseSpec::new(sigma, sigma, 8).unwrap();
        let ideal = two_loop_gate(W, W, 0.0).unwrap();
        let mut rng = stream_rng(8, 0);
        let mut devs: alloc::vec::Vec<f64> = (0..2000)
            .map(|_| {
                noisy_single_gate(W, W, 0.0, &spec, &mut rng)
                    .unwrap()
                    .max_abs_diff(&ideal)
            })
            .collect();
        devs.sort_by(f64::total_cmp);
        let p99 = devs[(devs.len() * 99) / 100];
        assert!(p99 < 10.0 * sigma, "p99 {p99}");
    }

    #[test]
    fn thermal_current_examples() {
        let i = thermal_noise_current(4.2, 1e4, 1e10).unwrap();
        assert!((i - 1.52e-8).abs() < 0.01e-8, "{i}");
        let quad_b = thermal_noise_current(4.2, 1e4, 4e10).unwrap();
        assert!((quad_b / i - 2.0).abs() < 1e-12);
        let quad_r = thermal_noise_current(4.2, 4e4, 1e10).unwrap();
        assert!((quad_r / i - 0.5).abs() < 1e-12);
        assert!(thermal_noise_current(0.0, 1e4, 1e10).is_err());
        assert!(thermal_noise_current(4.2, -1.0, 1e10).is_err());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream_rng(9, 1).random();
        let b: u64 = stream_rng(9, 1).random();
        let c: u64 = stream_rng(9, 2).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
