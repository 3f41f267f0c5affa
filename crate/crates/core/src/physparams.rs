//! Junction and circuit parameters mapped onto control-space quantities.
//!
//! SI units in, rad/ns out for the control fields. Frequencies quoted
//! cyclically (GHz) convert with [`cyclic_to_angular`].

use core::f64::consts::{PI, SQRT_2};

use crate::fmath;
use crate::gates::TwoQubitParams;
use crate::noise::thermal_noise_current;
use crate::{Error, Result};

/// Flux quantum `h/2e`, Wb.
pub const FLUX_QUANTUM: f64 = 2.067833848e-15;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054571817e-34;
/// Seconds per nanosecond.
pub const NS: f64 = 1e-9;

/// Cyclic frequency (GHz) to angular frequency (rad/ns).
pub fn cyclic_to_angular(ghz: f64) -> f64 {
    2.0 * PI * ghz
}

/// Angular frequency (rad/ns) to cyclic frequency (GHz).
pub fn angular_to_cyclic(rad_per_ns: f64) -> f64 {
    rad_per_ns / (2.0 * PI)
}

/// `φ₀ / (2π I_c cos δ)`, H.
pub fn josephson_inductance(critical_current: f64, delta: f64) -> Result<f64> {
    check_positive(critical_current, "critical current must be positive")?;
    let c = fmath::cos(delta);
    if c.abs() < 1e-12 {
        return Err(Error::Singularity("Josephson inductance diverges at cos δ = 0"));
    }
    Ok(FLUX_QUANTUM / (2.0 * PI * critical_current * c))
}

/// `(2√2 I_c φ₀ / 3π)(1 − I/I_c)^{3/2}`, J.
pub fn barrier_height(current: f64, critical_current: f64) -> Result<f64> {
    check_positive(critical_current, "critical current must be positive")?;
    if !(0.0..=critical_current).contains(&current) {
        return Err(Error::Domain("bias current must lie in [0, I_c]"));
    }
    let x = 1.0 - current / critical_current;
    Ok(2.0 * SQRT_2 * critical_current * FLUX_QUANTUM / (3.0 * PI) * x * fmath::sqrt(x))
}

/// `2^{1/4} (2π I_c / φ₀ C)^{1/2} (1 − I/I_c)^{1/4}`, rad/s.
pub fn plasma_frequency(current: f64, critical_current: f64, capacitance: f64) -> Result<f64> {
    check_positive(critical_current, "critical current must be positive")?;
    check_positive(capacitance, "capacitance must be positive")?;
    if !(current >= 0.0 && current < critical_current) {
        return Err(Error::Domain("bias current must lie in [0, I_c)"));
    }
    let x = 1.0 - current / critical_current;
    Ok(fmath::powf(2.0, 0.25)
        * fmath::sqrt(2.0 * PI * critical_current / (FLUX_QUANTUM * capacitance))
        * fmath::powf(x, 0.25))
}

/// `(C_x / C_J)·ω₀₁`, in the units of `qubit_frequency`.
pub fn coupling_strength(
    coupling_capacitance: f64,
    junction_capacitance: f64,
    qubit_frequency: f64,
) -> Result<f64> {
    check_positive(junction_capacitance, "junction capacitance must be positive")?;
    if !(coupling_capacitance >= 0.0) {
        return Err(Error::Domain("coupling capacitance must be non-negative"));
    }
    Error::check_finite(qubit_frequency, "qubit frequency must be finite")?;
    Ok(coupling_capacitance / junction_capacitance * qubit_frequency)
}

/// Detuning shift `δI·|∂E₁₀/∂I_dc|` (rad/ns) produced by a bias current
/// fluctuation `δI` (A).
pub fn detuning_fluctuation(current_noise: f64, level_slope: f64) -> Result<f64> {
    Error::check_finite(current_noise, "current noise must be finite")?;
    Error::check_finite(level_slope, "level slope must be finite")?;
    Ok(current_noise.abs() * level_slope.abs())
}

/// A current-biased junction with its drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionSpec {
    /// I_c, A.
    pub critical_current: f64,
    /// C_J, F.
    pub capacitance: f64,
    /// I_dc, A.
    pub bias_current: f64,
    /// δI_dc, the bias excursion that sets the detuning, A.
    pub bias_offset: f64,
    /// I_μw, microwave drive amplitude, A.
    pub microwave_current: f64,
    /// ∂E₁₀/∂I_dc, (rad/ns)/A.
    pub level_slope: f64,
    /// C_x, F.
    pub coupling_capacitance: f64,
    /// ω₁₀, rad/ns.
    pub qubit_frequency: f64,
}

impl JunctionSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive(self.critical_current, "critical current must be positive")?;
        check_positive(self.capacitance, "capacitance must be positive")?;
        check_positive(self.qubit_frequency, "qubit frequency must be positive")?;
        for (v, what) in [
            (self.bias_current, "bias current must be finite"),
            (self.bias_offset, "bias offset must be finite"),
            (self.microwave_current, "microwave current must be finite"),
            (self.level_slope, "level slope must be finite"),
            (self.coupling_capacitance, "coupling capacitance must be finite"),
        ] {
            Error::check_finite(v, what)?;
        }
        if self.bias_current.abs() >= self.critical_current {
            return Err(Error::Domain("bias current must stay below the critical current"));
        }
        Ok(())
    }
}

/// `ν = I_μw √(ħ/2ω₁₀C)/ħ` and `Δω = δI_dc·∂E₁₀/∂I_dc`, both rad/ns.
pub fn control_fields(spec: &JunctionSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let omega_si = spec.qubit_frequency / NS;
    let rabi_si = spec.microwave_current / fmath::sqrt(2.0 * HBAR * omega_si * spec.capacitance);
    Ok((rabi_si.abs() * NS, spec.bias_offset * spec.level_slope))
}

/// A complete set of control and circuit parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkingPoint {
    /// I_c, A.
    pub critical_current: f64,
    /// ω₁₀, rad/ns.
    pub qubit_frequency: f64,
    /// ν, rad/ns.
    pub rabi: f64,
    /// Δω, rad/ns.
    pub detuning: f64,
    /// J, rad/ns.
    pub coupling: f64,
    /// C_J, F.
    pub junction_capacitance: f64,
    /// C_x, F.
    pub coupling_capacitance: f64,
    /// Bias-line temperature, K.
    pub temperature: f64,
    /// Bias-line resistance, Ω.
    pub resistance: f64,
    /// Noise bandwidth, Hz.
    pub bandwidth: f64,
    /// Expected bias current noise, A.
    pub current_noise: f64,
}

impl WorkingPoint {
    /// I_c = 10 µA, ω₁₀/2π = 6 GHz, ν/2π = Δω/2π = 300 MHz, J/2π = 150 MHz,
    /// C_J = 1.3 pF, C_x = 33 fF, with a 10 kΩ bias line at 4.2 K over 10 GHz.
    pub const REFERENCE: WorkingPoint = WorkingPoint {
        critical_current: 10e-6,
        qubit_frequency: 2.0 * PI * 6.0,
        rabi: 2.0 * PI * 0.3,
        detuning: 2.0 * PI * 0.3,
        coupling: 2.0 * PI * 0.15,
        junction_capacitance: 1.3e-12,
        coupling_capacitance: 33e-15,
        temperature: 4.2,
        resistance: 1e4,
        bandwidth: 1e10,
        current_noise: 15e-9,
    };

    pub fn two_qubit(&self) -> Result<TwoQubitParams> {
        TwoQubitParams::new(self.rabi, self.detuning, self.coupling)
    }

    /// `J` implied by the capacitances, rad/ns.
    pub fn derived_coupling(&self) -> Result<f64> {
        coupling_strength(
            self.coupling_capacitance,
            self.junction_capacitance,
            self.qubit_frequency,
        )
    }

    /// Johnson current noise of the bias line, A.
    pub fn thermal_current(&self) -> Result<f64> {
        thermal_noise_current(self.temperature, self.resistance, self.bandwidth)
    }

    /// Fractional detuning noise when `current_noise` shifts the detuning
    /// through `level_slope` ((rad/ns)/A).
    pub fn fractional_detuning_noise(&self, level_slope: f64) -> Result<f64> {
        Ok(detuning_fluctuation(self.current_noise, level_slope)? / self.detuning.abs())
    }
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 1] = ["paper-2007"];

/// Looks up a named working point.
pub fn preset(name: &str) -> Option<WorkingPoint> {
    match name {
        "paper-2007" => Some(WorkingPoint::REFERENCE),
        _ => None,
    }
}

fn check_positive(v: f64, what: &'static str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(what))
    }
}
