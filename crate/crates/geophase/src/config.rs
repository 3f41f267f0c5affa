//! Run configuration: a TOML file, a named preset and command-line overrides
//! merged into one fully resolved [`RunConfig`].
//!
//! Frequencies are written cyclically in GHz and converted to rad/ns by
//! [`RunConfig`] accessors. Unknown keys are rejected.

use std::path::Path;

use geophase_core::fidelity::{DEFAULT_GRID_POINTS, DEFAULT_SAMPLES, DEFAULT_TWO_QUBIT_SIGMAS, XI_TRIM};
use geophase_core::noise::{NoiseScale, NoiseSpec};
use geophase_core::oracle::{Integrator, DEFAULT_PERIOD, DEFAULT_STEPS_PER_LOOP};
use geophase_core::physparams::{self, cyclic_to_angular, WorkingPoint, PRESET_NAMES};
use geophase_core::quadrature::DEFAULT_STEPS;
use geophase_core::tomography::DEFAULT_SHOTS;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 2007;
pub const DEFAULT_PRESET: &str = "paper-2007";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub physics: PhysicsFile,
    #[serde(default)]
    pub noise: NoiseFile,
    #[serde(default)]
    pub berry: BerryFile,
    #[serde(default)]
    pub gate: GateFile,
    #[serde(default)]
    pub fidelity: FidelityFile,
    #[serde(default)]
    pub two_qubit: TwoQubitFile,
    #[serde(default)]
    pub oracle: OracleFile,
    #[serde(default)]
    pub tomography: TomographyFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsFile {
    pub rabi_ghz: Option<f64>,
    pub detuning_ghz: Option<f64>,
    pub coupling_ghz: Option<f64>,
    pub qubit_ghz: Option<f64>,
    pub eta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    pub sigma_detuning: Option<f64>,
    pub sigma_rabi: Option<f64>,
    pub scale: Option<ScaleName>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerryFile {
    pub quadrature_steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateFile {
    pub kind: Option<GateKind>,
    pub gamma: Option<f64>,
    pub xi: Option<f64>,
    pub eta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelityFile {
    pub mode: Option<FidelityMode>,
    pub samples: Option<usize>,
    pub grid_points: Option<usize>,
    pub xi_min: Option<f64>,
    pub xi_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoQubitFile {
    pub sigmas: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub grid_points: Option<usize>,
    pub quadrature_steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    pub period_ns: Option<f64>,
    pub steps_per_loop: Option<usize>,
    pub cycles: Option<Vec<f64>>,
    pub integrator: Option<IntegratorName>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyFile {
    pub theta: Option<f64>,
    pub gamma: Option<f64>,
    pub shots: Option<u64>,
    pub trials: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleName {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    /// γ = π/2, ξ = π/2.
    Not,
    /// γ = π/2, ξ = π/4.
    Hadamard,
    /// Explicit γ, ξ, η from the `[gate]` section.
    Custom,
    /// Two-loop cone gate at the configured ν, Δω, η.
    TwoLoop,
    /// Controlled gate at the configured ν, Δω, J.
    Controlled,
}

/// Single-qubit sweep variants, plus the two-qubit sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityMode {
    /// Detuning noise only.
    #[value(alias = "detuning-noise")]
    Fig2,
    /// Rabi-frequency noise only.
    #[value(alias = "rabi-noise")]
    Fig3,
    /// Both noise sources.
    #[value(alias = "joint-noise")]
    Fig4,
    /// Controlled gate over the two-qubit noise list.
    #[value(alias = "two-qubit")]
    Fig5,
    /// Noise-free run on a coarse grid.
    Smoke,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorName {
    Magnus4,
    Rk4,
}

impl From<IntegratorName> for Integrator {
    fn from(n: IntegratorName) -> Self {
        match n {
            IntegratorName::Magnus4 => Integrator::Magnus4,
            IntegratorName::Rk4 => Integrator::Rk4,
        }
    }
}

/// Everything a run depends on. Embedded verbatim in every output file, so
/// it excludes the output location and worker count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: String,
    pub seed: u64,
    pub physics: Physics,
    pub noise: Noise,
    pub berry: Berry,
    pub gate: Gate,
    pub fidelity: Fidelity,
    pub two_qubit: TwoQubit,
    pub oracle: Oracle,
    pub tomography: Tomography,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Physics {
    pub rabi_ghz: f64,
    pub detuning_ghz: f64,
    pub coupling_ghz: f64,
    pub qubit_ghz: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Noise {
    pub sigma_detuning: f64,
    pub sigma_rabi: f64,
    pub scale: ScaleName,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Berry {
    pub quadrature_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub kind: GateKind,
    pub gamma: f64,
    pub xi: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fidelity {
    pub mode: FidelityMode,
    pub samples: usize,
    pub grid_points: usize,
    pub xi_min: f64,
    pub xi_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoQubit {
    pub sigmas: Vec<f64>,
    pub samples: usize,
    pub grid_points: usize,
    pub quadrature_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Oracle {
    pub period_ns: f64,
    pub steps_per_loop: usize,
    pub cycles: Vec<f64>,
    pub integrator: IntegratorName,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tomography {
    pub theta: f64,
    pub gamma: f64,
    pub shots: u64,
    pub trials: usize,
    pub tolerance: f64,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub fidelity_mode: Option<FidelityMode>,
    pub gate_kind: Option<GateKind>,
}

pub fn load_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn lookup_preset(name: &str) -> Result<WorkingPoint, CliError> {
    physparams::preset(name).ok_or_else(|| {
        CliError::Config(format!(
            "unknown preset `{name}` (available: {})",
            PRESET_NAMES.join(", ")
        ))
    })
}

impl RunConfig {
    pub fn resolve(file: ConfigFile, over: Overrides) -> Result<Self, CliError> {
        let preset = over
            .preset
            .or(file.preset)
            .unwrap_or_else(|| DEFAULT_PRESET.to_string());
        let wp = lookup_preset(&preset)?;
        let ghz = |w: f64| physparams::angular_to_cyclic(w);
        let p = file.physics;
        let physics = Physics {
            rabi_ghz: p.rabi_ghz.unwrap_or(ghz(wp.rabi)),
            detuning_ghz: p.detuning_ghz.unwrap_or(ghz(wp.detuning)),
            coupling_ghz: p.coupling_ghz.unwrap_or(ghz(wp.coupling)),
            qubit_ghz: p.qubit_ghz.unwrap_or(ghz(wp.qubit_frequency)),
            eta: p.eta.unwrap_or(0.0),
        };
        let n = file.noise;
        let noise = Noise {
            sigma_detuning: n.sigma_detuning.unwrap_or(0.1),
            sigma_rabi: n.sigma_rabi.unwrap_or(0.1),
            scale: n.scale.unwrap_or(ScaleName::Relative),
        };
        let g = file.gate;
        let gate = Gate {
            kind: over.gate_kind.or(g.kind).unwrap_or(GateKind::Not),
            gamma: g.gamma.unwrap_or(std::f64::consts::FRAC_PI_2),
            xi: g.xi.unwrap_or(std::f64::consts::FRAC_PI_2),
            eta: g.eta.unwrap_or(0.0),
        };
        let f = file.fidelity;
        let fidelity = Fidelity {
            mode: over.fidelity_mode.or(f.mode).unwrap_or(FidelityMode::Fig4),
            samples: f.samples.unwrap_or(DEFAULT_SAMPLES),
            grid_points: f.grid_points.unwrap_or(DEFAULT_GRID_POINTS),
            xi_min: f.xi_min.unwrap_or(XI_TRIM),
            xi_max: f.xi_max.unwrap_or(std::f64::consts::FRAC_PI_2 - XI_TRIM),
        };
        let t = file.two_qubit;
        let two_qubit = TwoQubit {
            sigmas: t.sigmas.unwrap_or_else(|| DEFAULT_TWO_QUBIT_SIGMAS.to_vec()),
            samples: t.samples.unwrap_or(DEFAULT_SAMPLES),
            grid_points: t.grid_points.unwrap_or(DEFAULT_GRID_POINTS),
            quadrature_steps: t.quadrature_steps.unwrap_or(DEFAULT_STEPS),
        };
        let o = file.oracle;
        let oracle = Oracle {
            period_ns: o.period_ns.unwrap_or(DEFAULT_PERIOD),
            steps_per_loop: o.steps_per_loop.unwrap_or(DEFAULT_STEPS_PER_LOOP),
            cycles: o.cycles.unwrap_or_else(|| vec![10.0, 20.0, 50.0, 100.0, 200.0]),
            integrator: o.integrator.unwrap_or(IntegratorName::Magnus4),
        };
        let m = file.tomography;
        let tomography = Tomography {
            theta: m.theta.unwrap_or(std::f64::consts::FRAC_PI_2),
            gamma: m.gamma.unwrap_or(std::f64::consts::FRAC_PI_8),
            shots: m.shots.unwrap_or(DEFAULT_SHOTS),
            trials: m.trials.unwrap_or(200),
            tolerance: m.tolerance.unwrap_or(0.05),
        };
        let cfg = Self {
            preset,
            seed: over.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            physics,
            noise,
            berry: Berry {
                quadrature_steps: file.berry.quadrature_steps.unwrap_or(DEFAULT_STEPS),
            },
            gate,
            fidelity,
            two_qubit,
            oracle,
            tomography,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        let finite = [
            self.physics.rabi_ghz,
            self.physics.detuning_ghz,
            self.physics.coupling_ghz,
            self.physics.qubit_ghz,
            self.physics.eta,
            self.noise.sigma_detuning,
            self.noise.sigma_rabi,
            self.gate.gamma,
            self.gate.xi,
            self.gate.eta,
            self.fidelity.xi_min,
            self.fidelity.xi_max,
            self.oracle.period_ns,
            self.tomography.theta,
            self.tomography.gamma,
            self.tomography.tolerance,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("all numeric settings must be finite");
        }
        if self.fidelity.samples == 0 || self.two_qubit.samples == 0 {
            return bad("sample counts must be at least 1");
        }
        if self.fidelity.grid_points < 2 || self.two_qubit.grid_points < 2 {
            return bad("grids need at least 2 points");
        }
        if !(self.fidelity.xi_min < self.fidelity.xi_max) {
            return bad("fidelity.xi_min must be below fidelity.xi_max");
        }
        if self.two_qubit.sigmas.is_empty() {
            return bad("two_qubit.sigmas must be nonempty");
        }
        if self.oracle.cycles.is_empty() {
            return bad("oracle.cycles must be nonempty");
        }
        if self.oracle.cycles.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("oracle.cycles must be strictly increasing");
        }
        if self.tomography.trials == 0 {
            return bad("tomography.trials must be at least 1");
        }
        Ok(())
    }

    pub fn rabi(&self) -> f64 {
        cyclic_to_angular(self.physics.rabi_ghz)
    }

    pub fn detuning(&self) -> f64 {
        cyclic_to_angular(self.physics.detuning_ghz)
    }

    pub fn coupling(&self) -> f64 {
        cyclic_to_angular(self.physics.coupling_ghz)
    }

    pub fn qubit_frequency(&self) -> f64 {
        cyclic_to_angular(self.physics.qubit_ghz)
    }

    /// Noise widths in internal units; absolute widths are given in GHz.
    pub fn noise_spec(&self, sigma_detuning: f64, sigma_rabi: f64) -> geophase_core::Result<NoiseSpec> {
        let (scale, k) = match self.noise.scale {
            ScaleName::Relative => (NoiseScale::Relative, 1.0),
            ScaleName::Absolute => (NoiseScale::Absolute, cyclic_to_angular(1.0)),
        };
        NoiseSpec::with_scale(sigma_detuning * k, sigma_rabi * k, scale, self.seed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration always serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_preset() {
        let cfg = RunConfig::resolve(ConfigFile::default(), Overrides::default()).unwrap();
        assert!((cfg.physics.rabi_ghz - 0.3).abs() < 1e-15);
        assert!((cfg.physics.coupling_ghz - 0.15).abs() < 1e-15);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.two_qubit.sigmas, vec![0.02, 0.04, 0.06, 0.08, 0.10]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(parse("sed = 3"), Err(CliError::Config(_))));
        assert!(matches!(parse("[noise]\nsigma = 0.1"), Err(CliError::Config(_))));
    }

    #[test]
    fn overrides_win() {
        let file = parse("seed = 5\n[fidelity]\nmode = \"fig2\"\n").unwrap();
        let cfg = RunConfig::resolve(
            file,
            Overrides {
                seed: Some(9),
                fidelity_mode: Some(FidelityMode::Smoke),
                ..Overrides::default()
            },
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.fidelity.mode, FidelityMode::Smoke);
    }

    #[test]
    fn bad_values_rejected() {
        for text in [
            "[fidelity]\nsamples = 0",
            "[oracle]\ncycles = [200.0, 10.0]",
            "[fidelity]\nxi_min = 1.0\nxi_max = 0.5",
            "preset = \"nope\"",
        ] {
            let file = parse(text).unwrap();
            assert!(RunConfig::resolve(file, Overrides::default()).is_err(), "{text}");
        }
    }

    #[test]
    fn absolute_noise_converts_from_ghz() {
        let file = parse("[noise]\nscale = \"absolute\"").unwrap();
        let cfg = RunConfig::resolve(file, Overrides::default()).unwrap();
        let spec = cfg.noise_spec(0.01, 0.0).unwrap();
        assert!((spec.sigma_detuning - cyclic_to_angular(0.01)).abs() < 1e-15);
        assert_eq!(spec.scale, NoiseScale::Absolute);
    }
}
