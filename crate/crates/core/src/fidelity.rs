//! Monte Carlo average fidelity and the sweep tables.
//!
//! The average fidelity of a noisy gate on input `|ψ⟩` is the sample mean of
//! `|⟨ψ|U†Ũ|ψ⟩|²` over independent noise draws `Ũ`.
//!
//! Sweeps are split into columns, one per gate configuration (a mixing angle
//! for single-qubit sweeps, a noise width for two-qubit sweeps). Each column
//! draws its noisy gates once from its own RNG stream and evaluates every
//! input state against the same draws. Columns are independent, so a caller
//! may evaluate them in any order or in parallel and [`assemble`] them into
//! identical tables.
//!
//! [`assemble`]: SingleSweep::assemble

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::fmath;
use crate::gates::{
    controlled_gate_with, two_loop_gate, ControlledGate, TargetPhaseQuadrature, TwoQubitParams,
};
use crate::noise::{noisy_controlled_gate, noisy_single_gate, stream_rng, NoiseScale, NoiseSpec};
use crate::qmath::{bloch_to_state, tensor_state, Ket, StateVec2, StateVec4, Unitary, Unitary2, Unitary4};
use crate::quadrature::DEFAULT_STEPS;
use crate::{Error, Result};

/// Points per axis in the default grids.
pub const DEFAULT_GRID_POINTS: usize = 51;
/// Monte Carlo draws per point by default.
pub const DEFAULT_SAMPLES: usize = 10_000;
/// Trim applied to both ends of the default mixing-angle grid.
pub const XI_TRIM: f64 = 0.02;
/// Noise widths of the default two-qubit sweep.
pub const DEFAULT_TWO_QUBIT_SIGMAS: [f64; 5] = [0.02, 0.04, 0.06, 0.08, 0.10];

/// `|⟨ψ|U†Ũ|ψ⟩|²`, clamped to [0, 1].
pub fn shot_fidelity<const N: usize>(
    ideal: &Unitary<N>,
    noisy: &Unitary<N>,
    input: &Ket<N>,
) -> f64 {
    ideal
        .apply(input)
        .fidelity(&noisy.apply(input))
        .clamp(0.0, 1.0)
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn finish(&self) -> Estimate {
        let std_error = if self.n > 1 {
            fmath::sqrt(self.m2 / (self.n - 1) as f64 / self.n as f64)
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            std_error,
            samples: self.n,
        }
    }
}

/// An ideal gate together with a way of drawing noisy realisations of it.
pub trait NoisyGateModel<const N: usize> {
    fn ideal(&self) -> &Unitary<N>;
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Unitary<N>>;
}

/// The two-loop cone gate under quasi-static `(ν, Δω)` noise.
#[derive(Debug, Clone)]
pub struct SingleQubitModel {
    pub rabi: f64,
    pub detuning: f64,
    pub eta: f64,
    pub noise: NoiseSpec,
    ideal: Unitary2,
}

impl SingleQubitModel {
    pub fn new(rabi: f64, detuning: f64, eta: f64, noise: NoiseSpec) -> Result<Self> {
        let ideal = two_loop_gate(rabi, detuning, eta)?;
        Ok(Self {
            rabi,
            detuning,
            eta,
            noise,
            ideal,
        })
    }

    /// Realises mixing angle `ξ` by holding `Δω` and setting `ν = Δω·tan ξ`.
    pub fn from_xi(xi: f64, detuning: f64, eta: f64, noise: NoiseSpec) -> Result<Self> {
        if !(0.0..FRAC_PI_2).contains(&xi) {
            return Err(Error::Domain("mixing angle must lie in [0, π/2) for a cone sweep"));
        }
        if !(detuning > 0.0) {
            return Err(Error::Domain("cone sweep needs a positive nominal detuning"));
        }
        Self::new(detuning * libm::tan(xi), detuning, eta, noise)
    }
}

impl NoisyGateModel<2> for SingleQubitModel {
    fn ideal(&self) -> &Unitary2 {
        &self.ideal
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Unitary2> {
        noisy_single_gate(self.rabi, self.detuning, self.eta, &self.noise, rng)
    }
}

/// The controlled gate under detuning-only noise, in the control σy basis.
#[derive(Debug, Clone)]
pub struct ControlledModel {
    pub params: TwoQubitParams,
    pub noise: NoiseSpec,
    quad: TargetPhaseQuadrature,
    ideal: ControlledGate,
}

impl ControlledModel {
    pub fn new(params: TwoQubitParams, noise: NoiseSpec) -> Result<Self> {
        Self::with_steps(params, noise, DEFAULT_STEPS)
    }

    pub fn with_steps(params: TwoQubitParams, noise: NoiseSpec, steps: usize) -> Result<Self> {
        let quad = TargetPhaseQuadrature::new(steps)?;
        let ideal = controlled_gate_with(&params, &quad)?;
        Ok(Self {
            params,
            noise,
            quad,
            ideal,
        })
    }

    pub fn gate(&self) -> &ControlledGate {
        &self.ideal
    }
}

impl NoisyGateModel<4> for ControlledModel {
    fn ideal(&self) -> &Unitary4 {
        self.ideal.unitary()
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Unitary4> {
        Ok(*noisy_controlled_gate(&self.params, &self.noise, &self.quad, rng)?.unitary())
    }
}

/// Average fidelity of `model` on one input over `samples` draws.
pub fn average_fidelity<M, R, const N: usize>(
    model: &M,
    input: &Ket<N>,
    samples: usize,
    rng: &mut R,
) -> Result<Estimate>
where
    M: NoisyGateModel<N>,
    R: Rng + ?Sized,
{
    Ok(average_fidelity_many(model, core::slice::from_ref(input), samples, rng)?[0])
}

/// Average fidelities of `model` on several inputs, all evaluated against
/// the same `samples` noise draws.
pub fn average_fidelity_many<M, R, const N: usize>(
    model: &M,
    inputs: &[Ket<N>],
    samples: usize,
    rng: &mut R,
) -> Result<Vec<Estimate>>
where
    M: NoisyGateModel<N>,
    R: Rng + ?Sized,
{
    if samples == 0 {
        return Err(Error::Domain("sample count must be at least 1"));
    }
    let ideal = model.ideal();
    let targets: Vec<Ket<N>> = inputs.iter().map(|k| ideal.apply(k)).collect();
    let mut acc = alloc::vec![Welford::default(); inputs.len()];
    for _ in 0..samples {
        let noisy = model.draw(rng)?;
        for ((input, target), a) in inputs.iter().zip(&targets).zip(acc.iter_mut()) {
            a.push(target.fidelity(&noisy.apply(input)).clamp(0.0, 1.0));
        }
    }
    Ok(acc.iter().map(Welford::finish).collect())
}

/// `n` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![start],
        _ => {
            let h = (end - start) / (n - 1) as f64;
            (0..n)
                .map(|k| if k == n - 1 { end } else { start + k as f64 * h })
                .collect()
        }
    }
}

/// Which input coordinate a single-qubit sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputAxis {
    /// θᵢ varies over [0, π] with φᵢ = 0.
    Theta,
    /// φᵢ varies over [0, 2π] with θᵢ = π/2.
    Phi,
}

impl InputAxis {
    pub fn name(self) -> &'static str {
        match self {
            InputAxis::Theta => "theta_in",
            InputAxis::Phi => "phi_in",
        }
    }

    pub fn default_grid(self) -> Vec<f64> {
        match self {
            InputAxis::Theta => linspace(0.0, PI, DEFAULT_GRID_POINTS),
            InputAxis::Phi => linspace(0.0, 2.0 * PI, DEFAULT_GRID_POINTS),
        }
    }

    /// The input state at coordinate `value`.
    pub fn state(self, value: f64) -> Result<StateVec2> {
        match self {
            InputAxis::Theta => bloch_to_state(value, 0.0),
            InputAxis::Phi => bloch_to_state(FRAC_PI_2, value),
        }
    }
}

/// Default mixing-angle grid `[0.02, π/2 − 0.02]`.
pub fn default_xi_grid() -> Vec<f64> {
    linspace(XI_TRIM, FRAC_PI_2 - XI_TRIM, DEFAULT_GRID_POINTS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: &'static str,
    pub values: Vec<f64>,
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityPoint {
    /// Coordinates along the table's two axes.
    pub coords: [f64; 2],
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Settings a table was produced with.
#[derive(Debug, Clone, PartialEq)]
pub struct TableMeta {
    pub seed: u64,
    pub sigma_detuning: f64,
    pub sigma_rabi: f64,
    pub scale: NoiseScale,
    pub samples: usize,
    /// Nominal parameters held fixed across the grid.
    pub fixed: Vec<(&'static str, f64)>,
}

/// Row-major grid: the first axis is the outer (row) index.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTable {
    pub axes: [Axis; 2],
    pub points: Vec<FidelityPoint>,
    pub meta: TableMeta,
}

impl FidelityTable {
    pub fn point(&self, row: usize, col: usize) -> &FidelityPoint {
        &self.points[row * self.axes[1].values.len() + col]
    }

    pub fn min(&self) -> Option<&FidelityPoint> {
        self.points.iter().min_by(|a, b| a.mean.total_cmp(&b.mean))
    }

    pub fn max(&self) -> Option<&FidelityPoint> {
        self.points.iter().max_by(|a, b| a.mean.total_cmp(&b.mean))
    }

    pub fn is_consistent(&self) -> bool {
        self.points.len() == self.axes[0].values.len() * self.axes[1].values.len()
    }
}

fn assemble_columns(
    axes: [Axis; 2],
    columns: Vec<Vec<Estimate>>,
    meta: TableMeta,
) -> Result<FidelityTable> {
    let (rows, cols) = (axes[0].values.len(), axes[1].values.len());
    if columns.len() != cols || columns.iter().any(|c| c.len() != rows) {
        return Err(Error::Domain("column results do not match the sweep grid"));
    }
    let mut points = Vec::with_capacity(rows * cols);
    for (r, &rv) in axes[0].values.iter().enumerate() {
        for (c, &cv) in axes[1].values.iter().enumerate() {
            let e = columns[c][r];
            points.push(FidelityPoint {
                coords: [rv, cv],
                mean: e.mean,
                std_error: e.std_error,
                samples: e.samples,
            });
        }
    }
    Ok(FidelityTable { axes, points, meta })
}

/// Single-qubit sweep over an input coordinate (rows) and the mixing angle
/// (columns).
#[derive(Debug, Clone)]
pub struct SingleSweep {
    pub input_axis: InputAxis,
    pub inputs: Vec<f64>,
    pub xis: Vec<f64>,
    pub detuning: f64,
    pub eta: f64,
    pub noise: NoiseSpec,
    pub samples: usize,
}

impl SingleSweep {
    /// Sweep on the default grids.
    pub fn with_defaults(input_axis: InputAxis, detuning: f64, noise: NoiseSpec) -> Self {
        Self {
            input_axis,
            inputs: input_axis.default_grid(),
            xis: default_xi_grid(),
            detuning,
            eta: 0.0,
            noise,
            samples: DEFAULT_SAMPLES,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() || self.xis.is_empty() {
            return Err(Error::Domain("sweep grids must be nonempty"));
        }
        if self.samples == 0 {
            return Err(Error::Domain("sample count must be at least 1"));
        }
        Ok(())
    }

    pub fn columns(&self) -> usize {
        self.xis.len()
    }

    /// Estimates for every input at mixing angle `xis[col]`, drawn from
    /// stream `col`.
    pub fn column(&self, col: usize) -> Result<Vec<Estimate>> {
        self.validate()?;
        let model = SingleQubitModel::from_xi(self.xis[col], self.detuning, self.eta, self.noise)?;
        let inputs = self
            .inputs
            .iter()
            .map(|&v| self.input_axis.state(v))
            .collect::<Result<Vec<_>>>()?;
        let mut rng = stream_rng(self.noise.seed, col as u64);
        average_fidelity_many(&model, &inputs, self.samples, &mut rng)
    }

    pub fn assemble(&self, columns: Vec<Vec<Estimate>>) -> Result<FidelityTable> {
        self.validate()?;
        let fixed_input = match self.input_axis {
            InputAxis::Theta => ("phi_in", 0.0),
            InputAxis::Phi => ("theta_in", FRAC_PI_2),
        };
        assemble_columns(
            [
                Axis {
                    name: self.input_axis.name(),
                    values: self.inputs.clone(),
                },
                Axis {
                    name: "xi",
                    values: self.xis.clone(),
                },
            ],
            columns,
            TableMeta {
                seed: self.noise.seed,
                sigma_detuning: self.noise.sigma_detuning,
                sigma_rabi: self.noise.sigma_rabi,
                scale: self.noise.scale,
                samples: self.samples,
                fixed: alloc::vec![("detuning", self.detuning), ("eta", self.eta), fixed_input],
            },
        )
    }

    /// Serial evaluation of every column.
    pub fn run(&self) -> Result<FidelityTable> {
        let cols = (0..self.columns())
            .map(|c| self.column(c))
            .collect::<Result<Vec<_>>>()?;
        self.assemble(cols)
    }
}

/// Single-qubit sweep with explicit grids.
pub fn sweep_single(
    input_axis: InputAxis,
    inputs: &[f64],
    xis: &[f64],
    detuning: f64,
    noise: NoiseSpec,
    samples: usize,
) -> Result<FidelityTable> {
    SingleSweep {
        input_axis,
        inputs: inputs.to_vec(),
        xis: xis.to_vec(),
        detuning,
        eta: 0.0,
        noise,
        samples,
    }
    .run()
}

/// Control input `cos(θ/2)|+⟩ + sin(θ/2)|−⟩` with the target in `|0⟩`,
/// in the control σy basis.
pub fn two_qubit_input(theta: f64) -> Result<StateVec4> {
    Ok(tensor_state(&bloch_to_state(theta, 0.0)?, &Ket::basis(0)))
}

/// Two-qubit sweep over the control input angle (rows) and the detuning
/// noise width (columns).
#[derive(Debug, Clone)]
pub struct TwoQubitSweep {
    pub thetas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub params: TwoQubitParams,
    pub seed: u64,
    pub samples: usize,
    pub quadrature_steps: usize,
}

impl TwoQubitSweep {
    pub fn with_defaults(params: TwoQubitParams, seed: u64) -> Self {
        Self {
            thetas: linspace(0.0, PI, DEFAULT_GRID_POINTS),
            sigmas: DEFAULT_TWO_QUBIT_SIGMAS.to_vec(),
            params,
            seed,
            samples: DEFAULT_SAMPLES,
            quadrature_steps: DEFAULT_STEPS,
        }
    }

    pub fn columns(&self) -> usize {
        self.sigmas.len()
    }

    pub fn column(&self, col: usize) -> Result<Vec<Estimate>> {
        if self.thetas.is_empty() || self.sigmas.is_empty() {
            return Err(Error::Domain("sweep grids must be nonempty"));
        }
        let noise = NoiseSpec::new(self.sigmas[col], 0.0, self.seed)?;
        let model = ControlledModel::with_steps(self.params, noise, self.quadrature_steps)?;
        let inputs = self
            .thetas
            .iter()
            .map(|&t| two_qubit_input(t))
            .collect::<Result<Vec<_>>>()?;
        let mut rng = stream_rng(self.seed, col as u64);
        average_fidelity_many(&model, &inputs, self.samples, &mut rng)
    }

    pub fn assemble(&self, columns: Vec<Vec<Estimate>>) -> Result<FidelityTable> {
        if self.thetas.is_empty() || self.sigmas.is_empty() {
            return Err(Error::Domain("sweep grids must be nonempty"));
        }
        let max_sigma = self.sigmas.iter().copied().fold(0.0, f64::max);
        assemble_columns(
            [
                Axis {
                    name: "theta_in",
                    values: self.thetas.clone(),
                },
                Axis {
                    name: "sigma_detuning",
                    values: self.sigmas.clone(),
                },
            ],
            columns,
            TableMeta {
                seed: self.seed,
                sigma_detuning: max_sigma,
                sigma_rabi: 0.0,
                scale: NoiseScale::Relative,
                samples: self.samples,
                fixed: alloc::vec![
                    ("rabi", self.params.rabi),
                    ("detuning", self.params.detuning),
                    ("coupling", self.params.coupling),
                    ("eta", crate::gates::CONTROLLED_ETA),
                ],
            },
        )
    }

    pub fn run(&self) -> Result<FidelityTable> {
        let cols = (0..self.columns())
            .map(|c| self.column(c))
            .collect::<Result<Vec<_>>>()?;
        self.assemble(cols)
    }
}

pub fn sweep_two_qubit(
    thetas: &[f64],
    sigmas: &[f64],
    params: TwoQubitParams,
    seed: u64,
    samples: usize,
) -> Result<FidelityTable> {
    TwoQubitSweep {
        thetas: thetas.to_vec(),
        sigmas: sigmas.to_vec(),
        params,
        seed,
        samples,
        quadrature_steps: DEFAULT_STEPS,
    }
    .run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{gate_matrix, ControlBranch};
    use crate::noise::gaussian_perturb;

    const W: f64 = 2.0 * PI * 0.3;

    #[test]
    fn shot_fidelity_examples() {
        let u = two_loop_gate(W, 0.5 * W, 0.2).unwrap();
        let psi = bloch_to_state(0.7, 1.9).unwrap();
        assert!((shot_fidelity(&u, &u, &psi) - 1.0).abs() < 1e-14);
        let neg = u.scale(crate::C64::new(-1.0, 0.0));
        assert!((shot_fidelity(&u, &neg, &psi) - 1.0).abs() < 1e-14);
        let f = shot_fidelity(&Unitary2::identity(), &Unitary2::pauli_x(), &Ket::basis(0));
        assert_eq!(f, 0.0);
    }

    #[test]
    fn noiseless_average_is_exactly_one() {
        let model = SingleQubitModel::new(W, W, 0.0, NoiseSpec::noiseless(1)).unwrap();
        let mut rng = stream_rng(1, 0);
        let e = average_fidelity(&model, &bloch_to_state(1.0, 2.0).unwrap(), 500, &mut rng)
            .unwrap();
        assert!((e.mean - 1.0).abs() < 1e-14);
        assert!(e.std_error < 1e-7);
        assert_eq!(e.samples, 500);
    }

    #[test]
    fn zero_samples_rejected() {
        let model = SingleQubitModel::new(W, W, 0.0, NoiseSpec::noiseless(1)).unwrap();
        let mut rng = stream_rng(1, 0);
        assert!(average_fidelity(&model, &Ket::basis(0), 0, &mut rng).is_err());
    }

    #[test]
    fn eigenstate_input_beats_orthogonal_tilt() {
        let noise = NoiseSpec::new(0.1, 0.1, 11).unwrap();
        for xi in [0.3, 0.7, 1.1] {
            let model = SingleQubitModel::from_xi(xi, W, 0.0, noise).unwrap();
            let inputs = [
                bloch_to_state(xi, 0.0).unwrap(),
                bloch_to_state(xi + FRAC_PI_2, 0.0).unwrap(),
            ];
            let mut rng = stream_rng(11, 0);
            let e = average_fidelity_many(&model, &inputs, 4000, &mut rng).unwrap();
            assert!(e[0].mean >= e[1].mean, "ξ = {xi}: {e:?}");
        }
    }

    #[test]
    fn std_error_bound_and_scaling() {
        let noise = NoiseSpec::new(0.1, 0.1, 12).unwrap();
        let model = SingleQubitModel::from_xi(0.9, W, 0.0, noise).unwrap();
        let psi = bloch_to_state(FRAC_PI_2, FRAC_PI_2).unwrap();
        let mut errs = Vec::new();
        for n in [100, 1000, 10_000] {
            let mut rng = stream_rng(12, 0);
            let e = average_fidelity(&model, &psi, n, &mut rng).unwrap();
            assert!((0.0..=1.0).contains(&e.mean));
            assert!(e.std_error <= 0.5 / libm::sqrt(n as f64));
            errs.push(e.std_error);
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((2.0..5.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn zero_noise_sweep_is_flat() {
        let t = sweep_single(
            InputAxis::Theta,
            &linspace(0.0, PI, 5),
            &linspace(0.1, 1.4, 4),
            W,
            NoiseSpec::noiseless(3),
            20,
        )
        .unwrap();
        assert!(t.is_consistent());
        assert!(t.points.iter().all(|p| (p.mean - 1.0).abs() < 1e-12));
    }

    #[test]
    fn table_layout_is_row_major() {
        let sweep = SingleSweep {
            input_axis: InputAxis::Phi,
            inputs: linspace(0.0, PI, 3),
            xis: linspace(0.2, 1.2, 4),
            detuning: W,
            eta: 0.0,
            noise: NoiseSpec::new(0.05, 0.05, 4).unwrap(),
            samples: 50,
        };
        let t = sweep.run().unwrap();
        assert_eq!(t.points.len(), 12);
        let p = t.point(2, 1);
        assert_eq!(p.coords, [PI, sweep.xis[1]]);
        let col = sweep.column(1).unwrap();
        assert_eq!(p.mean, col[2].mean);
    }

    #[test]
    fn sweep_validation() {
        let mut sweep = SingleSweep::with_defaults(InputAxis::Theta, W, NoiseSpec::noiseless(0));
        sweep.xis.clear();
        assert!(sweep.run().is_err());
        assert!(SingleQubitModel::from_xi(FRAC_PI_2, W, 0.0, NoiseSpec::noiseless(0)).is_err());
    }

    #[test]
    fn two_qubit_zero_noise_row() {
        let p = TwoQubitParams::new(W, W, 2.0 * PI * 0.15).unwrap();
        let t = sweep_two_qubit(&linspace(0.0, PI, 4), &[0.0, 0.05], p, 5, 200).unwrap();
        for r in 0..4 {
            assert!((t.point(r, 0).mean - 1.0).abs() < 1e-12);
            assert!(t.point(r, 1).mean < 1.0);
        }
    }

    #[test]
    fn two_qubit_plus_control_reduces_to_target_block() {
        // θ = 0 puts the control in |+⟩: only the ξ⁺ block acts, on |0⟩_T.
        let p = TwoQubitParams::new(W, W, 2.0 * PI * 0.15).unwrap();
        let sigma = 0.08;
        let (seed, n) = (21, 2000);
        let t = sweep_two_qubit(&[0.0], &[sigma], p, seed, n).unwrap();

        let quad = TargetPhaseQuadrature::new(DEFAULT_STEPS).unwrap();
        let gamma = 2.0 * quad.phase(&p, ControlBranch::Plus).unwrap();
        let ideal = gate_matrix(gamma, p.mixing_angle(ControlBranch::Plus), FRAC_PI_2);
        let target = ideal.apply(&Ket::basis(0));
        let mut rng = stream_rng(seed, 0);
        let mut sum = 0.0;
        for _ in 0..n {
            let dw = gaussian_perturb(p.detuning, sigma, &mut rng);
            assert!(dw > 0.0);
            let q = TwoQubitParams { detuning: dw, ..p };
            let g = 2.0 * quad.phase(&q, ControlBranch::Plus).unwrap();
            let u = gate_matrix(g, q.mixing_angle(ControlBranch::Plus), FRAC_PI_2);
            sum += target.fidelity(&u.apply(&Ket::basis(0)));
        }
        let reduced = sum / n as f64;
        assert!((t.point(0, 0).mean - reduced).abs() < 1e-12);
    }

    #[test]
    fn trivial_gate_limits_are_near_unity() {
        let noise = NoiseSpec::new(0.1, 0.1, 13).unwrap();
        for ratio in [1e-3, 1e3] {
            let model = SingleQubitModel::new(ratio * W, W, 0.0, noise).unwrap();
            let inputs: Vec<_> = linspace(0.0, PI, 7)
                .into_iter()
                .map(|t| bloch_to_state(t, 0.0).unwrap())
                .chain(linspace(0.0, 2.0 * PI, 7).into_iter().map(|p| bloch_to_state(FRAC_PI_2, p).unwrap()))
                .collect();
            let mut rng = stream_rng(13, 0);
            for e in average_fidelity_many(&model, &inputs, 2000, &mut rng).unwrap() {
                assert!(e.mean > 0.999, "ratio {ratio}: {}", e.mean);
            }
        }
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.02, FRAC_PI_2 - 0.02, 51);
        assert_eq!(v.len(), 51);
        assert_eq!(v[0], 0.02);
        assert_eq!(v[50], FRAC_PI_2 - 0.02);
        assert_eq!(linspace(1.0, 2.0, 1), alloc::vec![1.0]);
        assert!(linspace(1.0, 2.0, 0).is_empty());
    }
}
