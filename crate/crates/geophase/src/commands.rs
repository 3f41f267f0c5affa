//! One function per subcommand. Each writes its files under the output
//! directory and returns the lines to print.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use geophase_core::fidelity::{linspace, FidelityTable, InputAxis, SingleSweep, TwoQubitSweep};
use geophase_core::fieldpath::{cone_berry_phase, cone_path, gate_loop, solid_angle, two_loop, LoopSequence};
use geophase_core::gates::{
    controlled_gate, single_qubit_gate, two_loop_gate, two_qubit_phase_with_steps, ControlBranch,
    GateParams, TwoQubitParams,
};
use geophase_core::noise::stream_rng;
use geophase_core::oracle::{
    convergence_row, dynamic_phase, evolve_with, period_for_cycles, upper_eigenstate, Branch,
    EvolutionResult,
};
use geophase_core::physparams::{
    barrier_height, josephson_inductance, plasma_frequency, preset, WorkingPoint,
};
use geophase_core::qmath::{wrap_angle, Unitary};
use geophase_core::tomography::{initial_state, ideal_final_state, repeat_tomography, run_tomography};
use geophase_core::{qmath::state_to_density, Density2, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{FidelityMode, GateKind, RunConfig};
use crate::output::{num, write_csv, write_json, write_table};
use crate::CliError;

/// Grid and sample count of the noise-free smoke run.
pub const SMOKE_GRID: usize = 11;
pub const SMOKE_SAMPLES: usize = 100;

pub struct Context {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub workers: usize,
}

#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
    /// Machine-readable headline values.
    pub summary: Value,
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// Evaluates `f(0..n)` on a pool of `workers` threads, keeping order.
    fn par_map<T, F>(&self, n: usize, f: F) -> Result<Vec<T>, CliError>
    where
        T: Send,
        F: Fn(usize) -> geophase_core::Result<T> + Sync + Send,
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| CliError::Io(format!("starting worker pool: {e}")))?;
        let out = pool.install(|| (0..n).into_par_iter().map(&f).collect::<Vec<_>>());
        out.into_iter().map(|r| r.map_err(CliError::from)).collect()
    }
}

pub fn berry(ctx: &Context) -> Result<Report, CliError> {
    let cfg = &ctx.cfg;
    let (nu, dw) = (cfg.rabi(), cfg.detuning());
    let steps = cfg.berry.quadrature_steps;
    let path = cone_path(nu, dw, cfg.physics.eta, 1.0)?;
    let quadrature = solid_angle(&path, steps)? / 2.0;
    let closed = cone_berry_phase(nu, dw)?;
    let mut lines = vec![
        format!("cone Berry phase (closed form): {closed:.12} rad"),
        format!("half solid angle (quadrature, {steps} steps): {quadrature:.12} rad"),
        format!("difference: {:.3e}", (quadrature - closed).abs()),
    ];
    let mut body = json!({
        "rabi": nu, "detuning": dw, "closed_form": closed,
        "quadrature": quadrature, "difference": (quadrature - closed).abs(),
    });
    if cfg.physics.coupling_ghz > 0.0 {
        let p = TwoQubitParams::new(nu, dw, cfg.coupling())?;
        let plus = two_qubit_phase_with_steps(&p, ControlBranch::Plus, steps)?;
        let minus = two_qubit_phase_with_steps(&p, ControlBranch::Minus, steps)?;
        lines.push(format!("target loop phase, control |+>: {plus:.12} rad"));
        lines.push(format!("target loop phase, control |->: {minus:.12} rad"));
        body["target_phase_plus"] = json!(plus);
        body["target_phase_minus"] = json!(minus);
    }
    let file = write_json(&ctx.path("berry.json"), cfg, "berry", body.clone())?;
    Ok(Report {
        lines,
        files: vec![file],
        summary: body,
    })
}

fn fmt_real(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Compact complex formatting: `0`, `i`, `-0.707107i`, `0.5+0.5i`.
pub fn fmt_complex(z: C64) -> String {
    let clean = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
    let (re, im) = (clean(z.re), clean(z.im));
    let imag = |v: f64| match fmt_real(v).as_str() {
        "1" => "i".to_string(),
        "-1" => "-i".to_string(),
        s => format!("{s}i"),
    };
    match (re == 0.0, im == 0.0) {
        (_, true) => fmt_real(re),
        (true, false) => imag(im),
        (false, false) => {
            let i = imag(im);
            let sep = if i.starts_with('-') { "" } else { "+" };
            format!("{}{sep}{i}", fmt_real(re))
        }
    }
}

pub fn fmt_matrix<const N: usize>(u: &Unitary<N>) -> String {
    let rows: Vec<String> = u
        .entries()
        .iter()
        .map(|r| format!("[{}]", r.iter().map(|&z| fmt_complex(z)).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn matrix_json<const N: usize>(u: &Unitary<N>) -> Value {
    json!({
        "re": u.entries().iter().map(|r| r.iter().map(|z| z.re).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "im": u.entries().iter().map(|r| r.iter().map(|z| z.im).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn gate(ctx: &Context) -> Result<Report, CliError> {
    let cfg = &ctx.cfg;
    let g = &cfg.gate;
    let mut lines = Vec::new();
    let body = match g.kind {
        GateKind::Not | GateKind::Hadamard | GateKind::Custom | GateKind::TwoLoop => {
            let params = match g.kind {
                GateKind::Not => GateParams::not_type(),
                GateKind::Hadamard => GateParams::hadamard_type(),
                GateKind::Custom => GateParams::new(g.gamma, g.xi, g.eta)?,
                _ => GateParams::two_loop(cfg.rabi(), cfg.detuning(), cfg.physics.eta)?,
            };
            let u = if g.kind == GateKind::TwoLoop {
                two_loop_gate(cfg.rabi(), cfg.detuning(), cfg.physics.eta)?
            } else {
                single_qubit_gate(&params)
            };
            lines.push(format!(
                "gate exp(i*gamma*n.sigma): gamma={} xi={} eta={}",
                params.gamma, params.xi, params.eta
            ));
            lines.push(format!("U = {}", fmt_matrix(&u)));
            lines.push(format!("unitarity defect: {:.3e}", u.unitarity_defect()));
            lines.push(format!("det: {}", fmt_complex(u.det())));
            json!({
                "kind": g.kind, "gamma": params.gamma, "xi": params.xi, "eta": params.eta,
                "matrix": matrix_json(&u), "unitarity_defect": u.unitarity_defect(),
            })
        }
        GateKind::Controlled => {
            let p = TwoQubitParams::new(cfg.rabi(), cfg.detuning(), cfg.coupling())?;
            let c = controlled_gate(&p)?;
            let comp = c.to_computational_basis();
            let plus = c.block(ControlBranch::Plus);
            let minus = c.block(ControlBranch::Minus);
            lines.push(
                "basis: |+>|0>, |+>|1>, |->|0>, |->|1> with |+-> = (|0> +- i|1>)/sqrt(2) on the control"
                    .into(),
            );
            lines.push(format!(
                "gamma={} xi_plus={} xi_minus={} eta=pi/2",
                c.gamma(),
                c.xi_plus(),
                c.xi_minus()
            ));
            lines.push(format!("control |+> block: {}", fmt_matrix(&plus)));
            lines.push(format!("control |-> block: {}", fmt_matrix(&minus)));
            lines.push(format!("U (control sigma_y basis) = {}", fmt_matrix(c.unitary())));
            lines.push(format!("U (computational basis) = {}", fmt_matrix(&comp)));
            lines.push(format!("unitarity defect: {:.3e}", c.unitary().unitarity_defect()));
            json!({
                "kind": g.kind, "gamma": c.gamma(), "xi_plus": c.xi_plus(), "xi_minus": c.xi_minus(),
                "basis": ["|+>|0>", "|+>|1>", "|->|0>", "|->|1>"],
                "block_plus": matrix_json(&plus), "block_minus": matrix_json(&minus),
                "matrix": matrix_json(c.unitary()), "computational": matrix_json(&comp),
                "unitarity_defect": c.unitary().unitarity_defect(),
            })
        }
    };
    let file = write_json(&ctx.path("gate.json"), cfg, "gate", body.clone())?;
    Ok(Report {
        lines,
        files: vec![file],
        summary: body,
    })
}

fn mode_name(mode: FidelityMode) -> &'static str {
    match mode {
        FidelityMode::Fig2 => "fig2",
        FidelityMode::Fig3 => "fig3",
        FidelityMode::Fig4 => "fig4",
        FidelityMode::Fig5 => "fig5",
        FidelityMode::Smoke => "smoke",
    }
}

fn axis_label(axis: InputAxis) -> &'static str {
    match axis {
        InputAxis::Theta => "theta",
        InputAxis::Phi => "phi",
    }
}

fn table_extremes(tables: &[FidelityTable]) -> (f64, f64) {
    let pts = tables.iter().flat_map(|t| t.points.iter());
    pts.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.mean), hi.max(p.mean))
    })
}

/// Runs the single-qubit sweeps for `mode` over both input axes.
pub fn single_sweeps(ctx: &Context, mode: FidelityMode) -> Result<Vec<(InputAxis, FidelityTable)>, CliError> {
    let cfg = &ctx.cfg;
    let f = &cfg.fidelity;
    let (s0, s1, grid, samples) = match mode {
        FidelityMode::Fig2 => (cfg.noise.sigma_detuning, 0.0, f.grid_points, f.samples),
        FidelityMode::Fig3 => (0.0, cfg.noise.sigma_rabi, f.grid_points, f.samples),
        FidelityMode::Fig4 => (cfg.noise.sigma_detuning, cfg.noise.sigma_rabi, f.grid_points, f.samples),
        FidelityMode::Smoke => (0.0, 0.0, SMOKE_GRID, SMOKE_SAMPLES),
        FidelityMode::Fig5 => unreachable!("two-qubit mode has no single-qubit sweep"),
    };
    let noise = cfg.noise_spec(s0, s1)?;
    let mut out = Vec::new();
    for axis in [InputAxis::Theta, InputAxis::Phi] {
        let end = match axis {
            InputAxis::Theta => PI,
            InputAxis::Phi => 2.0 * PI,
        };
        let sweep = SingleSweep {
            input_axis: axis,
            inputs: linspace(0.0, end, grid),
            xis: linspace(f.xi_min, f.xi_max, grid),
            detuning: cfg.detuning(),
            eta: cfg.physics.eta,
            noise,
            samples,
        };
        let cols = ctx.par_map(sweep.columns(), |c| sweep.column(c))?;
        out.push((axis, sweep.assemble(cols)?));
    }
    Ok(out)
}

pub fn fidelity(ctx: &Context) -> Result<Report, CliError> {
    let mode = ctx.cfg.fidelity.mode;
    if mode == FidelityMode::Fig5 {
        return two_qubit(ctx);
    }
    let name = mode_name(mode);
    let tables = single_sweeps(ctx, mode)?;
    let mut files = Vec::new();
    let mut lines = Vec::new();
    for (axis, t) in &tables {
        files.push(write_table(
            &ctx.path(&format!("fidelity_{name}_{}.csv", axis_label(*axis))),
            &ctx.cfg,
            t,
        )?);
        let (lo, hi) = table_extremes(std::slice::from_ref(t));
        let m = &t.meta;
        lines.push(format!(
            "{name} {} sweep (sigma_detuning={} sigma_rabi={}): min {lo:.6} max {hi:.6}",
            axis_label(*axis),
            m.sigma_detuning,
            m.sigma_rabi
        ));
    }
    let plain: Vec<FidelityTable> = tables.iter().map(|(_, t)| t.clone()).collect();
    let (lo, hi) = table_extremes(&plain);
    lines.push(format!("{name} summary: min {lo:.6} max {hi:.6}"));
    let body = json!({
        "mode": name,
        "min": lo,
        "max": hi,
        "sigma_detuning": plain[0].meta.sigma_detuning,
        "sigma_rabi": plain[0].meta.sigma_rabi,
        "files": files.iter().map(|p| file_name(p)).collect::<Vec<_>>(),
    });
    files.push(write_json(&ctx.path(&format!("fidelity_{name}.json")), &ctx.cfg, "fidelity", body.clone())?);
    Ok(Report {
        lines,
        files,
        summary: body,
    })
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn two_qubit_sweep(ctx: &Context) -> Result<FidelityTable, CliError> {
    let cfg = &ctx.cfg;
    let t = &cfg.two_qubit;
    let sweep = TwoQubitSweep {
        thetas: linspace(0.0, PI, t.grid_points),
        sigmas: t.sigmas.clone(),
        params: TwoQubitParams::new(cfg.rabi(), cfg.detuning(), cfg.coupling())?,
        seed: cfg.seed,
        samples: t.samples,
        quadrature_steps: t.quadrature_steps,
    };
    let cols = ctx.par_map(sweep.columns(), |c| sweep.column(c))?;
    Ok(sweep.assemble(cols)?)
}

pub fn two_qubit(ctx: &Context) -> Result<Report, CliError> {
    let table = two_qubit_sweep(ctx)?;
    let file = write_table(&ctx.path("two_qubit.csv"), &ctx.cfg, &table)?;
    let (lo, hi) = table_extremes(std::slice::from_ref(&table));
    let mut lines = Vec::new();
    let rows = table.axes[0].values.len();
    for (c, s) in table.axes[1].values.iter().enumerate() {
        let col_min = (0..rows).map(|r| table.point(r, c).mean).fold(f64::INFINITY, f64::min);
        lines.push(format!("sigma_detuning={s}: min {col_min:.6}"));
    }
    lines.push(format!("two-qubit summary: min {lo:.6} max {hi:.6}"));
    let body = json!({ "min": lo, "max": hi, "files": [file_name(&file)] });
    let json_file = write_json(&ctx.path("two_qubit.json"), &ctx.cfg, "two-qubit", body.clone())?;
    Ok(Report {
        lines,
        files: vec![file, json_file],
        summary: body,
    })
}

fn evolution_json(r: &EvolutionResult, expected: f64) -> Value {
    json!({
        "total_phase": r.total_phase,
        "wrapped_phase": r.wrapped_phase(),
        "expected": wrap_angle(expected),
        "phase_error": wrap_angle(r.total_phase - expected).abs(),
        "survival": r.survival,
        "steps": r.steps,
        "max_unitarity_defect": r.max_unitarity_defect,
    })
}

pub fn oracle(ctx: &Context) -> Result<Report, CliError> {
    let cfg = &ctx.cfg;
    let o = &cfg.oracle;
    let (nu, dw) = (cfg.rabi(), cfg.detuning());
    let integrator = o.integrator.into();
    let gamma = cone_berry_phase(nu, dw)?;
    let path = gate_loop(nu, dw, cfg.physics.eta, o.period_ns)?;
    let psi = upper_eigenstate(path.field(0.0))?;
    let runs = ctx.par_map(2, |k| {
        let seq = if k == 0 { LoopSequence::single(path) } else { two_loop(path) };
        evolve_with(&seq, &psi, o.steps_per_loop, integrator)
    })?;
    let (single, double) = (&runs[0], &runs[1]);
    let dynamic = dynamic_phase(&path, Branch::Plus)?;
    let single_expected = gamma + dynamic;
    let double_expected = 2.0 * gamma;
    let cycles = nu.hypot(dw) * o.period_ns / (2.0 * PI);

    let rows = ctx.par_map(o.cycles.len(), |k| {
        convergence_row(nu, dw, period_for_cycles(nu, dw, o.cycles[k]), o.steps_per_loop)
    })?;
    let mut files = vec![write_csv(
        &ctx.path("oracle_convergence.csv"),
        cfg,
        &[],
        &["period_ns", "cycles", "phase_error", "leakage"],
        rows.iter()
            .map(|r| vec![num(r.period), num(r.cycles), num(r.phase_error), num(r.leakage)]),
    )?];
    files.push(write_csv(
        &ctx.path("oracle_checkpoints.csv"),
        cfg,
        &[],
        &["time_ns", "phase", "survival"],
        double
            .checkpoints
            .iter()
            .map(|c| vec![num(c.time), num(c.phase), num(c.survival)]),
    )?);

    let err2 = wrap_angle(double.total_phase - double_expected).abs();
    let err1 = wrap_angle(single.total_phase - single_expected).abs();
    let mut lines = vec![
        format!("loop period {} ns, |B|tau/2pi = {cycles:.2}", o.period_ns),
        format!("Berry phase per loop: {gamma:.9} rad"),
        format!(
            "single loop: phase {:.6} (expected {:.6} mod 2pi), error {err1:.3e}, leakage {:.3e}",
            single.wrapped_phase(),
            wrap_angle(single_expected),
            1.0 - single.survival
        ),
        format!(
            "two loops: phase {:.6} (expected {:.6}), error {err2:.3e}, leakage {:.3e}",
            double.wrapped_phase(),
            wrap_angle(double_expected),
            1.0 - double.survival
        ),
    ];
    for r in &rows {
        lines.push(format!(
            "cycles {:>8.2}: phase error {:.3e}, leakage {:.3e}",
            r.cycles, r.phase_error, r.leakage
        ));
    }
    let body = json!({
        "berry_phase": gamma,
        "cycles": cycles,
        "single_loop": evolution_json(single, single_expected),
        "two_loop": evolution_json(double, double_expected),
        "convergence": rows.iter().map(|r| json!({
            "period_ns": r.period, "cycles": r.cycles,
            "phase_error": r.phase_error, "leakage": r.leakage,
        })).collect::<Vec<_>>(),
    });
    files.push(write_json(&ctx.path("oracle.json"), cfg, "oracle", body.clone())?);
    Ok(Report {
        lines,
        files,
        summary: body,
    })
}

fn density_rows(label: &str, rho: &Density2) -> Vec<Vec<String>> {
    let m = rho.entries();
    let mut rows = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            rows.push(vec![label.to_string(), i.to_string(), j.to_string(), num(z.re), num(z.im)]);
        }
    }
    rows
}

pub fn tomography(ctx: &Context) -> Result<Report, CliError> {
    let cfg = &ctx.cfg;
    let t = &cfg.tomography;
    let analytic = run_tomography(t.theta, t.gamma, 0, &mut stream_rng(cfg.seed, 0))?;
    let sampled = run_tomography(t.theta, t.gamma, t.shots, &mut stream_rng(cfg.seed, 0))?;
    let stats = repeat_tomography(t.theta, t.gamma, t.shots.max(1), t.trials, t.tolerance, cfg.seed)?;
    let ideal_i = state_to_density(&initial_state(t.theta)?);
    let ideal_f = state_to_density(&ideal_final_state(t.theta, t.gamma)?);

    let mut rows = density_rows("ideal_initial", &ideal_i);
    rows.extend(density_rows("ideal_final", &ideal_f));
    rows.extend(density_rows("measured_initial", &sampled.rho_initial));
    rows.extend(density_rows("measured_final", &sampled.rho_final));
    let mut files = vec![write_csv(
        &ctx.path("tomo_density.csv"),
        cfg,
        &[("shots", t.shots.to_string())],
        &["state", "row", "col", "re", "im"],
        rows,
    )?];
    let target = wrap_angle(4.0 * t.gamma);
    let lines = vec![
        format!("expected relative phase 4*gamma: {target:.6} rad"),
        format!("analytic extraction: {:.12} rad", analytic.extracted_phase),
        format!(
            "{} shots per axis: {:.6} rad (min eigenvalue {:.4})",
            t.shots,
            sampled.extracted_phase,
            sampled.min_eigenvalue()
        ),
        format!(
            "{} trials: {:.1}% within {} rad, std {:.4} rad",
            stats.trials,
            100.0 * stats.coverage,
            t.tolerance,
            stats.std_phase
        ),
    ];
    let body = json!({
        "expected_phase": target,
        "analytic_phase": analytic.extracted_phase,
        "sampled_phase": sampled.extracted_phase,
        "min_eigenvalue": sampled.min_eigenvalue(),
        "trials": stats.trials,
        "coverage": stats.coverage,
        "std_phase": stats.std_phase,
        "tolerance": t.tolerance,
    });
    files.push(write_json(&ctx.path("tomo.json"), cfg, "tomography", body.clone())?);
    Ok(Report {
        lines,
        files,
        summary: body,
    })
}

pub fn params(ctx: &Context) -> Result<Report, CliError> {
    let cfg = &ctx.cfg;
    let name = cfg.preset.as_str();
    let base = preset(name).ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?;
    let wp = WorkingPoint {
        rabi: cfg.rabi(),
        detuning: cfg.detuning(),
        coupling: cfg.coupling(),
        qubit_frequency: cfg.qubit_frequency(),
        ..base
    };
    let ic = wp.critical_current;
    let lj = josephson_inductance(ic, 0.0)?;
    let du = barrier_height(0.0, ic)?;
    let wp0 = plasma_frequency(0.0, ic, wp.junction_capacitance)?;
    let j = wp.derived_coupling()?;
    let i_n = wp.thermal_current()?;
    // Slope at which the thermal current noise produces the configured σ₀.
    let slope = cfg.noise.sigma_detuning * wp.detuning.abs() / i_n;
    let two_pi = 2.0 * PI;
    let lines = vec![
        format!("preset: {name}"),
        format!("I_c = {:.3e} A, C_J = {:.3e} F, C_x = {:.3e} F", ic, wp.junction_capacitance, wp.coupling_capacitance),
        format!("L_J(delta=0) = {lj:.4e} H"),
        format!("barrier height at zero bias = {du:.4e} J"),
        format!("plasma frequency at zero bias = {:.4} GHz", wp0 / two_pi / 1e9),
        format!(
            "nu/2pi = {} GHz, dw/2pi = {} GHz, J/2pi = {} GHz (capacitive estimate {:.4} GHz)",
            cfg.physics.rabi_ghz,
            cfg.physics.detuning_ghz,
            cfg.physics.coupling_ghz,
            j / two_pi
        ),
        format!(
            "thermal bias noise at {} K, {} Ohm, {:.1e} Hz: {:.3} nA",
            wp.temperature,
            wp.resistance,
            wp.bandwidth,
            i_n * 1e9
        ),
        format!(
            "level slope for sigma_detuning = {}: {:.4e} (rad/ns)/A",
            cfg.noise.sigma_detuning, slope
        ),
    ];
    let body = json!({
        "preset": name,
        "josephson_inductance": lj,
        "barrier_height_zero_bias": du,
        "plasma_frequency_zero_bias": wp0,
        "coupling_capacitive": j,
        "thermal_current": i_n,
        "level_slope_for_sigma": slope,
    });
    let file = write_json(&ctx.path("params.json"), cfg, "params", body.clone())?;
    Ok(Report {
        lines,
        files: vec![file],
        summary: body,
    })
}
