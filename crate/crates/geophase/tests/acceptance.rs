//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status if
//! any criterion fails. Run with `cargo test -p geophase --test acceptance`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use geophase_core::fidelity::{
    average_fidelity_many, InputAxis, SingleQubitModel, SingleSweep, TwoQubitSweep,
};
use geophase_core::fieldpath::{cone_path, gate_loop, shifted_cone, solid_angle, two_loop, LoopSequence};
use geophase_core::gates::{
    single_qubit_gate, two_qubit_phase, ControlBranch, GateParams, TwoQubitParams,
};
use geophase_core::noise::{stream_rng, thermal_noise_current, NoiseSpec};
use geophase_core::oracle::{evolve, upper_eigenstate, DEFAULT_STEPS_PER_LOOP};
use geophase_core::physparams::coupling_strength;
use geophase_core::qmath::{wrap_angle, Unitary2};
use geophase_core::tomography::{repeat_tomography, run_tomography};
use geophase_core::C64;
use rand::Rng;

const SEED: u64 = 2007;
const W: f64 = 2.0 * PI * 0.3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    if took > limit {
        out.pass = false;
        out.detail.push_str(&format!("; runtime over {limit:?}"));
    }
    println!(
        "{} [{id}] {name}: {} ({:.2?})",
        if out.pass { "PASS" } else { "FAIL" },
        out.detail,
        took
    );
    out.pass
}

/// π(1 − Δω/√(Δω² + ν²)), written out independently of the library.
fn cone_phase(nu: f64, dw: f64) -> f64 {
    PI * (1.0 - dw / (dw * dw + nu * nu).sqrt())
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let ratio = 10f64.powf(-2.0 + 4.0 * k as f64 / 19.0);
        let (nu, dw) = if k % 2 == 0 { (ratio * W, W) } else { (W, W / ratio) };
        let path = cone_path(nu, dw, 0.0, 400.0).expect("valid cone");
        let half = solid_angle(&path, 4096).expect("regular loop") / 2.0;
        worst = worst.max((half - cone_phase(nu, dw)).abs());
    }
    Outcome {
        pass: worst < 1e-8,
        detail: format!("max |quadrature/2 - closed form| = {worst:.2e} over 20 points (limit 1e-8)"),
    }
}

fn criterion_2() -> Outcome {
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    let h = C64::new(0.0, FRAC_1_SQRT_2);
    let not = Unitary2::new([[z, i], [i, z]]).unwrap();
    let had = Unitary2::new([[h, h], [h, -h]]).unwrap();
    let e_not = single_qubit_gate(&GateParams::new(FRAC_PI_2, FRAC_PI_2, 0.0).unwrap()).max_abs_diff(&not);
    let e_had = single_qubit_gate(&GateParams::new(FRAC_PI_2, FRAC_PI_4, 0.0).unwrap()).max_abs_diff(&had);
    let mut rng = stream_rng(SEED, 2);
    let (mut defect, mut det): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let p = GateParams::new(
            rng.random_range(-2.0 * PI..2.0 * PI),
            rng.random_range(0.0..=PI),
            rng.random_range(0.0..2.0 * PI),
        )
        .unwrap();
        let u = single_qubit_gate(&p);
        defect = defect.max(u.unitarity_defect());
        det = det.max((u.det() - C64::new(1.0, 0.0)).norm());
    }
    Outcome {
        pass: e_not < 1e-12 && e_had < 1e-12 && defect < 1e-10 && det < 1e-10,
        detail: format!(
            "NOT err {e_not:.1e}, Hadamard err {e_had:.1e} (limit 1e-12); 1e4 random gates: defect {defect:.1e}, |det-1| {det:.1e} (limit 1e-10)"
        ),
    }
}

fn criterion_3() -> Outcome {
    let gamma = cone_phase(W, W);
    let b = W.hypot(W);
    let mut pass = true;
    let mut parts = Vec::new();
    for cycles in [200.0, 400.0] {
        let tau = 2.0 * PI * cycles / b;
        let path = gate_loop(W, W, 0.0, tau).unwrap();
        let psi = upper_eigenstate(path.field(0.0)).unwrap();
        let single = evolve(&LoopSequence::single(path), &psi, DEFAULT_STEPS_PER_LOOP).unwrap();
        let double = evolve(&two_loop(path), &psi, DEFAULT_STEPS_PER_LOOP).unwrap();
        let e1 = wrap_angle(single.total_phase - (gamma - b * tau / 2.0)).abs();
        let e2 = wrap_angle(double.total_phase - 2.0 * gamma).abs();
        let leak = 1.0 - double.survival;
        pass &= e1 < 5e-3 && e2 < 5e-3 && leak < 1e-3;
        parts.push(format!(
            "{cycles} cycles: two-loop err {e2:.2e}, single-loop err {e1:.2e}, leakage {leak:.1e}"
        ));
    }
    Outcome {
        pass,
        detail: format!("{} (limits 5e-3 rad, 1e-3)", parts.join("; ")),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = stream_rng(SEED, 4);
    let (mut branch_gap, mut angle_gap): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let nu = 2.0 * PI * rng.random_range(0.1..0.5);
        let dw = 2.0 * PI * rng.random_range(0.1..0.5);
        let j = 2.0 * PI * rng.random_range(0.0..0.3);
        let p = TwoQubitParams::new(nu, dw, j).unwrap();
        let plus = two_qubit_phase(&p, ControlBranch::Plus).unwrap();
        let minus = two_qubit_phase(&p, ControlBranch::Minus).unwrap();
        branch_gap = branch_gap.max((plus - minus).abs());
        for (branch, phase) in [(ControlBranch::Plus, plus), (ControlBranch::Minus, minus)] {
            let path = shifted_cone(nu, dw, branch.y_offset(j), 400.0).unwrap();
            let half = solid_angle(&path, 4096).unwrap() / 2.0;
            angle_gap = angle_gap.max((phase - half).abs());
        }
    }
    Outcome {
        pass: branch_gap < 1e-9 && angle_gap < 1e-6,
        detail: format!(
            "max |gamma+ - gamma-| = {branch_gap:.1e} (limit 1e-9), max |gamma - solid angle/2| = {angle_gap:.1e} (limit 1e-6)"
        ),
    }
}

fn sweep_min(sigma_detuning: f64, sigma_rabi: f64) -> f64 {
    let noise = NoiseSpec::new(sigma_detuning, sigma_rabi, SEED).unwrap();
    [InputAxis::Theta, InputAxis::Phi]
        .into_iter()
        .map(|axis| {
            let t = SingleSweep::with_defaults(axis, W, noise).run().unwrap();
            t.min().unwrap().mean
        })
        .fold(f64::INFINITY, f64::min)
}

fn criterion_5() -> Outcome {
    let detuning_only = sweep_min(0.1, 0.0);
    let rabi_only = sweep_min(0.0, 0.1);
    let joint = sweep_min(0.1, 0.1);
    let floor = joint > 0.90;
    let order = detuning_only >= rabi_only;
    let joint_lowest = joint <= detuning_only.min(rabi_only);
    Outcome {
        pass: floor && order && joint_lowest,
        detail: format!(
            "joint-noise min {joint:.4} > 0.90: {floor} (stated claim 0.92); detuning-only min {detuning_only:.4} >= rabi-only min {rabi_only:.4}: {order}; joint min lowest: {joint_lowest}"
        ),
    }
}

fn criterion_6() -> Outcome {
    let p = TwoQubitParams::new(W, W, 2.0 * PI * 0.15).unwrap();
    let table = TwoQubitSweep::with_defaults(p, SEED).run().unwrap();
    let min = table.min().unwrap();
    Outcome {
        pass: min.mean > 0.965,
        detail: format!(
            "min {:.4} at theta={:.3}, sigma={} (assert > 0.965, claim 0.972)",
            min.mean, min.coords[0], min.coords[1]
        ),
    }
}

fn criterion_7() -> Outcome {
    let noise = NoiseSpec::new(0.1, 0.1, SEED).unwrap();
    let inputs: Vec<_> = [InputAxis::Theta, InputAxis::Phi]
        .into_iter()
        .flat_map(|a| a.default_grid().into_iter().map(move |v| a.state(v).unwrap()))
        .collect();
    let mut worst = f64::INFINITY;
    for (k, ratio) in [1e-3, 1e3].into_iter().enumerate() {
        let model = SingleQubitModel::new(ratio * W, W, 0.0, noise).unwrap();
        let est = average_fidelity_many(&model, &inputs, 10_000, &mut stream_rng(SEED, 70 + k as u64)).unwrap();
        worst = est.iter().map(|e| e.mean).fold(worst, f64::min);
    }
    Outcome {
        pass: worst > 0.999,
        detail: format!("min over both limits and all inputs {worst:.6} (limit 0.999)"),
    }
}

fn criterion_8() -> Outcome {
    let exact = run_tomography(FRAC_PI_2, FRAC_PI_8, 0, &mut stream_rng(SEED, 0)).unwrap();
    let err = (exact.extracted_phase - FRAC_PI_2).abs();
    let stats = repeat_tomography(FRAC_PI_2, FRAC_PI_8, 10_000, 200, 0.05, SEED).unwrap();
    Outcome {
        pass: err < 1e-12 && stats.coverage >= 0.95,
        detail: format!(
            "analytic error {err:.1e}; {:.1}% of 200 trials within 0.05 rad (limit 95%)",
            100.0 * stats.coverage
        ),
    }
}

fn criterion_9() -> Outcome {
    let i_n = thermal_noise_current(4.2, 1e4, 1e10).unwrap() * 1e9;
    let j = coupling_strength(33e-15, 1.3e-12, 2.0 * PI * 6.0).unwrap() / (2.0 * PI) * 1e3;
    Outcome {
        pass: (i_n - 15.2).abs() <= 0.1 && (j - 152.0).abs() <= 1.0,
        detail: format!("thermal noise {i_n:.3} nA (15.2 +- 0.1); J/2pi {j:.2} MHz (152 +- 1)"),
    }
}

fn run_cli(dir: &Path, config: &Path, workers: u32) -> Result<(), String> {
    for args in [
        vec!["fidelity", "--mode", "fig4"],
        vec!["two-qubit"],
        vec!["oracle"],
        vec!["tomo"],
    ] {
        let status = Command::new(env!("CARGO_BIN_EXE_geophase"))
            .args(&args)
            .arg("--config")
            .arg(config)
            .arg("--out")
            .arg(dir)
            .arg("--workers")
            .arg(workers.to_string())
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
    }
    Ok(())
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.toml");
    fs::write(&config, "seed = 31337\n[fidelity]\nsamples = 2000\n[two_qubit]\nsamples = 2000\n").unwrap();
    let dirs: Vec<_> = ["w1a", "w1b", "w8"].iter().map(|d| tmp.path().join(d)).collect();
    for (dir, workers) in dirs.iter().zip([1, 1, 8]) {
        if let Err(e) = run_cli(dir, &config, workers) {
            return Outcome {
                pass: false,
                detail: e,
            };
        }
    }
    let base = csv_files(&dirs[0]);
    let same = dirs[1..].iter().all(|d| csv_files(d) == base);
    Outcome {
        pass: same && base.len() >= 5,
        detail: format!(
            "{} CSV files compared across two workers=1 runs and one workers=8 run: {}",
            base.len(),
            if same { "byte-identical" } else { "DIFFER" }
        ),
    }
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        check(1, "cone Berry phase quadrature", s(1), criterion_1),
        check(2, "gate identities and unitarity", s(1), criterion_2),
        check(3, "two-loop cancellation (time domain)", s(30), criterion_3),
        check(4, "target-loop phase consistency", s(5), criterion_4),
        check(5, "single-qubit fidelity floor", s(300), criterion_5),
        check(6, "two-qubit fidelity floor", s(600), criterion_6),
        check(7, "trivial-gate limits", Duration::MAX, criterion_7),
        check(8, "tomographic phase readout", s(10), criterion_8),
        check(9, "physical constants", s(1), criterion_9),
        check(10, "deterministic output", Duration::MAX, criterion_10),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
