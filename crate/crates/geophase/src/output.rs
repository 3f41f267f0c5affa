//! CSV and JSON writers.
//!
//! CSV files start with `#` comment lines carrying the tool version, the RNG
//! algorithm and seed, and the resolved configuration as one line of JSON,
//! followed by a header row and data rows. Numbers use Rust's shortest
//! round-trip formatting, so identical inputs give identical bytes. Only the
//! JSON summaries carry a timestamp.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use geophase_core::fidelity::FidelityTable;
use geophase_core::noise::{NoiseScale, RNG_ALGORITHM};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{CliError, VERSION};

pub const JSON_SCHEMA: &str = "geophase-output/1";

fn comment_header(cfg: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# tool: geophase {VERSION}");
    let _ = writeln!(s, "# rng: {RNG_ALGORITHM}; seed: {}", cfg.seed);
    let _ = writeln!(s, "# config: {}", cfg.to_json());
    for (k, v) in extra {
        let _ = writeln!(s, "# {k}: {v}");
    }
    s
}

/// Writes a CSV with the standard comment header.
pub fn write_csv(
    path: &Path,
    cfg: &RunConfig,
    extra: &[(&str, String)],
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<PathBuf, CliError> {
    let mut s = comment_header(cfg, extra);
    s.push_str(&columns.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    write_file(path, &s)?;
    Ok(path.to_path_buf())
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

fn scale_name(s: NoiseScale) -> &'static str {
    match s {
        NoiseScale::Relative => "relative",
        NoiseScale::Absolute => "absolute",
    }
}

/// Writes a fidelity table: one row per grid point, first axis outermost.
pub fn write_table(path: &Path, cfg: &RunConfig, table: &FidelityTable) -> Result<PathBuf, CliError> {
    let m = &table.meta;
    let fixed = m
        .fixed
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ");
    let extra = [
        (
            "noise",
            format!(
                "sigma_detuning={} sigma_rabi={} scale={} samples={}",
                m.sigma_detuning,
                m.sigma_rabi,
                scale_name(m.scale),
                m.samples
            ),
        ),
        ("fixed", fixed),
    ];
    let columns = [table.axes[0].name, table.axes[1].name, "mean", "std_error", "samples"];
    let rows = table.points.iter().map(|p| {
        vec![
            num(p.coords[0]),
            num(p.coords[1]),
            num(p.mean),
            num(p.std_error),
            p.samples.to_string(),
        ]
    });
    write_csv(path, cfg, &extra, &columns, rows)
}

/// Writes a JSON summary wrapped with schema, version, timestamp and config.
pub fn write_json(path: &Path, cfg: &RunConfig, kind: &str, body: Value) -> Result<PathBuf, CliError> {
    let generated = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let doc = json!({
        "schema": JSON_SCHEMA,
        "kind": kind,
        "tool": format!("geophase {VERSION}"),
        "generated_unix": generated,
        "rng": RNG_ALGORITHM,
        "seed": cfg.seed,
        "config": serde_json::to_value(cfg).expect("configuration always serialises"),
        "result": body,
    });
    let text = serde_json::to_string_pretty(&doc).expect("JSON values always serialise");
    write_file(path, &(text + "\n"))?;
    Ok(path.to_path_buf())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}
