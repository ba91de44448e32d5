//! Bit-stable CSV emission.  All numbers print through `f64`'s `Display`,
//! the shortest representation that round-trips exactly, so re-running a
//! command on the same inputs yields byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use rds_core::stepper::FieldSnapshot;
use rds_core::{DiagnosticsRecord, Grid, ScalarField};

use crate::error::CliError;

/// Header of the time-series CSV written by the run command.
pub const SERIES_HEADER: &str = "t,dt,linf_u,linf_v,linf_w,l1_mass,mass_drift,uv_drift,min_uvw";

/// Header of the sweep CSV.
pub const SWEEP_HEADER: &str = "alpha,beta,gamma,d1,d2,d3,verdict,status,sup_linf_total,t_stop";

/// Shortest round-trip decimal form.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Writes the per-sample diagnostics series.
pub fn write_series(path: &Path, records: &[DiagnosticsRecord]) -> Result<(), CliError> {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.dt),
            fmt_f64(r.linf_u),
            fmt_f64(r.linf_v),
            fmt_f64(r.linf_w),
            fmt_f64(r.l1_mass),
            fmt_f64(r.mass_drift),
            fmt_f64(r.uv_drift),
            fmt_f64(r.min_uvw),
        );
    }
    write_file(path, &out)
}

/// Renders one field in the snapshot layout: two `#` header lines, then one
/// value per line, row-major.
pub fn render_field(f: &ScalarField, g: &Grid, t: f64) -> String {
    let mut out = String::with_capacity(24 * (f.len() + 2));
    let _ = writeln!(out, "# n={} dim={}", g.cells_per_axis(), g.dimension());
    let _ = writeln!(out, "# t={}", fmt_f64(t));
    for &v in f.values() {
        let _ = writeln!(out, "{}", fmt_f64(v));
    }
    out
}

/// Writes the `u`, `v`, `w` fields of one snapshot as three files
/// `snap_<index>_<species>.csv` under `dir`.
pub fn write_snapshot(
    dir: &Path,
    index: usize,
    snap: &FieldSnapshot,
    g: &Grid,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for (species, field) in [("u", &snap.u), ("v", &snap.v), ("w", &snap.w)] {
        let path = dir.join(format!("snap_{index:04}_{species}.csv"));
        std::fs::write(path, render_field(field, g, snap.t))?;
    }
    Ok(())
}

/// Writes the sweep CSV from pre-rendered rows (already in deterministic
/// lexicographic order).
pub fn write_sweep(path: &Path, rows: &[String]) -> Result<(), CliError> {
    let mut out = String::with_capacity(48 * (rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    write_file(path, &out)
}
