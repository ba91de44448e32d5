//! Subcommand implementations.  Every command returns a process exit code:
//! 0 success, 1 config/I-O error (raised as [`CliError`] by the caller),
//! 2 suspected blow-up, 3 time-step underflow, 4 out-of-band verification.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;

use rds_core::diagnostics::{duality_ratio, hmp_ratio};
use rds_core::grid::smoothing_ratio;
use rds_core::regimes::classify;
use rds_core::stepper::{run, RunResult, RunStatus};
use rds_core::{Grid, Params, ScalarField, State};

use crate::config::{load, Scenario, ScenarioConfig, SweepConfig};
use crate::csvio::{fmt_f64, write_series, write_snapshot, write_sweep};
use crate::error::CliError;
use crate::initial::build_initial;

fn status_code(status: RunStatus) -> i32 {
    match status {
        RunStatus::ReachedT => 0,
        RunStatus::BlowUpSuspected => 2,
        RunStatus::DtUnderflow => 3,
    }
}

/// Two-sided relative agreement: |a - b| within `frac` of the larger scale.
fn within_band(a: f64, b: f64, frac: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= frac * a.abs().max(b.abs())
}

/// `rds run <cfg>`: integrate the scenario, write the series CSV (and
/// snapshots when configured), print `status=.. t_stop=..`.
pub fn cmd_run(config_path: &Path, quiet: bool) -> Result<i32, CliError> {
    let cfg: ScenarioConfig = load(config_path)?;
    let sc = Scenario::build(&cfg)?;
    let result = run(sc.state(), &sc.params, &sc.grid, &sc.control, sc.t_end);

    write_series(&cfg.outputs.series_path, &result.records)?;
    if let (Some(dir), Some(stride)) = (&cfg.outputs.snapshots_path, sc.snapshot_stride) {
        let last = result.snapshots.len().saturating_sub(1);
        let mut file_index = 0;
        for (k, snap) in result.snapshots.iter().enumerate() {
            if k % stride == 0 || k == last {
                write_snapshot(dir, file_index, snap, &sc.grid)?;
                file_index += 1;
            }
        }
    }

    if !quiet {
        println!("status={} t_stop={}", result.status, fmt_f64(result.t_stop));
    }
    Ok(status_code(result.status))
}

/// `rds classify <cfg>`: print the regime verdict for the config's tuple.
pub fn cmd_classify(config_path: &Path, quiet: bool) -> Result<i32, CliError> {
    let cfg: ScenarioConfig = load(config_path)?;
    let sc = Scenario::build(&cfg)?;
    let verdict = classify(&sc.params);
    if !quiet {
        println!(
            "verdict={} gamma_star={} rationale={}",
            verdict.tag,
            fmt_f64(verdict.gamma_star),
            verdict.rationale
        );
    }
    Ok(0)
}

/// Space-time ratio `||psi||_{L^2(Q_T)} / (1 + ||phi||_{L^2(Q_T)})` for a
/// species pair of a finished run.
fn hmp_of(
    result: &RunResult,
    g: &Grid,
    pick: fn(&rds_core::stepper::FieldSnapshot) -> (&ScalarField, &ScalarField),
) -> f64 {
    let psi: Vec<(f64, &ScalarField)> = result.snapshots.iter().map(|s| (s.t, pick(s).0)).collect();
    let phi: Vec<(f64, &ScalarField)> = result.snapshots.iter().map(|s| (s.t, pick(s).1)).collect();
    hmp_ratio(&psi, &phi, g, 2.0)
}

/// Boundedness of the semigroup smoothing ratios for one diffusivity.  The
/// sweep walks `t` downward from 1 to 1e-3 - toward the singular limit the
/// estimate controls - and requires every ratio finite with no growth trend:
/// the max over the last decade visited (t in [1e-3, 1e-2]) at most 1.5x the
/// max over the first decade visited (t in [1e-1, 1]).
fn smoothing_trend_ok(g: &Grid, d: f64) -> Result<bool, CliError> {
    let n = g.cells_per_axis();
    let center = match g.dimension() {
        1 => n / 2,
        _ => (n / 2) * n + n / 2,
    };
    let mut values = vec![0.0; g.cell_count()];
    values[center] = 1.0;
    let spike = ScalarField::from_values(g, values)?;

    // 13 log-spaced times, a quarter decade apart, descending over [1e-3, 1].
    let mut first_decade_max = 0.0_f64;
    let mut last_decade_max = 0.0_f64;
    for k in 0..=12 {
        let t = 10f64.powf(-(k as f64) / 4.0);
        let ratio = smoothing_ratio(&spike, g, d, t, 1.0, f64::INFINITY)?;
        if !ratio.is_finite() {
            return Ok(false);
        }
        if k <= 4 {
            first_decade_max = first_decade_max.max(ratio);
        }
        if k >= 8 {
            last_decade_max = last_decade_max.max(ratio);
        }
    }
    Ok(last_decade_max <= 1.5 * first_decade_max)
}

/// `rds verify-lemmas <cfg>`: refinement stability of the space-time ratio
/// and the duality ratio (n vs 2n), plus boundedness of the smoothing sweep.
pub fn cmd_verify_lemmas(config_path: &Path, quiet: bool) -> Result<i32, CliError> {
    let cfg: ScenarioConfig = load(config_path)?;
    let coarse = Scenario::build(&cfg)?;
    let fine = Scenario::build_with(&cfg, Some(2 * coarse.grid.cells_per_axis()), None)?;

    let mut results = Vec::new();
    for sc in [&coarse, &fine] {
        let r = run(sc.state(), &sc.params, &sc.grid, &sc.control, sc.t_end);
        if r.status != RunStatus::ReachedT {
            if !quiet {
                println!("status={} t_stop={}", r.status, fmt_f64(r.t_stop));
            }
            return Ok(status_code(r.status));
        }
        results.push(r);
    }
    let (r1, r2) = (&results[0], &results[1]);

    let uw1 = hmp_of(r1, &coarse.grid, |s| (&s.u, &s.w));
    let uw2 = hmp_of(r2, &fine.grid, |s| (&s.u, &s.w));
    let vw1 = hmp_of(r1, &coarse.grid, |s| (&s.v, &s.w));
    let vw2 = hmp_of(r2, &fine.grid, |s| (&s.v, &s.w));
    let hmp_ok = within_band(uw1, uw2, 0.20) && within_band(vw1, vw2, 0.20);

    let neumann = coarse.grid.bc() == rds_core::BoundaryCondition::Neumann;
    let (duality_text, duality_ok) = if neumann {
        let (c, _, _) = duality_ratio(r1, &coarse.grid, &coarse.params);
        let (d, _, _) = duality_ratio(r2, &fine.grid, &fine.params);
        (
            format!("{},{}", fmt_f64(c), fmt_f64(d)),
            within_band(c, d, 0.10),
        )
    } else {
        if !quiet {
            println!(
                "notice: duality check skipped (Dirichlet boundary; the conservation \
                 identities behind it hold under Neumann conditions)"
            );
        }
        ("skipped,skipped".to_string(), true)
    };

    let mut smoothing_ok = true;
    let diffusivities: BTreeSet<u64> = [coarse.params.d1, coarse.params.d2, coarse.params.d3]
        .iter()
        .map(|d| d.to_bits())
        .collect();
    for bits in diffusivities {
        smoothing_ok &= smoothing_trend_ok(&coarse.grid, f64::from_bits(bits))?;
    }

    if !quiet {
        println!(
            "hmp_ratio_p2={},{} duality_ratio={} smoothing_ok={}",
            fmt_f64(uw1),
            fmt_f64(uw2),
            duality_text,
            smoothing_ok
        );
    }
    Ok(if hmp_ok && duality_ok && smoothing_ok {
        0
    } else {
        4
    })
}

/// `rds sweep <cfg>`: Cartesian product over the declared parameter ranges;
/// classify each tuple and optionally run it; rows emitted in lexicographic
/// range order regardless of the parallel completion order.
pub fn cmd_sweep(config_path: &Path, quiet: bool) -> Result<i32, CliError> {
    let cfg: SweepConfig = load(config_path)?;
    if cfg.dimension < 1 {
        return Err(CliError::invalid("dimension must be >= 1"));
    }

    // Shared run recipe, prepared once.
    let runner = match &cfg.run {
        None => None,
        Some(spec) => {
            if spec.grid.dimension != cfg.dimension {
                return Err(CliError::invalid(format!(
                    "sweep dimension ({}) and run grid dimension ({}) disagree",
                    cfg.dimension, spec.grid.dimension
                )));
            }
            let grid = spec.grid.build()?;
            let u = build_initial(&spec.initial.u, &grid)?;
            let v = build_initial(&spec.initial.v, &grid)?;
            let w = build_initial(&spec.initial.w, &grid)?;
            let sup = u.sup_abs() + v.sup_abs() + w.sup_abs();
            let control = spec.control.build(sup)?;
            if !(spec.t_end.is_finite() && spec.t_end > 0.0) {
                return Err(CliError::invalid(format!(
                    "t_end must be positive and finite, got {}",
                    spec.t_end
                )));
            }
            Some((grid, u, v, w, control, spec.t_end))
        }
    };

    // Lexicographic tuple order in the declared ranges; validate all tuples
    // before any work so a bad range is a clean config error.
    let mut tuples: Vec<(Params, [f64; 6])> = Vec::new();
    for &a in &cfg.alpha {
        for &b in &cfg.beta {
            for &gm in &cfg.gamma {
                for &d1 in &cfg.d1 {
                    for &d2 in &cfg.d2 {
                        for &d3 in &cfg.d3 {
                            let p = Params::new(d1, d2, d3, a, b, gm, cfg.dimension)?;
                            tuples.push((p, [a, b, gm, d1, d2, d3]));
                        }
                    }
                }
            }
        }
    }

    let rows: Vec<String> = tuples
        .par_iter()
        .map(|(p, raw)| {
            let verdict = classify(p);
            let (status, sup, t_stop) = match &runner {
                None => (String::new(), String::new(), String::new()),
                Some((grid, u, v, w, control, t_end)) => {
                    let state =
                        State::new(0.0, control.dt_init, u.clone(), v.clone(), w.clone(), grid)
                            .expect("validated sweep initial state");
                    let r = run(state, p, grid, control, *t_end);
                    (
                        r.status.to_string(),
                        fmt_f64(r.sup_linf_total),
                        fmt_f64(r.t_stop),
                    )
                }
            };
            format!(
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(raw[0]),
                fmt_f64(raw[1]),
                fmt_f64(raw[2]),
                fmt_f64(raw[3]),
                fmt_f64(raw[4]),
                fmt_f64(raw[5]),
                verdict.tag,
                status,
                sup,
                t_stop,
            )
        })
        .collect();

    write_sweep(&cfg.csv_path, &rows)?;
    if !quiet {
        println!("rows={} csv={}", rows.len(), cfg.csv_path.display());
    }
    Ok(0)
}

/// Restriction of a fine-grid field to the next coarser grid by averaging
/// sibling cells (exact for linear profiles, so it preserves order 2).
fn restrict(fine: &ScalarField, fine_grid: &Grid, coarse_grid: &Grid) -> ScalarField {
    let nf = fine_grid.cells_per_axis();
    let nc = coarse_grid.cells_per_axis();
    assert_eq!(nf, 2 * nc, "restriction expects a factor-2 refinement");
    let src = fine.values();
    let values = match fine_grid.dimension() {
        1 => (0..nc)
            .map(|i| 0.5 * (src[2 * i] + src[2 * i + 1]))
            .collect(),
        _ => (0..nc * nc)
            .map(|idx| {
                let (i, j) = (idx % nc, idx / nc);
                let base = 2 * j * nf + 2 * i;
                0.25 * (src[base] + src[base + 1] + src[base + nf] + src[base + nf + 1])
            })
            .collect(),
    };
    ScalarField::from_values(coarse_grid, values).expect("restriction length is exact")
}

/// Largest componentwise difference over the three species.
fn linf_state_diff(a: &State, b: &State) -> f64 {
    let pair = |x: &ScalarField, y: &ScalarField| {
        x.values()
            .iter()
            .zip(y.values())
            .fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()))
    };
    pair(&a.u, &b.u).max(pair(&a.v, &b.v)).max(pair(&a.w, &b.w))
}

/// Richardson order from two successive self-differences; `None` when the
/// differences sit at rounding level (degenerate, e.g. an exact fixed point).
fn observed_order(e1: f64, e2: f64, scale: f64) -> Option<f64> {
    let tiny = 1e-13 * (1.0 + scale);
    if e1 <= tiny || e2 <= tiny {
        None
    } else {
        Some((e1 / e2).log2())
    }
}

/// `rds convergence <cfg>`: temporal self-convergence at (dt, dt/2, dt/4) on
/// the base grid and spatial self-convergence at (n, 2n, 4n) at fixed dt.
pub fn cmd_convergence(config_path: &Path, quiet: bool) -> Result<i32, CliError> {
    let cfg: ScenarioConfig = load(config_path)?;
    let base = Scenario::build(&cfg)?;
    let scale = base.state().linf_total();
    let base_dt = cfg.control.dt_init;
    let n = cfg.grid.cells_per_axis;

    // Temporal study: fixed steps dt, dt/2, dt/4 on the base grid.
    let mut finals = Vec::new();
    for halvings in 0..3 {
        let sc = Scenario::build_with(&cfg, None, Some(base_dt / f64::powi(2.0, halvings)))?;
        let r = run(sc.state(), &sc.params, &sc.grid, &sc.control, sc.t_end);
        if r.status != RunStatus::ReachedT {
            if !quiet {
                println!("status={} t_stop={}", r.status, fmt_f64(r.t_stop));
            }
            return Ok(status_code(r.status));
        }
        finals.push(r.final_state);
    }
    let temporal = observed_order(
        linf_state_diff(&finals[0], &finals[1]),
        linf_state_diff(&finals[1], &finals[2]),
        scale,
    );

    // Spatial study: n, 2n, 4n at the same fixed dt; compare on the coarser
    // grid of each pair after restriction.
    let mut spatial_runs = Vec::new();
    for factor in [1, 2, 4] {
        let sc = Scenario::build_with(&cfg, Some(factor * n), Some(base_dt))?;
        let r = run(sc.state(), &sc.params, &sc.grid, &sc.control, sc.t_end);
        if r.status != RunStatus::ReachedT {
            if !quiet {
                println!("status={} t_stop={}", r.status, fmt_f64(r.t_stop));
            }
            return Ok(status_code(r.status));
        }
        spatial_runs.push((sc.grid, r.final_state));
    }
    let restricted_diff = |fine: &(Grid, State), coarse: &(Grid, State)| {
        let on_coarse = |f: &ScalarField| restrict(f, &fine.0, &coarse.0);
        let pairs = [
            (on_coarse(&fine.1.u), &coarse.1.u),
            (on_coarse(&fine.1.v), &coarse.1.v),
            (on_coarse(&fine.1.w), &coarse.1.w),
        ];
        pairs.iter().fold(0.0_f64, |m, (rf, cf)| {
            m.max(
                rf.values()
                    .iter()
                    .zip(cf.values())
                    .fold(0.0_f64, |mm, (p, q)| mm.max((p - q).abs())),
            )
        })
    };
    let spatial = observed_order(
        restricted_diff(&spatial_runs[1], &spatial_runs[0]),
        restricted_diff(&spatial_runs[2], &spatial_runs[1]),
        scale,
    );

    if temporal.is_none() && spatial.is_none() {
        if !quiet {
            println!("degenerate");
        }
        return Ok(0);
    }

    let render = |o: Option<f64>| match o {
        Some(v) => fmt_f64(v),
        None => "degenerate".to_string(),
    };
    if !quiet {
        println!(
            "temporal_order={} spatial_order={}",
            render(temporal),
            render(spatial)
        );
    }

    let temporal_ok = temporal.map_or(true, |v| (0.8..=1.2).contains(&v));
    let spatial_ok = spatial.map_or(true, |v| (1.7..=2.3).contains(&v));
    if temporal_ok && spatial_ok {
        Ok(0)
    } else {
        if !quiet && !cfg.initial.is_smooth() {
            println!("rough-data");
        }
        Ok(4)
    }
}
