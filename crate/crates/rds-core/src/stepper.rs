//! Time integration: positivity-limited explicit reaction + implicit diffusion.
//!
//! Each step of the mass-action law does, in order:
//!
//! 1. evaluate the shared rate `R_i = w_i^gamma - u_i^alpha v_i^beta` per cell;
//! 2. shrink the step until no component can cross zero: cells with `R < 0`
//!    cap `dt` at `safety * min(u, v) / |R|`, cells with `R > 0` cap it at
//!    `safety * w / R` (a cell with `R < 0` necessarily has `u, v > 0`, and one
//!    with `R > 0` has `w > 0`, so the caps are always positive);
//! 3. apply `(u, v, w) += dt' * (R, R, -R)` with one shared product per cell,
//!    conserving `sum(u + v + 2w)` and `sum(u - v)` by construction;
//! 4. diffuse each species implicitly with its own coefficient (unconditionally
//!    positive, sum-conserving on Neumann grids);
//! 5. grow the persistent step by `dt_growth` toward `dt_max` when the limiter
//!    was inactive, or hold it at the limited value otherwise.
//!
//! A cap below `dt_min` aborts the run with [`RunStatus::DtUnderflow`]; a
//! field whose summed sup-norms exceed the blow-up threshold aborts it with
//! [`RunStatus::BlowUpSuspected`].  Neither failure clamps or rescales data.

use crate::diagnostics::{combined_mass, uv_mass, DiagnosticsRecord};
use crate::error::Error;
use crate::grid::{heat_step_in_place, Grid, ScalarField};
use crate::kinetics::{reaction_rate, Params};
use crate::tol;

/// Full solver state: clock, persistent step size, and the three species.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub dt: f64,
    pub u: ScalarField,
    pub v: ScalarField,
    pub w: ScalarField,
}

impl State {
    /// Validates sizes against the grid, nonnegativity of all species, and a
    /// positive finite starting step.
    pub fn new(
        t: f64,
        dt: f64,
        u: ScalarField,
        v: ScalarField,
        w: ScalarField,
        g: &Grid,
    ) -> Result<State, Error> {
        if !(t.is_finite() && dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidControl(format!(
                "state needs finite t and positive dt, got t = {t}, dt = {dt}"
            )));
        }
        for (name, f) in [("u", &u), ("v", &v), ("w", &w)] {
            if f.len() != g.cell_count() {
                return Err(Error::InvalidField(format!(
                    "{name} has {} entries but the grid has {} cells",
                    f.len(),
                    g.cell_count()
                )));
            }
            if f.min_value() < 0.0 {
                return Err(Error::InvalidField(format!(
                    "{name} must be nonnegative, min entry is {}",
                    f.min_value()
                )));
            }
        }
        Ok(State { t, dt, u, v, w })
    }

    /// `||u||_inf + ||v||_inf + ||w||_inf`, the quantity watched by the
    /// blow-up detector.
    pub fn linf_total(&self) -> f64 {
        self.u.sup_abs() + self.v.sup_abs() + self.w.sup_abs()
    }

    /// Smallest entry over all three species.
    pub fn min_component(&self) -> f64 {
        self.u
            .min_value()
            .min(self.v.min_value())
            .min(self.w.min_value())
    }
}

/// Adaptive-stepping configuration.  Construct through [`StepControl::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Fraction of the positivity cap actually taken, in (0, 1).
    pub safety: f64,
    /// Abort once `||u||_inf + ||v||_inf + ||w||_inf` strictly exceeds this.
    pub blowup_threshold: f64,
    /// Cadence at which diagnostics records and field snapshots are captured.
    pub sample_every: f64,
    /// Multiplicative step growth applied when the limiter was inactive.
    pub dt_growth: f64,
}

impl StepControl {
    pub fn new(
        dt_init: f64,
        dt_min: f64,
        dt_max: f64,
        safety: f64,
        blowup_threshold: f64,
        sample_every: f64,
        dt_growth: f64,
    ) -> Result<StepControl, Error> {
        let all_finite = [
            dt_init,
            dt_min,
            dt_max,
            safety,
            blowup_threshold,
            sample_every,
            dt_growth,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::InvalidControl(
                "all control values must be finite".into(),
            ));
        }
        if !(0.0 < dt_min && dt_min <= dt_init && dt_init <= dt_max) {
            return Err(Error::InvalidControl(format!(
                "need 0 < dt_min <= dt_init <= dt_max, got {dt_min}, {dt_init}, {dt_max}"
            )));
        }
        if !(0.0 < safety && safety < 1.0) {
            return Err(Error::InvalidControl(format!(
                "safety must lie in (0, 1), got {safety}"
            )));
        }
        if blowup_threshold <= 0.0 {
            return Err(Error::InvalidControl(format!(
                "blowup_threshold must be positive, got {blowup_threshold}"
            )));
        }
        if sample_every <= 0.0 {
            return Err(Error::InvalidControl(format!(
                "sample_every must be positive, got {sample_every}"
            )));
        }
        if dt_growth < 1.0 {
            return Err(Error::InvalidControl(format!(
                "dt_growth must be >= 1, got {dt_growth}"
            )));
        }
        Ok(StepControl {
            dt_init,
            dt_min,
            dt_max,
            safety,
            blowup_threshold,
            sample_every,
            dt_growth,
        })
    }

    /// Default detector threshold: `1e6 * max(1, sup of the initial data)`.
    pub fn default_blowup_threshold(initial_sup: f64) -> f64 {
        1e6 * initial_sup.max(1.0)
    }

    /// Conventional limiter fraction.
    pub const DEFAULT_SAFETY: f64 = 0.9;

    /// Conventional step growth factor.
    pub const DEFAULT_DT_GROWTH: f64 = 1.2;
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Integrated to the requested final time.
    ReachedT,
    /// The detector tripped: summed sup-norms exceeded the threshold.
    BlowUpSuspected,
    /// The positivity limiter demanded a step below `dt_min`.
    DtUnderflow,
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            RunStatus::ReachedT => "ReachedT",
            RunStatus::BlowUpSuspected => "BlowUpSuspected",
            RunStatus::DtUnderflow => "DtUnderflow",
        };
        f.write_str(name)
    }
}

/// Verdict of a single detector query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupCheck {
    Ok,
    BlowUpSuspected,
}

/// Detector: fires iff `||u||_inf + ||v||_inf + ||w||_inf` strictly exceeds
/// the configured threshold.
pub fn detect_blowup(s: &State, c: &StepControl) -> BlowupCheck {
    if s.linf_total() > c.blowup_threshold {
        BlowupCheck::BlowUpSuspected
    } else {
        BlowupCheck::Ok
    }
}

/// Fields captured along a trajectory at the sampling cadence; consumed by
/// the space-time diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub t: f64,
    pub u: ScalarField,
    pub v: ScalarField,
    pub w: ScalarField,
}

/// Everything a run produces: final state, exit status, stop time, sampled
/// diagnostics records and field snapshots, plus two whole-run extrema used by
/// the verification suite (`min_seen` over every cell of every accepted step,
/// and the largest summed sup-norm observed).
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub final_state: State,
    pub status: RunStatus,
    pub t_stop: f64,
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<FieldSnapshot>,
    pub min_seen: f64,
    pub sup_linf_total: f64,
}

/// Right-hand side selector: the reversible mass-action law, or a quadratic
/// growth surrogate (`w' = +w^2`, `u` and `v` frozen) whose exact solution
/// blows up in finite time.  The surrogate deliberately breaks conservation
/// and exists to exercise the blow-up detector, which real mass-action
/// kinetics cannot trip at desk scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateLaw {
    MassAction,
    QuadraticGrowth,
}

/// One attempted step of size at most `state.dt` (further capped by `dt_cap`),
/// mutating the state in place.  On success the clock advances by the size
/// actually taken and the persistent `state.dt` is updated per the growth
/// policy.  Fails with [`Error::DtUnderflow`] when positivity demands a step
/// below `dt_min`; the state is untouched in that case.
fn advance(
    state: &mut State,
    law: RateLaw,
    p: &Params,
    g: &Grid,
    c: &StepControl,
    dt_cap: f64,
) -> Result<(), Error> {
    let cells = g.cell_count();
    let (u, v, w) = (state.u.values(), state.v.values(), state.w.values());
    let mut rates = vec![0.0; cells];
    let mut dt_limit = f64::INFINITY;
    match law {
        RateLaw::MassAction => {
            for i in 0..cells {
                let r = reaction_rate(u[i], v[i], w[i], p);
                rates[i] = r;
                if r < 0.0 {
                    dt_limit = dt_limit.min(c.safety * u[i].min(v[i]) / -r);
                } else if r > 0.0 {
                    dt_limit = dt_limit.min(c.safety * w[i] / r);
                }
            }
        }
        RateLaw::QuadraticGrowth => {
            for i in 0..cells {
                rates[i] = w[i] * w[i];
            }
        }
    }
    if dt_limit < c.dt_min {
        return Err(Error::DtUnderflow {
            t: state.t,
            required: dt_limit,
            dt_min: c.dt_min,
        });
    }
    let attempted = state.dt.min(dt_cap);
    let dt_eff = attempted.min(dt_limit);

    match law {
        RateLaw::MassAction => {
            let u = state.u.values_mut();
            let v = state.v.values_mut();
            let w = state.w.values_mut();
            for i in 0..cells {
                // One shared product keeps the conserved combinations exact.
                let delta = dt_eff * rates[i];
                u[i] += delta;
                v[i] += delta;
                w[i] -= delta;
            }
        }
        RateLaw::QuadraticGrowth => {
            let w = state.w.values_mut();
            for i in 0..cells {
                w[i] += dt_eff * rates[i];
            }
        }
    }

    heat_step_in_place(&mut state.u, g, p.d1, dt_eff);
    heat_step_in_place(&mut state.v, g, p.d2, dt_eff);
    heat_step_in_place(&mut state.w, g, p.d3, dt_eff);

    state.t += dt_eff;
    if dt_limit < state.dt {
        // The limiter bit: hold the persistent step at the limited size.
        state.dt = dt_limit.max(c.dt_min);
    } else if dt_eff >= state.dt {
        // A full unconstrained step succeeded: grow toward dt_max.
        state.dt = (state.dt * c.dt_growth).min(c.dt_max);
    }
    // Otherwise the step was shortened only to land on a sample time; the
    // persistent step is left alone.
    Ok(())
}

/// One full mass-action step of size at most `state.dt`.
pub fn step(state: &mut State, p: &Params, g: &Grid, c: &StepControl) -> Result<(), Error> {
    advance(state, RateLaw::MassAction, p, g, c, f64::INFINITY)
}

/// Integrates the mass-action system from `initial` to `t_end`.
pub fn run(initial: State, p: &Params, g: &Grid, c: &StepControl, t_end: f64) -> RunResult {
    run_with_rate(initial, RateLaw::MassAction, p, g, c, t_end)
}

/// Integrates under the chosen rate law, recording a [`DiagnosticsRecord`] and
/// a [`FieldSnapshot`] at `t = t0 + k * sample_every` (and at the stop time).
/// Sample times are landed on exactly by capping the step, without disturbing
/// the persistent adaptive step size.
pub fn run_with_rate(
    initial: State,
    law: RateLaw,
    p: &Params,
    g: &Grid,
    c: &StepControl,
    t_end: f64,
) -> RunResult {
    assert!(
        t_end.is_finite() && t_end > initial.t,
        "t_end = {t_end} must exceed the initial time {}",
        initial.t
    );
    assert_eq!(
        p.dim,
        g.dimension(),
        "parameter dimension {} does not match the grid dimension {}",
        p.dim,
        g.dimension()
    );
    let mut s = initial;
    let t0 = s.t;
    let mass0 = combined_mass(&s, g);
    let uv0 = uv_mass(&s, g);

    let mut records = vec![DiagnosticsRecord::measure(&s, g, mass0, uv0)];
    let mut snapshots = vec![FieldSnapshot {
        t: s.t,
        u: s.u.clone(),
        v: s.v.clone(),
        w: s.w.clone(),
    }];
    let mut min_seen = s.min_component();
    let mut sup_linf_total = s.linf_total();

    let mut status = RunStatus::ReachedT;
    if detect_blowup(&s, c) == BlowupCheck::BlowUpSuspected {
        let t_stop = s.t;
        return RunResult {
            final_state: s,
            status: RunStatus::BlowUpSuspected,
            t_stop,
            records,
            snapshots,
            min_seen,
            sup_linf_total,
        };
    }

    let mut sample_index: u64 = 1;
    'outer: while s.t < t_end {
        let target = (t0 + sample_index as f64 * c.sample_every).min(t_end);
        let snap = tol::SNAP_REL * target.abs().max(1.0);
        while target - s.t > snap {
            let dt_cap = target - s.t;
            if let Err(Error::DtUnderflow { .. }) = advance(&mut s, law, p, g, c, dt_cap) {
                status = RunStatus::DtUnderflow;
                break 'outer;
            }
            min_seen = min_seen.min(s.min_component());
            let total = s.linf_total();
            sup_linf_total = sup_linf_total.max(total);
            if total > c.blowup_threshold {
                status = RunStatus::BlowUpSuspected;
                break 'outer;
            }
        }
        s.t = target;
        records.push(DiagnosticsRecord::measure(&s, g, mass0, uv0));
        snapshots.push(FieldSnapshot {
            t: s.t,
            u: s.u.clone(),
            v: s.v.clone(),
            w: s.w.clone(),
        });
        if target >= t_end {
            break;
        }
        sample_index += 1;
    }

    if status != RunStatus::ReachedT && records.last().map(|r| r.t) != Some(s.t) {
        records.push(DiagnosticsRecord::measure(&s, g, mass0, uv0));
        snapshots.push(FieldSnapshot {
            t: s.t,
            u: s.u.clone(),
            v: s.v.clone(),
            w: s.w.clone(),
        });
    }

    let t_stop = s.t;
    RunResult {
        final_state: s,
        status,
        t_stop,
        records,
        snapshots,
        min_seen,
        sup_linf_total,
    }
}
