//! Shared scenario builders for the benchmark suite.

use rds_core::grid::{BoundaryCondition, Grid, ScalarField};
use rds_core::kinetics::Params;
use rds_core::stepper::{State, StepControl};
use std::f64::consts::PI;

/// Standard smooth Neumann grid used by every benchmark.
pub fn grid(dimension: usize, n: usize) -> Grid {
    Grid::new(dimension, n, 1.0, BoundaryCondition::Neumann).expect("valid benchmark grid")
}

/// Mixed-diffusivity parameters with an active reaction.
pub fn params(dim: usize) -> Params {
    Params::new(1.0, 2.0, 3.0, 1.0, 1.0, 2.0, dim).expect("valid benchmark parameters")
}

/// Smooth positive cosine data compatible with Neumann walls.
pub fn smooth_state(g: &Grid, dt: f64) -> State {
    let u = ScalarField::from_axis_fn(g, |x| {
        1.0 + 0.5 * x.iter().map(|&c| (PI * c).cos()).product::<f64>()
    });
    let v = ScalarField::from_axis_fn(g, |x| {
        1.0 - 0.3 * x.iter().map(|&c| (PI * c).cos()).product::<f64>()
    });
    let w = ScalarField::from_axis_fn(g, |x| {
        1.0 + 0.4 * x.iter().map(|&c| (2.0 * PI * c).cos()).product::<f64>()
    });
    State::new(0.0, dt, u, v, w, g).expect("valid benchmark state")
}

/// Adaptive control with a wide-open detector threshold.
pub fn control(dt_init: f64, dt_max: f64, sample_every: f64) -> StepControl {
    StepControl::new(dt_init, 1e-12, dt_max, 0.9, 1e12, sample_every, 1.2)
        .expect("valid benchmark control")
}
