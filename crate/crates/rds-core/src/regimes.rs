//! Classifies parameter tuples by which global-existence hypothesis applies.
//!
//! The hypotheses are checked in a fixed priority order; the first match wins:
//!
//! 1. `d1 = d2 = d3` - the combined field `Z = u + v + 2w` solves the heat
//!    equation, so the maximum principle bounds every component;
//! 2. `alpha + beta < gamma` - consumption of `w` dominates at large
//!    amplitudes and controls the whole system;
//! 3. `d1 = d3` or `d2 = d3` - the matching pair (`u + w`, resp. `v + w`)
//!    diffuses as a pure heat equation and caps both species;
//! 4. `d1 = d2` with `alpha + beta != gamma` - `u - v` diffuses purely and a
//!    duality estimate closes the argument;
//! 5. `gamma < (N + 6) / (N + 2)` - semigroup smoothing bootstraps the L^1
//!    mass bound to uniform bounds;
//! 6. otherwise the tuple sits in the open region
//!    `(N + 6)/(N + 2) <= gamma <= alpha + beta` with unrelated diffusivities.
//!
//! Real comparisons use a relative tolerance of [`tol::EXACT_REL`]; configs
//! that intend exact equality should use identical literals.

use crate::kinetics::Params;
use crate::tol;

/// Which global-existence argument covers a parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    GlobalEqualDiffusion,
    GlobalTheorem1,
    GlobalTheorem2i,
    GlobalTheorem2ii,
    GlobalTheorem3,
    Open,
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            RegimeTag::GlobalEqualDiffusion => "GlobalEqualDiffusion",
            RegimeTag::GlobalTheorem1 => "GlobalTheorem1",
            RegimeTag::GlobalTheorem2i => "GlobalTheorem2i",
            RegimeTag::GlobalTheorem2ii => "GlobalTheorem2ii",
            RegimeTag::GlobalTheorem3 => "GlobalTheorem3",
            RegimeTag::Open => "Open",
        };
        f.write_str(name)
    }
}

/// Classification outcome: the winning tag, the dimension-dependent smoothing
/// threshold `gamma* = (N + 6) / (N + 2)`, and a one-line rationale naming the
/// hypothesis that fired.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeVerdict {
    pub tag: RegimeTag,
    pub gamma_star: f64,
    pub rationale: String,
}

/// Smoothing-regime threshold `(N + 6) / (N + 2)` for space dimension `N`.
pub fn gamma_star(dim: usize) -> f64 {
    assert!(dim >= 1, "dimension must be >= 1");
    (dim as f64 + 6.0) / (dim as f64 + 2.0)
}

/// Relative equality at [`tol::EXACT_REL`].
fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= tol::EXACT_REL * a.abs().max(b.abs())
}

/// Strictly less, treating tolerance-equal values as equal.
fn strictly_less(a: f64, b: f64) -> bool {
    a < b && !approx_eq(a, b)
}

/// Applies the priority chain described in the module docs.
pub fn classify(p: &Params) -> RegimeVerdict {
    let gs = gamma_star(p.dim);
    let ab = p.alpha + p.beta;
    let (tag, rationale) = if approx_eq(p.d1, p.d2) && approx_eq(p.d2, p.d3) {
        (
            RegimeTag::GlobalEqualDiffusion,
            "d1 = d2 = d3: u + v + 2w obeys the heat equation and the maximum principle bounds all species".to_string(),
        )
    } else if strictly_less(ab, p.gamma) {
        (
            RegimeTag::GlobalTheorem1,
            format!(
                "alpha + beta = {ab} < gamma = {}: consumption of w dominates and bounds the system",
                p.gamma
            ),
        )
    } else if approx_eq(p.d1, p.d3) || approx_eq(p.d2, p.d3) {
        (
            RegimeTag::GlobalTheorem2i,
            "d1 = d3 or d2 = d3: the matching sum with w diffuses purely and caps both species"
                .to_string(),
        )
    } else if approx_eq(p.d1, p.d2) && !approx_eq(ab, p.gamma) {
        (
            RegimeTag::GlobalTheorem2ii,
            format!(
                "d1 = d2 with alpha + beta = {ab} != gamma = {}: u - v diffuses purely and duality closes the bound",
                p.gamma
            ),
        )
    } else if strictly_less(p.gamma, gs) {
        (
            RegimeTag::GlobalTheorem3,
            format!(
                "gamma = {} < (N + 6)/(N + 2) = {gs}: semigroup smoothing upgrades the mass bound",
                p.gamma
            ),
        )
    } else {
        (
            RegimeTag::Open,
            format!(
                "no hypothesis applies: (N + 6)/(N + 2) = {gs} <= gamma = {} <= alpha + beta = {ab} with unrelated diffusivities",
                p.gamma
            ),
        )
    };
    RegimeVerdict {
        tag,
        gamma_star: gs,
        rationale,
    }
}
