//! Reversible mass-action kinetics for the three-species reaction
//! `alpha U + beta V <-> gamma W`.
//!
//! The shared reaction rate is `R(u, v, w) = w^gamma - u^alpha v^beta`; species
//! `u` and `v` gain `+R` while `w` loses `-R`, so the combinations `u + v + 2w`
//! and `u - v` are conserved by the reaction alone.  This module provides the
//! rate itself, the unique nonnegative spatially uniform equilibrium for given
//! conserved invariants, and a well-mixed RK4 oracle used to cross-check the
//! PDE stepper on uniform data.

use crate::error::Error;
use crate::tol;

/// Diffusivities, stoichiometric exponents, and the space dimension used by
/// the regime classifier.  Construct through [`Params::new`], which enforces
/// positive finite diffusivities, exponents `>= 1`, and `dim >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub dim: usize,
}

impl Params {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d1: f64,
        d2: f64,
        d3: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        dim: usize,
    ) -> Result<Params, Error> {
        for (name, d) in [("d1", d1), ("d2", d2), ("d3", d3)] {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive and finite, got {d}"
                )));
            }
        }
        for (name, e) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(e.is_finite() && e >= 1.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be >= 1 and finite, got {e}"
                )));
            }
        }
        if dim == 0 {
            return Err(Error::InvalidParams("dim must be >= 1".into()));
        }
        Ok(Params {
            d1,
            d2,
            d3,
            alpha,
            beta,
            gamma,
            dim,
        })
    }
}

/// Spatially uniform equilibrium `(u_bar, v_bar, w_bar)` together with the
/// conserved invariants it realizes: `m1 = u_bar + v_bar + 2 w_bar` and
/// `m2 = u_bar - v_bar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub u_bar: f64,
    pub v_bar: f64,
    pub w_bar: f64,
    pub m1: f64,
    pub m2: f64,
}

/// `x^a` for `x >= 0`, `a >= 1`, with the convention `0^a = 0`.  Inputs below
/// zero (interval-endpoint rounding inside the equilibrium solver, RK4 stage
/// excursions in the oracle) are treated as zero, extending the rate
/// continuously.
fn pow_nonneg(x: f64, a: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(a)
    }
}

/// Shared mass-action rate `R = w^gamma - u^alpha v^beta`.
///
/// All three inputs must be nonnegative and finite (contract violation
/// otherwise): species gain `(+R, +R, -R)` respectively.
pub fn reaction_rate(u: f64, v: f64, w: f64, p: &Params) -> f64 {
    debug_assert!(
        u >= 0.0 && v >= 0.0 && w >= 0.0,
        "reaction_rate requires nonnegative concentrations, got ({u}, {v}, {w})"
    );
    assert!(
        u.is_finite() && v.is_finite() && w.is_finite(),
        "reaction_rate requires finite concentrations, got ({u}, {v}, {w})"
    );
    pow_nonneg(w, p.gamma) - pow_nonneg(u, p.alpha) * pow_nonneg(v, p.beta)
}

/// Uniform states on the invariant manifold: `u = (m1 - 2w + m2)/2`,
/// `v = (m1 - 2w - m2)/2`, clamped at zero against endpoint rounding.
fn uniform_state(w: f64, m1: f64, m2: f64) -> (f64, f64) {
    let u = 0.5 * (m1 - 2.0 * w + m2);
    let v = 0.5 * (m1 - 2.0 * w - m2);
    (u.max(0.0), v.max(0.0))
}

/// Solves for the unique nonnegative uniform equilibrium with invariants
/// `m1 = u + v + 2w` and `m2 = u - v`.
///
/// Feasibility requires `m1 >= 0` and `|m2| <= m1`
/// ([`Error::InfeasibleInvariants`] otherwise).  The balance function
/// `g(w) = u(w)^alpha v(w)^beta - w^gamma` is strictly decreasing on
/// `[0, (m1 - |m2|)/2]` with `g(0) >= 0` and `g <= 0` at the right endpoint,
/// so bisection converges; the iteration continues to a few ulp, well inside
/// the guaranteed [`tol::BISECT_ABS`] half-width.
pub fn equilibrium(p: &Params, m1: f64, m2: f64) -> Result<Equilibrium, Error> {
    assert!(
        m1.is_finite() && m2.is_finite(),
        "invariants must be finite, got ({m1}, {m2})"
    );
    if m1 < 0.0 || m2.abs() > m1 {
        return Err(Error::InfeasibleInvariants { m1, m2 });
    }
    if m1 == 0.0 {
        return Ok(Equilibrium {
            u_bar: 0.0,
            v_bar: 0.0,
            w_bar: 0.0,
            m1,
            m2,
        });
    }
    let w_hi = 0.5 * (m1 - m2.abs());
    let balance = |w: f64| {
        let (u, v) = uniform_state(w, m1, m2);
        pow_nonneg(u, p.alpha) * pow_nonneg(v, p.beta) - pow_nonneg(w, p.gamma)
    };
    let w_bar = if w_hi <= 0.0 {
        // |m2| = m1: one species is exhausted, so both sides of the reaction
        // vanish at w = 0 and the balance holds exactly.
        0.0
    } else {
        let (mut lo, mut hi) = (0.0_f64, w_hi);
        let mut iterations = 0;
        while hi - lo > f64::EPSILON * hi.max(1.0) && iterations < 200 {
            let mid = 0.5 * (lo + hi);
            if balance(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        debug_assert!(hi - lo <= tol::BISECT_ABS * w_hi.max(1.0));
        0.5 * (lo + hi)
    };
    let (u_bar, v_bar) = uniform_state(w_bar, m1, m2);
    Ok(Equilibrium {
        u_bar,
        v_bar,
        w_bar,
        m1,
        m2,
    })
}

/// Classical RK4 on the well-mixed system `(u, v, w)' = (R, R, -R)`.
///
/// Integrates to exactly `t_end` using `ceil(t_end / dt)` equal steps of size
/// `<= dt`.  Nothing is clamped: if any accepted component falls below
/// [`tol::ODE_NEGATIVITY_FLOOR`] the oracle reports
/// [`Error::OracleStepTooLarge`] and the caller should halve `dt`.  Being a
/// Runge-Kutta method, it conserves the linear invariants `u + v + 2w` and
/// `u - v` to rounding.
pub fn ode_oracle(
    u0: f64,
    v0: f64,
    w0: f64,
    p: &Params,
    t_end: f64,
    dt: f64,
) -> Result<(f64, f64, f64), Error> {
    assert!(
        u0 >= 0.0 && v0 >= 0.0 && w0 >= 0.0,
        "oracle requires nonnegative initial data, got ({u0}, {v0}, {w0})"
    );
    assert!(
        t_end.is_finite() && t_end >= 0.0,
        "t_end must be nonnegative, got {t_end}"
    );
    if t_end == 0.0 {
        return Ok((u0, v0, w0));
    }
    assert!(
        dt.is_finite() && dt > 0.0 && dt <= t_end,
        "need 0 < dt <= t_end, got dt = {dt}"
    );

    // Stage evaluations may step slightly outside the positive cone; the rate
    // extends by zero there (see `pow_nonneg`), while accepted states are held
    // to the negativity floor below.
    let rate = |y: [f64; 3]| {
        pow_nonneg(y[2], p.gamma) - pow_nonneg(y[0], p.alpha) * pow_nonneg(y[1], p.beta)
    };
    let rhs = |y: [f64; 3]| {
        let r = rate(y);
        [r, r, -r]
    };
    let add =
        |y: [f64; 3], k: [f64; 3], s: f64| [y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2]];

    let steps = (t_end / dt).ceil() as u64;
    let h = t_end / steps as f64;
    let mut y = [u0, v0, w0];
    for step in 0..steps {
        let k1 = rhs(y);
        let k2 = rhs(add(y, k1, 0.5 * h));
        let k3 = rhs(add(y, k2, 0.5 * h));
        let k4 = rhs(add(y, k3, h));
        for i in 0..3 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = (step + 1) as f64 * h;
        if let Some(&value) = y.iter().find(|&&c| c < tol::ODE_NEGATIVITY_FLOOR) {
            return Err(Error::OracleStepTooLarge { t, value });
        }
    }
    Ok((y[0], y[1], y[2]))
}
