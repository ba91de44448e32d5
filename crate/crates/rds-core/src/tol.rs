//! Centralized numerical tolerances and discretization constants.
//!
//! Every tolerance used by the library proper lives here with a rationale, so
//! that a change in one place is visible everywhere it matters.  Test-only
//! tolerances (acceptance bands, convergence-order windows) live with the
//! tests that use them.

/// Relative tolerance for identities that hold exactly in real arithmetic and
/// only accumulate rounding error in floating point: discrete mass
/// conservation under Neumann steps, real-parameter equality in the regime
/// classifier, and the duality-coefficient range check.  1e-12 leaves roughly
/// four orders of magnitude of headroom above f64 epsilon for accumulation
/// over many steps.
pub const EXACT_REL: f64 = 1e-12;

/// Absolute half-width at which the equilibrium bisection may stop.  The
/// solver actually iterates further (to a few ulp) because each iteration is
/// cheap; this constant is the guaranteed contract.
pub const BISECT_ABS: f64 = 1e-13;

/// Most negative value any component of the well-mixed ODE oracle may take
/// before the oracle reports that its step is too large.  RK4 on the reversible
/// mass-action system can undershoot zero transiently by rounding; genuine
/// negativity signals a step-size problem the caller must fix.
pub const ODE_NEGATIVITY_FLOOR: f64 = -1e-10;

/// Floor applied to the denominator of the u - v comparison supremum so the
/// ratio is well defined when the initial difference vanishes identically.
pub const UV_DENOMINATOR_FLOOR: f64 = 1e-300;

/// Number of backward-Euler substeps used by `smoothing_ratio` to approximate
/// the heat semigroup at a given time.  First-order substepping with 128
/// substeps resolves the decay of every mode that still matters for the
/// sup-norm at the times swept by the smoothing checks (1e-3 <= t <= 1).
pub const SMOOTHING_SUBSTEPS: usize = 128;

/// Relative slack used when snapping the integrator clock onto a sample time:
/// a remaining gap below `SNAP_REL * max(1, |target|)` is closed by setting
/// the clock to the target instead of taking a subnormal step.
pub const SNAP_REL: f64 = 1e-12;
