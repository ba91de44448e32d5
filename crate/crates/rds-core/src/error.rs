//! Error type shared by the solver and verification modules.
//!
//! The crate distinguishes two failure families:
//!
//! * **Recoverable errors** (this enum): invalid user-supplied data, infeasible
//!   invariants, an ODE oracle step that undershoots zero, or a time step forced
//!   below the configured floor.  Callers can report these and continue.
//! * **Contract violations** (panics): mismatched field sizes, non-positive
//!   steps, out-of-range norm orders, unsorted sample sequences.  These are
//!   programming errors in the caller and are enforced with `assert!`.

use thiserror::Error;

/// Recoverable errors produced by constructors and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Grid construction rejected its arguments.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Parameter validation failed (diffusivities must be positive and finite,
    /// stoichiometric exponents must be >= 1, dimension >= 1).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Step-control validation failed.
    #[error("invalid step control: {0}")]
    InvalidControl(String),

    /// A field was built from data that is not finite and nonnegative, or has
    /// the wrong number of entries for its grid.
    #[error("invalid field data: {0}")]
    InvalidField(String),

    /// No nonnegative equilibrium exists for the requested invariants
    /// (requires m1 >= 0 and |m2| <= m1).
    #[error("infeasible invariants: m1 = {m1}, m2 = {m2} (need m1 >= 0 and |m2| <= m1)")]
    InfeasibleInvariants { m1: f64, m2: f64 },

    /// The well-mixed ODE oracle produced a component below the negativity
    /// floor; the caller should retry with a smaller oracle step.
    #[error("oracle step too large: component reached {value} at t = {t}; halve dt and retry")]
    OracleStepTooLarge { t: f64, value: f64 },

    /// The positivity limiter demanded a step below `dt_min`.  Treated as a
    /// suspected blow-up of the reaction rate.
    #[error(
        "time step underflow at t = {t}: positivity requires dt = {required}, floor is {dt_min}"
    )]
    DtUnderflow { t: f64, required: f64, dt_min: f64 },

    /// A smoothing ratio was requested for an identically zero field, which
    /// would divide by a zero norm.
    #[error("zero field: smoothing ratio is undefined when the input norm vanishes")]
    ZeroField,
}
