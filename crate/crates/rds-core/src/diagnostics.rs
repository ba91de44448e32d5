//! Norms, run records, and the checkable ratios behind the regularity theory.
//!
//! Discrete norms are mesh-weighted: `||f||_p = (h^N * sum |f_i|^p)^(1/p)`
//! with the sup-norm at `p = inf`.  Space-time norms over `Q_T = (0,T) x box`
//! integrate `||f(t)||_p^p` by the trapezoid rule over sampled snapshots.
//!
//! Three trajectory functionals turn a priori estimates into numbers a test
//! can watch:
//!
//! * [`hmp_ratio`]: `||u||_{L^p(Q_t)} / (1 + ||w||_{L^p(Q_t)})` - the heat
//!   semigroup comparison bounds this uniformly in `t` (and symmetrically for
//!   `v` against `w`);
//! * [`duality_ratio`]: `||Z||_{L^2(Q_T)} / ||Z(0)||_{L^2}` for
//!   `Z = u + v + 2w`, together with the range of the diffusion mix
//!   `A = (d1 u + d2 v + 2 d3 w) / Z`, which must stay inside
//!   `[min d_i, max d_i]`;
//! * [`comparison_suprema`]: sup-norm ratios of `u + v + 2w`, `u + w`, and
//!   `u - v` against their initial values - each combination evolves by pure
//!   diffusion whenever the matching diffusivities coincide, so the ratio is
//!   capped at 1 by the discrete maximum principle.

use crate::grid::{Grid, ScalarField};
use crate::kinetics::Params;
use crate::stepper::{RunResult, State};
use crate::tol;

/// Norm orders recorded in every [`DiagnosticsRecord`].
pub const LP_RECORD_ORDERS: [f64; 2] = [1.0, 2.0];

/// Mesh-weighted L^p norm; `p` must be `>= 1` or `f64::INFINITY`.
pub fn norm_p(f: &ScalarField, g: &Grid, p: f64) -> f64 {
    assert_eq!(
        f.len(),
        g.cell_count(),
        "field size does not match the grid"
    );
    assert!(p >= 1.0, "norm order must be >= 1 or infinity, got {p}");
    if p.is_infinite() {
        return f.sup_abs();
    }
    moment(f, g, p).powf(1.0 / p)
}

/// `h^N * sum |f_i|^p`, the p-th power of the L^p norm.
fn moment(f: &ScalarField, g: &Grid, p: f64) -> f64 {
    let sum: f64 = if p == 1.0 {
        f.values().iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        f.values().iter().map(|v| v * v).sum()
    } else {
        f.values().iter().map(|v| v.abs().powf(p)).sum()
    };
    g.cell_measure() * sum
}

/// An L^p(Q_T) norm value carrying its order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeNorm {
    pub p: f64,
    pub value: f64,
}

/// Space-time norm over sampled snapshots `(t_k, f_k)`:
/// `( integral of ||f(t)||_p^p dt )^(1/p)` by the trapezoid rule.
///
/// Requires at least two samples with strictly increasing times and finite
/// `p >= 1` (contract violations otherwise).
pub fn spacetime_norm(samples: &[(f64, &ScalarField)], g: &Grid, p: f64) -> SpaceTimeNorm {
    assert!(
        samples.len() >= 2,
        "space-time norm needs at least two samples"
    );
    assert!(
        p.is_finite() && p >= 1.0,
        "space-time norm order must be finite and >= 1, got {p}"
    );
    let mut prev_t = samples[0].0;
    let mut prev_m = moment(samples[0].1, g, p);
    let mut integral = 0.0;
    for (t, f) in &samples[1..] {
        assert!(
            *t > prev_t,
            "sample times must be strictly increasing at t = {t}"
        );
        let m = moment(f, g, p);
        integral += 0.5 * (prev_m + m) * (t - prev_t);
        prev_t = *t;
        prev_m = m;
    }
    SpaceTimeNorm {
        p,
        value: integral.powf(1.0 / p),
    }
}

/// Diagnostics captured at one sample time.
///
/// `mass_drift` is the relative change of `integral(u + v + 2w)` against the
/// run's initial value; `uv_drift` tracks `integral(u - v)` the same way, with
/// the denominator floored by the initial mass so a vanishing initial
/// difference stays well defined.  `min_uvw` is the smallest entry over all
/// species at this sample; `lp_samples` holds `(||u||_p, ||v||_p, ||w||_p)`
/// for each order in [`LP_RECORD_ORDERS`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub dt: f64,
    pub linf_u: f64,
    pub linf_v: f64,
    pub linf_w: f64,
    pub l1_mass: f64,
    pub mass_drift: f64,
    pub uv_drift: f64,
    pub min_uvw: f64,
    pub lp_samples: Vec<(f64, [f64; 3])>,
}

/// `h^N * sum (u + v + 2w)`, the conserved combined mass.
pub fn combined_mass(s: &State, g: &Grid) -> f64 {
    let sum: f64 =
        s.u.values()
            .iter()
            .zip(s.v.values())
            .zip(s.w.values())
            .map(|((u, v), w)| u + v + 2.0 * w)
            .sum();
    g.cell_measure() * sum
}

/// `h^N * sum (u - v)`, the conserved species difference.
pub fn uv_mass(s: &State, g: &Grid) -> f64 {
    let sum: f64 =
        s.u.values()
            .iter()
            .zip(s.v.values())
            .map(|(u, v)| u - v)
            .sum();
    g.cell_measure() * sum
}

impl DiagnosticsRecord {
    /// Measures a state against the run's initial invariants `mass0`, `uv0`.
    pub fn measure(s: &State, g: &Grid, mass0: f64, uv0: f64) -> DiagnosticsRecord {
        let mass = combined_mass(s, g);
        let uv = uv_mass(s, g);
        let mass_scale = mass0.abs().max(tol::UV_DENOMINATOR_FLOOR);
        let uv_scale = uv0.abs().max(mass_scale);
        let lp_samples = LP_RECORD_ORDERS
            .iter()
            .map(|&p| {
                (
                    p,
                    [norm_p(&s.u, g, p), norm_p(&s.v, g, p), norm_p(&s.w, g, p)],
                )
            })
            .collect();
        DiagnosticsRecord {
            t: s.t,
            dt: s.dt,
            linf_u: s.u.sup_abs(),
            linf_v: s.v.sup_abs(),
            linf_w: s.w.sup_abs(),
            l1_mass: mass,
            mass_drift: (mass - mass0) / mass_scale,
            uv_drift: (uv - uv0) / uv_scale,
            min_uvw: s.min_component(),
            lp_samples,
        }
    }
}

/// Ratio `||psi||_{L^p(Q_t)} / (1 + ||phi||_{L^p(Q_t)})` for a sampled pair of
/// trajectories (typically `psi = u`, `phi = w`, or symmetrically `v` and
/// `w`).  Sample times of the two sequences must match exactly.
pub fn hmp_ratio(
    samples_psi: &[(f64, &ScalarField)],
    samples_phi: &[(f64, &ScalarField)],
    g: &Grid,
    p: f64,
) -> f64 {
    assert_eq!(
        samples_psi.len(),
        samples_phi.len(),
        "trajectory pair must have the same number of samples"
    );
    for ((t1, _), (t2, _)) in samples_psi.iter().zip(samples_phi) {
        assert!(t1 == t2, "misaligned sample times: {t1} vs {t2}");
    }
    let num = spacetime_norm(samples_psi, g, p).value;
    let den = 1.0 + spacetime_norm(samples_phi, g, p).value;
    num / den
}

/// Duality-estimate evidence for `Z = u + v + 2w`: returns
/// `(||Z||_{L^2(Q_T)} / ||Z(0)||_{L^2}, A_min, A_max)` where `A` is the
/// convex diffusion mix `(d1 u + d2 v + 2 d3 w) / Z` over every sampled cell
/// (`A = d3` where `Z = 0`).
pub fn duality_ratio(result: &RunResult, g: &Grid, p: &Params) -> (f64, f64, f64) {
    assert!(
        result.snapshots.len() >= 2,
        "duality ratio needs at least two snapshots"
    );
    let z_fields: Vec<ScalarField> = result
        .snapshots
        .iter()
        .map(|s| {
            let values =
                s.u.values()
                    .iter()
                    .zip(s.v.values())
                    .zip(s.w.values())
                    .map(|((u, v), w)| u + v + 2.0 * w)
                    .collect();
            ScalarField::from_values(g, values).expect("snapshot fields are finite")
        })
        .collect();
    let samples: Vec<(f64, &ScalarField)> = result
        .snapshots
        .iter()
        .map(|s| s.t)
        .zip(z_fields.iter())
        .collect();
    let num = spacetime_norm(&samples, g, 2.0).value;
    let den = norm_p(&z_fields[0], g, 2.0);
    assert!(
        den > 0.0,
        "initial combined field must not vanish identically"
    );

    let mut a_min = f64::INFINITY;
    let mut a_max = f64::NEG_INFINITY;
    for snap in &result.snapshots {
        for ((u, v), w) in snap
            .u
            .values()
            .iter()
            .zip(snap.v.values())
            .zip(snap.w.values())
        {
            let z = u + v + 2.0 * w;
            let a = if z == 0.0 {
                p.d3
            } else {
                (p.d1 * u + p.d2 * v + 2.0 * p.d3 * w) / z
            };
            a_min = a_min.min(a);
            a_max = a_max.max(a);
        }
    }
    (num / den, a_min, a_max)
}

/// Sup-norm comparison ratios over the sampled trajectory:
///
/// * `r_total = sup_t ||u + v + 2w||_inf / ||u0 + v0 + 2w0||_inf`
/// * `r_uw    = sup_t ||u + w||_inf     / ||u0 + w0||_inf`
/// * `r_uv    = sup_t ||u - v||_inf     / max(||u0 - v0||_inf, floor)`
///
/// The `u - v` denominator is floored at [`tol::UV_DENOMINATOR_FLOOR`] so an
/// identically symmetric start stays well defined.
pub fn comparison_suprema(result: &RunResult) -> (f64, f64, f64) {
    assert!(
        !result.snapshots.is_empty(),
        "comparison needs at least one snapshot"
    );
    let sup3 = |s: &crate::stepper::FieldSnapshot, f: &dyn Fn(f64, f64, f64) -> f64| -> f64 {
        s.u.values()
            .iter()
            .zip(s.v.values())
            .zip(s.w.values())
            .map(|((&u, &v), &w)| f(u, v, w).abs())
            .fold(0.0_f64, f64::max)
    };
    let total = |u: f64, v: f64, w: f64| u + v + 2.0 * w;
    let uw = |u: f64, _v: f64, w: f64| u + w;
    let uv = |u: f64, v: f64, _w: f64| u - v;

    let first = &result.snapshots[0];
    let den_total = sup3(first, &total);
    let den_uw = sup3(first, &uw);
    let den_uv = sup3(first, &uv).max(tol::UV_DENOMINATOR_FLOOR);

    let mut r_total = 0.0_f64;
    let mut r_uw = 0.0_f64;
    let mut r_uv = 0.0_f64;
    for snap in &result.snapshots {
        r_total = r_total.max(sup3(snap, &total) / den_total);
        r_uw = r_uw.max(sup3(snap, &uw) / den_uw);
        r_uv = r_uv.max(sup3(snap, &uv) / den_uv);
    }
    (r_total, r_uw, r_uv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryCondition;
    use crate::stepper::{run, RunStatus, StepControl};
    use proptest::prelude::*;

    fn grid1(n: usize) -> Grid {
        Grid::new(1, n, 1.0, BoundaryCondition::Neumann).unwrap()
    }

    fn params111() -> Params {
        Params::new(1.0, 2.0, 3.0, 1.0, 1.0, 1.0, 1).unwrap()
    }

    fn equilibrium_run(t_end: f64) -> (RunResult, Grid) {
        let g = grid1(16);
        let p = params111();
        let c = StepControl::new(1e-3, 1e-12, 1e-2, 0.9, 1e12, 0.25, 1.2).unwrap();
        let s = State::new(
            0.0,
            1e-3,
            ScalarField::constant(&g, 1.0),
            ScalarField::constant(&g, 1.0),
            ScalarField::constant(&g, 1.0),
            &g,
        )
        .unwrap();
        let r = run(s, &p, &g, &c, t_end);
        assert_eq!(r.status, RunStatus::ReachedT);
        (r, g)
    }

    #[test]
    fn norm_closed_forms() {
        let g = grid1(10);
        let c = ScalarField::constant(&g, 3.0);
        // Constant c on (0, 1): every L^p norm is c.
        for p in [1.0, 2.0, 5.0, f64::INFINITY] {
            assert!((norm_p(&c, &g, p) - 3.0).abs() <= 1e-12, "p = {p}");
        }
        // One-hot spike of height 1: ||f||_1 = h, ||f||_2 = sqrt(h),
        // ||f||_inf = 1.
        let mut vals = vec![0.0; 10];
        vals[4] = 1.0;
        let spike = ScalarField::from_values(&g, vals).unwrap();
        let h = g.spacing();
        assert!((norm_p(&spike, &g, 1.0) - h).abs() <= 1e-15);
        assert!((norm_p(&spike, &g, 2.0) - h.sqrt()).abs() <= 1e-15);
        assert_eq!(norm_p(&spike, &g, f64::INFINITY), 1.0);
    }

    #[test]
    #[should_panic(expected = "norm order")]
    fn norm_rejects_small_p() {
        let g = grid1(4);
        norm_p(&ScalarField::constant(&g, 1.0), &g, 0.5);
    }

    #[test]
    fn spacetime_norm_of_constant_trajectory() {
        // Constant c over [0, T] on (0, 1): ||f||_{L^p(Q_T)} = c * T^(1/p).
        let g = grid1(8);
        let c = ScalarField::constant(&g, 2.0);
        let samples: Vec<(f64, &ScalarField)> = (0..=4).map(|k| (k as f64 * 0.5, &c)).collect();
        let got = spacetime_norm(&samples, &g, 2.0).value;
        let expected = 2.0 * 2.0_f64.sqrt();
        assert!(
            (got - expected).abs() <= 1e-12,
            "got {got}, expected {expected}"
        );
    }

    #[test]
    fn spacetime_norm_integrates_linear_ramp_exactly() {
        // f(t) = t * 1 with p = 1: the integrand ||f||_1 = t is linear, so the
        // trapezoid rule is exact: integral = T^2 / 2 = 0.5.
        let g = grid1(8);
        let fields: Vec<ScalarField> = (0..=10)
            .map(|k| ScalarField::constant(&g, k as f64 * 0.1))
            .collect();
        let samples: Vec<(f64, &ScalarField)> = fields
            .iter()
            .enumerate()
            .map(|(k, f)| (k as f64 * 0.1, f))
            .collect();
        let got = spacetime_norm(&samples, &g, 1.0).value;
        assert!((got - 0.5).abs() <= 1e-12, "got {got}");
    }

    #[test]
    #[should_panic(expected = "strictly increasing")]
    fn spacetime_norm_rejects_unsorted_times() {
        let g = grid1(4);
        let f = ScalarField::constant(&g, 1.0);
        spacetime_norm(&[(0.0, &f), (0.5, &f), (0.5, &f)], &g, 1.0);
    }

    #[test]
    fn hmp_ratio_closed_forms() {
        let g = grid1(8);
        // Identically zero psi: ratio 0 regardless of phi.
        let zero = ScalarField::constant(&g, 0.0);
        let one = ScalarField::constant(&g, 1.0);
        let times = [0.0, 0.5, 1.0];
        let zs: Vec<(f64, &ScalarField)> = times.iter().map(|&t| (t, &zero)).collect();
        let os: Vec<(f64, &ScalarField)> = times.iter().map(|&t| (t, &one)).collect();
        assert_eq!(hmp_ratio(&zs, &os, &g, 2.0), 0.0);
        // Unit equilibrium over T = 1: ||u|| = ||w|| = 1, ratio = 1/2.
        let r = hmp_ratio(&os, &os, &g, 2.0);
        assert!((r - 0.5).abs() <= 1e-12, "got {r}");
    }

    #[test]
    #[should_panic(expected = "misaligned")]
    fn hmp_ratio_rejects_misaligned_times() {
        let g = grid1(4);
        let f = ScalarField::constant(&g, 1.0);
        hmp_ratio(&[(0.0, &f), (1.0, &f)], &[(0.0, &f), (0.5, &f)], &g, 2.0);
    }

    #[test]
    fn duality_ratio_on_equilibrium_is_sqrt_t() {
        // Z = 4 identically: ||Z||_{L^2(Q_T)} / ||Z0||_2 = sqrt(T); every
        // diffusion mix equals (d1 + d2 + 2 d3) / 4 = 9/4.
        let (r, g) = equilibrium_run(1.0);
        let p = params111();
        let (ratio, a_min, a_max) = duality_ratio(&r, &g, &p);
        assert!((ratio - 1.0).abs() <= 1e-6, "sqrt(1) expected, got {ratio}");
        assert!((a_min - 2.25).abs() <= 1e-10);
        assert!((a_max - 2.25).abs() <= 1e-10);
    }

    #[test]
    fn duality_mix_stays_between_extreme_diffusivities() {
        let g = grid1(24);
        let p = Params::new(0.5, 2.0, 4.0, 1.0, 2.0, 3.0, 1).unwrap();
        let c = StepControl::new(1e-3, 1e-12, 1e-2, 0.9, 1e12, 0.25, 1.2).unwrap();
        let u = ScalarField::from_axis_fn(&g, |x| 1.0 + 0.5 * (std::f64::consts::PI * x[0]).cos());
        let v = ScalarField::constant(&g, 0.7);
        let w = ScalarField::from_axis_fn(&g, |x| 0.2 + 0.2 * x[0]);
        let s = State::new(0.0, 1e-3, u, v, w, &g).unwrap();
        let result = run(s, &p, &g, &c, 1.0);
        assert_eq!(result.status, RunStatus::ReachedT);
        let (_, a_min, a_max) = duality_ratio(&result, &g, &p);
        let slack = 1e-12 * 4.0;
        assert!(a_min >= 0.5 - slack, "A_min = {a_min} fell below min d_i");
        assert!(a_max <= 4.0 + slack, "A_max = {a_max} rose above max d_i");
    }

    #[test]
    fn comparison_suprema_on_equilibrium() {
        let (r, _g) = equilibrium_run(1.0);
        let (r_total, r_uw, r_uv) = comparison_suprema(&r);
        assert!((r_total - 1.0).abs() <= 1e-10, "r_total = {r_total}");
        assert!((r_uw - 1.0).abs() <= 1e-10, "r_uw = {r_uw}");
        // The equilibrium is a bit-exact fixed point of the full step, so the
        // u - v numerator is exactly zero over the floored denominator.
        assert!(r_uv == 0.0, "r_uv = {r_uv}");
    }

    proptest! {
        /// Positive homogeneity: ||c f||_p = |c| ||f||_p.
        #[test]
        fn norm_homogeneity(
            raw in proptest::collection::vec(-3.0_f64..3.0, 12),
            scale in -4.0_f64..4.0,
            p_sel in 0_usize..4,
        ) {
            let g = grid1(12);
            let p = [1.0, 2.0, 3.5, f64::INFINITY][p_sel];
            let f = ScalarField::from_values(&g, raw.clone()).unwrap();
            let scaled = ScalarField::from_values(
                &g, raw.iter().map(|v| v * scale).collect()).unwrap();
            let lhs = norm_p(&scaled, &g, p);
            let rhs = scale.abs() * norm_p(&f, &g, p);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0),
                "homogeneity broke: {lhs} vs {rhs}");
        }

        /// Norms are nested on a finite box:
        /// ||f||_p <= |box|^(1/p - 1/q) ||f||_q for p <= q.
        #[test]
        fn norm_holder_containment(
            raw in proptest::collection::vec(-5.0_f64..5.0, 15),
            p in 1.0_f64..6.0,
            dq in 0.0_f64..6.0,
            length in 0.5_f64..3.0,
        ) {
            let g = Grid::new(1, 15, length, BoundaryCondition::Neumann).unwrap();
            let q = p + dq;
            let f = ScalarField::from_values(&g, raw).unwrap();
            let lhs = norm_p(&f, &g, p);
            let bound = g.domain_measure().powf(1.0 / p - 1.0 / q) * norm_p(&f, &g, q);
            prop_assert!(lhs <= bound * (1.0 + 1e-12),
                "containment broke: {lhs} > {bound}");
        }

        /// p-th power additivity: the norm over a concatenation of [0, T1] and
        /// [T1, T2] matches the norm over [0, T2].
        #[test]
        fn spacetime_norm_is_additive_in_time(
            values in proptest::collection::vec(0.1_f64..4.0, 7),
            p in 1.0_f64..4.0,
            cut in 1_usize..6,
        ) {
            let g = grid1(6);
            let fields: Vec<ScalarField> =
                values.iter().map(|&v| ScalarField::constant(&g, v)).collect();
            let samples: Vec<(f64, &ScalarField)> = fields
                .iter().enumerate().map(|(k, f)| (k as f64 * 0.3, f)).collect();
            let whole = spacetime_norm(&samples, &g, p).value;
            let left = spacetime_norm(&samples[..=cut], &g, p).value;
            let right = spacetime_norm(&samples[cut..], &g, p).value;
            let glued = (left.powf(p) + right.powf(p)).powf(1.0 / p);
            prop_assert!((whole - glued).abs() <= 1e-12 * whole.max(1.0),
                "additivity broke: {whole} vs {glued}");
        }
    }
}
