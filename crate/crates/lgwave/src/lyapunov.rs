//! Descent functionals that certify the right-hand limits of wave orbits.
//!
//! Three LaSalle-style constructions are implemented. Each supplies a scalar
//! `L` that is non-increasing along orbits of the wave system together with
//! its closed-form orbital derivative `L'`, non-positive on the relevant
//! region and vanishing only at the target equilibrium:
//!
//! * [`LyapunovKind::Coexistence`] — built from prey and predator potentials
//!   shaped by the kinetics; certifies convergence to the coexistence state
//!   for models with unit capacity slope whose prey potential is convex.
//! * [`LyapunovKind::PreyFree`] — a linear prey term weighted by a constant
//!   `rho` from an admissible interval; certifies convergence to the
//!   prey-free state `(0, mu)` under strong predation.
//! * [`LyapunovKind::LotkaVolterraNovel`] — a sharper quadratic-form
//!   construction special to Lotka-Volterra kinetics that certifies the
//!   coexistence limit for a strictly wider range of predation strengths
//!   than the generic coexistence functional.
//!
//! The orbital derivatives are evaluated from their simplified closed forms
//! (the testable content of each construction), not by differentiating `L`
//! numerically; agreement with `dL/dz` along integrated orbits is kept as an
//! independent property test.

use crate::analysis::positive_equilibrium;
use crate::model::{ModelKind, ModelSpec};
use crate::numerics::adaptive_simpson;
use crate::waveode::{check_derivative_estimates, Profile};
use crate::{Error, Result};

/// Which descent functional to evaluate, with its free constant where the
/// construction has one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LyapunovKind {
    /// Potential-based functional targeting the coexistence state. Requires
    /// unit capacity slope (`h == 1`) and an interior coexistence state.
    Coexistence,
    /// Functional targeting the prey-free state `(0, mu)`. `rho` weighs the
    /// linear prey term and must lie strictly inside the interval returned
    /// by [`preyfree_rho_interval`].
    PreyFree { rho: f64 },
    /// Quadratic-form functional for Lotka-Volterra kinetics targeting the
    /// coexistence state. `rho` weighs the predator potential;
    /// `rho * s` must lie strictly inside the band returned by
    /// [`novel_rho_band`].
    LotkaVolterraNovel { rho: f64 },
}

/// Admissible open interval `(lo, hi)` for the prey-free weight `rho`:
///
/// ```text
/// s h(1) / (mu min g)  <  rho  <  s mu h(0) / (h(1) + mu)
/// ```
///
/// Nonempty exactly when [`crate::analysis::preyfree_condition`] holds.
pub fn preyfree_rho_interval(model: &ModelSpec) -> (f64, f64) {
    let h1 = model.h(1.0);
    let h0 = model.h(0.0);
    let lo = model.s * h1 / (model.mu * model.min_g_on_unit());
    let hi = model.s * model.mu * h0 / (h1 + model.mu);
    (lo, hi)
}

/// Midpoint of the admissible prey-free interval — deterministic and with
/// maximal margin to both endpoints.
pub fn select_rho_preyfree(model: &ModelSpec) -> Result<f64> {
    let (lo, hi) = preyfree_rho_interval(model);
    if lo < hi {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::EmptyInterval { lo, hi })
    }
}

fn lv_strength(model: &ModelSpec) -> Result<f64> {
    match model.kind {
        ModelKind::LotkaVolterra { a } => Ok(a),
        _ => Err(Error::Precondition(format!(
            "the quadratic-form functional needs lotka-volterra kinetics, got {}",
            model.kind.label()
        ))),
    }
}

fn coexistence_state(model: &ModelSpec) -> Result<[f64; 2]> {
    positive_equilibrium(model)
        .ok_or_else(|| Error::Precondition("no interior coexistence state".into()))
}

/// Roots `(r_minus, r_plus)` of the quadratic
/// `x^2 - 2(a + 2) b x + a^2 b^2` with `b = u + u* + mu`: for
/// `r_minus < rho s < r_plus` the cross term of the quadratic-form
/// functional is dominated at prey density `u`. Closed form:
/// `r_pm = b (sqrt(a + 1) ∓ 1)^2`.
pub fn quadratic_band(model: &ModelSpec, u: f64) -> Result<(f64, f64)> {
    let a = lv_strength(model)?;
    let [u_star, _] = coexistence_state(model)?;
    let b = u + u_star + model.mu;
    let root = (a + 1.0).sqrt();
    Ok((b * (root - 1.0).powi(2), b * (root + 1.0).powi(2)))
}

/// Admissible band `(lo, hi)` for `rho * s` in the quadratic-form
/// functional: the lower root maximized over `u` in `(0, 1)` against the
/// upper root minimized over it. Both roots are linear and increasing in
/// `u`, so the extrema sit at the interval endpoints.
pub fn novel_rho_band(model: &ModelSpec) -> Result<(f64, f64)> {
    let (lo, _) = quadratic_band(model, 1.0)?;
    let (_, hi) = quadratic_band(model, 0.0)?;
    Ok((lo, hi))
}

/// Midpoint selection for the quadratic-form weight: `rho * s` is placed at
/// the center of the admissible band and `rho` returned.
pub fn select_rho_novel(model: &ModelSpec) -> Result<f64> {
    let (lo, hi) = novel_rho_band(model)?;
    if lo < hi {
        Ok(0.5 * (lo + hi) / model.s)
    } else {
        Err(Error::EmptyInterval { lo, hi })
    }
}

/// The bracketed coefficient of the cross term in the prey-free orbital
/// derivative:
///
/// ```text
/// C(u, v) = 1 - g(u) v + s (v - mu) h(u) / (rho q(u))
/// ```
///
/// For `rho` inside the admissible interval, `C < 0` on
/// `u in [0, 1], v in [0, q(1)]`, which makes the cross term a strict sink.
pub fn preyfree_cross_coefficient(model: &ModelSpec, rho: f64, u: f64, v: f64) -> f64 {
    1.0 - model.g(u) * v + model.s * (v - model.mu) * model.h(u) / (rho * model.q(u))
}

/// Evaluate the functional `L` and its orbital derivative `L'` at one state
/// `(u, w, v, y)` of the wave system with speed `c`.
///
/// `L` depends on the speed; `L'` does not (the speed cancels when the wave
/// equations are substituted). The predator density must be positive for
/// every kind; the prey density must be positive for the two coexistence
/// functionals and nonnegative for the prey-free one (whose target
/// equilibrium itself has `u = 0`).
pub fn lyapunov_value(
    kind: &LyapunovKind,
    model: &ModelSpec,
    c: f64,
    state: [f64; 4],
) -> Result<(f64, f64)> {
    let [u, w, v, y] = state;
    if !(v > 0.0) {
        return Err(Error::Domain(format!(
            "predator density must be positive, got v = {v}"
        )));
    }
    match *kind {
        LyapunovKind::Coexistence => {
            if !(u > 0.0) {
                return Err(Error::Domain(format!(
                    "prey density must be positive, got u = {u}"
                )));
            }
            coexistence_value(model, c, u, w, v, y)
        }
        LyapunovKind::PreyFree { rho } => {
            if !(u >= 0.0) {
                return Err(Error::Domain(format!(
                    "prey density must be nonnegative, got u = {u}"
                )));
            }
            let (lo, hi) = preyfree_rho_interval(model);
            if !(rho > lo && rho < hi) {
                return Err(Error::Precondition(format!(
                    "rho = {rho} is outside the admissible interval ({lo}, {hi})"
                )));
            }
            Ok(preyfree_value(model, rho, c, u, w, v, y))
        }
        LyapunovKind::LotkaVolterraNovel { rho } => {
            if !(u > 0.0) {
                return Err(Error::Domain(format!(
                    "prey density must be positive, got u = {u}"
                )));
            }
            let (lo, hi) = novel_rho_band(model)?;
            let rs = rho * model.s;
            if !(rs > lo && rs < hi) {
                return Err(Error::Precondition(format!(
                    "rho s = {rs} is outside the admissible band ({lo}, {hi})"
                )));
            }
            novel_value(model, rho, c, u, w, v, y)
        }
    }
}

fn coexistence_value(
    model: &ModelSpec,
    c: f64,
    u: f64,
    w: f64,
    v: f64,
    y: f64,
) -> Result<(f64, f64)> {
    if !model.has_unit_h() {
        return Err(Error::Precondition(
            "the coexistence functional needs unit capacity slope (h == 1)".into(),
        ));
    }
    let [us, vs] = coexistence_state(model)?;
    // Prey potential by adaptive quadrature; predator potential in closed
    // (logarithmic) form so that no quadrature error enters near v -> 0
    // where the integrand is singular.
    let hu = adaptive_simpson(
        &|e: f64| (e - us) / (model.q(e) * model.f(e)),
        us,
        u,
        1e-12,
    );
    let hv = (v - vs - vs * (v / vs).ln()) / model.s;
    let du_h = (u - us) / (model.f(u) * model.q(u));
    let dv_h = (v - vs) / (model.s * v);
    let l = c * (hu + hv) - w * du_h - model.d * y * dv_h;

    let qu = u + model.mu;
    let fu = model.f(u);
    let duu_h = ((us + model.mu) * fu - (u - us) * (u + model.mu) * model.df(u))
        / (qu * qu * fu * fu);
    let dvv_h = vs / (model.s * v * v);
    let lp = ((u - us) * (model.p(u) - model.p(us)) - (v - vs) * (v - vs)) / qu
        - w * w * duu_h
        - model.d * y * y * dvv_h;
    Ok((l, lp))
}

fn preyfree_value(
    model: &ModelSpec,
    rho: f64,
    c: f64,
    u: f64,
    w: f64,
    v: f64,
    y: f64,
) -> (f64, f64) {
    let q0 = model.mu;
    let l = rho * (c * u - w) + c * (v - q0 - q0 * (v / q0).ln()) - model.d * y
        + model.d * q0 * y / v;
    let cross = preyfree_cross_coefficient(model, rho, u, v);
    let lp = -rho * u * u
        - model.s * (v - q0) * (v - q0) / model.q(u)
        - model.d * q0 * (y / v) * (y / v)
        + rho * u * cross;
    (l, lp)
}

fn novel_value(
    model: &ModelSpec,
    rho: f64,
    c: f64,
    u: f64,
    w: f64,
    v: f64,
    y: f64,
) -> Result<(f64, f64)> {
    let a = lv_strength(model)?;
    let e2 = model.mu;
    let [us, vs] = coexistence_state(model)?;
    // Prey potential in closed form:
    //   int_{u*}^{u} 1 - u*(u* + e2)/((e + e2) e) de
    //     = (u - u*) - (u*(u* + e2)/e2) [ln(e/(e + e2))]_{u*}^{u}.
    let hu = (u - us)
        - (us * (us + e2) / e2) * ((u / (u + e2)).ln() - (us / (us + e2)).ln());
    let hv = rho * (v - vs - vs * (v / vs).ln());
    let du_h = (u + us + e2) * (u - us) / ((u + e2) * u);
    let dv_h = rho * (v - vs) / v;
    let l = c * (hu + hv) - w * du_h - model.d * y * dv_h;

    let quad = (u + us + e2) * (u - us) * (1.0 - u - a * v)
        + rho * model.s * (v - vs) * (u + e2 - v);
    let denom = (u + e2) * u;
    let duu_h = us * (us + e2) * (2.0 * u + e2) / (denom * denom);
    let dvv_h = rho * vs / (v * v);
    let lp = quad / (u + e2) - w * w * duu_h - model.d * y * y * dvv_h;
    Ok((l, lp))
}

/// Tolerance for the pointwise descent checks: `L` may increase between
/// consecutive grid points, and `L'` may exceed zero, by at most this much.
pub const DESCENT_TOL: f64 = 1e-8;

/// Outcome of scanning a functional along a profile.
#[derive(Clone, Debug)]
pub struct DescentReport {
    /// Largest increase of `L` between consecutive grid points and the z at
    /// which it lands (negative infinity for single-point profiles).
    pub worst_increase: (f64, f64),
    /// Largest value of `L'` over the grid and its location.
    pub worst_lprime: (f64, f64),
    /// `L` is non-increasing up to [`DESCENT_TOL`].
    pub l_ok: bool,
    /// `L' <= DESCENT_TOL` everywhere.
    pub lprime_ok: bool,
    /// The profile stays inside the invariant region on which the descent
    /// argument operates (prey in [0,1], predator in [0, q(1)], slopes in
    /// the widened envelopes).
    pub d_ok: bool,
    pub pass: bool,
}

/// Evaluate `L` and `L'` along a profile and check that the functional
/// descends: `L` non-increasing and `L'` non-positive up to
/// [`DESCENT_TOL`], with the profile confined to the invariant region.
/// Violations are reported, not raised.
pub fn verify_descent(
    kind: &LyapunovKind,
    model: &ModelSpec,
    profile: &Profile,
) -> Result<DescentReport> {
    let d_ok = match check_derivative_estimates(profile, model) {
        Ok(report) => report.set_d_ok,
        Err(Error::BoundsFail(_)) => false,
        Err(e) => return Err(e),
    };
    let mut values = Vec::with_capacity(profile.z.len());
    let mut worst_lprime = (f64::NEG_INFINITY, 0.0);
    for (i, state) in profile.states.iter().enumerate() {
        let (l, lp) = lyapunov_value(kind, model, profile.c, *state)?;
        values.push(l);
        if lp > worst_lprime.0 {
            worst_lprime = (lp, profile.z[i]);
        }
    }
    let mut worst_increase = (f64::NEG_INFINITY, 0.0);
    for i in 1..values.len() {
        let increase = values[i] - values[i - 1];
        if increase > worst_increase.0 {
            worst_increase = (increase, profile.z[i]);
        }
    }
    let l_ok = worst_increase.0 <= DESCENT_TOL;
    let lprime_ok = worst_lprime.0 <= DESCENT_TOL;
    Ok(DescentReport {
        worst_increase,
        worst_lprime,
        l_ok,
        lprime_ok,
        d_ok,
        pass: l_ok && lprime_ok && d_ok,
    })
}
