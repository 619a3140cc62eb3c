//! Linear and equilibrium analysis: spreading speeds, decay exponents at the
//! invaded state, equilibrium structure, and the parameter thresholds that
//! separate coexistence from prey-free invasion regimes.

use crate::model::ModelSpec;
use crate::numerics::bisect;
use crate::{Error, Result};

/// Minimal wave speed `2 sqrt(d s)` of the predator invasion front.
pub fn critical_speed(model: &ModelSpec) -> f64 {
    2.0 * (model.d * model.s).sqrt()
}

/// Whether `c` equals the minimal speed to floating-point accuracy.
pub fn is_critical(model: &ModelSpec, c: f64) -> bool {
    let c_star = critical_speed(model);
    (c - c_star).abs() <= 1e-12 * c_star.max(1.0)
}

/// Decay exponents `(lambda_1, lambda_2)` of the predator density ahead of
/// the front: the roots of `d x^2 - c x + s = 0`, ordered increasingly.
///
/// Real only for `c >= 2 sqrt(d s)`; smaller speeds produce spiralling tails
/// and are rejected with [`Error::ComplexEigenvalues`].
pub fn predator_eigenvalues(model: &ModelSpec, c: f64) -> Result<(f64, f64)> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("wave speed must be positive, got {c}")));
    }
    let (d, s) = (model.d, model.s);
    let mut disc = c * c - 4.0 * d * s;
    // Snap to a genuine double root at the critical speed so roundoff in
    // c = 2 sqrt(d s) cannot split the exponents by ~1e-8.
    if disc.abs() <= 1e-12 * (c * c).max(1.0) {
        disc = 0.0;
    } else if disc < 0.0 {
        return Err(Error::ComplexEigenvalues { c, c_star: critical_speed(model) });
    }
    let root = disc.sqrt();
    Ok(((c - root) / (2.0 * d), (c + root) / (2.0 * d)))
}

/// Exponents `(lambda_3, lambda_4)` of the prey deficit ahead of the front:
/// the roots of `x^2 - c x + f(1) p'(1) = 0`, ordered `lambda_3 > 0 >
/// lambda_4`. Always real because `f(1) p'(1) < 0`.
pub fn prey_eigenvalues(model: &ModelSpec, c: f64) -> (f64, f64) {
    let k = model.f(1.0) * model.dp(1.0);
    let root = (c * c - 4.0 * k).sqrt();
    ((c + root) / 2.0, (c - root) / 2.0)
}

/// The spatially uniform steady states of the system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equilibria {
    /// Total extinction `(0, 0)`.
    pub extinction: [f64; 2],
    /// Prey at capacity, no predators: `(1, 0)`.
    pub prey_only: [f64; 2],
    /// Predators on the baseline resource alone: `(0, mu)`.
    pub prey_free: [f64; 2],
    /// Interior coexistence state, present iff `p(0) > mu`.
    pub coexistence: Option<[f64; 2]>,
}

/// Interior coexistence state `(u*, v*)` with `p(u*) = q(u*)`, or `None`
/// when predation is strong enough that the prey nullcline lies below the
/// predator capacity everywhere (`p(0) <= mu`).
pub fn positive_equilibrium(model: &ModelSpec) -> Option<[f64; 2]> {
    // Nullcline gap Q(u) = p(u) - u h(u) - mu: positive at 0 iff p(0) > mu,
    // and Q(1) = -q(1) < 0, so a root in (0, 1) exists exactly then.
    let gap = |u: f64| model.p(u) - u * model.h(u) - model.mu;
    if gap(0.0) <= 0.0 {
        return None;
    }
    let u_star = bisect(gap, 0.0, 1.0, 1e-12, 1e-13).expect("sign change verified");
    Some([u_star, model.q(u_star)])
}

/// All uniform steady states of the model.
pub fn equilibria(model: &ModelSpec) -> Equilibria {
    Equilibria {
        extinction: [0.0, 0.0],
        prey_only: [1.0, 0.0],
        prey_free: [0.0, model.mu],
        coexistence: positive_equilibrium(model),
    }
}

/// Everything the wave solvers need about a `(model, c)` pair: the critical
/// speed, the four decay exponents at the invaded state, the monotone
/// splitting constant `tau`, and the kernel exponents of the two inverse
/// operators used by the iteration scheme.
#[derive(Clone, Debug)]
pub struct WaveContext {
    pub c: f64,
    pub c_star: f64,
    /// `c == c_star` to floating-point accuracy.
    pub critical: bool,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    /// Splitting constant making both reaction terms monotone after shifting:
    /// `tau + partial_u F` and `tau + partial_v G` stay positive on the
    /// invariant region (with a 1% margin).
    pub tau: f64,
    /// Roots of `x^2 - c x - tau = 0` (negative, positive).
    pub nu1_minus: f64,
    pub nu1_plus: f64,
    /// Roots of `d x^2 - c x - tau = 0` (negative, positive).
    pub nu2_minus: f64,
    pub nu2_plus: f64,
}

/// Smallest shift making both reaction terms monotone in their own variable
/// over the invariant region, with a 1% safety margin.
fn monotone_shift(model: &ModelSpec) -> f64 {
    let f1 = model.f(1.0);
    let q1 = model.q(1.0);
    let n = 10_000usize;
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let u = i as f64 / n as f64;
        worst = worst.max(f1 * model.dp(u).abs() + q1 * model.df(u).abs());
    }
    let predator = model.s * (2.0 * q1 / model.q(0.0) - 1.0);
    1.01 * worst.max(predator)
}

/// Assemble the [`WaveContext`] for a model at speed `c`.
///
/// Fails with [`Error::ComplexEigenvalues`] below the minimal speed.
pub fn wave_context(model: &ModelSpec, c: f64) -> Result<WaveContext> {
    let (lambda1, lambda2) = predator_eigenvalues(model, c)?;
    let (lambda3, lambda4) = prey_eigenvalues(model, c);
    let tau = monotone_shift(model);
    let d = model.d;
    let disc1 = (c * c + 4.0 * tau).sqrt();
    let disc2 = (c * c + 4.0 * d * tau).sqrt();
    Ok(WaveContext {
        c,
        c_star: critical_speed(model),
        critical: is_critical(model, c),
        lambda1,
        lambda2,
        lambda3,
        lambda4,
        tau,
        nu1_minus: (c - disc1) / 2.0,
        nu1_plus: (c + disc1) / 2.0,
        nu2_minus: (c - disc2) / (2.0 * d),
        nu2_plus: (c + disc2) / (2.0 * d),
    })
}

/// Pointwise convexity-type condition on the kinetics used by the
/// coexistence Lyapunov argument:
///
/// ```text
/// (u* + mu) f(u) - (u - u*) (u + mu) f'(u) > 0   on (0, 1),
/// ```
///
/// checked on a dense interior grid. Requires unit capacity slope
/// (`h == 1`) and an interior coexistence state.
pub fn check_condition_p(model: &ModelSpec) -> Result<bool> {
    if !model.has_unit_h() {
        return Err(Error::Precondition(
            "condition (P) is formulated for unit capacity slope (h == 1)".into(),
        ));
    }
    let [u_star, _] = positive_equilibrium(model)
        .ok_or_else(|| Error::Precondition("no interior coexistence state".into()))?;
    let n = 1000usize;
    for i in 0..n {
        let u = (i as f64 + 0.5) / n as f64;
        let lhs = (u_star + model.mu) * model.f(u)
            - (u - u_star) * (u + model.mu) * model.df(u);
        if lhs <= 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Predation-strength threshold for Holling II kinetics with baseline
/// capacity `mu`: below the returned value the coexistence state exists and
/// supports the descent argument.
///
/// Requires `e1 >= 1`.
pub fn holling_threshold_abar(e1: f64, mu: f64) -> Result<f64> {
    if !(e1 >= 1.0) {
        return Err(Error::Domain(format!(
            "holling2 threshold needs e1 >= 1, got e1 = {e1}"
        )));
    }
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    let ratio = e1 / mu;
    if e1 <= mu {
        Ok(ratio)
    } else {
        // Largest a for which the convexity condition holds at its interior
        // critical point.
        let cap = (e1 - mu) / (1.0 + 2.0 * e1 + e1 * mu);
        let gamma = (1.0 - cap) * (cap + e1) / (cap + mu);
        Ok(ratio.min(gamma))
    }
}

/// Threshold data for Lotka-Volterra kinetics: `a_tilde` is the unique
/// positive root of the discriminant-type cubic
/// `S(a) = a^3 + a^2 - 16 a (1 + mu) - 16 (1 + mu)(2 + mu)`,
/// and the admissible range for the quadratic-form argument is
/// `a < a_bar = min(a_tilde, 1/mu)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LvThreshold {
    pub a_tilde: f64,
    pub a_bar: f64,
}

/// Cubic whose sign decides whether the Lotka-Volterra quadratic-form band
/// is nonempty (`S(a) < 0`).
pub fn lv_threshold_cubic(a: f64, mu: f64) -> f64 {
    a * a * a + a * a - 16.0 * a * (1.0 + mu) - 16.0 * (1.0 + mu) * (2.0 + mu)
}

/// Compute the Lotka-Volterra thresholds for baseline capacity `mu`.
pub fn lv_threshold(mu: f64) -> Result<LvThreshold> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    // S(0) < 0 and S -> infinity; S has exactly one positive root because
    // S' has a single positive zero. Bracket by doubling.
    let mut hi = 1.0;
    while lv_threshold_cubic(hi, mu) < 0.0 {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Domain(format!(
                "threshold root search diverged for mu = {mu}"
            )));
        }
    }
    let a_tilde = bisect(|a| lv_threshold_cubic(a, mu), 0.0, hi, 1e-9, 1e-12)
        .map_err(Error::Domain)?;
    Ok(LvThreshold { a_tilde, a_bar: a_tilde.min(1.0 / mu) })
}

/// Whether predation is strong enough, uniformly in the prey density, for
/// the prey-free descent argument: requires
/// `min_{[0,1]} g > h(1) (h(1) + mu) / (mu^2 h(0))`
/// where `g(u) = f(u)/u`.
pub fn preyfree_condition(model: &ModelSpec) -> bool {
    let h1 = model.h(1.0);
    let h0 = model.h(0.0);
    let mu = model.mu;
    model.min_g_on_unit() > h1 * (h1 + mu) / (mu * mu * h0)
}
