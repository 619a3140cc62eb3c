//! Explicit upper/lower solution quadruples for the traveling-wave system,
//! for both the strictly supercritical speed range and the critical speed.
//!
//! The four piecewise functions (u-upper, u-lower, v-upper, v-lower) bracket
//! a genuine wave profile; all free constants are selected deterministically
//! at fixed fractions of their admissible ranges so results are reproducible.
//! The module also verifies the four differential inequalities that make the
//! quadruple an upper/lower solution pair, and the one-sided derivative jump
//! conditions at the kink points.

use std::f64::consts::E;

use crate::analysis::{wave_context, WaveContext};
use crate::model::ModelSpec;
use crate::Result;

/// Which construction a [`BoundPair`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundCase {
    /// `c > c*`: both predator exponents are simple.
    Supercritical,
    /// `c = c*`: double predator exponent `lambda = c/(2d)`; the envelope
    /// carries the extra algebraic factor `-z`.
    Critical,
}

/// Evaluation side for one-sided derivatives at kink points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A matched quadruple of bounding functions with its selected constants.
///
/// Piecewise formulas (z1 = -(ln sigma)/beta):
///
/// * u-upper = 1 everywhere,
/// * u-lower = 1 - sigma e^(beta z) for z <= z1, then 0,
/// * Supercritical: v-upper = q(1) e^(lambda1 z) for z <= 0, then q(1);
///   v-lower = q(1) e^(lambda1 z) (1 - r e^(eps z)) for z <= z2 =
///   -(ln r)/eps, then 0,
/// * Critical (lambda = c/(2d), h = lambda e^2/2): v-upper =
///   -h q(1) z e^(lambda z) for z <= -2/lambda, then q(1); v-lower =
///   q(1) e^(lambda z) (-h z - r sqrt(-z)) for z <= z2 = -(r/h)^2, then 0.
#[derive(Clone, Debug)]
pub struct BoundPair {
    pub case: BoundCase,
    pub beta: f64,
    /// Supercritical gap exponent; zero in the Critical case (the two
    /// predator exponents coincide, leaving no admissible gap).
    pub eps: f64,
    pub sigma: f64,
    pub r: f64,
    /// Critical envelope constant `lambda e^2 / 2`; `None` for
    /// Supercritical pairs.
    pub h_const: Option<f64>,
    /// Kink of u-lower: where it reaches 0.
    pub z1: f64,
    /// Kink of v-lower: where it reaches 0.
    pub z2: f64,
    /// Kink of v-upper: 0 (Supercritical) or -2/lambda (Critical).
    pub kink0: f64,
    model: ModelSpec,
    ctx: WaveContext,
}

/// Build the bound quadruple for `model` at speed `c >= c*` with the
/// deterministic constant selection: `beta` at 0.9 of its cap, `eps` at half
/// of its cap, and `sigma`, `r` at 1.01x their lower bounds.
pub fn build_bounds(model: &ModelSpec, c: f64) -> Result<BoundPair> {
    build_bounds_scaled(model, c, 1.0, 1.0)
}

/// Like [`build_bounds`] but with `sigma` and `r` multiplied by the given
/// factors after selection. Factors below 1 deliberately violate the
/// admissibility constraints; the resulting pair is still evaluable and lets
/// [`verify_bounds`] demonstrate which inequality breaks.
pub fn build_bounds_scaled(
    model: &ModelSpec,
    c: f64,
    sigma_scale: f64,
    r_scale: f64,
) -> Result<BoundPair> {
    let ctx = wave_context(model, c)?;
    let f1 = model.f(1.0);
    let q1 = model.q(1.0);
    let q0 = model.q(0.0);
    let (l1, l2) = (ctx.lambda1, ctx.lambda2);
    let eps = 0.5 * l1.min(l2 - l1);
    if ctx.critical {
        let lam = l1;
        let h = lam * E * E / 2.0;
        let beta = 0.9 * c.min(lam);
        let sigma_floor =
            (2.0 * beta / lam).exp().max(f1 * h * q1 / ((c - beta) * (lam - beta) * beta * E));
        let sigma = sigma_scale * 1.01 * sigma_floor;
        let r_floor = (h * (2.0 / lam).sqrt())
            .max(4.0 * model.s * h * h * q1 / (model.d * q0) * (7.0 / (2.0 * E * lam)).powf(3.5));
        let r = r_scale * 1.01 * r_floor;
        Ok(BoundPair {
            case: BoundCase::Critical,
            beta,
            eps,
            sigma,
            r,
            h_const: Some(h),
            z1: -sigma.ln() / beta,
            z2: -(r / h) * (r / h),
            kink0: -2.0 / lam,
            model: model.clone(),
            ctx,
        })
    } else {
        let beta = 0.9 * c.min(l1);
        let sigma = sigma_scale * 1.01 * 1.0_f64.max(f1 * q1 / (beta * (c - beta)));
        // P(c, x) = d x^2 - c x + s is negative strictly between its roots
        // lambda1 and lambda2, so the quotient below is positive.
        let p_mid = model.d * (l1 + eps) * (l1 + eps) - c * (l1 + eps) + model.s;
        let r = r_scale * 1.01 * 1.0_f64.max(-model.s * q1 / (p_mid * q0));
        Ok(BoundPair {
            case: BoundCase::Supercritical,
            beta,
            eps,
            sigma,
            r,
            h_const: None,
            z1: -sigma.ln() / beta,
            z2: -r.ln() / eps,
            kink0: 0.0,
            model: model.clone(),
            ctx,
        })
    }
}

impl BoundPair {
    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn context(&self) -> &WaveContext {
        &self.ctx
    }

    pub fn u_upper(&self, _z: f64) -> f64 {
        1.0
    }

    pub fn u_upper_derivs(&self, _z: f64) -> [f64; 3] {
        [1.0, 0.0, 0.0]
    }

    pub fn u_lower(&self, z: f64) -> f64 {
        self.u_lower_derivs(z)[0]
    }

    /// `(value, first, second derivative)`; the branch left of a kink is
    /// used for z strictly below it.
    pub fn u_lower_derivs(&self, z: f64) -> [f64; 3] {
        let side = if z < self.z1 { Side::Left } else { Side::Right };
        self.u_lower_derivs_side(z, side)
    }

    pub fn u_lower_derivs_side(&self, z: f64, side: Side) -> [f64; 3] {
        match side {
            Side::Left => {
                let e = (self.beta * z).exp();
                [
                    1.0 - self.sigma * e,
                    -self.sigma * self.beta * e,
                    -self.sigma * self.beta * self.beta * e,
                ]
            }
            Side::Right => [0.0, 0.0, 0.0],
        }
    }

    pub fn v_upper(&self, z: f64) -> f64 {
        self.v_upper_derivs(z)[0]
    }

    pub fn v_upper_derivs(&self, z: f64) -> [f64; 3] {
        let side = if z < self.kink0 { Side::Left } else { Side::Right };
        self.v_upper_derivs_side(z, side)
    }

    pub fn v_upper_derivs_side(&self, z: f64, side: Side) -> [f64; 3] {
        let q1 = self.model.q(1.0);
        match (self.case, side) {
            (_, Side::Right) => [q1, 0.0, 0.0],
            (BoundCase::Supercritical, Side::Left) => {
                let l1 = self.ctx.lambda1;
                let e = (l1 * z).exp();
                [q1 * e, q1 * l1 * e, q1 * l1 * l1 * e]
            }
            (BoundCase::Critical, Side::Left) => {
                let lam = self.ctx.lambda1;
                let h = self.h_const.expect("critical pair");
                let e = (lam * z).exp();
                [
                    -h * q1 * z * e,
                    -h * q1 * e * (1.0 + lam * z),
                    -h * q1 * e * (2.0 * lam + lam * lam * z),
                ]
            }
        }
    }

    pub fn v_lower(&self, z: f64) -> f64 {
        self.v_lower_derivs(z)[0]
    }

    pub fn v_lower_derivs(&self, z: f64) -> [f64; 3] {
        let side = if z < self.z2 { Side::Left } else { Side::Right };
        self.v_lower_derivs_side(z, side)
    }

    pub fn v_lower_derivs_side(&self, z: f64, side: Side) -> [f64; 3] {
        let q1 = self.model.q(1.0);
        match (self.case, side) {
            (_, Side::Right) => [0.0, 0.0, 0.0],
            (BoundCase::Supercritical, Side::Left) => {
                let l1 = self.ctx.lambda1;
                let le = l1 + self.eps;
                let e1 = (l1 * z).exp();
                let e2 = self.r * (le * z).exp();
                [
                    q1 * (e1 - e2),
                    q1 * (l1 * e1 - le * e2),
                    q1 * (l1 * l1 * e1 - le * le * e2),
                ]
            }
            (BoundCase::Critical, Side::Left) => {
                let lam = self.ctx.lambda1;
                let h = self.h_const.expect("critical pair");
                let r = self.r;
                let e = (lam * z).exp();
                let s = (-z).sqrt();
                let val = q1 * e * (-h * z - r * s);
                let d1 = q1 * e * (-h * (1.0 + lam * z) + r * (0.5 / s - lam * s));
                let d2 = q1
                    * e
                    * (-h * (2.0 * lam + lam * lam * z)
                        + r * (lam / s + 0.25 / (s * s * s) - lam * lam * s));
                [val, d1, d2]
            }
        }
    }

    /// The four differential expressions of the upper/lower solution
    /// definition at `z`, in the order
    ///
    /// 0. prey operator at (u-upper, v-lower)  — must be <= 0,
    /// 1. prey operator at (u-lower, v-upper)  — must be >= 0,
    /// 2. predator operator at (u-upper, v-upper) — must be <= 0,
    /// 3. predator operator at (u-lower, v-lower) — must be >= 0,
    ///
    /// where the prey operator is `u'' - c u' + f(u)(p(u) - v)` and the
    /// predator operator is `d v'' - c v' + s v (1 - v/q(u))`.
    pub fn inequality_values(&self, z: f64) -> [f64; 4] {
        let m = &self.model;
        let c = self.ctx.c;
        let (d, s) = (m.d, m.s);
        let ul = self.u_lower_derivs(z);
        let vu = self.v_upper_derivs(z);
        let vl = self.v_lower_derivs(z);
        let i0 = m.f(1.0) * (m.p(1.0) - vl[0]);
        let i1 = ul[2] - c * ul[1] + m.f(ul[0]) * (m.p(ul[0]) - vu[0]);
        let i2 = d * vu[2] - c * vu[1] + s * vu[0] * (1.0 - vu[0] / m.q(1.0));
        let i3 = d * vl[2] - c * vl[1] + s * vl[0] * (1.0 - vl[0] / m.q(ul[0]));
        [i0, i1, i2, i3]
    }

    fn kinks(&self) -> [f64; 3] {
        [self.z1, self.z2, self.kink0]
    }
}

/// Outcome of one differential inequality over the verification grid.
#[derive(Clone, Copy, Debug)]
pub struct InequalityCheck {
    /// Which expression: index into [`BoundPair::inequality_values`].
    pub label: &'static str,
    /// Worst signed value: the maximum for <=0 inequalities, the minimum
    /// for >=0 inequalities.
    pub worst: f64,
    /// Grid point attaining the worst value.
    pub at: f64,
    pub pass: bool,
}

/// Grid verification result for the four differential inequalities.
#[derive(Clone, Debug)]
pub struct InequalityReport {
    pub checks: [InequalityCheck; 4],
    pub z_min: f64,
    pub z_max: f64,
    pub n_grid: usize,
    pub tol: f64,
}

impl InequalityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const INEQUALITY_LABELS: [&str; 4] = [
    "prey_upper",
    "prey_lower",
    "predator_upper",
    "predator_lower",
];

/// Evaluate the four inequality expressions on a uniform grid over
/// `[z_min, z_max]`, skipping points within 10 grid spacings of each kink
/// (the inequalities are only required away from the kink set), and report
/// worst cases with pass flags at tolerance `tol`.
pub fn verify_bounds(
    pair: &BoundPair,
    z_min: f64,
    z_max: f64,
    n_grid: usize,
    tol: f64,
) -> InequalityReport {
    assert!(n_grid >= 100, "need at least 100 grid points");
    assert!(z_max > z_min);
    let hgrid = (z_max - z_min) / (n_grid - 1) as f64;
    let guard = 10.0 * hgrid;
    let kinks = pair.kinks();
    // Index 0, 2 must stay <= 0 (track max); 1, 3 must stay >= 0 (track min).
    let mut worst = [f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY];
    let mut at = [z_min; 4];
    for i in 0..n_grid {
        let z = z_min + i as f64 * hgrid;
        if kinks.iter().any(|k| (z - k).abs() < guard) {
            continue;
        }
        let vals = pair.inequality_values(z);
        for j in [0, 2] {
            if vals[j] > worst[j] {
                worst[j] = vals[j];
                at[j] = z;
            }
        }
        for j in [1, 3] {
            if vals[j] < worst[j] {
                worst[j] = vals[j];
                at[j] = z;
            }
        }
    }
    let mk = |j: usize| InequalityCheck {
        label: INEQUALITY_LABELS[j],
        worst: worst[j],
        at: at[j],
        pass: if j % 2 == 0 { worst[j] <= tol } else { worst[j] >= -tol },
    };
    InequalityReport {
        checks: [mk(0), mk(1), mk(2), mk(3)],
        z_min,
        z_max,
        n_grid,
        tol,
    }
}

/// One-sided derivative jump at a kink point.
#[derive(Clone, Copy, Debug)]
pub struct KinkJump {
    pub which: &'static str,
    pub at: f64,
    pub left: f64,
    pub right: f64,
    /// Correct jump direction for the function's role: a lower solution's
    /// derivative must jump up, an upper solution's must jump down.
    pub ok: bool,
}

/// Check the three derivative jump conditions at the kinks: u-lower at z1
/// (jump up), v-lower at z2 (jump up), v-upper at its kink (jump down).
///
/// The strict comparisons are made with the common positive exponential
/// weight at each kink divided out; without that, the v-lower kink of a
/// critical pair can sit so far left that `e^(lambda z2)` underflows and
/// both one-sided slopes evaluate to zero. The reported `left`/`right`
/// fields keep the raw slope values.
pub fn kink_report(pair: &BoundPair) -> [KinkJump; 3] {
    let q1 = pair.model.q(1.0);
    let l1 = pair.ctx.lambda1;
    let ul_l = pair.u_lower_derivs_side(pair.z1, Side::Left)[1];
    let ul_r = pair.u_lower_derivs_side(pair.z1, Side::Right)[1];
    let vl_l = pair.v_lower_derivs_side(pair.z2, Side::Left)[1];
    let vl_r = pair.v_lower_derivs_side(pair.z2, Side::Right)[1];
    let vu_l = pair.v_upper_derivs_side(pair.kink0, Side::Left)[1];
    let vu_r = pair.v_upper_derivs_side(pair.kink0, Side::Right)[1];
    // Scaled left slopes (weight e^(growth * kink) removed); the right
    // branches are constant, so their scaled slopes are zero.
    let ul_l_scaled = -pair.sigma * pair.beta * (pair.beta * pair.z1).exp();
    let vl_l_scaled = match pair.case {
        // At z2 the matched terms cancel: slope coefficient is -q(1) eps.
        BoundCase::Supercritical => {
            q1 * (l1 - (l1 + pair.eps) * pair.r * (pair.eps * pair.z2).exp())
        }
        // At z2 = -(r/h)^2 the algebra collapses to -q(1) h / 2.
        BoundCase::Critical => {
            let h = pair.h_const.expect("critical pair");
            let sq = (-pair.z2).sqrt();
            q1 * (-h * (1.0 + l1 * pair.z2) + pair.r * (0.5 / sq - l1 * sq))
        }
    };
    let vu_l_scaled = match pair.case {
        BoundCase::Supercritical => q1 * l1,
        BoundCase::Critical => {
            let h = pair.h_const.expect("critical pair");
            -h * q1 * (1.0 + l1 * pair.kink0)
        }
    };
    [
        KinkJump { which: "u_lower", at: pair.z1, left: ul_l, right: ul_r, ok: ul_l_scaled < 0.0 },
        KinkJump { which: "v_lower", at: pair.z2, left: vl_l, right: vl_r, ok: vl_l_scaled < 0.0 },
        KinkJump { which: "v_upper", at: pair.kink0, left: vu_l, right: vu_r, ok: vu_l_scaled > 0.0 },
    ]
}

/// True iff all three kink jump conditions hold.
pub fn kink_jump_check(pair: &BoundPair) -> bool {
    kink_report(pair).iter().all(|j| j.ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn holling_fig() -> ModelSpec {
        ModelSpec::holling2(1.4, 2.0, 1.0, 0.5, 1.2).unwrap()
    }

    /// Parameter sets spanning both cases and all three built-in families.
    fn suite() -> Vec<(ModelSpec, f64)> {
        let h2a = holling_fig();
        let h2b = ModelSpec::holling2(0.7, 1.2, 1.0, 0.5, 1.4).unwrap();
        let lv = ModelSpec::lotka_volterra(4.5, 1.0, 0.5, 0.1).unwrap();
        let iv = ModelSpec::ivlev(2.0, 1.0, 1.0, 0.5, 0.3).unwrap();
        let lv4 = ModelSpec::lotka_volterra(15.0, 4.0, 0.25, 0.1).unwrap();
        let c_star = |m: &ModelSpec| crate::analysis::critical_speed(m);
        vec![
            (h2a.clone(), 2.0),
            (h2a.clone(), c_star(&h2a)),
            (h2b.clone(), 1.5),
            (lv.clone(), 1.5),
            (lv.clone(), c_star(&lv)),
            (iv.clone(), 1.8),
            (iv.clone(), c_star(&iv)),
            (lv4.clone(), 2.2),
            (lv4.clone(), c_star(&lv4)),
        ]
    }

    #[test]
    fn supercritical_shape() {
        let m = holling_fig();
        let pair = build_bounds(&m, 2.0).unwrap();
        assert_eq!(pair.case, BoundCase::Supercritical);
        assert_relative_eq!(pair.context().lambda1, 0.29289321881345254, epsilon = 1e-12);
        assert!(pair.z1 < 0.0 && pair.z2 < 0.0);
        assert_eq!(pair.kink0, 0.0);
        assert!(pair.h_const.is_none());
        // Constants strictly inside their admissible ranges.
        let (c, l1, l2): (f64, f64, f64) =
            (2.0, pair.context().lambda1, pair.context().lambda2);
        assert!(pair.beta > 0.0 && pair.beta < c.min(l1));
        assert!(pair.eps > 0.0 && pair.eps < l1.min(l2 - l1));
        let f1q1 = m.f(1.0) * m.q(1.0);
        assert!(pair.sigma > 1.0_f64.max(f1q1 / (pair.beta * (c - pair.beta))));
        let le = l1 + pair.eps;
        let p_mid = m.d * le * le - c * le + m.s;
        assert!(pair.r > 1.0_f64.max(-m.s * m.q(1.0) / (p_mid * m.q(0.0))));
        // Kink points follow from the constants.
        assert_relative_eq!(pair.z1, -pair.sigma.ln() / pair.beta);
        assert_relative_eq!(pair.z2, -pair.r.ln() / pair.eps);
    }

    #[test]
    fn critical_shape() {
        let m = holling_fig();
        let c = crate::analysis::critical_speed(&m);
        let pair = build_bounds(&m, c).unwrap();
        assert_eq!(pair.case, BoundCase::Critical);
        let lam = c / 2.0;
        let h = pair.h_const.unwrap();
        assert_relative_eq!(h, lam * E * E / 2.0, epsilon = 1e-12);
        assert_relative_eq!(h, 2.6124, epsilon = 1e-4);
        assert_relative_eq!(pair.z2, -(pair.r / h) * (pair.r / h));
        assert_relative_eq!(pair.kink0, -2.0 / lam);
        // Both kinks lie left of the v-upper kink.
        assert!(pair.z1 < pair.kink0);
        assert!(pair.z2 < pair.kink0);
        // Constraint floors.
        assert!(pair.sigma > (2.0 * pair.beta / lam).exp());
        assert!(
            pair.sigma
                > m.f(1.0) * h * m.q(1.0)
                    / ((c - pair.beta) * (lam - pair.beta) * pair.beta * E)
        );
        assert!(pair.r > h * (2.0 / lam).sqrt());
        assert!(
            pair.r
                > 4.0 * m.s * h * h * m.q(1.0) / (m.d * m.q(0.0))
                    * (7.0 / (2.0 * E * lam)).powf(3.5)
        );
    }

    #[test]
    fn subcritical_is_rejected() {
        let m = holling_fig();
        assert!(matches!(
            build_bounds(&m, 1.0),
            Err(crate::Error::ComplexEigenvalues { .. })
        ));
    }

    #[test]
    fn derivative_formulas_match_finite_differences() {
        // Analytic branch derivatives against central differences at interior
        // points of every branch, both cases.
        let m = holling_fig();
        for c in [2.0, crate::analysis::critical_speed(&m)] {
            let pair = build_bounds(&m, c).unwrap();
            let h = 1e-6;
            let probes = [
                pair.z1 - 3.0,
                pair.z1 - 0.5,
                pair.z2 - 2.0,
                pair.z2 * 0.5 - 1.0,
                pair.kink0 - 0.3,
                pair.kink0 + 1.0,
                1.7,
            ];
            for &z in &probes {
                for f in [
                    |p: &BoundPair, z: f64| p.u_lower_derivs(z),
                    |p: &BoundPair, z: f64| p.v_upper_derivs(z),
                    |p: &BoundPair, z: f64| p.v_lower_derivs(z),
                ] {
                    // Skip probes that straddle a kink within the stencil.
                    if pair.kinks().iter().any(|k| (z - k).abs() < 10.0 * h) {
                        continue;
                    }
                    let val = f(&pair, z);
                    let d1 = (f(&pair, z + h)[0] - f(&pair, z - h)[0]) / (2.0 * h);
                    let d2 = (f(&pair, z + h)[1] - f(&pair, z - h)[1]) / (2.0 * h);
                    assert_relative_eq!(val[1], d1, max_relative = 1e-6, epsilon = 1e-10);
                    assert_relative_eq!(val[2], d2, max_relative = 1e-6, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn hand_expanded_inequality_value() {
        // Supercritical prey-lower expression at z = -4 for the Holling model
        // at c = 2, assembled from scratch with the closed forms:
        //   u = 1 - sigma e^(-4 beta),  u'' - c u' = sigma beta (c - beta) e^(-4 beta),
        //   v = q(1) e^(-4 lambda1),    expression = above + f(u)(p(u) - v).
        let m = holling_fig();
        let pair = build_bounds(&m, 2.0).unwrap();
        let z = -4.0;
        assert!(z < pair.z1, "probe must sit on the live branch");
        let (sig, beta, l1) = (pair.sigma, pair.beta, pair.context().lambda1);
        let u = 1.0 - sig * (beta * z).exp();
        let drift = sig * beta * (2.0 - beta) * (beta * z).exp();
        let v = m.q(1.0) * (l1 * z).exp();
        let f = 1.4 * u / (u + 2.0);
        let p = (1.0 - u) * (u + 2.0) / 1.4;
        let expect = drift + f * (p - v);
        assert_relative_eq!(pair.inequality_values(z)[1], expect, max_relative = 1e-13);
        // And the prey-upper expression is exactly -f(1) v_lower.
        let vl = pair.v_lower(z);
        assert_relative_eq!(
            pair.inequality_values(z)[0],
            -(1.4 / 3.0) * vl,
            max_relative = 1e-13
        );
    }

    #[test]
    fn ordering_and_membership_on_dense_grid() {
        for (m, c) in suite() {
            let pair = build_bounds(&m, c).unwrap();
            let q1 = m.q(1.0);
            let n = 100_000;
            let (zl, zr) = (pair.z1 - 60.0 / pair.beta, 40.0);
            for i in 0..n {
                let z = zl + (zr - zl) * i as f64 / (n - 1) as f64;
                let ul = pair.u_lower(z);
                let uu = pair.u_upper(z);
                let vl = pair.v_lower(z);
                let vu = pair.v_upper(z);
                assert!(ul <= uu && vl <= vu, "ordering fails at z = {z}");
                assert!((0.0..=1.0).contains(&ul) && (0.0..=1.0).contains(&uu));
                assert!(vl >= 0.0 && vu <= q1 + 1e-12, "membership fails at z = {z}");
            }
        }
    }

    #[test]
    fn tails_reach_the_invaded_state() {
        for (m, c) in suite() {
            let pair = build_bounds(&m, c).unwrap();
            let z = pair.z1 - 80.0 / pair.beta;
            assert!((pair.u_lower(z) - 1.0).abs() < 1e-8);
            assert!(pair.v_upper(z) < 1e-8);
        }
    }

    #[test]
    fn inequalities_pass_across_suite() {
        for (m, c) in suite() {
            let pair = build_bounds(&m, c).unwrap();
            let report = verify_bounds(&pair, pair.z1 - 40.0, 40.0, 20_000, 1e-10);
            assert!(
                report.all_pass(),
                "inequality failure at ({}, c = {c}): {:?}",
                m.kind.label(),
                report.checks
            );
        }
    }

    #[test]
    fn halved_constants_break_an_inequality() {
        // Strong-coupling set just above the critical speed: the sigma floor
        // is genuinely active there. Scaling sigma by 0.49 must break the
        // prey-lower inequality while the unscaled pair verifies cleanly.
        // (Scaling r by 0.49 breaks nothing for any scanned parameter set:
        // the predator-lower margin retains at least a factor-2 cushion
        // because its two derivation bounds cannot bind at the same point,
        // and shrinking r also shrinks the term it guards.)
        let m = ModelSpec::holling2(15.0, 1.2, 1.0, 5.0, 0.5).unwrap();
        let c = 4.5;
        let base = build_bounds_scaled(&m, c, 1.0, 1.0).unwrap();
        assert!(verify_bounds(&base, base.z1 - 40.0, 40.0, 50_000, 1e-10).all_pass());
        let halved = build_bounds_scaled(&m, c, 0.49, 1.0).unwrap();
        let report = verify_bounds(&halved, halved.z1 - 40.0, 40.0, 50_000, 1e-10);
        assert!(!report.all_pass());
        let failing = report.checks.iter().find(|ch| !ch.pass).unwrap();
        assert_eq!(failing.label, "prey_lower");
        assert!(failing.worst < -0.1, "violation should be well clear of tolerance");
        let r_halved = build_bounds_scaled(&m, c, 1.0, 0.49).unwrap();
        assert!(verify_bounds(&r_halved, r_halved.z1 - 40.0, 40.0, 50_000, 1e-10).all_pass());
    }

    #[test]
    fn kink_jumps_have_prescribed_values() {
        let m = holling_fig();
        let pair = build_bounds(&m, 2.0).unwrap();
        assert!(kink_jump_check(&pair));
        let report = kink_report(&pair);
        // u-lower: left slope -beta, right slope 0.
        assert_relative_eq!(report[0].left, -pair.beta, epsilon = 1e-12);
        assert_eq!(report[0].right, 0.0);
        // v-upper at 0: left slope q(1) lambda1.
        assert_relative_eq!(
            report[2].left,
            m.q(1.0) * pair.context().lambda1,
            epsilon = 1e-12
        );
        assert_eq!(report[2].right, 0.0);
        // v-lower at z2: left slope -q(1) eps e^(lambda1 z2).
        let expect = -m.q(1.0) * pair.eps * (pair.context().lambda1 * pair.z2).exp();
        assert_relative_eq!(report[1].left, expect, max_relative = 1e-12);

        let crit = build_bounds(&m, crate::analysis::critical_speed(&m)).unwrap();
        assert!(kink_jump_check(&crit));
        let creport = kink_report(&crit);
        let h = crit.h_const.unwrap();
        assert_relative_eq!(
            creport[2].left,
            m.q(1.0) * h * E.powi(-2),
            max_relative = 1e-12
        );
        // v-lower at z2: left slope -q(1)(h/2) e^(lambda z2).
        let lam = crit.context().lambda1;
        assert_relative_eq!(
            creport[1].left,
            -m.q(1.0) * (h / 2.0) * (lam * crit.z2).exp(),
            max_relative = 1e-9
        );
    }
}
