//! Model definitions: the reaction kinetics `f`, `p`, `h` together with the
//! diffusion ratio `d`, predator growth rate `s`, and baseline predator
//! capacity `mu`.
//!
//! Three classical kinetics families are built in (Lotka-Volterra, Holling
//! type II, Ivlev); arbitrary kinetics can be supplied through
//! [`CustomKinetics`].

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied kinetics. All closures take the prey density `u`.
///
/// `g` is the optional factorization `f(u) = u * g(u)`; when absent it is
/// recovered numerically from `f` (with `g(0) = f'(0)`).
#[derive(Clone)]
pub struct CustomKinetics {
    pub name: String,
    pub f: ScalarFn,
    pub df: ScalarFn,
    pub p: ScalarFn,
    pub dp: ScalarFn,
    pub h: ScalarFn,
    pub dh: ScalarFn,
    pub g: Option<ScalarFn>,
}

impl fmt::Debug for CustomKinetics {
    fn fmt(&self, fmt: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt.debug_struct("CustomKinetics")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

/// The kinetics family of a model.
#[derive(Clone, Debug)]
pub enum ModelKind {
    /// `f(u) = a u`, `p(u) = (1 - u)/a`, `h = 1`.
    LotkaVolterra { a: f64 },
    /// `f(u) = a u/(u + e1)`, `p(u) = (1 - u)(u + e1)/a`, `h = 1`.
    /// Requires `e1 >= 1` so that `p` is decreasing on `[0, 1]`.
    Holling2 { a: f64, e1: f64 },
    /// `f(u) = a (1 - e^{-m u})`, `p(u) = (1 - u)/(a m G(m u))` with
    /// `G(x) = (1 - e^{-x})/x`. Requires `0 < m < 2` so that `p` is
    /// decreasing on `[0, 1]`.
    Ivlev { a: f64, m: f64 },
    Custom(CustomKinetics),
}

impl ModelKind {
    pub fn label(&self) -> &str {
        match self {
            ModelKind::LotkaVolterra { .. } => "lotka-volterra",
            ModelKind::Holling2 { .. } => "holling2",
            ModelKind::Ivlev { .. } => "ivlev",
            ModelKind::Custom(k) => &k.name,
        }
    }
}

/// `G(x) = (1 - e^{-x})/x`, continued to `G(0) = 1`.
fn ivlev_g(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * (-0.5 + x * (1.0 / 6.0 - x / 24.0))
    } else {
        -(-x).exp_m1() / x
    }
}

/// `G'(x) = ((1 + x) e^{-x} - 1)/x^2`, continued to `G'(0) = -1/2`.
fn ivlev_dg(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        -0.5 + x * (1.0 / 3.0 - x / 8.0)
    } else {
        ((1.0 + x) * (-x).exp() - 1.0) / (x * x)
    }
}

/// A complete model: kinetics plus the scalar parameters of the system.
///
/// `d` is the predator/prey diffusivity ratio, `s` the predator growth rate,
/// and `mu` the baseline predator carrying capacity (`q(0) = mu`).
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub d: f64,
    pub s: f64,
    pub mu: f64,
}

/// An assumption check failure reported by [`ModelSpec::check_assumptions`].
#[derive(Clone, Debug)]
pub struct AssumptionViolation {
    /// Which structural assumption failed: "H1" (predation rate),
    /// "H2" (prey nullcline), or "H3" (capacity slope).
    pub assumption: &'static str,
    /// Prey density at which the violation was detected.
    pub at: f64,
    pub detail: String,
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {value}")))
    }
}

impl ModelSpec {
    pub fn lotka_volterra(a: f64, d: f64, s: f64, mu: f64) -> Result<Self> {
        require_positive("a", a)?;
        Self::validate_common(d, s, mu)?;
        Ok(ModelSpec { kind: ModelKind::LotkaVolterra { a }, d, s, mu })
    }

    pub fn holling2(a: f64, e1: f64, d: f64, s: f64, mu: f64) -> Result<Self> {
        require_positive("a", a)?;
        if !(e1 >= 1.0) {
            return Err(Error::Domain(format!(
                "holling2 requires e1 >= 1 (p must decrease on [0,1]), got e1 = {e1}"
            )));
        }
        Self::validate_common(d, s, mu)?;
        Ok(ModelSpec { kind: ModelKind::Holling2 { a, e1 }, d, s, mu })
    }

    pub fn ivlev(a: f64, m: f64, d: f64, s: f64, mu: f64) -> Result<Self> {
        require_positive("a", a)?;
        if !(m > 0.0 && m < 2.0) {
            return Err(Error::Domain(format!(
                "ivlev requires 0 < m < 2 (p must decrease on [0,1]), got m = {m}"
            )));
        }
        Self::validate_common(d, s, mu)?;
        Ok(ModelSpec { kind: ModelKind::Ivlev { a, m }, d, s, mu })
    }

    pub fn custom(kinetics: CustomKinetics, d: f64, s: f64, mu: f64) -> Result<Self> {
        Self::validate_common(d, s, mu)?;
        Ok(ModelSpec { kind: ModelKind::Custom(kinetics), d, s, mu })
    }

    fn validate_common(d: f64, s: f64, mu: f64) -> Result<()> {
        require_positive("d", d)?;
        require_positive("s", s)?;
        require_positive("mu", mu)
    }

    /// Predation response `f(u)`.
    pub fn f(&self, u: f64) -> f64 {
        match &self.kind {
            ModelKind::LotkaVolterra { a } => a * u,
            ModelKind::Holling2 { a, e1 } => a * u / (u + e1),
            ModelKind::Ivlev { a, m } => -a * (-m * u).exp_m1(),
            ModelKind::Custom(k) => (k.f)(u),
        }
    }

    /// `f'(u)`.
    pub fn df(&self, u: f64) -> f64 {
        match &self.kind {
            ModelKind::LotkaVolterra { a } => *a,
            ModelKind::Holling2 { a, e1 } => a * e1 / ((u + e1) * (u + e1)),
            ModelKind::Ivlev { a, m } => a * m * (-m * u).exp(),
            ModelKind::Custom(k) => (k.df)(u),
        }
    }

    /// Prey nullcline `p(u)`: the predator density at which prey growth
    /// exactly balances predation.
    pub fn p(&self, u: f64) -> f64 {
        match &self.kind {
            ModelKind::LotkaVolterra { a } => (1.0 - u) / a,
            ModelKind::Holling2 { a, e1 } => (1.0 - u) * (u + e1) / a,
            ModelKind::Ivlev { a, m } => (1.0 - u) / (a * m * ivlev_g(m * u)),
            ModelKind::Custom(k) => (k.p)(u),
        }
    }

    /// `p'(u)`.
    pub fn dp(&self, u: f64) -> f64 {
        match &self.kind {
            ModelKind::LotkaVolterra { a } => -1.0 / a,
            ModelKind::Holling2 { a, e1 } => (1.0 - 2.0 * u - e1) / a,
            ModelKind::Ivlev { a, m } => {
                let g = ivlev_g(m * u);
                let dg = ivlev_dg(m * u);
                (-g - (1.0 - u) * m * dg) / (a * m * g * g)
            }
            ModelKind::Custom(k) => (k.dp)(u),
        }
    }

    /// Capacity slope `h(u)`; the predator carrying capacity is
    /// `q(u) = u h(u) + mu`.
    pub fn h(&self, u: f64) -> f64 {
        match &self.kind {
            ModelKind::Custom(k) => (k.h)(u),
            _ => 1.0,
        }
    }

    /// `h'(u)`.
    pub fn dh(&self, u: f64) -> f64 {
        match &self.kind {
            ModelKind::Custom(k) => (k.dh)(u),
            _ => 0.0,
        }
    }

    /// Predator carrying capacity `q(u) = u h(u) + mu`.
    pub fn q(&self, u: f64) -> f64 {
        u * self.h(u) + self.mu
    }

    /// `q'(u) = h(u) + u h'(u)`.
    pub fn dq(&self, u: f64) -> f64 {
        self.h(u) + u * self.dh(u)
    }

    /// Per-capita predation rate `g(u) = f(u)/u`, continued to
    /// `g(0) = f'(0)`. Built-in kinetics use their closed forms.
    pub fn g(&self, u: f64) -> f64 {
        match &self.kind {
            ModelKind::LotkaVolterra { a } => *a,
            ModelKind::Holling2 { a, e1 } => a / (u + e1),
            ModelKind::Ivlev { a, m } => a * m * ivlev_g(m * u),
            ModelKind::Custom(k) => {
                if let Some(g) = &k.g {
                    g(u)
                } else if u.abs() < 1e-12 {
                    (k.df)(0.0)
                } else {
                    (k.f)(u) / u
                }
            }
        }
    }

    /// Minimum of `g(u) = f(u)/u` over `[0, 1]`, sampled on a dense grid.
    pub fn min_g_on_unit(&self) -> f64 {
        let n = 10_000usize;
        (0..=n)
            .map(|i| self.g(i as f64 / n as f64))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether the capacity slope is identically one on `[0, 1]`
    /// (checked pointwise to floating-point accuracy).
    pub fn has_unit_h(&self) -> bool {
        (0..=100).all(|i| (self.h(i as f64 / 100.0) - 1.0).abs() <= 1e-12)
    }

    /// Check the structural assumptions on the kinetics over `[0, 1]`:
    ///
    /// * H1: `f(0) = 0` and `f' > 0`;
    /// * H2: `p(1) = 0` and `p' < 0`;
    /// * H3: `h(0) > 0` and `h' >= 0`.
    ///
    /// Returns the list of detected violations (empty when all hold).
    pub fn check_assumptions(&self) -> Vec<AssumptionViolation> {
        let mut out = Vec::new();
        let f0 = self.f(0.0);
        if f0.abs() > 1e-12 {
            out.push(AssumptionViolation {
                assumption: "H1",
                at: 0.0,
                detail: format!("f(0) = {f0:e}, expected 0"),
            });
        }
        let p1 = self.p(1.0);
        if p1.abs() > 1e-12 {
            out.push(AssumptionViolation {
                assumption: "H2",
                at: 1.0,
                detail: format!("p(1) = {p1:e}, expected 0"),
            });
        }
        let h0 = self.h(0.0);
        if !(h0 > 0.0) {
            out.push(AssumptionViolation {
                assumption: "H3",
                at: 0.0,
                detail: format!("h(0) = {h0:e}, expected > 0"),
            });
        }
        let n = 1000usize;
        for i in 0..=n {
            let u = i as f64 / n as f64;
            let dfu = self.df(u);
            if !(dfu > 0.0) {
                out.push(AssumptionViolation {
                    assumption: "H1",
                    at: u,
                    detail: format!("f'({u}) = {dfu:e}, expected > 0"),
                });
                break;
            }
        }
        for i in 0..=n {
            let u = i as f64 / n as f64;
            let dpu = self.dp(u);
            if !(dpu < 0.0) {
                out.push(AssumptionViolation {
                    assumption: "H2",
                    at: u,
                    detail: format!("p'({u}) = {dpu:e}, expected < 0"),
                });
                break;
            }
        }
        for i in 0..=n {
            let u = i as f64 / n as f64;
            let dhu = self.dh(u);
            if !(dhu >= -1e-12) {
                out.push(AssumptionViolation {
                    assumption: "H3",
                    at: u,
                    detail: format!("h'({u}) = {dhu:e}, expected >= 0"),
                });
                break;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn central_diff(f: impl Fn(f64) -> f64, u: f64) -> f64 {
        let h = 1e-6;
        (f(u + h) - f(u - h)) / (2.0 * h)
    }

    fn builtin_models() -> Vec<ModelSpec> {
        vec![
            ModelSpec::lotka_volterra(4.5, 1.0, 0.5, 0.1).unwrap(),
            ModelSpec::lotka_volterra(15.0, 1.0, 0.5, 0.1).unwrap(),
            ModelSpec::holling2(1.4, 2.0, 1.0, 0.5, 1.2).unwrap(),
            ModelSpec::holling2(0.7, 1.2, 1.0, 0.5, 1.4).unwrap(),
            ModelSpec::ivlev(2.0, 1.0, 1.0, 0.5, 0.3).unwrap(),
            ModelSpec::ivlev(0.9, 1.9, 4.0, 0.25, 0.6).unwrap(),
        ]
    }

    #[test]
    fn hand_computed_kinetics_values() {
        // Holling II with a = 0.7, e1 = 1.2 at u = 1/2:
        //   f = 0.35/1.7 = 7/34, p = 0.5 * 1.7/0.7 = 17/14,
        //   p' = (1 - 1 - 1.2)/0.7 = -12/7.
        let h2 = ModelSpec::holling2(0.7, 1.2, 1.0, 0.5, 1.4).unwrap();
        assert_relative_eq!(h2.f(0.5), 7.0 / 34.0, epsilon = 1e-15);
        assert_relative_eq!(h2.p(0.5), 17.0 / 14.0, epsilon = 1e-15);
        assert_relative_eq!(h2.dp(0.5), -12.0 / 7.0, epsilon = 1e-15);
        assert_relative_eq!(h2.g(0.5), 0.7 / 1.7, epsilon = 1e-15);

        // Lotka-Volterra with a = 15: f(0.2) = 3, p(0.2) = 0.8/15.
        let lv = ModelSpec::lotka_volterra(15.0, 1.0, 0.5, 0.1).unwrap();
        assert_relative_eq!(lv.f(0.2), 3.0, epsilon = 1e-15);
        assert_relative_eq!(lv.p(0.2), 0.8 / 15.0, epsilon = 1e-15);
        assert_relative_eq!(lv.dp(0.9), -1.0 / 15.0, epsilon = 1e-15);

        // Ivlev with a = 2, m = 1: f(1) = 2 (1 - 1/e), p(0) = 1/2 and
        // p'(0) = (m - 2)/(2 a m) = -1/4.
        let iv = ModelSpec::ivlev(2.0, 1.0, 1.0, 0.5, 0.3).unwrap();
        assert_relative_eq!(iv.f(1.0), 2.0 * (1.0 - (-1.0_f64).exp()), epsilon = 1e-15);
        assert_relative_eq!(iv.p(0.0), 0.5, epsilon = 1e-12);
        assert_relative_eq!(iv.dp(0.0), -0.25, epsilon = 1e-10);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for model in builtin_models() {
            for i in 1..20 {
                let u = i as f64 / 20.0;
                assert_relative_eq!(
                    model.df(u),
                    central_diff(|x| model.f(x), u),
                    max_relative = 1e-6
                );
                assert_relative_eq!(
                    model.dp(u),
                    central_diff(|x| model.p(x), u),
                    max_relative = 1e-6
                );
                assert_relative_eq!(
                    model.dq(u),
                    central_diff(|x| model.q(x), u),
                    max_relative = 1e-6
                );
            }
        }
    }

    #[test]
    fn capacity_endpoints() {
        for model in builtin_models() {
            assert_relative_eq!(model.q(0.0), model.mu, epsilon = 1e-15);
            assert_relative_eq!(model.q(1.0), model.h(1.0) + model.mu, epsilon = 1e-15);
            assert!(model.has_unit_h());
        }
    }

    #[test]
    fn per_capita_factorization() {
        for model in builtin_models() {
            for i in 1..=40 {
                let u = i as f64 / 40.0;
                assert_relative_eq!(model.f(u), u * model.g(u), max_relative = 1e-13);
            }
            // Continuation at u = 0 agrees with f'(0).
            assert_relative_eq!(model.g(0.0), model.df(0.0), max_relative = 1e-10);
            // p(u) = (1 - u)/g(u) for every built-in family.
            for i in 0..=40 {
                let u = i as f64 / 40.0;
                assert_relative_eq!(
                    model.p(u),
                    (1.0 - u) / model.g(u),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn builtin_assumptions_hold() {
        for model in builtin_models() {
            let violations = model.check_assumptions();
            assert!(violations.is_empty(), "unexpected violations: {violations:?}");
        }
    }

    #[test]
    fn holling_outside_slope_domain_detected() {
        // e1 < 1 makes p increase near u = 0; the constructor refuses it.
        assert!(matches!(
            ModelSpec::holling2(1.0, 0.5, 1.0, 0.5, 0.2),
            Err(Error::Domain(_))
        ));
        // Same for the Ivlev steepness bound.
        assert!(matches!(
            ModelSpec::ivlev(1.0, 2.5, 1.0, 0.5, 0.2),
            Err(Error::Domain(_))
        ));
        // And a custom model with increasing p is caught by the checker.
        let bad = ModelSpec::custom(
            CustomKinetics {
                name: "holling2-shallow".into(),
                f: Arc::new(|u| u / (u + 0.5)),
                df: Arc::new(|u| 0.5 / ((u + 0.5) * (u + 0.5))),
                p: Arc::new(|u| (1.0 - u) * (u + 0.5)),
                dp: Arc::new(|u| 0.5 - 2.0 * u),
                h: Arc::new(|_| 1.0),
                dh: Arc::new(|_| 0.0),
                g: None,
            },
            1.0,
            0.5,
            0.2,
        )
        .unwrap();
        let violations = bad.check_assumptions();
        assert!(violations.iter().any(|v| v.assumption == "H2"));
    }

    #[test]
    fn parameter_validation() {
        assert!(ModelSpec::lotka_volterra(0.0, 1.0, 0.5, 0.1).is_err());
        assert!(ModelSpec::lotka_volterra(1.0, -1.0, 0.5, 0.1).is_err());
        assert!(ModelSpec::lotka_volterra(1.0, 1.0, 0.0, 0.1).is_err());
        assert!(ModelSpec::lotka_volterra(1.0, 1.0, 0.5, 0.0).is_err());
        assert!(ModelSpec::lotka_volterra(f64::NAN, 1.0, 0.5, 0.1).is_err());
        assert!(ModelSpec::holling2(1.0, 1.0, 1.0, 0.5, 0.1).is_ok());
        assert!(ModelSpec::ivlev(1.0, 1.999, 1.0, 0.5, 0.1).is_ok());
    }

    #[test]
    fn ivlev_series_joins_smoothly() {
        // The series branch and the expm1 branch must agree to near machine
        // precision around the switch point.
        for &x in &[0.99e-4, 1.01e-4, 5e-5, 2e-4] {
            let series = 1.0 + x * (-0.5 + x * (1.0 / 6.0 - x / 24.0));
            let direct = -(-x_f(x)).exp_m1() / x;
            assert_relative_eq!(series, direct, max_relative = 1e-12);
        }
        fn x_f(x: f64) -> f64 {
            x
        }
        // Derivative continuation at zero.
        assert_abs_diff_eq!(ivlev_dg(0.0), -0.5);
        assert_relative_eq!(ivlev_dg(1e-6), -0.5 + 1e-6 / 3.0, max_relative = 1e-9);
    }

    proptest! {
        #[test]
        fn prey_nullcline_pins_boundary(
            a in 0.2_f64..20.0,
            e1 in 1.0_f64..5.0,
            m in 0.05_f64..1.95,
            mu in 0.05_f64..3.0,
            u in 0.0_f64..=1.0,
        ) {
            let models = [
                ModelSpec::lotka_volterra(a, 1.0, 0.5, mu).unwrap(),
                ModelSpec::holling2(a, e1, 1.0, 0.5, mu).unwrap(),
                ModelSpec::ivlev(a, m, 1.0, 0.5, mu).unwrap(),
            ];
            for model in models {
                // Kinetics sign structure on the biologically relevant strip.
                prop_assert!(model.f(u) >= 0.0);
                prop_assert!(model.df(u) > 0.0);
                prop_assert!(model.p(u) >= -1e-12);
                prop_assert!(model.dp(u) < 0.0);
                prop_assert!(model.q(u) >= model.mu);
                // p(1) = 0 exactly defines the prey saturation state.
                prop_assert!(model.p(1.0).abs() < 1e-12);
                // f(1) p'(1) = -1 for every f = u g, p = (1 - u)/g family.
                let prod = model.f(1.0) * model.dp(1.0);
                prop_assert!((prod + 1.0).abs() < 1e-10, "f(1) p'(1) = {prod}");
            }
        }
    }
}
