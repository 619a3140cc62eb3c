//! Finite-difference simulation of the planar reaction-diffusion system on a
//! bounded interval, with front tracking, invasion-speed measurement, and
//! extraction of co-moving profiles for cross-validation against the wave
//! solvers.
//!
//! The scheme is the plain explicit one: second-order central differences in
//! space, zero-flux (mirror) boundaries, forward Euler in time under a
//! diffusive stability bound. The reaction terms are bounded on the invariant
//! region `[0, 1] x [0, q(1)]`, so nothing stiffer is needed at the scales
//! the library targets, and the update stencil is written so that mirroring
//! the initial data mirrors the computed solution bitwise.

use crate::model::ModelSpec;
use crate::numerics::{interp_linear, linear_fit};
use crate::waveode::{Profile, Provenance};
use crate::{Error, Result};

/// Boundary handling for the spatial domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Zero-flux: ghost nodes mirror the first interior neighbor, so the
    /// discrete normal derivative vanishes at second order.
    NeumannZeroFlux,
}

/// Spatial/temporal discretization of a simulation run.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub x_min: f64,
    pub x_max: f64,
    /// Grid spacing; `x_max - x_min` must be an integer multiple of it.
    pub dx: f64,
    /// Time step; `None` selects the largest stability-respecting step that
    /// divides `t_end` evenly.
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Capture times; each is snapped to the nearest time step of the run.
    pub snapshot_times: Vec<f64>,
    pub boundary: Boundary,
}

/// Safety factor applied to the explicit diffusive stability limit.
pub const CFL_SAFETY: f64 = 0.95;

impl SimConfig {
    /// Default window `[-200, 200]`, spacing `0.2`, stability-limited time
    /// step, and 20 uniform snapshot times spanning `[0, t_end]`.
    pub fn defaults(t_end: f64) -> Self {
        let snapshot_times = (0..20).map(|i| t_end * i as f64 / 19.0).collect();
        SimConfig {
            x_min: -200.0,
            x_max: 200.0,
            dx: 0.2,
            dt: None,
            t_end,
            snapshot_times,
            boundary: Boundary::NeumannZeroFlux,
        }
    }

    /// Largest admissible explicit time step for diffusion ratio `d`:
    /// `CFL_SAFETY * dx^2 / (2 max(1, d))`.
    pub fn stability_dt(&self, d: f64) -> f64 {
        CFL_SAFETY * self.dx * self.dx / (2.0 * d.max(1.0))
    }

    /// The time step the run will use: the user's, or `t_end / n` with the
    /// smallest `n` keeping the step within the stability bound.
    pub fn effective_dt(&self, d: f64) -> f64 {
        match self.dt {
            Some(dt) => dt,
            None => {
                let n = (self.t_end / self.stability_dt(d)).ceil().max(1.0);
                self.t_end / n
            }
        }
    }

    pub fn validate(&self, d: f64) -> Result<()> {
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return Err(Error::Validation(format!("dx must be positive, got {}", self.dx)));
        }
        if !(self.x_max > self.x_min) {
            return Err(Error::Validation(format!(
                "domain is empty: x_min = {}, x_max = {}",
                self.x_min, self.x_max
            )));
        }
        let span = self.x_max - self.x_min;
        let cells = (span / self.dx).round();
        if cells < 4.0 || (cells * self.dx - span).abs() > 1e-9 * span.max(1.0) {
            return Err(Error::Validation(format!(
                "dx = {} must divide the domain width {} into at least 4 cells",
                self.dx, span
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Validation(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(Error::Validation(format!("dt must be positive, got {dt}")));
            }
            let cap = self.stability_dt(d);
            if dt > cap * (1.0 + 1e-12) {
                return Err(Error::Validation(format!(
                    "dt = {dt} exceeds the explicit stability bound {cap:.6e}"
                )));
            }
        }
        for &t in &self.snapshot_times {
            if !(t >= 0.0 && t <= self.t_end) {
                return Err(Error::Validation(format!(
                    "snapshot time {t} outside [0, {}]",
                    self.t_end
                )));
            }
        }
        Ok(())
    }

    /// The grid nodes `x_min, x_min + dx, ..., x_max`.
    pub fn grid(&self) -> Vec<f64> {
        let cells = ((self.x_max - self.x_min) / self.dx).round() as usize;
        (0..=cells).map(|i| self.x_min + i as f64 * self.dx).collect()
    }
}

/// The PDE fields at one captured time.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Abscissa of the initial predator jump.
const IC_JUMP_X: f64 = 100.0;
/// Predator density right of the jump.
const IC_V_LEVEL: f64 = 0.1;

/// The reference initial condition: prey at carrying capacity everywhere,
/// predator absent except for a small uniform pocket strictly right of
/// `x = 100`. Nodes within `1e-9` of the jump count as its left side.
pub fn default_initial_condition(config: &SimConfig) -> (Vec<f64>, Vec<f64>) {
    let x = config.grid();
    let u0 = vec![1.0; x.len()];
    let v0 = x
        .iter()
        .map(|&x| if x > IC_JUMP_X + 1e-9 { IC_V_LEVEL } else { 0.0 })
        .collect();
    (u0, v0)
}

/// How far outside the invariant region a running field may stray before the
/// run is declared unstable.
const BLOWUP_TOL: f64 = 1e-6;
/// Negative roundoff below this magnitude is flushed to zero.
const NEGATIVE_FLUSH: f64 = 1e-12;

/// Integrate the system from `(u0, v0)` and capture the requested snapshots.
///
/// The initial data must lie inside the invariant region
/// `[0, 1] x [0, q(1)]` (up to `1e-9`); the run fails with a stability error
/// if a field later leaves it by more than `1e-6`, which signals either an
/// oversized user `dt` or kinetics violating the structural assumptions.
pub fn run(
    model: &ModelSpec,
    config: &SimConfig,
    u0: &[f64],
    v0: &[f64],
) -> Result<Vec<Snapshot>> {
    config.validate(model.d)?;
    let x = config.grid();
    let n = x.len();
    if u0.len() != n || v0.len() != n {
        return Err(Error::Validation(format!(
            "initial data length {} / {} does not match the {}-node grid",
            u0.len(),
            v0.len(),
            n
        )));
    }
    let q1 = model.q(1.0);
    for i in 0..n {
        if u0[i] < -1e-9 || u0[i] > 1.0 + 1e-9 || v0[i] < -1e-9 || v0[i] > q1 + 1e-9 {
            return Err(Error::Precondition(format!(
                "initial data outside the invariant region at x = {}: u = {}, v = {}",
                x[i], u0[i], v0[i]
            )));
        }
    }

    let dt = config.effective_dt(model.d);
    let n_steps = ((config.t_end / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut capture_steps: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|&t| ((t / dt).round() as usize).min(n_steps))
        .collect();
    capture_steps.sort_unstable();
    capture_steps.dedup();

    let inv_dx2 = 1.0 / (config.dx * config.dx);
    let mut u = u0.to_vec();
    let mut v = v0.to_vec();
    let mut u_next = vec![0.0; n];
    let mut v_next = vec![0.0; n];
    let mut snapshots = Vec::with_capacity(capture_steps.len());
    let mut next_capture = capture_steps.iter().copied().peekable();

    for step in 0..=n_steps {
        if next_capture.peek() == Some(&step) {
            next_capture.next();
            snapshots.push(Snapshot {
                t: step as f64 * dt,
                x: x.clone(),
                u: u.clone(),
                v: v.clone(),
            });
        }
        if step == n_steps {
            break;
        }

        let mut worst = 0.0_f64;
        for i in 0..n {
            let (um, up) = match config.boundary {
                Boundary::NeumannZeroFlux => (
                    u[if i == 0 { 1 } else { i - 1 }],
                    u[if i == n - 1 { n - 2 } else { i + 1 }],
                ),
            };
            let (vm, vp) = match config.boundary {
                Boundary::NeumannZeroFlux => (
                    v[if i == 0 { 1 } else { i - 1 }],
                    v[if i == n - 1 { n - 2 } else { i + 1 }],
                ),
            };
            let ui = u[i];
            let vi = v[i];
            // `um + up` is symmetric under mirroring, which keeps the whole
            // update bitwise mirror-invariant.
            let lap_u = (um + up - 2.0 * ui) * inv_dx2;
            let lap_v = (vm + vp - 2.0 * vi) * inv_dx2;
            let mut un = ui + dt * (lap_u + model.f(ui) * (model.p(ui) - vi));
            let mut vn = vi + dt * (model.d * lap_v + model.s * vi * (1.0 - vi / model.q(ui)));
            if un < 0.0 && un > -NEGATIVE_FLUSH {
                un = 0.0;
            }
            if vn < 0.0 && vn > -NEGATIVE_FLUSH {
                vn = 0.0;
            }
            worst = worst.max(-un).max(un - 1.0).max(-vn).max(vn - q1);
            u_next[i] = un;
            v_next[i] = vn;
        }
        if worst > BLOWUP_TOL {
            return Err(Error::Stability {
                t: (step + 1) as f64 * dt,
                worst,
            });
        }
        std::mem::swap(&mut u, &mut u_next);
        std::mem::swap(&mut v, &mut v_next);
    }
    Ok(snapshots)
}

/// Which PDE field a front query reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Prey,
    Predator,
}

/// Leftmost `x` at which the chosen field crosses `level`, located by linear
/// interpolation between adjacent nodes.
pub fn front_position(snapshot: &Snapshot, field: Field, level: f64) -> Result<f64> {
    let a = match field {
        Field::Prey => &snapshot.u,
        Field::Predator => &snapshot.v,
    };
    for i in 0..a.len() - 1 {
        let d0 = a[i] - level;
        let d1 = a[i + 1] - level;
        if d0 == 0.0 {
            return Ok(snapshot.x[i]);
        }
        if d0 * d1 < 0.0 {
            return Ok(snapshot.x[i] + (snapshot.x[i + 1] - snapshot.x[i]) * d0 / (d0 - d1));
        }
    }
    if a.last() == Some(&level) {
        return Ok(*snapshot.x.last().unwrap());
    }
    Err(Error::NoCrossing { level })
}

/// Front position with the default tracker: the predator field at half its
/// baseline capacity, which is monotone across the invasion front in every
/// built-in scenario.
pub fn front_position_default(snapshot: &Snapshot, model: &ModelSpec) -> Result<f64> {
    front_position(snapshot, Field::Predator, 0.5 * model.mu)
}

/// Least-squares invasion speed from the front positions of the snapshots
/// past `t_burn`, sign-normalized to a positive speed, together with the
/// regression's `r^2`.
pub fn estimate_spreading_speed(
    snapshots: &[Snapshot],
    model: &ModelSpec,
    t_burn: f64,
) -> Result<(f64, f64)> {
    let mut ts = Vec::new();
    let mut ps = Vec::new();
    for snap in snapshots {
        if snap.t > t_burn {
            ts.push(snap.t);
            ps.push(front_position_default(snap, model)?);
        }
    }
    if ts.len() < 5 {
        return Err(Error::Precondition(format!(
            "need at least 5 snapshots past t = {t_burn}, got {}",
            ts.len()
        )));
    }
    let (slope, _, r2) = linear_fit(&ts, &ps);
    Ok((slope.abs(), r2))
}

/// Maximum pairwise difference between two snapshots in the frame moving
/// left at `speed`, over the part of the co-moving window both cover.
fn comoving_gap(a: &Snapshot, b: &Snapshot, speed: f64) -> f64 {
    let za0 = a.x[0] + speed * a.t;
    let za1 = a.x[a.x.len() - 1] + speed * a.t;
    let zb0 = b.x[0] + speed * b.t;
    let zb1 = b.x[b.x.len() - 1] + speed * b.t;
    let lo = za0.max(zb0);
    let hi = za1.min(zb1);
    let mut gap = 0.0_f64;
    for (j, &xb) in b.x.iter().enumerate() {
        let z = xb + speed * b.t;
        if z < lo || z > hi {
            continue;
        }
        let xa = z - speed * a.t;
        let ua = interp_linear(&a.x, &a.u, xa);
        let va = interp_linear(&a.x, &a.v, xa);
        gap = gap.max((ua - b.u[j]).abs()).max((va - b.v[j]).abs());
    }
    gap
}

/// Largest allowed co-moving drift between consecutive snapshots for a
/// profile extraction to be accepted.
pub const STABILIZATION_TOL: f64 = 1e-2;

/// Resample the final snapshot onto the co-moving coordinate `z = x + c t`,
/// recover the slope components by central differences, and return the
/// result as a wave profile for cross-validation against the ODE solvers.
///
/// The snapshots must already be shape-stable: every consecutive pair has to
/// agree within [`STABILIZATION_TOL`] in the co-moving frame.
pub fn extract_profile(snapshots: &[Snapshot], speed: f64) -> Result<Profile> {
    if snapshots.len() < 2 {
        return Err(Error::Precondition(format!(
            "profile extraction needs at least 2 snapshots, got {}",
            snapshots.len()
        )));
    }
    for pair in snapshots.windows(2) {
        let gap = comoving_gap(&pair[0], &pair[1], speed);
        if gap > STABILIZATION_TOL {
            return Err(Error::NotConverged(format!(
                "front shape still moving: co-moving gap {gap:.3e} between t = {} and t = {}",
                pair[0].t, pair[1].t
            )));
        }
    }
    let last = &snapshots[snapshots.len() - 1];
    let n = last.x.len();
    let dx = last.x[1] - last.x[0];
    let z: Vec<f64> = last.x.iter().map(|&x| x + speed * last.t).collect();
    let deriv = |a: &[f64], i: usize| {
        if i == 0 {
            (a[1] - a[0]) / dx
        } else if i == n - 1 {
            (a[n - 1] - a[n - 2]) / dx
        } else {
            (a[i + 1] - a[i - 1]) / (2.0 * dx)
        }
    };
    let states: Vec<[f64; 4]> = (0..n)
        .map(|i| [last.u[i], deriv(&last.u, i), last.v[i], deriv(&last.v, i)])
        .collect();
    Profile::from_samples(z, states, speed, Provenance::PdeExtraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{critical_speed, positive_equilibrium};
    use crate::model::CustomKinetics;
    use crate::waveode::shoot;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::sync::Arc;

    fn fig_model() -> ModelSpec {
        ModelSpec::holling2(1.4, 2.0, 1.0, 0.5, 1.2).unwrap()
    }

    #[test]
    fn default_ic_places_the_predator_pocket() {
        let config = SimConfig::defaults(10.0);
        let (u0, v0) = default_initial_condition(&config);
        assert!(u0.iter().all(|&u| u == 1.0));
        let x = config.grid();
        // Exactly the 500 nodes strictly right of x = 100 carry predator.
        let occupied: Vec<usize> = (0..x.len()).filter(|&i| v0[i] != 0.0).collect();
        assert_eq!(occupied.len(), 500);
        assert!(occupied.iter().all(|&i| v0[i] == 0.1));
        assert!(x[occupied[0] - 1] <= 100.0 + 1e-6);
        assert!(x[occupied[0]] > 100.05);

        // A domain ending at the jump has no predator at all.
        let short = SimConfig {
            x_max: 100.0,
            ..SimConfig::defaults(10.0)
        };
        let (_, v0) = default_initial_condition(&short);
        assert!(v0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn equilibrium_initial_data_is_a_fixed_point() {
        let m = fig_model();
        let config = SimConfig {
            snapshot_times: vec![0.0, 1.0, 2.0],
            ..SimConfig::defaults(2.0)
        };
        let n = config.grid().len();
        let snaps = run(&m, &config, &vec![1.0; n], &vec![0.0; n]).unwrap();
        assert_eq!(snaps.len(), 3);
        for s in &snaps {
            assert!(s.u.iter().all(|&u| u == 1.0));
            assert!(s.v.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn constant_data_follows_the_kinetic_euler_recursion() {
        let m = fig_model();
        let config = SimConfig {
            snapshot_times: vec![10.0],
            ..SimConfig::defaults(10.0)
        };
        let n = config.grid().len();
        let snaps = run(&m, &config, &vec![0.6; n], &vec![0.4; n]).unwrap();
        // Constant fields have an exactly zero discrete Laplacian, so every
        // node must follow the plain Euler recursion of the kinetics.
        let dt = config.effective_dt(m.d);
        let steps = (config.t_end / dt).round() as usize;
        let (mut u, mut v) = (0.6_f64, 0.4_f64);
        for _ in 0..steps {
            let un = u + dt * m.f(u) * (m.p(u) - v);
            let vn = v + dt * m.s * v * (1.0 - v / m.q(u));
            u = un;
            v = vn;
        }
        let s = &snaps[0];
        let mid = n / 2;
        assert_abs_diff_eq!(s.u[mid], u, epsilon = 1e-12);
        assert_abs_diff_eq!(s.v[mid], v, epsilon = 1e-12);
        assert_abs_diff_eq!(s.u[0], u, epsilon = 1e-12);
        assert_abs_diff_eq!(s.v[n - 1], v, epsilon = 1e-12);
    }

    #[test]
    fn mirrored_data_gives_the_bitwise_mirrored_solution() {
        let m = fig_model();
        let config = SimConfig {
            snapshot_times: vec![2.0],
            ..SimConfig::defaults(2.0)
        };
        let (u0, v0) = default_initial_condition(&config);
        let n = u0.len();
        let u0m: Vec<f64> = (0..n).map(|i| u0[n - 1 - i]).collect();
        let v0m: Vec<f64> = (0..n).map(|i| v0[n - 1 - i]).collect();
        let fwd = run(&m, &config, &u0, &v0).unwrap();
        let mir = run(&m, &config, &u0m, &v0m).unwrap();
        for i in 0..n {
            assert_eq!(fwd[0].u[i], mir[0].u[n - 1 - i]);
            assert_eq!(fwd[0].v[i], mir[0].v[n - 1 - i]);
        }
    }

    #[test]
    fn snapshots_land_on_the_nearest_step() {
        let m = fig_model();
        let config = SimConfig {
            snapshot_times: vec![0.0, 3.337, 7.77, 10.0],
            ..SimConfig::defaults(10.0)
        };
        let (u0, v0) = default_initial_condition(&config);
        let snaps = run(&m, &config, &u0, &v0).unwrap();
        assert_eq!(snaps.len(), 4);
        let dt = config.effective_dt(m.d);
        for (snap, want) in snaps.iter().zip([0.0, 3.337, 7.77, 10.0]) {
            assert!((snap.t - want).abs() <= 0.5 * dt + 1e-12);
        }
        assert_eq!(snaps[3].t, 10.0);
    }

    #[test]
    fn invariant_region_is_preserved() {
        let m = fig_model();
        let config = SimConfig {
            snapshot_times: vec![0.0, 10.0, 20.0],
            ..SimConfig::defaults(20.0)
        };
        let (u0, v0) = default_initial_condition(&config);
        let q1 = m.q(1.0);
        for s in run(&m, &config, &u0, &v0).unwrap() {
            for i in 0..s.u.len() {
                assert!(s.u[i] >= -1e-9 && s.u[i] <= 1.0 + 1e-9);
                assert!(s.v[i] >= -1e-9 && s.v[i] <= q1 + 1e-9);
            }
        }
    }

    #[test]
    fn config_validation_rejects_bad_discretizations() {
        let m = fig_model();
        let mut config = SimConfig::defaults(10.0);
        config.dx = 0.3; // 400 / 0.3 is not an integer
        let (u0, v0) = (vec![1.0; 5], vec![0.0; 5]);
        assert!(matches!(run(&m, &config, &u0, &v0), Err(Error::Validation(_))));

        let mut config = SimConfig::defaults(10.0);
        config.dt = Some(1.0); // far beyond 0.95 dx^2 / 2
        assert!(matches!(run(&m, &config, &u0, &v0), Err(Error::Validation(_))));

        let mut config = SimConfig::defaults(10.0);
        config.snapshot_times = vec![11.0];
        assert!(matches!(run(&m, &config, &u0, &v0), Err(Error::Validation(_))));

        // Initial data outside the invariant region is a precondition error.
        let config = SimConfig::defaults(1.0);
        let n = config.grid().len();
        assert!(matches!(
            run(&m, &config, &vec![1.5; n], &vec![0.0; n]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn assumption_violating_kinetics_trip_the_stability_guard() {
        // p(1) > 0 breaks the prey nullcline structure: u grows past its
        // carrying capacity and the run must refuse to continue.
        let kinetics = CustomKinetics {
            name: "runaway".into(),
            f: Arc::new(|u| u),
            df: Arc::new(|_| 1.0),
            p: Arc::new(|u| 2.0 * (1.0 + u)),
            dp: Arc::new(|_| 2.0),
            h: Arc::new(|_| 1.0),
            dh: Arc::new(|_| 0.0),
            g: Some(Arc::new(|_| 1.0)),
        };
        let m = ModelSpec::custom(kinetics, 1.0, 0.5, 1.2).unwrap();
        let config = SimConfig {
            snapshot_times: vec![5.0],
            ..SimConfig::defaults(5.0)
        };
        let (u0, v0) = default_initial_condition(&config);
        match run(&m, &config, &u0, &v0) {
            Err(Error::Stability { worst, .. }) => assert!(worst > BLOWUP_TOL),
            other => panic!("expected a stability error, got {other:?}"),
        }
    }

    #[test]
    fn front_position_oracles() {
        // A node sitting exactly at the level is returned exactly.
        let snap = Snapshot {
            t: 0.0,
            x: vec![-0.4, -0.2, 0.0, 0.2, 0.4],
            u: vec![1.0; 5],
            v: vec![0.0, 0.0, 0.5, 1.0, 1.0],
        };
        assert_eq!(front_position(&snap, Field::Predator, 0.5).unwrap(), 0.0);

        // The sampled initial jump at x = 100 interpolates to the cell
        // midpoint 100.1 for any level strictly between 0 and 0.1.
        let config = SimConfig::defaults(10.0);
        let (u0, v0) = default_initial_condition(&config);
        let snap = Snapshot {
            t: 0.0,
            x: config.grid(),
            u: u0,
            v: v0,
        };
        let pos = front_position(&snap, Field::Predator, 0.05).unwrap();
        assert_relative_eq!(pos, 100.1, epsilon = 1e-9);

        // A flat field never crosses.
        let flat = Snapshot {
            t: 0.0,
            x: vec![0.0, 1.0, 2.0],
            u: vec![1.0; 3],
            v: vec![0.0; 3],
        };
        assert!(matches!(
            front_position(&flat, Field::Predator, 0.05),
            Err(Error::NoCrossing { .. })
        ));
    }

    #[test]
    fn spreading_speed_matches_the_analytic_value() {
        let m = fig_model();
        // The front travels ~1.41 * 300 > 400 units, so the default window
        // is widened leftward to keep it away from the boundary.
        let config = SimConfig {
            x_min: -400.0,
            snapshot_times: (0..=30).map(|i| 10.0 * i as f64).collect(),
            ..SimConfig::defaults(300.0)
        };
        let (u0, v0) = default_initial_condition(&config);
        let snaps = run(&m, &config, &u0, &v0).unwrap();

        let (speed, r2) = estimate_spreading_speed(&snaps, &m, 100.0).unwrap();
        let c_star = critical_speed(&m);
        assert!(
            (speed - c_star).abs() <= 0.05 * c_star,
            "measured {speed}, predicted {c_star}"
        );
        assert!(r2 > 0.999, "r^2 = {r2}");

        // The front moves left: positions decrease.
        let p100 = front_position_default(&snaps[10], &m).unwrap();
        let p300 = front_position_default(&snaps[30], &m).unwrap();
        assert!(p300 < p100 - 100.0);

        // Level choice does not matter: quarter/half/three-quarter levels
        // give speeds within 2% of each other.
        let mut speeds = Vec::new();
        for level in [0.25 * m.mu, 0.5 * m.mu, 0.75 * m.mu] {
            let mut ts = Vec::new();
            let mut ps = Vec::new();
            for s in snaps.iter().filter(|s| s.t > 100.0) {
                ts.push(s.t);
                ps.push(front_position(s, Field::Predator, level).unwrap());
            }
            let (slope, _, _) = linear_fit(&ts, &ps);
            speeds.push(slope.abs());
        }
        let lo = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = speeds.iter().cloned().fold(0.0_f64, f64::max);
        assert!(hi - lo <= 0.02 * lo, "level spread {lo}..{hi}");

        // Behind the front the fields sit at the coexistence state.
        let [us, vs] = positive_equilibrium(&m).unwrap();
        let last = &snaps[30];
        let j = last.x.iter().position(|&x| x >= 150.0).unwrap();
        assert_abs_diff_eq!(last.u[j], us, epsilon = 1e-2);
        assert_abs_diff_eq!(last.v[j], vs, epsilon = 1e-2);
    }

    #[test]
    fn spreading_speed_scales_with_diffusion_and_growth() {
        // d = 4, s = 0.25 doubles the predicted speed to 2.
        let m = ModelSpec::holling2(1.4, 2.0, 4.0, 0.25, 1.2).unwrap();
        let config = SimConfig {
            x_min: -600.0,
            snapshot_times: (0..=30).map(|i| 10.0 * i as f64).collect(),
            ..SimConfig::defaults(300.0)
        };
        let (u0, v0) = default_initial_condition(&config);
        let snaps = run(&m, &config, &u0, &v0).unwrap();
        let (speed, r2) = estimate_spreading_speed(&snaps, &m, 100.0).unwrap();
        assert!((speed - 2.0).abs() <= 0.1, "measured {speed}");
        assert!(r2 > 0.999);
    }

    #[test]
    fn all_snapshots_before_burn_in_is_a_precondition_error() {
        let m = fig_model();
        let config = SimConfig {
            snapshot_times: (0..10).map(|i| i as f64).collect(),
            ..SimConfig::defaults(9.0)
        };
        let (u0, v0) = default_initial_condition(&config);
        let snaps = run(&m, &config, &u0, &v0).unwrap();
        assert!(matches!(
            estimate_spreading_speed(&snaps, &m, 100.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn solution_converges_at_second_order_under_grid_refinement() {
        let m = fig_model();
        let mut at_coarse: Vec<Vec<f64>> = Vec::new();
        for k in 0..3 {
            let dx = 0.2 / (1 << k) as f64;
            let config = SimConfig {
                dx,
                snapshot_times: vec![100.0],
                ..SimConfig::defaults(100.0)
            };
            let (u0, v0) = default_initial_condition(&config);
            let snaps = run(&m, &config, &u0, &v0).unwrap();
            let s = &snaps[0];
            // Sample at the nodes of the coarsest grid (nested refinement).
            let stride = 1 << k;
            let coarse: Vec<f64> = s
                .u
                .iter()
                .step_by(stride)
                .chain(s.v.iter().step_by(stride))
                .copied()
                .collect();
            at_coarse.push(coarse);
        }
        let gap = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0_f64, f64::max)
        };
        let change1 = gap(&at_coarse[0], &at_coarse[1]);
        let change2 = gap(&at_coarse[1], &at_coarse[2]);
        // Each halving shrinks the update; the second change must be well
        // below the first (second-order interior scheme, first-order jump
        // sampling in the initial data).
        assert!(change2 < 4.0 * change1);
        assert!(change2 < 0.7 * change1, "changes {change1:.3e}, {change2:.3e}");
        assert!(change1 < 0.2, "refinement change unexpectedly large: {change1}");
    }

    #[test]
    fn extracted_profile_matches_the_wave_solver() {
        let m = fig_model();
        let config = SimConfig {
            x_min: -300.0,
            snapshot_times: (0..=16).map(|i| 10.0 * i as f64).collect(),
            ..SimConfig::defaults(160.0)
        };
        let (u0, v0) = default_initial_condition(&config);
        let snaps = run(&m, &config, &u0, &v0).unwrap();
        let (speed, _) = estimate_spreading_speed(&snaps, &m, 60.0).unwrap();

        // Early snapshots are still forming the front.
        assert!(matches!(
            extract_profile(&snaps[0..3], speed),
            Err(Error::NotConverged(_))
        ));

        let profile = extract_profile(&snaps[12..], speed).unwrap();
        assert_eq!(profile.provenance, Provenance::PdeExtraction);

        // The measured speed sits a hair below the continuum minimum, so the
        // ODE comparison wave is computed at the critical speed.
        let c_cmp = critical_speed(&m).max(speed);
        let wave = shoot(&m, c_cmp, 1e-6, 400.0, 1e-10).unwrap();
        let mut worst = 0.0_f64;
        let z_lo = profile.z[0].max(wave.z[0]);
        let z_hi = profile.z.last().unwrap().min(*wave.z.last().unwrap());
        let wave_u: Vec<f64> = wave.states.iter().map(|s| s[0]).collect();
        let wave_w: Vec<f64> = wave.states.iter().map(|s| s[1]).collect();
        let wave_v: Vec<f64> = wave.states.iter().map(|s| s[2]).collect();
        let wave_y: Vec<f64> = wave.states.iter().map(|s| s[3]).collect();
        for (i, &z) in profile.z.iter().enumerate() {
            if z < z_lo || z > z_hi {
                continue;
            }
            let st = profile.states[i];
            worst = worst
                .max((st[0] - interp_linear(&wave.z, &wave_u, z)).abs())
                .max((st[1] - interp_linear(&wave.z, &wave_w, z)).abs())
                .max((st[2] - interp_linear(&wave.z, &wave_v, z)).abs())
                .max((st[3] - interp_linear(&wave.z, &wave_y, z)).abs());
        }
        assert!(worst <= 5e-2, "profile mismatch {worst:.3e}");
    }
}
