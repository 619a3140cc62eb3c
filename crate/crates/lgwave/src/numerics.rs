//! Shared numerical kernels: root bracketing, adaptive quadrature, an embedded
//! Runge-Kutta integrator on a fixed output grid, exponential convolution
//! filters for kernel operators, and small regression/interpolation helpers.

/// Bisection on a sign-changing bracket.
///
/// Iterates until both `|f(mid)| < value_tol` and the bracket width is below
/// `width_tol`, or until the bracket collapses to floating-point resolution,
/// whichever comes first. The bracket `[lo, hi]` must satisfy
/// `f(lo) * f(hi) <= 0`.
pub fn bisect(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    value_tol: f64,
    width_tol: f64,
) -> Result<f64, String> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(format!("no sign change on [{lo}, {hi}]"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid); // bracket at floating-point resolution
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if hi - lo < width_tol && fmid.abs() < value_tol {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` (either orientation) to
/// absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Outcome of a grid integration: either the full grid was covered or the stop
/// callback halted it at the reported node index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridEnd {
    Completed,
    Stopped(usize),
}

// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th order solution weights (same as last A row, FSAL form).
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// Embedded 4th order weights.
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dp_step(
    rhs: &impl Fn(f64, &[f64; 4]) -> [f64; 4],
    t: f64,
    y: &[f64; 4],
    h: f64,
) -> ([f64; 4], f64, [f64; 4]) {
    let mut k = [[0.0_f64; 4]; 7];
    k[0] = rhs(t, y);
    for stage in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = DP_A[stage][j];
            if a != 0.0 {
                for (yi, ki) in ys.iter_mut().zip(kj) {
                    *yi += h * a * ki;
                }
            }
        }
        k[stage] = rhs(t + DP_C[stage] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0_f64; 4];
    for (stage, kj) in k.iter().enumerate() {
        for i in 0..4 {
            y5[i] += h * DP_B5[stage] * kj[i];
            err[i] += h * (DP_B5[stage] - DP_B4[stage]) * kj[i];
        }
    }
    let err_norm = err.iter().map(|e| e.abs()).fold(0.0, f64::max);
    (y5, err_norm, k[6])
}

/// Integrate `dy/dt = rhs(t, y)` from `t0` across `n_out` uniform output cells
/// of width `h_out`, adaptively substepping inside each cell so the local
/// error estimate stays below `atol + rtol * |y|`. The observer `stop` is
/// called at every landed output node (including the initial one); returning
/// `true` halts the integration at that node.
///
/// Returns the output-node states (in order, ending at the halt node if any).
pub fn rk45_grid(
    rhs: &impl Fn(f64, &[f64; 4]) -> [f64; 4],
    y0: [f64; 4],
    t0: f64,
    h_out: f64,
    n_out: usize,
    rtol: f64,
    atol: f64,
    mut stop: impl FnMut(usize, f64, &[f64; 4]) -> bool,
) -> (Vec<[f64; 4]>, GridEnd) {
    let mut nodes = Vec::with_capacity(n_out + 1);
    let mut y = y0;
    nodes.push(y);
    if stop(0, t0, &y) {
        return (nodes, GridEnd::Stopped(0));
    }
    let mut h = h_out;
    for node in 1..=n_out {
        let t_target = t0 + node as f64 * h_out;
        let mut t = t0 + (node - 1) as f64 * h_out;
        let mut guard = 0usize;
        while t < t_target {
            guard += 1;
            if guard > 100_000 {
                // Step size collapsed; bail out at the previous node.
                return (nodes, GridEnd::Stopped(node - 1));
            }
            let h_try = h.min(t_target - t);
            let (y_new, err, _) = dp_step(rhs, t, &y, h_try);
            let scale = atol
                + rtol
                    * y.iter()
                        .chain(y_new.iter())
                        .map(|v| v.abs())
                        .fold(0.0, f64::max);
            let ratio = err / scale;
            if ratio <= 1.0 || h_try <= 1e-14 * t_target.abs().max(1.0) {
                t += h_try;
                y = y_new;
            }
            // PI-free classic controller with safety factor and clamps.
            let factor = if ratio > 0.0 {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h = (h_try * factor).min(h_out);
        }
        nodes.push(y);
        if stop(node, t_target, &y) {
            return (nodes, GridEnd::Stopped(node));
        }
    }
    (nodes, GridEnd::Completed)
}

/// Exponential smoothing weights for `int_cell exp(kappa (edge - y)) F(y) dy`
/// with `F` piecewise linear on a cell of width `h`; `kappa != 0`.
///
/// For the left-running filter `kappa < 0` and `edge` is the right cell edge;
/// `w_far` weights the far node (distance `h`), `w_near` the edge node.
fn exp_cell_weights(kappa: f64, h: f64) -> (f64, f64) {
    let x = kappa * h;
    if x.abs() < 1e-4 {
        // Series to O(x^3): exact enough at f64 for |x| < 1e-4.
        let w_near = h * (0.5 + x / 6.0 + x * x / 24.0);
        let w_far = h * (0.5 + x / 3.0 + x * x / 8.0);
        (w_far, w_near)
    } else {
        let e = x.exp();
        let w_near = (e - 1.0 - x) / (kappa * kappa * h);
        let w_far = (e - 1.0) / kappa - w_near;
        (w_far, w_near)
    }
}

/// Two-sided exponential kernel operator on a uniform grid:
///
/// ```text
/// (K F)(z_i) = int_{-inf}^{z_i} e^{nu_minus (z_i - y)} F(y) dy
///            + int_{z_i}^{inf}  e^{nu_plus  (z_i - y)} F(y) dy
/// ```
///
/// with `nu_minus < 0 < nu_plus`. `F` is taken piecewise linear between nodes
/// and constant beyond both grid ends, which reproduces constant fixed points
/// exactly.
pub struct ExpKernel {
    decay_l: f64,
    wl_far: f64,
    wl_near: f64,
    tail_l: f64,
    decay_r: f64,
    wr_far: f64,
    wr_near: f64,
    tail_r: f64,
}

impl ExpKernel {
    pub fn new(nu_minus: f64, nu_plus: f64, h: f64) -> Self {
        assert!(nu_minus < 0.0 && nu_plus > 0.0 && h > 0.0);
        let (wl_far, wl_near) = exp_cell_weights(nu_minus, h);
        let (wr_far, wr_near) = exp_cell_weights(-nu_plus, h);
        ExpKernel {
            decay_l: (nu_minus * h).exp(),
            wl_far,
            wl_near,
            tail_l: -1.0 / nu_minus,
            decay_r: (-nu_plus * h).exp(),
            wr_far,
            wr_near,
            tail_r: 1.0 / nu_plus,
        }
    }

    /// Apply the operator to the sampled `f`, writing into `out`.
    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        assert!(n >= 2 && out.len() == n);
        // Left-running prefix: integral over (-inf, z_i].
        let mut acc = self.tail_l * f[0];
        out[0] = acc;
        for i in 1..n {
            acc = self.decay_l * acc + self.wl_far * f[i - 1] + self.wl_near * f[i];
            out[i] = acc;
        }
        // Right-running suffix: integral over [z_i, inf).
        let mut acc = self.tail_r * f[n - 1];
        out[n - 1] += acc;
        for i in (0..n - 1).rev() {
            acc = self.decay_r * acc + self.wr_far * f[i + 1] + self.wr_near * f[i];
            out[i] += acc;
        }
    }
}

/// Least-squares line fit. Returns `(slope, intercept, r_squared)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Linear interpolation of `(xs, ys)` samples at `x`; `xs` strictly
/// increasing. Clamps outside the range.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let mut lo = 0;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if xs[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + t * (ys[hi] - ys[lo])
}
