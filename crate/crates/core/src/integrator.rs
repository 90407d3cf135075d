//! Deterministic ODE integration.
//!
//! The default method is the Dormand-Prince 5(4) embedded pair with PI
//! step-size control and the standard 4th-order dense-output interpolant;
//! output rows are produced on a uniform `sample_dt` grid through the
//! interpolant. A fixed-step classic RK4 mode takes constant steps of
//! `sample_dt` for bitwise-reproducible regression runs. Blow-up is
//! reported, never clipped: step-size underflow and non-finite states
//! abort with the failure time.

use crate::error::{Error, Result};

/// Integration method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    AdaptiveEmbeddedRk,
    FixedRk4,
}

impl Method {
    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "adaptive-embedded-rk" | "adaptive" => Some(Method::AdaptiveEmbeddedRk),
            "fixed-rk4" | "rk4" => Some(Method::FixedRk4),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::AdaptiveEmbeddedRk => "adaptive-embedded-rk",
            Method::FixedRk4 => "fixed-rk4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub rtol: f64,
    pub atol: f64,
    /// Spacing of output rows (and the step size in fixed-RK4 mode).
    pub sample_dt: f64,
    pub max_step: f64,
    pub method: Method,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        IntegrationSettings {
            rtol: 1e-10,
            atol: 1e-12,
            sample_dt: 0.1,
            max_step: f64::INFINITY,
            method: Method::AdaptiveEmbeddedRk,
        }
    }
}

impl IntegrationSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0) {
            return Err(Error::Settings(format!("rtol = {} must be > 0", self.rtol)));
        }
        if !(self.atol > 0.0) {
            return Err(Error::Settings(format!("atol = {} must be > 0", self.atol)));
        }
        if !(self.sample_dt > 0.0) {
            return Err(Error::Settings(format!(
                "sample_dt = {} must be > 0",
                self.sample_dt
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::Settings(format!(
                "max_step = {} must be > 0",
                self.max_step
            )));
        }
        Ok(())
    }
}

/// Uniformly sampled solution with the state derivative at each sample
/// (the derivative supports dense interpolation between rows, used by the
/// zero-crossing search).
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub derivs: Vec<[f64; N]>,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Cubic Hermite interpolation of one component between samples `k` and
    /// `k+1`.
    fn hermite(&self, k: usize, component: usize, t: f64) -> f64 {
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (self.states[k][component], self.states[k + 1][component]);
        let (d0, d1) = (
            h * self.derivs[k][component],
            h * self.derivs[k + 1][component],
        );
        let s2 = s * s;
        let s3 = s2 * s;
        y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + d0 * (s3 - 2.0 * s2 + s)
            + y1 * (-2.0 * s3 + 3.0 * s2)
            + d1 * (s3 - s2)
    }

    /// Earliest `t* > after` at which `component` changes sign: located by
    /// scanning adjacent samples, then refined by bisection on the dense
    /// interpolant to 1e-6 absolute. `None` when the component never
    /// changes sign after `after`.
    pub fn first_zero_crossing(&self, component: usize, after: f64) -> Option<f64> {
        self.zero_crossings(component, after).into_iter().next()
    }

    /// All sign-change times of `component` after `after`, refined as in
    /// [`Self::first_zero_crossing`].
    pub fn zero_crossings(&self, component: usize, after: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0..self.len().saturating_sub(1) {
            if self.times[k + 1] <= after {
                continue;
            }
            let a = self.states[k][component];
            let b = self.states[k + 1][component];
            if a * b >= 0.0 {
                continue;
            }
            let t = self.refine_crossing(k, component);
            if t > after {
                out.push(t);
            }
        }
        out
    }

    fn refine_crossing(&self, k: usize, component: usize) -> f64 {
        let mut lo = self.times[k];
        let mut hi = self.times[k + 1];
        let mut f_lo = self.states[k][component];
        // Bisection on the Hermite interpolant; endpoint values match the
        // samples, so the bracket is valid.
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            let f_mid = self.hermite(k, component, mid);
            if f_mid == 0.0 {
                return mid;
            }
            if (f_lo < 0.0) == (f_mid < 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// 5th-order minus 4th-order weights (error estimator).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output weights.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller constants (order-5 error exponent with Lund stabilisation).
const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const PI_EXPO: f64 = 0.2 - PI_BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Hard cap on attempted steps per integration. Problems that exhaust it
/// (oscillation frequencies growing without bound, say) are reported as
/// too stiff rather than spinning forever.
const MAX_STEPS: usize = 10_000_000;

struct DenseStep<const N: usize> {
    t0: f64,
    h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    fn new(t0: f64, h: f64, y0: &[f64; N], y1: &[f64; N], k: &[[f64; N]; 7]) -> Self {
        let mut cont = [[0.0; N]; 5];
        for i in 0..N {
            let dy = y1[i] - y0[i];
            cont[0][i] = y0[i];
            cont[1][i] = dy;
            cont[2][i] = h * k[0][i] - dy;
            cont[3][i] = dy - h * k[6][i] - cont[2][i];
            cont[4][i] = h
                * (D1 * k[0][i]
                    + D3 * k[2][i]
                    + D4 * k[3][i]
                    + D5 * k[4][i]
                    + D6 * k[5][i]
                    + D7 * k[6][i]);
        }
        DenseStep { t0, h, cont }
    }

    fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = self.cont[0][i]
                + theta
                    * (self.cont[1][i]
                        + theta1
                            * (self.cont[2][i]
                                + theta * (self.cont[3][i] + theta1 * self.cont[4][i])));
        }
        y
    }
}

fn scaled_rms<const N: usize>(v: &[f64; N], sc: &[f64; N]) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let q = v[i] / sc[i];
        s += q * q;
    }
    (s / N as f64).sqrt()
}

fn all_finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrate `dy/dt = f(t, y)` over `t_span`, producing uniformly sampled
/// output every `sample_dt`.
pub fn integrate<const N: usize, F>(
    mut f: F,
    y0: [f64; N],
    t_span: (f64, f64),
    settings: &IntegrationSettings,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    settings.validate()?;
    let (t0, t1) = t_span;
    if !(t1 > t0) {
        return Err(Error::Settings(format!(
            "integration span ({t0}, {t1}) must be increasing"
        )));
    }
    if !all_finite(&y0) {
        return Err(Error::Divergence { t: t0 });
    }
    match settings.method {
        Method::FixedRk4 => integrate_rk4(&mut f, y0, t0, t1, settings),
        Method::AdaptiveEmbeddedRk => integrate_dopri5(&mut f, y0, t0, t1, settings),
    }
}

fn integrate_rk4<const N: usize, F>(
    f: &mut F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    settings: &IntegrationSettings,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let dt = settings.sample_dt;
    let span = t1 - t0;
    let n_steps = ((span / dt) - 1e-9).ceil().max(1.0) as usize;

    let mut traj = Trajectory {
        times: Vec::with_capacity(n_steps + 1),
        states: Vec::with_capacity(n_steps + 1),
        derivs: Vec::with_capacity(n_steps + 1),
    };
    let mut y = y0;
    let mut t = t0;
    traj.times.push(t);
    traj.states.push(y);
    traj.derivs.push(f(t, &y));

    for step in 0..n_steps {
        let t_next = if step + 1 == n_steps {
            t1
        } else {
            t0 + (step + 1) as f64 * dt
        };
        let h = t_next - t;
        let k1 = f(t, &y);
        let mut y2 = [0.0; N];
        for i in 0..N {
            y2[i] = y[i] + 0.5 * h * k1[i];
        }
        let k2 = f(t + 0.5 * h, &y2);
        let mut y3 = [0.0; N];
        for i in 0..N {
            y3[i] = y[i] + 0.5 * h * k2[i];
        }
        let k3 = f(t + 0.5 * h, &y3);
        let mut y4 = [0.0; N];
        for i in 0..N {
            y4[i] = y[i] + h * k3[i];
        }
        let k4 = f(t + h, &y4);
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = t_next;
        if !all_finite(&y) {
            return Err(Error::Divergence { t });
        }
        traj.times.push(t);
        traj.states.push(y);
        traj.derivs.push(f(t, &y));
    }
    Ok(traj)
}

fn integrate_dopri5<const N: usize, F>(
    f: &mut F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    settings: &IntegrationSettings,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let span = t1 - t0;
    let h_min = span * 1e-14;
    let (rtol, atol) = (settings.rtol, settings.atol);

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        derivs: Vec::new(),
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    traj.times.push(t);
    traj.states.push(y);
    traj.derivs.push(k1);

    // output grid position: next sample strictly between t0 and t1
    let grid_eps = settings.sample_dt.min(span) * 1e-9;
    let mut next_sample = 1usize;
    let sample_time = |k: usize| t0 + k as f64 * settings.sample_dt;

    let mut h = initial_step(f, t0, &y, &k1, rtol, atol, span).min(settings.max_step);
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    let mut k = [[0.0; N]; 7];
    let mut attempted_steps = 0usize;

    loop {
        if t >= t1 {
            break;
        }
        if h < h_min {
            return Err(Error::StepSizeUnderflow { t });
        }
        attempted_steps += 1;
        if attempted_steps > MAX_STEPS {
            return Err(Error::StepBudgetExhausted { t });
        }
        h = h.min(settings.max_step);
        let mut final_step = false;
        if t + h >= t1 {
            h = t1 - t;
            final_step = true;
        }

        // stages
        k[0] = k1;
        let mut stage = |coeffs: &[(f64, usize)], c_frac: f64, k: &[[f64; N]; 7]| -> [f64; N] {
            let mut ys = y;
            for &(a, idx) in coeffs {
                for i in 0..N {
                    ys[i] += h * a * k[idx][i];
                }
            }
            f(t + c_frac * h, &ys)
        };
        k[1] = stage(&[(A21, 0)], C[1], &k);
        k[2] = stage(&[(A31, 0), (A32, 1)], C[2], &k);
        k[3] = stage(&[(A41, 0), (A42, 1), (A43, 2)], C[3], &k);
        k[4] = stage(&[(A51, 0), (A52, 1), (A53, 2), (A54, 3)], C[4], &k);
        k[5] = stage(
            &[(A61, 0), (A62, 1), (A63, 2), (A64, 3), (A65, 4)],
            C[5],
            &k,
        );
        // 5th-order solution (FSAL row)
        let mut y_new = y;
        for i in 0..N {
            y_new[i] +=
                h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
        }
        let t_new = if final_step { t1 } else { t + h };
        k[6] = f(t_new, &y_new);

        // error estimate
        let mut err_vec = [0.0; N];
        let mut sc = [0.0; N];
        for i in 0..N {
            err_vec[i] = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            sc[i] = atol + rtol * y[i].abs().max(y_new[i].abs());
        }
        let err = scaled_rms(&err_vec, &sc);

        if !err.is_finite() || !all_finite(&y_new) {
            // retry with a much smaller step; persistent failure ends in
            // step-size underflow carrying the failure time
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        if err <= 1.0 {
            // accept
            let dense = DenseStep::new(t, h, &y, &y_new, &k);
            while next_sample as f64 * settings.sample_dt <= span - grid_eps
                && sample_time(next_sample) <= t_new + grid_eps
            {
                let ts = sample_time(next_sample);
                if ts > t1 - grid_eps {
                    break;
                }
                let ys = dense.eval(ts);
                traj.times.push(ts);
                traj.states.push(ys);
                traj.derivs.push(f(ts, &ys));
                next_sample += 1;
            }

            t = t_new;
            y = y_new;
            k1 = k[6];

            if t >= t1 {
                traj.times.push(t1);
                traj.states.push(y);
                traj.derivs.push(k1);
                break;
            }

            let err_clamped = err.max(1e-4);
            let mut fac = err_clamped.powf(PI_EXPO) / fac_old.powf(PI_BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            fac_old = err_clamped;
            last_rejected = false;
            h = h_new;
        } else {
            // reject
            let fac = (err.powf(PI_EXPO) / SAFETY).min(1.0 / FAC_MIN);
            h /= fac;
            last_rejected = true;
        }
    }

    Ok(traj)
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    rtol: f64,
    atol: f64,
    span: f64,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut sc = [0.0; N];
    for i in 0..N {
        sc[i] = atol + rtol * y0[i].abs();
    }
    let d0 = scaled_rms(y0, &sc);
    let d1 = scaled_rms(f0, &sc);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
    .min(span);

    let mut y1 = *y0;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = f(t0 + h0, &y1);
    let mut df = [0.0; N];
    for i in 0..N {
        df[i] = f1[i] - f0[i];
    }
    let d2 = scaled_rms(&df, &sc) / h0;

    let d_max = d1.max(d2);
    let h1 = if d_max <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d_max).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}
