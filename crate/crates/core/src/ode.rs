//! Adaptive Dormand–Prince 5(4) integrator for small autonomous systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    pub fn tight() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
        }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 10_000_000;

/// Integrates `y' = f(y)` from `t0` to `t1` and returns `y(t1)`.
/// `h` carries the step size between calls; pass a non-positive value to
/// let the integrator choose.
pub fn integrate<const N: usize>(
    f: impl Fn(&[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: Tolerance,
    h: &mut f64,
) -> Result<[f64; N]> {
    let mut t = t0;
    let mut y = y0;
    if t1 <= t0 {
        return Ok(y);
    }
    if *h <= 0.0 {
        *h = ((t1 - t0) * 1e-3).min(1e-2);
    }
    let mut k = [[0.0; N]; 7];
    k[0] = f(&y);
    let mut steps = 0;
    while t < t1 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Integrator {
                t,
                reason: "step budget exhausted".into(),
            });
        }
        let last = t + *h >= t1;
        let step = if last { t1 - t } else { *h };
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                *v += step * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(&ys);
        }
        let mut y5 = y;
        let mut err = 0.0_f64;
        for i in 0..N {
            let incr5: f64 = (0..7).map(|s| B5[s] * k[s][i]).sum();
            let incr4: f64 = (0..7).map(|s| B4[s] * k[s][i]).sum();
            y5[i] = y[i] + step * incr5;
            let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((step * (incr5 - incr4) / sc).abs());
        }
        if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
            *h = step * 0.25;
            if *h < 1e-14 * t1.abs().max(1.0) {
                return Err(Error::Integrator {
                    t,
                    reason: "non-finite solution".into(),
                });
            }
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + step };
            y = y5;
            // FSAL: the 7th stage is f at the accepted point
            k[0] = k[6];
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        let proposed = step * factor;
        if !(last && err <= 1.0) {
            *h = proposed;
        }
        if *h < 1e-14 * t1.abs().max(1.0) {
            return Err(Error::Integrator {
                t,
                reason: "step size underflow".into(),
            });
        }
    }
    Ok(y)
}
