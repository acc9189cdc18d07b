//! Adaptive Dormand–Prince 5(4) for two-component first-order systems.
//!
//! Callers integrate one smooth piece at a time; a step never crosses a
//! requested target, so weight discontinuities placed on targets never sit
//! inside a step.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

pub type State = [f64; 2];

/// Outcome of one [`Rk45::run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Run {
    pub state: State,
    /// Sign changes of the first component between accepted steps.
    pub sign_changes: usize,
    /// Sign of the first component at the end (`0` only if it never left zero).
    pub last_sign: i8,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk45 {
    pub rtol: f64,
    /// Rescale the state when its magnitude leaves `[1e-100, 1e100]`.
    pub renormalize: bool,
}

impl Rk45 {
    pub fn new(rtol: f64) -> Self {
        Rk45 { rtol, renormalize: true }
    }

    /// Integrates from `x0` through each of the ascending `targets`, calling
    /// `visit` with the state at every target. `sign` is the sign of the first
    /// component carried over from a previous piece.
    pub fn run<F, V>(&self, f: F, x0: f64, y0: State, sign: i8, targets: &[f64], mut visit: V) -> Result<Run>
    where
        F: Fn(f64, State) -> State,
        V: FnMut(f64, State),
    {
        let mut x = x0;
        let mut y = y0;
        let mut last_sign = if sign != 0 { sign } else { sign_of(y[0]) };
        let mut changes = 0;
        let mut steps = 0;
        let span = targets.last().map_or(0.0, |&end| end - x0);
        let mut h = span / 64.0;
        let mut peak = [y[0].abs(), y[1].abs()];
        let mut k1 = f(x, y);
        for &target in targets {
            while x < target {
                let step = h.min(target - x);
                let hit = step >= target - x;
                let (y_new, err, k7) = dp_step(&f, x, y, k1, step);
                let mut norm: f64 = 0.0;
                for i in 0..2 {
                    let floor = 1e-3 * peak[i].max(1e-300);
                    let sc = self.rtol * y[i].abs().max(y_new[i].abs()).max(floor);
                    norm = norm.max((err[i] / sc).abs());
                }
                if !norm.is_finite() {
                    return Err(Error::StepFailure { at: x });
                }
                if norm <= 1.0 {
                    x = if hit { target } else { x + step };
                    y = y_new;
                    k1 = k7;
                    steps += 1;
                    let s = sign_of(y[0]);
                    if s != 0 {
                        if last_sign != 0 && s != last_sign {
                            changes += 1;
                        }
                        last_sign = s;
                    }
                    if self.renormalize {
                        let m = y[0].abs().max(y[1].abs());
                        if m > 1e100 || (m > 0.0 && m < 1e-100) {
                            y = [y[0] / m, y[1] / m];
                            k1 = [k1[0] / m, k1[1] / m];
                            peak = [peak[0] / m, peak[1] / m];
                        }
                    }
                    peak = [peak[0].max(y[0].abs()), peak[1].max(y[1].abs())];
                }
                let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                // only let a truncated final step shrink h, not grow it
                if norm > 1.0 || !hit {
                    h = step * factor;
                } else {
                    h = h.max(step * factor.min(1.0));
                }
                if h <= 1e-14 * x.abs().max(span.abs()) {
                    return Err(Error::StepFailure { at: x });
                }
            }
            visit(target, y);
        }
        Ok(Run { state: y, sign_changes: changes, last_sign, steps })
    }
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn dp_step<F>(f: &F, x: f64, y: State, k1: State, h: f64) -> (State, State, State)
where
    F: Fn(f64, State) -> State,
{
    let mut k = [[0.0; 2]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = f(x + C[s] * h, ys);
    }
    // stage 7 is evaluated at the fifth-order solution (FSAL)
    let mut y5 = y;
    let mut err = [0.0; 2];
    for (s, ks) in k.iter().enumerate() {
        if s < 6 {
            y5[0] += h * A[6][s] * ks[0];
            y5[1] += h * A[6][s] * ks[1];
        }
        err[0] += h * E[s] * ks[0];
        err[1] += h * E[s] * ks[1];
    }
    (y5, err, k[6])
}
