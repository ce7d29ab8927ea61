//! Safeguarded 1-D root finding on a sign-change bracket.

use crate::{Error, Result};

/// Root of a continuous `f` on `[lo, hi]` with `f(lo) f(hi) <= 0`.
///
/// Illinois-damped false position with a bisection safeguard: every iterate
/// stays inside the current bracket, so convergence is guaranteed. Stops when
/// `|f(x)| <= tol` or the bracket width drops below `max(tol, eps-floor)`.
pub fn solve_bracketed_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::invalid(format!(
            "solve_bracketed_root: bad bracket [{lo}, {hi}]"
        )));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::invalid(format!(
            "solve_bracketed_root: no sign change on [{lo}, {hi}] (f: {fa:.3e}, {fb:.3e})"
        )));
    }
    // side = which endpoint was kept last, for Illinois damping
    let mut side = 0i8;
    for _ in 0..200 {
        let width = b - a;
        let floor = 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
        if width <= tol.max(floor) {
            return Ok(0.5 * (a + b));
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx == 0.0 || fx.abs() <= tol {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NoConvergence {
        routine: "solve_bracketed_root",
        detail: format!("bracket [{a}, {b}] after 200 iterations"),
    })
}
