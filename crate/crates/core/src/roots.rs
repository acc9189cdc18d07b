//! Bracket scanning and bisection shared by the shooting solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric scan for the principal root of a shooting residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// First scan point after the floor.
    pub start: f64,
    /// Largest λ tried before giving up.
    pub cap: f64,
    /// Ratio between consecutive scan points.
    pub factor: f64,
    /// Relative bracket width at which refinement stops.
    pub rel_tol: f64,
    /// Absolute width floor near zero.
    pub abs_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { start: 1e-6, cap: 1e8, factor: 1.25, rel_tol: 1e-12, abs_tol: 1e-14 }
    }
}

/// Floor excluded from the search in the Neumann case (λ = 0 is an eigenvalue).
pub const NEUMANN_FLOOR: f64 = 1e-9;

/// Relative distance below a root at which `accept` is consulted. Right at
/// a root the sign of `u` at the far end can be lost to rounding when the
/// shot is dominated by a growing exponential.
pub const ACCEPT_PROBE_OFFSET: f64 = 1e-9;

fn opposite(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

/// Finds the smallest root of `residual` above `floor` that `accept` approves.
///
/// Sign changes are located on the grid `floor, start, start·factor, …, cap`
/// and refined by bisection followed by one secant step. `accept` is asked
/// about a point just below the root (see [`ACCEPT_PROBE_OFFSET`]); a
/// rejected root (an eigenfunction with interior zeros) lets the scan
/// continue.
pub fn scan_principal<F, A>(floor: f64, opts: &ScanOptions, residual: F, accept: A) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    A: Fn(f64) -> Result<bool>,
{
    let mut lo = floor;
    let mut f_lo = residual(lo)?;
    let mut hi = opts.start.max(floor * opts.factor);
    loop {
        let f_hi = residual(hi)?;
        let probe = |root: f64| (root * (1.0 - ACCEPT_PROBE_OFFSET)).max(lo);
        if f_hi == 0.0 && accept(probe(hi))? {
            return Ok(hi);
        }
        if opposite(f_lo, f_hi) {
            let root = refine(lo, hi, f_lo, opts, &residual)?;
            if accept(probe(root))? {
                return Ok(root);
            }
        }
        if hi >= opts.cap {
            return Err(Error::NoRootInRange { cap: opts.cap });
        }
        lo = hi;
        f_lo = f_hi;
        hi = (hi * opts.factor).min(opts.cap);
    }
}

fn refine<F>(mut lo: f64, mut hi: f64, mut f_lo: f64, opts: &ScanOptions, residual: &F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut f_hi = residual(hi)?;
    for _ in 0..200 {
        if hi - lo <= opts.rel_tol * hi.abs() + opts.abs_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = residual(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if opposite(f_lo, f_mid) {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    // secant polish inside the final bracket
    let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if secant.is_finite() && secant >= lo && secant <= hi {
        Ok(secant)
    } else {
        Ok(0.5 * (lo + hi))
    }
}

/// Plain bisection on `[lo, hi]` to absolute tolerance `tol`.
pub fn bisect<F>(mut lo: f64, mut hi: f64, tol: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !opposite(f_lo, f_hi) {
        return Err(Error::NoSignChangeInBracket { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if opposite(f_lo, f_mid) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_first_accepted_root() {
        // roots at 1, 4, 9
        let f = |x: f64| Ok((std::f64::consts::PI * x.sqrt()).sin());
        let root = scan_principal(0.0, &ScanOptions::default(), f, |_| Ok(true)).unwrap();
        assert!((root - 1.0).abs() < 1e-11);
        let root = scan_principal(0.0, &ScanOptions::default(), f, |x| Ok(x > 2.0)).unwrap();
        assert!((root - 4.0).abs() < 1e-11);
    }

    #[test]
    fn reports_cap() {
        let opts = ScanOptions { cap: 10.0, ..ScanOptions::default() };
        let err = scan_principal(0.0, &opts, |_| Ok(1.0), |_| Ok(true)).unwrap_err();
        assert_eq!(err, Error::NoRootInRange { cap: 10.0 });
    }

    #[test]
    fn bisection() {
        let r = bisect(0.0, 2.0, 1e-10, |x| Ok(x * x - 2.0)).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-10);
        assert!(matches!(bisect(0.0, 1.0, 1e-6, |x| Ok(x + 1.0)), Err(Error::NoSignChangeInBracket { .. })));
    }
}
