//! Direct shooting for the radial problem on a shell `r1 < r < r2`:
//!
//! `u'' + (n−1)/r u' + λ m̃(r) u = 0`, `u'(r1) = β u(r1)`, `u'(r2) = −β u(r2)`.
//!
//! The weight is constant on each piece, so the integrator restarts at every
//! piece boundary and never steps across a jump.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Rk45;
use crate::roots::{scan_principal, ScanOptions, NEUMANN_FLOOR};
use crate::sl::{normalize_samples, EigenResult, EigenSample, Shot, SAMPLE_POINTS};
use crate::weights::{AdmissibilityParams, BangBangWeight, Piece};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellProblem {
    n: u32,
    r1: f64,
    r2: f64,
    beta: f64,
    weight_r: BangBangWeight,
    /// Mean-weight bound of the admissible class, when known.
    m0: Option<f64>,
}

impl ShellProblem {
    pub fn new(n: u32, weight_r: BangBangWeight, beta: f64, m0: Option<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionError { n, expected: "a shell needs n >= 2" });
        }
        if weight_r.domain().a() <= 0.0 {
            return Err(Error::InvalidDomain(format!("need 0 < r1, got r1 = {}", weight_r.domain().a())));
        }
        ShellProblem::build(n, weight_r, beta, m0)
    }

    /// The `n = 1` instance: no curvature term, any interval.
    pub fn flat(weight: BangBangWeight, beta: f64) -> Result<Self> {
        ShellProblem::build(1, weight, beta, None)
    }

    fn build(n: u32, weight_r: BangBangWeight, beta: f64, m0: Option<f64>) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidParams(format!("beta must be >= 0, got {beta}")));
        }
        let d = weight_r.domain();
        Ok(ShellProblem { n, r1: d.a(), r2: d.b(), beta, weight_r, m0 })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kappa(&self) -> f64 {
        self.weight_r.kappa()
    }

    pub fn weight_r(&self) -> &BangBangWeight {
        &self.weight_r
    }

    pub fn m0(&self) -> Option<f64> {
        self.m0
    }

    /// Same shell and parameters with a different radial weight.
    pub fn with_weight(&self, weight_r: BangBangWeight) -> Result<Self> {
        if weight_r.domain() != self.weight_r.domain() {
            return Err(Error::InvalidWeight("weight must live on (r1, r2)".to_string()));
        }
        ShellProblem::build(self.n, weight_r, self.beta, self.m0)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        ShellProblem::build(self.n, self.weight_r.clone(), beta, self.m0)
    }

    pub fn params(&self) -> Result<AdmissibilityParams> {
        let m0 = self.m0.ok_or_else(|| Error::InvalidParams("shell problem has no m0".to_string()))?;
        AdmissibilityParams::new(m0, self.kappa(), self.beta)
    }
}

/// `∫ m̃ r^{n−1} dr / ∫ r^{n−1} dr` over `(r1, r2)`.
pub fn weighted_mean(sp: &ShellProblem) -> f64 {
    let moment = |a: f64, b: f64| {
        let k = sp.n as f64;
        (b.powf(k) - a.powf(k)) / k
    };
    let num: f64 = sp.weight_r.pieces().iter().map(|p| p.value * moment(p.start, p.end)).sum();
    num / moment(sp.r1, sp.r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialOptions {
    pub rtol: f64,
    pub scan: ScanOptions,
    pub samples: usize,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions { rtol: 1e-10, scan: ScanOptions::default(), samples: SAMPLE_POINTS }
    }
}

fn rhs(n: u32, lambda: f64, mu: f64) -> impl Fn(f64, [f64; 2]) -> [f64; 2] {
    let curvature = n as f64 - 1.0;
    move |r, y| {
        let drift = if curvature == 0.0 { 0.0 } else { curvature / r * y[1] };
        [y[1], -drift - lambda * mu * y[0]]
    }
}

fn shoot_with(sp: &ShellProblem, pieces: &[Piece], lambda: f64, rk: &Rk45) -> Result<Shot> {
    let mut y = [1.0, sp.beta];
    let mut sign = 1;
    let mut zeros = 0;
    for p in pieces {
        let run = rk.run(rhs(sp.n, lambda, p.value), p.start, y, sign, &[p.end], |_, _| {})?;
        y = run.state;
        sign = run.last_sign;
        zeros += run.sign_changes;
    }
    Ok(Shot { residual: y[1] + sp.beta * y[0], zero_count: zeros, final_state: (y[0], y[1]) })
}

/// Residual `u'(r2) + β u(r2)` and sign changes of `u` for the shot from `r1`
/// with `(u, u') = (1, β)`.
pub fn radial_shoot(sp: &ShellProblem, lambda: f64) -> Result<Shot> {
    shoot_with(sp, &sp.weight_r.pieces(), lambda, &Rk45::new(RadialOptions::default().rtol))
}

pub fn radial_principal_eigenvalue(sp: &ShellProblem) -> Result<EigenResult> {
    radial_principal_eigenvalue_with(sp, &RadialOptions::default())
}

pub fn radial_principal_eigenvalue_with(sp: &ShellProblem, opts: &RadialOptions) -> Result<EigenResult> {
    let pieces = sp.weight_r.pieces();
    let floor = if sp.beta == 0.0 {
        let mean = weighted_mean(sp);
        if mean >= 0.0 {
            return Err(Error::ConstraintViolated { mean });
        }
        NEUMANN_FLOOR
    } else {
        0.0
    };
    let rk = Rk45::new(opts.rtol);
    let lambda = scan_principal(
        floor,
        &opts.scan,
        |l| Ok(shoot_with(sp, &pieces, l, &rk)?.residual),
        |l| Ok(shoot_with(sp, &pieces, l, &rk)?.zero_count == 0),
    )?;
    let shot = shoot_with(sp, &pieces, lambda, &rk)?;
    let (ub, dub) = shot.final_state;
    let residual = (dub + sp.beta * ub).abs() / (dub.abs() + sp.beta * ub.abs() + ub.abs());
    let samples = sample(sp, &pieces, lambda, opts)?;
    Ok(EigenResult { lambda, eigenfunction_samples: samples, zero_count: shot.zero_count, residual })
}

/// Number of Simpson intervals (even, at least 2) given to a piece.
pub(crate) fn piece_intervals(piece_len: f64, total_len: f64, total: usize) -> usize {
    let k = ((total as f64) * piece_len / total_len / 2.0).ceil() as usize;
    2 * k.max(1)
}

/// Eigenfunction on a uniform grid inside every piece (shared endpoints once).
fn sample(sp: &ShellProblem, pieces: &[Piece], lambda: f64, opts: &RadialOptions) -> Result<Vec<EigenSample>> {
    let rk = Rk45 { rtol: opts.rtol, renormalize: false };
    let total_len = sp.r2 - sp.r1;
    let mut out = vec![EigenSample { x: sp.r1, u: 1.0, du: sp.beta }];
    let mut y = [1.0, sp.beta];
    for p in pieces {
        let k = piece_intervals(p.length(), total_len, opts.samples);
        let targets: Vec<f64> =
            (1..=k).map(|i| if i == k { p.end } else { p.start + p.length() * i as f64 / k as f64 }).collect();
        let run = rk.run(rhs(sp.n, lambda, p.value), p.start, y, 1, &targets, |x, s| {
            out.push(EigenSample { x, u: s[0], du: s[1] })
        })?;
        y = run.state;
    }
    normalize_samples(&mut out);
    Ok(out)
}

/// Composite Simpson over each piece of `pieces`, using the piecewise-uniform
/// samples produced by the radial sampler.
pub(crate) fn simpson_by_piece<G>(samples: &[EigenSample], pieces: &[Piece], g: G) -> f64
where
    G: Fn(&EigenSample, f64) -> f64,
{
    let mut total = 0.0;
    let mut idx = 0;
    for p in pieces {
        let start = idx;
        while idx + 1 < samples.len() && samples[idx + 1].x <= p.end {
            idx += 1;
        }
        let pts = &samples[start..=idx];
        let k = pts.len() - 1;
        let h = p.length() / k as f64;
        let mut acc = g(&pts[0], p.value) + g(&pts[k], p.value);
        for (i, s) in pts.iter().enumerate().take(k).skip(1) {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(s, p.value);
        }
        total += acc * h / 3.0;
    }
    total
}

/// Radial Rayleigh quotient of a computed eigenfunction.
pub fn rayleigh_quotient(sp: &ShellProblem, result: &EigenResult) -> f64 {
    let k = sp.n as f64 - 1.0;
    let s = &result.eigenfunction_samples;
    let pieces = sp.weight_r.pieces();
    let grad = simpson_by_piece(s, &pieces, |e, _| e.du * e.du * e.x.powf(k));
    let mass = simpson_by_piece(s, &pieces, |e, m| m * e.u * e.u * e.x.powf(k));
    let (first, last) = (s[0], s[s.len() - 1]);
    let boundary = sp.beta * (first.u * first.u * sp.r1.powf(k) + last.u * last.u * sp.r2.powf(k));
    (grad + boundary) / mass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl::{principal_eigenvalue, RobinProblem1D};
    use crate::weights::IntervalDomain;

    fn shell(n: u32, r1: f64, r2: f64, s: f64, e: f64, beta: f64) -> ShellProblem {
        let d = IntervalDomain::new(r1, r2).unwrap();
        ShellProblem::new(n, BangBangWeight::single(d, 1.0, s, e).unwrap(), beta, None).unwrap()
    }

    #[test]
    fn zero_lambda_shots() {
        let sp = shell(3, 1.0, 2.0, 1.2, 1.5, 0.0);
        let shot = radial_shoot(&sp, 0.0).unwrap();
        assert_eq!(shot.residual, 0.0);
        // u = 1 + ln r solves u'' + u'/r = 0 with u'(1) = u(1) = 1
        let sp = shell(2, 1.0, 2.0, 1.2, 1.5, 1.0);
        let shot = radial_shoot(&sp, 0.0).unwrap();
        let want = 0.5 + 1.0 + 2f64.ln();
        assert!((shot.residual - want).abs() < 1e-10, "{}", shot.residual);
        assert_eq!(shot.zero_count, 0);
    }

    #[test]
    fn flat_instance_matches_transfer_matrix() {
        for (s, e, beta) in [(0.1, 0.4, 0.0), (1.2, 1.7, 2.0), (0.5, 2.5, 0.3)] {
            let d = IntervalDomain::new(0.0, 3.0).unwrap();
            let w = BangBangWeight::single(d, 1.7, s, e).unwrap();
            let exact = principal_eigenvalue(&RobinProblem1D::symmetric(w.clone(), beta).unwrap()).unwrap();
            let flat = radial_principal_eigenvalue(&ShellProblem::flat(w, beta).unwrap()).unwrap();
            assert!((exact.lambda - flat.lambda).abs() <= 1e-9 * exact.lambda, "{} {}", exact.lambda, flat.lambda);
        }
    }

    #[test]
    fn rayleigh_quotient_reproduces_lambda() {
        for n in [2, 3, 5] {
            let sp = shell(n, 1.0, 2.0, 1.3, 1.6, 0.7);
            let r = radial_principal_eigenvalue(&sp).unwrap();
            assert_eq!(r.zero_count, 0);
            assert!(r.min_sample() > 0.0);
            let q = rayleigh_quotient(&sp, &r);
            assert!((q - r.lambda).abs() <= 1e-6 * r.lambda, "n={n}: {q} vs {}", r.lambda);
        }
    }

    #[test]
    fn tolerance_refinement() {
        let sp = shell(3, 1.0, 2.0, 1.1, 1.4, 0.5);
        let coarse = radial_principal_eigenvalue(&sp).unwrap().lambda;
        let opts = RadialOptions { rtol: 0.5e-10, ..RadialOptions::default() };
        let fine = radial_principal_eigenvalue_with(&sp, &opts).unwrap().lambda;
        assert!((coarse - fine).abs() <= 1e-8 * fine);
    }

    #[test]
    fn ends_are_not_interchangeable() {
        // equal-volume favourable shells at each end, n = 3
        let (r1, r2): (f64, f64) = (1.0, 2.0);
        let vol = 0.25 * (r2.powi(3) - r1.powi(3));
        let inner = (r1.powi(3) + vol).cbrt();
        let outer = (r2.powi(3) - vol).cbrt();
        let a = radial_principal_eigenvalue(&shell(3, r1, r2, r1, inner, 0.1)).unwrap().lambda;
        let b = radial_principal_eigenvalue(&shell(3, r1, r2, outer, r2, 0.1)).unwrap().lambda;
        assert!((a - b).abs() > 1e-3 * a.min(b), "{a} {b}");
    }

    #[test]
    fn neumann_needs_negative_weighted_mean() {
        let sp = shell(3, 1.0, 2.0, 1.2, 2.0, 0.0);
        assert!(weighted_mean(&sp) > 0.0);
        assert!(matches!(radial_principal_eigenvalue(&sp), Err(Error::ConstraintViolated { .. })));
        assert!(ShellProblem::new(1, sp.weight_r().clone(), 0.0, None).is_err());
    }
}
