//! Exact transfer-matrix shooting for `u'' + λ m(x) u = 0` on an interval with
//! Robin conditions `u'(a) = β_l u(a)`, `u'(b) = −β_r u(b)` and a bang-bang `m`.
//!
//! Inside a piece of constant weight `μ` the state `(u, u')` is propagated by the
//! closed-form matrix of [`transfer_matrix`], so the residual `F(λ)` carries no
//! discretisation error and interior zeros are counted analytically.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{scan_principal, ScanOptions, NEUMANN_FLOOR};
use crate::weights::{weight_mean, BangBangWeight, IntervalDomain, Piece};

pub type Matrix2 = [[f64; 2]; 2];

/// Number of uniform sample points in a returned eigenfunction (segment
/// endpoints are added on top).
pub const SAMPLE_POINTS: usize = 512;

/// Above this `ωh` the hyperbolic propagation is done in rescaled form.
const HYPERBOLIC_RESCALE: f64 = 300.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobinProblem1D {
    domain: IntervalDomain,
    beta_left: f64,
    beta_right: f64,
    weight: BangBangWeight,
}

impl RobinProblem1D {
    pub fn new(weight: BangBangWeight, beta_left: f64, beta_right: f64) -> Result<Self> {
        for (side, beta) in [("left", beta_left), ("right", beta_right)] {
            if !(beta.is_finite() && beta >= 0.0) {
                return Err(Error::InvalidParams(format!("{side} Robin coefficient must be >= 0, got {beta}")));
            }
        }
        Ok(RobinProblem1D { domain: weight.domain(), beta_left, beta_right, weight })
    }

    /// Same coefficient at both ends.
    pub fn symmetric(weight: BangBangWeight, beta: f64) -> Result<Self> {
        RobinProblem1D::new(weight, beta, beta)
    }

    pub fn domain(&self) -> IntervalDomain {
        self.domain
    }

    pub fn beta_left(&self) -> f64 {
        self.beta_left
    }

    pub fn beta_right(&self) -> f64 {
        self.beta_right
    }

    pub fn weight(&self) -> &BangBangWeight {
        &self.weight
    }

    pub fn is_neumann(&self) -> bool {
        self.beta_left == 0.0 && self.beta_right == 0.0
    }
}

/// One point of a sampled eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSample {
    pub x: f64,
    pub u: f64,
    pub du: f64,
}

/// A principal eigenpair. The eigenfunction is normalised to `max |u| = 1`
/// and positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda: f64,
    pub eigenfunction_samples: Vec<EigenSample>,
    pub zero_count: usize,
    /// `|u'(b) + β_r u(b)| / (|u'(b)| + β_r |u(b)| + |u(b)|)` at the returned λ.
    pub residual: f64,
}

impl EigenResult {
    /// Two-column CSV `x,u` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,u\n");
        for s in &self.eigenfunction_samples {
            out.push_str(&format!("{},{}\n", s.x, s.u));
        }
        out
    }

    pub fn min_sample(&self) -> f64 {
        self.eigenfunction_samples.iter().map(|s| s.u).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub scan: ScanOptions,
    pub samples: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { scan: ScanOptions::default(), samples: SAMPLE_POINTS }
    }
}

/// Propagator of `u'' + λμu = 0` over a length `h`, acting on `(u, u')`.
pub fn transfer_matrix(mu: f64, h: f64, lambda: f64) -> Matrix2 {
    let k = lambda * mu;
    if k > 0.0 {
        let w = k.sqrt();
        let (s, c) = (w * h).sin_cos();
        [[c, s / w], [-w * s, c]]
    } else if k < 0.0 {
        let w = (-k).sqrt();
        let (s, c) = ((w * h).sinh(), (w * h).cosh());
        [[c, s / w], [w * s, c]]
    } else {
        [[1.0, h], [0.0, 1.0]]
    }
}

pub fn determinant(m: &Matrix2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Result of a single shot from the left endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shot {
    pub residual: f64,
    pub zero_count: usize,
    pub final_state: (f64, f64),
}

/// Propagates `(u, u')` across a piece, up to a positive factor when the
/// hyperbolic growth would overflow.
fn propagate(state: (f64, f64), mu: f64, h: f64, lambda: f64) -> (f64, f64) {
    let k = lambda * mu;
    if k < 0.0 {
        let w = (-k).sqrt();
        if w * h > HYPERBOLIC_RESCALE {
            // e^{-ωh}·(u(h), u'(h))
            let plus = 0.5 * (state.0 + state.1 / w);
            let minus = 0.5 * (state.0 - state.1 / w) * (-2.0 * w * h).exp();
            return (plus + minus, w * (plus - minus));
        }
    }
    let t = transfer_matrix(mu, h, lambda);
    (t[0][0] * state.0 + t[0][1] * state.1, t[1][0] * state.0 + t[1][1] * state.1)
}

/// Sign changes of `u` on `(0, h]` for the solution starting at `state`.
fn piece_zero_count(state: (f64, f64), mu: f64, h: f64, lambda: f64) -> usize {
    let (u0, du0) = state;
    let k = lambda * mu;
    if k > 0.0 {
        let w = k.sqrt();
        // u = R sin(ωx + ψ)
        let psi = u0.atan2(du0 / w);
        let count = ((psi + w * h) / PI).floor() - (psi / PI).floor();
        count.max(0.0) as usize
    } else if k < 0.0 {
        if u0 == 0.0 || du0 == 0.0 {
            return 0;
        }
        let w = (-k).sqrt();
        let rho = -u0 * w / du0;
        usize::from(rho > 0.0 && rho <= (w * h).tanh())
    } else {
        if u0 == 0.0 || du0 == 0.0 {
            return 0;
        }
        let x = -u0 / du0;
        usize::from(x > 0.0 && x <= h)
    }
}

fn renormalize(state: (f64, f64)) -> (f64, f64) {
    let scale = state.0.abs().max(state.1.abs());
    if scale > 1e100 || (scale > 0.0 && scale < 1e-100) {
        (state.0 / scale, state.1 / scale)
    } else {
        state
    }
}

fn shoot_pieces(pieces: &[Piece], beta_left: f64, beta_right: f64, lambda: f64) -> Shot {
    let mut state = (1.0, beta_left);
    let mut zeros = 0;
    for p in pieces {
        zeros += piece_zero_count(state, p.value, p.length(), lambda);
        state = renormalize(propagate(state, p.value, p.length(), lambda));
    }
    Shot { residual: state.1 + beta_right * state.0, zero_count: zeros, final_state: state }
}

/// Shoots from the left with `(u, u') = (1, β_l)` and returns the right-end
/// residual `F(λ) = u'(b) + β_r u(b)` and the number of sign changes of `u`.
pub fn shoot(problem: &RobinProblem1D, lambda: f64) -> Shot {
    shoot_pieces(&problem.weight.pieces(), problem.beta_left, problem.beta_right, lambda)
}

pub fn principal_eigenvalue(problem: &RobinProblem1D) -> Result<EigenResult> {
    principal_eigenvalue_with(problem, &SolverOptions::default())
}

/// Smallest positive λ whose shot satisfies the right boundary condition with
/// a sign-definite eigenfunction.
pub fn principal_eigenvalue_with(problem: &RobinProblem1D, opts: &SolverOptions) -> Result<EigenResult> {
    let pieces = problem.weight.pieces();
    if !pieces.iter().any(|p| p.value > 0.0) || !pieces.iter().any(|p| p.value < 0.0) {
        return Err(Error::NoSignChange);
    }
    let floor = if problem.is_neumann() {
        let mean = weight_mean(&problem.weight);
        if mean >= 0.0 {
            return Err(Error::ConstraintViolated { mean });
        }
        NEUMANN_FLOOR
    } else {
        0.0
    };
    let (bl, br) = (problem.beta_left, problem.beta_right);
    let lambda = scan_principal(
        floor,
        &opts.scan,
        |l| Ok(shoot_pieces(&pieces, bl, br, l).residual),
        |l| Ok(shoot_pieces(&pieces, bl, br, l).zero_count == 0),
    )?;
    let shot = shoot_pieces(&pieces, bl, br, lambda);
    let (ub, dub) = shot.final_state;
    let residual = (dub + br * ub).abs() / (dub.abs() + br * ub.abs() + ub.abs());
    Ok(EigenResult {
        lambda,
        eigenfunction_samples: sample_eigenfunction(&pieces, problem.domain, bl, lambda, opts.samples),
        zero_count: shot.zero_count,
        residual,
    })
}

/// Uniform grid on the domain merged with the piece boundaries.
pub(crate) fn sample_grid(domain: IntervalDomain, breakpoints: impl Iterator<Item = f64>, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let mut xs: Vec<f64> = (0..n)
        .map(|i| domain.a() + domain.length() * i as f64 / (n - 1) as f64)
        .chain(breakpoints)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * domain.length());
    xs
}

fn sample_eigenfunction(
    pieces: &[Piece],
    domain: IntervalDomain,
    beta_left: f64,
    lambda: f64,
    n: usize,
) -> Vec<EigenSample> {
    let xs = sample_grid(domain, pieces.iter().map(|p| p.end), n);
    let mut out = Vec::with_capacity(xs.len());
    let mut state = (1.0, beta_left);
    let mut idx = 0;
    for p in pieces {
        while idx < xs.len() && (xs[idx] < p.end || std::ptr::eq(p, pieces.last().unwrap())) {
            let (u, du) = propagate(state, p.value, xs[idx] - p.start, lambda);
            out.push(EigenSample { x: xs[idx], u, du });
            idx += 1;
        }
        state = propagate(state, p.value, p.length(), lambda);
    }
    normalize_samples(&mut out);
    out
}

/// Scales samples to `max |u| = 1` with a positive maximum.
pub(crate) fn normalize_samples(samples: &mut [EigenSample]) {
    let peak = samples.iter().map(|s| s.u).fold(0.0_f64, |m, u| if u.abs() > m.abs() { u } else { m });
    if peak != 0.0 {
        for s in samples.iter_mut() {
            s.u /= peak;
            s.du /= peak;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> IntervalDomain {
        IntervalDomain::new(0.0, 1.0).unwrap()
    }

    fn problem(s: f64, e: f64, kappa: f64, beta: f64) -> RobinProblem1D {
        RobinProblem1D::symmetric(BangBangWeight::single(unit(), kappa, s, e).unwrap(), beta).unwrap()
    }

    fn assert_mat(m: Matrix2, want: Matrix2, tol: f64) {
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - want[i][j]).abs() <= tol, "{m:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn transfer_matrix_examples() {
        assert_mat(transfer_matrix(5.0, 0.7, 0.0), [[1.0, 0.7], [0.0, 1.0]], 0.0);
        assert_mat(transfer_matrix(1.0, 1.0, PI * PI), [[-1.0, 0.0], [0.0, -1.0]], 1e-12);
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        assert_mat(transfer_matrix(-1.0, 1.0, 1.0), [[c, s], [s, c]], 1e-15);
    }

    #[test]
    fn zero_lambda_shots() {
        let p = problem(0.2, 0.5, 1.0, 1.0);
        let shot = shoot(&p, 0.0);
        // u = 1 + x, u'(1) + u(1) = 1 + 2
        assert!((shot.residual - 3.0).abs() < 1e-15);
        assert_eq!(shot.zero_count, 0);
        let p = problem(0.2, 0.5, 1.0, 0.0);
        let shot = shoot(&p, 0.0);
        assert_eq!(shot.residual, 0.0);
        assert_eq!(shot.final_state, (1.0, 0.0));
    }

    /// Smallest positive root of `tan(s/4) = tanh(3s/4)`: the eigenfunction is
    /// `cos(s x)` on `(0, 1/4)` glued `C¹` to `cosh(s (1 − x))` on `(1/4, 1)`.
    fn neumann_quarter_oracle() -> f64 {
        let g = |s: f64| (s / 4.0).tan() - (0.75 * s).tanh();
        // tan(s/4) has its first pole at s = 2π; g(0+) < 0 and g → +∞ before the pole.
        let (mut lo, mut hi) = (0.5, 2.0 * PI - 1e-9);
        assert!(g(lo) < 0.0 && g(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        s * s
    }

    #[test]
    fn neumann_quarter_interval() {
        let oracle = neumann_quarter_oracle();
        assert!((oracle - 9.632025984136).abs() < 1e-9);
        let p = problem(0.0, 0.25, 1.0, 0.0);
        let r = principal_eigenvalue(&p).unwrap();
        assert!((r.lambda - oracle).abs() <= 1e-11 * oracle, "{} vs {oracle}", r.lambda);
        assert_eq!(r.zero_count, 0);
        assert!(r.min_sample() > 0.0);
        assert!(r.residual < 1e-8);
        // F changes sign across the root
        assert!(shoot(&p, oracle * 0.99).residual * shoot(&p, oracle * 1.01).residual < 0.0);
    }

    #[test]
    fn reflection_symmetry() {
        for (c, kappa, beta) in [(0.3, 1.0, 0.0), (0.4, 2.5, 1.3), (0.15, 0.4, 7.0)] {
            let left = principal_eigenvalue(&problem(0.0, c, kappa, beta)).unwrap().lambda;
            let right = principal_eigenvalue(&problem(1.0 - c, 1.0, kappa, beta)).unwrap().lambda;
            assert!((left - right).abs() <= 1e-11 * left, "{left} vs {right}");
        }
    }

    #[test]
    fn error_paths() {
        let p = problem(0.0, 0.5, 1.0, 0.0);
        assert_eq!(principal_eigenvalue(&p), Err(Error::ConstraintViolated { mean: 0.0 }));
        let w = BangBangWeight::single(unit(), 1.0, 0.3, 0.5).unwrap();
        assert!(RobinProblem1D::new(w, -1.0, 0.0).is_err());
        let p = problem(0.3, 0.5, 1.0, 1.0);
        let opts = SolverOptions { scan: ScanOptions { cap: 1.0, ..ScanOptions::default() }, ..SolverOptions::default() };
        assert_eq!(principal_eigenvalue_with(&p, &opts), Err(Error::NoRootInRange { cap: 1.0 }));
    }

    #[test]
    fn samples_cover_breakpoints() {
        let r = principal_eigenvalue(&problem(0.35, 0.65, 1.0, 1.0)).unwrap();
        let xs: Vec<f64> = r.eigenfunction_samples.iter().map(|s| s.x).collect();
        assert!(xs.contains(&0.35) && xs.contains(&0.65) && xs.contains(&1.0) && xs.contains(&0.0));
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        let peak = r.eigenfunction_samples.iter().map(|s| s.u).fold(f64::MIN, f64::max);
        assert!((peak - 1.0).abs() < 1e-15);
        assert!(r.to_csv().starts_with("x,u\n0,"));
    }

    #[test]
    fn huge_lambda_does_not_overflow() {
        let p = problem(0.45, 0.55, 1.0, 1.0);
        let shot = shoot(&p, 1e8);
        assert!(shot.residual.is_finite());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn unit_determinant(mu in -5.0f64..5.0, h in 0.0f64..2.0, lambda in 0.0f64..200.0) {
                let t = transfer_matrix(mu, h, lambda);
                // cosh² − sinh² cancels; compare against the size of the products
                let scale = (t[0][0] * t[1][1]).abs().max(1.0);
                prop_assert!((determinant(&t) - 1.0).abs() <= 1e-12 * scale);
            }

            #[test]
            fn translation_leaves_lambda(s in 0.0f64..0.6, off in -3.0f64..3.0, beta in 0.0f64..5.0) {
                let base = problem(s, s + 0.3, 1.5, beta);
                let w = base.weight().translated(off).unwrap();
                let shifted = RobinProblem1D::symmetric(w, beta).unwrap();
                let l0 = principal_eigenvalue(&base).unwrap().lambda;
                let l1 = principal_eigenvalue(&shifted).unwrap().lambda;
                prop_assert!((l0 - l1).abs() <= 1e-10 * l0);
            }

            #[test]
            fn scaling_law(s in 0.0f64..0.5, len in 2.0f64..5.0, a in -2.0f64..2.0, beta in 0.1f64..5.0) {
                // problem on (a, a + len) maps to (0, 1) with λ·len² and β·len
                let d = IntervalDomain::new(a, a + len).unwrap();
                let w = BangBangWeight::single(d, 2.0, a + s * len, a + (s + 0.25) * len).unwrap();
                let wide = principal_eigenvalue(&RobinProblem1D::symmetric(w, beta).unwrap()).unwrap().lambda;
                let unit_l = principal_eigenvalue(&problem(s, s + 0.25, 2.0, beta * len)).unwrap().lambda;
                prop_assert!((wide * len * len - unit_l).abs() <= 1e-10 * unit_l);
            }

            #[test]
            fn superset_does_not_raise_lambda(s in 0.05f64..0.5, len in 0.05f64..0.3, grow in 0.0f64..0.1,
                                              beta in 0.0f64..5.0) {
                let small = problem(s, s + len, 1.0, beta);
                let big = problem(s - grow.min(s), s + len + grow, 1.0, beta);
                let (Ok(ls), Ok(lb)) = (principal_eigenvalue(&small), principal_eigenvalue(&big)) else {
                    return Ok(());
                };
                prop_assert!(lb.lambda <= ls.lambda * (1.0 + 1e-12));
            }

            #[test]
            fn eigenfunction_positive(s in 0.0f64..0.7, kappa in 0.2f64..5.0, beta in 0.0f64..20.0) {
                if let Ok(r) = principal_eigenvalue(&problem(s, s + 0.3, kappa, beta)) {
                    prop_assert_eq!(r.zero_count, 0);
                    prop_assert!(r.min_sample() > 0.0);
                }
            }
        }
    }
}
