//! Change of variables taking the radial problem on a shell to a 1D Robin
//! problem without first-order term.
//!
//! The map `r(t)` solves `r' = r^{n−1}`: `r = e^t` for `n = 2` and
//! `r = [(2−n)t]^{1/(2−n)}` (with `t < 0`) for `n ≥ 3`. With `v(t) = u(r(t))`
//! the radial equation becomes `v'' + λ r(t)^{2n−2} m̄(t) v = 0`, and dividing
//! the factor by `r2^{2n−2}` gives a weight in `[−1, κ]` and the scaled
//! eigenvalue `λ' = r2^{2n−2} λ`.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::ode::Rk45;
use crate::radial::{RadialOptions, ShellProblem};
use crate::roots::{scan_principal, NEUMANN_FLOOR};
use crate::sl::{normalize_samples, EigenResult, EigenSample, RobinProblem1D, Shot};
use crate::weights::{BangBangWeight, IntervalDomain, Piece};

pub fn map_r_to_t(n: u32, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::DomainError(format!("radius must be positive, got {r}")));
    }
    match n {
        0 | 1 => Err(Error::DimensionError { n, expected: "n >= 2" }),
        2 => Ok(r.ln()),
        _ => {
            let e = 2.0 - n as f64;
            Ok(r.powf(e) / e)
        }
    }
}

pub fn map_t_to_r(n: u32, t: f64) -> Result<f64> {
    match n {
        0 | 1 => Err(Error::DimensionError { n, expected: "n >= 2" }),
        2 => Ok(t.exp()),
        _ => {
            if !(t < 0.0) {
                return Err(Error::DomainError(format!("t must be negative for n >= 3, got {t}")));
            }
            let e = 2.0 - n as f64;
            Ok((e * t).powf(1.0 / e))
        }
    }
}

/// Image of an `r`-interval under the increasing map `r ↦ t`.
pub fn map_interval_r_to_t(n: u32, set: &IntervalDomain) -> Result<IntervalDomain> {
    IntervalDomain::new(map_r_to_t(n, set.a())?, map_r_to_t(n, set.b())?)
}

pub fn map_interval_t_to_r(n: u32, set: &IntervalDomain) -> Result<IntervalDomain> {
    IntervalDomain::new(map_t_to_r(n, set.a())?, map_t_to_r(n, set.b())?)
}

/// `g(t) = r(t)^{2n−2}`: `e^{2t}` for `n = 2`, `[(2−n)t]^{(2n−2)/(2−n)}` otherwise.
pub fn g_factor(n: u32, t: f64) -> f64 {
    if n == 2 {
        (2.0 * t).exp()
    } else {
        let e = 2.0 - n as f64;
        (e * t).powf((2.0 * n as f64 - 2.0) / e)
    }
}

/// `2π^{n/2} ∏_{k=1}^{n−2} Γ((k+1)/2)/Γ(k/2+1)`, the measure of the unit
/// `(n−1)`-sphere. Equals `2π` for `n = 2`.
pub fn solid_angle_constant(n: u32) -> f64 {
    let product: f64 = (1..n.saturating_sub(1))
        .map(|k| {
            let k = k as f64;
            gamma((k + 1.0) / 2.0) / gamma(k / 2.0 + 1.0)
        })
        .product();
    2.0 * PI.powf(n as f64 / 2.0) * product
}

/// `|B_{r2}| − |B_{r1}| = π^{n/2}(r2ⁿ − r1ⁿ)/Γ(n/2 + 1)`.
pub fn shell_volume(n: u32, r1: f64, r2: f64) -> f64 {
    let k = n as f64;
    PI.powf(k / 2.0) * (r2.powf(k) - r1.powf(k)) / gamma(k / 2.0 + 1.0)
}

/// Infimum of the admissible scaling constants `q`.
///
/// `n = 2`: `m0 / (2 ln(r2/r1))`. `n ≥ 3`:
/// `max{m0, 2|Ω_t| r2^{2n−2} Γ(n/2+1) ∏Γ((k+1)/2)/Γ(k/2+1) / (r2ⁿ − r1ⁿ)}`.
pub fn q_lower_bound(n: u32, r1: f64, r2: f64, m0: f64) -> Result<f64> {
    match n {
        0 | 1 => Err(Error::DimensionError { n, expected: "n >= 2" }),
        2 => Ok(m0 / (2.0 * (r2.ln() - r1.ln()))),
        _ => {
            let k = n as f64;
            let t_len = map_r_to_t(n, r2)? - map_r_to_t(n, r1)?;
            let product = solid_angle_constant(n) / (2.0 * PI.powf(k / 2.0));
            let volume_term = 2.0 * t_len * r2.powf(2.0 * k - 2.0) * gamma(k / 2.0 + 1.0) * product
                / (r2.powf(k) - r1.powf(k));
            Ok(m0.max(volume_term))
        }
    }
}

/// Exact transformed weight `M̄(t) = (r(t)/r2)^{2n−2} m̄(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactProfile {
    pub n: u32,
    pub r2: f64,
    /// Pieces in `t` carrying the bang-bang values of `m̄`.
    pub pieces: Vec<Piece>,
}

impl ExactProfile {
    /// `(r(t)/r2)^{2n−2}`, which lies in `[(r1/r2)^{2n−2}, 1]`.
    pub fn scale(&self, t: f64) -> f64 {
        g_factor(self.n, t) / self.r2.powf(2.0 * self.n as f64 - 2.0)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let value = self
            .pieces
            .iter()
            .find(|p| p.start <= t && t < p.end)
            .or(self.pieces.last())
            .map_or(-1.0, |p| p.value);
        self.scale(t) * value
    }
}

/// The reduced problem `v'' + λ' M̄(t) v = 0` on `Ω_t` with
/// `v'(t1) = β_l v(t1)` and `v'(t2) = −β_r v(t2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedProblem {
    pub n: u32,
    pub t_domain: IntervalDomain,
    /// `β' = β r1^{n−1}`.
    pub beta_left: f64,
    /// `β' (r2/r1)^{n−1} = β r2^{n−1}`.
    pub beta_right: f64,
    /// `λ' = lambda_factor · λ`, equal to `r2^{2n−2}`.
    pub lambda_factor: f64,
    pub q: f64,
    pub q_lower_bound: f64,
    pub m0: f64,
    pub m0_prime: f64,
    pub c_prime: f64,
    pub kappa: f64,
    /// Bang-bang relaxation: `κ` on the image `E_t` of `E_r`, `−1` elsewhere.
    pub envelope: BangBangWeight,
    pub profile: ExactProfile,
}

impl ReducedProblem {
    /// The relaxed 1D problem with two-valued weight and asymmetric Robin ends.
    pub fn envelope_problem(&self) -> Result<RobinProblem1D> {
        RobinProblem1D::new(self.envelope.clone(), self.beta_left, self.beta_right)
    }

    pub fn to_lambda(&self, lambda_prime: f64) -> f64 {
        lambda_prime / self.lambda_factor
    }
}

/// Builds the reduced problem. `q` defaults to twice its lower bound.
pub fn reduce(sp: &ShellProblem, q: Option<f64>) -> Result<ReducedProblem> {
    let n = sp.n();
    if n < 2 {
        return Err(Error::DimensionError { n, expected: "n >= 2" });
    }
    let params = sp.params()?;
    if params.m0 <= 0.0 {
        return Err(Error::InvalidParams(format!("the reduction needs m0 > 0, got {}", params.m0)));
    }
    let (r1, r2) = (sp.r1(), sp.r2());
    let bound = q_lower_bound(n, r1, r2, params.m0)?;
    let q = q.unwrap_or(2.0 * bound);
    if !(q > bound) {
        return Err(Error::QTooSmall { q, bound });
    }
    let k = n as f64;
    let t_domain = IntervalDomain::new(map_r_to_t(n, r1)?, map_r_to_t(n, r2)?)?;
    let m0_prime = if n == 2 {
        params.m0 * (r2 * r2 - r1 * r1) / (2.0 * q * r2 * r2 * (r2.ln() - r1.ln()))
    } else {
        params.m0 / q
    };
    let beta_left = sp.beta() * r1.powf(k - 1.0);
    let pieces = sp
        .weight_r()
        .pieces()
        .into_iter()
        .map(|p| Ok(Piece { start: map_r_to_t(n, p.start)?, end: map_r_to_t(n, p.end)?, value: p.value }))
        .collect::<Result<Vec<_>>>()?;
    let segments = sp
        .weight_r()
        .segments()
        .iter()
        .map(|s| map_interval_r_to_t(n, s))
        .collect::<Result<Vec<_>>>()?;
    let envelope = BangBangWeight::new(t_domain, sp.kappa(), segments)?;
    Ok(ReducedProblem {
        n,
        t_domain,
        beta_left,
        beta_right: beta_left * (r2 / r1).powf(k - 1.0),
        lambda_factor: r2.powf(2.0 * k - 2.0),
        q,
        q_lower_bound: bound,
        m0: params.m0,
        m0_prime,
        c_prime: (1.0 - m0_prime) / (1.0 + sp.kappa()),
        kappa: sp.kappa(),
        envelope,
        profile: ExactProfile { n, r2, pieces },
    })
}

fn profile_rhs(profile: &ExactProfile, lambda_prime: f64, value: f64) -> impl Fn(f64, [f64; 2]) -> [f64; 2] + '_ {
    move |t, y| [y[1], -lambda_prime * profile.scale(t) * value * y[0]]
}

fn shoot_profile(rp: &ReducedProblem, lambda_prime: f64, rk: &Rk45) -> Result<Shot> {
    let mut y = [1.0, rp.beta_left];
    let mut sign = 1;
    let mut zeros = 0;
    for p in &rp.profile.pieces {
        let run = rk.run(profile_rhs(&rp.profile, lambda_prime, p.value), p.start, y, sign, &[p.end], |_, _| {})?;
        y = run.state;
        sign = run.last_sign;
        zeros += run.sign_changes;
    }
    Ok(Shot { residual: y[1] + rp.beta_right * y[0], zero_count: zeros, final_state: (y[0], y[1]) })
}

/// Residual of the exact-profile reduced problem at `λ'`.
pub fn reduced_shoot(rp: &ReducedProblem, lambda_prime: f64) -> Result<Shot> {
    shoot_profile(rp, lambda_prime, &Rk45::new(RadialOptions::default().rtol))
}

/// Principal `λ'` of the reduced problem with the exact profile `M̄`.
/// Samples are in the `t` variable; divide by `lambda_factor` (see
/// [`ReducedProblem::to_lambda`]) to compare with the radial eigenvalue.
pub fn reduced_principal_eigenvalue(rp: &ReducedProblem) -> Result<EigenResult> {
    reduced_principal_eigenvalue_with(rp, &RadialOptions::default())
}

pub fn reduced_principal_eigenvalue_with(rp: &ReducedProblem, opts: &RadialOptions) -> Result<EigenResult> {
    let neumann = rp.beta_left == 0.0 && rp.beta_right == 0.0;
    let floor = if neumann {
        // ∫ M̄ dt has the sign of ∫ m̃ r^{n−1} dr
        let mass: f64 = rp
            .profile
            .pieces
            .iter()
            .map(|p| {
                let (a, b) = (map_t_to_r(rp.n, p.start), map_t_to_r(rp.n, p.end));
                match (a, b) {
                    (Ok(a), Ok(b)) => p.value * (b.powi(rp.n as i32) - a.powi(rp.n as i32)),
                    _ => f64::NAN,
                }
            })
            .sum();
        if !(mass < 0.0) {
            return Err(Error::ConstraintViolated { mean: mass });
        }
        NEUMANN_FLOOR
    } else {
        0.0
    };
    let rk = Rk45::new(opts.rtol);
    let lambda = scan_principal(
        floor,
        &opts.scan,
        |l| Ok(shoot_profile(rp, l, &rk)?.residual),
        |l| Ok(shoot_profile(rp, l, &rk)?.zero_count == 0),
    )?;
    let shot = shoot_profile(rp, lambda, &rk)?;
    let (ub, dub) = shot.final_state;
    let residual = (dub + rp.beta_right * ub).abs() / (dub.abs() + rp.beta_right * ub.abs() + ub.abs());

    let sampler = Rk45 { rtol: opts.rtol, renormalize: false };
    let mut samples = vec![EigenSample { x: rp.t_domain.a(), u: 1.0, du: rp.beta_left }];
    let mut y = [1.0, rp.beta_left];
    for p in &rp.profile.pieces {
        let k = crate::radial::piece_intervals(p.length(), rp.t_domain.length(), opts.samples);
        let targets: Vec<f64> =
            (1..=k).map(|i| if i == k { p.end } else { p.start + p.length() * i as f64 / k as f64 }).collect();
        y = sampler
            .run(profile_rhs(&rp.profile, lambda, p.value), p.start, y, 1, &targets, |x, s| {
                samples.push(EigenSample { x, u: s[0], du: s[1] })
            })?
            .state;
    }
    normalize_samples(&mut samples);
    Ok(EigenResult { lambda, eigenfunction_samples: samples, zero_count: shot.zero_count, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::radial_principal_eigenvalue;
    use std::f64::consts::E;

    fn shell(n: u32, r1: f64, r2: f64, s: f64, e: f64, beta: f64, m0: f64) -> ShellProblem {
        let d = IntervalDomain::new(r1, r2).unwrap();
        ShellProblem::new(n, BangBangWeight::single(d, 1.0, s, e).unwrap(), beta, Some(m0)).unwrap()
    }

    #[test]
    fn map_examples() {
        assert_eq!(map_r_to_t(2, 1.0).unwrap(), 0.0);
        assert_eq!(map_r_to_t(3, 1.0).unwrap(), -1.0);
        for n in [2, 3, 4, 5] {
            for r in [0.5, 1.0, 2.0, 10.0] {
                let back = map_t_to_r(n, map_r_to_t(n, r).unwrap()).unwrap();
                assert!((back - r).abs() <= 1e-14 * r, "n={n} r={r} back={back}");
            }
        }
        assert!(map_r_to_t(3, 0.0).is_err());
        assert!(map_r_to_t(2, -1.0).is_err());
        assert!(map_t_to_r(3, 0.5).is_err());
        assert!(map_t_to_r(3, 0.0).is_err());
    }

    #[test]
    fn solid_angles() {
        assert!((solid_angle_constant(2) - 2.0 * PI).abs() < 1e-12);
        assert!((solid_angle_constant(3) - 4.0 * PI).abs() < 1e-12);
        assert!((solid_angle_constant(4) - 2.0 * PI * PI).abs() < 1e-12);
        // standard form 2π^{n/2}/Γ(n/2)
        for n in 2..10u32 {
            let standard = 2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0);
            assert!((solid_angle_constant(n) - standard).abs() <= 1e-12 * standard);
        }
        assert!((shell_volume(3, 1.0, 2.0) - 4.0 / 3.0 * PI * 7.0).abs() < 1e-12);
    }

    #[test]
    fn q_bound_closed_form() {
        // 2Γ(n/2+1)∏Γ((k+1)/2)/Γ(k/2+1) collapses to n
        for n in 3..8u32 {
            let (r1, r2) = (0.7, 1.9);
            let t_len = map_r_to_t(n, r2).unwrap() - map_r_to_t(n, r1).unwrap();
            let k = n as f64;
            let want = k * t_len * r2.powf(2.0 * k - 2.0) / (r2.powf(k) - r1.powf(k));
            let got = q_lower_bound(n, r1, r2, 1e-3).unwrap();
            assert!((got - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn reduce_examples() {
        let sp = shell(2, 1.0, E, 1.2, 1.5, 2.0, 0.5);
        let rp = reduce(&sp, None).unwrap();
        assert!(rp.t_domain.a().abs() < 1e-15 && (rp.t_domain.b() - 1.0).abs() < 1e-15);
        assert_eq!(rp.beta_left, 2.0);
        assert!((rp.beta_right - 2.0 * E).abs() < 1e-14);
        assert!((rp.lambda_factor - E * E).abs() < 1e-13);
        assert!((rp.q - 0.5).abs() < 1e-15);
        let want = (E * E - 1.0) / (2.0 * E * E);
        assert!((rp.m0_prime - want).abs() < 1e-15);
        assert!((rp.m0_prime - 0.4323323583816936).abs() < 1e-15);

        let sp = shell(3, 1.0, 2.0, 1.2, 1.5, 1.0, 0.5);
        let rp = reduce(&sp, None).unwrap();
        assert_eq!((rp.t_domain.a(), rp.t_domain.b()), (-1.0, -0.5));
        assert_eq!((rp.beta_left, rp.beta_right, rp.lambda_factor), (1.0, 4.0, 16.0));
        assert!((rp.m0_prime - 0.5 / rp.q).abs() < 1e-15);
        assert!(rp.m0_prime > 0.0 && rp.m0_prime < 1.0);

        assert!(matches!(reduce(&sp, Some(rp.q_lower_bound)), Err(Error::QTooSmall { .. })));
        let no_m0 = ShellProblem::new(3, sp.weight_r().clone(), 1.0, None).unwrap();
        assert!(reduce(&no_m0, None).is_err());
    }

    #[test]
    fn coefficient_ratio_and_g_range() {
        for n in [2, 3, 4, 6] {
            let sp = shell(n, 0.8, 2.3, 1.0, 1.4, 0.6, 0.4);
            let rp = reduce(&sp, None).unwrap();
            let ratio = rp.beta_right / rp.beta_left;
            assert!((ratio - (2.3f64 / 0.8).powi(n as i32 - 1)).abs() <= 1e-13 * ratio);
            let (t1, t2) = (rp.t_domain.a(), rp.t_domain.b());
            let lo = 0.8f64.powi(2 * n as i32 - 2);
            let hi = 2.3f64.powi(2 * n as i32 - 2);
            let mut prev = f64::MIN;
            for i in 0..100 {
                let t = t1 + (t2 - t1) * i as f64 / 99.0;
                let g = g_factor(n, t);
                assert!(g >= lo * (1.0 - 1e-12) && g <= hi * (1.0 + 1e-12));
                assert!(g > prev);
                prev = g;
            }
            for i in 0..50 {
                let t = t1 + (t2 - t1) * (i as f64 + 0.5) / 50.0;
                let m = rp.profile.evaluate(t);
                assert!((-1.0..=rp.kappa).contains(&m));
            }
        }
    }

    #[test]
    fn t_lengths_match_weighted_radial_lengths() {
        for n in [2, 3, 5] {
            let set = IntervalDomain::new(1.1, 1.7).unwrap();
            let image = map_interval_r_to_t(n, &set).unwrap();
            // ∫ r^{1−n} dr by composite Simpson
            let m = 2000;
            let h = set.length() / m as f64;
            let f = |r: f64| r.powf(1.0 - n as f64);
            let mut acc = f(set.a()) + f(set.b());
            for i in 1..m {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(set.a() + h * i as f64);
            }
            assert!((image.length() - acc * h / 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn reduced_eigenvalue_matches_radial() {
        for n in [2, 3, 4] {
            let sp = shell(n, 1.0, 2.0, 1.25, 1.6, 0.8, 0.3);
            let rp = reduce(&sp, None).unwrap();
            let radial = radial_principal_eigenvalue(&sp).unwrap().lambda;
            let reduced = reduced_principal_eigenvalue(&rp).unwrap();
            assert_eq!(reduced.zero_count, 0);
            let lambda = rp.to_lambda(reduced.lambda);
            assert!((lambda - radial).abs() <= 1e-8 * radial, "n={n}: {lambda} vs {radial}");
        }
    }
}
