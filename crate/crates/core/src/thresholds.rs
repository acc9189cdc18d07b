//! The critical Robin coefficient `β*(c, κ)` separating centred optima
//! (`β > β*`) from boundary-flush ones (`β < β*`), and its rescalings to
//! general intervals and to shells.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::ShellProblem;
use crate::weights::IntervalDomain;

/// Relative tolerance under which `β` counts as equal to the threshold.
pub const REGIME_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `β` above the threshold: one centred optimal interval.
    Supercritical,
    /// `β` at the threshold: every placement of the right length is optimal.
    Critical,
    /// `β` below the threshold: an interval flush against either end.
    Subcritical,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Supercritical => "supercritical",
            Regime::Critical => "critical",
            Regime::Subcritical => "subcritical",
        }
    }
}

/// `β*(c, κ)` on the unit interval, for `c ∈ (0, 1)` and `κ > 0`.
///
/// The `κ < 1` branch is `(arctan(2√κ/(κ−1)) + π)/(c√κ)`, which is the
/// reading that joins `π/(2c)` continuously at `κ = 1`.
pub fn beta_star(c: f64, kappa: f64) -> f64 {
    let root = kappa.sqrt();
    if kappa > 1.0 {
        2.0 / (c * root) * (1.0 / root).atan()
    } else if kappa == 1.0 {
        PI / (2.0 * c)
    } else {
        ((2.0 * root / (kappa - 1.0)).atan() + PI) / (c * root)
    }
}

pub fn regime_of(beta: f64, threshold: f64) -> Regime {
    if (beta - threshold).abs() <= REGIME_TOLERANCE * threshold.abs() {
        Regime::Critical
    } else if beta > threshold {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// `β*(c, κ)` on the unit interval.
    pub beta_star: f64,
    /// Threshold for the problem at hand.
    pub beta_star_scaled: f64,
    pub beta: f64,
    pub regime: Regime,
    pub comparison_tolerance: f64,
}

impl ThresholdReport {
    fn new(beta_star: f64, beta_star_scaled: f64, beta: f64) -> Self {
        ThresholdReport {
            beta_star,
            beta_star_scaled,
            beta,
            regime: regime_of(beta, beta_star_scaled),
            comparison_tolerance: REGIME_TOLERANCE,
        }
    }
}

/// Threshold `β*/(b − a)` on a general interval.
pub fn classify_1d(domain: &IntervalDomain, beta: f64, c: f64, kappa: f64) -> ThresholdReport {
    let star = beta_star(c, kappa);
    ThresholdReport::new(star, star / domain.length(), beta)
}

/// Shell thresholds:
/// `n = 2`: `β*(c', κ) / (r1 ln(r2/r1))`;
/// `n ≥ 3`: `(n−2) r1^{1−n} β*(c', κ) / (r1^{2−n} − r2^{2−n})`.
pub fn classify_shell(sp: &ShellProblem, c_prime: f64) -> Result<ThresholdReport> {
    let (n, r1, r2) = (sp.n(), sp.r1(), sp.r2());
    let star = beta_star(c_prime, sp.kappa());
    let scaled = match n {
        0 | 1 => return Err(Error::DimensionError { n, expected: "n >= 2" }),
        2 => star / (r1 * (r2.ln() - r1.ln())),
        _ => {
            let k = n as f64;
            (k - 2.0) * r1.powf(1.0 - k) * star / (r1.powf(2.0 - k) - r2.powf(2.0 - k))
        }
    };
    Ok(ThresholdReport::new(star, scaled, sp.beta()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::BangBangWeight;
    use std::f64::consts::E;

    fn shell(n: u32, r1: f64, r2: f64, beta: f64) -> ShellProblem {
        let d = IntervalDomain::new(r1, r2).unwrap();
        let w = BangBangWeight::single(d, 1.0, r1, 0.5 * (r1 + r2)).unwrap();
        ShellProblem::new(n, w, beta, Some(0.5)).unwrap()
    }

    #[test]
    fn closed_form_values() {
        assert!((beta_star(0.5, 1.0) - PI).abs() < 1e-12);
        let want = 2.0 / (0.3 * 2.0) * 0.5f64.atan();
        assert!((beta_star(0.3, 4.0) - want).abs() < 1e-15);
        assert!((beta_star(0.3, 4.0) - 1.545492030002687).abs() < 1e-12);
    }

    #[test]
    fn continuous_across_kappa_one() {
        for c in [0.2, 0.4, 0.5, 0.8] {
            let mid = PI / (2.0 * c);
            assert!((beta_star(c, 1.0 + 1e-8) - mid).abs() <= 1e-6);
            assert!((beta_star(c, 1.0 - 1e-8) - mid).abs() <= 1e-6);
        }
        assert!((PI / 0.8 - 3.926990816987241).abs() < 1e-12);
    }

    #[test]
    fn branches_agree_as_one_analytic_function() {
        // for κ < 1 the two arctan forms coincide: arctan(2s/(κ−1)) + π = 2 arctan(1/s)
        for kappa in [0.05f64, 0.3, 0.7, 0.99] {
            let s = kappa.sqrt();
            let other = 2.0 / (0.4 * s) * (1.0 / s).atan();
            assert!((beta_star(0.4, kappa) - other).abs() <= 1e-12 * other);
        }
    }

    #[test]
    fn decreasing_in_c() {
        for i in 0..20 {
            let kappa = 0.2 + 4.8 * i as f64 / 19.0;
            let mut prev = f64::INFINITY;
            for j in 0..20 {
                let c = 0.05 + 0.9 * j as f64 / 19.0;
                let b = beta_star(c, kappa);
                assert!(b > 0.0 && b < prev);
                prev = b;
            }
        }
    }

    #[test]
    fn classify_1d_examples() {
        let unit = IntervalDomain::new(0.0, 1.0).unwrap();
        assert_eq!(classify_1d(&unit, 4.0, 0.5, 1.0).regime, Regime::Supercritical);
        let two = IntervalDomain::new(0.0, 2.0).unwrap();
        let r = classify_1d(&two, PI / 2.0, 0.5, 1.0);
        assert_eq!(r.regime, Regime::Critical);
        assert!((r.beta_star_scaled - PI / 2.0).abs() < 1e-15);
        for (c, kappa) in [(0.1, 0.3), (0.5, 1.0), (0.9, 7.0)] {
            assert_eq!(classify_1d(&unit, 0.0, c, kappa).regime, Regime::Subcritical);
        }
    }

    #[test]
    fn classify_shell_examples() {
        let r = classify_shell(&shell(2, 1.0, E, 4.0), 0.5).unwrap();
        assert!((r.beta_star_scaled - PI).abs() < 1e-12);
        assert_eq!(r.regime, Regime::Supercritical);
        let r = classify_shell(&shell(3, 1.0, 2.0, 1.0), 0.5).unwrap();
        assert!((r.beta_star_scaled - 2.0 * PI).abs() < 1e-12);
        assert_eq!(r.regime, Regime::Subcritical);
        assert_eq!(classify_shell(&shell(3, 1.0, 2.0, 0.0), 0.9).unwrap().regime, Regime::Subcritical);
    }

    #[test]
    fn planar_shell_threshold_is_reduced_threshold_over_r1() {
        for (r1, r2, c) in [(1.0f64, E, 0.3), (0.5, 3.0, 0.6), (2.0, 2.5, 0.45)] {
            let sp = shell(2, r1, r2, 1.0);
            let shell_thr = classify_shell(&sp, c).unwrap().beta_star_scaled;
            let omega_t = IntervalDomain::new(r1.ln(), r2.ln()).unwrap();
            let reduced = classify_1d(&omega_t, 1.0, c, 1.0).beta_star_scaled;
            assert!((shell_thr - reduced / r1).abs() <= 1e-14 * shell_thr);
        }
    }
}
