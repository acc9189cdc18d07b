//! Closed-form optimal favourable sets.
//!
//! On an interval `(a, b)` the optimum of length `c(b−a)` is centred above
//! the threshold, flush against either end below it, and arbitrary at it.
//! On shells the same three cases hold in the reduced variable `t`; the
//! predictions here are written directly in `r` and can be pulled back to
//! `t` with [`pullback_to_t`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::ShellProblem;
use crate::reduction::{map_r_to_t, map_t_to_r};
use crate::thresholds::{classify_1d, classify_shell, Regime};
use crate::weights::IntervalDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    /// Physical coordinate of a 1D problem.
    X,
    /// Reduced coordinate of a shell problem.
    T,
    /// Radius.
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// Members `(s, s + length)`.
    Interval,
    /// Members `(r0, r0·e^{length})` for `n = 2`.
    PlanarShell,
    /// Members `(r(t0), r(t0 + length))`, anchored in `t`.
    Shell { n: u32 },
}

/// Every optimal set at criticality, parametrised by an anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementFamily {
    pub kind: FamilyKind,
    pub anchor_variable: Variable,
    pub anchor_range: [f64; 2],
    /// Length in `x` for intervals, in `t` for shells.
    pub length: f64,
}

impl PlacementFamily {
    pub fn member(&self, anchor: f64) -> Result<IntervalDomain> {
        let [lo, hi] = self.anchor_range;
        let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        if anchor < lo - slack || anchor > hi + slack {
            return Err(Error::InvalidParams(format!("anchor {anchor} outside [{lo}, {hi}]")));
        }
        match self.kind {
            FamilyKind::Interval => IntervalDomain::new(anchor, anchor + self.length),
            FamilyKind::PlanarShell => IntervalDomain::new(anchor, anchor * self.length.exp()),
            FamilyKind::Shell { n } => IntervalDomain::new(map_t_to_r(n, anchor)?, map_t_to_r(n, anchor + self.length)?),
        }
    }

    /// The two extreme members.
    pub fn extremes(&self) -> Result<[IntervalDomain; 2]> {
        Ok([self.member(self.anchor_range[0])?, self.member(self.anchor_range[1])?])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PredictedSets {
    Unique(IntervalDomain),
    EitherEnd([IntervalDomain; 2]),
    Family(PlacementFamily),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalSetPrediction {
    pub regime: Regime,
    pub variable: Variable,
    pub sets: PredictedSets,
}

impl OptimalSetPrediction {
    /// CSV rows `regime,variable,left,right`. A family contributes its two
    /// extreme members.
    pub fn to_csv(&self) -> Result<String> {
        let sets: Vec<IntervalDomain> = match &self.sets {
            PredictedSets::Unique(s) => vec![*s],
            PredictedSets::EitherEnd(pair) => pair.to_vec(),
            PredictedSets::Family(f) => f.extremes()?.to_vec(),
        };
        let variable = match self.variable {
            Variable::X => "x",
            Variable::T => "t",
            Variable::R => "r",
        };
        let mut out = String::from("regime,variable,left,right\n");
        for s in sets {
            out.push_str(&format!("{},{},{},{}\n", self.regime.name(), variable, s.a(), s.b()));
        }
        Ok(out)
    }
}

/// Interval prediction for a known regime; `c` is the volume fraction.
pub fn predict_1d_in_regime(domain: &IntervalDomain, regime: Regime, c: f64, variable: Variable) -> Result<OptimalSetPrediction> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParams(format!("c must lie in (0, 1), got {c}")));
    }
    let (a, b) = (domain.a(), domain.b());
    let len = c * (b - a);
    let sets = match regime {
        Regime::Supercritical => {
            let mid = domain.midpoint();
            PredictedSets::Unique(IntervalDomain::new(mid - 0.5 * len, mid + 0.5 * len)?)
        }
        Regime::Subcritical => {
            PredictedSets::EitherEnd([IntervalDomain::new(a, a + len)?, IntervalDomain::new(b - len, b)?])
        }
        Regime::Critical => PredictedSets::Family(PlacementFamily {
            kind: FamilyKind::Interval,
            anchor_variable: variable,
            anchor_range: [a, b - len],
            length: len,
        }),
    };
    Ok(OptimalSetPrediction { regime, variable, sets })
}

pub fn predict_1d(domain: &IntervalDomain, beta: f64, c: f64, kappa: f64) -> Result<OptimalSetPrediction> {
    let regime = classify_1d(domain, beta, c, kappa).regime;
    predict_1d_in_regime(domain, regime, c, Variable::X)
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("c' must lie in (0, 1), got {c}")))
    }
}

/// Planar annulus, in `r`.
pub fn predict_shell_2d(sp: &ShellProblem, c_prime: f64) -> Result<OptimalSetPrediction> {
    if sp.n() != 2 {
        return Err(Error::DimensionError { n: sp.n(), expected: "n = 2" });
    }
    check_c(c_prime)?;
    let regime = classify_shell(sp, c_prime)?.regime;
    predict_shell_in_regime(sp, c_prime, regime)
}

/// Shells in `n ≥ 3` dimensions, in `r`.
pub fn predict_shell_nd(sp: &ShellProblem, c_prime: f64) -> Result<OptimalSetPrediction> {
    if sp.n() < 3 {
        return Err(Error::DimensionError { n: sp.n(), expected: "n >= 3" });
    }
    check_c(c_prime)?;
    let regime = classify_shell(sp, c_prime)?.regime;
    predict_shell_in_regime(sp, c_prime, regime)
}

/// Shell prediction for a given regime, whatever `β` is.
pub fn predict_shell_in_regime(sp: &ShellProblem, c_prime: f64, regime: Regime) -> Result<OptimalSetPrediction> {
    check_c(c_prime)?;
    let sets = match sp.n() {
        0 | 1 => return Err(Error::DimensionError { n: sp.n(), expected: "n >= 2" }),
        2 => shell_2d_sets(sp.r1(), sp.r2(), c_prime, regime)?,
        n => shell_nd_sets(n, sp.r1(), sp.r2(), c_prime, regime)?,
    };
    Ok(OptimalSetPrediction { regime, variable: Variable::R, sets })
}

fn shell_2d_sets(r1: f64, r2: f64, c: f64, regime: Regime) -> Result<PredictedSets> {
    Ok(match regime {
        Regime::Supercritical => PredictedSets::Unique(IntervalDomain::new(
            r1.powf((1.0 + c) / 2.0) * r2.powf((1.0 - c) / 2.0),
            r1.powf((1.0 - c) / 2.0) * r2.powf((1.0 + c) / 2.0),
        )?),
        Regime::Critical => PredictedSets::Family(PlacementFamily {
            kind: FamilyKind::PlanarShell,
            anchor_variable: Variable::R,
            anchor_range: [r1, r1.powf(c) * r2.powf(1.0 - c)],
            // r0·r1^{−c'} r2^{c'} = r0·e^{c' ln(r2/r1)}
            length: c * (r2.ln() - r1.ln()),
        }),
        Regime::Subcritical => PredictedSets::EitherEnd([
            IntervalDomain::new(r1, r1.powf(1.0 - c) * r2.powf(c))?,
            IntervalDomain::new(r1.powf(c) * r2.powf(1.0 - c), r2)?,
        ]),
    })
}

fn shell_nd_sets(n: u32, r1: f64, r2: f64, c: f64, regime: Regime) -> Result<PredictedSets> {
    let e = 2.0 - n as f64;
    let (p1, p2) = (r1.powf(e), r2.powf(e));
    let root = |x: f64| x.powf(1.0 / e);
    Ok(match regime {
        Regime::Supercritical => PredictedSets::Unique(IntervalDomain::new(
            root(((1.0 + c) * p1 + (1.0 - c) * p2) / 2.0),
            root(((1.0 - c) * p1 + (1.0 + c) * p2) / 2.0),
        )?),
        Regime::Critical => PredictedSets::Family(PlacementFamily {
            kind: FamilyKind::Shell { n },
            anchor_variable: Variable::T,
            anchor_range: [p1 / e, ((1.0 - c) * p2 + c * p1) / e],
            length: c * (p2 - p1) / e,
        }),
        Regime::Subcritical => PredictedSets::EitherEnd([
            IntervalDomain::new(r1, root((1.0 - c) * p1 + c * p2))?,
            IntervalDomain::new(root((1.0 - c) * p2 + c * p1), r2)?,
        ]),
    })
}

/// Dispatches on the shell dimension.
pub fn predict_shell(sp: &ShellProblem, c_prime: f64) -> Result<OptimalSetPrediction> {
    if sp.n() == 2 {
        predict_shell_2d(sp, c_prime)
    } else {
        predict_shell_nd(sp, c_prime)
    }
}

/// Maps an `r`-prediction to the reduced variable `t`.
pub fn pullback_to_t(prediction: &OptimalSetPrediction, n: u32) -> Result<OptimalSetPrediction> {
    if prediction.variable != Variable::R {
        return Err(Error::InvalidParams("pullback expects a prediction in r".to_string()));
    }
    let map = |s: &IntervalDomain| IntervalDomain::new(map_r_to_t(n, s.a())?, map_r_to_t(n, s.b())?);
    let sets = match &prediction.sets {
        PredictedSets::Unique(s) => PredictedSets::Unique(map(s)?),
        PredictedSets::EitherEnd([l, r]) => PredictedSets::EitherEnd([map(l)?, map(r)?]),
        PredictedSets::Family(f) => {
            let anchor_range = match f.anchor_variable {
                Variable::R => [map_r_to_t(n, f.anchor_range[0])?, map_r_to_t(n, f.anchor_range[1])?],
                _ => f.anchor_range,
            };
            PredictedSets::Family(PlacementFamily {
                kind: FamilyKind::Interval,
                anchor_variable: Variable::T,
                anchor_range,
                length: f.length,
            })
        }
    };
    Ok(OptimalSetPrediction { regime: prediction.regime, variable: Variable::T, sets })
}
