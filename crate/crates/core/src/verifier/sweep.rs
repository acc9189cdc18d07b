use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimal_sets::Variable;
use crate::radial::{radial_principal_eigenvalue_with, RadialOptions, ShellProblem};
use crate::reduction::{map_r_to_t, map_t_to_r};
use crate::roots::bisect;
use crate::sl::{principal_eigenvalue_with, RobinProblem1D, SolverOptions};
use crate::weights::{BangBangWeight, IntervalDomain};

/// Eigenfunction samples are not needed for a sweep.
const SWEEP_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Left endpoint of each candidate set, in `anchor_variable`.
    pub anchor_variable: Variable,
    pub placements: Vec<(f64, f64)>,
    pub argmin_anchor: f64,
    pub lambda_min: f64,
    /// Max minus min of λ over the sweep.
    pub lambda_range: f64,
    /// Anchor grid spacing.
    pub cell: f64,
    /// Set when a shell sweep holds the raw `r`-length fixed instead of the
    /// `t`-length.
    pub raw_radial_length: bool,
}

impl SweepResult {
    fn assemble(anchor_variable: Variable, placements: Vec<(f64, f64)>, cell: f64, raw: bool) -> Self {
        let (argmin_anchor, lambda_min) =
            placements.iter().copied().fold((f64::NAN, f64::INFINITY), |best, p| if p.1 < best.1 { p } else { best });
        let lambda_max = placements.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        SweepResult {
            anchor_variable,
            placements,
            argmin_anchor,
            lambda_min,
            lambda_range: lambda_max - lambda_min,
            cell,
            raw_radial_length: raw,
        }
    }

    /// `λ` at the first and last anchors.
    pub fn end_lambdas(&self) -> (f64, f64) {
        (self.placements[0].1, self.placements[self.placements.len() - 1].1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("anchor,lambda\n");
        for (anchor, lambda) in &self.placements {
            out.push_str(&format!("{anchor},{lambda}\n"));
        }
        out
    }
}

fn anchors(lo: f64, hi: f64, grid_points: usize) -> Result<(Vec<f64>, f64)> {
    if grid_points < 3 {
        return Err(Error::InvalidParams(format!("a sweep needs at least 3 grid points, got {grid_points}")));
    }
    let cell = (hi - lo) / (grid_points - 1) as f64;
    let grid = (0..grid_points)
        .map(|k| if k + 1 == grid_points { hi } else { lo + cell * k as f64 })
        .collect();
    Ok((grid, cell))
}

fn check_fraction(c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("volume fraction must lie in (0, 1), got {c}")))
    }
}

fn lambda_1d(domain: IntervalDomain, beta_left: f64, beta_right: f64, kappa: f64, start: f64, end: f64) -> Result<f64> {
    let weight = BangBangWeight::single(domain, kappa, start, end.min(domain.b()))?;
    let problem = RobinProblem1D::new(weight, beta_left, beta_right)?;
    let opts = SolverOptions { samples: SWEEP_SAMPLES, ..SolverOptions::default() };
    Ok(principal_eigenvalue_with(&problem, &opts)?.lambda)
}

/// λ for every interval `(s, s + c(b−a))` with `s` on a uniform grid over
/// `[a, b − c(b−a)]`.
pub fn sweep_placements_1d(
    domain: &IntervalDomain,
    beta_left: f64,
    beta_right: f64,
    c: f64,
    kappa: f64,
    grid_points: usize,
) -> Result<SweepResult> {
    check_fraction(c)?;
    let len = c * domain.length();
    let (grid, cell) = anchors(domain.a(), domain.b() - len, grid_points)?;
    let placements = grid
        .par_iter()
        .map(|&s| Ok((s, lambda_1d(*domain, beta_left, beta_right, kappa, s, s + len)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::assemble(Variable::X, placements, cell, false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialSweepLength {
    /// Candidates share the reduced length `c′|Ω_t|`; anchors are in `t`.
    Reduced,
    /// Candidates share the radial length `c′(r2 − r1)`; anchors are in `r`.
    Raw,
}

pub fn sweep_placements_radial(sp: &ShellProblem, c_weighted: f64, grid_points: usize) -> Result<SweepResult> {
    sweep_placements_radial_with(sp, c_weighted, grid_points, RadialSweepLength::Reduced, &RadialOptions::default())
}

/// Sweeps single-interval favourable sets across a shell and solves each
/// with the radial integrator.
pub fn sweep_placements_radial_with(
    sp: &ShellProblem,
    c_weighted: f64,
    grid_points: usize,
    length: RadialSweepLength,
    opts: &RadialOptions,
) -> Result<SweepResult> {
    check_fraction(c_weighted)?;
    let n = sp.n();
    let opts = RadialOptions { samples: SWEEP_SAMPLES, ..*opts };
    let domain = sp.weight_r().domain();
    let solve = |start: f64, end: f64| -> Result<f64> {
        let weight = BangBangWeight::single(domain, sp.kappa(), start.max(sp.r1()), end.min(sp.r2()))?;
        Ok(radial_principal_eigenvalue_with(&sp.with_weight(weight)?, &opts)?.lambda)
    };
    let (variable, raw, placements, cell) = match length {
        RadialSweepLength::Reduced => {
            let (t1, t2) = (map_r_to_t(n, sp.r1())?, map_r_to_t(n, sp.r2())?);
            let len = c_weighted * (t2 - t1);
            let (grid, cell) = anchors(t1, t2 - len, grid_points)?;
            let placements = grid
                .par_iter()
                .map(|&t0| Ok((t0, solve(map_t_to_r(n, t0)?, map_t_to_r(n, t0 + len)?)?)))
                .collect::<Result<Vec<_>>>()?;
            (Variable::T, false, placements, cell)
        }
        RadialSweepLength::Raw => {
            let len = c_weighted * (sp.r2() - sp.r1());
            let (grid, cell) = anchors(sp.r1(), sp.r2() - len, grid_points)?;
            let placements =
                grid.par_iter().map(|&r0| Ok((r0, solve(r0, r0 + len)?))).collect::<Result<Vec<_>>>()?;
            (Variable::R, true, placements, cell)
        }
    };
    Ok(SweepResult::assemble(variable, placements, cell, raw))
}

/// `λ(left-flush) − λ(centred)` for sets of length `c(b−a)`.
pub fn placement_gap(domain: &IntervalDomain, beta: f64, c: f64, kappa: f64) -> Result<f64> {
    check_fraction(c)?;
    let len = c * domain.length();
    let left = lambda_1d(*domain, beta, beta, kappa, domain.a(), domain.a() + len)?;
    let mid = domain.midpoint();
    let centred = lambda_1d(*domain, beta, beta, kappa, mid - 0.5 * len, mid + 0.5 * len)?;
    Ok(left - centred)
}

/// The Robin coefficient at which the left-flush and centred placements
/// tie, by bisection on [`placement_gap`] to `1e-6` in `β`.
pub fn find_threshold(domain: &IntervalDomain, c: f64, kappa: f64, beta_bracket: (f64, f64)) -> Result<f64> {
    bisect(beta_bracket.0, beta_bracket.1, 1e-6, |beta| placement_gap(domain, beta, c, kappa))
}
