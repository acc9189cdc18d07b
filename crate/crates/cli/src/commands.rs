use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use robin_shell::acceptance::{find_suite, run_all, run_criterion, CriterionReport};
use robin_shell::optimal_sets::{predict_shell, predict_shell_in_regime, pullback_to_t, OptimalSetPrediction, PredictedSets, Variable};
use robin_shell::radial::{radial_principal_eigenvalue, RadialOptions, ShellProblem};
use robin_shell::reduction::{map_r_to_t, map_t_to_r, reduce};
use robin_shell::sl::{principal_eigenvalue, EigenResult, RobinProblem1D};
use robin_shell::thresholds::{beta_star, classify_1d, classify_shell, Regime, ThresholdReport};
use robin_shell::verifier::{sweep_placements_1d, sweep_placements_radial_with, RadialSweepLength, SweepResult};
use robin_shell::weights::{BangBangWeight, IntervalDomain};

use crate::output::{to_json, Outputs};
use crate::plot::{render, Series};
use crate::{Failure, Geometry, PlotKind};

enum Place {
    Interval(IntervalDomain),
    Shell { n: u32, domain: IntervalDomain },
}

impl Place {
    fn domain(&self) -> IntervalDomain {
        match self {
            Place::Interval(d) | Place::Shell { domain: d, .. } => *d,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Place::Interval(_) => "interval",
            Place::Shell { .. } => "shell",
        }
    }

    fn n(&self) -> u32 {
        match self {
            Place::Interval(_) => 1,
            Place::Shell { n, .. } => *n,
        }
    }
}

fn shell_dims(values: &[f64]) -> Result<(u32, IntervalDomain), Failure> {
    let n = values[0];
    if n.fract() != 0.0 || n < 0.0 {
        return Err(Failure::Usage(format!("shell dimension must be a non-negative integer, got {n}")));
    }
    Ok((n as u32, IntervalDomain::new(values[1], values[2])?))
}

fn resolve(geometry: &Geometry) -> Result<Place, Failure> {
    match (&geometry.domain, &geometry.shell) {
        (Some(d), None) => Ok(Place::Interval(IntervalDomain::new(d[0], d[1])?)),
        (None, Some(s)) => {
            let (n, domain) = shell_dims(s)?;
            Ok(Place::Shell { n, domain })
        }
        _ => Err(Failure::Usage("exactly one of --domain or --shell is required".to_string())),
    }
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn emit(outputs: &mut Outputs, name: &str, json: &str) -> Result<(), Failure> {
    print!("{json}");
    outputs.write(name, json)
}

#[derive(Serialize)]
struct EigenOutput {
    geometry: &'static str,
    n: u32,
    domain: [f64; 2],
    kappa: f64,
    beta_left: f64,
    beta_right: f64,
    sets: Vec<[f64; 2]>,
    lambda: f64,
    zero_count: u32,
    residual: f64,
}

pub fn eigen(
    geometry: &Geometry,
    kappa: f64,
    beta: f64,
    beta_right: Option<f64>,
    sets: &[f64],
    out: Option<&Path>,
) -> Result<(), Failure> {
    let place = resolve(geometry)?;
    let domain = place.domain();
    let segments = sets.chunks(2).map(|p| IntervalDomain::new(p[0], p[1])).collect::<Result<Vec<_>, _>>()?;
    let weight = BangBangWeight::new(domain, kappa, segments)?;
    let (result, beta_right): (EigenResult, f64) = match place {
        Place::Interval(_) => {
            let br = beta_right.unwrap_or(beta);
            (principal_eigenvalue(&RobinProblem1D::new(weight.clone(), beta, br)?)?, br)
        }
        Place::Shell { n, .. } => {
            if beta_right.is_some() {
                return Err(Failure::Usage("--beta-right applies to intervals only".to_string()));
            }
            (radial_principal_eigenvalue(&ShellProblem::new(n, weight.clone(), beta, None)?)?, beta)
        }
    };
    let output = EigenOutput {
        geometry: place.name(),
        n: place.n(),
        domain: [domain.a(), domain.b()],
        kappa,
        beta_left: beta,
        beta_right,
        sets: weight.segments().iter().map(|s| [s.a(), s.b()]).collect(),
        lambda: result.lambda,
        zero_count: result.zero_count as u32,
        residual: result.residual,
    };
    let mut outputs = Outputs::new(out)?;
    emit(&mut outputs, "eigen.json", &to_json(&output)?)?;
    outputs.write("eigenfunction.csv", &result.to_csv())?;
    outputs.finish(
        "eigen",
        params(&[
            ("geometry", place.name().to_string()),
            ("domain", format!("{} {}", domain.a(), domain.b())),
            ("n", place.n().to_string()),
            ("kappa", kappa.to_string()),
            ("beta", beta.to_string()),
            ("beta_right", beta_right.to_string()),
            ("sets", format!("{sets:?}")),
        ]),
    )
}

#[derive(Serialize)]
struct ThresholdOutput {
    c: f64,
    kappa: f64,
    domain: [f64; 2],
    beta_star: f64,
    beta_star_scaled: f64,
    beta: Option<f64>,
    regime: Option<Regime>,
}

pub fn threshold(c: f64, kappa: f64, domain: Option<&[f64]>, beta: Option<f64>, out: Option<&Path>) -> Result<(), Failure> {
    if !(c > 0.0 && c < 1.0) || !(kappa > 0.0) {
        return Err(Failure::Usage(format!("need 0 < c < 1 and kappa > 0, got c={c}, kappa={kappa}")));
    }
    let d = match domain {
        Some(d) => IntervalDomain::new(d[0], d[1])?,
        None => IntervalDomain::new(0.0, 1.0)?,
    };
    let report = classify_1d(&d, beta.unwrap_or(f64::NAN), c, kappa);
    let output = ThresholdOutput {
        c,
        kappa,
        domain: [d.a(), d.b()],
        beta_star: beta_star(c, kappa),
        beta_star_scaled: report.beta_star_scaled,
        beta,
        regime: beta.map(|_| report.regime),
    };
    let mut outputs = Outputs::new(out)?;
    emit(&mut outputs, "threshold.json", &to_json(&output)?)?;
    outputs.finish(
        "threshold",
        params(&[
            ("c", c.to_string()),
            ("kappa", kappa.to_string()),
            ("domain", format!("{} {}", d.a(), d.b())),
            ("beta", beta.map(|b| b.to_string()).unwrap_or_default()),
        ]),
    )
}

#[derive(Serialize)]
struct SweepOutput {
    geometry: &'static str,
    n: u32,
    domain: [f64; 2],
    kappa: f64,
    beta_left: f64,
    beta_right: f64,
    c: f64,
    grid: usize,
    anchor_variable: Variable,
    raw_radial_length: bool,
    argmin_anchor: f64,
    lambda_min: f64,
    lambda_range: f64,
    cell: f64,
    lambda_first: f64,
    lambda_last: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn sweep(
    geometry: &Geometry,
    kappa: f64,
    beta: f64,
    beta_right: Option<f64>,
    c: f64,
    grid: usize,
    raw_length: bool,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let place = resolve(geometry)?;
    let domain = place.domain();
    if grid < 3 {
        return Err(Failure::Usage(format!("--grid must be at least 3, got {grid}")));
    }
    let (result, br) = match place {
        Place::Interval(d) => {
            if raw_length {
                return Err(Failure::Usage("--raw-length applies to shells only".to_string()));
            }
            let br = beta_right.unwrap_or(beta);
            (sweep_placements_1d(&d, beta, br, c, kappa, grid)?, br)
        }
        Place::Shell { n, domain } => {
            if beta_right.is_some() {
                return Err(Failure::Usage("--beta-right applies to intervals only".to_string()));
            }
            let sp = placeholder_shell(n, domain, kappa, beta, None)?;
            let length = if raw_length { RadialSweepLength::Raw } else { RadialSweepLength::Reduced };
            (sweep_placements_radial_with(&sp, c, grid, length, &RadialOptions::default())?, beta)
        }
    };
    let (first, last) = result.end_lambdas();
    let output = SweepOutput {
        geometry: place.name(),
        n: place.n(),
        domain: [domain.a(), domain.b()],
        kappa,
        beta_left: beta,
        beta_right: br,
        c,
        grid,
        anchor_variable: result.anchor_variable,
        raw_radial_length: result.raw_radial_length,
        argmin_anchor: result.argmin_anchor,
        lambda_min: result.lambda_min,
        lambda_range: result.lambda_range,
        cell: result.cell,
        lambda_first: first,
        lambda_last: last,
    };
    let mut outputs = Outputs::new(out)?;
    emit(&mut outputs, "sweep.json", &to_json(&output)?)?;
    outputs.write("sweep.csv", &result.to_csv())?;
    outputs.finish(
        "sweep",
        params(&[
            ("geometry", place.name().to_string()),
            ("domain", format!("{} {}", domain.a(), domain.b())),
            ("n", place.n().to_string()),
            ("kappa", kappa.to_string()),
            ("beta", beta.to_string()),
            ("beta_right", br.to_string()),
            ("c", c.to_string()),
            ("grid", grid.to_string()),
            ("raw_length", raw_length.to_string()),
        ]),
    )
}

/// A shell whose favourable set is the inner half; used where only the
/// geometry and scalars matter.
fn placeholder_shell(n: u32, domain: IntervalDomain, kappa: f64, beta: f64, m0: Option<f64>) -> Result<ShellProblem, Failure> {
    let weight = BangBangWeight::single(domain, kappa, domain.a(), domain.midpoint())?;
    Ok(ShellProblem::new(n, weight, beta, m0)?)
}

#[derive(Serialize)]
struct ReductionOutput {
    t_domain: [f64; 2],
    beta_left: f64,
    beta_right: f64,
    lambda_factor: f64,
    q: f64,
    q_lower_bound: f64,
    m0: f64,
    m0_prime: f64,
    c_prime: f64,
}

#[derive(Serialize)]
struct RegimeSets {
    regime: Regime,
    sets_r: PredictedSets,
    sets_t: PredictedSets,
}

#[derive(Serialize)]
struct CheckOutput {
    grid: usize,
    argmin_anchor_t: f64,
    argmin_set_r: [f64; 2],
    predicted_anchors_t: Vec<f64>,
    cells_from_prediction: f64,
    within_one_cell: bool,
    lambda_min: f64,
    lambda_inner_flush: f64,
    lambda_outer_flush: f64,
    flush_gap: f64,
}

#[derive(Serialize)]
struct ShellOutput {
    n: u32,
    r1: f64,
    r2: f64,
    kappa: f64,
    m0: f64,
    beta: f64,
    threshold: ThresholdReport,
    prediction: OptimalSetPrediction,
    all_regimes: Vec<RegimeSets>,
    reduction: ReductionOutput,
    check: Option<CheckOutput>,
}

fn anchors_t(sets: &PredictedSets) -> Vec<f64> {
    match sets {
        PredictedSets::Unique(s) => vec![s.a()],
        PredictedSets::EitherEnd(pair) => pair.iter().map(|s| s.a()).collect(),
        PredictedSets::Family(f) => f.anchor_range.to_vec(),
    }
}

fn check_sweep(sp: &ShellProblem, c_prime: f64, predicted_t: &PredictedSets, grid: usize) -> Result<(CheckOutput, SweepResult), Failure> {
    let n = sp.n();
    let sweep = sweep_placements_radial_with(sp, c_prime, grid, RadialSweepLength::Reduced, &RadialOptions::default())?;
    let anchors = anchors_t(predicted_t);
    let off = match predicted_t {
        PredictedSets::Family(f) if sweep.argmin_anchor >= f.anchor_range[0] && sweep.argmin_anchor <= f.anchor_range[1] => 0.0,
        _ => anchors.iter().map(|a| (sweep.argmin_anchor - a).abs()).fold(f64::INFINITY, f64::min),
    };
    let t_len = c_prime * (map_r_to_t(n, sp.r2())? - map_r_to_t(n, sp.r1())?);
    let (inner, outer) = sweep.end_lambdas();
    let check = CheckOutput {
        grid,
        argmin_anchor_t: sweep.argmin_anchor,
        argmin_set_r: [map_t_to_r(n, sweep.argmin_anchor)?, map_t_to_r(n, sweep.argmin_anchor + t_len)?],
        predicted_anchors_t: anchors,
        cells_from_prediction: off / sweep.cell,
        within_one_cell: off <= sweep.cell * (1.0 + 1e-9),
        lambda_min: sweep.lambda_min,
        lambda_inner_flush: inner,
        lambda_outer_flush: outer,
        flush_gap: inner - outer,
    };
    Ok((check, sweep))
}

#[allow(clippy::too_many_arguments)]
pub fn shell(
    dims: &[f64],
    kappa: f64,
    m0: f64,
    beta: f64,
    q: Option<f64>,
    check: bool,
    grid: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let (n, domain) = shell_dims(dims)?;
    let sp = placeholder_shell(n, domain, kappa, beta, Some(m0))?;
    let rp = reduce(&sp, q)?;
    let c_prime = rp.c_prime;
    let report = classify_shell(&sp, c_prime)?;
    let prediction = predict_shell(&sp, c_prime)?;
    let all_regimes = [Regime::Supercritical, Regime::Critical, Regime::Subcritical]
        .into_iter()
        .map(|regime| {
            let p = predict_shell_in_regime(&sp, c_prime, regime)?;
            Ok(RegimeSets { regime, sets_r: p.sets, sets_t: pullback_to_t(&p, n)?.sets })
        })
        .collect::<Result<Vec<_>, robin_shell::Error>>()?;
    let mut outputs = Outputs::new(out)?;
    let check_summary = if check {
        let predicted_t = pullback_to_t(&prediction, n)?.sets;
        let (summary, sweep) = check_sweep(&sp, c_prime, &predicted_t, grid)?;
        outputs.write("shell-sweep.csv", &sweep.to_csv())?;
        Some(summary)
    } else {
        None
    };
    let output = ShellOutput {
        n,
        r1: domain.a(),
        r2: domain.b(),
        kappa,
        m0,
        beta,
        threshold: report,
        prediction,
        all_regimes,
        reduction: ReductionOutput {
            t_domain: [rp.t_domain.a(), rp.t_domain.b()],
            beta_left: rp.beta_left,
            beta_right: rp.beta_right,
            lambda_factor: rp.lambda_factor,
            q: rp.q,
            q_lower_bound: rp.q_lower_bound,
            m0: rp.m0,
            m0_prime: rp.m0_prime,
            c_prime,
        },
        check: check_summary,
    };
    emit(&mut outputs, "shell.json", &to_json(&output)?)?;
    outputs.finish(
        "shell",
        params(&[
            ("n", n.to_string()),
            ("r1", domain.a().to_string()),
            ("r2", domain.b().to_string()),
            ("kappa", kappa.to_string()),
            ("m0", m0.to_string()),
            ("beta", beta.to_string()),
            ("q", rp.q.to_string()),
            ("check", check.to_string()),
            ("grid", grid.to_string()),
        ]),
    )
}

pub fn verify(suite: Option<&str>, out: Option<&Path>) -> Result<(), Failure> {
    let reports: Vec<CriterionReport> = match suite {
        Some(name) => {
            let id = find_suite(name).ok_or_else(|| Failure::Usage(format!("unknown suite '{name}'")))?;
            run_criterion(id).into_iter().collect()
        }
        None => run_all(),
    };
    for r in &reports {
        println!("criterion {} {}: {} ({:.1}s)", r.id, r.name, if r.passed { "PASS" } else { "FAIL" }, r.seconds);
        for line in &r.details {
            println!("    {line}");
        }
    }
    let mut outputs = Outputs::new(out)?;
    outputs.write("verify.json", &to_json(&reports)?)?;
    outputs.finish("verify", params(&[("suite", suite.unwrap_or("all").to_string())]))?;
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed))
    }
}

fn read_series(input: &Path) -> Result<Series, Failure> {
    let bad = |msg: String| Failure::Computation(format!("{}: {msg}", input.display()));
    let mut reader = csv::Reader::from_path(input).map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() < 2 {
        return Err(bad("need at least two columns".to_string()));
    }
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let x = record[0].parse::<f64>().map_err(|e| bad(e.to_string()))?;
        let y = record[1].parse::<f64>().map_err(|e| bad(e.to_string()))?;
        points.push((x, y));
    }
    if points.is_empty() {
        return Err(bad("no data rows".to_string()));
    }
    Ok(Series { x_label: headers[0].to_string(), y_label: headers[1].to_string(), points })
}

pub fn plot(input: &Path, out: &Path, kind: PlotKind) -> Result<(), Failure> {
    let series = read_series(input)?;
    let title = match kind {
        PlotKind::Sweep => "placement sweep",
        PlotKind::Eigenfunction => "principal eigenfunction",
    };
    let mut outputs = Outputs::new(None)?;
    outputs.write_at(out, &render(&series, title))?;
    outputs.finish(
        "plot",
        params(&[
            ("in", input.display().to_string()),
            ("out", out.display().to_string()),
            ("kind", format!("{kind:?}").to_lowercase()),
        ]),
    )
}
