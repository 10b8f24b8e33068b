use serde_json::{json, Value};

use logshot::analysis::{
    convergence_report, cov_closed_form_independent, cov_closed_form_logdecay, cov_closed_form_powerlaw,
    cov_poly_numeric, cov_quadrature, empirical_cov, empirical_qv, expected_qv_sweep, log_log_slope,
    sample_mean, ConvergenceSetup,
};
use logshot::hfbm::{properties, sample_hfbm, HfbmParams};
use logshot::rng::derive_seed;
use logshot::shotnoise::{simulate_ensemble, simulate_ensemble_kernels};
use logshot::{Kernel, KernelFamily, NoiseModel, SamplePath, SimConfig, TimeGrid, VarianceProfile};

use crate::error::{invalid, CliError, CliResult};
use crate::output::{emit, num, Format, Table};
use crate::parse::{parse_grid, parse_noise, parse_times};
use crate::{CovArgs, HfbmArgs, KernelArg, LimitArgs, QvArgs, SimulateArgs};

fn kernel(arg: KernelArg, beta: f64) -> CliResult<Kernel> {
    Ok(match arg {
        KernelArg::Log => Kernel::logarithmic(beta)?,
        KernelArg::Poly => Kernel::polynomial(beta)?,
    })
}

fn family_name(k: &Kernel) -> &'static str {
    match k.family() {
        KernelFamily::Logarithmic => "log",
        KernelFamily::Polynomial => "poly",
    }
}

fn column_names(base: &[&str], ensemble: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for m in 0..ensemble {
        for b in base {
            cols.push(if ensemble == 1 { b.to_string() } else { format!("{b}_{m}") });
        }
    }
    cols
}

fn path_table(grid: &TimeGrid, base: &[&str], paths: &[Vec<&SamplePath>]) -> Table {
    let mut table = Table::new(column_names(base, paths.len()));
    for (i, &t) in grid.times().iter().enumerate() {
        let mut row = vec![num(t)];
        for group in paths {
            row.extend(group.iter().map(|p| num(p.values[i])));
        }
        table.push(row);
    }
    table
}

fn require_ensemble(m: usize) -> CliResult<()> {
    if m == 0 {
        return Err(invalid("--ensemble must be at least 1"));
    }
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> CliResult<()> {
    require_ensemble(a.ensemble)?;
    let kernel = kernel(a.kernel, a.beta)?;
    let grid = parse_grid(&a.grid)?;
    let noise = parse_noise(&a.noise, grid.last())?;
    let config = SimConfig::new(kernel, noise, a.lambda, grid.clone(), a.seed)?.with_ensemble_size(a.ensemble)?;
    let (kernels, base) = if a.compare_poly {
        (
            vec![Kernel::logarithmic(a.beta)?, Kernel::polynomial(a.beta)?],
            vec!["log", "poly"],
        )
    } else {
        (vec![kernel], vec![family_name(&kernel)])
    };
    let paths = simulate_ensemble_kernels(&config, &kernels)?;
    let groups: Vec<Vec<&SamplePath>> = paths.iter().map(|g| g.iter().collect()).collect();
    let mut table = path_table(&grid, &base, &groups);
    table.meta = json!({
        "command": "simulate",
        "kernel": if a.compare_poly { "log+poly" } else { family_name(&kernel) },
        "beta": a.beta,
        "lambda": a.lambda,
        "noise": noise.id(),
        "ensemble": a.ensemble,
        "seed": a.seed,
    })
    .as_object()
    .cloned()
    .unwrap_or_default();
    emit(&table, a.out.format, a.out.output.as_deref())
}

/// Reference covariance: closed form where one exists, quadrature otherwise.
fn reference_cov(kernel: &Kernel, noise: &NoiseModel, lambda: f64, s: f64, t: f64) -> CliResult<(f64, &'static str)> {
    let beta = kernel.beta();
    let value = match (kernel.family(), noise.profile()) {
        (KernelFamily::Logarithmic, VarianceProfile::Constant { k2 }) => {
            (cov_closed_form_independent(beta, lambda, k2, s, t)?, "closed_form")
        }
        (KernelFamily::Logarithmic, VarianceProfile::PowerLaw { k, gamma }) => {
            (cov_closed_form_powerlaw(beta, lambda, k, gamma, s, t)?, "closed_form")
        }
        (KernelFamily::Logarithmic, VarianceProfile::LogDecay { k, gamma, .. }) => {
            (cov_closed_form_logdecay(beta, lambda, k, gamma, s, t)?, "closed_form")
        }
        (KernelFamily::Polynomial, VarianceProfile::Constant { k2 }) => {
            (cov_poly_numeric(beta, lambda, k2, s, t)?, "quadrature")
        }
        _ => (cov_quadrature(kernel, noise, lambda, s, t)?, "quadrature"),
    };
    Ok(value)
}

pub fn cov(a: &CovArgs) -> CliResult<()> {
    let kernel = kernel(a.kernel, a.beta)?;
    let grid = parse_times(&a.times)?;
    if grid.times()[0] <= 0.0 {
        return Err(invalid("--times must be positive"));
    }
    let noise = parse_noise(&a.noise, grid.last())?;
    let config = SimConfig::new(kernel, noise, a.lambda, grid.clone(), a.seed)?;
    config.validate()?;
    let paths = if a.ensemble > 0 {
        simulate_ensemble(&config.with_ensemble_size(a.ensemble)?)?
    } else {
        Vec::new()
    };
    let mut table = Table::new(["s", "t", "closed_form", "mc_estimate", "std_error", "z"]);
    let mut method = "closed_form";
    let times = grid.times();
    for (i, &s) in times.iter().enumerate() {
        for &t in &times[i..] {
            let (reference, how) = reference_cov(&kernel, &noise, a.lambda, s, t)?;
            method = how;
            let mut row = vec![num(s), num(t), num(reference)];
            if paths.is_empty() {
                row.extend([Value::Null, Value::Null, Value::Null]);
            } else {
                let est = empirical_cov(&paths, s, t)?.with_target(reference);
                row.extend([num(est.estimate), num(est.std_error), est.z_score.map_or(Value::Null, num)]);
            }
            table.push(row);
        }
    }
    table.meta = json!({
        "command": "cov",
        "kernel": family_name(&kernel),
        "beta": a.beta,
        "lambda": a.lambda,
        "noise": noise.id(),
        "reference": method,
        "ensemble": a.ensemble,
        "seed": a.seed,
    })
    .as_object()
    .cloned()
    .unwrap_or_default();
    emit(&table, a.out.format, a.out.output.as_deref())
}

pub fn qv(a: &QvArgs) -> CliResult<()> {
    if a.ns.is_empty() || a.ns.contains(&0) {
        return Err(invalid("--ns must list positive partition sizes"));
    }
    let log = Kernel::logarithmic(a.beta)?;
    let poly = Kernel::polynomial(a.beta)?;
    let noise = parse_noise(&a.noise, a.horizon)?;
    let exp_log = expected_qv_sweep(&log, a.lambda, &noise, a.horizon, &a.ns)?;
    let exp_poly = expected_qv_sweep(&poly, a.lambda, &noise, a.horizon, &a.ns)?;
    let mut table = Table::new([
        "n",
        "expected_qv_log",
        "expected_qv_poly",
        "mc_qv_mean",
        "mc_qv_stderr",
        "mc_qv_poly_mean",
        "mc_qv_poly_stderr",
    ]);
    for (i, &n) in a.ns.iter().enumerate() {
        let mut row = vec![json!(n), num(exp_log[i]), num(exp_poly[i])];
        if a.ensemble >= 2 {
            let config = SimConfig::new(log, noise, a.lambda, TimeGrid::uniform(a.horizon, n)?, derive_seed(a.seed, i as u64))?
                .with_ensemble_size(a.ensemble)?;
            let paths = simulate_ensemble_kernels(&config, &[log, poly])?;
            for k in 0..2 {
                let qvs = paths.iter().map(|g| empirical_qv(&g[k])).collect::<Result<Vec<_>, _>>()?;
                let r = sample_mean("qv", &qvs)?;
                row.extend([num(r.estimate), num(r.std_error)]);
            }
        } else {
            row.extend([Value::Null, Value::Null, Value::Null, Value::Null]);
        }
        table.push(row);
    }
    let xs: Vec<f64> = a.ns.iter().map(|&n| n as f64).collect();
    let slopes = if xs.len() >= 2 {
        Some((log_log_slope(&xs, &exp_log)?, log_log_slope(&xs, &exp_poly)?))
    } else {
        None
    };
    table.meta = json!({
        "command": "qv",
        "beta": a.beta,
        "lambda": a.lambda,
        "noise": noise.id(),
        "horizon": a.horizon,
        "ensemble": a.ensemble,
        "seed": a.seed,
    })
    .as_object()
    .cloned()
    .unwrap_or_default();
    if let Some((sl, sp)) = slopes {
        table.extra.insert("slopes".into(), json!({ "log": sl, "poly": sp }));
        if a.out.format == Format::Csv {
            eprintln!("log-log slope of expected QV in n: log {sl:.4}, poly {sp:.4}");
        }
    }
    emit(&table, a.out.format, a.out.output.as_deref())
}

pub fn limit(a: &LimitArgs) -> CliResult<()> {
    let grid = parse_times(&a.times)?;
    let c_max = a.scales.iter().copied().fold(1.0, f64::max);
    let noise = parse_noise(&a.noise, c_max * grid.last())?;
    let report = convergence_report(&ConvergenceSetup {
        alpha: a.alpha,
        lambda: a.lambda,
        noise,
        grid: grid.clone(),
        scales: a.scales.clone(),
        ensemble_size: a.ensemble,
        seed: a.seed,
    })?;
    let mut table = Table::new(["s", "t", "c", "target", "empirical", "abs_diff"]);
    let times = grid.times();
    for d in &report.diagnostics {
        for i in 0..times.len() {
            for j in i..times.len() {
                let (target, emp) = (report.target[i][j], d.empirical[i][j]);
                table.push(vec![
                    num(times[i]),
                    num(times[j]),
                    num(d.c),
                    num(target),
                    num(emp),
                    num((emp - target).abs()),
                ]);
            }
        }
    }
    if a.out.format == Format::Csv {
        for d in &report.diagnostics {
            let worst_kurt = d.excess_kurtosis.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
            eprintln!(
                "c={}: frobenius {:.6}, max abs {:.6}, max |excess kurtosis| {:.5}",
                d.c, d.frobenius_distance, d.max_abs_distance, worst_kurt
            );
        }
    }
    table.meta = json!({
        "command": "limit",
        "alpha": a.alpha,
        "lambda": a.lambda,
        "noise": report.noise,
        "ensemble": a.ensemble,
        "seed": a.seed,
    })
    .as_object()
    .cloned()
    .unwrap_or_default();
    table.extra.insert("report".into(), serde_json::to_value(&report)?);
    emit(&table, a.out.format, a.out.output.as_deref())
}

pub fn hfbm(a: &HfbmArgs) -> CliResult<()> {
    require_ensemble(a.ensemble)?;
    let params = HfbmParams::new(a.alpha)?;
    let grid = parse_grid(&a.grid)?;
    let paths = sample_hfbm(params, &grid, a.ensemble, a.seed)?;
    let groups: Vec<Vec<&SamplePath>> = paths.iter().map(|p| vec![p]).collect();
    let mut table = path_table(&grid, &["value"], &groups);
    table.meta = json!({
        "command": "hfbm",
        "alpha": a.alpha,
        "ensemble": a.ensemble,
        "seed": a.seed,
    })
    .as_object()
    .cloned()
    .unwrap_or_default();
    let mut properties_ok = true;
    if a.check_properties {
        let report = properties::check(params, a.triples, a.tolerance, derive_seed(a.seed, 1))?;
        for c in &report.checks {
            eprintln!(
                "{}: {} passed, {} failed, worst violation {:e}",
                c.name, c.passed, c.failed, c.worst_violation
            );
        }
        properties_ok = report.all_passed();
        table.extra.insert("properties".into(), serde_json::to_value(&report)?);
    }
    emit(&table, a.out.format, a.out.output.as_deref())?;
    if properties_ok {
        Ok(())
    } else {
        Err(CliError::Numerical("increment-variance property check failed".into()))
    }
}
