use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::json;

use warpflow::diagnostics::{diagnose, Diagnostics, DiagnosticsOptions, DimensionConstant};
use warpflow::flow::{
    chain_rule_residual, compare_with_plain, evolve_with, EvolveFailure, EvolveOptions, FlowConfig, ReparamPair,
    Trajectory,
};
use warpflow::io::{
    emit_trajectory, initial_profile, load_config, load_trajectory, preset_catalog, write_comparison_csv,
    write_mass_csv, write_orders_csv, write_residuals_csv, write_series_csv, OutputDir, RunStatus, COMPARISON_FILE,
    DIAGNOSTICS_FILE, MASS_FILE, ORDERS_FILE, RESIDUALS_FILE, SERIES_FILE,
};
use warpflow::par::Execution;
use warpflow::residuals::{order_study, OrderVerdict, ResidualOptions};
use warpflow::Error;

use crate::{EXIT_BLOW_UP, EXIT_CHECK_FAILED, EXIT_CONFIG};

/// Tolerances for `compare-modified`.
const COMPARE_REL_TOL: f64 = 1e-3;
const CHAIN_RULE_TOL: f64 = 1e-6;
const CHAIN_RULE_SAMPLES: usize = 100;

pub fn exit_code(e: &anyhow::Error) -> u8 {
    let lib = e
        .downcast_ref::<Error>()
        .or_else(|| e.downcast_ref::<EvolveFailure>().map(|f| &f.error));
    match lib {
        Some(err) if err.is_blow_up() => EXIT_BLOW_UP,
        _ => EXIT_CONFIG,
    }
}

fn load(config: &Path, out: Option<PathBuf>) -> Result<FlowConfig> {
    let mut c = load_config(config)?;
    if let Some(out) = out {
        c.out_dir = out;
    }
    c.validate()?;
    Ok(c)
}

fn write_diagnostics(out: &mut OutputDir, diag: &Diagnostics, opts: &DiagnosticsOptions) -> Result<()> {
    out.write_json(
        DIAGNOSTICS_FILE,
        &json!({
            "dimension_constant": opts.dimension_constant.label(),
            "passed": diag.passed(),
            "reports": diag.reports,
        }),
    )?;
    out.write_with(SERIES_FILE, |b| write_series_csv(b, &diag.reports, &opts.probes))?;
    if let Some(mass) = &diag.mass {
        out.write_with(MASS_FILE, |b| write_mass_csv(b, mass))?;
    }
    Ok(())
}

fn summarize(diag: &Diagnostics) {
    let failures = diag.failures();
    if failures.is_empty() {
        println!(
            "diagnostics: all gating checks passed over {} states",
            diag.reports.len()
        );
        return;
    }
    println!("diagnostics: {} gating failures", failures.len());
    for (t, c) in failures.iter().take(10) {
        println!("  t={t:.6e} {} margin={:.3e} node={:?}", c.name, c.margin, c.worst_node);
    }
}

pub fn run(
    config: &Path,
    out: Option<PathBuf>,
    force_dt: Option<f64>,
    constant: DimensionConstant,
    exec: Execution,
) -> Result<u8> {
    let config = load(config, out)?;
    let initial = initial_profile(&config)?;
    let grid = initial.grid().clone();
    let mut dir = OutputDir::create(&config.out_dir)?;
    let opts = DiagnosticsOptions {
        dimension_constant: constant,
        exec,
        ..DiagnosticsOptions::default()
    };
    match evolve_with(&config, initial, EvolveOptions { force_dt }, |_| {}) {
        Ok(traj) => {
            emit_trajectory(&mut dir, &traj, exec)?;
            let diag = diagnose(&traj, &opts)?;
            write_diagnostics(&mut dir, &diag, &opts)?;
            dir.finish(&config, &grid, traj.steps, RunStatus::Complete)?;
            println!(
                "run: {} steps to t={}, outputs in {}",
                traj.steps,
                traj.last().t,
                config.out_dir.display()
            );
            summarize(&diag);
            Ok(if diag.passed() { 0 } else { EXIT_CHECK_FAILED })
        }
        Err(EvolveFailure {
            error,
            partial: Some(traj),
        }) if error.is_blow_up() => {
            eprintln!("error: {error}");
            emit_trajectory(&mut dir, &traj, exec)?;
            // A partial run may be too short for the trajectory checks.
            if let Ok(diag) = diagnose(&traj, &opts) {
                write_diagnostics(&mut dir, &diag, &opts)?;
            }
            let reason = format!("{error}; {} states recorded", traj.states.len());
            dir.finish(&config, &grid, traj.steps, RunStatus::Incomplete { reason })?;
            Ok(EXIT_BLOW_UP)
        }
        Err(failure) => Err(failure.into()),
    }
}

pub fn invariants(dir: &Path, out: Option<PathBuf>, constant: DimensionConstant, exec: Execution) -> Result<u8> {
    let traj = load_trajectory(dir).with_context(|| format!("loading trajectory from {}", dir.display()))?;
    let out = out.unwrap_or_else(|| dir.join("invariants"));
    let opts = DiagnosticsOptions {
        dimension_constant: constant,
        exec,
        ..DiagnosticsOptions::default()
    };
    let diag = diagnose(&traj, &opts)?;
    let mut od = OutputDir::create(&out)?;
    write_diagnostics(&mut od, &diag, &opts)?;
    od.finish(
        &traj.config,
        traj.states[0].profile.grid(),
        traj.steps,
        RunStatus::Complete,
    )?;
    summarize(&diag);
    Ok(if diag.passed() { 0 } else { EXIT_CHECK_FAILED })
}

pub fn residuals(config: &Path, out: Option<PathBuf>, samples: usize, exec: Execution) -> Result<u8> {
    let config = load(config, out)?;
    let opts = ResidualOptions {
        samples,
        exec,
        ..ResidualOptions::default()
    };
    let study = order_study(&config, &opts)?;
    let mut dir = OutputDir::create(&config.out_dir)?;
    dir.write_with(RESIDUALS_FILE, |b| write_residuals_csv(b, &study.reports))?;
    dir.write_with(ORDERS_FILE, |b| write_orders_csv(b, &study.orders))?;
    let grid = initial_profile(&config)?.grid().clone();
    dir.finish(&config, &grid, 0, RunStatus::Complete)?;

    println!(
        "{:<28} {:>9} {:>12}  {:<13} oracle",
        "equation", "order", "max(M)", "verdict"
    );
    let mut failed = false;
    for row in &study.orders {
        println!(
            "{:<28} {:>9.3} {:>12.3e}  {:<13} {}",
            row.spec.key(),
            row.observed_order,
            row.max_residual[2],
            row.verdict.name(),
            if row.spec.oracle_holds { "holds" } else { "fails" }
        );
        failed |= row.spec.oracle_holds && row.verdict != OrderVerdict::Pass;
    }
    Ok(if failed { EXIT_CHECK_FAILED } else { 0 })
}

fn evolve(config: &FlowConfig) -> Result<Trajectory> {
    let initial = initial_profile(config)?;
    Ok(evolve_with(config, initial, EvolveOptions::default(), |_| {})?)
}

pub fn compare_modified(config: &Path, out: Option<PathBuf>) -> Result<u8> {
    let base = load(config, out)?;
    let n = base.n;
    let pair = ReparamPair::Derived;
    let tau_end = pair.tau(n, base.t_end);

    let modified = evolve(&FlowConfig {
        modified: true,
        ..base.clone()
    })?;
    let plain = evolve(&FlowConfig {
        modified: false,
        t_end: tau_end,
        ..base.clone()
    })?;
    let rows = compare_with_plain(&modified, &plain)?;
    let worst_psi = rows.iter().map(|r| r.sup_rel_diff_psi).fold(0.0, f64::max);
    let worst_phi = rows.iter().map(|r| r.sup_rel_diff_phi).fold(0.0, f64::max);

    let taus: Vec<f64> = (0..=CHAIN_RULE_SAMPLES)
        .map(|i| tau_end * i as f64 / CHAIN_RULE_SAMPLES as f64)
        .collect();
    let pairs: Vec<_> = ReparamPair::ALL
        .iter()
        .map(|&p| {
            let r = chain_rule_residual(p, n, &taus);
            println!(
                "{:<8} {:<40} chain-rule residual {r:.3e}",
                format!("{p:?}"),
                p.formula()
            );
            json!({ "pair": p, "formula": p.formula(), "chain_rule_residual": r })
        })
        .collect();
    let verified = chain_rule_residual(pair, n, &taus);

    let mut dir = OutputDir::create(&base.out_dir)?;
    dir.write_with(COMPARISON_FILE, |b| write_comparison_csv(b, &rows))?;
    dir.write_json(
        "reparam.json",
        &json!({
            "t_end_modified": base.t_end,
            "tau_end": tau_end,
            "used_pair": pair,
            "pairs": pairs,
            "sup_rel_diff_psi": worst_psi,
            "sup_rel_diff_phi": worst_phi,
            "compared_states": rows.len(),
        }),
    )?;
    dir.finish(
        &base,
        plain.states[0].profile.grid(),
        modified.steps + plain.steps,
        RunStatus::Complete,
    )?;

    println!("tau_end = {tau_end:.6}; {} states compared", rows.len());
    println!("sup relative difference: psi {worst_psi:.3e}, phi {worst_phi:.3e}");
    let ok = worst_psi <= COMPARE_REL_TOL && verified <= CHAIN_RULE_TOL;
    Ok(if ok { 0 } else { EXIT_CHECK_FAILED })
}

pub fn presets() -> Result<u8> {
    for (name, formula) in preset_catalog() {
        println!("{name:<38} {formula}");
    }
    Ok(0)
}
