use std::path::Path;

use anyhow::{ensure, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use twistosc::oscillator::levels_up_to;
use twistosc::radial::{energy_from_dimensionless, fd_eigenfunction, radial_polynomial_coeffs};
use twistosc::{
    angular_momentum_eigenvalue, coherent_moments, effective_params, energy_modes, energy_nl,
    fd_spectrum_extrapolated, run_checks, Check, CoherentAmplitudes, Error, Fault, FockBasis,
    QuantumNumbers, RadialGrid, Snapshot, VerifyOptions,
};

use crate::config::RunConfig;
use crate::table::{check_table, Cell, Report, Table};

fn check(
    module: &'static str,
    invariant: &'static str,
    at: Option<(f64, f64)>,
    observed: f64,
    tolerance: f64,
) -> Check {
    Check {
        module,
        invariant,
        t: at.map(|s| s.0),
        f: at.map(|s| s.1),
        observed,
        tolerance,
        passed: observed <= tolerance,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn args(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(map) => map,
        _ => Map::new(),
    }
}

/// Per-snapshot work in parallel, results merged in input order.
fn per_snapshot<T: Send>(
    cfg: &RunConfig,
    work: impl Fn(f64, f64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let snaps = cfg.snapshots()?;
    snaps.par_iter().map(|&(t, f)| work(t, f)).collect()
}

/// Closed-form levels with both labelings.
pub fn cmd_spectrum(cfg: &RunConfig, n_max: u32) -> Result<Report> {
    cfg.validate()?;
    let p = cfg.params;
    let parts = per_snapshot(cfg, |t, f| {
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for qn in levels_up_to(n_max) {
            let occ = qn.modes();
            let e_nl = energy_nl(&p, f, qn);
            let e_modes = energy_modes(&p, f, occ);
            worst = worst.max(rel(e_nl, e_modes));
            rows.push(vec![
                t.into(),
                f.into(),
                qn.n().into(),
                qn.l().into(),
                occ.n_plus.into(),
                occ.n_minus.into(),
                e_nl.into(),
                e_modes.into(),
                angular_momentum_eigenvalue(&p, occ).into(),
            ]);
        }
        Ok((
            rows,
            check(
                "oscillator_core",
                "E_nl = E_(n+,n-)",
                Some((t, f)),
                worst,
                1e-12,
            ),
        ))
    })?;
    let mut table = Table::new(&[
        "t", "f", "n", "l", "n_plus", "n_minus", "E_nl", "E_modes", "L",
    ]);
    let mut checks = Vec::new();
    for (rows, c) in parts {
        rows.into_iter().for_each(|r| table.push(r));
        checks.push(c);
    }
    Ok(Report {
        command: "spectrum",
        args: args(json!({ "n_max": n_max })),
        table,
        checks,
    })
}

/// Effective parameters along the configured time points.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let p = cfg.params;
    let stiffness = p.stiffness();
    let omega2 = p.omega * p.omega;
    let parts = per_snapshot(cfg, |t, f| {
        let e = effective_params(&p, f);
        let stiff_res = (e.mass_f * e.omega_f * e.omega_f - stiffness).abs();
        let prod_res = (e.omega_plus * e.omega_minus - omega2).abs();
        let row: Vec<Cell> = vec![
            t.into(),
            f.into(),
            e.mass_f.into(),
            e.omega_f.into(),
            e.omega_plus.into(),
            e.omega_minus.into(),
            stiff_res.into(),
            prod_res.into(),
        ];
        let checks = vec![
            check(
                "oscillator_core",
                "M_f Omega_f^2 = m omega^2",
                Some((t, f)),
                stiff_res / stiffness,
                1e-14,
            ),
            check(
                "oscillator_core",
                "Omega_+ Omega_- = omega^2",
                Some((t, f)),
                prod_res / omega2,
                1e-14,
            ),
        ];
        Ok((row, checks))
    })?;
    let mut table = Table::new(&[
        "t",
        "f",
        "M_f",
        "Omega_f",
        "Omega_plus",
        "Omega_minus",
        "stiffness_residual",
        "product_residual",
    ]);
    let mut checks = Vec::new();
    for (row, c) in parts {
        table.push(row);
        checks.extend(c);
    }
    Ok(Report {
        command: "sweep",
        args: Map::new(),
        table,
        checks,
    })
}

/// Coherent-state moments at each time point.
pub fn cmd_coherent(cfg: &RunConfig, c: CoherentAmplitudes) -> Result<Report> {
    cfg.validate()?;
    let p = cfg.params;
    let basis = FockBasis::new(cfg.cutoff)?;
    let floor = p.hbar * p.hbar / 4.0;
    let parts = per_snapshot(cfg, |t, f| {
        let r = coherent_moments(&p, f, basis, &c).map_err(|e| match e {
            Error::Truncation { required, .. } => {
                anyhow::Error::new(e).context(format!("rerun with --cutoff {required} or larger"))
            }
            other => other.into(),
        })?;
        let row: Vec<Cell> = vec![
            t.into(),
            f.into(),
            c.c_plus.re.into(),
            c.c_plus.im.into(),
            c.c_minus.re.into(),
            c.c_minus.im.into(),
            r.var_x1.into(),
            r.var_x2.into(),
            r.var_p1.into(),
            r.var_p2.into(),
            r.product_1.into(),
            r.product_2.into(),
            r.mean_l.into(),
            r.var_l.into(),
            r.target_mean_l.into(),
            r.target_var_l.into(),
            r.mean_h.into(),
            r.identity_residual.into(),
            r.eigen_residual_plus.into(),
            r.eigen_residual_minus.into(),
        ];
        let at = Some((t, f));
        let checks = vec![
            check(
                "coherent_states",
                "(dx_i)^2 (dp_i)^2 = hbar^2/4",
                at,
                (r.product_1 - floor).abs().max((r.product_2 - floor).abs()),
                1e-9,
            ),
            check(
                "coherent_states",
                "<H> identity",
                at,
                r.identity_residual,
                1e-9,
            ),
            check(
                "coherent_states",
                "<L>, (dL)^2 closed forms",
                at,
                (r.mean_l - r.target_mean_l)
                    .abs()
                    .max((r.var_l - r.target_var_l).abs()),
                1e-10,
            ),
            check(
                "coherent_states",
                "a_+/- |c> = c_+/- |c>",
                at,
                r.eigen_residual_plus.max(r.eigen_residual_minus),
                1e-9,
            ),
        ];
        Ok((row, checks))
    })?;
    let mut table = Table::new(&[
        "t",
        "f",
        "c_plus_re",
        "c_plus_im",
        "c_minus_re",
        "c_minus_im",
        "var_x1",
        "var_x2",
        "var_p1",
        "var_p2",
        "product_1",
        "product_2",
        "mean_L",
        "var_L",
        "target_mean_L",
        "target_var_L",
        "mean_H",
        "identity_residual",
        "eigen_residual_plus",
        "eigen_residual_minus",
    ]);
    let mut checks = Vec::new();
    for (row, c) in parts {
        table.push(row);
        checks.extend(c);
    }
    Ok(Report {
        command: "coherent",
        args: args(json!({
            "c_plus": [c.c_plus.re, c.c_plus.im],
            "c_minus": [c.c_minus.re, c.c_minus.im],
        })),
        table,
        checks,
    })
}

fn residual_samples() -> Vec<f64> {
    (1..=40).map(|k| 0.1 * k as f64).collect()
}

/// Finite-difference radial eigenvalues for one `l`, with their targets and
/// the physical energies at each time point.
pub fn cmd_radial(cfg: &RunConfig, l: i32, count: usize, grid: RadialGrid) -> Result<Report> {
    cfg.validate()?;
    ensure!(count >= 1, "count must be at least 1");
    let p = cfg.params;
    let est = fd_spectrum_extrapolated(l, &grid, count)?;
    let samples = residual_samples();
    let mut per_level = Vec::with_capacity(count);
    for k in 0..count {
        let n = l.unsigned_abs() + 2 * k as u32;
        let residual = radial_polynomial_coeffs(n.into(), l.into())?.ode_residual(&samples)?;
        per_level.push((n, residual));
    }
    let snaps = cfg.snapshots()?;

    let mut table = Table::new(&[
        "t",
        "f",
        "n",
        "l",
        "fd_raw",
        "fd_extrapolated",
        "target",
        "observed_order",
        "energy",
        "energy_closed",
        "ode_residual",
    ]);
    let mut checks = Vec::new();
    let fd_error = (0..count)
        .map(|k| (est.values[k] - (per_level[k].0 as f64 + 1.0)).abs())
        .fold(0.0, f64::max);
    checks.push(check(
        "radial_solver",
        "fd eigenvalues -> n+1",
        None,
        fd_error,
        1e-6,
    ));
    let worst_residual = per_level.iter().map(|x| x.1).fold(0.0, f64::max);
    checks.push(check(
        "radial_solver",
        "reduced ODE residual",
        None,
        worst_residual,
        1e-12,
    ));
    for (t, f) in snaps {
        let mut worst: f64 = 0.0;
        for (k, &(n, residual)) in per_level.iter().enumerate() {
            let energy = energy_from_dimensionless(&p, f, est.values[k], l);
            let closed = energy_nl(&p, f, QuantumNumbers::new(n.into(), l.into())?);
            worst = worst.max((energy - closed).abs() / closed.abs().max(1.0));
            table.push(vec![
                t.into(),
                f.into(),
                n.into(),
                l.into(),
                est.levels[0].1[k].into(),
                est.values[k].into(),
                (n as f64 + 1.0).into(),
                est.observed_order[k].into(),
                energy.into(),
                closed.into(),
                residual.into(),
            ]);
        }
        checks.push(check(
            "radial_solver",
            "fd energies = closed form",
            Some((t, f)),
            worst,
            1e-6,
        ));
    }
    Ok(Report {
        command: "radial",
        args: args(json!({
            "l": l,
            "count": count,
            "rho_max": grid.rho_max(),
            "points": grid.points(),
        })),
        table,
        checks,
    })
}

/// `(ρ, R)` of level `(n, l)`: the normalized polynomial solution next to the
/// finite-difference eigenfunction on the same nodes.
pub fn radial_profile(n: u32, l: i32, grid: RadialGrid) -> Result<Table> {
    let exact = radial_polynomial_coeffs(n.into(), l.into())?.normalized();
    let fd = fd_eigenfunction(l, &grid, n as f64 + 1.0)?;
    let mut table = Table::new(&["rho", "R_normalized", "R_fd"]);
    for (rho, r_fd) in fd {
        table.push(vec![rho.into(), exact.eval(rho).into(), r_fd.into()]);
    }
    Ok(table)
}

/// Every cross-module check at the configured snapshots.
pub fn cmd_verify(cfg: &RunConfig, fault: Option<Fault>) -> Result<Report> {
    cfg.validate()?;
    let snaps: Vec<Snapshot> = cfg
        .snapshots()?
        .into_iter()
        .map(|(t, f)| Snapshot { t, f })
        .collect();
    let opts = VerifyOptions {
        cutoff: cfg.cutoff,
        fault,
        ..VerifyOptions::default()
    };
    let checks = run_checks(&cfg.params, &snaps, &opts)?;
    Ok(Report {
        command: "verify",
        args: args(json!({ "inject_fault": fault.map(|_| "flip-split") })),
        table: check_table(&checks),
        checks,
    })
}

/// Writes to `path`, or stdout when absent.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    use std::io::Write;
    match path {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .context("writing to stdout")?;
            out.flush().context("writing to stdout")
        }
    }
}
