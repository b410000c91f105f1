use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::config::{Command, ProbeKind, RunConfig};
use crate::error::{Error, Result};
use crate::evolution::{evolve, stability_ceiling, EvolveConfig};
use crate::probes::{
    infimum_from_ansatz, infimum_from_records, probe_commutator_decay, probe_gamma_upper,
    probe_nonlinear_bound, probe_scaling_laws, probe_smoothness, probe_subadditivity, Cutoff,
    SweepRecord, Verdict,
};
use crate::solver::{continuation_sweep, solve, SolveConfig, WaveSolution};
use crate::spectral::{shift, Field};

/// Exit summary of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridRecord {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

/// JSON metadata written next to every solution profile.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionRecord {
    pub mu: f64,
    pub nu: f64,
    pub residual_l2: f64,
    pub iterations: usize,
    #[serde(rename = "Q")]
    pub mass: f64,
    #[serde(rename = "L")]
    pub dispersion: f64,
    #[serde(rename = "N")]
    pub nonlinear: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub method: String,
    pub status: crate::solver::Status,
    pub grid: GridRecord,
}

pub fn solution_record(sol: &WaveSolution) -> SolutionRecord {
    SolutionRecord {
        mu: sol.mu,
        nu: sol.nu,
        residual_l2: sol.residual_l2,
        iterations: sol.iterations,
        mass: sol.values.mass,
        dispersion: sol.values.dispersion,
        nonlinear: sol.values.nonlinear,
        energy: sol.values.energy,
        method: sol.method.to_string(),
        status: sol.status,
        grid: GridRecord {
            length: sol.u.grid().length(),
            points: sol.u.grid().points(),
        },
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value).map_err(std::io::Error::from)?;
    writeln!(f)?;
    Ok(())
}

/// Comma-separated table with a header row, numbers to 17 significant digits.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(f, "{}", cells.join(","))?;
    }
    f.flush()?;
    Ok(())
}

fn write_dat(path: &Path, x: &[f64], y: &[f64]) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    for (a, b) in x.iter().zip(y) {
        writeln!(f, "{a:.16e} {b:.16e}")?;
    }
    f.flush()?;
    Ok(())
}

fn write_solution(dir: &Path, stem: &str, sol: &WaveSolution) -> Result<()> {
    sol.u.write_csv(BufWriter::new(File::create(
        dir.join(format!("{stem}.csv")),
    )?))?;
    sol.u.write_spectrum_csv(BufWriter::new(File::create(
        dir.join(format!("{stem}_spectrum.csv")),
    )?))?;
    write_json(&dir.join(format!("{stem}.json")), &solution_record(sol))
}

fn write_verdict(dir: &Path, verdict: &Verdict) -> Result<()> {
    write_json(&dir.join("verdict.json"), verdict)
}

/// Execute `command`, writing the config echo and all artifacts under `out`.
pub fn run(cfg: &RunConfig, command: Command, out: &Path) -> Result<Outcome> {
    fs::create_dir_all(out)?;
    let mut echo = cfg.clone();
    echo.command = Some(command);
    echo.output_dir = out.to_path_buf();
    fs::write(out.join("config.toml"), echo.echo())?;
    let solve_cfg = cfg.solve_config()?;
    match command {
        Command::Solve => run_solve(&solve_cfg, out),
        Command::Sweep => run_sweep(&solve_cfg, out).map(|(o, _)| o),
        Command::Evolve => run_evolve(cfg, &solve_cfg, out),
        Command::Probe => run_probe(cfg, &solve_cfg, out),
    }
}

fn run_solve(cfg: &SolveConfig, out: &Path) -> Result<Outcome> {
    let sol = solve(cfg)?;
    write_solution(out, "solution", &sol)?;
    Ok(Outcome {
        pass: sol.converged(),
        summary: format!(
            "solve: status {:?}, nu = {:.12}, residual = {:.3e}, E = {:.12}",
            sol.status, sol.nu, sol.residual_l2, sol.values.energy
        ),
    })
}

const SWEEP_HEADER: [&str; 8] = [
    "mu",
    "nu",
    "h_half_s_norm",
    "sup_norm",
    "Nval",
    "Eval",
    "residual_l2",
    "tail_mass",
];

fn sweep_row(r: &SweepRecord) -> Vec<f64> {
    vec![
        r.mu,
        r.nu,
        r.h_half_s_norm,
        r.sup_norm,
        r.nval,
        r.eval,
        r.residual_l2,
        r.tail_mass,
    ]
}

fn run_sweep(cfg: &SolveConfig, out: &Path) -> Result<(Outcome, Vec<SweepRecord>)> {
    if cfg.continuation.is_empty() {
        return Err(Error::Config("sweep needs solver.continuation".into()));
    }
    let entries = continuation_sweep(cfg)?;
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (i, entry) in entries.iter().enumerate() {
        match &entry.solution {
            Ok(sol) => {
                write_solution(out, &format!("solution_{i:03}"), sol)?;
                records.push(SweepRecord::from_solution(sol, cfg.s()));
                if !sol.converged() {
                    failures.push(format!("mu = {}: {:?}", entry.mu, sol.status));
                }
            }
            Err(msg) => {
                write_json(
                    &out.join(format!("solution_{i:03}.json")),
                    &serde_json::json!({ "mu": entry.mu, "error": msg }),
                )?;
                failures.push(format!("mu = {}: {msg}", entry.mu));
            }
        }
    }
    let mut header: Vec<&str> = SWEEP_HEADER.to_vec();
    header.push("converged");
    let rows: Vec<Vec<f64>> = records
        .iter()
        .map(|r| {
            let mut row = sweep_row(r);
            row.push(if r.converged { 1.0 } else { 0.0 });
            row
        })
        .collect();
    write_table(&out.join("sweep.csv"), &header, &rows)?;
    write_json(&out.join("sweep.json"), &records)?;
    let summary = if failures.is_empty() {
        format!("sweep: {} masses converged", entries.len())
    } else {
        format!(
            "sweep: {} of {} failed ({})",
            failures.len(),
            entries.len(),
            failures.join("; ")
        )
    };
    Ok((
        Outcome {
            pass: failures.is_empty(),
            summary,
        },
        records,
    ))
}

/// Relative `Q` drift accepted by the evolve verdict.
const MASS_DRIFT_LIMIT: f64 = 1e-10;
const ENERGY_DRIFT_LIMIT: f64 = 1e-8;
const FRAME_ERROR_LIMIT: f64 = 1e-3;
/// Default step count per horizon when `evolve.dt` is not set.
const STEPS_PER_HORIZON: f64 = 10_000.0;

fn run_evolve(run_cfg: &RunConfig, cfg: &SolveConfig, out: &Path) -> Result<Outcome> {
    let sol = solve(cfg)?;
    write_solution(out, "solution", &sol)?;
    if !sol.converged() {
        return Ok(Outcome {
            pass: false,
            summary: format!("evolve: initial solve did not converge ({:?})", sol.status),
        });
    }
    let t_final = run_cfg.evolve.t_final.unwrap_or(10.0 / (1.0 - sol.nu));
    let dt = run_cfg.evolve.dt.unwrap_or_else(|| {
        (0.1 * stability_ceiling(&sol.u, &cfg.nl)).min(t_final / STEPS_PER_HORIZON)
    });
    let ecfg = EvolveConfig {
        dt,
        t_final,
        disp: cfg.disp.clone(),
        nl: cfg.nl.clone(),
        record_every: run_cfg.evolve.record_every,
    };
    let traj = match evolve(&sol.u, &ecfg) {
        Ok(t) => t,
        Err(Error::BlowUp { time, last_good }) => {
            last_good.write_csv(BufWriter::new(File::create(out.join("last_good.csv"))?))?;
            return Ok(Outcome {
                pass: false,
                summary: format!("evolve: blow-up at t = {time}"),
            });
        }
        Err(e) => return Err(e),
    };
    let echo = serde_json::json!({ "dt": dt, "T": t_final, "record_every": ecfg.record_every });
    traj.write(&out.join("trajectory"), echo)?;
    let back = shift(traj.final_state(), -sol.nu * t_final);
    let frame_error = back.sub(&sol.u).l2_norm() / sol.u.l2_norm();
    let (dq, de) = (traj.mass_drift(), traj.energy_drift());
    let pass =
        frame_error <= FRAME_ERROR_LIMIT && dq <= MASS_DRIFT_LIMIT && de <= ENERGY_DRIFT_LIMIT;
    let verdict = Verdict {
        probe: "traveling_wave".into(),
        pass,
        metrics: serde_json::json!({
            "nu": sol.nu,
            "T": t_final,
            "dt": traj.dt,
            "steps": traj.steps,
            "frame_error": frame_error,
            "mass_drift": dq,
            "energy_drift": de,
        }),
    };
    write_verdict(out, &verdict)?;
    Ok(Outcome {
        pass,
        summary: format!("evolve: frame error {frame_error:.3e}, dQ {dq:.3e}, dE {de:.3e}"),
    })
}

fn run_probe(run_cfg: &RunConfig, cfg: &SolveConfig, out: &Path) -> Result<Outcome> {
    let p = &run_cfg.probe;
    let (verdict, summary) = match p.kind {
        ProbeKind::Scaling => {
            let (_, records) = run_sweep(cfg, out)?;
            match probe_scaling_laws(&records) {
                Ok(rep) => {
                    let mus: Vec<f64> = records.iter().map(|r| r.mu).collect();
                    let columns: [(&str, Column); 4] = [
                        ("one_minus_nu", |r| 1.0 - r.nu),
                        ("h_half_s_norm", |r| r.h_half_s_norm),
                        ("nval", |r| r.nval),
                        ("sup_norm", |r| r.sup_norm),
                    ];
                    let mut files = Vec::new();
                    for (name, f) in columns {
                        let y: Vec<f64> = records.iter().map(f).collect();
                        let file = format!("{name}.dat");
                        write_dat(&out.join(&file), &mus, &y)?;
                        files.push(serde_json::json!({ "file": file, "x": "mu", "y": name, "scale": "loglog" }));
                    }
                    write_json(&out.join("plot_manifest.json"), &files)?;
                    let summary = rep
                        .fits
                        .iter()
                        .map(|(k, f)| format!("{k} slope {:.4} (r2 {:.5})", f.slope, f.r_squared))
                        .collect::<Vec<_>>()
                        .join(", ");
                    let pass = rep.passed();
                    (
                        verdict("scaling", pass, &rep)?,
                        format!("scaling: {summary}"),
                    )
                }
                Err(e) => {
                    let msg = e.to_string();
                    let v = Verdict {
                        probe: "scaling".into(),
                        pass: false,
                        metrics: serde_json::json!({ "error": msg }),
                    };
                    (v, format!("scaling: {msg}"))
                }
            }
        }
        ProbeKind::NonlinearBound => {
            let rep = probe_nonlinear_bound(cfg.s(), cfg.r(), p.ensemble_size, run_cfg.seed)?;
            let summary = format!(
                "nonlinear_bound: gamma {:.4}, max {:.4e} -> {:.4e}",
                rep.gamma, rep.base.max, rep.doubled.max
            );
            (verdict("nonlinear_bound", rep.stable, &rep)?, summary)
        }
        ProbeKind::GammaUpper => {
            let thetas = if p.thetas.is_empty() {
                (1..=40)
                    .map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / 41.0))
                    .collect()
            } else {
                p.thetas.clone()
            };
            let rep = probe_gamma_upper(cfg.mu, &thetas, &cfg.grid, &cfg.disp, &cfg.nl)?;
            let rows: Vec<Vec<f64>> = rep.scan.iter().map(|(t, e)| vec![*t, *e]).collect();
            write_table(&out.join("gamma_scan.csv"), &["theta", "energy"], &rows)?;
            let summary = format!(
                "gamma_upper: {:.12} at theta {:.4} (mu {})",
                rep.estimate.gamma_upper, rep.theta_best, cfg.mu
            );
            (verdict("gamma_upper", rep.below_mu, &rep)?, summary)
        }
        ProbeKind::Infimum => {
            let rep = if cfg.continuation.is_empty() {
                let mus = [0.01, 0.02, 0.05, 0.1, 0.2];
                infimum_from_ansatz(&mus, p.c3, &cfg.disp, &cfg.nl)?
            } else {
                let (_, records) = run_sweep(cfg, out)?;
                infimum_from_records(&records)?
            };
            let rows: Vec<Vec<f64>> = rep
                .rows
                .iter()
                .map(|r| vec![r.mu, r.energy, r.ratio])
                .collect();
            write_table(&out.join("infimum.csv"), &["mu", "energy", "ratio"], &rows)?;
            let summary = format!(
                "infimum: kappa {:.6}, all below mu: {}",
                rep.kappa, rep.all_below_mu
            );
            (verdict("infimum", rep.passed(), &rep)?, summary)
        }
        ProbeKind::Subadditivity => {
            let rows = probe_subadditivity(cfg.mu, &p.splits, cfg)?;
            let table: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| vec![r.lambda, r.gamma_mu, r.gamma_lambda, r.gamma_rest, r.defect])
                .collect();
            write_table(
                &out.join("subadditivity.csv"),
                &["lambda", "gamma_mu", "gamma_lambda", "gamma_rest", "defect"],
                &table,
            )?;
            let pass = rows
                .iter()
                .all(|r| r.conclusive && r.defect < -SUBADDITIVITY_MARGIN);
            let worst = rows
                .iter()
                .map(|r| r.defect)
                .fold(f64::NEG_INFINITY, f64::max);
            (
                verdict("subadditivity", pass, &rows)?,
                format!("subadditivity: largest defect {worst:.4e}"),
            )
        }
        ProbeKind::Commutator => {
            let u = Field::from_fn(&cfg.grid, |x| 1.0 / x.cosh());
            let v = Field::from_fn(&cfg.grid, |x| 1.0 / (0.5 * x).cosh());
            let rows = probe_commutator_decay(&u, &v, cfg.r(), &p.radii, Cutoff::Gaussian)?;
            let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.radius, r.value]).collect();
            write_table(&out.join("commutator.csv"), &["R", "I"], &table)?;
            let decreasing = rows.windows(2).all(|w| w[1].value < w[0].value);
            let decay = match (rows.first(), rows.last()) {
                (Some(a), Some(b)) if rows.len() > 1 => b.value < a.value / 10.0,
                _ => false,
            };
            let pass = if cfg.r() == 0.0 {
                rows.iter().all(|r| r.value == 0.0)
            } else {
                decreasing && decay
            };
            let summary = format!(
                "commutator: I = [{}]",
                rows.iter()
                    .map(|r| format!("{:.3e}", r.value))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            (verdict("commutator", pass, &rows)?, summary)
        }
        ProbeKind::Smoothness => {
            let sol = solve(cfg)?;
            write_solution(out, "solution", &sol)?;
            let rep = probe_smoothness(&sol.u);
            let pass = sol.converged() && !rep.flagged;
            let summary = format!(
                "smoothness: top band {:.3e}, decay rate {:.4}, r2 {:.5}",
                rep.top_band_ratio, rep.decay_rate, rep.fit.r_squared
            );
            (verdict("smoothness", pass, &rep)?, summary)
        }
    };
    write_verdict(out, &verdict)?;
    Ok(Outcome {
        pass: verdict.pass,
        summary,
    })
}

type Column = fn(&SweepRecord) -> f64;

/// Required gap `G(lambda) + G(mu - lambda) - G(mu)`.
const SUBADDITIVITY_MARGIN: f64 = 1e-4;

fn verdict<T: Serialize>(probe: &str, pass: bool, metrics: &T) -> Result<Verdict> {
    Ok(Verdict {
        probe: probe.into(),
        pass,
        metrics: serde_json::to_value(metrics).map_err(std::io::Error::from)?,
    })
}
