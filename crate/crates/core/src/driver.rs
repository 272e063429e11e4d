//! `run` and `sweep` orchestration: solver runs, on-disk outputs and the
//! error/convergence tables.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;

use crate::analysis::{compute_e, compute_p, eoc, ErrorRecord, FieldId, Solution};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::io::config::RunConfig;
use crate::io::tables::{self, DiagnosticsRecord, EocRow, ErrorRow};
use crate::io::vtk::FieldDump;
use crate::scenarios::Scenario;
use crate::solver::{RunOutput, Solver};

pub struct RunReport {
    pub output: RunOutput<f64>,
    pub solution: Solution<f64>,
    pub dir: PathBuf,
    pub dumps: Vec<PathBuf>,
}

pub fn dump_name(step: usize) -> String {
    format!("fields_{step:08}.vtk")
}

/// Runs one `(N, epsilon)` configuration and writes its dumps and
/// `diagnostics.csv` into `dir`.
pub fn run_case(config: &RunConfig, n: usize, epsilon: f64, workers: usize, dir: &Path, dump_every: usize) -> Result<RunReport> {
    let kind = config.kind()?;
    let scenario = Scenario::<f64>::new(kind);
    let grid = TorusGrid::new(n)?;
    let mut settings = config.settings(epsilon)?;
    settings.workers = workers;
    let params = scenario.run_params(&grid, &settings)?;
    let gas = params.gas;
    let mask = params.penalty.mask.clone();
    let last = params.step_count();
    let initial = scenario.project_initial(&grid, &gas)?;
    let solver = Solver::new(grid.clone(), params)?;

    std::fs::create_dir_all(dir)?;
    let mut dumps = Vec::new();
    let output = solver.run_observed(initial, |step, time, state| {
        let due = step == 0 || step == last || (dump_every > 0 && step % dump_every == 0);
        if due {
            let path = dir.join(dump_name(step));
            FieldDump::from_state(&grid, time, state, &gas, &mask).write_file(&path)?;
            dumps.push(path);
        }
        Ok(())
    })?;
    for w in &output.warnings {
        info!("{}: {w}", dir.display());
    }

    let records: Vec<DiagnosticsRecord> = output.series.iter().map(DiagnosticsRecord::from).collect();
    tables::write_file(dir.join("diagnostics.csv"), |buf| tables::write_diagnostics(buf, &records))?;

    let solution = Solution::from_state(kind.name(), n, epsilon, output.time, &output.final_state, &gas);
    Ok(RunReport {
        output,
        solution,
        dir: dir.to_path_buf(),
        dumps,
    })
}

/// The `run` verb.
pub fn cmd_run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let dir = config.resolved_output_dir();
    run_case(config, config.n, config.epsilon, config.workers, &dir, config.dump_every)
}

/// Identity of one sweep job; epsilon is keyed by its bit pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JobKey {
    pub n: usize,
    eps_bits: u64,
}

impl JobKey {
    pub fn new(n: usize, epsilon: f64) -> Self {
        Self {
            n,
            eps_bits: epsilon.to_bits(),
        }
    }

    pub fn epsilon(&self) -> f64 {
        f64::from_bits(self.eps_bits)
    }

    pub fn dir_name(&self, experiment: &str) -> String {
        format!("{experiment}_N{}_eps{:e}", self.n, self.epsilon())
    }
}

/// `{(N, eps)} u {(N_ref, eps)} u {(N, eps_ref)}`, each once.
pub fn sweep_jobs(config: &RunConfig) -> Result<BTreeSet<JobKey>> {
    let sweep = config.sweep()?;
    let mut jobs = BTreeSet::new();
    for &eps in &sweep.epsilon_list {
        for &n in &sweep.n_list {
            jobs.insert(JobKey::new(n, eps));
            jobs.insert(JobKey::new(n, sweep.epsilon_ref));
        }
        jobs.insert(JobKey::new(sweep.n_ref, eps));
    }
    Ok(jobs)
}

pub struct SweepReport {
    pub runs: BTreeMap<JobKey, std::result::Result<Solution<f64>, String>>,
    pub errors: Vec<ErrorRecord<f64>>,
    pub eoc: Vec<EocRow>,
    pub dir: PathBuf,
}

/// The `sweep` verb. Failed runs are reported in the tables, not raised.
pub fn cmd_sweep(config: &RunConfig) -> Result<SweepReport> {
    config.validate()?;
    let sweep = config.sweep()?;
    let jobs: Vec<JobKey> = sweep_jobs(config)?.into_iter().collect();
    let kind = config.kind()?;
    let dir = config.resolved_output_dir();
    std::fs::create_dir_all(&dir)?;
    if sweep.n_ref > 160 || sweep.epsilon_list.iter().any(|&e| e / config.dt > 1e4) {
        info!("sweep with N_ref = {} and dt = {:e} is long-running", sweep.n_ref, config.dt);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let results: Vec<(JobKey, std::result::Result<Solution<f64>, String>)> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let job_dir = dir.join("runs").join(job.dir_name(kind.name()));
                let res = run_case(config, job.n, job.epsilon(), 1, &job_dir, 0)
                    .map(|r| r.solution)
                    .map_err(|e| e.to_string());
                if let Err(e) = &res {
                    log::warn!("{}: {e}", job.dir_name(kind.name()));
                }
                (*job, res)
            })
            .collect()
    });
    let runs: BTreeMap<_, _> = results.into_iter().collect();

    let get = |n: usize, eps: f64| runs.get(&JobKey::new(n, eps)).and_then(|r| r.as_ref().ok());
    let mut errors = Vec::new();
    for &n in &sweep.n_list {
        for &eps in &sweep.epsilon_list {
            let run = get(n, eps);
            let e = match (run, get(sweep.n_ref, eps)) {
                (Some(a), Some(b)) => Some(compute_e(a, b)?),
                _ => None,
            };
            let p = match (run, get(n, sweep.epsilon_ref)) {
                (Some(a), Some(b)) => Some(compute_p(a, b)?),
                _ => None,
            };
            for (idx, field) in FieldId::ALL.into_iter().enumerate() {
                errors.push(ErrorRecord {
                    experiment: kind.name().to_string(),
                    field,
                    n,
                    h: 2.0 / n as f64,
                    epsilon: eps,
                    error_e: e.map(|v| v[idx].1),
                    error_p: p.map(|v| v[idx].1),
                    time: config.t_final,
                });
            }
        }
    }

    let eoc_rows = eoc_table(kind.name(), &sweep.n_list, &sweep.epsilon_list, &errors)?;
    let error_rows: Vec<ErrorRow> = errors.iter().map(ErrorRow::from_record).collect();
    tables::write_file(dir.join("errors.csv"), |buf| tables::write_errors(buf, &error_rows))?;
    tables::write_file(dir.join("eoc.csv"), |buf| tables::write_eoc(buf, &eoc_rows))?;

    Ok(SweepReport {
        runs,
        errors,
        eoc: eoc_rows,
        dir,
    })
}

/// Rates in `h` at fixed epsilon and in epsilon at fixed `N`.
pub fn eoc_table(experiment: &str, n_list: &[usize], eps_list: &[f64], errors: &[ErrorRecord<f64>]) -> Result<Vec<EocRow>> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut epss = eps_list.to_vec();
    epss.sort_by(|a, b| b.partial_cmp(a).unwrap());
    epss.dedup();

    let lookup = |field: FieldId, n: usize, eps: f64| {
        errors
            .iter()
            .find(|r| r.field == field && r.n == n && r.epsilon == eps)
    };
    let mut rows = Vec::new();
    for field in FieldId::ALL {
        for &eps in &epss {
            if ns.len() < 2 {
                break;
            }
            let points: Vec<(f64, f64)> = ns
                .iter()
                .map(|&n| (2.0 / n as f64, lookup(field, n, eps).and_then(|r| r.error_e).unwrap_or(0.0)))
                .collect();
            for (i, rate) in eoc(&points)?.into_iter().enumerate() {
                rows.push(EocRow {
                    experiment: experiment.to_string(),
                    field: field.name().to_string(),
                    pair: format!("N={}->{}@eps={:e}", ns[i], ns[i + 1], eps),
                    rate_h: EocRow::rate_cell(rate),
                    rate_eps: String::new(),
                });
            }
        }
        for &n in &ns {
            if epss.len() < 2 {
                break;
            }
            let points: Vec<(f64, f64)> = epss
                .iter()
                .map(|&eps| (eps, lookup(field, n, eps).and_then(|r| r.error_p).unwrap_or(0.0)))
                .collect();
            for (i, rate) in eoc(&points)?.into_iter().enumerate() {
                rows.push(EocRow {
                    experiment: experiment.to_string(),
                    field: field.name().to_string(),
                    pair: format!("eps={:e}->{:e}@N={}", epss[i], epss[i + 1], n),
                    rate_h: String::new(),
                    rate_eps: EocRow::rate_cell(rate),
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jobs_are_deduplicated() {
        let mut c = RunConfig::new("exp1", 16, 0.1, 1e-4, 1e-3);
        c.n_list = Some(vec![16, 32]);
        c.epsilon_list = Some(vec![1e-1, 1e-2]);
        c.n_ref = Some(64);
        c.epsilon_ref = Some(1e-3);
        let jobs = sweep_jobs(&c).unwrap();
        // 4 grid pairs + 2 mesh references + 2 penalty references
        assert_eq!(jobs.len(), 8);

        c.n_list = Some(vec![16]);
        c.epsilon_list = Some(vec![1e-3]);
        c.n_ref = Some(16);
        assert_eq!(sweep_jobs(&c).unwrap().len(), 1);
    }

    #[test]
    fn eoc_table_rates() {
        let rec = |n: usize, eps: f64, e: f64, p: f64| ErrorRecord {
            experiment: "exp1".into(),
            field: FieldId::Rho,
            n,
            h: 2.0 / n as f64,
            epsilon: eps,
            error_e: Some(e),
            error_p: Some(p),
            time: 0.01,
        };
        let errs = vec![
            rec(16, 0.1, 0.4, 0.2),
            rec(32, 0.1, 0.2, 0.2),
            rec(16, 0.01, 0.4, 0.02),
            rec(32, 0.01, 0.1, 0.02),
        ];
        let rows = eoc_table("exp1", &[16, 32], &[0.1, 0.01], &errs).unwrap();
        let rho: Vec<_> = rows.iter().filter(|r| r.field == "rho").collect();
        assert_eq!(rho.len(), 4);
        assert_eq!(rho[0].pair, "N=16->32@eps=1e-1");
        assert!((rho[0].rate_h_value().unwrap().unwrap() - 1.0).abs() < 1e-12);
        assert!((rho[1].rate_h_value().unwrap().unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(rho[2].pair, "eps=1e-1->1e-2@N=16");
        assert!((rho[2].rate_eps_value().unwrap().unwrap() - 1.0).abs() < 1e-12);
        // u has no records: every rate undefined
        assert!(rows
            .iter()
            .filter(|r| r.field == "u")
            .all(|r| r.rate_h == tables::UNDEFINED || r.rate_eps == tables::UNDEFINED));
    }
}
