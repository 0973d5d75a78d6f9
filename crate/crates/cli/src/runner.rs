//! Orchestration behind the command line verbs.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use icflow::flow::{run, Checkpoint, Collector, FlowConfig, FlowState, RunSummary, Sink, StopReason};
use icflow::hypersurface::GraphSurface;
use icflow::invariants::{all_checks, curvature_checks, Check, RmsCurvature};
use icflow::roundness::{fit_decay_exponent, sphere_fit, DiagnosticsRecord, SphereFitResult};
use icflow::sphere::make_grid;

use crate::config::{InitialSurface, RunConfig};
use crate::output::{emit_csv, Table};
use crate::CliError;

pub fn initial_surface(cfg: &RunConfig) -> Result<GraphSurface, icflow::Error> {
    let grid = Arc::new(make_grid(cfg.mode, cfg.n, cfg.resolution)?);
    match &cfg.initial {
        InitialSurface::Sphere { r } => GraphSurface::sphere(grid, *r),
        InitialSurface::PerturbedSphere { r, modes } => GraphSurface::perturbed_sphere(grid, *r, modes),
        InitialSurface::Ellipsoid { a, c } => GraphSurface::ellipsoid(grid, *a, *c),
    }
}

/// Writes a checkpoint whenever Θ has grown by `every` since the last one.
struct Checkpoints {
    dir: PathBuf,
    every: f64,
    next: Option<f64>,
    written: usize,
}

impl Sink for Checkpoints {
    fn record(&mut self, record: &DiagnosticsRecord, state: &FlowState, config: &FlowConfig) -> icflow::Result<()> {
        let due = self.next.is_none_or(|next| record.theta >= next - 1e-9 * next);
        if !due {
            return Ok(());
        }
        let path = self.dir.join(format!("checkpoint_{:04}.txt", self.written));
        icflow::flow::write_checkpoint(&path, &Checkpoint::of(state, config))?;
        self.written += 1;
        let mut next = self.next.unwrap_or(record.theta);
        while next <= record.theta + 1e-9 * record.theta {
            next += self.every;
        }
        self.next = Some(next);
        Ok(())
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub fit: Option<SphereFitResult>,
    pub records: usize,
    pub checkpoints: usize,
    pub csv: PathBuf,
}

/// Resolves a configured path relative to the directory of the config file.
pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// Runs the flow, fits the spherical flow to the samples and writes the CSV.
pub fn execute(cfg: &RunConfig, base: &Path) -> Result<RunOutcome, CliError> {
    let flow = cfg.flow_config()?;
    let initial = initial_surface(cfg)?;
    let mut collector = Collector::default();
    let mut checkpoints = match &cfg.checkpoint_dir {
        Some(dir) if cfg.checkpoint_every > 0.0 => {
            let dir = resolve(base, dir);
            fs::create_dir_all(&dir).map_err(|source| CliError::Io {
                path: dir.clone(),
                source,
            })?;
            Some(Checkpoints {
                dir,
                every: cfg.checkpoint_every,
                next: None,
                written: 0,
            })
        }
        _ => None,
    };
    let summary = match checkpoints.as_mut() {
        Some(ck) => run(&flow, initial, &mut [&mut collector, ck])?,
        None => run(&flow, initial, &mut [&mut collector])?,
    };
    let fit = if collector.samples.len() >= 3 {
        Some(sphere_fit(&collector.samples, cfg.n, cfg.p, None)?)
    } else {
        None
    };
    let csv = resolve(base, &cfg.csv);
    emit_csv(&csv, cfg.n + 1, &collector.records, fit.as_ref())?;
    Ok(RunOutcome {
        summary,
        fit,
        records: collector.records.len(),
        checkpoints: checkpoints.map_or(0, |c| c.written),
        csv,
    })
}

pub fn describe(outcome: &RunOutcome) -> String {
    let s = &outcome.summary;
    let mut lines = vec![
        format!("stop = {}", s.reason),
        format!("steps = {}", s.steps),
        format!("samples = {}", outcome.records),
        format!("t = {:?}", s.t),
        format!("Theta = {:?}", s.theta),
        format!("r0 = {:?}", s.r0),
    ];
    if let Some(cause) = &s.cause {
        lines.push(format!("cause = {cause}"));
    }
    if let Some(fit) = &outcome.fit {
        let q: Vec<String> = fit.q.iter().map(|x| format!("{x:?}")).collect();
        lines.push(format!("R_star = {:?}", fit.r_star));
        lines.push(format!("Q = {}", q.join(",")));
    }
    if outcome.checkpoints > 0 {
        lines.push(format!("checkpoints = {}", outcome.checkpoints));
    }
    lines.push(format!("csv = {}", outcome.csv.display()));
    lines.join("\n")
}

pub fn stop_reason_tag(reason: StopReason) -> &'static str {
    match reason {
        StopReason::ReachedStop => "reached_stop",
        StopReason::AdmissibilityLost => "admissibility_lost",
        StopReason::Degeneracy => "numerical_degeneracy",
    }
}

/// Columns fitted by default when present in the file.
pub const DEFAULT_FIT_COLUMNS: &[&str] = &[
    "osc_u",
    "osc_support",
    "grad_phi_sq_max",
    "w_max",
    "pinch_d1",
    "hausdorff",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnFit {
    pub column: String,
    pub result: Result<(f64, f64), String>,
    pub points: usize,
}

/// Power-law fits of the given columns against Θ, over rows with Θ ≥ `min_theta`.
pub fn fit_columns(table: &Table, columns: &[String], min_theta: f64) -> Result<Vec<ColumnFit>, String> {
    let theta = table.column("Theta").ok_or("no `Theta` column")?;
    Ok(columns
        .iter()
        .map(|name| {
            let Some(values) = table.column(name) else {
                return ColumnFit {
                    column: name.clone(),
                    result: Err("no such column".into()),
                    points: 0,
                };
            };
            let series: Vec<(f64, f64)> = theta
                .iter()
                .zip(values)
                .filter(|(t, _)| **t >= min_theta)
                .map(|(t, v)| (*t, v))
                .collect();
            ColumnFit {
                column: name.clone(),
                points: series.len(),
                result: fit_decay_exponent(&series).map_err(|e| e.to_string()),
            }
        })
        .collect())
}

/// The invariant suites, or the concavity fault fixture.
pub fn checks(samples: usize, seed: u64, inject_concavity_fault: bool) -> Result<Vec<Check>, CliError> {
    if inject_concavity_fault {
        let mut out = curvature_checks(&RmsCurvature { n: 3 }, true, samples, seed);
        for c in &mut out {
            c.detail = format!("rms fixture: {}", c.detail);
        }
        return Ok(out);
    }
    Ok(all_checks(samples, seed)?)
}
