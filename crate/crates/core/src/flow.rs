//! Time integration of the scalar graph flow ∂u/∂t = v / Fᵖ.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::curvature::{CurvatureFunction, CurvatureSpec};
use crate::error::{Error, Result};
use crate::hypersurface::{curvature_fields, first_inadmissible, CurvatureFields, GraphSurface};
use crate::roundness::{diagnose, DiagnosticsRecord};
use crate::sphere::{integrate, make_grid, GridMode, Resolution, ScalarField};

/// Radius at time `t` of the spherical solution starting from radius `r`.
pub fn reference_radius(t: f64, r: f64, n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    if t == 0.0 {
        return Ok(r);
    }
    if p == 1.0 {
        return Ok(r * (t / nf).exp());
    }
    if let Some(limit) = blowup_time(r, n, p) {
        if t >= limit {
            return Err(Error::PastBlowup { t, limit });
        }
    }
    let base = (1.0 - p) * t / nf.powf(p) + r.powf(1.0 - p);
    Ok(base.powf(1.0 / (1.0 - p)))
}

/// The initial radius r with `reference_radius(t, r) == rho`.
pub fn inverse_reference(rho: f64, t: f64, n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    if p == 1.0 {
        return Ok(rho * (-t / nf).exp());
    }
    let shift = (1.0 - p) * t / nf.powf(p);
    let base = rho.powf(1.0 - p) - shift;
    if p < 1.0 && base <= 0.0 {
        return Err(Error::NoPreimage {
            rho,
            t,
            bound: shift.powf(1.0 / (1.0 - p)),
        });
    }
    Ok(base.powf(1.0 / (1.0 - p)))
}

/// Lifespan nᵖ r^{1−p} / (p − 1) of the sphere of radius `r`; `None` for p ≤ 1.
pub fn blowup_time(r: f64, n: usize, p: f64) -> Option<f64> {
    (p > 1.0).then(|| (n as f64).powf(p) * r.powf(1.0 - p) / (p - 1.0))
}

/// Time at which the spherical solution from `r` reaches radius `theta`.
fn time_to_radius(theta: f64, r: f64, n: usize, p: f64) -> f64 {
    let nf = n as f64;
    if p == 1.0 {
        nf * (theta / r).ln()
    } else {
        (theta.powf(1.0 - p) - r.powf(1.0 - p)) * nf.powf(p) / (1.0 - p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    ThetaEnd(f64),
    TEnd(f64),
}

pub const DEFAULT_SAFETY: f64 = 0.2;

/// Fraction of the inscribed sphere's lifespan beyond which runs with p > 1
/// are refused.
pub const BLOWUP_GUARD: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub spec: CurvatureSpec,
    pub p: f64,
    pub safety: f64,
    pub stop: Stop,
    /// Growth of Θ between diagnostic samples.
    pub sample_interval: f64,
    /// Exponents δ at which the pinching ratio is reported.
    pub deltas: Vec<f64>,
}

impl FlowConfig {
    pub fn new(spec: CurvatureSpec, p: f64, stop: Stop) -> Result<Self> {
        let cfg = FlowConfig {
            spec,
            p,
            safety: DEFAULT_SAFETY,
            stop,
            sample_interval: 0.5,
            deltas: default_deltas(p),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_safety(mut self, safety: f64) -> Result<Self> {
        self.safety = safety;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sample_interval(mut self, interval: f64) -> Result<Self> {
        self.sample_interval = interval;
        self.validate()?;
        Ok(self)
    }

    pub fn with_deltas(mut self, deltas: Vec<f64>) -> Result<Self> {
        self.deltas = deltas;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(Error::validation("p", format!("need 0 < p < inf, got {}", self.p)));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::validation("safety", format!("need 0 < safety <= 1, got {}", self.safety)));
        }
        if !(self.sample_interval.is_finite() && self.sample_interval > 0.0) {
            return Err(Error::validation("sample_interval", "must be positive"));
        }
        match self.stop {
            Stop::ThetaEnd(x) if !(x.is_finite() && x > 0.0) => {
                return Err(Error::validation("theta_end", "must be positive"))
            }
            Stop::TEnd(x) if !(x.is_finite() && x > 0.0) => return Err(Error::validation("t_end", "must be positive")),
            _ => {}
        }
        if self.deltas.iter().any(|d| !d.is_finite()) {
            return Err(Error::validation("deltas", "must be finite"));
        }
        Ok(())
    }
}

/// δ ∈ {2, 2 + p, 3.5 + 2p}.
pub fn default_deltas(p: f64) -> Vec<f64> {
    vec![2.0, 2.0 + p, 4.0 + 2.0 * p - 0.5]
}

/// Area-weighted mean of u: the initial radius of the reference clock Θ.
pub fn mean_radius(surface: &GraphSurface) -> f64 {
    integrate(surface.grid(), surface.u()) / surface.grid().area()
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub surface: GraphSurface,
    pub t: f64,
    pub step_count: usize,
    pub dt_last: f64,
    fields: CurvatureFields,
    speed_factor: Vec<f64>,
}

/// Curvature-function values for a set of curvature fields, after checking
/// admissibility.
fn evaluate_f(fields: &CurvatureFields, f: &dyn CurvatureFunction, p: f64) -> Result<Vec<f64>> {
    let len = fields.v.len();
    if let Some(node) = first_inadmissible(|i| fields.kappa(i).to_vec(), len, f, p) {
        return Err(Error::AdmissibilityLost {
            node,
            kappa: fields.kappa(node).to_vec(),
        });
    }
    (0..len)
        .map(|i| {
            let value = f.value(fields.kappa(i))?;
            if value.is_finite() && value > 0.0 {
                Ok(value)
            } else {
                Err(Error::degenerate(i, format!("F = {value}")))
            }
        })
        .collect()
}

impl FlowState {
    /// Starts a flow at t = 0; fails with `AdmissibilityLost` if the surface is
    /// not admissible for the configured curvature function.
    pub fn new(surface: GraphSurface, config: &FlowConfig) -> Result<Self> {
        Self::at(surface, 0.0, 0, 0.0, config)
    }

    fn at(surface: GraphSurface, t: f64, step_count: usize, dt_last: f64, config: &FlowConfig) -> Result<Self> {
        let fields = curvature_fields(&surface)?;
        let f = evaluate_f(&fields, &config.spec, config.p)?;
        Ok(FlowState {
            surface,
            t,
            step_count,
            dt_last,
            fields,
            speed_factor: f,
        })
    }

    pub fn u(&self) -> &ScalarField {
        self.surface.u()
    }

    /// Per-node F values of the current surface.
    pub fn f_values(&self) -> &[f64] {
        &self.speed_factor
    }

    pub fn v_max(&self) -> f64 {
        self.fields.v.iter().copied().fold(1.0, f64::max)
    }

    pub fn kappa(&self, node: usize) -> &[f64] {
        self.fields.kappa(node)
    }

    /// Normal speed v / Fᵖ at every node.
    pub fn speed(&self, p: f64) -> Vec<f64> {
        self.fields
            .v
            .iter()
            .zip(&self.speed_factor)
            .map(|(v, f)| v / f.powf(p))
            .collect()
    }
}

/// dt = safety · h² · min(u² Fᵖ⁺¹) / (n p max(v)² max|∂F/∂κ|), capped at the
/// sample interval.
pub fn stable_dt(state: &FlowState, config: &FlowConfig) -> f64 {
    let grid = state.surface.grid();
    let p = config.p;
    let u = state.u();
    let min_num = u
        .iter()
        .zip(&state.speed_factor)
        .map(|(u, f)| u * u * f.powf(p + 1.0))
        .fold(f64::INFINITY, f64::min);
    let grad_max = (0..grid.len())
        .map(|i| {
            config
                .spec
                .gradient(state.kappa(i))
                .map(|g| g.into_iter().fold(0.0, f64::max))
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    let vmax = state.v_max();
    let h = grid.h_min();
    let dt = config.safety * h * h * min_num / (grid.n() as f64 * p * vmax * vmax * grad_max);
    dt.min(config.sample_interval)
}

/// One explicit midpoint step of size `dt`.
pub fn step_with(state: &FlowState, config: &FlowConfig, dt: f64) -> Result<FlowState> {
    let p = config.p;
    let u0 = state.u();
    let k1 = state.speed(p);
    let mid_u = ScalarField::new(u0.iter().zip(&k1).map(|(u, k)| u + 0.5 * dt * k).collect());
    let mid = FlowState::at(state.surface.with_u(mid_u)?, state.t + 0.5 * dt, state.step_count, dt, config)?;
    let k2 = mid.speed(p);
    let new_u = ScalarField::new(u0.iter().zip(&k2).map(|(u, k)| u + dt * k).collect());
    FlowState::at(state.surface.with_u(new_u)?, state.t + dt, state.step_count + 1, dt, config)
}

pub fn step(state: &FlowState, config: &FlowConfig) -> Result<FlowState> {
    step_with(state, config, stable_dt(state, config))
}

/// Receives every diagnostic sample of a run.
pub trait Sink {
    fn record(&mut self, record: &DiagnosticsRecord, state: &FlowState, config: &FlowConfig) -> Result<()>;
}

/// Keeps every record and sampled surface in memory.
#[derive(Debug, Default, Clone)]
pub struct Collector {
    pub records: Vec<DiagnosticsRecord>,
    pub samples: Vec<(f64, GraphSurface)>,
}

impl Sink for Collector {
    fn record(&mut self, record: &DiagnosticsRecord, state: &FlowState, _: &FlowConfig) -> Result<()> {
        self.records.push(record.clone());
        self.samples.push((state.t, state.surface.clone()));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ReachedStop,
    AdmissibilityLost,
    Degeneracy,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::ReachedStop => "REACHED_STOP",
            StopReason::AdmissibilityLost => "ADMISSIBILITY_LOST",
            StopReason::Degeneracy => "DEGENERACY",
        })
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub reason: StopReason,
    /// The error that ended the run early.
    pub cause: Option<Error>,
    pub steps: usize,
    pub samples: usize,
    /// Initial radius of the reference clock.
    pub r0: f64,
    pub t: f64,
    pub theta: f64,
    pub surface: GraphSurface,
}

/// Resolves the stop criterion to a time, refusing (for p > 1) times past the
/// guarded lifespan of the sphere of radius min u.
pub fn stop_time(config: &FlowConfig, initial: &GraphSurface) -> Result<(f64, f64)> {
    let n = initial.n();
    let p = config.p;
    let r0 = mean_radius(initial);
    let t_end = match config.stop {
        Stop::ThetaEnd(theta) => {
            if theta <= r0 {
                return Err(Error::validation(
                    "theta_end",
                    format!("must exceed the initial mean radius {r0}"),
                ));
            }
            time_to_radius(theta, r0, n, p)
        }
        Stop::TEnd(t) => t,
    };
    if let Some(limit) = blowup_time(initial.u().min(), n, p) {
        if t_end > BLOWUP_GUARD * limit {
            return Err(Error::PastBlowup { t: t_end, limit });
        }
    }
    Ok((r0, t_end))
}

fn classify(err: Error) -> std::result::Result<(StopReason, Error), Error> {
    match err {
        e @ Error::AdmissibilityLost { .. } => Ok((StopReason::AdmissibilityLost, e)),
        e @ Error::NumericalDegeneracy { .. } => Ok((StopReason::Degeneracy, e)),
        e => Err(e),
    }
}

/// Integrates from `initial` until the configured stop, sampling diagnostics
/// every `sample_interval` of Θ-growth (starting with the initial surface).
pub fn run(config: &FlowConfig, initial: GraphSurface, sinks: &mut [&mut dyn Sink]) -> Result<RunSummary> {
    config.validate()?;
    let n = initial.n();
    let p = config.p;
    let (r0, t_end) = stop_time(config, &initial)?;
    let theta_end = reference_radius(t_end, r0, n, p)?;
    let last_sample = ((theta_end - r0) / config.sample_interval + 1e-9).floor() as usize;
    let sample_time = |k: usize| {
        if k == 0 {
            0.0
        } else {
            time_to_radius(r0 + k as f64 * config.sample_interval, r0, n, p).min(t_end)
        }
    };

    let early = |reason, cause, surface| RunSummary {
        reason,
        cause: Some(cause),
        steps: 0,
        samples: 0,
        r0,
        t: 0.0,
        theta: r0,
        surface,
    };
    let mut state = match FlowState::new(initial.clone(), config) {
        Ok(s) => s,
        Err(e) => {
            let (reason, cause) = classify(e)?;
            return Ok(early(reason, cause, initial));
        }
    };

    let mut samples = 0;
    let mut emit = |state: &FlowState, sinks: &mut [&mut dyn Sink]| -> Result<()> {
        let theta = reference_radius(state.t, r0, n, p)?;
        let record = diagnose(state, theta, &config.deltas)?;
        for sink in sinks.iter_mut() {
            sink.record(&record, state, config)?;
        }
        samples += 1;
        Ok(())
    };
    emit(&state, sinks)?;
    let mut next = 1;

    let mut outcome = None;
    while next <= last_sample || state.t < t_end {
        let target = if next <= last_sample { sample_time(next) } else { t_end };
        let dt = stable_dt(&state, config);
        let (dt, lands) = if state.t + dt >= target { (target - state.t, true) } else { (dt, false) };
        match step_with(&state, config, dt) {
            Ok(mut s) => {
                if lands {
                    s.t = target;
                }
                state = s;
            }
            Err(e) => {
                outcome = Some(classify(e)?);
                break;
            }
        }
        if lands && next <= last_sample && target == sample_time(next) {
            emit(&state, sinks)?;
            next += 1;
        }
    }

    let theta = reference_radius(state.t, r0, n, p)?;
    let (reason, cause) = match outcome {
        Some((r, e)) => (r, Some(e)),
        None => (StopReason::ReachedStop, None),
    };
    Ok(RunSummary {
        reason,
        cause,
        steps: state.step_count,
        samples,
        r0,
        t: state.t,
        theta,
        surface: state.surface,
    })
}

/// A saved flow state.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub mode: GridMode,
    pub n: usize,
    pub resolution: Resolution,
    pub p: f64,
    pub spec: CurvatureSpec,
    pub t: f64,
    pub center: Vec<f64>,
    pub u: Vec<f64>,
}

impl Checkpoint {
    pub fn of(state: &FlowState, config: &FlowConfig) -> Self {
        let grid = state.surface.grid();
        Checkpoint {
            mode: grid.mode(),
            n: grid.n(),
            resolution: grid.resolution(),
            p: config.p,
            spec: config.spec,
            t: state.t,
            center: state.surface.center().to_vec(),
            u: state.u().to_vec(),
        }
    }

    pub fn surface(&self) -> Result<GraphSurface> {
        let grid = Arc::new(make_grid(self.mode, self.n, self.resolution)?);
        GraphSurface::new(grid, ScalarField::new(self.u.clone()), self.center.clone())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("mode = {}\n", self.mode.as_str()));
        out.push_str(&format!("n = {}\n", self.n));
        out.push_str(&format!("N_theta = {}\n", self.resolution.n_theta));
        if self.mode == GridMode::Full2d {
            out.push_str(&format!("N_lambda = {}\n", self.resolution.n_lambda));
        }
        out.push_str(&format!("p = {:?}\n", self.p));
        out.push_str(&format!("F = {}\n", self.spec));
        out.push_str(&format!("t = {:?}\n", self.t));
        let center: Vec<String> = self.center.iter().map(|c| format!("{c:?}")).collect();
        out.push_str(&format!("center = {}\n", center.join(",")));
        for u in &self.u {
            out.push_str(&format!("{u:?}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header = std::collections::BTreeMap::new();
        let mut u = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: idx + 1, msg };
            if let Some((key, value)) = line.split_once('=') {
                if !u.is_empty() {
                    return Err(perr("header line after data".into()));
                }
                header.insert(key.trim().to_string(), (idx + 1, value.trim().to_string()));
            } else {
                u.push(line.parse::<f64>().map_err(|e| perr(format!("bad value `{line}`: {e}")))?);
            }
        }
        let get = |key: &str| {
            header
                .get(key)
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("missing header `{key}`"),
                })
                .map(|(l, v)| (*l, v.as_str()))
        };
        fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T>
        where
            T::Err: fmt::Display,
        {
            v.parse().map_err(|e| Error::Parse {
                line,
                msg: format!("{key}: {e}"),
            })
        }
        let (l, v) = get("mode")?;
        let mode: GridMode = num(l, "mode", v)?;
        let (l, v) = get("n")?;
        let n: usize = num(l, "n", v)?;
        let (l, v) = get("N_theta")?;
        let n_theta: usize = num(l, "N_theta", v)?;
        let resolution = match mode {
            GridMode::Axisym => Resolution::axisym(n_theta),
            GridMode::Full2d => {
                let (l, v) = get("N_lambda")?;
                Resolution::full2d(n_theta, num(l, "N_lambda", v)?)
            }
        };
        let (l, v) = get("p")?;
        let p: f64 = num(l, "p", v)?;
        let (_, v) = get("F")?;
        let spec = CurvatureSpec::parse(v, n)?;
        let (l, v) = get("t")?;
        let t: f64 = num(l, "t", v)?;
        let (l, v) = get("center")?;
        let center = v
            .split(',')
            .map(|c| num::<f64>(l, "center", c.trim()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Checkpoint {
            mode,
            n,
            resolution,
            p,
            spec,
            t,
            center,
            u,
        })
    }
}

pub fn write_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = fs::File::create(path).map_err(io)?;
    file.write_all(checkpoint.to_text().as_bytes()).map_err(io)
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Checkpoint::parse(&text)
}
