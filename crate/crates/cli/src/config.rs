//! Line-based `key = value` run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;

use icflow::curvature::CurvatureSpec;
use icflow::flow::{default_deltas, FlowConfig, Stop};
use icflow::sphere::{GridMode, Resolution, MIN_NODES};
use icflow::Error;

/// Largest accepted node count per dimension.
pub const MAX_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSurface {
    Sphere { r: f64 },
    /// u = r (1 + Σ a_k cos kθ).
    PerturbedSphere { r: f64, modes: Vec<(u32, f64)> },
    Ellipsoid { a: f64, c: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub p: f64,
    pub spec: CurvatureSpec,
    pub initial: InitialSurface,
    pub mode: GridMode,
    pub n: usize,
    pub resolution: Resolution,
    pub safety: f64,
    pub stop: Stop,
    pub sample_interval: f64,
    pub deltas: Vec<f64>,
    pub csv: PathBuf,
    pub checkpoint_dir: Option<PathBuf>,
    /// Θ-growth between checkpoints; 0 disables them.
    pub checkpoint_every: f64,
    pub seed: u64,
}

const KEYS: &[&str] = &[
    "p",
    "F",
    "initial",
    "mode",
    "n",
    "N_theta",
    "N_lambda",
    "safety",
    "theta_end",
    "t_end",
    "sample_interval",
    "deltas",
    "csv",
    "checkpoint_dir",
    "checkpoint_every",
    "seed",
];

fn invalid(field: &str, msg: impl Into<String>) -> Error {
    Error::Validation {
        field: field.to_string(),
        msg: msg.into(),
    }
}

fn number<T: std::str::FromStr>(field: &str, text: &str) -> Result<T, Error>
where
    T::Err: std::fmt::Display,
{
    text.parse().map_err(|e| invalid(field, format!("`{text}`: {e}")))
}

fn parse_initial(text: &str) -> Result<InitialSurface, Error> {
    let mut words = text.split_whitespace();
    let kind = words.next().unwrap_or("");
    let args: Vec<&str> = words.collect();
    let positive = |s: &str| -> Result<f64, Error> {
        let x: f64 = number("initial", s)?;
        if x.is_finite() && x > 0.0 {
            Ok(x)
        } else {
            Err(invalid("initial", format!("`{s}` must be positive")))
        }
    };
    match (kind, args.as_slice()) {
        ("sphere", [r]) => Ok(InitialSurface::Sphere { r: positive(r)? }),
        ("ellipsoid", [a, c]) => Ok(InitialSurface::Ellipsoid {
            a: positive(a)?,
            c: positive(c)?,
        }),
        ("perturbed_sphere", [r, rest @ ..]) => {
            let modes = rest
                .iter()
                .flat_map(|s| s.split(','))
                .filter(|s| !s.is_empty())
                .map(|m| {
                    let (k, a) = m
                        .split_once(':')
                        .ok_or_else(|| invalid("initial", format!("mode `{m}` is not `wavenumber:amplitude`")))?;
                    Ok((number("initial", k)?, number("initial", a)?))
                })
                .collect::<Result<Vec<(u32, f64)>, Error>>()?;
            let total: f64 = modes.iter().map(|(_, a)| a.abs()).sum();
            if !(total < 1.0) {
                return Err(invalid("initial", "sum of |amplitudes| must be below 1 so that u > 0"));
            }
            Ok(InitialSurface::PerturbedSphere { r: positive(r)?, modes })
        }
        _ => Err(invalid(
            "initial",
            format!("expected `sphere <r>`, `perturbed_sphere <r> <k:a>,...` or `ellipsoid <a> <c>`, got `{text}`"),
        )),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, Error> {
    let mut entries: Vec<(&str, &str)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: idx + 1, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(parse_err(format!("unknown key `{key}`")));
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(parse_err(format!("duplicate key `{key}`")));
        }
        if value.is_empty() {
            return Err(parse_err(format!("missing value for `{key}`")));
        }
        entries.push((key, value));
    }
    let get = |key: &str| entries.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let required = |key: &str| get(key).ok_or_else(|| invalid(key, "required"));

    let p: f64 = number("p", required("p")?)?;
    if !(p.is_finite() && p > 0.0) {
        return Err(invalid("p", format!("need 0 < p < inf, got {p}")));
    }
    let mode: GridMode = match get("mode") {
        Some(m) => m.parse().map_err(|e: Error| invalid("mode", e.to_string()))?,
        None => GridMode::Axisym,
    };
    let n: usize = get("n").map_or(Ok(2), |v| number("n", v))?;
    if n < 2 || (mode == GridMode::Full2d && n != 2) {
        return Err(invalid("n", format!("need n >= 2 (exactly 2 in full2d), got {n}")));
    }
    let spec = CurvatureSpec::parse(required("F")?, n).map_err(|e| invalid("F", e.to_string()))?;
    let initial = parse_initial(required("initial")?)?;

    let range = |field: &str, v: usize| {
        if (MIN_NODES..=MAX_NODES).contains(&v) {
            Ok(v)
        } else {
            Err(invalid(field, format!("need {MIN_NODES}..={MAX_NODES}, got {v}")))
        }
    };
    let n_theta = range("N_theta", get("N_theta").map_or(Ok(64), |v| number("N_theta", v))?)?;
    let resolution = match mode {
        GridMode::Axisym => {
            if get("N_lambda").is_some() {
                return Err(invalid("N_lambda", "only meaningful in full2d mode"));
            }
            Resolution::axisym(n_theta)
        }
        GridMode::Full2d => {
            let nl = range("N_lambda", get("N_lambda").map_or(Ok(2 * n_theta), |v| number("N_lambda", v))?)?;
            if nl % 2 != 0 {
                return Err(invalid("N_lambda", "must be even"));
            }
            Resolution::full2d(n_theta, nl)
        }
    };

    let stop = match (get("theta_end"), get("t_end")) {
        (Some(_), Some(_)) => return Err(invalid("t_end", "give either theta_end or t_end, not both")),
        (None, Some(t)) => Stop::TEnd(number("t_end", t)?),
        (Some(th), None) => Stop::ThetaEnd(number("theta_end", th)?),
        (None, None) => Stop::ThetaEnd(10.0),
    };
    let deltas = match get("deltas") {
        Some(list) => list
            .split(',')
            .map(|d| number::<f64>("deltas", d.trim()))
            .collect::<Result<Vec<_>, _>>()?,
        None => default_deltas(p),
    };
    if deltas.len() != 3 {
        return Err(invalid("deltas", format!("need exactly 3 exponents, got {}", deltas.len())));
    }
    let checkpoint_every: f64 = get("checkpoint_every").map_or(Ok(0.0), |v| number("checkpoint_every", v))?;
    if !(checkpoint_every.is_finite() && checkpoint_every >= 0.0) {
        return Err(invalid("checkpoint_every", "must be >= 0"));
    }
    let checkpoint_dir = get("checkpoint_dir").map(PathBuf::from);
    if checkpoint_every > 0.0 && checkpoint_dir.is_none() {
        return Err(invalid("checkpoint_dir", "required when checkpoint_every > 0"));
    }

    let cfg = RunConfig {
        p,
        spec,
        initial,
        mode,
        n,
        resolution,
        safety: get("safety").map_or(Ok(0.2), |v| number("safety", v))?,
        stop,
        sample_interval: get("sample_interval").map_or(Ok(0.5), |v| number("sample_interval", v))?,
        deltas,
        csv: PathBuf::from(get("csv").unwrap_or("diagnostics.csv")),
        checkpoint_dir,
        checkpoint_every,
        seed: get("seed").map_or(Ok(0), |v| number("seed", v))?,
    };
    cfg.flow_config()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn flow_config(&self) -> Result<FlowConfig, Error> {
        FlowConfig::new(self.spec, self.p, self.stop)?
            .with_safety(self.safety)?
            .with_sample_interval(self.sample_interval)?
            .with_deltas(self.deltas.clone())
    }

    /// Canonical text form: every key, fixed order, round-trip floats.
    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("p", format!("{:?}", self.p));
        line("F", self.spec.to_string());
        line(
            "initial",
            match &self.initial {
                InitialSurface::Sphere { r } => format!("sphere {r:?}"),
                InitialSurface::Ellipsoid { a, c } => format!("ellipsoid {a:?} {c:?}"),
                InitialSurface::PerturbedSphere { r, modes } => {
                    let m: Vec<String> = modes.iter().map(|(k, a)| format!("{k}:{a:?}")).collect();
                    format!("perturbed_sphere {r:?} {}", m.join(",")).trim_end().to_string()
                }
            },
        );
        line("mode", self.mode.as_str().to_string());
        line("n", self.n.to_string());
        line("N_theta", self.resolution.n_theta.to_string());
        if self.mode == GridMode::Full2d {
            line("N_lambda", self.resolution.n_lambda.to_string());
        }
        line("safety", format!("{:?}", self.safety));
        match self.stop {
            Stop::ThetaEnd(x) => line("theta_end", format!("{x:?}")),
            Stop::TEnd(x) => line("t_end", format!("{x:?}")),
        }
        line("sample_interval", format!("{:?}", self.sample_interval));
        let d: Vec<String> = self.deltas.iter().map(|d| format!("{d:?}")).collect();
        line("deltas", d.join(", "));
        line("csv", self.csv.display().to_string());
        if let Some(dir) = &self.checkpoint_dir {
            line("checkpoint_dir", dir.display().to_string());
        }
        line("checkpoint_every", format!("{:?}", self.checkpoint_every));
        line("seed", self.seed.to_string());
        out
    }
}
