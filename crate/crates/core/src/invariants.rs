//! Randomized invariant suites that can be run outside the test harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{CurvatureFunction, CurvatureSpec, Family};
use crate::error::Result;
use crate::flow::{reference_radius, step, FlowConfig, FlowState, Stop};
use crate::hypersurface::{extrinsic, GraphSurface};
use crate::sphere::{covariant_hessian, gradient_norm_sq, integrate, make_grid, GridMode, Resolution, ScalarField};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, worst: f64, tol: f64) -> Self {
        Check {
            name: name.to_string(),
            passed: worst <= tol,
            detail: format!("worst {worst:.3e} (tol {tol:.0e})"),
        }
    }
}

/// First failing check, if any.
pub fn first_failure(checks: &[Check]) -> Option<&Check> {
    checks.iter().find(|c| !c.passed)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// A random, well-conditioned point of the cone of `f`.
fn cone_point(rng: &mut ChaCha8Rng, f: &dyn CurvatureFunction, positive: bool) -> Vec<f64> {
    let n = f.dim();
    loop {
        let k: Vec<f64> = if positive {
            (0..n).map(|_| rng.gen_range(-3.0f64..3.0).exp()).collect()
        } else {
            (0..n).map(|_| rng.gen_range(-2.0..4.0)).collect()
        };
        // Keep half-space samples away from H = 0, where relative errors
        // measure cancellation in the sum rather than the function.
        let h: f64 = k.iter().sum();
        let l1: f64 = k.iter().map(|x| x.abs()).sum();
        if f.in_cone(&k) && h >= 0.05 * l1 {
            return k;
        }
    }
}

/// Normalization, homogeneity, symmetry, Euler relation, monotonicity,
/// concavity and F ≤ H on `samples` random cone points. `positive` restricts
/// sampling to Γ₊.
pub fn curvature_checks(f: &dyn CurvatureFunction, positive: bool, samples: usize, seed: u64) -> Vec<Check> {
    let n = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..samples).map(|_| cone_point(&mut rng, f, positive)).collect();
    let value = |k: &[f64]| f.value(k).unwrap_or(f64::NAN);
    let nan_worst = |x: f64| if x.is_nan() { f64::INFINITY } else { x };

    let normalization = {
        let v = value(&vec![1.0; n]);
        nan_worst((v - n as f64).abs())
    };

    let mut homogeneity: f64 = 0.0;
    let mut symmetry: f64 = 0.0;
    let mut euler: f64 = 0.0;
    let mut monotone: f64 = 0.0;
    let mut concavity: f64 = 0.0;
    let mut below: f64 = 0.0;
    for (i, k) in points.iter().enumerate() {
        let fk = value(k);
        let lambda = rng.gen_range(0.1..10.0);
        let scaled: Vec<f64> = k.iter().map(|x| lambda * x).collect();
        homogeneity = homogeneity.max(nan_worst(rel(value(&scaled), lambda * fk)));

        let mut perm = k.clone();
        for j in (1..n).rev() {
            perm.swap(j, rng.gen_range(0..=j));
        }
        symmetry = symmetry.max(nan_worst(rel(value(&perm), fk)));

        match f.gradient(k) {
            Ok(g) => {
                let dot: f64 = g.iter().zip(k).map(|(a, b)| a * b).sum();
                euler = euler.max(nan_worst(rel(dot, fk)));
                let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
                if !(gmin > 0.0) {
                    monotone = f64::INFINITY;
                }
            }
            Err(_) => {
                euler = f64::INFINITY;
                monotone = f64::INFINITY;
            }
        }

        let other = &points[(i + 1) % points.len()];
        let mid: Vec<f64> = k.iter().zip(other).map(|(a, b)| 0.5 * (a + b)).collect();
        let gap = 0.5 * (fk + value(other)) - value(&mid);
        concavity = concavity.max(nan_worst(gap / fk));

        let h: f64 = k.iter().sum();
        below = below.max(nan_worst((fk - h) / h));
    }

    vec![
        Check::new("normalization", normalization, 0.0),
        Check::new("homogeneity", homogeneity, 1e-12),
        Check::new("symmetry", symmetry, 1e-12),
        Check::new("euler", euler, 1e-10),
        Check {
            name: "monotonicity".into(),
            passed: monotone == 0.0,
            detail: format!("{samples} points"),
        },
        Check::new("concavity", concavity, 1e-10),
        Check::new("below_mean", below, 1e-12),
    ]
}

/// Every built-in curvature family for n = 2..=4, with `samples` points each.
pub fn builtin_curvature_checks(samples: usize, seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 2..=4 {
        let mut specs: Vec<CurvatureSpec> = (1..=n)
            .map(|k| CurvatureSpec::new(Family::PowerSigma { k }, n).expect("valid"))
            .collect();
        specs.push(CurvatureSpec::new(Family::Harmonic, n).expect("valid"));
        for spec in specs {
            for mut c in curvature_checks(&spec, spec.uses_positive_cone(), samples, seed ^ n as u64) {
                c.detail = format!("{spec} n={n}: {}", c.detail);
                out.push(c);
            }
        }
    }
    merge(out)
}

/// Collapses checks with the same name, keeping the first failure.
fn merge(checks: Vec<Check>) -> Vec<Check> {
    let mut out: Vec<Check> = Vec::new();
    for c in checks {
        match out.iter_mut().find(|o| o.name == c.name) {
            Some(o) if o.passed && !c.passed => *o = c,
            Some(_) => {}
            None => out.push(c),
        }
    }
    out
}

/// Grid, geometry and spherical-flow sanity checks.
pub fn geometry_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut area: f64 = 0.0;
    for n in 2..=4 {
        let g = make_grid(GridMode::Axisym, n, Resolution::axisym(64))?;
        area = area.max(rel(g.weights().iter().sum(), g.area()));
    }
    let g = make_grid(GridMode::Full2d, 2, Resolution::full2d(32, 64))?;
    area = area.max(rel(g.weights().iter().sum(), g.area()));
    out.push(Check::new("quadrature", area, 1e-8));

    let constants = {
        let g = make_grid(GridMode::Full2d, 2, Resolution::full2d(24, 48))?;
        let c = vec![0.731; g.len()];
        let grad = gradient_norm_sq(&g, &c).max().abs();
        let hess = covariant_hessian(&g, &c)
            .iter()
            .map(|h| h.frobenius_sq())
            .fold(0.0, f64::max);
        grad.max(hess)
    };
    out.push(Check::new("constants", constants, 0.0));

    let odd = {
        let g = make_grid(GridMode::Axisym, 2, Resolution::axisym(64))?;
        let f = ScalarField::from_fn(&g, |i| g.theta(i).cos());
        integrate(&g, &f).abs()
    };
    out.push(Check::new("odd_integral", odd, 1e-8));

    let umbilic = {
        let g = std::sync::Arc::new(make_grid(GridMode::Full2d, 2, Resolution::full2d(16, 32))?);
        let e = extrinsic(&GraphSurface::sphere(g, 1.7)?)?;
        (0..e.len())
            .flat_map(|i| e.kappa(i).to_vec())
            .map(|k| (k - 1.0 / 1.7).abs())
            .fold(e.w.iter().copied().fold(0.0, f64::max), f64::max)
    };
    out.push(Check::new("sphere_curvature", umbilic, 1e-14));

    let g = std::sync::Arc::new(make_grid(GridMode::Axisym, 2, Resolution::axisym(32))?);
    let cfg = FlowConfig::new(CurvatureSpec::mean_curvature(2)?, 1.0, Stop::TEnd(1.0))?;
    let mut s = FlowState::new(GraphSurface::sphere(g, 1.0)?, &cfg)?;
    for _ in 0..50 {
        s = step(&s, &cfg)?;
    }
    let theta = reference_radius(s.t, 1.0, 2, 1.0)?;
    out.push(Check::new("sphere_roundness", s.u().osc() / theta, 1e-12));
    out.push(Check::new("sphere_radius", rel(s.u()[0], theta), 1e-6));
    Ok(out)
}

/// The full suite used by the `check` command.
pub fn all_checks(samples: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = builtin_curvature_checks(samples, seed);
    out.extend(geometry_checks()?);
    Ok(out)
}

/// F = √(n Σκ²): normalized, symmetric, homogeneous and monotone on Γ₊, but
/// convex. Used to confirm the suites catch a broken concavity property.
#[derive(Debug, Clone, Copy)]
pub struct RmsCurvature {
    pub n: usize,
}

impl CurvatureFunction for RmsCurvature {
    fn dim(&self) -> usize {
        self.n
    }

    fn name(&self) -> String {
        "rms".into()
    }

    fn in_cone(&self, kappa: &[f64]) -> bool {
        kappa.len() == self.n && kappa.iter().all(|&k| k > 0.0)
    }

    fn value(&self, kappa: &[f64]) -> Result<f64> {
        Ok((self.n as f64 * kappa.iter().map(|k| k * k).sum::<f64>()).sqrt())
    }

    fn gradient(&self, kappa: &[f64]) -> Result<Vec<f64>> {
        let f = self.value(kappa)?;
        Ok(kappa.iter().map(|k| self.n as f64 * k / f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_families_pass() {
        let checks = all_checks(2000, 7).unwrap();
        assert!(first_failure(&checks).is_none(), "{:?}", first_failure(&checks));
    }

    #[test]
    fn rms_fixture_fails_concavity_first() {
        let checks = curvature_checks(&RmsCurvature { n: 3 }, true, 500, 1);
        let fail = first_failure(&checks).unwrap();
        assert_eq!(fail.name, "concavity");
        assert!(checks.iter().take(5).all(|c| c.passed));
    }
}
