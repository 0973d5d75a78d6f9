//! Roundness and pinching diagnostics: oscillation-minimizing centers,
//! circum- and inradius, support functions, pinching ratios and the fitted
//! spherical flow.

mod fit;
pub mod miniball;
pub mod nelder_mead;
mod regraph;

pub use fit::{fit_decay_exponent, fit_radii, sphere_fit, FitSample, SphereFitResult};
pub use regraph::{regraph, regraphed_surface};

use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::hypersurface::{extrinsic, ExtrinsicData, GraphSurface};
use crate::sphere::{GridMode, ScalarField};

use miniball::smallest_enclosing_ball;
use nelder_mead::{minimize, Options};

/// One time sample of the roundness diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub theta: f64,
    /// Oscillation-minimizing center y_t.
    pub center: Vec<f64>,
    /// Extremes of the radial function about y_t.
    pub u_min: f64,
    pub u_max: f64,
    pub osc_u: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    /// Oscillation of the support function about y_t.
    pub osc_support: f64,
    pub v_max: f64,
    pub grad_phi_sq_max: f64,
    /// (δ, sup (κ_max − κ_min)² / H^δ).
    pub pinch: Vec<(f64, f64)>,
    pub w_max: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub kappa_min: f64,
    pub dt: f64,
}

fn mean(values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / weights.iter().sum::<f64>()
}

/// Free coordinates of the center search: the axis coordinate in axisym
/// mode, all of them otherwise.
fn search_dims(surface: &GraphSurface) -> usize {
    match surface.grid().mode() {
        GridMode::Axisym => 1,
        GridMode::Full2d => surface.grid().ambient_dim(),
    }
}

fn lift(surface: &GraphSurface, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; surface.grid().ambient_dim()];
    y[..x.len()].copy_from_slice(x);
    y
}

/// Area-weighted centroid of the embedded nodes.
fn centroid(surface: &GraphSurface) -> Vec<f64> {
    let grid = surface.grid();
    let w = grid.weights();
    let k = search_dims(surface);
    (0..k)
        .map(|a| {
            let coords: Vec<f64> = (0..grid.len()).map(|i| surface.point(i)[a]).collect();
            mean(&coords, w)
        })
        .collect()
}

fn search_options(surface: &GraphSurface) -> Options {
    let scale = mean(surface.u(), surface.grid().weights());
    Options {
        step: 0.05 * scale,
        tol: 1e-10 * scale,
        max_evaluations: 4000,
        restarts: 3,
    }
}

/// Strictly inside the starshaped region bounded by the surface.
fn is_inside(surface: &GraphSurface, y: &[f64]) -> bool {
    let rel: Vec<f64> = y.iter().zip(surface.center()).map(|(a, b)| a - b).collect();
    let r = rel.iter().map(|x| x * x).sum::<f64>().sqrt();
    r == 0.0 || r < surface.grid().interpolate(surface.u(), &rel)
}

/// Center y minimizing osc u_y over interior points, and the oscillation there.
pub fn osc_minimizing_center(surface: &GraphSurface) -> Result<(Vec<f64>, f64)> {
    let objective = |x: &[f64]| match regraph(surface, &lift(surface, x)) {
        Ok(u) => u.osc(),
        Err(_) => f64::INFINITY,
    };
    let mut start = centroid(surface);
    if !objective(&start).is_finite() {
        start = surface.center()[..start.len()].to_vec();
        if !objective(&start).is_finite() {
            return Err(Error::RegraphFailed);
        }
    }
    let m = minimize(objective, &start, search_options(surface));
    Ok((lift(surface, &m.x), m.value))
}

/// Embedded node positions used for the radii. In axisym mode the meridian
/// is mirrored across the axis, which preserves both radii of the full
/// surface of revolution.
fn radius_points(surface: &GraphSurface) -> Vec<Vec<f64>> {
    let grid = surface.grid();
    let pts = (0..grid.len()).map(|i| surface.point(i));
    match grid.mode() {
        GridMode::Axisym => pts.flat_map(|p| [vec![p[0], p[1]], vec![p[0], -p[1]]]).collect(),
        GridMode::Full2d => pts.collect(),
    }
}

/// Circumradius from the exact smallest enclosing ball of the nodes, and
/// inradius as the largest distance from an interior point to the nearest node.
pub fn circumradius_inradius(surface: &GraphSurface) -> Result<(f64, f64)> {
    let pts = radius_points(surface);
    let rho_plus = smallest_enclosing_ball(&pts).radius;
    let nearest = |x: &[f64]| {
        let y = lift(surface, x);
        if !is_inside(surface, &y) {
            return f64::INFINITY;
        }
        -pts.iter()
            .map(|p| p.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    };
    let mut start = centroid(surface);
    if !nearest(&start).is_finite() {
        start = surface.center()[..start.len()].to_vec();
    }
    let m = minimize(nearest, &start, search_options(surface));
    Ok((rho_plus, (-m.value).min(rho_plus)))
}

/// ū_q = ⟨x − q, ν⟩ at every node, with its oscillation.
pub fn support_function(surface: &GraphSurface, q: &[f64]) -> Result<(ScalarField, f64)> {
    let ext = extrinsic(surface)?;
    Ok(support_from(surface, &ext, q))
}

pub(crate) fn support_from(surface: &GraphSurface, ext: &ExtrinsicData, q: &[f64]) -> (ScalarField, f64) {
    let field = ScalarField::new(
        (0..surface.grid().len())
            .map(|i| {
                let x = surface.point(i);
                x.iter().zip(q).zip(&ext.normals[i]).map(|((x, q), nu)| (x - q) * nu).sum()
            })
            .collect(),
    );
    let osc = field.osc();
    (field, osc)
}

/// For each δ, sup over nodes of (κ_max − κ_min)² / H^δ; also max w.
pub fn pinching(surface: &GraphSurface, deltas: &[f64]) -> Result<(Vec<f64>, f64)> {
    pinching_from(&extrinsic(surface)?, deltas)
}

pub fn pinching_from(ext: &ExtrinsicData, deltas: &[f64]) -> Result<(Vec<f64>, f64)> {
    if let Some(node) = ext.mean_curvature.iter().position(|&h| !(h > 0.0)) {
        return Err(Error::NonpositiveH {
            node,
            h: ext.mean_curvature[node],
        });
    }
    let ratios = deltas
        .iter()
        .map(|&delta| {
            (0..ext.len())
                .map(|i| {
                    let k = ext.kappa(i);
                    let spread = k[k.len() - 1] - k[0];
                    spread * spread / ext.mean_curvature[i].powf(delta)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let w_max = ext.w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((ratios, w_max))
}

/// Full diagnostics of one surface.
pub fn diagnose_surface(surface: &GraphSurface, t: f64, theta: f64, dt: f64, deltas: &[f64]) -> Result<DiagnosticsRecord> {
    let ext = extrinsic(surface)?;
    let (center, _) = osc_minimizing_center(surface)?;
    let u_y = regraph(surface, &center)?;
    let (rho_plus, rho_minus) = circumradius_inradius(surface)?;
    let (_, osc_support) = support_from(surface, &ext, &center);
    let (ratios, w_max) = pinching_from(&ext, deltas)?;
    let h = &ext.mean_curvature;
    Ok(DiagnosticsRecord {
        t,
        theta,
        center,
        u_min: u_y.min(),
        u_max: u_y.max(),
        osc_u: u_y.osc(),
        rho_plus,
        rho_minus,
        osc_support,
        v_max: ext.v.iter().copied().fold(1.0, f64::max),
        grad_phi_sq_max: ext.grad_phi_sq_max(),
        pinch: deltas.iter().copied().zip(ratios).collect(),
        w_max,
        h_min: h.iter().copied().fold(f64::INFINITY, f64::min),
        h_max: h.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        kappa_min: ext.kappa_min(),
        dt,
    })
}

pub fn diagnose(state: &FlowState, theta: f64, deltas: &[f64]) -> Result<DiagnosticsRecord> {
    diagnose_surface(&state.surface, state.t, theta, state.dt_last, deltas)
}
