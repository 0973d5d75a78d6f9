//! Re-expressing a starshaped graph about a different center.

use crate::error::{Error, Result};
use crate::hypersurface::GraphSurface;
use crate::sphere::ScalarField;

const ROOT_TOL: f64 = 1e-12;

/// Radial function u_y of the surface about `y`: for every grid direction x̂,
/// the distance ρ with y + ρx̂ on the surface. Fails if `y` is not strictly
/// inside the surface.
pub fn regraph(surface: &GraphSurface, y: &[f64]) -> Result<ScalarField> {
    let grid = surface.grid();
    let c = surface.center();
    let u = surface.u();
    let offset: Vec<f64> = y.iter().zip(c).map(|(a, b)| a - b).collect();
    let dist = offset.iter().map(|x| x * x).sum::<f64>().sqrt();
    if dist == 0.0 {
        return Ok(u.clone());
    }
    let (umin, umax) = (u.min(), u.max());

    let mut rel = vec![0.0; offset.len()];
    let mut gap = |dir: &[f64], rho: f64| {
        for ((r, o), d) in rel.iter_mut().zip(&offset).zip(dir) {
            *r = o + rho * d;
        }
        let norm = rel.iter().map(|x| x * x).sum::<f64>().sqrt();
        norm - grid.interpolate(u, &rel)
    };

    let mut out = Vec::with_capacity(grid.len());
    for node in 0..grid.len() {
        let dir = grid.direction(node);
        let mut lo = (umin - dist).max(0.0);
        let mut hi = umax + dist;
        let mut glo = gap(&dir, lo);
        let mut ghi = gap(&dir, hi);
        if !(glo < 0.0) {
            return Err(Error::RegraphFailed);
        }
        if ghi <= 0.0 {
            hi *= 2.0;
            ghi = gap(&dir, hi);
            if ghi <= 0.0 {
                return Err(Error::RegraphFailed);
            }
        }
        // Illinois variant of regula falsi.
        let mut side = 0i8;
        let mut rho = lo;
        for _ in 0..200 {
            rho = (lo * ghi - hi * glo) / (ghi - glo);
            if !(rho > lo && rho < hi) {
                rho = 0.5 * (lo + hi);
            }
            let g = gap(&dir, rho);
            if g == 0.0 {
                break;
            }
            if g < 0.0 {
                lo = rho;
                glo = g;
                if side == -1 {
                    ghi *= 0.5;
                }
                side = -1;
            } else {
                hi = rho;
                ghi = g;
                if side == 1 {
                    glo *= 0.5;
                }
                side = 1;
            }
            if hi - lo <= ROOT_TOL * hi {
                rho = 0.5 * (lo + hi);
                break;
            }
        }
        out.push(rho);
    }
    Ok(ScalarField::new(out))
}

/// The same surface graphed about `y`.
pub fn regraphed_surface(surface: &GraphSurface, y: &[f64]) -> Result<GraphSurface> {
    let u = regraph(surface, y)?;
    GraphSurface::new(surface.grid_arc().clone(), u, y.to_vec())
}
