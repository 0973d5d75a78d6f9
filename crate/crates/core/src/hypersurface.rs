//! Extrinsic geometry of a starshaped hypersurface M = {(u(x), x) : x ∈ Sⁿ}
//! written as a radial graph about a center point.
//!
//! With φ = log u and v² = 1 + |Dφ|²_σ, the mixed second fundamental form is
//!
//! ```text
//! hⁱⱼ = v⁻¹ u⁻¹ (δⁱⱼ − (σ^{ik} − v⁻² φⁱ φᵏ) φ_{kj})
//! ```
//!
//! and curvatures are taken with respect to the inward normal, so a sphere of
//! radius R has κ_i = 1/R.

use std::sync::Arc;

use crate::curvature::{CurvatureFunction, CurvatureSpec, PrincipalCurvatures};
use crate::error::{Error, Result};
use crate::sphere::{covariant_hessian, frame_gradient, FrameMatrix, GridMode, ScalarField, SphereGrid};

#[derive(Debug, Clone)]
pub struct GraphSurface {
    grid: Arc<SphereGrid>,
    u: ScalarField,
    center: Vec<f64>,
}

impl GraphSurface {
    pub fn new(grid: Arc<SphereGrid>, u: ScalarField, center: Vec<f64>) -> Result<Self> {
        if u.len() != grid.len() {
            return Err(Error::validation(
                "u",
                format!("field has {} values, grid has {} nodes", u.len(), grid.len()),
            ));
        }
        if center.len() != grid.ambient_dim() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation("center", format!("need {} finite coordinates", grid.ambient_dim())));
        }
        if grid.mode() == GridMode::Axisym && center[1..].iter().any(|&c| c != 0.0) {
            return Err(Error::validation("center", "axisymmetric graphs need a center on the axis"));
        }
        if let Some(node) = u.iter().position(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::degenerate(node, format!("graph function u = {} is not positive", u[node])));
        }
        Ok(GraphSurface { grid, u, center })
    }

    pub fn sphere(grid: Arc<SphereGrid>, radius: f64) -> Result<Self> {
        let u = ScalarField::constant(&grid, radius);
        let center = vec![0.0; grid.ambient_dim()];
        Self::new(grid, u, center)
    }

    /// u = r (1 + Σ a_k cos(kθ)).
    pub fn perturbed_sphere(grid: Arc<SphereGrid>, radius: f64, modes: &[(u32, f64)]) -> Result<Self> {
        let u = ScalarField::from_fn(&grid, |node| {
            let t = grid.theta(node);
            radius * (1.0 + modes.iter().map(|&(k, a)| a * (k as f64 * t).cos()).sum::<f64>())
        });
        let center = vec![0.0; grid.ambient_dim()];
        Self::new(grid, u, center)
    }

    /// Ellipsoid of revolution with semi-axis `c` along the polar axis and
    /// equatorial semi-axes `a`, graphed about its center.
    pub fn ellipsoid(grid: Arc<SphereGrid>, a: f64, c: f64) -> Result<Self> {
        let u = ScalarField::from_fn(&grid, |node| {
            let x0 = grid.direction(node)[0];
            (x0 * x0 / (c * c) + (1.0 - x0 * x0) / (a * a)).sqrt().recip()
        });
        let center = vec![0.0; grid.ambient_dim()];
        Self::new(grid, u, center)
    }

    /// Sphere of the given radius centered at `sphere_center`, graphed about
    /// the origin. The origin must lie inside the sphere.
    pub fn translated_sphere(grid: Arc<SphereGrid>, radius: f64, sphere_center: &[f64]) -> Result<Self> {
        let d2: f64 = sphere_center.iter().map(|x| x * x).sum();
        if d2 >= radius * radius {
            return Err(Error::validation("center", "graph center must lie inside the sphere"));
        }
        let u = ScalarField::from_fn(&grid, |node| {
            let dir = grid.direction(node);
            let b: f64 = dir.iter().zip(sphere_center).map(|(x, d)| x * d).sum();
            b + (radius * radius - d2 + b * b).sqrt()
        });
        let center = vec![0.0; grid.ambient_dim()];
        Self::new(grid, u, center)
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn u(&self) -> &ScalarField {
        &self.u
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn with_u(&self, u: ScalarField) -> Result<Self> {
        Self::new(self.grid.clone(), u, self.center.clone())
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.with_u(self.u.map(|x| x * factor))
    }

    /// Embedded position of a node.
    pub fn point(&self, node: usize) -> Vec<f64> {
        let r = self.u[node];
        self.grid
            .direction(node)
            .iter()
            .zip(&self.center)
            .map(|(d, c)| c + r * d)
            .collect()
    }
}

/// Per-node curvature data used by the time stepper.
#[derive(Debug, Clone)]
pub(crate) struct CurvatureFields {
    pub n: usize,
    pub v: Vec<f64>,
    /// Ascending principal curvatures, `n` per node.
    pub kappa: Vec<f64>,
    pub grad: Vec<[f64; 2]>,
    pub shape: Vec<FrameMatrix>,
}

impl CurvatureFields {
    pub fn kappa(&self, node: usize) -> &[f64] {
        &self.kappa[node * self.n..(node + 1) * self.n]
    }
}

fn shape_operator(hess: &FrameMatrix, g: [f64; 2], u: f64, v: f64) -> FrameMatrix {
    let scale = 1.0 / (v * u);
    match *hess {
        FrameMatrix::Axisym { n, radial, tangential } => FrameMatrix::Axisym {
            n,
            radial: scale * (1.0 - radial / (v * v)),
            tangential: scale * (1.0 - tangential),
        },
        FrameMatrix::Full { tt, tl, ll } => {
            // A = I − v⁻² g gᵀ; symmetrize A·Hess as A^{1/2} Hess A^{1/2}.
            let gn = g[0].hypot(g[1]);
            let (a, b, d) = if gn > 0.0 {
                let (e0, e1) = (g[0] / gn, g[1] / gn);
                let s = 1.0 / v - 1.0;
                (1.0 + s * e0 * e0, s * e0 * e1, 1.0 + s * e1 * e1)
            } else {
                (1.0, 0.0, 1.0)
            };
            // R = A^{1/2} = [[a, b], [b, d]]; S = R H R.
            let (h00, h01, h11) = (tt, tl, ll);
            let m00 = a * h00 + b * h01;
            let m01 = a * h01 + b * h11;
            let m10 = b * h00 + d * h01;
            let m11 = b * h01 + d * h11;
            let s00 = m00 * a + m01 * b;
            let s01 = m00 * b + m01 * d;
            let s11 = m10 * b + m11 * d;
            FrameMatrix::Full {
                tt: scale * (1.0 - s00),
                tl: -scale * s01,
                ll: scale * (1.0 - s11),
            }
        }
    }
}

pub(crate) fn curvature_fields(surface: &GraphSurface) -> Result<CurvatureFields> {
    let grid = surface.grid();
    let n = grid.n();
    let u = surface.u();
    if let Some(node) = u.iter().position(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(Error::degenerate(node, format!("graph function u = {} is not positive", u[node])));
    }
    let phi: Vec<f64> = u.iter().map(|x| x.ln()).collect();
    let grad = frame_gradient(grid, &phi);
    let hess = covariant_hessian(grid, &phi);
    let mut v = Vec::with_capacity(grid.len());
    let mut kappa = Vec::with_capacity(grid.len() * n);
    let mut shape = Vec::with_capacity(grid.len());
    for node in 0..grid.len() {
        let g = grad[node];
        let vi = (1.0 + g[0] * g[0] + g[1] * g[1]).sqrt();
        let h = shape_operator(&hess[node], g, u[node], vi);
        let ev = h.eigenvalues();
        if !vi.is_finite() || ev.iter().any(|k| !k.is_finite()) {
            return Err(Error::degenerate(node, "non-finite curvature"));
        }
        v.push(vi);
        kappa.extend_from_slice(&ev);
        shape.push(h);
    }
    Ok(CurvatureFields { n, v, kappa, grad, shape })
}

#[derive(Debug, Clone)]
pub struct ExtrinsicData {
    n: usize,
    pub v: Vec<f64>,
    /// Outward unit normals in ℝⁿ⁺¹.
    pub normals: Vec<Vec<f64>>,
    kappa: Vec<f64>,
    /// Symmetrized shape operator in the σ-frame.
    pub shape: Vec<FrameMatrix>,
    pub mean_curvature: Vec<f64>,
    /// ‖A‖² − H²/n.
    pub w: Vec<f64>,
    /// Frame gradient of φ = log u.
    pub grad_phi: Vec<[f64; 2]>,
}

impl ExtrinsicData {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Ascending principal curvatures at a node.
    pub fn kappa(&self, node: usize) -> &[f64] {
        &self.kappa[node * self.n..(node + 1) * self.n]
    }

    pub fn principal_curvatures(&self, node: usize) -> PrincipalCurvatures {
        PrincipalCurvatures::new(self.kappa(node).to_vec()).expect("finite curvatures")
    }

    pub fn kappa_min(&self) -> f64 {
        (0..self.len()).map(|i| self.kappa(i)[0]).fold(f64::INFINITY, f64::min)
    }

    pub fn grad_phi_sq_max(&self) -> f64 {
        self.grad_phi
            .iter()
            .map(|g| g[0] * g[0] + g[1] * g[1])
            .fold(0.0, f64::max)
    }
}

pub fn extrinsic(surface: &GraphSurface) -> Result<ExtrinsicData> {
    let fields = curvature_fields(surface)?;
    let grid = surface.grid();
    let n = fields.n;
    let normals = (0..grid.len())
        .map(|node| {
            let dir = grid.direction(node);
            let (et, el) = grid.frame(node);
            let g = fields.grad[node];
            let v = fields.v[node];
            (0..=n).map(|a| (dir[a] - g[0] * et[a] - g[1] * el[a]) / v).collect()
        })
        .collect();
    let mut mean_curvature = Vec::with_capacity(grid.len());
    let mut w = Vec::with_capacity(grid.len());
    for node in 0..grid.len() {
        let k = fields.kappa(node);
        let h: f64 = k.iter().sum();
        let a2: f64 = k.iter().map(|x| x * x).sum();
        mean_curvature.push(h);
        w.push(a2 - h * h / n as f64);
    }
    Ok(ExtrinsicData {
        n,
        v: fields.v,
        normals,
        kappa: fields.kappa,
        shape: fields.shape,
        mean_curvature,
        w,
        grad_phi: fields.grad,
    })
}

/// First node whose curvatures leave the admissible set, if any.
pub fn first_inadmissible(kappa: impl Fn(usize) -> Vec<f64>, len: usize, f: &dyn CurvatureFunction, p: f64) -> Option<usize> {
    (0..len).find(|&node| {
        let k = kappa(node);
        !f.in_cone(&k) || (p > 1.0 && k.iter().any(|&x| x <= 0.0))
    })
}

/// Whether every node's curvatures lie in the cone of `spec` (and are all
/// positive when p > 1).
pub fn admissible(surface: &GraphSurface, spec: &CurvatureSpec, p: f64) -> Result<bool> {
    let fields = curvature_fields(surface)?;
    Ok(first_inadmissible(|i| fields.kappa(i).to_vec(), surface.grid().len(), spec, p).is_none())
}

#[derive(Debug, Clone)]
pub struct Embedding {
    pub points: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
}

pub fn embed(surface: &GraphSurface) -> Result<Embedding> {
    let ext = extrinsic(surface)?;
    Ok(Embedding {
        points: (0..surface.grid().len()).map(|i| surface.point(i)).collect(),
        normals: ext.normals,
    })
}
