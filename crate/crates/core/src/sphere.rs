//! Discretizations of the unit sphere Sⁿ and covariant derivative operators.
//!
//! Two modes are supported:
//!
//! * `Axisym`: rotationally symmetric fields on Sⁿ (any n ≥ 2), sampled at the
//!   cell midpoints θ_i = (i + ½)·π/N_θ. A node stands for the whole (n−1)-sphere
//!   orbit at polar angle θ_i; its representative direction lies in the meridian
//!   half-plane spanned by e₀ (the axis) and e₁.
//! * `Full2d`: latitude–longitude grid on S² with midpoint latitudes and
//!   equispaced periodic longitudes.
//!
//! Directions are x̂ = (cos θ, sin θ cos λ, sin θ sin λ), so the polar axis is
//! the first ambient coordinate. Derivatives are reported in the orthonormal
//! frame (e_θ, e_λ) of the round metric σ.
//!
//! Stencils are centered second-order differences in θ. Regularity at the
//! poles is imposed through ghost values: reflection in axisym mode, and the
//! antipodal-in-longitude row in full2d mode. In full2d mode, first
//! derivatives that get divided by sin θ use fourth-order stencils so the
//! pole rows stay second-order accurate overall.

use std::f64::consts::PI;
use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    Axisym,
    Full2d,
}

impl GridMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            GridMode::Axisym => "axisym",
            GridMode::Full2d => "full2d",
        }
    }
}

impl std::str::FromStr for GridMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "axisym" => Ok(GridMode::Axisym),
            "full2d" => Ok(GridMode::Full2d),
            other => Err(Error::validation("mode", format!("unknown grid mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub n_theta: usize,
    /// Ignored in axisym mode.
    pub n_lambda: usize,
}

impl Resolution {
    pub fn axisym(n_theta: usize) -> Self {
        Resolution { n_theta, n_lambda: 1 }
    }

    pub fn full2d(n_theta: usize, n_lambda: usize) -> Self {
        Resolution { n_theta, n_lambda }
    }
}

/// One real value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        ScalarField(values)
    }

    pub fn from_fn(grid: &SphereGrid, f: impl FnMut(usize) -> f64) -> Self {
        ScalarField((0..grid.len()).map(f).collect())
    }

    pub fn constant(grid: &SphereGrid, value: f64) -> Self {
        ScalarField(vec![value; grid.len()])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn osc(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField(self.0.iter().map(|&x| f(x)).collect())
    }
}

impl Deref for ScalarField {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ScalarField {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// A symmetric n×n matrix in the orthonormal σ-frame at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameMatrix {
    /// diag(radial, tangential, …, tangential) with n − 1 tangential entries.
    Axisym { n: usize, radial: f64, tangential: f64 },
    /// [[tt, tl], [tl, ll]] in the (e_θ, e_λ) frame.
    Full { tt: f64, tl: f64, ll: f64 },
}

impl FrameMatrix {
    pub fn dim(&self) -> usize {
        match *self {
            FrameMatrix::Axisym { n, .. } => n,
            FrameMatrix::Full { .. } => 2,
        }
    }

    pub fn trace(&self) -> f64 {
        match *self {
            FrameMatrix::Axisym { n, radial, tangential } => radial + (n - 1) as f64 * tangential,
            FrameMatrix::Full { tt, ll, .. } => tt + ll,
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        match *self {
            FrameMatrix::Axisym { n, radial, tangential } => {
                radial * radial + (n - 1) as f64 * tangential * tangential
            }
            FrameMatrix::Full { tt, tl, ll } => tt * tt + 2.0 * tl * tl + ll * ll,
        }
    }

    pub fn dense(&self) -> Vec<Vec<f64>> {
        match *self {
            FrameMatrix::Axisym { n, radial, tangential } => (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| match (i == j, i) {
                            (false, _) => 0.0,
                            (true, 0) => radial,
                            (true, _) => tangential,
                        })
                        .collect()
                })
                .collect(),
            FrameMatrix::Full { tt, tl, ll } => vec![vec![tt, tl], vec![tl, ll]],
        }
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = match *self {
            FrameMatrix::Axisym { n, radial, tangential } => {
                let mut v = vec![tangential; n];
                v[0] = radial;
                v
            }
            FrameMatrix::Full { tt, tl, ll } => {
                let mean = 0.5 * (tt + ll);
                let r = (0.5 * (tt - ll)).hypot(tl);
                vec![mean - r, mean + r]
            }
        };
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

#[derive(Debug, Clone)]
pub struct SphereGrid {
    mode: GridMode,
    n: usize,
    n_theta: usize,
    n_lambda: usize,
    h_theta: f64,
    h_lambda: f64,
    theta: Vec<f64>,
    sin_theta: Vec<f64>,
    cos_theta: Vec<f64>,
    lambda: Vec<f64>,
    weights: Vec<f64>,
}

/// Builds a grid; `resolution.n_lambda` must be even in full2d mode.
pub fn make_grid(mode: GridMode, n: usize, resolution: Resolution) -> Result<SphereGrid> {
    if n < 2 {
        return Err(Error::UnsupportedMode(format!("n = {n} (need n >= 2)")));
    }
    if mode == GridMode::Full2d && n != 2 {
        return Err(Error::UnsupportedMode(format!("full2d requires n = 2, got n = {n}")));
    }
    let n_theta = resolution.n_theta;
    if n_theta < MIN_NODES {
        return Err(Error::validation("N_theta", format!("need at least {MIN_NODES} nodes, got {n_theta}")));
    }
    let n_lambda = match mode {
        GridMode::Axisym => 1,
        GridMode::Full2d => {
            let nl = resolution.n_lambda;
            if nl < MIN_NODES || !nl.is_multiple_of(2) {
                return Err(Error::validation(
                    "N_lambda",
                    format!("need an even count of at least {MIN_NODES}, got {nl}"),
                ));
            }
            nl
        }
    };

    let h_theta = PI / n_theta as f64;
    let theta: Vec<f64> = (0..n_theta).map(|i| (i as f64 + 0.5) * h_theta).collect();
    let sin_theta: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
    let cos_theta: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    let h_lambda = 2.0 * PI / n_lambda as f64;
    let lambda: Vec<f64> = (0..n_lambda).map(|j| j as f64 * h_lambda).collect();

    let tw = theta_weights(&theta, n - 1);
    let weights = match mode {
        GridMode::Axisym => {
            let orbit = sphere_area(n - 1);
            tw.iter().map(|w| w * orbit).collect()
        }
        GridMode::Full2d => tw
            .iter()
            .flat_map(|&w| std::iter::repeat_n(w * h_lambda, n_lambda))
            .collect(),
    };

    Ok(SphereGrid {
        mode,
        n,
        n_theta,
        n_lambda,
        h_theta,
        h_lambda,
        theta,
        sin_theta,
        cos_theta,
        lambda,
        weights,
    })
}

/// |Sᵐ|.
pub fn sphere_area(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m - 1) as f64 * sphere_area(m - 2),
    }
}

/// ∫₀^π cos(kθ) sinᵐθ dθ for k = 0..len.
fn sine_power_moments(m: usize, len: usize) -> Vec<f64> {
    let mut i0 = if m.is_multiple_of(2) { PI } else { 2.0 };
    let mut j = if m.is_multiple_of(2) { 2 } else { 3 };
    while j <= m {
        i0 *= (j - 1) as f64 / j as f64;
        j += 2;
    }
    let mut out = vec![0.0; len];
    let mut cur = i0;
    let mut k = 0;
    while k < len {
        out[k] = cur;
        cur *= -((m as f64) - k as f64) / ((m + k + 2) as f64);
        k += 2;
    }
    out
}

/// Weights for ∫₀^π g(θ) sinᵐθ dθ at midpoint nodes, exact for cosine
/// polynomials of degree < N (Fejér-type rule).
fn theta_weights(theta: &[f64], m: usize) -> Vec<f64> {
    let nn = theta.len();
    let moments = sine_power_moments(m, nn);
    theta
        .iter()
        .map(|&t| {
            let mut acc = 0.5 * moments[0];
            for (k, mk) in moments.iter().enumerate().skip(1) {
                if *mk != 0.0 {
                    acc += (k as f64 * t).cos() * mk;
                }
            }
            acc * 2.0 / nn as f64
        })
        .collect()
}

/// Lagrange weights for offsets −1, 0, 1, 2 at local coordinate t ∈ [0, 1).
fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

impl SphereGrid {
    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_lambda(&self) -> usize {
        self.n_lambda
    }

    pub fn resolution(&self) -> Resolution {
        Resolution {
            n_theta: self.n_theta,
            n_lambda: self.n_lambda,
        }
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_lambda
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn h_theta(&self) -> f64 {
        self.h_theta
    }

    pub fn h_lambda(&self) -> f64 {
        self.h_lambda
    }

    /// Smallest geodesic node spacing.
    pub fn h_min(&self) -> f64 {
        match self.mode {
            GridMode::Axisym => self.h_theta,
            GridMode::Full2d => self.h_theta.min(self.sin_theta[0] * self.h_lambda),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn area(&self) -> f64 {
        sphere_area(self.n)
    }

    pub fn theta_row(&self, node: usize) -> usize {
        node / self.n_lambda
    }

    pub fn theta(&self, node: usize) -> f64 {
        self.theta[self.theta_row(node)]
    }

    pub fn lambda(&self, node: usize) -> f64 {
        self.lambda[node % self.n_lambda]
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }

    /// Unit direction of a node in ℝⁿ⁺¹ (the meridian representative in axisym mode).
    pub fn direction(&self, node: usize) -> Vec<f64> {
        let i = self.theta_row(node);
        let (s, c) = (self.sin_theta[i], self.cos_theta[i]);
        let mut d = vec![0.0; self.n + 1];
        d[0] = c;
        match self.mode {
            GridMode::Axisym => d[1] = s,
            GridMode::Full2d => {
                let l = self.lambda(node);
                d[1] = s * l.cos();
                d[2] = s * l.sin();
            }
        }
        d
    }

    /// Unit frame vectors (e_θ, e_λ) at a node. In axisym mode e_λ is the
    /// (n−1)-sphere direction e₂ and carries no derivative information.
    pub fn frame(&self, node: usize) -> (Vec<f64>, Vec<f64>) {
        let i = self.theta_row(node);
        let (s, c) = (self.sin_theta[i], self.cos_theta[i]);
        let mut et = vec![0.0; self.n + 1];
        let mut el = vec![0.0; self.n + 1];
        et[0] = -s;
        match self.mode {
            GridMode::Axisym => {
                et[1] = c;
                el[2] = 1.0;
            }
            GridMode::Full2d => {
                let l = self.lambda(node);
                et[1] = c * l.cos();
                et[2] = c * l.sin();
                el[1] = -l.sin();
                el[2] = l.cos();
            }
        }
        (et, el)
    }

    /// Polar chart coordinates (θ, λ) of a unit (or any nonzero) vector.
    pub fn chart(&self, dir: &[f64]) -> (f64, f64) {
        let rest = dir[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
        let theta = rest.atan2(dir[0]);
        let lambda = match self.mode {
            GridMode::Axisym => 0.0,
            GridMode::Full2d => dir[2].atan2(dir[1]).rem_euclid(2.0 * PI),
        };
        (theta, lambda)
    }

    /// Ghost-aware row lookup: returns the physical row and whether the
    /// longitude is shifted by π.
    fn row(&self, i: isize) -> (usize, bool) {
        let nt = self.n_theta as isize;
        if i < 0 {
            ((-i - 1) as usize, true)
        } else if i >= nt {
            ((2 * nt - 1 - i) as usize, true)
        } else {
            (i as usize, false)
        }
    }

    fn col(&self, j: isize, flipped: bool) -> usize {
        let nl = self.n_lambda as isize;
        let shift = if flipped { nl / 2 } else { 0 };
        (j + shift).rem_euclid(nl) as usize
    }

    /// Field value at extended row i, column j (full2d) or row i (axisym).
    /// `odd` fields change sign across the pole.
    #[inline]
    fn at(&self, f: &[f64], i: isize, j: isize, odd: bool) -> f64 {
        let (r, flipped) = self.row(i);
        let c = if self.n_lambda == 1 { 0 } else { self.col(j, flipped) };
        let v = f[r * self.n_lambda + c];
        if odd && flipped {
            -v
        } else {
            v
        }
    }

    /// Interpolates a field at an arbitrary direction with cubic Lagrange
    /// stencils (tensor product in full2d mode).
    pub fn interpolate(&self, f: &[f64], dir: &[f64]) -> f64 {
        let (theta, lambda) = self.chart(dir);
        let s = theta / self.h_theta - 0.5;
        let base = s.floor();
        let wt = cubic_weights(s - base);
        let i0 = base as isize - 1;
        match self.mode {
            GridMode::Axisym => (0..4).map(|a| wt[a] * self.at(f, i0 + a as isize, 0, false)).sum(),
            GridMode::Full2d => {
                let sl = lambda / self.h_lambda;
                let lbase = sl.floor();
                let wl = cubic_weights(sl - lbase);
                let j0 = lbase as isize - 1;
                let mut acc = 0.0;
                for a in 0..4 {
                    let i = i0 + a as isize;
                    let row: f64 = (0..4).map(|b| wl[b] * self.at(f, i, j0 + b as isize, false)).sum();
                    acc += wt[a] * row;
                }
                acc
            }
        }
    }
}

/// Frame components of the σ-gradient: (∂_θ φ, ∂_λ φ / sin θ).
/// The second component is zero in axisym mode.
pub fn frame_gradient(grid: &SphereGrid, phi: &[f64]) -> Vec<[f64; 2]> {
    let h = grid.h_theta;
    match grid.mode {
        GridMode::Axisym => (0..grid.n_theta)
            .map(|i| {
                let i = i as isize;
                [(grid.at(phi, i + 1, 0, false) - grid.at(phi, i - 1, 0, false)) / (2.0 * h), 0.0]
            })
            .collect(),
        GridMode::Full2d => {
            let dl = lambda_first(grid, phi);
            (0..grid.len())
                .map(|node| {
                    let i = grid.theta_row(node) as isize;
                    let j = (node % grid.n_lambda) as isize;
                    let dt = (grid.at(phi, i + 1, j, false) - grid.at(phi, i - 1, j, false)) / (2.0 * h);
                    [dt, dl[node] / grid.sin_theta[i as usize]]
                })
                .collect()
        }
    }
}

/// Fourth-order ∂_λ on the full2d grid.
fn lambda_first(grid: &SphereGrid, phi: &[f64]) -> Vec<f64> {
    let hl = grid.h_lambda;
    (0..grid.len())
        .map(|node| {
            let i = grid.theta_row(node) as isize;
            let j = (node % grid.n_lambda) as isize;
            let f = |dj: isize| grid.at(phi, i, j + dj, false);
            (8.0 * (f(1) - f(-1)) - (f(2) - f(-2))) / (12.0 * hl)
        })
        .collect()
}

/// σ^{ij} φ_i φ_j at every node.
pub fn gradient_norm_sq(grid: &SphereGrid, phi: &[f64]) -> ScalarField {
    ScalarField(
        frame_gradient(grid, phi)
            .iter()
            .map(|g| g[0] * g[0] + g[1] * g[1])
            .collect(),
    )
}

/// Frame components of the covariant Hessian φ_{;ij} of the round metric.
pub fn covariant_hessian(grid: &SphereGrid, phi: &[f64]) -> Vec<FrameMatrix> {
    let h = grid.h_theta;
    let h2 = h * h;
    match grid.mode {
        GridMode::Axisym => (0..grid.n_theta)
            .map(|i| {
                let ii = i as isize;
                let (m, c, p) = (
                    grid.at(phi, ii - 1, 0, false),
                    phi[i],
                    grid.at(phi, ii + 1, 0, false),
                );
                let cot = grid.cos_theta[i] / grid.sin_theta[i];
                FrameMatrix::Axisym {
                    n: grid.n,
                    radial: ((p - c) + (m - c)) / h2,
                    tangential: cot * (p - m) / (2.0 * h),
                }
            })
            .collect(),
        GridMode::Full2d => {
            let hl = grid.h_lambda;
            let dl = lambda_first(grid, phi);
            let psi: Vec<f64> = (0..grid.len())
                .map(|node| dl[node] / grid.sin_theta[grid.theta_row(node)])
                .collect();
            (0..grid.len())
                .map(|node| {
                    let i = grid.theta_row(node);
                    let ii = i as isize;
                    let j = (node % grid.n_lambda) as isize;
                    let f = |di: isize, dj: isize| grid.at(phi, ii + di, j + dj, false);
                    let c0 = f(0, 0);
                    let tt = ((f(1, 0) - c0) + (f(-1, 0) - c0)) / h2;
                    let tl = (grid.at(&psi, ii + 1, j, true) - grid.at(&psi, ii - 1, j, true)) / (2.0 * h);
                    let dtt4 = (8.0 * (f(1, 0) - f(-1, 0)) - (f(2, 0) - f(-2, 0))) / (12.0 * h);
                    let dll = lambda_second(|dj| f(0, dj), hl);
                    let (s, c) = (grid.sin_theta[i], grid.cos_theta[i]);
                    FrameMatrix::Full {
                        tt,
                        tl,
                        ll: dll / (s * s) + c / s * dtt4,
                    }
                })
                .collect()
        }
    }
}

/// Fourth-order ∂²_λ from values at offsets −2..=2.
#[inline]
fn lambda_second(f: impl Fn(isize) -> f64, hl: f64) -> f64 {
    let c = f(0);
    (16.0 * ((f(1) - c) + (f(-1) - c)) - ((f(2) - c) + (f(-2) - c))) / (12.0 * hl * hl)
}

/// ∫₀^t sinᵐ s ds.
fn sine_power_integral(m: usize, t: f64) -> f64 {
    match m {
        0 => t,
        1 => 1.0 - t.cos(),
        _ => {
            let mf = m as f64;
            -t.sin().powi(m as i32 - 1) * t.cos() / mf + (mf - 1.0) / mf * sine_power_integral(m - 2, t)
        }
    }
}

/// Conservative (flux-form) Laplace–Beltrami operator with exact cell volumes.
pub fn laplace_beltrami(grid: &SphereGrid, phi: &[f64]) -> ScalarField {
    let h = grid.h_theta;
    let m = grid.n - 1;
    let sp = |t: f64| t.sin().powi(m as i32);
    ScalarField::from_fn(grid, |node| {
        let i = grid.theta_row(node);
        let ii = i as isize;
        let j = (node % grid.n_lambda) as isize;
        let t = grid.theta[i];
        let c = phi[node];
        let up = grid.at(phi, ii + 1, j, false);
        let dn = grid.at(phi, ii - 1, j, false);
        let volume = sine_power_integral(m, t + 0.5 * h) - sine_power_integral(m, t - 0.5 * h);
        let radial = (sp(t + 0.5 * h) * (up - c) - sp(t - 0.5 * h) * (c - dn)) / (h * volume);
        match grid.mode {
            GridMode::Axisym => radial,
            GridMode::Full2d => {
                let hl = grid.h_lambda;
                let dll = lambda_second(|dj| grid.at(phi, ii, j + dj, false), hl);
                radial + dll / (grid.sin_theta[i] * grid.sin_theta[i])
            }
        }
    })
}

/// Quadrature sum with a fixed (node) summation order.
pub fn integrate(grid: &SphereGrid, field: &[f64]) -> f64 {
    grid.weights.iter().zip(field).map(|(w, f)| w * f).sum()
}
