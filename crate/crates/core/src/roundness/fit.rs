//! Sphere fitting and power-law decay fits.

use crate::error::{Error, Result};
use crate::flow::{inverse_reference, reference_radius};
use crate::hypersurface::{extrinsic, GraphSurface};

use super::{osc_minimizing_center, regraph, support_from};

/// Upper, lower and averaged initial radii (R̄ᵏ, R̲ₖ, Rᵏ) of the spherical
/// flows through sup u and inf u at each sample time.
pub fn fit_radii(times: &[f64], sup: &[f64], inf: &[f64], n: usize, p: f64) -> Result<Vec<(f64, f64, f64)>> {
    times
        .iter()
        .zip(sup.iter().zip(inf))
        .map(|(&t, (&hi, &lo))| {
            let upper = inverse_reference(hi, t, n, p)?;
            let lower = inverse_reference(lo, t, n, p)?;
            Ok((upper, lower, 0.5 * (upper + lower)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSample {
    pub t: f64,
    pub r_upper: f64,
    pub r_lower: f64,
    pub r_mean: f64,
    /// Radius of the fitted sphere at time t.
    pub r_t: f64,
    /// max |u_Q − R_t| over nodes.
    pub hausdorff: f64,
    pub scaled_hausdorff: f64,
    /// Oscillation of the support function about Q.
    pub osc_support: f64,
    pub kappa_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereFitResult {
    pub q: Vec<f64>,
    pub r_star: f64,
    pub samples: Vec<FitSample>,
}

impl SphereFitResult {
    /// Index of the first sample with all principal curvatures positive.
    pub fn first_convex(&self) -> Option<usize> {
        self.samples.iter().position(|s| s.kappa_min > 0.0)
    }
}

/// Fits the spherical flow S_t = ∂B(Q, R(t, R*)) to sampled surfaces. Q is
/// `q_hint` if given, otherwise the oscillation-minimizing center of the last
/// sample.
pub fn sphere_fit(samples: &[(f64, GraphSurface)], n: usize, p: f64, q_hint: Option<&[f64]>) -> Result<SphereFitResult> {
    if samples.len() < 3 {
        return Err(Error::DegenerateSeries(format!(
            "sphere fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    let q = match q_hint {
        Some(q) => q.to_vec(),
        None => osc_minimizing_center(&samples[samples.len() - 1].1)?.0,
    };
    let mut times = Vec::with_capacity(samples.len());
    let mut sup = Vec::with_capacity(samples.len());
    let mut inf = Vec::with_capacity(samples.len());
    let mut graphs = Vec::with_capacity(samples.len());
    for (t, surface) in samples {
        let u_q = regraph(surface, &q)?;
        times.push(*t);
        sup.push(u_q.max());
        inf.push(u_q.min());
        graphs.push(u_q);
    }
    let radii = fit_radii(&times, &sup, &inf, n, p)?;
    let r_star = radii[radii.len() - 1].2;

    let mut out = Vec::with_capacity(samples.len());
    for (((t, surface), u_q), (r_upper, r_lower, r_mean)) in samples.iter().zip(&graphs).zip(radii) {
        let r_t = reference_radius(*t, r_star, n, p)?;
        let hausdorff = u_q.iter().map(|u| (u - r_t).abs()).fold(0.0, f64::max);
        let ext = extrinsic(surface)?;
        let (_, osc_support) = support_from(surface, &ext, &q);
        out.push(FitSample {
            t: *t,
            r_upper,
            r_lower,
            r_mean,
            r_t,
            hausdorff,
            scaled_hausdorff: hausdorff * r_t.powf(p / 2.0),
            osc_support,
            kappa_min: ext.kappa_min(),
        });
    }
    Ok(SphereFitResult { q, r_star, samples: out })
}

/// Least-squares line through (log Θ, log q); returns the slope and the
/// constant exp(intercept).
pub fn fit_decay_exponent(series: &[(f64, f64)]) -> Result<(f64, f64)> {
    if series.len() < 5 {
        return Err(Error::DegenerateSeries(format!("need at least 5 points, got {}", series.len())));
    }
    if let Some(&(theta, q)) = series.iter().find(|&&(theta, q)| !(q > 0.0 && theta > 0.0 && q.is_finite())) {
        return Err(Error::DegenerateSeries(format!("nonpositive sample q = {q} at Theta = {theta}")));
    }
    if series.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::DegenerateSeries("Theta must be strictly increasing".into()));
    }
    let m = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|s| s.1.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let slope = sxy / sxx;
    Ok((slope, (ybar - slope * xbar).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::reference_radius;

    fn series(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..40).map(|i| 2.0 * 1.1f64.powi(i)).map(|t| (t, f(t))).collect()
    }

    #[test]
    fn exact_power_laws() {
        let (s, _) = fit_decay_exponent(&series(|t| 1.0 / t)).unwrap();
        assert!((s + 1.0).abs() < 1e-12);
        let (s, c) = fit_decay_exponent(&series(|t| 3.0 / t.sqrt())).unwrap();
        assert!((s + 0.5).abs() < 1e-12 && (c - 3.0).abs() < 1e-10);
    }

    #[test]
    fn log_periodic_noise() {
        let (s, _) = fit_decay_exponent(&series(|t| (1.0 + 0.01 * t.ln().sin()) / t)).unwrap();
        assert!((s + 1.0).abs() < 0.02);
    }

    #[test]
    fn degenerate_series() {
        assert!(fit_decay_exponent(&series(|t| 1.0 / t)[..4]).is_err());
        assert!(fit_decay_exponent(&series(|t| if t > 5.0 { 0.0 } else { 1.0 })).is_err());
        let mut s = series(|t| 1.0 / t);
        s.swap(2, 3);
        assert!(fit_decay_exponent(&s).is_err());
    }

    #[test]
    fn nested_spherical_flows_do_not_converge() {
        for p in [0.5, 1.0, 2.0] {
            let times: Vec<f64> = (0..6).map(|k| 0.05 * k as f64).collect();
            let sup: Vec<f64> = times.iter().map(|&t| reference_radius(t, 1.1, 2, p).unwrap()).collect();
            let inf: Vec<f64> = times.iter().map(|&t| reference_radius(t, 1.0, 2, p).unwrap()).collect();
            let radii = fit_radii(&times, &sup, &inf, 2, p).unwrap();
            for (hi, lo, mean) in radii {
                assert!((hi - lo - 0.1).abs() < 1e-12);
                assert!(mean > 1.0 && mean < 1.1);
            }
        }
    }
}
