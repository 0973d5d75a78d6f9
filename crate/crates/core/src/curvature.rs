//! Admissible curvature functions F(κ) and their cones.
//!
//! Every family is normalized so that F(1, …, 1) = n:
//!
//! * `PowerSigma { k }`: F = n (σ_k(κ) / C(n, k))^{1/k}. For k = 1 this is the
//!   mean curvature H = Σ κ_i with the half-space cone {H > 0}; for k ≥ 2 the
//!   cone is the positive cone Γ₊.
//! * `Harmonic`: F = n² / Σ κ_i⁻¹ on Γ₊.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A symmetric, 1-homogeneous function of the principal curvatures.
///
/// The flow and the invariant suites only talk to curvature functions through
/// this trait, so test fixtures can plug in deliberately broken variants.
pub trait CurvatureFunction {
    fn dim(&self) -> usize;
    fn name(&self) -> String;
    fn in_cone(&self, kappa: &[f64]) -> bool;
    fn value(&self, kappa: &[f64]) -> Result<f64>;
    fn gradient(&self, kappa: &[f64]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    PowerSigma { k: usize },
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurvatureSpec {
    family: Family,
    n: usize,
}

/// Principal curvatures at one point, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalCurvatures(Vec<f64>);

impl PrincipalCurvatures {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|k| !k.is_finite()) {
            return Err(Error::validation("kappa", format!("non-finite entry in {values:?}")));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Ok(PrincipalCurvatures(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl CurvatureSpec {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation("n", format!("need n >= 2, got {n}")));
        }
        if let Family::PowerSigma { k } = family {
            if k == 0 || k > n {
                return Err(Error::validation("F", format!("sigma_k needs 1 <= k <= n = {n}, got k = {k}")));
            }
        }
        Ok(CurvatureSpec { family, n })
    }

    pub fn mean_curvature(n: usize) -> Result<Self> {
        Self::new(Family::PowerSigma { k: 1 }, n)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True when the admissible cone is Γ₊ rather than the half-space {H > 0}.
    pub fn uses_positive_cone(&self) -> bool {
        !matches!(self.family, Family::PowerSigma { k: 1 })
    }

    pub fn evaluate(&self, kappa: &PrincipalCurvatures) -> Result<f64> {
        self.value(kappa.values())
    }

    pub fn gradient_at(&self, kappa: &PrincipalCurvatures) -> Result<Vec<f64>> {
        self.gradient(kappa.values())
    }

    pub fn contains(&self, kappa: &PrincipalCurvatures) -> bool {
        self.in_cone(kappa.values())
    }

    /// Parses the config-file notation `sigma_k:<k>` or `harmonic`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let family: Family = text.parse()?;
        Self::new(family, n)
    }

    fn check_dim(&self, kappa: &[f64]) -> Result<()> {
        if kappa.len() != self.n {
            return Err(Error::validation(
                "kappa",
                format!("expected {} principal curvatures, got {}", self.n, kappa.len()),
            ));
        }
        Ok(())
    }

    fn cone_violation(&self, kappa: &[f64]) -> Error {
        Error::ConeViolation {
            family: self.to_string(),
            kappa: kappa.to_vec(),
        }
    }
}

impl CurvatureFunction for CurvatureSpec {
    fn dim(&self) -> usize {
        self.n
    }

    fn name(&self) -> String {
        self.to_string()
    }

    fn in_cone(&self, kappa: &[f64]) -> bool {
        if kappa.len() != self.n || kappa.iter().any(|k| !k.is_finite()) {
            return false;
        }
        match self.family {
            Family::PowerSigma { k: 1 } => kappa.iter().sum::<f64>() > 0.0,
            _ => kappa.iter().all(|&k| k > 0.0),
        }
    }

    fn value(&self, kappa: &[f64]) -> Result<f64> {
        self.check_dim(kappa)?;
        if !self.in_cone(kappa) {
            return Err(self.cone_violation(kappa));
        }
        let n = self.n as f64;
        Ok(match self.family {
            Family::PowerSigma { k: 1 } => kappa.iter().sum(),
            Family::PowerSigma { k } => {
                let sk = elementary_symmetric(kappa, k)[k];
                n * (sk / binomial(self.n, k)).powf(1.0 / k as f64)
            }
            Family::Harmonic => n * n / kappa.iter().map(|k| k.recip()).sum::<f64>(),
        })
    }

    fn gradient(&self, kappa: &[f64]) -> Result<Vec<f64>> {
        let f = self.value(kappa)?;
        Ok(match self.family {
            Family::PowerSigma { k: 1 } => vec![1.0; self.n],
            Family::PowerSigma { k } => {
                let sk = elementary_symmetric(kappa, k)[k];
                (0..self.n)
                    .map(|i| {
                        let rest: Vec<f64> = kappa
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, &x)| x)
                            .collect();
                        let skm1 = elementary_symmetric(&rest, k - 1)[k - 1];
                        f / k as f64 * skm1 / sk
                    })
                    .collect()
            }
            Family::Harmonic => {
                let n2 = (self.n * self.n) as f64;
                kappa.iter().map(|k| f * f / (n2 * k * k)).collect()
            }
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::PowerSigma { k } => write!(f, "sigma_k:{k}"),
            Family::Harmonic => write!(f, "harmonic"),
        }
    }
}

impl fmt::Display for CurvatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "harmonic" {
            return Ok(Family::Harmonic);
        }
        if let Some(k) = s.strip_prefix("sigma_k:") {
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::validation("F", format!("bad k in `{s}`")))?;
            return Ok(Family::PowerSigma { k });
        }
        Err(Error::validation("F", format!("expected `sigma_k:<k>` or `harmonic`, got `{s}`")))
    }
}

/// e[j] = σ_j(x) for j = 0..=k.
pub(crate) fn elementary_symmetric(x: &[f64], k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &xi in x {
        for j in (1..=k).rev() {
            e[j] += xi * e[j - 1];
        }
    }
    e
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pc(v: &[f64]) -> PrincipalCurvatures {
        PrincipalCurvatures::new(v.to_vec()).unwrap()
    }

    fn sigma(k: usize, n: usize) -> CurvatureSpec {
        CurvatureSpec::new(Family::PowerSigma { k }, n).unwrap()
    }

    fn fd_gradient(f: &dyn CurvatureFunction, kappa: &[f64]) -> Vec<f64> {
        (0..kappa.len())
            .map(|i| {
                let h = 1e-6 * kappa[i].abs().max(1e-3);
                let mut plus = kappa.to_vec();
                let mut minus = kappa.to_vec();
                plus[i] += h;
                minus[i] -= h;
                (f.value(&plus).unwrap() - f.value(&minus).unwrap()) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(sigma(1, 2).evaluate(&pc(&[1.0, 1.0])).unwrap(), 2.0);
        assert!((sigma(2, 2).evaluate(&pc(&[1.0, 4.0])).unwrap() - 4.0).abs() < 1e-15);
        let h = CurvatureSpec::new(Family::Harmonic, 2).unwrap();
        assert!((h.evaluate(&pc(&[1.0, 2.0])).unwrap() - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn normalization_is_exact() {
        for n in 2..=6 {
            let ones = vec![1.0; n];
            for k in 1..=n {
                assert_eq!(sigma(k, n).value(&ones).unwrap(), n as f64, "k={k} n={n}");
            }
            let h = CurvatureSpec::new(Family::Harmonic, n).unwrap();
            assert_eq!(h.value(&ones).unwrap(), n as f64);
        }
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(sigma(1, 3).gradient(&[-0.5, 1.0, 2.0]).unwrap(), vec![1.0; 3]);

        // finite-difference oracle
        let g = sigma(2, 2).gradient(&[1.0, 4.0]).unwrap();
        let fd = fd_gradient(&sigma(2, 2), &[1.0, 4.0]);
        assert!((fd[0] - 2.0).abs() < 1e-8 && (fd[1] - 0.5).abs() < 1e-8);
        assert!((g[0] - fd[0]).abs() < 1e-8 && (g[1] - fd[1]).abs() < 1e-8);

        let k = [2.0, 3.0];
        let fd = fd_gradient(&sigma(2, 2), &k);
        let euler_fd: f64 = k.iter().zip(&fd).map(|(a, b)| a * b).sum();
        assert!((euler_fd - 2.0 * 6f64.sqrt()).abs() < 1e-8);
        let g = sigma(2, 2).gradient(&k).unwrap();
        let euler: f64 = k.iter().zip(&g).map(|(a, b)| a * b).sum();
        assert!((euler - 2.0 * 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn cone_membership() {
        assert!(sigma(1, 2).in_cone(&[-1.0, 3.0]));
        assert!(!sigma(2, 2).in_cone(&[-1.0, 3.0]));
        assert!(sigma(2, 2).in_cone(&[1e-12, 1.0]));
        let f = sigma(2, 2).value(&[1e-12, 1.0]).unwrap();
        assert!((f - 2e-6).abs() < 1e-15);
        assert!(matches!(
            sigma(2, 2).value(&[-1.0, 3.0]),
            Err(Error::ConeViolation { .. })
        ));
        assert!(matches!(
            sigma(1, 2).gradient(&[-3.0, 1.0]),
            Err(Error::ConeViolation { .. })
        ));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(CurvatureSpec::parse("sigma_k:2", 3).unwrap(), sigma(2, 3));
        assert_eq!(CurvatureSpec::parse("harmonic", 2).unwrap().to_string(), "harmonic");
        assert!(CurvatureSpec::parse("sigma_k:4", 3).is_err());
        assert!(CurvatureSpec::parse("gauss", 3).is_err());
    }

    fn specs(n: usize) -> Vec<CurvatureSpec> {
        let mut v: Vec<_> = (1..=n).map(|k| sigma(k, n)).collect();
        v.push(CurvatureSpec::new(Family::Harmonic, n).unwrap());
        v
    }

    proptest! {
        #[test]
        fn homogeneous_symmetric_and_below_h(
            kappa in prop::collection::vec(0.01f64..10.0, 2..6),
            lambda in 0.1f64..10.0,
        ) {
            let n = kappa.len();
            let h: f64 = kappa.iter().sum();
            let mut rev = kappa.clone();
            rev.reverse();
            for spec in specs(n) {
                let f = spec.value(&kappa).unwrap();
                let scaled: Vec<f64> = kappa.iter().map(|k| k * lambda).collect();
                let fl = spec.value(&scaled).unwrap();
                prop_assert!((fl - lambda * f).abs() <= 1e-12 * lambda * f);
                prop_assert!((spec.value(&rev).unwrap() - f).abs() <= 1e-12 * f);
                prop_assert!(f <= h * (1.0 + 1e-12));
            }
        }

        #[test]
        fn monotone_concave_and_euler(
            a in prop::collection::vec(0.01f64..10.0, 3),
            b in prop::collection::vec(0.01f64..10.0, 3),
        ) {
            for spec in specs(3) {
                let g = spec.gradient(&a).unwrap();
                prop_assert!(g.iter().all(|&x| x > 0.0));
                let fa = spec.value(&a).unwrap();
                let euler: f64 = a.iter().zip(&g).map(|(x, y)| x * y).sum();
                prop_assert!((euler - fa).abs() <= 1e-10 * fa);
                let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
                let fb = spec.value(&b).unwrap();
                prop_assert!(spec.value(&mid).unwrap() >= 0.5 * (fa + fb) - 1e-10 * fa);
            }
        }
    }
}
