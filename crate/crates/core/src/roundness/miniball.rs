//! Smallest enclosing ball of a point cloud (Welzl's algorithm).

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        if self.radius < 0.0 {
            return false;
        }
        let d2: f64 = p.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum();
        d2.sqrt() <= self.radius * (1.0 + 1e-13) + 1e-300
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Smallest ball with every support point on its boundary.
fn circumball(support: &[&[f64]], dim: usize) -> Ball {
    match support.len() {
        0 => Ball {
            center: vec![0.0; dim],
            radius: -1.0,
        },
        1 => Ball {
            center: support[0].to_vec(),
            radius: 0.0,
        },
        k => {
            let p0 = support[0];
            let rel: Vec<Vec<f64>> = support[1..]
                .iter()
                .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
                .collect();
            let m = k - 1;
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            let gram = DMatrix::from_fn(m, m, |i, j| 2.0 * dot(&rel[i], &rel[j]));
            let rhs = DVector::from_fn(m, |i, _| dot(&rel[i], &rel[i]));
            match gram.lu().solve(&rhs) {
                Some(lambda) if lambda.iter().all(|x| x.is_finite()) => {
                    let mut center = p0.to_vec();
                    for (l, r) in lambda.iter().zip(&rel) {
                        for (c, x) in center.iter_mut().zip(r) {
                            *c += l * x;
                        }
                    }
                    let radius = support.iter().map(|p| dist(p, &center)).fold(0.0, f64::max);
                    Ball { center, radius }
                }
                _ => {
                    // Affinely dependent support: fall back to the widest pair.
                    let mut best = (0, 0, -1.0);
                    for i in 0..k {
                        for j in i + 1..k {
                            let d = dist(support[i], support[j]);
                            if d > best.2 {
                                best = (i, j, d);
                            }
                        }
                    }
                    let center = support[best.0]
                        .iter()
                        .zip(support[best.1])
                        .map(|(a, b)| 0.5 * (a + b))
                        .collect();
                    Ball {
                        center,
                        radius: 0.5 * best.2,
                    }
                }
            }
        }
    }
}

fn welzl<'a>(points: &[&'a [f64]], end: usize, support: &mut Vec<&'a [f64]>, dim: usize) -> Ball {
    let mut ball = circumball(support, dim);
    if support.len() == dim + 1 {
        return ball;
    }
    for i in 0..end {
        if !ball.contains(points[i]) {
            support.push(points[i]);
            ball = welzl(points, i, support, dim);
            support.pop();
        }
    }
    ball
}

/// Exact smallest enclosing ball; the point order is shuffled with a fixed
/// seed so the result is reproducible.
pub fn smallest_enclosing_ball(points: &[Vec<f64>]) -> Ball {
    let dim = points.first().map_or(0, Vec::len);
    let mut refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    refs.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
    let mut support = Vec::with_capacity(dim + 1);
    welzl(&refs, refs.len(), &mut support, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Smallest circle through two or three of the points that contains all
    /// of them, by exhaustive enumeration.
    fn brute_force_2d(points: &[Vec<f64>]) -> f64 {
        let encloses = |c: [f64; 2], r: f64| points.iter().all(|p| dist(p, &c) <= r * (1.0 + 1e-12) + 1e-15);
        let mut best = f64::INFINITY;
        let m = points.len();
        for i in 0..m {
            for j in i + 1..m {
                let (a, b) = (&points[i], &points[j]);
                let c = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                let r = 0.5 * dist(a, b);
                if r < best && encloses(c, r) {
                    best = r;
                }
                for k in j + 1..m {
                    let q = &points[k];
                    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
                    let (cx, cy) = (q[0] - a[0], q[1] - a[1]);
                    let d = 2.0 * (bx * cy - by * cx);
                    if d.abs() < 1e-14 {
                        continue;
                    }
                    let (b2, c2) = (bx * bx + by * by, cx * cx + cy * cy);
                    let ux = (cy * b2 - by * c2) / d;
                    let uy = (bx * c2 - cx * b2) / d;
                    let r = ux.hypot(uy);
                    if r < best && encloses([a[0] + ux, a[1] + uy], r) {
                        best = r;
                    }
                }
            }
        }
        best
    }

    #[test]
    fn simple_configurations() {
        let b = smallest_enclosing_ball(&[vec![0.0, 0.0], vec![2.0, 0.0]]);
        assert!((b.radius - 1.0).abs() < 1e-15 && (b.center[0] - 1.0).abs() < 1e-15);

        // Obtuse triangle: the ball is set by the longest edge.
        let b = smallest_enclosing_ball(&[vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.5]]);
        assert!((b.radius - 2.0).abs() < 1e-14);

        let cube: Vec<Vec<f64>> = (0..8)
            .map(|m| (0..3).map(|b| if m >> b & 1 == 1 { 1.0 } else { -1.0 }).collect())
            .collect();
        let b = smallest_enclosing_ball(&cube);
        assert!((b.radius - 3f64.sqrt()).abs() < 1e-14);
        assert!(b.center.iter().all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn points_on_a_sphere() {
        let mut pts = Vec::new();
        for i in 0..20 {
            for j in 0..40 {
                let t = (i as f64 + 0.5) * std::f64::consts::PI / 20.0;
                let l = j as f64 * std::f64::consts::PI / 20.0;
                pts.push(vec![1.0 + 2.0 * t.cos(), 2.0 * t.sin() * l.cos(), -0.5 + 2.0 * t.sin() * l.sin()]);
            }
        }
        let b = smallest_enclosing_ball(&pts);
        assert!((b.radius - 2.0).abs() < 1e-12, "{}", b.radius);
        assert!((b.center[0] - 1.0).abs() < 1e-10 && (b.center[2] + 0.5).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_brute_force(pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..30)) {
            let pts: Vec<Vec<f64>> = pts.into_iter().map(|(x, y)| vec![x, y]).collect();
            let b = smallest_enclosing_ball(&pts);
            for p in &pts {
                prop_assert!(dist(p, &b.center) <= b.radius * (1.0 + 1e-12) + 1e-15);
            }
            let oracle = brute_force_2d(&pts);
            prop_assert!((oracle - b.radius).abs() <= 1e-12 * oracle.max(1e-3), "welzl {} brute {}", b.radius, oracle);
        }
    }
}
