//! Derivative-free minimization for the low-dimensional center searches.

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    /// Initial simplex edge length.
    pub step: f64,
    /// Stop once every vertex is within this distance of the best one.
    pub tol: f64,
    pub max_evaluations: usize,
    /// Fresh simplices started from the current best point.
    pub restarts: usize,
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .map(|x| x.iter().zip(best).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

fn lerp(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a + s * (b - a)).collect()
}

fn simplex_pass(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    fx0: f64,
    step: f64,
    tol: f64,
    budget: &mut usize,
) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut pts = vec![x0.to_vec()];
    let mut vals = vec![fx0];
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        vals.push(f(&x));
        pts.push(x);
        *budget = budget.saturating_sub(1);
    }
    let mut eval = |x: &[f64], budget: &mut usize| {
        *budget = budget.saturating_sub(1);
        f(x)
    };
    loop {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if diameter(&pts) < tol || *budget == 0 {
            return (pts.swap_remove(0), vals[0]);
        }

        let mut centroid = vec![0.0; d];
        for x in &pts[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / d as f64;
            }
        }
        let worst = pts[d].clone();
        let reflected = lerp(&centroid, &worst, -1.0);
        let fr = eval(&reflected, budget);
        if fr < vals[0] {
            let expanded = lerp(&centroid, &worst, -2.0);
            let fe = eval(&expanded, budget);
            if fe < fr {
                pts[d] = expanded;
                vals[d] = fe;
            } else {
                pts[d] = reflected;
                vals[d] = fr;
            }
            continue;
        }
        if fr < vals[d - 1] {
            pts[d] = reflected;
            vals[d] = fr;
            continue;
        }
        let (contracted, fc) = if fr < vals[d] {
            let x = lerp(&centroid, &reflected, 0.5);
            let fx = eval(&x, budget);
            (x, fx)
        } else {
            let x = lerp(&centroid, &worst, 0.5);
            let fx = eval(&x, budget);
            (x, fx)
        };
        if fc < vals[d].min(fr) {
            pts[d] = contracted;
            vals[d] = fc;
            continue;
        }
        for i in 1..=d {
            pts[i] = lerp(&pts[0], &pts[i], 0.5);
            vals[i] = eval(&pts[i], budget);
        }
    }
}

/// Minimizes `f` from `x0`. Points where `f` is infinite are treated as
/// infeasible; `f(x0)` must be finite.
pub fn minimize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: Options) -> Minimum {
    let mut budget = opts.max_evaluations;
    let mut x = x0.to_vec();
    let mut value = f(&x);
    let mut step = opts.step;
    for _ in 0..=opts.restarts {
        let (nx, nv) = simplex_pass(&mut f, &x, value, step, opts.tol, &mut budget);
        let moved = nx.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if nv <= value {
            x = nx;
            value = nv;
        }
        if budget == 0 || moved < opts.tol {
            break;
        }
        step = (step * 0.1).max(10.0 * opts.tol);
    }
    Minimum {
        x,
        value,
        evaluations: opts.max_evaluations - budget,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> Options {
        Options {
            step: 0.5,
            tol: 1e-10,
            max_evaluations: 20_000,
            restarts: 3,
        }
    }

    #[test]
    fn smooth_quadratic() {
        let m = minimize(|x| (x[0] - 1.0).powi(2) + 4.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], opts());
        assert!((m.x[0] - 1.0).abs() < 1e-9 && (m.x[1] + 2.0).abs() < 1e-9, "{:?}", m.x);
    }

    #[test]
    fn nonsmooth_cone() {
        let m = minimize(
            |x| ((x[0] - 0.3).powi(2) + x[1].powi(2) + (x[2] + 0.1).powi(2)).sqrt(),
            &[0.0, 0.0, 0.0],
            opts(),
        );
        assert!(m.value < 1e-9, "{}", m.value);
    }

    #[test]
    fn one_dimensional_abs() {
        let m = minimize(|x| (x[0] - 0.3).abs(), &[0.0], opts());
        assert!((m.x[0] - 0.3).abs() < 1e-10);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        let m = minimize(
            |x| if x[0] < 0.2 { f64::INFINITY } else { x[0] },
            &[1.0],
            opts(),
        );
        assert!((m.x[0] - 0.2).abs() < 1e-8 && m.value.is_finite());
    }

    #[test]
    fn rosenbrock() {
        let m = minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            opts(),
        );
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }
}
