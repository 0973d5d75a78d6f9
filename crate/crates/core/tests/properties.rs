use std::sync::Arc;

use proptest::prelude::*;

use icflow::curvature::CurvatureSpec;
use icflow::flow::{inverse_reference, reference_radius, step, Checkpoint, FlowConfig, FlowState, Stop};
use icflow::hypersurface::{extrinsic, GraphSurface};
use icflow::roundness::{diagnose_surface, osc_minimizing_center, support_function};
use icflow::sphere::{
    covariant_hessian, gradient_norm_sq, laplace_beltrami, make_grid, GridMode, Resolution, ScalarField, SphereGrid,
};

fn axi(nt: usize) -> Arc<SphereGrid> {
    Arc::new(make_grid(GridMode::Axisym, 2, Resolution::axisym(nt)).unwrap())
}

fn full(nt: usize) -> Arc<SphereGrid> {
    Arc::new(make_grid(GridMode::Full2d, 2, Resolution::full2d(nt, 2 * nt)).unwrap())
}

/// Smooth field on the sphere built from the cartesian coordinates of the direction.
fn field(grid: &SphereGrid, c: &[f64; 4]) -> ScalarField {
    ScalarField::from_fn(grid, |i| {
        let x = grid.direction(i);
        c[0] * x[0] + c[1] * x[0] * x[1] + c[2] * x[1] * x[1] + c[3] * (x[0] + x[2]).sin()
    })
}

fn coeffs() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0)
}

fn h_config(p: f64) -> FlowConfig {
    FlowConfig::new(CurvatureSpec::mean_curvature(2).unwrap(), p, Stop::ThetaEnd(10.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operators_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, cf in coeffs(), cg in coeffs(), axisym in any::<bool>()) {
        let grid = if axisym { axi(24) } else { full(16) };
        let f = field(&grid, &cf);
        let g = field(&grid, &cg);
        let combo: Vec<f64> = f.iter().zip(g.iter()).map(|(x, y)| a * x + b * y).collect();
        let lc = laplace_beltrami(&grid, &combo);
        let (lf, lg) = (laplace_beltrami(&grid, &f), laplace_beltrami(&grid, &g));
        let hc = covariant_hessian(&grid, &combo);
        let (hf, hg) = (covariant_hessian(&grid, &f), covariant_hessian(&grid, &g));
        let scale = 1.0 + lf.iter().chain(lg.iter()).fold(0.0f64, |m, x| m.max(x.abs())) * (a.abs() + b.abs());
        for i in 0..grid.len() {
            prop_assert!((lc[i] - a * lf[i] - b * lg[i]).abs() <= 1e-11 * scale);
            let want = a * hf[i].trace() + b * hg[i].trace();
            prop_assert!((hc[i].trace() - want).abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn constants_are_exact(c in -5.0f64..5.0, axisym in any::<bool>()) {
        let grid = if axisym { axi(20) } else { full(16) };
        let f = vec![c; grid.len()];
        prop_assert_eq!(gradient_norm_sq(&grid, &f).max(), 0.0);
        prop_assert!(laplace_beltrami(&grid, &f).iter().all(|x| *x == 0.0));
        prop_assert!(covariant_hessian(&grid, &f).iter().all(|h| h.frobenius_sq() == 0.0));
    }

    #[test]
    fn curvature_scales_inversely(k in 1u32..5, amp in -0.15f64..0.15, big in any::<bool>()) {
        let lambda = if big { 2.0 } else { 0.5 };
        let s = GraphSurface::perturbed_sphere(axi(32), 1.0, &[(k, amp)]).unwrap();
        let e = extrinsic(&s).unwrap();
        let es = extrinsic(&s.scaled(lambda).unwrap()).unwrap();
        for i in 0..e.len() {
            prop_assert!((es.v[i] - e.v[i]).abs() <= 1e-10 * e.v[i]);
            // w is a difference of O(|A|²) terms, so |A|² sets its roundoff scale.
            let a2: f64 = e.kappa(i).iter().map(|k| k * k).sum();
            prop_assert!((es.w[i] * lambda * lambda - e.w[i]).abs() <= 1e-10 * a2);
            for (a, b) in es.kappa(i).iter().zip(e.kappa(i)) {
                prop_assert!((a * lambda - b).abs() <= 1e-10 * b.abs().max(1e-6));
            }
        }
    }

    #[test]
    fn shape_operator_trace_and_norm(a in 0.7f64..1.4, c in 0.7f64..1.4, tilt in -0.2f64..0.2) {
        let grid = full(16);
        let base = GraphSurface::ellipsoid(grid.clone(), a, c).unwrap();
        let u = ScalarField::from_fn(&grid, |i| base.u()[i] * (1.0 + tilt * grid.direction(i)[0] * grid.direction(i)[1]));
        let e = extrinsic(&base.with_u(u).unwrap()).unwrap();
        for i in 0..e.len() {
            let k = e.kappa(i);
            let h: f64 = k.iter().sum();
            let sq: f64 = k.iter().map(|x| x * x).sum();
            prop_assert!((e.shape[i].trace() - h).abs() <= 1e-12 * h.abs().max(1.0));
            prop_assert!((e.shape[i].frobenius_sq() - sq).abs() <= 1e-12 * sq.max(1.0));
            prop_assert!((e.mean_curvature[i] - h).abs() <= 1e-12 * h.abs().max(1.0));
        }
    }

    #[test]
    fn convex_surfaces_have_positive_support(a in 0.7f64..1.4, c in 0.7f64..1.4, k in 1u32..4, amp in -0.03f64..0.03) {
        let grid = axi(32);
        let base = GraphSurface::ellipsoid(grid.clone(), a, c).unwrap();
        let bump = GraphSurface::perturbed_sphere(grid, 1.0, &[(k, amp)]).unwrap();
        let u: Vec<f64> = base.u().iter().zip(bump.u().iter()).map(|(x, y)| x * y).collect();
        let s = base.with_u(ScalarField::new(u)).unwrap();
        let e = extrinsic(&s).unwrap();
        prop_assume!(e.kappa_min() > 0.0);
        let (y, _) = osc_minimizing_center(&s).unwrap();
        let (support, _) = support_function(&s, &y).unwrap();
        prop_assert!(support.min() > 0.0);
    }

    #[test]
    fn support_at_graph_center_is_u_over_v(k in 1u32..5, amp in -0.15f64..0.15, z in -0.2f64..0.2) {
        let grid = axi(32);
        let s = GraphSurface::perturbed_sphere(grid.clone(), 1.0, &[(k, amp)]).unwrap();
        let s = GraphSurface::new(grid, s.u().clone(), vec![z, 0.0, 0.0]).unwrap();
        let e = extrinsic(&s).unwrap();
        let (support, _) = support_function(&s, s.center()).unwrap();
        for i in 0..e.len() {
            let want = s.u()[i] / e.v[i];
            prop_assert!((support[i] - want).abs() <= 1e-10 * want);
        }
    }

    #[test]
    fn minimizing_center_is_translation_equivariant(a in 0.8f64..1.25, c in 0.8f64..1.25, z in -0.3f64..0.3) {
        let grid = axi(32);
        let s = GraphSurface::ellipsoid(grid.clone(), a, c).unwrap();
        let (y0, osc0) = osc_minimizing_center(&s).unwrap();
        let moved = GraphSurface::new(grid, s.u().clone(), vec![z, 0.0, 0.0]).unwrap();
        let (y1, osc1) = osc_minimizing_center(&moved).unwrap();
        prop_assert!((y1[0] - y0[0] - z).abs() <= 1e-6);
        prop_assert!((osc1 - osc0).abs() <= 1e-6);
    }

    #[test]
    fn diagnostics_are_ordered(k in 1u32..5, amp in -0.12f64..0.12, z in -0.1f64..0.1) {
        let grid = axi(32);
        let s = GraphSurface::perturbed_sphere(grid.clone(), 1.0, &[(k, amp)]).unwrap();
        let s = GraphSurface::new(grid, s.u().clone(), vec![z, 0.0, 0.0]).unwrap();
        prop_assume!(extrinsic(&s).unwrap().mean_curvature.iter().all(|h| *h > 0.0));
        let r = diagnose_surface(&s, 0.0, 1.0, 0.0, &[2.0, 3.0, 5.5]).unwrap();
        prop_assert!(r.rho_plus >= r.rho_minus && r.rho_minus > 0.0);
        prop_assert!(r.osc_u >= r.rho_plus - r.rho_minus - 2.0 * 1e-3);
        prop_assert!(r.v_max >= 1.0);
        prop_assert!(r.pinch.iter().all(|(_, v)| *v >= 0.0));
    }

    #[test]
    fn convex_gradient_bound(a in 0.8f64..1.25, c in 0.8f64..1.25) {
        let s = GraphSurface::ellipsoid(axi(32), a, c).unwrap();
        let r = diagnose_surface(&s, 0.0, 1.0, 0.0, &[2.0, 3.0, 5.5]).unwrap();
        prop_assert!(r.kappa_min > 0.0);
        prop_assert!(r.v_max <= (r.osc_u / r.u_min).exp() * (1.0 + 1e-6));
    }

    #[test]
    fn flow_expands_pointwise(k in 1u32..4, amp in -0.1f64..0.1, p in 0.3f64..1.0) {
        let cfg = h_config(p);
        let mut s = FlowState::new(GraphSurface::perturbed_sphere(axi(24), 1.0, &[(k, amp)]).unwrap(), &cfg).unwrap();
        for _ in 0..20 {
            let next = step(&s, &cfg).unwrap();
            prop_assert!(next.t > s.t);
            prop_assert!(next.u().iter().zip(s.u().iter()).all(|(a, b)| a > b));
            s = next;
        }
    }

    #[test]
    fn checkpoint_text_round_trip(values in prop::collection::vec(0.01f64..100.0, 24), t in 0.0f64..1e3, z in -1.0f64..1.0) {
        let grid = axi(24);
        let s = GraphSurface::new(grid, ScalarField::new(values), vec![z, 0.0, 0.0]).unwrap();
        let ck = Checkpoint {
            mode: GridMode::Axisym,
            n: 2,
            resolution: Resolution::axisym(24),
            p: 0.5,
            spec: CurvatureSpec::mean_curvature(2).unwrap(),
            t,
            center: s.center().to_vec(),
            u: s.u().to_vec(),
        };
        let back = Checkpoint::parse(&ck.to_text()).unwrap();
        prop_assert_eq!(back.t.to_bits(), t.to_bits());
        let restored = back.surface().unwrap();
        prop_assert!(restored.u().iter().zip(s.u().iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert_eq!(restored.center(), s.center());
    }
}

proptest! {
    #[test]
    fn reference_radius_inverts(r in 0.1f64..10.0, t in 0.0f64..5.0, p in 0.1f64..3.0, n in 2usize..5) {
        match reference_radius(t, r, n, p) {
            Ok(theta) => {
                prop_assert!(theta >= r);
                let back = inverse_reference(theta, t, n, p).unwrap();
                prop_assert!((back - r).abs() <= 1e-9 * r);
                if let Ok(later) = reference_radius(t + 0.01, r, n, p) {
                    prop_assert!(later > theta);
                }
            }
            Err(_) => prop_assert!(p > 1.0),
        }
    }
}
