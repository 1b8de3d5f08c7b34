use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use sldg_core::diffusion::{branch_step, shift_average, sldg_const, CoeffSet1D, Projection};
use sldg_core::field::{project_with, DgField1D, Mesh1D};
use sldg_core::flow::{
    constant_map, euler_branches, forward_solve, platen_branches, BackwardMap, Window,
};
use sldg_core::quadbasis::{GaussRule, NodalBasis};
use sldg_core::split2d::{apply_plan, decompose_diffusion, schedule, Axis, Component, DgField2D, Mesh2D, SplitKind};
use sldg_core::transport::{advect_step, TransportPlan};
use sldg_core::Fn1;

fn field(m: usize, k: usize, values: &[f64]) -> DgField1D {
    let mesh = Mesh1D::periodic(0.0, 1.0, m).unwrap();
    let basis = Arc::new(NodalBasis::new(k).unwrap());
    DgField1D::from_coeffs(mesh, basis, values[..m * (k + 1)].to_vec()).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_field() -> impl Strategy<Value = DgField1D> {
    (1usize..=24, 0usize..=6, prop::collection::vec(-1.0f64..1.0, 24 * 7))
        .prop_map(|(m, k, v)| field(m, k, &v))
}

fn sine_sigma() -> Fn1 {
    Arc::new(|x| (2.0 * PI * x).sin())
}

proptest! {
    #[test]
    fn partition_of_unity(k in 0usize..=7, t in -2.0f64..2.0) {
        let basis = NodalBasis::new(k).unwrap();
        let mut phi = vec![0.0; k + 1];
        basis.basis_values(t, &mut phi);
        let s: f64 = phi.iter().sum();
        prop_assert!((s - 1.0).abs() <= 1e-12, "sum {s}");
    }

    #[test]
    fn eval_reproduces_nodal_values(u in random_field()) {
        let n = u.basis().len();
        for i in 0..u.mesh().cells() {
            for a in 0..n {
                let t = u.basis().nodes()[a];
                prop_assert!((u.eval_in_cell(i, t) - u.coeffs()[i * n + a]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn projection_is_idempotent(u in random_field()) {
        let mesh = *u.mesh();
        let p = project_with(|x| { let (i, t) = mesh.locate(x).unwrap(); u.eval_in_cell(i, t) }, mesh, u.basis().clone()).unwrap();
        prop_assert!(max_diff(p.coeffs(), u.coeffs()) <= 1e-13);
    }

    #[test]
    fn nodal_l2_matches_oversampled(u in random_field()) {
        let nodal = u.norms().l2;
        let fine = u.l2_error_oversampled(|_, _| 0.0, 0.0);
        prop_assert!((nodal - fine).abs() <= 1e-12);
    }

    #[test]
    fn constant_shift_is_non_expansive_and_conservative(u in random_field(), s in -2.5f64..2.5) {
        let v = advect_step(&u, &BackwardMap::shift(s), None, 0.0).unwrap();
        prop_assert!(v.norms().l2 <= u.norms().l2 + 1e-13);
        prop_assert!((v.integral() - u.integral()).abs() <= 1e-12);
    }

    #[test]
    fn whole_cell_shifts_are_exact(u in random_field(), j in -5i64..=5) {
        let m = u.mesh().cells();
        let v = advect_step(&u, &constant_map(1.0, j as f64 * u.mesh().dx()), None, 0.0).unwrap();
        let n = u.basis().len();
        let mut want = vec![0.0; u.coeffs().len()];
        for i in 0..m {
            let src = (i as i64 - j).rem_euclid(m as i64) as usize;
            want[i * n..(i + 1) * n].copy_from_slice(u.cell(src));
        }
        prop_assert!(max_diff(v.coeffs(), &want) <= 1e-12);
    }

    #[test]
    fn forward_solve_inverts_feet(z in 0.05f64..0.95, dt in 1e-4f64..0.01) {
        let w = Window::new(0.0, 1.0);
        let zero: Fn1 = Arc::new(|_| 0.0);
        let mut maps: Vec<BackwardMap> = vec![constant_map(0.8, dt)];
        maps.extend(euler_branches(zero.clone(), sine_sigma(), dt, w).unwrap().map(|b| b.map));
        maps.extend(platen_branches(zero, sine_sigma(), dt, w).unwrap().map(|b| b.map));
        for map in &maps {
            let x = forward_solve(map, z).unwrap();
            prop_assert!((map.foot(x) - z).abs() <= 1e-12);
        }
    }

    #[test]
    fn sampled_feet_are_monotone(dt in 1e-4f64..0.01) {
        let w = Window::new(0.0, 1.0);
        let zero: Fn1 = Arc::new(|_| 0.0);
        for b in platen_branches(zero, sine_sigma(), dt, w).unwrap() {
            let feet: Vec<f64> = (0..=1000).map(|j| b.map.foot(j as f64 / 1000.0)).collect();
            prop_assert!(feet.windows(2).all(|p| p[1] > p[0]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sldg_const_is_stable(u in random_field(), sigma in 0.01f64..0.5, dt in 1e-4f64..0.05, p in 1usize..=3) {
        for variant in [Projection::Composed, Projection::Single] {
            let v = sldg_const(&u, sigma, dt, p, variant, None, 0.0).unwrap();
            prop_assert!(v.norms().l2 <= u.norms().l2 + 1e-13);
        }
    }

    // Projected shifts commute exactly for piecewise constants and when the
    // advection moves whole cells; otherwise only up to O(Δx^{k+1}).
    #[test]
    fn shift_average_commutes_with_constant_advection(u in random_field(), sigma in 0.01f64..0.5, s in -0.3f64..0.3, j in -3i64..=3) {
        let dt = 0.01;
        let shift = if u.degree() == 0 { s } else { j as f64 * u.mesh().dx() };
        let map = BackwardMap::shift(shift);
        let a = advect_step(&shift_average(&u, sigma, dt, None, 0.0).unwrap(), &map, None, 0.0).unwrap();
        let b = shift_average(&advect_step(&u, &map, None, 0.0).unwrap(), sigma, dt, None, 0.0).unwrap();
        prop_assert!(max_diff(a.coeffs(), b.coeffs()) <= 1e-12);
    }

    #[test]
    fn branch_step_decomposes(u in random_field(), dt in 1e-4f64..0.01) {
        let w = Window::new(0.0, 1.0);
        let c = CoeffSet1D::new(Arc::new(|x| 0.3 * (2.0 * PI * x).cos()), sine_sigma(), 0.0);
        let family = platen_branches(c.b.clone(), c.sigma.clone(), dt, w).unwrap();
        let got = branch_step(&u, &family, None, 0.0).unwrap();
        let mut want = vec![0.0; u.coeffs().len()];
        for br in &family {
            let v = advect_step(&u, &br.map, None, 0.0).unwrap();
            for (o, x) in want.iter_mut().zip(v.coeffs()) {
                *o += br.weight * x;
            }
        }
        prop_assert!(max_diff(got.coeffs(), &want) <= 1e-14);
    }

    #[test]
    fn axis_shifts_commute_in_2d(m in 2usize..=10, k in 0usize..=3, sx in -0.4f64..0.4, sy in -0.4f64..0.4, seed in prop::collection::vec(-1.0f64..1.0, 100 * 16)) {
        let mesh1 = Mesh1D::periodic(0.0, 1.0, m).unwrap();
        let mesh = Mesh2D::new(mesh1, mesh1);
        let basis = Arc::new(NodalBasis::new(k).unwrap());
        let n = (k + 1) * (k + 1) * m * m;
        let u = DgField2D::from_coeffs(mesh, basis.clone(), seed[..n].to_vec()).unwrap();
        let px = TransportPlan::new(&BackwardMap::shift(sx), &mesh1, &basis, None, 0.0).unwrap();
        let py = TransportPlan::new(&BackwardMap::shift(sy), &mesh1, &basis, None, 0.0).unwrap();
        let xy = apply_plan(&apply_plan(&u, Axis::X, &px).unwrap(), Axis::Y, &py).unwrap();
        let yx = apply_plan(&apply_plan(&u, Axis::Y, &py).unwrap(), Axis::X, &px).unwrap();
        prop_assert!(max_diff(xy.coeffs(), yx.coeffs()) <= 1e-13);
        prop_assert!(xy.norms().l2 <= u.norms().l2 + 1e-13);
    }
}

#[test]
fn gauss_rules_integrate_monomials() {
    for n in 1..=9 {
        let r = GaussRule::new(n).unwrap();
        for m in 0..2 * n {
            let s: f64 = r.nodes().iter().zip(r.weights()).map(|(&x, &w)| w * x.powi(m as i32)).sum();
            let exact = if m % 2 == 1 { 0.0 } else { 2.0 / (m + 1) as f64 };
            assert!((s - exact).abs() <= 1e-13, "n={n} m={m}");
        }
    }
}

#[test]
fn branch_and_schedule_weights_sum_to_one() {
    let w = Window::new(0.0, 1.0);
    let zero: Fn1 = Arc::new(|_| 0.0);
    let e: f64 = euler_branches(zero.clone(), sine_sigma(), 0.01, w).unwrap().iter().map(|b| b.weight).sum();
    let p: f64 = platen_branches(zero, sine_sigma(), 0.01, w).unwrap().iter().map(|b| b.weight).sum();
    assert!((e - 1.0).abs() <= 1e-15 && (p - 1.0).abs() <= 1e-15);
    for kind in [SplitKind::Trotter, SplitKind::Strang, SplitKind::Ruth3, SplitKind::Forest4, SplitKind::Yoshida6] {
        for s in schedule(kind).axis_sums() {
            assert!((s - 1.0).abs() <= 1e-15, "{kind:?}: {s}");
        }
    }
}

#[test]
fn diffusion_directions_reassemble_the_matrix() {
    let s11: Fn1 = Arc::new(|x| 1.0 + 0.5 * x.sin());
    let s22: Fn1 = Arc::new(|y| 0.7 * y.cos());
    let sigma = [
        [Component::OfX(s11.clone()), Component::Const(0.4)],
        [Component::Const(-0.3), Component::OfY(s22.clone())],
    ];
    let dirs = decompose_diffusion(sigma).unwrap();
    for j in 0..10_000 {
        let (x, y) = (0.37 * j as f64 % 6.3, 0.91 * j as f64 % 6.3);
        let s = [[s11(x), 0.4], [-0.3, s22(y)]];
        for r in 0..2 {
            for c in 0..2 {
                let got: f64 = dirs.iter().map(|d| d.sigma[r].eval(x, y) * d.sigma[c].eval(x, y)).sum();
                let want = s[r][0] * s[c][0] + s[r][1] * s[c][1];
                assert!((got - want).abs() <= 1e-12);
            }
        }
    }
}
