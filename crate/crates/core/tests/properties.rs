use std::f64::consts::PI;

use nalgebra::Matrix3;
use proptest::prelude::*;
use srgeo::cost::{CostMap, ImageCoordinates, ScalarImage};
use srgeo::geodesics::{
    cusp_time_smax, hamiltonian_flow_t, pendulum_flow, vertical_solution_s, Momentum, PendulumState,
};
use srgeo::lie_so3::{a1, a2, a3, coframe_at, commutator, frame_at, orthogonality_defect, rotation_matrix, Chart};
use srgeo::optics::EyeModel;

fn chart() -> impl Strategy<Value = Chart> {
    (-1.4..1.4f64, -PI..PI, -PI..PI).prop_map(|(x, y, t)| Chart::new(x, y, t))
}

fn momentum_on_level() -> impl Strategy<Value = (Momentum, f64)> {
    (0.3..2.5f64, -1.0..1.0f64, -2.0..2.0f64).prop_map(|(xi, h2, h3)| (Momentum::from_h2_h3(h2, h3, xi), xi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_stay_orthogonal(a in chart(), b in chart()) {
        let m = rotation_matrix(a.x, a.y, a.theta) * rotation_matrix(b.x, b.y, b.theta);
        prop_assert!(orthogonality_defect(&m) < 1e-13);
    }

    #[test]
    fn commutators_are_equivariant(c in chart(), i in 0..3usize, j in 0..3usize) {
        let basis = [a1(), a2(), a3()];
        let r = rotation_matrix(c.x, c.y, c.theta);
        let lhs = commutator(&(r * basis[i] * r.transpose()), &(r * basis[j] * r.transpose()));
        let rhs = r * commutator(&basis[i], &basis[j]) * r.transpose();
        prop_assert!((lhs - rhs).abs().max() < 1e-12);
    }

    #[test]
    fn frame_and_coframe_are_dual(c in chart()) {
        let f = frame_at(&c).unwrap().as_columns();
        let w = coframe_at(&c);
        let w = Matrix3::from_fn(|i, j| w[i][j]);
        prop_assert!((w * f - Matrix3::identity()).abs().max() < 1e-9 * (1.0 + 1.0 / c.x.cos()));
    }

    #[test]
    fn projection_round_trips(u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let eye = EyeModel::default();
        let (px, py) = (u * eye.x_max(), v * eye.x_max());
        let (x, y) = eye.unproject_to_sphere(px, py).unwrap();
        let (qx, qy) = eye.project_to_plane(x, y).unwrap();
        prop_assert!((qx - px).abs() < 1e-12 && (qy - py).abs() < 1e-12);
    }

    #[test]
    fn jacobian_stays_in_the_stated_band(u in -1.0..1.0f64, v in -1.0..1.0f64) {
        let eye = EyeModel::default();
        let j = eye.local_jacobian(u * eye.y_max(), v * eye.y_max());
        prop_assert!((0.75..=1.15).contains(&j), "J = {j}");
    }

    #[test]
    fn flow_conserves_hamiltonian_and_casimir((h0, xi) in momentum_on_level(), t in 0.1..2.0 * PI) {
        let path = hamiltonian_flow_t(h0, xi, t, 1e-3).unwrap();
        let end = path.samples.last().unwrap().momentum;
        prop_assert!((end.hamiltonian(xi) - 0.5).abs() < 1e-8);
        prop_assert!((end.casimir() - h0.casimir()).abs() < 1e-8);
    }

    #[test]
    fn pendulum_matches_momentum_flow((h0, xi) in momentum_on_level(), t in 0.1..3.0f64) {
        let p = pendulum_flow(PendulumState::from_momentum(&h0, xi), t, 1e-3);
        let h = hamiltonian_flow_t(h0, xi, t, 1e-3).unwrap().samples.last().unwrap().momentum;
        let q = p.last().unwrap().to_momentum(xi);
        prop_assert!((q.h1 - h.h1).abs() < 1e-8 && (q.h2 - h.h2).abs() < 1e-8);
    }

    #[test]
    fn momentum_stays_regular_before_the_cusp(xi in 0.2..3.0f64, h2 in -0.99..0.99f64, h3 in -3.0..3.0f64) {
        let s_max = cusp_time_smax(h2, h3, xi);
        prop_assume!(s_max.is_finite() && s_max > 1e-5);
        for k in 0..20 {
            let s = (s_max - 1e-6) * k as f64 / 19.0;
            let (h1, _, _) = vertical_solution_s(h2, h3, xi, s).unwrap();
            prop_assert!(h1 > 0.0, "h1 = {h1} at s = {s} < {s_max}");
        }
    }

    #[test]
    fn unit_stiffness_vertical_flow_is_affine(h2 in -0.9..0.9f64, h3 in -0.5..0.5f64, s in 0.0..0.1f64) {
        let (_, a, b) = vertical_solution_s(h2, h3, 1.0, s).unwrap();
        prop_assert_eq!(b, h3);
        prop_assert!((a - (h2 + h3 * s)).abs() <= 1e-15);
    }

    #[test]
    fn cost_is_bounded(
        values in proptest::collection::vec(0.0..1.0f64, 81),
        lambda in 0.1..100.0f64,
        x in -0.3..0.3f64,
        y in -0.3..0.3f64,
    ) {
        prop_assume!(values.iter().any(|&v| v > 0.0));
        let vf = ScalarImage::new(9, 9, values).unwrap().with_pixel_size(0.1, ImageCoordinates::Spherical);
        let m = CostMap::new(vf, lambda, EyeModel::default()).unwrap();
        let c = m.value(x, y);
        prop_assert!(m.floor() > 0.0 && m.floor() <= c + 1e-15 && c <= 1.0);
    }
}
