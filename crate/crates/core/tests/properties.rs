mod common;

use common::*;
use nalgebra::{DMatrix, Matrix4, Matrix6, RowVector4, RowVector6, Vector2, Vector3};
use pdvg::ins::{kalman_update, measurement_matrix, measurement_noise, MeasKind, NavCovariance};
use pdvg::math::{so3_exp, so3_log};
use pdvg::planner::{
    build_visibility_graph, expand_polygons, initial_polygons, RadarPolygon, Violation,
};
use pdvg::radar::{detection_radius, pd_variance, probability_of_detection, snr};
use pdvg::scenario::{parse_scenario, parse_waypoints_csv, waypoints_csv};
use pdvg::trajectory::{smooth_waypoints, Trajectory, WaypointPath};
use proptest::prelude::*;
use std::sync::OnceLock;

fn validation() -> &'static pdvg::scenario::Scenario {
    static S: OnceLock<pdvg::scenario::Scenario> = OnceLock::new();
    S.get_or_init(|| bundled("validation.toml"))
}

fn psd<const N: usize>(entries: &[f64]) -> nalgebra::SMatrix<f64, N, N> {
    let a =
        nalgebra::SMatrix::<f64, N, N>::from_iterator(entries.iter().copied().cycle().take(N * N));
    a * a.transpose()
}

fn min_eigen(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn waypoint_list() -> impl Strategy<Value = Vec<Vector2<f64>>> {
    // Heading changes stay below 120 degrees and legs are long enough to
    // hold any fillet at the curvature limits used below.
    (
        prop::collection::vec((-2.0f64..2.0, 50_000.0f64..80_000.0), 1..5),
        -3.1f64..3.1,
    )
        .prop_map(|(legs, h0)| {
            let mut heading = h0;
            let mut p = Vector2::new(0.0, 0.0);
            let mut out = vec![p];
            for (turn, len) in legs {
                heading += turn;
                p += len * Vector2::new(heading.cos(), heading.sin());
                out.push(p);
            }
            out
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detection_probability_is_a_monotone_probability(s in 0.0f64..200.0, ds in 0.0f64..10.0, exp in -12.0f64..-2.0) {
        let p_fa = 10f64.powf(exp);
        let a = probability_of_detection(s, p_fa);
        let b = probability_of_detection(s + ds, p_fa);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a);
    }

    #[test]
    fn detection_radius_inverts_the_detection_model(pd in 1e-3f64..0.99, sigma in 0.01f64..1.0, c_r in 1.0f64..500.0) {
        let r = detection_radius(pd, sigma, c_r, 1e-9).unwrap();
        let back = probability_of_detection(snr(c_r, sigma, r).unwrap(), 1e-9);
        prop_assert!(((back - pd) / pd).abs() < 1e-9);
    }

    #[test]
    fn detection_variance_is_nonnegative(
        a in prop::array::uniform6(-1.0f64..1.0),
        b in prop::array::uniform4(-1.0f64..1.0),
        ca in prop::collection::vec(-3.0f64..3.0, 36),
        cr in prop::collection::vec(-3.0f64..3.0, 16),
    ) {
        let c_aa: Matrix6<f64> = psd(&ca);
        let c_rr: Matrix4<f64> = psd(&cr);
        let v = pd_variance(&RowVector6::from_row_slice(&a), &c_aa, &RowVector4::from_row_slice(&b), &c_rr);
        prop_assert!(v >= -1e-12 * (c_aa.norm() + c_rr.norm()));
    }

    #[test]
    fn kalman_update_keeps_covariance_psd_and_shrinks_trace(
        entries in prop::collection::vec(-1.0f64..1.0, 225),
        kind in prop::sample::select(vec![MeasKind::Position, MeasKind::Altitude, MeasKind::Heading]),
    ) {
        let mut p = NavCovariance { p: psd(&entries) };
        for i in 0..15 {
            p.p[(i, i)] += 1e-3;
        }
        let (after, _) = kalman_update(&p, &measurement_matrix(kind), &measurement_noise(kind, &validation().meas)).unwrap();
        let dynamic = DMatrix::from_column_slice(15, 15, after.p.as_slice());
        prop_assert!(min_eigen(&dynamic) >= -1e-9 * p.p.norm());
        prop_assert!(after.p.trace() <= p.p.trace() * (1.0 + 1e-12));
    }

    #[test]
    fn rotation_log_inverts_exp(v in prop::array::uniform3(-1.5f64..1.5)) {
        let v = Vector3::from(v);
        prop_assert!((so3_log(&so3_exp(&v)) - v).norm() < 1e-12);
    }

    #[test]
    fn visibility_graph_is_symmetric(
        centers in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, 0.5f64..2.0, 3usize..7), 1..4),
    ) {
        let polys: Vec<_> = centers
            .iter()
            .enumerate()
            .map(|(i, (x, y, r, n))| RadarPolygon::regular(format!("p{i}"), Vector2::new(*x, *y), *r, *n))
            .collect();
        let bounds = pdvg::ins::NeRect { n_min: -10.0, n_max: 10.0, e_min: -10.0, e_max: 10.0 };
        if let Ok(g) = build_visibility_graph(&polys, Vector2::new(-9.0, -9.0), Vector2::new(9.0, 9.0), &bounds) {
            for (u, edges) in g.adjacency.iter().enumerate() {
                for &(v, w) in edges {
                    prop_assert!(u != v);
                    let back = g.adjacency[v].iter().find(|(x, _)| *x == u);
                    prop_assert_eq!(back.map(|e| e.1), Some(w));
                    prop_assert_eq!(w, (g.nodes[u] - g.nodes[v]).norm());
                }
            }
        }
    }

    #[test]
    fn expansion_never_shrinks_polygons(
        hits in prop::collection::vec((0usize..3001, 0.0f64..0.02), 1..6),
    ) {
        let s = validation();
        let samples = s.samples_for(&s.reference_waypoints()).unwrap();
        let p = &s.planner;
        let mut polys = initial_polygons(&s.radars, p.pd_init, p.sigma_r_init, p.n_vertices).unwrap();
        let before = polys.clone();
        let violations: Vec<_> = hits
            .iter()
            .map(|(k, sig)| {
                let k = (*k).min(samples.len() - 1);
                Violation { radar: 0, sample: k, t: samples[k].t, pd: 0.0, sigma_pd: *sig }
            })
            .collect();
        expand_polygons(&mut polys, &violations, &samples, s).unwrap();
        for (a, b) in before.iter().zip(&polys) {
            prop_assert!(b.radii.len() >= a.radii.len());
            for (angle, r) in a.angles.iter().zip(&a.radii) {
                let idx = b.nearest_vertex(*angle);
                prop_assert!(b.radii[idx] >= *r);
            }
            prop_assert!(b.is_simple());
        }
    }

    #[test]
    fn waypoint_csv_round_trips(points in prop::collection::vec((-1e7f64..1e7, -1e7f64..1e7), 2..20)) {
        let pts: Vec<_> = points.iter().map(|(n, e)| Vector2::new(*n, *e)).collect();
        prop_assert_eq!(parse_waypoints_csv(&waypoints_csv(&pts)).unwrap(), pts);
    }

    #[test]
    fn scenario_text_round_trips(speed in 50.0f64..300.0, dt in 0.05f64..5.0, p_dt in 0.05f64..0.5, n in 8usize..64) {
        let s = validation()
            .modified(|c| {
                c.trajectory.speed_m_s = speed;
                c.trajectory.dt_s = dt;
                c.planner.p_dt = p_dt;
                c.planner.n_vertices = n;
            })
            .unwrap();
        prop_assert_eq!(parse_scenario(&s.to_toml()).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn smoothed_flight_respects_limits(
        points in waypoint_list(),
        speed in 80.0f64..300.0,
        kappa_max in 1e-4f64..1e-3,
    ) {
        let kappa_rate = 1e-7;
        let path = WaypointPath { points, altitude: 3000.0, speed };
        let segs = smooth_waypoints(&path, kappa_max, kappa_rate).unwrap();
        let traj = Trajectory::new(segs, speed, 3000.0, 0.0).unwrap();
        let samples = traj.sample(2.0).unwrap();
        for w in samples.windows(2) {
            prop_assert!(w[0].kappa.abs() <= kappa_max * (1.0 + 1e-9));
            prop_assert!((w[0].v_n.norm() - speed).abs() < 1e-9 * speed);
            let dk = (w[1].kappa - w[0].kappa).abs();
            prop_assert!(dk <= kappa_rate * speed * (w[1].t - w[0].t) * (1.0 + 1e-6) + 1e-15);
        }
        for t in traj.joint_times() {
            let (a, b) = (traj.state_at(t - 1e-6), traj.state_at(t + 1e-6));
            prop_assert!((a.p_n - b.p_n).norm() < 1e-3);
            prop_assert!((a.theta.z - b.theta.z).abs() < 1e-6);
            prop_assert!((a.kappa - b.kappa).abs() < 1e-9);
        }
    }
}
