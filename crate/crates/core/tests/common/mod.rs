#![allow(dead_code)]

use nalgebra::{SMatrix, Vector2};
use pdvg::ins::{nav_dynamics_matrix, ImuSpec, NavCovariance};
use pdvg::math::dcm_body_to_nav;
use pdvg::scenario::{load_scenario, Scenario};
use pdvg::trajectory::{smooth_waypoints, Trajectory, WaypointPath};
use std::path::PathBuf;

pub type M15 = SMatrix<f64, 15, 15>;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

pub fn bundled(name: &str) -> Scenario {
    load_scenario(&scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Line, clothoid, arc, clothoid, line at 100 m/s: a 90 degree left turn
/// reached after 10 s and finished by about 45 s.
pub fn turning_trajectory() -> Trajectory {
    let path = WaypointPath {
        points: vec![
            Vector2::new(0.0, 0.0),
            Vector2::new(3000.0, 0.0),
            Vector2::new(3000.0, -4000.0),
        ],
        altitude: 3500.0,
        speed: 100.0,
    };
    let segs = smooth_waypoints(&path, 1e-3, 1e-6).unwrap();
    Trajectory::new(segs, 100.0, 3500.0, 0.0).unwrap()
}

pub fn frobenius_rel(a: &M15, b: &M15) -> f64 {
    (a - b).norm() / b.norm()
}

/// Continuous process noise `B Q Bᵀ` of the navigation error model.
pub fn continuous_noise(imu: &ImuSpec) -> M15 {
    let mut q = M15::zeros();
    for i in 0..3 {
        q[(3 + i, 3 + i)] = imu.q_nu;
        q[(6 + i, 6 + i)] = imu.q_omega;
        q[(9 + i, 9 + i)] = imu.q_a();
        q[(12 + i, 12 + i)] = imu.q_g();
    }
    q
}

pub fn dynamics_at(traj: &Trajectory, t: f64, imu: &ImuSpec) -> M15 {
    let s = traj.state_at(t);
    nav_dynamics_matrix(&dcm_body_to_nav(&s.theta), &s.nu_b, imu.tau_a, imu.tau_g).unwrap()
}

/// RK4 integration of `Ṗ = F(t)P + PF(t)ᵀ + BQBᵀ` with `n` steps over `[t0, t1]`.
pub fn riccati_rk4(
    traj: &Trajectory,
    imu: &ImuSpec,
    p0: &NavCovariance,
    t0: f64,
    t1: f64,
    n: usize,
) -> M15 {
    let qc = continuous_noise(imu);
    let h = (t1 - t0) / n as f64;
    let rhs = |t: f64, p: &M15| {
        let f = dynamics_at(traj, t, imu);
        f * p + p * f.transpose() + qc
    };
    let mut p = p0.p;
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let k1 = rhs(t, &p);
        let k2 = rhs(t + 0.5 * h, &(p + k1 * (0.5 * h)));
        let k3 = rhs(t + 0.5 * h, &(p + k2 * (0.5 * h)));
        let k4 = rhs(t + h, &(p + k3 * h));
        p += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
    }
    0.5 * (p + p.transpose())
}

/// `∫ Φ(t1, τ) BQBᵀ Φᵀ(t1, τ) dτ` over `[t0, t1]` with `n` (even) Simpson
/// panels; `Φ(t1, τ)` comes from RK4 on `∂Φ/∂τ = −Φ F(τ)` run backwards.
pub fn process_noise_quadrature(
    traj: &Trajectory,
    imu: &ImuSpec,
    t0: f64,
    t1: f64,
    n: usize,
) -> M15 {
    assert!(n.is_multiple_of(2));
    let qc = continuous_noise(imu);
    let h = (t1 - t0) / n as f64;
    let rhs = |tau: f64, phi: &M15| -(phi * dynamics_at(traj, tau, imu));
    let mut phi = M15::identity();
    let mut acc = M15::zeros();
    for i in (0..=n).rev() {
        let tau = t0 + i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * (phi * qc * phi.transpose());
        if i > 0 {
            // Step backwards from tau to tau - h.
            let k1 = rhs(tau, &phi);
            let k2 = rhs(tau - 0.5 * h, &(phi - k1 * (0.5 * h)));
            let k3 = rhs(tau - 0.5 * h, &(phi - k2 * (0.5 * h)));
            let k4 = rhs(tau - h, &(phi - k3 * h));
            phi -= (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
        }
    }
    let q = acc * (h / 3.0);
    0.5 * (q + q.transpose())
}
