//! Single-pulse radar detection model.
//!
//! The probability of detection follows the erfc approximation
//! `P_D = ½ erfc(√(−ln P_fa) − √(S + ½))` with signal-to-noise ratio
//! `S = c_r σ_r / (k R⁴)`. The radar cross section `σ_r` is that of an
//! ellipsoid seen at the azimuth and elevation of the radar in the body frame.
//!
//! Linearizing `P_D` about a nominal aircraft state `x_a = [p_a, Θ_a]` and
//! radar state `x_r = [p_r, c_r]` gives the detection standard deviation
//! `σ²_pd = A_Pa C_aa A_Paᵀ + A_Pr C_rr A_Prᵀ`.

use crate::math::{dcm_nav_to_body, dcm_nav_to_body_partials, erfc, erfcinv, BOLTZMANN};
use crate::{Error, Result};
use nalgebra::{Matrix3, Matrix4, Matrix6, RowVector3, RowVector4, RowVector6, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Nominal aircraft position (NED, m) and Z-Y-X Euler attitude (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AircraftPose {
    pub p_a_n: Vector3<f64>,
    /// Roll, pitch, yaw.
    pub theta_a: Vector3<f64>,
}

impl AircraftPose {
    /// Builds a pose after checking the attitude bounds (no gimbal lock, yaw on `[-π, π)`).
    pub fn new(p_a_n: Vector3<f64>, theta_a: Vector3<f64>) -> Result<Self> {
        if !p_a_n.iter().chain(theta_a.iter()).all(|v| v.is_finite()) {
            return Err(Error::Domain("pose contains non-finite values".into()));
        }
        if theta_a.x.abs() >= PI || theta_a.y.abs() >= PI / 2.0 || !(-PI..PI).contains(&theta_a.z) {
            return Err(Error::Domain(format!(
                "attitude {theta_a:?} outside the accepted range"
            )));
        }
        Ok(Self { p_a_n, theta_a })
    }
}

/// Ground radar with its lumped constant and state covariance over `[p_r, c_r]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarSite {
    pub id: String,
    pub p_r_n: Vector3<f64>,
    /// Lumped radar constant, J·m²/K.
    pub c_r: f64,
    /// Probability of false alarm.
    pub p_fa: f64,
    pub c_rr: Matrix4<f64>,
}

impl RadarSite {
    /// Radar with position standard deviation `sigma_p` (m, isotropic) and
    /// radar constant standard deviation `sigma_c`.
    pub fn new(
        id: impl Into<String>,
        p_r_n: Vector3<f64>,
        c_r: f64,
        p_fa: f64,
        sigma_p: f64,
        sigma_c: f64,
    ) -> Self {
        let mut c_rr = Matrix4::zeros();
        for i in 0..3 {
            c_rr[(i, i)] = sigma_p * sigma_p;
        }
        c_rr[(3, 3)] = sigma_c * sigma_c;
        Self {
            id: id.into(),
            p_r_n,
            c_r,
            p_fa,
            c_rr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_r > 0.0 && self.c_r.is_finite()) {
            return Err(Error::Validation(format!(
                "radar `{}`: c_r must be positive",
                self.id
            )));
        }
        if !(self.p_fa > 0.0 && self.p_fa < 1.0) {
            return Err(Error::Validation(format!(
                "radar `{}`: p_fa must lie in (0, 1)",
                self.id
            )));
        }
        if (self.c_rr - self.c_rr.transpose()).abs().max() > 1e-12 * self.c_rr.abs().max().max(1.0)
        {
            return Err(Error::Validation(format!(
                "radar `{}`: C_rr must be symmetric",
                self.id
            )));
        }
        let eig = self.c_rr.symmetric_eigenvalues();
        if eig.min() < -1e-12 * eig.abs().max().max(1.0) {
            return Err(Error::Validation(format!(
                "radar `{}`: C_rr must be positive semidefinite",
                self.id
            )));
        }
        Ok(())
    }
}

/// Ellipsoid semi-axes in m: `a` forward, `b` side, `c` up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidRcs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl EllipsoidRcs {
    pub fn validate(&self) -> Result<()> {
        if [self.a, self.b, self.c]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Validation("ellipsoid axes must be positive".into()))
        }
    }
}

/// Azimuth `alpha` and elevation `phi` of the radar seen from the body frame, rad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcsAngles {
    pub alpha: f64,
    pub phi: f64,
}

/// Nominal detection probability and its standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionStats {
    pub pd_nominal: f64,
    pub sigma_pd: f64,
}

/// Euclidean distance between aircraft and radar.
pub fn range(p_a: &Vector3<f64>, p_r: &Vector3<f64>) -> f64 {
    (p_a - p_r).norm()
}

/// Signal-to-noise ratio `c_r σ_r / (k R⁴)`.
pub fn snr(c_r: f64, sigma_r: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("range must be positive, got {r}")));
    }
    Ok(c_r * sigma_r / (BOLTZMANN * r.powi(4)))
}

/// Detection probability for signal-to-noise ratio `s`.
pub fn probability_of_detection(s: f64, p_fa: f64) -> f64 {
    0.5 * erfc((-p_fa.ln()).sqrt() - (s + 0.5).sqrt())
}

/// `∂P_D/∂S`.
pub fn pd_snr_derivative(s: f64, p_fa: f64) -> f64 {
    let root = (s + 0.5).sqrt();
    let w = (-p_fa.ln()).sqrt() - root;
    (-w * w).exp() / (2.0 * PI.sqrt() * root)
}

fn rcs_denominator(rcs: &EllipsoidRcs, ang: &RcsAngles) -> f64 {
    let (sa, ca) = ang.alpha.sin_cos();
    let (sp, cp) = ang.phi.sin_cos();
    (rcs.a * sa * cp).powi(2) + (rcs.b * sa * sp).powi(2) + (rcs.c * ca).powi(2)
}

/// Ellipsoid radar cross section, m².
pub fn rcs_ellipsoid(rcs: &EllipsoidRcs, ang: &RcsAngles) -> f64 {
    let d = rcs_denominator(rcs, ang);
    PI * (rcs.a * rcs.b * rcs.c).powi(2) / (d * d)
}

/// Partial derivatives `(∂σ/∂α, ∂σ/∂φ)` of the ellipsoid RCS.
pub fn rcs_angle_partials(rcs: &EllipsoidRcs, ang: &RcsAngles) -> (f64, f64) {
    let d = rcs_denominator(rcs, ang);
    let sigma = PI * (rcs.a * rcs.b * rcs.c).powi(2) / (d * d);
    let (sa, ca) = ang.alpha.sin_cos();
    let (sp, cp) = ang.phi.sin_cos();
    let dd_da = 2.0 * sa * ca * ((rcs.a * cp).powi(2) + (rcs.b * sp).powi(2) - rcs.c * rcs.c);
    let dd_dp = 2.0 * sa * sa * sp * cp * (rcs.b * rcs.b - rcs.a * rcs.a);
    (-2.0 * sigma / d * dd_da, -2.0 * sigma / d * dd_dp)
}

/// Radar position in the body frame, `ρ = T_n^b (p_r − p_a)`.
pub fn radar_in_body(pose: &AircraftPose, p_r: &Vector3<f64>) -> Vector3<f64> {
    dcm_nav_to_body(&pose.theta_a) * (p_r - pose.p_a_n)
}

fn angles_of(rho: &Vector3<f64>) -> Result<RcsAngles> {
    let beta = rho.x.hypot(rho.y);
    if !(beta > 1e-12 * rho.norm()) {
        return Err(Error::DegenerateGeometry(
            "radar lies on the body z axis; azimuth undefined".into(),
        ));
    }
    Ok(RcsAngles {
        alpha: rho.y.atan2(rho.x),
        phi: rho.z.atan2(beta),
    })
}

/// Azimuth and elevation of the radar in the aircraft body frame.
pub fn rcs_angles(pose: &AircraftPose, p_r: &Vector3<f64>) -> Result<RcsAngles> {
    if range(&pose.p_a_n, p_r) == 0.0 {
        return Err(Error::DegenerateGeometry(
            "aircraft and radar coincide".into(),
        ));
    }
    angles_of(&radar_in_body(pose, p_r))
}

/// Nominal detection probability of `radar` for an aircraft at `pose`.
pub fn pd_at(pose: &AircraftPose, radar: &RadarSite, rcs: &EllipsoidRcs) -> Result<f64> {
    let ang = rcs_angles(pose, &radar.p_r_n)?;
    let s = snr(
        radar.c_r,
        rcs_ellipsoid(rcs, &ang),
        range(&pose.p_a_n, &radar.p_r_n),
    )?;
    Ok(probability_of_detection(s, radar.p_fa))
}

/// Everything the two Jacobians share.
struct Linearization {
    dpd_ds: f64,
    ds_dr: f64,
    ds_dsigma: f64,
    ds_dc: f64,
    dr_dpr: RowVector3<f64>,
    dsigma_drho: RowVector3<f64>,
    t_n_b: Matrix3<f64>,
    drho_dtheta: Matrix3<f64>,
}

fn linearize(pose: &AircraftPose, radar: &RadarSite, rcs: &EllipsoidRcs) -> Result<Linearization> {
    let delta = radar.p_r_n - pose.p_a_n;
    let r = delta.norm();
    if r == 0.0 {
        return Err(Error::DegenerateGeometry(
            "aircraft and radar coincide".into(),
        ));
    }
    let t_n_b = dcm_nav_to_body(&pose.theta_a);
    let rho = t_n_b * delta;
    let ang = angles_of(&rho)?;
    let sigma = rcs_ellipsoid(rcs, &ang);
    let s = snr(radar.c_r, sigma, r)?;

    let beta2 = rho.x * rho.x + rho.y * rho.y;
    let beta = beta2.sqrt();
    let rho2 = rho.norm_squared();
    let dalpha = RowVector3::new(-rho.y / beta2, rho.x / beta2, 0.0);
    let dphi = RowVector3::new(
        -rho.z * rho.x / (beta * rho2),
        -rho.z * rho.y / (beta * rho2),
        beta / rho2,
    );
    let (ds_da, ds_dp) = rcs_angle_partials(rcs, &ang);

    let partials = dcm_nav_to_body_partials(&pose.theta_a);
    let drho_dtheta = Matrix3::from_columns(&[
        partials[0] * delta,
        partials[1] * delta,
        partials[2] * delta,
    ]);
    let r4 = BOLTZMANN * r.powi(4);
    Ok(Linearization {
        dpd_ds: pd_snr_derivative(s, radar.p_fa),
        ds_dr: -4.0 * s / r,
        ds_dsigma: radar.c_r / r4,
        ds_dc: sigma / r4,
        dr_dpr: (delta / r).transpose(),
        dsigma_drho: ds_da * dalpha + ds_dp * dphi,
        t_n_b,
        drho_dtheta,
    })
}

/// `∂P_D/∂x_a` over `[p_a (3), Θ_a (3)]`.
pub fn jacobian_aircraft(
    pose: &AircraftPose,
    radar: &RadarSite,
    rcs: &EllipsoidRcs,
) -> Result<RowVector6<f64>> {
    let l = linearize(pose, radar, rcs)?;
    // ∂ρ/∂p_a = −T_n^b and ∂R/∂p_a = −(p_r − p_a)ᵀ/R.
    let dp = -l.dpd_ds * (l.ds_dr * l.dr_dpr + l.ds_dsigma * l.dsigma_drho * l.t_n_b);
    let dt = l.dpd_ds * l.ds_dsigma * l.dsigma_drho * l.drho_dtheta;
    Ok(RowVector6::new(dp[0], dp[1], dp[2], dt[0], dt[1], dt[2]))
}

/// `∂P_D/∂x_r` over `[p_r (3), c_r]`.
pub fn jacobian_radar(
    pose: &AircraftPose,
    radar: &RadarSite,
    rcs: &EllipsoidRcs,
) -> Result<RowVector4<f64>> {
    let l = linearize(pose, radar, rcs)?;
    let dp = l.dpd_ds * (l.ds_dr * l.dr_dpr + l.ds_dsigma * l.dsigma_drho * l.t_n_b);
    Ok(RowVector4::new(dp[0], dp[1], dp[2], l.dpd_ds * l.ds_dc))
}

/// `σ²_pd = A_Pa C_aa A_Paᵀ + A_Pr C_rr A_Prᵀ`, clamped at zero against round-off.
pub fn pd_variance(
    a_pa: &RowVector6<f64>,
    c_aa: &Matrix6<f64>,
    a_pr: &RowVector4<f64>,
    c_rr: &Matrix4<f64>,
) -> f64 {
    let v = (a_pa * c_aa * a_pa.transpose())[0] + (a_pr * c_rr * a_pr.transpose())[0];
    v.max(0.0)
}

/// Nominal `P_D` and `σ_pd` for one radar given the aircraft pose covariance.
pub fn detection_stats(
    pose: &AircraftPose,
    radar: &RadarSite,
    rcs: &EllipsoidRcs,
    c_aa: &Matrix6<f64>,
    c_rr: &Matrix4<f64>,
) -> Result<DetectionStats> {
    let pd = pd_at(pose, radar, rcs)?;
    let a_pa = jacobian_aircraft(pose, radar, rcs)?;
    let a_pr = jacobian_radar(pose, radar, rcs)?;
    Ok(DetectionStats {
        pd_nominal: pd,
        sigma_pd: pd_variance(&a_pa, c_aa, &a_pr, c_rr).sqrt(),
    })
}

/// Range at which the detection probability equals `pd_target`.
pub fn detection_radius(pd_target: f64, sigma_r: f64, c_r: f64, p_fa: f64) -> Result<f64> {
    if !(pd_target > 0.0 && pd_target < 1.0) || !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(Error::InfeasibleRadius(format!(
            "target {pd_target} and false alarm probability {p_fa} must lie in (0, 1)"
        )));
    }
    if !(sigma_r > 0.0 && c_r > 0.0) {
        return Err(Error::InfeasibleRadius(
            "RCS and radar constant must be positive".into(),
        ));
    }
    let a = (-p_fa.ln()).sqrt();
    let w = erfcinv(2.0 * pd_target);
    let gap = a - w;
    // gap = √(S + ½) must exceed √½ for a positive signal-to-noise ratio.
    if !(gap > std::f64::consts::FRAC_1_SQRT_2) {
        return Err(Error::InfeasibleRadius(format!(
            "target {pd_target} is not reachable at positive SNR for P_fa = {p_fa}"
        )));
    }
    let s = gap * gap - 0.5;
    Ok((c_r * sigma_r / (BOLTZMANN * s)).powf(0.25))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table_rcs() -> EllipsoidRcs {
        EllipsoidRcs {
            a: 0.18,
            b: 0.17,
            c: 0.20,
        }
    }

    #[test]
    fn range_examples() {
        assert_eq!(
            range(&Vector3::new(1.0, 2.0, 3.0), &Vector3::new(1.0, 2.0, 3.0)),
            0.0
        );
        assert_relative_eq!(
            range(&Vector3::new(3e3, 4e3, 0.0), &Vector3::zeros()),
            5000.0
        );
        let start = Vector3::new(-100e3, -700e3, -3.5e3);
        let radar2 = Vector3::new(-650e3, 900e3, 0.0);
        // 40-digit reference: 1 691 896.0517715029 m.
        assert_relative_eq!(
            range(&start, &radar2),
            1_691_896.051_771_503,
            max_relative = 1e-14
        );
    }

    #[test]
    fn snr_examples() {
        assert_eq!(snr(164.7, 0.0, 1e5).unwrap(), 0.0);
        let s1 = snr(164.7, 0.09, 1e5).unwrap();
        let s2 = snr(164.7, 0.09, 2e5).unwrap();
        assert_relative_eq!(s1 / s2, 16.0, max_relative = 1e-14);
        assert_relative_eq!(
            snr(164.7, 0.09, 6e5).unwrap(),
            8.288_043_478_260_87,
            max_relative = 1e-14
        );
        assert!(matches!(snr(1.0, 1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn pd_examples() {
        let pfa: f64 = 1e-9;
        assert_relative_eq!(
            probability_of_detection(-pfa.ln() - 0.5, pfa),
            0.5,
            epsilon = 1e-15
        );
        assert_relative_eq!(probability_of_detection(1e12, pfa), 1.0);
        assert_relative_eq!(
            probability_of_detection(0.0, pfa),
            2.695_639_900_359_586e-8,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            probability_of_detection(12.5, pfa),
            0.090_305_104_347_761_55,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            probability_of_detection(30.0, pfa),
            0.915_022_994_786_235_3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rcs_examples() {
        let sphere = EllipsoidRcs {
            a: 0.3,
            b: 0.3,
            c: 0.3,
        };
        let ang = RcsAngles {
            alpha: 0.7,
            phi: -0.2,
        };
        assert_relative_eq!(
            rcs_ellipsoid(&sphere, &ang),
            PI * 0.09,
            max_relative = 1e-14
        );
        let r = table_rcs();
        let head_on = rcs_ellipsoid(
            &r,
            &RcsAngles {
                alpha: 0.0,
                phi: 0.4,
            },
        );
        assert_relative_eq!(
            head_on,
            PI * (0.18f64 * 0.17).powi(2) / 0.04,
            max_relative = 1e-14
        );
        let broadside = rcs_ellipsoid(
            &r,
            &RcsAngles {
                alpha: PI / 2.0,
                phi: 0.0,
            },
        );
        assert_relative_eq!(broadside, 0.112_088_923_072_524_7, max_relative = 1e-14);
    }

    #[test]
    fn rcs_angles_examples() {
        let level = AircraftPose {
            p_a_n: Vector3::zeros(),
            theta_a: Vector3::zeros(),
        };
        let ahead = rcs_angles(&level, &Vector3::new(1000.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(ahead.alpha, 0.0);
        assert_relative_eq!(ahead.phi, 0.0);
        let right = rcs_angles(&level, &Vector3::new(0.0, 1000.0, 0.0)).unwrap();
        assert_relative_eq!(right.alpha, PI / 2.0);
        assert_relative_eq!(right.phi, 0.0);
        assert!(matches!(
            rcs_angles(&level, &Vector3::new(0.0, 0.0, 3000.0)),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(matches!(
            rcs_angles(&level, &Vector3::zeros()),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn detection_radius_examples() {
        let r = detection_radius(0.01, 0.15, 164.7, 1e-9).unwrap();
        assert_relative_eq!(r, 688_813.390_216_185_3, max_relative = 1e-12);
        let r = detection_radius(0.1, 0.09, 164.7, 1e-9).unwrap();
        assert_relative_eq!(r, 538_285.961_464_368_5, max_relative = 1e-12);
        let mut prev = f64::INFINITY;
        for p in [0.01, 0.05, 0.1, 0.3, 0.6] {
            let r = detection_radius(p, 0.15, 164.7, 1e-9).unwrap();
            assert!(r < prev);
            prev = r;
        }
        assert!(matches!(
            detection_radius(1e-12, 0.1, 164.7, 1e-9),
            Err(Error::InfeasibleRadius(_))
        ));
        assert!(matches!(
            detection_radius(0.0, 0.1, 164.7, 1e-9),
            Err(Error::InfeasibleRadius(_))
        ));
    }

    #[test]
    fn sphere_has_no_attitude_sensitivity() {
        let sphere = EllipsoidRcs {
            a: 0.2,
            b: 0.2,
            c: 0.2,
        };
        let pose = AircraftPose {
            p_a_n: Vector3::new(1e4, 2e4, -3e3),
            theta_a: Vector3::new(0.1, 0.05, 1.0),
        };
        let radar = RadarSite::new("r", Vector3::new(3e5, 1e5, 0.0), 164.7, 1e-9, 100.0, 1.0);
        let a = jacobian_aircraft(&pose, &radar, &sphere).unwrap();
        for i in 3..6 {
            assert!(a[i].abs() < 1e-40 * a[0].abs().max(1e-300) + 1e-45);
        }
        let b = jacobian_radar(&pose, &radar, &sphere).unwrap();
        for i in 0..3 {
            assert_relative_eq!(b[i], -a[i], max_relative = 1e-14);
        }
        assert!(b[3] > 0.0);
    }

    #[test]
    fn far_radar_has_vanishing_jacobian() {
        let pose = AircraftPose {
            p_a_n: Vector3::zeros(),
            theta_a: Vector3::new(0.0, 0.0, 0.3),
        };
        let radar = RadarSite::new("r", Vector3::new(5e7, 1e7, 0.0), 164.7, 1e-9, 100.0, 1.0);
        let a = jacobian_aircraft(&pose, &radar, &table_rcs()).unwrap();
        assert!(a.abs().max() < 1e-12, "{a}");
    }

    #[test]
    fn pd_variance_examples() {
        let z6 = Matrix6::zeros();
        let z4 = Matrix4::zeros();
        let a = RowVector6::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let b = RowVector4::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(pd_variance(&a, &z6, &b, &z4), 0.0);
        let mut c = Matrix6::zeros();
        c[(0, 0)] = 4.0;
        assert_eq!(
            pd_variance(
                &RowVector6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
                &c,
                &RowVector4::zeros(),
                &z4
            ),
            4.0
        );
    }
}
