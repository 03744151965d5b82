//! Small numerical helpers shared by every module.

use nalgebra::{Matrix3, Rotation3, SMatrix, UnitQuaternion, Vector3};

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.80665;

/// Boltzmann's constant as used by the radar equation, J/K.
pub const BOLTZMANN: f64 = 1.38e-23;

pub type Matrix6 = SMatrix<f64, 6, 6>;
pub type Matrix15 = SMatrix<f64, 15, 15>;
pub type Matrix30 = SMatrix<f64, 30, 30>;
pub type Vector15 = SMatrix<f64, 15, 1>;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Cross-product matrix: `skew(a) * b == a.cross(&b)`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Wraps an angle onto `[-π, π)`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Direction cosine matrix taking NED vectors into the body frame for
/// Z-Y-X (yaw, pitch, roll) Euler angles `[φ, θ, ψ]`.
pub fn dcm_nav_to_body(euler: &Vector3<f64>) -> Matrix3<f64> {
    let (sf, cf) = euler.x.sin_cos();
    let (st, ct) = euler.y.sin_cos();
    let (sp, cp) = euler.z.sin_cos();
    Matrix3::new(
        ct * cp,
        ct * sp,
        -st,
        sf * st * cp - cf * sp,
        sf * st * sp + cf * cp,
        sf * ct,
        cf * st * cp + sf * sp,
        cf * st * sp - sf * cp,
        cf * ct,
    )
}

/// Body-to-NED direction cosine matrix, the transpose of [`dcm_nav_to_body`].
pub fn dcm_body_to_nav(euler: &Vector3<f64>) -> Matrix3<f64> {
    dcm_nav_to_body(euler).transpose()
}

/// Partial derivatives of [`dcm_nav_to_body`] with respect to roll, pitch and yaw.
pub fn dcm_nav_to_body_partials(euler: &Vector3<f64>) -> [Matrix3<f64>; 3] {
    let (sf, cf) = euler.x.sin_cos();
    let (st, ct) = euler.y.sin_cos();
    let (sp, cp) = euler.z.sin_cos();
    let c1 = Matrix3::new(1.0, 0.0, 0.0, 0.0, cf, sf, 0.0, -sf, cf);
    let c2 = Matrix3::new(ct, 0.0, -st, 0.0, 1.0, 0.0, st, 0.0, ct);
    let c3 = Matrix3::new(cp, sp, 0.0, -sp, cp, 0.0, 0.0, 0.0, 1.0);
    let d1 = Matrix3::new(0.0, 0.0, 0.0, 0.0, -sf, cf, 0.0, -cf, -sf);
    let d2 = Matrix3::new(-st, 0.0, -ct, 0.0, 0.0, 0.0, ct, 0.0, -st);
    let d3 = Matrix3::new(-sp, cp, 0.0, -cp, -sp, 0.0, 0.0, 0.0, 0.0);
    [d1 * c2 * c3, c1 * d2 * c3, c1 * c2 * d3]
}

/// Z-Y-X Euler angles `[φ, θ, ψ]` of a body-to-NED rotation matrix.
pub fn euler_from_body_to_nav(t_b_n: &Matrix3<f64>) -> Vector3<f64> {
    let phi = t_b_n[(2, 1)].atan2(t_b_n[(2, 2)]);
    let theta = (-t_b_n[(2, 0)]).clamp(-1.0, 1.0).asin();
    let psi = t_b_n[(1, 0)].atan2(t_b_n[(0, 0)]);
    Vector3::new(phi, theta, psi)
}

/// Body-to-NED attitude quaternion for Euler angles `[φ, θ, ψ]`.
pub fn quat_from_euler(euler: &Vector3<f64>) -> UnitQuaternion<f64> {
    UnitQuaternion::from_euler_angles(euler.x, euler.y, euler.z)
}

/// Renormalizes a nearly orthonormal matrix onto SO(3).
pub fn orthonormalize(m: &Matrix3<f64>) -> Matrix3<f64> {
    Rotation3::from_matrix(m).into_inner()
}

/// Forces exact symmetry of a square matrix.
pub fn symmetrize<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    (m + m.transpose()) * 0.5
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Inverse of [`erfc`] on `(0, 2)`.
///
/// A rational starting guess is refined by Newton iterations on `erf` near the
/// centre and on `ln erfc` in the tail, where the logarithm keeps the update
/// well scaled for arguments down to the subnormal range.
pub fn erfcinv(y: f64) -> f64 {
    if y.is_nan() || !(0.0..=2.0).contains(&y) {
        return f64::NAN;
    }
    if y == 0.0 {
        return f64::INFINITY;
    }
    if y == 2.0 {
        return f64::NEG_INFINITY;
    }
    if y > 1.0 {
        return -erfcinv(2.0 - y);
    }
    let mut x = if y < 1e-20 {
        let l = -y.ln();
        (l - 0.5 * (std::f64::consts::PI * l).ln()).sqrt()
    } else {
        erfinv_guess(1.0 - y, y)
    };
    if y >= 0.5 {
        let z = 1.0 - y;
        for _ in 0..12 {
            let f = erf(x) - z;
            let step = f / (FRAC_2_SQRT_PI * (-x * x).exp());
            x -= step;
            if step.abs() <= 1e-17 * x.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
    } else {
        let ly = y.ln();
        for _ in 0..60 {
            let (h, dh) = if x > 10.0 {
                let s = erfc_asymptotic_factor(x);
                (
                    -x * x - (x * std::f64::consts::PI.sqrt()).ln() + s.ln() - ly,
                    -2.0 * x / s,
                )
            } else {
                let e = erfc(x);
                (e.ln() - ly, -FRAC_2_SQRT_PI * (-x * x).exp() / e)
            };
            let step = h / dh;
            x -= step;
            if step.abs() <= 1e-16 * x.abs() {
                break;
            }
        }
    }
    x
}

/// `erfc(x) x √π e^{x²}` from its asymptotic series, for large `x`.
fn erfc_asymptotic_factor(x: f64) -> f64 {
    let r = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..40 {
        let next = -term * (2 * n - 1) as f64 * r;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    sum
}

/// Single precision rational approximation of `erfinv(x)`, with the tail
/// variable computed from `y = 1 - x` to avoid cancellation.
fn erfinv_guess(x: f64, y: f64) -> f64 {
    let mut w = -(y * (2.0 - y)).ln();
    let p = if w < 5.0 {
        w -= 2.5;
        let mut p = 2.810_226_36e-08;
        for c in [
            3.432_739_39e-07,
            -3.523_387_7e-06,
            -4.391_506_54e-06,
            0.000_218_580_87,
            -0.001_253_725_03,
            -0.004_177_681_64,
            0.246_640_727,
            1.501_409_41,
        ] {
            p = c + p * w;
        }
        p
    } else {
        w = w.sqrt() - 3.0;
        let mut p = -0.000_200_214_257;
        for c in [
            0.000_100_950_558,
            0.001_349_343_22,
            -0.003_673_428_44,
            0.005_739_507_73,
            -0.007_622_461_3,
            0.009_438_870_47,
            1.001_674_06,
            2.832_976_82,
        ] {
            p = c + p * w;
        }
        p
    };
    p * x
}

/// Inverse right Jacobian of SO(3) at rotation vector `phi`.
pub fn so3_right_jacobian_inv(phi: &Vector3<f64>) -> Matrix3<f64> {
    let t = phi.norm();
    let s = skew(phi);
    if t < 1e-6 {
        return Matrix3::identity() + 0.5 * s + (1.0 / 12.0) * s * s;
    }
    let c = 1.0 / (t * t) - (1.0 + t.cos()) / (2.0 * t * t.sin());
    Matrix3::identity() + 0.5 * s + c * s * s
}

/// Rotation vector of a (nearly) orthonormal matrix.
pub fn so3_log(r: &Matrix3<f64>) -> Vector3<f64> {
    UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix(r)).scaled_axis()
}

/// Rotation matrix of a rotation vector.
pub fn so3_exp(v: &Vector3<f64>) -> Matrix3<f64> {
    Rotation3::new(*v).into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn skew_matches_cross() {
        let a = Vector3::new(1.0, -2.0, 0.5);
        let b = Vector3::new(0.3, 4.0, -1.0);
        assert_relative_eq!(skew(&a) * b, a.cross(&b), epsilon = 1e-15);
    }

    #[test]
    fn wrap_angle_range() {
        use std::f64::consts::PI;
        assert_eq!(wrap_angle(PI), -PI);
        assert_relative_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_relative_eq!(wrap_angle(-0.25), -0.25);
    }

    #[test]
    fn dcm_is_composition_of_elementary_rotations() {
        let e = Vector3::new(0.3, -0.2, 2.1);
        let rz = Rotation3::from_axis_angle(&Vector3::z_axis(), e.z);
        let ry = Rotation3::from_axis_angle(&Vector3::y_axis(), e.y);
        let rx = Rotation3::from_axis_angle(&Vector3::x_axis(), e.x);
        let t_b_n = (rz * ry * rx).into_inner();
        assert_relative_eq!(dcm_body_to_nav(&e), t_b_n, epsilon = 1e-14);
        assert_relative_eq!(
            quat_from_euler(&e).to_rotation_matrix().into_inner(),
            t_b_n,
            epsilon = 1e-14
        );
        assert_relative_eq!(euler_from_body_to_nav(&t_b_n), e, epsilon = 1e-13);
    }

    #[test]
    fn dcm_partials_match_finite_differences() {
        let e = Vector3::new(0.4, 0.3, -1.2);
        let d = dcm_nav_to_body_partials(&e);
        let h = 1e-6;
        for i in 0..3 {
            let mut ep = e;
            let mut em = e;
            ep[i] += h;
            em[i] -= h;
            let fd = (dcm_nav_to_body(&ep) - dcm_nav_to_body(&em)) / (2.0 * h);
            assert_relative_eq!(d[i], fd, epsilon = 1e-9);
        }
    }

    // Reference values computed with 40-digit arithmetic.
    #[test]
    fn erfc_reference_values() {
        let cases = [
            (0.5, 0.479_500_122_186_953_5),
            (1.0, 0.157_299_207_050_285_13),
            (3.0, 2.209_049_699_858_544e-5),
            (5.0, 1.537_459_794_428_035e-12),
            (10.0, 2.088_487_583_762_545e-45),
            (-1.0, 1.842_700_792_949_715),
        ];
        for (x, want) in cases {
            assert_relative_eq!(erfc(x), want, max_relative = 1e-14);
        }
    }

    #[test]
    fn erfcinv_reference_values() {
        let cases = [
            (1e-300, 26.209_469_960_516_124),
            (1e-20, 6.601_580_622_355_143),
            (0.002, 2.185_124_219_133_004),
            (0.2, 0.906_193_802_436_823_2),
            (0.6, 0.370_807_158_593_558),
            (1.5, -0.476_936_276_204_469_9),
            (1.999, -2.326_753_765_513_525),
        ];
        for (y, want) in cases {
            assert_relative_eq!(erfcinv(y), want, max_relative = 1e-13);
        }
        assert_eq!(erfcinv(1.0), 0.0);
        assert!(erfcinv(0.0).is_infinite());
        assert!(erfcinv(-0.1).is_nan());
    }

    #[test]
    fn erfcinv_round_trip_grid() {
        for i in 1..2000 {
            let y = i as f64 / 1000.0;
            let x = erfcinv(y);
            assert_relative_eq!(erfc(x), y, max_relative = 1e-13);
        }
    }

    #[test]
    fn right_jacobian_inverse_small_angle_branches_agree() {
        let v = Vector3::new(1e-6, -2e-6, 0.5e-6);
        let a = so3_right_jacobian_inv(&v);
        let t = v.norm();
        let s = skew(&v);
        let c = 1.0 / (t * t) - (1.0 + t.cos()) / (2.0 * t * t.sin());
        let b = Matrix3::identity() + 0.5 * s + c * s * s;
        assert_relative_eq!(a, b, epsilon = 1e-9);
    }
}
