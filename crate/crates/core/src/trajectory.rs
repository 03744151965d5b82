//! Waypoint smoothing and trajectory sampling.
//!
//! Interior waypoints are replaced by symmetric clothoid, arc, clothoid
//! fillets so that position, heading and curvature are continuous. The chain
//! is flown at constant speed and constant altitude in a coordinated turn,
//! which fixes the nominal attitude and the true specific force and body rates.
//!
//! Planar coordinates are `(x, y) = (north, east)` and heading `ψ` is measured
//! from north towards east, so positive curvature turns right.

use crate::math::{dcm_body_to_nav, dcm_nav_to_body, wrap_angle, GRAVITY};
use crate::{Error, Result};
use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

/// Planar waypoint list flown at constant altitude and speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointPath {
    /// North/east points, m.
    pub points: Vec<Vector2<f64>>,
    /// Altitude above the NED origin, m (`p_d = −altitude`).
    pub altitude: f64,
    pub speed: f64,
}

impl WaypointPath {
    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::Validation(
                "a path needs at least two waypoints".into(),
            ));
        }
        if !(self.speed > 0.0) {
            return Err(Error::Validation("speed must be positive".into()));
        }
        for (i, w) in self.points.windows(2).enumerate() {
            if (w[1] - w[0]).norm() == 0.0 {
                return Err(Error::Validation(format!(
                    "waypoints {i} and {} coincide",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Line,
    Arc,
    Clothoid,
}

/// One piece of a smoothed path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSegment {
    pub kind: SegmentKind,
    pub x0: f64,
    pub y0: f64,
    pub psi0: f64,
    pub kappa0: f64,
    /// Curvature rate `dκ/ds`, zero except on clothoids.
    pub kappa_rate: f64,
    pub length: f64,
}

/// Position and curvature state at an arc length along a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPoint {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub kappa: f64,
}

/// Nominal state and true IMU signals at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub p_n: Vector3<f64>,
    pub v_n: Vector3<f64>,
    /// Roll, pitch, yaw.
    pub theta: Vector3<f64>,
    /// Specific force in the body frame, m/s².
    pub nu_b: Vector3<f64>,
    /// Body angular rate, rad/s.
    pub omega_b: Vector3<f64>,
    pub kappa: f64,
}

impl TrajectorySample {
    pub fn pose(&self) -> crate::radar::AircraftPose {
        crate::radar::AircraftPose {
            p_a_n: self.p_n,
            theta_a: self.theta,
        }
    }
}

// 10-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_35,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// Closed-form displacement along a constant-curvature piece.
fn arc_displacement(psi0: f64, kappa: f64, s: f64) -> (f64, f64) {
    let half = 0.5 * kappa * s;
    let mid = psi0 + half;
    let chord = s * sinc(half);
    (chord * mid.cos(), chord * mid.sin())
}

/// Gauss-Legendre quadrature of the clothoid displacement integrals.
fn clothoid_displacement(psi0: f64, kappa0: f64, kappa_rate: f64, s: f64) -> (f64, f64) {
    let k_end = kappa0 + kappa_rate * s;
    let k_max = kappa0.abs().max(k_end.abs());
    let panels = ((s * k_max / 0.25).ceil() as usize).max(1);
    let h = s / panels as f64;
    let (mut dx, mut dy) = (0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (node, weight) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            for u in [mid - 0.5 * h * node, mid + 0.5 * h * node] {
                let psi = psi0 + kappa0 * u + 0.5 * kappa_rate * u * u;
                dx += weight * psi.cos();
                dy += weight * psi.sin();
            }
        }
    }
    (0.5 * h * dx, 0.5 * h * dy)
}

/// Evaluates a segment at arc length `s` from its start.
pub fn clothoid_point(s: f64, seg: &PathSegment) -> Result<SegmentPoint> {
    let tol = 1e-9 * seg.length.max(1.0);
    if !(s >= -tol && s <= seg.length + tol) {
        return Err(Error::Domain(format!(
            "arc length {s} outside [0, {}]",
            seg.length
        )));
    }
    let s = s.clamp(0.0, seg.length);
    let (dx, dy) = if seg.kappa_rate == 0.0 {
        arc_displacement(seg.psi0, seg.kappa0, s)
    } else {
        clothoid_displacement(seg.psi0, seg.kappa0, seg.kappa_rate, s)
    };
    Ok(SegmentPoint {
        x: seg.x0 + dx,
        y: seg.y0 + dy,
        psi: seg.psi0 + seg.kappa0 * s + 0.5 * seg.kappa_rate * s * s,
        kappa: seg.kappa0 + seg.kappa_rate * s,
    })
}

fn segment_end(seg: &PathSegment) -> SegmentPoint {
    clothoid_point(seg.length, seg).expect("segment end is in range")
}

/// Shape of one symmetric fillet, independent of its placement.
#[derive(Debug, Clone, Copy)]
struct Fillet {
    turn: f64,
    kappa_peak: f64,
    sharpness: f64,
    clothoid_len: f64,
    arc_len: f64,
    /// Distance from the waypoint back along the incoming leg to the fillet start.
    tangent: f64,
}

fn design_fillet(turn: f64, kappa_max: f64, kappa_rate_max: f64) -> Fillet {
    let mag = turn.abs();
    let sign = turn.signum();
    let (kappa_peak, arc_angle) = if mag >= kappa_max * kappa_max / kappa_rate_max {
        (kappa_max, mag - kappa_max * kappa_max / kappa_rate_max)
    } else {
        ((mag * kappa_rate_max).sqrt(), 0.0)
    };
    let clothoid_len = kappa_peak / kappa_rate_max;
    let arc_len = if arc_angle > 0.0 {
        arc_angle / kappa_peak
    } else {
        0.0
    };
    // Local frame: start at the origin heading along +x, turning left by `mag`.
    let (x1, y1) = clothoid_displacement(0.0, 0.0, kappa_rate_max, clothoid_len);
    let psi1 = 0.5 * kappa_peak * clothoid_len;
    let (x2, y2) = arc_displacement(psi1, kappa_peak, arc_len);
    let psi2 = psi1 + kappa_peak * arc_len;
    let (x3, y3) = clothoid_displacement(psi2, kappa_peak, -kappa_rate_max, clothoid_len);
    let (x, y) = (x1 + x2 + x3, y1 + y2 + y3);
    Fillet {
        turn,
        kappa_peak: sign * kappa_peak,
        sharpness: sign * kappa_rate_max,
        clothoid_len,
        arc_len,
        tangent: x - y / mag.tan(),
    }
}

/// Replaces every interior waypoint by a clothoid, arc, clothoid fillet.
pub fn smooth_waypoints(
    path: &WaypointPath,
    kappa_max: f64,
    kappa_rate_max: f64,
) -> Result<Vec<PathSegment>> {
    path.validate()?;
    if !(kappa_max > 0.0 && kappa_rate_max > 0.0) {
        return Err(Error::Validation(
            "curvature limits must be positive".into(),
        ));
    }
    let pts = &path.points;
    let n = pts.len();
    let headings: Vec<f64> = pts
        .windows(2)
        .map(|w| (w[1].y - w[0].y).atan2(w[1].x - w[0].x))
        .collect();
    let mut fillets: Vec<Option<Fillet>> = vec![None; n];
    for i in 1..n - 1 {
        let turn = wrap_angle(headings[i] - headings[i - 1]);
        if turn.abs() >= std::f64::consts::PI - 1e-9 {
            return Err(Error::InfeasibleSmoothing {
                index: i,
                reason: "turn reverses direction".into(),
            });
        }
        if turn.abs() > 1e-12 {
            fillets[i] = Some(design_fillet(turn, kappa_max, kappa_rate_max));
        }
    }
    let tangent = |i: usize| fillets[i].map_or(0.0, |f| f.tangent);
    for i in 0..n - 1 {
        let leg = (pts[i + 1] - pts[i]).norm();
        let need = tangent(i) + tangent(i + 1);
        if need > leg * (1.0 + 1e-12) {
            let index = if tangent(i + 1) >= tangent(i) && i + 1 < n - 1 {
                i + 1
            } else {
                i
            };
            return Err(Error::InfeasibleSmoothing {
                index,
                reason: format!("fillets need {need:.3} m on a {leg:.3} m leg"),
            });
        }
    }

    let mut segs = Vec::new();
    let mut x = pts[0].x;
    let mut y = pts[0].y;
    for i in 0..n - 1 {
        let psi = headings[i];
        let dir = Vector2::new(psi.cos(), psi.sin());
        let target = pts[i + 1] - tangent(i + 1) * dir;
        let along = (target - Vector2::new(x, y)).dot(&dir);
        if along > 1e-9 {
            segs.push(PathSegment {
                kind: SegmentKind::Line,
                x0: x,
                y0: y,
                psi0: psi,
                kappa0: 0.0,
                kappa_rate: 0.0,
                length: along,
            });
            let e = segment_end(segs.last().unwrap());
            x = e.x;
            y = e.y;
        }
        if let Some(f) = fillets[i + 1] {
            let mut psi0 = psi;
            let mut push =
                |kind, kappa0, kappa_rate, length, psi0: &mut f64, x: &mut f64, y: &mut f64| {
                    let seg = PathSegment {
                        kind,
                        x0: *x,
                        y0: *y,
                        psi0: *psi0,
                        kappa0,
                        kappa_rate,
                        length,
                    };
                    let e = segment_end(&seg);
                    *x = e.x;
                    *y = e.y;
                    *psi0 = e.psi;
                    segs.push(seg);
                };
            push(
                SegmentKind::Clothoid,
                0.0,
                f.sharpness,
                f.clothoid_len,
                &mut psi0,
                &mut x,
                &mut y,
            );
            if f.arc_len > 0.0 {
                push(
                    SegmentKind::Arc,
                    f.kappa_peak,
                    0.0,
                    f.arc_len,
                    &mut psi0,
                    &mut x,
                    &mut y,
                );
            }
            push(
                SegmentKind::Clothoid,
                f.kappa_peak,
                -f.sharpness,
                f.clothoid_len,
                &mut psi0,
                &mut x,
                &mut y,
            );
            debug_assert!((wrap_angle(psi0 - psi - f.turn)).abs() < 1e-9);
        }
    }
    if segs.is_empty() {
        return Err(Error::Validation("path has zero length".into()));
    }
    Ok(segs)
}

/// Coordinated-turn bank angle for heading rate `psi_dot` at `speed`.
pub fn coordinated_turn_roll(psi_dot: f64, speed: f64) -> f64 {
    (psi_dot * speed / GRAVITY).atan()
}

/// True specific force in the body frame for a level curvilinear flight.
pub fn specific_force_body(
    theta: &Vector3<f64>,
    speed: f64,
    speed_dot: f64,
    psi_dot: f64,
) -> Vector3<f64> {
    let (sp, cp) = theta.z.sin_cos();
    let f_n = Vector3::new(
        speed_dot * cp - speed * psi_dot * sp,
        speed_dot * sp + speed * psi_dot * cp,
        -GRAVITY,
    );
    dcm_nav_to_body(theta) * f_n
}

/// Body rates of a coordinated turn at constant pitch.
pub fn body_rates(
    theta: &Vector3<f64>,
    speed: f64,
    speed_dot: f64,
    psi_dot: f64,
    psi_ddot: f64,
) -> Vector3<f64> {
    let (sf, cf) = theta.x.sin_cos();
    let (st, ct) = theta.y.sin_cos();
    let phi_dot = (psi_ddot * speed + psi_dot * speed_dot) / GRAVITY * cf * cf;
    Vector3::new(phi_dot - psi_dot * st, psi_dot * sf * ct, psi_dot * cf * ct)
}

/// A smoothed path flown at constant speed, queried by time.
#[derive(Debug, Clone)]
pub struct Trajectory {
    segments: Vec<PathSegment>,
    ends: Vec<f64>,
    speed: f64,
    altitude: f64,
    pitch_trim: f64,
}

impl Trajectory {
    pub fn new(
        segments: Vec<PathSegment>,
        speed: f64,
        altitude: f64,
        pitch_trim: f64,
    ) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Validation(
                "trajectory needs at least one segment".into(),
            ));
        }
        if !(speed > 0.0) {
            return Err(Error::Validation("speed must be positive".into()));
        }
        let mut ends = Vec::with_capacity(segments.len());
        let mut total = 0.0;
        for s in &segments {
            total += s.length;
            ends.push(total);
        }
        Ok(Self {
            segments,
            ends,
            speed,
            altitude,
            pitch_trim,
        })
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn length(&self) -> f64 {
        *self.ends.last().unwrap()
    }

    pub fn duration(&self) -> f64 {
        self.length() / self.speed
    }

    /// Times at which one segment hands over to the next.
    pub fn joint_times(&self) -> Vec<f64> {
        self.ends[..self.ends.len() - 1]
            .iter()
            .map(|e| e / self.speed)
            .collect()
    }

    /// Nominal state at time `t`; at a joint the ending segment is used.
    pub fn state_at(&self, t: f64) -> TrajectorySample {
        let s = (t * self.speed).clamp(0.0, self.length());
        let idx = self
            .ends
            .partition_point(|e| *e < s)
            .min(self.segments.len() - 1);
        let start = if idx == 0 { 0.0 } else { self.ends[idx - 1] };
        let seg = &self.segments[idx];
        let pt =
            clothoid_point((s - start).clamp(0.0, seg.length), seg).expect("clamped arc length");
        let v = self.speed;
        let psi_dot = v * pt.kappa;
        let psi_ddot = v * v * seg.kappa_rate;
        let theta = Vector3::new(
            coordinated_turn_roll(psi_dot, v),
            self.pitch_trim,
            wrap_angle(pt.psi),
        );
        TrajectorySample {
            t,
            p_n: Vector3::new(pt.x, pt.y, -self.altitude),
            v_n: Vector3::new(v * pt.psi.cos(), v * pt.psi.sin(), 0.0),
            theta,
            nu_b: specific_force_body(&theta, v, 0.0, psi_dot),
            omega_b: body_rates(&theta, v, 0.0, psi_dot, psi_ddot),
            kappa: pt.kappa,
        }
    }

    /// Uniform samples at `0, dt, 2dt, …` up to the duration.
    pub fn sample(&self, dt: f64) -> Result<Vec<TrajectorySample>> {
        if !(dt > 0.0) {
            return Err(Error::Validation("dt must be positive".into()));
        }
        let n = (self.duration() / dt + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| self.state_at(k as f64 * dt)).collect())
    }
}

/// Samples a segment chain at a fixed time step.
pub fn sample_trajectory(
    segments: &[PathSegment],
    speed: f64,
    dt: f64,
    altitude: f64,
    pitch_trim: f64,
) -> Result<Vec<TrajectorySample>> {
    Trajectory::new(segments.to_vec(), speed, altitude, pitch_trim)?.sample(dt)
}

/// Horizontal component of the inertial acceleration implied by a sample.
pub fn horizontal_acceleration(sample: &TrajectorySample) -> Vector2<f64> {
    let f_n = dcm_body_to_nav(&sample.theta) * sample.nu_b + Vector3::new(0.0, 0.0, GRAVITY);
    Vector2::new(f_n.x, f_n.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn seg(kind: SegmentKind, kappa0: f64, kappa_rate: f64, length: f64) -> PathSegment {
        PathSegment {
            kind,
            x0: 10.0,
            y0: -5.0,
            psi0: 0.3,
            kappa0,
            kappa_rate,
            length,
        }
    }

    #[test]
    fn straight_line_point() {
        let s = seg(SegmentKind::Line, 0.0, 0.0, 1000.0);
        let p = clothoid_point(400.0, &s).unwrap();
        assert_relative_eq!(p.x, 10.0 + 400.0 * 0.3f64.cos(), epsilon = 1e-9);
        assert_relative_eq!(p.y, -5.0 + 400.0 * 0.3f64.sin(), epsilon = 1e-9);
        assert!(matches!(clothoid_point(1001.0, &s), Err(Error::Domain(_))));
    }

    #[test]
    fn arc_matches_circle() {
        let k = 1.0 / 2000.0;
        let s = seg(SegmentKind::Arc, k, 0.0, 3000.0);
        let p = clothoid_point(3000.0, &s).unwrap();
        let psi1 = 0.3 + k * 3000.0;
        let cx = 10.0 - 0.3f64.sin() / k;
        let cy = -5.0 + 0.3f64.cos() / k;
        assert_relative_eq!(p.x, cx + psi1.sin() / k, epsilon = 1e-9);
        assert_relative_eq!(p.y, cy - psi1.cos() / k, epsilon = 1e-9);
    }

    #[test]
    fn clothoid_matches_rk4_oracle() {
        let s = seg(SegmentKind::Clothoid, 1e-4, 2e-8, 8000.0);
        let n = 80_000;
        let h = s.length / n as f64;
        let psi = |u: f64| s.psi0 + s.kappa0 * u + 0.5 * s.kappa_rate * u * u;
        let (mut x, mut y) = (s.x0, s.y0);
        for i in 0..n {
            let u = i as f64 * h;
            let k = [psi(u), psi(u + 0.5 * h), psi(u + h)];
            x += h / 6.0 * (k[0].cos() + 4.0 * k[1].cos() + k[2].cos());
            y += h / 6.0 * (k[0].sin() + 4.0 * k[1].sin() + k[2].sin());
        }
        let p = clothoid_point(s.length, &s).unwrap();
        assert!(
            (p.x - x).abs() < 1e-8 && (p.y - y).abs() < 1e-8,
            "{} {}",
            p.x - x,
            p.y - y
        );
        assert_relative_eq!(p.kappa, 1e-4 + 2e-8 * 8000.0);
    }

    #[test]
    fn roll_examples() {
        assert_eq!(coordinated_turn_roll(0.0, 200.0), 0.0);
        assert_relative_eq!(
            coordinated_turn_roll(GRAVITY / 150.0, 150.0),
            PI / 4.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            coordinated_turn_roll(0.04, 200.0),
            0.684_284_882_737_850_5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn collinear_path_is_one_line() {
        let path = WaypointPath {
            points: vec![
                Vector2::new(0.0, 0.0),
                Vector2::new(1000.0, 1000.0),
                Vector2::new(3000.0, 3000.0),
            ],
            altitude: 3500.0,
            speed: 200.0,
        };
        let segs = smooth_waypoints(&path, 1e-3, 1e-6).unwrap();
        assert!(segs
            .iter()
            .all(|s| s.kind == SegmentKind::Line && s.kappa0 == 0.0));
        let total: f64 = segs.iter().map(|s| s.length).sum();
        assert_relative_eq!(total, 3000.0 * 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn right_angle_has_trapezoidal_curvature() {
        let path = WaypointPath {
            points: vec![
                Vector2::new(0.0, 0.0),
                Vector2::new(20_000.0, 0.0),
                Vector2::new(20_000.0, 20_000.0),
            ],
            altitude: 3500.0,
            speed: 200.0,
        };
        let segs = smooth_waypoints(&path, 2e-4, 1e-7).unwrap();
        let kinds: Vec<_> = segs.iter().map(|s| s.kind).collect();
        use SegmentKind::*;
        assert_eq!(kinds, vec![Line, Clothoid, Arc, Clothoid, Line]);
        assert_relative_eq!(segs[2].kappa0, 2e-4);
        assert_relative_eq!(segs[1].kappa_rate, 1e-7);
        assert_relative_eq!(segs[3].kappa_rate, -1e-7);
        let end = segment_end(segs.last().unwrap());
        assert!((end.x - 20_000.0).abs() < 1e-6 && (end.y - 20_000.0).abs() < 1e-6);
    }

    #[test]
    fn shallow_turn_omits_arc() {
        let path = WaypointPath {
            points: vec![
                Vector2::new(0.0, 0.0),
                Vector2::new(50_000.0, 0.0),
                Vector2::new(100_000.0, 1000.0),
            ],
            altitude: 3500.0,
            speed: 200.0,
        };
        let segs = smooth_waypoints(&path, 2e-4, 1e-8).unwrap();
        assert!(segs.iter().all(|s| s.kind != SegmentKind::Arc));
        assert!(segs.iter().all(|s| s.kappa0.abs() <= 2e-4 + 1e-15));
    }

    #[test]
    fn fillet_that_does_not_fit_names_waypoint() {
        let path = WaypointPath {
            points: vec![
                Vector2::new(0.0, 0.0),
                Vector2::new(1000.0, 0.0),
                Vector2::new(1000.0, 1000.0),
                Vector2::new(0.0, 1000.0),
            ],
            altitude: 0.0,
            speed: 100.0,
        };
        match smooth_waypoints(&path, 1e-4, 1e-8) {
            Err(Error::InfeasibleSmoothing { index, .. }) => assert!(index == 1 || index == 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn straight_level_signals() {
        let segs = vec![PathSegment {
            kind: SegmentKind::Line,
            x0: 0.0,
            y0: 0.0,
            psi0: 0.7,
            kappa0: 0.0,
            kappa_rate: 0.0,
            length: 5000.0,
        }];
        let samples = sample_trajectory(&segs, 200.0, 0.5, 3500.0, 0.0).unwrap();
        assert_eq!(samples.len(), 51);
        for s in &samples {
            assert_relative_eq!(s.nu_b, Vector3::new(0.0, 0.0, -GRAVITY), epsilon = 1e-12);
            assert_relative_eq!(s.omega_b, Vector3::zeros(), epsilon = 1e-15);
            assert_relative_eq!(s.p_n.z, -3500.0);
        }
    }

    #[test]
    fn constant_arc_signals() {
        let k = 1.0 / 5000.0;
        let segs = vec![PathSegment {
            kind: SegmentKind::Arc,
            x0: 0.0,
            y0: 0.0,
            psi0: 0.0,
            kappa0: k,
            kappa_rate: 0.0,
            length: 10_000.0,
        }];
        let samples = sample_trajectory(&segs, 200.0, 1.0, 1000.0, 0.02).unwrap();
        let first = samples[0];
        for s in &samples {
            assert_relative_eq!(s.omega_b, first.omega_b, epsilon = 1e-14);
            assert_relative_eq!(s.nu_b, first.nu_b, epsilon = 1e-12);
            assert_relative_eq!(
                horizontal_acceleration(s).norm(),
                200.0 * 200.0 * k,
                max_relative = 1e-12
            );
            assert_relative_eq!(s.v_n.norm(), 200.0, max_relative = 1e-15);
            assert_eq!(s.theta.y, 0.02);
        }
    }

    #[test]
    fn speed_change_terms_rotate_into_body() {
        let theta = Vector3::new(0.0, 0.0, PI / 2.0);
        let f = specific_force_body(&theta, 100.0, 2.0, 0.0);
        assert_relative_eq!(f, Vector3::new(2.0, 0.0, -GRAVITY), epsilon = 1e-12);
        let w = body_rates(&Vector3::new(0.3, 0.0, 0.0), 100.0, 1.0, 0.05, 0.0);
        assert_relative_eq!(w.x, 0.05 / GRAVITY * 0.3f64.cos().powi(2), epsilon = 1e-15);
    }

    #[test]
    fn joint_uses_ending_segment() {
        let segs = vec![
            PathSegment {
                kind: SegmentKind::Line,
                x0: 0.0,
                y0: 0.0,
                psi0: 0.0,
                kappa0: 0.0,
                kappa_rate: 0.0,
                length: 1000.0,
            },
            PathSegment {
                kind: SegmentKind::Clothoid,
                x0: 1000.0,
                y0: 0.0,
                psi0: 0.0,
                kappa0: 0.0,
                kappa_rate: 1e-7,
                length: 1000.0,
            },
        ];
        let traj = Trajectory::new(segs, 100.0, 0.0, 0.0).unwrap();
        assert_eq!(traj.joint_times(), vec![10.0]);
        assert_eq!(traj.state_at(10.0).omega_b.x, 0.0);
        assert!(traj.state_at(10.0 + 1e-6).omega_b.x > 0.0);
    }
}
