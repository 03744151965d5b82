//! Aided INS error covariance.
//!
//! The 15-state error vector is `[δp, δv, δθ, δb_a, δb_g]` with the attitude
//! error defined by `T_true = (I − [δθ×]) T̂` for the body-to-NED rotation.
//! Covariance is propagated with Lear's second order transition matrix and
//! the integrated process noise of the strapdown error model, then updated
//! with position, altitude and heading aiding in Joseph form.

use crate::math::{skew, symmetrize, Matrix15, Matrix6, GRAVITY};
use crate::trajectory::TrajectorySample;
use crate::{Error, Result};
use nalgebra::{DMatrix, Matrix3, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

const DEG: f64 = std::f64::consts::PI / 180.0;
const HOUR: f64 = 3600.0;

/// IMU error model: white noise PSDs plus first-order Gauss-Markov biases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuSpec {
    /// Accelerometer white noise PSD, (m/s²)²·s.
    pub q_nu: f64,
    /// Gyro white noise PSD, (rad/s)²·s.
    pub q_omega: f64,
    pub tau_a: f64,
    pub tau_g: f64,
    /// Accelerometer bias steady-state σ, m/s².
    pub sigma_a_ss: f64,
    /// Gyro bias steady-state σ, rad/s.
    pub sigma_g_ss: f64,
}

impl ImuSpec {
    /// Builds a spec from datasheet style 3σ figures: velocity random walk in
    /// m/s/√hr, accelerometer bias in g, angle random walk in deg/√hr and gyro
    /// bias in deg/hr.
    pub fn from_three_sigma(
        vrw_m_s_sqrt_hr: f64,
        accel_bias_g: f64,
        arw_deg_sqrt_hr: f64,
        gyro_bias_deg_hr: f64,
        tau_a: f64,
        tau_g: f64,
    ) -> Self {
        let vrw = vrw_m_s_sqrt_hr / 3.0 / HOUR.sqrt();
        let arw = arw_deg_sqrt_hr / 3.0 * DEG / HOUR.sqrt();
        Self {
            q_nu: vrw * vrw,
            q_omega: arw * arw,
            tau_a,
            tau_g,
            sigma_a_ss: accel_bias_g / 3.0 * GRAVITY,
            sigma_g_ss: gyro_bias_deg_hr / 3.0 * DEG / HOUR,
        }
    }

    /// Industrial grade preset with one-hour bias correlation times.
    pub fn industrial() -> Self {
        Self::from_three_sigma(0.1, 0.001, 0.2, 10.0, HOUR, HOUR)
    }

    /// Tactical grade preset with one-hour bias correlation times.
    pub fn tactical() -> Self {
        Self::from_three_sigma(0.03, 0.0001, 0.05, 1.0, HOUR, HOUR)
    }

    /// Accelerometer bias driving noise PSD `2σ²/τ`.
    pub fn q_a(&self) -> f64 {
        2.0 * self.sigma_a_ss * self.sigma_a_ss / self.tau_a
    }

    /// Gyro bias driving noise PSD `2σ²/τ`.
    pub fn q_g(&self) -> f64 {
        2.0 * self.sigma_g_ss * self.sigma_g_ss / self.tau_g
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.q_nu,
            self.q_omega,
            self.tau_a,
            self.tau_g,
            self.sigma_a_ss,
            self.sigma_g_ss,
        ];
        if all.iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Validation(
                "IMU parameters must be positive and finite".into(),
            ))
        }
    }
}

/// Axis-aligned rectangle in the north/east plane, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeRect {
    pub n_min: f64,
    pub n_max: f64,
    pub e_min: f64,
    pub e_max: f64,
}

impl NeRect {
    pub fn contains(&self, n: f64, e: f64) -> bool {
        n >= self.n_min && n <= self.n_max && e >= self.e_min && e <= self.e_max
    }
}

/// Aiding measurement noise, rates and GPS-denied areas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasSpec {
    pub sigma_n: f64,
    pub sigma_e: f64,
    pub sigma_d: f64,
    pub sigma_h: f64,
    pub sigma_psi: f64,
    pub rate_position: f64,
    pub rate_altitude: f64,
    pub rate_heading: f64,
    pub gps_denied: Vec<NeRect>,
}

impl MeasSpec {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.sigma_n,
            self.sigma_e,
            self.sigma_d,
            self.sigma_h,
            self.sigma_psi,
            self.rate_position,
            self.rate_altitude,
            self.rate_heading,
        ];
        if !all.iter().all(|v| *v > 0.0 && v.is_finite()) {
            return Err(Error::Validation(
                "measurement sigmas and rates must be positive".into(),
            ));
        }
        for r in &self.gps_denied {
            if !(r.n_min < r.n_max && r.e_min < r.e_max) {
                return Err(Error::Validation(
                    "GPS-denied rectangle has an empty extent".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn denied(&self, n: f64, e: f64) -> bool {
        self.gps_denied.iter().any(|r| r.contains(n, e))
    }

    /// Number of trajectory steps between epochs of a measurement type.
    pub fn period_steps(&self, kind: MeasKind, dt: f64) -> usize {
        let rate = match kind {
            MeasKind::Position => self.rate_position,
            MeasKind::Altitude => self.rate_altitude,
            MeasKind::Heading => self.rate_heading,
        };
        ((1.0 / (rate * dt)).round() as usize).max(1)
    }

    /// Measurement types processed at step `k` of a trajectory sampled every `dt`.
    pub fn epochs_at(&self, k: usize, dt: f64, n: f64, e: f64) -> Vec<MeasKind> {
        if k == 0 {
            return Vec::new();
        }
        let denied = self.denied(n, e);
        MeasKind::ALL
            .into_iter()
            .filter(|kind| k.is_multiple_of(self.period_steps(*kind, dt)))
            .filter(|kind| !(denied && matches!(kind, MeasKind::Position | MeasKind::Heading)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasKind {
    Position,
    Altitude,
    Heading,
}

impl MeasKind {
    pub const ALL: [MeasKind; 3] = [MeasKind::Position, MeasKind::Altitude, MeasKind::Heading];

    pub fn dim(self) -> usize {
        match self {
            MeasKind::Position => 3,
            _ => 1,
        }
    }
}

/// Error-state covariance over `[δp, δv, δθ, δb_a, δb_g]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavCovariance {
    pub p: Matrix15,
}

impl NavCovariance {
    pub fn zeros() -> Self {
        Self {
            p: Matrix15::zeros(),
        }
    }

    /// Diagonal initial covariance with biases at their steady-state spread.
    pub fn initial(sigma_p: f64, sigma_v: f64, sigma_theta: f64, imu: &ImuSpec) -> Self {
        let mut p = Matrix15::zeros();
        let sig = [
            sigma_p,
            sigma_v,
            sigma_theta,
            imu.sigma_a_ss,
            imu.sigma_g_ss,
        ];
        for (blk, s) in sig.iter().enumerate() {
            for i in 0..3 {
                p[(3 * blk + i, 3 * blk + i)] = s * s;
            }
        }
        Self { p }
    }

    /// One-sigma marginals.
    pub fn sigmas(&self) -> [f64; 15] {
        std::array::from_fn(|i| self.p[(i, i)].max(0.0).sqrt())
    }

    pub fn position_trace(&self) -> f64 {
        self.p[(0, 0)] + self.p[(1, 1)] + self.p[(2, 2)]
    }
}

fn check_rotation(t: &Matrix3<f64>) -> Result<()> {
    if (t.transpose() * t - Matrix3::identity()).norm() < 1e-9 {
        Ok(())
    } else {
        Err(Error::Validation(
            "rotation matrix is not orthonormal".into(),
        ))
    }
}

/// Linearized navigation error dynamics `F̂`.
pub fn nav_dynamics_matrix(
    t_b_n: &Matrix3<f64>,
    nu_hat_b: &Vector3<f64>,
    tau_a: f64,
    tau_g: f64,
) -> Result<Matrix15> {
    check_rotation(t_b_n)?;
    let mut f = Matrix15::zeros();
    f.fixed_view_mut::<3, 3>(0, 3)
        .copy_from(&Matrix3::identity());
    f.fixed_view_mut::<3, 3>(3, 6)
        .copy_from(&skew(&(t_b_n * nu_hat_b)));
    f.fixed_view_mut::<3, 3>(3, 9).copy_from(&(-t_b_n));
    f.fixed_view_mut::<3, 3>(6, 12).copy_from(t_b_n);
    f.fixed_view_mut::<3, 3>(9, 9)
        .copy_from(&(-Matrix3::identity() / tau_a));
    f.fixed_view_mut::<3, 3>(12, 12)
        .copy_from(&(-Matrix3::identity() / tau_g));
    Ok(f)
}

/// Lear transition matrix between two consecutive dynamics matrices.
///
/// `Φ ≈ I + (F_k + F_{k−1})Δt/2 + F_k F_{k−1} Δt²/2`, with the bias
/// diagonal replaced by its exact exponential.
pub fn stm_lear(f_k: &Matrix15, f_km1: &Matrix15, dt: f64) -> Matrix15 {
    let mut phi = Matrix15::identity() + (f_k + f_km1) * (0.5 * dt) + f_k * f_km1 * (0.5 * dt * dt);
    for i in 9..15 {
        phi[(i, i)] = (0.5 * dt * (f_k[(i, i)] + f_km1[(i, i)])).exp();
    }
    phi
}

/// `∫₀ᵘ (u − s)ⁿ/n! e^{−s/τ} ds` by its power series in `u/τ`.
fn fogm_kernel(n: i32, u: f64, tau: f64) -> f64 {
    let r = -u / tau;
    let mut fact = 1.0;
    for k in 1..=n + 1 {
        fact *= k as f64;
    }
    let mut term = u.powi(n + 1) / fact;
    let mut sum = term;
    for m in 1..200 {
        term *= r / (n + 1 + m) as f64;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Gauss-Legendre integral of `f` over `[0, dt]`.
fn integrate(dt: f64, f: impl Fn(f64) -> f64) -> f64 {
    const X: [f64; 5] = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    const W: [f64; 5] = [
        0.295_524_224_714_752_87,
        0.269_266_719_309_996_35,
        0.219_086_362_515_982_04,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_14,
    ];
    let h = 0.5 * dt;
    X.iter()
        .zip(W.iter())
        .map(|(x, w)| w * (f(h * (1.0 - x)) + f(h * (1.0 + x))))
        .sum::<f64>()
        * h
}

/// Discrete process noise `Q_{k−1} = ∫ Φ(t_k, τ) B Q Bᵀ Φᵀ(t_k, τ) dτ` over one step.
///
/// The vehicle block uses the constant-coefficient transition over the step
/// evaluated at the mean rotation and mean NED specific force. The bias
/// columns carry the exact exponential decay through the scalar kernels
/// `∫ (u − s)ⁿ/n! e^{−s/τ} ds`.
pub fn integrated_process_noise(
    t_k: &Matrix3<f64>,
    t_km1: &Matrix3<f64>,
    nu_k: &Vector3<f64>,
    nu_km1: &Vector3<f64>,
    imu: &ImuSpec,
    dt: f64,
) -> Matrix15 {
    let t = 0.5 * (t_k + t_km1);
    let v = skew(&(0.5 * (t_k * nu_k + t_km1 * nu_km1)));
    let ttt = t * t.transpose();
    let n_nu = imu.q_nu * ttt;
    let n_om = imu.q_omega * ttt;
    let vn = v * n_om;
    let vnv = vn * v.transpose();
    let (d2, d3, d4, d5) = (dt * dt, dt.powi(3), dt.powi(4), dt.powi(5));

    let mut q = Matrix15::zeros();
    let mut put = |r: usize, c: usize, m: Matrix3<f64>| {
        let cur = q.fixed_view::<3, 3>(r, c).into_owned();
        q.fixed_view_mut::<3, 3>(r, c).copy_from(&(cur + m));
        if r != c {
            let cur = q.fixed_view::<3, 3>(c, r).into_owned();
            q.fixed_view_mut::<3, 3>(c, r)
                .copy_from(&(cur + m.transpose()));
        }
    };

    put(0, 0, d3 / 3.0 * n_nu + d5 / 20.0 * vnv);
    put(0, 3, d2 / 2.0 * n_nu + d4 / 8.0 * vnv);
    put(0, 6, d3 / 6.0 * vn);
    put(3, 3, dt * n_nu + d3 / 3.0 * vnv);
    put(3, 6, d2 / 2.0 * vn);
    put(6, 6, dt * n_om);

    let (qa, qg) = (imu.q_a(), imu.q_g());
    if qa > 0.0 {
        let ta = imu.tau_a;
        let i0 = |u: f64| fogm_kernel(0, u, ta);
        let i1 = |u: f64| fogm_kernel(1, u, ta);
        let e = |u: f64| (-u / ta).exp();
        put(0, 0, qa * integrate(dt, |u| i1(u) * i1(u)) * ttt);
        put(0, 3, qa * integrate(dt, |u| i1(u) * i0(u)) * ttt);
        put(3, 3, qa * integrate(dt, |u| i0(u) * i0(u)) * ttt);
        put(0, 9, -qa * integrate(dt, |u| i1(u) * e(u)) * t);
        put(3, 9, -qa * integrate(dt, |u| i0(u) * e(u)) * t);
        put(
            9,
            9,
            qa * ta / 2.0 * (1.0 - (-2.0 * dt / ta).exp()) * Matrix3::identity(),
        );
    }
    if qg > 0.0 {
        let tg = imu.tau_g;
        let i0 = |u: f64| fogm_kernel(0, u, tg);
        let i1 = |u: f64| fogm_kernel(1, u, tg);
        let i2 = |u: f64| fogm_kernel(2, u, tg);
        let e = |u: f64| (-u / tg).exp();
        let vt = v * t;
        let vtttv = v * ttt * v.transpose();
        let vttt = v * ttt;
        put(0, 0, qg * integrate(dt, |u| i2(u) * i2(u)) * vtttv);
        put(0, 3, qg * integrate(dt, |u| i2(u) * i1(u)) * vtttv);
        put(0, 6, qg * integrate(dt, |u| i2(u) * i0(u)) * vttt);
        put(3, 3, qg * integrate(dt, |u| i1(u) * i1(u)) * vtttv);
        put(3, 6, qg * integrate(dt, |u| i1(u) * i0(u)) * vttt);
        put(6, 6, qg * integrate(dt, |u| i0(u) * i0(u)) * ttt);
        put(0, 12, qg * integrate(dt, |u| i2(u) * e(u)) * vt);
        put(3, 12, qg * integrate(dt, |u| i1(u) * e(u)) * vt);
        put(6, 12, qg * integrate(dt, |u| i0(u) * e(u)) * t);
        put(
            12,
            12,
            qg * tg / 2.0 * (1.0 - (-2.0 * dt / tg).exp()) * Matrix3::identity(),
        );
    }
    symmetrize(&q)
}

/// `P⁻ = Φ P Φᵀ + Q`.
pub fn propagate(p: &NavCovariance, phi: &Matrix15, q: &Matrix15) -> NavCovariance {
    NavCovariance {
        p: symmetrize(&(phi * p.p * phi.transpose() + q)),
    }
}

/// Measurement Jacobian for one aiding type.
pub fn measurement_matrix(kind: MeasKind) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(kind.dim(), 15);
    match kind {
        MeasKind::Position => {
            for i in 0..3 {
                h[(i, i)] = 1.0;
            }
        }
        MeasKind::Altitude => h[(0, 2)] = -1.0,
        MeasKind::Heading => h[(0, 8)] = -1.0,
    }
    h
}

/// Measurement noise covariance for one aiding type.
pub fn measurement_noise(kind: MeasKind, meas: &MeasSpec) -> DMatrix<f64> {
    match kind {
        MeasKind::Position => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            meas.sigma_n * meas.sigma_n,
            meas.sigma_e * meas.sigma_e,
            meas.sigma_d * meas.sigma_d,
        ])),
        MeasKind::Altitude => DMatrix::from_element(1, 1, meas.sigma_h * meas.sigma_h),
        MeasKind::Heading => DMatrix::from_element(1, 1, meas.sigma_psi * meas.sigma_psi),
    }
}

fn to_dyn(p: &Matrix15) -> DMatrix<f64> {
    DMatrix::from_column_slice(15, 15, p.as_slice())
}

fn from_dyn(p: &DMatrix<f64>) -> Matrix15 {
    Matrix15::from_column_slice(p.as_slice())
}

/// Optimal gain and Joseph-form update for an arbitrary measurement model.
pub fn kalman_update(
    p: &NavCovariance,
    h: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<(NavCovariance, DMatrix<f64>)> {
    let m = h.nrows();
    if h.ncols() != 15 || r.nrows() != m || r.ncols() != m {
        return Err(Error::Validation(
            "measurement model shapes do not match".into(),
        ));
    }
    let pd = to_dyn(&p.p);
    let pht = &pd * h.transpose();
    let s = h * &pht + r;
    let s_inv = s
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Numerical("innovation covariance is not invertible".into()))?;
    let k = pht * s_inv;
    let ikh = DMatrix::identity(15, 15) - &k * h;
    let joseph = &ikh * &pd * ikh.transpose() + &k * r * k.transpose();
    Ok((
        NavCovariance {
            p: symmetrize(&from_dyn(&joseph)),
        },
        k,
    ))
}

/// Joseph-form update for one aiding type.
pub fn measurement_update(
    p: &NavCovariance,
    kind: MeasKind,
    meas: &MeasSpec,
) -> Result<NavCovariance> {
    kalman_update(p, &measurement_matrix(kind), &measurement_noise(kind, meas)).map(|(p, _)| p)
}

/// One measurement processed by the filter.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRecord {
    /// Trajectory sample index at which the update was applied.
    pub step: usize,
    pub kind: MeasKind,
    pub gain: DMatrix<f64>,
}

/// Covariance history and gain schedule of a filter run.
#[derive(Debug, Clone)]
pub struct FilterRun {
    pub times: Vec<f64>,
    /// Covariance at each sample after that sample's updates.
    pub covariances: Vec<NavCovariance>,
    pub updates: Vec<UpdateRecord>,
}

/// Nominal dynamics matrix at a trajectory sample.
pub fn sample_dynamics(sample: &TrajectorySample, imu: &ImuSpec) -> Result<Matrix15> {
    nav_dynamics_matrix(
        &crate::math::dcm_body_to_nav(&sample.theta),
        &sample.nu_b,
        imu.tau_a,
        imu.tau_g,
    )
}

fn check_uniform(samples: &[TrajectorySample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Validation("trajectory is empty".into()));
    }
    if samples.len() == 1 {
        return Ok(0.0);
    }
    let dt = samples[1].t - samples[0].t;
    if !(dt > 0.0) {
        return Err(Error::Validation("trajectory time must increase".into()));
    }
    for w in samples.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-6 * dt {
            return Err(Error::Validation(
                "trajectory is not uniformly sampled".into(),
            ));
        }
    }
    Ok(dt)
}

/// Covariance recursion along a nominal trajectory, keeping the gains.
pub fn run_filter(
    samples: &[TrajectorySample],
    p0: &NavCovariance,
    imu: &ImuSpec,
    meas: &MeasSpec,
) -> Result<FilterRun> {
    let dt = check_uniform(samples)?;
    let mut p = *p0;
    let mut times = Vec::with_capacity(samples.len());
    let mut covs = Vec::with_capacity(samples.len());
    let mut updates = Vec::new();
    times.push(samples[0].t);
    covs.push(p);
    let mut f_prev = sample_dynamics(&samples[0], imu)?;
    let mut t_prev = crate::math::dcm_body_to_nav(&samples[0].theta);
    for k in 1..samples.len() {
        let s = &samples[k];
        let t_k = crate::math::dcm_body_to_nav(&s.theta);
        let f_k = nav_dynamics_matrix(&t_k, &s.nu_b, imu.tau_a, imu.tau_g)?;
        let phi = stm_lear(&f_k, &f_prev, dt);
        let q = integrated_process_noise(&t_k, &t_prev, &s.nu_b, &samples[k - 1].nu_b, imu, dt);
        p = propagate(&p, &phi, &q);
        for kind in meas.epochs_at(k, dt, s.p_n.x, s.p_n.y) {
            let (pp, gain) = kalman_update(
                &p,
                &measurement_matrix(kind),
                &measurement_noise(kind, meas),
            )?;
            p = pp;
            updates.push(UpdateRecord {
                step: k,
                kind,
                gain,
            });
        }
        if !p.p.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical(format!(
                "covariance became non-finite at t = {}",
                s.t
            )));
        }
        times.push(s.t);
        covs.push(p);
        f_prev = f_k;
        t_prev = t_k;
    }
    Ok(FilterRun {
        times,
        covariances: covs,
        updates,
    })
}

/// Covariance history `(t, P⁺)` along a nominal trajectory.
pub fn run_covariance(
    samples: &[TrajectorySample],
    p0: &NavCovariance,
    imu: &ImuSpec,
    meas: &MeasSpec,
) -> Result<Vec<(f64, NavCovariance)>> {
    let run = run_filter(samples, p0, imu, meas)?;
    Ok(run.times.into_iter().zip(run.covariances).collect())
}

/// Selector `M_a` from the error state to `[δp, δΘ]`.
///
/// The Euler error is `2 δq₁:₃` at the nominal and the error quaternion
/// vector part is `−½ δθ`, so the attitude block is `−I`.
pub fn pose_selector() -> SMatrix<f64, 6, 15> {
    let mut m = SMatrix::<f64, 6, 15>::zeros();
    for i in 0..3 {
        m[(i, i)] = 1.0;
        m[(3 + i, 6 + i)] = -1.0;
    }
    m
}

/// Aircraft pose covariance `C_aa = M_a P M_aᵀ`.
pub fn aircraft_covariance(p: &NavCovariance) -> Matrix6 {
    let m = pose_selector();
    symmetrize(&(m * p.p * m.transpose()))
}

/// Jacobian of the Euler angles of the quaternion `[1, q₁, q₂, q₃]` with
/// respect to its vector part.
pub fn quat_to_euler_jacobian(q: &Vector3<f64>) -> Matrix3<f64> {
    let (q1, q2, q3) = (q.x, q.y, q.z);
    let datan = |n: f64, d: f64, dn: [f64; 3], dd: [f64; 3]| -> [f64; 3] {
        let den = n * n + d * d;
        std::array::from_fn(|i| (dn[i] * d - n * dd[i]) / den)
    };
    let roll = datan(
        2.0 * (q1 + q2 * q3),
        1.0 - 2.0 * (q1 * q1 + q2 * q2),
        [2.0, 2.0 * q3, 2.0 * q2],
        [-4.0 * q1, -4.0 * q2, 0.0],
    );
    let u = 2.0 * (q2 - q3 * q1);
    let root = (1.0 - u * u).sqrt();
    let pitch = [-2.0 * q3 / root, 2.0 / root, -2.0 * q1 / root];
    let yaw = datan(
        2.0 * (q3 + q1 * q2),
        1.0 - 2.0 * (q2 * q2 + q3 * q3),
        [2.0 * q2, 2.0 * q1, 2.0],
        [0.0, -4.0 * q2, -4.0 * q3],
    );
    Matrix3::from_rows(
        &[roll.into(), pitch.into(), yaw.into()].map(|r: Vector3<f64>| r.transpose()),
    )
}
