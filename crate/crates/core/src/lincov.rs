//! Linear covariance analysis over augmented truth and navigation dispersions.
//!
//! The augmented state stacks the 15-state truth dispersion `δx` and the
//! 15-state navigation dispersion `δx̂`. Its covariance `C_A` is propagated
//! with RK4 on the Lyapunov equation and updated with a gain schedule taken
//! once from the all-sources navigation filter, which keeps every per-source
//! run linear in its noise input. The true navigation error covariance is
//! `P_true = [−I I] C_A [−I I]ᵀ`.

use crate::ins::{
    aircraft_covariance, measurement_matrix, measurement_noise, nav_dynamics_matrix, run_filter,
    MeasKind, NavCovariance, UpdateRecord,
};
use crate::math::{dcm_body_to_nav, Matrix15, Matrix6};
use crate::radar::{jacobian_aircraft, jacobian_radar, pd_at, pd_variance};
use crate::scenario::Scenario;
use crate::trajectory::TrajectorySample;
use crate::{Error, Result};
use nalgebra::{DMatrix, Matrix3, Matrix4, SMatrix, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type Matrix30 = SMatrix<f64, 30, 30>;
pub type Matrix30x6 = SMatrix<f64, 30, 6>;
pub type Matrix15x6 = SMatrix<f64, 15, 6>;
pub type Matrix6x15 = SMatrix<f64, 6, 15>;

/// Independent error sources that can be switched on and off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    InitialConditions,
    AccelNoise,
    GyroNoise,
    AccelBias,
    GyroBias,
    PosMeasNoise,
    AltMeasNoise,
    HeadingMeasNoise,
    RadarPosition,
    RadarConstant,
}

impl Source {
    pub const ALL: [Source; 10] = [
        Source::InitialConditions,
        Source::AccelNoise,
        Source::GyroNoise,
        Source::AccelBias,
        Source::GyroBias,
        Source::PosMeasNoise,
        Source::AltMeasNoise,
        Source::HeadingMeasNoise,
        Source::RadarPosition,
        Source::RadarConstant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Source::InitialConditions => "initial_conditions",
            Source::AccelNoise => "accel_noise",
            Source::GyroNoise => "gyro_noise",
            Source::AccelBias => "accel_bias",
            Source::GyroBias => "gyro_bias",
            Source::PosMeasNoise => "pos_meas_noise",
            Source::AltMeasNoise => "alt_meas_noise",
            Source::HeadingMeasNoise => "heading_meas_noise",
            Source::RadarPosition => "radar_position",
            Source::RadarConstant => "radar_constant",
        }
    }

    /// Sources that only act through the radar covariance.
    pub fn is_radar(self) -> bool {
        matches!(self, Source::RadarPosition | Source::RadarConstant)
    }
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Source {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Source::ALL
            .into_iter()
            .find(|src| src.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown noise source `{s}`")))
    }
}

/// On/off flag per error source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NoiseSourceSet {
    pub initial_conditions: bool,
    pub accel_noise: bool,
    pub gyro_noise: bool,
    pub accel_bias: bool,
    pub gyro_bias: bool,
    pub pos_meas_noise: bool,
    pub alt_meas_noise: bool,
    pub heading_meas_noise: bool,
    pub radar_position: bool,
    pub radar_constant: bool,
}

impl NoiseSourceSet {
    pub fn all() -> Self {
        Self::from_fn(|_| true)
    }

    pub fn none() -> Self {
        Self::from_fn(|_| false)
    }

    pub fn only(source: Source) -> Self {
        Self::from_fn(|s| s == source)
    }

    pub fn from_fn(f: impl Fn(Source) -> bool) -> Self {
        let mut set = Self {
            initial_conditions: false,
            accel_noise: false,
            gyro_noise: false,
            accel_bias: false,
            gyro_bias: false,
            pos_meas_noise: false,
            alt_meas_noise: false,
            heading_meas_noise: false,
            radar_position: false,
            radar_constant: false,
        };
        for s in Source::ALL {
            set.set(s, f(s));
        }
        set
    }

    fn flag(&mut self, s: Source) -> &mut bool {
        match s {
            Source::InitialConditions => &mut self.initial_conditions,
            Source::AccelNoise => &mut self.accel_noise,
            Source::GyroNoise => &mut self.gyro_noise,
            Source::AccelBias => &mut self.accel_bias,
            Source::GyroBias => &mut self.gyro_bias,
            Source::PosMeasNoise => &mut self.pos_meas_noise,
            Source::AltMeasNoise => &mut self.alt_meas_noise,
            Source::HeadingMeasNoise => &mut self.heading_meas_noise,
            Source::RadarPosition => &mut self.radar_position,
            Source::RadarConstant => &mut self.radar_constant,
        }
    }

    pub fn set(&mut self, s: Source, on: bool) {
        *self.flag(s) = on;
    }

    pub fn is_on(&self, s: Source) -> bool {
        *self.clone().flag(s)
    }

    pub fn active(&self) -> Vec<Source> {
        Source::ALL.into_iter().filter(|s| self.is_on(*s)).collect()
    }

    /// True when any source feeds the navigation dispersions.
    pub fn any_navigation(&self) -> bool {
        self.active().iter().any(|s| !s.is_radar())
    }
}

/// Covariance of `[δx; δx̂]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentedCovariance {
    pub c: Matrix30,
}

impl AugmentedCovariance {
    pub fn zeros() -> Self {
        Self {
            c: Matrix30::zeros(),
        }
    }

    pub fn truth_block(&self) -> Matrix15 {
        self.c.fixed_view::<15, 15>(0, 0).into_owned()
    }

    pub fn nav_block(&self) -> Matrix15 {
        self.c.fixed_view::<15, 15>(15, 15).into_owned()
    }
}

/// Truth dispersion dynamics `F_x`; truth biases reach the navigation states
/// only through the IMU measurement path.
pub fn truth_dispersion_matrix(
    t_bar: &Matrix3<f64>,
    nu_b: &Vector3<f64>,
    tau_a: f64,
    tau_g: f64,
) -> Result<Matrix15> {
    let mut f = nav_dynamics_matrix(t_bar, nu_b, tau_a, tau_g)?;
    f.fixed_view_mut::<3, 3>(3, 9).fill(0.0);
    f.fixed_view_mut::<3, 3>(6, 12).fill(0.0);
    Ok(f)
}

/// Sensitivity `F̂_ỹ` of the navigation dispersions to IMU errors `[accel; gyro]`.
pub fn imu_input_matrix(t_hat: &Matrix3<f64>) -> Matrix15x6 {
    let mut m = Matrix15x6::zeros();
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(t_hat);
    m.fixed_view_mut::<3, 3>(6, 3).copy_from(&(-t_hat));
    m
}

/// `C_x`, selecting the truth bias states.
pub fn bias_selector() -> Matrix6x15 {
    let mut m = Matrix6x15::zeros();
    for i in 0..6 {
        m[(i, 9 + i)] = 1.0;
    }
    m
}

/// `B`, injecting bias driving noise into the truth bias rows.
pub fn bias_noise_input() -> Matrix15x6 {
    bias_selector().transpose()
}

/// Augmented dynamics `𝓕`, IMU noise input `𝓖` and truth noise input `𝓦`.
pub fn build_augmented(
    f_x: &Matrix15,
    f_hat: &Matrix15,
    f_y: &Matrix15x6,
    c_x: &Matrix6x15,
) -> (Matrix30, Matrix30x6, Matrix30x6) {
    let mut f = Matrix30::zeros();
    f.fixed_view_mut::<15, 15>(0, 0).copy_from(f_x);
    f.fixed_view_mut::<15, 15>(15, 0).copy_from(&(f_y * c_x));
    f.fixed_view_mut::<15, 15>(15, 15).copy_from(f_hat);
    let mut g = Matrix30x6::zeros();
    g.fixed_view_mut::<15, 6>(15, 0).copy_from(f_y);
    let mut w = Matrix30x6::zeros();
    w.fixed_view_mut::<15, 6>(0, 0)
        .copy_from(&bias_noise_input());
    (f, g, w)
}

/// Nonzero entries of a dynamics matrix.
#[derive(Debug, Clone)]
struct Sparse(Vec<(usize, usize, f64)>);

impl Sparse {
    fn from_dense(m: &Matrix30) -> Self {
        let mut v = Vec::with_capacity(80);
        for j in 0..30 {
            for i in 0..30 {
                let x = m[(i, j)];
                if x != 0.0 {
                    v.push((i, j, x));
                }
            }
        }
        Sparse(v)
    }

    /// `F C + C Fᵀ + Q` for symmetric `C`.
    fn lyapunov(&self, c: &Matrix30, q: &Matrix30) -> Matrix30 {
        let mut y = Matrix30::zeros();
        for &(i, j, v) in &self.0 {
            let src = c.column(j).into_owned();
            let mut dst = y.column_mut(i);
            dst.axpy(v, &src, 1.0);
        }
        y + y.transpose() + q
    }
}

fn rk4_lyapunov(c: &Matrix30, f: [&Sparse; 3], q: [&Matrix30; 3], dt: f64) -> Matrix30 {
    let k1 = f[0].lyapunov(c, q[0]);
    let k2 = f[1].lyapunov(&(c + k1 * (0.5 * dt)), q[1]);
    let k3 = f[1].lyapunov(&(c + k2 * (0.5 * dt)), q[1]);
    let k4 = f[2].lyapunov(&(c + k3 * dt), q[2]);
    let next = c + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (dt / 6.0);
    0.5 * (next + next.transpose())
}

/// One RK4 step of `Ċ_A = 𝓕C_A + C_A𝓕ᵀ + 𝓖S_η𝓖ᵀ + 𝓦S_w𝓦ᵀ` with constant coefficients.
pub fn propagate_augmented(
    c_a: &AugmentedCovariance,
    f: &Matrix30,
    g: &Matrix30x6,
    w: &Matrix30x6,
    s_eta: &Matrix6,
    s_w: &Matrix6,
    dt: f64,
) -> AugmentedCovariance {
    let q = g * s_eta * g.transpose() + w * s_w * w.transpose();
    let sf = Sparse::from_dense(f);
    AugmentedCovariance {
        c: rk4_lyapunov(&c_a.c, [&sf, &sf, &sf], [&q, &q, &q], dt),
    }
}

/// `C_A⁺ = 𝓐 C_A 𝓐ᵀ + 𝓑 R 𝓑ᵀ` with `𝓐 = [[I, 0], [KH, I − KH]]` and `𝓑 = [0; K]`.
pub fn update_augmented(
    c_a: &AugmentedCovariance,
    k: &DMatrix<f64>,
    h: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<AugmentedCovariance> {
    let m = h.nrows();
    if k.nrows() != 15 || k.ncols() != m || h.ncols() != 15 || r.nrows() != m || r.ncols() != m {
        return Err(Error::Validation(
            "augmented update shapes do not match".into(),
        ));
    }
    let kh = k * h;
    let mut a = DMatrix::<f64>::identity(30, 30);
    a.view_mut((15, 0), (15, 15)).copy_from(&kh);
    a.view_mut((15, 15), (15, 15))
        .copy_from(&(DMatrix::identity(15, 15) - &kh));
    let c = DMatrix::from_column_slice(30, 30, c_a.c.as_slice());
    let mut next = &a * c * a.transpose();
    let krk = k * r * k.transpose();
    let mut nav = next.view_mut((15, 15), (15, 15));
    nav += &krk;
    let mut out = Matrix30::from_column_slice(next.as_slice());
    // The truth block passes through untouched.
    out.fixed_view_mut::<15, 15>(0, 0)
        .copy_from(&c_a.c.fixed_view::<15, 15>(0, 0));
    Ok(AugmentedCovariance {
        c: 0.5 * (out + out.transpose()),
    })
}

/// `P_true = C_δδ − C_δx̂δ − C_δδx̂ + C_x̂x̂`.
pub fn true_nav_covariance(c_a: &AugmentedCovariance) -> Matrix15 {
    let c = &c_a.c;
    let tt = c.fixed_view::<15, 15>(0, 0);
    let tn = c.fixed_view::<15, 15>(0, 15);
    let nt = c.fixed_view::<15, 15>(15, 0);
    let nn = c.fixed_view::<15, 15>(15, 15);
    let p = tt - tn - nt + nn;
    0.5 * (p + p.transpose())
}

/// Per-radar detection statistics along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSeries {
    pub radar_id: String,
    pub t: Vec<f64>,
    pub pd: Vec<f64>,
    pub sigma_pd: Vec<f64>,
    /// `P̄_D + m_σ σ_pd ≥ P_DT` at each sample.
    pub violation: Vec<bool>,
}

impl DetectionSeries {
    pub fn peak_sigma(&self) -> f64 {
        self.sigma_pd.iter().copied().fold(0.0, f64::max)
    }

    pub fn peak_pd(&self) -> f64 {
        self.pd.iter().copied().fold(0.0, f64::max)
    }
}

/// Kalman gains of the all-sources navigation filter, reused by every run.
#[derive(Debug, Clone)]
pub struct GainSchedule {
    pub updates: Vec<UpdateRecord>,
    pub checksum: u64,
}

fn fnv1a(bytes: impl Iterator<Item = u8>, mut h: u64) -> u64 {
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn schedule_checksum(updates: &[UpdateRecord]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325;
    for u in updates {
        h = fnv1a((u.step as u64).to_le_bytes().into_iter(), h);
        h = fnv1a([u.kind as u8].into_iter(), h);
        for v in u.gain.iter() {
            h = fnv1a(v.to_bits().to_le_bytes().into_iter(), h);
        }
    }
    h
}

impl GainSchedule {
    pub fn from_updates(updates: Vec<UpdateRecord>) -> Self {
        let checksum = schedule_checksum(&updates);
        Self { updates, checksum }
    }

    /// Recomputes the checksum from the stored gains.
    pub fn verify(&self) -> bool {
        schedule_checksum(&self.updates) == self.checksum
    }
}

/// Gain schedule of the navigation filter along `samples`.
pub fn gain_schedule(scenario: &Scenario, samples: &[TrajectorySample]) -> Result<GainSchedule> {
    let run = run_filter(samples, &scenario.p0, &scenario.imu, &scenario.meas)?;
    Ok(GainSchedule::from_updates(run.updates))
}

fn meas_source(kind: MeasKind) -> Source {
    match kind {
        MeasKind::Position => Source::PosMeasNoise,
        MeasKind::Altitude => Source::AltMeasNoise,
        MeasKind::Heading => Source::HeadingMeasNoise,
    }
}

struct StepModel {
    f: Sparse,
    q: Matrix30,
    f_dense: Matrix30,
}

fn step_model(
    t_bn: &Matrix3<f64>,
    nu_b: &Vector3<f64>,
    scenario: &Scenario,
    s_eta: &Matrix6,
    s_w: &Matrix6,
) -> Result<StepModel> {
    let imu = &scenario.imu;
    let f_x = truth_dispersion_matrix(t_bn, nu_b, imu.tau_a, imu.tau_g)?;
    let f_hat = nav_dynamics_matrix(t_bn, nu_b, imu.tau_a, imu.tau_g)?;
    let f_y = imu_input_matrix(t_bn);
    let (f, g, w) = build_augmented(&f_x, &f_hat, &f_y, &bias_selector());
    let q = g * s_eta * g.transpose() + w * s_w * w.transpose();
    Ok(StepModel {
        f: Sparse::from_dense(&f),
        q,
        f_dense: f,
    })
}

fn initial_augmented(scenario: &Scenario, sources: &NoiseSourceSet) -> AugmentedCovariance {
    let p0 = &scenario.p0.p;
    let mut c = Matrix30::zeros();
    let blocks = [
        (0, 9, Source::InitialConditions),
        (9, 3, Source::AccelBias),
        (12, 3, Source::GyroBias),
    ];
    for (start, len, src) in blocks {
        if sources.is_on(src) {
            for i in start..start + len {
                for j in start..start + len {
                    c[(i, j)] = p0[(i, j)];
                }
            }
        }
    }
    AugmentedCovariance { c }
}

/// True navigation error covariance at every sample for the active sources.
pub fn run_lincov(
    scenario: &Scenario,
    samples: &[TrajectorySample],
    schedule: &GainSchedule,
    sources: &NoiseSourceSet,
) -> Result<Vec<Matrix15>> {
    if samples.is_empty() {
        return Err(Error::Validation("trajectory is empty".into()));
    }
    if !sources.any_navigation() {
        return Ok(vec![Matrix15::zeros(); samples.len()]);
    }
    let imu = &scenario.imu;
    let on = |s: Source, v: f64| if sources.is_on(s) { v } else { 0.0 };
    let s_eta = Matrix6::from_diagonal(&nalgebra::Vector6::new(
        on(Source::AccelNoise, imu.q_nu),
        on(Source::AccelNoise, imu.q_nu),
        on(Source::AccelNoise, imu.q_nu),
        on(Source::GyroNoise, imu.q_omega),
        on(Source::GyroNoise, imu.q_omega),
        on(Source::GyroNoise, imu.q_omega),
    ));
    let s_w = Matrix6::from_diagonal(&nalgebra::Vector6::new(
        on(Source::AccelBias, imu.q_a()),
        on(Source::AccelBias, imu.q_a()),
        on(Source::AccelBias, imu.q_a()),
        on(Source::GyroBias, imu.q_g()),
        on(Source::GyroBias, imu.q_g()),
        on(Source::GyroBias, imu.q_g()),
    ));

    let mut c = initial_augmented(scenario, sources);
    let mut out = Vec::with_capacity(samples.len());
    out.push(true_nav_covariance(&c));
    let model_at = |s: &TrajectorySample| {
        step_model(&dcm_body_to_nav(&s.theta), &s.nu_b, scenario, &s_eta, &s_w)
    };
    let mut prev = model_at(&samples[0])?;
    let mut upd = schedule.updates.iter().peekable();
    while upd.peek().is_some_and(|u| u.step == 0) {
        upd.next();
    }
    for k in 1..samples.len() {
        let dt = samples[k].t - samples[k - 1].t;
        let cur = model_at(&samples[k])?;
        let mid_f = Sparse::from_dense(&(0.5 * (prev.f_dense + cur.f_dense)));
        let mid_q = 0.5 * (prev.q + cur.q);
        c.c = rk4_lyapunov(
            &c.c,
            [&prev.f, &mid_f, &cur.f],
            [&prev.q, &mid_q, &cur.q],
            dt,
        );
        while let Some(u) = upd.next_if(|u| u.step == k) {
            let h = measurement_matrix(u.kind);
            let mut r = measurement_noise(u.kind, &scenario.meas);
            if !sources.is_on(meas_source(u.kind)) {
                r.fill(0.0);
            }
            c = update_augmented(&c, &u.gain, &h, &r)?;
        }
        if !c.c.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical(format!(
                "augmented covariance diverged at t = {}",
                samples[k].t
            )));
        }
        out.push(true_nav_covariance(&c));
        prev = cur;
    }
    Ok(out)
}

/// Radar covariance restricted to the active radar sources.
pub fn radar_covariance(c_rr: &Matrix4<f64>, sources: &NoiseSourceSet) -> Matrix4<f64> {
    let mut c = *c_rr;
    if !sources.radar_position {
        for i in 0..4 {
            for j in 0..4 {
                if i < 3 || j < 3 {
                    c[(i, j)] = 0.0;
                }
            }
        }
    }
    if !sources.radar_constant {
        for i in 0..4 {
            c[(i, 3)] = 0.0;
            c[(3, i)] = 0.0;
        }
    }
    c
}

/// Combines pose covariances with the radar model into per-radar series.
pub fn detection_series(
    scenario: &Scenario,
    samples: &[TrajectorySample],
    pose_covariances: &[Matrix6],
    sources: &NoiseSourceSet,
) -> Result<Vec<DetectionSeries>> {
    if pose_covariances.len() != samples.len() {
        return Err(Error::Validation(
            "covariance history does not match the trajectory".into(),
        ));
    }
    let (p_dt, m) = (scenario.planner.p_dt, scenario.planner.m_sigma);
    scenario
        .radars
        .iter()
        .map(|radar| {
            let c_rr = radar_covariance(&radar.c_rr, sources);
            let mut s = DetectionSeries {
                radar_id: radar.id.clone(),
                t: Vec::with_capacity(samples.len()),
                pd: Vec::with_capacity(samples.len()),
                sigma_pd: Vec::with_capacity(samples.len()),
                violation: Vec::with_capacity(samples.len()),
            };
            for (sample, c_aa) in samples.iter().zip(pose_covariances) {
                let pose = sample.pose();
                let pd = pd_at(&pose, radar, &scenario.rcs)?;
                let a_pa = jacobian_aircraft(&pose, radar, &scenario.rcs)?;
                let a_pr = jacobian_radar(&pose, radar, &scenario.rcs)?;
                let sigma = pd_variance(&a_pa, c_aa, &a_pr, &c_rr).sqrt();
                s.t.push(sample.t);
                s.pd.push(pd);
                s.sigma_pd.push(sigma);
                s.violation.push(pd + m * sigma >= p_dt);
            }
            Ok(s)
        })
        .collect()
}

/// Detection series with the given sources, using a precomputed gain schedule.
pub fn sigma_pd_series_with(
    scenario: &Scenario,
    samples: &[TrajectorySample],
    schedule: &GainSchedule,
    sources: &NoiseSourceSet,
) -> Result<Vec<DetectionSeries>> {
    let p_true = run_lincov(scenario, samples, schedule, sources)?;
    let c_aa: Vec<Matrix6> = p_true
        .iter()
        .map(|p| aircraft_covariance(&NavCovariance { p: *p }))
        .collect();
    detection_series(scenario, samples, &c_aa, sources)
}

/// Detection series with only the flagged sources active.
pub fn sigma_pd_series(
    scenario: &Scenario,
    samples: &[TrajectorySample],
    sources: &NoiseSourceSet,
) -> Result<Vec<DetectionSeries>> {
    let schedule = gain_schedule(scenario, samples)?;
    sigma_pd_series_with(scenario, samples, &schedule, sources)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetEntry {
    pub source: Source,
    pub sigma_pd: f64,
    pub three_sigma_pd: f64,
    pub percent_of_total: f64,
}

/// Per-source contributions to `σ_pd` at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub t_snapshot: f64,
    pub sample_index: usize,
    pub radar_id: String,
    pub entries: Vec<BudgetEntry>,
    pub total_sigma_pd: f64,
    pub total_three_sigma_pd: f64,
    /// Trajectory passes performed: one per source plus the all-on run.
    pub evaluations: usize,
    /// Gain schedule checksum seen by each pass.
    pub gain_checksums: Vec<u64>,
}

impl ErrorBudget {
    /// `√(Σ σ_source²)`.
    pub fn rss(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.sigma_pd * e.sigma_pd)
            .sum::<f64>()
            .sqrt()
    }
}

/// Result of the per-source passes shared by budgets and closure checks.
#[derive(Debug, Clone)]
pub struct SourceRuns {
    pub sources: Vec<Source>,
    pub per_source: Vec<Vec<DetectionSeries>>,
    pub total: Vec<DetectionSeries>,
    pub checksums: Vec<u64>,
}

/// Runs the all-on model and one model per listed source.
pub fn source_runs(
    scenario: &Scenario,
    samples: &[TrajectorySample],
    sources: &[Source],
) -> Result<SourceRuns> {
    let schedule = gain_schedule(scenario, samples)?;
    let mut jobs: Vec<NoiseSourceSet> = sources.iter().map(|s| NoiseSourceSet::only(*s)).collect();
    jobs.push(NoiseSourceSet::from_fn(|s| sources.contains(&s)));
    let results: Vec<(Vec<DetectionSeries>, u64)> = jobs
        .par_iter()
        .map(|set| {
            let seen = schedule_checksum(&schedule.updates);
            sigma_pd_series_with(scenario, samples, &schedule, set).map(|s| (s, seen))
        })
        .collect::<Result<Vec<_>>>()?;
    let checksums = results.iter().map(|r| r.1).collect();
    let mut per_source: Vec<Vec<DetectionSeries>> = results.into_iter().map(|r| r.0).collect();
    let total = per_source.pop().expect("all-on run present");
    Ok(SourceRuns {
        sources: sources.to_vec(),
        per_source,
        total,
        checksums,
    })
}

/// Error budget over every source at the sample nearest `t_snapshot`.
pub fn error_budget(
    scenario: &Scenario,
    samples: &[TrajectorySample],
    t_snapshot: f64,
) -> Result<ErrorBudget> {
    error_budget_for(scenario, samples, t_snapshot, &Source::ALL)
}

/// Error budget over a chosen list of sources.
pub fn error_budget_for(
    scenario: &Scenario,
    samples: &[TrajectorySample],
    t_snapshot: f64,
    sources: &[Source],
) -> Result<ErrorBudget> {
    let (first, last) = match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => return Err(Error::Validation("trajectory is empty".into())),
    };
    if !(t_snapshot >= first - 1e-9 && t_snapshot <= last + 1e-9) {
        return Err(Error::Validation(format!(
            "snapshot time {t_snapshot} s is outside the trajectory span [{first}, {last}] s"
        )));
    }
    if sources.is_empty() {
        return Err(Error::Validation(
            "error budget needs at least one source".into(),
        ));
    }
    let idx = samples
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1.t - t_snapshot)
                .abs()
                .total_cmp(&(b.1.t - t_snapshot).abs())
        })
        .map(|(i, _)| i)
        .unwrap();
    // The filter is causal, so samples after the snapshot cannot change it.
    let runs = source_runs(scenario, &samples[..=idx], sources)?;
    let radar = (0..runs.total.len())
        .max_by(|a, b| {
            runs.total[*a].sigma_pd[idx]
                .total_cmp(&runs.total[*b].sigma_pd[idx])
                .then(b.cmp(a))
        })
        .ok_or_else(|| Error::Validation("scenario has no radars".into()))?;
    let total = runs.total[radar].sigma_pd[idx];
    let entries = runs
        .sources
        .iter()
        .zip(&runs.per_source)
        .map(|(src, series)| {
            let s = series[radar].sigma_pd[idx];
            BudgetEntry {
                source: *src,
                sigma_pd: s,
                three_sigma_pd: 3.0 * s,
                percent_of_total: if total > 0.0 { 100.0 * s / total } else { 0.0 },
            }
        })
        .collect();
    Ok(ErrorBudget {
        t_snapshot: samples[idx].t,
        sample_index: idx,
        radar_id: runs.total[radar].radar_id.clone(),
        entries,
        total_sigma_pd: total,
        total_three_sigma_pd: 3.0 * total,
        evaluations: sources.len() + 1,
        gain_checksums: runs.checksums,
    })
}
