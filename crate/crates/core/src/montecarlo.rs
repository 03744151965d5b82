//! Monte Carlo validation of the covariance analysis.
//!
//! Each run perturbs the truth (initial state, FOGM biases, IMU white noise,
//! aiding noise and the radar states), integrates truth and navigation with
//! identical RK4 steps, runs a full error-state EKF and evaluates `P_D` at
//! the pose implied by the navigation error. Random numbers come from a
//! ChaCha stream per `(seed, run, channel)`, so turning a source off never
//! shifts any other stream and results do not depend on the worker count.

use crate::ins::{
    integrated_process_noise, kalman_update, measurement_matrix, measurement_noise,
    nav_dynamics_matrix, propagate, stm_lear, MeasKind, NavCovariance,
};
use crate::lincov::{DetectionSeries, NoiseSourceSet, Source};
use crate::math::{euler_from_body_to_nav, quat_from_euler, wrap_angle, Vector15, GRAVITY};
use crate::radar::{pd_at, AircraftPose, RadarSite};
use crate::scenario::Scenario;
use crate::trajectory::TrajectorySample;
use crate::{Error, Result};
use nalgebra::{DVector, Quaternion, UnitQuaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
enum Channel {
    InitialPva = 0,
    AccelBiasInit = 1,
    GyroBiasInit = 2,
    AccelBiasWalk = 3,
    GyroBiasWalk = 4,
    AccelNoise = 5,
    GyroNoise = 6,
    PositionMeas = 7,
    AltitudeMeas = 8,
    HeadingMeas = 9,
    RadarPosition = 10,
    RadarConstant = 11,
}

const CHANNELS_PER_RUN: u64 = 16;

/// Gaussian stream for one `(seed, run, channel)` triple; `None` when the
/// owning source is switched off.
struct Stream(Option<ChaCha8Rng>);

impl Stream {
    fn new(seed: u64, run: usize, channel: Channel, on: bool) -> Self {
        if !on {
            return Stream(None);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64 * CHANNELS_PER_RUN + channel as u64);
        Stream(Some(rng))
    }

    fn normal(&mut self, sigma: f64) -> f64 {
        match &mut self.0 {
            Some(rng) => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
            None => 0.0,
        }
    }

    fn vec3(&mut self, sigma: f64) -> Vector3<f64> {
        let x = self.normal(sigma);
        let y = self.normal(sigma);
        let z = self.normal(sigma);
        Vector3::new(x, y, z)
    }
}

/// Options controlling what an ensemble keeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleOptions {
    /// Keep every run's `P_D` error trace.
    pub retain_traces: bool,
    /// Runs per statistics chunk; chunks are merged in order.
    pub chunk: usize,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            retain_traces: true,
            chunk: 8,
        }
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Welford {
    pub n: f64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, o: &Welford) {
        if o.n == 0.0 {
            return;
        }
        if self.n == 0.0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n / n;
        self.m2 += o.m2 + d * d * self.n * o.n / n;
        self.n = n;
    }

    /// Sample standard deviation.
    pub fn std(&self) -> f64 {
        if self.n > 1.0 {
            (self.m2 / (self.n - 1.0)).max(0.0).sqrt()
        } else {
            0.0
        }
    }
}

/// Ensemble statistics of `P_D − P̄_D` per radar and sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub n_runs: usize,
    pub n_failed: usize,
    pub seed: u64,
    pub t: Vec<f64>,
    pub radar_ids: Vec<String>,
    /// `[radar][sample]`.
    pub pd_nominal: Vec<Vec<f64>>,
    pub mean_error: Vec<Vec<f64>>,
    pub sigma_error: Vec<Vec<f64>>,
    /// `[run][radar][sample]`, successful runs only, when retained.
    pub traces: Option<Vec<Vec<Vec<f64>>>>,
    /// Ensemble mean of the navigation error state, `[sample][state]`.
    pub nav_error_mean: Vec<[f64; 15]>,
    /// Ensemble sample deviation of the navigation error state.
    pub nav_error_sigma: Vec<[f64; 15]>,
}

/// Output of one simulated run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// `[radar][sample]` values of `P_D − P̄_D`.
    pub pd_error: Vec<Vec<f64>>,
    /// Error state `truth − navigation` at each sample.
    pub nav_error: Vec<Vector15>,
    /// Filter covariance at each sample.
    pub covariance: Vec<NavCovariance>,
}

#[derive(Debug, Clone, Copy)]
struct Kinematic {
    p: Vector3<f64>,
    v: Vector3<f64>,
    q: UnitQuaternion<f64>,
}

fn deriv(
    s: &Kinematic,
    q: &Quaternion<f64>,
    nu: &Vector3<f64>,
    om: &Vector3<f64>,
) -> (Vector3<f64>, Vector3<f64>, Quaternion<f64>) {
    let t = UnitQuaternion::new_unchecked(*q);
    let a = t * nu + Vector3::new(0.0, 0.0, GRAVITY);
    let qd = q * Quaternion::from_parts(0.0, *om) * 0.5;
    (s.v, a, qd)
}

/// RK4 step of the strapdown equations with linearly varying inputs.
fn rk4(s: &Kinematic, nu: [Vector3<f64>; 2], om: [Vector3<f64>; 2], dt: f64) -> Kinematic {
    let num = 0.5 * (nu[0] + nu[1]);
    let omm = 0.5 * (om[0] + om[1]);
    let q0 = *s.q.quaternion();
    let (dp1, dv1, dq1) = deriv(s, &q0, &nu[0], &om[0]);
    let s2 = Kinematic {
        p: s.p + dp1 * (0.5 * dt),
        v: s.v + dv1 * (0.5 * dt),
        q: s.q,
    };
    let q2 = q0 + dq1 * (0.5 * dt);
    let (dp2, dv2, dq2) = deriv(&s2, &q2, &num, &omm);
    let s3 = Kinematic {
        p: s.p + dp2 * (0.5 * dt),
        v: s.v + dv2 * (0.5 * dt),
        q: s.q,
    };
    let q3 = q0 + dq2 * (0.5 * dt);
    let (dp3, dv3, dq3) = deriv(&s3, &q3, &num, &omm);
    let s4 = Kinematic {
        p: s.p + dp3 * dt,
        v: s.v + dv3 * dt,
        q: s.q,
    };
    let q4 = q0 + dq3 * dt;
    let (dp4, dv4, dq4) = deriv(&s4, &q4, &nu[1], &om[1]);
    let h = dt / 6.0;
    Kinematic {
        p: s.p + (dp1 + 2.0 * dp2 + 2.0 * dp3 + dp4) * h,
        v: s.v + (dv1 + 2.0 * dv2 + 2.0 * dv3 + dv4) * h,
        q: UnitQuaternion::from_quaternion(q0 + (dq1 + dq2 * 2.0 + dq3 * 2.0 + dq4) * h),
    }
}

/// Aircraft pose implied by an error state about the nominal, using the
/// same linear attitude mapping as the covariance analysis.
pub fn pose_with_error(nominal: &TrajectorySample, e: &Vector15) -> AircraftPose {
    AircraftPose {
        p_a_n: nominal.p_n + Vector3::new(e[0], e[1], e[2]),
        theta_a: nominal.theta - Vector3::new(e[6], e[7], e[8]),
    }
}

fn error_state(
    truth: &Kinematic,
    nav: &Kinematic,
    b: &[Vector3<f64>; 2],
    b_hat: &[Vector3<f64>; 2],
) -> Vector15 {
    let mut e = Vector15::zeros();
    e.fixed_rows_mut::<3>(0).copy_from(&(truth.p - nav.p));
    e.fixed_rows_mut::<3>(3).copy_from(&(truth.v - nav.v));
    // T_true = exp(−[δθ×]) T̂, so δθ = −log(T_true T̂ᵀ).
    let r = truth.q * nav.q.inverse();
    e.fixed_rows_mut::<3>(6).copy_from(&(-r.scaled_axis()));
    e.fixed_rows_mut::<3>(9).copy_from(&(b[0] - b_hat[0]));
    e.fixed_rows_mut::<3>(12).copy_from(&(b[1] - b_hat[1]));
    e
}

fn perturbed_radars(
    scenario: &Scenario,
    seed: u64,
    run: usize,
    sources: &NoiseSourceSet,
) -> Vec<RadarSite> {
    let mut pos = Stream::new(seed, run, Channel::RadarPosition, sources.radar_position);
    let mut con = Stream::new(seed, run, Channel::RadarConstant, sources.radar_constant);
    scenario
        .radars
        .iter()
        .map(|r| {
            let mut r = r.clone();
            let dp = Vector3::new(
                pos.normal(r.c_rr[(0, 0)].sqrt()),
                pos.normal(r.c_rr[(1, 1)].sqrt()),
                pos.normal(r.c_rr[(2, 2)].sqrt()),
            );
            r.p_r_n += dp;
            r.c_r += con.normal(r.c_rr[(3, 3)].sqrt());
            r
        })
        .collect()
}

/// Simulates one Monte Carlo run along a sampled nominal trajectory.
pub fn run_single(
    scenario: &Scenario,
    samples: &[TrajectorySample],
    seed: u64,
    run: usize,
    sources: &NoiseSourceSet,
) -> Result<RunOutput> {
    if samples.len() < 2 {
        return Err(Error::Validation(
            "Monte Carlo needs at least two samples".into(),
        ));
    }
    let dt = samples[1].t - samples[0].t;
    let imu = &scenario.imu;
    let meas = &scenario.meas;
    let p0 = &scenario.p0.p;
    let on = |s: Source| sources.is_on(s);

    let mut s_init = Stream::new(
        seed,
        run,
        Channel::InitialPva,
        on(Source::InitialConditions),
    );
    let mut s_ba0 = Stream::new(seed, run, Channel::AccelBiasInit, on(Source::AccelBias));
    let mut s_bg0 = Stream::new(seed, run, Channel::GyroBiasInit, on(Source::GyroBias));
    let mut s_baw = Stream::new(seed, run, Channel::AccelBiasWalk, on(Source::AccelBias));
    let mut s_bgw = Stream::new(seed, run, Channel::GyroBiasWalk, on(Source::GyroBias));
    let mut s_na = Stream::new(seed, run, Channel::AccelNoise, on(Source::AccelNoise));
    let mut s_ng = Stream::new(seed, run, Channel::GyroNoise, on(Source::GyroNoise));
    let mut s_pos = Stream::new(seed, run, Channel::PositionMeas, on(Source::PosMeasNoise));
    let mut s_alt = Stream::new(seed, run, Channel::AltitudeMeas, on(Source::AltMeasNoise));
    let mut s_hdg = Stream::new(
        seed,
        run,
        Channel::HeadingMeas,
        on(Source::HeadingMeasNoise),
    );
    let radars = perturbed_radars(scenario, seed, run, sources);

    let s0 = &samples[0];
    let sd = |i: usize| p0[(i, i)].sqrt();
    let dp = Vector3::new(
        s_init.normal(sd(0)),
        s_init.normal(sd(1)),
        s_init.normal(sd(2)),
    );
    let dv = Vector3::new(
        s_init.normal(sd(3)),
        s_init.normal(sd(4)),
        s_init.normal(sd(5)),
    );
    let dth = Vector3::new(
        s_init.normal(sd(6)),
        s_init.normal(sd(7)),
        s_init.normal(sd(8)),
    );
    let q_nom = quat_from_euler(&s0.theta);
    let mut nav = Kinematic {
        p: s0.p_n,
        v: s0.v_n,
        q: q_nom,
    };
    let mut truth = Kinematic {
        p: s0.p_n + dp,
        v: s0.v_n + dv,
        q: if dth == Vector3::zeros() {
            q_nom
        } else {
            UnitQuaternion::from_scaled_axis(-dth) * q_nom
        },
    };
    let mut b = [
        Vector3::new(
            s_ba0.normal(sd(9)),
            s_ba0.normal(sd(10)),
            s_ba0.normal(sd(11)),
        ),
        Vector3::new(
            s_bg0.normal(sd(12)),
            s_bg0.normal(sd(13)),
            s_bg0.normal(sd(14)),
        ),
    ];
    let mut b_hat = [Vector3::zeros(), Vector3::zeros()];
    let mut p = scenario.p0;

    let decay = [(-dt / imu.tau_a).exp(), (-dt / imu.tau_g).exp()];
    let walk = [
        imu.sigma_a_ss * (1.0 - decay[0] * decay[0]).sqrt(),
        imu.sigma_g_ss * (1.0 - decay[1] * decay[1]).sqrt(),
    ];
    let white = [(imu.q_nu / dt).sqrt(), (imu.q_omega / dt).sqrt()];

    let n = samples.len();
    let mut pd_error = vec![Vec::with_capacity(n); radars.len()];
    let mut nav_error = Vec::with_capacity(n);
    let mut covariance = Vec::with_capacity(n);
    let mut record = |truth: &Kinematic,
                      nav: &Kinematic,
                      b: &[Vector3<f64>; 2],
                      b_hat: &[Vector3<f64>; 2],
                      k: usize,
                      p: &NavCovariance|
     -> Result<()> {
        let e = error_state(truth, nav, b, b_hat);
        let pose = pose_with_error(&samples[k], &e);
        for (i, (r, nominal)) in radars.iter().zip(&scenario.radars).enumerate() {
            let err = if e == Vector15::zeros() && r == nominal {
                0.0
            } else {
                pd_at(&pose, r, &scenario.rcs)? - pd_at(&samples[k].pose(), nominal, &scenario.rcs)?
            };
            pd_error[i].push(err);
        }
        nav_error.push(e);
        covariance.push(*p);
        Ok(())
    };
    record(&truth, &nav, &b, &b_hat, 0, &p)?;

    let mut nu_hat_prev = s0.nu_b;
    let mut t_hat_prev = nav.q.to_rotation_matrix().into_inner();
    for k in 1..n {
        let (sa, sb) = (&samples[k - 1], &samples[k]);
        let eta_a = s_na.vec3(white[0]);
        let eta_g = s_ng.vec3(white[1]);
        let nu_true = [sa.nu_b, sb.nu_b];
        let om_true = [sa.omega_b, sb.omega_b];
        let corr_a = b[0] + eta_a - b_hat[0];
        let corr_g = b[1] + eta_g - b_hat[1];
        let nu_nav = [nu_true[0] + corr_a, nu_true[1] + corr_a];
        let om_nav = [om_true[0] + corr_g, om_true[1] + corr_g];

        truth = rk4(&truth, nu_true, om_true, dt);
        nav = rk4(&nav, nu_nav, om_nav, dt);

        let t_hat = nav.q.to_rotation_matrix().into_inner();
        let nu_hat = nu_nav[1];
        let f_prev = nav_dynamics_matrix(&t_hat_prev, &nu_hat_prev, imu.tau_a, imu.tau_g)?;
        let f_k = nav_dynamics_matrix(&t_hat, &nu_hat, imu.tau_a, imu.tau_g)?;
        let phi = stm_lear(&f_k, &f_prev, dt);
        let q = integrated_process_noise(&t_hat, &t_hat_prev, &nu_hat, &nu_hat_prev, imu, dt);
        p = propagate(&p, &phi, &q);

        b[0] = decay[0] * b[0] + s_baw.vec3(walk[0]);
        b[1] = decay[1] * b[1] + s_bgw.vec3(walk[1]);
        b_hat[0] *= decay[0];
        b_hat[1] *= decay[1];

        for kind in meas.epochs_at(k, dt, sb.p_n.x, sb.p_n.y) {
            let residual = match kind {
                MeasKind::Position => {
                    let v = Vector3::new(
                        s_pos.normal(meas.sigma_n),
                        s_pos.normal(meas.sigma_e),
                        s_pos.normal(meas.sigma_d),
                    );
                    let z = truth.p + v;
                    DVector::from_column_slice((z - nav.p).as_slice())
                }
                MeasKind::Altitude => {
                    let z = -truth.p.z + s_alt.normal(meas.sigma_h);
                    DVector::from_element(1, z - (-nav.p.z))
                }
                MeasKind::Heading => {
                    let psi = euler_from_body_to_nav(&truth.q.to_rotation_matrix().into_inner()).z;
                    let psi_hat =
                        euler_from_body_to_nav(&nav.q.to_rotation_matrix().into_inner()).z;
                    let z = psi + s_hdg.normal(meas.sigma_psi);
                    DVector::from_element(1, wrap_angle(z - psi_hat))
                }
            };
            let (post, gain) = kalman_update(
                &p,
                &measurement_matrix(kind),
                &measurement_noise(kind, meas),
            )?;
            p = post;
            let dx = gain * residual;
            nav.p += Vector3::new(dx[0], dx[1], dx[2]);
            nav.v += Vector3::new(dx[3], dx[4], dx[5]);
            let dth = Vector3::new(dx[6], dx[7], dx[8]);
            if dth != Vector3::zeros() {
                nav.q = UnitQuaternion::from_scaled_axis(-dth) * nav.q;
            }
            b_hat[0] += Vector3::new(dx[9], dx[10], dx[11]);
            b_hat[1] += Vector3::new(dx[12], dx[13], dx[14]);
        }

        let finite = nav.p.iter().chain(truth.p.iter()).all(|v| v.is_finite())
            && p.p.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Numerical(format!(
                "run {run} diverged at t = {}",
                sb.t
            )));
        }
        record(&truth, &nav, &b, &b_hat, k, &p)?;
        nu_hat_prev = nu_hat;
        t_hat_prev = t_hat;
    }
    Ok(RunOutput {
        pd_error,
        nav_error,
        covariance,
    })
}

struct ChunkStats {
    pd: Vec<Vec<Welford>>,
    nav: Vec<[Welford; 15]>,
    traces: Vec<Vec<Vec<f64>>>,
    failed: usize,
}

impl ChunkStats {
    fn new(n_radars: usize, n_samples: usize) -> Self {
        Self {
            pd: vec![vec![Welford::default(); n_samples]; n_radars],
            nav: vec![[Welford::default(); 15]; n_samples],
            traces: Vec::new(),
            failed: 0,
        }
    }

    fn push(&mut self, out: RunOutput, retain: bool) {
        for (acc, series) in self.pd.iter_mut().zip(&out.pd_error) {
            for (a, x) in acc.iter_mut().zip(series) {
                a.push(*x);
            }
        }
        for (acc, e) in self.nav.iter_mut().zip(&out.nav_error) {
            for (a, x) in acc.iter_mut().zip(e.iter()) {
                a.push(*x);
            }
        }
        if retain {
            self.traces.push(out.pd_error);
        }
    }

    fn merge(&mut self, o: ChunkStats) {
        for (a, b) in self.pd.iter_mut().zip(&o.pd) {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        for (a, b) in self.nav.iter_mut().zip(&o.nav) {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        self.traces.extend(o.traces);
        self.failed += o.failed;
    }
}

fn is_finite_run(out: &RunOutput) -> bool {
    out.pd_error.iter().flatten().all(|v| v.is_finite())
        && out
            .nav_error
            .iter()
            .all(|e| e.iter().all(|v| v.is_finite()))
}

/// Runs `n_runs` simulations with default options.
pub fn run_ensemble(
    scenario: &Scenario,
    samples: &[TrajectorySample],
    n_runs: usize,
    seed: u64,
    sources: &NoiseSourceSet,
) -> Result<EnsembleResult> {
    run_ensemble_with(
        scenario,
        samples,
        n_runs,
        seed,
        sources,
        EnsembleOptions::default(),
    )
}

pub fn run_ensemble_with(
    scenario: &Scenario,
    samples: &[TrajectorySample],
    n_runs: usize,
    seed: u64,
    sources: &NoiseSourceSet,
    opts: EnsembleOptions,
) -> Result<EnsembleResult> {
    if n_runs < 2 {
        return Err(Error::Validation(
            "an ensemble needs at least two runs".into(),
        ));
    }
    if samples.len() < 2 {
        return Err(Error::Validation(
            "Monte Carlo needs at least two samples".into(),
        ));
    }
    let n_radars = scenario.radars.len();
    let chunk = opts.chunk.max(1);
    let starts: Vec<usize> = (0..n_runs).step_by(chunk).collect();
    let chunks: Vec<ChunkStats> = starts
        .par_iter()
        .map(|&start| {
            let mut stats = ChunkStats::new(n_radars, samples.len());
            for run in start..(start + chunk).min(n_runs) {
                match run_single(scenario, samples, seed, run, sources) {
                    Ok(out) if is_finite_run(&out) => stats.push(out, opts.retain_traces),
                    Ok(_) | Err(Error::Numerical(_)) => stats.failed += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(stats)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = ChunkStats::new(n_radars, samples.len());
    for c in chunks {
        total.merge(c);
    }
    if total.failed * 100 > n_runs {
        return Err(Error::Numerical(format!(
            "{} of {n_runs} Monte Carlo runs diverged",
            total.failed
        )));
    }
    if n_runs - total.failed < 2 {
        return Err(Error::Numerical(
            "fewer than two Monte Carlo runs succeeded".into(),
        ));
    }
    let pd_nominal = scenario
        .radars
        .iter()
        .map(|r| {
            samples
                .iter()
                .map(|s| pd_at(&s.pose(), r, &scenario.rcs))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleResult {
        n_runs,
        n_failed: total.failed,
        seed,
        t: samples.iter().map(|s| s.t).collect(),
        radar_ids: scenario.radars.iter().map(|r| r.id.clone()).collect(),
        pd_nominal,
        mean_error: total
            .pd
            .iter()
            .map(|v| v.iter().map(|w| w.mean).collect())
            .collect(),
        sigma_error: total
            .pd
            .iter()
            .map(|v| v.iter().map(|w| w.std()).collect())
            .collect(),
        traces: opts.retain_traces.then_some(total.traces),
        nav_error_mean: total
            .nav
            .iter()
            .map(|a| std::array::from_fn(|i| a[i].mean))
            .collect(),
        nav_error_sigma: total
            .nav
            .iter()
            .map(|a| std::array::from_fn(|i| a[i].std()))
            .collect(),
    })
}

/// Fraction of retained `(run, sample)` errors with `|error| ≤ k σ_pd(t)`,
/// over every radar.
pub fn coverage_check(result: &EnsembleResult, lincov: &[DetectionSeries], k: f64) -> Result<f64> {
    let traces = result
        .traces
        .as_ref()
        .ok_or_else(|| Error::Validation("ensemble was run without retained traces".into()))?;
    if lincov.len() != result.radar_ids.len() {
        return Err(Error::Validation(
            "radar count differs between ensemble and covariance series".into(),
        ));
    }
    for (series, id) in lincov.iter().zip(&result.radar_ids) {
        if &series.radar_id != id || series.t.len() != result.t.len() {
            return Err(Error::Validation(format!(
                "series for radar `{id}` is not aligned with the ensemble"
            )));
        }
        if series
            .t
            .iter()
            .zip(&result.t)
            .any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + b.abs()))
        {
            return Err(Error::Validation(format!(
                "time bases differ for radar `{id}`"
            )));
        }
    }
    let mut inside = 0usize;
    let mut total = 0usize;
    for run in traces {
        for (err, series) in run.iter().zip(lincov) {
            for (e, s) in err.iter().zip(&series.sigma_pd) {
                total += 1;
                if e.abs() <= k * s {
                    inside += 1;
                }
            }
        }
    }
    if total == 0 {
        return Err(Error::Validation("no retained samples to check".into()));
    }
    Ok(inside as f64 / total as f64)
}
