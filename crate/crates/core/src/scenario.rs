//! Scenario documents and result files.
//!
//! A scenario is a TOML document whose numeric fields carry their unit in
//! the key name (`_km`, `_m`, `_deg`, `_hz`, ...). Parsing converts everything
//! to SI and validates the derived model objects. The parsed [`Scenario`]
//! keeps its source configuration so that [`Scenario::to_toml`] reproduces
//! the same scenario exactly.

use crate::ins::{ImuSpec, MeasSpec, NavCovariance, NeRect};
use crate::radar::{EllipsoidRcs, RadarSite};
use crate::trajectory::{smooth_waypoints, Trajectory, TrajectorySample, WaypointPath};
use crate::{Error, Result};
use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

const KM: f64 = 1000.0;
const DEG: f64 = std::f64::consts::PI / 180.0;
const HOUR: f64 = 3600.0;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcsConfig {
    pub a_m: f64,
    pub b_m: f64,
    pub c_m: f64,
}

impl Default for RcsConfig {
    fn default() -> Self {
        Self {
            a_m: 0.18,
            b_m: 0.17,
            c_m: 0.20,
        }
    }
}

fn default_c_r() -> f64 {
    164.7
}
fn default_p_fa() -> f64 {
    1e-9
}
fn default_sigma_position() -> f64 {
    500.0 / 3.0
}
fn default_sigma_c_r() -> f64 {
    2.0 / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarConfig {
    pub id: String,
    pub position_km: [f64; 3],
    #[serde(default = "default_c_r")]
    pub c_r: f64,
    #[serde(default = "default_p_fa")]
    pub p_fa: f64,
    #[serde(default = "default_sigma_position")]
    pub sigma_position_m: f64,
    #[serde(default = "default_sigma_c_r")]
    pub sigma_c_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionConfig {
    pub start_km: [f64; 3],
    pub goal_km: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectConfig {
    pub n_min_km: f64,
    pub n_max_km: f64,
    pub e_min_km: f64,
    pub e_max_km: f64,
}

impl RectConfig {
    fn to_si(self) -> NeRect {
        NeRect {
            n_min: self.n_min_km * KM,
            n_max: self.n_max_km * KM,
            e_min: self.e_min_km * KM,
            e_max: self.e_max_km * KM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImuGrade {
    Industrial,
    Tactical,
    Custom,
}

fn one() -> f64 {
    1.0
}

/// IMU section. Datasheet figures are three-sigma values and only used by the
/// custom grade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImuConfig {
    pub grade: ImuGrade,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vrw_m_s_sqrt_hr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accel_bias_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arw_deg_sqrt_hr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gyro_bias_deg_hr: Option<f64>,
    #[serde(default = "one")]
    pub tau_a_hr: f64,
    #[serde(default = "one")]
    pub tau_g_hr: f64,
}

impl Default for ImuConfig {
    fn default() -> Self {
        Self {
            grade: ImuGrade::Industrial,
            vrw_m_s_sqrt_hr: None,
            accel_bias_g: None,
            arw_deg_sqrt_hr: None,
            gyro_bias_deg_hr: None,
            tau_a_hr: 1.0,
            tau_g_hr: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasurementConfig {
    pub sigma_n_m: f64,
    pub sigma_e_m: f64,
    pub sigma_d_m: f64,
    pub sigma_h_m: f64,
    pub sigma_psi_deg: f64,
    pub rate_position_hz: f64,
    pub rate_altitude_hz: f64,
    pub rate_heading_hz: f64,
}

impl Default for MeasurementConfig {
    fn default() -> Self {
        Self {
            sigma_n_m: 1.0 / 3.0,
            sigma_e_m: 1.0 / 3.0,
            sigma_d_m: 1.0,
            sigma_h_m: 0.1 / 3.0,
            sigma_psi_deg: 0.1 / 3.0,
            rate_position_hz: 1.0,
            rate_altitude_hz: 1.0,
            rate_heading_hz: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    pub p_dt: f64,
    pub m_sigma: f64,
    pub pd_init: f64,
    pub sigma_r_init_m2: f64,
    pub n_vertices: usize,
    pub max_iterations: usize,
    pub growth_floor_m: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            p_dt: 0.1,
            m_sigma: 3.0,
            pd_init: 0.1,
            sigma_r_init_m2: 0.09,
            n_vertices: 30,
            max_iterations: 25,
            growth_floor_m: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectoryConfig {
    pub speed_m_s: f64,
    pub dt_s: f64,
    pub kappa_max_per_km: f64,
    pub kappa_rate_max_per_km2: f64,
    pub pitch_trim_deg: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self {
            speed_m_s: 200.0,
            dt_s: 0.1,
            kappa_max_per_km: 0.2,
            kappa_rate_max_per_km2: 0.05,
            pitch_trim_deg: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialCovarianceConfig {
    pub sigma_position_m: f64,
    pub sigma_velocity_m_s: f64,
    pub sigma_attitude_deg: f64,
}

impl Default for InitialCovarianceConfig {
    fn default() -> Self {
        Self {
            sigma_position_m: 1.0,
            sigma_velocity_m_s: 0.1,
            sigma_attitude_deg: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePathConfig {
    /// Interior waypoints; start and goal are implied.
    pub waypoints_km: Vec<[f64; 2]>,
}

/// The scenario document exactly as written, with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub meta: MetaConfig,
    #[serde(default)]
    pub rcs: RcsConfig,
    pub radar: Vec<RadarConfig>,
    pub mission: MissionConfig,
    pub bounds: RectConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gps_denied: Vec<RectConfig>,
    #[serde(default)]
    pub imu: ImuConfig,
    #[serde(default)]
    pub measurements: MeasurementConfig,
    #[serde(default)]
    pub planner: PlannerConfig,
    #[serde(default)]
    pub trajectory: TrajectoryConfig,
    #[serde(default)]
    pub initial_covariance: InitialCovarianceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_path: Option<ReferencePathConfig>,
}

/// Planner tuning in SI units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlannerParams {
    pub p_dt: f64,
    pub m_sigma: f64,
    pub pd_init: f64,
    pub sigma_r_init: f64,
    pub n_vertices: usize,
    pub max_iterations: usize,
    pub growth_floor: f64,
}

/// Trajectory generation settings in SI units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryParams {
    pub speed: f64,
    pub dt: f64,
    pub kappa_max: f64,
    pub kappa_rate_max: f64,
    pub pitch_trim: f64,
}

/// A validated planning and analysis problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub radars: Vec<RadarSite>,
    pub rcs: EllipsoidRcs,
    pub start: Vector3<f64>,
    pub goal: Vector3<f64>,
    pub bounds: NeRect,
    pub imu: ImuSpec,
    pub meas: MeasSpec,
    pub planner: PlannerParams,
    pub trajectory: TrajectoryParams,
    pub p0: NavCovariance,
    /// Interior reference waypoints in the NE plane, m.
    pub reference_path: Option<Vec<Vector2<f64>>>,
    config: ScenarioConfig,
}

fn config_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

fn positive(path: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(
            path,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn probability(path: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(config_err(
            path,
            format!("must lie strictly between 0 and 1, got {v}"),
        ))
    }
}

fn finite3(path: &str, v: [f64; 3]) -> Result<Vector3<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(Vector3::new(v[0], v[1], v[2]) * KM)
    } else {
        Err(config_err(path, "coordinates must be finite"))
    }
}

fn imu_from_config(c: &ImuConfig) -> Result<ImuSpec> {
    let tau_a = positive("imu.tau_a_hr", c.tau_a_hr)? * HOUR;
    let tau_g = positive("imu.tau_g_hr", c.tau_g_hr)? * HOUR;
    let custom = [
        ("imu.vrw_m_s_sqrt_hr", c.vrw_m_s_sqrt_hr),
        ("imu.accel_bias_g", c.accel_bias_g),
        ("imu.arw_deg_sqrt_hr", c.arw_deg_sqrt_hr),
        ("imu.gyro_bias_deg_hr", c.gyro_bias_deg_hr),
    ];
    let base = match c.grade {
        ImuGrade::Industrial => ImuSpec::industrial(),
        ImuGrade::Tactical => ImuSpec::tactical(),
        ImuGrade::Custom => {
            let mut v = [0.0; 4];
            for (i, (path, val)) in custom.iter().enumerate() {
                let val =
                    val.ok_or_else(|| config_err(path, "required when grade = \"custom\""))?;
                v[i] = positive(path, val)?;
            }
            return Ok(ImuSpec::from_three_sigma(
                v[0], v[1], v[2], v[3], tau_a, tau_g,
            ));
        }
    };
    if let Some((path, _)) = custom.iter().find(|(_, v)| v.is_some()) {
        return Err(config_err(path, "only allowed when grade = \"custom\""));
    }
    Ok(ImuSpec {
        tau_a,
        tau_g,
        ..base
    })
}

fn rect_checked(path: &str, r: &RectConfig) -> Result<NeRect> {
    let vals = [r.n_min_km, r.n_max_km, r.e_min_km, r.e_max_km];
    if !vals.iter().all(|v| v.is_finite()) {
        return Err(config_err(path, "rectangle limits must be finite"));
    }
    if !(r.n_min_km < r.n_max_km && r.e_min_km < r.e_max_km) {
        return Err(config_err(
            path,
            "rectangle minimum must be below its maximum",
        ));
    }
    Ok(r.to_si())
}

impl Scenario {
    /// Validates a configuration and converts it to SI model objects.
    pub fn from_config(config: ScenarioConfig) -> Result<Self> {
        let c = &config;
        let rcs = EllipsoidRcs {
            a: positive("rcs.a_m", c.rcs.a_m)?,
            b: positive("rcs.b_m", c.rcs.b_m)?,
            c: positive("rcs.c_m", c.rcs.c_m)?,
        };
        if c.radar.is_empty() {
            return Err(config_err("radar", "at least one radar is required"));
        }
        let mut ids = HashSet::new();
        let mut radars = Vec::with_capacity(c.radar.len());
        for (i, r) in c.radar.iter().enumerate() {
            let path = |f: &str| format!("radar[{i}].{f}");
            if r.id.trim().is_empty() {
                return Err(config_err(&path("id"), "must not be empty"));
            }
            if !ids.insert(r.id.clone()) {
                return Err(config_err(
                    &path("id"),
                    format!("duplicate radar id `{}`", r.id),
                ));
            }
            let p = finite3(&path("position_km"), r.position_km)?;
            let c_r = positive(&path("c_r"), r.c_r)?;
            let p_fa = probability(&path("p_fa"), r.p_fa)?;
            let sp = r.sigma_position_m;
            let sc = r.sigma_c_r;
            if !(sp >= 0.0 && sp.is_finite() && sc >= 0.0 && sc.is_finite()) {
                return Err(config_err(
                    &path("sigma_position_m"),
                    "radar sigmas must be non-negative",
                ));
            }
            radars.push(RadarSite::new(r.id.clone(), p, c_r, p_fa, sp, sc));
        }
        let start = finite3("mission.start_km", c.mission.start_km)?;
        let goal = finite3("mission.goal_km", c.mission.goal_km)?;
        if !(start.z < 0.0) {
            return Err(config_err(
                "mission.start_km",
                "down coordinate must be negative (above ground)",
            ));
        }
        if (goal.z - start.z).abs() > 1e-9 {
            return Err(config_err(
                "mission.goal_km",
                "goal must share the start altitude",
            ));
        }
        let bounds = rect_checked("bounds", &c.bounds)?;
        for (name, p) in [("mission.start_km", start), ("mission.goal_km", goal)] {
            if !bounds.contains(p.x, p.y) {
                return Err(config_err(name, "must lie inside the planning bounds"));
            }
        }
        let gps_denied = c
            .gps_denied
            .iter()
            .enumerate()
            .map(|(i, r)| rect_checked(&format!("gps_denied[{i}]"), r))
            .collect::<Result<Vec<_>>>()?;
        let imu = imu_from_config(&c.imu)?;
        let m = &c.measurements;
        let meas = MeasSpec {
            sigma_n: positive("measurements.sigma_n_m", m.sigma_n_m)?,
            sigma_e: positive("measurements.sigma_e_m", m.sigma_e_m)?,
            sigma_d: positive("measurements.sigma_d_m", m.sigma_d_m)?,
            sigma_h: positive("measurements.sigma_h_m", m.sigma_h_m)?,
            sigma_psi: positive("measurements.sigma_psi_deg", m.sigma_psi_deg)? * DEG,
            rate_position: positive("measurements.rate_position_hz", m.rate_position_hz)?,
            rate_altitude: positive("measurements.rate_altitude_hz", m.rate_altitude_hz)?,
            rate_heading: positive("measurements.rate_heading_hz", m.rate_heading_hz)?,
            gps_denied,
        };
        let p = &c.planner;
        let planner = PlannerParams {
            p_dt: probability("planner.p_dt", p.p_dt)?,
            m_sigma: if p.m_sigma >= 0.0 && p.m_sigma.is_finite() {
                p.m_sigma
            } else {
                return Err(config_err("planner.m_sigma", "must be non-negative"));
            },
            pd_init: probability("planner.pd_init", p.pd_init)?,
            sigma_r_init: positive("planner.sigma_r_init_m2", p.sigma_r_init_m2)?,
            n_vertices: if p.n_vertices >= 3 {
                p.n_vertices
            } else {
                return Err(config_err(
                    "planner.n_vertices",
                    "at least 3 vertices are required",
                ));
            },
            max_iterations: if p.max_iterations >= 1 {
                p.max_iterations
            } else {
                return Err(config_err("planner.max_iterations", "must be at least 1"));
            },
            growth_floor: positive("planner.growth_floor_m", p.growth_floor_m)?,
        };
        let t = &c.trajectory;
        let pitch = t.pitch_trim_deg;
        if !(pitch.abs() < 89.0) {
            return Err(config_err(
                "trajectory.pitch_trim_deg",
                "must lie within ±89 deg",
            ));
        }
        let trajectory = TrajectoryParams {
            speed: positive("trajectory.speed_m_s", t.speed_m_s)?,
            dt: positive("trajectory.dt_s", t.dt_s)?,
            kappa_max: positive("trajectory.kappa_max_per_km", t.kappa_max_per_km)? / KM,
            kappa_rate_max: positive(
                "trajectory.kappa_rate_max_per_km2",
                t.kappa_rate_max_per_km2,
            )? / (KM * KM),
            pitch_trim: pitch * DEG,
        };
        let ic = &c.initial_covariance;
        let p0 = NavCovariance::initial(
            positive("initial_covariance.sigma_position_m", ic.sigma_position_m)?,
            positive(
                "initial_covariance.sigma_velocity_m_s",
                ic.sigma_velocity_m_s,
            )?,
            positive(
                "initial_covariance.sigma_attitude_deg",
                ic.sigma_attitude_deg,
            )? * DEG,
            &imu,
        );
        let reference_path = match &c.reference_path {
            None => None,
            Some(rp) => {
                let mut pts = Vec::with_capacity(rp.waypoints_km.len());
                for (i, w) in rp.waypoints_km.iter().enumerate() {
                    if !(w[0].is_finite() && w[1].is_finite()) {
                        return Err(config_err(
                            &format!("reference_path.waypoints_km[{i}]"),
                            "must be finite",
                        ));
                    }
                    pts.push(Vector2::new(w[0], w[1]) * KM);
                }
                Some(pts)
            }
        };
        Ok(Self {
            name: c.meta.name.clone(),
            radars,
            rcs,
            start,
            goal,
            bounds,
            imu,
            meas,
            planner,
            trajectory,
            p0,
            reference_path,
            config,
        })
    }

    /// The source configuration.
    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// A copy with an edited configuration, re-validated.
    pub fn modified(&self, edit: impl FnOnce(&mut ScenarioConfig)) -> Result<Self> {
        let mut c = self.config.clone();
        edit(&mut c);
        Self::from_config(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(&self.config).expect("scenario configuration serializes")
    }

    pub fn altitude(&self) -> f64 {
        -self.start.z
    }

    pub fn start_ne(&self) -> Vector2<f64> {
        self.start.xy()
    }

    pub fn goal_ne(&self) -> Vector2<f64> {
        self.goal.xy()
    }

    /// Full waypoint path through the given NE points at the mission altitude and speed.
    pub fn waypoint_path(&self, points: Vec<Vector2<f64>>) -> WaypointPath {
        WaypointPath {
            points,
            altitude: self.altitude(),
            speed: self.trajectory.speed,
        }
    }

    /// Start, reference interior waypoints and goal.
    pub fn reference_waypoints(&self) -> Vec<Vector2<f64>> {
        let mut pts = vec![self.start_ne()];
        pts.extend(self.reference_path.iter().flatten().copied());
        pts.push(self.goal_ne());
        pts
    }

    /// Smoothed trajectory through a full waypoint list.
    pub fn trajectory_for(&self, points: &[Vector2<f64>]) -> Result<Trajectory> {
        let t = &self.trajectory;
        let segs = smooth_waypoints(
            &self.waypoint_path(points.to_vec()),
            t.kappa_max,
            t.kappa_rate_max,
        )?;
        Trajectory::new(segs, t.speed, self.altitude(), t.pitch_trim)
    }

    /// Uniform samples of the smoothed trajectory through `points`.
    pub fn samples_for(&self, points: &[Vector2<f64>]) -> Result<Vec<TrajectorySample>> {
        self.trajectory_for(points)?.sample(self.trajectory.dt)
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let de = toml::Deserializer::parse(text)
        .map_err(|e| config_err("<document>", e.to_string().trim().to_string()))?;
    let config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_err(
            if path == "." { "<document>" } else { &path },
            e.into_inner().message().trim().to_string(),
        )
    })?;
    Scenario::from_config(config)
}

pub fn load_scenario(path: &std::path::Path) -> Result<Scenario> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

fn num(v: f64) -> String {
    format!("{v}")
}

pub const WAYPOINT_HEADER: [&str; 2] = ["n_m", "e_m"];

/// Waypoints as `n_m,e_m` rows.
pub fn waypoints_csv(points: &[Vector2<f64>]) -> String {
    csv_string(
        &WAYPOINT_HEADER,
        points.iter().map(|p| vec![num(p.x), num(p.y)]),
    )
}

/// Parses a waypoint CSV with an `n_m,e_m` header and at least two rows.
pub fn parse_waypoints_csv(text: &str) -> Result<Vec<Vector2<f64>>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| config_err("waypoints", e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != WAYPOINT_HEADER {
        return Err(config_err("waypoints", "header must be `n_m,e_m`"));
    }
    let mut pts = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| config_err(&format!("waypoints[{i}]"), e.to_string()))?;
        if rec.len() != 2 {
            return Err(config_err(
                &format!("waypoints[{i}]"),
                "expected two columns",
            ));
        }
        let mut xy = [0.0; 2];
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                config_err(
                    &format!("waypoints[{i}].{}", WAYPOINT_HEADER[j]),
                    "not a number",
                )
            })?;
            if !v.is_finite() {
                return Err(config_err(
                    &format!("waypoints[{i}].{}", WAYPOINT_HEADER[j]),
                    "must be finite",
                ));
            }
            xy[j] = v;
        }
        pts.push(Vector2::new(xy[0], xy[1]));
    }
    if pts.len() < 2 {
        return Err(config_err(
            "waypoints",
            "at least two waypoints are required",
        ));
    }
    Ok(pts)
}

pub const TRAJECTORY_HEADER: [&str; 17] = [
    "t_s",
    "n_m",
    "e_m",
    "d_m",
    "vn_m_s",
    "ve_m_s",
    "vd_m_s",
    "roll_rad",
    "pitch_rad",
    "yaw_rad",
    "nu_x_m_s2",
    "nu_y_m_s2",
    "nu_z_m_s2",
    "omega_x_rad_s",
    "omega_y_rad_s",
    "omega_z_rad_s",
    "kappa_1_m",
];

pub fn trajectory_csv(samples: &[TrajectorySample]) -> String {
    csv_string(
        &TRAJECTORY_HEADER,
        samples.iter().map(|s| {
            let mut row = vec![num(s.t)];
            for v in [&s.p_n, &s.v_n, &s.theta, &s.nu_b, &s.omega_b] {
                row.extend(v.iter().map(|x| num(*x)));
            }
            row.push(num(s.kappa));
            row
        }),
    )
}

pub const COVARIANCE_SIGMA_HEADER: [&str; 16] = [
    "t_s",
    "sigma_pn_m",
    "sigma_pe_m",
    "sigma_pd_m",
    "sigma_vn_m_s",
    "sigma_ve_m_s",
    "sigma_vd_m_s",
    "sigma_thx_rad",
    "sigma_thy_rad",
    "sigma_thz_rad",
    "sigma_bax_m_s2",
    "sigma_bay_m_s2",
    "sigma_baz_m_s2",
    "sigma_bgx_rad_s",
    "sigma_bgy_rad_s",
    "sigma_bgz_rad_s",
];

const POSE_LABELS: [(&str, &str); 6] = [
    ("n", "m"),
    ("e", "m"),
    ("d", "m"),
    ("roll", "rad"),
    ("pitch", "rad"),
    ("yaw", "rad"),
];

/// Full covariance export header: time, 15 marginal sigmas, then the upper
/// triangle of the 6x6 aircraft pose covariance in row-major order.
pub fn covariance_header() -> Vec<String> {
    let mut h: Vec<String> = COVARIANCE_SIGMA_HEADER
        .iter()
        .map(|s| s.to_string())
        .collect();
    for (i, &(a, ua)) in POSE_LABELS.iter().enumerate() {
        for &(b, ub) in &POSE_LABELS[i..] {
            let unit = match (ua, ub) {
                ("m", "m") => "m2".to_string(),
                ("rad", "rad") => "rad2".to_string(),
                _ => "m_rad".to_string(),
            };
            h.push(format!("caa_{a}_{b}_{unit}"));
        }
    }
    h
}

pub fn covariance_csv(history: &[(f64, NavCovariance)]) -> String {
    let header = covariance_header();
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_string(
        &refs,
        history.iter().map(|(t, p)| {
            let c = crate::ins::aircraft_covariance(p);
            let mut row: Vec<String> = std::iter::once(*t).chain(p.sigmas()).map(num).collect();
            for i in 0..6 {
                for j in i..6 {
                    row.push(num(c[(i, j)]));
                }
            }
            row
        }),
    )
}

pub const DETECTION_HEADER: [&str; 5] = [
    "radar_id",
    "t_s",
    "pd_nominal_prob",
    "sigma_pd_prob",
    "violation_flag",
];

pub fn detection_csv(series: &[crate::lincov::DetectionSeries]) -> String {
    csv_string(
        &DETECTION_HEADER,
        series.iter().flat_map(|s| {
            (0..s.t.len()).map(move |k| {
                vec![
                    s.radar_id.clone(),
                    num(s.t[k]),
                    num(s.pd[k]),
                    num(s.sigma_pd[k]),
                    (s.violation[k] as u8).to_string(),
                ]
            })
        }),
    )
}

pub const BUDGET_HEADER: [&str; 4] = [
    "source",
    "sigma_pd_prob",
    "three_sigma_pd_prob",
    "percent_of_total_pct",
];

/// One row per source followed by a `total` row.
pub fn budget_csv(b: &crate::lincov::ErrorBudget) -> String {
    let rows = b
        .entries
        .iter()
        .map(|e| {
            vec![
                e.source.name().to_string(),
                num(e.sigma_pd),
                num(e.three_sigma_pd),
                num(e.percent_of_total),
            ]
        })
        .chain(std::iter::once(vec![
            "total".to_string(),
            num(b.total_sigma_pd),
            num(b.total_three_sigma_pd),
            num(if b.total_sigma_pd > 0.0 { 100.0 } else { 0.0 }),
        ]));
    csv_string(&BUDGET_HEADER, rows)
}

pub const ENSEMBLE_HEADER: [&str; 5] = [
    "radar_id",
    "t_s",
    "pd_nominal_prob",
    "mean_error_prob",
    "sigma_error_prob",
];

pub fn ensemble_csv(r: &crate::montecarlo::EnsembleResult) -> String {
    csv_string(
        &ENSEMBLE_HEADER,
        r.radar_ids.iter().enumerate().flat_map(|(i, id)| {
            (0..r.t.len()).map(move |k| {
                vec![
                    id.clone(),
                    num(r.t[k]),
                    num(r.pd_nominal[i][k]),
                    num(r.mean_error[i][k]),
                    num(r.sigma_error[i][k]),
                ]
            })
        }),
    )
}

/// Per-run `P_D` error traces, one column per retained run.
pub fn ensemble_traces_csv(r: &crate::montecarlo::EnsembleResult) -> Option<String> {
    let traces = r.traces.as_ref()?;
    let mut header = vec!["radar_id".to_string(), "t_s".to_string()];
    header.extend((0..traces.len()).map(|j| format!("run{j}_error_prob")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    Some(csv_string(
        &header_refs,
        r.radar_ids.iter().enumerate().flat_map(|(i, id)| {
            (0..r.t.len()).map(move |k| {
                let mut row = vec![id.clone(), num(r.t[k])];
                row.extend(traces.iter().map(|run| num(run[i][k])));
                row
            })
        }),
    ))
}

/// Budget table with snapshot metadata.
pub fn budget_json(scenario: &Scenario, b: &crate::lincov::ErrorBudget) -> String {
    let doc = serde_json::json!({
        "scenario": scenario.name,
        "t_snapshot_s": b.t_snapshot,
        "sample_index": b.sample_index,
        "radar_id": b.radar_id,
        "evaluations": b.evaluations,
        "total_sigma_pd": b.total_sigma_pd,
        "total_three_sigma_pd": b.total_three_sigma_pd,
        "rss_sigma_pd": b.rss(),
        "gain_checksums": b.gain_checksums,
        "entries": b.entries,
    });
    serde_json::to_string_pretty(&doc).expect("budget serializes")
}

/// Planner iteration log with final status and warnings.
pub fn plan_log_json(scenario: &Scenario, r: &crate::planner::PlanResult) -> String {
    let clearance: Vec<_> = scenario
        .radars
        .iter()
        .map(|radar| {
            serde_json::json!({
                "radar_id": radar.id,
                "min_clearance_m": if r.samples.is_empty() { None } else {
                    Some(crate::planner::min_clearance(&r.samples, radar))
                },
            })
        })
        .collect();
    let doc = serde_json::json!({
        "scenario": scenario.name,
        "status": r.status,
        "iterations": r.iterations,
        "path_length_m": crate::planner::path_length(&r.waypoints),
        "duration_s": r.samples.last().map(|s| s.t),
        "peak_sigma_pd": r.series.iter().map(|s| s.peak_sigma()).fold(0.0, f64::max),
        "clearance": clearance,
        "warnings": r.warnings,
        "history": r.history,
        "polygons": r.polygons,
    });
    serde_json::to_string_pretty(&doc).expect("plan log serializes")
}

/// Ensemble summary metadata.
pub fn ensemble_json(scenario: &Scenario, r: &crate::montecarlo::EnsembleResult) -> String {
    let doc = serde_json::json!({
        "scenario": scenario.name,
        "n_runs": r.n_runs,
        "n_failed": r.n_failed,
        "seed": r.seed,
        "radar_ids": r.radar_ids,
        "samples": r.t.len(),
    });
    serde_json::to_string_pretty(&doc).expect("ensemble serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[[radar]]
id = "r1"
position_km = [0.0, 0.0, 0.0]

[mission]
start_km = [-100.0, -700.0, -3.5]
goal_km = [-400.0, 1650.0, -3.5]

[bounds]
n_min_km = -1500.0
n_max_km = 1500.0
e_min_km = -1000.0
e_max_km = 2000.0
"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.radars.len(), 1);
        assert_eq!(s.radars[0].c_r, 164.7);
        assert_eq!(s.planner.p_dt, 0.1);
        assert_eq!(s.planner.n_vertices, 30);
        assert_eq!(s.radars[0].c_rr[(0, 0)], (500.0f64 / 3.0).powi(2));
        assert_eq!(s.radars[0].c_rr[(3, 3)], (2.0f64 / 3.0).powi(2));
        assert_eq!(s.imu, ImuSpec::industrial());
        assert_eq!(s.start, Vector3::new(-100_000.0, -700_000.0, -3500.0));
    }

    #[test]
    fn round_trip_is_identity() {
        let s = parse_scenario(MINIMAL).unwrap();
        let again = parse_scenario(&s.to_toml()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn errors_name_the_field() {
        let dup = MINIMAL.to_string() + "\n[[radar]]\nid = \"r1\"\nposition_km = [1.0, 0.0, 0.0]\n";
        match parse_scenario(&dup).unwrap_err() {
            Error::Config { path, message } => {
                assert_eq!(path, "radar[1].id");
                assert!(message.contains("duplicate"));
            }
            e => panic!("{e:?}"),
        }
        let unknown = MINIMAL.replace("[bounds]", "[bounds]\nwidth_km = 3.0");
        match parse_scenario(&unknown).unwrap_err() {
            Error::Config { path, .. } => assert!(path.starts_with("bounds"), "{path}"),
            e => panic!("{e:?}"),
        }
        let bad = MINIMAL.replace("position_km = [0.0, 0.0, 0.0]", "position_km = [0.0, 0.0]");
        assert!(matches!(parse_scenario(&bad), Err(Error::Config { .. })));
    }

    #[test]
    fn waypoint_csv_round_trip() {
        let pts = vec![Vector2::new(1.5, -2.0), Vector2::new(1e6, 3.25e5)];
        assert_eq!(parse_waypoints_csv(&waypoints_csv(&pts)).unwrap(), pts);
        assert!(parse_waypoints_csv("n_m,e_m\n1,2\n").is_err());
        assert!(parse_waypoints_csv("x,y\n1,2\n3,4\n").is_err());
        assert!(parse_waypoints_csv("n_m,e_m\n1,nan\n3,4\n").is_err());
    }
}
