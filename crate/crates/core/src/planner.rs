//! Probability-of-detection visibility graph planner.
//!
//! Every radar is an obstacle polygon sized by its detection radius. The
//! planner finds the shortest visibility-graph path around the polygons,
//! smooths and evaluates it, and wherever `P̄_D + m_σ σ_pd` reaches the
//! threshold it pushes the nearest polygon vertices out to the range that
//! restores the margin. The loop ends on a valid path, an exhausted graph or
//! the iteration cap.

use crate::ins::{aircraft_covariance, run_covariance, NeRect};
use crate::lincov::{detection_series, DetectionSeries, NoiseSourceSet};
use crate::math::{wrap_angle, Matrix6};
use crate::radar::{detection_radius, rcs_angles, rcs_ellipsoid, RadarSite};
use crate::scenario::Scenario;
use crate::trajectory::TrajectorySample;
use crate::{Error, Result};
use nalgebra::Vector2;
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

/// Star-shaped obstacle polygon around one radar, stored as radii at
/// increasing angles (measured from north towards east).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadarPolygon {
    pub radar_id: String,
    pub center: Vector2<f64>,
    pub angles: Vec<f64>,
    pub radii: Vec<f64>,
}

impl RadarPolygon {
    /// Regular polygon with `n` vertices, the first one due north.
    pub fn regular(
        radar_id: impl Into<String>,
        center: Vector2<f64>,
        radius: f64,
        n: usize,
    ) -> Self {
        let angles = (0..n).map(|i| i as f64 * TAU / n as f64).collect();
        Self {
            radar_id: radar_id.into(),
            center,
            angles,
            radii: vec![radius; n],
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Vector2<f64> {
        let (a, r) = (self.angles[i], self.radii[i]);
        self.center + Vector2::new(r * a.cos(), r * a.sin())
    }

    pub fn vertices(&self) -> Vec<Vector2<f64>> {
        (0..self.len()).map(|i| self.vertex(i)).collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the vertex closest in angle to `angle`.
    pub fn nearest_vertex(&self, angle: f64) -> usize {
        (0..self.len())
            .min_by(|a, b| {
                let da = wrap_angle(self.angles[*a] - angle).abs();
                let db = wrap_angle(self.angles[*b] - angle).abs();
                da.total_cmp(&db).then(a.cmp(b))
            })
            .expect("polygon has vertices")
    }

    /// Pushes the vertex at `angle` out to at least `radius`, inserting it if absent.
    fn raise_at(&mut self, angle: f64, radius: f64) {
        let angle = angle.rem_euclid(TAU);
        if let Some(i) = (0..self.len()).find(|i| wrap_angle(self.angles[*i] - angle).abs() < 1e-9)
        {
            self.radii[i] = self.radii[i].max(radius);
            return;
        }
        let pos = self.angles.partition_point(|a| *a < angle);
        self.angles.insert(pos, angle);
        self.radii.insert(pos, radius);
    }

    /// Scales every radius by `factor`.
    pub fn inflate(&mut self, factor: f64) {
        for r in &mut self.radii {
            *r *= factor;
        }
    }

    /// Whether the ring is simple: angles strictly increasing within one turn.
    pub fn is_simple(&self) -> bool {
        self.len() >= 3
            && self.angles.windows(2).all(|w| w[1] > w[0])
            && self.angles.last().unwrap() - self.angles[0] < TAU
            && self.radii.iter().all(|r| *r > 0.0)
    }

    fn edges(&self) -> impl Iterator<Item = (Vector2<f64>, Vector2<f64>)> + '_ {
        let v = self.vertices();
        let n = v.len();
        (0..n).map(move |i| (v[i], v[(i + 1) % n]))
    }

    fn contains_raw(&self, p: &Vector2<f64>) -> bool {
        let v = self.vertices();
        let n = v.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (v[i], v[j]);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    fn boundary_distance(&self, p: &Vector2<f64>) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, &a, &b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Strict interior test: inside and farther than `eps` from the boundary.
    pub fn contains_strict(&self, p: &Vector2<f64>, eps: f64) -> bool {
        if (p - self.center).norm() > self.max_radius() + eps {
            return false;
        }
        self.contains_raw(p) && self.boundary_distance(p) > eps
    }

    /// True when some point of the open segment lies strictly inside.
    pub fn blocks_segment(&self, a: &Vector2<f64>, b: &Vector2<f64>, eps: f64) -> bool {
        if point_segment_distance(&self.center, a, b) > self.max_radius() + eps {
            return false;
        }
        let mut ts = vec![0.0, 1.0];
        for (p, q) in self.edges() {
            segment_crossings(a, b, &p, &q, &mut ts);
        }
        ts.sort_by(f64::total_cmp);
        let len = (b - a).norm();
        ts.windows(2).any(|w| {
            (w[1] - w[0]) * len > eps
                && self.contains_strict(&(a + (b - a) * (0.5 * (w[0] + w[1]))), eps)
        })
    }
}

fn cross(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

fn point_segment_distance(p: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    let d = b - a;
    let l2 = d.norm_squared();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&d) / l2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Appends the parameters along `ab` where it meets segment `pq`.
fn segment_crossings(
    a: &Vector2<f64>,
    b: &Vector2<f64>,
    p: &Vector2<f64>,
    q: &Vector2<f64>,
    out: &mut Vec<f64>,
) {
    let r = b - a;
    let s = q - p;
    let denom = cross(&r, &s);
    let ap = p - a;
    let rr = r.norm_squared();
    if rr == 0.0 {
        return;
    }
    if denom.abs() > 1e-14 * r.norm() * s.norm() {
        let t = cross(&ap, &s) / denom;
        let u = cross(&ap, &r) / denom;
        if (-1e-12..=1.0 + 1e-12).contains(&u) && t > 0.0 && t < 1.0 {
            out.push(t);
        }
    } else {
        for e in [p, q] {
            let t = (e - a).dot(&r) / rr;
            if t > 0.0 && t < 1.0 && point_segment_distance(e, a, b) < 1e-9 * (1.0 + rr.sqrt()) {
                out.push(t);
            }
        }
    }
}

/// Geometric tolerance for a field whose coordinates reach `scale` metres.
pub fn geometry_eps(scale: f64) -> f64 {
    (1e-12 * scale).max(1e-9)
}

/// One regular polygon per radar at the initial detection radius.
pub fn initial_polygons(
    radars: &[RadarSite],
    pd_init: f64,
    sigma_r_init: f64,
    n_vertices: usize,
) -> Result<Vec<RadarPolygon>> {
    if n_vertices < 3 {
        return Err(Error::Validation(
            "polygons need at least 3 vertices".into(),
        ));
    }
    radars
        .iter()
        .map(|r| {
            let radius = detection_radius(pd_init, sigma_r_init, r.c_r, r.p_fa)?;
            Ok(RadarPolygon::regular(
                r.id.clone(),
                r.p_r_n.xy(),
                radius,
                n_vertices,
            ))
        })
        .collect()
}

/// Visibility graph; node 0 is the start and node 1 the goal.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityGraph {
    pub nodes: Vec<Vector2<f64>>,
    pub adjacency: Vec<Vec<(usize, f64)>>,
}

impl VisibilityGraph {
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].iter().any(|(w, _)| *w == v)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

fn field_scale(polygons: &[RadarPolygon], pts: &[Vector2<f64>]) -> f64 {
    let a = polygons
        .iter()
        .map(|p| p.center.abs().max() + p.max_radius())
        .fold(0.0, f64::max);
    pts.iter().map(|p| p.abs().max()).fold(a, f64::max)
}

/// Builds the visibility graph over start, goal and in-bounds polygon vertices.
pub fn build_visibility_graph(
    polygons: &[RadarPolygon],
    start: Vector2<f64>,
    goal: Vector2<f64>,
    bounds: &NeRect,
) -> Result<VisibilityGraph> {
    let eps = geometry_eps(field_scale(polygons, &[start, goal]));
    for poly in polygons {
        if poly.contains_strict(&start, eps) || poly.contains_strict(&goal, eps) {
            return Err(Error::InfeasibleEndpoint {
                radar: poly.radar_id.clone(),
            });
        }
    }
    let within = |p: &Vector2<f64>| bounds.contains(p.x, p.y);
    if !within(&start) || !within(&goal) {
        return Err(Error::Validation(
            "start and goal must lie inside the planning bounds".into(),
        ));
    }
    let mut nodes = vec![start, goal];
    for poly in polygons {
        nodes.extend(poly.vertices().into_iter().filter(within));
    }
    let n = nodes.len();
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|u| {
            ((u + 1)..n)
                .filter_map(|v| {
                    let (a, b) = (&nodes[u], &nodes[v]);
                    let cost = (b - a).norm();
                    if cost <= eps {
                        return None;
                    }
                    let blocked = polygons.iter().any(|p| p.blocks_segment(a, b, eps));
                    (!blocked).then_some((v, cost))
                })
                .collect()
        })
        .collect();
    let mut adjacency = vec![Vec::new(); n];
    for (u, row) in rows.into_iter().enumerate() {
        for (v, c) in row {
            adjacency[u].push((v, c));
            adjacency[v].push((u, c));
        }
    }
    for row in &mut adjacency {
        row.sort_by_key(|e| e.0);
    }
    Ok(VisibilityGraph { nodes, adjacency })
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    cost: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> Ordering {
        o.cost.total_cmp(&self.cost).then(o.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Dijkstra from node 0 to node 1, returning node ids. Ties in cost are broken
/// towards the smaller predecessor id.
pub fn shortest_path_ids(graph: &VisibilityGraph) -> Result<Vec<usize>> {
    let n = graph.nodes.len();
    if n < 2 {
        return Err(Error::Validation(
            "graph must contain start and goal".into(),
        ));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[0] = 0.0;
    heap.push(HeapItem { cost: 0.0, node: 0 });
    while let Some(HeapItem { cost, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        if node == 1 {
            break;
        }
        for &(v, w) in &graph.adjacency[node] {
            if done[v] {
                continue;
            }
            let c = cost + w;
            if c < dist[v] || (c == dist[v] && node < prev[v]) {
                dist[v] = c;
                prev[v] = node;
                heap.push(HeapItem { cost: c, node: v });
            }
        }
    }
    if !dist[1].is_finite() {
        return Err(Error::NoPath);
    }
    let mut path = vec![1];
    while *path.last().unwrap() != 0 {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    Ok(path)
}

pub fn shortest_path(graph: &VisibilityGraph) -> Result<Vec<Vector2<f64>>> {
    Ok(shortest_path_ids(graph)?
        .into_iter()
        .map(|i| graph.nodes[i])
        .collect())
}

pub fn path_length(points: &[Vector2<f64>]) -> f64 {
    points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// A sampled candidate path and its detection statistics.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub samples: Vec<TrajectorySample>,
    pub series: Vec<DetectionSeries>,
}

/// Smooths, samples and evaluates a waypoint path against every radar.
pub fn evaluate_candidate(waypoints: &[Vector2<f64>], scenario: &Scenario) -> Result<Evaluation> {
    let samples = scenario.samples_for(waypoints)?;
    let covs = run_covariance(&samples, &scenario.p0, &scenario.imu, &scenario.meas)?;
    let c_aa: Vec<Matrix6> = covs.iter().map(|(_, p)| aircraft_covariance(p)).collect();
    let series = detection_series(scenario, &samples, &c_aa, &NoiseSourceSet::all())?;
    Ok(Evaluation { samples, series })
}

/// A sample where the detection margin is violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub radar: usize,
    pub sample: usize,
    pub t: f64,
    pub pd: f64,
    pub sigma_pd: f64,
}

/// Every `(radar, sample)` with `P̄_D + m_σ σ_pd ≥ P_DT`.
pub fn check_validity(series: &[DetectionSeries], p_dt: f64, m_sigma: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, s) in series.iter().enumerate() {
        for k in 0..s.pd.len() {
            if s.pd[k] + m_sigma * s.sigma_pd[k] >= p_dt {
                out.push(Violation {
                    radar: i,
                    sample: k,
                    t: s.t[k],
                    pd: s.pd[k],
                    sigma_pd: s.sigma_pd[k],
                });
            }
        }
    }
    out
}

/// Expansion target `max(P_DT − m_σ σ_pd, 10⁻³)`.
pub fn expansion_pd(p_dt: f64, m_sigma: f64, sigma_pd: f64) -> f64 {
    (p_dt - m_sigma * sigma_pd).max(1e-3)
}

/// Grows polygon vertices near each violation; returns warnings for vertices
/// pushed outside the bounds.
pub fn expand_polygons(
    polygons: &mut [RadarPolygon],
    violations: &[Violation],
    samples: &[TrajectorySample],
    scenario: &Scenario,
) -> Result<Vec<String>> {
    let p = &scenario.planner;
    let mut targets: Vec<Vec<(f64, f64)>> = vec![Vec::new(); polygons.len()];
    for v in violations {
        let radar = &scenario.radars[v.radar];
        let sample = &samples[v.sample];
        let pose = sample.pose();
        let sigma_r = rcs_ellipsoid(&scenario.rcs, &rcs_angles(&pose, &radar.p_r_n)?);
        let r_exp = detection_radius(
            expansion_pd(p.p_dt, p.m_sigma, v.sigma_pd),
            sigma_r,
            radar.c_r,
            radar.p_fa,
        )?;
        let poly = &polygons[v.radar];
        let d = sample.p_n.xy() - poly.center;
        let idx = poly.nearest_vertex(d.y.atan2(d.x));
        targets[v.radar].push((poly.angles[idx], r_exp));
    }
    let mut warnings = Vec::new();
    for (poly, list) in polygons.iter_mut().zip(targets) {
        let mut per_vertex: Vec<(f64, f64)> = Vec::new();
        for (a, r) in list {
            match per_vertex.iter_mut().find(|(b, _)| *b == a) {
                Some(e) => e.1 = e.1.max(r),
                None => per_vertex.push((a, r)),
            }
        }
        per_vertex.sort_by(|x, y| x.0.total_cmp(&y.0));
        let step = TAU / p.n_vertices as f64;
        for (angle, r_exp) in per_vertex {
            let idx = poly.nearest_vertex(angle);
            // Chords between vertices spaced `step` apart dip inside the vertex
            // circle, so the vertex is placed on the circumscribing radius.
            let new_r = (r_exp / (0.5 * step).cos()).max(poly.radii[idx] + p.growth_floor);
            poly.radii[idx] = new_r;
            poly.raise_at(angle - step, new_r);
            poly.raise_at(angle + step, new_r);
        }
        for i in 0..poly.len() {
            let v = poly.vertex(i);
            if !scenario.bounds.contains(v.x, v.y) {
                warnings.push(format!(
                    "polygon `{}` vertex at {:.1} deg extends beyond the planning bounds",
                    poly.radar_id,
                    poly.angles[i].to_degrees()
                ));
                break;
            }
        }
        debug_assert!(poly.is_simple());
    }
    Ok(warnings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Valid,
    IterationCap,
    NoPath,
}

/// One planner iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Iteration {
    pub index: usize,
    pub waypoints: Vec<[f64; 2]>,
    pub path_length_m: f64,
    pub violations: usize,
    /// Largest `P̄_D + m_σ σ_pd` along the candidate.
    pub peak_margin: f64,
    pub vertex_counts: Vec<usize>,
    pub inflated: bool,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub status: PlanStatus,
    pub waypoints: Vec<Vector2<f64>>,
    pub samples: Vec<TrajectorySample>,
    pub series: Vec<DetectionSeries>,
    pub iterations: usize,
    pub history: Vec<Iteration>,
    pub polygons: Vec<RadarPolygon>,
    pub warnings: Vec<String>,
    pub last_violations: Vec<Violation>,
}

impl PlanResult {
    pub fn is_valid(&self) -> bool {
        self.status == PlanStatus::Valid
    }
}

fn peak_margin(series: &[DetectionSeries], m: f64) -> f64 {
    series
        .iter()
        .flat_map(|s| s.pd.iter().zip(&s.sigma_pd).map(move |(p, q)| p + m * q))
        .fold(0.0, f64::max)
}

fn candidate(scenario: &Scenario, polygons: &[RadarPolygon]) -> Result<Vec<Vector2<f64>>> {
    let g = build_visibility_graph(
        polygons,
        scenario.start_ne(),
        scenario.goal_ne(),
        &scenario.bounds,
    )?;
    shortest_path(&g)
}

/// Runs the planner loop to a valid path, an empty graph or the iteration cap.
pub fn plan(scenario: &Scenario) -> Result<PlanResult> {
    let p = &scenario.planner;
    let mut polygons = initial_polygons(&scenario.radars, p.pd_init, p.sigma_r_init, p.n_vertices)?;
    let mut history = Vec::new();
    let mut warnings = Vec::new();
    let mut last: Option<(Vec<Vector2<f64>>, Evaluation, Vec<Violation>)> = None;
    let finish = |status,
                  history,
                  polygons,
                  warnings,
                  last: Option<(Vec<Vector2<f64>>, Evaluation, Vec<Violation>)>| {
        let (waypoints, eval, violations) = last.unwrap_or_else(|| {
            (
                Vec::new(),
                Evaluation {
                    samples: vec![],
                    series: vec![],
                },
                vec![],
            )
        });
        let iterations = Vec::len(&history);
        PlanResult {
            status,
            waypoints,
            samples: eval.samples,
            series: eval.series,
            iterations,
            history,
            polygons,
            warnings,
            last_violations: violations,
        }
    };
    for index in 1..=p.max_iterations {
        let path = match candidate(scenario, &polygons) {
            Ok(path) => path,
            Err(Error::NoPath) if index > 1 => {
                warnings.push("expanded polygons leave no path between start and goal".into());
                return Ok(finish(
                    PlanStatus::NoPath,
                    history,
                    polygons,
                    warnings,
                    last,
                ));
            }
            Err(Error::InfeasibleEndpoint { radar }) if index > 1 => {
                warnings.push(format!(
                    "polygon `{radar}` has grown over the start or goal"
                ));
                return Ok(finish(
                    PlanStatus::NoPath,
                    history,
                    polygons,
                    warnings,
                    last,
                ));
            }
            Err(e) => return Err(e),
        };
        let mut inflated = false;
        let (path, eval) = match evaluate_candidate(&path, scenario) {
            Ok(eval) => (path, eval),
            Err(Error::InfeasibleSmoothing { .. }) => {
                inflated = true;
                for poly in &mut polygons {
                    poly.inflate(1.01);
                }
                warnings.push(format!(
                    "iteration {index}: candidate could not be smoothed, polygons inflated by 1%"
                ));
                let path = candidate(scenario, &polygons)?;
                let eval = evaluate_candidate(&path, scenario)?;
                (path, eval)
            }
            Err(e) => return Err(e),
        };
        let violations = check_validity(&eval.series, p.p_dt, p.m_sigma);
        history.push(Iteration {
            index,
            waypoints: path.iter().map(|v| [v.x, v.y]).collect(),
            path_length_m: path_length(&path),
            violations: violations.len(),
            peak_margin: peak_margin(&eval.series, p.m_sigma),
            vertex_counts: polygons.iter().map(RadarPolygon::len).collect(),
            inflated,
        });
        if violations.is_empty() {
            return Ok(finish(
                PlanStatus::Valid,
                history,
                polygons.clone(),
                warnings,
                Some((path, eval, violations)),
            ));
        }
        if index < p.max_iterations {
            warnings.extend(expand_polygons(
                &mut polygons,
                &violations,
                &eval.samples,
                scenario,
            )?);
        }
        last = Some((path, eval, violations));
    }
    Ok(finish(
        PlanStatus::IterationCap,
        history,
        polygons,
        warnings,
        last,
    ))
}

/// Smallest horizontal distance from any sample to the radar.
pub fn min_clearance(samples: &[TrajectorySample], radar: &RadarSite) -> f64 {
    samples
        .iter()
        .map(|s| (s.p_n.xy() - radar.p_r_n.xy()).norm())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square(center: Vector2<f64>, r: f64) -> RadarPolygon {
        RadarPolygon::regular("sq", center, r, 4)
    }

    fn bounds() -> NeRect {
        NeRect {
            n_min: -1e4,
            n_max: 1e4,
            e_min: -1e4,
            e_max: 1e4,
        }
    }

    #[test]
    fn regular_polygon_vertices() {
        let p = square(Vector2::new(1.0, 2.0), 10.0);
        for v in p.vertices() {
            assert_relative_eq!((v - p.center).norm(), 10.0, max_relative = 1e-12);
        }
        assert!(p.is_simple());
    }

    #[test]
    fn strict_interior_excludes_boundary() {
        let p = square(Vector2::zeros(), 10.0);
        assert!(p.contains_strict(&Vector2::zeros(), 1e-9));
        assert!(!p.contains_strict(&p.vertex(0), 1e-9));
        assert!(!p.contains_strict(&(0.5 * (p.vertex(0) + p.vertex(1))), 1e-9));
        assert!(!p.contains_strict(&Vector2::new(20.0, 0.0), 1e-9));
    }

    #[test]
    fn no_polygons_gives_single_edge() {
        let g = build_visibility_graph(
            &[],
            Vector2::new(-5.0, 0.0),
            Vector2::new(5.0, 0.0),
            &bounds(),
        )
        .unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert!(g.has_edge(0, 1));
        assert_eq!(shortest_path(&g).unwrap().len(), 2);
    }

    #[test]
    fn square_blocks_direct_edge_but_not_hull() {
        let p = square(Vector2::zeros(), 10.0);
        let g = build_visibility_graph(
            std::slice::from_ref(&p),
            Vector2::new(-30.0, 0.0),
            Vector2::new(30.0, 0.0),
            &bounds(),
        )
        .unwrap();
        assert!(!g.has_edge(0, 1));
        assert!(g.has_edge(2, 3));
        assert!(!g.has_edge(2, 4));
        let path = shortest_path(&g).unwrap();
        assert_relative_eq!(
            path_length(&path),
            2.0 * (30f64.powi(2) + 10f64.powi(2)).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn endpoint_inside_is_rejected() {
        let p = square(Vector2::zeros(), 10.0);
        let err =
            build_visibility_graph(&[p], Vector2::zeros(), Vector2::new(30.0, 0.0), &bounds())
                .unwrap_err();
        assert_eq!(err, Error::InfeasibleEndpoint { radar: "sq".into() });
    }

    #[test]
    fn validity_examples() {
        let s = DetectionSeries {
            radar_id: "r".into(),
            t: vec![0.0, 1.0],
            pd: vec![0.05, 0.08],
            sigma_pd: vec![0.01, 0.01],
            violation: vec![false, true],
        };
        let v = check_validity(std::slice::from_ref(&s), 0.1, 3.0);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].sample, 1);
        assert!(check_validity(&[s], 0.1, 0.0).is_empty());
        assert_eq!(expansion_pd(0.1, 3.0, 0.05), 1e-3);
    }

    #[test]
    fn raise_inserts_and_merges() {
        let mut p = square(Vector2::zeros(), 10.0);
        p.raise_at(TAU / 4.0, 12.0);
        assert_eq!(p.len(), 4);
        assert_eq!(p.radii[1], 12.0);
        p.raise_at(0.1, 11.0);
        assert_eq!(p.len(), 5);
        assert!(p.is_simple());
        p.raise_at(-0.1, 11.0);
        assert_eq!(p.len(), 6);
        assert!(p.angles.last().unwrap() < &TAU);
    }
}
