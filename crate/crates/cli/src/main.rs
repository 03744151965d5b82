use clap::{Args, Parser, Subcommand, ValueEnum};
use pdvg::ins::run_covariance;
use pdvg::lincov::{error_budget, sigma_pd_series, NoiseSourceSet};
use pdvg::montecarlo::{run_ensemble_with, EnsembleOptions};
use pdvg::planner::{initial_polygons, plan, PlanStatus};
use pdvg::scenario::{self, load_scenario, parse_waypoints_csv, Scenario};
use pdvg::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Radar-threat path planning with navigation and radar uncertainty.
#[derive(Debug, Parser)]
#[command(name = "pdvg", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Directory for output files; without it the main table goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output format for tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Override the scenario sample interval in seconds.
    #[arg(long, global = true, value_name = "S")]
    dt: Option<f64>,
    /// Suppress the summary printed to stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the planner and write the result bundle.
    Plan { scenario: PathBuf },
    /// Detection series along a fixed waypoint list.
    Evaluate {
        scenario: PathBuf,
        waypoints: PathBuf,
    },
    /// Per-source error budget at one time.
    Budget {
        scenario: PathBuf,
        /// Snapshot time in seconds.
        #[arg(long, value_name = "T")]
        at: f64,
        /// Waypoint CSV to fly instead of the scenario reference path.
        #[arg(long)]
        waypoints: Option<PathBuf>,
    },
    /// Monte Carlo ensemble along the reference path.
    Montecarlo {
        scenario: PathBuf,
        #[arg(short = 'n', long = "runs", default_value_t = 500)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        waypoints: Option<PathBuf>,
        /// Also write every run's error trace.
        #[arg(long)]
        traces: bool,
    },
    /// Parse and check a scenario without running anything.
    Validate { scenario: PathBuf },
}

struct Output<'a> {
    global: &'a Global,
}

impl Output<'_> {
    fn file(&self, name: &str, text: &str) -> Result<()> {
        if let Some(dir) = &self.global.out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), text)?;
        }
        Ok(())
    }

    /// Writes the file under `--out`, or prints it when no directory is set.
    fn primary(&self, name: &str, text: &str) -> Result<()> {
        if self.global.out.is_some() {
            self.file(name, text)
        } else {
            print!("{text}");
            Ok(())
        }
    }

    fn note(&self, msg: impl AsRef<str>) {
        if !self.global.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn load(path: &Path, global: &Global) -> Result<Scenario> {
    let s = load_scenario(path)?;
    match global.dt {
        Some(dt) => s.modified(|c| c.trajectory.dt_s = dt),
        None => Ok(s),
    }
}

fn waypoints(s: &Scenario, file: Option<&PathBuf>) -> Result<Vec<nalgebra::Vector2<f64>>> {
    match file {
        Some(p) => parse_waypoints_csv(&std::fs::read_to_string(p)?),
        None => Ok(s.reference_waypoints()),
    }
}

fn configure_workers() -> Result<()> {
    if let Ok(v) = std::env::var("PDVG_WORKERS") {
        let n: usize = v.trim().parse().map_err(|_| Error::Config {
            path: "PDVG_WORKERS".into(),
            message: format!("`{v}` is not a count"),
        })?;
        // A second initialisation (e.g. in tests) keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    configure_workers()?;
    let g = &cli.global;
    let out = Output { global: g };
    match &cli.command {
        Command::Validate { scenario: path } => {
            let s = load(path, g)?;
            let p = &s.planner;
            let polys = initial_polygons(&s.radars, p.pd_init, p.sigma_r_init, p.n_vertices)?;
            let eps = pdvg::planner::geometry_eps(1.0);
            for poly in &polys {
                if poly.contains_strict(&s.start_ne(), eps)
                    || poly.contains_strict(&s.goal_ne(), eps)
                {
                    return Err(Error::InfeasibleEndpoint {
                        radar: poly.radar_id.clone(),
                    });
                }
            }
            let samples = s.samples_for(&s.reference_waypoints())?;
            out.note(format!(
                "{}: {} radars, reference path {:.1} km over {:.0} s, ok",
                s.name,
                s.radars.len(),
                pdvg::planner::path_length(&s.reference_waypoints()) / 1000.0,
                samples.last().map_or(0.0, |x| x.t)
            ));
        }
        Command::Plan { scenario: path } => {
            let s = load(path, g)?;
            let r = plan(&s)?;
            let log = scenario::plan_log_json(&s, &r);
            out.note(format!(
                "{}: {:?} after {} iterations",
                s.name, r.status, r.iterations
            ));
            for w in &r.warnings {
                out.note(format!("warning: {w}"));
            }
            match g.format {
                Format::Csv => {
                    out.primary("waypoints.csv", &scenario::waypoints_csv(&r.waypoints))?;
                    out.file("trajectory.csv", &scenario::trajectory_csv(&r.samples))?;
                    out.file("detection.csv", &scenario::detection_csv(&r.series))?;
                    out.file("plan_log.json", &log)?;
                }
                Format::Json => out.primary("plan_log.json", &log)?,
            }
            match r.status {
                PlanStatus::Valid => {}
                PlanStatus::NoPath => return Err(Error::NoPath),
                PlanStatus::IterationCap => {
                    return Err(Error::IterationCap {
                        iterations: r.iterations,
                        violations: r.last_violations.len(),
                    })
                }
            }
        }
        Command::Evaluate {
            scenario: path,
            waypoints: file,
        } => {
            let s = load(path, g)?;
            let pts = waypoints(&s, Some(file))?;
            let samples = s.samples_for(&pts)?;
            let series = sigma_pd_series(&s, &samples, &NoiseSourceSet::all())?;
            let violations =
                pdvg::planner::check_validity(&series, s.planner.p_dt, s.planner.m_sigma);
            out.note(format!(
                "{}: {} samples, {} violating samples",
                s.name,
                samples.len(),
                violations.len()
            ));
            out.primary("detection.csv", &scenario::detection_csv(&series))?;
            if g.out.is_some() {
                out.file("trajectory.csv", &scenario::trajectory_csv(&samples))?;
                let cov = run_covariance(&samples, &s.p0, &s.imu, &s.meas)?;
                out.file("covariance.csv", &scenario::covariance_csv(&cov))?;
            }
        }
        Command::Budget {
            scenario: path,
            at,
            waypoints: file,
        } => {
            let s = load(path, g)?;
            let samples = s.samples_for(&waypoints(&s, file.as_ref())?)?;
            let b = error_budget(&s, &samples, *at)?;
            out.note(format!(
                "{}: t = {} s, radar {}, total 3-sigma P_D {:.4e}",
                s.name, b.t_snapshot, b.radar_id, b.total_three_sigma_pd
            ));
            match g.format {
                Format::Csv => {
                    out.primary("budget.csv", &scenario::budget_csv(&b))?;
                    out.file("budget.json", &scenario::budget_json(&s, &b))?;
                }
                Format::Json => out.primary("budget.json", &scenario::budget_json(&s, &b))?,
            }
        }
        Command::Montecarlo {
            scenario: path,
            runs,
            seed,
            waypoints: file,
            traces,
        } => {
            let s = load(path, g)?;
            let samples = s.samples_for(&waypoints(&s, file.as_ref())?)?;
            let opts = EnsembleOptions {
                retain_traces: *traces,
                ..EnsembleOptions::default()
            };
            let r = run_ensemble_with(&s, &samples, *runs, *seed, &NoiseSourceSet::all(), opts)?;
            out.note(format!(
                "{}: {} runs, {} failed",
                s.name, r.n_runs, r.n_failed
            ));
            let summary = scenario::ensemble_json(&s, &r);
            match g.format {
                Format::Csv => {
                    out.primary("ensemble.csv", &scenario::ensemble_csv(&r))?;
                    out.file("ensemble.json", &summary)?;
                }
                Format::Json => out.primary("ensemble.json", &summary)?,
            }
            if let Some(t) = scenario::ensemble_traces_csv(&r) {
                out.file("ensemble_traces.csv", &t)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pdvg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
