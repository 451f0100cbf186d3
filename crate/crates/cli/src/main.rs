//! `farmcover` command-line entry point.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 usage error,
//! 3 map/config schema error, 4 connectivity error, 5 planner error.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use farmcover::harness::{run_benchmark, write_reports_jsonl, AcoOverrides, BenchConfig};
use farmcover::render::{render_fleet, render_svg, FlightPlanDocument};
use farmcover::world::{generate_waypoints, load_map_file, reference_farm};
use farmcover::{fleet, EnergyModel, Error, FarmMap, RouteGraph, Solver};

use config::FileConfig;

const EXIT_OTHER: u8 = 1;
const EXIT_SCHEMA: u8 = 3;
const EXIT_CONNECTIVITY: u8 = 4;
const EXIT_PLANNER: u8 = 5;

#[derive(Parser)]
#[command(name = "farmcover", version, about = "Energy-aware UAV coverage planning for farms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a map and report waypoint and connectivity statistics.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Plan coverage tours and write the flight path (and optional SVG).
    Plan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        /// Number of drones (1 or 2).
        #[arg(long)]
        drones: Option<usize>,
        #[arg(long, env = "GUARD_SEED")]
        seed: Option<u64>,
        /// Flight path JSON output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the repeated-trial benchmark over every solver and problem.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, env = "GUARD_SEED")]
        base_seed: Option<u64>,
        #[arg(long, default_value = "bench-out")]
        out_dir: PathBuf,
    },
    /// Draw a map, optionally with a saved flight plan, as SVG.
    Render {
        #[command(flatten)]
        common: Common,
        /// Flight plan JSON written by `plan`.
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Map file; the bundled reference farm when omitted.
    map: Option<PathBuf>,
    /// JSON config file whose keys mirror these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long)]
    clearance: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    ants: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    As,
    Mmas,
    BackAndForth,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::As => Solver::AntSystem,
            SolverArg::Mmas => Solver::MaxMin,
            SolverArg::BackAndForth => Solver::BackAndForth,
        }
    }
}

fn parse_solver(name: &str) -> anyhow::Result<Solver> {
    match name.to_ascii_lowercase().as_str() {
        "as" => Ok(Solver::AntSystem),
        "mmas" => Ok(Solver::MaxMin),
        "back-and-forth" | "back_and_forth" => Ok(Solver::BackAndForth),
        other => Err(Error::Schema {
            path: "solver".into(),
            message: format!("unknown solver `{other}`"),
        }
        .into()),
    }
}

/// Everything the subcommands need after merging flags over the config file.
struct Setup {
    map: FarmMap,
    model: EnergyModel,
    aco: AcoOverrides,
    file: FileConfig,
}

impl Common {
    fn setup(&self) -> anyhow::Result<Setup> {
        let file = FileConfig::load(self.config.as_deref())?;
        let mut map = match &self.map {
            Some(p) => load_map_file(p).with_context(|| format!("loading map {}", p.display()))?,
            None => reference_farm(),
        };
        if let Some(s) = self.spacing.or(file.spacing) {
            map = map.with_spacing(s)?;
        }
        if let Some(c) = self.clearance.or(file.clearance) {
            map = map.with_clearance(c)?;
        }
        let defaults = EnergyModel::default();
        let model = EnergyModel::new(
            self.lambda.or(file.lambda).unwrap_or(defaults.lambda()),
            self.gamma.or(file.gamma).unwrap_or(defaults.gamma()),
        )?;
        let aco = AcoOverrides {
            alpha: self.alpha.or(file.alpha),
            beta: self.beta.or(file.beta),
            rho: self.rho.or(file.rho),
            ants: self.ants.or(file.ants),
            iterations: self.iterations.or(file.iterations),
            q_deposit: None,
        };
        Ok(Setup {
            map,
            model,
            aco,
            file,
        })
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Schema { .. } | Error::StationClearance { .. } | Error::Json(_) => {
                    EXIT_SCHEMA
                }
                Error::Disconnected { .. } | Error::NoValidWaypoints | Error::NoPath { .. } => {
                    EXIT_CONNECTIVITY
                }
                Error::Io(_) => EXIT_OTHER,
                _ => EXIT_PLANNER,
            };
        }
    }
    EXIT_OTHER
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn validate(common: &Common) -> anyhow::Result<()> {
    let Setup { map, .. } = common.setup()?;
    let w = generate_waypoints(&map);
    let valid = w.valid_count();
    println!(
        "map: {} m x {} m, {} obstacles, {} stations, spacing {} m, clearance {} m",
        map.perimeter().width(),
        map.perimeter().height(),
        map.obstacles().len(),
        map.stations().len(),
        map.grid_spacing_m(),
        map.clearance_m()
    );
    println!(
        "waypoints: {} total, {valid} valid, {} invalid",
        w.len(),
        w.len() - valid
    );
    let mut first_error = None;
    for (k, s) in map.stations().iter().enumerate() {
        match RouteGraph::build(&map, &w, k) {
            Ok(g) => println!(
                "station {k} at ({}, {}): connected, {} edges",
                s.x,
                s.y,
                g.edge_count()
            ),
            Err(e) => {
                println!("station {k} at ({}, {}): {e}", s.x, s.y);
                first_error.get_or_insert(e);
            }
        }
    }
    match first_error {
        None => {
            println!("{valid} valid waypoints, connected");
            Ok(())
        }
        Some(e) => Err(e.into()),
    }
}

fn plan(
    common: &Common,
    solver: Option<SolverArg>,
    drones: Option<usize>,
    seed: Option<u64>,
    out: Option<&Path>,
    svg: Option<&Path>,
) -> anyhow::Result<()> {
    let setup = common.setup()?;
    let solver = match (solver, &setup.file.solver) {
        (Some(s), _) => s.into(),
        (None, Some(name)) => parse_solver(name)?,
        (None, None) => Solver::AntSystem,
    };
    let drones = drones.or(setup.file.drones).unwrap_or(1);
    let seed = seed
        .or(setup.file.seed)
        .unwrap_or(farmcover::harness::DEFAULT_BASE_SEED);
    let cfg = BenchConfig {
        aco: setup.aco,
        model: setup.model,
        ..BenchConfig::default()
    };
    let w = generate_waypoints(&setup.map);
    let plan = fleet::plan_fleet(&setup.map, &w, &setup.model, &cfg.planner(solver, seed), drones)?;
    for (k, d) in plan.drones.iter().enumerate() {
        println!(
            "drone {k}: station {} altitude {} m, {} waypoints, cost {:.4} kJ, distance {:.2} m, turn {:.2} deg, valid {}",
            d.station,
            d.altitude_m,
            d.waypoints.len(),
            d.tour.cost_kj,
            d.tour.total_distance_m,
            d.tour.total_turn_deg,
            d.tour.is_valid
        );
    }
    println!(
        "solver {} drones {drones} seed {seed}: cost {:.4} kJ, distance {:.2} m, turn {:.2} deg, valid {}",
        solver,
        plan.total_cost_kj(),
        plan.total_distance_m(),
        plan.total_turn_deg(),
        plan.is_valid()
    );
    if let Some(out) = out {
        let doc = FlightPlanDocument::from_fleet(&plan)?;
        write_file(out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    }
    if let Some(svg) = svg {
        write_file(svg, &render_fleet(&setup.map, &w, &plan))?;
    }
    Ok(())
}

fn bench(
    common: &Common,
    trials: Option<usize>,
    base_seed: Option<u64>,
    out_dir: &Path,
) -> anyhow::Result<()> {
    let setup = common.setup()?;
    let cfg = BenchConfig {
        n_trials: trials
            .or(setup.file.trials)
            .unwrap_or(farmcover::harness::DEFAULT_TRIALS),
        base_seed: base_seed
            .or(setup.file.base_seed)
            .unwrap_or(farmcover::harness::DEFAULT_BASE_SEED),
        aco: setup.aco,
        model: setup.model,
        ..BenchConfig::default()
    };
    let outcome = run_benchmark(&setup.map, &cfg)?;
    fs::create_dir_all(out_dir)?;

    let mut jsonl = Vec::new();
    write_reports_jsonl(&outcome.reports, &mut jsonl)?;
    fs::write(out_dir.join("trials.jsonl"), jsonl)?;
    write_file(
        &out_dir.join("summary.json"),
        &(serde_json::to_string_pretty(&outcome.summary)? + "\n"),
    )?;
    let w = generate_waypoints(&setup.map);
    for (solver, problem, plan) in &outcome.best_plans {
        let name = format!("best_{}_{}.svg", file_tag(*solver), problem);
        write_file(&out_dir.join(name), &render_fleet(&setup.map, &w, plan))?;
    }
    print!("{}", outcome.summary.table());
    println!("results written to {}", out_dir.display());

    if outcome.summary.cells.iter().any(|c| c.error.is_none()) {
        Ok(())
    } else {
        let message = outcome
            .summary
            .cells
            .iter()
            .filter_map(|c| c.error.clone())
            .next()
            .unwrap_or_else(|| "no cells ran".into());
        Err(Error::InvalidParameter {
            name: "bench",
            message: format!("every cell failed: {message}"),
        }
        .into())
    }
}

fn file_tag(s: Solver) -> &'static str {
    match s {
        Solver::BackAndForth => "back_and_forth",
        Solver::AntSystem => "as",
        Solver::MaxMin => "mmas",
    }
}

fn render(common: &Common, plan: Option<&Path>, out: &Path) -> anyhow::Result<()> {
    let setup = common.setup()?;
    let w = generate_waypoints(&setup.map);
    let paths = match plan {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let doc: FlightPlanDocument = serde_json::from_str(&text).map_err(|e| Error::Schema {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            doc.paths()
        }
        None => Vec::new(),
    };
    write_file(out, &render_svg(&setup.map, &w, &paths))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { common } => validate(common),
        Command::Plan {
            common,
            solver,
            drones,
            seed,
            out,
            svg,
        } => plan(common, *solver, *drones, *seed, out.as_deref(), svg.as_deref()),
        Command::Bench {
            common,
            trials,
            base_seed,
            out_dir,
        } => bench(common, *trials, *base_seed, out_dir),
        Command::Render { common, plan, out } => render(common, plan.as_deref(), out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
