use clap::{Args, Parser, Subcommand};
use rrpath::check::run_checks;
use rrpath::config::{parse_field, RunConfig};
use rrpath::controlled::{ControlledIntegrand, ControlledVector};
use rrpath::convergence::{convergence_sweep, Scenario, ScenarioSpec};
use rrpath::drivers::{FbmGenerator, FbmMethod};
use rrpath::grid::{write_table_csv, Grid};
use rrpath::rough_path::{validate_dense_table, SecondLevelTableJson};
use rrpath::sewing::{integral_norm_bound, integrate};
use rrpath::solver::solve_global;
use rrpath::tensor::Vector;
use rrpath::Error;
use serde_json::json;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "rrpath", version, about = "Reduced rough paths: lifts, rough integrals and RDE solves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Random seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Lift exponent for lift/integrate, working exponent for solve.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Driver regularity for solve.
    #[arg(long, global = true)]
    beta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Lift a driver and report its norms.
    Lift {
        #[arg(long)]
        config: PathBuf,
    },
    /// Integrate the configured integrand against the lifted driver.
    Integrate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve dY = F(Y) d𝕏.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Refinement sweep over dyadic grids.
    Convergence {
        #[arg(long, conflicts_with = "scenario")]
        config: Option<PathBuf>,
        /// circle_constant, linear_exp, fbm_driver_identity or fbm_sin.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Sample fractional Brownian motion to CSV.
    FbmGen {
        #[arg(long)]
        hurst: f64,
        #[arg(long, default_value_t = 1024)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// auto, circulant_embedding or cholesky.
        #[arg(long, default_value = "auto")]
        method: String,
    },
    /// Run the invariant suites, or validate a dense second-level table.
    Check {
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

enum Failure {
    Invariant(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn load_config(path: &Path, g: &Global) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::load(path)?;
    if g.seed.is_some() {
        cfg.seed = g.seed;
    }
    if g.alpha.is_some() {
        cfg.alpha = g.alpha;
    }
    if g.beta.is_some() {
        cfg.beta = g.beta;
    }
    Ok(cfg)
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let out = &g.out_dir;
    std::fs::create_dir_all(out).map_err(Error::from)?;
    match &cli.command {
        Command::Lift { config } => {
            let cfg = load_config(config, g)?;
            let r = cfg.rough_path(cfg.lift_exponent())?;
            r.save(&out.join("rough_path.json"))?;
            r.path().save_csv(&out.join("path.csv"))?;
            let n = r.norms(cfg.budget);
            write_json(
                out,
                "lift_report.json",
                &json!({
                    "schema": "rrpath.lift_report/1",
                    "alpha": r.alpha(),
                    "dim": r.dim(),
                    "steps": r.grid().steps(),
                    "fingerprint": r.fingerprint(),
                    "norms": n,
                }),
            )?;
        }
        Command::Integrate { config } => {
            let cfg = load_config(config, g)?;
            let r = Arc::new(cfg.rough_path(cfg.lift_exponent())?);
            let c = match cfg.integrand.as_deref().unwrap_or("driver") {
                "driver" => ControlledIntegrand::driver_identity(r.clone())?,
                spec => ControlledVector::driver(r.clone())?.compose_integrand(&parse_field(spec, r.dim(), r.dim())?)?,
            };
            let res = integrate(&c, &r)?;
            write_table_csv(create(out, "integral.csv")?, r.grid().times(), &res.values.to_rows(), "i")?;
            let bound = integral_norm_bound(&c, &r, cfg.budget)?;
            write_json(
                out,
                "integral_report.json",
                &json!({
                    "schema": "rrpath.integral_report/1",
                    "alpha": r.alpha(),
                    "value_at_end": res.values.last().as_slice(),
                    "germ_defect_3alpha": res.germ_defect_3alpha,
                    "antisymmetry_defect": res.antisymmetry_defect,
                    "norm_bound": bound,
                }),
            )?;
        }
        Command::Solve { config } => {
            let cfg = load_config(config, g)?;
            let r = Arc::new(cfg.rough_path(cfg.solve_exponent())?);
            let spec = cfg.field.as_deref().ok_or_else(|| Error::InvalidConfig("solve needs 'field'".into()))?;
            let xi = Vector::new(cfg.xi.clone().ok_or_else(|| Error::InvalidConfig("solve needs 'xi'".into()))?)?;
            let f = parse_field(spec, xi.dim(), r.dim())?;
            let mut solver = cfg.solver;
            if cfg.alpha.is_some() {
                solver.alpha = cfg.alpha;
            }
            let rep = solve_global(&xi, &f, &r, &solver)?;
            write_table_csv(create(out, "solution.csv")?, r.grid().times(), &rep.solution.y().to_rows(), "y")?;
            write_json(out, "solve_report.json", &rep.summary(&f))?;
        }
        Command::Convergence { config, scenario } => {
            let (spec, seed) = match (config, scenario) {
                (Some(path), _) => {
                    let cfg = load_config(path, g)?;
                    let spec = cfg.scenario.ok_or_else(|| Error::InvalidConfig("config has no 'scenario'".into()))?;
                    (spec, cfg.seed())
                }
                (None, Some(name)) => {
                    let s: Scenario = serde_json::from_value(json!(name)).map_err(|_| Error::InvalidConfig(format!("unknown scenario '{name}'")))?;
                    (ScenarioSpec::new(s), g.seed.unwrap_or(0))
                }
                (None, None) => return Err(Error::InvalidConfig("convergence needs --config or --scenario".into()).into()),
            };
            let table = convergence_sweep(&spec, seed)?;
            table.write_csv(create(out, "convergence.csv")?)?;
            write_json(out, "convergence.json", &table)?;
        }
        Command::FbmGen { hurst, steps, horizon, dim, method } => {
            let method: FbmMethod =
                serde_json::from_value(json!(method)).map_err(|_| Error::InvalidConfig(format!("unknown method '{method}'")))?;
            let grid = Arc::new(Grid::uniform(*steps, *horizon)?);
            let gen = FbmGenerator::new(*hurst, *dim, grid, method)?;
            gen.sample(g.seed.unwrap_or(0))?.save_csv(&out.join("fbm.csv"))?;
            if let Some(reason) = gen.fallback_reason() {
                eprintln!("note: fell back to Cholesky ({reason})");
            }
        }
        Command::Check { table } => {
            if let Some(path) = table {
                let doc: SecondLevelTableJson = serde_json::from_str(&std::fs::read_to_string(path).map_err(Error::from)?).map_err(Error::from)?;
                let (p, field) = doc.parse()?;
                let v = validate_dense_table(&p, &field)?;
                write_json(out, "table_check.json", &v)?;
                if !v.passed {
                    let (i, j, k) = v.worst_triple.expect("a failing table has a worst triple");
                    return Err(Failure::Invariant(format!("Chen relation violated at triple ({i}, {j}, {k}), defect {:e}", v.worst_defect)));
                }
                return Ok(());
            }
            let report = run_checks(g.seed.unwrap_or(0));
            let mut text = report.to_json();
            text.push('\n');
            std::fs::write(out.join("check_report.json"), text).map_err(Error::from)?;
            for s in &report.suites {
                println!("{} {}", if s.passed { "PASS" } else { "FAIL" }, s.name);
                for n in &s.notes {
                    println!("    {n}");
                }
            }
            if !report.passed {
                let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
                return Err(Failure::Invariant(failed.join(", ")));
            }
        }
    }
    Ok(())
}
