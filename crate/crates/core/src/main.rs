use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use floodopt::error::FloodError;
use floodopt::ga::run_ga;
use floodopt::model::{CityDesign, TraitId};
use floodopt::oracle::exact_optimum;
use floodopt::report::{
    compare_runs, floodplain_report, parse_config, render_trait_grids, sig6, CompareOptions,
    RenderOptions, RunConfig,
};
use floodopt::run::RunReport;
use floodopt::sa::run_sa;

#[derive(Parser)]
#[command(
    name = "floodopt",
    version,
    about = "Flood vulnerability design search on a gridded city"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact optimum by per-cell enumeration.
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Genetic algorithm run.
    Ga {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated annealing run.
    Sa {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// GA and SA over several seeds, measured against the exact optimum.
    Compare {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Cap SA at the GA evaluation budget.
        #[arg(long)]
        equalize_budgets: bool,
    },
    /// Per-trait grids of a design, oracle result or run report.
    Render {
        #[arg(long)]
        design: PathBuf,
        /// Only this trait (name or letter A-G).
        #[arg(long = "trait")]
        trait_id: Option<TraitId>,
        #[arg(long)]
        no_legend: bool,
    },
    /// Trait-value counts by site class, flagging value 3 on the floodplain.
    Floodplain {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Print the fully resolved configuration.
    ShowConfig {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Input problems exit with 2, failures while running or writing with 3.
enum CliError {
    Input(FloodError),
    Runtime(FloodError),
}

type CliResult<T> = std::result::Result<T, CliError>;

fn input<T>(r: floodopt::Result<T>) -> CliResult<T> {
    r.map_err(CliError::Input)
}

fn runtime<T, E: Into<FloodError>>(r: std::result::Result<T, E>) -> CliResult<T> {
    r.map_err(|e| CliError::Runtime(e.into()))
}

fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Input(FloodError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    })?;
    parse_config(&text).map_err(|e| match e {
        FloodError::Config {
            path: field,
            message,
        } => CliError::Input(FloodError::Config {
            path: format!("{}: {field}", path.display()),
            message,
        }),
        other => CliError::Input(other),
    })
}

/// Accepts a bare design file, or any JSON document with a `best_design` or
/// `design` field.
fn load_design(path: &Path) -> CliResult<CityDesign> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(e.into()))?;
    let mut doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(e.into()))?;
    let key = ["best_design", "design"]
        .into_iter()
        .find(|k| doc.get(k).is_some());
    let value = match key {
        Some(k) => doc[k].take(),
        None => doc,
    };
    serde_json::from_value(value).map_err(|e| CliError::Input(e.into()))
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}"))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        runtime(fs::create_dir_all(dir))?;
    }
    runtime(fs::write(path, contents))
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = runtime(serde_json::to_string_pretty(value))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct Meta {
    wall_time_seconds: f64,
}

fn write_meta(path: &Path, wall: Duration) -> CliResult<()> {
    write(
        path,
        &to_json(&Meta {
            wall_time_seconds: wall.as_secs_f64(),
        })?,
    )
}

fn emit_run(report: &RunReport, config: &RunConfig, out: Option<&Path>) -> CliResult<()> {
    let json = to_json(report)?;
    let Some(out) = out else {
        print!("{json}");
        return Ok(());
    };
    write(out, &json)?;
    write_meta(&sibling(out, ".meta.json"), report.wall_time)?;
    if config.output.trace_csv {
        write(&sibling(out, ".trace.csv"), &report.trace_csv())?;
    }
    if config.output.render_grids {
        write(
            &sibling(out, ".grids.txt"),
            &render_trait_grids(&report.best_design, &RenderOptions::default()),
        )?;
    }
    println!(
        "{} seed {}: best objective {} after {} evaluations",
        report.engine.name(),
        report.seed,
        sig6(report.best_objective),
        report.evaluations
    );
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Oracle { config, out } => {
            let cfg = load_config(config.as_deref())?;
            let started = Instant::now();
            let result = runtime(exact_optimum(&cfg.grid, &cfg.objective))?;
            let json = to_json(&result)?;
            match out {
                None => print!("{json}"),
                Some(out) => {
                    write(&out, &json)?;
                    write_meta(&sibling(&out, ".meta.json"), started.elapsed())?;
                    if cfg.output.render_grids {
                        write(
                            &sibling(&out, ".grids.txt"),
                            &render_trait_grids(&result.design, &RenderOptions::default()),
                        )?;
                    }
                    println!("exact optimum {}", sig6(result.total));
                }
            }
        }
        Command::Ga { config, seed, out } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(s) = seed {
                cfg.ga.seed = s;
            }
            let report = runtime(run_ga(&cfg.grid, &cfg.objective, &cfg.ga))?;
            emit_run(&report, &cfg, out.as_deref())?;
        }
        Command::Sa { config, seed, out } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(s) = seed {
                cfg.sa.seed = s;
            }
            let report = runtime(run_sa(&cfg.grid, &cfg.objective, &cfg.sa))?;
            emit_run(&report, &cfg, out.as_deref())?;
        }
        Command::Compare {
            config,
            seeds,
            out,
            equalize_budgets,
        } => {
            let cfg = load_config(config.as_deref())?;
            let started = Instant::now();
            let cmp = runtime(compare_runs(
                &cfg,
                &seeds,
                CompareOptions { equalize_budgets },
            ))?;
            write(&out.join("summary.json"), &to_json(&cmp)?)?;
            write(&out.join("runs.csv"), &cmp.runs_csv())?;
            let text = cmp.render();
            write(&out.join("report.txt"), &text)?;
            write_meta(&out.join("meta.json"), started.elapsed())?;
            print!("{text}");
        }
        Command::Render {
            design,
            trait_id,
            no_legend,
        } => {
            let d = load_design(&design)?;
            let traits = trait_id.map_or_else(|| TraitId::ALL.to_vec(), |t| vec![t]);
            print!(
                "{}",
                render_trait_grids(
                    &d,
                    &RenderOptions {
                        traits,
                        legend: !no_legend
                    }
                )
            );
        }
        Command::Floodplain {
            design,
            config,
            json,
        } => {
            let d = load_design(&design)?;
            let cfg = load_config(config.as_deref())?;
            let rep = input(floodplain_report(&d, &cfg.grid))?;
            if json {
                print!("{}", to_json(&rep)?);
            } else {
                print!("{}", rep.render());
            }
        }
        Command::ShowConfig { config } => {
            let cfg = load_config(config.as_deref())?;
            println!("{}", cfg.to_json());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
