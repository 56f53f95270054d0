use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spot_core::geometry::Point2;
use spot_core::pipeline::{self, Config};
use spot_core::Error;

/// Blind-spot trajectory planning and next-camera prediction over a
/// simulated camera network.
#[derive(Parser)]
#[command(name = "spot", version)]
struct Cli {
    /// JSON config file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for per-scenario stages.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Config override, `dotted.key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the town, cameras and scenario files.
    Sim,
    /// Render map documents and their retrieval index.
    Mapdoc,
    /// Recover world tracks and exit states from observations.
    Track,
    /// Plan through the blind spot after each scored exit.
    Plan,
    /// Score plans against ground truth.
    Eval,
    /// Ask a question about the map.
    Query {
        question: String,
        /// Query position as `x,y` in metres.
        #[arg(long, value_parser = parse_pos)]
        pos: Option<Point2>,
    },
    /// sim, mapdoc, track, plan and eval in order.
    Pipeline,
}

fn parse_pos(s: &str) -> Result<Point2, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let f = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok(Point2::new(f(x)?, f(y)?))
}

fn load_config(cli: &Cli) -> Result<Config, Error> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    Config::load(&text, &cli.overrides)
}

fn run(cli: &Cli, cfg: &Config) -> Result<(), Error> {
    match &cli.cmd {
        Cmd::Sim => pipeline::cmd_sim(cfg, cli.jobs),
        Cmd::Mapdoc => pipeline::cmd_mapdoc(cfg),
        Cmd::Track => pipeline::cmd_track(cfg, cli.jobs),
        Cmd::Plan => pipeline::cmd_plan(cfg, cli.jobs),
        Cmd::Eval => pipeline::cmd_eval(cfg),
        Cmd::Query { question, pos } => {
            print!("{}", pipeline::cmd_query(cfg, question, *pos)?);
            Ok(())
        }
        Cmd::Pipeline => pipeline::run_pipeline(cfg, cli.jobs),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input() { 2 } else { 3 })
        }
    }
}
