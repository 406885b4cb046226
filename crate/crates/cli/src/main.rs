use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use netpass::{CliError, ExitStatus, GraphSource, Outcome, RunOptions};

/// Passivity analysis and simulation of networked agents over digraphs.
#[derive(Debug, Parser)]
#[command(name = "netpass", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Graph report, spectrum of sym(L_o) and Proposition 1–3 verdicts.
    AnalyzeGraph {
        #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
        scenario: Option<PathBuf>,
        /// A bare `{"n_vertices": .., "edges": [[s, t], ..]}` document.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Run a scenario; writes CSV, summary JSON and optionally SVG.
    Simulate(RunArgs),
    /// Run a scenario in decomposed mode and audit the dissipation inequalities.
    Audit(RunArgs),
    /// Randomized property suites over seeded digraphs.
    PropSuite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Recorded in the outputs.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    svg: bool,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            out_dir: self.out_dir.clone(),
            seed: self.seed,
            dt: self.dt,
            t_end: self.t_end,
            svg: self.svg,
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::AnalyzeGraph { scenario, graph } => match (scenario, graph) {
            (Some(p), _) => netpass::analyze_graph(GraphSource::Scenario(p)),
            (None, Some(p)) => netpass::analyze_graph(GraphSource::GraphFile(p)),
            (None, None) => Err(CliError::Input("pass --scenario or --graph".into())),
        },
        Command::Simulate(args) => netpass::simulate(&args.scenario, &args.options()),
        Command::Audit(args) => netpass::audit(&args.scenario, &args.options()),
        Command::PropSuite {
            seed,
            count,
            n_max,
            out_dir,
        } => netpass::prop_suite(*seed, *count, *n_max, out_dir.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome.report).expect("report serializes"));
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("netpass: {e}");
            ExitCode::from(ExitStatus::InputError.code() as u8)
        }
    }
}
