use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use imds::DEFAULT_NODE_LIMIT;
use imds_cli::*;

#[derive(Parser)]
#[command(name = "imds", version, about = "Verify IMDS systems and compile robot routes into them")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check deadlock freedom and, optionally, termination of some agents.
    Check {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        limit: usize,
        /// Comma-separated agent names that must all terminate.
        #[arg(long, value_delimiter = ',')]
        terminate: Option<Vec<String>>,
        /// Write the full report here and print only a summary.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Compile route plans on a topology into a system specification.
    Compile {
        topology: PathBuf,
        #[arg(required = true)]
        plans: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate route plans.
    #[command(group(ArgGroup::new("mode").required(true).args(["all", "similar", "fleet", "many"])))]
    Generate {
        topology: PathBuf,
        #[arg(long)]
        start: Option<String>,
        /// Every simple path from the start to a side chamber.
        #[arg(long)]
        all: bool,
        /// Rotate this plan to start at `--to` (or `--start`).
        #[arg(long, value_name = "PLAN")]
        similar: Option<PathBuf>,
        #[arg(long, requires = "similar")]
        to: Option<String>,
        /// N copies of a plan under numbered robot names.
        #[arg(long, num_args = 2, value_names = ["PLAN", "N"])]
        fleet: Option<Vec<String>>,
        /// One branching plan over every route to these chambers.
        #[arg(long, value_delimiter = ',', value_name = "TARGETS")]
        many: Option<Vec<String>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw the witnesses of a JSON report as sequence diagrams.
    Render {
        witnesses: PathBuf,
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        limit: usize,
    },
}

fn config(cmd: Cmd) -> Result<RunConfig, String> {
    Ok(match cmd {
        Cmd::Check { spec, limit, terminate, report, format } => RunConfig::Check(CheckConfig {
            spec,
            limit,
            terminate,
            report,
            format: match format {
                Format::Text => ReportFormat::Text,
                Format::Json => ReportFormat::Json,
            },
        }),
        Cmd::Compile { topology, plans, output } => RunConfig::Compile(CompileConfig { topology, plans, output }),
        Cmd::Generate { topology, start, all, similar, to, fleet, many, output } => {
            let mode = if all {
                GenerateMode::All
            } else if let Some(plan) = similar {
                GenerateMode::Similar { plan, to }
            } else if let Some(targets) = many {
                GenerateMode::Many { targets }
            } else {
                let f = fleet.unwrap_or_default();
                let count = f[1].parse().map_err(|_| format!("invalid fleet size `{}`", f[1]))?;
                GenerateMode::Fleet { plan: PathBuf::from(&f[0]), count }
            };
            RunConfig::Generate(GenerateConfig { topology, start, mode, output })
        }
        Cmd::Render { witnesses, spec, limit } => RunConfig::Render(RenderConfig { witnesses, spec, limit }),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match config(cli.command) {
        Ok(cfg) => run(&cfg),
        Err(e) => Outcome { status: EXIT_ERROR, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.status as u8)
}
