use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use barysimplex_cli::commands::{self, CommandOutcome};
use barysimplex_cli::input::{self, Options, Problem, ProblemInput};
use barysimplex_cli::tables;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "barysimplex",
    version,
    about = "Exact certificates for barycentric coupling matrices on the probability simplex"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form optimum, inverse, exact dual, eigenvalues, uniqueness,
    /// and a KKT certificate
    Solve(CommonArgs),
    /// Best relabeling of the vertices: assignment optimum, reassembled
    /// coupling, and vertex lists for plotting
    Perm(CommonArgs),
    /// Independent exact-simplex cross-check of the closed forms
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest dimension to hand to the exact simplex
        #[arg(long)]
        oracle_cap: Option<usize>,
    },
    /// Coherent conditional-CDF synthesis with coherence and spacing reports
    Synth {
        #[command(flatten)]
        common: CommonArgs,
        /// Transformation family: uniform or beta
        #[arg(long)]
        family: Option<String>,
        /// Base distribution: normal, or empirical:<sample-file>
        #[arg(long)]
        base: Option<String>,
        /// Points in the z grid (coherence checks and the z table)
        #[arg(long)]
        z_grid: Option<usize>,
        /// Points in the x grid (synthesized table)
        #[arg(long)]
        x_grid: Option<usize>,
        /// Coherence residual tolerance
        #[arg(long)]
        tolerance: Option<f64>,
        /// Write the z table as CSV to this path
        #[arg(long)]
        z_table: Option<PathBuf>,
        /// Write the x table as CSV to this path
        #[arg(long)]
        x_table: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// JSON problem document: {"p": [...], "q": [...], "options": {...}}
    #[arg(long)]
    input: Option<PathBuf>,
    /// Where to write the report (stdout if omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report encoding
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Barycenter weights as comma-separated fractions (overrides the file)
    #[arg(long)]
    p: Option<String>,
    /// Vertex weights as comma-separated fractions (overrides the file)
    #[arg(long)]
    q: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        // The report was produced, but a certificate in it failed.
        Ok(false) => ExitCode::from(2),
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve(common) => {
            let problem = load(&common, Options::default())?;
            finish(&common, commands::cmd_solve(&problem)?)
        }
        Command::Perm(common) => {
            let problem = load(&common, Options::default())?;
            finish(&common, commands::cmd_perm(&problem)?)
        }
        Command::Oracle { common, oracle_cap } => {
            let flag_options = Options {
                oracle_cap,
                ..Options::default()
            };
            let problem = load(&common, flag_options)?;
            finish(&common, commands::cmd_oracle(&problem)?)
        }
        Command::Synth {
            common,
            family,
            base,
            z_grid,
            x_grid,
            tolerance,
            z_table,
            x_table,
        } => {
            let flag_options = Options {
                family,
                base,
                z_grid,
                x_grid,
                tolerance,
                z_table,
                x_table,
                ..Options::default()
            };
            let mut problem = load(&common, flag_options)?;
            route_synth_tables(&common, &mut problem)?;
            finish(&common, commands::cmd_synth(&problem)?)
        }
    }
}

fn load(common: &CommonArgs, flag_options: Options) -> Result<Problem> {
    let document = match &common.input {
        Some(path) => Some(ProblemInput::from_path(path)?),
        None => None,
    };
    input::resolve(
        document,
        common.p.as_deref(),
        common.q.as_deref(),
        flag_options,
    )
}

/// Under `--format csv` the grid tables cannot stay embedded in the report,
/// so give them file destinations, deriving defaults from `--output`.
fn route_synth_tables(common: &CommonArgs, problem: &mut Problem) -> Result<()> {
    if common.format != Format::Csv {
        return Ok(());
    }
    match &common.output {
        Some(out) => {
            let options = &mut problem.options;
            options
                .z_table
                .get_or_insert_with(|| out.with_extension("z.csv"));
            options
                .x_table
                .get_or_insert_with(|| out.with_extension("x.csv"));
        }
        None => {
            if problem.options.z_table.is_none() || problem.options.x_table.is_none() {
                bail!(
                    "synth --format csv needs --output (to derive table paths) or explicit \
                     --z-table and --x-table"
                );
            }
        }
    }
    Ok(())
}

fn finish(common: &CommonArgs, outcome: CommandOutcome) -> Result<bool> {
    let rendered = match common.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&outcome.report)?;
            text.push('\n');
            text
        }
        Format::Csv => tables::flat_report_csv(&outcome.report)?,
    };
    tables::emit(common.output.as_deref(), &rendered)?;
    for failure in &outcome.failures {
        eprintln!("certification failure: {failure}");
    }
    Ok(outcome.certified)
}
