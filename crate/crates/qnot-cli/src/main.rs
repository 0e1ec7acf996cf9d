//! `qnot` — bound tables, attainability verification, randomized audits,
//! and figure data for conserved-charge NOT-gate realizations.
//!
//! Exit status: 0 all checks pass, 1 a bound or residual check failed,
//! 2 usage error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qnot_cli::commands::{
    cmd_attain, cmd_audit, cmd_bounds, cmd_figure2, cmd_purify_demo, CommandOutcome,
};
use qnot_cli::report::{OutputFormat, RunConfig};

#[derive(Debug, Clone, Copy)]
struct NRange {
    start: usize,
    end: usize,
}

fn parse_range(s: &str) -> Result<NRange, String> {
    let parse_one = |t: &str| -> Result<usize, String> {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("invalid ancilla count {t:?}: {e}"))
    };
    if let Some((a, b)) = s.split_once("..") {
        let start = parse_one(a)?;
        let end = parse_one(b)?;
        if start > end {
            return Err(format!("empty range {start}..{end}"));
        }
        Ok(NRange { start, end })
    } else {
        let n = parse_one(s)?;
        Ok(NRange { start: n, end: n })
    }
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    p: usize,
    theta: usize,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let (p, theta) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected PxT, got {s:?}"))?;
    let parse_one = |t: &str| -> Result<usize, String> {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("invalid grid size {t:?}: {e}"))
    };
    Ok(Grid {
        p: parse_one(p)?,
        theta: parse_one(theta)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Args, Clone)]
struct CommonArgs {
    /// Ancilla sizes, inclusive: `a..b` or a single `n`
    #[arg(long = "n", value_parser = parse_range)]
    n: Option<NRange>,
    /// Master seed for every sampled object
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Samples per ancilla size (sampling commands)
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Worst-case-input search grid, `p_points x theta_points`
    #[arg(long, value_parser = parse_grid, default_value = "64x128")]
    grid: Grid,
    /// Comparison tolerance for verification commands
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Report format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(
    name = "qnot",
    version,
    about = "Error lower bounds and audits for NOT-gate realizations under a total-Z conservation law"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of error lower bounds per ancilla size (default n = 2..32)
    Bounds(CommonArgs),
    /// Check that the optimal construction attains its predicted bound
    /// (default n = 2..20)
    Attain(CommonArgs),
    /// Randomized audit of sampled conservative implementations against
    /// the bounds (default n = 2..4)
    Audit {
        #[command(flatten)]
        common: CommonArgs,
        /// Replace every sampled unitary by a non-conservative control;
        /// the audit must flag it (testing hook)
        #[arg(long, hide = true)]
        inject_nonconservative: bool,
    },
    /// Odd-subscript amplitude profile of the optimal ancilla for one even
    /// ancilla size (default n = 100)
    Figure2(CommonArgs),
    /// Purify sampled mixed-ancilla implementations and report channel
    /// residuals (default n = 1..3, gate 1e-10)
    PurifyDemo(CommonArgs),
}

fn resolve_config(
    command: &str,
    args: &CommonArgs,
    default_range: (usize, usize),
) -> Result<RunConfig, String> {
    let range = args.n.unwrap_or(NRange {
        start: default_range.0,
        end: default_range.1,
    });
    if args.grid.p < 8 || args.grid.theta < 8 {
        return Err("grid must sample at least 8 points per axis".into());
    }
    if args.samples < 1 {
        return Err("samples must be at least 1".into());
    }
    Ok(RunConfig {
        command: command.to_string(),
        n_start: range.start,
        n_end: range.end,
        seed: args.seed,
        samples: args.samples,
        grid_p: args.grid.p,
        grid_theta: args.grid.theta,
        tol: args.tol,
        format: args.format.into(),
        out_path: args
            .out
            .as_ref()
            .map(|p| p.to_string_lossy().into_owned()),
    })
}

fn emit(outcome: &CommandOutcome, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, outcome.body.as_bytes())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(outcome.body.as_bytes())
                .map_err(|e| format!("cannot write to stdout: {e}"))?;
        }
    }
    eprintln!("{}", outcome.summary_line);
    Ok(())
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap maps help/version to success and usage errors to 2
            e.exit();
        }
    };
    let (result, out_path) = match &cli.command {
        Command::Bounds(args) => (
            resolve_config("bounds", args, (2, 32)).and_then(|cfg| cmd_bounds(&cfg)),
            args.out.clone(),
        ),
        Command::Attain(args) => (
            resolve_config("attain", args, (2, 20)).and_then(|cfg| cmd_attain(&cfg)),
            args.out.clone(),
        ),
        Command::Audit {
            common,
            inject_nonconservative,
        } => (
            resolve_config("audit", common, (2, 4))
                .and_then(|cfg| cmd_audit(&cfg, *inject_nonconservative)),
            common.out.clone(),
        ),
        Command::Figure2(args) => (
            resolve_config("figure2", args, (100, 100)).and_then(|cfg| cmd_figure2(&cfg)),
            args.out.clone(),
        ),
        Command::PurifyDemo(args) => (
            resolve_config("purify-demo", args, (1, 3)).and_then(|cfg| cmd_purify_demo(&cfg)),
            args.out.clone(),
        ),
    };
    match result {
        Ok(outcome) => {
            if let Err(msg) = emit(&outcome, &out_path) {
                eprintln!("error: {msg}");
                return 2;
            }
            if outcome.failures > 0 {
                1
            } else {
                0
            }
        }
        Err(msg) => {
            eprintln!("usage error: {msg}");
            2
        }
    }
}

fn main() {
    std::process::exit(run());
}
