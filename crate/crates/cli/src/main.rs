//! `kova`: command-line front end of the analysis pipeline.
//!
//! Exit codes: 0 when the analysis completes (negative verdicts included),
//! 1 for input errors, 2 for internal consistency failures.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kova::charts::Branch;
use kova::report::{self, Options, Report};
use kova::system::{builtin, parse_system, SProbeConfig};
use kova::{KovaError, QSystem};

#[derive(Parser, Debug)]
#[command(name = "kova", version, about = "Exact analysis of quasi-homogeneous polynomial ODE systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the weight assumptions and condition (S).
    Check(Common),
    /// Find the balances (leading coefficients of pole solutions).
    Balances(Common),
    /// Kovalevskaya matrices and exponents.
    Exponents(Common),
    /// Laurent series solutions with resonance analysis.
    Series(Common),
    /// Classical and extended Painlevé-test verdicts.
    PainleveTest(Common),
    /// Weighted projective charts and fixed points at infinity.
    Charts(Common),
    /// Linear preparation, unstable manifold and normal form.
    NormalForm(Common),
    /// Weighted blow-up, gluing map and induced cyclic action.
    Blowup(Common),
    /// Chart atlas: the original chart plus one blown-up chart per balance.
    Atlas(Common),
    /// A member of the first Painlevé hierarchy with exponent cross-checks.
    Hierarchy(HierarchyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BranchArg {
    /// `−c^{1/p}` for even `p`, `c^{1/p}` for odd `p`.
    Standard,
    /// Always the principal root `c^{1/p}`.
    Principal,
}

#[derive(Args, Debug)]
struct Source {
    /// System document to analyse.
    #[arg(long, conflicts_with = "builtin")]
    input: Option<PathBuf>,
    /// Builtin system: painleve1, painleve2, painleve4, p1-hierarchy:<m>.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Args, Debug)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct Common {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    output: Output,
    /// Series / normal-form truncation order.
    #[arg(long)]
    order: Option<usize>,
    /// Balance to analyse (1-based; default: all).
    #[arg(long)]
    balance: Option<usize>,
    /// Chart index j (1-based; default: first chart with a rational root).
    #[arg(long)]
    chart: Option<usize>,
    /// Branch of c_j^{1/p_j} at fixed points at infinity.
    #[arg(long, value_enum, default_value = "standard")]
    branch: BranchArg,
    /// Residual under which a probe point counts as a root in the (S) check.
    #[arg(long, default_value_t = SProbeConfig::default().residual_tol)]
    tol_residual: f64,
    /// Norm above which a probe root counts as nonzero in the (S) check.
    #[arg(long, default_value_t = SProbeConfig::default().nonzero_tol)]
    tol_nonzero: f64,
    /// Relative tolerance of the numeric spectral bridge.
    #[arg(long, default_value_t = kova::charts::BRIDGE_TOL)]
    tol_bridge: f64,
}

#[derive(Args, Debug)]
struct HierarchyArgs {
    /// Hierarchy index m.
    #[arg(long, short)]
    m: usize,
    #[command(flatten)]
    output: Output,
}

fn load(source: &Source) -> Result<QSystem, KovaError> {
    match (&source.input, &source.builtin) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                KovaError::Precondition(format!("cannot read {}: {e}", path.display()))
            })?;
            parse_system(&text)
        }
        (None, Some(name)) => builtin(name),
        _ => Err(KovaError::Precondition(
            "exactly one of --input FILE or --builtin NAME is required".into(),
        )),
    }
}

fn options(c: &Common) -> Options {
    Options {
        order: c.order,
        balance: c.balance,
        chart: c.chart,
        branch: match c.branch {
            BranchArg::Standard => Branch::Standard,
            BranchArg::Principal => Branch::Principal,
        },
        seed: kova::numeric::default_seed(),
        probe: SProbeConfig {
            residual_tol: c.tol_residual,
            nonzero_tol: c.tol_nonzero,
            ..SProbeConfig::default()
        },
        bridge_tol: c.tol_bridge,
    }
}

fn run(cli: Cli) -> Result<(Report, Format), KovaError> {
    let with_system = |c: &Common, f: fn(&QSystem, &Options) -> kova::Result<Report>| {
        let sys = load(&c.source)?;
        Ok((f(&sys, &options(c))?, c.output.format))
    };
    match cli.command {
        Command::Check(c) => with_system(&c, report::check),
        Command::Balances(c) => with_system(&c, report::balances),
        Command::Exponents(c) => with_system(&c, report::exponents),
        Command::Series(c) => with_system(&c, report::series),
        Command::PainleveTest(c) => with_system(&c, report::painleve),
        Command::Charts(c) => with_system(&c, report::charts),
        Command::NormalForm(c) => with_system(&c, report::normal_form),
        Command::Blowup(c) => with_system(&c, report::blowup),
        Command::Atlas(c) => with_system(&c, report::atlas),
        Command::Hierarchy(h) => Ok((report::hierarchy_report(h.m)?, h.output.format)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((rep, format)) => {
            let body = match format {
                Format::Json => rep.to_json() + "\n",
                Format::Text => rep.to_text(),
            };
            // A closed pipe (e.g. `| head`) is not an analysis failure.
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            if rep.consistent {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: an internal consistency check failed");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
