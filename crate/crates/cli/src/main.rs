use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use planar_zeeman::coulomb2d::UnitSystem;
use planar_zeeman::perturb::{assemble_energy, coefficients, Order, Provenance};
use planar_zeeman::validation::{run_validation, ReferenceRow, ValidationOptions, REFERENCE_TABLE};
use planar_zeeman::{QuantumState, Rational, Spin};

mod output;

use output::{CoeffRow, EnergyOutput, Format};

/// Environment variable capping the worker threads used by `validate`.
const THREADS_ENV: &str = "PLANAR_ZEEMAN_THREADS";

#[derive(Parser)]
#[command(name = "planar-zeeman", version, about = "Weak-field Zeeman coefficients of the planar hydrogen-like atom")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact ε⁽⁰⁾, ε⁽²⁾, ε⁽⁴⁾ for one level or all levels up to n_max.
    Coeff(CoeffArgs),
    /// Term-by-term energy of one state in a field.
    Energy(EnergyArgs),
    /// Coefficient table for n ≤ 4 (rational and factorized forms).
    Table1(TableArgs),
    /// Exact cross-checks, numerical fits and the ground-state ε⁽⁴⁾ verdict.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Markdown,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Markdown => Format::Markdown,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "markdown")]
    format: FormatArg,
    /// Significant digits of decimal renderings.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u16).range(1..=60))]
    digits: u16,
}

#[derive(Args)]
struct CoeffArgs {
    /// Principal quantum number.
    #[arg(required_unless_present = "all_up_to", conflicts_with = "all_up_to")]
    n: Option<u32>,
    /// Angular quantum number l = |m_l|.
    #[arg(required_unless_present = "all_up_to")]
    l: Option<u32>,
    /// Every level with n ≤ N.
    #[arg(long, value_name = "N")]
    all_up_to: Option<u32>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    l: u32,
    #[arg(long, allow_hyphen_values = true)]
    ml: i32,
    /// Spin projection, +1/2 or -1/2.
    #[arg(long, allow_hyphen_values = true)]
    ms: Option<String>,
    /// Nuclear charge (rational, e.g. 2 or 3/2).
    #[arg(long = "Z", default_value = "1")]
    z: String,
    /// Field strength b = B/B₀ (exact decimal or p/q).
    #[arg(long = "B-over-B0", allow_hyphen_values = true)]
    b_over_b0: String,
    /// Highest order kept: 0, 1, 2 or 4.
    #[arg(long, default_value_t = 4)]
    order: u32,
    /// Include the spin term 2 m_s in the linear shift.
    #[arg(long)]
    spin: bool,
    /// Also show the field in tesla (B₀ ≈ 2.35×10⁵ T).
    #[arg(long)]
    tesla: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum, default_value = "markdown")]
    format: FormatArg,
}

#[derive(Args)]
struct ValidateArgs {
    /// Largest n fitted by the numerical eigensolver.
    #[arg(long, default_value_t = 3)]
    max_n: u32,
    /// Multiplier on the default field window of each fit.
    #[arg(long, default_value_t = 1.0)]
    grid_scale: f64,
    /// Write the machine-readable report to this file.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

/// Errors in the user's request; reported with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn parse_rational(name: &str, s: &str) -> Result<Rational, UsageError> {
    s.parse().map_err(|_| UsageError(format!("{name}: cannot parse {s:?} as an exact number")))
}

fn cmd_coeff(args: &CoeffArgs) -> Result<String, UsageError> {
    let levels: Vec<(u32, u32)> = match (args.all_up_to, args.n, args.l) {
        (Some(0), _, _) => return Err(UsageError("--all-up-to needs n_max ≥ 1".into())),
        (Some(max), _, _) => (1..=max).flat_map(|n| (0..n).map(move |l| (n, l))).collect(),
        (None, Some(n), Some(l)) => vec![(n, l)],
        _ => return Err(UsageError("give n and l, or --all-up-to N".into())),
    };
    let mut rows = Vec::with_capacity(levels.len());
    for (n, l) in levels {
        let c = coefficients(n, l, Provenance::ClosedForm)?;
        rows.push(CoeffRow::new(&c, args.out.digits as usize));
    }
    Ok(output::render_coeffs(&rows, args.out.format.into())?)
}

fn cmd_energy(args: &EnergyArgs) -> Result<String, UsageError> {
    let mut state = QuantumState::new(args.n, args.l, args.ml)?;
    if let Some(ms) = &args.ms {
        let spin = Spin::parse(ms).ok_or_else(|| UsageError(format!("--ms must be +1/2 or -1/2 (got {ms:?})")))?;
        state = state.with_spin(spin);
    }
    let z = parse_rational("--Z", &args.z)?;
    let b = parse_rational("--B-over-B0", &args.b_over_b0)?;
    let order = Order::from_power(args.order)
        .ok_or_else(|| UsageError(format!("--order must be 0, 1, 2 or 4 (got {})", args.order)))?;
    let units = UnitSystem::new(z.clone(), b.clone())?;
    let result = assemble_energy(&state, &z, &b, order, args.spin)?;
    let tesla = args.tesla.then(|| units.field_tesla());
    let out = EnergyOutput::new(&result, tesla, args.out.digits as usize);
    if result.regime_warning {
        eprintln!("warning: perturbative regime exceeded (heuristic |E4| > |E2|)");
    }
    Ok(output::render_energy(&out, args.out.format.into())?)
}

fn cmd_table1(args: &TableArgs) -> Result<String, UsageError> {
    let mut rows = Vec::new();
    for r in REFERENCE_TABLE {
        let c = coefficients(r.n, r.l, Provenance::ClosedForm)?;
        rows.push(CoeffRow::new(&c, 12));
    }
    Ok(output::render_table1(&rows, args.format.into())?)
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError(format!("{THREADS_ENV} must be a positive integer (got {v:?})")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(String, bool), UsageError> {
    if !(args.grid_scale.is_finite() && args.grid_scale > 0.0) {
        return Err(UsageError(format!("--grid-scale must be positive (got {})", args.grid_scale)));
    }
    configure_threads()?;
    let opts = ValidationOptions { oracle_max_n: args.max_n, grid_scale: args.grid_scale, ..Default::default() };
    validate_against(args, &opts, &REFERENCE_TABLE)
}

fn validate_against(
    args: &ValidateArgs,
    opts: &ValidationOptions,
    reference: &[ReferenceRow],
) -> Result<(String, bool), UsageError> {
    let report = run_validation(opts, reference);
    if let Some(path) = &args.json {
        let json = serde_json::to_string_pretty(&report)?;
        std::fs::write(path, json + "\n").map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    }
    Ok((output::render_validation(&report), report.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Coeff(a) => cmd_coeff(a).map(|s| (s, true)),
        Command::Energy(a) => cmd_energy(a).map(|s| (s, true)),
        Command::Table1(a) => cmd_table1(a).map(|s| (s, true)),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok((text, ok)) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
