mod commands;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::*;
use presets::PresetArgs;

#[derive(Parser, Debug)]
#[command(name = "autoexp", version, about = "Automatic sequences against rational exponential phases")]
struct Cli {
    /// Emit JSON instead of text/CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized trials.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weighted sum of a_n e_q(f(n)) over y < n <= y + x, n = a mod s.
    Sum(SumArgs),
    /// Correlation U(x, y; h; modulus, a) of g(n) = e_q(f(n)).
    Correlate(CorrelateArgs),
    /// Complete sums against sqrt(q (q, f')).
    VerifyWeil(WeilArgs),
    /// gcd of the shifted derivative difference over a prime range.
    VerifyGcd(GcdArgs),
    /// Incomplete sums over q^theta-length intervals.
    ScanPv(PvArgs),
    /// Randomized matrix van der Corput trials.
    VdcCheck(VdcArgs),
    /// Carry-property violation counts.
    CarryScan(CarryArgs),
    /// Synchronization failure counts.
    SyncScan(SyncArgs),
    /// Exact stage-by-stage decomposition of a transducer-weighted sum.
    WeylDecompose(WeylArgs),
    /// Solutions of f_1(n_1) + ... + f_r(n_r) = m mod q with n_j in an automatic set.
    CountCongruence(CongruenceArgs),
    /// Run (or show) a named experiment configuration.
    Preset(PresetArgs),
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
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    let ctx = Context { seed: cli.seed, budget: autoexp::Budget::from_env() };
    let output = match cli.command {
        Command::Sum(a) => sum(&a),
        Command::Correlate(a) => correlate(&a),
        Command::VerifyWeil(a) => verify_weil(&a),
        Command::VerifyGcd(a) => verify_gcd(&a),
        Command::ScanPv(a) => scan_pv(&a),
        Command::VdcCheck(a) => vdc_check(&a, &ctx),
        Command::CarryScan(a) => carry_scan(&a, &ctx),
        Command::SyncScan(a) => sync_scan(&a),
        Command::WeylDecompose(a) => weyl_decompose(&a),
        Command::CountCongruence(a) => count_congruence(&a),
        Command::Preset(a) => presets::run(&a, &ctx),
    }?;
    output.emit(cli.json, cli.out.as_deref())
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(())
}
