//! One executable, five subcommands:
//!
//! - `kernel`      — tabulate the closed-form H kernel against quadrature,
//! - `verify`      — run the quantitative-lemma verification suite,
//! - `norms`       — Lorentz norm of a scalar field CSV,
//! - `reconstruct` — velocity from vorticity at chosen targets,
//! - `simulate`    — particle transport run driven by a JSON config.
//!
//! Exit codes are a stable contract: 0 on success, 1 when a verification
//! check (or a simulation's own health check) fails, 2 on usage, schema, or
//! I/O errors. All file outputs are written atomically (temp + rename), and
//! every command is deterministic given its flags and seed.

mod simulate;
mod table;
mod verify;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

/// Environment variable consulted for the worker thread count when
/// `--threads` is not given.
const THREADS_ENV: &str = "AXISYM_EULER_THREADS";

#[derive(Parser)]
#[command(
    name = "axisym-euler",
    version,
    about = "Axisymmetric swirl-free Euler: kernels, norms, reconstruction, transport"
)]
struct Cli {
    /// Worker threads for summation-heavy commands (default: all cores;
    /// equivalently set AXISYM_EULER_THREADS).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate s, H_closed, H_quad, upper_bound over an s-grid
    Kernel(table::KernelArgs),
    /// Run the verification suite and report pass/fail per lemma
    Verify(verify::VerifyArgs),
    /// Lorentz norm L^{p,q} of a scalar-field CSV under r^(d-2) dr dz
    Norms(table::NormsArgs),
    /// Velocity field induced by a vorticity CSV at chosen targets
    Reconstruct(table::ReconstructArgs),
    /// Vorticity transport run from a JSON config
    Simulate(simulate::SimulateArgs),
}

/// What a successfully-parsed command reports back to `main`.
pub enum Outcome {
    /// Everything the command promised holds.
    Success,
    /// The command ran to completion but a check it performs failed
    /// (a verification lemma, or a simulation that diverged).
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests print to stdout and succeed; real
            // usage errors go to stderr with the documented exit code 2.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let threads = cli.threads.or_else(|| {
        std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if n > 0 {
            // Ignore the error: the global pool can only be built once, and
            // a pre-built default pool is an acceptable fallback.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let result = match cli.command {
        Command::Kernel(args) => table::cmd_kernel(&args),
        Command::Verify(args) => verify::cmd_verify(&args),
        Command::Norms(args) => table::cmd_norms(&args),
        Command::Reconstruct(args) => table::cmd_reconstruct(&args),
        Command::Simulate(args) => simulate::cmd_simulate(&args),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
