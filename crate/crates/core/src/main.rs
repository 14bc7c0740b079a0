use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pauli_core::algebra::RepKind;
use pauli_core::cli::{
    run_analyze, run_simulate, run_trajectories, run_verify, AnalyzeOptions, CliError, Tamper, VerifyOptions,
    THREADS_ENV,
};

#[derive(Parser)]
#[command(name = "pauli", version, about = "Pauli spinor dynamics, spin currents and the Lévy-Leblond algebra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepArg {
    Original,
    Convenient,
}

#[derive(Clone, Copy, ValueEnum)]
enum TamperArg {
    #[value(name = "B5")]
    B5,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Dirac-algebra and linearization identities in exact arithmetic.
    Verify {
        #[arg(long, value_enum)]
        rep: Option<RepArg>,
        /// Inject a fault to exercise the failure path.
        #[arg(long, value_enum)]
        tamper: Option<TamperArg>,
    },
    /// Propagate the configured initial state and write series and dumps.
    Simulate { config: PathBuf },
    /// Recompute current diagnostics for every snapshot in a dump directory.
    Analyze {
        dir: PathBuf,
        /// Drop the spin current from the continuity check.
        #[arg(long)]
        omit_spin: bool,
        /// Also write the total current of each snapshot as a vector dump.
        #[arg(long)]
        dump_currents: bool,
    },
    /// Integrate Bohmian trajectories through the snapshots in a dump directory.
    Trajectories { dir: PathBuf, config: PathBuf },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("{THREADS_ENV}='{raw}' is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("{THREADS_ENV}: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Verify { rep, tamper } => {
            let opts = VerifyOptions {
                rep: rep.map(|r| match r {
                    RepArg::Original => RepKind::Original,
                    RepArg::Convenient => RepKind::Convenient,
                }),
                tamper: tamper.map(|TamperArg::B5| Tamper::B5),
            };
            run_verify(&opts, &mut out).map(|_| ())
        }
        Command::Simulate { config } => run_simulate(&config, &mut out).map(|_| ()),
        Command::Analyze {
            dir,
            omit_spin,
            dump_currents,
        } => run_analyze(
            &dir,
            &AnalyzeOptions {
                omit_spin,
                dump_currents,
            },
            &mut out,
        )
        .map(|_| ()),
        Command::Trajectories { dir, config } => run_trajectories(&dir, &config, &mut out).map(|_| ()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
