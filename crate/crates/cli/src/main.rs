mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};
use output::Failure;

/// Numerical checks of propagator sign functionals, Kraus-channel
/// invertibility and rotating-wave averages.
///
/// Exit codes: 0 all checks passed, 1 a claim check failed, 2 numerical
/// accuracy failure, 64 usage error, 65 malformed input.
#[derive(Parser)]
#[command(name = "propsign", version)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Re iΔ_F ≥ 0 on random separable test functions.
    FreeSign,
    /// Opposite signs of Im iΔ_F on the two delta/principal-value functions.
    ImIndeterminate,
    /// Covariant dephasing map: round trip, decomposition, purity rate, non-onto witness.
    Covmap,
    /// Invertibility verdict for a Kraus channel read from JSON.
    Kraus { channel_file: PathBuf },
    /// Rotating-wave positivity sweep, oracle comparison and functional.
    Rwa { model_file: Option<PathBuf> },
    /// Tabulated Bessel integral identities on the parameter lattice.
    BesselIdentities,
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("PROPSIGN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("PROPSIGN_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<i32, Failure> {
    init_threads()?;
    let (name, input) = match &cli.command {
        Command::FreeSign => ("free-sign", None),
        Command::ImIndeterminate => ("im-indeterminate", None),
        Command::Covmap => ("covmap", None),
        Command::Kraus { channel_file } => ("kraus", Some(channel_file)),
        Command::Rwa { model_file } => ("rwa", model_file.as_ref()),
        Command::BesselIdentities => ("bessel-identities", None),
    };
    let cfg = RunConfig::new(&cli.common, input);
    let outcome = match &cli.command {
        Command::FreeSign => commands::free_sign(&cfg)?,
        Command::ImIndeterminate => commands::im_indeterminate(&cfg)?,
        Command::Covmap => commands::covmap(&cfg)?,
        Command::Kraus { channel_file } => commands::kraus(&cfg, channel_file)?,
        Command::Rwa { model_file } => commands::rwa(&cfg, model_file.as_deref())?,
        Command::BesselIdentities => commands::bessel_identities(&cfg)?,
    };
    for note in &outcome.notes {
        eprintln!("{name}: {note}");
    }
    let bytes = output::render(name, &cfg, &outcome).map_err(Failure::Usage)?;
    output::write(&cfg, &bytes)?;
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
