use chardata_cli::commands::{run, Command, Invocation, OutputFormat};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "chardata",
    version,
    about = "Characteristic data of torus actions: validate, convert, inspect, decide"
)]
struct Cli {
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Record the top-strata homotopy condition as asserted on parsed data
    #[arg(long, global = true)]
    assert_top_he: bool,
    /// Cap on codimension-one strata for the isomorphism sign enumeration
    #[arg(long, global = true, default_value_t = 24)]
    max_signs: usize,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Weak,
    Strict,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a chardata, fan, polytope, or lattice file
    Validate { path: PathBuf },
    /// Dimension bookkeeping of the model of a chardata file
    Inspect { path: PathBuf },
    /// Characteristic data of the link of a stratum
    Link { path: PathBuf, stratum: String },
    /// Decide (weak) isomorphism of two chardata files
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Weak)]
        mode: ModeArg,
    },
    /// Convert a complete fan to characteristic data
    Fan2cd { path: PathBuf },
    /// Convert a labeled polytope to characteristic data
    Poly2cd { path: PathBuf },
    /// Restrict characteristic data to its i-th skeleton
    Skeleton { path: PathBuf, index: usize },
    /// Smith invariant factors of a lattice file
    Snf { path: PathBuf },
    /// GL(m,Z)-invariant fingerprint of a chardata file
    Fingerprint { path: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let command = match cli.command {
        Cmd::Validate { path } => Command::Validate { path },
        Cmd::Inspect { path } => Command::Inspect { path },
        Cmd::Link { path, stratum } => Command::Link { path, stratum },
        Cmd::Iso { a, b, mode } => Command::Iso {
            a,
            b,
            mode: match mode {
                ModeArg::Weak => chardata::iso::Mode::Weak,
                ModeArg::Strict => chardata::iso::Mode::Strict,
            },
        },
        Cmd::Fan2cd { path } => Command::Fan2cd { path },
        Cmd::Poly2cd { path } => Command::Poly2cd { path },
        Cmd::Skeleton { path, index } => Command::Skeleton { path, index },
        Cmd::Snf { path } => Command::Snf { path },
        Cmd::Fingerprint { path } => Command::Fingerprint { path },
    };
    let invocation = Invocation {
        command,
        format: match cli.format {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
        },
        assert_top_he: cli.assert_top_he,
        max_signs: cli.max_signs,
    };
    match run(&invocation) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
