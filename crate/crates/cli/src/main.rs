mod bench;
mod solve;
mod verify;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use prunesched::{generate_instance, DueMode, GeneratorParams};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "prunesched", version, about = "Exact parallel-machine scheduling by classic and pruned dynamic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file.
    Solve(solve::SolveArgs),
    /// Cross-check the engines and the swap on random instances.
    Verify(verify::VerifyArgs),
    /// Time the engines over a sweep of instance sizes.
    Bench(bench::BenchArgs),
    /// Print a random instance in the text format.
    Gen(GenArgs),
}

/// Random-instance parameters shared by `gen`, `verify` and `bench`.
#[derive(Args, Debug, Clone)]
pub struct GenParams {
    /// Machines.
    #[arg(long = "m", default_value_t = 2)]
    pub machines: usize,
    /// Largest processing time.
    #[arg(long, default_value_t = 4)]
    pub pmax: i64,
    /// Largest weight.
    #[arg(long, default_value_t = 5)]
    pub wmax: i64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args)]
struct GenArgs {
    /// Jobs.
    #[arg(long = "n")]
    jobs: usize,
    #[arg(long, default_value = "loose")]
    due: DueMode,
    #[command(flatten)]
    params: GenParams,
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or invalid input.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    OracleCap(String),
    #[error("{0}")]
    Internal(String),
    /// Already reported on standard output.
    #[error("verification failed")]
    Failed,
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Failed | CliError::Io(_) => 1,
            CliError::OracleCap(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<prunesched::Error> for CliError {
    fn from(e: prunesched::Error) -> Self {
        use prunesched::SolveError;
        match e {
            prunesched::Error::Oracle(e) => CliError::OracleCap(e.to_string()),
            prunesched::Error::Solve(SolveError::Internal(msg)) => CliError::Internal(msg),
            prunesched::Error::Solve(SolveError::Infeasible { .. }) => CliError::Internal(e.to_string()),
            prunesched::Error::Solve(other) => CliError::Input(other.to_string()),
        }
    }
}

/// Worker pool sized by `PRUNESCHED_THREADS`, or all cores when unset.
pub fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("PRUNESCHED_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => return Err(CliError::Input(format!("PRUNESCHED_THREADS must be a positive integer, got `{raw}`"))),
        }
    }
    builder.build().map_err(|e| CliError::Internal(e.to_string()))
}

fn cmd_gen(args: &GenArgs, out: &mut impl Write) -> Result<(), CliError> {
    let params = GeneratorParams {
        jobs: args.jobs,
        machines: args.params.machines,
        max_processing: args.params.pmax,
        max_weight: args.params.wmax,
        due: args.due,
        seed: args.params.seed,
    };
    let instance = generate_instance(&params).map_err(|e| CliError::Input(e.to_string()))?;
    write!(out, "{instance}")?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Solve(args) => solve::cmd_solve(&args, &mut out),
        Command::Verify(args) => verify::cmd_verify(&args, &mut out),
        Command::Bench(args) => bench::cmd_bench(&args, &mut out),
        Command::Gen(args) => cmd_gen(&args, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // A closed pipe (`… | head`) is not worth a diagnostic.
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Failed) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use prunesched::{OracleError, SolveError};

    #[test]
    fn exit_codes_follow_error_kind() {
        let cap = CliError::from(prunesched::Error::Oracle(OracleError::CapExceeded { size: 1 << 30, cap: 10 }));
        assert_eq!(cap.exit_code(), 2);
        let internal = CliError::from(prunesched::Error::Solve(SolveError::Internal("x".into())));
        assert_eq!(internal.exit_code(), 3);
        let input = CliError::from(prunesched::Error::Solve(SolveError::TooManyMachines { machines: 300 }));
        assert_eq!(input.exit_code(), 1);
        assert_eq!(CliError::Failed.exit_code(), 1);
    }

    #[test]
    fn command_line_parses() {
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["prunesched", "gen", "--n", "3", "--m", "4"]).unwrap();
        let Command::Gen(args) = cli.command else { panic!("wrong subcommand") };
        assert_eq!((args.jobs, args.params.machines, args.params.pmax, args.due), (3, 4, 4, DueMode::Loose));
        assert!(Cli::try_parse_from(["prunesched", "gen", "--m", "4"]).is_err());
    }

    #[test]
    fn gen_writes_the_text_form() {
        let cli = Cli::try_parse_from(["prunesched", "gen", "--n", "1", "--m", "1", "--pmax", "1", "--wmax", "0", "--seed", "7"]).unwrap();
        let Command::Gen(args) = cli.command else { panic!("wrong subcommand") };
        let mut buf = Vec::new();
        cmd_gen(&args, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "machines 1\njob 1 0 1\n");
    }
}
