use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use prunesched::{parse_instance, solve, Algorithm, Instance, Objective, ScheduleListing, SolveOptions};

use crate::CliError;

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long)]
    objective: Objective,
    #[arg(long, default_value = "pruned")]
    algorithm: Algorithm,
    /// Instance file, or `-` for standard input.
    #[arg(long)]
    input: PathBuf,
    /// Print one line per machine (and the discarded jobs for wtardy).
    #[arg(long, conflicts_with = "no_schedule")]
    emit_schedule: bool,
    /// Skip predecessor tracking; only the value is computed.
    #[arg(long)]
    no_schedule: bool,
}

fn read_instance(path: &PathBuf) -> Result<Instance, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    };
    parse_instance(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn cmd_solve(args: &SolveArgs, out: &mut impl Write) -> Result<(), CliError> {
    let instance = read_instance(&args.input)?;
    let options = SolveOptions {
        reconstruct: args.emit_schedule,
        ..SolveOptions::default()
    };
    let start = Instant::now();
    let sol = solve(&instance, args.objective, args.algorithm, options)?;
    let elapsed = start.elapsed();

    writeln!(out, "objective {}", sol.value)?;
    if args.emit_schedule {
        let schedule = sol
            .schedule
            .as_ref()
            .ok_or_else(|| CliError::Internal("solver returned no schedule".into()))?;
        let evaluated = schedule
            .evaluate(&instance, args.objective)
            .map_err(|e| CliError::Internal(format!("returned schedule is invalid: {e}")))?;
        if evaluated != sol.value {
            return Err(CliError::Internal(format!(
                "returned schedule evaluates to {evaluated}, not {}",
                sol.value
            )));
        }
        let listing = ScheduleListing {
            schedule: &schedule.to_ordered(),
            with_discarded: args.objective == Objective::WeightedTardy,
        };
        write!(out, "{listing}")?;
    }
    writeln!(out, "states {} {}", sol.stats.peak(), sol.stats.total())?;
    writeln!(out, "time_ms {}", elapsed.as_millis())?;
    Ok(())
}
