use std::io::Write;

use clap::Args;
use prunesched::bench::{time_solver, TimingSample};
use prunesched::classic::classic_state_bound;
use prunesched::oracle::ENUMERATION_CAP;
use prunesched::pruned::state_bound;
use prunesched::{generate_instance, Algorithm, DueMode, GeneratorParams, Instance, Objective};
use rayon::prelude::*;

use crate::{worker_pool, CliError, GenParams};

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "wct")]
    objective: Objective,
    /// Engines to time; classic and pruned by default.
    #[arg(long, value_delimiter = ',', default_value = "classic,pruned")]
    algorithm: Vec<Algorithm>,
    /// Job counts to sweep.
    #[arg(long = "n", value_delimiter = ',', default_value = "1000,2000,4000")]
    jobs: Vec<usize>,
    #[arg(long, default_value = "loose")]
    due: DueMode,
    #[command(flatten)]
    params: GenParams,
    /// Timed repetitions per row, after one warm-up run.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Tab-separated output with a header line.
    #[arg(long)]
    tsv: bool,
}

/// The bound each engine guarantees on its per-layer state count.
fn engine_bound(instance: &Instance, objective: Objective, algorithm: Algorithm) -> u64 {
    match algorithm {
        Algorithm::Oracle => ENUMERATION_CAP,
        Algorithm::Classic => classic_state_bound(instance, objective),
        Algorithm::Pruned => state_bound(instance, objective),
    }
}

const HEADER: [&str; 9] = ["n", "m", "pmax", "objective", "algorithm", "median_ms", "min_ms", "peak_states", "state_bound"];

fn row(sample: &TimingSample, n: usize, args: &BenchArgs, algorithm: Algorithm, bound: u64) -> [String; 9] {
    [
        n.to_string(),
        args.params.machines.to_string(),
        args.params.pmax.to_string(),
        args.objective.to_string(),
        algorithm.to_string(),
        sample.median_ms().to_string(),
        sample.min_ms().to_string(),
        sample.peak_states.to_string(),
        bound.to_string(),
    ]
}

pub fn cmd_bench(args: &BenchArgs, out: &mut impl Write) -> Result<(), CliError> {
    let configs: Vec<(usize, Algorithm)> = args
        .jobs
        .iter()
        .flat_map(|&n| args.algorithm.iter().map(move |&a| (n, a)))
        .collect();
    let pool = worker_pool()?;
    let rows: Vec<Result<[String; 9], CliError>> = pool.install(|| {
        configs
            .par_iter()
            .map(|&(n, algorithm)| {
                let instance = generate_instance(&GeneratorParams {
                    jobs: n,
                    machines: args.params.machines,
                    max_processing: args.params.pmax,
                    max_weight: args.params.wmax,
                    due: args.due,
                    seed: args.params.seed,
                })
                .map_err(|e| CliError::Input(e.to_string()))?;
                let sample = time_solver(&instance, args.objective, algorithm, args.reps).map_err(|e| match e {
                    prunesched::bench::BenchError::Solver(e) => CliError::from(e),
                    prunesched::bench::BenchError::TooFewRepetitions(_) => CliError::Input(e.to_string()),
                    other => CliError::Internal(other.to_string()),
                })?;
                Ok(row(&sample, n, args, algorithm, engine_bound(&instance, args.objective, algorithm)))
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    if args.tsv {
        writeln!(out, "{}", HEADER.join("\t"))?;
        for r in &rows {
            writeln!(out, "{}", r.join("\t"))?;
        }
        return Ok(());
    }
    let mut widths: Vec<usize> = HEADER.iter().map(|h| h.len()).collect();
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(HEADER.to_vec()))?;
    for r in &rows {
        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use prunesched::Job;

    #[test]
    fn bounds_follow_the_engine() {
        let i = Instance::new(2, vec![Job::new(1, 1, 1); 3]).unwrap();
        let o = Objective::WeightedCompletion;
        assert_eq!(engine_bound(&i, o, Algorithm::Classic), 4);
        assert_eq!(engine_bound(&i, o, Algorithm::Pruned), 17);
        assert_eq!(engine_bound(&i, o, Algorithm::Oracle), ENUMERATION_CAP);
    }
}
