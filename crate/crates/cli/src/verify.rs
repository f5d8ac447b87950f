use std::io::Write;

use clap::Args;
use prunesched::cases::imbalanced_case;
use prunesched::classic::classic_state_bound;
use prunesched::oracle::ENUMERATION_CAP;
use prunesched::pruned::state_bound;
use prunesched::swap::{apply_swap, check_completion_laws, verify_swap_optimality};
use prunesched::{
    generate_instance, solve, Algorithm, DueMode, GeneratorParams, Instance, Objective, Solution, SolveOptions,
    SplitMix64,
};
use rayon::prelude::*;

use crate::{worker_pool, CliError, GenParams};

#[derive(Args)]
pub struct VerifyArgs {
    /// Restrict to one objective; all three by default.
    #[arg(long)]
    objective: Option<Objective>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Job counts, used in turn by successive trials.
    #[arg(long = "n", value_delimiter = ',', default_value = "8")]
    jobs: Vec<usize>,
    /// Due-date mode; trials cycle through all three by default.
    #[arg(long)]
    due: Option<DueMode>,
    #[command(flatten)]
    params: GenParams,
    /// Corrupt the pruned solver on purpose; the run must then fail.
    #[arg(long)]
    self_test: bool,
}

struct Failure {
    trial: usize,
    reason: String,
    instance: Instance,
}

fn oracle_fits(instance: &Instance, objective: Objective) -> bool {
    let radix = match objective {
        Objective::WeightedTardy => instance.machines() + 1,
        _ => instance.machines(),
    } as u128;
    radix
        .checked_pow(instance.len() as u32)
        .is_some_and(|size| size <= ENUMERATION_CAP as u128)
}

fn run(instance: &Instance, objective: Objective, algorithm: Algorithm, options: SolveOptions) -> Result<Solution, String> {
    solve(instance, objective, algorithm, options).map_err(|e| format!("{algorithm} failed: {e}"))
}

fn check_engines(instance: &Instance, objective: Objective, fault: bool) -> Result<(), String> {
    let classic = run(instance, objective, Algorithm::Classic, SolveOptions::value_only())?;
    let pruned = run(
        instance,
        objective,
        Algorithm::Pruned,
        SolveOptions {
            reconstruct: true,
            inject_fault: fault,
        },
    )?;
    if classic.value != pruned.value {
        return Err(format!("classic {} != pruned {}", classic.value, pruned.value));
    }
    if oracle_fits(instance, objective) {
        let oracle = run(instance, objective, Algorithm::Oracle, SolveOptions::value_only())?;
        if oracle.value != classic.value {
            return Err(format!("oracle {} != classic {}", oracle.value, classic.value));
        }
    }
    let schedule = pruned.schedule.expect("requested a schedule");
    match schedule.evaluate(instance, objective) {
        Ok(v) if v == pruned.value => {}
        other => return Err(format!("pruned schedule evaluates to {other:?}, not {}", pruned.value)),
    }
    let cb = classic_state_bound(instance, objective) as usize;
    if let Some(k) = classic.stats.per_layer().iter().position(|&c| c > cb) {
        return Err(format!("classic layer {k} holds {} > {cb} states", classic.stats.per_layer()[k]));
    }
    let pb = state_bound(instance, objective) as usize;
    if let Some(k) = pruned.stats.per_layer().iter().position(|&c| c > pb) {
        return Err(format!("pruned layer {k} holds {} > {pb} states", pruned.stats.per_layer()[k]));
    }
    Ok(())
}

/// Returns the swap instance on failure, since it differs from the trial's.
fn check_swap(objective: Objective, m: usize, pmax: i64, rng: &mut SplitMix64) -> Result<(), (String, Instance)> {
    let case = imbalanced_case(objective, m, pmax, rng);
    let fail = |reason: String| (reason, case.instance.clone());
    let report = verify_swap_optimality(&case.schedule, &case.plan, &case.instance, objective)
        .map_err(|e| fail(format!("swap failed: {e}")))?;
    if !report.pass {
        return Err(fail(format!(
            "swap at position {} worsened the objective: {} -> {} -> {}",
            case.plan.step + 1,
            report.before,
            report.intermediate,
            report.after
        )));
    }
    let outcome = apply_swap(&case.schedule, &case.plan, &case.instance).map_err(|e| fail(e.to_string()))?;
    let laws = check_completion_laws(&case.schedule, &case.plan, &outcome, &case.instance)
        .map_err(|e| fail(e.to_string()))?;
    if !laws.all_hold() {
        return Err(fail(format!("completion-time laws violated: {laws:?}")));
    }
    Ok(())
}

fn run_trial(args: &VerifyArgs, trial: usize, seed: u64) -> Result<(), Failure> {
    let modes = [DueMode::Tight, DueMode::Loose, DueMode::Common];
    let params = GeneratorParams {
        jobs: args.jobs[trial % args.jobs.len()],
        machines: args.params.machines,
        max_processing: args.params.pmax,
        max_weight: args.params.wmax,
        due: args.due.unwrap_or(modes[trial % modes.len()]),
        seed,
    };
    let instance = generate_instance(&params).expect("parameters validated up front");
    let objectives = match args.objective {
        Some(o) => vec![o],
        None => Objective::ALL.to_vec(),
    };
    let mut rng = SplitMix64::new(seed);
    for objective in objectives {
        check_engines(&instance, objective, args.self_test).map_err(|reason| Failure {
            trial,
            reason: format!("{objective}: {reason}"),
            instance: instance.clone(),
        })?;
        if params.machines >= 2 {
            check_swap(objective, params.machines, params.max_processing, &mut rng).map_err(|(reason, instance)| {
                Failure {
                    trial,
                    reason: format!("{objective}: {reason}"),
                    instance,
                }
            })?;
        }
    }
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut impl Write) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(CliError::Input("--trials must be ≥ 1".into()));
    }
    // Validate the generator parameters once so trials cannot fail on them.
    for &jobs in &args.jobs {
        generate_instance(&GeneratorParams {
            jobs,
            machines: args.params.machines,
            max_processing: args.params.pmax,
            max_weight: args.params.wmax,
            due: DueMode::Loose,
            seed: 0,
        })
        .map_err(|e| CliError::Input(e.to_string()))?;
    }
    let mut seeder = SplitMix64::new(args.params.seed);
    let seeds: Vec<u64> = (0..args.trials).map(|_| seeder.next_u64()).collect();
    let pool = worker_pool()?;
    let results: Vec<Result<(), Failure>> = pool.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(trial, &seed)| run_trial(args, trial, seed))
            .collect()
    });

    let passed = results.iter().filter(|r| r.is_ok()).count();
    if passed == args.trials {
        writeln!(out, "PASS {passed}/{}", args.trials)?;
        return Ok(());
    }
    writeln!(out, "FAIL {passed}/{}", args.trials)?;
    let first = results.into_iter().find_map(Result::err).expect("some trial failed");
    writeln!(out, "trial {}: {}", first.trial + 1, first.reason)?;
    write!(out, "{}", first.instance)?;
    Err(CliError::Failed)
}
