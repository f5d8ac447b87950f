//! The textbook Lawler-Moore dynamic programs.
//!
//! Weighted completion time and maximum lateness index states by the loads
//! of the first `m − 1` machines (the last machine's load is implied by the
//! prefix sum). Weighted tardiness tracks all `m` loads, since discarded jobs
//! make the total scheduled load vary.

use crate::dp::{run_layers, Choice, Codec, Prepared, Solution, SolveError, SolveOptions, DISCARD};
use crate::instance::{Instance, Objective};

/// Size of the index space the classic program ranges over:
/// `(P+1)^(m−1)`, or `(P+1)^m` for weighted tardiness. Saturates at `u64::MAX`.
pub fn classic_state_bound(instance: &Instance, objective: Objective) -> u64 {
    let dims = match objective {
        Objective::WeightedTardy => instance.machines(),
        _ => instance.machines() - 1,
    };
    let base = instance.total_processing() as u64 + 1;
    (0..dims).try_fold(1u64, |acc, _| acc.checked_mul(base)).unwrap_or(u64::MAX)
}

pub fn solve_classic(
    instance: &Instance,
    objective: Objective,
    options: SolveOptions,
) -> Result<Solution, SolveError> {
    let prep = Prepared::new(instance, objective)?;
    let m = instance.machines();
    let total = instance.total_processing();
    let tracked = match objective {
        Objective::WeightedTardy => m,
        _ => m - 1,
    };
    let codec = Codec::new(&vec![(0, total as u64 + 1); tracked])?;
    let initial_value = match objective {
        Objective::MaxLateness => i64::MIN,
        _ => 0,
    };
    let mut loads = vec![0i64; tracked];

    let outcome = run_layers(instance.len(), 0, initial_value, options.reconstruct, |step, key, value, next| {
        let (p, w, d) = prep.jobs[step];
        codec.decode(key, &mut loads);
        match objective {
            Objective::WeightedCompletion | Objective::MaxLateness => {
                let cost = |completion: i64| -> i64 {
                    if objective == Objective::WeightedCompletion {
                        value + w * completion
                    } else {
                        value.max(completion - d)
                    }
                };
                for (machine, &load) in loads.iter().enumerate() {
                    let stride = codec.stride(machine);
                    next.offer(key + p as u64 * stride, cost(load + p), machine as Choice);
                }
                let last = prep.prefix[step + 1] - loads.iter().sum::<i64>();
                next.offer(key, cost(last), (m - 1) as Choice);
            }
            Objective::WeightedTardy => {
                for (machine, &load) in loads.iter().enumerate() {
                    if load + p <= d {
                        let stride = codec.stride(machine);
                        next.offer(key + p as u64 * stride, value, machine as Choice);
                    }
                }
                next.offer(key, value + w, DISCARD);
            }
        }
        Ok(())
    })?;

    Ok(Solution {
        value: outcome.value,
        schedule: outcome.choices.map(|c| prep.schedule(m, &c)),
        stats: outcome.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Job;

    fn inst(m: usize, jobs: &[(i64, i64, i64)]) -> Instance {
        Instance::new(m, jobs.iter().map(|&(p, w, d)| Job::new(p, w, d)).collect()).unwrap()
    }

    fn check(instance: &Instance, objective: Objective, expected: i64) {
        let sol = solve_classic(instance, objective, SolveOptions::default()).unwrap();
        assert_eq!(sol.value, expected);
        let schedule = sol.schedule.unwrap();
        assert_eq!(schedule.evaluate(instance, objective), Ok(expected));
        let bound = classic_state_bound(instance, objective) as usize;
        assert!(sol.stats.per_layer().iter().all(|&c| c <= bound));
    }

    #[test]
    fn worked_examples() {
        check(&inst(2, &[(1, 1, 0), (1, 1, 0)]), Objective::WeightedCompletion, 2);
        // Brute force over the 8 assignments: {2} | {1,1} gives 2·2 + 1 + 2 = 7.
        check(&inst(2, &[(2, 2, 0), (1, 1, 0), (1, 1, 0)]), Objective::WeightedCompletion, 7);
        check(&inst(2, &[(3, 0, 3), (1, 0, 1)]), Objective::MaxLateness, 0);
        check(&inst(1, &[(2, 5, 2), (2, 3, 2)]), Objective::WeightedTardy, 3);
        check(&inst(2, &[(2, 1, 2), (2, 1, 2), (2, 1, 2)]), Objective::WeightedTardy, 1);
    }

    #[test]
    fn single_machine_is_a_chain() {
        let i = inst(1, &[(3, 1, 4), (1, 2, 9), (2, 2, 1)]);
        let sol = solve_classic(&i, Objective::WeightedCompletion, SolveOptions::default()).unwrap();
        assert_eq!(sol.stats.per_layer(), &[1, 1, 1, 1]);
        assert_eq!(sol.schedule.unwrap().evaluate(&i, Objective::WeightedCompletion), Ok(sol.value));
    }

    #[test]
    fn one_job_two_machines() {
        let i = inst(2, &[(3, 1, 0)]);
        let sol = solve_classic(&i, Objective::WeightedCompletion, SolveOptions::default()).unwrap();
        assert!(sol.stats.per_layer()[1] <= 2);
        assert_eq!(sol.value, 3);
    }

    #[test]
    fn lmax_reports_negative_lateness() {
        let i = inst(2, &[(1, 0, 10), (1, 0, 10)]);
        let sol = solve_classic(&i, Objective::MaxLateness, SolveOptions::default()).unwrap();
        assert_eq!(sol.value, -9);
    }

    #[test]
    fn value_only_mode_matches() {
        let i = inst(3, &[(3, 1, 4), (1, 2, 2), (2, 2, 1), (4, 1, 7), (2, 5, 3)]);
        for objective in Objective::ALL {
            let full = solve_classic(&i, objective, SolveOptions::default()).unwrap();
            let lean = solve_classic(&i, objective, SolveOptions::value_only()).unwrap();
            assert_eq!(full.value, lean.value);
            assert_eq!(full.stats, lean.stats);
            assert!(lean.schedule.is_none());
        }
    }

    #[test]
    fn index_space_bounds() {
        let i = inst(3, &[(2, 1, 1), (3, 1, 1)]);
        assert_eq!(classic_state_bound(&i, Objective::WeightedCompletion), 36);
        assert_eq!(classic_state_bound(&i, Objective::WeightedTardy), 216);
    }
}
