//! Lawler-Moore dynamic programs restricted to balanced states.
//!
//! Some optimal schedule keeps every pairwise machine-load gap within
//! `4·p_max²` at every prefix, hence every machine within `4·p_max²` of the
//! prefix average. The programs here only keep such states, so a layer holds
//! `O(p_max^(2m−2))` states independently of `n` (times `P` for tardiness).
//!
//! # State encodings
//!
//! Weighted completion time and maximum lateness track, for each of the
//! first `m − 1` machines, the scaled deviation `D_i = m·load_i − P(J_j)`.
//! Scaling by `m` keeps the average integral, and `P(J_j) + D_i` is always a
//! multiple of `m`. States where any machine, the implicit last one
//! included, has `|D_i| > 4·m·p_max²` are dropped.
//!
//! Weighted tardiness tracks `Δ_i = load_i − load_m` for the first `m − 1`
//! machines together with the absolute scheduled load of machine `m`;
//! states with some `|Δ_i| > 4·p_max²` are dropped.

use crate::dp::{run_layers, Choice, Codec, Prepared, Solution, SolveError, SolveOptions, DISCARD};
use crate::instance::{Instance, Objective};

/// Largest admissible `|D_i|` for the deviation encoding, `4·m·p_max²`.
pub fn deviation_radius(instance: &Instance) -> i64 {
    4 * instance.machines() as i64 * instance.max_processing().pow(2)
}

/// Largest admissible `|Δ_i|` for the tardiness encoding, `4·p_max²`.
pub fn gap_radius(instance: &Instance) -> i64 {
    4 * instance.max_processing().pow(2)
}

/// Ceiling on the states any layer of [`solve_pruned`] can hold:
/// `(8·m·p_max² + 1)^(m−1)`, or `(8·p_max² + 1)^(m−1)·(P + 1)` for weighted
/// tardiness. Saturates at `u64::MAX`.
pub fn state_bound(instance: &Instance, objective: Objective) -> u64 {
    let dims = instance.machines() as u32 - 1;
    let pow = |base: i64| (base as u64).checked_pow(dims);
    let bound = match objective {
        Objective::WeightedTardy => pow(2 * gap_radius(instance) + 1)
            .and_then(|b| b.checked_mul(instance.total_processing() as u64 + 1)),
        _ => pow(2 * deviation_radius(instance) + 1),
    };
    bound.unwrap_or(u64::MAX)
}

pub fn solve_pruned(
    instance: &Instance,
    objective: Objective,
    options: SolveOptions,
) -> Result<Solution, SolveError> {
    match objective {
        Objective::WeightedTardy => solve_tardy(instance, options),
        _ => solve_deviation(instance, objective, options),
    }
}

fn solve_deviation(
    instance: &Instance,
    objective: Objective,
    options: SolveOptions,
) -> Result<Solution, SolveError> {
    let prep = Prepared::new(instance, objective)?;
    let m = instance.machines();
    let mi = m as i64;
    let radius = deviation_radius(instance);
    let tracked = m - 1;
    let codec = Codec::new(&vec![(radius, 2 * radius as u64 + 1); tracked])?;
    let initial_value = match objective {
        Objective::MaxLateness => i64::MIN,
        _ => 0,
    };
    let fault = options.inject_fault;
    let mut dev = vec![0i64; tracked];
    let mut moved = vec![0i64; tracked];

    let outcome = run_layers(
        instance.len(),
        codec.encode(&dev),
        initial_value,
        options.reconstruct,
        |step, key, value, next| {
            let (p, w, d) = prep.jobs[step];
            let prefix = prep.prefix[step + 1];
            codec.decode(key, &mut dev);
            let cost = |machine: usize, scaled: i64| -> Result<i64, SolveError> {
                if scaled % mi != 0 {
                    return Err(SolveError::Internal(format!(
                        "scaled completion {scaled} is not a multiple of {m} at position {step}"
                    )));
                }
                let completion = scaled / mi;
                let penalty = i64::from(fault && machine == 0);
                Ok(match objective {
                    Objective::WeightedCompletion => value + w * completion + penalty,
                    _ => value.max(completion - d + penalty),
                })
            };
            // Every tracked deviation drops by p, except the receiving one,
            // which gains (m − 1)·p.
            for target in 0..=tracked {
                let mut sum = 0;
                let mut inside = true;
                for (k, slot) in moved.iter_mut().enumerate() {
                    *slot = if k == target { dev[k] + (mi - 1) * p } else { dev[k] - p };
                    sum += *slot;
                    inside &= slot.abs() <= radius;
                }
                // The last machine's deviation is −Σ D_i.
                if !inside || sum.abs() > radius {
                    continue;
                }
                let scaled = if target < tracked { prefix + moved[target] } else { prefix - sum };
                next.offer(codec.encode(&moved), cost(target, scaled)?, target as Choice);
            }
            Ok(())
        },
    )?;

    Ok(Solution {
        value: outcome.value,
        schedule: outcome.choices.map(|c| prep.schedule(m, &c)),
        stats: outcome.stats,
    })
}

fn solve_tardy(instance: &Instance, options: SolveOptions) -> Result<Solution, SolveError> {
    let prep = Prepared::new(instance, Objective::WeightedTardy)?;
    let m = instance.machines();
    let radius = gap_radius(instance);
    let tracked = m - 1;
    let mut dims = vec![(radius, 2 * radius as u64 + 1); tracked];
    dims.push((0, instance.total_processing() as u64 + 1));
    let codec = Codec::new(&dims)?;
    let fault = options.inject_fault;
    // Layout: gaps Δ_1..Δ_{m−1}, then the load of machine m.
    let mut state = vec![0i64; tracked + 1];
    let mut moved = vec![0i64; tracked + 1];

    let outcome = run_layers(
        instance.len(),
        codec.encode(&state),
        0,
        options.reconstruct,
        |step, key, value, next| {
            let (p, w, d) = prep.jobs[step];
            codec.decode(key, &mut state);
            let last_load = state[tracked];
            for machine in 0..tracked {
                let gap = state[machine] + p;
                if last_load + gap <= d && gap <= radius {
                    moved.copy_from_slice(&state);
                    moved[machine] = gap;
                    let penalty = i64::from(fault && machine == 0);
                    next.offer(codec.encode(&moved), value + penalty, machine as Choice);
                }
            }
            if last_load + p <= d {
                moved.copy_from_slice(&state);
                moved[tracked] += p;
                let mut inside = true;
                for gap in &mut moved[..tracked] {
                    *gap -= p;
                    inside &= *gap >= -radius;
                }
                if inside {
                    let penalty = i64::from(fault && tracked == 0);
                    next.offer(codec.encode(&moved), value + penalty, tracked as Choice);
                }
            }
            next.offer(key, value + w, DISCARD);
            Ok(())
        },
    )?;

    Ok(Solution {
        value: outcome.value,
        schedule: outcome.choices.map(|c| prep.schedule(m, &c)),
        stats: outcome.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classic::solve_classic;
    use crate::instance::{generate_instance, DueMode, GeneratorParams, Job};

    fn inst(m: usize, jobs: &[(i64, i64, i64)]) -> Instance {
        Instance::new(m, jobs.iter().map(|&(p, w, d)| Job::new(p, w, d)).collect()).unwrap()
    }

    #[test]
    fn worked_examples() {
        let cases = [
            (inst(2, &[(1, 1, 0), (1, 1, 0)]), Objective::WeightedCompletion, 2),
            (inst(2, &[(2, 2, 0), (1, 1, 0), (1, 1, 0)]), Objective::WeightedCompletion, 7),
            (inst(2, &[(3, 0, 3), (1, 0, 1)]), Objective::MaxLateness, 0),
            (inst(1, &[(2, 5, 2), (2, 3, 2)]), Objective::WeightedTardy, 3),
        ];
        for (i, objective, expected) in cases {
            let sol = solve_pruned(&i, objective, SolveOptions::default()).unwrap();
            assert_eq!(sol.value, expected, "{objective}");
            assert_eq!(sol.schedule.unwrap().evaluate(&i, objective), Ok(expected));
        }
    }

    #[test]
    fn state_bound_formula() {
        let unit = inst(2, &[(1, 1, 1)]);
        assert_eq!(state_bound(&unit, Objective::WeightedCompletion), 17);
        let three = inst(2, &[(3, 1, 1)]);
        assert_eq!(state_bound(&three, Objective::MaxLateness), 145);
        let tardy = inst(2, &[(2, 1, 1), (2, 1, 1), (2, 1, 1), (2, 1, 1), (2, 1, 1)]);
        assert_eq!(state_bound(&tardy, Objective::WeightedTardy), 363);
        let single = inst(1, &[(2, 1, 1), (3, 1, 1)]);
        assert_eq!(state_bound(&single, Objective::WeightedCompletion), 1);
        assert_eq!(state_bound(&single, Objective::WeightedTardy), 6);
    }

    #[test]
    fn pruning_bites_on_long_instances_without_changing_the_optimum() {
        for (seed, m) in [(1u64, 2usize), (2, 2), (3, 3)] {
            let params = GeneratorParams {
                jobs: if m == 2 { 60 } else { 24 },
                machines: m,
                max_processing: 1 + seed as i64 % 2,
                max_weight: 9,
                due: DueMode::Loose,
                seed,
            };
            let i = generate_instance(&params).unwrap();
            for objective in Objective::ALL {
                let classic = solve_classic(&i, objective, SolveOptions::value_only()).unwrap();
                let pruned = solve_pruned(&i, objective, SolveOptions::default()).unwrap();
                assert_eq!(classic.value, pruned.value, "seed {seed} {objective}");
                assert!(pruned.stats.total() < classic.stats.total(), "seed {seed} {objective}");
                let bound = state_bound(&i, objective) as usize;
                assert!(pruned.stats.per_layer().iter().all(|&c| c <= bound));
                let s = pruned.schedule.unwrap();
                assert_eq!(s.evaluate(&i, objective), Ok(pruned.value));
            }
        }
    }

    #[test]
    fn deviation_states_respect_divisibility_and_radius() {
        let params = GeneratorParams {
            jobs: 40,
            machines: 3,
            max_processing: 2,
            max_weight: 4,
            due: DueMode::Tight,
            seed: 11,
        };
        let i = generate_instance(&params).unwrap();
        for objective in [Objective::WeightedCompletion, Objective::MaxLateness] {
            let sol = solve_pruned(&i, objective, SolveOptions::default()).unwrap();
            let profile = sol.schedule.unwrap().balance_profile(&i);
            assert!(profile.max_scaled_deviation() <= deviation_radius(&i));
        }
    }

    #[test]
    fn injected_fault_changes_some_answer() {
        let i = inst(2, &[(1, 2, 1), (1, 2, 1), (1, 2, 1), (1, 2, 1)]);
        for objective in Objective::ALL {
            let honest = solve_pruned(&i, objective, SolveOptions::default()).unwrap();
            let faulty = solve_pruned(
                &i,
                objective,
                SolveOptions {
                    inject_fault: true,
                    ..SolveOptions::default()
                },
            )
            .unwrap();
            assert_ne!(honest.value, faulty.value, "{objective}");
        }
    }
}
