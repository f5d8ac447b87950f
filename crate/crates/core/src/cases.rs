//! Random schedules for property checks, shared by the test suites and
//! `prunesched verify`.

use crate::instance::{Instance, Job, Objective, SplitMix64};
use crate::ordering::priority_order;
use crate::schedule::{Placement, ProperSchedule};
use crate::swap::{admissible_steps, find_admissible_swap, SwapPlan};

/// Uniformly random machine for every job, no discards.
pub fn random_proper_schedule(instance: &Instance, objective: Objective, rng: &mut SplitMix64) -> ProperSchedule {
    let m = instance.machines();
    let placements = (0..instance.len()).map(|_| Placement::Machine(rng.index(m))).collect();
    ProperSchedule::new(m, priority_order(instance, objective), placements).expect("valid machines")
}

fn random_jobs(count: usize, pmax: i64, wmax: i64, rng: &mut SplitMix64) -> Vec<(i64, i64)> {
    (0..count).map(|_| (rng.range(1, pmax), rng.range(0, wmax))).collect()
}

/// Builds an instance in which index order is already a due-date order and
/// every job kept by `placements` (given in index order) is on time.
fn on_time_instance(m: usize, jobs: &[(i64, i64)], placements: &[Placement], pmax: i64, rng: &mut SplitMix64) -> Instance {
    let mut loads = vec![0i64; m];
    let mut due = 0i64;
    let mut out = Vec::with_capacity(jobs.len());
    for (&(p, w), placement) in jobs.iter().zip(placements) {
        if let Placement::Machine(i) = *placement {
            loads[i] += p;
            due = due.max(loads[i]);
        }
        due += rng.range(0, pmax - 1);
        out.push(Job::new(p, w, due));
    }
    Instance::new(m, out).expect("generated jobs are valid")
}

/// Discard-free schedule for `objective` whose evaluation is defined. Under
/// weighted tardiness the due dates are chosen so that every job is on time.
pub fn evaluable_case(objective: Objective, m: usize, n: usize, pmax: i64, rng: &mut SplitMix64) -> (Instance, ProperSchedule) {
    let jobs = random_jobs(n, pmax, 5, rng);
    let placements: Vec<Placement> = (0..n).map(|_| Placement::Machine(rng.index(m))).collect();
    let instance = match objective {
        Objective::WeightedTardy => on_time_instance(m, &jobs, &placements, pmax, rng),
        _ => {
            let jobs = jobs
                .iter()
                .map(|&(p, w)| Job::new(p, w, rng.range(1, (n as i64 * pmax / m as i64).max(1))))
                .collect();
            Instance::new(m, jobs).expect("generated jobs are valid")
        }
    };
    // Placements above are by job index; restate them by priority position.
    let order = priority_order(&instance, objective);
    let by_position = order.jobs().iter().map(|&j| placements[j]).collect();
    let schedule = ProperSchedule::new(m, order, by_position).expect("valid machines");
    (instance, schedule)
}

/// A schedule with at least one admissible swap, together with one of its
/// admissible plans.
#[derive(Debug, Clone)]
pub struct ImbalancedCase {
    pub instance: Instance,
    pub schedule: ProperSchedule,
    pub plan: SwapPlan,
}

/// Draws schedules whose early priority positions pile onto machine 0 until
/// one admits a swap. Under weighted tardiness about one job in ten is
/// discarded and all kept jobs are on time.
pub fn imbalanced_case(objective: Objective, m: usize, pmax: i64, rng: &mut SplitMix64) -> ImbalancedCase {
    draw_imbalanced(objective, m, pmax, true, rng)
}

fn draw_imbalanced(objective: Objective, m: usize, pmax: i64, discards: bool, rng: &mut SplitMix64) -> ImbalancedCase {
    assert!(m >= 2, "a swap needs two machines");
    loop {
        let front = (8 * pmax * pmax / 2 + rng.range(0, 4 * pmax)) as usize;
        let back = (2 * pmax as usize) * m + rng.index(2 * pmax as usize * m + 1);
        let n = front + back;
        let jobs = random_jobs(n, pmax, 5, rng);
        let placements: Vec<Placement> = (0..n)
            .map(|k| {
                if discards && objective == Objective::WeightedTardy && rng.chance(1, 10) {
                    Placement::Discarded
                } else if k < front && rng.chance(7, 8) {
                    Placement::Machine(0)
                } else {
                    Placement::Machine(rng.index(m))
                }
            })
            .collect();

        let (instance, by_position) = match objective {
            Objective::WeightedTardy => (on_time_instance(m, &jobs, &placements, pmax, rng), placements),
            _ => {
                // Interpret `placements` by priority position directly.
                let instance = Instance::new(
                    m,
                    jobs.iter()
                        .map(|&(p, w)| Job::new(p, w, rng.range(1, n as i64 * pmax / m as i64)))
                        .collect(),
                )
                .expect("generated jobs are valid");
                (instance, placements)
            }
        };
        let order = priority_order(&instance, objective);
        let schedule = ProperSchedule::new(m, order, by_position).expect("valid machines");
        let steps = admissible_steps(&schedule, &instance);
        if steps.is_empty() {
            continue;
        }
        let step = steps[rng.index(steps.len())];
        let plan = find_admissible_swap(&schedule, step, &instance).expect("step is admissible");
        return ImbalancedCase {
            instance,
            schedule,
            plan,
        };
    }
}

/// A leveled discard-free schedule that becomes unbalanced (some gap above
/// `4·p_max²`) at step `first_unbalanced`, with the admissible plan there.
#[derive(Debug, Clone)]
pub struct LeveledUnbalancedCase {
    pub instance: Instance,
    pub schedule: ProperSchedule,
    pub first_unbalanced: usize,
    pub plan: SwapPlan,
}

pub fn leveled_unbalanced_case(objective: Objective, m: usize, pmax: i64, rng: &mut SplitMix64) -> LeveledUnbalancedCase {
    let limit = 4 * pmax * pmax;
    loop {
        let case = draw_imbalanced(objective, m, pmax, false, rng);
        let Ok(leveled) = case.schedule.levelize(&case.instance, objective) else {
            continue;
        };
        let schedule = leveled.schedule;
        let profile = schedule.balance_profile(&case.instance);
        let Some(first) = (1..profile.steps()).find(|&s| profile.max_abs_delta_at(s) > limit) else {
            continue;
        };
        // Profile step `s` is the state after `s` jobs, i.e. position `s − 1`.
        let Some(plan) = find_admissible_swap(&schedule, first - 1, &case.instance) else {
            continue;
        };
        return LeveledUnbalancedCase {
            instance: case.instance,
            schedule,
            first_unbalanced: first - 1,
            plan,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imbalanced_cases_are_admissible() {
        let mut rng = SplitMix64::new(5);
        for objective in Objective::ALL {
            for m in [2, 3] {
                let c = imbalanced_case(objective, m, 3, &mut rng);
                assert_eq!(find_admissible_swap(&c.schedule, c.plan.step, &c.instance), Some(c.plan.clone()));
                assert!(c.schedule.evaluate(&c.instance, objective).is_ok());
            }
        }
    }

    #[test]
    fn on_time_cases_evaluate() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..50 {
            let (i, s) = evaluable_case(Objective::WeightedTardy, 3, 12, 4, &mut rng);
            assert_eq!(s.evaluate(&i, Objective::WeightedTardy), Ok(0));
            assert!(!s.has_discards());
        }
    }

    #[test]
    fn leveled_unbalanced_cases_exist() {
        let mut rng = SplitMix64::new(2);
        let c = leveled_unbalanced_case(Objective::WeightedCompletion, 2, 2, &mut rng);
        let profile = c.schedule.balance_profile(&c.instance);
        assert!(profile.max_abs_delta_at(c.first_unbalanced + 1) > 16);
        assert!(profile.max_abs_delta_at(c.first_unbalanced) <= 16);
    }
}
