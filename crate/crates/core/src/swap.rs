//! The equal-sum block exchange between an overloaded and an underloaded
//! machine.
//!
//! At step `j` (a priority position) a donor machine `h` holding job `j` and
//! a receiver `i` qualify when `i` still has at least `2·p_max` jobs after
//! step `j` and the prefix load gap `Δ_{h,i,j}` reaches `4·p_max²`. The
//! last `2·p_max` prefix jobs of `h` (`J_H`) and the first `2·p_max` later
//! jobs of `i` (`J_I`) then carry equal-sum sub-blocks `J_H'` and `J_I'`,
//! which trade machines.
//!
//! Discarded jobs are ignored throughout: loads and job counts only see
//! scheduled jobs.

use thiserror::Error;

use crate::combinatorics::equal_sum_submultisets;
use crate::instance::{Instance, Objective};
use crate::schedule::{OrderedSchedule, Placement, ProperSchedule, ScheduleError};

/// One admissible exchange. Job lists hold job indices in schedule order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapPlan {
    /// Priority position `j*` of the pivot job.
    pub step: usize,
    pub donor: usize,
    pub receiver: usize,
    /// `t_i`, the receiver's load after `step`.
    pub receiver_time: i64,
    /// `t_h`, the donor's load after `step` (the pivot's completion time).
    pub donor_time: i64,
    /// `J_H`: last `2·p_max` jobs of the donor up to the pivot.
    pub donor_block: Vec<usize>,
    /// `J_I`: first `2·p_max` jobs of the receiver after the step.
    pub receiver_block: Vec<usize>,
    /// `J_H'`, moving to the receiver.
    pub donor_moved: Vec<usize>,
    /// `J_I'`, moving to the donor.
    pub receiver_moved: Vec<usize>,
    /// `J_H''`, staying on the donor.
    pub donor_kept: Vec<usize>,
    /// `J_I''`, staying on the receiver.
    pub receiver_kept: Vec<usize>,
}

impl SwapPlan {
    pub fn gap(&self) -> i64 {
        self.donor_time - self.receiver_time
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapOutcome {
    /// `σ'`: blocks exchanged in place, priority order not restored.
    pub intermediate: OrderedSchedule,
    /// `σ''`: `σ'` with each machine re-sorted by priority.
    pub result: ProperSchedule,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SwapError {
    #[error("the plan does not match an admissible swap of this schedule")]
    StalePlan,
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Per-machine job lists (by priority position) restricted to scheduled jobs.
fn machine_positions(schedule: &ProperSchedule) -> Vec<Vec<usize>> {
    let mut lists = vec![Vec::new(); schedule.machines()];
    for (pos, placement) in schedule.placements().iter().enumerate() {
        if let Placement::Machine(i) = *placement {
            lists[i].push(pos);
        }
    }
    lists
}

/// Looks for an admissible pair at `step`. Among qualifying receivers the
/// largest gap wins, then the lowest index.
pub fn find_admissible_swap(
    schedule: &ProperSchedule,
    step: usize,
    instance: &Instance,
) -> Option<SwapPlan> {
    let Placement::Machine(donor) = schedule.placement(step) else {
        return None;
    };
    let pmax = instance.max_processing();
    let block = 2 * pmax as usize;
    let order = schedule.order();
    let p = |pos: usize| instance.job(order.job_at(pos)).processing;
    let lists = machine_positions(schedule);
    let prefix_load = |list: &[usize]| -> i64 { list.iter().take_while(|&&q| q <= step).map(|&q| p(q)).sum() };
    let donor_time = prefix_load(&lists[donor]);

    let mut best: Option<(i64, usize)> = None;
    for (receiver, list) in lists.iter().enumerate() {
        if receiver == donor {
            continue;
        }
        let later = list.iter().filter(|&&q| q > step).count();
        let gap = donor_time - prefix_load(list);
        if later >= block && gap >= 4 * pmax * pmax && best.is_none_or(|(g, _)| gap > g) {
            best = Some((gap, receiver));
        }
    }
    let (gap, receiver) = best?;

    let donor_prefix: Vec<usize> = lists[donor].iter().copied().filter(|&q| q <= step).collect();
    let donor_block: Vec<usize> = donor_prefix[donor_prefix.len() - block..].to_vec();
    let receiver_block: Vec<usize> = lists[receiver]
        .iter()
        .copied()
        .filter(|&q| q > step)
        .take(block)
        .collect();

    let h_sizes: Vec<i64> = donor_block.iter().map(|&q| p(q)).collect();
    let i_sizes: Vec<i64> = receiver_block.iter().map(|&q| p(q)).collect();
    let witness = equal_sum_submultisets(&h_sizes, &i_sizes, pmax)
        .expect("blocks of 2·p_max jobs sized in [1, p_max] always admit a witness");

    let split = |blk: &[usize], picks: &[usize]| -> (Vec<usize>, Vec<usize>) {
        let mut moved = Vec::new();
        let mut kept = Vec::new();
        for (k, &q) in blk.iter().enumerate() {
            if picks.contains(&k) {
                moved.push(order.job_at(q));
            } else {
                kept.push(order.job_at(q));
            }
        }
        (moved, kept)
    };
    let (donor_moved, donor_kept) = split(&donor_block, &witness.pick_a);
    let (receiver_moved, receiver_kept) = split(&receiver_block, &witness.pick_b);
    Some(SwapPlan {
        step,
        donor,
        receiver,
        receiver_time: donor_time - gap,
        donor_time,
        donor_block: donor_block.iter().map(|&q| order.job_at(q)).collect(),
        receiver_block: receiver_block.iter().map(|&q| order.job_at(q)).collect(),
        donor_moved,
        receiver_moved,
        donor_kept,
        receiver_kept,
    })
}

/// Every step with an admissible swap.
pub fn admissible_steps(schedule: &ProperSchedule, instance: &Instance) -> Vec<usize> {
    (0..schedule.placements().len())
        .filter(|&j| find_admissible_swap(schedule, j, instance).is_some())
        .collect()
}

/// Replaces `block` (a contiguous run of `seq`) by `first` then `second`.
fn splice(seq: &[usize], block: &[usize], first: &[usize], second: &[usize]) -> Vec<usize> {
    let start = seq
        .iter()
        .position(|&j| j == block[0])
        .expect("block belongs to the sequence");
    debug_assert_eq!(&seq[start..start + block.len()], block);
    let mut out = Vec::with_capacity(seq.len() - block.len() + first.len() + second.len());
    out.extend_from_slice(&seq[..start]);
    out.extend_from_slice(first);
    out.extend_from_slice(second);
    out.extend_from_slice(&seq[start + block.len()..]);
    out
}

/// Performs the exchange described by `plan`.
///
/// On the donor, `J_H` becomes `J_H''` followed by `J_I'`; on the receiver,
/// `J_I` becomes `J_H'` followed by `J_I''`. Other machines are untouched.
pub fn apply_swap(
    schedule: &ProperSchedule,
    plan: &SwapPlan,
    instance: &Instance,
) -> Result<SwapOutcome, SwapError> {
    if plan.step >= schedule.placements().len()
        || find_admissible_swap(schedule, plan.step, instance).as_ref() != Some(plan)
    {
        return Err(SwapError::StalePlan);
    }
    let ordered = schedule.to_ordered();
    let mut sequences = ordered.sequences().to_vec();
    sequences[plan.donor] = splice(
        &sequences[plan.donor],
        &plan.donor_block,
        &plan.donor_kept,
        &plan.receiver_moved,
    );
    sequences[plan.receiver] = splice(
        &sequences[plan.receiver],
        &plan.receiver_block,
        &plan.donor_moved,
        &plan.receiver_kept,
    );
    let intermediate = OrderedSchedule::new(sequences, ordered.discarded().to_vec());
    let result = intermediate.into_proper(instance, schedule.order())?;
    Ok(SwapOutcome {
        intermediate,
        result,
    })
}

/// Objective values around one swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapReport {
    pub before: i64,
    pub intermediate: i64,
    pub after: i64,
    /// `after ≤ intermediate ≤ before`, with the discarded set unchanged.
    pub pass: bool,
}

/// Applies the swap and compares `f(σ'') ≤ f(σ') ≤ f(σ)`.
pub fn verify_swap_optimality(
    schedule: &ProperSchedule,
    plan: &SwapPlan,
    instance: &Instance,
    objective: Objective,
) -> Result<SwapReport, SwapError> {
    let before = schedule.evaluate(instance, objective)?;
    let outcome = apply_swap(schedule, plan, instance)?;
    let intermediate = outcome.intermediate.evaluate(instance, objective)?;
    let after = outcome.result.evaluate(instance, objective)?;
    let same_discards = outcome.result.discarded_jobs() == schedule.discarded_jobs();
    Ok(SwapReport {
        before,
        intermediate,
        after,
        pass: after <= intermediate && intermediate <= before && same_discards,
    })
}

/// Completion-time relations between `σ` and `σ'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompletionLaws {
    /// `C'_j = C_j` outside `J_H ∪ J_I`.
    pub untouched_unchanged: bool,
    /// `C'_j ≤ C_j` on `J_H`.
    pub donor_block_not_later: bool,
    /// `C'_j ≥ C_j` on `J_I`.
    pub receiver_block_not_earlier: bool,
    /// `C'_j ≤ C_{j*}` on `J_H ∪ J_I`.
    pub bounded_by_pivot: bool,
    /// Every machine's final load is the same in `σ` and `σ'`.
    pub loads_conserved: bool,
    /// `Σ p_j C_j` is the same in `σ` and `σ'`.
    pub weighted_by_size_conserved: bool,
}

impl CompletionLaws {
    pub fn all_hold(&self) -> bool {
        self.untouched_unchanged
            && self.donor_block_not_later
            && self.receiver_block_not_earlier
            && self.bounded_by_pivot
            && self.loads_conserved
            && self.weighted_by_size_conserved
    }
}

pub fn check_completion_laws(
    schedule: &ProperSchedule,
    plan: &SwapPlan,
    outcome: &SwapOutcome,
    instance: &Instance,
) -> Result<CompletionLaws, SwapError> {
    let before = schedule.completion_times(instance);
    let after = outcome.intermediate.completion_times(instance)?;
    let pivot = before
        .get(schedule.order().job_at(plan.step))
        .expect("pivot is scheduled");
    let mut in_donor = vec![false; instance.len()];
    let mut in_receiver = vec![false; instance.len()];
    plan.donor_block.iter().for_each(|&j| in_donor[j] = true);
    plan.receiver_block.iter().for_each(|&j| in_receiver[j] = true);

    let mut laws = CompletionLaws {
        untouched_unchanged: true,
        donor_block_not_later: true,
        receiver_block_not_earlier: true,
        bounded_by_pivot: true,
        loads_conserved: true,
        weighted_by_size_conserved: true,
    };
    let (mut sum_before, mut sum_after) = (0i64, 0i64);
    for job in 0..instance.len() {
        let (c, c2) = (before.get(job), after.get(job));
        if let (Some(c), Some(c2)) = (c, c2) {
            let p = instance.job(job).processing;
            sum_before += p * c;
            sum_after += p * c2;
            if in_donor[job] {
                laws.donor_block_not_later &= c2 <= c;
                laws.bounded_by_pivot &= c2 <= pivot;
            } else if in_receiver[job] {
                laws.receiver_block_not_earlier &= c2 >= c;
                laws.bounded_by_pivot &= c2 <= pivot;
            } else {
                laws.untouched_unchanged &= c == c2;
            }
        } else {
            laws.untouched_unchanged &= c == c2;
        }
    }
    laws.weighted_by_size_conserved = sum_before == sum_after;
    let original = schedule.to_ordered();
    laws.loads_conserved = (0..schedule.machines()).all(|i| {
        original.machine_load(i, instance) == outcome.intermediate.machine_load(i, instance)
    });
    Ok(laws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Job;
    use crate::ordering::priority_order;

    use Placement::Machine;

    /// Unit jobs, `p_max = 1`: ten jobs with equal weight so the Smith order
    /// is the identity; jobs 1..8 on machine 1, jobs 9 and 10 on machine 2.
    fn lopsided() -> (Instance, ProperSchedule) {
        let inst = Instance::new(2, vec![Job::new(1, 1, 20); 10]).unwrap();
        let order = priority_order(&inst, Objective::WeightedCompletion);
        let mut placements = vec![Machine(0); 8];
        placements.extend([Machine(1), Machine(1)]);
        let s = ProperSchedule::new(2, order, placements).unwrap();
        (inst, s)
    }

    #[test]
    fn detects_plan_on_lopsided_schedule() {
        let (inst, s) = lopsided();
        let plan = find_admissible_swap(&s, 7, &inst).expect("admissible at step 8");
        assert_eq!((plan.donor, plan.receiver), (0, 1));
        assert_eq!((plan.receiver_time, plan.donor_time), (0, 8));
        assert_eq!(plan.donor_block, vec![6, 7]);
        assert_eq!(plan.receiver_block, vec![8, 9]);
        // Steps 4..7 also have Δ ≥ 4, earlier ones do not.
        assert_eq!(admissible_steps(&s, &inst), vec![3, 4, 5, 6, 7]);
    }

    #[test]
    fn no_plan_on_alternating_schedule() {
        let inst = Instance::new(2, vec![Job::new(1, 1, 0); 12]).unwrap();
        let order = priority_order(&inst, Objective::WeightedCompletion);
        let placements = (0..12).map(|k| Machine(k % 2)).collect();
        let s = ProperSchedule::new(2, order, placements).unwrap();
        assert!(admissible_steps(&s, &inst).is_empty());
    }

    #[test]
    fn apply_conserves_loads_and_improves() {
        let (inst, s) = lopsided();
        let plan = find_admissible_swap(&s, 7, &inst).unwrap();
        let out = apply_swap(&s, &plan, &inst).unwrap();
        assert_eq!(out.intermediate.sequences()[0], vec![0, 1, 2, 3, 4, 5, 7, 8]);
        assert_eq!(out.intermediate.sequences()[1], vec![6, 9]);
        let laws = check_completion_laws(&s, &plan, &out, &inst).unwrap();
        assert!(laws.all_hold(), "{laws:?}");
        for objective in Objective::ALL {
            let r = verify_swap_optimality(&s, &plan, &inst, objective).unwrap();
            assert!(r.pass, "{objective} {r:?}");
        }
        // w = p here, and Σ p·C is invariant under the exchange.
        let r = verify_swap_optimality(&s, &plan, &inst, Objective::WeightedCompletion).unwrap();
        assert_eq!(r.after, r.before);
    }

    #[test]
    fn stale_plan_is_rejected() {
        let (inst, s) = lopsided();
        let mut plan = find_admissible_swap(&s, 7, &inst).unwrap();
        plan.receiver_time += 1;
        assert_eq!(apply_swap(&s, &plan, &inst), Err(SwapError::StalePlan));
        let plan = find_admissible_swap(&s, 7, &inst).unwrap();
        let out = apply_swap(&s, &plan, &inst).unwrap();
        assert_eq!(apply_swap(&out.result, &plan, &inst), Err(SwapError::StalePlan));
    }
}
