//! Schedule representations and their evaluation.
//!
//! A [`ProperSchedule`] is a machine assignment per priority position; each
//! machine processes its jobs in priority order. An [`OrderedSchedule`]
//! spells out every machine's sequence explicitly and need not respect the
//! priority order.

use std::fmt;

use thiserror::Error;

use crate::instance::{Instance, Objective};
use crate::ordering::PriorityOrder;

/// Where a job goes: onto a machine (0-based) or out of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Placement {
    Machine(usize),
    Discarded,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("expected {expected} placements, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("machine {} does not exist", .machine + 1)]
    MachineOutOfRange { machine: usize },
    #[error("job {} appears more than once", .job + 1)]
    DuplicateJob { job: usize },
    #[error("job {} is missing from the schedule", .job + 1)]
    MissingJob { job: usize },
    #[error("job {} is not part of the instance", .job + 1)]
    UnknownJob { job: usize },
    #[error("job {} is discarded, which only the wtardy objective allows", .job + 1)]
    DiscardNotAllowed { job: usize },
    #[error("job {} is scheduled but late (completes at {completion}, due {due})", .job + 1)]
    LateJob { job: usize, completion: i64, due: i64 },
    #[error("schedule follows the {found:?} rule but the objective needs {wanted:?}")]
    RuleMismatch {
        found: crate::ordering::Rule,
        wanted: crate::ordering::Rule,
    },
    #[error("the schedule discards jobs")]
    HasDiscards,
}

/// Completion time per job (indexed by job), `None` for discarded jobs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionProfile {
    completion: Vec<Option<i64>>,
}

impl CompletionProfile {
    pub fn new(completion: Vec<Option<i64>>) -> Self {
        Self { completion }
    }

    pub fn get(&self, job: usize) -> Option<i64> {
        self.completion[job]
    }

    pub fn as_slice(&self) -> &[Option<i64>] {
        &self.completion
    }

    pub fn lateness(&self, job: usize, instance: &Instance) -> Option<i64> {
        self.completion[job].map(|c| c - instance.job(job).due)
    }

    /// Objective value of this profile.
    ///
    /// Discarded jobs are only legal for [`Objective::WeightedTardy`], and
    /// there every job that is kept must be on time.
    pub fn evaluate(&self, instance: &Instance, objective: Objective) -> Result<i64, ScheduleError> {
        match objective {
            Objective::WeightedCompletion => {
                let mut total = 0i64;
                for (job, c) in self.completion.iter().enumerate() {
                    let c = c.ok_or(ScheduleError::DiscardNotAllowed { job })?;
                    total += instance.job(job).weight * c;
                }
                Ok(total)
            }
            Objective::MaxLateness => {
                let mut worst = i64::MIN;
                for (job, c) in self.completion.iter().enumerate() {
                    let c = c.ok_or(ScheduleError::DiscardNotAllowed { job })?;
                    worst = worst.max(c - instance.job(job).due);
                }
                Ok(worst)
            }
            Objective::WeightedTardy => {
                let mut total = 0i64;
                for (job, c) in self.completion.iter().enumerate() {
                    let job_data = instance.job(job);
                    match *c {
                        None => total += job_data.weight,
                        Some(c) if c > job_data.due => {
                            return Err(ScheduleError::LateJob {
                                job,
                                completion: c,
                                due: job_data.due,
                            })
                        }
                        Some(_) => {}
                    }
                }
                Ok(total)
            }
        }
    }
}

/// Machine loads after every prefix of the priority order.
///
/// `loads_at(0)` is the empty prefix. Discarded jobs contribute nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceProfile {
    machines: usize,
    loads: Vec<i64>,
}

impl BalanceProfile {
    /// Number of prefixes recorded, `n + 1`.
    pub fn steps(&self) -> usize {
        self.loads.len() / self.machines
    }

    pub fn loads_at(&self, step: usize) -> &[i64] {
        &self.loads[step * self.machines..(step + 1) * self.machines]
    }

    /// `Δ_{h,i,j}`: load of `h` minus load of `i` after `step` jobs.
    pub fn delta(&self, h: usize, i: usize, step: usize) -> i64 {
        let loads = self.loads_at(step);
        loads[h] - loads[i]
    }

    /// Largest pairwise gap after `step` jobs.
    pub fn max_abs_delta_at(&self, step: usize) -> i64 {
        let loads = self.loads_at(step);
        let hi = loads.iter().copied().max().unwrap_or(0);
        let lo = loads.iter().copied().min().unwrap_or(0);
        hi - lo
    }

    pub fn max_abs_delta(&self) -> i64 {
        (0..self.steps())
            .map(|s| self.max_abs_delta_at(s))
            .max()
            .unwrap_or(0)
    }

    /// Largest `|m·load_i − Σ loads|` over machines and steps, i.e. `m` times
    /// the largest deviation from the prefix average.
    pub fn max_scaled_deviation(&self) -> i64 {
        let m = self.machines as i64;
        (0..self.steps())
            .flat_map(|s| {
                let loads = self.loads_at(s);
                let sum: i64 = loads.iter().sum();
                loads.iter().map(move |&l| (m * l - sum).abs())
            })
            .max()
            .unwrap_or(0)
    }
}

/// A machine assignment per priority position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperSchedule {
    machines: usize,
    order: PriorityOrder,
    placements: Vec<Placement>,
}

impl ProperSchedule {
    pub fn new(
        machines: usize,
        order: PriorityOrder,
        placements: Vec<Placement>,
    ) -> Result<Self, ScheduleError> {
        if placements.len() != order.len() {
            return Err(ScheduleError::LengthMismatch {
                expected: order.len(),
                got: placements.len(),
            });
        }
        for p in &placements {
            if let Placement::Machine(machine) = *p {
                if machine >= machines {
                    return Err(ScheduleError::MachineOutOfRange { machine });
                }
            }
        }
        Ok(Self {
            machines,
            order,
            placements,
        })
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn order(&self) -> &PriorityOrder {
        &self.order
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    /// Placement of the job at priority position `position`.
    pub fn placement(&self, position: usize) -> Placement {
        self.placements[position]
    }

    pub fn has_discards(&self) -> bool {
        self.placements.contains(&Placement::Discarded)
    }

    /// Jobs on `machine`, in processing order.
    pub fn machine_jobs(&self, machine: usize) -> Vec<usize> {
        self.placements
            .iter()
            .enumerate()
            .filter(|(_, p)| **p == Placement::Machine(machine))
            .map(|(pos, _)| self.order.job_at(pos))
            .collect()
    }

    /// Discarded jobs, in priority order.
    pub fn discarded_jobs(&self) -> Vec<usize> {
        self.placements
            .iter()
            .enumerate()
            .filter(|(_, p)| **p == Placement::Discarded)
            .map(|(pos, _)| self.order.job_at(pos))
            .collect()
    }

    pub fn to_ordered(&self) -> OrderedSchedule {
        OrderedSchedule {
            sequences: (0..self.machines).map(|i| self.machine_jobs(i)).collect(),
            discarded: self.discarded_jobs(),
        }
    }

    /// Completion times straight from the prefix loads: a job completes at
    /// its machine's load once it has been added.
    pub fn completion_times(&self, instance: &Instance) -> CompletionProfile {
        let mut loads = vec![0i64; self.machines];
        let mut completion = vec![None; instance.len()];
        for (pos, placement) in self.placements.iter().enumerate() {
            let job = self.order.job_at(pos);
            if let Placement::Machine(i) = *placement {
                loads[i] += instance.job(job).processing;
                completion[job] = Some(loads[i]);
            }
        }
        CompletionProfile::new(completion)
    }

    pub fn evaluate(&self, instance: &Instance, objective: Objective) -> Result<i64, ScheduleError> {
        self.completion_times(instance).evaluate(instance, objective)
    }

    pub fn balance_profile(&self, instance: &Instance) -> BalanceProfile {
        let m = self.machines;
        let mut loads = vec![0i64; m * (self.placements.len() + 1)];
        for (pos, placement) in self.placements.iter().enumerate() {
            let (done, next) = loads.split_at_mut((pos + 1) * m);
            next[..m].copy_from_slice(&done[pos * m..]);
            if let Placement::Machine(i) = *placement {
                next[i] += instance.job(self.order.job_at(pos)).processing;
            }
        }
        BalanceProfile { machines: m, loads }
    }

    pub fn final_loads(&self, instance: &Instance) -> Vec<i64> {
        let mut loads = vec![0i64; self.machines];
        for (pos, placement) in self.placements.iter().enumerate() {
            if let Placement::Machine(i) = *placement {
                loads[i] += instance.job(self.order.job_at(pos)).processing;
            }
        }
        loads
    }

    /// Levels the final loads to within `p_max` of each other.
    ///
    /// Repeatedly moves the last job of a most loaded machine to a least
    /// loaded one; the priority order then re-sorts the receiving machine.
    /// The moved job never completes later than before, so none of the
    /// regular objectives increases.
    pub fn levelize(&self, instance: &Instance, objective: Objective) -> Result<Leveled, ScheduleError> {
        if self.order.rule() != objective.rule() {
            return Err(ScheduleError::RuleMismatch {
                found: self.order.rule(),
                wanted: objective.rule(),
            });
        }
        if self.has_discards() {
            return Err(ScheduleError::HasDiscards);
        }
        let pmax = instance.max_processing();
        let mut placements = self.placements.clone();
        let mut loads = self.final_loads(instance);
        let mut moves = 0;
        loop {
            // First index wins ties on both ends.
            let (mut hi, mut lo) = (0, 0);
            for i in 1..loads.len() {
                if loads[i] > loads[hi] {
                    hi = i;
                }
                if loads[i] < loads[lo] {
                    lo = i;
                }
            }
            if loads[hi] - loads[lo] <= pmax {
                break;
            }
            let last = placements
                .iter()
                .rposition(|p| *p == Placement::Machine(hi))
                .expect("a machine above the minimum load holds a job");
            let p = instance.job(self.order.job_at(last)).processing;
            placements[last] = Placement::Machine(lo);
            loads[hi] -= p;
            loads[lo] += p;
            moves += 1;
        }
        Ok(Leveled {
            schedule: ProperSchedule {
                machines: self.machines,
                order: self.order.clone(),
                placements,
            },
            moves,
        })
    }
}

/// Result of [`ProperSchedule::levelize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leveled {
    pub schedule: ProperSchedule,
    pub moves: usize,
}

/// Explicit per-machine job sequences plus the discarded jobs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedSchedule {
    sequences: Vec<Vec<usize>>,
    discarded: Vec<usize>,
}

impl OrderedSchedule {
    pub fn new(sequences: Vec<Vec<usize>>, discarded: Vec<usize>) -> Self {
        Self {
            sequences,
            discarded,
        }
    }

    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }

    pub fn discarded(&self) -> &[usize] {
        &self.discarded
    }

    pub fn machine_load(&self, machine: usize, instance: &Instance) -> i64 {
        self.sequences[machine]
            .iter()
            .map(|&j| instance.job(j).processing)
            .sum()
    }

    /// Running prefix sums along each sequence. Every job of the instance
    /// must appear exactly once, either in a sequence or as discarded.
    pub fn completion_times(&self, instance: &Instance) -> Result<CompletionProfile, ScheduleError> {
        let n = instance.len();
        let mut seen = vec![false; n];
        let mut completion = vec![None; n];
        let mut mark = |job: usize| -> Result<(), ScheduleError> {
            if job >= n {
                return Err(ScheduleError::UnknownJob { job });
            }
            if std::mem::replace(&mut seen[job], true) {
                return Err(ScheduleError::DuplicateJob { job });
            }
            Ok(())
        };
        for seq in &self.sequences {
            let mut t = 0;
            for &job in seq {
                mark(job)?;
                t += instance.job(job).processing;
                completion[job] = Some(t);
            }
        }
        for &job in &self.discarded {
            mark(job)?;
        }
        if let Some(job) = seen.iter().position(|s| !s) {
            return Err(ScheduleError::MissingJob { job });
        }
        Ok(CompletionProfile::new(completion))
    }

    pub fn evaluate(&self, instance: &Instance, objective: Objective) -> Result<i64, ScheduleError> {
        self.completion_times(instance)?.evaluate(instance, objective)
    }

    /// Re-sorts every machine by `order`, giving a proper schedule.
    pub fn into_proper(
        &self,
        instance: &Instance,
        order: &PriorityOrder,
    ) -> Result<ProperSchedule, ScheduleError> {
        self.completion_times(instance)?;
        let positions = order.positions();
        let mut placements = vec![Placement::Discarded; instance.len()];
        for (machine, seq) in self.sequences.iter().enumerate() {
            for &job in seq {
                placements[positions[job]] = Placement::Machine(machine);
            }
        }
        ProperSchedule::new(self.sequences.len(), order.clone(), placements)
    }
}

/// Schedule listing, 1-based: `machine <i>: <jobs>` per machine, plus a
/// `discarded: <jobs>` line when `with_discarded` is set.
pub struct ScheduleListing<'a> {
    pub schedule: &'a OrderedSchedule,
    pub with_discarded: bool,
}

impl fmt::Display for ScheduleListing<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seq) in self.schedule.sequences.iter().enumerate() {
            write!(f, "machine {}:", i + 1)?;
            for job in seq {
                write!(f, " {}", job + 1)?;
            }
            writeln!(f)?;
        }
        if self.with_discarded {
            write!(f, "discarded:")?;
            for job in &self.schedule.discarded {
                write!(f, " {}", job + 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
