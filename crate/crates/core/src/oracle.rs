//! Exhaustive reference solver for tiny instances.
//!
//! Every assignment of the priority-ordered jobs to machines (and, for
//! weighted tardiness, to "discarded") is enumerated in mixed-radix order
//! and evaluated from scratch. Nothing is pruned or shared with the dynamic
//! programs, which is the point.

use thiserror::Error;

use crate::instance::{Instance, Objective};
use crate::ordering::priority_order;
use crate::schedule::{Placement, ProperSchedule};

/// Largest assignment space the oracle will enumerate.
pub const ENUMERATION_CAP: u64 = 10_000_000;
/// Optimal assignments retained in [`OracleResult::witnesses`].
pub const WITNESS_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{size} assignments exceed the enumeration cap of {cap}")]
    CapExceeded { size: u128, cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub value: i64,
    /// Optimal schedules in enumeration order, at most [`WITNESS_CAP`].
    pub witnesses: Vec<ProperSchedule>,
    /// More optimal assignments existed than were retained.
    pub witnesses_truncated: bool,
    /// Assignments enumerated, feasible or not.
    pub enumerated: u64,
    /// Whether some optimum keeps every prefix gap within `4·p_max²`;
    /// `None` unless requested through [`brute_force_with_balance`].
    pub balanced_witness_exists: Option<bool>,
}

/// `None` if the assignment is infeasible (a kept job is late under the
/// tardiness objective).
fn evaluate_assignment(
    jobs: &[(i64, i64, i64)],
    digits: &[usize],
    machines: usize,
    objective: Objective,
    loads: &mut [i64],
) -> Option<i64> {
    loads.iter_mut().for_each(|l| *l = 0);
    let mut value = match objective {
        Objective::MaxLateness => i64::MIN,
        _ => 0,
    };
    for (&(p, w, d), &digit) in jobs.iter().zip(digits) {
        if digit == machines {
            value += w;
            continue;
        }
        loads[digit] += p;
        let completion = loads[digit];
        match objective {
            Objective::WeightedCompletion => value += w * completion,
            Objective::MaxLateness => value = value.max(completion - d),
            Objective::WeightedTardy => {
                if completion > d {
                    return None;
                }
            }
        }
    }
    Some(value)
}

/// Largest pairwise load gap over all prefixes, discarded jobs excluded.
fn max_prefix_gap(jobs: &[(i64, i64, i64)], digits: &[usize], machines: usize, loads: &mut [i64]) -> i64 {
    loads.iter_mut().for_each(|l| *l = 0);
    let mut worst = 0;
    for (&(p, _, _), &digit) in jobs.iter().zip(digits) {
        if digit < machines {
            loads[digit] += p;
        }
        let hi = *loads.iter().max().unwrap();
        let lo = *loads.iter().min().unwrap();
        worst = worst.max(hi - lo);
    }
    worst
}

struct Enumeration {
    jobs: Vec<(i64, i64, i64)>,
    radix: usize,
    size: u64,
}

impl Enumeration {
    fn new(instance: &Instance, objective: Objective) -> Result<Self, OracleError> {
        let radix = match objective {
            Objective::WeightedTardy => instance.machines() + 1,
            _ => instance.machines(),
        };
        let size = (radix as u128).checked_pow(instance.len() as u32).unwrap_or(u128::MAX);
        if size > ENUMERATION_CAP as u128 {
            return Err(OracleError::CapExceeded {
                size,
                cap: ENUMERATION_CAP,
            });
        }
        let order = priority_order(instance, objective);
        let jobs = order
            .jobs()
            .iter()
            .map(|&j| {
                let job = instance.job(j);
                (job.processing, job.weight, job.due)
            })
            .collect();
        Ok(Self {
            jobs,
            radix,
            size: size as u64,
        })
    }

    /// Calls `visit` on every digit vector in mixed-radix order, position 0
    /// varying fastest.
    fn for_each(&self, mut visit: impl FnMut(&[usize]) -> bool) {
        let n = self.jobs.len();
        let mut digits = vec![0usize; n];
        loop {
            if !visit(&digits) {
                return;
            }
            let mut k = 0;
            while k < n {
                digits[k] += 1;
                if digits[k] < self.radix {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == n {
                return;
            }
        }
    }
}

fn to_schedule(instance: &Instance, objective: Objective, digits: &[usize]) -> ProperSchedule {
    let m = instance.machines();
    let placements = digits
        .iter()
        .map(|&d| if d == m { Placement::Discarded } else { Placement::Machine(d) })
        .collect();
    ProperSchedule::new(m, priority_order(instance, objective), placements)
        .expect("digits label existing machines")
}

pub fn brute_force(instance: &Instance, objective: Objective) -> Result<OracleResult, OracleError> {
    let en = Enumeration::new(instance, objective)?;
    let m = instance.machines();
    let mut loads = vec![0i64; m];
    let mut best: Option<i64> = None;
    let mut witnesses = Vec::new();
    let mut truncated = false;
    en.for_each(|digits| {
        if let Some(v) = evaluate_assignment(&en.jobs, digits, m, objective, &mut loads) {
            match best {
                Some(b) if v > b => {}
                Some(b) if v == b => {
                    if witnesses.len() < WITNESS_CAP {
                        witnesses.push(to_schedule(instance, objective, digits));
                    } else {
                        truncated = true;
                    }
                }
                _ => {
                    best = Some(v);
                    witnesses.clear();
                    truncated = false;
                    witnesses.push(to_schedule(instance, objective, digits));
                }
            }
        }
        true
    });
    Ok(OracleResult {
        // Discarding everything is always feasible, so some value exists.
        value: best.expect("at least one feasible assignment"),
        witnesses,
        witnesses_truncated: truncated,
        enumerated: en.size,
        balanced_witness_exists: None,
    })
}

/// True iff some optimal assignment keeps every pairwise prefix load gap
/// within `bound` (loads over kept jobs only).
pub fn balanced_optimum_exists(
    instance: &Instance,
    objective: Objective,
    bound: i64,
) -> Result<bool, OracleError> {
    let en = Enumeration::new(instance, objective)?;
    let m = instance.machines();
    let mut loads = vec![0i64; m];
    let mut best = i64::MAX;
    en.for_each(|digits| {
        if let Some(v) = evaluate_assignment(&en.jobs, digits, m, objective, &mut loads) {
            best = best.min(v);
        }
        true
    });
    let mut found = false;
    en.for_each(|digits| {
        if evaluate_assignment(&en.jobs, digits, m, objective, &mut loads) == Some(best)
            && max_prefix_gap(&en.jobs, digits, m, &mut loads) <= bound
        {
            found = true;
        }
        !found
    });
    Ok(found)
}

/// [`brute_force`] plus the balance check at the default bound `4·p_max²`.
pub fn brute_force_with_balance(
    instance: &Instance,
    objective: Objective,
) -> Result<OracleResult, OracleError> {
    let mut result = brute_force(instance, objective)?;
    let bound = 4 * instance.max_processing().pow(2);
    result.balanced_witness_exists = Some(balanced_optimum_exists(instance, objective, bound)?);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Job;

    fn inst(m: usize, jobs: &[(i64, i64, i64)]) -> Instance {
        Instance::new(m, jobs.iter().map(|&(p, w, d)| Job::new(p, w, d)).collect()).unwrap()
    }

    #[test]
    fn worked_examples() {
        let r = brute_force(&inst(2, &[(1, 1, 0), (1, 1, 0)]), Objective::WeightedCompletion).unwrap();
        assert_eq!((r.value, r.enumerated), (2, 4));
        assert_eq!(r.witnesses.len(), 2);

        let r = brute_force(&inst(1, &[(1, 0, 1), (1, 0, 2)]), Objective::MaxLateness).unwrap();
        assert_eq!(r.value, 0);

        let i = inst(2, &[(2, 1, 2), (2, 1, 2), (2, 1, 2)]);
        let r = brute_force(&i, Objective::WeightedTardy).unwrap();
        assert_eq!((r.value, r.enumerated), (1, 27));
        for w in &r.witnesses {
            assert_eq!(w.evaluate(&i, Objective::WeightedTardy), Ok(1));
        }
    }

    #[test]
    fn witnesses_match_direct_evaluation() {
        let i = inst(3, &[(3, 2, 4), (1, 5, 2), (2, 2, 3), (4, 1, 6), (2, 3, 3)]);
        for objective in Objective::ALL {
            let r = brute_force(&i, objective).unwrap();
            assert!(!r.witnesses.is_empty());
            for w in &r.witnesses {
                assert_eq!(w.evaluate(&i, objective), Ok(r.value));
            }
        }
    }

    #[test]
    fn balance_examples() {
        let units = inst(2, &[(1, 1, 2); 6]);
        for objective in Objective::ALL {
            assert!(balanced_optimum_exists(&units, objective, 1).unwrap(), "{objective}");
        }
        let single = inst(2, &[(1, 1, 1)]);
        assert!(!balanced_optimum_exists(&single, Objective::WeightedCompletion, 0).unwrap());
        let r = brute_force_with_balance(&units, Objective::MaxLateness).unwrap();
        assert_eq!(r.balanced_witness_exists, Some(true));
    }

    #[test]
    fn cap_is_enforced() {
        let big = inst(3, &[(1, 1, 1); 15]);
        assert!(matches!(
            brute_force(&big, Objective::WeightedCompletion),
            Err(OracleError::CapExceeded { .. })
        ));
        // 3^14 fits, 4^12 does not.
        let ok = inst(3, &[(1, 1, 1); 14]);
        assert!(Enumeration::new(&ok, Objective::WeightedCompletion).is_ok());
        let tardy = inst(3, &[(1, 1, 1); 12]);
        assert!(brute_force(&tardy, Objective::WeightedTardy).is_err());
    }
}
