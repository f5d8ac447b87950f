//! Priority orderings: Smith's rule for weighted completion time and
//! Jackson's (earliest due date) rule for lateness and tardiness.

use std::cmp::Ordering;

use crate::instance::{Instance, Job, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Non-increasing efficiency `w/p`.
    Smith,
    /// Non-decreasing due date.
    Jackson,
}

impl Objective {
    pub fn rule(self) -> Rule {
        match self {
            Objective::WeightedCompletion => Rule::Smith,
            Objective::MaxLateness | Objective::WeightedTardy => Rule::Jackson,
        }
    }
}

impl Rule {
    /// `Less` when `a` must be processed strictly before `b`, `Equal` on a tie.
    ///
    /// Efficiencies are compared by cross-multiplication, never as fractions.
    pub fn compare(self, a: &Job, b: &Job) -> Ordering {
        match self {
            Rule::Smith => {
                let lhs = a.weight as i128 * b.processing as i128;
                let rhs = b.weight as i128 * a.processing as i128;
                rhs.cmp(&lhs)
            }
            Rule::Jackson => a.due.cmp(&b.due),
        }
    }
}

/// A permutation of the jobs: position `k` holds the job processed `k`-th
/// whenever two jobs share a machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityOrder {
    rule: Rule,
    jobs: Vec<usize>,
}

impl PriorityOrder {
    pub fn rule(&self) -> Rule {
        self.rule
    }

    /// Job indices by priority position.
    pub fn jobs(&self) -> &[usize] {
        &self.jobs
    }

    pub fn job_at(&self, position: usize) -> usize {
        self.jobs[position]
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// Inverse permutation: `positions()[job]` is the job's priority position.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.jobs.len()];
        for (k, &job) in self.jobs.iter().enumerate() {
            pos[job] = k;
        }
        pos
    }

    /// The instance's jobs listed in priority order.
    pub fn sorted_jobs<'a>(&self, instance: &'a Instance) -> Vec<&'a Job> {
        self.jobs.iter().map(|&j| instance.job(j)).collect()
    }
}

/// Stable sort of the jobs by the rule the objective calls for; ties keep
/// input order.
pub fn priority_order(instance: &Instance, objective: Objective) -> PriorityOrder {
    let rule = objective.rule();
    let mut jobs: Vec<usize> = (0..instance.len()).collect();
    jobs.sort_by(|&a, &b| rule.compare(instance.job(a), instance.job(b)));
    PriorityOrder { rule, jobs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Job;

    fn instance(jobs: &[(i64, i64, i64)]) -> Instance {
        Instance::new(1, jobs.iter().map(|&(p, w, d)| Job::new(p, w, d)).collect()).unwrap()
    }

    #[test]
    fn smith_by_efficiency() {
        let inst = instance(&[(2, 4, 0), (1, 1, 0), (3, 9, 0)]);
        let order = priority_order(&inst, Objective::WeightedCompletion);
        assert_eq!(order.jobs(), &[2, 0, 1]);
        assert_eq!(order.rule(), Rule::Smith);
    }

    #[test]
    fn jackson_stable_on_ties() {
        let inst = instance(&[(1, 0, 5), (1, 0, 2), (1, 0, 2)]);
        let order = priority_order(&inst, Objective::MaxLateness);
        assert_eq!(order.jobs(), &[1, 2, 0]);
        assert_eq!(order.positions(), vec![2, 0, 1]);
        assert_eq!(priority_order(&inst, Objective::WeightedTardy).jobs(), &[1, 2, 0]);
    }

    #[test]
    fn all_tied_is_identity() {
        let inst = instance(&[(1, 1, 0), (1, 1, 0)]);
        assert_eq!(priority_order(&inst, Objective::WeightedCompletion).jobs(), &[0, 1]);
    }

    #[test]
    fn zero_weight_jobs_go_last() {
        let inst = instance(&[(3, 0, 0), (5, 1, 0), (1, 0, 0)]);
        assert_eq!(priority_order(&inst, Objective::WeightedCompletion).jobs(), &[1, 0, 2]);
    }
}
