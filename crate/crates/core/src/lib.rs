//! Exact solvers for three identical-parallel-machine scheduling problems:
//! total weighted completion time, maximum lateness and weighted number of
//! tardy jobs.
//!
//! Each problem is solved by the textbook Lawler-Moore dynamic program
//! ([`classic`]) and by a variant that only keeps states whose machine loads
//! stay within `4·p_max²` of each other ([`pruned`]), whose layer size does
//! not grow with the number of jobs. A brute-force [`oracle`] and the
//! exchange machinery in [`swap`] and [`combinatorics`] make the balance
//! property checkable on small instances.
//!
//! ```
//! use prunesched::{parse_instance, solve, Algorithm, Objective, SolveOptions};
//!
//! let instance = parse_instance("machines 2\njob 1 1 0\njob 1 1 0\n").unwrap();
//! let sol = solve(&instance, Objective::WeightedCompletion, Algorithm::Pruned, SolveOptions::default()).unwrap();
//! assert_eq!(sol.value, 2);
//! ```

pub mod bench;
pub mod cases;
pub mod classic;
pub mod combinatorics;
pub mod dp;
pub mod instance;
pub mod oracle;
pub mod ordering;
pub mod pruned;
pub mod schedule;
pub mod swap;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use dp::{LayerStats, Solution, SolveError, SolveOptions};
pub use instance::{
    generate_instance, parse_instance, DueMode, GeneratorParams, Instance, InstanceError, Job, Objective, ParseError,
    SplitMix64,
};
pub use oracle::{OracleError, OracleResult};
pub use ordering::{priority_order, PriorityOrder, Rule};
pub use schedule::{OrderedSchedule, Placement, ProperSchedule, ScheduleError, ScheduleListing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Oracle,
    Classic,
    Pruned,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Oracle, Algorithm::Classic, Algorithm::Pruned];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Oracle => "oracle",
            Algorithm::Classic => "classic",
            Algorithm::Pruned => "pruned",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(Algorithm::Oracle),
            "classic" => Ok(Algorithm::Classic),
            "pruned" => Ok(Algorithm::Pruned),
            other => Err(format!("unknown algorithm `{other}` (expected oracle, classic or pruned)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Runs one engine. The oracle reports the number of enumerated assignments
/// as its single "layer" and returns its first optimal witness as schedule.
pub fn solve(
    instance: &Instance,
    objective: Objective,
    algorithm: Algorithm,
    options: SolveOptions,
) -> Result<Solution, Error> {
    match algorithm {
        Algorithm::Classic => Ok(classic::solve_classic(instance, objective, options)?),
        Algorithm::Pruned => Ok(pruned::solve_pruned(instance, objective, options)?),
        Algorithm::Oracle => {
            let r = oracle::brute_force(instance, objective)?;
            Ok(Solution {
                value: r.value,
                schedule: if options.reconstruct { r.witnesses.into_iter().next() } else { None },
                stats: LayerStats::new(vec![r.enumerated as usize]),
            })
        }
    }
}
