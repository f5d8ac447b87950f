//! Wall-clock timing helpers behind `prunesched bench` and the scaling checks.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::dp::SolveOptions;
use crate::instance::{Instance, Objective};
use crate::{solve, Algorithm, Error as SolverError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("at least 3 repetitions are required, got {0}")]
    TooFewRepetitions(usize),
    #[error("scaling ratios need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("solver returned {first} and later {later} on the same instance")]
    Nondeterministic { first: i64, later: i64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Timed repetitions of one configuration. The warm-up run is not included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingSample {
    pub id: String,
    pub wall_times: Vec<Duration>,
    pub value: i64,
    pub peak_states: usize,
    pub total_states: usize,
}

impl TimingSample {
    pub fn repetitions(&self) -> usize {
        self.wall_times.len()
    }

    /// Lower median for even counts.
    pub fn median(&self) -> Duration {
        let mut sorted = self.wall_times.clone();
        sorted.sort();
        sorted[(sorted.len() - 1) / 2]
    }

    pub fn min(&self) -> Duration {
        self.wall_times.iter().copied().min().unwrap_or_default()
    }

    pub fn median_ms(&self) -> u128 {
        self.median().as_millis()
    }

    pub fn min_ms(&self) -> u128 {
        self.min().as_millis()
    }

    pub fn wall_times_ms(&self) -> Vec<u128> {
        self.wall_times.iter().map(Duration::as_millis).collect()
    }
}

/// Runs `run` once untimed and then `repetitions` timed times. `run` returns
/// `(value, peak, total)`; every run must report the same value.
pub fn time_runs<F>(id: impl Into<String>, repetitions: usize, mut run: F) -> Result<TimingSample, BenchError>
where
    F: FnMut() -> Result<(i64, usize, usize), BenchError>,
{
    if repetitions < 3 {
        return Err(BenchError::TooFewRepetitions(repetitions));
    }
    let (value, peak_states, total_states) = run()?;
    let mut wall_times = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        let (later, _, _) = run()?;
        wall_times.push(start.elapsed());
        if later != value {
            return Err(BenchError::Nondeterministic { first: value, later });
        }
    }
    Ok(TimingSample {
        id: id.into(),
        wall_times,
        value,
        peak_states,
        total_states,
    })
}

/// Times `algorithm` in value-only mode.
pub fn time_solver(
    instance: &Instance,
    objective: Objective,
    algorithm: Algorithm,
    repetitions: usize,
) -> Result<TimingSample, BenchError> {
    let id = format!(
        "n={} m={} pmax={} {} {}",
        instance.len(),
        instance.machines(),
        instance.max_processing(),
        objective,
        algorithm
    );
    time_runs(id, repetitions, || {
        let sol = solve(instance, objective, algorithm, SolveOptions::value_only())?;
        Ok((sol.value, sol.stats.peak(), sol.stats.total()))
    })
}

/// Ratios of consecutive median times.
pub fn scaling_ratio(samples: &[TimingSample]) -> Result<Vec<f64>, BenchError> {
    if samples.len() < 2 {
        return Err(BenchError::TooFewSamples(samples.len()));
    }
    Ok(samples
        .windows(2)
        .map(|w| {
            let lo = w[0].median().as_secs_f64().max(1e-9);
            w[1].median().as_secs_f64() / lo
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Job;
    use std::thread::sleep;

    fn sample(ms: &[u64]) -> TimingSample {
        TimingSample {
            id: "x".into(),
            wall_times: ms.iter().map(|&m| Duration::from_millis(m)).collect(),
            value: 0,
            peak_states: 1,
            total_states: 1,
        }
    }

    #[test]
    fn order_statistics() {
        let s = sample(&[9, 3, 5, 7]);
        assert_eq!((s.min_ms(), s.median_ms()), (3, 5));
        assert!(s.min() <= s.median());
        assert_eq!(s.wall_times_ms(), vec![9, 3, 5, 7]);
    }

    #[test]
    fn warm_up_is_excluded() {
        let mut calls = 0;
        let s = time_runs("c", 3, || {
            calls += 1;
            Ok((4, 1, 1))
        })
        .unwrap();
        assert_eq!((calls, s.repetitions(), s.value), (4, 3, 4));
        assert!(matches!(time_runs("c", 2, || Ok((0, 0, 0))), Err(BenchError::TooFewRepetitions(2))));
    }

    #[test]
    fn drifting_values_are_rejected() {
        let mut v = 0;
        let r = time_runs("d", 3, || {
            v += 1;
            Ok((v, 0, 0))
        });
        assert!(matches!(r, Err(BenchError::Nondeterministic { .. })));
    }

    #[test]
    fn dummy_solver_ratios() {
        let flat: Vec<_> = (0..2)
            .map(|_| time_runs("flat", 3, || {
                sleep(Duration::from_millis(20));
                Ok((0, 0, 0))
            }))
            .collect::<Result<_, _>>()
            .unwrap();
        let r = scaling_ratio(&flat).unwrap();
        assert!((0.7..1.4).contains(&r[0]), "{r:?}");

        let linear: Vec<_> = [15u64, 30]
            .iter()
            .map(|&ms| time_runs("lin", 3, || {
                sleep(Duration::from_millis(ms));
                Ok((0, 0, 0))
            }))
            .collect::<Result<_, _>>()
            .unwrap();
        let r = scaling_ratio(&linear).unwrap();
        assert!((1.5..2.6).contains(&r[0]), "{r:?}");

        assert!(scaling_ratio(&flat[..1]).is_err());
    }

    #[test]
    fn timing_does_not_change_values() {
        let i = Instance::new(2, vec![Job::new(3, 2, 4), Job::new(1, 1, 2), Job::new(2, 5, 3)]).unwrap();
        for objective in Objective::ALL {
            let before = solve(&i, objective, Algorithm::Pruned, SolveOptions::default()).unwrap();
            let t = time_solver(&i, objective, Algorithm::Pruned, 3).unwrap();
            assert_eq!(t.value, before.value);
            assert_eq!(t.peak_states, before.stats.peak());
        }
    }
}
