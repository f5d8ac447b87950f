//! Forward layer-by-layer dynamic programming over sparse state tables.
//!
//! Both the classic and the pruned solvers encode a state as a single `u64`
//! (mixed radix over the state coordinates) and describe transitions with a
//! callback. Layer `k` holds the states reachable after the first `k` jobs
//! in priority order; when several transitions reach the same state, the
//! smaller value wins, then the lower choice (machines before discard), then
//! the earlier parent.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::instance::{Instance, Objective};
use crate::ordering::{priority_order, PriorityOrder};
use crate::schedule::{Placement, ProperSchedule};

/// Transition label: a machine index, or [`DISCARD`].
pub type Choice = u8;
pub const DISCARD: Choice = Choice::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("{machines} machines cannot be labelled by the state encoding")]
    TooManyMachines { machines: usize },
    #[error("state space {description} cannot be indexed by 64-bit keys")]
    StateSpaceTooLarge { description: String },
    #[error("objective value overflowed at job position {position}")]
    Overflow { position: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("no feasible state survived job position {position}")]
    Infeasible { position: usize },
}

/// Options shared by the dynamic programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Keep predecessor links so an optimal schedule can be rebuilt. Without
    /// them only the current and next layer are held in memory.
    pub reconstruct: bool,
    /// Adds one unit of cost to every transition onto the first machine in
    /// the pruned solver. Exists only so verification harnesses can prove
    /// they notice a wrong solver.
    #[doc(hidden)]
    pub inject_fault: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            reconstruct: true,
            inject_fault: false,
        }
    }
}

impl SolveOptions {
    pub fn value_only() -> Self {
        Self {
            reconstruct: false,
            inject_fault: false,
        }
    }
}

/// Stored-state count per layer, layer 0 (the empty prefix) included.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LayerStats {
    counts: Vec<usize>,
}

impl LayerStats {
    pub fn new(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    pub fn per_layer(&self) -> &[usize] {
        &self.counts
    }

    pub fn peak(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Optimal value, optionally an optimal schedule, and the layer sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub value: i64,
    pub schedule: Option<ProperSchedule>,
    pub stats: LayerStats,
}

/// Collects the next layer.
pub(crate) struct LayerBuilder {
    index: FxHashMap<u64, u32>,
    keys: Vec<u64>,
    values: Vec<i64>,
    links: Vec<(u32, Choice)>,
    parent: u32,
    track: bool,
}

impl LayerBuilder {
    fn new(track: bool) -> Self {
        Self {
            index: FxHashMap::default(),
            keys: Vec::new(),
            values: Vec::new(),
            links: Vec::new(),
            parent: 0,
            track,
        }
    }

    fn clear(&mut self) {
        self.index.clear();
        self.keys.clear();
        self.values.clear();
        self.links.clear();
    }

    /// Offers `value` for state `key`, reached from the current parent by `choice`.
    #[inline]
    pub(crate) fn offer(&mut self, key: u64, value: i64, choice: Choice) {
        use std::collections::hash_map::Entry;
        match self.index.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(self.keys.len() as u32);
                self.keys.push(key);
                self.values.push(value);
                if self.track {
                    self.links.push((self.parent, choice));
                }
            }
            Entry::Occupied(slot) => {
                let at = *slot.get() as usize;
                let current = self.values[at];
                if self.track {
                    if value < current || (value == current && choice < self.links[at].1) {
                        self.values[at] = value;
                        self.links[at] = (self.parent, choice);
                    }
                } else if value < current {
                    self.values[at] = value;
                }
            }
        }
    }
}

pub(crate) struct RunOutcome {
    pub value: i64,
    /// Choice per priority position, when links were kept.
    pub choices: Option<Vec<Choice>>,
    pub stats: LayerStats,
}

/// Runs `steps` layers from a single initial state.
///
/// `expand(step, key, value, builder)` must offer every successor of a state
/// of layer `step` (successors belong to layer `step + 1`).
pub(crate) fn run_layers<F>(
    steps: usize,
    initial_key: u64,
    initial_value: i64,
    reconstruct: bool,
    mut expand: F,
) -> Result<RunOutcome, SolveError>
where
    F: FnMut(usize, u64, i64, &mut LayerBuilder) -> Result<(), SolveError>,
{
    let mut keys = vec![initial_key];
    let mut values = vec![initial_value];
    let mut history: Vec<Vec<(u32, Choice)>> = Vec::new();
    let mut counts = Vec::with_capacity(steps + 1);
    counts.push(1);
    let mut next = LayerBuilder::new(reconstruct);

    for step in 0..steps {
        next.clear();
        for (at, (&key, &value)) in keys.iter().zip(&values).enumerate() {
            next.parent = at as u32;
            expand(step, key, value, &mut next)?;
        }
        if next.keys.is_empty() {
            return Err(SolveError::Infeasible { position: step });
        }
        counts.push(next.keys.len());
        std::mem::swap(&mut keys, &mut next.keys);
        std::mem::swap(&mut values, &mut next.values);
        if reconstruct {
            history.push(std::mem::take(&mut next.links));
        }
    }

    let (best_at, &value) = values
        .iter()
        .enumerate()
        .min_by_key(|&(at, v)| (*v, at))
        .expect("non-empty final layer");
    let choices = reconstruct.then(|| {
        let mut choices = vec![0; steps];
        let mut at = best_at;
        for step in (0..steps).rev() {
            let (parent, choice) = history[step][at];
            choices[step] = choice;
            at = parent as usize;
        }
        choices
    });
    Ok(RunOutcome {
        value,
        choices,
        stats: LayerStats::new(counts),
    })
}

/// Jobs in priority order as `(p, w, d)` plus their prefix sums `P(J_j)`.
pub(crate) struct Prepared {
    pub order: PriorityOrder,
    pub jobs: Vec<(i64, i64, i64)>,
    /// `prefix[k]` is the total processing time of the first `k` jobs.
    pub prefix: Vec<i64>,
}

impl Prepared {
    pub fn new(instance: &Instance, objective: Objective) -> Result<Self, SolveError> {
        if instance.machines() > DISCARD as usize {
            return Err(SolveError::TooManyMachines {
                machines: instance.machines(),
            });
        }
        let order = priority_order(instance, objective);
        let jobs: Vec<_> = order
            .jobs()
            .iter()
            .map(|&j| {
                let job = instance.job(j);
                (job.processing, job.weight, job.due)
            })
            .collect();
        let mut prefix = Vec::with_capacity(jobs.len() + 1);
        prefix.push(0);
        for &(p, _, _) in &jobs {
            prefix.push(prefix.last().unwrap() + p);
        }
        Ok(Self {
            order,
            jobs,
            prefix,
        })
    }

    pub fn schedule(&self, machines: usize, choices: &[Choice]) -> ProperSchedule {
        let placements = choices
            .iter()
            .map(|&c| {
                if c == DISCARD {
                    Placement::Discarded
                } else {
                    Placement::Machine(c as usize)
                }
            })
            .collect();
        ProperSchedule::new(machines, self.order.clone(), placements)
            .expect("choices label existing machines")
    }
}

/// Mixed-radix codec for fixed-size integer tuples with per-coordinate
/// offsets: coordinate `k` must lie in `[-offset_k, radix_k - 1 - offset_k]`.
#[derive(Debug, Clone)]
pub(crate) struct Codec {
    offsets: Vec<i64>,
    radices: Vec<u64>,
    strides: Vec<u64>,
}

impl Codec {
    pub fn new(dims: &[(i64, u64)]) -> Result<Self, SolveError> {
        let mut strides = Vec::with_capacity(dims.len());
        let mut stride: u64 = 1;
        for &(_, radix) in dims {
            strides.push(stride);
            stride = stride
                .checked_mul(radix)
                .ok_or_else(|| SolveError::StateSpaceTooLarge {
                    description: format!("{:?}", dims.iter().map(|d| d.1).collect::<Vec<_>>()),
                })?;
        }
        Ok(Self {
            offsets: dims.iter().map(|d| d.0).collect(),
            radices: dims.iter().map(|d| d.1).collect(),
            strides,
        })
    }

    #[inline]
    pub fn decode(&self, mut key: u64, out: &mut [i64]) {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = (key % self.radices[k]) as i64 - self.offsets[k];
            key /= self.radices[k];
        }
    }

    #[inline]
    pub fn encode(&self, coords: &[i64]) -> u64 {
        coords
            .iter()
            .enumerate()
            .map(|(k, &c)| (c + self.offsets[k]) as u64 * self.strides[k])
            .sum()
    }

    #[inline]
    pub fn stride(&self, k: usize) -> u64 {
        self.strides[k]
    }
}
