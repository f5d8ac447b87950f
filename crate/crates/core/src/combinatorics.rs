//! Equal-sum submultisets by the greedy pigeonhole construction.
//!
//! Given two lists with entries in `1..=U` and at least `2U` entries each,
//! the greedy walk below always finds non-empty selections from both lists
//! with the same sum.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EqualSumError {
    #[error("bound U must be ≥ 1")]
    ZeroBound,
    #[error("list {list} has {len} elements, need at least 2U = {needed}")]
    TooShort {
        list: char,
        len: usize,
        needed: usize,
    },
    #[error("list {list} element {value} at index {index} lies outside [1, {bound}]")]
    OutOfRange {
        list: char,
        index: usize,
        value: i64,
        bound: i64,
    },
}

/// Index sets into the two input lists whose selected elements share `sum`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualSumWitness {
    pub pick_a: Vec<usize>,
    pub pick_b: Vec<usize>,
    pub sum: i64,
}

impl EqualSumWitness {
    /// Checks the witness against the lists it was built from.
    pub fn is_valid_for(&self, a: &[i64], b: &[i64]) -> bool {
        let strictly_increasing = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        let total = |xs: &[i64], picks: &[usize]| -> Option<i64> {
            picks.iter().map(|&k| xs.get(k).copied()).sum()
        };
        !self.pick_a.is_empty()
            && !self.pick_b.is_empty()
            && strictly_increasing(&self.pick_a)
            && strictly_increasing(&self.pick_b)
            && total(a, &self.pick_a) == Some(self.sum)
            && total(b, &self.pick_b) == Some(self.sum)
    }
}

/// One step of the greedy walk: which list grew and the running
/// difference `Σ(A_i) − Σ(B_i)` afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyStep {
    pub took_from_a: bool,
    pub index: usize,
    pub difference: i64,
}

fn check_inputs(a: &[i64], b: &[i64], bound: i64) -> Result<usize, EqualSumError> {
    if bound < 1 {
        return Err(EqualSumError::ZeroBound);
    }
    let needed = 2 * bound as usize;
    for (list, xs) in [('A', a), ('B', b)] {
        if xs.len() < needed {
            return Err(EqualSumError::TooShort {
                list,
                len: xs.len(),
                needed,
            });
        }
        if let Some((index, &value)) = xs.iter().enumerate().find(|(_, &v)| !(1..=bound).contains(&v)) {
            return Err(EqualSumError::OutOfRange {
                list,
                index,
                value,
                bound,
            });
        }
    }
    Ok(needed)
}

/// The `2U` greedy steps: take the next element of `a` while
/// `Σ(A) ≤ Σ(B)`, otherwise the next element of `b`. Every recorded
/// difference lies in `(−U, U]`.
pub fn greedy_walk(a: &[i64], b: &[i64], bound: i64) -> Result<Vec<GreedyStep>, EqualSumError> {
    let steps = check_inputs(a, b, bound)?;
    let (mut next_a, mut next_b, mut difference) = (0, 0, 0i64);
    let mut walk = Vec::with_capacity(steps);
    for _ in 0..steps {
        let step = if difference <= 0 {
            difference += a[next_a];
            next_a += 1;
            GreedyStep {
                took_from_a: true,
                index: next_a - 1,
                difference,
            }
        } else {
            difference -= b[next_b];
            next_b += 1;
            GreedyStep {
                took_from_a: false,
                index: next_b - 1,
                difference,
            }
        };
        walk.push(step);
    }
    Ok(walk)
}

/// Finds non-empty equal-sum selections from the first `2U` entries of `a`
/// and `b`.
///
/// The greedy walk produces `2U + 1` prefix differences (counting the empty
/// prefix) in a range of only `2U` values, so two prefixes `i < j` share a
/// difference; the elements taken between them form the witness. The pair
/// with the smallest `j`, then the smallest `i`, is returned.
pub fn equal_sum_submultisets(
    a: &[i64],
    b: &[i64],
    bound: i64,
) -> Result<EqualSumWitness, EqualSumError> {
    let walk = greedy_walk(a, b, bound)?;
    let mut first_seen: HashMap<i64, usize> = HashMap::with_capacity(walk.len() + 1);
    first_seen.insert(0, 0);
    for (k, step) in walk.iter().enumerate() {
        let j = k + 1;
        if let Some(&i) = first_seen.get(&step.difference) {
            let (mut pick_a, mut pick_b) = (Vec::new(), Vec::new());
            for s in &walk[i..j] {
                if s.took_from_a {
                    pick_a.push(s.index);
                } else {
                    pick_b.push(s.index);
                }
            }
            let sum = pick_a.iter().map(|&x| a[x]).sum();
            return Ok(EqualSumWitness { pick_a, pick_b, sum });
        }
        first_seen.insert(step.difference, j);
    }
    unreachable!("2U + 1 prefix differences in a range of 2U values must collide")
}
