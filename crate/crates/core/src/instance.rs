//! Jobs, instances, the line-oriented instance file format and a seeded
//! instance generator.
//!
//! Job indices are 0-based inside the library. Everything that is printed
//! (file errors aside, which report line numbers) uses 1-based indices.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A single job: processing time, weight and due date, all integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Job {
    pub processing: i64,
    pub weight: i64,
    pub due: i64,
}

impl Job {
    pub const fn new(processing: i64, weight: i64, due: i64) -> Self {
        Self {
            processing,
            weight,
            due,
        }
    }
}

/// The three objectives handled by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Total weighted completion time, `Σ w_j C_j`.
    WeightedCompletion,
    /// Maximum lateness, `max_j (C_j - d_j)`.
    MaxLateness,
    /// Total weight of tardy jobs, `Σ w_j U_j`.
    WeightedTardy,
}

impl Objective {
    pub const ALL: [Objective; 3] = [
        Objective::WeightedCompletion,
        Objective::MaxLateness,
        Objective::WeightedTardy,
    ];

    /// Short name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Objective::WeightedCompletion => "wct",
            Objective::MaxLateness => "lmax",
            Objective::WeightedTardy => "wtardy",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wct" => Ok(Objective::WeightedCompletion),
            "lmax" => Ok(Objective::MaxLateness),
            "wtardy" => Ok(Objective::WeightedTardy),
            other => Err(format!("unknown objective `{other}` (expected wct, lmax or wtardy)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("an instance needs at least one machine")]
    NoMachines,
    #[error("an instance needs at least one job")]
    NoJobs,
    #[error("job {}: p must be ≥ 1", .job + 1)]
    ZeroProcessing { job: usize },
    #[error("job {}: weight must be ≥ 0", .job + 1)]
    NegativeWeight { job: usize },
    #[error("job {}: due date must be ≥ 0", .job + 1)]
    NegativeDue { job: usize },
    #[error("n·P·w_max does not fit in a signed 64-bit objective value")]
    Overflow,
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing `machines <m>` header (line {line})")]
    MissingMachines { line: usize },
    #[error("machines must be ≥ 1 (line {line})")]
    ZeroMachines { line: usize },
    #[error("malformed line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("p must be ≥ 1 (line {line})")]
    ZeroProcessing { line: usize },
    #[error("no jobs in instance (line {line})")]
    NoJobs { line: usize },
    #[error("n·P·w_max overflows a 64-bit objective value (line {line})")]
    Overflow { line: usize },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match *self {
            ParseError::MissingMachines { line }
            | ParseError::ZeroMachines { line }
            | ParseError::Malformed { line, .. }
            | ParseError::ZeroProcessing { line }
            | ParseError::NoJobs { line }
            | ParseError::Overflow { line } => line,
        }
    }
}

/// A validated, immutable scheduling instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    machines: usize,
    jobs: Vec<Job>,
    total_processing: i64,
    max_processing: i64,
}

/// `n · P · w_max`, or `None` if it does not fit in an `i64`.
fn objective_scale(n: usize, total: i64, max_weight: i64) -> Option<i64> {
    let scale = (n as i128) * (total as i128) * (max_weight as i128);
    i64::try_from(scale).ok()
}

impl Instance {
    pub fn new(machines: usize, jobs: Vec<Job>) -> Result<Self, InstanceError> {
        if machines == 0 {
            return Err(InstanceError::NoMachines);
        }
        if jobs.is_empty() {
            return Err(InstanceError::NoJobs);
        }
        let mut total: i64 = 0;
        let mut max_processing = 0;
        let mut max_weight = 0;
        for (idx, job) in jobs.iter().enumerate() {
            if job.processing < 1 {
                return Err(InstanceError::ZeroProcessing { job: idx });
            }
            if job.weight < 0 {
                return Err(InstanceError::NegativeWeight { job: idx });
            }
            if job.due < 0 {
                return Err(InstanceError::NegativeDue { job: idx });
            }
            total = total
                .checked_add(job.processing)
                .ok_or(InstanceError::Overflow)?;
            max_processing = max_processing.max(job.processing);
            max_weight = max_weight.max(job.weight);
        }
        objective_scale(jobs.len(), total, max_weight).ok_or(InstanceError::Overflow)?;
        Ok(Self {
            machines,
            jobs,
            total_processing: total,
            max_processing,
        })
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, idx: usize) -> &Job {
        &self.jobs[idx]
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// `P`, the sum of all processing times.
    pub fn total_processing(&self) -> i64 {
        self.total_processing
    }

    /// `p_max`, the largest processing time.
    pub fn max_processing(&self) -> i64 {
        self.max_processing
    }

    pub fn max_weight(&self) -> i64 {
        self.jobs.iter().map(|j| j.weight).max().unwrap_or(0)
    }

    /// Canonical file form: the header and one `job` line per job, no comments.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "machines {}", self.machines)?;
        for job in &self.jobs {
            writeln!(f, "job {} {} {}", job.processing, job.weight, job.due)?;
        }
        Ok(())
    }
}

impl FromStr for Instance {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_instance(s)
    }
}

fn parse_fields<'a>(
    line: usize,
    rest: &'a str,
    expected: usize,
) -> Result<Vec<i64>, ParseError> {
    let malformed = |reason: String| ParseError::Malformed { line, reason };
    let fields: Vec<&'a str> = rest.split(' ').collect();
    if fields.len() != expected {
        return Err(malformed(format!(
            "expected {expected} single-space separated integers, found {}",
            fields.len()
        )));
    }
    fields
        .into_iter()
        .map(|field| {
            if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed(format!("`{field}` is not a nonnegative integer")));
            }
            field
                .parse::<i64>()
                .map_err(|_| malformed(format!("`{field}` is out of range")))
        })
        .collect()
}

/// Parses the instance file format.
///
/// The first non-comment line must be `machines <m>`; every following
/// non-comment line is `job <p> <w> <d>`. Lines starting with `#` are
/// comments and blank lines are skipped. Jobs keep their file order.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut machines: Option<usize> = None;
    let mut jobs = Vec::new();
    let mut total: i64 = 0;
    let mut max_weight: i64 = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.trim_end_matches('\r');
        if content.trim().is_empty() || content.trim_start().starts_with('#') {
            continue;
        }
        match machines {
            None => {
                let Some(rest) = content.strip_prefix("machines ") else {
                    return Err(ParseError::MissingMachines { line });
                };
                let m = parse_fields(line, rest, 1)?[0];
                if m == 0 {
                    return Err(ParseError::ZeroMachines { line });
                }
                let m = usize::try_from(m).map_err(|_| ParseError::Malformed {
                    line,
                    reason: "machine count out of range".to_string(),
                })?;
                machines = Some(m);
            }
            Some(_) => {
                let Some(rest) = content.strip_prefix("job ") else {
                    return Err(ParseError::Malformed {
                        line,
                        reason: "expected `job <p> <w> <d>`".to_string(),
                    });
                };
                let fields = parse_fields(line, rest, 3)?;
                let job = Job::new(fields[0], fields[1], fields[2]);
                if job.processing == 0 {
                    return Err(ParseError::ZeroProcessing { line });
                }
                total = total
                    .checked_add(job.processing)
                    .ok_or(ParseError::Overflow { line })?;
                max_weight = max_weight.max(job.weight);
                jobs.push(job);
                if objective_scale(jobs.len(), total, max_weight).is_none() {
                    return Err(ParseError::Overflow { line });
                }
            }
        }
    }

    let Some(machines) = machines else {
        return Err(ParseError::MissingMachines { line: last_line.max(1) });
    };
    if jobs.is_empty() {
        return Err(ParseError::NoJobs { line: last_line.max(1) });
    }
    // Every invariant has been checked line by line above.
    Instance::new(machines, jobs).map_err(|_| ParseError::Overflow { line: last_line })
}

/// SplitMix64 pseudo-random generator.
///
/// The state advances by the golden-ratio increment `0x9E3779B97F4A7C15`;
/// each output is the state passed through the finalizer
/// `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31`
/// (all arithmetic wrapping on 64 bits). Its output depends only on the seed,
/// which is what makes generated instances byte-identical on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub const fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound`, by rejection so there is no modulo bias.
    /// Each call consumes at least one output of the generator.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let limit = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < limit {
                return x % bound;
            }
        }
    }

    /// Uniform draw from the closed range `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        let span = (hi as i128 - lo as i128 + 1) as u64;
        lo + self.below(span) as i64
    }

    /// True with probability `num / den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }
}

/// How the generator draws due dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DueMode {
    /// Uniform in `[1, ⌈P/m⌉]`.
    Tight,
    /// Uniform in `[1, P]`.
    Loose,
    /// Every job due at `⌈P/(2m)⌉`.
    Common,
}

impl DueMode {
    pub fn name(self) -> &'static str {
        match self {
            DueMode::Tight => "tight",
            DueMode::Loose => "loose",
            DueMode::Common => "common",
        }
    }
}

impl FromStr for DueMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tight" => Ok(DueMode::Tight),
            "loose" => Ok(DueMode::Loose),
            "common" => Ok(DueMode::Common),
            other => Err(format!("unknown due mode `{other}` (expected tight, loose or common)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorParams {
    pub jobs: usize,
    pub machines: usize,
    pub max_processing: i64,
    pub max_weight: i64,
    pub due: DueMode,
    pub seed: u64,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1) / b
}

/// Draws a random instance.
///
/// One [`SplitMix64`] stream seeded with `params.seed` is consumed in this
/// order: for each job, `p` uniform in `[1, pmax]` then `w` uniform in
/// `[0, wmax]`; afterwards, for each job, its due date (tight and loose modes
/// only). The common mode draws nothing for due dates.
pub fn generate_instance(params: &GeneratorParams) -> Result<Instance, InstanceError> {
    if params.jobs == 0 {
        return Err(InstanceError::InvalidParameter("n must be ≥ 1"));
    }
    if params.machines == 0 {
        return Err(InstanceError::InvalidParameter("m must be ≥ 1"));
    }
    if params.max_processing < 1 {
        return Err(InstanceError::InvalidParameter("pmax must be ≥ 1"));
    }
    if params.max_weight < 0 {
        return Err(InstanceError::InvalidParameter("wmax must be ≥ 0"));
    }
    let mut rng = SplitMix64::new(params.seed);
    let mut drawn = Vec::with_capacity(params.jobs);
    for _ in 0..params.jobs {
        let p = rng.range(1, params.max_processing);
        let w = rng.range(0, params.max_weight);
        drawn.push((p, w));
    }
    let total = drawn
        .iter()
        .try_fold(0i64, |acc, &(p, _)| acc.checked_add(p))
        .ok_or(InstanceError::Overflow)?;
    let m = params.machines as i64;
    let jobs = drawn
        .into_iter()
        .map(|(p, w)| {
            let d = match params.due {
                DueMode::Tight => rng.range(1, ceil_div(total, m)),
                DueMode::Loose => rng.range(1, total),
                DueMode::Common => ceil_div(total, 2 * m),
            };
            Job::new(p, w, d)
        })
        .collect();
    Instance::new(params.machines, jobs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_job_instance() {
        let inst = parse_instance("machines 2\njob 2 4 5\njob 1 1 3").unwrap();
        assert_eq!(inst.machines(), 2);
        assert_eq!(inst.jobs(), &[Job::new(2, 4, 5), Job::new(1, 1, 3)]);
        assert_eq!(inst.total_processing(), 3);
        assert_eq!(inst.max_processing(), 2);
    }

    #[test]
    fn parses_minimal_instance() {
        let inst = parse_instance("machines 1\njob 1 1 1").unwrap();
        assert_eq!((inst.machines(), inst.len()), (1, 1));
        assert_eq!((inst.total_processing(), inst.max_processing()), (1, 1));
    }

    #[test]
    fn rejects_zero_processing_time() {
        let err = parse_instance("machines 2\njob 0 4 5").unwrap_err();
        assert_eq!(err, ParseError::ZeroProcessing { line: 2 });
        assert_eq!(err.to_string(), "p must be ≥ 1 (line 2)");
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# header comment\n\nmachines 3\n  # indented comment\njob 4 0 0\n\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.to_text(), "machines 3\njob 4 0 0\n");
    }

    #[test]
    fn distinct_diagnostics() {
        assert_eq!(
            parse_instance("job 1 1 1").unwrap_err(),
            ParseError::MissingMachines { line: 1 }
        );
        assert_eq!(
            parse_instance("# only comments\n").unwrap_err(),
            ParseError::MissingMachines { line: 1 }
        );
        assert_eq!(
            parse_instance("machines 2\n").unwrap_err(),
            ParseError::NoJobs { line: 1 }
        );
        assert_eq!(
            parse_instance("machines 0\njob 1 1 1").unwrap_err(),
            ParseError::ZeroMachines { line: 1 }
        );
        for bad in [
            "machines 2\njob 1 1",
            "machines 2\njob 1  1 1",
            "machines 2\njob 1 -1 1",
            "machines 2\njob 1 +1 1",
            "machines 2\njobs 1 1 1",
            "machines 2\njob 1 1 1 1",
            "machines 2\njob 1 x 1",
        ] {
            match parse_instance(bad) {
                Err(ParseError::Malformed { line: 2, .. }) => {}
                other => panic!("{bad:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn overflow_bound_is_enforced() {
        let big = i64::MAX / 4;
        let text = format!("machines 1\njob 2 1 0\njob {big} 4 0\n");
        assert_eq!(
            parse_instance(&text).unwrap_err(),
            ParseError::Overflow { line: 3 }
        );
        let jobs = vec![Job::new(3_000_000_000, 3_000_000_000, 0); 2];
        assert_eq!(Instance::new(1, jobs), Err(InstanceError::Overflow));
    }

    #[test]
    fn constructor_validates() {
        assert_eq!(Instance::new(0, vec![Job::new(1, 1, 1)]), Err(InstanceError::NoMachines));
        assert_eq!(Instance::new(1, vec![]), Err(InstanceError::NoJobs));
        assert_eq!(
            Instance::new(1, vec![Job::new(1, 1, 1), Job::new(1, -1, 1)]),
            Err(InstanceError::NegativeWeight { job: 1 })
        );
        assert!(Instance::new(1, vec![Job::new(1, 0, 0)]).is_ok());
    }

    #[test]
    fn splitmix_reference_outputs() {
        // Published first outputs of SplitMix64 seeded with 1234567.
        let mut rng = SplitMix64::new(1234567);
        let expected = [
            6457827717110365317u64,
            3203168211198807973,
            9817491932198370423,
            4593380528125082431,
            16408922859458223821,
        ];
        for want in expected {
            assert_eq!(rng.next_u64(), want);
        }
    }

    #[test]
    fn generator_singleton_ranges() {
        let params = GeneratorParams {
            jobs: 1,
            machines: 1,
            max_processing: 1,
            max_weight: 0,
            due: DueMode::Loose,
            seed: 7,
        };
        let inst = generate_instance(&params).unwrap();
        assert_eq!(inst.jobs(), &[Job::new(1, 0, 1)]);
    }

    #[test]
    fn generator_ranges_and_determinism() {
        let params = GeneratorParams {
            jobs: 5,
            machines: 2,
            max_processing: 3,
            max_weight: 3,
            due: DueMode::Tight,
            seed: 42,
        };
        let a = generate_instance(&params).unwrap();
        let b = generate_instance(&params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        let half = (a.total_processing() + 1) / 2;
        for job in a.jobs() {
            assert!((1..=3).contains(&job.processing));
            assert!((0..=3).contains(&job.weight));
            assert!((1..=half).contains(&job.due));
        }
    }

    #[test]
    fn generator_common_due_date() {
        let params = GeneratorParams {
            jobs: 9,
            machines: 3,
            max_processing: 5,
            max_weight: 2,
            due: DueMode::Common,
            seed: 3,
        };
        let inst = generate_instance(&params).unwrap();
        let d = (inst.total_processing() + 5) / 6;
        assert!(inst.jobs().iter().all(|j| j.due == d));
    }

    #[test]
    fn generator_rejects_bad_parameters() {
        let ok = GeneratorParams {
            jobs: 1,
            machines: 1,
            max_processing: 1,
            max_weight: 0,
            due: DueMode::Loose,
            seed: 0,
        };
        for bad in [
            GeneratorParams { jobs: 0, ..ok },
            GeneratorParams { machines: 0, ..ok },
            GeneratorParams { max_processing: 0, ..ok },
            GeneratorParams { max_weight: -1, ..ok },
        ] {
            assert!(matches!(
                generate_instance(&bad),
                Err(InstanceError::InvalidParameter(_))
            ));
        }
    }
}
