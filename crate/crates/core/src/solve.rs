//! Options and results shared by all solvers.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::OracleError;
use crate::model::{DispatchRecord, Instance, Schedule, SimState, Time};
use crate::scalar::Scalar;
use crate::{ccf, cfla, oracle};

/// How CFLA/CFLA2 pick among tasks that share the maximal degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    SmallestId,
    /// Uniformly random among the tied tasks, from a generator seeded with this value.
    Seeded(u64),
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Wall-clock budget, checked once per simulated step.
    pub budget: Option<Duration>,
    /// Interrupt before simulating this step.
    pub stop_at: Option<Time>,
    pub tie_break: TieBreak,
}

impl SolveOptions {
    pub fn with_budget(mut self, budget: Duration) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn stop_at(mut self, step: Time) -> Self {
        self.stop_at = Some(step);
        self
    }

    pub fn tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }
}

/// Result of a solver run, complete or interrupted.
#[derive(Debug, Clone)]
pub struct SolveOutcome<T> {
    pub schedule: Schedule,
    /// Kernel state when the run stopped.
    pub state: SimState<T>,
    pub dispatches: Vec<DispatchRecord>,
    pub interrupted: bool,
    pub elapsed: Duration,
}

impl<T: Scalar> SolveOutcome<T> {
    pub fn degree(&self, instance: &Instance<T>) -> usize {
        self.schedule.degree(instance)
    }
}

/// Per-step interruption check.
pub(crate) struct Clock {
    started: Instant,
    budget: Option<Duration>,
    stop_at: Option<Time>,
}

impl Clock {
    pub(crate) fn start(options: &SolveOptions) -> Self {
        Self { started: Instant::now(), budget: options.budget, stop_at: options.stop_at }
    }

    pub(crate) fn expired(&self, now: Time) -> bool {
        self.stop_at.is_some_and(|s| now >= s) || self.budget.is_some_and(|b| self.started.elapsed() >= b)
    }

    pub(crate) fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }
}

/// Solver selector used by the command line and the benchmark harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Cfla,
    Cfla2,
    Ccf,
    Exact,
}

impl Algorithm {
    pub const HEURISTICS: [Algorithm; 3] = [Algorithm::Cfla, Algorithm::Cfla2, Algorithm::Ccf];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cfla => "cfla",
            Algorithm::Cfla2 => "cfla2",
            Algorithm::Ccf => "ccf",
            Algorithm::Exact => "exact",
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
        match s.to_ascii_lowercase().as_str() {
            "cfla" => Ok(Algorithm::Cfla),
            "cfla2" => Ok(Algorithm::Cfla2),
            "ccf" => Ok(Algorithm::Ccf),
            "exact" => Ok(Algorithm::Exact),
            other => Err(format!("unknown algorithm `{other}` (expected cfla, cfla2, ccf or exact)")),
        }
    }
}

/// Runs `algorithm` on `instance` with its default value function.
pub fn solve<T: Scalar>(
    instance: &Instance<T>,
    algorithm: Algorithm,
    options: &SolveOptions,
) -> Result<SolveOutcome<T>, OracleError> {
    Ok(match algorithm {
        Algorithm::Cfla => cfla::solve_cfla(instance, cfla::LookAheadVariant::Cfla, options),
        Algorithm::Cfla2 => cfla::solve_cfla(instance, cfla::LookAheadVariant::Cfla2, options),
        Algorithm::Ccf => ccf::solve_ccf(instance, options),
        Algorithm::Exact => oracle::solve_exact(instance, &oracle::OracleLimits::default())?.outcome,
    })
}
