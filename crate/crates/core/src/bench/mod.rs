//! Random instance generation, metric computation and solver sweeps.

mod report;
mod svg;

pub use report::{machine_summary, write_aggregate_csv, write_runs_csv, write_runtime_csv, write_outputs};
pub use svg::render_chart;

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::BenchError;
use crate::model::{Agent, AgentId, Instance, Location, Task, TaskId, Time};
use crate::scalar::Scalar;
use crate::solve::{solve, Algorithm, SolveOptions, SolveOutcome};

/// Environment variable read for the sweep's worker count.
pub const THREADS_ENV: &str = "CFSTP_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub grid_size: u32,
    pub task_count: usize,
    pub agent_counts: Vec<usize>,
    /// Inclusive integer range.
    pub deadline_range: (Time, Time),
    /// Inclusive integer range.
    pub workload_range: (u32, u32),
    /// Continuous range of the per-instance value coefficient.
    pub k_range: (f64, f64),
    pub instances_per_config: usize,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        let mut agent_counts: Vec<usize> = (2..=20).step_by(2).collect();
        agent_counts.extend((25..=40).step_by(5));
        Self {
            grid_size: 50,
            task_count: 300,
            agent_counts,
            deadline_range: (5, 600),
            workload_range: (10, 50),
            k_range: (1.0, 2.0),
            instances_per_config: 100,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: &str| Err(BenchError::BadParams(msg.to_string()));
        if self.grid_size == 0 {
            return bad("grid size must be positive");
        }
        if self.deadline_range.0 > self.deadline_range.1 {
            return bad("deadline range is empty");
        }
        if self.workload_range.0 == 0 || self.workload_range.0 > self.workload_range.1 {
            return bad("workload range must be non-empty and positive");
        }
        let (k_lo, k_hi) = self.k_range;
        if !(k_lo > 0.0 && k_lo <= k_hi && k_hi.is_finite()) {
            return bad("value coefficient range must be non-empty and positive");
        }
        if self.agent_counts.contains(&0) {
            return bad("agent counts must be positive");
        }
        Ok(())
    }
}

/// Seed of the `index`-th instance of every configuration.
///
/// Independent of the agent count, so the task set is shared along a sweep.
pub fn instance_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Samples an instance: tasks first, then the value coefficient, then agents.
///
/// With a fixed seed the tasks and `k` do not depend on `agent_count`.
pub fn generate_instance<T: Scalar>(params: &GenParams, agent_count: usize, seed: u64) -> Result<Instance<T>, BenchError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = params.grid_size;
    let mut tasks = Vec::with_capacity(params.task_count);
    for id in 0..params.task_count {
        let location = Location::new(rng.gen_range(0..grid), rng.gen_range(0..grid));
        let deadline = rng.gen_range(params.deadline_range.0..=params.deadline_range.1);
        let workload = rng.gen_range(params.workload_range.0..=params.workload_range.1);
        tasks.push(Task { id: TaskId(id as u32), location, workload: T::of(f64::from(workload)), deadline });
    }
    let (k_lo, k_hi) = params.k_range;
    let k = if k_lo < k_hi { rng.gen_range(k_lo..k_hi) } else { k_lo };
    let agents = (0..agent_count)
        .map(|id| Agent {
            id: AgentId(id as u32),
            initial_location: Location::new(rng.gen_range(0..grid), rng.gen_range(0..grid)),
            speed: T::one(),
        })
        .collect();
    Ok(Instance::new(grid, T::of(k), tasks, agents)?)
}

/// The four quality metrics of one run plus its wall-clock time.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub solver: Option<Algorithm>,
    pub seed: Option<u64>,
    pub agents: usize,
    pub tasks: usize,
    pub degree: usize,
    pub completed_percent: f64,
    pub mean_agent_travel_time: f64,
    /// `None` when no task was completed.
    pub mean_task_completion_time: Option<f64>,
    pub problem_completion_time: Time,
    pub wall_clock_ms: f64,
    pub interrupted: bool,
}

impl MetricsRow {
    pub const CSV_HEADER: &'static str = "solver,seed,agents,tasks,degree,completed_percent,mean_agent_travel_time,\
mean_task_completion_time,problem_completion_time,wall_clock_ms,interrupted";

    pub fn labelled(mut self, solver: Algorithm, seed: Option<u64>) -> Self {
        self.solver = Some(solver);
        self.seed = seed;
        self
    }

    pub fn value(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::CompletedPercent => Some(self.completed_percent),
            Metric::AgentTravelTime => Some(self.mean_agent_travel_time),
            Metric::TaskCompletionTime => self.mean_task_completion_time,
            Metric::ProblemCompletionTime => Some(f64::from(self.problem_completion_time)),
            Metric::WallClockMs => Some(self.wall_clock_ms),
        }
    }

    /// One line matching [`MetricsRow::CSV_HEADER`].
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.3},{}",
            self.solver.map(Algorithm::name).unwrap_or(""),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.agents,
            self.tasks,
            self.degree,
            self.completed_percent,
            self.mean_agent_travel_time,
            self.mean_task_completion_time.map(|t| t.to_string()).unwrap_or_default(),
            self.problem_completion_time,
            self.wall_clock_ms,
            self.interrupted,
        )
    }
}

pub fn compute_metrics<T: Scalar>(instance: &Instance<T>, outcome: &SolveOutcome<T>) -> MetricsRow {
    let tasks = instance.tasks().len();
    let agents = instance.agents().len();
    let degree = outcome.degree(instance);
    let completed_percent = if tasks == 0 { 0.0 } else { 100.0 * degree as f64 / tasks as f64 };
    let travel: u64 = outcome.state.travel_steps.iter().map(|&s| u64::from(s)).sum();
    let mean_agent_travel_time = if agents == 0 { 0.0 } else { travel as f64 / agents as f64 };
    let finished: Vec<f64> = outcome.state.completed_at.iter().flatten().map(|&t| f64::from(t)).collect();
    let mean_task_completion_time =
        (!finished.is_empty()).then(|| finished.iter().sum::<f64>() / finished.len() as f64);
    MetricsRow {
        solver: None,
        seed: None,
        agents,
        tasks,
        degree,
        completed_percent,
        mean_agent_travel_time,
        mean_task_completion_time,
        problem_completion_time: outcome.state.last_busy.unwrap_or(0),
        wall_clock_ms: outcome.elapsed.as_secs_f64() * 1e3,
        interrupted: outcome.interrupted,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    CompletedPercent,
    AgentTravelTime,
    TaskCompletionTime,
    ProblemCompletionTime,
    WallClockMs,
}

impl Metric {
    /// The four solution-quality metrics, one chart each.
    pub const QUALITY: [Metric; 4] =
        [Metric::CompletedPercent, Metric::AgentTravelTime, Metric::TaskCompletionTime, Metric::ProblemCompletionTime];

    pub fn name(self) -> &'static str {
        match self {
            Metric::CompletedPercent => "completed_percent",
            Metric::AgentTravelTime => "agent_travel_time",
            Metric::TaskCompletionTime => "task_completion_time",
            Metric::ProblemCompletionTime => "problem_completion_time",
            Metric::WallClockMs => "wall_clock_ms",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::CompletedPercent => "Completed tasks (%)",
            Metric::AgentTravelTime => "Mean agent travel time",
            Metric::TaskCompletionTime => "Mean task completion time",
            Metric::ProblemCompletionTime => "Problem completion time",
            Metric::WallClockMs => "Wall-clock time (ms)",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One solver run inside a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub agents: usize,
    pub solver: Algorithm,
    /// Position of the solver in the requested list.
    pub solver_slot: usize,
    pub instance_index: usize,
    pub seed: u64,
    pub result: Result<MetricsRow, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub agents: usize,
    pub solver: Algorithm,
    pub solver_slot: usize,
    pub metric: Metric,
    /// `None` when no run produced a value.
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub params: GenParams,
    pub solvers: Vec<Algorithm>,
    /// Sorted by agent count, solver slot, instance index.
    pub runs: Vec<RunRecord>,
    pub elapsed_ms: f64,
    pub threads: usize,
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, var.sqrt()))
}

impl BenchResult {
    /// Mean and standard deviation of every metric per agent count and solver slot.
    pub fn aggregate(&self, metrics: &[Metric]) -> Vec<AggregateRow> {
        let mut rows = Vec::new();
        for &agents in &self.params.agent_counts {
            for (slot, &solver) in self.solvers.iter().enumerate() {
                let ok: Vec<&MetricsRow> = self
                    .runs
                    .iter()
                    .filter(|r| r.agents == agents && r.solver_slot == slot)
                    .filter_map(|r| r.result.as_ref().ok())
                    .collect();
                for &metric in metrics {
                    let values: Vec<f64> = ok.iter().filter_map(|m| m.value(metric)).collect();
                    let stats = mean_std(&values);
                    rows.push(AggregateRow {
                        agents,
                        solver,
                        solver_slot: slot,
                        metric,
                        mean: stats.map(|s| s.0),
                        std: stats.map(|s| s.1),
                        n: values.len(),
                    });
                }
            }
        }
        rows
    }

    fn mean_of(&self, agents: usize, solver: Algorithm, metric: Metric) -> Option<f64> {
        let values: Vec<f64> = self
            .runs
            .iter()
            .filter(|r| r.agents == agents && r.solver == solver)
            .filter_map(|r| r.result.as_ref().ok())
            .filter_map(|m| m.value(metric))
            .collect();
        mean_std(&values).map(|s| s.0)
    }

    /// Mean wall-clock of `slow` divided by that of `fast` at one agent count.
    pub fn speedup(&self, agents: usize, fast: Algorithm, slow: Algorithm) -> Option<f64> {
        let f = self.mean_of(agents, fast, Metric::WallClockMs)?;
        let s = self.mean_of(agents, slow, Metric::WallClockMs)?;
        (f > 0.0).then_some(s / f)
    }

    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.result.is_err()).count()
    }
}

/// Worker count: explicit value, else [`THREADS_ENV`], else rayon's default.
pub fn resolve_threads(explicit: Option<usize>) -> Option<usize> {
    explicit.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok())).filter(|&n| n > 0)
}

/// Generates every (agent count, instance) cell and runs each solver on it.
pub fn run_benchmark(
    params: &GenParams,
    solvers: &[Algorithm],
    options: &SolveOptions,
    threads: Option<usize>,
) -> Result<BenchResult, BenchError> {
    params.validate()?;
    let started = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = resolve_threads(threads) {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| BenchError::BadParams(e.to_string()))?;
    let cells: Vec<(usize, usize)> = params
        .agent_counts
        .iter()
        .flat_map(|&a| (0..params.instances_per_config).map(move |i| (a, i)))
        .collect();
    let mut runs: Vec<RunRecord> = pool.install(|| {
        cells
            .par_iter()
            .flat_map_iter(|&(agents, index)| {
                let seed = instance_seed(params.seed, index);
                let instance = generate_instance::<f64>(params, agents, seed).map_err(|e| e.to_string());
                solvers
                    .iter()
                    .enumerate()
                    .map(|(slot, &solver)| {
                        let result = instance.clone().and_then(|inst| {
                            solve(&inst, solver, options)
                                .map(|out| compute_metrics(&inst, &out).labelled(solver, Some(seed)))
                                .map_err(|e| e.to_string())
                        });
                        RunRecord { agents, solver, solver_slot: slot, instance_index: index, seed, result }
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    });
    let order = |a: usize| params.agent_counts.iter().position(|&x| x == a).unwrap_or(usize::MAX);
    runs.sort_by_key(|r| (order(r.agents), r.solver_slot, r.instance_index));
    Ok(BenchResult {
        params: params.clone(),
        solvers: solvers.to_vec(),
        runs,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        threads: pool.current_num_threads(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GenParams {
        GenParams { task_count: 20, agent_counts: vec![2, 4], instances_per_config: 2, ..GenParams::default() }
    }

    #[test]
    fn generator_respects_ranges_and_is_deterministic() {
        let p = small();
        let a: Instance<f64> = generate_instance(&p, 3, 11).unwrap();
        let b: Instance<f64> = generate_instance(&p, 3, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.tasks().iter().all(|t| (5..=600).contains(&t.deadline) && (10.0..=50.0).contains(&t.workload)));
        assert!((1.0..=2.0).contains(&a.value_coefficient()));
        assert!(a.agents().iter().all(|ag| ag.speed == 1.0));
        let more: Instance<f64> = generate_instance(&p, 7, 11).unwrap();
        assert_eq!(more.tasks(), a.tasks());
        assert_eq!(more.value_coefficient(), a.value_coefficient());
    }

    #[test]
    fn rejects_bad_params() {
        let p = GenParams { workload_range: (0, 3), ..small() };
        assert!(matches!(generate_instance::<f64>(&p, 1, 0), Err(BenchError::BadParams(_))));
        let p = GenParams { deadline_range: (9, 3), ..small() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn sample_std() {
        assert_eq!(mean_std(&[]), None);
        assert_eq!(mean_std(&[3.0]), Some((3.0, 0.0)));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m, 2.5);
        assert!((s - 1.290_994_448_735_805_6).abs() < 1e-12);
    }

    #[test]
    fn empty_outcome_metrics() {
        let p = GenParams { task_count: 5, ..small() };
        let inst: Instance<f64> = generate_instance(&p, 2, 1).unwrap();
        let out = SolveOutcome {
            schedule: crate::model::Schedule::new(),
            state: crate::model::SimState::new(&inst),
            dispatches: Vec::new(),
            interrupted: false,
            elapsed: std::time::Duration::ZERO,
        };
        let m = compute_metrics(&inst, &out);
        assert_eq!(m.completed_percent, 0.0);
        assert_eq!(m.mean_agent_travel_time, 0.0);
        assert_eq!(m.problem_completion_time, 0);
        assert_eq!(m.mean_task_completion_time, None);
    }

    #[test]
    fn one_instance_per_config_gives_zero_std() {
        let p = GenParams { instances_per_config: 1, ..small() };
        let r = run_benchmark(&p, &[Algorithm::Ccf], &SolveOptions::default(), Some(1)).unwrap();
        let rows = r.aggregate(&[Metric::CompletedPercent]);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|row| row.std == Some(0.0) && row.n == 1));
    }

    #[test]
    fn duplicate_solver_gives_identical_rows() {
        let r = run_benchmark(&small(), &[Algorithm::Ccf, Algorithm::Ccf], &SolveOptions::default(), Some(2)).unwrap();
        let rows = r.aggregate(&Metric::QUALITY);
        let (first, second): (Vec<_>, Vec<_>) = rows.into_iter().partition(|row| row.solver_slot == 0);
        assert_eq!(first.len(), second.len());
        for (a, b) in first.iter().zip(&second) {
            assert_eq!((a.agents, a.metric, a.mean, a.std, a.n), (b.agents, b.metric, b.mean, b.std, b.n));
        }
    }

    #[test]
    fn oracle_guard_becomes_row_error() {
        let r = run_benchmark(&small(), &[Algorithm::Exact], &SolveOptions::default(), Some(1)).unwrap();
        assert_eq!(r.failures(), r.runs.len());
        assert!(r.runs[0].result.as_ref().unwrap_err().contains("too large"));
    }
}
