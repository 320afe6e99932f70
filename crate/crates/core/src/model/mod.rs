//! Problem model: tasks, agents, travel times, coalition values, schedules,
//! the discrete-time simulation kernel and the schedule validator.

mod io;
mod schedule;
mod sim;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::scalar::Scalar;

pub use io::{read_instance, read_schedule, write_instance, write_schedule, InstanceFile, ScheduleEntry};
pub use schedule::{
    derive_coalition_allocations, solution_degree, task_completed, AgentAllocation, CoalitionAllocation,
    RouteVisit, Schedule,
};
pub use sim::{step_simulation, AgentStatus, Dispatch, DispatchRecord, SimState, Simulation, StepEvents};
pub use validate::{validate_coalition_allocations, validate_schedule, TaskDelta, ValidationReport, Violation};

/// Discrete time step.
pub type Time = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// A grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Location {
    pub x: u32,
    pub y: u32,
}

impl Location {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Location) -> u64 {
        u64::from(self.x.abs_diff(other.x)) + u64::from(self.y.abs_diff(other.y))
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task<T> {
    pub id: TaskId,
    pub location: Location,
    pub workload: T,
    /// Last step at which work on the task counts.
    pub deadline: Time,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent<T> {
    pub id: AgentId,
    pub initial_location: Location,
    pub speed: T,
}

/// Distance used to derive travel times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Manhattan,
    /// Straight-line distance, rounded up together with the speed division.
    Euclidean,
}

impl Metric {
    fn distance<T: Scalar>(self, from: Location, to: Location) -> T {
        match self {
            Metric::Manhattan => T::from_u64(from.manhattan(to)).expect("distance fits scalar"),
            Metric::Euclidean => {
                let dx = T::from_u32(from.x.abs_diff(to.x)).expect("coordinate fits scalar");
                let dy = T::from_u32(from.y.abs_diff(to.y)).expect("coordinate fits scalar");
                (dx * dx + dy * dy).sqrt()
            }
        }
    }
}

/// Number of whole steps `agent` needs to move between two locations.
///
/// `ceil(distance / speed)`, zero when the locations coincide.
pub fn travel_time<T: Scalar>(metric: Metric, agent: &Agent<T>, from: Location, to: Location) -> Time {
    if from == to {
        return 0;
    }
    if metric == Metric::Manhattan && agent.speed == T::one() {
        return Time::try_from(from.manhattan(to)).unwrap_or(Time::MAX);
    }
    let steps = (metric.distance::<T>(from, to) / agent.speed).ceil();
    steps.to_u32().unwrap_or(Time::MAX)
}

/// Work per step that a coalition performs on a task.
pub trait ValueFunction<T: Scalar>: Send + Sync {
    /// Value of `coalition` (any member order) working on `task`.
    fn value(&self, coalition: &[AgentId], task: &Task<T>) -> T;

    /// `Some(r)` when the value is exactly `|C| * r` for this task.
    ///
    /// Solvers use this to replace subset enumeration with closed forms; the
    /// answers are identical either way.
    fn per_agent_rate(&self, _task: &Task<T>) -> Option<T> {
        None
    }
}

/// The default value function `u(C, v) = |C| * k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearValue<T> {
    pub coefficient: T,
}

impl<T: Scalar> ValueFunction<T> for LinearValue<T> {
    fn value(&self, coalition: &[AgentId], _task: &Task<T>) -> T {
        coalition_value(coalition.len(), self.coefficient)
    }

    fn per_agent_rate(&self, _task: &Task<T>) -> Option<T> {
        Some(self.coefficient)
    }
}

/// `coalition_size * value_coefficient`.
pub fn coalition_value<T: Scalar>(coalition_size: usize, value_coefficient: T) -> T {
    T::from_count(coalition_size) * value_coefficient
}

/// Immutable problem description.
///
/// Tasks and agents are kept sorted by id, so positional indices follow id order.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    grid_size: u32,
    value_coefficient: T,
    metric: Metric,
    tasks: Vec<Task<T>>,
    agents: Vec<Agent<T>>,
    latest_deadline: Time,
}

impl<T: Scalar> Instance<T> {
    pub fn new(
        grid_size: u32,
        value_coefficient: T,
        mut tasks: Vec<Task<T>>,
        mut agents: Vec<Agent<T>>,
    ) -> Result<Self, ModelError> {
        if grid_size == 0 {
            return Err(ModelError::EmptyGrid);
        }
        let as_f64 = |v: T| v.to_f64().unwrap_or(f64::NAN);
        if value_coefficient <= T::zero() || !value_coefficient.is_finite() {
            return Err(ModelError::BadValueCoefficient(as_f64(value_coefficient)));
        }
        tasks.sort_by_key(|t| t.id);
        agents.sort_by_key(|a| a.id);
        for pair in tasks.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(ModelError::DuplicateTask(pair[0].id));
            }
        }
        for pair in agents.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(ModelError::DuplicateAgent(pair[0].id));
            }
        }
        for t in &tasks {
            if t.workload <= T::zero() || !t.workload.is_finite() {
                return Err(ModelError::BadWorkload(t.id, as_f64(t.workload)));
            }
            let Location { x, y } = t.location;
            if x >= grid_size || y >= grid_size {
                return Err(ModelError::TaskOutOfGrid { id: t.id, x, y, grid: grid_size });
            }
        }
        for a in &agents {
            if a.speed <= T::zero() || !a.speed.is_finite() {
                return Err(ModelError::BadSpeed(a.id, as_f64(a.speed)));
            }
            let Location { x, y } = a.initial_location;
            if x >= grid_size || y >= grid_size {
                return Err(ModelError::AgentOutOfGrid { id: a.id, x, y, grid: grid_size });
            }
        }
        let latest_deadline = tasks.iter().map(|t| t.deadline).max().unwrap_or(0);
        Ok(Self { grid_size, value_coefficient, metric: Metric::Manhattan, tasks, agents, latest_deadline })
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn grid_size(&self) -> u32 {
        self.grid_size
    }

    pub fn value_coefficient(&self) -> T {
        self.value_coefficient
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn tasks(&self) -> &[Task<T>] {
        &self.tasks
    }

    pub fn agents(&self) -> &[Agent<T>] {
        &self.agents
    }

    pub fn task(&self, index: usize) -> &Task<T> {
        &self.tasks[index]
    }

    pub fn agent(&self, index: usize) -> &Agent<T> {
        &self.agents[index]
    }

    pub fn task_index(&self, id: TaskId) -> Option<usize> {
        self.tasks.binary_search_by_key(&id, |t| t.id).ok()
    }

    pub fn agent_index(&self, id: AgentId) -> Option<usize> {
        self.agents.binary_search_by_key(&id, |a| a.id).ok()
    }

    /// Latest deadline over all tasks (`0` without tasks).
    pub fn d_max(&self) -> Time {
        self.latest_deadline
    }

    /// Travel time of agent `agent` (by index) between two locations.
    pub fn travel(&self, agent: usize, from: Location, to: Location) -> Time {
        travel_time(self.metric, &self.agents[agent], from, to)
    }

    /// The default coalition value function of this instance.
    pub fn linear_value(&self) -> LinearValue<T> {
        LinearValue { coefficient: self.value_coefficient }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agent(speed: f64) -> Agent<f64> {
        Agent { id: AgentId(0), initial_location: Location::new(0, 0), speed }
    }

    #[test]
    fn travel_time_examples() {
        let m = Metric::Manhattan;
        assert_eq!(travel_time(m, &agent(1.0), Location::new(0, 0), Location::new(3, 4)), 7);
        assert_eq!(travel_time(m, &agent(1.0), Location::new(5, 5), Location::new(5, 5)), 0);
        assert_eq!(travel_time(m, &agent(0.3), Location::new(5, 5), Location::new(5, 5)), 0);
        assert_eq!(travel_time(m, &agent(2.0), Location::new(0, 0), Location::new(5, 0)), 3);
        assert_eq!(travel_time(Metric::Euclidean, &agent(1.0), Location::new(0, 0), Location::new(3, 4)), 5);
    }

    #[test]
    fn coalition_value_examples() {
        assert_eq!(coalition_value(4, 1.5_f64), 6.0);
        assert_eq!(coalition_value(0, 1.7_f64), 0.0);
        assert_eq!(coalition_value(1, 1.0_f32), 1.0);
    }

    #[test]
    fn instance_rejects_bad_input() {
        let task = |id, x, w| Task { id: TaskId(id), location: Location::new(x, 0), workload: w, deadline: 3 };
        let err = Instance::new(4, 1.0, vec![task(0, 9, 1.0)], vec![]).unwrap_err();
        assert!(matches!(err, ModelError::TaskOutOfGrid { .. }));
        let err = Instance::new(4, 1.0, vec![task(0, 0, 0.0)], vec![]).unwrap_err();
        assert!(matches!(err, ModelError::BadWorkload(..)));
        let err = Instance::new(4, 1.0, vec![task(0, 0, 1.0), task(0, 1, 1.0)], vec![]).unwrap_err();
        assert!(matches!(err, ModelError::DuplicateTask(_)));
        let err = Instance::new(4, 0.0, vec![], vec![]).unwrap_err();
        assert!(matches!(err, ModelError::BadValueCoefficient(_)));
        let bad_speed = Agent { id: AgentId(1), initial_location: Location::new(0, 0), speed: -1.0 };
        let err = Instance::new(4, 1.0, vec![], vec![bad_speed]).unwrap_err();
        assert!(matches!(err, ModelError::BadSpeed(..)));
    }

    #[test]
    fn instance_sorts_by_id_and_tracks_latest_deadline() {
        let tasks = vec![
            Task { id: TaskId(7), location: Location::new(0, 0), workload: 1.0, deadline: 4 },
            Task { id: TaskId(2), location: Location::new(1, 0), workload: 1.0, deadline: 9 },
        ];
        let inst = Instance::new(3, 1.0, tasks, vec![]).unwrap();
        assert_eq!(inst.tasks()[0].id, TaskId(2));
        assert_eq!(inst.task_index(TaskId(7)), Some(1));
        assert_eq!(inst.task_index(TaskId(3)), None);
        assert_eq!(inst.d_max(), 9);
    }
}
