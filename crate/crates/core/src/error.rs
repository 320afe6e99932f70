use thiserror::Error;

use crate::model::{AgentId, TaskId};

/// Errors raised while building or loading an instance.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("grid size must be positive")]
    EmptyGrid,
    #[error("value coefficient must be positive and finite, got {0}")]
    BadValueCoefficient(f64),
    #[error("task {0} has non-positive or non-finite workload {1}")]
    BadWorkload(TaskId, f64),
    #[error("agent {0} has non-positive or non-finite speed {1}")]
    BadSpeed(AgentId, f64),
    #[error("task {id} location ({x}, {y}) is outside the {grid}x{grid} grid")]
    TaskOutOfGrid { id: TaskId, x: u32, y: u32, grid: u32 },
    #[error("agent {id} location ({x}, {y}) is outside the {grid}x{grid} grid")]
    AgentOutOfGrid { id: AgentId, x: u32, y: u32, grid: u32 },
    #[error("duplicate task id {0}")]
    DuplicateTask(TaskId),
    #[error("duplicate agent id {0}")]
    DuplicateAgent(AgentId),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Misuse of the simulation kernel. Solvers never trigger these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("agent index {0} out of range")]
    UnknownAgent(usize),
    #[error("task index {0} out of range")]
    UnknownTask(usize),
    #[error("agent {0} is not free")]
    AgentBusy(AgentId),
    #[error("task {0} is already completed")]
    TaskCompleted(TaskId),
}

/// Refusal raised by the exhaustive solver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(
        "instance too large for exhaustive search: {agents} agents (max {max_agents}), \
         {tasks} tasks (max {max_tasks}), latest deadline {deadline} (max {max_deadline})"
    )]
    LimitExceeded {
        agents: usize,
        tasks: usize,
        deadline: u32,
        max_agents: usize,
        max_tasks: usize,
        max_deadline: u32,
    },
}

/// Errors raised by the benchmark harness.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}
