//! Coalition formation with spatial and temporal constraints.
//!
//! Agents travel on a grid to tasks that each have a workload and a deadline;
//! coalitions working on a task reduce its workload by their value every step.
//! The goal is to complete as many tasks as possible.
//!
//! - [`model`]: instances, schedules, the simulation kernel and the validator.
//! - [`cfla`]: the CFLA and CFLA2 look-ahead heuristics.
//! - [`ccf`]: the CCF clustering heuristic.
//! - [`oracle`]: exhaustive optimal search for tiny instances.
//! - [`bench`]: instance generator, metrics and solver sweeps.
//!
//! Everything is generic over the work scalar ([`Scalar`], `f32` or `f64`);
//! the `*64` aliases cover the common case.

pub mod bench;
pub mod ccf;
pub mod cfla;
pub mod error;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod solve;

pub use error::{BenchError, KernelError, ModelError, OracleError};
pub use model::{
    Agent, AgentAllocation, AgentId, Instance, LinearValue, Location, Metric, Schedule, SimState, Task, TaskId, Time,
    ValidationReport, ValueFunction,
};
pub use scalar::Scalar;
pub use solve::{solve, Algorithm, SolveOptions, SolveOutcome, TieBreak};

pub type Instance64 = Instance<f64>;
pub type Instance32 = Instance<f32>;
pub type Task64 = Task<f64>;
pub type Agent64 = Agent<f64>;
pub type SimState64 = SimState<f64>;
pub type SolveOutcome64 = SolveOutcome<f64>;
pub type ValidationReport64 = ValidationReport<f64>;
