//! JSON file formats.
//!
//! Instance: `{grid_size, value_coefficient, tasks: [{id, x, y, workload, deadline}],
//! agents: [{id, x, y, speed}]}`. Schedule: `[{agent, task, time}]`.
//! Unknown fields are rejected.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Agent, AgentAllocation, AgentId, Instance, Location, Schedule, Task, TaskId, Time};
use crate::error::ModelError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct InstanceFile<T> {
    pub grid_size: u32,
    pub value_coefficient: T,
    pub tasks: Vec<TaskEntry<T>>,
    pub agents: Vec<AgentEntry<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskEntry<T> {
    pub id: u32,
    pub x: u32,
    pub y: u32,
    pub workload: T,
    pub deadline: Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct AgentEntry<T> {
    pub id: u32,
    pub x: u32,
    pub y: u32,
    #[serde(default = "unit_speed")]
    pub speed: T,
}

fn unit_speed<T: Scalar>() -> T {
    T::one()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub agent: u32,
    pub task: u32,
    pub time: Time,
}

impl<T: Scalar> From<&Instance<T>> for InstanceFile<T> {
    fn from(inst: &Instance<T>) -> Self {
        Self {
            grid_size: inst.grid_size(),
            value_coefficient: inst.value_coefficient(),
            tasks: inst
                .tasks()
                .iter()
                .map(|t| TaskEntry { id: t.id.0, x: t.location.x, y: t.location.y, workload: t.workload, deadline: t.deadline })
                .collect(),
            agents: inst
                .agents()
                .iter()
                .map(|a| AgentEntry { id: a.id.0, x: a.initial_location.x, y: a.initial_location.y, speed: a.speed })
                .collect(),
        }
    }
}

impl<T: Scalar> TryFrom<InstanceFile<T>> for Instance<T> {
    type Error = ModelError;

    fn try_from(f: InstanceFile<T>) -> Result<Self, ModelError> {
        let tasks = f
            .tasks
            .into_iter()
            .map(|t| Task { id: TaskId(t.id), location: Location::new(t.x, t.y), workload: t.workload, deadline: t.deadline })
            .collect();
        let agents = f
            .agents
            .into_iter()
            .map(|a| Agent { id: AgentId(a.id), initial_location: Location::new(a.x, a.y), speed: a.speed })
            .collect();
        Instance::new(f.grid_size, f.value_coefficient, tasks, agents)
    }
}

pub fn read_instance<T, R>(reader: R) -> Result<Instance<T>, ModelError>
where
    T: Scalar + for<'de> Deserialize<'de>,
    R: Read,
{
    let file: InstanceFile<T> = serde_json::from_reader(reader)?;
    Instance::try_from(file)
}

pub fn write_instance<T, W>(instance: &Instance<T>, writer: W) -> Result<(), ModelError>
where
    T: Scalar + Serialize,
    W: Write,
{
    serde_json::to_writer_pretty(writer, &InstanceFile::from(instance))?;
    Ok(())
}

pub fn read_schedule<R: Read>(reader: R) -> Result<Schedule, ModelError> {
    let entries: Vec<ScheduleEntry> = serde_json::from_reader(reader)?;
    Ok(Schedule::from_allocations(
        entries.into_iter().map(|e| AgentAllocation::new(AgentId(e.agent), TaskId(e.task), e.time)).collect(),
    ))
}

pub fn write_schedule<W: Write>(schedule: &Schedule, writer: W) -> Result<(), ModelError> {
    let entries: Vec<ScheduleEntry> = schedule
        .allocations()
        .iter()
        .map(|a| ScheduleEntry { agent: a.agent.0, task: a.task.0, time: a.time })
        .collect();
    serde_json::to_writer_pretty(writer, &entries)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "grid_size": 10,
        "value_coefficient": 1.5,
        "tasks": [{"id": 0, "x": 2, "y": 0, "workload": 3.0, "deadline": 10}],
        "agents": [{"id": 4, "x": 0, "y": 0, "speed": 1.0}, {"id": 5, "x": 1, "y": 1}]
    }"#;

    #[test]
    fn reads_instance_and_defaults_speed() {
        let inst: Instance<f64> = read_instance(SAMPLE.as_bytes()).unwrap();
        assert_eq!(inst.tasks().len(), 1);
        assert_eq!(inst.agents()[1].speed, 1.0);
        assert_eq!(inst.value_coefficient(), 1.5);
        let mut buf = Vec::new();
        write_instance(&inst, &mut buf).unwrap();
        let back: Instance<f64> = read_instance(buf.as_slice()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = SAMPLE.replace("\"deadline\": 10", "\"deadline\": 10, \"priority\": 2");
        assert!(matches!(read_instance::<f64, _>(bad.as_bytes()), Err(ModelError::Json(_))));
        let bad_schedule = r#"[{"agent": 1, "task": 0, "time": 3, "note": "x"}]"#;
        assert!(read_schedule(bad_schedule.as_bytes()).is_err());
    }

    #[test]
    fn schedule_round_trip() {
        let s = Schedule::from_allocations(vec![
            AgentAllocation::new(AgentId(1), TaskId(0), 3),
            AgentAllocation::new(AgentId(2), TaskId(0), 3),
        ]);
        let mut buf = Vec::new();
        write_schedule(&s, &mut buf).unwrap();
        assert_eq!(read_schedule(buf.as_slice()).unwrap(), s);
        assert!(read_schedule("[]".as_bytes()).unwrap().is_empty());
    }
}
