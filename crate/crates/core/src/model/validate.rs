//! Independent feasibility check of schedules.
//!
//! Feasible means: one coalition per task per step, no agent on two tasks at
//! different locations in the same step, and every visit starts no earlier than
//! the agent can get there. Task completion is reported per task but does not
//! make a schedule infeasible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{
    AgentAllocation, AgentId, CoalitionAllocation, Instance, Schedule, TaskId, Time, ValueFunction,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub task: Option<TaskId>,
    pub agent: Option<AgentId>,
    pub time: Option<Time>,
    pub description: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sep = "";
        if let Some(t) = self.time {
            write!(f, "t={t}")?;
            sep = " ";
        }
        if let Some(a) = self.agent {
            write!(f, "{sep}{a}")?;
            sep = " ";
        }
        if let Some(v) = self.task {
            write!(f, "{sep}{v}")?;
            sep = " ";
        }
        let colon = if sep.is_empty() { "" } else { ": " };
        write!(f, "{colon}{}", self.description)
    }
}

/// Completion status of one task under the checked schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDelta<T> {
    pub task: TaskId,
    /// Work accumulated up to the deadline.
    pub work: T,
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport<T> {
    pub structural_violations: Vec<Violation>,
    pub spatial_violations: Vec<Violation>,
    pub temporal_notes: Vec<TaskDelta<T>>,
}

impl<T> ValidationReport<T> {
    pub fn is_feasible(&self) -> bool {
        self.structural_violations.is_empty() && self.spatial_violations.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.temporal_notes.iter().filter(|d| d.completed).count()
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.structural_violations.iter().chain(&self.spatial_violations)
    }
}

fn violation(task: Option<TaskId>, agent: Option<AgentId>, time: Option<Time>, description: String) -> Violation {
    Violation { task, agent, time, description }
}

/// Checks a schedule. Its coalition allocations are derived, so only the
/// agent-level constraints can actually fail here.
pub fn validate_schedule<T, V>(instance: &Instance<T>, value: &V, schedule: &Schedule) -> ValidationReport<T>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    validate_coalition_allocations(instance, value, &schedule.coalition_allocations(Time::MAX))
}

/// Checks an arbitrary list of coalition allocations, as authored.
pub fn validate_coalition_allocations<T, V>(
    instance: &Instance<T>,
    value: &V,
    coalitions: &[CoalitionAllocation],
) -> ValidationReport<T>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let mut report = ValidationReport {
        structural_violations: Vec::new(),
        spatial_violations: Vec::new(),
        temporal_notes: Vec::new(),
    };

    // structural: ids, deadlines, one coalition per task and step
    let mut per_slot: BTreeMap<(TaskId, Time), BTreeSet<Vec<AgentId>>> = BTreeMap::new();
    let mut flat: BTreeSet<AgentAllocation> = BTreeSet::new();
    for c in coalitions {
        let mut members = c.coalition.clone();
        members.sort_unstable();
        members.dedup();
        let task = instance.task_index(c.task).map(|i| instance.task(i));
        match task {
            None => report.structural_violations.push(violation(
                Some(c.task),
                None,
                Some(c.time),
                "unknown task".to_string(),
            )),
            Some(t) if c.time > t.deadline => report.structural_violations.push(violation(
                Some(c.task),
                None,
                Some(c.time),
                format!("allocation after deadline {}", t.deadline),
            )),
            Some(_) => {}
        }
        if members.is_empty() {
            report.structural_violations.push(violation(Some(c.task), None, Some(c.time), "empty coalition".to_string()));
        }
        for &a in &members {
            if instance.agent_index(a).is_none() {
                report.structural_violations.push(violation(Some(c.task), Some(a), Some(c.time), "unknown agent".to_string()));
            }
        }
        if task.is_some() {
            for &a in members.iter().filter(|a| instance.agent_index(**a).is_some()) {
                flat.insert(AgentAllocation::new(a, c.task, c.time));
            }
        }
        per_slot.entry((c.task, c.time)).or_default().insert(members);
    }
    for ((task, time), distinct) in &per_slot {
        if distinct.len() > 1 {
            let listed: Vec<String> = distinct
                .iter()
                .map(|c| format!("{{{}}}", c.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
                .collect();
            report.structural_violations.push(violation(
                Some(*task),
                None,
                Some(*time),
                format!("{} distinct coalitions allocated: {}", distinct.len(), listed.join(" ")),
            ));
        }
    }

    // spatial: only allocations with known agent and task reach this point
    let allocations: Vec<AgentAllocation> = flat.into_iter().collect();
    let location_of = |task: TaskId| instance.task(instance.task_index(task).expect("known task")).location;

    let mut by_agent_time: BTreeMap<(AgentId, Time), Vec<TaskId>> = BTreeMap::new();
    for a in &allocations {
        by_agent_time.entry((a.agent, a.time)).or_default().push(a.task);
    }
    for ((agent, time), tasks) in &by_agent_time {
        let locations: BTreeSet<(u32, u32)> = tasks.iter().map(|&t| {
            let l = location_of(t);
            (l.x, l.y)
        }).collect();
        if locations.len() > 1 {
            report.spatial_violations.push(violation(
                None,
                Some(*agent),
                Some(*time),
                format!("allocated to tasks at {} different locations in the same step", locations.len()),
            ));
        }
    }

    let schedule = Schedule::from_allocations(allocations.clone());
    for (agent, visits) in schedule.routes() {
        let idx = instance.agent_index(agent).expect("known agent");
        let initial = instance.agent(idx).initial_location;
        if let Some(first) = visits.first() {
            let reach = instance.travel(idx, initial, location_of(first.task));
            if first.start < reach {
                report.spatial_violations.push(violation(
                    Some(first.task),
                    Some(agent),
                    Some(first.start),
                    format!("starts at {} but needs {} steps from its initial location", first.start, reach),
                ));
            }
        }
        for pair in visits.windows(2) {
            let (prev, next) = (pair[0], pair[1]);
            let (from, to) = (location_of(prev.task), location_of(next.task));
            if from == to || next.start <= prev.finish {
                continue;
            }
            let gap = instance.travel(idx, from, to);
            if prev.finish.saturating_add(gap) > next.start {
                report.spatial_violations.push(violation(
                    Some(next.task),
                    Some(agent),
                    Some(next.start),
                    format!(
                        "finishes {} at {} and needs {} steps to travel, but starts {} at {}",
                        prev.task, prev.finish, gap, next.task, next.start
                    ),
                ));
            }
        }
    }

    // temporal: cumulative work per task up to its deadline
    let coalitions = schedule.coalition_allocations(instance.d_max());
    for task in instance.tasks() {
        let mut work = T::zero();
        let mut completed = false;
        for c in coalitions.iter().filter(|c| c.task == task.id && c.time <= task.deadline) {
            work += value.value(&c.coalition, task);
            completed |= T::reaches(work, task.workload);
        }
        report.temporal_notes.push(TaskDelta { task: task.id, work, completed });
    }

    report
}
