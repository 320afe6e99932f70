use std::collections::BTreeMap;

use super::{AgentId, Instance, Task, TaskId, Time, ValueFunction};
use crate::scalar::Scalar;

/// Agent `agent` works on `task` during step `time`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentAllocation {
    pub agent: AgentId,
    pub task: TaskId,
    pub time: Time,
}

impl AgentAllocation {
    pub fn new(agent: AgentId, task: TaskId, time: Time) -> Self {
        Self { agent, task, time }
    }
}

/// A coalition working on a task during one step. Always derived from agent allocations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoalitionAllocation {
    /// Members in ascending id order.
    pub coalition: Vec<AgentId>,
    pub task: TaskId,
    pub time: Time,
}

/// Groups agent allocations into one coalition allocation per `(task, time)`,
/// dropping everything after `horizon`. Output is ordered by task, then time.
pub fn derive_coalition_allocations(allocations: &[AgentAllocation], horizon: Time) -> Vec<CoalitionAllocation> {
    let mut groups: BTreeMap<(TaskId, Time), Vec<AgentId>> = BTreeMap::new();
    for a in allocations.iter().filter(|a| a.time <= horizon) {
        groups.entry((a.task, a.time)).or_default().push(a.agent);
    }
    groups
        .into_iter()
        .map(|((task, time), mut coalition)| {
            coalition.sort_unstable();
            coalition.dedup();
            CoalitionAllocation { coalition, task, time }
        })
        .collect()
}

/// A maximal run of consecutive steps an agent spends on one task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteVisit {
    pub task: TaskId,
    pub start: Time,
    pub finish: Time,
}

/// A set of agent allocations, kept sorted by `(time, task, agent)` without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    allocations: Vec<AgentAllocation>,
}

fn order_key(a: &AgentAllocation) -> (Time, TaskId, AgentId) {
    (a.time, a.task, a.agent)
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_allocations(mut allocations: Vec<AgentAllocation>) -> Self {
        allocations.sort_by_key(order_key);
        allocations.dedup();
        Self { allocations }
    }

    pub fn allocations(&self) -> &[AgentAllocation] {
        &self.allocations
    }

    pub fn len(&self) -> usize {
        self.allocations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allocations.is_empty()
    }

    /// Adds one allocation, keeping the set ordered.
    pub fn insert(&mut self, allocation: AgentAllocation) {
        match self.allocations.last() {
            Some(last) if order_key(last) < order_key(&allocation) => self.allocations.push(allocation),
            None => self.allocations.push(allocation),
            _ => {
                if let Err(pos) = self.allocations.binary_search_by_key(&order_key(&allocation), order_key) {
                    self.allocations.insert(pos, allocation);
                }
            }
        }
    }

    /// Allocations strictly before `time`.
    pub fn prefix_before(&self, time: Time) -> Schedule {
        let end = self.allocations.partition_point(|a| a.time < time);
        Schedule { allocations: self.allocations[..end].to_vec() }
    }

    pub fn coalition_allocations(&self, horizon: Time) -> Vec<CoalitionAllocation> {
        derive_coalition_allocations(&self.allocations, horizon)
    }

    /// Per-agent visits in time order.
    pub fn routes(&self) -> BTreeMap<AgentId, Vec<RouteVisit>> {
        let mut by_agent: BTreeMap<AgentId, Vec<(Time, TaskId)>> = BTreeMap::new();
        for a in &self.allocations {
            by_agent.entry(a.agent).or_default().push((a.time, a.task));
        }
        by_agent
            .into_iter()
            .map(|(agent, mut steps)| {
                steps.sort_unstable();
                let mut visits: Vec<RouteVisit> = Vec::new();
                for (time, task) in steps {
                    match visits.last_mut() {
                        Some(v) if v.task == task && v.finish + 1 == time => v.finish = time,
                        _ => visits.push(RouteVisit { task, start: time, finish: time }),
                    }
                }
                (agent, visits)
            })
            .collect()
    }

    /// Number of completed tasks under the instance's default value function.
    pub fn degree<T: Scalar>(&self, instance: &Instance<T>) -> usize {
        solution_degree(instance, &instance.linear_value(), self)
    }
}

fn completes_from_coalitions<'a, T, V>(
    task: &Task<T>,
    value: &V,
    coalitions: impl Iterator<Item = &'a CoalitionAllocation>,
) -> bool
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let mut done = T::zero();
    for c in coalitions.filter(|c| c.task == task.id && c.time <= task.deadline) {
        done += value.value(&c.coalition, task);
        if T::reaches(done, task.workload) {
            return true;
        }
    }
    false
}

/// True iff the cumulative coalition value applied to `task` up to some step no
/// later than its deadline reaches its workload.
pub fn task_completed<T, V>(task: &Task<T>, value: &V, allocations: &[AgentAllocation]) -> bool
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let own: Vec<AgentAllocation> = allocations.iter().filter(|a| a.task == task.id).copied().collect();
    let coalitions = derive_coalition_allocations(&own, task.deadline);
    completes_from_coalitions(task, value, coalitions.iter())
}

/// Number of tasks the schedule completes.
pub fn solution_degree<T, V>(instance: &Instance<T>, value: &V, schedule: &Schedule) -> usize
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let coalitions = schedule.coalition_allocations(instance.d_max());
    // ordered by task then time, so each task's coalitions form one contiguous run
    let mut degree = 0;
    let mut start = 0;
    while start < coalitions.len() {
        let id = coalitions[start].task;
        let end = start + coalitions[start..].partition_point(|c| c.task == id);
        if let Some(idx) = instance.task_index(id) {
            if completes_from_coalitions(instance.task(idx), value, coalitions[start..end].iter()) {
                degree += 1;
            }
        }
        start = end;
    }
    degree
}
