//! Discrete-time simulation kernel.
//!
//! One call to [`step_simulation`] advances the world by one step:
//!
//! 0. dispatch orders are applied: each free agent starts travelling and
//!    arrives after its travel time (immediately for a zero-length trip);
//! 1. travelling agents whose arrival time is now reach their task and start
//!    working, unless the task is already completed or past its deadline, in
//!    which case they become free at the task location;
//! 2. every uncompleted task with a non-empty working coalition whose deadline
//!    has not passed receives one step of work, `u(C, v)`;
//! 3. tasks whose accumulated work reaches the workload complete and release
//!    their workers; tasks reaching their deadline uncompleted release theirs;
//! 4. the clock advances.

use super::{AgentAllocation, AgentId, Instance, Location, Schedule, TaskId, Time, ValueFunction};
use crate::error::KernelError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentStatus {
    Free,
    /// Heading to task `task` (instance index), reaching it at `arrival`.
    Travelling { task: usize, arrival: Time },
    Working { task: usize },
}

/// Send a free agent to a task. Both fields are instance indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dispatch {
    pub agent: usize,
    pub task: usize,
}

/// Mutable world state. Agent and task vectors follow instance index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState<T> {
    pub now: Time,
    pub status: Vec<AgentStatus>,
    pub location: Vec<Location>,
    /// Work accumulated on each task.
    pub done: Vec<T>,
    pub completed_at: Vec<Option<Time>>,
    /// Agents travelling to or working on each task.
    pub committed: Vec<u32>,
    /// Steps each agent has spent travelling.
    pub travel_steps: Vec<Time>,
    /// Last step during which any agent was travelling or working.
    pub last_busy: Option<Time>,
}

impl<T: Scalar> SimState<T> {
    pub fn new(instance: &Instance<T>) -> Self {
        let n_tasks = instance.tasks().len();
        let n_agents = instance.agents().len();
        Self {
            now: 0,
            status: vec![AgentStatus::Free; n_agents],
            location: instance.agents().iter().map(|a| a.initial_location).collect(),
            done: vec![T::zero(); n_tasks],
            completed_at: vec![None; n_tasks],
            committed: vec![0; n_tasks],
            travel_steps: vec![0; n_agents],
            last_busy: None,
        }
    }

    pub fn is_free(&self, agent: usize) -> bool {
        self.status[agent] == AgentStatus::Free
    }

    pub fn all_free(&self) -> bool {
        self.status.iter().all(|s| *s == AgentStatus::Free)
    }

    pub fn free_agents(&self) -> impl Iterator<Item = usize> + '_ {
        self.status.iter().enumerate().filter(|(_, s)| **s == AgentStatus::Free).map(|(i, _)| i)
    }

    pub fn is_completed(&self, task: usize) -> bool {
        self.completed_at[task].is_some()
    }

    pub fn all_completed(&self) -> bool {
        self.completed_at.iter().all(Option::is_some)
    }

    pub fn completed_count(&self) -> usize {
        self.completed_at.iter().filter(|c| c.is_some()).count()
    }

    /// Uncompleted and nobody travelling to or working on it.
    pub fn is_unallocated(&self, task: usize) -> bool {
        !self.is_completed(task) && self.committed[task] == 0
    }

    /// Remaining workload, negative when the last step overshot.
    pub fn remaining_workload(&self, instance: &Instance<T>, task: usize) -> T {
        instance.task(task).workload - self.done[task]
    }

    /// Agents that work on `task` during the current step if no new orders are given:
    /// those already working plus those arriving now. Ascending index order.
    pub fn working_coalition(&self, task: usize) -> Vec<usize> {
        let now = self.now;
        self.status
            .iter()
            .enumerate()
            .filter(|(_, s)| match **s {
                AgentStatus::Working { task: t } => t == task,
                AgentStatus::Travelling { task: t, arrival } => t == task && arrival <= now,
                AgentStatus::Free => false,
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// What happened during one step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepEvents {
    pub time: Time,
    /// Work performed this step, one entry per working agent.
    pub work: Vec<AgentAllocation>,
    /// Task indices completed this step.
    pub completed: Vec<usize>,
    /// Task indices that still had workers when their deadline passed uncompleted.
    pub expired: Vec<usize>,
}

/// Advances `state` by one step after applying `dispatches`.
///
/// Orders are checked before anything changes; on error the state is untouched.
pub fn step_simulation<T, V>(
    state: &mut SimState<T>,
    instance: &Instance<T>,
    value: &V,
    dispatches: &[Dispatch],
) -> Result<StepEvents, KernelError>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let mut events = StepEvents::default();
    step_into(state, instance, value, dispatches, &mut Scratch::default(), &mut events)?;
    Ok(events)
}

/// Buffers reused across steps by [`Simulation`].
#[derive(Debug, Default)]
struct Scratch {
    working: Vec<(usize, usize)>,
    members: Vec<AgentId>,
}

fn step_into<T, V>(
    state: &mut SimState<T>,
    instance: &Instance<T>,
    value: &V,
    dispatches: &[Dispatch],
    scratch: &mut Scratch,
    events: &mut StepEvents,
) -> Result<(), KernelError>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let now = state.now;
    for (i, d) in dispatches.iter().enumerate() {
        if d.agent >= state.status.len() {
            return Err(KernelError::UnknownAgent(d.agent));
        }
        if d.task >= state.done.len() {
            return Err(KernelError::UnknownTask(d.task));
        }
        let agent_id = instance.agent(d.agent).id;
        if !state.is_free(d.agent) || dispatches[..i].iter().any(|p| p.agent == d.agent) {
            return Err(KernelError::AgentBusy(agent_id));
        }
        if state.is_completed(d.task) {
            return Err(KernelError::TaskCompleted(instance.task(d.task).id));
        }
    }
    for d in dispatches {
        let travel = instance.travel(d.agent, state.location[d.agent], instance.task(d.task).location);
        state.status[d.agent] = AgentStatus::Travelling { task: d.task, arrival: now.saturating_add(travel) };
        state.committed[d.task] += 1;
    }

    if !state.all_free() {
        state.last_busy = Some(now);
    }

    // arrivals
    let working = &mut scratch.working;
    working.clear();
    for agent in 0..state.status.len() {
        match state.status[agent] {
            AgentStatus::Travelling { task, arrival } => {
                if arrival > now {
                    state.travel_steps[agent] += 1;
                    continue;
                }
                let t = instance.task(task);
                state.location[agent] = t.location;
                if state.is_completed(task) || now > t.deadline {
                    state.status[agent] = AgentStatus::Free;
                    state.committed[task] -= 1;
                } else {
                    state.status[agent] = AgentStatus::Working { task };
                    working.push((task, agent));
                }
            }
            AgentStatus::Working { task } => working.push((task, agent)),
            AgentStatus::Free => {}
        }
    }
    working.sort_unstable();

    events.time = now;
    events.work.clear();
    events.completed.clear();
    events.expired.clear();
    let members = &mut scratch.members;
    let mut start = 0;
    while start < working.len() {
        let task = working[start].0;
        let end = start + working[start..].partition_point(|(t, _)| *t == task);
        let t = instance.task(task);
        if !state.is_completed(task) && now <= t.deadline {
            members.clear();
            members.extend(working[start..end].iter().map(|(_, a)| instance.agent(*a).id));
            state.done[task] += value.value(members, t);
            events.work.extend(members.iter().map(|&a| AgentAllocation::new(a, t.id, now)));
            if T::reaches(state.done[task], t.workload) {
                state.completed_at[task] = Some(now);
                events.completed.push(task);
            } else if now >= t.deadline {
                events.expired.push(task);
            }
        }
        if state.is_completed(task) || now >= t.deadline {
            for &(_, agent) in &working[start..end] {
                state.status[agent] = AgentStatus::Free;
                state.committed[task] -= 1;
            }
        }
        start = end;
    }

    state.now = now + 1;
    Ok(())
}

/// Agents sent to one task at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DispatchRecord {
    pub time: Time,
    pub task: TaskId,
    pub agents: Vec<AgentId>,
}

/// The kernel together with the schedule and dispatch log it produces.
pub struct Simulation<'a, T, V: ?Sized> {
    instance: &'a Instance<T>,
    value: &'a V,
    state: SimState<T>,
    schedule: Schedule,
    dispatches: Vec<DispatchRecord>,
    scratch: Scratch,
    events: StepEvents,
}

impl<'a, T, V> Simulation<'a, T, V>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    pub fn new(instance: &'a Instance<T>, value: &'a V) -> Self {
        Self { instance, value, state: SimState::new(instance), schedule: Schedule::new(), dispatches: Vec::new(), scratch: Scratch::default(), events: StepEvents::default() }
    }

    pub fn instance(&self) -> &'a Instance<T> {
        self.instance
    }

    pub fn value(&self) -> &'a V {
        self.value
    }

    pub fn state(&self) -> &SimState<T> {
        &self.state
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn dispatches(&self) -> &[DispatchRecord] {
        &self.dispatches
    }

    /// Advances one step; the returned events are valid until the next call.
    pub fn step(&mut self, orders: &[Dispatch]) -> Result<&StepEvents, KernelError> {
        let now = self.state.now;
        step_into(&mut self.state, self.instance, self.value, orders, &mut self.scratch, &mut self.events)?;
        let by_task = &mut self.scratch.working;
        by_task.clear();
        by_task.extend(orders.iter().map(|d| (d.task, d.agent)));
        by_task.sort_unstable();
        let mut start = 0;
        while start < by_task.len() {
            let task = by_task[start].0;
            let end = start + by_task[start..].partition_point(|(t, _)| *t == task);
            self.dispatches.push(DispatchRecord {
                time: now,
                task: self.instance.task(task).id,
                agents: by_task[start..end].iter().map(|(_, a)| self.instance.agent(*a).id).collect(),
            });
            start = end;
        }
        for &w in &self.events.work {
            self.schedule.insert(w);
        }
        Ok(&self.events)
    }

    pub fn into_parts(self) -> (Schedule, SimState<T>, Vec<DispatchRecord>) {
        (self.schedule, self.state, self.dispatches)
    }
}
