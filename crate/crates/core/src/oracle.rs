//! Exhaustive optimal solver for tiny instances.
//!
//! Explores every sequence of dispatch decisions the kernel admits: at each
//! step every free agent either waits or heads to an uncompleted task it can
//! reach by the deadline. Identical kernel states are memoised, and a state's
//! children stop being explored once one reaches the number of tasks that are
//! still open.

use std::collections::HashMap;
use std::time::Instant;

use crate::error::OracleError;
use crate::model::{step_simulation, AgentStatus, Dispatch, Instance, SimState, Simulation, ValueFunction};
use crate::scalar::Scalar;
use crate::solve::SolveOutcome;

/// Size guards; larger instances are refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_agents: usize,
    pub max_tasks: usize,
    pub max_deadline: u32,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_agents: 4, max_tasks: 5, max_deadline: 30 }
    }
}

impl OracleLimits {
    pub fn check<T: Scalar>(&self, instance: &Instance<T>) -> Result<(), OracleError> {
        let (agents, tasks, deadline) = (instance.agents().len(), instance.tasks().len(), instance.d_max());
        if agents > self.max_agents || tasks > self.max_tasks || deadline > self.max_deadline {
            return Err(OracleError::LimitExceeded {
                agents,
                tasks,
                deadline,
                max_agents: self.max_agents,
                max_tasks: self.max_tasks,
                max_deadline: self.max_deadline,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExactOutcome<T> {
    /// Optimal number of completed tasks.
    pub degree: usize,
    pub outcome: SolveOutcome<T>,
    /// Distinct kernel states evaluated.
    pub states: usize,
}

/// Optimal schedule with the instance's linear value function.
pub fn solve_exact<T: Scalar>(instance: &Instance<T>, limits: &OracleLimits) -> Result<ExactOutcome<T>, OracleError> {
    solve_exact_with(instance, &instance.linear_value(), limits)
}

pub fn solve_exact_with<T, V>(
    instance: &Instance<T>,
    value: &V,
    limits: &OracleLimits,
) -> Result<ExactOutcome<T>, OracleError>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    limits.check(instance)?;
    let started = Instant::now();
    let mut search = Search { instance, value, memo: HashMap::new() };
    let mut sim = Simulation::new(instance, value);
    let degree = search.best(sim.state());

    // replay the first optimal child at every step
    let mut target = degree;
    while target > 0 {
        let state = sim.state().clone();
        let mut chosen = None;
        for orders in search.children(&state) {
            let mut next = state.clone();
            let gained = step_simulation(&mut next, instance, value, &orders).expect("valid orders").completed.len();
            if gained <= target && gained + search.best(&next) == target {
                chosen = Some((orders, gained));
                break;
            }
        }
        let (orders, gained) = chosen.expect("an optimal child exists");
        sim.step(&orders).expect("valid orders");
        target -= gained;
    }

    let states = search.memo.len();
    let (schedule, state, dispatches) = sim.into_parts();
    Ok(ExactOutcome {
        degree,
        outcome: SolveOutcome { schedule, state, dispatches, interrupted: false, elapsed: started.elapsed() },
        states,
    })
}

struct Search<'a, T, V: ?Sized> {
    instance: &'a Instance<T>,
    value: &'a V,
    memo: HashMap<Vec<u64>, usize>,
}

impl<T, V> Search<'_, T, V>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    /// Tasks that could still be completed: open and not yet past their deadline.
    fn bound(&self, state: &SimState<T>) -> usize {
        self.instance
            .tasks()
            .iter()
            .enumerate()
            .filter(|(v, t)| !state.is_completed(*v) && t.deadline >= state.now)
            .count()
    }

    /// Dispatch combinations at this step, waiting first, tasks by ascending index.
    ///
    /// Everyone waiting while nobody is busy is left out: it reproduces the
    /// same position one step later with less time left.
    fn children(&self, state: &SimState<T>) -> Vec<Vec<Dispatch>> {
        let free: Vec<usize> = state.free_agents().collect();
        let options: Vec<Vec<Option<usize>>> = free
            .iter()
            .map(|&a| {
                let mut o = vec![None];
                for (v, t) in self.instance.tasks().iter().enumerate() {
                    if state.is_completed(v) {
                        continue;
                    }
                    let arrival = state.now.saturating_add(self.instance.travel(a, state.location[a], t.location));
                    if arrival <= t.deadline {
                        o.push(Some(v));
                    }
                }
                o
            })
            .collect();
        let all_free = state.all_free();
        let mut out = Vec::new();
        let mut digits = vec![0usize; free.len()];
        loop {
            let orders: Vec<Dispatch> = digits
                .iter()
                .enumerate()
                .filter_map(|(i, &d)| options[i][d].map(|task| Dispatch { agent: free[i], task }))
                .collect();
            if !(all_free && orders.is_empty()) {
                out.push(orders);
            }
            // advance the mixed-radix counter, last agent fastest
            let mut i = free.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < options[i].len() {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    fn key(&self, state: &SimState<T>) -> Vec<u64> {
        let mut k = Vec::with_capacity(1 + 2 * state.status.len() + state.done.len());
        k.push(u64::from(state.now));
        for (s, l) in state.status.iter().zip(&state.location) {
            let code = match *s {
                AgentStatus::Free => 0,
                AgentStatus::Travelling { task, arrival } => (1 << 62) | ((task as u64) << 32) | u64::from(arrival),
                AgentStatus::Working { task } => (2 << 62) | task as u64,
            };
            k.push(code);
            k.push((u64::from(l.x) << 32) | u64::from(l.y));
        }
        for (v, d) in state.done.iter().enumerate() {
            let bits = d.to_f64().unwrap_or(f64::NAN).to_bits();
            k.push(if state.is_completed(v) { u64::MAX } else { bits });
        }
        k
    }

    /// Maximum number of further completions reachable from `state`.
    fn best(&mut self, state: &SimState<T>) -> usize {
        if state.now > self.instance.d_max() {
            return 0;
        }
        let bound = self.bound(state);
        if bound == 0 {
            return 0;
        }
        let key = self.key(state);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut best = 0;
        for orders in self.children(state) {
            let mut next = state.clone();
            let gained = step_simulation(&mut next, self.instance, self.value, &orders).expect("valid orders").completed.len();
            best = best.max(gained + self.best(&next));
            if best == bound {
                break;
            }
        }
        self.memo.insert(key, best);
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Agent, AgentId, Location, Task, TaskId, Time};

    fn agent(id: u32, x: u32, y: u32) -> Agent<f64> {
        Agent { id: AgentId(id), initial_location: Location::new(x, y), speed: 1.0 }
    }

    fn task(id: u32, x: u32, y: u32, workload: f64, deadline: Time) -> Task<f64> {
        Task { id: TaskId(id), location: Location::new(x, y), workload, deadline }
    }

    #[test]
    fn zero_tasks() {
        let inst = Instance::<f64>::new(5, 1.0, vec![], vec![agent(1, 0, 0)]).unwrap();
        let out = solve_exact(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(out.degree, 0);
        assert!(out.outcome.schedule.is_empty());
    }

    #[test]
    fn single_completable_task() {
        let inst = Instance::new(5, 1.0, vec![task(0, 2, 0, 3.0, 10)], vec![agent(1, 0, 0)]).unwrap();
        let out = solve_exact(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(out.degree, 1);
        assert_eq!(out.outcome.degree(&inst), 1);
    }

    #[test]
    fn serves_the_urgent_far_task_first() {
        let inst = Instance::new(5, 1.0, vec![task(1, 1, 0, 1.0, 10), task(2, 3, 0, 1.0, 3)], vec![agent(1, 0, 0)]).unwrap();
        let out = solve_exact(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(out.degree, 2);
        let routes = out.outcome.schedule.routes();
        let order: Vec<TaskId> = routes[&AgentId(1)].iter().map(|r| r.task).collect();
        assert_eq!(order, vec![TaskId(2), TaskId(1)]);
    }

    #[test]
    fn refuses_large_instances() {
        let agents = (0..5).map(|i| agent(i, 0, 0)).collect();
        let inst = Instance::new(5, 1.0, vec![task(0, 1, 0, 1.0, 3)], agents).unwrap();
        assert!(matches!(solve_exact(&inst, &OracleLimits::default()), Err(OracleError::LimitExceeded { agents: 5, .. })));
        let inst = Instance::new(5, 1.0, vec![task(0, 1, 0, 1.0, 31)], vec![agent(1, 0, 0)]).unwrap();
        assert!(solve_exact(&inst, &OracleLimits::default()).is_err());
    }

    #[test]
    fn needs_both_agents() {
        // w = 5, d = 3: near agent works 1..3, far one 2..3
        let inst = Instance::new(5, 1.0, vec![task(0, 1, 0, 5.0, 3)], vec![agent(1, 0, 0), agent(2, 3, 0)]).unwrap();
        let out = solve_exact(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(out.degree, 1);
    }
}
