#![allow(dead_code)]

use cfstp::bench::{generate_instance, GenParams};
use cfstp::model::{Agent, AgentId, Instance, Location, Task, TaskId, Time, ValueFunction};
use cfstp::{Instance64, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn task(id: u32, x: u32, y: u32, workload: f64, deadline: Time) -> Task<f64> {
    Task { id: TaskId(id), location: Location::new(x, y), workload, deadline }
}

pub fn agent(id: u32, x: u32, y: u32) -> Agent<f64> {
    Agent { id: AgentId(id), initial_location: Location::new(x, y), speed: 1.0 }
}

/// Agent at the origin, v1 one step away due at 10, v2 three steps away due at 3.
/// CCF serves v1 first and can no longer reach v2 in time; the optimum is 2.
pub fn v1_v2_instance() -> Instance64 {
    Instance::new(10, 1.0, vec![task(1, 1, 0, 1.0, 10), task(2, 3, 0, 1.0, 3)], vec![agent(1, 0, 0)]).unwrap()
}

/// Random instance small enough for the exhaustive solver:
/// up to 3 agents, up to 4 tasks, deadlines at most 15, a 5x5 grid.
pub fn tiny_instance(seed: u64) -> Instance64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_agents = rng.gen_range(1..=3u32);
    let n_tasks = rng.gen_range(1..=4u32);
    let tasks = (0..n_tasks)
        .map(|id| {
            task(
                id,
                rng.gen_range(0..5),
                rng.gen_range(0..5),
                f64::from(rng.gen_range(1..=12u32)),
                rng.gen_range(0..=15),
            )
        })
        .collect();
    let agents = (0..n_agents).map(|id| agent(id, rng.gen_range(0..5), rng.gen_range(0..5))).collect();
    let k = rng.gen_range(1.0..2.0);
    Instance::new(5, k, tasks, agents).unwrap()
}

pub fn params(tasks: usize) -> GenParams {
    GenParams { task_count: tasks, ..GenParams::default() }
}

pub fn generated(tasks: usize, agents: usize, seed: u64) -> Instance64 {
    generate_instance(&params(tasks), agents, seed).unwrap()
}

/// Completion step of a coalition whose members join at the given steps,
/// counting from `from` with `workload` left. Plain step-by-step reference.
pub fn staggered_completion<T: Scalar, V: ValueFunction<T> + ?Sized>(
    instance: &Instance<T>,
    value: &V,
    task: usize,
    workload: T,
    members: &[(usize, Time)],
) -> Option<Time> {
    let t = instance.task(task);
    let start = members.iter().map(|m| m.1).min()?;
    let mut done = T::zero();
    for now in start..=t.deadline {
        let present: Vec<AgentId> =
            members.iter().filter(|m| m.1 <= now).map(|m| instance.agent(m.0).id).collect();
        done += value.value(&present, t);
        if T::reaches(done, workload) {
            return Some(now);
        }
    }
    None
}

/// All subsets of `0..n` of size `k`, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
