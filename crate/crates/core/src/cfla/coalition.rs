//! Coalition completion predictions under staggered arrivals.
//!
//! A member works from its arrival step onwards; during each step the
//! coalition of members that have already arrived contributes its value.

use super::combinations::combinations;
use crate::model::{AgentId, Instance, Time, ValueFunction};
use crate::scalar::Scalar;

/// A prospective member: instance index and arrival step.
pub(crate) type Member = (usize, Time);

/// Earliest step at which the cumulative work of `members` reaches `workload`,
/// if that happens no later than `deadline`.
pub(crate) fn staggered_completion<T, V>(
    instance: &Instance<T>,
    value: &V,
    task: usize,
    workload: T,
    deadline: Time,
    members: &[Member],
) -> Option<Time>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let mut sorted: Vec<Member> = members.to_vec();
    sorted.sort_unstable_by_key(|&(a, t)| (t, a));
    let task_ref = instance.task(task);
    let mut arrived: Vec<AgentId> = Vec::with_capacity(sorted.len());
    let mut done = T::zero();
    let mut j = 0;
    while j < sorted.len() {
        let seg_start = sorted[j].1;
        if seg_start > deadline {
            break;
        }
        while j < sorted.len() && sorted[j].1 == seg_start {
            arrived.push(instance.agent(sorted[j].0).id);
            j += 1;
        }
        let seg_end = match sorted.get(j) {
            Some(&(_, next)) => (next - 1).min(deadline),
            None => deadline,
        };
        let steps = u64::from(seg_end - seg_start) + 1;
        let rate = value.value(&arrived, task_ref);
        if rate > T::zero() {
            let n = steps_to_reach(done, rate, workload);
            if n <= steps {
                return Some(seg_start + (n - 1) as Time);
            }
            done += rate * T::from_u64(steps).expect("step count fits scalar");
        }
    }
    None
}

/// Smallest `n >= 1` with `done + n * rate` reaching `workload`.
fn steps_to_reach<T: Scalar>(done: T, rate: T, workload: T) -> u64 {
    let at = |n: u64| done + rate * T::from_u64(n).expect("step count fits scalar");
    let mut n = ((workload - done) / rate).ceil().to_u64().unwrap_or(u64::MAX / 2).max(1);
    while n > 1 && T::reaches(at(n - 1), workload) {
        n -= 1;
    }
    while !T::reaches(at(n), workload) {
        n += 1;
    }
    n
}

/// Work units (agent-steps) needed when every agent contributes `rate` per step.
pub(crate) fn units_needed<T: Scalar>(rate: T, workload: T) -> u64 {
    steps_to_reach(T::zero(), rate, workload)
}

/// Earliest step at which agents arriving at `arrivals` (ascending) have jointly
/// worked `units` agent-steps, if no later than `deadline`.
pub(crate) fn additive_completion(arrivals: &[Time], units: u64, deadline: Time) -> Option<Time> {
    let mut cum: u64 = 0;
    for (j, &start) in arrivals.iter().enumerate() {
        if start > deadline {
            break;
        }
        let end = match arrivals.get(j + 1) {
            Some(&next) if next == start => continue,
            Some(&next) => (next - 1).min(deadline),
            None => deadline,
        };
        let slope = j as u64 + 1;
        let len = u64::from(end - start) + 1;
        if cum + slope * len >= units {
            let steps = (units - cum).div_ceil(slope);
            return Some(start + (steps - 1) as Time);
        }
        cum += slope * len;
    }
    None
}

/// Smallest coalition completing the task soonest, by exhaustive enumeration.
///
/// Sizes are tried in increasing order; within the first size that has any
/// completing coalition, the earliest completion wins and ties go to the
/// lexicographically first member set. `pool` must be sorted by agent index.
pub(crate) fn ecf_enumerated<T, V>(
    instance: &Instance<T>,
    value: &V,
    task: usize,
    workload: T,
    deadline: Time,
    pool: &[Member],
) -> Option<(Vec<usize>, Time)>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    for size in 1..=pool.len() {
        let mut best: Option<(Vec<usize>, Time)> = None;
        for combo in combinations(pool, size) {
            if let Some(t) = staggered_completion(instance, value, task, workload, deadline, &combo) {
                if best.as_ref().is_none_or(|(_, bt)| t < *bt) {
                    best = Some((combo.iter().map(|m| m.0).collect(), t));
                }
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

/// Same answer as [`ecf_enumerated`] when each agent adds `rate` per step.
pub(crate) fn ecf_additive<T: Scalar>(rate: T, workload: T, deadline: Time, pool: &[Member]) -> Option<(Vec<usize>, Time)> {
    if pool.is_empty() || rate <= T::zero() || rate.is_nan() {
        return None;
    }
    let units = units_needed(rate, workload);
    let mut arrivals: Vec<Time> = pool.iter().map(|m| m.1).filter(|&t| t <= deadline).collect();
    arrivals.sort_unstable();

    // fewest agents: the earliest arrivals maximise work at every step
    let mut capacity = 0u64;
    let mut size = None;
    for (i, &t) in arrivals.iter().enumerate() {
        capacity += u64::from(deadline - t) + 1;
        if capacity >= units {
            size = Some(i + 1);
            break;
        }
    }
    let size = size?;
    let finish = additive_completion(&arrivals[..size], units, deadline)?;

    // lexicographically first member set that still finishes by `finish`
    let contribution = |t: Time| if t <= finish { u64::from(finish - t) + 1 } else { 0 };
    let contrib: Vec<u64> = pool.iter().map(|m| contribution(m.1)).collect();
    let mut chosen = Vec::with_capacity(size);
    let mut sum = 0u64;
    let mut from = 0;
    let mut scratch: Vec<u64> = Vec::with_capacity(pool.len());
    for slot in 0..size {
        let rest = size - slot - 1;
        let mut picked = None;
        for pos in from..pool.len() {
            if pool.len() - pos - 1 < rest {
                break;
            }
            scratch.clear();
            scratch.extend_from_slice(&contrib[pos + 1..]);
            scratch.sort_unstable_by(|a, b| b.cmp(a));
            let best_rest: u64 = scratch[..rest].iter().sum();
            if sum + contrib[pos] + best_rest >= units {
                picked = Some(pos);
                break;
            }
        }
        let pos = picked.expect("the earliest arrivals form a feasible completion");
        chosen.push(pool[pos].0);
        sum += contrib[pos];
        from = pos + 1;
    }
    Some((chosen, finish))
}

/// Whether some subset of `pool` completes the task by `deadline`, by enumeration.
pub(crate) fn completable_enumerated<T, V>(
    instance: &Instance<T>,
    value: &V,
    task: usize,
    workload: T,
    deadline: Time,
    pool: &[Member],
) -> bool
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    (1..=pool.len()).any(|size| {
        combinations(pool, size)
            .any(|combo| staggered_completion(instance, value, task, workload, deadline, &combo).is_some())
    })
}
