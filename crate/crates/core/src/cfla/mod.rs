//! CFLA and CFLA2: greedy allocation with a one-step look-ahead.
//!
//! Each step, every unallocated task gets its earliest-completion-first (ECF)
//! coalition and a look-ahead degree counting how many other tasks could still
//! be completed once that coalition is done. The task with the highest degree
//! is allocated and the kernel advances one step.

mod coalition;
mod combinations;

pub use combinations::{binomial, combinations, Combinations};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{AgentId, Dispatch, Instance, Location, Schedule, SimState, Simulation, Time, ValueFunction};
use crate::scalar::Scalar;
use crate::solve::{Clock, SolveOptions, SolveOutcome, TieBreak};
use coalition::{completable_enumerated, ecf_additive, ecf_enumerated, units_needed, Member};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LookAheadVariant {
    /// Every completable follow-up task counts 1.
    Cfla,
    /// Only follow-up tasks due no earlier count, and lighter ones count more.
    Cfla2,
}

/// One reachable (agent, task) pair and its admissible work window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LegalEntry {
    pub agent: usize,
    pub task: usize,
    /// Arrival step if dispatched now.
    pub earliest: Time,
    pub deadline: Time,
}

/// Legal agent allocations at one step, sorted by (task, agent).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LegalAllocationSet {
    entries: Vec<LegalEntry>,
}

impl LegalAllocationSet {
    pub fn entries(&self) -> &[LegalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries for one task, by agent index.
    pub fn for_task(&self, task: usize) -> &[LegalEntry] {
        let lo = self.entries.partition_point(|e| e.task < task);
        let hi = self.entries.partition_point(|e| e.task <= task);
        &self.entries[lo..hi]
    }
}

/// Free agents that can reach an uncompleted task by its deadline.
pub fn legal_agent_allocations<T: Scalar>(state: &SimState<T>, instance: &Instance<T>) -> LegalAllocationSet {
    let free: Vec<usize> = state.free_agents().collect();
    let mut entries = Vec::new();
    for (v, task) in instance.tasks().iter().enumerate() {
        if state.is_completed(v) {
            continue;
        }
        for &a in &free {
            let earliest = state.now.saturating_add(instance.travel(a, state.location[a], task.location));
            if earliest <= task.deadline {
                entries.push(LegalEntry { agent: a, task: v, earliest, deadline: task.deadline });
            }
        }
    }
    LegalAllocationSet { entries }
}

/// Result of the ECF search for one task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcfCoalition {
    /// Agent indices, ascending.
    pub members: Vec<usize>,
    /// Step during which the task would be completed.
    pub completion: Time,
}

impl EcfCoalition {
    pub fn agent_ids<T: Scalar>(&self, instance: &Instance<T>) -> Vec<AgentId> {
        self.members.iter().map(|&a| instance.agent(a).id).collect()
    }
}

fn pool_for(legal: &LegalAllocationSet, task: usize) -> Vec<Member> {
    legal.for_task(task).iter().map(|e| (e.agent, e.earliest)).collect()
}

/// Smallest coalition of legal agents that completes `task` soonest.
///
/// Uses a closed form when the value function is additive per agent and
/// falls back to [`ecf_coalition_enumerated`] otherwise.
pub fn ecf_coalition<T, V>(
    instance: &Instance<T>,
    value: &V,
    task: usize,
    legal: &LegalAllocationSet,
    state: &SimState<T>,
) -> Option<EcfCoalition>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let t = instance.task(task);
    let pool = pool_for(legal, task);
    let workload = state.remaining_workload(instance, task);
    let found = match value.per_agent_rate(t) {
        Some(rate) => ecf_additive(rate, workload, t.deadline, &pool),
        None => ecf_enumerated(instance, value, task, workload, t.deadline, &pool),
    };
    found.map(|(members, completion)| EcfCoalition { members, completion })
}

/// [`ecf_coalition`] by explicit enumeration of all subsets, smallest size first.
pub fn ecf_coalition_enumerated<T, V>(
    instance: &Instance<T>,
    value: &V,
    task: usize,
    legal: &LegalAllocationSet,
    state: &SimState<T>,
) -> Option<EcfCoalition>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let t = instance.task(task);
    let pool = pool_for(legal, task);
    let workload = state.remaining_workload(instance, task);
    ecf_enumerated(instance, value, task, workload, t.deadline, &pool)
        .map(|(members, completion)| EcfCoalition { members, completion })
}

/// Per-step data shared by all look-ahead evaluations.
struct LookAhead {
    /// Unallocated tasks.
    tasks: Vec<usize>,
    free: Vec<usize>,
    /// `travel[i][j]`: free agent `free[i]` from its location to `tasks[j]`.
    travel: Vec<Vec<Time>>,
    /// Per task, units of work needed when the value is additive.
    units: Vec<Option<u64>>,
    /// Per task, ascending travel times of all free agents and their prefix sums.
    sorted: Vec<Vec<Time>>,
    prefix: Vec<Vec<u64>>,
    workloads: Vec<f64>,
    /// Remaining workloads with task positions, ascending.
    by_workload: Vec<(f64, usize)>,
}

impl LookAhead {
    fn new<T, V>(instance: &Instance<T>, value: &V, state: &SimState<T>) -> Self
    where
        T: Scalar,
        V: ValueFunction<T> + ?Sized,
    {
        let tasks: Vec<usize> = (0..instance.tasks().len()).filter(|&v| state.is_unallocated(v)).collect();
        let free: Vec<usize> = state.free_agents().collect();
        let travel: Vec<Vec<Time>> = free
            .iter()
            .map(|&a| tasks.iter().map(|&v| instance.travel(a, state.location[a], instance.task(v).location)).collect())
            .collect();
        let mut units = Vec::with_capacity(tasks.len());
        let mut sorted = Vec::with_capacity(tasks.len());
        let mut prefix = Vec::with_capacity(tasks.len());
        let mut by_workload = Vec::with_capacity(tasks.len());
        for (j, &v) in tasks.iter().enumerate() {
            let t = instance.task(v);
            let remaining = state.remaining_workload(instance, v);
            units.push(value.per_agent_rate(t).filter(|r| *r > T::zero()).map(|r| units_needed(r, remaining)));
            let mut rho: Vec<Time> = travel.iter().map(|row| row[j]).collect();
            rho.sort_unstable();
            let mut acc = 0u64;
            let mut sums = Vec::with_capacity(rho.len() + 1);
            sums.push(0);
            for &r in &rho {
                acc += u64::from(r);
                sums.push(acc);
            }
            sorted.push(rho);
            prefix.push(sums);
            by_workload.push((remaining.to_f64().unwrap_or(f64::NAN), j));
        }
        let workloads = by_workload.iter().map(|e| e.0).collect();
        by_workload.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Self { tasks, free, travel, units, sorted, prefix, workloads, by_workload }
    }

    fn position(&self, task: usize) -> Option<usize> {
        self.tasks.binary_search(&task).ok()
    }

    fn free_position(&self, agent: usize) -> Option<usize> {
        self.free.binary_search(&agent).ok()
    }

    /// Smallest and largest remaining workload among unallocated tasks other than `tasks[skip]`.
    fn workload_bounds(&self, skip: usize) -> Option<(f64, f64)> {
        let min = self.by_workload.iter().take(2).find(|(_, k)| *k != skip)?.0;
        let max = self.by_workload.iter().rev().take(2).find(|(_, k)| *k != skip)?.0;
        Some((min, max))
    }

    /// `1 - eta` for `tasks[j]`; 1 when all workloads are equal.
    fn bonus(&self, j: usize, bounds: Option<(f64, f64)>) -> f64 {
        match bounds {
            Some((min, max)) if max > min => 1.0 - (self.workloads[j] - min) / (max - min),
            _ => 1.0,
        }
    }

    fn degree<T, V>(
        &self,
        instance: &Instance<T>,
        value: &V,
        state: &SimState<T>,
        task: usize,
        ecf: &EcfCoalition,
        variant: LookAheadVariant,
    ) -> T
    where
        T: Scalar,
        V: ValueFunction<T> + ?Sized,
    {
        let Some(skip) = self.position(task) else { return T::zero() };
        let here = instance.task(task);
        let finish = ecf.completion;
        let bounds = self.workload_bounds(skip);
        let mut degree = T::zero();
        for (j, &v2) in self.tasks.iter().enumerate() {
            if j == skip {
                continue;
            }
            let t2 = instance.task(v2);
            if variant == LookAheadVariant::Cfla2 && t2.deadline < here.deadline {
                continue;
            }
            if t2.deadline < finish {
                continue;
            }
            let completable = match self.units[j] {
                Some(units) => self.additive_units(instance, j, ecf, here.location) >= units,
                None => {
                    let pool = self.pool_after(instance, j, ecf, here.location);
                    let workload = state.remaining_workload(instance, v2);
                    completable_enumerated(instance, value, v2, workload, t2.deadline, &pool)
                }
            };
            if completable {
                degree += match variant {
                    LookAheadVariant::Cfla => T::one(),
                    LookAheadVariant::Cfla2 => T::one() + T::of(self.bonus(j, bounds)),
                };
            }
        }
        degree
    }

    /// Agent-steps all agents free at `ecf.completion` could spend on `tasks[j]` by its deadline.
    fn additive_units<T: Scalar>(&self, instance: &Instance<T>, j: usize, ecf: &EcfCoalition, from: Location) -> u64 {
        let t2 = instance.task(self.tasks[j]);
        // steps from `completion` to the deadline, inclusive
        let span = u64::from(t2.deadline - ecf.completion) + 1;
        let share = |rho: Time| span.saturating_sub(u64::from(rho));
        let rho = &self.sorted[j];
        let count = rho.partition_point(|&r| u64::from(r) < span);
        let mut units = count as u64 * span - self.prefix[j][count];
        for &a in &ecf.members {
            if let Some(i) = self.free_position(a) {
                units -= share(self.travel[i][j]);
            }
            units += share(instance.travel(a, from, t2.location));
        }
        units
    }

    fn pool_after<T: Scalar>(
        &self,
        instance: &Instance<T>,
        j: usize,
        ecf: &EcfCoalition,
        from: Location,
    ) -> Vec<Member> {
        let t2 = instance.task(self.tasks[j]);
        let finish = ecf.completion;
        let mut pool: Vec<Member> = Vec::new();
        for (i, &a) in self.free.iter().enumerate() {
            let arrival = if ecf.members.binary_search(&a).is_ok() {
                finish.saturating_add(instance.travel(a, from, t2.location))
            } else {
                finish.saturating_add(self.travel[i][j])
            };
            if arrival <= t2.deadline {
                pool.push((a, arrival));
            }
        }
        pool
    }
}

/// Look-ahead degree of allocating `task` to `ecf`.
pub fn look_ahead_degree<T, V>(
    instance: &Instance<T>,
    value: &V,
    task: usize,
    ecf: &EcfCoalition,
    state: &SimState<T>,
    variant: LookAheadVariant,
) -> T
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    LookAhead::new(instance, value, state).degree(instance, value, state, task, ecf, variant)
}

/// Task and coalition CFLA would allocate at the current step, with its degree.
pub fn select_allocation<T, V>(
    instance: &Instance<T>,
    value: &V,
    state: &SimState<T>,
    variant: LookAheadVariant,
    rng: Option<&mut ChaCha8Rng>,
) -> Option<(usize, EcfCoalition, T)>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let legal = legal_agent_allocations(state, instance);
    if legal.is_empty() {
        return None;
    }
    let context = LookAhead::new(instance, value, state);
    let mut tied: Vec<(usize, EcfCoalition)> = Vec::new();
    let mut best = T::neg_infinity();
    for &v in &context.tasks {
        let Some(ecf) = ecf_coalition(instance, value, v, &legal, state) else { continue };
        let degree = context.degree(instance, value, state, v, &ecf, variant);
        if degree > best {
            best = degree;
            tied.clear();
            tied.push((v, ecf));
        } else if degree == best {
            tied.push((v, ecf));
        }
    }
    if tied.is_empty() {
        return None;
    }
    let pick = match rng {
        Some(rng) => rng.gen_range(0..tied.len()),
        None => 0,
    };
    let (v, ecf) = tied.swap_remove(pick);
    Some((v, ecf, best))
}

/// Runs CFLA or CFLA2 with the instance's linear value function.
pub fn solve_cfla<T: Scalar>(instance: &Instance<T>, variant: LookAheadVariant, options: &SolveOptions) -> SolveOutcome<T> {
    solve_cfla_with(instance, &instance.linear_value(), variant, options, &mut |_, _| {})
}

/// Runs CFLA or CFLA2 with an arbitrary value function, calling `observer`
/// after every simulated step.
pub fn solve_cfla_with<T, V>(
    instance: &Instance<T>,
    value: &V,
    variant: LookAheadVariant,
    options: &SolveOptions,
    observer: &mut dyn FnMut(&SimState<T>, &Schedule),
) -> SolveOutcome<T>
where
    T: Scalar,
    V: ValueFunction<T> + ?Sized,
{
    let clock = Clock::start(options);
    let mut rng = match options.tie_break {
        TieBreak::SmallestId => None,
        TieBreak::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut sim = Simulation::new(instance, value);
    let mut interrupted = false;
    loop {
        let state = sim.state();
        if state.all_completed() || state.now > instance.d_max() {
            break;
        }
        if clock.expired(state.now) {
            interrupted = true;
            break;
        }
        let orders: Vec<Dispatch> = select_allocation(instance, value, state, variant, rng.as_mut())
            .map(|(task, ecf, _)| ecf.members.iter().map(|&agent| Dispatch { agent, task }).collect())
            .unwrap_or_default();
        if orders.is_empty() && state.all_free() {
            break;
        }
        sim.step(&orders).expect("dispatches only free agents to uncompleted tasks");
        observer(sim.state(), sim.schedule());
    }
    let (schedule, state, dispatches) = sim.into_parts();
    SolveOutcome { schedule, state, dispatches, interrupted, elapsed: clock.elapsed() }
}
