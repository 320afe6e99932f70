mod common;

use cfstp::model::validate_schedule;
use cfstp::oracle::{solve_exact, OracleLimits};
use cfstp::{solve, Algorithm, Instance64, OracleError, SolveOptions, Time};
use common::{agent, subsets, task, tiny_instance, v1_v2_instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Best number of tasks one agent can finish by serving tasks in some order,
/// each as soon as it arrives. Waiting never helps a lone agent.
fn single_agent_optimum(inst: &Instance64) -> usize {
    let n = inst.tasks().len();
    let k = inst.value_coefficient();
    let mut best = 0;
    for size in 1..=n {
        for subset in subsets(n, size) {
            let mut order = subset.clone();
            let mut any = false;
            permute(&mut order, 0, &mut |seq| {
                let mut now: Time = 0;
                let mut here = inst.agent(0).initial_location;
                for &v in seq {
                    let t = inst.task(v);
                    let start = now + inst.travel(0, here, t.location);
                    let steps = (t.workload / k - 1e-9).ceil().max(1.0) as Time;
                    let finish = start + steps - 1;
                    if finish > t.deadline {
                        return;
                    }
                    now = finish + 1;
                    here = t.location;
                }
                any = true;
            });
            if any {
                best = size;
            }
        }
    }
    best
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

#[test]
fn matches_permutation_search_for_one_agent() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut nontrivial = 0;
    for seed in 0..150 {
        let n = rng.gen_range(1..=4u32);
        let tasks = (0..n)
            .map(|i| task(i, rng.gen_range(0..5), rng.gen_range(0..5), f64::from(rng.gen_range(1..=5u32)), rng.gen_range(0..=15)))
            .collect();
        let inst = Instance64::new(5, rng.gen_range(1.0..2.0), tasks, vec![agent(0, rng.gen_range(0..5), rng.gen_range(0..5))]).unwrap();
        let exact = solve_exact(&inst, &OracleLimits::default()).unwrap();
        let expect = single_agent_optimum(&inst);
        assert_eq!(exact.degree, expect, "seed {seed}");
        nontrivial += usize::from(expect >= 2);
    }
    assert!(nontrivial > 10);
}

#[test]
fn optimal_schedules_are_feasible_and_dominate() {
    for seed in 0..80 {
        let inst = tiny_instance(seed);
        let u = inst.linear_value();
        let exact = solve_exact(&inst, &OracleLimits::default()).unwrap();
        let report = validate_schedule(&inst, &u, &exact.outcome.schedule);
        assert!(report.is_feasible(), "seed {seed}");
        assert_eq!(report.degree(), exact.degree);
        for alg in Algorithm::HEURISTICS {
            let h = solve(&inst, alg, &SolveOptions::default()).unwrap();
            assert!(h.degree(&inst) <= exact.degree, "seed {seed} {alg}");
        }
    }
}

#[test]
fn counterexample_needs_the_urgent_task_first() {
    let inst = v1_v2_instance();
    let exact = solve_exact(&inst, &OracleLimits::default()).unwrap();
    assert_eq!(exact.degree, 2);
    let first = exact.outcome.schedule.allocations().first().unwrap();
    assert_eq!(first.task, inst.task(1).id);
    assert_eq!(solve(&inst, Algorithm::Exact, &SolveOptions::default()).unwrap().degree(&inst), 2);
}

#[test]
fn large_instances_are_refused() {
    let many_agents = Instance64::new(5, 1.0, vec![task(0, 0, 0, 1.0, 3)], (0..5).map(|i| agent(i, 0, 0)).collect()).unwrap();
    assert!(matches!(solve_exact(&many_agents, &OracleLimits::default()), Err(OracleError::LimitExceeded { .. })));
    let late = Instance64::new(5, 1.0, vec![task(0, 0, 0, 1.0, 31)], vec![agent(0, 0, 0)]).unwrap();
    assert!(solve_exact(&late, &OracleLimits::default()).is_err());
    assert!(solve(&late, Algorithm::Exact, &SolveOptions::default()).is_err());
}
