mod common;

use cfstp::model::{
    read_instance, read_schedule, solution_degree, step_simulation, task_completed, travel_time, validate_schedule,
    write_instance, write_schedule, AgentAllocation, AgentStatus, Dispatch, Schedule, SimState,
};
use cfstp::{AgentId, Instance64, Location, Metric, TaskId, Time};
use common::{agent, task, tiny_instance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn loc() -> impl Strategy<Value = Location> {
    (0u32..60, 0u32..60).prop_map(|(x, y)| Location::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, rng_seed: proptest::test_runner::RngSeed::Fixed(7), ..ProptestConfig::default() })]

    #[test]
    fn travel_is_symmetric_and_triangular(a in loc(), b in loc(), c in loc(), speed in prop::sample::select(vec![0.5, 1.0, 1.5, 3.0])) {
        let mut ag = agent(0, 0, 0);
        ag.speed = speed;
        let t = |p, q| travel_time(Metric::Manhattan, &ag, p, q);
        prop_assert_eq!(t(a, b), t(b, a));
        prop_assert!(t(a, c) <= t(a, b) + t(b, c));
        prop_assert_eq!(t(a, a), 0);
        prop_assert_eq!(u64::from(t(a, b)), (a.manhattan(b) as f64 / speed).ceil() as u64);
    }

    #[test]
    fn completion_is_monotone_in_allocations(extra in prop::collection::vec((0u32..3, 0u32..12), 0..20), base in prop::collection::vec((0u32..3, 0u32..12), 0..20)) {
        let inst = Instance64::new(5, 1.3, vec![task(0, 0, 0, 6.0, 8)], (0..3).map(|i| agent(i, 0, 0)).collect()).unwrap();
        let u = inst.linear_value();
        let mk = |v: &[(u32, u32)]| -> Vec<AgentAllocation> { v.iter().map(|&(a, t)| AgentAllocation::new(AgentId(a), TaskId(0), t)).collect() };
        let small = Schedule::from_allocations(mk(&base));
        let mut all = mk(&base);
        all.extend(mk(&extra));
        let big = Schedule::from_allocations(all);
        if task_completed(inst.task(0), &u, small.allocations()) {
            prop_assert!(task_completed(inst.task(0), &u, big.allocations()));
        }
        let d = solution_degree(&inst, &u, &big);
        prop_assert!(d <= inst.tasks().len());
    }
}

/// Random dispatches replayed through the kernel: the kernel's completed set
/// equals the tasks whose allocations reach their workload, work stops at
/// completion and at the deadline, and working agents sit on their task.
#[test]
fn kernel_agrees_with_completion_check() {
    for seed in 0..300u64 {
        let inst = tiny_instance(seed);
        let u = inst.linear_value();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let mut state = SimState::new(&inst);
        let mut allocations = Vec::new();
        let mut work_per_task = vec![0.0; inst.tasks().len()];
        while state.now <= inst.d_max() {
            let mut orders = Vec::new();
            for a in state.free_agents().collect::<Vec<_>>() {
                let open: Vec<usize> = (0..inst.tasks().len()).filter(|&v| !state.is_completed(v)).collect();
                if !open.is_empty() && rng.gen_bool(0.6) {
                    orders.push(Dispatch { agent: a, task: open[rng.gen_range(0..open.len())] });
                }
            }
            let before = state.done.clone();
            let was_completed: Vec<bool> = (0..inst.tasks().len()).map(|v| state.is_completed(v)).collect();
            let now = state.now;
            let events = step_simulation(&mut state, &inst, &u, &orders).unwrap();
            for (v, t) in inst.tasks().iter().enumerate() {
                let delta = state.done[v] - before[v];
                if was_completed[v] || now > t.deadline {
                    assert_eq!(delta, 0.0, "seed {seed}: work after completion or deadline");
                }
                work_per_task[v] += delta;
                assert!(state.remaining_workload(&inst, v) <= t.workload);
            }
            for (a, s) in state.status.iter().enumerate() {
                if let AgentStatus::Working { task } = s {
                    assert_eq!(state.location[a], inst.task(*task).location);
                }
            }
            allocations.extend(events.work);
        }
        let schedule = Schedule::from_allocations(allocations);
        assert!(validate_schedule(&inst, &u, &schedule).is_feasible(), "seed {seed}");
        for (v, t) in inst.tasks().iter().enumerate() {
            let own: Vec<AgentAllocation> = schedule.allocations().iter().copied().filter(|a| a.task == t.id).collect();
            assert_eq!(state.is_completed(v), task_completed(t, &u, &own), "seed {seed} task {v}");
            assert_eq!(state.is_completed(v), cfstp::Scalar::reaches(work_per_task[v], t.workload), "seed {seed} task {v}");
        }
        assert_eq!(solution_degree(&inst, &u, &schedule), state.completed_count());
    }
}

#[test]
fn validator_flags_teleporting_and_double_booking() {
    let inst = Instance64::new(
        10,
        1.0,
        vec![task(0, 5, 0, 3.0, 20), task(1, 0, 5, 3.0, 20)],
        vec![agent(0, 0, 0), agent(1, 5, 0)],
    )
    .unwrap();
    let u = inst.linear_value();
    // agent 0 needs 5 steps to reach task 0
    let early = Schedule::from_allocations(vec![AgentAllocation::new(AgentId(0), TaskId(0), 2)]);
    assert_eq!(validate_schedule(&inst, &u, &early).spatial_violations.len(), 1);

    let both = Schedule::from_allocations(vec![
        AgentAllocation::new(AgentId(1), TaskId(0), 10),
        AgentAllocation::new(AgentId(1), TaskId(1), 10),
    ]);
    assert!(!validate_schedule(&inst, &u, &both).is_feasible());

    // task 0 to task 1 is 10 steps
    let chained = Schedule::from_allocations(vec![
        AgentAllocation::new(AgentId(1), TaskId(0), 0),
        AgentAllocation::new(AgentId(1), TaskId(1), 5),
    ]);
    assert!(!validate_schedule(&inst, &u, &chained).spatial_violations.is_empty());

    let fine = Schedule::from_allocations(vec![
        AgentAllocation::new(AgentId(1), TaskId(0), 0),
        AgentAllocation::new(AgentId(1), TaskId(0), 1),
        AgentAllocation::new(AgentId(1), TaskId(0), 2),
        AgentAllocation::new(AgentId(1), TaskId(1), 12),
    ]);
    let report = validate_schedule(&inst, &u, &fine);
    assert!(report.is_feasible(), "{:?}", report.violations().collect::<Vec<_>>());
    assert_eq!(report.degree(), 1);
}

#[test]
fn instance_and_schedule_round_trip() {
    let inst = common::generated(20, 4, 3);
    let mut buf = Vec::new();
    write_instance(&inst, &mut buf).unwrap();
    let back: Instance64 = read_instance(buf.as_slice()).unwrap();
    assert_eq!(back, inst);

    let outcome = cfstp::solve(&inst, cfstp::Algorithm::Ccf, &Default::default()).unwrap();
    let mut buf = Vec::new();
    write_schedule(&outcome.schedule, &mut buf).unwrap();
    assert_eq!(read_schedule(buf.as_slice()).unwrap(), outcome.schedule);
}

#[test]
fn malformed_input_is_rejected() {
    assert!(read_instance::<f64, _>(&b"{"[..]).is_err());
    let bad_workload = br#"{"grid_size": 5, "value_coefficient": 1.0,
        "tasks": [{"id": 0, "x": 0, "y": 0, "workload": 0.0, "deadline": 3}], "agents": []}"#;
    assert!(read_instance::<f64, _>(&bad_workload[..]).is_err());
    let off_grid = br#"{"grid_size": 5, "value_coefficient": 1.0, "tasks": [],
        "agents": [{"id": 0, "x": 9, "y": 0}]}"#;
    let unknown = br#"{"grid_size": 5, "value_coefficient": 1.0, "tasks": [], "agents": [], "extra": 1}"#;
    assert!(read_instance::<f64, _>(&unknown[..]).is_err());
    let ok = br#"{"grid_size": 5, "value_coefficient": 1.0, "tasks": [], "agents": [{"id": 0, "x": 1, "y": 0}]}"#;
    assert_eq!(read_instance::<f64, _>(&ok[..]).unwrap().agent(0).speed, 1.0);
    assert!(read_instance::<f64, _>(&off_grid[..]).is_err());
}

#[test]
fn empty_schedule_has_degree_zero() {
    let inst = tiny_instance(1);
    let u = inst.linear_value();
    let report = validate_schedule(&inst, &u, &Schedule::new());
    assert!(report.is_feasible());
    assert_eq!(report.degree(), 0);
    let _: Time = inst.d_max();
}
