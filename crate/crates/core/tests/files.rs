use mets::eval::check_feasibility;
use mets::io::{generate_instance, parse_instance, parse_solution, write_instance, write_solution, Profile};
use mets::{evaluate, EvalMode, PenaltyWeights, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn solved_instance_survives_a_trip_through_files() {
    let inst = generate_instance(Profile::MCentral(25), &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    let inst = parse_instance(&write_instance(&inst)).unwrap();
    let cfg = SolverConfig { max_iterations: 60, ..SolverConfig::with_seed(3) };
    let res = mets::run(&inst, &cfg).unwrap();

    let sol = parse_solution(&write_solution(&res.best), &inst).unwrap();
    assert_eq!(sol, res.best);
    let report = evaluate(&sol, &inst, &PenaltyWeights::default(), EvalMode::Scheduled);
    assert!(check_feasibility(&sol, &report, &inst).unwrap().feasible());
    assert_eq!(report.total_distance, res.best_distance);
}

#[test]
fn solution_for_another_instance_is_rejected() {
    let small = generate_instance(Profile::Tiny(4), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let big = generate_instance(Profile::MCentral(25), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let res = mets::run(&big, &SolverConfig { max_iterations: 10, ..SolverConfig::with_seed(0) }).unwrap();
    assert!(parse_solution(&write_solution(&res.best), &small).is_err());
}
