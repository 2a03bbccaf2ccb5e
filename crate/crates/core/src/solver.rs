//! The generational loop: parents by tournament, order crossover, split,
//! local search, insertion and survivor selection, with adaptive penalties.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::eval::{evaluate, EvalMode, PenaltyWeights};
use crate::instance::{Instance, NodeId};
use crate::local_search::{els, NeighborLists};
use crate::population::{adapt_penalties, order_crossover, FeasibilityHistory, Individual, Population, PopulationParams};
use crate::solution::{GiantTour, Route, Solution};
use crate::split::{scts, split_dmax, split_tmax};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub weights: PenaltyWeights,
    pub population: PopulationParams,
    pub max_iterations: usize,
    /// Stop after this many iterations without a strictly better feasible
    /// distance.
    pub max_no_improvement: usize,
    /// Wall-clock limit in seconds. `None` means unlimited.
    pub time_limit: Option<f64>,
    pub repair_probability: f64,
    /// Iterations between penalty adaptations, also the length of the
    /// feasibility history.
    pub adaptation_period: usize,
    /// Initial population size. `None` means `2μ`.
    pub initial_size: Option<usize>,
    pub seed: u64,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            weights: PenaltyWeights::default(),
            population: PopulationParams::default(),
            max_iterations: 2000,
            max_no_improvement: 300,
            time_limit: None,
            repair_probability: 0.5,
            adaptation_period: 20,
            initial_size: None,
            seed: 0,
            record_trace: false,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolverConfig { seed, ..Default::default() }
    }

    /// Settings for the large-scale benchmark: two hours of wall clock.
    pub fn large_scale(seed: u64) -> Self {
        SolverConfig { seed, time_limit: Some(7200.0), ..Default::default() }
    }
}

/// True once any of the iteration, stagnation or wall-clock limits is hit.
pub fn should_terminate(iteration: usize, since_improvement: usize, elapsed: f64, cfg: &SolverConfig) -> bool {
    iteration >= cfg.max_iterations
        || since_improvement >= cfg.max_no_improvement
        || cfg.time_limit.is_some_and(|t| elapsed >= t)
}

/// State after one iteration. Contains no wall-clock values so that
/// traces of equal runs are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub best_distance: Option<f64>,
    pub feasible_size: usize,
    pub infeasible_size: usize,
    pub weights: PenaltyWeights,
    /// Satisfaction rates of overtime, mileage and capacity over the
    /// recent offspring.
    pub rates: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Solution,
    pub best_distance: f64,
    /// Seconds from the start of the run until `best` was first found.
    pub time_to_best: f64,
    pub total_time: f64,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
}

/// Runs the algorithm with `cfg.seed`.
pub fn run(inst: &Instance, cfg: &SolverConfig) -> Result<RunResult, Error> {
    run_with_sink(inst, cfg, |_| {})
}

/// Like [`run`], also passing every trace record to `sink` as it is made.
pub fn run_with_sink(inst: &Instance, cfg: &SolverConfig, mut sink: impl FnMut(&TraceRecord)) -> Result<RunResult, Error> {
    check_instance(inst)?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let neighbors = NeighborLists::new(inst);
    let mut weights = cfg.weights;
    let mut pop = Population::new(cfg.population, inst);
    let mut history = FeasibilityHistory::new(cfg.adaptation_period);
    let mut best: Option<(Solution, f64, f64)> = None;
    let mut least_violating: Option<(Solution, f64)> = None;

    let mut consider = |sol: &Solution, report: &crate::eval::EvalReport, best: &mut Option<(Solution, f64, f64)>| -> bool {
        if report.feasible {
            if best.as_ref().is_none_or(|b| report.total_distance < b.1) {
                *best = Some((sol.clone(), report.total_distance, start.elapsed().as_secs_f64()));
                return true;
            }
        } else {
            let violation = report.overtime + report.over_mileage + report.over_capacity
                + report.vehicles_used.saturating_sub(inst.fleet_limit()) as f64;
            if least_violating.as_ref().is_none_or(|l| violation < l.1) {
                least_violating = Some((sol.clone(), violation));
            }
        }
        false
    };

    let customers: Vec<NodeId> = inst.customers().collect();
    let initial = cfg.initial_size.unwrap_or(2 * cfg.population.mu);
    for _ in 0..initial {
        if cfg.time_limit.is_some_and(|t| start.elapsed().as_secs_f64() >= t) {
            break;
        }
        let mut perm = customers.clone();
        perm.shuffle(&mut rng);
        let tour = GiantTour::from_vec_unchecked(perm);
        let sol = split_or_fallback(&tour, inst, &mut rng);
        let out = els(&sol, inst, &neighbors, weights, cfg.repair_probability, &mut rng);
        insert_outcome(&mut pop, inst, &weights, out.improved, out.repaired, out.repair_ran, &mut best, &mut consider);
    }

    let mut iteration = 0;
    let mut since_improvement = 0;
    let mut trace = Vec::new();
    while !should_terminate(iteration, since_improvement, start.elapsed().as_secs_f64(), cfg) {
        iteration += 1;
        let improved_best = if pop.is_empty() {
            false
        } else {
            let p1 = pop.binary_tournament(&mut rng)?.giant_tour(inst);
            let p2 = pop.binary_tournament(&mut rng)?.giant_tour(inst);
            let child = order_crossover(&p1, &p2, &mut rng);
            let sol = split_or_fallback(&child, inst, &mut rng);
            let out = els(&sol, inst, &neighbors, weights, cfg.repair_probability, &mut rng);
            let zw = evaluate(&out.improved, inst, &weights, EvalMode::ZeroWait);
            history.record(zw.overtime == 0.0, zw.over_mileage == 0.0, zw.over_capacity == 0.0);
            insert_outcome(&mut pop, inst, &weights, out.improved, out.repaired, out.repair_ran, &mut best, &mut consider)
        };
        if improved_best {
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if iteration % cfg.adaptation_period == 0 {
            weights = adapt_penalties(&weights, history.rates());
            pop.infeasible.reevaluate(inst, &weights);
        }
        let record = TraceRecord {
            iteration,
            best_distance: best.as_ref().map(|b| b.1),
            feasible_size: pop.feasible.len(),
            infeasible_size: pop.infeasible.len(),
            weights,
            rates: history.rates(),
        };
        sink(&record);
        if cfg.record_trace {
            trace.push(record);
        }
    }

    let total_time = start.elapsed().as_secs_f64();
    match best {
        Some((best, best_distance, time_to_best)) => {
            Ok(RunResult { best, best_distance, time_to_best, total_time, iterations: iteration, trace })
        }
        None => Err(Error::NoFeasibleSolution { least_violating: least_violating.map(|l| Box::new(l.0)) }),
    }
}

/// Inserts the local-search result and, when a repair ran and changed
/// it, the repaired copy. Returns whether the best feasible distance
/// strictly improved.
#[allow(clippy::too_many_arguments)]
fn insert_outcome(
    pop: &mut Population,
    inst: &Instance,
    weights: &PenaltyWeights,
    improved: Solution,
    repaired: Solution,
    repair_ran: bool,
    best: &mut Option<(Solution, f64, f64)>,
    consider: &mut impl FnMut(&Solution, &crate::eval::EvalReport, &mut Option<(Solution, f64, f64)>) -> bool,
) -> bool {
    let mut better = false;
    let second = (repair_ran && repaired != improved).then_some(repaired);
    for sol in std::iter::once(improved).chain(second) {
        let ind = Individual::new(sol, inst, weights);
        better |= consider(&ind.solution, &ind.report, best);
        pop.insert(ind, inst);
    }
    better
}

/// Splits with the randomly chosen constraint, then with the other one,
/// and as a last resort serves every customer on its own route.
fn split_or_fallback<R: Rng + ?Sized>(tour: &GiantTour, inst: &Instance, rng: &mut R) -> Solution {
    scts(tour, inst, rng)
        .or_else(|_| split_tmax(tour, inst))
        .or_else(|_| split_dmax(tour, inst))
        .unwrap_or_else(|_| Solution::new(tour.as_slice().iter().map(|&c| Route::from_interior(&[c])).collect()))
}

/// Checks that every customer can be served by a vehicle of its own,
/// refuelling at most once before and once after it.
pub fn check_instance(inst: &Instance) -> Result<(), Error> {
    let range = inst.max_range();
    let limit = inst.duration_limit();
    let speed_time = |d: f64| d / inst.params().speed;
    let stations: Vec<NodeId> = inst.stations().collect();
    let refuel = inst.refuel_time();
    for c in inst.customers() {
        let service = inst.dwell(c);
        // best way to reach c with a full tank, and to return from it
        let mut legs_in: Vec<(f64, f64)> = vec![(inst.dist(0, c), 0.0)];
        let mut legs_out: Vec<(f64, f64)> = vec![(inst.dist(c, 0), 0.0)];
        for &s in &stations {
            if inst.dist(0, s) <= range {
                legs_in.push((inst.dist(s, c), inst.dist(0, s)));
            }
            if inst.dist(s, 0) <= range {
                legs_out.push((inst.dist(c, s), inst.dist(s, 0)));
            }
        }
        let ok = legs_in.iter().any(|&(near_in, far_in)| {
            legs_out.iter().any(|&(near_out, far_out)| {
                let stops = usize::from(far_in > 0.0) + usize::from(far_out > 0.0);
                let path = near_in + near_out;
                let total = far_in + near_in + near_out + far_out;
                path <= range && speed_time(total) + service + stops as f64 * refuel <= limit
            })
        });
        if !ok {
            return Err(Error::InfeasibleInstance(format!("customer {c} cannot be served by any single vehicle")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::FleetParams;
    use crate::testutil::{params, random_instance};

    fn quick(seed: u64) -> SolverConfig {
        SolverConfig {
            population: PopulationParams { mu: 10, lambda: 16, ..Default::default() },
            max_iterations: 60,
            max_no_improvement: 40,
            seed,
            record_trace: true,
            ..Default::default()
        }
    }

    #[test]
    fn termination_rules() {
        let cfg = SolverConfig::default();
        assert!(should_terminate(2000, 0, 0.0, &cfg));
        assert!(should_terminate(10, 300, 0.0, &cfg));
        assert!(!should_terminate(1999, 299, 1e9, &cfg));
        let timed = SolverConfig::large_scale(0);
        assert!(should_terminate(0, 0, 7200.0, &timed));
        assert!(!should_terminate(0, 0, 7199.0, &timed));
    }

    #[test]
    fn single_customer() {
        let inst = Instance::new(
            "one",
            1,
            1,
            vec![(0.0, 0.0), (3.0, 4.0), (50.0, 50.0)],
            vec![0.5],
            params(),
        )
        .unwrap();
        let res = run(&inst, &quick(1)).unwrap();
        assert_eq!(res.best.routes.len(), 1);
        assert_eq!(res.best.routes[0].nodes(), &[0, 1, 0]);
        assert_eq!(res.best_distance, 10.0);
    }

    #[test]
    fn same_seed_same_trace() {
        let inst = random_instance(3, 10, 2, params());
        let a = run(&inst, &quick(7)).unwrap();
        let b = run(&inst, &quick(7)).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best, b.best);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn best_is_feasible_and_nonincreasing() {
        for seed in 0..4 {
            let inst = random_instance(seed, 12, 2, params());
            let cfg = quick(seed);
            let res = run(&inst, &cfg).unwrap();
            let rep = evaluate(&res.best, &inst, &cfg.weights, EvalMode::Scheduled);
            assert!(rep.feasible);
            assert_eq!(rep.total_distance, res.best_distance);
            let seq: Vec<f64> = res.trace.iter().filter_map(|t| t.best_distance).collect();
            assert!(seq.windows(2).all(|w| w[1] <= w[0]));
            for t in &res.trace {
                assert!(t.feasible_size < cfg.population.lambda && t.infeasible_size < cfg.population.lambda);
            }
        }
    }

    #[test]
    fn stagnation_stops_the_run() {
        let inst = random_instance(5, 6, 1, params());
        let cfg = SolverConfig { max_iterations: 10_000, max_no_improvement: 25, ..quick(5) };
        let res = run(&inst, &cfg).unwrap();
        assert!(res.iterations < 10_000);
        let tail = &res.trace[res.trace.len() - 25..];
        assert!(tail.iter().all(|t| t.best_distance == tail[0].best_distance));
        if res.trace.len() > 25 {
            let before = &res.trace[res.trace.len() - 26];
            assert!(before.best_distance.is_none() || tail[0].best_distance < before.best_distance);
        }
    }

    #[test]
    fn unreachable_customer_is_rejected() {
        let p = FleetParams { energy_full: 10.0, ..params() };
        let inst = Instance::new(
            "far",
            1,
            1,
            vec![(0.0, 0.0), (40.0, 0.0), (-5.0, 0.0)],
            vec![0.1],
            p,
        )
        .unwrap();
        assert!(matches!(run(&inst, &quick(0)), Err(Error::InfeasibleInstance(_))));
    }

    #[test]
    fn no_feasible_solution_reports_least_violating() {
        // two far-apart customers, one vehicle, a limit only single trips meet
        let p = FleetParams { fleet_limit: 1, duration_limit: 2.5, ..params() };
        let inst = Instance::new(
            "split",
            2,
            1,
            vec![(0.0, 0.0), (10.0, 0.0), (-10.0, 0.0), (0.0, 1.0)],
            vec![0.1, 0.1],
            p,
        )
        .unwrap();
        match run(&inst, &quick(0)) {
            Err(Error::NoFeasibleSolution { least_violating }) => {
                least_violating.unwrap().validate(&inst).unwrap();
            }
            other => panic!("{other:?}"),
        }
    }
}
