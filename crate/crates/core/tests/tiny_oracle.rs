//! Local search and the full solver against exhaustive optima on tiny
//! instances.

use mets::io::{generate_instance, oracle_solve, Profile};
use mets::local_search::{els, NeighborLists};
use mets::split::scts;
use mets::{evaluate, EvalMode, GiantTour, Instance, NodeId, PenaltyWeights, SolverConfig};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tiny(seed: u64) -> Instance {
    generate_instance(Profile::Tiny(3 + seed as usize % 4), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn local_search_lands_near_the_optimum() {
    let w = PenaltyWeights::default();
    let mut close = 0;
    for seed in 0..100u64 {
        let inst = tiny(seed);
        let optimum = oracle_solve(&inst).unwrap().distance;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<NodeId> = inst.customers().collect();
        // tours that cannot be split under the drawn constraint are redrawn
        let start = loop {
            perm.shuffle(&mut rng);
            let tour = GiantTour::new(perm.clone(), &inst).unwrap();
            if let Ok(sol) = scts(&tour, &inst, &mut rng) {
                break sol;
            }
        };
        let out = els(&start, &inst, &NeighborLists::new(&inst), w, 0.5, &mut rng);
        let psi = evaluate(&out.repaired, &inst, &w, EvalMode::Scheduled).psi;
        if psi <= optimum * 1.02 {
            close += 1;
        }
    }
    assert!(close >= 80, "{close}/100");
}

#[test]
fn solver_finds_tiny_optima() {
    let mut hits = 0;
    for seed in 100..120u64 {
        let inst = tiny(seed);
        let optimum = oracle_solve(&inst).unwrap().distance;
        let best = mets::run(&inst, &SolverConfig::with_seed(seed)).unwrap().best_distance;
        assert!(best >= optimum - 1e-6, "seed {seed}: {best} beats the optimum {optimum}");
        if best - optimum <= 1e-6 {
            hits += 1;
        }
    }
    assert!(hits >= 19, "{hits}/20");
}
