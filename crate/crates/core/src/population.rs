//! Feasible and infeasible subpopulations ranked by biased fitness.
//!
//! Diversity is the normalised Hamming distance between the customer
//! adjacencies of two solutions. Each subpopulation ranks its members by
//! quality and by diversity and combines both ranks into the biased
//! fitness `fit + (1 − nbE/nbP)·dc`, lower being better.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::Error;
use crate::eval::{evaluate, EvalMode, EvalReport, PenaltyWeights};
use crate::instance::{Instance, NodeId, DEPOT};
use crate::solution::{GiantTour, Solution};

/// Predecessor and successor of every customer, skipping stations.
/// Index 0 is unused.
pub fn customer_neighbors(sol: &Solution, inst: &Instance) -> Vec<(NodeId, NodeId)> {
    let mut out = vec![(DEPOT, DEPOT); inst.customer_count() + 1];
    for route in &sol.routes {
        let seq: Vec<NodeId> = route.nodes().iter().copied().filter(|&v| !inst.is_station(v)).collect();
        for k in 1..seq.len().saturating_sub(1) {
            out[seq[k]] = (seq[k - 1], seq[k + 1]);
        }
    }
    out
}

fn hamming_from_neighbors(a: &[(NodeId, NodeId)], b: &[(NodeId, NodeId)]) -> f64 {
    let n = a.len() - 1;
    let mut diff = 0usize;
    for i in 1..=n {
        diff += pair_mismatch(a[i], b[i]);
    }
    diff as f64 / (2 * n) as f64
}

/// Neighbours of one customer left unmatched, comparing the two pairs as
/// multisets.
fn pair_mismatch((p1, s1): (NodeId, NodeId), (p2, s2): (NodeId, NodeId)) -> usize {
    if (p1 == p2 && s1 == s2) || (p1 == s2 && s1 == p2) {
        0
    } else if p1 == p2 || p1 == s2 || s1 == p2 || s1 == s2 {
        1
    } else {
        2
    }
}

/// Normalised Hamming distance of customer adjacencies, in `[0, 1]`.
///
/// For every customer the pair of its neighbours is compared with the
/// pair in the other solution regardless of side, so reversing a route
/// changes nothing.
pub fn hamming_distance(a: &Solution, b: &Solution, inst: &Instance) -> f64 {
    hamming_from_neighbors(&customer_neighbors(a, inst), &customer_neighbors(b, inst))
}

/// A solution with its evaluation and population statistics.
#[derive(Debug, Clone)]
pub struct Individual {
    pub solution: Solution,
    /// Scheduled-mode evaluation under the weights of its subpopulation.
    pub report: EvalReport,
    neighbors: Vec<(NodeId, NodeId)>,
    key: Vec<Vec<NodeId>>,
    /// Average distance to the closest members, `Φ`.
    pub diversity: f64,
    /// Rank by `Ψ`, best first, from 1.
    pub fit_rank: usize,
    /// Rank by diversity, most diverse first, from 1.
    pub diversity_rank: usize,
    pub biased_fitness: f64,
}

impl Individual {
    pub fn new(solution: Solution, inst: &Instance, weights: &PenaltyWeights) -> Self {
        let report = evaluate(&solution, inst, weights, EvalMode::Scheduled);
        let neighbors = customer_neighbors(&solution, inst);
        let key = solution.canonical_key();
        Individual {
            solution,
            report,
            neighbors,
            key,
            diversity: 0.0,
            fit_rank: 1,
            diversity_rank: 1,
            biased_fitness: 1.0,
        }
    }

    pub fn psi(&self) -> f64 {
        self.report.psi
    }

    pub fn distance(&self) -> f64 {
        self.report.total_distance
    }

    pub fn is_feasible(&self) -> bool {
        self.report.feasible
    }

    pub fn is_clone_of(&self, other: &Individual) -> bool {
        self.key == other.key
    }

    pub fn hamming(&self, other: &Individual) -> f64 {
        hamming_from_neighbors(&self.neighbors, &other.neighbors)
    }

    pub fn giant_tour(&self, inst: &Instance) -> GiantTour {
        self.solution.giant_tour(inst)
    }

    fn reevaluate(&mut self, inst: &Instance, weights: &PenaltyWeights) {
        self.report = evaluate(&self.solution, inst, weights, EvalMode::Scheduled);
    }
}

/// Size bounds and ranking fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationParams {
    /// Size after survivor selection.
    pub mu: usize,
    /// Size that triggers survivor selection.
    pub lambda: usize,
    /// `el`: elite count is `el·n`.
    pub elite_fraction: f64,
    /// `nc`: diversity is averaged over the `nc·n` closest members.
    pub close_fraction: f64,
}

impl Default for PopulationParams {
    fn default() -> Self {
        PopulationParams { mu: 154, lambda: 222, elite_fraction: 0.5, close_fraction: 0.2 }
    }
}

/// Members sharing one feasibility class.
#[derive(Debug, Clone)]
pub struct Subpopulation {
    params: PopulationParams,
    customers: usize,
    members: Vec<Individual>,
    /// Pairwise Hamming distances, same order as `members`.
    dist: Vec<Vec<f64>>,
}

impl Subpopulation {
    pub fn new(params: PopulationParams, inst: &Instance) -> Self {
        Subpopulation { params, customers: inst.customer_count(), members: Vec::new(), dist: Vec::new() }
    }

    pub fn params(&self) -> &PopulationParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    /// `nbE = min(el·n, nbP)`.
    pub fn elite_count(&self) -> f64 {
        (self.params.elite_fraction * self.customers as f64).min(self.len() as f64)
    }

    /// Number of closest members averaged into `Φ`, between 1 and `nbP − 1`.
    pub fn close_count(&self) -> usize {
        let want = (self.params.close_fraction * self.customers as f64).round() as usize;
        want.clamp(1, self.len().saturating_sub(1).max(1))
    }

    /// Adds a member without refreshing statistics.
    pub fn push(&mut self, ind: Individual) {
        let row: Vec<f64> = self.members.iter().map(|m| m.hamming(&ind)).collect();
        for (r, &d) in self.dist.iter_mut().zip(&row) {
            r.push(d);
        }
        let mut row = row;
        row.push(0.0);
        self.dist.push(row);
        self.members.push(ind);
    }

    fn remove_many(&mut self, mut idx: Vec<usize>) {
        idx.sort_unstable();
        idx.dedup();
        for &i in idx.iter().rev() {
            self.members.remove(i);
            self.dist.remove(i);
            for r in &mut self.dist {
                r.remove(i);
            }
        }
    }

    /// Diversity of member `i` from the cached distances.
    fn diversity_of(&self, i: usize, scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend(self.dist[i].iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &d)| d));
        if scratch.is_empty() {
            return 0.0;
        }
        let k = self.close_count().min(scratch.len());
        if k < scratch.len() {
            scratch.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
        }
        scratch[..k].iter().sum::<f64>() / k as f64
    }

    /// Recomputes diversity, both ranks and biased fitness of every member.
    pub fn refresh(&mut self) {
        let n = self.len();
        if n == 0 {
            return;
        }
        let mut scratch = Vec::with_capacity(n);
        for i in 0..n {
            self.members[i].diversity = self.diversity_of(i, &mut scratch);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.members[a].psi().total_cmp(&self.members[b].psi()).then(a.cmp(&b)));
        for (rank, &i) in order.iter().enumerate() {
            self.members[i].fit_rank = rank + 1;
        }
        order.sort_by(|&a, &b| {
            self.members[b].diversity.total_cmp(&self.members[a].diversity).then(a.cmp(&b))
        });
        for (rank, &i) in order.iter().enumerate() {
            self.members[i].diversity_rank = rank + 1;
        }
        let coef = 1.0 - self.elite_count() / n as f64;
        for m in &mut self.members {
            m.biased_fitness = m.fit_rank as f64 + coef * m.diversity_rank as f64;
        }
    }

    /// Member with the lowest `Ψ`, ties by position.
    pub fn best(&self) -> Option<&Individual> {
        self.members.iter().min_by(|a, b| a.psi().total_cmp(&b.psi()))
    }

    fn best_index(&self) -> Option<usize> {
        (0..self.len()).min_by(|&a, &b| self.members[a].psi().total_cmp(&self.members[b].psi()).then(a.cmp(&b)))
    }

    /// Shrinks to `μ` members: first clones (keeping the best biased fitness
    /// of each group), then the worst biased fitness. Statistics are
    /// refreshed after each of the two removal batches. The member with the
    /// best `Ψ` is never removed in the second batch.
    pub fn select_survivors(&mut self) {
        let mu = self.params.mu;
        if self.len() <= mu {
            return;
        }
        self.refresh();
        let worse = |m: &[Individual], a: usize, b: usize| -> Ordering {
            m[b].biased_fitness
                .total_cmp(&m[a].biased_fitness)
                .then(m[b].psi().total_cmp(&m[a].psi()))
                .then(b.cmp(&a))
        };

        // Clones: every member of a clone group except its best.
        let mut clones = Vec::new();
        for i in 0..self.len() {
            let better_twin = (0..self.len()).any(|j| {
                j != i && self.members[j].is_clone_of(&self.members[i]) && worse(&self.members, j, i) == Ordering::Greater
            });
            if better_twin {
                clones.push(i);
            }
        }
        if !clones.is_empty() {
            clones.sort_by(|&a, &b| worse(&self.members, a, b));
            clones.truncate(self.len() - mu);
            self.remove_many(clones);
            self.refresh();
        }

        let excess = self.len().saturating_sub(mu);
        if excess > 0 {
            let keep = self.best_index();
            let mut order: Vec<usize> = (0..self.len()).filter(|&i| Some(i) != keep).collect();
            order.sort_by(|&a, &b| worse(&self.members, a, b));
            order.truncate(excess);
            self.remove_many(order);
            self.refresh();
        }
    }

    /// Re-evaluates every member under new weights and refreshes ranks.
    pub fn reevaluate(&mut self, inst: &Instance, weights: &PenaltyWeights) {
        for m in &mut self.members {
            m.reevaluate(inst, weights);
        }
        self.refresh();
    }
}

/// Both subpopulations.
#[derive(Debug, Clone)]
pub struct Population {
    pub feasible: Subpopulation,
    pub infeasible: Subpopulation,
}

impl Population {
    pub fn new(params: PopulationParams, inst: &Instance) -> Self {
        Population { feasible: Subpopulation::new(params, inst), infeasible: Subpopulation::new(params, inst) }
    }

    pub fn len(&self) -> usize {
        self.feasible.len() + self.infeasible.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Inserts by feasibility, refreshes the receiving subpopulation and
    /// runs survivor selection when it reaches `λ`. Individuals using more
    /// vehicles than the fleet allows are rejected; returns whether the
    /// individual was inserted.
    pub fn insert(&mut self, ind: Individual, inst: &Instance) -> bool {
        if ind.report.vehicles_used > inst.fleet_limit() {
            return false;
        }
        let sub = if ind.is_feasible() { &mut self.feasible } else { &mut self.infeasible };
        sub.push(ind);
        if sub.len() >= sub.params.lambda {
            sub.select_survivors();
        } else {
            sub.refresh();
        }
        true
    }

    /// Two uniform draws with replacement from both subpopulations; the
    /// lower biased fitness wins, then the lower `Ψ`, then a coin flip.
    pub fn binary_tournament<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<&Individual, Error> {
        binary_tournament(&self.feasible, &self.infeasible, rng)
    }
}

/// See [`Population::binary_tournament`].
pub fn binary_tournament<'p, R: Rng + ?Sized>(
    feasible: &'p Subpopulation,
    infeasible: &'p Subpopulation,
    rng: &mut R,
) -> Result<&'p Individual, Error> {
    let total = feasible.len() + infeasible.len();
    if total == 0 {
        return Err(Error::EmptyPopulation);
    }
    let pick = |k: usize| if k < feasible.len() { &feasible.members[k] } else { &infeasible.members[k - feasible.len()] };
    let a = pick(rng.gen_range(0..total));
    let b = pick(rng.gen_range(0..total));
    let order = a
        .biased_fitness
        .total_cmp(&b.biased_fitness)
        .then(a.psi().total_cmp(&b.psi()));
    Ok(match order {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal => {
            if rng.gen_bool(0.5) {
                a
            } else {
                b
            }
        }
    })
}

/// Order crossover with a uniformly drawn slice.
pub fn order_crossover<R: Rng + ?Sized>(p1: &GiantTour, p2: &GiantTour, rng: &mut R) -> GiantTour {
    let n = p1.len();
    let mut i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n);
    if i > j {
        std::mem::swap(&mut i, &mut j);
    }
    order_crossover_slice(p1, p2, i, j)
}

/// Keeps `p1[i..=j]` in place and fills the other positions, starting
/// after `j` and wrapping around, with the customers of `p2` in their `p2`
/// order from position `j + 1`.
pub fn order_crossover_slice(p1: &GiantTour, p2: &GiantTour, i: usize, j: usize) -> GiantTour {
    let a = p1.as_slice();
    let b = p2.as_slice();
    let n = a.len();
    let max = a.iter().chain(b).copied().max().unwrap_or(0);
    let mut taken = vec![false; max + 1];
    let mut child = vec![0; n];
    for k in i..=j {
        child[k] = a[k];
        taken[a[k]] = true;
    }
    let mut pos = (j + 1) % n;
    for k in 0..n {
        let c = b[(j + 1 + k) % n];
        if !taken[c] {
            taken[c] = true;
            child[pos] = c;
            pos = (pos + 1) % n;
        }
    }
    GiantTour::from_vec_unchecked(child)
}

/// Ring buffer of per-constraint satisfaction flags of recent offspring.
#[derive(Debug, Clone)]
pub struct FeasibilityHistory {
    period: usize,
    flags: std::collections::VecDeque<[bool; 3]>,
}

impl FeasibilityHistory {
    pub fn new(period: usize) -> Self {
        FeasibilityHistory { period, flags: std::collections::VecDeque::with_capacity(period) }
    }

    /// Records duration, range and station-capacity satisfaction.
    pub fn record(&mut self, duration: bool, range: bool, capacity: bool) {
        if self.flags.len() == self.period {
            self.flags.pop_front();
        }
        self.flags.push_back([duration, range, capacity]);
    }

    /// Fraction of recorded solutions satisfying each constraint.
    pub fn rates(&self) -> [f64; 3] {
        let n = self.flags.len().max(1) as f64;
        let mut out = [0.0; 3];
        for f in &self.flags {
            for k in 0..3 {
                out[k] += f64::from(u8::from(f[k]));
            }
        }
        out.map(|c| c / n)
    }
}

/// Satisfaction rate at or below this raises the weight.
pub const LOW_RATE: f64 = 0.15;
/// Satisfaction rate at or above this lowers the weight.
pub const HIGH_RATE: f64 = 0.25;

/// Raises a weight by 20% when its constraint is rarely satisfied and
/// lowers it by 15% when it is satisfied often.
pub fn adapt_weight(weight: f64, rate: f64) -> f64 {
    if rate <= LOW_RATE {
        weight * 1.2
    } else if rate >= HIGH_RATE {
        weight * 0.85
    } else {
        weight
    }
}

/// Applies [`adapt_weight`] to each weight with its own satisfaction rate
/// (overtime, mileage, capacity).
pub fn adapt_penalties(weights: &PenaltyWeights, rates: [f64; 3]) -> PenaltyWeights {
    PenaltyWeights {
        overtime: adapt_weight(weights.overtime, rates[0]),
        mileage: adapt_weight(weights.mileage, rates[1]),
        capacity: adapt_weight(weights.capacity, rates[2]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::FleetParams;
    use crate::solution::Route;
    use crate::testutil::{params, random_instance};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tour(v: &[usize]) -> GiantTour {
        GiantTour::from_vec_unchecked(v.to_vec())
    }

    fn random_individual(inst: &Instance, rng: &mut ChaCha8Rng) -> Individual {
        let mut perm: Vec<usize> = inst.customers().collect();
        perm.shuffle(rng);
        let cut = rng.gen_range(1..perm.len());
        let sol = Solution::new(vec![Route::from_interior(&perm[..cut]), Route::from_interior(&perm[cut..])]);
        Individual::new(sol, inst, &PenaltyWeights::default())
    }

    fn sub(inst: &Instance, size: usize, seed: u64, p: PopulationParams) -> Subpopulation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = Subpopulation::new(p, inst);
        for _ in 0..size {
            s.push(random_individual(inst, &mut rng));
        }
        s.refresh();
        s
    }

    #[test]
    fn hamming_examples() {
        let inst = random_instance(1, 4, 1, params());
        let a = Solution::new(vec![Route::from_interior(&[1, 2, 3, 4])]);
        assert_eq!(hamming_distance(&a, &a, &inst), 0.0);
        let rev = Solution::new(vec![Route::from_interior(&[4, 3, 2, 1])]);
        assert_eq!(hamming_distance(&a, &rev, &inst), 0.0);
        // station visits are transparent
        let with_station = Solution::new(vec![Route::from_interior(&[1, 5, 2, 3, 4])]);
        assert_eq!(hamming_distance(&a, &with_station, &inst), 0.0);
    }

    #[test]
    fn hamming_disjoint_adjacency_is_one() {
        let inst = random_instance(2, 6, 1, params());
        let a = Solution::new(vec![Route::from_interior(&[1, 2, 3]), Route::from_interior(&[4, 5, 6])]);
        // no customer keeps any neighbour, depot included
        let b = Solution::new(vec![Route::from_interior(&[2, 4, 1, 6, 3, 5])]);
        let na = customer_neighbors(&a, &inst);
        let nb = customer_neighbors(&b, &inst);
        for i in 1..=6 {
            let (p, s) = na[i];
            assert!(p != nb[i].0 && p != nb[i].1 && s != nb[i].0 && s != nb[i].1, "{i}");
        }
        assert_eq!(hamming_distance(&a, &b, &inst), 1.0);
    }

    #[test]
    fn hamming_hand_count() {
        let inst = random_instance(3, 4, 1, params());
        let a = Solution::new(vec![Route::from_interior(&[1, 2, 3, 4])]);
        let b = Solution::new(vec![Route::from_interior(&[1, 2, 4, 3])]);
        // 2: succ 3 vs {1, 4} differs. 3: pred 2 vs {4, 0} differs,
        // succ 4 matches. 4: pred 3 matches, succ 0 vs {2, 3} differs.
        assert_eq!(hamming_distance(&a, &b, &inst), 3.0 / 8.0);
    }

    #[test]
    fn clones_have_zero_diversity() {
        let inst = random_instance(4, 8, 1, params());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ind = random_individual(&inst, &mut rng);
        let mut s = Subpopulation::new(PopulationParams::default(), &inst);
        for _ in 0..4 {
            s.push(ind.clone());
        }
        s.refresh();
        assert!(s.members().iter().all(|m| m.diversity == 0.0));
    }

    #[test]
    fn diversity_matches_pairwise_oracle() {
        let inst = random_instance(5, 10, 1, params());
        // nc·n = 2
        let p = PopulationParams { close_fraction: 0.2, ..Default::default() };
        let s = sub(&inst, 5, 5, p);
        assert_eq!(s.close_count(), 2);
        for (i, m) in s.members().iter().enumerate() {
            let mut d: Vec<f64> = s
                .members()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, o)| hamming_distance(&m.solution, &o.solution, &inst))
                .collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!((m.diversity - (d[0] + d[1]) / 2.0).abs() < 1e-12);
        }
        let p1 = PopulationParams { close_fraction: 0.01, ..Default::default() };
        let s = sub(&inst, 5, 5, p1);
        assert_eq!(s.close_count(), 1);
    }

    #[test]
    fn ranks_and_biased_fitness() {
        let inst = random_instance(6, 10, 1, params());
        let s = sub(&inst, 3, 6, PopulationParams::default());
        let m = s.members();
        let by_psi = m.iter().min_by(|a, b| a.psi().total_cmp(&b.psi())).unwrap();
        assert_eq!(by_psi.fit_rank, 1);
        let by_div = m.iter().max_by(|a, b| a.diversity.total_cmp(&b.diversity)).unwrap();
        assert_eq!(by_div.diversity_rank, 1);
        // nbE = min(5, 3) = 3 = nbP: biased fitness reduces to fit
        assert_eq!(s.elite_count(), 3.0);
        for x in m {
            assert_eq!(x.biased_fitness, x.fit_rank as f64);
        }
        // hand table: larger subpopulation with coefficient 1 - 5/10
        let s = sub(&inst, 10, 7, PopulationParams::default());
        for x in s.members() {
            let fit = 1 + s.members().iter().filter(|o| o.psi() < x.psi()).count();
            assert_eq!(x.fit_rank, fit);
            assert_eq!(x.biased_fitness, x.fit_rank as f64 + 0.5 * x.diversity_rank as f64);
        }
    }

    #[test]
    fn tournament_basics() {
        let inst = random_instance(8, 8, 1, params());
        let p = PopulationParams::default();
        let empty = Subpopulation::new(p, &inst);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert!(matches!(binary_tournament(&empty, &empty, &mut rng), Err(Error::EmptyPopulation)));
        let one = sub(&inst, 1, 8, p);
        let picked = binary_tournament(&one, &empty, &mut rng).unwrap();
        assert_eq!(picked.solution, one.members()[0].solution);

        let mut two = sub(&inst, 2, 9, p);
        two.members[0].biased_fitness = 2.0;
        two.members[1].biased_fitness = 5.0;
        for _ in 0..50 {
            let w = binary_tournament(&two, &empty, &mut rng).unwrap();
            // a draw of the same member twice may return the 5.0 one
            assert!(w.biased_fitness == 2.0 || w.biased_fitness == 5.0);
        }
        let wins = (0..1000)
            .filter(|_| binary_tournament(&empty, &two, &mut rng).unwrap().biased_fitness == 2.0)
            .count();
        // expected 3/4
        assert!((700..=800).contains(&wins), "{wins}");
    }

    #[test]
    fn tournament_frequencies_follow_rank() {
        let inst = random_instance(10, 12, 1, params());
        let s = sub(&inst, 6, 10, PopulationParams::default());
        let empty = Subpopulation::new(PopulationParams::default(), &inst);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut counts = vec![0usize; 6];
        let mut order: Vec<usize> = (0..6).collect();
        order.sort_by(|&a, &b| s.members()[a].biased_fitness.total_cmp(&s.members()[b].biased_fitness));
        for _ in 0..10_000 {
            let w = binary_tournament(&s, &empty, &mut rng).unwrap();
            let i = s.members().iter().position(|m| std::ptr::eq(m, w)).unwrap();
            counts[order.iter().position(|&o| o == i).unwrap()] += 1;
        }
        for k in 1..6 {
            assert!(counts[k] < counts[k - 1], "{counts:?}");
        }
    }

    #[test]
    fn ox_examples() {
        let p1 = tour(&[1, 2, 3, 4, 5]);
        let p2 = tour(&[5, 4, 3, 2, 1]);
        assert_eq!(order_crossover_slice(&p1, &p2, 1, 2).as_slice(), &[4, 2, 3, 1, 5]);
        assert_eq!(order_crossover_slice(&p1, &p2, 0, 4), p1);
        assert_eq!(order_crossover_slice(&p1, &p1, 2, 3), p1);
    }

    proptest! {
        #[test]
        fn ox_yields_permutations(seed in 0u64..10_000, n in 2usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut a: Vec<usize> = (1..=n).collect();
            let mut b = a.clone();
            a.shuffle(&mut rng);
            b.shuffle(&mut rng);
            let child = order_crossover(&tour(&a), &tour(&b), &mut rng);
            let mut sorted = child.into_vec();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (1..=n).collect::<Vec<_>>());
        }

        #[test]
        fn hamming_is_symmetric_and_bounded(seed in 0u64..10_000) {
            let inst = random_instance(seed % 7, 9, 2, params());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_individual(&inst, &mut rng);
            let b = random_individual(&inst, &mut rng);
            let ab = hamming_distance(&a.solution, &b.solution, &inst);
            let ba = hamming_distance(&b.solution, &a.solution, &inst);
            prop_assert!(ab == ba && (0.0..=1.0).contains(&ab));
            prop_assert_eq!(hamming_distance(&a.solution, &a.solution, &inst), 0.0);
        }

        #[test]
        fn fit_ranking_is_scale_invariant(seed in 0u64..1000, scale in 0.01f64..100.0) {
            let inst = random_instance(seed % 5, 8, 1, params());
            let mut s = sub(&inst, 6, seed, PopulationParams::default());
            let before: Vec<usize> = s.members().iter().map(|m| m.fit_rank).collect();
            for m in &mut s.members {
                m.report.psi *= scale;
            }
            s.refresh();
            let after: Vec<usize> = s.members().iter().map(|m| m.fit_rank).collect();
            prop_assert_eq!(before, after);
        }
    }

    #[test]
    fn survivors_drop_clones_first() {
        let inst = random_instance(11, 10, 1, params());
        let p = PopulationParams { mu: 5, lambda: 8, ..Default::default() };
        let mut s = sub(&inst, 5, 11, p);
        let twin = s.members()[2].clone();
        for _ in 0..3 {
            s.push(twin.clone());
        }
        s.refresh();
        assert_eq!(s.len(), 8);
        s.select_survivors();
        assert_eq!(s.len(), 5);
        let clones = s.members().iter().filter(|m| m.is_clone_of(&twin)).count();
        assert_eq!(clones, 1);
        // the five distinct originals all survive
        assert_eq!(s.members().iter().map(|m| m.key.clone()).collect::<std::collections::BTreeSet<_>>().len(), 5);
    }

    #[test]
    fn survivors_without_clones_match_sort_and_truncate() {
        let inst = random_instance(12, 30, 1, params());
        let p = PopulationParams { mu: 10, lambda: 16, ..Default::default() };
        let mut s = sub(&inst, 16, 12, p);
        assert!(s.members().iter().all(|a| s.members().iter().filter(|b| a.is_clone_of(b)).count() == 1));
        let best = s.best_index().unwrap();
        let mut order: Vec<usize> = (0..16).filter(|&i| i != best).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&s.members()[a], &s.members()[b]);
            y.biased_fitness.total_cmp(&x.biased_fitness).then(y.psi().total_cmp(&x.psi())).then(b.cmp(&a))
        });
        let removed: std::collections::BTreeSet<usize> = order[..6].iter().copied().collect();
        let expected: Vec<Solution> =
            (0..16).filter(|i| !removed.contains(i)).map(|i| s.members()[i].solution.clone()).collect();
        s.select_survivors();
        let got: Vec<Solution> = s.members().iter().map(|m| m.solution.clone()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn insertion_routes_by_feasibility() {
        let inst = random_instance(13, 6, 1, FleetParams { duration_limit: 100.0, energy_full: 1e3, ..params() });
        let mut pop = Population::new(PopulationParams::default(), &inst);
        let ok = Individual::new(Solution::new(vec![Route::from_interior(&[1, 2, 3, 4, 5, 6])]), &inst, &PenaltyWeights::default());
        assert!(ok.is_feasible());
        assert!(pop.insert(ok, &inst));
        assert_eq!((pop.feasible.len(), pop.infeasible.len()), (1, 0));
        let too_many = Solution::new((1..=6).map(|c| Route::from_interior(&[c])).collect());
        let ind = Individual::new(too_many, &inst, &PenaltyWeights::default());
        assert!(!pop.insert(ind, &inst));
        assert_eq!(pop.len(), 1);
    }

    #[test]
    fn penalty_adaptation_sequence() {
        let mut w = 100.0;
        let mut seen = Vec::new();
        for rate in [0.10, 0.20, 0.30] {
            w = adapt_weight(w, rate);
            seen.push(w);
        }
        assert_eq!(seen, vec![120.0, 120.0, 102.0]);
        let pw = adapt_penalties(&PenaltyWeights::default(), [0.1, 0.2, 0.3]);
        assert_eq!(pw.overtime, 527.0 * 1.2);
        assert_eq!(pw.mileage, 430.0);
        assert_eq!(pw.capacity, 195.0 * 0.85);
    }

    #[test]
    fn history_keeps_last_period() {
        let mut h = FeasibilityHistory::new(4);
        for k in 0..10 {
            h.record(k % 2 == 0, true, k >= 8);
        }
        assert_eq!(h.rates(), [0.5, 1.0, 0.5]);
    }
}
