//! Efficient local search: nine move operators explored over granular
//! neighbour lists with incremental evaluation, followed by an optional
//! repair phase under inflated penalties.
//!
//! Moves are evaluated in zero-wait mode. Operators N1..N4 insert the
//! station nearest to the preceding customer when the receiving route gains
//! customers and has no station yet, and every applied move prunes the
//! stations of the routes it touched. N1..N3 may also move their block into
//! a new route when the fleet is not fully used.

mod moves;
mod state;

use rand::Rng;

pub use moves::{Move, Operator};
pub use state::SearchState;

/// Targets of `x` in enumeration order: its neighbours, then a new route.
fn targets(neighbors: &NeighborLists, x: NodeId) -> impl Iterator<Item = NodeId> + '_ {
    neighbors.of(x).iter().copied().chain(std::iter::once(DEPOT))
}

use crate::error::Error;
use crate::eval::{evaluate, EvalMode, PenaltyWeights};
use crate::instance::{Instance, NodeId, DEPOT};
use crate::solution::{Route, Solution};

/// A move must lower `Ψ` by more than this to be accepted.
pub const IMPROVEMENT_EPS: f64 = 1e-9;

/// For each customer, the closest other customers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborLists {
    alpha: usize,
    lists: Vec<Vec<NodeId>>,
}

impl NeighborLists {
    /// `α = max(5, ⌈n / 20⌉)` nearest customers, ties by lower id.
    pub fn new(inst: &Instance) -> Self {
        let n = inst.customer_count();
        let alpha = 5.max(n.div_ceil(20));
        let mut lists = vec![Vec::new(); n + 1];
        for x in inst.customers() {
            let mut others: Vec<NodeId> = inst.customers().filter(|&y| y != x).collect();
            others.sort_by(|&a, &b| inst.dist(x, a).total_cmp(&inst.dist(x, b)).then(a.cmp(&b)));
            others.truncate(alpha);
            lists[x] = others;
        }
        NeighborLists { alpha, lists }
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn of(&self, customer: NodeId) -> &[NodeId] {
        &self.lists[customer]
    }
}

impl SearchState<'_> {
    /// Exact zero-wait change of `Ψ` that [`SearchState::apply_move`] would realise.
    pub fn evaluate_move(&self, mv: &Move) -> Result<f64, Error> {
        let plan = moves::plan(self, mv).ok_or_else(|| Error::InvalidMove(format!("{mv:?}")))?;
        Ok(self.evaluate_plan(&plan))
    }

    pub fn apply_move(&mut self, mv: &Move) -> Result<(), Error> {
        let plan = moves::plan(self, mv).ok_or_else(|| Error::InvalidMove(format!("{mv:?}")))?;
        self.apply_plan(&plan);
        Ok(())
    }

    /// Calls `f` for every legal move of `op` in enumeration order: ascending
    /// `x`, then neighbour rank, then the new-route target.
    pub fn for_each_candidate(&self, op: Operator, neighbors: &NeighborLists, mut f: impl FnMut(Move)) {
        for x in self.instance().customers() {
            for y in targets(neighbors, x) {
                let mv = Move::new(op, x, y);
                if moves::plan(self, &mv).is_some() {
                    f(mv);
                }
            }
        }
    }

    /// Best move of `op` lowering `Ψ` by more than [`IMPROVEMENT_EPS`];
    /// the first one found wins ties.
    pub fn explore(&self, op: Operator, neighbors: &NeighborLists) -> Option<(Move, f64)> {
        let mut best: Option<(Move, f64)> = None;
        let mut threshold = -IMPROVEMENT_EPS;
        for x in self.instance().customers() {
            for y in targets(neighbors, x) {
                let mv = Move::new(op, x, y);
                if let Some(plan) = moves::plan(self, &mv) {
                    let delta = self.evaluate_plan(&plan);
                    if delta < threshold {
                        threshold = delta;
                        best = Some((mv, delta));
                    }
                }
            }
        }
        best
    }

    /// Runs the descent to a local optimum of all operators: the first
    /// operator with an improving move applies its best one, then
    /// exploration restarts from N1. Returns the number of applied moves.
    pub fn descend(&mut self, neighbors: &NeighborLists) -> usize {
        let mut applied = 0;
        'restart: loop {
            for op in Operator::ALL {
                if let Some((mv, _)) = self.explore(op, neighbors) {
                    self.apply_move(&mv).expect("explored moves are legal");
                    applied += 1;
                    continue 'restart;
                }
            }
            return applied;
        }
    }
}

/// Best move of one operator, see [`SearchState::explore`].
pub fn explore_neighborhood(state: &SearchState<'_>, op: Operator, neighbors: &NeighborLists) -> Option<(Move, f64)> {
    state.explore(op, neighbors)
}

/// Output of one local search call.
#[derive(Debug, Clone, PartialEq)]
pub struct ElsOutcome {
    /// Local optimum under the given weights.
    pub improved: Solution,
    /// Repaired copy of `improved`, or `improved` itself when no repair ran.
    pub repaired: Solution,
    pub repair_ran: bool,
}

/// Descent under `weights`; if the result is infeasible in scheduled mode,
/// with probability `repair_probability` a repair copy is produced as well.
pub fn els<R: Rng + ?Sized>(
    sol: &Solution,
    inst: &Instance,
    neighbors: &NeighborLists,
    weights: PenaltyWeights,
    repair_probability: f64,
    rng: &mut R,
) -> ElsOutcome {
    let mut state = SearchState::new(sol, inst, weights);
    state.descend(neighbors);
    let improved = state.to_solution();
    let feasible = evaluate(&improved, inst, &weights, EvalMode::Scheduled).feasible;
    if !feasible && rng.gen::<f64>() < repair_probability {
        state.set_weights(weights.scaled(10.0));
        state.descend(neighbors);
        ElsOutcome { improved, repaired: state.to_solution(), repair_ran: true }
    } else {
        ElsOutcome { repaired: improved.clone(), improved, repair_ran: false }
    }
}

/// Descent with every penalty weight multiplied by ten.
pub fn repair(sol: &Solution, inst: &Instance, neighbors: &NeighborLists, weights: PenaltyWeights) -> Solution {
    let mut state = SearchState::new(sol, inst, weights.scaled(10.0));
    state.descend(neighbors);
    state.to_solution()
}

/// Removes station visits that are not needed for the driving range.
///
/// Stations are examined in route order and a visit is dropped when the
/// path obtained by merging its two neighbouring paths is within the range.
/// Passes repeat until one removes nothing.
pub fn prune_afs(route: &Route, inst: &Instance) -> Route {
    let range = inst.max_range();
    let mut nodes = route.nodes().to_vec();
    loop {
        let mut changed = false;
        let mut j = 1;
        while j + 1 < nodes.len() {
            if inst.is_station(nodes[j]) {
                let start = (0..j).rev().find(|&k| k == 0 || inst.is_station(nodes[k])).unwrap_or(0);
                let end = (j + 1..nodes.len())
                    .find(|&k| k + 1 == nodes.len() || inst.is_station(nodes[k]))
                    .unwrap_or(nodes.len() - 1);
                let merged: f64 = nodes[start..=end]
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| start + k != j)
                    .map(|(_, &v)| v)
                    .collect::<Vec<_>>()
                    .windows(2)
                    .map(|w| inst.dist(w[0], w[1]))
                    .sum();
                if merged <= range {
                    nodes.remove(j);
                    changed = true;
                    continue;
                }
            }
            j += 1;
        }
        if !changed {
            break;
        }
    }
    Route::new(nodes)
}
