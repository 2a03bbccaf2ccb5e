//! Exhaustive search for tiny instances.
//!
//! Every route candidate is a customer subset in some order with up to two
//! station visits at any positions. Candidates that break the range or
//! whose zero-wait duration already exceeds the limit are dropped, since
//! waiting can only lengthen a route. Set partitions of the customers are
//! then combined from the remaining candidates in order of distance, with a
//! distance bound, and each full combination is checked with the
//! scheduled evaluation under every ordering of its routes.

use crate::error::Error;
use crate::eval::{evaluate, EvalMode, PenaltyWeights};
use crate::instance::{Instance, NodeId, DEPOT};
use crate::solution::{Route, Solution};

pub const MAX_CUSTOMERS: usize = 6;
pub const MAX_STATIONS: usize = 2;
pub const MAX_VEHICLES: usize = 4;
/// Station visits per route.
pub const MAX_VISITS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub distance: f64,
    pub solution: Solution,
}

struct Candidate {
    distance: f64,
    nodes: Vec<NodeId>,
}

fn permutations(items: &[NodeId]) -> Vec<Vec<NodeId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Distance, or `None` if a path is out of range or the zero-wait duration
/// is over the limit.
fn check_route(nodes: &[NodeId], inst: &Instance) -> Option<f64> {
    let mut total = 0.0;
    let mut path = 0.0;
    let mut duration = 0.0;
    for w in nodes.windows(2) {
        let d = inst.dist(w[0], w[1]);
        total += d;
        path += d;
        duration += inst.time(w[0], w[1]);
        if w[1] != DEPOT {
            duration += inst.dwell(w[1]);
        }
        if path > inst.max_range() {
            return None;
        }
        if inst.is_station(w[1]) {
            path = 0.0;
        }
    }
    (duration <= inst.duration_limit()).then_some(total)
}

/// Route candidates for one customer subset, shortest first.
fn candidates(customers: &[NodeId], inst: &Instance) -> Vec<Candidate> {
    let stations: Vec<NodeId> = inst.stations().collect();
    let mut out = Vec::new();
    let mut push = |nodes: Vec<NodeId>| {
        if let Some(distance) = check_route(&nodes, inst) {
            out.push(Candidate { distance, nodes });
        }
    };
    for perm in permutations(customers) {
        let k = perm.len();
        let build = |stops: &[(usize, NodeId)]| {
            let mut nodes = vec![DEPOT];
            let mut it = stops.iter().peekable();
            for gap in 0..=k {
                while let Some(&&(g, s)) = it.peek() {
                    if g != gap {
                        break;
                    }
                    nodes.push(s);
                    it.next();
                }
                if gap < k {
                    nodes.push(perm[gap]);
                }
            }
            nodes.push(DEPOT);
            nodes
        };
        push(build(&[]));
        for g1 in 0..=k {
            for &s1 in &stations {
                push(build(&[(g1, s1)]));
                if MAX_VISITS < 2 {
                    continue;
                }
                for g2 in g1..=k {
                    for &s2 in &stations {
                        if g1 == g2 && s1 == s2 {
                            continue;
                        }
                        push(build(&[(g1, s1), (g2, s2)]));
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    out
}

/// All set partitions of `0..n` into at most `max_blocks` blocks, as block
/// index per element.
fn set_partitions(n: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, max_blocks: usize, used: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..(used + 1).min(max_blocks) {
            cur.push(b);
            rec(i + 1, n, max_blocks, used.max(b + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, max_blocks, 0, &mut Vec::new(), &mut out);
    out
}

fn orderings(k: usize) -> Vec<Vec<usize>> {
    permutations(&(0..k).collect::<Vec<_>>())
}

/// Checks the chosen routes under every route ordering.
fn feasible_ordering(routes: &[&[NodeId]], inst: &Instance) -> Option<Solution> {
    let weights = PenaltyWeights::default();
    for order in orderings(routes.len()) {
        let sol = Solution::new(order.iter().map(|&i| Route::new(routes[i].to_vec())).collect());
        if evaluate(&sol, inst, &weights, EvalMode::Scheduled).feasible {
            return Some(sol);
        }
    }
    None
}

/// Minimum-distance feasible solution by exhaustive enumeration.
pub fn oracle_solve(inst: &Instance) -> Result<OracleResult, Error> {
    let n = inst.customer_count();
    if n > MAX_CUSTOMERS || inst.station_count() > MAX_STATIONS || inst.fleet_limit() > MAX_VEHICLES {
        return Err(Error::InstanceTooLarge(format!(
            "oracle handles at most {MAX_CUSTOMERS} customers, {MAX_STATIONS} stations and {MAX_VEHICLES} vehicles; \
             got {n}, {} and {}",
            inst.station_count(),
            inst.fleet_limit()
        )));
    }
    let customers: Vec<NodeId> = inst.customers().collect();
    let mut by_mask: Vec<Option<Vec<Candidate>>> = (0..1usize << n).map(|_| None).collect();
    let mut best: Option<OracleResult> = None;

    for partition in set_partitions(n, inst.fleet_limit()) {
        let blocks = partition.iter().max().map_or(0, |&b| b + 1);
        let mut masks = vec![0usize; blocks];
        for (i, &b) in partition.iter().enumerate() {
            masks[b] |= 1 << i;
        }
        for &m in &masks {
            if by_mask[m].is_none() {
                let members: Vec<NodeId> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| customers[i]).collect();
                by_mask[m] = Some(candidates(&members, inst));
            }
        }
        let lists: Vec<&[Candidate]> = masks.iter().map(|&m| by_mask[m].as_deref().unwrap()).collect();
        if lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        // suffix sums of the shortest candidate of each remaining block
        let mut rest = vec![0.0; blocks + 1];
        for b in (0..blocks).rev() {
            rest[b] = rest[b + 1] + lists[b][0].distance;
        }
        let mut chosen: Vec<&[NodeId]> = Vec::with_capacity(blocks);
        search(&lists, &rest, 0, 0.0, &mut chosen, inst, &mut best);
    }
    best.ok_or(Error::NoFeasibleSolution { least_violating: None })
}

fn search<'a>(
    lists: &[&'a [Candidate]],
    rest: &[f64],
    block: usize,
    partial: f64,
    chosen: &mut Vec<&'a [NodeId]>,
    inst: &Instance,
    best: &mut Option<OracleResult>,
) {
    if block == lists.len() {
        if let Some(solution) = feasible_ordering(chosen, inst) {
            let distance = solution.distance(inst);
            if best.as_ref().is_none_or(|b| distance < b.distance) {
                *best = Some(OracleResult { distance, solution });
            }
        }
        return;
    }
    for cand in lists[block] {
        let bound = partial + cand.distance + rest[block + 1];
        if best.as_ref().is_some_and(|b| bound >= b.distance) {
            break;
        }
        chosen.push(&cand.nodes);
        search(lists, rest, block + 1, partial + cand.distance, chosen, inst, best);
        chosen.pop();
    }
}
