//! Search state with per-route prefix data and incremental move evaluation.
//!
//! A candidate route is described as a short list of [`Piece`]s: forward or
//! reversed slices of current routes plus single nodes. Walking the pieces
//! needs only the prefix arrays of the source routes and the station visits
//! inside each slice, so the cost of evaluating a move does not depend on
//! route length.

use std::cell::RefCell;

use crate::eval::{windows_excess, PenaltyWeights};
use crate::instance::{Instance, NodeId, DEPOT};
use crate::solution::{Route, Solution};

/// A slice of a current route, or a single node, in a candidate route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Piece {
    /// Positions `a..=b` of route `r`, in order.
    Fwd(usize, usize, usize),
    /// Positions `a..=b` of route `r`, traversed from `b` down to `a`.
    Rev(usize, usize, usize),
    Node(NodeId),
}

const MAX_PIECES: usize = 7;

/// Interior of one candidate route.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RoutePlan {
    /// Index of the current route this plan replaces; the route count
    /// for a new route.
    pub route: usize,
    pieces: [Piece; MAX_PIECES],
    len: usize,
}

impl RoutePlan {
    pub fn new(route: usize) -> Self {
        RoutePlan { route, pieces: [Piece::Node(DEPOT); MAX_PIECES], len: 0 }
    }

    /// Appends a forward slice; empty ranges are ignored.
    pub fn fwd(&mut self, r: usize, a: usize, b: usize) -> &mut Self {
        if a <= b {
            self.push(Piece::Fwd(r, a, b));
        }
        self
    }

    pub fn rev(&mut self, r: usize, a: usize, b: usize) -> &mut Self {
        if a <= b {
            self.push(Piece::Rev(r, a, b));
        }
        self
    }

    pub fn node(&mut self, v: NodeId) -> &mut Self {
        self.push(Piece::Node(v));
        self
    }

    fn push(&mut self, p: Piece) {
        self.pieces[self.len] = p;
        self.len += 1;
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces[..self.len]
    }
}

/// One or two route replacements.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Plan {
    plans: [RoutePlan; 2],
    len: usize,
}

impl Plan {
    pub fn one(a: RoutePlan) -> Self {
        Plan { plans: [a, a], len: 1 }
    }

    pub fn two(a: RoutePlan, b: RoutePlan) -> Self {
        Plan { plans: [a, b], len: 2 }
    }

    pub fn routes(&self) -> &[RoutePlan] {
        &self.plans[..self.len]
    }
}

/// Prefix data of one route, zero-wait timing.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RouteData {
    pub nodes: Vec<NodeId>,
    /// Distance from the depot to each position.
    pub cum: Vec<f64>,
    pub arr: Vec<f64>,
    pub dep: Vec<f64>,
    /// Positions of station visits, ascending.
    pub stations: Vec<usize>,
    /// Number of station visits strictly before each position; one extra
    /// entry at the end.
    pub st_rank: Vec<usize>,
    pub customers: usize,
    pub distance: f64,
    pub duration: f64,
    pub overtime: f64,
    pub over_mileage: f64,
}

impl RouteData {
    /// Same arithmetic as `eval::route_report` with no waiting.
    fn build(nodes: Vec<NodeId>, inst: &Instance) -> Self {
        let k = nodes.len();
        let range = inst.max_range();
        let mut cum = vec![0.0; k];
        let mut arr = vec![0.0; k];
        let mut dep = vec![0.0; k];
        let mut stations = Vec::new();
        let mut st_rank = vec![0; k + 1];
        let mut customers = 0;
        let mut distance = 0.0;
        let mut path = 0.0;
        let mut over_mileage = 0.0;
        for j in 1..k {
            let (a, b) = (nodes[j - 1], nodes[j]);
            let d = inst.dist(a, b);
            distance += d;
            path += d;
            cum[j] = distance;
            arr[j] = dep[j - 1] + inst.time(a, b);
            if inst.is_station(b) {
                dep[j] = arr[j] + inst.refuel_time();
                over_mileage += (path - range).max(0.0);
                path = 0.0;
                stations.push(j);
            } else {
                if inst.is_customer(b) {
                    customers += 1;
                }
                dep[j] = arr[j] + inst.dwell(b);
            }
        }
        over_mileage += (path - range).max(0.0);
        for j in 0..k {
            st_rank[j + 1] = st_rank[j] + usize::from(inst.is_station(nodes[j]));
        }
        let duration = arr[k - 1];
        RouteData {
            nodes,
            cum,
            arr,
            dep,
            stations,
            st_rank,
            customers,
            distance,
            duration,
            overtime: (duration - inst.duration_limit()).max(0.0),
            over_mileage,
        }
    }

    fn cost(&self, w: &PenaltyWeights) -> f64 {
        self.distance + w.overtime * self.overtime + w.mileage * self.over_mileage
    }

    /// Stations in positions `a..=b`.
    fn stations_in(&self, a: usize, b: usize) -> &[usize] {
        &self.stations[self.st_rank[a]..self.st_rank[b + 1]]
    }

    fn customers_in(&self, a: usize, b: usize) -> usize {
        (b + 1 - a) - (self.st_rank[b + 1] - self.st_rank[a])
    }
}

#[derive(Debug, Clone, Copy)]
struct Visit {
    station: NodeId,
    prev: NodeId,
    next: NodeId,
    arrival: f64,
    /// Distance since the previous full-energy point.
    path_before: f64,
    alive: bool,
}

/// Result of walking and pruning one candidate route.
#[derive(Debug, Clone, Default)]
struct Walk {
    visits: Vec<Visit>,
    tail_path: f64,
    distance: f64,
    duration: f64,
    customers: usize,
}

/// Evaluation of a whole plan.
#[derive(Debug, Clone, Default)]
struct Scratch {
    walks: [Walk; 2],
    starts: Vec<f64>,
    stations: Vec<NodeId>,
}

/// Solution under local search plus all cached aggregates.
#[derive(Debug, Clone)]
pub struct SearchState<'a> {
    inst: &'a Instance,
    weights: PenaltyWeights,
    pub(crate) routes: Vec<RouteData>,
    /// `(route, position)` of every customer; index 0 unused.
    place: Vec<(usize, usize)>,
    cra: Vec<i8>,
    /// Zero-wait refuel start times per station: `(route, start)`.
    visits: Vec<Vec<(usize, f64)>>,
    /// Zero-wait over-capacity per station.
    cs: Vec<f64>,
    psi: f64,
    scratch: RefCell<Scratch>,
}

impl<'a> SearchState<'a> {
    /// Routes without customers are dropped.
    pub fn new(sol: &Solution, inst: &'a Instance, weights: PenaltyWeights) -> Self {
        let mut st = SearchState {
            inst,
            weights,
            routes: Vec::new(),
            place: vec![(0, 0); inst.customer_count() + 1],
            cra: vec![-1; inst.customer_count() + 1],
            visits: vec![Vec::new(); inst.station_count()],
            cs: vec![0.0; inst.station_count()],
            psi: 0.0,
            scratch: RefCell::new(Scratch::default()),
        };
        let routes = sol
            .routes
            .iter()
            .filter(|r| r.customers(inst).next().is_some())
            .map(|r| r.nodes().to_vec())
            .collect();
        st.rebuild(routes);
        st
    }

    fn rebuild(&mut self, routes: Vec<Vec<NodeId>>) {
        let inst = self.inst;
        self.routes = routes.into_iter().map(|n| RouteData::build(n, inst)).collect();
        for v in &mut self.visits {
            v.clear();
        }
        for r in 0..self.routes.len() {
            self.index_route(r);
        }
        for s in 0..self.cs.len() {
            self.cs[s] = self.station_excess(s);
        }
        self.refresh_psi();
    }

    fn index_route(&mut self, r: usize) {
        let first_station = self.inst.customer_count() + 1;
        let rd = &self.routes[r];
        let mut seen_station = false;
        for (j, &v) in rd.nodes.iter().enumerate() {
            if self.inst.is_station(v) {
                seen_station = true;
                self.visits[v - first_station].push((r, rd.arr[j]));
            } else if self.inst.is_customer(v) {
                self.place[v] = (r, j);
                self.cra[v] = if seen_station { 1 } else { -1 };
            }
        }
    }

    fn station_excess(&self, s: usize) -> f64 {
        let mut starts: Vec<f64> = self.visits[s].iter().map(|&(_, t)| t).collect();
        windows_excess(&mut starts, self.inst.refuel_time(), self.inst.station_capacity())
    }

    fn refresh_psi(&mut self) {
        let w = self.weights;
        let routes: f64 = self.routes.iter().map(|r| r.cost(&w)).sum();
        self.psi = routes + w.capacity * self.cs.iter().sum::<f64>();
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn weights(&self) -> PenaltyWeights {
        self.weights
    }

    /// Replaces the penalty weights and refreshes the cached objective.
    pub fn set_weights(&mut self, weights: PenaltyWeights) {
        self.weights = weights;
        self.refresh_psi();
    }

    /// Zero-wait `Ψ` of the current solution.
    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn route_count(&self) -> usize {
        self.routes.len()
    }

    /// `(route, position)` of a customer.
    pub fn place(&self, customer: NodeId) -> (usize, usize) {
        self.place[customer]
    }

    /// −1 if no station precedes the customer in its route, +1 otherwise.
    pub fn cra(&self, customer: NodeId) -> i8 {
        self.cra[customer]
    }

    pub fn route_nodes(&self, r: usize) -> &[NodeId] {
        &self.routes[r].nodes
    }

    pub fn route_has_station(&self, r: usize) -> bool {
        !self.routes[r].stations.is_empty()
    }

    /// Node right after a customer in its route.
    pub fn successor(&self, customer: NodeId) -> NodeId {
        let (r, p) = self.place[customer];
        self.routes[r].nodes[p + 1]
    }

    pub fn to_solution(&self) -> Solution {
        Solution::new(self.routes.iter().map(|r| Route::new(r.nodes.clone())).collect())
    }

    /// Compares every cache against a rebuild from the route sequences.
    pub fn is_consistent(&self) -> bool {
        let fresh = SearchState::new(&self.to_solution(), self.inst, self.weights);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
        let mut sorted_a = self.visits.clone();
        let mut sorted_b = fresh.visits.clone();
        for v in sorted_a.iter_mut().chain(sorted_b.iter_mut()) {
            v.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
        }
        self.routes == fresh.routes
            && self.place[1..] == fresh.place[1..]
            && self.cra[1..] == fresh.cra[1..]
            && sorted_a.iter().zip(&sorted_b).all(|(a, b)| {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.0 == y.0 && close(x.1, y.1))
            })
            && self.cs.iter().zip(&fresh.cs).all(|(&a, &b)| close(a, b))
            && close(self.psi, fresh.psi)
    }

    /// Change of `Ψ` if `plan` were applied, station pruning included.
    pub(crate) fn evaluate_plan(&self, plan: &Plan) -> f64 {
        self.evaluate_with(plan, &mut self.scratch.borrow_mut())
    }

    fn evaluate_with(&self, plan: &Plan, scratch: &mut Scratch) -> f64 {
        let w = self.weights;
        let range = self.inst.max_range();
        let tmax = self.inst.duration_limit();
        let mut delta = 0.0;
        for (k, rp) in plan.routes().iter().enumerate() {
            let walk = &mut scratch.walks[k];
            self.walk(rp, walk);
            self.prune(walk);
            if let Some(old) = self.routes.get(rp.route) {
                delta -= old.cost(&w);
            }
            if walk.customers > 0 {
                let mut over_mileage = 0.0;
                for v in walk.visits.iter().filter(|v| v.alive) {
                    over_mileage += (v.path_before - range).max(0.0);
                }
                over_mileage += (walk.tail_path - range).max(0.0);
                let overtime = (walk.duration - tmax).max(0.0);
                delta += walk.distance + w.overtime * overtime + w.mileage * over_mileage;
            }
        }

        // Stations whose timeline changes.
        let first_station = self.inst.customer_count() + 1;
        scratch.stations.clear();
        for (k, rp) in plan.routes().iter().enumerate() {
            if let Some(old) = self.routes.get(rp.route) {
                for &j in &old.stations {
                    scratch.stations.push(old.nodes[j] - first_station);
                }
            }
            if scratch.walks[k].customers > 0 {
                for v in scratch.walks[k].visits.iter().filter(|v| v.alive) {
                    scratch.stations.push(v.station - first_station);
                }
            }
        }
        if scratch.stations.is_empty() {
            return delta;
        }
        scratch.stations.sort_unstable();
        scratch.stations.dedup();
        let touched = plan.routes();
        let mut cs_delta = 0.0;
        for i in 0..scratch.stations.len() {
            let s = scratch.stations[i];
            scratch.starts.clear();
            for &(r, t) in &self.visits[s] {
                if touched.iter().all(|rp| rp.route != r) {
                    scratch.starts.push(t);
                }
            }
            for k in 0..touched.len() {
                if scratch.walks[k].customers > 0 {
                    for v in &scratch.walks[k].visits {
                        if v.alive && v.station - first_station == s {
                            scratch.starts.push(v.arrival);
                        }
                    }
                }
            }
            let new_cs = windows_excess(&mut scratch.starts, self.inst.refuel_time(), self.inst.station_capacity());
            cs_delta += new_cs - self.cs[s];
        }
        delta + w.capacity * cs_delta
    }

    /// Computes distance, duration, station visits and path lengths of a
    /// candidate route from the prefix data of its source routes.
    fn walk(&self, rp: &RoutePlan, out: &mut Walk) {
        let inst = self.inst;
        out.visits.clear();
        out.customers = 0;
        let mut last = DEPOT;
        let mut time = 0.0;
        let mut dist = 0.0;
        let mut path = 0.0;
        // visit waiting for its successor node
        let mut pending: Option<usize> = None;

        for &piece in rp.pieces() {
            match piece {
                Piece::Node(v) => {
                    let d = inst.dist(last, v);
                    dist += d;
                    path += d;
                    let a = time + inst.time(last, v);
                    if let Some(i) = pending.take() {
                        out.visits[i].next = v;
                    }
                    if inst.is_station(v) {
                        out.visits.push(Visit { station: v, prev: last, next: DEPOT, arrival: a, path_before: path, alive: true });
                        pending = Some(out.visits.len() - 1);
                        path = 0.0;
                    } else {
                        out.customers += 1;
                    }
                    time = a + inst.dwell(v);
                    last = v;
                }
                Piece::Fwd(r, a, b) => {
                    let rd = &self.routes[r];
                    let first = rd.nodes[a];
                    let d = inst.dist(last, first);
                    dist += d;
                    path += d;
                    let start = time + inst.time(last, first);
                    if let Some(i) = pending.take() {
                        out.visits[i].next = first;
                    }
                    let mut anchor = a;
                    for &k in rd.stations_in(a, b) {
                        out.visits.push(Visit {
                            station: rd.nodes[k],
                            prev: if k == a { last } else { rd.nodes[k - 1] },
                            next: if k < b { rd.nodes[k + 1] } else { DEPOT },
                            arrival: start + (rd.arr[k] - rd.arr[a]),
                            path_before: path + (rd.cum[k] - rd.cum[anchor]),
                            alive: true,
                        });
                        if k == b {
                            pending = Some(out.visits.len() - 1);
                        }
                        path = 0.0;
                        anchor = k;
                    }
                    path += rd.cum[b] - rd.cum[anchor];
                    dist += rd.cum[b] - rd.cum[a];
                    out.customers += rd.customers_in(a, b);
                    time = start + (rd.dep[b] - rd.arr[a]);
                    last = rd.nodes[b];
                }
                Piece::Rev(r, a, b) => {
                    let rd = &self.routes[r];
                    let first = rd.nodes[b];
                    let d = inst.dist(last, first);
                    dist += d;
                    path += d;
                    let start = time + inst.time(last, first);
                    if let Some(i) = pending.take() {
                        out.visits[i].next = first;
                    }
                    let mut anchor = b;
                    for &k in rd.stations_in(a, b).iter().rev() {
                        out.visits.push(Visit {
                            station: rd.nodes[k],
                            prev: if k == b { last } else { rd.nodes[k + 1] },
                            next: if k > a { rd.nodes[k - 1] } else { DEPOT },
                            arrival: start + (rd.dep[b] - rd.dep[k]),
                            path_before: path + (rd.cum[anchor] - rd.cum[k]),
                            alive: true,
                        });
                        if k == a {
                            pending = Some(out.visits.len() - 1);
                        }
                        path = 0.0;
                        anchor = k;
                    }
                    path += rd.cum[anchor] - rd.cum[a];
                    dist += rd.cum[b] - rd.cum[a];
                    out.customers += rd.customers_in(a, b);
                    time = start + (rd.dep[b] - rd.arr[a]);
                    last = rd.nodes[a];
                }
            }
        }
        let d = inst.dist(last, DEPOT);
        out.distance = dist + d;
        out.tail_path = path + d;
        out.duration = time + inst.time(last, DEPOT);
    }

    /// Station pruning on a walked route: passes in visit order removing
    /// every station whose merged path fits the range, until a pass removes
    /// nothing.
    fn prune(&self, walk: &mut Walk) {
        let inst = self.inst;
        let range = inst.max_range();
        let m = walk.visits.len();
        loop {
            let mut changed = false;
            for i in 0..m {
                if !walk.visits[i].alive {
                    continue;
                }
                let Visit { station: s, prev: a, next: b, .. } = walk.visits[i];
                let after = (i + 1..m).find(|&j| walk.visits[j].alive);
                let path_after = after.map_or(walk.tail_path, |j| walk.visits[j].path_before);
                let saved = inst.dist(a, s) + inst.dist(s, b) - inst.dist(a, b);
                let merged = walk.visits[i].path_before + path_after - saved;
                if merged > range {
                    continue;
                }
                walk.visits[i].alive = false;
                changed = true;
                walk.distance -= saved;
                let shift = inst.time(a, b) - inst.time(a, s) - inst.time(s, b) - inst.refuel_time();
                walk.duration += shift;
                match after {
                    Some(j) => {
                        walk.visits[j].path_before = merged;
                        if walk.visits[j].prev == s && b == walk.visits[j].station {
                            walk.visits[j].prev = a;
                        }
                        for v in &mut walk.visits[j..] {
                            v.arrival += shift;
                        }
                    }
                    None => walk.tail_path = merged,
                }
                if let Some(p) = (0..i).rev().find(|&p| walk.visits[p].alive) {
                    if walk.visits[p].next == s && a == walk.visits[p].station {
                        walk.visits[p].next = b;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Applies a plan, pruning stations exactly as [`Self::evaluate_plan`]
    /// assumed. Routes left without customers are deleted.
    pub(crate) fn apply_plan(&mut self, plan: &Plan) {
        let mut new_routes: Vec<(usize, Vec<NodeId>)> = Vec::with_capacity(2);
        for rp in plan.routes() {
            let mut walk = Walk::default();
            self.walk(rp, &mut walk);
            self.prune(&mut walk);
            let mut nodes = vec![DEPOT];
            let mut visit = 0;
            for &piece in rp.pieces() {
                let mut push = |v: NodeId, nodes: &mut Vec<NodeId>| {
                    if self.inst.is_station(v) {
                        if walk.visits[visit].alive {
                            nodes.push(v);
                        }
                        visit += 1;
                    } else {
                        nodes.push(v);
                    }
                };
                match piece {
                    Piece::Node(v) => push(v, &mut nodes),
                    Piece::Fwd(r, a, b) => {
                        for &v in &self.routes[r].nodes[a..=b] {
                            push(v, &mut nodes);
                        }
                    }
                    Piece::Rev(r, a, b) => {
                        for &v in self.routes[r].nodes[a..=b].iter().rev() {
                            push(v, &mut nodes);
                        }
                    }
                }
            }
            nodes.push(DEPOT);
            new_routes.push((rp.route, nodes));
        }

        let inst = self.inst;
        let emptied = new_routes
            .iter()
            .any(|(_, n)| !n.iter().any(|&v| inst.is_customer(v)));
        let opened = new_routes.iter().any(|&(r, _)| r >= self.routes.len());
        if emptied || opened {
            let mut all: Vec<Option<Vec<NodeId>>> = self.routes.iter().map(|r| Some(r.nodes.clone())).collect();
            all.resize(self.routes.len() + usize::from(opened), None);
            for (r, nodes) in new_routes {
                all[r] = Some(nodes).filter(|n| n.iter().any(|&v| inst.is_customer(v)));
            }
            self.rebuild(all.into_iter().flatten().collect());
        } else {
            let first_station = inst.customer_count() + 1;
            let mut touched: Vec<usize> = Vec::new();
            for (r, _) in &new_routes {
                for &j in &self.routes[*r].stations {
                    touched.push(self.routes[*r].nodes[j] - first_station);
                }
            }
            for (r, nodes) in new_routes {
                for list in &mut self.visits {
                    list.retain(|&(q, _)| q != r);
                }
                self.routes[r] = RouteData::build(nodes, inst);
                for &j in &self.routes[r].stations {
                    touched.push(self.routes[r].nodes[j] - first_station);
                }
                self.index_route(r);
            }
            touched.sort_unstable();
            touched.dedup();
            for s in touched {
                self.cs[s] = self.station_excess(s);
            }
            self.refresh_psi();
        }
        debug_assert!(self.is_consistent());
    }
}
