//! Route and solution evaluation.
//!
//! Two modes are supported. In [`EvalMode::ZeroWait`] vehicles never wait at
//! stations and congestion shows up as the over-capacity penalty computed
//! from the zero-wait refuelling windows. In [`EvalMode::Scheduled`] a
//! first-come-first-served simulation inserts waiting times so that no
//! station ever hosts more than its capacity; waits then count against the
//! route duration.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::Error;
use crate::instance::Instance;
use crate::solution::{Route, Solution};

/// Weights of the three penalty terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyWeights {
    /// Per hour of overtime.
    pub overtime: f64,
    /// Per distance unit beyond the driving range.
    pub mileage: f64,
    /// Per vehicle-hour of excess station occupancy.
    pub capacity: f64,
}

impl PenaltyWeights {
    pub fn new(overtime: f64, mileage: f64, capacity: f64) -> Result<Self, Error> {
        let w = PenaltyWeights { overtime, mileage, capacity };
        if [overtime, mileage, capacity].iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(w)
        } else {
            Err(Error::InvalidInstance(format!("penalty weights must be positive: {w:?}")))
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        PenaltyWeights {
            overtime: self.overtime * factor,
            mileage: self.mileage * factor,
            capacity: self.capacity * factor,
        }
    }
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        PenaltyWeights { overtime: 527.0, mileage: 430.0, capacity: 195.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    ZeroWait,
    Scheduled,
}

/// Everything derived for one route.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteReport {
    pub distance: f64,
    /// Arrival time back at the depot.
    pub duration: f64,
    pub arrival: Vec<f64>,
    pub departure: Vec<f64>,
    /// Energy on arrival at each position.
    pub energy_arrival: Vec<f64>,
    /// Energy on departure from each position.
    pub energy_departure: Vec<f64>,
    /// Waiting time at each position (zero except at station visits).
    pub waiting: Vec<f64>,
    /// Distance of each path between consecutive full-energy points.
    pub path_distances: Vec<f64>,
    pub overtime: f64,
    pub over_mileage: f64,
}

/// Derived quantities for a whole solution.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub routes: Vec<RouteReport>,
    /// Number of routes serving at least one node.
    pub vehicles_used: usize,
    pub total_distance: f64,
    /// Zero-wait over-capacity per station, indexed by `station - n - 1`.
    pub zero_wait_overcapacity: Vec<f64>,
    pub overtime: f64,
    pub over_mileage: f64,
    /// Excess station occupancy of the timeline used by this mode: the
    /// zero-wait windows, or the scheduled windows (always zero).
    pub over_capacity: f64,
    pub penalty: f64,
    pub psi: f64,
    pub feasible: bool,
}

impl EvalReport {
    pub fn is_feasible(&self) -> bool {
        self.feasible
    }
}

/// `Σ d[x_j][x_{j+1}]` over the route.
pub fn route_distance(route: &Route, inst: &Instance) -> f64 {
    route.distance(inst)
}

/// Route timing and energy given per-position waiting times.
pub fn route_report(route: &Route, inst: &Instance, waiting: Option<&[f64]>) -> RouteReport {
    let nodes = route.nodes();
    let k = nodes.len();
    let full = inst.params().energy_full;
    let cr = inst.params().consumption;
    let range = inst.max_range();

    let mut arrival = vec![0.0; k];
    let mut departure = vec![0.0; k];
    let mut energy_arrival = vec![full; k];
    let mut energy_departure = vec![full; k];
    let mut wait = vec![0.0; k];
    let mut path_distances = Vec::new();
    let mut distance = 0.0;
    let mut path = 0.0;

    for j in 1..k {
        let (a, b) = (nodes[j - 1], nodes[j]);
        let d = inst.dist(a, b);
        distance += d;
        path += d;
        arrival[j] = departure[j - 1] + inst.time(a, b);
        energy_arrival[j] = energy_departure[j - 1] - cr * d;
        if inst.is_station(b) {
            wait[j] = waiting.map_or(0.0, |w| w[j]);
            departure[j] = arrival[j] + inst.refuel_time() + wait[j];
            energy_departure[j] = full;
            path_distances.push(path);
            path = 0.0;
        } else {
            departure[j] = arrival[j] + inst.dwell(b);
            energy_departure[j] = energy_arrival[j];
        }
    }
    if k >= 2 {
        path_distances.push(path);
    }
    let duration = if k >= 2 { arrival[k - 1] } else { 0.0 };
    let overtime = (duration - inst.duration_limit()).max(0.0);
    let over_mileage = path_distances.iter().map(|p| (p - range).max(0.0)).sum();

    RouteReport {
        distance,
        duration,
        arrival,
        departure,
        energy_arrival,
        energy_departure,
        waiting: wait,
        path_distances,
        overtime,
        over_mileage,
    }
}

/// Per-position waiting times produced by a global first-come-first-served
/// simulation of all vehicles.
///
/// Vehicles leave the depot at time 0. A vehicle arriving at a station with
/// every slot busy waits for the earliest slot to free up. Simultaneous
/// arrivals are served by lower route index, then lower position.
pub fn schedule_waits(sol: &Solution, inst: &Instance) -> Vec<Vec<f64>> {
    #[derive(PartialEq)]
    struct Arrival {
        time: f64,
        route: usize,
        pos: usize,
    }
    impl Eq for Arrival {}
    impl Ord for Arrival {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.time
                .total_cmp(&other.time)
                .then(self.route.cmp(&other.route))
                .then(self.pos.cmp(&other.pos))
        }
    }
    impl PartialOrd for Arrival {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    // Drives a vehicle forward from `pos` (departing at `dep`) until it
    // reaches a station or the end of its route.
    fn advance(nodes: &[usize], inst: &Instance, mut pos: usize, mut dep: f64) -> Option<(f64, usize)> {
        while pos + 1 < nodes.len() {
            let arr = dep + inst.time(nodes[pos], nodes[pos + 1]);
            pos += 1;
            if inst.is_station(nodes[pos]) {
                return Some((arr, pos));
            }
            dep = arr + inst.dwell(nodes[pos]);
        }
        None
    }

    let capacity = inst.station_capacity();
    let first_station = inst.customer_count() + 1;
    let mut busy: Vec<BinaryHeap<Reverse<OrdF64>>> = vec![BinaryHeap::new(); inst.station_count()];
    let mut waits: Vec<Vec<f64>> = sol.routes.iter().map(|r| vec![0.0; r.len()]).collect();
    let mut queue = BinaryHeap::new();

    for (r, route) in sol.routes.iter().enumerate() {
        if let Some((time, pos)) = advance(route.nodes(), inst, 0, 0.0) {
            queue.push(Reverse(Arrival { time, route: r, pos }));
        }
    }

    while let Some(Reverse(Arrival { time, route, pos })) = queue.pop() {
        let nodes = sol.routes[route].nodes();
        let slots = &mut busy[nodes[pos] - first_station];
        let start = if slots.len() < capacity {
            time
        } else {
            let Reverse(OrdF64(free)) = slots.pop().expect("capacity >= 1");
            free.max(time)
        };
        let done = start + inst.refuel_time();
        slots.push(Reverse(OrdF64(done)));
        waits[route][pos] = start - time;
        if let Some((time, pos)) = advance(nodes, inst, pos, done) {
            queue.push(Reverse(Arrival { time, route, pos }));
        }
    }
    waits
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Event timeline of one station: sorted moments, the number of vehicles
/// refuelling right after each moment, and the gap to the next moment.
#[derive(Debug, Clone, PartialEq)]
pub struct AfsTimeline {
    pub moments: Vec<f64>,
    pub concurrent: Vec<usize>,
    pub intervals: Vec<f64>,
}

impl AfsTimeline {
    /// Builds the timeline of half-open refuelling windows `[start, end)`.
    pub fn from_windows(windows: &[(f64, f64)]) -> Self {
        let mut events: Vec<(f64, i32)> = Vec::with_capacity(windows.len() * 2);
        for &(s, e) in windows {
            events.push((s, 1));
            events.push((e, -1));
        }
        // Departures before arrivals at the same instant.
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut moments = Vec::new();
        let mut concurrent = Vec::new();
        let mut count: i64 = 0;
        let mut k = 0;
        while k < events.len() {
            let q = events[k].0;
            while k < events.len() && events[k].0 == q {
                count += events[k].1 as i64;
                k += 1;
            }
            moments.push(q);
            concurrent.push(count as usize);
        }
        let intervals = (0..moments.len())
            .map(|i| if i + 1 < moments.len() { moments[i + 1] - moments[i] } else { 0.0 })
            .collect();
        AfsTimeline { moments, concurrent, intervals }
    }

    /// `Σ_q max{0, N(q) − η}·Δ(q)`.
    pub fn excess(&self, capacity: usize) -> f64 {
        self.concurrent
            .iter()
            .zip(&self.intervals)
            .map(|(&n, &dt)| n.saturating_sub(capacity) as f64 * dt)
            .sum()
    }

    pub fn max_concurrent(&self) -> usize {
        self.concurrent.iter().copied().max().unwrap_or(0)
    }
}

/// Excess occupancy of equal-length windows starting at `starts`.
///
/// Sorts `starts` in place. Equivalent to
/// `AfsTimeline::from_windows(..).excess(capacity)` without allocating.
pub fn windows_excess(starts: &mut [f64], length: f64, capacity: usize) -> f64 {
    if starts.len() <= capacity || length <= 0.0 {
        return 0.0;
    }
    starts.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = starts.len();
    let (mut i, mut j) = (0usize, 0usize);
    let mut count = 0usize;
    let mut excess = 0.0;
    // Ends are `starts[j] + length`, so they come out sorted as well.
    while j < n {
        let next_start = if i < n { starts[i] } else { f64::INFINITY };
        let q = next_start.min(starts[j] + length);
        while j < n && starts[j] + length == q {
            count -= 1;
            j += 1;
        }
        while i < n && starts[i] == q {
            count += 1;
            i += 1;
        }
        if j < n && count > capacity {
            let next_start = if i < n { starts[i] } else { f64::INFINITY };
            let next = next_start.min(starts[j] + length);
            excess += (count - capacity) as f64 * (next - q);
        }
    }
    excess
}

/// Zero-wait refuelling windows of every station, indexed by `station - n - 1`.
pub fn zero_wait_windows(sol: &Solution, inst: &Instance) -> Vec<Vec<(f64, f64)>> {
    let mut windows = vec![Vec::new(); inst.station_count()];
    for route in &sol.routes {
        let rep = route_report(route, inst, None);
        collect_windows(route, &rep, inst, &mut windows);
    }
    windows
}

fn collect_windows(route: &Route, rep: &RouteReport, inst: &Instance, out: &mut [Vec<(f64, f64)>]) {
    let first_station = inst.customer_count() + 1;
    for (j, &v) in route.nodes().iter().enumerate() {
        if inst.is_station(v) {
            let start = rep.arrival[j] + rep.waiting[j];
            out[v - first_station].push((start, start + inst.refuel_time()));
        }
    }
}

/// Zero-wait over-capacity `cs(s)` of every station.
pub fn afs_overcapacity(sol: &Solution, inst: &Instance) -> Vec<f64> {
    zero_wait_windows(sol, inst)
        .iter()
        .map(|w| AfsTimeline::from_windows(w).excess(inst.station_capacity()))
        .collect()
}

/// Overtime and over-mileage penalty of one route.
pub fn route_penalty(rep: &RouteReport, weights: &PenaltyWeights) -> f64 {
    weights.overtime * rep.overtime + weights.mileage * rep.over_mileage
}

/// Evaluates a solution in the requested mode.
pub fn evaluate(sol: &Solution, inst: &Instance, weights: &PenaltyWeights, mode: EvalMode) -> EvalReport {
    let waits = match mode {
        EvalMode::ZeroWait => None,
        EvalMode::Scheduled => Some(schedule_waits(sol, inst)),
    };
    let routes: Vec<RouteReport> = sol
        .routes
        .iter()
        .enumerate()
        .map(|(r, route)| route_report(route, inst, waits.as_ref().map(|w| w[r].as_slice())))
        .collect();

    let zero_wait_overcapacity = match mode {
        EvalMode::ZeroWait => {
            let mut windows = vec![Vec::new(); inst.station_count()];
            for (route, rep) in sol.routes.iter().zip(&routes) {
                collect_windows(route, rep, inst, &mut windows);
            }
            windows
                .iter()
                .map(|w| AfsTimeline::from_windows(w).excess(inst.station_capacity()))
                .collect()
        }
        EvalMode::Scheduled => afs_overcapacity(sol, inst),
    };
    let over_capacity: f64 = match mode {
        EvalMode::ZeroWait => zero_wait_overcapacity.iter().sum(),
        EvalMode::Scheduled => {
            let mut windows = vec![Vec::new(); inst.station_count()];
            for (route, rep) in sol.routes.iter().zip(&routes) {
                collect_windows(route, rep, inst, &mut windows);
            }
            windows
                .iter()
                .map(|w| AfsTimeline::from_windows(w).excess(inst.station_capacity()))
                .sum()
        }
    };

    let total_distance: f64 = routes.iter().map(|r| r.distance).sum();
    let overtime: f64 = routes.iter().map(|r| r.overtime).sum();
    let over_mileage: f64 = routes.iter().map(|r| r.over_mileage).sum();
    let route_penalties: f64 = routes.iter().map(|r| route_penalty(r, weights)).sum();
    let penalty = route_penalties + weights.capacity * over_capacity;
    let vehicles_used = sol.routes.iter().filter(|r| !r.is_empty()).count();
    let feasible = overtime == 0.0
        && over_mileage == 0.0
        && over_capacity == 0.0
        && vehicles_used <= inst.fleet_limit();

    EvalReport {
        mode,
        routes,
        vehicles_used,
        total_distance,
        zero_wait_overcapacity,
        overtime,
        over_mileage,
        over_capacity,
        penalty,
        psi: total_distance + penalty,
        feasible,
    }
}

/// `P(φ) = Σ_r P(r) + ω_C·Σ_s cs(s)` in zero-wait mode.
pub fn solution_penalty(sol: &Solution, weights: &PenaltyWeights, inst: &Instance) -> f64 {
    evaluate(sol, inst, weights, EvalMode::ZeroWait).penalty
}

/// `Ψ(φ) = TD(φ) + P(φ)` in the given mode.
pub fn total_quality(sol: &Solution, weights: &PenaltyWeights, inst: &Instance, mode: EvalMode) -> f64 {
    evaluate(sol, inst, weights, mode).psi
}

/// Per-constraint verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Feasibility {
    /// Every route within the duration limit.
    pub duration: bool,
    /// Energy never negative, i.e. every path within the driving range.
    pub energy: bool,
    /// At most `M` vehicles.
    pub fleet: bool,
    /// Station occupancy never above capacity in the evaluated timeline.
    pub capacity: bool,
}

impl Feasibility {
    pub fn feasible(&self) -> bool {
        self.duration && self.energy && self.fleet && self.capacity
    }
}

/// Checks constraints on an evaluated solution. Structural violations
/// (depot endpoints, customers served once) are errors, not flags.
pub fn check_feasibility(sol: &Solution, report: &EvalReport, inst: &Instance) -> Result<Feasibility, Error> {
    sol.validate(inst)?;
    Ok(Feasibility {
        duration: report.overtime == 0.0,
        energy: report.over_mileage == 0.0,
        fleet: report.vehicles_used <= inst.fleet_limit(),
        capacity: report.over_capacity == 0.0,
    })
}

/// Zero-wait duration of a route, used by the split procedures.
pub fn zero_wait_duration(route: &Route, inst: &Instance) -> f64 {
    let nodes = route.nodes();
    let mut t = 0.0;
    for j in 1..nodes.len() {
        t += inst.time(nodes[j - 1], nodes[j]);
        if j + 1 < nodes.len() {
            t += inst.dwell(nodes[j]);
        }
    }
    t
}
