//! The nine move operators, expressed as piece plans over the current routes.

use std::fmt;

use super::state::{Plan, RoutePlan, SearchState};
use crate::instance::{NodeId, DEPOT};

/// Move operators N1..N9.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    /// Remove `x` and place it after `y`.
    Insert,
    /// Move the arc `(x, x')` after `y`.
    InsertArc,
    /// Move the arc `(x, x')` after `y` as `(x', x)`.
    InsertReversedArc,
    /// Swap the arc `(x, x')` with `y`.
    SwapArc,
    /// Swap `x` and `y`.
    Swap,
    /// Swap the arcs `(x, x')` and `(y, y')`.
    SwapDoubleArcs,
    /// Same-route 2-opt: `(x, x'), (y, y')` become `(x, y), (x', y')`.
    TwoOpt,
    /// Two routes: `(x, x'), (y, y')` become `(x, y), (x', y')`.
    TwoOptStarReversed,
    /// Two routes: `(x, x'), (y, y')` become `(x, y'), (y, x')`.
    TwoOptStar,
}

impl Operator {
    /// In exploration order.
    pub const ALL: [Operator; 9] = [
        Operator::Insert,
        Operator::InsertArc,
        Operator::InsertReversedArc,
        Operator::SwapArc,
        Operator::Swap,
        Operator::SwapDoubleArcs,
        Operator::TwoOpt,
        Operator::TwoOptStarReversed,
        Operator::TwoOptStar,
    ];

    /// 1-based index as in N1..N9.
    pub fn index(self) -> usize {
        Operator::ALL.iter().position(|&o| o == self).unwrap() + 1
    }

    pub fn from_index(i: usize) -> Option<Operator> {
        i.checked_sub(1).and_then(|k| Operator::ALL.get(k).copied())
    }

    /// Whether the operator may insert a station into a route gaining
    /// customers.
    pub fn inserts_station(self) -> bool {
        self.index() <= 4
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}", self.index())
    }
}

/// An operator applied to customer `x` and neighbour customer `y`.
///
/// For the three insertion operators `y` may also be [`DEPOT`], which moves
/// the block into a new route while the fleet has a spare vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub op: Operator,
    pub x: NodeId,
    pub y: NodeId,
}

impl Move {
    pub fn new(op: Operator, x: NodeId, y: NodeId) -> Self {
        Move { op, x, y }
    }
}

/// Moves block `a..=b` of route `rx` after position `py` of route `ry`,
/// optionally reversed and optionally followed by a station.
fn insert_block(
    st: &SearchState<'_>,
    (rx, a, b): (usize, usize, usize),
    reversed: bool,
    (ry, py): (usize, usize),
    station: Option<NodeId>,
) -> Option<Plan> {
    let block = |p: &mut RoutePlan| {
        if reversed {
            p.rev(rx, a, b);
        } else {
            p.fwd(rx, a, b);
        }
    };
    let lx = st.route_nodes(rx).len() - 2;
    if rx == ry {
        if (a..=b).contains(&py) || (py + 1 == a && !reversed) {
            return None;
        }
        let mut p = RoutePlan::new(rx);
        if py < a {
            p.fwd(rx, 1, py);
            block(&mut p);
            p.fwd(rx, py + 1, a - 1).fwd(rx, b + 1, lx);
        } else {
            p.fwd(rx, 1, a - 1).fwd(rx, b + 1, py);
            block(&mut p);
            p.fwd(rx, py + 1, lx);
        }
        return Some(Plan::one(p));
    }
    let ly = st.route_nodes(ry).len() - 2;
    let mut px = RoutePlan::new(rx);
    px.fwd(rx, 1, a - 1).fwd(rx, b + 1, lx);
    let mut py_plan = RoutePlan::new(ry);
    py_plan.fwd(ry, 1, py);
    block(&mut py_plan);
    if let Some(s) = station {
        py_plan.node(s);
    }
    py_plan.fwd(ry, py + 1, ly);
    Some(Plan::two(px, py_plan))
}

/// Exchanges block `a1..=b1` of route `r1` with block `a2..=b2` of route
/// `r2`. A station, if given, follows the first block in its new route.
fn swap_blocks(
    st: &SearchState<'_>,
    (r1, a1, b1): (usize, usize, usize),
    (r2, a2, b2): (usize, usize, usize),
    station: Option<NodeId>,
) -> Option<Plan> {
    let l1 = st.route_nodes(r1).len() - 2;
    if r1 == r2 {
        let ((a1, b1), (a2, b2)) = if b1 < a2 {
            ((a1, b1), (a2, b2))
        } else if b2 < a1 {
            ((a2, b2), (a1, b1))
        } else {
            return None;
        };
        let mut p = RoutePlan::new(r1);
        p.fwd(r1, 1, a1 - 1)
            .fwd(r1, a2, b2)
            .fwd(r1, b1 + 1, a2 - 1)
            .fwd(r1, a1, b1)
            .fwd(r1, b2 + 1, l1);
        return Some(Plan::one(p));
    }
    let l2 = st.route_nodes(r2).len() - 2;
    let mut p1 = RoutePlan::new(r1);
    p1.fwd(r1, 1, a1 - 1).fwd(r2, a2, b2).fwd(r1, b1 + 1, l1);
    let mut p2 = RoutePlan::new(r2);
    p2.fwd(r2, 1, a2 - 1).fwd(r1, a1, b1);
    if let Some(s) = station {
        p2.node(s);
    }
    p2.fwd(r2, b2 + 1, l2);
    Some(Plan::two(p1, p2))
}

/// Plan of a move, or `None` when its preconditions fail or it would not
/// change the solution.
pub(crate) fn plan(st: &SearchState<'_>, mv: &Move) -> Option<Plan> {
    let inst = st.instance();
    let (x, y) = (mv.x, mv.y);
    if y == DEPOT && inst.is_customer(x) {
        return new_route(st, mv);
    }
    if x == y || !inst.is_customer(x) || !inst.is_customer(y) {
        return None;
    }
    let (rx, px) = st.place(x);
    let (ry, py) = st.place(y);
    let x_next = st.route_nodes(rx)[px + 1];
    let y_next = st.route_nodes(ry)[py + 1];
    let gains_station = |after: NodeId| (rx != ry && !st.route_has_station(ry)).then(|| inst.nearest_station(after));

    match mv.op {
        Operator::Insert => insert_block(st, (rx, px, px), false, (ry, py), gains_station(x)),
        Operator::InsertArc => {
            if !inst.is_customer(x_next) {
                return None;
            }
            insert_block(st, (rx, px, px + 1), false, (ry, py), gains_station(x_next))
        }
        Operator::InsertReversedArc => {
            if !inst.is_customer(x_next) {
                return None;
            }
            insert_block(st, (rx, px, px + 1), true, (ry, py), gains_station(x))
        }
        Operator::SwapArc => {
            if !inst.is_customer(x_next) {
                return None;
            }
            swap_blocks(st, (rx, px, px + 1), (ry, py, py), gains_station(x_next))
        }
        Operator::Swap => swap_blocks(st, (rx, px, px), (ry, py, py), None),
        Operator::SwapDoubleArcs => {
            if !inst.is_customer(x_next) || !inst.is_customer(y_next) {
                return None;
            }
            swap_blocks(st, (rx, px, px + 1), (ry, py, py + 1), None)
        }
        Operator::TwoOpt => {
            if rx != ry {
                return None;
            }
            let (lo, hi) = (px.min(py), px.max(py));
            if hi < lo + 2 {
                return None;
            }
            let last = st.route_nodes(rx).len() - 2;
            let mut p = RoutePlan::new(rx);
            p.fwd(rx, 1, lo).rev(rx, lo + 1, hi).fwd(rx, hi + 1, last);
            Some(Plan::one(p))
        }
        Operator::TwoOptStarReversed => {
            if rx == ry {
                return None;
            }
            let (lx, ly) = (st.route_nodes(rx).len() - 2, st.route_nodes(ry).len() - 2);
            let mut p1 = RoutePlan::new(rx);
            p1.fwd(rx, 1, px).rev(ry, 1, py);
            let mut p2 = RoutePlan::new(ry);
            p2.rev(rx, px + 1, lx).fwd(ry, py + 1, ly);
            Some(Plan::two(p1, p2))
        }
        Operator::TwoOptStar => {
            if rx == ry {
                return None;
            }
            let (lx, ly) = (st.route_nodes(rx).len() - 2, st.route_nodes(ry).len() - 2);
            let mut p1 = RoutePlan::new(rx);
            p1.fwd(rx, 1, px).fwd(ry, py + 1, ly);
            let mut p2 = RoutePlan::new(ry);
            p2.fwd(ry, 1, py).fwd(rx, px + 1, lx);
            Some(Plan::two(p1, p2))
        }
    }
}

/// N1..N3 with the block opening a new route, followed by the station
/// nearest to its last node as the new route has none.
fn new_route(st: &SearchState<'_>, mv: &Move) -> Option<Plan> {
    let inst = st.instance();
    if st.route_count() >= inst.fleet_limit() {
        return None;
    }
    let (rx, px) = st.place(mv.x);
    let nodes = st.route_nodes(rx);
    let x_next = nodes[px + 1];
    let (a, b, reversed) = match mv.op {
        Operator::Insert => (px, px, false),
        Operator::InsertArc if inst.is_customer(x_next) => (px, px + 1, false),
        Operator::InsertReversedArc if inst.is_customer(x_next) => (px, px + 1, true),
        _ => return None,
    };
    let customers_left = nodes[1..a].iter().chain(&nodes[b + 1..]).any(|&v| inst.is_customer(v));
    if !customers_left {
        return None;
    }
    let lx = nodes.len() - 2;
    let mut old = RoutePlan::new(rx);
    old.fwd(rx, 1, a - 1).fwd(rx, b + 1, lx);
    let mut fresh = RoutePlan::new(st.route_count());
    let last = if reversed {
        fresh.rev(rx, a, b);
        nodes[a]
    } else {
        fresh.fwd(rx, a, b);
        nodes[b]
    };
    fresh.node(inst.nearest_station(last));
    Some(Plan::two(old, fresh))
}
