//! Separate-constraint tour split.
//!
//! A giant tour is cut into routes greedily, in tour order, looking at a
//! single constraint per call: either the route duration limit or the
//! driving range. Which one is used is decided by a fair coin.

use rand::Rng;

use crate::error::{Error, SplitConstraint};
use crate::instance::{Instance, NodeId, DEPOT};
use crate::solution::{GiantTour, Route, Solution};

/// Splits with the duration limit or the driving range, each with
/// probability one half.
pub fn scts<R: Rng + ?Sized>(tour: &GiantTour, inst: &Instance, rng: &mut R) -> Result<Solution, Error> {
    let rho: f64 = rng.gen();
    if rho < 0.5 {
        split_tmax(tour, inst)
    } else {
        split_dmax(tour, inst)
    }
}

/// Appends customers to the current route while its zero-wait duration
/// stays strictly below the duration limit. No stations are inserted.
pub fn split_tmax(tour: &GiantTour, inst: &Instance) -> Result<Solution, Error> {
    let limit = inst.duration_limit();
    let perm = tour.as_slice();
    let mut routes = Vec::new();
    let mut next = 0;

    while next < perm.len() {
        let mut interior: Vec<NodeId> = Vec::new();
        // departure time from the last node of `interior`
        let mut departure = 0.0;
        let mut last = DEPOT;
        while next < perm.len() {
            let c = perm[next];
            let arrive = departure + inst.time(last, c);
            let leave = arrive + inst.dwell(c);
            if leave + inst.time(c, DEPOT) < limit {
                interior.push(c);
                departure = leave;
                last = c;
                next += 1;
            } else {
                break;
            }
        }
        if interior.is_empty() {
            return Err(Error::Unsplittable { customer: perm[next], constraint: SplitConstraint::Duration });
        }
        routes.push(Route::from_interior(&interior));
    }
    Ok(Solution::new(routes))
}

/// Builds routes `(depot, .., minAFS, .., depot)` around the station
/// nearest the depot. Each customer is tried at the end of the segment
/// before the station, then at the end of the segment after it; a route is
/// closed once a customer fits neither.
pub fn split_dmax(tour: &GiantTour, inst: &Instance) -> Result<Solution, Error> {
    let range = inst.max_range();
    let station = inst.nearest_station(DEPOT);
    let perm = tour.as_slice();
    let mut routes = Vec::new();
    let mut next = 0;

    while next < perm.len() {
        let mut before: Vec<NodeId> = Vec::new();
        let mut after: Vec<NodeId> = Vec::new();
        // distance from the depot to the last node of `before`
        let mut before_dist = 0.0;
        // distance from the station to the last node of `after`
        let mut after_dist = 0.0;
        while next < perm.len() {
            let c = perm[next];
            let last = before.last().copied().unwrap_or(DEPOT);
            let reach = before_dist + inst.dist(last, c);
            if reach + inst.dist(c, station) < range {
                before.push(c);
                before_dist = reach;
                next += 1;
                continue;
            }
            let last = after.last().copied().unwrap_or(station);
            let reach = after_dist + inst.dist(last, c);
            if reach + inst.dist(c, DEPOT) < range {
                after.push(c);
                after_dist = reach;
                next += 1;
                continue;
            }
            break;
        }
        if before.is_empty() && after.is_empty() {
            return Err(Error::Unsplittable { customer: perm[next], constraint: SplitConstraint::Range });
        }
        let mut interior = before;
        interior.push(station);
        interior.extend(after);
        routes.push(Route::from_interior(&interior));
    }
    Ok(Solution::new(routes))
}
