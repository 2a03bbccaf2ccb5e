//! Routes, solutions and the giant-tour encoding.

use std::fmt;

use crate::error::Error;
use crate::instance::{Instance, NodeId, DEPOT};

/// A vehicle route: depot, visited customers and stations, depot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Route(Vec<NodeId>);

impl Route {
    /// Wraps a node sequence. Structure is checked by [`Solution::validate`].
    pub fn new(nodes: Vec<NodeId>) -> Self {
        Route(nodes)
    }

    /// `(depot, depot)`.
    pub fn empty() -> Self {
        Route(vec![DEPOT, DEPOT])
    }

    /// Depot, the given interior nodes in order, depot.
    pub fn from_interior(interior: &[NodeId]) -> Self {
        let mut nodes = Vec::with_capacity(interior.len() + 2);
        nodes.push(DEPOT);
        nodes.extend_from_slice(interior);
        nodes.push(DEPOT);
        Route(nodes)
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn nodes_mut(&mut self) -> &mut Vec<NodeId> {
        &mut self.0
    }

    pub fn into_nodes(self) -> Vec<NodeId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() <= 2
    }

    pub fn interior(&self) -> &[NodeId] {
        if self.0.len() <= 2 {
            &[]
        } else {
            &self.0[1..self.0.len() - 1]
        }
    }

    pub fn customers<'a>(&'a self, inst: &'a Instance) -> impl Iterator<Item = NodeId> + 'a {
        self.interior().iter().copied().filter(move |&v| inst.is_customer(v))
    }

    pub fn customer_count(&self, inst: &Instance) -> usize {
        self.customers(inst).count()
    }

    pub fn station_count(&self, inst: &Instance) -> usize {
        self.interior().iter().filter(|&&v| inst.is_station(v)).count()
    }

    pub fn has_station(&self, inst: &Instance) -> bool {
        self.interior().iter().any(|&v| inst.is_station(v))
    }

    /// Travel distance over consecutive pairs.
    pub fn distance(&self, inst: &Instance) -> f64 {
        self.0.windows(2).map(|w| inst.dist(w[0], w[1])).sum()
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A set of routes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub routes: Vec<Route>,
}

impl Solution {
    pub fn new(routes: Vec<Route>) -> Self {
        Solution { routes }
    }

    pub fn route_count(&self) -> usize {
        self.routes.len()
    }

    /// Checks depot endpoints, node ids, and that every customer is served
    /// exactly once. The fleet bound is not structural and is not checked.
    pub fn validate(&self, inst: &Instance) -> Result<(), Error> {
        let mut seen = vec![false; inst.customer_count() + 1];
        for (r, route) in self.routes.iter().enumerate() {
            let nodes = route.nodes();
            if nodes.len() < 2 || nodes[0] != DEPOT || nodes[nodes.len() - 1] != DEPOT {
                return Err(Error::MalformedSolution(format!(
                    "route {r} must start and end at the depot"
                )));
            }
            for &v in route.interior() {
                if v == DEPOT {
                    return Err(Error::MalformedSolution(format!(
                        "route {r} visits the depot in its interior"
                    )));
                }
                if v >= inst.node_count() {
                    return Err(Error::MalformedSolution(format!("route {r} visits unknown node {v}")));
                }
                if inst.is_customer(v) {
                    if seen[v] {
                        return Err(Error::MalformedSolution(format!("customer {v} is served twice")));
                    }
                    seen[v] = true;
                }
            }
        }
        if let Some(c) = (1..seen.len()).find(|&c| !seen[c]) {
            return Err(Error::MalformedSolution(format!("customer {c} is not served")));
        }
        Ok(())
    }

    pub fn distance(&self, inst: &Instance) -> f64 {
        self.routes.iter().map(|r| r.distance(inst)).sum()
    }

    /// Drops routes that serve no customer.
    pub fn without_empty_routes(mut self, inst: &Instance) -> Self {
        self.routes.retain(|r| r.customers(inst).next().is_some());
        self
    }

    /// Route-order-insensitive, orientation-sensitive identity used for
    /// clone detection.
    pub fn canonical_key(&self) -> Vec<Vec<NodeId>> {
        let mut key: Vec<Vec<NodeId>> = self
            .routes
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.nodes().to_vec())
            .collect();
        key.sort_unstable();
        key
    }

    /// Customers in route order with stations dropped.
    pub fn giant_tour(&self, inst: &Instance) -> GiantTour {
        GiantTour(self.routes.iter().flat_map(|r| r.customers(inst)).collect())
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.routes {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A permutation of all customers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GiantTour(Vec<NodeId>);

impl GiantTour {
    pub fn new(perm: Vec<NodeId>, inst: &Instance) -> Result<Self, Error> {
        let n = inst.customer_count();
        if perm.len() != n {
            return Err(Error::MalformedSolution(format!(
                "giant tour has {} entries, expected {n}",
                perm.len()
            )));
        }
        let mut seen = vec![false; n + 1];
        for &c in &perm {
            if c == 0 || c > n || seen[c] {
                return Err(Error::MalformedSolution(format!(
                    "giant tour is not a permutation of customers (at {c})"
                )));
            }
            seen[c] = true;
        }
        Ok(GiantTour(perm))
    }

    /// Wraps a sequence assumed to already be a permutation.
    pub(crate) fn from_vec_unchecked(perm: Vec<NodeId>) -> Self {
        GiantTour(perm)
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<NodeId> {
        self.0
    }
}
