//! Problem data: nodes, travel matrices, fleet and station parameters.
//!
//! Node indices follow a fixed layout: `0` is the depot, `1..=n` are
//! customers and `n+1..=n+s` are refuelling stations.

use crate::error::Error;

/// Index of a node in an [`Instance`].
pub type NodeId = usize;

/// The depot is always node 0.
pub const DEPOT: NodeId = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Depot,
    Customer,
    Station,
}

/// Scalar parameters shared by every vehicle and station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FleetParams {
    /// Maximum number of vehicles (routes).
    pub fleet_limit: usize,
    /// Distance units per hour.
    pub speed: f64,
    /// Route duration limit in hours.
    pub duration_limit: f64,
    /// Full tank, in energy units.
    pub energy_full: f64,
    /// Energy consumed per distance unit.
    pub consumption: f64,
    /// Refuelling duration in hours.
    pub refuel_time: f64,
    /// Number of vehicles a station can refuel at the same time.
    pub station_capacity: usize,
}

impl FleetParams {
    pub fn max_range(&self) -> f64 {
        self.energy_full / self.consumption
    }
}

/// Immutable problem data.
///
/// Distances are Euclidean over the node coordinates and travel times are
/// `distance / speed`, both kept at full double precision. Matrices are
/// therefore symmetric, which the local search relies on when it reverses
/// route segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    customers: usize,
    stations: usize,
    coords: Vec<(f64, f64)>,
    service: Vec<f64>,
    params: FleetParams,
    dist: Vec<f64>,
    time: Vec<f64>,
    nearest_station: Vec<NodeId>,
}

impl Instance {
    /// Builds an instance from coordinates.
    ///
    /// `coords` must hold `1 + customers + stations` entries in node order and
    /// `service` one duration per customer.
    pub fn new(
        name: impl Into<String>,
        customers: usize,
        stations: usize,
        coords: Vec<(f64, f64)>,
        service: Vec<f64>,
        params: FleetParams,
    ) -> Result<Self, Error> {
        let size = 1 + customers + stations;
        if customers == 0 {
            return Err(Error::InvalidInstance("at least one customer is required".into()));
        }
        if stations == 0 {
            return Err(Error::InvalidInstance("at least one station is required".into()));
        }
        if coords.len() != size {
            return Err(Error::InvalidInstance(format!(
                "expected {size} coordinates, got {}",
                coords.len()
            )));
        }
        if service.len() != customers {
            return Err(Error::InvalidInstance(format!(
                "expected {customers} service times, got {}",
                service.len()
            )));
        }
        if coords.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidInstance("coordinates must be finite".into()));
        }
        if service.iter().any(|&s| !(s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidInstance("service times must be finite and nonnegative".into()));
        }
        check_positive("speed", params.speed)?;
        check_positive("duration limit", params.duration_limit)?;
        check_positive("full energy", params.energy_full)?;
        check_positive("consumption rate", params.consumption)?;
        if !(params.refuel_time >= 0.0) || !params.refuel_time.is_finite() {
            return Err(Error::InvalidInstance("refuel time must be finite and nonnegative".into()));
        }
        if params.fleet_limit == 0 {
            return Err(Error::InvalidInstance("fleet limit must be at least 1".into()));
        }
        if params.station_capacity == 0 {
            return Err(Error::InvalidInstance("station capacity must be at least 1".into()));
        }

        let mut dist = vec![0.0; size * size];
        let mut time = vec![0.0; size * size];
        for i in 0..size {
            for j in 0..size {
                if i != j {
                    let (xi, yi) = coords[i];
                    let (xj, yj) = coords[j];
                    let d = (xi - xj).hypot(yi - yj);
                    dist[i * size + j] = d;
                    time[i * size + j] = d / params.speed;
                }
            }
        }

        let first_station = customers + 1;
        let nearest_station = (0..size)
            .map(|i| {
                (first_station..size)
                    .min_by(|&a, &b| dist[i * size + a].total_cmp(&dist[i * size + b]).then(a.cmp(&b)))
                    .expect("at least one station")
            })
            .collect();

        Ok(Instance {
            name: name.into(),
            customers,
            stations,
            coords,
            service,
            params,
            dist,
            time,
            nearest_station,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Number of customers `n`.
    pub fn customer_count(&self) -> usize {
        self.customers
    }

    /// Number of stations `s`.
    pub fn station_count(&self) -> usize {
        self.stations
    }

    pub fn node_count(&self) -> usize {
        1 + self.customers + self.stations
    }

    pub fn customers(&self) -> std::ops::RangeInclusive<NodeId> {
        1..=self.customers
    }

    pub fn stations(&self) -> std::ops::Range<NodeId> {
        self.customers + 1..self.node_count()
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        if node == DEPOT {
            NodeKind::Depot
        } else if node <= self.customers {
            NodeKind::Customer
        } else {
            NodeKind::Station
        }
    }

    #[inline]
    pub fn is_customer(&self, node: NodeId) -> bool {
        node != DEPOT && node <= self.customers
    }

    #[inline]
    pub fn is_station(&self, node: NodeId) -> bool {
        node > self.customers
    }

    #[inline]
    pub fn dist(&self, i: NodeId, j: NodeId) -> f64 {
        self.dist[i * self.node_count() + j]
    }

    #[inline]
    pub fn time(&self, i: NodeId, j: NodeId) -> f64 {
        self.time[i * self.node_count() + j]
    }

    /// Time spent at a node: customer service, refuel time at a station,
    /// nothing at the depot.
    #[inline]
    pub fn dwell(&self, node: NodeId) -> f64 {
        if node == DEPOT {
            0.0
        } else if node <= self.customers {
            self.service[node - 1]
        } else {
            self.params.refuel_time
        }
    }

    pub fn service_time(&self, customer: NodeId) -> f64 {
        self.service[customer - 1]
    }

    pub fn coords(&self, node: NodeId) -> (f64, f64) {
        self.coords[node]
    }

    pub fn params(&self) -> &FleetParams {
        &self.params
    }

    pub fn fleet_limit(&self) -> usize {
        self.params.fleet_limit
    }

    pub fn duration_limit(&self) -> f64 {
        self.params.duration_limit
    }

    /// `D_max = E_f / cr`.
    pub fn max_range(&self) -> f64 {
        self.params.max_range()
    }

    pub fn refuel_time(&self) -> f64 {
        self.params.refuel_time
    }

    pub fn station_capacity(&self) -> usize {
        self.params.station_capacity
    }

    /// Station closest to `node`, ties broken by lower id.
    #[inline]
    pub fn nearest_station(&self, node: NodeId) -> NodeId {
        self.nearest_station[node]
    }

    /// Returns a copy with different fleet parameters (matrices are rebuilt).
    pub fn with_params(&self, params: FleetParams) -> Result<Self, Error> {
        Instance::new(
            self.name.clone(),
            self.customers,
            self.stations,
            self.coords.clone(),
            self.service.clone(),
            params,
        )
    }
}

fn check_positive(what: &str, v: f64) -> Result<(), Error> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(format!("{what} must be positive, got {v}")))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn params() -> FleetParams {
        FleetParams {
            fleet_limit: 3,
            speed: 1.0,
            duration_limit: 100.0,
            energy_full: 50.0,
            consumption: 1.0,
            refuel_time: 0.5,
            station_capacity: 1,
        }
    }

    #[test]
    fn matrices_are_euclidean_and_symmetric() {
        let inst = Instance::new(
            "t",
            1,
            1,
            vec![(0.0, 0.0), (3.0, 4.0), (6.0, 8.0)],
            vec![0.0],
            FleetParams { speed: 2.0, ..params() },
        )
        .unwrap();
        assert_eq!(inst.dist(0, 1), 5.0);
        assert_eq!(inst.dist(1, 0), 5.0);
        assert_eq!(inst.dist(2, 2), 0.0);
        assert_eq!(inst.time(0, 2), 5.0);
        assert_eq!(inst.kind(2), NodeKind::Station);
        assert_eq!(inst.max_range(), 50.0);
    }

    #[test]
    fn nearest_station_breaks_ties_by_id() {
        let inst = Instance::new(
            "t",
            1,
            2,
            vec![(0.0, 0.0), (1.0, 0.0), (0.0, 2.0), (0.0, -2.0)],
            vec![0.0],
            params(),
        )
        .unwrap();
        assert_eq!(inst.nearest_station(0), 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        let coords = vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)];
        assert!(Instance::new("t", 1, 1, coords.clone(), vec![0.0], FleetParams { speed: 0.0, ..params() }).is_err());
        assert!(Instance::new("t", 1, 1, coords.clone(), vec![0.0], FleetParams { station_capacity: 0, ..params() }).is_err());
        assert!(Instance::new("t", 1, 1, coords.clone(), vec![], params()).is_err());
        assert!(Instance::new("t", 0, 2, coords, vec![], params()).is_err());
    }
}
