//! Small random instances for unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{FleetParams, Instance};

pub fn params() -> FleetParams {
    FleetParams {
        fleet_limit: 4,
        speed: 10.0,
        duration_limit: 8.0,
        energy_full: 40.0,
        consumption: 1.0,
        refuel_time: 0.5,
        station_capacity: 1,
    }
}

/// Depot at the centre of a 30 x 30 square, customers and stations uniform.
pub fn random_instance(seed: u64, n: usize, s: usize, params: FleetParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![(15.0, 15.0)];
    for _ in 0..n + s {
        coords.push((rng.gen_range(0.0..30.0), rng.gen_range(0.0..30.0)));
    }
    let service = (0..n).map(|_| rng.gen_range(0.0..0.5)).collect();
    Instance::new(format!("rand{seed}"), n, s, coords, service, params).unwrap()
}
