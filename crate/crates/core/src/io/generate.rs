//! Synthetic benchmark instances.
//!
//! Central look-alikes put one station at the origin with customers spread
//! uniformly over a disk around it and the depot 80 miles (two hours) away.
//! Beijing look-alikes spread customers uniformly over a square city with
//! the depot at its centre and a grid of stations. Tiny instances are small
//! enough for the exhaustive oracle.
//!
//! Every coordinate is rounded to 12 significant digits so that written
//! files stay short and read back exactly.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::Error;
use crate::instance::{FleetParams, Instance};
use crate::io::oracle_solve;
use crate::solver::check_instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// 15 customers, one station with capacity 1, 15 vehicles, 7 h.
    SCentral,
    /// 25, 50 or 100 customers, one station, 7.5 h.
    MCentral(usize),
    /// `n` customers in a 40 × 40 mile city, capacity `n / 10`, 8 h.
    Beijing(usize),
    /// At most 6 customers and one station, for oracle checks.
    Tiny(usize),
}

impl Profile {
    /// Profile from a CLI name and an optional customer count.
    pub fn from_name(name: &str, n: Option<usize>) -> Result<Profile, Error> {
        let unknown = || Error::UnknownProfile(match n {
            Some(n) => format!("{name}({n})"),
            None => name.to_string(),
        });
        match (name, n) {
            ("s_central", None | Some(15)) => Ok(Profile::SCentral),
            ("m_central", Some(n @ (25 | 50 | 100))) => Ok(Profile::MCentral(n)),
            ("beijing", Some(n)) if n >= 10 => Ok(Profile::Beijing(n)),
            ("tiny", Some(n @ 1..=6)) => Ok(Profile::Tiny(n)),
            ("tiny", None) => Ok(Profile::Tiny(6)),
            _ => Err(unknown()),
        }
    }

    pub fn customers(&self) -> usize {
        match *self {
            Profile::SCentral => 15,
            Profile::MCentral(n) | Profile::Beijing(n) | Profile::Tiny(n) => n,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::SCentral => f.write_str("s_central"),
            Profile::MCentral(n) => write!(f, "m_central{n}"),
            Profile::Beijing(n) => write!(f, "beijing{n}"),
            Profile::Tiny(n) => write!(f, "tiny{n}"),
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    /// Accepts `s_central`, `m_central50`, `beijing400`, `tiny5` and the
    /// same names with a `_` before the count.
    fn from_str(s: &str) -> Result<Self, Error> {
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (name, digits) = s.split_at(split);
        let name = name.trim_end_matches('_');
        let n = if digits.is_empty() {
            None
        } else {
            Some(digits.parse().map_err(|_| Error::UnknownProfile(s.to_string()))?)
        };
        Profile::from_name(name, n)
    }
}

fn round12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn in_disk<R: Rng + ?Sized>(rng: &mut R, cx: f64, cy: f64, radius: f64) -> (f64, f64) {
    loop {
        let x: f64 = rng.gen_range(-1.0..1.0);
        let y: f64 = rng.gen_range(-1.0..1.0);
        if x * x + y * y <= 1.0 {
            return (round12(cx + radius * x), round12(cy + radius * y));
        }
    }
}

const SPEED: f64 = 40.0;
const RANGE: f64 = 160.0;
const HALF_HOUR: f64 = 0.5;
/// Radius of the customer area around the central station.
const CENTRAL_RADIUS: f64 = 15.0;
const DEPOT_TO_STATION: f64 = 80.0;
const CITY_SIDE: f64 = 40.0;

fn central<R: Rng + ?Sized>(name: String, n: usize, fleet: usize, eta: usize, tmax: f64, rng: &mut R) -> Result<Instance, Error> {
    let mut coords = vec![(DEPOT_TO_STATION, 0.0)];
    coords.extend((0..n).map(|_| in_disk(rng, 0.0, 0.0, CENTRAL_RADIUS)));
    coords.push((0.0, 0.0));
    let params = FleetParams {
        fleet_limit: fleet,
        speed: SPEED,
        duration_limit: tmax,
        energy_full: RANGE,
        consumption: 1.0,
        refuel_time: HALF_HOUR,
        station_capacity: eta,
    };
    Instance::new(name, n, 1, coords, vec![HALF_HOUR; n], params)
}

fn beijing<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Instance, Error> {
    let half = CITY_SIDE / 2.0;
    let mut coords = vec![(0.0, 0.0)];
    coords.extend((0..n).map(|_| (round12(rng.gen_range(-half..half)), round12(rng.gen_range(-half..half)))));
    // 3 × 3 grid of stations
    let stations: Vec<(f64, f64)> = (0..9)
        .map(|k| (round12(((k % 3) as f64 - 1.0) * half * 2.0 / 3.0), round12(((k / 3) as f64 - 1.0) * half * 2.0 / 3.0)))
        .collect();
    let s = stations.len();
    coords.extend(stations);
    let params = FleetParams {
        fleet_limit: n,
        speed: SPEED,
        duration_limit: 8.0,
        energy_full: RANGE,
        consumption: 1.0,
        refuel_time: HALF_HOUR,
        station_capacity: n / 10,
    };
    Instance::new(format!("beijing{n}"), n, s, coords, vec![HALF_HOUR; n], params)
}

/// Tiny instances: customers within 40 miles of the depot, a station
/// somewhere nearby, a 75-mile range and a 4-hour limit, so that some
/// instances need refuelling and most need more than one route. Rejects
/// draws where a customer cannot be served on its own or that have no
/// feasible solution at all.
fn tiny<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Instance, Error> {
    loop {
        let mut coords = vec![(0.0, 0.0)];
        coords.extend((0..n).map(|_| in_disk(rng, 0.0, 0.0, 40.0)));
        coords.push(in_disk(rng, 0.0, 0.0, 25.0));
        let service = (0..n).map(|_| round12(rng.gen_range(0.1..0.5))).collect();
        let params = FleetParams {
            fleet_limit: 3,
            speed: SPEED,
            duration_limit: 4.0,
            energy_full: 75.0,
            consumption: 1.0,
            refuel_time: HALF_HOUR,
            station_capacity: 1,
        };
        let inst = Instance::new(format!("tiny{n}"), n, 1, coords, service, params)?;
        if check_instance(&inst).is_ok() && oracle_solve(&inst).is_ok() {
            return Ok(inst);
        }
    }
}

/// Draws an instance of the given profile.
pub fn generate_instance<R: Rng + ?Sized>(profile: Profile, rng: &mut R) -> Result<Instance, Error> {
    match profile {
        Profile::SCentral => central("s_central".into(), 15, 15, 1, 7.0, rng),
        Profile::MCentral(n) => {
            let (eta, fleet) = match n {
                25 => (2, 7),
                50 => (3, 13),
                100 => (8, 25),
                _ => return Err(Error::UnknownProfile(format!("m_central({n})"))),
            };
            central(format!("m_central{n}"), n, fleet, eta, 7.5, rng)
        }
        Profile::Beijing(n) if n >= 10 => beijing(n, rng),
        Profile::Tiny(n) if (1..=6).contains(&n) => tiny(n, rng),
        other => Err(Error::UnknownProfile(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_instance, write_instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gen(p: Profile, seed: u64) -> Instance {
        generate_instance(p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn s_central_shape() {
        let inst = gen(Profile::SCentral, 1);
        assert_eq!(inst.customer_count(), 15);
        assert_eq!(inst.station_capacity(), 1);
        assert_eq!(inst.duration_limit(), 7.0);
        assert_eq!(inst.max_range(), 160.0);
        assert_eq!(inst.fleet_limit(), 15);
        assert_eq!(inst.time(0, inst.customer_count() + 1), 2.0);
        assert_eq!(inst.refuel_time(), 0.5);
        assert!(inst.customers().all(|c| inst.service_time(c) == 0.5));
    }

    #[test]
    fn m_central_shape() {
        for (n, eta, m) in [(25, 2, 7), (50, 3, 13), (100, 8, 25)] {
            let inst = gen(Profile::MCentral(n), 2);
            assert_eq!((inst.customer_count(), inst.station_capacity(), inst.fleet_limit()), (n, eta, m));
            assert_eq!(inst.duration_limit(), 7.5);
        }
    }

    #[test]
    fn beijing_shape() {
        let inst = gen(Profile::Beijing(400), 3);
        assert_eq!(inst.station_capacity(), 40);
        assert_eq!(inst.duration_limit(), 8.0);
        assert_eq!(inst.customer_count(), 400);
    }

    #[test]
    fn tiny_instances_are_feasible() {
        for seed in 0..30 {
            let inst = gen(Profile::Tiny(6), seed);
            assert!(check_instance(&inst).is_ok());
            assert!(oracle_solve(&inst).is_ok());
        }
    }

    #[test]
    fn profile_names() {
        assert_eq!("m_central50".parse::<Profile>().unwrap(), Profile::MCentral(50));
        assert_eq!("beijing_400".parse::<Profile>().unwrap(), Profile::Beijing(400));
        assert_eq!("s_central".parse::<Profile>().unwrap(), Profile::SCentral);
        assert!(matches!("m_central60".parse::<Profile>(), Err(Error::UnknownProfile(_))));
        assert!(matches!("paris".parse::<Profile>(), Err(Error::UnknownProfile(_))));
        assert!(matches!(Profile::from_name("beijing", None), Err(Error::UnknownProfile(_))));
    }

    #[test]
    fn same_seed_same_file() {
        for p in [Profile::SCentral, Profile::MCentral(25), Profile::Beijing(200), Profile::Tiny(5)] {
            let a = write_instance(&gen(p, 9));
            let b = write_instance(&gen(p, 9));
            assert_eq!(a, b);
            assert_eq!(parse_instance(&a).unwrap(), gen(p, 9));
        }
    }
}
