//! Plain-text instance and solution files.
//!
//! An instance file holds `KEY: value` header lines followed by a `NODES`
//! section:
//!
//! ```text
//! NAME: example
//! N: 2
//! S: 1
//! M: 2
//! SPEED: 40
//! TMAX: 7
//! EF: 160
//! CR: 1
//! TAU_S: 0.5
//! ETA: 1
//! TAU_C: 0.5
//! NODES
//! 0 DEPOT 0 0
//! 1 CUST 10 0
//! 2 CUST 0 10 0.25
//! 3 AFS 5 5
//! ```
//!
//! `TAU_C` is the service time of customers whose line has none. Blank
//! lines and text after `#` are ignored.

use std::collections::HashMap;

use crate::error::{Error, ParseError};
use crate::instance::{FleetParams, Instance};
use crate::solution::{Route, Solution};

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse(ParseError { line, column, message: message.into() })
}

/// Splits a line into whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (line[..s].chars().count() + 1, t)).collect()
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn number(line: usize, column: usize, tok: &str) -> Result<f64, Error> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(line, column, format!("expected a finite number, found `{tok}`"))),
    }
}

fn count(line: usize, column: usize, tok: &str) -> Result<usize, Error> {
    tok.parse::<usize>()
        .map_err(|_| err(line, column, format!("expected a nonnegative integer, found `{tok}`")))
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Depot,
    Customer,
    Station,
}

const KEYS: [&str; 11] = ["NAME", "N", "S", "M", "SPEED", "TMAX", "EF", "CR", "TAU_S", "ETA", "TAU_C"];

pub fn parse_instance(text: &str) -> Result<Instance, Error> {
    let mut header: HashMap<&str, (usize, usize, &str)> = HashMap::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, strip_comment(l)));
    let mut saw_nodes = false;
    for (ln, line) in lines.by_ref() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "NODES" {
            saw_nodes = true;
            break;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(err(ln, 1, format!("expected `KEY: value` or `NODES`, found `{trimmed}`")));
        };
        let key_col = line.len() - line.trim_start().len() + 1;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(err(ln, key_col, format!("unknown header key `{key}`")));
        }
        let value_col = key.len() + key_col + 1 + (value.len() - value.trim_start().len());
        let value = value.trim();
        if value.is_empty() {
            return Err(err(ln, value_col, format!("missing value for `{key}`")));
        }
        if header.insert(key, (ln, value_col, value)).is_some() {
            return Err(err(ln, key_col, format!("duplicate header key `{key}`")));
        }
    }
    let last_line = text.lines().count().max(1);
    if !saw_nodes {
        return Err(err(last_line, 1, "missing NODES section"));
    }
    let get = |key: &str| header.get(key).copied().ok_or_else(|| err(1, 1, format!("missing header key `{key}`")));
    let num = |key: &str| get(key).and_then(|(l, c, v)| number(l, c, v));
    let int = |key: &str| get(key).and_then(|(l, c, v)| count(l, c, v));

    let n = int("N")?;
    let s = int("S")?;
    let fleet_limit = int("M")?;
    let params = FleetParams {
        fleet_limit,
        speed: num("SPEED")?,
        duration_limit: num("TMAX")?,
        energy_full: num("EF")?,
        consumption: num("CR")?,
        refuel_time: num("TAU_S")?,
        station_capacity: int("ETA")?,
    };
    for (key, value) in [
        ("M", fleet_limit as f64),
        ("SPEED", params.speed),
        ("TMAX", params.duration_limit),
        ("EF", params.energy_full),
        ("CR", params.consumption),
        ("ETA", params.station_capacity as f64),
    ] {
        if value <= 0.0 {
            let (l, c, _) = get(key)?;
            return Err(err(l, c, format!("`{key}` must be positive")));
        }
    }
    let default_service = header.contains_key("TAU_C").then(|| num("TAU_C")).transpose()?;
    let name = header.get("NAME").map(|&(_, _, v)| v.to_string()).unwrap_or_default();

    let size = 1 + n + s;
    let mut coords: Vec<Option<(f64, f64)>> = vec![None; size];
    let mut service = vec![f64::NAN; n];
    for (ln, line) in lines {
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        if toks.len() < 4 || toks.len() > 5 {
            return Err(err(ln, 1, "node lines are `id kind x y [service]`"));
        }
        let (c_id, t_id) = toks[0];
        let id = count(ln, c_id, t_id)?;
        if id >= size {
            return Err(err(ln, c_id, format!("node id {id} out of range 0..{size}")));
        }
        if coords[id].is_some() {
            return Err(err(ln, c_id, format!("duplicate node id {id}")));
        }
        let (c_kind, t_kind) = toks[1];
        let kind = match t_kind {
            "DEPOT" => Kind::Depot,
            "CUST" => Kind::Customer,
            "AFS" => Kind::Station,
            other => return Err(err(ln, c_kind, format!("unknown node kind `{other}`"))),
        };
        let expected = match id {
            0 => Kind::Depot,
            i if i <= n => Kind::Customer,
            _ => Kind::Station,
        };
        if kind != expected {
            let what = match expected {
                Kind::Depot => "DEPOT",
                Kind::Customer => "CUST",
                Kind::Station => "AFS",
            };
            return Err(err(ln, c_kind, format!("node {id} must be {what}")));
        }
        let x = number(ln, toks[2].0, toks[2].1)?;
        let y = number(ln, toks[3].0, toks[3].1)?;
        coords[id] = Some((x, y));
        match (kind, toks.get(4)) {
            (Kind::Customer, Some(&(c, t))) => {
                let v = number(ln, c, t)?;
                if v < 0.0 {
                    return Err(err(ln, c, "service time must be nonnegative"));
                }
                service[id - 1] = v;
            }
            (Kind::Customer, None) => match default_service {
                Some(v) => service[id - 1] = v,
                None => return Err(err(ln, 1, format!("customer {id} has no service time and TAU_C is absent"))),
            },
            (_, Some(&(c, _))) => return Err(err(ln, c, "only customers take a service time")),
            (_, None) => {}
        }
    }
    let coords = coords
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| {
                let what = if i == 0 { "missing depot (node 0)".to_string() } else { format!("missing node {i}") };
                err(last_line, 1, what)
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Instance::new(name, n, s, coords, service, params)
}

pub fn write_instance(inst: &Instance) -> String {
    use std::fmt::Write;
    let p = inst.params();
    let mut out = String::new();
    if !inst.name().is_empty() {
        writeln!(out, "NAME: {}", inst.name()).unwrap();
    }
    writeln!(out, "N: {}", inst.customer_count()).unwrap();
    writeln!(out, "S: {}", inst.station_count()).unwrap();
    writeln!(out, "M: {}", p.fleet_limit).unwrap();
    writeln!(out, "SPEED: {}", p.speed).unwrap();
    writeln!(out, "TMAX: {}", p.duration_limit).unwrap();
    writeln!(out, "EF: {}", p.energy_full).unwrap();
    writeln!(out, "CR: {}", p.consumption).unwrap();
    writeln!(out, "TAU_S: {}", p.refuel_time).unwrap();
    writeln!(out, "ETA: {}", p.station_capacity).unwrap();
    writeln!(out, "NODES").unwrap();
    for v in 0..inst.node_count() {
        let (x, y) = inst.coords(v);
        let kind = if v == 0 {
            "DEPOT"
        } else if inst.is_customer(v) {
            "CUST"
        } else {
            "AFS"
        };
        if inst.is_customer(v) {
            writeln!(out, "{v} {kind} {x} {y} {}", inst.service_time(v)).unwrap();
        } else {
            writeln!(out, "{v} {kind} {x} {y}").unwrap();
        }
    }
    out
}

/// One route per line as space-separated node ids, depot endpoints
/// included. The solution is checked against the instance.
pub fn parse_solution(text: &str, inst: &Instance) -> Result<Solution, Error> {
    let mut routes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let toks = tokens(strip_comment(line));
        if toks.is_empty() {
            continue;
        }
        let nodes = toks
            .iter()
            .map(|&(c, t)| count(i + 1, c, t))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(&(c, _)) = toks.iter().zip(&nodes).find(|(_, &v)| v >= inst.node_count()).map(|(t, _)| t) {
            return Err(err(i + 1, c, "node id out of range"));
        }
        routes.push(Route::new(nodes));
    }
    let sol = Solution::new(routes);
    sol.validate(inst)?;
    Ok(sol)
}

pub fn write_solution(sol: &Solution) -> String {
    sol.to_string()
}
