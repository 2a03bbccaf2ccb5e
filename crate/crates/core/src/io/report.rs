//! Per-run CSV records, per-instance summaries and best-known values.

use std::collections::BTreeMap;

/// Instance name to best-known total distance.
pub type BksTable = BTreeMap<String, f64>;

const S_CENTRAL: [f64; 10] = [953.94, 948.69, 943.12, 947.98, 714.55, 844.43, 862.68, 712.83, 855.43, 901.19];
const M_CENTRAL_25: [f64; 10] =
    [1129.71, 1113.80, 1320.27, 1118.87, 1109.55, 1089.92, 1103.82, 1134.93, 1275.57, 1311.53];
const M_CENTRAL_50: [f64; 10] =
    [2441.41, 2241.35, 2230.13, 2193.74, 2393.32, 2380.99, 2221.61, 2415.43, 2241.03, 2402.03];
const M_CENTRAL_100: [f64; 10] =
    [4645.27, 4479.99, 4447.56, 4257.75, 4465.08, 4257.08, 4462.69, 4436.81, 4507.85, 4366.85];

/// Best-known values of the Central sets, keyed `S-Central_k` and
/// `M-Central{25,50,100}_k`.
pub fn bks_table() -> BksTable {
    let mut t = BksTable::new();
    for (k, v) in S_CENTRAL.iter().enumerate() {
        t.insert(format!("S-Central_{}", k + 1), *v);
    }
    for (size, values) in [(25, M_CENTRAL_25), (50, M_CENTRAL_50), (100, M_CENTRAL_100)] {
        for (k, v) in values.iter().enumerate() {
            t.insert(format!("M-Central{size}_{}", k + 1), *v);
        }
    }
    t
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub seed: u64,
    /// `None` when no feasible solution was found.
    pub best_distance: Option<f64>,
    pub time_to_best: f64,
    pub total_time: f64,
    pub iterations: usize,
}

impl RunRecord {
    pub fn feasible(&self) -> bool {
        self.best_distance.is_some()
    }

    /// Percentage gap to the best-known value, if both exist.
    pub fn gap_pct(&self, bks: &BksTable) -> Option<f64> {
        let td = self.best_distance?;
        let best = bks.get(&self.instance)?;
        Some(100.0 * (td - best) / best)
    }
}

/// CSV texts produced by [`write_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    /// One row per run.
    pub runs: String,
    /// One row per instance, in name order.
    pub summary: String,
}

fn fixed(v: Option<f64>, decimals: usize) -> String {
    v.map(|x| format!("{x:.decimals$}")).unwrap_or_default()
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub fn write_report(records: &[RunRecord], bks: &BksTable) -> Report {
    let mut runs = csv::Writer::from_writer(Vec::new());
    runs.write_record([
        "instance",
        "seed",
        "best_td",
        "feasible",
        "time_to_best_s",
        "total_time_s",
        "iterations",
        "gap_pct",
    ])
    .expect("writing to memory");
    for r in records {
        runs.write_record([
            r.instance.clone(),
            r.seed.to_string(),
            fixed(r.best_distance, 6),
            r.feasible().to_string(),
            format!("{:.3}", r.time_to_best),
            format!("{:.3}", r.total_time),
            r.iterations.to_string(),
            fixed(r.gap_pct(bks), 4),
        ])
        .expect("writing to memory");
    }

    let mut by_instance: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        by_instance.entry(&r.instance).or_default().push(r);
    }
    let mut summary = csv::Writer::from_writer(Vec::new());
    summary
        .write_record([
            "instance",
            "runs",
            "feasible_runs",
            "best_td",
            "mean_td",
            "mean_time_to_best_s",
            "bks",
            "best_gap_pct",
            "mean_gap_pct",
        ])
        .expect("writing to memory");
    for (name, rs) in by_instance {
        let tds: Vec<f64> = rs.iter().filter_map(|r| r.best_distance).collect();
        let best = tds.iter().copied().reduce(f64::min);
        let mean_td = mean(tds.iter().copied());
        let known = bks.get(name).copied();
        let gap = |v: Option<f64>| v.zip(known).map(|(v, b)| 100.0 * (v - b) / b);
        summary
            .write_record([
                name.to_string(),
                rs.len().to_string(),
                tds.len().to_string(),
                fixed(best, 6),
                fixed(mean_td, 6),
                fixed(mean(rs.iter().filter(|r| r.feasible()).map(|r| r.time_to_best)), 3),
                fixed(known, 2),
                fixed(gap(best), 4),
                fixed(gap(mean_td), 4),
            ])
            .expect("writing to memory");
    }
    let text = |w: csv::Writer<Vec<u8>>| String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8");
    Report { runs: text(runs), summary: text(summary) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(instance: &str, seed: u64, td: Option<f64>, ttb: f64) -> RunRecord {
        RunRecord { instance: instance.into(), seed, best_distance: td, time_to_best: ttb, total_time: 2.0 * ttb, iterations: 10 }
    }

    #[test]
    fn table_values() {
        let t = bks_table();
        assert_eq!(t["S-Central_5"], 714.55);
        assert_eq!(t["S-Central_1"], 953.94);
        assert_eq!(t["M-Central25_1"], 1129.71);
        assert_eq!(t["M-Central100_10"], 4366.85);
        assert_eq!(t.len(), 40);
    }

    #[test]
    fn single_record() {
        let rep = write_report(&[record("S-Central_5", 3, Some(714.55), 1.5)], &bks_table());
        let lines: Vec<&str> = rep.runs.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "instance,seed,best_td,feasible,time_to_best_s,total_time_s,iterations,gap_pct");
        assert_eq!(lines[1], "S-Central_5,3,714.550000,true,1.500,3.000,10,0.0000");
    }

    #[test]
    fn unknown_instance_has_empty_gap() {
        let rep = write_report(&[record("mine", 1, Some(10.0), 1.0)], &bks_table());
        assert!(rep.runs.lines().nth(1).unwrap().ends_with(",10,"));
    }

    #[test]
    fn means_over_thirty_runs() {
        let recs: Vec<RunRecord> = (0..30).map(|k| record("a", k, Some(100.0 + k as f64), k as f64)).collect();
        let rep = write_report(&recs, &BksTable::new());
        let row: Vec<String> = rep.summary.lines().nth(1).unwrap().split(',').map(String::from).collect();
        assert_eq!(row[1], "30");
        assert_eq!(row[3], "100.000000");
        assert_eq!(row[4], "114.500000");
        assert_eq!(row[5], "14.500");
        assert_eq!(row[7], "");
    }

    #[test]
    fn infeasible_runs_leave_blanks() {
        let rep = write_report(&[record("x", 0, None, 0.0)], &BksTable::new());
        assert_eq!(rep.runs.lines().nth(1).unwrap(), "x,0,,false,0.000,0.000,10,");
    }
}
