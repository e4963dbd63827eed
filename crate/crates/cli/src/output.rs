//! Artifact writers. Column sets are fixed; floats use 17 significant digits.

use serde::Serialize;
use slopehop::engine::{HopEvent, Trajectory};
use slopehop::metrics::Metrics;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const TRAJECTORY_COLUMNS: [&str; 13] = [
    "t", "body_x", "body_z", "body_vx", "body_vz", "foot_x", "foot_z", "foot_vx", "foot_vz",
    "alpha", "omega", "phase", "energy",
];

pub const EVENT_COLUMNS: [&str; 8] = [
    "kind", "t", "com_x", "com_z", "com_vx", "com_vz", "alpha", "omega",
];

pub const TABLE_COLUMNS: [&str; 3] = ["stage", "drift_m", "reduction_percent"];

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Fixed-width scientific notation, 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

pub fn trajectory_csv(tr: &Trajectory) -> String {
    let mut out = TRAJECTORY_COLUMNS.join(",");
    out.push('\n');
    for s in &tr.samples {
        let vals = [
            s.t,
            s.body.r.x,
            s.body.r.z,
            s.body.v.x,
            s.body.v.z,
            s.foot.r.x,
            s.foot.r.z,
            s.foot.v.x,
            s.foot.v.z,
            s.attitude.alpha,
            s.attitude.omega,
        ];
        for v in vals {
            out.push_str(&num(v));
            out.push(',');
        }
        let _ = writeln!(out, "{},{}", s.phase.as_str(), num(s.energy));
    }
    out
}

pub fn events_csv(events: &[HopEvent]) -> String {
    let mut out = EVENT_COLUMNS.join(",");
    out.push('\n');
    for e in events {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            e.kind.as_str(),
            num(e.t),
            num(e.com.r.x),
            num(e.com.r.z),
            num(e.com.v.x),
            num(e.com.v.z),
            num(e.attitude.alpha),
            num(e.attitude.omega)
        );
    }
    out
}

#[derive(Serialize)]
struct MetricsJson<'a> {
    horizontal_drift: f64,
    per_hop_drift: &'a [f64],
    hop_count: usize,
    hop_periods: &'a [f64],
    max_residual_omega: f64,
}

pub fn metrics_json(m: &Metrics) -> String {
    let j = MetricsJson {
        horizontal_drift: m.horizontal_drift,
        per_hop_drift: &m.per_hop_drift,
        hop_count: m.hop_count,
        hop_periods: &m.hop_periods,
        max_residual_omega: m.max_residual_omega,
    };
    serde_json::to_string_pretty(&j).expect("metrics serialise") + "\n"
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub scenario_id: String,
    pub config_digest: String,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
    pub wall_time_s: f64,
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let p = dir.join(name);
    std::fs::write(&p, contents)?;
    Ok(p)
}

pub fn write_manifest(dir: &Path, m: &RunManifest) -> Result<PathBuf, CliError> {
    write(
        dir,
        MANIFEST_FILE,
        &(serde_json::to_string_pretty(m).expect("manifest serialises") + "\n"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_exactly() {
        for x in [0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(-0.0), num(0.0));
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn empty_trajectory_is_header_only() {
        assert_eq!(
            trajectory_csv(&Trajectory::default()),
            TRAJECTORY_COLUMNS.join(",") + "\n"
        );
    }
}
