//! `run`, `reproduce` and `sweep`.

use rayon::prelude::*;
use slopehop::engine::{run_scenario, RunOutput, Stage};
use slopehop::metrics::Metrics;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::config::{ConfigFile, NUMERIC_KEYS};
use crate::error::CliError;
use crate::output::{self, num, RunManifest};

pub const TABLE_FILE: &str = "reproduce_table.csv";
pub const SWEEP_CELLS_FILE: &str = "sweep_metrics.csv";
pub const SWEEP_LONG_FILE: &str = "sweep_long.csv";

/// Scalar metrics reported per sweep cell, in column order.
pub const SWEEP_METRICS: [&str; 5] = [
    "horizontal_drift",
    "hop_count",
    "max_residual_omega",
    "mean_hop_period",
    "last_per_hop_drift",
];

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// Writes trajectory, events and metrics with an optional file prefix. Returns the file names.
fn write_run(dir: &Path, prefix: &str, out: &RunOutput) -> Result<Vec<String>, CliError> {
    let files = [
        (
            output::TRAJECTORY_FILE,
            output::trajectory_csv(&out.trajectory),
        ),
        (output::EVENTS_FILE, output::events_csv(&out.events)),
        (output::METRICS_FILE, output::metrics_json(&out.metrics)),
    ];
    let mut names = Vec::new();
    for (name, body) in files {
        let n = format!("{prefix}{name}");
        output::write(dir, &n, &body)?;
        names.push(n);
    }
    Ok(names)
}

fn simulate(cfg: &ConfigFile) -> Result<RunOutput, CliError> {
    Ok(run_scenario(&cfg.scenario())?)
}

pub fn cmd_run(config_path: &Path, out_dir: &Path) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let cfg = ConfigFile::load(config_path)?;
    let out = simulate(&cfg)?;
    ensure_dir(out_dir)?;
    let mut artifacts = write_run(out_dir, "", &out)?;
    artifacts.push(output::MANIFEST_FILE.to_string());
    let manifest = RunManifest {
        scenario_id: config_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        config_digest: cfg.digest(),
        artifacts,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    output::write_manifest(out_dir, &manifest)?;
    Ok(manifest)
}

pub fn reduction_percent(reference: f64, drift: f64) -> f64 {
    100.0 * (1.0 - drift / reference)
}

pub fn reproduce_table(drifts: &[(Stage, f64)]) -> String {
    let mut out = output::TABLE_COLUMNS.join(",");
    out.push('\n');
    let reference = drifts.first().map(|d| d.1).unwrap_or(f64::NAN);
    for &(stage, d) in drifts {
        let _ = writeln!(
            out,
            "{},{},{}",
            stage.number(),
            num(d),
            num(reduction_percent(reference, d))
        );
    }
    out
}

/// Runs the three built-in stages.
pub fn cmd_reproduce(out_dir: &Path) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    ensure_dir(out_dir)?;
    let mut artifacts = Vec::new();
    let mut drifts = Vec::new();
    let mut hasher_input = String::new();
    for stage in Stage::ALL {
        let cfg = ConfigFile::reference(stage);
        let out = simulate(&cfg)?;
        let prefix = format!("{}_", stage.id());
        let config_name = format!("{prefix}config.toml");
        output::write(
            out_dir,
            &config_name,
            &toml::to_string(&cfg).expect("config serialises"),
        )?;
        artifacts.push(config_name);
        artifacts.extend(write_run(out_dir, &prefix, &out)?);
        drifts.push((stage, out.metrics.horizontal_drift));
        hasher_input.push_str(&cfg.digest());
    }
    output::write(out_dir, TABLE_FILE, &reproduce_table(&drifts))?;
    artifacts.push(TABLE_FILE.to_string());
    artifacts.push(output::MANIFEST_FILE.to_string());
    let manifest = RunManifest {
        scenario_id: "reproduce".into(),
        config_digest: digest_str(&hasher_input),
        artifacts,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    output::write_manifest(out_dir, &manifest)?;
    Ok(manifest)
}

fn digest_str(s: &str) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(s.as_bytes()))
}

/// `field:min:max:count`.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub field: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    /// Evenly spaced values from `min` to `max`. A single point sits at `min`.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.min + (self.max - self.min) * (i as f64 / n))
            .collect()
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |m: String| CliError::Config(format!("axis '{s}': {m}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [field, min, max, count] = parts[..] else {
            return Err(bad("expected field:min:max:count".into()));
        };
        if !NUMERIC_KEYS.contains(&field) {
            return Err(bad(format!("unknown numeric field '{field}'")));
        }
        let f = |v: &str| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("'{v}' is not a finite number")))
        };
        let count: usize = count
            .parse()
            .map_err(|_| bad(format!("'{count}' is not a count")))?;
        if count == 0 {
            return Err(bad("count must be at least 1".into()));
        }
        Ok(Axis {
            field: field.to_string(),
            min: f(min)?,
            max: f(max)?,
            count,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub values: Vec<f64>,
    pub metrics: Metrics,
}

fn scalar_metrics(m: &Metrics) -> [f64; 5] {
    let mean_period = if m.hop_periods.is_empty() {
        f64::NAN
    } else {
        m.hop_periods.iter().sum::<f64>() / m.hop_periods.len() as f64
    };
    [
        m.horizontal_drift,
        m.hop_count as f64,
        m.max_residual_omega,
        mean_period,
        m.per_hop_drift.last().copied().unwrap_or(f64::NAN),
    ]
}

/// Cross product of all axes, first axis slowest.
fn grid(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, ax| {
        acc.into_iter()
            .flat_map(|prefix| {
                ax.values().into_iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

pub fn run_sweep(base: &ConfigFile, axes: &[Axis]) -> Result<Vec<SweepCell>, CliError> {
    if axes.is_empty() {
        return Err(CliError::Config("sweep needs at least one --axis".into()));
    }
    let cells = grid(axes);
    let configs = cells
        .iter()
        .map(|vals| {
            axes.iter()
                .zip(vals)
                .try_fold(base.clone(), |cfg, (ax, &v)| cfg.with_value(&ax.field, v))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let metrics = configs
        .par_iter()
        .map(|cfg| simulate(cfg).map(|o| o.metrics))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(cells
        .into_iter()
        .zip(metrics)
        .map(|(values, metrics)| SweepCell { values, metrics })
        .collect())
}

pub fn cmd_sweep(
    config_path: &Path,
    axes: &[Axis],
    out_dir: &Path,
) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let base = ConfigFile::load(config_path)?;
    let cells = run_sweep(&base, axes)?;
    ensure_dir(out_dir)?;

    let fields: Vec<&str> = axes.iter().map(|a| a.field.as_str()).collect();
    let mut wide = format!("cell,{},{}\n", fields.join(","), SWEEP_METRICS.join(","));
    let mut long = format!("cell,{},metric,value\n", fields.join(","));
    for (i, c) in cells.iter().enumerate() {
        let vals: Vec<String> = c.values.iter().map(|&v| num(v)).collect();
        let vals = vals.join(",");
        let ms = scalar_metrics(&c.metrics);
        let ms_str: Vec<String> = ms.iter().map(|&v| num(v)).collect();
        let _ = writeln!(wide, "{i},{vals},{}", ms_str.join(","));
        for (name, v) in SWEEP_METRICS.iter().zip(ms) {
            let _ = writeln!(long, "{i},{vals},{name},{}", num(v));
        }
    }
    output::write(out_dir, SWEEP_CELLS_FILE, &wide)?;
    output::write(out_dir, SWEEP_LONG_FILE, &long)?;
    let axes_desc: Vec<String> = axes
        .iter()
        .map(|a| format!("{}:{}:{}:{}", a.field, num(a.min), num(a.max), a.count))
        .collect();
    let manifest = RunManifest {
        scenario_id: format!(
            "{}_sweep",
            config_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        ),
        config_digest: digest_str(&format!("{}|{}", base.digest(), axes_desc.join("|"))),
        artifacts: vec![
            SWEEP_CELLS_FILE.into(),
            SWEEP_LONG_FILE.into(),
            output::MANIFEST_FILE.into(),
        ],
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    output::write_manifest(out_dir, &manifest)?;
    Ok(manifest)
}
