//! Key-value scenario files. Angles are in degrees here and radians everywhere else.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use slopehop::control::{ControlConfig, ImpactMass};
use slopehop::engine::{Scenario, Stage};
use slopehop::params::{default_inertia, RobotParams, WorldParams};
use std::path::Path;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImpactMassKey {
    Foot,
    Total,
}

/// Every recognised key. Missing keys take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub slope_deg: f64,
    pub gravity: f64,
    pub mass_body_kg: f64,
    pub mass_foot_kg: f64,
    pub stiffness_n_per_m: f64,
    pub rest_length_m: f64,
    pub foot_radius_m: f64,
    pub mu_static: f64,
    pub mu_kinetic: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    pub gamma_kg_per_s: f64,
    pub t_s_s: f64,
    pub restitution: f64,
    pub alpha_real_deg: f64,
    pub step1: bool,
    pub step2_torque: bool,
    pub step2_damper: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inertia_kg_m2: Option<f64>,
    pub decimation: u64,
    pub use_optimal_alpha: bool,
    pub impact_mass: ImpactMassKey,
    pub initial_foot_height_m: f64,
    pub initial_body_offset_m: f64,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile {
            slope_deg: 30.0,
            gravity: 9.81,
            mass_body_kg: 0.095,
            mass_foot_kg: 0.005,
            stiffness_n_per_m: 500.0,
            rest_length_m: 0.10,
            foot_radius_m: 0.005,
            mu_static: 0.6,
            mu_kinetic: 0.42,
            sample_rate_hz: 200_000.0,
            duration_s: 3.0,
            gamma_kg_per_s: 7.0,
            t_s_s: 0.02,
            restitution: 0.0,
            alpha_real_deg: 0.006,
            step1: false,
            step2_torque: false,
            step2_damper: false,
            inertia_kg_m2: None,
            decimation: 100,
            use_optimal_alpha: false,
            impact_mass: ImpactMassKey::Foot,
            initial_foot_height_m: 0.6,
            initial_body_offset_m: 0.10,
        }
    }
}

/// Keys a sweep axis may vary.
pub const NUMERIC_KEYS: &[&str] = &[
    "slope_deg",
    "gravity",
    "mass_body_kg",
    "mass_foot_kg",
    "stiffness_n_per_m",
    "rest_length_m",
    "foot_radius_m",
    "mu_static",
    "mu_kinetic",
    "sample_rate_hz",
    "duration_s",
    "gamma_kg_per_s",
    "t_s_s",
    "restitution",
    "alpha_real_deg",
    "inertia_kg_m2",
    "decimation",
    "initial_foot_height_m",
    "initial_body_offset_m",
];

/// Upper bound on samples per run.
const MAX_STEPS: f64 = 1e9;

impl ConfigFile {
    pub fn reference(stage: Stage) -> Self {
        ConfigFile {
            step1: stage != Stage::NoControl,
            step2_damper: stage == Stage::TouchdownAngleDamper,
            ..Default::default()
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ConfigFile =
            toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |key: &str, msg: &str| Err(CliError::Config(format!("{key}: {msg}")));
        let positive = [
            ("gravity", "g", self.gravity),
            ("mass_body_kg", "m_b", self.mass_body_kg),
            ("mass_foot_kg", "m_f", self.mass_foot_kg),
            ("stiffness_n_per_m", "k", self.stiffness_n_per_m),
            ("rest_length_m", "d_0", self.rest_length_m),
            ("foot_radius_m", "foot_radius", self.foot_radius_m),
            ("sample_rate_hz", "sample_rate", self.sample_rate_hz),
            ("duration_s", "duration", self.duration_s),
            ("t_s_s", "t_s", self.t_s_s),
            (
                "initial_body_offset_m",
                "initial_body_offset",
                self.initial_body_offset_m,
            ),
        ];
        for (key, name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return fail(key, &format!("{name} must be positive"));
            }
        }
        if let Some(i) = self.inertia_kg_m2 {
            if !(i > 0.0 && i.is_finite()) {
                return fail("inertia_kg_m2", "inertia must be positive");
            }
        }
        if !(self.slope_deg >= 0.0 && self.slope_deg < 90.0) {
            return fail("slope_deg", "phi must lie in [0, 90) degrees");
        }
        if !(self.mu_kinetic >= 0.0 && self.mu_kinetic.is_finite()) {
            return fail("mu_kinetic", "mu_k must be non-negative");
        }
        if !(self.mu_static >= self.mu_kinetic && self.mu_static.is_finite()) {
            return fail("mu_static", "mu_s must be at least mu_k");
        }
        if !(self.gamma_kg_per_s >= 0.0 && self.gamma_kg_per_s.is_finite()) {
            return fail("gamma_kg_per_s", "gamma must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.restitution) {
            return fail("restitution", "e must lie in [0, 1]");
        }
        if !self.alpha_real_deg.is_finite() {
            return fail("alpha_real_deg", "alpha_real must be finite");
        }
        if self.decimation == 0 {
            return fail("decimation", "decimation must be at least 1");
        }
        if !self.initial_foot_height_m.is_finite() {
            return fail(
                "initial_foot_height_m",
                "initial_foot_height must be finite",
            );
        }
        if self.duration_s * self.sample_rate_hz > MAX_STEPS {
            return fail(
                "duration_s",
                "duration_s * sample_rate_hz exceeds 1e9 samples",
            );
        }
        self.scenario()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn inertia(&self) -> f64 {
        self.inertia_kg_m2
            .unwrap_or_else(|| default_inertia(self.mass_body_kg, self.rest_length_m))
    }

    pub fn scenario(&self) -> Scenario {
        let world = WorldParams {
            phi: self.slope_deg.to_radians(),
            g: self.gravity,
            mu_s: self.mu_static,
            mu_k: self.mu_kinetic,
            dt: 1.0 / self.sample_rate_hz,
        };
        let robot = RobotParams {
            m_b: self.mass_body_kg,
            m_f: self.mass_foot_kg,
            k: self.stiffness_n_per_m,
            d_0: self.rest_length_m,
            foot_radius: self.foot_radius_m,
            inertia: self.inertia(),
        };
        let control = ControlConfig {
            step1_enabled: self.step1,
            step2_torque_enabled: self.step2_torque,
            step2_damper_enabled: self.step2_damper,
            alpha_real: self.alpha_real_deg.to_radians(),
            gamma: self.gamma_kg_per_s,
            t_s: self.t_s_s,
            e: self.restitution,
            use_optimal_alpha: self.use_optimal_alpha,
            ab: None,
            impact_mass: match self.impact_mass {
                ImpactMassKey::Foot => ImpactMass::Foot,
                ImpactMassKey::Total => ImpactMass::Total,
            },
        };
        Scenario {
            world,
            robot,
            control,
            initial_foot_height: self.initial_foot_height_m,
            initial_body_offset: self.initial_body_offset_m,
            duration: self.duration_s,
            sample_rate: self.sample_rate_hz,
            record_decimation: self.decimation as usize,
        }
    }

    /// SHA-256 over the resolved configuration. Formatting, comments, key order
    /// and omitted defaults do not change it.
    pub fn digest(&self) -> String {
        let mut canonical = self.clone();
        canonical.inertia_kg_m2 = Some(self.inertia());
        let mut value = serde_json::to_value(&canonical).expect("config serialises");
        if let serde_json::Value::Object(map) = &mut value {
            for v in map.values_mut() {
                if let Some(f) = v.as_f64().filter(|_| v.is_f64()) {
                    *v = serde_json::json!(f + 0.0);
                }
            }
        }
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }

    /// Copy with one numeric key replaced.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Self, CliError> {
        if !NUMERIC_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown numeric field '{key}'")));
        }
        let mut map = match serde_json::to_value(self).expect("config serialises") {
            serde_json::Value::Object(m) => m,
            _ => unreachable!(),
        };
        let v = if key == "decimation" {
            if value.fract() != 0.0 || value < 1.0 {
                return Err(CliError::Config(format!(
                    "decimation: must be a positive integer, got {value}"
                )));
            }
            serde_json::json!(value as u64)
        } else {
            serde_json::json!(value)
        };
        map.insert(key.to_string(), v);
        let cfg: ConfigFile = serde_json::from_value(serde_json::Value::Object(map))
            .map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
