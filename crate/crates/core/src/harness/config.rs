use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::HarnessError;
use crate::quantum::{Angle, MeasurementOrder, PhiPolicy};
use crate::stats::Model;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0x5eed_be11;

/// One run of the polarizer experiment. Angles are in degrees.
///
/// Also the schema of the optional JSON config file; unknown keys are
/// rejected and missing keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    pub theta: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(serialize_with = "phi_to_str", deserialize_with = "phi_from_str")]
    pub phi_policy: PhiPolicy<f64>,
    pub measure_a_first: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: Model::Qm,
            theta: 30.0,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            phi_policy: PhiPolicy::Uniform,
            measure_a_first: true,
        }
    }
}

fn phi_to_str<S: Serializer>(policy: &PhiPolicy<f64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(policy)
}

fn phi_from_str<'de, D: Deserializer<'de>>(d: D) -> Result<PhiPolicy<f64>, D::Error> {
    let raw = String::deserialize(d)?;
    raw.parse().map_err(serde::de::Error::custom)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn order(&self) -> MeasurementOrder {
        if self.measure_a_first {
            MeasurementOrder::AFirst
        } else {
            MeasurementOrder::BFirst
        }
    }

    /// Checks trials ≥ 1 and `theta` in `[0, max_theta]`.
    pub fn validate(&self, max_theta: f64) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if !(self.theta >= 0.0 && self.theta <= max_theta) {
            return Err(HarnessError::Config(format!(
                "theta = {}° outside [0°, {max_theta}°]",
                self.theta
            )));
        }
        if let PhiPolicy::Fixed(angle) = self.phi_policy {
            if !angle.degrees().is_finite() {
                return Err(HarnessError::Config(
                    "fixed polarization must be finite".into(),
                ));
            }
        }
        Ok(())
    }
}

/// The four polarizer arrangements of the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "u8")]
pub enum Stage {
    /// Both polarizers upright.
    One,
    /// B rotated counterclockwise by θ.
    Two,
    /// B upright again, A rotated clockwise by θ.
    Three,
    /// A clockwise and B counterclockwise by θ; 2θ apart.
    Four,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::One, Stage::Two, Stage::Three, Stage::Four];

    pub fn number(self) -> u8 {
        match self {
            Stage::One => 1,
            Stage::Two => 2,
            Stage::Three => 3,
            Stage::Four => 4,
        }
    }

    /// `(axis_a, axis_b)` for polarizer rotation `theta_deg`.
    pub fn axes(self, theta_deg: f64) -> (Angle<f64>, Angle<f64>) {
        let deg = Angle::from_degrees;
        match self {
            Stage::One => (deg(0.0), deg(0.0)),
            Stage::Two => (deg(0.0), deg(theta_deg)),
            Stage::Three => (deg(-theta_deg), deg(0.0)),
            Stage::Four => (deg(-theta_deg), deg(theta_deg)),
        }
    }
}

impl From<Stage> for u8 {
    fn from(stage: Stage) -> u8 {
        stage.number()
    }
}

impl TryFrom<u8> for Stage {
    type Error = HarnessError;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        match n {
            1 => Ok(Stage::One),
            2 => Ok(Stage::Two),
            3 => Ok(Stage::Three),
            4 => Ok(Stage::Four),
            other => Err(HarnessError::Config(format!(
                "stage must be 1-4, got {other}"
            ))),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}", self.number())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::relative_angle;

    #[test]
    fn stage_axes_follow_rotations() {
        let theta = 30.0;
        let rel: Vec<f64> = Stage::ALL
            .iter()
            .map(|s| {
                let (a, b) = s.axes(theta);
                relative_angle(a, b)
            })
            .collect();
        assert_eq!(rel, vec![0.0, 30.0, 30.0, 60.0]);
        assert_eq!(Stage::Three.axes(theta).0.degrees(), 150.0);
        assert!(Stage::try_from(0).is_err());
        assert_eq!(Stage::try_from(4).unwrap(), Stage::Four);
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let cfg = ExperimentConfig {
            model: Model::LhvThreshold,
            theta: 22.5,
            trials: 10,
            seed: 9,
            phi_policy: PhiPolicy::Fixed(Angle::from_degrees(12.0)),
            measure_a_first: false,
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"phi_policy\":\"fixed:12\""));
        assert!(text.contains("\"model\":\"lhv_threshold\""));
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);

        let partial = ExperimentConfig::from_json(r#"{"theta": 10, "seed": 1}"#).unwrap();
        assert_eq!(partial.trials, DEFAULT_TRIALS);
        assert_eq!(partial.phi_policy, PhiPolicy::Uniform);

        assert!(ExperimentConfig::from_json(r#"{"theta": 10, "bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"phi_policy": "sometimes"}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate(90.0).is_ok());
        cfg.theta = 60.0;
        assert!(cfg.validate(45.0).is_err());
        cfg.theta = f64::NAN;
        assert!(cfg.validate(90.0).is_err());
        cfg.theta = 10.0;
        cfg.trials = 0;
        assert!(cfg.validate(90.0).is_err());
    }
}
