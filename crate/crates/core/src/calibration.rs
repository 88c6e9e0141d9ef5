//! Frozen comparability constants.
//!
//! The inequality checks compare against constants fitted once over the
//! smooth gallery by [`crate::verify::calibrate`] and stored in a versioned
//! JSON file; suites reload them and allow
//! [`crate::tol::REGRESSION_SLACK`] on top. Regenerate with the `calibrate`
//! subcommand and replace `data/calibration_default.json` to re-baseline.

use serde::{Deserialize, Serialize};

/// Provenance of a calibration run.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CalibrationMeta {
    pub s: f64,
    pub s_apriori: f64,
    pub resolution: usize,
    pub extension_resolution: usize,
    pub seed: u64,
}

/// Fitted constants for every comparability check.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CalibrationConstants {
    /// Largest restriction-inequality ratio over the smooth gallery.
    pub restriction: f64,
    /// Largest a-priori pairing-bound ratio.
    pub apriori: f64,
    /// Extension-energy equivalence band, `E^s / [f]^n` in [low, high].
    pub extension_low: f64,
    pub extension_high: f64,
    /// Largest oscillation-modulus ratio.
    pub modulus: f64,
    pub meta: CalibrationMeta,
}

const DEFAULT_JSON: &str = include_str!("../data/calibration_default.json");

impl CalibrationConstants {
    /// The committed default calibration.
    pub fn frozen() -> Self {
        serde_json::from_str(DEFAULT_JSON).expect("embedded calibration file parses")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_constants_parse_and_are_positive() {
        let c = CalibrationConstants::frozen();
        assert!(c.restriction > 0.0);
        assert!(c.apriori > 0.0);
        assert!(c.extension_low > 0.0 && c.extension_low <= c.extension_high);
        assert!(c.modulus > 0.0);
    }

    #[test]
    fn json_round_trip() {
        let c = CalibrationConstants::frozen();
        let back = CalibrationConstants::from_json(&c.to_json()).unwrap();
        assert_eq!(c, back);
    }
}
