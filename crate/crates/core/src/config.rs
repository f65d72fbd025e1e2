//! Scenario description shared by the analytic and simulation engines.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::channel::{db_to_linear, dbm_to_watts, FadingParams, RadioParams};
use crate::error::{Error, Result};
use crate::geometry::{TierGeometry, EARTH_RADIUS_KM};

/// One shell of satellites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tier {
    pub altitude_km: f64,
    pub num_satellites: u32,
}

/// Full uplink scenario. Thresholds and powers are linear; `legit_tier`
/// is a zero-based index into `tiers`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub earth_radius_km: f64,
    pub tiers: Vec<Tier>,
    pub legit_tier: usize,
    pub theta_beam: f64,
    pub device_density_per_km2: f64,
    pub radio: RadioParams,
    pub fading: FadingParams,
    pub beta_ls: f64,
    pub beta_es: f64,
}

impl NetworkConfig {
    /// Default simulation parameters: three tiers of 500 satellites at
    /// 500/1000/1500 km, the 1000 km tier legitimate.
    pub fn table2() -> Self {
        Self {
            earth_radius_km: EARTH_RADIUS_KM,
            tiers: [500.0, 1000.0, 1500.0]
                .into_iter()
                .map(|altitude_km| Tier {
                    altitude_km,
                    num_satellites: 500,
                })
                .collect(),
            legit_tier: 1,
            theta_beam: PI / 3.0,
            device_density_per_km2: 1e-6,
            radio: RadioParams {
                carrier_hz: 2e9,
                tx_power_w: dbm_to_watts(23.0),
                antenna_gain_linear: db_to_linear(41.9),
                noise_density_w_per_hz: dbm_to_watts(-174.0),
                bandwidth_hz: 180e3,
                info_ratio: 0.1,
            },
            fading: FadingParams {
                shape_m1: 1,
                scale_m2: 0.1269,
            },
            beta_ls: db_to_linear(-30.0),
            beta_es: db_to_linear(-10.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.earth_radius_km > 0.0) || !self.earth_radius_km.is_finite() {
            return Err(Error::invalid("earth_radius_km", "must be positive"));
        }
        if self.tiers.is_empty() {
            return Err(Error::invalid("tiers", "at least one tier is required"));
        }
        for (k, tier) in self.tiers.iter().enumerate() {
            if !(tier.altitude_km > 0.0) || !tier.altitude_km.is_finite() {
                return Err(Error::invalid(
                    format!("tiers[{k}].altitude_km"),
                    format!("must be positive, got {}", tier.altitude_km),
                ));
            }
        }
        if self.legit_tier >= self.tiers.len() {
            return Err(Error::invalid(
                "legit_tier",
                format!(
                    "tier {} does not exist ({} tiers)",
                    self.legit_tier + 1,
                    self.tiers.len()
                ),
            ));
        }
        if !(self.theta_beam > 0.0 && self.theta_beam <= FRAC_PI_2) {
            return Err(Error::invalid("theta_beam", "must lie in (0, pi/2]"));
        }
        if !(self.device_density_per_km2 >= 0.0) || !self.device_density_per_km2.is_finite() {
            return Err(Error::invalid("device_density_per_km2", "must be non-negative"));
        }
        self.radio.validate()?;
        FadingParams::new(self.fading.shape_m1, self.fading.scale_m2)?;
        for (name, v) in [("beta_ls", self.beta_ls), ("beta_es", self.beta_es)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, "threshold must be positive"));
            }
        }
        Ok(())
    }

    pub fn tier_geometry(&self, k: usize) -> Result<TierGeometry> {
        let tier = self
            .tiers
            .get(k)
            .ok_or_else(|| Error::invalid("tier", format!("index {k} out of range")))?;
        TierGeometry::new(
            tier.altitude_km,
            tier.num_satellites,
            self.theta_beam,
            self.earth_radius_km,
        )
    }

    pub fn geometries(&self) -> Result<Vec<TierGeometry>> {
        (0..self.tiers.len()).map(|k| self.tier_geometry(k)).collect()
    }

    pub fn legit_geometry(&self) -> Result<TierGeometry> {
        self.tier_geometry(self.legit_tier)
    }

    pub fn noise_power(&self) -> f64 {
        self.radio.noise_power()
    }

    /// `gamma - beta_es (1 - gamma)`; non-positive means no eavesdropper
    /// can ever reach `beta_es`.
    pub fn eavesdropper_margin(&self) -> f64 {
        let g = self.radio.info_ratio;
        g - self.beta_es * (1.0 - g)
    }

    pub fn an_ceiling(&self) -> bool {
        self.eavesdropper_margin() <= 0.0
    }

    /// Indices of the eavesdropping tiers.
    pub fn eavesdropper_tiers(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.tiers.len()).filter(move |&k| k != self.legit_tier)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table2_is_valid() {
        let cfg = NetworkConfig::table2();
        cfg.validate().unwrap();
        assert_eq!(cfg.eavesdropper_tiers().collect::<Vec<_>>(), vec![0, 2]);
        assert!((cfg.eavesdropper_margin() - 0.01).abs() < 1e-12);
        assert!(!cfg.an_ceiling());
    }

    #[test]
    fn invariant_violations_name_the_field() {
        let mut cfg = NetworkConfig::table2();
        cfg.legit_tier = 3;
        assert!(matches!(cfg.validate(), Err(Error::Invalid { field, .. }) if field == "legit_tier"));

        let mut cfg = NetworkConfig::table2();
        cfg.radio.info_ratio = 1.5;
        assert!(matches!(cfg.validate(), Err(Error::Invalid { field, .. }) if field == "info_ratio"));

        let mut cfg = NetworkConfig::table2();
        cfg.tiers.clear();
        assert!(cfg.validate().is_err());

        let mut cfg = NetworkConfig::table2();
        cfg.tiers[2].altitude_km = -5.0;
        assert!(matches!(cfg.validate(), Err(Error::Invalid { field, .. }) if field == "tiers[2].altitude_km"));
    }

    #[test]
    fn ceiling_condition() {
        let mut cfg = NetworkConfig::table2();
        cfg.radio.info_ratio = 0.05;
        assert!(cfg.an_ceiling());
    }
}
