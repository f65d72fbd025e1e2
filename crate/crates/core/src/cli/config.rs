//! JSON configuration documents. Units are spelled out in the key names
//! and converted to linear quantities on load.

use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm, FadingParams, RadioParams};
use crate::config::{NetworkConfig, Tier};
use crate::error::{Error, Result};
use crate::geometry::EARTH_RADIUS_KM;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierFile {
    pub altitude_km: f64,
    pub num_satellites: u32,
}

/// On-disk scenario. `legit_tier` counts tiers from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "default_earth_radius")]
    pub earth_radius_km: f64,
    pub tiers: Vec<TierFile>,
    pub legit_tier: usize,
    pub theta_beam_rad: f64,
    pub device_density_per_km2: f64,
    pub carrier_hz: f64,
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub noise_density_dbm_per_hz: f64,
    pub bandwidth_hz: f64,
    pub info_ratio: f64,
    pub fading_m1: u32,
    pub fading_m2: f64,
    pub beta_ls_db: f64,
    pub beta_es_db: f64,
}

fn default_earth_radius() -> f64 {
    EARTH_RADIUS_KM
}

impl ConfigFile {
    /// Converts to linear units and checks every invariant.
    pub fn into_config(self) -> Result<NetworkConfig> {
        if self.legit_tier == 0 {
            return Err(Error::invalid("legit_tier", "tiers are numbered from 1"));
        }
        let cfg = NetworkConfig {
            earth_radius_km: self.earth_radius_km,
            tiers: self
                .tiers
                .iter()
                .map(|t| Tier {
                    altitude_km: t.altitude_km,
                    num_satellites: t.num_satellites,
                })
                .collect(),
            legit_tier: self.legit_tier - 1,
            theta_beam: self.theta_beam_rad,
            device_density_per_km2: self.device_density_per_km2,
            radio: RadioParams {
                carrier_hz: self.carrier_hz,
                tx_power_w: dbm_to_watts(self.tx_power_dbm),
                antenna_gain_linear: db_to_linear(self.antenna_gain_dbi),
                noise_density_w_per_hz: dbm_to_watts(self.noise_density_dbm_per_hz),
                bandwidth_hz: self.bandwidth_hz,
                info_ratio: self.info_ratio,
            },
            fading: FadingParams {
                shape_m1: self.fading_m1,
                scale_m2: self.fading_m2,
            },
            beta_ls: db_to_linear(self.beta_ls_db),
            beta_es: db_to_linear(self.beta_es_db),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_config(cfg: &NetworkConfig) -> Self {
        Self {
            earth_radius_km: cfg.earth_radius_km,
            tiers: cfg
                .tiers
                .iter()
                .map(|t| TierFile {
                    altitude_km: t.altitude_km,
                    num_satellites: t.num_satellites,
                })
                .collect(),
            legit_tier: cfg.legit_tier + 1,
            theta_beam_rad: cfg.theta_beam,
            device_density_per_km2: cfg.device_density_per_km2,
            carrier_hz: cfg.radio.carrier_hz,
            tx_power_dbm: watts_to_dbm(cfg.radio.tx_power_w),
            antenna_gain_dbi: linear_to_db(cfg.radio.antenna_gain_linear),
            noise_density_dbm_per_hz: watts_to_dbm(cfg.radio.noise_density_w_per_hz),
            bandwidth_hz: cfg.radio.bandwidth_hz,
            info_ratio: cfg.radio.info_ratio,
            fading_m1: cfg.fading.shape_m1,
            fading_m2: cfg.fading.scale_m2,
            beta_ls_db: linear_to_db(cfg.beta_ls),
            beta_es_db: linear_to_db(cfg.beta_es),
        }
    }

    /// The default scenario in file form, with the dB values written
    /// exactly as published.
    pub fn table2() -> Self {
        Self {
            earth_radius_km: EARTH_RADIUS_KM,
            tiers: [500.0, 1000.0, 1500.0]
                .into_iter()
                .map(|altitude_km| TierFile {
                    altitude_km,
                    num_satellites: 500,
                })
                .collect(),
            legit_tier: 2,
            theta_beam_rad: std::f64::consts::PI / 3.0,
            device_density_per_km2: 1e-6,
            carrier_hz: 2e9,
            tx_power_dbm: 23.0,
            antenna_gain_dbi: 41.9,
            noise_density_dbm_per_hz: -174.0,
            bandwidth_hz: 180e3,
            info_ratio: 0.1,
            fading_m1: 1,
            fading_m2: 0.1269,
            beta_ls_db: -30.0,
            beta_es_db: -10.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parses and validates a JSON configuration document.
pub fn parse_config(text: &str) -> Result<NetworkConfig> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    file.into_config()
}

/// Built-in named scenario.
pub fn preset(name: &str) -> Result<NetworkConfig> {
    match name {
        "table2" => ConfigFile::table2().into_config(),
        other => Err(Error::invalid("preset", format!("unknown preset {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
    }

    #[test]
    fn preset_matches_default_scenario() {
        let cfg = preset("table2").unwrap();
        assert_eq!(cfg, NetworkConfig::table2());
        assert_eq!(cfg.legit_tier, 1);
        assert!(close(cfg.radio.tx_power_w, 0.19952623149688797));
        assert!(close(cfg.radio.antenna_gain_linear, 15488.166189124817));
        assert!(close(cfg.beta_ls, 1e-3));
        assert!(close(cfg.beta_es, 0.1));
        assert_eq!(cfg.radio.carrier_hz, 2e9);
        assert_eq!(cfg.fading.scale_m2, 0.1269);
        assert!(preset("table3").is_err());
    }

    #[test]
    fn document_round_trip_is_exact() {
        let file = ConfigFile::table2();
        let back: ConfigFile = serde_json::from_str(&file.to_json()).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn config_round_trip_is_close() {
        let cfg = preset("table2").unwrap();
        let again = ConfigFile::from_config(&cfg).into_config().unwrap();
        assert_eq!(again.tiers, cfg.tiers);
        assert_eq!(again.legit_tier, cfg.legit_tier);
        assert!(close(again.radio.tx_power_w, cfg.radio.tx_power_w));
        assert!(close(again.radio.antenna_gain_linear, cfg.radio.antenna_gain_linear));
        assert!(close(
            again.radio.noise_density_w_per_hz,
            cfg.radio.noise_density_w_per_hz
        ));
        assert!(close(again.beta_ls, cfg.beta_ls));
        assert!(close(again.beta_es, cfg.beta_es));
    }

    #[test]
    fn missing_field_is_named() {
        let mut value: serde_json::Value = serde_json::from_str(&ConfigFile::table2().to_json()).unwrap();
        value.as_object_mut().unwrap().remove("tiers");
        match parse_config(&value.to_string()) {
            Err(Error::Schema(msg)) => assert!(msg.contains("tiers"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_field_is_rejected() {
        let mut value: serde_json::Value = serde_json::from_str(&ConfigFile::table2().to_json()).unwrap();
        value["tx_power_w"] = 0.2.into();
        match parse_config(&value.to_string()) {
            Err(Error::Schema(msg)) => assert!(msg.contains("tx_power_w"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invariants_are_enforced() {
        let mut file = ConfigFile::table2();
        file.info_ratio = 1.5;
        assert!(matches!(file.into_config(), Err(Error::Invalid { field, .. }) if field == "info_ratio"));
        let mut file = ConfigFile::table2();
        file.legit_tier = 4;
        assert!(matches!(file.into_config(), Err(Error::Invalid { field, .. }) if field == "legit_tier"));
        let mut file = ConfigFile::table2();
        file.legit_tier = 0;
        assert!(file.into_config().is_err());
    }

    proptest::proptest! {
        #[test]
        fn arbitrary_documents_round_trip(
            altitudes in proptest::collection::vec(200.0f64..3000.0, 1..5),
            n in 0u32..5000,
            beam in 0.01f64..1.57,
            density in 0.0f64..1e-3,
            power in -10.0f64..40.0,
            gamma in 0.0f64..1.0,
            beta in -60.0f64..10.0,
        ) {
            let mut file = ConfigFile::table2();
            file.tiers = altitudes.iter().map(|&altitude_km| TierFile { altitude_km, num_satellites: n }).collect();
            file.legit_tier = 1;
            file.theta_beam_rad = beam;
            file.device_density_per_km2 = density;
            file.tx_power_dbm = power;
            file.info_ratio = gamma;
            file.beta_es_db = beta;
            let back: ConfigFile = serde_json::from_str(&file.to_json()).unwrap();
            proptest::prop_assert_eq!(&back, &file);
            let cfg = back.into_config().unwrap();
            proptest::prop_assert_eq!(cfg, file.into_config().unwrap());
        }
    }

    #[test]
    fn earth_radius_defaults() {
        let mut value: serde_json::Value = serde_json::from_str(&ConfigFile::table2().to_json()).unwrap();
        value.as_object_mut().unwrap().remove("earth_radius_km");
        assert_eq!(parse_config(&value.to_string()).unwrap().earth_radius_km, 6371.0);
    }
}
