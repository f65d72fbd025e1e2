//! Link-level quantities: unit conversions, free-space path gain, fading,
//! received power and the two SINR forms (legitimate receiver cancels the
//! artificial noise, eavesdroppers do not).
//!
//! Everything internal is SI: watts, hertz, metres. Kilometres and dB only
//! appear at the edges.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Thermal noise power `N0 * B`.
pub fn noise_power(noise_density_w_per_hz: f64, bandwidth_hz: f64) -> f64 {
    noise_density_w_per_hz * bandwidth_hz
}

/// `(c / (4 pi f))^2` in m^2: the distance-free part of the path gain.
#[inline]
pub(crate) fn wavelength_factor(carrier_hz: f64) -> f64 {
    let k = SPEED_OF_LIGHT / (4.0 * PI * carrier_hz);
    k * k
}

/// Free-space path gain `(c / (4 pi f d))^2`.
pub fn path_gain(distance_km: f64, carrier_hz: f64) -> Result<f64> {
    if !(distance_km > 0.0) {
        return Err(Error::Domain(format!("distance {distance_km} km must be positive")));
    }
    let d_m = distance_km * 1e3;
    Ok(wavelength_factor(carrier_hz) / (d_m * d_m))
}

/// Shape `m1` and scale `m2` of the Gamma approximation to Shadowed-Rician
/// fading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    pub shape_m1: u32,
    pub scale_m2: f64,
}

impl FadingParams {
    pub fn new(shape_m1: u32, scale_m2: f64) -> Result<Self> {
        if shape_m1 == 0 {
            return Err(Error::invalid("fading_shape_m1", "must be a positive integer"));
        }
        if !(scale_m2 > 0.0) || !scale_m2.is_finite() {
            return Err(Error::invalid("fading_scale_m2", "must be positive and finite"));
        }
        Ok(Self { shape_m1, scale_m2 })
    }

    /// Rate `(m1!)^(-1/m1) / m2` of the exponentials inside the CDF bound.
    pub fn rate(&self) -> f64 {
        let m1 = f64::from(self.shape_m1);
        let ln_fact: f64 = (1..=self.shape_m1).map(|k| f64::from(k).ln()).sum();
        (-ln_fact / m1).exp() / self.scale_m2
    }
}

/// Complementary CDF of the fading power under the Gamma bound,
/// `1 - [1 - exp(-rate x)]^m1`.
pub fn gamma_fade_ccdf_bound(x: f64, fading: &FadingParams) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let base = -(-fading.rate() * x).exp_m1();
    let m1 = fading.shape_m1 as i32;
    // 1 - base^m1 without cancellation for small base
    -(f64::from(m1) * base.ln()).exp_m1()
}

/// Draws a fading power whose CDF is exactly the Gamma bound: the maximum
/// of `m1` i.i.d. exponentials with rate [`FadingParams::rate`].
pub fn sample_fade<R: Rng + ?Sized>(fading: &FadingParams, rng: &mut R) -> f64 {
    let mut best: f64 = Exp1.sample(rng);
    for _ in 1..fading.shape_m1 {
        best = best.max(Exp1.sample(rng));
    }
    best / fading.rate()
}

/// Physical-layer constants of the uplink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub carrier_hz: f64,
    pub tx_power_w: f64,
    pub antenna_gain_linear: f64,
    pub noise_density_w_per_hz: f64,
    pub bandwidth_hz: f64,
    /// Fraction of the transmit power carrying the message; the rest is
    /// artificial noise.
    pub info_ratio: f64,
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_hz", self.carrier_hz),
            ("tx_power", self.tx_power_w),
            ("antenna_gain", self.antenna_gain_linear),
            ("noise_density", self.noise_density_w_per_hz),
            ("bandwidth_hz", self.bandwidth_hz),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.info_ratio) {
            return Err(Error::invalid(
                "info_ratio",
                format!("must lie in [0, 1], got {}", self.info_ratio),
            ));
        }
        Ok(())
    }

    pub fn noise_power(&self) -> f64 {
        noise_power(self.noise_density_w_per_hz, self.bandwidth_hz)
    }

    /// `P_t * G * (c / (4 pi f))^2`, the received power per unit fade at 1 m.
    pub(crate) fn power_scale(&self) -> f64 {
        self.tx_power_w * self.antenna_gain_linear * wavelength_factor(self.carrier_hz)
    }
}

/// `P_t * (c / (4 pi f d))^2 * G * |h|^2`.
pub fn received_power(radio: &RadioParams, distance_km: f64, fade: f64) -> Result<f64> {
    Ok(radio.tx_power_w * path_gain(distance_km, radio.carrier_hz)? * radio.antenna_gain_linear * fade)
}

/// SINR at the serving satellite, which filters out the artificial noise.
pub fn sinr_legitimate(signal_w: f64, interference_w: f64, noise_w: f64, info_ratio: f64) -> f64 {
    info_ratio * signal_w / (interference_w + noise_w)
}

/// SINR at an eavesdropper, which sees the artificial-noise share of the
/// typical device's power as extra interference.
pub fn sinr_eavesdropper(signal_w: f64, interference_w: f64, noise_w: f64, info_ratio: f64) -> f64 {
    info_ratio * signal_w / ((1.0 - info_ratio) * signal_w + interference_w + noise_w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table2_radio() -> RadioParams {
        RadioParams {
            carrier_hz: 2e9,
            tx_power_w: dbm_to_watts(23.0),
            antenna_gain_linear: db_to_linear(41.9),
            noise_density_w_per_hz: dbm_to_watts(-174.0),
            bandwidth_hz: 180e3,
            info_ratio: 0.1,
        }
    }

    #[test]
    fn conversions() {
        assert_relative_eq!(dbm_to_watts(0.0), 1e-3, max_relative = 1e-15);
        assert!((dbm_to_watts(23.0) - 0.1995).abs() < 1e-4);
        assert_eq!(db_to_linear(0.0), 1.0);
        assert_relative_eq!(watts_to_dbm(dbm_to_watts(-121.0)), -121.0, max_relative = 1e-14);
    }

    #[test]
    fn noise_floor() {
        let n0 = dbm_to_watts(-174.0);
        let sigma2 = noise_power(n0, 180e3);
        let expected = dbm_to_watts(-174.0 + 10.0 * 1.8e5f64.log10());
        assert_relative_eq!(sigma2, expected, max_relative = 1e-12);
        assert!((sigma2 - 7.166e-16).abs() < 1e-19, "{sigma2}");
        assert_eq!(noise_power(n0, 1.0), n0);
        assert_relative_eq!(noise_power(n0, 2.0 * 180e3), 2.0 * sigma2, max_relative = 1e-15);
    }

    #[test]
    fn free_space_gain() {
        let g = path_gain(500.0, 2e9).unwrap();
        let direct = (SPEED_OF_LIGHT / (4.0 * PI * 2e9 * 500e3)).powi(2);
        assert_relative_eq!(g, direct, max_relative = 1e-14);
        assert!((linear_to_db(g) + 152.448).abs() < 1e-3, "{}", linear_to_db(g));
        assert_relative_eq!(path_gain(2000.0, 2e9).unwrap(), g / 16.0, max_relative = 1e-14);
        assert!(path_gain(1e12, 2e9).unwrap() < 1e-33);
        assert!(path_gain(0.0, 2e9).is_err());
    }

    #[test]
    fn ccdf_bound_values() {
        let f = FadingParams::new(1, 0.1269).unwrap();
        assert_eq!(gamma_fade_ccdf_bound(0.0, &f), 1.0);
        assert_relative_eq!(gamma_fade_ccdf_bound(0.1269, &f), (-1.0f64).exp(), max_relative = 1e-14);
        assert!(gamma_fade_ccdf_bound(100.0, &f) < 1e-300);
        let f3 = FadingParams::new(3, 0.5).unwrap();
        assert_relative_eq!(f3.rate(), 6f64.powf(-1.0 / 3.0) / 0.5, max_relative = 1e-14);
        let x = 0.7;
        let direct = 1.0 - (1.0 - (-f3.rate() * x).exp()).powi(3);
        assert_relative_eq!(gamma_fade_ccdf_bound(x, &f3), direct, max_relative = 1e-12);
    }

    #[test]
    fn fading_params_reject_invalid() {
        assert!(FadingParams::new(0, 1.0).is_err());
        assert!(FadingParams::new(1, 0.0).is_err());
        assert!(FadingParams::new(1, f64::NAN).is_err());
    }

    #[test]
    fn sampled_fades_follow_bound() {
        for fading in [
            FadingParams::new(1, 0.1269).unwrap(),
            FadingParams::new(3, 0.4).unwrap(),
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let n = 100_000;
            let mut xs: Vec<f64> = (0..n).map(|_| sample_fade(&fading, &mut rng)).collect();
            assert!(xs.iter().all(|&x| x >= 0.0));
            xs.sort_by(f64::total_cmp);
            let mut ks: f64 = 0.0;
            for (i, &x) in xs.iter().enumerate() {
                let cdf = 1.0 - gamma_fade_ccdf_bound(x, &fading);
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                ks = ks.max((cdf - lo).abs()).max((hi - cdf).abs());
            }
            assert!(ks < 0.01, "KS {ks}");
        }
    }

    #[test]
    fn exponential_fade_mean() {
        let fading = FadingParams::new(1, 0.1269).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mean = (0..n).map(|_| sample_fade(&fading, &mut rng)).sum::<f64>() / n as f64;
        // Exponential: sd = mean.
        assert!((mean - 0.1269).abs() < 3.0 * 0.1269 / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn received_power_composition() {
        let radio = table2_radio();
        assert_eq!(received_power(&radio, 500.0, 0.0).unwrap(), 0.0);
        let p = received_power(&radio, 500.0, 1.0).unwrap();
        let expected = 0.19952623149688797 * 10f64.powf(4.19) * 5.691433657143452e-16;
        assert_relative_eq!(p, expected, max_relative = 1e-12);
        let doubled = RadioParams {
            tx_power_w: 2.0 * radio.tx_power_w,
            ..radio
        };
        assert_relative_eq!(
            received_power(&doubled, 500.0, 1.0).unwrap(),
            2.0 * p,
            max_relative = 1e-15
        );
    }

    #[test]
    fn sinr_examples() {
        assert_eq!(sinr_legitimate(3.0, 0.0, 2.0, 1.0), 1.5);
        assert_eq!(sinr_legitimate(3.0, 1.0, 2.0, 0.0), 0.0);
        let s = sinr_legitimate(1e-15, 1e-15, 7.16e-16, 0.1);
        assert_relative_eq!(s, 1e-16 / 1.716e-15, max_relative = 1e-12);
        assert!((s - 0.0583).abs() < 1e-4);
        assert_eq!(
            sinr_eavesdropper(3.0, 1.0, 2.0, 1.0),
            sinr_legitimate(3.0, 1.0, 2.0, 1.0)
        );
        assert_relative_eq!(sinr_eavesdropper(1e30, 1.0, 1.0, 0.1), 1.0 / 9.0, max_relative = 1e-12);
        assert_eq!(sinr_eavesdropper(5.0, 1.0, 1.0, 0.0), 0.0);
    }

    proptest! {
        #[test]
        fn eavesdropper_never_beats_legitimate(
            s in 0.0..1e-10f64, i in 0.0..1e-10f64, n in 1e-18..1e-12f64, g in 0.0..=1.0f64,
        ) {
            prop_assert!(sinr_eavesdropper(s, i, n, g) <= sinr_legitimate(s, i, n, g));
        }

        #[test]
        fn eavesdropper_below_an_ceiling(
            s in 0.0..1e3f64, i in 0.0..1e3f64, n in 1e-18..1.0f64, g in 0.0..0.999f64,
        ) {
            prop_assert!(sinr_eavesdropper(s, i, n, g) < g / (1.0 - g));
        }

        #[test]
        fn ccdf_nonincreasing(a in 0.0..5.0f64, b in 0.0..5.0f64, m1 in 1u32..6, m2 in 0.05..2.0f64) {
            let f = FadingParams::new(m1, m2).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(gamma_fade_ccdf_bound(lo, &f) >= gamma_fade_ccdf_bound(hi, &f));
        }

        #[test]
        fn received_power_is_multiplicative(c in 0.1..10.0f64, d in 200.0..5000.0f64, h in 0.01..5.0f64) {
            let radio = table2_radio();
            let base = received_power(&radio, d, h).unwrap();
            let scaled_gain = RadioParams { antenna_gain_linear: c * radio.antenna_gain_linear, ..radio };
            let r1 = received_power(&radio, d, c * h).unwrap();
            let r2 = received_power(&scaled_gain, d, h).unwrap();
            prop_assert!((r1 / base - c).abs() < 1e-12 * c);
            prop_assert!((r2 / base - c).abs() < 1e-12 * c);
        }
    }
}
