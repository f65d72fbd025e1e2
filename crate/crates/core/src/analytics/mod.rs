//! Closed-form metric engine.
//!
//! All integrals are one-dimensional in the central angle; the azimuth
//! contributes a factor `2 pi`. Coverage and secrecy outage evaluate the
//! interference Laplace transform at every outer quadrature node, using the
//! same rule for the inner integral.

pub mod quadrature;

use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::geometry::{contact_pdf_unchecked, distance_from_versine, versine, void_probability, TierGeometry};

pub use quadrature::{Quadrature, QuadratureSpec};

/// Rounding slack tolerated before a probability is clamped into [0, 1].
const PROBABILITY_SLACK: f64 = 1e-12;

/// Probability that at least one tier satellite lies inside the visibility
/// cap of the typical device.
pub fn availability_probability(tier: &TierGeometry) -> f64 {
    if tier.num_satellites == 0 {
        return 0.0;
    }
    let ln_void = f64::from(tier.num_satellites) * 2.0 * (0.5 * tier.max_central_angle).cos().ln();
    -ln_void.exp_m1()
}

/// Squared distance in m^2 from a device at central angle `theta` to a
/// satellite of `tier`.
fn distance_sq_m2(theta: f64, tier: &TierGeometry, earth_radius_km: f64) -> f64 {
    let d_km = distance_from_versine(versine(theta), tier.shell_radius_km, earth_radius_km);
    d_km * d_km * 1e6
}

/// Laplace transform `E[exp(-s I)]` of the aggregate interference that the
/// device Poisson process inside the satellite's visibility cap produces at
/// a satellite of `tier`.
pub fn interference_laplace(s: f64, tier: &TierGeometry, cfg: &NetworkConfig, quad: &Quadrature) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("Laplace argument {s} must be non-negative")));
    }
    if s == 0.0 || cfg.device_density_per_km2 == 0.0 {
        return Ok(1.0);
    }
    let m1 = f64::from(cfg.fading.shape_m1);
    let k = cfg.fading.scale_m2 * s * cfg.radio.power_scale();
    let re = cfg.earth_radius_km;
    let integral = quad.integrate(
        |theta| {
            let x = k / distance_sq_m2(theta, tier, re);
            // 1 - (1 + x)^(-m1)
            -(-m1 * x.ln_1p()).exp_m1() * theta.sin()
        },
        0.0,
        tier.max_central_angle,
    )?;
    let exponent = cfg.device_density_per_km2 * std::f64::consts::TAU * re * re * integral;
    Ok((-exponent).exp())
}

/// Coverage scaling factor `s_LS(theta)` for the serving link at contact
/// angle `theta`; infinite when `gamma = 0`.
pub fn s_ls(theta: f64, cfg: &NetworkConfig) -> Result<f64> {
    let tier = cfg.legit_geometry()?;
    Ok(s_ls_on(theta, &tier, cfg))
}

fn s_ls_on(theta: f64, tier: &TierGeometry, cfg: &NetworkConfig) -> f64 {
    cfg.fading.rate() * cfg.beta_ls / (cfg.radio.info_ratio * cfg.radio.power_scale())
        * distance_sq_m2(theta, tier, cfg.earth_radius_km)
}

/// Eavesdropping scaling factor `s_ES(theta)` for a satellite of `tier` at
/// central angle `theta`. Fails with [`Error::AnCeiling`] when no
/// eavesdropper SINR can reach `beta_es`.
pub fn s_es(theta: f64, tier: &TierGeometry, cfg: &NetworkConfig) -> Result<f64> {
    let margin = cfg.eavesdropper_margin();
    if margin <= 0.0 {
        return Err(Error::AnCeiling {
            gamma: cfg.radio.info_ratio,
            beta_es: cfg.beta_es,
        });
    }
    Ok(cfg.fading.rate() * cfg.beta_es / (margin * cfg.radio.power_scale())
        * distance_sq_m2(theta, tier, cfg.earth_radius_km))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `sum_{q=q0}^{m1} C(m1, q) (-1)^q exp(-q s sigma^2) L(q s)`.
fn alternating_sum(q0: u32, s: f64, tier: &TierGeometry, cfg: &NetworkConfig, quad: &Quadrature) -> Result<f64> {
    let sigma2 = cfg.noise_power();
    let m1 = cfg.fading.shape_m1;
    let mut total = 0.0;
    for q in q0..=m1 {
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        let c = binomial(m1, q);
        if q == 0 {
            total += c;
            continue;
        }
        let qs = f64::from(q) * s;
        let noise_term = (-qs * sigma2).exp();
        if noise_term == 0.0 {
            continue;
        }
        total += sign * c * noise_term * interference_laplace(qs, tier, cfg, quad)?;
    }
    Ok(total)
}

fn clamp_probability(p: f64, what: &str) -> Result<f64> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::Numerical(format!("{what} = {p} left [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Probability that the nearest legitimate satellite is in view and its
/// SINR exceeds `beta_ls`.
pub fn coverage_probability(cfg: &NetworkConfig, quad: &Quadrature) -> Result<f64> {
    let tier = cfg.legit_geometry()?;
    if cfg.radio.info_ratio == 0.0 || tier.num_satellites == 0 {
        return Ok(0.0);
    }
    let n = tier.num_satellites;
    let integral = quad.try_integrate(
        |theta| {
            let pdf = contact_pdf_unchecked(theta, n);
            if pdf == 0.0 {
                return Ok(0.0);
            }
            let s = s_ls_on(theta, &tier, cfg);
            // sum_{q>=1} C (-1)^(q+1) ... = -(sum_{q>=1} C (-1)^q ...)
            Ok(-alternating_sum(1, s, &tier, cfg, quad)? * pdf)
        },
        0.0,
        tier.max_central_angle,
    )?;
    let p_av = availability_probability(&tier);
    Ok(clamp_probability(integral, "coverage")?.min(p_av))
}

pub fn successful_probability(cfg: &NetworkConfig, quad: &Quadrature) -> Result<f64> {
    let p_av = availability_probability(&cfg.legit_geometry()?);
    Ok(p_av * coverage_probability(cfg, quad)?)
}

/// Per-satellite probability that a satellite of `tier` placed uniformly
/// on its shell does not decode the typical device.
pub fn eavesdropper_miss_probability(tier: &TierGeometry, cfg: &NetworkConfig, quad: &Quadrature) -> Result<f64> {
    if cfg.an_ceiling() {
        return Ok(1.0);
    }
    let in_view = quad.try_integrate(
        |theta| {
            let s = s_es(theta, tier, cfg)?;
            Ok(alternating_sum(0, s, tier, cfg, quad)? * 0.5 * theta.sin())
        },
        0.0,
        tier.max_central_angle,
    )?;
    // Mass of the shell outside the cap: (1 + cos theta_max) / 2.
    let outside = void_probability(tier.max_central_angle, 1);
    clamp_probability(in_view + outside, "eavesdropper miss probability")
}

/// Probability that every eavesdropper in every non-legitimate tier stays
/// below `beta_es`. Exactly 1 in the artificial-noise ceiling regime.
pub fn secrecy_outage_probability(cfg: &NetworkConfig, quad: &Quadrature) -> Result<f64> {
    if cfg.an_ceiling() {
        return Ok(1.0);
    }
    let mut ln_p = 0.0;
    for k in cfg.eavesdropper_tiers() {
        let tier = cfg.tier_geometry(k)?;
        if tier.num_satellites == 0 {
            continue;
        }
        let bracket = eavesdropper_miss_probability(&tier, cfg, quad)?;
        if bracket == 0.0 {
            return Ok(0.0);
        }
        ln_p += f64::from(tier.num_satellites) * bracket.ln();
    }
    Ok(ln_p.exp())
}

pub fn secure_probability(cfg: &NetworkConfig, quad: &Quadrature) -> Result<f64> {
    Ok(successful_probability(cfg, quad)? * secrecy_outage_probability(cfg, quad)?)
}

/// All analytic metrics for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub p_av_per_tier: Vec<f64>,
    pub p_cov: f64,
    pub p_suc: f64,
    pub p_out: f64,
    pub p_sec: f64,
    /// `L_I(1 / sigma^2)` for each tier, a diagnostic of how
    /// interference-limited each receiver is.
    pub laplace_at_inverse_noise: Vec<f64>,
}

impl MetricsReport {
    pub fn p_av(&self, legit_tier: usize) -> f64 {
        self.p_av_per_tier[legit_tier]
    }
}

pub fn full_report(cfg: &NetworkConfig, quad: &Quadrature) -> Result<MetricsReport> {
    cfg.validate()?;
    let geometries = cfg.geometries()?;
    let p_av_per_tier: Vec<f64> = geometries.iter().map(availability_probability).collect();
    let p_cov = coverage_probability(cfg, quad)?;
    let p_suc = p_av_per_tier[cfg.legit_tier] * p_cov;
    let p_out = secrecy_outage_probability(cfg, quad)?;
    let p_sec = p_suc * p_out;
    let inv_noise = 1.0 / cfg.noise_power();
    let laplace_at_inverse_noise = geometries
        .iter()
        .map(|g| interference_laplace(inv_noise, g, cfg, quad))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport {
        p_av_per_tier,
        p_cov,
        p_suc,
        p_out,
        p_sec,
        laplace_at_inverse_noise,
    })
}
