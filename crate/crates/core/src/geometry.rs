//! Spherical geometry of Earth-centred shells.
//!
//! The typical device sits at the north pole of the Earth sphere, so the
//! central angle between it and any satellite equals that satellite's polar
//! angle. Every satellite tier is a shell of radius `R_k = R_earth + a_k`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

/// Mean Earth radius in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// A point on a sphere centred at the Earth's centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    /// Polar angle in radians, `[0, pi]`.
    pub polar_angle: f64,
    /// Azimuth in radians, `[0, 2pi)`.
    pub azimuth: f64,
    /// Kilometres, `> 0`.
    pub radius: f64,
}

impl SphericalPoint {
    pub fn new(polar_angle: f64, azimuth: f64, radius: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&polar_angle) {
            return Err(Error::Domain(format!("polar angle {polar_angle} outside [0, pi]")));
        }
        if !(0.0..TAU).contains(&azimuth) {
            return Err(Error::Domain(format!("azimuth {azimuth} outside [0, 2pi)")));
        }
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("radius {radius} must be positive")));
        }
        Ok(Self {
            polar_angle,
            azimuth,
            radius,
        })
    }

    /// The typical device, `(0, 0, R_earth)`.
    pub fn typical_device(earth_radius_km: f64) -> Self {
        Self {
            polar_angle: 0.0,
            azimuth: 0.0,
            radius: earth_radius_km,
        }
    }

    /// Unit direction vector.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.polar_angle.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Derived geometry of one satellite tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierGeometry {
    pub shell_radius_km: f64,
    pub num_satellites: u32,
    pub max_central_angle: f64,
}

impl TierGeometry {
    pub fn new(altitude_km: f64, num_satellites: u32, theta_beam: f64, earth_radius_km: f64) -> Result<Self> {
        if !(altitude_km > 0.0) || !altitude_km.is_finite() {
            return Err(Error::Domain(format!("altitude {altitude_km} km must be positive")));
        }
        let shell_radius_km = earth_radius_km + altitude_km;
        let max_central_angle = max_central_angle(theta_beam, shell_radius_km, earth_radius_km)?;
        Ok(Self {
            shell_radius_km,
            num_satellites,
            max_central_angle,
        })
    }
}

fn check_radii(shell_radius_km: f64, earth_radius_km: f64) -> Result<()> {
    if !(earth_radius_km > 0.0) || !(shell_radius_km > earth_radius_km) {
        return Err(Error::Domain(format!(
            "need shell radius {shell_radius_km} > earth radius {earth_radius_km} > 0"
        )));
    }
    Ok(())
}

/// Device-to-satellite distance in km from the central angle between them.
pub fn central_angle_to_distance(theta: f64, shell_radius_km: f64, earth_radius_km: f64) -> Result<f64> {
    check_radii(shell_radius_km, earth_radius_km)?;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("central angle {theta} outside [0, pi]")));
    }
    Ok(distance_from_versine(versine(theta), shell_radius_km, earth_radius_km))
}

/// Law of cosines on pre-validated radii, taking the versine
/// `1 - cos(theta)` of the central angle.
#[inline]
pub(crate) fn distance_from_versine(one_minus_cos: f64, shell_radius_km: f64, earth_radius_km: f64) -> f64 {
    let (r, re) = (shell_radius_km, earth_radius_km);
    // (r - re)^2 + 2 r re (1 - cos) keeps the nadir case exact.
    ((r - re) * (r - re) + 2.0 * r * re * one_minus_cos).sqrt()
}

/// Largest central angle at which a shell satellite still sees the device
/// inside its main lobe and above the horizon.
pub fn max_central_angle(theta_beam: f64, shell_radius_km: f64, earth_radius_km: f64) -> Result<f64> {
    check_radii(shell_radius_km, earth_radius_km)?;
    if !(theta_beam > 0.0 && theta_beam <= FRAC_PI_2) {
        return Err(Error::Domain(format!("beam half-angle {theta_beam} outside (0, pi/2]")));
    }
    let ratio = earth_radius_km / shell_radius_km;
    let horizon = ratio.acos();
    if theta_beam < ratio.asin() {
        let arg = (theta_beam.sin() / ratio).min(1.0);
        Ok((arg.asin() - theta_beam).min(horizon))
    } else {
        Ok(horizon)
    }
}

fn check_cap_angle(theta: f64, theta_max: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta_max) {
        return Err(Error::Domain(format!("cap angle {theta_max} outside [0, pi]")));
    }
    if !(theta >= 0.0 && theta <= theta_max) {
        return Err(Error::Domain(format!("angle {theta} outside [0, {theta_max}]")));
    }
    Ok(())
}

/// `ln((1 + cos theta) / 2) = 2 ln cos(theta / 2)`.
#[inline]
fn ln_half_one_plus_cos(theta: f64) -> f64 {
    2.0 * (0.5 * theta).cos().ln()
}

/// Probability that no satellite out of `n` lies within `theta` of the
/// device, `((1 + cos theta) / 2)^n`, in the log domain.
pub fn void_probability(theta: f64, num_satellites: u32) -> f64 {
    if num_satellites == 0 {
        return 1.0;
    }
    (f64::from(num_satellites) * ln_half_one_plus_cos(theta)).exp()
}

/// CDF of the contact angle to the nearest of `n` uniform satellites.
pub fn contact_angle_cdf(theta: f64, num_satellites: u32, theta_max: f64) -> Result<f64> {
    check_cap_angle(theta, theta_max)?;
    if num_satellites == 0 {
        return Ok(0.0);
    }
    Ok(-(f64::from(num_satellites) * ln_half_one_plus_cos(theta)).exp_m1())
}

/// Density of the contact angle; zero everywhere when `n = 0`.
pub fn contact_angle_pdf(theta: f64, num_satellites: u32, theta_max: f64) -> Result<f64> {
    check_cap_angle(theta, theta_max)?;
    Ok(contact_pdf_unchecked(theta, num_satellites))
}

#[inline]
pub(crate) fn contact_pdf_unchecked(theta: f64, num_satellites: u32) -> f64 {
    if num_satellites == 0 {
        return 0.0;
    }
    let n = f64::from(num_satellites);
    let tail = if num_satellites == 1 {
        1.0
    } else {
        ((n - 1.0) * ln_half_one_plus_cos(theta)).exp()
    };
    0.5 * n * theta.sin() * tail
}

/// Central angle between the directions of two points.
pub fn central_angle_between(a: &SphericalPoint, b: &SphericalPoint) -> f64 {
    let (u, v) = (a.direction(), b.direction());
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    dot.clamp(-1.0, 1.0).acos()
}

/// Versine `1 - cos(polar angle)` of a point uniform on the sphere; it is
/// uniform on `[0, 2)`.
#[inline]
pub(crate) fn sample_sphere_versine<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    2.0 * rng.random::<f64>()
}

/// Polar angle from its versine.
#[inline]
pub(crate) fn angle_from_versine(versine: f64) -> f64 {
    2.0 * (0.5 * versine).sqrt().min(1.0).asin()
}

/// `1 - cos(theta)` computed without cancellation.
#[inline]
pub fn versine(theta: f64) -> f64 {
    let h = (0.5 * theta).sin();
    2.0 * h * h
}

/// A point uniform on the unit sphere (radius 1).
pub fn sample_uniform_sphere<R: Rng + ?Sized>(rng: &mut R) -> SphericalPoint {
    let v = sample_sphere_versine(rng);
    SphericalPoint {
        polar_angle: angle_from_versine(v),
        azimuth: TAU * rng.random::<f64>(),
        radius: 1.0,
    }
}

/// Area of a spherical cap of half-angle `cap_angle`.
pub fn cap_area_km2(cap_angle: f64, radius_km: f64) -> f64 {
    2.0 * PI * radius_km * radius_km * versine(cap_angle)
}

/// Poisson count with the given mean; zero for non-positive means.
pub(crate) fn sample_poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(dist) => dist.sample(rng) as u64,
        Err(_) => 0,
    }
}

/// Versine of a point uniform on the cap around the pole whose edge has
/// versine `cap_versine`.
#[inline]
pub(crate) fn sample_cap_versine<R: Rng + ?Sized>(cap_versine: f64, rng: &mut R) -> f64 {
    cap_versine * rng.random::<f64>()
}

/// Homogeneous Poisson process restricted to the cap of half-angle
/// `cap_angle` around the north pole of a sphere of radius
/// `shell_radius_km`.
pub fn sample_cap_poisson<R: Rng + ?Sized>(
    density_per_km2: f64,
    cap_angle: f64,
    shell_radius_km: f64,
    rng: &mut R,
) -> Vec<SphericalPoint> {
    let mean = density_per_km2 * cap_area_km2(cap_angle, shell_radius_km);
    let count = sample_poisson_count(mean, rng);
    let cap_versine = versine(cap_angle);
    (0..count)
        .map(|_| SphericalPoint {
            polar_angle: angle_from_versine(sample_cap_versine(cap_versine, rng)).min(cap_angle),
            azimuth: TAU * rng.random::<f64>(),
            radius: shell_radius_km,
        })
        .collect()
}
