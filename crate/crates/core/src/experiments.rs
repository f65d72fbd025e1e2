//! Analytic-versus-simulation validation, parameter sweeps and the
//! power-split optimizer.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytics::{
    availability_probability, coverage_probability, full_report, secrecy_outage_probability, Quadrature,
};
use crate::channel::db_to_linear;
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::montecarlo::{estimate, McEstimate, McReport};

/// Absolute band below which a validation row always passes.
pub const VALIDATION_FLOOR: f64 = 0.02;

/// Pass band for a Monte Carlo estimate with standard error `stderr`.
pub fn validation_tolerance(stderr: f64) -> f64 {
    VALIDATION_FLOOR.max(3.0 * stderr)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub metric: String,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub abs_diff: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationTable {
    pub rows: Vec<ValidationRow>,
    pub n_trials: u64,
    pub seed: u64,
}

impl ValidationTable {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Compares every analytic metric with its Monte Carlo estimate.
pub fn validate(cfg: &NetworkConfig, n_trials: u64, seed: u64, quad: &Quadrature) -> Result<ValidationTable> {
    let analytic = full_report(cfg, quad)?;
    let mc = estimate(cfg, n_trials, seed)?;
    let mut exact: Vec<f64> = analytic.p_av_per_tier.clone();
    exact.extend([analytic.p_cov, analytic.p_suc, analytic.p_out, analytic.p_sec]);
    let rows = mc
        .metrics()
        .into_iter()
        .zip(exact)
        .map(|((metric, e), a)| {
            let abs_diff = (a - e.mean).abs();
            ValidationRow {
                metric,
                analytic: a,
                mc_mean: e.mean,
                mc_stderr: e.stderr,
                abs_diff,
                pass: abs_diff <= validation_tolerance(e.stderr),
            }
        })
        .collect();
    Ok(ValidationTable { rows, n_trials, seed })
}

/// Scenario knobs a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Information-bearing ratio.
    Gamma,
    /// Beam half-angle in radians.
    ThetaBeam,
    /// Altitude of the legitimate tier in km.
    AltitudeM,
    /// Satellites per tier, applied to every tier.
    NumSatellites,
    /// Devices per km^2.
    DeviceDensity,
    /// One-based index of the legitimate tier.
    LegitTier,
    /// Legitimate decoding threshold in dB.
    BetaLs,
    /// Eavesdropper decoding threshold in dB.
    BetaEs,
}

impl SweepParam {
    pub const ALL: [SweepParam; 8] = [
        SweepParam::Gamma,
        SweepParam::ThetaBeam,
        SweepParam::AltitudeM,
        SweepParam::NumSatellites,
        SweepParam::DeviceDensity,
        SweepParam::LegitTier,
        SweepParam::BetaLs,
        SweepParam::BetaEs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Gamma => "gamma",
            SweepParam::ThetaBeam => "theta_beam",
            SweepParam::AltitudeM => "altitude_m",
            SweepParam::NumSatellites => "num_satellites",
            SweepParam::DeviceDensity => "device_density",
            SweepParam::LegitTier => "legit_tier",
            SweepParam::BetaLs => "beta_ls",
            SweepParam::BetaEs => "beta_es",
        }
    }

    /// Writes `value` into `cfg`; the result is validated by the caller.
    pub fn apply(self, cfg: &mut NetworkConfig, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::invalid(self.name(), format!("value {value} is not finite")));
        }
        match self {
            SweepParam::Gamma => cfg.radio.info_ratio = value,
            SweepParam::ThetaBeam => cfg.theta_beam = value,
            SweepParam::AltitudeM => {
                let m = cfg.legit_tier;
                cfg.tiers
                    .get_mut(m)
                    .ok_or_else(|| Error::invalid("legit_tier", format!("tier {} does not exist", m + 1)))?
                    .altitude_km = value;
            }
            SweepParam::NumSatellites => {
                let n = whole_number(self, value)?;
                let n = u32::try_from(n).map_err(|_| Error::invalid(self.name(), "too many satellites"))?;
                cfg.tiers.iter_mut().for_each(|t| t.num_satellites = n);
            }
            SweepParam::DeviceDensity => cfg.device_density_per_km2 = value,
            SweepParam::LegitTier => {
                let k = whole_number(self, value)?;
                if k == 0 {
                    return Err(Error::invalid(self.name(), "tiers are numbered from 1"));
                }
                cfg.legit_tier = (k - 1) as usize;
            }
            SweepParam::BetaLs => cfg.beta_ls = db_to_linear(value),
            SweepParam::BetaEs => cfg.beta_es = db_to_linear(value),
        }
        Ok(())
    }
}

fn whole_number(param: SweepParam, value: f64) -> Result<u64> {
    if value < 0.0 || value.fract() != 0.0 {
        return Err(Error::invalid(
            param.name(),
            format!("{value} is not a non-negative integer"),
        ));
    }
    Ok(value as u64)
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownParameter(s.to_string()))
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sweepable outputs. `PAv` refers to the legitimate tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    PAv,
    PCov,
    PSuc,
    POut,
    PSec,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::PAv, Metric::PCov, Metric::PSuc, Metric::POut, Metric::PSec];

    pub fn name(self) -> &'static str {
        match self {
            Metric::PAv => "p_av",
            Metric::PCov => "p_cov",
            Metric::PSuc => "p_suc",
            Metric::POut => "p_out",
            Metric::PSec => "p_sec",
        }
    }

    /// Closed-form value, computing only the pieces the metric needs.
    pub fn analytic(self, cfg: &NetworkConfig, quad: &Quadrature) -> Result<f64> {
        cfg.validate()?;
        let p_av = || Ok::<_, Error>(availability_probability(&cfg.legit_geometry()?));
        match self {
            Metric::PAv => p_av(),
            Metric::PCov => coverage_probability(cfg, quad),
            Metric::PSuc => Ok(p_av()? * coverage_probability(cfg, quad)?),
            Metric::POut => secrecy_outage_probability(cfg, quad),
            Metric::PSec => {
                let p_out = secrecy_outage_probability(cfg, quad)?;
                Ok(p_av()? * coverage_probability(cfg, quad)? * p_out)
            }
        }
    }

    pub fn from_mc(self, report: &McReport) -> McEstimate {
        match self {
            Metric::PAv => report.p_av[report.legit_tier],
            Metric::PCov => report.p_cov_joint,
            Metric::PSuc => report.p_suc,
            Metric::POut => report.p_out,
            Metric::PSec => report.p_sec,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Analytic,
    MonteCarlo,
    Both,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "montecarlo" => Ok(Engine::MonteCarlo),
            "both" => Ok(Engine::Both),
            other => Err(Error::invalid("engine", format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid(param.name(), "sweep needs at least one value"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(param.name(), format!("sweep value {v} is not finite")));
        }
        Ok(Self { param, values })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis1: SweepAxis,
    pub axis2: Option<SweepAxis>,
    pub metric: Metric,
    pub engine: Engine,
    /// Trials per grid point for the Monte Carlo engine.
    pub n_trials: u64,
    pub seed: u64,
}

/// One long-format output row. Monte Carlo rows carry the metric name with
/// an `_mc` suffix and a standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub metric: String,
    pub value: f64,
    pub stderr: Option<f64>,
}

/// Evaluates the metric at every grid point, axis1-major.
pub fn sweep(cfg: &NetworkConfig, spec: &SweepSpec, quad: &Quadrature) -> Result<Vec<SweepRow>> {
    let second: Vec<Option<f64>> = match &spec.axis2 {
        Some(axis) => axis.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let cells: Vec<(f64, Option<f64>)> = spec
        .axis1
        .values
        .iter()
        .flat_map(|&a| second.iter().map(move |&b| (a, b)))
        .collect();
    let per_cell: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(a, b)| {
            let mut point = cfg.clone();
            spec.axis1.param.apply(&mut point, a)?;
            if let (Some(axis), Some(b)) = (&spec.axis2, b) {
                axis.param.apply(&mut point, b)?;
            }
            point.validate()?;
            let mut rows = Vec::with_capacity(2);
            if matches!(spec.engine, Engine::Analytic | Engine::Both) {
                rows.push(SweepRow {
                    axis1: a,
                    axis2: b,
                    metric: spec.metric.name().to_string(),
                    value: spec.metric.analytic(&point, quad)?,
                    stderr: None,
                });
            }
            if matches!(spec.engine, Engine::MonteCarlo | Engine::Both) {
                let e = spec.metric.from_mc(&estimate(&point, spec.n_trials, spec.seed)?);
                rows.push(SweepRow {
                    axis1: a,
                    axis2: b,
                    metric: format!("{}_mc", spec.metric.name()),
                    value: e.mean,
                    stderr: Some(e.stderr),
                });
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

/// Default information-bearing ratios: 0.05 to 0.85 in steps of 0.05,
/// then 0.9, 0.95 and 0.99.
pub fn default_gamma_grid() -> Vec<f64> {
    (1..=17)
        .map(|i| f64::from(i) * 0.05)
        .chain([0.9, 0.95, 0.99])
        .map(|g| (g * 1e12).round() / 1e12)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaOptimum {
    pub gamma_star: f64,
    pub p_sec_star: f64,
    /// `(gamma, p_sec)` at the uniform grid points.
    pub grid: Vec<(f64, f64)>,
}

const GOLDEN_ITERATIONS: usize = 40;

/// Maximizes the analytic secure probability over `gamma` in `(0, 1]`:
/// a uniform grid `i / grid_points` followed by golden-section refinement
/// inside the bracket around the best grid point.
pub fn optimize_gamma(cfg: &NetworkConfig, grid_points: usize, quad: &Quadrature) -> Result<GammaOptimum> {
    if grid_points < 3 {
        return Err(Error::invalid("grid_points", "need at least 3 grid points"));
    }
    let objective = |gamma: f64| -> Result<f64> {
        let mut point = cfg.clone();
        point.radio.info_ratio = gamma;
        Metric::PSec.analytic(&point, quad)
    };
    let n = grid_points as f64;
    let grid: Vec<(f64, f64)> = (1..=grid_points)
        .into_par_iter()
        .map(|i| {
            let g = i as f64 / n;
            Ok((g, objective(g)?))
        })
        .collect::<Result<_>>()?;
    let best = (0..grid.len())
        .max_by(|&a, &b| grid[a].1.total_cmp(&grid[b].1).then(b.cmp(&a)))
        .expect("grid is non-empty");
    let (mut gamma_star, mut p_sec_star) = grid[best];

    let mut lo = if best == 0 { 0.0 } else { grid[best - 1].0 };
    let mut hi = grid.get(best + 1).map_or(1.0, |p| p.0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (objective(x1)?, objective(x2)?);
    for _ in 0..GOLDEN_ITERATIONS {
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f > p_sec_star {
                gamma_star = x;
                p_sec_star = f;
            }
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2)?;
        }
    }
    Ok(GammaOptimum {
        gamma_star,
        p_sec_star,
        grid,
    })
}
