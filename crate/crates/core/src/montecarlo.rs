//! Snapshot Monte Carlo oracle.
//!
//! Each trial draws every constellation afresh, finds the nearest
//! legitimate satellite, and for every receiver actually in view of the
//! typical device draws an independent Poisson field of interfering devices
//! over that receiver's visibility cap. Only central angles matter for the
//! metrics, so the trial works on versines `1 - cos(angle)` throughout.
//!
//! Trial `i` of a run seeded with `master_seed` uses its own generator keyed
//! by [`trial_seed`], so results do not depend on scheduling or on the
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{sample_fade, sinr_eavesdropper, sinr_legitimate, FadingParams};
use crate::config::NetworkConfig;
use crate::error::Result;
use crate::geometry::{
    angle_from_versine, cap_area_km2, sample_cap_versine, sample_poisson_count, sample_sphere_versine, versine,
    TierGeometry,
};

/// Random generator used by every sampler in the crate.
pub type SimRng = ChaCha8Rng;

/// Counter-based seed for trial `index`: the SplitMix64 output at position
/// `index` of the stream started at `master_seed`.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut z = master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_rng(master_seed: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(trial_seed(master_seed, index))
}

/// Per-trial indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub in_view_per_tier: Vec<bool>,
    /// Present iff the legitimate tier is in view.
    pub sinr_ls: Option<f64>,
    /// Zero when no eavesdropper sees the typical device.
    pub max_es_sinr: f64,
}

#[derive(Debug, Clone, Copy)]
struct TierWorld {
    num_satellites: u32,
    shell_radius_km: f64,
    cap_versine: f64,
    /// Expected number of interfering devices in the cap.
    mean_devices: f64,
}

/// Configuration pre-digested for fast repeated trials.
#[derive(Debug, Clone)]
pub struct World {
    tiers: Vec<TierWorld>,
    legit: usize,
    earth_radius_km: f64,
    power_scale: f64,
    noise_w: f64,
    info_ratio: f64,
    fading: FadingParams,
}

impl World {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        let tiers = cfg
            .geometries()?
            .iter()
            .map(|g| TierWorld {
                num_satellites: g.num_satellites,
                shell_radius_km: g.shell_radius_km,
                cap_versine: versine(g.max_central_angle),
                mean_devices: cfg.device_density_per_km2 * cap_area_km2(g.max_central_angle, cfg.earth_radius_km),
            })
            .collect();
        Ok(Self {
            tiers,
            legit: cfg.legit_tier,
            earth_radius_km: cfg.earth_radius_km,
            power_scale: cfg.radio.power_scale(),
            noise_w: cfg.noise_power(),
            info_ratio: cfg.radio.info_ratio,
            fading: cfg.fading,
        })
    }

    /// Squared device-satellite distance in m^2 from the versine.
    #[inline]
    fn distance_sq_m2(&self, tier: usize, versine: f64) -> f64 {
        let (r, re) = (self.tiers[tier].shell_radius_km, self.earth_radius_km);
        ((r - re) * (r - re) + 2.0 * r * re * versine) * 1e6
    }

    /// Received power at a satellite of `tier` from a device at `versine`.
    #[inline]
    fn received(&self, tier: usize, versine: f64, fade: f64) -> f64 {
        self.power_scale * fade / self.distance_sq_m2(tier, versine)
    }
}

/// Source of the random ingredients of one snapshot. The production
/// implementation draws from a generator; tests can pin any ingredient.
pub(crate) trait Sampler {
    /// Versine of each satellite of `tier` with respect to the typical device.
    fn satellites(&mut self, world: &World, tier: usize, out: &mut Vec<f64>);
    fn fade(&mut self, world: &World) -> f64;
    /// Aggregate interference at a satellite of `tier`.
    fn interference(&mut self, world: &World, tier: usize) -> f64;
}

struct RandomSampler<'a, R: Rng>(&'a mut R);

impl<R: Rng> Sampler for RandomSampler<'_, R> {
    fn satellites(&mut self, world: &World, tier: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..world.tiers[tier].num_satellites).map(|_| sample_sphere_versine(self.0)));
    }

    fn fade(&mut self, world: &World) -> f64 {
        sample_fade(&world.fading, self.0)
    }

    fn interference(&mut self, world: &World, tier: usize) -> f64 {
        sample_interference(world, tier, self.0)
    }
}

fn sample_interference<R: Rng + ?Sized>(world: &World, tier: usize, rng: &mut R) -> f64 {
    let t = &world.tiers[tier];
    let count = sample_poisson_count(t.mean_devices, rng);
    let mut total = 0.0;
    for _ in 0..count {
        let v = sample_cap_versine(t.cap_versine, rng);
        let h = sample_fade(&world.fading, rng);
        total += world.received(tier, v, h);
    }
    total
}

pub(crate) fn simulate_snapshot(world: &World, sampler: &mut impl Sampler) -> TrialOutcome {
    let k_tiers = world.tiers.len();
    let mut constellation: Vec<Vec<f64>> = Vec::with_capacity(k_tiers);
    let mut in_view_per_tier = Vec::with_capacity(k_tiers);
    for k in 0..k_tiers {
        let mut sats = Vec::new();
        sampler.satellites(world, k, &mut sats);
        let cap = world.tiers[k].cap_versine;
        in_view_per_tier.push(sats.iter().any(|&v| v <= cap));
        constellation.push(sats);
    }

    let m = world.legit;
    let sinr_ls = if in_view_per_tier[m] {
        let nearest = constellation[m].iter().copied().fold(f64::INFINITY, f64::min);
        let signal = world.received(m, nearest, sampler.fade(world));
        let interference = sampler.interference(world, m);
        Some(sinr_legitimate(signal, interference, world.noise_w, world.info_ratio))
    } else {
        None
    };

    let mut max_es_sinr: f64 = 0.0;
    for k in (0..k_tiers).filter(|&k| k != m) {
        let cap = world.tiers[k].cap_versine;
        for &v in constellation[k].iter().filter(|&&v| v <= cap) {
            let signal = world.received(k, v, sampler.fade(world));
            let interference = sampler.interference(world, k);
            let sinr = sinr_eavesdropper(signal, interference, world.noise_w, world.info_ratio);
            max_es_sinr = max_es_sinr.max(sinr);
        }
    }

    TrialOutcome {
        in_view_per_tier,
        sinr_ls,
        max_es_sinr,
    }
}

/// One snapshot of the network drawn from `trial_seed`.
pub fn run_trial(cfg: &NetworkConfig, trial_seed: u64) -> Result<TrialOutcome> {
    let world = World::new(cfg)?;
    let mut rng = SimRng::seed_from_u64(trial_seed);
    Ok(simulate_snapshot(&world, &mut RandomSampler(&mut rng)))
}

/// Empirical estimate of a probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_trials: u64,
    pub master_seed: u64,
}

impl McEstimate {
    /// Frequency estimate of an indicator with binomial standard error.
    pub fn from_count(hits: u64, n_trials: u64, master_seed: u64) -> Self {
        let n = n_trials as f64;
        let mean = hits as f64 / n;
        Self {
            mean,
            stderr: (mean * (1.0 - mean) / n).sqrt(),
            n_trials,
            master_seed,
        }
    }

    /// Sample mean of real-valued draws with the usual standard error.
    pub fn from_samples(values: &[f64], master_seed: u64) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            stderr: (var / n).sqrt(),
            n_trials: values.len() as u64,
            master_seed,
        }
    }

    /// Product of two estimates, first-order error propagation.
    fn times(&self, other: &McEstimate) -> Self {
        Self {
            mean: self.mean * other.mean,
            stderr: ((other.mean * self.stderr).powi(2) + (self.mean * other.stderr).powi(2)).sqrt(),
            ..*self
        }
    }
}

/// Monte Carlo counterparts of the analytic metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub p_av: Vec<McEstimate>,
    /// Joint frequency of "legitimate tier in view and SINR above threshold".
    pub p_cov_joint: McEstimate,
    /// `p_av[legit] * p_cov_joint`, composed like the analytic metric.
    pub p_suc: McEstimate,
    pub p_out: McEstimate,
    pub p_sec: McEstimate,
    pub legit_tier: usize,
}

impl McReport {
    /// `(name, estimate)` pairs; availability names are 1-based
    /// (`p_av_1`, `p_av_2`, ...).
    pub fn metrics(&self) -> Vec<(String, McEstimate)> {
        let mut out: Vec<(String, McEstimate)> = self
            .p_av
            .iter()
            .enumerate()
            .map(|(k, e)| (format!("p_av_{}", k + 1), *e))
            .collect();
        out.push(("p_cov".into(), self.p_cov_joint));
        out.push(("p_suc".into(), self.p_suc));
        out.push(("p_out".into(), self.p_out));
        out.push(("p_sec".into(), self.p_sec));
        out
    }
}

/// Runs `n_trials` snapshots in parallel and tallies the metric events.
pub fn estimate(cfg: &NetworkConfig, n_trials: u64, master_seed: u64) -> Result<McReport> {
    let world = World::new(cfg)?;
    let n_trials = n_trials.max(1);
    let outcomes: Vec<TrialOutcome> = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, i);
            simulate_snapshot(&world, &mut RandomSampler(&mut rng))
        })
        .collect();

    let k_tiers = cfg.tiers.len();
    let mut in_view = vec![0u64; k_tiers];
    let (mut covered, mut secret) = (0u64, 0u64);
    for o in &outcomes {
        for (count, &seen) in in_view.iter_mut().zip(&o.in_view_per_tier) {
            *count += u64::from(seen);
        }
        covered += u64::from(o.sinr_ls.is_some_and(|s| s > cfg.beta_ls));
        secret += u64::from(o.max_es_sinr < cfg.beta_es);
    }
    let p_av: Vec<McEstimate> = in_view
        .iter()
        .map(|&c| McEstimate::from_count(c, n_trials, master_seed))
        .collect();
    let p_cov_joint = McEstimate::from_count(covered, n_trials, master_seed);
    let p_out = McEstimate::from_count(secret, n_trials, master_seed);
    let p_suc = p_av[cfg.legit_tier].times(&p_cov_joint);
    let p_sec = p_suc.times(&p_out);
    Ok(McReport {
        p_av,
        p_cov_joint,
        p_suc,
        p_out,
        p_sec,
        legit_tier: cfg.legit_tier,
    })
}

/// Empirical `E[exp(-s I)]` at a satellite of tier `tier` for each `s`,
/// sharing the same `n_real` interference draws across the grid.
pub fn estimate_laplace(
    cfg: &NetworkConfig,
    tier: usize,
    s_grid: &[f64],
    n_real: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    let world = World::new(cfg)?;
    cfg.tier_geometry(tier)?;
    let fields: Vec<f64> = (0..n_real.max(1))
        .into_par_iter()
        .map(|i| sample_interference(&world, tier, &mut trial_rng(seed, i)))
        .collect();
    Ok(s_grid
        .iter()
        .map(|&s| {
            let values: Vec<f64> = fields.iter().map(|&i| (-s * i).exp()).collect();
            McEstimate::from_samples(&values, seed)
        })
        .collect())
}

/// In-view frequency of a single tier over `n` independent constellations.
pub fn estimate_availability(tier: &TierGeometry, n: u64, seed: u64) -> McEstimate {
    let cap = versine(tier.max_central_angle);
    let sats = tier.num_satellites;
    let hits: u64 = (0..n.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            u64::from((0..sats).any(|_| sample_sphere_versine(&mut rng) <= cap))
        })
        .sum();
    McEstimate::from_count(hits, n.max(1), seed)
}

/// Contact angles (radians) to the nearest of `num_satellites` uniform
/// satellites, one per independent constellation.
pub fn sample_contact_angles(num_satellites: u32, n: u64, seed: u64) -> Vec<f64> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let nearest = (0..num_satellites)
                .map(|_| sample_sphere_versine(&mut rng))
                .fold(2.0, f64::min);
            angle_from_versine(nearest)
        })
        .collect()
}

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `samples` and `cdf`. Sorts `samples` in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}
