//! Poisson point process Monte Carlo for every network variant.
//!
//! BSs are dropped in a disk around the typical user at the origin. The
//! interference from beyond the disk is replaced by its mean, so moderate
//! disks give negligible truncation bias.

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Normal, Poisson};
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::coverage::{Association, MisoGain, NetworkModel, PathLoss};
use crate::error::{bad, Error, Result};
use crate::fading::{Component, FadingKind, FadingModel};
use crate::foxh::{self, FoxH};
use crate::quad::{gauss_kronrod, gauss_kronrod_inf};

/// Expected number of BSs in the simulation disk.
pub const TARGET_POINTS: f64 = 600.0;
const CHUNK: usize = 4096;
const TABLE_NODES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub tier: usize,
    /// Interferer-role fading draw.
    pub gain: f64,
    /// LOS flag (mmWave only, otherwise true).
    pub los: bool,
    /// Beam offset θ_x ∈ [−1, 1] (mmWave only, otherwise 0).
    pub beam: f64,
}

impl Point {
    pub fn distance(&self) -> f64 {
        if self.y == 0.0 {
            self.x.abs()
        } else {
            self.x.hypot(self.y)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub points: Vec<Point>,
    pub region_radius: f64,
    /// Dedicated transmitter of the fixed-distance (dipole) model.
    pub dedicated: Option<Point>,
    /// Fresh serving-link gains per tier (closest and fixed-distance rules).
    pub serving_gain: Vec<f64>,
    /// Mean interference from outside the disk.
    pub far_field: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub half_width: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, trials: u64, seed: u64) -> Self {
        let p = hits as f64 / trials as f64;
        McEstimate { value: p, half_width: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(), trials, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkOutcome {
    pub sinr: f64,
    pub tier: usize,
    pub covered: bool,
}

/// Gain sampler for one fading model.
#[derive(Debug, Clone)]
pub enum Sampler {
    Gamma(Gamma<f64>),
    /// g = Y^power / c with Y ~ Gamma
    PowGamma { y: Gamma<f64>, power: f64, c: f64 },
    Rice { los: f64, diffuse: Normal<f64> },
    Lognormal(Normal<f64>),
    FisherF { num: Gamma<f64>, den: Gamma<f64>, scale: f64 },
    Table(InverseCdf),
    Atom(f64),
    Mixture { cumulative: Vec<f64>, parts: Vec<Sampler> },
}

impl Sampler {
    pub fn new(model: &FadingModel) -> Result<Self> {
        let gamma = |shape: f64, scale: f64| Gamma::new(shape, scale).map_err(|e| bad("fading", e.to_string()));
        match model.kind {
            FadingKind::Gamma { m } => Ok(Sampler::Gamma(gamma(m, 1.0 / m)?)),
            FadingKind::Rice { k, .. } => Ok(Sampler::Rice {
                los: (k / (k + 1.0)).sqrt(),
                diffuse: Normal::new(0.0, (0.5 / (k + 1.0)).sqrt()).map_err(|e| bad("fading", e.to_string()))?,
            }),
            FadingKind::Lognormal { mu, sigma, .. } => Ok(Sampler::Lognormal(
                Normal::new(mu * std::f64::consts::LN_10, sigma * std::f64::consts::LN_10)
                    .map_err(|e| bad("fading", e.to_string()))?,
            )),
            FadingKind::FisherF { m, ms } => {
                Ok(Sampler::FisherF { num: gamma(m, 1.0)?, den: gamma(ms, 1.0)?, scale: ms / m })
            }
            _ => {
                let mut parts = Vec::new();
                let mut cumulative = Vec::new();
                let mut acc = 0.0;
                for c in &model.components {
                    acc += c.weight();
                    cumulative.push(acc);
                    parts.push(match c {
                        Component::Kernel { h, .. } => Self::kernel(h)?,
                        Component::Atom { location, .. } => Sampler::Atom(*location),
                    });
                }
                if parts.len() == 1 {
                    return Ok(parts.pop().unwrap());
                }
                Ok(Sampler::Mixture { cumulative, parts })
            }
        }
    }

    fn kernel(h: &FoxH) -> Result<Self> {
        let r = h.reduce();
        if r.upper.is_empty() && r.lower.len() == 1 && r.u == 1 {
            let b = r.lower[0];
            let y = Gamma::new(b.shift + b.scale, 1.0).map_err(|e| bad("fading", e.to_string()))?;
            return Ok(Sampler::PowGamma { y, power: b.scale, c: h.c });
        }
        Ok(Sampler::Table(InverseCdf::new(h)?))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Gamma(g) => g.sample(rng),
            Sampler::PowGamma { y, power, c } => y.sample(rng).powf(*power) / c,
            Sampler::Rice { los, diffuse } => {
                let re = los + diffuse.sample(rng);
                let im = diffuse.sample(rng);
                re * re + im * im
            }
            Sampler::Lognormal(n) => n.sample(rng).exp(),
            Sampler::FisherF { num, den, scale } => scale * num.sample(rng) / den.sample(rng),
            Sampler::Table(t) => t.sample(rng),
            Sampler::Atom(x) => *x,
            Sampler::Mixture { cumulative, parts } => {
                let u: f64 = rng.gen::<f64>() * cumulative.last().copied().unwrap_or(1.0);
                let i = cumulative.partition_point(|&c| c < u).min(parts.len() - 1);
                parts[i].sample(rng)
            }
        }
    }
}

/// Inverse CDF of a single Fox-H density, tabulated on log-spaced nodes.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    ln_x: Vec<f64>,
    cdf: Vec<f64>,
}

impl InverseCdf {
    pub fn new(h: &FoxH) -> Result<Self> {
        let pdf = |x: f64| -> f64 { foxh::eval(h, h.c * x, 1e-8).map(|v| (h.kappa * v).max(0.0)).unwrap_or(0.0) };
        // ±30 in ln x around the bulk scale 1/c
        let centre = (1.0 / h.c).ln();
        let (lo, hi) = (centre - 30.0, centre + 30.0);
        let n = TABLE_NODES;
        let ln_x: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let dens: Vec<f64> = ln_x.iter().map(|&l| l.exp() * pdf(l.exp())).collect();
        let mut cdf = vec![0.0; n];
        let step = (hi - lo) / (n - 1) as f64;
        for i in 1..n {
            cdf[i] = cdf[i - 1] + 0.5 * step * (dens[i] + dens[i - 1]);
        }
        let total = cdf[n - 1];
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::QuadratureFailure { stage: "inverse-cdf table".into(), residual: total });
        }
        for c in &mut cdf {
            *c /= total;
        }
        Ok(InverseCdf { ln_x, cdf })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let i = self.cdf.partition_point(|&c| c < u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        (self.ln_x[i - 1] + t * (self.ln_x[i] - self.ln_x[i - 1])).exp()
    }
}

/// Path loss L(r) of the variant; mmWave picks the exponent by LOS state.
fn path_gain(pl: &PathLoss, r: f64, los: bool) -> f64 {
    match *pl {
        PathLoss::Unbounded { alpha } => r.powf(-alpha),
        PathLoss::Bounded { alpha } => (1.0 + r).powf(-alpha),
        PathLoss::ThreeD { alpha, h } => (h * h + r * r).powf(-alpha / 2.0),
        PathLoss::MmWave { alpha_los, alpha_nlos, .. } => (1.0 + r).powf(if los { -alpha_los } else { -alpha_nlos }),
    }
}

/// Cosine array pattern G(x) with N antennas.
pub fn array_gain(x: f64, n: u32) -> f64 {
    let nf = n as f64;
    if x.abs() <= 1.0 / nf {
        let c = (PI * nf * x / 2.0).cos();
        c * c
    } else {
        0.0
    }
}

/// Simulation disk radius: about [`TARGET_POINTS`] BSs in expectation,
/// and large against the link distance or antenna height.
pub fn region_radius(net: &NetworkModel) -> f64 {
    let total: f64 = net.tiers.iter().map(|t| t.density).sum();
    let mut r = (TARGET_POINTS / (PI * total)).sqrt();
    if let Association::FixedDistance(d) = net.association {
        r = r.max(20.0 * d);
    }
    if let PathLoss::ThreeD { h, .. } = net.path_loss {
        r = r.max(20.0 * h);
    }
    r
}

/// Everything that is fixed across trials.
struct Context {
    radius: f64,
    interferer: Vec<Sampler>,
    serving: Vec<Sampler>,
    poisson: Vec<Option<Poisson<f64>>>,
    far_field: f64,
    cum_density: Vec<f64>,
}

impl Context {
    fn new(net: &NetworkModel, radius: f64) -> Result<Self> {
        net.validate()?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(bad("region_radius", format!("must be positive, got {radius}")));
        }
        let strongest = net.association == Association::StrongestBs;
        let mut interferer = Vec::new();
        let mut serving = Vec::new();
        let mut poisson = Vec::new();
        let mut cum_density = Vec::new();
        let mut acc = 0.0;
        for t in &net.tiers {
            // max-SIR selection needs one draw per BS for both roles
            let f = if strongest { &t.fading } else { &t.interferer_fading };
            interferer.push(Sampler::new(f)?);
            serving.push(match t.miso_gain {
                MisoGain::Gamma { shape, scale } => {
                    Sampler::Gamma(Gamma::new(shape, scale).map_err(|e| bad("miso_gain", e.to_string()))?)
                }
                MisoGain::None => Sampler::new(&t.fading)?,
            });
            let mean = t.density * PI * radius * radius;
            poisson.push(if mean > 0.0 { Some(Poisson::new(mean).map_err(|e| bad("density", e.to_string()))?) } else { None });
            acc += t.density;
            cum_density.push(acc);
        }
        let far_field = far_field_mean(net, radius, strongest)?;
        Ok(Context { radius, interferer, serving, poisson, far_field, cum_density })
    }
}

/// Σ_j 2π λ_j P_j E[g_j] E[G] ∫_R^∞ L(x) x dx
fn far_field_mean(net: &NetworkModel, radius: f64, strongest: bool) -> Result<f64> {
    let tail = match net.path_loss {
        PathLoss::Unbounded { alpha } => radius.powf(2.0 - alpha) / (alpha - 2.0),
        PathLoss::Bounded { alpha } => {
            let r1 = 1.0 + radius;
            r1.powf(2.0 - alpha) / (alpha - 2.0) - r1.powf(1.0 - alpha) / (alpha - 1.0)
        }
        PathLoss::ThreeD { alpha, h } => (h * h + radius * radius).powf(1.0 - alpha / 2.0) / (alpha - 2.0),
        PathLoss::MmWave { alpha_los, alpha_nlos, tau, .. } => {
            let f = |x: f64| {
                let p = (-tau * x).exp();
                x * (p * (1.0 + x).powf(-alpha_los) + (1.0 - p) * (1.0 + x).powf(-alpha_nlos))
            };
            gauss_kronrod_inf(f, radius, 1e-300, 1e-10, 400).value
        }
    };
    let mut acc = 0.0;
    for t in &net.tiers {
        let f = if strongest { &t.fading } else { &t.interferer_fading };
        let beam = match net.path_loss {
            PathLoss::MmWave { spacing, wavelength, .. } => {
                let n = t.antennas;
                0.5 * gauss_kronrod(|u: f64| array_gain(spacing * u / wavelength, n), -1.0, 1.0, 1e-14, 1e-10, 400).value
            }
            _ => 1.0,
        };
        acc += 2.0 * PI * t.density * t.power * f.mean * beam * tail;
    }
    Ok(acc)
}

/// With `angles` false every point is placed on the positive x-axis; only
/// distances enter the SINR, so trial loops skip the trigonometry.
fn fill<R: Rng + ?Sized>(net: &NetworkModel, ctx: &Context, rng: &mut R, real: &mut Realization, angles: bool) {
    real.points.clear();
    real.region_radius = ctx.radius;
    real.far_field = ctx.far_field;
    let tau = match net.path_loss {
        PathLoss::MmWave { tau, .. } => Some(tau),
        _ => None,
    };
    for (k, poisson) in ctx.poisson.iter().enumerate() {
        let count = poisson.as_ref().map_or(0, |p| p.sample(rng) as usize);
        for _ in 0..count {
            let rr = ctx.radius * rng.gen::<f64>().sqrt();
            let (x, y) = if angles {
                let ang = 2.0 * PI * rng.gen::<f64>();
                (rr * ang.cos(), rr * ang.sin())
            } else {
                (rr, 0.0)
            };
            let gain = ctx.interferer[k].sample(rng);
            let (los, beam) = match tau {
                Some(tau) => (rng.gen::<f64>() < (-tau * rr).exp(), 2.0 * rng.gen::<f64>() - 1.0),
                None => (true, 0.0),
            };
            real.points.push(Point { x, y, tier: k, gain, los, beam });
        }
    }
    real.serving_gain.clear();
    for s in &ctx.serving {
        real.serving_gain.push(s.sample(rng));
    }
    real.dedicated = match net.association {
        Association::FixedDistance(r) => {
            let total = *ctx.cum_density.last().unwrap();
            let u = rng.gen::<f64>() * total;
            let k = ctx.cum_density.partition_point(|&c| c < u).min(net.tiers.len() - 1);
            let los = match tau {
                Some(tau) => rng.gen::<f64>() < (-tau * r).exp(),
                None => true,
            };
            Some(Point { x: r, y: 0.0, tier: k, gain: real.serving_gain[k], los, beam: 0.0 })
        }
        _ => None,
    };
}

/// One realization on the default disk, from stream 0 of `seed`.
pub fn sample_network(net: &NetworkModel, seed: u64) -> Result<Realization> {
    sample_network_in(net, seed, region_radius(net))
}

pub fn sample_network_in(net: &NetworkModel, seed: u64, radius: f64) -> Result<Realization> {
    let ctx = Context::new(net, radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut real = Realization { points: Vec::new(), region_radius: radius, dedicated: None, serving_gain: Vec::new(), far_field: 0.0 };
    fill(net, &ctx, &mut rng, &mut real, true);
    Ok(real)
}

fn beam_gain(net: &NetworkModel, p: &Point) -> f64 {
    match net.path_loss {
        PathLoss::MmWave { spacing, wavelength, .. } => array_gain(spacing * p.beam / wavelength, net.tiers[p.tier].antennas),
        _ => 1.0,
    }
}

/// Received power from a point in its interferer role.
fn interference_power(net: &NetworkModel, p: &Point) -> f64 {
    net.tiers[p.tier].power * path_gain(&net.path_loss, p.distance(), p.los) * p.gain * beam_gain(net, p)
}

/// Serving link under the network's association rule.
pub fn evaluate_link(real: &Realization, net: &NetworkModel) -> Result<LinkOutcome> {
    let pl = &net.path_loss;
    match net.association {
        Association::FixedDistance(r) => {
            let d = real.dedicated.ok_or(Error::EmptyRealization)?;
            let t = &net.tiers[d.tier];
            let signal = t.power * path_gain(pl, r, d.los) * d.gain;
            let interference: f64 = real.points.iter().map(|p| interference_power(net, p)).sum::<f64>() + real.far_field;
            let sinr = signal / (interference + net.noise);
            Ok(LinkOutcome { sinr, tier: d.tier, covered: sinr > t.threshold })
        }
        Association::ClosestBs => {
            // max average received power; LOS state is known to the user
            let mut best: Option<(usize, f64, f64)> = None;
            let mut total = real.far_field;
            for (i, p) in real.points.iter().enumerate() {
                let avg = net.tiers[p.tier].power * path_gain(pl, p.distance(), p.los);
                let rx = avg * p.gain * beam_gain(net, p);
                total += rx;
                if best.is_none_or(|(_, b, _)| avg > b) {
                    best = Some((i, avg, rx));
                }
            }
            let (i, avg, rx) = best.ok_or(Error::EmptyRealization)?;
            let k = real.points[i].tier;
            let signal = avg * real.serving_gain[k];
            let sinr = signal / ((total - rx).max(0.0) + net.noise);
            Ok(LinkOutcome { sinr, tier: k, covered: sinr > net.tiers[k].threshold })
        }
        Association::StrongestBs => {
            // noise-free: pick the BS with the largest SIR relative to its threshold
            let powers: Vec<f64> = real.points.iter().map(|p| interference_power(net, p)).collect();
            let total: f64 = powers.iter().sum::<f64>() + real.far_field;
            let mut best: Option<(usize, f64, f64)> = None;
            for (i, &s) in powers.iter().enumerate() {
                let sir = s / (total - s);
                let score = sir / net.tiers[real.points[i].tier].threshold;
                if best.is_none_or(|(_, _, b)| score > b) {
                    best = Some((i, sir, score));
                }
            }
            let (i, sir, score) = best.ok_or(Error::EmptyRealization)?;
            Ok(LinkOutcome { sinr: sir, tier: real.points[i].tier, covered: score > 1.0 })
        }
    }
}

pub fn compute_sinr(real: &Realization, net: &NetworkModel) -> Result<f64> {
    evaluate_link(real, net).map(|o| o.sinr)
}

pub fn estimate_coverage(net: &NetworkModel, trials: u64, seed: u64) -> Result<McEstimate> {
    estimate_coverage_in(net, trials, seed, region_radius(net))
}

/// Trials are split into chunks of 4096, chunk i drawing from ChaCha stream i,
/// so the estimate does not depend on the number of worker threads.
pub fn estimate_coverage_in(net: &NetworkModel, trials: u64, seed: u64, radius: f64) -> Result<McEstimate> {
    if trials < 1000 {
        return Err(bad("trials", format!("at least 1000 required, got {trials}")));
    }
    let ctx = Context::new(net, radius)?;
    let chunks = (trials as usize).div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(trials as usize - c * CHUNK);
            let mut real =
                Realization { points: Vec::new(), region_radius: radius, dedicated: None, serving_gain: Vec::new(), far_field: 0.0 };
            let mut hits = 0u64;
            for _ in 0..n {
                fill(net, &ctx, &mut rng, &mut real, false);
                // an empty disk leaves the user uncovered
                if let Ok(o) = evaluate_link(&real, net) {
                    hits += o.covered as u64;
                }
            }
            hits
        })
        .sum();
    Ok(McEstimate::from_hits(hits, trials, seed))
}
