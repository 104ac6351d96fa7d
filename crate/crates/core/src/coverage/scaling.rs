//! Dense-regime multi-antenna approximations and their scaling limits.

use std::f64::consts::PI;

use super::{NetworkModel, PathLoss};
use crate::error::{bad, Error, Result};
use crate::fading::FadingModel;
use crate::foxh::{self, FoxH, Pair};
use crate::special::{expint, expint_scaled, ln_gamma};

const TOL: f64 = 1e-12;

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(bad(name, format!("must be positive, got {x}")))
    }
}

fn exponent(name: &str, a: f64) -> Result<()> {
    if a > 2.0 && a.is_finite() {
        Ok(())
    } else {
        Err(bad(name, format!("path-loss exponent must exceed 2, got {a}")))
    }
}

/// (1/Γ(N)) H^{2,0}_{1,2}[x | (1,1); (0,1), (N,1)], i.e. Q(N, x).
/// Below the mode Q is near 1, so it is taken as 1 − P(N, x) with
/// P = (1/Γ(N)) H^{1,1}_{1,2}[x | (1,1); (N,1), (0,1)] to keep the small side exact.
fn incomplete_gamma_h(n: u64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(bad("n_t", "must be at least 1"));
    }
    let nf = n as f64;
    let lower = x < nf;
    let h = if lower {
        FoxH::kernel(vec![Pair::new(1.0, 1.0)], vec![Pair::new(nf, 1.0), Pair::new(0.0, 1.0)], 1, 1)?
    } else {
        FoxH::kernel(vec![Pair::new(1.0, 1.0)], vec![Pair::new(0.0, 1.0), Pair::new(nf, 1.0)], 2, 0)?
    };
    let ev = foxh::eval_scaled(&h, x, -ln_gamma(nf), TOL).or_else(|_| foxh::eval_scaled(&h, x, -ln_gamma(nf), 1e-9))?;
    let v = ev.value.clamp(0.0, 1.0);
    Ok(if lower { 1.0 - v } else { v })
}

/// Bounded path loss, MRT with `n_t` antennas: Q(N_t, 2πλβ/η), η = (α−1)(α−2).
pub fn miso_bounded_approx(lambda: f64, n_t: u64, beta: f64, alpha: f64) -> Result<f64> {
    positive("lambda", lambda)?;
    positive("beta", beta)?;
    exponent("alpha", alpha)?;
    let eta = (alpha - 1.0) * (alpha - 2.0);
    incomplete_gamma_h(n_t, 2.0 * PI * lambda * beta / eta)
}

/// ∫_0^∞ t e^{−τt}(1+t)^{−α_L} dt + ∫_0^∞ t (1−e^{−τt})(1+t)^{−α_N} dt
/// = 𝒫 + e^τ 𝒥(τ).
pub fn blockage_factor(alpha_los: f64, alpha_nlos: f64, tau: f64) -> Result<f64> {
    for (name, a) in [("alpha_los", alpha_los), ("alpha_nlos", alpha_nlos)] {
        if a == 2.0 {
            return Err(Error::ParameterSingularity(format!("{name} = 2")));
        }
        exponent(name, a)?;
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(bad("tau", format!("must be non-negative, got {tau}")));
    }
    let (al, an) = (alpha_los, alpha_nlos);
    let p = (an - al - 1.0) / ((1.0 - al) * (an - 2.0));
    // e^τ E_ν(τ), kept finite for large τ
    let scaled = |nu: f64| if tau == 0.0 { expint(nu, 0.0) } else { expint_scaled(nu, tau) };
    let j = (al - 1.0 + tau) * scaled(al - 1.0) / (al - 1.0) - (an - 1.0 + tau) * scaled(an - 1.0) / (an - 1.0);
    Ok(p + j)
}

fn tier_beta(net: &NetworkModel) -> Result<f64> {
    net.tiers.first().map(|t| t.threshold).ok_or_else(|| bad("tiers", "at least one tier is required"))
}

/// Dense mmWave approximation Q(N_t, πλλ_t β K / d), K from [`blockage_factor`].
pub fn mmwave_approx(lambda: f64, n_t: u64, net: &NetworkModel) -> Result<f64> {
    positive("lambda", lambda)?;
    let PathLoss::MmWave { alpha_los, alpha_nlos, tau, spacing, wavelength, .. } = net.path_loss else {
        return Err(bad("path_loss", "mmWave path loss required"));
    };
    net.path_loss.validate()?;
    let beta = tier_beta(net)?;
    let k = blockage_factor(alpha_los, alpha_nlos, tau)?;
    incomplete_gamma_h(n_t, PI * lambda * wavelength * beta * k / spacing)
}

/// Dense 3D approximation Q(N_t, 2πλh²β/(α−2)).
pub fn threed_approx(lambda: f64, n_t: u64, net: &NetworkModel) -> Result<f64> {
    positive("lambda", lambda)?;
    let PathLoss::ThreeD { alpha, h } = net.path_loss else {
        return Err(bad("path_loss", "3D path loss required"));
    };
    net.path_loss.validate()?;
    let beta = tier_beta(net)?;
    incomplete_gamma_h(n_t, 2.0 * PI * lambda * h * h * beta / (alpha - 2.0))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScalingRegime {
    /// Ratio is lim N_t / λ^{1/δ}. `theta` is the scale of the Gamma(N_t, θ) gain.
    AdHoc { r: f64, alpha: f64, beta: f64, theta: f64, interferer: FadingModel },
    /// Ratio is lim N_t / λ, bounded path loss.
    Cellular { alpha: f64, beta: f64 },
    /// Ratio is lim N_t λ_t^{−1} / λ.
    MmWave { alpha_los: f64, alpha_nlos: f64, tau: f64, spacing: f64, beta: f64 },
}

/// Step function with the value 1/2 at the jump, the limit of Q(N, N) as N → ∞.
fn step(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Limiting coverage as λ → ∞ for a given antenna scaling ratio.
pub fn scaling_limit(regime: &ScalingRegime, ratio: f64) -> Result<f64> {
    if !(ratio >= 0.0) {
        return Err(bad("ratio", format!("must be non-negative, got {ratio}")));
    }
    match regime {
        ScalingRegime::AdHoc { r, alpha, beta, theta, interferer } => {
            exponent("alpha", *alpha)?;
            positive("beta", *beta)?;
            positive("theta", *theta)?;
            if !(*r >= 0.0) {
                return Err(bad("r", format!("must be non-negative, got {r}")));
            }
            if ratio == 0.0 {
                return Ok(0.0);
            }
            if ratio.is_infinite() {
                return Ok(1.0);
            }
            let d = 2.0 / alpha;
            let lam = interferer.lambda_moment(d)?;
            let t = PI * r * r * ln_gamma(1.0 - d).exp() * beta.powf(d) * theta.powf(-d) * lam;
            let h = FoxH::kernel(vec![Pair::new(1.0, d)], vec![Pair::new(0.0, 1.0)], 1, 0)?;
            foxh::eval(&h, t / ratio.powf(d), TOL)
        }
        ScalingRegime::Cellular { alpha, beta } => {
            exponent("alpha", *alpha)?;
            positive("beta", *beta)?;
            if ratio == 0.0 {
                return Ok(0.0);
            }
            let eta = (alpha - 1.0) * (alpha - 2.0);
            Ok(step(1.0 - 2.0 * PI * beta / (eta * ratio)))
        }
        ScalingRegime::MmWave { alpha_los, alpha_nlos, tau, spacing, beta } => {
            positive("spacing", *spacing)?;
            positive("beta", *beta)?;
            let k = blockage_factor(*alpha_los, *alpha_nlos, *tau)?;
            if ratio == 0.0 {
                return Ok(0.0);
            }
            Ok(step(1.0 - PI * beta * k / (spacing * ratio)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimalKind {
    MmWave { alpha_los: f64, alpha_nlos: f64, tau: f64, spacing: f64, beta: f64 },
    ThreeD { alpha: f64, beta: f64, h: f64 },
}

/// Critical antenna scaling ratio separating the 0 and 1 limits.
pub fn optimal_scaling(kind: OptimalKind) -> Result<f64> {
    match kind {
        OptimalKind::MmWave { alpha_los, alpha_nlos, tau, spacing, beta } => {
            positive("spacing", spacing)?;
            positive("beta", beta)?;
            Ok(PI * beta * blockage_factor(alpha_los, alpha_nlos, tau)? / spacing)
        }
        OptimalKind::ThreeD { alpha, beta, h } => {
            exponent("alpha", alpha)?;
            positive("beta", beta)?;
            if !(h >= 0.0 && h.is_finite()) {
                return Err(bad("h", format!("must be non-negative, got {h}")));
            }
            Ok(2.0 * PI * beta * h * h / (alpha - 2.0))
        }
    }
}
