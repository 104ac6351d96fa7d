//! Analytic coverage engines and densification scaling laws.

mod adhoc;
mod closest;
mod interference;
mod scaling;
mod strongest;

pub use adhoc::{adhoc_asymptote, coverage_adhoc};
pub use closest::{coverage_closest, dense_limit};
pub use scaling::{
    blockage_factor, miso_bounded_approx, mmwave_approx, optimal_scaling, scaling_limit, threed_approx, OptimalKind,
    ScalingRegime,
};
pub use strongest::{coverage_strongest, coverage_strongest_generic};

use num_complex::Complex64;

use crate::error::{bad, Error, Result};
use crate::fading::FadingModel;
use crate::special::{ln_gamma, ln_gamma_c};

/// Post-processing gain of a multi-antenna serving link.
#[derive(Debug, Clone, PartialEq)]
pub enum MisoGain {
    None,
    /// Gamma(shape, scale) power gain, e.g. Gamma(N_t, 1) for MRT.
    Gamma { shape: f64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tier {
    pub density: f64,
    pub power: f64,
    pub threshold: f64,
    pub fading: FadingModel,
    pub interferer_fading: FadingModel,
    pub antennas: u32,
    pub miso_gain: MisoGain,
}

impl Tier {
    /// Single-antenna tier whose interferers share the serving fading model.
    pub fn new(density: f64, power: f64, threshold: f64, fading: FadingModel) -> Self {
        Tier {
            density,
            power,
            threshold,
            interferer_fading: fading.clone(),
            fading,
            antennas: 1,
            miso_gain: MisoGain::None,
        }
    }

    pub fn with_interferer_fading(mut self, f: FadingModel) -> Self {
        self.interferer_fading = f;
        self
    }

    /// MRT with `n` antennas: Gamma(n, 1) serving gain.
    pub fn with_mrt(mut self, n: u32) -> Self {
        self.antennas = n;
        self.miso_gain = MisoGain::Gamma { shape: n as f64, scale: 1.0 };
        self
    }

    pub fn with_miso_gain(mut self, gain: MisoGain) -> Self {
        self.miso_gain = gain;
        self
    }

    /// The serving-link gain distribution actually used.
    pub fn serving_fading(&self) -> Result<FadingModel> {
        match self.miso_gain {
            MisoGain::None => Ok(self.fading.clone()),
            MisoGain::Gamma { shape, scale } => FadingModel::gamma_scaled(shape, scale),
        }
    }

    /// E[g^s] of the serving gain. Gamma gains stay in log space, so any
    /// antenna count is representable.
    pub fn serving_moment_c(&self, s: Complex64) -> Complex64 {
        match self.miso_gain {
            MisoGain::None => self.fading.moment_c(s),
            MisoGain::Gamma { shape, scale } => {
                (s * scale.ln() + ln_gamma_c(s + shape) - ln_gamma(shape)).exp()
            }
        }
    }

    /// E[g^δ] of the serving gain; `generic` forces the Mellin-moment route.
    pub fn serving_lambda(&self, delta: f64, generic: bool) -> Result<f64> {
        match self.miso_gain {
            MisoGain::None if generic => self.fading.lambda_moment_generic(delta),
            MisoGain::None => self.fading.lambda_moment(delta),
            MisoGain::Gamma { shape, scale } => Ok((delta * scale.ln() + ln_gamma(shape + delta) - ln_gamma(shape)).exp()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathLoss {
    /// r^{−α}
    Unbounded { alpha: f64 },
    /// (1+r)^{−α}
    Bounded { alpha: f64 },
    /// (h² + r²)^{−α/2}
    ThreeD { alpha: f64, h: f64 },
    /// LOS with probability e^{−τr}, cosine array pattern.
    MmWave { alpha_los: f64, alpha_nlos: f64, tau: f64, spacing: f64, wavelength: f64, carrier: f64 },
}

impl PathLoss {
    /// δ = 2/α (the LOS exponent for mmWave).
    pub fn delta(&self) -> f64 {
        2.0 / self.alpha()
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            PathLoss::Unbounded { alpha } | PathLoss::Bounded { alpha } | PathLoss::ThreeD { alpha, .. } => alpha,
            PathLoss::MmWave { alpha_los, .. } => alpha_los,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let exponent = |name: &str, a: f64| {
            if a > 2.0 && a.is_finite() {
                Ok(())
            } else {
                Err(bad(name, format!("path-loss exponent must exceed 2, got {a}")))
            }
        };
        match *self {
            PathLoss::Unbounded { alpha } | PathLoss::Bounded { alpha } => exponent("alpha", alpha),
            PathLoss::ThreeD { alpha, h } => {
                exponent("alpha", alpha)?;
                if !(h >= 0.0 && h.is_finite()) {
                    return Err(bad("h", format!("must be non-negative, got {h}")));
                }
                Ok(())
            }
            PathLoss::MmWave { alpha_los, alpha_nlos, tau, spacing, wavelength, carrier } => {
                exponent("alpha_los", alpha_los)?;
                exponent("alpha_nlos", alpha_nlos)?;
                if !(tau >= 0.0 && tau.is_finite()) {
                    return Err(bad("tau", format!("must be non-negative, got {tau}")));
                }
                for (name, x) in [("spacing", spacing), ("wavelength", wavelength), ("carrier", carrier)] {
                    if !(x > 0.0 && x.is_finite()) {
                        return Err(bad(name, format!("must be positive, got {x}")));
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Association {
    ClosestBs,
    StrongestBs,
    /// Dedicated transmitter at distance r (Poisson dipole).
    FixedDistance(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    pub tiers: Vec<Tier>,
    pub path_loss: PathLoss,
    pub noise: f64,
    pub association: Association,
}

impl NetworkModel {
    pub fn single(tier: Tier, path_loss: PathLoss, noise: f64, association: Association) -> Self {
        NetworkModel { tiers: vec![tier], path_loss, noise, association }
    }

    pub fn delta(&self) -> f64 {
        self.path_loss.delta()
    }

    pub fn validate(&self) -> Result<()> {
        if self.tiers.is_empty() {
            return Err(bad("tiers", "at least one tier is required"));
        }
        self.path_loss.validate()?;
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(bad("noise", format!("must be non-negative, got {}", self.noise)));
        }
        if let Association::FixedDistance(r) = self.association {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(bad("r", format!("must be non-negative, got {r}")));
            }
        }
        for t in &self.tiers {
            for (name, x) in [("density", t.density), ("power", t.power), ("threshold", t.threshold)] {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(bad(name, format!("must be positive, got {x}")));
                }
            }
            if t.antennas == 0 {
                return Err(bad("antennas", "must be at least 1"));
            }
            if let MisoGain::Gamma { shape, scale } = t.miso_gain {
                if !(shape > 0.0 && scale > 0.0) {
                    return Err(bad("miso_gain", "shape and scale must be positive"));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn expect(&self, want: &str, ok: bool) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidAssociation(format!("{want} required, got {:?}", self.association)))
        }
    }

    /// Λ_j of every tier's interferers.
    pub(crate) fn interferer_moments(&self, generic: bool) -> Result<Vec<f64>> {
        let d = self.delta();
        self.tiers
            .iter()
            .map(|t| if generic { t.interferer_fading.lambda_moment_generic(d) } else { t.interferer_fading.lambda_moment(d) })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Unclamped engine output.
    pub raw: f64,
    pub nodes: usize,
    pub truncated: bool,
    /// Quadrature nodes where the bounded-model interference exponent lost its positive real part.
    pub positivity_violations: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageEstimate {
    pub value: f64,
    pub residual: f64,
    pub diagnostics: Diagnostics,
}

impl CoverageEstimate {
    pub(crate) fn new(raw: f64, residual: f64, mut diagnostics: Diagnostics) -> Self {
        diagnostics.raw = raw;
        CoverageEstimate { value: raw.clamp(0.0, 1.0), residual, diagnostics }
    }
}

pub(crate) fn check_delta(d: f64) -> Result<()> {
    if d > 0.0 && d < 1.0 {
        Ok(())
    } else {
        Err(Error::DeltaOutOfRange(d))
    }
}
