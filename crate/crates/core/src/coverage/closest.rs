//! Max-average-power association, unbounded and bounded path loss.
//!
//! For serving tier k write Y = L(r)^{−1}(Ĩ + σ²/P_k), with Ĩ the interference
//! normalized by P_k. Then
//!
//!   C_k = (1/2πi) ∫ E[g^s] β^{−s} M_G(s) / Γ(1+s) ds,   0 < Re s < δ,
//!
//! where G(w) = E[e^{−wY}; tier k serves] and M_G is its Mellin transform.
//! G is sampled on the ray w = e^{v + iφ}, which turns M_G into a rapidly
//! converging trapezoid sum in v; the conjugate half of the s-line follows
//! from symmetry.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::interference::{PhiTable, TABLE_HALF_WIDTH};
use super::{check_delta, Association, CoverageEstimate, Diagnostics, NetworkModel, PathLoss};
use crate::error::{bad, Error, Result};
use crate::quad::gauss_kronrod_inf;
use crate::special::ln_gamma_c;

const ANGLE: f64 = 1.0;
const HV: f64 = 0.05;
const V_LO: f64 = -40.0;
const V_HI_UNBOUNDED: f64 = 40.0;
const V_HI_BOUNDED: f64 = 60.0;
const T_CAP: f64 = 200.0;

pub fn coverage_closest(net: &NetworkModel) -> Result<CoverageEstimate> {
    net.validate()?;
    net.expect("ClosestBs association", net.association == Association::ClosestBs)?;
    let bounded = match net.path_loss {
        PathLoss::Unbounded { .. } => false,
        PathLoss::Bounded { .. } => true,
        other => {
            return Err(bad("path_loss", format!("closest-BS engine takes unbounded or bounded path loss, got {other:?}")))
        }
    };
    let delta = net.delta();
    check_delta(delta)?;
    let engine = Engine::new(net, bounded)?;
    let mut diag = Diagnostics::default();
    let (mut raw, mut coarse, mut assoc) = (0.0, 0.0, 0.0);
    for k in 0..net.tiers.len() {
        let t = engine.tier(k)?;
        raw += t.fine;
        coarse += t.coarse;
        assoc += t.assoc;
        diag.nodes += t.nodes;
        diag.truncated |= t.truncated;
        diag.positivity_violations += t.violations;
        if t.conditioning > 1e-8 {
            diag.notes.push(format!("tier {k}: cancellation in the s-integral, ~{:.1e}", t.conditioning));
        }
    }
    if diag.positivity_violations > 0 {
        diag.notes.push(format!("{} interference exponents with negative real part", diag.positivity_violations));
    }
    if (assoc - 1.0).abs() > 1e-6 {
        diag.notes.push(format!("association probabilities sum to {assoc}"));
    }
    let mut residual = (raw - coarse).abs() + 1e-10;
    if diag.truncated {
        residual += 1e-6;
    }
    residual += engine_conditioning(&diag);
    Ok(CoverageEstimate::new(raw, residual, diag))
}

fn engine_conditioning(d: &Diagnostics) -> f64 {
    if d.notes.iter().any(|n| n.contains("cancellation")) {
        1e-6
    } else {
        0.0
    }
}

/// Limiting coverage of dense deployments.
///
/// Unbounded path loss: the noise-free closest-BS value, which depends on
/// densities only through their ratios. Bounded path loss: the noise-free
/// value with every tier at `lambda_common`.
pub fn dense_limit(net: &NetworkModel, lambda_common: Option<f64>) -> Result<f64> {
    let mut dense = net.clone();
    dense.noise = 0.0;
    dense.association = Association::ClosestBs;
    match net.path_loss {
        PathLoss::Unbounded { .. } => {}
        PathLoss::Bounded { .. } => {
            let lam = lambda_common.ok_or_else(|| bad("lambda_common", "bounded path loss needs a density"))?;
            if !(lam > 0.0 && lam.is_finite()) {
                return Err(bad("lambda_common", format!("must be positive, got {lam}")));
            }
            for t in &mut dense.tiers {
                t.density = lam;
            }
        }
        other => return Err(bad("path_loss", format!("no dense limit for {other:?}"))),
    }
    Ok(coverage_closest(&dense)?.value)
}

struct TierOutcome {
    fine: f64,
    coarse: f64,
    assoc: f64,
    nodes: usize,
    truncated: bool,
    violations: usize,
    conditioning: f64,
}

struct Engine<'a> {
    net: &'a NetworkModel,
    bounded: bool,
    delta: f64,
    alpha: f64,
    full: Vec<PhiTable>,
    half: Vec<PhiTable>,
}

impl<'a> Engine<'a> {
    fn new(net: &'a NetworkModel, bounded: bool) -> Result<Self> {
        let delta = net.delta();
        let mut full = Vec::new();
        let mut half = Vec::new();
        for t in &net.tiers {
            full.push(PhiTable::new(&t.interferer_fading, delta, ANGLE, HV)?);
            if bounded {
                half.push(PhiTable::new(&t.interferer_fading, delta / 2.0, ANGLE, HV)?);
            }
        }
        debug_assert!((TABLE_HALF_WIDTH / HV).fract().abs() < 1e-9);
        Ok(Engine { net, bounded, delta, alpha: 2.0 / delta, full, half })
    }

    fn tier(&self, k: usize) -> Result<TierOutcome> {
        let tk = &self.net.tiers[k];
        let ptil: Vec<f64> = self.net.tiers.iter().map(|t| t.power / tk.power).collect();
        let sig2 = self.net.noise / tk.power;
        let c = self.delta / 2.0;
        let v_hi = if self.bounded { V_HI_BOUNDED } else { V_HI_UNBOUNDED };
        let n = ((v_hi - V_LO) / HV / 2.0).round() as usize * 2;
        let mut violations = 0;
        let (g0, g) = if self.bounded {
            let g0 = self.bounded_g(k, &ptil, sig2, None, c, &mut violations)?;
            let mut g = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let v = V_LO + i as f64 * HV;
                g.push(self.bounded_g(k, &ptil, sig2, Some(v), c, &mut violations)?);
            }
            (g0, g)
        } else {
            let weights: Vec<f64> =
                self.net.tiers.iter().zip(&ptil).map(|(t, p)| t.density * p.powf(self.delta)).collect();
            let s_tot: f64 = weights.iter().sum();
            let g0 = Complex64::new(tk.density / s_tot, 0.0);
            let g = (0..=n)
                .map(|i| {
                    let v = V_LO + i as f64 * HV;
                    let q: Complex64 = weights.iter().zip(&self.full).map(|(w, t)| t.at(v) * *w).sum();
                    self.unbounded_g(tk.density, s_tot + q, sig2, v)
                })
                .collect::<Result<Vec<_>>>()?;
            (g0, g)
        };

        let ht = PI * self.delta / 30.0;
        let beta_ln = tk.threshold.ln();
        let (mut sum_f, mut sum_c) = (0.0, 0.0);
        let mut peak: f64 = 0.0;
        let mut quiet = 0;
        let mut truncated = false;
        let mut j = 0usize;
        loop {
            let t = j as f64 * ht;
            let s = Complex64::new(c, t);
            let pref = tk.serving_moment_c(s) * (-ln_gamma_c(s + 1.0) - s * beta_ln).exp();
            let f = pref * mellin(&g, g0, s, 1, self.delta);
            let w = if j == 0 { 0.5 } else { 1.0 };
            sum_f += w * f.re;
            if j.is_multiple_of(2) {
                sum_c += w * (pref * mellin(&g, g0, s, 2, self.delta)).re;
            }
            let mag = f.norm();
            if !mag.is_finite() {
                return Err(Error::QuadratureFailure { stage: "closest s-integral".into(), residual: f64::INFINITY });
            }
            peak = peak.max(mag);
            if mag < 1e-15 * peak {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet >= 40 && t > 4.0 {
                break;
            }
            if t > T_CAP {
                truncated = true;
                break;
            }
            j += 1;
        }
        Ok(TierOutcome {
            fine: ht * sum_f / PI,
            coarse: 2.0 * ht * sum_c / PI,
            assoc: g0.re,
            nodes: j + g.len(),
            truncated,
            violations,
            conditioning: peak * 1e-16 * j as f64,
        })
    }

    /// G at w = e^{v+iφ} for unbounded path loss; `z` = S + Q(w).
    fn unbounded_g(&self, density: f64, z: Complex64, sig2: f64, v: f64) -> Result<Complex64> {
        if sig2 == 0.0 {
            return Ok(density / z);
        }
        let w = Complex64::from_polar(v.exp(), ANGLE);
        let zn = z.norm();
        let inv_d = 1.0 / self.delta;
        // u = x/|Z|
        let f = |x: f64| {
            let u = x / zn;
            (-(z * u) - w * (sig2 * (u / PI).powf(inv_d))).exp() * (density / zn)
        };
        let eps = 1e-12 * density / zn * (-self.delta / 2.0 * v).exp().min(1.0);
        let r = gauss_kronrod_inf(f, 0.0, eps, 1e-10, 400);
        Ok(r.value)
    }

    /// G at w = e^{v+iφ} (or w = 0 for `None`) for bounded path loss.
    fn bounded_g(
        &self,
        k: usize,
        ptil: &[f64],
        sig2: f64,
        v: Option<f64>,
        c: f64,
        violations: &mut usize,
    ) -> Result<Complex64> {
        let tiers = &self.net.tiers;
        let alpha = self.alpha;
        let half_d = self.delta / 2.0;
        let lam_k = tiers[k].density;
        let ell = 1.0 / (PI * tiers.iter().map(|t| t.density).sum::<f64>()).sqrt();
        let w = v.map(|v| Complex64::from_polar(v.exp(), ANGLE));
        let mut bad_nodes = 0usize;
        let f = |x: f64| {
            let r = ell * x;
            let lr = (1.0 + r).ln();
            let mut void = 0.0;
            let mut expo = Complex64::new(0.0, 0.0);
            for (j, tj) in tiers.iter().enumerate() {
                let y0 = (half_d * ptil[j].ln() + lr).exp().max(1.0);
                void += tj.density * (y0 - 1.0) * (y0 - 1.0);
                if let Some(v) = v {
                    let lb = v + alpha * lr + ptil[j].ln() - alpha * y0.ln();
                    let term = self.full[j].at(lb) * (0.5 * y0 * y0) - self.half[j].at(lb) * y0;
                    if term.re < -1e-12 * term.norm() {
                        bad_nodes += 1;
                    }
                    expo += term * tj.density;
                }
            }
            let mut lnv = Complex64::new(-PI * void + (2.0 * PI * lam_k * r * ell).ln(), 0.0) - expo * (2.0 * PI);
            if let Some(w) = w {
                lnv -= w * (sig2 * (alpha * lr).exp());
            }
            lnv.exp()
        };
        let eps = match v {
            Some(v) => 1e-12 * (-c * v).exp().min(1.0) * lam_k / tiers.iter().map(|t| t.density).sum::<f64>(),
            None => 1e-14,
        };
        let r = gauss_kronrod_inf(f, 0.0, eps, 1e-10, 400);
        *violations += bad_nodes;
        Ok(r.value)
    }
}

/// M_G(s) from the ray samples, using every `stride`-th node.
fn mellin(g: &[Complex64], g0: Complex64, s: Complex64, stride: usize, delta: f64) -> Complex64 {
    let n = g.len() - 1;
    let h = HV * stride as f64;
    let v_end = V_LO + n as f64 * HV;
    let mut e = (s * V_LO).exp();
    let step = (s * h).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut i = 0;
    while i <= n {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += e * g[i] * w;
        e *= step;
        i += stride;
    }
    acc *= h;
    // G ≈ G(0) to the left, G ∝ w^{−δ} to the right
    acc += g0 * (s * V_LO).exp() / s;
    acc += g[n] * (s * v_end).exp() / (delta - s);
    acc * (Complex64::i() * s * ANGLE).exp()
}
