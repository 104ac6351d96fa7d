//! Tables of Φ_ε(b) = E[φ_ε(b g)], φ_ε(y) = y^ε γ(1−ε, y) − 1 + e^{−y},
//! on a ray b = e^{v + iφ}. These are the per-tier interference exponents
//! of the Laplace functional.
//!
//! φ_ε has Mellin transform εΓ(s)/(s+ε) on −1 < Re s < −ε, so
//! Φ_ε(b) = (1/2πi)∫ εΓ(s)/(s+ε) E[g^{−s}] b^{−s} ds along Re s = −(1+ε)/2.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{bad, Result};
use crate::fading::FadingModel;
use crate::special::{ln_gamma, ln_gamma_c};

pub(crate) const TABLE_HALF_WIDTH: f64 = 25.0;

pub(crate) struct PhiTable {
    eps: f64,
    angle: f64,
    v0: f64,
    hv: f64,
    vals: Vec<Complex64>,
    /// ε/(1−ε) E[g]
    small: f64,
    /// Γ(1−ε) E[g^ε]
    large: f64,
}

impl PhiTable {
    /// `hv` must divide the table half width so grids line up with it.
    pub(crate) fn new(model: &FadingModel, eps: f64, angle: f64, hv: f64) -> Result<Self> {
        if !model.moment_exists(1.0) {
            return Err(bad("interferer_fading", "interferer gain needs a finite mean"));
        }
        let c = -(1.0 + eps) / 2.0;
        let dist = (1.0 - eps) / 2.0;
        let ht = (dist / 8.0).min(0.05);
        let kernel = |t: f64| {
            let s = Complex64::new(c, t);
            let lg = ln_gamma_c(s) - (s + eps).ln() + eps.ln();
            lg.exp() * model.moment_c(-s)
        };
        // decay of |K(t)| e^{φ t} in each direction
        let reach = |dir: f64| {
            let peak = kernel(0.0).norm();
            let mut t = 0.0;
            let mut quiet = 0;
            while t < 400.0 {
                t += 1.0;
                let m = kernel(dir * t).norm() * (angle * dir * t).exp();
                if !(m > 1e-18 * peak) {
                    quiet += 1;
                    if quiet >= 3 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
            }
            t
        };
        let (t_lo, t_hi) = (reach(-1.0), reach(1.0));
        let n_lo = (t_lo / ht).ceil() as i64;
        let n_hi = (t_hi / ht).ceil() as i64;
        let n_v = (2.0 * TABLE_HALF_WIDTH / hv).round() as usize + 1;
        let v0 = -TABLE_HALF_WIDTH;
        let mut vals = vec![Complex64::new(0.0, 0.0); n_v];
        let scale = ht / (2.0 * PI);
        for n in -n_lo..=n_hi {
            let t = n as f64 * ht;
            let s = Complex64::new(c, t);
            let k = kernel(t) * scale;
            if !(k.norm() > 0.0) || !k.norm().is_finite() {
                continue;
            }
            // b^{−s} = e^{−s(v + iφ)}, stepped along v
            let mut cur = k * (-s * Complex64::new(v0, angle)).exp();
            let step = (-s * hv).exp();
            for slot in vals.iter_mut() {
                *slot += cur;
                cur *= step;
            }
        }
        let small = eps / (1.0 - eps) * model.mean;
        let large = (ln_gamma(1.0 - eps)).exp() * model.moment_generic(eps)?;
        Ok(PhiTable { eps, angle, v0, hv, vals, small, large })
    }

    fn asymptote(&self, v: f64) -> Complex64 {
        let lnb = Complex64::new(v, self.angle);
        if v < 0.0 {
            lnb.exp() * self.small
        } else {
            (lnb * self.eps).exp() * self.large - 1.0
        }
    }

    /// Φ_ε(e^{v + iφ}); six-point Lagrange inside the table.
    pub(crate) fn at(&self, v: f64) -> Complex64 {
        let n = self.vals.len();
        let x = (v - self.v0) / self.hv;
        if x < 0.0 || x > (n - 1) as f64 {
            return self.asymptote(v);
        }
        let k = x.round();
        if (x - k).abs() < 1e-9 {
            return self.vals[k as usize];
        }
        let i0 = (x.floor() as i64 - 2).clamp(0, n as i64 - 6) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in i0..i0 + 6 {
            let mut w = 1.0;
            for j in i0..i0 + 6 {
                if j != i {
                    w *= (x - j as f64) / (i as f64 - j as f64);
                }
            }
            acc += self.vals[i] * w;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_kronrod;

    // direct E_g[φ_ε(b g)] for Rayleigh g on a real b via nested quadrature
    fn direct(eps: f64, b: f64) -> f64 {
        let phi = |y: f64| {
            let inner = gauss_kronrod(|t: f64| (-t).exp() * t.powf(-eps), 0.0, y, 1e-15, 1e-13, 200).value;
            y.powf(eps) * inner - 1.0 + (-y).exp()
        };
        crate::quad::gauss_kronrod_inf(|g: f64| (-g).exp() * phi(b * g), 0.0, 1e-14, 1e-11, 400).value
    }

    #[test]
    fn table_matches_direct_quadrature() {
        let model = FadingModel::rayleigh();
        for eps in [0.25, 0.5, 2.0 / 3.0] {
            let t = PhiTable::new(&model, eps, 0.0, 0.05).unwrap();
            for v in [-3.0, -0.4, 0.0, 1.3, 4.0] {
                let want = direct(eps, f64::exp(v));
                let got = t.at(v);
                assert!((got.re - want).abs() < 1e-9 * want.abs().max(1e-3), "eps={eps} v={v}: {got} vs {want}");
                assert!(got.im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn asymptotes_join_the_table() {
        let model = FadingModel::gamma(1.7).unwrap();
        let t = PhiTable::new(&model, 0.5, 1.0, 0.05).unwrap();
        for v in [-TABLE_HALF_WIDTH + 0.05, TABLE_HALF_WIDTH - 0.05] {
            let a = t.asymptote(v);
            let b = t.at(v);
            assert!((a - b).norm() < 1e-8 * b.norm(), "v={v}: {a} vs {b}");
        }
    }
}
