//! Poisson dipole (fixed link distance) coverage.

use std::f64::consts::PI;

use super::{check_delta, Association, CoverageEstimate, Diagnostics, MisoGain, NetworkModel, PathLoss};
use crate::error::{bad, Error, Result};
use crate::fading::Component;
use crate::foxh::{self, FoxH, Pair};
use crate::special::ln_gamma;

const TOL: f64 = 1e-12;

/// One term of the coverage sum: e^{ln_pref}·H(arg).
struct Term {
    ln_pref: f64,
    h: FoxH,
    arg: f64,
}

fn setup(net: &NetworkModel) -> Result<(f64, f64)> {
    net.validate()?;
    let r = match net.association {
        Association::FixedDistance(r) => r,
        _ => return Err(Error::InvalidAssociation(format!("FixedDistance required, got {:?}", net.association))),
    };
    if !matches!(net.path_loss, PathLoss::Unbounded { .. }) {
        return Err(bad("path_loss", "ad hoc engine takes unbounded path loss"));
    }
    let d = net.delta();
    check_delta(d)?;
    Ok((r, d))
}

/// Σ_j π r² λ_j Γ(1−δ) Λ_j P̃_j^δ β_k^δ, with `density` overriding every λ_j.
fn interference_arg(net: &NetworkModel, k: usize, r: f64, d: f64, density: Option<f64>) -> Result<f64> {
    let lam = net.interferer_moments(false)?;
    let tk = &net.tiers[k];
    let g = ln_gamma(1.0 - d).exp();
    Ok(net
        .tiers
        .iter()
        .zip(&lam)
        .map(|(tj, lj)| {
            let l = density.unwrap_or(tj.density);
            PI * r * r * l * g * lj * (tj.power / tk.power).powf(d) * tk.threshold.powf(d)
        })
        .sum())
}

/// Mellin–Barnes kernel of P(g > x^{1/δ}·X-scaled interference) per mixture term.
fn terms(net: &NetworkModel, k: usize, x: f64, d: f64) -> Result<Vec<Term>> {
    if let MisoGain::Gamma { shape, scale } = net.tiers[k].miso_gain {
        // (1/Γ(M)) H^{2,0}_{1,2}[X θ^{−δ} | (1,δ); (0,1), (M,δ)]
        let kernel = FoxH::kernel(vec![Pair::new(1.0, d)], vec![Pair::new(0.0, 1.0), Pair::new(shape, d)], 2, 0)?;
        return Ok(vec![Term { ln_pref: -ln_gamma(shape), h: kernel, arg: x * scale.powf(-d) }]);
    }
    let serving = &net.tiers[k].fading;
    let mut out = Vec::new();
    for comp in &serving.components {
        match comp {
            Component::Kernel { weight, h } => {
                let map = |p: &Pair| Pair::new(p.shift + p.scale, d * p.scale);
                let mut upper: Vec<Pair> = h.upper[..h.v].iter().map(map).collect();
                upper.push(Pair::new(1.0, d));
                upper.extend(h.upper[h.v..].iter().map(map));
                let mut lower = vec![Pair::new(0.0, 1.0)];
                lower.extend(h.lower.iter().map(map));
                let kernel = FoxH::kernel(upper, lower, h.u + 1, h.v)?;
                out.push(Term { ln_pref: (weight * h.kappa / h.c).ln(), h: kernel, arg: x * h.c.powf(d) });
            }
            Component::Atom { weight, location } => {
                let kernel = FoxH::kernel(vec![Pair::new(1.0, d)], vec![Pair::new(0.0, 1.0)], 1, 0)?;
                out.push(Term { ln_pref: weight.ln(), h: kernel, arg: x * location.powf(-d) });
            }
        }
    }
    Ok(out)
}

pub fn coverage_adhoc(net: &NetworkModel) -> Result<CoverageEstimate> {
    let (r, d) = setup(net)?;
    let total: f64 = net.tiers.iter().map(|t| t.density).sum();
    let mut diag = Diagnostics::default();
    let (mut raw, mut residual) = (0.0, 0.0);
    for (k, tk) in net.tiers.iter().enumerate() {
        let x = interference_arg(net, k, r, d, None)?;
        let share = tk.density / total;
        for term in terms(net, k, x, d)? {
            let ev = foxh::eval_scaled(&term.h, term.arg, term.ln_pref, TOL)
                .or_else(|_| foxh::eval_scaled(&term.h, term.arg, term.ln_pref, 1e-9))?;
            raw += share * ev.value;
            residual += share * ev.residual;
            diag.nodes += ev.nodes;
        }
    }
    Ok(CoverageEstimate::new(raw, residual + 1e-14, diag))
}

/// Leading large-density behaviour with every tier at density `lambda`.
pub fn adhoc_asymptote(net: &NetworkModel, lambda: f64) -> Result<f64> {
    let (r, d) = setup(net)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(bad("lambda", format!("must be positive, got {lambda}")));
    }
    let share = 1.0 / net.tiers.len() as f64;
    let mut acc = 0.0;
    for k in 0..net.tiers.len() {
        let x = interference_arg(net, k, r, d, Some(lambda))?;
        for term in terms(net, k, x, d)? {
            let h = term.h.reduce();
            let info = foxh::convergence_params(&h, None)?;
            if !(h.v == 0 && h.u == h.q() && info.delta_star > 0.0) {
                return Err(Error::NotApplicable);
            }
            let (a, power) = foxh::exponential_class(&h, &info);
            let dd = info.delta_star;
            let z = term.arg;
            let ln_v = term.ln_pref + a.ln() + power * z.ln() - dd * (z / info.radius).powf(1.0 / dd);
            acc += share * ln_v.exp();
        }
    }
    Ok(acc)
}
