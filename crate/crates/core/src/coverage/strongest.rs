use std::f64::consts::PI;

use super::{check_delta, CoverageEstimate, Diagnostics, NetworkModel};
use crate::error::Result;

/// Max-SIR association. Noise is ignored.
pub fn coverage_strongest(net: &NetworkModel) -> Result<CoverageEstimate> {
    strongest(net, false)
}

/// Same as [`coverage_strongest`] with every Λ taken from the Mellin-moment route.
pub fn coverage_strongest_generic(net: &NetworkModel) -> Result<CoverageEstimate> {
    strongest(net, true)
}

fn strongest(net: &NetworkModel, generic: bool) -> Result<CoverageEstimate> {
    net.validate()?;
    net.expect("StrongestBs association", matches!(net.association, super::Association::StrongestBs))?;
    let d = net.delta();
    check_delta(d)?;
    let lam_i = net.interferer_moments(generic)?;
    let mut raw = 0.0;
    for tk in &net.tiers {
        let lam_k = tk.serving_lambda(d, generic)?;
        let denom: f64 = net
            .tiers
            .iter()
            .zip(&lam_i)
            .map(|(tj, lj)| tj.density * (tj.power / tk.power).powf(d) * lj)
            .sum();
        raw += tk.density * tk.threshold.powf(-d) * lam_k / denom;
    }
    raw *= (PI * d).sin() / (PI * d);
    let residual = 1e-14 * raw.abs().max(1e-300);
    Ok(CoverageEstimate::new(raw, residual, Diagnostics::default()))
}
