//! Fox's H-function: parameters, Mellin–Barnes evaluation, Mellin moments
//! and leading-order asymptotics.
//!
//! With kernel
//!
//! θ(s) = ∏_{j<u} Γ(b_j + B_j s) ∏_{i<v} Γ(1 − a_i − A_i s)
//!        / (∏_{j≥u} Γ(1 − b_j − B_j s) ∏_{i≥v} Γ(a_i + A_i s))
//!
//! the function is H(z) = (1/2πi) ∫_L θ(s) z^{−s} ds, and a density built
//! from it reads f(x) = κ H(c x).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{bad, Error, Result};
use crate::special::ln_gamma_c;

/// One gamma-argument pair: (a, A) on the upper row or (b, B) on the lower row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub shift: f64,
    pub scale: f64,
}

impl Pair {
    pub const fn new(shift: f64, scale: f64) -> Self {
        Pair { shift, scale }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoxH {
    pub kappa: f64,
    pub c: f64,
    /// Upper row; the first `v` pairs sit in the numerator.
    pub upper: Vec<Pair>,
    /// Lower row; the first `u` pairs sit in the numerator.
    pub lower: Vec<Pair>,
    pub u: usize,
    pub v: usize,
}

impl FoxH {
    pub fn new(kappa: f64, c: f64, upper: Vec<Pair>, lower: Vec<Pair>, u: usize, v: usize) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(bad("kappa", format!("must be positive, got {kappa}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(bad("c", format!("must be positive, got {c}")));
        }
        if u > lower.len() {
            return Err(bad("u", format!("{u} exceeds q = {}", lower.len())));
        }
        if v > upper.len() {
            return Err(bad("v", format!("{v} exceeds p = {}", upper.len())));
        }
        for p in upper.iter() {
            if !(p.scale > 0.0 && p.scale.is_finite() && p.shift.is_finite()) {
                return Err(bad("A", format!("upper pair ({}, {}) needs finite a and A > 0", p.shift, p.scale)));
            }
        }
        for p in lower.iter() {
            if !(p.scale > 0.0 && p.scale.is_finite() && p.shift.is_finite()) {
                return Err(bad("B", format!("lower pair ({}, {}) needs finite b and B > 0", p.shift, p.scale)));
            }
        }
        Ok(FoxH { kappa, c, upper, lower, u, v })
    }

    /// Bare kernel with κ = c = 1.
    pub fn kernel(upper: Vec<Pair>, lower: Vec<Pair>, u: usize, v: usize) -> Result<Self> {
        Self::new(1.0, 1.0, upper, lower, u, v)
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    /// ln θ(s).
    pub fn log_kernel(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, p) in self.lower.iter().enumerate() {
            if j < self.u {
                acc += ln_gamma_c(p.shift + p.scale * s);
            } else {
                acc -= ln_gamma_c(1.0 - p.shift - p.scale * s);
            }
        }
        for (i, p) in self.upper.iter().enumerate() {
            if i < self.v {
                acc += ln_gamma_c(1.0 - p.shift - p.scale * s);
            } else {
                acc -= ln_gamma_c(p.shift + p.scale * s);
            }
        }
        acc
    }

    /// Cancel identical gamma factors between numerator and denominator.
    pub fn reduce(&self) -> FoxH {
        let same = |x: &Pair, y: &Pair| x.shift == y.shift && x.scale == y.scale;
        let mut num_up: Vec<Pair> = self.upper[..self.v].to_vec();
        let mut den_up: Vec<Pair> = self.upper[self.v..].to_vec();
        let mut num_lo: Vec<Pair> = self.lower[..self.u].to_vec();
        let mut den_lo: Vec<Pair> = self.lower[self.u..].to_vec();
        // Γ(1 − a − As) / Γ(1 − b − Bs) with (a, A) = (b, B)
        num_up.retain(|p| match den_lo.iter().position(|d| same(p, d)) {
            Some(k) => {
                den_lo.remove(k);
                false
            }
            None => true,
        });
        // Γ(b + Bs) / Γ(a + As) with (a, A) = (b, B)
        num_lo.retain(|p| match den_up.iter().position(|d| same(p, d)) {
            Some(k) => {
                den_up.remove(k);
                false
            }
            None => true,
        });
        let (u, v) = (num_lo.len(), num_up.len());
        num_up.extend(den_up);
        num_lo.extend(den_lo);
        FoxH { kappa: self.kappa, c: self.c, upper: num_up, lower: num_lo, u, v }
    }

    /// Multiply every A and B by k.
    pub fn rescaled(&self, k: f64) -> FoxH {
        let sc = |v: &Vec<Pair>| v.iter().map(|p| Pair::new(p.shift, p.scale * k)).collect();
        FoxH { kappa: self.kappa, c: self.c, upper: sc(&self.upper), lower: sc(&self.lower), u: self.u, v: self.v }
    }

    fn left_edge(&self) -> f64 {
        self.lower[..self.u].iter().map(|p| -p.shift / p.scale).fold(f64::NEG_INFINITY, f64::max)
    }

    fn right_edge(&self) -> f64 {
        self.upper[..self.v].iter().map(|p| (1.0 - p.shift) / p.scale).fold(f64::INFINITY, f64::min)
    }
}

/// Constants from the δ-dependent asymptotic law, kept in the printed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticTriplet {
    pub delta: f64,
    pub rho: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceInfo {
    /// ΣB − ΣA.
    pub delta_star: f64,
    pub a_star: f64,
    /// Σb − Σa + (p − q)/2.
    pub mu: f64,
    /// ∏A^{−A} ∏B^{B}.
    pub radius: f64,
    pub left_edge: f64,
    pub right_edge: f64,
    pub contour_abscissa: f64,
    pub triplet: Option<AsymptoticTriplet>,
}

pub fn convergence_params(h: &FoxH, delta: Option<f64>) -> Result<ConvergenceInfo> {
    let (u, v) = (h.u, h.v);
    let sum_b: f64 = h.lower.iter().map(|p| p.scale).sum();
    let sum_a: f64 = h.upper.iter().map(|p| p.scale).sum();
    let a_star = h.lower[..u].iter().map(|p| p.scale).sum::<f64>() - h.lower[u..].iter().map(|p| p.scale).sum::<f64>()
        + h.upper[..v].iter().map(|p| p.scale).sum::<f64>()
        - h.upper[v..].iter().map(|p| p.scale).sum::<f64>();
    let shift_b: f64 = h.lower.iter().map(|p| p.shift).sum();
    let shift_a: f64 = h.upper.iter().map(|p| p.shift).sum();
    let (p, q) = (h.p() as f64, h.q() as f64);
    let mu = shift_b - shift_a + (p - q) / 2.0;
    let ln_radius: f64 = h.lower.iter().map(|b| b.scale * b.scale.ln()).sum::<f64>()
        - h.upper.iter().map(|a| a.scale * a.scale.ln()).sum::<f64>();
    let left = h.left_edge();
    let right = h.right_edge();
    if left >= right {
        return Err(Error::PoleCollision { left, right });
    }
    let contour_abscissa = match (left.is_finite(), right.is_finite()) {
        (true, true) => 0.5 * (left + right),
        (true, false) => left + 1.0,
        (false, true) => right - 1.0,
        (false, false) => 0.0,
    };
    let triplet = match delta {
        None => None,
        Some(d) => {
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::DeltaOutOfRange(d));
            }
            let tdelta = 1.0 + d * (sum_b - sum_a - 1.0);
            let ln_rho = d * d.ln()
                - h.upper.iter().map(|a| d * a.scale * (d * a.scale).ln()).sum::<f64>()
                - h.lower.iter().map(|b| d * b.scale * (d * b.scale).ln()).sum::<f64>();
            let nu = shift_b - shift_a + sum_b - sum_a + (p - q) / 2.0 - 1.0;
            Some(AsymptoticTriplet { delta: tdelta, rho: ln_rho.exp(), nu })
        }
    };
    Ok(ConvergenceInfo {
        delta_star: sum_b - sum_a,
        a_star,
        mu,
        radius: ln_radius.exp(),
        left_edge: left,
        right_edge: right,
        contour_abscissa,
        triplet,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Contour,
    LeftResidues,
    RightResidues,
    Limit,
}

#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub value: f64,
    pub residual: f64,
    pub nodes: usize,
    pub method: Method,
}

const NODE_CAP: usize = 1 << 20;
const SLOW_DECAY: f64 = 0.1;

/// H(z) as a plain number.
pub fn eval(h: &FoxH, z: f64, tol: f64) -> Result<f64> {
    eval_detailed(h, z, tol).map(|e| e.value)
}

pub fn eval_detailed(h: &FoxH, z: f64, tol: f64) -> Result<Evaluation> {
    eval_scaled(h, z, 0.0, tol)
}

/// e^{ln_factor}·H(z), with the factor folded into the integrand so that
/// huge H values times tiny prefactors stay representable.
pub fn eval_scaled(h: &FoxH, z: f64, ln_factor: f64, tol: f64) -> Result<Evaluation> {
    let lpre = ln_factor;
    if !(tol > 1e-14 && tol < 1e-2) {
        return Err(bad("tol", format!("must lie in (1e-14, 1e-2), got {tol}")));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Divergent { z });
    }
    let h = h.reduce();
    let info = convergence_params(&h, None)?;
    if z == 0.0 {
        return limit_at_zero(&h, &info, lpre);
    }
    let lnz = z.ln();
    let rate = info.a_star * PI / 2.0;
    if rate >= SLOW_DECAY {
        return contour(&h, &info, lnz, lpre, tol);
    }
    let side = if info.delta_star > 0.0 {
        Side::Left
    } else if info.delta_star < 0.0 {
        Side::Right
    } else {
        let lr = info.radius.ln();
        if (lnz - lr).abs() < 1e-12 {
            return Err(Error::Divergent { z });
        }
        if lnz < lr {
            Side::Left
        } else {
            Side::Right
        }
    };
    residue_series(&h, side, lnz, lpre, tol)
}

fn limit_at_zero(h: &FoxH, info: &ConvergenceInfo, lpre: f64) -> Result<Evaluation> {
    let done = |value| Ok(Evaluation { value, residual: 0.0, nodes: 0, method: Method::Limit });
    if h.u == 0 {
        return done(0.0);
    }
    let s0 = info.left_edge;
    if s0 < 0.0 {
        return done(0.0);
    }
    if s0 > 0.0 {
        return Err(Error::Divergent { z: 0.0 });
    }
    let r = pole_radius(h, s0);
    let res = circle_residue(h, s0, r, 0.0, lpre);
    // a nonzero coefficient of (s - s0)^{-2} means a logarithmic singularity
    let second = circle_moment(h, s0, r, 0.0, lpre, 1);
    if second.norm() > 1e-10 * res.norm().max(1.0) {
        return Err(Error::Divergent { z: 0.0 });
    }
    done(res.re)
}

fn integrand(h: &FoxH, s: Complex64, lnz: f64, lpre: f64) -> Complex64 {
    (h.log_kernel(s) - s * lnz + lpre).exp()
}

fn log_magnitude(h: &FoxH, s: Complex64, lnz: f64, lpre: f64) -> f64 {
    h.log_kernel(s).re - s.re * lnz + lpre
}

fn choose_abscissa(h: &FoxH, info: &ConvergenceInfo, lnz: f64, lpre: f64) -> f64 {
    let (lo, hi) = (info.left_edge, info.right_edge);
    let margin = if lo.is_finite() && hi.is_finite() { (0.25 * (hi - lo)).min(0.5) } else { 0.5 };
    let phi = |c: f64| {
        let v = log_magnitude(h, Complex64::new(c, 0.0), lnz, lpre);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (a, b) = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo + margin, hi - margin),
        (true, false) => (lo + margin, lo + margin + 2000.0),
        (false, true) => (hi - margin - 2000.0, hi - margin),
        (false, false) => (-1000.0, 1000.0),
    };
    if b <= a {
        return 0.5 * (lo + hi);
    }
    // coarse scan, denser near the finite edges
    let mut grid: Vec<f64> = Vec::with_capacity(64);
    if lo.is_finite() && !hi.is_finite() {
        let mut d = 0.0;
        while a + d <= b {
            grid.push(a + d);
            d = if d == 0.0 { 0.05 } else { d * 1.4 };
        }
    } else if hi.is_finite() && !lo.is_finite() {
        let mut d = 0.0;
        while b - d >= a {
            grid.push(b - d);
            d = if d == 0.0 { 0.05 } else { d * 1.4 };
        }
        grid.reverse();
    } else {
        let n = 40;
        grid.extend((0..=n).map(|k| a + (b - a) * k as f64 / n as f64));
    }
    let vals: Vec<f64> = grid.iter().map(|&c| phi(c)).collect();
    let (k, _) = vals.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let mut x0 = grid[k.saturating_sub(1)];
    let mut x3 = grid[(k + 1).min(grid.len() - 1)];
    // golden section inside the bracket
    let g = 0.618_033_988_749_894_9;
    let mut x1 = x3 - g * (x3 - x0);
    let mut x2 = x0 + g * (x3 - x0);
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    for _ in 0..60 {
        if (x3 - x0).abs() < 1e-4 {
            break;
        }
        if f1 < f2 {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - g * (x3 - x0);
            f1 = phi(x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + g * (x3 - x0);
            f2 = phi(x2);
        }
    }
    let best = 0.5 * (x0 + x3);
    if phi(best) <= vals[k] {
        best
    } else {
        grid[k]
    }
}

fn contour(h: &FoxH, info: &ConvergenceInfo, lnz: f64, lpre: f64, tol: f64) -> Result<Evaluation> {
    let c = choose_abscissa(h, info, lnz, lpre);
    let rate = info.a_star * PI / 2.0;
    let mag = |t: f64| log_magnitude(h, Complex64::new(c, t), lnz, lpre);
    // accuracy is relative to the integrand peak on the saddle contour
    let mut peak = mag(0.0);
    let mut prev = peak;
    let mut t_max = 1.0;
    loop {
        let m = mag(t_max);
        peak = peak.max(m);
        let thr = (1e-2 * tol * rate.min(1.0)).ln() + peak;
        if t_max >= 2.0 && (m < thr || m == f64::NEG_INFINITY) && m <= prev {
            break;
        }
        prev = m;
        t_max *= 1.5;
        if t_max > 1e7 {
            return Err(Error::NoConvergence { residual: f64::INFINITY, tol });
        }
    }
    let goal = (0.5 * tol * peak.exp()).max(f64::MIN_POSITIVE);
    let dist = (c - info.left_edge).min(info.right_edge - c).max(1e-3);
    let h0 = (t_max / 64.0).min(dist / 4.0);
    let mut n = (t_max / h0).ceil() as usize;
    let mut step = t_max / n as f64;
    let f = |t: f64| integrand(h, Complex64::new(c, t), lnz, lpre).re;
    let mut sum = 0.5 * f(0.0) + (1..=n).map(|k| f(k as f64 * step)).sum::<f64>();
    let mut estimate = sum * step / PI;
    let mut nodes = n + 1;
    loop {
        let fresh: f64 = (0..n).map(|k| f((2 * k + 1) as f64 * step / 2.0)).sum();
        sum += fresh;
        n *= 2;
        step /= 2.0;
        nodes += n / 2;
        let next = sum * step / PI;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= goal {
            return Ok(Evaluation { value: estimate, residual: diff, nodes, method: Method::Contour });
        }
        if nodes > NODE_CAP {
            return Err(Error::NoConvergence { residual: diff, tol });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Pole sequences (start, step) of the numerator gammas on one side.
fn pole_sequences(h: &FoxH, side: Side) -> Vec<(f64, f64)> {
    match side {
        Side::Left => h.lower[..h.u].iter().map(|p| (-p.shift / p.scale, -1.0 / p.scale)).collect(),
        Side::Right => h.upper[..h.v].iter().map(|p| ((1.0 - p.shift) / p.scale, 1.0 / p.scale)).collect(),
    }
}

fn same_point(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-9 * x.abs().max(1.0)
}

/// Radius of a residue circle around s0 that excludes all other poles.
fn pole_radius(h: &FoxH, s0: f64) -> f64 {
    let mut best: f64 = 0.5;
    for side in [Side::Left, Side::Right] {
        for (start, step) in pole_sequences(h, side) {
            let l = ((s0 - start) / step).round().max(0.0);
            for dl in -2..=2 {
                let k = l + dl as f64;
                if k < 0.0 {
                    continue;
                }
                let s = start + k * step;
                if !same_point(s, s0) {
                    best = best.min(0.4 * (s - s0).abs());
                }
            }
        }
    }
    best
}

/// (1/2πi)∮ (s − s0)^k θ(s) z^{−s} ds on a circle of radius r.
fn circle_moment(h: &FoxH, s0: f64, r: f64, lnz: f64, lpre: f64, k: i32) -> Complex64 {
    let n = 64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let ang = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        let d = Complex64::from_polar(r, ang);
        acc += integrand(h, s0 + d, lnz, lpre) * d.powi(k + 1);
    }
    acc / n as f64
}

fn circle_residue(h: &FoxH, s0: f64, r: f64, lnz: f64, lpre: f64) -> Complex64 {
    circle_moment(h, s0, r, lnz, lpre, 0)
}

fn residue_series(h: &FoxH, side: Side, lnz: f64, lpre: f64, tol: f64) -> Result<Evaluation> {
    let seqs = pole_sequences(h, side);
    let method = if side == Side::Left { Method::LeftResidues } else { Method::RightResidues };
    if seqs.is_empty() {
        return Ok(Evaluation { value: 0.0, residual: 0.0, nodes: 0, method });
    }
    let sign = if side == Side::Left { 1.0 } else { -1.0 };
    let mut heads = vec![0u64; seqs.len()];
    let mut total = 0.0;
    let mut abs_total = 0.0;
    let mut quiet = 0;
    let mut last = f64::INFINITY;
    for count in 0..5000 {
        // next pole: the one closest to the contour
        let pos: Vec<f64> = seqs.iter().zip(&heads).map(|(q, &l)| q.0 + l as f64 * q.1).collect();
        let mut s0 = pos[0];
        for &s in &pos[1..] {
            if (side == Side::Left && s > s0) || (side == Side::Right && s < s0) {
                s0 = s;
            }
        }
        for (l, &s) in heads.iter_mut().zip(&pos) {
            if same_point(s, s0) {
                *l += 1;
            }
        }
        let r = pole_radius(h, s0);
        let term = sign * circle_residue(h, s0, r, lnz, lpre).re;
        if !term.is_finite() {
            return Err(Error::NoConvergence { residual: f64::INFINITY, tol });
        }
        total += term;
        abs_total += term.abs();
        last = term.abs();
        if last < 1e-2 * tol {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 3 && count >= 3 {
            let residual = abs_total * 1e-14 + 3.0 * last;
            if residual > tol {
                return Err(Error::NoConvergence { residual, tol });
            }
            return Ok(Evaluation { value: total, residual, nodes: (count + 1) * 64, method });
        }
    }
    Err(Error::NoConvergence { residual: last, tol })
}

/// E[g^s] for the density κ H(c x), as κ c^{−(s+1)} θ(s + 1).
pub fn mellin_moment(h: &FoxH, s: f64) -> Result<f64> {
    check_strip(h, s)?;
    Ok(mellin_moment_c(h, Complex64::new(s, 0.0)).re)
}

fn check_strip(h: &FoxH, s: f64) -> Result<()> {
    let x = s + 1.0;
    let lower_ok = h.lower[..h.u].iter().all(|p| p.shift + p.scale * x > 0.0);
    let upper_ok = h.upper[..h.v].iter().all(|p| 1.0 - p.shift - p.scale * x > 0.0);
    if lower_ok && upper_ok {
        Ok(())
    } else {
        Err(Error::StripViolation { s })
    }
}

/// Complex-order moment; the caller is responsible for the strip.
pub fn mellin_moment_c(h: &FoxH, s: Complex64) -> Complex64 {
    let x = s + 1.0;
    (h.log_kernel(x) - x * h.c.ln() + h.kappa.ln()).exp()
}

/// Whether Re(s) lies inside the moment strip.
pub fn in_strip(h: &FoxH, s: f64) -> bool {
    check_strip(h, s).is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NearZero,
    AtInfinity,
}

/// Leading term of H(z) for z → 0 or z → ∞.
pub fn asymptotic_eval(h: &FoxH, z: f64, regime: Regime) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::Divergent { z });
    }
    let h = h.reduce();
    let info = convergence_params(&h, None)?;
    match regime {
        Regime::NearZero => {
            if h.u == 0 {
                return Err(Error::NotApplicable);
            }
            if z == 0.0 {
                return limit_at_zero(&h, &info, 0.0).map(|e| e.value);
            }
            let s0 = info.left_edge;
            Ok(circle_residue(&h, s0, pole_radius(&h, s0), z.ln(), 0.0).re)
        }
        Regime::AtInfinity => {
            if h.v > 0 {
                let s0 = info.right_edge;
                if z == 0.0 {
                    return Err(Error::Divergent { z });
                }
                return Ok(-circle_residue(&h, s0, pole_radius(&h, s0), z.ln(), 0.0).re);
            }
            if h.u == h.q() && info.delta_star > 0.0 {
                let (pre, power) = exponential_class(&h, &info);
                if z == 0.0 {
                    return if power > 0.0 {
                        Ok(0.0)
                    } else if power == 0.0 {
                        Ok(pre)
                    } else {
                        Err(Error::Divergent { z })
                    };
                }
                let d = info.delta_star;
                return Ok(pre * z.powf(power) * (-d * (z / info.radius).powf(1.0 / d)).exp());
            }
            Err(Error::NotApplicable)
        }
    }
}

/// (A, power) of H(z) ~ A z^{power} exp(−Δ (z/radius)^{1/Δ}) for u = q, v = 0.
pub fn exponential_class(h: &FoxH, info: &ConvergenceInfo) -> (f64, f64) {
    let d = info.delta_star;
    let (p, q) = (h.p() as f64, h.q() as f64);
    let c0 = h.lower.iter().map(|b| (b.shift - 0.5) * b.scale.ln()).sum::<f64>()
        - h.upper.iter().map(|a| (a.shift - 0.5) * a.scale.ln()).sum::<f64>()
        + 0.5 * (q - p) * (2.0 * PI).ln();
    let power = (info.mu + 0.5) / d;
    let ln_a = c0 - 0.5 * (2.0 * PI * d).ln() - power * info.radius.ln();
    (ln_a.exp(), power)
}
