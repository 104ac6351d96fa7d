//! Channel power-gain models as finite mixtures of Fox-H densities and
//! point masses.

use num_complex::Complex64;
use std::f64::consts::{LN_10, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{bad, Error, Result};
use crate::foxh::{self, FoxH, Pair};
use crate::special::{gamma, gamma_p, gauss_hermite, ln_gamma};

pub const DEFAULT_HERMITE_ORDER: usize = 24;
pub const DEFAULT_RICE_TERMS: usize = 64;
const RICE_TAIL: f64 = 1e-12;
const PDF_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum FadingKind {
    Gamma { m: f64 },
    GenGamma { m: f64, eta: f64 },
    Rice { k: f64, max_terms: usize },
    /// Base-10 parameters: g = 10^{mu + sigma Z}.
    Lognormal { mu: f64, sigma: f64, order: usize },
    FisherF { m: f64, ms: f64 },
    Custom(FoxH),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Kernel { weight: f64, h: FoxH },
    Atom { weight: f64, location: f64 },
}

impl Component {
    pub fn weight(&self) -> f64 {
        match self {
            Component::Kernel { weight, .. } | Component::Atom { weight, .. } => *weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FadingModel {
    pub kind: FadingKind,
    pub components: Vec<Component>,
    pub mean: f64,
    /// Probability mass dropped by truncating a series mixture.
    pub discarded: f64,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(bad(name, format!("must be positive, got {x}")))
    }
}

fn gamma_term(shape: f64, rate: f64) -> Result<FoxH> {
    FoxH::new(rate / gamma(shape), rate, vec![], vec![Pair::new(shape - 1.0, 1.0)], 1, 0)
}

impl FadingModel {
    pub fn new(kind: FadingKind) -> Result<Self> {
        let (components, discarded) = match &kind {
            FadingKind::Gamma { m } => {
                positive("m", *m)?;
                (vec![Component::Kernel { weight: 1.0, h: gamma_term(*m, *m)? }], 0.0)
            }
            FadingKind::GenGamma { m, eta } => {
                positive("m", *m)?;
                positive("eta", *eta)?;
                let mu = (ln_gamma(m + 1.0 / eta) - ln_gamma(*m)).exp();
                let h = FoxH::new(mu / gamma(*m), mu, vec![], vec![Pair::new(m - 1.0 / eta, 1.0 / eta)], 1, 0)?;
                (vec![Component::Kernel { weight: 1.0, h }], 0.0)
            }
            FadingKind::Rice { k, max_terms } => {
                if !(*k >= 0.0 && k.is_finite()) {
                    return Err(bad("k", format!("must be non-negative, got {k}")));
                }
                if *max_terms == 0 {
                    return Err(bad("max_terms", "must be at least 1"));
                }
                rice_terms(*k, *max_terms)?
            }
            FadingKind::Lognormal { mu, sigma, order } => {
                if !mu.is_finite() {
                    return Err(bad("mu", format!("must be finite, got {mu}")));
                }
                positive("sigma", *sigma)?;
                if *order == 0 || *order > 200 {
                    return Err(bad("n", format!("Hermite order must lie in 1..=200, got {order}")));
                }
                let (u, w) = gauss_hermite(*order);
                let atoms = u
                    .iter()
                    .zip(&w)
                    .map(|(&u, &w)| Component::Atom {
                        weight: w / PI.sqrt(),
                        location: 10f64.powf(2f64.sqrt() * sigma * u + mu),
                    })
                    .collect();
                (atoms, 0.0)
            }
            FadingKind::FisherF { m, ms } => {
                positive("m", *m)?;
                if !(*ms > 1.0 && ms.is_finite()) {
                    return Err(bad("ms", format!("must exceed 1, got {ms}")));
                }
                let h = FoxH::new(
                    m / (ms * gamma(*ms) * gamma(*m)),
                    m / ms,
                    vec![Pair::new(-ms, 1.0)],
                    vec![Pair::new(m - 1.0, 1.0)],
                    1,
                    1,
                )?;
                (vec![Component::Kernel { weight: 1.0, h }], 0.0)
            }
            FadingKind::Custom(h) => {
                foxh::convergence_params(h, None)?;
                (vec![Component::Kernel { weight: 1.0, h: h.clone() }], 0.0)
            }
        };
        let total: f64 = components.iter().map(Component::weight).sum();
        let components: Vec<Component> = components
            .into_iter()
            .map(|c| match c {
                Component::Kernel { weight, h } => Component::Kernel { weight: weight / total, h },
                Component::Atom { weight, location } => Component::Atom { weight: weight / total, location },
            })
            .collect();
        let mut model = FadingModel { kind, components, mean: f64::NAN, discarded };
        model.mean = model.moment_generic(1.0).unwrap_or(f64::INFINITY);
        Ok(model)
    }

    pub fn gamma(m: f64) -> Result<Self> {
        Self::new(FadingKind::Gamma { m })
    }

    pub fn rayleigh() -> Self {
        Self::gamma(1.0).expect("valid")
    }

    pub fn gengamma(m: f64, eta: f64) -> Result<Self> {
        Self::new(FadingKind::GenGamma { m, eta })
    }

    pub fn rice(k: f64) -> Result<Self> {
        Self::new(FadingKind::Rice { k, max_terms: DEFAULT_RICE_TERMS })
    }

    pub fn lognormal(mu: f64, sigma: f64, order: usize) -> Result<Self> {
        Self::new(FadingKind::Lognormal { mu, sigma, order })
    }

    pub fn fisher_f(m: f64, ms: f64) -> Result<Self> {
        Self::new(FadingKind::FisherF { m, ms })
    }

    pub fn custom(h: FoxH) -> Result<Self> {
        Self::new(FadingKind::Custom(h))
    }

    /// Gamma(shape, scale) power gain as a custom Fox-H term.
    pub fn gamma_scaled(shape: f64, scale: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("scale", scale)?;
        Self::custom(gamma_term(shape, 1.0 / scale)?)
    }

    pub fn has_atoms(&self) -> bool {
        self.components.iter().any(|c| matches!(c, Component::Atom { .. }))
    }

    /// True when `pdf` uses the analytic lognormal density instead of the mixture.
    pub fn pdf_is_substitute(&self) -> bool {
        matches!(self.kind, FadingKind::Lognormal { .. })
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(bad("x", format!("must be non-negative, got {x}")));
        }
        if let FadingKind::Lognormal { mu, sigma, .. } = self.kind {
            if x == 0.0 {
                return Ok(0.0);
            }
            let (m, s) = (mu * LN_10, sigma * LN_10);
            let z = (x.ln() - m) / s;
            return Ok((-0.5 * z * z).exp() / (x * s * (2.0 * PI).sqrt()));
        }
        let mut acc = 0.0;
        for c in &self.components {
            match c {
                Component::Kernel { weight, h } => acc += weight * h.kappa * foxh::eval(h, h.c * x, PDF_TOL)?,
                Component::Atom { .. } => return Err(bad("model", "point-mass mixtures have no density")),
            }
        }
        Ok(acc.max(0.0))
    }

    /// E[g^s] summed over the mixture.
    pub fn moment_generic(&self, s: f64) -> Result<f64> {
        let mut acc = 0.0;
        for c in &self.components {
            acc += match c {
                Component::Kernel { weight, h } => weight * foxh::mellin_moment(h, s)?,
                Component::Atom { weight, location } => weight * location.powf(s),
            };
        }
        Ok(acc)
    }

    /// Λ = E[g^δ] through the closed forms of the catalog.
    pub fn lambda_moment(&self, delta: f64) -> Result<f64> {
        match self.kind {
            FadingKind::Gamma { m } => Ok((ln_gamma(m + delta) - ln_gamma(m) - delta * m.ln()).exp()),
            FadingKind::GenGamma { m, eta } => {
                let ln_mu = ln_gamma(m + 1.0 / eta) - ln_gamma(m);
                Ok((ln_gamma(m + delta / eta) - ln_gamma(m) - delta * ln_mu).exp())
            }
            FadingKind::Rice { k, .. } => {
                let mut acc = 0.0;
                for (t, c) in self.components.iter().enumerate() {
                    let mt = t as f64 + 1.0;
                    let omega = mt / (1.0 + k);
                    acc += c.weight() * (omega / mt).powf(delta) * (ln_gamma(mt + delta) - ln_gamma(mt)).exp();
                }
                Ok(acc)
            }
            FadingKind::Lognormal { mu, sigma, order } => {
                let (u, w) = gauss_hermite(order);
                Ok(u.iter().zip(&w).map(|(u, w)| w / PI.sqrt() * 10f64.powf(delta * (2f64.sqrt() * sigma * u + mu))).sum())
            }
            FadingKind::FisherF { m, ms } => {
                if delta >= ms {
                    return Err(Error::StripViolation { s: delta });
                }
                Ok((delta * (ms / m).ln() + ln_gamma(m + delta) + ln_gamma(ms - delta) - ln_gamma(m) - ln_gamma(ms)).exp())
            }
            FadingKind::Custom(_) => self.moment_generic(delta),
        }
    }

    /// Λ through the general Mellin-moment route.
    pub fn lambda_moment_generic(&self, delta: f64) -> Result<f64> {
        self.moment_generic(delta)
    }

    /// E[g^s] for complex s. Lognormal uses its exact Gaussian moment.
    pub fn moment_c(&self, s: Complex64) -> Complex64 {
        if let FadingKind::Lognormal { mu, sigma, .. } = self.kind {
            let (m, v) = (mu * LN_10, sigma * LN_10);
            return (s * m + s * s * (0.5 * v * v)).exp();
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &self.components {
            acc += match c {
                Component::Kernel { weight, h } => foxh::mellin_moment_c(h, s) * *weight,
                Component::Atom { weight, location } => (s * location.ln()).exp() * *weight,
            };
        }
        acc
    }

    /// Whether E[g^s] is finite for real s.
    pub fn moment_exists(&self, s: f64) -> bool {
        self.components.iter().all(|c| match c {
            Component::Kernel { h, .. } => foxh::in_strip(h, s),
            Component::Atom { .. } => true,
        })
    }

    /// Whether every mixture term belongs to the exponential-decay class.
    pub fn exponential_class(&self) -> bool {
        self.components.iter().all(|c| match c {
            Component::Kernel { h, .. } => {
                let r = h.reduce();
                r.v == 0 && r.u == r.q()
            }
            Component::Atom { .. } => true,
        })
    }
}

fn rice_terms(k: f64, max_terms: usize) -> Result<(Vec<Component>, f64)> {
    // smallest T with P(Poisson(k) > T) < tail bound
    let mut last = 0usize;
    while k > 0.0 && gamma_p(last as f64 + 1.0, k) >= RICE_TAIL {
        last += 1;
        if last + 1 > max_terms {
            return Err(Error::TruncationOverflow { max_terms });
        }
    }
    let discarded = if k > 0.0 { gamma_p(last as f64 + 1.0, k) } else { 0.0 };
    let mut comps = Vec::with_capacity(last + 1);
    for t in 0..=last {
        let tf = t as f64;
        let psi = if k > 0.0 { (tf * k.ln() - k - ln_gamma(tf + 1.0)).exp() } else { 1.0 };
        comps.push(Component::Kernel { weight: psi, h: gamma_term(tf + 1.0, 1.0 + k)? });
    }
    Ok((comps, discarded))
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(","))
}

impl fmt::Display for FadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FadingKind::Gamma { m } => write!(f, "gamma(m={m})"),
            FadingKind::GenGamma { m, eta } => write!(f, "gengamma(m={m},eta={eta})"),
            FadingKind::Rice { k, .. } => write!(f, "rice(k={k})"),
            FadingKind::Lognormal { mu, sigma, order } => write!(f, "lognormal(mu={mu},sigma={sigma},n={order})"),
            FadingKind::FisherF { m, ms } => write!(f, "fisherf(m={m},ms={ms})"),
            FadingKind::Custom(h) => {
                let a: Vec<f64> = h.upper.iter().map(|p| p.shift).collect();
                let aa: Vec<f64> = h.upper.iter().map(|p| p.scale).collect();
                let b: Vec<f64> = h.lower.iter().map(|p| p.shift).collect();
                let bb: Vec<f64> = h.lower.iter().map(|p| p.scale).collect();
                write!(
                    f,
                    "foxh(kappa={},c={},a={},A={},b={},B={},u={},v={})",
                    h.kappa,
                    h.c,
                    fmt_list(&a),
                    fmt_list(&aa),
                    fmt_list(&b),
                    fmt_list(&bb),
                    h.u,
                    h.v
                )
            }
        }
    }
}

enum Value {
    Num(f64),
    List(Vec<f64>),
}

fn parse_number(key: &str, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| bad(key, format!("`{}` is not a number", s.trim())))
}

fn parse_args(body: &str) -> Result<Vec<(String, Value)>> {
    let mut out = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        let eq = rest.find('=').ok_or_else(|| bad("spec", format!("expected key=value near `{rest}`")))?;
        let key = rest[..eq].trim().to_string();
        if key.is_empty() {
            return Err(bad("spec", "empty key"));
        }
        rest = rest[eq + 1..].trim_start();
        let (value, after) = if let Some(inner) = rest.strip_prefix('[') {
            let close = inner.find(']').ok_or_else(|| bad(&key, "unterminated list"))?;
            let items = inner[..close].trim();
            let list = if items.is_empty() {
                Vec::new()
            } else {
                items.split(',').map(|x| parse_number(&key, x)).collect::<Result<Vec<f64>>>()?
            };
            (Value::List(list), &inner[close + 1..])
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            (Value::Num(parse_number(&key, &rest[..end])?), &rest[end..])
        };
        out.push((key, value));
        let after = after.trim_start();
        rest = match after.strip_prefix(',') {
            Some(r) => r.trim_start(),
            None if after.is_empty() => after,
            None => return Err(bad("spec", format!("unexpected `{after}`"))),
        };
    }
    Ok(out)
}

struct Args {
    items: Vec<(String, Value)>,
}

impl Args {
    fn num(&self, key: &str) -> Result<Option<f64>> {
        match self.items.iter().find(|(k, _)| k == key) {
            None => Ok(None),
            Some((_, Value::Num(x))) => Ok(Some(*x)),
            Some((_, Value::List(_))) => Err(bad(key, "expected a number, found a list")),
        }
    }

    fn need(&self, key: &str) -> Result<f64> {
        self.num(key)?.ok_or_else(|| bad(key, "missing"))
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        match self.num(key)? {
            None => Ok(default),
            Some(x) if x >= 0.0 && x.fract() == 0.0 => Ok(x as usize),
            Some(x) => Err(bad(key, format!("must be a non-negative integer, got {x}"))),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.items.iter().find(|(k, _)| k == key) {
            None => Ok(Vec::new()),
            Some((_, Value::List(v))) => Ok(v.clone()),
            Some((_, Value::Num(x))) => Ok(vec![*x]),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.items {
            if !allowed.contains(&k.as_str()) {
                return Err(bad(k, format!("unknown key; expected one of {allowed:?}")));
            }
        }
        Ok(())
    }
}

/// `default` fills in a missing κ or c.
fn foxh_from_args(args: &Args, default: Option<f64>) -> Result<FoxH> {
    args.check_keys(&["kappa", "c", "a", "A", "b", "B", "u", "v"])?;
    let (a, aa, b, bb) = (args.list("a")?, args.list("A")?, args.list("b")?, args.list("B")?);
    if a.len() != aa.len() {
        return Err(bad("A", format!("length {} differs from a ({})", aa.len(), a.len())));
    }
    if b.len() != bb.len() {
        return Err(bad("B", format!("length {} differs from b ({})", bb.len(), b.len())));
    }
    let get = |k: &str| match default {
        Some(d) => args.num(k).map(|x| x.unwrap_or(d)),
        None => args.need(k),
    };
    let upper = a.iter().zip(&aa).map(|(&x, &y)| Pair::new(x, y)).collect();
    let lower = b.iter().zip(&bb).map(|(&x, &y)| Pair::new(x, y)).collect();
    FoxH::new(get("kappa")?, get("c")?, upper, lower, args.count("u", 0)?, args.count("v", 0)?)
}

impl FromStr for FoxH {
    type Err = Error;

    /// `foxh(kappa=..,c=..,a=[..],A=[..],b=[..],B=[..],u=..,v=..)`; κ and c default to 1.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let body = s
            .strip_prefix("foxh(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("spec", format!("expected foxh(...) in `{s}`")))?;
        foxh_from_args(&Args { items: parse_args(body)? }, Some(1.0))
    }
}

impl FromStr for FadingModel {
    type Err = Error;

    /// Grammar: `gamma(m=2.5)`, `gengamma(m=2,eta=1.5)`, `rice(k=5)`,
    /// `lognormal(mu=0,sigma=1,n=24)`, `fisherf(m=2,ms=3)`,
    /// `foxh(kappa=..,c=..,a=[..],A=[..],b=[..],B=[..],u=..,v=..)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| bad("spec", format!("expected name(...) in `{s}`")))?;
        if !s.ends_with(')') {
            return Err(bad("spec", format!("missing `)` in `{s}`")));
        }
        let name = s[..open].trim().to_ascii_lowercase();
        let args = Args { items: parse_args(&s[open + 1..s.len() - 1])? };
        let kind = match name.as_str() {
            "gamma" | "nakagami" => {
                args.check_keys(&["m"])?;
                FadingKind::Gamma { m: args.need("m")? }
            }
            "rayleigh" => {
                args.check_keys(&[])?;
                FadingKind::Gamma { m: 1.0 }
            }
            "gengamma" => {
                args.check_keys(&["m", "eta"])?;
                FadingKind::GenGamma { m: args.need("m")?, eta: args.need("eta")? }
            }
            "rice" => {
                args.check_keys(&["k", "max_terms"])?;
                FadingKind::Rice { k: args.need("k")?, max_terms: args.count("max_terms", DEFAULT_RICE_TERMS)? }
            }
            "lognormal" => {
                args.check_keys(&["mu", "sigma", "n"])?;
                FadingKind::Lognormal {
                    mu: args.num("mu")?.unwrap_or(0.0),
                    sigma: args.need("sigma")?,
                    order: args.count("n", DEFAULT_HERMITE_ORDER)?,
                }
            }
            "fisherf" => {
                args.check_keys(&["m", "ms"])?;
                FadingKind::FisherF { m: args.need("m")?, ms: args.need("ms")? }
            }
            "foxh" => FadingKind::Custom(foxh_from_args(&args, None)?),
            other => return Err(bad("spec", format!("unknown fading model `{other}`"))),
        };
        FadingModel::new(kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["gamma(m=2.5)", "gengamma(m=2,eta=1.5)", "rice(k=5)", "lognormal(mu=0,sigma=1,n=24)", "fisherf(m=2,ms=3)"] {
            let m: FadingModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        let c: FadingModel = "foxh(kappa=1, c=1, a=[], A=[], b=[0], B=[1], u=1, v=0)".parse().unwrap();
        assert!((c.pdf(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn parse_errors_name_field() {
        let e = "gamma(m=-1)".parse::<FadingModel>().unwrap_err();
        assert!(e.to_string().contains("`m`"), "{e}");
        let e = "fisherf(m=2,ms=0.5)".parse::<FadingModel>().unwrap_err();
        assert!(e.to_string().contains("`ms`"));
        assert!("gamma(q=1)".parse::<FadingModel>().is_err());
        assert!("weibull(k=1)".parse::<FadingModel>().is_err());
        assert!("gamma(m=abc)".parse::<FadingModel>().is_err());
    }

    #[test]
    fn rice_zero_is_rayleigh() {
        let r = FadingModel::rice(0.0).unwrap();
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.components[0].weight(), 1.0);
        for x in [0.1, 1.0, 3.0] {
            assert!((r.pdf(x).unwrap() - (-x).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn rice_overflow() {
        let e = FadingModel::new(FadingKind::Rice { k: 30.0, max_terms: 20 }).unwrap_err();
        assert_eq!(e, Error::TruncationOverflow { max_terms: 20 });
    }
}
