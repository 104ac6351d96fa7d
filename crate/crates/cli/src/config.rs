//! TOML run configuration, `--set` overrides and conversion to library types.

use std::fmt;

use hdense::coverage::{Association, MisoGain, NetworkModel, PathLoss, Tier};
use hdense::fading::FadingModel;
use serde::Deserialize;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const DEFAULT_TRIALS: u64 = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub network: NetworkSection,
    pub sweep: Option<SweepSection>,
    /// Checked by the typed parse; `load` expands curves from the raw table.
    #[serde(default)]
    #[allow(dead_code)]
    pub curve: Vec<CurveSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(default = "unbounded")]
    pub path_loss: String,
    pub alpha: f64,
    pub noise: Option<f64>,
    pub noise_dbm: Option<f64>,
    #[serde(default = "closest")]
    pub association: String,
    pub r: Option<f64>,
    pub h: Option<f64>,
    pub alpha_nlos: Option<f64>,
    pub tau: Option<f64>,
    pub spacing: Option<f64>,
    pub wavelength: Option<f64>,
    pub carrier: Option<f64>,
    pub tier: Vec<TierSection>,
}

fn unbounded() -> String {
    "unbounded".into()
}

fn closest() -> String {
    "closest".into()
}

fn one() -> f64 {
    1.0
}

fn rayleigh() -> String {
    "rayleigh()".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierSection {
    /// Absolute density, or a relative weight when λ is swept.
    #[serde(default = "one")]
    pub density: f64,
    #[serde(default = "one")]
    pub power: f64,
    pub threshold: Option<f64>,
    pub threshold_db: Option<f64>,
    #[serde(default = "rayleigh")]
    pub fading: String,
    pub interferer_fading: Option<String>,
    #[serde(default)]
    pub antennas: Option<u32>,
    /// Gamma(N_t, 1) serving gain; implied by a `n_t` sweep or antenna scaling.
    #[serde(default)]
    pub mrt: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaScaling {
    pub coef: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: String,
    pub grid: Option<Vec<f64>>,
    pub log: Option<Range>,
    pub linear: Option<Range>,
    pub engines: Vec<String>,
    /// Tiers a tier-level variable applies to (default: all).
    pub tiers: Option<Vec<usize>>,
    /// N_t = ⌈coef · λ^exponent⌉ with λ the first tier's density.
    pub antennas: Option<AntennaScaling>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub label: String,
    #[serde(default)]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Lambda,
    Beta,
    BetaDb,
    NT,
    H,
    KFactor,
    Tau,
}

impl Variable {
    fn parse(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "lambda" => Variable::Lambda,
            "beta" => Variable::Beta,
            "beta_db" => Variable::BetaDb,
            "n_t" => Variable::NT,
            "h" => Variable::H,
            "k_factor" => Variable::KFactor,
            "tau" => Variable::Tau,
            _ => return err(format!("sweep.variable: unknown variable `{s}`")),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Variable::Lambda => "lambda",
            Variable::Beta => "beta",
            Variable::BetaDb => "beta_db",
            Variable::NT => "n_t",
            Variable::H => "h",
            Variable::KFactor => "k_factor",
            Variable::Tau => "tau",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Closest,
    Strongest,
    AdHoc,
    MisoBounded,
    MmWave,
    ThreeD,
    Simulate,
    DenseLimit,
    Asymptote,
}

impl Engine {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "closest" => Engine::Closest,
            "strongest" => Engine::Strongest,
            "adhoc" => Engine::AdHoc,
            "miso_bounded" => Engine::MisoBounded,
            "mmwave" => Engine::MmWave,
            "threed" => Engine::ThreeD,
            "simulate" => Engine::Simulate,
            "dense_limit" => Engine::DenseLimit,
            "asymptote" => Engine::Asymptote,
            _ => return err(format!("sweep.engines: unknown engine `{s}`")),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Engine::Closest => "closest",
            Engine::Strongest => "strongest",
            Engine::AdHoc => "adhoc",
            Engine::MisoBounded => "miso_bounded",
            Engine::MmWave => "mmwave",
            Engine::ThreeD => "threed",
            Engine::Simulate => "simulate",
            Engine::DenseLimit => "dense_limit",
            Engine::Asymptote => "asymptote",
        }
    }
}

/// A validated sweep: base network plus how each grid value modifies it.
/// Without a `[sweep]` section the grid is a single point with no variable.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub label: Option<String>,
    pub variable: Option<Variable>,
    pub grid: Vec<f64>,
    pub engines: Vec<Engine>,
    pub tiers: Vec<usize>,
    pub antennas: Option<AntennaScaling>,
    pub base: NetworkModel,
    pub seed: u64,
    pub trials: u64,
}

/// Overrides applied on top of the file, in order.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub set: Vec<String>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

/// Parses `text`, applies `--set` overrides and returns one sweep per curve.
pub fn load(text: &str, ov: &Overrides) -> Result<Vec<Sweep>, ConfigError> {
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError(format!("config: {e}")))?;
    if ov.set.is_empty() {
        // typed parse of the raw text reports the offending line
        toml::from_str::<Config>(text).map_err(|e| ConfigError(format!("config: {e}")))?;
    }
    for s in &ov.set {
        apply_set(&mut doc, s)?;
    }
    let curves = match doc.remove("curve") {
        Some(toml::Value::Array(c)) => c,
        Some(_) => return err("curve: expected an array of tables"),
        None => Vec::new(),
    };
    if curves.is_empty() {
        return Ok(vec![build(doc, None, ov)?]);
    }
    let mut out = Vec::new();
    for (i, c) in curves.into_iter().enumerate() {
        let c: CurveSection = c.try_into().map_err(|e: toml::de::Error| ConfigError(format!("curve[{i}]: {e}")))?;
        let mut d = doc.clone();
        for s in &c.set {
            apply_set(&mut d, s).map_err(|e| ConfigError(format!("curve `{}`: {}", c.label, e.0)))?;
        }
        // command-line overrides win over curve settings
        for s in &ov.set {
            apply_set(&mut d, s)?;
        }
        out.push(build(d, Some(c.label), ov)?);
    }
    Ok(out)
}

/// `a.b.0.c=value`; the value is read as TOML, falling back to a bare string.
pub fn apply_set(doc: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| ConfigError(format!("--set `{assignment}`: expected key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return err(format!("--set `{assignment}`: empty key"));
    }
    let mut root = toml::Value::Table(std::mem::take(doc));
    let res = set_path(&mut root, &keys, parse_value(raw.trim()), path.trim());
    if let toml::Value::Table(t) = root {
        *doc = t;
    }
    res
}

fn set_path(node: &mut toml::Value, keys: &[&str], value: toml::Value, path: &str) -> Result<(), ConfigError> {
    let k = keys[0];
    let slot = match node {
        toml::Value::Table(t) => {
            if keys.len() == 1 {
                t.insert(k.to_string(), value);
                return Ok(());
            }
            t.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()))
        }
        toml::Value::Array(a) => {
            let idx: usize = k.parse().map_err(|_| ConfigError(format!("--set `{path}`: `{k}` is not an index")))?;
            let len = a.len();
            let slot = a.get_mut(idx).ok_or_else(|| ConfigError(format!("--set `{path}`: index {idx} out of range ({len})")))?;
            if keys.len() == 1 {
                *slot = value;
                return Ok(());
            }
            slot
        }
        _ => return err(format!("--set `{path}`: `{k}` has no table or array parent")),
    };
    set_path(slot, &keys[1..], value, path)
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn build(doc: toml::Table, label: Option<String>, ov: &Overrides) -> Result<Sweep, ConfigError> {
    let cfg: Config = toml::Value::Table(doc).try_into().map_err(|e: toml::de::Error| ConfigError(format!("config: {e}")))?;
    let base = network(&cfg.network)?;
    let trials = ov.trials.or(cfg.trials).unwrap_or(DEFAULT_TRIALS);
    if trials < 1000 {
        return err(format!("trials: at least 1000 required, got {trials}"));
    }
    let seed = ov.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let Some(sw) = cfg.sweep else {
        return Ok(Sweep {
            label,
            variable: None,
            grid: vec![f64::NAN],
            engines: Vec::new(),
            tiers: Vec::new(),
            antennas: None,
            base,
            seed,
            trials,
        });
    };
    let variable = Variable::parse(&sw.variable)?;
    let grid = grid(&sw)?;
    if sw.engines.is_empty() {
        return err("sweep.engines: at least one engine is required");
    }
    let engines = sw.engines.iter().map(|e| Engine::parse(e)).collect::<Result<Vec<_>, _>>()?;
    let tiers = sw.tiers.clone().unwrap_or_else(|| (0..base.tiers.len()).collect());
    if let Some(&bad) = tiers.iter().find(|&&t| t >= base.tiers.len()) {
        return err(format!("sweep.tiers: tier {bad} does not exist"));
    }
    if let Some(a) = sw.antennas {
        if !(a.coef > 0.0 && a.coef.is_finite() && a.exponent.is_finite()) {
            return err("sweep.antennas: coef must be positive and exponent finite");
        }
    }
    Ok(Sweep { label, variable: Some(variable), grid, engines, tiers, antennas: sw.antennas, base, seed, trials })
}

fn grid(s: &SweepSection) -> Result<Vec<f64>, ConfigError> {
    let given = [s.grid.is_some(), s.log.is_some(), s.linear.is_some()].iter().filter(|&&b| b).count();
    if given != 1 {
        return err("sweep: give exactly one of grid, log, linear");
    }
    let g = if let Some(g) = &s.grid {
        g.clone()
    } else {
        let (r, log) = match (&s.log, &s.linear) {
            (Some(r), _) => (r, true),
            (_, Some(r)) => (r, false),
            _ => unreachable!(),
        };
        if r.points == 0 {
            return err("sweep: points must be positive");
        }
        if log && !(r.from > 0.0 && r.to > 0.0) {
            return err("sweep.log: bounds must be positive");
        }
        let n = r.points;
        (0..n)
            .map(|i| {
                let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                if log {
                    10f64.powf(r.from.log10() + t * (r.to.log10() - r.from.log10()))
                } else {
                    r.from + t * (r.to - r.from)
                }
            })
            .collect()
    };
    if g.is_empty() {
        return err("sweep.grid: must not be empty");
    }
    if g.iter().any(|x| !x.is_finite()) || g.windows(2).any(|w| w[1] <= w[0]) {
        return err("sweep.grid: values must be finite and strictly increasing");
    }
    Ok(g)
}

fn fading(field: &str, spec: &str) -> Result<FadingModel, ConfigError> {
    spec.parse::<FadingModel>().map_err(|e| ConfigError(format!("{field}: {e}")))
}

fn need(field: &str, v: Option<f64>) -> Result<f64, ConfigError> {
    v.ok_or_else(|| ConfigError(format!("network.{field}: required for this path-loss model")))
}

pub fn network(n: &NetworkSection) -> Result<NetworkModel, ConfigError> {
    let path_loss = match n.path_loss.as_str() {
        "unbounded" => PathLoss::Unbounded { alpha: n.alpha },
        "bounded" => PathLoss::Bounded { alpha: n.alpha },
        "threed" => PathLoss::ThreeD { alpha: n.alpha, h: need("h", n.h)? },
        "mmwave" => PathLoss::MmWave {
            alpha_los: n.alpha,
            alpha_nlos: need("alpha_nlos", n.alpha_nlos)?,
            tau: need("tau", n.tau)?,
            spacing: need("spacing", n.spacing)?,
            wavelength: need("wavelength", n.wavelength)?,
            carrier: n.carrier.unwrap_or(28e9),
        },
        other => return err(format!("network.path_loss: unknown model `{other}`")),
    };
    let association = match n.association.as_str() {
        "closest" => Association::ClosestBs,
        "strongest" => Association::StrongestBs,
        "fixed" => Association::FixedDistance(need("r", n.r)?),
        other => return err(format!("network.association: unknown rule `{other}`")),
    };
    let noise = match (n.noise, n.noise_dbm) {
        (Some(_), Some(_)) => return err("network: give noise or noise_dbm, not both"),
        (Some(x), None) => x,
        (None, Some(dbm)) => 10f64.powf((dbm - 30.0) / 10.0),
        (None, None) => 0.0,
    };
    if n.tier.is_empty() {
        return err("network.tier: at least one tier is required");
    }
    let mut tiers = Vec::new();
    for (i, t) in n.tier.iter().enumerate() {
        let threshold = match (t.threshold, t.threshold_db) {
            (Some(_), Some(_)) => return err(format!("network.tier[{i}]: give threshold or threshold_db, not both")),
            (Some(b), None) => b,
            (None, Some(db)) => 10f64.powf(db / 10.0),
            (None, None) => 1.0,
        };
        let f = fading(&format!("network.tier[{i}].fading"), &t.fading)?;
        let mut tier = Tier::new(t.density, t.power, threshold, f);
        if let Some(s) = &t.interferer_fading {
            tier = tier.with_interferer_fading(fading(&format!("network.tier[{i}].interferer_fading"), s)?);
        }
        let ant = t.antennas.unwrap_or(1);
        if ant == 0 {
            return err(format!("network.tier[{i}].antennas: must be at least 1"));
        }
        tier.antennas = ant;
        if t.mrt {
            tier.miso_gain = MisoGain::Gamma { shape: ant as f64, scale: 1.0 };
        }
        tiers.push(tier);
    }
    let net = NetworkModel { tiers, path_loss, noise, association };
    net.validate().map_err(|e| ConfigError(format!("network: {e}")))?;
    Ok(net)
}
