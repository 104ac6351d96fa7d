//! Grid evaluation and CSV output.

use std::io::{self, Write};
use std::time::Instant;

use hdense::coverage::*;
use hdense::fading::FadingModel;
use hdense::simulator::estimate_coverage;
use rayon::prelude::*;

use crate::config::{Engine, Sweep, Variable};

pub const HEADER: &str = "variable,value,engine,coverage,residual_or_ci,trials,seconds,error";

#[derive(Debug, Clone)]
pub struct Row {
    pub curve: Option<String>,
    pub variable: &'static str,
    pub value: f64,
    pub engine: &'static str,
    pub outcome: Result<Outcome, String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Outcome {
    pub coverage: f64,
    /// Analytic residual, 95% CI half-width for simulation.
    pub residual_or_ci: Option<f64>,
    pub trials: Option<u64>,
}

fn analytic(c: CoverageEstimate) -> Outcome {
    Outcome { coverage: c.value, residual_or_ci: Some(c.residual), trials: None }
}

fn plain(v: f64) -> Outcome {
    Outcome { coverage: v, residual_or_ci: None, trials: None }
}

fn set_antennas(t: &mut Tier, n: u32) {
    t.antennas = n;
    t.miso_gain = MisoGain::Gamma { shape: n as f64, scale: 1.0 };
}

/// The base network with the sweep variable set to `x`.
pub fn configure(sweep: &Sweep, x: f64) -> Result<NetworkModel, String> {
    let mut net = sweep.base.clone();
    let Some(var) = sweep.variable else {
        return Ok(net);
    };
    for &k in &sweep.tiers {
        let t = &mut net.tiers[k];
        match var {
            Variable::Lambda => t.density *= x,
            Variable::Beta => t.threshold = x,
            Variable::BetaDb => t.threshold = 10f64.powf(x / 10.0),
            Variable::NT => {
                if !(x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64) {
                    return Err(format!("n_t must be a positive integer, got {x}"));
                }
                set_antennas(t, x as u32);
            }
            Variable::KFactor => {
                let f = FadingModel::rice(x).map_err(|e| e.to_string())?;
                t.fading = f.clone();
                t.interferer_fading = f;
            }
            Variable::H | Variable::Tau => {}
        }
    }
    match (var, &mut net.path_loss) {
        (Variable::H, PathLoss::ThreeD { h, .. }) => *h = x,
        (Variable::Tau, PathLoss::MmWave { tau, .. }) => *tau = x,
        (Variable::H, _) => return Err("variable h needs path_loss = \"threed\"".into()),
        (Variable::Tau, _) => return Err("variable tau needs path_loss = \"mmwave\"".into()),
        _ => {}
    }
    if let Some(a) = sweep.antennas {
        let lam = net.tiers[0].density;
        let n = (a.coef * lam.powf(a.exponent)).ceil().max(1.0);
        if n > u32::MAX as f64 {
            return Err(format!("antenna scaling gives N_t = {n:e}"));
        }
        for &k in &sweep.tiers {
            set_antennas(&mut net.tiers[k], n as u32);
        }
    }
    Ok(net)
}

fn first(net: &NetworkModel) -> (f64, u64) {
    (net.tiers[0].density, net.tiers[0].antennas as u64)
}

pub fn evaluate(engine: Engine, mut net: NetworkModel, seed: u64, trials: u64) -> Result<Outcome, String> {
    let e = |x: hdense::Error| x.to_string();
    match engine {
        Engine::Closest => {
            net.association = Association::ClosestBs;
            coverage_closest(&net).map(analytic).map_err(e)
        }
        Engine::Strongest => {
            net.association = Association::StrongestBs;
            coverage_strongest(&net).map(analytic).map_err(e)
        }
        Engine::AdHoc => coverage_adhoc(&net).map(analytic).map_err(e),
        Engine::Asymptote => adhoc_asymptote(&net, net.tiers[0].density).map(plain).map_err(e),
        Engine::DenseLimit => {
            net.association = Association::ClosestBs;
            dense_limit(&net, Some(net.tiers[0].density)).map(plain).map_err(e)
        }
        Engine::MisoBounded => {
            if !matches!(net.path_loss, PathLoss::Bounded { .. }) {
                return Err("miso_bounded needs path_loss = \"bounded\"".into());
            }
            let (lam, n) = first(&net);
            miso_bounded_approx(lam, n, net.tiers[0].threshold, net.path_loss.alpha()).map(plain).map_err(e)
        }
        Engine::MmWave => {
            let (lam, n) = first(&net);
            mmwave_approx(lam, n, &net).map(plain).map_err(e)
        }
        Engine::ThreeD => {
            let (lam, n) = first(&net);
            threed_approx(lam, n, &net).map(plain).map_err(e)
        }
        Engine::Simulate => estimate_coverage(&net, trials, seed)
            .map(|m| Outcome { coverage: m.value, residual_or_ci: Some(m.half_width), trials: Some(m.trials) })
            .map_err(e),
    }
}

/// Rows in grid order, engines in listed order, whatever order workers finish in.
pub fn run(sweeps: &[Sweep]) -> Vec<Row> {
    let mut tasks = Vec::new();
    for (s, sw) in sweeps.iter().enumerate() {
        for &x in &sw.grid {
            for &eng in &sw.engines {
                tasks.push((s, x, eng));
            }
        }
    }
    tasks
        .into_par_iter()
        .map(|(s, x, eng)| {
            let sw = &sweeps[s];
            let start = Instant::now();
            let outcome = configure(sw, x).and_then(|net| evaluate(eng, net, sw.seed, sw.trials));
            Row {
                curve: sw.label.clone(),
                variable: sw.variable.map_or("none", |v| v.name()),
                value: x,
                engine: eng.name(),
                outcome,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

/// RFC 4180 quoting when needed.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_csv<W: Write>(out: &mut W, rows: &[Row], with_curve: bool) -> io::Result<()> {
    if with_curve {
        write!(out, "curve,")?;
    }
    writeln!(out, "{HEADER}")?;
    for r in rows {
        if with_curve {
            write!(out, "{},", field(r.curve.as_deref().unwrap_or("")))?;
        }
        let (cov, res, trials, error) = match &r.outcome {
            Ok(o) => (num(o.coverage), o.residual_or_ci.map_or(String::new(), num), o.trials.map_or(String::new(), |t| t.to_string()), String::new()),
            Err(msg) => (String::new(), String::new(), String::new(), field(msg)),
        };
        writeln!(out, "{},{},{},{cov},{res},{trials},{},{error}", r.variable, num(r.value), r.engine, num(r.seconds))?;
    }
    Ok(())
}
