//! Acceptance criteria. One PASS/FAIL line each; exits nonzero on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use hdense::coverage::*;
use hdense::fading::FadingModel;
use hdense::quad::{gauss_kronrod, gauss_kronrod_inf};
use hdense::selftest::identity_suite;
use hdense::simulator::estimate_coverage;

const SEED: u64 = 0xC0FFEE;
const TRIALS: u64 = 200_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, f64, fn() -> Outcome);

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn e(x: hdense::Error) -> String {
    x.to_string()
}

fn single(tier: Tier, alpha: f64, association: Association) -> NetworkModel {
    NetworkModel::single(tier, PathLoss::Unbounded { alpha }, 0.0, association)
}

fn ac1() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for c in identity_suite() {
        ok &= c.passed;
        lines.push(format!("{} {}", c.name, c.detail));
    }
    check(ok, lines.join("; "))
}

fn ac2() -> Outcome {
    let net = single(Tier::new(1e-3, 1.0, 1.0, FadingModel::rayleigh()), 4.0, Association::StrongestBs);
    let want = 2.0 / PI;
    let a = coverage_strongest(&net).map_err(e)?.value;
    let mc = estimate_coverage(&net, TRIALS, SEED).map_err(e)?;
    let msg = format!("analytic {a:.12} (err {:.1e}), MC {:.5} ± {:.5}", (a - want).abs(), mc.value, mc.half_width);
    check((a - want).abs() <= 1e-10 && (mc.value - want).abs() <= mc.half_width, msg)
}

fn ac3() -> Outcome {
    let net = NetworkModel::single(
        Tier::new(1e-3, 1.0, 1.0, FadingModel::rayleigh()),
        PathLoss::Unbounded { alpha: 4.0 },
        0.0,
        Association::FixedDistance(10.0),
    );
    // λ π r² Γ(1−δ)Γ(1+δ) β^δ with δ = 1/2
    let want = (-1e-3 * PI * 100.0 * PI / 2.0).exp();
    let a = coverage_adhoc(&net).map_err(e)?.value;
    let asym = adhoc_asymptote(&net, 1e-3).map_err(e)?;
    let mc = estimate_coverage(&net, TRIALS, SEED).map_err(e)?;
    let msg = format!(
        "analytic {a:.8} vs {want:.8}, asymptote diff {:.1e}, MC {:.5} ± {:.5}",
        (asym - a).abs(),
        mc.value,
        mc.half_width
    );
    check(
        (a - want).abs() <= 1e-6 && (asym - a).abs() <= 1e-8 && (mc.value - a).abs() <= mc.half_width,
        msg,
    )
}

/// Two tiers: P = 50 W and 1 W, Nakagami m = 1.5 and 2.5, α = 3, noise −70 dBm.
fn two_tier(lambda: f64, beta_db: f64, association: Association) -> NetworkModel {
    let beta = 10f64.powf(beta_db / 10.0);
    NetworkModel {
        tiers: vec![
            Tier::new(lambda, 50.0, beta, FadingModel::gamma(1.5).unwrap()),
            Tier::new(lambda, 1.0, beta, FadingModel::gamma(2.5).unwrap()),
        ],
        path_loss: PathLoss::Unbounded { alpha: 3.0 },
        noise: 1e-10,
        association,
    }
}

fn ac4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for beta_db in [0.0, 5.0] {
        for lambda in [1e-5, 1e-4, 1e-3] {
            let net = two_tier(lambda, beta_db, Association::ClosestBs);
            let a = coverage_closest(&net).map_err(e)?.value;
            let mc = estimate_coverage(&net, TRIALS, SEED).map_err(e)?;
            worst = worst.max((a - mc.value).abs());
            parts.push(format!("{beta_db}dB/{lambda:e}: {a:.4} vs {:.4}", mc.value));
        }
    }
    check(worst <= 0.02, format!("max gap {:.2} pp; {}", 100.0 * worst, parts.join(", ")))
}

fn ac5() -> Outcome {
    let mut errs = Vec::new();
    let mut quiet = two_tier(1e-4, 0.0, Association::StrongestBs);
    quiet.noise = 0.0;
    let base = coverage_strongest(&quiet).map_err(e)?.value;
    let mut strongest_dev: f64 = 0.0;
    for scale in [1e-3, 10.0, 1e4] {
        let mut n = quiet.clone();
        for t in &mut n.tiers {
            t.density *= scale;
        }
        strongest_dev = strongest_dev.max((coverage_strongest(&n).map_err(e)?.value - base).abs());
    }
    if strongest_dev > 1e-12 {
        errs.push("strongest");
    }

    let limit = two_tier(1.0, 0.0, Association::ClosestBs);
    let l0 = dense_limit(&limit, Some(1e-3)).map_err(e)?;
    let mut limit_dev: f64 = 0.0;
    for lam in [1e-5, 1e-1, 1e3] {
        limit_dev = limit_dev.max((dense_limit(&limit, Some(lam)).map_err(e)? - l0).abs());
    }
    if limit_dev > 1e-12 {
        errs.push("dense limit");
    }

    let mut closest_dev: f64 = 0.0;
    for lam in [1e-5, 1e-3, 1e-1] {
        let mut a = two_tier(lam, 5.0, Association::ClosestBs);
        a.noise = 0.0;
        let mut b = a.clone();
        for t in &mut b.tiers {
            t.density *= 10.0;
        }
        let (ca, cb) = (coverage_closest(&a).map_err(e)?.value, coverage_closest(&b).map_err(e)?.value);
        closest_dev = closest_dev.max((ca - cb).abs() / ca);
    }
    if closest_dev >= 1e-3 {
        errs.push("closest");
    }
    check(
        errs.is_empty(),
        format!("strongest {strongest_dev:.1e}, dense limit {limit_dev:.1e}, closest rel {closest_dev:.1e}"),
    )
}

/// Values at λ = 10², 10³, 10⁴ must move monotonically toward `target` and end within 0.01 of it.
fn trend(vals: &[f64], target: f64) -> bool {
    let monotone = vals.windows(2).all(|w| if target == 1.0 { w[1] >= w[0] } else { w[1] <= w[0] });
    monotone && (vals[vals.len() - 1] - target).abs() < 0.01
}

fn ac6() -> Outcome {
    let lams = [1e2, 1e3, 1e4];
    let mut ok = true;
    let mut parts = Vec::new();

    let eta = 2.0;
    let zeta_c = 2.0 * PI / eta;
    for (f, target) in [(1.5, 1.0), (0.5, 0.0)] {
        let vals: Vec<f64> = lams
            .iter()
            .map(|&l| miso_bounded_approx(l, (f * zeta_c * l).ceil() as u64, 1.0, 3.0))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        ok &= trend(&vals, target);
        parts.push(format!("cellular {f}ζ* {vals:?}"));
    }

    let (tau, spacing, wl) = (0.1, 0.5, 1.0);
    let mm = NetworkModel::single(
        Tier::new(1.0, 1.0, 1.0, FadingModel::rayleigh()),
        PathLoss::MmWave { alpha_los: 3.0, alpha_nlos: 4.0, tau, spacing, wavelength: wl, carrier: 28e9 },
        0.0,
        Association::ClosestBs,
    );
    let rho = optimal_scaling(OptimalKind::MmWave { alpha_los: 3.0, alpha_nlos: 4.0, tau, spacing, beta: 1.0 }).map_err(e)?;
    for (f, target) in [(1.1, 1.0), (0.9, 0.0)] {
        let vals: Vec<f64> = lams
            .iter()
            .map(|&l| mmwave_approx(l, (f * rho * l * wl).ceil() as u64, &mm))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        ok &= trend(&vals, target);
        parts.push(format!("mmwave {f}ρ* {vals:?}"));
    }

    let h = 1.0;
    let td = NetworkModel::single(
        Tier::new(1.0, 1.0, 1.0, FadingModel::rayleigh()),
        PathLoss::ThreeD { alpha: 4.0, h },
        0.0,
        Association::ClosestBs,
    );
    let zeta = optimal_scaling(OptimalKind::ThreeD { alpha: 4.0, beta: 1.0, h }).map_err(e)?;
    for (f, target) in [(1.1, 1.0), (0.9, 0.0)] {
        let vals: Vec<f64> = lams
            .iter()
            .map(|&l| threed_approx(l, (f * zeta * l).ceil() as u64, &td))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        ok &= trend(&vals, target);
        parts.push(format!("3d {f}ζ* {vals:?}"));
    }
    check(ok, parts.join("; "))
}

fn ac7() -> Outcome {
    let mut errs = Vec::new();
    let grid: Vec<f64> = (0..=12).map(|k| 10f64.powf(-4.0 + 0.5 * k as f64)).collect();

    let mut bounded = two_tier(1.0, 0.0, Association::ClosestBs);
    bounded.path_loss = PathLoss::Bounded { alpha: 3.0 };
    let mut curve = Vec::new();
    for &lam in &grid {
        let mut n = bounded.clone();
        for t in &mut n.tiers {
            t.density = lam;
        }
        let c = coverage_closest(&n).map_err(e)?;
        // below the residual the value is numerically zero
        if c.value <= c.residual {
            break;
        }
        curve.push(c.value);
    }
    // strictly decreasing from some point on
    let tail = curve.windows(2).rposition(|w| w[1] >= w[0]).map_or(0, |i| i + 1);
    if curve.len() < 6 || curve.len() - tail < 4 {
        errs.push("bounded");
    }

    let dense = two_tier(1e3, 0.0, Association::ClosestBs);
    let c = coverage_closest(&dense).map_err(e)?.value;
    let lim = dense_limit(&dense, None).map_err(e)?;
    let rel = (c - lim).abs() / lim;
    if rel > 0.01 {
        errs.push("unbounded");
    }

    // Nakagami-2 link, Rayleigh interferers: the asymptote only takes over deep in the tail
    let (alpha, r) = (3.0, 1.0);
    let tier = Tier::new(1.0, 1.0, 1.0, FadingModel::gamma(2.0).unwrap()).with_interferer_fading(FadingModel::rayleigh());
    let adhoc = NetworkModel::single(tier, PathLoss::Unbounded { alpha }, 0.0, Association::FixedDistance(r));
    let lams: Vec<f64> = (0..=7).map(|k| 10f64.powf(-2.0 + 0.5 * k as f64)).collect();
    let mut cov = Vec::new();
    for &lam in &lams {
        let mut n = adhoc.clone();
        n.tiers[0].density = lam;
        cov.push(coverage_adhoc(&n).map_err(e)?.value);
    }
    let last = *lams.last().unwrap();
    let ratio = adhoc_asymptote(&adhoc, last).map_err(e)? / cov.last().unwrap();
    let decreasing = cov.windows(2).all(|w| w[1] < w[0]);
    if !decreasing || (ratio - 1.0).abs() > 0.05 {
        errs.push("adhoc");
    }
    check(
        errs.is_empty(),
        format!(
            "bounded decreasing over λ={:e}..{:e} (last {:.2e}); unbounded {c:.6} vs limit {lim:.6} (rel {rel:.1e}); adhoc ratio {ratio:.4} at λ={last:e}{}",
            grid[tail],
            grid[curve.len().max(1) - 1],
            curve.last().unwrap(),
            if errs.is_empty() { String::new() } else { format!("; failed: {}", errs.join(", ")) }
        ),
    )
}

fn integrate_pdf(model: &FadingModel, power: f64) -> Result<f64, String> {
    let mut err = None;
    let mut f = |x: f64| match model.pdf(x) {
        Ok(p) => x.powf(power) * p,
        Err(x) => {
            err = Some(x.to_string());
            0.0
        }
    };
    let head = gauss_kronrod(&mut f, 0.0, 1.0, 1e-12, 1e-10, 400).value;
    let tail = gauss_kronrod_inf(&mut f, 1.0, 1e-12, 1e-10, 400).value;
    match err {
        Some(m) => Err(m),
        None => Ok(head + tail),
    }
}

fn ac8() -> Outcome {
    let models = [
        FadingModel::gamma(2.5).unwrap(),
        FadingModel::gengamma(2.0, 1.5).unwrap(),
        FadingModel::rice(5.0).unwrap(),
        FadingModel::lognormal(0.0, 0.8, 24).unwrap(),
        FadingModel::fisher_f(2.0, 3.0).unwrap(),
    ];
    let mut moment_gap: f64 = 0.0;
    let mut coverage_gap: f64 = 0.0;
    let mut norm_gap: f64 = 0.0;
    let mut mean_gap: f64 = 0.0;
    for m in &models {
        for delta in [0.2, 0.5, 2.0 / 3.0, 0.9] {
            let a = m.lambda_moment(delta).map_err(e)?;
            let b = m.lambda_moment_generic(delta).map_err(e)?;
            moment_gap = moment_gap.max((a - b).abs());
        }
        let net = single(Tier::new(1e-3, 1.0, 4.0, m.clone()), 3.0, Association::StrongestBs);
        let a = coverage_strongest(&net).map_err(e)?.value;
        let b = coverage_strongest_generic(&net).map_err(e)?.value;
        coverage_gap = coverage_gap.max((a - b).abs());
        if !m.has_atoms() {
            norm_gap = norm_gap.max((integrate_pdf(m, 0.0)? - 1.0).abs());
            mean_gap = mean_gap.max((integrate_pdf(m, 1.0)? - m.mean).abs() / m.mean);
        }
        mean_gap = mean_gap.max((m.moment_generic(1.0).map_err(e)? - m.mean).abs() / m.mean);
    }
    check(
        moment_gap <= 1e-8 && coverage_gap <= 1e-8 && norm_gap <= 1e-6 && mean_gap <= 1e-6,
        format!("Λ gap {moment_gap:.1e}, coverage gap {coverage_gap:.1e}, normalization {norm_gap:.1e}, mean {mean_gap:.1e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1", "special-function identities", 10.0, ac1),
        ("AC2", "strongest-BS Rayleigh oracle", 60.0, ac2),
        ("AC3", "ad hoc closed form", f64::INFINITY, ac3),
        ("AC4", "closest-BS vs simulation", 600.0, ac4),
        ("AC5", "invariance laws", f64::INFINITY, ac5),
        ("AC6", "scaling-law trichotomy", 60.0, ac6),
        ("AC7", "densification trends", f64::INFINITY, ac7),
        ("AC8", "generic vs closed-form paths", f64::INFINITY, ac8),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let res = run();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match res {
            Ok(d) => (secs <= budget, d),
            Err(d) => (false, d),
        };
        let over = if secs > budget { format!(" [over {budget} s budget]") } else { String::new() };
        println!("{} {id} {name} ({secs:.2} s){over}: {detail}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
