use hdense::fading::{Component, FadingModel};
use hdense::foxh;
use hdense::quad::{gauss_kronrod, gauss_kronrod_inf};
use proptest::prelude::*;

fn integrate_pdf(model: &FadingModel, power: f64) -> f64 {
    let f = |x: f64| x.powf(power) * model.pdf(x).unwrap();
    // split at the mean so the mapped tail stays smooth
    let head = gauss_kronrod(f, 0.0, 1.0, 1e-12, 1e-10, 400).value;
    head + gauss_kronrod_inf(f, 1.0, 1e-12, 1e-10, 400).value
}

fn catalog() -> Vec<FadingModel> {
    vec![
        FadingModel::gamma(0.7).unwrap(),
        FadingModel::gamma(1.5).unwrap(),
        FadingModel::gamma(4.0).unwrap(),
        FadingModel::gengamma(1.5, 0.8).unwrap(),
        FadingModel::gengamma(2.0, 1.5).unwrap(),
        FadingModel::gengamma(3.0, 2.5).unwrap(),
        FadingModel::rice(0.5).unwrap(),
        FadingModel::rice(3.0).unwrap(),
        FadingModel::rice(8.0).unwrap(),
    ]
}

fn fisher_set() -> Vec<FadingModel> {
    vec![
        FadingModel::fisher_f(2.0, 3.0).unwrap(),
        FadingModel::fisher_f(1.2, 4.5).unwrap(),
        FadingModel::fisher_f(5.0, 2.2).unwrap(),
    ]
}

#[test]
fn gamma_pdf_values() {
    let g1 = FadingModel::gamma(1.0).unwrap();
    assert!((g1.pdf(1.0).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-10);
    let g2 = FadingModel::gamma(2.0).unwrap();
    assert!((g2.pdf(1.0).unwrap() - 4.0 * (-2.0f64).exp()).abs() < 1e-10);
    assert_eq!(g1.components.len(), 1);
}

#[test]
fn rice_pdf_matches_noncentral_chi_square() {
    // (1+K) e^{-K} e^{-(1+K)x} I0(2 sqrt(K(1+K)x)), I0 by its power series
    let k: f64 = 5.0;
    let bessel_i0 = |y: f64| {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..200 {
            term *= (y / 2.0) * (y / 2.0) / (j as f64 * j as f64);
            sum += term;
        }
        sum
    };
    let model = FadingModel::rice(k).unwrap();
    for x in [0.2, 1.0, 2.5] {
        let want = (1.0 + k) * (-k - (1.0 + k) * x).exp() * bessel_i0(2.0 * (k * (1.0 + k) * x).sqrt());
        assert!((model.pdf(x).unwrap() - want).abs() < 1e-6, "x={x}");
    }
    assert!(model.discarded < 1e-12);
}

#[test]
fn lognormal_atoms() {
    let m = FadingModel::lognormal(0.0, 1.0, 24).unwrap();
    assert_eq!(m.components.len(), 24);
    let total: f64 = m.components.iter().map(Component::weight).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(m.pdf_is_substitute());
    // exp(δμ' + δ²σ'²/2) with natural-log parameters μ' = 0, σ' = ln 10
    let exact = (0.125 * std::f64::consts::LN_10.powi(2)).exp();
    assert!((exact - 1.940_095_626_381_78).abs() < 1e-12);
    assert!((m.lambda_moment(0.5).unwrap() / exact - 1.0).abs() < 1e-6);
    let m2 = FadingModel::lognormal(0.3, 2.0, 24).unwrap();
    let exact2 = (0.5 * 0.3 * std::f64::consts::LN_10 + 0.125 * (2.0 * std::f64::consts::LN_10).powi(2)).exp();
    assert!((m2.lambda_moment(0.5).unwrap() / exact2 - 1.0).abs() < 1e-6);
}

#[test]
fn lambda_examples() {
    let g2 = FadingModel::gamma(2.0).unwrap();
    assert!((g2.lambda_moment(0.5).unwrap() - 0.939_985_602_986_625).abs() < 1e-12);
    for m in catalog() {
        assert!((m.lambda_moment(1.0 - 1e-8).unwrap() - 1.0).abs() < 1e-6, "{m}");
    }
    let f = FadingModel::fisher_f(2.0, 3.0).unwrap();
    assert!((f.lambda_moment(0.5).unwrap() - 1.082_151_419_199_07).abs() < 1e-12);
}

#[test]
fn normalization_and_means() {
    for m in catalog() {
        let norm = integrate_pdf(&m, 0.0);
        assert!((norm - 1.0).abs() < 1e-6, "{m}: {norm}");
        let mean = integrate_pdf(&m, 1.0);
        assert!((mean - 1.0).abs() < 1e-6, "{m}: {mean}");
        assert!((m.mean - 1.0).abs() < 1e-6, "{m}");
    }
    for m in fisher_set() {
        let norm = integrate_pdf(&m, 0.0);
        assert!((norm - 1.0).abs() < 1e-6, "{m}: {norm}");
        let ms = match m.kind {
            hdense::fading::FadingKind::FisherF { ms, .. } => ms,
            _ => unreachable!(),
        };
        assert!((m.mean - ms / (ms - 1.0)).abs() < 1e-6, "{m}");
    }
}

#[test]
fn mellin_consistency_all_kernels() {
    let mut all = catalog();
    all.extend(fisher_set());
    for m in &all {
        for s in [0.0, 0.3, 0.5, 0.9] {
            let q = integrate_pdf(m, s);
            let v = m.lambda_moment_generic(s).unwrap();
            assert!((v / q - 1.0).abs() < 1e-6, "{m} s={s}: {v} vs {q}");
        }
    }
}

#[test]
fn closed_forms_match_generic_path() {
    let models = [
        FadingModel::gamma(2.5).unwrap(),
        FadingModel::gengamma(2.0, 1.5).unwrap(),
        FadingModel::rice(5.0).unwrap(),
        FadingModel::lognormal(0.1, 0.8, 24).unwrap(),
        FadingModel::fisher_f(2.0, 3.0).unwrap(),
    ];
    for m in &models {
        for delta in [0.2, 0.5, 2.0 / 3.0, 0.9] {
            let a = m.lambda_moment(delta).unwrap();
            let b = m.lambda_moment_generic(delta).unwrap();
            assert!((a - b).abs() < 1e-8, "{m} δ={delta}: {a} vs {b}");
        }
    }
}

#[test]
fn rice_series_oracle() {
    // Σ_t Ψ_t (Ω_t/m_t)^δ Γ(m_t+δ)/Γ(m_t), Ψ_t = K^t e^{-K}/t!, summed far past the cut
    let k: f64 = 5.0;
    let delta = 0.5;
    let mut psi = (-k).exp();
    let mut ratio = hdense::special::gamma(1.0 + delta);
    let mut acc = 0.0;
    for t in 0..200 {
        let mt = t as f64 + 1.0;
        if t > 0 {
            psi *= k / t as f64;
            ratio *= (mt - 1.0 + delta) / (mt - 1.0);
        }
        acc += psi * (1.0 / (1.0 + k)).powf(delta) * ratio;
    }
    let model = FadingModel::rice(k).unwrap();
    assert!((model.lambda_moment(delta).unwrap() - acc).abs() < 1e-11);
}

#[test]
fn lambda_log_convex_and_continuous() {
    let mut all = catalog();
    all.push(FadingModel::lognormal(0.0, 0.5, 24).unwrap());
    for m in &all {
        let grid: Vec<f64> = (1..=18).map(|k| 0.05 * k as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&d| m.lambda_moment(d).unwrap().ln()).collect();
        for w in vals.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-12, "{m}");
        }
        for w in vals.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.5, "{m}");
        }
        let near = m.lambda_moment(0.5 + 1e-9).unwrap() - m.lambda_moment(0.5).unwrap();
        assert!(near.abs() < 1e-7);
    }
}

#[test]
fn custom_kernel_uses_generic_path() {
    let g = FadingModel::gamma(2.0).unwrap();
    let h = match &g.components[0] {
        Component::Kernel { h, .. } => h.clone(),
        _ => unreachable!(),
    };
    let c = FadingModel::custom(h.clone()).unwrap();
    assert!((c.lambda_moment(0.5).unwrap() - g.lambda_moment(0.5).unwrap()).abs() < 1e-12);
    assert!((c.pdf(0.7).unwrap() - g.pdf(0.7).unwrap()).abs() < 1e-12);
    assert!(foxh::convergence_params(&h, None).is_ok());
    let s = FadingModel::gamma_scaled(4.0, 0.5).unwrap();
    assert!((s.mean - 2.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rice_weights_normalized(k in 0.0f64..20.0) {
        let m = FadingModel::rice(k).unwrap();
        let total: f64 = m.components.iter().map(Component::weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(m.discarded < 1e-12);
        prop_assert!((m.mean - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lognormal_weights_normalized(sigma in 0.1f64..2.0, n in 4usize..40) {
        let m = FadingModel::lognormal(0.0, sigma, n).unwrap();
        let total: f64 = m.components.iter().map(Component::weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_lambda_in_unit_interval(m in 0.2f64..20.0, d in 0.01f64..0.99) {
        let v = FadingModel::gamma(m).unwrap().lambda_moment(d).unwrap();
        prop_assert!(v > 0.0 && v <= 1.0 + 1e-12);
    }
}
