//! Special functions: complex log-gamma, incomplete gamma, generalized
//! exponential integrals and Gauss–Hermite rules.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::quad;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Principal-ish branch of ln Γ(z). Only `exp` of the result is meaningful
/// for the imaginary part (it is correct modulo 2π).
pub fn ln_gamma_c(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_c(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + (LANCZOS_G + 0.5);
    (z + 0.5) * t.ln() - t + x.ln() + LN_SQRT_2PI
}

/// ln sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    // reduce the real part to [-1, 1]; sin(π(z+2k)) = sin(πz)
    let xr = z.re - 2.0 * (z.re / 2.0).round();
    let z = Complex64::new(xr, z.im);
    if z.im.abs() < 15.0 {
        return (z * PI).sin().ln();
    }
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz})
    let i = Complex64::i();
    let e2 = (2.0 * PI * i * z).exp();
    -i * PI * z + Complex64::new(0.5f64.ln(), PI / 2.0) + (1.0 - e2).ln()
}

/// ln |Γ(x)| for real x.
pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_c(Complex64::new(x, 0.0)).re
}

/// Γ(x) for real x (poles give ±inf or a huge value).
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 {
        return ln_gamma(x).exp();
    }
    if x == x.floor() {
        return f64::INFINITY;
    }
    // reflection keeps the sign
    PI / ((PI * x).sin() * gamma(1.0 - x))
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "gamma_p requires a > 0");
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "gamma_q requires a > 0");
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cf(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..1_000_000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1_000_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Generalized exponential integral E_ν(x) = ∫_1^∞ e^{-xt} t^{-ν} dt for x ≥ 0.
pub fn expint(nu: f64, x: f64) -> f64 {
    assert!(x >= 0.0, "expint requires x >= 0");
    if x == 0.0 {
        return if nu > 1.0 { 1.0 / (nu - 1.0) } else { f64::INFINITY };
    }
    if x > 1.0 {
        return expint_scaled(nu, x) * (-x).exp();
    }
    // t = e^u; integrand e^{-x e^u} e^{(1-ν)u}
    let upper = (40.0 / x).ln().max(1.0) + 5.0;
    let f = |u: f64| (-x * u.exp() + (1.0 - nu) * u).exp();
    quad::gauss_kronrod(f, 0.0, upper, 1e-15, 1e-14, 500).value
}

/// e^x E_ν(x), finite for large x where both factors over/underflow.
pub fn expint_scaled(nu: f64, x: f64) -> f64 {
    if x > 1.0 {
        let tiny = 1e-300;
        let mut b = x + nu;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..100_000 {
            let fi = i as f64;
            let an = -fi * (nu - 1.0 + fi);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        return h;
    }
    x.exp() * expint(nu, x)
}

/// Gauss–Hermite nodes and weights for weight e^{-x²}, ascending nodes.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_hermite requires n >= 1");
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    (x, w)
}
