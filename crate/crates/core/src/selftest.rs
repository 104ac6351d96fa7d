//! Special-function identities of the H-function evaluator, shared by the
//! CLI `selftest` command and the acceptance suite.

use crate::foxh::{eval, FoxH, Pair};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed error and where it occurred.
    pub detail: String,
}

fn worst(name: &str, tol: f64, points: impl Iterator<Item = (f64, f64, f64)>) -> Check {
    let mut max = (0.0f64, f64::NAN);
    let mut failed = None;
    for (x, got, want) in points {
        let err = (got - want).abs();
        if !(err <= max.0) {
            max = (err, x);
        }
        if !(err <= tol) && failed.is_none() {
            failed = Some(x);
        }
    }
    Check {
        name: name.to_string(),
        passed: failed.is_none(),
        detail: format!("max error {:.3e} at x = {} (tolerance {tol:e})", max.0, max.1),
    }
}

fn kernel(upper: Vec<Pair>, lower: Vec<Pair>, u: usize, v: usize) -> FoxH {
    FoxH::kernel(upper, lower, u, v).expect("valid kernel")
}

/// H^{1,0}_{0,1}[x | (0,1)] = e^{−x} on [0, 20].
pub fn exp_identity() -> Check {
    let h = kernel(vec![], vec![Pair::new(0.0, 1.0)], 1, 0);
    let pts = (0..=200).map(|i| {
        let x = i as f64 * 0.1;
        (x, eval(&h, x, 1e-12).unwrap_or(f64::NAN), (-x).exp())
    });
    worst("exp identity", 1e-10, pts)
}

/// H^{1,0}_{1,1}[x | (1,1); (0,1)] = 1{x < 1}, away from |x − 1| ≤ 1e−3.
pub fn heaviside_identity() -> Check {
    let h = kernel(vec![Pair::new(1.0, 1.0)], vec![Pair::new(0.0, 1.0)], 1, 0);
    let pts = (0..=300).map(|i| i as f64 * 0.01).chain([0.998, 1.002, 1e-6, 50.0]).filter(|x| (x - 1.0).abs() > 1e-3).map(|x| {
        let want = if x < 1.0 { 1.0 } else { 0.0 };
        (x, eval(&h, x, 1e-12).unwrap_or(f64::NAN), want)
    });
    worst("Heaviside identity", 1e-10, pts)
}

/// Γ(N)^{−1} H^{2,0}_{1,2}[x | (1,1); (0,1), (N,1)] = Q(N, x) for integer N.
pub fn incomplete_gamma_identity(n: usize) -> Check {
    let h = kernel(vec![Pair::new(1.0, 1.0)], vec![Pair::new(0.0, 1.0), Pair::new(n as f64, 1.0)], 2, 0);
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let pts = (1..=200).map(|i| {
        let x = i as f64 * 0.1;
        // e^{−x} Σ_{k<N} x^k/k!
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..n {
            term *= x / k as f64;
            sum += term;
        }
        (x, eval(&h, x, 1e-12).unwrap_or(f64::NAN) / fact, (-x).exp() * sum)
    });
    worst(&format!("incomplete gamma identity N={n}"), 1e-8, pts)
}

pub fn identity_suite() -> Vec<Check> {
    let mut out = vec![exp_identity(), heaviside_identity()];
    out.extend([1, 2, 3, 5].into_iter().map(incomplete_gamma_identity));
    out
}
