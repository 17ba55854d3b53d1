//! Two-parameter Mittag-Leffler function on the negative real axis.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::special::{rgamma, CompensatedSum};

/// Below this value of `y = |x|^{1/μ}` the power series is summed directly.
const TAYLOR_LIMIT: f64 = 3.0;
/// Above this value of `y` the asymptotic expansion is accurate to rounding.
const ASYMPTOTIC_LIMIT: f64 = 38.0;

/// `E_{μ,β}(x) = Σ_k x^k / Γ(μk + β)` for `0 < μ <= 1`, `β > 0`, `x <= 0`.
pub fn mittag_leffler(mu: f64, beta: f64, x: f64) -> Result<f64> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::domain(format!("Mittag-Leffler order mu must lie in (0, 1], got {mu}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("Mittag-Leffler order beta must be positive, got {beta}")));
    }
    if !(x <= 0.0) {
        return Err(Error::domain(format!("Mittag-Leffler argument must be <= 0, got {x}")));
    }
    Ok(ml_neg(mu, beta, -x))
}

/// `E_{μ,β}(-z)` for `z >= 0`.
fn ml_neg(mu: f64, beta: f64, z: f64) -> f64 {
    if z == 0.0 {
        return rgamma(beta);
    }
    if z.is_infinite() {
        return 0.0;
    }
    if mu == 1.0 {
        return exp_type(beta, z);
    }
    let y = z.powf(1.0 / mu);
    if y <= TAYLOR_LIMIT {
        return taylor(mu, beta, z);
    }
    if y >= ASYMPTOTIC_LIMIT {
        return asymptotic(mu, beta, z);
    }
    if beta > 1.0 {
        // E_{μ,β}(x) = (E_{μ,β-μ}(x) - 1/Γ(β-μ)) / x, applied until the
        // integrand below is bounded at the origin.
        return (rgamma(beta - mu) - ml_neg(mu, beta - mu, z)) / z;
    }
    integral(mu, beta, z)
}

fn taylor(mu: f64, beta: f64, z: f64) -> f64 {
    let mut sum = CompensatedSum::new();
    let mut power = 1.0;
    let mut small = 0;
    for k in 0..5000 {
        let term = power * rgamma(mu * k as f64 + beta);
        sum.add(term);
        if term.abs() <= 1e-17 * sum.value().abs() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
        power *= -z;
    }
    sum.value()
}

fn asymptotic(mu: f64, beta: f64, z: f64) -> f64 {
    // E_{μ,β}(-z) ~ -Σ_{k≥1} (-z)^{-k} / Γ(β - μk). The factor 1/Γ(β - μk)
    // oscillates through zeros, so truncation is decided on the envelope
    // z^{-k} Γ(1 - β + μk) / π, which is smallest near μk = z^{1/μ}.
    let mut sum = CompensatedSum::new();
    let ln_z = z.ln();
    let y = z.powf(1.0 / mu);
    let mut sign = -1.0;
    for k in 1..100_000 {
        let kf = k as f64;
        sign = -sign;
        let arg = beta - mu * kf;
        let ln_env = if arg <= 0.0 {
            libm::lgamma(1.0 - arg) - PI.ln() - kf * ln_z
        } else {
            -kf * ln_z
        };
        let term = sign * (-kf * ln_z).exp() * rgamma(arg);
        sum.add(term);
        if ln_env < (1e-17 * sum.value().abs()).ln() || mu * kf > y {
            break;
        }
    }
    sum.value()
}

/// Real integral representation, valid for `0 < μ < 1`, `0 < β < 1 + μ`:
///
/// ```text
/// E_{μ,β}(-z) = 1/(μπ) ∫_0^∞ exp(-s^{1/μ}) s^{(1-β)/μ}
///               (s sin βπ + z sin (β-μ)π) / (s² + 2zs cos μπ + z²) ds.
/// ```
fn integral(mu: f64, beta: f64, z: f64) -> f64 {
    let inv_mu = 1.0 / mu;
    let expo = (1.0 - beta) * inv_mu;
    let (sb, sbm) = ((beta * PI).sin(), ((beta - mu) * PI).sin());
    let cm = (mu * PI).cos();
    let s_max = 700f64.powf(mu);
    let f = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let den = s * s + 2.0 * z * s * cm + z * z;
        (-s.powf(inv_mu)).exp() * s.powf(expo) * (s * sb + z * sbm) / den
    };
    let mut breaks = vec![0.0, s_max, 1.0, z];
    if cm < 0.0 {
        let s0 = -z * cm;
        let w = z * (mu * PI).sin();
        breaks.extend([s0 - w, s0, s0 + w]);
    }
    breaks.retain(|&b| (0.0..=s_max).contains(&b));
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    let (value, _) = integrate_adaptive(f, &breaks, 1e-15, 0.0, 4000);
    value * inv_mu / PI
}

/// `μ = 1`: exponential-type functions `E_{1,β}`.
fn exp_type(beta: f64, z: f64) -> f64 {
    if beta == 1.0 {
        return (-z).exp();
    }
    if beta < 1.0 {
        return rgamma(beta) - z * exp_type(beta + 1.0, z);
    }
    if z < 1.0 {
        return taylor(1.0, beta, z);
    }
    // E_{1,β}(-z) = 1/Γ(β) ∫_0^1 exp(-z (1 - v^{1/(β-1)})) dv
    let q = 1.0 / (beta - 1.0);
    let f = |v: f64| (-z * (1.0 - v.powf(q))).exp();
    let mut breaks = vec![0.0, 1.0];
    let edge = 1.0 - (beta - 1.0) / z;
    if edge > 0.0 {
        breaks.insert(1, edge);
        let near = 1.0 - 0.1 * (beta - 1.0) / z;
        breaks.insert(2, near);
    }
    let (value, _) = integrate_adaptive(f, &breaks, 1e-15, 0.0, 4000);
    value * rgamma(beta)
}
