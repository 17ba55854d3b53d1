//! Fractional kernels `ω_β`, L1 history weights, the Mittag-Leffler function
//! and the interpolation-error probe.

mod mittag_leffler;

pub use mittag_leffler::mittag_leffler;

use crate::error::{Error, Result};
use crate::special::{gamma, pow_increment, rgamma, CompensatedSum};
use crate::timegrid::GradedMesh;

/// `ω_β(t) = t^{β-1} / Γ(β)`.
///
/// At `t = 0` the kernel is `0` for `β > 1`, `1` for `β = 1`, and singular
/// (a domain error) for `β < 1`.
pub fn omega(beta: f64, t: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::domain(format!("kernel order must be positive, got {beta}")));
    }
    if t < 0.0 || t.is_nan() {
        return Err(Error::domain(format!("kernel argument must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return if beta > 1.0 {
            Ok(0.0)
        } else if beta == 1.0 {
            Ok(1.0)
        } else {
            Err(Error::domain("kernel is singular at t = 0 for order below 1"))
        };
    }
    Ok(t.powf(beta - 1.0) * rgamma(beta))
}

/// L1 weights of the discrete fractional convolution on a graded mesh.
///
/// For `1 <= j < n`,
///
/// ```text
/// w(n, j) = ∫_{I_n} ∫_{I_j} ω_α(s - q) dq ds
///         = [ω_{α+2}(t_n - t_{j-1}) - ω_{α+2}(t_{n-1} - t_{j-1})]
///         - [ω_{α+2}(t_n - t_j)     - ω_{α+2}(t_{n-1} - t_j)].
/// ```
///
/// Weights are computed on demand; nothing is tabulated.
#[derive(Debug, Clone, Copy)]
pub struct ConvolutionWeights<'a> {
    alpha: f64,
    mesh: &'a GradedMesh,
    rgamma_p1: f64,
    rgamma_p2: f64,
}

impl<'a> ConvolutionWeights<'a> {
    pub fn new(mesh: &'a GradedMesh, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(Self {
            alpha,
            mesh,
            rgamma_p1: rgamma(alpha + 1.0),
            rgamma_p2: rgamma(alpha + 2.0),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mesh(&self) -> &GradedMesh {
        self.mesh
    }

    /// History weight `w(n, j)`, `1 <= j < n <= N`.
    pub fn w(&self, n: usize, j: usize) -> f64 {
        debug_assert!(j >= 1 && j < n && n <= self.mesh.n());
        let tau_n = self.mesh.step(n);
        let tau_j = self.mesh.step(j);
        if self.alpha == 1.0 {
            return tau_n * tau_j;
        }
        let d = self.mesh.t(n - 1) - self.mesh.t(j);
        second_difference(d, tau_n.min(tau_j), tau_n.max(tau_j), self.alpha + 1.0) * self.rgamma_p2
    }

    /// Weight on the initial data, `ω_{α+1}(t_n) - ω_{α+1}(t_{n-1})`.
    pub fn initial(&self, n: usize) -> f64 {
        pow_increment(self.mesh.t(n - 1), self.mesh.step(n), self.alpha) * self.rgamma_p1
    }

    /// Diagonal factor `τ_n^α / Γ(α+2)`.
    pub fn diagonal(&self, n: usize) -> f64 {
        self.mesh.step(n).powf(self.alpha) * self.rgamma_p2
    }

    /// `∫_{I_n} ω_{α+1}(t - t_{n-1}) dt = ω_{α+2}(τ_n)`.
    pub fn self_term(&self, n: usize) -> f64 {
        self.mesh.step(n).powf(self.alpha + 1.0) * self.rgamma_p2
    }

    /// `ω_{α+2}(t_n) - ω_{α+2}(t_{n-1}) - ω_{α+2}(τ_n)`, the value of `Σ_j w(n, j)`.
    pub fn telescoped_sum(&self, n: usize) -> f64 {
        let p = self.alpha + 1.0;
        let tau_n = self.mesh.step(n);
        (pow_increment(self.mesh.t(n - 1), tau_n, p) - tau_n.powf(p)) * self.rgamma_p2
    }

    /// All history weights `w(n, 1), ..., w(n, n-1)`.
    pub fn history(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 || n > self.mesh.n() {
            return Err(Error::Index { index: n, lo: 2, hi: self.mesh.n() });
        }
        Ok((1..n).map(|j| self.w(n, j)).collect())
    }
}

/// History weights `[w(n,1), ..., w(n,n-1)]` for step `n`.
pub fn conv_weights(mesh: &GradedMesh, alpha: f64, n: usize) -> Result<Vec<f64>> {
    ConvolutionWeights::new(mesh, alpha)?.history(n)
}

/// `(d+A+B)^p - (d+A)^p - (d+B)^p + d^p` for `d >= 0`, `0 < A <= B`, `1 < p < 2`.
fn second_difference(d: f64, a: f64, b: f64, p: f64) -> f64 {
    if d == 0.0 {
        let r = a / b;
        return b.powf(p) * ((p * r.ln_1p()).exp_m1() - r.powf(p));
    }
    if a <= 0.5 * d {
        // Σ_{l≥1} C(p,l) A^l [(d+B)^{p-l} - d^{p-l}]
        let lb = (b / d).ln_1p();
        let ratio = a / d;
        let mut coef = 1.0;
        let mut pw = d.powf(p);
        let mut sum = CompensatedSum::new();
        for l in 1..200 {
            let lf = l as f64;
            coef *= (p - lf + 1.0) / lf;
            pw *= ratio;
            let term = coef * pw * ((p - lf) * lb).exp_m1();
            sum.add(term);
            if term.abs() <= 1e-18 * sum.value().abs() {
                break;
            }
        }
        return sum.value();
    }
    pow_increment(d + b, a, p) - pow_increment(d, a, p)
}

/// Interpolation-error probe for `g(t) = t^ν`.
///
/// Returns `Σ_j τ_j^{-1} |∫_{I_j} ∂_t^{1-α}(g - ǧ) dt|²`, where `ǧ` is the
/// piecewise-linear interpolant of `g` on the mesh. The exact part uses
/// `∫_{I_j} I^α g' dt = Γ(ν+1)/Γ(ν+α+1) (t_j^{ν+α} - t_{j-1}^{ν+α})`; the
/// interpolant part uses the L1 weights.
pub fn interp_probe(nu: f64, alpha: f64, mesh: &GradedMesh) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::domain(format!("regularity exponent must lie in (0, 1], got {nu}")));
    }
    let weights = ConvolutionWeights::new(mesh, alpha)?;
    let n_steps = mesh.n();
    let slopes: Vec<f64> = (1..=n_steps)
        .map(|k| pow_increment(mesh.t(k - 1), mesh.step(k), nu) / mesh.step(k))
        .collect();
    let scale = gamma(nu + 1.0) * rgamma(nu + alpha + 1.0);
    let mut total = CompensatedSum::new();
    for j in 1..=n_steps {
        let exact = scale * pow_increment(mesh.t(j - 1), mesh.step(j), nu + alpha);
        let mut approx = CompensatedSum::new();
        approx.add(slopes[j - 1] * weights.self_term(j));
        for k in 1..j {
            approx.add(slopes[k - 1] * weights.w(j, k));
        }
        let diff = exact - approx.value();
        total.add(diff * diff / mesh.step(j));
    }
    Ok(total.value())
}
