//! Power-graded temporal meshes `t_i = T (i/N)^γ`.

use crate::error::{Error, Result};
use crate::special::gamma;

const PROPERTY_SLACK: f64 = 1e-12;

/// Graded temporal mesh on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedMesh {
    t_final: f64,
    n: usize,
    gamma: f64,
    nodes: Vec<f64>,
    steps: Vec<f64>,
}

impl GradedMesh {
    /// Builds the mesh with nodes `t_i = (iτ)^γ`, `τ = T^{1/γ}/N`.
    ///
    /// The nodes are evaluated in closed form as `T (i/N)^γ`, so `t_N = T`
    /// exactly and rounding does not accumulate with `N`.
    pub fn build(t_final: f64, n: usize, gamma: f64) -> Result<Self> {
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::domain(format!("final time must be positive, got {t_final}")));
        }
        if n == 0 {
            return Err(Error::domain("a mesh needs at least one subinterval"));
        }
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::domain(format!("grading exponent must be >= 1, got {gamma}")));
        }
        let nf = n as f64;
        let nodes: Vec<f64> = (0..=n)
            .map(|i| {
                if i == n {
                    t_final
                } else {
                    t_final * (i as f64 / nf).powf(gamma)
                }
            })
            .collect();
        let steps = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { t_final, n, gamma, nodes, steps })
    }

    /// Builds a mesh from arbitrary nodes. Used to exercise the property
    /// checks on perturbed meshes; the graded-family invariants need not hold.
    pub fn from_nodes(nodes: Vec<f64>, gamma: f64) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 {
            return Err(Error::domain("nodes must start at 0 and contain at least two entries"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("nodes must be strictly increasing"));
        }
        let n = nodes.len() - 1;
        let steps = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { t_final: nodes[n], n, gamma, nodes, steps })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Number of subintervals `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `τ = T^{1/γ}/N`.
    pub fn tau(&self) -> f64 {
        self.t_final.powf(1.0 / self.gamma) / self.n as f64
    }

    /// Nodes `t_0, ..., t_N`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Node `t_i`.
    pub fn t(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Step `τ_n = t_n - t_{n-1}` for `1 <= n <= N`.
    pub fn step(&self, n: usize) -> f64 {
        self.steps[n - 1]
    }

    /// Steps `τ_1, ..., τ_N`.
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }
}

/// Outcome of [`check_mesh_properties`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeshPropertyReport {
    /// `t_n <= 2^γ t_{n-1}` for all `n >= 2`.
    pub ratio_bound: bool,
    /// `γτ t_{n-1}^{1-1/γ} <= τ_n <= γτ t_n^{1-1/γ}` for all `n >= 2`.
    pub step_bracket: bool,
    /// First index violating either property.
    pub first_violation: Option<usize>,
}

impl MeshPropertyReport {
    pub fn holds(&self) -> bool {
        self.ratio_bound && self.step_bracket
    }
}

/// Checks the two bracketing properties of graded meshes with relative slack `1e-12`.
pub fn check_mesh_properties(mesh: &GradedMesh) -> MeshPropertyReport {
    let g = mesh.gamma();
    let tau = mesh.tau();
    let e = 1.0 - 1.0 / g;
    let ratio = 2f64.powf(g);
    let mut report = MeshPropertyReport {
        ratio_bound: true,
        step_bracket: true,
        first_violation: None,
    };
    for n in 2..=mesh.n() {
        let (tp, tn, tau_n) = (mesh.t(n - 1), mesh.t(n), mesh.step(n));
        let ok_ratio = tn <= ratio * tp * (1.0 + PROPERTY_SLACK);
        let lo = g * tau * tp.powf(e);
        let hi = g * tau * tn.powf(e);
        let ok_bracket =
            lo * (1.0 - PROPERTY_SLACK) <= tau_n && tau_n <= hi * (1.0 + PROPERTY_SLACK);
        report.ratio_bound &= ok_ratio;
        report.step_bracket &= ok_bracket;
        if (!ok_ratio || !ok_bracket) && report.first_violation.is_none() {
            report.first_violation = Some(n);
        }
    }
    report
}

/// Left-hand side of the step-size assumption at step `n`:
/// `8 ω_{α+1}(t_n) ω_{α+1}(τ_n) (2c0²/κ_min + 1)²`.
pub fn step_assumption_lhs(mesh: &GradedMesh, n: usize, alpha: f64, c0: f64, kappa_min: f64) -> f64 {
    let g = gamma(alpha + 1.0);
    let factor = 2.0 * c0 * c0 / kappa_min + 1.0;
    8.0 * mesh.t(n).powf(alpha) / g * mesh.step(n).powf(alpha) / g * factor * factor
}

/// Whether the step-size assumption holds for every step. Diagnostic only.
pub fn check_step_assumption(mesh: &GradedMesh, alpha: f64, c0: f64, kappa_min: f64) -> Result<bool> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(c0 >= 0.0) {
        return Err(Error::domain(format!("drift bound must be nonnegative, got {c0}")));
    }
    if !(kappa_min > 0.0) {
        return Err(Error::domain(format!("diffusivity bound must be positive, got {kappa_min}")));
    }
    Ok((1..=mesh.n()).all(|n| step_assumption_lhs(mesh, n, alpha, c0, kappa_min) <= 1.0))
}
