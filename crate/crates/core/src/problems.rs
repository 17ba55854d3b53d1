//! Manufactured test problems with Fourier–Mittag-Leffler series solutions.
//!
//! Both examples live on `Ω = (0, 1)` with `κ = 1`, `F(x, t) = sin t - x`,
//! `T = 1`, homogeneous Dirichlet data and exact solution
//!
//! ```text
//! u(x, t) = Σ_m c_m sin(λ_m x) E_{α,1}(-λ_m² t^α),   λ_m = (2m+1)π,
//! ```
//!
//! with `c_m = 8 λ_m^{-3}` (example 1, `u0 = x(1-x)`) or
//! `c_m = 4 (-1)^m λ_m^{-2}` (example 2, `u0` the hat function). The source is
//! `f = ∂_x(F ∂_t^{1-α} u)`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem1d::{BcMode, Projection, SpatialMesh};
use crate::frackernel::mittag_leffler;
use crate::quadrature::{GaussRule, LeftPowerRule};
use crate::special::{gamma, CompensatedSum};
use crate::timegrid::GradedMesh;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FieldFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Exact solution of a test problem.
pub trait ExactSolution: Send + Sync {
    fn eval(&self, x: f64, t: f64) -> Result<f64>;

    /// Values at every node of `mesh`.
    fn sample(&self, mesh: &SpatialMesh, t: f64) -> Result<Vec<f64>> {
        mesh.nodes().into_iter().map(|x| self.eval(x, t)).collect()
    }
}

/// Per-step load vectors `[∫_{I_n} ⟨f, φ_p⟩ dt]` over the unknowns.
pub trait StepLoad {
    /// Called for `n = 1, 2, ..., N` in order.
    fn load(&mut self, n: usize) -> Result<Vec<f64>>;
}

/// Supplies a specialised [`StepLoad`] in place of generic quadrature.
pub trait LoadProvider: Send + Sync {
    /// `None` when the configuration is not supported.
    fn start(&self, spatial: &SpatialMesh, bc: BcMode, mesh: &GradedMesh) -> Option<Box<dyn StepLoad>>;
}

/// Data of an initial-boundary value problem.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: (f64, f64),
    pub t_final: f64,
    pub kappa: ScalarFn,
    /// Lower bound of `κ` on the domain.
    pub kappa_min: f64,
    /// Drift `F(x, t)`.
    pub drift: FieldFn,
    /// Upper bound of `|F|`.
    pub drift_bound: f64,
    /// Source `f(x, t)`; `None` means `f ≡ 0`.
    pub source: Option<FieldFn>,
    /// Exponent `ρ` with `f = t^ρ g(x, t)`, `g` smooth.
    pub source_exponent: f64,
    pub u0: ScalarFn,
    pub du0: Option<ScalarFn>,
    pub exact: Option<Arc<dyn ExactSolution>>,
    pub load: Option<Arc<dyn LoadProvider>>,
    pub bc: BcMode,
    pub projection: Projection,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("t_final", &self.t_final)
            .field("bc", &self.bc)
            .field("projection", &self.projection)
            .finish_non_exhaustive()
    }
}

/// Truncation control for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    pub max_terms: usize,
    /// Absolute bound on the neglected tail.
    pub tail_tol: f64,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self { max_terms: 1_000_000, tail_tol: 1e-9 }
    }
}

/// Coefficients `c_m = scale · s_m · λ_m^{-power}`, `s_m = (-1)^m` if alternating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCoefficients {
    pub scale: f64,
    pub power: f64,
    pub alternating: bool,
}

impl SeriesCoefficients {
    pub fn lambda(m: usize) -> f64 {
        (2 * m + 1) as f64 * PI
    }

    pub fn c(&self, m: usize) -> f64 {
        let sign = if self.alternating && m % 2 == 1 { -1.0 } else { 1.0 };
        sign * self.scale * Self::lambda(m).powf(-self.power)
    }

    /// Bound on `Σ_{m≥M} |c_m| E_{α,1}(-λ_m² t^α)` from `E_{α,1}(-z) ≤ Γ(1+α)/z`.
    pub fn tail_bound(&self, first: usize, t: f64, alpha: f64) -> f64 {
        let lam = Self::lambda(first);
        let p = self.power;
        let k = self.scale.abs() * gamma(1.0 + alpha) * t.powf(-alpha);
        k * (lam.powf(-p - 2.0) + lam.powf(-p - 1.0) / (2.0 * PI * (p + 1.0)))
    }

    /// Number of terms after which the tail bound drops below `trunc.tail_tol`.
    pub fn terms_needed(&self, t: f64, alpha: f64, trunc: &SeriesTruncation) -> Result<usize> {
        if self.tail_bound(trunc.max_terms, t, alpha) > trunc.tail_tol {
            return Err(Error::Truncation {
                terms: trunc.max_terms,
                tail: self.tail_bound(trunc.max_terms, t, alpha),
                tol: trunc.tail_tol,
            });
        }
        let (mut lo, mut hi) = (0usize, trunc.max_terms);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.tail_bound(mid, t, alpha) <= trunc.tail_tol {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo.max(1))
    }
}

/// `Σ_m c_m sin(λ_m x) E_{α,1}(-λ_m² t^α)`.
///
/// At `t = 0` the series sums to `u0(x)`, which is returned directly. For
/// `t > 0` the terms are summed with compensation up to the first index whose
/// tail bound is below `trunc.tail_tol`.
pub fn eval_series(
    coeffs: &SeriesCoefficients,
    u0: &dyn Fn(f64) -> f64,
    x: f64,
    t: f64,
    alpha: f64,
    trunc: &SeriesTruncation,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if t < 0.0 {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(u0(x));
    }
    let terms = coeffs.terms_needed(t, alpha, trunc)?;
    let ta = t.powf(alpha);
    let mut sum = CompensatedSum::new();
    for m in 0..terms {
        let lam = SeriesCoefficients::lambda(m);
        sum.add(coeffs.c(m) * (lam * x).sin() * mittag_leffler(alpha, 1.0, -lam * lam * ta)?);
    }
    Ok(sum.value())
}

/// Which manufactured example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Example {
    One,
    Two,
}

impl Example {
    pub fn name(self) -> &'static str {
        match self {
            Example::One => "ex1",
            Example::Two => "ex2",
        }
    }

    fn coefficients(self) -> SeriesCoefficients {
        match self {
            Example::One => SeriesCoefficients { scale: 8.0, power: 3.0, alternating: false },
            Example::Two => SeriesCoefficients { scale: 4.0, power: 2.0, alternating: true },
        }
    }

    fn u0(self, x: f64) -> f64 {
        match self {
            Example::One => x * (1.0 - x),
            Example::Two => {
                if x <= 0.5 {
                    x
                } else {
                    1.0 - x
                }
            }
        }
    }

    fn du0(self, x: f64) -> f64 {
        match self {
            Example::One => 1.0 - 2.0 * x,
            Example::Two => {
                if x < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// `w` with `-w'' = u0`, `w(0) = w(1) = 0`, so that `Σ_m c_m λ_m^{-2} sin(λ_m x) = w(x)`.
    fn w(self, x: f64) -> f64 {
        match self {
            Example::One => x.powi(4) / 12.0 - x.powi(3) / 6.0 + x / 12.0,
            Example::Two => {
                let y = if x <= 0.5 { x } else { 1.0 - x };
                y / 8.0 - y.powi(3) / 6.0
            }
        }
    }
}

/// Shared data of the series problems.
#[derive(Debug, Clone, Copy)]
struct SeriesModel {
    example: Example,
    alpha: f64,
    coeffs: SeriesCoefficients,
    trunc: SeriesTruncation,
}

impl SeriesModel {
    fn e(&self, lam: f64, t: f64) -> Result<f64> {
        mittag_leffler(self.alpha, 1.0, -lam * lam * t.powf(self.alpha))
    }
}

/// Exact solution of an example, with fast nodal sampling on `(0, 1)`.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    model: SeriesModel,
}

impl SeriesSolution {
    pub fn truncation(&self) -> SeriesTruncation {
        self.model.trunc
    }
}

impl ExactSolution for SeriesSolution {
    fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let ex = self.model.example;
        eval_series(&self.model.coeffs, &|y| ex.u0(y), x, t, self.model.alpha, &self.model.trunc)
    }

    fn sample(&self, mesh: &SpatialMesh, t: f64) -> Result<Vec<f64>> {
        let ex = self.model.example;
        if t == 0.0 {
            return Ok(mesh.nodes().into_iter().map(|x| ex.u0(x)).collect());
        }
        if mesh.a() != 0.0 || mesh.b() != 1.0 {
            return mesh.nodes().into_iter().map(|x| self.eval(x, t)).collect();
        }
        let coeffs = self.model.coeffs;
        let terms = coeffs.terms_needed(t, self.model.alpha, &self.model.trunc)?;
        let table = TrigTable::new(mesh.elements());
        let mut acc = vec![CompensatedSum::new(); mesh.node_count()];
        for m in 0..terms {
            let lam = SeriesCoefficients::lambda(m);
            let amp = coeffs.c(m) * self.model.e(lam, t)?;
            table.for_each_node(m, |p, s, _| acc[p].add(amp * s));
        }
        let mut out: Vec<f64> = acc.iter().map(|s| s.value()).collect();
        out[0] = 0.0;
        out[mesh.elements()] = 0.0;
        Ok(out)
    }
}

/// `sin(πk/M_x)` and `cos(πk/M_x)` for `k < 2M_x`, so that
/// `sin(λ_m x_p) = sin[((2m+1)p mod 2M_x)]` on the uniform mesh of `(0, 1)`.
struct TrigTable {
    elements: usize,
    sin: Vec<f64>,
    cos: Vec<f64>,
}

impl TrigTable {
    fn new(elements: usize) -> Self {
        let period = 2 * elements;
        let angle = |k: usize| PI * k as f64 / elements as f64;
        Self {
            elements,
            sin: (0..period).map(|k| angle(k).sin()).collect(),
            cos: (0..period).map(|k| angle(k).cos()).collect(),
        }
    }

    /// Calls `f(p, sin λ_m x_p, cos λ_m x_p)` for every node `p`.
    #[inline]
    fn for_each_node(&self, m: usize, mut f: impl FnMut(usize, f64, f64)) {
        let period = 2 * self.elements;
        let stride = (2 * m + 1) % period;
        let mut k = 0usize;
        for p in 0..=self.elements {
            f(p, self.sin[k], self.cos[k]);
            k += stride;
            if k >= period {
                k -= period;
            }
        }
    }
}

/// Exact load of the series examples.
///
/// With `J = I^α u = w - S`, `S = Σ_m d_m sin(λ_m x) E_m(t)`, `d_m = c_m/λ_m²`,
/// and `H_n = ∫_{I_n} F ∂_t^{1-α}u dt`, integration by parts in time gives
///
/// ```text
/// H_n = Σ_m a_m sin(λ_m x) + x Σ_m b_m sin(λ_m x) - [n = 1] x w(x),
/// a_m = d_m (sin t_{n-1} E_m(t_{n-1}) - sin t_n E_m(t_n) + ∫_{I_n} cos t E_m dt),
/// b_m = d_m (E_m(t_n) - E_m(t_{n-1})),  with E_m(t_0) replaced by 0,
/// ```
///
/// and the load is `-⟨H_n, φ_p'⟩`, whose mode projections are closed-form.
#[derive(Debug, Clone)]
struct SeriesLoadProvider {
    model: SeriesModel,
}

impl LoadProvider for SeriesLoadProvider {
    fn start(&self, spatial: &SpatialMesh, bc: BcMode, mesh: &GradedMesh) -> Option<Box<dyn StepLoad>> {
        if bc != BcMode::Dirichlet || spatial.a() != 0.0 || spatial.b() != 1.0 {
            return None;
        }
        Some(Box::new(SeriesLoad::new(self.model, spatial.clone(), mesh.clone())))
    }
}

struct SeriesLoad {
    model: SeriesModel,
    spatial: SpatialMesh,
    mesh: GradedMesh,
    table: TrigTable,
    /// `E_m(t_{n-1})` from the previous step.
    prev_e: Vec<f64>,
    first_panel: LeftPowerRule,
    panel: GaussRule,
    /// `⟨x w, φ_p'⟩` over the unknowns.
    xw_projection: Vec<f64>,
    gamma1: f64,
}

impl SeriesLoad {
    fn new(model: SeriesModel, spatial: SpatialMesh, mesh: GradedMesh) -> Self {
        let alpha = model.alpha;
        let rule = GaussRule::legendre(4);
        let inv_h = 1.0 / spatial.h();
        let mut xw = vec![0.0; spatial.node_count()];
        for (e, x, wt, _) in spatial.element_points(&rule) {
            let v = wt * x * model.example.w(x) * inv_h;
            xw[e] -= v;
            xw[e + 1] += v;
        }
        let xw_projection = xw[1..spatial.elements()].to_vec();
        Self {
            table: TrigTable::new(spatial.elements()),
            model,
            spatial,
            mesh,
            prev_e: Vec::new(),
            first_panel: LeftPowerRule::new(8, 1.0 / alpha - 1.0),
            panel: GaussRule::legendre(8),
            xw_projection,
            gamma1: gamma(1.0 + alpha),
        }
    }

    /// `∫_{t_a}^{t_b} cos t E_{α,1}(-λ² t^α) dt` in the variable `s = t^α`, on panels
    /// that resolve the scale `1/λ²` and grow geometrically beyond it.
    fn cos_moment(&self, lam: f64, t_a: f64, t_b: f64) -> Result<f64> {
        let alpha = self.model.alpha;
        let inv_alpha = 1.0 / alpha;
        let (s_a, s_b) = (t_a.powf(alpha), t_b.powf(alpha));
        let scale = 1.0 / (lam * lam);
        let z = lam * lam;
        let mut sum = CompensatedSum::new();
        let mut u = s_a;
        while u < s_b {
            let v = (u + u.max(scale)).min(s_b);
            if u == 0.0 {
                for (s, w) in self.first_panel.points(v) {
                    let t = s.powf(inv_alpha);
                    sum.add(w * inv_alpha * t.cos() * mittag_leffler(alpha, 1.0, -z * s)?);
                }
            } else {
                for (s, w) in self.panel.mapped(u, v) {
                    let t = s.powf(inv_alpha);
                    let jac = inv_alpha * s.powf(inv_alpha - 1.0);
                    sum.add(w * jac * t.cos() * mittag_leffler(alpha, 1.0, -z * s)?);
                }
            }
            u = v;
        }
        Ok(sum.value())
    }

    /// `min(1, Γ(1+α)/(λ² t^α))`, a bound on `E_m(t)`.
    fn e_bound(&self, lam: f64, t: f64) -> f64 {
        if t == 0.0 {
            return 1.0;
        }
        (self.gamma1 / (lam * lam * t.powf(self.model.alpha))).min(1.0)
    }

    /// Bound on the contribution of mode `m` to any load entry.
    fn mode_bound(&self, n: usize, lam: f64, d: f64) -> f64 {
        let (t0, t1) = (self.mesh.t(n - 1), self.mesh.t(n));
        let alpha = self.model.alpha;
        let moment = if n == 1 {
            (self.gamma1 * t1.powf(1.0 - alpha) / ((1.0 - alpha) * lam * lam)).min(t1)
        } else {
            (t1 - t0) * self.e_bound(lam, t0)
        };
        let e = if n == 1 {
            self.e_bound(lam, t1)
        } else {
            self.e_bound(lam, t1) + self.e_bound(lam, t0)
        };
        2.0 * d.abs() * (2.0 * e + moment)
    }
}

impl StepLoad for SeriesLoad {
    fn load(&mut self, n: usize) -> Result<Vec<f64>> {
        let (t0, t1) = (self.mesh.t(n - 1), self.mesh.t(n));
        let h = self.spatial.h();
        let coeffs = self.model.coeffs;
        let alpha = self.model.alpha;
        let tol = 1e-12 * h;
        let decay = coeffs.power + 4.0;
        let nodes = self.spatial.node_count();
        let mut acc_cos = vec![0.0; nodes];
        let mut acc_xcos = vec![0.0; nodes];
        let mut acc_sin = vec![0.0; nodes];
        let (sin0, sin1) = (t0.sin(), t1.sin());
        let mut m = 0usize;
        loop {
            let lam = SeriesCoefficients::lambda(m);
            let d = coeffs.c(m) / (lam * lam);
            let e_prev = if n == 1 {
                0.0
            } else if m < self.prev_e.len() {
                self.prev_e[m]
            } else {
                self.model.e(lam, t0)?
            };
            let e_next = self.model.e(lam, t1)?;
            if m < self.prev_e.len() {
                self.prev_e[m] = e_next;
            } else {
                self.prev_e.push(e_next);
            }
            let a = d * (sin0 * e_prev - sin1 * e_next + self.cos_moment(lam, t0, t1)?);
            let b = d * (e_next - e_prev);
            let s = (0.5 * lam * h).sin();
            let s2 = s * s;
            let ca = a * 4.0 * s2 / (lam * h);
            let cb = b * 4.0 * s2 / (lam * h);
            let cs = b * (2.0 * (lam * h).sin() / lam - 4.0 * s2 / (lam * lam * h));
            self.table.for_each_node(m, |p, sn, cs_| {
                acc_cos[p] += ca * cs_;
                acc_xcos[p] += cb * cs_;
                acc_sin[p] += cs * sn;
            });
            let bound = self.mode_bound(n, lam, d);
            let past_crossover = lam * lam * t0.max(t1 * 0.5).powf(alpha) >= self.gamma1;
            if past_crossover && bound * (1.0 + lam / (2.0 * PI * (decay - 1.0))) < tol {
                break;
            }
            m += 1;
            if m >= self.model.trunc.max_terms {
                return Err(Error::Truncation { terms: m, tail: bound, tol });
            }
        }
        self.prev_e.truncate(m + 1);
        let mut out: Vec<f64> = (1..self.spatial.elements())
            .map(|p| acc_cos[p] + self.spatial.x(p) * acc_xcos[p] + acc_sin[p])
            .collect();
        if n == 1 {
            out.iter_mut().zip(&self.xw_projection).for_each(|(o, v)| *o += v);
        }
        Ok(out)
    }
}

/// `f(x,t) = t^{α-1} Σ_m c_m [λ_m cos(λ_m x)(sin t - x) - sin(λ_m x)] E_{α,α}(-λ_m² t^α)`.
///
/// The sum stops once the terms stay negligible past the mode where
/// `λ_m² t^α` exceeds 1; intended for spot checks and generic quadrature.
fn pointwise_source(model: &SeriesModel, x: f64, t: f64) -> f64 {
    let alpha = model.alpha;
    let ta = t.powf(alpha);
    let mut sum = CompensatedSum::new();
    let mut quiet = 0;
    for m in 0..model.trunc.max_terms {
        let lam = SeriesCoefficients::lambda(m);
        let e = mittag_leffler(alpha, alpha, -lam * lam * ta).unwrap_or(0.0);
        let term = model.coeffs.c(m) * (lam * (lam * x).cos() * (t.sin() - x) - (lam * x).sin()) * e;
        sum.add(term);
        if lam * lam * ta > 1.0 && term.abs() <= 1e-17 * sum.value().abs().max(1e-300) {
            quiet += 1;
            if quiet >= 20 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    t.powf(alpha - 1.0) * sum.value()
}

/// Source of an example, `f(x, t)`, for `t > 0`.
pub fn example_source(example: Example, alpha: f64, x: f64, t: f64) -> f64 {
    let model = SeriesModel {
        example,
        alpha,
        coeffs: example.coefficients(),
        trunc: SeriesTruncation::default(),
    };
    pointwise_source(&model, x, t)
}

fn build(example: Example, alpha: f64, trunc: SeriesTruncation) -> Result<ProblemSpec> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let model = SeriesModel { example, alpha, coeffs: example.coefficients(), trunc };
    let source_model = model;
    Ok(ProblemSpec {
        name: example.name().to_string(),
        domain: (0.0, 1.0),
        t_final: 1.0,
        kappa: Arc::new(|_| 1.0),
        kappa_min: 1.0,
        drift: Arc::new(|x, t| t.sin() - x),
        drift_bound: 1.0 + 1f64.sin(),
        source: Some(Arc::new(move |x, t| pointwise_source(&source_model, x, t))),
        source_exponent: alpha - 1.0,
        u0: Arc::new(move |x| example.u0(x)),
        du0: Some(Arc::new(move |x| example.du0(x))),
        exact: Some(Arc::new(SeriesSolution { model })),
        load: Some(Arc::new(SeriesLoadProvider { model })),
        bc: BcMode::Dirichlet,
        projection: match example {
            Example::One => Projection::Ritz,
            Example::Two => Projection::Nodal,
        },
    })
}

/// Example 1: `u0 = x(1-x)`, `c_m = 8 λ_m^{-3}`.
pub fn example1(alpha: f64) -> Result<ProblemSpec> {
    build(Example::One, alpha, SeriesTruncation::default())
}

/// Example 2: hat-function initial data, `c_m = 4 (-1)^m λ_m^{-2}`.
pub fn example2(alpha: f64) -> Result<ProblemSpec> {
    build(Example::Two, alpha, SeriesTruncation::default())
}

/// Either example with a custom truncation of the exact solution.
pub fn example_with(example: Example, alpha: f64, trunc: SeriesTruncation) -> Result<ProblemSpec> {
    build(example, alpha, trunc)
}
