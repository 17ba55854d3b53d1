//! Gauss rules on `[-1, 1]` and an adaptive Gauss–Kronrod integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::special::gamma;

/// A quadrature rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Gauss–Legendre rule with `n` points (Newton iteration on `P_n`).
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1, "a Gauss rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Gauss–Jacobi rule for the weight `(1 - x)^a (1 + x)^b`, built with the
    /// Golub–Welsch eigenvalue method. Requires `a, b > -1`.
    pub fn jacobi(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 1, "a Gauss rule needs at least one point");
        assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
        let ab = a + b;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        for (k, d) in diag.iter_mut().enumerate() {
            let kf = k as f64;
            *d = if k == 0 {
                (b - a) / (ab + 2.0)
            } else {
                (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
            };
        }
        for (i, o) in off.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            let beta = if i == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * k + ab;
                4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            *o = beta.sqrt();
        }
        let mut jm = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            jm[(i, i)] = diag[i];
            if i + 1 < n {
                jm[(i, i + 1)] = off[i];
                jm[(i + 1, i)] = off[i];
            }
        }
        let mu0 = 2f64.powf(ab + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(ab + 2.0);
        let eig = SymmetricEigen::new(jm);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(Ordering::Equal));
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[lo, hi]` (Legendre rules only).
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Rule for `∫_0^len t^rho g(t) dt ≈ Σ w_i g(t_i)`, `rho > -1`.
#[derive(Debug, Clone)]
pub struct LeftPowerRule {
    rule: GaussRule,
    rho: f64,
}

impl LeftPowerRule {
    pub fn new(n: usize, rho: f64) -> Self {
        Self {
            rule: GaussRule::jacobi(n, 0.0, rho),
            rho,
        }
    }

    pub fn points(&self, len: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * len;
        let scale = half.powf(self.rho + 1.0);
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .map(move |(&x, &w)| (half * (1.0 + x), scale * w))
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let fc = f(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive 15-point Gauss–Kronrod integration over the segments
/// delimited by `breaks` (sorted ascending). Returns `(value, error estimate)`.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_segments: usize,
) -> (f64, f64) {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (value, err) = gk15(&mut f, w[0], w[1]);
            heap.push(Segment { lo: w[0], hi: w[1], value, err });
        }
    }
    loop {
        let total: f64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.err).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) || heap.len() >= max_segments {
            return (total, err);
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => return (0.0, 0.0),
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            heap.push(worst);
            let total: f64 = heap.iter().map(|s| s.value).sum();
            let err: f64 = heap.iter().map(|s| s.err).sum();
            return (total, err);
        }
        let (v1, e1) = gk15(&mut f, worst.lo, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.hi);
        heap.push(Segment { lo: worst.lo, hi: mid, value: v1, err: e1 });
        heap.push(Segment { lo: mid, hi: worst.hi, value: v2, err: e2 });
    }
}
