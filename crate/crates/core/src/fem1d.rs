//! Continuous piecewise-linear finite elements on a uniform 1D mesh.
//!
//! Vectors exchanged with the time stepper live in degree-of-freedom space:
//! interior nodes only for [`BcMode::Dirichlet`], all nodes for
//! [`BcMode::ZeroFlux`]. Nodal vectors covering every mesh node are converted
//! with [`SpatialMesh::restrict`] and [`SpatialMesh::extend`].

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

/// Boundary treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BcMode {
    /// Homogeneous Dirichlet conditions; boundary nodes are eliminated.
    Dirichlet,
    /// Zero total flux; boundary nodes are unknowns and no boundary term appears.
    ZeroFlux,
}

/// Initial projection onto the finite element space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projection {
    Ritz,
    L2,
    Nodal,
}

/// Uniform mesh `x_p = a + p h`, `h = (b - a) / M_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMesh {
    a: f64,
    b: f64,
    elements: usize,
    h: f64,
}

impl SpatialMesh {
    pub fn new(a: f64, b: f64, elements: usize) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!("invalid interval ({a}, {b})")));
        }
        if elements < 2 {
            return Err(Error::domain("the spatial mesh needs at least two elements"));
        }
        Ok(Self { a, b, elements, h: (b - a) / elements as f64 })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Element count `M_x`.
    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node_count(&self) -> usize {
        self.elements + 1
    }

    /// Node `x_p`; the last node is `b` exactly.
    pub fn x(&self, p: usize) -> f64 {
        if p == self.elements {
            self.b
        } else {
            self.a + p as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.elements).map(|p| self.x(p)).collect()
    }

    /// Number of unknowns `d_h`.
    pub fn dofs(&self, bc: BcMode) -> usize {
        match bc {
            BcMode::Dirichlet => self.elements - 1,
            BcMode::ZeroFlux => self.elements + 1,
        }
    }

    /// Mesh node carrying unknown `i`.
    pub fn dof_node(&self, bc: BcMode, i: usize) -> usize {
        match bc {
            BcMode::Dirichlet => i + 1,
            BcMode::ZeroFlux => i,
        }
    }

    /// Unknowns of a full nodal vector.
    pub fn restrict(&self, bc: BcMode, full: &[f64]) -> Result<Vec<f64>> {
        check_len(self.node_count(), full.len())?;
        Ok(match bc {
            BcMode::Dirichlet => full[1..self.elements].to_vec(),
            BcMode::ZeroFlux => full.to_vec(),
        })
    }

    /// Full nodal vector from unknowns (zero boundary values for Dirichlet).
    pub fn extend(&self, bc: BcMode, dofs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dofs(bc), dofs.len())?;
        Ok(match bc {
            BcMode::Dirichlet => {
                let mut full = Vec::with_capacity(self.node_count());
                full.push(0.0);
                full.extend_from_slice(dofs);
                full.push(0.0);
                full
            }
            BcMode::ZeroFlux => dofs.to_vec(),
        })
    }

    /// Gauss points and weights of every element, `(element, x, weight)`.
    pub(crate) fn element_points<'r>(&'r self, rule: &'r GaussRule) -> impl Iterator<Item = (usize, f64, f64, f64)> + 'r {
        (0..self.elements).flat_map(move |e| {
            let (xl, xr) = (self.x(e), self.x(e + 1));
            rule.mapped(xl, xr).map(move |(x, w)| {
                let s = (x - xl) / (xr - xl);
                (e, x, w, s)
            })
        })
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// Tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiagMatrix {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl TriDiagMatrix {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::domain("empty tridiagonal matrix"));
        }
        check_len(n - 1, sub.len())?;
        check_len(n - 1, sup.len())?;
        Ok(Self { sub, diag, sup })
    }

    pub fn zeros(n: usize) -> Self {
        Self { sub: vec![0.0; n - 1], diag: vec![0.0; n], sup: vec![0.0; n - 1] }
    }

    pub fn identity(n: usize) -> Self {
        Self { sub: vec![0.0; n - 1], diag: vec![1.0; n], sup: vec![0.0; n - 1] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.sup[i]
        } else if i == j + 1 {
            self.sub[j]
        } else {
            0.0
        }
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: f64, other: &TriDiagMatrix) -> TriDiagMatrix {
        let comb = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a + c * b).collect();
        TriDiagMatrix {
            sub: comb(&self.sub, &other.sub),
            diag: comb(&self.diag, &other.diag),
            sup: comb(&self.sup, &other.sup),
        }
    }

    pub fn transpose(&self) -> TriDiagMatrix {
        TriDiagMatrix { sub: self.sup.clone(), diag: self.diag.clone(), sup: self.sub.clone() }
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim()];
        self.mul_vec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let n = self.dim();
        check_len(n, x.len())?;
        check_len(n, y.len())?;
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.sup[i] * x[i + 1];
            }
            y[i] = v;
        }
        Ok(())
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Keeps rows and columns `1..n-1`.
    fn drop_ends(&self) -> TriDiagMatrix {
        let n = self.dim();
        TriDiagMatrix {
            sub: self.sub[1..n - 2].to_vec(),
            diag: self.diag[1..n - 1].to_vec(),
            sup: self.sup[1..n - 2].to_vec(),
        }
    }

    fn restricted(self, bc: BcMode) -> TriDiagMatrix {
        match bc {
            BcMode::Dirichlet => self.drop_ends(),
            BcMode::ZeroFlux => self,
        }
    }
}

/// Solves `A x = rhs` by the Thomas algorithm (no pivoting).
pub fn thomas_solve(a: &TriDiagMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    check_len(n, rhs.len())?;
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut prev_c = 0.0;
    let mut prev_d = 0.0;
    for i in 0..n {
        let sub = if i > 0 { a.sub[i - 1] } else { 0.0 };
        let sup = if i + 1 < n { a.sup[i] } else { 0.0 };
        let pivot = a.diag[i] - sub * prev_c;
        let scale = a.diag[i].abs().max(sub.abs()).max(sup.abs());
        if !(pivot.abs() > 1e3 * f64::EPSILON * scale) || !pivot.is_finite() {
            return Err(Error::ZeroPivot { row: i });
        }
        c[i] = sup / pivot;
        d[i] = (rhs[i] - sub * prev_d) / pivot;
        prev_c = c[i];
        prev_d = d[i];
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Mass matrix `[⟨φ_q, φ_p⟩]`, element matrices `h/6 [2 1; 1 2]`.
pub fn assemble_mass(mesh: &SpatialMesh, bc: BcMode) -> TriDiagMatrix {
    let n = mesh.node_count();
    let h = mesh.h();
    let mut m = TriDiagMatrix::zeros(n);
    for e in 0..mesh.elements() {
        m.diag[e] += h / 3.0;
        m.diag[e + 1] += h / 3.0;
        m.sup[e] += h / 6.0;
        m.sub[e] += h / 6.0;
    }
    m.restricted(bc)
}

/// `[⟨κ φ_q', φ_p'⟩ - ⟨F̄ φ_q, φ_p'⟩]` with two-point Gauss quadrature per element.
pub fn assemble_g(
    mesh: &SpatialMesh,
    bc: BcMode,
    kappa: impl Fn(f64) -> f64,
    drift: impl Fn(f64) -> f64,
) -> Result<TriDiagMatrix> {
    let n = mesh.node_count();
    let inv_h = 1.0 / mesh.h();
    let rule = GaussRule::legendre(2);
    let mut g = TriDiagMatrix::zeros(n);
    let dphi = [-inv_h, inv_h];
    for (e, x, w, s) in mesh.element_points(&rule) {
        let k = kappa(x);
        if !(k > 0.0) {
            return Err(Error::domain(format!("diffusivity must be positive, got {k} at x = {x}")));
        }
        let f = drift(x);
        let phi = [1.0 - s, s];
        let mut local = [[0.0; 2]; 2];
        for (pa, row) in local.iter_mut().enumerate() {
            for (qb, entry) in row.iter_mut().enumerate() {
                *entry = w * (k * dphi[qb] * dphi[pa] - f * phi[qb] * dphi[pa]);
            }
        }
        g.diag[e] += local[0][0];
        g.diag[e + 1] += local[1][1];
        g.sup[e] += local[0][1];
        g.sub[e] += local[1][0];
    }
    Ok(g.restricted(bc))
}

/// `[∫ f φ_p]` over the unknowns, four-point Gauss per element.
pub fn load_vector(mesh: &SpatialMesh, bc: BcMode, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let rule = GaussRule::legendre(4);
    let mut full = vec![0.0; mesh.node_count()];
    for (e, x, w, s) in mesh.element_points(&rule) {
        let v = w * f(x);
        full[e] += v * (1.0 - s);
        full[e + 1] += v * s;
    }
    match bc {
        BcMode::Dirichlet => full[1..mesh.elements()].to_vec(),
        BcMode::ZeroFlux => full,
    }
}

/// `L2(a, b)` norm of the piecewise-linear interpolant of nodal `values`.
pub fn l2_norm(values: &[f64], mesh: &SpatialMesh) -> Result<f64> {
    check_len(mesh.node_count(), values.len())?;
    let rule = GaussRule::legendre(2);
    let mut sum = 0.0;
    for (e, _, w, s) in mesh.element_points(&rule) {
        let v = values[e] * (1.0 - s) + values[e + 1] * s;
        sum += w * v * v;
    }
    Ok(sum.sqrt())
}

/// `∫_a^b` of the piecewise-linear interpolant of nodal `values`.
pub fn integral(values: &[f64], mesh: &SpatialMesh) -> Result<f64> {
    check_len(mesh.node_count(), values.len())?;
    let n = values.len();
    let inner: f64 = values[1..n - 1].iter().sum();
    Ok(mesh.h() * (inner + 0.5 * (values[0] + values[n - 1])))
}

/// Projects `u0` onto the finite element space and returns nodal values at
/// every mesh node.
///
/// The Ritz projection uses `du0` for `u0'` when supplied and fourth-order
/// central differences otherwise. Under [`BcMode::ZeroFlux`] the Ritz
/// projection is fixed up to a constant, chosen so that the mean of `u0` is
/// preserved.
pub fn project_initial(
    u0: &dyn Fn(f64) -> f64,
    du0: Option<&dyn Fn(f64) -> f64>,
    kappa: &dyn Fn(f64) -> f64,
    mesh: &SpatialMesh,
    bc: BcMode,
    mode: Projection,
) -> Result<Vec<f64>> {
    match mode {
        Projection::Nodal => {
            let mut v: Vec<f64> = mesh.nodes().into_iter().map(u0).collect();
            if bc == BcMode::Dirichlet {
                v[0] = 0.0;
                *v.last_mut().expect("nonempty mesh") = 0.0;
            }
            Ok(v)
        }
        Projection::L2 => {
            let m = assemble_mass(mesh, bc);
            let rhs = load_vector(mesh, bc, u0);
            mesh.extend(bc, &thomas_solve(&m, &rhs)?)
        }
        Projection::Ritz => ritz(u0, du0, kappa, mesh, bc),
    }
}

fn ritz(
    u0: &dyn Fn(f64) -> f64,
    du0: Option<&dyn Fn(f64) -> f64>,
    kappa: &dyn Fn(f64) -> f64,
    mesh: &SpatialMesh,
    bc: BcMode,
) -> Result<Vec<f64>> {
    let delta = 0.02 * mesh.h();
    let fd = |x: f64| {
        (8.0 * (u0(x + delta) - u0(x - delta)) - (u0(x + 2.0 * delta) - u0(x - 2.0 * delta))) / (12.0 * delta)
    };
    let deriv = |x: f64| match du0 {
        Some(d) => d(x),
        None => fd(x),
    };
    let rule = GaussRule::legendre(4);
    let inv_h = 1.0 / mesh.h();
    let mut rhs = vec![0.0; mesh.node_count()];
    for (e, x, w, _) in mesh.element_points(&rule) {
        let v = w * kappa(x) * deriv(x) * inv_h;
        rhs[e] -= v;
        rhs[e + 1] += v;
    }
    let k = assemble_g(mesh, BcMode::ZeroFlux, kappa, |_| 0.0)?;
    match bc {
        BcMode::Dirichlet => {
            let sol = thomas_solve(&k.drop_ends(), &rhs[1..mesh.elements()])?;
            mesh.extend(bc, &sol)
        }
        BcMode::ZeroFlux => {
            let n = mesh.node_count();
            let reduced = TriDiagMatrix {
                sub: k.sub[1..].to_vec(),
                diag: k.diag[1..].to_vec(),
                sup: k.sup[1..].to_vec(),
            };
            let mut full = vec![0.0; n];
            full[1..].copy_from_slice(&thomas_solve(&reduced, &rhs[1..])?);
            let target: f64 = load_vector(mesh, BcMode::ZeroFlux, u0).iter().sum();
            let shift = (target - integral(&full, mesh)?) / (mesh.b() - mesh.a());
            full.iter_mut().for_each(|v| *v += shift);
            Ok(full)
        }
    }
}
