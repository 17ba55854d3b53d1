//! L1 time stepping.
//!
//! With increments `W^j = U^j - U^{j-1}`, step `n` solves
//!
//! ```text
//! S^n W^n = f^n - (ω_{α+1}(t_n) - ω_{α+1}(t_{n-1})) G^n U^0 - G^n Σ_{j<n} (w(n,j)/τ_j) W^j,
//! S^n = M + τ_n^α/Γ(α+2) G^n,
//! ```
//!
//! where `G^n` is assembled with the drift averaged over `I_n`. At `α = 1`
//! this is the Crank–Nicolson scheme.

use crate::error::{Error, Result};
use crate::fem1d::{assemble_g, assemble_mass, load_vector, project_initial, thomas_solve, BcMode, Projection, SpatialMesh, TriDiagMatrix};
use crate::frackernel::ConvolutionWeights;
use crate::problems::{ProblemSpec, StepLoad};
use crate::quadrature::{GaussRule, LeftPowerRule};
use crate::timegrid::{check_step_assumption, GradedMesh};

/// Discretisation parameters of one solve.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub alpha: f64,
    pub mesh: GradedMesh,
    pub spatial: SpatialMesh,
    pub bc: BcMode,
    pub projection: Projection,
    /// Ignore a problem-supplied exact load and use generic quadrature.
    pub generic_load: bool,
}

impl SolverConfig {
    /// Configuration using the problem's boundary mode and default projection.
    pub fn for_problem(problem: &ProblemSpec, alpha: f64, steps: usize, gamma: f64, elements: usize) -> Result<Self> {
        Ok(Self {
            alpha,
            mesh: GradedMesh::build(problem.t_final, steps, gamma)?,
            spatial: SpatialMesh::new(problem.domain.0, problem.domain.1, elements)?,
            bc: problem.bc,
            projection: problem.projection,
            generic_load: false,
        })
    }
}

/// Initial data, stored increments and the current solution, all over the unknowns.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub u0: Vec<f64>,
    pub history: Vec<Vec<f64>>,
    pub current: Vec<f64>,
}

impl SolverState {
    pub fn new(u0: Vec<f64>) -> Self {
        Self { current: u0.clone(), u0, history: Vec::new() }
    }

    /// Index of the last completed step.
    pub fn step_index(&self) -> usize {
        self.history.len()
    }
}

/// Nodal solutions `U^0, ..., U^N` at every mesh node.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    /// Outcome of the step-size diagnostic (`None` when not applicable, e.g. `α = 1`).
    pub step_assumption: Option<bool>,
}

/// `[∫_{t_prev}^{t_next} ⟨f, φ_p⟩ dt]` by tensor Gauss quadrature.
///
/// Time: four-point Gauss–Jacobi with weight `t^ρ` on an interval starting at
/// zero (when `ρ ≠ 0`), three-point Gauss–Legendre otherwise. Space:
/// four-point Gauss per element.
pub fn assemble_source(problem: &ProblemSpec, spatial: &SpatialMesh, bc: BcMode, t_prev: f64, t_next: f64) -> Result<Vec<f64>> {
    let rho = problem.source_exponent;
    if !(rho > -1.0) {
        return Err(Error::domain(format!("source exponent {rho} is not integrable")));
    }
    let Some(source) = problem.source.as_ref() else {
        return Ok(vec![0.0; spatial.dofs(bc)]);
    };
    let points: Vec<(f64, f64, f64)> = if t_prev == 0.0 && rho != 0.0 {
        LeftPowerRule::new(4, rho)
            .points(t_next)
            .map(|(t, w)| (t, w, t.powf(-rho)))
            .collect()
    } else {
        GaussRule::legendre(3).mapped(t_prev, t_next).map(|(t, w)| (t, w, 1.0)).collect()
    };
    let mut out = vec![0.0; spatial.dofs(bc)];
    for (t, w, scale) in points {
        let part = load_vector(spatial, bc, |x| source(x, t));
        out.iter_mut().zip(part).for_each(|(o, v)| *o += w * scale * v);
    }
    Ok(out)
}

/// Time stepper bound to one problem and configuration.
pub struct Stepper<'a> {
    problem: &'a ProblemSpec,
    config: &'a SolverConfig,
    weights: ConvolutionWeights<'a>,
    mass: TriDiagMatrix,
    load: Option<Box<dyn StepLoad>>,
}

impl<'a> Stepper<'a> {
    pub fn new(problem: &'a ProblemSpec, config: &'a SolverConfig) -> Result<Self> {
        let weights = ConvolutionWeights::new(&config.mesh, config.alpha)?;
        let load = match (&problem.load, config.generic_load) {
            (Some(provider), false) => provider.start(&config.spatial, config.bc, &config.mesh),
            _ => None,
        };
        Ok(Self {
            problem,
            config,
            weights,
            mass: assemble_mass(&config.spatial, config.bc),
            load,
        })
    }

    /// Projected initial data over the unknowns.
    pub fn initial_state(&self) -> Result<SolverState> {
        let p = self.problem;
        let full = project_initial(
            &*p.u0,
            p.du0.as_ref().map(|d| &**d as &dyn Fn(f64) -> f64),
            &*p.kappa,
            &self.config.spatial,
            self.config.bc,
            self.config.projection,
        )?;
        Ok(SolverState::new(self.config.spatial.restrict(self.config.bc, &full)?))
    }

    /// `G^n` with the drift averaged over `I_n`.
    pub fn g_matrix(&self, n: usize) -> Result<TriDiagMatrix> {
        let (t0, t1) = (self.config.mesh.t(n - 1), self.config.mesh.t(n));
        let drift = &self.problem.drift;
        assemble_g(&self.config.spatial, self.config.bc, &*self.problem.kappa, |x| 0.5 * (drift(x, t0) + drift(x, t1)))
    }

    /// Load vector of step `n`.
    pub fn source(&mut self, n: usize) -> Result<Vec<f64>> {
        match self.load.as_mut() {
            Some(load) => load.load(n),
            None => assemble_source(
                self.problem,
                &self.config.spatial,
                self.config.bc,
                self.config.mesh.t(n - 1),
                self.config.mesh.t(n),
            ),
        }
    }

    /// Advances `state` by one step.
    pub fn step(&mut self, state: &mut SolverState) -> Result<()> {
        let n = state.step_index() + 1;
        let run = |this: &mut Self, state: &mut SolverState| -> Result<()> {
            if n > this.config.mesh.n() {
                return Err(Error::Index { index: n, lo: 1, hi: this.config.mesh.n() });
            }
            let g = this.g_matrix(n)?;
            let mut memory: Vec<f64> = state.u0.iter().map(|v| this.weights.initial(n) * v).collect();
            for (j, inc) in state.history.iter().enumerate() {
                let c = this.weights.w(n, j + 1) / this.config.mesh.step(j + 1);
                memory.iter_mut().zip(inc).for_each(|(m, w)| *m += c * w);
            }
            let mut rhs = this.source(n)?;
            let gm = g.mul_vec(&memory)?;
            rhs.iter_mut().zip(&gm).for_each(|(r, v)| *r -= v);
            let system = this.mass.add_scaled(this.weights.diagonal(n), &g);
            let inc = thomas_solve(&system, &rhs)?;
            state.current.iter_mut().zip(&inc).for_each(|(u, w)| *u += w);
            state.history.push(inc);
            Ok(())
        };
        run(self, state).map_err(|e| Error::Step { step: n, source: Box::new(e) })
    }
}

/// Runs all `N` steps from the projected initial data.
pub fn solve(problem: &ProblemSpec, config: &SolverConfig) -> Result<Trajectory> {
    let step_assumption = if config.alpha < 1.0 {
        let ok = check_step_assumption(&config.mesh, config.alpha, problem.drift_bound, problem.kappa_min)?;
        if !ok {
            log::warn!(
                "step-size assumption violated for {} (alpha={}, gamma={}, N={})",
                problem.name,
                config.alpha,
                config.mesh.gamma(),
                config.mesh.n()
            );
        }
        Some(ok)
    } else {
        None
    };
    let mut stepper = Stepper::new(problem, config)?;
    let mut state = stepper.initial_state()?;
    let spatial = &config.spatial;
    let mut values = Vec::with_capacity(config.mesh.n() + 1);
    values.push(spatial.extend(config.bc, &state.current)?);
    for _ in 0..config.mesh.n() {
        stepper.step(&mut state)?;
        values.push(spatial.extend(config.bc, &state.current)?);
    }
    Ok(Trajectory { times: config.mesh.nodes().to_vec(), values, step_assumption })
}
