//! Rothe-method time stepping and the per-step Newton solver.
//!
//! Each step assembles the semi-implicit system at the previous state and
//! solves the nonlinear algebraic system for the next one with a damped
//! Newton iteration using the analytic Jacobian and a sparse direct
//! factorization. An iteration count of zero means the previous state
//! already satisfied the step equations to tolerance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{self, AssemblyError, BlockSystem, NodalState};
use crate::materials::ConstitutiveModel;
use crate::mesh::Mesh;
use crate::scenario::Scenario;
use crate::sparse::{DirectSolver, SparseError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Time step [s].
    pub dt: f64,
    /// Simulated duration [s]; must be a multiple of dt.
    pub t_end: f64,
    /// Newton residual tolerance, relative to max(1, ||F||).
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Damping factor in (0, 1]; 1 disables backtracking.
    pub relaxation: f64,
    /// Retry a failed step with halved dt (exploratory; off by default).
    pub retry_halve_dt: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 5.0,
            t_end: 3600.0,
            newton_tol: 1e-8,
            newton_max_iter: 25,
            relaxation: 1.0,
            retry_halve_dt: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(format!("t_end must be positive, got {}", self.t_end));
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > 1e-6 * steps.max(1.0) {
            return Err(format!(
                "t_end = {} must be an integer multiple of dt = {}",
                self.t_end, self.dt
            ));
        }
        if !(self.newton_tol > 0.0) {
            return Err(format!("newton_tol must be positive, got {}", self.newton_tol));
        }
        if self.newton_max_iter == 0 {
            return Err("newton_max_iter must be at least 1".to_string());
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(format!("relaxation must lie in (0, 1], got {}", self.relaxation));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    /// Time reached by this solve [s].
    pub time: f64,
    /// Linear solves performed.
    pub newton_iters: usize,
    /// Final residual 2-norm.
    pub residual_norm: f64,
    /// Final residual norm over max(1, ||F||).
    pub residual_rel: f64,
}

/// Snapshots and per-step diagnostics of one run.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    /// (time [s], state), strictly increasing starting at 0.
    pub snapshots: Vec<(f64, NodalState)>,
    pub diagnostics: Vec<StepDiagnostics>,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("linear solve failed: {0}")]
    Linear(#[from] SparseError),
    #[error("no convergence after {iterations} Newton iterations, residual {residual:.3e}")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("step {step} (t = {time} s): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<SolverError>,
    },
}

/// A completed or halted run; on failure the trajectory holds everything
/// up to the last successful step.
#[derive(Debug)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub failure: Option<SolverError>,
}

/// Events streamed to the run observer as they happen.
pub enum RunEvent<'a> {
    Step(&'a StepDiagnostics),
    Snapshot { time: f64, state: &'a NodalState },
}

/// Uniform state satisfying the nodal isotherm constraint w = Phi(theta, P).
pub fn initial_state(mesh: &Mesh, model: &ConstitutiveModel, theta_0: f64, p_0: f64) -> NodalState {
    let w = model.sorption_isotherm(theta_0, p_0).w;
    NodalState::uniform(mesh.n_nodes(), w, theta_0, p_0)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn apply_update(x: &NodalState, dx: &[f64], s: f64) -> NodalState {
    let n = x.len();
    let mut next = x.clone();
    for i in 0..n {
        next.w[i] -= s * dx[i];
        next.theta[i] -= s * dx[n + i];
        next.p[i] -= s * dx[2 * n + i];
    }
    next
}

/// Newton iteration for one step system. Returns the next state along
/// with (iterations, final residual norm, normalization scale).
pub fn newton_solve(
    x_n: &NodalState,
    sys: &BlockSystem<'_>,
    cfg: &SolverConfig,
    linear: &mut DirectSolver,
) -> Result<(NodalState, usize, f64, f64), SolverError> {
    let scale = sys.f_norm.max(1.0);
    let mut x = x_n.clone();
    let mut r = sys.residual(&x, x_n)?;
    let mut rnorm = norm2(&r);
    let mut iters = 0usize;
    while rnorm > cfg.newton_tol * scale {
        if iters >= cfg.newton_max_iter {
            return Err(SolverError::NonConvergence { iterations: iters, residual: rnorm });
        }
        let jac = sys.jacobian(&x)?;
        let dx = linear.solve(&jac, &r)?;
        let mut s = 1.0;
        let mut x_trial = apply_update(&x, &dx, s);
        let mut r_trial = sys.residual(&x_trial, x_n)?;
        let mut r_trial_norm = norm2(&r_trial);
        if cfg.relaxation < 1.0 {
            let mut backtracks = 0;
            while r_trial_norm >= rnorm && backtracks < 4 {
                s *= cfg.relaxation;
                x_trial = apply_update(&x, &dx, s);
                r_trial = sys.residual(&x_trial, x_n)?;
                r_trial_norm = norm2(&r_trial);
                backtracks += 1;
            }
        }
        x = x_trial;
        r = r_trial;
        rnorm = r_trial_norm;
        iters += 1;
    }
    Ok((x, iters, rnorm, scale))
}

/// Advance from `state` at `t0` by `dt`, optionally bisecting on
/// non-convergence. Appends one diagnostics record per committed solve.
#[allow(clippy::too_many_arguments)]
fn advance(
    mesh: &Mesh,
    model: &ConstitutiveModel,
    scenario: &Scenario,
    cfg: &SolverConfig,
    linear: &mut DirectSolver,
    state: NodalState,
    t0: f64,
    dt: f64,
    depth: usize,
    step: usize,
    diagnostics: &mut Vec<StepDiagnostics>,
) -> Result<NodalState, SolverError> {
    let t_next = t0 + dt;
    let sys = assembly::assemble(
        mesh,
        model,
        scenario.boundary_params(),
        scenario.boundary_values(t_next),
        &state,
        dt,
    )?;
    match newton_solve(&state, &sys, cfg, linear) {
        Ok((next, iters, rnorm, scale)) => {
            diagnostics.push(StepDiagnostics {
                step,
                time: t_next,
                newton_iters: iters,
                residual_norm: rnorm,
                residual_rel: rnorm / scale,
            });
            Ok(next)
        }
        Err(SolverError::NonConvergence { .. }) if cfg.retry_halve_dt && depth < 4 => {
            let half = 0.5 * dt;
            let mid = advance(
                mesh, model, scenario, cfg, linear, state, t0, half, depth + 1, step, diagnostics,
            )?;
            advance(
                mesh,
                model,
                scenario,
                cfg,
                linear,
                mid,
                t0 + half,
                half,
                depth + 1,
                step,
                diagnostics,
            )
        }
        Err(e) => Err(e),
    }
}

/// Run the scenario from its initial state to t_end, emitting `RunEvent`s
/// as steps complete and snapshots are recorded. A step failure halts the
/// run; the partial trajectory is preserved in the outcome.
pub fn run<F>(
    mesh: &Mesh,
    model: &ConstitutiveModel,
    scenario: &Scenario,
    cfg: &SolverConfig,
    mut observer: F,
) -> RunOutcome
where
    F: FnMut(RunEvent<'_>),
{
    let mut trajectory = Trajectory::default();
    let mut state = initial_state(mesh, model, scenario.init.theta_0, scenario.init.p_0);
    let mut linear = DirectSolver::new();

    observer(RunEvent::Snapshot { time: 0.0, state: &state });
    trajectory.snapshots.push((0.0, state.clone()));

    let cadence = scenario.output.snapshot_every;
    let mut next_due = if cadence > 0.0 { cadence } else { f64::INFINITY };
    let n_steps = cfg.n_steps();
    for step in 1..=n_steps {
        let t0 = (step - 1) as f64 * cfg.dt;
        let t_next = step as f64 * cfg.dt;
        let before = trajectory.diagnostics.len();
        match advance(
            mesh,
            model,
            scenario,
            cfg,
            &mut linear,
            state,
            t0,
            cfg.dt,
            0,
            step,
            &mut trajectory.diagnostics,
        ) {
            Ok(next) => {
                state = next;
                for d in &trajectory.diagnostics[before..] {
                    observer(RunEvent::Step(d));
                }
            }
            Err(source) => {
                let failure = SolverError::Step { step, time: t_next, source: Box::new(source) };
                return RunOutcome { trajectory, failure: Some(failure) };
            }
        }
        if t_next + 1e-9 >= next_due || step == n_steps {
            observer(RunEvent::Snapshot { time: t_next, state: &state });
            trajectory.snapshots.push((t_next, state.clone()));
            while next_due <= t_next + 1e-9 {
                next_due += cadence;
            }
        }
    }
    RunOutcome { trajectory, failure: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::FireCurve;

    fn ambient_scenario(nx: usize, ny: usize) -> Scenario {
        let mut s = Scenario::default();
        s.mesh.nx = nx;
        s.mesh.ny = ny;
        s.fire.curve = FireCurve::Constant;
        s.fire.theta_inf = s.init.theta_0;
        s
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let mut c = SolverConfig::default();
        c.dt = 0.0;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::default();
        c.t_end = 12.0;
        c.dt = 5.0;
        assert!(c.validate().unwrap_err().contains("multiple"));
        let mut c = SolverConfig::default();
        c.relaxation = 0.0;
        assert!(c.validate().is_err());
        assert_eq!(SolverConfig::default().n_steps(), 720);
    }

    #[test]
    fn ambient_fixed_point_converges_without_iterations() {
        let scenario = ambient_scenario(3, 3);
        let mesh = scenario.build_mesh().unwrap();
        let model = scenario.constitutive_model().unwrap();
        let x0 = initial_state(&mesh, &model, 298.15, 2754.2);
        let sys = assembly::assemble(
            &mesh,
            &model,
            scenario.boundary_params(),
            scenario.boundary_values(5.0),
            &x0,
            5.0,
        )
        .unwrap();
        let r = sys.residual(&x0, &x0).unwrap();
        let inf = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(inf < 1e-10, "fixed-point residual {inf}");
        let mut linear = DirectSolver::new();
        let (x, iters, ..) = newton_solve(&x0, &sys, &SolverConfig::default(), &mut linear).unwrap();
        assert_eq!(iters, 0);
        assert_eq!(x, x0);
    }

    #[test]
    fn steady_ambient_run_preserves_state() {
        let mut scenario = ambient_scenario(4, 4);
        scenario.solver.t_end = 50.0;
        scenario.output.snapshot_every = 10.0;
        let mesh = scenario.build_mesh().unwrap();
        let model = scenario.constitutive_model().unwrap();
        let cfg = scenario.solver;
        let out = run(&mesh, &model, &scenario, &cfg, |_| {});
        assert!(out.failure.is_none());
        let times: Vec<f64> = out.trajectory.snapshots.iter().map(|(t, _)| *t).collect();
        assert_eq!(times, vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0]);
        assert_eq!(out.trajectory.diagnostics.len(), 10);
        let x0 = &out.trajectory.snapshots[0].1;
        for (_, xt) in &out.trajectory.snapshots {
            for i in 0..x0.len() {
                assert!((xt.w[i] - x0.w[i]).abs() <= 1e-10 * x0.w[i].abs());
                assert!((xt.theta[i] - x0.theta[i]).abs() <= 1e-10 * x0.theta[i]);
                assert!((xt.p[i] - x0.p[i]).abs() <= 1e-10 * x0.p[i]);
            }
        }
    }

    #[test]
    fn fire_run_heats_boundary_monotonically() {
        let mut scenario = Scenario::default();
        scenario.mesh.nx = 6;
        scenario.mesh.ny = 6;
        scenario.solver.t_end = 60.0;
        scenario.output.snapshot_every = 15.0;
        let mesh = scenario.build_mesh().unwrap();
        let model = scenario.constitutive_model().unwrap();
        let cfg = scenario.solver;
        let out = run(&mesh, &model, &scenario, &cfg, |_| {});
        assert!(out.failure.is_none(), "{:?}", out.failure);
        // Corner node 0 lies on the fire boundary.
        let corner: Vec<f64> = out.trajectory.snapshots.iter().map(|(_, s)| s.theta[0]).collect();
        for pair in corner.windows(2) {
            assert!(pair[1] > pair[0], "boundary cooling: {corner:?}");
        }
        for d in &out.trajectory.diagnostics {
            assert!(d.residual_rel <= 1e-8);
            assert!(d.newton_iters <= 15, "step {} took {}", d.step, d.newton_iters);
        }
    }

    #[test]
    fn newton_converges_quadratically_near_root() {
        // Constant-fire scenario: radiation and the isotherm make the step
        // system genuinely nonlinear. Converge once, perturb, then watch
        // successive residual norms contract with order about 2.
        let mut scenario = Scenario::default();
        scenario.mesh.nx = 2;
        scenario.mesh.ny = 2;
        scenario.fire.curve = FireCurve::Constant;
        scenario.fire.theta_inf = 700.0;
        let mesh = scenario.build_mesh().unwrap();
        let model = scenario.constitutive_model().unwrap();
        let x0 = initial_state(&mesh, &model, 298.15, 2754.2);
        let sys = assembly::assemble(
            &mesh,
            &model,
            scenario.boundary_params(),
            scenario.boundary_values(5.0),
            &x0,
            5.0,
        )
        .unwrap();
        let cfg = SolverConfig { newton_tol: 1e-13, ..SolverConfig::default() };
        let mut linear = DirectSolver::new();
        let (root, ..) = newton_solve(&x0, &sys, &cfg, &mut linear).unwrap();

        let mut x = root.clone();
        for i in 0..x.len() {
            x.theta[i] += 2.0;
            x.p[i] *= 1.02;
            x.w[i] *= 1.01;
        }
        let scale = sys.f_norm.max(1.0);
        let mut norms = Vec::new();
        let mut r = sys.residual(&x, &x0).unwrap();
        loop {
            let rn = norm2(&r);
            norms.push(rn);
            if rn <= 1e-12 * scale || norms.len() > 12 {
                break;
            }
            let jac = sys.jacobian(&x).unwrap();
            let dx = linear.solve(&jac, &r).unwrap();
            x = apply_update(&x, &dx, 1.0);
            r = sys.residual(&x, &x0).unwrap();
        }
        assert!(norms.len() >= 3, "converged too fast to measure: {norms:?}");
        assert!(norms.windows(2).all(|p| p[1] < p[0]), "not contracting: {norms:?}");
        // Observed order per consecutive triple; the first contraction is
        // pre-asymptotic and the last may hit the rounding floor, so the
        // quadratic regime must show up as the best triple.
        let best = norms
            .windows(3)
            .map(|t| (t[2] / t[1]).ln() / (t[1] / t[0]).ln())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best >= 1.8, "order {best}, norms {norms:?}");
    }

    #[test]
    fn nonconvergence_carries_step_context() {
        let mut scenario = Scenario::default();
        scenario.mesh.nx = 3;
        scenario.mesh.ny = 3;
        scenario.solver.t_end = 10.0;
        scenario.solver.newton_max_iter = 1;
        scenario.solver.newton_tol = 1e-300;
        let mesh = scenario.build_mesh().unwrap();
        let model = scenario.constitutive_model().unwrap();
        let cfg = scenario.solver;
        let out = run(&mesh, &model, &scenario, &cfg, |_| {});
        let err = out.failure.expect("must fail");
        let msg = err.to_string();
        assert!(msg.contains("step 1") && msg.contains("t = 5"), "{msg}");
        assert!(!out.trajectory.snapshots.is_empty());
    }

    #[test]
    fn retry_halves_dt_on_nonconvergence() {
        // The cold fire start on this mesh needs 2 Newton iterations at
        // dt = 5 s and at 2.5 s, but converges in 1 at 1.25 s; capping the
        // iteration count at 1 forces two levels of bisection.
        let mut scenario = Scenario::default();
        scenario.mesh.nx = 3;
        scenario.mesh.ny = 3;
        scenario.solver.t_end = 5.0;
        scenario.solver.newton_max_iter = 1;
        let mesh = scenario.build_mesh().unwrap();
        let model = scenario.constitutive_model().unwrap();

        let cfg = scenario.solver;
        let out = run(&mesh, &model, &scenario, &cfg, |_| {});
        assert!(out.failure.is_some(), "capped step should fail without retry");

        scenario.solver.retry_halve_dt = true;
        let cfg = scenario.solver;
        let out = run(&mesh, &model, &scenario, &cfg, |_| {});
        assert!(out.failure.is_none(), "{:?}", out.failure);
        let t: Vec<f64> = out.trajectory.diagnostics.iter().map(|d| d.time).collect();
        assert!(t.windows(2).all(|p| p[1] > p[0]), "{t:?}");
        assert_eq!(*t.last().unwrap(), 5.0);
        assert!(t.len() > 1, "no bisection happened: {t:?}");
        assert!(t.contains(&1.25), "expected quarter-step times, got {t:?}");
    }
}

