//! Element integrals and global assembly of the semi-implicit step system
//!
//!   (1/dt) C_n (X_{n+1} - X_n) + K_n X_{n+1} + R(X_{n+1}) = F_{n+1}
//!
//! over the 3N nodal unknowns X = (w, theta, P). Transport and capacity
//! coefficients in C_n, K_n and F_{n+1} are frozen at the previous state
//! (theta_n, P_n); only the dehydration source w_d(theta_{n+1}), the
//! radiative boundary term and the nodal isotherm constraint are implicit
//! and live in R.
//!
//! Sign conventions, derived from the time-discrete weak form: the
//! water-equation element vectors R^w and F^w enter the global system
//! negated, the heat-equation ones with their own sign. The dehydration
//! term of the heat equation is linearized into the capacity block as
//! h_d w_d'(theta_n), restoring the units of a heat capacity; the exact
//! nonlinear w_d(theta_{n+1}) enters the water equation through R^w.

use thiserror::Error;

use crate::fem::{self, EdgeRule, FemError, QuadratureRule, EDGE_NODES};
use crate::materials::ConstitutiveModel;
use crate::mesh::{BoundaryTag, Mesh};
use crate::sparse::Coo;

pub type Mat4 = [[f64; 4]; 4];
pub type Vec4 = [f64; 4];

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error("state has {got} nodes, mesh has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("non-finite {field} residual at node {node}: {value}")]
    NonFiniteResidual { field: &'static str, node: usize, value: f64 },
    #[error("non-finite material evaluation ({what}) in element {element}")]
    NonFiniteMaterial { what: &'static str, element: usize },
}

/// Nodal fields at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalState {
    /// Evaporable water content [kg/m3].
    pub w: Vec<f64>,
    /// Temperature [K].
    pub theta: Vec<f64>,
    /// Pore pressure [Pa].
    pub p: Vec<f64>,
}

impl NodalState {
    pub fn uniform(n: usize, w: f64, theta: f64, p: f64) -> Self {
        Self { w: vec![w; n], theta: vec![theta; n], p: vec![p; n] }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Block-ordered flat vector [w..., theta..., P...].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(3 * self.len());
        x.extend_from_slice(&self.w);
        x.extend_from_slice(&self.theta);
        x.extend_from_slice(&self.p);
        x
    }

    pub fn from_flat(n: usize, x: &[f64]) -> Self {
        assert_eq!(x.len(), 3 * n);
        Self {
            w: x[..n].to_vec(),
            theta: x[n..2 * n].to_vec(),
            p: x[2 * n..].to_vec(),
        }
    }

    fn gather(&self, conn: &[usize; 4]) -> ([f64; 4], [f64; 4], [f64; 4]) {
        let g = |v: &[f64]| [v[conn[0]], v[conn[1]], v[conn[2]], v[conn[3]]];
        (g(&self.w), g(&self.theta), g(&self.p))
    }
}

/// Robin and radiation coefficients of the boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParams {
    /// Heat film coefficient [W/(m2 K)].
    pub alpha_c: f64,
    /// Moisture film coefficient [m/s].
    pub beta_c: f64,
    /// Surface emissivity [-].
    pub emissivity: f64,
    /// Stefan-Boltzmann constant [W/(m2 K4)].
    pub sigma: f64,
}

/// Ambient data evaluated at the target time t_{n+1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValues {
    pub theta_inf: f64,
    pub p_inf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementCapacity {
    pub c_ww: Mat4,
    pub c_tw: Mat4,
    pub c_tt: Mat4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementConduction {
    pub k_wp: Mat4,
    pub k_tt: Mat4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementNonlinear {
    pub r_w: Vec4,
    pub r_theta: Vec4,
    /// d r_w / d theta.
    pub dr_w: Mat4,
    /// d r_theta / d theta.
    pub dr_theta: Mat4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementLoad {
    pub f_w: Vec4,
    pub f_theta: Vec4,
}

/// Capacity blocks, coefficients at the previous state.
///
/// C^{ww} = int N^T N, C^{tw} = int h_alpha(theta_n) N^T N,
/// C^{tt} = int (rho_s C_s(theta_n) - h_d w_d'(theta_n)) N^T N.
pub fn element_capacity(
    model: &ConstitutiveModel,
    coords: &[[f64; 2]; 4],
    theta_n: &Vec4,
    rule: &QuadratureRule,
    element: usize,
) -> Result<ElementCapacity, AssemblyError> {
    let evals = fem::element_geometry(coords, rule, element)?;
    let mut out = ElementCapacity { c_ww: [[0.0; 4]; 4], c_tw: [[0.0; 4]; 4], c_tt: [[0.0; 4]; 4] };
    for (q, ev) in evals.iter().enumerate() {
        let wq = rule.weights[q] * ev.det_j;
        let th = dot4(&ev.n, theta_n);
        let h_alpha = model.evaporation_enthalpy(th);
        let cap = model.constants.rho_s * model.specific_heat_solid(th)
            - model.constants.h_d * model.dehydrated_water(th).1;
        if !(h_alpha.is_finite() && cap.is_finite()) {
            return Err(AssemblyError::NonFiniteMaterial { what: "capacity", element });
        }
        for i in 0..4 {
            for j in 0..4 {
                let nn = wq * ev.n[i] * ev.n[j];
                out.c_ww[i][j] += nn;
                out.c_tw[i][j] += h_alpha * nn;
                out.c_tt[i][j] += cap * nn;
            }
        }
    }
    Ok(out)
}

/// Conduction blocks, coefficients at the previous state, plus the Robin
/// edge terms on every tagged boundary edge of the element.
///
/// K^{wP} = int (kappa(theta_n, P_n)/g) grad N^T grad N + beta_c edge mass,
/// K^{tt} = int lambda_c(theta_n) grad N^T grad N + alpha_c edge mass.
pub fn element_conduction(
    model: &ConstitutiveModel,
    coords: &[[f64; 2]; 4],
    theta_n: &Vec4,
    p_n: &Vec4,
    edges: &[(usize, BoundaryTag)],
    bc: &BoundaryParams,
    rule: &QuadratureRule,
    edge_rule: &EdgeRule,
    element: usize,
) -> Result<ElementConduction, AssemblyError> {
    let evals = fem::element_geometry(coords, rule, element)?;
    let mut out = ElementConduction { k_wp: [[0.0; 4]; 4], k_tt: [[0.0; 4]; 4] };
    for (q, ev) in evals.iter().enumerate() {
        let wq = rule.weights[q] * ev.det_j;
        let th = dot4(&ev.n, theta_n);
        let p = dot4(&ev.n, p_n);
        let kappa_g = model.permeability(th, p) / model.constants.g;
        let lambda = model.thermal_conductivity(th);
        if !(kappa_g.is_finite() && lambda.is_finite()) {
            return Err(AssemblyError::NonFiniteMaterial { what: "conduction", element });
        }
        for i in 0..4 {
            for j in 0..4 {
                let gg = wq
                    * (ev.dn_phys[i][0] * ev.dn_phys[j][0] + ev.dn_phys[i][1] * ev.dn_phys[j][1]);
                out.k_wp[i][j] += kappa_g * gg;
                out.k_tt[i][j] += lambda * gg;
            }
        }
    }
    for &(local_edge, _) in edges {
        let m = edge_mass(coords, local_edge, edge_rule);
        let [a, b] = EDGE_NODES[local_edge];
        let idx = [a, b];
        for i in 0..2 {
            for j in 0..2 {
                out.k_wp[idx[i]][idx[j]] += bc.beta_c * m[i][j];
                out.k_tt[idx[i]][idx[j]] += bc.alpha_c * m[i][j];
            }
        }
    }
    Ok(out)
}

/// Implicit terms at the trial state theta_{n+1} and their Jacobians:
/// the dehydration source of the water equation over the element bulk and
/// the radiative flux over the element's fire edges.
pub fn element_nonlinear(
    model: &ConstitutiveModel,
    coords: &[[f64; 2]; 4],
    theta_next: &Vec4,
    dt: f64,
    fire_edges: &[usize],
    bc: &BoundaryParams,
    rule: &QuadratureRule,
    edge_rule: &EdgeRule,
    element: usize,
) -> Result<ElementNonlinear, AssemblyError> {
    let evals = fem::element_geometry(coords, rule, element)?;
    let mut out = ElementNonlinear {
        r_w: [0.0; 4],
        r_theta: [0.0; 4],
        dr_w: [[0.0; 4]; 4],
        dr_theta: [[0.0; 4]; 4],
    };
    for (q, ev) in evals.iter().enumerate() {
        let wq = rule.weights[q] * ev.det_j;
        let th = dot4(&ev.n, theta_next);
        let (w_d, dw_d) = model.dehydrated_water(th);
        for i in 0..4 {
            out.r_w[i] += wq / dt * w_d * ev.n[i];
            for j in 0..4 {
                out.dr_w[i][j] += wq / dt * dw_d * ev.n[i] * ev.n[j];
            }
        }
    }
    let e_sigma = bc.emissivity * bc.sigma;
    for &local_edge in fire_edges {
        let [a, b] = EDGE_NODES[local_edge];
        let idx = [a, b];
        let half_len = 0.5 * fem::edge_length(coords, local_edge);
        for (q, &t) in edge_rule.points.iter().enumerate() {
            let wq = edge_rule.weights[q] * half_len;
            let n = [0.5 * (1.0 - t), 0.5 * (1.0 + t)];
            let tau = n[0] * theta_next[a] + n[1] * theta_next[b];
            let tau3 = tau.abs().powi(3);
            for i in 0..2 {
                out.r_theta[idx[i]] += wq * e_sigma * tau3 * tau * n[i];
                for j in 0..2 {
                    out.dr_theta[idx[i]][idx[j]] += wq * e_sigma * 4.0 * tau3 * n[i] * n[j];
                }
            }
        }
    }
    Ok(out)
}

/// Load vectors at t_{n+1}, coefficients at the previous state.
///
/// F^w = (1/dt) int w_d(theta_n) N - beta_c P_inf edge int N (this block
/// enters the global vector negated); F^t = -int C_w (kappa/g)
/// (grad theta_n . grad P_n) N + alpha_c theta_inf edge int N
/// + e sigma theta_inf^4 fire-edge int N.
pub fn element_load(
    model: &ConstitutiveModel,
    coords: &[[f64; 2]; 4],
    theta_n: &Vec4,
    p_n: &Vec4,
    edges: &[(usize, BoundaryTag)],
    bc: &BoundaryParams,
    bv: &BoundaryValues,
    dt: f64,
    rule: &QuadratureRule,
    edge_rule: &EdgeRule,
    element: usize,
) -> Result<ElementLoad, AssemblyError> {
    let evals = fem::element_geometry(coords, rule, element)?;
    let mut out = ElementLoad { f_w: [0.0; 4], f_theta: [0.0; 4] };
    let c_w = model.constants.c_w;
    for (q, ev) in evals.iter().enumerate() {
        let wq = rule.weights[q] * ev.det_j;
        let th = dot4(&ev.n, theta_n);
        let p = dot4(&ev.n, p_n);
        let w_d = model.dehydrated_water(th).0;
        let kappa_g = model.permeability(th, p) / model.constants.g;
        let mut grad_th = [0.0; 2];
        let mut grad_p = [0.0; 2];
        for i in 0..4 {
            for d in 0..2 {
                grad_th[d] += ev.dn_phys[i][d] * theta_n[i];
                grad_p[d] += ev.dn_phys[i][d] * p_n[i];
            }
        }
        let convective = c_w * kappa_g * (grad_th[0] * grad_p[0] + grad_th[1] * grad_p[1]);
        for i in 0..4 {
            out.f_w[i] += wq / dt * w_d * ev.n[i];
            out.f_theta[i] -= wq * convective * ev.n[i];
        }
    }
    let e_sigma = bc.emissivity * bc.sigma;
    let theta_inf4 = bv.theta_inf.powi(4);
    for &(local_edge, tag) in edges {
        let [a, b] = EDGE_NODES[local_edge];
        let idx = [a, b];
        let half_len = 0.5 * fem::edge_length(coords, local_edge);
        for (q, &t) in edge_rule.points.iter().enumerate() {
            let wq = edge_rule.weights[q] * half_len;
            let n = [0.5 * (1.0 - t), 0.5 * (1.0 + t)];
            for i in 0..2 {
                out.f_w[idx[i]] -= wq * bc.beta_c * bv.p_inf * n[i];
                out.f_theta[idx[i]] += wq * bc.alpha_c * bv.theta_inf * n[i];
                if tag == BoundaryTag::Fire {
                    out.f_theta[idx[i]] += wq * e_sigma * theta_inf4 * n[i];
                }
            }
        }
    }
    Ok(out)
}

/// Edge mass matrix int N^T N over a straight element edge, by quadrature.
fn edge_mass(coords: &[[f64; 2]; 4], local_edge: usize, edge_rule: &EdgeRule) -> [[f64; 2]; 2] {
    let half_len = 0.5 * fem::edge_length(coords, local_edge);
    let mut m = [[0.0; 2]; 2];
    for (q, &t) in edge_rule.points.iter().enumerate() {
        let wq = edge_rule.weights[q] * half_len;
        let n = [0.5 * (1.0 - t), 0.5 * (1.0 + t)];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += wq * n[i] * n[j];
            }
        }
    }
    m
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// The assembled step system. Holds the frozen matrices and load of one
/// time step plus everything needed to evaluate the implicit terms.
pub struct BlockSystem<'a> {
    mesh: &'a Mesh,
    model: &'a ConstitutiveModel,
    bc: BoundaryParams,
    rule: QuadratureRule,
    edge_rule: EdgeRule,
    /// Fire edges grouped per element (radiation).
    element_fire_edges: Vec<Vec<usize>>,
    pub dt: f64,
    pub c: Coo,
    pub k: Coo,
    pub f: Vec<f64>,
    /// 2-norm of the load vector, the residual normalization scale.
    pub f_norm: f64,
}

/// Quadrature order used throughout the bulk (n x n) and edge (n) rules.
pub const QUADRATURE_ORDER: usize = 5;

/// Assemble the frozen matrices and load for the step from `state_n` to
/// t_{n+1}; ambient data in `bv` is already evaluated at t_{n+1}.
pub fn assemble<'a>(
    mesh: &'a Mesh,
    model: &'a ConstitutiveModel,
    bc: BoundaryParams,
    bv: BoundaryValues,
    state_n: &NodalState,
    dt: f64,
) -> Result<BlockSystem<'a>, AssemblyError> {
    let n = mesh.n_nodes();
    if state_n.len() != n {
        return Err(AssemblyError::SizeMismatch { expected: n, got: state_n.len() });
    }
    let rule = fem::gauss_rule(QUADRATURE_ORDER)?;
    let edge_rule = fem::gauss_points_1d(QUADRATURE_ORDER)?;

    let mut element_edges = vec![Vec::new(); mesh.n_elements()];
    let mut element_fire_edges = vec![Vec::new(); mesh.n_elements()];
    for be in &mesh.boundary_edges {
        element_edges[be.element].push((be.local_edge, be.tag));
        if be.tag == BoundaryTag::Fire {
            element_fire_edges[be.element].push(be.local_edge);
        }
    }

    let mut c = Coo::with_capacity(3 * n, 48 * mesh.n_elements());
    let mut k = Coo::with_capacity(3 * n, 32 * mesh.n_elements());
    let mut f = vec![0.0; 3 * n];

    for e in 0..mesh.n_elements() {
        let conn = mesh.elements[e];
        let coords = mesh.element_coords(e);
        let (_, theta_n, p_n) = state_n.gather(&conn);
        let cap = element_capacity(model, &coords, &theta_n, &rule, e)?;
        let cond = element_conduction(
            model, &coords, &theta_n, &p_n, &element_edges[e], &bc, &rule, &edge_rule, e,
        )?;
        let load = element_load(
            model, &coords, &theta_n, &p_n, &element_edges[e], &bc, &bv, dt, &rule, &edge_rule, e,
        )?;
        for i in 0..4 {
            let gi = conn[i];
            // Water rows enter negated, heat rows as computed.
            f[gi] -= load.f_w[i];
            f[n + gi] += load.f_theta[i];
            for j in 0..4 {
                let gj = conn[j];
                c.push(gi, gj, cap.c_ww[i][j]);
                c.push(n + gi, gj, -cap.c_tw[i][j]);
                c.push(n + gi, n + gj, cap.c_tt[i][j]);
                k.push(gi, 2 * n + gj, cond.k_wp[i][j]);
                k.push(n + gi, n + gj, cond.k_tt[i][j]);
            }
        }
    }

    let f_norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(BlockSystem {
        mesh,
        model,
        bc,
        rule,
        edge_rule,
        element_fire_edges,
        dt,
        c,
        k,
        f,
        f_norm,
    })
}

impl<'a> BlockSystem<'a> {
    pub fn n_nodes(&self) -> usize {
        self.mesh.n_nodes()
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    /// Residual (1/dt) C (X_next - X_n) + K X_next + R(X_next) - F.
    pub fn residual(
        &self,
        x_next: &NodalState,
        x_n: &NodalState,
    ) -> Result<Vec<f64>, AssemblyError> {
        let n = self.n_nodes();
        for state in [x_next, x_n] {
            if state.len() != n {
                return Err(AssemblyError::SizeMismatch { expected: n, got: state.len() });
            }
        }
        let flat_next = x_next.to_flat();
        let flat_n = x_n.to_flat();
        let diff: Vec<f64> = flat_next.iter().zip(&flat_n).map(|(a, b)| a - b).collect();

        let mut r = vec![0.0; 3 * n];
        self.c.mul_add(&diff, &mut r, 1.0 / self.dt);
        self.k.mul_add(&flat_next, &mut r, 1.0);
        self.add_nonlinear(x_next, &mut r)?;
        for i in 0..3 * n {
            r[i] -= self.f[i];
        }
        if let Some(bad) = r.iter().position(|v| !v.is_finite()) {
            let field = ["water", "heat", "isotherm"][bad / n];
            return Err(AssemblyError::NonFiniteResidual { field, node: bad % n, value: r[bad] });
        }
        Ok(r)
    }

    /// R(X): dehydration source (water rows, negated), radiation (heat
    /// rows), nodal isotherm constraint w - Phi(theta, P) (pressure rows).
    fn add_nonlinear(&self, x: &NodalState, r: &mut [f64]) -> Result<(), AssemblyError> {
        let n = self.n_nodes();
        for e in 0..self.mesh.n_elements() {
            let conn = self.mesh.elements[e];
            let coords = self.mesh.element_coords(e);
            let (_, theta, _) = x.gather(&conn);
            let nl = element_nonlinear(
                self.model,
                &coords,
                &theta,
                self.dt,
                &self.element_fire_edges[e],
                &self.bc,
                &self.rule,
                &self.edge_rule,
                e,
            )?;
            for i in 0..4 {
                r[conn[i]] -= nl.r_w[i];
                r[n + conn[i]] += nl.r_theta[i];
            }
        }
        for i in 0..n {
            let iso = self.model.sorption_isotherm(x.theta[i], x.p[i]);
            r[2 * n + i] += x.w[i] - iso.w;
        }
        Ok(())
    }

    /// Newton matrix (1/dt) C + K + dR/dX at the trial state.
    pub fn jacobian(&self, x_next: &NodalState) -> Result<Coo, AssemblyError> {
        let n = self.n_nodes();
        let mut j = Coo::with_capacity(3 * n, self.c.len() + self.k.len() + 19 * n);
        j.add_scaled(&self.c, 1.0 / self.dt);
        j.add_scaled(&self.k, 1.0);
        for e in 0..self.mesh.n_elements() {
            let conn = self.mesh.elements[e];
            let coords = self.mesh.element_coords(e);
            let (_, theta, _) = x_next.gather(&conn);
            let nl = element_nonlinear(
                self.model,
                &coords,
                &theta,
                self.dt,
                &self.element_fire_edges[e],
                &self.bc,
                &self.rule,
                &self.edge_rule,
                e,
            )?;
            // Zero-valued entries are pushed too: the sparsity pattern must
            // not depend on the state, so the factorization symbolics can
            // be reused.
            for i in 0..4 {
                for jj in 0..4 {
                    j.push(conn[i], n + conn[jj], -nl.dr_w[i][jj]);
                    j.push(n + conn[i], n + conn[jj], nl.dr_theta[i][jj]);
                }
            }
        }
        for i in 0..n {
            let iso = self.model.sorption_isotherm(x_next.theta[i], x_next.p[i]);
            j.push(2 * n + i, i, 1.0);
            j.push(2 * n + i, n + i, -iso.dw_dtheta);
            j.push(2 * n + i, 2 * n + i, -iso.dw_dp);
        }
        Ok(j)
    }
}
