//! Bilinear quadrilateral reference element and Gauss-Legendre quadrature.
//!
//! Reference square [-1,1]^2, nodes ordered counter-clockwise starting at
//! (-1,-1). Bulk integrals use a tensor-product rule, edge integrals the
//! matching 1D rule; the solver uses n = 5 per axis throughout.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("quadrature order {0} unsupported, expected 1..=10")]
    UnsupportedOrder(usize),
    #[error("element {element} has non-positive Jacobian determinant {det} at a quadrature point")]
    InvertedElement { element: usize, det: f64 },
}

/// Tensor-product Gauss rule on the reference square.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

/// 1D Gauss rule on [-1, 1] for edge integrals.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Computed by Newton iteration on the Legendre polynomial, seeded with the
/// Chebyshev-based estimate; accurate to machine precision for n <= 10.
pub fn gauss_points_1d(n: usize) -> Result<EdgeRule, FemError> {
    if !(1..=10).contains(&n) {
        return Err(FemError::UnsupportedOrder(n));
    }
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        // Store in ascending order.
        points[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    Ok(EdgeRule { points, weights })
}

/// Legendre P_n and its derivative at x by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Tensor product of the 1D rule; weights sum to 4.
pub fn gauss_rule(n_per_axis: usize) -> Result<QuadratureRule, FemError> {
    let one_d = gauss_points_1d(n_per_axis)?;
    let mut points = Vec::with_capacity(n_per_axis * n_per_axis);
    let mut weights = Vec::with_capacity(n_per_axis * n_per_axis);
    for (j, &eta) in one_d.points.iter().enumerate() {
        for (i, &xi) in one_d.points.iter().enumerate() {
            points.push([xi, eta]);
            weights.push(one_d.weights[i] * one_d.weights[j]);
        }
    }
    Ok(QuadratureRule { points, weights })
}

/// Shape data at one quadrature point of one element.
#[derive(Debug, Clone, Copy)]
pub struct ShapeEval {
    /// Basis values N_1..N_4.
    pub n: [f64; 4],
    /// Gradients with respect to (xi, eta).
    pub dn_ref: [[f64; 2]; 4],
    /// Gradients with respect to (x, y).
    pub dn_phys: [[f64; 2]; 4],
    pub det_j: f64,
}

/// Bilinear basis values and reference gradients at (xi, eta).
pub fn shape_functions(xi: f64, eta: f64) -> ([f64; 4], [[f64; 2]; 4]) {
    let n = [
        0.25 * (1.0 - xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 + eta),
        0.25 * (1.0 - xi) * (1.0 + eta),
    ];
    let dn = [
        [-0.25 * (1.0 - eta), -0.25 * (1.0 - xi)],
        [0.25 * (1.0 - eta), -0.25 * (1.0 + xi)],
        [0.25 * (1.0 + eta), 0.25 * (1.0 + xi)],
        [-0.25 * (1.0 + eta), 0.25 * (1.0 - xi)],
    ];
    (n, dn)
}

/// Isoparametric geometry of one element at every point of `rule`.
///
/// `element` only labels error messages. Physical gradients are
/// J^{-T} grad_ref N; a non-positive det J is rejected.
pub fn element_geometry(
    coords: &[[f64; 2]; 4],
    rule: &QuadratureRule,
    element: usize,
) -> Result<Vec<ShapeEval>, FemError> {
    rule.points
        .iter()
        .map(|&[xi, eta]| shape_eval_at(coords, xi, eta, element))
        .collect()
}

pub fn shape_eval_at(
    coords: &[[f64; 2]; 4],
    xi: f64,
    eta: f64,
    element: usize,
) -> Result<ShapeEval, FemError> {
    let (n, dn_ref) = shape_functions(xi, eta);
    // J[a][b] = d x_a / d xi_b.
    let mut j = [[0.0; 2]; 2];
    for (node, d) in dn_ref.iter().enumerate() {
        for a in 0..2 {
            for b in 0..2 {
                j[a][b] += coords[node][a] * d[b];
            }
        }
    }
    let det_j = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det_j <= 0.0 {
        return Err(FemError::InvertedElement { element, det: det_j });
    }
    let inv = [
        [j[1][1] / det_j, -j[0][1] / det_j],
        [-j[1][0] / det_j, j[0][0] / det_j],
    ];
    let mut dn_phys = [[0.0; 2]; 4];
    for node in 0..4 {
        for a in 0..2 {
            // grad_x N = J^{-T} grad_ref N.
            dn_phys[node][a] = inv[0][a] * dn_ref[node][0] + inv[1][a] * dn_ref[node][1];
        }
    }
    Ok(ShapeEval { n, dn_ref, dn_phys, det_j })
}

/// Local node pair of each element edge, counter-clockwise:
/// 0 bottom, 1 right, 2 top, 3 left.
pub const EDGE_NODES: [[usize; 2]; 4] = [[0, 1], [1, 2], [2, 3], [3, 0]];

/// Length of a (straight) element edge.
pub fn edge_length(coords: &[[f64; 2]; 4], local_edge: usize) -> f64 {
    let [a, b] = EDGE_NODES[local_edge];
    let dx = coords[b][0] - coords[a][0];
    let dy = coords[b][1] - coords[a][1];
    (dx * dx + dy * dy).sqrt()
}
