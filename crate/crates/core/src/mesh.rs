//! Structured quadrilateral meshes over a rectangle.
//!
//! Node ordering is row-major: node (i, j) has index j * (nx + 1) + i with
//! i along x and j along y, node 0 at the origin. Element (i, j) has index
//! j * nx + i and counter-clockwise connectivity
//! [n(i,j), n(i+1,j), n(i+1,j+1), n(i,j+1)].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fem;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh.{axis} must be at least 1, got {value}")]
    ZeroCount { axis: &'static str, value: usize },
    #[error("domain.{axis} must be strictly positive, got {value}")]
    NonPositiveLength { axis: &'static str, value: f64 },
}

/// Boundary exposure of one side or edge.
///
/// Fire edges carry the radiative flux on top of the convective one;
/// ambient edges are convective only. Both exchange moisture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryTag {
    Fire,
    Ambient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub element: usize,
    /// Local edge of `element`, see `fem::EDGE_NODES`.
    pub local_edge: usize,
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub coords: Vec<[f64; 2]>,
    /// Counter-clockwise node quadruples.
    pub elements: Vec<[usize; 4]>,
    pub boundary_edges: Vec<BoundaryEdge>,
}

impl Mesh {
    /// Uniform nx-by-ny grid over [0, lx] x [0, ly].
    ///
    /// `side_tags` are given in local-edge order [bottom, right, top, left].
    pub fn structured(
        lx: f64,
        ly: f64,
        nx: usize,
        ny: usize,
        side_tags: [BoundaryTag; 4],
    ) -> Result<Mesh, MeshError> {
        if nx < 1 {
            return Err(MeshError::ZeroCount { axis: "nx", value: nx });
        }
        if ny < 1 {
            return Err(MeshError::ZeroCount { axis: "ny", value: ny });
        }
        if !(lx > 0.0) {
            return Err(MeshError::NonPositiveLength { axis: "lx", value: lx });
        }
        if !(ly > 0.0) {
            return Err(MeshError::NonPositiveLength { axis: "ly", value: ly });
        }

        let node = |i: usize, j: usize| j * (nx + 1) + i;
        let mut coords = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                coords.push([lx * i as f64 / nx as f64, ly * j as f64 / ny as f64]);
            }
        }
        let mut elements = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                elements.push([node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)]);
            }
        }
        let element = |i: usize, j: usize| j * nx + i;
        let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
        for i in 0..nx {
            boundary_edges.push(BoundaryEdge { element: element(i, 0), local_edge: 0, tag: side_tags[0] });
        }
        for j in 0..ny {
            boundary_edges.push(BoundaryEdge { element: element(nx - 1, j), local_edge: 1, tag: side_tags[1] });
        }
        for i in 0..nx {
            boundary_edges.push(BoundaryEdge { element: element(i, ny - 1), local_edge: 2, tag: side_tags[2] });
        }
        for j in 0..ny {
            boundary_edges.push(BoundaryEdge { element: element(0, j), local_edge: 3, tag: side_tags[3] });
        }

        Ok(Mesh { coords, elements, boundary_edges })
    }

    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn element_coords(&self, e: usize) -> [[f64; 2]; 4] {
        let conn = self.elements[e];
        [
            self.coords[conn[0]],
            self.coords[conn[1]],
            self.coords[conn[2]],
            self.coords[conn[3]],
        ]
    }

    /// Physical coordinates of the element center, reference point (0, 0).
    pub fn element_center(&self, e: usize) -> [f64; 2] {
        let c = self.element_coords(e);
        [
            0.25 * (c[0][0] + c[1][0] + c[2][0] + c[3][0]),
            0.25 * (c[0][1] + c[1][1] + c[2][1] + c[3][1]),
        ]
    }

    /// Global node pair of a boundary edge, in edge direction.
    pub fn edge_nodes(&self, edge: &BoundaryEdge) -> [usize; 2] {
        let conn = self.elements[edge.element];
        let [a, b] = fem::EDGE_NODES[edge.local_edge];
        [conn[a], conn[b]]
    }

    /// Undirected interior plus boundary edge count, for topology checks.
    pub fn count_unique_edges(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(4 * self.elements.len());
        for conn in &self.elements {
            for [a, b] in fem::EDGE_NODES {
                let (lo, hi) = (conn[a].min(conn[b]), conn[a].max(conn[b]));
                edges.push((lo, hi));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }
}
