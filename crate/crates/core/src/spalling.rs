//! Pore-pressure spalling assessment, post-processed per trajectory
//! snapshot: an element spalls once phi P - f_t(theta), sampled at its
//! center, turns non-negative. Spalled elements are never un-spalled.
//! The remaining elements split into the stable core (zone C, the
//! connected component reachable from the domain center) and unstable
//! material cut off by spalled bands (zone B).

use std::collections::HashMap;

use crate::assembly::NodalState;
use crate::fem::EDGE_NODES;
use crate::materials;
use crate::mesh::Mesh;
use crate::solver::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    /// a: failed the spalling criterion at this or an earlier time.
    Spalled,
    /// b: intact but disconnected from the core.
    Unstable,
    /// c: the stable core.
    Stable,
}

impl Zone {
    pub fn letter(self) -> char {
        match self {
            Zone::Spalled => 'a',
            Zone::Unstable => 'b',
            Zone::Stable => 'c',
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpallingReport {
    pub time: f64,
    /// Per-element zone; indices follow the mesh element order.
    pub zones: Vec<Zone>,
    /// Criterion margin phi P - f_t(theta) [Pa] at the element center.
    pub margins: Vec<f64>,
}

impl SpallingReport {
    pub fn count(&self, zone: Zone) -> usize {
        self.zones.iter().filter(|z| **z == zone).count()
    }
}

/// Criterion margin per element: fields interpolated to the element
/// center (all four bilinear shape functions equal 1/4 there).
pub fn evaluate_criterion(state: &NodalState, mesh: &Mesh, phi: f64, f_t0: f64) -> Vec<f64> {
    (0..mesh.n_elements())
        .map(|e| {
            let conn = mesh.elements[e];
            let theta = conn.iter().map(|&n| state.theta[n]).sum::<f64>() / 4.0;
            let p = conn.iter().map(|&n| state.p[n]).sum::<f64>() / 4.0;
            phi * p - materials::tensile_strength(theta, f_t0)
        })
        .collect()
}

/// Zone classification from per-element spalled flags. Non-spalled
/// elements form edge-adjacency components; the component containing the
/// element nearest the domain center (lowest index on ties) is the stable
/// core, every other component is unstable.
pub fn classify_zones(mesh: &Mesh, spalled: &[bool]) -> Vec<Zone> {
    assert_eq!(spalled.len(), mesh.n_elements());
    let n_e = mesh.n_elements();

    // Edge-sharing neighbors via the sorted node pair of each edge.
    let mut edge_owners: HashMap<(usize, usize), [usize; 2]> = HashMap::new();
    let mut neighbors = vec![Vec::with_capacity(4); n_e];
    for e in 0..n_e {
        let conn = mesh.elements[e];
        for edge in EDGE_NODES {
            let (a, b) = (conn[edge[0]], conn[edge[1]]);
            let key = (a.min(b), a.max(b));
            match edge_owners.get_mut(&key) {
                None => {
                    edge_owners.insert(key, [e, usize::MAX]);
                }
                Some(owners) => {
                    let other = owners[0];
                    owners[1] = e;
                    neighbors[other].push(e);
                    neighbors[e].push(other);
                }
            }
        }
    }

    // Flood-fill component labels over non-spalled elements.
    let mut component = vec![usize::MAX; n_e];
    let mut n_components = 0;
    let mut stack = Vec::new();
    for start in 0..n_e {
        if spalled[start] || component[start] != usize::MAX {
            continue;
        }
        let label = n_components;
        n_components += 1;
        stack.push(start);
        component[start] = label;
        while let Some(e) = stack.pop() {
            for &nb in &neighbors[e] {
                if !spalled[nb] && component[nb] == usize::MAX {
                    component[nb] = label;
                    stack.push(nb);
                }
            }
        }
    }

    // Domain center from the coordinate bounding box.
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in &mesh.coords {
        for d in 0..2 {
            lo[d] = lo[d].min(c[d]);
            hi[d] = hi[d].max(c[d]);
        }
    }
    let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let mut core = None;
    let mut best = f64::INFINITY;
    for e in 0..n_e {
        if spalled[e] {
            continue;
        }
        let ec = mesh.element_center(e);
        let d2 = (ec[0] - center[0]).powi(2) + (ec[1] - center[1]).powi(2);
        if d2 < best {
            best = d2;
            core = Some(component[e]);
        }
    }

    (0..n_e)
        .map(|e| {
            if spalled[e] {
                Zone::Spalled
            } else if Some(component[e]) == core {
                Zone::Stable
            } else {
                Zone::Unstable
            }
        })
        .collect()
}

/// Assess every snapshot of a trajectory; the spalled set accumulates, so
/// zone a is non-decreasing over time.
pub fn track(trajectory: &Trajectory, mesh: &Mesh, phi: f64, f_t0: f64) -> Vec<SpallingReport> {
    let mut spalled = vec![false; mesh.n_elements()];
    trajectory
        .snapshots
        .iter()
        .map(|(time, state)| {
            let margins = evaluate_criterion(state, mesh, phi, f_t0);
            for (flag, margin) in spalled.iter_mut().zip(&margins) {
                *flag = *flag || *margin >= 0.0;
            }
            SpallingReport { time: *time, zones: classify_zones(mesh, &spalled), margins }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryTag;

    fn strip(n: usize) -> Mesh {
        Mesh::structured(n as f64, 1.0, n, 1, [BoundaryTag::Ambient; 4]).unwrap()
    }

    #[test]
    fn margin_examples() {
        let mesh = strip(1);
        let s = NodalState::uniform(4, 100.0, 600.0, 25.0e6);
        let m = evaluate_criterion(&s, &mesh, 0.1, 2.0e6);
        assert!((m[0] - (2.5e6 - 1.0926e6)).abs() < 1e-6 * 2.5e6);
        assert!(m[0] > 0.0);
        let hot = NodalState::uniform(4, 0.0, 1500.0, 1.0e5);
        let m = evaluate_criterion(&hot, &mesh, 0.1, 2.0e6);
        assert_eq!(m[0], 0.1 * 1.0e5);
        let dry = NodalState::uniform(4, 0.0, 300.0, 0.0);
        let m = evaluate_criterion(&dry, &mesh, 0.1, 2.0e6);
        assert_eq!(m[0], -2.0e6);
    }

    #[test]
    fn zones_on_three_element_strip() {
        let mesh = strip(3);
        let zones = classify_zones(&mesh, &[false, true, false]);
        // Both survivors are equidistant from the center; the tie goes to
        // the lower element index, making the left element the core.
        assert_eq!(zones, vec![Zone::Stable, Zone::Spalled, Zone::Unstable]);
        assert_eq!(classify_zones(&mesh, &[false; 3]), vec![Zone::Stable; 3]);
        assert_eq!(classify_zones(&mesh, &[true; 3]), vec![Zone::Spalled; 3]);
    }

    #[test]
    fn spalled_band_cuts_off_outer_ring() {
        // 3x3 square with the middle row spalled: the bottom row keeps the
        // centroid-nearest survivor, the top row is cut off.
        let mesh = Mesh::structured(3.0, 3.0, 3, 3, [BoundaryTag::Ambient; 4]).unwrap();
        let mut spalled = vec![false; 9];
        for e in [3, 4, 5] {
            spalled[e] = true;
        }
        let zones = classify_zones(&mesh, &spalled);
        assert_eq!(&zones[0..3], &[Zone::Stable; 3]);
        assert_eq!(&zones[3..6], &[Zone::Spalled; 3]);
        assert_eq!(&zones[6..9], &[Zone::Unstable; 3]);
        // Partition and monochrome-component invariants.
        let counts = [Zone::Spalled, Zone::Unstable, Zone::Stable]
            .map(|z| zones.iter().filter(|x| **x == z).count());
        assert_eq!(counts.iter().sum::<usize>(), 9);
    }

    #[test]
    fn tracking_is_irreversible() {
        let mesh = strip(2);
        let n = mesh.n_nodes();
        let hot = NodalState::uniform(n, 0.0, 600.0, 25.0e6);
        let cold = NodalState::uniform(n, 0.0, 300.0, 1.0e3);
        let trajectory = Trajectory {
            snapshots: vec![(0.0, cold.clone()), (5.0, hot), (10.0, cold)],
            diagnostics: vec![],
        };
        let reports = track(&trajectory, &mesh, 0.1, 2.0e6);
        assert_eq!(reports.len(), 3);
        assert_eq!(reports[0].count(Zone::Spalled), 0);
        assert_eq!(reports[1].count(Zone::Spalled), 2);
        // Still spalled after cooling, despite negative margins.
        assert_eq!(reports[2].count(Zone::Spalled), 2);
        assert!(reports[2].margins.iter().all(|m| *m < 0.0));
    }

    #[test]
    fn margins_monotone_in_pressure_and_heat() {
        let mesh = strip(4);
        let n = mesh.n_nodes();
        let early = NodalState::uniform(n, 0.0, 450.0, 1.0e6);
        let later = NodalState::uniform(n, 0.0, 520.0, 2.0e6);
        let m0 = evaluate_criterion(&early, &mesh, 0.1, 2.0e6);
        let m1 = evaluate_criterion(&later, &mesh, 0.1, 2.0e6);
        for (a, b) in m0.iter().zip(&m1) {
            assert!(b >= a);
        }
    }
}
