//! Property tests: structural invariants of the material laws, quadrature,
//! meshing, assembly and configuration handling over randomized inputs.

use proptest::prelude::*;

use hygrotherm::assembly::{self, NodalState};
use hygrotherm::fem;
use hygrotherm::mesh::{BoundaryTag, Mesh};
use hygrotherm::scenario::{self, Scenario};
use hygrotherm::{ConstitutiveModel, MaterialConstants};

fn model() -> ConstitutiveModel {
    ConstitutiveModel::new(MaterialConstants::default()).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-9)
}

proptest! {
    #[test]
    fn conductivity_positive_and_bounded(theta in 250.0..1600.0f64) {
        let v = model().thermal_conductivity(theta);
        prop_assert!(v.is_finite() && v > 0.0 && v < 3.0, "lambda({theta}) = {v}");
    }

    #[test]
    fn specific_heat_positive(theta in 250.0..1600.0f64) {
        let v = model().specific_heat_solid(theta);
        prop_assert!(v.is_finite() && v > 0.0, "C_s({theta}) = {v}");
    }

    #[test]
    fn dehydrated_water_monotone_and_bounded(a in 250.0..1600.0f64, b in 250.0..1600.0f64) {
        let m = model();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (wl, _) = m.dehydrated_water(lo);
        let (wh, _) = m.dehydrated_water(hi);
        prop_assert!(wl <= wh + 1e-12, "w_d({lo}) = {wl} > w_d({hi}) = {wh}");
        prop_assert!((0.0..=0.24 * 300.0 + 1e-9).contains(&wl));
    }

    #[test]
    fn dehydration_derivative_matches_secant(theta in 250.0..1600.0f64) {
        // The stored derivative is the slope of the active linear piece, so
        // a secant inside one piece reproduces it.
        let m = model();
        let h = 1e-3;
        let inside_piece = (theta - 373.15).abs() > 2.0 * h && (theta - 973.15).abs() > 2.0 * h;
        prop_assume!(inside_piece);
        let (_, dwd) = m.dehydrated_water(theta);
        let secant = (m.dehydrated_water(theta + h).0 - m.dehydrated_water(theta - h).0) / (2.0 * h);
        prop_assert!((dwd - secant).abs() < 1e-6, "w_d'({theta}): {dwd} vs {secant}");
    }

    #[test]
    fn evaporation_enthalpy_nonnegative(theta in 250.0..1600.0f64) {
        let v = model().evaporation_enthalpy(theta);
        prop_assert!(v >= 0.0 && v.is_finite());
        if theta > 647.3 {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn saturation_pressure_strictly_increasing(a in 250.0..1600.0f64, b in 250.0..1600.0f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let m = model();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(m.saturation_pressure(lo) < m.saturation_pressure(hi));
    }

    #[test]
    fn tensile_strength_nonincreasing(a in 250.0..1600.0f64, b in 250.0..1600.0f64) {
        let m = model();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(m.tensile_strength(lo) >= m.tensile_strength(hi) - 1e-9);
    }

    #[test]
    fn permeability_positive_and_pressure_free_when_hot(
        theta in 380.0..1500.0f64,
        rh1 in 0.05..1.2f64,
        rh2 in 0.05..1.2f64,
    ) {
        // Above the switch temperature the intrinsic permeability depends
        // on temperature alone.
        let m = model();
        let psat = m.saturation_pressure(theta);
        let k1 = m.permeability(theta, rh1 * psat);
        let k2 = m.permeability(theta, rh2 * psat);
        prop_assert!(k1 > 0.0 && k1.is_finite());
        prop_assert_eq!(k1, k2);
    }

    #[test]
    fn permeability_monotone_in_humidity_when_cold(
        theta in 280.0..360.0f64,
        rh1 in 0.05..0.95f64,
        rh2 in 0.05..0.95f64,
    ) {
        let m = model();
        prop_assume!((rh1 - rh2).abs() > 1e-6);
        let psat = m.saturation_pressure(theta);
        let (lo, hi) = if rh1 < rh2 { (rh1, rh2) } else { (rh2, rh1) };
        let klo = m.permeability(theta, lo * psat);
        let khi = m.permeability(theta, hi * psat);
        prop_assert!(klo <= khi, "kappa({theta}, rh={lo}) = {klo} > kappa(rh={hi}) = {khi}");
    }

    #[test]
    fn isotherm_nonnegative_and_increasing_in_pressure(
        theta in 280.0..640.0f64,
        rh1 in 0.02..0.9f64,
        rh2 in 0.02..0.9f64,
    ) {
        let m = model();
        prop_assume!((rh1 - rh2).abs() > 1e-6);
        let psat = m.saturation_pressure(theta);
        let (lo, hi) = if rh1 < rh2 { (rh1, rh2) } else { (rh2, rh1) };
        let wlo = m.sorption_isotherm(theta, lo * psat).w;
        let whi = m.sorption_isotherm(theta, hi * psat).w;
        prop_assert!(wlo >= 0.0);
        prop_assert!(wlo <= whi, "Phi({theta}, rh={lo}) = {wlo} > Phi(rh={hi}) = {whi}");
    }

    #[test]
    fn isotherm_partials_match_finite_differences(
        theta in 285.0..620.0f64,
        rh in 0.05..1.35f64,
    ) {
        let m = model();
        // Keep the finite-difference stencil on one side of the spline
        // junctions at relative humidity 0.96 and 1.04.
        prop_assume!((rh - 0.96).abs() > 0.02 && (rh - 1.04).abs() > 0.02);
        let p = rh * m.saturation_pressure(theta);
        let iso = m.sorption_isotherm(theta, p);

        let ht = 1e-6 * theta;
        let fd_t = (m.sorption_isotherm(theta + ht, p).w - m.sorption_isotherm(theta - ht, p).w)
            / (2.0 * ht);
        let hp = 1e-6 * p.max(1.0);
        let fd_p = (m.sorption_isotherm(theta, p + hp).w - m.sorption_isotherm(theta, p - hp).w)
            / (2.0 * hp);

        prop_assert!(
            rel_close(iso.dw_dtheta, fd_t, 1e-4),
            "dPhi/dtheta({theta}, {p}): analytic {} vs fd {fd_t}",
            iso.dw_dtheta
        );
        prop_assert!(
            rel_close(iso.dw_dp, fd_p, 1e-4),
            "dPhi/dP({theta}, {p}): analytic {} vs fd {fd_p}",
            iso.dw_dp
        );
    }

    #[test]
    fn fire_curve_strictly_increasing(a in 0.0..21600.0f64, b in 0.0..21600.0f64) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(scenario::iso_fire_curve(lo) < scenario::iso_fire_curve(hi));
    }

    #[test]
    fn structured_mesh_counts_satisfy_euler_formula(
        nx in 1usize..12,
        ny in 1usize..12,
        lx in 0.05..2.0f64,
        ly in 0.05..2.0f64,
    ) {
        let mesh = Mesh::structured(lx, ly, nx, ny, [BoundaryTag::Fire; 4]).unwrap();
        let v = mesh.n_nodes() as i64;
        let f = mesh.n_elements() as i64;
        let e = mesh.count_unique_edges() as i64;
        prop_assert_eq!(v, ((nx + 1) * (ny + 1)) as i64);
        prop_assert_eq!(f, (nx * ny) as i64);
        prop_assert_eq!(mesh.boundary_edges.len(), 2 * (nx + ny));
        // Euler characteristic of a disk: V - E + F = 1.
        prop_assert_eq!(v - e + f, 1);
    }

    #[test]
    fn element_geometry_is_consistent(nx in 1usize..10, ny in 1usize..10) {
        let mesh = Mesh::structured(0.2, 0.3, nx, ny, [BoundaryTag::Ambient; 4]).unwrap();
        for e in 0..mesh.n_elements() {
            let coords = mesh.element_coords(e);
            let conn = mesh.elements[e];
            for i in 0..4 {
                prop_assert_eq!(coords[i], mesh.coords[conn[i]]);
            }
            let center = mesh.element_center(e);
            let mean_x: f64 = coords.iter().map(|c| c[0]).sum::<f64>() / 4.0;
            let mean_y: f64 = coords.iter().map(|c| c[1]).sum::<f64>() / 4.0;
            prop_assert!((center[0] - mean_x).abs() < 1e-15);
            prop_assert!((center[1] - mean_y).abs() < 1e-15);
            // Element area from det J equals lx/nx * ly/ny.
            let rule = fem::gauss_rule(2).unwrap();
            let area: f64 = fem::element_geometry(&coords, &rule, e)
                .unwrap()
                .iter()
                .zip(&rule.weights)
                .map(|(s, w)| w * s.det_j)
                .sum();
            let want = 0.2 / nx as f64 * (0.3 / ny as f64);
            prop_assert!(rel_close(area, want, 1e-12));
        }
    }

    #[test]
    fn quadrature_integrates_random_polynomials_exactly(
        n in 1usize..=10,
        coeffs in proptest::collection::vec(-3.0..3.0f64, 20),
    ) {
        let rule = fem::gauss_points_1d(n).unwrap();
        let degree = 2 * n - 1;
        let poly = |x: f64| -> f64 {
            coeffs[..=degree].iter().rev().fold(0.0, |acc, c| acc * x + c)
        };
        let num: f64 = rule.points.iter().zip(&rule.weights).map(|(&x, &w)| w * poly(x)).sum();
        // Exact integral of sum c_p x^p over [-1, 1].
        let exact: f64 = coeffs[..=degree]
            .iter()
            .enumerate()
            .map(|(p, c)| if p % 2 == 1 { 0.0 } else { 2.0 * c / (p as f64 + 1.0) })
            .sum();
        prop_assert!((num - exact).abs() < 1e-12, "n = {n}: {num} vs {exact}");
    }

    #[test]
    fn scenario_round_trips_through_toml(
        lx in 0.05..1.0f64,
        nx in 1usize..30,
        theta_0 in 275.0..320.0f64,
        dt in 0.5..30.0f64,
        steps in 1usize..50,
        alpha_c in 1.0..60.0f64,
    ) {
        let mut s = Scenario::default();
        s.domain.lx = lx;
        s.mesh.nx = nx;
        s.init.theta_0 = theta_0;
        s.solver.dt = dt;
        s.solver.t_end = dt * steps as f64;
        s.bc.alpha_c = alpha_c;
        s.boundary.top = BoundaryTag::Ambient;
        let text = s.to_toml();
        let back = scenario::parse_scenario(&text).unwrap();
        prop_assert_eq!(s, back);
    }

    #[test]
    fn flat_state_layout_round_trips(
        n in 1usize..40,
        w in 0.0..200.0f64,
        theta in 270.0..1000.0f64,
        p in 0.0..1e7f64,
    ) {
        let state = NodalState::uniform(n, w, theta, p);
        let flat = state.to_flat();
        prop_assert_eq!(flat.len(), 3 * n);
        // Blocks are [w; theta; P].
        prop_assert_eq!(flat[0], w);
        prop_assert_eq!(flat[n], theta);
        prop_assert_eq!(flat[2 * n], p);
        let back = NodalState::from_flat(n, &flat);
        prop_assert_eq!(back.w, state.w);
        prop_assert_eq!(back.theta, state.theta);
        prop_assert_eq!(back.p, state.p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jacobian_matches_finite_differences_on_random_states(
        dtheta in proptest::collection::vec(-20.0..220.0f64, 9),
        p_scale in proptest::collection::vec(0.8..3.0f64, 9),
        w_scale in proptest::collection::vec(0.9..1.1f64, 9),
    ) {
        let mesh = Mesh::structured(0.1, 0.1, 2, 2, [BoundaryTag::Fire; 4]).unwrap();
        let m = model();
        let bc = Scenario::default().boundary_params();
        let bv = assembly::BoundaryValues { theta_inf: 500.0, p_inf: 2754.2 };
        let base = hygrotherm::solver::initial_state(&mesh, &m, 298.15, 2754.2);
        let sys = assembly::assemble(&mesh, &m, bc, bv, &base, 5.0).unwrap();

        let mut x = base.clone();
        for i in 0..9 {
            // Keep clear of the dehydration kink at 373.15 K.
            let mut t = 298.15 + dtheta[i];
            if (t - 373.15).abs() < 2.0 {
                t += 5.0;
            }
            x.theta[i] = t;
            x.p[i] *= p_scale[i];
            x.w[i] = m.sorption_isotherm(t, x.p[i]).w * w_scale[i];
        }

        let jac = sys.jacobian(&x).unwrap().to_dense();
        let flat = x.to_flat();
        let r0 = sys.residual(&x, &base).unwrap();
        for col in 0..27 {
            let h = 6e-6 * flat[col].abs().max(1.0);
            let mut plus = flat.clone();
            plus[col] += h;
            let mut minus = flat.clone();
            minus[col] -= h;
            let rp = sys.residual(&NodalState::from_flat(9, &plus), &base).unwrap();
            let rm = sys.residual(&NodalState::from_flat(9, &minus), &base).unwrap();
            for row in 0..27 {
                let fd = (rp[row] - rm[row]) / (2.0 * h);
                let scale = jac[row][col].abs().max(r0[row].abs()).max(1.0);
                prop_assert!(
                    (jac[row][col] - fd).abs() <= 2e-4 * scale,
                    "J[{row}][{col}]: analytic {} vs fd {fd}",
                    jac[row][col]
                );
            }
        }
    }

    #[test]
    fn assembled_capacity_and_conduction_blocks_are_symmetric(
        theta_0 in 280.0..360.0f64,
        rh in 0.3..0.95f64,
    ) {
        // C^ww, C^thth, K^wP and K^thth are Galerkin blocks of symmetric
        // bilinear forms; the coupling block C^thw is the only asymmetry.
        let mesh = Mesh::structured(0.1, 0.15, 3, 2, [BoundaryTag::Fire; 4]).unwrap();
        let m = model();
        let p_0 = rh * m.saturation_pressure(theta_0);
        let state = hygrotherm::solver::initial_state(&mesh, &m, theta_0, p_0);
        let bc = Scenario::default().boundary_params();
        let bv = assembly::BoundaryValues { theta_inf: 400.0, p_inf: p_0 };
        let sys = assembly::assemble(&mesh, &m, bc, bv, &state, 5.0).unwrap();
        let n = mesh.n_nodes();
        let c = sys.c.to_dense();
        let k = sys.k.to_dense();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(rel_close(c[i][j], c[j][i], 1e-12));
                prop_assert!(rel_close(c[n + i][n + j], c[n + j][n + i], 1e-12));
                prop_assert!(rel_close(k[i][2 * n + j], k[j][2 * n + i], 1e-12));
                prop_assert!(rel_close(k[n + i][n + j], k[n + j][n + i], 1e-12));
            }
        }
    }

    #[test]
    fn residual_vanishes_at_the_ambient_fixed_point(
        theta_0 in 280.0..500.0f64,
        rh in 0.2..0.9f64,
        dt in 0.5..20.0f64,
    ) {
        // Uniform state in equilibrium with matching ambient data is a
        // fixed point of the step map for any dt.
        let mesh = Mesh::structured(0.2, 0.2, 3, 3, [BoundaryTag::Ambient; 4]).unwrap();
        let m = model();
        let p_0 = rh * m.saturation_pressure(theta_0);
        let state = hygrotherm::solver::initial_state(&mesh, &m, theta_0, p_0);
        let bc = Scenario::default().boundary_params();
        let bv = assembly::BoundaryValues { theta_inf: theta_0, p_inf: p_0 };
        let sys = assembly::assemble(&mesh, &m, bc, bv, &state, dt).unwrap();
        let r = sys.residual(&state, &state).unwrap();
        let rnorm = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let fnorm = sys.f_norm.max(1.0);
        prop_assert!(rnorm <= 1e-12 * fnorm, "residual {rnorm} vs load {fnorm}");
    }
}
