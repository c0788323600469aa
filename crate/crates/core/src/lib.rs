//! Finite-element simulation of coupled heat and moisture transport in
//! concrete exposed to fire, with a pore-pressure spalling assessment.
//!
//! The model tracks three nodal fields on a structured quadrilateral
//! mesh: evaporable water content w [kg/m3], temperature theta [K] and
//! pore pressure P [Pa], closed by the sorption-isotherm state equation
//! w = Phi(theta, P). Time marches with a semi-implicit scheme that
//! freezes transport coefficients at the previous step; each step solves
//! a nonlinear algebraic system by a damped Newton iteration with an
//! analytic Jacobian and a sparse direct factorization.
//!
//! Crate layout: [`materials`] holds the constitutive laws, [`mesh`] and
//! [`fem`] the discretization, [`assembly`] the element integrals and the
//! step system, [`solver`] the Newton and time loops, [`spalling`] the
//! post-processed failure zones, [`scenario`] the configuration surface
//! and [`io`] the file formats.

pub mod assembly;
pub mod fem;
pub mod io;
pub mod materials;
pub mod mesh;
pub mod scenario;
pub mod solver;
pub mod spalling;
pub mod sparse;

pub use assembly::{BlockSystem, BoundaryParams, BoundaryValues, NodalState};
pub use materials::{ConstitutiveModel, MaterialConstants};
pub use mesh::{BoundaryTag, Mesh};
pub use scenario::{parse_scenario, FireCurve, Scenario};
pub use solver::{RunEvent, RunOutcome, SolverConfig, StepDiagnostics, Trajectory};
pub use spalling::{SpallingReport, Zone};
