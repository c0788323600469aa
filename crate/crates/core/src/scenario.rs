//! Scenario configuration: geometry, boundary data, fire curve, material
//! constants, solver settings and output cadence, parsed from a TOML
//! document with dotted keys (`solver.dt = 5.0`). The defaults reproduce
//! the heated square column benchmark: 0.2 x 0.2 m, 80 x 80 elements, all
//! four sides fire-exposed under the ISO 834 curve.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{BoundaryParams, BoundaryValues};
use crate::materials::{ConstitutiveModel, MaterialConstants, MaterialError};
use crate::mesh::{BoundaryTag, Mesh, MeshError};
use crate::solver::SolverConfig;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn invalid(key: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { key: key.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    /// Side lengths [m].
    pub lx: f64,
    pub ly: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { lx: 0.2, ly: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    pub nx: usize,
    pub ny: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { nx: 80, ny: 80 }
    }
}

/// Per-side boundary tags, counter-clockwise from the bottom side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryConfig {
    pub bottom: BoundaryTag,
    pub right: BoundaryTag,
    pub top: BoundaryTag,
    pub left: BoundaryTag,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self {
            bottom: BoundaryTag::Fire,
            right: BoundaryTag::Fire,
            top: BoundaryTag::Fire,
            left: BoundaryTag::Fire,
        }
    }
}

impl BoundaryConfig {
    pub fn sides(&self) -> [BoundaryTag; 4] {
        [self.bottom, self.right, self.top, self.left]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FireCurve {
    Iso834,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FireConfig {
    pub curve: FireCurve,
    /// Gas temperature [K] when `curve = "constant"`.
    pub theta_inf: f64,
}

impl Default for FireConfig {
    fn default() -> Self {
        Self { curve: FireCurve::Iso834, theta_inf: 298.15 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitConfig {
    /// Uniform initial temperature [K].
    pub theta_0: f64,
    /// Uniform initial pore pressure [Pa].
    pub p_0: f64,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self { theta_0: 298.15, p_0: 2754.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BcConfig {
    /// Heat film coefficient [W/(m2 K)].
    pub alpha_c: f64,
    /// Moisture film coefficient [m/s].
    pub beta_c: f64,
    /// Surface emissivity, in [0, 1].
    pub emissivity: f64,
    /// Stefan-Boltzmann constant [W/(m2 K4)].
    pub sigma: f64,
    /// Ambient vapor pressure [Pa].
    pub p_inf: f64,
}

impl Default for BcConfig {
    fn default() -> Self {
        Self { alpha_c: 25.0, beta_c: 0.019, emissivity: 0.7, sigma: 5.67e-8, p_inf: 2754.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Snapshot cadence [s]; 0 keeps only the initial and final states.
    pub snapshot_every: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { snapshot_every: 300.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub domain: DomainConfig,
    pub mesh: MeshConfig,
    pub boundary: BoundaryConfig,
    pub fire: FireConfig,
    pub init: InitConfig,
    pub bc: BcConfig,
    pub material: MaterialConstants,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

/// ISO 834 standard fire curve [K]; `t` in seconds, the formula takes
/// minutes.
pub fn iso_fire_curve(t: f64) -> f64 {
    345.0 * (8.0 * (t / 60.0) + 1.0).log10() + 298.15
}

/// Parse and validate a scenario document; empty input yields the
/// benchmark defaults.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario: Scenario = toml::from_str(text)?;
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let positive = [
            ("domain.lx", self.domain.lx),
            ("domain.ly", self.domain.ly),
            ("fire.theta_inf", self.fire.theta_inf),
            ("init.theta_0", self.init.theta_0),
            ("init.p_0", self.init.p_0),
            ("bc.sigma", self.bc.sigma),
        ];
        for (key, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(invalid(key, format!("must be positive, got {value}")));
            }
        }
        let non_negative = [
            ("bc.alpha_c", self.bc.alpha_c),
            ("bc.beta_c", self.bc.beta_c),
            ("bc.p_inf", self.bc.p_inf),
            ("output.snapshot_every", self.output.snapshot_every),
        ];
        for (key, value) in non_negative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(invalid(key, format!("must be non-negative, got {value}")));
            }
        }
        if !(0.0..=1.0).contains(&self.bc.emissivity) {
            return Err(invalid(
                "bc.emissivity",
                format!("must lie in [0, 1], got {}", self.bc.emissivity),
            ));
        }
        if self.mesh.nx == 0 || self.mesh.ny == 0 {
            return Err(invalid("mesh.nx", "element counts must be at least 1"));
        }
        self.material.validate()?;
        self.solver.validate().map_err(|m| invalid("solver", m))?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn build_mesh(&self) -> Result<Mesh, ScenarioError> {
        Ok(Mesh::structured(
            self.domain.lx,
            self.domain.ly,
            self.mesh.nx,
            self.mesh.ny,
            self.boundary.sides(),
        )?)
    }

    pub fn constitutive_model(&self) -> Result<ConstitutiveModel, ScenarioError> {
        Ok(ConstitutiveModel::new(self.material)?)
    }

    pub fn boundary_params(&self) -> BoundaryParams {
        BoundaryParams {
            alpha_c: self.bc.alpha_c,
            beta_c: self.bc.beta_c,
            emissivity: self.bc.emissivity,
            sigma: self.bc.sigma,
        }
    }

    /// Gas temperature [K] seen by the whole boundary at time t; radiation
    /// additionally applies on fire-tagged edges only.
    pub fn theta_inf(&self, t: f64) -> f64 {
        match self.fire.curve {
            FireCurve::Iso834 => iso_fire_curve(t),
            FireCurve::Constant => self.fire.theta_inf,
        }
    }

    pub fn boundary_values(&self, t: f64) -> BoundaryValues {
        BoundaryValues { theta_inf: self.theta_inf(t), p_inf: self.bc.p_inf }
    }

    /// Relative humidity implied by the initial condition.
    pub fn initial_relative_humidity(&self) -> Result<f64, ScenarioError> {
        let model = self.constitutive_model()?;
        Ok(self.init.p_0 / model.saturation_pressure(self.init.theta_0))
    }
}
