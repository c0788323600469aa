//! Constitutive laws for concrete at high temperature.
//!
//! All laws work in SI units: temperature in Kelvin, pressure in Pascal,
//! water content in kg per m3 of concrete. Formulas that are published with
//! Celsius arguments convert internally. Sources: Eurocode 2 conductivity
//! bounds, Bazant & Thonguthai (1978) permeability and sorption isotherm,
//! IAPWS-IF97 region 4 saturation pressure, the Watson evaporation
//! enthalpy, and the Dwaikat & Kodur (2009) dehydration and tensile
//! strength relations. The committed fixtures under `fixtures/` pin every
//! law against an independent reference script (`scripts/make_goldens.py`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Density of liquid water used to convert porosity into the saturation
/// water content w1 [kg/m3].
const RHO_WATER: f64 = 1000.0;

/// Critical temperature of water [K]; the IF97 region 4 correlation is
/// defined up to this point and continued log-linearly above it.
const T_CRIT: f64 = 647.096;

/// Cutoff of the Watson enthalpy branch [K].
const T_WATSON: f64 = 647.3;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("material.{field} must be strictly positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("material.porosity must lie in (0, 1), got {0}")]
    PorosityRange(f64),
}

/// Bulk constants of the concrete mix.
///
/// Defaults reproduce the benchmark mix: rho_s = 2400, C_w = 4181,
/// h_d = 2.4e6, c = 300, kappa_0 = 1e-13, phi = 0.1, f_t0 = 2 MPa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialConstants {
    /// Density of the solid microstructure [kg/m3].
    pub rho_s: f64,
    /// Isobaric heat capacity of liquid water [J/(kg K)].
    pub c_w: f64,
    /// Enthalpy of dehydration [J/kg].
    pub h_d: f64,
    /// Mass of cement per m3 of concrete [kg/m3].
    pub cement_mass: f64,
    /// Reference permeability [m/s].
    pub kappa_0: f64,
    /// Gravitational acceleration [m/s2].
    pub g: f64,
    /// Porosity [-].
    pub porosity: f64,
    /// Initial tensile strength [Pa].
    pub f_t0: f64,
}

impl Default for MaterialConstants {
    fn default() -> Self {
        Self {
            rho_s: 2400.0,
            c_w: 4181.0,
            h_d: 2.4e6,
            cement_mass: 300.0,
            kappa_0: 1.0e-13,
            g: 9.81,
            porosity: 0.1,
            f_t0: 2.0e6,
        }
    }
}

impl MaterialConstants {
    pub fn validate(&self) -> Result<(), MaterialError> {
        let fields = [
            ("rho_s", self.rho_s),
            ("c_w", self.c_w),
            ("h_d", self.h_d),
            ("cement_mass", self.cement_mass),
            ("kappa_0", self.kappa_0),
            ("g", self.g),
            ("f_t0", self.f_t0),
        ];
        for (field, value) in fields {
            if !(value > 0.0) {
                return Err(MaterialError::NonPositive { field, value });
            }
        }
        if !(self.porosity > 0.0 && self.porosity < 1.0) {
            return Err(MaterialError::PorosityRange(self.porosity));
        }
        Ok(())
    }
}

/// Sorption isotherm evaluation: the water content and both partial
/// derivatives the Newton solver needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isotherm {
    /// w = Phi(theta, P) [kg/m3].
    pub w: f64,
    /// dPhi/dtheta [kg/(m3 K)].
    pub dw_dtheta: f64,
    /// dPhi/dP [kg/(m3 Pa)].
    pub dw_dp: f64,
}

/// Bundle of every constitutive function, closed over the mix constants.
///
/// All methods are pure; the model is freely shareable across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstitutiveModel {
    pub constants: MaterialConstants,
}

impl ConstitutiveModel {
    pub fn new(constants: MaterialConstants) -> Result<Self, MaterialError> {
        constants.validate()?;
        Ok(Self { constants })
    }

    /// Saturation water content at 25 C [kg/m3], pores filled with liquid.
    pub fn w1(&self) -> f64 {
        self.constants.porosity * RHO_WATER
    }

    /// Thermal conductivity lambda_c [W/(m K)]: mean of the Eurocode 2
    /// lower and upper limit curves.
    pub fn thermal_conductivity(&self, theta: f64) -> f64 {
        let x = (theta - 273.15) / 100.0;
        let lam_l = 2.0 - 0.2451 * x + 0.0107 * x * x;
        let lam_u = 1.36 - 0.136 * x + 0.0057 * x * x;
        0.5 * (lam_l + lam_u)
    }

    /// Specific heat of the solid matrix C_s [J/(kg K)].
    pub fn specific_heat_solid(&self, theta: f64) -> f64 {
        let u = (theta - 273.15) / 120.0;
        900.0 + 80.0 * u - 4.0 * u * u
    }

    /// Mass of dehydrated water w_d [kg/m3] and its slope [kg/(m3 K)].
    ///
    /// Piecewise linear: zero below 373.15 K, rising at 0.04 c per 100 K up
    /// to 973.15 K, constant 0.24 c above. At the kinks the left-sided
    /// slope is reported.
    pub fn dehydrated_water(&self, theta: f64) -> (f64, f64) {
        let c = self.constants.cement_mass;
        if theta <= 373.15 {
            (0.0, 0.0)
        } else if theta <= 973.15 {
            (0.04 * c * (theta - 373.15) / 100.0, 0.04 * c / 100.0)
        } else {
            (0.24 * c, 0.0)
        }
    }

    /// Evaporation enthalpy h_alpha [J/kg] by the Watson equation; zero
    /// above 647.3 K where no liquid water remains.
    pub fn evaporation_enthalpy(&self, theta: f64) -> f64 {
        if theta > T_WATSON {
            0.0
        } else {
            2.672e5 * (T_WATSON - theta).powf(0.38)
        }
    }

    /// Vapor saturation pressure P_sat [Pa].
    ///
    /// IAPWS-IF97 region 4 up to the critical point, continued above with
    /// constant d(ln P)/dtheta so relative humidity stays defined at fire
    /// temperatures.
    pub fn saturation_pressure(&self, theta: f64) -> f64 {
        saturation_pressure_with_derivative(theta).0
    }

    /// Permeability kappa [m/s], Bazant & Thonguthai (1978) eqs. (12a-12b).
    ///
    /// Below 95 C the reference value is modulated by a relative-humidity
    /// factor; above, humidity drops out and a temperature activation
    /// takes over.
    pub fn permeability(&self, theta: f64, p: f64) -> f64 {
        let f2 = |t: f64| (2700.0 * (1.0 / 298.15 - 1.0 / t)).exp();
        let rel = if theta <= 368.15 {
            let rh = p / self.saturation_pressure(theta);
            let h = rh.clamp(0.0, 1.0);
            let q = (1.0 - h) / 0.25;
            let f1 = 0.05 + 0.95 / (1.0 + q * q * q * q);
            f1 * f2(theta)
        } else {
            let t_c = theta - 273.15;
            let f3 = ((t_c - 95.0) / (0.881 + 0.214 * (t_c - 95.0))).exp();
            f2(368.15) * f3
        };
        self.constants.kappa_0 * rel
    }

    /// Sorption isotherm w = Phi(theta, P) with analytic partials.
    ///
    /// Bazant & Thonguthai (1978) relations for RH <= 0.96 and RH >= 1.04,
    /// joined by the cubic Hermite interpolant that matches value and slope
    /// of both outer branches. Returns zero (with zero derivatives) for
    /// non-positive pressure or temperature.
    pub fn sorption_isotherm(&self, theta: f64, p: f64) -> Isotherm {
        let zero = Isotherm { w: 0.0, dw_dtheta: 0.0, dw_dp: 0.0 };
        if p <= 0.0 || theta <= 0.0 {
            return zero;
        }
        let c = self.constants.cement_mass;
        let k = self.w1() / c;
        let (p_sat, dp_sat) = saturation_pressure_with_derivative(theta);
        let h = p / p_sat;
        let dh_dp = 1.0 / p_sat;
        let dh_dtheta = -h * dp_sat / p_sat;
        let (inv_m, dinv_m) = inv_m_with_derivative(theta);

        // Low branch and its derivatives, also evaluated at the bridge
        // anchors 0.96 and 1.04. phi = c (k h)^(1/m).
        let low = |hh: f64| -> (f64, f64, f64) {
            let w = c * (k * hh).powf(inv_m);
            let dw_dh = inv_m * w / hh;
            let dw_dth = w * (k * hh).ln() * dinv_m;
            (w, dw_dh, dw_dth)
        };

        let (w, dw_dh, dw_dth_data) = if h <= 0.96 {
            low(h)
        } else if h >= 1.04 {
            let (w04, _, dw04_dth) = low(1.04);
            let lin = 1.0 + 0.12 * (h - 1.04);
            (w04 * lin, 0.12 * w04, dw04_dth * lin)
        } else {
            // Hermite data: value and d/dh at h = 0.96 from the low branch,
            // at h = 1.04 from the saturated branch.
            let (w_a, d_a, dw_a_dth) = low(0.96);
            let dd_a_dth = dinv_m * w_a / 0.96 + inv_m * dw_a_dth / 0.96;
            let (w_b, _, dw_b_dth) = low(1.04);
            let d_b = 0.12 * w_b;
            let dd_b_dth = 0.12 * dw_b_dth;

            let span = 1.04 - 0.96;
            let s = (h - 0.96) / span;
            let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
            let h10 = s * (1.0 - s) * (1.0 - s);
            let h01 = s * s * (3.0 - 2.0 * s);
            let h11 = s * s * (s - 1.0);
            let dh00 = 6.0 * s * s - 6.0 * s;
            let dh10 = 3.0 * s * s - 4.0 * s + 1.0;
            let dh01 = 6.0 * s - 6.0 * s * s;
            let dh11 = 3.0 * s * s - 2.0 * s;

            let w = h00 * w_a + h10 * span * d_a + h01 * w_b + h11 * span * d_b;
            let dw_dh = (dh00 * w_a + dh01 * w_b) / span + dh10 * d_a + dh11 * d_b;
            let dw_dth =
                h00 * dw_a_dth + h10 * span * dd_a_dth + h01 * dw_b_dth + h11 * span * dd_b_dth;
            (w, dw_dh, dw_dth)
        };

        if w <= 0.0 {
            return zero;
        }
        Isotherm {
            w,
            dw_dtheta: dw_dth_data + dw_dh * dh_dtheta,
            dw_dp: dw_dh * dh_dp,
        }
    }

    /// Tensile strength f_t [Pa], piecewise linear in temperature.
    pub fn tensile_strength(&self, theta: f64) -> f64 {
        tensile_strength(theta, self.constants.f_t0)
    }
}

/// Tensile strength decay with temperature, from the cold strength f_t0.
pub fn tensile_strength(theta: f64, f_t0: f64) -> f64 {
    if theta <= 373.15 {
        f_t0
    } else if theta <= 823.15 {
        f_t0 * (873.15 - theta) / 500.0
    } else if theta <= 1473.15 {
        f_t0 * (1473.15 - theta) / 6500.0
    } else {
        0.0
    }
}

/// 1/m(theta) of the Bazant-Thonguthai isotherm and its theta-derivative.
/// m = 1.04 - (T_C + 10)^2 / ((T_C + 10)^2 + 22.3 * 35^2), T_C in Celsius.
fn inv_m_with_derivative(theta: f64) -> (f64, f64) {
    const K: f64 = 22.3 * 35.0 * 35.0;
    let t10 = theta - 273.15 + 10.0;
    let u = t10 * t10;
    let m = 1.04 - u / (u + K);
    let dm = -K / ((u + K) * (u + K)) * 2.0 * t10;
    (1.0 / m, -dm / (m * m))
}

/// IF97 region 4 coefficients.
const IF97_N: [f64; 10] = [
    0.11670521452767e4,
    -0.72421316703206e6,
    -0.17073846940092e2,
    0.12020824702470e5,
    -0.32325550322333e7,
    0.14915108613530e2,
    -0.48232657361591e4,
    0.40511340542057e6,
    -0.23855557567849,
    0.65017534844798e3,
];

fn if97_p_sat_and_derivative(theta: f64) -> (f64, f64) {
    let n = &IF97_N;
    let d = theta - n[9];
    let ups = theta + n[8] / d;
    let dups = 1.0 - n[8] / (d * d);
    let a = ups * ups + n[0] * ups + n[1];
    let b = n[2] * ups * ups + n[3] * ups + n[4];
    let c = n[5] * ups * ups + n[6] * ups + n[7];
    let da = (2.0 * ups + n[0]) * dups;
    let db = (2.0 * n[2] * ups + n[3]) * dups;
    let dc = (2.0 * n[5] * ups + n[6]) * dups;
    let disc = (b * b - 4.0 * a * c).sqrt();
    let ddisc = (b * db - 2.0 * (a * dc + c * da)) / disc;
    let q = -b + disc;
    let frac = 2.0 * c / q;
    let dfrac = (2.0 * dc * q - 2.0 * c * (ddisc - db)) / (q * q);
    let p = 1.0e6 * frac.powi(4);
    let dp = 1.0e6 * 4.0 * frac.powi(3) * dfrac;
    (p, dp)
}

/// P_sat and dP_sat/dtheta [Pa, Pa/K] with the C1 log-linear continuation
/// above the critical point.
pub fn saturation_pressure_with_derivative(theta: f64) -> (f64, f64) {
    if theta <= T_CRIT {
        if97_p_sat_and_derivative(theta)
    } else {
        let (p_c, dp_c) = if97_p_sat_and_derivative(T_CRIT);
        let slope = dp_c / p_c;
        let p = p_c * (slope * (theta - T_CRIT)).exp();
        (p, slope * p)
    }
}
