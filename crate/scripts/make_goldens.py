#!/usr/bin/env python3
"""Reference oracle for the constitutive laws.

Regenerates the golden fixtures under crates/core/fixtures/. Each law is
implemented here a second time, straight from the published sources
(Eurocode 2 conductivity bounds, Bazant & Thonguthai 1978 permeability and
sorption isotherm, IAPWS-IF97 region 4 saturation pressure, Watson
evaporation enthalpy, Dwaikat & Kodur dehydration and tensile strength),
so a transcription error in the library cannot silently agree with itself.

Usage, from the repository root:

    python3 scripts/make_goldens.py

Fixture format: CSV with header `theta_K,P_Pa,value`. Laws of temperature
alone carry P_Pa = 0. Floats are written with repr(), which round-trips
through f64 exactly.
"""

import math
import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "fixtures")

# Table 1 constants and benchmark parameters the fixtures are sampled at.
CEMENT_MASS = 300.0       # kg/m^3
KAPPA_0 = 1.0e-13         # m/s
POROSITY = 0.1
W1 = POROSITY * 1000.0    # saturation water content at 25 C, kg/m^3
F_T0 = 2.0e6              # Pa
T_AMBIENT = 298.15        # K
P_AMBIENT = 2754.2        # Pa


def thermal_conductivity(theta):
    x = (theta - 273.15) / 100.0
    lam_l = 2.0 - 0.2451 * x + 0.0107 * x * x
    lam_u = 1.36 - 0.136 * x + 0.0057 * x * x
    return 0.5 * (lam_l + lam_u)


def specific_heat_solid(theta):
    u = (theta - 273.15) / 120.0
    return 900.0 + 80.0 * u - 4.0 * u * u


def dehydrated_water(theta, c=CEMENT_MASS):
    if theta <= 373.15:
        return 0.0
    if theta <= 973.15:
        return 0.04 * c * (theta - 373.15) / 100.0
    return 0.24 * c


def evaporation_enthalpy(theta):
    if theta > 647.3:
        return 0.0
    return 2.672e5 * (647.3 - theta) ** 0.38


# IAPWS-IF97 region 4 saturation-pressure equation.
IF97_N = [
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
]
T_CRIT = 647.096  # K


def _if97_p_sat(theta):
    n = IF97_N
    ups = theta + n[8] / (theta - n[9])
    a = ups * ups + n[0] * ups + n[1]
    b = n[2] * ups * ups + n[3] * ups + n[4]
    c = n[5] * ups * ups + n[6] * ups + n[7]
    frac = 2.0 * c / (-b + math.sqrt(b * b - 4.0 * a * c))
    return 1.0e6 * frac ** 4  # Pa


def _if97_dp_sat(theta):
    # Analytic derivative of the region 4 equation, Pa/K.
    n = IF97_N
    ups = theta + n[8] / (theta - n[9])
    dups = 1.0 - n[8] / (theta - n[9]) ** 2
    a = ups * ups + n[0] * ups + n[1]
    b = n[2] * ups * ups + n[3] * ups + n[4]
    c = n[5] * ups * ups + n[6] * ups + n[7]
    da = (2.0 * ups + n[0]) * dups
    db = (2.0 * n[2] * ups + n[3]) * dups
    dc = (2.0 * n[5] * ups + n[6]) * dups
    disc = math.sqrt(b * b - 4.0 * a * c)
    ddisc = (b * db - 2.0 * (a * dc + c * da)) / disc
    q = -b + disc
    frac = 2.0 * c / q
    dfrac = (2.0 * dc * q - 2.0 * c * (-db + ddisc)) / (q * q)
    return 1.0e6 * 4.0 * frac ** 3 * dfrac


# C1 log-linear continuation above the critical point so RH stays defined.
_P_CRIT = _if97_p_sat(T_CRIT)
_SLOPE_CRIT = _if97_dp_sat(T_CRIT) / _P_CRIT  # d(ln P)/dT at T_CRIT


def saturation_pressure(theta):
    if theta <= T_CRIT:
        return _if97_p_sat(theta)
    return _P_CRIT * math.exp(_SLOPE_CRIT * (theta - T_CRIT))


def permeability(theta, P, kappa0=KAPPA_0):
    # Bazant & Thonguthai 1978, eqs. (12a)-(12b): a humidity factor below
    # 95 C and a temperature-activated factor above.
    rh = P / saturation_pressure(theta)
    f2 = lambda t: math.exp(2700.0 * (1.0 / 298.15 - 1.0 / t))
    if theta <= 368.15:
        h = min(max(rh, 0.0), 1.0)
        f1 = 0.05 + 0.95 / (1.0 + ((1.0 - h) / 0.25) ** 4)
        rel = f1 * f2(theta)
    else:
        t_c = theta - 273.15
        f3 = math.exp((t_c - 95.0) / (0.881 + 0.214 * (t_c - 95.0)))
        rel = f2(368.15) * f3
    return kappa0 * rel


def _m_bt(theta):
    t_c = theta - 273.15
    u = (t_c + 10.0) ** 2
    return 1.04 - u / (u + 22.3 * 35.0 ** 2)


def _phi_low(theta, rh, c, w1):
    # Bazant & Thonguthai 1978 isotherm, valid for RH <= 0.96; also used
    # extrapolated to RH = 1.04 as the anchor of the saturated branch.
    return c * ((w1 / c) * rh) ** (1.0 / _m_bt(theta))


def sorption_isotherm(theta, P, c=CEMENT_MASS, w1=W1):
    if P <= 0.0 or theta <= 0.0:
        return 0.0
    rh = P / saturation_pressure(theta)
    if rh <= 0.96:
        w = _phi_low(theta, rh, c, w1)
    elif rh >= 1.04:
        w04 = _phi_low(theta, 1.04, c, w1)
        w = w04 * (1.0 + 0.12 * (rh - 1.04))
    else:
        # Cubic Hermite bridge on [0.96, 1.04] matching value and slope of
        # both outer branches.
        inv_m = 1.0 / _m_bt(theta)
        w_a = _phi_low(theta, 0.96, c, w1)
        d_a = inv_m * w_a / 0.96
        w04 = _phi_low(theta, 1.04, c, w1)
        w_b = w04
        d_b = 0.12 * w04
        span = 1.04 - 0.96
        s = (rh - 0.96) / span
        h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
        h10 = s * (1.0 - s) ** 2
        h01 = s * s * (3.0 - 2.0 * s)
        h11 = s * s * (s - 1.0)
        w = h00 * w_a + h10 * span * d_a + h01 * w_b + h11 * span * d_b
    return max(w, 0.0)


def tensile_strength(theta, ft0=F_T0):
    if theta <= 373.15:
        return ft0
    if theta <= 823.15:
        return ft0 * (873.15 - theta) / 500.0
    if theta <= 1473.15:
        return ft0 * (1473.15 - theta) / 6500.0
    return 0.0


def iso_fire_curve(t_s):
    t_min = t_s / 60.0
    return 345.0 * math.log10(8.0 * t_min + 1.0) + 298.15


def central_diff(f, x, rel_step=1e-5):
    h = rel_step * max(abs(x), 1.0)
    return (f(x + h) - f(x - h)) / (2.0 * h)


# 5-point Gauss-Legendre constants from Abramowitz & Stegun table 25.4.
GAUSS5_X = [-0.906179845938664, -0.538469310105683, 0.0,
            0.538469310105683, 0.906179845938664]
GAUSS5_W = [0.236926885056189, 0.478628670499366, 0.568888888888889,
            0.478628670499366, 0.236926885056189]


def _shape(xi, eta):
    n = [0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
         0.25 * (1 + xi) * (1 + eta), 0.25 * (1 - xi) * (1 + eta)]
    dn = [[-0.25 * (1 - eta), -0.25 * (1 - xi)],
          [0.25 * (1 - eta), -0.25 * (1 + xi)],
          [0.25 * (1 + eta), 0.25 * (1 + xi)],
          [-0.25 * (1 + eta), 0.25 * (1 - xi)]]
    return n, dn


def element_matrices(coords):
    """4x4 mass (int N_i N_j) and Laplace (int grad N_i . grad N_j)."""
    mass = [[0.0] * 4 for _ in range(4)]
    lap = [[0.0] * 4 for _ in range(4)]
    for a, xi in enumerate(GAUSS5_X):
        for b, eta in enumerate(GAUSS5_X):
            w = GAUSS5_W[a] * GAUSS5_W[b]
            n, dn = _shape(xi, eta)
            j = [[0.0, 0.0], [0.0, 0.0]]
            for k in range(4):
                for r in range(2):
                    for c in range(2):
                        j[r][c] += coords[k][r] * dn[k][c]
            det = j[0][0] * j[1][1] - j[0][1] * j[1][0]
            inv = [[j[1][1] / det, -j[0][1] / det],
                   [-j[1][0] / det, j[0][0] / det]]
            g = [[inv[0][r] * dn[k][0] + inv[1][r] * dn[k][1] for r in range(2)]
                 for k in range(4)]
            for i in range(4):
                for k in range(4):
                    mass[i][k] += w * det * n[i] * n[k]
                    lap[i][k] += w * det * (g[i][0] * g[k][0] + g[i][1] * g[k][1])
    return mass, lap


def write_fixture(name, rows, header="theta_K,P_Pa,value"):
    path = os.path.join(OUT_DIR, name)
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for theta, p, v in rows:
            fh.write(f"{theta!r},{p!r},{v!r}\n")
    print(f"wrote {path} ({len(rows)} rows)")


def main():
    os.makedirs(OUT_DIR, exist_ok=True)

    # IF97 check values from the release document (table of computed
    # p_sat at 300, 500, 600 K); guards against mistyped coefficients.
    assert abs(_if97_p_sat(300.0) / 0.353658941e4 - 1.0) < 1e-8
    assert abs(_if97_p_sat(500.0) / 0.263889776e7 - 1.0) < 1e-8
    assert abs(_if97_p_sat(600.0) / 0.123443146e8 - 1.0) < 1e-8
    # Watson enthalpy should sit near the latent heat of water at 100 C.
    assert 2.2e6 < evaporation_enthalpy(373.15) < 2.3e6
    assert abs(tensile_strength(600.0) - 1.0926e6) < 1.0
    assert abs(iso_fire_curve(1800.0) - 1119.9459) < 1e-3
    assert abs(iso_fire_curve(3600.0) - 1223.4901) < 1e-3

    theta_grid = [250.0 + 25.0 * i for i in range(55)]  # 250..1600 K

    write_fixture(
        "thermal_conductivity.csv",
        [(t, 0.0, thermal_conductivity(t)) for t in theta_grid],
    )
    write_fixture(
        "specific_heat_solid.csv",
        [(t, 0.0, specific_heat_solid(t)) for t in theta_grid],
    )
    kink_grid = sorted(
        theta_grid + [373.15, 373.151, 500.0, 973.15, 973.151, 823.15, 1473.15]
    )
    write_fixture(
        "dehydrated_water.csv",
        [(t, 0.0, dehydrated_water(t)) for t in kink_grid],
    )
    write_fixture(
        "evaporation_enthalpy.csv",
        [(t, 0.0, evaporation_enthalpy(t)) for t in sorted(theta_grid + [647.3, 647.2])],
    )
    write_fixture(
        "tensile_strength.csv",
        [(t, 0.0, tensile_strength(t)) for t in kink_grid],
    )
    psat_grid = sorted(theta_grid + [273.16, 298.15, 373.15, 647.09, T_CRIT, 700.0])
    write_fixture(
        "saturation_pressure.csv",
        [(t, 0.0, saturation_pressure(t)) for t in psat_grid],
    )

    perm_rows = []
    for t in [278.15, 298.15, 323.15, 348.15, 368.15, 368.16, 400.0, 500.0, 700.0, 1000.0, 1400.0]:
        for rh in [0.2, 0.5, 0.8, 0.95, 1.0]:
            p = rh * saturation_pressure(t)
            perm_rows.append((t, p, permeability(t, p)))
    write_fixture("permeability.csv", perm_rows)

    iso_rows = []
    for t in [278.15, 298.15, 323.15, 348.15, 373.15, 423.15, 473.15, 573.15, 700.0]:
        for rh in [0.1, 0.3, 0.5, 0.8, 0.95, 0.98, 1.0, 1.02, 1.1, 2.0]:
            p = rh * saturation_pressure(t)
            iso_rows.append((t, p, sorption_isotherm(t, p)))
    write_fixture("sorption_isotherm.csv", iso_rows)

    write_fixture(
        "iso_fire_curve.csv",
        [(60.0 * m, 0.0, iso_fire_curve(60.0 * m)) for m in range(0, 125, 2)],
        header="t_s,unused,value",
    )

    # Frozen scalars embedded in the unit tests.
    print("\n-- frozen scalars --")
    print("lambda_c(273.15) =", repr(thermal_conductivity(273.15)))
    print("lambda_c(298.15) =", repr(thermal_conductivity(298.15)))
    print("lambda_c(373.15) =", repr(thermal_conductivity(373.15)))
    print("C_s(393.15)      =", repr(specific_heat_solid(393.15)))
    print("C_s(513.15)      =", repr(specific_heat_solid(513.15)))
    print("w_d(473.15)      =", repr(dehydrated_water(473.15)))
    print("h_alpha(373.15)  =", repr(evaporation_enthalpy(373.15)))
    print("P_sat(298.15)    =", repr(saturation_pressure(298.15)))
    print("P_sat(373.15)    =", repr(saturation_pressure(373.15)))
    print("P_sat(800)       =", repr(saturation_pressure(800.0)))
    print("kappa(298.15,RH=1)/k0 =", repr(permeability(298.15, saturation_pressure(298.15)) / KAPPA_0))
    print("kappa(500,RH=0.5)/k0  =", repr(permeability(500.0, 0.5 * saturation_pressure(500.0)) / KAPPA_0))
    print("m(298.15)        =", repr(_m_bt(298.15)))
    print("Phi(298.15,RH=0.5) =", repr(sorption_isotherm(298.15, 0.5 * saturation_pressure(298.15))))
    print("Phi(298.15,2754.2) =", repr(sorption_isotherm(298.15, P_AMBIENT)))
    print("RH0 = P0/Psat(theta0) =", repr(P_AMBIENT / saturation_pressure(T_AMBIENT)))
    dth = central_diff(lambda t: sorption_isotherm(t, P_AMBIENT), T_AMBIENT)
    dp = central_diff(lambda p: sorption_isotherm(T_AMBIENT, p), P_AMBIENT)
    print("dPhi/dtheta(298.15,2754.2) ~", repr(dth))
    print("dPhi/dP(298.15,2754.2)     ~", repr(dp))
    print("f_t(600, 2e6)    =", repr(tensile_strength(600.0)))
    print("iso_fire(1800 s) =", repr(iso_fire_curve(1800.0)))
    print("iso_fire(3600 s) =", repr(iso_fire_curve(3600.0)))
    print("e*sigma*iso_fire(3600)^4 =", repr(0.7 * 5.67e-8 * iso_fire_curve(3600.0) ** 4))

    # Element matrices on a distorted quad, frozen into the FEM tests.
    trap = [[0.0, 0.0], [0.11, 0.02], [0.13, 0.09], [-0.01, 0.07]]
    mass, lap = element_matrices(trap)
    print("\n-- distorted quad", trap, "--")
    print("mass =", repr(mass))
    print("laplace =", repr(lap))


if __name__ == "__main__":
    main()
