"""Kinematics, 1/omega coefficients and energy-dependent excitation ratios.

All formulas work in hartree; the public ``omega_eV`` arguments are
converted with :data:`HARTREE_EV`. The mu-dependence of the s-channel
coefficient (mu = pi Z / p) is kept symbolic as a (constant, mu-coefficient)
pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coulomb import excitation_energy
from .elements import MatrixElementSet, angular_c

__all__ = [
    "HARTREE_EV",
    "KAPPA_CONVENTIONS",
    "DYNAMIC_WEIGHTS",
    "REFERENCE_C",
    "FIT_ZMIN",
    "ClosedChannelError",
    "DomainError",
    "Kinematics",
    "RatioCoefficients",
    "RatioCurve",
    "ZSeriesFit",
    "ZScaledRatios",
    "kinematics",
    "stobbe_normalization",
    "coulomb_normalization",
    "high_energy_limits",
    "decompose_b0",
    "b_coefficients",
    "ratio_su_exact",
    "ratio_curves",
    "validity_floor_eV",
    "fit_z_series",
    "scaled_ratios",
]

HARTREE_EV = 27.211386

# Interference factor on S_n1 in the p-channel amplitude (P_n + kappa S_n1)
KAPPA_CONVENTIONS = ("literal", "c1")
# Weight on the ISI, FSI and l >= 1 terms: 1 as the amplitude formulas are
# written, 1/2 reproduces the reference coefficient tables
DYNAMIC_WEIGHTS = {"formula": 1.0, "tabulated": 0.5}

# Leading Z^-2 coefficients c_n of the fully perturbative treatment,
# reference values only
REFERENCE_C = {2: 9.2e-2, 3: 1.7e-2, 4: 0.64e-2, 5: 0.30e-2, 6: 0.17e-2}


# lowest charge entering the 1/Z series fit
FIT_ZMIN = 4.0


class ClosedChannelError(ValueError):
    """Photon energy below the threshold of the requested channel."""


class DomainError(ValueError):
    """Photon energy below the intermediate-energy validity floor."""


@dataclass(frozen=True)
class Kinematics:
    omega: float  # hartree
    Z: float
    n: int
    p: float
    p_n: float
    xi: float
    xi_Z: float
    xi_Z_n: float
    mu: float

    @property
    def omega_eV(self) -> float:
        return self.omega * HARTREE_EV


def _threshold(Z, n):
    return excitation_energy(n, Z) + 0.5 * Z**2


def kinematics(omega_eV: float, Z: float, n: int = 1) -> Kinematics:
    """Momenta and Sommerfeld parameters at photon energy ``omega_eV``.

    Raises
    ------
    ClosedChannelError
        If omega does not exceed delta_n + Z^2/2.
    """
    omega = omega_eV / HARTREE_EV
    thr = _threshold(Z, n)
    if not omega > thr:
        raise ClosedChannelError(
            f"channel n={n} closed for Z={Z}: omega={omega_eV:g} eV "
            f"<= threshold {thr * HARTREE_EV:g} eV"
        )
    p = math.sqrt(2.0 * omega)
    p_n = math.sqrt(p * p - 2.0 * excitation_energy(n, Z))
    return Kinematics(
        omega=omega,
        Z=Z,
        n=n,
        p=p,
        p_n=p_n,
        xi=1.0 / p,
        xi_Z=Z / p,
        xi_Z_n=Z / p_n,
        mu=math.pi * Z / p,
    )


def stobbe_normalization(xi: float) -> tuple[float, float]:
    """(N^2, h) with h(x) = 2x / (e^x + e^-x) at x = pi xi and N^2 = h e^{-pi xi}.

    Diagnostic only; ratios carry just the Stobbe exponent difference.
    """
    if xi <= 0:
        raise ValueError("xi must be positive")
    x = math.pi * xi
    h = x / math.cosh(x)
    return h * math.exp(-x), h


def coulomb_normalization(xi: float) -> float:
    """Squared continuum normalization 2 pi xi / (1 - exp(-2 pi xi)), diagnostic."""
    if xi <= 0:
        raise ValueError("xi must be positive")
    x = 2.0 * math.pi * xi
    return x / -math.expm1(-x)


def high_energy_limits(me: MatrixElementSet) -> dict[int, float]:
    s1 = me.s(1)
    if s1 == 0:
        raise ZeroDivisionError("S_1 vanishes")
    return {n: (me.s(n) / s1) ** 2 for n in range(1, me.n_max + 1)}


def decompose_b0(me: MatrixElementSet, weight: float = 1.0) -> dict[int, dict[str, float]]:
    """Kinematical, ISI and FSI parts of the s-channel coefficient per n.

    ``kinematical`` multiplies (1 - mu); ``isi`` and ``fsi`` are constants
    already multiplied by ``weight``.
    """
    s1 = me.s(1)
    out = {}
    for n in range(1, me.n_max + 1):
        sn = me.s(n)
        ratio = sn / s1
        a_n = ratio**2
        kin = a_n * excitation_energy(n, me.Z)
        isi = 2.0 * sn * (me.Q[n] - ratio * me.Q[1]) / s1**2
        fsi = (
            2.0 * sn * (me.V[n] + me.W[n] - ratio * (me.V[1] + me.W[1]))
            + me.U[n] ** 2
            - a_n * me.U[1] ** 2
        ) / s1**2
        out[n] = {"kinematical": kin, "isi": weight * isi, "fsi": weight * fsi}
    return out


@dataclass
class RatioCoefficients:
    """High-energy limits and 1/omega coefficients for one nuclear charge.

    ``B_l[(n, l)]`` holds the l >= 1 coefficients; the s-channel coefficient
    is ``d[n] + mu * f[n]``.
    """

    Z: float
    n_max: int
    l_max: int
    kappa: str
    dynamic: str
    A: dict = field(default_factory=dict)
    d: dict = field(default_factory=dict)
    f: dict = field(default_factory=dict)
    parts: dict = field(default_factory=dict)
    B_l: dict = field(default_factory=dict)

    def b_n0(self, n: int, mu: float) -> float:
        return self.d[n] + mu * self.f[n]

    def b_nl(self, n: int, l: int, mu: float = 0.0) -> float:
        return self.b_n0(n, mu) if l == 0 else self.B_l.get((n, l), 0.0)

    def b_n_const(self, n: int) -> float:
        """mu-independent part of B_n."""
        return self.d[n] + sum(v for (m, _), v in self.B_l.items() if m == n)

    def b_n(self, n: int, mu: float) -> float:
        return self.b_n_const(n) + mu * self.f[n]

    def ls(self, n: int) -> list[int]:
        return list(range(min(n - 1, self.l_max) + 1))


def b_coefficients(
    me: MatrixElementSet, kappa: str = "c1", dynamic: str = "tabulated"
) -> RatioCoefficients:
    """Assemble A_n, d_n, f_n and the l >= 1 coefficients.

    ``kappa`` selects the factor on S_n1 in the p-channel amplitude:
    ``"literal"`` uses 1, ``"c1"`` uses c_1 = -sqrt(3)/2. ``dynamic``
    selects the weight on the interaction terms (see DYNAMIC_WEIGHTS).
    """
    if kappa not in KAPPA_CONVENTIONS:
        raise ValueError(f"unknown kappa convention {kappa!r}")
    if dynamic not in DYNAMIC_WEIGHTS:
        raise ValueError(f"unknown dynamic weight {dynamic!r}")
    weight = DYNAMIC_WEIGHTS[dynamic]
    s1 = me.s(1)
    parts = decompose_b0(me, weight)
    coeffs = RatioCoefficients(me.Z, me.n_max, me.l_max, kappa, dynamic)
    coeffs.A = high_energy_limits(me)
    coeffs.parts = parts
    k1 = 1.0 if kappa == "literal" else angular_c(1)
    for n in range(1, me.n_max + 1):
        p = parts[n]
        coeffs.d[n] = p["kinematical"] + p["isi"] + p["fsi"]
        coeffs.f[n] = -p["kinematical"]
        for l in range(1, min(n - 1, me.l_max) + 1):
            if l == 1:
                amp = me.P[n] + k1 * me.s(n, 1)
            else:
                amp = angular_c(l) * me.s(n, l)
            coeffs.B_l[(n, l)] = weight * amp**2 / s1**2
    return coeffs


def ratio_su_exact(A_n: float, kin: Kinematics) -> float:
    """Shake-up ratio with the exact n-dependence of the channel momentum."""
    return A_n * kin.p / kin.p_n * math.exp(-math.pi * (kin.xi_Z_n - kin.xi_Z))


def validity_floor_eV(Z: float) -> float:
    """Lowest photon energy of the intermediate domain, 4 Z^2/2 hartree."""
    return 4.0 * 0.5 * Z**2 * HARTREE_EV


@dataclass
class RatioCurve:
    """R and X = R_nl / R_n sampled on a photon-energy grid; l = -1 is the sum."""

    Z: float
    n: int
    l: int
    omega_eV: np.ndarray
    R: np.ndarray
    X: np.ndarray
    su_exact: np.ndarray | None = None
    in_domain: np.ndarray | None = None


def ratio_curves(
    coeffs: RatioCoefficients, omega_eV, allow_low_omega: bool = False
) -> list[RatioCurve]:
    """Per-(n, l) and summed ratio curves, sorted by (n, l) with the sum first.

    Raises
    ------
    ClosedChannelError
        If any grid energy closes a channel n <= n_max.
    DomainError
        If the grid dips below :func:`validity_floor_eV` without
        ``allow_low_omega``.
    """
    w_eV = np.sort(np.asarray(omega_eV, dtype=float))
    Z = coeffs.Z
    kinematics(w_eV[0], Z, coeffs.n_max)  # raises if any channel is closed
    floor = validity_floor_eV(Z)
    in_domain = w_eV >= floor * (1 - 1e-12)
    if not allow_low_omega and not in_domain.all():
        raise DomainError(
            f"grid starts at {w_eV[0]:g} eV, below the validity floor {floor:g} eV for Z={Z}"
        )
    w = w_eV / HARTREE_EV
    mu = math.pi * Z / np.sqrt(2.0 * w)
    curves = []
    for n in range(2, coeffs.n_max + 1):
        per_l = {}
        for l in coeffs.ls(n):
            if l == 0:
                per_l[0] = coeffs.A[n] + (coeffs.d[n] + mu * coeffs.f[n]) / (2.0 * w)
            else:
                per_l[l] = np.full_like(w, coeffs.B_l[(n, l)]) / (2.0 * w)
        total = sum(per_l.values())
        su = np.array([ratio_su_exact(coeffs.A[n], kinematics(e, Z, n)) for e in w_eV])
        curves.append(RatioCurve(Z, n, -1, w_eV, total, np.ones_like(w), su, in_domain))
        for l, r in per_l.items():
            curves.append(RatioCurve(Z, n, l, w_eV, r, r / total, None, in_domain))
    return curves


@dataclass
class ZSeriesFit:
    """Least-squares fit A_n Z^2 = a_n + b_n / Z per n."""

    zs: tuple
    a: dict = field(default_factory=dict)
    b: dict = field(default_factory=dict)
    residual: dict = field(default_factory=dict)
    reference_c: dict = field(default_factory=lambda: dict(REFERENCE_C))

    def predict(self, n: int, Z: float) -> float:
        """Fitted A_n at charge Z."""
        return self.a[n] / Z**2 + self.b[n] / Z**3


def fit_z_series(
    limits: dict[float, dict[int, float]], zmin: float = FIT_ZMIN
) -> ZSeriesFit:
    """Fit A_n Z^2 against 1/Z for every n shared by all charges >= ``zmin``.

    ``limits`` maps Z to {n: A_n}. Only charges at the large-Z end enter
    by default, where a two-term 1/Z series is meaningful; helium pulls
    b_2 up by about 40%. The stored residual is the largest absolute
    deviation of A_n Z^2 from the fit.
    """
    zs = tuple(sorted(z for z in limits if z >= zmin))
    if len(zs) < 3:
        raise ValueError(f"need at least 3 charges >= {zmin:g} for the Z-series fit")
    ns = sorted(set.intersection(*(set(limits[z]) for z in zs)) - {1})
    z = np.array(zs, dtype=float)
    design = np.column_stack([np.ones_like(z), 1.0 / z])
    fit = ZSeriesFit(zs)
    for n in ns:
        y = np.array([limits[zz][n] * zz**2 for zz in zs])
        (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
        fit.a[n] = float(a)
        fit.b[n] = float(b)
        fit.residual[n] = float(np.max(np.abs(design @ np.array([a, b]) - y)))
    return fit


@dataclass
class ZScaledRatios:
    """Coefficients divided by Z^2 A_n (mu-coefficient kept separately)."""

    Z: float
    r_n0_d: dict = field(default_factory=dict)
    r_n0_f: dict = field(default_factory=dict)
    r_nl: dict = field(default_factory=dict)
    r_n_d: dict = field(default_factory=dict)
    r_n_f: dict = field(default_factory=dict)

    def r_n(self, n: int, mu: float) -> float:
        return self.r_n_d[n] + mu * self.r_n_f[n]


def scaled_ratios(coeffs: RatioCoefficients) -> ZScaledRatios:
    Z = coeffs.Z
    out = ZScaledRatios(Z)
    for n in range(2, coeffs.n_max + 1):
        scale = Z**2 * coeffs.A[n]
        out.r_n0_d[n] = coeffs.d[n] / scale
        out.r_n0_f[n] = coeffs.f[n] / scale
        for l in coeffs.ls(n)[1:]:
            out.r_nl[(n, l)] = coeffs.B_l[(n, l)] / scale
        out.r_n_d[n] = out.r_n0_d[n] + sum(v for (m, _), v in out.r_nl.items() if m == n)
        out.r_n_f[n] = out.r_n0_f[n]
    return out
