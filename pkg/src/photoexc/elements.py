"""Radial matrix elements between the coalescence profile and ion orbitals.

Every element is an integral ``int dr r^2 R_nl(r) g(r)`` with ``g`` built
from the coalescence profile of the initial wavefunction:

=====  ==========================================================  =====
name   g(r)                                                        l
=====  ==========================================================  =====
S      sqrt(4 pi) psi0                                             any
Q      -sqrt(4 pi) [psi_rr + psi_rhorho / 3 + 2 psi_rho / (3 r)]   0
P      sqrt(4 pi) (2 / sqrt 3) psi_rho                             1
U      sqrt(4 pi) ln(nu r) psi0                                    0
V      sqrt(4 pi) / 2 d(psi0)/dr                                   0
W      -sqrt(4 pi) / 2 ln^2(nu r) psi0                             0
=====  ==========================================================  =====

``nu`` is the infrared regulator of the electron-electron Coulomb
interaction; it drops out of every physical combination. The Bohr radius
is 1.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .coulomb import CoulombOrbital, radial_value
from .quadrature import integrate
from .wavefunction import CoalescenceProfile, CorrelatedWavefunction, coalescence_profile

__all__ = [
    "MatrixElementSet",
    "radial_integral",
    "shake_overlap",
    "isi_s",
    "isi_p",
    "fsi_elements",
    "angular_c",
    "angular_c_quadrature",
    "compute_elements",
]

SQRT_4PI = math.sqrt(4.0 * math.pi)
ELEMENT_COLUMNS = ("Z", "n", "l", "S", "Q", "P", "U", "V", "W", "nu")


def radial_integral(g, orb: CoulombOrbital, rtol=1e-10, per_octave=2) -> float:
    """``int_0^inf dr r^2 R_nl(r) g(r)`` for a vectorized decaying ``g``."""
    return integrate(
        lambda r: r * r * radial_value(orb, r) * g(r), rtol=rtol, per_octave=per_octave
    )


def _require_l(orb, l):
    if orb.l != l:
        raise ValueError(f"expected an l={l} orbital, got n={orb.n}, l={orb.l}")


def shake_overlap(profile: CoalescenceProfile, orb: CoulombOrbital, **kw) -> float:
    return SQRT_4PI * radial_integral(profile.psi0, orb, **kw)


def isi_s(profile: CoalescenceProfile, orb: CoulombOrbital, **kw) -> float:
    _require_l(orb, 0)

    def g(r):
        psi0, d_r, d_rho, d_rr, d_rhorho, _ = profile(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            cross = np.where(r > 0, 2.0 * d_rho / (3.0 * r), 0.0)
        return d_rr + d_rhorho / 3.0 + cross

    return -SQRT_4PI * radial_integral(g, orb, **kw)


def isi_p(profile: CoalescenceProfile, orb: CoulombOrbital, **kw) -> float:
    _require_l(orb, 1)
    return SQRT_4PI * 2.0 / math.sqrt(3.0) * radial_integral(profile.d_rho, orb, **kw)


def _log(r, nu):
    with np.errstate(divide="ignore"):
        return np.where(r > 0, np.log(np.where(r > 0, r, 1.0) * nu), 0.0)


def fsi_elements(
    profile: CoalescenceProfile, orb: CoulombOrbital, nu: float = 1.0, **kw
) -> tuple[float, float, float]:
    """The (U, V, W) triple for an s orbital."""
    _require_l(orb, 0)
    if nu <= 0:
        raise ValueError("nu must be positive")
    u = SQRT_4PI * radial_integral(lambda r: _log(r, nu) * profile.psi0(r), orb, **kw)
    v = 0.5 * SQRT_4PI * radial_integral(profile.d_total, orb, **kw)
    w = -0.5 * SQRT_4PI * radial_integral(
        lambda r: _log(r, nu) ** 2 * profile.psi0(r), orb, **kw
    )
    return u, v, w


def angular_c(l: int) -> float:
    """Projection coefficient of ln(1 - cos theta) on the l-th Legendre wave."""
    if l < 1:
        raise ValueError("angular_c is defined for l >= 1 only")
    return -math.sqrt(2 * l + 1) / (l * (l + 1))


def angular_c_quadrature(l: int, order: int = 20, levels: int = 60) -> float:
    """``sqrt(2l+1)/2 int_{-1}^{1} ln(1-t) P_l(t) dt`` by quadrature.

    With x = 1 - t the log sits at x = 0; Gauss-Legendre panels on
    [2^-(k+1), 2^-k] * 2 shrink geometrically toward it.
    """
    if l < 1:
        raise ValueError("angular_c is defined for l >= 1 only")
    xg, wg = np.polynomial.legendre.leggauss(order)
    edges = 2.0 * 2.0 ** -np.arange(levels + 1.0)
    total = 0.0
    for b, a in zip(edges[:-1], edges[1:]):
        h = 0.5 * (b - a)
        x = a + h * (xg + 1.0)
        total += h * np.dot(wg, np.log(x) * special.eval_legendre(l, 1.0 - x))
    return 0.5 * math.sqrt(2 * l + 1) * total


@dataclass
class MatrixElementSet:
    """All radial elements for one charge, indexed by n (and l for S)."""

    Z: float
    n_max: int
    l_max: int
    nu: float
    S: dict = field(default_factory=dict)  # (n, l) -> S_nl
    Q: dict = field(default_factory=dict)
    P: dict = field(default_factory=dict)
    U: dict = field(default_factory=dict)
    V: dict = field(default_factory=dict)
    W: dict = field(default_factory=dict)
    r0: float = 1.0

    def s(self, n: int, l: int = 0) -> float:
        return self.S[(n, l)]

    def rows(self):
        """Flat records, one per (n, l), in increasing order."""
        for (n, l) in sorted(self.S):
            yield {
                "Z": self.Z,
                "n": n,
                "l": l,
                "S": self.S[(n, l)],
                "Q": self.Q.get(n, 0.0) if l == 0 else 0.0,
                "P": self.P.get(n, 0.0) if l == 1 else 0.0,
                "U": self.U.get(n, 0.0) if l == 0 else 0.0,
                "V": self.V.get(n, 0.0) if l == 0 else 0.0,
                "W": self.W.get(n, 0.0) if l == 0 else 0.0,
                "nu": self.nu,
            }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=ELEMENT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            writer.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()


def compute_elements(
    wf: CorrelatedWavefunction,
    n_max: int = 6,
    l_max: int = 3,
    nu: float = 1.0,
    rtol: float = 1e-10,
    per_octave: int = 2,
) -> MatrixElementSet:
    profile = coalescence_profile(wf)
    kw = {"rtol": rtol, "per_octave": per_octave}
    me = MatrixElementSet(wf.Z, n_max, l_max, nu)
    for n in range(1, n_max + 1):
        for l in range(min(n - 1, l_max) + 1):
            orb = CoulombOrbital(n, l, wf.Z)
            me.S[(n, l)] = shake_overlap(profile, orb, **kw)
            if l == 0:
                me.Q[n] = isi_s(profile, orb, **kw)
                me.U[n], me.V[n], me.W[n] = fsi_elements(profile, orb, nu, **kw)
            elif l == 1:
                me.P[n] = isi_p(profile, orb, **kw)
    return me
