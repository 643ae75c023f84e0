"""Correlated two-electron ground state in Hylleraas coordinates.

The trial function is

    Psi(r1, r2, r12) = exp(-alpha*s) * sum_ijk c_ijk s**i t**j u**k

with s = r1 + r2, t = r2 - r1, u = r12 and only even j (singlet). All
matrix elements reduce to the closed-form kernel :func:`basic_integral`
over the wedge 0 <= t <= u <= s.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg, optimize

__all__ = [
    "HylleraasTerm",
    "CorrelatedWavefunction",
    "CoalescenceProfile",
    "DegenerateBasisError",
    "AlphaBoundaryWarning",
    "basic_integral",
    "default_terms",
    "assemble_matrices",
    "solve_ground",
    "optimize_alpha",
    "solve_wavefunction",
    "evaluate",
    "coalescence_profile",
    "cusp_ratio",
    "save",
    "load",
]

FORMAT_VERSION = 1
# (a+b+c+2)! is accumulated in the log domain above this
_LOG_FACTORIAL_THRESHOLD = 20
# 2*pi^2: angular volume, with t folded onto [0, u]
_VOLUME = 2.0 * math.pi**2


class DegenerateBasisError(ValueError):
    """Overlap matrix is not positive definite."""


class AlphaBoundaryWarning(UserWarning):
    """Energy minimum in alpha was found on the edge of the search range."""


@dataclass(frozen=True)
class HylleraasTerm:
    i: int
    j: int
    k: int
    coefficient: float = 1.0

    def __post_init__(self):
        if min(self.i, self.j, self.k) < 0:
            raise ValueError(f"negative power in term {self}")
        if self.j % 2:
            raise ValueError(f"odd power of t in term {self} (triplet symmetry)")

    @property
    def powers(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)

    @property
    def degree(self) -> int:
        return self.i + self.j + self.k


@dataclass(frozen=True)
class CorrelatedWavefunction:
    """Immutable Hylleraas wavefunction for a nucleus of charge ``Z``."""

    Z: float
    alpha: float
    terms: tuple[HylleraasTerm, ...]
    energy: float
    norm: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.Z <= 0:
            raise ValueError("nuclear charge must be positive")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not self.terms:
            raise ValueError("wavefunction has no terms")
        if self.norm <= 0:
            raise ValueError("norm must be positive")

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms])

    @property
    def powers(self) -> np.ndarray:
        return np.array([t.powers for t in self.terms], dtype=int)

    def scaled(self, lam: float) -> "CorrelatedWavefunction":
        """Copy with every coefficient multiplied by ``lam``."""
        terms = tuple(
            HylleraasTerm(t.i, t.j, t.k, lam * t.coefficient) for t in self.terms
        )
        return CorrelatedWavefunction(
            self.Z, self.alpha, terms, self.energy, self.norm * lam**2
        )

    def with_terms(self, terms: Iterable[HylleraasTerm]) -> "CorrelatedWavefunction":
        return CorrelatedWavefunction(self.Z, self.alpha, tuple(terms), self.energy, self.norm)


def basic_integral(a: int, b: int, c: int, beta: float) -> float:
    """Closed form of the wedge integral used by every matrix element.

    Returns ``int_0^inf exp(-beta s) s^a int_0^s u^b int_0^u t^c dt du ds``,
    i.e. ``(a+b+c+2)! / ((c+1) (b+c+2) beta^(a+b+c+3))``.

    Raises
    ------
    OverflowError
        If the result is not representable as a float.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if min(a, b, c) < 0:
        raise ValueError(f"negative power ({a}, {b}, {c})")
    n = a + b + c + 2
    denom = (c + 1) * (b + c + 2)
    if n <= _LOG_FACTORIAL_THRESHOLD:
        return math.factorial(n) / denom / beta ** (n + 1)
    try:
        value = math.exp(math.lgamma(n + 1) - (n + 1) * math.log(beta) - math.log(denom))
    except OverflowError:
        raise OverflowError(
            f"basic_integral({a}, {b}, {c}, {beta}) overflows; use scaled evaluation"
        ) from None
    return value


def default_terms(degree: int = 6) -> list[HylleraasTerm]:
    """All singlet terms with i + j + k <= ``degree``, ordered by degree."""
    terms = [
        HylleraasTerm(i, j, k)
        for i, j, k in product(range(degree + 1), repeat=3)
        if j % 2 == 0 and i + j + k <= degree
    ]
    terms.sort(key=lambda t: (t.degree, t.j, t.k, t.i))
    return terms


# Polynomials in (s, u, t) are dicts {(a, b, c): coefficient}, matching the
# argument order of basic_integral. The common exp(-alpha s) is implicit.


def _monomial(term: HylleraasTerm) -> dict:
    return {(term.i, term.k, term.j): 1.0}


def _d_s(term: HylleraasTerm, alpha: float) -> dict:
    out = {(term.i, term.k, term.j): -alpha}
    if term.i:
        out[(term.i - 1, term.k, term.j)] = float(term.i)
    return out


def _d_t(term: HylleraasTerm) -> dict:
    return {(term.i, term.k, term.j - 1): float(term.j)} if term.j else {}


def _d_u(term: HylleraasTerm) -> dict:
    return {(term.i, term.k - 1, term.j): float(term.k)} if term.k else {}


def _mul(*polys: dict) -> dict:
    out = {(0, 0, 0): 1.0}
    for p in polys:
        nxt: dict = {}
        for (a1, b1, c1), x in out.items():
            for (a2, b2, c2), y in p.items():
                key = (a1 + a2, b1 + b2, c1 + c2)
                nxt[key] = nxt.get(key, 0.0) + x * y
        out = nxt
    return out


def _integrate(poly: dict, beta: float) -> float:
    total = 0.0
    for (a, b, c), coef in sorted(poly.items()):
        if coef == 0.0:
            continue
        total += coef * basic_integral(a, b, c, beta)
    return total


# Volume weight u (s^2 - t^2) and the cross weights of the kinetic functional
_W_VOL = {(2, 1, 0): 1.0, (0, 1, 2): -1.0}
_W_SU = {(1, 2, 0): 1.0, (1, 0, 2): -1.0}  # s (u^2 - t^2)
_W_TU = {(2, 0, 1): 1.0, (0, 2, 1): -1.0}  # t (s^2 - u^2)


def assemble_matrices(
    terms: Sequence[HylleraasTerm], alpha: float, Z: float
) -> tuple[np.ndarray, np.ndarray]:
    """Hamiltonian and overlap matrices of the Hylleraas basis.

    The common volume prefactor is dropped in both matrices.
    """
    if not terms:
        raise ValueError("empty basis")
    if len({t.powers for t in terms}) != len(terms):
        raise DegenerateBasisError("duplicate (i, j, k) terms in basis")
    beta = 2.0 * alpha
    w_pot = {(1, 1, 0): -4.0 * Z, (2, 0, 0): 1.0, (0, 0, 2): -1.0}
    mono = [_monomial(t) for t in terms]
    ds = [_d_s(t, alpha) for t in terms]
    dt = [_d_t(t) for t in terms]
    du = [_d_u(t) for t in terms]
    n = len(terms)
    H = np.empty((n, n))
    S = np.empty((n, n))
    for m in range(n):
        for q in range(m, n):
            s_mq = _integrate(_mul(_W_VOL, mono[m], mono[q]), beta)
            kin = {}
            for poly in (
                _mul(_W_VOL, ds[m], ds[q]),
                _mul(_W_VOL, dt[m], dt[q]),
                _mul(_W_VOL, du[m], du[q]),
                _mul(_W_SU, ds[m], du[q]),
                _mul(_W_SU, du[m], ds[q]),
                _mul(_W_TU, dt[m], du[q]),
                _mul(_W_TU, du[m], dt[q]),
                _mul(w_pot, mono[m], mono[q]),
            ):
                for key, val in poly.items():
                    kin[key] = kin.get(key, 0.0) + val
            h_mq = _integrate(kin, beta)
            S[m, q] = S[q, m] = s_mq
            H[m, q] = H[q, m] = h_mq
    return H, S


def solve_ground(H: np.ndarray, S: np.ndarray) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of ``H c = E S c``.

    Coefficients are returned normalized to ``c^T S c = 1``; the caller
    fixes the physical volume factor and overall sign.
    """
    try:
        w, v = linalg.eigh(H, S, subset_by_index=[0, 0])
    except linalg.LinAlgError as exc:
        raise DegenerateBasisError(f"overlap matrix is not positive definite: {exc}") from exc
    c = v[:, 0]
    c = c / math.sqrt(c @ S @ c)
    return float(w[0]), c


def _ground_energy(terms, Z, alpha):
    H, S = assemble_matrices(terms, alpha, Z)
    return solve_ground(H, S)[0]


def optimize_alpha(
    terms: Sequence[HylleraasTerm],
    Z: float,
    alpha_range: tuple[float, float] | None = None,
    xtol: float = 1e-5,
) -> float:
    """Exponent minimizing the ground eigenvalue over ``alpha_range``.

    Emits :class:`AlphaBoundaryWarning` when the minimum sits on an edge.
    """
    lo, hi = alpha_range if alpha_range is not None else (0.5 * Z, 2.0 * Z)
    if not 0 < lo < hi <= 4 * Z:
        raise ValueError(f"alpha range ({lo}, {hi}) outside (0, 4Z]")
    res = optimize.minimize_scalar(
        lambda a: _ground_energy(terms, Z, a),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": xtol},
    )
    alpha = float(res.x)
    if min(alpha - lo, hi - alpha) < 10 * xtol:
        warnings.warn(
            f"alpha minimum at range boundary ({alpha:.6g} in [{lo}, {hi}])",
            AlphaBoundaryWarning,
            stacklevel=2,
        )
    return alpha


def solve_wavefunction(
    Z: float,
    terms: Sequence[HylleraasTerm] | None = None,
    alpha: float | None = None,
    degree: int = 6,
) -> CorrelatedWavefunction:
    """Optimize alpha (unless given), solve, normalize and fix the sign."""
    if terms is None:
        terms = default_terms(degree)
    if alpha is None:
        alpha = optimize_alpha(terms, Z)
    H, S = assemble_matrices(terms, alpha, Z)
    energy, c = solve_ground(H, S)
    c = c / math.sqrt(_VOLUME)
    solved = [HylleraasTerm(t.i, t.j, t.k, float(x)) for t, x in zip(terms, c)]
    wf = CorrelatedWavefunction(Z, alpha, tuple(solved), energy, 1.0)
    if evaluate(wf, 0.0, 0.1, 0.1) < 0:
        wf = wf.scaled(-1.0)
    return wf


def _check_triangle(r1, r2, r12):
    tol = 1e-12 * (1.0 + np.maximum(r1, r2))
    bad = (np.abs(r1 - r2) > r12 + tol) | (r12 > r1 + r2 + tol) | (np.minimum(r1, r2) < 0)
    if np.any(bad):
        raise ValueError("coordinates violate the triangle inequality")


def evaluate(wf: CorrelatedWavefunction, r1, r2, r12):
    """Value of the wavefunction at (r1, r2, r12); accepts arrays."""
    r1, r2, r12 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (r1, r2, r12)))
    _check_triangle(r1, r2, r12)
    s = r1 + r2
    t = r2 - r1
    total = np.zeros_like(s)
    for term in wf.terms:
        total = total + term.coefficient * s**term.i * t**term.j * r12**term.k
    out = np.exp(-wf.alpha * s) * total
    return float(out) if out.ndim == 0 else out


_COMPONENTS = ("psi0", "r", "rho", "rr", "rhorho", "rrho", "d2")


@dataclass(frozen=True)
class CoalescenceProfile:
    """Wavefunction and its derivatives at r1 = 0, r12 = r2, as functions of r2.

    Derivatives are taken with respect to r1 (at fixed r2, r12) and r12 (at
    fixed r1, r2). ``d_total`` is the derivative of psi0 along r2 with r12
    tied to r2. At coalescence s = t = u = r2, so every component is
    exp(-alpha r2) times a polynomial in r2; the polynomials are built once.
    """

    wf: CorrelatedWavefunction = field(repr=False)
    _poly: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = self.wf.alpha
        top = max(t.degree for t in self.wf.terms) + 1
        poly = {name: np.zeros(top) for name in _COMPONENTS}

        def add(name, terms, scale):
            for power, value in terms.items():
                if value:
                    poly[name][power] += scale * value

        for term in self.wf.terms:
            i, j, k, c = term.i, term.j, term.k, term.coefficient
            N = i + j + k
            # Partial derivatives of e^{-a s} s^i t^j u^k at s = t = u = x,
            # keyed by the power of x
            d_s = {N - 1: i, N: -a}
            d_t = {N - 1: j}
            d_u = {N - 1: k}
            d_ss = {N - 2: i * (i - 1), N - 1: -2 * a * i, N: a * a}
            d_st = {N - 2: i * j, N - 1: -a * j}
            d_su = {N - 2: i * k, N - 1: -a * k}
            add("psi0", {N: 1.0}, c)
            # d/dr1 = d/ds - d/dt
            add("r", d_s, c)
            add("r", d_t, -c)
            add("rho", d_u, c)
            add("rr", d_ss, c)
            add("rr", d_st, -2 * c)
            add("rr", {N - 2: j * (j - 1)}, c)
            add("rhorho", {N - 2: k * (k - 1)}, c)
            add("rrho", d_su, c)
            add("rrho", {N - 2: j * k}, -c)
            # d/dr2 at fixed r1 is d/ds + d/dt, plus d/du since r12 = r2
            add("d2", d_s, c)
            add("d2", d_t, c)
            add("d2", d_u, c)
        object.__setattr__(self, "_poly", poly)

    def _eval(self, name, r2):
        r2 = np.asarray(r2, dtype=float)
        return np.exp(-self.wf.alpha * r2) * np.polynomial.polynomial.polyval(
            r2, self._poly[name]
        )

    def psi0(self, r2):
        return self._eval("psi0", r2)

    def d_r(self, r2):
        return self._eval("r", r2)

    def d_rho(self, r2):
        return self._eval("rho", r2)

    def d_rr(self, r2):
        return self._eval("rr", r2)

    def d_rhorho(self, r2):
        return self._eval("rhorho", r2)

    def d_rrho(self, r2):
        return self._eval("rrho", r2)

    def d_total(self, r2):
        return self._eval("d2", r2)

    def __call__(self, r2):
        """All six components as a tuple (psi0, r, rho, rr, rhorho, rrho)."""
        return tuple(self._eval(name, r2) for name in _COMPONENTS[:6])


def coalescence_profile(wf: CorrelatedWavefunction) -> CoalescenceProfile:
    return CoalescenceProfile(wf)


def cusp_ratio(wf: CorrelatedWavefunction, rmax: float = 20.0, npts: int = 4000) -> float:
    """Density-weighted average of d_r psi / psi at coalescence.

    Compare with -Z (electron-nucleus cusp); a quality metric only.
    """
    prof = coalescence_profile(wf)
    x, w = np.polynomial.legendre.leggauss(npts)
    r2 = 0.5 * rmax * (x + 1)
    w = 0.5 * rmax * w
    psi0, d_r, *_ = prof(r2)
    return float(np.sum(w * r2**2 * psi0 * d_r) / np.sum(w * r2**2 * psi0**2))


def save(wf: CorrelatedWavefunction, path) -> None:
    """Write ``wf`` as a key-value text file with a term table."""
    lines = [
        f"format_version = {FORMAT_VERSION}",
        f"Z = {wf.Z!r}",
        f"alpha = {wf.alpha!r}",
        f"energy = {wf.energy!r}",
        f"norm = {wf.norm!r}",
        f"nterms = {len(wf.terms)}",
        "# i j k coefficient",
    ]
    lines += [f"{t.i} {t.j} {t.k} {t.coefficient!r}" for t in wf.terms]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load(path) -> CorrelatedWavefunction:
    """Read a file written by :func:`save`; invariants are re-checked."""
    header: dict[str, str] = {}
    rows: list[HylleraasTerm] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" in line:
                key, _, val = line.partition("=")
                header[key.strip()] = val.strip()
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: malformed term row {line!r}")
            try:
                i, j, k = (int(x) for x in parts[:3])
                coef = float(parts[3])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed term row {line!r}") from None
            rows.append(HylleraasTerm(i, j, k, coef))
    missing = {"format_version", "Z", "alpha", "energy", "norm"} - header.keys()
    if missing:
        raise ValueError(f"{path}: missing fields {sorted(missing)}")
    if int(header["format_version"]) != FORMAT_VERSION:
        raise ValueError(
            f"{path}: format_version {header['format_version']} != {FORMAT_VERSION}"
        )
    if "nterms" in header and int(header["nterms"]) != len(rows):
        raise ValueError(f"{path}: expected {header['nterms']} terms, found {len(rows)}")
    wf = CorrelatedWavefunction(
        float(header["Z"]),
        float(header["alpha"]),
        tuple(rows),
        float(header["energy"]),
        float(header["norm"]),
    )
    if not wf.energy < -0.5 * wf.Z**2:
        raise ValueError(f"{path}: energy {wf.energy} is not below the ion threshold")
    return wf
