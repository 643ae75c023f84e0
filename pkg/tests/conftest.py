"""Shared fixtures: one solved wavefunction, element set and coefficient set per Z."""

from __future__ import annotations

from collections import defaultdict

import pytest

from photoexc.elements import compute_elements
from photoexc.ratios import b_coefficients
from photoexc.wavefunction import solve_wavefunction

# criterion number -> list of (label, ok, detail), filled by the acceptance tests
ACCEPTANCE = defaultdict(list)


class Pipeline:
    """Memoized solve -> elements -> coefficients chain."""

    def __init__(self):
        self._wf = {}
        self._me = {}
        self._co = {}

    def add_wavefunction(self, wf):
        self._wf.setdefault(wf.Z, wf)

    def wf(self, Z):
        if Z not in self._wf:
            self._wf[Z] = solve_wavefunction(Z)
        return self._wf[Z]

    def elements(self, Z, nu=1.0):
        key = (Z, nu)
        if key not in self._me:
            self._me[key] = compute_elements(self.wf(Z), nu=nu)
        return self._me[key]

    def coeffs(self, Z, kappa="c1", dynamic="tabulated", nu=1.0):
        key = (Z, kappa, dynamic, nu)
        if key not in self._co:
            self._co[key] = b_coefficients(self.elements(Z, nu), kappa, dynamic)
        return self._co[key]


@pytest.fixture(scope="session")
def pipeline():
    return Pipeline()


@pytest.fixture(scope="session")
def helium(pipeline):
    return pipeline.wf(2.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[crit]
        ok = all(c[1] for c in checks)
        parts = "; ".join(f"{label}: {detail}{'' if good else ' [FAIL]'}"
                          for label, good, detail in checks)
        tr.write_line(f"{'PASS' if ok else 'FAIL'} criterion {crit:2d}: {parts}")
