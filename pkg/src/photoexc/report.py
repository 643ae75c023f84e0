"""Orchestration of the solve -> elements -> coefficients pipeline and file output.

Every command writes flat tables (CSV or JSON) into the output directory
and refreshes ``manifest.json``, which lists every file present with its
SHA-256 digest.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .elements import MatrixElementSet, compute_elements
from .ratios import (
    DYNAMIC_WEIGHTS,
    FIT_ZMIN,
    HARTREE_EV,
    KAPPA_CONVENTIONS,
    RatioCoefficients,
    b_coefficients,
    fit_z_series,
    ratio_curves,
    scaled_ratios,
    validity_floor_eV,
)
from .wavefunction import (
    CorrelatedWavefunction,
    cusp_ratio,
    default_terms,
    load,
    save,
    solve_wavefunction,
)

log = logging.getLogger(__name__)

DEFAULT_Z = (2.0, 3.0, 4.0, 6.0, 10.0)
SCALED_Z = (2.0, 10.0)
MANIFEST = "manifest.json"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    z: tuple = DEFAULT_Z
    nmax: int = 6
    lmax: int = 3
    degree: int = 6
    alpha: float | None = None
    nu: float = 1.0
    omega_min: float | None = None  # eV; default is the validity floor per Z
    omega_max: float | None = None  # eV; default 10x the floor
    omega_points: int = 60
    omega_scale: str = "log"
    fit_zmin: float = FIT_ZMIN
    kappa: str = "c1"
    dynamic: str = "tabulated"
    out: str = "results"
    format: str = "csv"
    paper_style: bool = False
    allow_low_omega: bool = False

    def validate(self) -> "RunConfig":
        if not self.z or any(zz <= 0 for zz in self.z):
            raise ConfigError("z must be a non-empty list of positive charges")
        if self.nmax < 2:
            raise ConfigError("nmax must be >= 2")
        if self.lmax < 0:
            raise ConfigError("lmax must be >= 0")
        if self.degree < 0:
            raise ConfigError("degree must be >= 0")
        if self.alpha is not None and self.alpha <= 0:
            raise ConfigError("alpha must be positive")
        if self.nu <= 0:
            raise ConfigError("nu must be positive")
        if self.omega_points < 2:
            raise ConfigError("omega_points must be >= 2")
        if self.omega_scale not in ("log", "linear"):
            raise ConfigError("omega_scale must be log or linear")
        if self.kappa not in KAPPA_CONVENTIONS:
            raise ConfigError(f"kappa must be one of {KAPPA_CONVENTIONS}")
        if self.dynamic not in DYNAMIC_WEIGHTS:
            raise ConfigError(f"dynamic must be one of {tuple(DYNAMIC_WEIGHTS)}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.omega_min is not None and self.omega_max is not None:
            if not 0 < self.omega_min < self.omega_max:
                raise ConfigError("need 0 < omega_min < omega_max")
        return self

    def omega_grid(self, Z: float) -> np.ndarray:
        floor = validity_floor_eV(Z)
        lo = self.omega_min if self.omega_min is not None else floor
        hi = self.omega_max if self.omega_max is not None else 10.0 * floor
        if not lo < hi:
            raise ConfigError(f"empty omega grid [{lo}, {hi}] eV for Z={Z:g}")
        if self.omega_scale == "log":
            return np.geomspace(lo, hi, self.omega_points)
        return np.linspace(lo, hi, self.omega_points)

    @classmethod
    def from_file(cls, path) -> dict:
        """Parse a flat ``key = value`` file into RunConfig keyword arguments."""
        out = {}
        names = {f.name: f for f in dataclasses.fields(cls)}
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, _, val = (x.strip() for x in line.partition("="))
                key = key.replace("-", "_")
                if key not in names:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                out[key] = _coerce(key, val)
        return out


def _coerce(key, val):
    try:
        if key == "z":
            return tuple(float(x) for x in val.replace(",", " ").split())
        if key in ("nmax", "lmax", "degree", "omega_points"):
            return int(val)
        if key in ("alpha", "nu", "omega_min", "omega_max", "fit_zmin"):
            return None if val.lower() in ("", "none") else float(val)
        if key in ("paper_style", "allow_low_omega"):
            if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(val)
            return val.lower() in ("true", "1", "yes")
    except ValueError:
        raise ConfigError(f"bad value for {key}: {val!r}") from None
    return val


def _ztag(Z: float) -> str:
    return f"{Z:g}".replace(".", "p")


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def fmt_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.5e}"
    return str(v)


def paper_number(v: float, digits: int = 3) -> str:
    """Render like 3.01(-2) for small magnitudes, plain otherwise."""
    if v == 0 or 1e-2 <= abs(v) < 100:
        return f"{v:.{digits}g}"
    e = math.floor(math.log10(abs(v)))
    return f"{v / 10**e:.{digits}g}({e})"


class Session:
    """Per-run cache of wavefunctions, matrix elements and coefficients."""

    def __init__(self, config: RunConfig):
        self.config = config.validate()
        self.out = Path(config.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self._wf: dict = {}
        self._me: dict = {}
        self._coeffs: dict = {}
        self.written: list[Path] = []

    def wf_path(self, Z: float) -> Path:
        return self.out / f"wavefunction_Z{_ztag(Z)}.txt"

    def _usable(self, wf: CorrelatedWavefunction) -> bool:
        powers = {t.powers for t in default_terms(self.config.degree)}
        if {t.powers for t in wf.terms} != powers:
            return False
        return self.config.alpha is None or wf.alpha == self.config.alpha

    def wavefunction(self, Z: float) -> CorrelatedWavefunction:
        if Z in self._wf:
            return self._wf[Z]
        path = self.wf_path(Z)
        wf = None
        if path.exists():
            try:
                wf = load(path)
            except ValueError as exc:
                log.warning("ignoring unreadable %s: %s", path, exc)
            if wf is not None and (wf.Z != Z or not self._usable(wf)):
                wf = None
        if wf is None:
            log.info("solving ground state for Z=%g", Z)
            wf = solve_wavefunction(Z, alpha=self.config.alpha, degree=self.config.degree)
            save(wf, path)
        self._wf[Z] = wf
        return wf

    def elements(self, Z: float) -> MatrixElementSet:
        if Z not in self._me:
            self._me[Z] = compute_elements(
                self.wavefunction(Z), self.config.nmax, self.config.lmax, self.config.nu
            )
        return self._me[Z]

    def coefficients(self, Z: float) -> RatioCoefficients:
        if Z not in self._coeffs:
            self._coeffs[Z] = b_coefficients(
                self.elements(Z), self.config.kappa, self.config.dynamic
            )
        return self._coeffs[Z]

    # output

    def write_table(self, stem: str, columns, units, rows, title=None) -> Path:
        """Write records as CSV (header row, then units row) or JSON."""
        units = [units.get(c, "") for c in columns]
        if self.config.format == "csv":
            path = self.out / f"{stem}.csv"
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(columns)
            writer.writerow(units)
            for row in rows:
                writer.writerow([fmt_value(row[c]) for c in columns])
            path.write_text(buf.getvalue())
        else:
            path = self.out / f"{stem}.json"
            doc = {
                "columns": list(columns),
                "units": dict(zip(columns, units)),
                "rows": [
                    {c: _json_value(row[c]) for c in columns} for row in rows
                ],
            }
            path.write_text(json.dumps(doc, indent=1) + "\n")
        self.written.append(path)
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text)
        self.written.append(path)
        return path

    def write_manifest(self, command: str, started: str) -> Path:
        files = sorted(
            p for p in self.out.iterdir() if p.is_file() and p.name != MANIFEST
        )
        doc = {
            "tool": "photoexc",
            "version": __version__,
            "command": command,
            "config": _config_echo(self.config),
            "kappa": self.config.kappa,
            "dynamic_weight": {
                "convention": self.config.dynamic,
                "value": DYNAMIC_WEIGHTS[self.config.dynamic],
            },
            "wavefunctions": {
                p.name: sha256(p) for p in files if p.name.startswith("wavefunction_")
            },
            "written": sorted(p.name for p in self.written),
            "files": {p.name: sha256(p) for p in files},
            "started": started,
            "finished": _now(),
        }
        path = self.out / MANIFEST
        path.write_text(json.dumps(doc, indent=1) + "\n")
        return path


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.5e}")
    return v


def _config_echo(config: RunConfig) -> dict:
    d = dataclasses.asdict(config)
    d["z"] = list(d["z"])
    return d


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _fixed_width(header, rows) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines) + "\n"


# commands


def cmd_ground(session: Session) -> list[dict]:
    """Solve every Z; failures are recorded per Z and do not stop the others."""
    rows = []
    for Z in session.config.z:
        try:
            wf = session.wavefunction(Z)
        except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
            log.error("Z=%g: ground state failed: %s", Z, exc)
            rows.append(
                {"Z": Z, "alpha": math.nan, "energy_eV": math.nan, "cusp_ratio": math.nan,
                 "n_terms": 0, "status": f"failed: {exc}"}
            )
            continue
        rows.append(
            {
                "Z": Z,
                "alpha": wf.alpha,
                "energy_eV": wf.energy * HARTREE_EV,
                "cusp_ratio": cusp_ratio(wf),
                "n_terms": len(wf.terms),
                "status": "ok",
            }
        )
    session.write_table(
        "ground",
        ["Z", "alpha", "energy_eV", "cusp_ratio", "n_terms", "status"],
        {"Z": "e", "alpha": "1/bohr", "energy_eV": "eV", "cusp_ratio": "1/bohr",
         "n_terms": "count", "status": "-"},
        rows,
    )
    if session.config.paper_style:
        body = _fixed_width(
            ["Z", "alpha", "E (eV)", "cusp (-Z)"],
            [[f"{r['Z']:g}", f"{r['alpha']:.5f}", f"{r['energy_eV']:.5f}",
              f"{r['cusp_ratio']:.4f}"] for r in rows],
        )
        session.write_text("ground.txt", body)
    return rows


def cmd_limits(session: Session) -> list[dict]:
    rows = []
    for Z in session.config.z:
        A = session.coefficients(Z).A
        for n in range(2, session.config.nmax + 1):
            rows.append(
                {"Z": Z, "n": n, "A_n": A[n], "A_n_percent": 100.0 * A[n],
                 "A_n_Z2_x100": 100.0 * Z**2 * A[n], "n3_A_n": n**3 * A[n]}
            )
    session.write_table(
        "limits",
        ["Z", "n", "A_n", "A_n_percent", "A_n_Z2_x100", "n3_A_n"],
        {"Z": "e", "n": "-", "A_n": "1", "A_n_percent": "%", "A_n_Z2_x100": "1e-2",
         "n3_A_n": "1"},
        rows,
    )
    if session.config.paper_style:
        zs = session.config.z
        body = _fixed_width(
            ["n"] + [f"Z = {Z:g}" for Z in zs],
            [[str(n)] + [f"{100 * Z**2 * session.coefficients(Z).A[n]:.3g}" for Z in zs]
             for n in range(2, session.config.nmax + 1)],
        )
        session.write_text("limits.txt", "A_n Z^2 x 100\n" + body)
    return rows


def cmd_coefficients(session: Session) -> dict:
    split, bnl, bn = [], [], []
    for Z in session.config.z:
        me = session.elements(Z)
        c = session.coefficients(Z)
        session.write_text(f"elements_Z{_ztag(Z)}.csv", me.to_csv())
        for n in range(2, session.config.nmax + 1):
            p = c.parts[n]
            split.append(
                {"Z": Z, "n": n,
                 "kinematical_const": p["kinematical"], "kinematical_mu": -p["kinematical"],
                 "isi_const": p["isi"], "isi_mu": 0.0,
                 "fsi_const": p["fsi"], "fsi_mu": 0.0,
                 "B_n0_const": c.d[n], "B_n0_mu": c.f[n]}
            )
            for l in c.ls(n):
                bnl.append(
                    {"Z": Z, "n": n, "l": l,
                     "B_const": c.d[n] if l == 0 else c.B_l[(n, l)],
                     "B_mu": c.f[n] if l == 0 else 0.0}
                )
            bn.append({"Z": Z, "n": n, "B_n_const": c.b_n_const(n), "B_n_mu": c.f[n]})
    pair_units = {k: "1" for k in ("kinematical_const", "kinematical_mu", "isi_const",
                                   "isi_mu", "fsi_const", "fsi_mu", "B_n0_const",
                                   "B_n0_mu", "B_const", "B_mu", "B_n_const", "B_n_mu")}
    pair_units.update({"Z": "e", "n": "-", "l": "-"})
    session.write_table("b0_split", list(split[0]), pair_units, split)
    session.write_table("bnl", ["Z", "n", "l", "B_const", "B_mu"], pair_units, bnl)
    session.write_table("bn", ["Z", "n", "B_n_const", "B_n_mu"], pair_units, bn)
    if session.config.paper_style:
        text = []
        for Z in session.config.z:
            c = session.coefficients(Z)
            rows = []
            for n in range(2, session.config.nmax + 1):
                p = c.parts[n]
                rows.append([
                    str(n),
                    f"{paper_number(p['kinematical'])}(1 - mu)",
                    paper_number(p["isi"]),
                    paper_number(p["fsi"]),
                    f"{paper_number(c.d[n])} - {paper_number(-c.f[n])}mu",
                ])
            text.append(f"Z = {Z:g}  (kappa = {c.kappa}, dynamic = {c.dynamic})\n")
            text.append(_fixed_width(["n", "Kinematical", "ISI", "FSI", "B_n0"], rows))
            rows = []
            for n in range(2, session.config.nmax + 1):
                for l in c.ls(n):
                    b = (f"{paper_number(c.d[n])} - {paper_number(-c.f[n])}mu" if l == 0
                         else paper_number(c.B_l[(n, l)]))
                    total = (f"{paper_number(c.b_n_const(n))} - {paper_number(-c.f[n])}mu"
                             if l == 1 else "")
                    rows.append([f"{n}{'spdfghi'[l]}", b, total])
            text.append(_fixed_width(["State", "B_nl", "B_n"], rows) + "\n")
        session.write_text("coefficients.txt", "".join(text))
    return {"split": split, "bnl": bnl, "bn": bn}


def cmd_ratios(session: Session) -> dict:
    out = {}
    cfg = session.config
    for Z in cfg.z:
        c = session.coefficients(Z)
        curves = ratio_curves(c, cfg.omega_grid(Z), allow_low_omega=cfg.allow_low_omega)
        for n in range(2, cfg.nmax + 1):
            mine = [cv for cv in curves if cv.n == n]
            total = next(cv for cv in mine if cv.l == -1)
            parts = sorted((cv for cv in mine if cv.l >= 0), key=lambda cv: cv.l)
            columns = ["omega_eV", "R_n"] + [f"R_l{cv.l}" for cv in parts]
            columns += [f"X_l{cv.l}" for cv in parts] + ["R_su_exact", "in_domain"]
            rows = []
            for i, w in enumerate(total.omega_eV):
                row = {"omega_eV": w, "R_n": total.R[i], "R_su_exact": total.su_exact[i],
                       "in_domain": bool(total.in_domain[i])}
                for cv in parts:
                    row[f"R_l{cv.l}"] = cv.R[i]
                    row[f"X_l{cv.l}"] = cv.X[i]
                rows.append(row)
            units = {col: "1" for col in columns}
            units.update({"omega_eV": "eV", "in_domain": "bool"})
            session.write_table(f"ratios_Z{_ztag(Z)}_n{n}", columns, units, rows)
            out[(Z, n)] = rows
    return out


def cmd_zscan(session: Session) -> dict:
    cfg = session.config
    limits = {Z: session.coefficients(Z).A for Z in cfg.z}
    try:
        fit = fit_z_series(limits, cfg.fit_zmin)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    fit_rows = [
        {"n": n, "a_n": fit.a[n], "b_n": fit.b[n], "residual": fit.residual[n],
         "c_n_ref": fit.reference_c.get(n, math.nan)}
        for n in sorted(fit.a)
    ]
    session.write_table(
        "zfit", ["n", "a_n", "b_n", "residual", "c_n_ref"],
        {"n": "-", "a_n": "1", "b_n": "1", "residual": "1", "c_n_ref": "1"}, fit_rows,
    )
    scaled_z = [Z for Z in cfg.z if Z in SCALED_Z] or list(cfg.z)
    rows = []
    for Z in scaled_z:
        r = scaled_ratios(session.coefficients(Z))
        for n in sorted(r.r_n0_d):
            rows.append({"Z": Z, "n": n, "l": 0, "r_d": r.r_n0_d[n], "r_f": r.r_n0_f[n]})
            for (m, l), v in sorted(r.r_nl.items()):
                if m == n:
                    rows.append({"Z": Z, "n": n, "l": l, "r_d": v, "r_f": 0.0})
            rows.append({"Z": Z, "n": n, "l": -1, "r_d": r.r_n_d[n], "r_f": r.r_n_f[n]})
    session.write_table(
        "scaled", ["Z", "n", "l", "r_d", "r_f"],
        {"Z": "e", "n": "-", "l": "-1 = sum over l", "r_d": "1", "r_f": "1"}, rows,
    )
    if cfg.paper_style:
        body = _fixed_width(
            ["n", "a_n(-2)", "b_n(-2)", "c_n(-2)"],
            [[str(r["n"]), f"{100 * r['a_n']:.3g}", f"{100 * r['b_n']:.3g}",
              f"{100 * r['c_n_ref']:.3g}"] for r in fit_rows],
        )
        session.write_text("zscan.txt", body)
    return {"fit": fit, "scaled": rows}


COMMANDS = {
    "ground": cmd_ground,
    "limits": cmd_limits,
    "coefficients": cmd_coefficients,
    "ratios": cmd_ratios,
    "zscan": cmd_zscan,
}


def run(command: str, config: RunConfig):
    """Run one command and refresh the manifest; returns the command's records."""
    started = _now()
    session = Session(config)
    result = COMMANDS[command](session)
    session.write_manifest(command, started)
    return result
