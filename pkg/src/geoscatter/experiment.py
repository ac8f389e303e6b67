"""Scenario files, parameter sweeps, and figure-ready CSV output.

A scenario is a single JSON document describing the surface (a list of
Gaussian bumps, or nothing for the flat plane), the point defects, the
curvature couplings, the incidence angle and one sweep over either the
dimensionless wavenumber k*sigma or the outgoing angle theta.  Unknown
keys are rejected; omitted fields take the documented defaults and the
fact that a default was applied is echoed into the output header, so every
CSV is self-describing and regenerates byte-identically from its scenario.

The reference length sigma_ref used to form k = (k sigma)/sigma_ref and to
normalize the cross-section columns is the first bump's sigma (1.0 for a
flat surface).
"""

from __future__ import annotations

import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geom_amp import ScatteringSetup, total_amplitude
from .plane_defects import DefectConfiguration, Kinematics
from .quad import QuadratureSpec
from .surface import GaussianBumpParams, MultiBumpSurface

__all__ = [
    "CSV_HEADER",
    "Scenario",
    "SweepRow",
    "ScenarioParseError",
    "ScenarioValidationError",
    "SweepError",
    "load_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "scenario_comment_lines",
    "run_sweep",
    "emit_csv",
    "emit_plot_script",
    "parse_csv",
]

CSV_HEADER = "k_sigma,theta,re_f0,im_f0,re_f1,im_f1,dcs_over_sigma,delta_dcs_over_sigma"

_DEFAULT_LAMBDA1 = 0.5
_DEFAULT_LAMBDA2 = -0.5
_DEFAULT_COUPLING = (0.5, 0.0)
_DEFAULT_THETA0 = 0.0
_DEFAULT_ETA = 0.1


class ScenarioParseError(ValueError):
    """The scenario file is not syntactically valid JSON."""


class ScenarioValidationError(ValueError):
    """The scenario parsed but violates the schema; lists all violations."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.problems))


class SweepError(RuntimeError):
    """More than 10% of the sweep rows failed to evaluate."""

    def __init__(self, failures: list[tuple[int, Exception]], total: int):
        self.failures = failures
        msgs = "; ".join(f"row {i}: {e}" for i, e in failures[:5])
        super().__init__(f"{len(failures)}/{total} sweep rows failed: {msgs}")


@dataclass(frozen=True)
class SweepGrid:
    min: float
    max: float
    count: int


@dataclass(frozen=True)
class SweepConfig:
    kind: str  # "k_sweep" | "theta_sweep"
    grid: SweepGrid
    fixed: float


@dataclass(frozen=True, eq=False)
class Scenario:
    """Validated experiment description (see module docstring)."""

    name: str
    surface: MultiBumpSurface | None
    defects: DefectConfiguration | None
    lambda1: float
    lambda2: float
    theta0: float
    sweep: SweepConfig
    quadrature: QuadratureSpec
    separate_central_distant: bool
    applied_defaults: tuple[str, ...]

    @property
    def sigma_ref(self) -> float:
        if self.surface is not None and self.surface.bumps:
            return self.surface.bumps[0][0].sigma
        return 1.0

    def setup(self) -> ScatteringSetup:
        return ScatteringSetup(
            surface=self.surface,
            defects=self.defects,
            lambda1=self.lambda1,
            lambda2=self.lambda2,
            quadrature=self.quadrature,
            separate_central_distant=self.separate_central_distant,
        )


@dataclass(frozen=True)
class SweepRow:
    k_sigma: float
    theta: float
    re_f0: float
    im_f0: float
    re_f1: float
    im_f1: float
    dcs_over_sigma: float
    delta_dcs_over_sigma: float


def _expect_keys(obj: dict, allowed: set[str], where: str, problems: list[str]) -> None:
    unknown = set(obj) - allowed
    if unknown:
        problems.append(f"{where}: unknown key(s) {sorted(unknown)}")


def _as_number(value, where: str, problems: list[str]) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append(f"{where}: expected a number, got {value!r}")
        return math.nan
    if not math.isfinite(value):
        problems.append(f"{where}: must be finite")
        return math.nan
    return float(value)


def _as_pair(value, where: str, problems: list[str]) -> tuple[float, float]:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        problems.append(f"{where}: expected a pair [x, y]")
        return (math.nan, math.nan)
    return (_as_number(value[0], where + "[0]", problems),
            _as_number(value[1], where + "[1]", problems))


def _parse_bump(idx: int, raw, problems: list[str], defaults: list[str]):
    where = f"surface.bumps[{idx}]"
    if not isinstance(raw, dict):
        problems.append(f"{where}: expected an object")
        return None
    _expect_keys(raw, {"sigma", "eta", "delta", "center"}, where, problems)
    if "sigma" not in raw:
        problems.append(f"{where}: sigma is required")
        return None
    sigma = _as_number(raw["sigma"], where + ".sigma", problems)
    if not sigma > 0:
        problems.append(f"{where}.sigma: must be positive")
        return None
    if "eta" in raw and "delta" in raw:
        problems.append(f"{where}: give either eta or delta, not both")
        return None
    center = _as_pair(raw.get("center", [0.0, 0.0]), where + ".center", problems)
    if "center" not in raw:
        defaults.append(f"{where}.center=(0, 0)")
    try:
        if "delta" in raw:
            params = GaussianBumpParams(
                delta=_as_number(raw["delta"], where + ".delta", problems), sigma=sigma
            )
        else:
            eta = _as_number(raw.get("eta", _DEFAULT_ETA), where + ".eta", problems)
            if "eta" not in raw:
                defaults.append(f"{where}.eta={_DEFAULT_ETA}")
            params = GaussianBumpParams.from_eta(eta, sigma)
    except ValueError as exc:
        problems.append(f"{where}: {exc}")
        return None
    return params, center


def scenario_from_dict(data: dict, name: str = "scenario") -> Scenario:
    """Validate a parsed scenario document; collects every violation."""
    problems: list[str] = []
    defaults: list[str] = []
    if not isinstance(data, dict):
        raise ScenarioValidationError(["top level: expected a JSON object"])
    _expect_keys(
        data,
        {"name", "surface", "defects", "lambda1", "lambda2", "theta0",
         "sweep", "quadrature", "separate_central_distant"},
        "top level",
        problems,
    )

    name = data.get("name", name)
    if not isinstance(name, str) or not name:
        problems.append("name: expected a non-empty string")
        name = "scenario"

    surface = None
    if "surface" in data and data["surface"] is not None:
        raw_surface = data["surface"]
        if not isinstance(raw_surface, dict):
            problems.append("surface: expected an object")
        else:
            _expect_keys(raw_surface, {"bumps"}, "surface", problems)
            raw_bumps = raw_surface.get("bumps", [])
            if not isinstance(raw_bumps, list):
                problems.append("surface.bumps: expected a list")
            else:
                bumps = [_parse_bump(i, b, problems, defaults) for i, b in enumerate(raw_bumps)]
                if all(b is not None for b in bumps) and bumps:
                    surface = MultiBumpSurface(tuple(bumps))

    defects = None
    raw_defects = data.get("defects", [])
    if raw_defects is None:
        raw_defects = []
    if not isinstance(raw_defects, list):
        problems.append("defects: expected a list")
        raw_defects = []
    positions = []
    couplings = []
    for i, raw in enumerate(raw_defects):
        where = f"defects[{i}]"
        if not isinstance(raw, dict):
            problems.append(f"{where}: expected an object")
            continue
        _expect_keys(raw, {"position", "coupling"}, where, problems)
        if "position" not in raw:
            problems.append(f"{where}: position is required")
            continue
        positions.append(_as_pair(raw["position"], where + ".position", problems))
        if "coupling" in raw:
            couplings.append(_as_pair(raw["coupling"], where + ".coupling", problems))
        else:
            couplings.append(_DEFAULT_COUPLING)
            defaults.append(f"{where}.coupling={_DEFAULT_COUPLING[0]}")
    if positions and not problems:
        try:
            defects = DefectConfiguration(
                np.asarray(positions), np.array([complex(re, im) for re, im in couplings])
            )
        except ValueError as exc:
            problems.append(f"defects: {exc}")

    lambda1 = _as_number(data.get("lambda1", _DEFAULT_LAMBDA1), "lambda1", problems)
    if "lambda1" not in data:
        defaults.append(f"lambda1={_DEFAULT_LAMBDA1}")
    lambda2 = _as_number(data.get("lambda2", _DEFAULT_LAMBDA2), "lambda2", problems)
    if "lambda2" not in data:
        defaults.append(f"lambda2={_DEFAULT_LAMBDA2}")
    theta0 = _as_number(data.get("theta0", _DEFAULT_THETA0), "theta0", problems)
    if "theta0" not in data:
        defaults.append(f"theta0={_DEFAULT_THETA0}")

    sweep = None
    if "sweep" not in data:
        problems.append("sweep: required")
    elif not isinstance(data["sweep"], dict):
        problems.append("sweep: expected an object")
    else:
        raw_sweep = data["sweep"]
        _expect_keys(raw_sweep, {"kind", "grid", "fixed"}, "sweep", problems)
        kind = raw_sweep.get("kind")
        if kind not in ("k_sweep", "theta_sweep"):
            problems.append(f'sweep.kind: expected "k_sweep" or "theta_sweep", got {kind!r}')
        grid = None
        if not isinstance(raw_sweep.get("grid"), dict):
            problems.append("sweep.grid: expected an object with min/max/count")
        else:
            raw_grid = raw_sweep["grid"]
            _expect_keys(raw_grid, {"min", "max", "count"}, "sweep.grid", problems)
            gmin = _as_number(raw_grid.get("min"), "sweep.grid.min", problems)
            gmax = _as_number(raw_grid.get("max"), "sweep.grid.max", problems)
            count = raw_grid.get("count")
            if isinstance(count, bool) or not isinstance(count, int) or count < 2:
                problems.append("sweep.grid.count: expected an integer >= 2")
                count = 2
            if not gmin < gmax:
                problems.append("sweep.grid: min must be < max")
            grid = SweepGrid(min=gmin, max=gmax, count=count)
        if "fixed" in raw_sweep:
            fixed = _as_number(raw_sweep["fixed"], "sweep.fixed", problems)
        else:
            fixed = _DEFAULT_THETA0 if kind == "k_sweep" else 1.0
            defaults.append(f"sweep.fixed={fixed}")
        if kind == "theta_sweep" and not fixed > 0:
            problems.append("sweep.fixed: k*sigma must be positive for a theta sweep")
        if kind == "k_sweep" and grid is not None and not grid.min > 0:
            problems.append("sweep.grid.min: k*sigma must be positive for a k sweep")
        if kind in ("k_sweep", "theta_sweep") and grid is not None:
            sweep = SweepConfig(kind=kind, grid=grid, fixed=fixed)

    quadrature = QuadratureSpec()
    if "quadrature" in data:
        raw_quad = data["quadrature"]
        if not isinstance(raw_quad, dict):
            problems.append("quadrature: expected an object")
        else:
            _expect_keys(
                raw_quad,
                {"rel_tol", "abs_tol", "truncation_radius", "max_subdivisions"},
                "quadrature",
                problems,
            )
            try:
                quadrature = QuadratureSpec(
                    rel_tol=raw_quad.get("rel_tol", quadrature.rel_tol),
                    abs_tol=raw_quad.get("abs_tol", quadrature.abs_tol),
                    truncation_radius=raw_quad.get(
                        "truncation_radius", quadrature.truncation_radius
                    ),
                    max_subdivisions=raw_quad.get(
                        "max_subdivisions", quadrature.max_subdivisions
                    ),
                )
            except (TypeError, ValueError) as exc:
                problems.append(f"quadrature: {exc}")

    separate = data.get("separate_central_distant", False)
    if not isinstance(separate, bool):
        problems.append("separate_central_distant: expected a boolean")
        separate = False

    if problems:
        raise ScenarioValidationError(problems)
    return Scenario(
        name=name,
        surface=surface,
        defects=defects,
        lambda1=lambda1,
        lambda2=lambda2,
        theta0=theta0,
        sweep=sweep,
        quadrature=quadrature,
        separate_central_distant=separate,
        applied_defaults=tuple(defaults),
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"{path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"
        ) from exc
    return scenario_from_dict(data, name=path.stem)


def scenario_to_dict(scenario: Scenario) -> dict:
    """Canonical JSON-ready form; load(serialize(s)) reproduces s."""
    data: dict = {"name": scenario.name}
    if scenario.surface is not None:
        data["surface"] = {
            "bumps": [
                {"sigma": p.sigma, "delta": p.delta, "center": list(c)}
                for p, c in scenario.surface.bumps
            ]
        }
    if scenario.defects is not None:
        data["defects"] = [
            {"position": [float(x), float(y)], "coupling": [g.real, g.imag]}
            for (x, y), g in zip(scenario.defects.positions, scenario.defects.couplings)
        ]
    data["lambda1"] = scenario.lambda1
    data["lambda2"] = scenario.lambda2
    data["theta0"] = scenario.theta0
    data["sweep"] = {
        "kind": scenario.sweep.kind,
        "grid": {
            "min": scenario.sweep.grid.min,
            "max": scenario.sweep.grid.max,
            "count": scenario.sweep.grid.count,
        },
        "fixed": scenario.sweep.fixed,
    }
    data["quadrature"] = {
        "rel_tol": scenario.quadrature.rel_tol,
        "abs_tol": scenario.quadrature.abs_tol,
        "truncation_radius": scenario.quadrature.truncation_radius,
        "max_subdivisions": scenario.quadrature.max_subdivisions,
    }
    data["separate_central_distant"] = scenario.separate_central_distant
    return data


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def scenario_comment_lines(scenario: Scenario) -> list[str]:
    """Deterministic self-description echoed at the top of the CSV."""
    lines = [f"scenario: {scenario.name}"]
    if scenario.surface is None:
        lines.append("surface: flat")
    else:
        for i, (p, c) in enumerate(scenario.surface.bumps):
            lines.append(
                f"surface.bump[{i}]: sigma={_fmt(p.sigma)} eta={_fmt(p.eta)} "
                f"center=({_fmt(c[0])}, {_fmt(c[1])})"
            )
    if scenario.defects is None:
        lines.append("defects: none")
    else:
        for i in range(len(scenario.defects)):
            x, y = scenario.defects.positions[i]
            g = scenario.defects.couplings[i]
            lines.append(
                f"defect[{i}]: position=({_fmt(x)}, {_fmt(y)}) "
                f"coupling={_fmt(g.real)}{g.imag:+.17g}j"
            )
    lines.append(
        f"lambda1={_fmt(scenario.lambda1)} lambda2={_fmt(scenario.lambda2)} "
        f"theta0={_fmt(scenario.theta0)}"
    )
    g = scenario.sweep.grid
    lines.append(
        f"sweep: {scenario.sweep.kind} min={_fmt(g.min)} max={_fmt(g.max)} "
        f"count={g.count} fixed={_fmt(scenario.sweep.fixed)}"
    )
    q = scenario.quadrature
    lines.append(
        f"quadrature: rel_tol={_fmt(q.rel_tol)} abs_tol={_fmt(q.abs_tol)} "
        f"truncation_radius={_fmt(q.truncation_radius)} "
        f"max_subdivisions={q.max_subdivisions}"
    )
    lines.append(f"sigma_ref={_fmt(scenario.sigma_ref)}")
    lines.append(
        "defaults applied: " + (", ".join(scenario.applied_defaults) or "none")
    )
    return lines


def _thread_cap() -> int:
    raw = os.environ.get("GEOSCATTER_THREADS", "")
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            warnings.warn(f"ignoring non-integer GEOSCATTER_THREADS={raw!r}")
            cap = 0
        if cap >= 1:
            return cap
    return min(8, os.cpu_count() or 1)


def run_sweep(scenario: Scenario) -> list[SweepRow]:
    """Evaluate the amplitude at every grid point of the scenario's sweep.

    Rows are ordered by the swept variable and are deterministic for a
    given scenario regardless of the thread cap.  Individual row failures
    are tolerated up to 10% of the grid (they are dropped with a warning);
    beyond that the sweep aborts with :class:`SweepError`.
    """
    setup = scenario.setup()
    grid = scenario.sweep.grid
    values = np.linspace(grid.min, grid.max, grid.count)
    sigma_ref = scenario.sigma_ref

    def one(value: float) -> SweepRow:
        if scenario.sweep.kind == "k_sweep":
            k_sigma, theta = float(value), scenario.sweep.fixed
        else:
            k_sigma, theta = scenario.sweep.fixed, float(value)
        kin = Kinematics(k=k_sigma / sigma_ref, theta0=scenario.theta0, theta=theta)
        ta = total_amplitude(setup, kin)
        return SweepRow(
            k_sigma=k_sigma,
            theta=theta,
            re_f0=ta.f0.real,
            im_f0=ta.f0.imag,
            re_f1=ta.f1.real,
            im_f1=ta.f1.imag,
            dcs_over_sigma=ta.dcs / sigma_ref,
            delta_dcs_over_sigma=ta.dcs_minus_dcs0 / sigma_ref,
        )

    results: list[SweepRow | None] = [None] * len(values)
    failures: list[tuple[int, Exception]] = []

    def worker(i: int) -> None:
        try:
            results[i] = one(values[i])
        except Exception as exc:  # collected; sweep-level abort decided below
            failures.append((i, exc))

    cap = _thread_cap()
    if cap == 1:
        for i in range(len(values)):
            worker(i)
    else:
        with ThreadPoolExecutor(max_workers=cap) as pool:
            list(pool.map(worker, range(len(values))))

    if failures:
        failures.sort(key=lambda t: t[0])
        if len(failures) > 0.1 * len(values):
            raise SweepError(failures, len(values))
        for i, exc in failures:
            warnings.warn(f"sweep row {i} ({values[i]:g}) failed and was dropped: {exc}")
    return [r for r in results if r is not None]


def emit_csv(rows: list[SweepRow], path, comments: list[str] | None = None) -> None:
    """Write rows with the fixed header, 17 significant digits, LF endings."""
    if not rows:
        raise ValueError("no rows to emit")
    lines = [f"# {c}" for c in (comments or [])]
    lines.append(CSV_HEADER)
    for r in rows:
        lines.append(",".join(_fmt(v) for v in (
            r.k_sigma, r.theta, r.re_f0, r.im_f0, r.re_f1, r.im_f1,
            r.dcs_over_sigma, r.delta_dcs_over_sigma,
        )))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_csv(path) -> list[SweepRow]:
    """Read back an emitted CSV (comments skipped); bit-exact round trip."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line == CSV_HEADER:
                continue
            rows.append(SweepRow(*(float(tok) for tok in line.split(","))))
    return rows


_PLOT_TEMPLATE = """\
#!/usr/bin/env python3
\"\"\"Plot the cross-section columns of {csv_name} (auto-generated).\"\"\"
import os

import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))
data = np.genfromtxt(os.path.join(here, {csv_name!r}), delimiter=",", names=True)
x = data[{x_column!r}]

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
ax1.plot(x, data["dcs_over_sigma"])
ax1.set_xlabel({x_label!r})
ax1.set_ylabel("|f|^2 / sigma")
ax2.plot(x, data["delta_dcs_over_sigma"])
ax2.set_xlabel({x_label!r})
ax2.set_ylabel("(|f|^2 - |f0|^2) / sigma")
fig.tight_layout()
out = os.path.splitext(os.path.abspath(__file__))[0] + ".png"
fig.savefig(out, dpi=160)
print("wrote", out)
"""


def emit_plot_script(rows: list[SweepRow], path, csv_name: str | None = None) -> None:
    """Write a self-contained matplotlib script next to the CSV.

    The swept variable is inferred from the rows (whichever column
    varies); ``csv_name`` is the CSV's name relative to the script.
    """
    if not rows:
        raise ValueError("no rows to plot")
    path = Path(path)
    if csv_name is None:
        csv_name = path.with_suffix(".csv").name
    k_values = {r.k_sigma for r in rows}
    x_column, x_label = ("theta", "theta [rad]") if len(k_values) == 1 else ("k_sigma", "k sigma")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_PLOT_TEMPLATE.format(csv_name=csv_name, x_column=x_column, x_label=x_label))
