"""Parameter sweeps over the drive parameters, with optional ODE oracle columns.

A sweep is a cartesian grid over up to three named axes drawn from
``omega0``, ``omega``, ``theta``, ``t`` and ``x`` (the ratio omega0/omega),
with the remaining inputs supplied as fixed values.  Quantities are
evaluated with the closed-form module; when ``oracle`` is set, survival and
transition pick up companion columns from the instantaneous-basis ODE
integration and the run aborts if any point disagrees beyond
``ORACLE_TOL``.  Evaluation order never affects the output: quantity
functions are pure and results are scattered back by grid index.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .closed_form import survival_probability, tau_of_ratio, transition_probability
from .integrate import evolve_instantaneous_basis
from .spin import DriveParams, omega_bar_of

AXIS_NAMES = ("omega0", "omega", "theta", "t", "x")
QUANTITIES = ("survival", "transition", "tau", "adiabaticity", "omega_bar")
MAX_GRID_POINTS = 10_000_000
ORACLE_TOL = 1e-8
THREADS_ENV = "TOPTRAP_THREADS"


class OracleMismatchError(RuntimeError):
    """Closed form and ODE oracle disagree beyond ORACLE_TOL."""


@dataclass(frozen=True)
class Axis:
    """One sweep dimension: a named, ordered set of at least two values."""

    name: str
    values: np.ndarray
    spacing: str = "explicit"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or len(values) < 2:
            raise ValueError(f"axis {self.name!r} needs at least 2 values")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"axis {self.name!r} has non-finite values")
        object.__setattr__(self, "values", values)

    @classmethod
    def linear(cls, name: str, start: float, stop: float, steps: int) -> "Axis":
        cls._check_range(name, start, stop, steps)
        return cls(name, np.linspace(start, stop, steps), "linear")

    @classmethod
    def log(cls, name: str, start: float, stop: float, steps: int) -> "Axis":
        cls._check_range(name, start, stop, steps)
        if start <= 0.0:
            raise ValueError(f"axis {name!r}: log spacing needs start > 0")
        return cls(name, np.geomspace(start, stop, steps), "log")

    @staticmethod
    def _check_range(name, start, stop, steps):
        if steps < 2:
            raise ValueError(f"axis {name!r} needs steps >= 2, got {steps}")
        if not (math.isfinite(start) and math.isfinite(stop) and start < stop):
            raise ValueError(f"axis {name!r} needs finite start < stop")


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition: axes, quantities to tabulate, fixed inputs, oracle flag."""

    axes: tuple[Axis, ...] = ()
    quantities: tuple[str, ...] = ("survival",)
    fixed: dict = field(default_factory=dict)
    oracle: bool = False

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "quantities", tuple(self.quantities))
        object.__setattr__(self, "fixed", dict(self.fixed))
        if len(self.axes) > 3:
            raise ValueError("at most 3 axes are supported")
        axis_names = [a.name for a in self.axes]
        if len(set(axis_names)) != len(axis_names):
            raise ValueError(f"duplicate axis names: {axis_names}")
        if not self.quantities:
            raise ValueError("at least one quantity is required")
        for q in self.quantities:
            if q not in QUANTITIES:
                raise ValueError(f"unknown quantity {q!r}; expected one of {QUANTITIES}")
        for name, value in self.fixed.items():
            if name not in AXIS_NAMES:
                raise ValueError(f"unknown fixed parameter {name!r}")
            if name in axis_names:
                raise ValueError(f"{name!r} is both an axis and a fixed parameter")
            if not math.isfinite(value):
                raise ValueError(f"fixed parameter {name!r} must be finite")
        provided = set(axis_names) | set(self.fixed)
        if "x" in provided and "omega0" in provided:
            raise ValueError("give either x = omega0/omega or omega0, not both")
        self._require(provided)

    def _require(self, provided: set):
        def need(names, why):
            missing = [n for n in names if n not in provided]
            if missing:
                raise ValueError(f"{why} requires {missing}; give them as axes or fixed values")

        wants_probability = any(q in ("survival", "transition") for q in self.quantities)
        if wants_probability:
            need(["theta", "t", "omega"], "survival/transition")
            if "x" not in provided:
                need(["omega0"], "survival/transition")
        if any(q in ("adiabaticity", "omega_bar") for q in self.quantities):
            need(["theta", "omega"], "adiabaticity/omega_bar")
            if "x" not in provided:
                need(["omega0"], "adiabaticity/omega_bar")
        if "tau" in self.quantities:
            need(["theta"], "tau")
            if "x" not in provided:
                need(["omega0", "omega"], "tau")
        if self.oracle and not wants_probability:
            raise ValueError("oracle columns apply only to survival/transition sweeps")


@dataclass(frozen=True)
class SweepResult:
    """Row-major table over the grid: axis columns first, then quantities."""

    axes: tuple[Axis, ...]
    columns: tuple[str, ...]
    table: np.ndarray
    params: dict
    meta: dict

    def column(self, name: str) -> np.ndarray:
        return self.table[:, self.columns.index(name)]


def _flat_param(name, axis_columns, fixed):
    """Flattened per-point values for ``name``, or a scalar, or None."""
    if name in axis_columns:
        return axis_columns[name]
    return fixed.get(name)


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate the requested quantities over the grid defined by ``spec``.

    Deterministic: identical specs give bit-identical tables.  Grids above
    ``MAX_GRID_POINTS`` are refused.  With ``spec.oracle`` set, survival and
    transition gain ``*_ode`` companion columns and an
    :class:`OracleMismatchError` names the worst point if the agreement
    bound ``ORACLE_TOL`` is violated.
    """
    shape = tuple(len(a.values) for a in spec.axes)
    n = int(np.prod(shape)) if shape else 1
    if n > MAX_GRID_POINTS:
        raise ValueError(f"grid too large: {n} points exceeds the {MAX_GRID_POINTS} limit")

    if spec.axes:
        mesh = np.meshgrid(*(a.values for a in spec.axes), indexing="ij")
        axis_columns = {a.name: m.reshape(-1) for a, m in zip(spec.axes, mesh)}
    else:
        axis_columns = {}

    def per_point(name):
        value = _flat_param(name, axis_columns, spec.fixed)
        if value is None:
            return None
        return np.broadcast_to(np.asarray(value, dtype=float), (n,))

    omega = per_point("omega")
    theta = per_point("theta")
    t = per_point("t")
    x = per_point("x")
    omega0 = per_point("omega0")
    if omega0 is None and x is not None and omega is not None:
        omega0 = x * omega

    columns: list[str] = [a.name for a in spec.axes]
    data: list[np.ndarray] = [axis_columns[a.name] for a in spec.axes]

    needs_ode = spec.oracle and any(q in ("survival", "transition") for q in spec.quantities)
    ode_series = _oracle_series(omega0, omega, theta, t) if needs_ode else None

    for q in spec.quantities:
        if q == "survival":
            values = _grouped_probability(survival_probability, omega0, omega, theta, t)
        elif q == "transition":
            values = _grouped_probability(transition_probability, omega0, omega, theta, t)
        elif q == "tau":
            ratio = x if x is not None else omega0 / omega
            values = np.asarray(tau_of_ratio(ratio, theta))
        elif q == "adiabaticity":
            values = 0.5 * omega * np.sin(theta) / omega0
        else:  # omega_bar
            values = np.asarray(omega_bar_of(omega0, omega, theta))
        columns.append(q)
        data.append(values)
        if needs_ode and q in ("survival", "transition"):
            oracle_values = ode_series[0] if q == "survival" else ode_series[1]
            _check_oracle(q, values, oracle_values, columns, data)
            columns.append(f"{q}_ode")
            data.append(oracle_values)

    table = np.column_stack(data)
    if not np.all(np.isfinite(table)):
        raise ValueError("sweep produced non-finite values")
    from . import __version__

    meta = {"tool": f"toptrap {__version__}", "method": "closed-form"}
    if needs_ode:
        meta["oracle"] = "instantaneous-basis"
    return SweepResult(
        axes=spec.axes,
        columns=tuple(columns),
        table=table,
        params=dict(spec.fixed),
        meta=meta,
    )


def _combos(omega0, omega, theta):
    """Unique (omega0, omega, theta) rows and the inverse point -> combo map."""
    stacked = np.stack([omega0, omega, theta])
    unique, inverse = np.unique(stacked, axis=1, return_inverse=True)
    return unique.T, inverse


def _grouped_probability(fn, omega0, omega, theta, t):
    values = np.empty(len(t))
    unique, inverse = _combos(omega0, omega, theta)
    for k, (o0, om, th) in enumerate(unique):
        mask = inverse == k
        values[mask] = fn(DriveParams(o0, om, th), t[mask])
    return values


def _oracle_series(omega0, omega, theta, t):
    """ODE survival/transition per point, integrating once per parameter combo."""
    survival = np.empty(len(t))
    transition = np.empty(len(t))
    unique, inverse = _combos(omega0, omega, theta)

    def solve(k):
        o0, om, th = unique[k]
        mask = inverse == k
        ts = t[mask]
        order = np.argsort(ts, kind="stable")
        series = evolve_instantaneous_basis(DriveParams(o0, om, th), ts[order])
        back = np.empty_like(order)
        back[order] = np.arange(len(order))
        survival[mask] = series.survival[back]
        transition[mask] = series.transition[back]

    workers = int(os.environ.get(THREADS_ENV, "1") or "1")
    if workers > 1 and len(unique) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(solve, range(len(unique))))
    else:
        for k in range(len(unique)):
            solve(k)
    return survival, transition


def _check_oracle(quantity, closed, oracle, columns, data):
    delta = np.abs(closed - oracle)
    worst = int(np.argmax(delta))
    if delta[worst] > ORACLE_TOL:
        where = ", ".join(
            f"{name}={col[worst]:.6g}" for name, col in zip(columns, data) if name in AXIS_NAMES
        )
        raise OracleMismatchError(
            f"{quantity}: closed form and ODE differ by {delta[worst]:.3e} "
            f"(> {ORACLE_TOL:.0e}) at {where or 'the fixed point'}"
        )


FIG1_THETAS = (0.3, 0.7, 1.2, math.pi / 2)
FIG3_THETAS = (math.pi / 6, 3 * math.pi / 4)


def figure_dataset(which: str, oracle: bool = False) -> SweepResult:
    """Canned sweeps behind the three standard plots.

    ``fig1``/``fig2``: survival versus time (units of 1/omega0, so omega0 is
    fixed at 1) at drive ratios omega/omega0 = 1.5 and 0.5 for a documented
    set of angles.  ``fig3``: resurrection time tau versus x = omega0/omega
    for one angle on each side of pi/2.  The choices are recorded in the
    result metadata.  ``oracle`` adds the ODE companion columns to the
    survival figures; fig3 has no ODE analogue and ignores it.
    """
    if which in ("fig1", "fig2"):
        ratio = 1.5 if which == "fig1" else 0.5
        spec = SweepSpec(
            axes=(
                Axis("theta", np.array(FIG1_THETAS)),
                Axis.linear("t", 0.0, 15.0, 1501),
            ),
            quantities=("survival",),
            fixed={"omega0": 1.0, "omega": ratio},
            oracle=oracle,
        )
        result = run_sweep(spec)
        result.meta["figure"] = which
        result.meta["description"] = (
            f"survival vs t (units 1/omega0) at omega = {ratio} omega0, "
            f"theta in {[round(v, 6) for v in FIG1_THETAS]}"
        )
        return result
    if which == "fig3":
        spec = SweepSpec(
            axes=(
                Axis("theta", np.array(FIG3_THETAS)),
                Axis.linear("x", 0.0, 4.0, 401),
            ),
            quantities=("tau",),
            fixed={},
            oracle=False,
        )
        result = run_sweep(spec)
        result.meta["figure"] = "fig3"
        result.meta["description"] = (
            "resurrection time tau (units 2*pi/omega) vs x = omega0/omega, "
            f"theta in {[round(v, 6) for v in FIG3_THETAS]}"
        )
        return result
    raise ValueError(f"unknown figure {which!r}; expected fig1, fig2 or fig3")
