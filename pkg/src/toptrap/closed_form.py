"""Exact solution of the rotating-drive two-level problem.

Starting fully in the weak-field-seeking state, the amplitudes in the
instantaneous eigenbasis are

    alpha(t) = cos(wbar t / 2) + i (drift / wbar) sin(wbar t / 2)
    beta(t)  = i (coupling / wbar) sin(wbar t / 2)

with drift = omega0 - omega cos(theta), coupling = omega sin(theta) and
wbar the effective Rabi frequency, so the survival probability oscillates
between 1 and drift^2 / wbar^2 with period 2 pi / wbar.  A flipped state
therefore returns completely after the resurrection time 2 pi / wbar; in
units of the drive period this is

    tau(x, theta) = 1 / sqrt(1 + x^2 - 2 x cos(theta)),   x = omega0 / omega,

which for theta <= pi/2 peaks at x = cos(theta) with value 1/sin(theta)
and for theta > pi/2 decreases monotonically from tau(0) = 1.

Time arguments may be scalars or arrays; scalar input gives scalar output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spin import DriveParams

# Below this fraction of the frequency scale the drive is treated as exactly
# degenerate (omega0 == omega, theta == 0) and the analytic limit alpha = 1 is
# returned; the singularity is removable.
DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class SpinAmplitudes:
    """Complex amplitude pair in the instantaneous eigenbasis, unit norm."""

    alpha: complex | np.ndarray
    beta: complex | np.ndarray


@dataclass(frozen=True)
class ResurrectionPoint:
    """Resurrection time ``tau`` in drive-period units at ratio ``x`` = omega0/omega."""

    x: float
    tau: float
    theta: float


def _check_times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("t must be finite")
    if np.any(t < 0.0):
        raise ValueError("t must be >= 0")
    return t


def _maybe_scalar(value, template):
    if np.ndim(template) == 0:
        return value.item() if hasattr(value, "item") else value
    return value


def _no_flip(p: DriveParams) -> bool:
    """True when the transition amplitude vanishes identically.

    Covers zero coupling (theta in {0, pi} or omega = 0) and drives so close
    to degeneracy that omega_bar underflows while the coupling does not
    (subnormal theta with omega = omega0).
    """
    return p.coupling == 0.0 or p.omega_bar < DEGENERATE_RTOL * max(p.omega0, p.omega)


def amplitudes_at(p: DriveParams, t) -> SpinAmplitudes:
    """Amplitudes (alpha, beta) at time ``t`` for the alpha(0) = 1 start.

    Raises:
        ValueError: for negative or non-finite ``t``.
    """
    ts = _check_times(t)
    wb = p.omega_bar
    if wb < DEGENERATE_RTOL * max(p.omega0, p.omega):
        alpha = np.ones_like(ts, dtype=complex)
        beta = np.zeros_like(ts, dtype=complex)
    else:
        half = 0.5 * wb * ts
        sin_half = np.sin(half)
        alpha = np.cos(half) + 1j * (p.drift / wb) * sin_half
        beta = 1j * (p.coupling / wb) * sin_half
    return SpinAmplitudes(alpha=_maybe_scalar(alpha, t), beta=_maybe_scalar(beta, t))


def survival_probability(p: DriveParams, t):
    """Probability of still being a weak-field seeker at time ``t``.

    cos^2(wbar t/2) + (drift/wbar)^2 sin^2(wbar t/2); identically 1 when the
    spin never flips (theta = 0, omega = 0, or a degenerate drive).
    """
    ts = _check_times(t)
    if _no_flip(p):
        return _maybe_scalar(np.ones_like(ts), t)
    wb = p.omega_bar
    half = 0.5 * wb * ts
    s = np.cos(half) ** 2 + (p.drift / wb) ** 2 * np.sin(half) ** 2
    return _maybe_scalar(np.clip(s, 0.0, 1.0), t)


def transition_probability(p: DriveParams, t):
    """Probability of having flipped to the strong-field seeker at time ``t``.

    (coupling/wbar)^2 sin^2(wbar t/2); complements
    :func:`survival_probability` to one.
    """
    ts = _check_times(t)
    if _no_flip(p):
        return _maybe_scalar(np.zeros_like(ts), t)
    wb = p.omega_bar
    q = (p.coupling / wb) ** 2 * np.sin(0.5 * wb * ts) ** 2
    return _maybe_scalar(np.clip(q, 0.0, 1.0), t)


def tau_of_ratio(x, theta):
    """Resurrection time in drive-period units as a function of x = omega0/omega.

    Accepts scalar or array ``x`` (and broadcastable ``theta``).  The
    denominator is evaluated as (1-x)^2 + 4 x sin^2(theta/2), which is exact
    at x = 0 (tau = 1) and never goes negative in floating point.

    Raises:
        ValueError: for negative or non-finite ``x``, or at the degenerate
            point x = 1, theta = 0 where no flip ever occurs.
    """
    xs = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xs)):
        raise ValueError("x must be finite")
    if np.any(xs < 0.0):
        raise ValueError("x must be >= 0")
    d2 = (1.0 - xs) ** 2 + 4.0 * xs * np.sin(0.5 * np.asarray(theta, dtype=float)) ** 2
    if np.any(d2 == 0.0):
        raise ValueError("resurrection undefined: no flip occurs (omega0 == omega, theta == 0)")
    return _maybe_scalar(1.0 / np.sqrt(d2), x)


def resurrection_time(p: DriveParams) -> ResurrectionPoint:
    """Resurrection time of the flipped state, in units of the drive period.

    Raises:
        ValueError: if omega = 0 (no drive period to measure against) or
            the effective Rabi frequency vanishes (no flip occurs).
    """
    if p.omega <= 0.0:
        raise ValueError("resurrection undefined: omega must be > 0")
    if p.omega_bar == 0.0:
        raise ValueError("resurrection undefined: no flip occurs (omega_bar = 0)")
    x = p.omega0 / p.omega
    return ResurrectionPoint(x=x, tau=float(tau_of_ratio(x, p.theta)), theta=p.theta)


def tau_extremum(theta: float) -> tuple[float, float] | None:
    """Interior maximum of tau(x) over x >= 0 at fixed ``theta``.

    For theta in (0, pi/2] the maximum 1/sin(theta) sits at x = cos(theta)
    (the boundary x = 0 when theta = pi/2); for theta in (pi/2, pi) tau
    decreases monotonically and ``None`` is returned.

    Raises:
        ValueError: for theta outside the open interval (0, pi).
    """
    if not (math.isfinite(theta) and 0.0 < theta < math.pi):
        raise ValueError(f"theta must lie in (0, pi), got {theta!r}")
    if theta > 0.5 * math.pi:
        return None
    return (math.cos(theta), 1.0 / math.sin(theta))
