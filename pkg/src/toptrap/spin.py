"""Two-level spin model driven by a field rotating at fixed polar angle.

Conventions (hbar = 1, energies in angular-frequency units):

    H(t) = (omega0 / 2) * [[cos(theta),                 e^{-i omega t} sin(theta)],
                           [e^{+i omega t} sin(theta),  -cos(theta)]]

``omega0`` is the Larmor angular frequency set by the local field magnitude,
``omega`` the rotation frequency of the transverse field component and
``theta`` the polar angle between the total field and the z axis.  The
instantaneous spectrum is time independent, +-omega0/2; the weak-field
seeking state ``|->`` carries -omega0/2 and the strong-field seeker ``|+>``
carries +omega0/2.

Eigenvectors are produced by numerical diagonalisation with a fixed gauge:
the component of largest modulus is made real and non-negative (ties go to
the first component).  All probability-level outputs are independent of
that choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def omega_bar_of(omega0, omega, theta):
    """Effective Rabi frequency sqrt(omega0^2 + omega^2 - 2 omega0 omega cos theta).

    Evaluated as hypot(omega0 - omega, 2 sqrt(omega0 omega) sin(theta/2)),
    which is free of cancellation, symmetric under omega0 <-> omega, and
    exactly zero iff omega0 == omega and theta == 0.  Accepts scalars or
    broadcastable arrays.
    """
    return np.hypot(omega0 - omega, 2.0 * np.sqrt(omega0 * omega) * np.sin(0.5 * theta))


@dataclass(frozen=True)
class DriveParams:
    """Reduced parameters of the rotating spin drive.

    Attributes:
        omega0: Larmor angular frequency, rad/s (> 0).
        omega: rotation angular frequency of the drive, rad/s (>= 0).
        theta: polar angle between the field and the z axis, rad, in [0, pi].
    """

    omega0: float
    omega: float
    theta: float

    def __post_init__(self):
        for name in ("omega0", "omega", "theta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.omega0 <= 0.0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0!r}")
        if self.omega < 0.0:
            raise ValueError(f"omega must be >= 0, got {self.omega!r}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta out of [0, pi]: {self.theta!r}")

    @property
    def omega_bar(self) -> float:
        """Effective Rabi frequency; zero only for omega0 == omega, theta == 0."""
        return float(omega_bar_of(self.omega0, self.omega, self.theta))

    @property
    def drift(self) -> float:
        """Diagonal rate omega0 - omega cos(theta) of the amplitude equations.

        Grouped as (omega0 - omega) + 2 omega sin^2(theta/2) so that the
        ratio drift/omega_bar stays accurate when both are small.
        """
        return (self.omega0 - self.omega) + 2.0 * self.omega * math.sin(0.5 * self.theta) ** 2

    @property
    def coupling(self) -> float:
        """Off-diagonal rate omega sin(theta); zero means the spin never flips."""
        return self.omega * math.sin(self.theta)


@dataclass(frozen=True)
class EigenPair:
    """Instantaneous eigensystem of the 2x2 drive Hamiltonian."""

    value_plus: float
    value_minus: float
    vec_plus: np.ndarray
    vec_minus: np.ndarray


def hamiltonian_at(p: DriveParams, t: float) -> np.ndarray:
    """Return the 2x2 Hamiltonian matrix at time ``t``.

    The result is Hermitian and traceless with det = -omega0^2/4, so its
    eigenvalues are +-omega0/2 for every ``t`` and ``theta``.

    Args:
        p: drive parameters.
        t: time in seconds; any finite value.

    Raises:
        ValueError: if ``t`` is not finite.
    """
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    diag = 0.5 * p.omega0 * math.cos(p.theta)
    off = 0.5 * p.omega0 * math.sin(p.theta) * complex(math.cos(p.omega * t), -math.sin(p.omega * t))
    return np.array([[diag, off], [off.conjugate(), -diag]], dtype=complex)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-modulus component is real >= 0."""
    k = int(np.argmax(np.abs(v)))
    pivot = v[k]
    mag = abs(pivot)
    if mag == 0.0:
        return v
    return v * (pivot.conjugate() / mag)


def eigensystem_at(p: DriveParams, t: float) -> EigenPair:
    """Diagonalise the Hamiltonian at time ``t``.

    Eigenvalues come out as -omega0/2 (weak-field seeker, ``vec_minus``) and
    +omega0/2 (strong-field seeker, ``vec_plus``); vectors are orthonormal
    and phase-fixed per the module convention, which keeps them continuous
    in ``t`` away from isolated convention-switch points.
    """
    h = hamiltonian_at(p, t)
    values, vectors = np.linalg.eigh(h)
    return EigenPair(
        value_plus=float(values[1]),
        value_minus=float(values[0]),
        vec_plus=_fix_phase(vectors[:, 1]),
        vec_minus=_fix_phase(vectors[:, 0]),
    )


def adiabaticity_parameter(p: DriveParams) -> float:
    """Dimensionless adiabaticity measure (omega / (2 omega0)) sin(theta).

    Evolution is adiabatic when this is much less than one; note that the
    angle enters on equal footing with the frequency ratio, so a slow drive
    is sufficient but not necessary.
    """
    return 0.5 * p.omega * math.sin(p.theta) / p.omega0


def default_fd_step(p: DriveParams) -> float:
    """Central-difference step used by :func:`adiabaticity_matrix_element`.

    1e-6 of the shortest drive period balances truncation against round-off
    at double precision.
    """
    return 1e-6 * 2.0 * math.pi / max(p.omega, p.omega0)


def adiabaticity_matrix_element(p: DriveParams, t: float = 0.0, dt: float | None = None) -> float:
    """Evaluate |<-(t)| dH/dt |+(t)>| / (E+ - E-)^2 by central differences.

    The squared gap makes the ratio dimensionless; for this drive it is
    independent of ``t`` and converges quadratically in ``dt`` to
    ``adiabaticity_parameter(p)``.

    Args:
        p: drive parameters.
        t: evaluation time.
        dt: finite-difference step; defaults to :func:`default_fd_step`.

    Raises:
        ValueError: if ``dt`` is not a positive finite number.
    """
    if dt is None:
        dt = default_fd_step(p)
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be > 0, got {dt!r}")
    h_dot = (hamiltonian_at(p, t + dt) - hamiltonian_at(p, t - dt)) / (2.0 * dt)
    pair = eigensystem_at(p, t)
    element = abs(np.vdot(pair.vec_minus, h_dot @ pair.vec_plus))
    gap = pair.value_plus - pair.value_minus
    return float(element / gap**2)
