"""
Choosing the Kraus decomposition of single-qubit amplitude damping.

Any unitary ``V`` remixes ``{K_1, K_2}`` into an equivalent decomposition
``L_n = sum_m V[n, m] K_m`` with a different total success probability.
The three phase angles of the Euler form of ``V`` drop out, so the search
reduces to a grid scan over the rotation angle ``delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channels import amplitude_damping, transform
from .restoration import p_ew

DEFAULT_POINTS = 401
DEFAULT_DELTA_MAX = 2.0 * math.pi
ARGMAX_TOL = 1e-12


@dataclass(frozen=True)
class EulerUnitary:
    """``V = e^{i alpha} Rz(beta) R(delta) Rz(gamma_phase)`` with ``Rz(x) = diag(e^{-ix}, e^{ix})``."""

    alpha: float = 0.0
    beta: float = 0.0
    gamma_phase: float = 0.0
    delta: float = 0.0

    def matrix(self) -> np.ndarray:
        return euler_matrix(self)


class SweepPoint(NamedTuple):
    delta: float
    p_ew: float


@dataclass(frozen=True)
class SweepCurve:
    gamma: float
    points: tuple

    def __post_init__(self):
        deltas = [p.delta for p in self.points]
        if any(b <= a for a, b in zip(deltas, deltas[1:])):
            raise ValueError("sweep deltas must be strictly increasing")

    @property
    def deltas(self) -> np.ndarray:
        return np.array([p.delta for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p.p_ew for p in self.points])


def rotation(delta: float) -> np.ndarray:
    c, s = math.cos(delta), math.sin(delta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _phase_diag(x: float) -> np.ndarray:
    return np.diag([np.exp(-1j * x), np.exp(1j * x)])


def euler_matrix(u: EulerUnitary) -> np.ndarray:
    return (
        np.exp(1j * u.alpha)
        * _phase_diag(u.beta)
        @ rotation(u.delta)
        @ _phase_diag(u.gamma_phase)
    )


def p_ew_of_mixing(gamma: float, v) -> float:
    return p_ew(transform(amplitude_damping(gamma), v))


def p_ew_of_delta(gamma: float, delta: float) -> float:
    """Success probability of the decomposition rotated by ``delta``."""
    return p_ew_of_mixing(gamma, rotation(delta))


def sweep_delta(
    gamma: float, n_points: int = DEFAULT_POINTS, delta_max: float = DEFAULT_DELTA_MAX
) -> SweepCurve:
    """Evaluate :func:`p_ew_of_delta` on ``n_points`` evenly spaced angles in ``[0, delta_max]``."""
    if n_points < 2:
        raise ValueError(f"sweep needs at least 2 points, got {n_points}")
    if not delta_max > 0.0:
        raise ValueError(f"delta_max must be positive, got {delta_max}")
    grid = np.linspace(0.0, delta_max, n_points)
    return SweepCurve(
        gamma, tuple(SweepPoint(float(d), p_ew_of_delta(gamma, float(d))) for d in grid)
    )


def argmax_delta(curve: SweepCurve, tol: float = ARGMAX_TOL) -> list[float]:
    """All grid angles whose value lies within ``tol`` of the curve maximum."""
    if not curve.points:
        raise ValueError("empty sweep curve")
    values = curve.values
    best = values.max()
    return [float(d) for d, v in zip(curve.deltas, values) if v >= best - tol]


def phase_invariance_check(gamma: float, samples: int, seed: int) -> float:
    """Largest change in success probability caused by the Euler phases.

    Draws ``samples`` random ``(alpha, beta, gamma_phase, delta)`` tuples and
    compares each against the pure rotation with the same ``delta``.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for alpha, beta, phase, delta in rng.uniform(0.0, 2.0 * math.pi, size=(samples, 4)):
        full = p_ew_of_mixing(gamma, euler_matrix(EulerUnitary(alpha, beta, phase, delta)))
        worst = max(worst, abs(full - p_ew_of_delta(gamma, delta)))
    return worst
