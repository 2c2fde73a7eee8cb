"""
Pure weak-measurement-reversal (WMR) baseline for the two-qubit dissipative
channel and its ratio to the environment-assisted success probability.

The WMR probability is the closed form for the state family
``alpha|00> + beta|11>`` with pre-channel weak measurement strengths
``p1_bar`` and ``p2_bar``. It is returned raw; for large strengths and long
times it exceeds 1, so it is only meaningful in the small-strength regime.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channels import DecayParams, DecayProfile, gamma_at
from .errors import ZeroGamma


@dataclass(frozen=True)
class WmrParams:
    p1_bar: float
    p2_bar: float
    beta_sq: float
    decay: DecayParams

    def __post_init__(self):
        for name in ("p1_bar", "p2_bar", "beta_sq"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


class RatioRow(NamedTuple):
    t: float
    alpha: float
    ratio: float


def _bracket(params: WmrParams) -> float:
    p1, p2 = params.p1_bar, params.p2_bar
    wa2 = 1.0 - params.decay.gamma_a**2
    wb2 = 1.0 - params.decay.gamma_b**2
    return p1 * p2 * (1.0 + params.beta_sq * (p2 * wb2 + p1 * wa2 + p1 * p2 * wa2 * wb2))


def p_wm(params: WmrParams) -> float:
    """Success probability of the WMR scheme (unclamped)."""
    ga2 = params.decay.gamma_a**2
    gb2 = params.decay.gamma_b**2
    return ga2 * gb2 * _bracket(params)


def ratio(params: WmrParams) -> float:
    """``P_WM / P_EW`` with the common ``gamma_A^2 gamma_B^2`` factor cancelled."""
    if params.decay.gamma_a == 0.0 or params.decay.gamma_b == 0.0:
        raise ZeroGamma("ratio undefined when a decay amplitude is zero")
    return _bracket(params)


def ratio_grid(
    p1_bar: float,
    p2_bar: float,
    alpha_steps: int,
    t_steps: int,
    profile: DecayProfile,
    t_max: float,
) -> list[RatioRow]:
    """Ratio over a uniform ``t x alpha`` grid, ``t`` outer and ``alpha`` inner.

    Both qubits share ``gamma(t)`` from ``profile``; ``beta^2 = 1 - alpha^2``.
    """
    if alpha_steps < 2 or t_steps < 2:
        raise ValueError("grid needs at least 2 steps along each axis")
    if not t_max > 0.0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    rows = []
    for t in np.linspace(0.0, t_max, t_steps):
        g = gamma_at(profile, float(t))
        decay = DecayParams(g, g)
        for alpha in np.linspace(0.0, 1.0, alpha_steps):
            beta_sq = max(0.0, 1.0 - float(alpha) ** 2)
            r = ratio(WmrParams(p1_bar, p2_bar, beta_sq, decay))
            rows.append(RatioRow(float(t), float(alpha), r))
    return rows
