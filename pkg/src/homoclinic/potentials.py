"""Nonlinearities V with V(0) = V_u(0) = 0 and V_uu(0) = c0 > 0."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EnergyOverflow, InvalidArgument

EXP_LIMIT = 700.0


def _check_exp(u):
    if np.max(u, initial=-np.inf) > EXP_LIMIT:
        raise EnergyOverflow(f"e^u overflows: max u = {np.max(u):.6g} > {EXP_LIMIT}")


def _bridge_v(u):
    _check_exp(u)
    return np.expm1(u) - u


def _bridge_vu(u):
    _check_exp(u)
    return np.expm1(u)


def _bridge_vuu(u):
    _check_exp(u)
    return np.exp(u)


def _sh_v(u):
    return 0.25 * u * u * (u + 2.0) ** 2


def _sh_vu(u):
    return u * (u + 1.0) * (u + 2.0)


def _sh_vuu(u):
    return 3.0 * u * u + 6.0 * u + 2.0


@dataclass(frozen=True)
class Potential:
    """V, its first two derivatives, and the potential in the first integral.

    ``lower_well`` is a second zero of V below 0 (None if there is none); it
    is used to build mountain-pass endpoints when V grows too fast for a
    scaled bump to reach negative energy.
    """

    tag: str
    c0: float
    V: Callable
    V_u: Callable
    V_uu: Callable
    lower_well: float | None = None

    def V_poho(self, u):
        return self.V(np.asarray(u, dtype=float))


BRIDGE = Potential("bridge", 1.0, _bridge_v, _bridge_vu, _bridge_vuu)
SWIFT_HOHENBERG_SHIFTED = Potential(
    "swift_hohenberg_shifted", 2.0, _sh_v, _sh_vu, _sh_vuu, lower_well=-2.0
)

_ALIASES = {
    "bridge": BRIDGE,
    "sh": SWIFT_HOHENBERG_SHIFTED,
    "swift_hohenberg_shifted": SWIFT_HOHENBERG_SHIFTED,
}


def get_potential(p) -> Potential:
    if isinstance(p, Potential):
        return p
    try:
        return _ALIASES[p]
    except (KeyError, TypeError):
        raise InvalidArgument(f"unknown potential {p!r}; choose bridge or sh") from None
