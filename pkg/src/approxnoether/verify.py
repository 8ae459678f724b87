"""Numerical conservation checks along solutions of the perturbed equation.

The Euler-Lagrange equation is solved for ``u'' = F(phi, u, u', eps)`` to the
requested order and integrated with the classical fixed-step Runge-Kutta
method.  Drift of a first integral is ``max |I(phi) - I(0)|`` on the grid.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Mapping, TextIO

import numpy as np

from .expr import Expr, lambdify
from .integrals import FirstIntegral
from .noether import EPS, HigherOrderEquation, NoetherError, PerturbedLagrangian, acceleration

METHOD = "rk4"
SINGULAR_U = 1e-6


class VerificationRefused(NoetherError):
    """Numeric verification is not available for this Lagrangian."""


class SingularityError(NoetherError):
    """The trajectory reached or crossed u = 0 while F has negative powers of u."""


@dataclass
class Trajectory:
    phi: np.ndarray
    u: np.ndarray
    up: np.ndarray
    eps: float
    params: dict = field(default_factory=dict)
    method: str = METHOD
    step: float = 0.0

    def __post_init__(self):
        if not (len(self.phi) == len(self.u) == len(self.up)):
            raise ValueError("trajectory arrays differ in length")
        if len(self.phi) > 1 and not np.all(np.diff(self.phi) > 0):
            raise ValueError("phi grid must be strictly increasing")

    def __len__(self):
        return len(self.phi)


def _has_negative_u_power(F: Expr, consts: Mapping[str, float]) -> bool:
    """True when a term with a negative power of u survives the numeric parameters."""
    neg = F.filter_terms(lambda key: key[1][0] < 0)
    if neg.is_zero:
        return False
    fn = lambdify(neg, ("phi", "u", "up"), consts)
    return any(fn(phi, 1.0, up) != 0.0 for phi, up in ((0.3, 0.0), (1.1, 0.7), (2.3, -0.4)))


def integrate_el(L: PerturbedLagrangian, order: int, eps: float, params: Mapping[str, float],
                 u0: float, up0: float, phi_end: float, h: float) -> Trajectory:
    """Fixed-step RK4 solution of the truncated equation of motion on [0, phi_end]."""
    if h <= 0 or phi_end <= 0:
        raise ValueError("step and interval length must be positive")
    try:
        F = acceleration(L, order)
    except HigherOrderEquation as exc:
        raise VerificationRefused(
            "the equation of motion is fourth order (u''-dependent perturbation);"
            " no first-integral formula or second-order integration is available") from exc
    consts = dict(params)
    consts[EPS] = eps
    f = lambdify(F, ("phi", "u", "up"), consts)
    guard = _has_negative_u_power(F, consts)

    n = max(1, math.ceil(phi_end / h - 1e-9))
    step = phi_end / n
    phi = np.linspace(0.0, phi_end, n + 1)
    u = np.empty(n + 1)
    up = np.empty(n + 1)
    x, v = float(u0), float(up0)
    u[0], up[0] = x, v
    half = 0.5 * step
    for i in range(n):
        t = phi[i]
        if guard and (abs(x) < SINGULAR_U or x * u[max(i - 1, 0)] < 0):
            raise SingularityError(
                f"u reaches 0 near phi = {t:.6g} while the equation has negative powers of u")
        a1 = f(t, x, v)
        x2, v2 = x + half * v, v + half * a1
        a2 = f(t + half, x2, v2)
        x3, v3 = x + half * v2, v + half * a2
        a3 = f(t + half, x3, v3)
        x4, v4 = x + step * v3, v + step * a3
        a4 = f(t + step, x4, v4)
        x += step / 6.0 * (v + 2 * v2 + 2 * v3 + v4)
        v += step / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
        u[i + 1], up[i + 1] = x, v
    return Trajectory(phi, u, up, eps, dict(params), METHOD, step)


def integral_values(I: FirstIntegral, t: Trajectory) -> np.ndarray:
    fn = I.numeric(t.eps, t.params, module=np)
    return np.broadcast_to(np.asarray(fn(t.phi, t.u, t.up), dtype=float), t.phi.shape)


def conservation_drift(I: FirstIntegral, t: Trajectory) -> tuple[float, np.ndarray]:
    """(max drift, |I - I(0)| along the grid)."""
    vals = integral_values(I, t)
    profile = np.abs(vals - vals[0])
    return float(profile.max()), profile


def write_delimited(t: Trajectory, stream: TextIO, integrals: Mapping[str, FirstIntegral] | None = None,
                    delimiter: str = ",") -> None:
    """phi, u, u' and each named integral, one grid point per line."""
    integrals = dict(integrals or {})
    cols = [integral_values(I, t) for I in integrals.values()]
    w = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    w.writerow(["phi", "u", "up", *integrals])
    for i in range(len(t)):
        w.writerow([repr(float(t.phi[i])), repr(float(t.u[i])), repr(float(t.up[i]))]
                   + [repr(float(c[i])) for c in cols])


__all__ = ["Trajectory", "integrate_el", "conservation_drift", "integral_values",
           "write_delimited", "VerificationRefused", "SingularityError"]
