"""Steering and Bell-CHSH functionals of two-qubit states.

All closed forms depend on the state only through its correlation matrix T
and its singular values t1 >= t2 >= t3:

* 2-setting steering maximum squared:  t1^2 + t2^2
* 3-setting steering maximum squared:  t1^2 + t2^2 + t3^2  (= ||T||_F^2)
* maximal CHSH value (Horodecki):       2 sqrt(t1^2 + t2^2)

``optimize_settings`` searches measurement directions numerically and is the
independent check on the first two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import standard_normals, substream
from .tensor import PAULIS, DensityMatrix, correlation_matrix

VIOLATION_TOL = 1e-9
_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True, eq=False)
class MeasurementSettings:
    """n untrusted-side unit directions ``u`` and n orthonormal trusted-side directions ``v``."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        v = np.array(self.v, dtype=float)
        if u.ndim != 2 or u.shape[1] != 3 or u.shape != v.shape:
            raise ValueError("u and v must both be n x 3 arrays")
        if u.shape[0] not in (2, 3):
            raise ValueError("only n = 2 or 3 settings are supported")
        if np.max(np.abs(np.linalg.norm(u, axis=1) - 1)) > 1e-10:
            raise ValueError("every u_i must be a unit vector")
        if np.max(np.abs(v @ v.T - np.eye(len(v)))) > 1e-10:
            raise ValueError("the v_i must be orthonormal")
        u.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True)
class ViolationReport:
    f2_sq: float
    f3_sq: float
    bell_max: float
    singulars: tuple[float, float, float]


def _t(rho2):
    return correlation_matrix(rho2)


def violation_report(rho2: DensityMatrix) -> ViolationReport:
    s = _t(rho2).singular_values
    f2 = s[0] ** 2 + s[1] ** 2
    return ViolationReport(f2_sq=f2, f3_sq=f2 + s[2] ** 2, bell_max=2 * math.sqrt(f2), singulars=s)


def f2_max_sq(rho2: DensityMatrix) -> float:
    """Squared maximal violation of the 2-setting steering inequality."""
    s = _t(rho2).singular_values
    return s[0] ** 2 + s[1] ** 2


def f3_max_sq(rho2: DensityMatrix) -> float:
    """Squared maximal violation of the 3-setting steering inequality (Frobenius norm of T squared)."""
    return _t(rho2).frobenius_sq()


def bell_chsh_max(rho2: DensityMatrix) -> float:
    return 2 * math.sqrt(f2_max_sq(rho2))


def steering_functional(rho2: DensityMatrix, mu: MeasurementSettings) -> float:
    """F_n = |sum_i u_i . T v_i| / sqrt(n)."""
    t = _t(rho2).t
    total = np.einsum("ia,ab,ib->", mu.u, t, mu.v)
    return abs(float(total)) / math.sqrt(mu.n)


def violates(value: float, bound: float, tol: float = VIOLATION_TOL) -> bool:
    """Strict violation test; values at the bound do not count."""
    return value > bound + tol


def _best_u(t, v):
    """Optimal untrusted directions for trusted frame rows ``v``."""
    tv = v @ t.T
    norms = np.linalg.norm(tv, axis=1)
    u = np.empty_like(tv)
    for i, nrm in enumerate(norms):
        u[i] = tv[i] / nrm if nrm > 0 else _Z
    return u, float(norms.sum())


def _random_frame(rng):
    q, r = np.linalg.qr(standard_normals(rng, 9).reshape(3, 3))
    return (q * np.sign(np.diag(r))).T  # rows are orthonormal


def _small_rotation(rng, scale):
    w = standard_normals(rng, 3) * scale
    theta = float(np.linalg.norm(w))
    if theta == 0:
        return np.eye(3)
    k = np.array([[0, -w[2], w[1]], [w[2], 0, -w[0]], [-w[1], w[0], 0]]) / theta
    return np.eye(3) + math.sin(theta) * k + (1 - math.cos(theta)) * (k @ k)


def _search_frame(t, n, rng, max_steps):
    frame = _random_frame(rng)
    _, value = _best_u(t, frame[:n])
    step = 0.5
    for _ in range(max_steps):
        rot = _small_rotation(rng, step)
        trial = frame @ rot.T
        _, trial_value = _best_u(t, trial[:n])
        if trial_value <= value:
            # a failed proposal near an optimum usually means the reverse rotation climbs
            trial = frame @ rot
            _, trial_value = _best_u(t, trial[:n])
        if trial_value > value:
            frame, value = trial, trial_value
            step = min(step * 1.5, 1.0)
        else:
            step *= 0.7
        if step < 1e-6:
            break
    return frame[:n], value


def optimize_settings(rho2: DensityMatrix, n: int, restarts: int = 20, seed: int = 0,
                      max_steps: int = 200) -> tuple[MeasurementSettings, float]:
    """Numerically maximize F_n over measurement settings.

    Each restart draws a random trusted frame and hill-climbs it with random
    small rotations; the untrusted directions are set to their exact optimum
    T v_i / |T v_i| at every step. Restart ``r`` uses substream ``(seed, r)``;
    the best value wins, ties going to the lowest restart index.
    """
    if n not in (2, 3):
        raise ValueError("n must be 2 or 3")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    t = _t(rho2).t
    best_v, best_value = None, -1.0
    for r in range(restarts):
        v, value = _search_frame(t, n, substream(seed, r), max_steps)
        if value > best_value:
            best_v, best_value = v, value
    u, total = _best_u(t, best_v)
    return MeasurementSettings(u, best_v), total / math.sqrt(n)


def chsh_operator(a, a2, b, b2) -> np.ndarray:
    """A(x)B + A(x)B' + A'(x)B - A'(x)B' for spin observables along the given directions."""

    def obs(n):
        return sum(float(c) * p for c, p in zip(n, PAULIS))

    A, A2, B, B2 = obs(a), obs(a2), obs(b), obs(b2)
    return np.kron(A, B) + np.kron(A, B2) + np.kron(A2, B) - np.kron(A2, B2)


def horodecki_settings(rho2: DensityMatrix):
    """Measurement directions (a, a', b, b') attaining 2 sqrt(t1^2 + t2^2)."""
    t = _t(rho2).t
    u, s, vt = np.linalg.svd(t)
    theta = math.atan2(s[1], s[0])
    b = math.cos(theta) * vt[0] + math.sin(theta) * vt[1]
    b2 = math.cos(theta) * vt[0] - math.sin(theta) * vt[1]
    return u[:, 0], u[:, 1], b, b2


def chsh_expectation(rho2: DensityMatrix, settings) -> float:
    """Tr(rho B_CHSH) evaluated directly from the operator."""
    return float(np.trace(rho2.entries @ chsh_operator(*settings)).real)
