"""Reproducible random states and unitaries.

Every sample draws from its own Philox substream keyed by ``(seed, index)``,
so sample ``k`` is the same no matter which worker produces it or in what
order. Gaussians come from a Box-Muller transform of the uniform stream.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .tensor import DensityMatrix, PureState

KINDS = ("haar_pure", "ginibre_mixed", "real_canonical")
_SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    num_qubits: int = 3
    count: int = 1
    seed: int = 0
    rank: int | None = None

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; expected one of {KINDS}")
        if self.num_qubits not in (2, 3):
            raise ValueError("num_qubits must be 2 or 3")
        if kind == "real_canonical" and self.num_qubits != 3:
            raise ValueError("real_canonical states are three-qubit only")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not 0 <= self.seed < _SEED_LIMIT:
            raise ValueError("seed must be a 64-bit unsigned integer")
        dim = 1 << self.num_qubits
        if kind == "ginibre_mixed":
            rank = dim if self.rank is None else self.rank
            if not 1 <= rank <= dim:
                raise ValueError(f"rank must lie in 1..{dim}")
            object.__setattr__(self, "rank", rank)


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sample ``index`` of the run seeded by ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` standard normal deviates via Box-Muller."""
    pairs = (size + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1], keeps log finite
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    return np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:size]


def complex_normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Circular complex Gaussians with E|z|^2 = 1."""
    k = int(np.prod(shape))
    z = standard_normals(rng, 2 * k)
    return ((z[:k] + 1j * z[k:]) / np.sqrt(2.0)).reshape(shape)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal phases removed."""
    q, r = np.linalg.qr(complex_normals(rng, (dim, dim)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_pure_state(num_qubits: int, seed: int, index: int) -> PureState:
    rng = substream(seed, index)
    while True:
        v = complex_normals(rng, (1 << num_qubits,))
        norm = np.linalg.norm(v)
        if norm > 0:
            return PureState(v / norm)


def ginibre_mixed_state(num_qubits: int, rank: int, seed: int, index: int) -> DensityMatrix:
    rng = substream(seed, index)
    dim = 1 << num_qubits
    while True:
        g = complex_normals(rng, (dim, rank))
        m = g @ g.conj().T
        tr = np.trace(m).real
        if tr > 0:
            return DensityMatrix.from_matrix(m / tr)


def real_canonical_lambdas(seed: int, index: int) -> np.ndarray:
    """Uniform point on the positive orthant of the unit 4-sphere."""
    rng = substream(seed, index)
    while True:
        g = np.abs(standard_normals(rng, 5))
        norm = np.linalg.norm(g)
        if norm > 0:
            return g / norm


def canonical_state(lambdas, phi: float = 0.0) -> PureState:
    """l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111>."""
    l0, l1, l2, l3, l4 = (float(x) for x in lambdas)
    v = np.zeros(8, dtype=complex)
    v[0], v[4], v[5], v[6], v[7] = l0, l1 * np.exp(1j * phi), l2, l3, l4
    return PureState(v)


def real_canonical_state(seed: int, index: int) -> PureState:
    return canonical_state(real_canonical_lambdas(seed, index))


def draw(spec: EnsembleSpec, index: int):
    """Sample ``index`` of the ensemble described by ``spec``."""
    if spec.kind == "haar_pure":
        return haar_pure_state(spec.num_qubits, spec.seed, index)
    if spec.kind == "ginibre_mixed":
        return ginibre_mixed_state(spec.num_qubits, spec.rank, spec.seed, index)
    return real_canonical_state(spec.seed, index)


def sample_haar_pure(spec: EnsembleSpec) -> Iterator[PureState]:
    if spec.kind != "haar_pure":
        raise ValueError("spec.kind must be haar_pure")
    return (draw(spec, k) for k in range(spec.count))


def sample_ginibre_mixed(spec: EnsembleSpec) -> Iterator[DensityMatrix]:
    if spec.kind != "ginibre_mixed":
        raise ValueError("spec.kind must be ginibre_mixed")
    return (draw(spec, k) for k in range(spec.count))


def sample_real_canonical(spec: EnsembleSpec) -> Iterator[PureState]:
    if spec.kind != "real_canonical":
        raise ValueError("spec.kind must be real_canonical")
    return (draw(spec, k) for k in range(spec.count))
