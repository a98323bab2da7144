"""Deterministic, seeded instance generation.

Every sampler derives an independent stream from (seed, call-site label)
and fills values in a fixed order without touching LAPACK, so equal
seeds reproduce identical instances byte for byte. Random unitaries come
from Gram-Schmidt on a complex Gaussian draw; exactness of the Haar
measure matters less here than reproducibility.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .blocks import BlockMatrix
from .kernel import as_matrix, dagger, frobenius, hermitian_part

__all__ = [
    "GeneratorSpec",
    "equality_case_instance",
    "geometric_mean_instance",
    "nonhermitian_counterexample",
    "random_block_psd",
    "random_commuting_family",
    "random_hermitian",
    "random_psd",
]

_MASK64 = 2**64


def _stream(seed: int, label: str) -> np.random.Generator:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 8], "little") for i in range(0, 32, 8)]
    return np.random.default_rng(np.random.SeedSequence([int(seed) % _MASK64, *words]))


def _crandn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _hermitian_draw(rng: np.random.Generator, n: int) -> np.ndarray:
    return hermitian_part(_crandn(rng, (n, n)))


def _random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Gram-Schmidt orthonormalization of a Gaussian draw, fixed column order."""
    g = _crandn(rng, (n, n))
    q = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        v = g[:, j].copy()
        for i in range(j):
            v -= np.vdot(q[:, i], v) * q[:, i]
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            # essentially dependent draw; fall back to a basis vector
            v = np.zeros(n, dtype=np.complex128)
            v[j] = 1.0
            for i in range(j):
                v -= np.vdot(q[:, i], v) * q[:, i]
            norm = np.linalg.norm(v)
        q[:, j] = v / norm
    return q


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters pinning one block-matrix instance.

    ``rank`` counts the Gram summands; equal specs produce identical
    instances."""

    seed: int
    alpha: int
    n: int
    rank: int
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha < 2:
            raise ValueError("alpha must be at least 2")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def random_hermitian(n: int, seed: int, scale: float = 1.0) -> np.ndarray:
    """Hermitian matrix with Gaussian entries, Frobenius norm capped at scale*n."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = _stream(seed, "hermitian")
    m = _hermitian_draw(rng, n) * scale
    cap = scale * n
    norm = frobenius(m)
    if norm > cap:
        m *= cap / norm
    return m


def random_commuting_family(count: int, n: int, seed: int, scale: float = 1.0) -> list[np.ndarray]:
    """Hermitian matrices sharing one random eigenbasis, hence commuting
    up to roundoff."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = _stream(seed, "commuting_family")
    q = _random_unitary(n, rng)
    family = []
    for _ in range(count):
        diag = rng.uniform(-scale, scale, size=n)
        family.append(hermitian_part((q * diag) @ dagger(q)))
    return family


def random_psd(side: int, rank: int, seed: int, scale: float = 1.0) -> np.ndarray:
    """PSD matrix of the given side as a Gram product of a side x rank draw."""
    if side < 1 or rank < 0:
        raise ValueError("side must be positive and rank nonnegative")
    rng = _stream(seed, "psd")
    g = _crandn(rng, (side, max(rank, 1)))
    if rank == 0:
        return np.zeros((side, side), dtype=np.complex128)
    return hermitian_part(g @ dagger(g)) * scale


def random_block_psd(spec: GeneratorSpec) -> BlockMatrix:
    """PSD matrix with Hermitian blocks, as a sum of Gram stacks.

    Each summand stacks T S_1, ..., T S_alpha for a Hermitian T and a
    commuting family S_i; the product of the stack with its own adjoint
    has blocks T S_s S_t T, Hermitian because the S_i commute. rank = 0
    yields the zero matrix.
    """
    rng = _stream(spec.seed, "block_psd")
    side = spec.alpha * spec.n
    h = np.zeros((side, side), dtype=np.complex128)
    for _ in range(spec.rank):
        t = _hermitian_draw(rng, spec.n)
        q = _random_unitary(spec.n, rng)
        diags = rng.uniform(-1.0, 1.0, size=(spec.alpha, spec.n))
        stack = np.vstack([t @ hermitian_part((q * d) @ dagger(q)) for d in diags])
        h += stack @ dagger(stack)
    h = hermitian_part(h) * spec.scale
    return BlockMatrix(h, block_dim=spec.n, block_count=spec.alpha)


def equality_case_instance(n: int, seed: int) -> BlockMatrix:
    """2x2-block instance with commuting PSD corners and the geometric
    half-product as off-diagonal block, so the lower determinant bound is
    attained: det(I+H) = det(I+A+B)."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = _stream(seed, "equality_case")
    q = _random_unitary(n, rng)
    a = rng.uniform(0.0, 2.0, size=n)
    b = rng.uniform(0.0, 2.0, size=n)
    top = hermitian_part((q * a) @ dagger(q))
    bottom = hermitian_part((q * b) @ dagger(q))
    cross = hermitian_part((q * np.sqrt(a * b)) @ dagger(q))
    h = hermitian_part(np.block([[top, cross], [cross, bottom]]))
    return BlockMatrix(h, block_dim=n, block_count=2)


def geometric_mean_instance() -> BlockMatrix:
    """The concrete commuting equality witness with corners diag(4, 1)
    and diag(1, 9) and off-diagonal diag(2, 3); eigenvalues (10, 5, 0, 0)."""
    a = np.diag([4.0, 1.0])
    b = np.diag([1.0, 9.0])
    x = np.diag([2.0, 3.0])
    h = np.block([[a, x], [x, b]]).astype(np.complex128)
    return BlockMatrix(h, block_dim=2, block_count=2)


def nonhermitian_counterexample() -> BlockMatrix:
    """Rank-one 4x4 witness that the Hermitian-block hypothesis is needed.

    H = v v* for v = (1, 0, 0, 1): its off-diagonal block is nilpotent,
    and the top eigenvalue 2 of H exceeds the top eigenvalue 1 of the
    partial trace."""
    v = np.array([1.0, 0.0, 0.0, 1.0], dtype=np.complex128)
    h = np.outer(v, v.conj())
    return BlockMatrix(as_matrix(h), block_dim=2, block_count=2)
