"""Seeded random generators for subspaces, rays and unitaries.

All functions take an explicit ``numpy.random.Generator`` so every
randomized suite in the package is reproducible from a single seed.
"""

from __future__ import annotations

import numpy as np

from .subspace import (
    DEFAULT_TOL,
    InternalInvariantError,
    Subspace,
    Tolerance,
    UnitaryOp,
    bottom,
    compatible,
    span_of,
)

__all__ = [
    "random_unitary",
    "random_subspace",
    "random_ray",
    "random_ray_or_bot",
    "random_subspace_within",
    "random_ray_within",
    "random_compatible_pair",
    "random_incompatible_pair",
]


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng: np.random.Generator, dim: int) -> UnitaryOp:
    """Haar-distributed unitary via QR with phase correction."""
    z = _complex_gaussian(rng, (dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return UnitaryOp(dim, q)


def random_subspace(
    rng: np.random.Generator,
    dim: int,
    rank: int | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> Subspace:
    """Random subspace; rank uniform over 0..dim when unspecified, so the
    degenerate bottom and top values occur with positive probability."""
    if rank is None:
        rank = int(rng.integers(0, dim + 1))
    if not 0 <= rank <= dim:
        raise ValueError(f"rank {rank} out of range for dimension {dim}")
    if rank == 0:
        return bottom(dim)
    u = random_unitary(rng, dim)
    return Subspace(dim, u.matrix[:, :rank])


def random_ray(rng: np.random.Generator, dim: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    v = _complex_gaussian(rng, dim)
    return span_of([v], dim, tol)


def random_ray_or_bot(
    rng: np.random.Generator,
    dim: int,
    tol: Tolerance = DEFAULT_TOL,
    bot_probability: float = 0.125,
) -> Subspace:
    if rng.random() < bot_probability:
        return bottom(dim)
    return random_ray(rng, dim, tol)


def random_subspace_within(
    rng: np.random.Generator,
    p: Subspace,
    rank: int | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> Subspace:
    """Random subspace of p (rank uniform over 0..p.rank when unspecified)."""
    if rank is None:
        rank = int(rng.integers(0, p.rank + 1))
    if rank > p.rank:
        raise ValueError(f"requested rank {rank} inside a rank-{p.rank} subspace")
    if rank == 0 or p.rank == 0:
        return bottom(p.dim)
    coeffs = _complex_gaussian(rng, (p.rank, rank))
    return span_of(list((p.basis @ coeffs).T), p.dim, tol)


def random_ray_within(rng: np.random.Generator, p: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    if p.rank == 0:
        return bottom(p.dim)
    return random_subspace_within(rng, p, rank=1, tol=tol)


def random_compatible_pair(
    rng: np.random.Generator,
    dim: int,
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[Subspace, Subspace]:
    """A pair spanned by subsets of a common orthonormal basis, hence
    compatible by construction."""
    u = random_unitary(rng, dim)
    mask_p = rng.random(dim) < rng.random()
    mask_q = rng.random(dim) < rng.random()
    p = Subspace(dim, u.matrix[:, mask_p])
    q = Subspace(dim, u.matrix[:, mask_q])
    return p, q


def random_incompatible_pair(
    rng: np.random.Generator,
    dim: int,
    tol: Tolerance = DEFAULT_TOL,
    max_tries: int = 64,
) -> tuple[Subspace, Subspace]:
    """A pair that fails the compatibility test.  Requires dim >= 2; for
    generic proper subspaces incompatibility is the typical case."""
    if dim < 2:
        raise ValueError("incompatible pairs need dimension >= 2")
    for _ in range(max_tries):
        p = random_subspace(rng, dim, rank=int(rng.integers(1, dim)), tol=tol)
        q = random_subspace(rng, dim, rank=int(rng.integers(1, dim)), tol=tol)
        if not compatible(p, q, tol):
            return p, q
    raise InternalInvariantError("failed to sample an incompatible pair")
