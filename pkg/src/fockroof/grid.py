"""Lattice discretization of the decomposition amplitude space.

A pure state on an M-level window is fixed (up to phases, which are dealt
with after the optimization) by the nonnegative amplitudes of the M - 1
upper levels; the ground amplitude follows from normalization.  The grid
enumerates all vectors (l_1*delta, ..., l_{M-1}*delta) with nonnegative
integers l_k and sum of squares at most 1, in lexicographic order of the
integer tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

DEFAULT_MAX_POINTS = 5_000_000


class GridCapacityError(Exception):
    """Requested grid would exceed the configured point budget."""

    def __init__(self, requested: int, budget: int):
        super().__init__(
            f"grid would contain {requested} points, exceeding the budget of {budget}"
        )
        self.requested = requested
        self.budget = budget


def _lattice_radius_sq(delta: float) -> int:
    """Largest integer L with L*delta^2 <= 1.

    The relative epsilon keeps endpoint lattice points (e.g. x = 1.0 for
    delta = 0.01) that exact-decimal spacings would otherwise lose to float
    rounding of 1/delta^2.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return int((1.0 + 1e-12) / (delta * delta) + 1e-9)


def count_grid_points(rank: int, delta: float) -> int:
    """Number of lattice points for the given window rank, without building them.

    Counts by convolving shell counts one free coordinate at a time.
    """
    if rank < 2:
        raise ValueError(f"rank must be >= 2, got {rank}")
    limit = _lattice_radius_sq(delta)
    counts = np.ones(limit + 1, dtype=np.int64)
    for _ in range(rank - 1):
        acc = np.zeros(limit + 1, dtype=np.int64)
        for l in range(isqrt(limit) + 1):
            acc[l * l :] += counts[: limit + 1 - l * l]
        counts = acc
    return int(counts[limit])


def _enumerate_lattice(budget: int, dims: int) -> np.ndarray:
    if dims == 1:
        return np.arange(isqrt(budget) + 1, dtype=np.int32)[:, None]
    blocks = []
    for l in range(isqrt(budget) + 1):
        sub = _enumerate_lattice(budget - l * l, dims - 1)
        lead = np.full((sub.shape[0], 1), l, dtype=np.int32)
        blocks.append(np.hstack([lead, sub]))
    return np.vstack(blocks)


@dataclass(frozen=True)
class GridPoint:
    """One decomposition amplitude vector.

    ``free_amplitudes`` are (x_1, ..., x_{M-1}); ``x0`` is the normalization
    remainder.  ``objective_coeff`` is the squared coherence kernel, filled in
    once the point is bound to a window offset.
    """

    free_amplitudes: tuple[float, ...]
    x0: float
    objective_coeff: float | None = None


class _PointView:
    """Lazy sequence of GridPoint over the grid arrays."""

    def __init__(self, grid: "AmplitudeGrid"):
        self._grid = grid

    def __len__(self) -> int:
        return self._grid.n_points

    def __getitem__(self, i) -> GridPoint:
        return self._grid.point(int(i))

    def __iter__(self):
        for i in range(len(self)):
            yield self._grid.point(i)


class AmplitudeGrid:
    """All lattice amplitude vectors for one window rank and spacing."""

    def __init__(self, rank: int, delta: float, lattice: np.ndarray):
        if lattice.ndim != 2 or lattice.shape[1] != rank - 1:
            raise ValueError("lattice must be (n_points, rank-1)")
        self.rank = rank
        self.delta = float(delta)
        lattice = np.ascontiguousarray(lattice, dtype=np.int32)
        lattice.setflags(write=False)
        self.lattice = lattice
        free = lattice.astype(float) * self.delta
        self.free_amplitudes = free
        self.x0 = np.sqrt(np.clip(1.0 - np.sum(free * free, axis=1), 0.0, None))
        free.setflags(write=False)
        self.x0.setflags(write=False)

    @property
    def n_points(self) -> int:
        return self.lattice.shape[0]

    def __len__(self) -> int:
        return self.n_points

    @property
    def points(self) -> _PointView:
        return _PointView(self)

    def point(self, i: int, offset: int | None = None) -> GridPoint:
        coeff = None
        if offset is not None:
            amps = np.concatenate([[self.x0[i]], self.free_amplitudes[i]])
            k = np.arange(self.rank - 1)
            coeff = float(np.sum(amps[1:] * amps[:-1] * np.sqrt(offset + k + 1.0)) ** 2)
        return GridPoint(
            free_amplitudes=tuple(self.free_amplitudes[i]),
            x0=float(self.x0[i]),
            objective_coeff=coeff,
        )

    def amplitude_matrix(self) -> np.ndarray:
        """(n_points, rank) array of full amplitude vectors (x0, x1, ...)."""
        return np.hstack([self.x0[:, None], self.free_amplitudes])

    def objective_coeffs(self, offset: int) -> np.ndarray:
        """Squared coherence kernel of every point for a window starting at offset."""
        x = self.amplitude_matrix()
        alpha = np.zeros(self.n_points)
        for k in range(self.rank - 1):
            alpha += x[:, k] * x[:, k + 1] * np.sqrt(offset + k + 1.0)
        return alpha**2


def build_grid(
    rank: int, delta: float, max_points: int = DEFAULT_MAX_POINTS
) -> AmplitudeGrid:
    """Enumerate the full amplitude lattice for a rank-M window.

    Points are ordered lexicographically in the integer coordinates.  Raises
    :class:`GridCapacityError` before materializing anything too large.
    """
    if rank < 2:
        raise ValueError(f"rank must be >= 2, got {rank}")
    n = count_grid_points(rank, delta)
    if n > max_points:
        raise GridCapacityError(n, max_points)
    lattice = _enumerate_lattice(_lattice_radius_sq(delta), rank - 1)
    return AmplitudeGrid(rank, delta, lattice)


def neighborhood_grid(
    rank: int,
    delta: float,
    centers: np.ndarray,
    center_delta: float,
    radius: float,
    max_points: int = DEFAULT_MAX_POINTS,
) -> AmplitudeGrid:
    """Lattice points of spacing ``delta`` within a per-coordinate radius of
    the given centers (centers are lattice vectors at ``center_delta``).

    The centers themselves are kept, so any histogram supported on them stays
    feasible on the refined grid.
    """
    limit = _lattice_radius_sq(delta)
    scale = center_delta / delta
    steps = int(round(radius / delta))
    blocks = []
    for center in np.atleast_2d(centers):
        mids = np.rint(np.asarray(center, dtype=float) * scale).astype(np.int64)
        axes = [
            np.arange(max(0, m - steps), m + steps + 1, dtype=np.int64) for m in mids
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], axis=1)
        blocks.append(pts[np.sum(pts * pts, axis=1) <= limit])
    pts = np.unique(np.vstack(blocks), axis=0)
    if pts.shape[0] > max_points:
        raise GridCapacityError(int(pts.shape[0]), max_points)
    return AmplitudeGrid(rank, delta, pts.astype(np.int32))
