"""Convex-roof nonclassicality of Fock-diagonal states by linear programming.

The nonclassicality of a Fock-diagonal state equals its mean photon number
minus the largest achievable ensemble average of |<a>|² over decompositions
that reproduce the populations.  Restricting the decomposition amplitudes to
a lattice turns that maximization into a linear program over a histogram of
weights, one column per lattice point: the LP optimum is a one-sided
(never-below) estimate of the true nonclassicality that tightens as the
spacing shrinks.  Phases never need to be enumerated; an optimal histogram
expands into an explicit ensemble by splitting every support point across
roots-of-unity phase patterns.
"""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass

import numpy as np

from . import simplex
from .grid import (
    DEFAULT_MAX_POINTS,
    AmplitudeGrid,
    build_grid,
    neighborhood_grid,
)
from .simplex import LpSolution, LpStatus, StandardFormLp
from .states import FockDiagonalState, PureFockWindowState, mean_photon, simple_bound

SUPPORT_TOL = 1e-10


class SolverFailure(Exception):
    """The decomposition LP did not reach an optimal vertex."""

    def __init__(self, status: LpStatus):
        super().__init__(f"linear program ended with status {status.value}")
        self.status = status


class GridResolutionWarning(UserWarning):
    """A population is too small for the lattice to place sqrt(p) accurately."""


class DecompositionKind(enum.Enum):
    SIMPLY_DECOMPOSED = "SimplyDecomposed"
    COMPOSITELY_DECOMPOSED = "CompositelyDecomposed"


@dataclass(frozen=True)
class Histogram:
    """Nonnegative weights on grid points whose mixture reproduces the state.

    ``indices`` are grid point indices in increasing (lattice) order.  The
    weights sum to one and satisfy sum_i Q_i x_k(i)^2 = p_{n+k} for every
    window level, both within the solver feasibility tolerance.
    """

    grid: AmplitudeGrid
    indices: np.ndarray
    weights: np.ndarray

    @property
    def support_size(self) -> int:
        return self.indices.size

    def support_lattice(self) -> np.ndarray:
        return self.grid.lattice[self.indices]

    def support_amplitudes(self) -> np.ndarray:
        """(support, rank) amplitude vectors including x0."""
        return np.hstack(
            [self.grid.x0[self.indices, None], self.grid.free_amplitudes[self.indices]]
        )

    def to_csv(self, path) -> None:
        """Write ``x1,...,x{M-1},weight`` rows, sorted by lattice index."""
        names = ",".join(f"x{k}" for k in range(1, self.grid.rank))
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"{names},weight\n")
            for idx, w in zip(self.indices, self.weights):
                coords = ",".join(
                    f"{v:.17g}" for v in self.grid.free_amplitudes[idx]
                )
                fh.write(f"{coords},{w:.17g}\n")


@dataclass(frozen=True)
class ExplicitDecomposition:
    """Explicit pure-state ensemble reproducing a Fock-diagonal state.

    Atoms come in groups of ``phase_order`` per histogram support point; the
    members of a group share amplitude moduli and differ by roots-of-unity
    phase patterns, which cancels the ensemble average of <a>².
    """

    atoms: list[tuple[float, PureFockWindowState]]
    phase_order: int

    def to_json(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(self.to_jsonable(), fh)
            fh.write("\n")

    def to_jsonable(self) -> list[dict]:
        return [
            {
                "probability": q,
                "amplitudes": [
                    {"re": float(c.real), "im": float(c.imag)}
                    for c in psi.amplitudes
                ],
            }
            for q, psi in self.atoms
        ]


def _require_lp_ready(state: FockDiagonalState) -> None:
    if state.rank < 2:
        raise ValueError("state must span at least two Fock levels")
    if not state.is_trimmed:
        raise ValueError(
            "state window has zero edge populations; call .trimmed() first"
        )


def assemble_lp(state: FockDiagonalState, grid: AmplitudeGrid) -> StandardFormLp:
    """Build the histogram LP for a state on a matching grid.

    One column per grid point with objective coefficient equal to the squared
    coherence kernel; equality rows are the weight normalization and the
    populations of levels 1..M-1.  The level-0 row is implied by the others
    and is omitted to keep the rows independent.
    """
    _require_lp_ready(state)
    if grid.rank != state.rank:
        raise ValueError(f"grid rank {grid.rank} != state rank {state.rank}")
    free_sq = grid.free_amplitudes**2
    rows = np.vstack([np.ones(grid.n_points), free_sq.T])
    rhs = np.concatenate([[1.0], state.populations[1:]])
    return StandardFormLp(
        objective=grid.objective_coeffs(state.offset), row_matrix=rows, rhs=rhs
    )


def _warn_fine_populations(state: FockDiagonalState, delta: float) -> None:
    tiny = [
        int(state.offset + k)
        for k in range(1, state.rank)
        if 0.0 < state.populations[k] < 4.0 * delta * delta
    ]
    if tiny:
        warnings.warn(
            f"populations of levels {tiny} are below 4*delta^2; the lattice cannot "
            f"resolve their amplitudes, consider a smaller delta",
            GridResolutionWarning,
            stacklevel=3,
        )


def _solve_on_grid(
    state: FockDiagonalState,
    grid: AmplitudeGrid,
    feas_tol: float,
    max_iter: int,
) -> tuple[float, Histogram, LpSolution]:
    lp = assemble_lp(state, grid)
    sol = simplex.solve(lp, feas_tol=feas_tol, max_iter=max_iter)
    if sol.status is not LpStatus.OPTIMAL:
        raise SolverFailure(sol.status)
    keep = sol.primal.values > SUPPORT_TOL
    indices = sol.primal.indices[keep]
    weights = sol.primal.values[keep]
    order = np.argsort(indices)
    hist = Histogram(grid=grid, indices=indices[order], weights=weights[order])
    return mean_photon(state) - sol.objective_value, hist, sol


def estimate_nonclassicality(
    state: FockDiagonalState,
    delta: float,
    feas_tol: float = simplex.DEFAULT_FEAS_TOL,
    max_iter: int = simplex.DEFAULT_MAX_ITER,
    max_points: int = DEFAULT_MAX_POINTS,
) -> tuple[float, Histogram]:
    """One-sided nonclassicality estimate on the full lattice of spacing delta.

    Returns the estimate (mean photon number minus the LP optimum, never
    below the true value) together with the optimal histogram.
    """
    _require_lp_ready(state)
    _warn_fine_populations(state, delta)
    grid = build_grid(state.rank, delta, max_points=max_points)
    value, hist, _ = _solve_on_grid(state, grid, feas_tol, max_iter)
    return value, hist


def _refine_impl(state, delta_start, levels, feas_tol, max_iter, max_points):
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    _require_lp_ready(state)
    _warn_fine_populations(state, delta_start)
    delta = delta_start
    grid = build_grid(state.rank, delta, max_points=max_points)
    steps: list[tuple[float, float]] = []
    hist = None
    for level in range(levels):
        if level > 0:
            radius = 2.0 * delta
            delta = delta / 2.0
            grid = neighborhood_grid(
                state.rank,
                delta,
                hist.support_lattice(),
                center_delta=2.0 * delta,
                radius=radius,
                max_points=max_points,
            )
        value, hist, _ = _solve_on_grid(state, grid, feas_tol, max_iter)
        steps.append((delta, value))
    return steps, hist


def refine(
    state: FockDiagonalState,
    delta_start: float,
    levels: int,
    feas_tol: float = simplex.DEFAULT_FEAS_TOL,
    max_iter: int = simplex.DEFAULT_MAX_ITER,
    max_points: int = DEFAULT_MAX_POINTS,
) -> list[tuple[float, float]]:
    """Estimate with local grid refinement around the optimal support.

    Level 1 solves on the full lattice at ``delta_start``.  Each further
    level halves the spacing and re-grids only a neighborhood of radius
    2*delta_prev per coordinate around the previous support (which is itself
    retained, so the estimate sequence cannot increase).  Returns the
    (delta, estimate) pairs in level order.
    """
    steps, _ = _refine_impl(state, delta_start, levels, feas_tol, max_iter, max_points)
    return steps


def refined_histogram(
    state: FockDiagonalState,
    delta_start: float,
    levels: int,
    feas_tol: float = simplex.DEFAULT_FEAS_TOL,
    max_iter: int = simplex.DEFAULT_MAX_ITER,
    max_points: int = DEFAULT_MAX_POINTS,
) -> tuple[float, Histogram]:
    """Like :func:`refine` but returning the final level's value and histogram."""
    steps, hist = _refine_impl(state, delta_start, levels, feas_tol, max_iter, max_points)
    return steps[-1][1], hist


def expand_histogram(
    state: FockDiagonalState, histogram: Histogram, phase_order: int | None = None
) -> ExplicitDecomposition:
    """Expand a histogram into an explicit phase-complete ensemble.

    Every support point of weight w becomes ``phase_order`` atoms of
    probability w/phase_order with amplitudes x_k * exp(2πi*j*(M-1-k)/P).
    P at least max(3, M) makes the mixture reproduce the diagonal state and
    cancels the ensemble average of <a>²; the default is max(4, M).
    """
    m = state.rank
    if phase_order is None:
        phase_order = max(4, m)
    if phase_order < max(3, m):
        raise ValueError(
            f"phase_order must be >= max(3, M) = {max(3, m)}, got {phase_order}"
        )
    amps = histogram.support_amplitudes()
    ks = np.arange(m)
    atoms: list[tuple[float, PureFockWindowState]] = []
    for row, w in zip(amps, histogram.weights):
        for j in range(phase_order):
            phases = np.exp(2j * np.pi * j * (m - 1 - ks) / phase_order)
            psi = PureFockWindowState(state.offset, row * phases)
            atoms.append((float(w) / phase_order, psi))
    return ExplicitDecomposition(atoms=atoms, phase_order=phase_order)


def classify_decomposition(
    state: FockDiagonalState,
    delta: float,
    feas_tol: float = simplex.DEFAULT_FEAS_TOL,
    max_iter: int = simplex.DEFAULT_MAX_ITER,
) -> DecompositionKind:
    """Decide whether the single-point decomposition is already optimal.

    A state is simply decomposed when the LP estimate matches the simple
    bound; the tolerance leaves room for the lattice's own resolution error,
    which scales with delta².
    """
    value, _ = estimate_nonclassicality(
        state, delta, feas_tol=feas_tol, max_iter=max_iter
    )
    tol = 1e-6 + 10.0 * delta * delta
    if simple_bound(state) - value <= tol:
        return DecompositionKind.SIMPLY_DECOMPOSED
    return DecompositionKind.COMPOSITELY_DECOMPOSED
