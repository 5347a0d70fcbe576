"""Fock-window states and their closed-form nonclassicality quantities.

A single bosonic mode whose density matrix is diagonal in the Fock basis is
fully described by the populations of a contiguous photon-number window
[n, n + M - 1].  This module holds the two state types used everywhere else
(diagonal mixed states and pure states supported on the same window), the
first/second ladder-operator moments, and the handful of quantities that have
closed forms: the pure-state nonclassicality, the two-level mixed-state
result, the simple-decomposition upper bound, and truncated thermal states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Normalization is checked strictly at construction; quantities derived by
# floating-point arithmetic downstream are held to the looser 1e-10.
CONSTRUCTION_TOL = 1e-12
ARITHMETIC_TOL = 1e-10


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FockDiagonalState:
    """Mixed state diagonal in the Fock basis on a contiguous window.

    ``populations[k]`` is the probability of photon number ``offset + k``.
    Interior zeros are allowed (a gapped state is represented on the full
    window spanning it); use :meth:`trimmed` to drop zero populations at the
    window edges.  Instances are immutable.
    """

    offset: int
    populations: np.ndarray

    def __post_init__(self):
        if self.offset < 0 or int(self.offset) != self.offset:
            raise ValueError(f"offset must be a nonnegative integer, got {self.offset}")
        pops = np.asarray(self.populations, dtype=float)
        if pops.ndim != 1 or pops.size < 1:
            raise ValueError("populations must be a nonempty 1-d vector")
        if np.any(pops < 0.0):
            raise ValueError(f"populations must be nonnegative, got {pops}")
        if not np.all(np.isfinite(pops)):
            raise ValueError("populations must be finite")
        total = float(pops.sum())
        if abs(total - 1.0) > CONSTRUCTION_TOL:
            raise ValueError(f"populations must sum to 1 (got {total!r})")
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "populations", _readonly(pops))

    @property
    def rank(self) -> int:
        """Window length M (counts interior zeros)."""
        return self.populations.size

    @property
    def photon_numbers(self) -> np.ndarray:
        return self.offset + np.arange(self.rank)

    @property
    def is_trimmed(self) -> bool:
        return self.populations[0] > 0.0 and self.populations[-1] > 0.0

    def trimmed(self) -> "FockDiagonalState":
        """Return the state with zero populations stripped from both window ends."""
        pops = self.populations
        lo = 0
        while pops[lo] == 0.0:
            lo += 1
        hi = pops.size
        while pops[hi - 1] == 0.0:
            hi -= 1
        if lo == 0 and hi == pops.size:
            return self
        return FockDiagonalState(self.offset + lo, pops[lo:hi])


@dataclass(frozen=True, eq=False)
class PureFockWindowState:
    """Pure state supported on the window [offset, offset + M - 1]."""

    offset: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.offset < 0 or int(self.offset) != self.offset:
            raise ValueError(f"offset must be a nonnegative integer, got {self.offset}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("amplitudes must be a nonempty 1-d vector")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > CONSTRUCTION_TOL:
            raise ValueError(f"state must be normalized (|c|^2 sums to {norm_sq!r})")
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @property
    def rank(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class MomentTriple:
    """First and second ladder-operator moments of a window state.

    ``n_bar`` is <a†a>, ``alpha_bar`` is <a> and ``xi_bar`` is <a²>.
    """

    n_bar: float
    alpha_bar: complex
    xi_bar: complex

    def __post_init__(self):
        # Cauchy-Schwarz on the window: <a†a> >= |<a>|².
        if self.n_bar < abs(self.alpha_bar) ** 2 - ARITHMETIC_TOL:
            raise ValueError(
                f"inconsistent moments: n_bar={self.n_bar!r} < |alpha_bar|^2="
                f"{abs(self.alpha_bar) ** 2!r}"
            )


def mean_photon(state: FockDiagonalState) -> float:
    """<a†a> of a Fock-diagonal state."""
    return float(np.dot(state.photon_numbers, state.populations))


def moments(psi: PureFockWindowState) -> MomentTriple:
    """Compute (<a†a>, <a>, <a²>) for a pure window state."""
    c = psi.amplitudes
    n = psi.offset
    k = np.arange(c.size)
    n_bar = float(np.sum((n + k) * np.abs(c) ** 2))
    alpha = complex(np.sum(np.conj(c[:-1]) * c[1:] * np.sqrt(n + k[:-1] + 1)))
    if c.size >= 3:
        xi = complex(
            np.sum(
                np.conj(c[:-2])
                * c[2:]
                * np.sqrt((n + k[:-2] + 1) * (n + k[:-2] + 2.0))
            )
        )
    else:
        xi = 0.0 + 0.0j
    return MomentTriple(n_bar=n_bar, alpha_bar=alpha, xi_bar=xi)


def pure_nonclassicality(psi: PureFockWindowState) -> float:
    """Nonclassicality of a pure state: max quadrature variance minus 1/2.

    Evaluates <a†a> - |<a>|² + |<a²> - <a>²|, which equals the variance of
    the optimal quadrature minus the coherent-state value 1/2.  Zero for the
    vacuum, m for the Fock state |m>.
    """
    m = moments(psi)
    return m.n_bar - abs(m.alpha_bar) ** 2 + abs(m.xi_bar - m.alpha_bar**2)


def real_alpha(amplitudes: np.ndarray, offset: int) -> float:
    """<a> of a window state with nonnegative real amplitudes.

    This is the phase-aligned coherence sum x_{k+1} x_k sqrt(n+k+1); its
    square is the objective kernel of the decomposition linear program.
    """
    x = np.asarray(amplitudes, dtype=float)
    norm_sq = float(np.sum(x * x))
    if abs(norm_sq - 1.0) > ARITHMETIC_TOL:
        raise ValueError(f"amplitudes must have unit norm (got |x|^2={norm_sq!r})")
    if x.size == 1:
        return 0.0
    k = np.arange(x.size - 1)
    return float(np.sum(x[1:] * x[:-1] * np.sqrt(offset + k + 1.0)))


def rank2_nonclassicality(offset: int, p_upper: float) -> float:
    """Closed-form nonclassicality of p|n+1><n+1| + (1-p)|n><n|.

    The optimal decomposition mixes equal-weight superpositions that differ
    only by quartic-roots-of-unity phases, giving n + p - (n+1)p(1-p).
    """
    if not 0.0 <= p_upper <= 1.0:
        raise ValueError(f"p_upper must lie in [0, 1], got {p_upper}")
    n = offset
    return n + p_upper - (n + 1) * p_upper * (1.0 - p_upper)


def simple_bound(state: FockDiagonalState) -> float:
    """Upper bound from the single-point decomposition with amplitudes sqrt(p).

    Equals <a†a> - (sum_k sqrt(p_{n+k+1} p_{n+k} (n+k+1)))².  Exact for two
    neighboring populations, and saturated exactly by the simply-decomposed
    states of higher rank.
    """
    p = state.populations
    if p.size == 1:
        return mean_photon(state)
    n = state.offset
    k = np.arange(p.size - 1)
    cross = float(np.sum(np.sqrt(p[1:] * p[:-1] * (n + k + 1.0))))
    return mean_photon(state) - cross**2


def truncated_thermal(n_th: float, rank: int) -> FockDiagonalState:
    """Thermal state renormalized after projecting out photon numbers >= rank.

    Populations are geometric, p_k ∝ n_th^k / (1+n_th)^(k+1), renormalized by
    1 / (1 - (n_th/(1+n_th))^rank).
    """
    if n_th <= 0:
        raise ValueError(f"n_th must be positive, got {n_th}")
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    q = n_th / (1.0 + n_th)
    norm = 1.0 / (1.0 - q**rank)
    k = np.arange(rank)
    pops = norm * n_th**k / (1.0 + n_th) ** (k + 1.0)
    pops = pops / pops.sum()  # remove residual rounding so the sum is exactly 1
    return FockDiagonalState(0, pops)
