"""Closed-form decomposition ansatzes for three- and four-level windows.

Population space splits into phases, each with its own optimal decomposition
family.  For three levels these are: the triplet (every atom carries
amplitudes sqrt(p), saturating the simple bound), and two pair phases where
the two upper or two lower levels stay proportional inside the atoms while
the remaining Fock state joins the ensemble on its own.  Four-level windows
add the four analogous single-Fock-state triplet phases and a pair phase
splitting the state into an inner (n+2, n+1) pair and an outer part.

Three-level values are believed exact; the four-level ones are close upper
bounds, and every four-level result is flagged accordingly: states slightly
beating the bounds are known to exist near the quartet/triplet-0 border.

The four-level fractions f0..f3 and the pair fraction are located
numerically by golden-section search on the invested-probability-weighted
coherence; each objective has the form (a*sqrt(1-f) + b*sqrt(f))², which is
unimodal on [0, 1].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .optimize import bisect_root, golden_section_max
from .states import FockDiagonalState, mean_photon, real_alpha

_TIE_TOL = 1e-12
_FEAS_TOL = 1e-12


class DegenerateStateError(ValueError):
    """The requested ansatz is undefined for this population pattern."""


class PhaseLabel(enum.Enum):
    TRIPLET = "Triplet"
    UPPER_PAIR = "UpperPair"
    LOWER_PAIR = "LowerPair"
    QUARTET = "Quartet"
    TRIPLET0 = "Triplet0"
    TRIPLET1 = "Triplet1"
    TRIPLET2 = "Triplet2"
    TRIPLET3 = "Triplet3"
    PAIR21 = "Pair21"


@dataclass(frozen=True)
class AnsatzResult:
    """Winning phase for a state: label, value and decomposition parameters.

    ``upper_bound_only`` is set for every four-level result; those values are
    close upper bounds rather than certified optima.
    """

    label: PhaseLabel
    value: float
    params: dict = field(default_factory=dict)
    feasible: bool = True
    upper_bound_only: bool = False


class PairAnsatz(NamedTuple):
    value: float
    fraction: float
    feasible: bool


class TripletAnsatz(NamedTuple):
    value: float
    fraction: float
    feasible: bool


class Pair21Ansatz(NamedTuple):
    value: float
    fraction: float
    split: float
    feasible: bool


def _check_rank(state: FockDiagonalState, rank: int) -> None:
    if state.rank != rank:
        raise ValueError(f"state must span exactly {rank} levels, got {state.rank}")


def _maximize_fraction(objective) -> float:
    """Maximizer of an invested-coherence objective over f in (0, 1).

    Golden-section alone localizes a flat maximum only to about sqrt(eps),
    which is not enough for the fraction contracts.  Every objective here is
    (a*sqrt(1-f) + b*sqrt(f))², so two well-separated samples of its square
    root pin (a, b) and hence the exact maximizer b²/(a²+b²); the fit is
    accepted only if it stays close to the search result and does not lower
    the objective, falling back to the search otherwise.
    """
    coarse = golden_section_max(objective, 0.0, 1.0, tol=1e-12)
    f1, f2 = 0.25, 0.75
    s1 = np.sqrt(max(objective(f1), 0.0))
    s2 = np.sqrt(max(objective(f2), 0.0))
    u1, v1 = np.sqrt(1.0 - f1), np.sqrt(f1)
    u2, v2 = np.sqrt(1.0 - f2), np.sqrt(f2)
    det = u1 * v2 - u2 * v1
    a = (s1 * v2 - s2 * v1) / det
    b = (u1 * s2 - u2 * s1) / det
    denom = a * a + b * b
    if denom <= 0.0:
        return coarse
    polished = min(max(b * b / denom, 1e-12), 1.0)
    if abs(polished - coarse) <= 1e-6 and objective(polished) >= objective(coarse) - 1e-12:
        return polished
    return coarse


# ---------------------------------------------------------------------------
# three-level window


def rank3_triplet(state: FockDiagonalState) -> float:
    """Value of the symmetric sqrt-population decomposition (= simple bound)."""
    _check_rank(state, 3)
    n = state.offset
    p0, p1, p2 = state.populations
    cross = np.sqrt(p2 * (n + 2.0)) + np.sqrt(p0 * (n + 1.0))
    return 2.0 * p2 + p1 + n - cross**2 * p1


def rank3_upper_pair(state: FockDiagonalState) -> PairAnsatz:
    """Pair the two upper levels; |n> enters the ensemble separately.

    The invested fraction f has the closed form
    (2+n) p2 / ((1+n) p1 + (3+2n) p2); the phase is feasible while the pair
    atoms' total probability (p1+p2)/f stays at most one.
    """
    _check_rank(state, 3)
    n = state.offset
    p0, p1, p2 = state.populations
    s = p1 + p2
    if s <= 0.0:
        raise DegenerateStateError("upper-pair ansatz needs p1 + p2 > 0")
    f = (2.0 + n) * p2 / ((1.0 + n) * p1 + (3.0 + 2.0 * n) * p2)
    if f <= 0.0:
        # p2 = 0: the pair carries no weight at any f, never a distinct phase.
        return PairAnsatz(value=float("inf"), fraction=0.0, feasible=False)
    x = np.array([np.sqrt(1.0 - f), np.sqrt(f * p1 / s), np.sqrt(f * p2 / s)])
    value = mean_photon(state) - s / f * real_alpha(x, n) ** 2
    return PairAnsatz(value=value, fraction=f, feasible=s <= f + _FEAS_TOL)


def rank3_lower_pair(state: FockDiagonalState) -> PairAnsatz:
    """Pair the two lower levels; |n+2> enters the ensemble separately."""
    _check_rank(state, 3)
    n = state.offset
    p0, p1, p2 = state.populations
    if p2 >= 1.0:
        raise DegenerateStateError("lower-pair ansatz needs p2 < 1")
    g = ((1.0 + n) * (-1.0 + p1 + p2)) / (
        -3.0 - 2.0 * n + (1.0 + n) * p1 + (3.0 + 2.0 * n) * p2
    )
    if g <= 0.0:
        return PairAnsatz(value=float("inf"), fraction=0.0, feasible=False)
    r = 1.0 - p2
    x = np.array([np.sqrt(g * p0 / r), np.sqrt(g * p1 / r), np.sqrt(1.0 - g)])
    value = mean_photon(state) - r / g * real_alpha(x, n) ** 2
    return PairAnsatz(value=value, fraction=g, feasible=r <= g + _FEAS_TOL)


def classify_rank3(state: FockDiagonalState) -> AnsatzResult:
    """Best feasible three-level ansatz; ties prefer the triplet."""
    _check_rank(state, 3)
    candidates: list[tuple[PhaseLabel, float, dict]] = [
        (PhaseLabel.TRIPLET, rank3_triplet(state), {})
    ]
    try:
        up = rank3_upper_pair(state)
        if up.feasible:
            candidates.append((PhaseLabel.UPPER_PAIR, up.value, {"f": up.fraction}))
    except DegenerateStateError:
        pass
    try:
        low = rank3_lower_pair(state)
        if low.feasible:
            candidates.append((PhaseLabel.LOWER_PAIR, low.value, {"g": low.fraction}))
    except DegenerateStateError:
        pass
    best = min(v for _, v, _ in candidates)
    for label, value, params in candidates:
        if value <= best + _TIE_TOL:
            return AnsatzResult(label=label, value=value, params=params)
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# four-level window


def rank4_quartet(state: FockDiagonalState) -> float:
    """Value of the symmetric sqrt-population decomposition (= simple bound)."""
    _check_rank(state, 4)
    n = state.offset
    p = state.populations
    k = np.arange(3)
    cross = float(np.sum(np.sqrt(p[1:] * p[:-1] * (n + k + 1.0))))
    return mean_photon(state) - cross**2


def _triplet_amplitudes(p, special, fraction):
    """Amplitude vector with level ``special`` at sqrt(1-f) and the rest
    carrying fraction f of their population ratios."""
    rest = 1.0 - p[special]
    x = np.sqrt(fraction * p / rest)
    x[special] = np.sqrt(1.0 - fraction)
    return x


def rank4_triplet(state: FockDiagonalState, k: int) -> TripletAnsatz:
    """Single out level n+k; the other three stay proportional in the atoms.

    The invested fraction maximizes the probability-weighted coherence
    (1-p_k)/f * <a>²(f); it is located numerically.  The phase is feasible
    while that fraction is at least 1 - p_k.
    """
    _check_rank(state, 4)
    if not 0 <= k <= 3:
        raise ValueError(f"k must be in 0..3, got {k}")
    n = state.offset
    p = state.populations
    if p[k] >= 1.0:
        raise DegenerateStateError(f"triplet-{k} ansatz needs p_(n+{k}) < 1")
    rest = 1.0 - p[k]

    def objective(f: float) -> float:
        x = _triplet_amplitudes(p, k, f)
        return rest / f * real_alpha(x, n) ** 2

    f_best = _maximize_fraction(objective)
    value = mean_photon(state) - objective(f_best)
    return TripletAnsatz(
        value=value, fraction=f_best, feasible=f_best >= rest - _FEAS_TOL
    )


def rank4_pair(state: FockDiagonalState) -> Pair21Ansatz:
    """Pair the middle levels n+2, n+1; split |n+3> and |n> across the rest.

    The split g = (3+n) p2 / ((1+n) p1 + (3+n) p2) and the invested fraction
    f depend only on the window offset and the middle populations.  Feasible
    while the pair atoms do not over-fill the total, top or bottom
    populations.
    """
    _check_rank(state, 4)
    n = state.offset
    p0, p1, p2, p3 = state.populations
    s = p1 + p2
    if s <= 0.0:
        raise DegenerateStateError("pair ansatz needs p1 + p2 > 0")
    g = (3.0 + n) * p2 / ((1.0 + n) * p1 + (3.0 + n) * p2)

    def amplitudes(f: float) -> np.ndarray:
        return np.array(
            [
                np.sqrt((1.0 - f) * (1.0 - g)),
                np.sqrt(f * p1 / s),
                np.sqrt(f * p2 / s),
                np.sqrt((1.0 - f) * g),
            ]
        )

    def objective(f: float) -> float:
        return s / f * real_alpha(amplitudes(f), n) ** 2

    f_best = _maximize_fraction(objective)
    value = mean_photon(state) - objective(f_best)
    leftover = (1.0 - f_best) / f_best * s
    feasible = (
        s <= f_best + _FEAS_TOL
        and leftover * g <= p3 + _FEAS_TOL
        and leftover * (1.0 - g) <= p0 + _FEAS_TOL
    )
    return Pair21Ansatz(value=value, fraction=f_best, split=g, feasible=feasible)


def classify_rank4(state: FockDiagonalState) -> AnsatzResult:
    """Best feasible four-level ansatz; ties prefer quartet, then triplets.

    Every result carries the upper-bound-only flag: the four-level phase map
    is approximate and slightly better decompositions exist for some states.
    """
    _check_rank(state, 4)
    candidates: list[tuple[PhaseLabel, float, dict]] = [
        (PhaseLabel.QUARTET, rank4_quartet(state), {})
    ]
    triplet_labels = (
        PhaseLabel.TRIPLET0,
        PhaseLabel.TRIPLET1,
        PhaseLabel.TRIPLET2,
        PhaseLabel.TRIPLET3,
    )
    for k in range(4):
        try:
            t = rank4_triplet(state, k)
        except DegenerateStateError:
            continue
        if t.feasible:
            candidates.append((triplet_labels[k], t.value, {f"f{k}": t.fraction}))
    try:
        pair = rank4_pair(state)
        if pair.feasible:
            candidates.append(
                (PhaseLabel.PAIR21, pair.value, {"f": pair.fraction, "g": pair.split})
            )
    except DegenerateStateError:
        pass
    best = min(v for _, v, _ in candidates)
    for label, value, params in candidates:
        if value <= best + _TIE_TOL:
            return AnsatzResult(
                label=label, value=value, params=params, upper_bound_only=True
            )
    raise AssertionError("unreachable")


def classify(state: FockDiagonalState) -> AnsatzResult:
    """Dispatch to the three- or four-level classifier."""
    if state.rank == 3:
        return classify_rank3(state)
    if state.rank == 4:
        return classify_rank4(state)
    raise ValueError(f"no ansatz catalogue for rank {state.rank}")


def pair_fraction_balance(offset: int, p_upper: float, p_lower: float) -> float:
    """Upper-pair fraction from its stationarity balance, solved numerically.

    The optimal fraction equates the weighted marginal coherence gains of the
    paired levels, (n+2) p2/(p2+p1) / f = (n+1) / (1-f); bisection on that
    balance must agree with the closed form used by :func:`rank3_upper_pair`.
    """
    s = p_upper + p_lower
    if s <= 0.0 or p_upper <= 0.0:
        raise DegenerateStateError("balance needs p_upper > 0")
    a = (offset + 2.0) * p_upper / s
    b = offset + 1.0

    def balance(f: float) -> float:
        return a * (1.0 - f) - b * f

    return bisect_root(balance, 0.0, 1.0, tol=1e-15)
