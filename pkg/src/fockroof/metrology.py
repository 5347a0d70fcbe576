"""Quadrature-sensing power of Fock-diagonal states.

The quantum Fisher information of quadrature sensing lower-bounds the
convex-roof nonclassicality: W = max(F - 1/2, 0) where F is the QFI of the
optimal quadrature, in the convention that drops the usual factor of four so
that coherent states sit exactly at F = 1/2.  For a Fock-diagonal state the
quadrature couples only neighboring photon numbers and every quadrature
angle is equivalent, which collapses the QFI to a sum over adjacent
population pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .states import FockDiagonalState


@dataclass(frozen=True)
class QfiReport:
    """Optimal-quadrature Fisher information and the sensing power above
    the coherent-state baseline."""

    fisher: float
    power: float

    def __post_init__(self):
        if self.fisher < 0.0:
            raise ValueError(f"fisher must be nonnegative, got {self.fisher}")
        if self.power < 0.0:
            raise ValueError(f"power must be nonnegative, got {self.power}")


def quadrature_qfi(state: FockDiagonalState) -> QfiReport:
    """Fisher information of the (any) quadrature and the metrological power.

    F = sum over adjacent photon pairs (m, m+1) of
    (p_{m+1} - p_m)² / (p_{m+1} + p_m) * (m+1)/2, with populations outside
    the window zero and empty pairs dropped.  The quadrature matrix element
    between |m> and |m+1> has squared magnitude (m+1)/2, and phase symmetry
    of the state makes the angle irrelevant.
    """
    n = state.offset
    pops = state.populations
    m_top = n + state.rank  # first photon number above the window

    def pop(m: int) -> float:
        if n <= m < n + state.rank:
            return float(pops[m - n])
        return 0.0

    fisher = 0.0
    for m in range(max(n - 1, 0), m_top):
        lo, hi = pop(m), pop(m + 1)
        tot = lo + hi
        if tot <= 0.0:
            continue
        fisher += (hi - lo) ** 2 / tot * (m + 1) / 2.0
    return QfiReport(fisher=fisher, power=max(fisher - 0.5, 0.0))
