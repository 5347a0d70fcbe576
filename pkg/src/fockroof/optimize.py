"""Scalar maximization and root bracketing used by the phase ansatzes."""

from __future__ import annotations

import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section_max(fn, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Argmax of a unimodal function on [lo, hi] to within tol.

    Interior probes only, so fn never needs to be defined at the endpoints.
    """
    if hi <= lo:
        raise ValueError("need lo < hi")
    width = hi - lo
    if width <= tol:
        return (lo + hi) / 2.0
    c = lo + _INVPHI_SQ * width
    d = lo + _INVPHI * width
    fc, fd = fn(c), fn(d)
    n_steps = int(math.ceil(math.log(tol / width) / math.log(_INVPHI)))
    for _ in range(n_steps):
        if fc > fd:
            hi, d, fd = d, c, fc
            width *= _INVPHI
            c = lo + _INVPHI_SQ * width
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            width *= _INVPHI
            d = lo + _INVPHI * width
            fd = fn(d)
    return (lo + hi) / 2.0


def bisect_root(fn, lo: float, hi: float, tol: float = 1e-14) -> float:
    """Root of fn on a sign-changing bracket [lo, hi]."""
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("fn must change sign on [lo, hi]")
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return (lo + hi) / 2.0
