"""Renyi entropies of probability vectors, natural-log convention.

    S_q(p) = log(sum_i p_i^q) / (1 - q),   q >= 0, q != 1,

with the limits S_1 = -sum p log p (Shannon), S_0 = log |support|,
S_inf = -log max_i p_i. All logarithms are natural.

The q = 0 support count uses a relative threshold: entries below
``SUPPORT_RTOL * max(p)`` are treated as zero. Large finite q is evaluated
in a max-normalized form that stays finite well past q = 100.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["SUPPORT_RTOL", "renyi", "support_size", "INF"]

SUPPORT_RTOL = 1e-12
INF = math.inf

_PROB_SUM_ATOL = 1e-8
_PROB_NEG_ATOL = 1e-12


def _validated(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64).ravel()
    if p.size == 0:
        raise ValueError("empty probability vector")
    if np.any(p < -_PROB_NEG_ATOL):
        raise ValueError(f"negative probability {p.min()!r}")
    s = float(p.sum())
    if abs(s - 1.0) > _PROB_SUM_ATOL:
        raise ValueError(f"probabilities sum to {s!r}, expected 1")
    # Clip the numerical dust so powers and logs behave.
    return np.clip(p, 0.0, None)


def support_size(p, rtol: float = SUPPORT_RTOL) -> int:
    """Number of entries above ``rtol * max(p)``."""
    p = _validated(p)
    return int(np.count_nonzero(p > rtol * p.max()))


def renyi(p, q) -> float:
    """Renyi entropy of order ``q`` of the probability vector ``p``.

    ``q`` may be any real >= 0, or ``math.inf``. Exactly q == 1 selects the
    Shannon branch; no fuzzy matching is done, so pass 1 (or 1.0), not
    0.9999999.
    """
    p = _validated(p)
    q = float(q)
    if math.isnan(q) or q < 0:
        raise ValueError(f"Renyi order must be in [0, inf], got {q!r}")
    if q == 0.0:
        return math.log(support_size(p))
    if q == 1.0:
        nz = p[p > 0.0]
        return float(-(nz * np.log(nz)).sum())
    pmax = float(p.max())
    if math.isinf(q):
        return -math.log(pmax)
    # (q log pmax + log sum (p/pmax)^q) / (1-q); the ratio powers are <= 1
    # so nothing overflows even for q in the hundreds.
    ratios = p[p > 0.0] / pmax
    return (q * math.log(pmax) + math.log(float(np.power(ratios, q).sum()))) / (1.0 - q)
