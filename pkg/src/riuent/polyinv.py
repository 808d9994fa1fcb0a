"""Polynomial entanglement invariants for small qubit systems.

Three qubits: the degree-4 invariant Det3 (Cayley hyperdeterminant of the
2x2x2 coefficient array) and the tangle tau = 4 |Det3|. Sign convention:

    Det3(C) = c000^2 c111^2 + c001^2 c110^2 + c010^2 c101^2 + c100^2 c011^2
              - 2 (c000 c001 c110 c111 + c000 c010 c101 c111
                   + c000 c100 c011 c111 + c001 c010 c101 c110
                   + c001 c100 c011 c110 + c010 c100 c011 c101)
              + 4 (c000 c011 c101 c110 + c001 c010 c100 c111)

so Det3(GHZ) = +1/4 and tau(GHZ) = 1. The equivalent index-contraction
form (two epsilon contractions per pair of parties) evaluates to -2 times
this; :func:`det3_levicivita` keeps that literal sum as a slow reference.

Four qubits: the degree-24 hyperdeterminant Det4 via Schlaefli's
construction. Slicing along the last axis gives a pencil of 2x2x2 arrays;
q(x) = Det3(S0 + x S1) is a quartic in x and

    Det4(C) = disc(q) / 64

where disc is the classical binary-quartic discriminant (the polynomial
with leading term 256 a^3 e^3, written division-free so degenerate
pencils with a = 0 need no special handling). The 1/64 makes the
normalized maximizer HD reach |Det4| = 2^-6 3^-9 exactly, which is the
global maximum over unit-norm states; the rescaled

    T(C) = 2^6 3^9 |Det4(C)|

then lands in [0, 1] with T(HD) = 1.

All invariants are plain polynomials in the coefficients, so they need no
normalization to evaluate; tangle() and hyper_t() do require unit norm
because their [0, 1] calibration assumes it. Batch variants evaluate on a
leading sample axis and are what the ensemble studies call.
"""

from __future__ import annotations

import math

import numpy as np

from .tensor import NORM_ATOL, NormalizationError, as_array

__all__ = [
    "det3",
    "det3_batch",
    "det3_levicivita",
    "tangle",
    "tangle_batch",
    "concurrence2",
    "tangle_via_concurrence",
    "det4",
    "det4_batch",
    "hyper_t",
    "hyper_t_batch",
    "T_SCALE",
    "DET4_CLAMP",
]

T_SCALE = 2**6 * 3**9  # 1259712
DET4_CLAMP = 1e-14


def _cube(C) -> np.ndarray:
    arr = as_array(C)
    if arr.shape[-3:] != (2, 2, 2) or arr.ndim not in (3, 4):
        raise ValueError(f"expected shape (..., 2, 2, 2), got {arr.shape}")
    return arr.reshape(arr.shape[:-3] + (8,))


def det3_batch(C) -> np.ndarray:
    """Det3 over a leading batch axis; input shape (N, 2, 2, 2)."""
    c = _cube(C)
    if c.ndim == 1:
        c = c[None, :]
    c0, c1, c2, c3, c4, c5, c6, c7 = (c[:, i] for i in range(8))
    return (
        c0 * c0 * c7 * c7
        + c1 * c1 * c6 * c6
        + c2 * c2 * c5 * c5
        + c4 * c4 * c3 * c3
        - 2.0
        * (
            c0 * c1 * c6 * c7
            + c0 * c2 * c5 * c7
            + c0 * c4 * c3 * c7
            + c1 * c2 * c5 * c6
            + c1 * c4 * c3 * c6
            + c2 * c4 * c3 * c5
        )
        + 4.0 * (c0 * c3 * c5 * c6 + c1 * c2 * c4 * c7)
    )


def det3(C) -> complex:
    """Cayley's 2x2x2 hyperdeterminant, sign convention Det3(GHZ) = 1/4."""
    arr = as_array(C)
    if arr.shape != (2, 2, 2):
        raise ValueError(f"det3 needs a 2x2x2 array, got shape {arr.shape}")
    return complex(det3_batch(arr[None])[0])


_EPS2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def det3_levicivita(C) -> complex:
    """Literal epsilon-contraction form of the 2x2x2 hyperdeterminant.

    Slow (loops over all 4096 index assignments); kept as an oracle for
    the closed form. Equals -2 * det3(C).
    """
    c = as_array(C)
    if c.shape != (2, 2, 2):
        raise ValueError("expected a 2x2x2 array")
    total = 0.0 + 0.0j
    rng = (0, 1)
    for i1 in rng:
        for j1 in rng:
            for i2 in rng:
                for j2 in rng:
                    for k1 in rng:
                        for l1 in rng:
                            for k2 in rng:
                                for l2 in rng:
                                    w = (
                                        _EPS2[i1, j1]
                                        * _EPS2[i2, j2]
                                        * _EPS2[k1, l1]
                                        * _EPS2[k2, l2]
                                    )
                                    if w == 0.0:
                                        continue
                                    for i3 in rng:
                                        for k3 in rng:
                                            for j3 in rng:
                                                for l3 in rng:
                                                    ww = w * _EPS2[i3, k3] * _EPS2[j3, l3]
                                                    if ww == 0.0:
                                                        continue
                                                    total += (
                                                        ww
                                                        * c[i1, i2, i3]
                                                        * c[j1, j2, j3]
                                                        * c[k1, k2, k3]
                                                        * c[l1, l2, l3]
                                                    )
    return complex(total)


def _require_unit(arr: np.ndarray, what: str) -> None:
    nrm = float(np.linalg.norm(arr.ravel()))
    if abs(nrm - 1.0) > NORM_ATOL:
        raise NormalizationError(f"{what} requires a unit-norm state, got norm {nrm!r}")


def tangle(C) -> float:
    """Three-tangle tau = 4 |Det3| of a normalized three-qubit state."""
    arr = as_array(C)
    if arr.shape != (2, 2, 2):
        raise ValueError(f"tangle needs a 2x2x2 state, got shape {arr.shape}")
    _require_unit(arr, "tangle")
    return 4.0 * abs(det3(arr))


def tangle_batch(C) -> np.ndarray:
    return 4.0 * np.abs(det3_batch(C))


def concurrence2(rho) -> float:
    """Two-qubit mixed-state concurrence (spin-flip construction).

    C(rho) = max(0, mu1 - mu2 - mu3 - mu4) with mu_i the decreasing square
    roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise ValueError("concurrence2 expects a 4x4 density matrix")
    sy2 = np.array(
        [
            [0, 0, 0, -1],
            [0, 0, 1, 0],
            [0, 1, 0, 0],
            [-1, 0, 0, 0],
        ],
        dtype=np.complex128,
    )  # sigma_y (x) sigma_y
    rho_t = sy2 @ rho.conj() @ sy2
    # Spectrum of rho rho_t via the Hermitian form sqrt(rho) rho_t sqrt(rho);
    # same eigenvalues, but eigvalsh is accurate where eigvals is not.
    w, V = np.linalg.eigh(rho)
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    ev = np.linalg.eigvalsh(root @ rho_t @ root)
    mu = np.sqrt(np.clip(ev, 0.0, None))
    return float(max(0.0, mu[-1] - mu[-2] - mu[-3] - mu[-4]))


def _concurrence_sq_rank2(rho: np.ndarray) -> float:
    """C^2 for a two-qubit state of rank <= 2 (reduction of a pure tripartite
    state), via symmetric functions of M = rho rho_tilde.

    M then has two nonzero eigenvalues mu1^2 >= mu2^2, so
    C^2 = (mu1 - mu2)^2 = tr M - 2 sqrt(e2(M)), with e2 the second
    elementary symmetric function ((tr M)^2 - tr M^2)/2. No
    eigendecomposition, so no sqrt-of-noise blowup at the zero modes.
    """
    sy2 = np.array(
        [
            [0, 0, 0, -1],
            [0, 0, 1, 0],
            [0, 1, 0, 0],
            [-1, 0, 0, 0],
        ],
        dtype=np.complex128,
    )
    M = rho @ sy2 @ rho.conj() @ sy2
    tr = float(np.trace(M).real)
    tr2 = float(np.trace(M @ M).real)
    e2 = max(0.0, 0.5 * (tr * tr - tr2))
    return max(0.0, tr - 2.0 * math.sqrt(e2))


def tangle_via_concurrence(C) -> float:
    """Residual-entanglement route to the tangle:

    tau = C_{1|23}^2 - C_{12}^2 - C_{13}^2

    with C_{1|23} = 2 sqrt(det rho_1). Agrees with 4|Det3| on pure states;
    kept as an independent cross-check of the polynomial route.
    """
    arr = as_array(C)
    if arr.shape != (2, 2, 2):
        raise ValueError("expected a 2x2x2 state")
    _require_unit(arr, "tangle_via_concurrence")
    rho1 = np.einsum("ijk,ljk->il", arr, arr.conj())
    c1_23_sq = 4.0 * float(np.linalg.det(rho1).real)
    rho12 = np.einsum("ijk,lmk->ijlm", arr, arr.conj()).reshape(4, 4)
    rho13 = np.einsum("ijk,ljm->iklm", arr, arr.conj()).reshape(4, 4)
    return c1_23_sq - _concurrence_sq_rank2(rho12) - _concurrence_sq_rank2(rho13)


# ---------------------------------------------------------------------------
# Four qubits


def _quartic_disc(a, b, c, d, e):
    """Discriminant of a x^4 + b x^3 + c x^2 + d x + e (division-free)."""
    return (
        256 * a**3 * e**3
        - 192 * a**2 * b * d * e**2
        - 128 * a**2 * c**2 * e**2
        + 144 * a**2 * c * d**2 * e
        - 27 * a**2 * d**4
        + 144 * a * b**2 * c * e**2
        - 6 * a * b**2 * d**2 * e
        - 80 * a * b * c**2 * d * e
        + 18 * a * b * c * d**3
        + 16 * a * c**4 * e
        - 4 * a * c**3 * d**2
        - 27 * b**4 * e**2
        + 18 * b**3 * c * d * e
        - 4 * b**3 * d**3
        - 4 * b**2 * c**3 * e
        + b**2 * c**2 * d**2
    )


def det4_batch(C) -> np.ndarray:
    """Det4 over a leading batch axis; input shape (N, 2, 2, 2, 2)."""
    arr = as_array(C)
    if arr.ndim == 4:
        arr = arr[None]
    if arr.ndim != 5 or arr.shape[-4:] != (2, 2, 2, 2):
        raise ValueError(f"expected shape (N, 2, 2, 2, 2), got {arr.shape}")
    s0 = arr[..., 0]
    s1 = arr[..., 1]
    # Quartic coefficients from five exact evaluation nodes 0, +-1, +-2.
    q0 = det3_batch(s0)
    qp1 = det3_batch(s0 + s1)
    qm1 = det3_batch(s0 - s1)
    qp2 = det3_batch(s0 + 2.0 * s1)
    qm2 = det3_batch(s0 - 2.0 * s1)
    e = q0
    even1 = 0.5 * (qp1 + qm1)
    even2 = 0.5 * (qp2 + qm2)
    odd1 = 0.5 * (qp1 - qm1)
    odd2 = 0.5 * (qp2 - qm2)
    a = (even2 - 4.0 * even1 + 3.0 * e) / 12.0
    c = even1 - e - a
    b = (odd2 - 2.0 * odd1) / 6.0
    d = odd1 - b
    return _quartic_disc(a, b, c, d, e) / 64.0


def det4(C) -> complex:
    """2x2x2x2 hyperdeterminant, normalized so max_{|C|=1} |Det4| = 2^-6 3^-9."""
    arr = as_array(C)
    if arr.shape != (2, 2, 2, 2):
        raise ValueError(f"det4 needs a 2x2x2x2 array, got shape {arr.shape}")
    return complex(det4_batch(arr[None])[0])


def hyper_t(C) -> float:
    """T = 2^6 3^9 |Det4| of a normalized four-qubit state, in [0, 1].

    |Det4| below DET4_CLAMP is reported as exactly 0: the invariant
    vanishes identically on a measure-zero variety that several catalog
    states sit on, and the clamp keeps them there through float noise.
    """
    arr = as_array(C)
    if arr.shape != (2, 2, 2, 2):
        raise ValueError(f"hyper_t needs a 2x2x2x2 state, got shape {arr.shape}")
    _require_unit(arr, "hyper_t")
    mag = abs(det4(arr))
    if mag < DET4_CLAMP:
        return 0.0
    return T_SCALE * mag


def hyper_t_batch(C) -> np.ndarray:
    mag = np.abs(det4_batch(C))
    mag[mag < DET4_CLAMP] = 0.0
    return T_SCALE * mag
