"""Named reference states used throughout the tests and studies.

Qubit basis labels are bit strings with the leftmost bit on party 1, so
|0110> on four qubits is the flat C-order index 6. Amplitudes quoted as
rounded decimals (the numerically-found maximal states) are renormalized
on construction; exact states are built from exact expressions.
"""

from __future__ import annotations

import cmath
import math
import re
from math import comb, sqrt
from typing import Callable

import numpy as np

from .tensor import StateTensor

__all__ = [
    "product",
    "ghz",
    "w_state",
    "a4",
    "a12",
    "dicke",
    "acin_state",
    "hd",
    "cluster",
    "l_state",
    "hs",
    "phi4",
    "phi1max",
    "phi2max",
    "psi1max",
    "named_state",
    "catalog_entries",
]

_W3 = cmath.exp(2j * math.pi / 3)  # primitive cube root of unity


def _qubits(n: int, amplitudes: dict[str, complex], *, normalize: bool = False) -> StateTensor:
    arr = np.zeros((2,) * n, dtype=np.complex128)
    for bits, amp in amplitudes.items():
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise ValueError(f"bad basis label {bits!r} for {n} qubits")
        arr[tuple(int(b) for b in bits)] = amp
    return StateTensor(arr, normalize=normalize)


def product(n: int = 3, d: int = 2) -> StateTensor:
    """|0...0> on n parties of local dimension d."""
    arr = np.zeros((d,) * n, dtype=np.complex128)
    arr[(0,) * n] = 1.0
    return StateTensor(arr)


def ghz(n: int = 3) -> StateTensor:
    """(|0...0> + |1...1>)/sqrt(2) on n qubits."""
    if n < 2:
        raise ValueError("GHZ needs at least 2 parties")
    r = 1 / sqrt(2)
    return _qubits(n, {"0" * n: r, "1" * n: r})


def w_state(n: int = 3) -> StateTensor:
    """Equal superposition of the single-excitation strings."""
    if n < 2:
        raise ValueError("W needs at least 2 parties")
    r = 1 / sqrt(n)
    amps = {"0" * i + "1" + "0" * (n - 1 - i): r for i in range(n)}
    return _qubits(n, amps)


def a4() -> StateTensor:
    """(|000> + |010> + |001> + |111>)/2: tensor rank 4 on three qubits."""
    return _qubits(3, {"000": 0.5, "010": 0.5, "001": 0.5, "111": 0.5})


def a12() -> StateTensor:
    """Four-qubit state of maximal tensor rank 12.

    All sixteen computational amplitudes equal 1/sqrt(12) except the four
    weight-3 strings, which vanish.
    """
    r = 1 / sqrt(12)
    amps = {}
    for idx in range(16):
        bits = format(idx, "04b")
        if bits.count("1") != 3:
            amps[bits] = r
    return _qubits(4, amps)


def dicke(n: int, k: int) -> StateTensor:
    """Dicke state D(n, k): uniform superposition of weight-k strings."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got D({n}, {k})")
    r = 1 / sqrt(comb(n, k))
    amps = {
        format(idx, f"0{n}b"): r
        for idx in range(2**n)
        if format(idx, f"0{n}b").count("1") == k
    }
    return _qubits(n, amps)


def acin_state(a, *, normalize: bool = False) -> StateTensor:
    """Three-qubit state in the five-term canonical form.

    The five amplitudes multiply |000>, |001>, |010>, |100>, |111>, in that
    order. Every three-qubit pure state is locally equivalent to one of
    these with a1..a4 >= 0 and a single phase on a5.
    """
    a = np.asarray(a, dtype=np.complex128).ravel()
    if a.shape != (5,):
        raise ValueError("expected 5 amplitudes")
    return _qubits(
        3,
        {"000": a[0], "001": a[1], "010": a[2], "100": a[3], "111": a[4]},
        normalize=normalize,
    )


def hd() -> StateTensor:
    """(|1000> + |0100> + |0010> + |0001> + sqrt(2)|1111>)/sqrt(6)."""
    r = 1 / sqrt(6)
    return _qubits(
        4,
        {"1000": r, "0100": r, "0010": r, "0001": r, "1111": sqrt(2) * r},
    )


def cluster(k: int) -> StateTensor:
    """The three four-qubit cluster states C1, C2, C3.

    C_k = (|0000> + |0,e_k> + |e_k',0> - |1111>)/2 with the middle strings
    as below; they differ by which pair of qubits carries the flip.
    """
    middles = {1: ("0011", "1100"), 2: ("0110", "1001"), 3: ("0101", "1010")}
    if k not in middles:
        raise ValueError("cluster index must be 1, 2 or 3")
    m1, m2 = middles[k]
    return _qubits(4, {"0000": 0.5, m1: 0.5, m2: 0.5, "1111": -0.5})


def l_state() -> StateTensor:
    """The four-qubit L state, w = exp(2 pi i / 3):

    (1/sqrt(12)) [ (1+w)(|0000>+|1111>) + (1-w)(|0011>+|1100>)
                   + w^2 (|0101>+|0110>+|1001>+|1010>) ]

    The w^2 group runs over all four weight-2 strings outside the (1-w)
    group; with any of them missing the squared norm is 11/12, so the
    complete group is forced by normalization.
    """
    r = 1 / sqrt(12)
    w = _W3
    amps = {
        "0000": (1 + w) * r,
        "1111": (1 + w) * r,
        "0011": (1 - w) * r,
        "1100": (1 - w) * r,
        "0101": w**2 * r,
        "0110": w**2 * r,
        "1001": w**2 * r,
        "1010": w**2 * r,
    }
    return _qubits(4, amps)


def hs() -> StateTensor:
    """The highly entangled four-qubit HS state, w = exp(2 pi i / 3):

    (1/sqrt(6)) [ |0011> + |1100> + w(|0101> + |1010>) + w^2(|0110> + |1001>) ]

    (The prefactor must be 1/sqrt(6) for unit norm.)
    """
    r = 1 / sqrt(6)
    w = _W3
    return _qubits(
        4,
        {
            "0011": r,
            "1100": r,
            "0101": w * r,
            "1010": w * r,
            "0110": w**2 * r,
            "1001": w**2 * r,
        },
    )


def phi4() -> StateTensor:
    """sqrt(1/3) D(4,0) + sqrt(2/3) D(4,3): maximizes the product-overlap
    geometric measure among symmetric four-qubit states."""
    c0 = sqrt(1 / 3)
    c3 = sqrt(2 / 3) / 2  # sqrt(2/3) spread over the four weight-3 strings
    return _qubits(
        4, {"0000": c0, "1110": c3, "1101": c3, "1011": c3, "0111": c3}
    )


def _phase(turns: float) -> complex:
    """exp(i pi turns); the maximal states quote phases in units of pi."""
    return cmath.exp(1j * math.pi * turns)


def phi1max() -> StateTensor:
    """Numerically found maximizer of the q=1 RIU entropy on three qubits."""
    return acin_state(
        [0.27, 0.363, 0.326, 0.377, 0.740 * _phase(-0.79)], normalize=True
    )


def phi2max() -> StateTensor:
    """Numerically found maximizer of the q=2 RIU entropy on three qubits."""
    return acin_state(
        [0.438, 0.316, 0.371, 0.29, 0.698 * _phase(-0.826)], normalize=True
    )


def psi1max() -> StateTensor:
    """Numerically found maximizer of the q=1 RIU entropy on four qubits."""
    amps = {
        "0000": 0.630,
        "1100": 0.281,
        "1010": 0.202,
        "0110": 0.24,
        "1110": 0.232 * _phase(0.494),
        "1001": 0.059,
        "0101": 0.282,
        "1101": 0.346 * _phase(-0.362),
        "0011": 0.304,
        "1011": 0.218 * _phase(0.626),
        "0111": 0.054 * _phase(-0.725),
        "1111": 0.164 * _phase(0.372),
    }
    return _qubits(4, amps, normalize=True)


# ---------------------------------------------------------------------------
# Name lookup

_BUILDERS: dict[str, tuple[Callable[[], StateTensor], tuple, str]] = {
    "product": (lambda: product(3), (2, 2, 2), "|000>"),
    "product4": (lambda: product(4), (2, 2, 2, 2), "|0000>"),
    "GHZ": (lambda: ghz(3), (2, 2, 2), "(|000>+|111>)/sqrt(2)"),
    "W": (lambda: w_state(3), (2, 2, 2), "(|001>+|010>+|100>)/sqrt(3)"),
    "A4": (a4, (2, 2, 2), "rank-4 three-qubit state"),
    "GHZ4": (lambda: ghz(4), (2, 2, 2, 2), "(|0000>+|1111>)/sqrt(2)"),
    "A12": (a12, (2, 2, 2, 2), "rank-12 four-qubit state"),
    "HD": (hd, (2, 2, 2, 2), "hyperdeterminant maximizer"),
    "C1": (lambda: cluster(1), (2, 2, 2, 2), "cluster state, pairing 00|11"),
    "C2": (lambda: cluster(2), (2, 2, 2, 2), "cluster state, pairing 01|10"),
    "C3": (lambda: cluster(3), (2, 2, 2, 2), "cluster state, pairing 01|01"),
    "L": (l_state, (2, 2, 2, 2), "L state (cube-root phases)"),
    "HS": (hs, (2, 2, 2, 2), "HS state (cube-root phases)"),
    "Phi4": (phi4, (2, 2, 2, 2), "sqrt(1/3) D(4,0) + sqrt(2/3) D(4,3)"),
    "Phi1max": (phi1max, (2, 2, 2), "maximal q=1 RIU entropy, 3 qubits"),
    "Phi2max": (phi2max, (2, 2, 2), "maximal q=2 RIU entropy, 3 qubits"),
    "Psi1max": (psi1max, (2, 2, 2, 2), "maximal q=1 RIU entropy, 4 qubits"),
}

_ALIASES = {"ghz3": "GHZ", "w3": "W"}

_DICKE_RE = re.compile(r"^d\((\d+),\s*(\d+)\)$")


def named_state(name: str) -> StateTensor:
    """Look up a catalog state by name (case-insensitive).

    Dicke states are addressed as ``D(n,k)``, e.g. ``D(4,2)``. Raises
    KeyError for unknown names.
    """
    key = str(name).strip()
    low = key.lower()
    m = _DICKE_RE.match(low)
    if m:
        return dicke(int(m.group(1)), int(m.group(2)))
    low = _ALIASES.get(low, low)
    for canon, (builder, _, _) in _BUILDERS.items():
        if canon.lower() == low:
            return builder()
    raise KeyError(f"unknown state name {name!r}; see catalog_entries()")


def catalog_entries() -> list[dict]:
    """Rows for the CLI catalog listing: name, dims, description."""
    rows = [
        {"name": name, "dims": list(dims), "description": desc}
        for name, (_, dims, desc) in _BUILDERS.items()
    ]
    rows.append(
        {
            "name": "D(n,k)",
            "dims": ["2 x n"],
            "description": "Dicke family, e.g. D(4,2)",
        }
    )
    return rows
