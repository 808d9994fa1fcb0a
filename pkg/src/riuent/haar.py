"""Random states, Haar unitaries, and the deterministic stream layout.

Reproducibility model
---------------------
Every stochastic entry point takes an :class:`RngStream`, a named handle
``(seed, stream, subkey...)`` mapped to an independent PCG64 generator via
``numpy.random.SeedSequence(entropy=seed, spawn_key=(stream, *subkey))``.
Distinct spawn keys give statistically independent streams without any
coordination, so trial i of a Monte Carlo run always draws from
``RngStream(seed, stream=i)`` no matter how many threads execute it or in
which order. Identical (seed, stream, key) means identical draws, always.

Matrix conventions
------------------
* ``ginibre``: i.i.d. standard complex Gaussian entries,
  (N(0,1) + i N(0,1)) / sqrt(2), row-major draw order.
* ``haar_unitary``: QR of a Ginibre matrix with the phases of R's diagonal
  absorbed into Q, which makes the distribution exactly Haar.
* ``haar_state``: i.i.d. complex Gaussian coefficient tensor, normalized.
  Equivalent to one column of a Haar unitary on the full Hilbert space.
* ``perturb_unitary``: right-multiplies by exp(i * eps * G) where G is a
  GUE sample scaled to unit spectral norm, so eps is the exact rotation
  angle of the fastest-moving eigenphase.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .tensor import StateTensor

__all__ = [
    "RngStream",
    "as_stream",
    "ginibre",
    "haar_unitary",
    "haar_state",
    "gue",
    "expi_hermitian",
    "perturb_unitary",
    "u_p",
]


class RngStream:
    """Deterministic RNG handle: a seed plus a hierarchical stream key.

    The generator is created lazily and cached; a stream is meant to be
    consumed by exactly one logical task. Use :meth:`substream` to derive
    children (e.g. one per restart, then one per phase of the restart).
    """

    __slots__ = ("seed", "stream", "key", "_gen")

    def __init__(self, seed: int, stream: int = 0, key: tuple = ()):
        self.seed = int(seed)
        self.stream = int(stream)
        self.key = tuple(int(k) for k in key)
        self._gen = None

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(
                entropy=self.seed, spawn_key=(self.stream, *self.key)
            )
            self._gen = np.random.Generator(np.random.PCG64(ss))
        return self._gen

    def substream(self, *ids: int) -> "RngStream":
        """A fresh independent stream keyed below this one."""
        return RngStream(self.seed, self.stream, self.key + tuple(ids))

    def __repr__(self) -> str:
        tail = f", key={self.key}" if self.key else ""
        return f"RngStream(seed={self.seed}, stream={self.stream}{tail})"


def as_stream(rng) -> RngStream:
    """Coerce None (seed 0), an int seed, or an RngStream."""
    if rng is None:
        return RngStream(0)
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    raise TypeError(f"expected RngStream, int seed or None, got {type(rng).__name__}")


def ginibre(d: int, rng, m: int | None = None) -> np.ndarray:
    """d x m (default square) matrix of i.i.d. standard complex Gaussians."""
    g = as_stream(rng).generator
    m = d if m is None else m
    z = g.standard_normal((d, m)) + 1j * g.standard_normal((d, m))
    return z / math.sqrt(2.0)


def haar_unitary(d: int, rng) -> np.ndarray:
    """A d x d unitary drawn from the Haar measure on U(d)."""
    if d < 1:
        raise ValueError("dimension must be positive")
    z = ginibre(d, rng)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r).copy()
    ph /= np.abs(ph)
    return q * ph  # scale column j by phase(r_jj)


def haar_state(dims, rng) -> StateTensor:
    """Uniform (Fubini-Study) random pure state on the given local dims."""
    dims = tuple(int(d) for d in dims)
    g = as_stream(rng).generator
    size = int(np.prod(dims, dtype=np.int64))
    z = g.standard_normal(size) + 1j * g.standard_normal(size)
    return StateTensor(z.reshape(dims), normalize=True)


def gue(d: int, rng) -> np.ndarray:
    """GUE sample (X + X^dagger)/2 from a Ginibre X, unnormalized."""
    x = ginibre(d, rng)
    return (x + x.conj().T) / 2.0


def expi_hermitian(G, t: float) -> np.ndarray:
    """exp(i t G) for Hermitian G. Closed form for 2x2, eigh otherwise."""
    G = np.asarray(G, dtype=np.complex128)
    d = G.shape[0]
    if G.shape != (d, d):
        raise ValueError("G must be square")
    if d == 2:
        tr2 = 0.5 * (G[0, 0].real + G[1, 1].real)
        delta = 0.5 * (G[0, 0].real - G[1, 1].real)
        b = G[0, 1]
        m = math.sqrt(delta * delta + (b * b.conjugate()).real)
        phase = cmath.exp(1j * t * tr2)
        if m < 1e-300:
            return np.array([[phase, 0.0], [0.0, phase]], dtype=np.complex128)
        c, s = math.cos(t * m), math.sin(t * m) / m
        return phase * np.array(
            [
                [c + 1j * s * delta, 1j * s * b],
                [1j * s * b.conjugate(), c - 1j * s * delta],
            ],
            dtype=np.complex128,
        )
    w, V = np.linalg.eigh(G)
    return (V * np.exp(1j * t * w)) @ V.conj().T


def perturb_unitary(U, eps: float, rng) -> np.ndarray:
    """Random rotation of a unitary: U @ exp(i eps G), G a unit-norm GUE draw.

    G is scaled by its spectral norm, so eps bounds the eigenphase change.
    """
    U = np.asarray(U, dtype=np.complex128)
    G = gue(U.shape[0], rng)
    nrm = float(np.abs(np.linalg.eigvalsh(G)).max())
    if nrm < 1e-300:
        return U.copy()
    return U @ expi_hermitian(G / nrm, eps)


def u_p(p: float) -> np.ndarray:
    """One-parameter rotation [[sqrt(p), sqrt(1-p)], [-sqrt(1-p), sqrt(p)]].

    Real orthogonal for p in [0, 1]; u_p(1) is the identity.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    c = math.sqrt(p)
    s = math.sqrt(1.0 - p)
    return np.array([[c, s], [-s, c]], dtype=np.complex128)
