"""Reference (pure numpy) walk kernel.

The kernel runs one restart of the greedy random-walk descent over local
unitaries. It is the contract both backends implement:

``walk(c0, dims, q_kind, q, steps, eps0, eps_min, decay, plateau, axes,
normals)``

* ``c0``: flat C-ordered complex copy of the starting tensor (already
  rotated by the restart's initial factors). Not modified.
* ``q_kind``: 0 = generic Renyi (uses ``q``), 1 = Shannon, 2 = -log max p.
* ``axes``: int64[steps], the mode perturbed at each proposal (0-based).
* ``normals``: float64, concatenated blocks of 2*d_k^2 standard normals
  per proposal (d_k the dimension of that proposal's mode), row-major
  (re, im) interleaving. Pre-generated by the caller so that a restart is
  reproducible from its stream regardless of backend or thread placement.

Proposal s builds X[i,j] = (normals[2(i d + j)] + i normals[2(i d + j)+1])
/ sqrt(2), the GUE step G = (X + X^H)/2 scaled to unit spectral norm, and
W = exp(i eps G); the proposal replaces mode k by W x_k C and is accepted
iff the objective strictly decreases. ``plateau`` consecutive rejections
shrink eps by ``decay``; the walk stops early once eps < eps_min (reported
as ``annealed``) or when the proposal budget runs out.

Returns ``(value, c_final, deltas, accepts, proposals_used, annealed)``
where ``deltas[k]`` is the product of accepted W's on mode k (newest on
the left), so c_final = (x)_k deltas[k] applied to c0.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["walk"]


def _objective(flat: np.ndarray, q_kind: int, q: float) -> float:
    p = flat.real**2 + flat.imag**2
    if q_kind == 2:
        return -math.log(float(p.max()))
    if q_kind == 1:
        nz = p[p > 0.0]
        return float(-(nz * np.log(nz)).sum())
    pmax = float(p.max())
    r = p / pmax
    return (q * math.log(pmax) + math.log(float(np.power(r, q).sum()))) / (1.0 - q)


def _step_unitary(block: np.ndarray, d: int, eps: float) -> np.ndarray:
    re = block[0::2].reshape(d, d)
    im = block[1::2].reshape(d, d)
    X = (re + 1j * im) / math.sqrt(2.0)
    G = (X + X.conj().T) / 2.0
    if d == 2:
        tbar = 0.5 * (G[0, 0].real + G[1, 1].real)
        delta = 0.5 * (G[0, 0].real - G[1, 1].real)
        b = G[0, 1]
        m = math.sqrt(delta * delta + (b.real * b.real + b.imag * b.imag))
        nrm = abs(tbar) + m
        if nrm < 1e-300:
            return np.eye(2, dtype=np.complex128)
        th = eps * tbar / nrm
        ph = complex(math.cos(th), math.sin(th))
        if m < 1e-300:
            return ph * np.eye(2, dtype=np.complex128)
        cm = math.cos(eps * m / nrm)
        sm = math.sin(eps * m / nrm) / m
        return ph * np.array(
            [
                [cm + 1j * sm * delta, 1j * sm * b],
                [1j * sm * b.conjugate(), cm - 1j * sm * delta],
            ],
            dtype=np.complex128,
        )
    w, V = np.linalg.eigh(G)
    nrm = max(abs(float(w[0])), abs(float(w[-1])))
    if nrm < 1e-300:
        return np.eye(d, dtype=np.complex128)
    return (V * np.exp(1j * (eps / nrm) * w)) @ V.conj().T


def walk(c0, dims, q_kind, q, steps, eps0, eps_min, decay, plateau, axes, normals):
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    steps = int(steps)
    axes = np.asarray(axes, dtype=np.int64)
    normals = np.asarray(normals, dtype=np.float64)
    flat = np.array(c0, dtype=np.complex128).ravel()
    if axes.shape[0] < steps:
        raise ValueError("axes shorter than steps")
    if math.prod(dims) != flat.shape[0]:
        raise ValueError("dims do not match the flat state length")
    if steps > 0 and (int(axes[:steps].min()) < 0 or int(axes[:steps].max()) >= n):
        raise ValueError("axis entry out of range")
    dper = np.asarray(dims, dtype=np.int64)[axes[:steps]] if steps else np.empty(0, np.int64)
    if int((2 * dper * dper).sum()) > normals.shape[0]:
        raise ValueError("normals buffer shorter than the walk needs")
    cur = flat.reshape(dims)
    cur_val = _objective(cur.ravel(), q_kind, q)
    deltas = [np.eye(d, dtype=np.complex128) for d in dims]
    eps = float(eps0)
    rejects = 0
    accepts = 0
    annealed = False
    off = 0
    used = 0
    for s in range(int(steps)):
        k = int(axes[s])
        d = dims[k]
        blk = normals[off : off + 2 * d * d]
        off += 2 * d * d
        used = s + 1
        W = _step_unitary(blk, d, eps)
        prop = np.moveaxis(np.tensordot(W, cur, axes=([1], [k])), 0, k)
        val = _objective(prop.ravel(), q_kind, q)
        if val < cur_val:
            cur = np.ascontiguousarray(prop)
            cur_val = val
            deltas[k] = W @ deltas[k]
            accepts += 1
            rejects = 0
        else:
            rejects += 1
            if rejects >= int(plateau):
                rejects = 0
                eps *= float(decay)
                if eps < float(eps_min):
                    annealed = True
                    break
    return cur_val, cur.ravel(), deltas, accepts, used, annealed
