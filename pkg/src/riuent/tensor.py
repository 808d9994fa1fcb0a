"""Dense complex tensors for multipartite pure states.

Conventions used across the package:

* A state on ``n`` parties with local dimensions ``dims = (d_1, ..., d_n)``
  is a dense ``numpy.complex128`` array of that shape, C-ordered, so the
  flat coefficient vector enumerates multi-indices with the *last* index
  varying fastest.
* Mode (axis) arguments ``k`` in the public API are 1-based, ``k = 1..n``,
  matching the usual tensor-decomposition literature. Array element access
  stays plain 0-based numpy.
* The mode-``k`` unfolding maps ``C`` to a ``d_k x (prod of the others)``
  matrix whose column index runs over the remaining axes in their original
  order with the *first* remaining axis varying fastest:

      unfold(C, k)[i_k, j],   j = sum_{l != k} i_l * stride_l,
      stride of the first remaining axis = 1.

  ``fold`` is its exact inverse; ``fold(unfold(C, k), k, dims)`` returns the
  original coefficients bit for bit.
* State tensors are unit-normalized in the Frobenius norm. The constructor
  enforces this within ``NORM_ATOL`` unless asked to rescale.

JSON interchange format (``save_state`` / ``load_state``)::

    {"dims": [2, 2, 2], "coeffs": [[re, im], [re, im], ...]}

with coefficients in C order (last index fastest). Floats are written with
Python's shortest round-trip repr, so a save/load cycle is bit-exact.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "NORM_ATOL",
    "NormalizationError",
    "StateFormatError",
    "StateTensor",
    "as_array",
    "unfold",
    "fold",
    "kmode_product",
    "prob_vector",
    "inner",
    "reduced_density",
    "to_json_dict",
    "from_json_dict",
    "save_state",
    "load_state",
]

NORM_ATOL = 1e-10


class NormalizationError(ValueError):
    """Raised when a tensor that must be unit-normalized is not."""


class StateFormatError(ValueError):
    """Raised for malformed state files or coefficient payloads."""


def as_array(C) -> np.ndarray:
    """Coerce a StateTensor or array-like to a complex128 ndarray."""
    if isinstance(C, StateTensor):
        return C.array
    return np.asarray(C, dtype=np.complex128)


class StateTensor:
    """A unit-normalized pure-state coefficient tensor.

    Parameters
    ----------
    array : array-like
        Coefficients. Reshaped to ``dims`` if given, assumed already
        shaped otherwise.
    dims : sequence of int, optional
        Local dimensions. Singleton axes are legal but pointless.
    normalize : bool
        Rescale to unit norm instead of checking it. Useful for catalog
        states specified with rounded decimal amplitudes.

    Raises
    ------
    NormalizationError
        If the coefficients are not unit-normalized within ``NORM_ATOL``
        (and ``normalize`` is False), or the tensor is identically zero.
    """

    __slots__ = ("array", "dims")

    def __init__(self, array, dims: Sequence[int] | None = None, *, normalize: bool = False):
        arr = np.asarray(array, dtype=np.complex128)
        if dims is not None:
            dims = tuple(int(d) for d in dims)
            if any(d < 1 for d in dims):
                raise ValueError(f"local dimensions must be positive, got {dims}")
            try:
                arr = arr.reshape(dims)
            except ValueError as exc:
                raise ValueError(
                    f"coefficient count {arr.size} does not match dims {dims}"
                ) from exc
        elif arr.ndim == 0:
            raise ValueError("a state tensor needs at least one axis")
        arr = np.ascontiguousarray(arr)
        nrm = float(np.linalg.norm(arr.ravel()))
        if normalize:
            if nrm < 1e-300:
                raise NormalizationError("cannot normalize the zero tensor")
            arr = arr / nrm
        elif abs(nrm - 1.0) > NORM_ATOL:
            raise NormalizationError(
                f"state tensor has norm {nrm!r}, expected 1 within {NORM_ATOL}"
            )
        arr.flags.writeable = False
        self.array = arr
        self.dims = arr.shape

    @property
    def n(self) -> int:
        """Number of parties."""
        return self.array.ndim

    @property
    def size(self) -> int:
        return self.array.size

    def __getitem__(self, idx):
        return self.array[idx]

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateTensor):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.array, other.array)

    def __hash__(self):
        return hash((self.dims, self.array.tobytes()))

    def __repr__(self) -> str:
        return f"StateTensor(dims={self.dims})"

    def norm(self) -> float:
        return float(np.linalg.norm(self.array.ravel()))

    def probs(self) -> np.ndarray:
        """Squared moduli of the coefficients, flattened in C order."""
        return prob_vector(self)

    def overlap(self, other) -> complex:
        """Hilbert-space inner product <self|other>."""
        return inner(self, other)


def _check_axis(k: int, ndim: int) -> int:
    """Validate a 1-based axis argument, return it 0-based."""
    if not isinstance(k, (int, np.integer)):
        raise TypeError(f"axis must be an integer, got {type(k).__name__}")
    if not 1 <= k <= ndim:
        raise ValueError(f"axis k={k} out of range 1..{ndim}")
    return int(k) - 1


def unfold(C, k: int) -> np.ndarray:
    """Mode-``k`` unfolding (1-based ``k``).

    Rows are indexed by ``i_k``; columns run over the remaining axes in
    original order, first remaining axis fastest.
    """
    arr = as_array(C)
    ax = _check_axis(k, arr.ndim)
    moved = np.moveaxis(arr, ax, 0)
    # F-order ravel of the trailing block makes the first remaining axis fastest.
    return moved.reshape(arr.shape[ax], -1, order="F")


def fold(M, k: int, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold`: rebuild the tensor from its mode-``k`` unfolding.

    Returns a plain ndarray (folding is also used on non-state data such as
    decomposition residuals); wrap in :class:`StateTensor` if appropriate.
    """
    dims = tuple(int(d) for d in dims)
    arr = np.asarray(M, dtype=np.complex128)
    ax = _check_axis(k, len(dims))
    rest = dims[:ax] + dims[ax + 1 :]
    if arr.shape != (dims[ax], int(np.prod(rest, dtype=np.int64)) if rest else 1):
        raise ValueError(
            f"matrix shape {arr.shape} does not match mode-{k} unfolding of dims {dims}"
        )
    moved = arr.reshape((dims[ax],) + rest, order="F")
    return np.ascontiguousarray(np.moveaxis(moved, 0, ax))


def kmode_product(U, C, k: int) -> np.ndarray:
    """Apply a matrix to mode ``k`` (1-based): ``(U x_k C)``.

    ``U`` must be ``(m, d_k)``; the result has ``d_k`` replaced by ``m``.
    Satisfies ``unfold(kmode_product(U, C, k), k) == U @ unfold(C, k)``.
    """
    arr = as_array(C)
    ax = _check_axis(k, arr.ndim)
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[1] != arr.shape[ax]:
        raise ValueError(
            f"matrix shape {U.shape} incompatible with axis {k} of size {arr.shape[ax]}"
        )
    out = np.tensordot(U, arr, axes=([1], [ax]))
    return np.ascontiguousarray(np.moveaxis(out, 0, ax))


def prob_vector(C) -> np.ndarray:
    """Probability vector ``p_mu = |C_mu|^2`` over flat indices (C order).

    Requires unit normalization within ``NORM_ATOL``.
    """
    arr = as_array(C)
    p = np.abs(arr.ravel()) ** 2
    s = float(p.sum())
    if abs(s - 1.0) > 2 * NORM_ATOL:
        raise NormalizationError(
            f"probabilities sum to {s!r}; the tensor is not unit-normalized"
        )
    return p


def inner(A, B) -> complex:
    """Inner product <A|B> = sum conj(A_mu) B_mu (conjugate-linear in A)."""
    a = as_array(A)
    b = as_array(B)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def reduced_density(C, k: int) -> np.ndarray:
    """One-party reduced density matrix of party ``k`` (1-based).

    rho_k = M M^dagger with M the mode-k unfolding; Hermitian, unit trace
    for normalized input.
    """
    M = unfold(C, k)
    return M @ M.conj().T


# ---------------------------------------------------------------------------
# JSON interchange


def to_json_dict(C) -> dict:
    st = C if isinstance(C, StateTensor) else StateTensor(C)
    flat = st.array.ravel()
    return {
        "dims": [int(d) for d in st.dims],
        "coeffs": [[float(z.real), float(z.imag)] for z in flat],
    }


def from_json_dict(payload: dict) -> StateTensor:
    if not isinstance(payload, dict):
        raise StateFormatError("state payload must be a JSON object")
    missing = {"dims", "coeffs"} - set(payload)
    if missing:
        raise StateFormatError(f"state payload missing keys: {sorted(missing)}")
    dims = payload["dims"]
    coeffs = payload["coeffs"]
    if not isinstance(dims, (list, tuple)) or not dims:
        raise StateFormatError("'dims' must be a non-empty list of integers")
    try:
        dims = tuple(int(d) for d in dims)
    except (TypeError, ValueError) as exc:
        raise StateFormatError(f"bad 'dims' entry: {exc}") from None
    size = int(np.prod(dims, dtype=np.int64))
    if not isinstance(coeffs, (list, tuple)) or len(coeffs) != size:
        raise StateFormatError(
            f"'coeffs' must list {size} [re, im] pairs for dims {list(dims)}"
        )
    flat = np.empty(size, dtype=np.complex128)
    for i, pair in enumerate(coeffs):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise StateFormatError(f"coefficient {i} is not an [re, im] pair")
        try:
            flat[i] = complex(float(pair[0]), float(pair[1]))
        except (TypeError, ValueError) as exc:
            raise StateFormatError(f"coefficient {i}: {exc}") from None
    try:
        return StateTensor(flat, dims)
    except NormalizationError as exc:
        raise StateFormatError(str(exc)) from None


def save_state(C, path) -> None:
    """Write a state tensor to ``path`` in the JSON interchange format."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(C), fh)
        fh.write("\n")


def load_state(path) -> StateTensor:
    """Read a state tensor from a JSON file written by :func:`save_state`."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StateFormatError(f"invalid JSON in {path}: {exc}") from None
    return from_json_dict(payload)
