"""Walk-kernel backend selection.

Two interchangeable implementations of the greedy local-unitary descent
step loop exist: a compiled Cython kernel (``_native``, built by setup.py)
and a plain numpy one (``pyref``). The native kernel is selected when the
extension imported; set ``RIUENT_BACKEND=python`` (or ``native``) to force
a choice. Forcing ``native`` without the compiled extension raises.

Both backends consume identical pre-generated random arrays and implement
the same schedule, so each is fully deterministic under a fixed seed. Their
outputs are NOT bit-identical to each other: the matrix exponential and
libm paths differ in final ulps, and a greedy accept/reject chain amplifies
any ulp into a different (equally valid) trajectory. Deterministic
quantities (entropies, invariants, unfoldings) agree to ~1e-12 across
backends; stochastic pipelines agree statistically.
"""

import os

_choice = os.environ.get("RIUENT_BACKEND", "").strip().lower()

if _choice in ("", "native"):
    try:
        from . import _native as _impl

        BACKEND = "native"
    except ImportError:
        if _choice == "native":
            raise ImportError(
                "RIUENT_BACKEND=native but the compiled kernel is unavailable;"
                " build the extension or unset the variable"
            ) from None
        from . import pyref as _impl

        BACKEND = "python"
elif _choice in ("python", "pyref", "pure"):
    from . import pyref as _impl

    BACKEND = "python"
else:
    raise ValueError(
        f"unrecognized RIUENT_BACKEND={_choice!r}; use 'native' or 'python'"
    )

walk = _impl.walk
