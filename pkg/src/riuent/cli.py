"""Command-line front end.

Machine-first output: every subcommand emits one JSON document (to stdout
or to a file), ensemble/scaling additionally write CSV; everything meant
for a human goes to stderr. Stochastic subcommands log the effective seed
so any run can be reproduced exactly; the RIUENT_SEED environment
variable supplies the default when --seed is absent.

Exit codes: 0 success, 2 usage error (bad flags, unknown state, malformed
state file), 1 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .catalog import catalog_entries, named_state
from .decomp import hosvd, parafac_als, rank_estimate
from .entropy import renyi
from .haar import RngStream
from .moments import tangle_even_moment
from .polyinv import det3, det4, hyper_t, tangle
from .riu import WalkOptions, riu_minimize
from .studies import ensemble_stat, scaling_study, schmidt_bound
from .tensor import StateFormatError, StateTensor, load_state, to_json_dict


class UsageError(Exception):
    pass


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _parse_q(text: str) -> float:
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        q = float(t)
    except ValueError:
        raise UsageError(f"cannot parse q value {text!r} (number or 'inf')") from None
    if q < 0 or math.isnan(q):
        raise UsageError(f"q must be a real >= 0 or 'inf', got {text!r}")
    return q


def _json_q(q: float):
    return "inf" if math.isinf(q) else q


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("RIUENT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"RIUENT_SEED={env!r} is not an integer") from None
    return 0


def _load_from_args(args) -> StateTensor:
    name = getattr(args, "state", None)
    path = getattr(args, "state_file", None)
    if (name is None) == (path is None):
        raise UsageError("give exactly one of --state NAME or --state-file PATH")
    if name is not None:
        try:
            return named_state(name)
        except KeyError:
            raise UsageError(f"unknown state name {name!r}; see the catalog subcommand") from None
    try:
        return load_state(path)
    except FileNotFoundError:
        raise UsageError(f"state file not found: {path}") from None
    except (StateFormatError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed state file {path}: {exc}") from None


def _mat_json(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


def _add_state_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--state", help="catalog state name, e.g. GHZ, W, D(4,2)")
    p.add_argument("--state-file", help="path to a state JSON file (dims + coeffs)")


def _emit(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        _note(f"wrote {path}")
    else:
        print(text)


# ---------------------------------------------------------------- handlers


def cmd_riu(args):
    st = _load_from_args(args)
    q = _parse_q(args.q)
    seed = _resolve_seed(args)
    opts = WalkOptions(
        restarts=args.restarts,
        steps=args.steps,
        threads=args.threads,
    )
    _note(f"seed: {seed}")
    res = riu_minimize(st, q, opts=opts, rng=RngStream(seed))
    payload = {
        "command": "riu",
        "q": _json_q(q),
        "value": res.value,
        "converged": res.converged,
        "best_restart": res.best_restart,
        "seed": seed,
        "optimizer": None
        if res.optimizer is None
        else [_mat_json(f) for f in res.optimizer.factors],
    }
    if math.isinf(q):
        lam = min(math.exp(-res.value), 1.0)
        payload["lambda_max"] = lam
        payload["geometric_measure"] = 1.0 - lam
    return payload


def cmd_entropy(args):
    st = _load_from_args(args)
    q = _parse_q(args.q)
    return {
        "command": "entropy",
        "q": _json_q(q),
        "value": renyi(st.probs(), q),
        "dims": list(st.dims),
    }


def cmd_hosvd(args):
    st = _load_from_args(args)
    res = hosvd(st)
    core_p = np.abs(res.core.array.ravel()) ** 2
    return {
        "command": "hosvd",
        "dims": list(st.dims),
        "mode_sv": [[float(s) for s in sv] for sv in res.mode_sv],
        "core": to_json_dict(res.core),
        "core_prob_max": float(core_p.max()),
        "factors": [_mat_json(U) for U in res.factors],
    }


def cmd_parafac(args):
    st = _load_from_args(args)
    seed = _resolve_seed(args)
    _note(f"seed: {seed}")
    model = parafac_als(
        st,
        args.rank,
        max_iter=args.max_iter,
        tol=args.tol,
        restarts=args.restarts,
        rng=RngStream(seed),
    )
    return {
        "command": "parafac",
        "rank": model.rank,
        "weights": [float(w) for w in model.weights],
        "residual": float(model.residual),
        "converged": bool(model.converged),
        "seed": seed,
        "factors": [_mat_json(f) for f in model.factors],
    }


def cmd_rank(args):
    st = _load_from_args(args)
    seed = _resolve_seed(args)
    _note(f"seed: {seed}")
    r = rank_estimate(
        st, args.tol, max_iter=args.max_iter, restarts=args.restarts, rng=RngStream(seed)
    )
    return {"command": "rank", "rank": int(r), "tol": args.tol, "seed": seed}


def cmd_tangle(args):
    st = _load_from_args(args)
    if st.dims != (2, 2, 2):
        raise UsageError(f"tangle needs a 3-qubit state, got dims {list(st.dims)}")
    z = det3(st)
    return {
        "command": "tangle",
        "tangle": tangle(st),
        "det3": [float(z.real), float(z.imag)],
    }


def cmd_hyperdet(args):
    st = _load_from_args(args)
    if st.dims != (2, 2, 2, 2):
        raise UsageError(f"hyperdet needs a 4-qubit state, got dims {list(st.dims)}")
    z = det4(st)
    return {
        "command": "hyperdet",
        "T": hyper_t(st),
        "det4": [float(z.real), float(z.imag)],
    }


def cmd_moments(args):
    m = tangle_even_moment(args.k, allow_large=args.allow_large)
    payload = {"command": "moments", "k": int(args.k), "value": float(m)}
    if args.exact:
        payload["exact"] = f"{m.numerator}/{m.denominator}"
        _note(f"E[tau^{2 * args.k}] = {m.numerator}/{m.denominator} = {float(m):.12g}")
    return payload


def cmd_ensemble(args):
    seed = _resolve_seed(args)
    _note(f"seed: {seed}")
    q = None if args.q is None else _parse_q(args.q)
    rep = ensemble_stat(
        args.n,
        args.d,
        args.stat,
        q=q,
        samples=args.samples,
        seed=seed,
        bins=args.bins,
        threads=args.threads,
    )
    if args.out:
        rep.write_csv(args.out)
        _note(f"wrote {args.out}")
    return rep.to_json_dict()


def cmd_scaling(args):
    seed = _resolve_seed(args)
    _note(f"seed: {seed}")
    rep = scaling_study(
        dmin=args.dmin,
        dmax=args.dmax,
        samples=args.samples,
        seed=seed,
        threads=args.threads,
    )
    if args.out:
        rep.write_csv(args.out)
        _note(f"wrote {args.out}")
    return rep.to_json_dict()


def cmd_schmidt_bound(args):
    st = _load_from_args(args)
    if len(st.dims) != 3:
        raise UsageError(f"schmidt-bound needs a tripartite state, got dims {list(st.dims)}")
    return {"command": "schmidt-bound", "bound": schmidt_bound(st), "dims": list(st.dims)}


def cmd_catalog(args):
    if args.export:
        try:
            st = named_state(args.export)
        except KeyError:
            raise UsageError(f"unknown state name {args.export!r}") from None
        return to_json_dict(st)
    return {"command": "catalog", "states": catalog_entries()}


# ----------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    cpus = os.cpu_count() or 1
    parser = argparse.ArgumentParser(
        prog="riuent",
        description="Minimized Renyi entropies, tensor decompositions and "
        "entanglement invariants of multipartite pure states.",
    )
    parser.add_argument("--version", action="version", version=f"riuent {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--out", help="write the JSON (CSV for ensemble/scaling) here")
        return p

    p = add("riu", cmd_riu, "minimize S_q over local unitaries")
    _add_state_flags(p)
    p.add_argument("--q", required=True, help="Renyi order (number or 'inf')")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=cpus)

    p = add("entropy", cmd_entropy, "S_q of the raw probability vector")
    _add_state_flags(p)
    p.add_argument("--q", required=True, help="Renyi order (number or 'inf')")

    p = add("hosvd", cmd_hosvd, "higher-order SVD: factors, core, mode spectra")
    _add_state_flags(p)

    p = add("parafac", cmd_parafac, "rank-r CP fit by alternating least squares")
    _add_state_flags(p)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int)

    p = add("rank", cmd_rank, "smallest CP rank fitting within tolerance")
    _add_state_flags(p)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int)

    p = add("tangle", cmd_tangle, "3-tangle of a 3-qubit state")
    _add_state_flags(p)

    p = add("hyperdet", cmd_hyperdet, "hyperdeterminant invariant T of a 4-qubit state")
    _add_state_flags(p)

    p = add("moments", cmd_moments, "exact Haar moments E[tau^2k] of the 3-tangle")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="include the reduced fraction")
    p.add_argument("--allow-large", action="store_true", help="permit k >= 4 (slow)")

    p = add("ensemble", cmd_ensemble, "sample a statistic over Haar-random states")
    p.add_argument("--n", type=int, required=True, help="number of parties")
    p.add_argument("--d", type=int, required=True, help="local dimension")
    p.add_argument(
        "--stat",
        required=True,
        help="sq-raw | sq-hosvd | sq-riu | tangle | tangle2 | hyperT | lambda-max",
    )
    p.add_argument("--q", help="Renyi order, required for the sq-* statistics")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--threads", type=int, default=cpus)
    p.add_argument("--report", help="write the full JSON report here")

    p = add("scaling", cmd_scaling, "overlap scaling study on tripartite qudits")
    p.add_argument("--dmin", type=int, default=2)
    p.add_argument("--dmax", type=int, default=8)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=cpus)
    p.add_argument("--report", help="write the full JSON report here")

    p = add("schmidt-bound", cmd_schmidt_bound, "min over cuts of the top squared Schmidt coefficient")
    _add_state_flags(p)

    p = add("catalog", cmd_catalog, "list named states, or export one as JSON")
    p.add_argument("--export", help="state name to export in the interchange format")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload = args.func(args)
    except UsageError as exc:
        _note(f"error: {exc}")
        return 2
    except ValueError as exc:
        _note(f"error: {exc}")
        return 2
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _note(f"numerical failure: {exc}")
        return 1

    # ensemble/scaling route their JSON through --report; --out is the CSV
    json_path = getattr(args, "report", None) or (
        None if args.subcommand in ("ensemble", "scaling") else args.out
    )
    _emit(payload, json_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
