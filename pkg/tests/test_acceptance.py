"""Acceptance gate: one test per release criterion, each printing a single
PASS/FAIL line. Tolerances are the recorded ones; where a recorded value is
not attainable the test states what was attained and fails honestly rather
than loosening the bound. Everything runs at seed 2024.
"""

import math
import os
from fractions import Fraction

import numpy as np
import pytest

from riuent.catalog import dicke, ghz, hd, named_state, product, w_state
from riuent.decomp import closest_product_state, hosvd, parafac_als, rank_estimate
from riuent.entropy import INF, renyi
from riuent.haar import RngStream, haar_state, haar_unitary
from riuent.moments import beta_fit, tangle_even_moment
from riuent.polyinv import det3, det4, hyper_t, tangle, tangle_via_concurrence
from riuent.riu import (
    WalkOptions,
    analytic_riu,
    apply_local,
    lambda_max_sep,
    riu_minimize,
    riu_symmetric,
)
from riuent.studies import (
    TABLE_WALK_OPTS,
    EnsembleReport,
    beta_fit_report,
    haar_mean_shannon,
    haar_std_shannon,
    riu_table,
    sample_stat,
    scaling_study,
    schmidt_bound,
)
from riuent.tensor import fold, unfold

SEED = 2024
NT = max(1, min(os.cpu_count() or 1, 8))

LOG2 = math.log(2.0)
LOG3 = math.log(3.0)


def _finish(num: int, name: str, failures: list[str]) -> None:
    if failures:
        msg = f"CRITERION {num} ({name}): FAIL\n" + "\n".join(
            f"  - {f}" for f in failures
        )
        print(msg)
        raise AssertionError(msg)
    print(f"CRITERION {num} ({name}): PASS")


def _check(failures: list[str], ok: bool, text: str) -> None:
    if not ok:
        failures.append(text)


# ---------------------------------------------------------------------------


def test_criterion_01_closed_form_entropies():
    failures: list[str] = []
    opts = WalkOptions(restarts=8, steps=6000, threads=NT)
    rng = RngStream(SEED)

    for i, q in enumerate((0.5, 1.0, 2.0, 100.0, INF)):
        v = riu_minimize(ghz(3), q, opts=opts, rng=rng.substream(0, i)).value
        _check(failures, abs(v - LOG2) <= 1e-3, f"GHZ q={q}: {v:.6f} vs log2")
    v = riu_minimize(w_state(3), 1, opts=opts, rng=rng.substream(1)).value
    _check(failures, abs(v - LOG3) <= 1e-3, f"W S1: {v:.6f} vs log3")
    lam = lambda_max_sep(w_state(3), opts=opts, rng=rng.substream(2)).lam
    _check(failures, abs(lam - 4 / 9) <= 1e-3, f"W lambda_max: {lam:.6f} vs 4/9")

    for q in (2.0, 3.0, 5.0):
        v = riu_symmetric(dicke(4, 2), q).value
        ref = analytic_riu("D(4,2)", q)
        _check(failures, abs(v - ref) <= 1e-6, f"D(4,2) q={q}: {v:.9f} vs {ref:.9f}")
    v = riu_symmetric(dicke(4, 2), INF).value
    ref = -math.log(3.0 / 8.0)
    _check(failures, abs(v - ref) <= 1e-6, f"D(4,2) q=inf: {v:.9f} vs {ref:.9f}")

    # HD pins. The attained minima (symmetric family and unrestricted walk
    # agree) follow S_q = log(6^q/(4+2^q))/(q-1); the recorded curve
    # (1/(1-q))log(6^q/(4+4^q)) with pins (4/3)log3 at q=1 and log(3/2) at
    # q=inf is provably below the exact product-overlap bound S_inf = log 3,
    # so these four sub-assertions cannot pass and are left failing.
    for q in (1.0, 2.0, 5.0, INF):
        v = riu_symmetric(hd(), q).value
        ref = analytic_riu("HD", q)
        _check(
            failures,
            abs(v - ref) <= 1e-6,
            f"HD q={q}: attained {v:.9f}, recorded {ref:.9f} "
            "(recorded value unattainable; see ANALYTIC_NOTES['HD'])",
        )

    _finish(1, "closed-form entropies", failures)


def test_criterion_02_rank_estimates():
    failures: list[str] = []
    m = RngStream(SEED)
    trio = [
        ("product", product(3, 2), 1, 100),
        ("GHZ", ghz(3), 2, 101),
        ("W", w_state(3), 3, 102),
    ]
    for name, st, want, sub in trio:
        got = rank_estimate(st, rng=m.substream(sub))
        _check(failures, got == want, f"rank({name}) = {got}, want {want}")
    for i in range(50):
        st = haar_state((2, 2, 2), m.substream(i, 0))
        r = rank_estimate(st, rng=m.substream(i, 1))
        _check(failures, r <= 5, f"random state {i}: rank {r} > 5")
    _finish(2, "rank estimates", failures)


def test_criterion_03_exact_moments():
    failures: list[str] = []
    wanted = {
        1: Fraction(8, 55),
        2: Fraction(128, 3003),
        3: Fraction(7168, 415701),
    }
    for k, frac in wanted.items():
        got = tangle_even_moment(k)
        _check(failures, got == frac, f"moment k={k}: {got} != {frac}")
    ab = beta_fit(Fraction(1, 3), Fraction(8, 55))
    _check(
        failures,
        ab == (Fraction(31, 17), Fraction(62, 17)),
        f"beta_fit(1/3, 8/55) = {ab}, want (31/17, 62/17)",
    )
    _finish(3, "exact moments", failures)


@pytest.mark.slow
def test_criterion_04_tangle_statistics():
    failures: list[str] = []
    tau = sample_stat(3, 2, "tangle", samples=100_000, seed=SEED, threads=NT)
    m1 = float(tau.mean())
    _check(failures, abs(m1 - 1 / 3) <= 0.005, f"<tau> = {m1:.5f} vs 1/3 +- 0.005")
    t2 = tau**2
    m2 = float(t2.mean())
    se2 = float(t2.std() / math.sqrt(t2.size))
    ref2 = 8.0 / 55.0
    _check(
        failures,
        abs(m2 - ref2) <= 3 * se2,
        f"<tau^2> = {m2:.6f}, off by {abs(m2 - ref2) / se2:.2f} SE from 8/55",
    )
    a_hat = beta_fit_report(tau).alpha_hat
    _check(
        failures,
        abs(a_hat - 31 / 17) <= 0.05,
        f"alpha_hat = {a_hat:.4f} vs 31/17 +- 0.05",
    )
    _finish(4, "3-tangle statistics", failures)


@pytest.mark.slow
def test_criterion_05_three_qubit_table():
    failures: list[str] = []
    table = riu_table(
        n=3, d=2, qs=(1.0, 2.0, 100.0), samples=2000,
        opts=TABLE_WALK_OPTS, seed=SEED, threads=NT,
    )
    recorded = {
        1.0: (1.717, 1.132, 0.907),
        2.0: (1.534, 0.812, 0.650),
        100.0: (1.125, 0.488, 0.383),
    }
    for q, (r_raw, r_hos, r_riu) in recorded.items():
        cols = table[q]
        raw, hos, riu = cols["raw"].mean, cols["hosvd"].mean, cols["riu"].mean
        _check(failures, abs(raw - r_raw) <= 0.02, f"raw q={q}: {raw:.4f} vs {r_raw} +- 0.02")
        _check(failures, abs(hos - r_hos) <= 0.03, f"hosvd q={q}: {hos:.4f} vs {r_hos} +- 0.03")
        sem = cols["riu"].std / math.sqrt(cols["riu"].samples)
        ok = (r_riu - 0.05 <= riu <= r_riu + 3 * sem) and abs(riu - r_riu) <= 0.05
        _check(
            failures, ok,
            f"riu q={q}: {riu:.4f} vs {r_riu} (above-bound +3sem={3 * sem:.4f} / -0.05)",
        )
    # analytic anchors for the raw Shannon column
    _check(
        failures,
        abs(haar_mean_shannon(8) - 1.718) <= 1e-3,
        f"<S1> anchor: {haar_mean_shannon(8):.6f} vs 1.718",
    )
    _check(
        failures,
        abs(haar_std_shannon(8) - 0.160) <= 1e-3,
        f"DeltaS1 anchor: {haar_std_shannon(8):.6f} vs 0.160",
    )
    rep1 = table[1.0]["raw"]
    sem1 = rep1.std / math.sqrt(rep1.samples)
    _check(
        failures,
        abs(rep1.mean - haar_mean_shannon(8)) <= 3 * sem1,
        f"raw S1 mean {rep1.mean:.4f} vs analytic {haar_mean_shannon(8):.4f} (3 sem)",
    )
    _finish(5, "3-qubit entropy table", failures)


@pytest.mark.slow
def test_criterion_06_four_qubit_table():
    failures: list[str] = []
    table = riu_table(
        n=4, d=2, qs=(1.0, 2.0, 100.0), samples=1000,
        opts=TABLE_WALK_OPTS, seed=SEED, threads=NT,
    )
    recorded = {
        1.0: (2.381, 2.038, 1.633),
        2.0: (2.159, 1.601, 1.199),
        100.0: (1.60, 1.027, 0.701),
    }
    for q, (r_raw, r_hos, r_riu) in recorded.items():
        cols = table[q]
        raw, hos, riu = cols["raw"].mean, cols["hosvd"].mean, cols["riu"].mean
        _check(failures, abs(raw - r_raw) <= 0.03, f"raw q={q}: {raw:.4f} vs {r_raw} +- 0.03")
        _check(failures, abs(hos - r_hos) <= 0.04, f"hosvd q={q}: {hos:.4f} vs {r_hos} +- 0.04")
        _check(failures, abs(riu - r_riu) <= 0.07, f"riu q={q}: {riu:.4f} vs {r_riu} +- 0.07")
    _finish(6, "4-qubit entropy table", failures)


@pytest.mark.slow
def test_criterion_07_hyperdeterminant():
    failures: list[str] = []
    t_hd = hyper_t(hd())
    _check(failures, abs(t_hd - 1.0) <= 1e-12, f"T(HD) = {t_hd!r}, want 1 (calibration)")
    t_l = hyper_t(named_state("L"))
    _check(failures, abs(t_l - 1.0) <= 1e-6, f"T(L) = {t_l!r}, want 1 +- 1e-6")
    for name in ("GHZ4", "D(4,1)", "D(4,2)", "C1", "C2", "C3", "HS", "product4"):
        t = hyper_t(named_state(name))
        _check(failures, abs(t) <= 1e-10, f"T({name}) = {t!r}, want 0 +- 1e-10")

    vals = sample_stat(4, 2, "hyperT", samples=100_000, seed=SEED, threads=NT)
    mean = float(vals.mean())
    rec = 9.74e-4
    _check(
        failures,
        abs(mean - rec) <= 0.2 * rec,
        f"<T> = {mean:.6e}, recorded {rec:.2e} +- 20% "
        f"(measured/recorded = {mean / rec:.3f}; the recorded mean is a "
        "factor ~4 below what the T(HD)=1 calibration fixes, so this "
        "sub-assertion cannot pass under the calibrated scale)",
    )
    _finish(7, "hyperdeterminant invariant", failures)


def test_criterion_08_maximal_states():
    failures: list[str] = []
    opts = WalkOptions(threads=NT)
    m = RngStream(SEED)

    v = riu_minimize(named_state("Phi1max"), 1, opts=opts, rng=m.substream(0)).value
    _check(failures, abs(v - 1.277) <= 0.01, f"S1(Phi1max) = {v:.5f} vs 1.277 +- 0.01")
    v = riu_minimize(named_state("Phi2max"), 2, opts=opts, rng=m.substream(1)).value
    _check(failures, abs(v - 1.108) <= 0.01, f"S2(Phi2max) = {v:.5f} vs 1.108 +- 0.01")
    v = riu_minimize(named_state("Psi1max"), 1, opts=opts, rng=m.substream(2)).value
    _check(
        failures,
        abs(v - 1.934) <= 0.02,
        f"S1(Psi1max) attained {v:.6f} (an upper bound on the true minimum), "
        "recorded 1.934 +- 0.02; the recorded value is unattainable for the "
        "state as printed (independent runs reach <= 1.8878)",
    )
    v = riu_minimize(named_state("HS"), 2, opts=opts, rng=m.substream(3)).value
    _check(failures, abs(v - math.log(6)) <= 1e-2, f"S2(HS) = {v:.5f} vs log6")
    lam = lambda_max_sep(named_state("HS"), opts=opts, rng=m.substream(4)).lam
    _check(failures, abs(lam - 2 / 9) <= 1e-3, f"lambda_max(HS) = {lam:.6f} vs 2/9")
    lam = lambda_max_sep(named_state("Phi4"), opts=opts, rng=m.substream(5)).lam
    _check(failures, abs(lam - 1 / 3) <= 1e-3, f"lambda_max(Phi4) = {lam:.6f} vs 1/3")
    _finish(8, "maximal states", failures)


@pytest.mark.slow
def test_criterion_09_overlap_scaling():
    failures: list[str] = []
    rep = scaling_study(
        dmin=2, dmax=8, samples=2000, lu_dmax=3, seed=SEED, threads=NT
    )
    for r in rep.records:
        _check(
            failures,
            abs(r.z_harmonic) <= 3.0,
            f"d={r.d}: <lam_max> {r.lam_max:.6f} is {r.z_harmonic:+.2f} sigma "
            f"from H_N/N = {r.harmonic_ref:.6f}",
        )
        _check(
            failures,
            (r.lam_lu is not None) == (r.d <= 3),
            f"d={r.d}: walk overlap column presence wrong",
        )
    sh = rep.slope_hosvd.slope
    _check(failures, abs(sh - (-2.99)) <= 0.15, f"HOSVD slope {sh:.4f} vs -2.99 +- 0.15")
    sp = rep.slope_parafac.slope
    _check(
        failures,
        abs(sp - (-1.95)) <= 0.15,
        f"PARAFAC slope attained {sp:.4f}, recorded -1.95 +- 0.15; over d = 2..8 "
        "the best-product-overlap decay follows ~ log(d)/d^2 (local slope "
        "-2 + 1/ln d, about -1.5 here), so the recorded slope is not "
        "reproducible on this d range",
    )
    _finish(9, "overlap scaling study", failures)


def test_criterion_10_property_suite():
    failures: list[str] = []
    g = np.random.default_rng(SEED)

    # fold/unfold identity
    for dims in ((2, 3, 4), (2, 2, 2, 2)):
        arr = g.standard_normal(dims) + 1j * g.standard_normal(dims)
        for k in range(1, len(dims) + 1):
            back = fold(unfold(arr, k), k, dims)
            _check(failures, np.array_equal(back, arr), f"fold/unfold mode {k} on {dims}")

    # unitarity residuals
    for d in (2, 3, 5):
        U = haar_unitary(d, RngStream(SEED).substream(d))
        res = np.abs(U @ U.conj().T - np.eye(d)).max()
        _check(failures, res <= 1e-12, f"haar_unitary({d}) residual {res:.2e}")

    # entropy monotonicity in q
    qs = [0.0, 0.5, 1.0, 2.0, 5.0, 100.0, INF]
    for _ in range(5):
        p = g.dirichlet(np.ones(8))
        vals = [renyi(p, q) for q in qs]
        ok = all(a >= b - 1e-10 for a, b in zip(vals, vals[1:]))
        _check(failures, ok, f"entropy not non-increasing in q for p = {p}")

    # HOSVD core all-orthogonality
    st = haar_state((3, 3, 3), RngStream(SEED).substream(10))
    res = hosvd(st)
    for k in (1, 2, 3):
        M = unfold(res.core.array, k)
        gram = M @ M.conj().T
        off = np.abs(gram - np.diag(np.diag(gram))).max()
        _check(failures, off <= 1e-12, f"HOSVD core mode-{k} off-diagonal {off:.2e}")

    # ALS residual monotonicity in rank
    st = haar_state((2, 2, 2), RngStream(SEED).substream(11))
    resid = [parafac_als(st, r, rng=RngStream(SEED).substream(12, r)).residual for r in (1, 2, 3)]
    ok = all(a >= b - 1e-9 for a, b in zip(resid, resid[1:]))
    _check(failures, ok, f"ALS residuals not non-increasing: {resid}")

    # tangle LU and permutation invariance + Coffman identity
    psi = haar_state((2, 2, 2), RngStream(SEED).substream(13))
    us = [haar_unitary(2, RngStream(SEED).substream(14, k)) for k in range(3)]
    t0, t1 = tangle(psi), tangle(apply_local(us, psi))
    _check(failures, abs(t0 - t1) <= 1e-12, f"tangle LU drift {abs(t0 - t1):.2e}")
    t2 = tangle(np.transpose(psi.array, (2, 0, 1)))
    _check(failures, abs(t0 - t2) <= 1e-12, f"tangle permutation drift {abs(t0 - t2):.2e}")
    dc = abs(tangle_via_concurrence(psi) - t0)
    _check(failures, dc <= 1e-8, f"residual-tangle identity off by {dc:.2e}")

    # polynomial homogeneity
    s = 1.3 - 0.4j
    arr3 = haar_state((2, 2, 2), RngStream(SEED).substream(15)).array
    dh = abs(det3(s * arr3) - s**4 * det3(arr3))
    _check(failures, dh <= 1e-10, f"det3 homogeneity off by {dh:.2e}")
    arr4 = haar_state((2, 2, 2, 2), RngStream(SEED).substream(16)).array
    d4a, d4b = det4(1.2 * arr4), 1.2**24 * det4(arr4)
    _check(
        failures,
        abs(d4a - d4b) <= 1e-8 * max(1.0, abs(d4b)),
        f"det4 homogeneity off by {abs(d4a - d4b):.2e}",
    )

    # overlap estimator ordering: ALS <= walk <= Schmidt bound
    opts = WalkOptions(threads=NT)
    for i, dims in enumerate(((2, 2, 2), (2, 2, 2), (3, 3, 3))):
        st = haar_state(dims, RngStream(SEED).substream(17, i))
        _, lam_p = closest_product_state(st, restarts=4, rng=RngStream(SEED).substream(18, i))
        walk = riu_minimize(st, INF, opts=opts, rng=RngStream(SEED).substream(19, i))
        lam_lu = min(math.exp(-walk.value), 1.0)
        bound = schmidt_bound(st)
        _check(
            failures,
            lam_p <= lam_lu + 1e-6 and lam_lu <= bound + 1e-6,
            f"ordering broken on {dims}: lam_p={lam_p:.8f} lam_lu={lam_lu:.8f} "
            f"bound={bound:.8f}",
        )

    # histogram normalization
    rep = EnsembleReport.from_values("tangle", 3, 2, None, g.beta(2, 5, 3000), SEED)
    rep.validate()
    mass = sum((r[1] - r[0]) * r[3] for r in rep.histogram)
    _check(failures, abs(mass - 1.0) <= 1e-9, f"histogram mass {mass!r}")

    # seed determinism
    a = sample_stat(3, 2, "tangle", samples=32, seed=SEED)
    b = sample_stat(3, 2, "tangle", samples=32, seed=SEED, threads=4)
    _check(failures, np.array_equal(a, b), "sample_stat not reproducible across threads")
    r1 = riu_minimize(ghz(3), 2, opts=WalkOptions(restarts=2, steps=800), rng=SEED)
    r2 = riu_minimize(ghz(3), 2, opts=WalkOptions(restarts=2, steps=800), rng=SEED)
    _check(failures, r1.value == r2.value and r1.records == r2.records, "walk not reproducible")

    _finish(10, "property suite", failures)
