# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled walk kernel.

Same contract as ``pyref.walk`` (see its module docstring for the
authoritative description); the hot loop runs without the GIL. Proposal
unitaries use the closed form at d = 2 and LAPACK zheevd otherwise.
Floating-point results match the reference backend statistically but not
bit for bit: summation order inside the objective differs, and a one-ulp
difference near an accept threshold can steer the greedy path elsewhere.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, log, pow, sin, sqrt
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy
from scipy.linalg.cython_lapack cimport zheevd

cnp.import_array()

ctypedef double complex zc

__all__ = ["walk"]


cdef inline double _objective(const zc *v, Py_ssize_t nsz, int q_kind, double q) noexcept nogil:
    cdef Py_ssize_t i
    cdef double p, pmax, acc
    if q_kind == 1:
        acc = 0.0
        for i in range(nsz):
            p = v[i].real * v[i].real + v[i].imag * v[i].imag
            if p > 0.0:
                acc -= p * log(p)
        return acc
    pmax = 0.0
    for i in range(nsz):
        p = v[i].real * v[i].real + v[i].imag * v[i].imag
        if p > pmax:
            pmax = p
    if q_kind == 2:
        return -log(pmax)
    acc = 0.0
    for i in range(nsz):
        p = (v[i].real * v[i].real + v[i].imag * v[i].imag) / pmax
        acc += pow(p, q)
    return (q * log(pmax) + log(acc)) / (1.0 - q)


cdef inline void _step_unitary(const double *blk, int d, double eps,
                               zc *G, zc *W, double *wvals,
                               zc *work, int lwork,
                               double *rwork, int lrwork,
                               int *iwork, int liwork) noexcept nogil:
    cdef int i, j, k, info
    cdef char jobz = b'V'
    cdef char uplo = b'L'
    cdef double s22 = 2.0 * sqrt(2.0)
    cdef double tbar, delta, m, nrm, th, cm, sm, br, bi, g
    cdef zc ph, acc

    # G = (X + X^H)/2 with X[i,j] = (blk[2(id+j)] + i blk[2(id+j)+1])/sqrt(2)
    for i in range(d):
        for j in range(d):
            G[i * d + j] = ((blk[2 * (i * d + j)] + blk[2 * (j * d + i)]) / s22
                            + 1j * (blk[2 * (i * d + j) + 1] - blk[2 * (j * d + i) + 1]) / s22)

    if d == 1:
        g = G[0].real
        if fabs(g) < 1e-300:
            W[0] = 1.0
        else:
            th = eps * g / fabs(g)
            W[0] = cos(th) + 1j * sin(th)
        return

    if d == 2:
        tbar = 0.5 * (G[0].real + G[3].real)
        delta = 0.5 * (G[0].real - G[3].real)
        br = G[1].real
        bi = G[1].imag
        m = sqrt(delta * delta + br * br + bi * bi)
        nrm = fabs(tbar) + m
        if nrm < 1e-300:
            W[0] = 1.0; W[1] = 0.0; W[2] = 0.0; W[3] = 1.0
            return
        th = eps * tbar / nrm
        ph = cos(th) + 1j * sin(th)
        if m < 1e-300:
            W[0] = ph; W[1] = 0.0; W[2] = 0.0; W[3] = ph
            return
        cm = cos(eps * m / nrm)
        sm = sin(eps * m / nrm) / m
        W[0] = ph * (cm + 1j * (sm * delta))
        W[1] = ph * (1j * (sm * br) - sm * bi)
        W[2] = ph * (1j * (sm * br) + sm * bi)
        W[3] = ph * (cm - 1j * (sm * delta))
        return

    # General d: LAPACK sees our row-major Hermitian buffer as its
    # conjugate, so the returned eigenvectors are conjugated columns.
    zheevd(&jobz, &uplo, &d, G, &d, wvals, work, &lwork, rwork, &lrwork,
           iwork, &liwork, &info)
    if info != 0:
        for i in range(d):
            for j in range(d):
                W[i * d + j] = 1.0 if i == j else 0.0
        return
    nrm = fabs(wvals[0])
    if fabs(wvals[d - 1]) > nrm:
        nrm = fabs(wvals[d - 1])
    if nrm < 1e-300:
        for i in range(d):
            for j in range(d):
                W[i * d + j] = 1.0 if i == j else 0.0
        return
    # phases into wvals-driven temp storage at the tail of `work`
    for k in range(d):
        th = eps * wvals[k] / nrm
        work[k] = cos(th) + 1j * sin(th)
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc = acc + work[k] * G[i + k * d].conjugate() * G[j + k * d]
            W[i * d + j] = acc


def walk(c0, dims, q_kind, q, steps, eps0, eps_min, decay, plateau, axes, normals):
    cdef cnp.ndarray cur_a = np.array(c0, dtype=np.complex128).ravel()
    cdef cnp.ndarray prop_a = np.empty_like(cur_a)
    cdef zc[::1] curv = cur_a
    cdef zc[::1] propv = prop_a
    cdef cnp.int64_t[::1] dims_v = np.ascontiguousarray(dims, dtype=np.int64)
    cdef cnp.int64_t[::1] ax_v = np.ascontiguousarray(axes, dtype=np.int64)
    cdef double[::1] nml_v = np.ascontiguousarray(normals, dtype=np.float64)

    cdef int n = dims_v.shape[0]
    cdef Py_ssize_t N = curv.shape[0]
    cdef Py_ssize_t nsteps = int(steps)
    cdef int kind = int(q_kind)
    cdef double qv = float(q)
    cdef double eps = float(eps0)
    cdef double epsm = float(eps_min)
    cdef double dec = float(decay)
    cdef Py_ssize_t plat = int(plateau)

    if ax_v.shape[0] < nsteps:
        raise ValueError("axes shorter than steps")
    cdef Py_ssize_t total = 1
    cdef int i
    for i in range(n):
        total *= dims_v[i]
    if total != N:
        raise ValueError("dims do not match the flat state length")

    ax_head = np.asarray(ax_v)[:nsteps]
    if nsteps > 0 and (int(ax_head.min()) < 0 or int(ax_head.max()) >= n):
        raise ValueError("axis entry out of range")
    dper = np.asarray(dims_v)[ax_head]
    if nsteps > 0 and int(dper.min()) < 1:
        raise ValueError("axis entry out of range")
    if int((2 * dper * dper).sum()) > nml_v.shape[0]:
        raise ValueError("normals buffer shorter than the walk needs")

    # per-mode strides: inner = product of dims right of k, outer = left of k
    inner_a = np.ones(n, dtype=np.int64)
    outer_a = np.ones(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        inner_a[i - 1] = inner_a[i] * int(dims_v[i])
    for i in range(1, n):
        outer_a[i] = outer_a[i - 1] * int(dims_v[i - 1])
    cdef cnp.int64_t[::1] inner_v = inner_a
    cdef cnp.int64_t[::1] outer_v = outer_a

    deltas = [np.eye(int(dims_v[i]), dtype=np.complex128) for i in range(n)]
    cdef zc **dptr = <zc **> malloc(n * sizeof(zc *))
    if dptr == NULL:
        raise MemoryError
    for i in range(n):
        dptr[i] = <zc *> cnp.PyArray_DATA(<cnp.ndarray> deltas[i])

    cdef int max_d = int(np.asarray(dims_v).max())
    cdef int lwork = 2 * max_d + max_d * max_d + 32
    cdef int lrwork = 1 + 5 * max_d + 2 * max_d * max_d + 32
    cdef int liwork = 3 + 5 * max_d + 32
    G_a = np.empty(max_d * max_d, dtype=np.complex128)
    W_a = np.empty(max_d * max_d, dtype=np.complex128)
    mm_a = np.empty(max_d * max_d, dtype=np.complex128)
    wv_a = np.empty(max_d, dtype=np.float64)
    work_a = np.empty(lwork, dtype=np.complex128)
    rwork_a = np.empty(lrwork, dtype=np.float64)
    iwork_a = np.empty(liwork, dtype=np.intc)
    cdef zc[::1] G_v = G_a
    cdef zc[::1] W_v = W_a
    cdef zc[::1] mm_v = mm_a
    cdef double[::1] wv_v = wv_a
    cdef zc[::1] work_v = work_a
    cdef double[::1] rwork_v = rwork_a
    cdef int[::1] iwork_v = iwork_a

    cdef zc *pc = &curv[0]
    cdef zc *pp = &propv[0]
    cdef zc *ptmp
    cdef zc *Gp = &G_v[0]
    cdef zc *Wp = &W_v[0]
    cdef zc *mmp = &mm_v[0]
    cdef zc *dk
    cdef zc acc
    cdef const double *nml = &nml_v[0] if nml_v.shape[0] > 0 else NULL
    cdef const cnp.int64_t *axp = &ax_v[0]
    cdef const cnp.int64_t *dimp = &dims_v[0]
    cdef const cnp.int64_t *innp = &inner_v[0]
    cdef const cnp.int64_t *outp = &outer_v[0]

    cdef double cur_val, val
    cdef Py_ssize_t s, off = 0, used = 0, rejects = 0, accepts = 0
    cdef Py_ssize_t o, t, base, ob, inner, outer, chunk
    cdef int annealed = 0, k, d, r, c, t2

    with nogil:
        cur_val = _objective(pc, N, kind, qv)
        for s in range(nsteps):
            k = <int> axp[s]
            d = <int> dimp[k]
            used = s + 1
            _step_unitary(nml + off, d, eps, Gp, Wp, &wv_v[0],
                          &work_v[0], lwork, &rwork_v[0], lrwork,
                          &iwork_v[0], liwork)
            off += 2 * d * d
            inner = innp[k]
            outer = outp[k]
            chunk = d * inner
            for o in range(outer):
                ob = o * chunk
                for t in range(inner):
                    base = ob + t
                    for r in range(d):
                        acc = 0.0
                        for c in range(d):
                            acc = acc + Wp[r * d + c] * pc[base + c * inner]
                        pp[base + r * inner] = acc
            val = _objective(pp, N, kind, qv)
            if val < cur_val:
                ptmp = pc; pc = pp; pp = ptmp
                cur_val = val
                accepts += 1
                rejects = 0
                dk = dptr[k]
                for r in range(d):
                    for c in range(d):
                        acc = 0.0
                        for t2 in range(d):
                            acc = acc + Wp[r * d + t2] * dk[t2 * d + c]
                        mmp[r * d + c] = acc
                memcpy(dk, mmp, d * d * sizeof(zc))
            else:
                rejects += 1
                if rejects >= plat:
                    rejects = 0
                    eps = eps * dec
                    if eps < epsm:
                        annealed = 1
                        break

    free(dptr)
    out = np.empty(N, dtype=np.complex128)
    memcpy(cnp.PyArray_DATA(<cnp.ndarray> out), pc, N * sizeof(zc))
    return cur_val, out, deltas, int(accepts), int(used), bool(annealed)
