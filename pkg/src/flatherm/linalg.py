"""Small dense linear algebra over exact fields and over floats.

The exact routines are plain Gauss-Jordan elimination and work for any
entries supporting ``+ - * /`` and an exact zero test: gmpy2 ``mpq`` as well
as :class:`~flatherm.scalars.ExactComplex`.  Float routines defer to numpy
with a single tolerance for rank decisions.
"""

from __future__ import annotations

import numpy as np

from .scalars import ONE, ZERO, ExactComplex, as_exact, exact_sqrt, is_exact

DEFAULT_TOL = 1e-10


def _is_zero(v):
    return v == 0


def _eye_like(n, sample):
    out = np.empty((n, n), dtype=object)
    zero = ExactComplex() if isinstance(sample, ExactComplex) else ZERO
    one = ExactComplex(1) if isinstance(sample, ExactComplex) else ONE
    out.fill(zero)
    for i in range(n):
        out[i, i] = one
    return out


def rref(M):
    """Reduced row echelon form of an exact matrix; returns ``(R, pivots)``."""
    R = as_exact(M)
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if not _is_zero(R[i, c])), None)
        if p is None:
            continue
        if p != r:
            R[[r, p]] = R[[p, r]]
        pv = R[r, c]
        R[r] = [v / pv for v in R[r]]
        for i in range(rows):
            if i != r and not _is_zero(R[i, c]):
                f = R[i, c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M, tol=DEFAULT_TOL):
    M = np.asarray(M)
    if M.size == 0:
        return 0
    if is_exact(M):
        return len(rref(M)[1])
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def nullspace(M, tol=DEFAULT_TOL):
    """Basis of ``{v : M v = 0}`` as the rows of the returned array."""
    M = np.asarray(M)
    ncols = M.shape[1]
    if is_exact(M):
        if M.shape[0] == 0:
            return _eye_like(ncols, ZERO)
        R, pivots = rref(M)
        sample = next((v for v in R.flat if isinstance(v, ExactComplex)), ZERO)
        free = [c for c in range(ncols) if c not in pivots]
        out = np.empty((len(free), ncols), dtype=object)
        zero = ExactComplex() if isinstance(sample, ExactComplex) else ZERO
        out.fill(zero)
        for k, fc in enumerate(free):
            out[k, fc] = ONE if zero is ZERO else ExactComplex(1)
            for r, pc in enumerate(pivots):
                out[k, pc] = -R[r, fc]
        return out
    if M.shape[0] == 0:
        return np.eye(ncols, dtype=M.dtype)
    _, s, vh = np.linalg.svd(M)
    smax = s[0] if s.size else 0.0
    r = int(np.sum(s > tol * max(1.0, smax)))
    return vh[r:].conj()


def row_basis(vectors, tol=DEFAULT_TOL):
    """A basis (as rows) of the span of the given row vectors."""
    V = np.asarray(vectors)
    if V.size == 0:
        return V.reshape(0, V.shape[-1] if V.ndim == 2 else 0)
    if is_exact(V):
        R, pivots = rref(V)
        return R[: len(pivots)]
    _, s, vh = np.linalg.svd(V, full_matrices=False)
    r = int(np.sum(s > tol * max(1.0, s[0])))
    return vh[:r]


def inverse(A):
    A = np.asarray(A)
    n = A.shape[0]
    if not is_exact(A):
        return np.linalg.inv(A)
    sample = next((v for v in A.flat if isinstance(v, ExactComplex)), ZERO)
    aug = np.concatenate([A, _eye_like(n, sample)], axis=1)
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix")
    return R[:, n:]


def solve(A, B):
    """Solve ``A X = B`` for square nonsingular A."""
    A = np.asarray(A)
    if not is_exact(A):
        return np.linalg.solve(A, B)
    B = np.asarray(B, dtype=object)
    vec = B.ndim == 1
    if vec:
        B = B[:, None]
    n = A.shape[0]
    R, pivots = rref(np.concatenate([A, B], axis=1))
    if pivots[:n] != list(range(n)) or (len(pivots) > n):
        raise np.linalg.LinAlgError("singular or inconsistent system")
    X = R[:, n:]
    return X[:, 0] if vec else X


def orthonormalize(vectors, gram, tol=DEFAULT_TOL):
    """Modified Gram-Schmidt of row vectors w.r.t. the bilinear form ``gram``.

    Vectors whose residual norm falls below ``tol`` (relative to their input
    norm) are dropped, so the result is an orthonormal basis of the span.
    Float only.
    """
    V = np.asarray(vectors, dtype=float)
    g = np.asarray(gram, dtype=float)
    out = []
    for v in V:
        w = v.copy()
        n0 = np.sqrt(max(w @ g @ w, 0.0))
        for _ in range(2):  # re-orthogonalize once for stability
            for u in out:
                w = w - (u @ g @ w) * u
        nw = np.sqrt(max(w @ g @ w, 0.0))
        if nw <= tol * max(1.0, n0):
            continue
        out.append(w / nw)
    return np.array(out).reshape(len(out), V.shape[1] if V.ndim == 2 else 0)


def orthogonalize_exact(vectors, gram):
    """Exact Gram-Schmidt without normalization; drops dependent vectors."""
    out = []
    for v in np.asarray(vectors, dtype=object):
        w = v.copy()
        for u in out:
            uu = u @ gram @ u
            w = w - ((u @ gram @ w) / uu) * u
        if any(x != 0 for x in w):
            out.append(w)
    return out


def exact_normalize(v, gram):
    """Normalize an exact real vector inside Q(sqrt2); None if impossible."""
    n2 = v @ gram @ v
    root = exact_sqrt(n2)
    if root is None:
        return None
    inv = root.inverse()
    return np.array([inv * x for x in v], dtype=object)
