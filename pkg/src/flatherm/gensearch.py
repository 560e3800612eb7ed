"""Flat and Kaehler-flat algebra builders, random complex structures, search.

The search works in g-orthonormal coordinates, where compatible complex
structures are exactly the skew-symmetric orthogonal matrices K.  The
tangent space at K is ``{X skew : XK + KX = 0}``; points are retracted back
by the polar factor, which maps a skew matrix to a skew orthogonal one.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np
from gmpy2 import mpq

from . import linalg
from .algebra import (
    AlmostComplexStructure,
    LieAlgebra,
    MetricTensor,
    compatibility_defect,
    conjugate_basis,
    integrability_defect,
)
from .errors import FlathermError, OddDimension, SpecInvalid
from .hermitian import kaehler_defect
from .riemannian import FlatStructure, flatness_defect, milnor_verify
from .algebra import Subspace
from .scalars import exact_identity, exact_zeros, is_exact, max_norm, to_float


def _exact_matrix(rows, name):
    try:
        M = np.array([[mpq(v) for v in row] for row in rows], dtype=object)
    except (TypeError, ValueError) as exc:
        raise SpecInvalid(f"{name} must be a matrix of rationals") from exc
    return M


def _check_f(f, rows, cols):
    if f.shape != (rows, cols):
        raise SpecInvalid(f"f must have shape {rows}x{cols}, got {f.shape[0]}x{f.shape[1] if f.ndim > 1 else 0}")
    if any(all(v == 0 for v in row) for row in f):
        raise SpecInvalid("f has a zero row")
    if linalg.rank(f) != cols:
        raise SpecInvalid("f is not injective (rank deficient)")


@dataclass(frozen=True)
class FlatSpec:
    p: int
    dim_h: int
    dim_z: int
    f: tuple

    def __post_init__(self):
        if self.p < 1 or not (1 <= self.dim_h <= self.p) or self.dim_z < 0:
            raise SpecInvalid("need p >= 1, 1 <= dim_h <= p and dim_z >= 0")
        _check_f(self.f_matrix, self.p, self.dim_h)

    @property
    def f_matrix(self):
        return _exact_matrix(self.f, "f").reshape(len(self.f), -1) if len(self.f) else exact_zeros((0, self.dim_h))

    @property
    def dim(self):
        return self.dim_h + self.dim_z + 2 * self.p


@dataclass(frozen=True)
class KahlerFlatSpec:
    p: int
    q: int
    m: int
    t: int
    f: tuple

    def __post_init__(self):
        if self.p < 1 or min(self.q, self.m, self.t) < 0:
            raise SpecInvalid("need p >= 1 and q, m, t >= 0")
        k = 2 * self.q + self.m
        if k < 1:
            raise SpecInvalid("h must be nonzero (2q + m >= 1)")
        if k > self.p:
            raise SpecInvalid(f"2q + m = {k} exceeds p = {self.p}; f cannot be injective")
        _check_f(self.f_matrix, self.p, k)

    @property
    def f_matrix(self):
        return _exact_matrix(self.f, "f").reshape(len(self.f), -1)

    @property
    def dim(self):
        return 2 * self.q + 2 * self.m + 2 * self.t + 2 * self.p


def _rotation_brackets(n, h_index, eps_start, f):
    c = exact_zeros((n, n, n))
    for i in range(f.shape[0]):
        a, b = eps_start + 2 * i, eps_start + 2 * i + 1
        for m, hm in enumerate(h_index):
            v = f[i, m]
            if v:
                c[b, hm, a] += v
                c[b, a, hm] -= v
                c[a, hm, b] -= v
                c[a, b, hm] += v
    return LieAlgebra(c)


def canonical_flat_structure(n, h_index, z_index, eps_start, f):
    eye = exact_identity(n)
    return FlatStructure(
        Subspace(eye[list(h_index)], n),
        Subspace(eye[list(z_index)], n),
        Subspace(eye[eps_start:], n),
        eye[eps_start:],
        f,
    )


def build_flat(spec):
    """Flat algebra in the basis (h, z, eps) with identity metric."""
    n = spec.dim
    f = spec.f_matrix
    h_index = range(spec.dim_h)
    z_index = range(spec.dim_h, spec.dim_h + spec.dim_z)
    eps_start = spec.dim_h + spec.dim_z
    L = _rotation_brackets(n, h_index, eps_start, f)
    g = MetricTensor.identity(n)
    fd = flatness_defect(L, g)
    if fd != 0:
        raise FlathermError(f"built algebra is not flat (defect {fd})")
    rep = milnor_verify(L, g, canonical_flat_structure(n, h_index, z_index, eps_start, f))
    if not rep.passed:
        raise FlathermError(f"built algebra fails its own normal form: {rep.failed()}")
    return L, g


def build_kaehler_flat(spec):
    """Kaehler flat algebra in the basis (h∩Jh, h1, z1, z∩Jz, eps).

    J pairs consecutive vectors inside h∩Jh, z∩Jz and eps, and sends the
    k-th vector of h1 to the k-th vector of z1.
    """
    q, m, t, p = spec.q, spec.m, spec.t, spec.p
    n = spec.dim
    f = spec.f_matrix
    h_index = range(2 * q + m)
    z_index = range(2 * q + m, 2 * q + 2 * m + 2 * t)
    eps_start = 2 * q + 2 * m + 2 * t
    L = _rotation_brackets(n, h_index, eps_start, f)
    g = MetricTensor.identity(n)
    Jm = exact_zeros((n, n))

    def pair(a, b):
        Jm[b, a] = mpq(1)
        Jm[a, b] = mpq(-1)

    for k in range(q):
        pair(2 * k, 2 * k + 1)
    for k in range(m):
        pair(2 * q + k, 2 * q + m + k)
    for k in range(t):
        pair(2 * q + 2 * m + 2 * k, 2 * q + 2 * m + 2 * k + 1)
    for k in range(p):
        pair(eps_start + 2 * k, eps_start + 2 * k + 1)
    J = AlmostComplexStructure(Jm)
    checks = {
        "integrability": integrability_defect(L, J),
        "flatness": flatness_defect(L, g),
        "kaehler": kaehler_defect(L, g, J),
    }
    bad = {k: v for k, v in checks.items() if v != 0}
    if bad:
        raise FlathermError(f"built algebra fails its own checks: {bad}")
    return L, g, J


def random_f(rng, p, k, lo=-3, hi=3):
    """Integer p x k matrix with no zero row and full column rank."""
    while True:
        f = rng.integers(lo, hi + 1, size=(p, k))
        if (np.abs(f).sum(axis=1) > 0).all() and np.linalg.matrix_rank(f) == k:
            return tuple(tuple(int(v) for v in row) for row in f)


def random_flat_spec(rng, max_dim=12):
    while True:
        p = int(rng.integers(1, max_dim // 2 + 1))
        dim_h = int(rng.integers(1, p + 1))
        dim_z = int(rng.integers(0, max_dim - 2 * p - dim_h + 1)) if max_dim - 2 * p - dim_h >= 0 else -1
        if dim_z >= 0:
            return FlatSpec(p, dim_h, dim_z, random_f(rng, p, dim_h))


def random_kaehler_flat_spec(rng, max_dim=12):
    while True:
        p = int(rng.integers(1, max_dim // 2 + 1))
        q = int(rng.integers(0, p // 2 + 1))
        m = int(rng.integers(0, p - 2 * q + 1))
        if 2 * q + m == 0:
            continue
        room = max_dim - 2 * (q + m + p)
        if room < 0:
            continue
        t = int(rng.integers(0, room // 2 + 1))
        return KahlerFlatSpec(p, q, m, t, random_f(rng, p, 2 * q + m))


def _orthonormal_frame(g):
    """Columns form a g-orthonormal basis: ``P^T g P = I``."""
    gm = to_float(g.g)
    Lc = np.linalg.cholesky(gm)
    return np.linalg.inv(Lc).T


def _standard_block(n):
    J0 = np.zeros((n, n))
    for k in range(0, n, 2):
        J0[k + 1, k] = 1.0
        J0[k, k + 1] = -1.0
    return J0


def _haar_orthogonal(rng, n):
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def random_compatible_J(g, seed):
    """``J = Q J0 Q^{-1}`` for a seeded random g-orthogonal Q."""
    n = g.dim
    if n % 2:
        raise OddDimension(f"dimension {n} is odd")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    P = _orthonormal_frame(g)
    Q = _haar_orthogonal(rng, n)
    K = Q @ _standard_block(n) @ Q.T
    K = 0.5 * (K - K.T)
    J = AlmostComplexStructure(P @ K @ np.linalg.inv(P))
    if float(J.square_defect()) > 1e-12 or float(compatibility_defect(g, J)) > 1e-12:
        raise FlathermError("sampled J left the compatibility manifold")
    return J


def random_rational_orthogonal(rng, n, spread=2):
    """Exact orthogonal matrix: a Cayley transform of a random rational skew S."""
    S = exact_zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = mpq(int(rng.integers(-spread, spread + 1)), int(rng.integers(1, 3)))
            S[i, j], S[j, i] = v, -v
    eye = exact_identity(n)
    Q = (eye - S) @ linalg.inverse(eye + S)
    perm = rng.permutation(n)
    return Q[:, perm]


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    samples: int = 200
    seed: int = 0
    max_refine_iters: int = 500
    integrability_threshold: float = 1e-10
    torsion_threshold: float = 1e-8
    step_size: float = 0.1
    method: str = "lm"  # "lm" (tangent Gauss-Newton) or "gradient"
    chunk: int = 50


@dataclass
class SampleRecord:
    index: int
    initial_defect: float
    refined_defect: float
    iterations: int
    converged: bool
    torsion: float | None = None
    note: str = ""
    J: np.ndarray | None = field(default=None, repr=False, compare=False)


@dataclass
class SearchReport:
    config: SearchConfig
    records: list = field(default_factory=list)
    integrable: int = 0
    non_kahler_integrable: int = 0
    max_manifold_defect: float = 0.0
    wall_time: float = 0.0

    @property
    def summary_line(self):
        return f"SUMMARY: integrable={self.integrable} non_kahler_integrable={self.non_kahler_integrable}"

    def to_dict(self):
        return {
            "config": asdict(self.config),
            "records": [{k: v for k, v in asdict(r).items() if k != "J"} for r in self.records],
            "integrable": self.integrable,
            "non_kahler_integrable": self.non_kahler_integrable,
            "max_manifold_defect": self.max_manifold_defect,
        }


def _bil(c, X, Y):
    """Batched ``B[s, k, i, j] = [X_s e_i, Y_s e_j]``."""
    t = np.einsum("kab,sbj->skaj", c, Y, optimize=True)
    return np.einsum("skaj,sai->skij", t, X, optimize=True)


def _mix(c, X):
    """``M(X) = B(X, I) + B(I, X)`` batched."""
    return np.einsum("maj,sai->smij", c, X, optimize=True) + np.einsum("mib,sbj->smij", c, X, optimize=True)


def nijenhuis_batch(c, K):
    """Integrability tensor for a stack of complex structures K."""
    return c[None] - _bil(c, K, K) + np.einsum("skm,smij->skij", K, _mix(c, K), optimize=True)


def _dnijenhuis(c, K, MK, X):
    """Directional derivative of the integrability tensor at K along X."""
    return (
        -_bil(c, X, K) - _bil(c, K, X)
        + np.einsum("skm,smij->skij", X, MK, optimize=True)
        + np.einsum("skm,smij->skij", K, _mix(c, X), optimize=True)
    )


def objective(c, K):
    N = nijenhuis_batch(c, K)
    return 0.5 * np.einsum("skij,skij->s", N, N)


def euclidean_gradient(c, K):
    """Gradient of ``1/2 |N(K)|^2`` with respect to the matrix entries."""
    G = nijenhuis_batch(c, K)
    MK = _mix(c, K)
    g1 = -np.einsum("skij,kab,sbj->sai", G, c, K, optimize=True)
    g2 = -np.einsum("skij,kab,sai->sbj", G, c, K, optimize=True)
    g3 = np.einsum("skij,smij->skm", G, MK, optimize=True)
    H = np.einsum("skm,skij->smij", K, G, optimize=True)
    g4 = np.einsum("smij,maj->sai", H, c, optimize=True) + np.einsum("smij,mib->sbj", H, c, optimize=True)
    return g1 + g2 + g3 + g4


def project_tangent(K, S):
    """Project matrices S onto the tangent space at K."""
    A = 0.5 * (S - np.swapaxes(S, -1, -2))
    return 0.5 * (A + K @ A @ K)


def retract(Y):
    """Polar factor; maps skew matrices to skew orthogonal ones."""
    U, _, Vt = np.linalg.svd(Y)
    Q = U @ Vt
    return 0.5 * (Q - np.swapaxes(Q, -1, -2))


def finite_difference_gradient(c, K, h=1e-6, central=False):
    """Tangent-space gradient by finite differences along an orthonormal tangent basis."""
    T = tangent_basis(K)
    f0 = objective(c, K)
    out = np.zeros_like(K)
    for b in range(T.shape[1]):
        X = T[:, b]
        fp = objective(c, K + h * X)
        if central:
            fm = objective(c, K - h * X)
            d = (fp - fm) / (2 * h)
        else:
            d = (fp - f0) / h
        out += d[:, None, None] * X
    return out


def tangent_basis(K):
    """Orthonormal (Frobenius) basis of the tangent space, shape (S, d, n, n)."""
    s, n, _ = K.shape
    idx = [(a, b) for a in range(n) for b in range(a + 1, n)]
    E = np.zeros((len(idx), n, n))
    for r, (a, b) in enumerate(idx):
        E[r, a, b] = 1.0
        E[r, b, a] = -1.0
    P = 0.5 * (E[None] + K[:, None] @ E[None] @ K[:, None])  # (S, m, n, n)
    flat = P.reshape(s, len(idx), n * n)
    _, sv, vt = np.linalg.svd(flat, full_matrices=False)
    d = (n // 2) * (n // 2 - 1)
    return vt[:, :d].reshape(s, d, n, n)


def _max_defect(c, K):
    return np.abs(nijenhuis_batch(c, K)).reshape(K.shape[0], -1).max(axis=1)


def _refine_lm(c, K, cfg, stop):
    s = K.shape[0]
    lam = np.full(s, 1e-3)
    active = np.ones(s, dtype=bool)
    iters = np.zeros(s, dtype=int)
    f = objective(c, K)
    worst = 0.0
    for _ in range(cfg.max_refine_iters):
        dmax = _max_defect(c, K)
        active &= dmax >= stop
        active &= lam < 1e12
        if not active.any():
            break
        ids = np.flatnonzero(active)
        Ka = K[ids]
        T = tangent_basis(Ka)
        d = T.shape[1]
        if d == 0:
            break
        MK = _mix(c, Ka)
        N = nijenhuis_batch(c, Ka).reshape(len(ids), -1)
        Jac = np.stack(
            [_dnijenhuis(c, Ka, MK, T[:, b]).reshape(len(ids), -1) for b in range(d)], axis=2
        )
        JtJ = np.einsum("sri,srj->sij", Jac, Jac)
        Jtr = np.einsum("sri,sr->si", Jac, N)
        A = JtJ + lam[ids, None, None] * np.eye(d)[None]
        delta = -np.linalg.solve(A, Jtr[..., None])[..., 0]
        step = np.einsum("sb,sbij->sij", delta, T)
        Kn = retract(Ka + step)
        fn = objective(c, Kn)
        better = fn < f[ids]
        good = ids[better]
        K[good] = Kn[better]
        f[good] = fn[better]
        lam[good] = np.maximum(lam[good] / 3, 1e-12)
        lam[ids[~better]] *= 4
        iters[ids] += 1
        worst = max(worst, _manifold_defect(Kn))
    return K, iters, worst


def _refine_gradient(c, K, cfg, stop):
    s = K.shape[0]
    step = np.full(s, cfg.step_size)
    active = np.ones(s, dtype=bool)
    iters = np.zeros(s, dtype=int)
    f = objective(c, K)
    worst = 0.0
    for _ in range(cfg.max_refine_iters):
        dmax = _max_defect(c, K)
        active &= (dmax >= stop) & (step >= 1e-14)
        if not active.any():
            break
        ids = np.flatnonzero(active)
        Ka = K[ids]
        G = project_tangent(Ka, euclidean_gradient(c, Ka))
        accepted = np.zeros(len(ids), dtype=bool)
        st = step[ids].copy()
        Knew = Ka.copy()
        fnew = f[ids].copy()
        for _half in range(40):
            todo = ~accepted & (st >= 1e-14)
            if not todo.any():
                break
            cand = retract(Ka[todo] - st[todo, None, None] * G[todo])
            worst = max(worst, _manifold_defect(cand))
            fc = objective(c, cand)
            ok = fc < f[ids][todo]
            where = np.flatnonzero(todo)
            Knew[where[ok]] = cand[ok]
            fnew[where[ok]] = fc[ok]
            accepted[where[ok]] = True
            st[where[~ok]] *= 0.5
        K[ids] = Knew
        f[ids] = fnew
        # grow accepted steps again so progress does not stall at tiny steps
        step[ids] = np.where(accepted, st * 2.0, st)
        iters[ids] += 1
    return K, iters, worst


def _manifold_defect(K):
    n = K.shape[-1]
    sq = np.abs(K @ K + np.eye(n)).reshape(K.shape[0], -1).max(axis=1) if len(K) else np.zeros(0)
    sk = np.abs(K + np.swapaxes(K, -1, -2)).reshape(K.shape[0], -1).max(axis=1) if len(K) else np.zeros(0)
    return float(max(sq.max(initial=0.0), sk.max(initial=0.0)))


def _initial_structures(n, cfg, idx):
    Ks = []
    for i in idx:
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, i]))
        Q = _haar_orthogonal(rng, n)
        K = Q @ _standard_block(n) @ Q.T
        Ks.append(0.5 * (K - K.T))
    return np.array(Ks)


def search_integrable(L, g, config=None):
    """Sample compatible J, refine toward integrability, record torsion of the hits."""
    cfg = config or SearchConfig()
    t0 = time.perf_counter()
    n = L.dim
    if n % 2:
        raise OddDimension(f"dimension {n} is odd")
    P = _orthonormal_frame(g)
    Pinv = np.linalg.inv(P)
    Lf = L.as_float() if L.exact else L
    gf = MetricTensor(to_float(g.g), validate=False)
    c = np.einsum("lk,kab,ai,bj->lij", Pinv, to_float(Lf.c), P, P)
    stop = cfg.integrability_threshold / 10
    report = SearchReport(cfg)
    refine = _refine_lm if cfg.method == "lm" else _refine_gradient
    # fixed index-ordered chunks keep every sample's arithmetic independent
    # of how many samples are requested
    for start in range(0, cfg.samples, cfg.chunk):
        idx = list(range(start, min(cfg.samples, start + cfg.chunk)))
        K0 = _initial_structures(n, cfg, idx)
        init = _max_defect(c, K0)
        K, iters, worst = refine(c, K0.copy(), cfg, stop)
        report.max_manifold_defect = max(report.max_manifold_defect, worst)
        for s, i in enumerate(idx):
            Jm = P @ K[s] @ Pinv
            J = AlmostComplexStructure(Jm)
            mdef = max(float(J.square_defect()), float(compatibility_defect(gf, J)))
            report.max_manifold_defect = max(report.max_manifold_defect, mdef)
            refined = float(integrability_defect(Lf, J, tol=1.0))
            rec = SampleRecord(i, float(init[s]), refined, int(iters[s]), refined < cfg.integrability_threshold)
            if rec.converged:
                rec.J = Jm
                report.integrable += 1
                try:
                    rec.torsion = float(kaehler_defect(Lf, gf, J, seed=i, tol=max(1e-8, 100 * refined)))
                except FlathermError as exc:
                    rec.note = f"torsion evaluation failed: {exc}"
                    rec.torsion = float("inf")
                if rec.torsion >= cfg.torsion_threshold:
                    report.non_kahler_integrable += 1
            report.records.append(rec)
    report.wall_time = time.perf_counter() - t0
    return report
