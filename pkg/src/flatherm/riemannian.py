"""Levi-Civita connection, curvature and the flat-metric normal form.

A metric Lie algebra is flat exactly when it splits orthogonally as
``h + z + g'`` (abelian subalgebra, center, commutator) with ``h`` acting on
``g'`` by rotations in 2-planes ``(eps_{2i-1}, eps_{2i})`` at rates given by
injective, nowhere-identically-zero functionals ``f_i``.  This module checks
that normal form against a bracket (:func:`milnor_verify`) and constructs it
from a flat algebra (:func:`milnor_decompose`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from . import linalg
from .algebra import (
    LieAlgebra,
    MetricTensor,
    Subspace,
    center,
    derived_algebra,
    intersect,
    orthogonal_complement,
    same_span,
    sum_spaces,
)
from .errors import DegenerateSplitting, FlathermError, InputError, NotFlat
from .linalg import DEFAULT_TOL
from .scalars import exact_identity, is_exact, is_zero_defect, max_norm, to_float

HALF = mpq(1, 2)


@dataclass(frozen=True, eq=False)
class Connection:
    """``gamma[k, i, j]``: component k of ``nabla_{x_i} x_j``."""

    gamma: np.ndarray

    def operator(self, i):
        """Matrix of ``nabla_{x_i}`` acting on coefficient columns."""
        return self.gamma[:, i, :]


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """``R[l, i, j, k]``: component l of ``R(x_i, x_j) x_k``."""

    R: np.ndarray

    def lowered(self, g):
        """``<R(x_i, x_j) x_k, x_m>`` indexed ``[m, i, j, k]``."""
        return np.einsum("ml,lijk->mijk", g.g, self.R)

    def antisymmetry_defect(self):
        return max_norm(self.R + self.R.transpose(0, 2, 1, 3))

    def bianchi_defect(self):
        R = self.R
        return max_norm(R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2))

    def pair_symmetry_defect(self, g):
        Rl = self.lowered(g)
        # <R(x,y)z,w> = <R(z,w)x,y>:  Rl[w,x,y,z] = Rl[y,z,w,x]
        return max_norm(Rl - Rl.transpose(2, 3, 0, 1))


def _half(exact):
    return HALF if exact else 0.5


def levi_civita(L, g, check=True):
    """Levi-Civita connection of the left-invariant metric g (Koszul formula)."""
    c, gm = L.c, g.g
    if is_exact(c) != is_exact(gm):
        c, gm = to_float(c), to_float(gm)
    exact = is_exact(c)
    cl = np.einsum("mk,kij->mij", gm, c)  # <x_m, [x_i, x_j]>
    # 2<nabla_i x_j, x_l> = <[x_i,x_j],x_l> - <[x_j,x_l],x_i> + <[x_l,x_i],x_j>
    low = _koszul_lowered(cl) * _half(exact)
    ginv = linalg.inverse(gm)
    gamma = np.einsum("kl,ijl->kij", ginv, low)
    conn = Connection(gamma)
    if check:
        tf = max_norm(gamma - gamma.transpose(0, 2, 1) - c)
        mc = max_norm(_metric_compatibility(gamma, gm))
        if not (is_zero_defect(tf, DEFAULT_TOL) and is_zero_defect(mc, DEFAULT_TOL)):
            raise FlathermError(f"Koszul post-check failed (torsion {tf}, metric {mc})")
    return conn


def _koszul_lowered(cl):
    """``<[x_i,x_j],x_l> - <[x_j,x_l],x_i> + <[x_l,x_i],x_j>`` indexed [i, j, l]."""
    return np.einsum("lij->ijl", cl) - cl + np.einsum("jli->ijl", cl)


def _metric_compatibility(gamma, gm):
    # <nabla_i x_j, x_l> + <x_j, nabla_i x_l>
    low = np.einsum("lk,kij->ijl", gm, gamma)
    return low + low.transpose(0, 2, 1)


def riemann_curvature(L, g, connection=None):
    """``R(x,y)z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_[x,y] z``."""
    gamma = (connection or levi_civita(L, g)).gamma
    c = L.c
    if is_exact(c) != is_exact(gamma):
        c, gamma = to_float(c), to_float(gamma)
    comp = np.einsum("lia,ajk->lijk", gamma, gamma, optimize=True)
    ad_term = np.einsum("mij,lmk->lijk", c, gamma, optimize=True)
    return CurvatureTensor(comp - comp.transpose(0, 2, 1, 3) - ad_term)


def flatness_defect(L, g):
    """Max-norm of the Riemann tensor; zero iff the metric is flat."""
    return max_norm(riemann_curvature(L, g).R)


# ---------------------------------------------------------------------------
# the flat normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlatStructure:
    """Orthogonal splitting ``h + z + g'`` with rotation data.

    ``epsilon`` holds the orthonormal basis of ``g'`` as rows, paired as
    (0, 1), (2, 3), ...; ``f[i, m]`` is the rotation rate of pair i under the
    m-th basis vector of ``h``.
    """

    h: Subspace
    z: Subspace
    gprime: Subspace
    epsilon: np.ndarray
    f: np.ndarray

    @property
    def p(self):
        return self.f.shape[0]

    def evaluate_f(self, x):
        """The vector ``(f_1(x), ..., f_p(x))`` for x in h."""
        return self.f @ self.h.coordinates(x)


@dataclass
class Clause:
    name: str
    passed: bool
    defect: object = None


@dataclass
class VerifyReport:
    clauses: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.clauses)

    def failed(self):
        return [c.name for c in self.clauses if not c.passed]

    def clause(self, name):
        return next(c for c in self.clauses if c.name == name)


def milnor_verify(L, g, F, tol=DEFAULT_TOL):
    """Check every clause of the flat normal form for (L, g) against F.

    In exact mode every defect must vanish exactly; otherwise it must be
    below ``tol``.
    """
    n = L.dim
    for S in (F.h, F.z, F.gprime):
        if S.ambient != n:
            raise InputError(f"subspace lives in dimension {S.ambient}, algebra has {n}", "FlatStructure")
    eps = np.asarray(F.epsilon).reshape(-1, n)
    f = np.asarray(F.f).reshape(-1, F.h.dim)
    exact = L.exact and g.exact and all(is_exact(a) for a in (F.h.basis, F.z.basis, F.gprime.basis, eps, f))
    if exact:
        c, gm = L.c, g.g
        Lw = L
    else:
        c, gm = to_float(L.c), to_float(g.g)
        Lw = LieAlgebra(c, validate=False)
        eps, f = to_float(eps), to_float(f)
    H = F.h.basis if exact else to_float(F.h.basis)
    Z = F.z.basis if exact else to_float(F.z.basis)
    G = F.gprime.basis if exact else to_float(F.gprime.basis)

    def ok(v):
        return is_zero_defect(v, tol)

    rep = VerifyReport()
    p = f.shape[0]
    dims_ok = (
        F.h.dim + F.z.dim + F.gprime.dim == n
        and eps.shape[0] == F.gprime.dim == 2 * p
        and linalg.rank(np.vstack([H, Z, G]), tol) == n
    )
    rep.clauses.append(Clause("dimensions", dims_ok))
    cross = [H @ gm @ Z.T, H @ gm @ G.T, Z @ gm @ G.T]
    d = max((max_norm(m) for m in cross), key=float)
    rep.clauses.append(Clause("orthogonal_decomposition", ok(d), d))

    ctr = center(Lw, tol)
    zb = max_norm(Lw.brackets(Z.T, _eye(n, exact)))
    rep.clauses.append(Clause("z_is_center", ok(zb) and ctr.dim == F.z.dim, zb))

    gp = derived_algebra(Lw, tol)
    eps_space = Subspace(eps, n) if eps.size else Subspace.zero(n, exact)
    rep.clauses.append(
        Clause("gprime_is_commutator", same_span(gp, F.gprime, tol) and same_span(gp, eps_space, tol))
    )

    on = max_norm(eps @ gm @ eps.T - _eye(eps.shape[0], exact)) if eps.size else _zero(exact)
    rep.clauses.append(Clause("epsilon_orthonormal", ok(on), on))

    hab = max_norm(Lw.brackets(H.T, H.T)) if H.size else _zero(exact)
    rep.clauses.append(Clause("h_abelian", ok(hab), hab))

    rot = _zero(exact)
    if H.size and eps.size and eps.shape[0] == 2 * p:
        B = Lw.brackets(H.T, eps.T)  # B[:, m, a] = [h_m, eps_a]
        for i in range(p):
            odd, even = eps[2 * i], eps[2 * i + 1]
            for m in range(H.shape[0]):
                r1 = max_norm(B[:, m, 2 * i] - f[i, m] * even)
                r2 = max_norm(B[:, m, 2 * i + 1] + f[i, m] * odd)
                rot = max(rot, r1, r2, key=float)
    rep.clauses.append(Clause("rotation_form", ok(rot) and dims_ok, rot))

    inj = f.size == 0 or linalg.rank(f, tol) == F.h.dim
    rep.clauses.append(Clause("f_injective", bool(inj) and f.shape[1] == F.h.dim))
    rows = [max_norm(row) for row in f]
    smallest = min(rows, key=float) if rows else None
    rep.clauses.append(Clause("f_rows_nonzero", all(not ok(r) for r in rows), smallest))
    return rep


def _eye(n, exact):
    return exact_identity(n) if exact else np.eye(n)


def _zero(exact):
    return mpq(0) if exact else 0.0


def milnor_decompose(L, g, seed=0, tol=DEFAULT_TOL, verify_tol=1e-8):
    """Construct the flat normal form of a flat metric Lie algebra.

    Subspaces are computed in the input's arithmetic mode; the rotation
    planes come from a floating-point eigen-decomposition, so the returned
    structure is float and is certified by :func:`milnor_verify` at
    ``verify_tol`` before being returned.

    Within each plane ``eps_{2i}`` is oriented so that ``f_i(x0) > 0`` for a
    seeded generic ``x0`` in h, and planes are sorted by decreasing ``f_i(x0)``.
    """
    defect = flatness_defect(L, g)
    if not is_zero_defect(defect, tol):
        raise NotFlat(f"curvature max-norm {defect}")
    n = L.dim
    gp = derived_algebra(L, tol)
    ctr = center(L, tol)
    if intersect(ctr, gp, tol).dim:
        raise DegenerateSplitting("center meets the commutator")
    z = intersect(ctr, orthogonal_complement(gp, g, tol), tol)
    h = orthogonal_complement(sum_spaces(z, gp, tol), g, tol)

    gm = to_float(g.g)
    Lf = L if not L.exact else L.as_float()
    Q = linalg.orthonormalize(to_float(gp.basis), gm, tol)
    Hb = linalg.orthonormalize(to_float(h.basis), gm, tol)
    Zb = linalg.orthonormalize(to_float(z.basis), gm, tol)
    if Q.shape[0] % 2:
        raise DegenerateSplitting(f"commutator has odd dimension {Q.shape[0]}")

    if Q.shape[0] == 0:
        F = FlatStructure(Subspace(Hb, n), Subspace(Zb, n), Subspace(Q, n), Q, np.zeros((0, Hb.shape[0])))
    else:
        B = Lf.brackets(Hb.T, Q.T)  # [h_m, q_b]
        ops = np.einsum("an,nk,kmb->mab", Q, gm, B)  # ad_{h_m} on g' in the q-basis
        rng = np.random.default_rng(seed)
        x0 = rng.integers(-1000, 1001, size=Hb.shape[0]) / 1000.0
        while not np.any(x0):
            x0 = rng.integers(-1000, 1001, size=Hb.shape[0]) / 1000.0
        planes = rotation_planes(ops, x0, rng, tol)
        eps = np.array([v for uv in planes for v in uv]) @ Q
        eps = linalg.orthonormalize(eps, gm, tol)
        Bf = Lf.brackets(Hb.T, eps.T)
        p = eps.shape[0] // 2
        f = np.array([[eps[2 * i + 1] @ gm @ Bf[:, m, 2 * i] for m in range(Hb.shape[0])] for i in range(p)])
        F = FlatStructure(Subspace(Hb, n), Subspace(Zb, n), Subspace(Q, n), eps, f)

    rep = milnor_verify(L, g, F, verify_tol)
    if not rep.passed:
        raise FlathermError(f"constructed normal form failed verification: {rep.failed()}")
    return F


def rotation_planes(ops, x0, rng, tol=DEFAULT_TOL, tries=8):
    """Split R^k into 2-planes invariant under a commuting family of skew matrices.

    ``ops`` has shape (m, k, k).  Returns a list of orthonormal pairs (u, v)
    with ``A0 u = w v`` and ``w > 0``, where ``A0 = sum x0_m ops[m]``; pairs are
    ordered by decreasing w.
    """
    k = ops.shape[1]
    A0 = np.einsum("m,mab->ab", x0, ops)
    scale = max(1.0, np.max(np.abs(ops)))
    gap = max(np.sqrt(tol), 1e-8) * scale**2

    out = []
    for E in _clusters(A0, np.eye(k), gap):
        out.extend(_split_cluster(ops, A0, E, rng, gap, tries))
    weights = [v @ A0 @ u for u, v in out]
    order = sorted(range(len(out)), key=lambda i: -weights[i])
    return [out[i] for i in order]


def _clusters(A, basis, gap):
    """Eigenspaces of ``-A^2`` restricted to span(basis rows), grouped by gap."""
    Ar = basis @ A @ basis.T
    w, V = np.linalg.eigh(-Ar @ Ar)
    order = np.argsort(-w)
    w, V = w[order], V[:, order]
    groups, start = [], 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i - 1] - w[i] > gap:
            groups.append((V[:, start:i].T @ basis))
            start = i
    return groups


def _split_cluster(ops, A0, E, rng, gap, tries):
    if E.shape[0] == 2:
        return [_orient(A0, E[0])]
    for _ in range(tries):
        x = rng.integers(-1000, 1001, size=ops.shape[0]) / 1000.0
        A1 = np.einsum("m,mab->ab", x, ops)
        parts = _clusters(A1, E, gap)
        if len(parts) > 1:
            out = []
            for P in parts:
                out.extend(_split_cluster(ops, A0, P, rng, gap, tries))
            return out
    # every operator is a multiple of one complex structure on E: pair greedily
    out = []
    remaining = E.copy()
    while remaining.shape[0]:
        u, v = _orient(A0, remaining[0])
        out.append((u, v))
        proj = remaining - np.outer(remaining @ u, u) - np.outer(remaining @ v, v)
        remaining = linalg.row_basis(proj, 1e-8) if remaining.shape[0] > 2 else remaining[:0]
        if remaining.shape[0]:
            remaining = linalg.orthonormalize(remaining, np.eye(remaining.shape[1]))
    return out


def _orient(A0, u):
    u = u / np.linalg.norm(u)
    w = A0 @ u
    nw = np.linalg.norm(w)
    if nw == 0:
        raise DegenerateSplitting("generic element acts trivially on a plane of the commutator")
    return u, w / nw
