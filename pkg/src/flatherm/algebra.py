"""Real Lie algebras with a metric and an almost complex structure.

Basis indices are 0-based.  Structure constants are stored densely as
``c[k, i, j]`` with ``[x_i, x_j] = sum_k c[k, i, j] x_k``.  Vectors are 1-D
arrays of coefficients over the fixed basis; subspaces carry their basis as
the rows of a 2-D array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .errors import InputError, NotAComplexStructure
from .linalg import DEFAULT_TOL
from .scalars import as_exact, exact_identity, exact_zeros, is_exact, is_zero_defect, max_norm, to_float


def _frozen(arr):
    arr = as_exact(arr) if is_exact(arr) else np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _identity_like(n, exact):
    return exact_identity(n) if exact else np.eye(n)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Structure constants ``c[k, i, j]`` of a real Lie algebra."""

    c: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        c = np.asarray(self.c)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise InputError(f"structure constants must have shape (n, n, n), got {c.shape}", "brackets")
        if c.shape[0] < 2:
            raise InputError("dimension must be at least 2", "dim")
        object.__setattr__(self, "c", _frozen(c))
        if self.validate:
            skew = self.c + self.c.transpose(0, 2, 1)
            if not is_zero_defect(max_norm(skew), DEFAULT_TOL):
                raise InputError("structure constants are not antisymmetric", "brackets")

    @property
    def dim(self):
        return self.c.shape[0]

    @property
    def exact(self):
        return is_exact(self.c)

    @cached_property
    def nonzeros(self):
        return [(k, i, j, v) for (k, i, j), v in np.ndenumerate(self.c) if v != 0]

    def as_float(self):
        return LieAlgebra(to_float(self.c), validate=False)

    def bracket(self, u, v):
        """Bracket of two vectors (real or complexified coefficients)."""
        return self.brackets(np.asarray(u)[:, None], np.asarray(v)[:, None])[:, 0, 0]

    def brackets(self, U, V):
        """All brackets of the columns of U with the columns of V.

        Returns ``B`` with ``B[:, a, b] = [U[:, a], V[:, b]]``.
        """
        U = np.asarray(U)
        V = np.asarray(V)
        if self.exact and U.dtype == object and V.dtype == object:
            out = exact_zeros((self.dim, U.shape[1], V.shape[1]))
            for k, i, j, val in self.nonzeros:
                out[k] = out[k] + np.multiply.outer(U[i], V[j]) * val
            return out
        c = self._float_c
        return np.einsum("kij,ia,jb->kab", c, to_float(U), to_float(V), optimize=True)

    @cached_property
    def _float_c(self):
        return to_float(self.c)

    def ad(self, x):
        """Matrix of ``ad_x`` acting on coefficient column vectors."""
        return np.einsum("kij,i->kj", self.c, np.asarray(x))

    def ad_basis(self, i):
        return self.c[:, i, :]


@dataclass(frozen=True, eq=False)
class MetricTensor:
    """Inner product matrix; symmetric positive definite."""

    g: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        g = np.asarray(self.g)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InputError("metric must be a square matrix", "metric")
        object.__setattr__(self, "g", _frozen(g))
        if self.validate:
            if not is_zero_defect(max_norm(g - g.T), DEFAULT_TOL):
                raise InputError("metric is not symmetric", "metric")
            if not _positive_definite(g):
                raise InputError("metric is not positive definite", "metric")

    @property
    def dim(self):
        return self.g.shape[0]

    @property
    def exact(self):
        return is_exact(self.g)

    @classmethod
    def identity(cls, n, exact=True):
        return cls(_identity_like(n, exact))

    def inner(self, u, v):
        return u @ self.g @ v

    @cached_property
    def inverse(self):
        return linalg.inverse(self.g)


def _positive_definite(g):
    """All leading principal minors positive (exact: via pivots, float: Cholesky)."""
    if not is_exact(g):
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            return False
        return True
    A = np.array(g, dtype=object, copy=True)
    n = A.shape[0]
    for k in range(n):
        piv = A[k, k]
        if piv <= 0:
            return False
        for i in range(k + 1, n):
            f = A[i, k] / piv
            A[i, k:] = A[i, k:] - f * A[k, k:]
    return True


@dataclass(frozen=True, eq=False)
class AlmostComplexStructure:
    """Endomorphism J of the algebra, acting on column vectors.

    ``J^2 = -I`` is not enforced at construction so that defective inputs can
    still be measured; see :meth:`square_defect`.
    """

    J: np.ndarray

    def __post_init__(self):
        J = np.asarray(self.J)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise InputError("J must be a square matrix", "J")
        object.__setattr__(self, "J", _frozen(J))

    @property
    def dim(self):
        return self.J.shape[0]

    @property
    def exact(self):
        return is_exact(self.J)

    def square_defect(self):
        return max_norm(self.J @ self.J + _identity_like(self.dim, self.exact))

    def __call__(self, v):
        return self.J @ v


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace given by a basis stored as rows.

    ``orthonormal`` records that the basis is orthonormal for the metric the
    subspace was built against.
    """

    basis: np.ndarray
    ambient: int
    orthonormal: bool = False

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.size == 0:
            b = np.empty((0, self.ambient), dtype=b.dtype)
        object.__setattr__(self, "basis", _frozen(b.reshape(-1, self.ambient)))

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def exact(self):
        return is_exact(self.basis)

    @classmethod
    def span(cls, vectors, ambient, tol=DEFAULT_TOL):
        vectors = np.asarray(vectors)
        if vectors.size == 0:
            return cls(np.empty((0, ambient), dtype=vectors.dtype), ambient)
        return cls(linalg.row_basis(vectors.reshape(-1, ambient), tol), ambient)

    @classmethod
    def whole(cls, n, exact=True):
        return cls(_identity_like(n, exact), n)

    @classmethod
    def zero(cls, n, exact=True):
        return cls(np.empty((0, n), dtype=object if exact else float), n)

    def contains(self, v, tol=DEFAULT_TOL):
        stacked = np.vstack([self.basis, np.asarray(v)[None, :]])
        return linalg.rank(stacked, tol) == self.dim

    def gram(self, g):
        return self.basis @ np.asarray(g) @ self.basis.T

    def coordinates(self, v, tol=DEFAULT_TOL):
        """Coefficients of v in this basis (v must lie in the subspace)."""
        B = self.basis
        if is_exact(B) and is_exact(v):
            A = B @ B.T
            return linalg.solve(A, B @ v)
        coef, *_ = np.linalg.lstsq(to_float(B).T, to_float(v), rcond=None)
        return coef


def _coerce_pair(S, other):
    if S.exact and not is_exact(other):
        return to_float(S.basis), other
    if not S.exact and is_exact(other):
        return S.basis, to_float(other)
    return S.basis, other


def sum_spaces(S1, S2, tol=DEFAULT_TOL):
    B1, B2 = S1.basis, S2.basis
    if S1.exact != S2.exact:
        B1, B2 = to_float(B1), to_float(B2)
    return Subspace.span(np.vstack([B1, B2]), S1.ambient, tol)


def orthogonal_complement(S, g, tol=DEFAULT_TOL):
    """Complement of S with respect to the metric g."""
    gm = g.g if isinstance(g, MetricTensor) else np.asarray(g)
    B, gm = _coerce_pair(S, gm)
    n = S.ambient
    if S.dim == 0:
        return Subspace.whole(n, exact=is_exact(B) and is_exact(gm))
    return Subspace(linalg.nullspace(B @ gm, tol), n)


def intersect(S1, S2, tol=DEFAULT_TOL):
    n = S1.ambient
    B1, B2 = S1.basis, S2.basis
    if S1.exact != S2.exact:
        B1, B2 = to_float(B1), to_float(B2)
    exact = is_exact(B1)
    if S1.dim == 0 or S2.dim == 0:
        return Subspace.zero(n, exact)
    # a . B1 = b . B2  <=>  [B1^T | -B2^T] (a, b) = 0
    M = np.concatenate([B1.T, -B2.T], axis=1)
    ker = linalg.nullspace(M, tol)
    if ker.shape[0] == 0:
        return Subspace.zero(n, exact)
    vecs = ker[:, : S1.dim] @ B1
    return Subspace.span(vecs, n, tol)


def apply_J(S, J):
    Jm = J.J if isinstance(J, AlmostComplexStructure) else np.asarray(J)
    B, Jm = _coerce_pair(S, Jm)
    return Subspace((Jm @ B.T).T, S.ambient)


def same_span(S1, S2, tol=DEFAULT_TOL):
    if S1.dim != S2.dim:
        return False
    return sum_spaces(S1, S2, tol).dim == S1.dim


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def jacobi_tensor(L):
    """``Jac[m, i, j, k]``: component m of the cyclic sum over (i, j, k)."""
    c = L.c
    t = np.einsum("aij,mak->mijk", c, c, optimize=True)
    return t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)


def jacobi_defect(L):
    """Max-norm of all cyclic sums ``[[x_i,x_j],x_k] + cyclic``."""
    return max_norm(jacobi_tensor(L))


def is_unimodular(L, tol=DEFAULT_TOL):
    traces = np.array([sum(L.c[k, i, k] for k in range(L.dim)) for i in range(L.dim)], dtype=L.c.dtype)
    return is_zero_defect(max_norm(traces), tol)


def derived_algebra(L, tol=DEFAULT_TOL):
    n = L.dim
    vecs = [L.c[:, i, j] for i in range(n) for j in range(i + 1, n)]
    return Subspace.span(np.array(vecs, dtype=L.c.dtype), n, tol)


def center(L, tol=DEFAULT_TOL):
    n = L.dim
    # x central  <=>  sum_i x_i c[k, i, j] = 0 for all k, j
    M = L.c.transpose(0, 2, 1).reshape(n * n, n)
    return Subspace(linalg.nullspace(M, tol), n)


def is_abelian(L, tol=DEFAULT_TOL):
    return is_zero_defect(max_norm(L.c), tol)


def is_two_step_solvable(L, tol=DEFAULT_TOL):
    """Nonabelian with abelian derived algebra."""
    gp = derived_algebra(L, tol)
    if gp.dim == 0:
        return False
    B = gp.basis.T
    return is_zero_defect(max_norm(L.brackets(B, B)), tol)


def integrability_tensor(L, J):
    """``N[:, i, j] = [x,y] - [Jx,Jy] + J[Jx,y] + J[x,Jy]`` for x=x_i, y=x_j."""
    Jm = J.J if isinstance(J, AlmostComplexStructure) else np.asarray(J)
    c = L.c
    if is_exact(c) != is_exact(Jm):
        c, Jm = to_float(c), to_float(Jm)
        L = LieAlgebra(c, validate=False)
    I = _identity_like(L.dim, is_exact(Jm))
    t1 = L.brackets(Jm, Jm)
    t2 = L.brackets(Jm, I)
    t3 = L.brackets(I, Jm)
    return c - t1 + np.einsum("mk,kab->mab", Jm, t2 + t3)


def integrability_defect(L, J, tol=DEFAULT_TOL):
    J = J if isinstance(J, AlmostComplexStructure) else AlmostComplexStructure(J)
    sq = J.square_defect()
    if not is_zero_defect(sq, tol):
        raise NotAComplexStructure(f"J^2 + I has max-norm {sq}")
    return max_norm(integrability_tensor(L, J))


def compatibility_defect(g, J):
    gm = g.g if isinstance(g, MetricTensor) else np.asarray(g)
    Jm = J.J if isinstance(J, AlmostComplexStructure) else np.asarray(J)
    if is_exact(gm) != is_exact(Jm):
        gm, Jm = to_float(gm), to_float(Jm)
    return max_norm(Jm.T @ gm @ Jm - gm)


def skew_adjoint_defect(g, J):
    """Max-norm of ``<Jx, y> + <x, Jy>`` over basis pairs."""
    gm = g.g if isinstance(g, MetricTensor) else np.asarray(g)
    Jm = J.J if isinstance(J, AlmostComplexStructure) else np.asarray(J)
    if is_exact(gm) != is_exact(Jm):
        gm, Jm = to_float(gm), to_float(Jm)
    return max_norm(Jm.T @ gm + gm @ Jm)


def conjugate_basis(L, g, J, P):
    """Express (L, g, J) in the new basis whose vectors are the columns of P.

    Returns the transformed algebra, metric and J (J may be None).
    """
    P = np.asarray(P)
    Pinv = linalg.inverse(P)
    c = np.einsum("lk,kab,ai,bj->lij", Pinv, L.c, P, P, optimize=True)
    g2 = P.T @ g.g @ P
    J2 = None if J is None else AlmostComplexStructure(Pinv @ J.J @ P)
    return LieAlgebra(c), MetricTensor(g2), J2
