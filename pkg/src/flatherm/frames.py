"""Complex frames of type (1,0) and their structure constants.

For a frame ``e_1..e_n`` of ``g^{1,0}`` with dual coframe ``phi``::

    C[j, i, k] = phi_j([e_i, e_k])          (C^j_{ik})
    D[j, i, k] = conj(phi_i)([conj(e_j), e_k])   (D^j_{ik})

so that ``[e_i, e_j] = sum_k C^k_{ij} e_k`` and
``[e_i, conj e_j] = sum_k conj(D^i_{kj}) e_k - D^j_{ki} conj(e_k)``.
Frame vectors are stored as rows of complex coefficients over the real basis.
Exact frames live in Q(i, sqrt2) via :class:`~flatherm.scalars.ExactComplex`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from . import linalg
from .algebra import AlmostComplexStructure, LieAlgebra, MetricTensor
from .errors import DependentFrame, FlathermError, InputError
from .linalg import DEFAULT_TOL
from .scalars import ExactComplex, conj, is_exact, is_zero_defect, max_norm, to_complex_exact, to_float


@dataclass(frozen=True, eq=False)
class ComplexFrame:
    L: LieAlgebra
    g: MetricTensor
    J: AlmostComplexStructure
    e: np.ndarray  # (n, n_R) rows
    C: np.ndarray
    D: np.ndarray
    gmat: np.ndarray
    ginv: np.ndarray
    coframe: np.ndarray  # (2n, n_R): coordinates along (e, conj e)

    @property
    def n(self):
        return self.e.shape[0]

    @property
    def exact(self):
        return is_exact(self.e)

    def with_tables(self, C=None, D=None):
        """Copy of the frame with replaced C / D tables (no re-validation)."""
        return ComplexFrame(
            self.L, self.g, self.J, self.e,
            self.C if C is None else C,
            self.D if D is None else D,
            self.gmat, self.ginv, self.coframe,
        )


def _imag_unit(exact):
    return ExactComplex.imag_unit() if exact else 1j


def holomorphic_part(J, x, exact):
    """``(x - iJx)/sqrt2`` for each row x."""
    X = np.atleast_2d(np.asarray(x))
    Jm = J.J
    if exact:
        JX = (Jm @ X.T).T
        out = np.empty(X.shape, dtype=object)
        for idx in np.ndindex(X.shape):
            out[idx] = ExactComplex(0, mpq(X[idx]) / 2, 0, -mpq(JX[idx]) / 2)
        return out
    X = to_float(X)
    return (X - 1j * (to_float(Jm) @ X.T).T) / np.sqrt(2.0)


def complexify(L, g, J, realvectors, tol=DEFAULT_TOL, exact=None):
    """Frame ``e_k = (x_k - iJx_k)/sqrt2`` built from real vectors x_k."""
    X = np.asarray(realvectors)
    if exact is None:
        exact = L.exact and g.exact and J.exact and is_exact(X)
    return frame_from_vectors(L, g, J, holomorphic_part(J, X, exact), tol=tol)


def basis_frame(L, g, J, indices, tol=DEFAULT_TOL):
    """Frame from basis vectors ``x_i`` for the given indices."""
    n_r = L.dim
    X = np.zeros((len(indices), n_r), dtype=object if (L.exact and J.exact) else float)
    for row, i in enumerate(indices):
        X[row] = 0
        X[row, i] = 1
    if X.dtype == object:
        X = np.vectorize(mpq, otypes=[object])(X)
    return complexify(L, g, J, X, tol=tol)


def j_adapted_indices(J, tol=DEFAULT_TOL):
    """Greedy choice of basis indices whose (1,0)-parts form a frame."""
    n_r = J.dim
    chosen, span = [], []
    Jm = J.J
    for i in range(n_r):
        x = np.zeros(n_r, dtype=Jm.dtype)
        x[:] = 0
        x[i] = 1
        cand = span + [x, Jm @ x]
        if linalg.rank(np.array(cand), tol) == len(cand):
            chosen.append(i)
            span = cand
        if 2 * len(chosen) == n_r:
            break
    return chosen


def standard_frame(L, g, J, tol=DEFAULT_TOL):
    """A frame built from a J-adapted subset of the real basis."""
    return basis_frame(L, g, J, j_adapted_indices(J, tol), tol=tol)


def unitary_frame(L, g, J, tol=DEFAULT_TOL):
    """Float frame with ``gmat = I``: the standard frame orthonormalized by Cholesky."""
    F = standard_frame(L, g, J, tol)
    E = to_float(F.e).astype(complex)
    R = np.linalg.cholesky(to_float(F.gmat).astype(complex))  # gmat = R R^H
    return frame_from_vectors(L, g, J, np.linalg.solve(R, E), tol=tol)


def frame_from_vectors(L, g, J, E, tol=DEFAULT_TOL, check=True):
    """Build the frame, its coframe, C, D and the Hermitian metric matrix."""
    n_r = L.dim
    if n_r % 2:
        raise InputError("a complex frame needs even real dimension", "dim")
    n = n_r // 2
    E = np.asarray(E)
    if E.shape != (n, n_r):
        raise InputError(f"need {n} frame vectors of length {n_r}, got shape {E.shape}", "vectors")
    exact = is_exact(E) and L.exact and g.exact and J.exact
    if exact:
        E = to_complex_exact(E)
        c_alg, gm, Jm = L, to_complex_exact(g.g), to_complex_exact(J.J)
    else:
        E = to_float(E).astype(complex)
        c_alg = L if not L.exact else L.as_float()
        gm, Jm = to_float(g.g), to_float(J.J)
    if check:
        i_unit = _imag_unit(exact)
        d = max_norm((Jm @ E.T).T - E * i_unit)
        if not is_zero_defect(d, tol):
            raise InputError(f"frame vectors are not of type (1,0) (defect {d})", "vectors")

    Ebar = conj(E)
    M = np.concatenate([E, Ebar], axis=0).T  # columns: e_1..e_n, conj e_1..conj e_n
    try:
        coframe = linalg.inverse(M)
    except np.linalg.LinAlgError as exc:
        raise DependentFrame("the (1,0)-parts are linearly dependent") from exc
    if not exact and np.linalg.cond(M) > 1 / tol:
        raise DependentFrame("the (1,0)-parts are numerically dependent")

    Bee = c_alg.brackets(E.T, E.T)  # [e_i, e_k]
    Bbe = c_alg.brackets(Ebar.T, E.T)  # [conj e_j, e_k]
    C = np.einsum("jm,mik->jik", coframe[:n], Bee)
    D = np.einsum("im,mjk->jik", coframe[n:], Bbe)
    gmat = E @ gm @ Ebar.T
    ginv = linalg.inverse(gmat)
    F = ComplexFrame(L, g, J, E, C, D, gmat, ginv, coframe)
    if check:
        rec = reconstruction_defect(F)
        if not is_zero_defect(rec, tol):
            raise FlathermError(f"C/D tables do not reproduce the brackets (defect {rec}); is J integrable?")
    return F


def reconstruction_defect(F):
    """Compare the brackets predicted by C, D with the actual ones."""
    E = F.e
    Ebar = conj(E)
    L = F.L if F.exact else (F.L.as_float() if F.L.exact else F.L)
    Bee = L.brackets(E.T, E.T)
    Beb = L.brackets(E.T, Ebar.T)  # [e_i, conj e_j]
    pred_ee = np.einsum("kij,km->mij", F.C, E)
    # [e_i, conj e_j] = sum_k conj(D^i_{kj}) e_k - D^j_{ki} conj(e_k)
    pred_eb = np.einsum("ikj,km->mij", conj(F.D), E) - np.einsum("jki,km->mij", F.D, Ebar)
    return max(max_norm(Bee - pred_ee), max_norm(Beb - pred_eb), key=float)


def structure_equation_defect(F):
    """Both sides of the first structure equation on all pairs of ``{e, conj e}``.

    Uses ``dphi(X, Y) = -phi([X, Y])`` and
    ``(a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X)``; the right-hand side is
    ``-1/2 sum C^i_{jk} phi_j ^ phi_k - sum conj(D^j_{ik}) phi_j ^ conj(phi_k)``.
    """
    n = F.n
    E = F.e
    basis = np.concatenate([E, conj(E)], axis=0).T  # n_R x 2n
    L = F.L if F.exact else (F.L.as_float() if F.L.exact else F.L)
    B = L.brackets(basis, basis)
    lhs = -np.einsum("im,mxy->ixy", F.coframe[:n], B)
    coords = F.coframe @ basis  # identity up to round-off; kept general
    phi, phibar = coords[:n], coords[n:]
    half = mpq(1, 2) if F.exact else 0.5
    cc = np.einsum("ijk,jx,ky->ixy", F.C, phi, phi)
    t1 = -(cc - cc.transpose(0, 2, 1)) * half
    dd = np.einsum("jik,jx,ky->ixy", conj(F.D), phi, phibar)
    t2 = -(dd - dd.transpose(0, 2, 1))
    return max_norm(lhs - t1 - t2)


def bianchi_families(C, D):
    """The three identity families (arrays indexed [i, j, k, l])."""
    Db = conj(D)
    f1 = (
        np.einsum("tij,ltk->ijkl", C, C)
        + np.einsum("tjk,lti->ijkl", C, C)
        + np.einsum("tki,ltj->ijkl", C, C)
    )
    f2 = (
        np.einsum("tik,ljt->ijkl", C, D)
        + np.einsum("tji,ltk->ijkl", D, D)
        - np.einsum("tjk,lti->ijkl", D, D)
    )
    f3 = (
        np.einsum("tik,tjl->ijkl", C, Db)
        - np.einsum("jtk,itl->ijkl", C, Db)
        + np.einsum("jti,ktl->ijkl", C, Db)
        - np.einsum("lti,kjt->ijkl", D, Db)
        + np.einsum("ltk,ijt->ijkl", D, Db)
    )
    return f1, f2, f3


def bianchi_defect(F):
    """Max-norms of the three first-Bianchi families for the frame's C, D."""
    return tuple(max_norm(f) for f in bianchi_families(F.C, F.D))


def tables_bracket(C, D):
    """Structure constants on ``g^C`` (basis e, conj e) defined by C and D.

    Index layout matches :class:`~flatherm.algebra.LieAlgebra`:
    ``out[k, a, b]`` is the k-th coefficient of the bracket of basis
    vectors a and b.  Used as an oracle independent of the Bianchi formulas.
    """
    n = C.shape[0]
    exact = is_exact(C)
    out = np.empty((2 * n, 2 * n, 2 * n), dtype=object if exact else complex)
    out.fill(ExactComplex() if exact else 0)
    Cb, Db = conj(C), conj(D)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                out[k, i, j] = C[k, i, j]
                out[n + k, n + i, n + j] = Cb[k, i, j]
                # [e_i, conj e_j]
                out[k, i, n + j] = Db[i, k, j]
                out[n + k, i, n + j] = -D[j, k, i]
                out[k, n + j, i] = -Db[i, k, j]
                out[n + k, n + j, i] = D[j, k, i]
    return out


def tables_jacobi_defect(C, D):
    c = tables_bracket(C, D)
    t = np.einsum("aij,mak->mijk", c, c)
    return max_norm(t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2))


def transform_tables(C, D, A):
    """C, D in the frame ``e'_i = sum_p A[i, p] e_p``."""
    Ainv = linalg.inverse(A)
    C2 = np.einsum("ip,kq,mpq,mj->jik", A, A, C, Ainv)
    D2 = np.einsum("jq,kr,qmr,mi->jik", conj(A), A, D, conj(Ainv))
    return C2, D2
