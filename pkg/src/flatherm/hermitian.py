"""Hermitian geometry of 2-step solvable Lie algebras.

Frame indices follow one convention throughout: with ``r, s`` from the
decomposition, ``[0, r)`` spans ``(g'_J)^{1,0}``, ``[r, s)`` the middle block
over ``V`` and ``[s, n)`` spans ``W^{1,0}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from . import linalg
from .algebra import (
    AlmostComplexStructure,
    LieAlgebra,
    MetricTensor,
    Subspace,
    apply_J,
    derived_algebra,
    intersect,
    is_abelian,
    is_two_step_solvable,
    orthogonal_complement,
    sum_spaces,
)
from .errors import FlathermError, NotFlat, NotTwoStepSolvable
from .frames import ComplexFrame, frame_from_vectors, holomorphic_part, j_adapted_indices
from .linalg import DEFAULT_TOL
from .riemannian import flatness_defect
from .scalars import ExactComplex, conj, exact_sqrt, is_exact, is_zero_defect, max_norm, to_float


@dataclass(frozen=True, eq=False)
class HermitianDecomposition:
    gprime: Subspace
    gprimeJ: Subspace
    U: Subspace
    V: Subspace
    Vprime: Subspace
    W: Subspace
    r: int
    s: int
    n: int


def _float_triple(L, g, J):
    return (
        L.as_float() if L.exact else L,
        MetricTensor(to_float(g.g), validate=False) if g.exact else g,
        AlmostComplexStructure(to_float(J.J)) if J.exact else J,
    )


def _orthogonal(S1, S2, g, tol):
    if S1.dim == 0 or S2.dim == 0:
        return True
    B1, B2, gm = S1.basis, S2.basis, g.g
    if not (is_exact(B1) and is_exact(B2) and is_exact(gm)):
        B1, B2, gm = to_float(B1), to_float(B2), to_float(gm)
    return is_zero_defect(max_norm(B1 @ gm @ B2.T), tol)


def _j_invariant(S, J, tol):
    return S.dim == 0 or sum_spaces(S, apply_J(S, J), tol).dim == S.dim


def decompose(L, g, J, tol=DEFAULT_TOL):
    """Split ``g = g'_J + U + W`` and ``g' = g'_J + V``, ``U = V + V'``."""
    n_r = L.dim
    exact = L.exact and g.exact and J.exact
    if not exact:
        L, g, J = _float_triple(L, g, J)
    if is_abelian(L, tol):
        z = Subspace.zero(n_r, exact)
        W = Subspace.whole(n_r, exact)
        return HermitianDecomposition(z, z, z, z, z, W, 0, 0, n_r // 2)
    if not is_two_step_solvable(L, tol):
        raise NotTwoStepSolvable("the derived algebra is not abelian")
    gp = derived_algebra(L, tol)
    Jgp = apply_J(gp, J)
    gpJ = intersect(gp, Jgp, tol)
    S = sum_spaces(gp, Jgp, tol)
    W = orthogonal_complement(S, g, tol)
    perp_gpJ = orthogonal_complement(gpJ, g, tol)
    U = intersect(perp_gpJ, S, tol)
    V = intersect(perp_gpJ, gp, tol)
    Vp = intersect(orthogonal_complement(V, g, tol), U, tol)
    n = n_r // 2
    r = gpJ.dim // 2
    s = n - W.dim // 2
    D = HermitianDecomposition(gp, gpJ, U, V, Vp, W, r, s, n)
    _check_decomposition(D, g, J, n_r, tol)
    return D


def _check_decomposition(D, g, J, n_r, tol):
    problems = []
    if D.gprimeJ.dim + D.U.dim + D.W.dim != n_r:
        problems.append("g'_J + U + W does not fill the algebra")
    if D.gprimeJ.dim + D.V.dim != D.gprime.dim:
        problems.append("g'_J + V differs from g'")
    if D.V.dim + D.Vprime.dim != D.U.dim:
        problems.append("V + V' differs from U")
    if D.V.dim != D.s - D.r:
        problems.append("dim V differs from s - r")
    for name, S in (("g'_J", D.gprimeJ), ("U", D.U), ("W", D.W)):
        if not _j_invariant(S, J, tol):
            problems.append(f"{name} is not J-invariant")
    for a, b, S1, S2 in (("g'_J", "U", D.gprimeJ, D.U), ("g'_J", "W", D.gprimeJ, D.W),
                         ("U", "W", D.U, D.W), ("V", "V'", D.V, D.Vprime)):
        if not _orthogonal(S1, S2, g, tol):
            problems.append(f"{a} is not orthogonal to {b}")
    if problems:
        raise FlathermError("; ".join(problems))


@dataclass(frozen=True, eq=False)
class AdmissibleFrame:
    frame: ComplexFrame
    r: int
    s: int
    decomposition: HermitianDecomposition
    epsilon: np.ndarray  # real orthonormal basis of V (rows)

    @property
    def n(self):
        return self.frame.n

    @property
    def G(self):
        return self.frame.gmat[self.r:self.s, self.r:self.s]

    @property
    def H(self):
        """Real skew matrix with ``G = I + iH``."""
        G = self.G
        if is_exact(G):
            return np.array([[v.imag for v in row] for row in G], dtype=object).reshape(G.shape)
        return G.imag


def _mixed_basis(S, rng):
    """Basis of S after a random unimodular integer recombination."""
    B = S.basis
    k = B.shape[0]
    if rng is None or k == 0:
        return B
    P = np.eye(k, dtype=int)
    for i in range(k):
        for j in range(i + 1, k):
            P[i, j] = int(rng.integers(-1, 2))
    P = P[rng.permutation(k)]
    if is_exact(B):
        P = np.vectorize(mpq, otypes=[object])(P)
    return P @ B


def _orth_step(w, ortho, gm):
    for u in ortho:
        w = w - ((u @ gm @ w) / (u @ gm @ u)) * u
    return w


def _representatives(rows, gm, Jm, paired, tol):
    """Orthogonal (unnormalized) representatives; J-paired if requested."""
    if not is_exact(rows):
        return _float_representatives(rows, gm, Jm, paired, tol)
    ortho, reps = [], []
    for v in rows:
        w = _orth_step(v, ortho, gm)
        if all(x == 0 for x in w):
            continue
        reps.append(w)
        ortho.append(w)
        if paired:
            ortho.append(Jm @ w)
    return reps


def _float_representatives(rows, gm, Jm, paired, tol):
    # pivoted: the block dimension fixes the count, so a J that preserves the
    # block only to ~1e-11 cannot leave a spurious residual above tol
    target = len(rows) // 2 if paired else len(rows)
    norms = [np.sqrt(max(v @ gm @ v, 0.0)) for v in rows]
    ortho, reps = [], []
    while len(reps) < target:
        cand = [_orth_step(_orth_step(v, ortho, gm), ortho, gm) for v in rows]
        rel = [np.sqrt(max(w @ gm @ w, 0.0)) / max(1.0, n0) for w, n0 in zip(cand, norms)]
        best = int(np.argmax(rel))
        if rel[best] <= tol:
            raise FlathermError(f"block basis degenerate after {len(reps)} of {target} representatives")
        w = cand[best]
        reps.append(w)
        ortho.append(w)
        if paired:
            ortho.append(Jm @ w)
    return reps


def _exact_unit_hol(w, gm, Jm):
    """``(w - iJw) / (sqrt2 |w|)`` in Q(i, sqrt2), or None."""
    root = exact_sqrt(w @ gm @ w)
    if root is None:
        return None, None
    scale = (ExactComplex.sqrt2() * root).inverse()
    Jw = Jm @ w
    e = np.array([scale * ExactComplex(a, 0, -b, 0) for a, b in zip(w, Jw)], dtype=object)
    eps = np.array([x * root.inverse() for x in w], dtype=object)
    return e, eps


def admissible_frame(L, g, J, seed=None, tol=DEFAULT_TOL, decomposition=None):
    """Admissible frame: unitary on g'_J and W, ``(eps - iJ eps)/sqrt2`` on V.

    Exact whenever every Gram-Schmidt norm is a rational or rational multiple
    of sqrt2; otherwise the whole frame is computed in floating point.
    """
    D = decomposition if decomposition is not None else decompose(L, g, J, tol)
    rng = None if seed is None else np.random.default_rng(seed)
    blocks = [(D.gprimeJ, True), (D.V, False), (D.W, True)]
    bases = [_mixed_basis(S, rng) for S, _ in blocks]

    exact = L.exact and g.exact and J.exact and all(is_exact(b) or b.shape[0] == 0 for b in bases)
    if exact:
        gm, Jm = g.g, J.J
        E, eps = [], []
        for (S, paired), B in zip(blocks, bases):
            for w in _representatives(B, gm, Jm, paired, tol):
                e, ep = _exact_unit_hol(w, gm, Jm)
                if e is None:
                    exact = False
                    break
                E.append(e)
                if not paired:
                    eps.append(ep)
            if not exact:
                break
    if not exact:
        Lf, gf, Jf = _float_triple(L, g, J)
        gm, Jm = gf.g, Jf.J
        E, eps = [], []
        for (S, paired), B in zip(blocks, bases):
            for w in _representatives(to_float(B), gm, Jm, paired, tol):
                w = w / np.sqrt(w @ gm @ w)
                E.append(holomorphic_part(Jf, w, False)[0])
                if not paired:
                    eps.append(w)
        L, g, J = Lf, gf, Jf
    n = L.dim // 2
    if len(E) != n:
        raise FlathermError(f"admissible frame construction produced {len(E)} of {n} vectors")
    F = frame_from_vectors(L, g, J, np.array(E), tol=tol)
    eps_arr = np.array(eps, dtype=object if exact else float).reshape(len(eps), L.dim)
    AF = AdmissibleFrame(F, D.r, D.s, D, eps_arr)
    _check_admissible(AF, tol)
    return AF


def _check_admissible(AF, tol):
    F, r, s = AF.frame, AF.r, AF.s
    gmat = F.gmat
    one = ExactComplex(1) if F.exact else 1.0
    eye = np.empty((F.n, F.n), dtype=object if F.exact else complex)
    eye.fill(ExactComplex() if F.exact else 0)
    for i in range(F.n):
        eye[i, i] = one
    diff = gmat - eye
    unitary = max(max_norm(diff[:r, :r]), max_norm(diff[s:, s:]), key=float)
    offblock = max(max_norm(gmat[:r, r:]), max_norm(gmat[r:s, s:]), key=float)
    G = AF.G
    if F.exact:
        re_part = np.array([[v.real for v in row] for row in G], dtype=object).reshape(G.shape)
        H = AF.H
    else:
        re_part, H = G.real, G.imag
    mid = max(max_norm(re_part - np.eye(s - r) if not F.exact else re_part - _rat_eye(s - r)),
              max_norm(H + H.T), key=float) if s > r else 0
    for name, d in (("unitary blocks", unitary), ("block orthogonality", offblock), ("middle block I + iH", mid)):
        if not is_zero_defect(d, tol):
            raise FlathermError(f"admissible frame check failed: {name} (defect {d})")


def _rat_eye(k):
    out = np.empty((k, k), dtype=object)
    out.fill(mpq(0))
    for i in range(k):
        out[i, i] = mpq(1)
    return out


def _slices(r, s, n):
    return slice(0, r), slice(r, s), slice(s, n)


def lemma2_terms(AF):
    """Every vanishing quantity of the 2-step solvable constraint table."""
    F = AF.frame
    C, D = F.C, F.D
    I, A, B = _slices(AF.r, AF.s, F.n)
    Cb = conj(C)
    Db = conj(D)
    return {
        "C^*_ij": C[:, I, I],
        "C^alpha_**": C[A, :, :],
        "C^a_**": C[B, :, :],
        "D^*_a*": D[:, B, :],
        "D^i_*j": D[I, :, I],
        "D^alpha_*j": D[A, :, I],
        "D^i_alpha,beta": D[I, A, A],
        # C^j_{i alpha} = -conj(D^i_{j alpha})
        "C^j_i,alpha": C[I, I, A] + np.transpose(Db[I, I, A], (1, 0, 2)),
        # C^x_{alpha beta} = conj(D^beta_{x alpha}) - conj(D^alpha_{x beta})
        "C^*_alpha,beta": C[:, A, A] - np.transpose(Db[A, :, A], (1, 2, 0)) + np.transpose(Db[A, :, A], (1, 0, 2)),
        # conj(D^x_{alpha y}) = -D^y_{alpha x}
        "D^x_alpha,y": Db[:, A, :] + np.transpose(D[:, A, :], (2, 1, 0)),
    }


def lemma2_defect(AF):
    return max((max_norm(v) for v in lemma2_terms(AF).values()), key=float, default=0)


@dataclass(frozen=True, eq=False)
class ChernTorsion:
    T: np.ndarray

    @property
    def norm(self):
        return max_norm(self.T)

    def antisymmetry_defect(self):
        return max_norm(self.T + self.T.transpose(0, 2, 1))


def chern_torsion(F, tol=DEFAULT_TOL):
    """Torsion components from the closed formula in C, D and the metric."""
    C, D, g, gi = F.C, F.D, F.gmat, F.ginv
    T = (
        -C
        - np.einsum("mlk,mj,il->jik", D, gi, g)
        + np.einsum("mli,mj,kl->jik", D, gi, g)
    )
    out = ChernTorsion(T)
    d = out.antisymmetry_defect()
    if not is_zero_defect(d, tol):
        raise FlathermError(f"torsion is not antisymmetric (defect {d})")
    return out


def _frame_algebra(F):
    return F.L if (F.exact or not F.L.exact) else F.L.as_float()


def chern_connection_oracle(F):
    """Torsion of the connection built from its defining properties.

    ``nabla_{conj e_j} e_i`` is the (1,0)-part of ``[conj e_j, e_i]``;
    metric compatibility with ``nabla conj(X) = conj(nabla X)`` then fixes
    ``nabla_{e_k} e_i``.  Uses only real brackets, J and g, never C or D.
    """
    n = F.n
    E = F.e
    Eb = conj(E)
    L = _frame_algebra(F)
    exact = F.exact
    if exact:
        Jm = np.vectorize(ExactComplex.coerce, otypes=[object])(F.J.J)
        half_i = ExactComplex(0, 0, mpq(1, 2), 0)
        half = ExactComplex(mpq(1, 2))
    else:
        Jm = to_float(F.J.J)
        half_i, half = 0.5j, 0.5
    phi = F.coframe[:n]

    def hol_coords(vectors):  # columns -> e-coordinates of their (1,0)-parts
        v10 = vectors * half - (Jm @ vectors) * half_i
        return phi @ v10

    Bbe = L.brackets(Eb.T, E.T)  # [conj e_j, e_i]
    theta = np.stack([hol_coords(Bbe[:, j, :]) for j in range(n)], axis=1)  # theta[p, j, i]
    gmat = F.gmat
    # sum_m Gamma[m, k, i] g_{m lbar} = -sum_p conj(theta[p, k, l]) g_{i pbar}
    rhs = -np.einsum("pkl,ip->lki", conj(theta), gmat)
    sol = linalg.solve(gmat.T, rhs.reshape(n, n * n))
    Gamma = sol.reshape(n, n, n)  # Gamma[m, k, i]: nabla_{e_k} e_i
    Bee = L.brackets(E.T, E.T)
    br = phi @ Bee.reshape(L.dim, n * n)
    br = br.reshape(n, n, n)
    T = Gamma.transpose(0, 1, 2) - Gamma.transpose(0, 2, 1) - br
    return ChernTorsion(T)


def torsion_in_frame(T, A):
    """Components in ``e'_i = sum_p A[i, p] e_p``: T'^j_{ik} = A_ip A_kq T^m_pq Ainv_mj."""
    Ainv = linalg.inverse(A)
    # one index at a time; the single four-operand einsum is O(n^6) on object arrays
    S = np.einsum("mpq,mj->jpq", T, Ainv)
    S = np.einsum("ip,jpq->jiq", A, S)
    return np.einsum("kq,jiq->jik", A, S)


def _random_frame(L, g, J, rng, tol, reference=None):
    """A second frame: integer recombinations when exact, a well-conditioned
    random transform of ``reference`` otherwise."""
    n_r = L.dim
    n = n_r // 2
    exact = L.exact and g.exact and J.exact
    if not exact and reference is not None:
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        Q, R = np.linalg.qr(Z)
        Q = Q * (np.diag(R) / np.abs(np.diag(R)))
        A = Q * rng.uniform(0.5, 2.0, size=n)[None, :]
        return frame_from_vectors(L, g, J, A @ reference.e, tol=tol)
    Jm = J.J
    idx = j_adapted_indices(J, tol)
    X = np.zeros((n, n_r), dtype=object if exact else float)
    X.fill(mpq(0) if exact else 0.0)
    for row, i in enumerate(idx):
        X[row, i] = mpq(1) if exact else 1.0
    Y = np.concatenate([X, (Jm @ X.T).T], axis=0)
    for _ in range(50):
        R = rng.integers(-2, 3, size=(n, 2 * n))
        if exact:
            R = np.vectorize(mpq, otypes=[object])(R)
        X2 = R @ Y
        try:
            return frame_from_vectors(L, g, J, holomorphic_part(J, X2, exact), tol=tol)
        except FlathermError:
            continue
    raise FlathermError("could not draw an independent random frame")


def standard_hermitian_frame(L, g, J, tol=DEFAULT_TOL):
    """Exact standard frame, or in float mode its unitary orthonormalization
    (the standard frame can be ill-conditioned for a J found numerically)."""
    from .frames import standard_frame, unitary_frame

    if L.exact and g.exact and J.exact:
        return standard_frame(L, g, J, tol)
    return unitary_frame(L, g, J, tol)


def kaehler_defect(L, g, J, seed=0, tol=DEFAULT_TOL):
    """Max-norm of the torsion; the verdict is re-derived in a random frame."""
    from .algebra import integrability_defect

    integ = integrability_defect(L, J, tol)
    if not is_zero_defect(integ, tol):
        raise FlathermError(f"J is not integrable (defect {integ})")
    F1 = standard_hermitian_frame(L, g, J, tol)
    T1 = chern_torsion(F1, tol).T
    F2 = _random_frame(L, g, J, np.random.default_rng(seed), tol, reference=F1)
    T2 = chern_torsion(F2, tol).T
    # transform frame-2 components back to frame 1
    A = F1.e @ F2.coframe[: F2.n].T  # e1_i = sum_p A[i,p] e2_p
    if F1.exact != F2.exact:
        A, T2 = to_float(A), to_float(T2)
    back = torsion_in_frame(T2, A)
    diff = max_norm((T1 if is_exact(back) else to_float(T1)) - back)
    scale = max(1.0, float(max_norm(T1)))
    if not is_zero_defect(diff if is_exact(back) else float(diff) / scale, max(tol, 1e-9)):
        raise FlathermError(f"torsion does not transform tensorially between frames (defect {diff})")
    d1, d2 = max_norm(T1), max_norm(T2)
    if is_zero_defect(d1, tol) != is_zero_defect(d2, tol):
        raise FlathermError("Kaehler verdict depends on the frame")
    return d1


@dataclass(frozen=True, eq=False)
class ProofReport:
    defects: dict
    r: int
    s: int
    exact: bool
    G: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)
    A: list = field(repr=False)
    B: list = field(repr=False)

    def passed(self, tol=DEFAULT_TOL):
        return all(is_zero_defect(v, tol) for v in self.defects.values())

    def failed(self, tol=DEFAULT_TOL):
        return [k for k, v in self.defects.items() if not is_zero_defect(v, tol)]


def _mx(*arrays):
    return max((max_norm(a) for a in arrays), key=float, default=mpq(0))


def proof_identities(AF, L, g):
    """Evaluate the identity families of the flat-implies-Kaehler argument."""
    F = AF.frame
    n, r, s = F.n, AF.r, AF.s
    I, A_, B_ = _slices(r, s, n)
    C, D, gm, gi = F.C, F.D, F.gmat, F.ginv
    Cb, Db = conj(C), conj(D)
    exact = F.exact
    i_unit = ExactComplex.imag_unit() if exact else 1j
    out = {}

    # h + z = (g')^perp acts by skew-adjoint derivations
    perp = orthogonal_complement(AF.decomposition.gprime, g)
    Lr = L if (L.exact and perp.exact and g.exact) else (L.as_float() if L.exact else L)
    gmr = g.g if (L.exact and perp.exact and g.exact) else to_float(g.g)
    basis = perp.basis if is_exact(gmr) else to_float(perp.basis)
    skew = [gmr @ Lr.ad(z) + (gmr @ Lr.ad(z)).T for z in basis]
    out["complement_skew_adjoint"] = _mx(*skew)

    # v_alpha = sum_beta g^{alpha-bar beta} e_beta, as coefficients over e
    vcoef = np.zeros((s - r, n), dtype=object if exact else complex)
    vcoef.fill(ExactComplex() if exact else 0)
    vcoef[:, A_] = gi[A_, A_]

    out["complement_abelian_vanishing"] = _mx(C[:, B_, B_], D[B_, :, B_], D[A_, :, B_])
    # C^t_{v_alpha a} = -conj(D^a_{t v_alpha})
    c_va = np.einsum("ai,tib->tab", vcoef, C[:, :, B_])
    d_va = np.einsum("ak,btk->tab", vcoef, D[B_, :, :])
    # C^t_{v_alpha v_beta} = conj(D^{v_alpha}_{t v_beta}) - conj(D^{v_beta}_{t v_alpha})
    c_vv = np.einsum("ai,bk,tik->tab", vcoef, vcoef, C)
    d_vv = np.einsum("aj,bk,jtk->tab", conj(vcoef), vcoef, D)
    out["complement_abelian_mixed"] = _mx(c_va + conj(d_va), c_vv - conj(d_vv) + conj(d_vv.transpose(0, 2, 1)))

    def d_sym(rows):  # sum_t D^c_{tx} g_{y tbar} + D^c_{ty} g_{x tbar}
        t = np.einsum("ctx,yt->cxy", D[rows], gm)
        return t + t.transpose(0, 2, 1)

    eskew_a = d_sym(B_)
    eskew_b = np.einsum("txa,ty->axy", C[:, :, B_], gm) + np.einsum("yta,xt->axy", D[:, :, B_], gm)
    out["w_skew_adjoint"] = _mx(eskew_a, eskew_b)
    out["v_skew_adjoint_first"] = _mx(d_sym(A_))
    # sum_t (C^t_{alpha x} + conj(D^x_{t alpha})) g_{t ybar} - (conj(C^t_{alpha y}) + D^y_{t alpha}) g_{x tbar}
    left = C[:, A_, :] + np.transpose(Db[:, :, A_], (1, 2, 0))
    right = Cb[:, A_, :] + np.transpose(D[:, :, A_], (1, 2, 0))
    out["v_skew_adjoint_second"] = _mx(
        np.einsum("tax,ty->axy", left, gm) - np.einsum("tay,xt->axy", right, gm)
    )
    # D^a_{ij} + D^a_{ji} and D^a_{i alpha} + sum_beta D^a_{beta i} g_{alpha betabar}
    dij = D[B_, I, I]
    out["w_skew_restricted"] = _mx(
        dij + dij.transpose(0, 2, 1),
        D[B_, I, A_] + np.einsum("cbi,ab->cia", D[B_, A_, I], gm[A_, A_]),
    )
    out["w_rows_vanish"] = _mx(D[B_])
    out["v_rows_vanish"] = _mx(D[A_])

    Dm = D[A_, A_, A_]  # Dm[gamma, alpha, beta] = D^gamma_{alpha beta}
    out["middle_symmetry"] = _mx(Dm - Dm.transpose(2, 1, 0), Dm + conj(Dm))
    G = gm[A_, A_]
    Amats = [np.array(i_unit * Dm[:, :, c].T) for c in range(s - r)]  # A_gamma[alpha, beta] = i D^beta_{alpha gamma}
    Bmats = [np.array(i_unit * Dm[:, a, :].T) for a in range(s - r)]  # B_alpha[beta, gamma] = i D^gamma_{alpha beta}
    out["middle_gram_skew"] = _mx(*[G @ Ag + (G @ Ag).T for Ag in Amats])
    out["middle_commute"] = _mx(*[Ba @ Bb - Bb @ Ba for Ba in Bmats for Bb in Bmats])
    out["c_equals_minus_d_w"] = _mx(C[I, I, B_] + D[I, I, B_])
    out["c_equals_minus_d_v"] = _mx(C[I, I, A_] + D[I, I, A_])
    return out, G, Amats, Bmats


def proof_suite(L, g, J, seed=None, tol=DEFAULT_TOL):
    fd = flatness_defect(L, g)
    if not is_zero_defect(fd, tol):
        raise NotFlat(f"metric is not flat (curvature defect {fd})")
    AF = admissible_frame(L, g, J, seed=seed, tol=tol)
    defects, G, Amats, Bmats = proof_identities(AF, L, g)
    return ProofReport(defects, AF.r, AF.s, AF.frame.exact, G, AF.H, Amats, Bmats)
