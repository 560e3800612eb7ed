"""Seeded random Hermitian Lie algebras and the bundled small examples.

All generators return ``(L, g, J)`` with exact rational data.  Families:

* realifications of complex Lie algebras with ``J = i``: ``sl2(C)``
  (semisimple), the complex Heisenberg and affine algebras, a filiform
  nilpotent algebra and the 3-step solvable oscillator-type ``osc``;
* almost-abelian ``R x |x n`` with ``Jx`` in ``n`` (2-step solvable);
* Heisenberg plus a line (nilpotent, not Kaehler);
* direct sums of the above;

followed by a random rational change of basis and a random compatible
metric ``A + J^T A J``.
"""

from __future__ import annotations

import numpy as np
from gmpy2 import mpq

from .algebra import AlmostComplexStructure, LieAlgebra, MetricTensor, conjugate_basis
from .scalars import exact_identity, exact_zeros

__all__ = [
    "e2r", "e2r_bad_j", "heis4", "abelian", "heisenberg_plus_line", "aff_r",
    "realify", "almost_abelian", "direct_sum", "random_hermitian",
    "random_two_step_hermitian", "random_compatible_metric", "random_basis_change",
    "set_bracket",
]


def set_bracket(c, i, j, k, val):
    """Record ``[x_i, x_j] += val x_k`` with antisymmetry."""
    c[k, i, j] += mpq(val)
    c[k, j, i] -= mpq(val)


def _standard_j(n_r):
    J = exact_zeros((n_r, n_r))
    for p in range(0, n_r, 2):
        J[p + 1, p] = mpq(1)
        J[p, p + 1] = mpq(-1)
    return J


def e2r():
    """Euclidean motions of the plane times a line; basis (x, z, eps1, eps2)."""
    c = exact_zeros((4, 4, 4))
    set_bracket(c, 0, 2, 3, 1)
    set_bracket(c, 0, 3, 2, -1)
    J = exact_zeros((4, 4))
    J[1, 0], J[0, 1] = mpq(1), mpq(-1)
    J[3, 2], J[2, 3] = mpq(1), mpq(-1)
    return LieAlgebra(c), MetricTensor.identity(4), AlmostComplexStructure(J)


def e2r_bad_j():
    """E2R with the non-integrable pairing ``x -> eps1``, ``z -> eps2``."""
    L, g, _ = e2r()
    J = exact_zeros((4, 4))
    J[2, 0], J[0, 2] = mpq(1), mpq(-1)
    J[3, 1], J[1, 3] = mpq(1), mpq(-1)
    return L, g, AlmostComplexStructure(J)


def heis4():
    """Heisenberg algebra plus a line, basis (x, y, w, u), ``[x, y] = w``."""
    c = exact_zeros((4, 4, 4))
    set_bracket(c, 0, 1, 2, 1)
    return LieAlgebra(c), MetricTensor.identity(4), AlmostComplexStructure(_standard_j(4))


heisenberg_plus_line = heis4


def abelian(n_r=4):
    return (
        LieAlgebra(exact_zeros((n_r, n_r, n_r))),
        MetricTensor.identity(n_r),
        AlmostComplexStructure(_standard_j(n_r)),
    )


def aff_r():
    """``[x, y] = y`` with ``Jx = y``."""
    c = exact_zeros((2, 2, 2))
    set_bracket(c, 0, 1, 1, 1)
    return LieAlgebra(c), MetricTensor.identity(2), AlmostComplexStructure(_standard_j(2))


def _gauss(rng, lo=-3, hi=3):
    return complex(int(rng.integers(lo, hi + 1)), int(rng.integers(lo, hi + 1)))


def realify(gamma):
    """Real structure constants of a complex Lie algebra, plus ``J = i``.

    ``gamma[r][p][q]`` are Gaussian-integer (or Gaussian-rational pairs given as
    ``(re, im)``) constants with ``[u_p, u_q] = sum_r gamma^r_{pq} u_r``.  The
    real basis is ``u_0, i u_0, u_1, i u_1, ...``.
    """
    m = len(gamma)
    n_r = 2 * m
    c = exact_zeros((n_r, n_r, n_r))
    units = [(mpq(1), mpq(0)), (mpq(0), mpq(1))]
    for r in range(m):
        for p in range(m):
            for q in range(p + 1, m):
                g = gamma[r][p][q]
                gre, gim = (mpq(g[0]), mpq(g[1])) if isinstance(g, tuple) else (mpq(int(g.real)), mpq(int(g.imag)))
                if not (gre or gim):
                    continue
                for s, (ar, ai) in enumerate(units):
                    for t, (br, bi) in enumerate(units):
                        wr, wi = ar * br - ai * bi, ar * bi + ai * br
                        vr, vi = wr * gre - wi * gim, wr * gim + wi * gre
                        if vr:
                            set_bracket(c, 2 * p + s, 2 * q + t, 2 * r, vr)
                        if vi:
                            set_bracket(c, 2 * p + s, 2 * q + t, 2 * r + 1, vi)
    return LieAlgebra(c), MetricTensor.identity(n_r), AlmostComplexStructure(_standard_j(n_r))


def _complex_tables(name):
    z = lambda m: [[[0j] * m for _ in range(m)] for _ in range(m)]  # noqa: E731
    if name == "sl2":  # h, e, f
        gmm = z(3)
        gmm[1][0][1], gmm[1][1][0] = 2, -2
        gmm[2][0][2], gmm[2][2][0] = -2, 2
        gmm[0][1][2], gmm[0][2][1] = 1, -1
        return gmm
    if name == "heis":
        gmm = z(3)
        gmm[2][0][1], gmm[2][1][0] = 1, -1
        return gmm
    if name == "aff":
        gmm = z(2)
        gmm[1][0][1], gmm[1][1][0] = 1, -1
        return gmm
    if name == "osc":  # [u0,u1]=u1, [u0,u2]=-u2, [u1,u2]=u3: derived algebra is Heisenberg
        gmm = z(4)
        gmm[1][0][1], gmm[1][1][0] = 1, -1
        gmm[2][0][2], gmm[2][2][0] = -1, 1
        gmm[3][1][2], gmm[3][2][1] = 1, -1
        return gmm
    if name == "filiform":  # [u0,u1]=u2, [u0,u2]=u3
        gmm = z(4)
        gmm[2][0][1], gmm[2][1][0] = 1, -1
        gmm[3][0][2], gmm[3][2][0] = 1, -1
        return gmm
    raise KeyError(name)


def _twisted(gamma, rng):
    """Complex structure constants after a Gaussian-integer-triangular change of basis.

    A unipotent basis change keeps the constants Gaussian integers.
    """
    m = len(gamma)
    G = np.array(gamma, dtype=complex)
    P = np.eye(m, dtype=complex)
    for i in range(m):
        for j in range(i + 1, m):
            P[i, j] = _gauss(rng, -1, 1)
    perm = rng.permutation(m)
    P = P[perm][:, perm]
    Pinv = np.linalg.inv(P)
    G2 = np.einsum("lk,kab,ai,bj->lij", Pinv, G, P, P)
    G2 = np.round(G2.real) + 1j * np.round(G2.imag)
    return G2.tolist()


def almost_abelian(rng, m):
    """``R x |x (R e1 + C^m)`` with ``Jx = e1`` and ad_x complex-linear on ``C^m``."""
    n_r = 2 * m + 2
    c = exact_zeros((n_r, n_r, n_r))
    a = int(rng.integers(-2, 3))
    if a:
        set_bracket(c, 0, 1, 1, a)
    for k in range(2, n_r):
        v = int(rng.integers(-2, 3))
        if v:
            set_bracket(c, 0, 1, k, v)
    A1 = np.array([[_gauss(rng, -2, 2) for _ in range(m)] for _ in range(m)])
    if not A1.any() and not a:
        A1[0, 0] = 1
    for q in range(m):
        for p in range(m):
            w = A1[p, q]
            # ad_x u_q = sum_p w u_p; ad_x (i u_q) = sum_p i w u_p
            for s, (ur, ui) in enumerate([(1, 0), (0, 1)]):
                vr = w.real * ur - w.imag * ui
                vi = w.real * ui + w.imag * ur
                col = 2 + 2 * q + s
                if vr:
                    set_bracket(c, 0, col, 2 + 2 * p, int(vr))
                if vi:
                    set_bracket(c, 0, col, 3 + 2 * p, int(vi))
    return LieAlgebra(c), MetricTensor.identity(n_r), AlmostComplexStructure(_standard_j(n_r))


def direct_sum(*parts):
    n_r = sum(L.dim for L, _, _ in parts)
    c = exact_zeros((n_r, n_r, n_r))
    g = exact_zeros((n_r, n_r))
    J = exact_zeros((n_r, n_r))
    off = 0
    for L, gg, JJ in parts:
        d = L.dim
        sl = slice(off, off + d)
        c[sl, sl, sl] = L.c
        g[sl, sl] = gg.g
        J[sl, sl] = JJ.J
        off += d
    return LieAlgebra(c), MetricTensor(g), AlmostComplexStructure(J)


def random_compatible_metric(J, rng):
    """``A + J^T A J`` for a random rational SPD A."""
    n_r = J.dim
    B = np.array([[mpq(int(rng.integers(-2, 3))) for _ in range(n_r)] for _ in range(n_r)], dtype=object)
    A = B.T @ B + exact_identity(n_r)
    return MetricTensor(A + J.J.T @ A @ J.J)


def random_basis_change(rng, n_r):
    """Unit-triangular integer matrix with a random permutation; invertible over Z."""
    P = exact_identity(n_r)
    for i in range(n_r):
        for j in range(i + 1, n_r):
            P[i, j] = mpq(int(rng.integers(-1, 2)))
    perm = rng.permutation(n_r)
    return P[perm][:, perm]


def _scramble(inst, rng, metric=True, basis=True):
    L, g, J = inst
    if metric:
        g = random_compatible_metric(J, rng)
    if basis:
        P = random_basis_change(rng, L.dim)
        L, g, J = conjugate_basis(L, g, J, P)
    return L, g, J


_COMPLEX_NAMES = ("sl2", "heis", "aff", "filiform", "osc")


def _two_step_block(rng, budget):
    choices = ["aa", "aff_r", "heis4", "cheis", "caff"]
    while True:
        kind = choices[int(rng.integers(len(choices)))]
        if kind == "aa":
            m = int(rng.integers(1, max(1, (budget - 2) // 2) + 1))
            if 2 * m + 2 <= budget:
                return almost_abelian(rng, m)
        elif kind == "aff_r" and budget >= 2:
            return aff_r()
        elif kind == "heis4" and budget >= 4:
            return heis4()
        elif kind == "cheis" and budget >= 6:
            return realify(_twisted(_complex_tables("heis"), rng))
        elif kind == "caff" and budget >= 4:
            return realify(_twisted(_complex_tables("aff"), rng))
        if budget < 4:
            return aff_r()


def random_two_step_hermitian(seed, max_dim=10, scramble=True):
    """A random 2-step solvable Hermitian instance (exact)."""
    rng = np.random.default_rng(seed)
    budget = int(rng.integers(4, max_dim + 1))
    budget -= budget % 2
    parts = []
    used = 0
    while used < budget:
        part = _two_step_block(rng, budget - used)
        parts.append(part)
        used += part[0].dim
        if rng.random() < 0.4:
            break
    # pad with an abelian factor sometimes so W and the centre are nontrivial
    if used + 2 <= max_dim and rng.random() < 0.5:
        parts.append(abelian(2))
    inst = parts[0] if len(parts) == 1 else direct_sum(*parts)
    from .algebra import is_two_step_solvable

    if not is_two_step_solvable(inst[0]):
        # direct sums of 2-step solvable algebras stay 2-step solvable; abelian
        # pads alone cannot occur, so this is a genuine bug
        raise AssertionError("generator produced an algebra that is not 2-step solvable")
    return _scramble(inst, rng, basis=scramble) if scramble else inst


def random_hermitian(seed, max_dim=10, scramble=True):
    """A random Hermitian instance drawn from mixed solvability classes."""
    rng = np.random.default_rng(seed)
    roll = rng.random()
    if roll < 0.5:
        name = _COMPLEX_NAMES[int(rng.integers(len(_COMPLEX_NAMES)))]
        inst = realify(_twisted(_complex_tables(name), rng))
        if inst[0].dim + 2 <= max_dim and rng.random() < 0.5:
            inst = direct_sum(inst, aff_r() if rng.random() < 0.5 else abelian(2))
    elif roll < 0.6:
        inst = heis4() if rng.random() < 0.5 else direct_sum(heis4(), aff_r())
    else:
        return random_two_step_hermitian(int(rng.integers(2**31)), max_dim, scramble)
    return _scramble(inst, rng) if scramble else inst
