import numpy as np
import pytest
from gmpy2 import mpq

from flatherm import instances
from flatherm.algebra import Subspace, derived_algebra, is_abelian, is_two_step_solvable, is_unimodular
from flatherm.errors import NotFlat
from flatherm.gensearch import FlatSpec, build_flat, canonical_flat_structure, random_flat_spec
from flatherm.riemannian import (
    FlatStructure,
    flatness_defect,
    levi_civita,
    milnor_decompose,
    milnor_verify,
    riemann_curvature,
)
from flatherm.scalars import exact_array, exact_identity, to_float
from oracles import curvature, frac_tensor, koszul, sectional_numerators

X, Z, E1, E2 = range(4)


def as_mpq(t):
    if isinstance(t, list):
        return [as_mpq(v) for v in t]
    return mpq(t.numerator, t.denominator)


def e2r_structure(f=1, eps_scale=1):
    eye = exact_identity(4)
    eps = eye[[E1, E2]].copy()
    eps[1] = eps[1] * eps_scale
    return FlatStructure(Subspace(eye[[X]], 4), Subspace(eye[[Z]], 4), Subspace(eye[[E1, E2]], 4),
                         eps, exact_array([[f]]))


def test_levi_civita_abelian_is_zero():
    L, g, _ = instances.abelian(4)
    assert all(v == 0 for v in levi_civita(L, g).gamma.flat)


def test_levi_civita_e2r_matches_loop_oracle():
    L, g, _ = instances.e2r()
    gamma = levi_civita(L, g).gamma
    assert gamma[E2, X, E1] != 0
    assert gamma.tolist() == as_mpq(koszul(frac_tensor(L.c), frac_tensor(g.g)))


@pytest.mark.parametrize("seed", range(6))
def test_connection_and_curvature_match_oracle(seed):
    L, g, _ = instances.random_hermitian(seed, max_dim=6)
    conn = levi_civita(L, g)
    c = L.c
    assert all(v == 0 for v in (conn.gamma - conn.gamma.transpose(0, 2, 1) - c).flat)
    gam = koszul(frac_tensor(c), frac_tensor(g.g))
    assert conn.gamma.tolist() == as_mpq(gam)
    R = riemann_curvature(L, g, conn)
    assert R.R.tolist() == as_mpq(curvature(frac_tensor(c), gam))
    assert R.antisymmetry_defect() == 0
    assert R.bianchi_defect() == 0
    assert R.pair_symmetry_defect(g) == 0


def test_flat_examples():
    assert flatness_defect(*instances.e2r()[:2]) == 0
    assert flatness_defect(*instances.abelian(4)[:2]) == 0


def test_heisenberg_curvature_value():
    L, g, _ = instances.heis4()
    R = riemann_curvature(L, g)
    assert flatness_defect(L, g) == mpq(3, 4)
    low = R.lowered(g)
    assert low[0, 0, 1, 1] == mpq(-3, 4)  # <R(x,y)y,x>
    oracle = sectional_numerators(curvature(frac_tensor(L.c), koszul(frac_tensor(L.c), frac_tensor(g.g))),
                                  frac_tensor(g.g))
    assert oracle[(0, 1)] == mpq(-3, 4)


def test_milnor_verify_examples():
    L, g, _ = instances.e2r()
    assert milnor_verify(L, g, e2r_structure()).passed
    rep = milnor_verify(L, g, e2r_structure(f=0))
    assert not rep.passed
    assert "f_rows_nonzero" in rep.failed()
    rep = milnor_verify(L, g, e2r_structure(eps_scale=2))
    assert "epsilon_orthonormal" in rep.failed()


def test_milnor_decompose_e2r():
    L, g, _ = instances.e2r()
    F = milnor_decompose(L, g, seed=0)
    assert F.p == 1
    assert F.h.dim == 1 and F.z.dim == 1 and F.gprime.dim == 2
    assert abs(abs(F.evaluate_f(to_float(np.array([1, 0, 0, 0], dtype=object)))[0]) - 1) < 1e-12
    # orientation rule: f_1 at the seeded generic element is positive
    assert milnor_verify(L, g, F, 1e-8).passed


def test_milnor_decompose_rejects_curved():
    L, g, _ = instances.heis4()
    with pytest.raises(NotFlat):
        milnor_decompose(L, g)


def test_build_flat_spec_examples():
    L, g = build_flat(FlatSpec(1, 1, 1, ((1,),)))
    assert L.c.tolist() == instances.e2r()[0].c.tolist()
    L, g = build_flat(FlatSpec(2, 2, 0, ((1, 0), (0, 1))))
    assert L.dim == 6 and flatness_defect(L, g) == 0


@pytest.mark.parametrize("seed", range(8))
def test_flat_implies_milnor_conditions(seed):
    rng = np.random.default_rng(seed)
    spec = random_flat_spec(rng, 8)
    L, g = build_flat(spec)
    F = canonical_flat_structure(L.dim, range(spec.dim_h), range(spec.dim_h, spec.dim_h + spec.dim_z),
                                 spec.dim_h + spec.dim_z, spec.f_matrix)
    assert milnor_verify(L, g, F).passed
    assert flatness_defect(L, g) == 0
    assert is_unimodular(L)
    assert is_abelian(L) or is_two_step_solvable(L)
    assert derived_algebra(L).dim == 2 * spec.p
