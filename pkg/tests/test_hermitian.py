import numpy as np
import pytest
from gmpy2 import mpq

from flatherm import instances
from flatherm.algebra import AlmostComplexStructure, Subspace, same_span
from flatherm.errors import NotFlat, NotTwoStepSolvable
from flatherm.frames import basis_frame, frame_from_vectors, standard_frame
from flatherm.gensearch import FlatSpec, KahlerFlatSpec, build_flat, build_kaehler_flat
from flatherm.hermitian import (
    _random_frame,
    admissible_frame,
    chern_connection_oracle,
    chern_torsion,
    decompose,
    kaehler_defect,
    lemma2_defect,
    lemma2_terms,
    proof_suite,
    torsion_in_frame,
)
from flatherm.scalars import exact_array, exact_zeros, max_norm, to_float

X, Z, E1, E2 = range(4)


def span(*rows, n=4):
    return Subspace(exact_array([[int(i == r) for i in range(n)] for r in rows]), n)


def type_one_flat():
    """6-dim flat algebra (x, z1, z2, z3, eps1, eps2) with J eps1 = x, J eps2 = z1."""
    L, g = build_flat(FlatSpec(1, 1, 3, ((1,),)))
    Jm = exact_zeros((6, 6))
    for a, b in ((4, 0), (5, 1), (2, 3)):
        Jm[b, a], Jm[a, b] = mpq(1), mpq(-1)
    return L, g, AlmostComplexStructure(Jm)


def test_decompose_e2r():
    D = decompose(*instances.e2r())
    assert same_span(D.gprimeJ, span(E1, E2))
    assert D.V.dim == 0 and D.Vprime.dim == 0
    assert same_span(D.W, span(X, Z))
    assert (D.r, D.s, D.n) == (1, 1, 2)


def test_decompose_pure_type_one():
    L, g, J = instances.direct_sum(instances.heis4(), instances.abelian(2))
    D = decompose(L, g, J)
    assert D.gprime.dim == 1
    assert D.r == 0 and same_span(D.V, D.gprime)

    D = decompose(*type_one_flat())
    assert D.r == 0 and same_span(D.V, D.gprime) and D.s == 2
    assert same_span(D.W, span(2, 3, n=6))


def test_decompose_abelian_and_rejections():
    D = decompose(*instances.abelian(4))
    assert D.W.dim == 4 and D.r == D.s == 0
    with pytest.raises(NotTwoStepSolvable):
        decompose(*instances.realify(instances._complex_tables("sl2")))


@pytest.mark.parametrize("seed", range(15))
def test_decomposition_dimensions(seed):
    L, g, J = instances.random_two_step_hermitian(seed)
    D = decompose(L, g, J)
    assert D.gprimeJ.dim + D.V.dim == D.gprime.dim
    assert D.gprimeJ.dim + D.U.dim + D.W.dim == L.dim
    assert D.V.dim == D.s - D.r


def test_admissible_frame_e2r():
    AF = admissible_frame(*instances.e2r())
    F = AF.frame
    assert F.exact and AF.r == AF.s == 1
    assert max_norm(F.gmat - basis_frame(*instances.e2r(), [E1, X]).gmat) == 0
    # same lines as the hand-built frame, up to a unitary rotation inside each block
    ref = basis_frame(*instances.e2r(), [E1, X]).e
    for row, refrow in zip(F.e, ref):
        ratio = [a * b.inverse() for a, b in zip(row, refrow) if not b.is_zero()]
        assert all(r == ratio[0] for r in ratio)
    assert lemma2_defect(AF) == 0


def test_admissible_frame_abelian():
    AF = admissible_frame(*instances.abelian(4))
    assert AF.r == AF.s == 0
    assert lemma2_defect(AF) == 0


def test_kaehler_flat_is_pure_type_two():
    L, g, J = build_kaehler_flat(KahlerFlatSpec(2, 1, 0, 1, ((1, 0), (0, 2))))
    AF = admissible_frame(L, g, J)
    assert AF.s == AF.r


@pytest.mark.parametrize("seed", range(10))
def test_lemma2_random_two_step(seed):
    AF = admissible_frame(*instances.random_two_step_hermitian(seed), seed=seed)
    assert float(lemma2_defect(AF)) < 1e-10
    assert set(lemma2_terms(AF)) >= {"C^*_ij", "D^*_a*", "C^j_i,alpha"}


def test_lemma2_exact_on_aff_r():
    AF = admissible_frame(*instances.aff_r())
    assert AF.frame.exact
    assert lemma2_defect(AF) == 0


def test_e2r_torsion_vanishes():
    L, g, J = instances.e2r()
    F = basis_frame(L, g, J, [E1, X])
    assert max_norm(chern_torsion(F).T) == 0
    assert max_norm(chern_connection_oracle(F).T) == 0
    assert kaehler_defect(L, g, J) == 0
    assert kaehler_defect(*instances.abelian(4)) == 0


def test_non_kaehler_instance():
    L, g, J = instances.heis4()
    F = standard_frame(L, g, J)
    T = chern_torsion(F).T
    assert max_norm(T) != 0
    assert max_norm(T - chern_connection_oracle(F).T) == 0
    assert abs(float(kaehler_defect(L, g, J)) - 2**-0.5) < 1e-15


def test_random_non_kaehler_instance_found_and_matches_oracle():
    found = 0
    for seed in range(20):
        L, g, J = instances.random_two_step_hermitian(seed)
        F = standard_frame(L, g, J)
        T = chern_torsion(F).T
        assert max_norm(T - chern_connection_oracle(F).T) == 0
        found += max_norm(T) != 0
    assert found > 0


@pytest.mark.parametrize("seed", range(8))
def test_torsion_transforms_tensorially(seed):
    L, g, J = instances.random_hermitian(seed, max_dim=8)
    F1 = standard_frame(L, g, J)
    F2 = _random_frame(L, g, J, np.random.default_rng(seed), 1e-10)
    A = F1.e @ F2.coframe[: F2.n].T
    back = torsion_in_frame(chern_connection_oracle(F2).T, A)
    assert max_norm(back - chern_torsion(F1).T) == 0


@pytest.mark.parametrize("seed", range(6))
def test_kaehler_verdict_frame_independent(seed):
    L, g, J = instances.random_hermitian(seed)
    values = {float(kaehler_defect(L, g, J, seed=s)) for s in range(3)}
    assert len(values) == 1


def test_proof_suite_e2r_and_abelian():
    rep = proof_suite(*instances.e2r())
    assert rep.exact and rep.r == rep.s
    assert all(v == 0 for v in rep.defects.values())
    rep = proof_suite(*instances.abelian(4))
    assert rep.passed()


def test_proof_suite_with_h1_z1_pairing(load_fixture):
    rep = proof_suite(*load_fixture("kflat8-paired"))
    assert rep.exact
    assert {"w_rows_vanish", "v_rows_vanish", "middle_gram_skew", "middle_commute",
            "c_equals_minus_d_w"} <= set(rep.defects)
    assert all(v == 0 for v in rep.defects.values()), rep.failed()


def test_proof_suite_requires_flat():
    with pytest.raises(NotFlat):
        proof_suite(*instances.heis4())


def test_float_mode_torsion_matches_oracle():
    for seed in range(10):
        L, g, J = instances.random_hermitian(seed)
        F = standard_frame(L.as_float(), g, J)
        assert not F.exact
        d = np.abs(chern_torsion(F).T - chern_connection_oracle(F).T).max()
        assert d < 1e-12


def test_frame_from_float_vectors_of_exact_algebra():
    L, g, J = instances.e2r()
    E = to_float(basis_frame(L, g, J, [E1, X]).e)
    F = frame_from_vectors(L, g, J, E)
    assert np.abs(chern_torsion(F).T).max() < 1e-15
