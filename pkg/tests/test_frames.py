import itertools

import numpy as np
import pytest

from flatherm import instances
from flatherm.errors import DependentFrame, InputError
from flatherm.frames import (
    basis_frame,
    bianchi_defect,
    frame_from_vectors,
    reconstruction_defect,
    standard_frame,
    structure_equation_defect,
    tables_jacobi_defect,
    transform_tables,
)
from flatherm.scalars import ExactComplex, max_norm

X, Z, E1, E2 = range(4)
I_OVER_SQRT2 = ExactComplex(0, 0, 0, ExactComplex.inv_sqrt2().b)


@pytest.fixture
def e2r_frame():
    L, g, J = instances.e2r()
    return basis_frame(L, g, J, [E1, X])


def test_e2r_tables(e2r_frame):
    F = e2r_frame
    assert F.exact
    assert complex(I_OVER_SQRT2) == pytest.approx(1j / 2**0.5)
    # e_1 = (eps1 - i eps2)/sqrt2, e_2 = (x - iz)/sqrt2
    assert F.e[0, E1] == ExactComplex.inv_sqrt2() and F.e[0, E2] == -I_OVER_SQRT2
    assert F.e[1, X] == ExactComplex.inv_sqrt2() and F.e[1, Z] == -I_OVER_SQRT2
    expected_C = {(0, 1, 0): I_OVER_SQRT2, (0, 0, 1): -I_OVER_SQRT2}
    for idx, v in np.ndenumerate(F.C):
        assert v == expected_C.get(idx, ExactComplex()), idx
    for idx, v in np.ndenumerate(F.D):
        assert v == (I_OVER_SQRT2 if idx == (0, 0, 1) else ExactComplex()), idx
    for idx, v in np.ndenumerate(F.gmat):
        assert v == ExactComplex(int(idx[0] == idx[1]))


def test_e2r_identities(e2r_frame):
    assert reconstruction_defect(e2r_frame) == 0
    # the printed 1/2 on the C-term with the alternating wedge convention
    assert structure_equation_defect(e2r_frame) == 0
    assert bianchi_defect(e2r_frame) == (0, 0, 0)


def test_abelian_tables_vanish():
    F = standard_frame(*instances.abelian(6))
    assert max_norm(F.C) == 0 and max_norm(F.D) == 0
    assert bianchi_defect(F) == (0, 0, 0)
    assert structure_equation_defect(F) == 0


def test_corrupted_c_breaks_structure_equation(e2r_frame):
    C = e2r_frame.C.copy()
    C[1, 0, 1] = ExactComplex(1)
    C[1, 1, 0] = ExactComplex(-1)
    bad = e2r_frame.with_tables(C=C)
    assert structure_equation_defect(bad) != 0
    assert reconstruction_defect(bad) != 0


def test_rejects_non_holomorphic_vectors():
    L, g, J = instances.e2r()
    E = np.zeros((2, 4))
    E[0, X], E[1, E1] = 1, 1
    with pytest.raises(InputError):
        frame_from_vectors(L, g, J, E)


def test_rejects_dependent_vectors(e2r_frame):
    L, g, J = instances.e2r()
    E = np.array([e2r_frame.e[0], e2r_frame.e[0]])
    with pytest.raises(DependentFrame):
        frame_from_vectors(L, g, J, E)


@pytest.mark.parametrize("seed", range(10))
def test_frame_covariance(seed):
    L, g, J = instances.random_hermitian(seed, max_dim=8)
    F1 = standard_frame(L.as_float(), g, J)
    rng = np.random.default_rng(seed)
    n = F1.n
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) + 2 * np.eye(n)
    F2 = frame_from_vectors(L, g, J, A @ F1.e)
    C2, D2 = transform_tables(F1.C, F1.D, A)
    scale = max(1.0, np.abs(F2.C).max(), np.abs(F2.D).max())
    assert np.abs(C2 - F2.C).max() / scale < 1e-9
    assert np.abs(D2 - F2.D).max() / scale < 1e-9


@pytest.mark.parametrize("seed", range(12))
def test_exact_frames_reconstruct_and_satisfy_bianchi(seed):
    L, g, J = instances.random_hermitian(seed)
    F = standard_frame(L, g, J)
    assert F.exact
    assert reconstruction_defect(F) == 0
    assert structure_equation_defect(F) == 0
    assert bianchi_defect(F) == (0, 0, 0)
    assert tables_jacobi_defect(F.C, F.D) == 0


def test_bianchi_tracks_jacobi_on_single_entry_edits(e2r_frame):
    F = e2r_frame
    violating = 0
    for which, idx in itertools.product("CD", itertools.product(range(2), repeat=3)):
        if which == "C" and idx[1] == idx[2]:
            continue
        C, D = F.C.copy(), F.D.copy()
        if which == "C":
            C[idx] += 1
            C[idx[0], idx[2], idx[1]] -= 1
        else:
            D[idx] += 1
        breaks_jacobi = tables_jacobi_defect(C, D) != 0
        violating += breaks_jacobi
        assert any(v != 0 for v in bianchi_defect(F.with_tables(C=C, D=D))) == breaks_jacobi, (which, idx)
    assert violating >= 5
