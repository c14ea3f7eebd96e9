import json
from pathlib import Path

import numpy as np
import pytest

from spinbec.errors import ConfigurationError
from spinbec.spin_model import InteractionParams, build_spin_matrices, levels, spin_algebra

ORACLE = json.loads((Path(__file__).parent / "oracles" / "pairing_cg.json").read_text())


def ladder_oracle(F):
    """f_x, f_y, f_z from <m+1|f_+|m> = sqrt(F(F+1) - m(m+1))."""
    m = levels(F)
    n = len(m)
    fp = np.zeros((n, n))
    for j in range(1, n):
        fp[j - 1, j] = np.sqrt(F * (F + 1) - m[j] * (m[j] + 1))
    fm = fp.T
    return (fp + fm) / 2, (fp - fm) / 2j, np.diag(m)


@pytest.mark.parametrize("F", [1, 2, 3])
def test_spin_matrices_match_ladder_construction(F):
    for ours, ref in zip(build_spin_matrices(F), ladder_oracle(F)):
        np.testing.assert_allclose(ours, ref, atol=1e-14)


@pytest.mark.parametrize("F", [1, 2, 3])
def test_commutators_and_casimir(F):
    fx, fy, fz = spin_algebra(F).spin_matrices
    comm = lambda a, b: a @ b - b @ a
    assert np.max(np.abs(comm(fx, fy) - 1j * fz)) < 1e-13
    assert np.max(np.abs(comm(fy, fz) - 1j * fx)) < 1e-13
    assert np.max(np.abs(comm(fz, fx) - 1j * fy)) < 1e-13
    casimir = fx @ fx + fy @ fy + fz @ fz
    assert np.max(np.abs(casimir - F * (F + 1) * np.eye(2 * F + 1))) < 1e-13
    for f in (fx, fy, fz):
        assert np.allclose(f, f.conj().T)


@pytest.mark.parametrize("F", [2, 3])
def test_singlet_pairing_matches_clebsch_gordan(F):
    A = spin_algebra(F).pairA
    np.testing.assert_allclose(A, np.array(ORACLE["singlet"][str(F)]), atol=1e-14)
    assert np.allclose(A, A.T)


def test_quintet_pairing_matches_clebsch_gordan_up_to_the_psi0_squared_entry():
    alg = spin_algebra(3)
    for m in range(-2, 3):
        A = alg.quintet(m)
        C = np.array(ORACLE["quintet"][str(m)])
        assert np.allclose(A, A.T)
        if m == 0:
            # the psi_0^2 coefficient of A_20 is smaller by sqrt(2) than the coupling value
            assert A[3, 3] == pytest.approx(C[3, 3] / np.sqrt(2), abs=1e-14)
            C = C.copy()
            C[3, 3] = A[3, 3]
        np.testing.assert_allclose(A, C, atol=1e-14)


def test_spin3_pairing_polynomials(rng):
    psi = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    p3, p2, p1, p0, m1, m2, m3 = psi
    alg = spin_algebra(3)
    q = lambda A: psi @ A @ psi
    s21 = np.sqrt(21)
    assert q(alg.pairA) == pytest.approx((2 * p3 * m3 - 2 * p2 * m2 + 2 * p1 * m1 - p0**2) / np.sqrt(7))
    assert q(alg.quintet(0)) == pytest.approx((5 * p3 * m3 - 3 * p1 * m1 + np.sqrt(2) * p0**2) / s21)
    assert q(alg.quintet(1)) == pytest.approx((5 * p3 * m2 - np.sqrt(15) * p2 * m1 + np.sqrt(2) * p1 * p0) / s21)
    assert q(alg.quintet(-1)) == pytest.approx((5 * m3 * p2 - np.sqrt(15) * m2 * p1 + np.sqrt(2) * m1 * p0) / s21)
    assert q(alg.quintet(2)) == pytest.approx((np.sqrt(10) * p3 * m1 - np.sqrt(20) * p2 * p0 + np.sqrt(6) * p1**2) / s21)
    assert q(alg.quintet(-2)) == pytest.approx((np.sqrt(10) * m3 * p1 - np.sqrt(20) * m2 * p0 + np.sqrt(6) * m1**2) / s21)


def test_spin2_singlet_polynomial(rng):
    psi = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    p2, p1, p0, m1, m2 = psi
    A = spin_algebra(2).pairA
    assert psi @ A @ psi == pytest.approx((2 * p2 * m2 - 2 * p1 * m1 + p0**2) / np.sqrt(5))


def test_spin3_raising_density_coefficients():
    fx, fy, _ = spin_algebra(3).spin_matrices
    fplus = fx + 1j * fy
    expected = [np.sqrt(6), np.sqrt(10), 2 * np.sqrt(3), 2 * np.sqrt(3), np.sqrt(10), np.sqrt(6)]
    np.testing.assert_allclose(np.diag(fplus, 1), expected, atol=1e-14)


def test_algebra_is_cached_and_read_only():
    alg = spin_algebra(2)
    assert spin_algebra(2) is alg
    with pytest.raises(ValueError):
        alg.fx[0, 0] = 1.0
    assert alg.pairA2 is None and spin_algebra(1).pairA is None


def test_zeeman_shifts():
    np.testing.assert_allclose(spin_algebra(1).zeeman(0.5, 2.0), [-0.5 + 2.0, 0.0, 0.5 + 2.0])


@pytest.mark.parametrize("F", [0, 4])
def test_unsupported_spin(F):
    with pytest.raises(ConfigurationError):
        spin_algebra(F)


def test_params_validation():
    assert InteractionParams(M=1.5).validate(2).M == 1.5
    with pytest.raises(ConfigurationError):
        InteractionParams(M=2.0).validate(2)
    with pytest.raises(ConfigurationError):
        InteractionParams(beta0=float("nan")).validate(1)
    assert InteractionParams(1, 2, 3, 4).betas(2) == (1, 2, 3)
