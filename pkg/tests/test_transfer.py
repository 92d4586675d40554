import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linopt.errors import DimensionError, InvalidParameterError, NonUnitaryError
from linopt.transfer import (
    UNITARY_TOL,
    ElementMatrix,
    TransferMatrix,
    beam_splitter_constraints,
    compose,
    embed,
    make_beam_splitter,
    make_phase,
    validate_unitary,
)

angles = st.floats(-10, 10, allow_nan=False)


def test_beam_splitter_limits():
    np.testing.assert_array_equal(make_beam_splitter(0, 0).entries, np.eye(2))
    bs = make_beam_splitter(math.pi / 2, 0).entries
    assert abs(bs[0, 0]) < 1e-16 and abs(bs[1, 1]) < 1e-16
    assert bs[0, 1] == 1j and bs[1, 0] == 1j


def test_balanced_beam_splitter_coefficients():
    bs = make_beam_splitter(math.pi / 4)
    t, r = bs.t, bs.r
    assert abs(t) ** 2 == pytest.approx(0.5, abs=1e-15)
    assert abs(r) ** 2 == pytest.approx(0.5, abs=1e-15)
    # conj(t) r = (1/sqrt2)(i/sqrt2)
    assert t.conjugate() * r == pytest.approx(0.5j, abs=1e-15)
    assert t.conjugate() * r + r.conjugate() * t == 0


@given(theta=angles, aux=angles)
def test_beam_splitter_constraints_hold(theta, aux):
    bs = make_beam_splitter(theta, aux)
    power, cross = beam_splitter_constraints(bs.t, bs.r)
    assert abs(power - 1) <= 4 * np.finfo(float).eps
    assert cross <= 4 * np.finfo(float).eps
    assert validate_unitary(bs).passed


@pytest.mark.parametrize("phi, expected", [(0, 1), (math.pi, -1), (math.pi / 2, 1j)])
def test_phase(phi, expected):
    assert make_phase(phi).entries[0, 0] == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_parameters_rejected(bad):
    with pytest.raises(InvalidParameterError):
        make_beam_splitter(bad)
    with pytest.raises(InvalidParameterError):
        make_beam_splitter(0.1, bad)
    with pytest.raises(InvalidParameterError):
        make_phase(bad)


def test_validate_unitary_reports():
    rep = validate_unitary(np.eye(3), tol=1e-10)
    assert rep.passed and rep.max_deviation == 0
    assert validate_unitary(make_beam_splitter(math.pi / 4))
    lossy = np.array([[0.8, 0.8], [0.8, 0.8]])
    rep = validate_unitary(lossy)
    # U^H U has |t|^2 + |r|^2 = 1.28 on the diagonal and t*r + r*t = 1.28 off it
    assert not rep.passed
    assert rep.max_deviation == pytest.approx(1.28)
    assert beam_splitter_constraints(0.8, 0.8) == pytest.approx((1.28, 1.28))


def test_transfer_matrix_rejects_non_unitary():
    with pytest.raises(NonUnitaryError):
        TransferMatrix([[0.8, 0.8], [0.8, 0.8]])
    with pytest.raises(DimensionError):
        TransferMatrix(np.eye(3)[:2])


def test_transfer_matrix_is_read_only():
    u = TransferMatrix.identity(2)
    with pytest.raises(ValueError):
        u.entries[0, 0] = 2


def test_embed_examples():
    np.testing.assert_array_equal(embed(ElementMatrix(np.eye(2)), [0, 1], 3).entries, np.eye(3))
    np.testing.assert_allclose(embed(make_phase(math.pi), [2], 3).entries, np.diag([1, 1, -1]), atol=1e-15)
    bs = make_beam_splitter(math.pi / 4)
    u = embed(bs, [0, 2], 3).entries
    np.testing.assert_array_equal(u[np.ix_([0, 2], [0, 2])], bs.entries)
    np.testing.assert_array_equal(u[1], [0, 1, 0])
    np.testing.assert_array_equal(u[:, 1], [0, 1, 0])
    assert validate_unitary(u).passed


def test_embed_reversed_modes_transposes_roles():
    bs = make_beam_splitter(0.3, 0.2)
    u = embed(bs, [1, 0], 2).entries
    assert u[1, 1] == bs.entries[0, 0] and u[1, 0] == bs.entries[0, 1]


@pytest.mark.parametrize("modes, m, exc", [
    ([0, 3], 3, InvalidParameterError),
    ([1, 1], 3, InvalidParameterError),
    ([-1, 0], 3, InvalidParameterError),
    ([0], 3, DimensionError),
])
def test_embed_errors(modes, m, exc):
    with pytest.raises(exc):
        embed(make_beam_splitter(0.4), modes, m)


def test_compose_identity_and_inverse(haar):
    u = haar(4)
    np.testing.assert_array_equal(compose(TransferMatrix.identity(4), u).entries, u.entries)
    assert np.abs(compose(u, u.H).entries - np.eye(4)).max() <= 1e-12


def test_compose_order_is_later_times_earlier():
    first = embed(make_beam_splitter(0.7), [0, 1], 2)
    second = embed(make_phase(1.1), [0], 2)
    np.testing.assert_array_equal(compose(second, first).entries, second.entries @ first.entries)
    np.testing.assert_array_equal((second @ first).entries, second.entries @ first.entries)


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionError):
        compose(TransferMatrix.identity(2), TransferMatrix.identity(3))


@settings(max_examples=50)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 6))
def test_compose_associative(seed, m):
    from linopt.transfer import random_unitary

    rng = np.random.default_rng(seed)
    a, b, c = (random_unitary(m, rng) for _ in range(3))
    lhs = compose(compose(a, b), c).entries
    rhs = compose(a, compose(b, c)).entries
    assert np.abs(lhs - rhs).max() <= 1e-12


@settings(max_examples=50)
@given(th1=angles, th2=angles, aux=angles)
def test_embed_commutes_on_disjoint_modes(th1, th2, aux):
    a = embed(make_beam_splitter(th1, aux), [0, 2], 5)
    b = embed(make_beam_splitter(th2), [1, 4], 5)
    assert np.abs(compose(a, b).entries - compose(b, a).entries).max() <= 1e-12


def test_default_tolerance():
    assert UNITARY_TOL == 1e-10
