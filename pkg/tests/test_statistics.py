import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linopt.circuit import compile_circuit, mach_zehnder, random_circuit
from linopt.classical import output_fractions
from linopt.errors import InvalidParameterError, UndefinedParameterError
from linopt.quantum import FockBasisVector, fock_evolve, single_photon_distribution
from linopt.statistics import (
    BLOCK_FRAMES,
    CountRecord,
    Fringe,
    anticorrelation_parameter,
    click_probabilities,
    coincidence_probability,
    equivalence_check,
    fringe_visibility,
    hom_scan,
    mz_fringe,
    pair_click_probabilities,
    sample_frames,
    singles_probability,
    visibility_sigma,
)
from linopt.transfer import TransferMatrix, compose, embed, make_beam_splitter, make_phase, random_unitary

from oracles import click_probability_numeric

BS = embed(make_beam_splitter(math.pi / 4), [0, 1], 2)


def dark_mz():
    return compile_circuit(mach_zehnder(math.pi / 4, math.pi / 4, 0, 0, 0))


# -- exact coincidences ---------------------------------------------------------


def test_single_photon_never_coincident(haar):
    u = haar(4)
    state = fock_evolve(u, (0, 1, 0, 0))
    for i in range(4):
        for j in range(4):
            if i != j:
                assert coincidence_probability(state, i, j) == 0


def test_hom_output_has_no_coincidences():
    assert coincidence_probability(fock_evolve(BS, (1, 1)), 0, 1) <= 1e-30


def test_coincidence_unbalanced_splitter():
    u = embed(make_beam_splitter(math.acos(math.sqrt(0.8))), [0, 1], 2)
    # t^2 = 0.8, r^2 = -0.2
    assert coincidence_probability(fock_evolve(u, (1, 1)), 0, 1) == pytest.approx(0.36, abs=1e-14)


def test_coincidence_same_detector_rejected():
    with pytest.raises(InvalidParameterError):
        coincidence_probability(fock_evolve(BS, (1, 1)), 1, 1)


def test_singles_probability():
    state = FockBasisVector(3, {(2, 0, 0): 0.6, (0, 1, 1): 0.8})
    assert singles_probability(state, 0) == pytest.approx(0.36)
    assert singles_probability(state, 2) == pytest.approx(0.64)


# -- anticorrelation ------------------------------------------------------------


def test_single_photon_anticorrelation_is_zero():
    assert anticorrelation_parameter(BS, in_mode=0) == 0.0


def test_coherent_anticorrelation_is_one():
    assert anticorrelation_parameter(BS, alphas=[1, 0]) == pytest.approx(1, abs=1e-12)


def test_coherent_pair_probabilities_against_number_sums():
    u = embed(make_beam_splitter(0.3, 0.1), [0, 1], 2)
    alphas = np.array([0.9 - 0.2j, 0.4j])
    beta = u.entries @ alphas
    p_i, p_j, p_ij = pair_click_probabilities(u, alphas=alphas)
    assert p_i == pytest.approx(click_probability_numeric(beta[0]), rel=1e-13)
    assert p_j == pytest.approx(click_probability_numeric(beta[1]), rel=1e-13)
    assert p_ij == pytest.approx(click_probability_numeric(beta[0]) * click_probability_numeric(beta[1]), rel=1e-12)
    np.testing.assert_allclose(click_probabilities(beta), [p_i, p_j], rtol=1e-15)


@settings(max_examples=100)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(2, 6))
def test_classical_bound(seed, m):
    rng = np.random.default_rng(seed)
    u = random_unitary(m, rng)
    alphas = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    i, j = rng.choice(m, 2, replace=False)
    assert anticorrelation_parameter(u, alphas=alphas, pair=(i, j)) >= 1 - 1e-9


def test_anticorrelation_undefined():
    with pytest.raises(UndefinedParameterError):
        anticorrelation_parameter(TransferMatrix.identity(2), alphas=[1, 0])
    with pytest.raises(UndefinedParameterError):
        anticorrelation_parameter(TransferMatrix.identity(2), in_mode=0)


def test_anticorrelation_argument_checks():
    with pytest.raises(InvalidParameterError):
        anticorrelation_parameter(BS)
    with pytest.raises(InvalidParameterError):
        anticorrelation_parameter(BS, in_mode=0, alphas=[1, 0])


# -- HOM scan ---------------------------------------------------------------------


def test_hom_scan_points():
    rows = hom_scan([0.5, 1.0, 0.75])
    assert rows[0, 1] <= 1e-12
    assert rows[0, 2:] == pytest.approx([0.5, 0.5], abs=1e-12)
    assert rows[1, 1:] == pytest.approx([1, 0, 0], abs=1e-12)
    assert rows[2, 1:] == pytest.approx([0.25, 0.375, 0.375], abs=1e-12)


def test_hom_scan_dip_law():
    grid = np.linspace(0, 1, 41)
    rows = hom_scan(grid)
    np.testing.assert_allclose(rows[:, 1], (2 * grid - 1) ** 2, atol=1e-12)
    np.testing.assert_allclose(rows[:, 1:].sum(axis=1), 1, atol=1e-12)


def test_hom_scan_rejects_out_of_range():
    with pytest.raises(InvalidParameterError):
        hom_scan([1.2])


# -- Monte Carlo ----------------------------------------------------------------


def test_vacuum_gives_no_counts():
    rec = sample_frames(BS, [0, 0], 1000, 1)
    assert rec.frames == 1000
    assert not rec.singles.any() and not rec.coincidences.any()


def test_dark_port_stays_dark():
    rec = sample_frames(dark_mz(), [math.sqrt(0.1), 0], 100_000, 11)
    assert rec.singles[0] == 0
    assert rec.singles[1] > 0


@pytest.mark.parametrize("mean", [0.01, 1.0])
def test_singles_rates_follow_poisson_click_law(mean):
    frames = 100_000
    u = compose(embed(make_phase(0.4), [1], 3), embed(make_beam_splitter(0.6), [0, 1], 3))
    alphas = np.array([math.sqrt(mean), 0, math.sqrt(mean) * 1j])
    rec = sample_frames(u, alphas, frames, 5)
    p = click_probabilities(u.entries @ alphas)
    sigma = np.sqrt(p * (1 - p) / frames)
    assert np.all(np.abs(rec.rates() - p) <= 5 * sigma)
    for i, j in [(0, 1), (0, 2), (1, 2)]:
        pij = p[i] * p[j]
        assert abs(rec.coincidences[i, j] / frames - pij) <= 5 * math.sqrt(pij * (1 - pij) / frames) + 1e-12


def test_sampling_is_reproducible_and_worker_independent():
    u = embed(make_beam_splitter(0.5), [0, 1], 2)
    frames = 2 * BLOCK_FRAMES + 123
    a = sample_frames(u, [1.0, 0.5j], frames, 42)
    b = sample_frames(u, [1.0, 0.5j], frames, 42, workers=3)
    c = sample_frames(u, [1.0, 0.5j], frames, 43)
    np.testing.assert_array_equal(a.singles, b.singles)
    np.testing.assert_array_equal(a.coincidences, b.coincidences)
    assert not np.array_equal(a.singles, c.singles)
    assert a.frames == frames and a.seed == 42


def test_merge_is_associative_and_commutative():
    parts = [sample_frames(BS, [1, 0.3], 500, s) for s in range(3)]
    x, y, z = parts
    left = x.merge(y).merge(z)
    right = x.merge(y.merge(z))
    swapped = z.merge(x).merge(y)
    for r in (right, swapped):
        assert r.frames == left.frames
        np.testing.assert_array_equal(r.singles, left.singles)
        np.testing.assert_array_equal(r.coincidences, left.coincidences)


def test_count_record_invariants():
    with pytest.raises(InvalidParameterError):
        CountRecord(10, [3, 2], [[3, 5], [5, 2]])
    with pytest.raises(InvalidParameterError):
        CountRecord(10, [3, 2], [[3, 1], [0, 2]])


def test_sample_argument_checks():
    with pytest.raises(InvalidParameterError):
        sample_frames(BS, [1, 0], 0, 1)
    with pytest.raises(InvalidParameterError):
        sample_frames(BS, [1, 0], 10, -1)


# -- fringes --------------------------------------------------------------------


def test_visibility_examples():
    assert fringe_visibility(Fringe([0, 1, 2], [0.4, 0.4, 0.4])) == 0
    grid = np.linspace(0, 2 * np.pi, 64)
    assert fringe_visibility(Fringe(grid, (1 - np.cos(grid)) / 2)) == pytest.approx(1, abs=1e-15)
    with pytest.raises(UndefinedParameterError):
        fringe_visibility(Fringe([0, 1], [0, 0]))
    with pytest.raises(InvalidParameterError):
        fringe_visibility(Fringe([0], [0.3]))


def test_visibility_sigma_requires_frames():
    with pytest.raises(InvalidParameterError):
        visibility_sigma(Fringe([0, 1], [0.1, 0.2]))


def test_visibility_sigma_against_finite_differences():
    n = 1000
    f = Fringe([0, 1], [0.3, 0.1], n)
    # dV/dhi = 2 lo / s^2, dV/dlo = -2 hi / s^2 evaluated by central differences
    h = 1e-6
    v = lambda hi, lo: (hi - lo) / (hi + lo)
    d_hi = (v(0.3 + h, 0.1) - v(0.3 - h, 0.1)) / (2 * h)
    d_lo = (v(0.3, 0.1 + h) - v(0.3, 0.1 - h)) / (2 * h)
    q = lambda p: (p * n + 1) / (n + 2)
    var = lambda p: q(p) * (1 - q(p)) / n
    assert visibility_sigma(f) == pytest.approx(math.sqrt(d_hi ** 2 * var(0.3) + d_lo ** 2 * var(0.1)), rel=1e-6)


def test_mz_fringe_faint_light():
    phases = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    fr = mz_fringe(0.05, phases, 10_000, seed=3)
    v, s = fringe_visibility(fr), visibility_sigma(fr)
    assert abs(v - 1) <= 3 * s
    expected = -np.expm1(-0.05 * (1 - np.cos(phases)) / 2)
    assert np.all(np.abs(fr.values - expected) <= 5 * np.sqrt(expected * (1 - expected) / 10_000) + 1e-12)


# -- equivalence ------------------------------------------------------------------


def test_equivalence_check_small():
    rep = equivalence_check(100, 6, seed=1)
    assert rep.trials == 100
    assert rep.max_deviation <= 1e-12
    assert rep.passed()


def test_equivalence_single_mode():
    rep = equivalence_check(5, 1, seed=0)
    # a lone phase factor gives |e^{i phi}|^2 = 1 up to rounding on one side only
    assert rep.max_deviation <= 4 * np.finfo(float).eps
    u = compile_circuit(random_circuit(1, 4, np.random.default_rng(0)))
    assert output_fractions(u, [1]) == pytest.approx([1.0], abs=1e-15)
    assert single_photon_distribution(u, 0) == pytest.approx([1.0], abs=1e-15)


def test_equivalence_deep_circuit():
    rng = np.random.default_rng(9)
    u = compile_circuit(random_circuit(6, 200, rng))
    for j in range(6):
        e = np.zeros(6)
        e[j] = 1
        assert np.abs(output_fractions(u, e) - single_photon_distribution(u, j)).max() <= 1e-10
    assert equivalence_check(3, 6, seed=2, max_depth=200).max_deviation <= 1e-10
