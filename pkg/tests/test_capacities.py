import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from remad.capacities import (
    LOG2_3,
    DiagonalInput,
    Method,
    capacity_dispatch,
    coherent_information,
    diagonal_information,
    diagonal_q1,
    edge_gamma10_one_capacity,
    edge_q,
    entanglement_assisted_capacity,
    monotonicity_upper_bound,
    mutual_information,
    plane_gamma10_zero_capacity,
    plane_gamma21_zero_capacity,
    project_to_simplex,
    qubit_adc_capacity,
)
from remad.channels import QutritParams, TransitionMatrix, beamsplitter_params, covariance_unitary
from remad.errors import InvalidDensityError, NotDegradableError, OutOfDomainError, OutOfRangeError
from remad.liouville import Verdict, classify_qutrit

from conftest import random_density, random_params

# Brute-force oracles: maxima over the diagonal simplex grid at resolution
# 2000 (independent numpy evaluation of p @ Γ and p @ Γ~), and a 1e-6 step
# scan for the qubit function.
DQ1_GRID_0101 = 1.0159093201371177
CE_GRID_05_05_025 = 1.5849621399872387
PLANE0_GRID_02_01 = 1.0754377764280882
QADC_GRID_025 = 0.4150374992785735


def h2(x):
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    return np.nan_to_num(v)


def test_coherent_information_examples():
    ident = TransitionMatrix.identity(3)
    assert coherent_information(ident, np.eye(3) / 3) == pytest.approx(LOG2_3, abs=1e-12)
    ground = np.diag([1.0, 0, 0])
    assert coherent_information(QutritParams(0.3, 0.2, 0.4).to_transition(), ground) == pytest.approx(0, abs=1e-12)
    full = QutritParams(1, 0, 1).to_transition()
    v = coherent_information(full, np.eye(3) / 3)
    # output is |0><0|; the environment receives the full input spectrum
    assert v == pytest.approx(-LOG2_3, abs=1e-12)


def test_mutual_information_examples(rng):
    ident = TransitionMatrix.identity(3)
    assert mutual_information(ident, np.eye(3) / 3) == pytest.approx(2 * LOG2_3, abs=1e-12)
    assert mutual_information(QutritParams(0.3, 0.2, 0.4).to_transition(), np.diag([1.0, 0, 0])) == pytest.approx(0, abs=1e-12)
    full = QutritParams(1, 0, 1).to_transition()
    assert mutual_information(full, np.eye(3) / 3) == pytest.approx(0, abs=1e-12)
    for _ in range(20):
        g = random_params(rng).to_transition()
        assert mutual_information(g, random_density(rng, 3)) >= -1e-10


def test_diagonal_information_matches_full(rng):
    for _ in range(20):
        g = random_params(rng).to_transition()
        p = rng.dirichlet(np.ones(3))
        assert diagonal_information(g, p) == pytest.approx(coherent_information(g, np.diag(p)), abs=1e-12)


def test_diagonal_input_validation():
    with pytest.raises(InvalidDensityError):
        DiagonalInput((0.5, 0.6))
    with pytest.raises(InvalidDensityError):
        DiagonalInput((1.2, -0.2))
    assert DiagonalInput.qutrit(0.2, 0.3).populations == pytest.approx((0.5, 0.2, 0.3))


def test_project_to_simplex():
    np.testing.assert_allclose(project_to_simplex([0.2, 0.3, 0.5]), [0.2, 0.3, 0.5])
    np.testing.assert_allclose(project_to_simplex([2.0, 0.0, 0.0]), [1, 0, 0])
    np.testing.assert_allclose(project_to_simplex([0.5, 0.5, -1]), [0.5, 0.5, 0])


def test_diagonal_q1_identity():
    r = diagonal_q1(QutritParams(0, 0, 0))
    assert r.value == pytest.approx(LOG2_3, abs=1e-12)
    assert r.method is Method.DIAGONAL_OPTIMIZATION
    assert r.argmax.populations == pytest.approx((1 / 3,) * 3, abs=1e-6)


def test_diagonal_q1_against_grid_oracle():
    r = diagonal_q1(QutritParams(0.1, 0.1, 0.1))
    assert 1.0 < r.value < LOG2_3
    assert DQ1_GRID_0101 - 1e-12 <= r.value <= DQ1_GRID_0101 + 1e-6
    assert r.optimizer_evals > 0


def test_diagonal_q1_boundary_plane():
    r = diagonal_q1(QutritParams(0.0, 0.2, 0.3))
    assert r.value == pytest.approx(1.0, abs=1e-4)


def test_diagonal_q1_strict():
    with pytest.raises(NotDegradableError):
        diagonal_q1(QutritParams(0.0, 0.3, 0.3), strict=True)
    r = diagonal_q1(QutritParams(0.0, 0.3, 0.3))
    assert r.method is Method.UNKNOWN and r.bracket[0] == r.value


@pytest.mark.parametrize("x, expected", [(0.0, 1.0), (0.5, 0.0), (0.75, 0.0), (1.0, 0.0)])
def test_qubit_adc_endpoints(x, expected):
    assert qubit_adc_capacity(x) == pytest.approx(expected, abs=1e-9)


def test_qubit_adc_against_grid_oracle():
    assert qubit_adc_capacity(0.25) == pytest.approx(QADC_GRID_025, abs=1e-9)
    p = np.arange(0, 1 + 1e-12, 1e-6)
    x = 0.1
    assert qubit_adc_capacity(x) == pytest.approx(float(np.max(h2((1 - x) * p) - h2(x * p))), abs=1e-9)


def test_qubit_adc_range():
    with pytest.raises(OutOfRangeError):
        qubit_adc_capacity(-0.1)


def test_qubit_adc_monotone():
    xs = np.linspace(0, 0.5, 100)
    vals = [qubit_adc_capacity(x) for x in xs]
    assert all(b <= a + 1e-8 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("g21, g20", [(0.2, 0.5), (0.0, 0.5), (0.6, 0.2), (0.9, 0.05)])
def test_edge_q_zero_region(g21, g20):
    assert g20 >= (1 - g21) / 2
    assert edge_q(g21, g20) == 0.0


def test_edge_q_examples():
    assert edge_q(0.0, 0.0) == pytest.approx(1.0, abs=1e-9)
    # γ21 = 0 reduces to the qubit channel with damping γ20
    for x in (0.1, 0.3):
        assert edge_q(0.0, x) == pytest.approx(qubit_adc_capacity(x), abs=1e-9)
    with pytest.raises(OutOfDomainError):
        edge_q(0.7, 0.7)


@pytest.mark.parametrize("g21", [0.2, 0.5, 0.8, 0.95])
def test_edge_capacity_on_corner_line(g21):
    r = edge_gamma10_one_capacity(g21, 1 - g21)
    assert r.method is Method.CLOSED_FORM
    assert r.value == pytest.approx(qubit_adc_capacity(1 - g21), abs=1e-7)


def test_edge_capacity_matches_diagonal_search(rng):
    # on the γ10 = 1 face the value is a maximum over two-level diagonal inputs,
    # so it never exceeds the full diagonal optimum
    for _ in range(20):
        g = random_params(rng)
        r = edge_gamma10_one_capacity(g.g21, g.g20)
        d = diagonal_q1(QutritParams(1.0, g.g21, g.g20), resolution=100)
        assert r.value <= d.value + 1e-9
        assert r.value >= d.value - 1e-6


def test_edge_capacity_interior_is_lower_bound():
    r = edge_gamma10_one_capacity(0.6, 0.1)
    assert r.method is Method.UNKNOWN
    assert r.bracket[0] == r.value > 0


@pytest.mark.parametrize("g21, g20", [(0.3, 0.3), (0.5, 0.0), (0.0, 0.7), (0.1, 0.9)])
def test_plane_gamma10_zero_closed_form(g21, g20):
    r = plane_gamma10_zero_capacity(g21, g20)
    assert r.value == 1.0 and r.method is Method.CLOSED_FORM


def test_plane_gamma10_zero_examples():
    assert plane_gamma10_zero_capacity(0, 0).value == pytest.approx(LOG2_3, abs=1e-12)
    r = plane_gamma10_zero_capacity(0.2, 0.1)
    assert r.method is Method.DIAGONAL_OPTIMIZATION
    assert PLANE0_GRID_02_01 - 1e-12 <= r.value <= PLANE0_GRID_02_01 + 1e-6
    with pytest.raises(OutOfDomainError):
        plane_gamma10_zero_capacity(0.6, 0.6)


@pytest.mark.parametrize("g21", [0.0, 0.1, 0.25, 0.4, 0.5])
def test_plane_gamma10_zero_continuity(g21):
    # the optimum approaches one bit at γ21 + γ20 = 1/2
    g20 = 0.5 - g21
    r = diagonal_q1(QutritParams(0.0, g21, g20))
    assert r.value == pytest.approx(1.0, abs=1e-4)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_plane_gamma10_zero_lower_bound(a, b):
    g21, g20 = a * (1 - b), b * (1 - a)
    assert plane_gamma10_zero_capacity(g21, g20, resolution=60).value >= 1 - 1e-7


@pytest.mark.parametrize(
    "g10, g20, expected",
    [(0.6, 0.7, 0.0), (0.3, 0.8, None), (0.8, 0.3, None), (0.5, 0.5, 0.0)],
)
def test_plane_gamma21_zero_quadrants(g10, g20, expected):
    r = plane_gamma21_zero_capacity(g10, g20)
    if expected is None:
        assert r.method is Method.CLOSED_FORM
        assert r.value == qubit_adc_capacity(min(g10, g20))
    else:
        assert r.value == expected and r.method is Method.ZERO_BY_ANTIDEGRADABILITY


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 0.5), st.floats(0.5, 1))
def test_plane_gamma21_zero_symmetry(x, y):
    assert plane_gamma21_zero_capacity(x, y).value == plane_gamma21_zero_capacity(y, x).value


def test_plane_gamma21_zero_mirrored_pairs():
    # (x, y) degradable with both below 1/2; (1-x, 1-y) antidegradable
    for x, y in [(0.1, 0.2), (0.3, 0.4), (0.45, 0.05)]:
        a = plane_gamma21_zero_capacity(x, y)
        b = plane_gamma21_zero_capacity(1 - x, 1 - y)
        assert a.method is Method.DIAGONAL_OPTIMIZATION and a.value > 0
        assert b.value == 0.0
        assert plane_gamma21_zero_capacity(y, x).value == pytest.approx(
            diagonal_q1(QutritParams(y, 0, x)).value, abs=1e-6
        )


def test_entanglement_assisted_identity():
    ea = entanglement_assisted_capacity(QutritParams(0, 0, 0))
    assert ea.ce == pytest.approx(2 * LOG2_3, abs=1e-9)
    assert ea.qe == pytest.approx(LOG2_3, abs=1e-9)


def test_entanglement_assisted_against_grid_oracle():
    ea = entanglement_assisted_capacity(QutritParams(0.5, 0.5, 0.25))
    assert CE_GRID_05_05_025 - 1e-12 <= ea.ce <= CE_GRID_05_05_025 + 1e-6


def test_entanglement_assisted_dominates(rng):
    for _ in range(20):
        g = random_params(rng)
        ea = entanglement_assisted_capacity(g, resolution=60)
        assert ea.ce >= diagonal_q1(g, resolution=60).value - 1e-12
        rho = random_density(rng, 3)
        assert ea.ce >= mutual_information(g.to_transition(), rho) - 1e-7


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-6, 6))
def test_mutual_information_covariance_invariant(seed, theta):
    rng = np.random.default_rng(seed)
    g = random_params(rng).to_transition()
    rho = random_density(rng, 3)
    u = covariance_unitary(theta, 3)
    assert mutual_information(g, u @ rho @ u.conj().T) == pytest.approx(mutual_information(g, rho), abs=1e-9)


@pytest.mark.parametrize(
    "p, method, value",
    [
        ((0.2, 0.1, 0.1), Method.DIAGONAL_OPTIMIZATION, None),
        (beamsplitter_params(0.4).as_tuple(), Method.ZERO_BY_ANTIDEGRADABILITY, 0.0),
        ((0.3, 0.0, 0.8), Method.CLOSED_FORM, "adc"),
        ((0.0, 0.3, 0.3), Method.CLOSED_FORM, 1.0),
    ],
)
def test_dispatch_examples(p, method, value):
    q, cp = capacity_dispatch(QutritParams(*p))
    assert q.method is method
    assert cp == q
    if value == "adc":
        assert q.value == qubit_adc_capacity(0.3)
    elif value is not None:
        assert q.value == value


def test_dispatch_unknown_bracket():
    g = QutritParams(0.3, 0.3, 0.3)
    assert classify_qutrit(g).verdict is Verdict.NEITHER
    q, cp = capacity_dispatch(g)
    assert q.method is Method.UNKNOWN and cp is None
    lo, hi = q.bracket
    assert 0 <= lo <= hi <= LOG2_3
    assert hi == pytest.approx(monotonicity_upper_bound(g))
    assert hi <= entanglement_assisted_capacity(g).qe + 1e-12


def test_monotone_along_random_lines(rng):
    for _ in range(4):
        g10, g21 = rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.6)
        last = math.inf
        for g20 in np.linspace(0, 1 - g21, 12):
            q, _ = capacity_dispatch(QutritParams(g10, g21, g20), resolution=80)
            if q.exact:
                assert q.value <= last + 1e-6
                last = q.value


def test_diagonal_sufficiency_sample(rng):
    found = 0
    while found < 5:
        g = random_params(rng)
        if classify_qutrit(g).verdict is not Verdict.DEGRADABLE:
            continue
        found += 1
        best = diagonal_q1(g).value
        t = g.to_transition()
        for _ in range(100):
            assert coherent_information(t, random_density(rng, 3)) <= best + 1e-7
