import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from wellport.domain import DomainError
from wellport.posterior import eligibility, evidence, posterior, realize_second_stage

prob = st.floats(min_value=1e-6, max_value=1 - 1e-6)
shift = st.floats(min_value=-50, max_value=50)


def _triggers(J, I, **sets):
    out = {k: np.zeros((J, I), dtype=bool) for k in ("success", "failure", "unconditional")}
    for kind, cells in sets.items():
        for j, i in cells:
            out[kind][j, i] = True
    return out


def test_no_triggers_never_eligible():
    t = _triggers(1, 2)
    assert not eligibility([1, 1], [1, 0], **t)[0]


def test_unconditional_trigger():
    t = _triggers(1, 2, unconditional=[(0, 1)])
    for xi in ([0, 0], [1, 1]):
        assert eligibility([0, 1], xi, **t)[0]
    assert not eligibility([1, 0], [1, 1], **t)[0]


def test_success_trigger_split():
    t = _triggers(1, 1, success=[(0, 0)])
    assert not eligibility([1], [0], **t)[0]
    assert eligibility([1], [1], **t)[0]


def test_failure_trigger_split():
    t = _triggers(1, 1, failure=[(0, 0)])
    assert eligibility([1], [0], **t)[0]
    assert not eligibility([1], [1], **t)[0]


def test_evidence_examples():
    assert evidence([0, 0], [1, 1], [[0.5, 0.3]])[0] == 0
    assert evidence([1], [1], [[0.5]])[0] == pytest.approx(0.5)
    assert evidence([1], [0], [[0.5]])[0] == pytest.approx(-0.5)
    assert evidence([1, 1], [1, 0], [[0.5, 0.3]])[0] == pytest.approx(0.2)


def test_posterior_examples():
    assert posterior(0.3, 0.0) == pytest.approx(0.3, abs=1e-15)
    assert abs(posterior(0.5, math.log(3)) - 0.75) <= 1e-12
    assert posterior(0.9, 10.0, (0.01, 0.99)) == 0.99


@pytest.mark.parametrize("p0", [0.0, 1.0, -0.2, 1.5])
def test_posterior_rejects_boundary_priors(p0):
    with pytest.raises(DomainError):
        posterior(p0, 0.1)


@given(prob, shift, shift)
def test_posterior_monotone(p0, d1, d2):
    lo, hi = sorted((d1, d2))
    assert posterior(p0, lo) <= posterior(p0, hi)


@given(prob, shift, st.floats(0.001, 0.49), st.floats(0.51, 0.999))
def test_posterior_within_bounds(p0, delta, lo, hi):
    assert lo <= posterior(p0, delta, (lo, hi)) <= hi


def test_realize_examples():
    assert realize_second_stage(1.0, 0.999) is True
    assert realize_second_stage(0.69, 0.7) is False
    assert realize_second_stage(0.71, 0.7) is True
    grid = (np.arange(10_000) + 0.5) / 10_000
    assert realize_second_stage(0.4, grid).mean() == pytest.approx(0.4, abs=0.015)


@given(
    hnp.arrays(bool, 6),
    hnp.arrays(bool, 6),
    hnp.arrays(np.float64, (3, 6), elements=st.floats(-2, 2)),
    hnp.arrays(bool, (3, 3, 6)),
    st.integers(0, 5),
)
def test_unselected_projects_are_invisible(x, xi, theta, trig, flip):
    x = x.copy()
    x[flip] = False
    flipped = xi.copy()
    flipped[flip] = ~flipped[flip]
    s, f, u = trig
    assert np.array_equal(eligibility(x, xi, s, f, u), eligibility(x, flipped, s, f, u))
    assert np.array_equal(evidence(x, xi, theta), evidence(x, flipped, theta))


@given(hnp.arrays(bool, 5), hnp.arrays(bool, 5), hnp.arrays(np.float64, 4, elements=prob))
def test_zero_strength_is_neutral(x, xi, p0):
    delta = evidence(x, xi, np.zeros((4, 5)))
    assert np.array_equal(posterior(p0, delta), np.clip(p0, 0.01, 0.99))


@given(
    prob,
    st.floats(-3, 3),
    st.floats(0, 4),
    st.floats(0, 4),
    st.floats(0, 1, exclude_max=True),
)
def test_scaling_moves_success_with_evidence_sign(p0, delta, a, b, u):
    lo, hi = sorted((a, b))
    weak = realize_second_stage(posterior(p0, lo * delta), u)
    strong = realize_second_stage(posterior(p0, hi * delta), u)
    if delta > 0:
        assert strong >= weak
    elif delta < 0:
        assert strong <= weak


def test_stacked_scenarios_broadcast():
    t = _triggers(2, 3, success=[(0, 0)], failure=[(1, 2)])
    xi = np.array([[1, 0, 0], [0, 0, 1]], dtype=bool)
    e = eligibility([1, 0, 1], xi, **t)
    assert e.tolist() == [[True, True], [False, False]]
