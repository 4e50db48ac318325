import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from besov_lab.errors import DomainError
from besov_lab.lacunary import (
    LacunaryProfile,
    ShearFlowState,
    build_profile,
    lacunary_frequency,
    profile_descriptor,
    profile_from_descriptor,
    shear_initial_data,
)
from besov_lab.littlewood_paley import BesovIndex, besov_norm_scalar, c0, dyadic_block
from besov_lab.spectral_core import TrigPolynomial, translate


def test_frequencies_are_exact_integers():
    assert [lacunary_frequency(j) for j in range(3, 8)] == [11, 22, 44, 88, 176]
    assert lacunary_frequency(40) == 11 * 2 ** 37
    with pytest.raises(DomainError):
        lacunary_frequency(2)


@pytest.mark.parametrize("rule,weight", [("uniform", lambda j: 1.0), ("jsq", lambda j: j ** -2.0)])
def test_profile_coefficients(rule, weight):
    prof = build_profile(1.5, 9, rule)
    assert list(prof.poly.freqs) == prof.frequencies
    for j in prof.indices:
        a, b = prof.poly.coefficient(lacunary_frequency(j))
        assert a == pytest.approx(weight(j) * 2 ** (-1.5 * j), rel=1e-15)
        assert b == 0.0


def test_rule_names():
    assert build_profile(1.0, 5, "jsq").rule == "quadratic_decay"
    with pytest.raises(DomainError, match="unknown weight rule"):
        build_profile(1.0, 5, "cubic")


@pytest.mark.parametrize("s,J", [(0.0, 5), (-1.0, 5), (1.0, 2), (1.0, 4.5)])
def test_profile_rejects_bad_parameters(s, J):
    with pytest.raises(DomainError):
        LacunaryProfile(s, J)


@given(st.floats(0.1, 4.0), st.integers(3, 12))
def test_each_term_sits_in_one_block(s, J):
    prof = build_profile(s, J)
    for j in range(-1, J + 2):
        block = dyadic_block(prof.poly, j)
        if j in prof.indices:
            target = TrigPolynomial.cosine(lacunary_frequency(j), prof.coefficient(j))
        else:
            target = TrigPolynomial.zero()
        assert block.allclose(target, atol=1e-12)


@given(st.floats(0.1, 4.0), st.integers(3, 12), st.sampled_from([1.0, 2.0, math.inf]))
def test_uniform_profile_besov_norm(s, J, p):
    prof = build_profile(s, J)
    assert besov_norm_scalar(prof.poly, BesovIndex(s, p, math.inf)) == pytest.approx(c0(p), rel=1e-10)


def test_profile_is_even_and_periodic():
    prof = build_profile(1.0, 10)
    x = np.linspace(0, 2 * np.pi, 101)
    assert np.allclose(prof(x), prof(-x), atol=1e-14)
    assert translate(prof.poly, 2 * np.pi).allclose(prof.poly, atol=0.0)


def test_shear_state_components_and_velocity():
    prof = build_profile(2.0, 6)
    state = shear_initial_data(prof, d=3, drift=1.1)
    comps = state.components()
    assert len(comps) == 3
    assert comps[0].coefficient(0) == (1.1, 0.0)
    assert comps[2].is_zero()
    assert state.divergence_free
    assert state.pressure.is_zero()
    pts = np.array([[0.3, 1.0, 2.0], [1.7, -0.2, 0.0]])
    vel = state.velocity(pts)
    assert np.allclose(vel[:, 0], 1.1)
    assert np.allclose(vel[:, 1], prof(pts[:, 0]))
    assert np.allclose(vel[:, 2], 0.0)


def test_shear_state_validation():
    with pytest.raises(DomainError):
        shear_initial_data(build_profile(1.0, 4), d=1)
    with pytest.raises(DomainError):
        ShearFlowState(2, 1.0, TrigPolynomial.cosine(1), viscosity=-1.0)
    with pytest.raises(DomainError):
        ShearFlowState(2, 1.0, TrigPolynomial.cosine(1), axis=3)


def test_axis_two_state_is_not_divergence_free():
    state = ShearFlowState(2, 1.0, TrigPolynomial.cosine(3), axis=2)
    assert not state.divergence_free


def test_state_difference():
    prof = build_profile(1.0, 5)
    a = shear_initial_data(prof, 2, 1.25)
    b = shear_initial_data(prof, 2, 1.0)
    diff = a - b
    assert diff.drift == pytest.approx(0.25)
    assert diff.profile.is_zero()
    with pytest.raises(DomainError):
        a - shear_initial_data(prof, 3, 1.0)


def test_descriptor_round_trip():
    desc = {"s": 2.5, "J": 12, "rule": "jsq", "drift": 1.1, "d": 3}
    prof, state = profile_from_descriptor(json.dumps(desc))
    assert prof.rule == "quadratic_decay"
    assert state.d == 3 and state.drift == 1.1
    assert profile_descriptor(prof, state.d, state.drift) == desc


def test_descriptor_validation():
    with pytest.raises(DomainError, match="needs key 's'"):
        profile_from_descriptor({"J": 5})
    with pytest.raises(DomainError, match="unknown"):
        profile_from_descriptor({"s": 1, "colour": "red"})
