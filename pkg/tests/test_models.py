import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlslab.homotopy import TorusClass, TrivialClassError, canonicalize, enumerate_classes
from mlslab.models import (
    ModelError, SYSTOLE, TorusModel, background_geodesic, background_length, bolza,
    conformal_factor, length_from_trace, liouville_average, model_from_config, mobius,
    reduce_to_fundamental_domain,
)


def test_torus_lengths(square, skew):
    assert background_length(square, TorusClass(2, 1)) == pytest.approx(math.sqrt(5), abs=1e-14)
    w = np.array([1.0, -2.0])
    assert background_length(skew, TorusClass(1, -2)) == pytest.approx(math.sqrt(w @ skew.gram @ w), rel=1e-15)
    with pytest.raises(TrivialClassError):
        background_length(square, TorusClass(0, 0))


def test_gram_validation():
    with pytest.raises(ModelError):
        TorusModel(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(ModelError):
        TorusModel(np.array([[1.0, 0.1], [0.0, 1.0]]))
    assert np.allclose(TorusModel([2.0, 0.5, 1.0]).gram, [[2.0, 0.5], [0.5, 1.0]])
    assert model_from_config({"model": "torus", "gram": [1, 0, 1]}).config() == {"model": "torus", "gram": [1.0, 0.0, 1.0]}
    assert model_from_config({"model": "bolza"}).kind == "bolza"


def test_trace_length_formula():
    assert length_from_trace(3.0) == pytest.approx(1.9248473002384139, abs=1e-12)
    with pytest.raises(ModelError):
        length_from_trace(2.0)


def test_bolza_generators():
    model = bolza()
    assert model.relator_residual() <= 1e-9
    for A in model.generators:
        assert abs(np.linalg.det(A) - 1) < 1e-12
        assert abs(np.trace(A)) == pytest.approx(2 * (1 + math.sqrt(2)), rel=1e-12)
    for c in "abcd":
        assert background_length(model, canonicalize(c)) == pytest.approx(SYSTOLE, rel=1e-12)
    assert SYSTOLE == pytest.approx(2 * math.acosh(1 + math.sqrt(2)))


def test_torus_geodesic_examples(square):
    g = background_geodesic(square, TorusClass(1, 0))
    x, v = g.point_at(np.array([0.25, 1.75]))
    assert np.allclose(x, [[0.25, 0.0], [0.75, 0.0]]) and np.allclose(v, [1.0, 0.0])
    g = background_geodesic(square, TorusClass(1, 1))
    x, v = g.point_at(np.array([0.5]))
    assert np.allclose(x, [[0.5 / math.sqrt(2)] * 2]) and np.allclose(v, [[1 / math.sqrt(2)] * 2])


def test_hyperbolic_geodesic_closes_up():
    model = bolza()
    mats = model.letter_matrices()
    deck = [np.eye(2, dtype=complex)]
    for n in range(1, 5):
        deck += [np.linalg.multi_dot([np.eye(2)] + [mats[x] for x in w]) for w in itertools.product(range(8), repeat=n)]
    for word in ("a", "ab", "aBcD", "abc"):
        g = background_geodesic(model, canonicalize(word))
        (z0, z1), (v0, v1) = g.lift_at(np.array([0.0, g.length]))
        U = model.rho(g.cls.letters)
        # the lift closes up under the deck transformation of the class
        assert min(abs(mobius(M, z0) - z1) for M in (U, np.linalg.inv(U))) < 1e-8
        # on the surface, endpoints agree up to a short deck transformation
        (p0, p1), _ = g.point_at(np.array([0.0, g.length]))
        assert min(abs(mobius(M, p0) - p1) for M in deck) < 1e-8
        z, v = g.point_at(np.linspace(0.0, g.length, 201))
        assert np.all(model.in_domain(z, tol=1e-10))
        assert np.abs(np.abs(v) * conformal_factor(z) - 1).max() < 1e-10


def test_geodesic_speed_integrates_to_length():
    model = bolza()
    g = background_geodesic(model, canonicalize("abC"))
    t = np.linspace(0, g.length, 2001)
    z, v = g.lift_at(t)
    speed = np.abs(v) * conformal_factor(z)
    assert np.trapezoid(speed, t) == pytest.approx(g.length, rel=1e-10)

    def chords(n):
        z, _ = g.lift_at(np.linspace(0, g.length, n + 1))
        return np.sum(np.abs(np.diff(z)) * conformal_factor(0.5 * (z[1:] + z[:-1])))

    # second-order chord sums, one Richardson step
    assert (4 * chords(4000) - chords(2000)) / 3 == pytest.approx(g.length, rel=1e-8)


def test_reduction_examples(square):
    x, word = reduce_to_fundamental_domain(square, (1.25, -0.5))
    assert np.allclose(x, [0.25, 0.5]) and word == (1, -1)
    x, word = reduce_to_fundamental_domain(square, (0.3, 0.7))
    assert np.allclose(x, [0.3, 0.7]) and word == (0, 0)
    model = bolza()
    z = mobius(model.rho((0,)), 0j)
    zr, word = reduce_to_fundamental_domain(model, z)
    assert abs(zr) < 1e-12 and word == (1,)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 0.97), st.floats(0.0, 2 * math.pi))
def test_hyperbolic_reduction_roundtrip(r, th):
    model = bolza()
    z = r * np.exp(1j * th)
    zr, word = model.reduce(z)
    assert model.in_domain(zr, tol=1e-12)
    back = mobius(np.linalg.inv(model.rho(word)), zr)
    assert abs(back - z) < 1e-9


def test_liouville_examples(square):
    for model in (square, bolza()):
        assert liouville_average(model, lambda x, v: np.ones(len(x))) == pytest.approx(1.0, abs=1e-13)
    assert liouville_average(square, lambda x, v: v[:, 0] ** 2) == pytest.approx(0.5, abs=1e-13)
    assert abs(liouville_average(square, lambda x, v: v[:, 0] + 3 * v[:, 1])) < 1e-13
    assert abs(liouville_average(bolza(), lambda z, v: (v * conformal_factor(z)).real)) < 1e-13


def test_bolza_liouville_area_quadrature():
    from mlslab.models import BOLZA_AREA, octagon_polar_nodes
    _, w = octagon_polar_nodes()
    assert np.sum(w) == pytest.approx(BOLZA_AREA, rel=1e-9)
    _, w = octagon_polar_nodes(48, 96)
    assert np.sum(w) == pytest.approx(BOLZA_AREA, rel=1e-13)


def test_torus_liouville_is_flow_invariant(skew):
    F = lambda x, v: np.cos(2 * np.pi * (x[:, 0] + 2 * x[:, 1])) * v[:, 0] ** 2 + np.sin(2 * np.pi * x[:, 1]) * v[:, 1]
    base = liouville_average(skew, F)
    for t in (0.1, 0.37):
        moved = liouville_average(skew, lambda x, v: F(x + t * v, v))
        assert moved == pytest.approx(base, abs=1e-12)


def test_length_symmetry_and_powers():
    model = bolza()
    for c in enumerate_classes("bolza", 3)[:40]:
        L = model.background_length(c)
        assert model.background_length(c.inverse()) == pytest.approx(L, rel=1e-10)
        assert model.background_length(c.power(3)) == pytest.approx(3 * L, rel=1e-9)
    sq = TorusModel()
    for c in enumerate_classes("torus", 3):
        assert sq.background_length(c.power(4)) == pytest.approx(4 * sq.background_length(c), rel=1e-12)
