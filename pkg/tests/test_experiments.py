import math

import numpy as np
import pytest

from mlslab.experiments import (
    ExperimentConfig, GaugeError, gauge_check, gauge_normalize, isometry_difference, linearization_check,
    mls_probe, parry_average, positivity_check, radial_average, stability_probe, volume_identity,
)
from mlslab.homotopy import TorusClass, enumerate_classes
from mlslab.models import TorusModel, bolza
from mlslab.tensors import (
    HyperbolicField, TorusField, centered_bump, conformal, divergence, inner, random_field,
    random_potential, random_solenoidal,
)

DX2 = TorusField.constant([1.0, 0.0, 0.0], K=1)


def test_config_validation():
    cfg = ExperimentConfig.from_dict({"s": 0.2, "alpha": 0.6, "ensemble_size": 12})
    assert cfg.to_dict()["ensemble_size"] == 12
    with pytest.raises(ValueError):
        ExperimentConfig(s=0.6, alpha=0.5)
    with pytest.raises(ValueError):
        ExperimentConfig(nu=1.0)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"sigma": 1})


def test_linearization_closed_form(square):
    rep = linearization_check(square, DX2, (1e-2, 5e-3), classes=[TorusClass(1, 0)])
    R = rep.meta["R"]
    # sqrt(1+t) - 1 - t/2 = -t^2/8 + t^3/16 - ...
    for t, r in zip((1e-2, 5e-3), R):
        assert r == pytest.approx(abs(math.sqrt(1 + t) - 1 - t / 2), rel=1e-4)
    assert rep.meta["R_over_t2"][0] == pytest.approx(0.125, rel=0.01)
    assert rep.passed
    zero = linearization_check(square, TorusField.zeros(2, 1), (1e-2, 5e-3), classes=[TorusClass(1, 1)])
    assert max(zero.meta["R"]) <= 1e-14 and zero.passed
    with pytest.raises(ValueError):
        linearization_check(square, DX2, (1e-3, 1e-2), classes=[TorusClass(1, 0)])


def test_linearization_of_a_potential_is_second_order(skew):
    Dp, _ = random_potential(4, 2, model=skew, amplitude=0.5)
    rep = linearization_check(skew, Dp, (1e-2, 5e-3), bound=2)
    assert all(math.isfinite(x) for x in rep.meta["R_over_t2"])
    assert rep.passed


def test_positivity_examples(skew, square):
    classes = enumerate_classes("torus", 3)
    rep = positivity_check(square, DX2 * 0.1, classes)
    assert rep.passed and rep.meta["gated"] == 0
    assert all(row[5] >= 0 for row in rep.rows)
    Dp, _ = random_potential(1, 3, model=skew, amplitude=0.2)
    rep = positivity_check(skew, Dp, classes)
    assert rep.passed
    # gated rows carry no conclusion
    assert all(math.isnan(row[5]) for row in rep.rows if not row[4])


def test_volume_examples(skew):
    rep = volume_identity(skew, conformal(skew, TorusField.constant([0.3])) * 0.5)
    # f = c0 g0 with c0 = 0.3: fiber average of pi_2^* f is c0
    assert rep.rows[0][1] == pytest.approx(0.3, abs=1e-14)
    assert rep.passed
    c = np.zeros((3, 5, 5), dtype=complex)
    c[:, 3, 2] = c[:, 1, 2] = 0.5
    rep = volume_identity(skew, TorusField(2, c))
    assert abs(rep.rows[0][1]) < 1e-15 and abs(rep.rows[0][2]) < 1e-15 and rep.passed
    rep = volume_identity(skew, random_field(7, 8))
    assert rep.passed and rep.rows[0][3] <= 1e-10
    with pytest.raises(ValueError):
        volume_identity(skew, random_field(7, 2, degree=1))


def test_parry_constant_and_odd_integrands():
    model = bolza()
    one = HyperbolicField(0, constant=1.0)
    rep = parry_average(model, one, (6.0, 8.0), liouville=1.0)
    assert all(row[2] == 1.0 for row in rep.rows)
    form = HyperbolicField(1, centered_bump(1.0, 1, coeff=(1.0, 0.5)).bumps)
    rep = parry_average(model, form, (6.0, 8.0), liouville=0.0)
    # inverse classes have equal weights and opposite values
    assert all(abs(row[2]) < 1e-12 for row in rep.rows)
    with pytest.raises(ValueError):
        parry_average(model, one, (1.0, 2.0))


def test_radial_oracle_matches_liouville_quadrature():
    from mlslab.models import bolza_liouville

    F = centered_bump(1.0)
    oracle = radial_average(F)
    assert oracle == pytest.approx(0.10539501954011399, rel=1e-12)
    quad = bolza_liouville(lambda z, v: F.pullback(z, v), n_theta=48, n_rho=96)
    assert quad == pytest.approx(oracle, rel=1e-6)


def test_gauge_examples(skew):
    fs = random_solenoidal(3, 2, target_alpha_norm=0.05, model=skew)
    gauge, h, info = gauge_normalize(skew, fs)
    assert info["iterations"] == 0 and gauge.max_gradient() == 0.0
    Dp, p = random_potential(2, 2, model=skew, amplitude=0.02)
    _, h, info = gauge_normalize(skew, Dp)
    d = divergence(skew, h)
    assert math.sqrt(inner(skew, d, d)) <= 1e-6
    size = math.sqrt(inner(skew, Dp, Dp))
    assert math.sqrt(inner(skew, h, h)) < 0.2 * size
    with pytest.raises(ValueError):
        gauge_normalize(skew, random_field(0, 2, degree=1))


def test_gauge_rejects_large_fields(square):
    Dp, _ = random_potential(5, 2, amplitude=3.0)
    with pytest.raises(GaugeError):
        gauge_normalize(square, Dp, max_iter=5)


def test_isometry_recovery(skew):
    f, size = isometry_difference(skew, 3)
    assert size == 0.02
    rep = gauge_check(skew, [], isometry_seeds=(3,))
    assert rep.passed and rep.rows[0][3] <= 1e-5


def test_stability_probe_small():
    cfg = ExperimentConfig(ensemble_size=10, K=3, T_or_bound=4, seed=2)
    rep = stability_probe(TorusModel(), cfg)
    assert rep.passed and len(rep.rows) == 10
    again = stability_probe(TorusModel(), cfg)
    assert again.rows == rep.rows
    with pytest.raises(ValueError):
        stability_probe(TorusModel(), ExperimentConfig(ensemble_size=5))


def test_mls_probe_small(skew):
    cfg = ExperimentConfig(ensemble_size=1, K=2, n_isometry=1, seed=1)
    rep = mls_probe(skew, cfg, bound=2)
    assert rep.passed
    kinds = [row[1] for row in rep.rows]
    assert kinds == ["zero", "isometry", "solenoidal", "solenoidal"]
