import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hawkes_perfect.errors import ConfigError, DimensionMismatch, TiltTooLarge, Unstable
from hawkes_perfect.model import (
    ModelParams,
    hbar,
    load_model,
    psi_f,
    sample_tilted_birth,
    stationary_intensity,
    validate_model,
)
from hawkes_perfect.rng import RandomStream

from conftest import scalar_model, zero_kernel


def test_validate_symmetric(sym2d):
    report = validate_model(sym2d)
    assert report.ok
    # eigenvalues of [[.5,.25],[.25,.5]] are .75 and .25
    assert report.spectral_radius == pytest.approx(0.75, abs=1e-12)
    assert report.max_tilt == 2.0


def test_validate_zero_kernel():
    report = validate_model(scalar_model(alpha=0.0, beta=1.0))
    assert report.spectral_radius == 0.0 and report.ok


def test_validate_unstable():
    with pytest.raises(Unstable):
        validate_model(scalar_model(alpha=2.0, beta=1.0))
    report = validate_model(scalar_model(alpha=2.0, beta=1.0), raise_on_error=False)
    assert not report.stable and report.spectral_radius == pytest.approx(2.0)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        ModelParams.exponential([1.0, 1.0, 1.0], [[1, 2], [2, 1]], [[2, 8], [8, 2]])
    with pytest.raises(DimensionMismatch):
        ModelParams.exponential([1.0], [[1, 2]], [[2, 8]])


def test_bad_kernel_entries():
    with pytest.raises(ConfigError):
        ModelParams.exponential([1.0], [[-1.0]], [[1.0]])
    with pytest.raises(ConfigError):
        ModelParams.exponential([1.0], [[1.0]], [[0.0]])


def test_hbar_examples(sym2d):
    np.testing.assert_array_equal(hbar(sym2d), [[0.5, 0.25], [0.25, 0.5]])
    np.testing.assert_array_equal(hbar(zero_kernel([1.0, 2.0])), np.zeros((2, 2)))
    assert hbar(scalar_model(alpha=1.0, beta=2.0))[0, 0] == 0.5


@pytest.mark.parametrize("name", ["sym2d", "asym5d"])
def test_hbar_matches_quadrature(name, request):
    params = request.getfixturevalue(name)
    k = params.kernel
    for i in range(params.d):
        for j in range(params.d):
            val, _ = quad(lambda t: k.h(i, j, t), 0.0, 200.0 / k.beta[i, j], epsabs=1e-13, epsrel=1e-13)
            assert abs(val - hbar(params)[i, j]) < 1e-8


def test_stationary_intensity_paper_values(sym2d, asym5d):
    np.testing.assert_allclose(stationary_intensity(sym2d), [4.0, 4.0], atol=1e-12)
    np.testing.assert_allclose(
        stationary_intensity(asym5d), [0.5640, 0.5534, 0.6163, 0.6860, 0.9346], atol=5e-5
    )


def test_stationary_intensity_no_excitation():
    np.testing.assert_array_equal(stationary_intensity(zero_kernel([1.5, 0.5])), [1.5, 0.5])


def test_stationary_intensity_unstable():
    with pytest.raises(Unstable):
        stationary_intensity(scalar_model(alpha=2.0, beta=1.0))


stable_models = st.integers(1, 4).flatmap(
    lambda d: st.tuples(
        st.lists(st.floats(0.05, 3.0), min_size=d, max_size=d),
        st.lists(st.floats(0.0, 1.0), min_size=d * d, max_size=d * d),
        st.lists(st.floats(0.2, 10.0), min_size=d * d, max_size=d * d),
        st.floats(0.05, 0.95),
    )
)


@settings(max_examples=60, deadline=None)
@given(stable_models)
def test_stationary_intensity_residual(spec):
    lam, raw, beta, target = spec
    d = len(lam)
    h = np.reshape(raw, (d, d))
    rho = np.max(np.abs(np.linalg.eigvals(h)))
    if rho > 1e-6:
        h = h * (target / rho)
    else:
        h = np.zeros_like(h)
    beta = np.reshape(beta, (d, d))
    params = ModelParams.exponential(lam, h * beta, beta)
    x = stationary_intensity(params)
    assert np.all(x > 0)
    assert np.max(np.abs(x - (params.lambda0 + hbar(params).T @ x))) < 1e-10


def test_psi_f_values():
    p = scalar_model(alpha=1.0, beta=2.0)
    assert psi_f(p, 0, 0, 0.0) == 0.0
    assert psi_f(p, 0, 0, 1.0) == pytest.approx(math.log(2.0), abs=1e-15)
    with pytest.raises(TiltTooLarge):
        psi_f(p, 0, 0, 2.0)


def test_psi_f_convex_increasing(asym5d):
    k = asym5d.kernel
    for i in range(5):
        for j in range(5):
            b = k.beta[i, j]
            grid = np.linspace(0.05, 0.95, 19) * b
            step = 1e-3 * b
            vals = [psi_f(asym5d, i, j, t) for t in grid]
            assert np.all(np.diff(vals) > 0)
            for t in grid:
                second = psi_f(asym5d, i, j, t + step) - 2 * psi_f(asym5d, i, j, t) + psi_f(asym5d, i, j, t - step)
                assert second > 0


@pytest.mark.parametrize("beta,eta", [(2.0, 0.0), (2.0, 1.0), (8.0, 0.0664)])
def test_tilted_birth_moments(beta, eta):
    rng = RandomStream(7, 0)
    p = scalar_model(alpha=0.5, beta=beta)
    n = 1_000_000
    draws = np.fromiter((sample_tilted_birth(p, 0, 0, eta, rng) for _ in range(n)), float, n)
    rate = beta - eta
    mean_se = (1 / rate) / math.sqrt(n)
    assert abs(draws.mean() - 1 / rate) < 4 * mean_se
    # var of the sample variance of Exp(r): (mu4 - sigma^4)/n = 8 / (r^4 n)
    var_se = math.sqrt(8.0 / n) / rate**2
    assert abs(draws.var(ddof=1) - 1 / rate**2) < 4 * var_se
    assert rng.draws == n


def test_tilted_birth_too_large():
    with pytest.raises(TiltTooLarge):
        sample_tilted_birth(scalar_model(beta=2.0), 0, 0, 2.0, RandomStream())


def test_load_model_roundtrip(tmp_path, asym5d):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(asym5d.to_dict()))
    loaded = load_model(path)
    np.testing.assert_array_equal(loaded.kernel.alpha, asym5d.kernel.alpha)
    np.testing.assert_array_equal(loaded.lambda0, asym5d.lambda0)


@pytest.mark.parametrize(
    "content",
    [
        "not json",
        json.dumps({"lambda0": [1.0]}),
        json.dumps({"lambda0": [1.0], "kernel": {"type": "powerlaw", "alpha": [[1]], "beta": [[2]]}}),
    ],
)
def test_load_model_errors(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    with pytest.raises(ConfigError):
        load_model(path)


def test_load_model_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_model(tmp_path / "nope.json")
