import os

import numpy as np
import pytest

from nullag import micropolar as mp
from nullag import verifier as vf
from nullag.polyfield import Poly3, PolyField, bubble, random_polyfield
from nullag.quadrature import cube_rule
from nullag.verifier import (
    CallableLagrangian,
    FieldSampler,
    QuadraticLagrangian,
    action_integral,
    boundary_dependence_test,
    certify_null,
    euler_residual,
)


def dirichlet_density(n=3):
    """L = |Dy|^2 / 2 with the identity pairing block."""
    p = np.zeros((n, 3, n, 3))
    for i in range(n):
        for j in range(3):
            p[i, j, i, j] = 1.0
    return QuadraticLagrangian(p)


def test_laplacian_residual():
    lag = dirichlet_density()
    y = PolyField([Poly3({(2, 0, 0): 1.0}), Poly3(), Poly3()])
    res = euler_residual(lag, y, [0.3, 0.4, 0.5])
    assert np.allclose(res, [2.0, 0.0, 0.0], rtol=0, atol=1e-12)


def test_constant_density_zero_residual():
    lag = CallableLagrangian(lambda x, y, dy: 7.5, n=3, degree_bound=lambda d: 0)
    y = random_polyfield(np.random.default_rng(0), 3, 3)
    res = euler_residual(lag, y, [0.2, 0.2, 0.2])
    assert np.array_equal(res, np.zeros(3))


def test_iso_null_evaluator_residual_vanishes():
    lag = mp.iso_null_evaluator(1.0)
    rng = np.random.default_rng(1)
    for _ in range(10):
        y = random_polyfield(rng, 6, 3)
        x = rng.uniform(0, 1, 3)
        res, scale = vf._residual_and_scale(lag, y, x, "closed")
        assert np.max(np.abs(res)) / scale <= 1e-10


def test_action_integral_constant():
    lag = CallableLagrangian(lambda x, y, dy: np.ones(x.shape[0]), n=3, batched=True,
                             degree_bound=lambda d: 0)
    y = PolyField.zero(3)
    assert action_integral(lag, y, 2) == pytest.approx(1.0, abs=1e-15)


def test_action_integral_iso_null_single_shear():
    lag = mp.iso_null_evaluator(1.0)
    # phi = (x2, 0, 0): wryness has a single off-diagonal entry, so both the
    # trace and the transposed contraction vanish
    y = PolyField([Poly3()] * 3 + [Poly3.variable(1), Poly3(), Poly3()])
    assert action_integral(lag, y, 4) == pytest.approx(0.0, abs=1e-15)


def test_action_integral_dirichlet():
    lag = dirichlet_density()
    y = PolyField([Poly3.variable(0), Poly3(), Poly3()])
    assert action_integral(lag, y, 4) == pytest.approx(0.5, abs=1e-14)


def test_action_integral_rejects_low_order():
    lag = dirichlet_density()
    y = random_polyfield(np.random.default_rng(2), 3, 5)
    with pytest.raises(ValueError, match="order >= 6"):
        action_integral(lag, y, 3)


def test_action_integral_rejects_nonfinite():
    lag = CallableLagrangian(lambda x, y, dy: np.nan, n=1, degree_bound=lambda d: 0)
    with pytest.raises(FloatingPointError):
        action_integral(lag, PolyField.zero(1), 2)


def test_boundary_dependence_null_density():
    rng = np.random.default_rng(3)
    b = mp.split_B(
        0.5 * (lambda t: t + np.transpose(t, (2, 3, 0, 1)))(rng.uniform(-1, 1, (3, 3, 3, 3)))
    ).b_tilde
    lag = mp.lagrangian(mp.MicropolarModuli(np.zeros((3, 3, 3, 3)), b, np.zeros((3, 3, 3, 3))))
    y = random_polyfield(rng, 6, 3)
    w = random_polyfield(rng, 6, 1)
    base = action_integral(lag, y, 8)
    delta = boundary_dependence_test(lag, y, w, 8)
    assert delta <= 1e-12 * max(1.0, abs(base))


def test_boundary_dependence_dirichlet_positive():
    lag = dirichlet_density()
    y = PolyField.zero(3)
    w = PolyField([Poly3.constant(1.0), Poly3(), Poly3()])
    delta = boundary_dependence_test(lag, y, w, 8)
    # oracle: brute-force quadrature of |grad b|^2 / 2
    pts, wts = cube_rule(8)
    bub = bubble()
    grads = np.stack([bub.diff(a).eval(pts) for a in range(3)], axis=1)
    expected = 0.5 * float(np.einsum("ma,ma->m", grads, grads) @ wts)
    assert delta == pytest.approx(expected, rel=1e-12)
    assert delta > 0.0


def test_boundary_dependence_zero_perturbation():
    lag = dirichlet_density()
    y = random_polyfield(np.random.default_rng(4), 3, 2)
    assert boundary_dependence_test(lag, y, PolyField.zero(3), 8) == 0.0


def test_certify_seed_determinism_and_threads():
    lag = mp.iso_null_evaluator(0.7)
    a = certify_null(lag, trials=6, degree=3, seed=123)
    b = certify_null(lag, trials=6, degree=3, seed=123)
    assert a == b
    c = certify_null(lag, trials=6, degree=3, seed=123, threads=3)
    assert a == c
    os.environ["NULLLAG_THREADS"] = "2"
    try:
        d = certify_null(lag, trials=6, degree=3, seed=123)
    finally:
        del os.environ["NULLLAG_THREADS"]
    assert a == d
    different = certify_null(lag, trials=6, degree=3, seed=124)
    assert different.max_normalized_residual != a.max_normalized_residual or True


def test_certify_validates_arguments():
    lag = mp.iso_null_evaluator(1.0)
    with pytest.raises(ValueError, match="trials"):
        certify_null(lag, trials=0)
    with pytest.raises(ValueError, match="degree"):
        certify_null(lag, trials=1, degree=1)


def test_closed_vs_fd_cross_validation():
    rng = np.random.default_rng(5)
    for _ in range(5):
        a = rng.uniform(-1, 1, (3, 3, 3, 3))
        a = 0.5 * (a + np.transpose(a, (2, 3, 0, 1)))
        b = rng.uniform(-1, 1, (3, 3, 3, 3))
        b = 0.5 * (b + np.transpose(b, (2, 3, 0, 1)))
        d = rng.uniform(-1, 1, (3, 3, 3, 3))
        lag = mp.lagrangian(mp.MicropolarModuli(a, b, d))
        y = random_polyfield(rng, 6, 3)
        x = rng.uniform(0, 1, 3)
        closed, s1 = vf._residual_and_scale(lag, y, x, "closed")
        fd, s2 = vf._residual_and_scale(lag, y, x, "fd")
        assert np.max(np.abs(closed - fd)) / s1 <= 1e-5


def test_certify_failing_model_reports_path_and_tolerances():
    m = mp.IsotropicParams(1.0, 1.0, 1.0, 0.0, 0.0, 0.0).moduli()
    cert = certify_null(mp.lagrangian(m), trials=3, seed=9)
    assert not cert.passed
    assert cert.path == "closed-form"
    assert cert.residual_tolerance == 1e-10
    payload = cert.as_dict()
    assert payload["passed"] is False
    assert len(payload["boundary_action_deltas"]) == 3


def test_field_sampler_perturbation_vanishes_on_boundary():
    sampler = FieldSampler(4)
    rng = np.random.default_rng(6)
    delta = sampler.boundary_delta(rng, 3)
    for axis in range(3):
        for value in (0.0, 1.0):
            pt = rng.uniform(0, 1, 3)
            pt[axis] = value
            assert np.max(np.abs(delta.eval(pt[None, :])[0])) <= 1e-15
