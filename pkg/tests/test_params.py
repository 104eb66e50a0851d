import math

import numpy as np
import pytest

from spinsqueeze.params import (
    ConfigError,
    EffectiveParams,
    ParameterError,
    ReductionInvalidError,
    SqueezedVacuum,
    ThreeLevelParams,
    internal_units,
    reduce,
    resolve_parameters,
)


def three_level(**overrides):
    base = dict(
        gamma=1.0,
        gamma0=1e-3,
        N=1e6,
        g=0.02,
        Omega1=math.sqrt(10.0),
        Delta1=100.0,
        Delta2=100.0,
        Delta_c=0.0,
        kappa=2.0,
        tau=1.0,
        Lambda1=0.0,
    )
    base.update(overrides)
    return ThreeLevelParams(**base)


def test_reduction_recovers_bare_cooperativity():
    # Delta = 100 gamma, Omega1 = sqrt(10) gamma, gamma0 = gamma/1000:
    # residual pumping equals gamma0 and the effective cooperativity
    # equals the bare one.
    p = three_level()
    red = reduce(p)
    assert red.Gamma_p == pytest.approx(1e-3, rel=1e-12)
    assert red.effective.Gamma_p_ratio == pytest.approx(1.0, rel=1e-12)
    assert red.effective.Ctilde == pytest.approx(p.cooperativity, rel=1e-12)
    assert p.cooperativity == pytest.approx(100.0, rel=1e-12)
    assert red.effective.rho == pytest.approx(5e-4, rel=1e-12)


def test_reduction_no_pump_is_trivial():
    p = three_level(Omega1=0.0)
    red = reduce(p)
    assert red.g_tilde == 0.0
    assert red.effective.Ctilde == 0.0
    assert red.Gamma_p == 0.0


def test_reduction_light_shift_sum():
    # two-photon detuning zero, pump light shift 10 gamma0, no probe shift
    p = three_level(Omega1=math.sqrt(10.0 * 1e-3 * 100.0))
    red = reduce(p, mean_intensity=0.0)
    assert red.delta_tilde == pytest.approx(abs(p.Omega1) ** 2 / p.Delta, rel=1e-12)
    assert red.effective.delta_bar == pytest.approx(10.0, rel=1e-12)


def test_reduction_homogeneity():
    p = three_level()
    k = 3.7
    q = three_level(Omega1=p.Omega1 * k, Delta1=p.Delta1 * k, Delta2=p.Delta2 * k)
    a, b = reduce(p), reduce(q)
    assert b.g_tilde == pytest.approx(a.g_tilde, rel=1e-12)
    assert b.Gamma_p == pytest.approx(a.Gamma_p, rel=1e-12)
    assert b.effective.Ctilde == pytest.approx(a.effective.Ctilde, rel=1e-12)


def test_reduction_invalid_detuning():
    p = three_level(Delta1=5.0, Delta2=5.0)
    with pytest.raises(ReductionInvalidError):
        reduce(p)
    # threshold is configurable
    reduce(p, min_detuning_factor=1.0)


def test_pump_sum_invariant():
    with pytest.raises(ParameterError):
        three_level(Lambda1=0.5, Lambda2=0.7)  # != N*gamma0
    p = three_level(Lambda1=400.0)
    assert p.Lambda2 == pytest.approx(1e6 * 1e-3 - 400.0)


def test_effective_invariants():
    with pytest.raises(ParameterError):
        EffectiveParams(Ctilde=10.0, delta_bar=0.0, lambda1=0.3, lambda2=0.3)
    with pytest.raises(ParameterError):
        EffectiveParams(Ctilde=-1.0, delta_bar=0.0)
    with pytest.raises(ParameterError):
        EffectiveParams(Ctilde=1.0, delta_bar=0.0, rho=0.0)


def test_internal_units_scale():
    u = internal_units(EffectiveParams(Ctilde=100.0, delta_bar=0.0, rho=1.0 / 2000.0))
    assert u.kappa == pytest.approx(2000.0)
    assert u.gamma0 == 1.0
    # the coupling reproduces the requested cooperativity
    C = u.g_tilde**2 * u.N * (u.lambda2 - u.lambda1) / (2.0 * u.kappa * u.tau)
    assert C == pytest.approx(100.0, rel=1e-12)


def test_squeezed_vacuum_correlations():
    vac = SqueezedVacuum().correlations()
    assert np.allclose(vac, np.diag([1.0, 0.0]))
    v = SqueezedVacuum(r=0.5, theta=0.3).correlations()
    assert v[0, 0] == pytest.approx(math.cosh(0.5) ** 2)
    assert v[1, 1] == pytest.approx(math.sinh(0.5) ** 2)
    assert abs(v[0, 1]) == pytest.approx(0.5 * math.sinh(1.0))
    assert np.allclose(v, v.conj().T)


def _physical_mapping(delta_bar=10.0):
    delta = delta_bar * 1e-3 - 10.0 / 100.0  # target two-photon detuning
    return {
        "gamma": "1.0",
        "gamma0": "1e-3",
        "N": "1e6",
        "g": "0.02",
        "Omega1": repr(math.sqrt(10.0)),
        "Delta1": repr(100.0 + 0.5 * delta),
        "Delta2": repr(100.0 - 0.5 * delta),
        "Delta_c": "0.0",
        "kappa": "2.0",
        "tau": "1.0",
    }


def test_resolve_physical_only():
    eff, three = resolve_parameters(physical=_physical_mapping())
    assert three is not None
    assert eff.Ctilde == pytest.approx(100.0, rel=1e-9)
    assert eff.delta_bar == pytest.approx(10.0, rel=1e-9)


def test_resolve_consistent_pair():
    dimensionless = {
        "Ctilde": "100",
        "delta_tilde": "10",
        "delta_c": "0",
        "rho": "0.0005",
        "lambda1": "0",
    }
    eff, _ = resolve_parameters(physical=_physical_mapping(), dimensionless=dimensionless)
    assert eff.Ctilde == pytest.approx(100.0)


def test_resolve_inconsistent_pair_is_an_error():
    dimensionless = {"Ctilde": "100", "delta_tilde": "11", "delta_c": "0", "rho": "0.0005"}
    with pytest.raises(ConfigError):
        resolve_parameters(physical=_physical_mapping(), dimensionless=dimensionless)


def test_resolve_nothing_is_an_error():
    with pytest.raises(ConfigError):
        resolve_parameters()
