import numpy as np
import pytest
import warnings

from frnse.errors import DivergenceDetected
from frnse.grid import (Field, GridSpec, h1_norm, scaled_gaussian,
                        random_band_limited, zero_field)
from frnse.kernel import KernelSpec, default_radius
from frnse.nonlinear import PhysParams
from frnse.propagate import free_evolve
from frnse.stepper import StepConfig, evolve, ifrk4_step

R16 = default_radius(1.6)


def _gaussian(spec, h1_target=0.5):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return scaled_gaussian(spec, 0.15, h1_target=h1_target)


def test_config_validation(kfull):
    params = PhysParams(1.0, 1.0)
    with pytest.raises(ValueError):
        StepConfig(dt=1e-2, T=0.0, kspec=kfull, params=params)
    with pytest.raises(ValueError):
        StepConfig(dt=1e-2, T=1.0, kspec=kfull, params=params, dt_min=1e-2)
    with pytest.raises(ValueError):
        StepConfig(dt=1e-2, T=1.0, kspec=kfull, params=params, h1_cap=0.0)
    with pytest.raises(ValueError):
        StepConfig(dt=1e-2, T=1.0, kspec=kfull, params=params,
                   snapshot_every=0)


def test_free_step_is_bitwise_free_propagator(gspec8, rng, kfull):
    psi = random_band_limited(gspec8, rng)
    cfg = StepConfig(dt=1e-2, T=1.0, kspec=kfull, params=PhysParams(0.7, 0.0))
    out = ifrk4_step(psi, 3e-3, cfg)
    ref = free_evolve(psi, 3e-3, 0.7)
    assert np.array_equal(out.values, ref.values)


def test_step_fourth_order(gspec8, kfull):
    from frnse.experiments import stepper_order_study

    phi = _gaussian(gspec8, h1_target=2.0)
    cfg = StepConfig(dt=1e-3, T=0.1, kspec=kfull, params=PhysParams(1.0, 4.0),
                     dt_min=1e-12, snapshot_every=10**9)
    order, budget, _ = stepper_order_study(phi, cfg, steps=(32, 64, 128))
    assert order == pytest.approx(4.0, rel=0.25)
    assert budget > 0.0


def test_evolve_diagnostics_aligned(gspec8, kfull):
    phi = _gaussian(gspec8)
    cfg = StepConfig(dt=5e-3, T=0.05, kspec=kfull, params=PhysParams(1.0, 1.0),
                     snapshot_every=3)
    traj, rep = evolve(phi, cfg)
    assert rep.completed()
    assert rep.steps == 10
    assert rep.rejections == 0
    n = len(rep.times)
    assert n == 11
    for arr in (rep.l2, rep.h1, rep.g1_energy, rep.balance_residual, rep.dts):
        assert len(arr) == n
    assert rep.dts[0] == 0.0
    assert rep.times[-1] == pytest.approx(0.05, abs=1e-12)
    # snapshots: node 0, every 3rd accepted step, and the final state
    assert np.allclose(traj.times, [0.0, 0.015, 0.03, 0.045, 0.05])


def test_evolve_free_case_matches_propagator(gspec8, rng, kfull):
    psi = random_band_limited(gspec8, rng)
    cfg = StepConfig(dt=1e-2, T=0.1, kspec=kfull, params=PhysParams(1.0, 0.0),
                     snapshot_every=10**9)
    traj, rep = evolve(psi, cfg)
    ref = free_evolve(psi, 0.1, 1.0)
    err = np.max(np.abs(traj.fields[-1].values - ref.values))
    assert err < 1e-12


def test_balance_residual_small(gspec16, kfull):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        phi = scaled_gaussian(gspec16, 0.15, l2_target=1.0)
    cfg = StepConfig(dt=2.5e-3, T=0.1, kspec=kfull,
                     params=PhysParams(1.0, 1.0), snapshot_every=10**9)
    _, rep = evolve(phi, cfg)
    assert rep.completed()
    mid = rep.balance_residual[1:-1]  # one-sided end stencils are cruder
    assert np.max(np.abs(mid)) < 1e-5
    # unit-norm datum stays pinned to the invariant sphere
    assert np.max(np.abs(rep.l2 - 1.0)) < 1e-6


def test_immediate_blowup_flag(gspec8, kfull):
    phi = _gaussian(gspec8, h1_target=2.0)
    cfg = StepConfig(dt=1e-2, T=1.0, kspec=kfull, params=PhysParams(1.0, 1.0),
                     h1_cap=1.0)
    traj, rep = evolve(phi, cfg)
    assert rep.status == "BlowupSuspected"
    assert rep.escape_time == 0.0
    assert rep.steps == 0
    assert len(traj) == 1


def test_cap_escalation_reports_escape_time(gspec16, kfull):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        phi = scaled_gaussian(gspec16, 0.12, l2_target=1.0)
    cfg = StepConfig(dt=5e-3, T=2.0, kspec=kfull, params=PhysParams(1.0, 50.0),
                     h1_cap=h1_norm(phi) * 1.02, dt_min=1e-4,
                     snapshot_every=10**9)
    traj, rep = evolve(phi, cfg)
    assert rep.status == "BlowupSuspected"
    assert 0.0 < rep.escape_time < 0.01
    assert rep.rejections > 0
    assert not rep.completed()
    # trajectory still ends at the last accepted state
    assert traj.times[-1] == rep.times[-1]


def test_nonfinite_initial_raises(gspec8, kfull):
    bad = zero_field(gspec8)
    values = bad.values.copy()
    values[0, 0, 0] = np.nan
    cfg = StepConfig(dt=1e-2, T=0.1, kspec=kfull, params=PhysParams(1.0, 1.0))
    with pytest.raises(DivergenceDetected):
        evolve(Field(gspec8, values), cfg)
