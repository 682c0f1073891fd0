import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "..", "python"))

import mmot_coulomb as mc


def test_grid_and_density():
    g = mc.build_grid(1, -1.0, 1.0, 32)
    assert g.spacing == pytest.approx(2.0 / 32)
    rho = mc.gaussian_density(g, [0.0], 0.15)
    assert rho.mass() == pytest.approx(1.0, abs=1e-12)
    assert mc.sqrt_density_h1(rho) >= 1.0 - 1e-10
    with pytest.raises(mc.MmotError):
        mc.build_grid(1, 0.0, 0.0, 8)


def test_two_cell_solve():
    g = mc.build_grid(1, 0.0, 2.0, 2)
    rho = mc.density_from_values(g, np.array([0.5, 0.5]))
    sol = mc.solve_mmot(rho, 2, method="exact")
    assert sol.feasible
    assert sol.cost == pytest.approx(1.0, abs=1e-9)
    plan = sol.plan.values.reshape(2, 2)
    h2 = g.spacing ** 2
    assert plan[0, 1] * h2 == pytest.approx(0.5, abs=1e-9)
    assert plan[1, 0] * h2 == pytest.approx(0.5, abs=1e-9)


def test_smoothing_restores_marginals():
    g = mc.build_grid(1, -1.0, 1.0, 24)
    x = np.array([g.center(0, i) for i in range(24)])
    vals = np.maximum(0.0, 1 - ((x + 0.5) / 0.3) ** 2) ** 2 + \
        np.maximum(0.0, 1 - ((x - 0.5) / 0.3) ** 2) ** 2
    rho = mc.density_from_values(g, vals)
    sol = mc.solve_mmot(rho, 2)
    plan = mc.symmetrize(sol.plan)
    sp = mc.smooth_plan(plan, rho, 2.0 * g.spacing)
    m = mc.marginal(sp.p_restored, 1)
    err = np.abs(m.values - rho.values).sum() * g.spacing
    assert err <= 1e-10
    assert sp.kinetic <= sp.kinetic_bound * 1.05


def test_fermionic_construction():
    g = mc.build_grid(3, 0.0, 1.0, 4)
    n = 4
    alpha = 0.4
    centers = np.array([g.center(0, i) for i in range(n)])
    # symmetric pair field vanishing on D_alpha
    idx = np.indices((n,) * 6).reshape(6, -1)
    xs = centers[idx[:3]]
    ys = centers[idx[3:]]
    dist = np.sqrt(((xs - ys) ** 2).sum(axis=0))
    ca, cb = 0.3, 0.7
    clus = lambda p, c: np.exp(-((p - c) ** 2).sum(axis=0) / (2 * 0.22 ** 2))
    vals = (clus(xs, ca) * clus(ys, cb) + clus(xs, cb) * clus(ys, ca))
    s = np.clip((dist - alpha) / alpha, 0.0, 1.0)
    vals = vals * s * s * (3 - 2 * s)
    psi = mc.field_from_values(g, 2, vals)
    aux = mc.aux_pair(alpha / math.sqrt(3.0), "trig")
    wf = mc.build_fermionic(psi, alpha, aux)
    rep = mc.verify_statistics(wf)
    assert rep.max_density_error <= 1e-12
    assert rep.max_antisymmetry_violation <= 1e-12
    dens = wf.density()
    assert dens == pytest.approx(vals ** 2, abs=1e-12)
    comps = wf.components
    assert len(comps) == 4
    assert np.all(comps[1] == 0) and np.all(comps[2] == 0)


def test_bosonic_sweep():
    g = mc.build_grid(1, -1.0, 1.0, 32)
    x = np.array([g.center(0, i) for i in range(32)])
    vals = np.maximum(0.0, 1 - ((x + 0.5) / 0.2) ** 2) ** 2 + \
        np.maximum(0.0, 1 - ((x - 0.5) / 0.2) ** 2) ** 2
    rho = mc.density_from_values(g, vals)
    rep = mc.sweep(rho, [1e-1, 1e-2, 1e-3], statistics="bosonic")
    assert rep.complete
    gaps = [r.gap for r in rep.rows]
    assert gaps == sorted(gaps, reverse=True)
    assert rep.rows[-1].upper >= rep.c_ref - 1e-9
    assert rep.csv().startswith("hbar,eps,alpha,T,Vee,F_upper,C_ref,gap")


def test_constants_and_dgf(tmp_path):
    k, K = mc.mollifier_constant(1)
    assert k == pytest.approx(2.2522836210435810, rel=1e-10)
    assert K == pytest.approx(12.576977273625816, rel=1e-10)

    g = mc.build_grid(1, 0.0, 1.0, 8)
    rho = mc.uniform_density(g, [0.0], [1.0])
    path = str(tmp_path / "rho.dgf1")
    mc.write_dgf1(path, rho)
    dim, arity, n, values = mc.read_dgf1(path)
    assert (dim, arity, n) == (1, 1, 8)
    assert values == pytest.approx(rho.values, abs=0)
