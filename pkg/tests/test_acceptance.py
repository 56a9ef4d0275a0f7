"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they complete. Every tolerance is pinned here; the runtime budget
of each criterion is asserted as well.
"""

import math
import time
from itertools import permutations

import numpy as np
import pytest

from graphlim import (
    ClusterSubspace,
    ConstantKernel,
    FixedPointSubspace,
    ImageSubspace,
    MatrixKernel,
    MeasureState,
    canonical_embedding,
    check_automorphism,
    continuity_experiment,
    discretize,
    equivariance_audit,
    geodesic_kernel,
    ghost_experiment,
    graphop_from_weighted,
    grid_shift_map,
    integrate,
    integrate_meanfield,
    interval_reflection_map,
    invariance_audit,
    inf_to_one_norm_exact,
    inf_to_one_norm_lower,
    kuramoto_model,
    l1_distance,
    make_finite_space,
    make_grid_space,
    measure_distance,
    permutation_map,
    project_fixed,
    pullback,
    sample_er,
    scaling_map,
    spherical_graphop,
    sphere_reflection_map,
    sphere_rotation_map,
    swap_map,
    torus_flip_map,
    torus_rotation_map,
    twisted_residual,
    uniform_space,
)


def _verdict(number, ok, text, elapsed, budget):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {number:2d} {status}: {text} ({elapsed:.2f}s, budget {budget:.0f}s)",
          flush=True)
    assert ok, f"criterion {number} failed: {text}"
    assert elapsed < budget, f"criterion {number} exceeded its {budget}s budget: {elapsed:.2f}s"


def test_criterion_01_weighted_graph_rhs_exact():
    t0 = time.perf_counter()
    w = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.9], [0.0, 0.9, 0.0]])
    space = make_finite_space([3 / 10, 1 / 2, 1 / 5])
    sys = discretize(MatrixKernel(w), space)
    expected = [(np.array([1]), np.array([1 / 2])),
                (np.array([0, 2]), np.array([3 / 10, 9 / 50])),
                (np.array([1]), np.array([9 / 20]))]
    ok = True
    for i, (idx, vals) in enumerate(expected):
        got_idx, got_w = sys.row(i)
        ok &= np.array_equal(got_idx, idx)
        ok &= bool(np.all(np.abs(got_w - vals) <= 1e-15 * np.abs(vals)))
    _verdict(1, ok, "weighted path coupling coefficients exact to 1e-15 relative",
             time.perf_counter() - t0, 1.0)


def test_criterion_02_finite_graphop_fibers_and_automorphisms():
    t0 = time.perf_counter()
    w = np.zeros((4, 4))
    w[0, 1] = w[1, 0] = 1.0
    w[2, 3] = w[3, 2] = 0.5
    space = make_finite_space([2 / 9, 1 / 9, 4 / 9, 2 / 9])
    fs = graphop_from_weighted(w, space)
    fibers = [fs.row(i) for i in range(4)]
    expected = [([1], [1 / 9]), ([0], [2 / 9]), ([3], [1 / 9]), ([2], [2 / 9])]
    ok = all(f[0].tolist() == e[0] and f[1].tolist() == e[1]
             for f, e in zip(fibers, expected))

    ok &= check_automorphism(fs, permutation_map([2, 3, 0, 1]), 1e-12).verdict \
        == "graphop_automorphism"
    ok &= check_automorphism(fs, permutation_map([3, 1, 2, 0]), 1e-12).verdict \
        == "measure_preserving_only"
    graphon_autos = [p for p in permutations(range(4))
                     if check_automorphism(fs, permutation_map(list(p)), 1e-12).verdict
                     == "graphon_automorphism"]
    ok &= graphon_autos == [(0, 1, 2, 3)]
    _verdict(2, ok, "four-vertex fibers exact; automorphism classification over S4",
             time.perf_counter() - t0, 1.0)


def test_criterion_03_twisted_state_equilibria():
    t0 = time.perf_counter()
    cases = [((30, 30), [1, 3]), ((30,), [1]), ((30,), [2]), ((30,), [3]),
             ((12, 12, 12), [2, 1, 1])]
    worst = max(twisted_residual(make_grid_space("torus", res), 0.15, q)
                for res, q in cases)
    _verdict(3, worst <= 1e-12, f"twisted-state residuals at most {worst:.2e}",
             time.perf_counter() - t0, 10.0)


def test_criterion_04_continuity_bound_on_random_pairs():
    t0 = time.perf_counter()
    space = uniform_space(12)
    violations = 0
    for seed in range(50):
        rng = np.random.Generator(np.random.Philox(seed))
        a = rng.uniform(0, 1, (12, 12))
        b = rng.uniform(0, 1, (12, 12))
        a = (a + a.T) / 2
        b = (b + b.T) / 2
        u0 = rng.uniform(0, 2 * np.pi, 12)
        rep = continuity_experiment(space, MatrixKernel(a), MatrixKernel(b),
                                    u0, u0, 2.0, 1e-3, sample_every=1)
        assert rep.parameters["norm_method"] == "exact_bruteforce"
        if rep.passed is not True:
            violations += 1
    _verdict(4, violations == 0,
             "trajectory distance within the growth bound for 50 seeded kernel pairs",
             time.perf_counter() - t0, 300.0)


def test_criterion_05_ghost_bound_on_sampled_graphs():
    t0 = time.perf_counter()
    n = 16
    rng = np.random.Generator(np.random.Philox(500))
    m = swap_map(n, 2, 11)
    u0 = rng.uniform(0, 2 * np.pi, n)
    u0[11] = u0[2]
    ok = True
    for seed in range(20):
        rep = ghost_experiment(n, 0.5, seed, u0, m, 2.0, 1e-3, sample_every=10)
        ok &= rep.passed is True

    # exactly representable limit: constant kernel keeps the symmetry to 1e-10
    sysc = discretize(ConstantKernel(0.5), uniform_space(n))
    u0s = project_fixed([m], u0)
    traj = integrate(sysc, kuramoto_model(0.0, 0.0), u0s, 10.0, 1e-3, sample_every=100)
    drift = max(l1_distance(sysc.space, pullback(m, s), s) for s in traj.states)
    ok &= drift <= 1e-10
    _verdict(5, ok, f"ghost bound holds for 20 seeds; exact-limit drift {drift:.1e}",
             time.perf_counter() - t0, 300.0)


def test_criterion_06_invariant_subspaces():
    t0 = time.perf_counter()
    model = kuramoto_model(0.0, 0.3)
    rng = np.random.Generator(np.random.Philox(600))
    ok = True

    # twin-block cluster
    n, k = 12, 5
    w = rng.uniform(0, 1, (n, n))
    w = (w + w.T) / 2
    w[:k, :] = w[0, :]
    w[:, :k] = w[:k, :].T
    w[:k, :k] = 0.7
    sys_twin = discretize(MatrixKernel(w), uniform_space(n))
    u0 = rng.uniform(0, 2 * np.pi, n)
    u0[:k] = u0[0]
    d_twin = invariance_audit(sys_twin, model, ClusterSubspace([np.arange(k)]),
                              u0, 10.0, 1e-3, sample_every=100)
    ok &= d_twin <= 1e-10

    # half-periodic states on the constant kernel (image of the doubling map)
    space = make_grid_space("interval", (32,))
    sys_const = discretize(ConstantKernel(1.0), space)
    half = rng.uniform(0, 2 * np.pi, 16)
    d_half = invariance_audit(sys_const, model, ImageSubspace(scaling_map(space, 2)),
                              np.concatenate([half, half]), 10.0, 1e-3, sample_every=100)
    ok &= d_half <= 1e-10

    # even states u(x) = u(1-x)
    refl = interval_reflection_map(space)
    u_even = project_fixed([refl], rng.uniform(0, 2 * np.pi, 32))
    d_even = invariance_audit(sys_const, model, FixedPointSubspace([refl]),
                              u_even, 10.0, 1e-3, sample_every=100)
    ok &= d_even <= 1e-10

    # block-structure reduction reproduces the finite graph dynamics
    adj = np.array([[0, 1, 0, 0, 1],
                    [1, 0, 1, 0, 0],
                    [0, 1, 0, 1, 1],
                    [0, 0, 1, 0, 1],
                    [1, 0, 1, 1, 0]], dtype=float)
    cells_per_block = 8
    grid = make_grid_space("interval", (5 * cells_per_block,))
    sys_blocks = discretize(canonical_embedding(adj), grid)
    sys_finite = discretize(MatrixKernel(adj), uniform_space(5))
    u5 = rng.uniform(0, 2 * np.pi, 5)
    tr_b = integrate(sys_blocks, model, np.repeat(u5, cells_per_block), 10.0, 1e-3,
                     sample_every=100)
    tr_f = integrate(sys_finite, model, u5, 10.0, 1e-3, sample_every=100)
    d_red = max(float(np.max(np.abs(b[::cells_per_block] - f)))
                for b, f in zip(tr_b.states, tr_f.states))
    ok &= d_red <= 1e-10

    _verdict(6, ok,
             f"subspace drifts {max(d_twin, d_half, d_even):.1e}; "
             f"block reduction error {d_red:.1e}",
             time.perf_counter() - t0, 120.0)


def test_criterion_07_equivariance_audits():
    t0 = time.perf_counter()
    rng = np.random.Generator(np.random.Philox(700))
    ok = True
    worst = 0.0

    torus = make_grid_space("torus", (30, 30))
    sys_t = discretize(geodesic_kernel("torus", 0.15, dim=2), torus)
    u0 = rng.uniform(0, 2 * np.pi, torus.n)
    model = kuramoto_model(0.0, 1.0)
    for m in (grid_shift_map(torus, (1, 0)), grid_shift_map(torus, (3, 7)),
              torus_rotation_map(torus), torus_flip_map(torus, 1)):
        assert check_automorphism(sys_t, m, 1e-12).verdict == "graphon_automorphism"
        dev = equivariance_audit(sys_t, model, m, u0, 5.0, 1e-2)
        worst = max(worst, dev)
        ok &= dev <= 1e-8

    sphere = make_grid_space("sphere2", (468,), symmetry_order=12)
    sys_s = discretize(geodesic_kernel("sphere2", math.pi / 2), sphere)
    fib_s = spherical_graphop(sphere)
    v0 = rng.uniform(0, 2 * np.pi, sphere.n)
    for system in (sys_s, fib_s):
        for m in (sphere_rotation_map(sphere), sphere_reflection_map(sphere)):
            report = check_automorphism(system, m, 1e-12)
            assert report.fiber_preserving
            dev = equivariance_audit(system, model, m, v0, 5.0, 1e-2)
            worst = max(worst, dev)
            ok &= dev <= 1e-8

    er = sample_er(16, 0.5, 3)
    bad = permutation_map(np.random.Generator(np.random.Philox(77)).permutation(16))
    assert check_automorphism(er, bad, 1e-9).verdict != "graphon_automorphism"
    control = equivariance_audit(er, kuramoto_model(0.0, 0.0), bad,
                                 rng.uniform(0, 2 * np.pi, 16), 5.0, 1e-2)
    ok &= control >= 1e-3

    _verdict(7, ok,
             f"automorphism commutators at most {worst:.1e}; "
             f"positive control {control:.1e}",
             time.perf_counter() - t0, 300.0)


def test_criterion_08_norm_oracle():
    t0 = time.perf_counter()
    space = uniform_space(8)
    mu = space.weights
    ids = np.arange(256)
    signs = 1.0 - 2.0 * ((ids[None, :] >> np.arange(8)[:, None]) & 1)
    ok = True
    for seed in range(100):
        rng = np.random.Generator(np.random.Philox(seed))
        d = rng.uniform(-1, 1, (8, 8))
        d = (d + d.T) / 2
        b = mu[:, None] * d * mu[None, :]
        full = float(np.max(np.abs(signs.T @ b @ signs)))
        exact = inf_to_one_norm_exact(space, d).value
        ok &= abs(full - exact) <= 1e-13
        lower = inf_to_one_norm_lower(space, d, restarts=16, seed=seed).value
        ok &= lower <= exact + 1e-12

    const = inf_to_one_norm_exact(uniform_space(6), np.full((6, 6), 0.4))
    ok &= abs(const.value - 0.4) <= 1e-12
    ok &= np.all(const.witness_f == 1.0) and np.all(const.witness_g == 1.0)
    _verdict(8, ok, "exact norm matches full enumeration on 100 instances",
             time.perf_counter() - t0, 120.0)


def test_criterion_09_meanfield():
    t0 = time.perf_counter()
    rng = np.random.Generator(np.random.Philox(900))
    ok = True

    # Dirac clouds follow the node dynamics
    sys_c = discretize(ConstantKernel(1.0), uniform_space(16))
    u0 = rng.uniform(0, 2 * np.pi, 16)
    td = integrate(sys_c, kuramoto_model(0.0, 0.0), u0, 3.0, 1e-3, sample_every=50)
    tm = integrate_meanfield(sys_c, MeasureState(u0[:, None]), 3.0, 1e-3, sample_every=50)
    d_dirac = max(float(np.max(np.abs(a - b[:, 0]))) for a, b in zip(td.states, tm.states))
    ok &= d_dirac <= 1e-12

    # block-constant clouds stay block-constant
    space = make_grid_space("interval", (12,))
    sys_b = discretize(canonical_embedding(np.array([[1.0, 0.4], [0.4, 0.3]])), space)
    blocks = rng.uniform(0, 2 * np.pi, (2, 8))
    tr = integrate_meanfield(sys_b, MeasureState(np.repeat(blocks, 6, axis=0)), 5.0, 1e-3,
                             sample_every=100)
    d_block = max(float(np.max(np.abs(f[6 * b:6 * (b + 1)] - f[6 * b])))
                  for f in tr.states for b in range(2))
    ok &= d_block <= 1e-10

    # permutations commute with the flow at the measure level
    perm = permutation_map(rng.permutation(16))
    clouds = rng.uniform(0, 2 * np.pi, (16, 6))
    t1 = integrate_meanfield(sys_c, MeasureState(pullback(perm, clouds)), 5.0, 1e-3,
                             sample_every=100)
    t2 = integrate_meanfield(sys_c, MeasureState(clouds), 5.0, 1e-3, sample_every=100)
    d_perm = max(measure_distance(sys_c.space, a, pullback(perm, b))
                 for a, b in zip(t1.states, t2.states))
    ok &= d_perm <= 1e-8

    _verdict(9, ok,
             f"dirac match {d_dirac:.1e}; block drift {d_block:.1e}; "
             f"permutation commutator {d_perm:.1e}",
             time.perf_counter() - t0, 300.0)


def test_criterion_10_integrator_quality():
    t0 = time.perf_counter()
    sys = discretize(ConstantKernel(1.0), uniform_space(8))
    model = kuramoto_model(0.0, 0.0)
    rng = np.random.Generator(np.random.Philox(1000))
    u0 = rng.uniform(0, 2 * np.pi, 8)
    ref = integrate(sys, model, u0, 1.0, 1 / 1024, sample_every=1 << 20).states[-1]
    e1 = np.max(np.abs(integrate(sys, model, u0, 1.0, 1 / 16, sample_every=1 << 20).states[-1] - ref))
    e2 = np.max(np.abs(integrate(sys, model, u0, 1.0, 1 / 32, sample_every=1 << 20).states[-1] - ref))
    ratio = float(e1 / e2)
    ok = 12.0 <= ratio <= 20.0

    fwd = integrate(sys, kuramoto_model(0.0, 0.4), u0, 2.0, 1e-3)
    back = integrate(sys, kuramoto_model(0.0, 0.4), fwd.states[-1], -2.0, 1e-3)
    ret = float(np.max(np.abs(back.states[-1] - u0)))
    ok &= ret <= 1e-8
    _verdict(10, ok, f"halving ratio {ratio:.1f}; round-trip error {ret:.1e}",
             time.perf_counter() - t0, 120.0)
