"""Index maps, pullbacks, automorphism checks, and symmetry audits.

An :class:`IndexMap` is a self-map of node indices; its pullback acts on
states by (phi* u)_i = u[phi(i)]. Maps need not be invertible. The module
also provides constructors for the standard grid maps (shifts, flips,
rotations, reflections, index scalings) and the audit routines that
measure how well a candidate symmetry commutes with the flow or how far a
trajectory drifts from an invariant subspace.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dynamics import ModelFunctions, integrate
from .errors import UnsupportedGroupError
from .norms import l1_distance
from .space import IndexSpace
from .systems import CoupledSystem

ORBIT_CAP = 1_000_000


@dataclass(frozen=True)
class IndexMap:
    """Self-map of node indices: targets[i] = phi(i)."""

    targets: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(self.targets, dtype=np.int64)
        t.setflags(write=False)
        object.__setattr__(self, "targets", t)
        n = t.size
        if n < 1:
            raise ValueError("index map needs at least one node")
        if t.min() < 0 or t.max() >= n:
            raise ValueError("map targets out of range")

    @property
    def n(self) -> int:
        return self.targets.size

    @property
    def invertible(self) -> bool:
        return np.unique(self.targets).size == self.n


def identity_map(n: int) -> IndexMap:
    return IndexMap(np.arange(n))


def permutation_map(targets) -> IndexMap:
    m = IndexMap(np.asarray(targets))
    if not m.invertible:
        raise ValueError("targets do not form a permutation")
    return m


def swap_map(n: int, i: int, j: int) -> IndexMap:
    t = np.arange(n)
    t[i], t[j] = t[j], t[i]
    return IndexMap(t)


def scaling_map(space: IndexSpace, factor: int) -> IndexMap:
    """i -> factor * i mod n; factor 2 is the classical doubling map."""
    n = space.n
    return IndexMap((int(factor) * np.arange(n)) % n)


def interval_reflection_map(space: IndexSpace) -> IndexMap:
    """x -> 1 - x on a midpoint grid: index i -> n-1-i."""
    if space.geometry not in ("interval", "abstract"):
        raise ValueError("reflection map needs an interval or abstract space")
    return IndexMap(np.arange(space.n)[::-1].copy())


def _grid_indices(space: IndexSpace) -> np.ndarray:
    res = space.resolution
    return np.stack(np.unravel_index(np.arange(space.n), res), axis=1)


def grid_shift_map(space: IndexSpace, steps) -> IndexMap:
    """Translation by one grid cell per axis entry, wrapping around."""
    if space.geometry not in ("interval", "torus"):
        raise ValueError("shift map needs an interval or torus grid")
    res = np.array(space.resolution)
    steps = np.atleast_1d(np.asarray(steps, dtype=np.int64))
    if steps.size != res.size:
        raise ValueError("steps must match the grid dimension")
    idx = (_grid_indices(space) + steps[None, :]) % res[None, :]
    return IndexMap(np.ravel_multi_index(idx.T, tuple(res)))


def torus_flip_map(space: IndexSpace, axis: int) -> IndexMap:
    """Coordinate sign flip x_axis -> -x_axis on a torus grid."""
    if space.geometry != "torus":
        raise ValueError("flip map needs a torus grid")
    res = np.array(space.resolution)
    idx = _grid_indices(space).copy()
    idx[:, axis] = (res[axis] - idx[:, axis]) % res[axis]
    return IndexMap(np.ravel_multi_index(idx.T, tuple(res)))


def torus_rotation_map(space: IndexSpace) -> IndexMap:
    """Quarter turn (x, y) -> (-y, x) on a square 2-torus grid."""
    if space.geometry != "torus" or len(space.resolution) != 2:
        raise ValueError("rotation map needs a 2-dimensional torus grid")
    n1, n2 = space.resolution
    if n1 != n2:
        raise ValueError("rotation map needs a square grid")
    idx = _grid_indices(space)
    new = np.stack([(n1 - idx[:, 1]) % n1, idx[:, 0]], axis=1)
    return IndexMap(np.ravel_multi_index(new.T, (n1, n2)))


def _band_offsets(space: IndexSpace):
    counts = np.array(space.band_counts, dtype=np.int64)
    if counts.size == 0:
        raise ValueError("space has no latitude band structure")
    offsets = np.concatenate([[0], np.cumsum(counts)])
    return counts, offsets


def sphere_rotation_map(space: IndexSpace, steps: int = 1) -> IndexMap:
    """Rotation about the z axis by steps * 2*pi/g, g = gcd of band counts."""
    counts, offsets = _band_offsets(space)
    g = int(np.gcd.reduce(counts))
    t = np.empty(space.n, dtype=np.int64)
    for b, c in enumerate(counts):
        k = np.arange(c)
        t[offsets[b]:offsets[b + 1]] = offsets[b] + (k + steps * (c // g)) % c
    return IndexMap(t)


def sphere_reflection_map(space: IndexSpace) -> IndexMap:
    """z -> -z on a band grid: band b pairs with its mirror band."""
    counts, offsets = _band_offsets(space)
    nb = counts.size
    t = np.empty(space.n, dtype=np.int64)
    for b, c in enumerate(counts):
        mb = nb - 1 - b
        if counts[mb] != c:
            raise ValueError("band populations are not mirror-symmetric")
        t[offsets[b]:offsets[b + 1]] = offsets[mb] + np.arange(c)
    return IndexMap(t)


def pullback(imap: IndexMap, state: np.ndarray) -> np.ndarray:
    """(phi* u)_i = u[phi(i)]; also reindexes the rows of stacked states."""
    state = np.asarray(state)
    if state.shape[0] != imap.n:
        raise ValueError("state length does not match the map")
    return state[imap.targets]


# ---------------------------------------------------------------------------
# automorphism verification


@dataclass(frozen=True)
class AutomorphismReport:
    """Outcome of the three structural checks for a candidate map.

    measure_preserving: pushed-forward node masses equal the original ones.
    adjacency_preserving: kernel values w_ij/mu_j survive the relabeling.
    fiber_preserving: pushed-forward rows equal the rows at the images.
    """

    invertible: bool
    measure_preserving: bool
    mass_discrepancy: float
    adjacency_preserving: bool
    adjacency_discrepancy: float
    fiber_preserving: bool
    fiber_discrepancy: float
    verdict: str

    def to_json(self) -> str:
        doc = {k: getattr(self, k) for k in (
            "invertible", "measure_preserving", "mass_discrepancy",
            "adjacency_preserving", "adjacency_discrepancy",
            "fiber_preserving", "fiber_discrepancy", "verdict")}
        return json.dumps(doc)


def check_automorphism(system: CoupledSystem, imap: IndexMap, tol: float) -> AutomorphismReport:
    """Classify a candidate index map against a coupled system.

    Verdicts: ``graphon_automorphism`` (invertible, measure preserving,
    adjacency preserving), ``graphop_automorphism`` (invertible, pushes
    every row onto the row at the image), ``measure_preserving_only``, or
    ``neither``.
    """
    n = system.n
    if imap.n != n:
        raise ValueError("map size does not match the system")
    t = imap.targets
    mu = system.space.weights

    push = np.bincount(t, weights=mu, minlength=n)
    mass_disc = float(np.max(np.abs(push - mu)))
    mp_ok = mass_disc <= tol

    adj_disc = 0.0
    fib_disc = 0.0
    row_i = np.zeros(n)
    row_p = np.zeros(n)
    for i in range(n):
        idx, w = system.row(i)
        pidx, pw = system.row(int(t[i]))

        row_i[:] = 0.0
        row_p[:] = 0.0
        row_i[idx] = w / mu[idx]
        row_p[pidx] = pw / mu[pidx]
        adj_disc = max(adj_disc, float(np.max(np.abs(row_p[t] - row_i))))

        push_row = np.bincount(t[idx], weights=w, minlength=n)
        row_p[:] = 0.0
        row_p[pidx] = pw
        fib_disc = max(fib_disc, float(np.max(np.abs(push_row - row_p))))
    adj_ok = adj_disc <= tol
    fib_ok = fib_disc <= tol

    inv = imap.invertible
    if inv and mp_ok and adj_ok:
        verdict = "graphon_automorphism"
    elif inv and fib_ok:
        verdict = "graphop_automorphism"
    elif mp_ok:
        verdict = "measure_preserving_only"
    else:
        verdict = "neither"
    return AutomorphismReport(inv, mp_ok, mass_disc, adj_ok, adj_disc,
                              fib_ok, fib_disc, verdict)


# ---------------------------------------------------------------------------
# fixed spaces, images, clusters


def _orbit_labels(generators, n: int) -> np.ndarray:
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for m in generators:
        if m.n != n:
            raise ValueError("generator size mismatch")
        for i, j in enumerate(m.targets):
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    return np.array([find(i) for i in range(n)])


def project_fixed(generators, state: np.ndarray, orbit_cap: int = ORBIT_CAP) -> np.ndarray:
    """Project onto the joint fixed space of the generated group.

    Every value is replaced by the plain mean over its index orbit; the
    result is fixed by every generator and the projection is idempotent up
    to roundoff. All generators must be invertible.
    """
    state = np.asarray(state, dtype=np.float64)
    n = state.shape[0]
    generators = list(generators)
    for m in generators:
        if not m.invertible:
            raise ValueError("project_fixed requires invertible maps")
    if n * max(1, len(generators)) > orbit_cap:
        raise UnsupportedGroupError("orbit enumeration exceeds the configured cap")
    labels = _orbit_labels(generators, n)
    sums = np.bincount(labels, weights=state, minlength=n)
    counts = np.bincount(labels, minlength=n)
    means = sums[labels] / counts[labels]
    return means


class FixedPointSubspace:
    """States fixed by every generator: u[phi(i)] = u[i]."""

    def __init__(self, generators):
        self.generators = list(generators)

    def project(self, space: IndexSpace, state: np.ndarray) -> np.ndarray:
        return project_fixed(self.generators, state)


class ImageSubspace:
    """States that factor through a map: u = v o phi for some v.

    These are exactly the states constant on the level sets of phi; the
    projection replaces each level set by its mass-weighted mean.
    """

    def __init__(self, imap: IndexMap):
        self.imap = imap

    def project(self, space: IndexSpace, state: np.ndarray) -> np.ndarray:
        state = np.asarray(state, dtype=np.float64)
        t = self.imap.targets
        mu = space.weights
        mass = np.bincount(t, weights=mu, minlength=self.imap.n)
        sums = np.bincount(t, weights=mu * state, minlength=self.imap.n)
        seen = mass > 0
        means = np.zeros_like(mass)
        means[seen] = sums[seen] / mass[seen]
        return means[t]


class ClusterSubspace:
    """States constant on each prescribed node block."""

    def __init__(self, blocks):
        self.blocks = [np.asarray(b, dtype=np.int64) for b in blocks]

    def project(self, space: IndexSpace, state: np.ndarray) -> np.ndarray:
        out = np.asarray(state, dtype=np.float64).copy()
        mu = space.weights
        for block in self.blocks:
            w = mu[block]
            out[block] = float(np.sum(w * out[block]) / np.sum(w))
        return out


def subspace_distance(space: IndexSpace, subspace, state: np.ndarray) -> float:
    """Weighted L1 distance from a state to its subspace projection."""
    return l1_distance(space, state, subspace.project(space, state))


# ---------------------------------------------------------------------------
# audits


def equivariance_audit(system: CoupledSystem, model: ModelFunctions, imap: IndexMap,
                       state0, t_end: float, step: float = 1e-3,
                       sample_every: int = 1) -> float:
    """Largest commutator deviation ||phi*(Phi_t u) - Phi_t(phi* u)||_1.

    Integrates from the state and from its pullback and compares the two
    trajectories samplewise; a true automorphism leaves only integrator
    noise.
    """
    u0 = np.asarray(state0, dtype=np.float64)
    direct = integrate(system, model, u0, t_end, step, sample_every)
    mapped = integrate(system, model, pullback(imap, u0), t_end, step, sample_every)
    dev = 0.0
    for a, b in zip(direct.states, mapped.states):
        dev = max(dev, l1_distance(system.space, pullback(imap, a), b))
    return dev


def invariance_audit(system: CoupledSystem, model: ModelFunctions, subspace,
                     state0, t_end: float, step: float = 1e-3,
                     sample_every: int = 1) -> float:
    """Largest distance from the subspace along the trajectory.

    ``state0`` must already lie in the subspace (within 1e-12).
    """
    u0 = np.asarray(state0, dtype=np.float64)
    d0 = subspace_distance(system.space, subspace, u0)
    if d0 > 1e-12:
        raise ValueError(f"initial state is {d0} away from the subspace")
    traj = integrate(system, model, u0, t_end, step, sample_every)
    return max(subspace_distance(system.space, subspace, s) for s in traj.states)
