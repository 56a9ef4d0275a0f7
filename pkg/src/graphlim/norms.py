"""Weighted L1 distances, infinity-to-one kernel norms, and growth bounds.

The infinity-to-one norm of a symmetric matrix D on a weighted space is

    max over f, g in {-1,+1}^n of | sum_ij mu_i mu_j D_ij f_i g_j |,

the vertex maximum of the bilinear form over the product of cubes. The
exact routine enumerates g and picks the optimal f per candidate; the
heuristic alternates sign improvements from random starts and always
returns a lower bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import SizeLimitError
from .space import IndexSpace

EXACT_NORM_MAX_N = 24
_CHUNK_BITS = 16


def l1_distance(space: IndexSpace, u, v) -> float:
    """Weighted L1 distance sum_j mu_j |u_j - v_j|."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != (space.n,) or v.shape != (space.n,):
        raise ValueError("state length does not match the space")
    return float(np.sum(space.weights * np.abs(u - v)))


@dataclass(frozen=True)
class NormResult:
    """Norm value with the sign vectors that achieve it.

    ``value`` equals the bilinear form evaluated at (witness_f, witness_g);
    an empty witness (heuristic with zero restarts) reports value 0.
    """

    value: float
    method: str
    witness_f: np.ndarray
    witness_g: np.ndarray

    def to_json(self) -> str:
        return json.dumps({
            "value": self.value,
            "method": self.method,
            "witness_f": [int(v) for v in np.atleast_1d(self.witness_f)],
            "witness_g": [int(v) for v in np.atleast_1d(self.witness_g)],
        })


def _bilinear_matrix(space: IndexSpace, matrix) -> np.ndarray:
    d = np.asarray(matrix, dtype=np.float64)
    if d.shape != (space.n, space.n):
        raise ValueError("matrix shape does not match the space")
    if float(np.max(np.abs(d - d.T), initial=0.0)) > 1e-12:
        raise ValueError("matrix must be symmetric")
    mu = space.weights
    return mu[:, None] * d * mu[None, :]


def _sign(v: np.ndarray) -> np.ndarray:
    # ties at zero resolve to +1
    return np.where(v >= 0, 1.0, -1.0)


def inf_to_one_norm_exact(space: IndexSpace, matrix) -> NormResult:
    """Exact vertex maximum by enumerating g over {-1,+1}^n.

    The last sign of g is fixed to +1 (the form is odd in g), so the scan
    covers 2^(n-1) candidates in chunks. Limited to n <= 24.
    """
    b = _bilinear_matrix(space, matrix)
    n = space.n
    if n > EXACT_NORM_MAX_N:
        raise SizeLimitError(
            f"exact norm enumerates 2^(n-1) sign vectors and is limited to "
            f"n <= {EXACT_NORM_MAX_N}; use inf_to_one_norm_lower for larger n"
        )
    total = 1 << max(0, n - 1)
    chunk = 1 << min(_CHUNK_BITS, max(0, n - 1))
    best_score = -1.0
    best_g = None
    bits = np.arange(max(1, n - 1), dtype=np.uint64)
    for start in range(0, total, chunk):
        ids = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        g = np.ones((n, ids.size))
        if n > 1:
            g[:-1, :] = 1.0 - 2.0 * ((ids[None, :] >> bits[:, None]) & 1)
        scores = np.abs(b @ g).sum(axis=0)
        k = int(np.argmax(scores))
        if scores[k] > best_score:
            best_score = float(scores[k])
            best_g = g[:, k].copy()
    f = _sign(b @ best_g)
    value = float(abs(f @ b @ best_g))
    return NormResult(value, "exact_bruteforce", f, best_g)


def inf_to_one_norm_lower(space: IndexSpace, matrix, restarts: int = 16,
                          seed: int = 0) -> NormResult:
    """Alternating sign improvement from seeded random starts.

    Always a lower bound on the exact norm; restarts=0 returns 0 with an
    empty witness. Deterministic for a fixed (restarts, seed).
    """
    b = _bilinear_matrix(space, matrix)
    n = space.n
    if restarts < 0:
        raise ValueError("restarts must be nonnegative")
    if restarts == 0:
        return NormResult(0.0, "greedy_alternation", np.zeros(0), np.zeros(0))
    rng = np.random.Generator(np.random.Philox(seed))
    best = None
    for _ in range(restarts):
        g = 1.0 - 2.0 * (rng.random(n) < 0.5)
        for _ in range(200):
            f = _sign(b @ g)
            g_next = _sign(b.T @ f)
            if np.array_equal(g_next, g):
                break
            g = g_next
        f = _sign(b @ g)
        value = float(abs(f @ b @ g))
        if best is None or value > best.value:
            best = NormResult(value, "greedy_alternation", f, g)
    return best


def gronwall_bound(d0: float, norm_wu: float, t) -> float | np.ndarray:
    """Trajectory distance bound (d0 + 2 t norm) e^{2t} for sine coupling."""
    t = np.asarray(t, dtype=np.float64)
    if d0 < 0 or norm_wu < 0 or np.any(t < 0):
        raise ValueError("gronwall_bound needs nonnegative inputs")
    out = (d0 + 2.0 * t * norm_wu) * np.exp(2.0 * t)
    return float(out) if out.ndim == 0 else out


def ghost_bound(d0: float, norm_wu: float, t) -> float | np.ndarray:
    """Symmetry-deviation bound: twice the trajectory distance bound."""
    out = gronwall_bound(d0, norm_wu, t)
    return 2.0 * out
