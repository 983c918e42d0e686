"""Finitely supported vectors and the two operators acting on them.

``SeqVector`` lives in ``l^p(Z)`` and is acted on by the bilateral weighted
backward shift ``(B_w x)_i = w_{i+1} x_{i+1}``.  ``StepFunction`` is a simple
function over the sub-cells ``f^k(W_j)`` of a dissipative system and is acted
on by the composition operator ``T_f phi = phi o f``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from .errors import WeightOutOfRange, ZeroVector

LAMBDA_RTOL = 1e-10
PHASE_SAMPLES = 64


def _clean_entries(entries: Mapping) -> dict:
    out = {}
    for key, value in entries.items():
        value = complex(value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError(f"coefficient at {key!r} is not finite")
        if value != 0:
            out[key] = value
    return out


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Log weights ``log w_k`` for ``k`` in ``[k_lo, k_lo + len - 1]``."""

    k_lo: int
    log_weights: np.ndarray

    def __post_init__(self):
        arr = np.array(self.log_weights, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("log_weights must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("weights must be finite and bounded away from zero")
        arr.setflags(write=False)
        object.__setattr__(self, "log_weights", arr)
        object.__setattr__(self, "k_lo", int(self.k_lo))

    @classmethod
    def constant(cls, value: float, k_range) -> "WeightSequence":
        lo, hi = k_range
        return cls(lo, np.full(hi - lo + 1, math.log(value)))

    @classmethod
    def from_function(cls, func, k_range) -> "WeightSequence":
        """Tabulate ``func(k)`` (the weight itself, not its log)."""
        lo, hi = k_range
        return cls(lo, np.log([float(func(k)) for k in range(lo, hi + 1)]))

    @property
    def k_range(self) -> tuple[int, int]:
        return self.k_lo, self.k_lo + self.log_weights.size - 1

    @property
    def bounds(self) -> tuple[float, float]:
        """Certified ``(log_lower, log_upper)`` over the tabulated range."""
        return float(self.log_weights.min()), float(self.log_weights.max())

    def covers(self, lo: int, hi: int) -> bool:
        k_lo, k_hi = self.k_range
        return lo > hi or (k_lo <= lo and hi <= k_hi)

    def log_weight(self, k: int) -> float:
        lo, hi = self.k_range
        if not lo <= k <= hi:
            raise WeightOutOfRange(f"weight w_{k} outside tabulated range [{lo}, {hi}]")
        return float(self.log_weights[k - lo])

    def weight(self, k: int) -> float:
        return math.exp(self.log_weight(k))


@dataclass(frozen=True, eq=False)
class SeqVector:
    """Finitely supported element of ``l^p(Z)``."""

    entries: dict = field(default_factory=dict)
    p: float = 2.0

    def __post_init__(self):
        if not 1 <= self.p < math.inf:
            raise ValueError("p must lie in [1, inf)")
        object.__setattr__(self, "entries", _clean_entries({int(i): v for i, v in self.entries.items()}))

    @classmethod
    def basis(cls, i: int, p: float = 2.0, value=1.0) -> "SeqVector":
        return cls({i: value}, p)

    @property
    def support(self) -> list[int]:
        return sorted(self.entries)

    def __getitem__(self, i: int) -> complex:
        return self.entries.get(i, 0j)

    def scaled(self, lam) -> "SeqVector":
        return SeqVector({i: lam * v for i, v in self.entries.items()}, self.p)

    def __add__(self, other: "SeqVector") -> "SeqVector":
        out = dict(self.entries)
        for i, v in other.entries.items():
            out[i] = out.get(i, 0j) + v
        return SeqVector(out, self.p)

    def __sub__(self, other: "SeqVector") -> "SeqVector":
        return self + other.scaled(-1)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "entries": {str(i): [v.real, v.imag] for i, v in sorted(self.entries.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "SeqVector":
        return cls({int(i): complex(*v) for i, v in data["entries"].items()}, float(data["p"]))


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Simple function with coefficient ``cells[(k, j)]`` on ``f^k(W_j)``.

    ``W`` is split into ``2**refinement`` sub-cells of equal measure.
    """

    cells: dict = field(default_factory=dict)
    refinement: int = 0
    p: float = 2.0

    def __post_init__(self):
        if not 1 <= self.p < math.inf:
            raise ValueError("p must lie in [1, inf)")
        if self.refinement < 0:
            raise ValueError("refinement must be >= 0")
        n = 2**self.refinement
        cells = {}
        for (k, j), v in self.cells.items():
            if not 0 <= j < n:
                raise ValueError(f"sub-cell index {j} invalid at refinement {self.refinement}")
            cells[(int(k), int(j))] = v
        object.__setattr__(self, "cells", _clean_entries(cells))

    @classmethod
    def indicator(cls, ks, refinement: int = 0, p: float = 2.0, value=1.0) -> "StepFunction":
        """``value`` times the indicator of the union of the cells ``f^k(W)``."""
        n = 2**refinement
        return cls({(k, j): value for k in ks for j in range(n)}, refinement, p)

    @property
    def support(self) -> list[tuple[int, int]]:
        return sorted(self.cells)

    def __getitem__(self, cell) -> complex:
        return self.cells.get(cell, 0j)

    def sup_norm(self) -> float:
        return max((abs(v) for v in self.cells.values()), default=0.0)

    def scaled(self, lam) -> "StepFunction":
        return StepFunction({c: lam * v for c, v in self.cells.items()}, self.refinement, self.p)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        if other.refinement != self.refinement:
            raise ValueError("step functions must share a refinement")
        out = dict(self.cells)
        for c, v in other.cells.items():
            out[c] = out.get(c, 0j) + v
        return StepFunction(out, self.refinement, self.p)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self + other.scaled(-1)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "refinement": self.refinement,
            "entries": {f"{k},{j}": [v.real, v.imag] for (k, j), v in sorted(self.cells.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "StepFunction":
        cells = {}
        for key, v in data["entries"].items():
            k, j = (int(s) for s in key.split(","))
            cells[(k, j)] = complex(*v)
        return cls(cells, int(data["refinement"]), float(data["p"]))


def apply_backward_shift(w: WeightSequence, x: SeqVector, steps: int) -> SeqVector:
    """``B_w^steps x``: each step moves the entry at ``i + 1`` to ``i`` times ``w_{i+1}``."""
    if steps < 0:
        raise ValueError("steps must be >= 0; use apply_inverse_shift")
    entries = dict(x.entries)
    for _ in range(steps):
        entries = {i - 1: w.weight(i) * v for i, v in entries.items()}
    return SeqVector(entries, x.p)


def apply_inverse_shift(w: WeightSequence, x: SeqVector, steps: int) -> SeqVector:
    """``B_w^{-steps} x``: each step moves the entry at ``i`` to ``i + 1`` divided by ``w_{i+1}``."""
    if steps < 0:
        raise ValueError("steps must be >= 0; use apply_backward_shift")
    entries = dict(x.entries)
    for _ in range(steps):
        entries = {i + 1: v / w.weight(i + 1) for i, v in entries.items()}
    return SeqVector(entries, x.p)


def apply_composition(phi: StepFunction, steps: int) -> StepFunction:
    """``T_f^steps phi``; negative ``steps`` applies the inverse.

    ``phi o f^n`` restricted to ``f^{k-n}(W_j)`` equals ``phi`` on ``f^k(W_j)``,
    so coefficients move from cell ``(k, j)`` to ``(k - n, j)``.
    """
    return StepFunction(
        {(k - steps, j): v for (k, j), v in phi.cells.items()}, phi.refinement, phi.p
    )


def _lp_from_logs(log_abs: np.ndarray, log_weights: np.ndarray, p: float) -> float:
    if log_abs.size == 0:
        return 0.0
    return math.exp(float(logsumexp(p * log_abs + log_weights)) / p)


def lp_norm_seq(x: SeqVector) -> float:
    """``l^p`` norm with the largest modulus factored out."""
    mods = np.array([abs(v) for v in x.entries.values()], dtype=float)
    if mods.size == 0:
        return 0.0
    top = mods.max()
    return float(top * np.sum((mods / top) ** x.p) ** (1.0 / x.p))


def lp_norm_step(phi: StepFunction, system) -> float:
    """``(sum |c_{k,j}|^p mu(f^k(W_j)))^{1/p}`` with masses taken from ``system``."""
    if not phi.cells:
        return 0.0
    log_abs = np.log([abs(v) for v in phi.cells.values()])
    log_mass = np.array([system.log_subcell_mass(k, j, phi.refinement) for k, j in phi.cells])
    return _lp_from_logs(log_abs, log_mass, phi.p)


class LambdaMode(str, enum.Enum):
    REAL_LINE = "RealLine"
    POSITIVE_RAY = "PositiveRay"
    COMPLEX_PLANE = "ComplexPlane"


class ShiftOperator:
    """Operator handle for ``B_w`` on ``l^p(Z)``."""

    def __init__(self, weights: WeightSequence):
        self.weights = weights

    def step(self, x: SeqVector) -> SeqVector:
        return apply_backward_shift(self.weights, x, 1)

    def coords(self, vectors, p):
        keys = sorted(set().union(*(v.entries for v in vectors)))
        arrays = [np.array([v[i] for i in keys], dtype=complex) for v in vectors]
        return arrays, np.zeros(len(keys))


class CompositionOperator:
    """Operator handle for ``T_f`` on step functions over ``system``."""

    def __init__(self, system):
        self.system = system

    def step(self, phi: StepFunction) -> StepFunction:
        return apply_composition(phi, 1)

    def coords(self, vectors, p):
        r = vectors[0].refinement
        keys = sorted(set().union(*(v.cells for v in vectors)))
        arrays = [np.array([v[c] for c in keys], dtype=complex) for v in vectors]
        log_mass = np.array([self.system.log_subcell_mass(k, j, r) for k, j in keys])
        return arrays, log_mass


@dataclass(frozen=True)
class ProjectiveProbe:
    distance: float
    best_n: int
    best_lambda: complex


def _weighted_norm(v: np.ndarray, log_mass: np.ndarray, p: float) -> float:
    mods = np.abs(v)
    top = mods.max() if mods.size else 0.0
    if top == 0:
        return 0.0
    shift = log_mass.max()
    total = np.sum((mods / top) ** p * np.exp(log_mass - shift))
    return float(top * math.exp(shift / p) * total ** (1.0 / p))


def _line_min(func, lo: float, hi: float, scale: float) -> tuple[float, float]:
    """Minimise a convex ``func`` on ``[lo, hi]``; returns ``(argmin, min)``."""
    if hi <= lo:
        return lo, func(lo)
    res = optimize.minimize_scalar(
        func, bounds=(lo, hi), method="bounded",
        options={"xatol": LAMBDA_RTOL * max(scale, 1e-300), "maxiter": 500},
    )
    best_x, best_f = float(res.x), float(res.fun)
    for x in (lo, hi):
        fx = func(x)
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def _best_lambda(u, g, log_mass, p, mode) -> tuple[complex, float]:
    norm_u = _weighted_norm(u, log_mass, p)
    norm_g = _weighted_norm(g, log_mass, p)
    if norm_u == 0:
        return 0j, norm_g
    radius = 2.0 * norm_g / norm_u

    if p == 2:
        mass = np.exp(log_mass - log_mass.max()) if log_mass.size else log_mass
        inner = np.sum(mass * np.conj(u) * g) / np.sum(mass * np.abs(u) ** 2)
        if mode is LambdaMode.COMPLEX_PLANE:
            lam = complex(inner)
        elif mode is LambdaMode.REAL_LINE:
            lam = complex(inner.real)
        else:
            lam = complex(max(inner.real, 0.0))
        return lam, _weighted_norm(lam * u - g, log_mass, p)

    def residual(lam):
        return _weighted_norm(lam * u - g, log_mass, p)

    if mode is not LambdaMode.COMPLEX_PLANE:
        lo = 0.0 if mode is LambdaMode.POSITIVE_RAY else -radius
        lam, best = _line_min(residual, lo, radius, radius)
        if p == 1:
            # piecewise linear: the minimum sits on a kink g_i / u_i
            mask = (u != 0) & (u.imag == 0) & (g.imag == 0)
            for t in np.clip(g[mask].real / u[mask].real, lo, radius):
                val = residual(float(t))
                if val < best:
                    lam, best = float(t), val
        return complex(lam), best

    # Complex scalars, p != 2: heuristic alternating modulus / phase descent.
    best_r, best_theta, best = 0.0, 0.0, residual(0.0)
    for theta in np.linspace(0.0, 2 * math.pi, PHASE_SAMPLES, endpoint=False):
        r, val = _line_min(lambda t: residual(t * cmath.exp(1j * theta)), 0.0, radius, radius)
        if val < best:
            best_r, best_theta, best = r, float(theta), val
    width = math.pi / PHASE_SAMPLES
    for _ in range(20):
        theta, val = _line_min(
            lambda t: residual(best_r * cmath.exp(1j * t)),
            best_theta - width, best_theta + width, 2 * math.pi,
        )
        r, val = _line_min(lambda t: residual(t * cmath.exp(1j * theta)), 0.0, radius, radius)
        improved = best - val
        if val < best:
            best_r, best_theta, best = r, theta, val
        if improved <= LAMBDA_RTOL * max(best, 1e-300):
            break
    return best_r * cmath.exp(1j * best_theta), best


def projective_distance(operator, x, target, n_max: int, lambda_mode=LambdaMode.REAL_LINE) -> ProjectiveProbe:
    """Smallest ``||lam T^n x - target||_p`` over ``0 <= n <= n_max`` and admissible ``lam``.

    A numeric probe only: a small value says nothing about density of the orbit.
    """
    mode = LambdaMode(lambda_mode)
    if not (getattr(x, "entries", None) or getattr(x, "cells", None)):
        raise ZeroVector("the orbit of the zero vector is trivial")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    best = None
    current = x
    for n in range(n_max + 1):
        if n:
            current = operator.step(current)
        (u, g), log_mass = operator.coords([current, target], x.p)
        lam, dist = _best_lambda(u, g, log_mass, x.p, mode)
        if best is None or dist < best.distance:
            best = ProjectiveProbe(dist, n, lam)
    return best
