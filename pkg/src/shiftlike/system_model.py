"""Dissipative composition systems described cell by cell.

A dissipative system is generated by a set ``W`` whose iterates ``f^k(W)``
tile the space.  Everything the criteria need is carried by the measure
profile ``k -> mu(f^k(W))``, kept here in log domain.  Two concrete models
are provided:

* :class:`MeasureProfile` -- a tabulated profile.  Mass is treated as spread
  homogeneously inside each cell, so a sub-cell ``W_j`` of relative size
  ``2**-r`` has ``mu(f^k(W_j)) = mu(f^k(W)) / 2**r``.
* :class:`DensityLineSystem` -- ``X = R``, ``f(x) = x + 1``, ``W = [0, 1)``
  and ``mu`` given by a piecewise ``c * exp(a * x)`` density.  Window
  integrals are computed in closed form.

Dissipativity is structural: a cell-indexed model cannot describe anything
else, so it is never checked.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate, optimize

from ._logmath import LOG_ZERO, log_expm1_over, log_sum
from .errors import NonIntegrableDensity, OutOfRange, ZeroDensity

LOG2 = math.log(2.0)

# Thresholds for DistortionReport.bounded_verdict.
STABILIZATION_RTOL = 1e-12
TREND_RTOL = 0.01


class ExtensionRule(str, enum.Enum):
    REJECT = "reject"
    GEOMETRIC = "geometric"


def _as_range(k_range) -> tuple[int, int]:
    lo, hi = (int(v) for v in k_range)
    if lo > hi:
        raise ValueError(f"empty index range [{lo}, {hi}]")
    return lo, hi


@dataclass(frozen=True, eq=False)
class MeasureProfile:
    """Log masses ``log mu(f^k(W))`` for ``k`` in ``[k_lo, k_lo + len - 1]``."""

    k_lo: int
    log_mass: np.ndarray
    extension: ExtensionRule = ExtensionRule.REJECT

    def __post_init__(self):
        arr = np.array(self.log_mass, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("log_mass must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("every log mass must be finite")
        if not (self.k_lo <= 0 <= self.k_lo + arr.size - 1):
            raise ValueError("the tabulated range must contain k = 0")
        arr.setflags(write=False)
        object.__setattr__(self, "log_mass", arr)
        object.__setattr__(self, "k_lo", int(self.k_lo))
        object.__setattr__(self, "extension", ExtensionRule(self.extension))

    @classmethod
    def from_mapping(cls, mapping, extension=ExtensionRule.REJECT) -> "MeasureProfile":
        """Build from ``{k: log_mass}``; the keys must be a contiguous block."""
        keys = sorted(int(k) for k in mapping)
        if not keys:
            raise ValueError("empty profile")
        if keys != list(range(keys[0], keys[-1] + 1)):
            raise ValueError("profile indices must be contiguous")
        values = {int(k): float(v) for k, v in mapping.items()}
        return cls(keys[0], np.array([values[k] for k in keys]), extension)

    @classmethod
    def constant(cls, log_value=0.0, k_range=(0, 0)) -> "MeasureProfile":
        lo, hi = _as_range(k_range)
        return cls(lo, np.full(hi - lo + 1, float(log_value)), ExtensionRule.GEOMETRIC)

    @property
    def k_range(self) -> tuple[int, int]:
        return self.k_lo, self.k_lo + self.log_mass.size - 1

    @property
    def log_mu_w(self) -> float:
        return float(self.log_mass[-self.k_lo])

    def log_cell_mass(self, k: int) -> float:
        lo, hi = self.k_range
        if lo <= k <= hi:
            return float(self.log_mass[k - lo])
        if self.extension is ExtensionRule.REJECT:
            raise OutOfRange(f"k={k} outside tabulated range [{lo}, {hi}]")
        n = self.log_mass.size
        if k > hi:
            slope = self.log_mass[-1] - self.log_mass[-2] if n > 1 else 0.0
            return float(self.log_mass[-1] + slope * (k - hi))
        slope = self.log_mass[1] - self.log_mass[0] if n > 1 else 0.0
        return float(self.log_mass[0] - slope * (lo - k))

    def log_subcell_mass(self, k: int, j: int, refinement: int) -> float:
        if not 0 <= j < 2**refinement:
            raise IndexError(f"sub-cell {j} does not exist at refinement {refinement}")
        return self.log_cell_mass(k) - refinement * LOG2

    def profile(self, k_range) -> "MeasureProfile":
        """Tabulate over ``k_range`` (extending if the rule allows)."""
        lo, hi = _as_range(k_range)
        values = np.array([self.log_cell_mass(k) for k in range(lo, hi + 1)])
        return MeasureProfile(lo, values, self.extension)

    def to_config(self) -> dict:
        lo, _ = self.k_range
        return {
            "kind": "profile",
            "log_mass": {str(lo + i): float(v) for i, v in enumerate(self.log_mass)},
            "extension": self.extension.value,
        }


def profile_mass(profile: MeasureProfile, k: int) -> float:
    """``log mu(f^k(W))``, extrapolated geometrically when the profile allows."""
    return profile.log_cell_mass(k)


@dataclass(frozen=True)
class DensityPiece:
    """``h(x) = c * exp(a * x)`` on ``[lo, hi]``."""

    lo: float
    hi: float
    c: float
    a: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"piece bounds must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise ValueError("piece coefficient c must be finite and >= 0")
        if not math.isfinite(self.a):
            raise ValueError("piece exponent a must be finite")

    def log_h(self, x: float) -> float:
        if self.c == 0:
            return LOG_ZERO
        return math.log(self.c) + self.a * x

    def log_integral(self, u: float, v: float) -> float:
        """Log of the integral of this piece over ``[u, v] ∩ [lo, hi]``."""
        s, t = max(u, self.lo), min(v, self.hi)
        if not t > s or self.c == 0:
            return LOG_ZERO
        if math.isinf(s) or math.isinf(t):
            # Only integrable tails: a > 0 towards -inf, a < 0 towards +inf.
            if math.isinf(t) or self.a <= 0:
                return math.inf
            return math.log(self.c) + self.a * t - math.log(self.a)
        return math.log(self.c) + self.a * s + log_expm1_over(self.a, t - s)


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "quadpack-qags"
    abs_tol: float = 1e-13
    rel_tol: float = 1e-12


@dataclass(frozen=True)
class DensityLineSystem:
    """Translation ``f(x) = x + 1`` on ``R`` with window ``W = [0, 1)``.

    ``pieces`` must be sorted and may touch only at their endpoints; the
    density is zero outside them.
    """

    pieces: tuple[DensityPiece, ...]
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("density needs at least one piece")
        for left, right in zip(pieces, pieces[1:]):
            if left.hi > right.lo:
                raise ValueError("density pieces must be sorted and non-overlapping")
        object.__setattr__(self, "pieces", pieces)
        if not math.isfinite(self.log_mu_w):
            raise NonIntegrableDensity("the density must have finite positive mass on W")

    @classmethod
    def paper_example(cls) -> "DensityLineSystem":
        """``h(x) = exp(2x)`` for ``x <= 0`` and ``exp(x)`` for ``x >= 0``."""
        return cls((DensityPiece(-math.inf, 0.0, 1.0, 2.0), DensityPiece(0.0, math.inf, 1.0, 1.0)))

    @classmethod
    def uniform(cls, c=1.0) -> "DensityLineSystem":
        return cls((DensityPiece(-math.inf, math.inf, c, 0.0),))

    @property
    def breakpoints(self) -> list[float]:
        pts = set()
        for piece in self.pieces:
            pts.update(x for x in (piece.lo, piece.hi) if math.isfinite(x))
        return sorted(pts)

    def _piece_at(self, x: float) -> DensityPiece | None:
        """Piece whose open interior contains ``x`` (or None in a gap)."""
        for piece in self.pieces:
            if piece.lo < x < piece.hi:
                return piece
        return None

    def log_density_open(self, s: float, t: float, x: float) -> float:
        """Log density at ``x`` using the piece covering the open interval ``(s, t)``."""
        piece = self._piece_at(0.5 * (s + t))
        return LOG_ZERO if piece is None else piece.log_h(x)

    def log_integral(self, u: float, v: float) -> float:
        return log_sum([p.log_integral(u, v) for p in self.pieces])

    @property
    def log_mu_w(self) -> float:
        return self.log_integral(0.0, 1.0)

    def log_cell_mass(self, k: int) -> float:
        value = self.log_integral(float(k), float(k) + 1.0)
        if not math.isfinite(value):
            raise NonIntegrableDensity(f"mu(f^{k}(W)) is {math.exp(value)}")
        return value

    def subcell_edges(self, refinement: int) -> np.ndarray:
        """Points ``0 = t_0 < ... < t_{2^r} = 1`` splitting ``W`` into equal-measure parts."""
        return _subcell_edges(self, int(refinement))

    def log_subcell_mass(self, k: int, j: int, refinement: int) -> float:
        return _log_subcell_mass(self, int(k), int(j), int(refinement))

    def quadrature_mass(self, u: float, v: float) -> float:
        """Independent adaptive-quadrature value of ``mu([u, v])``."""
        inner = [x for x in self.breakpoints if u < x < v]

        def h(x):
            piece = self._piece_at(x)
            if piece is None:
                piece = next((p for p in self.pieces if p.lo <= x <= p.hi), None)
            return 0.0 if piece is None else piece.c * math.exp(piece.a * x)

        value, _ = integrate.quad(
            h, u, v, points=inner or None,
            epsabs=self.quadrature.abs_tol, epsrel=self.quadrature.rel_tol, limit=200,
        )
        return value

    def profile(self, k_range) -> MeasureProfile:
        return profile_from_density(self, k_range)

    def to_config(self) -> dict:
        def bound(x):
            if math.isinf(x):
                return "-inf" if x < 0 else "inf"
            return x

        return {
            "kind": "density",
            "pieces": [
                {"from": bound(p.lo), "to": bound(p.hi), "c": p.c, "a": p.a} for p in self.pieces
            ],
            "quadrature": {
                "method": self.quadrature.method,
                "abs_tol": self.quadrature.abs_tol,
                "rel_tol": self.quadrature.rel_tol,
            },
        }


@lru_cache(maxsize=64)
def _subcell_edges(system: DensityLineSystem, refinement: int) -> np.ndarray:
    n = 2**refinement
    log_total = system.log_mu_w
    edges = [0.0]
    for j in range(1, n):
        target = log_total + math.log(j / n)
        root = optimize.brentq(
            lambda t: system.log_integral(0.0, t) - target,
            edges[-1], 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps,
        )
        edges.append(root)
    edges.append(1.0)
    out = np.array(edges)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=1 << 16)
def _log_subcell_mass(system: DensityLineSystem, k: int, j: int, refinement: int) -> float:
    edges = system.subcell_edges(refinement)
    if not 0 <= j < len(edges) - 1:
        raise IndexError(f"sub-cell {j} does not exist at refinement {refinement}")
    value = system.log_integral(k + edges[j], k + edges[j + 1])
    if not math.isfinite(value):
        raise NonIntegrableDensity(f"mu(f^{k}(W_{j})) is not a finite positive number")
    return value


def profile_from_density(system: DensityLineSystem, k_range) -> MeasureProfile:
    """Exact window masses ``log ∫_k^{k+1} h`` for every ``k`` in ``k_range``."""
    lo, hi = _as_range(k_range)
    values = np.array([system.log_cell_mass(k) for k in range(lo, hi + 1)])
    return MeasureProfile(lo, values, ExtensionRule.REJECT)


class BoundedVerdict(str, enum.Enum):
    BOUNDED_AT_HORIZON = "BoundedAtHorizon"
    UNBOUNDED_TREND = "UnboundedTrend"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DistortionRecord:
    k: int
    log_rho_inf: float
    log_rho_sup: float

    @property
    def rho_inf(self) -> float:
        return math.exp(self.log_rho_inf)

    @property
    def rho_sup(self) -> float:
        return math.exp(self.log_rho_sup)

    @property
    def ratio(self) -> float:
        return math.exp(self.log_rho_sup - self.log_rho_inf)


@dataclass(frozen=True)
class DistortionReport:
    records: tuple[DistortionRecord, ...]
    bound_estimate: float
    bounded_verdict: BoundedVerdict

    def ratio(self, k: int) -> float:
        for rec in self.records:
            if rec.k == k:
                return rec.ratio
        raise OutOfRange(f"k={k} was not scanned")

    def to_dict(self) -> dict:
        return {
            "records": [
                {"k": r.k, "rho_inf": r.rho_inf, "rho_sup": r.rho_sup, "ratio": r.ratio}
                for r in self.records
            ],
            "bound_estimate": self.bound_estimate,
            "bounded_verdict": self.bounded_verdict.value,
        }


def _log_rho_extrema(system: DensityLineSystem, k: int) -> tuple[float, float]:
    # log rho_k(x) = log h(x + k) - log h(x) is affine between breakpoints,
    # so the essential extrema are one-sided limits at the sub-interval ends.
    cuts = {0.0, 1.0}
    for b in system.breakpoints:
        for x in (b, b - k):
            if 0.0 < x < 1.0:
                cuts.add(x)
    cuts = sorted(cuts)
    lows, highs = [], []
    for s, t in zip(cuts, cuts[1:]):
        vals = []
        for x in (s, t):
            num = system.log_density_open(s + k, t + k, x + k)
            den = system.log_density_open(s, t, x)
            if math.isinf(num) or math.isinf(den):
                raise ZeroDensity(f"density vanishes on part of W or W+{k}")
            vals.append(num - den)
        lows.append(min(vals))
        highs.append(max(vals))
    return min(lows), max(highs)


def _log_rho_grid(system: DensityLineSystem, k: int, size: int) -> tuple[float, float]:
    xs = (np.arange(size) + 0.5) / size
    vals = []
    for x in xs:
        num = system.log_density_open(x + k, x + k, x + k)
        den = system.log_density_open(x, x, x)
        if math.isinf(num) or math.isinf(den):
            raise ZeroDensity(f"density vanishes on part of W or W+{k}")
        vals.append(num - den)
    return min(vals), max(vals)


def _bounded_verdict(records: Sequence[DistortionRecord]) -> BoundedVerdict:
    # Scan order runs outward from k = 0; the prefix is the inner half.
    ordered = sorted(records, key=lambda r: (abs(r.k), r.k))
    ratios = [r.ratio for r in ordered]
    prefix_max = max(ratios[: max(1, math.ceil(len(ratios) / 2))])
    full_max = max(ratios)
    if full_max <= prefix_max * (1 + STABILIZATION_RTOL):
        return BoundedVerdict.BOUNDED_AT_HORIZON
    if full_max > prefix_max * (1 + TREND_RTOL):
        return BoundedVerdict.UNBOUNDED_TREND
    return BoundedVerdict.INCONCLUSIVE


def distortion_scan(
    system: DensityLineSystem, k_range, sample_grid_size: int = 256, exact: bool = True
) -> DistortionReport:
    """Extrema of ``rho_k(x) = h(x + k) / h(x)`` over ``W`` for each scanned ``k``.

    With ``exact`` the extrema come from breakpoints and window endpoints;
    otherwise ``sample_grid_size`` midpoints of ``W`` are sampled.
    """
    lo, hi = _as_range(k_range)
    if sample_grid_size < 1:
        raise ValueError("sample_grid_size must be positive")
    records = []
    for k in range(lo, hi + 1):
        if exact:
            low, high = _log_rho_extrema(system, k)
        else:
            low, high = _log_rho_grid(system, k, sample_grid_size)
        records.append(DistortionRecord(k, low, high))
    bound = max(r.ratio for r in records)
    return DistortionReport(tuple(records), bound, _bounded_verdict(records))
