"""Dictionary between dissipative composition operators and weighted shifts.

Weights are read off a measure profile as
``w_k = (mu(f^{k-1}(W)) / mu(f^k(W)))^{1/p}``; the discrete measure ``nu`` on
``Z`` goes back the other way, and the averaging map ``Pi`` intertwines
``T_f`` with ``B_w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._logmath import compensated_cumsum
from .errors import OutOfRange, WeightOutOfRange
from .operator_core import (
    SeqVector,
    StepFunction,
    WeightSequence,
    apply_backward_shift,
    apply_composition,
    lp_norm_seq,
    lp_norm_step,
)


@dataclass(frozen=True, eq=False)
class NuMeasure:
    """``log nu(i)`` for ``i`` in ``[i_lo, i_lo + len - 1]``; ``nu(0) = 1``."""

    i_lo: int
    log_nu: np.ndarray
    p: float

    @property
    def i_range(self) -> tuple[int, int]:
        return self.i_lo, self.i_lo + self.log_nu.size - 1

    def __getitem__(self, i: int) -> float:
        lo, hi = self.i_range
        if not lo <= i <= hi:
            raise OutOfRange(f"nu({i}) outside tabulated range [{lo}, {hi}]")
        return float(self.log_nu[i - lo])


def weights_from_profile(profile, p: float, k_range=None) -> WeightSequence:
    """Weights ``log w_k = (log m_{k-1} - log m_k) / p``.

    By default every ``k`` whose neighbour ``k - 1`` is tabulated is covered.
    """
    if k_range is None:
        lo, hi = profile.k_range
        lo += 1
        if lo > hi:
            raise OutOfRange("profile must tabulate at least two consecutive cells")
    else:
        lo, hi = k_range
    masses = np.array([profile.log_cell_mass(k) for k in range(lo - 1, hi + 1)])
    return WeightSequence(lo, (masses[:-1] - masses[1:]) / p)


def _log_weight_prefix(w: WeightSequence, lo: int, hi: int):
    """``S(i)`` for ``i`` in ``[lo, hi]`` with ``S(0) = 0`` and ``S(i) - S(i-1) = log w_i``.

    Returns ``(start, values)``; ``values[i - start] = S(i)``.
    """
    lo, hi = min(lo, 0), max(hi, 0)
    if not w.covers(lo + 1, hi):
        raise WeightOutOfRange(f"weights must cover [{lo + 1}, {hi}], have {list(w.k_range)}")
    offset = w.k_lo
    forward = w.log_weights[1 - offset : hi + 1 - offset] if hi > 0 else np.empty(0)
    backward = w.log_weights[lo + 1 - offset : 1 - offset][::-1] if lo < 0 else np.empty(0)
    pos = compensated_cumsum(forward)
    neg = -compensated_cumsum(backward)
    values = np.concatenate([neg[::-1], [0.0], pos])
    return lo, values


def nu_from_weights(w: WeightSequence, p: float, i_range) -> NuMeasure:
    """``nu(i) = (w_1 ... w_i)^{-p}`` for ``i > 0`` and ``(w_{i+1} ... w_0)^p`` for ``i < 0``."""
    lo, hi = i_range
    start, prefix = _log_weight_prefix(w, lo, hi)
    log_nu = -p * prefix[lo - start : hi - start + 1]
    return NuMeasure(lo, log_nu, p)


def weights_roundtrip_check(w: WeightSequence, p: float, i_range=None) -> float:
    """Max ``|log w_i - log w_i'|`` after rebuilding ``w'_i = (nu(i-1)/nu(i))^{1/p}``."""
    if i_range is None:
        lo, hi = w.k_range
        i_range = (min(lo - 1, 0), max(hi, 0))
    nu = nu_from_weights(w, p, i_range)
    rebuilt = (nu.log_nu[:-1] - nu.log_nu[1:]) / p
    k_lo = nu.i_lo + 1
    original = np.array([w.log_weight(k) for k in range(k_lo, k_lo + rebuilt.size)])
    if rebuilt.size == 0:
        return 0.0
    return float(np.max(np.abs(rebuilt - original)))


def _log_subcell_masses_w(system, refinement: int) -> np.ndarray:
    return np.array([system.log_subcell_mass(0, j, refinement) for j in range(2**refinement)])


def factor_map(phi: StepFunction, system, p: float | None = None) -> SeqVector:
    """``Pi(phi)_k = mu(f^k(W))^{1/p} / mu(W) * sum_j c_{k,j} mu(W_j)``."""
    p = phi.p if p is None else p
    log_mu_w = system.log_cell_mass(0)
    log_wj = _log_subcell_masses_w(system, phi.refinement)
    per_k: dict[int, list] = {}
    for (k, j), c in phi.cells.items():
        per_k.setdefault(k, []).append((j, c))
    entries = {}
    for k, terms in per_k.items():
        # Scale each term before summing so huge or tiny cell masses stay representable.
        log_scale = system.log_cell_mass(k) / p - log_mu_w
        entries[k] = sum(c * math.exp(log_scale + log_wj[j]) for j, c in sorted(terms))
    return SeqVector(entries, p)


def semiconjugacy_residual(phi: StepFunction, system, p: float | None = None, weights=None) -> float:
    """``||Pi(T_f phi) - B_w(Pi phi)||_p`` with the weights read off ``system``."""
    p = phi.p if p is None else p
    if not phi.cells:
        return 0.0
    lhs = factor_map(apply_composition(phi, 1), system, p)
    pi_phi = factor_map(phi, system, p)
    if weights is None:
        ks = [k for k, _ in phi.cells]
        lo, hi = min(ks), max(ks)
        weights = weights_from_profile(system, p, (lo, hi))
    rhs = apply_backward_shift(weights, pi_phi, 1)
    return lp_norm_seq(lhs - rhs)


def factor_map_norm_ratio(phi: StepFunction, system, p: float | None = None) -> float:
    """``||Pi(phi)||_p / ||phi||_p``, for logging an empirical bound on ``Pi``."""
    p = phi.p if p is None else p
    denom = lp_norm_step(phi, system)
    if denom == 0:
        return 0.0
    return lp_norm_seq(factor_map(phi, system, p)) / denom
