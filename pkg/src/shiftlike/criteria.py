"""Finite-horizon evidence for the supercyclicity criteria.

The criteria are ``liminf`` statements and cannot be decided from finitely
many terms.  Deciders here return horizon-stamped three-valued verdicts;
witness constructors return objects whose defining inequalities are
re-checked from raw masses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._logmath import LOG_ZERO, log_sum, lsq_slope
from .correspondence import _log_weight_prefix, weights_from_profile
from .errors import EpsilonTooLarge, NotFound, OutOfRange
from .operator_core import StepFunction, apply_composition, lp_norm_step

SCHEMA = "criteria/v1"
DEFAULT_LOG_TOL = math.log(1e-12)
DEFAULT_HORIZON = 1000
DEFAULT_Q_MAX = 8


class Status(str, enum.Enum):
    SATISFIED = "SatisfiedAtHorizon"
    NOT_SATISFIED = "NotSatisfiedAtHorizon"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CriterionVerdict:
    status: Status
    log_inf_product: float
    argmin_n: int
    horizon: int
    q: int
    decay_slope: float
    log_tol: float

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "status": self.status.value,
            "log_inf_product": self.log_inf_product,
            "argmin_n": self.argmin_n,
            "horizon": self.horizon,
            "q": self.q,
            "decay_slope": self.decay_slope,
            "log_tol": self.log_tol,
        }


def verdict_from_sequence(log_values, q: int = 0, log_tol: float = DEFAULT_LOG_TOL) -> CriterionVerdict:
    """Turn ``log_values[n - 1]`` (``n = 1..horizon``) into a verdict.

    Satisfied iff the smallest term reaches ``log_tol``; not satisfied iff it
    does not and the least-squares slope over the tail half is ``>= 0``.
    """
    values = np.asarray(log_values, dtype=float)
    horizon = values.size
    if horizon == 0:
        return CriterionVerdict(Status.INCONCLUSIVE, math.inf, 0, 0, q, 0.0, log_tol)
    idx = int(np.argmin(values))
    inf_value = float(values[idx])
    slope = lsq_slope(values[horizon // 2 :])
    if inf_value <= log_tol:
        status = Status.SATISFIED
    elif slope >= 0:
        status = Status.NOT_SATISFIED
    else:
        status = Status.INCONCLUSIVE
    return CriterionVerdict(status, inf_value, idx + 1, horizon, q, slope, log_tol)


@dataclass(frozen=True)
class ShiftVerdict:
    per_q: tuple[CriterionVerdict, ...]

    @property
    def aggregate(self) -> Status:
        statuses = {v.status for v in self.per_q}
        if statuses == {Status.SATISFIED}:
            return Status.SATISFIED
        if Status.NOT_SATISFIED in statuses:
            return Status.NOT_SATISFIED
        return Status.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "aggregate": self.aggregate.value,
            "per_q": [v.to_dict() for v in self.per_q],
        }


def shift_product_sequence(w, q: int, horizon: int) -> np.ndarray:
    """``log[(w_1 ... w_{n+q})^{-1} (w_0 ... w_{-n+q+1})]`` for ``n = 1..horizon``.

    Products over reversed ranges follow ``prod_{a..b} = 1 / prod_{b+1..a-1}``,
    so term ``n`` equals ``-S(n+q) - S(q-n)`` with ``S`` the signed running
    log-weight sum anchored at ``S(0) = 0``.
    """
    if horizon <= 0:
        return np.empty(0)
    start, prefix = _log_weight_prefix(w, q - horizon, q + horizon)
    n = np.arange(1, horizon + 1)
    return -prefix[n + q - start] - prefix[q - n - start]


def shift_supercyclicity_verdict(
    w, q_max: int = DEFAULT_Q_MAX, horizon: int = DEFAULT_HORIZON, log_tol: float = DEFAULT_LOG_TOL
) -> ShiftVerdict:
    """Verdicts for ``q = 0..q_max``; the aggregate needs every ``q`` satisfied."""
    per_q = tuple(
        verdict_from_sequence(shift_product_sequence(w, q, horizon), q, log_tol)
        for q in range(q_max + 1)
    )
    return ShiftVerdict(per_q)


def invertible_simplified_products(w, horizon: int) -> np.ndarray:
    """``log[(w_1 ... w_n)^{-1} (w_{-1} ... w_{-n})]`` for ``n = 1..horizon``."""
    if horizon <= 0:
        return np.empty(0)
    if not w.covers(-horizon, horizon):
        raise OutOfRange(f"weights must cover [{-horizon}, {horizon}]")
    k_lo = w.k_lo
    fwd = np.cumsum(w.log_weights[1 - k_lo : horizon + 1 - k_lo])
    bwd = np.cumsum(w.log_weights[-horizon - k_lo : -k_lo][::-1])
    return bwd - fwd


def dissipative_product_sequence(profile, q: int, horizon: int) -> np.ndarray:
    """``log mu(f^{q+n}(W)) + log mu(f^{q-n}(W))`` for ``n = 1..horizon``."""
    return np.array(
        [profile.log_cell_mass(q + n) + profile.log_cell_mass(q - n) for n in range(1, horizon + 1)],
        dtype=float,
    )


def dissipative_verdict(profile, q_max: int = DEFAULT_Q_MAX, horizon: int = DEFAULT_HORIZON,
                        log_tol: float = DEFAULT_LOG_TOL) -> ShiftVerdict:
    per_q = tuple(
        verdict_from_sequence(dissipative_product_sequence(profile, q, horizon), q, log_tol)
        for q in range(q_max + 1)
    )
    return ShiftVerdict(per_q)


def equivalence_identity_check(profile, p: float, q: int, horizon: int) -> float:
    """Max ``|p * shift_n - (dissipative_n - 2 log mu(W))|`` over ``n = 1..horizon``.

    The two sides agree exactly because ``nu(i) = mu(f^i(W)) / mu(W)``.
    """
    if horizon <= 0:
        return 0.0
    w = weights_from_profile(profile, p, (q - horizon + 1, q + horizon))
    shift = shift_product_sequence(w, q, horizon)
    diss = dissipative_product_sequence(profile, q, horizon)
    return float(np.max(np.abs(p * shift - (diss - 2.0 * profile.log_cell_mass(0)))))


# -- witnesses -------------------------------------------------------------


@dataclass(frozen=True)
class WitnessTriple:
    """Cells removed from ``B``, ``k``, ``log lambda`` and the three achieved log-values."""

    removed_cells: tuple[tuple[int, int], ...]
    kept_cells: tuple[tuple[int, int], ...]
    k_star: int
    log_lambda: float
    p: float
    refinement: int
    log_epsilon: float
    log_removed_mass: float
    log_forward_scaled: float
    log_backward_scaled: float
    degenerate: bool = False

    @property
    def achieved(self) -> tuple[float, float, float]:
        return self.log_removed_mass, self.log_forward_scaled, self.log_backward_scaled

    def to_dict(self) -> dict:
        def num(x):
            return None if math.isinf(x) and x < 0 else x

        return {
            "schema": SCHEMA,
            "removed_cells": [list(c) for c in self.removed_cells],
            "kept_cells": [list(c) for c in self.kept_cells],
            "k": self.k_star,
            "log_lambda": self.log_lambda,
            "p": self.p,
            "refinement": self.refinement,
            "log_epsilon": self.log_epsilon,
            "achieved": {
                "log_mu_B_minus_Bprime": num(self.log_removed_mass),
                "log_mu_fk_Bprime_minus_p_log_lambda": num(self.log_forward_scaled),
                "log_mu_f_minus_k_Bprime_plus_p_log_lambda": num(self.log_backward_scaled),
            },
            "degenerate": self.degenerate,
        }


def _log_mass_of(system, cells, shift: int, refinement: int) -> float:
    return log_sum([system.log_subcell_mass(k + shift, j, refinement) for k, j in cells])


def verify_witness(system, witness: WitnessTriple) -> dict:
    """Re-derive the three inequalities from raw sub-cell masses."""
    r, k, p = witness.refinement, witness.k_star, witness.p
    log_removed = _log_mass_of(system, witness.removed_cells, 0, r)
    log_fwd = _log_mass_of(system, witness.kept_cells, k, r) - p * witness.log_lambda
    log_bwd = _log_mass_of(system, witness.kept_cells, -k, r) + p * witness.log_lambda
    log_eps = witness.log_epsilon
    return {
        "removed_mass_below_epsilon": bool(log_removed < log_eps),
        "forward_below_epsilon": bool(log_fwd < log_eps),
        "backward_below_epsilon": bool(log_bwd < log_eps),
        "log_values": [log_removed, log_fwd, log_bwd],
        "ok": bool(log_removed < log_eps and log_fwd < log_eps and log_bwd < log_eps),
    }


def general_condition_search(system, cells, epsilon: float, k_max: int, p: float,
                             refinement: int = 0, allow_degenerate: bool = False) -> WitnessTriple:
    """Search for ``B' ⊆ B``, ``k >= 1`` and ``lambda > 0`` with

    ``mu(B \\ B') < eps``, ``mu(f^k(B')) < lambda^p eps`` and
    ``mu(f^-k(B')) < lambda^-p eps``.

    For each ``k`` the cells of ``B`` are removed greedily, in descending
    order of ``mu(f^k(cell)) * mu(f^-k(cell))`` (ties by ascending cell), for
    as long as the removed mass stays below ``eps``.  A surviving ``B'`` works
    iff ``mu(f^k(B')) * mu(f^-k(B')) < eps^2``, and then
    ``log lambda^p = (log mu(f^k(B')) - log mu(f^-k(B'))) / 2`` balances both
    sides.  This is a heuristic: :class:`NotFound` only means the scan was too
    short.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    cells = sorted(set((int(k), int(j)) for k, j in cells))
    if not cells:
        raise ValueError("B must contain at least one cell")
    log_eps = math.log(epsilon)
    log_cell = {c: system.log_subcell_mass(c[0], c[1], refinement) for c in cells}

    for k in range(1, k_max + 1):
        fwd = {c: system.log_subcell_mass(c[0] + k, c[1], refinement) for c in cells}
        bwd = {c: system.log_subcell_mass(c[0] - k, c[1], refinement) for c in cells}
        order = sorted(cells, key=lambda c: (-(fwd[c] + bwd[c]), c))
        removed: list = []
        log_removed = LOG_ZERO
        for cut in range(len(order) + 1):
            if cut:
                candidate = log_sum([log_removed, log_cell[order[cut - 1]]])
                if not candidate < log_eps:
                    break
                removed.append(order[cut - 1])
                log_removed = candidate
            kept = order[cut:]
            if not kept:
                if allow_degenerate:
                    return WitnessTriple(tuple(sorted(removed)), (), k, 0.0, p, refinement, log_eps,
                                         log_removed, LOG_ZERO, LOG_ZERO, degenerate=True)
                break
            log_f = log_sum([fwd[c] for c in kept])
            log_b = log_sum([bwd[c] for c in kept])
            if log_f + log_b < 2 * log_eps:
                log_lam_p = 0.5 * (log_f - log_b)
                balanced = 0.5 * (log_f + log_b)
                return WitnessTriple(tuple(sorted(removed)), tuple(sorted(kept)), k, log_lam_p / p, p,
                                     refinement, log_eps, log_removed, balanced, balanced)
    raise NotFound(f"no witness with k <= {k_max}", scanned=(1, k_max))


@dataclass(frozen=True)
class SufficientWitness:
    k: int
    log_lambda: float
    log_forward: float
    log_backward: float


def sufficient_condition_check(system, epsilon: float, N: int, k_max: int, p: float) -> SufficientWitness:
    """Smallest ``k`` with ``mu(f^k(U_N)) < eps lambda^p`` and ``mu(f^-k(U_N)) < eps lambda^-p``.

    ``U_N`` is the union of ``f^j(W)`` for ``|j| <= N``; such a ``lambda``
    exists iff the product of the two masses is below ``eps^2``.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    log_eps = math.log(epsilon)
    for k in range(1, k_max + 1):
        log_f = log_sum([system.log_cell_mass(k + j) for j in range(-N, N + 1)])
        log_b = log_sum([system.log_cell_mass(-k + j) for j in range(-N, N + 1)])
        if log_f + log_b < 2 * log_eps:
            return SufficientWitness(k, 0.5 * (log_f - log_b) / p, log_f, log_b)
    raise NotFound(f"no k <= {k_max} for N = {N}", scanned=(1, k_max))


@dataclass(frozen=True)
class TransitivityWitness:
    v: StepFunction
    k_n: int | None
    log_lambda_n: float | None
    residual_to_g: float
    residual_after_map: float
    bound: float
    witness: WitnessTriple | None = field(default=None)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "k_n": self.k_n,
            "log_lambda_n": self.log_lambda_n,
            "residual_to_g": self.residual_to_g,
            "residual_after_map": self.residual_after_map,
            "residual_bound_p": self.bound,
            "v": self.v.to_json(),
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def build_transitivity_witness(g: StepFunction, h: StepFunction, system, p: float, epsilon_n: float,
                               k_max: int) -> TransitivityWitness:
    """Assemble ``v = g 1_{B'} + lambda^-1 (h o f^-k) 1_{f^k(B')}``.

    ``B`` is the union of the supports of ``g`` and ``h``.  Returns ``v`` with
    ``||v - g||_p`` and ``||lambda T_f^k v - h||_p``; both ``p``-th powers stay
    below ``2^p (||g||_inf^p + ||h||_inf^p) eps_n``.
    """
    if not 0 < epsilon_n < 2.0**-p:
        raise EpsilonTooLarge(f"epsilon_n must lie in (0, 2^-p) = (0, {2.0**-p}), got {epsilon_n}")
    if g.refinement != h.refinement:
        raise ValueError("g and h must share a refinement")
    r = g.refinement
    g = StepFunction(g.cells, r, p)
    h = StepFunction(h.cells, r, p)
    bound = 2.0**p * (g.sup_norm() ** p + h.sup_norm() ** p) * epsilon_n
    cells = set(g.cells) | set(h.cells)
    if not cells:
        return TransitivityWitness(StepFunction({}, r, p), None, None, 0.0, 0.0, bound)

    wit = general_condition_search(system, cells, epsilon_n, k_max, p, refinement=r)
    k, log_lam = wit.k_star, wit.log_lambda
    kept = set(wit.kept_cells)
    inv_lam = math.exp(-log_lam)
    v_cells: dict = {}
    for c in kept:
        if c in g.cells:
            v_cells[c] = v_cells.get(c, 0j) + g.cells[c]
        if c in h.cells:
            target = (c[0] + k, c[1])
            v_cells[target] = v_cells.get(target, 0j) + inv_lam * h.cells[c]
    v = StepFunction(v_cells, r, p)
    residual_g = lp_norm_step(v - g, system)
    mapped = apply_composition(v, k).scaled(math.exp(log_lam))
    residual_h = lp_norm_step(mapped - h, system)
    return TransitivityWitness(v, k, log_lam, residual_g, residual_h, bound, wit)
