"""Analysis pipeline behind the ``analyze`` command."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import numpy as np

from .correspondence import (
    factor_map_norm_ratio,
    semiconjugacy_residual,
    weights_from_profile,
    weights_roundtrip_check,
)
from .criteria import (
    CriterionVerdict,
    ShiftVerdict,
    dissipative_product_sequence,
    equivalence_identity_check,
    general_condition_search,
    shift_product_sequence,
    verdict_from_sequence,
    verify_witness,
)
from .operator_core import StepFunction
from .system_model import DensityLineSystem, distortion_scan

REPORT_SCHEMA = "report/v1"
SEMICONJ_CASES = 16
SEMICONJ_REFINEMENT = 4
DISTORTION_HALF_WIDTH = 40


def _map(func, items, threads: int):
    if threads <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def random_step_function(rng: np.random.Generator, refinement: int, p: float, k_span: int = 6,
                         n_cells: int = 24) -> StepFunction:
    ks = rng.integers(-k_span, k_span + 1, n_cells)
    js = rng.integers(0, 2**refinement, n_cells)
    coeffs = rng.normal(size=n_cells) + 1j * rng.normal(size=n_cells)
    return StepFunction({(int(k), int(j)): complex(c) for k, j, c in zip(ks, js, coeffs)}, refinement, p)


def analyze(system_id: str, system, *, p: float = 2.0, horizon: int = 1000, q_max: int = 8,
            log_tol: float = math.log(1e-12), threads: int = 1, seed: int = 0,
            timestamp: bool = True, witness_epsilon: float | None = None,
            witness_cells=None, witness_k_max: int = 200, config_echo: dict | None = None) -> dict:
    reach = horizon + q_max + 1
    profile = system.profile((-reach, reach))
    weights = weights_from_profile(profile, p)

    if isinstance(system, DensityLineSystem):
        scan = distortion_scan(system, (-DISTORTION_HALF_WIDTH, DISTORTION_HALF_WIDTH))
        distortion = {
            "model": "density",
            "bound_estimate": scan.bound_estimate,
            "bounded_verdict": scan.bounded_verdict.value,
            "log_ratio_by_k": {str(r.k): r.log_rho_sup - r.log_rho_inf for r in scan.records},
        }
    else:
        distortion = {"model": "homogeneous", "bound_estimate": 1.0, "bounded_verdict": "BoundedAtHorizon"}

    rng = np.random.default_rng(seed)
    cases = [random_step_function(rng, SEMICONJ_REFINEMENT, p) for _ in range(SEMICONJ_CASES)]
    residuals = _map(lambda phi: semiconjugacy_residual(phi, system, p, weights), cases, threads)
    pi_ratios = [factor_map_norm_ratio(phi, system, p) for phi in cases]

    def shift_verdict(q) -> CriterionVerdict:
        return verdict_from_sequence(shift_product_sequence(weights, q, horizon), q, log_tol)

    def diss_verdict(q) -> CriterionVerdict:
        return verdict_from_sequence(dissipative_product_sequence(profile, q, horizon), q, log_tol)

    qs = list(range(q_max + 1))
    shift = ShiftVerdict(tuple(_map(shift_verdict, qs, threads)))
    diss = ShiftVerdict(tuple(_map(diss_verdict, qs, threads)))
    equivalence = _map(lambda q: equivalence_identity_check(profile, p, q, horizon), qs, threads)

    report = {
        "schema": REPORT_SCHEMA,
        "system_id": system_id,
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds") if timestamp else None,
        "sections": {
            "profile_summary": {
                "k_range": list(profile.k_range),
                "log_mu_W": profile.log_mu_w,
                "log_mass_min": float(profile.log_mass.min()),
                "log_mass_max": float(profile.log_mass.max()),
            },
            "distortion": distortion,
            "weights": {
                "p": p,
                "k_range": list(weights.k_range),
                "log_lower": weights.bounds[0],
                "log_upper": weights.bounds[1],
            },
            "nu_roundtrip_error": weights_roundtrip_check(weights, p),
            "semiconjugacy_residuals": {
                "cases": SEMICONJ_CASES,
                "refinement": SEMICONJ_REFINEMENT,
                "seed": seed,
                "max": max(residuals),
                "factor_map_norm_ratio_max": max(pi_ratios),
            },
            "criterion_verdicts": {"shift": shift.to_dict(), "dissipative": diss.to_dict()},
            "equivalence_discrepancy": max(equivalence),
        },
        "config_echo": config_echo or {},
    }
    if witness_epsilon is not None:
        cells = witness_cells or [(j, 0) for j in range(-3, 4)]
        wit = general_condition_search(system, cells, witness_epsilon, witness_k_max, p)
        check = verify_witness(system, wit)
        check.pop("log_values")
        report["sections"]["witnesses"] = [{**wit.to_dict(), "verification": check}]
    return report
