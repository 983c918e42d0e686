"""One test per acceptance criterion; each prints a PASS/FAIL line in the terminal summary."""

import math
import time

import numpy as np

from conftest import E, random_profile, record_acceptance
from shiftlike import (
    DensityLineSystem,
    MeasureProfile,
    Status,
    StepFunction,
    WeightSequence,
    build_transitivity_witness,
    dissipative_verdict,
    distortion_scan,
    equivalence_identity_check,
    general_condition_search,
    nu_from_weights,
    semiconjugacy_residual,
    shift_supercyclicity_verdict,
    verify_witness,
    weights_from_profile,
    weights_roundtrip_check,
)
from shiftlike.criteria import CriterionVerdict
from shiftlike.report import random_step_function

TOL = 1e-12


def balance_error(system, witness):
    """Relative gap between the two lambda-scaled sides, recomputed from raw cell masses."""
    k, p = witness.k_star, witness.p
    r = witness.refinement
    fwd = sum(math.exp(system.log_subcell_mass(c + k, j, r)) for c, j in witness.kept_cells)
    bwd = sum(math.exp(system.log_subcell_mass(c - k, j, r)) for c, j in witness.kept_cells)
    lam_p = math.exp(p * witness.log_lambda)
    a, b = fwd / lam_p, bwd * lam_p
    return abs(a - b) / max(a, b)


def test_ac01_example_masses():
    t0 = time.perf_counter()
    system = DensityLineSystem.paper_example()
    err = 0.0
    for n in range(1, 61):
        err = max(err, abs(system.log_cell_mass(n) - (n + math.log(E - 1))))
        err = max(err, abs(system.log_cell_mass(-n) - (-2 * n + math.log(0.5 * (E**2 - 1)))))
    elapsed = time.perf_counter() - t0
    ok = err < 1e-10 and elapsed < 1.0
    record_acceptance("AC1 example masses", ok, f"max log error {err:.2e}, {elapsed:.3f}s")
    assert ok


def test_ac02_distortion():
    report = distortion_scan(DensityLineSystem.paper_example(), (-40, 40))
    err = max(abs(rec.ratio - (1.0 if rec.k >= 0 else E)) for rec in report.records)
    ok = err < 1e-12 and len(report.records) == 81
    record_acceptance("AC2 distortion ratios", ok, f"max error {err:.2e}")
    assert ok


def test_ac03_supercyclicity_verdict():
    system = DensityLineSystem.paper_example()
    profile = system.profile((-120, 120))
    diss = dissipative_verdict(profile, q_max=8, horizon=100, log_tol=math.log(TOL))
    q0 = diss.per_q[0]
    slope_ok = abs(q0.decay_slope + 1.0) < 1e-6 and q0.status is Status.SATISFIED
    agree = True
    for p in (1.0, 2.0):
        shift = shift_supercyclicity_verdict(weights_from_profile(profile, p), q_max=8, horizon=100,
                                             log_tol=math.log(TOL))
        agree &= all(s.status is d.status for s, d in zip(shift.per_q, diss.per_q))
    ok = slope_ok and agree and diss.aggregate is Status.SATISFIED
    record_acceptance("AC3 supercyclicity verdict", ok,
                      f"slope {q0.decay_slope:.12f}, shift agrees for q<=8: {agree}")
    assert ok


def test_ac04_equivalence_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        prof = random_profile(rng, -120, 120)
        for p in (1, 2, 3):
            for q in (0, 1, 5):
                worst = max(worst, equivalence_identity_check(prof, p, q, 100))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 5.0
    record_acceptance("AC4 equivalence identity", ok, f"max discrepancy {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_ac05_negative_controls():
    unweighted = MeasureProfile.constant(0.0, (-1, 1))
    constant = DensityLineSystem.uniform().profile((-1020, 1020))
    verdicts = []
    for prof in (unweighted, constant):
        verdicts += dissipative_verdict(prof, q_max=8).per_q
        w = weights_from_profile(prof, 2.0, (-1010, 1010))
        verdicts += shift_supercyclicity_verdict(w, q_max=8).per_q
    ok = all(v.status is Status.NOT_SATISFIED and v.decay_slope == 0.0 for v in verdicts)
    record_acceptance("AC5 negative controls", ok, f"{len(verdicts)} verdicts, all slope 0")
    assert ok


def test_ac06_roundtrips():
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        w = WeightSequence(-5000, rng.uniform(math.log(0.5), math.log(2.0), 10_001))
        worst = max(worst, weights_roundtrip_check(w, 2.0, (-5001, 5000)))
    prof = DensityLineSystem.paper_example().profile((-600, 600))
    nu_err = 0.0
    for p in (1.0, 2.0, 3.0):
        nu = nu_from_weights(weights_from_profile(prof, p), p, (-500, 500))
        expected = prof.log_mass[100:1101] - prof.log_cell_mass(0)
        nu_err = max(nu_err, float(np.max(np.abs(nu.log_nu - expected))))
    ok = worst < 1e-10 and nu_err < 1e-10
    record_acceptance("AC6 correspondence round-trips", ok, f"weights {worst:.2e}, nu {nu_err:.2e}")
    assert ok


def test_ac07_semiconjugacy():
    rng = np.random.default_rng(7)
    homogeneous = 0.0
    for _ in range(100):
        system = random_profile(rng, -12, 12)
        phi = random_step_function(rng, 3, float(rng.choice([1.0, 2.0, 3.0])), k_span=8)
        homogeneous = max(homogeneous, semiconjugacy_residual(phi, system))
    density = 0.0
    example = DensityLineSystem.paper_example()
    for _ in range(100):
        phi = random_step_function(rng, 4, float(rng.choice([1.0, 2.0])), k_span=8)
        density = max(density, semiconjugacy_residual(phi, example))
    ok = homogeneous < 1e-10 and density < 1e-8
    record_acceptance("AC7 semi-conjugacy", ok, f"homogeneous {homogeneous:.2e}, density r=4 {density:.2e}")
    assert ok


def test_ac08_transitivity_witness():
    t0 = time.perf_counter()
    system = DensityLineSystem.paper_example()
    ok = True
    worst = 0.0
    for p in (1.0, 2.0):
        chi = StepFunction.indicator([0], p=p)
        for m in range(5, 13):
            eps = 2.0**-m
            out = build_transitivity_witness(chi, chi, system, p, eps, 400)
            bound = 2**p * (chi.sup_norm() ** p + chi.sup_norm() ** p) * eps
            ok &= out.residual_to_g**p <= bound and out.residual_after_map**p <= bound
            ok &= verify_witness(system, out.witness)["ok"]
            worst = max(worst, out.residual_to_g**p / bound, out.residual_after_map**p / bound)
    elapsed = time.perf_counter() - t0
    ok = bool(ok) and elapsed < 10.0
    record_acceptance("AC8 transitivity witnesses", ok, f"max residual^p / bound {worst:.3f}, {elapsed:.2f}s")
    assert ok


def test_ac09_lambda_optimality():
    system = DensityLineSystem.paper_example()
    witnesses = []
    for p in (1.0, 2.0, 3.0):
        for eps in (0.5, 0.1, 1e-3, 1e-6):
            witnesses.append(general_condition_search(system, [(j, 0) for j in range(-3, 4)], eps, 400, p))
        chi = StepFunction.indicator([0, 1], refinement=2, p=p)
        for m in range(5, 13):
            if 2.0**-m < 2.0**-p:
                witnesses.append(build_transitivity_witness(chi, chi, system, p, 2.0**-m, 400).witness)
    worst = max(balance_error(system, w) for w in witnesses)
    ok = worst < 1e-12
    record_acceptance("AC9 lambda optimality", ok, f"{len(witnesses)} witnesses, max rel gap {worst:.2e}")
    assert ok


def test_ac10_verdict_contract():
    # Every verdict is horizon-stamped and three-valued; none claims a limit.
    fields = set(CriterionVerdict.__dataclass_fields__)
    stamped = {"horizon", "log_tol", "status"} <= fields
    names = {s.value for s in Status}
    three_valued = names == {"SatisfiedAtHorizon", "NotSatisfiedAtHorizon", "Inconclusive"}
    prof = DensityLineSystem.paper_example().profile((-60, 60))
    v = dissipative_verdict(prof, q_max=2, horizon=50).per_q[0]
    carried = v.to_dict()["horizon"] == 50 and "log_tol" in v.to_dict()
    ok = stamped and three_valued and carried
    record_acceptance("AC10 horizon-stamped verdicts", ok, "statuses " + ", ".join(sorted(names)))
    assert ok
