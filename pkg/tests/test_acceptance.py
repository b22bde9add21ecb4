"""Acceptance checks at the numerical-experiment parameters.

Each test records one PASS/FAIL line, printed in the terminal summary under
"acceptance criteria", then asserts the same condition.
"""

import math
import time

import numpy as np
import pytest

from conftest import EXP_N0, RHO_SIGMA2, experiment_config
from wssus_capacity import cli
from wssus_capacity.bounds import (
    LinkConfig,
    bandwidth_grid,
    coherent_term,
    critical_bandwidth,
    lb,
    lb_approx,
    penalty_A,
    sweep,
    ub1,
    ub2,
    viterbi_lb,
)
from wssus_capacity.channel_model import PowerBudget, brick
from wssus_capacity.coherent_mi import awgn_cm_mi, get_constellation, mc_mi_oracle
from wssus_capacity.oracle import critical_lattice, szego_check

W_RANGE = (1e7, 1e12)


@pytest.fixture(scope="module")
def experiment():
    cfg = experiment_config()
    mi = coherent_term("qpsk")
    start = time.perf_counter()
    curve = sweep(cfg, bandwidth_grid(*W_RANGE, 40), mi)
    W_lb, lb_star = critical_bandwidth("lb", cfg, W_RANGE, 40, mi=mi)
    W_ub1, ub1_star = critical_bandwidth("ub1", cfg, W_RANGE, 40)
    elapsed = time.perf_counter() - start
    return dict(cfg=cfg, mi=mi, curve=curve, W_lb=W_lb, lb_star=lb_star, W_ub1=W_ub1,
                ub1_star=ub1_star, elapsed=elapsed)


def test_interior_maxima_and_critical_bandwidth(experiment, acceptance_record):
    curve = experiment["curve"]
    n = len(curve)
    i_ub1, i_lb = curve.argmax("ub1"), curve.argmax("lb")
    ub1_interior = 0 < i_ub1 < n - 1
    lb_interior = 0 < i_lb < n - 1
    W_lb = experiment["W_lb"]
    in_range = 3e8 <= W_lb <= 3e9
    fast = experiment["elapsed"] <= 60.0
    ok = ub1_interior and lb_interior and in_range and fast
    acceptance_record(1, ok, f"UB1 interior={ub1_interior} (W*={experiment['W_ub1']:.4g} Hz), "
                             f"LB interior={lb_interior}, LB W*={W_lb:.4g} Hz in [3e8, 3e9]={in_range}, "
                             f"runtime={experiment['elapsed']:.1f} s <= 60 s")
    assert ub1_interior and lb_interior
    assert in_range, f"LB maximizer {W_lb:.4g} Hz outside [3e8, 3e9]"
    assert fast


def test_overspreading_collapse(experiment, acceptance_record):
    cfg, mi = experiment["cfg"], experiment["mi"]
    lb_far = lb(1e12, cfg, mi)[0]
    ub1_far = ub1(1e12, cfg)[0]
    lb_ratio = lb_far / experiment["lb_star"]
    ub1_ratio = ub1_far / experiment["ub1_star"]
    ok = lb_ratio < 0.05 and ub1_ratio < 0.2
    acceptance_record(2, ok, f"lb_raw(1e12)/lb(W*)={lb_ratio:.4f} < 0.05, "
                             f"ub1(1e12)/ub1(W*)={ub1_ratio:.4f} < 0.2")
    assert ub1_ratio < 0.2
    assert lb_ratio < 0.05


def test_sandwich_on_sweep(experiment, acceptance_record):
    curve = experiment["curve"]
    lbv, u1, u2 = curve.column("lb"), curve.column("ub1"), curve.column("ub2")
    slack = np.minimum(u1, u2) + 1e-6 * u2 - lbv
    ok = bool(np.all(slack >= 0)) and not curve.failures
    acceptance_record(3, ok, f"min slack {slack.min():.4g} nat/s over {len(curve)} points, "
                             f"{len(curve.failures)} failed points")
    assert ok


def test_ub2_wideband_limit(acceptance_record):
    value = ub2(1e13, experiment_config())
    rel = abs(value - RHO_SIGMA2) / RHO_SIGMA2
    acceptance_record(4, rel <= 0.01, f"ub2(1e13)={value:.6g}, rel. diff to (P/N0)sigma2 {rel:.3e} <= 1e-2")
    assert rel <= 0.01


def test_low_snr_approximation_quality(experiment, acceptance_record):
    cfg, mi, curve, W_star = experiment["cfg"], experiment["mi"], experiment["curve"], experiment["W_lb"]
    W = curve.column("bandwidth_hz")
    far = W >= 2 * W_star
    rel_far = np.abs(curve.column("lb_approx")[far] - curve.column("lb")[far]) / curve.column("lb")[far]
    near_lb = lb(W_star / 30, cfg, mi)[0]
    rel_near = abs(lb_approx(W_star / 30, cfg)[0] - near_lb) / near_lb
    ok = far.any() and rel_far.max() <= 0.05 and rel_near >= 0.5
    acceptance_record(5, ok, f"max rel. diff {rel_far.max():.4f} <= 0.05 on {far.sum()} points W >= 2W*, "
                             f"rel. diff at W*/30 {rel_near:.3f} >= 0.5")
    assert ok


def test_brick_closed_forms_against_quadrature(acceptance_record):
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        tau0 = 10 ** rng.uniform(-7.5, -5.5)
        nu0 = 10 ** rng.uniform(1, 3)
        cfg = LinkConfig(brick(tau0, nu0, 10 ** rng.uniform(-11, -7)),
                         PowerBudget(10 ** rng.uniform(-5, -1), EXP_N0, float(rng.uniform(1, 100))),
                         1.0)
        W = 10 ** rng.uniform(6, 12)
        pairs = [(penalty_A(W, cfg.beta, cfg, "closed"), penalty_A(W, cfg.beta, cfg, "quadrature")),
                 (viterbi_lb(cfg.beta, cfg, "closed"), viterbi_lb(cfg.beta, cfg, "quadrature"))]
        for closed, quad in pairs:
            worst = max(worst, abs(closed - quad) / abs(closed))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed <= 5.0
    acceptance_record(6, ok, f"worst rel. diff {worst:.3e} <= 1e-10, runtime {elapsed:.2f} s <= 5 s")
    assert ok


def test_szego_convergence_at_critical_lattice(acceptance_record):
    sf = brick()
    start = time.perf_counter()
    report = szego_check([16, 32, 64], 8, critical_lattice(sf), sf, PowerBudget(1e-3, EXP_N0))
    elapsed = time.perf_counter() - start
    rel = report.rel_errors()
    decreasing = bool(np.all(np.diff(rel) < 0))
    small = rel[-1] <= 0.05
    ok = decreasing and small and elapsed <= 120.0
    acceptance_record(7, ok, f"rel. errors {', '.join(f'{r:.3e}' for r in rel)}; strictly decreasing={decreasing}, "
                             f"K=64 error <= 5%={small}, runtime {elapsed:.2f} s <= 120 s")
    assert small and elapsed <= 120.0
    assert decreasing


def test_mutual_information_cross_validation(acceptance_record):
    qpsk = get_constellation("qpsk")
    details, ok = [], True
    for k, snr in enumerate((0.1, 1.0, 10.0)):
        est, se = mc_mi_oracle(qpsk, snr, n=1_000_000, seed=100 + k)
        z = abs(awgn_cm_mi(qpsk, snr) - est) / se
        ok &= z < 3
        details.append(f"snr={snr}: {z:.2f} se")
    sat = abs(awgn_cm_mi(qpsk, 1e4) - math.log(4))
    ok &= sat <= 1e-3
    acceptance_record(8, ok, "; ".join(details) + f"; |I(1e4) - log 4|={sat:.2e} <= 1e-3")
    assert ok


def test_infinite_bandwidth_bound_properties(acceptance_record):
    cfg = experiment_config()
    betas = [2.0**k for k in range(11)]
    values = np.array([viterbi_lb(b, cfg) for b in betas])
    nondecreasing = bool(np.all(np.diff(values) >= 0))
    bounded = bool(np.all(values <= RHO_SIGMA2))
    gap_shrinks = RHO_SIGMA2 - values[-1] < RHO_SIGMA2 - values[0]
    ok = nondecreasing and bounded and gap_shrinks
    acceptance_record(9, ok, f"nondecreasing={nondecreasing}, <= (P/N0)sigma2={bounded}, "
                             f"gap {RHO_SIGMA2 - values[0]:.4g} -> {RHO_SIGMA2 - values[-1]:.4g}")
    assert ok


def test_byte_identical_outputs(tmp_path, acceptance_record):
    outputs = []
    for run in ("first", "second"):
        d = tmp_path / run
        d.mkdir()
        code = cli.main(["sweep", "--out", str(d / "bounds.csv"), "--set", f"plot={d / 'bounds.svg'}",
                         "--seed", "7"])
        assert code == 0
        outputs.append(((d / "bounds.csv").read_bytes(), (d / "bounds.svg").read_bytes()))
    ok = outputs[0] == outputs[1]
    acceptance_record(10, ok, f"CSV identical={outputs[0][0] == outputs[1][0]}, "
                              f"SVG identical={outputs[0][1] == outputs[1][1]}")
    assert ok
