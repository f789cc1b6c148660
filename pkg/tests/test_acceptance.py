"""Acceptance gate: eight pinned criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
Criteria 6 and 8 share one noise sweep; criterion 7 runs the
observed-fraction sweep. Both execute at full scale (N=20, 20 trials)
and dominate this module's runtime.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from scinfer import (
    HyperParams,
    InstanceParams,
    SweepSpec,
    build_skeleton,
    closure_violations,
    edge_scores,
    evaluate,
    generate_instance,
    hodge_decompose,
    interpolate_edge_signals,
    run_greedy_scl,
    run_sweep,
    select_edges,
    select_triangles,
    triangle_scores,
)

from oracles import (
    brute_force_edges,
    brute_force_triangles,
    edge_subproblem_value,
    gradient_descent_interpolation,
    triangle_subproblem_value,
)


def _report(label: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {label}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


def _grid_mean(rows, method, metric, value):
    xs = [
        r[metric]
        for r in rows
        if r["method"] == method and r["sweep_value"] == value and r["status"] == "ok"
    ]
    assert xs, f"no ok rows for {method} at {value}"
    return float(np.mean(xs))


def _paired_samples(rows, method, metric, value):
    by_trial = {
        r["trial"]: r[metric]
        for r in rows
        if r["method"] == method and r["sweep_value"] == value and r["status"] == "ok"
    }
    return np.array([by_trial[t] for t in sorted(by_trial)])


NOISE_GRID = (0.0, 0.05, 0.1, 0.2)
FRACTION_GRID = (0.2, 0.4, 0.6, 0.8, 0.95)


@pytest.fixture(scope="module")
def noise_sweep(tmp_path_factory):
    """N=20 noise sweep shared by criteria 6 and 8."""
    spec = SweepSpec(
        variable="node_noise_std",
        grid=NOISE_GRID,
        n_trials=20,
        base_seed=1000,
        methods=("GreedySCL", "SepSCL", "RC"),
        instance=InstanceParams(),
        params=HyperParams(),
    )
    start = time.perf_counter()
    rows = run_sweep(spec, tmp_path_factory.mktemp("noise_sweep"), jobs=1)
    elapsed = time.perf_counter() - start
    assert all(r["status"] == "ok" for r in rows)
    return rows, elapsed


@pytest.fixture(scope="module")
def observed_sweep(tmp_path_factory):
    """N=20 observed-fraction sweep for criterion 7."""
    spec = SweepSpec(
        variable="observed_fraction",
        grid=FRACTION_GRID,
        n_trials=20,
        base_seed=2000,
        methods=("GreedySCL", "SepSCL", "RC"),
        instance=InstanceParams(node_noise_std=0.1),
        params=HyperParams(),
    )
    start = time.perf_counter()
    rows = run_sweep(spec, tmp_path_factory.mktemp("observed_sweep"), jobs=1)
    elapsed = time.perf_counter() - start
    assert all(r["status"] == "ok" for r in rows)
    return rows, elapsed


class TestAcceptance:
    def test_c1_greedy_blocks_match_brute_force(self):
        """Both selection blocks hit the exhaustive minimum on N=5."""
        skeleton = build_skeleton(5)
        params = HyperParams(e_min=0, t_min=0)
        start = time.perf_counter()
        worst = 0.0
        for case in range(20):
            rng = np.random.default_rng(900 + case)
            x1_est = rng.standard_normal((skeleton.n_edges, 6))
            x0 = rng.standard_normal((skeleton.n_nodes, 6))
            w1 = (rng.random(skeleton.n_edges) < 0.6).astype(np.int8)
            w2 = (rng.random(skeleton.n_triangles) < 0.3).astype(np.int8)
            observed = np.flatnonzero(rng.random(skeleton.n_edges) < 0.4)
            t_min = int(rng.integers(0, skeleton.n_triangles + 1))
            e_min = int(rng.integers(observed.size, skeleton.n_edges + 1))

            got_w2 = select_triangles(triangle_scores(skeleton, x1_est, w1, params), t_min)
            got_val = triangle_subproblem_value(
                skeleton.b2_full, x1_est, w1, got_w2, params.alpha2, params.beta2, params.gamma
            )
            best_val, _ = brute_force_triangles(
                skeleton.b2_full, x1_est, w1, params.alpha2, params.beta2, params.gamma, t_min
            )
            worst = max(worst, abs(got_val - best_val) / max(abs(best_val), 1e-30))

            scores = edge_scores(skeleton, x0, w2, observed, params)
            got_w1 = select_edges(scores, observed, e_min)
            got_val = edge_subproblem_value(
                skeleton.b1_full, skeleton.b2_full, x0, got_w1, w2,
                params.alpha1, params.beta1, params.gamma,
            )
            best_val, _ = brute_force_edges(
                skeleton.b1_full, skeleton.b2_full, x0, w2, observed,
                params.alpha1, params.beta1, params.gamma, e_min,
            )
            worst = max(worst, abs(got_val - best_val) / max(abs(best_val), 1e-30))
        elapsed = time.perf_counter() - start
        _report(
            "C1",
            worst <= 1e-12 and elapsed < 10.0,
            f"20 instances x 2 blocks vs 2^10 enumeration, worst rel gap "
            f"{worst:.2e} <= 1e-12, {elapsed:.1f}s < 10s",
        )

    def test_c2_interpolation_matches_solver_oracle(self):
        """Closed form equals gradient descent and solves the normal equations."""
        skeleton = build_skeleton(6)
        params = HyperParams(e_min=0, t_min=0)
        start = time.perf_counter()
        worst_gd, worst_ne = 0.0, 0.0
        for case in range(10):
            rng = np.random.default_rng(700 + case)
            w2 = (rng.random(skeleton.n_triangles) < 0.3).astype(np.int8)
            n_obs = int(rng.integers(1, skeleton.n_edges + 1))
            observed = np.sort(rng.choice(skeleton.n_edges, size=n_obs, replace=False))
            x1_obs = rng.standard_normal((n_obs, 5))

            got = interpolate_edge_signals(skeleton, w2, observed, x1_obs, params)
            want = gradient_descent_interpolation(
                skeleton.b2_full, w2, observed, x1_obs, params.beta2, params.eta
            )
            worst_gd = max(
                worst_gd,
                np.linalg.norm(got - want) / max(np.linalg.norm(want), 1e-30),
            )

            sys_mat = params.beta2 * (
                skeleton.b2_full * w2.astype(float)
            ) @ skeleton.b2_full.T
            sys_mat[observed, observed] += params.eta
            rhs = np.zeros_like(got)
            rhs[observed] = params.eta * x1_obs
            worst_ne = max(
                worst_ne,
                np.linalg.norm(sys_mat @ got - rhs) / max(np.linalg.norm(rhs), 1e-30),
            )
        elapsed = time.perf_counter() - start
        _report(
            "C2",
            worst_gd <= 1e-6 and worst_ne <= 1e-8 and elapsed < 10.0,
            f"10 instances: vs gradient descent {worst_gd:.2e} <= 1e-6, "
            f"normal equations {worst_ne:.2e} <= 1e-8, {elapsed:.1f}s < 10s",
        )

    def test_c3_monotone_convergence(self):
        """Nonincreasing objective; fixpoint within 50 iterations on >= 48/50."""
        instance = InstanceParams(n_nodes=10)
        start = time.perf_counter()
        monotone_ok = True
        converged_count = 0
        worst_rise = -np.inf
        for seed in range(50):
            truth, signals = generate_instance(instance, seed)
            params = HyperParams(
                e_min=int(truth.selection.w1.sum()),
                t_min=int(truth.selection.w2.sum()),
            )
            state = run_greedy_scl(
                truth.skeleton, signals.x0, signals.x1_obs, signals.observed_edges, params
            )
            trace = state.objective_trace
            rises = [b - a for a, b in zip(trace, trace[1:])]
            if rises:
                worst_rise = max(worst_rise, max(rises))
            monotone_ok &= all(r <= 1e-10 for r in rises)
            converged_count += state.converged and state.iterations_run <= 50
        elapsed = time.perf_counter() - start
        _report(
            "C3",
            monotone_ok and converged_count >= 48 and elapsed < 60.0,
            f"50 ER(10,0.4) runs: worst trace rise {worst_rise:.2e} <= 1e-10, "
            f"converged {converged_count}/50 >= 48, {elapsed:.1f}s < 60s",
        )

    def test_c4_structural_invariants(self):
        """Chain property, closure of outputs, Hodge identities."""
        start = time.perf_counter()
        # Entries are {-1, 0, 1} held in float64, so every dot product
        # is exact integer arithmetic; the product must be exactly zero.
        chain_ok = True
        for n in range(2, 16):
            skeleton = build_skeleton(n)
            entries_ok = bool(
                np.isin(skeleton.b1_full, (-1.0, 0.0, 1.0)).all()
                and np.isin(skeleton.b2_full, (-1.0, 0.0, 1.0)).all()
            )
            product = skeleton.b1_full @ skeleton.b2_full
            chain_ok &= entries_ok and not product.any()

        closure_ok = True
        for n_nodes, seed in ((6, 0), (6, 1), (8, 2), (8, 3), (8, 4), (10, 5)):
            instance = InstanceParams(
                n_nodes=n_nodes, node_noise_std=0.1, observed_fraction=0.6
            )
            truth, signals = generate_instance(instance, seed)
            params = HyperParams(
                e_min=int(truth.selection.w1.sum()),
                t_min=int(truth.selection.w2.sum()),
            )
            state = run_greedy_scl(
                truth.skeleton, signals.x0, signals.x1_obs, signals.observed_edges, params
            )
            report = closure_violations(truth.skeleton, state.selection.w1, state.selection.w2)
            closure_ok &= report.count == 0

        worst_hodge = 0.0
        for seed in range(10):
            truth, _ = generate_instance(InstanceParams(n_nodes=8), seed)
            rng = np.random.default_rng(4000 + seed)
            n_active = int(truth.selection.w1.sum())
            flow = rng.standard_normal(n_active)
            parts = hodge_decompose(truth.skeleton, truth.selection.w1, truth.selection.w2, flow)
            scale = max(np.linalg.norm(flow), 1e-30)
            recon = parts.gradient + parts.curl + parts.harmonic
            worst_hodge = max(worst_hodge, np.linalg.norm(recon - flow) / scale)
            for a, b in (
                (parts.gradient, parts.curl),
                (parts.gradient, parts.harmonic),
                (parts.curl, parts.harmonic),
            ):
                worst_hodge = max(worst_hodge, abs(float(a @ b)) / scale**2)
        elapsed = time.perf_counter() - start
        _report(
            "C4",
            chain_ok and closure_ok and worst_hodge <= 1e-8 and elapsed < 30.0,
            f"chain product exactly zero for N=2..15: {chain_ok}; "
            f"6 pruned outputs closed: {closure_ok}; Hodge worst residual "
            f"{worst_hodge:.2e} <= 1e-8; {elapsed:.1f}s < 30s",
        )

    def test_c5_noiseless_recovery(self):
        """Perfect edges and near-perfect triangles on clean full data."""
        instance = InstanceParams(n_nodes=15, edge_prob=0.4, observed_fraction=1.0)
        assert instance.curl_atten == 0.05
        start = time.perf_counter()
        good = 0
        f1s = []
        for seed in range(20):
            truth, signals = generate_instance(instance, seed)
            params = HyperParams(
                e_min=int(truth.selection.w1.sum()),
                t_min=int(truth.selection.w2.sum()),
            )
            state = run_greedy_scl(
                truth.skeleton, signals.x0, signals.x1_obs, signals.observed_edges, params
            )
            report = evaluate(truth.skeleton, state.selection, truth.selection)
            good += report.edge_f1 == 1.0 and report.triangle_f1 >= 0.9
            f1s.append((report.edge_f1, report.triangle_f1))
        elapsed = time.perf_counter() - start
        _report(
            "C5",
            good >= 18 and elapsed < 120.0,
            f"edge F1 = 1.0 and triangle F1 >= 0.9 on {good}/20 ER(15,0.4) "
            f"seeds (need 18), min triangle F1 {min(t for _, t in f1s):.3f}, "
            f"{elapsed:.1f}s < 120s",
        )

    def test_c6_noise_trend(self, noise_sweep):
        """GreedySCL beats SepSCL on L0 everywhere; best LU at zero noise."""
        rows, elapsed = noise_sweep
        greedy_l0 = [_grid_mean(rows, "GreedySCL", "nerr_l0", v) for v in NOISE_GRID]
        sep_l0 = [_grid_mean(rows, "SepSCL", "nerr_l0", v) for v in NOISE_GRID]
        l0_ok = all(g < s for g, s in zip(greedy_l0, sep_l0))
        greedy_lu0 = _grid_mean(rows, "GreedySCL", "nerr_lu", 0.0)
        sep_lu0 = _grid_mean(rows, "SepSCL", "nerr_lu", 0.0)
        rc_lu0 = _grid_mean(rows, "RC", "nerr_lu", 0.0)
        lu_ok = greedy_lu0 <= sep_lu0 and greedy_lu0 <= rc_lu0
        _report(
            "C6",
            l0_ok and lu_ok and elapsed < 900.0,
            f"mean NErr(L0) greedy {['%.3f' % v for v in greedy_l0]} < "
            f"sep {['%.3f' % v for v in sep_l0]} at all 4 noise levels: {l0_ok}; "
            f"noise-0 NErr(LU) {greedy_lu0:.3f} <= sep {sep_lu0:.3f} and "
            f"rc {rc_lu0:.3f}: {lu_ok}; {elapsed:.0f}s < 900s",
        )

    def test_c7_observed_fraction_trend(self, observed_sweep):
        """GreedySCL improves with more observations; SepSCL L0 is flat."""
        rows, elapsed = observed_sweep
        monotone_ok = True
        for metric in ("nerr_l0", "nerr_lu"):
            for lo, hi in zip(FRACTION_GRID, FRACTION_GRID[1:]):
                diff = _paired_samples(rows, "GreedySCL", metric, hi) - _paired_samples(
                    rows, "GreedySCL", metric, lo
                )
                stderr = diff.std(ddof=1) / np.sqrt(diff.size)
                monotone_ok &= diff.mean() <= stderr
        sep_means = [_grid_mean(rows, "SepSCL", "nerr_l0", v) for v in FRACTION_GRID]
        sep_stderr = max(
            _paired_samples(rows, "SepSCL", "nerr_l0", v).std(ddof=1) / np.sqrt(20)
            for v in FRACTION_GRID
        )
        spread = max(sep_means) - min(sep_means)
        flat_ok = spread <= 2.0 * sep_stderr
        _report(
            "C7",
            monotone_ok and flat_ok and elapsed < 900.0,
            f"greedy NErr(L0)/NErr(LU) nonincreasing within 1 paired stderr "
            f"per step: {monotone_ok}; SepSCL L0 spread {spread:.2e} <= "
            f"2*stderr {2 * sep_stderr:.2e}: {flat_ok}; {elapsed:.0f}s < 900s",
        )

    def test_c8_upper_error_exceeds_node_error(self, noise_sweep):
        """Triangle-level error dominates edge-level error for GreedySCL."""
        rows, _ = noise_sweep
        greedy_l0 = [_grid_mean(rows, "GreedySCL", "nerr_l0", v) for v in NOISE_GRID]
        greedy_lu = [_grid_mean(rows, "GreedySCL", "nerr_lu", v) for v in NOISE_GRID]
        ok = all(u > l for u, l in zip(greedy_lu, greedy_l0))
        pairs = ", ".join(f"{u:.3f}>{l:.3f}" for u, l in zip(greedy_lu, greedy_l0))
        _report("C8", ok, f"mean NErr(LU) > NErr(L0) at every noise level: {pairs}")
