"""Theorem-level acceptance checks A1-A7.

Each test carries ``@pytest.mark.acceptance("A<n>")``; conftest prints one
PASS/FAIL line per criterion at the end of the run.
"""
import itertools
import math
import time

import numpy as np
import pytest

from minkembed import cli, generators, metric_space
from minkembed.dimension import (covering_number, estimate_minkowski,
                                 estimate_quasidoubling_constant, packing_lower_bound)
from minkembed.embedding import (bump_values, candidate_vectors, dense_subsets,
                                 select_vector)
from minkembed.nets import build_hierarchy
from minkembed.params import DEFAULT_BUDGET_CAP, practical_params, tau_conditions
from minkembed.verification import distortion_report, lipschitz_norm

from conftest import strict_fixture

SLACK = 1e-9
pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")


def _a1_fixture():
    space, q, p, emb = strict_fixture(8)
    if p.N_colors > DEFAULT_BUDGET_CAP:  # documented fallback
        space, q, p, emb = strict_fixture(4)
    return space, q, p, emb


# -- A1 ---------------------------------------------------------------------

@pytest.mark.acceptance("A1")
class TestA1TheoremCheck:
    def test_bounds_hold_pairwise(self, capsys):
        t0 = time.perf_counter()
        space, q, p, emb = _a1_fixture()
        elapsed = time.perf_counter() - t0
        assert space.diameter == 0.5
        assert p.mode == "strict" and p.n == p.n0 + 1
        assert emb.dimension == 2 * p.N_colors * p.M

        eps, tau = p.epsilon, p.tau
        upper = 5.0 * math.sqrt(p.N_colors) * tau ** (-2.0 * (1.0 - eps))
        lower = tau ** 5 / 8.0
        thr = 4.0 * tau ** (2 * p.n)
        X = emb.coords
        worst_up, worst_lo = 0.0, math.inf
        for i, j in itertools.combinations(range(len(space)), 2):
            d = space.dist[i, j]
            ratio = np.linalg.norm(X[i] - X[j]) / d ** eps
            worst_up = max(worst_up, ratio)
            assert ratio <= upper * (1 + SLACK)
            if d >= thr:
                worst_lo = min(worst_lo, ratio)
                assert ratio >= lower * (1 - SLACK)
        rep = distortion_report(space, emb)
        assert rep.pass_
        assert rep.worst_upper == pytest.approx(worst_up, rel=1e-12)
        assert rep.worst_lower == pytest.approx(worst_lo, rel=1e-12)
        assert elapsed < 300
        with capsys.disabled():
            print(f"\n  A1: C={q.C:.4f} tau={tau} N_n={p.N_colors} M={p.M} "
                  f"ratios in [{worst_lo:.3g}, {worst_up:.3g}] vs [{lower:.3g}, {upper:.4g}] "
                  f"({elapsed:.2f}s)")

    def test_tau_is_largest_admissible_with_tau3_binding(self):
        _, q, p, _ = _a1_fixture()
        assert p.tau == 0.015
        assert all(tau_conditions(p.tau, p.epsilon, p.theta, p.delta, q.C).values())
        above = tau_conditions(0.016, p.epsilon, p.theta, p.delta, q.C)
        assert not above["tau3"]


# -- A2 ---------------------------------------------------------------------

def _replay_selections(space, p, emb):
    """Yield (F_E1, G_E2, scale, info) for every selection in a built embedding."""
    for cmap in emb.maps:
        lv = cmap._levels
        step = 0
        for k in p.levels:
            net = emb.hierarchy.net(k)
            F_prev = cmap.partial(k - 1)
            for count, t in enumerate(cmap.selection[k]):
                j = net.members[t]
                E1, E2 = dense_subsets(space, j, lv.r[k], p.tau)
                G = cmap.partial_G(k, count, E2) if len(E2) else np.zeros((0, p.M))
                yield F_prev[E1], G, lv.r_eps(k), cmap.vectors[k][t], cmap.log[step]
                step += 1


@pytest.mark.acceptance("A2")
class TestA2Counting:
    @pytest.mark.parametrize("size", [4, 8])
    def test_lattice_exceeds_pairs_before_every_selection(self, size):
        _, _, p, emb = strict_fixture(size)
        assert emb.metadata["selections"] > 0
        for cmap in emb.maps:
            for info in cmap.log:
                assert info["lattice"] > info["E1"] * info["E2"]

    def test_kill_at_most_one_brute_force(self, four_point):
        space, _, p, emb = four_point
        tau = p.tau
        checked = 0
        for F_E1, G_E2, scale, chosen, info in _replay_selections(space, p, emb):
            pairs = len(F_E1) * len(G_E2)
            V = candidate_vectors(p.M, tau, pairs)
            surrogate = 3.0 * tau ** 3 * scale
            for a in range(len(F_E1)):
                for b in range(len(G_E2)):
                    kills = sum(np.linalg.norm(F_E1[a] + scale * v - G_E2[b]) < surrogate
                                for v in V)
                    assert kills <= 1
                    checked += 1
            v_brute, _ = select_vector(F_E1, G_E2, scale, tau ** 3 * scale, tau, p.M,
                                       brute=True)
            np.testing.assert_array_equal(v_brute, chosen)
        assert checked > 0


# -- A3 ---------------------------------------------------------------------

@pytest.mark.acceptance("A3")
class TestA3PartialSums:
    def test_tail_and_lipschitz(self, a1):
        space, _, p, emb = a1
        eps, tau = p.epsilon, p.tau
        checked = 0
        for cmap in emb.maps:
            F = cmap.evaluate()
            for k in p.levels:
                if k >= p.n:
                    continue
                Fk = cmap.partial(k)
                tail = np.max(np.linalg.norm(F - Fk, axis=1))
                assert tail <= 2 * tau ** 2 * p.radius(k + 1) ** eps * (1 + SLACK)
                lip = lipschitz_norm(Fk, space, 1.0)
                assert lip <= p.radius(k) ** (eps - 1) * (1 + SLACK)
                checked += 1
        assert checked == len(emb.maps) * (p.n - p.n0)


# -- A4 ---------------------------------------------------------------------

THETA, DELTA = 0.5, 1.2


def _check_nets(space, tau):
    p = practical_params(0.75, THETA, DELTA, 1.0, tau, space.diameter, None, 0)
    p = practical_params(0.75, THETA, DELTA, 1.0, tau, space.diameter, p.n0 + 3, 0)
    radii = {k: (p.radius(k) / 3.0) ** THETA for k in p.levels if p.radius(k) ** THETA < 1}
    q = estimate_quasidoubling_constant(space, THETA, DELTA, list(radii.values()),
                                        [3.0 ** THETA], warn=False)
    assert q.validate()
    h = build_hierarchy(space, p, strict=False)
    D = space.dist
    for k in p.levels:
        net, col = h.levels[k]
        r, sep = p.radius(k), p.radius(k) ** THETA
        mem = np.asarray(net.members)
        sub = D[np.ix_(mem, mem)]
        off = ~np.eye(len(mem), dtype=bool)
        assert np.all(sub[off] >= r)
        assert np.all(D[:, mem].min(axis=1) < r)
        cols = np.asarray(col.colors)
        same = (cols[:, None] == cols[None, :]) & off
        assert np.all(sub[same] > sep)
        if k in radii:
            w = next(w for w in q.witnesses if w["R"] == radii[k])
            counts = (sub <= sep).sum(axis=1)
            assert col.max_color <= counts.max() <= w["cover_size"]
            assert col.max_color <= math.ceil(q.bound(w["R"], w["lambda"]))


@pytest.mark.acceptance("A4")
class TestA4NetsAndColorings:
    def test_gw_trees(self):
        t0 = time.perf_counter()
        for seed in range(100):
            raw = generators.gw_tree(2 + seed % 63, seed)
            if len(raw) < 2:
                continue
            space, _ = metric_space.normalize_diameter(raw)
            for tau in (0.3, 0.45):
                _check_nets(space, tau)
        assert time.perf_counter() - t0 < 120

    @pytest.mark.parametrize("arms", [1, 2, 4, 8, 16, 32])
    def test_star_family(self, arms):
        space, _ = metric_space.normalize_diameter(generators.star(arms))
        for tau in (0.3, 0.45):
            _check_nets(space, tau)


# -- A5 ---------------------------------------------------------------------

DYADIC_2_7 = [2.0 ** -m for m in range(2, 8)]


def _oracle_cover(D, subset, r):
    """Smallest number of centers (any point) whose closed r-balls cover subset."""
    n = D.shape[0]
    for size in range(1, len(subset) + 1):
        for centers in itertools.combinations(range(n), size):
            if np.all(D[np.ix_(list(centers), subset)].min(axis=0) <= r):
                return size
    raise AssertionError("unreachable")


@pytest.mark.acceptance("A5")
class TestA5Estimators:
    def test_interval_minkowski(self):
        est = estimate_minkowski(generators.interval(1024), DYADIC_2_7)
        assert est.value == pytest.approx(1.0, abs=0.05)

    def test_cantor_minkowski(self):
        est = estimate_minkowski(generators.cantor(7), DYADIC_2_7)
        assert est.value == pytest.approx(math.log(2) / math.log(3), abs=0.07)

    def test_single_point_is_zero(self):
        assert estimate_minkowski(generators.interval(1)).value == 0.0

    def test_exact_and_greedy_against_exhaustive_oracle(self):
        rng = np.random.default_rng(7)
        instances = 0
        for n in range(1, 13):
            for _ in range(6):
                pts = rng.random((n, 2))
                D = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
                space = metric_space.validate_space(D)
                for r in (0.1, 0.25, 0.5):
                    for m in range(1, n + 1, max(1, n // 3)):
                        subset = np.sort(rng.choice(n, size=m, replace=False))
                        truth = _oracle_cover(D, subset, r)
                        exact = covering_number(space, subset, r, "exact")
                        greedy = covering_number(space, subset, r, "greedy")
                        assert exact == truth
                        assert greedy >= exact >= packing_lower_bound(space, subset, r)
                        instances += 1
        assert instances > 300


# -- A6 ---------------------------------------------------------------------

def _bump_checks(space, hierarchy, levels, radius):
    D = space.dist
    for k in levels:
        net, col = hierarchy.levels[k]
        r = radius(k)
        phis = {}
        for j in net.members:
            phi = bump_values(space, j, r)
            phis[j] = phi
            assert np.all(phi[D[j] <= r] == 1.0)
            assert np.all(phi[D[j] > 2 * r] == 0.0)
            assert np.all(np.abs(phi[:, None] - phi[None, :]) <= D / r + 1e-12)
        for c in set(col.colors):
            fiber = [net.members[t] for t in col.fiber(c)]
            for a, b in itertools.combinations(fiber, 2):
                assert not np.any((phis[a] > 0) & (phis[b] > 0))


@pytest.mark.acceptance("A6")
class TestA6Bumps:
    def test_a1_fixture(self, a1):
        space, _, p, emb = a1
        _bump_checks(space, emb.hierarchy, p.levels, p.radius)
        assert not any(emb.hierarchy.overlaps.values())

    @pytest.mark.parametrize("seed", range(5))
    def test_gw_tree_fixture(self, seed):
        space, _ = metric_space.normalize_diameter(generators.gw_tree(24, seed))
        p = practical_params(0.75, THETA, DELTA, 1.0, 0.1, space.diameter, 2, 0)
        h = build_hierarchy(space, p, strict=False)
        _bump_checks(space, h, p.levels, p.radius)


# -- A7 ---------------------------------------------------------------------

ARTIFACTS = ("space.json", "dims.json", "params.json", "nets.json",
             "embedding.json", "report.json")


@pytest.mark.acceptance("A7")
class TestA7Determinism:
    def test_pipeline_replay_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        code = cli.run(["pipeline", "--family", "interval", "--size", "8", "--epsilon", "0.75",
                        "--theta", "0.5", "--mode", "strict", "--outdir", str(a), "--csv"])
        assert code == 0
        assert cli.run(["replay", str(a / "manifest-pipeline.json"), "--outdir", str(b)]) == 0
        for name in ARTIFACTS + ("embedding.csv", "report.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_stage_replays_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        steps = [
            ["gen", "--family", "gw_tree", "--size", "12", "--seed", "3"],
            ["params", "--input", str(a / "space.json"), "--mode", "practical",
             "--tau", "0.1", "--colors", "0"],
            ["embed", "--input", str(a / "space.json"), "--params", str(a / "params.json"),
             "--net-order", "farthest"],
            ["verify", "--input", str(a / "space.json"), "--embedding", str(a / "embedding.json")],
        ]
        for argv in steps:
            assert cli.run(argv + ["--outdir", str(a)]) == 0
        for name in ("gen", "params", "embed", "verify"):
            assert cli.run(["replay", str(a / f"manifest-{name}.json"), "--outdir", str(b)]) == 0
        for name in ("space.json", "params.json", "embedding.json", "nets.json", "report.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
