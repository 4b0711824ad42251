import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minkembed import params as P
from minkembed.errors import BadParameters, BudgetOverflow, NoFeasibleTau


class TestSolveTau:
    @pytest.mark.parametrize("eps, expected", [(0.75, 0.015), (0.9, 0.069)])
    def test_examples(self, eps, expected):
        assert P.solve_tau(eps, 0.5, 1.0, 2.0, 0.001) == expected

    def test_binding_constraints(self):
        above = P.tau_conditions(0.016, 0.75, 0.5, 1.0, 2.0)
        assert not above["tau3"] and all(v for k, v in above.items() if k != "tau3")
        above = P.tau_conditions(0.070, 0.9, 0.5, 1.0, 2.0)
        assert not above["tau4"]
        assert 7 * 0.069 < 0.4844

    def test_infeasible_reports_cap(self):
        with pytest.raises(NoFeasibleTau) as ei:
            P.solve_tau(0.51, 0.5, 1.0, 2.0, 0.001)
        cap = ei.value.analytic_cap
        assert cap == pytest.approx(8.0 ** -50, rel=1e-9)
        assert ei.value.diagnostics()["caps"]["tau3"] == cap

    @given(st.floats(0.55, 0.95), st.floats(0.1, 0.9), st.floats(0.2, 3), st.floats(1, 50))
    def test_output_satisfies_all_conditions(self, eps, theta, delta, C):
        try:
            tau = P.solve_tau(eps, theta, delta, C, 0.001)
        except NoFeasibleTau:
            caps = P.tau_caps(eps, theta, delta, C)
            assert min(caps.values()) < 0.01
            return
        assert all(P.tau_conditions(tau, eps, theta, delta, C).values())
        nxt = round(tau + 0.001, 15)
        assert nxt >= 0.5 or not all(P.tau_conditions(nxt, eps, theta, delta, C).values())

    def test_log_base_cancels_in_tau4(self):
        for tau in (0.01, 0.05, 0.069, 0.07):
            a = P.tau_conditions(tau, 0.9, 0.5, 1.0, 2.0)["tau4"]
            b = P.tau_conditions(tau, 0.9, 0.5, 1.0, 2.0, log_base=10)["tau4"]
            assert a == b

    @pytest.mark.parametrize("args", [(0.5, 0.5, 1, 2), (0.75, 1.0, 1, 2),
                                      (0.75, 0.5, 0, 2), (0.75, 0.5, 1, 0.5)])
    def test_ranges(self, args):
        with pytest.raises(BadParameters):
            P.solve_tau(*args)


class TestScales:
    @pytest.mark.parametrize("tau, k, expected", [(0.1, 0, 1.0), (0.1, 2, 1e-4), (0.5, 1, 0.25)])
    def test_examples(self, tau, k, expected):
        assert P.scale_radius(tau, k) == pytest.approx(expected, rel=1e-15)

    @given(st.floats(0.01, 0.49), st.integers(-30, 30))
    def test_step(self, tau, k):
        a, b = P.scale_radius(tau, k + 1), P.scale_radius(tau, k) * tau * tau
        assert a == pytest.approx(b, rel=1e-13)

    def test_underflow_warns(self):
        with pytest.warns(P.UnderflowWarning):
            P.scale_radius(0.01, 200)

    @pytest.mark.parametrize("tau, diam, expected", [(0.1, 0.5, 0), (0.5, 0.2, 1),
                                                     (0.3, 0.999, 0)])
    def test_base_level(self, tau, diam, expected):
        assert P.base_level(tau, diam) == expected

    @given(st.floats(0.01, 0.49), st.floats(1e-6, 0.99))
    def test_base_level_brackets(self, tau, diam):
        k = P.base_level(tau, diam)
        assert P.scale_radius(tau, k) >= diam > P.scale_radius(tau, k + 1)


class TestBudgetAndDimension:
    def test_budget_example(self):
        N, lg = P.color_budget(0.5, 1.0, 2.0, 0.015, 1)
        assert N == 401
        assert lg == pytest.approx(math.log10(6 / 0.015), abs=1e-9)

    def test_budget_n0(self):
        assert P.color_budget(0.5, 1.7, 2.0, 0.015, 0)[0] == math.ceil(3 ** 1.7 * 2)

    def test_budget_overflow(self):
        with pytest.raises(BudgetOverflow) as ei:
            P.color_budget(0.5, 1.0, 2.0, 0.015, 3)
        assert ei.value.log10_value == pytest.approx(math.log10(6 * 0.015 ** -3), abs=1e-9)

    @pytest.mark.parametrize("theta, delta, n, expected", [(0.5, 1, 2, 25), (0.5, 2, 3, 61),
                                                           (0.9, 1, 1, 14)])
    def test_vector_dimension(self, theta, delta, n, expected):
        assert P.vector_dimension(theta, delta, n) == expected

    @given(st.floats(0.05, 0.95), st.floats(0.1, 4), st.integers(0, 20))
    def test_vector_dimension_monotone(self, theta, delta, n):
        M = P.vector_dimension(theta, delta, n)
        assert P.vector_dimension(theta, delta, n + 1) >= M
        assert P.vector_dimension(theta, delta * 1.5, n) >= M


class TestEmbeddingParams:
    def test_strict_deterministic(self):
        a = P.strict_params(0.75, 0.5, 1.2, 1.5, diameter=0.5)
        b = P.strict_params(0.75, 0.5, 1.2, 1.5, diameter=0.5)
        assert a == b
        assert a.n == a.n0 + 1 and a.mode == "strict"
        assert a.N_colors == P.color_budget(0.5, 1.2, 1.5, a.tau, a.n)[0]
        assert a.M == P.vector_dimension(0.5, 1.2, a.n)

    @pytest.mark.parametrize("eps", [0.7, 0.75, 0.8, 0.9])
    def test_M_independent_of_epsilon(self, eps):
        p = P.strict_params(eps, 0.5, 1.0, 2.0, n=1)
        assert p.M == P.vector_dimension(0.5, 1.0, 1)

    def test_levels_and_width(self):
        p = P.practical_params(0.75, 0.5, 1.0, 1.0, 0.2, n=3, N_colors=4, M=5)
        assert list(p.levels) == [0, 1, 2, 3]
        assert p.width == 40 and p.mode == "practical"

    def test_practical_overflow_defers_budget(self):
        p = P.practical_params(0.75, 0.5, 1.0, 2.0, 0.015, n=3)
        assert p.N_colors == 0 and p.budget_log10 > 6

    def test_n_must_exceed_n0(self):
        with pytest.raises(BadParameters):
            P.practical_params(0.75, 0.5, 1.0, 1.0, 0.2, n=0)

    def test_json_roundtrip(self, tmp_path):
        p = P.strict_params(0.75, 0.5, 1.2, 1.3)
        obj = p.to_json()
        assert obj["schema"] == 1
        assert P.EmbeddingParams.from_json(obj) == p
