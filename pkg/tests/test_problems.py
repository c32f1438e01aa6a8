import itertools
import math
import sys
import textwrap

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbopt import Bounds, ConfigError, EvaluationFailure
from sbopt.problems import (
    ATSPInstance,
    ExternalCommand,
    FunctionProblem,
    MaxCut,
    PerturbedTSP,
    Rosenbrock,
    WeightedGraph,
    binarize_wrap,
    cut_weight,
    encoding_bounds,
    external_eval,
    maxcut_bruteforce,
    maxcut_eval,
    maxcut_generate,
    rosenbrock,
    rosenbrock_eval,
    shuffle_wrap,
    tour_length,
    tsp_decode,
    tsp_eval,
)


def box_points(bounds):
    axes = [range(lo, up + 1) for lo, up in zip(bounds.lower, bounds.upper)]
    return [np.array(p) for p in itertools.product(*axes)]


TRIANGLE = WeightedGraph(3, {(0, 1): 1.0, (0, 2): 2.0, (1, 2): 4.0})


class TestRosenbrock:
    @pytest.mark.parametrize("d", [2, 5, 49])
    def test_optimum(self, d):
        assert rosenbrock(np.ones(d, dtype=int)) == 0

    def test_values(self):
        assert rosenbrock([0, 0]) == 1
        assert rosenbrock([-5, 10]) == 22536

    def test_exhaustive_box(self):
        p = Rosenbrock(dim=2)
        vals = {tuple(x): p.noiseless_evaluate(x) for x in box_points(p.bounds)}
        assert min(vals.values()) >= 0
        assert [x for x, v in vals.items() if v == 0] == [(1, 1)]

    def test_noise_level(self, rng):
        vals = np.array([rosenbrock_eval([1, 1, 1], rng) for _ in range(2000)])
        assert abs(vals.mean()) < 1e-7
        assert vals.std() == pytest.approx(1e-6, rel=0.1)

    def test_dimension_guard(self):
        with pytest.raises(ConfigError):
            Rosenbrock(dim=1)

    def test_out_of_bounds(self, rng):
        with pytest.raises(ConfigError):
            Rosenbrock(dim=2).evaluate([11, 0], rng)


class TestMaxCut:
    def test_edgeless(self):
        assert maxcut_generate(10, edge_probability=0.0).n_edges == 0

    def test_complete(self):
        g = maxcut_generate(4, edge_probability=1.0, seed=3)
        assert g.n_edges == 6
        assert all(0 <= w <= 10 for w in g.edges.values())

    def test_edge_count_at_scale(self):
        assert 5000 <= maxcut_generate(150, seed=0).n_edges <= 6200

    def test_graph_is_seed_function(self):
        assert maxcut_generate(20, seed=4) == maxcut_generate(20, seed=4)
        assert maxcut_generate(20, seed=4) != maxcut_generate(20, seed=5)

    def test_triangle(self, rng):
        assert maxcut_eval(TRIANGLE, [0, 1, 1], rng, noise_std=0.0) == -3.0
        best, witness = maxcut_bruteforce(TRIANGLE)
        assert best == 6.0
        assert cut_weight(TRIANGLE, witness) == 6.0

    def test_bruteforce_small_cases(self):
        assert maxcut_bruteforce(WeightedGraph(4, {}))[0] == 0
        assert maxcut_bruteforce(WeightedGraph(2, {(1, 0): 5.0}))[0] == 5.0

    def test_bruteforce_guard(self):
        with pytest.raises(ConfigError):
            maxcut_bruteforce(maxcut_generate(25, seed=0))

    def test_all_zero_cut(self, rng):
        g = maxcut_generate(12, seed=1)
        assert maxcut_eval(g, np.zeros(12, dtype=int), rng, noise_std=0.0) == 0

    def test_non_binary_rejected(self, rng):
        with pytest.raises(ConfigError):
            maxcut_eval(TRIANGLE, [0, 2, 1], rng)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**15 - 1), st.integers(0, 100))
    def test_complement_invariance(self, code, seed):
        g = maxcut_generate(15, seed=seed)
        x = np.array([(code >> i) & 1 for i in range(15)])
        p = MaxCut(g)
        assert p.noiseless_evaluate(x) == p.noiseless_evaluate(1 - x)

    def test_noise_is_standard_normal(self, rng):
        p = MaxCut(TRIANGLE)
        vals = np.array([p.evaluate([0, 1, 1], rng) for _ in range(4000)]) + 3.0
        assert abs(vals.mean()) < 0.06
        assert vals.std() == pytest.approx(1.0, rel=0.05)


class TestTSP:
    def test_decode_traces(self):
        assert tsp_decode([1, 1, 1], 5) == [0, 1, 2, 3, 4]
        assert tsp_decode([4, 3, 2], 5) == [0, 4, 3, 2, 1]

    @pytest.mark.parametrize("k", [3, 4, 5, 6, 7])
    def test_bijection(self, k):
        tours = {tuple(tsp_decode(x, k)) for x in box_points(encoding_bounds(k))}
        assert len(tours) == math.factorial(k - 1)
        assert all(t[0] == 0 and sorted(t) == list(range(k)) for t in tours)

    def test_decode_domain_error(self):
        with pytest.raises(ConfigError):
            tsp_decode([1, 1, 3], 5)

    def test_three_city_length(self, rng):
        m = np.array([[0, 1, 0], [0, 0, 2], [3, 0, 0]], dtype=float)
        inst = ATSPInstance(m)
        assert tour_length(m, tsp_decode([1], 3)) == 6
        assert tsp_eval(inst, [1], rng, noise=False) == 6

    def test_zero_matrix_noise(self, rng):
        inst = ATSPInstance(np.zeros((4, 4)))
        vals = [tsp_eval(inst, [1, 1], rng) for _ in range(500)]
        assert all(1.0 < v < 4.0 for v in vals)

    def test_worst_case_dominates_first_draw(self):
        inst = ATSPInstance(np.zeros((4, 4)))
        for seed in range(1000):
            first = tsp_eval(inst, [2, 1], np.random.default_rng(seed), repetitions=1)
            worst = tsp_eval(inst, [2, 1], np.random.default_rng(seed), repetitions=100)
            assert worst >= first

    def test_problem_bounds(self):
        p = PerturbedTSP(ATSPInstance(np.ones((44, 44))))
        assert p.bounds.dim == 42
        assert p.bounds.upper[0] == 43 and p.bounds.upper[-1] == 2


class TestBinarize:
    def test_dimension(self):
        assert binarize_wrap(Rosenbrock(dim=49)).bounds.dim == 196

    def test_endpoints(self):
        w = binarize_wrap(Rosenbrock(dim=2))
        assert w.decode([0, 0, 0, 0, 1, 1, 1, 1]).tolist() == [-5, 10]

    def test_roundtrip(self, rng):
        w = binarize_wrap(Rosenbrock(dim=10))
        for _ in range(1000):
            x = rng.integers(-5, 11, size=10)
            assert w.decode(w.encode(x)).tolist() == x.tolist()

    def test_non_power_of_two(self):
        with pytest.raises(ConfigError):
            binarize_wrap(Rosenbrock(dim=2, lower=0, upper=4))

    def test_optima_preserved(self):
        inner = Rosenbrock(dim=2)
        w = binarize_wrap(inner)
        vals = {tuple(b): w.noiseless_evaluate(b) for b in box_points(w.bounds)}
        best = min(vals.values())
        wrapped_opt = {tuple(w.decode(b)) for b, v in vals.items() if v == best}
        inner_vals = {tuple(x): inner.noiseless_evaluate(x) for x in box_points(inner.bounds)}
        inner_opt = {x for x, v in inner_vals.items() if v == min(inner_vals.values())}
        assert wrapped_opt == inner_opt
        assert sum(v == best for v in vals.values()) == len(inner_opt)


class TestShuffle:
    def inner(self):
        bounds = Bounds((0, -1, 2), (2, 1, 3))
        return FunctionProblem(lambda x: 100 * x[0] + 10 * x[1] + x[2] ** 2, bounds)

    def test_identity(self, rng):
        p = Rosenbrock(dim=6)
        w = shuffle_wrap(p, permutation=np.arange(6))
        for _ in range(100):
            x = rng.integers(-5, 11, size=6)
            assert w.noiseless_evaluate(x) == p.noiseless_evaluate(x)

    def test_unwound_definition(self, rng):
        inner = self.inner()
        w = shuffle_wrap(inner, seed=11)
        for x in box_points(inner.bounds):
            assert w.noiseless_evaluate(w.from_inner(x)) == inner.noiseless_evaluate(x)

    def test_inverse_composition(self, rng):
        inner = self.inner()
        w = shuffle_wrap(inner, permutation=[2, 0, 1])
        back = shuffle_wrap(w, permutation=np.argsort([2, 0, 1]))
        assert back.bounds == inner.bounds
        for x in box_points(inner.bounds):
            assert back.noiseless_evaluate(x) == inner.noiseless_evaluate(x)

    def test_multiset_preserved(self):
        inner = self.inner()
        w = shuffle_wrap(inner, seed=2)
        before = sorted(inner.noiseless_evaluate(x) for x in box_points(inner.bounds))
        after = sorted(w.noiseless_evaluate(x) for x in box_points(w.bounds))
        assert before == after

    def test_bad_permutation(self):
        with pytest.raises(ConfigError):
            shuffle_wrap(self.inner(), permutation=[0, 0, 1])


@pytest.fixture
def stub(tmp_path):
    def make(body):
        path = tmp_path / "stub.py"
        path.write_text(textwrap.dedent(body))
        return f"{sys.executable} {path} {{x}}"

    return make


class TestExternal:
    def test_constant(self, stub):
        value, seconds = external_eval(stub('print("warming up")\nprint("42.0")\n'), [0, 0])
        assert value == 42.0
        assert seconds > 0

    def test_sum(self, stub):
        cmd = stub("import sys\nprint(float(sum(map(int, sys.argv[1:]))))\n")
        assert external_eval(cmd, [1, 2, 3])[0] == 6.0
        p = ExternalCommand(cmd, bounds=Bounds.uniform(3, 0, 7))
        assert p.evaluate([1, 2, 3]) == 6.0
        assert p.last_eval_time > 0

    def test_nonzero_exit(self, stub):
        with pytest.raises(EvaluationFailure) as info:
            external_eval(stub('print("boom")\nraise SystemExit(3)\n'), [1])
        assert "boom" in info.value.output

    def test_timeout(self, stub):
        with pytest.raises(EvaluationFailure):
            external_eval(stub("import time\ntime.sleep(5)\n"), [1], timeout=0.5)

    def test_unparseable(self, stub):
        with pytest.raises(EvaluationFailure):
            external_eval(stub('print("not a number")\n'), [1])

    def test_template_needs_placeholder(self):
        with pytest.raises(ConfigError):
            ExternalCommand("echo 1")

    def test_default_bounds(self):
        assert ExternalCommand("echo {x}").bounds == Bounds.uniform(49, 0, 7)
