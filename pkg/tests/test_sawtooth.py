import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from finitop.checkers import Resolution, Status, check_lc, classify_arc
from finitop.presentation import SparsePoint, build_net
from finitop.sawtooth import WTable, default_params, gen_sawtooth, sawtooth_f, spike_index

F = Fraction
P = default_params()

tables = st.dictionaries(
    st.integers(0, 6), st.frozensets(st.integers(0, 12), max_size=6), max_size=4
).map(WTable)


def random_table(rng: random.Random) -> WTable:
    return WTable({n: {rng.randrange(20) for _ in range(rng.randint(0, 8))} for n in range(7) if rng.random() < 0.7})


class TestWTable:
    def test_horizon_and_counts(self):
        w = WTable({1: {0, 3, 5}})
        assert w.stage_horizon == 6
        assert w.size(1) == 3 and w.size(2) == 0
        assert w.below(1, 4) == 2
        assert w.entering(4) == [1] and w.entering(5) == []

    def test_infinite_column(self):
        w = WTable(infinite=frozenset({2}))
        assert w.size(2) is None and w.below(2, 7) == 7 and w.entering(3) == [2]

    def test_with_element_and_validation(self):
        assert WTable().with_element(3, 4).column(3) == {4}
        with pytest.raises(ValueError):
            WTable({1: {-1}})


class TestParams:
    def test_first_values(self):
        assert (P.a(0), P.b(0), P.a(1)) == (1, F(1, 2), F(1, 4))
        assert P.l(2, 0) == P.a(3) and P.r(2, 0) == P.a(2)

    def test_ordering_chain(self):
        for i in range(9):
            assert P.a(i + 1) < P.b(i) < P.a(i)
            for j in range(9):
                assert P.l(i, j) < P.l(i, j + 1) < P.b(i) < P.r(i, j + 1) < P.r(i, j)

    def test_spike_index(self):
        assert spike_index(F(1), P) == 0 and spike_index(F(1, 4), P) == 1 and spike_index(F(1, 5), P) == 1


class TestF:
    def test_domain(self):
        with pytest.raises(ValueError):
            sawtooth_f(F(3, 2), WTable())

    @given(st.fractions(min_value=0, max_value=1, max_denominator=512))
    def test_empty_table_is_identity(self, t):
        assert sawtooth_f(t, WTable()) == t

    @given(tables, st.fractions(min_value=0, max_value=1, max_denominator=256))
    def test_bounded_by_t(self, w, t):
        assert 0 <= sawtooth_f(t, w) <= t

    @given(tables)
    def test_anchors(self, w):
        for i in range(7):
            assert sawtooth_f(P.a(i), w) == P.a(i)
            assert sawtooth_f(P.b(i), w) == P.b(i) / 2 ** w.size(i)

    @given(tables, st.integers(0, 6), st.integers(0, 12))
    def test_monotone_and_local_in_w(self, w, i, m):
        bigger = w.with_element(i, m)
        for k in range(1, 65):
            t = F(k, 64)
            before, after = sawtooth_f(t, w), sawtooth_f(t, bigger)
            if P.a(i + 1) <= t <= P.a(i):
                assert after <= before
            else:
                assert after == before

    def test_case_boundaries_agree(self):
        # evaluating at every subdivision point from both neighbouring cells
        w = WTable({0: {1, 4}, 1: {0, 2, 3}, 2: {5}})
        for i in range(8):
            for j in range(8):
                for x in (P.l(i, j), P.r(i, j)):
                    left = sawtooth_f(x - F(1, 10**12), w)
                    right = sawtooth_f(x + F(1, 10**12), w) if x < 1 else sawtooth_f(x, w)
                    assert abs(left - sawtooth_f(x, w)) < F(1, 10**9)
                    assert abs(right - sawtooth_f(x, w)) < F(1, 10**9)

    def test_close_to_tip_with_large_column(self):
        w = WTable({1: set(range(10))})
        b = P.b(1)
        near = P.l(1, 12)  # beyond every element of the column
        assert sawtooth_f(near, w) == near / 2**10
        assert sawtooth_f(near, w) <= b / 2**10


class TestGenSawtooth:
    def test_depth_one(self):
        pres = gen_sawtooth(WTable(), 1)
        # (1/2, f(1/2)) is skipped because 1/2 is the spike position b_0
        assert pres.points == (
            SparsePoint.plane(0, 0), SparsePoint.plane(1, 0), SparsePoint.plane(F(1, 2), 0), SparsePoint.plane(1, 1),
        )

    def test_depth_validation(self):
        with pytest.raises(ValueError):
            gen_sawtooth(WTable(), 0)

    def test_empty_table_graph_is_diagonal(self):
        pres = gen_sawtooth(WTable(), 6)
        graph = [p for p in pres.points[65:]]
        assert graph and all(p[1] == p[0] for p in graph)

    def test_no_spike_positions_on_graph(self):
        pres = gen_sawtooth(WTable({1: {0, 1}}), 8)
        xs = {p[0] for p in pres.points[257:]}
        assert not any(P.b(i) in xs for i in range(5))

    def test_finite_table_is_an_arc_at_moderate_resolution(self):
        pres = gen_sawtooth(WTable({0: {0}, 1: {0, 1}}), 6)
        net = build_net(pres, len(pres))
        res = Resolution(eps_grid=[F(1, 4), F(1, 8)], delta_grid=[F(1, 4)], n_points=5)
        assert not any(v.status is Status.FAILS for v in classify_arc(net, res).values())

    def test_large_column_pinches(self):
        # The spike at b_0 = 1/2 bottoms out at 2^-13 once the column has 12
        # elements.  Sampled at step 2^-15 around the tip, base and graph
        # merge at eps = 2^-12 and separate at eps = 2^-14.
        w = WTable({0: set(range(12))})
        b = P.b(0)
        assert sawtooth_f(b, w) == F(1, 2**13)
        pts = [SparsePoint.plane(b, 0)]
        for k in range(1, 65):
            for x in (b - F(k, 2**15), b + F(k, 2**15)):
                pts += [SparsePoint.plane(x, 0), SparsePoint.plane(x, sawtooth_f(x, w))]
        from finitop.presentation import Presentation

        net = build_net(Presentation(pts), len(pts))
        res = Resolution(eps_grid=[F(1, 2**12), F(1, 2**14)], delta_grid=[F(1, 2**11)], n_points=1)
        v = check_lc(net, res)
        assert v.status is Status.FAILS
        assert v.witness["splits"][0]["finer"] == F(1, 2**14)
