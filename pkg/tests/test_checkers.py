from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finitop.checkers import (
    Resolution,
    Status,
    check_btw,
    check_circ,
    check_conn,
    check_cpct,
    check_lc,
    check_ndegen,
    check_ord,
    classify_arc,
    classify_circle,
    replay,
)
from finitop.presentation import Presentation, SparsePoint, build_net
from finitop.spaces import clusters, dyadic_interval, dyadic_order, rational_circle

F = Fraction
COARSE = Resolution(eps_grid=[F(1, 4), F(1, 8)], delta_grid=[F(1, 4), F(1, 8)], n_points=6)
# every delta keeps a grid eps strictly below it, and eps stays above the 1/16 line step
LINE = Resolution(eps_grid=[F(1, 4), F(1, 8)], delta_grid=[F(1, 4)], n_points=6)


def line_net(values):
    return build_net(Presentation([SparsePoint({0: v}) for v in values]), len(values))


def fine_line(step_den=16):
    return line_net([F(k, step_den) for k in range(step_den + 1)])


def comb(teeth=8, depth=4):
    """Spine [0,1] x {0} plus vertical teeth of height 1 at x = 2^-k."""
    pts = [SparsePoint.plane(t, 0) for t in dyadic_order(depth + 2)]
    seen = set(pts)
    for k in range(teeth):
        x = F(1, 2**k)
        for y in dyadic_order(depth)[1:]:
            p = SparsePoint.plane(x, y)
            if p not in seen:
                seen.add(p)
                pts.append(p)
    # the limit of the teeth goes first so it is sampled as a ball centre
    pts.insert(0, SparsePoint.plane(0, F(1, 2)))
    return build_net(Presentation(pts), len(pts))


def assert_replays(net, verdict):
    assert replay(net, verdict) is verdict.status


class TestResolution:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            Resolution(eps_grid=[F(1, 4), F(1, 2)])
        with pytest.raises(ValueError):
            Resolution(eps_grid=[F(1, 2), 0])
        with pytest.raises(ValueError):
            Resolution(eps_grid=[])
        with pytest.raises(ValueError):
            Resolution(max_path_len=0)

    def test_radius_candidates_include_half(self):
        res = Resolution(eps_grid=[F(1, 2), F(1, 4)], delta_grid=[F(1, 2)])
        assert res.radii_below(F(1, 2)) == [F(1, 4)]
        assert res.eps_below(F(1, 2)) == [F(1, 4)]


class TestNdegen:
    def test_examples(self):
        one = line_net([F(0)])
        assert check_ndegen(one).status is Status.FAILS
        two = check_ndegen(line_net([F(0), F(1)]))
        assert two.holds and two.witness["pair"] == [0, 1]

    def test_distance_zero_net_fails(self):
        net = line_net([F(0), F(1)]).subnet([0, 0, 0])
        v = check_ndegen(net)
        assert v.status is Status.FAILS
        assert_replays(net, v)


class TestCpct:
    def test_large_eps_single_centre(self):
        net = build_net(dyadic_interval(4), 17)
        v = check_cpct(net, Resolution(eps_grid=[F(1)]))
        assert v.witness["covers"][0]["centers"] == [0]

    def test_dyadic_cover_bound(self):
        net = build_net(dyadic_interval(6), 65)
        v = check_cpct(net, Resolution(eps_grid=[F(1, 8)]))
        assert v.holds and len(v.witness["covers"][0]["centers"]) <= 9
        assert_replays(net, v)

    def test_two_points_need_two_centres(self):
        v = check_cpct(line_net([F(0), F(1)]), Resolution(eps_grid=[F(1, 4)]))
        assert len(v.witness["covers"][0]["centers"]) == 2

    def test_budget_exhaustion_is_inconclusive(self):
        net = build_net(dyadic_interval(6), 65)
        v = check_cpct(net, Resolution(eps_grid=[F(1, 64)], tuple_budget=5))
        assert v.status is Status.INCONCLUSIVE
        assert_replays(net, v)


class TestConn:
    def test_three_point_line(self):
        net = line_net([F(0), F(1, 2), F(1)])
        v = check_conn(net, Resolution(eps_grid=[F(1), F(1, 2)]))
        assert v.holds
        # at eps = 1/8 the 1/2 gaps exceed 2 eps and the finite net splits
        assert check_conn(net, Resolution(eps_grid=[F(1, 8)])).status is Status.FAILS

    def test_two_distant_points(self):
        net = line_net([F(0), F(10)])
        v = check_conn(net, Resolution(eps_grid=[F(1)]))
        assert v.status is Status.FAILS
        assert v.witness["U"] == [0] and v.witness["V"] == [1]
        assert_replays(net, v)

    def test_single_point(self):
        assert check_conn(line_net([F(0)]), COARSE).holds

    def test_exhaustive_bipartitions_agree(self, rng):
        # brute force over all bipartitions on small nets
        from itertools import product

        for _ in range(30):
            vals = sorted({F(rng.randint(0, 12), 4) for _ in range(rng.randint(2, 7))})
            net = line_net(vals)
            eps = F(rng.randint(1, 4), 4)
            closed, open2 = net.within(eps, strict=False), net.within(2 * eps)
            split = False
            for bits in product([0, 1], repeat=net.n):
                u = [i for i in range(net.n) if bits[i]]
                v = [i for i in range(net.n) if not bits[i]]
                if u and v and not (open2[u].any(axis=0) & open2[v].any(axis=0)).any():
                    split = True
                    break
            got = check_conn(net, Resolution(eps_grid=[eps]))
            assert (got.status is Status.FAILS) == split


class TestBtw:
    def test_line_middle_is_between(self):
        net = fine_line()
        v = check_btw(net, 0, 8, 16, LINE)
        assert v.holds
        assert_replays(net, v)

    def test_shortcut_avoids_middle(self):
        # x=(0,0), y=(1/2,0), z=(1,0) plus an arc over the top
        pts = [SparsePoint.plane(0, 0), SparsePoint.plane(F(1, 2), 0), SparsePoint.plane(1, 0)]
        pts += [SparsePoint.plane(F(k, 16), 1) for k in range(17)]
        pts += [SparsePoint.plane(0, F(k, 16)) for k in range(1, 16)] + [SparsePoint.plane(1, F(k, 16)) for k in range(1, 16)]
        net = build_net(Presentation(pts), len(pts))
        v = check_btw(net, 0, 1, 2, COARSE)
        assert v.status is Status.FAILS
        assert v.witness["avoiding"][0]["path"][0] == 0
        assert_replays(net, v)

    def test_distinctness(self):
        with pytest.raises(ValueError):
            check_btw(fine_line(), 0, 3, 0, COARSE)

    def test_symmetry(self):
        net = fine_line()
        for x, y, z in [(0, 8, 16), (8, 0, 16), (3, 9, 12)]:
            assert check_btw(net, x, y, z, LINE).status is check_btw(net, z, y, x, LINE).status

    def test_path_bound_gives_inconclusive(self):
        net = fine_line(32)
        res = Resolution(eps_grid=[F(1, 4), F(1, 8)], delta_grid=[F(1, 4)], max_path_len=2)
        assert check_btw(net, 8, 16, 0, res).status is Status.INCONCLUSIVE

    def test_at_most_one_arrangement_on_a_line(self, rng):
        net = build_net(dyadic_interval(6), 65)
        res = Resolution(eps_grid=[F(1, 16), F(1, 32)], delta_grid=[F(1, 8), F(1, 16)])
        for _ in range(10):
            a, b, c = rng.sample(range(8), 3)
            holds = [check_btw(net, *t, res).holds for t in [(a, b, c), (b, a, c), (a, c, b)]]
            assert sum(holds) == 1


class TestOrd:
    def test_two_points_vacuous(self):
        assert check_ord(line_net([F(0), F(1)]), COARSE).holds

    def test_fine_line(self):
        net = build_net(dyadic_interval(5), 33)
        v = check_ord(net, LINE)
        assert v.holds
        assert_replays(net, v)

    def test_circle_fails(self):
        net = build_net(rational_circle(64), 64)
        v = check_ord(net, COARSE)
        assert v.status is Status.FAILS
        assert len(v.witness["triple"]) == 3
        assert_replays(net, v)

    def test_tuple_budget_caps(self):
        net = build_net(dyadic_interval(5), 33)
        assert check_ord(net, Resolution(n_points=8, tuple_budget=3)).status is Status.INCONCLUSIVE


class TestLc:
    def test_fine_line(self):
        net = build_net(dyadic_interval(6), 65)
        v = check_lc(net, COARSE)
        assert v.holds
        assert_replays(net, v)

    def test_comb_fails_at_accumulation(self):
        net = comb()
        res = Resolution(eps_grid=[F(1, 4), F(1, 8), F(1, 32)], delta_grid=[F(1, 4)], n_points=1)
        v = check_lc(net, res)
        assert v.status is Status.FAILS
        assert v.witness["center"] == 0
        assert_replays(net, v)

    def test_single_point(self):
        assert check_lc(line_net([F(0)]), COARSE).holds

    def test_needs_two_eps(self):
        assert check_lc(fine_line(), Resolution(eps_grid=[F(1, 4)])).status is Status.INCONCLUSIVE


class TestCirc:
    def test_circle_holds(self):
        net = build_net(rational_circle(64), 64)
        v = check_circ(net, COARSE)
        assert v.holds
        assert_replays(net, v)

    def test_line_fails(self):
        net = build_net(dyadic_interval(5), 33)
        v = check_circ(net, COARSE)
        assert v.status is Status.FAILS
        assert len(v.witness["tuple"]) == 4
        assert_replays(net, v)

    def test_fewer_than_four_points(self):
        assert check_circ(line_net([F(0), F(1), F(2)]), COARSE).holds


class TestComposites:
    def test_arc(self):
        net = build_net(dyadic_interval(6), 65)
        assert all(v.holds for v in classify_arc(net, LINE).values())

    def test_circle_fails_ord_and_passes_circle(self):
        net = build_net(rational_circle(64), 64)
        assert classify_arc(net, COARSE)["ord"].status is Status.FAILS
        assert all(v.holds for v in classify_circle(net, COARSE).values())

    def test_two_components(self):
        net = build_net(clusters([0, 5], 1, 4), 34)
        assert classify_arc(net, COARSE)["conn"].status is Status.FAILS

    def test_line_and_point_for_circle(self):
        assert classify_circle(build_net(dyadic_interval(5), 33), COARSE)["circ"].status is Status.FAILS
        assert classify_circle(line_net([F(0)]), COARSE)["ndegen"].status is Status.FAILS


class TestInvariance:
    @settings(max_examples=8)
    @given(st.permutations(list(range(17))))
    def test_permutation(self, order):
        pres = dyadic_interval(4)
        base = build_net(pres, 17)
        moved = build_net(pres.permuted(order), 17)
        res = Resolution(eps_grid=[F(1, 4), F(1, 8)], delta_grid=[F(1, 4)], n_points=17)
        for check in (check_conn, check_lc, check_cpct):
            if check is check_cpct:
                continue  # cover sizes depend on the greedy order, only the status is invariant
            assert check(base, res).status is check(moved, res).status
        assert check_cpct(base, res).status is check_cpct(moved, res).status

    def test_scaling(self):
        pres = rational_circle(32)
        res = COARSE
        for factor in (F(3), F(1, 5)):
            scaled = build_net(pres.scaled(factor), 32)
            base = build_net(pres, 32)
            for check in (check_conn, check_lc, check_ord, check_circ):
                assert check(base, res).status is check(scaled, res.scaled(factor)).status

    def test_refining_keeps_counterexample(self):
        net = build_net(rational_circle(64), 64)
        v = check_ord(net, COARSE)
        assert v.status is Status.FAILS
        # extra grid values: the recorded counterexample still replays
        finer = Resolution(eps_grid=[F(1, 4), F(3, 16), F(1, 8)], delta_grid=[F(1, 4), F(3, 16), F(1, 8)], n_points=6)
        assert check_ord(net, finer).status is Status.FAILS
        assert replay(net, v) is Status.FAILS
