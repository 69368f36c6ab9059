import random

import numpy as np
import pytest

from instances import (
    FOUR_NODE_LINKS,
    access_chain,
    access_two_ues,
    chain,
    criterion2_instances,
    four_node_graph,
    random_instance,
    relay_triangle,
    star,
)
from mmsched.errors import Disconnected, UnreachableUe
from mmsched.expansion import expand_nodes
from mmsched.lp import ColumnKind, dual_variables
from mmsched.model import Network, net_flow, throughput_of_schedule, verify_schedule
from mmsched.mtfs import (
    MAXMIN,
    THROUGHPUT,
    column_of_matching,
    initial_schedule,
    solve,
    solve_access,
    solve_maxmin,
    solve_mtfs,
    termination_gap,
)

IDX = {name: k for k, name in enumerate(FOUR_NODE_LINKS)}
ALL_ROWS = [0, 1, 2, 3]


class TestColumns:
    @pytest.mark.parametrize(
        "names, expected",
        [
            (("alpha", "epsilon"), [-8, 8, -4, 4]),
            (("delta",), [0, 2, -2, 0]),
            (("alpha",), [-8, 8, 0, 0]),
            (("theta",), [-6, 0, 6, 0]),
            (("gamma",), [0, -3, 3, 0]),
            (("epsilon",), [0, 0, -4, 4]),
            ((), [0, 0, 0, 0]),
        ],
    )
    def test_four_node_graph(self, names, expected):
        col = column_of_matching(four_node_graph(), [IDX[n] for n in names], ALL_ROWS)
        assert col.tolist() == expected

    def test_super_node_aggregation(self):
        net = Network.build(2, [(0, 1, 3.0), (0, 2, 5.0)], enb_rf=2, mmbs_rf=2)
        exp = expand_nodes(net)
        # eNB copy 0 -> m1 copy 0 and eNB copy 1 -> m1 copy 1 both feed super node 1
        m = [k for k, l in enumerate(exp.links) if l.origin == 0 and exp.nodes[l.src].id == exp.nodes[l.dst].id - 2]
        assert len(m) == 2
        assert column_of_matching(exp, m, [1, 2]).tolist() == [6.0, 0.0]


class TestInitial:
    def test_star(self):
        s = initial_schedule(star())
        np.testing.assert_allclose(s.x, [2 / 3, 1 / 3, 4 / 3], rtol=1e-12)

    def test_chain(self):
        s = initial_schedule(chain())
        np.testing.assert_allclose(s.x, [2 / 3, 1 / 3, 10 / 3], rtol=1e-12)

    def test_single(self):
        s = initial_schedule(Network.build(1, [(0, 1, 7.5)]))
        np.testing.assert_allclose(s.x, [1.0, 7.5])

    def test_square_basis(self):
        s = initial_schedule(relay_triangle())
        assert s.basis.shape == (3, 3)
        assert s.columns[-1].kind is ColumnKind.THETA

    def test_disconnected(self):
        with pytest.raises(Disconnected):
            initial_schedule(Network.build(2, [(0, 1, 1.0)]))


class TestMaxMin:
    def test_star(self):
        assert solve_maxmin(star()).theta == pytest.approx(4 / 3, abs=1e-12)

    def test_relay_triangle(self):
        assert solve_maxmin(relay_triangle()).theta == pytest.approx(10 / 3, abs=1e-12)

    def test_two_chain_star(self):
        assert solve_maxmin(star(enb_rf=2)).theta == pytest.approx(2.0, abs=1e-12)

    def test_four_node_graph(self):
        # full-enumeration oracle value, 12/7
        assert solve_maxmin(four_node_graph()).theta == pytest.approx(12 / 7, abs=1e-12)

    def test_termination_certificate(self):
        for net in criterion2_instances(40, seed=11):
            res = solve_maxmin(net)
            assert termination_gap(res, MAXMIN) >= -1e-9

    def test_strong_duality(self):
        for net in criterion2_instances(40, seed=12):
            res = solve_maxmin(net)
            p = dual_variables(res.state)
            assert abs(res.state.objective - p @ res.state.rhs) <= 1e-6

    def test_deterministic(self):
        net = random_instance(random.Random(4))
        a, b = solve_maxmin(net), solve_maxmin(net)
        assert a.state.columns == b.state.columns
        assert a.log.pivots == b.log.pivots
        assert a.theta == b.theta


class TestMtfs:
    def test_star(self):
        res = solve(star())
        assert res.network_throughput == pytest.approx(8 / 3, abs=1e-9)
        assert verify_schedule(res.expanded, res.schedule)

    def test_relay_triangle(self):
        res = solve(relay_triangle())
        assert res.network_throughput == pytest.approx(20 / 3, abs=1e-9)
        np.testing.assert_allclose(res.throughput.rates, [10 / 3, 10 / 3], atol=1e-9)

    def test_two_chain_star(self):
        assert solve(star(enb_rf=2)).network_throughput == pytest.approx(6.0, abs=1e-9)

    def test_four_node_graph(self):
        assert solve(four_node_graph()).network_throughput == pytest.approx(48 / 7, abs=1e-9)

    def test_reuses_maxmin(self):
        net = relay_triangle()
        mm = solve_maxmin(net)
        res = solve_mtfs(net, mm)
        assert res.theta == mm.theta
        assert set(res.logs) == {"maxmin", "mtfs"}
        assert termination_gap(res, THROUGHPUT) >= -1e-9

    def test_schedules_valid(self):
        for net in criterion2_instances(60, seed=13):
            res = solve(net)
            assert verify_schedule(res.expanded, res.schedule).ok
            assert res.schedule.busy_slots <= len(net.mmbs) + 1
            assert res.throughput.min >= res.theta - 1e-6

    def test_capacity_scaling(self):
        rng = random.Random(21)
        for _ in range(15):
            net = random_instance(rng)
            lam = rng.uniform(0.1, 10)
            a, b = solve(net), solve(net.scaled(lam))
            assert b.theta == pytest.approx(lam * a.theta, rel=1e-7)
            assert b.network_throughput == pytest.approx(lam * a.network_throughput, rel=1e-7)

    def test_monotone_in_rf(self):
        rng = random.Random(22)
        for _ in range(15):
            net = random_instance(rng, multi_rf=False)
            by_r = [solve_maxmin(net.with_rf(enb_rf=r)).theta for r in (1, 2, 3)]
            by_rw = [solve_maxmin(net.with_rf(mmbs_rf=r)).theta for r in (1, 2)]
            assert np.all(np.diff(by_r) >= -1e-9)
            assert by_rw[1] >= by_rw[0] - 1e-9


class TestAccess:
    def test_chain(self):
        res = solve_access(access_chain())
        assert res.theta == pytest.approx(5.0, abs=1e-12)

    def test_direct_link_preferred(self):
        net = Network.build(1, [(0, 1, 10.0), (0, 2, 10.0), (1, 2, 10.0)], n_ues=1)
        res = solve_access(net)
        assert res.theta == pytest.approx(10.0, abs=1e-9)
        direct = next(k for k, l in enumerate(res.expanded.links) if (l.src, l.dst) == (0, 2))
        assert [s.links for s in res.schedule.slots] == [(direct,)]

    def test_two_ues_share_relay(self):
        # the relay's single chain serves eNB->m1, m1->u1 and m1->u2 in turn
        res = solve_access(access_two_ues())
        assert res.theta == pytest.approx(2.5, abs=1e-12)
        assert res.network_throughput == pytest.approx(5.0, abs=1e-9)

    def test_relays_balance(self):
        res = solve_access(access_two_ues())
        assert abs(net_flow(res.expanded, res.schedule)[1]) <= 1e-6

    def test_unreachable_ue(self):
        with pytest.raises(UnreachableUe):
            solve_access(Network.build(1, [(0, 1, 10.0)], n_ues=1))

    def test_requires_ues(self):
        with pytest.raises(ValueError):
            solve_access(star())

    def test_throughput_evaluates(self):
        res = solve_access(access_chain())
        h = throughput_of_schedule(res.expanded, res.schedule)
        assert h.nodes == (2,)
