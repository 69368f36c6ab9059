import random
from collections import Counter

import pytest

from instances import random_instance, relay_triangle, star
from mmsched.errors import AlreadyExpanded, RfLimitViolated
from mmsched.expansion import collapse_schedule, expand_enb, expand_nodes, super_members
from mmsched.matching import enumerate_matchings
from mmsched.model import Network, Schedule, Slot
from mmsched.mtfs import solve_maxmin


def _signature(net):
    return [(l.src, l.dst, l.capacity) for l in net.links], [(v.role, v.rf_chains) for v in net.nodes]


class TestExpandEnb:
    def test_identity_for_one_chain(self):
        net = star()
        exp = expand_enb(net)
        assert exp.expanded
        assert _signature(exp) == _signature(net)

    def test_two_chains(self):
        exp = expand_enb(star(enb_rf=2))
        assert exp.n_nodes == 4
        assert [(l.src, l.dst) for l in exp.links] == [(0, 2), (1, 2), (0, 3), (1, 3)]
        assert all(v.rf_chains == 1 for v in exp.nodes)

    def test_three_chains_degree_five(self):
        net = Network.build(5, [(0, k, float(k)) for k in range(1, 6)], enb_rf=3)
        exp = expand_enb(net)
        enb_links = [l for l in exp.links if exp.super_of(l.src) == 0]
        assert len(enb_links) == 15
        assert all(l.capacity == net.links[l.origin].capacity for l in enb_links)

    def test_already_expanded(self):
        with pytest.raises(AlreadyExpanded):
            expand_enb(expand_enb(star()))


class TestExpandNodes:
    def test_two_by_three(self):
        nodes = Network.build(1, [(0, 1, 7.0)], enb_rf=2, mmbs_rf=3)
        exp = expand_nodes(nodes)
        assert exp.n_links == 6
        assert {l.capacity for l in exp.links} == {7.0}
        assert super_members(exp) == [[0, 1], [2, 3, 4]]

    def test_identity(self):
        net = relay_triangle()
        assert _signature(expand_nodes(net)) == _signature(net)

    def test_triangle_all_two(self):
        exp = expand_nodes(relay_triangle(enb_rf=2, mmbs_rf=2))
        assert exp.n_nodes == 6
        assert Counter(l.origin for l in exp.links) == {0: 4, 1: 4, 2: 4}

    def test_already_expanded(self):
        with pytest.raises(AlreadyExpanded):
            expand_nodes(expand_nodes(star()))

    def test_matchings_respect_super_node_rf(self):
        rng = random.Random(5)
        for _ in range(30):
            net = random_instance(rng, max_nodes=5)
            exp = expand_nodes(net)
            if exp.n_nodes > 10:
                continue
            for m in enumerate_matchings(exp):
                use = Counter()
                for k in m:
                    e = exp.links[k]
                    use[exp.super_of(e.src)] += 1
                    use[exp.super_of(e.dst)] += 1
                assert all(use[v] <= net.nodes[v].rf_chains for v in use)

    def test_unit_expansion_preserves_theta(self):
        rng = random.Random(9)
        for _ in range(20):
            net = random_instance(rng, max_nodes=6, multi_rf=False).with_rf(enb_rf=1)
            exp = expand_nodes(net)
            # rebuild the expanded graph as a plain network and solve it afresh
            plain = Network.build(
                exp.n_nodes - 1, [(l.src, l.dst, l.capacity) for l in exp.links], enb_rf=1
            )
            assert solve_maxmin(plain).theta == pytest.approx(solve_maxmin(net).theta, abs=1e-9)


class TestCollapse:
    def test_two_chain_slot(self):
        exp = expand_enb(star(enb_rf=2))
        sched = Schedule((Slot((0, 3), 1.0),))  # eNB_1 -> m1, eNB_2 -> m2
        collapsed, t = collapse_schedule(sched, exp)
        assert collapsed.slots[0].links == (0, 1)
        assert t.times.tolist() == [1.0, 1.0]

    def test_rf_limit(self):
        net = Network.build(3, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)], enb_rf=2)
        exp = expand_enb(net, rf=3)  # one copy more than the super node has chains
        with pytest.raises(RfLimitViolated) as err:
            collapse_schedule(Schedule((Slot((0, 4, 8), 1.0),)), exp)
        assert err.value.node == 0

    def test_identity(self):
        net = relay_triangle()
        exp = expand_enb(net)
        sched = Schedule.from_pairs([([0], 2 / 3), ([1], 1 / 3)])
        collapsed, _ = collapse_schedule(sched, exp)
        assert collapsed == sched
