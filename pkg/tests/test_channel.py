import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmsched.channel import (
    ChannelParams,
    ChannelState,
    GridScenario,
    generate_grid,
    grid_positions,
    link_capacity,
    load_config,
    path_loss,
    snr_db,
    state_probabilities,
)
from mmsched.errors import NonPositiveDistance
from mmsched.model import NodeRole, check_connectivity

LOS, NLOS = ChannelState.LOS, ChannelState.NLOS


class TestPathLoss:
    def test_los_100m(self):
        assert path_loss(100, LOS) == pytest.approx(101.4, abs=1e-12)

    def test_nlos_100m(self):
        assert path_loss(100, NLOS) == pytest.approx(130.4, abs=1e-12)

    def test_los_1m(self):
        assert path_loss(1, LOS) == 61.4

    def test_shadowing_adds(self):
        assert path_loss(100, LOS, 3.0) == pytest.approx(104.4, abs=1e-12)

    @pytest.mark.parametrize("d", [0, -5])
    def test_non_positive_distance(self, d):
        with pytest.raises(NonPositiveDistance):
            path_loss(d, LOS)


class TestCapacity:
    def test_noise_floor(self):
        assert ChannelParams().noise_dbm == pytest.approx(-80.0)

    def test_los_100m(self):
        assert snr_db(100, LOS) == pytest.approx(38.6, abs=1e-12)
        # 1e9 * log2(1 + 10**3.86) / 1e9, evaluated separately
        assert link_capacity(100, LOS) == pytest.approx(12.822841579874796, rel=1e-12)

    def test_nlos_100m(self):
        assert snr_db(100, NLOS) == pytest.approx(9.6, abs=1e-12)
        assert link_capacity(100, NLOS) == pytest.approx(3.3391528372923824, rel=1e-12)

    def test_threshold(self):
        # LOS SNR is 78.6 - 20 log10(d), so it equals -5 dB at d = 10**4.18
        edge = 10 ** 4.18
        assert link_capacity(edge * (1 - 1e-6), LOS) is not None
        assert link_capacity(edge * (1 + 1e-6), LOS) is None

    def test_outage_state(self):
        assert link_capacity(10, ChannelState.OUTAGE) is None

    def test_efficiency_scales(self):
        half = ChannelParams(efficiency=0.5)
        assert link_capacity(100, LOS, 0, half) == pytest.approx(0.5 * link_capacity(100, LOS))

    @given(st.floats(1, 5000), st.floats(1, 5000), st.sampled_from([LOS, NLOS]))
    def test_monotone_in_distance(self, d1, d2, state):
        near, far = sorted((d1, d2))
        c_near = link_capacity(near, state) or 0.0
        c_far = link_capacity(far, state) or 0.0
        assert c_near >= c_far

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            ChannelParams(sigma_los=-1)
        with pytest.raises(ValueError):
            ChannelParams(bandwidth_hz=0)


class TestStateModel:
    def test_probabilities_sum_to_one(self):
        for d in (1, 50, 100, 150, 200, 300):
            p = state_probabilities(d, ChannelParams())
            assert min(p) >= 0
            assert sum(p) == pytest.approx(1.0)

    def test_no_outage_close_in(self):
        assert state_probabilities(100, ChannelParams())[0] == 0.0
        assert state_probabilities(200, ChannelParams())[0] > 0.0


class TestGrid:
    def test_two_by_two_los(self):
        scn = GridScenario(2, d_g=100, state_model="los", shadowing=False, cutoff=100)
        net = generate_grid(scn)
        assert len(net.mmbs) == 4
        pos = grid_positions(scn)
        assert np.hypot(*(pos[0] - pos[1])) == pytest.approx(100 / math.sqrt(2))
        enb = [l for l in net.links if l.src == 0]
        mesh = [l for l in net.links if l.src != 0]
        assert len(enb) == 4
        # four perimeter pairs, both directions; diagonals exceed the cutoff
        assert len(mesh) == 8
        assert all(l.capacity == pytest.approx(link_capacity(100, LOS)) for l in mesh)
        assert all(l.capacity == pytest.approx(link_capacity(100 / math.sqrt(2), LOS)) for l in enb)

    def test_deterministic(self):
        scn = GridScenario(4, seed=123)
        assert generate_grid(scn).to_json() == generate_grid(scn).to_json()

    def test_seed_changes_network(self):
        assert generate_grid(GridScenario(4, seed=1)).to_json() != generate_grid(GridScenario(4, seed=2)).to_json()

    @pytest.mark.parametrize("seed", [1, 7])
    def test_four_by_four_connected(self, seed):
        assert check_connectivity(generate_grid(GridScenario(4, seed=seed)))

    def test_reciprocal_mesh_links(self):
        net = generate_grid(GridScenario(4, seed=3))
        caps = {(l.src, l.dst): l.capacity for l in net.links}
        for (u, v), c in caps.items():
            assert v != 0
            if u != 0:
                assert caps[(v, u)] == c

    def test_no_link_below_threshold(self):
        params = ChannelParams()
        floor = math.log2(1 + 10 ** (params.sinr_threshold_db / 10))
        for seed in range(5):
            net = generate_grid(GridScenario(4, seed=seed))
            assert min(l.capacity for l in net.links) >= floor

    def test_cutoff_respected(self):
        scn = GridScenario(3, seed=0, cutoff=150)
        pos = grid_positions(scn)
        for l in generate_grid(scn).links:
            assert np.hypot(*(pos[l.src] - pos[l.dst])) <= 150 + 1e-9

    def test_odd_grid_has_colocated_enb(self):
        # n=3 puts the eNB on the central mmBS; it still gets a (very strong) link
        net = generate_grid(GridScenario(3, seed=0, state_model="los", shadowing=False))
        caps = {(l.src, l.dst): l.capacity for l in net.links}
        assert caps[(0, 5)] == pytest.approx(link_capacity(1.0, LOS))

    def test_ues(self):
        scn = GridScenario(2, seed=4, ues_per_mmbs=2)
        net = generate_grid(scn)
        assert len(net.ues) == 8
        rng = np.random.Generator(np.random.PCG64(scn.seed))
        pos = grid_positions(scn, rng)
        for k, u in enumerate(net.ues):
            home = 1 + k // 2
            assert np.hypot(*(pos[u] - pos[home])) <= 50 + 1e-9
        for l in net.links:
            assert net.nodes[l.src].role is not NodeRole.UE
            if net.nodes[l.dst].role is NodeRole.UE:
                assert net.nodes[l.src].role is NodeRole.MMBS

    def test_invalid_scenarios(self):
        with pytest.raises(ValueError):
            GridScenario(1)
        with pytest.raises(ValueError):
            GridScenario(3, d_g=0)
        with pytest.raises(ValueError):
            GridScenario(3, state_model="rayleigh")


class TestConfig:
    def test_json(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text('{"scenario": {"n": 3, "enb_rf": 4, "shadowing": false}, "channel": {"efficiency": 0.8}}')
        scn_kw, params = load_config(p)
        assert scn_kw == {"n": 3, "enb_rf": 4, "shadowing": False}
        assert params.efficiency == 0.8
        assert params.alpha_los == 61.4

    def test_key_value(self, tmp_path):
        p = tmp_path / "cfg.txt"
        p.write_text("# grid\nn = 5\nd_g = 80\nstate_model = los\nshadowing = off\nsigma_nlos: 9.0\n")
        scn_kw, params = load_config(p)
        assert GridScenario(**scn_kw) == GridScenario(5, d_g=80.0, state_model="los", shadowing=False)
        assert params.sigma_nlos == 9.0

    def test_unknown_key(self, tmp_path):
        p = tmp_path / "cfg.txt"
        p.write_text("colour = blue\n")
        with pytest.raises(ValueError):
            load_config(p)
