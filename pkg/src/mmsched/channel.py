"""Grid scenarios with path-loss based link capacities.

Defaults follow the 28 GHz simulation parameters (LOS/NLOS path-loss fits,
30 dBm transmit power, 30 dB directivity gain, 1 GHz bandwidth, -174 dBm/Hz
thermal noise, 4 dB noise figure, -5 dB SINR threshold).

Channel states are drawn per node pair from a distance-dependent
outage/LOS/NLOS model. Its constants are model defaults, not measured truth:

    p_out(d) = max(0, 1 - exp(-a_out * d + b_out))
    p_los(d) = (1 - p_out(d)) * exp(-d / los_scale)
    p_nlos   = 1 - p_out - p_los
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import NonPositiveDistance
from .model import Link, Network, Node, NodeRole

RNG_ALGORITHM = "PCG64"


class ChannelState(str, Enum):
    LOS = "los"
    NLOS = "nlos"
    OUTAGE = "outage"


@dataclass(frozen=True)
class ChannelParams:
    alpha_los: float = 61.4
    beta_los: float = 2.0
    sigma_los: float = 5.8
    alpha_nlos: float = 72.0
    beta_nlos: float = 2.92
    sigma_nlos: float = 8.7
    p_tx_dbm: float = 30.0
    g_x_db: float = 30.0
    bandwidth_hz: float = 1e9
    kt0_dbm_hz: float = -174.0
    noise_figure_db: float = 4.0
    sinr_threshold_db: float = -5.0
    carrier_ghz: float = 28.0
    efficiency: float = 1.0
    # channel-state model
    a_out: float = 1.0 / 30.0
    b_out: float = 5.2
    los_scale: float = 67.1

    def __post_init__(self):
        if min(self.sigma_los, self.sigma_nlos) < 0:
            raise ValueError("shadowing deviations must be non-negative")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth must be positive")

    @property
    def noise_dbm(self) -> float:
        return self.kt0_dbm_hz + 10.0 * math.log10(self.bandwidth_hz) + self.noise_figure_db

    def sigma(self, state: ChannelState) -> float:
        return self.sigma_los if state is ChannelState.LOS else self.sigma_nlos


@dataclass(frozen=True)
class GridScenario:
    n: int
    d_g: float = 100.0
    enb_rf: int = 10
    mmbs_rf: int = 1
    ues_per_mmbs: int = 0
    seed: int = 0
    # "stochastic" draws outage/LOS/NLOS; "los" / "nlos" force the state
    state_model: str = "stochastic"
    shadowing: bool = True
    cutoff: float = 200.0
    # co-sited nodes (odd n puts the eNB on the central mmBS) use this distance
    min_distance: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid side n must be at least 2")
        if not self.d_g > 0:
            raise ValueError("grid spacing must be positive")
        if self.state_model not in ("stochastic", "los", "nlos"):
            raise ValueError(f"unknown state model {self.state_model!r}")


def path_loss(d: float, state: ChannelState, shadow_db: float = 0.0, params: ChannelParams = ChannelParams()) -> float:
    """alpha + 10 beta log10(d) + shadowing, in dB."""
    if not d > 0:
        raise NonPositiveDistance(f"distance {d!r} is not positive")
    if state is ChannelState.LOS:
        alpha, beta = params.alpha_los, params.beta_los
    else:
        alpha, beta = params.alpha_nlos, params.beta_nlos
    return alpha + 10.0 * beta * math.log10(d) + shadow_db


def snr_db(d: float, state: ChannelState, shadow_db: float = 0.0, params: ChannelParams = ChannelParams()) -> float:
    return params.p_tx_dbm + params.g_x_db - path_loss(d, state, shadow_db, params) - params.noise_dbm


def link_capacity(
    d: float, state: ChannelState, shadow_db: float = 0.0, params: ChannelParams = ChannelParams()
) -> Optional[float]:
    """Shannon rate in Gbps, or None when the link is in outage."""
    if state is ChannelState.OUTAGE:
        return None
    snr = snr_db(d, state, shadow_db, params)
    if snr < params.sinr_threshold_db:
        return None
    return params.efficiency * params.bandwidth_hz * math.log2(1.0 + 10.0 ** (snr / 10.0)) / 1e9


def state_probabilities(d: float, params: ChannelParams) -> tuple[float, float, float]:
    """(p_outage, p_los, p_nlos) at distance d."""
    p_out = max(0.0, 1.0 - math.exp(-params.a_out * d + params.b_out))
    p_los = (1.0 - p_out) * math.exp(-d / params.los_scale)
    return p_out, p_los, 1.0 - p_out - p_los


def _draw(rng: np.random.Generator, d: float, scn: GridScenario, params: ChannelParams) -> tuple[ChannelState, float]:
    # always consume two draws per pair so forcing the state keeps the stream aligned
    u, z = rng.random(), rng.standard_normal()
    if scn.state_model == "los":
        state = ChannelState.LOS
    elif scn.state_model == "nlos":
        state = ChannelState.NLOS
    else:
        p_out, p_los, _ = state_probabilities(d, params)
        if u < p_out:
            state = ChannelState.OUTAGE
        elif u < p_out + p_los:
            state = ChannelState.LOS
        else:
            state = ChannelState.NLOS
    shadow = z * params.sigma(state) if scn.shadowing and state is not ChannelState.OUTAGE else 0.0
    return state, shadow


def grid_positions(scn: GridScenario, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Coordinates of eNB (row 0), the n*n mmBSs in row-major order, then UEs."""
    n, d_g = scn.n, scn.d_g
    centre = (n - 1) * d_g / 2.0
    pts = [(centre, centre)]
    pts += [(j * d_g, i * d_g) for i in range(n) for j in range(n)]
    if scn.ues_per_mmbs:
        if rng is None:
            raise ValueError("UE placement needs a generator")
        for k in range(n * n):
            hx, hy = pts[1 + k]
            for _ in range(scn.ues_per_mmbs):
                r = 0.5 * d_g * math.sqrt(rng.random())
                phi = 2.0 * math.pi * rng.random()
                pts.append((hx + r * math.cos(phi), hy + r * math.sin(phi)))
    return np.array(pts, dtype=float)


def generate_grid(scn: GridScenario, params: ChannelParams = ChannelParams()) -> Network:
    """Random-capacity backhaul (and optionally access) network on an n x n grid.

    Node 0 is the eNB at the grid centre, nodes 1..n*n the mmBSs, then UEs.
    Every ordered pair within ``cutoff`` gets one channel draw shared by both
    directions; eNB pairs only yield the downlink direction, UE pairs only the
    mmBS-to-UE direction.
    """
    rng = np.random.Generator(np.random.PCG64(scn.seed))
    pos = grid_positions(scn, rng)
    W = scn.n * scn.n
    n_ue = W * scn.ues_per_mmbs
    nodes = [Node(0, NodeRole.ENB, scn.enb_rf)]
    nodes += [Node(1 + k, NodeRole.MMBS, scn.mmbs_rf) for k in range(W)]
    nodes += [Node(1 + W + k, NodeRole.UE, 1) for k in range(n_ue)]

    def role(v: int) -> NodeRole:
        return nodes[v].role

    links = []
    total = len(nodes)
    for a in range(total):
        for b in range(a + 1, total):
            ra, rb = role(a), role(b)
            if ra is NodeRole.UE and rb is NodeRole.UE:
                continue
            if ra is NodeRole.ENB and rb is NodeRole.UE:
                continue
            d = float(np.hypot(*(pos[a] - pos[b])))
            if d > scn.cutoff + 1e-9:
                continue
            d = max(d, scn.min_distance)
            state, shadow = _draw(rng, d, scn, params)
            cap = link_capacity(d, state, shadow, params)
            if cap is None:
                continue
            if ra is NodeRole.ENB or rb is NodeRole.UE:
                links.append(Link(a, b, cap))
            else:
                links.append(Link(a, b, cap))
                links.append(Link(b, a, cap))
    links.sort(key=lambda e: (e.src, e.dst))
    return Network(tuple(nodes), tuple(links))


def _coerce(field: dataclasses.Field, value):
    kind = field.type if isinstance(field.type, str) else getattr(field.type, "__name__", "")
    if "bool" in kind:
        return value if isinstance(value, bool) else str(value).strip().lower() in ("1", "true", "yes", "on")
    if "int" in kind:
        return int(value)
    if "float" in kind:
        return float(value)
    return value if not isinstance(value, str) else value.strip()


def load_config(path: str | Path, **overrides) -> tuple[dict, ChannelParams]:
    """Read scenario/channel settings from a JSON object or ``key = value`` lines.

    Returns (scenario keyword arguments, ChannelParams); keys belong to
    whichever of GridScenario / ChannelParams declares them.
    """
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        raw = json.loads(text)
        flat = {}
        for key, value in raw.items():
            if isinstance(value, dict):
                flat.update(value)
            else:
                flat[key] = value
    else:
        flat = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=") if "=" in line else line.partition(":")
            flat[key.strip()] = value.strip()
    flat.update({k: v for k, v in overrides.items() if v is not None})
    scn_fields = {f.name: f for f in dataclasses.fields(GridScenario)}
    ch_fields = {f.name: f for f in dataclasses.fields(ChannelParams)}
    scn_kw, ch_kw = {}, {}
    for key, value in flat.items():
        if key in scn_fields:
            scn_kw[key] = _coerce(scn_fields[key], value)
        elif key in ch_fields:
            ch_kw[key] = _coerce(ch_fields[key], value)
        else:
            raise ValueError(f"unknown configuration key {key!r}")
    return scn_kw, ChannelParams(**ch_kw)
