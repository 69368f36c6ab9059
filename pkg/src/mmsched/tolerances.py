"""Numerical tolerances used across the package, kept in one place."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # schedule length and per-slot feasibility checks
    schedule: float = 1e-9
    # net-flow sign checks on relays and destinations (Gbps)
    flow: float = 1e-7
    # entering column must have reduced cost below -reduced_cost
    reduced_cost: float = 1e-9
    # pivot element magnitude below which a ratio is ignored
    pivot: float = 1e-9
    # basic values above -primal are accepted and clamped to zero
    primal: float = 1e-9
    # dual residual |p^T B - f_B| that triggers refactorization
    dual_residual: float = 1e-8
    refactor_every: int = 50
    # slots shorter than this are dropped from extracted schedules
    min_slot: float = 1e-9


DEFAULT = Tolerances()
