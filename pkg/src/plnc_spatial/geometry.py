"""Planar geometry of the A-B-C line topology and its reserved areas.

Coordinates are fixed: A = (0, 0), B = (r_n, 0), C = (2 r_n, 0).  The
interferer annulus is centered at the relay B.  Angles measured around A
use theta_A = 0 pointing away from B.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

_CLAMP_TOL = 1e-12


class ParameterError(ValueError):
    """Raised when system parameters or arguments fall outside the model's domain."""


class NodeId(enum.Enum):
    A = "A"
    B = "B"
    C = "C"


class Scheme(enum.Enum):
    CR = "CR"
    PLNC = "PLNC"

    @property
    def slots_per_exchange(self) -> int:
        return 4 if self is Scheme.CR else 2


class SlotRole(enum.Enum):
    """Which CR slot is active; PLNC ignores it (all three nodes reserve)."""

    RELAY_RECEIVES = "relay-receives"
    END_RECEIVES = "end-receives"


@dataclass(frozen=True)
class SystemParams:
    """Normalized geometry and interference environment.

    r_n   -- spacing A-B and B-C (distance 1 gives 0 dB link SNR)
    r0    -- reserved-area radius
    big_r -- outer radius of the interferer disc around B
    lam   -- interferer density, nodes per unit area
    """

    r_n: float
    r0: float
    big_r: float = 10.0
    lam: float = 0.0

    def __post_init__(self):
        if not self.r_n > 0:
            raise ParameterError(f"r_n must be positive, got {self.r_n}")
        if not self.r0 > 0:
            raise ParameterError(f"r0 must be positive, got {self.r0}")
        if not self.big_r > self.r0:
            raise ParameterError(f"big_r must exceed r0 = {self.r0:.4g}, got {self.big_r}")
        if not self.lam >= 0:
            raise ParameterError(f"lambda must be non-negative, got {self.lam}")

    @classmethod
    def from_snr_db(cls, snr_db: float, r0: float, big_r: float = 10.0, lam: float = 0.0):
        # local import keeps geometry free of the rate model at module level
        from .ratemodel import distance_from_snr_db

        return cls(r_n=distance_from_snr_db(snr_db), r0=r0, big_r=big_r, lam=lam)

    @property
    def link_snr(self) -> float:
        """Linear SNR of an A-B (or B-C) link under path-loss exponent 4."""
        return self.r_n ** -4.0

    def with_(self, **changes) -> "SystemParams":
        fields = dict(r_n=self.r_n, r0=self.r0, big_r=self.big_r, lam=self.lam)
        fields.update(changes)
        return SystemParams(**fields)


def node_position(node: NodeId, params: SystemParams) -> tuple[float, float]:
    return {NodeId.A: 0.0, NodeId.B: params.r_n, NodeId.C: 2.0 * params.r_n}[node], 0.0


def reserving_nodes(scheme: Scheme, role: SlotRole = SlotRole.RELAY_RECEIVES) -> tuple[NodeId, ...]:
    if scheme is Scheme.PLNC:
        return (NodeId.A, NodeId.B, NodeId.C)
    if role is SlotRole.RELAY_RECEIVES:
        return (NodeId.A, NodeId.B)
    return (NodeId.B, NodeId.C)


def _require_overlap(params: SystemParams):
    if not params.r_n < 2.0 * params.r0:
        raise ParameterError(
            f"reserved discs must overlap: need r_n < 2*r0, got r_n={params.r_n:.6g}, r0={params.r0:.6g}"
        )


def half_angle_psi(params: SystemParams) -> float:
    """Half-angle subtended at A by the chord where disc(A, r0) and disc(B, r0) meet.

    Equal to arctan(sqrt(4 r0^2 - r_n^2) / r_n) = arccos(r_n / (2 r0)).
    """
    _require_overlap(params)
    return float(np.arctan(np.sqrt(4.0 * params.r0**2 - params.r_n**2) / params.r_n))


def crescent_half_angle(r_a, params: SystemParams):
    """Angular half-width phi(r_a) of the A-side crescent at distance r_a from A.

    Accepts scalars or arrays.  r_a must lie in [r0 - r_n, r0].
    """
    r_n, r0 = params.r_n, params.r0
    r_a = np.asarray(r_a, dtype=float)
    lo, hi = r0 - r_n, r0
    slack = _CLAMP_TOL * max(1.0, r0)
    if np.any(r_a < lo - slack) or np.any(r_a > hi + slack) or np.any(r_a <= 0):
        raise ParameterError(f"r_a must lie in [{lo:.6g}, {hi:.6g}] with r_a > 0")
    arg = (r0**2 - r_n**2 - r_a**2) / (2.0 * r_a * r_n)
    out = np.arccos(np.clip(arg, -1.0, 1.0))
    return float(out) if out.ndim == 0 else out


def dist_end_from_ring_point(r_b, theta, params: SystemParams):
    """Distance from A to the point at polar (r_b, theta) around B."""
    r_n = params.r_n
    sq = r_b**2 + r_n**2 - 2.0 * r_n * r_b * np.cos(theta)
    return np.sqrt(np.maximum(sq, 0.0))


def dist_relay_from_crescent_point(r_a, theta_a, params: SystemParams):
    """Distance from B to the point at polar (r_a, theta_a) around A."""
    r_n = params.r_n
    sq = r_a**2 + r_n**2 + 2.0 * r_n * r_a * np.cos(theta_a)
    return np.sqrt(np.maximum(sq, 0.0))


def dist_far_end_from_crescent_point(r_a, theta_a, params: SystemParams):
    """Distance from C to the point at polar (r_a, theta_a) around A."""
    r_n = params.r_n
    sq = r_a**2 + 4.0 * r_n**2 + 4.0 * r_n * r_a * np.cos(theta_a)
    return np.sqrt(np.maximum(sq, 0.0))


def _chord_term(params: SystemParams) -> float:
    # r_n/2 * sqrt(4 r0^2 - r_n^2): twice the kite area spanned by A, B and the chord ends
    return 0.5 * params.r_n * np.sqrt(4.0 * params.r0**2 - params.r_n**2)


def crescent_area(params: SystemParams) -> float:
    """Area of disc(A, r0) minus disc(B, r0)."""
    psi = half_angle_psi(params)
    return float(params.r0**2 * (np.pi - 2.0 * psi) + _chord_term(params))


def reserved_area_cr(params: SystemParams) -> float:
    """Area of the two-disc union reserved in one CR slot."""
    psi = half_angle_psi(params)
    return float(2.0 * params.r0**2 * (np.pi - psi) + _chord_term(params))


def reserved_area_plnc(params: SystemParams) -> float:
    """Area of the three-disc union reserved in each PLNC slot."""
    psi = half_angle_psi(params)
    return float(params.r0**2 * (3.0 * np.pi - 4.0 * psi) + 2.0 * _chord_term(params))


def reserved_area(scheme: Scheme, params: SystemParams) -> float:
    return reserved_area_cr(params) if scheme is Scheme.CR else reserved_area_plnc(params)


def in_reserved_region(point, scheme: Scheme, params: SystemParams,
                       role: SlotRole = SlotRole.RELAY_RECEIVES):
    """True where a point lies within r0 of any node reserving in this slot.

    ``point`` is an (x, y) pair or an array of shape (..., 2).
    """
    p = np.asarray(point, dtype=float)
    x, y = p[..., 0], p[..., 1]
    r0sq = params.r0**2
    inside = np.zeros(np.shape(x), dtype=bool)
    for node in reserving_nodes(scheme, role):
        nx, _ = node_position(node, params)
        inside |= (x - nx) ** 2 + y**2 <= r0sq
    return bool(inside) if inside.ndim == 0 else inside
