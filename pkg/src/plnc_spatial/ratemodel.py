"""Link SNR, SINR, Shannon rates and end-to-end rate per unit area for CR and PLNC."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ParameterError, Scheme, SystemParams, reserved_area
from .interference import (
    DEFAULT_QUAD,
    QuadratureSpec,
    composite_inr_cr,
    composite_inr_plnc,
    require_reservation,
)

PATH_LOSS_EXPONENT = 4.0


@dataclass(frozen=True)
class LinkSinrs:
    gamma_ab: float
    gamma_ba: float
    gamma_bc: float
    gamma_cb: float

    def __post_init__(self):
        if min(self.gamma_ab, self.gamma_ba, self.gamma_bc, self.gamma_cb) < 0:
            raise ParameterError("link SINRs must be non-negative")


@dataclass(frozen=True)
class RateResult:
    scheme: Scheme
    per_direction_rates: tuple[float, float]
    reserved_area: float
    rate_per_area: float
    inr_used: tuple[float, float]  # (at_relay, at_end)

    @property
    def inr_at_relay(self) -> float:
        return self.inr_used[0]

    @property
    def inr_at_end(self) -> float:
        return self.inr_used[1]


def snr_linear_from_distance(d):
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ParameterError("distance must be positive")
    out = d**-PATH_LOSS_EXPONENT
    return float(out) if out.ndim == 0 else out


def distance_from_snr_db(snr_db: float) -> float:
    """Link distance achieving ``snr_db`` when distance 1 gives 0 dB."""
    return 10.0 ** (-snr_db / (10.0 * PATH_LOSS_EXPONENT))


def to_db(x):
    return 10.0 * np.log10(x)


def sinr(snr, inr):
    return snr / (1.0 + inr)


def shannon_rate(sinr_value):
    return np.log2(1.0 + sinr_value)


def af_end_to_end_sinrs(links: LinkSinrs) -> tuple[float, float]:
    """End-to-end SINRs at A and C for two-way amplify-and-forward."""
    ab, ba, bc, cb = links.gamma_ab, links.gamma_ba, links.gamma_bc, links.gamma_cb
    gamma_a = ba * cb / (1.0 + ba + ab + cb)
    gamma_c = ab * bc / (1.0 + ab + bc + cb)
    return gamma_a, gamma_c


def cr_rate_from_inr(params: SystemParams, inr_relay: float, inr_end: float) -> RateResult:
    """CR rate per area given composite INRs; receiver B sees ``inr_relay``, A and C see ``inr_end``."""
    snr = params.link_snr
    r_ab = r_cb = float(shannon_rate(sinr(snr, inr_relay)))
    r_bc = r_ba = float(shannon_rate(sinr(snr, inr_end)))
    rates = (min(r_ab, r_bc), min(r_cb, r_ba))
    area = reserved_area(Scheme.CR, params)
    return RateResult(Scheme.CR, rates, area, sum(rates) / (Scheme.CR.slots_per_exchange * area),
                      (float(inr_relay), float(inr_end)))


def plnc_rate_from_inr(params: SystemParams, inr_relay: float, inr_end: float) -> RateResult:
    snr = params.link_snr
    uplink = sinr(snr, inr_relay)  # slot 1: A->B and C->B
    downlink = sinr(snr, inr_end)  # slot 2: B->A and B->C
    links = LinkSinrs(gamma_ab=uplink, gamma_ba=downlink, gamma_bc=downlink, gamma_cb=uplink)
    gamma_a, gamma_c = af_end_to_end_sinrs(links)
    # R_AC is decoded at C, R_CA at A
    rates = (float(shannon_rate(gamma_c)), float(shannon_rate(gamma_a)))
    area = reserved_area(Scheme.PLNC, params)
    return RateResult(Scheme.PLNC, rates, area, sum(rates) / (Scheme.PLNC.slots_per_exchange * area),
                      (float(inr_relay), float(inr_end)))


def end_to_end_rate_cr(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> RateResult:
    require_reservation(params)
    return cr_rate_from_inr(params, *composite_inr_cr(params, quad))


def end_to_end_rate_plnc(params: SystemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> RateResult:
    require_reservation(params)
    return plnc_rate_from_inr(params, *composite_inr_plnc(params, quad))


def end_to_end_rate(scheme: Scheme, params: SystemParams, quad: QuadratureSpec = DEFAULT_QUAD) -> RateResult:
    if scheme is Scheme.CR:
        return end_to_end_rate_cr(params, quad)
    return end_to_end_rate_plnc(params, quad)


def rate_from_inr(scheme: Scheme, params: SystemParams, inr_relay: float, inr_end: float) -> RateResult:
    if scheme is Scheme.CR:
        return cr_rate_from_inr(params, inr_relay, inr_end)
    return plnc_rate_from_inr(params, inr_relay, inr_end)
