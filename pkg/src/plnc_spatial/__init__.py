"""Two-way relaying with physical-layer network coding versus conventional
relaying, evaluated as end-to-end rate per unit of reserved area."""

from .geometry import (
    NodeId,
    ParameterError,
    Scheme,
    SlotRole,
    SystemParams,
    crescent_area,
    in_reserved_region,
    reserved_area_cr,
    reserved_area_plnc,
)
from .interference import (
    ConsistencyError,
    InrBreakdown,
    QuadratureError,
    QuadratureSpec,
    composite_inr_cr,
    composite_inr_plnc,
    inr_breakdown,
)
from .ratemodel import (
    LinkSinrs,
    RateResult,
    distance_from_snr_db,
    end_to_end_rate,
    end_to_end_rate_cr,
    end_to_end_rate_plnc,
)

__version__ = "0.1.0"
