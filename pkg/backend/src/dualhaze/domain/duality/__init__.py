from dualhaze.domain.duality.models import IDENTITY, EnhancerRef
from dualhaze.domain.duality.service import (
    dehret,
    dual,
    illumination_divider,
    inverted_transmission,
    max_filter,
    retdeh,
    transmission_dehazer,
)

__all__ = [
    "IDENTITY",
    "EnhancerRef",
    "dehret",
    "dual",
    "illumination_divider",
    "inverted_transmission",
    "max_filter",
    "retdeh",
    "transmission_dehazer",
]
