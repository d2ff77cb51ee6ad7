"""
Dynamic-to-static deflection ratio along the beam.
"""
import logging
from dataclasses import dataclass

import numpy as np

from core import config
from core.errors import UsageError
from statics.solver import DeflectionProfile, ProfileKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RatioReport:
    samples: np.ndarray
    ratios: np.ndarray
    mean_ratio: float
    relative_spread: float
    tolerance: float

    @property
    def constant(self) -> bool:
        return self.relative_spread <= self.tolerance

    def to_dict(self) -> dict:
        return {
            'mean_ratio': self.mean_ratio,
            'relative_spread': self.relative_spread,
            'constant': self.constant,
        }


def ratio_profile(static: DeflectionProfile, dynamic: DeflectionProfile,
                  tolerance: float = config.RATIO_TOLERANCE,
                  floor: float = config.RATIO_FLOOR) -> RatioReport:
    """
    Pointwise W_dynamic / W_static over interior samples.

    Samples at the supports, and any where |W_static| falls below
    floor * max|W_static|, are left out.
    """
    if static.kind is not ProfileKind.STATIC or dynamic.kind is not ProfileKind.DYNAMIC:
        raise UsageError(f"expected a static and a dynamic profile, got {static.kind.value} and {dynamic.kind.value}")
    if static.samples.shape != dynamic.samples.shape or not np.array_equal(static.samples, dynamic.samples):
        raise UsageError("static and dynamic profiles are sampled on different grids")
    if not tolerance >= 0:
        raise UsageError(f"tolerance must be >= 0, got {tolerance}")

    magnitude = np.abs(static.values)
    interior = (static.samples > 0.0) & (static.samples < 1.0)
    keep = interior & (magnitude >= floor * magnitude.max())
    if not np.any(keep):
        raise UsageError("static profile has no interior samples above the ratio floor")

    ratios = dynamic.values[keep] / static.values[keep]
    mean = float(np.mean(ratios))
    spread = float((ratios.max() - ratios.min()) / abs(mean)) if mean != 0.0 else float('inf')
    logger.debug("ratio over %d samples: mean %.10g, spread %.3e", ratios.size, mean, spread)
    return RatioReport(samples=static.samples[keep], ratios=ratios, mean_ratio=mean,
                       relative_spread=spread, tolerance=float(tolerance))
