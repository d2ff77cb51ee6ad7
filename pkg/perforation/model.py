"""
Perforated nanobeam description and the effective stiffness / mass / rotary
inertia multipliers of a square periodic hole pattern.
"""
import math
from dataclasses import dataclass

from core import config
from core.errors import DomainError


@dataclass(frozen=True)
class BeamCase:
    """
    A nondimensional perforated nanobeam scenario.

    Attributes
    ----------
    alpha : float
        Filling ratio t_p/s_p in (0, 1]. alpha = 1 is a solid beam.
    n_holes : int
        Number of perforation rows N along the length.
    nonlocal_param : float
        Eringen parameter e0a/l_p.
    slenderness : float
        h_p/l_p; only the dynamic solver reads it, through r² = (h_p/l_p)²/12.
    """
    alpha: float
    n_holes: int
    nonlocal_param: float = 0.0
    slenderness: float = config.SLENDERNESS

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be a finite number, got {self.alpha!r}")
        # alpha = 0 is the fully perforated limit; the static equation divides by P1 -> 0 there.
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if isinstance(self.n_holes, bool) or int(self.n_holes) != self.n_holes or self.n_holes < 1:
            raise DomainError(f"n_holes must be a positive integer, got {self.n_holes!r}")
        object.__setattr__(self, 'n_holes', int(self.n_holes))
        if not math.isfinite(self.nonlocal_param) or self.nonlocal_param < 0:
            raise DomainError(f"nonlocal_param must be >= 0, got {self.nonlocal_param}")
        if not math.isfinite(self.slenderness) or self.slenderness <= 0:
            raise DomainError(f"slenderness must be > 0, got {self.slenderness}")

    @property
    def regime(self) -> str:
        return 'solid' if self.alpha == 1.0 else 'perforated'

    @property
    def rotary_group(self) -> float:
        """r² = h_p² / (12 l_p²)."""
        return self.slenderness ** 2 / 12.0

    def label(self) -> str:
        return f"alpha={self.alpha:g}, N={self.n_holes}, nonlocal={self.nonlocal_param:g}"


@dataclass(frozen=True)
class EffectiveCoefficients:
    """Multipliers of [EI], [rho A] and [rho I] for the perforated section."""
    p1: float
    p2: float
    p3: float


def effective_coefficients(case: BeamCase) -> EffectiveCoefficients:
    """
    Evaluate P1, P2, P3 with the grouping of the published rational forms.

    P3 is kept exactly as published, so at alpha = 1 it equals
    (N² + 2N + 2)/(N + 1)² rather than 1.
    """
    a = float(case.alpha)
    n = float(case.n_holes)

    p1_num = a * (n + 1.0) * (n * n + 2.0 * n + a * a)
    p1_den = ((1.0 - a * a + a ** 3) * n ** 3
              + 3.0 * a * n * n
              + (3.0 + 2.0 * a - 3.0 * a * a + a ** 3) * a * a * n
              + a ** 3)

    p2 = (1.0 - n * (a - 2.0)) * a / (n + a)

    p3_num = a * ((2.0 - a) * n ** 3
                  + 3.0 * n * n
                  - 2.0 * (a - 3.0) * (a * a - a + 1.0) * n
                  + a * a + 1.0)
    p3 = p3_num / (n + a) ** 3

    return EffectiveCoefficients(p1=p1_num / p1_den, p2=p2, p3=p3)
