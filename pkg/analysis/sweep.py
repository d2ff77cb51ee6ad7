"""
Parameter sweeps: static and dynamic solves per case, sampled at fixed stations X.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from analysis.ratio import ratio_profile
from core import config
from dynamics.galerkin import GalerkinBasis, assemble, dynamic_deflection, solve_fundamental
from perforation.model import BeamCase
from polynomials.chebyshev import check_unit_interval
from statics.solver import StaticProblem, sample_grid, solve, static_deflection

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SweepRecord:
    case: BeamCase
    stations: Tuple[float, ...]
    static: Tuple[float, ...] = ()
    dynamic: Tuple[float, ...] = ()
    frequency: float = float('nan')
    mean_ratio: float = float('nan')
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_case(case: BeamCase, stations: Tuple[float, ...], galerkin_size: int,
              inertia: str, samples: np.ndarray) -> SweepRecord:
    try:
        problem = StaticProblem(case)
        weights, _ = solve(problem, 'direct')
        mode = solve_fundamental(assemble(case, GalerkinBasis(galerkin_size), inertia))

        ratio = ratio_profile(static_deflection(problem, weights, samples),
                              dynamic_deflection(mode, samples=samples))
        return SweepRecord(
            case=case,
            stations=stations,
            static=tuple(static_deflection(problem, weights, stations).values),
            dynamic=tuple(dynamic_deflection(mode, samples=stations).values),
            frequency=mode.frequency,
            mean_ratio=ratio.mean_ratio,
        )
    except Exception as exc:
        logger.warning("sweep case %s failed: %s", case.label(), exc)
        return SweepRecord(case=case, stations=stations, error=f"{type(exc).__name__}: {exc}")


def sweep(cases: Iterable[BeamCase], stations: Sequence[float] = config.SWEEP_STATIONS,
          galerkin_size: int = config.GALERKIN_SIZE, inertia: str = config.INERTIA_MODEL,
          n_jobs: int = 1) -> List[SweepRecord]:
    """
    Solve every case and sample both profiles at the stations.

    Records come back in input order whatever n_jobs is; a failing case is
    recorded with its error message and the sweep carries on.
    """
    cases = list(cases)
    stations = tuple(float(p) for p in check_unit_interval(stations).reshape(-1))
    samples = sample_grid()
    logger.info("sweeping %d cases over stations %s", len(cases), stations)
    return Parallel(n_jobs=n_jobs, backend="threading")(
        delayed(_run_case)(case, stations, galerkin_size, inertia, samples) for case in cases
    )


def sweep_frame(records: Sequence[SweepRecord]) -> pd.DataFrame:
    rows = []
    for record in records:
        row = {
            'alpha': record.case.alpha,
            'n_holes': record.case.n_holes,
            'nonlocal': record.case.nonlocal_param,
            'slenderness': record.case.slenderness,
            'regime': record.case.regime,
        }
        for i, x in enumerate(record.stations):
            row[f"W_static({x:g})"] = record.static[i] if record.ok else np.nan
        for i, x in enumerate(record.stations):
            row[f"W_dynamic({x:g})"] = record.dynamic[i] if record.ok else np.nan
        row['lambda'] = record.frequency
        row['mean_ratio'] = record.mean_ratio
        row['error'] = record.error or ''
        rows.append(row)
    return pd.DataFrame(rows)


def grid_cases(alphas: Sequence[float], holes: Sequence[int], nonlocals: Sequence[float],
               slenderness: float = config.SLENDERNESS) -> List[BeamCase]:
    """Cartesian product, alpha varying slowest."""
    return [BeamCase(a, n, nl, slenderness) for a, n, nl in itertools.product(alphas, holes, nonlocals)]


def alpha_family(alphas: Sequence[float] = (0.1, 0.3, 0.5, 0.7, 0.9, 1.0), n_holes: int = 1,
                 nonlocal_param: float = 0.1) -> List[BeamCase]:
    return grid_cases(alphas, [n_holes], [nonlocal_param])


def holes_family(holes: Sequence[int] = (1, 2, 3, 4, 5), alpha: float = 0.5,
                 nonlocal_param: float = 0.2) -> List[BeamCase]:
    return grid_cases([alpha], holes, [nonlocal_param])


def nonlocal_family(nonlocals: Sequence[float] = (0.0, 0.1, 0.2, 0.3, 0.4), alpha: float = 0.8,
                    n_holes: int = 2) -> List[BeamCase]:
    return grid_cases([alpha], [n_holes], nonlocals)


FAMILIES = {
    'alpha': alpha_family,
    'holes': holes_family,
    'nonlocal': nonlocal_family,
}
