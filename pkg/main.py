import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from analysis.ratio import ratio_profile
from analysis.sweep import FAMILIES, grid_cases, sweep, sweep_frame
from analysis.tables import validate_tables
from core import config
from core.errors import DomainError, UsageError
from dynamics.galerkin import BASIS_KINDS, INERTIA_MODELS, solve_dynamic
from optimization.lbfgs import LbfgsConfig
from perforation.model import BeamCase
from polynomials.chebyshev import MappedChebyshevBasis
from statics.solver import sample_grid, solve_static

logger = logging.getLogger(__name__)

COMMANDS = ('static', 'dynamic', 'ratio', 'sweep', 'validate')
DEFAULT_FORMAT = {'static': 'csv', 'dynamic': 'csv', 'sweep': 'csv', 'ratio': 'json', 'validate': 'json'}


# --- Argument types ---

def _number(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not np.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _integer(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")


def filling_ratio(text: str) -> float:
    value = _number(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1], got {value:g}")
    return value


def nonnegative(text: str) -> float:
    value = _number(text)
    if value < 0.0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value:g}")
    return value


def positive(text: str) -> float:
    value = _number(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value:g}")
    return value


def at_least(minimum: int, maximum: Optional[int] = None):
    def parse(text: str) -> int:
        value = _integer(text)
        if value < minimum or (maximum is not None and value > maximum):
            bounds = f">= {minimum}" if maximum is None else f"in {minimum}..{maximum}"
            raise argparse.ArgumentTypeError(f"must be an integer {bounds}, got {value}")
        return value
    return parse


def listed(item):
    def parse(text: str) -> list:
        return [item(part.strip()) for part in text.split(',') if part.strip()]
    return parse


# --- Config file ---

def read_config_file(path: str) -> List[str]:
    """
    Turn `key = value` lines into command-line tokens.

    Keys are long flag names without the leading dashes; `#` starts a comment.
    A `verbose` key with a true value becomes the bare --verbose flag.
    """
    tokens = []
    with open(path, encoding='utf-8') as handle:
        for number, line in enumerate(handle, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise UsageError(f"{path}:{number}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split('=', 1))
            flag = '--' + key.replace('_', '-')
            if flag == '--verbose':
                if value.lower() in ('1', 'true', 'yes', 'on'):
                    tokens.append(flag)
                continue
            tokens += [flag, value]
    return tokens


def with_config(argv: Sequence[str], parser: argparse.ArgumentParser) -> List[str]:
    """Splice config-file tokens in front of the user's flags so flags win."""
    argv = list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--config')
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    try:
        tokens = read_config_file(known.config)
    except (OSError, UsageError) as e:
        parser.error(f"argument --config: {e}")
    position = 1 if argv and argv[0] in COMMANDS else 0
    return argv[:position] + tokens + argv[position:]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--alpha', type=filling_ratio, default=0.5, help='Filling ratio in (0, 1]')
    common.add_argument('--n-holes', type=at_least(1), default=2, help='Number of perforation rows')
    common.add_argument('--nonlocal', type=nonnegative, default=0.2, help='Nonlocal parameter e0a/l')
    common.add_argument('--slenderness', type=positive, default=config.SLENDERNESS, help='h/l of the beam')
    common.add_argument('--order', type=at_least(0), default=config.BASIS_ORDER, help='Chebyshev order')
    common.add_argument('--points', type=at_least(2), default=config.COLLOCATION_POINTS,
                        help='Collocation points')
    common.add_argument('--grid', choices=('uniform', 'chebyshev'), default=config.COLLOCATION_GRID)
    common.add_argument('--galerkin-size', type=at_least(1, config.GALERKIN_MAX_SIZE),
                        default=config.GALERKIN_SIZE)
    common.add_argument('--galerkin-kind', choices=BASIS_KINDS, default=config.GALERKIN_KIND)
    common.add_argument('--inertia', choices=INERTIA_MODELS, default=config.INERTIA_MODEL)
    common.add_argument('--method', choices=('lbfgs', 'direct'), default='direct')
    common.add_argument('--seed', type=at_least(0), default=config.SEED)
    common.add_argument('--samples', type=at_least(2), default=config.SAMPLE_COUNT,
                        help='Equispaced output samples on [0, 1]')
    common.add_argument('--output', help='Output file (stdout when omitted)')
    common.add_argument('--format', choices=('csv', 'json'))
    common.add_argument('--config', help='key = value file; explicit flags override it')
    common.add_argument('--verbose', action='store_true', help='Log solver progress')

    parser = argparse.ArgumentParser(description='Static and dynamic deflection of perforated nanobeams')
    commands = parser.add_subparsers(dest='command', required=True)
    commands.add_parser('static', parents=[common], help='Static deflection profile')
    commands.add_parser('dynamic', parents=[common], help='Fundamental mode shape and frequency')
    commands.add_parser('ratio', parents=[common], help='Dynamic/static ratio constancy report')
    sweep_parser = commands.add_parser('sweep', parents=[common], help='Parameter sweep')
    sweep_parser.add_argument('--alphas', type=listed(filling_ratio), help='Comma-separated filling ratios')
    sweep_parser.add_argument('--holes', type=listed(at_least(1)), help='Comma-separated hole counts')
    sweep_parser.add_argument('--nonlocals', type=listed(nonnegative), help='Comma-separated nonlocal values')
    sweep_parser.add_argument('--family', choices=sorted(FAMILIES), help='Preset parameter-study grid')
    sweep_parser.add_argument('--jobs', type=at_least(1), default=1, help='Worker threads')
    commands.add_parser('validate', parents=[common], help='Regression against the published tables')
    return parser


@dataclass
class RunConfig:
    command: str
    alpha: float = 0.5
    n_holes: int = 2
    nonlocal_param: float = 0.2
    slenderness: float = config.SLENDERNESS
    order: int = config.BASIS_ORDER
    points: int = config.COLLOCATION_POINTS
    grid: str = config.COLLOCATION_GRID
    galerkin_size: int = config.GALERKIN_SIZE
    galerkin_kind: str = config.GALERKIN_KIND
    inertia: str = config.INERTIA_MODEL
    method: str = 'direct'
    seed: int = config.SEED
    samples: int = config.SAMPLE_COUNT
    output: Optional[str] = None
    format: Optional[str] = None
    alphas: Optional[List[float]] = None
    holes: Optional[List[int]] = None
    nonlocals: Optional[List[float]] = None
    family: Optional[str] = None
    jobs: int = 1
    lbfgs: LbfgsConfig = field(default_factory=LbfgsConfig)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r} (expected one of {COMMANDS})")
        self.format = self.format or DEFAULT_FORMAT[self.command]

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        return cls(
            command=args.command,
            alpha=args.alpha,
            n_holes=args.n_holes,
            nonlocal_param=getattr(args, 'nonlocal'),
            slenderness=args.slenderness,
            order=args.order,
            points=args.points,
            grid=args.grid,
            galerkin_size=args.galerkin_size,
            galerkin_kind=args.galerkin_kind,
            inertia=args.inertia,
            method=args.method,
            seed=args.seed,
            samples=args.samples,
            output=args.output,
            format=args.format,
            alphas=getattr(args, 'alphas', None),
            holes=getattr(args, 'holes', None),
            nonlocals=getattr(args, 'nonlocals', None),
            family=getattr(args, 'family', None),
            jobs=getattr(args, 'jobs', 1),
        )

    def case(self) -> BeamCase:
        return BeamCase(self.alpha, self.n_holes, self.nonlocal_param, self.slenderness)


# --- Commands ---

def _static(cfg: RunConfig, samples: np.ndarray):
    return solve_static(cfg.case(), samples, method=cfg.method, lbfgs=cfg.lbfgs, seed=cfg.seed,
                        basis=MappedChebyshevBasis(cfg.order), collocation_count=cfg.points, grid=cfg.grid)


def _dynamic(cfg: RunConfig, samples: np.ndarray):
    return solve_dynamic(cfg.case(), samples, size=cfg.galerkin_size, kind=cfg.galerkin_kind,
                         inertia=cfg.inertia)


def run_static(cfg: RunConfig) -> pd.DataFrame:
    profile, _ = _static(cfg, sample_grid(cfg.samples))
    return pd.DataFrame({'X': profile.samples, 'W_static': profile.values})


def run_dynamic(cfg: RunConfig) -> pd.DataFrame:
    profile, mode = _dynamic(cfg, sample_grid(cfg.samples))
    return pd.DataFrame({'X': profile.samples, 'W_dynamic': profile.values, 'lambda': mode.frequency})


def run_ratio(cfg: RunConfig):
    samples = sample_grid(cfg.samples)
    static, _ = _static(cfg, samples)
    dynamic, _ = _dynamic(cfg, samples)
    report = ratio_profile(static, dynamic)
    if cfg.format == 'csv':
        return pd.DataFrame({'X': report.samples, 'ratio': report.ratios})
    return report.to_dict()


def run_sweep(cfg: RunConfig) -> pd.DataFrame:
    if cfg.family:
        cases = FAMILIES[cfg.family]()
    else:
        cases = grid_cases(cfg.alphas or [cfg.alpha], cfg.holes or [cfg.n_holes],
                           cfg.nonlocals or [cfg.nonlocal_param], cfg.slenderness)
    records = sweep(cases, galerkin_size=cfg.galerkin_size, inertia=cfg.inertia, n_jobs=cfg.jobs)
    return sweep_frame(records)


def _render(result, fmt: str) -> str:
    if isinstance(result, dict):
        return json.dumps(result, indent=2) + '\n'
    if fmt == 'csv':
        return result.to_csv(index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator='\n')
    return result.to_json(orient='records', indent=2, double_precision=15) + '\n'


def _emit(text: str, output: Optional[str]):
    if output:
        with open(output, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        logger.info("wrote %s", output)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    """Execute one command; 0 on success, 1 on a failed validation report, 2 on bad input."""
    try:
        status = 0
        if cfg.command == 'static':
            result = run_static(cfg)
        elif cfg.command == 'dynamic':
            result = run_dynamic(cfg)
        elif cfg.command == 'ratio':
            result = run_ratio(cfg)
        elif cfg.command == 'sweep':
            result = run_sweep(cfg)
        else:
            report = validate_tables(galerkin_size=cfg.galerkin_size, slenderness=cfg.slenderness)
            result = report.to_frame()
            status = 0 if report.passed else 1
    except (DomainError, UsageError) as e:
        logger.error("%s", e)
        return 2
    except (np.linalg.LinAlgError, ArithmeticError) as e:
        logger.error("numerical failure: %s", e)
        return 1

    try:
        _emit(_render(result, cfg.format), cfg.output)
    except OSError as e:
        logger.error("cannot write %s: %s", cfg.output, e)
        return 2
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(with_config(sys.argv[1:] if argv is None else argv, parser))
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    return run(RunConfig.from_args(args))


if __name__ == "__main__":
    sys.exit(main())
