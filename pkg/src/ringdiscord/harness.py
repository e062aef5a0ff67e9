"""Parameter sweeps, numeric-vs-analytic comparison and regime maps.

Run ``python -m ringdiscord --help`` for the command-line interface.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from . import analytic, qinfo
from .analytic import ARCTAN_SQRT2, Regime, classify_regime, gamma_boundaries
from .errors import DomainError, NotAStateError, RegimeError, StateValidityError
from .state import RingGeometry, SystemConfig

MODES = ("numeric", "analytic", "compare", "region-map")
FORMATS = ("csv", "json")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    num_spins: tuple[int, ...]
    beta: float
    omega_a: float
    omega_b: float
    g: float = 1.0
    tau_start: float = 0.0
    tau_end: float = math.pi / 2
    tau_steps: int = 21
    gammas: Optional[tuple[float, ...]] = None
    mode: str = "compare"
    unchecked: bool = False
    with_dipolar: bool = False
    dipolar_d0: float = 1.0
    seed: Optional[int] = None
    grid: tuple[int, int] = (64, 128)

    def validate(self) -> None:
        if not self.num_spins:
            raise UsageError("num_spins: at least one value is required")
        if self.tau_steps < 2:
            raise UsageError(f"tau_steps: must be >= 2, got {self.tau_steps}")
        if self.mode not in MODES:
            raise UsageError(f"mode: must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.gammas is not None and not all(gm > 0 for gm in self.gammas):
            raise UsageError("gamma: values must be positive")
        for n, gm in self.points_nt():
            try:
                self.config(n, gm)
            except DomainError as exc:
                raise UsageError(f"num_spins={n}, gamma={gm:g}: {exc}") from exc

    def taus(self) -> np.ndarray:
        return np.linspace(self.tau_start, self.tau_end, self.tau_steps)

    def points_nt(self) -> Iterator[tuple[int, float]]:
        gammas = self.gammas if self.gammas is not None else (self.omega_a / self.omega_b,)
        return itertools.product(self.num_spins, gammas)

    def grid_points(self) -> list[tuple[int, float, float]]:
        """``(N, gamma, tau)`` triples in lexicographic grid order."""
        return [(n, gm, float(t)) for (n, gm), t in itertools.product(self.points_nt(), self.taus())]

    def config(self, num_spins: int, gamma: float) -> SystemConfig:
        omega_a = gamma * self.omega_b if self.gammas is not None else self.omega_a
        if self.unchecked:
            return SystemConfig.unchecked(num_spins, self.beta, omega_a, self.omega_b, self.g)
        return SystemConfig(num_spins, self.beta, omega_a, self.omega_b, self.g)

    def geometry(self, num_spins: int) -> Optional[RingGeometry]:
        if not self.with_dipolar:
            return None
        if self.seed is None:
            return RingGeometry.regular(num_spins - 1, self.dipolar_d0)
        rng = np.random.default_rng([self.seed, num_spins])
        return RingGeometry.random(num_spins - 1, self.dipolar_d0, rng)


@dataclass
class SweepRow:
    N: int
    gamma: float
    tau: float
    D_numeric: Optional[float] = None
    C_numeric: Optional[float] = None
    I_numeric: Optional[float] = None
    D_ht: Optional[float] = None
    C_ht: Optional[float] = None
    regime: str = Regime.UNCLASSIFIED.value
    n_opt_x: Optional[float] = None
    n_opt_y: Optional[float] = None
    n_opt_z: Optional[float] = None
    abs_dev: Optional[float] = None
    rel_dev: Optional[float] = None


SWEEP_FIELDS = tuple(f.name for f in fields(SweepRow))


def _regime_or_unclassified(config: SystemConfig, tau: float) -> analytic.RegimeTag:
    try:
        return classify_regime(config, tau)
    except DomainError:
        return analytic.RegimeTag(Regime.UNCLASSIFIED, "tau outside [0, pi/2]")


def evaluate_point(spec: SweepSpec, num_spins: int, gamma: float, tau: float) -> SweepRow:
    config = spec.config(num_spins, gamma)
    row = SweepRow(N=num_spins, gamma=gamma, tau=tau)
    tag = _regime_or_unclassified(config, tau)
    row.regime = tag.regime.value
    if spec.mode in ("analytic", "compare") and tag.regime is not Regime.UNCLASSIFIED:
        row.D_ht = analytic.DISCORD_FORMULAS[tag.regime](config, tau)
        row.C_ht = analytic.CLASSICAL_FORMULAS[tag.regime](config, tau)
    if spec.mode in ("numeric", "compare"):
        rep = qinfo.numeric_correlations(config, tau, spec.geometry(num_spins), grid=spec.grid)
        row.D_numeric, row.C_numeric, row.I_numeric = rep.discord, rep.classical, rep.mutual_information
        row.n_opt_x, row.n_opt_y, row.n_opt_z = (float(c) for c in rep.optimal_direction.as_array())
    if row.D_numeric is not None and row.D_ht is not None:
        row.abs_dev = abs(row.D_numeric - row.D_ht)
        row.rel_dev = row.abs_dev / max(row.D_ht, 1e-30)
    return row


def _evaluate_star(args):
    return evaluate_point(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """Evaluate every grid point; rows come back in grid order for any ``jobs``."""
    spec.validate()
    tasks = [(spec, *p) for p in spec.grid_points()]
    if jobs <= 1 or len(tasks) <= 1:
        return [_evaluate_star(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate_star, tasks))


@dataclass
class RegionCell:
    N: int
    gamma: float
    tau: float
    regime: str
    near_boundary: bool
    interior: bool
    numeric_axis: Optional[str] = None
    agrees: Optional[bool] = None


REGION_FIELDS = tuple(f.name for f in fields(RegionCell))


@dataclass
class RegionMap:
    num_spins: int
    u: float
    cells: list[RegionCell]
    boundaries: dict[str, float]
    cell_width: tuple[float, float]
    check_numeric: bool = False

    @property
    def mismatches(self) -> list[RegionCell]:
        return [c for c in self.cells if c.agrees is False]

    @property
    def checked(self) -> list[RegionCell]:
        return [c for c in self.cells if c.agrees is not None]

    def metadata(self) -> dict:
        return {
            "N": self.num_spins,
            "u": self.u,
            "cell_width_gamma": self.cell_width[0],
            "cell_width_tau": self.cell_width[1],
            "boundaries": self.boundaries,
            "checked_cells": len(self.checked),
            "mismatches": len(self.mismatches),
        }


def region_boundaries(num_spins: int) -> dict[str, float]:
    """Boundary lines of the regime map: critical ``gamma`` values and ``tau`` cuts."""
    out = {f"gamma_{k}": v for k, v in gamma_boundaries(num_spins).items()}
    out["tau_quarter_pi"] = math.pi / 4
    out["tau_arctan_sqrt2"] = ARCTAN_SQRT2
    return out


def _cell_centers(lo: float, hi: float, count: int) -> tuple[np.ndarray, float]:
    width = (hi - lo) / count
    return lo + (np.arange(count) + 0.5) * width, width


def region_map(
    num_spins: int,
    gamma_range: tuple[float, float] = (0.1, 3.0),
    tau_range: tuple[float, float] = (0.0, math.pi / 2),
    resolution: int | tuple[int, int] = 40,
    check_numeric: bool = False,
    u: float = 0.05,
    grid: tuple[int, int] = (64, 128),
) -> RegionMap:
    """Classify each ``(gamma, tau)`` cell, optionally against the numeric argmin.

    Cells are centred in a ``resolution`` grid. A cell is ``interior`` when it
    lies at least one cell width from every boundary line. With
    ``check_numeric`` the brute-force minimizing direction is computed for
    each interior tagged cell and its dominant axis compared with the tag.
    """
    if num_spins < 3:
        raise DomainError(f"region map needs N >= 3, got {num_spins}")
    res_g, res_t = (resolution, resolution) if isinstance(resolution, int) else resolution
    gammas, dg = _cell_centers(*gamma_range, res_g)
    taus, dt = _cell_centers(*tau_range, res_t)
    bounds = region_boundaries(num_spins)
    g_lines = [v for k, v in bounds.items() if k.startswith("gamma_")]
    t_lines = [bounds["tau_quarter_pi"], bounds["tau_arctan_sqrt2"]]

    cells = []
    for gm in gammas:
        config = SystemConfig.from_ht_parameters(num_spins, u, gm * u)
        for tau in taus:
            tag = classify_regime(config, float(tau))
            interior = all(abs(gm - b) >= dg for b in g_lines) and all(abs(tau - b) >= dt for b in t_lines)
            cell = RegionCell(num_spins, float(gm), float(tau), tag.regime.value, tag.near_boundary, interior)
            if check_numeric and interior and tag.regime is not Regime.UNCLASSIFIED:
                rho = qinfo.evolved_state(config, float(tau))
                direction, _ = qinfo.minimize_conditional_entropy(rho, grid=grid)
                cell.numeric_axis = direction.dominant_axis()
                cell.agrees = cell.numeric_axis == tag.regime.axis
            cells.append(cell)
    return RegionMap(num_spins, u, cells, bounds, (dg, dt), check_numeric)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if not math.isfinite(value):
            return "null"
        return format(value, ".17g")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in value.items()) + "}"
    return json.dumps(value)


def render(rows: Sequence, fmt: str, header: Sequence[str], metadata: Optional[dict] = None) -> str:
    """Serialize dataclass rows; floats carry 17 significant digits."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            d = asdict(row)
            writer.writerow([_fmt(d[k]) for k in header])
        return buf.getvalue()
    if fmt == "json":
        objs = ["  " + _json_value({k: asdict(r)[k] for k in header}) for r in rows]
        body = "[\n" + ",\n".join(objs) + "\n]" if objs else "[]"
        if metadata is not None:
            return "{" + f'"metadata": {_json_value(metadata)}, "rows": {body}' + "}\n"
        return body + "\n"
    raise UsageError(f"format: must be one of {', '.join(FORMATS)}, got {fmt!r}")


def emit(rows: Iterable, fmt: str, path, header: Sequence[str] = SWEEP_FIELDS, metadata=None) -> None:
    """Write rows to ``path`` as CSV or JSON. ``path='-'`` writes to stdout."""
    text = render(list(rows), fmt, header, metadata)
    if str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text)


def parse_json_rows(text: str) -> list[dict]:
    data = json.loads(text)
    return data["rows"] if isinstance(data, dict) else data


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


_BOOL_FLAGS = {"unchecked", "with-dipolar", "check-numeric"}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ringdiscord", description="Quantum discord in a spin ring with a central spin.")
    p.add_argument("--config", help="file of key=value lines mirroring the flags")
    p.add_argument("--num-spins", type=_int_list, default=(3,), help="comma-separated list of N")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--omega-a", type=float, default=0.06)
    p.add_argument("--omega-b", type=float, default=0.03)
    p.add_argument("--coupling-g", type=float, default=1.0)
    p.add_argument("--tau-start", type=float, default=0.0, help="radians")
    p.add_argument("--tau-end", type=float, default=math.pi / 2, help="radians")
    p.add_argument("--tau-steps", type=int, default=21)
    p.add_argument("--gamma", type=_float_list, default=None, help="comma-separated omega_A/omega_B; overrides --omega-a")
    p.add_argument("--mode", choices=MODES, default="compare")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--output", default="-", help="output path, '-' for stdout")
    p.add_argument("--unchecked", action="store_true", help="skip the high-temperature validity check")
    p.add_argument("--with-dipolar", action="store_true", help="include the dipolar ring evolution")
    p.add_argument("--dipolar-d0", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=None, help="seed for a randomized ring geometry")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--grid", type=_int_list, default=(64, 128), help="theta,phi sphere grid")
    region = p.add_argument_group("region-map")
    region.add_argument("--gamma-min", type=float, default=0.1)
    region.add_argument("--gamma-max", type=float, default=3.0)
    region.add_argument("--resolution", type=int, default=40)
    region.add_argument("--u", type=float, default=0.05, help="central-spin HT parameter for the map")
    region.add_argument("--check-numeric", action="store_true")
    return p


def read_config_file(path: str) -> list[str]:
    """Turn ``key = value`` lines into argv tokens placed before the CLI flags."""
    argv = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-").lstrip("-")
        if key == "config":
            raise UsageError(f"config line {lineno}: nested config files are not supported")
        if key in _BOOL_FLAGS:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(f"--{key}")
            continue
        argv += [f"--{key}", value]
    return argv


def spec_from_args(args) -> SweepSpec:
    if len(args.grid) != 2:
        raise UsageError("grid: expected two integers theta,phi")
    return SweepSpec(
        num_spins=args.num_spins,
        beta=args.beta,
        omega_a=args.omega_a,
        omega_b=args.omega_b,
        g=args.coupling_g,
        tau_start=args.tau_start,
        tau_end=args.tau_end,
        tau_steps=args.tau_steps,
        gammas=args.gamma,
        mode=args.mode,
        unchecked=args.unchecked,
        with_dipolar=args.with_dipolar,
        dipolar_d0=args.dipolar_d0,
        seed=args.seed,
        grid=tuple(args.grid),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        return _run(parser, argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


def _run(parser: argparse.ArgumentParser, argv: list[str]) -> int:
    try:
        pre, _ = parser.parse_known_args(argv)
        if pre.config:
            argv = read_config_file(pre.config) + argv
        args = parser.parse_args(argv)
        if args.mode == "region-map":
            rmap = region_map(
                args.num_spins[0],
                (args.gamma_min, args.gamma_max),
                (args.tau_start, args.tau_end),
                args.resolution,
                check_numeric=args.check_numeric,
                u=args.u,
                grid=tuple(args.grid),
            )
            emit(rmap.cells, args.format, args.output, REGION_FIELDS, rmap.metadata() if args.format == "json" else None)
            if args.format == "csv" and args.output != "-":
                Path(f"{args.output}.meta.json").write_text(_json_value(rmap.metadata()) + "\n")
            return EXIT_OK
        rows = run_sweep(spec_from_args(args), jobs=args.jobs)
        emit(rows, args.format, args.output)
        return EXIT_OK
    except (UsageError, DomainError, RegimeError) as exc:
        print(f"ringdiscord: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StateValidityError, NotAStateError) as exc:
        print(f"ringdiscord: numeric validity error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"ringdiscord: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
