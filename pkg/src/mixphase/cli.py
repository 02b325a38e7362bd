"""Command-line front end: figure data as CSV/JSON and single-point phase queries.

Exit codes: 0 success, 1 invalid input (or I/O failure), 2 numeric failure.
Errors are reported on stderr as a one-line JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .errors import (BundleUndefinedError, MixphaseError, NumericError,
                     UndefinedAngleError, UndefinedPhaseError, UndefinedStateError)
from .interferometric import gibbs_curve, interferometric_phase
from .kitaev import (DEFAULT_M_GRID, DEFAULT_T_GRID, TWO_PI, ChainParams,
                     band_gap, gibbs_bloch_vectors, winding_number)
from .uhlmann import critical_temperatures, find_nodes, sech, uhlmann_phase_factor

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2
MIN_DENSITY = 64
SIGNIFICANT_DIGITS = 12

Row = dict


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


@dataclass(frozen=True)
class PhaseVerdict:
    """A geometric phase in {0, pi}, or undefined, with what produced it."""

    value: float | None
    source: str
    reason: str = ""

    @property
    def defined(self) -> bool:
        return self.value is not None

    @property
    def label(self) -> str:
        if self.value is None:
            return "undefined"
        return "pi" if math.isclose(abs(self.value), math.pi, abs_tol=1e-9) else format(
            self.value, f".{SIGNIFICANT_DIGITS}g")


# ---- formatting -------------------------------------------------------------

def _clean(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return None
        v = float(format(v, f".{SIGNIFICANT_DIGITS}g"))
        return 0.0 if v == 0.0 else v
    return v


def _csv_cell(v) -> str:
    v = _clean(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, f".{SIGNIFICANT_DIGITS}g")
    return str(v)


def render(rows: Sequence[Row], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        data = [{c: _clean(r.get(c)) for c in columns} for r in rows]
        return json.dumps(data, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_csv_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


# ---- grids ------------------------------------------------------------------

def parse_grid(text: str) -> list[float]:
    """Comma list ``a,b,c`` or inclusive range ``start:stop:count``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError
            values = np.linspace(start, stop, count).tolist()
        else:
            values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None
    if not values:
        raise ConfigError("grid is empty")
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"grid {text!r} has non-finite values")
    return values


def _m_values(args) -> list[float]:
    if getattr(args, "m", None) is not None:
        return [args.m]
    return parse_grid(args.m_grid)


def _t_values(args) -> list[float]:
    if getattr(args, "t", None) is not None:
        return [args.t]
    return parse_grid(args.t_grid)


def _require_positive_T(values):
    for T in values:
        if not T > 0:
            raise ConfigError(f"temperatures must be > 0, got {T!r}")


def _pool_map(fn: Callable, cells: Iterable, jobs: int) -> list:
    cells = list(cells)
    if jobs <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cells))


def _k_grid(density: int, turns: int = 1) -> np.ndarray:
    return np.linspace(0.0, TWO_PI * turns, density * turns + 1)


# ---- subcommands ------------------------------------------------------------

SPECTRUM_COLUMNS = ("m", "k", "delta_k")


def cmd_spectrum(args) -> list[Row]:
    ks = _k_grid(args.density)
    rows = []
    for m in _m_values(args):
        gaps = band_gap(ChainParams(m), ks)
        rows.extend({"m": m, "k": k, "delta_k": g} for k, g in zip(ks, gaps))
    return rows


BLOCH_COLUMNS = ("m", "T", "k", "r_x", "r_y")


def cmd_bloch_curves(args) -> list[Row]:
    Ts = _t_values(args)
    _require_positive_T(Ts)
    ks = _k_grid(args.density)
    rows = []
    for m in _m_values(args):
        for T in Ts:
            r = gibbs_bloch_vectors(ChainParams(m, T), ks)
            rows.extend({"m": m, "T": T, "k": k, "r_x": v[0], "r_y": v[1]}
                        for k, v in zip(ks, r))
    return rows


NODE_COLUMNS = ("m", "T", "x", "k_node", "turn", "x_at_node", "degenerate", "closed_curve")


def _temperature_for_x(m: float, x: float) -> float:
    """T with sech(Delta_0 / 2T) = x."""
    if not 0.0 < x < 1.0:
        raise ConfigError(f"x values must lie in (0, 1), got {x!r}")
    half_gap = float(band_gap(ChainParams(m), 0.0)) / 2.0
    return half_gap / math.acosh(1.0 / x)


def _node_cell(cell):
    m, T, x, turns, density = cell
    rows = []
    for n in find_nodes(ChainParams(m, T), turns, density):
        rows.append({"m": m, "T": T, "x": x, "k_node": n.k_node, "turn": n.turn,
                     "x_at_node": n.x_at_node, "degenerate": n.degenerate,
                     "closed_curve": n.closed_curve})
    return rows


def cmd_nodes(args) -> list[Row]:
    m = args.m if args.m is not None else 0.0
    if args.t is not None or args.t_grid is not None:
        Ts = _t_values(args)
        _require_positive_T(Ts)
        half_gap = float(band_gap(ChainParams(m), 0.0)) / 2.0
        pairs = [(T, sech(half_gap / T)) for T in Ts]
    else:
        pairs = [(_temperature_for_x(m, x), x) for x in parse_grid(args.x_grid)]
    cells = [(m, T, x, args.turns, args.density) for T, x in pairs]
    return [row for rows in _pool_map(_node_cell, cells, args.jobs) for row in rows]


CRITICAL_COLUMNS = ("m", "n1", "n2", "T", "x")


def _critical_cell(cell):
    m, turns = cell
    rows = []
    for n1 in range(1, turns + 1):
        for n2 in range(n1):
            for c in critical_temperatures(m, n1, n2):
                rows.append({"m": m, "n1": n1, "n2": n2, "T": c.T, "x": c.x})
    return rows


def cmd_critical_temps(args) -> list[Row]:
    ms = _m_values(args)
    for m in ms:
        if m < 0:
            raise ConfigError(f"m must be >= 0 for critical temperatures, got {m!r}")
    cells = [(m, args.turns) for m in ms]
    return [row for rows in _pool_map(_critical_cell, cells, args.jobs) for row in rows]


PHASE_COLUMNS = ("m", "T", "turns", "winding", "uhlmann_factor", "uhlmann_phase",
                 "uhlmann_reason", "gamma", "interferometric_phase",
                 "interferometric_reason")


def uhlmann_verdict(params: ChainParams, turns: int, density: int) -> tuple[int | None, PhaseVerdict]:
    try:
        factor = uhlmann_phase_factor(params, turns, density)
    except (UndefinedPhaseError, BundleUndefinedError) as exc:
        return None, PhaseVerdict(None, "uhlmann", str(exc))
    return factor, PhaseVerdict(math.pi if factor < 0 else 0.0, "uhlmann")


def interferometric_verdict(params: ChainParams, turns: int, density: int) -> PhaseVerdict:
    try:
        result = interferometric_phase(gibbs_curve(params, turns, density))
    except (UndefinedPhaseError, UndefinedStateError, UndefinedAngleError) as exc:
        return PhaseVerdict(None, "interferometric", str(exc))
    return PhaseVerdict(result.gamma, "interferometric")


def cmd_phase(args) -> list[Row]:
    if args.m is None or args.t is None:
        raise ConfigError("phase needs --m and --t")
    if args.t < 0:
        raise ConfigError(f"temperature must be >= 0, got {args.t!r}")
    params = ChainParams(args.m, args.t)
    try:
        winding = winding_number(params)
    except UndefinedAngleError:
        winding = None
    factor, uhl = uhlmann_verdict(params, args.turns, args.density)
    inter = interferometric_verdict(params, args.turns, args.density)
    return [{"m": args.m, "T": args.t, "turns": args.turns, "winding": winding,
             "uhlmann_factor": factor, "uhlmann_phase": uhl.label,
             "uhlmann_reason": uhl.reason, "gamma": inter.value,
             "interferometric_phase": inter.label,
             "interferometric_reason": inter.reason}]


COMMANDS = {
    "spectrum": (cmd_spectrum, SPECTRUM_COLUMNS),
    "bloch-curves": (cmd_bloch_curves, BLOCH_COLUMNS),
    "nodes": (cmd_nodes, NODE_COLUMNS),
    "critical-temps": (cmd_critical_temps, CRITICAL_COLUMNS),
    "phase": (cmd_phase, PHASE_COLUMNS),
}


def _grid_default(values) -> str:
    return ",".join(format(v, "g") for v in values)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mixphase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, density):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default="-", help="output file ('-' for stdout)")
        p.add_argument("--density", type=int, default=density,
                       help="grid points per Brillouin-zone turn")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")

    def m_opts(p, grid=True):
        p.add_argument("--m", type=float, default=None, help="single m = mu/2")
        if grid:
            p.add_argument("--m-grid", default=_grid_default(DEFAULT_M_GRID),
                           help="comma list or start:stop:count")

    def t_opts(p, grid_default):
        p.add_argument("--t", type=float, default=None, help="single temperature")
        p.add_argument("--t-grid", default=grid_default,
                       help="comma list or start:stop:count")

    p = sub.add_parser("spectrum", help="band gap Delta_k over the Brillouin zone")
    m_opts(p)
    common(p, 256)

    p = sub.add_parser("bloch-curves", help="equatorial Bloch curves of the Gibbs states")
    m_opts(p)
    t_opts(p, _grid_default(DEFAULT_T_GRID))
    common(p, 256)

    p = sub.add_parser("nodes", help="nodes of the Uhlmann holonomy trace")
    m_opts(p, grid=False)
    t_opts(p, None)
    p.add_argument("--x-grid", default="0.02:0.98:49",
                   help="values of sech(Delta_0 / 2T) (used when no T is given)")
    p.add_argument("--turns", type=int, default=5)
    common(p, 4096)

    p = sub.add_parser("critical-temps", help="critical temperatures T_{n1,n2}")
    m_opts(p)
    p.set_defaults(m_grid="0:1.5:31")
    p.add_argument("--turns", type=int, default=3, help="largest n1")
    common(p, 4096)

    p = sub.add_parser("phase", help="Uhlmann and interferometric phase at one point")
    m_opts(p, grid=False)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--turns", type=int, default=1)
    common(p, 4096)
    return parser


def _validate(args):
    if args.density < MIN_DENSITY:
        raise ConfigError(f"--density must be >= {MIN_DENSITY}, got {args.density}")
    if getattr(args, "turns", 1) < 1:
        raise ConfigError(f"--turns must be >= 1, got {args.turns}")
    if args.jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
    for name in ("m", "t"):
        v = getattr(args, name, None)
        if v is not None and not math.isfinite(v):
            raise ConfigError(f"--{name} must be finite")


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
        fn, columns = COMMANDS[args.command]
        rows = fn(args)
        _emit(render(rows, columns, args.format), args.out)
    except ConfigError as exc:
        return _fail("invalid_config", str(exc), EXIT_INVALID)
    except NumericError as exc:
        return _fail("numeric_failure", str(exc), EXIT_NUMERIC)
    except MixphaseError as exc:
        return _fail("invalid_input", str(exc), EXIT_INVALID)
    except OSError as exc:
        return _fail("io_error", str(exc), EXIT_INVALID)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
