"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 a verified quantity relied on unreliable tail estimates.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from typing import Any, Sequence

import numpy as np

from . import __version__
from .constellation import Constellation, ConstellationError, parse_constellation
from .convexity import (
    VerifyConfig, evaluate_quantity, find_inflections, sweep, thresholds, verify,
)
from .error_rates import simulate
from .gaussian_core import DEFAULT_BUDGET, METHODS
from .geometry import summarize
from .reports import header, render_csv, render_json, write_atomic

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_UNRELIABLE = 0, 1, 2, 3
MIN_BUDGET = 1000
COMMANDS = ("info", "thresholds", "pep", "ser", "ber", "sweep", "inflections", "verify", "simulate")
TABULAR = ("pep", "ser", "ber", "sweep", "simulate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_grid(text: str) -> tuple[np.ndarray, dict[str, Any]]:
    """``start:stop:count[:log]`` or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])]), {"start": float(parts[0]), "stop": float(parts[0]),
                                                  "count": 1, "scale": "single"}
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
            raise ValueError
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"bad grid {text!r}; use start:stop:count[:log] or a single value") from None
    if count < 1 or (count > 1 and not stop > start):
        raise UsageError(f"grid {text!r} needs count >= 1 and stop > start")
    scale = "log" if len(parts) == 4 and parts[3] == "log" else "linear"
    if scale == "log":
        if start <= 0:
            raise UsageError("log grids need positive bounds")
        g = np.geomspace(start, stop, count)
    else:
        g = np.linspace(start, stop, count)
    return g, {"start": start, "stop": stop, "count": count, "scale": scale}


@dataclass
class RunConfig:
    command: str
    constellation: str
    variable: str | None = None
    grid_spec: str | None = None
    grid_units: str | None = None
    pair: tuple[int, ...] | None = None
    quantity: str | None = None
    budget: int = DEFAULT_BUDGET
    trials: int | None = None
    seed: int = 0
    method: str = "auto"
    output: str | None = None
    format: str = "json"

    def echo(self) -> dict[str, Any]:
        d = asdict(self)
        d.pop("output")
        d["pair"] = list(self.pair) if self.pair else None
        return d


def _grid(cfg: RunConfig) -> np.ndarray:
    if cfg.grid_spec is None:
        raise UsageError(f"{cfg.command} needs --snr, --snr-db or --noise-power")
    g, _ = parse_grid(cfg.grid_spec)
    if cfg.grid_units == "db":
        g = 10.0 ** (g / 10.0)
    if np.any(g <= 0):
        raise UsageError("grid values must be positive")
    return g


def _quantity(cfg: RunConfig, c: Constellation, kind: str | None = None) -> str:
    kind = kind or cfg.quantity
    if kind is None:
        raise UsageError(f"{cfg.command} needs --quantity")
    pair = cfg.pair
    if kind == "pep":
        if not pair or len(pair) != 2:
            raise UsageError("pep needs --pair i,j")
        return f"pep:{pair[0]},{pair[1]}"
    if kind == "ser":
        if pair and len(pair) != 1:
            raise UsageError("ser takes --pair i (one index) for a per-point rate")
        return f"ser_point:{pair[0]}" if pair else "ser"
    if kind == "ber":
        if pair:
            raise UsageError("ber does not take --pair")
        if not c.has_labels:
            raise ConstellationError(f"BER needs bit labels; constellation {c.name!r} has none")
        return "ber"
    raise UsageError(f"unknown quantity {kind!r}")


def _geometry_inputs(c: Constellation) -> dict[str, Any]:
    geo = summarize(c)
    return {"name": c.name, "M": c.M, "n": c.n, "normalized": c.normalized,
            "average_energy": c.average_energy, "labels": c.has_labels, **geo.to_dict()}


def run(cfg: RunConfig) -> tuple[dict[str, Any], list[dict[str, Any]] | None, int]:
    """Execute one command; returns (body, csv rows or None, exit status)."""
    if cfg.budget < MIN_BUDGET:
        raise UsageError(f"--budget must be >= {MIN_BUDGET}")
    if cfg.format == "csv" and cfg.command not in TABULAR:
        raise UsageError(f"{cfg.command} has no CSV form; use --format json")
    c = parse_constellation(cfg.constellation)
    body: dict[str, Any] = {"command": cfg.command, "config": cfg.echo(), "version": __version__,
                            "constellation": _geometry_inputs(c)}
    rows = None
    status = EXIT_OK
    variable = cfg.variable or "snr"

    if cfg.command == "info":
        body["result"] = {"points": c.points, "labels": c.labels, "priors": c.priors,
                          "regions": [r.to_dict() for r in summarize(c).regions]}
    elif cfg.command == "thresholds":
        body["result"] = thresholds(c).to_dict()
    elif cfg.command in ("pep", "ser", "ber"):
        q = _quantity(cfg, c, cfg.command)
        rows, results = [], []
        for x in _grid(cfg):
            e = evaluate_quantity(c, q, variable, float(x), cfg.budget, cfg.seed, cfg.method,
                                  fd=False).value
            results.append({"x": float(x), **e.to_dict()})
            rows.append({"variable": variable, "value": float(x), "quantity": q,
                         "estimate": e.value, "std_error": e.std_error, "method": e.method,
                         "flags": ";".join(e.flags)})
        body["result"] = {"quantity": q, "variable": variable, "estimates": results}
    elif cfg.command in ("sweep", "inflections"):
        q = _quantity(cfg, c)
        grid = _grid(cfg)
        if grid.size > 1 and np.any(np.diff(grid) <= 0):
            raise UsageError("sweep grids must be strictly increasing")
        s = sweep(c, q, variable, grid, cfg.budget, cfg.seed, cfg.method,
                  fd=cfg.command == "sweep")
        if cfg.command == "sweep":
            body["result"] = s.to_dict()
            rows = s.rows()
        else:
            body["result"] = {"quantity": q, "variable": variable, "grid": grid,
                              **find_inflections(s).to_dict()}
    elif cfg.command == "verify":
        rep = verify(c, VerifyConfig(budget=cfg.budget, seed=cfg.seed, method=cfg.method))
        body["result"] = rep.to_dict()
        if not rep.passed:
            status = EXIT_VERIFY
        elif not rep.reliable:
            status = EXIT_UNRELIABLE
    elif cfg.command == "simulate":
        if not cfg.trials or cfg.trials < 1:
            raise UsageError("simulate needs --trials N (N >= 1)")
        if variable != "snr":
            raise UsageError("simulate takes --snr or --snr-db")
        rows, results = [], []
        for k, x in enumerate(_grid(cfg)):
            sim = simulate(c, float(x), cfg.trials, seed=[cfg.seed, k])
            entry = {"x": float(x)}
            for name, e in sim.items():
                entry[name] = None if e is None else e.to_dict()
                if e is not None:
                    rows.append({"variable": "snr", "value": float(x), "quantity": f"simulated_{name}",
                                 "estimate": e.value, "std_error": e.std_error, "method": e.method,
                                 "flags": ";".join(e.flags)})
            results.append(entry)
        body["result"] = {"trials": cfg.trials, "estimates": results}
    else:
        raise UsageError(f"unknown command {cfg.command!r}")
    return body, rows, status


def _pair(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad index list {text!r}; use i,j") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="berconvex", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--constellation", required=True,
                       help="family[:M[:mapping]] (bpsk, psk, pam, qam, qpsk) or file:PATH")
        g = s.add_mutually_exclusive_group()
        g.add_argument("--snr", help="linear SNR grid: start:stop:count[:log] or a value")
        g.add_argument("--snr-db", help="SNR grid in dB")
        g.add_argument("--noise-power", help="noise power grid")
        s.add_argument("--pair", type=_pair, help="i,j for pep; i for a per-point ser (0-based)")
        s.add_argument("--quantity", choices=("pep", "ser", "ber"))
        s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        s.add_argument("--trials", type=int)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--method", choices=METHODS, default="auto")
        s.add_argument("--output", help="write here instead of stdout")
        s.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def config_from_args(a: argparse.Namespace) -> RunConfig:
    variable = grid = units = None
    if a.snr is not None:
        variable, grid, units = "snr", a.snr, "linear"
    elif a.snr_db is not None:
        variable, grid, units = "snr", a.snr_db, "db"
    elif a.noise_power is not None:
        variable, grid, units = "noise", a.noise_power, "linear"
    return RunConfig(a.command, a.constellation, variable, grid, units, a.pair, a.quantity,
                     a.budget, a.trials, a.seed, a.method, a.output, a.format)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    try:
        body, rows, status = run(cfg)
    except (UsageError, ConstellationError, ValueError, IndexError, OSError) as exc:
        print(f"berconvex {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    head = header(__version__)
    text = render_csv(rows, head) if cfg.format == "csv" else render_json(body, head)
    if cfg.output:
        write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
