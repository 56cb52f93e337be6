"""Command-line entry point.

Settings come from built-in defaults, then an optional TOML file given with
``--config``, then command-line flags. File keys mirror the long flag names
with underscores and may sit at top level or in any table, e.g.::

    [scenario]
    bandwidth_hz = 10e6
    rate_bps = 30561

    [distribution]
    users = 3
    channel_factors = [0.5, 1.5]
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .baselines import SCHEMES, equal_time_energy, unicast_partition
from .energy import ChannelState, ScenarioConfig, solve_state
from .geometry import GridConfig
from .grouping import ViewState, build_partition
from .quality import SEARCH_BUDGET, max_total_tiles
from .states import StateDistribution
from .sweep import SweepSpec, run_sweep, write_allocation_csv, write_sweep_csv
from .validation import run_checks

log = logging.getLogger("vrmulticast")

SCENARIO_KEYS = ("bandwidth_hz", "noise_w", "frame_s", "rate_bps")
GRID_KEYS = ("n_h", "n_v", "v_h", "v_v", "fov_h", "fov_v", "margin")

DEFAULTS = {
    **{k: getattr(ScenarioConfig(), k) for k in SCENARIO_KEYS},
    **{k: getattr(GridConfig(), k) for k in GRID_KEYS},
    "users": 3,
    "gamma": 0.8,
    "path_loss": 1e-6,
    "channel_factors": [0.5, 1.5],
    "channel_probs": [0.5, 0.5],
    "seed": 0,
    "samples": 100_000,
    "exact": None,
    "output": None,
    "e_limit": 0.1,
    "workers": 1,
    "budget": SEARCH_BUDGET,
    "schemes": list(SCHEMES),
    "instances": 200,
    "scheme": "proposed",
}

SWEEP_DEFAULTS = {
    "energy-sweep": ("gamma", [0.0, 0.5, 1.0, 1.5, 2.0]),
    "quality-sweep": ("d", [0.5e-6, 1.0e-6, 1.5e-6, 2.0e-6]),
}


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _directions(text):
    out = []
    for part in text.split(";"):
        r, c = part.split(",")
        out.append((int(r), int(c)))
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML file with default settings")
    s = p.add_argument_group("scenario")
    s.add_argument("--bandwidth-hz", type=float)
    s.add_argument("--noise-w", type=float)
    s.add_argument("--frame-s", type=float)
    s.add_argument("--rate-bps", type=float, help="per-tile encoding rate D")
    g = p.add_argument_group("grid")
    for k in ("n-h", "n-v", "v-h", "v-v"):
        g.add_argument(f"--{k}", type=int)
    for k in ("fov-h", "fov-v", "margin"):
        g.add_argument(f"--{k}", type=float)
    d = p.add_argument_group("distribution")
    d.add_argument("--users", type=int)
    d.add_argument("--gamma", type=float, help="Zipf exponent")
    d.add_argument("--path-loss", type=float, help="channel scale d")
    d.add_argument("--channel-factors", type=_floats, help="comma list, H = factor * d")
    d.add_argument("--channel-probs", type=_floats)
    r = p.add_argument_group("run")
    r.add_argument("--seed", type=int)
    r.add_argument("--samples", type=int)
    r.add_argument("--exact", action="store_const", const=True,
                   help="enumerate every state when the support is small enough")
    r.add_argument("--output", help="CSV path (default stdout)")
    r.add_argument("--e-limit", type=float, help="energy budget in J")
    r.add_argument("--workers", type=int)
    r.add_argument("--budget", type=int, help="max direction multisets to search")
    r.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vrmulticast", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-state", help="allocate one (directions, channels) state")
    _common(p)
    p.add_argument("--directions", type=_directions, required=True,
                   help="row,col per user separated by ';' (1-based)")
    p.add_argument("--channels", type=_floats, required=True, help="comma list of H_k")
    p.add_argument("--scheme", choices=SCHEMES)

    for name, help_ in (("energy-sweep", "average energy vs a parameter"),
                        ("quality-sweep", "encoding rate vs a parameter")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.add_argument("--param", choices=("gamma", "d"))
        p.add_argument("--values", type=_floats)
        p.add_argument("--schemes", type=lambda s: s.split(","))

    p = sub.add_parser("max-tiles", help="largest number of distinct requested tiles")
    _common(p)

    p = sub.add_parser("validate", help="check optimality invariants on random states")
    _common(p)
    p.add_argument("--instances", type=int)
    return parser


def _flatten(doc, out=None):
    out = {} if out is None else out
    for k, v in doc.items():
        if isinstance(v, dict):
            _flatten(v, out)
        else:
            out[k.replace("-", "_")] = v
    return out


def resolve(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    if args.command in SWEEP_DEFAULTS:
        settings["param"], settings["values"] = SWEEP_DEFAULTS[args.command]
    if getattr(args, "config", None):
        with open(args.config, "rb") as fh:
            settings.update(_flatten(tomllib.load(fh)))
    for k, v in vars(args).items():
        if v is not None and k != "config":
            settings[k] = v
    return settings


def _scenario(s):
    return ScenarioConfig(**{k: float(s[k]) for k in SCENARIO_KEYS})


def _grid(s):
    return GridConfig(**{k: s[k] for k in GRID_KEYS})


def _dist(s):
    return StateDistribution(
        grid=_grid(s),
        users=int(s["users"]),
        gamma=float(s["gamma"]),
        path_loss=float(s["path_loss"]),
        channel_factors=tuple(s["channel_factors"]),
        channel_probs=tuple(s["channel_probs"]),
    )


@contextlib.contextmanager
def _out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    s = resolve(args)
    scenario = _scenario(s)

    if args.command == "solve-state":
        grid = _grid(s)
        x = ViewState.of(s["directions"])
        h = ChannelState.of(s["channels"])
        if len(h) != len(x):
            raise SystemExit("need one channel value per user")
        if s["scheme"] == "baseline1":
            part = unicast_partition(grid, x)
            alloc = solve_state(scenario, part, h)
        else:
            part = build_partition(grid, x)
            alloc = (equal_time_energy(scenario, part, h) if s["scheme"] == "baseline2"
                     else solve_state(scenario, part, h))
        with _out(s["output"]) as fh:
            write_allocation_csv(part, alloc, fh)
        log.info("total energy %.12g J", alloc.energy)
        return 0

    if args.command in SWEEP_DEFAULTS:
        objective = "energy" if args.command == "energy-sweep" else "quality"
        spec = SweepSpec(
            param=s["param"],
            values=tuple(float(v) for v in s["values"]),
            schemes=tuple(s["schemes"]),
            objective=objective,
            exact=s["exact"],
            samples=int(s["samples"]),
            seed=int(s["seed"]),
        )
        rows = run_sweep(spec, scenario, _dist(s), e_limit=float(s["e_limit"]),
                         workers=int(s["workers"]), budget=int(s["budget"]))
        with _out(s["output"]) as fh:
            write_sweep_csv(rows, fh)
        return 1 if any(r.error for r in rows) else 0

    if args.command == "max-tiles":
        mt = max_total_tiles(_grid(s), int(s["users"]), int(s["budget"]), seed=int(s["seed"]))
        state = ";".join(f"{d.row},{d.col}" for d in mt.state)
        with _out(s["output"]) as fh:
            fh.write("count,exact,evaluated,state\n")
            fh.write(f"{mt.count},{str(mt.exact).lower()},{mt.evaluated},{state}\n")
        return 0

    if args.command == "validate":
        results = run_checks(scenario, _dist(s), int(s["instances"]), int(s["seed"]))
        with _out(s["output"]) as fh:
            for r in results:
                fh.write(r.line() + "\n")
        return 0 if all(r.ok for r in results) else 1

    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
