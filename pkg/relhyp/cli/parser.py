"""argparse surface: subcommands, shared flags and conversion to :class:`RunConfig`."""

from __future__ import annotations

import argparse
from typing import Any, get_args

from relhyp.models.run_config import CheckName, RunConfig

RUN_COMMANDS = ("gen", "cosets", "bowditch", "coneoff", "check", "divergence", "treeapprox")

# namespace attributes that are parser plumbing, not run configuration
_PLUMBING = frozenset({"command", "check", "history_action", "report", "record_id",
                       "symbol", "verdict", "limit", "offset", "history_command"})


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected integers like 4,5,6, got {text!r}") from exc


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected numbers like 2,4,8, got {text!r}") from exc


def _model_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    g.add_argument("--family", "--group", dest="group", metavar="EXPR",
                   help="group family expression, e.g. free2, z2, free_product(z2,free1)")
    g.add_argument("--group-config", help="group configuration file")
    g.add_argument("--radius", type=int)
    g.add_argument("--radii", type=_ints, help="comma-separated radii, one run per radius")
    g.add_argument("--coset", dest="cosets", action="append", default=[],
                   help="subgroup letters, optionally ':representative' (repeatable)")
    g.add_argument("--min-coset-size", type=int)
    g.add_argument("--graph", help="graph file")
    g.add_argument("--peripherals", help="peripheral family file")
    return p


def _input_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("auxiliary inputs")
    g.add_argument("--paths", help="path file")
    g.add_argument("--pair", dest="pairs", nargs=2, action="append", default=[],
                   metavar=("A", "B"), help="two standard-path files (repeatable)")
    g.add_argument("--gg-family", help="guessed-geodesics family file")
    g.add_argument("--tree-graded", help="tree-graded space file to verify")
    g.add_argument("--points", type=_ints, help="configuration points")
    g.add_argument("--members", type=_ints, help="configuration peripheral indices")
    return p


def _numeric_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("parameters")
    g.add_argument("--K", type=float)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--M", type=float)
    g.add_argument("--mu", type=float)
    g.add_argument("--c", type=float)
    g.add_argument("--R-grid", dest="R_grid", type=_floats)
    g.add_argument("--L-grid", dest="L_grid", type=_floats)
    g.add_argument("--k", type=float, help="net spacing")
    g.add_argument("--R-net", dest="R_net", type=float, help="approximation-graph radius")
    g.add_argument("--depth", type=int, help="horoball depth")
    g.add_argument("--atg-delta", type=float)
    g.add_argument("--delta", type=float, help="divergence ball factor in (0, 1)")
    g.add_argument("--gamma", type=float, help="divergence ball offset")
    g.add_argument("--closed-ball", action="store_true", default=None)
    g.add_argument("--n-max", type=int)
    g.add_argument("--margin", type=int, help="boundary margin of the interior pool")
    g.add_argument("--cap", type=float)
    g.add_argument("--pool-size", type=int)
    return p


def _run_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("execution and output")
    g.add_argument("--mode", choices=("exhaustive", "sample"))
    g.add_argument("--count", type=int, help="samples in sample mode")
    g.add_argument("--seed", type=int)
    g.add_argument("--threads", type=int)
    g.add_argument("--out", help="report path (default: REPORT_DIR/<command>.json)")
    g.add_argument("--csv", help="CSV path for curves and series")
    g.add_argument("--save-graph")
    g.add_argument("--save-family")
    g.add_argument("--store", action="store_true", default=None,
                   help="also persist the report in the report database")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relhyp",
        description="Audit relative hyperbolicity characterizations on finite graph models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    parents = [_model_flags(), _input_flags(), _numeric_flags(), _run_flags()]

    for name in RUN_COMMANDS:
        cmd = sub.add_parser(name, parents=parents)
        if name == "check":
            cmd.add_argument("check", choices=get_args(CheckName))

    replay = sub.add_parser("replay", help="re-run the config echoed in a report")
    replay.add_argument("report")
    replay.add_argument("--out")
    replay.add_argument("--csv")
    replay.add_argument("--store", action="store_true", default=None)

    history = sub.add_parser("history", help="inspect the report database")
    actions = history.add_subparsers(dest="history_action", required=True)
    listing = actions.add_parser("list")
    listing.add_argument("--command", dest="history_command", choices=RUN_COMMANDS)
    listing.add_argument("--check", choices=get_args(CheckName))
    listing.add_argument("--verdict")
    listing.add_argument("--limit", type=int, default=20)
    listing.add_argument("--offset", type=int, default=0)
    trail = actions.add_parser("trail", help="one constant across stored runs")
    trail.add_argument("history_command", choices=RUN_COMMANDS)
    trail.add_argument("symbol")
    trail.add_argument("--check", choices=get_args(CheckName))
    delete = actions.add_parser("delete")
    delete.add_argument("record_id", type=int)
    return parser


def to_config_data(ns: argparse.Namespace) -> dict[str, Any]:
    """Flags the user actually set; unset flags fall back to :class:`RunConfig` defaults."""
    data: dict[str, Any] = {"command": ns.command, "check": getattr(ns, "check", None)}
    for key, value in vars(ns).items():
        if key in _PLUMBING or value is None:
            continue
        if key in ("cosets", "pairs") and not value:
            continue
        data[key] = tuple(tuple(v) for v in value) if key == "pairs" else value
    return data


def to_config(ns: argparse.Namespace) -> RunConfig:
    return RunConfig.model_validate(to_config_data(ns))
