"""CLI entrypoint: parse flags and config, run one command, map errors to exit codes."""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys
import tomllib
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NoReturn

from pyhopflink import codec
from pyhopflink.errors import GeometryError, InputError
from pyhopflink.grassmann import canonical_great_hopf, xi
from pyhopflink.pattern import IntersectionPattern, make_schedule, run_schedule
from pyhopflink.plgeom import (
    Ellipsoid,
    circle_polyline,
    crossing_linking_pl,
    extract_intersection_pattern,
    find_transverse_height,
    gauss_linking_pl,
)
from pyhopflink.retraction import (
    canonical_prism_point,
    frame_of,
    in_Y,
    retract_to_Y,
    retraction_stages,
)
from pyhopflink.roundlink import linking_number_round, orient_positively
from pyhopflink.sampling import random_link, spawn_generators
from pyhopflink.verify import SUITES, run_suites

logger = logging.getLogger(__name__)

EXIT_INPUT = 1
EXIT_GEOMETRY = 2
EXIT_VERIFY = 3

DEFAULTS: dict[str, Any] = {
    "seed": 20240601,
    "n": 1000,
    "tol": 1e-9,
    "mesh_res": 64,
    "h_min": 0.5,
    "h_max": 2.0,
    "decimals": 9,
}

# RunConfig field -> (TOML table, key)
_TOML_KEYS = {
    "seed": ("sampling", "seed"),
    "n": ("sampling", "n"),
    "tol": ("tolerances", "tol"),
    "mesh_res": ("mesh", "resolution"),
    "h_min": ("mesh", "h_min"),
    "h_max": ("mesh", "h_max"),
    "decimals": ("output", "decimals"),
}


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Validated settings for one invocation."""

    command: str
    inputs: tuple[str, ...]
    out: str | None
    seed: int
    n: int
    tol: float
    mesh_res: int
    h_min: float
    h_max: float
    decimals: int


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def _load_config(path: str) -> dict[str, Any]:
    """Read and parse a TOML config file."""
    p = Path(path)
    if not p.exists():
        sys.exit(f"Config file not found: {path}")
    try:
        with p.open("rb") as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as exc:
        sys.exit(f"Failed to parse config file: {exc}")


def _merge_settings(args: argparse.Namespace, file_config: dict[str, Any]) -> dict[str, Any]:
    """Flags override the config file, which overrides the defaults."""
    values = dict(DEFAULTS)
    for name, (table, key) in _TOML_KEYS.items():
        section = file_config.get(table, {})
        if isinstance(section, dict) and key in section:
            values[name] = section[key]
    for name in _TOML_KEYS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return values


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


def _validate_config(values: dict[str, Any]) -> dict[str, Any]:
    """Check every setting and abort once with all problems listed."""
    errors: list[str] = []

    if not _is_int(values["seed"]) or values["seed"] < 0:
        errors.append("sampling.seed must be a non-negative integer")
    if not _is_int(values["n"]) or values["n"] < 1:
        errors.append("sampling.n must be an integer >= 1")
    if not _is_number(values["tol"]) or values["tol"] <= 0:
        errors.append("tolerances.tol must be positive")
    if not _is_int(values["mesh_res"]) or values["mesh_res"] < 8:
        errors.append("mesh.resolution must be an integer >= 8")
    if not _is_int(values["decimals"]) or not 0 <= values["decimals"] <= 17:
        errors.append("output.decimals must be an integer in [0, 17]")

    h_min, h_max = values["h_min"], values["h_max"]
    if not _is_number(h_min) or not _is_number(h_max):
        errors.append("mesh.h_min and mesh.h_max must be numbers")
    elif not 0 < h_min < h_max:
        errors.append(f"mesh heights must satisfy 0 < h_min < h_max, got [{h_min}, {h_max}]")

    if errors:
        sys.exit("Config validation failed:\n  " + "\n  ".join(errors))
    return values


def _build_run_config(args: argparse.Namespace) -> RunConfig:
    file_config = _load_config(args.config) if args.config else {}
    values = _validate_config(_merge_settings(args, file_config))
    inputs = (args.input,) if getattr(args, "input", None) else ()
    return RunConfig(
        command=args.command,
        inputs=inputs,
        out=args.out,
        seed=values["seed"],
        n=values["n"],
        tol=float(values["tol"]),
        mesh_res=values["mesh_res"],
        h_min=float(values["h_min"]),
        h_max=float(values["h_max"]),
        decimals=values["decimals"],
    )


# ---------------------------------------------------------------------------
# IO helpers
# ---------------------------------------------------------------------------


def _read_json(path: str) -> Any:
    with Path(path).open(encoding="utf-8") as f:
        return json.load(f)


def _emit(cfg: RunConfig, text: str) -> None:
    """Write *text* to ``--out`` or stdout."""
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
        logger.info("Wrote %s", cfg.out)
    else:
        sys.stdout.write(text)


def _emit_json(cfg: RunConfig, doc: Any) -> None:
    _emit(cfg, codec.dumps(doc) + "\n")


def _format_lk(value: int) -> str:
    return "0" if value == 0 else f"{value:+d}"


def _pattern_from_scene(cfg: RunConfig, doc: Any) -> tuple[IntersectionPattern, float]:
    scene = codec.scene_from_json(doc, cfg.mesh_res)
    h_min, h_max = scene.h_range if scene.h_range is not None else (cfg.h_min, cfg.h_max)
    h = find_transverse_height(scene.mesh, scene.equator, h_min, h_max)
    return extract_intersection_pattern(scene.mesh, Ellipsoid(scene.equator, h)), h


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_lk(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Handle the 'lk' subcommand."""
    a, b = codec.circles_from_json(_read_json(cfg.inputs[0]))
    if args.method == "round":
        value = linking_number_round(a, b, cfg.tol)
    else:
        pa, pb = circle_polyline(a, args.sides), circle_polyline(b, args.sides)
        value = gauss_linking_pl(pa, pb) if args.method == "gauss" else crossing_linking_pl(pa, pb)
    _emit(cfg, _format_lk(value) + "\n")


def _cmd_canon(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Handle the 'canon' subcommand."""
    link = codec.link_from_json(_read_json(cfg.inputs[0]))
    _emit_json(cfg, codec.prism_to_json(canonical_prism_point(link), cfg.decimals))


def _cmd_retract(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Handle the 'retract' subcommand: final configuration in Y and its frame."""
    link = orient_positively(codec.link_from_json(_read_json(cfg.inputs[0])))
    final = retract_to_Y(link)
    _emit_json(
        cfg,
        {
            "link": codec.link_to_json(final, cfg.decimals),
            "frame": codec.frame_to_json(frame_of(final), cfg.decimals),
        },
    )


def _cmd_frames(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Handle the 'frames' subcommand: one JSON line per retraction stage."""
    link = orient_positively(codec.link_from_json(_read_json(cfg.inputs[0])))
    records = []
    for index, (stage, current) in enumerate(retraction_stages(link)):
        record: dict[str, Any] = {
            "index": index,
            "stage": stage,
            "link": codec.link_to_json(current, cfg.decimals),
            "in_Y": in_Y(current, cfg.tol),
        }
        if record["in_Y"]:
            record["frame"] = codec.frame_to_json(frame_of(current, cfg.tol), cfg.decimals)
        records.append(record)
    _emit(cfg, codec.jsonl(records))


def _cmd_pattern(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Handle the 'pattern' subcommand."""
    pattern, h = _pattern_from_scene(cfg, _read_json(cfg.inputs[0]))
    _emit_json(cfg, {"h": round(h, cfg.decimals), "pattern": codec.pattern_to_json(pattern)})


def _cmd_schedule(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Handle the 'schedule' subcommand; accepts a scene or a pattern document."""
    doc = _read_json(cfg.inputs[0])
    result: dict[str, Any] = {}
    if codec.is_pattern_document(doc):
        pattern = codec.pattern_from_json(doc)
    else:
        pattern, h = _pattern_from_scene(cfg, doc)
        result["h"] = round(h, cfg.decimals)
    schedule = make_schedule(pattern)
    final, directive = run_schedule(pattern)
    result["schedule"] = codec.schedule_to_json(schedule, cfg.decimals)
    result["final"] = codec.pattern_to_json(final)
    result["directive"] = codec.directive_to_json(directive)
    _emit_json(cfg, result)


def _cmd_xi(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Handle the 'xi' subcommand."""
    plane = codec.plane_from_json(_read_json(cfg.inputs[0]))
    _emit_json(cfg, codec.xi_to_json(xi(plane), cfg.decimals))


def _cmd_canon_s3(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Handle the 'canon-s3' subcommand."""
    plane = codec.plane_from_json(_read_json(cfg.inputs[0]))
    _emit_json(cfg, codec.rp2_to_json(canonical_great_hopf(plane), cfg.decimals))


def _cmd_verify(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Handle the 'verify' subcommand; exit 3 when any suite fails."""
    report = asyncio.run(run_suites(cfg.seed, cfg.n, cfg.tol, args.suite))
    _emit(cfg, "\n".join(report.lines()) + "\n")
    if not report.passed:
        sys.exit(EXIT_VERIFY)


def _cmd_sample(cfg: RunConfig, args: argparse.Namespace) -> None:
    """Handle the 'sample' subcommand: *n* seeded random links as JSONL."""
    (rng,) = spawn_generators(cfg.seed, 1)
    links = [codec.link_to_json(random_link(rng), cfg.decimals) for _ in range(cfg.n)]
    _emit(cfg, codec.jsonl(links))


_COMMANDS: dict[str, Callable[[RunConfig, argparse.Namespace], None]] = {
    "lk": _cmd_lk,
    "canon": _cmd_canon,
    "retract": _cmd_retract,
    "frames": _cmd_frames,
    "pattern": _cmd_pattern,
    "schedule": _cmd_schedule,
    "xi": _cmd_xi,
    "canon-s3": _cmd_canon_s3,
    "verify": _cmd_verify,
    "sample": _cmd_sample,
}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with EXIT_INPUT on usage errors."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="Path to config.toml")
    common.add_argument("--seed", type=int, default=None, help="Base seed (default 20240601)")
    common.add_argument("--n", type=int, default=None, help="Sample count (default 1000)")
    common.add_argument("--tol", type=float, default=None, help="Tolerance (default 1e-9)")
    common.add_argument(
        "--mesh-res", dest="mesh_res", type=int, default=None,
        help="Boundary vertices of generated disc meshes (default 64)",
    )
    common.add_argument("--h-min", dest="h_min", type=float, default=None, help="Lowest height")
    common.add_argument("--h-max", dest="h_max", type=float, default=None, help="Highest height")
    common.add_argument("--out", "-o", default=None, help="Write output to file")
    common.add_argument(
        "--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default WARNING)",
    )
    return common


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pyhopflink")
    sub = parser.add_subparsers(dest="command")
    common = _common_options()

    def with_input(name: str, help_text: str, what: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.add_argument("input", help=f"Path to a {what} JSON file")
        return p

    lk_parser = with_input("lk", "Linking number of two round circles", "link")
    lk_parser.add_argument(
        "--method", default="round", choices=["round", "gauss", "crossing"],
        help="Closed form, Gauss sum, or crossing count (default round)",
    )
    lk_parser.add_argument(
        "--sides", type=int, default=128, help="Polygon sides for gauss/crossing (default 128)",
    )
    with_input("canon", "Canonical point of S^3/Q8 for a Hopf link", "link")
    with_input("retract", "Retract a Hopf link into Y and print its frame", "link")
    with_input("frames", "Emit every retraction stage as JSONL", "link")
    with_input("pattern", "Intersection pattern of a disc with an ellipsoid", "scene")
    with_input("schedule", "Innermost-first removal schedule", "scene or pattern")
    with_input("xi", "The map xi = (mu, nu) of an oriented plane in R^4", "plane")
    with_input("canon-s3", "RP2 x RP2 point of a great Hopf link", "plane")

    verify_parser = sub.add_parser("verify", help="Run the invariant suites", parents=[common])
    verify_parser.add_argument(
        "--suite", action="append", default=None, choices=list(SUITES),
        help="Run only this suite (repeatable)",
    )
    sub.add_parser("sample", help="Emit seeded random Hopf links as JSONL", parents=[common])
    return parser


def main(argv: list[str] | None = None) -> None:
    """CLI entrypoint: pyhopflink {lk,canon,retract,frames,pattern,schedule,xi,canon-s3,...}."""
    parser = _build_parser()
    args = parser.parse_args(argv)

    handler = _COMMANDS.get(args.command) if args.command else None
    if handler is None:
        parser.print_help()
        sys.exit(EXIT_INPUT)

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    cfg = _build_run_config(args)
    logger.debug("Running %s with %s", cfg.command, cfg)

    try:
        handler(cfg, args)
    except GeometryError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        sys.exit(EXIT_GEOMETRY)
    except (InputError, json.JSONDecodeError, OSError) as exc:
        sys.exit(f"Error: {exc}")
