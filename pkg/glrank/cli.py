"""Command-line front end.

Every subcommand builds a ``RunConfig``, runs through ``run`` and writes one
artifact (JSON with a ``"schema": "1"`` envelope, or CSV) to standard output
or atomically to ``--out``. Logs and progress bars go to standard error.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from . import __version__
from .chartab import load_character_table, rank_report
from .core.config import Caps, RunConfig
from .core.store import ArtifactKind, ArtifactStore
from .errors import EXIT_INTERNAL, EXIT_OK, EXIT_VERIFY, GlrankError, InvalidInputError
from .matgroup import GroupKind, get_field, group_key, group_summary
from .partitions import Partition, pieri_expand
from .pcf import (
    PcfIrrep,
    count_leading,
    cr_at_T,
    dim,
    dim_bounds,
    eta,
    rank_counts,
    ratio_table,
    sl_character_ratio_transfer,
    sl_profile,
    strict_tensor_rank,
    tensor_rank,
)
from .sps import cr_sps, sps_rep
from .verify import VerifyLevel, run_verification
from .walk import CSV_HEADER, mc_walk, mixing_report

logger = logging.getLogger(__name__)

SCHEMA = "1"

CAP_FLAGS = {
    "group_order": "--max-group-order",
    "partition_weight": "--max-partition-weight",
    "class_count": "--max-classes",
    "field_order": "--max-field-order",
    "transvections": "--max-transvections",
    "irreps": "--max-irreps",
}

RATIO_CSV_HEADER = [
    "rank",
    "count",
    "dim",
    "char_at_T",
    "ratio_constant",
    "ratio_exponent",
    "ratio_exact",
    "log_q_dim",
    "log_inv_q_abs_ratio",
]


@dataclass
class Artifact:
    """What a subcommand produced: a JSON payload and, optionally, a CSV table."""

    payload: dict
    csv_header: Optional[List[str]] = None
    csv_rows: Optional[List[List[str]]] = None
    exit_code: int = EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInputError(message)


def _blank(value) -> str:
    return "" if value is None else str(value)


def _require(config: RunConfig, *names: str) -> None:
    missing = [name for name in names if getattr(config, name) is None]
    if missing:
        flags = ", ".join(f"--{name}" for name in missing)
        raise InvalidInputError(f"{config.subcommand} needs {flags}")


def _partition(config: RunConfig) -> Partition:
    if config.partition is None:
        raise InvalidInputError(f"{config.subcommand} needs --partition")
    return Partition.from_json(config.partition)


# Subcommands


def cmd_dims(config: RunConfig, store: Optional[ArtifactStore]) -> Artifact:
    _require(config, "n")
    n = config.n
    if config.k is not None:
        ranks = [config.k]
    else:
        ranks = [k for k in range(n + 1) if not (n == 1 and k == 1)]
    bounds = [dim_bounds(n, k) for k in ranks]
    rows = [
        [str(n), str(b.k), str(b.upper.degree), str(b.lower.degree)] for b in bounds
    ]
    return Artifact(
        {"n": n, "bounds": [b.to_json() for b in bounds]},
        ["n", "rank", "upper_degree", "lower_degree"],
        rows,
    )


def cmd_ratios(config: RunConfig, store: Optional[ArtifactStore]) -> Artifact:
    _require(config, "n", "q")
    group = GroupKind(config.group)
    if group == GroupKind.SL:
        return _sl_ratios(config)
    table = ratio_table(config.n, config.q, config.caps.irreps)
    rows = [
        [
            str(row.rank),
            str(row.count),
            str(row.dim),
            str(row.char_at_T),
            str(row.ratio.constant),
            _blank(row.ratio.exponent),
            _blank(row.ratio.exact),
            repr(row.log_dim),
            _blank(None if row.log_ratio is None else repr(row.log_ratio)),
        ]
        for row in table
    ]
    return Artifact(
        {"group": group.value, "n": config.n, "q": config.q, "rows": [r.to_json() for r in table]},
        RATIO_CSV_HEADER,
        rows,
    )


def _sl_ratios(config: RunConfig) -> Artifact:
    profile = sl_profile(config.n, config.q, config.caps.irreps)
    payload_rows, rows = [], []
    for entry in profile:
        ratio = sl_character_ratio_transfer(entry.representative, config.q)
        exact = Fraction(entry.char_at_T, entry.dim)
        payload_rows.append(
            {
                "rank": entry.rank,
                "dim": entry.dim,
                "char_at_T": entry.char_at_T,
                "stabilizer": entry.stabilizer,
                "ratio": ratio.to_json(),
                "exact": str(exact),
            }
        )
        rows.append(
            [
                str(entry.rank),
                "1",
                str(entry.dim),
                str(entry.char_at_T),
                str(ratio.constant),
                _blank(ratio.exponent),
                str(exact),
                "",
                "",
            ]
        )
    return Artifact(
        {"group": "SL", "n": config.n, "q": config.q, "rows": payload_rows},
        RATIO_CSV_HEADER,
        rows,
    )


def cmd_count(config: RunConfig, store: Optional[ArtifactStore]) -> Artifact:
    _require(config, "n")
    group = GroupKind(config.group)
    leading = [count_leading(config.n, k, group) for k in range(config.n + 1)]
    exact = None
    if config.q is not None:
        exact = rank_counts(config.n, config.q, group, config.caps.irreps)
    rows = [
        [str(lead.k), str(lead), "" if exact is None else str(exact[lead.k])] for lead in leading
    ]
    return Artifact(
        {
            "group": group.value,
            "n": config.n,
            "q": config.q,
            "leading": [lead.to_json() for lead in leading],
            "exact": None if exact is None else {str(k): v for k, v in exact.items()},
        },
        ["rank", "leading", "exact"],
        rows,
    )


def cmd_eta(config: RunConfig, store: Optional[ArtifactStore]) -> Artifact:
    _require(config, "n")
    if config.irrep is None:
        raise InvalidInputError("eta needs --tau")
    tau = PcfIrrep.from_json(config.irrep)
    image = eta(tau, config.n)
    return Artifact(
        {
            "n": config.n,
            "tau": tau.to_json(),
            "eta": image.to_json(),
            "strict_rank": strict_tensor_rank(image),
            "rank": tensor_rank(image),
            "dim": dim(image).to_json(),
        }
    )


def cmd_pieri(config: RunConfig, store: Optional[ArtifactStore]) -> Artifact:
    d = _partition(config)
    boxes = config.extra.get("boxes")
    if boxes is None:
        raise InvalidInputError("pieri needs --boxes")
    shapes = pieri_expand(d, boxes)
    return Artifact(
        {"partition": d.to_json(), "boxes": boxes, "constituents": [s.to_json() for s in shapes]},
        ["constituent"],
        [[str(s)] for s in shapes],
    )


def cmd_sps(config: RunConfig, store: Optional[ArtifactStore]) -> Artifact:
    d = _partition(config)
    rep = sps_rep(d, config.caps.partition_weight)
    payload = {
        "partition": d.to_json(),
        "dim": rep.dim.to_json(),
        "char_at_T": rep.char_at_T.to_json(),
        "ratio": cr_sps(d, config.q).to_json() if d.weight >= 2 else None,
        "pcf_ratio": cr_at_T(PcfIrrep.sps(d), config.q).to_json(),
    }
    return Artifact(payload)


def cmd_chartab(config: RunConfig, store: Optional[ArtifactStore]) -> Artifact:
    _require(config, "n")
    kind = GroupKind(config.group)
    if config.q is None and kind != GroupKind.SYM:
        raise InvalidInputError("chartab needs --q for GL and SL")
    table, ct = load_character_table(
        kind, config.n, config.q or 2, config.caps, store, config.progress, config.workers
    )
    payload = ct.to_json()
    payload["summary"] = group_summary(table)
    if kind != GroupKind.SYM:
        report = rank_report(ct)
        report.verify()
        payload["ranks"] = report.to_json()["irreps"]
    return Artifact(payload)


def cmd_walk(config: RunConfig, store: Optional[ArtifactStore]) -> Artifact:
    _require(config, "n", "q")
    if config.n < 2:
        raise InvalidInputError(f"The transvection walk needs n >= 2, got {config.n}")
    if config.mode == "mc":
        report = mc_walk(
            config.n,
            get_field(config.q, config.caps.field_order),
            config.steps,
            config.trials,
            config.seed,
            config.workers,
            config.progress,
        )
        rows = [[str(k), str(v)] for k, v in sorted(report.histogram.items())]
        return Artifact(report.to_json(), ["fixed_space_dim", "count"], rows)
    if config.mode not in ("exact", "fourier"):
        raise InvalidInputError(f"Unknown walk mode {config.mode!r}")
    if config.steps < 1:
        raise InvalidInputError(f"Walk length must be positive, got {config.steps}")
    kind = GroupKind(config.group)
    table, ct = load_character_table(
        kind, config.n, config.q, config.caps, store, config.progress, config.workers
    )
    report = mixing_report(
        table,
        config.steps,
        ct,
        use_fourier=config.mode == "fourier",
        progress=config.progress,
        cap=config.caps.group_order,
    )
    report.verify()
    payload = report.to_json()
    if store is not None:
        key = f"report-walk-{group_key(kind, config.n, table.field)}-{config.mode}-{config.steps}"
        store.put_json(key, ArtifactKind.REPORT, payload)
    return Artifact(payload, CSV_HEADER, report.csv_rows())


def cmd_verify(config: RunConfig, store: Optional[ArtifactStore]) -> Artifact:
    report = run_verification(
        VerifyLevel(config.level), config.caps, store, config.progress, config.workers
    )
    rows = [[r.name, str(r.passed).lower(), r.detail] for r in report.results]
    return Artifact(
        report.to_json(),
        ["check", "passed", "detail"],
        rows,
        EXIT_OK if report.passed else EXIT_VERIFY,
    )


def cmd_cache(config: RunConfig, store: Optional[ArtifactStore]) -> Artifact:
    if store is None:
        raise InvalidInputError("cache commands need the cache; drop --no-cache")
    action = config.extra.get("action", "list")
    if action == "list":
        entries = store.list()
        rows = [[e.key, e.kind, str(e.size), e.created_at, e.checksum] for e in entries]
        return Artifact(
            {"cache_dir": str(config.cache_dir), "artifacts": [e.to_json() for e in entries]},
            ["key", "kind", "size", "created_at", "checksum"],
            rows,
        )
    if action == "clear":
        return Artifact({"cache_dir": str(config.cache_dir), "removed": store.clear()})
    results = store.verify()
    bad = sorted(key for key, ok in results.items() if not ok)
    return Artifact(
        {"cache_dir": str(config.cache_dir), "checked": len(results), "corrupted": bad},
        ["key", "valid"],
        [[key, str(ok).lower()] for key, ok in sorted(results.items())],
    )


COMMANDS: Dict[str, Callable[[RunConfig, Optional[ArtifactStore]], Artifact]] = {
    "dims": cmd_dims,
    "ratios": cmd_ratios,
    "count": cmd_count,
    "eta": cmd_eta,
    "pieri": cmd_pieri,
    "sps": cmd_sps,
    "chartab": cmd_chartab,
    "walk": cmd_walk,
    "verify": cmd_verify,
    "cache": cmd_cache,
}


# Output


def render(config: RunConfig, artifact: Artifact) -> str:
    if config.format == "csv":
        if artifact.csv_header is None:
            raise InvalidInputError(f"{config.subcommand} has no CSV form; use --format json")
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(artifact.csv_header)
        writer.writerows(artifact.csv_rows or [])
        return buffer.getvalue()
    envelope = {"schema": SCHEMA, "command": config.subcommand, "result": artifact.payload}
    return json.dumps(envelope, sort_keys=True, indent=2) + "\n"


def write_atomic(path: Path, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path).expanduser()
    fd, tmp = tempfile.mkstemp(dir=str(path.resolve().parent), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError as e:
        if os.path.exists(tmp):
            os.unlink(tmp)
        logger.error(f"Failed to write {path}: {e}")
        raise RuntimeError(f"Failed to write {path}: {e}")


def run(config: RunConfig) -> int:
    """Dispatch one validated configuration; returns the exit status."""
    config.validate()
    command = COMMANDS.get(config.subcommand)
    if command is None:
        raise InvalidInputError(f"Unknown subcommand {config.subcommand!r}")
    store = ArtifactStore(config.cache_dir) if config.use_cache else None
    try:
        artifact = command(config, store)
    finally:
        if store is not None:
            store.close()
    text = render(config, artifact)
    if config.output is None:
        sys.stdout.write(text)
    else:
        write_atomic(config.output, text)
    return artifact.exit_code


# Argument parsing


def _json_argument(value: str):
    try:
        return json.loads(value)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"invalid JSON {value!r}: {e}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", help="Cache directory (default $GLRANK_CACHE_DIR or ~/.cache/glrank)")
    common.add_argument("--no-cache", action="store_true", help="Keep everything in memory")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", help="Write the artifact here instead of standard output")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--progress", action="store_true", help="Show progress bars on stderr")
    common.add_argument("--no-progress", action="store_true", help="Never show progress bars")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("--debug", action="store_true")
    for name, flag in CAP_FLAGS.items():
        common.add_argument(flag, dest=f"cap_{name}", type=int, metavar="N")

    parser = _Parser(prog="glrank", description="Tensor ranks and character ratios of GL_n(F_q) and SL_n(F_q).")
    parser.add_argument("--version", action="version", version=f"glrank {__version__}")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("dims", parents=[common], help="Dimension bounds per tensor rank")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)

    p = sub.add_parser("ratios", parents=[common], help="Character ratios at a transvection")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--group", choices=["GL", "SL"], default="GL")

    p = sub.add_parser("count", parents=[common], help="Number of irreps per tensor rank")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--group", choices=["GL", "SL"], default="GL")

    p = sub.add_parser("eta", parents=[common], help="The eta correspondence")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=_json_argument, required=True, help="PcfIrrep JSON")

    p = sub.add_parser("pieri", parents=[common], help="Horizontal-strip expansion")
    p.add_argument("--partition", type=_json_argument, required=True)
    p.add_argument("--boxes", type=int, required=True)

    p = sub.add_parser("sps", parents=[common], help="Spherical principal series data")
    p.add_argument("--partition", type=_json_argument, required=True)
    p.add_argument("--q", type=int)

    p = sub.add_parser("chartab", parents=[common], help="Character table oracle")
    p.add_argument("--group", choices=["GL", "SL", "SYM"], default="GL")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int)

    p = sub.add_parser("walk", parents=[common], help="Transvection random walk")
    p.add_argument("--group", choices=["SL"], default="SL")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--mode", choices=["exact", "fourier", "mc"], default="exact")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify", parents=[common], help="Run the acceptance suite")
    p.add_argument("--level", choices=[v.value for v in VerifyLevel], default="quick")

    p = sub.add_parser("cache", parents=[common], help="Inspect or clear the artifact cache")
    p.add_argument("action", choices=["list", "clear", "verify"])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    caps = Caps().with_overrides({name: getattr(args, f"cap_{name}") for name in CAP_FLAGS})
    extra = {}
    if getattr(args, "boxes", None) is not None:
        extra["boxes"] = args.boxes
    if getattr(args, "action", None) is not None:
        extra["action"] = args.action
    return RunConfig(
        subcommand=args.subcommand,
        n=getattr(args, "n", None),
        q=getattr(args, "q", None),
        k=getattr(args, "k", None),
        group=getattr(args, "group", "GL"),
        partition=getattr(args, "partition", None),
        irrep=getattr(args, "tau", None),
        caps=caps,
        cache_dir=Path(args.cache_dir).expanduser() if args.cache_dir else None,
        use_cache=not args.no_cache,
        output=Path(args.out) if args.out else None,
        format=args.format,
        steps=getattr(args, "steps", 1),
        mode=getattr(args, "mode", "exact"),
        trials=getattr(args, "trials", 1000),
        seed=getattr(args, "seed", 0),
        workers=args.workers,
        level=getattr(args, "level", "quick"),
        progress=not args.no_progress and (args.progress or sys.stderr.isatty()),
        extra=extra,
    )


def _configure_logging(argv: Sequence[str]) -> None:
    level = logging.WARNING
    if "--debug" in argv:
        level = logging.DEBUG
    elif "-v" in argv or "--verbose" in argv:
        level = logging.INFO
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _configure_logging(argv)
    try:
        args = build_parser().parse_args(argv)
        return run(config_from_args(args))
    except GlrankError as e:
        logger.error(str(e))
        print(f"glrank: error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        print(f"glrank: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
