"""Command-line front end: validate inputs, run reports, generate fixtures.

Exit codes: 0 success, 1 validation failure, 2 I/O failure, 3 bad
configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import date
from pathlib import Path

from .exceptions import ConfigError, ParseError, ValidationError
from .ingest import (
    LENIENT,
    STRICT,
    BundlePaths,
    load_bundle,
    serialize_group_events,
    serialize_list_metadata,
    serialize_origin_events,
    serialize_role_intervals,
)
from .mobility import PEARSON, SPEARMAN
from .motifs import ANCHOR_CENTRE, ANCHOR_FIRST_SENDER
from .report import ALL_FAMILIES, ReportConfig, generate_report
from .synth import SynthConfig, planted_summary, synth_generate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_CONFIG = 3


def _add_bundle_flags(p: argparse.ArgumentParser, edges_required: bool = True):
    p.add_argument("--edges", required=edges_required, help="edges.csv path")
    p.add_argument("--origins", help="origins.csv path")
    p.add_argument("--roles", help="roles.csv path")
    p.add_argument("--group-events", dest="group_events", help="group_events.csv path")
    p.add_argument("--lists", help="lists.csv path")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument(
        "--strict", dest="mode", action="store_const", const=STRICT,
        help="abort on any row error (default)",
    )
    mode.add_argument(
        "--lenient", dest="mode", action="store_const", const=LENIENT,
        help="drop bad rows and report them",
    )
    p.set_defaults(mode=STRICT)


def _iso_date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {value!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hierflow",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="parse and validate the input files")
    _add_bundle_flags(v)

    r = sub.add_parser("report", help="compute metric families over a window plan")
    _add_bundle_flags(r)
    r.add_argument("--out", required=True, help="report output directory")
    r.add_argument("--from", dest="from_date", type=_iso_date,
                   help="span start (default: first event)")
    r.add_argument("--to", dest="to_date", type=_iso_date,
                   help="span end, exclusive (default: day after last event)")
    r.add_argument("--window-months", type=int, default=12)
    r.add_argument("--stride-months", type=int, default=1)
    r.add_argument("--motif-delta-days", type=int, default=30)
    r.add_argument(
        "--metrics", default=",".join(ALL_FAMILIES),
        help=f"comma-separated families (default: all of {','.join(ALL_FAMILIES)})",
    )
    r.add_argument("--threads", type=int, default=1,
                   help="worker threads for window fan-out")
    r.add_argument("--degree-mode", choices=["ordered_pairs", "neighbours"],
                   default="ordered_pairs")
    r.add_argument("--anchor-mode", choices=[ANCHOR_CENTRE, ANCHOR_FIRST_SENDER],
                   default=ANCHOR_CENTRE)
    r.add_argument("--correlation", choices=[PEARSON, SPEARMAN], default=PEARSON)
    r.add_argument("--include-ad-taxonomy", action="store_true",
                   help="emit AD taxonomy rows despite their small n")
    r.add_argument("--roles-valid-from", type=_iso_date, default=date(2012, 6, 21),
                   help="refuse role metrics for windows starting earlier")
    r.add_argument("--wg-truncation", type=_iso_date, default=date(2021, 1, 1),
                   help="cut the list-activity WG estimate at this date")

    s = sub.add_parser("synth", help="write a synthetic bundle with planted parameters")
    s.add_argument("--config", help="JSON file of generator parameters")
    s.add_argument("--out", required=True, help="bundle output directory")
    s.add_argument("--seed", type=int, help="override the config seed")

    return parser


def _cmd_validate(args) -> int:
    paths = BundlePaths(
        edges=args.edges, origins=args.origins, roles=args.roles,
        group_events=args.group_events, lists=args.lists,
    )
    _, reports = load_bundle(paths, LENIENT)
    n_errors = 0
    for name in sorted(reports):
        rep = reports[name]
        n_errors += len(rep.errors)
        print(f"{name}: {len(rep.errors)} errors, {len(rep.warnings)} warnings")
        for issue in rep.errors:
            print(f"  error: {issue}")
        for issue in rep.warnings:
            print(f"  warning: {issue}")
    if n_errors and args.mode == STRICT:
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_report(args) -> int:
    paths = BundlePaths(
        edges=args.edges, origins=args.origins, roles=args.roles,
        group_events=args.group_events, lists=args.lists,
    )
    bundle, _ = load_bundle(paths, args.mode)
    cfg = ReportConfig(
        from_date=args.from_date,
        to_date=args.to_date,
        window_months=args.window_months,
        stride_months=args.stride_months,
        motif_delta_days=args.motif_delta_days,
        metrics=tuple(m.strip() for m in args.metrics.split(",") if m.strip()),
        degree_mode=args.degree_mode,
        anchor_mode=args.anchor_mode,
        correlation=args.correlation,
        include_ad_taxonomy=args.include_ad_taxonomy,
        roles_valid_from=args.roles_valid_from,
        wg_truncation=args.wg_truncation,
        threads=max(1, args.threads),
    )
    paths_out = generate_report(bundle, cfg, args.out)
    print(f"wrote {len(paths_out)} files to {args.out}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = SynthConfig.from_json(fh.read())
    else:
        cfg = SynthConfig()
    if args.seed is not None:
        cfg = SynthConfig.from_dict({**_config_dict(cfg), "seed": args.seed})
    bundle = synth_generate(cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    store = bundle.events
    import pandas as pd

    frame = pd.DataFrame(
        {
            "sender": [store.node_ids[int(i)] for i in store.src],
            "receiver": [store.node_ids[int(i)] for i in store.dst],
            "date": [date.fromordinal(int(t)).isoformat() for t in store.times],
            "list": [
                store.list_ids[int(i)] if int(i) >= 0 else ""
                for i in store.list_idx
            ],
            "message_id": [f"m{i:08d}" for i in range(len(store))],
        }
    )
    frame.to_csv(out / "edges.csv", index=False, lineterminator="\n")
    origin_events = bundle.origins.events() if bundle.origins is not None else []
    (out / "origins.csv").write_text(
        serialize_origin_events(
            origin_events, [f"o{i:08d}" for i in range(len(origin_events))]
        ),
        encoding="utf-8",
    )
    (out / "roles.csv").write_text(
        serialize_role_intervals(bundle.roles or []), encoding="utf-8"
    )
    (out / "group_events.csv").write_text(
        serialize_group_events(bundle.group_events or []), encoding="utf-8"
    )
    (out / "lists.csv").write_text(
        serialize_list_metadata(bundle.lists or {}), encoding="utf-8"
    )
    with open(out / "synth_config.json", "w", encoding="utf-8") as fh:
        json.dump(_config_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(planted_summary(cfg, bundle))
    return EXIT_OK


def _config_dict(cfg: SynthConfig) -> dict:
    out = {}
    for name in cfg.__dataclass_fields__:
        value = getattr(cfg, name)
        out[name] = value.isoformat() if isinstance(value, date) else value
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "synth":
            return _cmd_synth(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ParseError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
