"""Tidy report generation over a window plan, with a schema linter.

Each metric family writes one long-format CSV (one observation per row) into
the report directory, alongside ``run_metadata.json`` describing the
configuration and the analysis conventions in force. Undefined statistics are
emitted as the explicit gap marker, never as fabricated zeros.

Reports are byte-reproducible: rows are ordered by window and fixed
role/category orders, floats use one fixed format, and worker-pool size never
influences output (windows are merged in schedule order).
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from . import __version__
from .events import EventStore, TimeWindow, WindowPlan, window_active_ids, windows
from .exceptions import ConfigError
from .ingest import DatasetBundle
from .mobility import MEASURES, PEARSON, taxonomy
from .motifs import (
    ANCHOR_CENTRE,
    CATEGORY_ORDER,
    THREE_NODE_CATEGORIES,
    MotifCategory,
    aggregate_by_role,
    enumerate_motifs,
    role_motif_proportions,
)
from .orgmetrics import (
    activity_proportions,
    before_after_role_activity,
    flow_ratios,
    origin_proportions,
    population_proportions,
    wg_lifecycle_profile,
    wg_series,
)
from .roles import CLASSIFIED, RoleKind, resolve_roles

GAP = "NA"

FAMILY_ACTIVITY = "activity"
FAMILY_PROPORTIONS = "proportions"
FAMILY_MOTIFS = "motifs"
FAMILY_TAXONOMY = "taxonomy"
FAMILY_FLOWS = "flows"
FAMILY_WG_SERIES = "wg_series"
FAMILY_LIFECYCLE = "lifecycle"
FAMILY_BEFORE_AFTER = "before_after"

ALL_FAMILIES = (
    FAMILY_ACTIVITY,
    FAMILY_PROPORTIONS,
    FAMILY_MOTIFS,
    FAMILY_TAXONOMY,
    FAMILY_FLOWS,
    FAMILY_WG_SERIES,
    FAMILY_LIFECYCLE,
    FAMILY_BEFORE_AFTER,
)

#: Families whose semantics depend on resolved roles.
ROLE_FAMILIES = frozenset(
    {
        FAMILY_PROPORTIONS,
        FAMILY_MOTIFS,
        FAMILY_TAXONOMY,
        FAMILY_FLOWS,
        FAMILY_WG_SERIES,
        FAMILY_BEFORE_AFTER,
    }
)

FILE_NAMES = {
    FAMILY_ACTIVITY: "activity_series.csv",
    FAMILY_PROPORTIONS: "proportions.csv",
    FAMILY_MOTIFS: "motifs.csv",
    FAMILY_TAXONOMY: "taxonomy.csv",
    FAMILY_FLOWS: "flows.csv",
    FAMILY_WG_SERIES: "wg_series.csv",
    FAMILY_LIFECYCLE: "lifecycle.csv",
    FAMILY_BEFORE_AFTER: "before_after.csv",
}

HEADERS = {
    FAMILY_ACTIVITY: ["window_start", "window_end", "active_participants"],
    FAMILY_PROPORTIONS: ["window_start", "window_end", "kind", "role_class", "value"],
    FAMILY_MOTIFS: [
        "window_start", "window_end", "role_class", "category", "count",
        "proportion",
    ],
    FAMILY_TAXONOMY: [
        "window_start", "window_end", "window_midpoint", "role_class",
        "measure", "value", "n",
    ],
    FAMILY_FLOWS: [
        "window_start", "window_end", "pair", "upward_count",
        "downward_count", "proportion_up",
    ],
    FAMILY_WG_SERIES: [
        "date", "wgc_roles", "wgc_individuals", "wg_count_group_events",
        "wg_count_list_activity", "wgcs_per_wg_group_events",
        "wgcs_per_wg_list_activity",
    ],
    FAMILY_LIFECYCLE: ["age_years", "mean", "median", "sd", "n_lists"],
    FAMILY_BEFORE_AFTER: ["role_kind", "n", "metric", "phase", "mean", "sd"],
}


@dataclass(frozen=True)
class ReportConfig:
    """Everything that shapes a report run (thread count shapes only speed)."""

    from_date: date | None = None
    to_date: date | None = None
    window_months: int = 12
    stride_months: int = 1
    motif_delta_days: int = 30
    metrics: tuple[str, ...] = ALL_FAMILIES
    degree_mode: str = "ordered_pairs"
    anchor_mode: str = ANCHOR_CENTRE
    correlation: str = PEARSON
    include_ad_taxonomy: bool = False
    roles_valid_from: date = date(2012, 6, 21)
    wg_truncation: date | None = date(2021, 1, 1)
    threads: int = 1


def _fmt(value) -> str:
    if value is None:
        return GAP
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


def _plan(bundle: DatasetBundle, cfg: ReportConfig) -> WindowPlan:
    extent = bundle.events.extent
    from_date = cfg.from_date
    to_date = cfg.to_date
    if from_date is None or to_date is None:
        if extent is None:
            raise ConfigError("empty store and no explicit --from/--to span")
        if from_date is None:
            from_date = extent[0]
        if to_date is None:
            to_date = date.fromordinal(extent[1].toordinal() + 1)
    return WindowPlan(from_date, to_date, cfg.window_months, cfg.stride_months)


def _check_requirements(bundle: DatasetBundle, cfg: ReportConfig, plan: WindowPlan):
    wanted = set(cfg.metrics)
    unknown = wanted - set(ALL_FAMILIES)
    if unknown:
        raise ConfigError(f"unknown metric families: {', '.join(sorted(unknown))}")
    role_wanted = wanted & ROLE_FAMILIES
    if role_wanted and bundle.roles is None:
        raise ConfigError(
            "role metrics requested "
            f"({', '.join(sorted(role_wanted))}) but no roles file was given"
        )
    if role_wanted and plan.span_start < cfg.roles_valid_from:
        raise ConfigError(
            f"window plan starts {plan.span_start}, before role data is valid "
            f"({cfg.roles_valid_from}); restrict --from or drop role metrics"
        )
    if FAMILY_WG_SERIES in wanted:
        if bundle.group_events is None or bundle.lists is None:
            raise ConfigError(
                "wg_series needs both the group events file and the lists file"
            )
    if FAMILY_LIFECYCLE in wanted and bundle.lists is None:
        raise ConfigError("lifecycle needs the lists file")


def _window_rows(bundle: DatasetBundle, cfg: ReportConfig, w: TimeWindow):
    """Rows of every window-scoped family, for one window."""
    store = bundle.events
    out: dict[str, list[list[str]]] = {}
    ws, we = w.start.isoformat(), w.end.isoformat()
    wanted = set(cfg.metrics)

    if FAMILY_ACTIVITY in wanted:
        out[FAMILY_ACTIVITY] = [[ws, we, str(int(window_active_ids(store, w).size))]]

    role_needed = wanted & {FAMILY_PROPORTIONS, FAMILY_MOTIFS, FAMILY_TAXONOMY,
                            FAMILY_FLOWS}
    if not role_needed:
        return out
    names = {store.node_ids[int(i)] for i in window_active_ids(store, w)}
    roles = resolve_roles(bundle.roles or [], w, names)

    if FAMILY_PROPORTIONS in wanted:
        rows = []
        kinds = [
            ("population", population_proportions(store, roles, w)),
            ("activity", activity_proportions(store, roles, w)),
        ]
        if bundle.origins is not None:
            kinds.append(("origin", origin_proportions(bundle.origins, roles, w)))
        for kind, props in kinds:
            for rc in CLASSIFIED:
                value = None if props is None else props[rc]
                rows.append([ws, we, kind, rc.value, _fmt(value)])
        out[FAMILY_PROPORTIONS] = rows

    if FAMILY_MOTIFS in wanted:
        tally = enumerate_motifs(store, w, cfg.motif_delta_days, cfg.anchor_mode)
        counts = aggregate_by_role(tally, roles)
        props = role_motif_proportions(tally, roles)
        rows = []
        for rc in CLASSIFIED:
            for cat in CATEGORY_ORDER:
                rows.append(
                    [ws, we, rc.value, cat.value,
                     str(counts[(rc, cat)]), _fmt(props[(rc, cat)])]
                )
        out[FAMILY_MOTIFS] = rows

    if FAMILY_TAXONOMY in wanted:
        results = taxonomy(store, w, roles, cfg.degree_mode, cfg.correlation)
        rows = []
        classes = list(CLASSIFIED) if cfg.include_ad_taxonomy else [
            rc for rc in CLASSIFIED if rc.value in ("RP", "WGC")
        ]
        for rc in classes:
            res = results[rc]
            for measure in MEASURES:
                rows.append(
                    [ws, we, res.midpoint.isoformat(), rc.value, measure,
                     _fmt(res.value(measure)), str(res.n)]
                )
        out[FAMILY_TAXONOMY] = rows

    if FAMILY_FLOWS in wanted:
        rows = []
        for ratio in flow_ratios(store, roles, w):
            rows.append(
                [ws, we, ratio.pair_label, str(ratio.upward_count),
                 str(ratio.downward_count), _fmt(ratio.proportion_up)]
            )
        out[FAMILY_FLOWS] = rows

    return out


def _series_rows(bundle: DatasetBundle, cfg: ReportConfig, plan_windows):
    """Rows of the non-window families."""
    out: dict[str, list[list[str]]] = {}
    wanted = set(cfg.metrics)
    store = bundle.events

    if FAMILY_WG_SERIES in wanted:
        points = wg_series(
            bundle.roles or [], bundle.group_events or [], store,
            bundle.wg_lists, [w.end for w in plan_windows], cfg.wg_truncation,
        )
        out[FAMILY_WG_SERIES] = [
            [p.date.isoformat(), str(p.wgc_roles), str(p.wgc_individuals),
             str(p.count_from_group_events), _fmt(p.count_from_list_activity),
             _fmt(p.per_wg_from_group_events), _fmt(p.per_wg_from_list_activity)]
            for p in points
        ]

    if FAMILY_LIFECYCLE in wanted:
        rows = []
        for row in wg_lifecycle_profile(store, bundle.wg_lists):
            rows.append(
                [str(row.age_years), _fmt(row.mean), _fmt(row.median),
                 _fmt(row.sd), str(row.n_lists)]
            )
        out[FAMILY_LIFECYCLE] = rows

    if FAMILY_BEFORE_AFTER in wanted:
        rows = []
        for kind in (RoleKind.WGC, RoleKind.AD):
            stats = before_after_role_activity(store, bundle.roles or [], kind)
            if stats is None:
                rows.append([kind.value, "0", "sent", "before", GAP, GAP])
                rows.append([kind.value, "0", "received", "before", GAP, GAP])
                rows.append([kind.value, "0", "sent", "after", GAP, GAP])
                rows.append([kind.value, "0", "received", "after", GAP, GAP])
                continue
            for metric, phase, pair in (
                ("sent", "before", stats.sent_before),
                ("received", "before", stats.received_before),
                ("sent", "after", stats.sent_after),
                ("received", "after", stats.received_after),
            ):
                rows.append(
                    [kind.value, str(stats.n), metric, phase,
                     _fmt(pair[0]), _fmt(pair[1])]
                )
        out[FAMILY_BEFORE_AFTER] = rows

    return out


def generate_report(
    bundle: DatasetBundle, cfg: ReportConfig, out_dir: str | Path
) -> dict[str, Path]:
    """Run the requested metric families and write one CSV per family."""
    plan = _plan(bundle, cfg)
    _check_requirements(bundle, cfg, plan)
    plan_windows = windows(plan)
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)

    window_families = [
        f for f in cfg.metrics
        if f in (FAMILY_ACTIVITY, FAMILY_PROPORTIONS, FAMILY_MOTIFS,
                 FAMILY_TAXONOMY, FAMILY_FLOWS)
    ]
    per_window: list[dict[str, list[list[str]]]] = []
    if window_families and plan_windows:
        if cfg.threads > 1:
            if FAMILY_MOTIFS in window_families:
                _warm_motif_kernel()
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                per_window = list(
                    pool.map(lambda w: _window_rows(bundle, cfg, w), plan_windows)
                )
        else:
            per_window = [_window_rows(bundle, cfg, w) for w in plan_windows]

    tables: dict[str, list[list[str]]] = {f: [] for f in cfg.metrics}
    for chunk in per_window:
        for family, rows in chunk.items():
            tables[family].extend(rows)
    for family, rows in _series_rows(bundle, cfg, plan_windows).items():
        tables[family] = rows

    paths: dict[str, Path] = {}
    for family in cfg.metrics:
        path = out_path / FILE_NAMES[family]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(HEADERS[family])
            writer.writerows(tables[family])
        paths[family] = path

    meta = {
        "tool": "hierflow report",
        "version": __version__,
        "config": {
            "from": plan.span_start.isoformat(),
            "to": plan.span_end.isoformat(),
            "window_months": cfg.window_months,
            "stride_months": cfg.stride_months,
            "motif_delta_days": cfg.motif_delta_days,
            "metrics": list(cfg.metrics),
            "degree_mode": cfg.degree_mode,
            "anchor_mode": cfg.anchor_mode,
            "correlation": cfg.correlation,
            "include_ad_taxonomy": cfg.include_ad_taxonomy,
            "roles_valid_from": cfg.roles_valid_from.isoformat(),
            "wg_truncation": (
                cfg.wg_truncation.isoformat() if cfg.wg_truncation else None
            ),
        },
        "input": {
            "events": len(bundle.events),
            "origins": len(bundle.origins) if bundle.origins is not None else 0,
            "role_intervals": len(bundle.roles or []),
            "parse_mode": bundle.provenance.get("parse_mode", "unknown"),
        },
        "conventions": {
            "gap_marker": GAP,
            "degree": "distinct directed pairs unless degree_mode=neighbours",
            "activity_share": "sent events only",
            "sd": "population (divide by n)",
            "motif_counting": "combinatorial; every qualifying triple counts",
            "two_node_motifs": "counted, excluded from four-way proportions",
            "partial_role_coverage": "UNCLASSIFIED and dropped from strata",
            "dual_role_precedence": "AD outranks WGC when both cover a window",
        },
    }
    meta_path = out_path / "run_metadata.json"
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths["run_metadata"] = meta_path
    return paths


def _warm_motif_kernel():
    """Compile the motif kernel before fanning out worker threads."""
    from . import _motif_kernels as _k

    src = np.array([0, 1, 2], dtype=np.int64)
    dst = np.array([1, 2, 0], dtype=np.int64)
    t = np.array([0, 1, 2], dtype=np.int64)
    _k.count_motifs(src, dst, t, np.int64(3), np.int64(5), 0)


# -- schema linter -------------------------------------------------------------

def _read_rows(path: Path) -> list[dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _is_gap(v: str) -> bool:
    return v == GAP


def lint_report(report_dir: str | Path) -> list[str]:
    """Check structural report invariants; returns human-readable violations.

    Enforced rules: proportion families sum to 1 (or are all gaps) per group,
    undefined statistics appear as gaps exactly when their preconditions fail
    (never as zeros), defined values stay in range, and no cell is empty.
    """
    problems: list[str] = []
    base = Path(report_dir)
    tol = 1e-9

    for family, name in FILE_NAMES.items():
        path = base / name
        if not path.exists():
            continue
        rows = _read_rows(path)
        for i, row in enumerate(rows):
            for col, v in row.items():
                if v is None or v == "":
                    problems.append(f"{name}:{i + 2}: empty cell in {col}")

        if family == FAMILY_PROPORTIONS:
            groups: dict[tuple[str, str], list[str]] = {}
            for row in rows:
                groups.setdefault(
                    (row["window_start"], row["kind"]), []
                ).append(row["value"])
            for (wstart, kind), values in sorted(groups.items()):
                gaps = [v for v in values if _is_gap(v)]
                if gaps and len(gaps) != len(values):
                    problems.append(
                        f"{name}: {wstart}/{kind}: mixed gaps and values"
                    )
                elif not gaps:
                    total = sum(float(v) for v in values)
                    if abs(total - 1.0) > tol:
                        problems.append(
                            f"{name}: {wstart}/{kind}: proportions sum to {total!r}"
                        )

        elif family == FAMILY_MOTIFS:
            groups2: dict[tuple[str, str], list[dict[str, str]]] = {}
            for row in rows:
                groups2.setdefault(
                    (row["window_start"], row["role_class"]), []
                ).append(row)
            three_node = {c.value for c in THREE_NODE_CATEGORIES}
            for (wstart, rc), grp in sorted(groups2.items()):
                three = [r for r in grp if r["category"] in three_node]
                total_count = sum(int(r["count"]) for r in three)
                if total_count == 0:
                    for r in three:
                        if not _is_gap(r["proportion"]):
                            problems.append(
                                f"{name}: {wstart}/{rc}: zero motifs but "
                                "proportion is not a gap"
                            )
                else:
                    psum = 0.0
                    for r in three:
                        if _is_gap(r["proportion"]):
                            problems.append(
                                f"{name}: {wstart}/{rc}: gap proportion with "
                                "nonzero class total"
                            )
                            break
                        psum += float(r["proportion"])
                    else:
                        if abs(psum - 1.0) > tol:
                            problems.append(
                                f"{name}: {wstart}/{rc}: proportions sum to {psum!r}"
                            )
                for r in grp:
                    if r["category"] == MotifCategory.TWO_NODE.value and not _is_gap(
                        r["proportion"]
                    ):
                        problems.append(
                            f"{name}: {wstart}/{rc}: two-node rows carry no proportion"
                        )

        elif family == FAMILY_TAXONOMY:
            for i, row in enumerate(rows):
                n = int(row["n"])
                if n < 2 and not _is_gap(row["value"]):
                    problems.append(
                        f"{name}:{i + 2}: value present with n={n} < 2"
                    )
                if not _is_gap(row["value"]):
                    v = float(row["value"])
                    if not -1.0 - tol <= v <= 1.0 + tol:
                        problems.append(f"{name}:{i + 2}: correlation {v} out of range")

        elif family == FAMILY_FLOWS:
            for i, row in enumerate(rows):
                up = int(row["upward_count"])
                down = int(row["downward_count"])
                if up + down == 0:
                    if not _is_gap(row["proportion_up"]):
                        problems.append(
                            f"{name}:{i + 2}: zero flows but proportion is not a gap"
                        )
                else:
                    if _is_gap(row["proportion_up"]):
                        problems.append(
                            f"{name}:{i + 2}: gap proportion with nonzero flows"
                        )
                    else:
                        expect = up / (up + down)
                        if abs(float(row["proportion_up"]) - expect) > 1e-12:
                            problems.append(
                                f"{name}:{i + 2}: proportion_up mismatches counts"
                            )

        elif family == FAMILY_WG_SERIES:
            for i, row in enumerate(rows):
                by_events = int(row["wg_count_group_events"])
                r1 = row["wgcs_per_wg_group_events"]
                if (by_events == 0) != _is_gap(r1):
                    problems.append(
                        f"{name}:{i + 2}: group-events ratio gap rule violated"
                    )
                by_lists = row["wg_count_list_activity"]
                r2 = row["wgcs_per_wg_list_activity"]
                lists_zero = _is_gap(by_lists) or int(by_lists) == 0
                if lists_zero != _is_gap(r2):
                    problems.append(
                        f"{name}:{i + 2}: list-activity ratio gap rule violated"
                    )

    return problems
