"""Figure builders over the tidy report schema.

Eight figure ids cover the report families: an activity series, the two
role-proportion panels, the three working-group panels, the list lifecycle
band, per-category motif proportions, origin proportions, hierarchy flow
ratios with the 0.5 reference, and the four taxonomy panels.

Gap markers ("NA") are turned into NaN so matplotlib breaks the line instead
of interpolating; axis ranges are left to autoscaling.
"""

from __future__ import annotations

import csv
import math
from contextlib import nullcontext
from datetime import date
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

GAP = "NA"

FIGURE_IDS = (
    "activity",
    "role_proportions",
    "wg_panels",
    "lifecycle",
    "motif_proportions",
    "origin_proportions",
    "flows",
    "taxonomy",
)

_SOURCES = {
    "activity": ("activity_series.csv",
                 ["window_start", "window_end", "active_participants"]),
    "role_proportions": ("proportions.csv",
                         ["window_start", "window_end", "kind", "role_class",
                          "value"]),
    "origin_proportions": ("proportions.csv",
                           ["window_start", "window_end", "kind", "role_class",
                            "value"]),
    "wg_panels": ("wg_series.csv",
                  ["date", "wgc_roles", "wgc_individuals",
                   "wg_count_group_events", "wg_count_list_activity",
                   "wgcs_per_wg_group_events", "wgcs_per_wg_list_activity"]),
    "lifecycle": ("lifecycle.csv",
                  ["age_years", "mean", "median", "sd", "n_lists"]),
    "motif_proportions": ("motifs.csv",
                          ["window_start", "window_end", "role_class",
                           "category", "count", "proportion"]),
    "flows": ("flows.csv",
              ["window_start", "window_end", "pair", "upward_count",
               "downward_count", "proportion_up"]),
    "taxonomy": ("taxonomy.csv",
                 ["window_start", "window_end", "window_midpoint",
                  "role_class", "measure", "value", "n"]),
}

_CLASS_COLOURS = {"RP": "tab:blue", "WGC": "tab:orange", "AD": "tab:green"}


class SchemaError(ValueError):
    """A report file is missing or lacks an expected column."""


def _load(report_dir: str | Path, figure_id: str) -> list[dict[str, str]]:
    name, required = _SOURCES[figure_id]
    path = Path(report_dir) / name
    if not path.exists():
        raise SchemaError(f"report file {name} not found in {report_dir}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        have = reader.fieldnames or []
        missing = [c for c in required if c not in have]
        if missing:
            raise SchemaError(f"{name} is missing column(s): {', '.join(missing)}")
        return list(reader)


def _num(value: str) -> float:
    return math.nan if value == GAP else float(value)


def _date(value: str) -> date:
    return date.fromisoformat(value)


def _no_data(ax) -> None:
    ax.annotate("no data", xy=(0.5, 0.5), xycoords="axes fraction",
                ha="center", va="center", fontsize=14, color="grey")


def _series_by(rows, key_col, x_of, y_of, keys=None):
    """Split rows into per-key x/y series, preserving row order."""
    found: dict[str, tuple[list, list]] = {}
    for row in rows:
        key = row[key_col]
        xs, ys = found.setdefault(key, ([], []))
        xs.append(x_of(row))
        ys.append(y_of(row))
    if keys is None:
        keys = sorted(found)
    return [(k, *found[k]) for k in keys if k in found]


def _fig_activity(rows):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    if not rows:
        _no_data(ax)
        return fig
    xs = [_date(r["window_end"]) for r in rows]
    ys = [_num(r["active_participants"]) for r in rows]
    ax.plot(xs, ys, color="tab:blue")
    ax.set_xlabel("window end")
    ax.set_ylabel("active participants (trailing window)")
    ax.set_title("Active participants over time")
    return fig


def _proportion_panel(ax, rows, kind, title):
    sub = [r for r in rows if r["kind"] == kind]
    if not sub:
        _no_data(ax)
        ax.set_title(title)
        return
    for cls, xs, ys in _series_by(
        sub, "role_class", lambda r: _date(r["window_end"]),
        lambda r: _num(r["value"]), keys=["RP", "WGC", "AD"],
    ):
        ax.plot(xs, ys, label=cls, color=_CLASS_COLOURS.get(cls))
    ax.set_title(title)
    ax.set_ylabel("proportion")
    ax.legend(loc="center left")


def _fig_role_proportions(rows):
    fig, axes = plt.subplots(2, 1, figsize=(8, 7), sharex=True)
    _proportion_panel(axes[0], rows, "population", "Share of active individuals")
    _proportion_panel(axes[1], rows, "activity", "Share of emails sent")
    axes[1].set_xlabel("window end")
    fig.tight_layout()
    return fig


def _fig_origin_proportions(rows):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    _proportion_panel(ax, rows, "origin", "Share of thread-origin emails")
    ax.set_xlabel("window end")
    fig.tight_layout()
    return fig


def _fig_wg_panels(rows):
    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    if not rows:
        for ax in axes:
            _no_data(ax)
        return fig
    xs = [_date(r["date"]) for r in rows]
    panels = [
        (axes[0], [("wgc_roles", "chair roles"),
                   ("wgc_individuals", "individual chairs")], "Chairs"),
        (axes[1], [("wg_count_group_events", "from group events"),
                   ("wg_count_list_activity", "from list activity")],
         "Working groups"),
        (axes[2], [("wgcs_per_wg_group_events", "from group events"),
                   ("wgcs_per_wg_list_activity", "from list activity")],
         "Chairs per group"),
    ]
    for ax, cols, title in panels:
        for col, label in cols:
            ax.plot(xs, [_num(r[col]) for r in rows], label=label)
        ax.set_title(title)
        ax.legend(loc="best", fontsize=8)
    axes[2].set_xlabel("date")
    fig.tight_layout()
    return fig


def _fig_lifecycle(rows):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    if not rows:
        _no_data(ax)
        return fig
    ages = [_num(r["age_years"]) for r in rows]
    means = [_num(r["mean"]) for r in rows]
    medians = [_num(r["median"]) for r in rows]
    sds = [_num(r["sd"]) for r in rows]
    ax.plot(ages, means, label="mean", color="tab:blue")
    ax.plot(ages, medians, label="median", color="tab:orange", linestyle="--")
    lower = [m - s for m, s in zip(means, sds)]
    upper = [m + s for m, s in zip(means, sds)]
    ax.fill_between(ages, lower, upper, alpha=0.25, color="tab:blue",
                    label="±1 sd")
    ax.set_xlabel("years since first list activity")
    ax.set_ylabel("replies per year")
    ax.set_title("Working-group list lifecycle")
    ax.legend()
    return fig


_MOTIF_PANELS = ("OUTWARD_STAR", "INWARD_STAR", "MIXED_STAR", "TRIANGLE")


def _fig_motif_proportions(rows):
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
    flat = axes.ravel()
    any_data = False
    for ax, category in zip(flat, _MOTIF_PANELS):
        sub = [r for r in rows if r["category"] == category]
        series = _series_by(
            sub, "role_class", lambda r: _date(r["window_end"]),
            lambda r: _num(r["proportion"]), keys=["RP", "WGC", "AD"],
        )
        for cls, xs, ys in series:
            ax.plot(xs, ys, label=cls, color=_CLASS_COLOURS.get(cls))
            any_data = True
        ax.set_title(category.replace("_", " ").title())
    if not any_data:
        for ax in flat:
            _no_data(ax)
    else:
        flat[0].legend(fontsize=8)
    fig.suptitle("Motif category proportions by role")
    fig.tight_layout()
    return fig


def _fig_flows(rows):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.axhline(0.5, color="grey", linestyle="--", linewidth=1,
               label="balance (0.5)")
    if not rows:
        _no_data(ax)
        return fig
    for pair, xs, ys in _series_by(
        rows, "pair", lambda r: _date(r["window_end"]),
        lambda r: _num(r["proportion_up"]),
        keys=["RP->WGC", "RP->AD", "WGC->AD"],
    ):
        ax.plot(xs, ys, label=pair)
    ax.set_xlabel("window end")
    ax.set_ylabel("proportion of traffic going up")
    ax.set_title("Upward share of inter-level communication")
    ax.legend(fontsize=8)
    return fig


_TAXONOMY_PANELS = (
    ("mobility", "Mobility"),
    ("neighbour_mobility", "Neighbour mobility"),
    ("philanthropy", "Philanthropy"),
    ("community", "Community"),
)


def _fig_taxonomy(rows):
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
    flat = axes.ravel()
    any_data = False
    for ax, (measure, title) in zip(flat, _TAXONOMY_PANELS):
        sub = [r for r in rows if r["measure"] == measure]
        for cls, xs, ys in _series_by(
            sub, "role_class", lambda r: _date(r["window_midpoint"]),
            lambda r: _num(r["value"]), keys=["RP", "WGC", "AD"],
        ):
            ax.plot(xs, ys, label=cls, color=_CLASS_COLOURS.get(cls))
            any_data = True
        ax.set_title(title)
    if not any_data:
        for ax in flat:
            _no_data(ax)
    else:
        flat[0].legend(fontsize=8)
    fig.suptitle("Degree-correlation taxonomy at window midpoints")
    fig.tight_layout()
    return fig


_BUILDERS = {
    "activity": _fig_activity,
    "role_proportions": _fig_role_proportions,
    "wg_panels": _fig_wg_panels,
    "lifecycle": _fig_lifecycle,
    "motif_proportions": _fig_motif_proportions,
    "origin_proportions": _fig_origin_proportions,
    "flows": _fig_flows,
    "taxonomy": _fig_taxonomy,
}


def build_figure(report_dir: str | Path, figure_id: str):
    """Load the backing report file and build the matplotlib figure."""
    if figure_id not in FIGURE_IDS:
        raise SchemaError(
            f"unknown figure id {figure_id!r}; expected one of "
            f"{', '.join(FIGURE_IDS)}"
        )
    rows = _load(report_dir, figure_id)
    return _BUILDERS[figure_id](rows)


def render(
    report_dir: str | Path,
    figure_id: str,
    out_path: str | Path,
    style: str | Path | None = None,
) -> Path:
    """Render one figure to an image file; deterministic for fixed inputs."""
    context = plt.style.context(str(style)) if style else nullcontext()
    with context:
        fig = build_figure(report_dir, figure_id)
        out = Path(out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        try:
            fig.savefig(out, dpi=110)
        finally:
            plt.close(fig)
    return out
