"""Degree-correlation taxonomy between the two halves of a window.

Each window is split at its calendar midpoint. For every node active in the
first half we record its degree in both halves and the mean degree of its
first-half neighbour set in both halves, then correlate the four column pairs
per role class:

    mobility            corr(deg1, deg2)
    neighbour mobility  corr(nd1, nd2)
    philanthropy        corr(deg1, nd2)
    community           corr(nd1, deg2)

Nodes inactive in the second half count with degree 0; the neighbour set is
frozen from the first half so both nd columns average over the same people.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from .events import (
    EventStore,
    TimeWindow,
    add_months,
    whole_months_between,
    window_degree_counts,
)
from .exceptions import ValidationError
from .roles import CLASSIFIED, RoleAssignment, RoleClass

MEASURES = ("mobility", "neighbour_mobility", "philanthropy", "community")

PEARSON = "pearson"
SPEARMAN = "spearman"


def split_window(w: TimeWindow) -> tuple[TimeWindow, TimeWindow]:
    """Split a whole-month window into two equal calendar halves."""
    months = whole_months_between(w.start, w.end)
    if months is None:
        raise ValidationError(
            f"window [{w.start}, {w.end}) is not a whole number of calendar months"
        )
    if months % 2:
        raise ValidationError(f"cannot halve an odd window of {months} months")
    mid = add_months(w.start, months // 2)
    return TimeWindow(w.start, mid), TimeWindow(mid, w.end)


@dataclass(frozen=True)
class NodePanel:
    """Per-node half-window observations, for nodes active in the first half."""

    nodes: tuple[str, ...]
    deg1: np.ndarray
    deg2: np.ndarray
    nd1: np.ndarray
    nd2: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)


def build_panel(
    store: EventStore,
    w1: TimeWindow,
    w2: TimeWindow,
    degree_mode: str = "ordered_pairs",
) -> NodePanel:
    """Assemble the half-window degree panel.

    A neighbour is any node sharing at least one edge (either direction) in
    the first half; degrees follow ``degree_mode`` consistently across halves.
    """
    if w1.end != w2.start:
        raise ValidationError("half windows must adjoin")
    n_vocab = len(store.node_ids)
    deg1 = window_degree_counts(store, w1, degree_mode)
    deg2 = window_degree_counts(store, w2, degree_mode)

    _, src, dst, _ = store.window_arrays(w1)
    active = np.zeros(n_vocab, dtype=bool)
    active[src] = True
    active[dst] = True
    members = np.flatnonzero(active)

    # undirected distinct neighbour pairs from half 1
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    pairs = np.unique(lo.astype(np.int64) * n_vocab + hi.astype(np.int64))
    pu = (pairs // n_vocab).astype(np.int64)
    pv = (pairs % n_vocab).astype(np.int64)
    owners = np.concatenate([pu, pv])
    nbrs = np.concatenate([pv, pu])
    order = np.argsort(owners, kind="stable")
    owners, nbrs = owners[order], nbrs[order]

    nd1 = np.zeros(n_vocab)
    nd2 = np.zeros(n_vocab)
    if owners.size:
        counts = np.bincount(owners, minlength=n_vocab)
        sums1 = np.bincount(owners, weights=deg1[nbrs], minlength=n_vocab)
        sums2 = np.bincount(owners, weights=deg2[nbrs], minlength=n_vocab)
        nz = counts > 0
        nd1[nz] = sums1[nz] / counts[nz]
        nd2[nz] = sums2[nz] / counts[nz]

    names = tuple(store.node_ids[int(i)] for i in members)
    return NodePanel(
        nodes=names,
        deg1=deg1[members].astype(np.int64),
        deg2=deg2[members].astype(np.int64),
        nd1=nd1[members],
        nd2=nd2[members],
    )


def pearson(xs, ys) -> float | None:
    """Product-moment correlation; None when n < 2 or a series is constant."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("series must be one-dimensional and equal length")
    n = x.size
    if n < 2:
        return None
    xd = x - x.mean()
    yd = y - y.mean()
    vx = float(xd @ xd)
    vy = float(yd @ yd)
    if vx == 0.0 or vy == 0.0:
        return None
    r = float(xd @ yd) / np.sqrt(vx * vy)
    return float(min(1.0, max(-1.0, r)))


def _average_ranks(x: np.ndarray) -> np.ndarray:
    _, inverse, counts = np.unique(x, return_inverse=True, return_counts=True)
    # rank of a tie group = mean of the positions it occupies (1-based)
    high = np.cumsum(counts)
    avg = high - (counts - 1) / 2.0
    return avg[inverse]


def spearman(xs, ys) -> float | None:
    """Rank correlation (average ranks for ties), via pearson on ranks."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("series must be one-dimensional and equal length")
    if x.size < 2:
        return None
    return pearson(_average_ranks(x), _average_ranks(y))


_CORRELATORS = {PEARSON: pearson, SPEARMAN: spearman}


@dataclass(frozen=True)
class TaxonomyResult:
    """Correlation values for one role class over one window (None = gap)."""

    window: TimeWindow
    midpoint: date
    role_class: RoleClass
    mobility: float | None
    neighbour_mobility: float | None
    philanthropy: float | None
    community: float | None
    n: int

    def value(self, measure: str) -> float | None:
        return getattr(self, measure)


def panel_measures(
    deg1, deg2, nd1, nd2, correlation: str = PEARSON
) -> dict[str, float | None]:
    """The four taxonomy correlations of one panel (or panel subset)."""
    corr = _CORRELATORS[correlation]
    return {
        "mobility": corr(deg1, deg2),
        "neighbour_mobility": corr(nd1, nd2),
        "philanthropy": corr(deg1, nd2),
        "community": corr(nd1, deg2),
    }


def taxonomy(
    store: EventStore,
    w: TimeWindow,
    roles: dict[str, RoleAssignment],
    degree_mode: str = "ordered_pairs",
    correlation: str = PEARSON,
) -> dict[RoleClass, TaxonomyResult]:
    """Per-role-class taxonomy correlations for one window.

    Roles must already be resolved for the whole window; unclassified nodes
    are excluded. Results are timestamped at the window's calendar midpoint.
    """
    w1, w2 = split_window(w)
    panel = build_panel(store, w1, w2, degree_mode)
    classes = [
        roles[n].role_class if n in roles else RoleClass.UNCLASSIFIED
        for n in panel.nodes
    ]
    out: dict[RoleClass, TaxonomyResult] = {}
    for rc in CLASSIFIED:
        mask = np.array([c is rc for c in classes], dtype=bool)
        n = int(mask.sum())
        vals = panel_measures(
            panel.deg1[mask], panel.deg2[mask],
            panel.nd1[mask], panel.nd2[mask],
            correlation,
        )
        out[rc] = TaxonomyResult(
            window=w, midpoint=w1.end, role_class=rc, n=n, **vals
        )
    return out
