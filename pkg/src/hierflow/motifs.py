"""Delta-bounded, temporally ordered three-edge motifs on at most three nodes.

A motif instance is an ordered triple of distinct events (e1, e2, e3) with
strictly increasing (time, seq) order, last-minus-first time at most delta,
and at most three distinct endpoints. Instances are counted combinatorially
(the same event may take part in many instances) and grouped into five
categories: two-node, outward star, inward star, mixed star, triangle.

``enumerate_motifs`` is the production counter (compiled kernels);
``brute_force_motifs`` is the literal O(m^3) oracle used to verify it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _motif_kernels as _k
from .events import EventStore, TimeWindow
from .roles import CLASSIFIED, RoleAssignment, RoleClass


class MotifCategory(str, Enum):
    TWO_NODE = "TWO_NODE"
    OUTWARD_STAR = "OUTWARD_STAR"
    INWARD_STAR = "INWARD_STAR"
    MIXED_STAR = "MIXED_STAR"
    TRIANGLE = "TRIANGLE"


#: Kernel column order.
_KERNEL_CATEGORIES = (
    MotifCategory.OUTWARD_STAR,
    MotifCategory.INWARD_STAR,
    MotifCategory.MIXED_STAR,
    MotifCategory.TRIANGLE,
    MotifCategory.TWO_NODE,
)

#: The four three-node categories used for proportions.
THREE_NODE_CATEGORIES = (
    MotifCategory.OUTWARD_STAR,
    MotifCategory.INWARD_STAR,
    MotifCategory.MIXED_STAR,
    MotifCategory.TRIANGLE,
)

CATEGORY_ORDER = THREE_NODE_CATEGORIES + (MotifCategory.TWO_NODE,)

ANCHOR_CENTRE = "centre"
ANCHOR_FIRST_SENDER = "first_sender"

_ANCHOR_CODES = {_k.ANCHOR_CENTRE: ANCHOR_CENTRE,
                 _k.ANCHOR_FIRST_SENDER: ANCHOR_FIRST_SENDER}


def _anchor_code(anchor: str) -> int:
    for code, name in _ANCHOR_CODES.items():
        if name == anchor:
            return code
    raise ValueError(f"unknown anchor mode {anchor!r}")


@dataclass(frozen=True, eq=True)
class MotifTally:
    """Per-anchor-node, per-category instance counts for one window."""

    window: TimeWindow
    counts: dict[tuple[str, MotifCategory], int]

    def category_totals(self) -> dict[MotifCategory, int]:
        out = {cat: 0 for cat in CATEGORY_ORDER}
        for (_, cat), n in self.counts.items():
            out[cat] += n
        return out


# -- signatures --------------------------------------------------------------

def motif_signature(
    edges: list[tuple[object, object]]
) -> tuple[tuple[int, int], ...]:
    """Canonical order-and-isomorphism class of an ordered edge triple.

    Nodes are renamed to slots 0, 1, 2 in order of first appearance, so the
    first edge is always (0, 1) and later edges are oriented relative to it.
    """
    slots: dict[object, int] = {}
    sig = []
    for a, b in edges:
        for node in (a, b):
            if node not in slots:
                slots[node] = len(slots)
        if len(slots) > 3:
            raise ValueError("edge triple spans more than three nodes")
        sig.append((slots[a], slots[b]))
    return tuple(sig)


def classify_signature(sig: tuple[tuple[int, int], ...]) -> MotifCategory:
    """Map a canonical signature to its category."""
    nodes = {x for e in sig for x in e}
    if len(nodes) == 2:
        return MotifCategory.TWO_NODE
    common = set(sig[0]) & set(sig[1]) & set(sig[2])
    if common:
        centre = common.pop()
        outward = sum(1 for a, _ in sig if a == centre)
        if outward == 3:
            return MotifCategory.OUTWARD_STAR
        if outward == 0:
            return MotifCategory.INWARD_STAR
        return MotifCategory.MIXED_STAR
    return MotifCategory.TRIANGLE


def all_signatures() -> list[tuple[tuple[int, int], ...]]:
    """All 36 canonical three-edge signatures over at most three nodes."""
    out = []
    pairs3 = [(a, b) for a in range(3) for b in range(3) if a != b]
    for e2 in pairs3:
        for e3 in pairs3:
            edges = [(0, 1), e2, e3]
            sig = motif_signature(edges)
            if sig == tuple(edges) and sig not in out:
                out.append(sig)
    return out


# -- counting ----------------------------------------------------------------

def _window_ints(store: EventStore, w: TimeWindow):
    t, src, dst, _ = store.window_arrays(w)
    if src.size == 0:
        return t, src, dst, np.empty(0, np.int64)
    uniq = np.unique(np.concatenate([src, dst]))
    csrc = np.searchsorted(uniq, src).astype(np.int64)
    cdst = np.searchsorted(uniq, dst).astype(np.int64)
    return t.astype(np.int64), csrc, cdst, uniq


def enumerate_motifs(
    store: EventStore,
    w: TimeWindow,
    delta_days: int,
    anchor: str = ANCHOR_CENTRE,
) -> MotifTally:
    """Count all motif instances in the window, attributed per anchor rule.

    The default rule anchors stars at their centre, triangles at each of the
    three participants and two-node motifs at both nodes; ``first_sender``
    anchors every instance at the sender of its earliest edge.
    """
    if delta_days < 0:
        raise ValueError("delta must be non-negative")
    t, csrc, cdst, uniq = _window_ints(store, w)
    counts: dict[tuple[str, MotifCategory], int] = {}
    if csrc.size >= 3:
        mat = _k.count_motifs(csrc, cdst, t, np.int64(uniq.size),
                              np.int64(delta_days), _anchor_code(anchor))
        nz = np.nonzero(mat)
        for i, j in zip(nz[0].tolist(), nz[1].tolist()):
            node = store.node_ids[int(uniq[i])]
            counts[(node, _KERNEL_CATEGORIES[j])] = int(mat[i, j])
    return MotifTally(window=w, counts=counts)


def brute_force_motifs(
    store: EventStore,
    w: TimeWindow,
    delta_days: int,
    anchor: str = ANCHOR_CENTRE,
) -> MotifTally:
    """Literal triple enumeration applying the motif definitions verbatim.

    Cubic in the window's event count; intended as the testing oracle for
    ``enumerate_motifs`` on small inputs.
    """
    if delta_days < 0:
        raise ValueError("delta must be non-negative")
    _anchor_code(anchor)
    first_sender = anchor == ANCHOR_FIRST_SENDER
    t, src, dst, _ = store.window_arrays(w)
    t = t.tolist()
    src = src.tolist()
    dst = dst.tolist()
    m = len(t)
    agg: dict[tuple[int, MotifCategory], int] = {}

    def bump(node: int, cat: MotifCategory):
        key = (node, cat)
        agg[key] = agg.get(key, 0) + 1

    for i in range(m):
        ti = t[i]
        a, b = src[i], dst[i]
        for j in range(i + 1, m):
            if t[j] - ti > delta_days:
                break
            c, d = src[j], dst[j]
            for k in range(j + 1, m):
                if t[k] - ti > delta_days:
                    break
                e, f = src[k], dst[k]
                nodes = {a, b, c, d, e, f}
                if len(nodes) > 3:
                    continue
                if len(nodes) == 2:
                    cat = MotifCategory.TWO_NODE
                    anchors = (a,) if first_sender else (a, b)
                else:
                    common = {a, b} & {c, d} & {e, f}
                    if common:
                        centre = common.pop()
                        outward = (a == centre) + (c == centre) + (e == centre)
                        if outward == 3:
                            cat = MotifCategory.OUTWARD_STAR
                        elif outward == 0:
                            cat = MotifCategory.INWARD_STAR
                        else:
                            cat = MotifCategory.MIXED_STAR
                        anchors = (a,) if first_sender else (centre,)
                    else:
                        cat = MotifCategory.TRIANGLE
                        anchors = (a,) if first_sender else tuple(nodes)
                for node in anchors:
                    bump(node, cat)

    ids = store.node_ids
    counts = {(ids[node], cat): n for (node, cat), n in agg.items()}
    return MotifTally(window=w, counts=counts)


# -- role aggregation --------------------------------------------------------

def aggregate_by_role(
    tally: MotifTally, roles: dict[str, RoleAssignment]
) -> dict[tuple[RoleClass, MotifCategory], int]:
    """Sum anchored counts into role classes; unclassified anchors drop."""
    out = {(rc, cat): 0 for rc in CLASSIFIED for cat in CATEGORY_ORDER}
    for (node, cat), n in tally.counts.items():
        assignment = roles.get(node)
        if assignment is None or assignment.role_class is RoleClass.UNCLASSIFIED:
            continue
        out[(assignment.role_class, cat)] += n
    return out


def role_motif_proportions(
    tally: MotifTally, roles: dict[str, RoleAssignment]
) -> dict[tuple[RoleClass, MotifCategory], float | None]:
    """Four-way motif proportions per role class.

    Normalization runs over the four three-node categories only; two-node
    counts are tracked but carry no proportion. A class with no three-node
    motifs gets None for all four (undefined, not zero).
    """
    sums = aggregate_by_role(tally, roles)
    out: dict[tuple[RoleClass, MotifCategory], float | None] = {}
    for rc in CLASSIFIED:
        total = sum(sums[(rc, cat)] for cat in THREE_NODE_CATEGORIES)
        for cat in THREE_NODE_CATEGORIES:
            out[(rc, cat)] = sums[(rc, cat)] / total if total else None
        out[(rc, MotifCategory.TWO_NODE)] = None
    return out
