"""Edge-event store, sliding window schedule, and window-graph aggregation.

The event store is the backbone of every other computation: an immutable,
columnar collection of directed day-resolution interactions, totally ordered
by ``(time, seq)``. All window operations are half-open ``[start, end)`` so
adjoining windows never double-count an event.
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .exceptions import ValidationError

_EPOCH_ORDINAL = date(1970, 1, 1).toordinal()


def add_months(d: date, months: int) -> date:
    """Shift a date by whole calendar months, clamping the day to month end.

    2013-01-31 plus one month is 2013-02-28: month arithmetic is exact,
    the day-of-month is clamped only when the target month is shorter.
    """
    total = d.year * 12 + (d.month - 1) + months
    year, month = divmod(total, 12)
    month += 1
    day = min(d.day, calendar.monthrange(year, month)[1])
    return date(year, month, day)


def whole_months_between(start: date, end: date) -> int | None:
    """Number of months k with ``add_months(start, k) == end``, or None."""
    if end <= start:
        return None
    approx = (end.year - start.year) * 12 + (end.month - start.month)
    for k in (approx - 1, approx, approx + 1):
        if k > 0 and add_months(start, k) == end:
            return k
    return None


@dataclass(frozen=True, slots=True)
class EdgeEvent:
    """One directed interaction: sender replied to receiver on a given day.

    ``seq`` is the ingestion sequence number; it breaks ties between events
    sharing a day so that every order-sensitive computation is deterministic.
    """

    sender: str
    receiver: str
    time: date
    list_id: str | None = None
    seq: int = 0

    def __post_init__(self):
        if self.sender == self.receiver:
            raise ValidationError(
                f"self-loop event (seq={self.seq}): sender and receiver are "
                f"both {self.sender!r}"
            )
        if self.seq < 0:
            raise ValidationError(f"negative seq {self.seq}")


@dataclass(frozen=True, slots=True)
class TimeWindow:
    """Half-open interval of days ``[start, end)``."""

    start: date
    end: date

    def __post_init__(self):
        if self.start >= self.end:
            raise ValidationError(f"empty window [{self.start}, {self.end})")

    def contains(self, d: date) -> bool:
        return self.start <= d < self.end


@dataclass(frozen=True, slots=True)
class WindowPlan:
    """Sliding-window schedule: fixed-length windows stepped by a stride."""

    span_start: date
    span_end: date
    length_months: int = 12
    stride_months: int = 1

    def __post_init__(self):
        if self.length_months < 1:
            raise ValidationError("window length must be at least one month")
        if self.stride_months < 1:
            raise ValidationError("stride must be at least one month")
        if self.span_end <= self.span_start:
            raise ValidationError("span_end must follow span_start")


def windows(plan: WindowPlan) -> list[TimeWindow]:
    """Expand a plan into its window list.

    Window i is ``[s_i, s_i + length)`` with ``s_i = span_start + i*stride``
    (months added from span_start each time so clamping never drifts).
    Windows whose end would pass span_end are dropped; a span shorter than
    one window yields an empty list.
    """
    out: list[TimeWindow] = []
    i = 0
    while True:
        start = add_months(plan.span_start, i * plan.stride_months)
        end = add_months(start, plan.length_months)
        if end > plan.span_end:
            break
        out.append(TimeWindow(start, end))
        i += 1
    return out


class EventStore:
    """Immutable store of edge events sorted by ``(time, seq)``.

    Internally columnar (numpy arrays over an interned node vocabulary) so
    window slicing, degrees, and activity are vectorized; the dataclass view
    is materialized on demand.
    """

    __slots__ = (
        "_times", "_seq", "_src", "_dst", "_list", "node_ids", "list_ids",
        "_node_index",
    )

    def __init__(self, times, seq, src, dst, list_idx, node_ids, list_ids):
        self._times = times
        self._seq = seq
        self._src = src
        self._dst = dst
        self._list = list_idx
        self.node_ids = node_ids
        self.list_ids = list_ids
        self._node_index = {n: i for i, n in enumerate(node_ids)}
        for arr in (times, seq, src, dst, list_idx):
            arr.setflags(write=False)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_events(cls, events: Sequence[EdgeEvent]) -> "EventStore":
        n = len(events)
        senders = np.array([e.sender for e in events], dtype=object)
        receivers = np.array([e.receiver for e in events], dtype=object)
        times = np.fromiter((e.time.toordinal() for e in events), np.int64, n)
        seq = np.fromiter((e.seq for e in events), np.int64, n)
        lists = np.array([e.list_id or "" for e in events], dtype=object)
        return cls.from_arrays(senders, receivers, times, seq, lists)

    @classmethod
    def from_arrays(cls, senders, receivers, time_ordinals, seq, lists) -> "EventStore":
        """Fast path from parallel arrays (senders/receivers/lists as strings)."""
        senders = np.asarray(senders, dtype=object)
        receivers = np.asarray(receivers, dtype=object)
        times = np.asarray(time_ordinals, dtype=np.int64)
        seq = np.asarray(seq, dtype=np.int64)
        lists = np.asarray(lists, dtype=object)

        if senders.size:
            loops = senders == receivers
            if loops.any():
                bad = int(np.flatnonzero(loops)[0])
                raise ValidationError(
                    f"self-loop event (seq={int(seq[bad])}): sender and "
                    f"receiver are both {senders[bad]!r}"
                )
            uniq, counts = np.unique(seq, return_counts=True)
            if (counts > 1).any():
                dup = int(uniq[counts > 1][0])
                raise ValidationError(f"duplicate seq {dup} in event input")

        order = np.lexsort((seq, times))
        senders, receivers = senders[order], receivers[order]
        times, seq, lists = times[order], seq[order], lists[order]

        node_ids = tuple(sorted(set(senders.tolist()) | set(receivers.tolist())))
        node_index = {n: i for i, n in enumerate(node_ids)}
        src = np.fromiter((node_index[s] for s in senders.tolist()), np.int64, senders.size)
        dst = np.fromiter((node_index[r] for r in receivers.tolist()), np.int64, receivers.size)

        list_ids = tuple(sorted({l for l in lists.tolist() if l}))
        list_index = {l: i for i, l in enumerate(list_ids)}
        list_idx = np.fromiter(
            (list_index.get(l, -1) for l in lists.tolist()), np.int64, lists.size
        )
        return cls(times, seq, src, dst, list_idx, node_ids, list_ids)

    # -- basic accessors ---------------------------------------------------

    def __len__(self) -> int:
        return int(self._times.size)

    @property
    def extent(self) -> tuple[date, date] | None:
        """(first, last) event dates, or None for an empty store."""
        if not len(self):
            return None
        return (
            date.fromordinal(int(self._times[0])),
            date.fromordinal(int(self._times[-1])),
        )

    def events(self) -> Iterator[EdgeEvent]:
        """Iterate events in (time, seq) order."""
        for i in range(len(self)):
            yield self.event_at(i)

    def event_at(self, i: int) -> EdgeEvent:
        li = int(self._list[i])
        return EdgeEvent(
            sender=self.node_ids[int(self._src[i])],
            receiver=self.node_ids[int(self._dst[i])],
            time=date.fromordinal(int(self._times[i])),
            list_id=self.list_ids[li] if li >= 0 else None,
            seq=int(self._seq[i]),
        )

    def node_id_of(self, node: str) -> int | None:
        return self._node_index.get(node)

    # -- window slicing ----------------------------------------------------

    def window_slice(self, w: TimeWindow) -> tuple[int, int]:
        """Index range [lo, hi) of events with dates in the window."""
        lo = int(np.searchsorted(self._times, w.start.toordinal(), side="left"))
        hi = int(np.searchsorted(self._times, w.end.toordinal(), side="left"))
        return lo, hi

    def window_arrays(self, w: TimeWindow):
        """(times, src, dst, list_idx) slices for a window (read-only views)."""
        lo, hi = self.window_slice(w)
        return (
            self._times[lo:hi], self._src[lo:hi],
            self._dst[lo:hi], self._list[lo:hi],
        )

    @property
    def times(self):
        return self._times

    @property
    def src(self):
        return self._src

    @property
    def dst(self):
        return self._dst

    @property
    def list_idx(self):
        return self._list


def build_store(events: Sequence[EdgeEvent]) -> EventStore:
    """Validate and freeze a list of events into an ordered store."""
    return EventStore.from_events(events)


@dataclass(frozen=True)
class WindowedGraph:
    """Aggregation of one window's events into a directed multigraph summary.

    ``edges`` holds distinct ordered pairs; ``multiplicity`` maps each pair to
    the number of events behind it, so multiplicities sum to the window's
    event count.
    """

    window: TimeWindow
    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]
    multiplicity: Mapping[tuple[str, str], int] = field(default_factory=dict)


def window_graph(store: EventStore, w: TimeWindow) -> WindowedGraph:
    """Aggregate events with ``start <= time < end`` into a WindowedGraph."""
    _, src, dst, _ = store.window_arrays(w)
    mult: dict[tuple[str, str], int] = {}
    ids = store.node_ids
    for s, r in zip(src.tolist(), dst.tolist()):
        key = (ids[s], ids[r])
        mult[key] = mult.get(key, 0) + 1
    nodes = frozenset(n for pair in mult for n in pair)
    return WindowedGraph(w, nodes, frozenset(mult), mult)


def degree(g: WindowedGraph, node: str, mode: str = "ordered_pairs") -> int:
    """Degree of a node in a window graph.

    ``ordered_pairs`` (default) counts distinct directed pairs incident to the
    node, so a->b and b->a are two edges. ``neighbours`` counts distinct other
    endpoints regardless of direction.
    """
    if mode == "ordered_pairs":
        return sum(1 for (a, b) in g.edges if a == node or b == node)
    if mode == "neighbours":
        return len({b if a == node else a for (a, b) in g.edges if node in (a, b)})
    raise ValueError(f"unknown degree mode {mode!r}")


def activity(store: EventStore, w: TimeWindow, node: str) -> int:
    """Events (duplicates included) in which the node takes part within w."""
    nid = store.node_id_of(node)
    if nid is None:
        return 0
    _, src, dst, _ = store.window_arrays(w)
    return int(np.count_nonzero((src == nid) | (dst == nid)))


def active_nodes(store: EventStore, w: TimeWindow) -> set[str]:
    """Nodes appearing in at least one event of the window."""
    _, src, dst, _ = store.window_arrays(w)
    ids = np.union1d(src, dst)
    return {store.node_ids[int(i)] for i in ids}


# -- vectorized per-vocabulary helpers (used by mobility and org metrics) ---

def window_degree_counts(
    store: EventStore, w: TimeWindow, mode: str = "ordered_pairs"
) -> np.ndarray:
    """Degree of every vocabulary node in the window graph, as one array."""
    _, src, dst, _ = store.window_arrays(w)
    n = len(store.node_ids)
    if src.size == 0:
        return np.zeros(n, dtype=np.int64)
    pair = src * n + dst
    if mode == "ordered_pairs":
        uniq = np.unique(pair)
    elif mode == "neighbours":
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        uniq = np.unique(lo * n + hi)
    else:
        raise ValueError(f"unknown degree mode {mode!r}")
    ends = np.concatenate([uniq // n, uniq % n])
    return np.bincount(ends, minlength=n).astype(np.int64)


def window_activity_counts(store: EventStore, w: TimeWindow) -> np.ndarray:
    """Per-vocabulary-node event participation counts (duplicates included)."""
    _, src, dst, _ = store.window_arrays(w)
    n = len(store.node_ids)
    both = np.concatenate([src, dst])
    return np.bincount(both, minlength=n).astype(np.int64)


def window_active_ids(store: EventStore, w: TimeWindow) -> np.ndarray:
    """Sorted vocabulary ids of nodes active in the window."""
    _, src, dst, _ = store.window_arrays(w)
    return np.union1d(src, dst)
