"""Role-stratified organisational metrics over the interaction store.

Covers population and activity shares per hierarchy level, thread-origin
shares, upward/downward flow ratios between level pairs, working-group count
estimators, chairs-per-group ratios, first-promotion activity deltas, and
mailing-list lifecycle profiles.

Activity share is sent-only; active-node status is sent-or-received. Standard
deviations use the population form (divide by n).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from .events import (
    EventStore,
    TimeWindow,
    WindowPlan,
    add_months,
    window_active_ids,
    windows,
)
from .roles import (
    CLASSIFIED,
    GroupEvent,
    RoleAssignment,
    RoleClass,
    RoleInterval,
    RoleKind,
    group_spans,
)

#: Level pairs for flow ratios, lower level first.
FLOW_PAIRS = (
    (RoleClass.RP, RoleClass.WGC),
    (RoleClass.RP, RoleClass.AD),
    (RoleClass.WGC, RoleClass.AD),
)


@dataclass(frozen=True, slots=True)
class OriginEvent:
    """A thread-starting email: sender posts to a list, no receiver."""

    sender: str
    list_id: str
    time: date
    seq: int = 0


class OriginStore:
    """Columnar, time-ordered view of origin events."""

    __slots__ = ("_times", "senders", "lists", "_seq")

    def __init__(self, origins: list[OriginEvent]):
        ordered = sorted(origins, key=lambda o: (o.time.toordinal(), o.seq))
        self._times = np.array([o.time.toordinal() for o in ordered], np.int64)
        self._seq = np.array([o.seq for o in ordered], np.int64)
        self.senders = np.array([o.sender for o in ordered], dtype=object)
        self.lists = np.array([o.list_id for o in ordered], dtype=object)

    def __len__(self) -> int:
        return int(self._times.size)

    def window_slice(self, w: TimeWindow) -> tuple[int, int]:
        lo = int(np.searchsorted(self._times, w.start.toordinal(), side="left"))
        hi = int(np.searchsorted(self._times, w.end.toordinal(), side="left"))
        return lo, hi

    def events(self) -> list[OriginEvent]:
        return [
            OriginEvent(self.senders[i], self.lists[i],
                        date.fromordinal(int(self._times[i])), int(self._seq[i]))
            for i in range(len(self))
        ]


def _class_of(roles: dict[str, RoleAssignment], node: str) -> RoleClass:
    assignment = roles.get(node)
    return assignment.role_class if assignment else RoleClass.UNCLASSIFIED


def population_proportions(
    store: EventStore, roles: dict[str, RoleAssignment], w: TimeWindow
) -> dict[RoleClass, float] | None:
    """Share of active classified nodes per role class; None when no one is."""
    ids = window_active_ids(store, w)
    tallies = {rc: 0 for rc in CLASSIFIED}
    for i in ids.tolist():
        rc = _class_of(roles, store.node_ids[i])
        if rc is not RoleClass.UNCLASSIFIED:
            tallies[rc] += 1
    total = sum(tallies.values())
    if total == 0:
        return None
    return {rc: tallies[rc] / total for rc in CLASSIFIED}


def activity_proportions(
    store: EventStore, roles: dict[str, RoleAssignment], w: TimeWindow
) -> dict[RoleClass, float] | None:
    """Share of sent events per role class among classified senders."""
    _, src, _, _ = store.window_arrays(w)
    tallies = {rc: 0 for rc in CLASSIFIED}
    counts = np.bincount(src, minlength=len(store.node_ids))
    for i in np.flatnonzero(counts).tolist():
        rc = _class_of(roles, store.node_ids[i])
        if rc is not RoleClass.UNCLASSIFIED:
            tallies[rc] += int(counts[i])
    total = sum(tallies.values())
    if total == 0:
        return None
    return {rc: tallies[rc] / total for rc in CLASSIFIED}


def origin_proportions(
    origins: OriginStore | list[OriginEvent],
    roles: dict[str, RoleAssignment],
    w: TimeWindow,
) -> dict[RoleClass, float] | None:
    """Share of thread-origin events per role class among classified senders."""
    if not isinstance(origins, OriginStore):
        origins = OriginStore(origins)
    lo, hi = origins.window_slice(w)
    tallies = {rc: 0 for rc in CLASSIFIED}
    for sender in origins.senders[lo:hi].tolist():
        rc = _class_of(roles, sender)
        if rc is not RoleClass.UNCLASSIFIED:
            tallies[rc] += 1
    total = sum(tallies.values())
    if total == 0:
        return None
    return {rc: tallies[rc] / total for rc in CLASSIFIED}


@dataclass(frozen=True, slots=True)
class FlowRatio:
    """Upward vs downward event counts between one pair of levels."""

    window: TimeWindow
    low: RoleClass
    high: RoleClass
    upward_count: int
    downward_count: int

    @property
    def proportion_up(self) -> float | None:
        total = self.upward_count + self.downward_count
        if total == 0:
            return None
        return self.upward_count / total

    @property
    def pair_label(self) -> str:
        return f"{self.low.value}->{self.high.value}"


def flow_ratios(
    store: EventStore, roles: dict[str, RoleAssignment], w: TimeWindow
) -> list[FlowRatio]:
    """Per level pair, the number of events flowing up and down the hierarchy."""
    _, src, dst, _ = store.window_arrays(w)
    n_vocab = len(store.node_ids)
    codes = np.full(n_vocab, -1, dtype=np.int64)
    rank = {RoleClass.RP: 0, RoleClass.WGC: 1, RoleClass.AD: 2}
    for node, assignment in roles.items():
        i = store.node_id_of(node)
        if i is not None and assignment.role_class in rank:
            codes[i] = rank[assignment.role_class]
    cs = codes[src]
    cd = codes[dst]
    ok = (cs >= 0) & (cd >= 0)
    pair_counts = np.bincount(cs[ok] * 3 + cd[ok], minlength=9)
    out = []
    for low, high in FLOW_PAIRS:
        up = int(pair_counts[rank[low] * 3 + rank[high]])
        down = int(pair_counts[rank[high] * 3 + rank[low]])
        out.append(FlowRatio(w, low, high, up, down))
    return out


# -- working-group series ----------------------------------------------------

def wgc_roles_vs_individuals(
    table: list[RoleInterval], t: date
) -> tuple[int, int]:
    """(open WGC intervals at t, distinct persons holding them)."""
    holders = [
        iv.person
        for iv in table
        if iv.kind is RoleKind.WGC and iv.start <= t and (iv.end is None or t < iv.end)
    ]
    return len(holders), len(set(holders))


def wg_count_from_spans(
    spans: dict[str, tuple[date, date | None]], t: date
) -> int:
    return sum(
        1 for start, end in spans.values() if start <= t and (end is None or t < end)
    )


def wg_count_from_group_events(group_events: list[GroupEvent], t: date) -> int:
    """Groups whose lifecycle span covers t."""
    return wg_count_from_spans(group_spans(group_events), t)


def wg_list_activity_spans(
    store: EventStore, wg_lists: set[str]
) -> dict[str, tuple[date, date]]:
    """(first event, last event) per working-group mailing list with traffic."""
    out: dict[str, tuple[date, date]] = {}
    times = store.times
    lst = store.list_idx
    for li, name in enumerate(store.list_ids):
        if name not in wg_lists:
            continue
        idx = np.flatnonzero(lst == li)
        if idx.size:
            out[name] = (
                date.fromordinal(int(times[idx[0]])),
                date.fromordinal(int(times[idx[-1]])),
            )
    return out


def wg_count_from_list_activity(
    store: EventStore,
    t: date,
    wg_lists: set[str],
    truncate_at: date | None = date(2021, 1, 1),
) -> int | None:
    """WG lists active at t (first event <= t <= last event).

    Returns None past the truncation date: near the end of the data, last
    events understate true list lifetimes, so the estimate is cut off.
    """
    if truncate_at is not None and t >= truncate_at:
        return None
    spans = wg_list_activity_spans(store, wg_lists)
    return sum(1 for first, last in spans.values() if first <= t <= last)


def wgcs_per_wg(
    table: list[RoleInterval],
    group_events: list[GroupEvent],
    store: EventStore,
    wg_lists: set[str],
    t: date,
    truncate_at: date | None = date(2021, 1, 1),
) -> tuple[float | None, float | None]:
    """Mean chairs per group under both WG-count estimators (None on zero)."""
    role_count, _ = wgc_roles_vs_individuals(table, t)
    by_events = wg_count_from_group_events(group_events, t)
    by_lists = wg_count_from_list_activity(store, t, wg_lists, truncate_at)
    r1 = role_count / by_events if by_events else None
    r2 = (role_count / by_lists) if by_lists else None
    return r1, r2


@dataclass(frozen=True, slots=True)
class WgSeriesPoint:
    """One sample of the working-group landscape (None values are gaps)."""

    date: date
    wgc_roles: int
    wgc_individuals: int
    count_from_group_events: int
    count_from_list_activity: int | None
    per_wg_from_group_events: float | None
    per_wg_from_list_activity: float | None


def wg_series(
    table: list[RoleInterval],
    group_events: list[GroupEvent],
    store: EventStore,
    wg_lists: set[str],
    dates: list[date],
    truncate_at: date | None = date(2021, 1, 1),
) -> list[WgSeriesPoint]:
    """Sample chair counts, WG-count estimates, and their ratios over time."""
    spans = group_spans(group_events)
    out = []
    for t in dates:
        roles_n, individuals = wgc_roles_vs_individuals(table, t)
        by_events = wg_count_from_spans(spans, t)
        by_lists = wg_count_from_list_activity(store, t, wg_lists, truncate_at)
        out.append(
            WgSeriesPoint(
                date=t,
                wgc_roles=roles_n,
                wgc_individuals=individuals,
                count_from_group_events=by_events,
                count_from_list_activity=by_lists,
                per_wg_from_group_events=(
                    roles_n / by_events if by_events else None
                ),
                per_wg_from_list_activity=(
                    roles_n / by_lists if by_lists else None
                ),
            )
        )
    return out


# -- promotion deltas ---------------------------------------------------------

@dataclass(frozen=True)
class BeforeAfterStats:
    """Mean +/- sd of events in the year before vs after first taking a role."""

    role_kind: RoleKind
    n: int
    sent_before: tuple[float, float]
    received_before: tuple[float, float]
    sent_after: tuple[float, float]
    received_after: tuple[float, float]


def _mean_sd(values: list[int]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


def before_after_role_activity(
    store: EventStore,
    table: list[RoleInterval],
    role_kind: RoleKind,
) -> BeforeAfterStats | None:
    """Sent/received event counts around each person's first such role.

    Only persons whose first role start leaves a full year of data on both
    sides are eligible; returns None when nobody qualifies.
    """
    extent = store.extent
    if extent is None:
        return None
    data_start, data_end = extent
    firsts: dict[str, date] = {}
    for iv in table:
        if iv.kind is role_kind:
            cur = firsts.get(iv.person)
            if cur is None or iv.start < cur:
                firsts[iv.person] = iv.start

    sent_b, recv_b, sent_a, recv_a = [], [], [], []
    times = store.times
    for person in sorted(firsts):
        start = firsts[person]
        before = add_months(start, -12)
        after = add_months(start, 12)
        if before < data_start or after > data_end:
            continue
        nid = store.node_id_of(person)
        lob = int(np.searchsorted(times, before.toordinal(), side="left"))
        mid = int(np.searchsorted(times, start.toordinal(), side="left"))
        hia = int(np.searchsorted(times, after.toordinal(), side="left"))
        if nid is None:
            sb = rb = sa = ra = 0
        else:
            sb = int(np.count_nonzero(store.src[lob:mid] == nid))
            rb = int(np.count_nonzero(store.dst[lob:mid] == nid))
            sa = int(np.count_nonzero(store.src[mid:hia] == nid))
            ra = int(np.count_nonzero(store.dst[mid:hia] == nid))
        sent_b.append(sb)
        recv_b.append(rb)
        sent_a.append(sa)
        recv_a.append(ra)

    if not sent_b:
        return None
    return BeforeAfterStats(
        role_kind=role_kind,
        n=len(sent_b),
        sent_before=_mean_sd(sent_b),
        received_before=_mean_sd(recv_b),
        sent_after=_mean_sd(sent_a),
        received_after=_mean_sd(recv_a),
    )


# -- list lifecycle ------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class LifecycleRow:
    age_years: int
    mean: float
    median: float
    sd: float
    n_lists: int


def wg_lifecycle_profile(
    store: EventStore, wg_lists: set[str]
) -> list[LifecycleRow]:
    """Reply volume per year of list life, over lists old enough for that year.

    A list contributes to age k only when its last event is at least k+1
    years after its first, so partially observed years never enter the stats.
    """
    spans = wg_list_activity_spans(store, wg_lists)
    times = store.times
    lst = store.list_idx
    per_age: dict[int, list[int]] = {}
    for name in sorted(spans):
        first, last = spans[name]
        li = store.list_ids.index(name)
        mask = lst == li
        list_times = times[mask]
        k = 0
        while add_months(first, 12 * (k + 1)) <= last:
            y0 = add_months(first, 12 * k).toordinal()
            y1 = add_months(first, 12 * (k + 1)).toordinal()
            n = int(
                np.searchsorted(list_times, y1, side="left")
                - np.searchsorted(list_times, y0, side="left")
            )
            per_age.setdefault(k, []).append(n)
            k += 1
    out = []
    for k in sorted(per_age):
        arr = np.asarray(per_age[k], dtype=float)
        out.append(
            LifecycleRow(
                age_years=k,
                mean=float(arr.mean()),
                median=float(np.median(arr)),
                sd=float(arr.std()),
                n_lists=int(arr.size),
            )
        )
    return out


def active_participant_series(
    store: EventStore, plan: WindowPlan
) -> list[tuple[TimeWindow, int]]:
    """Count of active nodes per plan window."""
    return [(w, int(window_active_ids(store, w).size)) for w in windows(plan)]
