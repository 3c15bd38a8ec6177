"""Hierarchical role resolution per window and edge direction labelling.

Three role classes are ranked RP < WGC < AD. A node carries a class for a
window only when a single role interval covers the whole window; partial
coverage makes it UNCLASSIFIED for that window, and RP is reserved for people
who hold no role interval anywhere in the data.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum

from .events import TimeWindow
from .exceptions import ValidationError


class RoleKind(str, Enum):
    WGC = "WGC"
    AD = "AD"


class RoleClass(str, Enum):
    RP = "RP"
    WGC = "WGC"
    AD = "AD"
    UNCLASSIFIED = "UNCLASSIFIED"


ROLE_RANK = {RoleClass.RP: 0, RoleClass.WGC: 1, RoleClass.AD: 2}

CLASSIFIED = (RoleClass.RP, RoleClass.WGC, RoleClass.AD)


class EdgeDirection(str, Enum):
    UP = "UP"
    DOWN = "DOWN"
    LATERAL = "LATERAL"
    UNCLASSIFIED = "UNCLASSIFIED"


@dataclass(frozen=True, slots=True)
class RoleInterval:
    """One person holding one role over a half-open span [start, end).

    ``end`` of None means the role was never observed to finish. WGC
    intervals name the group chaired; AD intervals carry no group.
    """

    person: str
    kind: RoleKind
    start: date
    end: date | None = None
    group: str | None = None

    def __post_init__(self):
        if self.end is not None and self.end <= self.start:
            raise ValidationError(
                f"role interval for {self.person!r} ends on or before its "
                f"start ({self.start}..{self.end})"
            )
        if self.kind is RoleKind.WGC and not self.group:
            raise ValidationError(f"WGC interval for {self.person!r} lacks a group")
        if self.kind is RoleKind.AD and self.group:
            raise ValidationError(f"AD interval for {self.person!r} carries a group")

    def covers(self, w: TimeWindow) -> bool:
        return self.start <= w.start and (self.end is None or self.end >= w.end)

    def overlaps(self, w: TimeWindow) -> bool:
        return self.start < w.end and (self.end is None or self.end > w.start)


@dataclass(frozen=True, slots=True)
class RoleAssignment:
    person: str
    window: TimeWindow
    role_class: RoleClass


def resolve_roles(
    table: list[RoleInterval], w: TimeWindow, nodes: set[str] | list[str]
) -> dict[str, RoleAssignment]:
    """Assign one role class per node for the window.

    AD wins over WGC when both cover the whole window. Any interval that
    touches the window without a same-kind full cover leaves the person
    UNCLASSIFIED, as does holding intervals only in the past or future;
    RP means the person appears nowhere in the role table.
    """
    by_person: dict[str, list[RoleInterval]] = {}
    for iv in table:
        by_person.setdefault(iv.person, []).append(iv)

    out: dict[str, RoleAssignment] = {}
    for node in nodes:
        ivs = by_person.get(node)
        if not ivs:
            cls = RoleClass.RP
        elif any(iv.kind is RoleKind.AD and iv.covers(w) for iv in ivs):
            cls = RoleClass.AD
        elif any(iv.kind is RoleKind.WGC and iv.covers(w) for iv in ivs):
            cls = RoleClass.WGC
        else:
            cls = RoleClass.UNCLASSIFIED
        out[node] = RoleAssignment(node, w, cls)
    return out


def label_edge(src_role: RoleClass, dst_role: RoleClass) -> EdgeDirection:
    """UP when the sender ranks below the receiver, DOWN for the reverse."""
    if RoleClass.UNCLASSIFIED in (src_role, dst_role):
        return EdgeDirection.UNCLASSIFIED
    a, b = ROLE_RANK[src_role], ROLE_RANK[dst_role]
    if a < b:
        return EdgeDirection.UP
    if a > b:
        return EdgeDirection.DOWN
    return EdgeDirection.LATERAL


class GroupEventKind(str, Enum):
    CHAIR_ADDED = "chair_added"
    CHAIR_REMOVED = "chair_removed"
    GROUP_CREATED = "group_created"
    GROUP_CONCLUDED = "group_concluded"
    GROUP_ACTIVATED = "group_activated"


@dataclass(frozen=True, slots=True)
class GroupEvent:
    """One lifecycle record for a working group: chairing or group status."""

    group: str
    kind: GroupEventKind
    time: date
    person: str | None = None


def group_spans(events: list[GroupEvent]) -> dict[str, tuple[date, date | None]]:
    """Life span per group: [creation-or-activation, conclusion).

    Falls back to the earliest chair event when no creation/activation record
    exists; the span stays open when the group was never concluded.
    """
    spans: dict[str, tuple[date, date | None]] = {}
    starts: dict[str, date] = {}
    fallback: dict[str, date] = {}
    ends: dict[str, date] = {}
    for ev in events:
        if ev.kind in (GroupEventKind.GROUP_CREATED, GroupEventKind.GROUP_ACTIVATED):
            cur = starts.get(ev.group)
            starts[ev.group] = ev.time if cur is None else min(cur, ev.time)
        elif ev.kind is GroupEventKind.GROUP_CONCLUDED:
            cur = ends.get(ev.group)
            ends[ev.group] = ev.time if cur is None else max(cur, ev.time)
        else:
            cur = fallback.get(ev.group)
            fallback[ev.group] = ev.time if cur is None else min(cur, ev.time)
    for group in sorted(set(starts) | set(fallback) | set(ends)):
        start = starts.get(group, fallback.get(group))
        if start is None:
            continue
        end = ends.get(group)
        if end is not None and end <= start:
            end = None
        spans[group] = (start, end)
    return spans


def role_table_from_group_events(
    events: list[GroupEvent], warnings: list[str] | None = None
) -> list[RoleInterval]:
    """Build WGC intervals from chair add/remove events.

    Per group, the earliest chairs' interval starts are pulled back to the
    group's creation/activation date and the latest chairs' ends pushed out to
    its conclusion; chairs never removed stay open (or close at conclusion).
    Removals without a matching addition are dropped with a warning.
    """
    sink = warnings if warnings is not None else []
    by_group: dict[str, list[GroupEvent]] = {}
    for ev in events:
        by_group.setdefault(ev.group, []).append(ev)
    spans = group_spans(events)

    intervals: list[RoleInterval] = []
    for group in sorted(by_group):
        evs = sorted(by_group[group], key=lambda e: e.time)
        open_since: dict[str, date] = {}
        closed: list[tuple[str, date, date]] = []
        for ev in evs:
            if ev.kind is GroupEventKind.CHAIR_ADDED:
                if ev.person in open_since:
                    sink.append(
                        f"{group}: duplicate chair_added for {ev.person} on "
                        f"{ev.time}; ignored"
                    )
                    continue
                open_since[ev.person] = ev.time
            elif ev.kind is GroupEventKind.CHAIR_REMOVED:
                start = open_since.pop(ev.person, None)
                if start is None:
                    sink.append(
                        f"{group}: chair_removed for {ev.person} on {ev.time} "
                        "without matching chair_added; dropped"
                    )
                elif ev.time <= start:
                    sink.append(
                        f"{group}: chair term for {ev.person} removed on or "
                        f"before its start ({start}); dropped"
                    )
                else:
                    closed.append((ev.person, start, ev.time))

        group_start, conclusion = spans.get(group, (None, None))
        terms: list[tuple[str, date, date | None]] = list(closed)
        for person, start in open_since.items():
            end = conclusion if conclusion is not None and conclusion > start else None
            terms.append((person, start, end))
        if not terms:
            continue

        earliest = min(start for _, start, _ in terms)
        latest = max(
            (end for _, _, end in terms if end is not None), default=None
        )
        has_open = any(end is None for _, _, end in terms)
        adjusted: list[tuple[str, date, date | None]] = []
        for person, start, end in terms:
            if group_start is not None and start == earliest:
                start = min(start, group_start)
            if (
                conclusion is not None
                and not has_open
                and end is not None
                and end == latest
            ):
                end = max(end, conclusion)
            adjusted.append((person, start, end))
        for person, start, end in adjusted:
            intervals.append(
                RoleInterval(person=person, kind=RoleKind.WGC, start=start,
                             end=end, group=group)
            )
    return intervals
