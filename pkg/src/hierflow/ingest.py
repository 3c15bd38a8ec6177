"""Parsing, validation, and serialization of the five interchange files.

All files are UTF-8, comma-separated with a header row, dates ISO-8601
(YYYY-MM-DD), identifiers opaque strings:

    edges.csv         sender,receiver,date,list,message_id
    origins.csv       sender,list,date,message_id
    roles.csv         person,role_kind,group,start,end   (end empty = open)
    group_events.csv  group,person,event_kind,date
    lists.csv         list,is_wg_list

Role rows of kind AD with an empty end are meeting listings rather than open
intervals: a person listed at consecutive meetings holds the role from the
first listing until the next meeting at which they are absent (open-ended
after the final known meeting). WGC rows with an empty end stay open.

Strict mode collects every row error and raises; lenient mode drops bad rows
and records them in the parse report. Reported line numbers count the header
as line 1.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import date

import numpy as np
import pandas as pd

from .events import EdgeEvent, EventStore
from .exceptions import ParseError
from .orgmetrics import OriginEvent, OriginStore
from .roles import GroupEvent, GroupEventKind, RoleInterval, RoleKind

STRICT = "strict"
LENIENT = "lenient"

EDGE_COLUMNS = ["sender", "receiver", "date", "list", "message_id"]
ORIGIN_COLUMNS = ["sender", "list", "date", "message_id"]
ROLE_COLUMNS = ["person", "role_kind", "group", "start", "end"]
GROUP_EVENT_COLUMNS = ["group", "person", "event_kind", "date"]
LIST_COLUMNS = ["list", "is_wg_list"]

_TRUE = {"true", "1", "yes"}
_FALSE = {"false", "0", "no"}


@dataclass(frozen=True, slots=True)
class ParseIssue:
    line: int | None
    message: str

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"line {self.line}: {self.message}"


@dataclass
class ParseReport:
    """Accumulated errors and warnings for one parsed file."""

    errors: list[ParseIssue] = field(default_factory=list)
    warnings: list[ParseIssue] = field(default_factory=list)

    def error(self, line: int | None, message: str):
        self.errors.append(ParseIssue(line, message))

    def warn(self, line: int | None, message: str):
        self.warnings.append(ParseIssue(line, message))


def _finish(report: ParseReport, mode: str, what: str):
    if mode == STRICT and report.errors:
        raise ParseError(
            f"{len(report.errors)} error(s) parsing {what}",
            [str(i) for i in report.errors],
        )


def _read_frame(text: str, columns: list[str], what: str) -> pd.DataFrame:
    try:
        df = pd.read_csv(
            io.StringIO(text), dtype=str, keep_default_na=False, skipinitialspace=False
        )
    except pd.errors.EmptyDataError:
        raise ParseError(f"{what} is empty: expected header {','.join(columns)}")
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise ParseError(f"{what} is missing column(s): {', '.join(missing)}")
    return df


def _parse_dates(col: pd.Series) -> tuple[np.ndarray, np.ndarray]:
    """(ordinals, bad-mask) for an ISO date column."""
    dt = pd.to_datetime(col, format="%Y-%m-%d", errors="coerce")
    bad = dt.isna().to_numpy()
    epoch = date(1970, 1, 1).toordinal()
    ordinals = np.where(
        bad, 0, dt.values.astype("datetime64[D]").astype(np.int64) + epoch
    )
    return ordinals.astype(np.int64), bad


# -- edge events ---------------------------------------------------------------

def _edges_frame(text: str, mode: str, report: ParseReport):
    df = _read_frame(text, EDGE_COLUMNS, "edges file")
    n = len(df)
    ordinals, bad_date = _parse_dates(df["date"])
    senders = df["sender"].to_numpy(dtype=object)
    receivers = df["receiver"].to_numpy(dtype=object)
    empty = (senders == "") | (receivers == "")
    loops = (senders == receivers) & ~empty
    bad = bad_date | empty | loops
    for i in np.flatnonzero(bad).tolist():
        line = i + 2
        if empty[i]:
            report.error(line, "empty sender or receiver")
        elif loops[i]:
            report.error(line, f"self-loop: sender equals receiver ({senders[i]!r})")
        else:
            report.error(line, f"malformed date {df['date'].iat[i]!r}")
    _finish(report, mode, "edges file")
    keep = ~bad
    return (
        senders[keep],
        receivers[keep],
        ordinals[keep],
        np.flatnonzero(keep).astype(np.int64),  # seq = original row order
        df["list"].to_numpy(dtype=object)[keep],
    )


def parse_edge_events(
    text: str, mode: str = STRICT, report: ParseReport | None = None
) -> list[EdgeEvent]:
    """Parse edges.csv text; seq is assigned by file row order."""
    report = report if report is not None else ParseReport()
    senders, receivers, ordinals, seq, lists = _edges_frame(text, mode, report)
    return [
        EdgeEvent(
            sender=senders[i],
            receiver=receivers[i],
            time=date.fromordinal(int(ordinals[i])),
            list_id=lists[i] or None,
            seq=int(seq[i]),
        )
        for i in range(len(senders))
    ]


def load_edge_store(
    text: str, mode: str = STRICT, report: ParseReport | None = None
) -> EventStore:
    """Parse edges.csv text straight into a columnar store (bulk path)."""
    report = report if report is not None else ParseReport()
    senders, receivers, ordinals, seq, lists = _edges_frame(text, mode, report)
    return EventStore.from_arrays(senders, receivers, ordinals, seq, lists)


def _write_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def serialize_edge_events(
    events, message_ids: list[str] | None = None
) -> str:
    """Inverse of parse_edge_events (message ids are not part of the table)."""
    seq = list(events.events()) if isinstance(events, EventStore) else list(events)
    return _write_csv(
        EDGE_COLUMNS,
        (
            [e.sender, e.receiver, e.time.isoformat(), e.list_id or "",
             message_ids[i] if message_ids else ""]
            for i, e in enumerate(seq)
        ),
    )


# -- origin events ---------------------------------------------------------------

def _origins_frame(text: str, mode: str, report: ParseReport):
    df = _read_frame(text, ORIGIN_COLUMNS, "origins file")
    ordinals, bad_date = _parse_dates(df["date"])
    senders = df["sender"].to_numpy(dtype=object)
    lists = df["list"].to_numpy(dtype=object)
    empty = (senders == "") | (lists == "")
    bad = bad_date | empty
    for i in np.flatnonzero(bad).tolist():
        line = i + 2
        if empty[i]:
            report.error(line, "empty sender or list")
        else:
            report.error(line, f"malformed date {df['date'].iat[i]!r}")
    _finish(report, mode, "origins file")
    keep = ~bad
    return senders[keep], lists[keep], ordinals[keep], np.flatnonzero(keep)


def parse_origin_events(
    text: str, mode: str = STRICT, report: ParseReport | None = None
) -> list[OriginEvent]:
    report = report if report is not None else ParseReport()
    senders, lists, ordinals, seq = _origins_frame(text, mode, report)
    return [
        OriginEvent(
            sender=senders[i],
            list_id=lists[i],
            time=date.fromordinal(int(ordinals[i])),
            seq=int(seq[i]),
        )
        for i in range(len(senders))
    ]


def serialize_origin_events(
    origins: list[OriginEvent], message_ids: list[str] | None = None
) -> str:
    return _write_csv(
        ORIGIN_COLUMNS,
        (
            [o.sender, o.list_id, o.time.isoformat(),
             message_ids[i] if message_ids else ""]
            for i, o in enumerate(origins)
        ),
    )


# -- role intervals ---------------------------------------------------------------

def _ad_listings_to_intervals(
    listings: list[tuple[str, date]]
) -> list[RoleInterval]:
    """Convert per-meeting AD listings to intervals.

    The meeting calendar is the set of all listing dates; a run of consecutive
    meetings becomes one interval ending at the first meeting the person
    misses, open-ended after the last known meeting.
    """
    calendar = sorted({d for _, d in listings})
    index = {d: i for i, d in enumerate(calendar)}
    by_person: dict[str, list[date]] = {}
    for person, d in listings:
        by_person.setdefault(person, []).append(d)
    out = []
    for person in sorted(by_person):
        dates = sorted(set(by_person[person]))
        run_start = dates[0]
        prev = dates[0]
        for d in dates[1:]:
            if index[d] == index[prev] + 1:
                prev = d
                continue
            nxt = calendar[index[prev] + 1]
            out.append(RoleInterval(person, RoleKind.AD, run_start, nxt))
            run_start = prev = d
        if index[prev] + 1 < len(calendar):
            end = calendar[index[prev] + 1]
        else:
            end = None
        out.append(RoleInterval(person, RoleKind.AD, run_start, end))
    return out


def _merge_overlaps(
    intervals: list[RoleInterval], report: ParseReport
) -> list[RoleInterval]:
    """Merge overlapping intervals of the same (person, kind, group)."""
    by_key: dict[tuple, list[RoleInterval]] = {}
    for iv in intervals:
        by_key.setdefault((iv.person, iv.kind, iv.group), []).append(iv)
    out = []
    for key in sorted(by_key, key=str):
        ivs = sorted(by_key[key], key=lambda v: (v.start, v.end or date.max))
        merged = [ivs[0]]
        for iv in ivs[1:]:
            last = merged[-1]
            last_end = last.end or date.max
            if iv.start < last_end:
                new_end = None if (last.end is None or iv.end is None) else max(
                    last.end, iv.end
                )
                merged[-1] = RoleInterval(
                    last.person, last.kind, min(last.start, iv.start), new_end,
                    last.group,
                )
                report.warn(
                    None,
                    f"merged overlapping {last.kind.value} intervals for "
                    f"{last.person}" + (f" in {last.group}" if last.group else ""),
                )
            else:
                merged.append(iv)
        out.extend(merged)
    return out


def parse_role_intervals(
    text: str, mode: str = STRICT, report: ParseReport | None = None
) -> list[RoleInterval]:
    report = report if report is not None else ParseReport()
    df = _read_frame(text, ROLE_COLUMNS, "roles file")
    wgc: list[RoleInterval] = []
    ad_explicit: list[RoleInterval] = []
    ad_listings: list[tuple[str, date]] = []
    for i, row in enumerate(df.itertuples(index=False)):
        line = i + 2
        person = row.person.strip()
        kind = row.role_kind.strip().upper()
        group = row.group.strip()
        if not person:
            report.error(line, "empty person")
            continue
        if kind not in (RoleKind.WGC.value, RoleKind.AD.value):
            report.error(line, f"unknown role_kind {row.role_kind!r}")
            continue
        try:
            start = date.fromisoformat(row.start.strip())
        except ValueError:
            report.error(line, f"malformed start date {row.start!r}")
            continue
        end: date | None = None
        if row.end.strip():
            try:
                end = date.fromisoformat(row.end.strip())
            except ValueError:
                report.error(line, f"malformed end date {row.end!r}")
                continue
            if end <= start:
                report.error(line, f"end {end} not after start {start}")
                continue
        if kind == RoleKind.WGC.value:
            if not group:
                report.error(line, "WGC row lacks a group")
                continue
            wgc.append(RoleInterval(person, RoleKind.WGC, start, end, group))
        else:
            if group:
                report.error(line, "AD row must not carry a group")
                continue
            if end is None:
                ad_listings.append((person, start))
            else:
                ad_explicit.append(RoleInterval(person, RoleKind.AD, start, end))
    _finish(report, mode, "roles file")
    intervals = wgc + ad_explicit + _ad_listings_to_intervals(ad_listings)
    return _merge_overlaps(intervals, report)


def serialize_role_intervals(intervals: list[RoleInterval]) -> str:
    return _write_csv(
        ROLE_COLUMNS,
        (
            [iv.person, iv.kind.value, iv.group or "", iv.start.isoformat(),
             iv.end.isoformat() if iv.end else ""]
            for iv in intervals
        ),
    )


# -- group events ---------------------------------------------------------------

def parse_group_events(
    text: str, mode: str = STRICT, report: ParseReport | None = None
) -> list[GroupEvent]:
    report = report if report is not None else ParseReport()
    df = _read_frame(text, GROUP_EVENT_COLUMNS, "group events file")
    kinds = {k.value: k for k in GroupEventKind}
    out: list[GroupEvent] = []
    for i, row in enumerate(df.itertuples(index=False)):
        line = i + 2
        group = row.group.strip()
        kind = row.event_kind.strip().lower()
        person = row.person.strip() or None
        if not group:
            report.error(line, "empty group")
            continue
        if kind not in kinds:
            report.error(line, f"unknown event_kind {row.event_kind!r}")
            continue
        if kind in (GroupEventKind.CHAIR_ADDED.value,
                    GroupEventKind.CHAIR_REMOVED.value) and person is None:
            report.error(line, f"{kind} requires a person")
            continue
        try:
            when = date.fromisoformat(row.date.strip())
        except ValueError:
            report.error(line, f"malformed date {row.date!r}")
            continue
        out.append(GroupEvent(group=group, kind=kinds[kind], time=when, person=person))
    _finish(report, mode, "group events file")
    return out


def serialize_group_events(events: list[GroupEvent]) -> str:
    return _write_csv(
        GROUP_EVENT_COLUMNS,
        (
            [ev.group, ev.person or "", ev.kind.value, ev.time.isoformat()]
            for ev in events
        ),
    )


# -- list metadata ---------------------------------------------------------------

def parse_list_metadata(
    text: str, mode: str = STRICT, report: ParseReport | None = None
) -> dict[str, bool]:
    report = report if report is not None else ParseReport()
    df = _read_frame(text, LIST_COLUMNS, "lists file")
    out: dict[str, bool] = {}
    for i, row in enumerate(df.itertuples(index=False)):
        line = i + 2
        name = row.list.strip()
        flag = row.is_wg_list.strip().lower()
        if not name:
            report.error(line, "empty list name")
            continue
        if flag in _TRUE:
            value = True
        elif flag in _FALSE:
            value = False
        else:
            report.error(line, f"is_wg_list must be true/false, got {row.is_wg_list!r}")
            continue
        if name in out and out[name] != value:
            report.warn(line, f"conflicting is_wg_list for {name}; keeping first")
            continue
        out[name] = value
    _finish(report, mode, "lists file")
    return out


def serialize_list_metadata(lists: dict[str, bool]) -> str:
    return _write_csv(
        LIST_COLUMNS,
        ([name, "true" if lists[name] else "false"] for name in sorted(lists)),
    )


# -- bundle ---------------------------------------------------------------

@dataclass
class DatasetBundle:
    """Everything one analysis run consumes; None marks an absent input file."""

    events: EventStore
    origins: OriginStore | None = None
    roles: list[RoleInterval] | None = None
    group_events: list[GroupEvent] | None = None
    lists: dict[str, bool] | None = None
    provenance: dict[str, str] = field(default_factory=dict)

    @property
    def wg_lists(self) -> set[str]:
        if not self.lists:
            return set()
        return {name for name, is_wg in self.lists.items() if is_wg}


@dataclass(frozen=True)
class BundlePaths:
    edges: str
    origins: str | None = None
    roles: str | None = None
    group_events: str | None = None
    lists: str | None = None


def load_bundle(
    paths: BundlePaths, mode: str = STRICT
) -> tuple[DatasetBundle, dict[str, ParseReport]]:
    """Read and parse whichever interchange files the paths name."""
    reports: dict[str, ParseReport] = {}

    def read(path: str) -> str:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()

    rep = reports["edges"] = ParseReport()
    store = load_edge_store(read(paths.edges), mode, rep)

    origins: OriginStore | None = None
    if paths.origins:
        rep = reports["origins"] = ParseReport()
        origins = OriginStore(parse_origin_events(read(paths.origins), mode, rep))

    roles: list[RoleInterval] | None = None
    if paths.roles:
        rep = reports["roles"] = ParseReport()
        roles = parse_role_intervals(read(paths.roles), mode, rep)

    group_events: list[GroupEvent] | None = None
    if paths.group_events:
        rep = reports["group_events"] = ParseReport()
        group_events = parse_group_events(read(paths.group_events), mode, rep)

    lists: dict[str, bool] | None = None
    if paths.lists:
        rep = reports["lists"] = ParseReport()
        lists = parse_list_metadata(read(paths.lists), mode, rep)

    bundle = DatasetBundle(
        events=store,
        origins=origins,
        roles=roles,
        group_events=group_events,
        lists=lists,
        provenance={"parse_mode": mode},
    )
    return bundle, reports
