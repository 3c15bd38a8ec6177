"""Shared fixtures and small builders for the test suite."""

from __future__ import annotations

from datetime import date, timedelta

import pytest

from hierflow.events import EdgeEvent, EventStore, TimeWindow, build_store

BASE = date(2014, 1, 1)


def day(offset: int, base: date = BASE) -> date:
    return base + timedelta(days=offset)


def store_from(rows, base: date = BASE) -> EventStore:
    """Rows of (sender, receiver, day_offset[, list_id]); seq is row order."""
    events = []
    for i, row in enumerate(rows):
        sender, receiver, offset = row[0], row[1], row[2]
        list_id = row[3] if len(row) > 3 else None
        events.append(EdgeEvent(sender, receiver, day(offset, base), list_id, i))
    return build_store(events)


def win(start_offset: int, end_offset: int, base: date = BASE) -> TimeWindow:
    return TimeWindow(day(start_offset, base), day(end_offset, base))


@pytest.fixture
def base_date() -> date:
    return BASE
