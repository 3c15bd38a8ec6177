"""File parsing, validation modes, round-trips, and the AD listing rule."""

from datetime import date

import pytest

from hierflow.events import EventStore, build_store
from hierflow.exceptions import ParseError
from hierflow.ingest import (
    LENIENT,
    ParseReport,
    load_edge_store,
    parse_edge_events,
    parse_group_events,
    parse_list_metadata,
    parse_origin_events,
    parse_role_intervals,
    serialize_edge_events,
    serialize_group_events,
    serialize_list_metadata,
    serialize_origin_events,
    serialize_role_intervals,
)
from hierflow.roles import GroupEventKind, RoleKind, group_spans

D = date

EDGES_OK = """sender,receiver,date,list,message_id
alice,bob,2014-01-05,l1,m1
bob,carol,2014-01-06,,m2
"""


class TestEdgeParsing:
    def test_two_row_file(self):
        events = parse_edge_events(EDGES_OK)
        assert len(events) == 2
        assert [e.seq for e in events] == [0, 1]
        assert events[0].list_id == "l1"
        assert events[1].list_id is None

    def test_self_loop_row_cited(self):
        text = "sender,receiver,date,list,message_id\nal,al,2014-01-05,l,m\n"
        with pytest.raises(ParseError) as err:
            parse_edge_events(text)
        assert "line 2" in str(err.value)
        assert "self-loop" in str(err.value)

    def test_empty_file_with_header(self):
        assert parse_edge_events("sender,receiver,date,list,message_id\n") == []

    def test_malformed_date(self):
        text = "sender,receiver,date,list,message_id\na,b,bad-date,l,m\n"
        with pytest.raises(ParseError, match="malformed date"):
            parse_edge_events(text)

    def test_missing_column(self):
        with pytest.raises(ParseError, match="missing column"):
            parse_edge_events("sender,receiver,date\na,b,2014-01-01\n")

    def test_lenient_drops_and_reports(self):
        text = (
            "sender,receiver,date,list,message_id\n"
            "a,b,2014-01-05,l,m\n"
            "x,x,2014-01-06,l,m\n"
            "c,d,2014-01-07,l,m\n"
        )
        report = ParseReport()
        events = parse_edge_events(text, LENIENT, report)
        assert [e.sender for e in events] == ["a", "c"]
        assert len(report.errors) == 1
        # dropped rows keep their original row numbers as seq gaps
        assert [e.seq for e in events] == [0, 2]

    def test_round_trip(self):
        events = parse_edge_events(EDGES_OK)
        again = parse_edge_events(serialize_edge_events(events))
        assert again == events

    def test_store_fast_path_matches_event_path(self):
        store_a = load_edge_store(EDGES_OK)
        store_b = build_store(parse_edge_events(EDGES_OK))
        assert list(store_a.events()) == list(store_b.events())
        assert isinstance(store_a, EventStore)

    def test_order_stability(self):
        text = (
            "sender,receiver,date,list,message_id\n"
            "a,b,2014-03-01,l,m\n"
            "c,d,2014-01-01,l,m\n"
        )
        events = parse_edge_events(text)
        assert [(e.sender, e.seq) for e in events] == [("a", 0), ("c", 1)]

    def test_round_trip_with_awkward_identifiers(self):
        from hierflow.events import EdgeEvent

        events = [
            EdgeEvent('Doe, Jane "JD"', "smith, bob", D(2014, 1, 5), "l,1", 0),
        ]
        again = parse_edge_events(serialize_edge_events(events))
        assert again == events


class TestOriginParsing:
    def test_basic(self):
        text = "sender,list,date,message_id\nalice,l1,2014-02-01,m1\n"
        (o,) = parse_origin_events(text)
        assert (o.sender, o.list_id, o.time, o.seq) == ("alice", "l1", D(2014, 2, 1), 0)

    def test_round_trip(self):
        text = (
            "sender,list,date,message_id\n"
            "a,l1,2014-02-01,m1\n"
            "b,l2,2014-03-01,m2\n"
        )
        origins = parse_origin_events(text)
        assert parse_origin_events(serialize_origin_events(origins)) == origins


ROLES_OK = """person,role_kind,group,start,end
alice,WGC,wg-a,2014-03-01,2016-03-01
bob,WGC,wg-b,2015-01-01,
"""


class TestRoleParsing:
    def test_wgc_rows(self):
        ivs = parse_role_intervals(ROLES_OK)
        by_person = {iv.person: iv for iv in ivs}
        assert by_person["alice"].end == D(2016, 3, 1)
        assert by_person["bob"].end is None

    def test_end_before_start_rejected(self):
        text = "person,role_kind,group,start,end\np,WGC,g,2016-01-01,2014-01-01\n"
        with pytest.raises(ParseError, match="not after start"):
            parse_role_intervals(text)

    def test_ad_listings_consecutive_meetings(self):
        # three consecutive listings then absence at the 2015-03 meeting
        text = (
            "person,role_kind,group,start,end\n"
            "ada,AD,,2014-03-01,\n"
            "ada,AD,,2014-07-01,\n"
            "ada,AD,,2014-11-01,\n"
            "brin,AD,,2015-03-01,\n"
        )
        ivs = parse_role_intervals(text)
        by_person = {iv.person: iv for iv in ivs}
        assert by_person["ada"].start == D(2014, 3, 1)
        assert by_person["ada"].end == D(2015, 3, 1)
        # final known meeting leaves the newcomer open-ended
        assert by_person["brin"].start == D(2015, 3, 1)
        assert by_person["brin"].end is None

    def test_ad_gap_in_listings_splits_intervals(self):
        text = (
            "person,role_kind,group,start,end\n"
            "ada,AD,,2014-03-01,\n"
            "ada,AD,,2014-11-01,\n"
            "brin,AD,,2014-07-01,\n"
            "brin,AD,,2015-03-01,\n"
        )
        ivs = [iv for iv in parse_role_intervals(text) if iv.person == "ada"]
        assert len(ivs) == 2
        assert ivs[0].end == D(2014, 7, 1)

    def test_wgc_requires_group(self):
        text = "person,role_kind,group,start,end\np,WGC,,2014-01-01,\n"
        with pytest.raises(ParseError, match="lacks a group"):
            parse_role_intervals(text)

    def test_overlapping_duplicates_merged_with_note(self):
        text = (
            "person,role_kind,group,start,end\n"
            "p,WGC,g,2014-01-01,2015-01-01\n"
            "p,WGC,g,2014-06-01,2016-01-01\n"
        )
        report = ParseReport()
        ivs = parse_role_intervals(text, report=report)
        assert len(ivs) == 1
        assert (ivs[0].start, ivs[0].end) == (D(2014, 1, 1), D(2016, 1, 1))
        assert report.warnings

    def test_round_trip(self):
        ivs = parse_role_intervals(ROLES_OK)
        assert parse_role_intervals(serialize_role_intervals(ivs)) == ivs


class TestGroupEventParsing:
    def test_group_lifecycle_span(self):
        text = (
            "group,person,event_kind,date\n"
            "g,,group_created,2013-01-01\n"
            "g,,group_activated,2013-02-01\n"
            "g,,group_concluded,2015-01-01\n"
        )
        events = parse_group_events(text)
        assert group_spans(events)["g"] == (D(2013, 1, 1), D(2015, 1, 1))

    def test_chair_event_requires_person(self):
        text = "group,person,event_kind,date\ng,,chair_added,2013-01-01\n"
        with pytest.raises(ParseError, match="requires a person"):
            parse_group_events(text)

    def test_unknown_kind(self):
        text = "group,person,event_kind,date\ng,p,frobnicated,2013-01-01\n"
        with pytest.raises(ParseError, match="unknown event_kind"):
            parse_group_events(text)

    def test_round_trip(self):
        text = (
            "group,person,event_kind,date\n"
            "g,p,chair_added,2013-01-01\n"
            "g,,group_concluded,2015-01-01\n"
        )
        events = parse_group_events(text)
        assert parse_group_events(serialize_group_events(events)) == events


class TestListParsing:
    def test_boolean_forms(self):
        text = "list,is_wg_list\nl1,true\nl2,FALSE\nl3,1\nl4,no\n"
        assert parse_list_metadata(text) == {
            "l1": True, "l2": False, "l3": True, "l4": False,
        }

    def test_bad_flag(self):
        with pytest.raises(ParseError, match="is_wg_list"):
            parse_list_metadata("list,is_wg_list\nl1,maybe\n")

    def test_round_trip(self):
        lists = {"wg-a": True, "general": False}
        assert parse_list_metadata(serialize_list_metadata(lists)) == lists
