"""Synthetic generator: determinism, planted parameters, infeasible configs."""

from datetime import date

import numpy as np
import pytest

from hierflow.events import TimeWindow
from hierflow.exceptions import ConfigError
from hierflow.ingest import serialize_edge_events, serialize_role_intervals
from hierflow.mobility import taxonomy
from hierflow.orgmetrics import flow_ratios
from hierflow.roles import RoleClass, RoleKind, resolve_roles
from hierflow.synth import SynthConfig, synth_generate

D = date


def small_config(**overrides):
    base = dict(
        n_rp=40, n_wgc=6, n_ad=2, n_groups=3,
        start=D(2013, 1, 1), end=D(2014, 1, 1),
        rates={
            "RP->RP": 10.0, "RP->WGC": 3.0, "WGC->RP": 1.0,
            "RP->AD": 0.4, "AD->RP": 0.4,
        },
        origin_rates={"RP": 1.0, "WGC": 1.0},
        seed=7,
    )
    base.update(overrides)
    return SynthConfig.from_dict(base)


def _resolved(bundle, w):
    names = set(bundle.events.node_ids)
    return resolve_roles(bundle.roles, w, names)


class TestDeterminism:
    def test_same_seed_identical_bundles(self):
        a = synth_generate(small_config())
        b = synth_generate(small_config())
        assert serialize_edge_events(a.events) == serialize_edge_events(b.events)
        assert serialize_role_intervals(a.roles) == serialize_role_intervals(b.roles)
        assert a.lists == b.lists

    def test_different_seed_differs(self):
        a = synth_generate(small_config())
        b = synth_generate(small_config(seed=8))
        assert serialize_edge_events(a.events) != serialize_edge_events(b.events)


class TestPlantedBias:
    def test_full_upward_bias(self):
        cfg = small_config(upward_bias={"RP->WGC": 1.0})
        bundle = synth_generate(cfg)
        w = TimeWindow(cfg.start, cfg.end)
        roles = _resolved(bundle, w)
        ratios = {f.pair_label: f for f in flow_ratios(bundle.events, roles, w)}
        assert ratios["RP->WGC"].downward_count == 0
        assert ratios["RP->WGC"].proportion_up == 1.0

    def test_bias_recovered_within_tolerance(self):
        cfg = small_config(
            rates={"RP->WGC": 8.0, "WGC->RP": 8.0},
            upward_bias={"RP->WGC": 0.8},
            origin_rates={},
        )
        bundle = synth_generate(cfg)
        w = TimeWindow(cfg.start, cfg.end)
        roles = _resolved(bundle, w)
        ratios = {f.pair_label: f for f in flow_ratios(bundle.events, roles, w)}
        ratio = ratios["RP->WGC"]
        n = ratio.upward_count + ratio.downward_count
        assert n > 4000
        assert ratio.proportion_up == pytest.approx(0.8, abs=0.02)


class TestRepeatHalves:
    def test_mobility_is_one_for_every_window(self):
        cfg = small_config(
            end=D(2014, 7, 1),
            repeat_halves=True,
            rates={"RP->RP": 14.0, "RP->WGC": 4.0, "WGC->RP": 4.0},
        )
        bundle = synth_generate(cfg)
        for start_month in (1, 2, 5):
            w = TimeWindow(D(2013, start_month, 1), D(2014, start_month, 1))
            roles = _resolved(bundle, w)
            results = taxonomy(bundle.events, w, roles)
            for rc in (RoleClass.RP, RoleClass.WGC):
                res = results[rc]
                if res.n >= 2:
                    assert res.mobility == pytest.approx(1.0, abs=1e-9)
                    assert res.neighbour_mobility == pytest.approx(1.0, abs=1e-9)


class TestStructure:
    def test_no_ad_rows_when_n_ad_zero(self):
        cfg = small_config(
            n_ad=0,
            rates={"RP->RP": 5.0, "RP->WGC": 1.0},
            origin_rates={"RP": 1.0},
        )
        bundle = synth_generate(cfg)
        assert all(iv.kind is not RoleKind.AD for iv in bundle.roles)

    def test_roles_cover_horizon(self):
        bundle = synth_generate(small_config())
        w = TimeWindow(D(2013, 2, 1), D(2013, 8, 1))
        roles = _resolved(bundle, w)
        classes = {a.role_class for a in roles.values()}
        assert RoleClass.UNCLASSIFIED not in classes

    def test_event_volume_tracks_rates(self):
        cfg = small_config()
        bundle = synth_generate(cfg)
        days = (cfg.end - cfg.start).days
        expected = sum(cfg.rates.values()) * days
        assert len(bundle.events) == pytest.approx(expected, rel=0.05)

    def test_wg_lists_flagged(self):
        bundle = synth_generate(small_config())
        assert any(bundle.lists.values())
        assert any(not v for v in bundle.lists.values())


class TestInfeasibleConfigs:
    def test_wgc_without_groups(self):
        with pytest.raises(ConfigError, match="group"):
            synth_generate(small_config(n_groups=0))

    def test_rate_for_empty_class(self):
        with pytest.raises(ConfigError, match="non-empty"):
            synth_generate(
                small_config(n_ad=0, rates={"RP->RP": 5.0, "AD->RP": 1.0})
            )

    def test_horizon_must_start_month_first(self):
        with pytest.raises(ConfigError, match="first of a month"):
            synth_generate(small_config(start=D(2013, 1, 15)))

    def test_repeat_halves_needs_divisible_horizon(self):
        with pytest.raises(ConfigError, match="divisible"):
            synth_generate(
                small_config(end=D(2013, 8, 1), repeat_halves=True)
            )

    def test_bad_bias_range(self):
        with pytest.raises(ConfigError, match="upward_bias"):
            synth_generate(small_config(upward_bias={"RP->WGC": 1.5}))

    def test_unknown_rate_key(self):
        with pytest.raises(ConfigError, match="pair key"):
            synth_generate(small_config(rates={"RP->BOSS": 1.0}))
