"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines. The performance criterion builds a million-event bundle and takes a
few minutes; everything else is quick.
"""

import time
from datetime import date, timedelta

import numpy as np
import pytest

from hierflow.events import (
    EdgeEvent,
    TimeWindow,
    WindowPlan,
    build_store,
    windows,
)
from hierflow.mobility import panel_measures, pearson, taxonomy
from hierflow.motifs import (
    ANCHOR_FIRST_SENDER,
    brute_force_motifs,
    enumerate_motifs,
)
from hierflow.orgmetrics import flow_ratios
from hierflow.report import ALL_FAMILIES, FAMILY_MOTIFS, ReportConfig, generate_report, lint_report
from hierflow.roles import (
    EdgeDirection,
    RoleClass,
    RoleInterval,
    RoleKind,
    label_edge,
    resolve_roles,
)
from hierflow.synth import SynthConfig, synth_generate

D = date


def _outcome(name: str):
    """Context manager printing one PASS/FAIL line per criterion."""

    class _Ctx:
        def __enter__(self):
            self.t0 = time.perf_counter()
            return self

        def __exit__(self, exc_type, exc, tb):
            elapsed = time.perf_counter() - self.t0
            status = "PASS" if exc_type is None else "FAIL"
            print(f"ACCEPTANCE {name}: {status} ({elapsed:.1f}s)")
            return False

    return _Ctx()


# -- criterion: motif oracle equivalence --------------------------------------

def test_motif_oracle_equivalence():
    with _outcome("motif-oracle-equivalence"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(2024)
        base = D(2014, 1, 1)
        deltas = (1, 7, 30)
        for trial in range(200):
            delta = deltas[trial % 3]
            n_nodes = int(rng.integers(2, 31))
            m = int(rng.integers(3, 301))
            span = max(20, delta * max(6, m // 10))
            events = []
            for s in range(m):
                a, b = rng.choice(n_nodes, size=2, replace=False)
                when = base + timedelta(days=int(rng.integers(0, span)))
                events.append(EdgeEvent(f"n{a}", f"n{b}", when, None, s))
            store = build_store(events)
            w = TimeWindow(base, base + timedelta(days=span + 1))
            fast = enumerate_motifs(store, w, delta)
            slow = brute_force_motifs(store, w, delta)
            assert fast.counts == slow.counts, (
                f"store {trial}: optimized counter disagrees with oracle"
            )
            if trial % 5 == 0:
                fast = enumerate_motifs(store, w, delta, ANCHOR_FIRST_SENDER)
                slow = brute_force_motifs(store, w, delta, ANCHOR_FIRST_SENDER)
                assert fast.counts == slow.counts, f"store {trial} (first_sender)"
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0, f"oracle sweep took {elapsed:.1f}s (budget 60s)"


# -- criterion: worked flow example --------------------------------------------

def test_worked_flow_example():
    with _outcome("worked-flow-example"):
        base = D(2014, 1, 1)
        events = []
        for i in range(6):
            events.append(EdgeEvent("rp", "wgc", base + timedelta(days=i), None, i))
        for i in range(12):
            events.append(
                EdgeEvent("wgc", "rp", base + timedelta(days=i), None, 100 + i)
            )
        store = build_store(events)
        w = TimeWindow(base, D(2015, 1, 1))
        table = [RoleInterval("wgc", RoleKind.WGC, D(2012, 1, 1), None, "g")]
        roles = resolve_roles(table, w, {"rp", "wgc"})
        ratios = {f.pair_label: f for f in flow_ratios(store, roles, w)}
        ratio = ratios["RP->WGC"]
        assert (ratio.upward_count, ratio.downward_count) == (6, 12)
        assert ratio.proportion_up == 1 / 3  # exact


# -- criterion: planted-bias recovery ------------------------------------------

def test_planted_bias_recovery():
    with _outcome("planted-bias-recovery"):
        cfg = SynthConfig.from_dict(
            dict(
                n_rp=300, n_wgc=30, n_ad=0, n_groups=10,
                start="2013-01-01", end="2016-01-01",
                rates={"RP->WGC": 16.0, "WGC->RP": 16.0},
                upward_bias={"RP->WGC": 0.75},
                origin_rates={},
                seed=404,
            )
        )
        bundle = synth_generate(cfg)
        plan = WindowPlan(cfg.start, cfg.end, 12, 1)
        for w in windows(plan):
            names = {
                bundle.events.node_ids[int(i)]
                for i in np.union1d(*bundle.events.window_arrays(w)[1:3])
            }
            roles = resolve_roles(bundle.roles, w, names)
            ratios = {
                f.pair_label: f for f in flow_ratios(bundle.events, roles, w)
            }
            ratio = ratios["RP->WGC"]
            n = ratio.upward_count + ratio.downward_count
            assert n >= 10_000, f"window {w.start}: only {n} RP<->WGC events"
            assert abs(ratio.proportion_up - 0.75) <= 0.02, (
                f"window {w.start}: proportion_up {ratio.proportion_up:.4f}"
            )


# -- criterion: taxonomy oracles ------------------------------------------------

def test_taxonomy_oracles():
    with _outcome("taxonomy-oracles"):
        # repeat-halves fixture: mobility exactly 1 for every window and class
        cfg = SynthConfig.from_dict(
            dict(
                n_rp=150, n_wgc=12, n_ad=5, n_groups=6,
                start="2013-01-01", end="2016-01-01",
                rates={
                    "RP->RP": 40.0, "RP->WGC": 10.0, "WGC->RP": 10.0,
                    "RP->AD": 2.0, "AD->RP": 2.0, "WGC->WGC": 2.0,
                },
                origin_rates={},
                repeat_halves=True,
                seed=77,
            )
        )
        bundle = synth_generate(cfg)
        plan = WindowPlan(cfg.start, cfg.end, 12, 1)
        checked = 0
        for w in windows(plan):
            names = set(bundle.events.node_ids)
            roles = resolve_roles(bundle.roles, w, names)
            for rc, res in taxonomy(bundle.events, w, roles).items():
                if res.n >= 2:
                    assert res.mobility == pytest.approx(1.0, abs=1e-9), (
                        f"{w.start} {rc}: mobility {res.mobility}"
                    )
                    checked += 1
        assert checked > 0

        # independent halves at panel size 1000: all measures near zero
        cfg = SynthConfig.from_dict(
            dict(
                n_rp=1000, n_wgc=2, n_ad=0, n_groups=1,
                start="2013-01-01", end="2015-01-01",
                rates={"RP->RP": 60.0},
                origin_rates={},
                seed=505,
            )
        )
        bundle = synth_generate(cfg)
        w = TimeWindow(D(2013, 1, 1), D(2014, 1, 1))
        roles = resolve_roles(bundle.roles, w, set(bundle.events.node_ids))
        res = taxonomy(bundle.events, w, roles)[RoleClass.RP]
        assert res.n == 1000, f"panel size {res.n}"
        for measure in ("mobility", "neighbour_mobility", "philanthropy",
                        "community"):
            value = res.value(measure)
            assert value is not None and abs(value) < 0.1, (
                f"{measure} = {value}"
            )

        # philanthropy/community swap symmetry, exact, on random panels
        rng = np.random.default_rng(9)
        for _ in range(100):
            n = int(rng.integers(3, 50))
            deg1 = rng.integers(0, 25, n).astype(float)
            deg2 = rng.integers(0, 25, n).astype(float)
            nd1 = rng.random(n) * 12
            nd2 = rng.random(n) * 12
            phil = panel_measures(deg1, deg2, nd1, nd2)["philanthropy"]
            comm = panel_measures(nd1, nd2, deg1, deg2)["community"]
            assert phil == comm


# -- criterion: correlation unit oracle -----------------------------------------

def test_correlation_unit_oracle():
    with _outcome("correlation-unit-oracle"):
        assert pearson([1, 2, 3], [3, 1, 2]) == pytest.approx(-0.5, abs=1e-12)
        assert pearson([1, 1, 1], [3, 1, 2]) is None
        assert pearson([2, 2], [1, 5]) is None


# -- criterion: role rules property suite ----------------------------------------

def test_role_rules_property_suite():
    with _outcome("role-rules"):
        rng = np.random.default_rng(31337)
        base = D(2013, 1, 1)
        violations = 0
        for _ in range(10_000):
            w0 = int(rng.integers(0, 1500))
            w = TimeWindow(
                base + timedelta(days=w0),
                base + timedelta(days=w0 + int(rng.integers(1, 500))),
            )
            table = []
            n_iv = int(rng.integers(0, 4))
            for _ in range(n_iv):
                s = base + timedelta(days=int(rng.integers(0, 2000)))
                e = (
                    None
                    if rng.random() < 0.25
                    else s + timedelta(days=int(rng.integers(1, 1200)))
                )
                if rng.random() < 0.3:
                    table.append(RoleInterval("p", RoleKind.AD, s, e))
                else:
                    table.append(RoleInterval("p", RoleKind.WGC, s, e, "g"))
            got = resolve_roles(table, w, {"p"})["p"].role_class

            def covers(iv):
                return iv.start <= w.start and (iv.end is None or iv.end >= w.end)

            if not table:
                want = RoleClass.RP
            elif any(iv.kind is RoleKind.AD and covers(iv) for iv in table):
                want = RoleClass.AD
            elif any(iv.kind is RoleKind.WGC and covers(iv) for iv in table):
                want = RoleClass.WGC
            else:
                want = RoleClass.UNCLASSIFIED
            if got is not want:
                violations += 1

        classified = (RoleClass.RP, RoleClass.WGC, RoleClass.AD)
        for _ in range(1_000):
            a = classified[int(rng.integers(0, 3))]
            b = classified[int(rng.integers(0, 3))]
            fwd, bwd = label_edge(a, b), label_edge(b, a)
            if (fwd is EdgeDirection.UP) != (bwd is EdgeDirection.DOWN):
                violations += 1
            if (fwd is EdgeDirection.LATERAL) != (bwd is EdgeDirection.LATERAL):
                violations += 1
        assert violations == 0


# -- criterion: determinism and performance at scale -----------------------------

@pytest.fixture(scope="module")
def big_bundle():
    cfg = SynthConfig.from_dict(
        dict(
            n_rp=3000, n_wgc=150, n_ad=12, n_groups=60,
            start="2013-01-01", end="2022-01-01",
            rates={
                "RP->RP": 232.0, "RP->WGC": 26.0, "WGC->RP": 26.0,
                "WGC->WGC": 14.0, "RP->AD": 2.6, "AD->RP": 2.6,
                "WGC->AD": 1.2, "AD->WGC": 1.2, "AD->AD": 0.15,
            },
            origin_rates={"RP": 5.0, "WGC": 6.0, "AD": 0.5},
            n_general_lists=20,
            seed=2013,
        )
    )
    return synth_generate(cfg)


def test_determinism_and_performance(big_bundle, tmp_path):
    with _outcome("determinism-and-performance"):
        assert len(big_bundle.events) >= 1_000_000

        non_motif = tuple(f for f in ALL_FAMILIES if f != FAMILY_MOTIFS)
        base_cfg = dict(from_date=D(2013, 1, 1), to_date=D(2022, 1, 1))

        t0 = time.perf_counter()
        generate_report(
            big_bundle, ReportConfig(metrics=non_motif, threads=1, **base_cfg),
            tmp_path / "nm1",
        )
        t_non_motif = time.perf_counter() - t0
        print(f"  non-motif report (threads=1): {t_non_motif:.1f}s")
        assert t_non_motif < 60.0

        t0 = time.perf_counter()
        generate_report(
            big_bundle,
            ReportConfig(metrics=(FAMILY_MOTIFS,), threads=2, **base_cfg),
            tmp_path / "m2",
        )
        t_motif = time.perf_counter() - t0
        print(f"  motif report (threads=2): {t_motif:.1f}s")
        assert t_motif < 600.0

        generate_report(
            big_bundle, ReportConfig(metrics=non_motif, threads=2, **base_cfg),
            tmp_path / "nm2",
        )
        generate_report(
            big_bundle,
            ReportConfig(metrics=(FAMILY_MOTIFS,), threads=1, **base_cfg),
            tmp_path / "m1",
        )
        for a, b in (("nm1", "nm2"), ("m2", "m1")):
            da, db = tmp_path / a, tmp_path / b
            names = sorted(p.name for p in da.iterdir())
            assert names == sorted(p.name for p in db.iterdir())
            for name in names:
                assert (da / name).read_bytes() == (db / name).read_bytes(), (
                    f"{name} differs between thread counts"
                )


def test_proportion_sanity_linter(big_bundle, tmp_path):
    with _outcome("proportion-sanity"):
        generate_report(
            big_bundle,
            ReportConfig(
                from_date=D(2013, 1, 1), to_date=D(2022, 1, 1),
                metrics=tuple(f for f in ALL_FAMILIES if f != FAMILY_MOTIFS),
                threads=2,
            ),
            tmp_path / "sanity",
        )
        problems = lint_report(tmp_path / "sanity")
        assert problems == []

        # a small full report including motifs, linted as well
        cfg = SynthConfig.from_dict(
            dict(
                n_rp=60, n_wgc=8, n_ad=2, n_groups=4,
                start="2013-01-01", end="2015-01-01",
                rates={
                    "RP->RP": 10.0, "RP->WGC": 3.0, "WGC->RP": 2.0,
                    "RP->AD": 0.3, "AD->RP": 0.3,
                },
                origin_rates={"RP": 1.0, "WGC": 1.0},
                seed=6,
            )
        )
        small = synth_generate(cfg)
        generate_report(small, ReportConfig(), tmp_path / "small")
        assert lint_report(tmp_path / "small") == []
