"""Checker soundness: pass on real traces, fail on hand-forged violations."""

import pytest

from smrsim.chain import block_id
from smrsim.engine import run
from smrsim.verify import (
    TraceIndex,
    check_agreement,
    check_chain_quality,
    check_leader_utilization,
    check_lbr_properties,
    check_liveness,
    check_pacemaker,
    compare,
    verify_trace,
)

from conftest import (
    byz_config,
    crash_config,
    find_event,
    hide_action,
    make_config,
    mutate_trace,
)


# -- happy corpus passes everything ---------------------------------------


def test_happy_trace_all_pass(happy_trace):
    report = verify_trace(happy_trace)
    assert report.passed
    assert all(r is None or r.passed for r in report.checks.values())


def test_crash_trace_all_pass(crash_trace):
    report = verify_trace(crash_trace)
    assert report.passed
    assert report.checks["leader_utilization"] is not None


def test_byz_trace_all_applicable_pass(byz_trace):
    report = verify_trace(byz_trace)
    assert report.passed
    assert report.checks["leader_utilization"] is None  # crash-only property


# -- agreement -------------------------------------------------------------


def test_agreement_fails_on_forked_commit(happy_trace):
    # forge a commit of a block that is not on the canonical chain
    i, ev = find_event(happy_trace, "commit", block_round=5)
    fake_block = block_id(99, 5, "f" * 16, 1)
    forged = mutate_trace(happy_trace, i, block=fake_block)
    res = check_agreement(forged)
    assert not res.passed
    assert res.counterexamples


def test_agreement_fails_on_two_blocks_same_round(happy_trace):
    # a second, different block claimed committed in an existing round
    i, ev = find_event(happy_trace, "certify", round=7)
    other = dict(ev)
    other["block"] = block_id(ev["author"] + 1, 7, ev["parent"], ev["payload_size"])
    other["author"] = ev["author"] + 1
    events = list(happy_trace.events) + []
    # splice the forged certify right after the real one, then a commit of it
    j, commit_ev = find_event(happy_trace, "commit", block_round=7)
    forged_commit = dict(commit_ev)
    forged_commit["block"] = other["block"]
    forged_commit["author"] = other["author"]
    events = events[: i + 1] + [other] + events[i + 1 :] + [
        {**forged_commit, "t": events[-1]["t"]}
    ]
    from smrsim.events import Trace

    forged = Trace(config=happy_trace.config, events=events)
    res = check_agreement(forged)
    assert not res.passed


# -- liveness / utilization / chain quality --------------------------------


def test_liveness_fails_when_window_commit_free(happy_trace):
    # drop every commit event in rounds 5..11 (window 5f+2 = 7 for f=1)
    events = [
        ev for ev in happy_trace.events
        if not (ev["kind"] == "commit" and 5 <= ev["block_round"] <= 11)
    ]
    from smrsim.events import Trace

    forged = Trace(config=happy_trace.config, events=events)
    res = check_liveness(forged)
    assert not res.passed
    assert res.counterexamples


def test_utilization_rejects_byzantine_traces(byz_trace):
    with pytest.raises(ValueError):
        check_leader_utilization(byz_trace)


def test_utilization_round_robin_negative_control():
    # 3 crashed parties under round-robin skip ~30% of rounds forever,
    # blowing the (k+1)(f+4) budget on a long horizon
    cfg = crash_config(
        n=10, f=3, crashes=[(1, 5), (4, 5), (7, 5)], seed=3, horizon=200,
        elector="round_robin",
    )
    res = check_leader_utilization(run(cfg))
    assert not res.passed
    assert res.counterexamples


def test_utilization_carousel_passes_same_schedule():
    cfg = crash_config(n=10, f=3, crashes=[(1, 5), (4, 5), (7, 5)], seed=3, horizon=200)
    res = check_leader_utilization(run(cfg))
    assert res.passed


def test_chain_quality_fails_when_honest_blocks_vanish(byz_trace):
    # recolor enough committed blocks as byzantine-authored: claim every
    # commit in a 17-round stretch was authored by byzantine party 0
    ix = TraceIndex(byz_trace)
    lo = ix.gst_round + 20
    events = []
    for ev in byz_trace.events:
        if ev["kind"] in ("certify", "commit") and lo <= ev.get("round", ev.get("block_round", 0)) <= lo + 20:
            ev = {**ev, "author": 0}
        events.append(ev)
    from smrsim.events import Trace

    forged = Trace(config=byz_trace.config, events=events)
    res = check_chain_quality(forged)
    assert not res.passed


# -- lbr property mutations -------------------------------------------------


def test_forged_endorser_fails_reputation():
    # add a crashed party (which never invoked the round) to a certificate
    cfg = crash_config(n=4, f=1, crashes=[(3, 2)], seed=4, horizon=15)
    trace = run(cfg)
    i, ev = find_event(trace, "certify", round=9)
    assert 3 not in ev["endorsers"]
    forged = mutate_trace(trace, i, endorsers=sorted(set(ev["endorsers"]) | {3})[:4])
    res = check_lbr_properties(forged)
    assert not res["reputation"].passed
    assert res["reputation"].counterexamples == [i]


def test_sub_quorum_certificate_fails_endorsement(happy_trace):
    i, ev = find_event(happy_trace, "certify", round=4)
    forged = mutate_trace(happy_trace, i, endorsers=ev["endorsers"][:2])  # 2 < 2f+1 = 3
    res = check_lbr_properties(forged)
    assert not res["endorsement"].passed


def test_late_return_fails_return_bounds(happy_trace):
    i, ev = find_event(happy_trace, "lbr_return", round=6)
    forged = mutate_trace(happy_trace, i, t=ev["t"] + happy_trace.config.timing.delta_l + 1)
    # keep timestamps sorted by bumping everything after
    events = forged.events
    for j in range(i + 1, len(events)):
        events[j] = {**events[j], "t": max(events[j]["t"], events[i]["t"])}
    res = check_lbr_properties(forged)
    assert not res["return_bounds"].passed


def test_future_round_return_fails_bounds(happy_trace):
    i, ev = find_event(happy_trace, "lbr_return", round=6)
    forged = mutate_trace(happy_trace, i, block_round=ev["round"] + 1)
    res = check_lbr_properties(forged)
    assert not res["return_bounds"].passed


def test_blocking_violation_detected(happy_trace):
    # claim a return of a round-r block from an invocation whose leader
    # never invoked: retarget an invocation to a different leader
    i, ret = find_event(happy_trace, "lbr_return", round=8)
    p, r = ret["party"], ret["round"]
    j, start = find_event(happy_trace, "lbr_start", party=p, round=r)
    other = (start["leader"] + 1) % happy_trace.config.n
    forged = mutate_trace(happy_trace, j, leader=other)
    res = check_lbr_properties(forged)
    assert not (res["blocking"].passed and res["progress"].passed)


def test_progress_violation_detected(happy_trace):
    # erase a return's block round: the fully-synchronized round no longer
    # returns the leader's round-r block
    i, ev = find_event(happy_trace, "lbr_return", round=10, block_round=10)
    cert_i, cert = find_event(happy_trace, "certify", round=9)
    forged = mutate_trace(happy_trace, i, block=cert["block"], block_round=9)
    res = check_lbr_properties(forged)
    assert not res["progress"].passed


# -- pacemaker mutations -----------------------------------------------------


def test_out_of_order_notification_fails_monotonic(happy_trace):
    i, ev = find_event(happy_trace, "new_round", round=5, party=1)
    forged = mutate_trace(happy_trace, i, round=3)
    res = check_pacemaker(forged)
    assert not res["monotonic"].passed


def test_skew_violation_detected(happy_trace):
    i, ev = find_event(happy_trace, "new_round", round=5, party=1)
    forged = mutate_trace(happy_trace, i, t=ev["t"] + 2 * happy_trace.config.timing.delta)
    # re-sort events by time to keep the trace structurally valid
    forged.events.sort(key=lambda e: e["t"])
    res = check_pacemaker(forged)
    assert not (res["skew"].passed and res["spacing"].passed)


def test_early_next_round_fails_spacing(happy_trace):
    i, ev = find_event(happy_trace, "new_round", round=6, party=2)
    j, prev = find_event(happy_trace, "new_round", round=5, party=2)
    forged = mutate_trace(happy_trace, i, t=prev["t"] + 1)
    forged.events.sort(key=lambda e: e["t"])
    res = check_pacemaker(forged)
    assert not res["spacing"].passed


def test_missing_notification_fails_completeness(happy_trace):
    i, _ev = find_event(happy_trace, "new_round", round=12, party=0)
    events = [ev for k, ev in enumerate(happy_trace.events) if k != i]
    from smrsim.events import Trace

    forged = Trace(config=happy_trace.config, events=events)
    res = check_pacemaker(forged)
    assert not res["completeness"].passed


# -- report and metrics -------------------------------------------------------


def test_fail_verdicts_carry_event_pointers(happy_trace):
    i, ev = find_event(happy_trace, "certify", round=4)
    forged = mutate_trace(happy_trace, i, endorsers=ev["endorsers"][:1])
    report = verify_trace(forged)
    assert not report.passed
    for res in report.checks.values():
        if res is not None and not res.passed:
            assert res.counterexamples, "failing verdict must carry a pointer"


def test_report_json_shape(crash_trace):
    report = verify_trace(crash_trace)
    data = report.to_json()
    assert data["format_version"] == 1
    assert data["passed"] is True
    assert set(data["metrics"]) >= {
        "skipped_round_count", "per_epoch_skipped", "chain_quality_worst_window",
        "honest_block_ratio", "commits_per_round", "latency_in_rounds",
    }
    assert data["checks"]["agreement"]["passed"]


def test_metrics_happy_values(happy_trace):
    m = verify_trace(happy_trace).metrics
    assert m["skipped_round_count"] == 0
    assert m["commits_per_round"] == 1.0
    assert m["latency_in_rounds"] == 0.0
    assert m["honest_block_ratio"] == 1.0
    assert m["chain_quality_worst_window"] == 0


def test_compare_carousel_beats_round_robin():
    base = crash_config(n=10, f=3, crashes=[(1, 8), (4, 16), (7, 24)], seed=0, horizon=80)
    rows, aggregates = compare(
        [base, base.with_overrides(elector="round_robin")],
        seeds=[1, 2, 3, 4, 5],
        labels=["carousel", "round_robin"],
    )
    assert len(rows) == 10
    means = {agg["label"]: agg for agg in aggregates if agg["seed"] == "mean"}
    assert means["carousel"]["steady_commits_per_round"] > means["round_robin"]["steady_commits_per_round"]
    assert means["carousel"]["steady_latency_in_rounds"] < means["round_robin"]["steady_latency_in_rounds"]


def test_compare_rows_deterministic():
    base = crash_config(n=4, f=1, crashes=[(2, 5)], seed=0, horizon=30)
    a = compare([base], seeds=[3, 1, 2])
    b = compare([base], seeds=[3, 1, 2])
    assert a == b
    assert [r["seed"] for r in a[0]] == [1, 2, 3]  # sorted output
