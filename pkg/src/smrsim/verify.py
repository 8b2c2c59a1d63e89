"""Trace checkers for every replication and round-abstraction property.

Every check consumes a complete trace and produces a verdict with
concrete event indices as counterexamples on failure. The checkers are
independent of the engine: they rebuild the block graph from certify
events and re-derive everything else from the log, so they catch engine
bugs as well as hand-forged violations.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from .chain import BlockStore, Block, Certificate, make_genesis
from .config import ExecutionConfig
from .engine import run
from .events import Trace
from .lbr import max_synchronized_subset

REPORT_FORMAT_VERSION = 1


@dataclass
class CheckResult:
    passed: bool
    counterexamples: list[int] = field(default_factory=list)
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "counterexamples": self.counterexamples,
            "detail": self.detail,
        }


def _fail(indices: list[int], detail: str) -> CheckResult:
    return CheckResult(passed=False, counterexamples=indices, detail=detail)


def _ok(detail: str = "") -> CheckResult:
    return CheckResult(passed=True, detail=detail)


class TraceIndex:
    """One-pass digest of a trace: lookups shared by all checkers."""

    def __init__(self, trace: Trace):
        self.trace = trace
        cfg = trace.config
        self.config = cfg
        self.n = cfg.n
        self.f = cfg.f
        self.quorum = cfg.quorum
        self.byzantine = set(cfg.faults.byzantine)
        self.crash_round = {p: cfg.faults.crash_round(p) for p in range(cfg.n)}
        self.non_byz = {p for p in range(cfg.n) if p not in self.byzantine}
        self.honest = {p for p in self.non_byz if self.crash_round[p] is None}

        genesis = make_genesis(cfg.n)
        self.store = BlockStore(genesis)
        self.genesis = genesis.id
        self.malformed_certs: list[int] = []
        self.certify_events: list[tuple[int, dict]] = []
        self.notify_by_round: dict[int, list[tuple[int, int, int]]] = {}  # r -> [(party, t, idx)]
        self.notifies_by_party: dict[int, list[tuple[int, int, int]]] = {}  # p -> [(idx, r, t)]
        self.invocations: dict[tuple[int, int], tuple[int, int, int]] = {}  # (p, r) -> (leader, t, idx)
        self.returns: list[tuple[int, dict]] = []
        self.return_by_inv: dict[tuple[int, int], tuple[int, dict]] = {}
        self.commits: list[tuple[int, dict]] = []
        self.first_commit_idx: dict[str, int] = {}
        self.honest_commit_rounds: set[int] = set()
        self.any_commit_rounds: set[int] = set()
        self.honest_committed_blocks: dict[str, int] = {}  # bid -> first honest commit idx

        for i, ev in enumerate(trace.events):
            kind = ev["kind"]
            if kind == "certify":
                block = Block(
                    id=ev["block"],
                    parent=ev["parent"],
                    round=ev["round"],
                    author=ev["author"],
                    payload_size=ev.get("payload_size", 0),
                    certificate=Certificate(
                        round=ev["round"], endorsers=frozenset(ev["endorsers"])
                    ),
                )
                try:
                    self.store.add(block)
                except (KeyError, ValueError):
                    self.malformed_certs.append(i)
                self.certify_events.append((i, ev))
            elif kind == "new_round":
                p, r, t = ev["party"], ev["round"], ev["t"]
                self.notify_by_round.setdefault(r, []).append((p, t, i))
                self.notifies_by_party.setdefault(p, []).append((i, r, t))
            elif kind == "lbr_start":
                self.invocations[(ev["party"], ev["round"])] = (ev["leader"], ev["t"], i)
            elif kind == "lbr_return":
                self.returns.append((i, ev))
                self.return_by_inv[(ev["party"], ev["round"])] = (i, ev)
            elif kind == "commit":
                self.commits.append((i, ev))
                self.first_commit_idx.setdefault(ev["block"], i)
                self.any_commit_rounds.add(ev["block_round"])
                if ev["party"] in self.honest:
                    self.honest_commit_rounds.add(ev["block_round"])
                    self.honest_committed_blocks.setdefault(ev["block"], i)

        self.gst_round = self._find_gst_round()

    def _find_gst_round(self) -> int | None:
        cfg = self.config
        for r in range(1, cfg.horizon_rounds + 1):
            times = [t for p, t, _ in self.notify_by_round.get(r, []) if p in self.honest]
            if times and all(t >= cfg.gst for t in times):
                return r
        return None

    def block(self, bid: str) -> Block | None:
        try:
            return self.store.get(bid)
        except KeyError:
            return None

    def alive_at(self, p: int, r: int) -> bool:
        cr = self.crash_round[p]
        return cr is None or r <= cr

    def chain_related(self, a: str, b: str) -> bool:
        ba, bb = self.block(a), self.block(b)
        if ba is None or bb is None:
            return False
        lo, hi = (ba, bb) if ba.round <= bb.round else (bb, ba)
        cur = hi
        while cur.round > lo.round:
            cur = self.store.get(cur.parent)
        return cur.id == lo.id


# -- replication properties -------------------------------------------


def _pairwise_chain_check(
    ix: TraceIndex, blocks_with_idx: dict[str, int], what: str
) -> CheckResult:
    """All given blocks must lie on one chain; sorted-by-round adjacency suffices."""
    entries = []
    for bid, idx in blocks_with_idx.items():
        blk = ix.block(bid)
        if blk is None:
            return _fail([idx], f"{what} references unknown block {bid}")
        entries.append((blk.round, bid, idx))
    entries.sort()
    for (r1, b1, i1), (r2, b2, i2) in zip(entries, entries[1:]):
        if r1 == r2 and b1 != b2:
            return _fail([i1, i2], f"{what}: two distinct blocks formed in round {r1}")
        if b1 != b2 and not ix.chain_related(b1, b2):
            return _fail([i1, i2], f"{what}: blocks {b1} and {b2} are not chain-related")
    return _ok(f"{len(entries)} {what} blocks on one chain")


def check_agreement(trace: Trace, ix: TraceIndex | None = None) -> CheckResult:
    """Every pair of blocks committed by honest parties is extension-comparable."""
    ix = ix or TraceIndex(trace)
    return _pairwise_chain_check(ix, ix.honest_committed_blocks, "committed")


def check_liveness(trace: Trace, window: int | None = None, ix: TraceIndex | None = None) -> CheckResult:
    """After GST, no `window` consecutive rounds are commit-free for honest parties."""
    ix = ix or TraceIndex(trace)
    cfg = ix.config
    window = window if window is not None else 5 * cfg.f + 2
    if ix.gst_round is None:
        return _ok("no post-GST round within horizon; vacuous")
    first, last = ix.gst_round, cfg.horizon_rounds
    if last - first + 1 < window:
        return _ok(f"fewer than {window} post-GST rounds; vacuous")
    run_len = 0
    for r in range(first, last + 1):
        run_len = 0 if r in ix.honest_commit_rounds else run_len + 1
        if run_len >= window:
            start_round = r - window + 1
            pointer = min(
                (idx for p, _t, idx in ix.notify_by_round.get(start_round, []) if p in ix.honest),
                default=0,
            )
            return _fail(
                [pointer],
                f"no honest commit in rounds [{start_round}, {r}] (window {window})",
            )
    return _ok(f"no commit-free window of {window} rounds after GST")


def check_leader_utilization(trace: Trace, ix: TraceIndex | None = None) -> CheckResult:
    """Skipped-round bounds for crash-only runs, per crash epoch and in total.

    A round is skipped iff no commit event anywhere carries that block
    round. Each epoch between consecutive post-GST crash rounds may skip
    at most f+4 rounds, and the post-GST total is at most (k+1)(f+4) for
    k post-GST crash rounds.
    """
    ix = ix or TraceIndex(trace)
    cfg = ix.config
    if ix.byzantine:
        raise ValueError("leader-utilization is defined for crash-only traces")
    if ix.gst_round is None:
        return _ok("no post-GST round within horizon; vacuous")
    skipped, per_epoch, crash_rounds = _utilization_stats(ix)
    bound = cfg.f + 4
    for (start, end, count, rounds) in per_epoch:
        if count > bound:
            pointers = _round_pointers(ix, rounds[: 3])
            return _fail(
                pointers,
                f"epoch [{start}, {end}] skipped {count} rounds > f+4 = {bound}",
            )
    total_bound = (len(crash_rounds) + 1) * bound
    if len(skipped) > total_bound:
        return _fail(
            _round_pointers(ix, sorted(skipped)[:3]),
            f"total skipped {len(skipped)} > (k+1)(f+4) = {total_bound}",
        )
    return _ok(f"{len(skipped)} skipped rounds within bounds (k={len(crash_rounds)})")


def _round_pointers(ix: TraceIndex, rounds: list[int]) -> list[int]:
    out = []
    for r in rounds:
        notifies = ix.notify_by_round.get(r, [])
        if notifies:
            out.append(min(idx for _p, _t, idx in notifies))
    return out or [0]


def _utilization_stats(ix: TraceIndex):
    cfg = ix.config
    first, last = ix.gst_round, cfg.horizon_rounds
    skipped = [r for r in range(first, last + 1) if r not in ix.any_commit_rounds]
    crash_rounds = sorted(
        {r for _p, r in cfg.faults.crashes if first <= r <= last}
    )
    boundaries = [first] + crash_rounds + [last + 1]
    per_epoch = []
    for lo, hi in zip(boundaries, boundaries[1:]):
        rounds = [r for r in skipped if lo <= r < hi]
        per_epoch.append((lo, hi - 1, len(rounds), rounds))
    # rounds at/after the last crash form the closing epoch
    tail = [r for r in skipped if r >= boundaries[-1]]
    if tail:
        per_epoch.append((boundaries[-1], last, len(tail), tail))
    return set(skipped), per_epoch, crash_rounds


def check_chain_quality(trace: Trace, ix: TraceIndex | None = None) -> CheckResult:
    """Every post-GST window of 5f+2 rounds holds a committed honest block."""
    ix = ix or TraceIndex(trace)
    cfg = ix.config
    window = 5 * cfg.f + 2
    if ix.gst_round is None:
        return _ok("no post-GST round within horizon; vacuous")
    honest_rounds = _honest_committed_rounds(ix)
    first, last = ix.gst_round, cfg.horizon_rounds
    if last - first + 1 < window:
        return _ok(f"fewer than {window} post-GST rounds; vacuous")
    run_len = 0
    for r in range(first, last + 1):
        run_len = 0 if r in honest_rounds else run_len + 1
        if run_len >= window:
            start_round = r - window + 1
            return _fail(
                _round_pointers(ix, [start_round]),
                f"no honest block committed with round in [{start_round}, {r}]",
            )
    return _ok(f"honest block in every {window}-round window after GST")


def _honest_committed_rounds(ix: TraceIndex) -> set[int]:
    out = set()
    for bid in ix.honest_committed_blocks:
        blk = ix.block(bid)
        if blk is not None and blk.author >= 0 and blk.author not in ix.byzantine:
            out.add(blk.round)
    return out


# -- round-abstraction properties --------------------------------------


def lbr_synchronized_set(trace: Trace, r: int, leader: int, ix: TraceIndex | None = None) -> set[int]:
    """Honest parties whose round-r invocations with `leader` overlap enough, post-GST."""
    ix = ix or TraceIndex(trace)
    timing = ix.config.timing
    starts = [
        (p, t)
        for (p, rnd), (led, t, _idx) in ix.invocations.items()
        if rnd == r and led == leader and p in ix.honest and t >= ix.config.gst
    ]
    return max_synchronized_subset(starts, timing.delta_l - timing.c * timing.delta)


def check_lbr_properties(trace: Trace, ix: TraceIndex | None = None) -> dict[str, CheckResult]:
    """All five round-abstraction contracts plus the return-time bounds."""
    ix = ix or TraceIndex(trace)
    return {
        "endorsement": _check_endorsement(ix),
        "agreement": _check_return_agreement(ix),
        "progress": _check_progress(ix),
        "blocking": _check_blocking(ix),
        "reputation": _check_reputation(ix),
        "return_bounds": _check_return_bounds(ix),
    }


def _check_endorsement(ix: TraceIndex) -> CheckResult:
    if ix.malformed_certs:
        return _fail(ix.malformed_certs[:3], "certificate event does not form a valid block")
    for i, ev in ix.certify_events:
        endorsers = set(ev["endorsers"])
        if len(endorsers) < ix.quorum:
            return _fail([i], f"certificate carries {len(endorsers)} endorsers < 2f+1 = {ix.quorum}")
        if not endorsers <= set(range(ix.n)):
            return _fail([i], "certificate endorser outside the party set")
    return _ok(f"{len(ix.certify_events)} certificates well-formed")


def _check_return_agreement(ix: TraceIndex) -> CheckResult:
    returned: dict[str, int] = {}
    for i, ev in ix.returns:
        if ev["party"] in ix.honest:
            returned.setdefault(ev["block"], i)
    return _pairwise_chain_check(ix, returned, "returned")


def _check_progress(ix: TraceIndex) -> CheckResult:
    timing = ix.config.timing
    window = timing.delta_l - timing.c * timing.delta
    groups: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for (p, r), (leader, t, _idx) in ix.invocations.items():
        if p in ix.honest and t >= ix.config.gst:
            groups.setdefault((r, leader), []).append((p, t))
    crash_only = not ix.byzantine
    checked = 0
    for (r, leader), starts in sorted(groups.items()):
        sync = max_synchronized_subset(starts, window)
        if len(sync) < ix.quorum:
            continue
        if crash_only:
            if not ix.alive_at(leader, r):
                continue
        elif leader not in ix.honest:
            continue
        checked += 1
        for p in sorted(sync):
            entry = ix.return_by_inv.get((p, r))
            if entry is None:
                return _fail(
                    [ix.invocations[(p, r)][2]],
                    f"synchronized invocation ({p}, {r}) never returned",
                )
            i, ev = entry
            blk = ix.block(ev["block"])
            if ev["block_round"] != r or blk is None or blk.author != leader:
                return _fail(
                    [i],
                    f"round {r} had 2f+1 synchronized invocations with leader {leader} "
                    f"but party {p} returned block round {ev['block_round']}",
                )
    return _ok(f"progress held in {checked} fully-synchronized rounds")


def _check_blocking(ix: TraceIndex) -> CheckResult:
    for i, ev in ix.returns:
        r = ev["round"]
        if ev["block_round"] != r:
            continue
        inv = ix.invocations.get((ev["party"], r))
        if inv is None:
            return _fail([i], f"return without invocation for party {ev['party']} round {r}")
        leader = inv[0]
        if leader in ix.byzantine:
            continue
        self_inv = ix.invocations.get((leader, r))
        if self_inv is None or self_inv[0] != leader:
            return _fail(
                [i],
                f"round-{r} block returned although leader {leader} never invoked its round",
            )
    return _ok("no round-r block returned without its leader invoking")


def _check_reputation(ix: TraceIndex) -> CheckResult:
    for i, ev in ix.certify_events:
        r = ev["round"]
        for q in ev["endorsers"]:
            if q in ix.byzantine:
                continue
            if (q, r) not in ix.invocations:
                return _fail(
                    [i],
                    f"certificate for round {r} lists endorser {q} which never invoked that round",
                )
    return _ok("all certificate endorsers invoked their round")


def _check_return_bounds(ix: TraceIndex) -> CheckResult:
    delta_l = ix.config.timing.delta_l
    for i, ev in ix.returns:
        inv = ix.invocations.get((ev["party"], ev["round"]))
        if inv is None:
            return _fail([i], "return without matching invocation")
        _leader, start, _idx = inv
        if ev["t"] - start > delta_l:
            return _fail([i], f"invocation returned after {ev['t'] - start} > delta_l = {delta_l}")
        if ev["block_round"] > ev["round"]:
            return _fail([i], "returned block from a later round than the invocation")
    return _ok("all returns within delta_l and round-bounded")


# -- pacemaker ----------------------------------------------------------


def check_pacemaker(trace: Trace, ix: TraceIndex | None = None) -> dict[str, CheckResult]:
    ix = ix or TraceIndex(trace)
    return {
        "monotonic": _check_notify_monotonic(ix),
        "skew": _check_notify_skew(ix),
        "spacing": _check_notify_spacing(ix),
        "completeness": _check_notify_completeness(ix),
    }


def _check_notify_monotonic(ix: TraceIndex) -> CheckResult:
    for p, seq in sorted(ix.notifies_by_party.items()):
        prev_round = 0
        prev_idx = None
        for idx, r, _t in seq:
            if r <= prev_round:
                return _fail(
                    [i for i in (prev_idx, idx) if i is not None],
                    f"party {p} notified of round {r} after round {prev_round}",
                )
            prev_round, prev_idx = r, idx
    return _ok("per-party notifications strictly increase")


def _post_gst_round(ix: TraceIndex, r: int) -> bool:
    notifies = [t for p, t, _ in ix.notify_by_round.get(r, []) if p in ix.non_byz]
    return bool(notifies) and all(t >= ix.config.gst for t in notifies)


def _check_notify_skew(ix: TraceIndex) -> CheckResult:
    delta = ix.config.timing.delta
    for r in range(1, ix.config.horizon_rounds + 1):
        if not _post_gst_round(ix, r):
            continue
        entries = [(t, idx) for p, t, idx in ix.notify_by_round[r] if p in ix.non_byz]
        lo, hi = min(entries), max(entries)
        if hi[0] - lo[0] > delta:
            return _fail([lo[1], hi[1]], f"round {r} notification skew {hi[0] - lo[0]} > delta")
    return _ok("post-GST notification skew within delta")


def _check_notify_spacing(ix: TraceIndex) -> CheckResult:
    delta_p = ix.config.timing.delta_p
    for r in range(1, ix.config.horizon_rounds):
        if not _post_gst_round(ix, r):
            continue
        cur = [(t, idx) for p, t, idx in ix.notify_by_round.get(r, []) if p in ix.non_byz]
        nxt = [(t, idx) for p, t, idx in ix.notify_by_round.get(r + 1, []) if p in ix.non_byz]
        if not cur or not nxt:
            continue
        last_cur = max(cur)
        first_nxt = min(nxt)
        if first_nxt[0] < last_cur[0] + delta_p:
            return _fail(
                [last_cur[1], first_nxt[1]],
                f"round {r + 1} notified {last_cur[0] + delta_p - first_nxt[0]} too early",
            )
    return _ok("round spacing at least delta_p after GST")


def _check_notify_completeness(ix: TraceIndex) -> CheckResult:
    for p in sorted(ix.honest):
        rounds = {r for _idx, r, _t in ix.notifies_by_party.get(p, [])}
        missing = [r for r in range(1, ix.config.horizon_rounds + 1) if r not in rounds]
        if missing:
            return _fail(
                _round_pointers(ix, missing[:1]),
                f"honest party {p} missed new_round({missing[0]})",
            )
    return _ok("every honest party notified of every round")


# -- composite report ---------------------------------------------------


@dataclass
class VerificationReport:
    checks: dict[str, CheckResult | None]
    metrics: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values() if c is not None)

    def to_json(self) -> dict:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "passed": self.passed,
            "checks": {
                name: (c.to_json() if c is not None else None)
                for name, c in sorted(self.checks.items())
            },
            "metrics": self.metrics,
        }


def _aggregate(results: dict[str, CheckResult]) -> CheckResult:
    bad = [c for c in results.values() if not c.passed]
    if bad:
        pointers = sorted({i for c in bad for i in c.counterexamples})
        return _fail(pointers, "; ".join(c.detail for c in bad))
    return _ok()


def verify_trace(trace: Trace, liveness_window: int | None = None) -> VerificationReport:
    """Run every applicable checker over one trace and compute its metrics."""
    ix = TraceIndex(trace)
    checks: dict[str, CheckResult | None] = {}
    checks["agreement"] = check_agreement(trace, ix)
    checks["liveness"] = check_liveness(trace, liveness_window, ix)
    if ix.byzantine:
        checks["leader_utilization"] = None
    else:
        checks["leader_utilization"] = check_leader_utilization(trace, ix)
    checks["chain_quality"] = check_chain_quality(trace, ix)
    lbr = check_lbr_properties(trace, ix)
    for name, res in lbr.items():
        checks[f"lbr.{name}"] = res
    checks["lbr_properties"] = _aggregate(lbr)
    pm = check_pacemaker(trace, ix)
    for name, res in pm.items():
        checks[f"pacemaker.{name}"] = res
    checks["pacemaker"] = _aggregate(pm)
    return VerificationReport(checks=checks, metrics=compute_metrics(ix))


def compute_metrics(ix: TraceIndex) -> dict:
    cfg = ix.config
    metrics: dict = {
        "gst_round": ix.gst_round,
        "skipped_round_count": None,
        "per_epoch_skipped": None,
        "chain_quality_worst_window": None,
        "honest_block_ratio": None,
        "commits_per_round": None,
        "latency_in_rounds": None,
        "steady_from_round": None,
        "steady_commits_per_round": None,
        "steady_latency_in_rounds": None,
    }
    if ix.gst_round is None:
        return metrics
    first, last = ix.gst_round, cfg.horizon_rounds
    total = last - first + 1

    skipped, per_epoch, _crash_rounds = _utilization_stats(ix)
    metrics["skipped_round_count"] = len(skipped)
    metrics["per_epoch_skipped"] = [[lo, hi, count] for lo, hi, count, _ in per_epoch]

    honest_rounds = _honest_committed_rounds(ix)
    worst = cur = 0
    for r in range(first, last + 1):
        cur = 0 if r in honest_rounds else cur + 1
        worst = max(worst, cur)
    metrics["chain_quality_worst_window"] = worst
    metrics["honest_block_ratio"] = _honest_block_ratio(ix)

    committed = sorted(ix.honest_commit_rounds)
    metrics["commits_per_round"] = len([r for r in committed if first <= r <= last]) / total
    metrics["latency_in_rounds"] = _mean_commit_wait(committed, first, last)

    crash_rounds = [r for _p, r in cfg.faults.crashes]
    steady_from = max([first] + [r + cfg.f + 5 for r in crash_rounds])
    metrics["steady_from_round"] = steady_from
    if steady_from <= last:
        steady_total = last - steady_from + 1
        metrics["steady_commits_per_round"] = (
            len([r for r in committed if steady_from <= r <= last]) / steady_total
        )
        metrics["steady_latency_in_rounds"] = _mean_commit_wait(committed, steady_from, last)
    return metrics


def _mean_commit_wait(committed_rounds: list[int], first: int, last: int) -> float | None:
    """Mean extra rounds a given round waits until the next committed round.

    Rounds past the final commit are excluded rather than guessed at.
    """
    if not committed_rounds:
        return None
    waits = []
    j = 0
    for r in range(first, last + 1):
        while j < len(committed_rounds) and committed_rounds[j] < r:
            j += 1
        if j == len(committed_rounds):
            break
        waits.append(committed_rounds[j] - r)
    if not waits:
        return None
    return sum(waits) / len(waits)


def _honest_block_ratio(ix: TraceIndex) -> float | None:
    best: Block | None = None
    for bid in ix.honest_committed_blocks:
        blk = ix.block(bid)
        if blk is not None and (best is None or blk.round > best.round):
            best = blk
    if best is None:
        return None
    total = honest = 0
    cur = best
    while cur.id != ix.genesis:
        total += 1
        if cur.author not in ix.byzantine:
            honest += 1
        cur = ix.store.get(cur.parent)
    return honest / total if total else None


# -- comparisons --------------------------------------------------------

COMPARISON_COLUMNS = [
    "label",
    "elector",
    "seed",
    "passed",
    "commits_per_round",
    "latency_in_rounds",
    "skipped_round_count",
    "steady_commits_per_round",
    "steady_latency_in_rounds",
    "chain_quality_worst_window",
    "honest_block_ratio",
]

_NUMERIC_COLUMNS = COMPARISON_COLUMNS[3:]


def comparison_row(label: str, config: ExecutionConfig, report: VerificationReport) -> dict:
    m = report.metrics
    return {
        "label": label,
        "elector": config.elector,
        "seed": config.seed,
        "passed": 1 if report.passed else 0,
        "commits_per_round": m["commits_per_round"],
        "latency_in_rounds": m["latency_in_rounds"],
        "skipped_round_count": m["skipped_round_count"],
        "steady_commits_per_round": m["steady_commits_per_round"],
        "steady_latency_in_rounds": m["steady_latency_in_rounds"],
        "chain_quality_worst_window": m["chain_quality_worst_window"],
        "honest_block_ratio": m["honest_block_ratio"],
    }


def aggregate_rows(rows: list[dict]) -> list[dict]:
    """Mean and standard-deviation summary rows per label."""
    out = []
    labels = sorted({row["label"] for row in rows})
    for label in labels:
        group = [row for row in rows if row["label"] == label]
        for stat, fn in (("mean", statistics.fmean), ("stddev", statistics.pstdev)):
            agg = {"label": label, "elector": group[0]["elector"], "seed": stat}
            for col in _NUMERIC_COLUMNS:
                values = [row[col] for row in group if row[col] is not None]
                agg[col] = fn(values) if values else None
            out.append(agg)
    return out


def compare(
    configs: list[ExecutionConfig],
    seeds: list[int],
    labels: list[str] | None = None,
) -> tuple[list[dict], list[dict]]:
    """Run each config across the seeds and tabulate per-run plus summary rows.

    Configs should differ only in elector and/or fault schedule so the
    comparison isolates the rotation rule.
    """
    if labels is None:
        labels = [c.elector for c in configs]
    rows = []
    for label, cfg in zip(labels, configs):
        for seed in seeds:
            seeded = cfg.with_overrides(seed=seed)
            report = verify_trace(run(seeded))
            rows.append(comparison_row(label, seeded, report))
    rows.sort(key=lambda row: (row["label"], row["seed"]))
    return rows, aggregate_rows(rows)
