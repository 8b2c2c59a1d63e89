"""Deterministic discrete-event simulation of leader-based rounds.

One run executes the per-party loop (round notification, local election,
round invocation, commit on extension) over a simulated network that is
asynchronous before GST and delta-bounded after. All randomness comes
from one seeded generator consumed in a deterministic order, so equal
configs produce byte-identical traces.

The harness plays the role of the round abstraction's implementation:
certificates only ever form on a proposal that extends the globally
highest certified block, so all certified blocks of a run lie on a
single chain and cross-return agreement holds by construction. Hiding a
certificate delays who learns about it, never forks the chain; if a hide
would rob an honest proposer of the current tip after GST, the tip
surfaces to that proposer (recorded as a forced_reveal action), which
keeps round progress intact under any script.
"""

from __future__ import annotations

import heapq
import itertools
import random

from .chain import Block, BlockStore, Certificate, block_id, make_genesis
from .config import ExecutionConfig
from .election import LeaderElector
from .events import Trace
from .lbr import AdversaryRuntime, Aggregation, Invocation, select_endorsers
from .node import PartyProcess, apply_commits, commit_delta
from .pacemaker import build_schedule

# Tie priority at equal timestamps: deliveries, then invocation deadlines,
# then round notifications, so every invocation of a round settles before
# the next round opens.
_PRIO_DELIVER = 0
_PRIO_DEADLINE = 1
_PRIO_ROUND = 2


def run(config: ExecutionConfig) -> Trace:
    """Execute one simulation and return its complete trace."""
    config.validate()
    return _Simulation(config).run()


class _Simulation:
    def __init__(self, config: ExecutionConfig):
        self.config = config
        self.rng = random.Random(config.seed)
        self.timing = config.timing
        self.schedule = build_schedule(config, self.rng)
        self.adversary = AdversaryRuntime(config)
        self.elector = LeaderElector(
            strategy=config.elector,
            n=config.n,
            f=config.f,
            pick_rule=config.pick_rule,
            seed=config.seed,
        )
        genesis = make_genesis(config.n)
        self.store = BlockStore(genesis)
        self.tip = genesis.id
        self.tip_round = 0
        self.parties = [
            PartyProcess(
                idx=p,
                byzantine=p in config.faults.byzantine,
                crash_round=config.faults.crash_round(p),
                commit_head=genesis.id,
                high_block=genesis.id,
            )
            for p in range(config.n)
        ]
        self.high_round = [0] * config.n
        self.crash_time = [self._crash_time(p) for p in range(config.n)]
        self.events: list[dict] = []
        self._heap: list = []
        self._seq = itertools.count()
        self._aggregations: dict[str, Aggregation] = {}
        self._pending_proposals: dict[tuple[int, int], list[tuple]] = {}

    def _crash_time(self, p: int) -> int | None:
        r = self.config.faults.crash_round(p)
        if r is None or r + 1 > self.config.horizon_rounds:
            return None
        return self.schedule[r + 1][p]

    # -- scheduling ---------------------------------------------------

    def _push(self, t: int, prio: int, item: tuple) -> None:
        heapq.heappush(self._heap, (t, prio, next(self._seq), item))

    def _emit(self, kind: str, t: int, **fields) -> None:
        ev = {"kind": kind, "t": t}
        ev.update(fields)
        self.events.append(ev)

    def _delay(self, sender: int, receiver: int, send_time: int, r: int) -> int:
        override = self.adversary.link_delay(r, sender, receiver)
        if override is not None:
            return override
        if send_time >= self.config.gst:
            return self.rng.randint(1, self.timing.delta)
        # pre-GST: the network may hold the message until just after GST
        return self.rng.randint(1, self.config.gst - send_time + self.timing.delta)

    # -- main loop ----------------------------------------------------

    def run(self) -> Trace:
        cfg = self.config
        for r in range(1, cfg.horizon_rounds + 1):
            for p in range(cfg.n):
                party = self.parties[p]
                if party.alive_in_round(r):
                    self._push(self.schedule[r][p], _PRIO_ROUND, ("round", p, r))
        for p in range(cfg.n):
            if self.crash_time[p] is not None:
                self._push(self.crash_time[p], _PRIO_ROUND, ("crash", p))
        while self._heap:
            t, _prio, _seq, item = heapq.heappop(self._heap)
            tag = item[0]
            if tag == "round":
                self._on_new_round(item[1], item[2], t)
            elif tag == "deliver":
                self._on_deliver(item[1], item[2], t)
            elif tag == "deadline":
                self._on_deadline(item[1], item[2], t)
            elif tag == "crash":
                self._on_crash(item[1], t)
        return Trace(config=cfg, events=self.events)

    # -- handlers -----------------------------------------------------

    def _on_crash(self, p: int, t: int) -> None:
        party = self.parties[p]
        party.crashed = True
        self._emit("crash", t, party=p, round=party.crash_round)

    def _dead(self, p: int, t: int) -> bool:
        ct = self.crash_time[p]
        return ct is not None and t >= ct

    def _on_new_round(self, p: int, r: int, t: int) -> None:
        party = self.parties[p]
        self._emit("new_round", t, party=p, round=r)
        head = self.store.get(party.commit_head)
        leader, path, candidates = self.elector.choose(r, head, self.store)
        self._emit("elect", t, party=p, round=r, path=path, candidates=candidates, leader=leader)
        inv = Invocation(party=p, round=r, leader=leader, start=t, deadline=t + self.timing.delta_l)
        party.invocation = inv
        self._emit("lbr_start", t, party=p, round=r, leader=leader)
        for bid in self.adversary.reveals_due(p, r):
            blk = self.store.get(bid)
            effective = blk.round > self.high_round[p]
            if effective:
                party.high_block = bid
                self.high_round[p] = blk.round
            self._emit(
                "adversary_action", t,
                action="reveal", party=p, round=r, block=bid, effective=effective,
            )
        if leader == p:
            self._propose(party, inv, t)
        for prop in self._pending_proposals.pop((p, r), []):
            self._consider_endorse(party, prop, t)
        self._push(inv.deadline, _PRIO_DEADLINE, ("deadline", p, r))

    def _propose(self, party: PartyProcess, inv: Invocation, t: int) -> None:
        r = inv.round
        p = party.idx
        if party.byzantine and self.adversary.withholds_proposal(r):
            self._emit("adversary_action", t, action="withhold_proposal", party=p, round=r)
            return
        if not party.byzantine and t >= self.config.gst and party.high_block != self.tip:
            # a hidden certificate must not stall an honest proposer
            party.high_block = self.tip
            self.high_round[p] = self.tip_round
            self._emit("adversary_action", t, action="forced_reveal", party=p, round=r, block=self.tip)
        if self.high_round[p] >= r:
            # the round is already certified (pre-GST races); nothing to extend
            return
        parent = party.high_block
        payload = self.config.block_payload_txns
        bid = block_id(p, r, parent, payload)
        self._aggregations[bid] = Aggregation(
            block_id=bid, parent=parent, round=r, author=p, payload_size=payload
        )
        prop = (bid, parent, r, p, payload)
        recipients = [q for q in range(self.config.n) if q != p]
        action = self.adversary.selective_proposal(r) if party.byzantine else None
        if action is not None:
            recipients = [q for q in sorted(action.targets) if q != p]
            self._emit(
                "adversary_action", t,
                action="selective_proposal", party=p, round=r, targets=list(recipients),
            )
        self._consider_endorse(party, prop, t)
        for q in recipients:
            self._push(t + self._delay(p, q, t, r), _PRIO_DELIVER, ("deliver", q, ("proposal", prop)))

    def _on_deliver(self, p: int, msg: tuple, t: int) -> None:
        if self._dead(p, t):
            return
        party = self.parties[p]
        tag = msg[0]
        if tag == "proposal":
            prop = msg[1]
            r = prop[2]
            inv = party.invocation
            if inv is None or inv.round < r:
                # round not open here yet; endorse consideration waits
                self._learn(party, prop[1])
                self._pending_proposals.setdefault((p, r), []).append(prop)
            else:
                self._consider_endorse(party, prop, t)
        elif tag == "endorse":
            self._on_endorsement(p, msg[1], msg[2], t)
        elif tag == "cert":
            blk = self.store.get(msg[1])
            self._learn(party, msg[1])
            self._maybe_early_return(party, blk, t)

    def _learn(self, party: PartyProcess, bid: str) -> None:
        blk = self.store.get(bid)
        if blk.round > self.high_round[party.idx]:
            party.high_block = bid
            self.high_round[party.idx] = blk.round

    def _consider_endorse(self, party: PartyProcess, prop: tuple, t: int) -> None:
        bid, parent, r, author, _payload = prop
        # the proposal carries its certified parent; receiving it is learning it
        self._learn(party, parent)
        inv = party.invocation
        if (
            inv is None
            or inv.returned
            or inv.endorsed
            or inv.round != r
            or inv.leader != author
        ):
            return
        inv.endorsed = True
        self._emit("endorse", t, party=party.idx, round=r, block=bid, author=author)
        if author == party.idx:
            self._on_endorsement(author, bid, party.idx, t)
        else:
            self._push(
                t + self._delay(party.idx, author, t, r),
                _PRIO_DELIVER,
                ("deliver", author, ("endorse", bid, party.idx)),
            )

    def _on_endorsement(self, leader_idx: int, bid: str, endorser: int, t: int) -> None:
        if self._dead(leader_idx, t):
            return
        agg = self._aggregations.get(bid)
        if agg is None or agg.done:
            return
        leader = self.parties[leader_idx]
        inv = leader.invocation
        if inv is None or inv.round != agg.round or inv.returned:
            # aggregation window closed with the leader's invocation
            return
        agg.endorsements.append((t, endorser))
        if len(agg.endorsements) < self.config.quorum:
            return
        if agg.parent != self.tip:
            # stale or raced proposal: it can never certify
            agg.done = True
            return
        endorsers = select_endorsers(agg.endorsements, self.config.quorum)
        block = Block(
            id=agg.block_id,
            parent=agg.parent,
            round=agg.round,
            author=agg.author,
            payload_size=agg.payload_size,
            certificate=Certificate(round=agg.round, endorsers=endorsers),
        )
        self.store.add(block)
        self.tip = block.id
        self.tip_round = block.round
        agg.done = True
        self._emit(
            "certify", t,
            block=block.id, parent=block.parent, round=block.round, author=block.author,
            payload_size=block.payload_size, endorsers=sorted(endorsers),
        )
        self._learn(leader, block.id)
        recipients = [q for q in range(self.config.n) if q != leader_idx]
        action = self.adversary.hide_cert(agg.round) if leader.byzantine else None
        if action is not None:
            targets, plan = self.adversary.register_hide(
                block.id, agg.round, action, range(self.config.n)
            )
            self._emit(
                "adversary_action", t,
                action="hide_cert", party=leader_idx, round=agg.round, block=block.id,
                targets=list(targets), reveal_plan={str(p): r for p, r in sorted(plan.items())},
            )
            recipients = [q for q in targets if q != leader_idx]
        for q in recipients:
            self._push(
                t + self._delay(leader_idx, q, t, agg.round),
                _PRIO_DELIVER,
                ("deliver", q, ("cert", block.id)),
            )
        self._maybe_early_return(leader, block, t)

    def _maybe_early_return(self, party: PartyProcess, block: Block, t: int) -> None:
        inv = party.invocation
        if inv is not None and not inv.returned and inv.round == block.round and inv.leader == block.author:
            self._do_return(party, block, t)

    def _on_deadline(self, p: int, r: int, t: int) -> None:
        party = self.parties[p]
        inv = party.invocation
        if inv is None or inv.round != r or inv.returned:
            return
        blk = self.store.get(party.high_block)
        while blk.round > r:
            blk = self.store.get(blk.parent)
        if blk.round == r and blk.author != inv.leader:
            # never hand a round-r block to an invocation made with a
            # different leader
            blk = self.store.get(blk.parent)
        self._do_return(party, blk, t)

    def _do_return(self, party: PartyProcess, block: Block, t: int) -> None:
        inv = party.invocation
        inv.returned = True
        self._emit(
            "lbr_return", t,
            party=party.idx, round=inv.round, block=block.id, block_round=block.round,
        )
        new_blocks = commit_delta(self.store, party, block)
        for b in new_blocks:
            self._emit(
                "commit", t,
                party=party.idx, block=b.id, block_round=b.round, author=b.author,
            )
        apply_commits(party, new_blocks)
