"""Leader-based round machinery: invocations, endorsement, adversary hooks.

One round at one party is a single invocation: it starts when the round
notification arrives, may endorse exactly one proposal matching its
(round, leader) pair, and returns exactly once, either early when the
round's certified block arrives or at its deadline with the highest
certified block the party knows. The concrete message pattern is a
three-step exchange (proposal broadcast, endorsements to the leader,
certified-block broadcast), so c = 3.

Adversary behavior is a closed vocabulary of scripted actions interpreted
here; anything a script cannot express cannot happen, which keeps every
run inside the property envelope the trace checkers re-verify.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chain import PartyId, Round
from .config import AdversaryAction, ExecutionConfig


@dataclass
class Invocation:
    """Per-party, per-round lifecycle state."""

    party: PartyId
    round: Round
    leader: PartyId
    start: int
    deadline: int
    returned: bool = False
    endorsed: bool = False


@dataclass
class Aggregation:
    """Leader-side endorsement collection for one proposal."""

    block_id: str
    parent: str
    round: Round
    author: PartyId
    payload_size: int
    endorsements: list[tuple[int, PartyId]] = field(default_factory=list)
    done: bool = False


def select_endorsers(endorsements: list[tuple[int, PartyId]], quorum: int) -> frozenset[PartyId]:
    """The certificate's endorser set: earliest quorum by arrival time.

    Ties break by ascending party id, modeling a leader that aggregates
    the fastest quorum it sees.
    """
    ordered = sorted(endorsements)
    return frozenset(party for _, party in ordered[:quorum])


def max_synchronized_subset(starts: list[tuple[PartyId, int]], window: int) -> set[PartyId]:
    """Largest set of invocations whose start times span at most `window`.

    Equal-length execution intervals share an intersection of at least
    c*delta exactly when their starts lie within delta_l - c*delta of
    each other, so a sliding window over sorted starts finds the maximal
    synchronized set. Ties resolve to the earliest window.
    """
    if not starts:
        return set()
    ordered = sorted(starts, key=lambda x: (x[1], x[0]))
    best: tuple[int, int] = (0, 0)  # (size, -start_index) not needed; keep first maximal
    best_range = (0, 0)
    lo = 0
    for hi in range(len(ordered)):
        while ordered[hi][1] - ordered[lo][1] > window:
            lo += 1
        size = hi - lo + 1
        if size > best[0]:
            best = (size, lo)
            best_range = (lo, hi)
    lo, hi = best_range
    return {party for party, _ in ordered[lo : hi + 1]}


def synchronized_set(
    invocations: list[tuple[PartyId, Round, PartyId, int]],
    r: Round,
    leader: PartyId,
    honest: set[PartyId],
    gst: int,
    delta_l: int,
    c: int,
    delta: int,
) -> set[PartyId]:
    """Honest parties whose round-r invocations with `leader` overlap enough.

    Only invocations starting at or after GST count; a round that begins
    before GST has an empty synchronized set by definition.
    """
    starts = [
        (party, start)
        for party, rnd, led, start in invocations
        if rnd == r and led == leader and party in honest and start >= gst
    ]
    return max_synchronized_subset(starts, delta_l - c * delta)


class AdversaryRuntime:
    """Interprets the adversary script during a run.

    Tracks which certified blocks were hidden and the per-party reveal
    plan registered when each hide fired. Static envelope validation
    happens at config time; the runtime only answers point queries from
    the engine.
    """

    def __init__(self, config: ExecutionConfig):
        self._by_kind: dict[str, list[AdversaryAction]] = {}
        for action in config.adversary_script:
            self._by_kind.setdefault(action.kind, []).append(action)
        # reveal schedule: party -> round -> block ids to surface
        self._reveals: dict[PartyId, dict[Round, list[str]]] = {}
        self.hidden_blocks: set[str] = set()

    def _find(self, kind: str, r: Round) -> AdversaryAction | None:
        for action in self._by_kind.get(kind, ()):
            if action.active_in(r):
                return action
        return None

    def withholds_proposal(self, r: Round) -> AdversaryAction | None:
        return self._find("withhold_proposal", r)

    def selective_proposal(self, r: Round) -> AdversaryAction | None:
        return self._find("selective_proposal", r)

    def hide_cert(self, r: Round) -> AdversaryAction | None:
        return self._find("hide_cert", r)

    def link_delay(self, r: Round, sender: PartyId, receiver: PartyId) -> int | None:
        for action in self._by_kind.get("delay_link", ()):
            if action.active_in(r) and action.sender == sender and action.receiver == receiver:
                return action.delay
        return None

    def register_hide(
        self, block_id: str, r: Round, action: AdversaryAction, all_parties: range
    ) -> tuple[list[PartyId], dict[PartyId, Round]]:
        """Apply a hide to a certificate formed in round r.

        Returns (immediate delivery targets, reveal plan). Non-target
        parties learn the block only through the reveal plan or through a
        later proposal that carries it as a parent.
        """
        targets = sorted(action.targets) if action.targets else []
        plan: dict[PartyId, Round] = {}
        if action.reveal_after is not None:
            for p in all_parties:
                if p not in targets:
                    plan[p] = r + action.reveal_after
        self.hidden_blocks.add(block_id)
        for party, reveal_round in plan.items():
            self._reveals.setdefault(party, {}).setdefault(reveal_round, []).append(block_id)
        return targets, plan

    def reveals_due(self, party: PartyId, r: Round) -> list[str]:
        return self._reveals.get(party, {}).get(r, [])
