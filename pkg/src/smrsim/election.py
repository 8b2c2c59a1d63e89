"""Leader rotation: round-robin baseline and the carousel reputation rule.

Both electors are pure functions of (round, commit head, block store), so
every party that feeds them the same inputs picks the same leader with no
extra communication. Parties whose commit heads diverge may disagree on
the leader; that divergence is a first-class, tested behavior.

The carousel rule elects from the endorsers of the latest committed block
(parties known active one round ago), excluding the authors of the last f
distinct committed blocks so leadership keeps rotating, and falls back to
round-robin whenever the previous round produced no commit.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .chain import Block, BlockStore, PartyId, Round

FALLBACK = "fallback"
REPUTATION = "reputation"


def round_robin_leader(r: Round, n: int) -> PartyId:
    return r % n


def _pick(candidates: list[PartyId], r: Round, pick_rule: str, seed: int) -> PartyId:
    """Deterministic pick from a sorted, non-empty candidate list."""
    if pick_rule == "round_robin_candidates":
        return candidates[r % len(candidates)]
    if pick_rule == "lowest_id":
        return candidates[0]
    if pick_rule == "seeded_hash":
        digest = hashlib.blake2b(f"{seed}|{r}".encode(), digest_size=8).digest()
        return candidates[int.from_bytes(digest, "big") % len(candidates)]
    raise ValueError(f"unknown pick_rule {pick_rule!r}")


def last_authors(commit_head: Block, store: BlockStore, f: int) -> set[PartyId]:
    """Distinct authors of the most recent committed blocks, head first.

    Walks parent links from the head until f distinct authors are seen or
    genesis is reached. Repeated authors along the chain do not consume
    budget, and the genesis sentinel author is never collected.
    """
    authors: set[PartyId] = set()
    block = commit_head
    while len(authors) < f and block.id != store.genesis:
        authors.add(block.author)
        block = store.get(block.parent)
    return authors


def carousel_leader(
    r: Round,
    commit_head: Block,
    store: BlockStore,
    n: int,
    f: int,
    pick_rule: str = "round_robin_candidates",
    seed: int = 0,
) -> tuple[PartyId, str, list[PartyId]]:
    """Elect round r's leader from the caller's commit head.

    Returns (leader, path, candidates) where path records whether the
    round-robin fallback or the reputation scheme decided, and candidates
    is the sorted reputation candidate set (empty on the fallback path).
    """
    if commit_head.round != r - 1:
        return round_robin_leader(r, n), FALLBACK, []
    active = set(commit_head.certificate.endorsers)
    candidates = sorted(active - last_authors(commit_head, store, f))
    # |endorsers| >= 2f+1 and at most f authors are excluded, so at least
    # f+1 candidates always remain.
    return _pick(candidates, r, pick_rule, seed), REPUTATION, candidates


@dataclass(frozen=True)
class LeaderElector:
    """Configured election strategy shared by all parties of a run."""

    strategy: str
    n: int
    f: int
    pick_rule: str = "round_robin_candidates"
    seed: int = 0

    def choose(self, r: Round, commit_head: Block, store: BlockStore) -> tuple[PartyId, str, list[PartyId]]:
        if self.strategy == "round_robin":
            return round_robin_leader(r, self.n), FALLBACK, []
        if self.strategy == "carousel":
            return carousel_leader(r, commit_head, store, self.n, self.f, self.pick_rule, self.seed)
        raise ValueError(f"unknown elector strategy {self.strategy!r}")
