"""Per-party replica state and the commit rule.

Each party keeps its commit head (the highest block it has committed),
the set of committed block ids, and its current round invocation. On an
invocation return B the party commits every not-yet-committed block on
B's implied chain, oldest first, iff B extends its commit head;
otherwise the return is stale and the state is left untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chain import Block, BlockStore, PartyId, extends
from .lbr import Invocation


@dataclass
class PartyProcess:
    """Mutable per-party state driven by the simulation scheduler."""

    idx: PartyId
    byzantine: bool
    crash_round: int | None
    commit_head: str
    high_block: str
    committed: set[str] = field(default_factory=set)
    committed_log: list[str] = field(default_factory=list)
    invocation: Invocation | None = None
    crashed: bool = False

    def alive_in_round(self, r: int) -> bool:
        return self.crash_round is None or r <= self.crash_round


def commit_delta(store: BlockStore, state: PartyProcess, block: Block) -> list[Block]:
    """Blocks the party newly commits when an invocation returns `block`.

    Empty when the return does not extend the commit head (a stale head
    was returned) or brings nothing new. Otherwise the uncommitted suffix
    of the block's implied chain, ancestor first.
    """
    if block.id in state.committed or block.id == state.commit_head:
        return []
    if not extends(state.commit_head, block.id, store):
        return []
    suffix = []
    cur = block
    while cur.id != state.commit_head and cur.id not in state.committed:
        suffix.append(cur)
        cur = store.get(cur.parent)
    suffix.reverse()
    return suffix


def apply_commits(state: PartyProcess, new_blocks: list[Block]) -> None:
    for b in new_blocks:
        state.committed.add(b.id)
        state.committed_log.append(b.id)
    if new_blocks:
        state.commit_head = new_blocks[-1].id
