"""Core chain data types: blocks, certificates, and the block store.

Blocks form a parent-linked structure rooted at a genesis sentinel. Every
non-genesis block carries the certificate that endorsed it, so a block is
only ever stored once it is certified. Navigation helpers answer the
ancestry queries used by the commit rule and by the trace checkers.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

PartyId = int
Round = int

# Sentinel author for the genesis block. Never a real party index and
# excluded from chain-quality accounting and author-exclusion walks.
GENESIS_AUTHOR: PartyId = -1


class UnknownBlockError(KeyError):
    """A block id did not resolve in the store."""


class BlockIdCollision(RuntimeError):
    """Two distinct blocks hashed to the same id; fatal for the run."""


def block_id(author: PartyId, round_no: Round, parent: str, payload_size: int) -> str:
    """Stable 64-bit identifier of a block's identity tuple, hex encoded.

    Equal inputs always give equal ids, across processes and runs. The
    certificate is deliberately not part of the id: a block's identity is
    fixed at proposal time, before endorsement.
    """
    key = f"{author}|{round_no}|{parent}|{payload_size}".encode()
    return hashlib.blake2b(key, digest_size=8).hexdigest()


@dataclass(frozen=True)
class Certificate:
    """Proof that a quorum endorsed a block in a given round.

    The endorser set must contain at least 2f+1 parties for the run's
    fault budget f; `certified` checks that, since f is a run parameter
    rather than a property of the certificate itself.
    """

    round: Round
    endorsers: frozenset[PartyId]

    def to_json(self) -> dict:
        return {"round": self.round, "endorsers": sorted(self.endorsers)}


@dataclass(frozen=True)
class Block:
    id: str
    parent: str
    round: Round
    author: PartyId
    payload_size: int
    certificate: Certificate

    def to_json(self) -> dict:
        return {
            "author": self.author,
            "certificate": self.certificate.to_json(),
            "id": self.id,
            "parent": self.parent,
            "payload_size": self.payload_size,
            "round": self.round,
        }


def make_genesis(n: int) -> Block:
    """Genesis block for a system of n parties.

    Genesis is its own parent, occupies round 0, and is endorsed by the
    full party set so that reputation-based election is well defined at
    round 1.
    """
    gid = block_id(GENESIS_AUTHOR, 0, "genesis", 0)
    return Block(
        id=gid,
        parent=gid,
        round=0,
        author=GENESIS_AUTHOR,
        payload_size=0,
        certificate=Certificate(round=0, endorsers=frozenset(range(n))),
    )


def certified(block: Block, r: Round, f: int) -> bool:
    """True iff the block carries a valid round-r certificate for fault budget f."""
    cert = block.certificate
    return cert.round == r and len(cert.endorsers) >= 2 * f + 1


class BlockStore:
    """Map of certified blocks keyed by id, rooted at genesis.

    Single-writer within one simulation. Insertion enforces the chain
    invariants: parents present, rounds strictly increasing along parent
    links, and no id collisions.
    """

    def __init__(self, genesis: Block):
        self.genesis = genesis.id
        self._blocks: dict[str, Block] = {genesis.id: genesis}

    def __contains__(self, bid: str) -> bool:
        return bid in self._blocks

    def __len__(self) -> int:
        return len(self._blocks)

    def get(self, bid: str) -> Block:
        try:
            return self._blocks[bid]
        except KeyError:
            raise UnknownBlockError(bid) from None

    def add(self, block: Block) -> None:
        existing = self._blocks.get(block.id)
        if existing is not None:
            if existing != block:
                raise BlockIdCollision(block.id)
            return
        if block.parent not in self._blocks:
            raise UnknownBlockError(block.parent)
        parent = self._blocks[block.parent]
        if parent.round >= block.round:
            raise ValueError(
                f"block {block.id} round {block.round} does not increase on parent round {parent.round}"
            )
        if block.certificate.round != block.round:
            raise ValueError(f"block {block.id} certificate round mismatch")
        self._blocks[block.id] = block

    def blocks(self) -> list[Block]:
        return list(self._blocks.values())


def extends(ancestor: str, descendant: str, store: BlockStore) -> bool:
    """True iff `ancestor` is on `descendant`'s implied chain.

    Reflexive: every block extends itself. Walking stops once the rounds
    drop below the ancestor's, since rounds strictly decrease toward
    genesis.
    """
    target = store.get(ancestor)
    cur = store.get(descendant)
    while True:
        if cur.id == target.id:
            return True
        if cur.round <= target.round:
            return False
        cur = store.get(cur.parent)


def implied_chain(head: str, store: BlockStore) -> list[Block]:
    """The chain from `head` down to genesis, inclusive, head first."""
    chain = [store.get(head)]
    while chain[-1].id != store.genesis:
        chain.append(store.get(chain[-1].parent))
    return chain
