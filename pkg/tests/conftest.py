"""Shared builders for configs, hand-made chains, and forged traces."""

from __future__ import annotations

import copy

import pytest

from smrsim.chain import Block, BlockStore, Certificate, block_id, make_genesis
from smrsim.config import AdversaryAction, ExecutionConfig, FaultSchedule
from smrsim.engine import run
from smrsim.events import Trace


def make_config(n=4, f=1, seed=1, horizon=20, **kwargs) -> ExecutionConfig:
    return ExecutionConfig(n=n, f=f, seed=seed, horizon_rounds=horizon, **kwargs)


def crash_config(n, f, crashes, seed=1, horizon=60, elector="carousel", **kwargs) -> ExecutionConfig:
    return ExecutionConfig(
        n=n, f=f, seed=seed, horizon_rounds=horizon, elector=elector,
        faults=FaultSchedule(crashes=tuple(crashes)), **kwargs,
    )


def byz_config(n, f, byzantine, script, seed=1, horizon=60, **kwargs) -> ExecutionConfig:
    return ExecutionConfig(
        n=n, f=f, seed=seed, horizon_rounds=horizon,
        faults=FaultSchedule(byzantine=frozenset(byzantine)),
        adversary_script=tuple(script), **kwargs,
    )


def hide_action(rounds, targets, reveal_after=2) -> AdversaryAction:
    lo, hi = rounds if isinstance(rounds, tuple) else (rounds, rounds)
    return AdversaryAction(
        kind="hide_cert", round_from=lo, round_to=hi,
        targets=tuple(targets), reveal_after=reveal_after,
    )


def chain_builder(n=4):
    """A store plus a helper to append certified blocks by hand."""
    genesis = make_genesis(n)
    store = BlockStore(genesis)

    def add(parent: str, round_no: int, author: int, endorsers=None, payload=5) -> Block:
        endorsers = frozenset(endorsers if endorsers is not None else range(n))
        blk = Block(
            id=block_id(author, round_no, parent, payload),
            parent=parent,
            round=round_no,
            author=author,
            payload_size=payload,
            certificate=Certificate(round=round_no, endorsers=endorsers),
        )
        store.add(blk)
        return blk

    return store, genesis, add


def mutate_trace(trace: Trace, index: int, **changes) -> Trace:
    """Copy of the trace with one event's fields replaced (forgery helper)."""
    events = copy.deepcopy(trace.events)
    events[index] = {**events[index], **changes}
    return Trace(config=trace.config, events=events)


def find_event(trace: Trace, kind: str, **match) -> tuple[int, dict]:
    for i, ev in enumerate(trace.events):
        if ev["kind"] == kind and all(ev.get(k) == v for k, v in match.items()):
            return i, ev
    raise AssertionError(f"no {kind} event matching {match}")


@pytest.fixture(scope="session")
def happy_trace() -> Trace:
    return run(make_config(n=4, f=1, seed=7, horizon=20))


@pytest.fixture(scope="session")
def crash_trace() -> Trace:
    return run(crash_config(n=10, f=3, crashes=[(2, 10), (5, 25), (7, 40)], seed=42, horizon=80))


@pytest.fixture(scope="session")
def byz_trace() -> Trace:
    cfg = byz_config(
        n=10, f=3, byzantine={0, 1, 2},
        script=[hide_action((1, 80), targets=(3,), reveal_after=2)],
        seed=11, horizon=80,
    )
    return run(cfg)
