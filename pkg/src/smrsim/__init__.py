"""Leader-based chained SMR: deterministic simulator and trace verifiers.

The package simulates a per-round replication protocol (local leader
election, a three-step certify-and-commit exchange, commit on chain
extension) under an eventually-synchronous network with crash and
scripted-Byzantine faults, and checks Agreement, Liveness,
Leader-utilization, Chain-quality, and all round/pacemaker contracts on
every produced trace.
"""

from .chain import (
    Block,
    BlockStore,
    Certificate,
    block_id,
    certified,
    extends,
    implied_chain,
    make_genesis,
    UnknownBlockError,
)
from .config import (
    AdversaryAction,
    ConfigError,
    ExecutionConfig,
    FaultSchedule,
    ScenarioEnvelopeError,
    TimingConstants,
)
from .election import LeaderElector, carousel_leader, round_robin_leader
from .engine import run
from .events import Trace, TraceFormatError, read_trace
from .verify import (
    VerificationReport,
    check_agreement,
    check_chain_quality,
    check_leader_utilization,
    check_lbr_properties,
    check_liveness,
    check_pacemaker,
    compare,
    lbr_synchronized_set,
    verify_trace,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryAction",
    "Block",
    "BlockStore",
    "Certificate",
    "ConfigError",
    "ExecutionConfig",
    "FaultSchedule",
    "LeaderElector",
    "ScenarioEnvelopeError",
    "TimingConstants",
    "Trace",
    "TraceFormatError",
    "UnknownBlockError",
    "VerificationReport",
    "block_id",
    "carousel_leader",
    "certified",
    "check_agreement",
    "check_chain_quality",
    "check_leader_utilization",
    "check_lbr_properties",
    "check_liveness",
    "check_pacemaker",
    "compare",
    "extends",
    "implied_chain",
    "lbr_synchronized_set",
    "make_genesis",
    "read_trace",
    "round_robin_leader",
    "run",
    "verify_trace",
]
