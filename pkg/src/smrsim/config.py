"""Run configuration: timing model, fault schedule, adversary script.

A configuration fully determines one simulation: identical configs give
byte-identical traces. All durations are integer ticks (1 tick = 1 ns
equivalent); there are no floats anywhere in the timing model.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

CONFIG_FORMAT_VERSION = 1

# 10 ms worth of ticks; the post-GST delivery bound default.
DEFAULT_DELTA = 10_000_000

ELECTOR_STRATEGIES = ("carousel", "round_robin")
PICK_RULES = ("round_robin_candidates", "lowest_id", "seeded_hash")
ADVERSARY_KINDS = ("withhold_proposal", "selective_proposal", "hide_cert", "delay_link")


class ConfigError(ValueError):
    """The configuration is malformed or violates a model constraint."""


class ScenarioEnvelopeError(ValueError):
    """An adversary script asks for behavior outside the allowed envelope."""


@dataclass(frozen=True)
class TimingConstants:
    """Message steps per round, delay bound, round duration, round spacing.

    delta_l must exceed c * delta so a full message exchange fits in one
    round after GST; delta_p must equal delta_l so an invocation always
    completes before the next round notification arrives.
    """

    c: int = 3
    delta: int = DEFAULT_DELTA
    delta_l: int = 4 * DEFAULT_DELTA
    delta_p: int = 4 * DEFAULT_DELTA

    def validate(self) -> None:
        if self.c < 1:
            raise ConfigError("timing.c must be >= 1")
        if self.delta <= 0:
            raise ConfigError("timing.delta must be positive")
        if self.delta_l <= self.c * self.delta:
            raise ConfigError("timing.delta_l must exceed c * delta")
        if self.delta_p != self.delta_l:
            raise ConfigError("timing.delta_p must equal delta_l")

    def to_json(self) -> dict:
        return {"c": self.c, "delta": self.delta, "delta_l": self.delta_l, "delta_p": self.delta_p}

    @staticmethod
    def from_json(obj: dict) -> "TimingConstants":
        delta = obj.get("delta", DEFAULT_DELTA)
        delta_l = obj.get("delta_l", 4 * delta)
        return TimingConstants(
            c=obj.get("c", 3),
            delta=delta,
            delta_l=delta_l,
            delta_p=obj.get("delta_p", delta_l),
        )


@dataclass(frozen=True)
class FaultSchedule:
    """Crash plan and Byzantine set for one run.

    A crash entry (party, round) means the party completes round `round`
    and never participates in any later round. Byzantine parties follow
    the protocol except where the adversary script directs otherwise.
    """

    crashes: tuple[tuple[int, int], ...] = ()
    byzantine: frozenset[int] = frozenset()

    def crash_round(self, party: int) -> int | None:
        for p, r in self.crashes:
            if p == party:
                return r
        return None

    def to_json(self) -> dict:
        return {
            "byzantine": sorted(self.byzantine),
            "crashes": [[p, r] for p, r in self.crashes],
        }

    @staticmethod
    def from_json(obj: dict) -> "FaultSchedule":
        return FaultSchedule(
            crashes=tuple((int(p), int(r)) for p, r in obj.get("crashes", [])),
            byzantine=frozenset(int(p) for p in obj.get("byzantine", [])),
        )


@dataclass(frozen=True)
class AdversaryAction:
    """One scripted adversary move, active over an inclusive round range.

    An action only takes effect in a round where the scripted behavior is
    actually available to the adversary: proposal-side actions apply when
    a Byzantine party considers itself the round's leader, delay_link
    applies to messages sent in that round on the given link.
    """

    kind: str
    round_from: int
    round_to: int
    targets: tuple[int, ...] | None = None
    reveal_after: int | None = None
    sender: int | None = None
    receiver: int | None = None
    delay: int | None = None

    def active_in(self, r: int) -> bool:
        return self.round_from <= r <= self.round_to

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.round_from == self.round_to:
            out["round"] = self.round_from
        else:
            out["rounds"] = [self.round_from, self.round_to]
        if self.targets is not None:
            out["targets"] = list(self.targets)
        if self.reveal_after is not None:
            out["reveal_after"] = self.reveal_after
        if self.sender is not None:
            out["sender"] = self.sender
        if self.receiver is not None:
            out["receiver"] = self.receiver
        if self.delay is not None:
            out["delay"] = self.delay
        return out

    @staticmethod
    def from_json(obj: dict) -> "AdversaryAction":
        if "round" in obj:
            round_from = round_to = int(obj["round"])
        elif "rounds" in obj:
            round_from, round_to = (int(x) for x in obj["rounds"])
        else:
            raise ConfigError("adversary action needs 'round' or 'rounds'")
        targets = obj.get("targets")
        return AdversaryAction(
            kind=obj.get("kind", ""),
            round_from=round_from,
            round_to=round_to,
            targets=tuple(int(t) for t in targets) if targets is not None else None,
            reveal_after=obj.get("reveal_after"),
            sender=obj.get("sender"),
            receiver=obj.get("receiver"),
            delay=obj.get("delay"),
        )


@dataclass(frozen=True)
class ExecutionConfig:
    """Complete deterministic description of one run."""

    n: int
    f: int
    seed: int
    horizon_rounds: int
    gst: int = 0
    timing: TimingConstants = field(default_factory=TimingConstants)
    elector: str = "carousel"
    pick_rule: str = "round_robin_candidates"
    faults: FaultSchedule = field(default_factory=FaultSchedule)
    adversary_script: tuple[AdversaryAction, ...] = ()
    pre_gst_max_skew: int = 5 * DEFAULT_DELTA
    block_payload_txns: int = 1000

    @property
    def quorum(self) -> int:
        return 2 * self.f + 1

    @property
    def is_crash_only(self) -> bool:
        return not self.faults.byzantine

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError("n must be positive")
        if self.f < 0:
            raise ConfigError("f must be non-negative")
        if 3 * self.f >= self.n:
            raise ConfigError(f"fault budget violated: need f < n/3, got f={self.f}, n={self.n}")
        if self.horizon_rounds < 1:
            raise ConfigError("horizon_rounds must be >= 1")
        if self.gst < 0:
            raise ConfigError("gst must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.pre_gst_max_skew < 0:
            raise ConfigError("pre_gst_max_skew must be >= 0")
        if self.block_payload_txns < 0:
            raise ConfigError("block_payload_txns must be >= 0")
        if self.elector not in ELECTOR_STRATEGIES:
            raise ConfigError(f"unknown elector strategy {self.elector!r}")
        if self.pick_rule not in PICK_RULES:
            raise ConfigError(f"unknown pick_rule {self.pick_rule!r}")
        self.timing.validate()
        self._validate_faults()
        self._validate_script()

    def _validate_faults(self) -> None:
        crash_parties = [p for p, _ in self.faults.crashes]
        if len(crash_parties) != len(set(crash_parties)):
            raise ConfigError("a party may crash at most once")
        for p, r in self.faults.crashes:
            if not 0 <= p < self.n:
                raise ConfigError(f"crash entry names unknown party {p}")
            if r < 0:
                raise ConfigError("crash round must be >= 0")
        for p in self.faults.byzantine:
            if not 0 <= p < self.n:
                raise ConfigError(f"byzantine set names unknown party {p}")
        if set(crash_parties) & self.faults.byzantine:
            raise ConfigError("a party cannot be both crashed and byzantine")
        if len(crash_parties) + len(self.faults.byzantine) > self.f:
            raise ConfigError("fault schedule exceeds the budget f")

    def _validate_script(self) -> None:
        for a in self.adversary_script:
            if a.kind not in ADVERSARY_KINDS:
                raise ScenarioEnvelopeError(f"unknown adversary action kind {a.kind!r}")
            if a.round_from < 1 or a.round_to < a.round_from:
                raise ScenarioEnvelopeError(f"bad round range in {a.kind} action")
            if a.targets is not None:
                for t in a.targets:
                    if not 0 <= t < self.n:
                        raise ScenarioEnvelopeError(f"{a.kind} action targets unknown party {t}")
            if a.kind in ("withhold_proposal", "selective_proposal", "hide_cert"):
                if not self.faults.byzantine:
                    raise ScenarioEnvelopeError(f"{a.kind} action requires a byzantine party")
            if a.kind == "selective_proposal" and a.targets is None:
                raise ScenarioEnvelopeError("selective_proposal action needs targets")
            if a.kind == "hide_cert":
                # A certified block formed in round r may only surface via
                # invocations of round > r, so reveals must be strictly later.
                if a.reveal_after is not None and a.reveal_after < 1:
                    raise ScenarioEnvelopeError("hide_cert reveal_after must be >= 1")
            if a.kind == "delay_link":
                if a.sender is None or a.receiver is None or a.delay is None:
                    raise ScenarioEnvelopeError("delay_link action needs sender, receiver, delay")
                if not (0 <= a.sender < self.n and 0 <= a.receiver < self.n):
                    raise ScenarioEnvelopeError("delay_link action names unknown party")
                if a.delay < 1:
                    raise ScenarioEnvelopeError("delay_link delay must be >= 1")

    def with_overrides(self, **kwargs) -> "ExecutionConfig":
        return replace(self, **kwargs)

    def to_json(self) -> dict:
        return {
            "format_version": CONFIG_FORMAT_VERSION,
            "n": self.n,
            "f": self.f,
            "seed": self.seed,
            "horizon_rounds": self.horizon_rounds,
            "gst": self.gst,
            "timing": self.timing.to_json(),
            "elector": self.elector,
            "pick_rule": self.pick_rule,
            "faults": self.faults.to_json(),
            "adversary_script": [a.to_json() for a in self.adversary_script],
            "pre_gst_max_skew": self.pre_gst_max_skew,
            "block_payload_txns": self.block_payload_txns,
        }

    @staticmethod
    def from_json(obj: dict) -> "ExecutionConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        version = obj.get("format_version", CONFIG_FORMAT_VERSION)
        if version != CONFIG_FORMAT_VERSION:
            raise ConfigError(f"unsupported config format_version {version}")
        missing = [k for k in ("n", "f", "seed", "horizon_rounds") if k not in obj]
        if missing:
            raise ConfigError(f"config missing required fields: {', '.join(missing)}")
        known = {
            "format_version", "n", "f", "seed", "horizon_rounds", "gst", "timing",
            "elector", "pick_rule", "faults", "adversary_script", "pre_gst_max_skew",
            "block_payload_txns",
        }
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"config has unknown fields: {', '.join(sorted(unknown))}")
        try:
            timing = TimingConstants.from_json(obj.get("timing", {}))
            cfg = ExecutionConfig(
                n=int(obj["n"]),
                f=int(obj["f"]),
                seed=int(obj["seed"]),
                horizon_rounds=int(obj["horizon_rounds"]),
                gst=int(obj.get("gst", 0)),
                timing=timing,
                elector=obj.get("elector", "carousel"),
                pick_rule=obj.get("pick_rule", "round_robin_candidates"),
                faults=FaultSchedule.from_json(obj.get("faults", {})),
                adversary_script=tuple(
                    AdversaryAction.from_json(a) for a in obj.get("adversary_script", [])
                ),
                pre_gst_max_skew=int(obj.get("pre_gst_max_skew", 5 * timing.delta)),
                block_payload_txns=int(obj.get("block_payload_txns", 1000)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, (ConfigError, ScenarioEnvelopeError)):
                raise
            raise ConfigError(f"malformed config value: {exc}") from exc
        cfg.validate()
        return cfg
