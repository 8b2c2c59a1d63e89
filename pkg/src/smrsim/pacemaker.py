"""Round synchronization: new_round notification schedules.

After GST every round's notifications land inside a delta-wide window and
round r+1 starts no earlier than delta_p after the last round-r
notification, so all invocations of a round overlap long enough for a
full message exchange. Before GST the skew is only bounded by the
configured pre-GST maximum, which scenarios may set far above delta.
"""

from __future__ import annotations

import random

from .config import ExecutionConfig


def build_schedule(config: ExecutionConfig, rng: random.Random) -> list[dict[int, int]]:
    """Notification times for rounds 1..horizon, per party.

    schedule[r][p] is the time party p would be notified of round r; the
    engine only delivers notifications to parties that have not crashed.
    Each round's spacing is anchored on the latest notification among the
    parties still alive in the previous round.

    Rounds never straddle GST: a round whose base time is pre-GST keeps
    every notification strictly before GST (clamping wide jitter draws),
    so each round is either fully asynchronous or fully synchronized and
    the post-GST skew bound holds for exactly the rounds it should.
    """
    timing = config.timing
    crash_round = {p: config.faults.crash_round(p) for p in range(config.n)}
    schedule: list[dict[int, int]] = [{}]  # index 0 unused; rounds are 1-based
    base = 0
    for r in range(1, config.horizon_rounds + 1):
        if base >= config.gst:
            times = {p: base + rng.randint(0, timing.delta) for p in range(config.n)}
        else:
            cap = config.gst - 1
            times = {
                p: min(base + rng.randint(0, config.pre_gst_max_skew), cap)
                for p in range(config.n)
            }
        schedule.append(times)
        alive = [p for p in range(config.n) if crash_round[p] is None or r <= crash_round[p]]
        base = max(times[p] for p in alive) + timing.delta_p
    return schedule
