"""Periodic network-allocation policies.

A policy is a short list of slot blocks, each a set of `capacity` distinct
plant ids, held for a fixed number of consecutive instants and repeated
forever. Policies are stored intensionally (blocks plus hold length), never
as unrolled sequences, so queries at any instant are O(1).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "SchedulingPolicy",
    "build_cover",
    "build_policy",
    "policy_at",
    "coverage_gap",
    "policy_to_dict",
    "policy_from_dict",
    "write_schedule_csv",
]


@dataclass(frozen=True)
class SchedulingPolicy:
    """Blocks of plant ids, each held `hold` instants, cycled eternally."""

    blocks: tuple[tuple[int, ...], ...]
    hold: int

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("policy needs at least one block")
        if self.hold < 1:
            raise ValueError("hold must be >= 1")
        sizes = {len(b) for b in blocks}
        if len(sizes) != 1:
            raise ValueError(f"blocks must all have the same size, got sizes {sorted(sizes)}")
        for b in blocks:
            if len(set(b)) != len(b):
                raise ValueError(f"block {b} repeats a plant id")

    @property
    def r(self) -> int:
        return len(self.blocks)

    @property
    def period(self) -> int:
        return len(self.blocks) * self.hold

    @property
    def capacity(self) -> int:
        return len(self.blocks[0])

    @property
    def members(self) -> frozenset[int]:
        return frozenset(pid for b in self.blocks for pid in b)

    def at(self, t: int) -> tuple[int, ...]:
        """Scheduled block at instant t."""
        if t < 0:
            raise ValueError("t must be >= 0")
        return self.blocks[(t // self.hold) % len(self.blocks)]


def build_cover(n_plants: int, capacity: int, priority=None) -> list[tuple[int, ...]]:
    """Cover {1..n_plants} with blocks of `capacity` distinct ids.

    The first floor(n/capacity) blocks partition as many ids as fit exactly;
    when ids are left over, one final block takes them plus filler ids drawn
    from the already-covered ones. Ids are consumed in `priority` order
    (completed with the remaining ids ascending), so callers can steer both
    the grouping and which plants earn the extra filler slot. With no
    priority the pick order is simply ascending, which makes the output
    deterministic.
    """
    if capacity < 1 or capacity >= n_plants:
        raise ValueError(
            f"need 0 < capacity < n_plants, got capacity {capacity} for {n_plants} plants"
        )
    order = []
    for pid in priority or ():
        pid = int(pid)
        if not 1 <= pid <= n_plants:
            raise ValueError(f"priority id {pid} outside 1..{n_plants}")
        if pid not in order:
            order.append(pid)
    order += [pid for pid in range(1, n_plants + 1) if pid not in order]

    blocks = []
    uncovered = list(order)
    while len(uncovered) >= capacity:
        blocks.append(tuple(sorted(uncovered[:capacity])))
        uncovered = uncovered[capacity:]
    if uncovered:
        covered = [pid for pid in order if pid not in uncovered]
        filler = covered[: capacity - len(uncovered)]
        blocks.append(tuple(sorted(uncovered + filler)))
    return blocks


def build_policy(cover, alpha: int) -> SchedulingPolicy:
    """Hold each cover block for `alpha` consecutive instants, cyclically."""
    return SchedulingPolicy(blocks=tuple(tuple(b) for b in cover), hold=int(alpha))


def policy_at(policy: SchedulingPolicy, t: int) -> tuple[int, ...]:
    return policy.at(t)


def coverage_gap(policy: SchedulingPolicy, plant_id: int) -> int:
    """Longest run of consecutive instants the plant goes unscheduled.

    Computed over the cyclic schedule, so runs straddling the period
    boundary count. Used by the dwell-time diagnostics.
    """
    if plant_id not in policy.members:
        raise ValueError(f"plant id {plant_id} never appears in the policy")
    mask = [plant_id in policy.at(t) for t in range(policy.period)]
    if all(mask):
        return 0
    best = cur = 0
    for scheduled in mask + mask:
        cur = 0 if scheduled else cur + 1
        best = max(best, cur)
    return min(best, policy.period)


def policy_to_dict(policy: SchedulingPolicy) -> dict:
    return {
        "blocks": [list(b) for b in policy.blocks],
        "hold": int(policy.hold),
        "period": int(policy.period),
    }


def policy_from_dict(data: dict) -> SchedulingPolicy:
    policy = SchedulingPolicy(
        blocks=tuple(tuple(int(i) for i in b) for b in data["blocks"]),
        hold=int(data["hold"]),
    )
    if "period" in data and int(data["period"]) != policy.period:
        raise ValueError(
            f"stored period {data['period']} disagrees with blocks x hold = {policy.period}"
        )
    return policy


def write_schedule_csv(policy: SchedulingPolicy, horizon: int, path) -> None:
    """Dump the first `horizon` instants as rows `t,scheduled_ids`."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "scheduled_ids"])
        for t in range(horizon):
            writer.writerow([t, " ".join(str(i) for i in policy.at(t))])
