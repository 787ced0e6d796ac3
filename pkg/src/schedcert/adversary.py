"""Jamming attack signals under a sliding-window firmness budget.

An attack signal assigns each instant the set of plant ids whose control
input is zeroed at that instant. An instant with at least one deactivation
is an attack instant. Admissibility requires every window of k consecutive
instants to keep at least m instants attack-free, i.e. to carry at most
k - m attack instants; windows clipped at the horizon edges are counted
the same way, so an admissible finite signal always extends to an
admissible infinite one. Deactivations may only hit plants that are
scheduled at that instant.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterator

import numpy as np

from .plants import AttackParams, NcsInstance, closed_loop
from .scheduler import SchedulingPolicy

__all__ = [
    "AttackSignal",
    "AdmissibilityVerdict",
    "EnumerationBudgetError",
    "is_admissible",
    "is_periodically_admissible",
    "sample_attack",
    "count_attacks",
    "enumerate_attacks",
    "enumerate_periodic_attacks",
    "greedy_adversary",
    "write_attack_csv",
    "read_attack_csv",
]

DEFAULT_ENUMERATION_BUDGET = 10_000_000


@dataclass(frozen=True)
class AttackSignal:
    """Per-instant deactivation sets over a finite horizon."""

    deactivated: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        cleaned = tuple(tuple(sorted(set(int(i) for i in hit))) for hit in self.deactivated)
        if not cleaned:
            raise ValueError("attack signal needs a horizon of at least 1")
        object.__setattr__(self, "deactivated", cleaned)

    @property
    def horizon(self) -> int:
        return len(self.deactivated)

    def at(self, t: int) -> tuple[int, ...]:
        return self.deactivated[t]

    def attack_instants(self) -> list[int]:
        return [t for t, hit in enumerate(self.deactivated) if hit]

    def truncated(self, horizon: int) -> "AttackSignal":
        if horizon < 1 or horizon > self.horizon:
            raise ValueError(f"cannot truncate horizon {self.horizon} to {horizon}")
        return AttackSignal(self.deactivated[:horizon])


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    t: int | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.admissible


def _nonempty_subsets(members) -> list[tuple[int, ...]]:
    """All nonempty subsets of a block, as sorted tuples in ascending tuple order."""
    members = sorted(members)
    subsets = []
    for size in range(1, len(members) + 1):
        subsets.extend(combinations(members, size))
    subsets.sort()
    return subsets


def is_admissible(
    signal: AttackSignal, policy: SchedulingPolicy, attack: AttackParams
) -> AdmissibilityVerdict:
    """Check a signal against the policy and the window budget.

    Returns the earliest violating instant: either a deactivation of an
    unscheduled plant, or the first window whose attack-instant count
    exceeds k - m.
    """
    budget = attack.max_attack_instants
    k = attack.k
    flags = []
    window_count = 0
    for t in range(signal.horizon):
        hit = signal.at(t)
        scheduled = policy.at(t)
        stray = [i for i in hit if i not in scheduled]
        if stray:
            return AdmissibilityVerdict(
                False, t, f"deactivated plant {stray[0]} is not scheduled at t={t}"
            )
        flag = 1 if hit else 0
        flags.append(flag)
        window_count += flag
        if t >= k:
            window_count -= flags[t - k]
        if window_count > budget:
            start = max(0, t - k + 1)
            return AdmissibilityVerdict(
                False,
                t,
                f"window [{start}, {t}] has {window_count} attack instants "
                f"(budget {budget} per {k})",
            )
    return AdmissibilityVerdict(True)


def is_periodically_admissible(
    word: AttackSignal, policy: SchedulingPolicy, attack: AttackParams
) -> AdmissibilityVerdict:
    """Check that repeating `word` forever stays admissible, wrap included.

    The word length must equal the policy period so the schedule and the
    attack repeat in lockstep.
    """
    period = policy.period
    if word.horizon != period:
        return AdmissibilityVerdict(
            False, None, f"word length {word.horizon} != policy period {period}"
        )
    # Enough copies that every window of the infinite extension appears.
    copies = 2 + (attack.k - 1) // period
    extended = AttackSignal(word.deactivated * copies)
    return is_admissible(extended, policy, attack)


def sample_attack(
    policy: SchedulingPolicy, attack: AttackParams, horizon: int, seed: int
) -> AttackSignal:
    """Draw an admissible signal with a seeded generator.

    At each instant whose trailing window still has attack budget, a fair
    coin decides whether to attack; an attack deactivates a uniformly
    chosen nonempty subset of the scheduled block. Deterministic given the
    seed.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    rng = np.random.default_rng(seed)
    budget = attack.max_attack_instants
    k = attack.k
    flags: list[int] = []
    hits: list[tuple[int, ...]] = []
    for t in range(horizon):
        trailing = sum(flags[max(0, t - (k - 1)): t])
        hit: tuple[int, ...] = ()
        if trailing + 1 <= budget and rng.integers(0, 2) == 1:
            members = sorted(policy.at(t))
            mask = int(rng.integers(1, 2 ** len(members)))
            hit = tuple(m for j, m in enumerate(members) if mask >> j & 1)
        hits.append(hit)
        flags.append(1 if hit else 0)
    return AttackSignal(tuple(hits))


def count_attacks(policy: SchedulingPolicy, attack: AttackParams, horizon: int) -> int:
    """Exact number of admissible signals, by dynamic programming.

    The state is the attack-instant pattern of the trailing k - 1 instants;
    a fresh attack is allowed when that pattern holds at most
    (k - m) - 1 attacks, and contributes one branch per nonempty subset of
    the scheduled block.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    budget = attack.max_attack_instants
    k = attack.k
    states: dict[tuple[int, ...], int] = {(): 1}
    total_choices = [2 ** len(policy.at(t)) - 1 for t in range(horizon)]
    for t in range(horizon):
        nxt: dict[tuple[int, ...], int] = {}
        for state, ways in states.items():
            clean = (state + (0,))[-(k - 1):] if k > 1 else ()
            nxt[clean] = nxt.get(clean, 0) + ways
            if sum(state) + 1 <= budget:
                attacked = (state + (1,))[-(k - 1):] if k > 1 else ()
                nxt[attacked] = nxt.get(attacked, 0) + ways * total_choices[t]
        states = nxt
    return sum(states.values())


class EnumerationBudgetError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed its budget."""

    def __init__(self, count: int, budget: int):
        super().__init__(f"enumeration would produce {count} signals, budget is {budget}")
        self.count = count
        self.budget = budget


def enumerate_attacks(
    policy: SchedulingPolicy,
    attack: AttackParams,
    horizon: int,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> Iterator[AttackSignal]:
    """Yield every admissible signal exactly once, in lexicographic order.

    Per instant the no-attack action sorts before every deactivation
    subset, and subsets compare as sorted id tuples. Refuses with the
    exact count when it exceeds `budget`; use `count_attacks` to probe
    beforehand.
    """
    count = count_attacks(policy, attack, horizon)
    if count > budget:
        raise EnumerationBudgetError(count, budget)
    window_budget = attack.max_attack_instants
    k = attack.k
    actions_at = [
        [()] + _nonempty_subsets(policy.at(t)) for t in range(horizon)
    ]

    def rec(t: int, flags: tuple[int, ...], prefix: tuple[tuple[int, ...], ...]):
        if t == horizon:
            yield AttackSignal(prefix)
            return
        trailing = sum(flags)
        for action in actions_at[t]:
            if action and trailing + 1 > window_budget:
                continue
            new_flags = (flags + (1 if action else 0,))[-(k - 1):] if k > 1 else ()
            yield from rec(t + 1, new_flags, prefix + (action,))

    yield from rec(0, (), ())


def enumerate_periodic_attacks(
    policy: SchedulingPolicy,
    attack: AttackParams,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> Iterator[AttackSignal]:
    """Yield every attack word of one policy period whose eternal repetition
    is admissible, wrap-around windows included."""
    period = policy.period
    count = count_attacks(policy, attack, period)
    if count > budget:
        raise EnumerationBudgetError(count, budget)
    for word in enumerate_attacks(policy, attack, period, budget=budget):
        if is_periodically_admissible(word, policy, attack):
            yield word


def greedy_adversary(
    ncs: NcsInstance,
    policy: SchedulingPolicy,
    horizon: int,
    initial_states: dict[int, np.ndarray],
) -> AttackSignal:
    """One-step-lookahead jammer.

    At each instant it evaluates every window-admissible action (no attack,
    or any nonempty subset of the scheduled block) against the current
    simulated states and picks the one maximising the summed squared state
    norms after one step. Ties resolve to the lexicographically smallest
    action, so at the origin it never attacks. A heuristic stress signal,
    not an exact worst case.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    modes = {
        p.plant_id: (closed_loop(p), np.asarray(p.A, dtype=float)) for p in ncs.plants
    }
    states = {}
    for p in ncs.plants:
        x = np.asarray(initial_states[p.plant_id], dtype=float)
        if x.shape != (p.dim,):
            raise ValueError(
                f"initial state for plant {p.plant_id} has shape {x.shape}, "
                f"expected ({p.dim},)"
            )
        states[p.plant_id] = x
    window_budget = ncs.attack.max_attack_instants
    k = ncs.attack.k
    flags: list[int] = []
    hits: list[tuple[int, ...]] = []
    for t in range(horizon):
        scheduled = policy.at(t)
        actions: list[tuple[int, ...]] = [()]
        if sum(flags[max(0, t - (k - 1)):]) + 1 <= window_budget:
            actions += _nonempty_subsets(scheduled)
        best_action = None
        best_value = -np.inf
        best_states = None
        for action in actions:
            nxt = {}
            value = 0.0
            for pid, (a_s, a_u) in modes.items():
                stable = pid in scheduled and pid not in action
                x = (a_s if stable else a_u) @ states[pid]
                nxt[pid] = x
                value += float(x @ x)
            if value > best_value:
                best_value = value
                best_action = action
                best_states = nxt
        states = best_states
        hits.append(best_action)
        flags.append(1 if best_action else 0)
    return AttackSignal(tuple(hits))


def write_attack_csv(signal: AttackSignal, path) -> None:
    """Rows `t,deactivated_ids`, ids space-separated, empty field = no attack."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "deactivated_ids"])
        for t in range(signal.horizon):
            writer.writerow([t, " ".join(str(i) for i in signal.at(t))])


def read_attack_csv(path) -> AttackSignal:
    rows = {}
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["t", "deactivated_ids"]:
            raise ValueError(f"{path}: expected header 't,deactivated_ids'")
        for row in reader:
            ids = tuple(int(tok) for tok in row["deactivated_ids"].split())
            rows[int(row["t"])] = ids
    if sorted(rows) != list(range(len(rows))):
        raise ValueError(f"{path}: instants must be 0..{len(rows) - 1} with no gaps")
    return AttackSignal(tuple(rows[t] for t in range(len(rows))))
