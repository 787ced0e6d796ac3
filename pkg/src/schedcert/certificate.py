"""Stability certificate for periodic scheduling under windowed jamming.

The certificate rests on a contraction pair (delta, rho): delta closed-loop
steps shrink every plant's state by a factor rho < 1. From the network
capacity and the attack budget it derives

  r      number of blocks needed to cover all plants,
  alpha  worst-case instants a scheduled plant needs to accumulate delta
         un-jammed steps,
  zeta   exponent bounding the open-loop contribution over one policy cycle,
  eta    count of cross terms the commutator bound has to absorb,

and per plant checks two scalar conditions: rho * exp(lam * delta) < 1 and
the combined inequality whose second term is proportional to the commutator
norm tolerance. Failure means inconclusive, not unstable; reports carry the
margin 1 - lhs so plants can be ranked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np

from .linalg import mat_power_norm, spectral_norm
from .plants import AttackParams, NcsInstance, closed_loop, commutator

__all__ = [
    "ContractionPair",
    "DerivedQuantities",
    "PlantCondition",
    "CertificateReport",
    "SweepPoint",
    "cover_count",
    "clean_step_bound",
    "derived_for_cover",
    "derived_quantities",
    "find_contraction",
    "default_lambdas",
    "check_theorem",
    "max_epsilon",
    "epsilon_sweep",
    "write_sweep_csv",
]


@dataclass(frozen=True)
class ContractionPair:
    """delta closed-loop steps contract every plant by rho < 1."""

    delta: int
    rho: float

    def __post_init__(self):
        if not isinstance(self.delta, (int, np.integer)) or self.delta < 1:
            raise ValueError("delta must be a positive integer")
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in the open interval (0, 1)")


@dataclass(frozen=True)
class DerivedQuantities:
    r: int
    alpha: int
    zeta: int
    eta: int


def cover_count(n_plants: int, capacity: int) -> int:
    """Blocks needed to cover all plants: floor(N/M), plus one on remainder."""
    if not 0 < capacity < n_plants:
        raise ValueError(
            f"need 0 < capacity < n_plants, got capacity {capacity} for {n_plants} plants"
        )
    full, rem = divmod(n_plants, capacity)
    return full if rem == 0 else full + 1


def clean_step_bound(delta: int, attack: AttackParams) -> int:
    """Most instants a scheduled plant needs to collect delta un-jammed steps.

    Equals (floor(delta/m) + 1) * (k - m) + delta: the budget lets the
    jammer spend at most k - m instants per window, so each batch of m
    clean steps costs at most k instants and the leftover batch at most
    (k - m) + (delta mod m).
    """
    if delta < 1:
        raise ValueError("delta must be >= 1")
    return (delta // attack.m + 1) * (attack.k - attack.m) + delta


def derived_for_cover(r: int, attack: AttackParams, delta: int) -> DerivedQuantities:
    """Derived constants for a given cover size r (sweeps vary r directly)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if delta < attack.m:
        raise ValueError(f"delta must be >= m, got delta {delta} with m {attack.m}")
    m, k = attack.m, attack.k
    fl = delta // m
    alpha = lemma_bound(delta, attack)
    zeta = r * alpha - delta - 1
    eta = m * (fl * (fl + 1) // 2 * (k - m) + (r - 1) * alpha) + (delta - fl * m) * (
        (fl + 1) * (k - m) + (r - 1) * alpha
    )
    if zeta < 0:
        raise ValueError(f"zeta = {zeta} < 0; the cover cycle is shorter than delta")
    return DerivedQuantities(r=r, alpha=alpha, zeta=zeta, eta=eta)


def derived_quantities(
    n_plants: int, capacity: int, attack: AttackParams, delta: int
) -> DerivedQuantities:
    return derived_for_cover(cover_count(n_plants, capacity), attack, delta)


def find_contraction(
    ncs: NcsInstance, rho_target: float | None = None, delta_cap: int = 200
) -> ContractionPair:
    """Smallest delta >= m whose closed-loop powers all contract.

    With a target, returns the smallest delta at which every plant's
    closed-loop power norm is <= rho_target, paired with rho_target
    itself. Without one, returns the smallest delta at which the worst
    power norm drops below 1, paired with that worst norm.
    """
    if rho_target is not None and not 0.0 < rho_target < 1.0:
        raise ValueError("rho_target must lie in (0, 1)")
    start = max(ncs.attack.m, 1)
    if delta_cap < start:
        raise ValueError(f"delta_cap {delta_cap} is below the minimum delta {start}")
    mats = [closed_loop(p) for p in ncs.plants]
    powers = [np.linalg.matrix_power(m, start - 1) for m in mats]
    for delta in range(start, delta_cap + 1):
        powers = [acc @ m for acc, m in zip(powers, mats)]
        worst = max(spectral_norm(acc) for acc in powers)
        if rho_target is not None:
            if worst <= rho_target:
                return ContractionPair(delta=delta, rho=rho_target)
        elif worst < 1.0:
            return ContractionPair(delta=delta, rho=max(worst, np.finfo(float).tiny))
    target = rho_target if rho_target is not None else 1.0
    raise ValueError(
        f"no delta <= {delta_cap} achieves a contraction of {target}; "
        "raise the cap or relax the target"
    )


def default_lambdas(
    contraction: ContractionPair, n_plants: int, fraction: float = 1e-4
) -> list[float]:
    """Default decay rates: a small fraction of the largest feasible rate.

    The first condition holds for any lam below ln(1/rho)/delta; picking a
    tiny fraction of that leaves almost all slack to the combined
    condition.
    """
    lam_max = math.log(1.0 / contraction.rho) / contraction.delta
    return [fraction * lam_max] * n_plants


@dataclass(frozen=True)
class PlantCondition:
    plant_id: int
    lam: float
    epsilon: float
    commutator_norm: float
    cond1_value: float
    cond3_lhs: float
    passed: bool
    margin: float


@dataclass(frozen=True)
class CertificateReport:
    contraction: ContractionPair
    derived: DerivedQuantities
    per_plant: tuple[PlantCondition, ...]

    @property
    def all_pass(self) -> bool:
        return all(p.passed for p in self.per_plant)

    def to_dict(self) -> dict:
        return {
            "contraction": {"delta": self.contraction.delta, "rho": self.contraction.rho},
            "derived": {
                "r": self.derived.r,
                "alpha": self.derived.alpha,
                "zeta": self.derived.zeta,
                "eta": self.derived.eta,
            },
            "per_plant": [
                {
                    "id": p.plant_id,
                    "lambda": p.lam,
                    "epsilon": p.epsilon,
                    "commutator_norm": p.commutator_norm,
                    "cond1_value": p.cond1_value,
                    "cond3_lhs": p.cond3_lhs,
                    "pass": p.passed,
                    "margin": p.margin,
                }
                for p in self.per_plant
            ],
            "all_pass": self.all_pass,
        }


def check_theorem(
    ncs: NcsInstance,
    contraction: ContractionPair,
    lambdas,
    epsilons,
) -> CertificateReport:
    """Evaluate both certificate conditions for every plant.

    Per plant: cond1_value = rho * exp(lam * delta) must stay below 1, the
    commutator norm must not exceed the granted tolerance epsilon, and

      cond3_lhs = cond1_value
                + eta * |A_s|^(delta-1) * |A_u|^zeta * epsilon * exp(lam*r*alpha)

    must not exceed 1. The report is advisory: a failed plant means the
    certificate is inconclusive there, not that the plant is unstable.
    """
    n = ncs.n_plants
    lambdas = [float(v) for v in lambdas]
    epsilons = [float(v) for v in epsilons]
    if len(lambdas) != n or len(epsilons) != n:
        raise ValueError(
            f"need one lambda and one epsilon per plant "
            f"(got {len(lambdas)} and {len(epsilons)} for {n} plants)"
        )
    if any(v <= 0 for v in lambdas):
        raise ValueError("decay rates must be positive")
    if any(v < 0 for v in epsilons):
        raise ValueError("commutator tolerances must be nonnegative")
    if contraction.delta < ncs.attack.m:
        raise ValueError(
            f"delta {contraction.delta} is below the attack parameter m {ncs.attack.m}"
        )
    for p in ncs.plants:
        norm_pow = mat_power_norm(closed_loop(p), contraction.delta)
        if norm_pow > contraction.rho + 1e-12:
            raise ValueError(
                f"plant {p.plant_id}: closed-loop power norm {norm_pow:.6f} exceeds "
                f"rho {contraction.rho}; the contraction pair does not hold"
            )
    derived = derived_quantities(n, ncs.capacity, ncs.attack, contraction.delta)
    rows = []
    for p, lam, eps in zip(ncs.plants, lambdas, epsilons):
        norm_s = spectral_norm(closed_loop(p))
        norm_u = spectral_norm(p.A)
        comm = spectral_norm(commutator(p))
        cond1 = contraction.rho * math.exp(lam * contraction.delta)
        cond3 = cond1 + derived.eta * norm_s ** (contraction.delta - 1) * (
            norm_u**derived.zeta
        ) * eps * math.exp(lam * derived.r * derived.alpha)
        passed = cond1 < 1.0 and comm <= eps and cond3 <= 1.0
        rows.append(
            PlantCondition(
                plant_id=p.plant_id,
                lam=lam,
                epsilon=eps,
                commutator_norm=comm,
                cond1_value=cond1,
                cond3_lhs=cond3,
                passed=passed,
                margin=1.0 - cond3,
            )
        )
    return CertificateReport(
        contraction=contraction, derived=derived, per_plant=tuple(rows)
    )


def max_epsilon(
    norm_stable: float,
    norm_unstable: float,
    rho: float,
    lam: float,
    delta: int,
    derived: DerivedQuantities,
) -> float:
    """Largest commutator tolerance the combined condition admits.

    Solves the combined inequality for epsilon at equality:

      eps_max = (1 - rho * exp(lam * delta))
              / (eta * |A_s|^(delta-1) * |A_u|^zeta * exp(lam * r * alpha))
    """
    cond1 = rho * math.exp(lam * delta)
    if cond1 >= 1.0:
        raise ValueError(
            f"condition 1 violated: rho * exp(lam * delta) = {cond1:.6f} >= 1"
        )
    denom = (
        derived.eta
        * norm_stable ** (delta - 1)
        * norm_unstable**derived.zeta
        * math.exp(lam * derived.r * derived.alpha)
    )
    return (1.0 - cond1) / denom


@dataclass(frozen=True)
class SweepPoint:
    delta: int
    r: int
    m: int
    k: int
    eps_max: float
    feasible: bool


def epsilon_sweep(
    deltas,
    rs,
    ms,
    ks,
    norm_stable: float,
    norm_unstable: float,
    rho: float,
    lam: float,
) -> list[SweepPoint]:
    """Evaluate max_epsilon over the cartesian grid of (delta, r, m, k).

    Grid points violating m < k, delta >= m or condition 1 are kept in the
    table with eps_max 0 and feasible False rather than dropped, so the
    output stays rectangular for surface plots.
    """
    points = []
    for delta, r, m, k in product(deltas, rs, ms, ks):
        delta, r, m, k = int(delta), int(r), int(m), int(k)
        feasible = m < k and delta >= m and rho * math.exp(lam * delta) < 1.0
        eps = 0.0
        if feasible:
            derived = derived_for_cover(r, AttackParams(m=m, k=k), delta)
            eps = max_epsilon(norm_stable, norm_unstable, rho, lam, delta, derived)
        points.append(
            SweepPoint(delta=delta, r=r, m=m, k=k, eps_max=eps, feasible=feasible)
        )
    return points


def write_sweep_csv(points, path) -> None:
    lines = ["delta,r,m,k,eps_max,feasible"]
    for p in points:
        lines.append(
            f"{p.delta},{p.r},{p.m},{p.k},{p.eps_max!r},{1 if p.feasible else 0}"
        )
    Path(path).write_text("\n".join(lines) + "\n")
