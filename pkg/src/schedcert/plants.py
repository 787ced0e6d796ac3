"""Description of the controlled fleet: plants, network capacity, attack budget.

Each plant is a discrete-time linear system x(t+1) = A x(t) + B u(t) with a
state-feedback gain K. When the plant reaches its controller over the shared
network and is not jammed it runs in the closed-loop mode A + B K; otherwise
it runs open loop on A. Certification requires the closed loop to be Schur
stable and the open loop not to be, which `validate_instance` checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import as_matrix, as_square, spectral_radius

__all__ = [
    "InstanceError",
    "PlantModel",
    "AttackParams",
    "NcsInstance",
    "closed_loop",
    "commutator",
    "validate_instance",
    "instance_to_dict",
    "instance_from_dict",
    "load_instance",
    "save_instance",
]


class InstanceError(ValueError):
    """An instance file is malformed or violates the model assumptions."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class PlantModel:
    """One plant: dynamics A (d x d), input map B (d x p), gain K (p x d).

    p is the number of control inputs. Arrays are copied and marked
    read-only, so a plant can be shared freely across workers.
    """

    plant_id: int
    A: np.ndarray
    B: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        try:
            a = as_square(self.A)
            b = as_matrix(self.B)
            k = as_matrix(self.K)
        except ValueError as exc:
            raise InstanceError(f"plant {self.plant_id}: {exc}") from exc
        d = a.shape[0]
        if b.shape[0] != d:
            raise InstanceError(
                f"plant {self.plant_id}: B has {b.shape[0]} rows, expected {d}"
            )
        if k.shape != (b.shape[1], d):
            raise InstanceError(
                f"plant {self.plant_id}: K has shape {k.shape}, "
                f"expected {(b.shape[1], d)}"
            )
        object.__setattr__(self, "A", _frozen(a))
        object.__setattr__(self, "B", _frozen(b))
        object.__setattr__(self, "K", _frozen(k))

    @property
    def dim(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class AttackParams:
    """Sliding-window jamming budget.

    In every window of k consecutive instants at least m instants must be
    free of deactivations, so at most k - m instants per window may carry
    an attack.
    """

    m: int
    k: int

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise InstanceError("attack parameter m must be a positive integer")
        if not isinstance(self.k, (int, np.integer)) or self.k <= self.m:
            raise InstanceError("attack parameter k must satisfy m < k")

    @property
    def max_attack_instants(self) -> int:
        """Largest number of attack instants any k-window may contain."""
        return self.k - self.m


@dataclass(frozen=True)
class NcsInstance:
    """N plants sharing a network with `capacity` slots per instant."""

    plants: tuple[PlantModel, ...]
    capacity: int
    attack: AttackParams

    def __post_init__(self):
        object.__setattr__(self, "plants", tuple(self.plants))
        if not self.plants:
            raise InstanceError("instance needs at least one plant")
        if not isinstance(self.capacity, (int, np.integer)):
            raise InstanceError("capacity must be an integer")

    @property
    def n_plants(self) -> int:
        return len(self.plants)

    def plant(self, plant_id: int) -> PlantModel:
        for p in self.plants:
            if p.plant_id == plant_id:
                return p
        raise KeyError(f"no plant with id {plant_id}")


def closed_loop(plant: PlantModel) -> np.ndarray:
    """Closed-loop mode matrix A + B K."""
    return plant.A + plant.B @ plant.K


def commutator(plant: PlantModel) -> np.ndarray:
    """Commutator of the closed-loop and open-loop mode matrices.

    Returns (A + B K) A - A (A + B K); its norm measures how far the two
    modes are from commuting and drives the certificate conditions.
    """
    a_s = closed_loop(plant)
    a_u = plant.A
    return a_s @ a_u - a_u @ a_s


def validate_instance(ncs: NcsInstance) -> list[str]:
    """Collect every model-assumption violation; empty means valid.

    Violations are data, not faults: each entry names the plant or field
    and the clause it breaks.
    """
    violations = []
    n = ncs.n_plants
    if ncs.capacity < 1:
        violations.append(f"capacity: 0 < M required, got M = {ncs.capacity}")
    elif ncs.capacity >= n:
        violations.append(f"capacity: M < N required, got M = {ncs.capacity} with N = {n}")
    ids = [p.plant_id for p in ncs.plants]
    if sorted(ids) != list(range(1, n + 1)):
        violations.append(f"plants: ids must be exactly 1..{n} with no repeats, got {ids}")
    for p in ncs.plants:
        r_closed = spectral_radius(closed_loop(p))
        if not r_closed < 1.0:
            violations.append(
                f"plant {p.plant_id}: closed loop not Schur "
                f"(spectral radius {r_closed:.4f})"
            )
        r_open = spectral_radius(p.A)
        if r_open < 1.0:
            violations.append(
                f"plant {p.plant_id}: open loop must be unstable "
                f"(spectral radius {r_open:.4f} < 1)"
            )
    return violations


def instance_to_dict(ncs: NcsInstance) -> dict:
    return {
        "plants": [
            {
                "id": p.plant_id,
                "A": p.A.tolist(),
                "B": p.B.tolist(),
                "K": p.K.tolist(),
            }
            for p in ncs.plants
        ],
        "M": int(ncs.capacity),
        "attack": {"m": int(ncs.attack.m), "k": int(ncs.attack.k)},
    }


def instance_from_dict(data: dict) -> NcsInstance:
    if not isinstance(data, dict):
        raise InstanceError("instance document must be a mapping")
    for key in ("plants", "M", "attack"):
        if key not in data:
            raise InstanceError(f"missing required field '{key}'")
    plants = []
    for entry in data["plants"]:
        try:
            plants.append(
                PlantModel(
                    plant_id=int(entry["id"]),
                    A=entry["A"],
                    B=entry["B"],
                    K=entry["K"],
                )
            )
        except KeyError as exc:
            raise InstanceError(f"plant entry missing field {exc}") from exc
    attack = data["attack"]
    if not isinstance(attack, dict) or "m" not in attack or "k" not in attack:
        raise InstanceError("field 'attack' must carry 'm' and 'k'")
    return NcsInstance(
        plants=tuple(plants),
        capacity=int(data["M"]),
        attack=AttackParams(m=int(attack["m"]), k=int(attack["k"])),
    )


def load_instance(path) -> NcsInstance:
    """Load and validate an instance file; violations are hard errors here.

    Certification is meaningless for fleets that break the stabilizability
    assumptions, so unlike `validate_instance` this refuses them outright.
    """
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    ncs = instance_from_dict(data)
    violations = validate_instance(ncs)
    if violations:
        detail = "; ".join(violations)
        raise InstanceError(f"{path}: {detail}")
    return ncs


def save_instance(ncs: NcsInstance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(ncs), indent=2, sort_keys=True) + "\n")
