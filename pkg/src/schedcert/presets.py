"""A ready-made five-plant benchmark instance.

Five unstable second-order plants with scalar LQR-style gains, a two-slot
network and a (1,2) jamming budget. Used by the test suite and the README
walkthrough.
"""

from __future__ import annotations

from .plants import AttackParams, NcsInstance, PlantModel

_PLANT_DATA = [
    (1, [[-0.1340, -0.0076], [-0.0503, -1.0821]], [[0.0], [1.0]], [[0.0441, 0.9277]]),
    (2, [[-0.0107, 0.0052], [0.4219, 1.0993]], [[0.0], [1.0]], [[-0.3613, -0.9434]]),
    (3, [[0.6505, 0.4401], [0.6510, 0.4197]], [[1.0], [1.0]], [[-0.5968, -0.3945]]),
    (4, [[-1.3188, -0.1959], [0.0008, -0.0244]], [[1.0], [0.0]], [[1.1431, 0.1705]]),
    (5, [[-1.0079, -0.0455], [0.0266, 0.6821]], [[1.0], [0.0]], [[0.8605, 0.0201]]),
]


def five_plant_benchmark() -> NcsInstance:
    plants = tuple(PlantModel(pid, a, b, k) for pid, a, b, k in _PLANT_DATA)
    return NcsInstance(plants=plants, capacity=2, attack=AttackParams(m=1, k=2))
