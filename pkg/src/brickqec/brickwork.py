"""Block layout, periodic brickwork gate schedule and circuit sampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from brickqec import _core
from brickqec.pauli import CliffordTableau, clifford_group, two_qubit_tables


class LayoutError(ValueError):
    """Invalid layout or circuit parameters; ``field`` names the offending input."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.detail = message


@dataclass(frozen=True)
class BlockLayout:
    """``m`` blocks of ``b`` qubits, the first ``a`` of each block logical."""

    a: int
    b: int
    m: int

    def __post_init__(self):
        if not (isinstance(self.a, int) and self.a > 0):
            raise LayoutError("a", f"need a positive integer, got {self.a!r}")
        if not (isinstance(self.b, int) and self.b > self.a):
            raise LayoutError("b", f"need an integer > a={self.a}, got {self.b!r}")
        if not (isinstance(self.m, int) and self.m > 0):
            raise LayoutError("m", f"need a positive integer, got {self.m!r}")
        if (self.b * self.m) % 2:
            raise LayoutError("m", f"n = b*m = {self.b * self.m} must be even")

    @property
    def n(self) -> int:
        return self.b * self.m

    @property
    def k(self) -> int:
        return self.a * self.m

    @property
    def rate(self) -> float:
        return self.a / self.b

    def logical_positions(self) -> list[int]:
        return [i for i in range(self.n) if i % self.b < self.a]

    def ancilla_positions(self) -> list[int]:
        return [i for i in range(self.n) if i % self.b >= self.a]

    def logical_mask(self) -> int:
        return sum(1 << i for i in self.logical_positions())


def logical_positions(layout: BlockLayout) -> set[int]:
    return set(layout.logical_positions())


@dataclass(frozen=True)
class BrickworkSpec:
    layout: BlockLayout
    depth: int

    def __post_init__(self):
        if not (isinstance(self.depth, int) and self.depth >= 0):
            raise LayoutError("depth", f"need a nonnegative integer, got {self.depth!r}")

    @property
    def n(self) -> int:
        return self.layout.n

    @property
    def k(self) -> int:
        return self.layout.k

    @property
    def gate_count(self) -> int:
        return self.n * self.depth // 2


def layer_pairs(n: int, layer: int) -> list[tuple[int, int]]:
    """Gate pairs of one layer (0-based), in application order."""
    if n % 2:
        raise LayoutError("n", f"brickwork with periodic boundary needs even n, got {n}")
    start = layer % 2
    return [(i, (i + 1) % n) for i in range(start, n, 2)]


def build_schedule(spec: BrickworkSpec) -> list[tuple[int, int]]:
    """All ``n*D/2`` gate pairs in application order.

    Layers alternate between ``(0,1),(2,3),...`` and ``(1,2),...,(n-1,0)``,
    starting with the former; gates inside a layer go by increasing first qubit.
    """
    out = []
    for layer in range(spec.depth):
        out.extend(layer_pairs(spec.n, layer))
    return out


def schedule_arrays(spec: BrickworkSpec) -> tuple[np.ndarray, np.ndarray]:
    pairs = build_schedule(spec)
    xs = np.array([p[0] for p in pairs], dtype=np.intc)
    ys = np.array([p[1] for p in pairs], dtype=np.intc)
    return xs, ys


def task_rng(base_seed: int, index: int) -> np.random.Generator:
    """Generator for task ``index`` of a run seeded with ``base_seed``.

    The stream depends only on the pair ``(base_seed, index)``, so results do
    not depend on how tasks are split across workers.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([base_seed, index])))


def sample_gate_indices(spec: BrickworkSpec, rng: np.random.Generator) -> np.ndarray:
    """One uniform 2-qubit Clifford group index per scheduled gate."""
    return clifford_group(2).sample_indices(rng, size=spec.gate_count)


def circuit_tableau(spec: BrickworkSpec, gate_indices) -> CliffordTableau:
    """Tableau of the circuit with the given gate indices along the schedule."""
    images, phases = two_qubit_tables()
    t = CliffordTableau.identity(spec.n)
    for (x, y), g in zip(build_schedule(spec), gate_indices):
        _core.apply_local_table(t.xs, t.zs, t.phases, x, y, images[g], phases[g])
    return t


def sample_circuit(spec: BrickworkSpec, rng: np.random.Generator) -> CliffordTableau:
    """Tableau of a random brickwork circuit with independent uniform gates."""
    return circuit_tableau(spec, sample_gate_indices(spec, rng))
