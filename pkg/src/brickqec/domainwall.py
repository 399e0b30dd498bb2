"""Domain-wall view of configuration trajectories.

Edge ``e`` sits between sites ``e`` and ``e+1 (mod n)``; a wall occupies it
when the two sites carry different labels. A gate on ``(x, x+1)`` acts on edge
``x`` (the wrap gate ``(n-1, 0)`` acts on edge ``n-1``). If that edge carries a
wall, the gate either moves it to a neighbouring edge or annihilates it with
a wall already sitting there, at a cost of ``2/5``.

The brute-force enumeration here never touches the transfer-matrix code, so
it serves as the reference for :mod:`brickqec.statmech`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from brickqec import _core
from brickqec.brickwork import BrickworkSpec, build_schedule, schedule_arrays
from brickqec.statmech import (
    FinalWeighting,
    ParameterError,
    PartitionResult,
    _use_exact,
    prefactor,
    z_infinity_aqec,
)

# Deliberately a separate constant from statmech.TRANSFER_FACTOR: the
# self-test corrupts that one and expects this oracle to notice.
WALL_MOVE_WEIGHT = Fraction(2, 5)
MAX_ENUM_QUBITS = 8
MAX_ENUM_DEPTH = 4


@dataclass(frozen=True)
class DWConfig:
    n: int
    edges: frozenset

    def __post_init__(self):
        if len(self.edges) % 2:
            raise ParameterError("edges", f"a ring carries an even number of walls, got {sorted(self.edges)}")

    def __len__(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[int]:
        return sorted(self.edges)


def _wall_bits(mask: int, n: int) -> int:
    rot = (mask >> 1) | ((mask & 1) << (n - 1))
    return (mask ^ rot) & ((1 << n) - 1)


def dw_of_config(mask: int, n: int) -> DWConfig:
    """Walls of configuration ``mask``: edge ``e`` iff bits ``e`` and ``e+1 mod n`` differ."""
    bits = _wall_bits(int(mask), n)
    return DWConfig(n, frozenset(e for e in range(n) if (bits >> e) & 1))


def config_of_dw(g: DWConfig, anchor) -> int:
    """The configuration with walls ``g`` whose site 0 carries ``anchor``.

    ``anchor`` is ``"S"``/``1`` or ``"I"``/``0``. The two anchors give
    complementary masks.
    """
    if len(g.edges) % 2:
        raise ParameterError("edges", "odd wall count")
    bit = {"S": 1, "I": 0, 1: 1, 0: 0}[anchor]
    mask = bit
    for site in range(1, g.n):
        if site - 1 in g.edges:
            bit ^= 1
        mask |= bit << site
    return mask


# ---------------------------------------------------------------- enumeration


def _guard(spec: BrickworkSpec, max_qubits: int, max_depth: int) -> None:
    if spec.n > max_qubits:
        raise ParameterError("m", f"enumeration limited to n <= {max_qubits}, got n={spec.n}")
    if spec.depth > max_depth:
        raise ParameterError("depth", f"enumeration limited to depth <= {max_depth}, got {spec.depth}")


def initial_masks(spec: BrickworkSpec) -> np.ndarray:
    logical = spec.layout.logical_mask()
    return np.array([m for m in range(1 << spec.n) if m & logical == logical], dtype=np.uint64)


def trajectory_counts(spec: BrickworkSpec, max_qubits: int = MAX_ENUM_QUBITS,
                      max_depth: int = MAX_ENUM_DEPTH) -> np.ndarray:
    """Trajectory counts indexed by (branchings, final popcount, final wall count)."""
    _guard(spec, max_qubits, max_depth)
    gx, gy = schedule_arrays(spec)
    return _core.enumerate_counts(spec.n, gx, gy, initial_masks(spec))


def _weighted_total(counts: np.ndarray, spec: BrickworkSpec, weighting: FinalWeighting, exact: bool):
    n = spec.n
    final = weighting.weights(n, exact=exact)
    move = WALL_MOVE_WEIGHT if exact else float(WALL_MOVE_WEIGHT)
    zero = Fraction(0) if exact else 0.0
    per_walls = [zero] * (n + 1)
    for j, w, walls in zip(*np.nonzero(counts)):
        per_walls[walls] += int(counts[j, w, walls]) * move ** int(j) * final[w]
    pre = prefactor(n, spec.k, exact=exact)
    return [pre * x for x in per_walls]


def enumerate_trajectories(spec: BrickworkSpec, weighting: FinalWeighting, exact: bool | None = None,
                           max_qubits: int = MAX_ENUM_QUBITS, max_depth: int = MAX_ENUM_DEPTH) -> PartitionResult:
    """Partition function as a direct sum over every configuration trajectory.

    Exact rationals are used when ``exact`` is true (or left ``None`` and the
    weighting is dyadic).
    """
    if exact is None:
        exact = weighting.is_dyadic
    exact = _use_exact(weighting, exact)
    counts = trajectory_counts(spec, max_qubits, max_depth)
    parts = _weighted_total(counts, spec, weighting, exact)
    total = sum(parts, Fraction(0)) if exact else float(np.sum(parts))
    return PartitionResult(
        value=float(total), exact=total if exact else None, n=spec.n, k=spec.k, depth=spec.depth,
        gates=spec.gate_count, weighting=weighting.label(),
        f=getattr(weighting, "f", None), d=getattr(weighting, "d", None),
    )


def iter_trajectories(spec: BrickworkSpec, max_qubits: int = MAX_ENUM_QUBITS,
                      max_depth: int = MAX_ENUM_DEPTH) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(masks, branchings)`` for every trajectory; ``masks`` has length ``s + 1``."""
    _guard(spec, max_qubits, max_depth)
    schedule = build_schedule(spec)
    s = len(schedule)

    def walk(t, path, j):
        if t == s:
            yield tuple(path), j
            return
        mask = path[-1]
        x, y = schedule[t]
        both = (1 << x) | (1 << y)
        if ((mask >> x) & 1) == ((mask >> y) & 1):
            path.append(mask)
            yield from walk(t + 1, path, j)
            path.pop()
            return
        for nxt in (mask & ~both, mask | both):
            path.append(nxt)
            yield from walk(t + 1, path, j + 1)
            path.pop()

    for start in initial_masks(spec):
        yield from walk(0, [int(start)], 0)


# ------------------------------------------------------------------- tracking


@dataclass(frozen=True)
class DWEvent:
    kind: str  # "none", "hop" or "annihilate"
    edges: tuple[int, ...] = ()
    wall: int | None = None


@dataclass
class WallHistory:
    """One tracked wall: its edge after every gate (``None`` once gone)."""

    ident: int
    path: list
    moves: int = 0
    annihilated_at: int | None = None

    @property
    def survives(self) -> bool:
        return self.annihilated_at is None

    @property
    def weight(self) -> Fraction:
        return WALL_MOVE_WEIGHT**self.moves


@dataclass
class DWTrajectory:
    n: int
    gates: list
    configs: list
    events: list
    walls: list
    weight: Fraction = field(default=Fraction(1))

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "gates": [list(g) for g in self.gates],
            "configs": [c.sorted_edges() for c in self.configs],
            "events": [{"kind": e.kind, "edges": list(e.edges)} for e in self.events],
            "weight": str(self.weight),
        }, separators=(",", ":"))


def track_domain_walls(masks, spec_or_schedule) -> DWTrajectory:
    """Follow individual walls through a configuration trajectory.

    ``masks[t]`` is the configuration after ``t`` gates. The wall on the acted
    edge is the one that moves; when it lands on an occupied edge both walls
    are marked annihilated at that gate.

    Raises:
        ParameterError: when a step is not an allowed transfer for its gate.
    """
    if isinstance(spec_or_schedule, BrickworkSpec):
        schedule = build_schedule(spec_or_schedule)
        n = spec_or_schedule.n
    else:
        schedule = [tuple(p) for p in spec_or_schedule]
        n = None
    masks = [int(m) for m in masks]
    if len(masks) != len(schedule) + 1:
        raise ParameterError("trajectory", f"need {len(schedule) + 1} configurations, got {len(masks)}")
    if n is None:
        n = 1 + max(max(p) for p in schedule) if schedule else max(1, max(masks).bit_length())

    occupant: dict[int, int] = {}
    walls: list[WallHistory] = []
    for e in dw_of_config(masks[0], n).sorted_edges():
        occupant[e] = len(walls)
        walls.append(WallHistory(len(walls), [e]))

    events = []
    weight = Fraction(1)
    for t, (x, y) in enumerate(schedule, start=1):
        before, after = masks[t - 1], masks[t]
        bx, by = (before >> x) & 1, (before >> y) & 1
        both = (1 << x) | (1 << y)
        if bx == by:
            if after != before:
                raise ParameterError("trajectory", f"gate {t} on {x, y} changed an aligned pair")
            events.append(DWEvent("none"))
        else:
            if after not in (before & ~both, before | both):
                raise ParameterError("trajectory", f"gate {t} on {x, y} produced an unreachable configuration")
            edge = x
            target = (x - 1) % n if ((after >> x) & 1) != bx else (x + 1) % n
            mover = occupant.pop(edge)
            walls[mover].moves += 1
            weight *= WALL_MOVE_WEIGHT
            if target in occupant:
                other = occupant.pop(target)
                walls[mover].annihilated_at = t
                walls[other].annihilated_at = t
                events.append(DWEvent("annihilate", (edge, target), mover))
            else:
                occupant[target] = mover
                events.append(DWEvent("hop", (edge, target), mover))
        for wall in walls:
            wall.path.append(next((e for e, i in occupant.items() if i == wall.ident), None))

    configs = [dw_of_config(m, n) for m in masks]
    for t, cfg in enumerate(configs):
        tracked = {w.path[t] for w in walls if w.path[t] is not None}
        if tracked != set(cfg.edges):
            raise ParameterError("trajectory", f"wall bookkeeping diverged at step {t}")
    return DWTrajectory(n, list(schedule), configs, events, walls, weight)


def decompose_survivors(dwt: DWTrajectory) -> tuple[list[WallHistory], list[WallHistory]]:
    """Split tracked walls into ``(annihilated, surviving)``."""
    gone = [w for w in dwt.walls if not w.survives]
    alive = [w for w in dwt.walls if w.survives]
    return gone, alive


def group_weight(walls) -> Fraction:
    out = Fraction(1)
    for w in walls:
        out *= w.weight
    return out


def export_trajectories_jsonl(trajectories, fh) -> int:
    """Write one JSON object per tracked trajectory; returns the line count."""
    count = 0
    for dwt in trajectories:
        fh.write(dwt.to_json() + "\n")
        count += 1
    return count


# ------------------------------------------------------------------ breakdown


@dataclass(frozen=True)
class SurvivorBreakdown:
    """Partition-function contributions grouped by surviving wall pairs ``k0``."""

    buckets: dict
    total: object
    z_inf: float | None = None

    @property
    def annihilating_part(self):
        return self.buckets.get(0, 0)


def survivor_breakdown(spec: BrickworkSpec, weighting: FinalWeighting, exact: bool | None = None,
                       max_qubits: int = MAX_ENUM_QUBITS, max_depth: int = MAX_ENUM_DEPTH) -> SurvivorBreakdown:
    """Group the enumerated sum by the number of wall pairs alive at the end.

    For AQEC weightings the infinite-depth value is attached for comparison
    with the fully annihilating bucket.
    """
    if exact is None:
        exact = weighting.is_dyadic
    exact = _use_exact(weighting, exact)
    counts = trajectory_counts(spec, max_qubits, max_depth)
    parts = _weighted_total(counts, spec, weighting, exact)
    buckets = {walls // 2: val for walls, val in enumerate(parts) if counts[:, :, walls].any()}
    total = sum(buckets.values(), Fraction(0)) if exact else float(np.sum(list(buckets.values())))
    z_inf = None
    if weighting.label() == "aqec":
        z_inf = z_infinity_aqec(spec.n, spec.k, weighting.f)
    return SurvivorBreakdown(buckets, total, z_inf)
