"""Exact error-correction criterion for Clifford encoders.

An encoder ``U`` on ``n`` qubits puts logical data on the layout's logical
sites and ``|0>`` on its ancillas. For a physical error ``mu`` the operator
``U^dagger mu U`` tells what the error does to the unencoded input: if it is
``Z``-type on every ancilla (the ancillas stay in ``|0>``) but touches the
logical sites, the error is an undetectable logical. All checks here ignore
Pauli signs.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from brickqec.brickwork import BlockLayout, BrickworkSpec, sample_circuit, task_rng
from brickqec.parallel import ordered_map
from brickqec.pauli import CliffordTableau, PauliOperator
from brickqec.statmech import ParameterError

FORWARD_GUARD = 1 << 24
_SINGLE = ((1, 0), (1, 1), (0, 1))  # X, Y, Z as (x, z) bits


@dataclass(frozen=True)
class Witness:
    """A failing error ``mu`` and the split of ``U^dagger mu U`` into logical and ancilla parts."""

    mu: PauliOperator
    nu_logical: str
    nu_ancilla: str


@dataclass(frozen=True)
class CodeCheck:
    ok: bool
    d: int
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.ok


def _site_mask(sites) -> int:
    return sum(1 << i for i in sites)


def _restrict(p: PauliOperator, sites) -> str:
    return "".join(p.letter(i) for i in sites)


def _backprop_rows(u: CliffordTableau) -> tuple[list[int], list[int]]:
    """Unsigned rows of ``U^dagger``: images of ``X_i`` then ``Z_i`` under ``P -> U^dagger P U``."""
    return u._inverse_symplectic_rows()


def _errors_of_weight(n: int, w: int, single_images):
    """Yield ``(sites, letters, x, z)`` for every weight-``w`` error, back-propagated."""
    for sites in itertools.combinations(range(n), w):
        for letters in itertools.product(range(3), repeat=w):
            x = z = 0
            for q, c in zip(sites, letters):
                ix, iz = single_images[q][c]
                x ^= ix
                z ^= iz
            yield sites, letters, x, z


def _single_images(u: CliffordTableau):
    inv_x, inv_z = _backprop_rows(u)
    n = u.n
    out = []
    for q in range(n):
        xq = (inv_x[q], inv_z[q])
        zq = (inv_x[n + q], inv_z[n + q])
        yq = (xq[0] ^ zq[0], xq[1] ^ zq[1])
        out.append((xq, yq, zq))
    return out


def _mu_operator(n: int, sites, letters) -> PauliOperator:
    x = z = 0
    for q, c in zip(sites, letters):
        bx, bz = _SINGLE[c]
        x |= bx << q
        z |= bz << q
    return PauliOperator(n, x, z)


def _first_failure(u: CliffordTableau, layout: BlockLayout, max_weight: int):
    """Smallest-weight error up to ``max_weight`` that acts as an undetected logical."""
    n = u.n
    if layout.n != n:
        raise ParameterError("layout", f"layout has n={layout.n}, encoder has n={n}")
    logical = layout.logical_mask()
    ancilla = ((1 << n) - 1) ^ logical
    singles = _single_images(u)
    for w in range(1, min(max_weight, n) + 1):
        for sites, letters, x, z in _errors_of_weight(n, w, singles):
            if x & ancilla == 0 and (x | z) & logical:
                back = PauliOperator(n, x, z)
                witness = Witness(
                    _mu_operator(n, sites, letters),
                    _restrict(back, layout.logical_positions()),
                    _restrict(back, layout.ancilla_positions()),
                )
                return w, witness
    return None, None


def is_code(u: CliffordTableau, layout: BlockLayout, d: int) -> CodeCheck:
    """Whether ``U`` encodes an ``[[n, k, d+1]]`` code.

    Every error of weight ``1..d`` is pulled back through ``U``; the check
    fails on the first one that leaves the ancillas in ``|0>`` but acts on
    the logical sites. Errors that pull back to ancilla-only ``Z`` strings are
    stabilizers and are allowed, so degenerate codes pass.
    """
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ParameterError("d", f"need d >= 1, got {d!r}")
    _, witness = _first_failure(u, layout, int(d))
    return CodeCheck(witness is None, int(d), witness)


@dataclass(frozen=True)
class DistanceReport:
    """``distance`` is exact when set; otherwise only ``distance >= at_least`` is known."""

    distance: int | None
    at_least: int
    witness: Witness | None
    method: str = "backprop"

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "distance": self.distance,
            "at_least": self.at_least,
            "method": self.method,
            "witness": None if w is None else {
                "mu": str(w.mu), "nu_logical": w.nu_logical, "nu_ancilla": w.nu_ancilla,
            },
        }


def code_distance(u: CliffordTableau, layout: BlockLayout, cap: int) -> DistanceReport:
    """Smallest weight of an undetected logical error, searched up to ``cap``."""
    if cap < 1:
        raise ParameterError("cap", f"need cap >= 1, got {cap}")
    w, witness = _first_failure(u, layout, cap)
    if w is None:
        return DistanceReport(None, min(cap, u.n) + 1, None)
    return DistanceReport(w, w, witness)


def forward_enumeration_check(u: CliffordTableau, layout: BlockLayout, d: int,
                              guard: int = FORWARD_GUARD) -> bool:
    """Reference verdict for :func:`is_code` by pushing logicals forward.

    Every product of encoded logical operators (not the identity) and
    ancilla ``Z`` strings is mapped through ``U``; the code passes when all of
    them have weight above ``d``.
    """
    n, k = layout.n, layout.k
    if u.n != n:
        raise ParameterError("layout", f"layout has n={n}, encoder has n={u.n}")
    if 4**k * 2 ** (n - k) > guard:
        raise ParameterError("m", f"4^k * 2^(n-k) = {4**k * 2 ** (n - k)} exceeds the guard {guard}")
    logical = layout.logical_positions()
    gens = [u.image(q) for q in logical] + [u.image(n + q) for q in logical]
    gens += [u.image(n + q) for q in layout.ancilla_positions()]
    xs = np.zeros(1, dtype=np.uint64)
    zs = np.zeros(1, dtype=np.uint64)
    for g in gens:
        xs = np.concatenate([xs, xs ^ np.uint64(g.x)])
        zs = np.concatenate([zs, zs ^ np.uint64(g.z)])
    index = np.arange(xs.size)
    has_logical = (index & ((1 << (2 * k)) - 1)) != 0
    weights = np.bitwise_count(xs | zs)[has_logical]
    return bool(weights.min() > d)


# ----------------------------------------------------------------- estimates


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    @classmethod
    def from_values(cls, values, seed: int) -> MCEstimate:
        arr = np.asarray(values, dtype=np.float64)
        stderr = float(np.std(arr, ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else math.nan
        return cls(float(np.mean(arr)), stderr, int(arr.size), int(seed))


def _failure_task(index: int, spec: BrickworkSpec, d: int, seed: int) -> float:
    u = sample_circuit(spec, task_rng(seed, index))
    return 0.0 if is_code(u, spec.layout, d) else 1.0


def estimate_failure_probability(spec: BrickworkSpec, d: int, samples: int, seed: int,
                                 workers: int | None = None) -> MCEstimate:
    """Fraction of sampled encoders that are not ``[[n, k, d+1]]`` codes.

    Sample ``i`` draws its circuit from ``task_rng(seed, i)``.
    """
    if samples < 1:
        raise ParameterError("samples", f"need at least one sample, got {samples}")
    fails = ordered_map(partial(_failure_task, spec=spec, d=d, seed=seed), range(samples), workers)
    return MCEstimate.from_values(fails, seed)


# ----------------------------------------------------------- named encoders


def _complete_destabilizers(n: int, fixed: dict[int, PauliOperator]) -> list[PauliOperator]:
    """Fill missing rows of a tableau image list by brute-force search.

    ``fixed`` maps row index to image. Each missing row ``i < n`` (an ``X``
    image) must anticommute with row ``n + i`` and commute with every other row.
    """
    rows = dict(fixed)
    candidates = [PauliOperator(n, x, z) for x in range(1 << n) for z in range(1 << n) if x | z]
    for i in range(2 * n):
        if i in rows:
            continue
        partner = i + n if i < n else i - n
        for c in candidates:
            if all(c.commutes(p) != (j == partner) for j, p in rows.items()):
                rows[i] = c
                break
        else:
            raise ValueError(f"no image found for tableau row {i}")
    return [rows[i] for i in range(2 * n)]


def four_two_two_encoder() -> tuple[CliffordTableau, BlockLayout]:
    """Encoder of the ``[[4,2,2]]`` code with stabilizers ``XXXX`` and ``ZZZZ``.

    Logical sites are 0 and 2 (layout ``a=1, b=2, m=2``); the ancilla ``Z``
    operators on sites 1 and 3 map to the two stabilizers.
    """
    n = 4
    p = PauliOperator.from_str
    fixed = {
        0: p("+XXII"), n + 0: p("+ZIZI"),
        2: p("+XIXI"), n + 2: p("+ZZII"),
        n + 1: p("+XXXX"), n + 3: p("+ZZZZ"),
    }
    return CliffordTableau.from_images(_complete_destabilizers(n, fixed)), BlockLayout(1, 2, 2)
