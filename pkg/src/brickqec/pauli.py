"""Bit-level Pauli strings, Clifford tableaux and the small Clifford groups.

A Pauli on ``n`` qubits is stored as two integer bit masks plus a phase
exponent: ``P = i**phase * sigma(x_0, z_0) (x) ... (x) sigma(x_{n-1}, z_{n-1})``
where ``sigma(1, 0) = X``, ``sigma(1, 1) = Y`` and ``sigma(0, 1) = Z``. With this
convention Hermitian Paulis carry ``phase in {0, 2}``. Bit ``i`` of a mask
refers to qubit ``i`` (0-based); in the text encoding qubit 0 is the leftmost
character, e.g. ``"+XIZY"``.

A :class:`CliffordTableau` stores the images of ``X_0..X_{n-1}, Z_0..Z_{n-1}``
under conjugation as ``uint64`` arrays, so tableaux are limited to 64 qubits.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from brickqec import _core

MAX_TABLEAU_QUBITS = 64

_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"+": 0, "+i": 1, "-": 2, "-i": 3, "": 0, "i": 1}
_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTER.items()}


def _popcount(v: int) -> int:
    return bin(v).count("1")


def product_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent of ``i`` picked up by ``sigma(x1, z1) * sigma(x2, z2)``, mod 4.

    Works on whole bit masks at once; the per-qubit rule is the usual one from
    Aaronson and Gottesman (XY = iZ, YZ = iX, ZX = iY).
    """
    y1 = x1 & z1
    xo1 = x1 & ~z1
    zo1 = z1 & ~x1
    y2 = x2 & z2
    xo2 = x2 & ~z2
    zo2 = z2 & ~x2
    plus = _popcount(y1 & zo2) + _popcount(xo1 & y2) + _popcount(zo1 & xo2)
    minus = _popcount(y1 & xo2) + _popcount(xo1 & zo2) + _popcount(zo1 & y2)
    return (plus - minus) % 4


@dataclass(frozen=True)
class PauliOperator:
    """An ``n``-qubit Pauli operator with a phase that is a power of ``i``."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        limit = 1 << self.n
        if self.n < 0 or not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError(f"masks do not fit in {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOperator:
        """The Pauli ``letter`` (one of ``"IXYZ"``) on ``qubit``, identity elsewhere."""
        bx, bz = _BITS[letter]
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def from_str(cls, text: str) -> PauliOperator:
        """Parse the canonical encoding, e.g. ``"+XIZY"``, ``"-iZZ"`` or ``"XY"``."""
        body = text.lstrip("+-i")
        prefix = text[: len(text) - len(body)]
        if prefix not in _PREFIX_PHASE:
            raise ValueError(f"bad phase prefix {prefix!r} in {text!r}")
        x = z = 0
        for i, ch in enumerate(body):
            try:
                bx, bz = _BITS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli letter {ch!r} in {text!r}") from None
            x |= bx << i
            z |= bz << i
        return cls(len(body), x, z, _PREFIX_PHASE[prefix])

    def __str__(self) -> str:
        letters = "".join(
            _LETTER[((self.x >> i) & 1, (self.z >> i) & 1)] for i in range(self.n)
        )
        return _PHASE_PREFIX[self.phase] + letters

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def is_identity(self) -> bool:
        """True for ``+I``, ignoring nothing; use ``weight == 0`` to ignore phase."""
        return self.x == 0 and self.z == 0 and self.phase == 0

    def unsigned(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, 0)

    def letter(self, qubit: int) -> str:
        return _LETTER[((self.x >> qubit) & 1, (self.z >> qubit) & 1)]

    def commutes(self, other: PauliOperator) -> bool:
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        if self.n != other.n:
            raise ValueError(f"qubit count mismatch: {self.n} vs {other.n}")
        ph = self.phase + other.phase + product_phase(self.x, self.z, other.x, other.z)
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z, ph)

    def to_matrix(self) -> np.ndarray:
        """Dense ``2**n x 2**n`` matrix; qubit 0 is the least significant index bit."""
        mats = {
            "I": np.eye(2, dtype=complex),
            "X": np.array([[0, 1], [1, 0]], dtype=complex),
            "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
            "Z": np.array([[1, 0], [0, -1]], dtype=complex),
        }
        out = np.ones((1, 1), dtype=complex)
        for q in reversed(range(self.n)):
            out = np.kron(out, mats[self.letter(q)])
        return (1j ** self.phase) * out


def weight(p: PauliOperator) -> int:
    """Number of qubits on which ``p`` acts nontrivially."""
    return p.weight


class CliffordTableau:
    """Images of the Pauli generators under conjugation by a Clifford unitary.

    Row ``i < n`` holds ``U X_i U^dagger`` and row ``n + i`` holds
    ``U Z_i U^dagger``. The arrays are owned by the tableau; methods that change
    the Clifford return a new tableau unless noted otherwise.
    """

    __slots__ = ("n", "xs", "zs", "phases")

    def __init__(self, n: int, xs: np.ndarray, zs: np.ndarray, phases: np.ndarray):
        if not 0 < n <= MAX_TABLEAU_QUBITS:
            raise ValueError(f"tableau supports 1..{MAX_TABLEAU_QUBITS} qubits, got {n}")
        self.n = n
        self.xs = np.ascontiguousarray(xs, dtype=np.uint64)
        self.zs = np.ascontiguousarray(zs, dtype=np.uint64)
        self.phases = np.ascontiguousarray(phases, dtype=np.uint8) % 4
        if self.xs.shape != (2 * n,) or self.zs.shape != (2 * n,) or self.phases.shape != (2 * n,):
            raise ValueError("tableau arrays must have shape (2n,)")

    @classmethod
    def identity(cls, n: int) -> CliffordTableau:
        bits = np.array([1 << i for i in range(n)], dtype=np.uint64)
        zero = np.zeros(n, dtype=np.uint64)
        return cls(
            n,
            np.concatenate([bits, zero]),
            np.concatenate([zero, bits]),
            np.zeros(2 * n, dtype=np.uint8),
        )

    @classmethod
    def from_images(cls, images: list[PauliOperator]) -> CliffordTableau:
        n = len(images) // 2
        if len(images) != 2 * n or any(p.n != n for p in images):
            raise ValueError("need 2n images of n-qubit Paulis")
        return cls(
            n,
            np.array([p.x for p in images], dtype=np.uint64),
            np.array([p.z for p in images], dtype=np.uint64),
            np.array([p.phase for p in images], dtype=np.uint8),
        )

    @classmethod
    def from_strings(cls, rows: list[str]) -> CliffordTableau:
        """Inverse of :meth:`to_strings`."""
        return cls.from_images([PauliOperator.from_str(r) for r in rows])

    def to_strings(self) -> list[str]:
        return [str(self.image(i)) for i in range(2 * self.n)]

    def copy(self) -> CliffordTableau:
        return CliffordTableau(self.n, self.xs.copy(), self.zs.copy(), self.phases.copy())

    def image(self, row: int) -> PauliOperator:
        return PauliOperator(self.n, int(self.xs[row]), int(self.zs[row]), int(self.phases[row]))

    def images(self) -> list[PauliOperator]:
        return [self.image(i) for i in range(2 * self.n)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.zs, other.zs)
            and np.array_equal(self.phases, other.phases)
        )

    def __repr__(self) -> str:
        return f"CliffordTableau({self.to_strings()})"

    def is_symplectic(self) -> bool:
        """Check the commutation relations of all generator images pairwise."""
        imgs = self.images()
        n = self.n
        for i in range(2 * n):
            for j in range(i + 1, 2 * n):
                should_anticommute = j == i + n
                if imgs[i].commutes(imgs[j]) == should_anticommute:
                    return False
        # Hermitian images only
        return all(p.phase in (0, 2) for p in imgs)

    def conjugate(self, p: PauliOperator) -> PauliOperator:
        """``U p U^dagger`` with the phase tracked exactly."""
        if p.n != self.n:
            raise ValueError(f"qubit count mismatch: tableau {self.n}, Pauli {p.n}")
        # sigma(x, z) = i**popcount(x & z) * X**x Z**z, then map X and Z factors
        acc = PauliOperator(self.n, 0, 0, p.phase + _popcount(p.x & p.z))
        for i in range(self.n):
            if (p.x >> i) & 1:
                acc = acc * self.image(i)
        for i in range(self.n):
            if (p.z >> i) & 1:
                acc = acc * self.image(self.n + i)
        return acc

    def _inverse_symplectic_rows(self) -> tuple[list[int], list[int]]:
        # For symplectic M (rows = generator images), M^-1 = Omega M^T Omega.
        n = self.n
        xs = [int(v) for v in self.xs]
        zs = [int(v) for v in self.zs]

        def col(c: int) -> list[int]:
            # bit c of the (x|z) coordinate vector of every row
            if c < n:
                return [(v >> c) & 1 for v in xs]
            return [(v >> (c - n)) & 1 for v in zs]

        inv_x, inv_z = [], []
        for a in range(2 * n):
            sa = a + n if a < n else a - n
            coeffs = col(sa)
            qx = qz = 0
            for b in range(2 * n):
                sb = b + n if b < n else b - n
                if coeffs[sb]:
                    if b < n:
                        qx |= 1 << b
                    else:
                        qz |= 1 << (b - n)
            inv_x.append(qx)
            inv_z.append(qz)
        return inv_x, inv_z

    def inverse(self) -> CliffordTableau:
        """Tableau of ``U^dagger``, with signs fixed so that it composes to identity."""
        n = self.n
        inv_x, inv_z = self._inverse_symplectic_rows()
        phases = []
        for a in range(2 * n):
            q = PauliOperator(n, inv_x[a], inv_z[a], 0)
            back = self.conjugate(q)
            gen = PauliOperator(n, 1 << a, 0) if a < n else PauliOperator(n, 0, 1 << (a - n))
            if back.x != gen.x or back.z != gen.z:
                raise ValueError("tableau is not symplectic")
            phases.append((-back.phase) % 4)
        return CliffordTableau(
            n,
            np.array(inv_x, dtype=np.uint64),
            np.array(inv_z, dtype=np.uint64),
            np.array(phases, dtype=np.uint8),
        )

    def conjugate_inverse(self, p: PauliOperator) -> PauliOperator:
        """``U^dagger p U``; satisfies ``conjugate(conjugate_inverse(p)) == p``."""
        if p.n != self.n:
            raise ValueError(f"qubit count mismatch: tableau {self.n}, Pauli {p.n}")
        return self.inverse().conjugate(p)

    def then(self, other: CliffordTableau) -> CliffordTableau:
        """Tableau of ``other * self``: apply ``self`` first, then ``other``."""
        if other.n != self.n:
            raise ValueError("qubit count mismatch")
        return CliffordTableau.from_images([other.conjugate(p) for p in self.images()])

    def apply_gate(self, gate: TwoQubitClifford, qubits: tuple[int, int]) -> CliffordTableau:
        """Tableau of ``(gate on qubits) * U``; ``qubits[0]`` is the gate's local qubit 0."""
        out = self.copy()
        out.apply_gate_inplace(gate, qubits)
        return out

    def apply_gate_inplace(self, gate: TwoQubitClifford, qubits: tuple[int, int]) -> None:
        qa, qb = qubits
        if qa == qb or not (0 <= qa < self.n and 0 <= qb < self.n):
            raise ValueError(f"invalid gate qubits {qubits} for {self.n} qubits")
        _core.apply_local_table(
            self.xs, self.zs, self.phases, qa, qb, gate.table_image, gate.table_phase
        )


def conjugate(t: CliffordTableau, p: PauliOperator) -> PauliOperator:
    return t.conjugate(p)


def conjugate_inverse(t: CliffordTableau, p: PauliOperator) -> PauliOperator:
    return t.conjugate_inverse(p)


def apply_gate(t: CliffordTableau, g: TwoQubitClifford, qubits: tuple[int, int]) -> CliffordTableau:
    return t.apply_gate(g, qubits)


# --- small Clifford groups -------------------------------------------------


@functools.lru_cache(maxsize=None)
def _symplectic_images(nq: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """All symplectic maps on ``nq`` qubits as tuples of (x, z) generator images."""
    paulis = [(x, z) for x in range(1 << nq) for z in range(1 << nq) if x or z]

    def commutes(p, q):
        return (_popcount(p[0] & q[1]) + _popcount(p[1] & q[0])) % 2 == 0

    out = []
    # generator order X_0..X_{nq-1}, Z_0..Z_{nq-1}
    for combo in itertools.product(paulis, repeat=2 * nq):
        ok = True
        for i in range(2 * nq):
            for j in range(i + 1, 2 * nq):
                if commutes(combo[i], combo[j]) == (j == i + nq):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(tuple(combo))
    return tuple(out)


class CliffordGroup:
    """The full ``nq``-qubit Clifford group modulo global phase (``nq`` in {1, 2}).

    Element ``index = symplectic_index * 4**nq + sign_bits``; bit ``r`` of
    ``sign_bits`` negates generator image ``r``.
    """

    def __init__(self, nq: int):
        if nq not in (1, 2):
            raise ValueError("only 1- and 2-qubit Clifford groups are enumerated")
        self.nq = nq
        self.symplectic = _symplectic_images(nq)
        self.n_signs = 1 << (2 * nq)
        self.order = len(self.symplectic) * self.n_signs
        rows = 2 * nq
        xs = np.zeros((self.order, rows), dtype=np.uint64)
        zs = np.zeros((self.order, rows), dtype=np.uint64)
        ph = np.zeros((self.order, rows), dtype=np.uint8)
        for si, imgs in enumerate(self.symplectic):
            for sign in range(self.n_signs):
                idx = si * self.n_signs + sign
                for r, (x, z) in enumerate(imgs):
                    xs[idx, r] = x
                    zs[idx, r] = z
                    # Hermitian image: i**popcount(x&z) X^x Z^z is sigma(x, z)
                    ph[idx, r] = 2 * ((sign >> r) & 1)
        self.xs, self.zs, self.phases = xs, zs, ph
        self._lookup = {
            (tuple(int(v) for v in xs[i]), tuple(int(v) for v in zs[i]), tuple(int(v) for v in ph[i])): i
            for i in range(self.order)
        }

    def tableau(self, index: int) -> CliffordTableau:
        return CliffordTableau(self.nq, self.xs[index], self.zs[index], self.phases[index])

    def index_of(self, t: CliffordTableau) -> int:
        """Canonical index of a tableau; inverse of :meth:`tableau`."""
        key = (
            tuple(int(v) for v in t.xs),
            tuple(int(v) for v in t.zs),
            tuple(int(v) for v in t.phases),
        )
        return self._lookup[key]

    def sample_indices(self, rng: np.random.Generator, size=None):
        return rng.integers(0, self.order, size=size)


@functools.lru_cache(maxsize=None)
def clifford_group(nq: int) -> CliffordGroup:
    return CliffordGroup(nq)


def _local_table(t: CliffordTableau) -> tuple[np.ndarray, np.ndarray]:
    """Conjugation action of a 2-qubit tableau on all 16 local Paulis.

    Local index ``l = x | z << 2`` with bit 0 = gate qubit 0, bit 1 = gate qubit 1.
    """
    image = np.zeros(16, dtype=np.uint8)
    phase = np.zeros(16, dtype=np.uint8)
    for l in range(16):
        out = t.conjugate(PauliOperator(2, l & 3, l >> 2))
        image[l] = out.x | (out.z << 2)
        phase[l] = out.phase
    return image, phase


@dataclass(frozen=True, eq=False)
class TwoQubitClifford:
    """A 2-qubit Clifford (modulo global phase) with its local conjugation table."""

    tableau: CliffordTableau
    index: int
    table_image: np.ndarray
    table_phase: np.ndarray

    @classmethod
    def from_index(cls, index: int) -> TwoQubitClifford:
        return _two_qubit_from_index(int(index))

    @classmethod
    def from_tableau(cls, t: CliffordTableau) -> TwoQubitClifford:
        if t.n != 2:
            raise ValueError("need a 2-qubit tableau")
        return cls.from_index(clifford_group(2).index_of(t))

    def inverse(self) -> TwoQubitClifford:
        return TwoQubitClifford.from_tableau(self.tableau.inverse())


@functools.lru_cache(maxsize=None)
def _two_qubit_from_index(index: int) -> TwoQubitClifford:
    images, phases = two_qubit_tables()
    return TwoQubitClifford(clifford_group(2).tableau(index), index, images[index], phases[index])


_POP2 = np.array([0, 1, 1, 2], dtype=np.int64)


def _product_phase_2q(x1, z1, x2, z2):
    # vectorized product_phase for 2-bit masks
    y1, xo1, zo1 = x1 & z1, x1 & ~z1 & 3, z1 & ~x1 & 3
    y2, xo2, zo2 = x2 & z2, x2 & ~z2 & 3, z2 & ~x2 & 3
    plus = _POP2[y1 & zo2] + _POP2[xo1 & y2] + _POP2[zo1 & xo2]
    minus = _POP2[y1 & xo2] + _POP2[xo1 & zo2] + _POP2[zo1 & y2]
    return (plus - minus) % 4


@functools.lru_cache(maxsize=None)
def two_qubit_tables() -> tuple[np.ndarray, np.ndarray]:
    """Local conjugation tables for every element, shape ``(11520, 16)`` each."""
    group = clifford_group(2)
    gx = group.xs.astype(np.int64)
    gz = group.zs.astype(np.int64)
    gp = group.phases.astype(np.int64)
    images = np.zeros((group.order, 16), dtype=np.uint8)
    phases = np.zeros((group.order, 16), dtype=np.uint8)
    for l in range(16):
        lx, lz = l & 3, l >> 2
        ax = np.zeros(group.order, dtype=np.int64)
        az = np.zeros(group.order, dtype=np.int64)
        ap = np.full(group.order, int(_POP2[lx & lz]), dtype=np.int64)
        # rows: X_0, X_1, Z_0, Z_1 in the same order as conjugate()
        for row, used in ((0, lx & 1), (1, lx & 2), (2, lz & 1), (3, lz & 2)):
            if used:
                ap += gp[:, row] + _product_phase_2q(ax, az, gx[:, row], gz[:, row])
                ax ^= gx[:, row]
                az ^= gz[:, row]
        images[:, l] = ax | (az << 2)
        phases[:, l] = ap % 4
    return images, phases


def sample_two_qubit_clifford(rng: np.random.Generator) -> TwoQubitClifford:
    """Uniformly random 2-qubit Clifford, drawn as a uniform group index."""
    return TwoQubitClifford.from_index(int(clifford_group(2).sample_indices(rng)))


# Named gates, handy in tests and for building encoders by hand.


def named_gate(name: str) -> TwoQubitClifford:
    """``"CNOT"`` (control = local qubit 0), ``"SWAP"``, ``"CZ"`` or ``"I"``."""
    rows = {
        "I": ["+XI", "+IX", "+ZI", "+IZ"],
        "CNOT": ["+XX", "+IX", "+ZI", "+ZZ"],
        "CZ": ["+XZ", "+ZX", "+ZI", "+IZ"],
        "SWAP": ["+IX", "+XI", "+IZ", "+ZI"],
    }[name]
    return TwoQubitClifford.from_tableau(CliffordTableau.from_strings(rows))


def single_qubit_tableau(name: str) -> CliffordTableau:
    rows = {"I": ["+X", "+Z"], "H": ["+Z", "+X"], "S": ["+Y", "+Z"], "X": ["+X", "-Z"]}[name]
    return CliffordTableau.from_strings(rows)


def apply_single_qubit(t: CliffordTableau, g: CliffordTableau, qubit: int) -> CliffordTableau:
    """Tableau of ``(g on qubit) * U`` for a 1-qubit tableau ``g``."""
    if g.n != 1:
        raise ValueError("need a 1-qubit tableau")
    n = t.n
    embedded = CliffordTableau.identity(n)
    xs, zs, ph = embedded.xs, embedded.zs, embedded.phases
    for r, row in ((qubit, 0), (n + qubit, 1)):
        img = g.image(row)
        xs[r] = np.uint64(img.x << qubit)
        zs[r] = np.uint64(img.z << qubit)
        ph[r] = img.phase
    return t.then(embedded)
