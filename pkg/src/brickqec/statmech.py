"""Transfer-matrix evaluation of the I/S configuration partition functions.

A configuration is an ``n``-bit mask (bit ``i`` set means site ``i`` carries
``S``). Each gate empties the masks whose bits differ on the acted pair and
hands ``2/5`` of their weight to each of the two agreeing masks. The partition
function is a final-weighted sum over the surviving mass, scaled by
``3**k * 2**n / 3**n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from brickqec import _core
from brickqec.brickwork import BlockLayout, BrickworkSpec, LayoutError, build_schedule

TRANSFER_FACTOR = Fraction(2, 5)
DEFAULT_MAX_QUBITS = 26
_LOG_OVERFLOW = 709.0


class ParameterError(ValueError):
    """A numerical precondition failed; ``field`` names the offending input."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.detail = message


# --------------------------------------------------------------------- noise


@dataclass(frozen=True)
class PauliNoise:
    """Single-qubit Pauli channel with probabilities for I, X, Y and Z."""

    p_i: float
    p_x: float
    p_y: float
    p_z: float

    def __post_init__(self):
        probs = self.probabilities
        if any(p < 0 for p in probs) or not math.isclose(sum(probs), 1.0, abs_tol=1e-12):
            raise ParameterError("noise", f"Pauli probabilities must be >= 0 and sum to 1, got {probs}")

    @property
    def probabilities(self) -> tuple[float, float, float, float]:
        return (self.p_i, self.p_x, self.p_y, self.p_z)

    @property
    def f(self) -> float:
        return 2.0 * math.log2(sum(math.sqrt(p) for p in self.probabilities))


@dataclass(frozen=True)
class ErasureNoise:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError("noise", f"erasure probability must lie in [0, 1], got {self.p}")

    @property
    def f(self) -> float:
        return math.log2(1.0 + 3.0 * self.p)


NoiseModel = Union[PauliNoise, ErasureNoise]


def noise_strength_f(model: NoiseModel) -> float:
    """Noise strength ``f`` in ``[0, 2]`` (base-2 logarithms)."""
    return model.f


def lambda_of_f(f):
    """``2**(f - 1)``; exact for integer or Fraction ``f`` in {0, 1, 2}."""
    if isinstance(f, (int, Fraction)) and f == int(f):
        return Fraction(2) ** (int(f) - 1)
    return 2.0 ** (f - 1.0)


def _exact_f(f):
    """Return ``f`` as an int when it is one of the dyadic strengths, else None."""
    if isinstance(f, (int, float, Fraction)) and f in (0, 1, 2):
        return int(f)
    return None


# ----------------------------------------------------------------- weighting


@dataclass(frozen=True)
class AQECWeighting:
    """Final weight ``lam ** w`` for a configuration with ``w`` S-sites."""

    f: float

    @property
    def lam(self):
        return lambda_of_f(self.f)

    @property
    def is_dyadic(self) -> bool:
        return _exact_f(self.f) is not None

    def weights(self, n: int, exact: bool = False) -> list:
        lam = lambda_of_f(_exact_f(self.f)) if exact else float(self.lam)
        return [lam**w for w in range(n + 1)]

    def label(self) -> str:
        return "aqec"


@dataclass(frozen=True)
class QECWeighting:
    """Final weight ``2**-w * sum_{1<=j<=min(d,w)} 3**j * C(w, j)``; zero at ``w = 0``."""

    d: int

    def __post_init__(self):
        if not (isinstance(self.d, int) and self.d >= 1):
            raise ParameterError("d", f"need a positive integer, got {self.d!r}")

    is_dyadic = True

    def weights(self, n: int, exact: bool = False) -> list:
        out = []
        for w in range(n + 1):
            total = sum(3**j * math.comb(w, j) for j in range(1, min(self.d, w) + 1))
            value = Fraction(total, 2**w)
            out.append(value if exact else float(value))
        return out

    def label(self) -> str:
        return "qec"


FinalWeighting = Union[AQECWeighting, QECWeighting]


@dataclass(frozen=True)
class PartitionResult:
    value: float
    exact: Fraction | None
    n: int
    k: int
    depth: int
    gates: int
    weighting: str
    f: float | None = None
    d: int | None = None
    notes: tuple[str, ...] = field(default=())


def prefactor(n: int, k: int, exact: bool = False):
    """``3**k * 2**n / 3**n``."""
    value = Fraction(2**n * 3**k, 3**n)
    return value if exact else float(value)


# ------------------------------------------------------------------------ DP


def init_config_vector(layout: BlockLayout, exact: bool = False) -> np.ndarray:
    """Unit weight on every mask whose logical sites are all S."""
    n = layout.n
    masks = np.arange(1 << n, dtype=np.int64)
    logical = layout.logical_mask()
    hit = (masks & logical) == logical
    if exact:
        v = np.array([Fraction(0)] * (1 << n), dtype=object)
        v[hit] = Fraction(1)
        return v
    return hit.astype(np.float64)


def _transfer_inplace(v: np.ndarray, n: int, x: int, y: int, factor) -> None:
    if v.dtype == object:
        _core.gate_transfer_exact(v, n, x, y, Fraction(factor))
    else:
        _core.gate_transfer(v, n, x, y, float(factor))


def apply_gate_transfer(v: np.ndarray, n: int, pair: tuple[int, int], factor=TRANSFER_FACTOR) -> np.ndarray:
    """Return a copy of ``v`` after the gate on ``pair``."""
    x, y = pair
    if x == y or not (0 <= x < n and 0 <= y < n):
        raise ParameterError("pair", f"need two distinct sites below n={n}, got {pair}")
    out = v.copy()
    _transfer_inplace(out, n, x, y, factor)
    return out


@lru_cache(maxsize=None)
def _popcount_slices(n: int):
    pops = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    order = np.argsort(pops, kind="stable")
    bounds = np.searchsorted(pops[order], np.arange(n + 2))
    return order, bounds


def popcount_masses(v: np.ndarray, n: int) -> list:
    """Total weight at each popcount ``0..n``.

    Float vectors are reduced with numpy's pairwise summation per popcount
    class; object vectors are summed exactly.
    """
    order, bounds = _popcount_slices(n)
    grouped = v[order]
    if v.dtype == object:
        return [sum(grouped[bounds[w] : bounds[w + 1]], Fraction(0)) for w in range(n + 1)]
    return [float(np.sum(grouped[bounds[w] : bounds[w + 1]])) for w in range(n + 1)]


def _check_size(n: int, max_qubits: int) -> None:
    if n > max_qubits:
        raise ParameterError("m", f"n={n} exceeds the dense DP limit of {max_qubits} qubits")


def _use_exact(weighting: FinalWeighting, exact: bool | None) -> bool:
    if exact is None:
        return False
    if exact and not weighting.is_dyadic:
        raise ParameterError("f", "exact mode needs f in {0, 1, 2}")
    return exact


def _combine(masses, weights, n: int, k: int, exact: bool):
    pre = prefactor(n, k, exact=exact)
    if exact:
        return pre * sum((m * w for m, w in zip(masses, weights)), Fraction(0))
    return pre * math.fsum(m * w for m, w in zip(masses, weights))


def _result(spec: BrickworkSpec, weighting: FinalWeighting, total, depth: int, gates: int, exact: bool):
    notes = ("below 1-design depth",) if depth == 0 else ()
    return PartitionResult(
        value=float(total),
        exact=total if exact else None,
        n=spec.n,
        k=spec.k,
        depth=depth,
        gates=gates,
        weighting=weighting.label(),
        f=getattr(weighting, "f", None),
        d=getattr(weighting, "d", None),
        notes=notes,
    )


def final_masses(spec: BrickworkSpec, exact: bool = False, factor=TRANSFER_FACTOR,
                 max_qubits: int = DEFAULT_MAX_QUBITS) -> list:
    """Popcount masses of the configuration vector after the whole schedule."""
    _check_size(spec.n, max_qubits)
    v = init_config_vector(spec.layout, exact=exact)
    for x, y in build_schedule(spec):
        _transfer_inplace(v, spec.n, x, y, factor)
    return popcount_masses(v, spec.n)


def partition_function(spec: BrickworkSpec, weighting: FinalWeighting, exact: bool | None = None,
                       factor=TRANSFER_FACTOR, max_qubits: int = DEFAULT_MAX_QUBITS) -> PartitionResult:
    """Exact partition function of ``spec`` under ``weighting``.

    Args:
        spec: layout and depth.
        weighting: :class:`AQECWeighting` or :class:`QECWeighting`.
        exact: compute with rationals. Available for QEC, and for AQEC when
            ``f`` is 0, 1 or 2.
        factor: per-gate transfer factor. Only the self-test changes it.
        max_qubits: refuse larger ``n`` (the state has ``2**n`` entries).
    """
    use_exact = _use_exact(weighting, exact)
    masses = final_masses(spec, exact=use_exact, factor=factor, max_qubits=max_qubits)
    total = _combine(masses, weighting.weights(spec.n, exact=use_exact), spec.n, spec.k, use_exact)
    return _result(spec, weighting, total, spec.depth, spec.gate_count, use_exact)


def gate_profile(spec: BrickworkSpec, weightings, exact: bool = False, factor=TRANSFER_FACTOR,
                 max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """Partition function after every prefix of the schedule.

    Returns an array of shape ``(len(weightings), s + 1)``; column ``t`` is
    the value after ``t`` gates. With ``exact=True`` the array holds Fractions.
    """
    _check_size(spec.n, max_qubits)
    n, k = spec.n, spec.k
    tables = [w.weights(n, exact=exact) for w in weightings]
    v = init_config_vector(spec.layout, exact=exact)
    schedule = build_schedule(spec)
    out = np.empty((len(tables), len(schedule) + 1), dtype=object if exact else np.float64)
    for t in range(len(schedule) + 1):
        if t:
            _transfer_inplace(v, n, *schedule[t - 1], factor)
        masses = popcount_masses(v, n)
        for i, table in enumerate(tables):
            out[i, t] = _combine(masses, table, n, k, exact)
    return out


def depth_masses(layout: BlockLayout, depths, exact: bool = False, factor=TRANSFER_FACTOR,
                 max_qubits: int = DEFAULT_MAX_QUBITS) -> dict[int, list]:
    """Popcount masses after each requested depth, from a single DP pass.

    The masses do not depend on the final weighting, so one pass serves every
    ``f`` and ``d``.
    """
    depths = sorted(set(int(D) for D in depths))
    if not depths:
        return {}
    full = BrickworkSpec(layout, depths[-1])
    _check_size(full.n, max_qubits)
    n = layout.n
    v = init_config_vector(layout, exact=exact)
    schedule = build_schedule(full)
    per_layer = n // 2
    out = {}
    done = 0
    for D in depths:
        for x, y in schedule[done : D * per_layer]:
            _transfer_inplace(v, n, x, y, factor)
        done = D * per_layer
        out[D] = popcount_masses(v, n)
    return out


def partition_from_masses(masses, weighting: FinalWeighting, n: int, k: int, exact: bool = False):
    """Combine popcount masses with a final weighting and the prefactor."""
    return _combine(masses, weighting.weights(n, exact=exact), n, k, exact)


def depth_profile(layout: BlockLayout, depths, weighting: FinalWeighting, exact: bool = False,
                  factor=TRANSFER_FACTOR, max_qubits: int = DEFAULT_MAX_QUBITS) -> dict[int, PartitionResult]:
    """Partition functions at several depths from a single DP pass."""
    use_exact = _use_exact(weighting, exact)
    masses = depth_masses(layout, depths, exact=use_exact, factor=factor, max_qubits=max_qubits)
    out = {}
    for D, mass in masses.items():
        total = partition_from_masses(mass, weighting, layout.n, layout.k, use_exact)
        spec = BrickworkSpec(layout, D)
        out[D] = _result(spec, weighting, total, D, spec.gate_count, use_exact)
    return out


# -------------------------------------------------------------- closed forms


def z_infinity_aqec(n: int, k: int, f, exact: bool = False):
    """Infinite-depth AQEC partition function.

    ``(1 - 2**(k-n) + 2**(k-n+n*f) - 2**(n*f-2n)) / (1 - 2**(-2n))``
    """
    if not 0 <= k < n:
        raise ParameterError("k", f"need 0 <= k < n={n}, got {k}")
    if exact:
        fi = _exact_f(f)
        if fi is None:
            raise ParameterError("f", "exact mode needs f in {0, 1, 2}")
        two = Fraction(2)
        num = 1 - two ** (k - n) + two ** (k - n + n * fi) - two ** (n * fi - 2 * n)
        return num / (1 - two ** (-2 * n))
    num = 1.0 - 2.0 ** (k - n) + 2.0 ** (k - n + n * f) - 2.0 ** (n * f - 2 * n)
    return num / (1.0 - 2.0 ** (-2 * n))


def qec_prefactor_k(n: int, d: int) -> int:
    """``sum_{1<=j<=d} 3**j * C(n, j)``."""
    return sum(3**j * math.comb(n, j) for j in range(1, d + 1))


def z_infinity_qec(n: int, k: int, d: int, exact: bool = False):
    """Infinite-depth QEC partition function ``K (2**(k-n) - 2**(-2n)) / (1 - 2**(-2n))``."""
    if d < 1:
        raise ParameterError("d", f"need d >= 1, got {d}")
    K = qec_prefactor_k(n, d)
    if exact:
        two = Fraction(2)
        return K * (two ** (k - n) - two ** (-2 * n)) / (1 - two ** (-2 * n))
    # log-space keeps huge K and tiny 2**(k-n) from over/underflowing
    log_val = (math.log(K) + (k - n) * math.log(2) + math.log1p(-(2.0 ** (-n - k)))
               - math.log1p(-(2.0 ** (-2 * n))))
    return math.exp(log_val) if log_val < _LOG_OVERFLOW else math.inf


def choi_error_bound(z: float) -> float:
    """Upper bound ``max(Z - 1, 0) ** 0.25`` on the expected Choi error."""
    return max(float(z) - 1.0, 0.0) ** 0.25


def log_c_constant(b: int) -> float:
    """``ln(10 * 3**(2b) * 2**b)`` without forming the integer."""
    return math.log(10) + 2 * b * math.log(3) + b * math.log(2)


def r_constant(rate: float) -> float:
    return 0.4 * (2.0**rate + 2.0**-rate)


def _logical_per_block(n: int, k: int, b: int) -> int:
    if n % b:
        raise ParameterError("b", f"n={n} is not a multiple of b={b}")
    a, rem = divmod(k * b, n)
    if rem or not 0 < a < b:
        raise ParameterError("k", f"k/n={k}/{n} is not a/b with 0 < a < b={b}")
    return a


def _exp_safe(x: float) -> float:
    return math.exp(x) if x < _LOG_OVERFLOW else math.inf


def aqec_depth_bound(n: int, k: int, b: int, D: int, f: float) -> float:
    """Depth-``D`` upper bound ``Z_inf * exp(n C r**D)`` on the AQEC partition function.

    Raises:
        ParameterError: when ``f > 1 - k/n``, the regime the bound does not cover.
    """
    _logical_per_block(n, k, b)
    if f > 1.0 - k / n + 1e-12:
        raise ParameterError("f", f"bound requires f <= 1 - k/n = {1 - k / n:.6g}, got f={f}")
    if D < 0:
        raise ParameterError("depth", f"need depth >= 0, got {D}")
    log_term = math.log(n) + log_c_constant(b) + D * math.log(r_constant(k / n))
    z_inf = z_infinity_aqec(n, k, f)
    return z_inf * _exp_safe(_exp_safe(log_term))


def a_constant(f: float) -> float:
    return max(2.0 ** (2.0 - f), 3.0 / (f * math.log(2)))


def qec_depth_bound(n: int, k: int, b: int, d: int, D: int) -> float:
    """Depth-``D`` upper bound on the QEC partition function.

    Uses ``f = 1 - a/b``; the second term is evaluated as a single exponent.
    """
    a = _logical_per_block(n, k, b)
    if d < 1:
        raise ParameterError("d", f"need d >= 1, got {d}")
    f = 1.0 - a / b
    log_ncr = math.log(n) + log_c_constant(b) + D * math.log(r_constant(k / n))
    ncr = _exp_safe(log_ncr)
    exponent = math.log(d) + d * math.log(a_constant(f)) + log_ncr + ncr
    return z_infinity_qec(n, k, d) + _exp_safe(exponent)


def informal_scaling(n: float, c: float, r: float) -> float:
    """``n ** ((1 - c |log2 r|) / 4)``, the Choi-error decay at depth ``c log n``."""
    if not 0 < r < 1:
        raise ParameterError("r", f"need 0 < r < 1, got {r}")
    if c <= 1.0 / abs(math.log2(r)):
        raise ParameterError("c", f"need c > 1/|log2 r| = {1 / abs(math.log2(r)):.6g}, got {c}")
    return n ** ((1.0 - c * abs(math.log2(r))) / 4.0)


def final_weight_bound(w: int, d: int, f: float) -> tuple[float, float]:
    """Both sides of ``2**(-f w) sum_{j<=min(d,w)} 3**j C(w,j) <= d A**d``."""
    if w < 1 or d < 1:
        raise ParameterError("w", f"need w >= 1 and d >= 1, got w={w}, d={d}")
    if not 0.0 < f < 1.0:
        raise ParameterError("f", f"need 0 < f < 1, got {f}")
    total = sum(3**j * math.comb(w, j) for j in range(1, min(d, w) + 1))
    lhs = math.exp(math.log(total) - f * w * math.log(2))
    return lhs, d * a_constant(f) ** d


# ---------------------------------------------------------------------- scan


def binary_entropy(c: float) -> float:
    if c <= 0 or c >= 1:
        return 0.0
    return -c * math.log2(c) - (1 - c) * math.log2(1 - c)


def linear_distance_rate_ok(c: float, a: int, b: int) -> bool:
    """Rate condition ``c log2 3 + H(c) + a/b < 1`` for distance ``d = c n``."""
    return c * math.log2(3) + binary_entropy(c) + a / b < 1


@dataclass(frozen=True)
class ScanRow:
    n: int
    k: int
    d: int
    depth: int
    z_inf: float
    bound: float

    @property
    def below_one(self) -> bool:
        return self.bound < 1.0


@dataclass(frozen=True)
class ScanTable:
    alpha: float
    a: int
    b: int
    rows: list[ScanRow]

    @property
    def strictly_decreasing(self) -> bool:
        vals = [r.bound for r in self.rows]
        return all(y < x for x, y in zip(vals, vals[1:]))

    @property
    def reaches_below_one(self) -> bool:
        return any(r.below_one for r in self.rows)


def log2_ceil_distance(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


def scan_exact_threshold(n_list, a: int, b: int, d_of_n=log2_ceil_distance, alpha: float = 40.0) -> ScanTable:
    """QEC bound at depth ``ceil(alpha * d(n))`` for each ``n``.

    ``d_of_n`` maps ``n`` to the target distance parameter.
    """
    if alpha < 0:
        raise ParameterError("alpha", f"need alpha >= 0, got {alpha}")
    rows = []
    for n in n_list:
        if n % b:
            raise ParameterError("n", f"n={n} is not a multiple of b={b}")
        k = a * n // b
        d = int(d_of_n(n))
        D = math.ceil(alpha * d)
        rows.append(ScanRow(n, k, d, D, z_infinity_qec(n, k, d), qec_depth_bound(n, k, b, d, D)))
    return ScanTable(alpha, a, b, rows)


def choose_alpha(n_list, a: int, b: int, d_of_n=log2_ceil_distance, start: float = 1.0,
                 stop: float = 200.0, step: float = 1.0) -> float:
    """Smallest ``alpha`` on a grid for which the scan decreases strictly and ends below 1."""
    alpha = start
    while alpha <= stop:
        table = scan_exact_threshold(n_list, a, b, d_of_n, alpha)
        if table.strictly_decreasing and table.rows[-1].below_one:
            return alpha
        alpha += step
    raise ParameterError("alpha", f"no alpha in [{start}, {stop}] gives a decreasing scan")


__all__ = [
    "AQECWeighting", "ErasureNoise", "LayoutError", "ParameterError", "PartitionResult", "PauliNoise",
    "QECWeighting", "ScanTable", "TRANSFER_FACTOR", "aqec_depth_bound", "apply_gate_transfer",
    "choi_error_bound", "choose_alpha", "depth_profile", "final_masses", "final_weight_bound",
    "depth_masses", "gate_profile", "partition_from_masses", "informal_scaling", "init_config_vector", "lambda_of_f", "linear_distance_rate_ok",
    "noise_strength_f", "partition_function", "qec_depth_bound", "scan_exact_threshold",
    "z_infinity_aqec", "z_infinity_qec",
]
