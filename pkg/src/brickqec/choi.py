"""Dense-matrix cross-checks at desk scale (a handful of qubits).

This module rebuilds the second-moment quantity behind the partition
function from actual channels and actual Clifford unitaries, with no
reference to the configuration model:

* the Pauli channel, its complementary channel into a ``4**n``-dimensional
  environment, and the rescaled map ``tau**-1/4 Nhat(.) tau**-1/4``;
* Haar second-moment coefficients and an empirical Clifford twirl;
* a Monte Carlo estimate of ``2**k E[tr(Ntilde(U rho U^dagger)**2)]``.

Basis convention: qubit 0 is the least significant bit of a basis index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, partial

import numpy as np
from scipy.optimize import brentq

from brickqec.brickwork import BlockLayout, BrickworkSpec, build_schedule, sample_gate_indices, task_rng
from brickqec.codecheck import MCEstimate
from brickqec.parallel import ordered_map
from brickqec.pauli import CliffordTableau, clifford_group
from brickqec.statmech import ParameterError, PauliNoise

MAX_DENSE_QUBITS = 5

_PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def _dense_guard(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise ParameterError("m", f"dense simulation limited to n <= {MAX_DENSE_QUBITS}, got n={n}")


def _as_probs(p) -> np.ndarray:
    if isinstance(p, PauliNoise):
        return np.array(p.probabilities, dtype=float)
    arr = np.asarray(p, dtype=float)
    PauliNoise(*arr)  # validation only
    return arr


# ----------------------------------------------------------- two-copy tools


def swap_operator(d: int) -> np.ndarray:
    """Swap on ``C^d (x) C^d``."""
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def _two_copy_dim(op: np.ndarray) -> int:
    d2 = op.shape[0]
    d = math.isqrt(d2)
    if op.shape != (d2, d2) or d * d != d2:
        raise ParameterError("O", f"need a square operator on a two-copy space, got shape {op.shape}")
    return d


def haar_second_moment_coeffs(op: np.ndarray) -> tuple[complex, complex]:
    """Coefficients ``(alpha, beta)`` of the Haar twirl ``alpha I + beta S`` of ``op``."""
    d = _two_copy_dim(op)
    tr = np.trace(op)
    tr_s = np.trace(swap_operator(d) @ op)
    alpha = tr / (d * d - 1) - tr_s / (d * (d * d - 1))
    beta = tr_s / (d * d - 1) - tr / (d * (d * d - 1))
    return alpha, beta


# --------------------------------------------------------- dense Cliffords


def tableau_to_dense(t: CliffordTableau) -> np.ndarray:
    """A unitary whose conjugation action matches ``t`` (global phase is arbitrary).

    Column ``|0...0>`` is the common ``+1`` eigenvector of the images of the
    ``Z_j``; column ``|x>`` is obtained from it by the images of the ``X_j``.
    """
    n = t.n
    _dense_guard(n)
    dim = 1 << n
    proj = np.eye(dim, dtype=complex)
    for j in range(n):
        proj = proj @ (np.eye(dim) + t.image(n + j).to_matrix()) / 2
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    v0 = proj[:, col] / np.linalg.norm(proj[:, col])
    x_images = [t.image(j).to_matrix() for j in range(n)]
    u = np.empty((dim, dim), dtype=complex)
    for x in range(dim):
        v = v0
        for j in range(n):
            if (x >> j) & 1:
                v = x_images[j] @ v
        u[:, x] = v
    return u


@lru_cache(maxsize=2)
def clifford_unitaries(nq: int) -> np.ndarray:
    """Dense unitaries of every element of the ``nq``-qubit Clifford group, by index."""
    group = clifford_group(nq)
    return np.stack([tableau_to_dense(group.tableau(i)) for i in range(group.order)])


_gate_cache: dict[int, np.ndarray] = {}


def _gate_unitary(index: int) -> np.ndarray:
    u = _gate_cache.get(index)
    if u is None:
        u = tableau_to_dense(clifford_group(2).tableau(index))
        _gate_cache[index] = u
    return u


def apply_two_qubit(state: np.ndarray, n: int, gate: np.ndarray, x: int, y: int) -> np.ndarray:
    """Apply a 4x4 ``gate`` (local qubit 0 = ``x``) to the leading ``2**n`` axis of ``state``."""
    rest = state.shape[1:]
    psi = state.reshape((2,) * n + rest)
    g = gate.reshape(2, 2, 2, 2)  # (out_y, out_x, in_y, in_x)
    ax, ay = n - 1 - x, n - 1 - y
    psi = np.tensordot(g, psi, axes=([2, 3], [ay, ax]))
    psi = np.moveaxis(psi, [0, 1], [ay, ax])
    return psi.reshape(state.shape)


def circuit_unitary(spec: BrickworkSpec, gate_indices) -> np.ndarray:
    """Dense circuit unitary built gate by gate from each gate's own tableau."""
    _dense_guard(spec.n)
    u = np.eye(1 << spec.n, dtype=complex)
    for (x, y), g in zip(build_schedule(spec), gate_indices):
        u = apply_two_qubit(u, spec.n, _gate_unitary(int(g)), x, y)
    return u


# ------------------------------------------------------------------- twirl


@dataclass(frozen=True)
class TwirlEstimate:
    mean: np.ndarray
    stderr: np.ndarray  # elementwise, real and imaginary parts combined
    samples: int

    def error_scale(self) -> float:
        """Expected Frobenius distance of ``mean`` from its limit."""
        return float(np.sqrt(np.sum(self.stderr**2)))


def clifford_twirl_empirical(op: np.ndarray, d: int, samples: int, rng: np.random.Generator,
                             batch: int = 8192) -> TwirlEstimate:
    """Sample mean of ``U^(x)2 op U^dagger(x)2`` over uniform Cliffords on ``d = 2`` or ``4``."""
    if d not in (2, 4):
        raise ParameterError("d", f"Clifford twirl supports d in {{2, 4}}, got {d}")
    if op.shape != (d * d, d * d):
        raise ParameterError("O", f"need a {d * d}x{d * d} operator, got {op.shape}")
    units = clifford_unitaries(1 if d == 2 else 2)
    total = np.zeros(op.shape, dtype=complex)
    sq_re = np.zeros(op.shape)
    sq_im = np.zeros(op.shape)
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        us = units[rng.integers(0, len(units), size=m)]
        uu = np.einsum("nab,ncd->nacbd", us, us).reshape(m, d * d, d * d)
        out = uu @ op @ np.conj(np.swapaxes(uu, 1, 2))
        total += out.sum(axis=0)
        sq_re += (out.real**2).sum(axis=0)
        sq_im += (out.imag**2).sum(axis=0)
        done += m
    mean = total / samples
    var_re = (sq_re - samples * mean.real**2) / max(samples - 1, 1)
    var_im = (sq_im - samples * mean.imag**2) / max(samples - 1, 1)
    stderr = np.sqrt(np.clip(var_re + var_im, 0.0, None) / samples)
    return TwirlEstimate(mean, stderr, samples)


# ---------------------------------------------------------------- channels


@dataclass(frozen=True)
class ChannelRep:
    """Kraus operators stacked as ``(count, d_out, d_in)``."""

    kraus: np.ndarray

    @property
    def d_in(self) -> int:
        return self.kraus.shape[2]

    @property
    def d_out(self) -> int:
        return self.kraus.shape[1]

    def completeness_error(self) -> float:
        acc = np.einsum("kab,kac->bc", np.conj(self.kraus), self.kraus)
        return float(np.max(np.abs(acc - np.eye(self.d_in))))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return np.einsum("kab,bc,kdc->ad", self.kraus, rho, np.conj(self.kraus))

    def apply_adjoint(self, op: np.ndarray) -> np.ndarray:
        return np.einsum("kba,bc,kcd->ad", np.conj(self.kraus), op, self.kraus)

    def tensor(self, other: ChannelRep) -> ChannelRep:
        """``self (x) other`` with ``other`` on the less significant factor."""
        a, b = self.kraus, other.kraus
        k = np.einsum("iab,jcd->ijacbd", a, b)
        return ChannelRep(k.reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], a.shape[2] * b.shape[2]))


def _tensor_power(single: ChannelRep, n: int) -> ChannelRep:
    out = single
    for _ in range(n - 1):
        out = single.tensor(out)
    return out


def pauli_channel(p, n: int = 1) -> ChannelRep:
    """Kraus operators ``sqrt(p_mu) sigma_mu`` on each qubit."""
    probs = _as_probs(p)
    return _tensor_power(ChannelRep(np.sqrt(probs)[:, None, None] * _PAULIS), n)


def _complementary_single(probs: np.ndarray) -> np.ndarray:
    k = np.sqrt(probs)[:, None, None] * _PAULIS  # (mu, s, c)
    return np.transpose(k, (1, 0, 2))  # F_s[mu, c] = K_mu[s, c]


def pauli_complementary_channel(p, n: int = 1) -> ChannelRep:
    """Channel into the environment: ``<mu| Nhat(rho) |nu> = tr(K_mu rho K_nu^dagger)``.

    The environment index of ``n`` qubits is ``sum_j mu_j 4**j``.
    """
    return _tensor_power(ChannelRep(_complementary_single(_as_probs(p))), n)


def environment_state(p, n: int = 1) -> np.ndarray:
    """``tau_E = Nhat(I / 2**n)``, which is diagonal in the Pauli basis."""
    comp = pauli_complementary_channel(p, n)
    return comp.apply(np.eye(comp.d_in) / comp.d_in)


def _inverse_quarter_root(diag: np.ndarray) -> np.ndarray:
    out = np.zeros_like(diag)
    pos = diag > 0
    out[pos] = diag[pos] ** -0.25
    return out


def tilde_channel(p, n: int = 1) -> ChannelRep:
    """``tau_E**-1/4 Nhat(.) tau_E**-1/4``, with zero eigenvalues of ``tau_E`` left at zero."""
    probs = _as_probs(p)
    scale = _inverse_quarter_root(probs)
    single = scale[None, :, None] * _complementary_single(probs)
    return _tensor_power(ChannelRep(single), n)


@dataclass(frozen=True)
class SingleQubitIdentities:
    """Traces of ``(Ntilde^dagger)^(x)2 (S_E)`` and coefficients of its twirl."""

    trace: float
    trace_with_swap: float
    alpha_prime: float
    beta_prime: float
    lam: float


def single_qubit_identities(p) -> SingleQubitIdentities:
    probs = _as_probs(p)
    tilde = tilde_channel(probs, 1)
    two = tilde.tensor(tilde)
    back = two.apply_adjoint(swap_operator(4))
    alpha, beta = haar_second_moment_coeffs(back)
    lam = 2.0 ** (PauliNoise(*probs).f - 1.0)
    return SingleQubitIdentities(
        trace=float(np.real(np.trace(back))),
        trace_with_swap=float(np.real(np.trace(back @ swap_operator(2)))),
        alpha_prime=float(np.real(alpha)),
        beta_prime=float(np.real(beta)),
        lam=lam,
    )


def alpha_beta_prime(lam: float) -> tuple[float, float]:
    """Closed forms ``(4/3 - 2 lam/3, 4 lam/3 - 2/3)``."""
    return 4.0 / 3.0 - 2.0 * lam / 3.0, 4.0 * lam / 3.0 - 2.0 / 3.0


def depolarizing(p: float) -> PauliNoise:
    return PauliNoise(1.0 - p, p / 3.0, p / 3.0, p / 3.0)


def depolarizing_for_f(f: float) -> PauliNoise:
    """Depolarizing channel with noise strength ``f`` (``0 <= f <= 2``), found by root search."""
    if not 0.0 <= f <= 2.0:
        raise ParameterError("f", f"need 0 <= f <= 2, got {f}")
    if f == 0.0:
        return depolarizing(0.0)
    if f == 2.0:
        return depolarizing(0.75)
    p = brentq(lambda q: depolarizing(q).f - f, 0.0, 0.75, xtol=1e-15, rtol=1e-15)
    return depolarizing(p)


# ------------------------------------------------------- second moment MC


def input_state_matrix(layout: BlockLayout) -> np.ndarray:
    """Maximally entangled logical/reference state with ancillas in ``|0>``.

    Returned as a ``2**n x 2**k`` matrix ``M`` with ``|psi> = sum M[s, r] |s>|r>``.
    """
    n, k = layout.n, layout.k
    _dense_guard(n)
    logical = layout.logical_positions()
    m = np.zeros((1 << n, 1 << k), dtype=complex)
    for r in range(1 << k):
        s = sum(((r >> i) & 1) << q for i, q in enumerate(logical))
        m[s, r] = 2.0 ** (-k / 2)
    return m


def reduced_swap_operator(layout: BlockLayout) -> np.ndarray:
    """``tr_R(rho^(x)2 S_R)`` for the input state, as an operator on two system copies."""
    m = input_state_matrix(layout)
    dim = m.shape[0]
    o = np.einsum("ar,bq,cq,dr->abcd", m, m, np.conj(m), np.conj(m))
    return o.reshape(dim * dim, dim * dim)


def haar_input_coeffs(n: int, k: int) -> tuple[float, float]:
    """Closed-form twirl coefficients of :func:`reduced_swap_operator`."""
    den = 2.0 ** (2 * n) - 1.0
    return (2.0**-k - 2.0**-n) / den, (1.0 - 2.0 ** (-k - n)) / den


@lru_cache(maxsize=8)
def _input_state(layout: BlockLayout) -> np.ndarray:
    return input_state_matrix(layout)


@lru_cache(maxsize=8)
def _tilde_stack(probs: tuple, n: int) -> np.ndarray:
    return tilde_channel(np.array(probs), n).kraus


def purity_after_noise(state: np.ndarray, tilde_kraus: np.ndarray) -> float:
    """``tr(Ntilde(|psi><psi|)**2)`` for ``|psi>`` given as a system-by-reference matrix."""
    u = (tilde_kraus @ state).reshape(tilde_kraus.shape[0], -1)
    gram = np.conj(u) @ u.T
    return float(np.sum(np.abs(gram) ** 2))


def _second_moment_task(index: int, spec: BrickworkSpec, probs: tuple, seed: int) -> float:
    rng = task_rng(seed, index)
    gates = sample_gate_indices(spec, rng)
    state = _input_state(spec.layout)
    for (x, y), g in zip(build_schedule(spec), gates):
        state = apply_two_qubit(state, spec.n, _gate_unitary(int(g)), x, y)
    return 2.0**spec.k * purity_after_noise(state, _tilde_stack(probs, spec.n))


def second_moment_sample(spec: BrickworkSpec, p, samples: int, seed: int,
                         workers: int | None = None) -> MCEstimate:
    """Monte Carlo estimate of ``2**k E[tr(Ntilde(U rho U^dagger)**2)]``.

    Each sample draws a brickwork circuit from ``task_rng(seed, i)`` and
    applies it as dense gates built from the gates' tableaux.
    """
    _dense_guard(spec.n)
    if spec.depth < 1:
        raise ParameterError("depth", "second-moment sampling needs depth >= 1")
    if samples < 1:
        raise ParameterError("samples", f"need at least one sample, got {samples}")
    probs = tuple(float(v) for v in _as_probs(p))
    task = partial(_second_moment_task, spec=spec, probs=probs, seed=seed)
    return MCEstimate.from_values(ordered_map(task, range(samples), workers), seed)


__all__ = [
    "ChannelRep", "TwirlEstimate", "alpha_beta_prime", "circuit_unitary", "clifford_twirl_empirical",
    "depolarizing_for_f", "environment_state", "haar_input_coeffs", "haar_second_moment_coeffs",
    "input_state_matrix", "pauli_channel", "pauli_complementary_channel", "reduced_swap_operator",
    "second_moment_sample", "single_qubit_identities", "swap_operator", "tableau_to_dense",
    "tilde_channel",
]
