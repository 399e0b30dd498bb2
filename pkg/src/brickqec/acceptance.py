"""The acceptance suite, shared by ``brickqec selftest`` and the test suite.

Each check returns a :class:`CriterionResult`; none of them raise on failure.
"""
from __future__ import annotations

import contextlib
import io
import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from brickqec import choi, codecheck, domainwall, statmech
from brickqec.brickwork import BlockLayout, BrickworkSpec, sample_circuit
from brickqec.statmech import AQECWeighting, QECWeighting, TRANSFER_FACTOR

ACCEPTANCE_SEED = 20240601


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail}"


def small_layouts(max_n: int, min_n: int = 2) -> list[BlockLayout]:
    """Every valid block layout with ``min_n <= n <= max_n``."""
    out = []
    for b in range(2, max_n + 1):
        for m in range(1, max_n // b + 1):
            if min_n <= b * m and (b * m) % 2 == 0:
                out.extend(BlockLayout(a, b, m) for a in range(1, b))
    return out


def _timed(number: int, name: str, budget: float | None, fn, *args, **kwargs) -> CriterionResult:
    start = time.perf_counter()
    try:
        passed, detail = fn(*args, **kwargs)
    except Exception as exc:  # a crash is a failed criterion, reported rather than raised
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    seconds = time.perf_counter() - start
    if budget is not None and seconds > budget:
        passed = False
        detail += f" (took {seconds:.1f} s, over the {budget:g} s budget)"
    return CriterionResult(number, name, passed, detail, seconds, budget)


# ---------------------------------------------------------------- criteria


def check_oracle_equivalence(factor=TRANSFER_FACTOR):
    mismatches = []
    float_worst = 0.0
    cases = 0
    for layout in small_layouts(8):
        for D in range(5):
            spec = BrickworkSpec(layout, D)
            exact_weightings = [AQECWeighting(f) for f in (0, 1, 2)]
            exact_weightings += [QECWeighting(d) for d in range(1, min(3, spec.n) + 1)]
            for w in exact_weightings:
                dp = statmech.partition_function(spec, w, exact=True, factor=factor).exact
                ref = domainwall.enumerate_trajectories(spec, w, exact=True).exact
                cases += 1
                if dp != ref:
                    mismatches.append((layout, D, w))
            for f in (0.3, 0.7, 1.5):
                w = AQECWeighting(f)
                dp = statmech.partition_function(spec, w, factor=factor).value
                ref = domainwall.enumerate_trajectories(spec, w).value
                cases += 1
                rel = abs(dp - ref) / abs(ref)
                float_worst = max(float_worst, rel)
                if rel > 1e-12:
                    mismatches.append((layout, D, w))
    anchor = statmech.partition_function(
        BrickworkSpec(BlockLayout(1, 2, 2), 1), AQECWeighting(1), exact=True, factor=factor
    ).exact
    ok = not mismatches and anchor == Fraction(144, 25)
    detail = (f"{cases} cases, {len(mismatches)} mismatches, worst float rel err {float_worst:.2e}, "
              f"anchor Z={anchor}")
    return ok, detail


def check_monotonicity(factor=TRANSFER_FACTOR):
    # f in {0, 1, 2} runs in rationals: at f = 0 and f = 2 a gate leaves Z
    # exactly unchanged, and float round-off would show up as fake increases.
    worst = -math.inf
    checked = 0
    for layout in small_layouts(8, 4):
        if layout.n not in (4, 6, 8):
            continue
        spec = BrickworkSpec(layout, 8)
        for fs, exact in (((0, 1, 2), True), ((0.5, 1.5), False)):
            profile = statmech.gate_profile(spec, [AQECWeighting(f) for f in fs], exact=exact, factor=factor)
            steps = np.diff(profile, axis=1)
            worst = max(worst, float(steps.max()))
            checked += steps.size
    ok = worst <= 1e-12
    return ok, f"{checked} gate steps, largest increase {worst:.3e}"


def check_convergence():
    layout = BlockLayout(1, 2, 2)
    target = statmech.z_infinity_aqec(4, 2, 1, exact=True)
    depths = list(range(1, 65))
    prof = statmech.depth_profile(layout, depths, AQECWeighting(1), exact=True)
    gaps = [prof[D].exact - target for D in depths]
    positive = all(g > 0 for g in gaps)
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    ratio = gaps[63] / gaps[7]
    ok = positive and decreasing and ratio <= Fraction(1, 100)
    return ok, (f"Z_inf={target}, gap(8)={float(gaps[7]):.3e}, gap(64)={float(gaps[63]):.3e}, "
                f"ratio={float(ratio):.3e}, positive={positive}, decreasing={decreasing}")


BOUND_DEPTHS = (1, 2, 4, 8, 16, 32, 64, 128)


def check_depth_bounds(max_n: int = 20, depths=BOUND_DEPTHS):
    aqec_points = qec_points = 0
    violations = []
    tightest = math.inf
    for layout in small_layouts(max_n):
        n, k, a, b = layout.n, layout.k, layout.a, layout.b
        f_max = 1.0 - a / b
        fs = sorted({f for f in (0.0, 0.25, 0.5, 0.75, f_max) if f <= f_max})
        weightings = [AQECWeighting(f) for f in fs] + [QECWeighting(d) for d in (1, 2, 3) if d <= n]
        masses = statmech.depth_masses(layout, depths)
        for D in depths:
            for w in weightings:
                z = statmech.partition_from_masses(masses[D], w, n, k)
                if isinstance(w, AQECWeighting):
                    bound = statmech.aqec_depth_bound(n, k, b, D, w.f)
                    aqec_points += 1
                else:
                    bound = statmech.qec_depth_bound(n, k, b, w.d, D)
                    qec_points += 1
                if z > bound * (1 + 1e-12):
                    violations.append((layout, D, w, z, bound))
                elif math.isfinite(bound) and bound > 0:
                    tightest = min(tightest, bound / z if z > 0 else math.inf)
    ok = not violations
    return ok, (f"{aqec_points} AQEC and {qec_points} QEC points, {len(violations)} violations, "
                f"smallest finite bound/Z ratio {tightest:.4g}")


def check_final_weight_bound():
    worst = 0.0
    count = 0
    for w, d, f in itertools.product(range(1, 65), range(1, 9), (0.25, 0.5, 0.75)):
        lhs, rhs = statmech.final_weight_bound(w, d, f)
        worst = max(worst, lhs / rhs)
        count += 1
    return worst <= 1.0, f"{count} points, max lhs/rhs = {worst:.4f}"


def check_twirl(samples: int = 100_000, seed: int = ACCEPTANCE_SEED):
    rng = np.random.default_rng(seed)
    lines = []
    ok = True
    for d in (2, 4):
        zero = np.zeros((d * d, d * d))
        zero[0, 0] = 1.0
        for label, op in (("I", np.eye(d * d)), ("S", choi.swap_operator(d)), ("|00><00|", zero)):
            est = choi.clifford_twirl_empirical(op, d, samples, rng)
            alpha, beta = choi.haar_second_moment_coeffs(op)
            target = alpha * np.eye(d * d) + beta * choi.swap_operator(d)
            dist = float(np.linalg.norm(est.mean - target))
            limit = 5.0 * est.error_scale() + 1e-12
            ok &= dist <= limit
            lines.append(f"d={d} {label}: {dist:.2e}<={limit:.2e}")
    return ok, "; ".join(lines)


def check_channel_trace_identities(count: int = 20, seed: int = ACCEPTANCE_SEED):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        p = rng.dirichlet(np.ones(4))
        ids = choi.single_qubit_identities(p)
        ap, bp = choi.alpha_beta_prime(ids.lam)
        errs = [
            abs(ids.trace - 4.0),
            abs(ids.trace_with_swap - 4.0 * ids.lam),
            abs(ids.alpha_prime - ap),
            abs(ids.beta_prime - bp),
            abs(4 * ids.alpha_prime + 2 * ids.beta_prime - 4.0),
            abs((2 * ids.alpha_prime + 4 * ids.beta_prime) / (4 * ids.alpha_prime + 2 * ids.beta_prime) - ids.lam),
            choi.pauli_channel(p, 1).completeness_error(),
            choi.pauli_complementary_channel(p, 1).completeness_error(),
        ]
        worst = max(worst, max(errs))
    return worst <= 1e-10, f"{count} random noise vectors, worst deviation {worst:.2e}"


def check_second_moment(samples: int = 20_000, seed: int = ACCEPTANCE_SEED, workers: int | None = None):
    layout = BlockLayout(1, 2, 2)
    noises = {"noiseless": statmech.PauliNoise(1.0, 0.0, 0.0, 0.0), "f=1": choi.depolarizing_for_f(1.0)}
    ok = True
    parts = []
    for label, noise in noises.items():
        for D in (1, 2, 4):
            spec = BrickworkSpec(layout, D)
            est = choi.second_moment_sample(spec, noise, samples, seed, workers=workers)
            dp = statmech.partition_function(spec, AQECWeighting(noise.f)).value
            diff = abs(est.mean - dp)
            limit = 4.0 * est.stderr + 1e-10
            ok &= diff <= limit
            parts.append(f"{label} D={D}: mc={est.mean:.5f}+-{est.stderr:.1e} dp={dp:.5f} |diff|={diff:.1e}<={limit:.1e}")
    return ok, "; ".join(parts)


def check_exact_ec(circuits: int = 200, samples: int = 2000, seed: int = ACCEPTANCE_SEED,
                   workers: int | None = None):
    rng = np.random.default_rng(seed)
    layouts = small_layouts(8, 8)
    disagreements = 0
    light_cone = 0
    for i in range(circuits):
        layout = layouts[i % len(layouts)]
        D = int(rng.integers(1, 5))
        u = sample_circuit(BrickworkSpec(layout, D), rng)
        for d in (1, 2, 3):
            if bool(codecheck.is_code(u, layout, d)) != codecheck.forward_enumeration_check(u, layout, d):
                disagreements += 1
        report = codecheck.code_distance(u, layout, 2 * D + 1)
        if report.distance is None or report.distance > 2 * D:
            light_cone += 1
    spec = BrickworkSpec(BlockLayout(1, 4, 4), 16)
    est = codecheck.estimate_failure_probability(spec, 1, samples, seed, workers=workers)
    z_qec = statmech.partition_function(spec, QECWeighting(1)).value
    enc, enc_layout = codecheck.four_two_two_encoder()
    dist = codecheck.code_distance(enc, enc_layout, 4).distance
    ok = disagreements == 0 and light_cone == 0 and est.mean <= z_qec + 4 * est.stderr and dist == 2
    return ok, (f"{disagreements} is_code/forward disagreements over {circuits} circuits, "
                f"{light_cone} light-cone violations, P(F)={est.mean:.4f}+-{est.stderr:.4f} "
                f"vs Z_QEC={z_qec:.4f}, [[4,2,2]] distance {dist}")


SCAN_NS = tuple(2**j for j in range(6, 13))


def check_scan():
    alpha = statmech.choose_alpha(SCAN_NS, 1, 2)
    table = statmech.scan_exact_threshold(SCAN_NS, 1, 2, alpha=alpha)
    ok = table.strictly_decreasing and table.rows[-1].below_one
    bounds = ", ".join(f"{r.bound:.3g}" for r in table.rows)
    return ok, f"alpha={alpha:g}, bounds over n=64..4096: {bounds}"


DETERMINISM_COMMANDS = (
    ["zfunc", "--a", "1", "--b", "2", "--m", "2", "--depth", "0,1,2", "--f", "0.5,1"],
    ["bounds", "--a", "1", "--b", "2", "--m", "2,4", "--depth", "8,64", "--f", "0.25", "--d", "1"],
    ["sample", "--a", "1", "--b", "2", "--m", "3", "--depth", "1,2", "--d", "1", "--samples", "40",
     "--seed", "11"],
    ["mc-choi", "--a", "1", "--b", "2", "--m", "2", "--depth", "1", "--f", "1", "--samples", "40",
     "--seed", "11"],
)


def _run_cli(argv) -> tuple[int, bytes]:
    from brickqec import cli

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = cli.main(argv)
    return code, buf.getvalue().encode()


def check_determinism():
    bad = []
    for argv in DETERMINISM_COMMANDS:
        outputs = set()
        for workers in ("1", "1", "2"):
            for fmt in ("csv",):
                code, out = _run_cli(list(argv) + ["--workers", workers, "--format", fmt])
                if code != 0:
                    bad.append(f"{argv[0]} exit {code}")
                outputs.add(out)
        if len(outputs) != 1:
            bad.append(f"{argv[0]} output differs")
    return not bad, (f"{len(DETERMINISM_COMMANDS)} commands x 3 runs (workers 1, 1, 2): "
                     + ("identical" if not bad else ", ".join(bad)))


# ------------------------------------------------------------------ driver


CRITERIA = {
    1: ("oracle equivalence", 60.0),
    2: ("gate-by-gate monotonicity", 30.0),
    3: ("infinite-depth convergence", 5.0),
    4: ("AQEC/QEC depth-bound inequalities", 120.0),
    5: ("final-weight bound", 1.0),
    6: ("Clifford twirl", 30.0),
    7: ("single-qubit trace identities", 5.0),
    8: ("second moment: Monte Carlo vs DP", 300.0),
    9: ("exact error correction", 300.0),
    10: ("distance scan trend", 1.0),
    11: ("determinism", None),
}


def run_criterion(number: int, factor=TRANSFER_FACTOR, workers: int | None = None) -> CriterionResult:
    name, budget = CRITERIA[number]
    fns = {
        1: lambda: check_oracle_equivalence(factor),
        2: lambda: check_monotonicity(factor),
        3: check_convergence,
        4: check_depth_bounds,
        5: check_final_weight_bound,
        6: check_twirl,
        7: check_channel_trace_identities,
        8: lambda: check_second_moment(workers=workers),
        9: lambda: check_exact_ec(workers=workers),
        10: check_scan,
        11: check_determinism,
    }
    return _timed(number, name, budget, fns[number])


def run_all(numbers=None, factor=TRANSFER_FACTOR, workers: int | None = None, echo=None) -> list[CriterionResult]:
    results = []
    for number in numbers or sorted(CRITERIA):
        res = run_criterion(number, factor=factor, workers=workers)
        if echo is not None:
            echo(res)
        results.append(res)
    return results
