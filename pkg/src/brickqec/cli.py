"""Command-line front end.

Every subcommand accepts its options as flags or from a JSON file given with
``--config`` (flags win). Records go to stdout, or to ``--output``, as CSV or
JSON lines with floats written to 17 significant digits.

Exit codes: 0 success, 1 a check failed, 2 invalid configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

from brickqec import __version__, acceptance, choi, codecheck, domainwall, statmech
from brickqec.brickwork import BlockLayout, BrickworkSpec, LayoutError, sample_circuit, task_rng
from brickqec.parallel import default_workers
from brickqec.statmech import AQECWeighting, ErasureNoise, ParameterError, PauliNoise, QECWeighting

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID = 0, 1, 2
DEFAULT_SEED = 12345

ZFUNC_COLUMNS = ["n", "k", "a", "b", "m", "D", "s", "f", "lambda", "weighting", "d",
                 "Z", "Z_exact", "Z_inf", "bound", "choi_bound", "note"]
BOUNDS_COLUMNS = ["n", "k", "a", "b", "m", "D", "f", "lambda", "d", "r", "Z_inf_aqec", "aqec_bound",
                  "choi_bound", "Z_inf_qec", "qec_bound", "c", "informal_scaling"]
ORACLE_COLUMNS = ["n", "k", "a", "b", "m", "D", "weighting", "f", "d", "Z_dp", "Z_oracle", "rel_err",
                  "exact_match", "survivor_total_ok", "annihilating_le_Z_inf"]
SAMPLE_COLUMNS = ["n", "a", "b", "m", "D", "d", "N", "mean", "stderr", "seed", "z_qec_bound"]
DISTANCE_COLUMNS = ["index", "n", "a", "b", "m", "D", "seed", "distance", "at_least", "witness_mu",
                    "witness_nu_logical", "witness_nu_ancilla", "tableau"]
MC_COLUMNS = ["n", "k", "a", "b", "m", "D", "s", "f", "lambda", "weighting", "Z", "Z_inf", "bound",
              "choi_bound", "mc_mean", "mc_stderr", "N", "seed", "agree"]
SCAN_COLUMNS = ["n", "k", "a", "b", "d", "D", "alpha", "Z_inf_qec", "bound", "below_one"]


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.detail = message


# ------------------------------------------------------------- formatting


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_value(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        return format(value, ".17g")
    return json.dumps(value)


def render(records: list[dict], columns: list[str], fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for rec in records:
            writer.writerow([_fmt(rec.get(c)) for c in columns])
    else:
        for rec in records:
            body = ",".join(f"{json.dumps(c)}:{_json_value(rec.get(c))}" for c in columns)
            buf.write("{" + body + "}\n")
    return buf.getvalue()


# ------------------------------------------------------------- configuration


def _int_list(text) -> list[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    if isinstance(text, int):
        return [text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def _float_list(text) -> list[float]:
    if isinstance(text, list):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    return [float(v) for v in str(text).split(",") if v.strip()]


@dataclass
class RunConfig:
    a: int
    b: int
    ms: list[int]
    depths: list[int]
    fs: list[float]
    weighting: str
    ds: list[int]
    noise: object | None
    seed: int
    samples: int
    workers: int
    fmt: str
    output: str | None

    def layouts(self) -> list[BlockLayout]:
        return [BlockLayout(self.a, self.b, m) for m in self.ms]


def _merged(args: argparse.Namespace) -> dict:
    values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config", "top level must be a JSON object")
        known = {k for k in vars(args) if k not in ("config", "func")}
        for key, val in loaded.items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(key, f"not an option of this command (known: {', '.join(sorted(known))})")
            values[key] = val
    for key, val in vars(args).items():
        if val is not None and key not in ("config", "func"):
            values[key] = val
    return values


def _get(values: dict, key: str, conv, default=None):
    raw = values.get(key, default)
    if raw is None:
        return None
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, f"cannot parse {raw!r}: {exc}") from exc


def _noise_from(values: dict):
    kind = values.get("noise")
    params = values.get("noise_params")
    if kind is None:
        return None
    if params is None:
        raise ConfigError("noise_params", f"noise kind {kind!r} needs --noise-params")
    probs = _get(values, "noise_params", _float_list)
    if kind == "pauli":
        if len(probs) != 4:
            raise ConfigError("noise_params", "Pauli noise needs four probabilities p_I,p_X,p_Y,p_Z")
        return PauliNoise(*probs)
    if kind == "erasure":
        if len(probs) != 1:
            raise ConfigError("noise_params", "erasure noise needs one probability")
        return ErasureNoise(probs[0])
    raise ConfigError("noise", f"unknown noise kind {kind!r}")


def build_config(args: argparse.Namespace, need_layout: bool = True) -> RunConfig:
    values = _merged(args)
    a = _get(values, "a", int, 1)
    b = _get(values, "b", int, 2)
    ms = _get(values, "m", _int_list, "2")
    depths = _get(values, "depth", _int_list, "1")
    if any(D < 0 for D in depths):
        raise ConfigError("depth", f"depths must be >= 0, got {depths}")
    if not ms:
        raise ConfigError("m", "need at least one block count")
    try:
        noise = _noise_from(values)
    except ParameterError as exc:
        raise ConfigError("noise_params", exc.detail) from exc
    fs = _get(values, "f", _float_list)
    if fs is None:
        fs = [noise.f] if noise is not None else [1.0]
    for f in fs:
        if not 0.0 <= f <= 2.0:
            raise ConfigError("f", f"noise strength must lie in [0, 2], got {f}")
    weighting = str(values.get("weighting", "aqec"))
    if weighting not in ("aqec", "qec"):
        raise ConfigError("weighting", f"must be 'aqec' or 'qec', got {weighting!r}")
    ds = _get(values, "d", _int_list, "1")
    if any(d < 1 for d in ds):
        raise ConfigError("d", f"distance parameters must be >= 1, got {ds}")
    seed = _get(values, "seed", int, DEFAULT_SEED)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed", f"seed must be a 64-bit unsigned integer, got {seed}")
    samples = _get(values, "samples", int, 1000)
    if samples < 1:
        raise ConfigError("samples", f"need at least one sample, got {samples}")
    workers = _get(values, "workers", int, default_workers())
    if workers < 1:
        raise ConfigError("workers", f"need at least one worker, got {workers}")
    fmt = str(values.get("format", "csv"))
    if fmt not in ("csv", "jsonl"):
        raise ConfigError("format", f"must be 'csv' or 'jsonl', got {fmt!r}")
    cfg = RunConfig(a, b, ms, depths, fs, weighting, ds, noise, seed, samples, workers, fmt,
                    values.get("output"))
    if need_layout:
        try:
            cfg.layouts()
        except LayoutError as exc:
            raise ConfigError(exc.field, exc.detail) from exc
    return cfg


def _emit(cfg: RunConfig, records: list[dict], columns: list[str]) -> None:
    text = render(records, columns, cfg.fmt)
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _layout_fields(layout: BlockLayout) -> dict:
    return {"n": layout.n, "k": layout.k, "a": layout.a, "b": layout.b, "m": layout.m}


# ------------------------------------------------------------------ commands


def _aqec_bound_or_none(layout: BlockLayout, D: int, f: float):
    if f > 1.0 - layout.rate + 1e-12:
        return None
    return statmech.aqec_depth_bound(layout.n, layout.k, layout.b, D, f)


def cmd_zfunc(args) -> int:
    cfg = build_config(args)
    records = []
    if 0 in cfg.depths:
        _warn("depth 0 is below 1-design depth; values are computed but the Choi bound does not apply")
    for layout in cfg.layouts():
        if cfg.weighting == "aqec":
            weightings = [AQECWeighting(f) for f in cfg.fs]
        else:
            weightings = [QECWeighting(d) for d in cfg.ds]
        for w in weightings:
            exact = w.is_dyadic
            if isinstance(w, AQECWeighting):
                w = AQECWeighting(int(w.f)) if exact else w
            for D, res in statmech.depth_profile(layout, cfg.depths, w, exact=exact).items():
                rec = _layout_fields(layout) | {"D": D, "s": res.gates, "weighting": w.label(),
                                                "Z": res.value, "note": "; ".join(res.notes) or None}
                rec["Z_exact"] = str(res.exact) if res.exact is not None else None
                if isinstance(w, AQECWeighting):
                    rec |= {"f": float(w.f), "lambda": float(w.lam),
                            "Z_inf": statmech.z_infinity_aqec(layout.n, layout.k, float(w.f)),
                            "bound": _aqec_bound_or_none(layout, D, float(w.f))}
                else:
                    rec |= {"d": w.d, "Z_inf": statmech.z_infinity_qec(layout.n, layout.k, w.d),
                            "bound": statmech.qec_depth_bound(layout.n, layout.k, layout.b, w.d, D)}
                rec["choi_bound"] = statmech.choi_error_bound(res.value) if D >= 1 else None
                records.append(rec)
    _emit(cfg, records, ZFUNC_COLUMNS)
    return EXIT_OK


def cmd_bounds(args) -> int:
    cfg = build_config(args)
    records = []
    for layout in cfg.layouts():
        n, k, b = layout.n, layout.k, layout.b
        r = statmech.r_constant(layout.rate)
        c = args.c if args.c is not None else 2.0 / abs(math.log2(r))
        for f in cfg.fs:
            if f > 1.0 - k / n + 1e-12:
                raise ConfigError("f", f"the AQEC depth bound requires f <= 1 - k/n = {1 - k / n:g}, got {f}")
            for d in cfg.ds:
                for D in cfg.depths:
                    bound = statmech.aqec_depth_bound(n, k, b, D, f)
                    records.append(_layout_fields(layout) | {
                        "D": D, "f": f, "lambda": 2.0 ** (f - 1.0), "d": d, "r": r,
                        "Z_inf_aqec": statmech.z_infinity_aqec(n, k, f),
                        "aqec_bound": bound,
                        "choi_bound": statmech.choi_error_bound(bound),
                        "Z_inf_qec": statmech.z_infinity_qec(n, k, d),
                        "qec_bound": statmech.qec_depth_bound(n, k, b, d, D),
                        "c": c, "informal_scaling": statmech.informal_scaling(n, c, r),
                    })
    _emit(cfg, records, BOUNDS_COLUMNS)
    return EXIT_OK


def cmd_oracle(args) -> int:
    explicit = args.m is not None or args.config is not None
    cfg = build_config(args)
    if explicit:
        specs = [BrickworkSpec(l, D) for l in cfg.layouts() for D in cfg.depths]
    else:
        specs = [BrickworkSpec(l, D) for l in acceptance.small_layouts(8) for D in range(5)]
    for spec in specs:
        if spec.n > domainwall.MAX_ENUM_QUBITS or spec.depth > domainwall.MAX_ENUM_DEPTH:
            raise ConfigError("m" if spec.n > domainwall.MAX_ENUM_QUBITS else "depth",
                              f"enumeration limited to n <= {domainwall.MAX_ENUM_QUBITS} and depth <= "
                              f"{domainwall.MAX_ENUM_DEPTH}, got n={spec.n}, depth={spec.depth}")
    records = []
    failed = False
    for spec in specs:
        weightings = [AQECWeighting(int(f)) if f in (0, 1, 2) else AQECWeighting(f) for f in cfg.fs]
        weightings += [QECWeighting(d) for d in cfg.ds if d <= spec.n]
        for w in weightings:
            exact = w.is_dyadic
            dp = statmech.partition_function(spec, w, exact=exact)
            ref = domainwall.enumerate_trajectories(spec, w, exact=exact)
            parts = domainwall.survivor_breakdown(spec, w, exact=exact)
            match = dp.exact == ref.exact if exact else None
            rel = abs(dp.value - ref.value) / abs(ref.value) if ref.value else abs(dp.value)
            total_ok = (parts.total == ref.exact) if exact else math.isclose(parts.total, ref.value, rel_tol=1e-12)
            annih = None
            if parts.z_inf is not None and spec.depth >= 1:
                annih = float(parts.annihilating_part) <= parts.z_inf + 1e-12
            failed |= (match is False) or rel > 1e-12 or not total_ok or annih is False
            records.append(_layout_fields(spec.layout) | {
                "D": spec.depth, "weighting": w.label(), "f": getattr(w, "f", None), "d": getattr(w, "d", None),
                "Z_dp": dp.value, "Z_oracle": ref.value, "rel_err": rel, "exact_match": match,
                "survivor_total_ok": total_ok, "annihilating_le_Z_inf": annih,
            })
            if records[-1]["f"] is not None:
                records[-1]["f"] = float(records[-1]["f"])
    _emit(cfg, records, ORACLE_COLUMNS)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_sample(args) -> int:
    cfg = build_config(args)
    records = []
    if args.mode == "distance":
        for layout in cfg.layouts():
            for D in cfg.depths:
                spec = BrickworkSpec(layout, D)
                cap = args.cap if args.cap is not None else max(1, 2 * D + 1)
                for i in range(cfg.samples):
                    u = sample_circuit(spec, task_rng(cfg.seed, i))
                    rep = codecheck.code_distance(u, layout, cap)
                    w = rep.witness
                    records.append(_layout_fields(layout) | {
                        "index": i, "D": D, "seed": cfg.seed, "distance": rep.distance, "at_least": rep.at_least,
                        "witness_mu": str(w.mu) if w else None,
                        "witness_nu_logical": w.nu_logical if w else None,
                        "witness_nu_ancilla": w.nu_ancilla if w else None,
                        "tableau": " ".join(u.to_strings()) if args.dump_tableau else None,
                    })
        _emit(cfg, records, DISTANCE_COLUMNS)
        return EXIT_OK
    for layout in cfg.layouts():
        for d in cfg.ds:
            for D in cfg.depths:
                spec = BrickworkSpec(layout, D)
                est = codecheck.estimate_failure_probability(spec, d, cfg.samples, cfg.seed, workers=cfg.workers)
                z = None
                if layout.n <= statmech.DEFAULT_MAX_QUBITS:
                    z = statmech.partition_function(spec, QECWeighting(d)).value
                records.append(_layout_fields(layout) | {
                    "D": D, "d": d, "N": est.samples, "mean": est.mean, "stderr": est.stderr,
                    "seed": cfg.seed, "z_qec_bound": z,
                })
    _emit(cfg, records, SAMPLE_COLUMNS)
    return EXIT_OK


def cmd_mc_choi(args) -> int:
    cfg = build_config(args)
    if cfg.noise is not None and not isinstance(cfg.noise, PauliNoise):
        raise ConfigError("noise", "the dense verifier supports Pauli noise only")
    noises = [cfg.noise] if cfg.noise is not None else [choi.depolarizing_for_f(f) for f in cfg.fs]
    records = []
    failed = False
    for layout in cfg.layouts():
        if layout.n > choi.MAX_DENSE_QUBITS:
            raise ConfigError("m", f"dense verifier limited to n <= {choi.MAX_DENSE_QUBITS}, got n={layout.n}")
        for noise in noises:
            f = noise.f
            for D in cfg.depths:
                if D < 1:
                    raise ConfigError("depth", "Monte Carlo sampling needs depth >= 1")
                spec = BrickworkSpec(layout, D)
                est = choi.second_moment_sample(spec, noise, cfg.samples, cfg.seed, workers=cfg.workers)
                dp = statmech.partition_function(spec, AQECWeighting(f)).value
                agree = abs(est.mean - dp) <= 4.0 * est.stderr + 1e-10
                failed |= not agree
                records.append(_layout_fields(layout) | {
                    "D": D, "s": spec.gate_count, "f": f, "lambda": 2.0 ** (f - 1.0), "weighting": "aqec",
                    "Z": dp, "Z_inf": statmech.z_infinity_aqec(layout.n, layout.k, f),
                    "bound": _aqec_bound_or_none(layout, D, f), "choi_bound": statmech.choi_error_bound(dp),
                    "mc_mean": est.mean, "mc_stderr": est.stderr, "N": est.samples, "seed": cfg.seed,
                    "agree": agree,
                })
    _emit(cfg, records, MC_COLUMNS)
    return EXIT_CHECK_FAILED if (failed and args.check) else EXIT_OK


def cmd_scan(args) -> int:
    cfg = build_config(args, need_layout=False)
    if not 0 < cfg.a < cfg.b:
        raise ConfigError("a", f"need 0 < a < b, got a={cfg.a}, b={cfg.b}")
    n_list = _int_list(args.n_list) if args.n_list else list(acceptance.SCAN_NS)
    alpha = args.alpha if args.alpha is not None else statmech.choose_alpha(n_list, cfg.a, cfg.b)
    table = statmech.scan_exact_threshold(n_list, cfg.a, cfg.b, alpha=alpha)
    records = [{"n": r.n, "k": r.k, "a": cfg.a, "b": cfg.b, "d": r.d, "D": r.depth, "alpha": float(alpha),
                "Z_inf_qec": r.z_inf, "bound": r.bound, "below_one": r.below_one} for r in table.rows]
    _emit(cfg, records, SCAN_COLUMNS)
    trend = "strictly decreasing" if table.strictly_decreasing else "not strictly decreasing"
    print(f"trend: {trend}; reaches below 1: {table.reaches_below_one}", file=sys.stderr)
    if args.c is not None:
        c = args.c
        lhs = c * math.log2(3) + statmech.binary_entropy(c) + cfg.a / cfg.b
        print(f"linear distance d=c*n with c={c:g}: c*log2(3)+H(c)+a/b = {lhs:.6g} "
              f"({'<' if lhs < 1 else '>='} 1)", file=sys.stderr)
    if not table.reaches_below_one:
        print("flag: the bound never drops below 1 on this range", file=sys.stderr)
    return EXIT_OK


def cmd_selftest(args) -> int:
    numbers = _int_list(args.only) if args.only else None
    factor = statmech.TRANSFER_FACTOR if args.mutate_transfer is None else args.mutate_transfer
    if numbers and any(n not in acceptance.CRITERIA for n in numbers):
        raise ConfigError("only", f"criteria are numbered 1..{len(acceptance.CRITERIA)}")

    def echo(res):
        print(res.line(), flush=True)
        print(f"    {res.seconds:.2f} s", file=sys.stderr, flush=True)

    results = acceptance.run_all(numbers, factor=factor, workers=args.workers, echo=echo)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_CHECK_FAILED


# ------------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser, sampling: bool = False) -> None:
    p.add_argument("--config", help="JSON file with any of the options below")
    p.add_argument("--a", type=int, help="logical qubits per block")
    p.add_argument("--b", type=int, help="block size")
    p.add_argument("--m", help="block count(s), comma separated")
    p.add_argument("--depth", help="depth(s), comma separated")
    p.add_argument("--f", help="noise strength(s) f in [0, 2], comma separated")
    p.add_argument("--noise", choices=["pauli", "erasure"], help="derive f from a noise model")
    p.add_argument("--noise-params", help="p_I,p_X,p_Y,p_Z for pauli or p for erasure")
    p.add_argument("--weighting", choices=["aqec", "qec"])
    p.add_argument("--d", help="distance parameter(s) for QEC, comma separated")
    p.add_argument("--format", choices=["csv", "jsonl"])
    p.add_argument("--output", help="write records here instead of stdout")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--workers", type=int, help="worker processes (default from BRICKQEC_WORKERS)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brickqec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zfunc", help="exact partition functions")
    _add_common(p)
    p.set_defaults(func=cmd_zfunc)

    p = sub.add_parser("bounds", help="closed forms and depth bounds")
    _add_common(p)
    p.add_argument("--c", type=float, help="depth constant for the informal scaling (default 2/|log2 r|)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("oracle", help="compare the DP with brute-force enumeration")
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sample", help="failure probability or code distance of sampled encoders")
    _add_common(p)
    p.add_argument("--mode", choices=["failure", "distance"], default="failure")
    p.add_argument("--cap", type=int, help="distance search cap (default 2*depth+1)")
    p.add_argument("--dump-tableau", action="store_true", help="include each tableau in distance mode")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("mc-choi", help="dense Monte Carlo estimate of Z versus the DP")
    _add_common(p)
    p.add_argument("--check", action="store_true", help="exit 1 if any point disagrees beyond 4 standard errors")
    p.set_defaults(func=cmd_mc_choi)

    p = sub.add_parser("scan", help="QEC bound along n with depth proportional to d(n) = ceil(log2 n)")
    _add_common(p)
    p.add_argument("--n-list", help="comma separated n values (default 64,128,...,4096)")
    p.add_argument("--alpha", type=float, help="depth multiplier (default: smallest that works)")
    p.add_argument("--c", type=float, help="also report the rate condition for linear distance d=c*n")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--only", help="comma separated criterion numbers")
    p.add_argument("--workers", type=int)
    p.add_argument("--mutate-transfer", type=float, help="corrupt the per-gate transfer factor (sensitivity check)")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ParameterError, LayoutError) as exc:
        print(f"error: invalid value for '{exc.field}': {exc.detail}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
