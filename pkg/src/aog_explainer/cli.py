"""Command-line driver: oracle -> spectrum -> prune / baseline -> And-Or graph -> metrics.

Exit codes: 0 ok, 1 metric or invariant failure, 2 configuration or i/o
error, 3 oracle error.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import ExitStack

import numpy as np

from . import aog as aogmod
from .errors import AogError, ConfigError, IntegrityError, OracleError
from .harsanyi import compute_spectrum, spectra_batch, spectrum_to_dict
from .io import config_hash, ensure_dir, read_json, read_matrix, write_csv, write_json
from .lattice import members, popcounts, variable_names
from .metrics import assignment_array, iou_top_m, jaccard, rho_unfaith_batch, sorted_strength_curve
from .oracle import (
    BaselineVector,
    ModelOracle,
    Sample,
    SubprocessBackend,
    SubprocessOracle,
    SyntheticFunction,
    generate_synthetic_suite,
    ground_truth_patterns,
    load_function,
    load_mlp,
    parse_polynomial,
)
from .oracle.synthetic import KINDS
from .sparsify import BaselineOptConfig, PruneConfig, greedy_prune, learn_baseline, tau_from_data
from .verification import verify_axioms, verify_equivalences

EXIT_OK, EXIT_METRIC, EXIT_CONFIG, EXIT_ORACLE = 0, 1, 2, 3
RHO_HARSANYI_BOUND = 1e-10
DEFAULT_MIN_RATIO = 0.7
SPOT_CHECKS = 32
# dividends below this fraction of max|v| count as zero in strength curves
SPARSITY_RTOL = 1e-9

# comparison methods: (tag, method, k)
RHO_METHODS = (
    ("harsanyi", "harsanyi", None),
    ("shapley", "shapley_as_effects", None),
    ("occlusion", "occlusion_as_effects", None),
    ("si", "si", None),
    ("sti2", "sti", 2),
    ("sti3", "sti", 3),
)
IOU_METHODS = (("ours", "harsanyi", None), ("si", "si", None), ("sti2", "sti", 2), ("sti3", "sti", 3))


def _say(msg: str) -> None:
    print(msg, flush=True)


# --- argument parsing ----------------------------------------------------


def _oracle_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("oracle")
    g.add_argument("--oracle", choices=("synthetic", "mlp", "subprocess"), default="synthetic")
    g.add_argument("--function", help="synthetic function JSON file, or a polynomial such as '3*x1 - 2*x2*x3'")
    g.add_argument("--n", type=int, help="variable count (polynomials, subprocess oracles)")
    g.add_argument("--weights", help="MLP weights JSON")
    g.add_argument("--subprocess-cmd", help="command speaking the line-delimited JSON oracle protocol")
    g.add_argument("--timeout", type=float, default=60.0, help="seconds to wait for each subprocess reply")
    g.add_argument("--batch-size", type=int, default=256)


def _sample_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("sample and baseline")
    g.add_argument("--sample", help="CSV of samples, header = variable names")
    g.add_argument("--row", type=int, default=0, help="row of --sample to explain")
    g.add_argument("--x", help="inline sample, comma separated")
    g.add_argument("--baseline", choices=("fixed", "learn"), default="fixed")
    g.add_argument("--baseline-csv", help="CSV whose first row is the fixed baseline (default zeros)")
    g.add_argument("--tau-factor", type=float, default=0.01)
    g.add_argument("--lambda", dest="lam", type=float, default=0.0)
    g.add_argument("--step-size", type=float, default=0.1)
    g.add_argument("--max-iters", type=int, default=50)


def _metric_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--metrics",
        default="",
        help="comma list from rho, iou, jaccard (iou and jaccard need a synthetic oracle)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aog-explainer", description="Harsanyi-dividend explanations as And-Or graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="spectrum JSON and strength curve for one sample")
    _oracle_args(p)
    _sample_args(p)
    _metric_arg(p)

    p = sub.add_parser("explain", help="prune, optionally re-baseline, and build the And-Or graph")
    _oracle_args(p)
    _sample_args(p)
    _metric_arg(p)
    p.add_argument("--max-patterns", type=int)
    p.add_argument("--min-ratio", type=float)
    p.add_argument("--aog", action=argparse.BooleanOptionalAction, default=True)

    p = sub.add_parser("bench", help="mean IoU, unfaithfulness and Jaccard over synthetic suites")
    p.add_argument("--kinds", default="add_mul", help=f"comma list from {', '.join(KINDS)}")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--suite-dir", help="read a suite written by 'synth' instead of generating one")
    p.add_argument("--mlp-weights", nargs="*", default=[], help="MLP weight files checked for unfaithfulness")
    p.add_argument("--sample", help="CSV of samples for --mlp-weights")

    p = sub.add_parser("synth", help="write a synthetic suite to disk")
    p.add_argument("--kind", choices=KINDS, default="add_mul")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--samples", type=int, default=200)

    p = sub.add_parser("verify", help="randomized axiom and derived-index property suites")
    p.add_argument("--trials", type=int, default=100)

    for p in sub.choices.values():
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out", help="output directory")
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "out"}


# --- oracle and sample wiring ------------------------------------------------


class Setup:
    """Resolved model, sample, data matrix and baseline for one run."""

    def __init__(self, args, stack: ExitStack):
        self.args = args
        self.stack = stack
        self.model = None
        self.backend = None
        self.function: SyntheticFunction | None = None
        self._load_model()
        self.names, self.data, self.x = self._load_sample()
        self.n = len(self.x)
        if self.model is not None and getattr(self.model, "n_inputs", self.n) != self.n:
            raise ConfigError(f"sample has {self.n} variables, model expects {self.model.n_inputs}")
        self.r_fixed = self._fixed_baseline()

    def _load_model(self) -> None:
        a = self.args
        if a.oracle == "synthetic":
            if not a.function:
                raise ConfigError("--oracle synthetic needs --function")
            f = load_function(a.function) if os.path.exists(a.function) else parse_polynomial(a.function, a.n)
            self.model = self.function = f
        elif a.oracle == "mlp":
            if not a.weights:
                raise ConfigError("--oracle mlp needs --weights")
            self.model = load_mlp(a.weights)
        else:
            if not a.subprocess_cmd:
                raise ConfigError("--oracle subprocess needs --subprocess-cmd")
            self.backend = self.stack.enter_context(SubprocessBackend(a.subprocess_cmd, timeout=a.timeout))

    def _load_sample(self):
        a = self.args
        data = None
        names = None
        if a.sample:
            names, data = read_matrix(a.sample)
            if not 0 <= a.row < len(data):
                raise ConfigError(f"--row {a.row} out of range for {a.sample} ({len(data)} rows)")
            x = data[a.row]
        elif a.x:
            try:
                x = np.array([float(t) for t in a.x.split(",")])
            except ValueError as exc:
                raise ConfigError(f"--x: {exc}") from exc
        elif self.model is not None and getattr(self.model, "n_inputs", None) and self.function is not None:
            x = np.ones(self.model.n_inputs)
        else:
            raise ConfigError("give --sample or --x")
        n = len(x)
        if a.n is not None and a.n != n and self.function is None:
            raise ConfigError(f"--n {a.n} disagrees with the sample width {n}")
        return list(names or variable_names(n)), data, x

    def _fixed_baseline(self) -> np.ndarray:
        a = self.args
        if a.baseline_csv:
            _, rows = read_matrix(a.baseline_csv)
            if rows.shape[1] != self.n:
                raise ConfigError(f"{a.baseline_csv} has {rows.shape[1]} columns, expected {self.n}")
            return rows[0]
        return np.zeros(self.n)

    def oracle(self, r, tau=None, r_init=None):
        sample = Sample(self.x, str(self.args.row if self.args.sample else "inline"))
        baseline = BaselineVector(np.asarray(r, dtype=np.float64), r_init, tau)
        if self.backend is not None:
            return SubprocessOracle(self.backend, sample, baseline, batch_size=self.args.batch_size)
        return ModelOracle(self.model, sample, baseline)


def _resolve_baseline(setup: Setup, out: str, chash: str):
    a = setup.args
    if a.baseline == "fixed":
        return BaselineVector(setup.r_fixed), None
    if setup.data is None:
        raise ConfigError("--baseline learn needs --sample (its rows give the mean start and the variance bound)")
    r_init = setup.data.mean(axis=0)
    tau = tau_from_data(setup.data, a.tau_factor)
    cfg = BaselineOptConfig(a.lam, a.tau_factor, a.step_size, a.max_iters)
    baseline, trace = learn_baseline(lambda r: setup.oracle(r), r_init, tau, cfg, seed=a.seed)
    rows = [(t.iteration, t.unfaith, t.l1, t.objective, t.step_size, *t.r) for t in trace]
    header = ["iter", "unfaith", "l1", "objective", "step_size"] + [f"r_{nm}" for nm in setup.names]
    write_csv(os.path.join(out, "baseline_trace.csv"), header, rows, chash)
    return baseline, trace


def _metric_names(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in names if t not in ("rho", "iou", "jaccard")]
    if bad:
        raise ConfigError(f"unknown metrics: {', '.join(bad)}")
    return names


def _point_metrics(names: list[str], setup: Setup, spec) -> dict:
    out = {}
    v, w = spec.v_table.values, spec.w.values
    if "rho" in names:
        out["rho"] = {tag: float(rho_unfaith_batch(v, assignment_array(m, w, v, k))) for tag, m, k in RHO_METHODS}
    if "iou" in names or "jaccard" in names:
        if setup.function is None:
            raise ConfigError("iou and jaccard need a synthetic oracle with known ground truth")
    if "iou" in names:
        truth = ground_truth_patterns(setup.function, setup.x)
        out["iou"] = (
            {tag: iou_top_m(assignment_array(m, w, v, k), truth) for tag, m, k in IOU_METHODS} if truth else None
        )
    if "jaccard" in names:
        truth = _truth_table(setup.function, setup.x)
        out["jaccard"] = None if truth is None else jaccard(w, truth)
    return out


def _truth_table(f: SyntheticFunction, x) -> np.ndarray | None:
    if f.kind not in ("add_mul", "add_mul_coeff"):
        return None
    table = np.zeros(1 << f.n)
    for m, c in f.truth_spectrum(np.asarray(x)).items():
        table[m] = c
    return table


def _write_spectrum(spec, setup: Setup, out: str, chash: str) -> None:
    doc = spectrum_to_dict(spec)
    doc["baseline"] = [float(t) for t in spec.provenance.get("r", [])] or None
    write_json(os.path.join(out, "spectrum.json"), doc, chash)
    write_csv(
        os.path.join(out, "strength_curve.csv"),
        ["rank", "abs_w", "mask"],
        sorted_strength_curve(spec),
        chash,
    )


def _spectrum(setup: Setup, baseline: BaselineVector):
    spec = compute_spectrum(setup.oracle(baseline.r), batch_size=setup.args.batch_size, variables=setup.names)
    spec.provenance["r"] = [float(t) for t in baseline.r]
    return spec


# --- subcommands -------------------------------------------------------------


def cmd_extract(args) -> int:
    out = ensure_dir(args.out)
    chash = config_hash(_config(args))
    names = _metric_names(args.metrics)
    with ExitStack() as stack:
        setup = Setup(args, stack)
        baseline, _ = _resolve_baseline(setup, out, chash)
        spec = _spectrum(setup, baseline)
        _write_spectrum(spec, setup, out, chash)
        if names:
            write_json(os.path.join(out, "metrics.json"), _point_metrics(names, setup, spec), chash)
    nnz = int(np.count_nonzero(spec.w.values))
    _say(f"extract: n={spec.n} v(x)={spec.v_full:.6g} nonzero_effects={nnz} -> {out}")
    return EXIT_OK


def _explanation_doc(expl, names) -> dict:
    w = expl.w.values
    return {
        "n": expl.n,
        "variables": list(names),
        "omega": [
            {"mask": m, "members": [names[i] for i in members(m)], "w": float(w[m])}
            for m in sorted(expl.omega, key=lambda m: (-abs(w[m]), m))
        ],
        "size": expl.size,
        "delta": expl.delta,
        "unfaith": expl.unfaith,
        "r_omega": expl.r_omega,
        "v_full": expl.v_full,
        "satisfied": expl.satisfied,
        "provenance": dict(expl.provenance),
    }


def cmd_explain(args) -> int:
    out = ensure_dir(args.out)
    chash = config_hash(_config(args))
    names = _metric_names(args.metrics)
    min_ratio = args.min_ratio
    if args.max_patterns is None and min_ratio is None:
        min_ratio = DEFAULT_MIN_RATIO
    cfg = PruneConfig(args.max_patterns, min_ratio)
    status = EXIT_OK
    with ExitStack() as stack:
        setup = Setup(args, stack)
        baseline, _ = _resolve_baseline(setup, out, chash)
        spec = _spectrum(setup, baseline)
        _write_spectrum(spec, setup, out, chash)
        expl, trace = greedy_prune(spec, cfg)
        write_json(os.path.join(out, "explanation.json"), _explanation_doc(expl, setup.names), chash)
        write_csv(
            os.path.join(out, "removal_trace.csv"),
            ["step", "mask", "unfaith", "r_omega", "l1", "delta", "size"],
            [(t.step, t.mask, t.unfaith, t.r_omega, t.l1, t.delta, t.size) for t in trace],
            chash,
        )
        if names:
            write_json(os.path.join(out, "metrics.json"), _point_metrics(names, setup, spec), chash)
    if args.aog and expl.size:
        g, build = aogmod.build_from_explanation(expl, setup.names, {"config_hash": chash})
        with open(os.path.join(out, "aog.json"), "w") as fh:
            fh.write(aogmod.to_json(g))
        with open(os.path.join(out, "aog.dot"), "w") as fh:
            fh.write(aogmod.to_dot(g))
        write_csv(
            os.path.join(out, "aog_build_trace.csv"),
            ["step", "alpha", "members", "gain", "total", "shared"],
            [(b.step, b.alpha, " ".join(setup.names[i] for i in members(b.alpha)), b.gain, b.total, b.shared) for b in build],
            chash,
        )
        rng = np.random.default_rng(args.seed)
        masks = rng.integers(0, 1 << expl.n, size=SPOT_CHECKS)
        predicted = expl.predict()
        scale = max(1.0, float(np.max(np.abs(predicted))))
        worst = max(abs(aogmod.evaluate_aog(g, int(s)) - predicted[s]) for s in masks)
        if worst > 1e-9 * scale:
            _say(f"explain: And-Or graph disagrees with the pattern subset sums by {worst:.3e}")
            status = EXIT_METRIC
        _say(f"explain: coalitions={len(g.coalitions)} description_length={build[-1].total + 0.0:.6g}")
    elif args.aog:
        _say("explain: no patterns retained, And-Or graph skipped")
    _say(
        f"explain: patterns={expl.size} r_omega={expl.r_omega:.6f} unfaith={expl.unfaith:.6g} "
        f"satisfied={expl.satisfied} -> {out}"
    )
    return status


def _interacting(w: np.ndarray) -> np.ndarray:
    """Rows with a nonzero dividend of order 2 or more."""
    n = w.shape[-1].bit_length() - 1
    high = popcounts(n) >= 2
    scale = np.maximum(1.0, np.max(np.abs(w), axis=-1, keepdims=True))
    return np.any((np.abs(w) > 1e-12 * scale) & high, axis=-1)


def _assignments(v: np.ndarray, w: np.ndarray) -> dict[str, np.ndarray]:
    return {tag: assignment_array(m, w, v, k) for tag, m, k in RHO_METHODS}


def _rho_block(v: np.ndarray, w: np.ndarray, tables: dict | None = None) -> tuple[dict, dict]:
    """Per-row unfaithfulness for every method and strict-ordering violations.

    Harsanyi must beat a method on every row with an order >= 2 interaction,
    unless the method's table coincides with the dividends on that row.
    """
    tables = tables or _assignments(v, w)
    rhos = {tag: rho_unfaith_batch(v, tables[tag]) for tag, _, _ in RHO_METHODS}
    inter = _interacting(w)
    viol = {}
    scale = np.maximum(1.0, np.max(np.abs(w), axis=-1))
    for tag, _, _ in RHO_METHODS[1:]:
        same = np.max(np.abs(tables[tag] - w), axis=-1) <= 1e-9 * scale
        viol[tag] = int(np.sum(inter & ~same & ~(rhos["harsanyi"] < rhos[tag])))
    return rhos, viol


def _load_suite(path: str) -> list[tuple[SyntheticFunction, np.ndarray]]:
    manifest = read_json(os.path.join(path, "suite.json"))
    suite = []
    for entry in manifest.get("files", []):
        f = load_function(os.path.join(path, entry["function"]))
        _, X = read_matrix(os.path.join(path, entry["samples"]))
        suite.append((f, X))
    return suite


def bench_suite(kind: str, suite) -> dict:
    """Aggregate metrics for one suite (also used by the acceptance tests)."""
    iou = {tag: [] for tag, _, _ in IOU_METHODS}
    rho = {tag: [] for tag, _, _ in RHO_METHODS}
    jac = []
    viol = {tag: 0 for tag, _, _ in RHO_METHODS[1:]}
    rho_max = 0.0
    n_samples = 0
    over_terms = 0
    for f, X in suite:
        v, w = spectra_batch(f, X, np.zeros(f.n))
        n_samples += len(X)
        if f.kind in ("add_mul", "add_mul_coeff"):
            tol = SPARSITY_RTOL * np.max(np.abs(v), axis=1, keepdims=True)
            over_terms += int(np.sum(np.count_nonzero(np.abs(w) > tol, axis=1) > len(f.terms)))
        tables = _assignments(v, w)
        rows, bad = _rho_block(v, w, tables)
        for tag in rho:
            rho[tag].extend(rows[tag].tolist())
        for tag in viol:
            viol[tag] += bad[tag]
        rho_max = max(rho_max, float(np.max(rows["harsanyi"])))
        tables["ours"] = tables["harsanyi"]
        for b, x in enumerate(X):
            truth = ground_truth_patterns(f, x)
            if truth:
                for tag in iou:
                    iou[tag].append(iou_top_m(tables[tag][b], truth))
            ref = _truth_table(f, x)
            if ref is not None:
                jac.append(jaccard(w[b], ref))
    mean = lambda xs: float(np.mean(xs)) if xs else None  # noqa: E731
    return {
        "kind": kind,
        "functions": len(suite),
        "samples": n_samples,
        "samples_with_truth": len(iou["ours"]),
        "iou": {tag: mean(xs) for tag, xs in iou.items()},
        "rho": {tag: mean(xs) for tag, xs in rho.items()},
        "rho_harsanyi_max": rho_max,
        "jaccard": mean(jac),
        "strict_violations": viol,
        "samples_over_term_count": over_terms,
    }


def bench_mlp(path: str, X: np.ndarray) -> dict:
    model = load_mlp(path)
    if X.shape[1] != model.n_inputs:
        raise ConfigError(f"samples have {X.shape[1]} columns, {path} expects {model.n_inputs}")
    v, w = spectra_batch(model, X, np.zeros(model.n_inputs))
    rows, bad = _rho_block(v, w)
    return {
        "weights": path,
        "samples": len(X),
        "rho": {tag: float(np.mean(r)) for tag, r in rows.items()},
        "rho_harsanyi_max": float(np.max(rows["harsanyi"])),
        "strict_violations": bad,
    }


def cmd_bench(args) -> int:
    out = ensure_dir(args.out)
    chash = config_hash(_config(args))
    rng = np.random.default_rng(args.seed)
    reports = []
    if args.suite_dir:
        manifest = read_json(os.path.join(args.suite_dir, "suite.json"))
        reports.append(bench_suite(manifest.get("kind", "suite"), _load_suite(args.suite_dir)))
    else:
        kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
        for kind in kinds:
            if kind not in KINDS:
                raise ConfigError(f"unknown synthetic kind {kind!r}")
            seed = int(rng.integers(2**31))
            suite = generate_synthetic_suite(kind, args.count, args.n, seed, args.samples) if args.count else []
            reports.append(bench_suite(kind, suite))
    mlps = []
    if args.mlp_weights:
        if not args.sample:
            raise ConfigError("--mlp-weights needs --sample")
        _, X = read_matrix(args.sample)
        mlps = [bench_mlp(p, X) for p in args.mlp_weights]
    write_json(os.path.join(out, "bench.json"), {"suites": reports, "mlps": mlps}, chash)
    rows = []
    for r in reports:
        for group in ("iou", "rho"):
            for tag, val in r[group].items():
                rows.append((r["kind"], group, tag, "" if val is None else val))
        rows.append((r["kind"], "jaccard", "ours", "" if r["jaccard"] is None else r["jaccard"]))
    for m in mlps:
        for tag, val in m["rho"].items():
            rows.append((m["weights"], "rho", tag, val))
    write_csv(os.path.join(out, "bench.csv"), ["suite", "metric", "method", "value"], rows, chash)

    status = EXIT_OK
    for r in reports + mlps:
        label = r.get("kind") or r.get("weights")
        if "iou" in r and r["samples_with_truth"]:
            ious = " ".join(f"{t}={v:.4f}" for t, v in r["iou"].items())
            _say(f"bench {label}: samples={r['samples']} iou {ious}")
        if r["samples"]:
            rhos = " ".join(f"{t}={v:.3e}" for t, v in r["rho"].items())
            _say(f"bench {label}: rho {rhos}")
        if r.get("jaccard") is not None:
            _say(f"bench {label}: jaccard={r['jaccard']:.12f} samples_over_term_count={r['samples_over_term_count']}")
        if r["samples"] and (r["rho_harsanyi_max"] >= RHO_HARSANYI_BOUND or any(r["strict_violations"].values())):
            _say(f"bench {label}: FAIL rho_harsanyi_max={r['rho_harsanyi_max']:.3e} violations={r['strict_violations']}")
            status = EXIT_METRIC
    if not reports and not mlps:
        _say("bench: empty suite")
    return status


def cmd_synth(args) -> int:
    out = ensure_dir(args.out)
    chash = config_hash(_config(args))
    suite = generate_synthetic_suite(args.kind, args.count, args.n, args.seed, args.samples)
    ensure_dir(os.path.join(out, "functions"))
    ensure_dir(os.path.join(out, "samples"))
    files = []
    for k, (f, X) in enumerate(suite):
        fn = os.path.join("functions", f"f{k:03d}.json")
        sn = os.path.join("samples", f"f{k:03d}.csv")
        write_json(os.path.join(out, fn), f.to_dict(), chash)
        write_csv(os.path.join(out, sn), variable_names(f.n), X.tolist(), chash)
        files.append({"function": fn, "samples": sn, "terms": len(f.terms), "clauses": len(f.clauses)})
    write_json(
        os.path.join(out, "suite.json"),
        {"kind": args.kind, "count": args.count, "n": args.n, "seed": args.seed, "files": files},
        chash,
    )
    _say(f"synth: {len(suite)} {args.kind} functions -> {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    out = ensure_dir(args.out)
    chash = config_hash(_config(args))
    axioms = verify_axioms(trials=args.trials, seed=args.seed)
    equivalences = verify_equivalences(trials=max(1, args.trials // 2), seed=args.seed)
    write_json(os.path.join(out, "verify.json"), {"axioms": axioms.to_dict(), "equivalences": equivalences.to_dict()}, chash)
    for line in axioms.lines() + equivalences.lines():
        _say(line)
    return EXIT_OK if axioms.passed() and equivalences.passed() else EXIT_METRIC


COMMANDS = {
    "extract": cmd_extract,
    "explain": cmd_explain,
    "bench": cmd_bench,
    "synth": cmd_synth,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except OracleError as exc:
        print(f"aog-explainer: oracle error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except IntegrityError as exc:
        print(f"aog-explainer: integrity failure: {exc} (residual {exc.residual:.3e})", file=sys.stderr)
        return EXIT_METRIC
    except (ConfigError, OSError) as exc:
        print(f"aog-explainer: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AogError as exc:
        print(f"aog-explainer: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
