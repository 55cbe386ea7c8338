"""Command-line interface: ``qpe {encode,distinguish,validate,family,oracle-check}``."""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from . import harness
from .graphcore import Graph, Graph6Error, parse_graph6, validate_srg, write_graph6
from .groundstate import gs_correlation, gs_positional_encoding, ising_ground_manifold
from .isingcf import IsingModel, PulseSchedule, correlation_closed_form, local_occupation
from .walks import (
    InitSpec,
    ResourceLimitError,
    cqrw1,
    cqrw2,
    default_times,
    qirw2,
    random_times,
    rrwp,
    time_avg_transition,
    xy2_correlations,
)
from .wltest import METHODS, distinguish

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_GUARD = 4
EXIT_ORACLE = 5
EXIT_INPUT = 6

ORACLE_TOL = 1e-9

ENCODE_METHODS = (
    "rrwp",
    "cqrw1",
    "cqrw2",
    "qirw2",
    "xy2",
    "ising-p1",
    "ising-sim",
    "gs-corr",
    "gs-pe",
    "time-avg",
)

# flags that a JSON config may set, with their defaults
CONFIG_KEYS = {
    "method": None,
    "steps": 3,
    "times": "grid",
    "theta": float(np.pi / 4),
    "t": 1.0,
    "layers": 1,
    "delta": 0.5,
    "init": None,
    "seed": 0,
    "format": "json",
    "normalize": False,
    "graphs": 20,
    "n_max": 10,
    "report": False,
}


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


# -- input -------------------------------------------------------------------------


def iter_graph6(path: str) -> Iterator[tuple[int, Optional[Graph], Optional[str]]]:
    """Yield ``(line number, graph or None, error or None)`` one line at a time."""
    stream = sys.stdin if path == "-" else open(path, encoding="ascii", errors="replace")
    try:
        for lineno, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, parse_graph6(line), None
            except Graph6Error as exc:
                yield lineno, None, f"line {lineno}: {exc}"
    finally:
        if stream is not sys.stdin:
            stream.close()


def _resolve_family(name: str) -> tuple[str, list[Graph]]:
    if name in harness.FIXTURES:
        return name, harness.load_fixture(name)
    graphs = []
    for lineno, g, err in iter_graph6(name):
        if err:
            raise CliError(err, EXIT_PARSE)
        graphs.append(g)
    return Path(name).stem, graphs


# -- config --------------------------------------------------------------------------


def run_config(args: argparse.Namespace) -> dict:
    """Serializable view of the effective configuration."""
    cfg = {"command": args.command}
    for key in CONFIG_KEYS:
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    for key in ("inputs", "family"):
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    return cfg


def _apply_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {args.config}: {exc}", EXIT_INPUT) from exc
    if not isinstance(data, dict):
        raise CliError("config must be a JSON object", EXIT_INPUT)
    for key, value in data.items():
        key = key.replace("-", "_")
        if key == "command":
            continue
        if key not in CONFIG_KEYS and key not in ("inputs", "family"):
            raise CliError(f"unknown config key {key!r}", EXIT_INPUT)
        setattr(args, key, value)


def _times(args) -> list[float]:
    spec = str(args.times)
    if spec == "grid":
        return default_times(int(args.steps)).tolist()
    if spec == "random":
        return random_times(int(args.steps), int(args.seed)).tolist()
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(f"bad --times value {spec!r}", EXIT_USAGE) from exc


def _schedule(args) -> PulseSchedule:
    p = int(args.layers)
    if p < 1:
        raise CliError("--layers must be >= 1", EXIT_USAGE)
    times = _times(args) if str(args.times) != "grid" else [float(args.t)] * p
    if len(times) != p:
        raise CliError(f"{len(times)} times given for {p} layers", EXIT_USAGE)
    return PulseSchedule((float(args.theta),) * p, tuple(times))


# -- encode --------------------------------------------------------------------------


def _encode_one(g: Graph, args) -> np.ndarray:
    method = args.method
    if method == "rrwp":
        return rrwp(g, int(args.steps)).values
    if method == "cqrw1":
        return cqrw1(g, _times(args)).values
    if method == "cqrw2":
        return cqrw2(g, _times(args), InitSpec.parse(args.init or "uniform_edges")).values
    if method == "qirw2":
        return qirw2(g, int(args.steps), InitSpec.parse(args.init or "uniform_edges")).values
    if method == "xy2":
        return xy2_correlations(g, float(args.t), InitSpec.parse(args.init or "uniform_edges"))[None]
    if method == "ising-p1":
        return correlation_closed_form(g, IsingModel.uniform(g), float(args.theta), float(args.t))[None]
    if method == "ising-sim":
        from .simulator import correlation_sim

        return correlation_sim(g, IsingModel.uniform(g), _schedule(args))[None]
    if method == "gs-corr":
        return gs_correlation(ising_ground_manifold(g, float(args.delta)))[None]
    if method == "gs-pe":
        c = gs_correlation(ising_ground_manifold(g, float(args.delta)))
        return gs_positional_encoding(c, min(int(args.steps), g.n))[None]
    if method == "time-avg":
        return time_avg_transition(g)[None]
    raise CliError(f"unknown method {method!r}", EXIT_USAGE)


def _tensor_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["graph", "slice", "i", "j", "value"])
    for rec in records:
        values = np.asarray(rec["values"]).reshape(rec["shape"])
        for k, i, j in itertools.product(*map(range, values.shape)):
            w.writerow([rec["index"], k, i, j, harness.format_float(values[k, i, j])])
    return buf.getvalue()


def cmd_encode(args) -> int:
    if args.method not in ENCODE_METHODS:
        raise CliError(f"unknown method {args.method!r}; expected one of {ENCODE_METHODS}", EXIT_USAGE)
    records, errors = [], []
    code = EXIT_OK
    for path in args.inputs:
        for lineno, g, err in iter_graph6(path):
            if err:
                errors.append({"input": path, "line": lineno, "kind": "parse", "message": err})
                code = max(code, EXIT_PARSE)
                continue
            try:
                values = _encode_one(g, args)
            except ResourceLimitError as exc:
                errors.append({"input": path, "line": lineno, "kind": "guard", "message": str(exc)})
                code = max(code, EXIT_GUARD)
                continue
            except ValueError as exc:
                errors.append({"input": path, "line": lineno, "kind": "value", "message": str(exc)})
                code = max(code, EXIT_INPUT)
                continue
            records.append(
                {
                    "index": len(records),
                    "input": path,
                    "line": lineno,
                    "graph6": write_graph6(g),
                    "shape": list(values.shape),
                    "values": values.ravel().tolist(),
                }
            )
    if args.format == "csv":
        _emit(args, _tensor_csv(records))
    else:
        _emit(args, harness.dumps_json({"config": run_config(args), "records": records, "errors": errors}))
    for e in errors:
        print(f"error: {e['message']}", file=sys.stderr)
    return code


# -- distinguish -----------------------------------------------------------------------


def _method_params(args) -> dict:
    params: dict = {"t": float(args.t), "theta": float(args.theta), "steps": int(args.steps)}
    if args.init:
        params["init"] = args.init
    if args.method == "ising-sim":
        sched = _schedule(args)
        params = {"theta": list(sched.theta), "times": list(sched.times)}
    return params


def cmd_distinguish(args) -> int:
    if args.method not in METHODS:
        raise CliError(f"unknown method {args.method!r}; expected one of {METHODS}", EXIT_USAGE)
    graphs: list[Graph] = []
    for path in args.inputs:
        for lineno, g, err in iter_graph6(path):
            if err:
                raise CliError(f"{path}: {err}", EXIT_PARSE)
            graphs.append(g)
    if len(graphs) < 2:
        raise CliError("distinguish needs at least two graphs", EXIT_INPUT)
    params = _method_params(args)
    results = []
    for i, j in itertools.combinations(range(len(graphs)), 2):
        v = distinguish(graphs[i], graphs[j], args.method, **params)
        results.append({"i": i, "j": j, **v.to_dict()})
    out = {"config": run_config(args), "method": args.method, "pairs": results}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "method", "verdict", "distance"])
        for r in results:
            d = r["witness"].get("distance")
            w.writerow([r["i"], r["j"], r["method"], r["verdict"], "" if d is None else harness.format_float(d)])
        _emit(args, buf.getvalue())
    else:
        _emit(args, harness.dumps_json(out))
    return EXIT_OK


# -- validate ------------------------------------------------------------------------


def cmd_validate(args) -> int:
    rows, code = [], EXIT_OK
    for path in args.inputs:
        for lineno, g, err in iter_graph6(path):
            if err:
                rows.append({"input": path, "line": lineno, "ok": False, "error": err})
                code = EXIT_PARSE
                continue
            p = validate_srg(g)
            rows.append(
                {
                    "input": path,
                    "line": lineno,
                    "ok": True,
                    "n": g.n,
                    "edges": g.num_edges,
                    "srg": None if p is None else list(p),
                    "roundtrip": parse_graph6(write_graph6(g)) == g,
                }
            )
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["input", "line", "ok", "n", "edges", "srg"])
        for r in rows:
            srg = r.get("srg")
            w.writerow([r["input"], r["line"], r["ok"], r.get("n", ""), r.get("edges", ""), "" if srg is None else " ".join(map(str, srg))])
        _emit(args, buf.getvalue())
    else:
        _emit(args, harness.dumps_json({"graphs": rows}))
    return code


# -- family --------------------------------------------------------------------------


def cmd_family(args) -> int:
    name, graphs = _resolve_family(args.family)
    if args.report:
        _emit(args, harness.dumps_json(harness.srg_family_report(graphs, name)))
        return EXIT_OK
    method = args.method or "xy2"
    params: dict = {}
    if method == "xy2":
        params = {"t": float(args.t), "init": args.init or "all_localized"}
    elif method == "ising-p1":
        params = {"theta": float(args.theta), "t": float(args.t)}
    elif method == "ising-sim":
        sched = _schedule(args) if int(args.layers) > 1 or str(args.times) != "grid" else None
        if sched is not None:
            params = {"theta": list(sched.theta), "times": list(sched.times)}
    elif method == "gs-corr":
        params = {"delta": float(args.delta)}
    elif method == "rrwp-slice":
        params = {"k": int(args.steps)}
    try:
        cfg = harness.EncoderConfig(method, params)
        rep = harness.family_distance_matrix(graphs, cfg, name, normalize=bool(args.normalize))
    except ResourceLimitError as exc:
        raise CliError(str(exc), EXIT_GUARD) from exc
    if args.format == "csv":
        _emit(args, rep.to_csv())
    else:
        _emit(args, harness.dumps_json({"config": run_config(args), **rep.to_dict()}))
    return EXIT_OK


# -- oracle-check ----------------------------------------------------------------------


def oracle_sweep(graphs: int, n_max: int, seed: int) -> dict:
    """Closed forms vs statevector simulation on random generic Ising instances."""
    from .simulator import correlation_sim, evolve_layers, occupations

    rng = np.random.default_rng(seed)
    n_min = min(2, n_max)
    cases = []
    worst = 0.0
    for idx in range(graphs):
        n = int(rng.integers(n_min, n_max + 1))
        upper = np.triu(rng.random((n, n)) < 0.5, 1)
        adj = (upper | upper.T).astype(np.uint8)
        g = Graph(adj)
        j = np.triu(rng.integers(0, 3, (n, n)), 1) * adj
        m = IsingModel(rng.integers(0, 2, n).astype(float), (j + j.T).astype(float))
        theta = float(rng.uniform(0.0, np.pi / 2))
        t = float(rng.uniform(0.0, 2 * np.pi))
        sched = PulseSchedule.single(theta, t)
        occ_dev = float(np.abs(occupations(evolve_layers(g, m, sched)) - local_occupation(g, m, theta, t)).max())
        corr_dev = float(np.abs(correlation_sim(g, m, sched) - correlation_closed_form(g, m, theta, t)).max())
        worst = max(worst, occ_dev, corr_dev)
        cases.append({"case": idx, "n": n, "theta": theta, "t": t, "occupation_dev": occ_dev, "correlation_dev": corr_dev})
    return {"seed": seed, "graphs": graphs, "n_max": n_max, "tolerance": ORACLE_TOL, "max_deviation": worst, "cases": cases}


def cmd_oracle_check(args) -> int:
    if int(args.n_max) < 1:
        raise CliError("--n-max must be >= 1", EXIT_USAGE)
    try:
        report = oracle_sweep(int(args.graphs), int(args.n_max), int(args.seed))
    except ResourceLimitError as exc:
        raise CliError(str(exc), EXIT_GUARD) from exc
    report["passed"] = report["max_deviation"] <= ORACLE_TOL
    _emit(args, harness.dumps_json(report))
    return EXIT_OK if report["passed"] else EXIT_ORACLE


# -- plumbing ------------------------------------------------------------------------


def _emit(args, text: str) -> None:
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", "-o", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--config", default=None, help="JSON file whose keys override flags")
    p.add_argument("--seed", type=int, default=0)


def _encoder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps", "-k", type=int, default=3, help="walk steps K (also grid size and PE width)")
    p.add_argument(
        "--times",
        default="grid",
        help="comma-separated times, 'grid' (j*pi/K, j=1..K) or 'random' (seeded, in (0.1, pi])",
    )
    p.add_argument("--theta", type=float, default=float(np.pi / 4), help="mixing angle")
    p.add_argument("--t", type=float, default=1.0, help="evolution time")
    p.add_argument("--layers", type=int, default=1, help="Ising layers p for simulated encodings")
    p.add_argument("--delta", type=float, default=0.5, help="detuning in (0, 1) for ground states")
    p.add_argument(
        "--init",
        default=None,
        help="two-walker initial state: uniform_edges, uniform_pairs, all_localized or localized:i,j",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpe",
        description="Quantum-inspired graph encodings, isomorphism tests and exact oracles.",
        epilog="Random-walk rows of isolated nodes (and isolated pair states) are all-zero. "
        "QPE_MAX_QUBITS overrides the 24-qubit simulator guard at your own risk.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode every graph of graph6 files")
    p.add_argument("inputs", nargs="+", help="graph6 files ('-' for stdin)")
    p.add_argument("--method", required=True, choices=ENCODE_METHODS)
    _encoder_flags(p)
    _common(p)

    p = sub.add_parser("distinguish", help="pairwise isomorphism verdicts")
    p.add_argument("inputs", nargs="+", help="graph6 files holding two or more graphs in total")
    p.add_argument("--method", default="wl1", choices=METHODS)
    _encoder_flags(p)
    _common(p)

    p = sub.add_parser("validate", help="parse graph6 input and report SRG parameters")
    p.add_argument("inputs", nargs="+")
    _common(p)

    p = sub.add_parser("family", help="pairwise distance matrix of a graph family")
    p.add_argument("family", help=f"vendored family ({', '.join(harness.FIXTURES)}) or a graph6 file")
    p.add_argument("--method", default=None, choices=harness.ENCODERS, help="encoder (default xy2)")
    p.add_argument("--normalize", action="store_true", help="add min-max normalized distances")
    p.add_argument("--report", action="store_true", help="run the full SRG battery instead")
    _encoder_flags(p)
    _common(p)

    p = sub.add_parser("oracle-check", help="closed forms vs statevector simulation")
    p.add_argument("--graphs", type=int, default=20)
    p.add_argument("--n-max", dest="n_max", type=int, default=10)
    _common(p)
    return parser


COMMANDS = {
    "encode": cmd_encode,
    "distinguish": cmd_distinguish,
    "validate": cmd_validate,
    "family": cmd_family,
    "oracle-check": cmd_oracle_check,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
