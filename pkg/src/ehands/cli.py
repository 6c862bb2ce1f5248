"""Command-line entry point: ``ehands {fit,sweep,resources,mse,export}``.

Exit codes: 0 success, 1 usage error, 2 numeric-domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .circuit import export_qasm, resource_report, to_json
from .compiler import BUILDERS, build_mse, mse_value
from .encoding import DomainError, check_unit
from .fitting import TARGETS, PolySpec, fit_polynomial, horner, predict
from .propagation import PauliEvaluator
from .qsp import ehands_two_qubit_count, qsp_resource_estimate
from .simulator import NoiseModel, run_shots

CSV_HEADER = ("x", "ev_exact", "ev_shots", "sigma", "predicted", "target")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _point_seed(seed: int, i: int) -> int:
    return int(np.random.SeedSequence([seed, i]).generate_state(1)[0])


def _load_spec(args) -> tuple[PolySpec, str | None]:
    if args.spec:
        doc = json.loads(Path(args.spec).read_text())
        return PolySpec.from_coeffs(doc["raw_coeffs"]), doc.get("target")
    if args.target:
        if args.degree is None:
            raise UsageError("--target needs --degree")
        return fit_polynomial(args.target, args.degree, args.grid_n).spec, args.target
    if args.coeffs:
        return PolySpec.from_coeffs([float(v) for v in args.coeffs.split(",")]), None
    raise UsageError("give one of --spec, --target or --coeffs")


def _spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", help="PolySpec JSON written by 'fit'")
    p.add_argument("--target", choices=sorted(TARGETS))
    p.add_argument("--coeffs", help="comma-separated power-basis coefficients, lowest first")
    p.add_argument("--degree", type=int)
    p.add_argument("--grid-n", type=int, default=201)


def cmd_fit(args, out) -> None:
    if args.coeffs:
        target = [float(v) for v in args.coeffs.split(",")]
        degree = args.degree if args.degree is not None else len(target) - 1
    elif args.target:
        target, degree = args.target, args.degree
        if degree is None:
            raise UsageError("--target needs --degree")
    else:
        raise UsageError("give --target or --coeffs")
    rep = fit_polynomial(target, degree, args.grid_n)
    doc = json.loads(rep.spec.to_json())
    doc.update(target=rep.target, max_abs_err=rep.max_abs_err, grid_points=rep.grid_points)
    out.write(json.dumps(doc, indent=1) + "\n")


def sweep_rows(spec: PolySpec, target: str | None, builder: str, x_count: int,
               shots: int, seed: int, noise_p: float, workers: int = 1) -> list[tuple]:
    if x_count < 1:
        raise DomainError("x-count must be >= 1")
    if shots < 0:
        raise DomainError("shots must be >= 0")
    xs = np.linspace(-1.0, 1.0, x_count) if x_count > 1 else np.array([0.0])
    build = BUILDERS[builder]
    circuits = [build(spec, float(x)) for x in xs]
    exact = PauliEvaluator().evaluate_many(circuits)
    noise = NoiseModel(noise_p)

    def sample(i):
        return run_shots(circuits[i], shots, _point_seed(seed, i), noise) if shots else None

    with ThreadPoolExecutor(max(1, workers)) as pool:
        sampled = list(pool.map(sample, range(len(xs))))
    rows = []
    for x, ev, res in zip(xs, exact, sampled):
        ev = float(np.clip(ev, -1.0, 1.0))
        tgt = TARGETS[target](x) if target in TARGETS else horner(spec.raw_coeffs, x)
        if res is None:
            rows.append((x, ev, "", "", predict(spec, ev), float(tgt)))
        else:
            rows.append((x, ev, res.ev, res.sigma, predict(spec, res.ev), float(tgt)))
    return rows


def _fmt(v) -> str:
    return v if isinstance(v, str) else repr(float(v))


def write_csv(rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(v) for v in r])


def cmd_sweep(args, out) -> None:
    spec, target = _load_spec(args)
    rows = sweep_rows(spec, target, args.builder, args.x_count, args.shots, args.seed,
                      args.noise_p, args.workers)
    buf = io.StringIO()
    write_csv(rows, buf)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        out.write(buf.getvalue())


def cmd_resources(args, out) -> None:
    d = args.degree
    if d < 1:
        raise DomainError("degree must be >= 1")
    names = list(BUILDERS) + ["qsp"] if args.builder == "all" else [args.builder]
    out.write(f"{'builder':<14}{'qubits':>7}{'ancilla':>8}{'resets':>7}{'2q':>5}{'depth':>6}\n")
    for name in names:
        if name == "qsp":
            est = qsp_resource_estimate(d)
            out.write(f"{'qsp':<14}two-qubit ≈ 12d+6 = {est} (estimate); "
                      f"EHands 5d-2 = {ehands_two_qubit_count(d)}\n")
            continue
        spec = PolySpec.from_normalized([1.0] * (d + 1))
        r = resource_report(BUILDERS[name](spec, 0.5))
        out.write(f"{name:<14}{r.n_qubits:>7}{r.n_ancilla:>8}{r.n_resets:>7}"
                  f"{r.n_two_qubit_gates:>5}{r.two_qubit_depth:>6}\n")


def read_vector(path: str) -> list[float]:
    vals = [float(line) for line in Path(path).read_text().split() if line.strip()]
    return [check_unit(v, "input") for v in vals]


def cmd_mse(args, out) -> None:
    xs, ys = read_vector(args.x_file), read_vector(args.y_file)
    c = build_mse(xs, ys)
    ev = PauliEvaluator().evaluate(c)
    r = resource_report(c)
    out.write(f"N = {len(xs)}\n")
    out.write(f"classical MSE = {mse_value(xs, ys)!r}\n")
    out.write(f"exact MSE = {4 * ev!r}\n")
    if args.shots:
        res = run_shots(c, args.shots, args.seed)
        out.write(f"shots MSE = {4 * res.ev!r} +- {4 * res.sigma!r} ({args.shots} shots)\n")
    out.write(f"resources: {r.n_qubits} qubits, {r.n_two_qubit_gates} two-qubit gates, "
              f"depth {r.two_qubit_depth}\n")


def cmd_export(args, out) -> None:
    spec, _ = _load_spec(args)
    c = BUILDERS[args.builder](spec, args.x)
    text = to_json(c) + "\n" if args.format == "json" else export_qasm(c)
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ehands", description="Expectation-value polynomial circuits.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="fit a target and print the PolySpec JSON")
    f.add_argument("--target", choices=sorted(TARGETS))
    f.add_argument("--coeffs")
    f.add_argument("--degree", type=int)
    f.add_argument("--grid-n", type=int, default=201)
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("sweep", help="evaluate a polynomial circuit over an x grid")
    _spec_args(s)
    s.add_argument("--builder", choices=sorted(BUILDERS), default="reversible")
    s.add_argument("--x-count", type=int, default=21)
    s.add_argument("--shots", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise-p", type=float, default=0.0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("resources", help="print resource counts")
    r.add_argument("--degree", type=int, required=True)
    r.add_argument("--builder", choices=sorted(BUILDERS) + ["qsp", "all"], default="all")
    r.set_defaults(func=cmd_resources)

    m = sub.add_parser("mse", help="mean squared error of two vectors via the MSE circuit")
    m.add_argument("x_file")
    m.add_argument("y_file")
    m.add_argument("--shots", type=int, default=0)
    m.add_argument("--seed", type=int, default=0)
    m.set_defaults(func=cmd_mse)

    e = sub.add_parser("export", help="write one circuit as OpenQASM 3 or JSON")
    _spec_args(e)
    e.add_argument("--builder", choices=sorted(BUILDERS), default="reversible")
    e.add_argument("--x", type=float, required=True)
    e.add_argument("--format", choices=["qasm", "json"], default="qasm")
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = make_parser().parse_args(argv)
        args.func(args, out)
    except (UsageError, OSError) as exc:
        err.write(f"{exc}\n")
        return 1
    except (DomainError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
