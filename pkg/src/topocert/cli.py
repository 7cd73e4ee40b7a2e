"""Command line entry point: ``topocert {simulate,certify,coeffs,devindep,verify}``.

Exit codes: 0 accepted / success, 1 usage or input error, 2 null
hypothesis, 3 ambiguous decision, 4 missing measurement setting.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import devindep, estimator, oracle, report
from .config import RunConfig, load_config
from .errors import MissingSettingError, TopoCertError
from .hypotheses import certify
from .simulator import Dataset, ExactData, MeasurementSetting, grid_settings, sample_dataset
from .topology import NetworkSpec, QubitSet

EXIT_OK, EXIT_ERROR, EXIT_NULL, EXIT_AMBIGUOUS, EXIT_MISSING = 0, 1, 2, 3, 4


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "shots", None) is not None:
        cfg.shots = args.shots
    if getattr(args, "mode", None) is not None:
        cfg.mode = args.mode
    if getattr(args, "out_dir", None) is not None:
        cfg.out_dir = args.out_dir
    return cfg


def _mermin_plan(cfg: RunConfig, spec: NetworkSpec) -> dict:
    subsets = cfg.devindep.get("subsets", [])
    if not subsets:
        return {}
    shots = int(cfg.devindep.get("shots", cfg.shots))
    return {MeasurementSetting.pauli(a): shots for a in devindep.required_settings(spec.total_qubits, subsets)}


def simulate_network(cfg: RunConfig, spec: NetworkSpec):
    if cfg.mode == "exact":
        return ExactData(spec, nominal_shots=cfg.shots)
    plan = {s: cfg.shots for s in grid_settings(spec.grid_size)}
    plan.update(_mermin_plan(cfg, spec))
    return sample_dataset(spec, plan, cfg.seed)


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, spec in cfg.networks:
        data = simulate_network(cfg, spec)
        if cfg.mode == "exact":
            path = out / f"{name}.distributions.json"
            path.write_text(json.dumps(data.to_json(), indent=1, sort_keys=True) + "\n")
        else:
            path = out / f"{name}.jsonl"
            data.save(path)
        print(f"wrote {path}")
    return EXIT_OK


def _exit_for(decisions: list[str]) -> int:
    if "ambiguous" in decisions:
        return EXIT_AMBIGUOUS
    if "null" in decisions:
        return EXIT_NULL
    return EXIT_OK


def cmd_certify(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    n_qubits = cfg.networks[0][1].total_qubits
    if args.dataset:
        sources = []
        for path in args.dataset:
            ds = Dataset.load(path)
            if ds.N != n_qubits:
                raise TopoCertError(f"{path}: dataset has {ds.N} qubits, candidates expect {n_qubits}")
            sources.append((Path(path).name.removesuffix(".jsonl"), ds))
    else:
        sources = [(name, simulate_network(cfg, spec)) for name, spec in cfg.networks]
    rows = [(name, certify(data, cfg.candidates, cfg.superset_phases)) for name, data in sources]
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text = report.render_text(rows)
    (out / "report.txt").write_text(text)
    (out / "report.json").write_text(report.render_json(rows))
    for name, rep in rows:
        (out / f"radar_{name}.csv").write_text(report.render_radar_csv(rep))
    print(text)
    return _exit_for([rep.decision for _, rep in rows])


def cmd_coeffs(args) -> int:
    if args.tail:
        c = estimator.coefficients_via_dft(args.n, args.M, [complex(t) for t in args.tail])
    else:
        c = estimator.min_norm_coefficients(args.n, args.M)
    for k, a in enumerate(c.a):
        if args.tail:
            expr = "Re[DFT^-1 coefficient]"
        elif args.n == args.M:
            expr = f"(-1)^{k}/{args.M}"
        else:
            expr = f"2*cos({k}*{args.n}*pi/{args.M})/{args.M}"
        print(f"a_{k} = {expr} = {a:.15g}")
    print(f"|a|^2 = {c.norm_squared:.15g}")
    return EXIT_OK


def _parse_subset(text: str) -> QubitSet:
    return QubitSet.of(int(t) for t in text.replace(" ", "").split(",") if t)


def _bounds_lines(S: float, n: int) -> list[str]:
    semi = devindep.semi_di_fidelity_bound(max(S, 0.0), n)
    note = "" if n % 2 else "  [even N: conjectured, not proven]"
    semi_txt = "undefined (below threshold %.6g)" % devindep.violation_threshold(n) if semi is None else f"{semi:.6f}"
    return [f"  trusted-basis bound F >= {devindep.trusted_basis_fidelity_bound(S, n):.6f}",
            f"  semi-DI bound       F >= {semi_txt}{note}"]


def cmd_devindep(args) -> int:
    lines = []
    out = Path(args.out_dir or "out")
    if args.S is not None:
        if args.N is None:
            raise TopoCertError("--S needs --N")
        lines.append(f"measured S = {args.S:.6g}, N = {args.N}")
        lines += _bounds_lines(args.S, args.N)
    if args.config:
        cfg = _apply_overrides(load_config(args.config), args)
        out = Path(cfg.out_dir)
        subsets = [_parse_subset(s) for s in args.subset] or [QubitSet.of(s) for s in cfg.devindep.get("subsets", [])]
        if not subsets:
            raise TopoCertError("no subsets given (use --subset or devindep.subsets in the config)")
        if args.dataset:
            sources = [(Path(p).name.removesuffix(".jsonl"), Dataset.load(p)) for p in args.dataset]
        elif cfg.mode == "exact":
            sources = [(name, ExactData(spec)) for name, spec in cfg.networks]
        else:
            cfg.devindep = {**cfg.devindep, "subsets": [list(s.indices) for s in subsets]}
            sources = [(name, simulate_network(cfg, spec)) for name, spec in cfg.networks]
        for name, data in sources:
            for sub in subsets:
                val = devindep.mermin_expectation(data, sub)
                lines.append(f"[{name}] subset {sub}: S = {val.S:.6f} (max {2 ** (len(sub) - 1)})")
                lines += _bounds_lines(val.S, len(sub))
    if args.curve:
        out.mkdir(parents=True, exist_ok=True)
        grid = np.linspace(0.5, 1.0, args.points)
        pts = devindep.numeric_violation_curve(args.curve, grid, starts=args.starts, seed=args.curve_seed)
        path = out / f"violation_curve_N{args.curve}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["F", "S_numeric", "S_analytic", "F_inverted", "lambda1", "lambda2"])
            for p in pts:
                inv = p.inverted(args.curve)
                w.writerow([repr(p.fidelity), repr(p.S), repr(devindep.analytic_max_violation(p.fidelity, args.curve)),
                            "" if inv is None else repr(inv), repr(p.lambda1), repr(p.lambda2)])
        lines.append(f"wrote {path}")
    if not lines:
        raise TopoCertError("nothing to do: give --S/--N, --config or --curve")
    text = "\n".join(lines) + "\n"
    if args.config:
        out.mkdir(parents=True, exist_ok=True)
        (out / "devindep.txt").write_text(text)
    print(text, end="")
    return EXIT_OK


def cmd_verify(args) -> int:
    rows = oracle.verify_all(quick=args.quick)
    width = max(len(r[0]) for r in rows)
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    return EXIT_OK if all(ok for _, ok, _ in rows) else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="topocert", description="Quantum network topology certification toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="JSON run configuration")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--shots", type=int)
        sp.add_argument("--mode", choices=["sampled", "exact"])
        sp.add_argument("--out-dir", dest="out_dir")

    sp = sub.add_parser("simulate", help="sample datasets (or exact distributions) for the configured networks")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("certify", help="run the hypothesis test and write reports")
    common(sp)
    sp.add_argument("--dataset", action="append", default=[], help="dataset file (repeatable)")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("coeffs", help="print the coefficient vector for n qubits on an M-setting grid")
    sp.add_argument("n", type=int)
    sp.add_argument("M", type=int)
    sp.add_argument("--tail", nargs="*", help="free Fourier components c_{n+1..M-1}")
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("devindep", help="Mermin values and device-independent fidelity bounds")
    common(sp, config_required=False)
    sp.add_argument("--subset", action="append", default=[], help="comma separated 1-based qubits")
    sp.add_argument("--dataset", action="append", default=[])
    sp.add_argument("--S", type=float, help="measured Mermin value")
    sp.add_argument("--N", type=int, help="number of qubits for --S")
    sp.add_argument("--curve", type=int, metavar="N", help="emit the violation-vs-fidelity curve for N qubits")
    sp.add_argument("--points", type=int, default=9)
    sp.add_argument("--starts", type=int, default=20)
    sp.add_argument("--curve-seed", type=int, default=0)
    sp.set_defaults(func=cmd_devindep)

    sp = sub.add_parser("verify", help="run the dense-oracle identity suite")
    sp.add_argument("--quick", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MissingSettingError as exc:
        print(f"MissingSettingError: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (TopoCertError, ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
