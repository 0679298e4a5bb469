"""Command-line entry point: ``enc-lab <subcommand> [options]``.

Exit codes: 0 success, 1 check failed, 2 input error, 3 certificate search
exhausted (or out of budget).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass
from typing import Sequence

from . import __version__
from .entropy import FORMS, SEC2B, EntropicExpression, chain_inequality
from .golden import PURE_STATE_TABLE
from .graphs import CommutationGraph, GraphError, cycle_graph
from .monogamy import (
    chsh_joint_graph,
    chsh_targets,
    check,
    chord_graph,
    chord_example,
    search_monogamy,
)
from .pauli import readout_report
from .quantum import (
    StateError,
    bell_with_spectator,
    chsh_values,
    depolarize,
    maximize_violation,
    mixed_family,
    pure_family,
    state_from_amplitudes,
)


EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_EXHAUSTED = 0, 1, 2, 3
READOUT_TOL = 0.002
EXAMPLES = ("chsh-tripartite", "fig1", "bare-4-cycle")


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    theta: float = 0.457
    form: str = SEC2B
    grid: int = 200
    out: str = "-"
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.form not in FORMS:
            raise InputError(f"unknown form {self.form!r}")
        if not 0.0 <= self.noise <= 1.0:
            raise InputError("--noise must lie in [0, 1]")
        if self.grid < 3:
            raise InputError("--grid must be at least 3")

    def metadata(self, command: str) -> dict:
        meta = {"command": command, "version": __version__}
        meta.update(asdict(self))
        meta.pop("out")
        return meta


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


@contextlib.contextmanager
def _output(path: str):
    if path in ("-", ""):
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    with fh:
        yield fh


def _write_csv(cfg: RunConfig, command: str, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    for key, value in cfg.metadata(command).items():
        buf.write(f"# {key}={value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    with _output(cfg.out) as fh:
        fh.write(buf.getvalue())


def _write_json(cfg: RunConfig, command: str, payload: dict) -> None:
    payload = {"metadata": cfg.metadata(command), **payload}
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    with _output(cfg.out) as fh:
        fh.write(text)


def _noisy(rho, cfg: RunConfig):
    return depolarize(rho, cfg.noise) if cfg.noise > 0 else rho


def sweep_mixed_rows(cfg: RunConfig) -> list[tuple[float, float, float, float]]:
    rows = []
    for k in range(101):
        p = k / 100
        hk1, hk2 = chsh_values(_noisy(mixed_family(p), cfg), cfg.theta, cfg.form)
        rows.append((p, hk1, hk2, hk1 + hk2))
    return rows


def cmd_sweep_mixed(cfg: RunConfig) -> int:
    rows = sweep_mixed_rows(cfg)
    _write_csv(
        cfg,
        "sweep-mixed",
        ["p", "H_K1", "H_K2", "sum"],
        [(f"{p:.2f}", _fmt(a), _fmt(b), _fmt(s)) for p, a, b, s in rows],
    )
    return EXIT_OK


def table_pure_rows(cfg: RunConfig) -> list[dict]:
    out = []
    for row in PURE_STATE_TABLE:
        rho = _noisy(pure_family(row.p1, row.p2), cfg)
        hk1, hk2 = chsh_values(rho, cfg.theta, cfg.form)
        _, hk2_alt = chsh_values(rho, cfg.theta, cfg.form, charlie="alt")
        out.append(
            {
                "p1": row.p1,
                "p2": row.p2,
                "H_K1": hk1,
                "H_K2": hk2,
                "sum": hk1 + hk2,
                "H_K2_alt": hk2_alt,
                "ref_H_K1": row.hk1_theory,
                "ref_H_K2": row.hk2_theory,
                "ref_sum": row.sum_theory,
                "dev_H_K1": hk1 - row.hk1_theory,
                "dev_H_K2": hk2 - row.hk2_theory,
                "dev_H_K2_alt": hk2_alt - row.hk2_theory,
                "dev_sum": hk1 + hk2 - row.sum_theory,
            }
        )
    return out


def cmd_table_pure(cfg: RunConfig) -> int:
    rows = table_pure_rows(cfg)
    header = list(rows[0])
    _write_csv(
        cfg,
        "table-pure",
        header,
        [[f"{r['p1']:.2f}", f"{r['p2']:.2f}"] + [_fmt(r[k]) for k in header[2:]] for r in rows],
    )
    for r in rows:
        worst = max(("H_K1", "H_K2", "sum"), key=lambda k: abs(r[f"dev_{k}"]))
        print(
            f"discrepancy p1={r['p1']:.2f} p2={r['p2']:.2f}: "
            f"H_K1 {r['dev_H_K1']:+.3f}, H_K2 {r['dev_H_K2']:+.3f} "
            f"(alt Charlie {r['dev_H_K2_alt']:+.3f}), sum {r['dev_sum']:+.3f}; largest {worst}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_optimize(cfg: RunConfig, state_path: str | None, theta_range) -> int:
    if state_path:
        rho = state_from_amplitudes(_load_json(state_path))
    else:
        rho = bell_with_spectator()
    rho = _noisy(rho, cfg)
    theta_star, value = maximize_violation(rho, cfg.form, tuple(theta_range), cfg.grid)
    _write_json(
        cfg,
        "optimize",
        {
            "thetaStar": theta_star,
            "blochStep": 2 * theta_star / 3,
            "value": value,
        },
    )
    return EXIT_OK


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _load_targets(path: str) -> list[EntropicExpression]:
    data = _load_json(path)
    if isinstance(data, dict) and "targets" in data:
        data = data["targets"]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not data:
        raise InputError("targets JSON must be an inequality, a list of them, or {'targets': [...]}")
    try:
        return [EntropicExpression.from_dict(d) for d in data]
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def example_scenario(
    name: str, form: str = SEC2B
) -> tuple[CommutationGraph, list[EntropicExpression]]:
    if name == "chsh-tripartite":
        return chsh_joint_graph(), list(chsh_targets(form))
    if name == "fig1":
        return chord_graph(), [chord_example()[2]]
    if name == "bare-4-cycle":
        labels = ["X1", "X2", "X3", "X4"]
        return cycle_graph(labels), [chain_inequality(labels)]
    raise InputError(f"unknown example {name!r}; choose from {EXAMPLES}")


def cmd_derive(
    cfg: RunConfig,
    graph_path: str | None,
    targets_path: str | None,
    example: str | None,
    budget: int | None,
) -> int:
    if example:
        joint, targets = example_scenario(example, cfg.form)
    else:
        if not graph_path or not targets_path:
            raise InputError("derive needs --graph and --targets, or --example")
        try:
            joint = CommutationGraph.from_dict(_load_json(graph_path))
        except GraphError as exc:
            raise InputError(str(exc)) from exc
        targets = _load_targets(targets_path)
    try:
        outcome = search_monogamy(joint, targets, budget)
    except GraphError as exc:
        raise InputError(str(exc)) from exc
    payload = {"status": outcome.status, "examined": outcome.examined, "message": outcome.message}
    if outcome.certificate is None:
        _write_json(cfg, "derive", payload)
        print(outcome.message, file=sys.stderr)
        return EXIT_EXHAUSTED
    result = check(outcome.certificate, joint)
    payload["verified"] = result.ok
    payload["certificate"] = outcome.certificate.to_dict()
    _write_json(cfg, "derive", payload)
    return EXIT_OK if result.ok else EXIT_FAIL


def cmd_readout_check(cfg: RunConfig) -> int:
    rows = readout_report(cfg.theta)
    _write_csv(
        cfg,
        "appendix-check",
        ["probability", "index", "reference", "regenerated", "abs_delta"],
        [(r.label, r.index, f"{r.reference:.4f}", f"{r.regenerated:.6f}", f"{r.delta:.6f}") for r in rows],
    )
    worst = max(rows, key=lambda r: r.delta)
    over = sum(r.delta > READOUT_TOL for r in rows)
    verdict = "PASS" if worst.delta <= READOUT_TOL else "FAIL"
    print(
        f"{verdict} max_deviation={worst.delta:.4f} at {worst.label} b{worst.index} "
        f"({over}/{len(rows)} coefficients beyond {READOUT_TOL})",
        file=sys.stderr,
    )
    return EXIT_OK if verdict == "PASS" else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theta", type=float, default=0.457, help="opening angle (radians)")
    common.add_argument("--form", choices=FORMS, default=SEC2B, help="CHSH term ordering")
    common.add_argument("--grid", type=int, default=200, help="grid points for optimize")
    common.add_argument("--out", default="-", help="output file ('-' for stdout)")
    common.add_argument("--noise", type=float, default=0.0, help="depolarizing strength in [0, 1]")
    common.add_argument("--seed", type=int, default=0, help="seed recorded in metadata")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="enc-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep-mixed", parents=[common], help="H_K1, H_K2 over the mixed family")
    sub.add_parser("table-pure", parents=[common], help="pure-state table with deviations")
    p = sub.add_parser("optimize", parents=[common], help="maximize the Alice-Bob violation")
    p.add_argument("--state", help='JSON {"amplitudes": [[re, im], ...]}')
    p.add_argument("--range", nargs=2, type=float, default=(0.05, 1.5), metavar=("LO", "HI"))
    p = sub.add_parser("derive", parents=[common], help="search for a monogamy certificate")
    p.add_argument("--graph", help="graph JSON")
    p.add_argument("--targets", help="inequality JSON (one or a list)")
    p.add_argument("--example", choices=EXAMPLES)
    p.add_argument("--budget", type=int, help="max decompositions (default $ENC_LAB_BUDGET or 10000)")
    sub.add_parser("appendix-check", parents=[common], help="regenerate readout coefficients")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        cfg = RunConfig(args.theta, args.form, args.grid, args.out, args.noise, args.seed)
        if args.command == "sweep-mixed":
            return cmd_sweep_mixed(cfg)
        if args.command == "table-pure":
            return cmd_table_pure(cfg)
        if args.command == "optimize":
            return cmd_optimize(cfg, args.state, args.range)
        if args.command == "derive":
            return cmd_derive(cfg, args.graph, args.targets, args.example, args.budget)
        if args.command == "appendix-check":
            return cmd_readout_check(cfg)
    except (InputError, StateError) as exc:
        print(f"enc-lab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"enc-lab: I/O error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    parser.error(f"unhandled command {args.command}")
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
