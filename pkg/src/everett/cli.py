"""Command-line experiment runner.

    everett <command> [--coeffs 0.3,0.7] [--n 1024] [--epsilon 0.05]
                      [--a-sq 0.5] [--seed 42] [--format json|csv] [--out PATH]

Every command builds a report ``{"header": {...}, "body": {"rows": [...]}}``.
JSON output conforms to ``schemas/report.schema.json``; CSV output is the
``rows`` table only, columns in the order given by ``COLUMNS``. Output
contains no timestamps or paths, so identical configs give identical bytes.

Exit codes: 0 ok, 2 bad configuration, 3 mathematical obstruction.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .asymptotics import chebyshev_floor, modal_class, residual_measure, typicality_measure
from .branching import Coefficients, CountClass, EnsembleTooLargeError, class_count, class_table
from .cat import (
    NoUnitaryCompletionError,
    SuperpositionParams,
    basis_invariance_deviation,
    branch_measures,
    build_phi_observer,
    definite_inputs,
    observe_superposition,
    random_object_unitaries,
    state_rows,
)
from .hilbert import apply, unitarity_residual

log = logging.getLogger("everett")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_OBSTRUCTION = 3

COMMANDS = ("born", "classes", "residual", "cat", "complement", "invariance")

COLUMNS = {
    "born": ["N", "modal_class", "modal_fractions", "tie", "typicality", "chebyshev_floor"],
    "classes": ["N", "counts", "class_count", "measure", "log_measure"],
    "residual": ["N", "modal_class", "class_measure", "residual", "vanishes"],
    "cat": ["kind", "cat", "record", "re", "im", "measure"],
    "complement": ["kind", "input", "record", "measure", "row", "col", "re", "im"],
    "invariance": ["trial", "deviation", "passed"],
}

INVARIANCE_TOL = 1e-10
RENORM_TOL = 1e-6
HAAR_CONSTRUCTION = "scipy.stats.unitary_group.rvs(2) drawn from numpy.random.default_rng(seed)"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    coeffs: tuple[float, ...] = (0.5, 0.5)
    n: int = 64
    epsilon: float = 0.05
    a_sq: float = 0.5
    seed: int = 0
    format: str = "json"
    out: str | None = None

    def validated(self) -> ExperimentConfig:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if not self.coeffs or any(not math.isfinite(c) or c < 0 for c in self.coeffs):
            raise ConfigError("coeffs must be finite and >= 0")
        total = math.fsum(self.coeffs)
        if total <= 0:
            raise ConfigError("coeffs must not all be zero")
        coeffs = self.coeffs
        if abs(total - 1.0) > RENORM_TOL:
            log.warning("coeffs sum to %r; renormalising", total)
        if total != 1.0:
            coeffs = tuple(c / total for c in self.coeffs)
        min_n = 0 if self.command == "invariance" else 1
        if self.n < min_n:
            raise ConfigError(f"n must be >= {min_n}")
        if not 0 < self.epsilon <= 1:
            raise ConfigError("epsilon must be in (0, 1]")
        if not 0 < self.a_sq < 1:
            raise ConfigError("a-sq must be in (0, 1)")
        return replace(self, coeffs=coeffs)

    def echo(self) -> dict:
        return {
            "coeffs": list(self.coeffs),
            "n": self.n,
            "epsilon": self.epsilon,
            "a_sq": self.a_sq,
            "seed": self.seed,
            "format": self.format,
        }

    @property
    def coefficients(self) -> Coefficients:
        return Coefficients.from_measures(self.coeffs)


def sweep(n: int) -> list[int]:
    """Powers of two below ``n``, then ``n`` itself."""
    out = []
    k = 1
    while k < n:
        out.append(k)
        k *= 2
    return out + [n]


def _report(cfg: ExperimentConfig, rows: list[dict], **extra) -> dict:
    return {
        "header": {"command": cfg.command, "config": cfg.echo(), "version": __version__},
        "body": {"rows": rows, **extra},
    }


def cmd_born(cfg: ExperimentConfig) -> dict:
    coeffs = cfg.coefficients
    rows = []
    for n in sweep(cfg.n):
        mode = modal_class(coeffs, n)
        rows.append(
            {
                "N": n,
                "modal_class": list(mode.count_class.counts),
                "modal_fractions": list(mode.count_class.fractions()),
                "tie": mode.tie,
                "typicality": typicality_measure(coeffs, n, cfg.epsilon).linear,
                "chebyshev_floor": chebyshev_floor(coeffs, n, cfg.epsilon),
            }
        )
    return _report(cfg, rows, fractions=[float(w) for w in coeffs.weights])


def cmd_classes(cfg: ExperimentConfig) -> dict:
    coeffs = cfg.coefficients
    counts, logm = class_table(coeffs, cfg.n)
    rows = [
        {
            "N": cfg.n,
            "counts": [int(x) for x in c],
            "class_count": class_count(CountClass(tuple(c))),
            "measure": math.exp(lm),
            "log_measure": float(lm),
        }
        for c, lm in zip(counts, logm)
    ]
    return _report(cfg, rows)


def cmd_residual(cfg: ExperimentConfig) -> dict:
    coeffs = cfg.coefficients
    results = [(n, residual_measure(coeffs, n)) for n in sweep(cfg.n)]
    vanishes = results[-1][1].measure.linear < 0.5
    rows = [
        {
            "N": n,
            "modal_class": list(r.count_class.counts),
            "class_measure": r.class_weight.linear,
            "residual": r.measure.linear,
            "vanishes": vanishes,
        }
        for n, r in results
    ]
    note = (
        "literal residual 1 - m(rounded N|C_i|^2); it does not vanish as N grows. "
        "The frequency-window form is reported by the 'born' command."
    )
    return _report(cfg, rows, vanishes=vanishes, note=note)


def cmd_cat(cfg: ExperimentConfig) -> dict:
    p = SuperpositionParams.from_a_sq(cfg.a_sq)
    s = observe_superposition(p)
    rows = [
        {"kind": "amplitude", "cat": cat, "record": rec, "re": amp.real, "im": amp.imag}
        for cat, rec, amp in state_rows(s)
    ]
    rows += [{"kind": "measure", "record": k, "measure": m.linear} for k, m in branch_measures(s).items()]
    return _report(cfg, rows)


def cmd_complement(cfg: ExperimentConfig) -> dict:
    p = SuperpositionParams.from_a_sq(cfg.a_sq)
    op = build_phi_observer(p)
    rows = []
    for name, state in definite_inputs(p).items():
        for rec, m in branch_measures(apply(op, state)).items():
            rows.append({"kind": "branch", "input": name, "record": rec, "measure": m.linear})
    for i in range(op.dim):
        for j in range(op.dim):
            z = op.matrix[i, j]
            rows.append({"kind": "matrix", "row": i, "col": j, "re": float(z.real), "im": float(z.imag)})
    basis = [f"{lab.object_part[0]}|{'blank' if not lab.memory_part else lab.memory_part[0]}" for lab in op.basis]
    return _report(cfg, rows, basis=basis, unitarity_residual=unitarity_residual(op))


def cmd_invariance(cfg: ExperimentConfig) -> dict:
    p = SuperpositionParams.from_a_sq(cfg.a_sq)
    if cfg.n == 0:
        log.warning("0 invariance trials requested; the check passes vacuously")
    devs = [basis_invariance_deviation(p, v) for v in random_object_unitaries(cfg.n, cfg.seed)]
    rows = [{"trial": i, "deviation": d, "passed": d <= INVARIANCE_TOL} for i, d in enumerate(devs)]
    worst = max(devs, default=0.0)
    return _report(
        cfg,
        rows,
        max_deviation=worst,
        passed=worst <= INVARIANCE_TOL,
        trials=cfg.n,
        unitary_construction=HAAR_CONSTRUCTION,
    )


HANDLERS = {
    "born": cmd_born,
    "classes": cmd_classes,
    "residual": cmd_residual,
    "cat": cmd_cat,
    "complement": cmd_complement,
    "invariance": cmd_invariance,
}


def run(cfg: ExperimentConfig) -> dict:
    return HANDLERS[cfg.command](cfg.validated())


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def to_json(report: dict) -> str:
    return json.dumps(_clean(report), indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ""
    if isinstance(value, list):
        return ";".join(_cell(v) for v in value)
    return str(value)


def to_csv(report: dict) -> str:
    columns = COLUMNS[report["header"]["command"]]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in report["body"]["rows"]:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def render(report: dict, fmt: str) -> str:
    return to_json(report) if fmt == "json" else to_csv(report)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="everett", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--coeffs", default="0.5,0.5", help="outcome weights |C_i|^2, comma separated")
    parser.add_argument("--n", type=int, default=64, help="largest N (or number of trials for invariance)")
    parser.add_argument("--epsilon", type=float, default=0.05)
    parser.add_argument("--a-sq", type=float, default=0.5, help="|a|^2 of the cat superposition")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", default=None, help="output file (default: stdout)")
    return parser


def _parse_coeffs(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --coeffs {text!r}: {exc}") from None


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig(
            command=args.command,
            coeffs=_parse_coeffs(args.coeffs),
            n=args.n,
            epsilon=args.epsilon,
            a_sq=args.a_sq,
            seed=args.seed,
            format=args.format,
            out=args.out,
        )
        report = run(cfg)
    except (ConfigError, EnsembleTooLargeError) as exc:
        print(f"everett: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoUnitaryCompletionError as exc:
        print(f"everett: {exc}", file=sys.stderr)
        return EXIT_OBSTRUCTION

    text = render(report, cfg.format)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
