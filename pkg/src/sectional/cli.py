"""Command-line interface.

Every command writes one JSON report. Exit codes: 0 success, 1 bad input,
2 a verification found a violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .bounds import canonical_bounds, remark_2_4_fixture, sum_bounds
from .curvature import CanonicalTensor, TensorSum, check_symmetries, sectional_curvature
from .errors import CurvatureError
from .io import parse_form, parse_sum, parse_tensor, read_document
from .linalg import gram_error
from .oracle import estimate_range, plane_for_value
from .realization import DEFAULT_STEP, realize_interval
from .spectral import DEFAULT_TOL, eigen_residual, spectral_decomposition

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2

SHARP_TOL = 1e-6
CONTAINMENT_TOL = 1e-8

COMMANDS = ("bounds", "sum-bounds", "spectral", "oracle", "verify", "plane-for", "realize", "demo")


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    seed: int = 0
    tol: float = DEFAULT_TOL
    samples: int = 4096
    output_path: str | None = None
    mode: str | None = None
    value: float | None = None
    interval: list | None = None
    dim: int | None = None
    step: float | None = None
    demo: str | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None or k in ("input_path", "output_path")}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _interval(text: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected A,B")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad interval {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-i", "--input", dest="input_path", help="input JSON file, or - for stdin")
    common.add_argument("-o", "--output", dest="output_path", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--samples", type=int, default=4096)
    common.add_argument("--workers", type=int, default=1, help="threads for the oracle; never changes results")

    parser = _Parser(prog="sectional", description="Sectional curvature bounds and eigensolvers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("bounds", parents=[common], help="exact curvature range of R_phi")
    sub.add_parser("sum-bounds", parents=[common], help="outer bounds for a signed sum")
    p = sub.add_parser("spectral", parents=[common], help="eigen-decomposition of a form")
    p.add_argument("--mode", choices=("paper", "sweep"), default="paper")
    sub.add_parser("oracle", parents=[common], help="sampled curvature range")
    sub.add_parser("verify", parents=[common], help="compare the oracle with the formula bounds")
    p = sub.add_parser("plane-for", parents=[common], help="find a plane with a given curvature")
    p.add_argument("--value", type=float, required=True)
    p = sub.add_parser("realize", parents=[common], help="hypersurface realizing [A, B] at a point")
    p.add_argument("--interval", type=_interval, required=True)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    p = sub.add_parser("demo", parents=[common], help="built-in worked examples")
    p.add_argument("demo", choices=("remark-2-4",))
    return parser


def _needs_input(cfg: RunConfig) -> dict:
    if not cfg.input_path:
        raise UsageError(f"{cfg.command} needs --input")
    return read_document(cfg.input_path)


def _formula_range(t) -> tuple[float, float]:
    if isinstance(t, CanonicalTensor):
        b = canonical_bounds(t.form)
        return b.m, b.M
    return sum_bounds(t)


def _oracle(t, cfg: RunConfig, workers: int):
    return estimate_range(t, samples=cfg.samples, seed=cfg.seed, workers=workers)


def _provenance(formula, est) -> dict:
    return {
        "formula": [formula[0], formula[1]],
        "oracle": [est.min_value, est.max_value],
        "difference": [est.min_value - formula[0], est.max_value - formula[1]],
    }


def cmd_bounds(cfg, workers):
    phi = parse_form(_needs_input(cfg))
    b = canonical_bounds(phi)
    est = _oracle(CanonicalTensor(phi), cfg, workers)
    return b.to_dict(), _provenance((b.m, b.M), est), EXIT_OK


def cmd_sum_bounds(cfg, workers):
    t = parse_sum(_needs_input(cfg))
    m, big = sum_bounds(t)
    terms = []
    for sign, phi in t.terms:
        b = canonical_bounds(phi)
        terms.append({"sign": sign, "m": b.m, "M": b.M})
    est = _oracle(t, cfg, workers)
    return {"m": m, "M": big, "terms": terms}, _provenance((m, big), est), EXIT_OK


def cmd_spectral(cfg, workers):
    phi = parse_form(_needs_input(cfg))
    res = spectral_decomposition(phi, mode=cfg.mode, tol=cfg.tol, seed=cfg.seed)
    a = phi.matrix
    prov = {
        "reconstruction_error": float(np.max(np.abs(res.reconstruct() - a))),
        "gram_error": gram_error(res.frame.vectors),
        "max_eigen_residual": max(eigen_residual(phi, f) for f in res.frame.vectors),
    }
    return res.to_dict(), prov, EXIT_OK


def cmd_oracle(cfg, workers):
    t = parse_tensor(_needs_input(cfg))
    est = _oracle(t, cfg, workers)
    return est.to_dict(), _provenance(_formula_range(t), est), EXIT_OK


def cmd_verify(cfg, workers):
    t = parse_tensor(_needs_input(cfg))
    formula = _formula_range(t)
    est = _oracle(t, cfg, workers)
    sym = check_symmetries(t, trials=100, seed=cfg.seed)
    violations = []
    if isinstance(t, CanonicalTensor):
        kind, tol = "canonical", SHARP_TOL
        for name, got, want in (("min", est.min_value, formula[0]), ("max", est.max_value, formula[1])):
            if abs(got - want) > tol:
                violations.append(f"oracle {name} {got!r} differs from formula {want!r}")
    else:
        kind, tol = "sum", CONTAINMENT_TOL
        if est.min_value < formula[0] - tol:
            violations.append(f"oracle min {est.min_value!r} below outer bound {formula[0]!r}")
        if est.max_value > formula[1] + tol:
            violations.append(f"oracle max {est.max_value!r} above outer bound {formula[1]!r}")
    if not sym.passes():
        violations.append(f"curvature identities violated by {sym.max_violation!r}")
    result = {
        "kind": kind,
        "formula": list(formula),
        "oracle": [est.min_value, est.max_value],
        "tolerance": tol,
        "symmetry": sym.to_dict(),
        "passed": not violations,
        "violations": violations,
    }
    return result, _provenance(formula, est), EXIT_OK if not violations else EXIT_VIOLATION


def cmd_plane_for(cfg, workers):
    t = parse_tensor(_needs_input(cfg))
    est = _oracle(t, cfg, workers)
    plane = plane_for_value(t, est.argmin_plane, est.argmax_plane, cfg.value)
    kappa = sectional_curvature(t, plane.x, plane.y)
    result = {"value": cfg.value, "plane": plane.tolist(), "kappa": kappa, "error": kappa - cfg.value}
    return result, _provenance(_formula_range(t), est), EXIT_OK


def cmd_realize(cfg, workers):
    a, b = cfg.interval
    rep = realize_interval(a, b, cfg.dim, cfg.step, samples=cfg.samples, seed=cfg.seed, workers=workers)
    prov = {"formula": rep["formula_range"], "oracle": rep["measured_range"]}
    return rep, prov, EXIT_OK


def cmd_demo(cfg, workers):
    t, outer = remark_2_4_fixture()
    m, big = sum_bounds(t)
    est = _oracle(t, cfg, workers)
    e = np.eye(3)
    result = {
        "demo": cfg.demo,
        "terms": [{"sign": s, "matrix": phi.matrix.tolist()} for s, phi in t.terms],
        "value_e1_e2_e2_e1": t(e[0], e[1], e[1], e[0]),
        "outer_bound": [m, big],
        "expected_outer_max": outer,
        "oracle_max": est.max_value,
        "oracle_max_plane": est.argmax_plane.tolist(),
        "gap": big - est.max_value,
        "strictly_below_outer_max": est.max_value < big,
    }
    code = EXIT_OK if est.max_value < big else EXIT_VIOLATION
    return result, _provenance((m, big), est), code


HANDLERS = {
    "bounds": cmd_bounds,
    "sum-bounds": cmd_sum_bounds,
    "spectral": cmd_spectral,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
    "plane-for": cmd_plane_for,
    "realize": cmd_realize,
    "demo": cmd_demo,
}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command,
        input_path=ns.input_path,
        seed=ns.seed,
        tol=ns.tol,
        samples=ns.samples,
        output_path=ns.output_path,
        mode=getattr(ns, "mode", None),
        value=getattr(ns, "value", None),
        interval=getattr(ns, "interval", None),
        dim=getattr(ns, "dim", None),
        step=getattr(ns, "step", None),
        demo=getattr(ns, "demo", None),
    )
    if not cfg.tol > 0:
        raise UsageError("--tol must be positive")
    if cfg.samples < 1:
        raise UsageError("--samples must be >= 1")
    if ns.workers < 1:
        raise UsageError("--workers must be >= 1")
    return cfg


def render(cfg: RunConfig, result: dict, provenance: dict) -> str:
    report = {"command": cfg.command, "config": cfg.to_dict(), "result": result, "provenance": provenance}
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        ns = build_parser().parse_args(argv)
        if ns.command is None:
            raise UsageError(f"a command is required: one of {', '.join(COMMANDS)}")
        cfg = config_from_args(ns)
        result, prov, code = HANDLERS[cfg.command](cfg, ns.workers)
    except (UsageError, CurvatureError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    text = render(cfg, result, prov)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if code == EXIT_VIOLATION:
        print("error: verification failed", file=stderr)
    return code


def main():
    sys.exit(run())
