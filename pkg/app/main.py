"""Command-line runner for the deformed Fock space simulator.

    ybfock verify  --model monotone --window 0..3 --nmax 3
    ybfock ergodic --model monotone --observable "a(0)c(0)" --target vacuum-projection --n 1..25
    ybfock reduce  "a(1)c(1)a(3)"
    ybfock states  "2*1 + 3*a(5)c(5)" --gamma 0.5
    ybfock report  reports/*.json

Exit codes: 0 pass, 1 check failure, 2 usage or configuration error.
"""
import argparse
import logging
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Literal

import numpy as np
import sympy
from dotenv import dotenv_values
from pydantic import BaseModel, Field, ValidationError, field_validator

from app.boolean_model import (
    BooleanOp,
    boolean_annihilate,
    boolean_create,
    boolean_invariant_state,
    e_mixing_curve,
    infinity_state as boolean_infinity_state,
    rank_one,
    scalar_op,
    vacuum_state as boolean_vacuum_state,
)
from app.config import settings
from app.ergodic_lab import cesaro_distance, materialize, observable_decay_bound, required_window
from app.errors import PreconditionError, SizeCapError
from app.expressions import Expression, parse_expression
from app.fock_engine import build_fock
from app.monotone_symbolic import (
    format_coefficient,
    format_number,
    format_polynomial,
    infinity_state,
    infinity_witness,
    invariant_state,
    oracle_window,
    simplify,
    vacuum_expectation,
    vacuum_state,
)
from app.reports import VerifyReport, summarize, write_atomic
from app.specialized_fock import specialized_monotone_fock
from app.suites import run_suite
from app.yb_catalog import Kind, ModeWindow, build_standard

logger = logging.getLogger(__name__)

_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")
_RANK_ONE = re.compile(r"^\s*rank-one\s+e_(#|-?\d+)\s*,\s*e_(#|-?\d+)\s*$")

Target = Literal["vacuum-expectation", "vacuum-projection", "zero", "identity"]


def parse_int_list(text: str) -> list[int]:
    """``A..B`` (inclusive) or a comma-separated list."""
    m = _RANGE.match(text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"expected A..B or a comma-separated list of integers, got {text!r}") from None


class ExperimentConfig(BaseModel):
    """Settings for one command; keys match the config-file keys."""
    model: str = "monotone"
    window: str | None = None
    nmax: int | None = Field(None, ge=1)
    tol: float = Field(default_factory=lambda: settings.tolerance, gt=0)
    observable: str | None = None
    target: Target = "vacuum-expectation"
    n: str = "1..20"
    gamma: float | None = Field(None, ge=0, le=1)
    subseq: str | None = None
    seed: int = Field(default_factory=lambda: settings.seed)
    out: str | None = None

    model_config = {"extra": "forbid"}

    @field_validator("model")
    @classmethod
    def _known_kinds(cls, value: str) -> str:
        for name in value.split(","):
            Kind.parse(name.strip())
        return value

    @field_validator("window")
    @classmethod
    def _window_syntax(cls, value: str | None) -> str | None:
        if value is not None:
            ModeWindow.parse(value)
        return value

    @field_validator("n", "subseq")
    @classmethod
    def _int_list_syntax(cls, value: str | None) -> str | None:
        if value is not None and not parse_int_list(value):
            raise ValueError("list is empty")
        return value

    @property
    def kinds(self) -> list[Kind]:
        return [Kind.parse(name.strip()) for name in self.model.split(",")]

    @property
    def kind(self) -> Kind:
        kinds = self.kinds
        if len(kinds) != 1:
            raise PreconditionError(f"this command takes one model, got {self.model!r}")
        return kinds[0]

    @property
    def mode_window(self) -> ModeWindow | None:
        return None if self.window is None else ModeWindow.parse(self.window)

    @property
    def n_list(self) -> list[int]:
        return parse_int_list(self.n)

    @property
    def subsequence(self) -> list[int] | None:
        return None if self.subseq is None else parse_int_list(self.subseq)


def read_config_file(path: str | Path) -> dict[str, str]:
    """Read a ``key=value`` file in dotenv syntax (comments, quoting, escapes)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    values = dotenv_values(path, interpolate=False)
    missing = [key for key, value in values.items() if value is None]
    if missing:
        raise ValueError(f"{path}: expected key=value for {', '.join(missing)}")
    return values


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file values overlaid by the flags that were given."""
    values = read_config_file(args.config) if args.config else {}
    for key in ExperimentConfig.model_fields:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return ExperimentConfig(**values)


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _format_complex(value: complex, tol: float) -> str:
    value = complex(value)
    if abs(value.imag) <= tol:
        return format_number(round(value.real, 12))
    return f"({format_number(round(value.real, 12))},{format_number(round(value.imag, 12))})"


# verify


def cmd_verify(config: ExperimentConfig) -> int:
    window = config.mode_window or ModeWindow(0, 2)
    nmax = config.nmax or 3
    if window.d ** nmax > settings.max_tensor_dim:
        raise SizeCapError(window.d ** nmax, settings.max_tensor_dim)
    kinds = config.kinds

    def run(kind: Kind) -> VerifyReport:
        checks = run_suite(kind, window, nmax, config.tol, config.seed)
        return VerifyReport(
            model=kind.value,
            window=str(window),
            nmax=nmax,
            seed=config.seed,
            tolerance=config.tol,
            checks=checks,
        )

    with ThreadPoolExecutor(max_workers=len(kinds)) as pool:
        reports = list(pool.map(run, kinds))

    for report in reports:
        if config.out and len(reports) > 1:
            write_atomic(Path(config.out) / f"verify-{report.model}.json", report.to_json())
        else:
            _emit(report.to_json(), config.out)
        failed = len(report.failures)
        logger.info(f"{report.model}: {len(report.checks) - failed} passed, {failed} failed")
    return 0 if all(r.passed for r in reports) else 1


# ergodic


def _boolean_from_expression(expr: Expression, window: ModeWindow) -> BooleanOp:
    total = scalar_op(window, 0)
    for coeff, word in expr.observable():
        op = scalar_op(window, 1)
        for letter in word:
            factor = boolean_create(window, letter.mode) if letter.is_creator else boolean_annihilate(window, letter.mode)
            op = op @ factor
        total = total + coeff * op
    return total


def _boolean_observable(text: str, window: ModeWindow) -> BooleanOp:
    m = _RANK_ONE.match(text)
    if m:
        return rank_one(window, m.group(1), m.group(2))
    return _boolean_from_expression(parse_expression(text), window)


def _boolean_support(text: str) -> tuple[int, int] | None:
    m = _RANK_ONE.match(text)
    if m:
        modes = [int(label) for label in m.groups() if label != "#"]
        return (min(modes), max(modes)) if modes else None
    supports = [w.support for _, w in parse_expression(text).observable() if w.support is not None]
    if not supports:
        return None
    return min(s[0] for s in supports), max(s[1] for s in supports)


def _ergodic_boolean(config: ExperimentConfig) -> int:
    n_list = config.n_list
    subsequence = config.subsequence or list(range(1, max(n_list) + 1))
    window = config.mode_window
    if window is None:
        support = _boolean_support(config.observable) or (0, 0)
        window = ModeWindow(support[0], support[1] + max(subsequence[: max(n_list)]))
    x = _boolean_observable(config.observable, window)
    curve = e_mixing_curve(x, subsequence, n_list)
    _emit(curve.to_csv(config.seed), config.out)
    return 0 if curve.within_bounds(config.tol) else 1


def cmd_ergodic(config: ExperimentConfig) -> int:
    if not config.observable:
        raise PreconditionError("ergodic needs --observable")
    kind = config.kind
    if kind is Kind.BOOLEAN:
        return _ergodic_boolean(config)
    n_list = config.n_list
    obs = parse_expression(config.observable).observable()
    window = config.mode_window
    if window is None:
        # one spare mode above the last shift
        lo, hi = required_window(obs, max(n_list) - 1) or (0, 0)
        window = ModeWindow(lo, hi + 1)
    nmax = config.nmax or 2
    if kind is Kind.MONOTONE:
        model = specialized_monotone_fock(window, nmax)
    else:
        model = build_fock(build_standard(kind, window), nmax)
    logger.info(f"ergodic {kind.value} on {window}, levels {model.level_dims}")

    if config.target == "vacuum-projection":
        target = model.vacuum_projection()
    elif config.target == "zero":
        target = model.zero()
    elif config.target == "identity":
        target = model.identity()
    else:
        vac = model.vacuum()
        omega = complex(np.vdot(vac, materialize(model, obs).matrix @ vac))
        target = model.identity() * omega

    curve = cesaro_distance(model, obs, target, n_list, observable_decay_bound(model, obs))
    _emit(curve.to_csv(config.seed), config.out)
    return 0 if curve.within_bounds(config.tol) else 1


# reduce and states


def _expression_arg(args: argparse.Namespace, config: ExperimentConfig) -> Expression:
    text = args.expression if args.expression is not None else config.observable
    if not text:
        raise PreconditionError("no expression given")
    return parse_expression(text)


def cmd_reduce(expr: Expression, config: ExperimentConfig) -> int:
    if config.kind is not Kind.MONOTONE:
        raise PreconditionError("reduce works in the monotone algebra only")
    p = simplify(expr.to_polynomial())
    parts = [
        format_polynomial(p),
        f"ω={format_coefficient(vacuum_state(p))}",
        f"ω_∞={format_coefficient(infinity_state(p))}",
    ]
    if config.gamma is not None:
        gamma = sympy.Rational(str(config.gamma))
        parts.append(f"φ={format_coefficient(invariant_state(gamma, p))}")
    _emit("; ".join(parts) + "\n", config.out)
    return 0


def _monotone_states(expr: Expression, config: ExperimentConfig) -> int:
    p = expr.to_polynomial()
    omega, omega_inf = vacuum_state(p), infinity_state(p)
    lines = [f"ω={format_coefficient(omega)}", f"ω_∞={format_coefficient(omega_inf)}"]
    if config.gamma is not None:
        gamma = sympy.Rational(str(config.gamma))
        lines.append(f"φ={format_coefficient(invariant_state(gamma, p))}")
    lo, hi = oracle_window(p)
    window = ModeWindow(lo, hi)
    n_max = min(window.d, p.max_length + 1)
    vac_res = abs(vacuum_expectation(p, window, max(n_max, 1)) - complex(omega))
    inf_res = abs(infinity_witness(p, window) - complex(omega_inf))
    lines.append(f"residual ω vs <pΩ,Ω> = {vac_res:.3e}")
    lines.append(f"residual ω_∞ vs <p e_({lo}), e_({lo})> = {inf_res:.3e}")
    _emit("\n".join(lines) + "\n", config.out)
    return 0 if max(vac_res, inf_res) <= config.tol else 1


def _boolean_states(expr: Expression, config: ExperimentConfig) -> int:
    window = config.mode_window
    if window is None:
        support = _boolean_support(str(expr)) or (0, 0)
        window = ModeWindow(*support)
    x = _boolean_from_expression(expr, window)
    lines = [
        f"ω_#={_format_complex(boolean_vacuum_state(x), config.tol)}",
        f"ω_∞={_format_complex(boolean_infinity_state(x), config.tol)}",
    ]
    if config.gamma is not None:
        lines.append(f"φ={_format_complex(boolean_invariant_state(config.gamma, x), config.tol)}")
    _emit("\n".join(lines) + "\n", config.out)
    return 0


def cmd_states(expr: Expression, config: ExperimentConfig) -> int:
    kind = config.kind
    if kind is Kind.MONOTONE:
        return _monotone_states(expr, config)
    if kind is Kind.BOOLEAN:
        return _boolean_states(expr, config)
    raise PreconditionError(f"states are defined for monotone and boolean models, not {kind.value}")


# report


def cmd_report(paths: list[str], config: ExperimentConfig) -> int:
    summary = summarize(paths)
    _emit(summary.to_json(), config.out)
    return 0 if summary.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override its values")
    common.add_argument("--model", help="kind, or comma-separated kinds for verify")
    common.add_argument("--window", help="mode window LO..HI")
    common.add_argument("--nmax", type=int, help="highest particle level")
    common.add_argument("--tol", type=float, help="residual tolerance")
    common.add_argument("--observable", help="word expression, or 'rank-one e_I,e_J' for boolean")
    common.add_argument("--target", help="vacuum-expectation, vacuum-projection, zero or identity")
    common.add_argument("--n", help="Cesaro lengths: A..B or a comma-separated list")
    common.add_argument("--gamma", type=float, help="weight of the vacuum state, in [0, 1]")
    common.add_argument("--subseq", help="shift subsequence for the boolean model")
    common.add_argument("--seed", type=int, help="seed recorded in every report")
    common.add_argument("--out", help="output file (directory when verifying several models)")

    parser = argparse.ArgumentParser(prog="ybfock", description="Yang-Baxter deformed Fock space experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the residual suite for one or more models")
    sub.add_parser("ergodic", parents=[common], help="Cesaro mixing curve as CSV")
    for name, text in (("reduce", "monotone normal form and states"), ("states", "vacuum, infinity and invariant states")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("expression", nargs="?", help="word expression (defaults to --observable)")
    p = sub.add_parser("report", parents=[common], help="aggregate verify reports")
    p.add_argument("paths", nargs="+", help="JSON reports")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        config = build_config(args)
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "ergodic":
            return cmd_ergodic(config)
        if args.command == "reduce":
            return cmd_reduce(_expression_arg(args, config), config)
        if args.command == "states":
            return cmd_states(_expression_arg(args, config), config)
        return cmd_report(args.paths, config)
    except ValidationError as exc:
        logger.error(f"invalid configuration: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        logger.error(f"{args.command} failed: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
