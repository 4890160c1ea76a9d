"""Command-line front end.

Exit codes: 0 success, 2 solver failure, 3 invalid input.
"""

from __future__ import annotations

import argparse
import datetime
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, certify, constants, ineqlab, report
from .errors import (
    EndpointFailure,
    HomoclinicError,
    MountainCollapse,
    NonConvergence,
    NumericalFailure,
    SingularJacobian,
)
from .gridfn import read_csv
from .mpsolve import SolverSettings, morse_index, residual
from .pipeline import SWEEP_HEADER, profile_columns, solve, sweep, sweep_rows
from .potentials import get_potential

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_INPUT = 3

SOLVER_ERRORS = (NonConvergence, MountainCollapse, SingularJacobian, NumericalFailure, EndpointFailure)
INEQUALITIES = ("l1", "l2", "quadform", "navier", "beam", "clamped")
DEFAULT_SWEEP = "0.3,0.4,0.5,0.6,0.7"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    beta: float | None = None
    k0: float = constants.K0_DEFAULT
    potential: str = "bridge"
    L: float = 40.0
    N: int = 2001
    P: int = 41
    tol: float = 1e-8
    max_iter: int = 5000
    seed: int = 0
    output_path: str | None = None

    def validate(self):
        if self.beta is not None and not self.beta > 0:
            raise UsageError(f"--beta must be positive, got {self.beta}")
        if not self.k0 > 0:
            raise UsageError(f"--k0 must be positive, got {self.k0}")
        if not self.L > 0:
            raise UsageError(f"--domain-length must be positive, got {self.L}")
        if self.N < 9 or self.N % 2 == 0:
            raise UsageError(f"--grid-points must be odd and at least 9, got {self.N}")
        if self.P < 3:
            raise UsageError(f"--path-points must be at least 3, got {self.P}")
        if not self.tol > 0:
            raise UsageError(f"--tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise UsageError(f"--max-iter must be positive, got {self.max_iter}")

    def settings(self) -> SolverSettings:
        return SolverSettings(L=self.L, N=self.N, P=self.P, newton_tol=self.tol,
                              max_iter=self.max_iter, seed=self.seed)


def _common(p):
    p.add_argument("--beta", type=float)
    p.add_argument("--k0", type=float, default=constants.K0_DEFAULT)
    p.add_argument("--potential", choices=("bridge", "sh"), default="bridge")
    p.add_argument("--domain-length", dest="L", type=float, default=40.0)
    p.add_argument("--grid-points", dest="N", type=int, default=2001)
    p.add_argument("--path-points", dest="P", type=int, default=41)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", dest="output_path")
    p.add_argument("--no-meta", dest="no_meta", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="homoclinic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("constants", "ustar", "astar", "beta-star", "decay", "solve"):
        _common(sub.add_parser(name))
    p = sub.add_parser("inequality")
    p.add_argument("which", choices=INEQUALITIES)
    _common(p)
    p = sub.add_parser("sweep")
    p.add_argument("--betas", default=DEFAULT_SWEEP, help="comma-separated wave speeds")
    _common(p)
    p = sub.add_parser("certify")
    p.add_argument("profile", help="profile CSV with columns x,u (or x,value)")
    _common(p)
    return parser


def _need_beta(cfg):
    if cfg.beta is None:
        raise UsageError(f"{cfg.command} requires --beta")
    return cfg.beta


def _meta(args):
    if args.no_meta:
        return None
    return {
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def _emit(text, path):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _json(payload, args, cfg):
    meta = _meta(args)
    if meta is not None:
        payload = dict(payload, meta=meta)
    _emit(report.dumps(payload), cfg.output_path)


def _cmd_constants(cfg, args):
    _json(constants.constants_report(cfg.k0), args, cfg)


def _cmd_ustar(cfg, args):
    th = constants.thresholds(_need_beta(cfg), cfg.k0, cfg.potential)
    _json(constants.thresholds_report(th), args, cfg)


def _cmd_astar(cfg, args):
    beta = _need_beta(cfg)
    out = constants.a_star_details(beta, cfg.k0)
    holds, lhs, rhs = constants.condition_1_44(beta, cfg.k0)
    out["condition"] = {"holds": holds, "lhs": lhs, "rhs": rhs}
    _json(out, args, cfg)


def _cmd_beta_star(cfg, args):
    _json(constants.beta_star_report(cfg.k0), args, cfg)


def _cmd_decay(cfg, args):
    _json(asdict(constants.decay_roots(_need_beta(cfg), get_potential(cfg.potential).c0)), args, cfg)


def _inequality(cfg, args):
    which = args.which
    if which == "l1":
        ks = [2.0, constants.solve_k1_literal(), 2.34, 2.5, 3.0]
        rows = ineqlab.l1_sweep(ks, [1e-3, 0.1, 0.5, 1, 2, 5, 10, 20])
        _emit(report.csv_text(["k", "a", "M_a", "sign"], rows), cfg.output_path)
        return
    if which == "l2":
        ks = [1.0 + 0.025 * i for i in range(1, 61)] + [constants.solve_k2()]
        rows = ineqlab.l2_sweep(sorted(ks))
        _emit(report.csv_text(["k", "value"], rows), cfg.output_path)
        return
    if which == "quadform":
        rng = np.random.default_rng(cfg.seed)
        worst = math.inf
        values = []
        for _ in range(200):
            a = float(rng.uniform(0.5, 5.0))
            q = ineqlab.quad_form(ineqlab.random_zero_ends(rng, a), math.sqrt(2), 1.0, "zero-ends")
            values.append(q.value)
            worst = min(worst, q.value / q.scale)
        out = {"trials": 200, "k": 1.0, "beta": math.sqrt(2), "seed": cfg.seed,
               "min_value": min(values), "min_relative": worst, "all_nonnegative": worst >= -1e-8}
    elif which == "navier":
        out = {"cases": [
            {"a": a, "closed_form": ineqlab.navier_first_eigen(a),
             "discrete": ineqlab.navier_first_eigen_discrete(a)}
            for a in (0.5, 1.0, math.pi / 2, 2.0)
        ]}
    elif which == "beam":
        ratio, w = ineqlab.beam_ratio(1.0)
        out = {"a": 1.0, "ratio": ratio, "discrete_minimum": ineqlab.beam_ratio_discrete(1.0),
               "witness_max": float(np.abs(w.values).max())}
    else:
        betas = [cfg.beta] if cfg.beta is not None else [0.5, 1.0]
        out = {"cases": [{"beta": b, "defect": ineqlab.clamped_even_check(b)} for b in betas]}
    _json(out, args, cfg)


def _cmd_solve(cfg, args):
    rep = solve(_need_beta(cfg), cfg.potential, cfg.settings(), cfg.k0)
    _json(rep.to_dict(), args, cfg)
    if cfg.output_path:
        header, cols = profile_columns(rep)
        path = Path(cfg.output_path)
        path.with_name(path.stem + ".profile.csv").write_text(
            report.csv_text(header, zip(*cols))
        )


def _cmd_sweep(cfg, args):
    try:
        betas = [float(b) for b in args.betas.split(",") if b.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --betas: {exc}") from exc
    if not betas or any(not b > 0 for b in betas):
        raise UsageError("--betas needs positive values")
    reps = sweep(betas, cfg.potential, cfg.settings(), cfg.k0)
    _emit(report.csv_text(SWEEP_HEADER, sweep_rows(reps)), cfg.output_path)


def _cmd_certify(cfg, args):
    beta = _need_beta(cfg)
    try:
        u = read_csv(args.profile)
    except OSError as exc:
        raise UsageError(f"cannot read {args.profile}: {exc}") from exc
    pot = get_potential(cfg.potential)
    th = constants.thresholds(beta, cfg.k0, cfg.potential)
    cert = certify.partition(u, beta, pot, th)
    poho = float(np.abs(certify.pohozaev_residual(u, beta, pot).values).max())
    nontrivial = certify.nontriviality_check(u, beta) if pot.tag == "bridge" else None
    out = certify.certificate_dict(cert, poho, nontrivial, morse_index(u, beta, pot))
    out["residual_sup"] = float(np.abs(residual(u, beta, pot).values).max())
    _json(out, args, cfg)


COMMANDS = {
    "constants": _cmd_constants,
    "ustar": _cmd_ustar,
    "astar": _cmd_astar,
    "beta-star": _cmd_beta_star,
    "decay": _cmd_decay,
    "inequality": _inequality,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "certify": _cmd_certify,
}


def _configure_logging():
    level = os.environ.get("HOMOCLINIC_LOG", "error").lower()
    logging.basicConfig(
        level={"debug": logging.DEBUG, "info": logging.INFO}.get(level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def run(argv=None) -> int:
    _configure_logging()
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig(args.command, args.beta, args.k0, args.potential, args.L, args.N,
                        args.P, args.tol, args.max_iter, args.seed, args.output_path)
        cfg.validate()
        COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except SOLVER_ERRORS as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (HomoclinicError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main():
    sys.exit(run())
