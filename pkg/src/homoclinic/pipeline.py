"""End-to-end solve: mountain pass, Newton polish, and the full certificate."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import certify
from .constants import K0_DEFAULT, decay_roots, thresholds
from .errors import HomoclinicError, InsufficientTail, NonConvergence
from .gridfn import GridFunction, differentiate
from .mpsolve import (
    SolverSettings,
    _endpoint,
    _mountain_pass,
    _newton,
    discretization,
    fit_decay,
    hessian_eigenvalues,
    morse_index,
    residual_full,
)
from .potentials import get_potential

log = logging.getLogger(__name__)

CONTINUATION_STEP = 0.05


@dataclass
class SolveReport:
    beta: float
    potential: str
    profile: GridFunction = field(repr=False)
    c_beta: float
    residual_sup: float
    pohozaev_sup: float
    morse_index: int
    decay_fit: tuple
    min_u: float
    certificate: certify.PartitionCertificate | None
    nontrivial: bool | None = None
    above_lower_well: bool | None = None
    lowest_eigenvalues: tuple = ()
    newton_history: tuple = ()
    mountain_pass_level: float | None = None
    straight_path_max: float | None = None
    iterations: dict = field(default_factory=dict)
    settings: SolverSettings = field(default_factory=SolverSettings)
    k0: float = K0_DEFAULT
    seeded: bool = False

    def to_dict(self) -> dict:
        tau_fit, tau_theory, delta_fit = self.decay_fit
        cert = None
        if self.certificate is not None:
            cert = certify.certificate_dict(
                self.certificate, self.pohozaev_sup, self.nontrivial, self.morse_index
            )
        return {
            "beta": self.beta,
            "potential": self.potential,
            "k0": self.k0,
            "c_beta": self.c_beta,
            "residual_sup": self.residual_sup,
            "pohozaev_sup": self.pohozaev_sup,
            "morse_index": self.morse_index,
            "decay_fit": {"tau_fit": tau_fit, "tau_theory": tau_theory, "delta_fit": delta_fit},
            "min_u": self.min_u,
            "nontrivial": self.nontrivial,
            "above_lower_well": self.above_lower_well,
            "lowest_eigenvalues": list(self.lowest_eigenvalues),
            "newton_history": list(self.newton_history),
            "mountain_pass_level": self.mountain_pass_level,
            "straight_path_max": self.straight_path_max,
            "iterations": dict(self.iterations),
            "seeded_by_continuation": self.seeded,
            "settings": self.settings.to_dict(),
            "certificate": cert,
        }


def profile_columns(report: SolveReport):
    """Columns x, u, du, d2u, residual, pohozaev of the solution profile."""
    u = report.profile
    acc = report.settings.accuracy
    du = differentiate(u, 1, acc, "zero").values
    d2u = differentiate(u, 2, acc, "zero").values
    res = residual_full(u.values, u.dx, report.beta, report.potential, acc)
    poho = certify.pohozaev_residual(u, report.beta, report.potential, acc).values
    return ["x", "u", "du", "d2u", "residual", "pohozaev"], [u.x, u.values, du, d2u, res, poho]


def _certify(beta, pot, u: GridFunction, c, hist, s: SolverSettings, k0, mp=None, seeded=False):
    d = discretization(beta, pot, s)
    v = d.restrict(u.values)
    rs = float(np.abs(d.residual(v)).max())
    poho = float(np.abs(certify.pohozaev_residual(u, beta, pot, s.accuracy).values).max())
    theory = decay_roots(beta, pot.c0).tau if beta**2 < 2 * math.sqrt(pot.c0) else float("nan")
    try:
        tau_fit, delta_fit = fit_decay(u, beta, pot)
    except InsufficientTail as exc:
        log.info("decay fit skipped: %s", exc)
        tau_fit = delta_fit = float("nan")
    try:
        th = thresholds(beta, k0, "bridge" if pot.tag == "bridge" else "sh")
        cert = certify.partition(u, beta, pot, th, s.accuracy)
    except HomoclinicError as exc:
        log.info("no partition certificate: %s", exc)
        cert = None
    idx = morse_index(u, beta, pot, s)
    ev = hessian_eigenvalues(u, beta, pot, 4, s)
    iterations = {}
    if mp is not None:
        iterations = {"descent": mp.descent_iterations, "climb": mp.climb_iterations}
    iterations["newton"] = len(hist) - 1
    return SolveReport(
        beta=beta,
        potential=pot.tag,
        profile=u,
        c_beta=float(c),
        residual_sup=rs,
        pohozaev_sup=poho,
        morse_index=idx,
        decay_fit=(tau_fit, theory, delta_fit),
        min_u=float(u.values.min()),
        certificate=cert,
        nontrivial=certify.nontriviality_check(u, beta) if pot.tag == "bridge" else None,
        above_lower_well=None if pot.lower_well is None else bool(u.values.min() > pot.lower_well),
        lowest_eigenvalues=tuple(float(e) for e in ev),
        newton_history=tuple(hist),
        mountain_pass_level=None if mp is None else mp.c,
        straight_path_max=None if mp is None else mp.straight_max,
        iterations=iterations,
        settings=s,
        k0=k0,
        seeded=seeded,
    )


def solve(beta: float, potential="bridge", settings: SolverSettings | None = None,
          k0: float = K0_DEFAULT, initial: GridFunction | None = None) -> SolveReport:
    """Solve and certify at one wave speed.

    Without ``initial`` the mountain pass supplies the Newton start. If the
    climbing phase hits its iteration cap, Newton is still tried from the
    best iterate before giving up.
    """
    s = settings or SolverSettings()
    pot = get_potential(potential)
    d = discretization(beta, pot, s)
    mp = None
    if initial is not None:
        v0 = d.restrict(initial.values)
    else:
        try:
            mp = _mountain_pass(d, _endpoint(d), s)
            v0 = mp.u
        except NonConvergence as exc:
            if exc.best is None:
                raise
            log.warning("%s; trying Newton from the best iterate", exc)
            v0 = d.restrict(exc.best.values)
    v, info = _newton(d, v0, s.newton_tol, s.newton_max_iter)
    return _certify(beta, pot, d.grid(v), d.energy(v), info.history, s, k0, mp, initial is not None)


def _continue(report, target, pot, s, k0):
    """Newton continuation from ``report`` to ``target`` in steps <= 0.05."""
    steps = max(1, math.ceil(abs(target - report.beta) / CONTINUATION_STEP - 1e-9))
    u = report.profile
    for b in np.linspace(report.beta, target, steps + 1)[1:]:
        d = discretization(float(b), pot, s)
        v, info = _newton(d, d.restrict(u.values), s.newton_tol, s.newton_max_iter)
        u = d.grid(v)
    return _certify(target, pot, u, d.energy(v), info.history, s, k0, None, True)


def sweep(betas, potential="bridge", settings: SolverSettings | None = None,
          k0: float = K0_DEFAULT, continuation: bool = True) -> list[SolveReport]:
    """Solve over a grid of wave speeds, ordered by beta.

    With continuation the median beta is solved by mountain pass and the
    rest are reached by Newton continuation outward from it; a point whose
    continuation fails falls back to a fresh mountain-pass solve.
    """
    s = settings or SolverSettings()
    pot = get_potential(potential)
    grid = sorted(float(b) for b in betas)
    if not continuation:
        return [solve(b, pot, s, k0) for b in grid]
    mid = len(grid) // 2
    out = {mid: solve(grid[mid], pot, s, k0)}
    for order in (range(mid + 1, len(grid)), range(mid - 1, -1, -1)):
        prev = out[mid]
        for i in order:
            try:
                rep = _continue(prev, grid[i], pot, s, k0)
            except HomoclinicError as exc:
                log.warning("continuation to beta=%g failed (%s); solving afresh", grid[i], exc)
                rep = solve(grid[i], pot, s, k0)
            out[i] = prev = rep
    return [out[i] for i in range(len(grid))]


SWEEP_HEADER = ["beta", "c_beta", "morse_index", "tau_fit", "tau_theory", "min_u"]


def sweep_rows(reports):
    return [
        [r.beta, r.c_beta, r.morse_index, r.decay_fit[0], r.decay_fit[1], r.min_u] for r in reports
    ]
