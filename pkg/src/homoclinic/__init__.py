"""Homoclinic orbits of u'''' + β²u'' + V'(u) = 0 by mountain pass and Newton,
with the inequality lab and threshold constants behind the energy certificate."""

__version__ = "0.1.0"

from .constants import (
    a_star,
    beta_star_bisect,
    compute_beta0,
    condition_1_44,
    decay_roots,
    paper_constants,
    solve_k1_literal,
    solve_k2,
    thresholds,
    u_star_bridge,
    u_star_sh,
)
from .errors import *  # noqa: F401,F403
from .gridfn import GridFunction, derivatives, differentiate, integrate, read_csv, write_csv
from .mpsolve import (
    SolverSettings,
    energy,
    fit_decay,
    hessian_eigenvalues,
    morse_index,
    mountain_pass,
    newton_polish,
    newton_solve,
    residual,
)
from .pipeline import SolveReport, solve, sweep
from .potentials import BRIDGE, SWIFT_HOHENBERG_SHIFTED, get_potential
