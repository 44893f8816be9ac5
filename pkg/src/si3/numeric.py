"""Floating-point checks: complex RK4 trajectories, conservation drift and
functional independence.

Exact RatFns are compiled once into Python source (shared denominator
factors, complex constants) and evaluated on numpy arrays, so several
starting points integrate together.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import Poly, RatFn
from .algebra.poly import NVARS, VARS, key_exponents
from .mechanics import hamiltonian

ARGS = VARS  # x, y, z, p1, p2, p3, a, b, c, d
DEFAULT_T = 10.0
DEFAULT_DT = 1e-3
DEFAULT_STARTS = 3
DENOM_FLOOR = 1e-6
STATE_CEILING = 1e12
# random-start protocol
PARAM_SCALE = 0.25
MOMENTUM_SCALE = 0.25
ADMISSIBLE_MARGIN = 0.3
ADMISSIBLE_BOUND = 10.0
BATCH = 12
MAX_BATCHES = 4
# order check
ORDER_DT = 1e-2
ORDER_DT_MAX = 0.32
TRUNCATION_FLOOR = 1e-11


class SingularityEncountered(ArithmeticError):
    pass


class StepRejected(ArithmeticError):
    pass


class SingularPoint(ArithmeticError):
    pass


# -- compilation -------------------------------------------------------------------

def _num(c):
    z = c.to_complex()
    return repr(z.real) if z.imag == 0 else repr(z)


def _poly_src(p: Poly):
    if not p.terms:
        return "0.0"
    parts = []
    for key, c in sorted(p.coefficients().items(), reverse=True):
        ex = key_exponents(key)
        mono = "*".join(ARGS[v] if e == 1 else f"{ARGS[v]}**{e}"
                        for v, e in enumerate(ex) if e)
        coef = _num(c)
        parts.append(f"({coef})*{mono}" if mono else f"({coef})")
    return " + ".join(parts)


def compile_ratfns(funcs):
    """Compile RatFns into f(x, y, z, p1, p2, p3, a, b, c, d) -> (values, dens).

    ``dens`` lists every distinct denominator factor value, for singularity
    monitoring.
    """
    funcs = [RatFn.coerce(f) for f in funcs]
    names, lines, outs = {}, [], []
    for f in funcs:
        for fac in f.factors:
            if fac not in names:
                names[fac] = f"_f{len(names)}"
                lines.append(f"    {names[fac]} = {_poly_src(fac)}")
    for f in funcs:
        num = f"({_poly_src(f.num)})"
        den = "*".join(names[fac] if e == 1 else f"{names[fac]}**{e}" for fac, e in f.factors.items())
        outs.append(f"{num} / ({den})" if den else num)
    src = [f"def _compiled({', '.join(ARGS)}):"] + lines
    src.append(f"    return ({', '.join(outs)},), ({', '.join(names.values())}{',' if names else ''})")
    ns = {}
    exec("\n".join(src), ns)  # noqa: S102 - source generated from exact data
    fn = ns["_compiled"]
    fn.source = "\n".join(src)
    return fn


# -- system preparation ------------------------------------------------------------

class Compiled:
    """Compiled vector field and constants of one system."""

    def __init__(self, sys, n_symmetries=5):
        V = sys.potential
        self.name = getattr(sys, "name", "?")
        self.H = hamiltonian(V)
        syms = sys.symmetry_basis
        self.constants = [self.H] + [s.phase() for s in syms[:n_symmetries]]
        self.labels = ["H"] + [f"S{k + 1}" for k in range(len(self.constants) - 1)]
        self.force = compile_ratfns([-V.diff(k) for k in range(3)])
        self.consts = compile_ratfns(self.constants)
        self._all = [self.H] + [s.phase() for s in syms]
        self._grad_cache = {}

    def gradients(self, which):
        """Compiled phase-space gradients of constants (indices into H, S1..S6)."""
        key = tuple(which)
        if key not in self._grad_cache:
            fs = [self._all[k].diff(v) for k in which for v in range(6)]
            self._grad_cache[key] = compile_ratfns(fs)
        return self._grad_cache[key]


def _call(fn, state, params):
    return fn(*state, *params)


def _rhs(comp, state, params):
    """Vector field and, per column, the smallest denominator factor modulus."""
    forces, dens = _call(comp.force, state, params)
    low = np.full(state.shape[1], np.inf)
    for d in dens:
        low = np.minimum(low, np.abs(np.broadcast_to(d, low.shape)))
    p = state[3:]
    return np.array([2 * p[0], 2 * p[1], 2 * p[2], *forces]), low


def integrate(comp, start, params, t_end=DEFAULT_T, dt=DEFAULT_DT, floor=DENOM_FLOOR,
              ceiling=STATE_CEILING, masked=False):
    """Classical RK4 for x' = 2p, p' = -grad V in complex phase space.

    ``start``: array (6,) or (6, n); ``params``: (4,) or (4, n).  Returns the
    trajectory as an array (steps + 1, 6, n).  A column whose denominators
    drop below ``floor`` or whose state exceeds ``ceiling`` raises; with
    ``masked=True`` it is frozen instead and ``(traj, alive)`` is returned.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    y = np.array(start, dtype=complex)
    if y.ndim == 1:
        y = y[:, None]
    prm = np.array(params, dtype=complex)
    if prm.ndim == 1:
        prm = prm[:, None]
    prm = np.broadcast_to(prm, (4, y.shape[1]))
    steps = int(round(t_end / dt))
    traj = np.empty((steps + 1,) + y.shape, dtype=complex)
    traj[0] = y
    alive = np.ones(y.shape[1], dtype=bool)
    # poles are detected through the denominator moduli, so silence numpy
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for k in range(steps):
            k1, l1 = _rhs(comp, y, prm)
            k2, l2 = _rhs(comp, y + 0.5 * dt * k1, prm)
            k3, l3 = _rhs(comp, y + 0.5 * dt * k2, prm)
            k4, l4 = _rhs(comp, y + dt * k3, prm)
            new = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            # a NaN modulus (stage evaluated on a pole) counts as singular
            singular = ~(np.minimum(np.minimum(l1, l2), np.minimum(l3, l4)) >= floor)
            escaped = ~np.all(np.isfinite(new), axis=0) | (np.max(np.abs(new), axis=0) > ceiling)
            bad = (singular | escaped) & alive
            if bad.any():
                if not masked:
                    if (singular & alive).any():
                        raise SingularityEncountered(f"denominator below {floor} at step {k + 1}")
                    raise StepRejected(f"state left the bounded region at step {k + 1}")
                alive &= ~bad
            y = np.where(alive, new, y)
            traj[k + 1] = y
    return (traj, alive) if masked else traj


@dataclass
class DriftReport:
    system: str
    seed: int
    dt: float
    t_end: float
    steps: int
    method: str
    initial: dict = field(default_factory=dict)
    drift: dict = field(default_factory=dict)

    def max_drift(self):
        return max(self.drift.values()) if self.drift else 0.0

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def conservation(comp, traj, params):
    """Per-constant max |S(t) - S(0)| / max(1, |S(0)|) for each trajectory column."""
    steps, _, n = traj.shape
    flat = traj.transpose(1, 0, 2).reshape(6, steps * n)
    prm = np.tile(np.array(params, dtype=complex).reshape(4, -1), (1, steps))
    if prm.shape[1] != steps * n:
        prm = np.tile(prm[:, :1], (1, steps * n))
    vals, _ = _call(comp.consts, flat, prm)
    out = []
    for j in range(n):
        init, drift = {}, {}
        for lab, v in zip(comp.labels, vals):
            v = np.broadcast_to(v, (steps * n,)).reshape(steps, n)[:, j]
            s0 = v[0]
            init[lab] = [float(s0.real), float(s0.imag)]
            drift[lab] = float(np.max(np.abs(v - s0)) / max(1.0, abs(s0)))
        out.append((init, drift))
    return out


def random_starts(rng, n, momentum_scale=1.0):
    """Coordinates with 0.5 <= |x_j| <= 1.5 and random phases; complex normal
    momenta of size ``momentum_scale / 2``."""
    r = rng.uniform(0.5, 1.5, (3, n))
    ph = rng.uniform(0, 2 * np.pi, (3, n))
    x = r * np.exp(1j * ph)
    p = (rng.normal(size=(3, n)) + 1j * rng.normal(size=(3, n))) * (0.5 * momentum_scale)
    return np.vstack([x, p])


def random_params(rng, n, scale=1.0):
    """Positive real oscillator strength in [0.5, 1.5], complex couplings of
    size 0.3, all multiplied by ``scale``."""
    a = rng.uniform(0.5, 1.5, (1, n)).astype(complex)
    rest = (rng.normal(size=(3, n)) + 1j * rng.normal(size=(3, n))) * 0.3
    return np.vstack([a, rest]) * scale


def protocol_scales(sys):
    """(parameter scale, momentum scale) for a system's random draws."""
    scale = getattr(sys, "protocol_scale", None)
    return tuple(scale) if scale else (PARAM_SCALE, MOMENTUM_SCALE)


@dataclass
class Draw:
    """Admissible seeded starts with their parameters and trajectories."""
    starts: np.ndarray      # (6, k)
    params: np.ndarray      # (4, k)
    traj: np.ndarray        # (steps + 1, 6, k) at ``dt``
    dt: float
    rejected: int


def admissible_starts(sys, seed=0, starts=DEFAULT_STARTS, dt=DEFAULT_DT, t_end=DEFAULT_T,
                      comp=None, batch=BATCH, max_batches=MAX_BATCHES):
    """The first ``starts`` seeded candidates whose trajectory stays admissible.

    Candidates are drawn in batches from ``default_rng(seed)`` and integrated
    together; a trajectory is admissible when every denominator factor keeps
    modulus >= ``ADMISSIBLE_MARGIN`` and the state stays within
    ``ADMISSIBLE_BOUND``.  Rejections are counted, never hidden.
    """
    comp = comp or Compiled(sys)
    pscale, mscale = protocol_scales(sys)
    rng = np.random.default_rng(seed)
    ys, ps, trs, rejected = [], [], [], 0
    for _ in range(max_batches):
        y0 = random_starts(rng, batch, mscale)
        prm = random_params(rng, batch, pscale)
        traj, alive = integrate(comp, y0, prm, t_end, dt, floor=ADMISSIBLE_MARGIN,
                                ceiling=ADMISSIBLE_BOUND, masked=True)
        for j in range(batch):
            if len(ys) == starts:
                break
            if alive[j]:
                ys.append(y0[:, j])
                ps.append(prm[:, j])
                trs.append(traj[:, :, j])
            else:
                rejected += 1
        if len(ys) == starts:
            return Draw(np.array(ys).T, np.array(ps).T, np.stack(trs, axis=2), dt, rejected)
    raise SingularityEncountered(
        f"only {len(ys)} admissible starts among {batch * max_batches} candidates")


def simulate(sys, seed=0, dt=DEFAULT_DT, t_end=DEFAULT_T, starts=DEFAULT_STARTS, comp=None):
    """Drift reports for ``starts`` admissible seeded starts; returns
    ``(reports, rejected)``."""
    comp = comp or Compiled(sys)
    draw = admissible_starts(sys, seed, starts, dt, t_end, comp)
    reports = []
    for init, drift in conservation(comp, draw.traj, draw.params):
        reports.append(DriftReport(comp.name, seed, dt, t_end, draw.traj.shape[0] - 1, "rk4",
                                   init, drift))
    return reports, draw.rejected


@dataclass
class OrderCheck:
    system: str
    dt: float
    ratio: float
    drift: float         # max drift at dt
    drift_half: float    # max drift at dt / 2


def order_check(sys, seed=0, t_end=DEFAULT_T, starts=DEFAULT_STARTS, comp=None,
                dt=ORDER_DT, draw=None):
    """Max drift at dt over max drift at dt/2 on the admissible starts.

    The ratio only measures the integrator when truncation error dominates
    roundoff, so dt doubles until the drift at dt/2 reaches
    ``TRUNCATION_FLOOR`` (up to ``ORDER_DT_MAX``).
    """
    comp = comp or Compiled(sys)
    draw = draw or admissible_starts(sys, seed, starts, DEFAULT_DT, t_end, comp)
    cache = {}

    def drift(h):
        if h not in cache:
            traj = integrate(comp, draw.starts, draw.params, t_end, h)
            cache[h] = max(max(d.values()) for _, d in conservation(comp, traj, draw.params))
        return cache[h]

    while drift(dt / 2) < TRUNCATION_FLOOR and dt < ORDER_DT_MAX:
        dt *= 2
    da, db = drift(dt), drift(dt / 2)
    return OrderCheck(comp.name, dt, da / db if db else float("inf"), da, db)


def jacobian_rank(comp, point, params, which=(0, 1, 2, 3, 4), rtol=1e-8):
    """Numerical rank of the gradients of the chosen constants at a point."""
    fn = comp.gradients(which)
    try:
        vals, dens = fn(*[complex(v) for v in point], *[complex(v) for v in params])
    except ZeroDivisionError:
        raise SingularPoint("point is singular for the constants") from None
    if any(abs(d) < DENOM_FLOOR for d in dens):
        raise SingularPoint("point is singular for the constants")
    M = np.array(vals, dtype=complex).reshape(len(which), 6)
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0


def independence_rank(sys, point, params=(1.0, 0.3, 0.4, 0.5), comp=None,
                      which=(0, 1, 2, 3, 4)):
    """Rank of the 5x6 Jacobian of (H, S1..S4) at a phase-space point."""
    comp = comp or Compiled(sys)
    return jacobian_rank(comp, point, params, which)


def random_point(rng):
    return random_starts(rng, 1)[:, 0]


def regular_points(sys, n=10, seed=0, comp=None, max_tries=200):
    """``n`` seeded (point, params) pairs away from the singular set of V."""
    comp = comp or Compiled(sys)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(max_tries):
        pt, prm = random_point(rng), random_params(rng, 1)[:, 0]
        _, dens = comp.force(*pt, *prm)
        if all(abs(d) >= ADMISSIBLE_MARGIN for d in dens):
            out.append((pt, prm))
            if len(out) == n:
                return out
    raise SingularPoint(f"found only {len(out)} regular points")


__all__ = [
    "Compiled", "Draw", "DriftReport", "OrderCheck", "SingularPoint", "SingularityEncountered",
    "StepRejected", "admissible_starts", "compile_ratfns", "conservation", "independence_rank",
    "integrate", "jacobian_rank", "order_check", "protocol_scales", "random_params",
    "random_point", "random_starts", "regular_points", "simulate",
]
