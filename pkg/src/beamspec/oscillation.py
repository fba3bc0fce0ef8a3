"""Sign-propagation and transformation machinery for one-span solutions.

Four independent probes live here:

* positivity_propagation: a solution whose quasi-derivative quadruple starts
  nonnegative (and not identically zero) at one end stays strictly positive,
  component by component, across the span.  Backward runs use the adjusted
  pattern (u, -u', u'', -Tu).
* leighton_nehari_transform: the classical change of variables built from the
  gauge equation (sigma*h')' = q*h, h(a)=1, h'(a)=0, which removes the
  first-order term.  With q = 0 it reduces to the identity.
* transform_identity_residual: dual-path check that integrating in the
  original variable and in the warped variable produces states linked by the
  transform's derivative relations.
* simple_zero_scan / dim_check: interior zeros of mass-free modes are simple,
  and the solution space pinned by one extra joint condition stays
  one-dimensional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .config import CoefficientProfile, horner
from .fundamental import span_pair
from .quasi import DEFAULT_REL_TOL, DEFAULT_STATIONS, _trajectories

VIOLATION_TOL = -1e-12
DIM_ZERO_REL = 1e-8


class TheoryViolationError(RuntimeError):
    """A mathematically guaranteed sign condition failed numerically."""


@dataclass(frozen=True)
class PropagationResult:
    passed: bool
    x: float | None = None
    component: int | None = None
    value: float | None = None


_BACKWARD_SIGNS = np.array([1.0, -1.0, 1.0, -1.0])
_FORWARD_SIGNS = np.array([1.0, 1.0, 1.0, 1.0])


def positivity_propagation(profile, lambda_like, init, direction="forward",
                           a=None, b=None, rel_tol=DEFAULT_REL_TOL,
                           n_stations=DEFAULT_STATIONS):
    """Propagate a sign-definite quadruple and check it stays positive.

    Forward runs start at a with all four components >= 0; backward runs
    start at b with (u, -u', u'', -Tu) >= 0.  Either way the initial state
    must not be identically zero.  Stations beyond the start must show the
    (sign-adjusted) components strictly positive; a value below -1e-12
    counts as a violation and is reported with its location.
    """
    if lambda_like <= 0:
        raise ValueError("lambda_like must be > 0")
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    lo, hi = profile.interval
    a = lo if a is None else a
    b = hi if b is None else b
    if not (lo - 1e-12 <= a < b <= hi + 1e-12):
        raise ValueError(f"[{a:g}, {b:g}] must lie inside the span [{lo:g}, {hi:g}]")
    init = np.asarray(init, dtype=float)
    signs = _FORWARD_SIGNS if direction == "forward" else _BACKWARD_SIGNS
    adjusted0 = init * signs
    if np.any(adjusted0 < 0):
        raise ValueError("initial quadruple violates the direction's sign pattern")
    if not np.any(adjusted0 > 0):
        raise ValueError("initial quadruple must not be identically zero")

    x_from, x_to = (a, b) if direction == "forward" else (b, a)
    traj = _trajectories(profile, lambda_like, x_from, x_to, [init],
                         rel_tol, n_stations, scaled=True)[0]
    adjusted = traj.states[1:] * signs
    bad = np.argwhere(adjusted < VIOLATION_TOL)
    if bad.size:
        i, comp = bad[0]
        return PropagationResult(
            passed=False,
            x=float(traj.xs[1 + i]),
            component=int(comp),
            value=float(adjusted[i, comp]),
        )
    return PropagationResult(passed=True)


@dataclass(frozen=True)
class TransformData:
    """Gauge function, warped coordinate and warped coefficients on [a, b]."""

    a: float
    b: float
    gamma: float
    xs: np.ndarray
    h: np.ndarray
    h_flux: np.ndarray        # sigma * h'
    t: np.ndarray             # warped coordinate, t(a)=a, t(b)=b, increasing
    sigma_tilde: np.ndarray
    rho_tilde: np.ndarray


def leighton_nehari_transform(profile, a, b, rel_tol=DEFAULT_REL_TOL,
                              n_stations=257):
    """Solve the gauge equation and build the warped problem data.

    The warped coefficients are chosen so the warp preserves the equation
    exactly (same eigenvalues): with c = gamma/(b - a),

        sigma_tilde = (h/c)**3 * sigma,   rho_tilde = c * rho / h.

    With q = 0 the gauge is identically 1, gamma = b - a, and the warp is
    the identity.
    """
    lo, hi = profile.interval
    if not (lo - 1e-12 <= a < b <= hi + 1e-12):
        raise ValueError(f"[{a:g}, {b:g}] must lie inside the span [{lo:g}, {hi:g}]")
    sig_c, q_c, rho_c = profile.sigma, profile.q, profile.rho

    def rhs(x, y):
        # y = (h, sigma*h', integral of h)
        q = horner(q_c, x)
        if q < 0.0:
            q = 0.0
        return [y[1] / horner(sig_c, x), q * y[0], y[0]]

    xs = np.linspace(a, b, n_stations)
    sol = solve_ivp(rhs, (a, b), [1.0, 0.0, 0.0], method="DOP853",
                    rtol=max(rel_tol / 10.0, 2.3e-14), atol=rel_tol * 1e-6,
                    t_eval=xs, dense_output=False)
    if not sol.success:
        raise RuntimeError(f"gauge integration failed: {sol.message}")
    h = sol.y[0]
    flux = sol.y[1]
    acc = sol.y[2]
    if np.any(h <= 0.0):
        i = int(np.argmax(h <= 0.0))
        raise TheoryViolationError(
            f"gauge function nonpositive at x={xs[i]:.6g} (value {h[i]:.6g})")
    gamma = float(acc[-1])
    if gamma <= 0.0:
        raise TheoryViolationError("gauge integral must be positive")
    t = (b - a) / gamma * acc + a
    if np.any(np.diff(t) <= 0.0):
        raise TheoryViolationError("warped coordinate is not strictly increasing")
    c = gamma / (b - a)
    sig = np.polynomial.polynomial.polyval(xs, sig_c)
    rho = np.polynomial.polynomial.polyval(xs, rho_c)
    return TransformData(
        a=a, b=b, gamma=gamma, xs=xs, h=h, h_flux=flux, t=t,
        sigma_tilde=(h / c) ** 3 * sig,
        rho_tilde=c * rho / h,
    )


def transform_identity_residual(profile, a, b, lambda_like, init,
                                rel_tol=DEFAULT_REL_TOL, n_check=65):
    """Dual-path mismatch between original and warped integrations.

    The original equation is integrated in x; the warped equation (which has
    no first-order term) is integrated in t alongside the warp map itself.
    At matched points the warped state must equal the image of the original
    state under the warp's derivative relations:

        W1 = u,   W2 = c*u'/h,   W3 = (h*(sigma*u'') - u'*(sigma*h'))/c,
        W4 = Tu,              with c = gamma/(b - a).

    Returns the worst relative mismatch over the four components.  Each
    component is scaled by its own range, floored at 1e-3 of the overall
    state range so identically-vanishing components are not compared
    against their own integration noise.
    """
    if lambda_like < 0:
        raise ValueError("lambda_like must be >= 0")
    td = leighton_nehari_transform(profile, a, b, rel_tol)
    c = td.gamma / (b - a)
    x_traj = _trajectories(profile, lambda_like, a, b, [init], rel_tol,
                           n_stations=max(n_check, 65), scaled=False)[0]

    sig_c, q_c, rho_c = profile.sigma, profile.q, profile.rho

    def rhs(t, y):
        # y = (x, h, sigma*h', W1, W2, W3, W4); the warped system has q = 0
        x, h = y[0], y[1]
        sig = horner(sig_c, x)
        q = horner(q_c, x)
        if q < 0.0:
            q = 0.0
        dxdt = c / h
        sigma_tilde = (h / c) ** 3 * sig
        rho_tilde = c * horner(rho_c, x) / h
        return [
            dxdt,
            (y[2] / sig) * dxdt,
            q * c,
            y[4],
            y[5] / sigma_tilde,
            y[6],
            lambda_like * rho_tilde * y[3],
        ]

    init = np.asarray(init, dtype=float)
    y0 = [a, 1.0, 0.0, init[0], c * init[1], init[2] / c, init[3]]
    ts = np.linspace(a, b, n_check)
    sol = solve_ivp(rhs, (a, b), y0, method="DOP853",
                    rtol=max(rel_tol / 10.0, 2.3e-14), atol=rel_tol * 1e-6,
                    t_eval=ts)
    if not sol.success:
        raise RuntimeError(f"warped integration failed: {sol.message}")

    images = np.empty((n_check, 4))
    for i in range(n_check):
        x_t, h_t, flux_t = sol.y[0, i], sol.y[1, i], sol.y[2, i]
        w = x_traj.state_at(min(max(x_t, a), b))
        images[i] = (w[0], c * w[1] / h_t, (h_t * w[2] - w[1] * flux_t) / c, w[3])
    warped = sol.y[3:7].T
    per_component = np.max(np.abs(images), axis=0)
    overall = max(float(np.max(per_component)), 1e-300)
    scales = np.maximum(per_component, 1e-3 * overall)
    return float(np.max(np.abs(warped - images) / scales))


@dataclass(frozen=True)
class ZeroInfo:
    x: float
    slope: float
    simple: bool


def simple_zero_scan(system, pair, rel_tol=DEFAULT_REL_TOL, slope_rel=1e-6):
    """Locate interior sign-change zeros of a mass-free mode; check simplicity.

    Each zero's |u'| must exceed slope_rel times the mode's slope scale.
    Only defined for systems with mass = 0.
    """
    if system.mass != 0:
        raise ValueError("simple_zero_scan requires mass = 0")
    lam = pair.lam
    lpair = span_pair(system.left, lam, rel_tol)
    rpair = span_pair(system.right, lam, rel_tol)
    a_, b_, c_, d_ = pair.coeffs

    def state(x):
        if x <= 0.0:
            return a_ * lpair[0].state_at(x) + b_ * lpair[1].state_at(x)
        return c_ * rpair[0].state_at(x) + d_ * rpair[1].state_at(x)

    xs = np.concatenate([lpair[0].xs, rpair[0].xs[::-1][1:]])
    us = np.concatenate([
        a_ * lpair[0].states[:, 0] + b_ * lpair[1].states[:, 0],
        (c_ * rpair[0].states[:, 0] + d_ * rpair[1].states[:, 0])[::-1][1:],
    ])
    slopes = np.concatenate([
        a_ * lpair[0].states[:, 1] + b_ * lpair[1].states[:, 1],
        (c_ * rpair[0].states[:, 1] + d_ * rpair[1].states[:, 1])[::-1][1:],
    ])
    slope_scale = float(np.max(np.abs(slopes)))
    u_scale = float(np.max(np.abs(us)))

    zeros = []
    for i in range(1, len(xs) - 1):
        ui, uj = us[i], us[i + 1]
        if abs(ui) < 1e-13 * u_scale:
            zeros.append(float(xs[i]))
            continue
        if ui * uj < 0:
            x0 = brentq(lambda x: float(state(x)[0]), xs[i], xs[i + 1],
                        xtol=1e-13)
            zeros.append(float(x0))

    out = []
    for x0 in sorted(zeros):
        if out and x0 - out[-1].x <= 1e-9:
            continue   # grid hit plus bracketing both found the same zero
        sl = abs(float(state(x0)[1]))
        out.append(ZeroInfo(x=x0, slope=sl, simple=sl > slope_rel * slope_scale))
    return out


@dataclass(frozen=True)
class BoundaryVariant:
    """One extra joint condition pinned on a span's hinged solution family.

    kind "slope_vs_curvature":      alpha*u'(0) = beta*u''(0)
    kind "shear_vs_displacement":   alpha*Tu(0) = beta*u(0)

    Left-span variants require alpha*beta <= 0, right-span ones
    alpha*beta >= 0, and (alpha, beta) != (0, 0).
    """

    kind: str
    alpha: float
    beta: float

    def __post_init__(self):
        if self.kind not in ("slope_vs_curvature", "shear_vs_displacement"):
            raise ValueError(f"unknown variant kind {self.kind!r}")
        if self.alpha == 0.0 and self.beta == 0.0:
            raise ValueError("(alpha, beta) must not both be zero")


def dim_check(profile, lam, variant, rel_tol=DEFAULT_REL_TOL,
              zero_rel=DIM_ZERO_REL):
    """Measured dimension of the hinged family pinned by the variant condition.

    The hinged-end family of one span is two-dimensional; the variant adds a
    single linear functional, so the measured dimension is the nullity of a
    1x2 row (rank thresholded at zero_rel relative): 1 when the functional
    is nonzero on the family (the expected value), 2 only if it degenerates
    (never observed; would contradict the one-dimensionality statement).
    """
    if lam <= 0:
        raise ValueError("lam must be > 0")
    prod = variant.alpha * variant.beta
    if profile.side == "left" and prod > 0:
        raise ValueError("left-span variants need alpha*beta <= 0")
    if profile.side == "right" and prod < 0:
        raise ValueError("right-span variants need alpha*beta >= 0")
    pair = span_pair(profile, lam, rel_tol, n_stations=65)
    w1 = pair[0].final_state
    w2 = pair[1].final_state
    sig0 = horner(profile.sigma, 0.0)
    if variant.kind == "slope_vs_curvature":
        row = np.array([
            variant.alpha * w1[1] - variant.beta * w1[2] / sig0,
            variant.alpha * w2[1] - variant.beta * w2[2] / sig0,
        ])
        scale = (abs(variant.alpha) * max(abs(w1[1]), abs(w2[1]))
                 + abs(variant.beta) * max(abs(w1[2]), abs(w2[2])) / sig0)
    else:
        row = np.array([
            variant.alpha * w1[3] - variant.beta * w1[0],
            variant.alpha * w2[3] - variant.beta * w2[0],
        ])
        scale = (abs(variant.alpha) * max(abs(w1[3]), abs(w2[3]))
                 + abs(variant.beta) * max(abs(w1[0]), abs(w2[0])))
    rank = 0 if np.max(np.abs(row)) <= zero_rel * max(scale, 1e-300) else 1
    return 2 - rank


def random_profile(rng, side="right", max_degree=3, allow_zero_q=True):
    """Draw an admissible random profile (rejection sampling on positivity)."""
    lo, hi = (-1.0, 0.0) if side == "left" else (0.0, 1.0)
    xs = np.linspace(lo, hi, 201)

    def draw_positive(floor):
        while True:
            deg = int(rng.integers(0, max_degree + 1))
            c0 = float(rng.uniform(0.4, 3.0))
            coeffs = [c0] + [float(rng.uniform(-0.5, 0.5) * c0) for _ in range(deg)]
            if np.min(np.polynomial.polynomial.polyval(xs, coeffs)) >= floor:
                return tuple(coeffs)

    def draw_nonneg():
        if allow_zero_q and rng.uniform() < 0.25:
            return (0.0,)
        while True:
            deg = int(rng.integers(0, max_degree + 1))
            c0 = float(rng.uniform(0.0, 2.0))
            coeffs = [c0] + [float(rng.uniform(-0.3, 0.3)) for _ in range(deg)]
            if np.min(np.polynomial.polynomial.polyval(xs, coeffs)) >= 0.0:
                return tuple(coeffs)

    return CoefficientProfile(
        side=side,
        rho=draw_positive(0.05),
        sigma=draw_positive(0.05),
        q=draw_nonneg(),
    )
