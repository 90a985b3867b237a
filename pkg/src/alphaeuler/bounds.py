"""Closed-form evaluators for the convergence-rate bounds.

Everything here is exact arithmetic on the double-exponential rate
K(alpha, t), the alpha/horizon admissibility threshold, the Osgood-lemma
conclusion it derives from, the flow-distance rate, and the L^p vorticity
rate driven by a translation modulus of continuity.  Constants are not
pinned by the theory, so they enter as explicit parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .spectral import PhysicalField, SpectralField
from .vorticity import (
    AlphaParam,
    VelocityField,
    biot_savart,
    helmholtz_filter,
    laplacian_l2,
    lp_norm,
    velocity_l2,
)


@dataclass(frozen=True)
class BoundParams:
    """Constants of the closed-form bounds.

    c1, c2 enter the double-exponential velocity rate, c the trailing
    sqrt(alpha) tail and the vorticity-rate exponent, m is the sup norm of
    the initial vorticity, gamma0 the initial-data gap, alpha_bar the
    threshold below which gamma0 <= 1/2 is assumed, and horizon the time T.
    """

    c1: float = 1.0
    c2: float = 1.0
    c: float = 1.0
    m: float = 1.0
    gamma0: float = 0.0
    alpha_bar: float = 1.0
    horizon: float = 1.0

    def __post_init__(self):
        if min(self.c1, self.c2, self.c) <= 0:
            raise ValueError("constants c1, c2, c must be positive")
        if self.m < 0 or self.gamma0 < 0:
            raise ValueError("m and gamma0 must be nonnegative")
        if self.alpha_bar <= 0 or self.horizon <= 0:
            raise ValueError("alpha_bar and horizon must be positive")


@dataclass(frozen=True)
class ModulusEstimate:
    """Translation modulus of continuity psi, either the power law h^s or a
    sampled nondecreasing table interpolated linearly."""

    kind: str
    s: float | None = None
    table: np.ndarray | None = None
    slope: float | None = None

    def __post_init__(self):
        if self.kind == "besov":
            if self.s is None or not 0.0 < self.s <= 1.0:
                raise ValueError("besov modulus requires an exponent s in (0, 1]")
        elif self.kind == "generic":
            if self.table is None:
                raise ValueError("generic modulus requires a sampled table")
            t = np.asarray(self.table, dtype=float)
            if t.ndim != 2 or t.shape[1] != 2 or t.shape[0] < 2:
                raise ValueError("table must hold at least two (h, psi) rows")
            if np.any(np.diff(t[:, 0]) <= 0) or np.any(np.diff(t[:, 1]) < 0):
                raise ValueError("table must be increasing in h, nondecreasing in psi")
        else:
            raise ValueError(f"unknown modulus kind {self.kind!r}")

    def __call__(self, h: float) -> float:
        if h < 0:
            raise ValueError("modulus arguments must be nonnegative")
        if self.kind == "besov":
            return float(h**self.s)
        t = np.asarray(self.table, dtype=float)
        if h == 0.0:
            return 0.0
        if h < t[0, 0] or h > t[-1, 0]:
            raise ValueError(f"h={h} outside the sampled modulus range")
        return float(np.interp(h, t[:, 0], t[:, 1]))


def gamma0(
    q0_alpha: SpectralField, omega0: SpectralField, a: AlphaParam
) -> float:
    """Initial-data gap ||u^alpha_0 - u_0||_{L2} + alpha ||lap u^alpha_0||_{L2}."""
    u_alpha = helmholtz_filter(biot_savart(q0_alpha), a)
    u0 = biot_savart(omega0)
    diff = VelocityField(
        SpectralField(u0.grid, u_alpha.u1.coeffs - u0.u1.coeffs),
        SpectralField(u0.grid, u_alpha.u2.coeffs - u0.u2.coeffs),
    )
    return velocity_l2(diff) + a.alpha * laplacian_l2(u_alpha)


def velocity_rate_K(a: AlphaParam, t: float, p: BoundParams) -> float:
    """Velocity-error rate
    exp{2 - 2 exp(-c2 t)} (c1 sqrt(alpha) T + gamma0)^{exp(-c2 t)} + c sqrt(alpha)."""
    if not 0.0 <= t <= p.horizon:
        raise ValueError(f"t={t} outside [0, horizon={p.horizon}]")
    root = math.sqrt(a.alpha)
    base = p.c1 * root * p.horizon + p.gamma0
    expo = math.exp(-p.c2 * t)
    return math.exp(2.0 - 2.0 * expo) * base**expo + p.c * root


def max_admissible_alpha(p: BoundParams) -> float | None:
    """Largest filter scale for which the double-exponential velocity rate
    is valid at this horizon:
    min(alpha_bar, (exp{2(2 - 2 exp(c2 T))} - gamma0) / (c1 T)^2), or None
    when no positive alpha is admissible."""
    if p.horizon <= 0:
        raise ValueError("the admissibility threshold requires horizon > 0")
    numerator = math.exp(2.0 * (2.0 - 2.0 * math.exp(p.c2 * p.horizon))) - p.gamma0
    if numerator <= 0.0:
        return None
    return min(p.alpha_bar, numerator / (p.c1 * p.horizon) ** 2)


def osgood_M(x: float) -> float:
    """M(x) = int_x^1 dr / (r (2 - log r)) = log(2 - log x) - log 2."""
    if not 0.0 < x < math.e**2:
        raise ValueError("M(x) is defined for 0 < x < e^2")
    return math.log(2.0 - math.log(x)) - math.log(2.0)


def osgood_bound(eta: float, c2: float, t: float) -> float:
    """Conclusion of the Osgood comparison with mu(x) = x (2 - log x):
    any rho with rho <= eta + int c2 mu(rho) obeys
    rho(t) <= exp{2 - 2 exp(-c2 t)} eta^{exp(-c2 t)}."""
    if not 0.0 < eta < 1.0:
        raise ValueError("the logarithmic substitution requires eta in (0, 1)")
    if t < 0:
        raise ValueError("t must be nonnegative")
    expo = math.exp(-c2 * t)
    return math.exp(2.0 - 2.0 * expo) * eta**expo


def flow_rate_bound(k_val: float, t: float, s: float, c: float, horizon: float) -> float:
    """Squared-distance rate for the two flows:
    2 exp{2 - 2 exp(-c (t - s))} k_val^{exp(-c horizon)}."""
    if s > t:
        raise ValueError("the estimate runs backward: requires s <= t")
    if k_val < 0:
        raise ValueError("k_val must be nonnegative")
    return 2.0 * math.exp(2.0 - 2.0 * math.exp(-c * (t - s))) * k_val ** math.exp(
        -c * horizon
    )


def vorticity_rate_bound(
    k_val: float, mod: ModulusEstimate, p: float, params: BoundParams
) -> float:
    """L^p vorticity rate
    c m^{1 - 1/p} max(psi(k_val), k_val^{exp(-c T) / (2p)})."""
    if not 1.0 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    if k_val < 0:
        raise ValueError("k_val must be nonnegative")
    tail_exponent = math.exp(-params.c * params.horizon) / (2.0 * p)
    tail = k_val**tail_exponent
    return params.c * params.m ** (1.0 - 1.0 / p) * max(mod(k_val), tail)


def default_shifts(n: int) -> list[tuple[int, int]]:
    """Axis and diagonal cell displacements at dyadic magnitudes up to n/8."""
    shifts = []
    j = 1
    while j <= n // 8:
        shifts.extend([(j, 0), (0, j), (j, j)])
        j *= 2
    return shifts


def besov_modulus_fit(
    omega0: PhysicalField, p: float, shifts=None
) -> ModulusEstimate:
    """Fit the translation modulus ||f(. + h) - f||_{L^p} ~ |h|^s.

    Shifts are integer cell displacements (grid-commensurate, evaluated by
    array rolls); the exponent is the log-log least-squares slope, capped
    at 1 since Lipschitz data saturates there.  Returns a besov-kind
    estimate that also carries the sampled (|h|, value) table and the raw
    slope.
    """
    g = omega0.grid
    if shifts is None:
        shifts = default_shifts(g.n)
    shifts = [tuple(map(int, sh)) for sh in shifts]
    if len(shifts) < 3:
        raise ValueError("at least 3 shifts are required for a fit")
    hs, vals = [], []
    for j1, j2 in shifts:
        shifted = np.roll(omega0.values, (-j1, -j2), axis=(0, 1))
        diff = PhysicalField(g, shifted - omega0.values)
        value = lp_norm(diff, p)
        if value > 0.0:
            hs.append(g.dx * math.hypot(j1, j2))
            vals.append(value)
    if len(hs) < 3:
        raise ValueError("degenerate data: translation differences vanish")
    hs = np.asarray(hs)
    vals = np.asarray(vals)
    fit = linregress(np.log(hs), np.log(vals))
    if fit.slope <= 0:
        raise ValueError("modulus does not vanish at zero: nonpositive slope")
    order = np.argsort(hs)
    table = np.column_stack([hs[order], np.maximum.accumulate(vals[order])])
    return ModulusEstimate(
        kind="besov", s=min(float(fit.slope), 1.0), table=table, slope=float(fit.slope)
    )
