"""Special-function kernels: modified Bessel I0, semi-infinite quadrature and
numerical Meijer-G evaluation.

The Mellin-Barnes evaluator integrates along a vertical line in the complex
plane; it is used to validate closed forms, not on the hot path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import mpmath
import numpy as np
from scipy import integrate, special

from .errors import ConfigError, ContourFailure, NonConvergence

I0_SCALED_THRESHOLD = 50.0


class QuadResult(NamedTuple):
    value: float
    error: float


def bessel_i0(x):
    """Zeroth-order modified Bessel function of the first kind, I0(x).

    Above ``I0_SCALED_THRESHOLD`` the value is rebuilt from the exponentially
    scaled kernel, which callers should prefer directly (``bessel_i0e``) when
    the result is multiplied by a decaying exponential.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bessel_i0 expects x >= 0")
    out = np.where(x > I0_SCALED_THRESHOLD, special.i0e(x) * np.exp(np.minimum(x, 700.0)), special.i0(x))
    out = np.where(x > 700.0, np.inf, out)
    return float(out) if out.ndim == 0 else out


def bessel_i0e(x):
    """exp(-x) * I0(x), finite for all x >= 0."""
    x = np.asarray(x, dtype=float)
    out = special.i0e(x)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Meijer G
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MeijerGSpec:
    """Parameters of G^{m,n}_{p,q}[z | a; b]; p and q follow from the lists."""

    m: int
    n: int
    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if self.m < 0 or self.n < 0:
            raise ConfigError("m and n must be non-negative")
        if self.m > self.q or self.n > self.p:
            raise ConfigError(f"need m <= q and n <= p, got m={self.m}, n={self.n}, p={self.p}, q={self.q}")

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    @property
    def delta(self) -> float:
        # vertical-line integrand decays like exp(-pi * delta * |Im s|)
        return self.m + self.n - 0.5 * (self.p + self.q)


# G^{1,2}_{2,2}[z | 1,1; 1,0] = ln(1 + z)
LN1P_SPEC = MeijerGSpec(1, 2, (1.0, 1.0), (1.0, 0.0))
# G^{1,1}_{1,2}[z | 1; 1,0] = 1 - exp(-z)
EXP_CDF_SPEC = MeijerGSpec(1, 1, (1.0,), (1.0, 0.0))
# Instance carried by the closed-form average SNR expression
AVG_SNR_SPEC = MeijerGSpec(2, 1, (-2.0, -1.0, 0.5), (0.0, -2.0, 0.0, 0.5))


@dataclass(frozen=True)
class ContourConfig:
    """Vertical-line contour settings.

    ``c=None`` places the line midway between the rightmost pole of the
    Gamma(1 - a_j + s) family and the leftmost pole of the Gamma(b_j - s) family.
    """

    c: float | None = None
    floor_rel: float = 1e-16
    t_max: float = 400.0
    epsabs: float = 1e-14
    epsrel: float = 1e-11
    limit: int = 2000


class MBResult(NamedTuple):
    value: float
    error: float
    c: float
    t_cut: float


def _pole_bounds(spec: MeijerGSpec) -> tuple[float, float]:
    left = min(spec.b[: spec.m]) if spec.m else math.inf
    right = max(a - 1.0 for a in spec.a[: spec.n]) if spec.n else -math.inf
    return left, right


def contour_abscissa(spec: MeijerGSpec) -> float:
    """Default real part of the integration line; raises ContourFailure if the
    two pole families overlap."""
    left, right = _pole_bounds(spec)
    if not right < left:
        raise ContourFailure(
            f"pole families overlap (rightmost n-pole {right} >= leftmost m-pole {left})"
        )
    if math.isinf(left) and math.isinf(right):
        return 0.5
    if math.isinf(left):
        return right + 0.5
    if math.isinf(right):
        return left - 0.5
    return 0.5 * (left + right)


def _log_integrand(spec: MeijerGSpec, s, log_z: float):
    lg = special.loggamma
    acc = s * log_z
    for bj in spec.b[: spec.m]:
        acc = acc + lg(bj - s)
    for aj in spec.a[: spec.n]:
        acc = acc + lg(1.0 - aj + s)
    for bj in spec.b[spec.m:]:
        acc = acc - lg(1.0 - bj + s)
    for aj in spec.a[spec.n:]:
        acc = acc - lg(aj - s)
    return acc


def meijer_g_mellin_barnes(spec: MeijerGSpec, z: float, contour: ContourConfig | None = None) -> MBResult:
    """Evaluate G^{m,n}_{p,q}[z] by quadrature of the Mellin-Barnes integral.

    The integral (1/2 pi i) int Gamma-ratio(s) z^s ds runs along Re(s) = c.
    For real parameters and z > 0 the integrand is conjugate-symmetric in
    Im(s), so only the upper half-line is integrated. The line is cut where
    the integrand magnitude drops below ``floor_rel`` of its peak.

    Raises:
        ContourFailure: the pole families cannot be separated.
        NonConvergence: the integrand does not decay below the floor before
            ``t_max`` or the quadrature reports failure.
    """
    contour = contour or ContourConfig()
    if not z > 0:
        raise ValueError("Mellin-Barnes evaluation needs z > 0")
    c = contour_abscissa(spec) if contour.c is None else float(contour.c)
    left, right = _pole_bounds(spec)
    if not right < c < left:
        raise ContourFailure(f"abscissa c={c} does not separate poles ({right}, {left})")
    log_z = math.log(z)

    def mag(t):
        return np.real(_log_integrand(spec, c + 1j * np.asarray(t, dtype=float), log_z))

    # locate the cut by scanning outward; the peak is tracked along the way
    t_grid = np.linspace(0.0, 4.0, 81)
    log_peak = float(np.max(mag(t_grid)))
    t = 4.0
    log_floor = math.log(contour.floor_rel)
    while True:
        lm = float(mag(t))
        log_peak = max(log_peak, lm)
        if lm - log_peak < log_floor:
            # confirm the decay persists
            if float(mag(1.5 * t)) - log_peak < log_floor:
                break
        t *= 1.25
        if t > contour.t_max:
            raise NonConvergence(
                f"integrand not below {contour.floor_rel:g} of peak before |Im s| = {contour.t_max}"
                f" (decay index {spec.delta:g})"
            )
    t_cut = t

    def integrand(tt):
        return float(np.real(np.exp(_log_integrand(spec, c + 1j * tt, log_z))))

    # split into pieces of roughly one oscillation period to help quad
    period = 2 * math.pi / max(abs(log_z), 1.0)
    edges = np.linspace(0.0, t_cut, max(2, int(math.ceil(t_cut / period)) + 1))
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        res = integrate.quad(
            integrand, lo, hi, epsabs=contour.epsabs, epsrel=contour.epsrel,
            limit=contour.limit, full_output=1,
        )
        if len(res) > 3:
            raise NonConvergence(f"quadrature failed on [{lo:g}, {hi:g}]: {res[3]}")
        total += res[0]
        err += res[1]
    tail = math.exp(log_peak) * contour.floor_rel * t_cut
    return MBResult(total / math.pi, (err + tail) / math.pi, c, t_cut)


def meijer_g(spec: MeijerGSpec, z: float) -> float:
    """General real-argument Meijer G via mpmath's series/asymptotic engine.

    Needed where the Mellin-Barnes line integral diverges (decay index <= 0).
    """
    a_n, a_rest = list(spec.a[: spec.n]), list(spec.a[spec.n:])
    b_m, b_rest = list(spec.b[: spec.m]), list(spec.b[spec.m:])
    return float(mpmath.meijerg([a_n, a_rest], [b_m, b_rest], z))


def meijer_g_ln1p(z):
    """G^{1,2}_{2,2}[z | 1,1; 1,0], which is identically ln(1 + z).

    Computed through ``log1p``; the agreement with the contour integral of
    ``LN1P_SPEC`` is covered by the test-suite.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("meijer_g_ln1p expects z >= 0")
    out = np.log1p(z)
    return float(out) if out.ndim == 0 else out


def ln1p_direct(z: float) -> float:
    """ln(1 + z) as the integral of 1/(1 + x) over [0, z]."""
    val, _ = integrate.quad(lambda x: 1.0 / (1.0 + x), 0.0, z, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------

def _find_mode(f: Callable[[float], float]) -> float:
    xs = np.concatenate(([0.0], np.logspace(-4, 4, 321)))
    vals = np.array([abs(f(x)) for x in xs])
    vals[~np.isfinite(vals)] = 0.0
    return float(xs[int(np.argmax(vals))])


def integrate_semi_infinite(
    f: Callable[[float], float],
    tolerance: float = 1e-10,
    rtol: float = 1e-10,
    max_subdivisions: int = 500,
    mode: float | None = None,
) -> QuadResult:
    """Integrate ``f`` over [0, inf) with the domain split at its mode.

    ``f`` should decay at least exponentially. The mode is located on a
    log-spaced scan when not given. A further break is placed where the
    integrand has dropped well below its peak so that the infinite tail
    integral starts on the decaying flank.
    """
    x0 = _find_mode(f) if mode is None else float(mode)
    peak = abs(f(x0)) if x0 > 0 else 0.0
    pieces = []
    if x0 > 0:
        pieces.append((0.0, x0))
    start = x0
    if peak > 0:
        step = max(x0, 1e-3)
        x1 = x0 + step
        while abs(f(x1)) > 1e-6 * peak and x1 < 1e6:
            x1 += step
            step *= 1.5
        pieces.append((x0, x1))
        start = x1
    pieces.append((start, np.inf))

    total = 0.0
    err = 0.0
    for lo, hi in pieces:
        res = integrate.quad(f, lo, hi, epsabs=tolerance, epsrel=rtol, limit=max_subdivisions, full_output=1)
        if len(res) > 3 and res[2].get("last", 0) >= max_subdivisions:
            raise NonConvergence(f"quadrature on [{lo:g}, {hi:g}] hit {max_subdivisions} subdivisions")
        if len(res) > 3 and abs(res[0]) > tolerance and res[1] > max(tolerance, rtol * abs(res[0])) * 100:
            raise NonConvergence(f"quadrature on [{lo:g}, {hi:g}] failed: {res[3]}")
        total += res[0]
        err += res[1]
    return QuadResult(total, err)


__all__ = [
    "AVG_SNR_SPEC", "ContourConfig", "EXP_CDF_SPEC", "LN1P_SPEC", "MBResult", "MeijerGSpec",
    "QuadResult", "bessel_i0", "bessel_i0e", "contour_abscissa",
    "integrate_semi_infinite", "ln1p_direct", "meijer_g", "meijer_g_ln1p",
    "meijer_g_mellin_barnes",
]
