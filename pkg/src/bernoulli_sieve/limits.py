"""Centering/scaling constants and the four limit laws.

The occupancy count K_n, centered by b_n and scaled by a_n, converges to
a regime-dependent law:

    A  normal          b = (log n - int_0^{log n} P{eta > x} dx)/mu,
                       a = sqrt(sigma^2 log n / mu^3)
    B  normal          same b; a = mu^{-3/2} c_{[log n]} with
                       j L(c_j)/c_j^2 = 1
    C  alpha-stable    same b; a = mu^{-(alpha+1)/alpha} c_{[log n]} with
                       j L(c_j)/c_j^alpha = 1
    D  1-stable        b integrates the kernel g(x) = x/m(r(x/m(x)))
                       against the eta-law; a = r(log n/m(log n))/m(log n)
    E  Mittag-Leffler  b = 0, a = log^alpha n / L(log n)

For A-C the closed reduction of b is cross-checked against the defining
Riemann-Stieltjes integral of the kernel x/mu against the eta-law.
Stable CDFs come from Gil-Pelaez inversion of the characteristic
functions; the Mittag-Leffler law is handled by moments only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special

from .distributions import (
    DistributionSpec,
    Regime,
    classify_regime,
    integrate_survival,
    moments,
)
from .errors import (
    InversionFailure,
    KindMismatch,
    QuadratureFailure,
    RegimeMismatch,
    SolverFailure,
)

__all__ = [
    "Normalization",
    "LawKind",
    "LimitLaw",
    "centering_b",
    "scaling_a",
    "normalization_for",
    "limit_law_for",
    "solve_c",
    "truncated_mean_m",
    "quantile_r",
    "g_kernel",
    "gil_pelaez_cdf",
    "limit_cdf",
    "ml_moment",
]


@dataclass(frozen=True)
class Normalization:
    """Regime tag with the constants (a, b) for one sample size n.

    c_n, m, r carry the auxiliary quantities that built a (regimes B-D);
    g_kernel is a human-readable description of the centering kernel.
    """

    regime: Regime
    n: int
    a: float
    b: float
    g_kernel: str
    c_n: Optional[float] = None
    m: Optional[float] = None
    r: Optional[float] = None

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("scaling constant must be positive")
        if self.regime is Regime.E and self.b != 0.0:
            raise ValueError("regime E has no centering")

    def normalize(self, values):
        return (np.asarray(values, dtype=float) - self.b) / self.a

    def to_dict(self) -> dict:
        out = {"regime": self.regime.value, "n": self.n, "a": self.a, "b": self.b}
        if self.c_n is not None:
            out["c_n"] = self.c_n
        if self.m is not None:
            out["m"] = self.m
        if self.r is not None:
            out["r"] = self.r
        return out


# ---------------------------------------------------------------------------
# auxiliary functions: c_n, m, r, g
# ---------------------------------------------------------------------------

def solve_c(spec: DistributionSpec, n: int) -> float:
    """Root c of n L(c)/c^alpha = 1 (alpha = 2 in regime B).

    The residual is monotone for c past the support of L's preasymptotic
    wiggles; bracketed bisection, residual tolerance 1e-8.
    """
    regime = classify_regime(spec)
    if regime not in (Regime.B, Regime.C):
        raise RegimeMismatch(f"c_n is defined for regimes B/C, not {regime.value}")
    alpha = spec.tail.alpha
    if n < 1:
        raise ValueError("n must be >= 1")

    def residual(c):
        return n * float(spec.tail.L(c)) / c ** alpha - 1.0

    lo, hi = 1.0, 2.0
    if residual(lo) <= 0.0:
        return lo if abs(residual(lo)) <= 1e-8 else _bisect_c(residual, 0.5, lo)
    for _ in range(200):
        if residual(hi) <= 0.0:
            return _bisect_c(residual, lo, hi)
        lo, hi = hi, hi * 2.0
    raise SolverFailure("no sign change while bracketing c_n")


def _bisect_c(residual, lo, hi):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = residual(mid)
        if abs(r) <= 1e-8:
            return mid
        if r > 0.0:
            lo = mid
        else:
            hi = mid
    raise SolverFailure("c_n bisection did not meet residual 1e-8")


def truncated_mean_m(spec: DistributionSpec, x: float) -> float:
    """m(x) = int_0^x P{xi > y} dy by quadrature of the survival."""
    if x <= 0:
        return 0.0
    return integrate_survival(
        spec.xi_survival, upper=float(x), breakpoints=spec.xi_breakpoints
    )


def quantile_r(spec: DistributionSpec, x: float) -> float:
    """Generalized inverse of y -> 1/P{xi > y} at x.

    r(x) = inf{y >= 0: 1/P{xi > y} >= x}, nondecreasing and satisfying
    x P{xi > r(x)} -> 1; any valid r differs from this one by o(a_n)
    asymptotically.
    """
    if x <= 1.0:
        return 0.0

    def big_enough(y):
        s = float(spec.survival_xi(y))
        return s == 0.0 or 1.0 / s >= x

    lo, hi = 0.0, 1.0
    for _ in range(200):
        if big_enough(hi):
            break
        lo, hi = hi, hi * 2.0
    else:
        raise SolverFailure("quantile_r bracket exhausted")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if big_enough(mid):
            hi = mid
        else:
            lo = mid
    return hi


def g_kernel(spec: DistributionSpec) -> Callable[[float], float]:
    """The centering kernel g of the regime: x/mu for A-C,
    x/m(r(x/m(x))) for D, identically zero for E."""
    regime = classify_regime(spec)
    if regime in (Regime.A, Regime.B, Regime.C):
        mu = moments(spec).mu
        return lambda x: x / mu
    if regime is Regime.D:

        def g(x):
            if x <= 0:
                return 0.0
            mx = truncated_mean_m(spec, x)
            denom = truncated_mean_m(spec, quantile_r(spec, x / mx))
            # r(x/m(x)) = 0 wherever the survival is still 1, making the
            # quotient 0/0 there; x/m(x) extends g continuously and the
            # finite-x choice is asymptotically immaterial
            return x / denom if denom > 0.0 else x / mx

        return g
    return lambda x: 0.0


# ---------------------------------------------------------------------------
# centering and scaling
# ---------------------------------------------------------------------------

def _stieltjes_b(spec: DistributionSpec, big_l: float, g, points: int) -> float:
    """Midpoint Riemann-Stieltjes sum of int_0^L g(L - y) dF_eta(y)."""
    y_hi = big_l
    probe = min(1.0, big_l)
    while probe < big_l and float(spec.survival_eta(probe)) > 1e-15:
        probe = min(2.0 * probe, big_l)
    y_hi = probe
    # log-spaced grid: several eta-laws put mass ~ 1/|log y| near 0, so a
    # uniform grid never settles; the [0, 1e-16] cell is width-negligible
    edges = np.concatenate([[0.0], np.geomspace(1e-16, y_hi, points + 1)])
    cuts = [b for b in spec.eta_breakpoints if 0.0 < b < y_hi]
    if cuts:
        edges = np.unique(np.concatenate([edges, np.asarray(cuts)]))
    surv = spec.survival_eta(edges)
    mass = surv[:-1] - surv[1:]
    mid = 0.5 * (edges[:-1] + edges[1:])
    keep = mass > 0
    gvals = np.array([g(big_l - y) for y in mid[keep]])
    return float(np.dot(mass[keep], gvals))


def centering_b(spec: DistributionSpec, n: int) -> float:
    """b_n of the regime; 0 in regime E.

    Regimes A-C use the closed reduction
    (log n - int_0^{log n} P{eta > x} dx)/mu, cross-checked against the
    defining Stieltjes integral of the kernel to relative 1e-6.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    regime = classify_regime(spec)
    big_l = math.log(n)
    if regime is Regime.E:
        return 0.0
    if regime is Regime.D:
        g = g_kernel(spec)
        b1 = _stieltjes_b(spec, big_l, g, 512)
        b2 = _stieltjes_b(spec, big_l, g, 1024)
        b = b2 + (b2 - b1) / 3.0
        if abs(b2 - b1) > 3e-6 * max(1.0, abs(b)):
            raise QuadratureFailure("regime D centering integral did not settle")
        return b
    mu = moments(spec).mu
    eta_int = integrate_survival(
        spec.eta_survival, upper=big_l, breakpoints=spec.eta_breakpoints
    )
    b = (big_l - eta_int) / mu
    # independent route: midpoint Stieltjes sum with Richardson step
    g = lambda x: x / mu
    s1 = _stieltjes_b(spec, big_l, g, 1 << 17)
    s2 = _stieltjes_b(spec, big_l, g, 1 << 18)
    b_direct = s2 + (s2 - s1) / 3.0
    if abs(b_direct - b) > 1e-6 * max(1.0, abs(b)):
        raise QuadratureFailure(
            f"centering cross-check failed: {b} (closed) vs {b_direct} (Stieltjes)"
        )
    return b


def scaling_a(spec: DistributionSpec, n: int) -> float:
    """a_n of the regime (see module docstring for the five formulas)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    regime = classify_regime(spec)
    big_l = math.log(n)
    mom = moments(spec)
    tail = spec.tail
    if regime is Regime.A:
        return math.sqrt(mom.sigma2 * big_l / mom.mu ** 3)
    if regime is Regime.B:
        return mom.mu ** -1.5 * solve_c(spec, int(big_l))
    if regime is Regime.C:
        alpha = tail.alpha
        return mom.mu ** (-(alpha + 1.0) / alpha) * solve_c(spec, int(big_l))
    if regime is Regime.D:
        m_l = truncated_mean_m(spec, big_l)
        return quantile_r(spec, big_l / m_l) / m_l
    alpha = tail.alpha
    return big_l ** alpha / float(tail.L(big_l))


def normalization_for(spec: DistributionSpec, n: int) -> Normalization:
    """Bundle (regime, a_n, b_n) with the auxiliary constants used."""
    regime = classify_regime(spec)
    a = scaling_a(spec, n)
    b = centering_b(spec, n)
    big_l = math.log(n)
    kernel = {
        Regime.A: "x/mu",
        Regime.B: "x/mu",
        Regime.C: "x/mu",
        Regime.D: "x/m(r(x/m(x)))",
        Regime.E: "0",
    }[regime]
    c_n = m_l = r_l = None
    if regime in (Regime.B, Regime.C):
        c_n = solve_c(spec, int(big_l))
    if regime is Regime.D:
        m_l = truncated_mean_m(spec, big_l)
        r_l = quantile_r(spec, big_l / m_l)
    return Normalization(
        regime=regime, n=int(n), a=a, b=b, g_kernel=kernel, c_n=c_n, m=m_l, r=r_l
    )


# ---------------------------------------------------------------------------
# limit laws
# ---------------------------------------------------------------------------

class LawKind(enum.Enum):
    NORMAL = "normal"
    STABLE_C = "stable-c"     # alpha-stable, alpha in (1,2)
    STABLE_D = "stable-d"     # 1-stable
    MITTAG_LEFFLER = "mittag-leffler"


def ml_moment(alpha: float, k: int) -> float:
    """k-th moment k!/(Gamma^k(1-alpha) Gamma(1+alpha k)) of the
    Mittag-Leffler law with parameter alpha in [0, 1)."""
    if not (0.0 <= alpha < 1.0):
        raise ValueError("alpha must lie in [0, 1)")
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.factorial(k) / (
        special.gamma(1.0 - alpha) ** k * special.gamma(1.0 + alpha * k)
    )


@dataclass(frozen=True)
class LimitLaw:
    """One of the four limit laws, evaluated by CDF or by moments.

    Normal uses the error function directly; the two stable kinds invert
    their characteristic functions numerically; Mittag-Leffler exposes
    moments only (the law is moment-determined).
    """

    kind: LawKind
    alpha: float = float("nan")

    def __post_init__(self):
        if self.kind is LawKind.STABLE_C and not (1.0 < self.alpha < 2.0):
            raise ValueError("stable-c needs alpha in (1, 2)")
        if self.kind is LawKind.MITTAG_LEFFLER and not (0.0 <= self.alpha < 1.0):
            raise ValueError("mittag-leffler needs alpha in [0, 1)")

    @staticmethod
    def normal() -> "LimitLaw":
        return LimitLaw(LawKind.NORMAL)

    @staticmethod
    def stable_c(alpha: float) -> "LimitLaw":
        return LimitLaw(LawKind.STABLE_C, alpha)

    @staticmethod
    def stable_d() -> "LimitLaw":
        return LimitLaw(LawKind.STABLE_D, 1.0)

    @staticmethod
    def mittag_leffler(alpha: float) -> "LimitLaw":
        return LimitLaw(LawKind.MITTAG_LEFFLER, alpha)

    def char(self, t):
        """Characteristic function on a real array."""
        t = np.asarray(t, dtype=float)
        if self.kind is LawKind.NORMAL:
            return np.exp(-0.5 * t * t) + 0j
        if self.kind is LawKind.STABLE_C:
            a = self.alpha
            coeff = special.gamma(1.0 - a) * complex(
                math.cos(math.pi * a / 2.0), math.sin(math.pi * a / 2.0)
            )
            mag = np.abs(t) ** a
            return np.exp(-mag * coeff.real - 1j * mag * coeff.imag * np.sign(t))
        if self.kind is LawKind.STABLE_D:
            with np.errstate(divide="ignore", invalid="ignore"):
                logt = np.where(t == 0.0, 0.0, np.log(np.abs(t)))
            return np.exp(np.abs(t) * (-math.pi / 2.0 + 1j * logt * np.sign(t)))
        raise KindMismatch("Mittag-Leffler law is handled by moments, not cf")

    def cdf(self, x):
        """CDF at scalar or array x (KindMismatch for Mittag-Leffler)."""
        if self.kind is LawKind.MITTAG_LEFFLER:
            raise KindMismatch("compare Mittag-Leffler samples by moments")
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if self.kind is LawKind.NORMAL:
            out = special.ndtr(xs)
        else:
            out = np.array([gil_pelaez_cdf(self.char, xi) for xi in xs])
        return float(out[0]) if np.isscalar(x) or np.ndim(x) == 0 else out

    def moment(self, k: int) -> float:
        if self.kind is not LawKind.MITTAG_LEFFLER:
            raise KindMismatch("moment table is defined for Mittag-Leffler only")
        return ml_moment(self.alpha, k)


def _envelope_cut(char, target=1e-10):
    """Smallest power of two t with |char(t)| < target."""
    t = 1.0
    for _ in range(60):
        if abs(complex(char(np.asarray([t]))[0])) < target:
            return t
        t *= 2.0
    raise InversionFailure("characteristic function envelope does not decay")


def gil_pelaez_cdf(char, x: float, abs_tol: float = 1e-6) -> float:
    """CDF by Gil-Pelaez inversion of a characteristic function.

    F(x) = 1/2 - (1/pi) int_0^inf Im(e^{-itx} char(t))/t dt.  The piece
    t in (0, 1] runs on a log axis (t = e^{-u}), which absorbs the 1/t
    weight exactly and tames the t log t phase of the 1-stable kernel;
    the rest uses Gauss-Legendre panels out to where the envelope drops
    below 1e-10, panel width shrunk with |x| to resolve the e^{-itx}
    oscillation.
    """
    x = float(x)

    def imag_part(t):
        return np.imag(np.exp(-1j * t * x) * char(t))

    # (0, 1]: substitute t = e^{-u}; the 1/t cancels against dt.  The
    # phase xt = x e^{-u} advances at rate |x| e^{-u} on the u axis, so
    # the panel width shrinks near u = 0 to hold the per-panel phase
    # change at 2 pi, where a 32-node rule is still exact to roundoff.
    edges = [0.0]
    while edges[-1] < 40.0:
        rate = max(1.0, abs(x) * math.exp(-edges[-1]))
        edges.append(edges[-1] + min(0.5, 2.0 * math.pi / rate))
    u_edges = np.asarray(edges)
    v1, e1 = _gl_complex(lambda u: imag_part(np.exp(-u)), u_edges)
    cut = max(2.0, _envelope_cut(char))
    width = min(0.5, 2.0 * math.pi / (abs(x) + 1.0))
    t_edges = np.linspace(1.0, cut, int(math.ceil((cut - 1.0) / width)) + 1)
    v2, e2 = _gl_complex(lambda t: imag_part(t) / t, t_edges)
    if e1 + e2 > abs_tol:
        raise InversionFailure(
            f"Gil-Pelaez quadrature error {e1 + e2:g} above {abs_tol:g}"
        )
    val = 0.5 - (v1 + v2) / math.pi
    return min(1.0, max(0.0, val))


def _gl_complex(f, edges):
    x32, w32 = np.polynomial.legendre.leggauss(32)
    x64, w64 = np.polynomial.legendre.leggauss(64)
    tot32 = tot64 = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        h = 0.5 * (b - a)
        tot32 += h * float(np.dot(w32, f(a + h * (x32 + 1.0))))
        tot64 += h * float(np.dot(w64, f(a + h * (x64 + 1.0))))
    return tot64, abs(tot64 - tot32)


def limit_cdf(law: LimitLaw, x) -> float:
    """CDF of a limit law at x (KindMismatch for Mittag-Leffler)."""
    return law.cdf(x)


def limit_law_for(spec: DistributionSpec) -> LimitLaw:
    """The limit law matching the spec's regime."""
    regime = classify_regime(spec)
    if regime in (Regime.A, Regime.B):
        return LimitLaw.normal()
    if regime is Regime.C:
        return LimitLaw.stable_c(spec.tail.alpha)
    if regime is Regime.D:
        return LimitLaw.stable_d()
    return LimitLaw.mittag_leffler(spec.tail.alpha)
