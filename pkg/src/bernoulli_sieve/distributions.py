"""Laws of the stick-breaking fraction W on (0,1) and the derived log-variables.

A law of W induces two coupled nonnegative variables,

    xi  = |log W|        (walk increment)
    eta = |log(1 - W)|   (perturbation attached to each walk point)

All simulation downstream works with (xi, eta) pairs in log space, because
for heavy-tailed families W routinely rounds to 0.0 or 1.0 in double
precision while xi and eta stay perfectly representable.

Supported families (law-string grammar in parentheses):

    beta:<theta>      W ~ beta(theta, 1); xi is exponential(theta)
    example:<gamma>   P{W > x} = 1/(1 + |log(1-x)|^gamma), gamma in (0, 1/2)
    paretolog:<a>     xi is Pareto(a) on [1, inf): P{xi > x} = x^(-a)
    tsm2              P{xi > x} = x^(-2), x >= 1; truncated second moment
                      grows like 2*log(x) + 1 (slowly varying)
    table:<path>      two-column CSV u,w: inverse-CDF grid, linearly
                      interpolated; support must stay strictly inside (0,1)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import DistributionError, QuadratureFailure, Unclassifiable

__all__ = [
    "Regime",
    "TailProfile",
    "MomentSet",
    "DistributionSpec",
    "beta_theta_one",
    "example_gamma",
    "pareto_log_tail",
    "tsm2",
    "user_table",
    "parse_law",
    "moments",
    "classify_regime",
    "integrate_survival",
]

# Quadrature policy: survivals decay over many scales, so the integration
# interval is capped where the survival drops below SURV_FLOOR and the
# adaptive integrator is asked for ABS_TOL.
ABS_TOL = 1e-10
SURV_FLOOR = 1e-14

# Smallest/largest W representable strictly inside (0,1).
_W_LO = 5e-324
_W_HI = float(np.nextafter(1.0, 0.0))



def _abs_log1mexp(x):
    """|log(1 - e^(-x))| for x > 0, stable at both ends.

    Beyond x ~ 10 the direct -log(-expm1(-x)) form loses relative accuracy
    (1 - e^(-x) sits within a few ulp of 1), so the series
    z + z^2/2 + z^3/3, z = e^(-x), takes over there.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 10.0
    with np.errstate(divide="ignore"):
        out[small] = -np.log(-np.expm1(-np.maximum(x[small], 5e-324)))
    z = np.exp(-x[~small])
    out[~small] = z * (1.0 + z * (0.5 + z / 3.0))
    # huge x underflows to 0.0; clamp to the smallest positive double so
    # samplers keep the a.s.-positive invariant at machine resolution
    return np.maximum(out, 5e-324)


class Regime(enum.Enum):
    """The five convergence types, keyed by tail behaviour of xi."""

    A = "A"  # finite variance of log W -> normal limit
    B = "B"  # infinite variance, slowly varying truncated 2nd moment -> normal
    C = "C"  # tail index in (1,2) -> totally skewed alpha-stable
    D = "D"  # tail index 1 -> 1-stable
    E = "E"  # tail index in [0,1) -> Mittag-Leffler, no centering


@dataclass(frozen=True)
class TailProfile:
    """Declared (never estimated) tail metadata of xi = |log W|.

    alpha is the regular-variation index of P{xi > x}; math.inf marks
    exponential-or-faster decay.  slowly_varying is the function L in
    P{xi > x} ~ x^(-alpha) L(x) when one is needed for the scaling
    constants (regimes B, C, E); None means L == 1.
    """

    alpha: float
    second_moment_finite: bool
    nu_finite: bool
    slowly_varying: Optional[Callable[[float], float]] = None
    sv_description: str = "1"
    truncated_sm_slowly_varying: bool = False

    def __post_init__(self):
        if self.alpha < 0:
            raise DistributionError("tail index must be >= 0")
        if (self.alpha > 2 or math.isinf(self.alpha)) and not self.second_moment_finite:
            raise DistributionError(
                "alpha > 2 or exponential tail forces a finite second moment"
            )

    def L(self, x):
        if self.slowly_varying is None:
            return np.ones_like(np.asarray(x, dtype=float))
        return self.slowly_varying(x)


@dataclass(frozen=True)
class MomentSet:
    """mu = E|log W|, sigma2 = Var(log W), nu = E|log(1-W)| (inf allowed)."""

    mu: float
    sigma2: float
    nu: float

    def __post_init__(self):
        if self.mu <= 0 or self.sigma2 < 0 or self.nu < 0:
            raise DistributionError("moments must be positive (mu) / nonnegative")
        if math.isfinite(self.sigma2) and not math.isfinite(self.mu):
            raise DistributionError("finite sigma2 requires finite mu")


@dataclass(frozen=True)
class DistributionSpec:
    """A law of W with exact samplers and analytic survival functions.

    Immutable after construction; samplers take an external numpy Generator
    and hold no state, so a spec is safe to share across threads/processes.
    """

    name: str
    xi_survival: Callable[[np.ndarray], np.ndarray]
    eta_survival: Callable[[np.ndarray], np.ndarray]
    tail: TailProfile
    # draws `size` iid (xi, eta) pairs in log space
    _sample_log: Callable[[np.random.Generator, int], tuple]
    _closed_moments: Optional[MomentSet] = None
    mean_w: float = float("nan")  # E W, cached for series tail bounds
    # kink locations of the survivals, passed to quadrature as panel edges
    xi_breakpoints: tuple = ()
    eta_breakpoints: tuple = ()

    def sample_xi_eta(self, rng: np.random.Generator, size: int = 1):
        """Exact iid draws of the coupled pair (|log W|, |log(1-W)|)."""
        xi, eta = self._sample_log(rng, size)
        return xi, eta

    def sample_w(self, rng: np.random.Generator, size=None):
        """Exact draw(s) of W, clamped to the open unit interval.

        Heavy-tailed xi makes W = exp(-xi) underflow with non-negligible
        probability; draws are clamped to the nearest representable
        interior double instead of being rejected (rejection would bias
        the law).  Use sample_xi_eta for anything quantitative.
        """
        xi, _ = self._sample_log(rng, 1 if size is None else int(size))
        w = np.clip(np.exp(-xi), _W_LO, _W_HI)
        return float(w[0]) if size is None else w

    def survival_xi(self, x):
        """P{|log W| > x}, exact closed form per family."""
        return self.xi_survival(np.asarray(x, dtype=float))

    def survival_eta(self, x):
        """P{|log(1-W)| > x} = P{W > 1 - e^(-x)}."""
        return self.eta_survival(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# quadrature helpers
# ---------------------------------------------------------------------------

def _survival_cap(surv, floor=SURV_FLOOR):
    """Smallest power-of-two x with surv(x) < floor."""
    cap = 1.0
    for _ in range(120):
        if float(surv(np.asarray([cap]))[0]) < floor:
            return cap
        cap *= 2.0
    raise QuadratureFailure("survival does not decay below %g" % floor)


def _gauss_panels(f, edges, nodes):
    x_ref, w_ref = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        h = 0.5 * (b - a)
        x = a + h * (x_ref + 1.0)
        total += h * float(np.dot(w_ref, f(x)))
    return total


def _composite_gauss(f, edges):
    """Composite Gauss-Legendre on the given panels with a 32-vs-64 node
    self-check; returns (value, error_estimate)."""
    v64 = _gauss_panels(f, edges, 64)
    v32 = _gauss_panels(f, edges, 32)
    return v64, abs(v64 - v32)


def _dyadic_edges(lo, hi):
    edges = [lo]
    k = math.floor(math.log2(max(lo, 0.25))) + 1
    while 2.0 ** k < hi:
        if 2.0 ** k > lo:
            edges.append(2.0 ** k)
        k += 1
    edges.append(hi)
    return edges


def integrate_survival(surv, power=0, upper=None, breakpoints=()):
    """Quadrature of x^power * surv(x) over [0, upper].

    With upper=None the interval is capped where the survival falls below
    SURV_FLOOR.  The piece near 0 is integrated on a log-transformed axis
    (x = e^(-u)), which tames survivals with log-singular derivatives at
    the origin; the rest uses composite Gauss-Legendre on dyadic panels.
    Extra breakpoints let piecewise-smooth survivals (table laws) keep
    full accuracy.
    """
    if upper is None:
        upper = _survival_cap(surv)
    if upper <= 0:
        return 0.0
    x0 = min(1.0, upper)
    inner_breaks = sorted(b for b in breakpoints if 0 < b < x0)
    # (0, x0] via x = e^(-u): u runs from log(1/x0) out to where x underflows
    u_lo = math.log(1.0 / x0)
    u_edges = [u_lo] + [-math.log(b) for b in reversed(inner_breaks)]
    u_edges += [u for u in (1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 700) if u > u_edges[-1]]

    def f_log(u):
        x = np.exp(-u)
        return np.exp(-(power + 1) * u) * surv(x)

    val, err = _composite_gauss(f_log, u_edges)
    if upper > x0:
        x_edges = sorted(
            set(_dyadic_edges(x0, upper)) | {b for b in breakpoints if x0 < b < upper}
        )
        v2, e2 = _composite_gauss(lambda x: (x ** power) * surv(x), x_edges)
        val, err = val + v2, err + e2
    if not math.isfinite(val) or err > 1e-9 * max(1.0, abs(val)):
        raise QuadratureFailure(
            "survival quadrature error %g too large (value %g)" % (err, val)
        )
    return val


def _mean_w_from_survival(surv):
    # E W = E e^(-xi) = 1 - int_0^inf e^(-x) P{xi > x} dx; the (0,1]
    # piece runs on a log axis like integrate_survival does, since some
    # survivals have log-singular derivatives at 0
    u_edges = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 700.0]
    v1, _ = _composite_gauss(
        lambda u: np.exp(-u - np.exp(-u)) * surv(np.exp(-u)), u_edges
    )
    v2, _ = _composite_gauss(
        lambda x: np.exp(-x) * surv(x), [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 80.0]
    )
    return 1.0 - v1 - v2


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

def beta_theta_one(theta: float) -> DistributionSpec:
    """W ~ beta(theta, 1): P{W <= x} = x^theta, xi exponential(theta)."""
    if not (theta > 0 and math.isfinite(theta)):
        raise DistributionError("beta:<theta> requires theta > 0")

    def xi_surv(x):
        return np.exp(-theta * np.maximum(x, 0.0))

    def eta_surv(x):
        x = np.maximum(x, 0.0)
        # 1 - (1 - e^(-x))^theta
        return -np.expm1(-theta * _abs_log1mexp(np.maximum(x, 5e-324)))

    def sample(rng, size):
        xi = np.maximum(rng.exponential(1.0 / theta, size=size), 5e-324)
        return xi, _abs_log1mexp(xi)

    nu = float(special.digamma(theta + 1.0) + np.euler_gamma)
    return DistributionSpec(
        name=f"beta:{theta:g}",
        xi_survival=xi_surv,
        eta_survival=eta_surv,
        tail=TailProfile(alpha=math.inf, second_moment_finite=True, nu_finite=True),
        _sample_log=sample,
        _closed_moments=MomentSet(mu=1.0 / theta, sigma2=1.0 / theta ** 2, nu=nu),
        mean_w=theta / (theta + 1.0),
    )


def example_gamma(gamma: float) -> DistributionSpec:
    """P{W > x} = 1/(1 + |log(1-x)|^gamma) for gamma in (0, 1/2).

    eta has survival 1/(1 + x^gamma) ~ x^(-gamma), so nu is infinite while
    log W keeps a finite second moment (exponential-type xi tail).
    """
    if not (0.0 < gamma < 0.5):
        raise DistributionError("example:<gamma> requires gamma in (0, 1/2)")

    def eta_surv(x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        pos = x > 0
        out[pos] = 1.0 / (1.0 + x[pos] ** gamma)
        return out

    def xi_surv(x):
        # P{xi > x} = P{W < e^(-x)} = t^gamma/(1+t^gamma), t = |log(1-e^(-x))|
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        pos = x > 0
        t = _abs_log1mexp(x[pos])
        with np.errstate(divide="ignore"):
            out[pos] = 1.0 / (1.0 + t ** (-gamma))
        return out

    def sample(rng, size):
        u = rng.random(size)
        eta = np.maximum((1.0 / u - 1.0) ** (1.0 / gamma), 5e-324)
        # xi underflows to 0 only where the true value is below ~1e-308,
        # which is immaterial for any walk on a log n scale
        return _abs_log1mexp(eta), eta

    spec = DistributionSpec(
        name=f"example:{gamma:g}",
        xi_survival=xi_surv,
        eta_survival=eta_surv,
        tail=TailProfile(alpha=math.inf, second_moment_finite=True, nu_finite=False),
        _sample_log=sample,
    )
    return _with_mean_w(spec)


def pareto_log_tail(alpha: float) -> DistributionSpec:
    """xi Pareto with index alpha on [1, inf): P{xi > x} = x^(-alpha), x >= 1.

    W = e^(-xi) <= 1/e, so eta = |log(1-W)| is bounded by -log(1-1/e) and
    nu is always finite.  alpha must be positive (a pure power tail with
    alpha = 0 is not normalizable; regime-E laws with alpha = 0 need a
    genuinely slowly varying survival, out of this family's scope).
    """
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DistributionError("paretolog:<alpha> requires alpha > 0")
    eta_max = -math.log1p(-math.exp(-1.0))  # ~0.45868

    def xi_surv(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 1.0, 1.0, np.maximum(x, 1.0) ** (-alpha))

    def eta_surv(x):
        # P{eta > x} = P{xi < -log(1 - e^(-x))}
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        small = (x > 0) & (x < eta_max)
        h = _abs_log1mexp(x[small])
        out[small] = 1.0 - h ** (-alpha)
        out[x <= 0] = 1.0
        return out

    def sample(rng, size):
        u = rng.random(size)
        xi = (1.0 - u) ** (-1.0 / alpha)
        return xi, _abs_log1mexp(xi)

    if alpha > 2:
        mu = alpha / (alpha - 1.0)
        sigma2 = alpha / (alpha - 2.0) - mu ** 2
    elif alpha > 1:
        mu, sigma2 = alpha / (alpha - 1.0), math.inf
    else:
        mu, sigma2 = math.inf, math.inf
    spec = DistributionSpec(
        name=f"paretolog:{alpha:g}",
        xi_survival=xi_surv,
        eta_survival=eta_surv,
        tail=TailProfile(
            alpha=alpha,
            second_moment_finite=alpha > 2,
            nu_finite=True,
        ),
        _sample_log=sample,
        xi_breakpoints=(1.0,),
        eta_breakpoints=(eta_max,),
    )
    spec = _with_mean_w(spec)
    if math.isfinite(mu):
        nu = integrate_survival(spec.eta_survival, upper=eta_max)
        object.__setattr__(
            spec, "_closed_moments", MomentSet(mu=mu, sigma2=sigma2, nu=nu)
        )
    return spec


def tsm2() -> DistributionSpec:
    """Boundary law P{xi > x} = x^(-2): sigma2 infinite but the truncated
    second moment int_0^x 2y P{xi>y} dy = 1 + 2 log x is slowly varying."""
    base = pareto_log_tail(2.0)

    def L(x):
        return 1.0 + 2.0 * np.log(np.maximum(np.asarray(x, dtype=float), 1.0))

    tail = TailProfile(
        alpha=2.0,
        second_moment_finite=False,
        nu_finite=True,
        slowly_varying=L,
        sv_description="1 + 2*log(x)",
        truncated_sm_slowly_varying=True,
    )
    nu = base._closed_moments.nu
    return DistributionSpec(
        name="tsm2",
        xi_survival=base.xi_survival,
        eta_survival=base.eta_survival,
        tail=tail,
        _sample_log=base._sample_log,
        _closed_moments=MomentSet(mu=2.0, sigma2=math.inf, nu=nu),
        mean_w=base.mean_w,
        xi_breakpoints=base.xi_breakpoints,
        eta_breakpoints=base.eta_breakpoints,
    )


def user_table(u: np.ndarray, w: np.ndarray, name: str = "table") -> DistributionSpec:
    """Inverse-CDF grid law: W = Finv(U) by monotone linear interpolation.

    Both columns must be strictly increasing; u must span [0, 1] and w must
    stay strictly inside (0, 1), which keeps xi and eta bounded and makes
    all moments finite (regime A).  Tail metadata is fixed by the bounded
    support, never estimated.
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    if u.ndim != 1 or u.shape != w.shape or len(u) < 2:
        raise DistributionError("table needs two equal-length columns, >= 2 rows")
    if not (np.all(np.diff(u) > 0) and np.all(np.diff(w) > 0)):
        raise DistributionError("table columns must be strictly increasing")
    if not (u[0] == 0.0 and u[-1] == 1.0):
        raise DistributionError("u column must span [0, 1]")
    if not (0.0 < w[0] and w[-1] < 1.0):
        raise DistributionError(
            "w values must stay strictly inside (0,1): atoms at 0/1 rejected"
        )

    def cdf_w(x):
        # P{W <= x}; linear inverse of the u->w grid, clamped outside support
        x = np.asarray(x, dtype=float)
        return np.interp(x, w, u, left=0.0, right=1.0)

    def xi_surv(x):
        return cdf_w(np.exp(-np.maximum(np.asarray(x, dtype=float), 0.0)))

    def eta_surv(x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return 1.0 - cdf_w(-np.expm1(-x))

    def sample(rng, size):
        ww = np.interp(rng.random(size), u, w)
        return -np.log(ww), -np.log1p(-ww)

    spec = DistributionSpec(
        name=name,
        xi_survival=xi_surv,
        eta_survival=eta_surv,
        tail=TailProfile(alpha=math.inf, second_moment_finite=True, nu_finite=True),
        _sample_log=sample,
        xi_breakpoints=tuple(sorted(-np.log(w))),
        eta_breakpoints=tuple(sorted(-np.log1p(-w))),
    )
    return _with_mean_w(spec)


def _with_mean_w(spec: DistributionSpec) -> DistributionSpec:
    object.__setattr__(spec, "mean_w", _mean_w_from_survival(spec.xi_survival))
    return spec


# ---------------------------------------------------------------------------
# law-string grammar
# ---------------------------------------------------------------------------

def parse_law(text: str) -> DistributionSpec:
    """Parse `beta:<theta>`, `example:<gamma>`, `paretolog:<alpha>`, `tsm2`
    or `table:<path>` (two-column CSV u,w)."""
    text = text.strip()
    if text == "tsm2":
        return tsm2()
    head, sep, arg = text.partition(":")
    if not sep:
        raise DistributionError(f"unrecognized law {text!r}")
    if head == "table":
        try:
            data = np.loadtxt(arg, delimiter=",", ndmin=2)
        except OSError as exc:
            raise DistributionError(f"cannot read table {arg!r}: {exc}") from exc
        if data.shape[1] != 2:
            raise DistributionError("table CSV must have exactly two columns u,w")
        return user_table(data[:, 0], data[:, 1], name=f"table:{arg}")
    try:
        value = float(arg)
    except ValueError as exc:
        raise DistributionError(f"bad numeric parameter in {text!r}") from exc
    if head == "beta":
        return beta_theta_one(value)
    if head == "example":
        return example_gamma(value)
    if head == "paretolog":
        return pareto_log_tail(value)
    raise DistributionError(f"unrecognized law family {head!r}")


# ---------------------------------------------------------------------------
# moments and regime classification
# ---------------------------------------------------------------------------

def moments(spec: DistributionSpec) -> MomentSet:
    """mu, sigma2, nu: closed form when the family has one, else adaptive
    quadrature of the survivals.  Infinite values come from the declared
    tail flags, never from divergent quadrature."""
    if spec._closed_moments is not None:
        return spec._closed_moments
    tail = spec.tail
    mu_finite = math.isinf(tail.alpha) or tail.alpha > 1
    mu = (
        integrate_survival(spec.xi_survival, breakpoints=spec.xi_breakpoints)
        if mu_finite
        else math.inf
    )
    if tail.second_moment_finite:
        sigma2 = (
            2.0
            * integrate_survival(
                spec.xi_survival, power=1, breakpoints=spec.xi_breakpoints
            )
            - mu ** 2
        )
    else:
        sigma2 = math.inf
    nu = (
        integrate_survival(spec.eta_survival, breakpoints=spec.eta_breakpoints)
        if tail.nu_finite
        else math.inf
    )
    return MomentSet(mu=mu, sigma2=sigma2, nu=nu)


def classify_regime(spec: DistributionSpec) -> Regime:
    """Map declared tail metadata to one of the five convergence types."""
    tail = spec.tail
    if tail.second_moment_finite:
        return Regime.A
    if tail.truncated_sm_slowly_varying:
        return Regime.B
    if 1.0 < tail.alpha < 2.0:
        return Regime.C
    if tail.alpha == 1.0:
        return Regime.D
    if 0.0 <= tail.alpha < 1.0:
        return Regime.E
    raise Unclassifiable(
        f"tail of {spec.name} (alpha={tail.alpha}) matches no regime; "
        "alpha=2 needs a declared slowly varying truncated second moment"
    )
